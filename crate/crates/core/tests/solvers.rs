use std::sync::Arc;

use dbar_core::solvers::{membership_refined, ProblemData};
use dbar_core::verify::{self, ManufacturedCase};
use dbar_core::{
    cauchy_trace, make_curve, membership, robin_transform, solve_dirichlet, solve_neumann, solve_regularity,
    BoundaryCurve, BoundaryFunction, Complex64, DomainSpec, Error, ProblemKind, RobinCoefficient, SolveConfig,
    TraceMethod, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk(n: usize) -> Arc<BoundaryCurve> {
    make_curve(&DomainSpec::unit_disk(n)).unwrap()
}

fn probes() -> Vec<Complex64> {
    (0..20).map(|k| Complex64::from_polar(0.1 + 0.04 * k as f64, 0.7 * k as f64)).collect()
}

#[test]
fn verdict_matches_residual_against_tolerance() {
    let curve = disk(128);
    for tau in [1e-12, 1e-6, 0.5] {
        let cfg = SolveConfig { tau, ..SolveConfig::default() };
        for case in verify::catalog(&curve).unwrap() {
            for kind in [ProblemKind::Dirichlet, ProblemKind::Regularity, ProblemKind::Neumann, ProblemKind::Robin] {
                let report = membership(&case.problem_data(kind), &cfg).unwrap();
                assert_eq!(report.verdict == Verdict::Rejected, report.residual > tau, "{} {kind:?}", case.name());
            }
        }
    }
}

#[test]
fn accepted_solves_agree_under_refinement() {
    for kind in [ProblemKind::Dirichlet, ProblemKind::Regularity, ProblemKind::Robin] {
        let coarse = ManufacturedCase::new("exp", &disk(128)).unwrap();
        let fine = coarse.on_curve(&disk(256)).unwrap();
        let cfg = SolveConfig { with_ntm: false, ..SolveConfig::default() };
        let (a, ra) = coarse.solve(kind, &cfg).unwrap();
        let (b, rb) = fine.solve(kind, &cfg).unwrap();
        assert!(ra.accepted() && rb.accepted());
        let bound = fine.interior_error(kind, &b, &probes()).unwrap().max(1e-13);
        for z in probes() {
            let d = (a.value(z).unwrap() - b.value(z).unwrap()).norm();
            assert!(d <= 10.0 * bound.max(coarse.interior_error(kind, &a, &probes()).unwrap()), "{kind:?} {d:e}");
        }
    }
}

#[test]
fn neumann_base_points_differ_by_a_constant_on_the_square() {
    let curve = make_curve(&DomainSpec::unit_square(512)).unwrap();
    let case = ManufacturedCase::new("poly3", &curve).unwrap();
    let g = case.neumann_data();
    let cfg = SolveConfig::default();
    let (g1, report) = solve_neumann(&g, c(0.5, 0.5), &cfg).unwrap();
    assert!(report.accepted(), "{report:?}");
    let (g2, _) = solve_neumann(&g, c(0.3, 0.7), &cfg).unwrap();
    let pts: Vec<Complex64> = (0..20).map(|k| c(0.5, 0.5) + Complex64::from_polar(0.3, 0.9 * k as f64)).collect();
    let base = g1.value(pts[0]).unwrap() - g2.value(pts[0]).unwrap();
    for &z in &pts {
        assert!((g1.value(z).unwrap() - g2.value(z).unwrap() - base).norm() <= 1e-8);
        let exact = case.exact(z) - case.exact(c(0.5, 0.5));
        assert!((g1.value(z).unwrap() - exact).norm() <= 1e-6);
    }
    assert!(report.checks["representation_consistency"] <= 1e-6);
}

#[test]
fn neumann_zero_data_and_value_at_alpha() {
    let curve = disk(128);
    let case = ManufacturedCase::new("exp", &curve).unwrap();
    let alpha = c(0.2, -0.3);
    let (g, report) = solve_neumann(&case.neumann_data(), alpha, &SolveConfig::default()).unwrap();
    assert!(report.checks["value_at_alpha"] <= 1e-10);
    assert!(g.value(alpha).unwrap().norm() <= 1e-10);
    assert!(report.checks["representation_consistency"] <= 1e-6);
    assert!(report.checks["neumann_residual"] <= 1e-8);
}

#[test]
fn robin_transform_holder_smoothing_is_bounded() {
    let curve = disk(256);
    let mut rng = ChaCha8Rng::seed_from_u64(verify::ORACLE_SEED);
    let mut ratios = Vec::new();
    while ratios.len() < 10 {
        let coef = RobinCoefficient::constant(&curve, c(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..0.5)));
        if coef.margin() < 0.1 {
            continue;
        }
        let k: i32 = rng.gen_range(1..6);
        let r = BoundaryFunction::from_fn(&curve, |z, _| z.powi(k) + z.conj()).unwrap();
        let h = robin_transform(&coef, &r).unwrap();
        ratios.push(h.holder_seminorm(0.5) / r.lp_norm(2.0).unwrap() / coef.sup_constant());
    }
    assert!(ratios.iter().all(|r| r.is_finite() && *r < 10.0), "{ratios:?}");
}

#[test]
fn offset_and_pv_traces_agree_on_smooth_and_polygonal_curves() {
    for spec in [DomainSpec::ellipse(1.4, 0.8, 256), DomainSpec::unit_square(512)] {
        let curve = make_curve(&spec).unwrap();
        let f = BoundaryFunction::from_fn(&curve, |z, _| z * z + 1.0).unwrap();
        let pv = cauchy_trace(&f, &TraceMethod::PvSubtraction).unwrap();
        let off = cauchy_trace(&f, &TraceMethod::offset(2)).unwrap();
        let mask = (!curve.is_smooth()).then(|| curve.corner_flags());
        let rel = (&pv - &f).lp_norm_masked(2.0, mask).unwrap() / f.lp_norm(2.0).unwrap();
        assert!(rel < 1e-8, "pv {rel:e}");
        let rel = (&off - &f).lp_norm_masked(2.0, mask).unwrap() / f.lp_norm(2.0).unwrap();
        assert!(rel < 1e-4, "offset {rel:e}");
    }
}

#[test]
fn regularity_on_an_ellipse_and_a_triangle() {
    let tri = DomainSpec::polygon(vec![c(0.0, 0.0), c(2.0, 0.0), c(0.5, 1.5)], 600);
    for spec in [DomainSpec::ellipse(1.3, 0.7, 256), tri] {
        let curve = make_curve(&spec).unwrap();
        let case = ManufacturedCase::new("poly3", &curve).unwrap();
        let (ev, report) = solve_regularity(&case.trace(), &SolveConfig::default()).unwrap();
        assert!(report.accepted(), "{report:?}");
        let z = curve.interior_reference();
        assert!((ev.derivative(z).unwrap() - case.exact_derivative(z).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn refinement_escalation_keeps_genuine_rejections() {
    let spec = DomainSpec::unit_disk(64);
    let cfg = SolveConfig::default();
    let conj = membership_refined(&spec, &cfg, |curve| {
        Ok(ProblemData::Dirichlet(BoundaryFunction::from_fn(curve, |z, _| z.conj())?))
    })
    .unwrap();
    assert_eq!(conj.verdict, Verdict::Rejected);
    assert_eq!(conj.n_nodes, 128);

    // resolved only on the finer grid
    let near_pole = c(1.15, 0.0);
    let refined = membership_refined(&DomainSpec::unit_disk(32), &cfg, |curve| {
        Ok(ProblemData::Dirichlet(BoundaryFunction::from_fn(curve, |z, _| 1.0 / (z - near_pole))?))
    })
    .unwrap();
    assert!(refined.checks["coarse_residual"] > cfg.tau);
    assert_eq!(refined.n_nodes, 64);
}

#[test]
fn dirichlet_zero_data_is_trivially_accepted_on_the_square() {
    let curve = make_curve(&DomainSpec::unit_square(64)).unwrap();
    let (ev, report) = solve_dirichlet(&BoundaryFunction::zeros(&curve), &SolveConfig::default()).unwrap();
    assert!(report.accepted());
    assert_eq!(ev.value(c(0.5, 0.5)).unwrap(), c(0.0, 0.0));
}

#[test]
fn exterior_alpha_and_mismatched_curves() {
    let a = disk(64);
    let b = disk(128);
    let ra = BoundaryFunction::constant(&a, c(1.0, 0.0));
    let coef = RobinCoefficient::constant(&b, c(0.5, 0.0));
    assert!(matches!(robin_transform(&coef, &ra), Err(Error::CurveMismatch)));
    assert!(matches!(
        solve_neumann(&BoundaryFunction::zeros(&a), c(1.0, 0.0), &SolveConfig::default()),
        Err(Error::Exterior { .. })
    ));
}
