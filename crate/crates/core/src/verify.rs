//! Manufactured solutions, convergence tables and the Robin
//! non-uniqueness demonstration.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_fn::BoundaryFunction;
use crate::cauchy::HolomorphicEvaluator;
use crate::geometry::{make_curve, BoundaryCurve, DomainSpec};
use crate::solvers::{
    membership, solve_dirichlet, solve_neumann, solve_regularity, solve_robin, ProblemData, ProblemKind,
    RobinCoefficient, SolveConfig, SolveReport, Verdict,
};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Seed for every randomized check in this module.
pub const ORACLE_SEED: u64 = 0x0dba_2c0d;

pub const CATALOG: [&str; 6] = ["poly3", "exp", "rational_pole_out", "conj_reject", "constant", "robin_linear"];

/// Robin coefficient used by catalog cases unless overridden.
pub const DEFAULT_ROBIN_B: f64 = 0.5;

const FD_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Oracle {
    Poly3,
    Exp,
    Rational { a: Complex64 },
    Conj,
    Constant { c: Complex64 },
    Linear,
}

impl Oracle {
    fn value(self, z: Complex64) -> Complex64 {
        match self {
            Oracle::Poly3 => z * z * z + 2.0 * z,
            Oracle::Exp => z.exp(),
            Oracle::Rational { a } => 1.0 / (z - a),
            Oracle::Conj => z.conj(),
            Oracle::Constant { c } => c,
            Oracle::Linear => z,
        }
    }

    /// Complex derivative; `None` for non-holomorphic oracles.
    fn derivative(self, z: Complex64) -> Option<Complex64> {
        Some(match self {
            Oracle::Poly3 => 3.0 * z * z + 2.0,
            Oracle::Exp => z.exp(),
            Oracle::Rational { a } => -1.0 / ((z - a) * (z - a)),
            Oracle::Conj => return None,
            Oracle::Constant { .. } => Complex64::new(0.0, 0.0),
            Oracle::Linear => Complex64::new(1.0, 0.0),
        })
    }

    /// Arclength derivative of the boundary trace at `ζ` with tangent `T`.
    fn tangential(self, z: Complex64, t: Complex64) -> Complex64 {
        match self.derivative(z) {
            Some(d) => d * t,
            None => t.conj(),
        }
    }
}

/// A closed-form solution `H` on a given curve with the boundary data it
/// generates for each problem kind.
#[derive(Clone, Debug)]
pub struct ManufacturedCase {
    name: String,
    oracle: Oracle,
    curve: Arc<BoundaryCurve>,
    robin_b: Complex64,
    alpha: Complex64,
    expected: Verdict,
}

impl ManufacturedCase {
    pub fn new(name: &str, curve: &Arc<BoundaryCurve>) -> Result<Self> {
        Self::with_robin(name, curve, Complex64::new(DEFAULT_ROBIN_B, 0.0))
    }

    pub fn with_robin(name: &str, curve: &Arc<BoundaryCurve>, b: Complex64) -> Result<Self> {
        let reference = curve.interior_reference();
        let oracle = match name {
            "poly3" => Oracle::Poly3,
            "exp" => Oracle::Exp,
            "rational_pole_out" => {
                let r_max = curve.nodes().iter().map(|z| (z - reference).norm()).fold(0.0, f64::max);
                Oracle::Rational { a: reference + 1.5 * r_max }
            }
            "conj_reject" => Oracle::Conj,
            "constant" => Oracle::Constant { c: Complex64::new(1.0, 0.0) },
            "robin_linear" => Oracle::Linear,
            other => return Err(Error::UnknownCase(other.to_string())),
        };
        let expected = if oracle == Oracle::Conj { Verdict::Rejected } else { Verdict::Accepted };
        let case = Self { name: name.to_string(), oracle, curve: curve.clone(), robin_b: b, alpha: reference, expected };
        if expected == Verdict::Accepted {
            case.check_derivative()?;
            case.check_compatibility()?;
        }
        Ok(case)
    }

    /// The same case rebuilt on another curve.
    pub fn on_curve(&self, curve: &Arc<BoundaryCurve>) -> Result<Self> {
        Self::with_robin(&self.name, curve, self.robin_b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        &self.curve
    }

    pub fn expected(&self) -> Verdict {
        self.expected
    }

    pub fn is_holomorphic(&self) -> bool {
        self.oracle != Oracle::Conj
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn robin_b(&self) -> Complex64 {
        self.robin_b
    }

    pub fn exact(&self, z: Complex64) -> Complex64 {
        self.oracle.value(z)
    }

    pub fn exact_derivative(&self, z: Complex64) -> Option<Complex64> {
        self.oracle.derivative(z)
    }

    /// The exact solution of `kind` at `z`; the Neumann solution is
    /// normalized to vanish at [`alpha`](Self::alpha).
    pub fn exact_solution(&self, kind: ProblemKind, z: Complex64) -> Complex64 {
        match kind {
            ProblemKind::Neumann => self.exact(z) - self.exact(self.alpha),
            _ => self.exact(z),
        }
    }

    /// `f = trace H`.
    pub fn trace(&self) -> BoundaryFunction {
        BoundaryFunction::from_fn(&self.curve, |z, _| self.oracle.value(z)).expect("oracle is finite on the curve")
    }

    /// `∂_T trace H`.
    pub fn tangential_trace(&self) -> BoundaryFunction {
        BoundaryFunction::from_fn(&self.curve, |z, t| self.oracle.tangential(z, t)).expect("oracle is finite on the curve")
    }

    /// `g = −i∂_T trace H`, which equals `−iT·trace H′` for holomorphic `H`.
    pub fn neumann_data(&self) -> BoundaryFunction {
        self.tangential_trace().map(|v| -I * v)
    }

    pub fn robin_coefficient(&self) -> RobinCoefficient {
        RobinCoefficient::constant(&self.curve, self.robin_b)
    }

    /// `r = −i∂_T trace H + b·trace H`.
    pub fn robin_data(&self) -> BoundaryFunction {
        let b = self.robin_b;
        self.neumann_data().zip_with(&self.trace(), |g, f| g + b * f).expect("same curve")
    }

    pub fn problem_data(&self, kind: ProblemKind) -> ProblemData {
        match kind {
            ProblemKind::Dirichlet => ProblemData::Dirichlet(self.trace()),
            ProblemKind::Regularity => ProblemData::Regularity(self.trace()),
            ProblemKind::Neumann => ProblemData::Neumann { g: self.neumann_data(), alpha: self.alpha },
            ProblemKind::Robin => ProblemData::Robin { coef: self.robin_coefficient(), r: self.robin_data() },
        }
    }

    /// Interior points `z_ref + t(ζ_j − z_ref)` from the seeded generator.
    pub fn random_interior_points(&self, count: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = self.curve.nodes();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let j = rng.gen_range(0..nodes.len());
            let t: f64 = rng.gen_range(0.05..0.8);
            let z = self.alpha + t * (nodes[j] - self.alpha);
            if self.curve.contains(z) {
                out.push(z);
            }
        }
        out
    }

    /// Hand-derived `H′` against a fourth-order symmetric difference of `H`
    /// at 10 seeded interior points.
    fn check_derivative(&self) -> Result<()> {
        let h = 1e-3 * self.curve.diameter();
        for z in self.random_interior_points(10, ORACLE_SEED) {
            let f = |w: Complex64| self.oracle.value(w);
            let fd = ((f(z + h) - f(z - h)) - I * (f(z + I * h) - f(z - I * h))) / (4.0 * h);
            let exact = self.oracle.derivative(z).expect("holomorphic oracle");
            if (fd - exact).norm() > FD_TOLERANCE * exact.norm().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "case {}: derivative oracle disagrees with finite differences at {z}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    fn check_compatibility(&self) -> Result<()> {
        let g = self.neumann_data();
        let integral = g.boundary_integral(crate::IntegralKind::Arclength);
        let scale = g.lp_norm(1.0)? * self.curve.length();
        if integral.norm() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(format!("case {}: Neumann data has mean {integral}", self.name)));
        }
        self.robin_coefficient().require_compatible(crate::solvers::DEFAULT_DELTA_C)?;
        Ok(())
    }

    /// Solves `kind` with the case data.
    pub fn solve(&self, kind: ProblemKind, cfg: &SolveConfig) -> Result<(HolomorphicEvaluator, SolveReport)> {
        match kind {
            ProblemKind::Dirichlet => solve_dirichlet(&self.trace(), cfg),
            ProblemKind::Regularity => solve_regularity(&self.trace(), cfg),
            ProblemKind::Neumann => solve_neumann(&self.neumann_data(), self.alpha, cfg),
            ProblemKind::Robin => solve_robin(&self.robin_coefficient(), &self.robin_data(), cfg),
        }
    }

    /// Max interior error of a solution of `kind` over `probes`; for the
    /// regularity problem the derivative error is included.
    pub fn interior_error(&self, kind: ProblemKind, ev: &HolomorphicEvaluator, probes: &[Complex64]) -> Result<f64> {
        let mut err: f64 = 0.0;
        for &z in probes {
            err = err.max((ev.value(z)? - self.exact_solution(kind, z)).norm());
            if kind == ProblemKind::Regularity {
                if let Some(d) = self.exact_derivative(z) {
                    err = err.max((ev.derivative(z)? - d).norm());
                }
            }
        }
        Ok(err)
    }
}

pub fn manufactured_case(name: &str, curve: &Arc<BoundaryCurve>) -> Result<ManufacturedCase> {
    ManufacturedCase::new(name, curve)
}

/// All catalog cases on one curve.
pub fn catalog(curve: &Arc<BoundaryCurve>) -> Result<Vec<ManufacturedCase>> {
    CATALOG.iter().map(|name| ManufacturedCase::new(name, curve)).collect()
}

/// Membership reports for every catalog case, computed in parallel.
pub fn catalog_membership(
    curve: &Arc<BoundaryCurve>,
    kind: ProblemKind,
    cfg: &SolveConfig,
) -> Result<Vec<(String, Verdict, SolveReport)>> {
    catalog(curve)?
        .par_iter()
        .map(|case| Ok((case.name().to_string(), case.expected(), membership(&case.problem_data(kind), cfg)?)))
        .collect()
}

/// Fixed probes `z_ref + ρ·R·e^{iθ}` where `R` is the distance from the
/// reference point to the nearest node, `ρ ∈ {0.3, 0.6, 0.9}` on smooth
/// curves and `{0.2, 0.5, 0.8}` on polygons, and five angles per radius.
pub fn probe_points(curve: &BoundaryCurve) -> Vec<Complex64> {
    let reference = curve.interior_reference();
    let inradius = curve.nodes().iter().map(|z| (z - reference).norm()).fold(f64::INFINITY, f64::min);
    let radii: [f64; 3] = if curve.is_smooth() { [0.3, 0.6, 0.9] } else { [0.2, 0.5, 0.8] };
    radii
        .iter()
        .flat_map(|&rho| {
            (0..5).map(move |k| {
                let theta = 0.3 + 2.0 * PI * k as f64 / 5.0;
                reference + Complex64::from_polar(rho * inradius, theta)
            })
        })
        .filter(|&z| curve.contains(z))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub case: String,
    pub problem: ProblemKind,
    pub sizes: Vec<usize>,
    /// Max interior error at the fixed probes.
    pub errors: Vec<f64>,
    /// Membership residual of the generated data.
    pub trace_residuals: Vec<f64>,
    /// `log(e_k / e_{k+1}) / log(N_{k+1} / N_k)`; `log₂(e_N/e_{2N})` for doubled sizes.
    pub orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn is_monotone(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("at least two sizes")
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(["n", "interior_error", "trace_residual", "order"]).map_err(err)?;
        for (k, n) in self.sizes.iter().enumerate() {
            let order = if k == 0 { String::new() } else { format!("{:.6}", self.orders[k - 1]) };
            w.write_record([
                n.to_string(),
                format!("{:.6e}", self.errors[k]),
                format!("{:.6e}", self.trace_residuals[k]),
                order,
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two whitespace-separated columns `N error`, one row per size.
    pub fn write_dat<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# N interior_error")?;
        for (n, e) in self.sizes.iter().zip(&self.errors) {
            writeln!(writer, "{n} {e:.6e}")?;
        }
        Ok(())
    }
}

/// Solves `kind` for `case` on grids of the given sizes and tabulates
/// interior errors at fixed probes. Verdicts are not enforced here.
pub fn run_convergence(
    case: &ManufacturedCase,
    kind: ProblemKind,
    sizes: &[usize],
    cfg: &SolveConfig,
) -> Result<ConvergenceTable> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("convergence sizes must be at least two, strictly increasing".into()));
    }
    let cfg = SolveConfig { tau: f64::INFINITY, with_ntm: false, ..cfg.clone() };
    let base: &DomainSpec = case.curve().spec();
    let probes = probe_points(&*make_curve(&base.with_nodes(sizes[0]))?);
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let at = |e: Error| Error::AtSize { size: n, source: Box::new(e) };
            let curve = make_curve(&base.with_nodes(n)).map_err(at)?;
            let local = case.on_curve(&curve).map_err(at)?;
            let (ev, report) = local.solve(kind, &cfg).map_err(at)?;
            Ok((local.interior_error(kind, &ev, &probes).map_err(at)?, report.residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let orders = sizes
        .windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect();
    Ok(ConvergenceTable {
        case: case.name().to_string(),
        problem: kind,
        sizes: sizes.to_vec(),
        errors,
        trace_residuals: rows.iter().map(|r| r.1).collect(),
        orders,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonuniquenessReport {
    pub n_nodes: usize,
    pub b: f64,
    pub integral_b: f64,
    pub margin: f64,
    /// `solve_robin` refused the instance.
    pub refused: bool,
    pub refusal: String,
    /// `(Re C, Im C, ‖−i∂_T(Cζ) + b·Cζ‖₂)` for each constant tried.
    pub residuals: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

/// On the unit disk with `b ≡ −1`, every `G(z) = Cz` solves the Robin
/// problem with `r ≡ 0`, and the compatibility margin vanishes.
pub fn nonuniqueness_demo() -> NonuniquenessReport {
    nonuniqueness_demo_on(256)
}

pub fn nonuniqueness_demo_on(n_nodes: usize) -> NonuniquenessReport {
    let curve = make_curve(&DomainSpec::unit_disk(n_nodes)).expect("unit disk is valid");
    let b = -1.0;
    let coef = RobinCoefficient::constant(&curve, Complex64::new(b, 0.0));
    let zero = BoundaryFunction::zeros(&curve);
    let (refused, refusal) = match solve_robin(&coef, &zero, &SolveConfig::default()) {
        Err(e @ Error::Compatibility { .. }) => (true, e.to_string()),
        Err(e) => (false, e.to_string()),
        Ok(_) => (false, "solve_robin accepted the instance".into()),
    };
    let residuals: Vec<(f64, f64, f64)> = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0), Complex64::new(-3.0, 0.0)]
        .iter()
        .map(|&c| {
            let g = BoundaryFunction::from_fn(&curve, |z, _| c * z).expect("finite");
            let dg = g.tangential_derivative().expect("smooth curve");
            let lhs = dg.map(|v| -I * v).zip_with(&g, |a, v| a + b * v).expect("same curve");
            (c.re, c.im, lhs.lp_norm(2.0).expect("p = 2"))
        })
        .collect();
    let margin = coef.margin();
    let passed = margin <= 1e-12 && refused && residuals.iter().all(|r| r.2 <= 1e-10);
    NonuniquenessReport { n_nodes, b, integral_b: coef.total().re, margin, refused, refusal, residuals, passed }
}
