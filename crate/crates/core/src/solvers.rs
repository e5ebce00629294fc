//! Solvers for the Dirichlet, regularity, Neumann and Robin problems for
//! ∂̄, and the membership tests for their data spaces.
//!
//! Every solver returns a [`HolomorphicEvaluator`] built from a Cauchy
//! integral of (possibly transformed) boundary data, and a [`SolveReport`]
//! whose membership verdict compares the boundary trace of that Cauchy
//! integral with the density it was built from.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_fn::{BoundaryFunction, IntegralKind};
use crate::cauchy::{cauchy_interior, cauchy_trace, ntm_estimate, HolomorphicEvaluator, TraceMethod};
use crate::geometry::{make_curve, BoundaryCurve, ConeConfig, DomainSpec};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const DEFAULT_TAU: f64 = 1e-6;
pub const DEFAULT_DELTA_C: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Dirichlet,
    Regularity,
    Neumann,
    Robin,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Dirichlet => "dirichlet",
            ProblemKind::Regularity => "regularity",
            ProblemKind::Neumann => "neumann",
            ProblemKind::Robin => "robin",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" | "dirichlet_hp" => Ok(ProblemKind::Dirichlet),
            "regularity" | "regularity_h1p" => Ok(ProblemKind::Regularity),
            "neumann" | "neumann_np" => Ok(ProblemKind::Neumann),
            "robin" | "robin_rpb" => Ok(ProblemKind::Robin),
            other => Err(Error::InvalidInput(format!("unknown problem kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub p: f64,
    pub trace: TraceMethod,
    /// Relative membership tolerance.
    pub tau: f64,
    /// Compatibility threshold.
    pub delta_c: f64,
    /// Cone for non-tangential maximal function estimates; sized to the
    /// domain when absent.
    pub cone: Option<ConeConfig>,
    /// Leave corner-adjacent polygon nodes out of residual norms.
    pub exclude_corners: bool,
    /// Compute sampled non-tangential maximal norms for accepted data.
    pub with_ntm: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            trace: TraceMethod::PvSubtraction,
            tau: DEFAULT_TAU,
            delta_c: DEFAULT_DELTA_C,
            cone: None,
            exclude_corners: true,
            with_ntm: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidInput(format!("p must lie in (1, ∞), got {}", self.p)));
        }
        if !(self.tau > 0.0 && self.delta_c > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn mask<'a>(&self, curve: &'a BoundaryCurve) -> Option<&'a [bool]> {
        (self.exclude_corners && !curve.is_smooth()).then(|| curve.corner_flags())
    }

    fn cone_for(&self, curve: &BoundaryCurve) -> ConeConfig {
        self.cone.clone().unwrap_or_else(|| ConeConfig::default_for(curve))
    }
}

/// Robin coefficient `b` with its prefix integrals `B_j = ∫_{γ(ζ_0, ζ_j)} b dσ`.
#[derive(Clone, Debug)]
pub struct RobinCoefficient {
    b: BoundaryFunction,
    prefix: Vec<Complex64>,
    total: Complex64,
}

impl RobinCoefficient {
    pub fn new(b: BoundaryFunction) -> Self {
        let (prefix, total) = b.curve().cumulative(b.values());
        Self { b, prefix, total }
    }

    pub fn constant(curve: &Arc<BoundaryCurve>, value: Complex64) -> Self {
        Self::new(BoundaryFunction::constant(curve, value))
    }

    pub fn b(&self) -> &BoundaryFunction {
        &self.b
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        self.b.curve()
    }

    pub fn prefix(&self) -> &[Complex64] {
        &self.prefix
    }

    /// `∫_{bD} b dσ`.
    pub fn total(&self) -> Complex64 {
        self.total
    }

    /// `|e^{i∫b dσ} − 1|`.
    pub fn margin(&self) -> f64 {
        ((I * self.total).exp() - 1.0).norm()
    }

    /// `C(D, b) = e^{‖b‖₁} / |e^{i∫b} − 1|`.
    pub fn sup_constant(&self) -> f64 {
        self.b.lp_norm(1.0).expect("p = 1 is valid").exp() / self.margin()
    }

    pub fn compatibility(&self, threshold: f64) -> Compatibility {
        let margin = self.margin();
        Compatibility {
            condition: ROBIN_CONDITION.into(),
            integral: [self.total.re, self.total.im],
            margin,
            threshold,
            passed: margin >= threshold,
        }
    }

    /// Errors with [`Error::Compatibility`] when the margin is below `threshold`.
    pub fn require_compatible(&self, threshold: f64) -> Result<()> {
        let margin = self.margin();
        if margin < threshold || !margin.is_finite() {
            return Err(Error::Compatibility { condition: ROBIN_CONDITION, integral: self.total, margin, threshold });
        }
        Ok(())
    }
}

const ROBIN_CONDITION: &str = "|exp(i∫b)−1|";
const NEUMANN_CONDITION: &str = "|∫g dσ|/(‖g‖₁·L)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compatibility {
    pub condition: String,
    /// Real and imaginary part of the boundary integral being tested.
    pub integral: [f64; 2],
    pub margin: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: ProblemKind,
    pub verdict: Verdict,
    /// Relative membership residual compared against `tolerance`.
    pub residual: f64,
    pub tolerance: f64,
    pub checks: BTreeMap<String, f64>,
    pub compatibility: Option<Compatibility>,
    pub norms: BTreeMap<String, f64>,
    pub n_nodes: usize,
    pub p: f64,
    pub trace_method: String,
    pub runtime_seconds: f64,
}

impl SolveReport {
    fn new(problem: ProblemKind, residual: f64, curve: &BoundaryCurve, cfg: &SolveConfig) -> Self {
        Self {
            problem,
            verdict: if residual > cfg.tau { Verdict::Rejected } else { Verdict::Accepted },
            residual,
            tolerance: cfg.tau,
            checks: BTreeMap::new(),
            compatibility: None,
            norms: BTreeMap::new(),
            n_nodes: curve.len(),
            p: cfg.p,
            trace_method: cfg.trace.name().to_string(),
            runtime_seconds: 0.0,
        }
    }

    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Data for one of the four boundary problems.
#[derive(Clone, Debug)]
pub enum ProblemData {
    Dirichlet(BoundaryFunction),
    Regularity(BoundaryFunction),
    Neumann { g: BoundaryFunction, alpha: Complex64 },
    Robin { coef: RobinCoefficient, r: BoundaryFunction },
}

impl ProblemData {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemData::Dirichlet(_) => ProblemKind::Dirichlet,
            ProblemData::Regularity(_) => ProblemKind::Regularity,
            ProblemData::Neumann { .. } => ProblemKind::Neumann,
            ProblemData::Robin { .. } => ProblemKind::Robin,
        }
    }
}

fn relative(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `‖trace(𝐂f) − f‖_p / ‖f‖_p` and the trace itself.
fn dirichlet_residual(f: &BoundaryFunction, cfg: &SolveConfig) -> Result<(f64, BoundaryFunction)> {
    floored_residual(f, cfg, 0.0)
}

/// As [`dirichlet_residual`] with the denominator bounded below by `floor`.
fn floored_residual(f: &BoundaryFunction, cfg: &SolveConfig, floor: f64) -> Result<(f64, BoundaryFunction)> {
    if f.is_zero() {
        return Ok((0.0, f.clone()));
    }
    let trace = cauchy_trace(f, &cfg.trace)?;
    let mask = cfg.mask(f.curve());
    let rho = relative((&trace - f).lp_norm_masked(cfg.p, mask)?, f.lp_norm_masked(cfg.p, mask)?.max(floor));
    Ok((rho, trace))
}

/// Residual of the derivative density `df` of `f`, measured against
/// `max(‖df‖_p, ‖f‖_p / L)` so that roundoff-level derivatives of
/// (nearly) constant data are not mistaken for rejection.
fn derivative_residual(
    f: &BoundaryFunction,
    df: &BoundaryFunction,
    cfg: &SolveConfig,
) -> Result<(f64, BoundaryFunction)> {
    let floor = f.lp_norm_masked(cfg.p, cfg.mask(f.curve()))? / f.curve().length();
    floored_residual(df, cfg, floor)
}

/// `conj(T)·∂_T f`, the boundary density of `(𝐂f)′`.
fn derivative_density(f: &BoundaryFunction) -> Result<BoundaryFunction> {
    Ok(f.tangential_derivative()?.map_with_tangent(|v, t| t.conj() * v))
}

fn record_ntm(
    report: &mut SolveReport,
    name: &str,
    evaluator: &HolomorphicEvaluator,
    trace: &BoundaryFunction,
    cfg: &SolveConfig,
) -> Result<()> {
    let cone = cfg.cone_for(evaluator.curve());
    let est = ntm_estimate(evaluator, &cone, Some(trace))?;
    report.norms.insert(format!("{name}_ntm_lp"), est.values.lp_norm(cfg.p)?);
    report.norms.insert(format!("{name}_ntm_sup"), est.values.lp_norm(f64::INFINITY)?);
    report.norms.insert(format!("{name}_ntm_samples"), est.samples as f64);
    Ok(())
}

/// `F = 𝐂f`; accepted when the trace of `F` reproduces `f`.
pub fn solve_dirichlet(f: &BoundaryFunction, cfg: &SolveConfig) -> Result<(HolomorphicEvaluator, SolveReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let (rho, trace) = dirichlet_residual(f, cfg)?;
    let mut report = SolveReport::new(ProblemKind::Dirichlet, rho, f.curve(), cfg);
    report.checks.insert("dirichlet_residual".into(), rho);
    report.norms.insert("data_lp".into(), f.lp_norm(cfg.p)?);
    report.norms.insert("trace_lp".into(), trace.lp_norm(cfg.p)?);
    let evaluator = HolomorphicEvaluator::new(f.clone());
    if report.accepted() && cfg.with_ntm {
        record_ntm(&mut report, "solution", &evaluator, &trace, cfg)?;
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok((evaluator, report))
}

/// `F = 𝐂f`, `F′ = 𝐂(conj(T)·∂_T f)`; accepted when both `f` and the
/// derivative density pass the Dirichlet test.
pub fn solve_regularity(f: &BoundaryFunction, cfg: &SolveConfig) -> Result<(HolomorphicEvaluator, SolveReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let df = derivative_density(f)?;
    let (rho_f, trace) = dirichlet_residual(f, cfg)?;
    let (rho_d, dtrace) = derivative_residual(f, &df, cfg)?;
    let mut report = SolveReport::new(ProblemKind::Regularity, rho_f.max(rho_d), f.curve(), cfg);
    report.checks.insert("dirichlet_residual".into(), rho_f);
    report.checks.insert("derivative_residual".into(), rho_d);

    // trace(F′)·T against ∂_T f
    let tangential = f.tangential_derivative()?;
    let mask = cfg.mask(f.curve());
    let lhs = dtrace.map_with_tangent(|v, t| v * t);
    let identity = relative((&lhs - &tangential).lp_norm_masked(2.0, mask)?, tangential.lp_norm_masked(2.0, mask)?);
    report.checks.insert("tangential_identity".into(), identity);
    report.norms.insert("trace_lp".into(), trace.lp_norm(cfg.p)?);
    report.norms.insert("derivative_trace_lp".into(), dtrace.lp_norm(cfg.p)?);

    let evaluator = HolomorphicEvaluator::new(f.clone()).with_derivative_density(df)?;
    if report.accepted() && cfg.with_ntm {
        record_ntm(&mut report, "solution", &evaluator, &trace, cfg)?;
        record_ntm(&mut report, "derivative", &evaluator.derivative_evaluator()?, &dtrace, cfg)?;
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok((evaluator, report))
}

/// Neumann problem normalized by `G(α) = 0`:
/// `G_α = 𝐂h₀ − (𝐂h₀)(α)` with `h₀(ζ) = ∫_{γ(ζ_0, ζ)} i g dσ`, and
/// `G_α′ = 𝐂(i·conj(T)·g)`.
pub fn solve_neumann(
    g: &BoundaryFunction,
    alpha: Complex64,
    cfg: &SolveConfig,
) -> Result<(HolomorphicEvaluator, SolveReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let curve = g.curve();
    if !curve.contains(alpha) {
        return Err(Error::Exterior { z: alpha });
    }
    let integral = g.boundary_integral(IntegralKind::Arclength);
    let scale = g.lp_norm(1.0)? * curve.length();
    let margin = relative(integral.norm(), scale);
    if integral.norm() > cfg.delta_c * scale {
        return Err(Error::Compatibility { condition: NEUMANN_CONDITION, integral, margin, threshold: cfg.delta_c });
    }

    let h0 = g.cumulative_primitive(0)?;
    let (rho, h0_trace) = dirichlet_residual(&h0, cfg)?;
    let mut report = SolveReport::new(ProblemKind::Neumann, rho, curve, cfg);
    report.compatibility = Some(Compatibility {
        condition: NEUMANN_CONDITION.into(),
        integral: [integral.re, integral.im],
        margin,
        threshold: cfg.delta_c,
        passed: true,
    });
    report.checks.insert("primitive_dirichlet_residual".into(), rho);

    let shift = if h0.is_zero() { Complex64::new(0.0, 0.0) } else { -cauchy_interior(&h0, alpha)? };
    let gprime = g.map_with_tangent(|v, t| I * t.conj() * v);
    let evaluator = HolomorphicEvaluator::new(h0.clone()).with_shift(shift).with_derivative_density(gprime.clone())?;
    report.checks.insert("value_at_alpha".into(), evaluator.value(alpha)?.norm());

    if !g.is_zero() {
        let dtrace = cauchy_trace(&gprime, &cfg.trace)?;
        let normal = dtrace.map_with_tangent(|v, t| -I * t * v);
        let mask = cfg.mask(curve);
        report.checks.insert(
            "neumann_residual".into(),
            relative((&normal - g).lp_norm_masked(cfg.p, mask)?, g.lp_norm_masked(cfg.p, mask)?),
        );
        // d/dz 𝐂h₀ against 𝐂(i conj(T) g)
        let via_primitive = cauchy_trace(&derivative_density(&h0)?, &cfg.trace)?;
        report.checks.insert(
            "representation_consistency".into(),
            relative((&via_primitive - &dtrace).lp_norm_masked(2.0, mask)?, dtrace.lp_norm_masked(2.0, mask)?),
        );
        if report.accepted() && cfg.with_ntm {
            let shifted = h0_trace.map(|v| v + shift);
            record_ntm(&mut report, "solution", &evaluator, &shifted, cfg)?;
            record_ntm(&mut report, "derivative", &evaluator.derivative_evaluator()?, &dtrace, cfg)?;
        }
    }
    report.norms.insert("data_lp".into(), g.lp_norm(cfg.p)?);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok((evaluator, report))
}

/// The Robin solution operator: the unique periodic solution `h` of
/// `−i∂_T h + b h = r`,
///
/// `h(ζ_k) = i[e^{−iB_k} S≥(k) + e^{i(B_tot − B_k)} S<(k)] / (e^{iB_tot} − 1)`
///
/// with `S<(k) = ∫_{γ(ζ_0, ζ_k)} r e^{iB} dσ` and `S≥(k)` the integral over
/// the rest of the curve.
pub fn robin_transform(coef: &RobinCoefficient, r: &BoundaryFunction) -> Result<BoundaryFunction> {
    robin_transform_with(coef, r, DEFAULT_DELTA_C)
}

pub fn robin_transform_with(coef: &RobinCoefficient, r: &BoundaryFunction, delta_c: f64) -> Result<BoundaryFunction> {
    coef.b.check_curve(r)?;
    coef.require_compatible(delta_c)?;
    let curve = r.curve();
    let (q, q_total) = curve.cumulative_twisted(r.values(), &coef.prefix, coef.total);
    let denom = (I * coef.total).exp() - 1.0;
    let wrap = (I * coef.total).exp();
    let values = q
        .iter()
        .zip(&coef.prefix)
        .map(|(&below, &bk)| {
            let above = q_total - below;
            I * (-I * bk).exp() * (above + wrap * below) / denom
        })
        .collect();
    BoundaryFunction::new(curve.clone(), values)
}

/// `(‖𝒯_b r‖_∞, σ(bD)^{1−1/p}·C(D,b)·‖r‖_p)`.
pub fn robin_sup_bound(coef: &RobinCoefficient, h: &BoundaryFunction, r: &BoundaryFunction, p: f64) -> Result<(f64, f64)> {
    let sup = h.lp_norm(f64::INFINITY)?;
    let bound = r.curve().length().powf(1.0 - 1.0 / p) * coef.sup_constant() * r.lp_norm(p)?;
    Ok((sup, bound))
}

/// `‖−i∂_T h + b h − r‖₂ / max(‖r‖₂, ε)`.
pub fn ode_residual(coef: &RobinCoefficient, h: &BoundaryFunction, r: &BoundaryFunction) -> Result<f64> {
    coef.b.check_curve(h)?;
    coef.b.check_curve(r)?;
    let dh = h.tangential_derivative()?;
    let lhs = dh.map(|v| -I * v).zip_with(&h.zip_with(&coef.b, |hv, bv| hv * bv)?, |a, b| a + b)?;
    let num = (&lhs - r).lp_norm(2.0)?;
    Ok(num / r.lp_norm(2.0)?.max(f64::EPSILON))
}

/// `G = 𝐂(𝒯_b r)`. Data outside the Robin data space are refused with
/// [`Error::Rejected`].
pub fn solve_robin(
    coef: &RobinCoefficient,
    r: &BoundaryFunction,
    cfg: &SolveConfig,
) -> Result<(HolomorphicEvaluator, SolveReport)> {
    cfg.validate()?;
    let start = Instant::now();
    coef.b.check_curve(r)?;
    coef.require_compatible(cfg.delta_c)?;
    let curve = r.curve();
    let h = robin_transform_with(coef, r, cfg.delta_c)?;
    let dh = derivative_density(&h)?;
    let (rho_h, trace) = dirichlet_residual(&h, cfg)?;
    let (rho_d, dtrace) = derivative_residual(&h, &dh, cfg)?;
    let mut report = SolveReport::new(ProblemKind::Robin, rho_h.max(rho_d), curve, cfg);
    report.compatibility = Some(coef.compatibility(cfg.delta_c));
    report.checks.insert("dirichlet_residual".into(), rho_h);
    report.checks.insert("derivative_residual".into(), rho_d);
    report.checks.insert("ode_residual".into(), ode_residual(coef, &h, r)?);
    let (sup, bound) = robin_sup_bound(coef, &h, r, cfg.p)?;
    report.norms.insert("transform_sup".into(), sup);
    report.norms.insert("transform_sup_bound".into(), bound);
    report.norms.insert("data_lp".into(), r.lp_norm(cfg.p)?);

    if !report.accepted() {
        report.runtime_seconds = start.elapsed().as_secs_f64();
        return Err(Error::Rejected(Box::new(report)));
    }

    if !r.is_zero() {
        let mask = cfg.mask(curve);
        let dg = trace.tangential_derivative()?;
        let lhs = dg.map(|v| -I * v).zip_with(&trace.zip_with(coef.b(), |a, b| a * b)?, |a, b| a + b)?;
        report.checks.insert(
            "robin_residual".into(),
            relative((&lhs - r).lp_norm_masked(cfg.p, mask)?, r.lp_norm_masked(cfg.p, mask)?),
        );
    } else {
        report.checks.insert("robin_residual".into(), 0.0);
    }
    let evaluator = HolomorphicEvaluator::new(h).with_derivative_density(dh)?;
    if cfg.with_ntm {
        record_ntm(&mut report, "solution", &evaluator, &trace, cfg)?;
        record_ntm(&mut report, "derivative", &evaluator.derivative_evaluator()?, &dtrace, cfg)?;
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok((evaluator, report))
}

/// Runs the residual pipeline of the solver matching `data` and returns
/// only the report.
pub fn membership(data: &ProblemData, cfg: &SolveConfig) -> Result<SolveReport> {
    let cfg = SolveConfig { with_ntm: false, ..cfg.clone() };
    match data {
        ProblemData::Dirichlet(f) => solve_dirichlet(f, &cfg).map(|(_, r)| r),
        ProblemData::Regularity(f) => solve_regularity(f, &cfg).map(|(_, r)| r),
        ProblemData::Neumann { g, alpha } => solve_neumann(g, *alpha, &cfg).map(|(_, r)| r),
        ProblemData::Robin { coef, r } => match solve_robin(coef, r, &cfg) {
            Ok((_, report)) => Ok(report),
            Err(Error::Rejected(report)) => Ok(*report),
            Err(e) => Err(e),
        },
    }
}

/// Membership with one grid-refinement escalation: data rejected on the
/// grid of `spec` are regenerated on a grid twice as fine, and the verdict
/// there is final.
pub fn membership_refined(
    spec: &DomainSpec,
    cfg: &SolveConfig,
    make: impl Fn(&Arc<BoundaryCurve>) -> Result<ProblemData>,
) -> Result<SolveReport> {
    let coarse = membership(&make(&make_curve(spec)?)?, cfg)?;
    if coarse.accepted() {
        return Ok(coarse);
    }
    let mut fine = membership(&make(&make_curve(&spec.with_nodes(2 * spec.n_nodes))?)?, cfg)?;
    fine.checks.insert("coarse_residual".into(), coarse.residual);
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_curve;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(n: usize) -> Arc<BoundaryCurve> {
        make_curve(&DomainSpec::unit_disk(n)).unwrap()
    }

    #[test]
    fn dirichlet_polynomial_is_accepted() {
        let curve = disk(256);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z * z * z + 2.0 * z).unwrap();
        let (ev, report) = solve_dirichlet(&f, &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        let z = c(0.0, 0.4);
        assert!((ev.value(z).unwrap() - (z * z * z + 0.8 * I)).norm() < 1e-9);
        assert!(report.norms.contains_key("solution_ntm_lp"));
    }

    #[test]
    fn dirichlet_constant_and_zero() {
        let curve = disk(64);
        let (ev, report) = solve_dirichlet(&BoundaryFunction::constant(&curve, c(1.0, 0.0)), &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        assert!((ev.value(c(0.2, 0.1)).unwrap() - 1.0).norm() < 1e-12);
        let (ev, report) = solve_dirichlet(&BoundaryFunction::zeros(&curve), &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        assert_eq!(report.residual, 0.0);
        assert_eq!(ev.value(c(0.2, 0.1)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn dirichlet_conj_is_rejected() {
        let curve = disk(256);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z.conj()).unwrap();
        let (_, report) = solve_dirichlet(&f, &SolveConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Rejected);
        assert!((report.residual - 1.0).abs() < 0.01);
        assert!(!report.norms.contains_key("solution_ntm_lp"));
    }

    #[test]
    fn regularity_of_zeta_squared() {
        let curve = disk(256);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z * z).unwrap();
        let (ev, report) = solve_regularity(&f, &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        for z in [c(0.3, 0.1), c(-0.5, -0.2)] {
            assert!((ev.derivative(z).unwrap() - 2.0 * z).norm() < 1e-8);
        }
        assert!(report.checks["tangential_identity"] < 1e-6);

        let k = BoundaryFunction::constant(&curve, c(2.0, 3.0));
        let (ev, report) = solve_regularity(&k, &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        assert!((ev.value(c(0.1, 0.0)).unwrap() - c(2.0, 3.0)).norm() < 1e-12);
        assert!(ev.derivative(c(0.1, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn neumann_recovers_z_squared() {
        let curve = disk(256);
        let g = BoundaryFunction::from_fn(&curve, |z, _| 2.0 * z * z).unwrap();
        let (ev, report) = solve_neumann(&g, c(0.0, 0.0), &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        for z in [c(0.3, 0.2), c(-0.6, 0.1), c(0.0, -0.75)] {
            assert!((ev.value(z).unwrap() - z * z).norm() < 1e-8);
        }
        assert!(report.checks["value_at_alpha"] <= 1e-10);
        assert!(report.checks["neumann_residual"] < 1e-8);
        assert!(report.checks["representation_consistency"] < 1e-6);
    }

    #[test]
    fn neumann_compatibility_and_exterior_alpha() {
        let curve = disk(64);
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        assert!(matches!(solve_neumann(&one, c(0.0, 0.0), &SolveConfig::default()), Err(Error::Compatibility { .. })));
        let zero = BoundaryFunction::zeros(&curve);
        assert!(matches!(solve_neumann(&zero, c(3.0, 0.0), &SolveConfig::default()), Err(Error::Exterior { .. })));
        let (ev, report) = solve_neumann(&zero, c(0.1, 0.0), &SolveConfig::default()).unwrap();
        assert!(report.accepted());
        assert_eq!(ev.value(c(0.4, 0.4)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn robin_transform_examples() {
        let curve = disk(128);
        let half = RobinCoefficient::constant(&curve, c(0.5, 0.0));
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        let h = robin_transform(&half, &one).unwrap();
        for v in h.values() {
            assert!((v - 2.0).norm() < 1e-10, "{v}");
        }
        let zero = robin_transform(&half, &BoundaryFunction::zeros(&curve)).unwrap();
        assert!(zero.lp_norm(f64::INFINITY).unwrap() == 0.0);

        let minus = RobinCoefficient::constant(&curve, c(-1.0, 0.0));
        match robin_transform(&minus, &one) {
            Err(Error::Compatibility { margin, .. }) => assert!(margin < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn robin_prefix_matches_arc_integrals() {
        let curve = disk(64);
        let b = BoundaryFunction::from_fn(&curve, |z, _| c(0.3, 0.1) + z * 0.2).unwrap();
        let coef = RobinCoefficient::new(b.clone());
        assert!(coef.prefix()[0].norm() < 1e-15);
        for j in [1usize, 17, 63] {
            assert!((coef.prefix()[j] - b.arc_integral(0, j).unwrap()).norm() < 1e-12);
        }
        assert!((coef.total() - b.boundary_integral(IntegralKind::Arclength)).norm() < 1e-12);
    }

    #[test]
    fn robin_linear_and_constant_solutions() {
        let curve = disk(256);
        let half = RobinCoefficient::constant(&curve, c(0.5, 0.0));
        let r = BoundaryFunction::from_fn(&curve, |z, _| 1.5 * z).unwrap();
        let (ev, report) = solve_robin(&half, &r, &SolveConfig::default()).unwrap();
        for z in [c(0.3, 0.2), c(-0.1, 0.7)] {
            assert!((ev.value(z).unwrap() - z).norm() < 1e-8);
        }
        assert!(report.checks["robin_residual"] < 1e-8);

        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        let (ev, report) = solve_robin(&half, &one, &SolveConfig::default()).unwrap();
        assert!((ev.value(c(0.2, -0.3)).unwrap() - 2.0).norm() < 1e-8);
        assert!(report.checks["robin_residual"] <= 1e-8);
    }

    #[test]
    fn robin_refuses_incompatible_coefficient() {
        let curve = disk(64);
        let minus = RobinCoefficient::constant(&curve, c(-1.0, 0.0));
        let r = BoundaryFunction::zeros(&curve);
        assert!(matches!(solve_robin(&minus, &r, &SolveConfig::default()), Err(Error::Compatibility { .. })));
    }

    #[test]
    fn membership_dispatch() {
        let curve = disk(256);
        let cfg = SolveConfig::default();
        let f5 = BoundaryFunction::from_fn(&curve, |z, _| z.powi(5)).unwrap();
        assert!(membership(&ProblemData::Dirichlet(f5), &cfg).unwrap().accepted());
        let conj = BoundaryFunction::from_fn(&curve, |z, _| z.conj()).unwrap();
        assert!(!membership(&ProblemData::Dirichlet(conj), &cfg).unwrap().accepted());
        let g = BoundaryFunction::from_fn(&curve, |z, t| -I * t * 2.0 * z).unwrap();
        let report = membership(&ProblemData::Neumann { g, alpha: c(0.0, 0.0) }, &cfg).unwrap();
        assert!(report.accepted());
    }

    #[test]
    fn report_json_has_stable_fields() {
        let curve = disk(64);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z).unwrap();
        let (_, report) = solve_dirichlet(&f, &SolveConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        for key in ["problem", "verdict", "residual", "tolerance", "checks", "compatibility", "norms", "n_nodes", "p"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "accepted");
        assert_eq!(v["problem"], "dirichlet");
    }

    #[test]
    fn invalid_exponent_in_config() {
        let curve = disk(64);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z).unwrap();
        let cfg = SolveConfig { p: 1.0, ..SolveConfig::default() };
        assert!(solve_dirichlet(&f, &cfg).is_err());
    }
}
