//! Cauchy transforms of boundary data: interior evaluation, non-tangential
//! traces and sampled non-tangential maximal functions.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_fn::BoundaryFunction;
use crate::geometry::{BoundaryCurve, ConeConfig};
use crate::spectral;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Points closer than this many maximal weights to a node are evaluated
/// with singularity subtraction under [`EvalRule::Auto`].
pub const NEAR_FACTOR: f64 = 5.0;

/// Quadrature rule for the interior Cauchy sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalRule {
    /// Plain sum far from the curve, [`Subtracted`](Self::Subtracted) near it.
    #[default]
    Auto,
    /// `(1/2πi) Σ f_j T_j w_j / (ζ_j − z)`.
    Plain,
    /// Subtracts the value at the nearest node and adds it back using
    /// `𝐂(1) ≡ 1`.
    Subtracted,
    /// Ratio of the discrete transforms of `f` and of `1`; equivalent to
    /// subtracting the (unknown) value at `z` itself.
    Compensated,
}

/// How boundary traces of a Cauchy transform are extracted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum TraceMethod {
    /// Evaluate along the cone axis at several depths and extrapolate
    /// polynomially to depth 0. `order` is the extrapolation degree.
    OffsetExtrapolation { cone: Option<ConeConfig>, order: u8 },
    /// Interior Plemelj limit `f/2 + p.v. 𝐂f`, computed with the diagonal
    /// term replaced by its limit.
    #[default]
    PvSubtraction,
}

impl TraceMethod {
    /// Offset extrapolation with a grid-scaled cone.
    pub fn offset(order: u8) -> Self {
        TraceMethod::OffsetExtrapolation { cone: None, order }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TraceMethod::OffsetExtrapolation { .. } => "offset_extrapolation",
            TraceMethod::PvSubtraction => "pv_subtraction",
        }
    }
}

fn kernel_sums(curve: &BoundaryCurve, values: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    curve.nodes().iter().zip(curve.tangents()).zip(curve.weights()).zip(values).fold(
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        |(sf, s1), (((zj, tj), wj), fj)| {
            let k = tj * *wj / (zj - z);
            (sf + fj * k, s1 + k)
        },
    )
}

/// `(1/2πi) ∮ f(ζ)/(ζ − z) dζ` for `z` inside the domain.
pub fn cauchy_interior(f: &BoundaryFunction, z: Complex64) -> Result<Complex64> {
    cauchy_interior_with(f, z, EvalRule::Auto)
}

pub fn cauchy_interior_with(f: &BoundaryFunction, z: Complex64, rule: EvalRule) -> Result<Complex64> {
    let curve = f.curve();
    if !curve.contains(z) {
        return Err(Error::Exterior { z });
    }
    let (nearest, dist) = curve.nearest_node(z);
    let rule = match rule {
        EvalRule::Auto if dist < NEAR_FACTOR * curve.max_weight() => EvalRule::Subtracted,
        EvalRule::Auto => EvalRule::Plain,
        r => r,
    };
    let values = f.values();
    Ok(match rule {
        EvalRule::Plain => kernel_sums(curve, values, z).0 / (2.0 * PI * I),
        EvalRule::Subtracted => {
            let anchor = values[nearest];
            let shifted: Vec<Complex64> = values.iter().map(|v| v - anchor).collect();
            kernel_sums(curve, &shifted, z).0 / (2.0 * PI * I) + anchor
        }
        EvalRule::Compensated => {
            let (sf, s1) = kernel_sums(curve, values, z);
            sf / s1
        }
        EvalRule::Auto => unreachable!(),
    })
}

/// Non-tangential boundary trace of `𝐂f`.
pub fn cauchy_trace(f: &BoundaryFunction, method: &TraceMethod) -> Result<BoundaryFunction> {
    match method {
        TraceMethod::PvSubtraction => pv_trace(f),
        TraceMethod::OffsetExtrapolation { cone, order } => {
            let cone = match cone {
                Some(c) => c.clone(),
                None => ConeConfig::grid_scaled(f.curve()),
            };
            offset_trace(f, &cone, *order)
        }
    }
}

fn pv_trace(f: &BoundaryFunction) -> Result<BoundaryFunction> {
    let curve = f.curve();
    let df = f.tangential_derivative()?;
    let (z, t, w) = (curve.nodes(), curve.tangents(), curve.weights());
    let v = f.values();
    let d = df.values();
    let n = v.len();
    let values = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = d[k] * w[k];
            for j in 0..n {
                if j != k {
                    acc += (v[j] - v[k]) * t[j] * w[j] / (z[j] - z[k]);
                }
            }
            v[k] + acc / (2.0 * PI * I)
        })
        .collect();
    BoundaryFunction::new(curve.clone(), values)
}

fn offset_trace(f: &BoundaryFunction, cone: &ConeConfig, order: u8) -> Result<BoundaryFunction> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidInput(format!("Richardson order must be 1 or 2, got {order}")));
    }
    let curve = f.curve();
    let used = order as usize + 1;
    let depths = &cone.depths()[cone.depths().len() - used..];
    let values = (0..curve.len())
        .into_par_iter()
        .map(|k| {
            let pts = curve.interior_offsets(k, cone)?;
            let pts = &pts[pts.len() - used..];
            let ys = pts
                .iter()
                .map(|&z| cauchy_interior_with(f, z, EvalRule::Compensated))
                .collect::<Result<Vec<_>>>()?;
            Ok(spectral::extrapolate_to_zero(depths, &ys))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundaryFunction::new(curve.clone(), values)
}

/// Sampled non-tangential maximal function.
#[derive(Clone, Debug)]
pub struct NtmEstimate {
    pub values: BoundaryFunction,
    /// Total number of interior cone samples evaluated.
    pub samples: usize,
}

/// Per node, the largest `|F|` over the interior cone samples, together
/// with `|trace|` at the node when a trace is supplied.
pub fn ntm_estimate(
    evaluator: &HolomorphicEvaluator,
    cfg: &ConeConfig,
    trace: Option<&BoundaryFunction>,
) -> Result<NtmEstimate> {
    let curve = evaluator.curve();
    if let Some(tr) = trace {
        evaluator.density.check_curve(tr)?;
    }
    let per_node = (0..curve.len())
        .into_par_iter()
        .map(|k| {
            let pts = curve.cone_points(k, cfg)?;
            let mut best = trace.map_or(0.0, |tr| tr.values()[k].norm());
            for &z in &pts {
                best = best.max(evaluator.value(z)?.norm());
            }
            Ok((Complex64::new(best, 0.0), pts.len()))
        })
        .collect::<Result<Vec<_>>>()?;
    let samples = per_node.iter().map(|(_, c)| c).sum();
    let values = BoundaryFunction::new(curve.clone(), per_node.into_iter().map(|(v, _)| v).collect())?;
    Ok(NtmEstimate { values, samples })
}

/// A holomorphic function `F(z) = 𝐂(density)(z) + shift` on the domain.
#[derive(Debug)]
pub struct HolomorphicEvaluator {
    density: BoundaryFunction,
    shift: Complex64,
    rule: EvalRule,
    derivative_density: OnceLock<BoundaryFunction>,
}

impl Clone for HolomorphicEvaluator {
    fn clone(&self) -> Self {
        let derivative_density = OnceLock::new();
        if let Some(d) = self.derivative_density.get() {
            let _ = derivative_density.set(d.clone());
        }
        Self { density: self.density.clone(), shift: self.shift, rule: self.rule, derivative_density }
    }
}

impl HolomorphicEvaluator {
    pub fn new(density: BoundaryFunction) -> Self {
        Self { density, shift: Complex64::new(0.0, 0.0), rule: EvalRule::Auto, derivative_density: OnceLock::new() }
    }

    pub fn with_shift(mut self, shift: Complex64) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_rule(mut self, rule: EvalRule) -> Self {
        self.rule = rule;
        self
    }

    /// Supplies the density whose Cauchy transform is `F′`.
    pub fn with_derivative_density(self, d: BoundaryFunction) -> Result<Self> {
        self.density.check_curve(&d)?;
        let _ = self.derivative_density.set(d);
        Ok(self)
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        self.density.curve()
    }

    pub fn density(&self) -> &BoundaryFunction {
        &self.density
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(cauchy_interior_with(&self.density, z, self.rule)? + self.shift)
    }

    /// Density of `F′`: the supplied one, or `conj(T)·∂_T f`.
    pub fn derivative_density(&self) -> Result<&BoundaryFunction> {
        if let Some(d) = self.derivative_density.get() {
            return Ok(d);
        }
        let d = self.density.tangential_derivative()?.map_with_tangent(|v, t| t.conj() * v);
        Ok(self.derivative_density.get_or_init(|| d))
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        cauchy_interior_with(self.derivative_density()?, z, self.rule)
    }

    pub fn derivative_evaluator(&self) -> Result<HolomorphicEvaluator> {
        Ok(HolomorphicEvaluator::new(self.derivative_density()?.clone()).with_rule(self.rule))
    }

    pub fn trace(&self, method: &TraceMethod) -> Result<BoundaryFunction> {
        let shift = self.shift;
        Ok(cauchy_trace(&self.density, method)?.map(|v| v + shift))
    }

    /// Relative Cauchy–Riemann defect `|∂̄F| / max(|∂F|, |F|/diam)` from
    /// centered differences with step `1e−5·diam`.
    pub fn dbar_residual(&self, z: Complex64) -> Result<f64> {
        let diam = self.curve().diameter();
        let h = 1e-5 * diam;
        let fx = (self.value(z + h)? - self.value(z - h)?) / (2.0 * h);
        let fy = (self.value(z + I * h)? - self.value(z - I * h)?) / (2.0 * h);
        let dbar = (fx + I * fy) * 0.5;
        let d = (fx - I * fy) * 0.5;
        let scale = d.norm().max(self.value(z)?.norm() / diam).max(f64::MIN_POSITIVE);
        Ok(dbar.norm() / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_curve, DomainSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(n: usize) -> Arc<BoundaryCurve> {
        make_curve(&DomainSpec::unit_disk(n)).unwrap()
    }

    #[test]
    fn constant_density_reproduces_one() {
        let curve = disk(256);
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        for z in [c(0.0, 0.0), c(0.3, -0.4), c(0.0, 0.899), c(-0.62, 0.62)] {
            assert!((cauchy_interior(&one, z).unwrap() - 1.0).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn cubic_reproduction_and_conj_annihilation() {
        let curve = disk(256);
        let z3 = BoundaryFunction::from_fn(&curve, |z, _| z * z * z).unwrap();
        let z = c(0.3, 0.2);
        assert!((cauchy_interior(&z3, z).unwrap() - z * z * z).norm() < 1e-10);
        let conj = BoundaryFunction::from_fn(&curve, |z, _| z.conj()).unwrap();
        assert!(cauchy_interior(&conj, c(0.5, 0.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn exterior_and_on_curve_points_are_rejected() {
        let curve = disk(64);
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        assert!(matches!(cauchy_interior(&one, c(2.0, 0.0)), Err(Error::Exterior { .. })));
        assert!(matches!(cauchy_interior(&one, c(1.0, 0.0)), Err(Error::Exterior { .. })));
    }

    #[test]
    fn traces_of_zeta_squared_both_methods() {
        let curve = disk(256);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z * z).unwrap();
        for method in [TraceMethod::PvSubtraction, TraceMethod::offset(2)] {
            let tr = cauchy_trace(&f, &method).unwrap();
            let err = (&tr - &f).lp_norm(f64::INFINITY).unwrap();
            assert!(err < 1e-8, "{}: {err}", method.name());
        }
    }

    #[test]
    fn trace_of_constant_and_conj() {
        let curve = disk(256);
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        let tr = cauchy_trace(&one, &TraceMethod::PvSubtraction).unwrap();
        assert!((&tr - &one).lp_norm(f64::INFINITY).unwrap() < 1e-10);
        let tr = cauchy_trace(&one, &TraceMethod::offset(1)).unwrap();
        assert!((&tr - &one).lp_norm(f64::INFINITY).unwrap() < 1e-10);

        let conj = BoundaryFunction::from_fn(&curve, |z, _| z.conj()).unwrap();
        for method in [TraceMethod::PvSubtraction, TraceMethod::offset(2)] {
            let tr = cauchy_trace(&conj, &method).unwrap();
            let diff = (&tr - &conj).lp_norm(2.0).unwrap();
            let rel = diff / conj.lp_norm(2.0).unwrap();
            assert!((rel - 1.0).abs() < 0.01, "{}: {rel}", method.name());
        }
    }

    #[test]
    fn invalid_richardson_order() {
        let curve = disk(64);
        let one = BoundaryFunction::constant(&curve, c(1.0, 0.0));
        assert!(cauchy_trace(&one, &TraceMethod::offset(3)).is_err());
    }

    #[test]
    fn ntm_examples() {
        let curve = disk(128);
        let cfg = ConeConfig::new(PI / 6.0, vec![0.2, 0.1, 0.05]).unwrap();
        let one = HolomorphicEvaluator::new(BoundaryFunction::constant(&curve, c(1.0, 0.0)));
        let est = ntm_estimate(&one, &cfg, None).unwrap();
        assert!(est.values.values().iter().all(|v| (v.re - 1.0).abs() < 1e-12));
        assert!(est.samples > 0);

        let zf = BoundaryFunction::from_fn(&curve, |z, _| z).unwrap();
        let ident = HolomorphicEvaluator::new(zf);
        let est = ntm_estimate(&ident, &cfg, None).unwrap();
        for v in est.values.values() {
            assert!(v.re <= 1.0 + 1e-12 && v.re >= 1.0 - 0.2 - 1e-12);
        }
    }

    #[test]
    fn evaluator_is_holomorphic_and_differentiates() {
        let curve = disk(128);
        let f = BoundaryFunction::from_fn(&curve, |z, _| z.exp()).unwrap();
        let ev = HolomorphicEvaluator::new(f);
        for z in [c(0.1, 0.2), c(-0.5, 0.3), c(0.0, -0.7)] {
            assert!(ev.dbar_residual(z).unwrap() < 1e-6);
            assert!((ev.derivative(z).unwrap() - z.exp()).norm() < 1e-9);
        }
    }
}
