//! Complex-valued functions sampled on the nodes of a [`BoundaryCurve`].

use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::BoundaryCurve;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Above this many nodes the Hölder seminorm is estimated on random pairs.
pub const HOLDER_ALL_PAIRS_MAX: usize = 2048;
const HOLDER_SAMPLE_PAIRS: usize = 4_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed_d8a2;

/// Measure used by [`BoundaryFunction::boundary_integral`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    /// Arclength measure dσ.
    Arclength,
    /// Complex line element dζ = T dσ.
    Complex,
}

#[derive(Clone, Debug)]
pub struct BoundaryFunction {
    curve: Arc<BoundaryCurve>,
    values: Vec<Complex64>,
}

impl BoundaryFunction {
    pub fn new(curve: Arc<BoundaryCurve>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != curve.len() {
            return Err(Error::LengthMismatch { expected: curve.len(), got: values.len() });
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { curve, values })
    }

    /// Samples `f(ζ_j, T_j)` at every node.
    pub fn from_fn(curve: &Arc<BoundaryCurve>, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        let values = curve.nodes().iter().zip(curve.tangents()).map(|(&z, &t)| f(z, t)).collect();
        Self::new(curve.clone(), values)
    }

    pub fn constant(curve: &Arc<BoundaryCurve>, c: Complex64) -> Self {
        Self { curve: curve.clone(), values: vec![c; curve.len()] }
    }

    pub fn zeros(curve: &Arc<BoundaryCurve>) -> Self {
        Self::constant(curve, Complex64::new(0.0, 0.0))
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        &self.curve
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_curve(&self, other: &BoundaryFunction) -> bool {
        Arc::ptr_eq(&self.curve, &other.curve)
    }

    pub(crate) fn check_curve(&self, other: &BoundaryFunction) -> Result<()> {
        if self.same_curve(other) {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { curve: self.curve.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination with the unit tangent at each node.
    pub fn map_with_tangent(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().zip(self.curve.tangents()).map(|(&v, &t)| f(v, t)).collect();
        Self { curve: self.curve.clone(), values }
    }

    pub fn zip_with(&self, other: &BoundaryFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_curve(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { curve: self.curve.clone(), values })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// `(Σ_j |f_j|^p w_j)^{1/p}`, or `max_j |f_j|` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.lp_norm_masked(p, None)
    }

    /// As [`lp_norm`](Self::lp_norm), skipping nodes whose mask entry is
    /// `true`.
    pub fn lp_norm_masked(&self, p: f64, exclude: Option<&[bool]>) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        let keep = |j: usize| exclude.is_none_or(|m| !m[j]);
        let mags = self.values.iter().enumerate().filter(|(j, _)| keep(*j)).map(|(j, v)| (j, v.norm()));
        if p.is_infinite() {
            return Ok(mags.map(|(_, m)| m).fold(0.0, f64::max));
        }
        let w = self.curve.weights();
        let sum: f64 = mags.map(|(j, m)| m.powf(p) * w[j]).sum();
        Ok(sum.powf(1.0 / p))
    }

    /// `lp_norm(f) + lp_norm(∂_T f)`.
    pub fn w1p_norm(&self, p: f64) -> Result<f64> {
        Ok(self.lp_norm(p)? + self.tangential_derivative()?.lp_norm(p)?)
    }

    pub fn boundary_integral(&self, kind: IntegralKind) -> Complex64 {
        let w = self.curve.weights();
        match kind {
            IntegralKind::Arclength => self.values.iter().zip(w).map(|(v, w)| v * *w).sum(),
            IntegralKind::Complex => {
                self.values.iter().zip(w).zip(self.curve.tangents()).map(|((v, w), t)| v * t * *w).sum()
            }
        }
    }

    /// `∂_T f = df/ds`.
    pub fn tangential_derivative(&self) -> Result<Self> {
        let values = self.curve.derivative(&self.values)?;
        Ok(Self { curve: self.curve.clone(), values })
    }

    /// `h(ζ_j) = ∫_{γ(ζ_base, ζ_j)} i g dσ`, with `h(ζ_base) = 0`.
    pub fn cumulative_primitive(&self, base: usize) -> Result<Self> {
        let n = self.len();
        if base >= n {
            return Err(Error::IndexOutOfRange { index: base, len: n });
        }
        let ig: Vec<Complex64> = self.values.iter().map(|v| I * v).collect();
        let (cum, total) = self.curve.cumulative(&ig);
        let values = (0..n)
            .map(|j| {
                let h = cum[j] - cum[base];
                if j < base {
                    h + total
                } else {
                    h
                }
            })
            .collect();
        Ok(Self { curve: self.curve.clone(), values })
    }

    /// `∫_{γ(ζ_i, ζ_j)} f dσ`, zero when `i = j`.
    pub fn arc_integral(&self, i: usize, j: usize) -> Result<Complex64> {
        let n = self.len();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, len: n });
            }
        }
        let (cum, total) = self.curve.cumulative(&self.values);
        Ok(if j >= i { cum[j] - cum[i] } else { total - cum[i] + cum[j] })
    }

    /// Sampled Hölder seminorm `max |f_i − f_j| / |ζ_i − ζ_j|^a`.
    pub fn holder_seminorm(&self, a: f64) -> f64 {
        self.holder_seminorm_seeded(a, DEFAULT_SEED)
    }

    pub fn holder_seminorm_seeded(&self, a: f64, seed: u64) -> f64 {
        let z = self.curve.nodes();
        let f = &self.values;
        let n = f.len();
        let ratio = |i: usize, j: usize| {
            let d = (z[i] - z[j]).norm();
            if d == 0.0 {
                0.0
            } else {
                (f[i] - f[j]).norm() / d.powf(a)
            }
        };
        if n <= HOLDER_ALL_PAIRS_MAX {
            (0..n).into_par_iter().map(|i| (i + 1..n).map(|j| ratio(i, j)).fold(0.0, f64::max)).reduce(|| 0.0, f64::max)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..HOLDER_SAMPLE_PAIRS)
                .map(|_| {
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    ratio(i, j)
                })
                .fold(0.0, f64::max)
        }
    }

    /// Writes `s, Re f, Im f` rows with a header line.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(["s", "re", "im"]).map_err(err)?;
        for (s, v) in self.curve.arclength().iter().zip(&self.values) {
            w.write_record([format!("{s:.17e}"), format!("{:.17e}", v.re), format!("{:.17e}", v.im)]).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`write_csv`](Self::write_csv); the arclength
    /// column must match the curve's nodes.
    pub fn read_csv<R: Read>(curve: &Arc<BoundaryCurve>, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut values = Vec::with_capacity(curve.len());
        let s_ref = curve.arclength();
        let tol = 1e-9 * curve.length();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            if record.len() != 3 {
                return Err(Error::Csv(format!("row {row}: expected 3 columns, got {}", record.len())));
            }
            let parse = |k: usize| -> Result<f64> {
                record[k].trim().parse::<f64>().map_err(|e| Error::Csv(format!("row {row}, column {k}: {e}")))
            };
            let (s, re, im) = (parse(0)?, parse(1)?, parse(2)?);
            if row >= s_ref.len() {
                return Err(Error::LengthMismatch { expected: s_ref.len(), got: row + 1 });
            }
            if (s - s_ref[row]).abs() > tol {
                return Err(Error::Csv(format!("row {row}: arclength {s} does not match node at {}", s_ref[row])));
            }
            values.push(Complex64::new(re, im));
        }
        Self::new(curve.clone(), values)
    }
}

impl Add for &BoundaryFunction {
    type Output = BoundaryFunction;

    fn add(self, rhs: Self) -> BoundaryFunction {
        self.zip_with(rhs, |a, b| a + b).expect("boundary functions on different curves")
    }
}

impl Sub for &BoundaryFunction {
    type Output = BoundaryFunction;

    fn sub(self, rhs: Self) -> BoundaryFunction {
        self.zip_with(rhs, |a, b| a - b).expect("boundary functions on different curves")
    }
}

impl Mul<Complex64> for &BoundaryFunction {
    type Output = BoundaryFunction;

    fn mul(self, rhs: Complex64) -> BoundaryFunction {
        self.map(|v| v * rhs)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::{make_curve, DomainSpec};

    fn disk(n: usize) -> Arc<BoundaryCurve> {
        make_curve(&DomainSpec::unit_disk(n)).unwrap()
    }

    #[test]
    fn norms_on_unit_disk() {
        let c = disk(64);
        let one = BoundaryFunction::constant(&c, Complex64::new(1.0, 0.0));
        assert!((one.lp_norm(2.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-10);
        assert_eq!(BoundaryFunction::zeros(&c).lp_norm(3.0).unwrap(), 0.0);
        let z = BoundaryFunction::from_fn(&c, |z, _| z).unwrap();
        assert!((z.lp_norm(2.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-10);
        assert!((z.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(z.lp_norm(0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn integrals_on_unit_disk() {
        let c = disk(64);
        let z2 = BoundaryFunction::from_fn(&c, |z, _| z * z).unwrap();
        assert!(z2.boundary_integral(IntegralKind::Complex).norm() < 1e-12);
        let conj = BoundaryFunction::from_fn(&c, |z, _| z.conj()).unwrap();
        assert!((conj.boundary_integral(IntegralKind::Complex) - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-10);
        let one = BoundaryFunction::constant(&c, Complex64::new(1.0, 0.0));
        assert!((one.boundary_integral(IntegralKind::Arclength).re - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn tangential_derivatives_on_disk() {
        let c = disk(64);
        let z = BoundaryFunction::from_fn(&c, |z, _| z).unwrap();
        let dz = z.tangential_derivative().unwrap();
        for (d, zeta) in dz.values().iter().zip(c.nodes()) {
            assert!((d - I * zeta).norm() < 1e-10);
        }
        let k = BoundaryFunction::constant(&c, Complex64::new(2.0, -1.0)).tangential_derivative().unwrap();
        assert!(k.lp_norm(f64::INFINITY).unwrap() < 1e-12);
        let z2 = BoundaryFunction::from_fn(&c, |z, _| z * z).unwrap().tangential_derivative().unwrap();
        for (d, zeta) in z2.values().iter().zip(c.nodes()) {
            assert!((d - 2.0 * I * zeta * zeta).norm() < 1e-8);
        }
    }

    #[test]
    fn short_polygon_side_is_rejected() {
        let sq = make_curve(&DomainSpec::unit_square(24)).unwrap();
        let f = BoundaryFunction::from_fn(&sq, |z, _| z).unwrap();
        assert!(matches!(f.tangential_derivative(), Err(Error::SideTooShort { .. })));
    }

    #[test]
    fn primitive_of_two_zeta_squared() {
        let c = disk(64);
        let g = BoundaryFunction::from_fn(&c, |z, _| 2.0 * z * z).unwrap();
        let h = g.cumulative_primitive(0).unwrap();
        assert_eq!(h.values()[0], Complex64::new(0.0, 0.0));
        for (hj, z) in h.values().iter().zip(c.nodes()) {
            assert!((hj - (z * z - 1.0)).norm() < 1e-8);
        }
        let zero = BoundaryFunction::zeros(&c).cumulative_primitive(5).unwrap();
        assert!(zero.is_zero() || zero.lp_norm(f64::INFINITY).unwrap() < 1e-15);
    }

    #[test]
    fn primitive_with_other_base_differs_by_constant() {
        let c = disk(64);
        let g = BoundaryFunction::from_fn(&c, |z, _| 2.0 * z * z).unwrap();
        let h0 = g.cumulative_primitive(0).unwrap();
        let h7 = g.cumulative_primitive(7).unwrap();
        assert_eq!(h7.values()[7], Complex64::new(0.0, 0.0));
        let shift = h0.values()[0] - h7.values()[0];
        for (a, b) in h0.values().iter().zip(h7.values()) {
            assert!((a - b - shift).norm() < 1e-12);
        }
    }

    #[test]
    fn holder_seminorm_examples() {
        let c = disk(64);
        let k = BoundaryFunction::constant(&c, Complex64::new(3.0, 1.0));
        assert_eq!(k.holder_seminorm(0.5), 0.0);
        let z = BoundaryFunction::from_fn(&c, |z, _| z).unwrap();
        assert!((z.holder_seminorm(0.5) - 2.0f64.sqrt()).abs() < 1e-12);
        let shifted = z.map(|v| v + Complex64::new(5.0, 2.0));
        assert!((shifted.holder_seminorm(0.5) - z.holder_seminorm(0.5)).abs() < 1e-12);
    }

    #[test]
    fn arc_integral_wraps() {
        let c = disk(64);
        let one = BoundaryFunction::constant(&c, Complex64::new(1.0, 0.0));
        assert_eq!(one.arc_integral(3, 3).unwrap(), Complex64::new(0.0, 0.0));
        let a = one.arc_integral(10, 40).unwrap().re;
        let b = one.arc_integral(40, 10).unwrap().re;
        assert!((a + b - 2.0 * PI).abs() < 1e-12);
        assert!((a - 30.0 * 2.0 * PI / 64.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let c = disk(32);
        let f = BoundaryFunction::from_fn(&c, |z, _| z.exp() / 3.0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = BoundaryFunction::read_csv(&c, buf.as_slice()).unwrap();
        assert_eq!(f.values(), g.values());
        let other = disk(16);
        assert!(BoundaryFunction::read_csv(&other, buf.as_slice()).is_err());
    }
}
