//! Discretized boundaries of bounded simply connected Lipschitz domains.
//!
//! A [`BoundaryCurve`] stores nodes, unit tangents and quadrature weights of
//! a positively oriented closed curve. Smooth curves (disks and
//! trigonometric curves) are sampled uniformly in their periodic parameter;
//! polygons are sampled at cell midpoints of each side, so that no node sits
//! on a vertex.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minimum number of boundary nodes accepted by [`make_curve`].
pub const MIN_NODES: usize = 8;

/// Minimum number of nodes on a polygon side (needed by the fourth-order
/// side quadrature).
pub const MIN_SIDE_NODES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shape {
    Disk { center: Complex64, radius: f64 },
    /// Vertices in counter-clockwise order.
    Polygon { vertices: Vec<Complex64> },
    /// `ζ(t) = Σ a_k e^{ikt}`, `t ∈ [0, 2π)`, given as `(k, a_k)` pairs.
    Parametric { coefficients: Vec<(i32, Complex64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub shape: Shape,
    pub n_nodes: usize,
}

impl DomainSpec {
    pub fn disk(center: Complex64, radius: f64, n_nodes: usize) -> Self {
        Self { shape: Shape::Disk { center, radius }, n_nodes }
    }

    pub fn unit_disk(n_nodes: usize) -> Self {
        Self::disk(Complex64::new(0.0, 0.0), 1.0, n_nodes)
    }

    pub fn polygon(vertices: Vec<Complex64>, n_nodes: usize) -> Self {
        Self { shape: Shape::Polygon { vertices }, n_nodes }
    }

    /// The square with vertices `0, 1, 1+i, i`.
    pub fn unit_square(n_nodes: usize) -> Self {
        let v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        Self::polygon(v.iter().map(|&(x, y)| Complex64::new(x, y)).collect(), n_nodes)
    }

    pub fn parametric(coefficients: Vec<(i32, Complex64)>, n_nodes: usize) -> Self {
        Self { shape: Shape::Parametric { coefficients }, n_nodes }
    }

    /// Axis-aligned ellipse `a cos t + i b sin t` centred at the origin.
    pub fn ellipse(a: f64, b: f64, n_nodes: usize) -> Self {
        Self::parametric(
            vec![(1, Complex64::new(0.5 * (a + b), 0.0)), (-1, Complex64::new(0.5 * (a - b), 0.0))],
            n_nodes,
        )
    }

    pub fn with_nodes(&self, n_nodes: usize) -> Self {
        Self { shape: self.shape.clone(), n_nodes }
    }
}

/// One straight side of a polygon: a run of consecutive nodes.
#[derive(Clone, Debug)]
pub(crate) struct Side {
    pub start: usize,
    pub len: usize,
    pub spacing: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Layout {
    /// Uniform in the periodic parameter; `speed[j] = |ζ'(t_j)|`.
    Periodic { speed: Vec<f64> },
    Sides(Vec<Side>),
}

#[derive(Debug)]
pub struct BoundaryCurve {
    spec: DomainSpec,
    nodes: Vec<Complex64>,
    tangents: Vec<Complex64>,
    weights: Vec<f64>,
    arclength: Vec<f64>,
    length: f64,
    corner: Vec<bool>,
    inward: Vec<Complex64>,
    layout: Layout,
    diameter: f64,
    reach: OnceLock<f64>,
}

/// Arc of the boundary traversed in the positive direction, from node
/// `start` up to (not including) node `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSegment {
    pub start: usize,
    pub end: usize,
    pub indices: Vec<usize>,
    pub measure: f64,
}

impl ArcSegment {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Truncated cone at a boundary point: half-aperture measured from the
/// inward axis, and a strictly decreasing list of depths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeConfig {
    aperture: f64,
    depths: Vec<f64>,
}

impl ConeConfig {
    pub fn new(aperture: f64, depths: Vec<f64>) -> Result<Self> {
        if !(aperture > 0.0 && aperture < PI / 2.0) {
            return Err(Error::InvalidCone(format!("aperture {aperture} outside (0, π/2)")));
        }
        if depths.len() < 3 {
            return Err(Error::InvalidCone(format!("need at least 3 depths, got {}", depths.len())));
        }
        if depths.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidCone("depths must be positive".into()));
        }
        if depths.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidCone("depths must be strictly decreasing".into()));
        }
        Ok(Self { aperture, depths })
    }

    /// Cone sized to the domain: aperture π/6 and depths 0.1, 0.05, 0.025
    /// times the diameter, capped at half the reach.
    pub fn default_for(curve: &BoundaryCurve) -> Self {
        let top = (0.1 * curve.diameter()).min(0.5 * curve.reach());
        Self { aperture: PI / 6.0, depths: vec![top, 0.5 * top, 0.25 * top] }
    }

    /// Cone sized to the grid, used for trace extraction: depths of 12, 8
    /// and 4 times the largest quadrature weight.
    pub fn grid_scaled(curve: &BoundaryCurve) -> Self {
        let top = (12.0 * curve.max_weight()).min(0.5 * curve.reach());
        Self { aperture: PI / 6.0, depths: vec![top, top * 2.0 / 3.0, top / 3.0] }
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn depths(&self) -> &[f64] {
        &self.depths
    }
}

pub fn make_curve(spec: &DomainSpec) -> Result<Arc<BoundaryCurve>> {
    BoundaryCurve::new(spec.clone()).map(Arc::new)
}

pub fn arc_between(curve: &BoundaryCurve, i: usize, j: usize) -> Result<ArcSegment> {
    curve.arc_between(i, j)
}

pub fn interior_offsets(curve: &BoundaryCurve, node: usize, cfg: &ConeConfig) -> Result<Vec<Complex64>> {
    curve.interior_offsets(node, cfg)
}

pub fn winding_number(curve: &BoundaryCurve, z: Complex64) -> Result<i32> {
    curve.winding_number(z)
}

fn eval_trig(coefficients: &[(i32, Complex64)], t: f64) -> (Complex64, Complex64) {
    coefficients.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(z, dz), &(k, a)| {
        let e = (I * (k as f64 * t)).exp();
        (z + a * e, dz + I * k as f64 * a * e)
    })
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Proper or touching intersection of closed segments `[p1,p2]` and `[q1,q2]`.
fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Complex64, b: Complex64, c: Complex64, d: f64| {
        d == 0.0 && c.re >= a.re.min(b.re) && c.re <= a.re.max(b.re) && c.im >= a.im.min(b.im) && c.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Whether the closed polyline through `pts` has two non-adjacent
/// intersecting edges.
fn polyline_self_intersects(pts: &[Complex64]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, pts[j], pts[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

fn signed_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum::<f64>()
}

impl BoundaryCurve {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        if spec.n_nodes < MIN_NODES {
            return Err(Error::InvalidDomain(format!(
                "n_nodes = {} is below the minimum of {MIN_NODES}",
                spec.n_nodes
            )));
        }
        match &spec.shape {
            Shape::Disk { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidDomain(format!("disk radius must be positive, got {radius}")));
                }
                let coeffs = vec![(0, *center), (1, Complex64::new(*radius, 0.0))];
                Self::periodic(spec.clone(), &coeffs)
            }
            Shape::Parametric { coefficients } => {
                let coeffs = coefficients.clone();
                Self::periodic(spec, &coeffs)
            }
            Shape::Polygon { vertices } => {
                let vertices = vertices.clone();
                Self::polygonal(spec, &vertices)
            }
        }
    }

    fn periodic(spec: DomainSpec, coefficients: &[(i32, Complex64)]) -> Result<Self> {
        let n = spec.n_nodes;
        let dt = 2.0 * PI / n as f64;
        let (nodes, derivs): (Vec<_>, Vec<_>) = (0..n).map(|j| eval_trig(coefficients, j as f64 * dt)).unzip();
        let speed: Vec<f64> = derivs.iter().map(|d| d.norm()).collect();
        let vmax = speed.iter().cloned().fold(0.0, f64::max);
        let vmin = speed.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(vmax > 0.0 && vmin > 1e-8 * vmax) {
            return Err(Error::InvalidDomain(format!(
                "parametric speed vanishes on the sample grid (min {vmin:.3e}, max {vmax:.3e})"
            )));
        }
        if signed_area(&nodes) <= 0.0 {
            return Err(Error::InvalidDomain("curve is not positively oriented".into()));
        }
        if polyline_self_intersects(&nodes) {
            return Err(Error::InvalidDomain("parametric curve is self-intersecting".into()));
        }
        let tangents: Vec<Complex64> = derivs.iter().zip(&speed).map(|(d, s)| d / s).collect();
        let weights: Vec<f64> = speed.iter().map(|s| s * dt).collect();
        let speed_c: Vec<Complex64> = speed.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let (cum, total) = spectral::twisted_primitive(&speed_c, Complex64::new(0.0, 0.0));
        let arclength: Vec<f64> = cum.iter().map(|c| c.re).collect();
        let inward = tangents.iter().map(|t| I * t).collect();
        let diameter = max_pairwise_distance(&nodes);
        Ok(Self {
            spec,
            corner: vec![false; n],
            nodes,
            tangents,
            weights,
            arclength,
            length: total.re,
            inward,
            layout: Layout::Periodic { speed },
            diameter,
            reach: OnceLock::new(),
        })
    }

    fn polygonal(spec: DomainSpec, vertices: &[Complex64]) -> Result<Self> {
        let nv = vertices.len();
        if nv < 3 {
            return Err(Error::InvalidDomain(format!("polygon needs at least 3 vertices, got {nv}")));
        }
        for a in 0..nv {
            for b in a + 1..nv {
                if (vertices[a] - vertices[b]).norm() == 0.0 {
                    return Err(Error::InvalidDomain(format!("vertices {a} and {b} coincide")));
                }
            }
        }
        if polyline_self_intersects(vertices) {
            return Err(Error::InvalidDomain("polygon is self-intersecting".into()));
        }
        // adjacent sides folding back onto each other
        for k in 0..nv {
            let d_in = vertices[k] - vertices[(k + nv - 1) % nv];
            let d_out = vertices[(k + 1) % nv] - vertices[k];
            if cross(d_in, d_out) == 0.0 && (d_in.re * d_out.re + d_in.im * d_out.im) < 0.0 {
                return Err(Error::InvalidDomain(format!("polygon folds back at vertex {k}")));
            }
        }
        if signed_area(vertices) <= 0.0 {
            return Err(Error::InvalidDomain("polygon vertices are not positively oriented".into()));
        }

        let n = spec.n_nodes;
        let lengths: Vec<f64> = (0..nv).map(|k| (vertices[(k + 1) % nv] - vertices[k]).norm()).collect();
        let total: f64 = lengths.iter().sum();
        let mut counts: Vec<usize> = lengths.iter().map(|l| ((n as f64) * l / total).round() as usize).collect();
        // fix the rounding so the counts add up to n
        loop {
            let sum: usize = counts.iter().sum();
            if sum == n {
                break;
            }
            // adjust the side whose per-node spacing is most out of line
            let k = if sum < n {
                (0..nv).max_by(|&a, &b| (lengths[a] / (counts[a] as f64 + 1.0)).total_cmp(&(lengths[b] / (counts[b] as f64 + 1.0)))).unwrap()
            } else {
                (0..nv)
                    .filter(|&k| counts[k] > 1)
                    .min_by(|&a, &b| (lengths[a] / counts[a] as f64).total_cmp(&(lengths[b] / counts[b] as f64)))
                    .unwrap()
            };
            if sum < n {
                counts[k] += 1;
            } else {
                counts[k] -= 1;
            }
        }
        if let Some(k) = counts.iter().position(|&c| c < MIN_SIDE_NODES) {
            return Err(Error::InvalidDomain(format!(
                "n_nodes = {n} leaves side {k} with {} nodes (minimum {MIN_SIDE_NODES})",
                counts[k]
            )));
        }

        let mut nodes = Vec::with_capacity(n);
        let mut tangents = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut arclength = Vec::with_capacity(n);
        let mut corner = Vec::with_capacity(n);
        let mut inward = Vec::with_capacity(n);
        let mut sides = Vec::with_capacity(nv);
        let bisector = |k: usize| -> Complex64 {
            let d_in = vertices[k] - vertices[(k + nv - 1) % nv];
            let d_out = vertices[(k + 1) % nv] - vertices[k];
            let b = I * d_in / d_in.norm() + I * d_out / d_out.norm();
            b / b.norm()
        };
        let first_spacing = lengths[0] / counts[0] as f64;
        let mut perimeter = 0.0;
        for k in 0..nv {
            let m_k = counts[k];
            let spacing = lengths[k] / m_k as f64;
            let dir = (vertices[(k + 1) % nv] - vertices[k]) / lengths[k];
            sides.push(Side { start: nodes.len(), len: m_k, spacing });
            let side_weights = spectral::midpoint_weights(m_k, spacing);
            for m in 0..m_k {
                let along = (m as f64 + 0.5) * spacing;
                nodes.push(vertices[k] + dir * along);
                tangents.push(dir);
                arclength.push(perimeter + along - 0.5 * first_spacing);
                weights.push(side_weights[m]);
                let is_corner = m == 0 || m == m_k - 1;
                corner.push(is_corner);
                inward.push(if m == 0 {
                    bisector(k)
                } else if m == m_k - 1 {
                    bisector((k + 1) % nv)
                } else {
                    I * dir
                });
            }
            perimeter += lengths[k];
        }
        let diameter = max_pairwise_distance(vertices);
        Ok(Self {
            spec,
            nodes,
            tangents,
            weights,
            arclength,
            length: total,
            corner,
            inward,
            layout: Layout::Sides(sides),
            diameter,
            reach: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    /// Outer unit normals `n = −iT`.
    pub fn normals(&self) -> Vec<Complex64> {
        self.tangents.iter().map(|t| -I * t).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn corner_flags(&self) -> &[bool] {
        &self.corner
    }

    /// Unit direction used for interior offsets: the inward normal at
    /// smooth nodes, the inward angle bisector of the nearby vertex at
    /// corner-adjacent nodes.
    pub fn inward_direction(&self, node: usize) -> Complex64 {
        self.inward[node]
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.layout, Layout::Periodic { .. })
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { index, len: self.len() });
        }
        Ok(())
    }

    /// Nearest node and its distance to `z`.
    pub fn nearest_node(&self, z: Complex64) -> (usize, f64) {
        self.nodes
            .iter()
            .enumerate()
            .map(|(j, zj)| (j, (zj - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("curve has nodes")
    }

    fn winding_sum(&self, z: Complex64) -> Complex64 {
        let s: Complex64 = self
            .nodes
            .iter()
            .zip(&self.tangents)
            .zip(&self.weights)
            .map(|((zj, tj), wj)| tj * *wj / (zj - z))
            .sum();
        s / (2.0 * PI * I)
    }

    /// Discrete winding number `(1/2πi) Σ T_j w_j / (ζ_j − z)`, rounded.
    pub fn winding_number(&self, z: Complex64) -> Result<i32> {
        let (_, d) = self.nearest_node(z);
        let minimum = 2.0 * self.max_weight();
        if d < minimum {
            return Err(Error::TooClose { z, distance: d, minimum });
        }
        Ok(self.winding_sum(z).re.round() as i32)
    }

    /// Interiority test usable arbitrarily close to the boundary.
    ///
    /// Polygons use an exact crossing test against the vertices. Smooth
    /// curves use the discrete winding number away from the curve and the
    /// side of the tangent line at the nearest node close to it.
    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match &self.spec.shape {
            Shape::Polygon { vertices } => point_in_polygon(vertices, z, 1e-14 * self.diameter),
            _ => {
                let (j, d) = self.nearest_node(z);
                if d >= 2.0 * self.max_weight() {
                    self.winding_sum(z).re.round() as i32 == 1
                } else {
                    d > 0.0 && ((z - self.nodes[j]) * self.tangents[j].conj()).im > 0.0
                }
            }
        }
    }

    pub fn arc_between(&self, i: usize, j: usize) -> Result<ArcSegment> {
        self.check_index(i)?;
        self.check_index(j)?;
        let n = self.len();
        let count = (j + n - i) % n;
        let indices: Vec<usize> = (0..count).map(|k| (i + k) % n).collect();
        let measure = indices.iter().map(|&k| self.weights[k]).sum();
        Ok(ArcSegment { start: i, end: j, indices, measure })
    }

    /// Largest depth (found by bisection) at which every node's inward
    /// offset is still inside the domain.
    pub fn reach(&self) -> f64 {
        *self.reach.get_or_init(|| {
            let ok = |eps: f64| (0..self.len()).all(|j| self.contains(self.nodes[j] + self.inward[j] * eps));
            let (mut lo, mut hi) = (0.0, self.diameter);
            if ok(hi) {
                return hi;
            }
            for _ in 0..48 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        })
    }

    fn check_cone(&self, cfg: &ConeConfig) -> Result<()> {
        let reach = self.reach();
        match cfg.depths.iter().find(|&&d| d >= reach) {
            Some(&depth) => Err(Error::DepthExceedsReach { depth, reach }),
            None => Ok(()),
        }
    }

    /// Points `ζ_j + ε_k ν_j` along the cone axis, one per depth.
    pub fn interior_offsets(&self, node: usize, cfg: &ConeConfig) -> Result<Vec<Complex64>> {
        self.check_index(node)?;
        self.check_cone(cfg)?;
        let base = self.nodes[node];
        let dir = self.inward[node];
        cfg.depths
            .iter()
            .map(|&eps| {
                let z = base + dir * eps;
                if self.contains(z) {
                    Ok(z)
                } else {
                    Err(Error::DepthExceedsReach { depth: eps, reach: self.reach() })
                }
            })
            .collect()
    }

    /// Interior cone samples at `node`: the axis point and the two aperture
    /// rays at every depth. Samples that fall outside the domain are dropped.
    pub fn cone_points(&self, node: usize, cfg: &ConeConfig) -> Result<Vec<Complex64>> {
        self.check_index(node)?;
        self.check_cone(cfg)?;
        let base = self.nodes[node];
        let dir = self.inward[node];
        let rot = (I * cfg.aperture).exp();
        Ok(cfg
            .depths
            .iter()
            .flat_map(|&eps| [dir * eps, dir * rot * eps, dir * rot.conj() * eps])
            .map(|d| base + d)
            .filter(|&z| self.contains(z))
            .collect())
    }

    /// Sampled chord-arc constant: max over node pairs of the shorter arc
    /// length divided by the chord.
    pub fn chord_arc_constant(&self) -> f64 {
        let n = self.len();
        let mut k: f64 = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                let ds = (self.arclength[j] - self.arclength[i]).abs();
                let arc = ds.min(self.length - ds);
                let chord = (self.nodes[j] - self.nodes[i]).norm();
                k = k.max(arc / chord);
            }
        }
        k
    }

    /// A point comfortably inside the domain.
    pub fn interior_reference(&self) -> Complex64 {
        let candidate = match &self.spec.shape {
            Shape::Disk { center, .. } => *center,
            Shape::Parametric { coefficients } => {
                coefficients.iter().filter(|(k, _)| *k == 0).map(|(_, a)| *a).sum()
            }
            Shape::Polygon { vertices } => polygon_centroid(vertices),
        };
        if self.contains(candidate) {
            candidate
        } else {
            self.nodes[0] + self.inward[0] * (0.5 * self.reach())
        }
    }

    /// Cumulative integral `∫_{ζ_0}^{ζ_j} v dσ` along the positive direction
    /// and the integral over the whole curve. Spectral on smooth curves,
    /// fourth order on polygons.
    pub fn cumulative(&self, values: &[Complex64]) -> (Vec<Complex64>, Complex64) {
        match &self.layout {
            Layout::Periodic { speed } => {
                let v: Vec<Complex64> = values.iter().zip(speed).map(|(v, s)| v * *s).collect();
                spectral::twisted_primitive(&v, Complex64::new(0.0, 0.0))
            }
            Layout::Sides(sides) => {
                let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
                let mut offset = Complex64::new(0.0, 0.0);
                let mut first = None;
                for side in sides {
                    let (cum, total) =
                        spectral::midpoint_cumulative(&values[side.start..side.start + side.len], side.spacing);
                    let origin = *first.get_or_insert(cum[0]);
                    for (m, c) in cum.iter().enumerate() {
                        out[side.start + m] = offset + c - origin;
                    }
                    offset += total;
                }
                (out, offset)
            }
        }
    }

    /// `Q_j = ∫_{ζ_0}^{ζ_j} e^{iB} v dσ` where `B` is the cumulative integral
    /// of some coefficient (`phase`, with full-curve value `phase_total`).
    pub(crate) fn cumulative_twisted(
        &self,
        values: &[Complex64],
        phase: &[Complex64],
        phase_total: Complex64,
    ) -> (Vec<Complex64>, Complex64) {
        match &self.layout {
            Layout::Periodic { speed } => {
                let n = values.len();
                let beta = phase_total / (2.0 * PI);
                let dt = 2.0 * PI / n as f64;
                let p: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let periodic = phase[j] - beta * (j as f64 * dt);
                        values[j] * (I * periodic).exp() * speed[j]
                    })
                    .collect();
                spectral::twisted_primitive(&p, beta)
            }
            Layout::Sides(_) => {
                let q: Vec<Complex64> = values.iter().zip(phase).map(|(v, b)| v * (I * b).exp()).collect();
                self.cumulative(&q)
            }
        }
    }

    /// Arclength derivative of samples: spectral on smooth curves,
    /// fourth-order differences within each polygon side.
    pub fn derivative(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        match &self.layout {
            Layout::Periodic { speed } => {
                let n = values.len();
                let dt = spectral::periodic_derivative(values);
                let _ = n;
                Ok(dt.iter().zip(speed).map(|(d, s)| d / *s).collect())
            }
            Layout::Sides(sides) => {
                let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
                for (k, side) in sides.iter().enumerate() {
                    if side.len < 8 {
                        return Err(Error::SideTooShort { side: k, nodes: side.len, required: 8 });
                    }
                    let d = spectral::fd4_derivative(&values[side.start..side.start + side.len], side.spacing);
                    out[side.start..side.start + side.len].copy_from_slice(&d);
                }
                Ok(out)
            }
        }
    }
}

fn max_pairwise_distance(pts: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

fn polygon_centroid(v: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut c = Complex64::new(0.0, 0.0);
    let mut area = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let w = cross(a, b);
        area += w;
        c += (a + b) * w;
    }
    c / (3.0 * area)
}

fn point_in_polygon(v: &[Complex64], z: Complex64, tol: f64) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // on the boundary?
        let ab = b - a;
        let t = ((z - a) * ab.conj()).re / ab.norm_sqr();
        if (0.0..=1.0).contains(&t) && (a + ab * t - z).norm() <= tol {
            return false;
        }
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}
