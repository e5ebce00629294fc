//! Low-level quadrature and differentiation kernels.
//!
//! Two discretizations are supported: samples that are uniform in a periodic
//! parameter (smooth closed curves), and samples at cell midpoints of a
//! straight segment (polygon sides).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Signed wavenumber for FFT bin `k` of length `n`.
fn wavenumber(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// d/dt of a periodic sample vector on `t_j = 2πj/n`. The Nyquist mode is
/// dropped.
pub(crate) fn periodic_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = forward(values);
    for (k, ck) in c.iter_mut().enumerate() {
        let m = wavenumber(k, n);
        if n.is_multiple_of(2) && k == n / 2 {
            *ck = Complex64::new(0.0, 0.0);
        } else {
            *ck *= I * m as f64;
        }
    }
    inverse(&c)
}

/// Cumulative integral `Q_j = ∫_0^{t_j} e^{iβτ} p(τ) dτ` of a periodic `p`
/// sampled on `t_j = 2πj/n`, plus the full-period value `Q(2π)`.
///
/// Each Fourier mode of `p` is integrated exactly against the twist factor,
/// so the result is spectrally accurate for smooth `p` even though the
/// integrand itself is not periodic when `β` is not an integer.
pub(crate) fn twisted_primitive(p: &[Complex64], beta: Complex64) -> (Vec<Complex64>, Complex64) {
    let n = p.len();
    let c = forward(p);
    let dt = 2.0 * PI / n as f64;
    let nyquist = n.is_multiple_of(2).then_some(n / 2);

    // modes contributing a secular term c·t (exact resonance β + m = 0)
    let mut secular = Complex64::new(0.0, 0.0);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut offset = Complex64::new(0.0, 0.0);
    let mut add_mode = |slot: usize, m: f64, coeff: Complex64, d: &mut [Complex64], offset: &mut Complex64| {
        let denom = I * (beta + m);
        if denom.norm() < 1e-13 {
            secular += coeff;
        } else {
            d[slot] += coeff / denom;
            *offset += coeff / denom;
        }
    };
    for k in 0..n {
        if Some(k) == nyquist {
            let half = c[k] * 0.5;
            add_mode(k, (n / 2) as f64, half, &mut d, &mut offset);
            add_mode(k, -((n / 2) as f64), half, &mut d, &mut offset);
        } else {
            add_mode(k, wavenumber(k, n) as f64, c[k], &mut d, &mut offset);
        }
    }
    let periodic = inverse(&d);
    let q: Vec<Complex64> = periodic
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let t = j as f64 * dt;
            (I * beta * t).exp() * v - offset + secular * t
        })
        .collect();
    let total = ((I * beta * 2.0 * PI).exp() - 1.0) * offset + secular * 2.0 * PI;
    (q, total)
}

/// Relative end corrections `c_m` for the midpoint rule on `n` cells: node
/// `m` (and its mirror `n − 1 − m`) gets weight `(1 + c_m)Δ`. They cancel
/// the leading Euler–Maclaurin endpoint terms. With `K` corrections per end
/// the rule is exact for degree `< K` and of order `K + 1`; `K` is 6, 4 or 2
/// depending on how many cells there are.
pub(crate) fn midpoint_end_corrections(n: usize) -> &'static [f64] {
    const ORDER6: [f64; 6] = [
        184831.0 / 967680.0,
        -532379.0 / 967680.0,
        68155.0 / 96768.0,
        -248543.0 / 483840.0,
        195203.0 / 967680.0,
        -32119.0 / 967680.0,
    ];
    const ORDER4_WIDE: [f64; 4] = [703.0 / 5760.0, -463.0 / 1920.0, 101.0 / 640.0, -223.0 / 5760.0];
    const ORDER4: [f64; 2] = [1.0 / 24.0, -1.0 / 24.0];
    if n >= 12 {
        &ORDER6
    } else if n >= 8 {
        &ORDER4_WIDE
    } else {
        &ORDER4
    }
}

/// Midpoint weights `(1 + c_m)Δ` for `n` cells of width `spacing`.
pub(crate) fn midpoint_weights(n: usize, spacing: f64) -> Vec<f64> {
    let mut w = vec![spacing; n];
    for (m, c) in midpoint_end_corrections(n).iter().enumerate() {
        w[m] += c * spacing;
        w[n - 1 - m] += c * spacing;
    }
    w
}

/// Integral over `[a, b]` of the polynomial interpolating `values` at local
/// abscissae `0, 1, …, len − 1` (at most 6 points; three-point Gauss is
/// exact up to degree 5).
fn local_integral(values: &[Complex64], a: f64, b: f64) -> Complex64 {
    let eval = |x: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, vk) in values.iter().enumerate() {
            let mut basis = 1.0;
            for m in 0..values.len() {
                if m != k {
                    basis *= (x - m as f64) / (k as f64 - m as f64);
                }
            }
            acc += vk * basis;
        }
        acc
    };
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let g = (0.6f64).sqrt();
    (eval(mid - g * half) * 5.0 + eval(mid) * 8.0 + eval(mid + g * half) * 5.0) * (half / 9.0)
}

/// Cumulative integral over a segment sampled at cell midpoints
/// `x_m = (m + ½)Δ`. Returns the integral from the segment start to each
/// node and the integral over the whole segment. Sixth order in `Δ` for
/// `n ≥ 6` (fourth order for 4 or 5 samples).
pub(crate) fn midpoint_cumulative(values: &[Complex64], spacing: f64) -> (Vec<Complex64>, Complex64) {
    let n = values.len();
    assert!(n >= 4, "midpoint_cumulative needs at least 4 samples");
    let width = if n >= 6 { 6 } else { 4 };
    let lead = width / 2 - 1;
    let mut out = Vec::with_capacity(n);
    let mut acc = local_integral(&values[0..width], -0.5, 0.0) * spacing;
    out.push(acc);
    for m in 0..n - 1 {
        let s = m.saturating_sub(lead).min(n - width);
        let local = (m - s) as f64;
        acc += local_integral(&values[s..s + width], local, local + 1.0) * spacing;
        out.push(acc);
    }
    let last = (width - 1) as f64;
    let tail = local_integral(&values[n - width..n], last, last + 0.5) * spacing;
    (out, acc + tail)
}

/// Fourth-order finite-difference derivative on a uniform grid, one-sided
/// near both ends. Requires at least 5 samples.
pub(crate) fn fd4_derivative(values: &[Complex64], spacing: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 5, "fd4_derivative needs at least 5 samples");
    let f = values;
    let h12 = 12.0 * spacing;
    (0..n)
        .map(|m| {
            if m == 0 {
                (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) / h12
            } else if m == 1 {
                (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) / h12
            } else if m == n - 2 {
                -(f[n - 1] * -3.0 - f[n - 2] * 10.0 + f[n - 3] * 18.0 - f[n - 4] * 6.0 + f[n - 5]) / h12
            } else if m == n - 1 {
                -(f[n - 1] * -25.0 + f[n - 2] * 48.0 - f[n - 3] * 36.0 + f[n - 4] * 16.0 - f[n - 5] * 3.0)
                    / h12
            } else {
                (f[m - 2] - f[m - 1] * 8.0 + f[m + 1] * 8.0 - f[m + 2]) / h12
            }
        })
        .collect()
}

/// Polynomial extrapolation to `x = 0` through the points `(xs[k], ys[k])`
/// (Neville's scheme).
pub(crate) fn extrapolate_to_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for k in 0..n - level {
            let (xa, xb) = (xs[k], xs[k + level]);
            p[k] = (p[k] * xb - p[k + 1] * xa) / (xb - xa);
        }
    }
    p[0]
}
