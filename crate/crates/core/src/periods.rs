//! Periods of holomorphic differentials on the genus-2 curve
//! `y² = (z² − s²)(z² − t²)(z² − r²)` and on flat tori.
//!
//! # Homology convention
//!
//! Branch cuts are `C1 = [−r, −t]`, `C2 = [−s, s]`, `C3 = [t, r]`. On the
//! upper sheet `y(x + i0) = iᵐ √|p(x)|`, `m` the number of branch points to
//! the right of `x`. With `I(x0, x1) = ∫ x^k |p|^{−1/2} dx`:
//!
//! | cycle | period of `z^k dz / y`            |
//! |-------|-----------------------------------|
//! | `a1`  | `−2i · I(−r, −t)`                 |
//! | `a2`  | `2i · I(−s, s)`                   |
//! | `b1`  | `2 · I(−t, −s) − 2 · I(s, t)`     |
//! | `b2`  | `−2 · I(s, t)`                    |
//!
//! `a1`, `a2` encircle `C1`, `C2`; `b1` runs from `C1` to `C3` through the
//! gaps, `b2` from `C2` to `C3`. This basis has `a_i · b_j = δ_ij`; the
//! resulting `τ` is symmetric with positive-definite imaginary part.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default Gauss–Legendre order for segment integrals.
pub const DEFAULT_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    pub s: f64,
    pub t: f64,
    pub r: f64,
}

impl HyperellipticCurve {
    pub fn new(s: f64, t: f64, r: f64) -> Result<Self> {
        if !(s.is_finite() && t.is_finite() && r.is_finite()) || !(0.0 < s && s < t && t < r) {
            return Err(Error::Input(format!("curve needs 0 < s < t < r, got ({s}, {t}, {r})")));
        }
        Ok(Self { s, t, r })
    }

    /// Parse `"s,t,r"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad curve parameter '{p}'"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [s, t, r] => Self::new(*s, *t, *r),
            _ => Err(Error::Input(format!("curve needs three parameters, got '{text}'"))),
        }
    }

    /// Branch points in increasing order.
    pub fn branch_points(&self) -> [f64; 6] {
        [-self.r, -self.t, -self.s, self.s, self.t, self.r]
    }

    pub fn radicand(&self, x: f64) -> f64 {
        let x2 = x * x;
        (x2 - self.s * self.s) * (x2 - self.t * self.t) * (x2 - self.r * self.r)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.s, lambda * self.t, lambda * self.r)
    }
}

/// `z^k dz / y` for `k ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoloDifferential {
    pub k: u32,
}

impl HoloDifferential {
    pub fn new(k: u32) -> Result<Self> {
        if k > 1 {
            return Err(Error::Input(format!("holomorphic differentials on genus 2 have k in {{0, 1}}, got {k}")));
        }
        Ok(Self { k })
    }

    /// The differential `α = z dz / y`.
    pub const ALPHA: HoloDifferential = HoloDifferential { k: 1 };
}

/// `R(x) = x / √|p(x)|`, the positive root taken.
pub fn r_integrand(curve: &HyperellipticCurve, x: f64) -> Result<f64> {
    let p = curve.radicand(x);
    if p == 0.0 || curve.branch_points().contains(&x) {
        return Err(Error::Domain(format!("x = {x} is a branch point")));
    }
    Ok(x / p.abs().sqrt())
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_{x0}^{x1} x^k |p(x)|^{−1/2} dx`.
///
/// The substitution `x = m + h sin θ` absorbs inverse square root endpoint
/// singularities: for an endpoint that is a branch point its linear factor
/// is evaluated exactly as `h(1 ± sin θ)`.
pub fn segment_integral(curve: &HyperellipticCurve, k: u32, x0: f64, x1: f64) -> Result<f64> {
    segment_integral_with(curve, k, x0, x1, DEFAULT_NODES)
}

pub fn segment_integral_with(curve: &HyperellipticCurve, k: u32, x0: f64, x1: f64, nodes: usize) -> Result<f64> {
    if !(x0.is_finite() && x1.is_finite()) {
        return Err(Error::Input("segment endpoints must be finite".into()));
    }
    if x0 == x1 {
        return Ok(0.0);
    }
    if x1 < x0 {
        return Ok(-segment_integral_with(curve, k, x1, x0, nodes)?);
    }
    let roots = curve.branch_points();
    if let Some(e) = roots.iter().find(|&&e| x0 < e && e < x1) {
        return Err(Error::Domain(format!("branch point {e} inside [{x0}, {x1}]")));
    }
    if k == 1 && (x0 >= 0.0 || x1 <= 0.0) {
        // x dx / √|p(x)| = du / (2 √|q(u)|) with u = x², q(u) = Π (u − e²);
        // keeps the integrand smooth when a root sits close to the origin
        let sign = if x0 >= 0.0 { 1.0 } else { -1.0 };
        let (u0, u1) = if sign > 0.0 { (x0 * x0, x1 * x1) } else { (x1 * x1, x0 * x0) };
        let squares = [curve.s, curve.t, curve.r].map(|e| e * e);
        let value = sin_quadrature(u0, u1, nodes, &squares, |_| 1.0);
        return Ok(sign * 0.5 * value);
    }
    Ok(sin_quadrature(x0, x1, nodes, &roots, |x| x.powi(k as i32)))
}

/// `∫_a^b f(x) / √(Π |x − e|) dx` with `x = m + h sin θ`, which removes
/// inverse square-root singularities at roots sitting on the endpoints.
fn sin_quadrature(a: f64, b: f64, nodes: usize, roots: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (nodes_t, weights) = gauss_legendre(nodes);
    let mut acc = 0.0;
    for (&u, &w) in nodes_t.iter().zip(&weights) {
        let theta = 0.5 * PI * u;
        let (sn, cs) = theta.sin_cos();
        let x = m + h * sn;
        // |x - a| and |b - x| without cancellation
        let left = h * (1.0 + sn);
        let right = h * cs * cs / (1.0 + sn);
        let prod: f64 = roots
            .iter()
            .map(|&e| if e == a { left } else if e == b { right } else { (x - e).abs() })
            .product();
        // dx = h cos θ dθ, dθ = (π/2) du
        acc += w * f(x) * h * cs / prod.sqrt();
    }
    acc * 0.5 * PI
}

/// Periods of `α = z dz / y` in reduced form: `a1 = 2i ∫_t^r R`,
/// `b2 = −2 ∫_s^t R`, and the two remaining periods read off the symmetric
/// intervals `[−s, s]` and `[−t, −s] ∪ [s, t]`, where oddness of `R` kills them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaPeriods {
    pub a1: Complex64,
    pub a2: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl AlphaPeriods {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a1, self.a2, self.b1, self.b2]
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self { a1: self.a1 * lambda, a2: self.a2 * lambda, b1: self.b1 * lambda, b2: self.b2 * lambda }
    }
}

pub fn reduced_alpha_periods(curve: &HyperellipticCurve) -> Result<AlphaPeriods> {
    let HyperellipticCurve { s, t, r } = *curve;
    Ok(AlphaPeriods {
        a1: 2.0 * I * segment_integral(curve, 1, t, r)?,
        a2: 2.0 * I * segment_integral(curve, 1, -s, s)?,
        b1: Complex64::new(2.0 * (segment_integral(curve, 1, -t, -s)? + segment_integral(curve, 1, s, t)?), 0.0),
        b2: Complex64::new(-2.0 * segment_integral(curve, 1, s, t)?, 0.0),
    })
}

/// Rows: differentials `k = 0, 1`. Columns: cycles `(a1, a2)` and `(b1, b2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodData {
    pub curve: HyperellipticCurve,
    pub a_periods: Matrix2<Complex64>,
    pub b_periods: Matrix2<Complex64>,
    pub tau: Matrix2<Complex64>,
    pub condition: f64,
}

/// Largest admissible condition number of the a-period matrix.
pub const MAX_CONDITION: f64 = 1e10;

/// The four cycle periods of differential `k` in the module's homology basis.
pub fn cycle_periods(curve: &HyperellipticCurve, k: u32) -> Result<[Complex64; 4]> {
    HoloDifferential::new(k)?;
    let HyperellipticCurve { s, t, r } = *curve;
    let seg = |a, b| segment_integral(curve, k, a, b);
    let st = seg(s, t)?;
    Ok([
        -2.0 * I * seg(-r, -t)?,
        2.0 * I * seg(-s, s)?,
        Complex64::new(2.0 * seg(-t, -s)? - 2.0 * st, 0.0),
        Complex64::new(-2.0 * st, 0.0),
    ])
}

pub fn full_periods(curve: &HyperellipticCurve) -> Result<PeriodData> {
    let mut a = Matrix2::zeros();
    let mut b = Matrix2::zeros();
    for k in 0..2u32 {
        let p = cycle_periods(curve, k)?;
        let row = k as usize;
        a[(row, 0)] = p[0];
        a[(row, 1)] = p[1];
        b[(row, 0)] = p[2];
        b[(row, 1)] = p[3];
    }
    let sv = a.svd(false, false).singular_values;
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Numerical(format!("a-period matrix condition number {condition:e} too large")));
    }
    let inv = a.try_inverse().ok_or_else(|| Error::Numerical("a-period matrix is singular".into()))?;
    Ok(PeriodData { curve: *curve, a_periods: a, b_periods: b, tau: inv * b, condition })
}

impl PeriodData {
    pub fn symmetry_residual(&self) -> f64 {
        (self.tau[(0, 1)] - self.tau[(1, 0)]).norm()
    }

    /// Eigenvalues of the symmetrized `Im τ`, ascending.
    pub fn im_tau_eigenvalues(&self) -> [f64; 2] {
        let im = self.tau.map(|z| z.im);
        let sym = (im + im.transpose()) * 0.5;
        let e = SymmetricEigen::new(sym).eigenvalues;
        let (x, y) = (e[0], e[1]);
        if x <= y {
            [x, y]
        } else {
            [y, x]
        }
    }

    /// Periods `(a1, a2, b1, b2)` of `α` in this basis.
    pub fn alpha_row(&self) -> [Complex64; 4] {
        [self.a_periods[(1, 0)], self.a_periods[(1, 1)], self.b_periods[(1, 0)], self.b_periods[(1, 1)]]
    }
}

/// Arithmetic–geometric mean.
pub fn agm(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(m) = π / (2 AGM(1, √(1 − m)))`.
pub fn elliptic_oracle(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("K(m) needs 0 <= m < 1, got {m}")));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - m).sqrt())))
}

/// `∫_t^r R dx` and `∫_s^t R dx` through `K`, after `u = x²`.
pub fn elliptic_alpha_segments(curve: &HyperellipticCurve) -> Result<(f64, f64)> {
    let HyperellipticCurve { s, t, r } = *curve;
    let d = r * r - s * s;
    let tr = elliptic_oracle((r * r - t * t) / d)? / d.sqrt();
    let st = elliptic_oracle((t * t - s * s) / d)? / d.sqrt();
    Ok((tr, st))
}

/// Periods `(c1, c2)` of `coefficient · dz` on `ℂ/(ℤ + τℤ)`.
pub fn torus_periods(lattice_tau: Complex64, coefficient: Complex64) -> Result<(Complex64, Complex64)> {
    if lattice_tau.im.is_nan() || lattice_tau.im <= 0.0 {
        return Err(Error::Input("lattice_tau must have positive imaginary part".into()));
    }
    Ok((coefficient, coefficient * lattice_tau))
}
