//! Uniform grids on the flat torus `ℂ/(ℤ + τℤ)` and on the circle, with
//! spectral calculus for band-limited samples.
//!
//! Points are addressed in lattice coordinates `z = u + τ v`, `u, v ∈ [0, 1)`,
//! sample `(i, j)` sitting at `(u, v) = (i/n, j/n)` and stored at `j*n + i`.
//! The Euclidean derivatives follow from `x = u + Re τ·v`, `y = Im τ·v`.
//!
//! Cycle `γ1` is the image of the real axis (the line `v = cut_y`), cycle
//! `γ2` the image of the τ axis (the line `u = cut_x`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, StructureAlgebra};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cycle {
    #[serde(rename = "gamma1")]
    Gamma1,
    #[serde(rename = "gamma2")]
    Gamma2,
}

impl Cycle {
    pub fn name(self) -> &'static str {
        match self {
            Cycle::Gamma1 => "gamma1",
            Cycle::Gamma2 => "gamma2",
        }
    }
}

/// JSON layout: `{"n": 64, "lattice_tau": [0.0, 1.0], "cut_x": 0.0, "cut_y": 0.0}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "default_tau")]
    pub lattice_tau: [f64; 2],
    #[serde(default)]
    pub cut_x: f64,
    #[serde(default)]
    pub cut_y: f64,
}

fn default_tau() -> [f64; 2] {
    [0.0, 1.0]
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, lattice_tau: default_tau(), cut_x: 0.0, cut_y: 0.0 }
    }
}

#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    tau: Complex64,
    cut_u: usize,
    cut_v: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("tau", &self.tau)
            .field("cut_u", &self.cut_u)
            .field("cut_v", &self.cut_v)
            .finish()
    }
}

impl TorusGrid {
    /// Square torus `τ = i` with both cuts through the origin.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(&GridConfig { n, ..GridConfig::default() })
    }

    pub fn new(cfg: &GridConfig) -> Result<Self> {
        let n = cfg.n;
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Input(format!("grid size must be a power of two >= 8, got {n}")));
        }
        let tau = Complex64::new(cfg.lattice_tau[0], cfg.lattice_tau[1]);
        if tau.im.is_nan() || tau.im <= 0.0 || !tau.re.is_finite() {
            return Err(Error::Input("lattice_tau must have positive imaginary part".into()));
        }
        let cut_u = grid_aligned(cfg.cut_x, n, "cut_x")?;
        let cut_v = grid_aligned(cfg.cut_y, n, "cut_y")?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            tau,
            cut_u,
            cut_v,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: GridConfig = serde_json::from_str(text)?;
        Self::new(&cfg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// Area of the fundamental domain.
    pub fn area(&self) -> f64 {
        self.tau.im
    }

    pub fn cut_index(&self, cycle: Cycle) -> usize {
        match cycle {
            Cycle::Gamma1 => self.cut_v,
            Cycle::Gamma2 => self.cut_u,
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest bandwidth a field may carry and still be exactly differentiable.
    pub fn max_bandwidth(&self) -> usize {
        self.n / 2 - 1
    }

    /// Lattice coordinates of sample `(i, j)`.
    pub fn lattice_point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 / self.n as f64, j as f64 / self.n as f64)
    }

    /// Euclidean coordinates of sample `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let (u, v) = self.lattice_point(i, j);
        (u + self.tau.re * v, self.tau.im * v)
    }

    pub fn zeros(&self) -> ScalarGrid {
        ScalarGrid { n: self.n, values: vec![ZERO; self.len()], bandwidth: 0 }
    }

    pub fn constant(&self, c: Complex64) -> ScalarGrid {
        ScalarGrid { n: self.n, values: vec![c; self.len()], bandwidth: 0 }
    }

    /// Sample `f(x, y)` in Euclidean coordinates; the caller vouches for `bandwidth`.
    pub fn sample(&self, bandwidth: usize, f: impl Fn(f64, f64) -> Complex64) -> ScalarGrid {
        let n = self.n;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let (x, y) = self.point(i, j);
                values.push(f(x, y));
            }
        }
        ScalarGrid { n, values, bandwidth }
    }

    /// Trigonometric polynomial `Σ c_pq exp(2πi(p u + q v))` in lattice
    /// coordinates. Bandwidth is the largest `max(|p|, |q|)`.
    pub fn trig_polynomial(&self, coeffs: &[((i64, i64), Complex64)]) -> Result<ScalarGrid> {
        let n = self.n;
        let bw = coeffs.iter().map(|((p, q), _)| p.unsigned_abs().max(q.unsigned_abs())).max().unwrap_or(0)
            as usize;
        if bw > self.max_bandwidth() {
            return Err(Error::Input(format!("bandwidth {bw} exceeds grid limit {}", self.max_bandwidth())));
        }
        let mut spec = vec![ZERO; n * n];
        for &((p, q), c) in coeffs {
            let k = p.rem_euclid(n as i64) as usize;
            let l = q.rem_euclid(n as i64) as usize;
            spec[l * n + k] += c;
        }
        let values = self.ifft(&spec, bw).values;
        Ok(ScalarGrid { n, values, bandwidth: bw })
    }

    fn check(&self, f: &ScalarGrid) {
        assert_eq!(f.n, self.n, "scalar grid belongs to a different torus grid");
    }

    /// 2D DFT normalized so that `values = Σ coeffs · exp(+2πi(k u + l v))`.
    pub fn fft(&self, f: &ScalarGrid) -> Vec<Complex64> {
        self.check(f);
        let n = self.n;
        let mut data = f.values.clone();
        for row in data.chunks_mut(n) {
            self.fwd.process(row);
        }
        let mut col = vec![ZERO; n];
        for i in 0..n {
            for j in 0..n {
                col[j] = data[j * n + i];
            }
            self.fwd.process(&mut col);
            for j in 0..n {
                data[j * n + i] = col[j];
            }
        }
        let scale = 1.0 / (n * n) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        data
    }

    pub fn ifft(&self, coeffs: &[Complex64], bandwidth: usize) -> ScalarGrid {
        let n = self.n;
        let mut data = coeffs.to_vec();
        for row in data.chunks_mut(n) {
            self.inv.process(row);
        }
        let mut col = vec![ZERO; n];
        for i in 0..n {
            for j in 0..n {
                col[j] = data[j * n + i];
            }
            self.inv.process(&mut col);
            for j in 0..n {
                data[j * n + i] = col[j];
            }
        }
        ScalarGrid { n, values: data, bandwidth }
    }

    /// Signed frequency of DFT index `k`; the Nyquist bin maps to `None`.
    pub fn frequency(&self, k: usize) -> Option<i64> {
        signed_frequency(k, self.n)
    }

    fn lattice_derivative(&self, f: &ScalarGrid, along_u: bool) -> ScalarGrid {
        let n = self.n;
        let mut c = self.fft(f);
        for l in 0..n {
            for k in 0..n {
                let freq = if along_u { self.frequency(k) } else { self.frequency(l) };
                let m = match freq {
                    Some(q) => Complex64::new(0.0, 2.0 * PI * q as f64),
                    None => ZERO,
                };
                c[l * n + k] *= m;
            }
        }
        self.ifft(&c, f.bandwidth)
    }

    /// Exact derivative of the trigonometric interpolant.
    pub fn spectral_derivative(&self, f: &ScalarGrid, dir: Direction) -> ScalarGrid {
        let du = self.lattice_derivative(f, true);
        match dir {
            Direction::X => du,
            Direction::Y => {
                let dv = self.lattice_derivative(f, false);
                let a = -self.tau.re / self.tau.im;
                let b = 1.0 / self.tau.im;
                du.scale(Complex64::new(a, 0.0)).add(&dv.scale(Complex64::new(b, 0.0)))
            }
        }
    }

    /// `∫_X f dx dy`: sample mean times area.
    pub fn integrate(&self, f: &ScalarGrid) -> Complex64 {
        self.check(f);
        let s: Complex64 = f.values.iter().sum();
        s * (self.area() / self.len() as f64)
    }

    /// Line integral of `fx dx + fy dy` along a cycle at its cut coordinate.
    pub fn cycle_integral(&self, fx: &ScalarGrid, fy: &ScalarGrid, cycle: Cycle) -> Complex64 {
        self.check(fx);
        self.check(fy);
        let n = self.n;
        let mut acc = ZERO;
        match cycle {
            Cycle::Gamma1 => {
                let j = self.cut_v;
                for i in 0..n {
                    acc += fx.values[j * n + i];
                }
            }
            Cycle::Gamma2 => {
                let i = self.cut_u;
                for j in 0..n {
                    acc += fx.values[j * n + i] * self.tau.re + fy.values[j * n + i] * self.tau.im;
                }
            }
        }
        acc / n as f64
    }

    /// `∫ (f ∧ g)` for one-forms `f = fx dx + fy dy`, `g = gx dx + gy dy`,
    /// with `dx ∧ dy` positively oriented.
    pub fn wedge_integrate(&self, fx: &ScalarGrid, fy: &ScalarGrid, gx: &ScalarGrid, gy: &ScalarGrid) -> Complex64 {
        let form = fx.mul(gy).sub(&fy.mul(gx));
        self.integrate(&form)
    }

    /// Value of the unit sawtooth for the cut of `cycle` at sample index `idx`
    /// along the transverse coordinate: rises with slope one and drops by one
    /// across the cut.
    pub fn saw(&self, cycle: Cycle, idx: usize) -> f64 {
        let cut = self.cut_index(cycle);
        let shifted = (idx + self.n - cut) % self.n;
        shifted as f64 / self.n as f64 - 0.5
    }

    /// `∫_0^1 S(w)^p exp(2πi k w) dw` for the sawtooth of `cycle`.
    fn saw_moment(&self, cycle: Cycle, p: u8, k: Option<i64>) -> Complex64 {
        let k = match k {
            Some(k) => k,
            // band-limited data carries nothing at Nyquist
            None => return ZERO,
        };
        let base = match (p, k) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (0, _) => ZERO,
            (1, 0) => ZERO,
            (1, k) => Complex64::new(0.0, -1.0 / (2.0 * PI * k as f64)),
            (2, 0) => Complex64::new(1.0 / 12.0, 0.0),
            (2, k) => Complex64::new(1.0 / (2.0 * PI * PI * (k * k) as f64), 0.0),
            _ => unreachable!("saw powers are capped at 2"),
        };
        let c = self.cut_index(cycle) as f64 / self.n as f64;
        base * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * c)
    }
}

fn signed_frequency(k: usize, n: usize) -> Option<i64> {
    let half = n / 2;
    if k < half {
        Some(k as i64)
    } else if k > half {
        Some(k as i64 - n as i64)
    } else {
        None
    }
}

fn grid_aligned(c: f64, n: usize, what: &str) -> Result<usize> {
    let scaled = c.rem_euclid(1.0) * n as f64;
    let idx = scaled.round();
    if (scaled - idx).abs() > 1e-9 {
        return Err(Error::Input(format!("{what} must be a multiple of 1/n")));
    }
    Ok(idx as usize % n)
}

/// Sampled complex function on the torus. `bandwidth` is the largest
/// frequency (max-norm over the two lattice directions) it may contain.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    n: usize,
    values: Vec<Complex64>,
    bandwidth: usize,
}

impl ScalarGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.n + i]
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64, bw: usize) -> Self {
        assert_eq!(self.n, other.n, "grid size mismatch");
        Self {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            bandwidth: bw,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b, self.bandwidth.max(other.bandwidth))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b, self.bandwidth.max(other.bandwidth))
    }

    /// Pointwise product; bandwidths add.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b, self.bandwidth + other.bandwidth)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| v * s).collect(), bandwidth: self.bandwidth }
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| v.conj()).collect(), bandwidth: self.bandwidth }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Powers of the two unit sawtooth functions multiplying a smooth term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SawPower {
    /// Power of the sawtooth in `u`, which jumps across `γ2`.
    pub u: u8,
    /// Power of the sawtooth in `v`, which jumps across `γ1`.
    pub v: u8,
}

impl SawPower {
    pub const SMOOTH: SawPower = SawPower { u: 0, v: 0 };
}

/// Piecewise-smooth function on the cut torus, written as
/// `Σ S_u^p S_v^q · G_pq` with `G_pq` periodic and band-limited and `S_u`,
/// `S_v` the unit sawtooth functions of the two cuts. Integrals of such
/// products are evaluated exactly from the Fourier coefficients of `G_pq`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutScalar {
    terms: Vec<(SawPower, ScalarGrid)>,
}

impl From<ScalarGrid> for CutScalar {
    fn from(g: ScalarGrid) -> Self {
        Self { terms: vec![(SawPower::SMOOTH, g)] }
    }
}

impl CutScalar {
    pub fn smooth(g: ScalarGrid) -> Self {
        g.into()
    }

    pub fn from_terms(terms: Vec<(SawPower, ScalarGrid)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Input("cut function needs at least one term".into()));
        }
        if terms.iter().any(|(p, _)| p.u > 2 || p.v > 2) {
            return Err(Error::Input("sawtooth powers above 2 are not supported".into()));
        }
        let mut out = Self { terms: Vec::new() };
        for (p, g) in terms {
            out.push(p, g);
        }
        Ok(out)
    }

    fn push(&mut self, p: SawPower, g: ScalarGrid) {
        match self.terms.iter_mut().find(|(q, _)| *q == p) {
            Some((_, h)) => *h = h.add(&g),
            None => {
                self.terms.push((p, g));
                self.terms.sort_by_key(|(q, _)| *q);
            }
        }
    }

    pub fn terms(&self) -> &[(SawPower, ScalarGrid)] {
        &self.terms
    }

    pub fn n(&self) -> usize {
        self.terms[0].1.n
    }

    pub fn is_smooth(&self) -> bool {
        self.terms.iter().all(|(p, _)| *p == SawPower::SMOOTH)
    }

    /// The periodic part, if there are no sawtooth terms.
    pub fn as_smooth(&self) -> Option<&ScalarGrid> {
        match self.terms.as_slice() {
            [(p, g)] if *p == SawPower::SMOOTH => Some(g),
            _ => None,
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.terms.iter().map(|(_, g)| g.bandwidth).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, g) in &other.terms {
            out.push(*p, g.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { terms: self.terms.iter().map(|(p, g)| (*p, g.scale(s))).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(p, g)| (*p, g.conj())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out: Option<Self> = None;
        for (p, g) in &self.terms {
            for (q, h) in &other.terms {
                let power = SawPower { u: p.u + q.u, v: p.v + q.v };
                if power.u > 2 || power.v > 2 {
                    return Err(Error::Input("product exceeds supported sawtooth power".into()));
                }
                let prod = g.mul(h);
                match out.as_mut() {
                    Some(o) => o.push(power, prod),
                    None => out = Some(Self { terms: vec![(power, prod)] }),
                }
            }
        }
        Ok(out.expect("cut functions are never empty"))
    }

    pub fn mul_smooth(&self, g: &ScalarGrid) -> Self {
        Self { terms: self.terms.iter().map(|(p, h)| (*p, h.mul(g))).collect() }
    }

    /// Classical derivative on the cut domain; the jump itself contributes nothing.
    pub fn derivative(&self, grid: &TorusGrid, dir: Direction) -> Self {
        let mut out = Self { terms: Vec::new() };
        let (a, b) = match dir {
            Direction::X => (1.0, 0.0),
            Direction::Y => (-grid.tau.re / grid.tau.im, 1.0 / grid.tau.im),
        };
        for (p, g) in &self.terms {
            let du = grid.lattice_derivative(g, true);
            let dv = grid.lattice_derivative(g, false);
            out.push(*p, du.scale(Complex64::new(a, 0.0)).add(&dv.scale(Complex64::new(b, 0.0))));
            if p.u > 0 && a != 0.0 {
                out.push(SawPower { u: p.u - 1, v: p.v }, g.scale(Complex64::new(a * p.u as f64, 0.0)));
            }
            if p.v > 0 && b != 0.0 {
                out.push(SawPower { u: p.u, v: p.v - 1 }, g.scale(Complex64::new(b * p.v as f64, 0.0)));
            }
        }
        if out.terms.is_empty() {
            out.terms.push((SawPower::SMOOTH, grid.zeros()));
        }
        out
    }

    /// Exact `∫_X` for band-limited periodic factors.
    pub fn integrate(&self, grid: &TorusGrid) -> Complex64 {
        let n = grid.n;
        let mut total = ZERO;
        for (p, g) in &self.terms {
            if *p == SawPower::SMOOTH {
                total += grid.integrate(g);
                continue;
            }
            let c = grid.fft(g);
            let mu: Vec<Complex64> =
                (0..n).map(|k| grid.saw_moment(Cycle::Gamma2, p.u, grid.frequency(k))).collect();
            let mv: Vec<Complex64> =
                (0..n).map(|l| grid.saw_moment(Cycle::Gamma1, p.v, grid.frequency(l))).collect();
            let mut acc = ZERO;
            for l in 0..n {
                if mv[l] == ZERO {
                    continue;
                }
                let mut row = ZERO;
                for k in 0..n {
                    row += c[l * n + k] * mu[k];
                }
                acc += row * mv[l];
            }
            total += acc * grid.area();
        }
        total
    }

    /// Point values on the cut domain `[cut_x, cut_x + 1) × [cut_y, cut_y + 1)`.
    pub fn samples(&self, grid: &TorusGrid) -> ScalarGrid {
        let n = grid.n;
        let mut out = grid.zeros();
        let mut bw = 0;
        for (p, g) in &self.terms {
            bw = bw.max(g.bandwidth);
            for j in 0..n {
                let sv = grid.saw(Cycle::Gamma1, j).powi(p.v as i32);
                for i in 0..n {
                    let su = grid.saw(Cycle::Gamma2, i).powi(p.u as i32);
                    out.values[j * n + i] += g.values[j * n + i] * (su * sv);
                }
            }
        }
        out.bandwidth = bw;
        out
    }

    /// Constant jump across each cut, when the coefficient of the first power
    /// of its sawtooth is constant and no higher powers appear. Crossing the
    /// cut of `γ1` in the `+v` direction (or of `γ2` in `+u`) changes the
    /// value by the returned amount.
    pub fn constant_jumps(&self) -> Option<Vec<(Cycle, Complex64)>> {
        let mut out = Vec::new();
        for (p, g) in &self.terms {
            if *p == SawPower::SMOOTH {
                continue;
            }
            let first = g.values[0];
            let constant = g.values.iter().all(|v| (v - first).norm() <= 1e-14 * (1.0 + first.norm()));
            match (p.u, p.v) {
                (1, 0) if constant => out.push((Cycle::Gamma2, -first)),
                (0, 1) if constant => out.push((Cycle::Gamma1, -first)),
                _ => return None,
            }
        }
        out.sort_by_key(|(c, _)| *c);
        Some(out)
    }
}

/// Uniform grid on `S¹ = [0, 2π)`.
#[derive(Clone)]
pub struct CircleGrid {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleGrid").field("m", &self.m).finish()
    }
}

/// A loop `S¹ → 𝔊_ℂ` sampled at the points of a [`CircleGrid`].
pub type Loop = Vec<AlgebraElement>;

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::Input(format!("circle grid needs at least 8 points, got {m}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { m, fwd: planner.plan_fft_forward(m), inv: planner.plan_fft_inverse(m) })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.m as f64
    }

    pub fn sample(&self, f: impl Fn(f64) -> AlgebraElement) -> Loop {
        (0..self.m).map(|k| f(self.theta(k))).collect()
    }

    /// `d/dθ` of a sampled periodic function.
    pub fn derivative(&self, f: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        let mut c = f.to_vec();
        self.fwd.process(&mut c);
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= match signed_frequency(k, m) {
                Some(q) => Complex64::new(0.0, q as f64 / m as f64),
                None => ZERO,
            };
        }
        self.inv.process(&mut c);
        c
    }

    pub fn derivative_loop(&self, a: &[AlgebraElement]) -> Result<Loop> {
        let dim = a.first().map(|x| x.dim()).unwrap_or(0);
        if a.len() != self.m {
            return Err(Error::Input(format!("loop has {} samples, grid has {}", a.len(), self.m)));
        }
        let mut out = vec![AlgebraElement::zero(dim); self.m];
        for comp in 0..dim {
            let col: Vec<Complex64> = a.iter().map(|x| x.0[comp]).collect();
            for (k, v) in self.derivative(&col).into_iter().enumerate() {
                out[k].0[comp] = v;
            }
        }
        Ok(out)
    }

    /// `∮ ⟨a, db⟩` evaluated spectrally.
    pub fn circle_pair_integral(&self, alg: &StructureAlgebra, a: &[AlgebraElement], b: &[AlgebraElement]) -> Result<Complex64> {
        if a.len() != self.m || b.len() != self.m {
            return Err(Error::Input(format!(
                "loop lengths {} and {} do not match circle grid {}",
                a.len(),
                b.len(),
                self.m
            )));
        }
        let db = self.derivative_loop(b)?;
        let mut acc = ZERO;
        for (x, y) in a.iter().zip(&db) {
            acc += alg.inner(x, y)?;
        }
        Ok(acc * (2.0 * PI / self.m as f64))
    }
}
