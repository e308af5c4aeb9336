//! The current algebra `𝔊^X_ℂ` of a flat torus: pointwise bracket, the L²
//! product, vector-field action and the central terms built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{CircleGrid, Cycle, CutScalar, Direction, SawPower, ScalarGrid, TorusGrid};
use crate::lie::{AlgebraElement, StructureAlgebra};
use crate::rng::Lcg;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Sign with which each cycle's boundary term enters [`CurrentAlgebra::ef_central_rhs`].
///
/// Cutting the torus along both cycles leaves a parallelogram whose boundary
/// traverses `γ2` with the orientation of the dual crossing and `γ1` against it.
pub fn boundary_sign(cycle: Cycle) -> f64 {
    match cycle {
        Cycle::Gamma1 => -1.0,
        Cycle::Gamma2 => 1.0,
    }
}

/// A `𝔊_ℂ`-valued function on the (possibly cut) torus, one [`CutScalar`]
/// per basis direction of the fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentField {
    components: Vec<CutScalar>,
}

impl CurrentField {
    pub fn new(components: Vec<CutScalar>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Input("current field needs at least one component".into()));
        }
        let n = components[0].n();
        if components.iter().any(|c| c.n() != n) {
            return Err(Error::Input("components sampled on different grids".into()));
        }
        Ok(Self { components })
    }

    pub fn from_smooth(components: Vec<ScalarGrid>) -> Result<Self> {
        Self::new(components.into_iter().map(CutScalar::smooth).collect())
    }

    pub fn constant(grid: &TorusGrid, x: &AlgebraElement) -> Self {
        Self { components: x.0.iter().map(|&c| grid.constant(c).into()).collect() }
    }

    pub fn zero(grid: &TorusGrid, dim: usize) -> Self {
        Self::constant(grid, &AlgebraElement::zero(dim))
    }

    /// `e · s(x, y)` for a scalar profile `s`.
    pub fn times_scalar(x: &AlgebraElement, s: &ScalarGrid) -> Self {
        Self { components: x.0.iter().map(|&c| s.scale(c).into()).collect() }
    }

    /// Random trigonometric polynomial with frequencies `max(|p|, |q|) ≤ bandwidth`.
    /// The coefficients depend only on the stream, not on the grid size, so
    /// the same seed gives the same field at every resolution.
    pub fn random(grid: &TorusGrid, rng: &mut Lcg, dim: usize, bandwidth: usize) -> Result<Self> {
        let comps = (0..dim).map(|_| random_scalar(grid, rng, bandwidth)).collect::<Result<Vec<_>>>()?;
        Self::from_smooth(comps)
    }

    /// As [`CurrentField::random`], keeping only the real part (a field in the real form).
    pub fn random_real(grid: &TorusGrid, rng: &mut Lcg, dim: usize, bandwidth: usize) -> Result<Self> {
        Ok(Self::random(grid, rng, dim, bandwidth)?.real_part())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn n(&self) -> usize {
        self.components[0].n()
    }

    pub fn components(&self) -> &[CutScalar] {
        &self.components
    }

    pub fn bandwidth(&self) -> usize {
        self.components.iter().map(CutScalar::bandwidth).max().unwrap_or(0)
    }

    pub fn is_smooth(&self) -> bool {
        self.components.iter().all(CutScalar::is_smooth)
    }

    /// Smooth component grids, if the field has no jumps.
    pub fn smooth_components(&self) -> Option<Vec<&ScalarGrid>> {
        self.components.iter().map(CutScalar::as_smooth).collect()
    }

    fn map(&self, f: impl Fn(&CutScalar) -> CutScalar) -> Self {
        Self { components: self.components.iter().map(f).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(&CutScalar, &CutScalar) -> CutScalar) -> Result<Self> {
        if self.dim() != other.dim() || self.n() != other.n() {
            return Err(Error::Input("current fields do not share grid and algebra".into()));
        }
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect() })
    }

    /// Fiberwise complex conjugation of the coefficients.
    pub fn conj(&self) -> Self {
        self.map(CutScalar::conj)
    }

    pub fn real_part(&self) -> Self {
        self.map(|c| c.add(&c.conj()).scale(re(0.5)))
    }

    pub fn imag_part(&self) -> Self {
        self.map(|c| c.sub(&c.conj()).scale(Complex64::new(0.0, -0.5)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, CutScalar::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, CutScalar::sub)
    }

    /// Fiber element at sample `(i, j)` of the cut domain.
    pub fn sample_at(&self, grid: &TorusGrid, i: usize, j: usize) -> AlgebraElement {
        AlgebraElement(self.components.iter().map(|c| c.samples(grid).at(i, j)).collect())
    }

    pub fn max_abs(&self, grid: &TorusGrid) -> f64 {
        self.components.iter().map(|c| c.samples(grid).max_abs()).fold(0.0, f64::max)
    }
}

/// Random band-limited scalar with coefficients drawn in a fixed frequency
/// order, scaled by `1/(2·bandwidth + 1)` so samples stay of order one.
pub fn random_scalar(grid: &TorusGrid, rng: &mut Lcg, bandwidth: usize) -> Result<ScalarGrid> {
    let bw = bandwidth as i64;
    let norm = 1.0 / (2 * bw + 1) as f64;
    let mut coeffs = Vec::new();
    for p in -bw..=bw {
        for q in -bw..=bw {
            coeffs.push(((p, q), rng.complex() * norm));
        }
    }
    grid.trig_polynomial(&coeffs)
}

/// `f ∂/∂x + g ∂/∂y` with complex, possibly cut, coefficient functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVectorField {
    pub f: CutScalar,
    pub g: CutScalar,
}

impl ComplexVectorField {
    pub fn new(f: impl Into<CutScalar>, g: impl Into<CutScalar>) -> Self {
        Self { f: f.into(), g: g.into() }
    }

    pub fn d_dx(grid: &TorusGrid) -> Self {
        Self::new(grid.constant(re(1.0)), grid.zeros())
    }

    pub fn d_dy(grid: &TorusGrid) -> Self {
        Self::new(grid.zeros(), grid.constant(re(1.0)))
    }

    pub fn zero(grid: &TorusGrid) -> Self {
        Self::new(grid.zeros(), grid.zeros())
    }

    pub fn random(grid: &TorusGrid, rng: &mut Lcg, bandwidth: usize) -> Result<Self> {
        Ok(Self::new(random_scalar(grid, rng, bandwidth)?, random_scalar(grid, rng, bandwidth)?))
    }

    pub fn random_real(grid: &TorusGrid, rng: &mut Lcg, bandwidth: usize) -> Result<Self> {
        Ok(Self::random(grid, rng, bandwidth)?.real_part())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { f: self.f.scale(s), g: self.g.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { f: self.f.add(&other.f), g: self.g.add(&other.g) }
    }

    pub fn conj(&self) -> Self {
        Self { f: self.f.conj(), g: self.g.conj() }
    }

    pub fn real_part(&self) -> Self {
        self.add(&self.conj()).scale(re(0.5))
    }

    pub fn imag_part(&self) -> Self {
        let diff = Self { f: self.f.sub(&self.f.conj()), g: self.g.sub(&self.g.conj()) };
        diff.scale(Complex64::new(0.0, -0.5))
    }

    /// `Z1 + i Z2`.
    pub fn complexify(z1: &Self, z2: &Self) -> Self {
        z1.add(&z2.scale(I))
    }

    /// Constant jumps of the coefficients across the cuts, summed over `f` and `g`.
    pub fn jumps(&self) -> Option<Vec<(Cycle, Complex64, Complex64)>> {
        let jf = self.f.constant_jumps()?;
        let jg = self.g.constant_jumps()?;
        let mut out = Vec::new();
        for cycle in [Cycle::Gamma1, Cycle::Gamma2] {
            let a = jf.iter().find(|(c, _)| *c == cycle).map(|x| x.1).unwrap_or(ZERO);
            let b = jg.iter().find(|(c, _)| *c == cycle).map(|x| x.1).unwrap_or(ZERO);
            if a != ZERO || b != ZERO {
                out.push((cycle, a, b));
            }
        }
        Some(out)
    }
}

/// Multivalued primitive `φ(P) = ∫_{P0}^P α` of a constant one-form, single
/// valued on the cut domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CutFunction {
    pub phi: CutScalar,
    /// `(γ_j, −ĉ_j)`: change of `φ` when crossing `γ_j` along its dual cycle.
    pub jump_per_cut: [(Cycle, Complex64); 2],
    pub basepoint: (usize, usize),
    pub alpha: (Complex64, Complex64),
}

impl CutFunction {
    pub fn smooth_part(&self, grid: &TorusGrid) -> ScalarGrid {
        self.phi.samples(grid)
    }

    pub fn jump(&self, cycle: Cycle) -> Complex64 {
        self.jump_per_cut.iter().find(|(c, _)| *c == cycle).map(|x| x.1).unwrap_or(ZERO)
    }
}

/// Periods `(c1, c2) = (∫_{γ1} α, ∫_{γ2} α)` of `α = αx dx + αy dy`.
pub fn constant_form_periods(grid: &TorusGrid, alpha_x: Complex64, alpha_y: Complex64) -> (Complex64, Complex64) {
    let tau = grid.tau();
    (alpha_x, alpha_x * tau.re + alpha_y * tau.im)
}

/// The hat swap `ĉ_j = c_{j+g}`, `ĉ_{j+g} = c_j` on a period vector of length `2g`.
pub fn hat_swap(periods: &[Complex64]) -> Result<Vec<Complex64>> {
    if !periods.len().is_multiple_of(2) || periods.is_empty() {
        return Err(Error::Input(format!("period vector must have even nonzero length, got {}", periods.len())));
    }
    let g = periods.len() / 2;
    Ok((0..2 * g).map(|j| periods[(j + g) % (2 * g)]).collect())
}

/// Central charges `−ĉ_j` carried by the boundary modules of the torus, zero
/// charges omitted.
pub fn required_charges(c1: Complex64, c2: Complex64) -> Vec<(Cycle, Complex64)> {
    let hat = [c2, c1];
    [Cycle::Gamma1, Cycle::Gamma2]
        .into_iter()
        .zip(hat)
        .filter(|(_, h)| *h != ZERO)
        .map(|(c, h)| (c, -h))
        .collect()
}

/// `∮ ⟨a, db⟩` on the circle.
pub fn loop_cocycle(alg: &StructureAlgebra, circle: &CircleGrid, a: &[AlgebraElement], b: &[AlgebraElement]) -> Result<Complex64> {
    circle.circle_pair_integral(alg, a, b)
}

/// Random band-limited loop with Fourier modes `|k| ≤ bandwidth`.
pub fn random_loop(circle: &CircleGrid, rng: &mut Lcg, dim: usize, bandwidth: usize) -> Vec<AlgebraElement> {
    let bw = bandwidth as i64;
    let coeffs: Vec<Vec<Complex64>> = (0..dim).map(|_| (-bw..=bw).map(|_| rng.complex()).collect()).collect();
    circle.sample(|t| {
        AlgebraElement(
            coeffs
                .iter()
                .map(|cs| cs.iter().zip(-bw..=bw).map(|(c, k)| c * Complex64::from_polar(1.0, k as f64 * t)).sum())
                .collect(),
        )
    })
}

/// A torus grid paired with a fiber algebra: the setting for every operation
/// on [`CurrentField`]s.
#[derive(Clone, Debug)]
pub struct CurrentAlgebra {
    pub grid: TorusGrid,
    pub alg: StructureAlgebra,
}

impl CurrentAlgebra {
    pub fn new(grid: TorusGrid, alg: StructureAlgebra) -> Self {
        Self { grid, alg }
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    fn check(&self, a: &CurrentField) -> Result<()> {
        if a.dim() != self.alg.dim() {
            return Err(Error::Input(format!("field has {} components, algebra dimension {}", a.dim(), self.alg.dim())));
        }
        if a.n() != self.grid.n() {
            return Err(Error::Input(format!("field sampled on n = {}, grid has n = {}", a.n(), self.grid.n())));
        }
        Ok(())
    }

    fn check_vf(&self, v: &ComplexVectorField) -> Result<()> {
        if v.f.n() != self.grid.n() || v.g.n() != self.grid.n() {
            return Err(Error::Input("vector field sampled on a different grid".into()));
        }
        Ok(())
    }

    pub fn random_field(&self, rng: &mut Lcg, bandwidth: usize) -> Result<CurrentField> {
        CurrentField::random(&self.grid, rng, self.dim(), bandwidth)
    }

    pub fn random_real_field(&self, rng: &mut Lcg, bandwidth: usize) -> Result<CurrentField> {
        CurrentField::random_real(&self.grid, rng, self.dim(), bandwidth)
    }

    /// `[a, b](x) = [a(x), b(x)]`.
    pub fn pointwise_bracket(&self, a: &CurrentField, b: &CurrentField) -> Result<CurrentField> {
        self.check(a)?;
        self.check(b)?;
        let d = self.dim();
        let mut out: Vec<Option<CutScalar>> = vec![None; d];
        for (i, j, k, v) in self.alg.nonzero_constants() {
            if i >= j {
                continue;
            }
            let term = a.components[i].mul(&b.components[j])?.sub(&a.components[j].mul(&b.components[i])?).scale(re(v));
            out[k] = Some(match out[k].take() {
                Some(acc) => acc.add(&term),
                None => term,
            });
        }
        let zero: CutScalar = self.grid.zeros().into();
        CurrentField::new(out.into_iter().map(|c| c.unwrap_or_else(|| zero.clone())).collect())
    }

    /// Fiber pairing `⟨a(x), b(x)⟩` as a scalar function, bilinear.
    pub fn pointwise_inner(&self, a: &CurrentField, b: &CurrentField) -> Result<CutScalar> {
        self.check(a)?;
        self.check(b)?;
        let d = self.dim();
        let mut acc: CutScalar = self.grid.zeros().into();
        for i in 0..d {
            for j in 0..d {
                let g = self.alg.gram(i, j);
                if g != 0.0 {
                    acc = acc.add(&a.components[i].mul(&b.components[j])?.scale(re(g)));
                }
            }
        }
        Ok(acc)
    }

    /// `(a, b) = ∫_X ⟨ā(x), b(x)⟩ dμ`.
    pub fn l2_inner(&self, a: &CurrentField, b: &CurrentField) -> Result<Complex64> {
        Ok(self.pointwise_inner(&a.conj(), b)?.integrate(&self.grid))
    }

    pub fn derivative(&self, a: &CurrentField, dir: Direction) -> Result<CurrentField> {
        self.check(a)?;
        Ok(a.map(|c| c.derivative(&self.grid, dir)))
    }

    /// `(V a)(x) = f ∂a/∂x + g ∂a/∂y`.
    pub fn apply_field(&self, v: &ComplexVectorField, a: &CurrentField) -> Result<CurrentField> {
        self.check(a)?;
        self.check_vf(v)?;
        let comps = a
            .components
            .iter()
            .map(|c| {
                let dx = c.derivative(&self.grid, Direction::X);
                let dy = c.derivative(&self.grid, Direction::Y);
                Ok(v.f.mul(&dx)?.add(&v.g.mul(&dy)?))
            })
            .collect::<Result<Vec<_>>>()?;
        CurrentField::new(comps)
    }

    /// `−2i[(Z1 b, Z2 a) − (Z1 a, Z2 b)]` for real `Z1`, `Z2`, `a`, `b`.
    pub fn cocycle_real(&self, z1: &ComplexVectorField, z2: &ComplexVectorField, a: &CurrentField, b: &CurrentField) -> Result<Complex64> {
        let t1 = self.l2_inner(&self.apply_field(z1, b)?, &self.apply_field(z2, a)?)?;
        let t2 = self.l2_inner(&self.apply_field(z1, a)?, &self.apply_field(z2, b)?)?;
        Ok(Complex64::new(0.0, -2.0) * (t1 - t2))
    }

    /// `−2i[(Z1 b̄, Z2 a) − (Z1 ā, Z2 b)]`.
    pub fn cocycle_complex(&self, z1: &ComplexVectorField, z2: &ComplexVectorField, a: &CurrentField, b: &CurrentField) -> Result<Complex64> {
        let t1 = self.l2_inner(&self.apply_field(z1, &b.conj())?, &self.apply_field(z2, a)?)?;
        let t2 = self.l2_inner(&self.apply_field(z1, &a.conj())?, &self.apply_field(z2, b)?)?;
        Ok(Complex64::new(0.0, -2.0) * (t1 - t2))
    }

    /// `(Y^L b̄, Y^R a) − (Y^L ā, Y^R b)`. Linear in both `a` and `b`.
    pub fn cocycle_two_fields(&self, yl: &ComplexVectorField, yr: &ComplexVectorField, a: &CurrentField, b: &CurrentField) -> Result<Complex64> {
        let t1 = self.l2_inner(&self.apply_field(yl, &b.conj())?, &self.apply_field(yr, a)?)?;
        let t2 = self.l2_inner(&self.apply_field(yl, &a.conj())?, &self.apply_field(yr, b)?)?;
        Ok(t1 - t2)
    }

    /// Components `(⟨a, ∂x b⟩, ⟨a, ∂y b⟩)` of the one-form `⟨a, db⟩`.
    pub fn pair_form(&self, a: &CurrentField, b: &CurrentField) -> Result<(CutScalar, CutScalar)> {
        let bx = self.derivative(b, Direction::X)?;
        let by = self.derivative(b, Direction::Y)?;
        Ok((self.pointwise_inner(a, &bx)?, self.pointwise_inner(a, &by)?))
    }

    /// `Ω(a, b)(α) = ∫_X ⟨a, db⟩ ∧ α` for `α = αx dx + αy dy`.
    pub fn omega_ef(&self, a: &CurrentField, b: &CurrentField, alpha_x: Complex64, alpha_y: Complex64) -> Result<Complex64> {
        let (wx, wy) = self.pair_form(a, b)?;
        Ok(wx.scale(alpha_y).sub(&wy.scale(alpha_x)).integrate(&self.grid))
    }

    /// `∫_{γ} ⟨a, db⟩` along the cut line of `cycle`; needs smooth fields.
    pub fn pair_cycle_integral(&self, a: &CurrentField, b: &CurrentField, cycle: Cycle) -> Result<Complex64> {
        let (wx, wy) = self.pair_form(a, b)?;
        match (wx.as_smooth(), wy.as_smooth()) {
            (Some(x), Some(y)) => Ok(self.grid.cycle_integral(x, y, cycle)),
            _ => Err(Error::Input("cycle integrals need fields without jumps".into())),
        }
    }

    /// `∫_X ⟨a, db⟩ ∧ α + Σ_j σ_j ĉ_j ∫_{γ_j} ⟨a, db⟩` with `σ_j` from [`boundary_sign`]
    /// and `(c1, c2)` the periods of `α`.
    pub fn ef_central_rhs(
        &self,
        a: &CurrentField,
        b: &CurrentField,
        alpha_x: Complex64,
        alpha_y: Complex64,
        c_periods: (Complex64, Complex64),
    ) -> Result<Complex64> {
        let mut total = self.omega_ef(a, b, alpha_x, alpha_y)?;
        let hat = [(Cycle::Gamma1, c_periods.1), (Cycle::Gamma2, c_periods.0)];
        for (cycle, h) in hat {
            if h != ZERO {
                total += h * boundary_sign(cycle) * self.pair_cycle_integral(a, b, cycle)?;
            }
        }
        Ok(total)
    }

    /// `f1 g2 − f2 g1`.
    pub fn hodge_phi(&self, w1: &ComplexVectorField, w2: &ComplexVectorField) -> Result<CutScalar> {
        self.check_vf(w1)?;
        self.check_vf(w2)?;
        Ok(w1.f.mul(&w2.g)?.sub(&w2.f.mul(&w1.g)?))
    }

    /// `φ(P) = ∫_{P0}^P α` on the cut domain, `α = αx dx + αy dy`.
    pub fn build_phi(&self, alpha_x: Complex64, alpha_y: Complex64, p0: (usize, usize)) -> Result<CutFunction> {
        let g = &self.grid;
        let (i0, j0) = p0;
        if i0 >= g.n() || j0 >= g.n() {
            return Err(Error::Input(format!("basepoint ({i0}, {j0}) outside the grid")));
        }
        if i0 == g.cut_index(Cycle::Gamma2) || j0 == g.cut_index(Cycle::Gamma1) {
            return Err(Error::Input(format!("basepoint ({i0}, {j0}) lies on a cut")));
        }
        let (c1, c2) = constant_form_periods(g, alpha_x, alpha_y);
        let offset = -(c1 * g.saw(Cycle::Gamma2, i0) + c2 * g.saw(Cycle::Gamma1, j0));
        let phi = CutScalar::from_terms(vec![
            (SawPower::SMOOTH, g.constant(offset)),
            (SawPower { u: 1, v: 0 }, g.constant(c1)),
            (SawPower { u: 0, v: 1 }, g.constant(c2)),
        ])?;
        Ok(CutFunction {
            phi,
            jump_per_cut: [(Cycle::Gamma1, -c2), (Cycle::Gamma2, -c1)],
            basepoint: p0,
            alpha: (alpha_x, alpha_y),
        })
    }

    /// Gauge `Y^L = ∂/∂y`, `Y^R = φ ∂/∂x`; returns `(Y^L, Y^R)`.
    pub fn fields_from_phi(&self, phi: &CutFunction) -> (ComplexVectorField, ComplexVectorField) {
        let g = &self.grid;
        let yl = ComplexVectorField::d_dy(g);
        let yr = ComplexVectorField { f: phi.phi.clone(), g: g.zeros().into() };
        (yl, yr)
    }

    /// Gauge `Y^L = −∂/∂x`, `Y^R = φ ∂/∂y`, with the same `f^R ḡ^L − f̄^L g^R`.
    pub fn fields_from_phi_alt(&self, phi: &CutFunction) -> (ComplexVectorField, ComplexVectorField) {
        let g = &self.grid;
        let yl = ComplexVectorField::d_dx(g).scale(re(-1.0));
        let yr = ComplexVectorField { f: g.zeros().into(), g: phi.phi.clone() };
        (yl, yr)
    }

    /// `f^R ḡ^L − f̄^L g^R`.
    pub fn phi_of_fields(&self, yl: &ComplexVectorField, yr: &ComplexVectorField) -> Result<CutScalar> {
        Ok(yr.f.mul(&yl.g.conj())?.sub(&yl.f.conj().mul(&yr.g)?))
    }

    /// Sup norm of `(∂x + i∂y) f` on the cut domain.
    pub fn cauchy_riemann_residual(&self, f: &CutScalar) -> f64 {
        let dx = f.derivative(&self.grid, Direction::X);
        let dy = f.derivative(&self.grid, Direction::Y);
        dx.add(&dy.scale(I)).samples(&self.grid).max_abs()
    }

    /// Sup norm of `[[a,b],c] + [[b,c],a] + [[c,a],b]`.
    pub fn jacobi_residual(&self, a: &CurrentField, b: &CurrentField, c: &CurrentField) -> Result<f64> {
        let t1 = self.pointwise_bracket(&self.pointwise_bracket(a, b)?, c)?;
        let t2 = self.pointwise_bracket(&self.pointwise_bracket(b, c)?, a)?;
        let t3 = self.pointwise_bracket(&self.pointwise_bracket(c, a)?, b)?;
        Ok(t1.add(&t2)?.add(&t3)?.max_abs(&self.grid))
    }

    /// `|c([a,b],c) + c([c,a],b) + c([b,c],a)|` for a central term `cocycle`.
    pub fn cocycle_condition_residual(
        &self,
        cocycle: impl Fn(&CurrentField, &CurrentField) -> Result<Complex64>,
        a: &CurrentField,
        b: &CurrentField,
        c: &CurrentField,
    ) -> Result<f64> {
        let s = cocycle(&self.pointwise_bracket(a, b)?, c)?
            + cocycle(&self.pointwise_bracket(c, a)?, b)?
            + cocycle(&self.pointwise_bracket(b, c)?, a)?;
        Ok(s.norm())
    }
}
