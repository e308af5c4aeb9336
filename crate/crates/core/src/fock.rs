//! Truncated bosonic Fock space over a finite set of Fourier modes of
//! `L²(X; 𝔊_ℂ)`, and the representation operators built from creation,
//! annihilation and second quantization.
//!
//! States use the normalized occupation basis: a basis vector is a sorted
//! multiset of mode indices, `b_i*` raises `n_i` with weight `√(n_i + 1)` and
//! `b_i` lowers it with weight `√n_i`, so `[B(a), B*(b)] = (a, b)`.
//!
//! Modes are `e_k · exp(2πi(p u + q v)) / √area` with `max(|p|, |q|) ≤ shell`.
//! A [`FockSpace`] carries an inner shell, from which test states are built,
//! inside an outer shell two frequencies wider, so that every intermediate
//! state of a two-operator identity stays inside the mode set.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use sprs::{CsMat, TriMat};

use crate::current::{ComplexVectorField, CurrentAlgebra, CurrentField};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::lie::AlgebraElement;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Relative size below which projected coefficients are treated as FFT noise.
const PRUNE: f64 = 1e-15;
/// Largest tolerated escape of `[a, mode]` from the mode set on interior modes.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Occupation multiset: sorted mode indices, repeated by occupation number.
pub type Key = SmallVec<[u16; 8]>;

/// Orthonormal Fourier modes `e_k · exp(2πi(p u + q v)) / √area`.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    dim: usize,
    shell: usize,
    area: f64,
    modes: Vec<(usize, i64, i64)>,
    index: HashMap<(usize, i64, i64), usize>,
}

impl ModeBasis {
    pub fn new(dim: usize, shell: usize, area: f64) -> Self {
        let s = shell as i64;
        let mut modes = Vec::new();
        for p in -s..=s {
            for q in -s..=s {
                for k in 0..dim {
                    modes.push((k, p, q));
                }
            }
        }
        let index = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self { dim, shell, area, modes, index }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn shell(&self) -> usize {
        self.shell
    }

    /// `(fiber index, p, q)` of mode `j`.
    pub fn mode(&self, j: usize) -> (usize, i64, i64) {
        self.modes[j]
    }

    pub fn index_of(&self, k: usize, p: i64, q: i64) -> Option<usize> {
        self.index.get(&(k, p, q)).copied()
    }

    /// `max(|p|, |q|)` of mode `j`.
    pub fn frequency(&self, j: usize) -> usize {
        let (_, p, q) = self.modes[j];
        p.unsigned_abs().max(q.unsigned_abs()) as usize
    }

    pub fn field(&self, grid: &TorusGrid, j: usize) -> Result<CurrentField> {
        let (k, p, q) = self.modes[j];
        let wave = grid.trig_polynomial(&[((p, q), Complex64::new(1.0 / self.area.sqrt(), 0.0))])?;
        Ok(CurrentField::times_scalar(&AlgebraElement::basis(self.dim, k), &wave))
    }

    /// Coefficients `(mode_j, F)` from the DFT of a smooth field.
    pub fn project_smooth(&self, grid: &TorusGrid, field: &CurrentField) -> Result<Projection> {
        let comps = field
            .smooth_components()
            .ok_or_else(|| Error::Input("spectral projection needs a field without jumps".into()))?;
        let n = grid.n() as i64;
        let mut coeffs = vec![ZERO; self.len()];
        let mut escaped = 0.0;
        let scale = self.area.sqrt();
        for (k, g) in comps.iter().enumerate() {
            let spec = grid.fft(g);
            for (bin, c) in spec.iter().enumerate() {
                let (kk, ll) = ((bin as i64) % n, (bin as i64) / n);
                let p = if kk > n / 2 { kk - n } else { kk };
                let q = if ll > n / 2 { ll - n } else { ll };
                match self.index_of(k, p, q) {
                    Some(j) => coeffs[j] = c * scale,
                    None => escaped += c.norm_sqr() * self.area,
                }
            }
        }
        Ok(Projection::pruned(coeffs, escaped.sqrt()))
    }

    /// Coefficients `(mode_j, F)` by exact integration on the cut domain.
    pub fn project_exact(&self, grid: &TorusGrid, field: &CurrentField) -> Result<Projection> {
        let mut coeffs = vec![ZERO; self.len()];
        let s = self.shell as i64;
        let scale = 1.0 / self.area.sqrt();
        let mut norm2 = 0.0;
        for (k, comp) in field.components().iter().enumerate() {
            norm2 += comp.conj().mul(comp)?.integrate(grid).re;
            for p in -s..=s {
                for q in -s..=s {
                    let wave = grid.trig_polynomial(&[((-p, -q), Complex64::new(scale, 0.0))])?;
                    let j = self.index_of(k, p, q).expect("mode within shell");
                    coeffs[j] = comp.mul_smooth(&wave).integrate(grid);
                }
            }
        }
        let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Ok(Projection::pruned(coeffs, (norm2 - captured).max(0.0).sqrt()))
    }

    /// Spectral projection for smooth fields, exact integration otherwise.
    pub fn project(&self, grid: &TorusGrid, field: &CurrentField) -> Result<Projection> {
        if field.dim() != self.dim {
            return Err(Error::Input(format!("field dimension {} differs from mode fiber {}", field.dim(), self.dim)));
        }
        if field.is_smooth() {
            self.project_smooth(grid, field)
        } else {
            self.project_exact(grid, field)
        }
    }
}

/// Mode coefficients of a field plus the L² norm of what the mode set misses.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coeffs: Vec<Complex64>,
    pub residual: f64,
}

impl Projection {
    fn pruned(mut coeffs: Vec<Complex64>, residual: f64) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for c in coeffs.iter_mut() {
            if c.norm() <= PRUNE * max {
                *c = ZERO;
            }
        }
        Self { coeffs, residual }
    }

    fn nonzero(&self) -> Vec<(u16, Complex64)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(|(i, c)| (i as u16, *c)).collect()
    }
}

/// Sparse vector in the occupation basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockState {
    pub amps: BTreeMap<Key, Complex64>,
}

impl FockState {
    pub fn vacuum() -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(Key::new(), Complex64::new(1.0, 0.0));
        Self { amps }
    }

    pub fn basis(key: Key) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(key, Complex64::new(1.0, 0.0));
        Self { amps }
    }

    /// `Σ c_i |e_i⟩`.
    pub fn one_particle(coeffs: &[Complex64]) -> Self {
        let mut s = Self::default();
        for (i, c) in coeffs.iter().enumerate() {
            if *c != ZERO {
                s.amps.insert(Key::from_slice(&[i as u16]), *c);
            }
        }
        s
    }

    fn add_to(&mut self, key: Key, v: Complex64) {
        *self.amps.entry(key).or_insert(ZERO) += v;
    }

    pub fn amplitude(&self, key: &[u16]) -> Complex64 {
        self.amps.get(key).copied().unwrap_or(ZERO)
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().map(|(k, v)| v.conj() * other.amplitude(k)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.amps {
            out.add_to(k.clone(), *v);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { amps: self.amps.iter().map(|(k, v)| (k.clone(), v * s)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn occupancy(key: &[u16], i: u16) -> usize {
    key.iter().filter(|&&x| x == i).count()
}

fn without(key: &[u16], j: u16) -> Key {
    let mut k: Key = key.into();
    let pos = k.iter().position(|&x| x == j).expect("mode present");
    k.remove(pos);
    k
}

fn with(key: &[u16], i: u16) -> Key {
    let mut k: Key = key.into();
    let pos = k.partition_point(|&x| x <= i);
    k.insert(pos, i);
    k
}

fn distinct(key: &[u16]) -> impl Iterator<Item = (u16, usize)> + '_ {
    let mut idx = 0;
    std::iter::from_fn(move || {
        if idx >= key.len() {
            return None;
        }
        let m = key[idx];
        let start = idx;
        while idx < key.len() && key[idx] == m {
            idx += 1;
        }
        Some((m, idx - start))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Creation,
    Annihilation,
    L0,
    LZ,
    LY,
    LTwo,
    Combination,
}

/// `s·Id + dΓ(A) + Σ u_i b_i* + Σ v_i b_i`, the span closed under the
/// operations used here. `A` is stored by columns.
#[derive(Clone, Debug)]
pub struct FockOperator {
    pub kind: OperatorKind,
    modes: usize,
    scalar: Complex64,
    one_body: Vec<Vec<(u16, Complex64)>>,
    create: Vec<(u16, Complex64)>,
    annihilate: Vec<(u16, Complex64)>,
    /// Largest L² residual of a vector-field image outside the mode set.
    pub projection_residual: f64,
    /// Largest escape of `[a, mode]` from the mode set on interior modes.
    pub closure_residual: f64,
}

impl FockOperator {
    pub fn zero(modes: usize) -> Self {
        Self {
            kind: OperatorKind::Combination,
            modes,
            scalar: ZERO,
            one_body: vec![Vec::new(); modes],
            create: Vec::new(),
            annihilate: Vec::new(),
            projection_residual: 0.0,
            closure_residual: 0.0,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `B*(u) = Σ u_i b_i*`.
    pub fn creation_from(modes: usize, u: &Projection) -> Self {
        Self {
            kind: OperatorKind::Creation,
            create: u.nonzero(),
            projection_residual: u.residual,
            ..Self::zero(modes)
        }
    }

    /// `B(w) = Σ conj(w_i) b_i`, conjugate-linear in `w`.
    pub fn annihilation_from(modes: usize, w: &Projection) -> Self {
        Self {
            kind: OperatorKind::Annihilation,
            annihilate: w.nonzero().into_iter().map(|(i, c)| (i, c.conj())).collect(),
            projection_residual: w.residual,
            ..Self::zero(modes)
        }
    }

    pub fn identity(modes: usize, s: Complex64) -> Self {
        Self { scalar: s, ..Self::zero(modes) }
    }

    fn merge(list: &mut Vec<(u16, Complex64)>, other: &[(u16, Complex64)], s: Complex64) {
        for &(i, c) in other {
            match list.iter_mut().find(|(j, _)| *j == i) {
                Some((_, v)) => *v += c * s,
                None => list.push((i, c * s)),
            }
        }
        list.sort_by_key(|(i, _)| *i);
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: Complex64, other: &Self) -> Self {
        assert_eq!(self.modes, other.modes, "operators act on different mode sets");
        let mut out = self.clone();
        out.kind = OperatorKind::Combination;
        out.scalar += s * other.scalar;
        for (col, oc) in out.one_body.iter_mut().zip(&other.one_body) {
            Self::merge(col, oc, s);
        }
        Self::merge(&mut out.create, &other.create, s);
        Self::merge(&mut out.annihilate, &other.annihilate, s);
        out.projection_residual = self.projection_residual.max(other.projection_residual);
        out.closure_residual = self.closure_residual.max(other.closure_residual);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::zero(self.modes).axpy(s, self)
    }

    fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }

    /// Apply to a sparse state, discarding components above `cutoff` particles.
    pub fn apply(&self, state: &FockState, cutoff: usize) -> FockState {
        self.apply_below(state, cutoff, usize::MAX)
    }

    /// [`apply`](Self::apply) keeping only output components with at most
    /// `keep` particles; terms that could only land above `keep` are skipped.
    pub fn apply_below(&self, state: &FockState, cutoff: usize, keep: usize) -> FockState {
        let mut out = FockState::default();
        for (key, &amp) in &state.amps {
            if amp == ZERO || key.len() > keep.saturating_add(1) {
                continue;
            }
            let conserving = key.len() <= keep;
            if self.scalar != ZERO && conserving {
                out.add_to(key.clone(), self.scalar * amp);
            }
            for (j, nj) in distinct(key).filter(|_| conserving) {
                let col = &self.one_body[j as usize];
                if col.is_empty() {
                    continue;
                }
                let rest = without(key, j);
                let wj = (nj as f64).sqrt();
                for &(i, a) in col {
                    let ni = occupancy(&rest, i);
                    out.add_to(with(&rest, i), a * amp * (wj * ((ni + 1) as f64).sqrt()));
                }
            }
            if key.len() < cutoff.min(keep) {
                for &(i, u) in &self.create {
                    let ni = occupancy(key, i);
                    out.add_to(with(key, i), u * amp * ((ni + 1) as f64).sqrt());
                }
            }
            for (j, nj) in distinct(key) {
                if let Ok(pos) = self.annihilate.binary_search_by_key(&j, |(i, _)| *i) {
                    let v = self.annihilate[pos].1;
                    out.add_to(without(key, j), v * amp * (nj as f64).sqrt());
                }
            }
        }
        out
    }

    /// Matrix of the operator compressed to `basis`.
    pub fn to_csr(&self, basis: &FockBasis) -> CsMat<Complex64> {
        let d = basis.dim();
        let mut tri = TriMat::new((d, d));
        for (col, key) in basis.keys().iter().enumerate() {
            let image = self.apply(&FockState::basis(key.clone()), basis.cutoff());
            for (k, v) in image.amps {
                if let Some(row) = basis.index_of(&k) {
                    if v != ZERO {
                        tri.add_triplet(row, col, v);
                    }
                }
            }
        }
        tri.to_csr()
    }
}

/// Explicit enumeration of occupation states over a set of modes.
///
/// States are ordered by particle number, then lexicographically by their
/// sorted mode multiset.
#[derive(Clone, Debug)]
pub struct FockBasis {
    cutoff: usize,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl FockBasis {
    /// All states over modes `0..m` with at most `cutoff` particles.
    pub fn new(m: usize, cutoff: usize) -> Self {
        Self::over_modes(&(0..m as u16).collect::<Vec<_>>(), cutoff)
    }

    /// All states over the given modes with at most `cutoff` particles.
    pub fn over_modes(modes: &[u16], cutoff: usize) -> Self {
        let mut sorted = modes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut keys: Vec<Key> = vec![Key::new()];
        let mut layer: Vec<(Key, usize)> = vec![(Key::new(), 0)];
        for _ in 0..cutoff {
            let mut next = Vec::new();
            for (key, start) in &layer {
                for (pos, &m) in sorted.iter().enumerate().skip(*start) {
                    let mut k = key.clone();
                    k.push(m);
                    next.push((k, pos));
                }
            }
            keys.extend(next.iter().map(|(k, _)| k.clone()));
            layer = next;
        }
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Self { cutoff, keys, index }
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn index_of(&self, key: &[u16]) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Occupation vector `(n_1, …, n_M)` of state `idx` over modes `0..m`.
    pub fn occupations(&self, idx: usize, m: usize) -> Vec<usize> {
        let mut occ = vec![0; m];
        for &j in &self.keys[idx] {
            occ[j as usize] += 1;
        }
        occ
    }
}

/// `C(n, k)` as f64-safe integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Largest entry of `|M + M^H|`.
pub fn antihermiticity_residual(m: &CsMat<Complex64>) -> f64 {
    hermitian_pair_residual(m, m, 1.0)
}

/// Largest entry of `|A^H − B|`.
pub fn adjoint_residual(a: &CsMat<Complex64>, b: &CsMat<Complex64>) -> f64 {
    hermitian_pair_residual(a, b, -1.0)
}

/// `max |conj(A_ji) + s·B_ij|`.
fn hermitian_pair_residual(a: &CsMat<Complex64>, b: &CsMat<Complex64>, s: f64) -> f64 {
    let mut entries: HashMap<(usize, usize), Complex64> = HashMap::new();
    for (v, (r, c)) in a.iter() {
        *entries.entry((c, r)).or_insert(ZERO) += v.conj();
    }
    for (v, (r, c)) in b.iter() {
        *entries.entry((r, c)).or_insert(ZERO) += v * s;
    }
    entries.values().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|A − B|`.
pub fn difference_max(a: &CsMat<Complex64>, b: &CsMat<Complex64>) -> f64 {
    let mut entries: HashMap<(usize, usize), Complex64> = HashMap::new();
    for (v, (r, c)) in a.iter() {
        *entries.entry((r, c)).or_insert(ZERO) += v;
    }
    for (v, (r, c)) in b.iter() {
        *entries.entry((r, c)).or_insert(ZERO) -= v;
    }
    entries.values().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Scalar part and off-scalar residual of a commutator defect.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Defect {
    pub lambda: Complex64,
    pub residual: f64,
    pub safe_dim: usize,
}

/// JSON layout: `{"M_shell": 1, "P": 4, "algebra": "su2", "seed": 7}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FockConfig {
    #[serde(rename = "M_shell")]
    pub m_shell: usize,
    #[serde(rename = "P")]
    pub p: usize,
    pub algebra: String,
    pub seed: u64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { m_shell: 1, p: 4, algebra: "su2".into(), seed: 0 }
    }
}

impl FockConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.m_shell) {
            return Err(Error::Config(format!("M_shell must be 1 or 2, got {}", self.m_shell)));
        }
        if self.p < 1 {
            return Err(Error::Config("P must be at least 1".into()));
        }
        Ok(())
    }
}

/// Current algebra with an inner/outer mode shell pair and a particle cutoff.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub ca: CurrentAlgebra,
    pub modes: ModeBasis,
    pub inner_shell: usize,
    pub cutoff: usize,
    /// `(k, i, k', c)` grouped by the middle index: `[e_i, e_k] ∋ c·e_k'`.
    by_second: Vec<Vec<(usize, usize, f64)>>,
}

impl FockSpace {
    pub fn new(ca: CurrentAlgebra, inner_shell: usize, cutoff: usize) -> Result<Self> {
        if !ca.alg.has_identity_gram() {
            return Err(Error::Config("Fock modes need an algebra with identity Gram matrix".into()));
        }
        let outer = inner_shell + 2;
        if outer > ca.grid.max_bandwidth() {
            return Err(Error::Config(format!(
                "mode shell {outer} does not fit on an n = {} grid",
                ca.grid.n()
            )));
        }
        let dim = ca.alg.dim();
        let modes = ModeBasis::new(dim, outer, ca.grid.area());
        if modes.len() > u16::MAX as usize {
            return Err(Error::Config("too many modes".into()));
        }
        let mut by_second = vec![Vec::new(); dim];
        for (i, k, kp, c) in ca.alg.nonzero_constants() {
            by_second[k].push((i, kp, c));
        }
        Ok(Self { ca, modes, inner_shell, cutoff, by_second })
    }

    pub fn from_config(cfg: &FockConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let grid = TorusGrid::square(n)?;
        let alg = crate::lie::StructureAlgebra::builtin(&cfg.algebra)?;
        Self::new(CurrentAlgebra::new(grid, alg), cfg.m_shell, cfg.p)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.ca.grid
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Mode indices of the inner shell.
    pub fn inner_modes(&self) -> Vec<u16> {
        (0..self.modes.len()).filter(|&j| self.modes.frequency(j) <= self.inner_shell).map(|j| j as u16).collect()
    }

    pub fn project(&self, field: &CurrentField) -> Result<Projection> {
        self.modes.project(&self.ca.grid, field)
    }

    /// Field with the given mode coefficients.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<CurrentField> {
        let mut out = CurrentField::zero(self.grid(), self.ca.dim());
        for (j, c) in coeffs.iter().enumerate() {
            if *c != ZERO {
                out = out.add(&self.modes.field(self.grid(), j)?.scale(*c))?;
            }
        }
        Ok(out)
    }

    /// Random real field supported on the inner shell.
    pub fn random_real_field(&self, rng: &mut crate::rng::Lcg) -> Result<CurrentField> {
        self.ca.random_real_field(rng, self.inner_shell)
    }

    pub fn random_field(&self, rng: &mut crate::rng::Lcg) -> Result<CurrentField> {
        self.ca.random_field(rng, self.inner_shell)
    }

    /// Vacuum, or any state, as a single-mode excitation of field `a`.
    pub fn one_particle(&self, a: &CurrentField) -> Result<FockState> {
        Ok(FockState::one_particle(&self.project(a)?.coeffs))
    }

    pub fn creation(&self, a: &CurrentField) -> Result<FockOperator> {
        Ok(FockOperator::creation_from(self.mode_count(), &self.project(a)?))
    }

    pub fn annihilation(&self, a: &CurrentField) -> Result<FockOperator> {
        Ok(FockOperator::annihilation_from(self.mode_count(), &self.project(a)?))
    }

    /// `dΓ(P ad_a P)`. Fails when `[a, ·]` leaks out of the mode set on the
    /// modes at least `bandwidth(a)` inside the outer shell.
    pub fn second_quantized_l0(&self, a: &CurrentField) -> Result<FockOperator> {
        let proj = self.project(a)?;
        let m = self.mode_count();
        let sqrt_area = self.ca.grid.area().sqrt();
        // Fourier coefficients of a by fiber index
        let terms: Vec<(usize, i64, i64, Complex64)> = proj
            .nonzero()
            .into_iter()
            .map(|(j, c)| {
                let (i, p, q) = self.modes.mode(j as usize);
                (i, p, q, c / sqrt_area)
            })
            .collect();
        let bw = terms.iter().map(|(_, p, q, _)| p.unsigned_abs().max(q.unsigned_abs()) as usize).max().unwrap_or(0);
        let outer = self.modes.shell();
        if bw > outer {
            return Err(Error::Config(format!("field bandwidth {bw} exceeds mode shell {outer}")));
        }
        let mut one_body = vec![Vec::new(); m];
        let mut closure: f64 = 0.0;
        for (j, col) in one_body.iter_mut().enumerate() {
            let (k, s1, s2) = self.modes.mode(j);
            let mut acc: BTreeMap<u16, Complex64> = BTreeMap::new();
            let mut escaped: HashMap<(usize, i64, i64), Complex64> = HashMap::new();
            for &(i, p, q, ai) in &terms {
                for &(ii, kp, c) in &self.by_second[k] {
                    if ii != i {
                        continue;
                    }
                    let v = ai * c;
                    match self.modes.index_of(kp, s1 + p, s2 + q) {
                        Some(t) => *acc.entry(t as u16).or_insert(ZERO) += v,
                        None => *escaped.entry((kp, s1 + p, s2 + q)).or_insert(ZERO) += v,
                    }
                }
            }
            if self.modes.frequency(j) + bw <= outer {
                let leak: f64 = escaped.values().map(|v| v.norm_sqr()).sum();
                closure = closure.max(leak.sqrt());
            }
            *col = acc.into_iter().filter(|(_, v)| *v != ZERO).collect();
        }
        if closure > CLOSURE_TOL {
            return Err(Error::Config(format!("mode set not closed under ad: residual {closure:e}")));
        }
        Ok(FockOperator {
            kind: OperatorKind::L0,
            one_body,
            projection_residual: proj.residual,
            closure_residual: closure,
            ..FockOperator::zero(m)
        })
    }

    /// `L_0(a) + B*(P u) − B(P w)`.
    fn assemble(&self, a: &CurrentField, u: &CurrentField, w: &CurrentField, kind: OperatorKind) -> Result<FockOperator> {
        let l0 = self.second_quantized_l0(a)?;
        let m = self.mode_count();
        let create = FockOperator::creation_from(m, &self.project(u)?);
        let annihilate = FockOperator::annihilation_from(m, &self.project(w)?);
        Ok(l0.add(&create).sub(&annihilate).with_kind(kind))
    }

    /// `L^Z(a) = L_0(a) + B*(Z a) − B(Z a)`.
    pub fn rep_lz(&self, z: &ComplexVectorField, a: &CurrentField) -> Result<FockOperator> {
        let za = self.ca.apply_field(z, a)?;
        self.assemble(a, &za, &za, OperatorKind::LZ)
    }

    /// `L^Y(a) = L_0(a) + B*(Y a) − B(Y ā)`.
    pub fn rep_ly(&self, y: &ComplexVectorField, a: &CurrentField) -> Result<FockOperator> {
        let ya = self.ca.apply_field(y, a)?;
        let yab = self.ca.apply_field(y, &a.conj())?;
        self.assemble(a, &ya, &yab, OperatorKind::LY)
    }

    /// `L(a) = L_0(a) + B*(Y^R a) − B(Y^L ā)`.
    pub fn rep_l_two(&self, yl: &ComplexVectorField, yr: &ComplexVectorField, a: &CurrentField) -> Result<FockOperator> {
        let u = self.ca.apply_field(yr, a)?;
        let w = self.ca.apply_field(yl, &a.conj())?;
        self.assemble(a, &u, &w, OperatorKind::LTwo)
    }

    /// Explicit basis over the inner-shell modes.
    pub fn inner_basis(&self, cutoff: usize) -> FockBasis {
        FockBasis::over_modes(&self.inner_modes(), cutoff)
    }

    /// `[L(a), L(b)] − L([a, b])` compressed to the safe subspace: states built
    /// from inner-shell modes with at most `P − 2` particles.
    pub fn commutator_defect(
        &self,
        builder: impl Fn(&CurrentField) -> Result<FockOperator>,
        a: &CurrentField,
        b: &CurrentField,
    ) -> Result<Defect> {
        if self.cutoff < 2 {
            return Err(Error::Config(format!("commutator defect needs P >= 2, got {}", self.cutoff)));
        }
        let la = builder(a)?;
        let lb = builder(b)?;
        let lab = builder(&self.ca.pointwise_bracket(a, b)?)?;
        let safe = self.inner_basis(self.cutoff - 2);
        let p = self.cutoff;
        let mut columns = Vec::with_capacity(safe.dim());
        let mut diag_sum = ZERO;
        for key in safe.keys() {
            let v = FockState::basis(key.clone());
            let keep = p - 2;
            let ab = la.apply_below(&lb.apply(&v, p), p, keep);
            let ba = lb.apply_below(&la.apply(&v, p), p, keep);
            let d = ab.add(&ba.scale(Complex64::new(-1.0, 0.0))).add(&lab.apply_below(&v, p, keep).scale(Complex64::new(-1.0, 0.0)));
            let restricted: Vec<(usize, Complex64)> =
                d.amps.iter().filter_map(|(k, val)| safe.index_of(k).map(|r| (r, *val))).collect();
            diag_sum += d.amplitude(key);
            columns.push(restricted);
        }
        let lambda = diag_sum / safe.dim() as f64;
        let mut residual: f64 = 0.0;
        for (col, entries) in columns.iter().enumerate() {
            let mut diag_seen = false;
            for &(row, val) in entries {
                let target = if row == col {
                    diag_seen = true;
                    val - lambda
                } else {
                    val
                };
                residual = residual.max(target.norm());
            }
            if !diag_seen {
                residual = residual.max(lambda.norm());
            }
        }
        Ok(Defect { lambda, residual, safe_dim: safe.dim() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::StructureAlgebra;
    use crate::rng::Lcg;

    fn space(cutoff: usize) -> FockSpace {
        let ca = CurrentAlgebra::new(TorusGrid::square(16).unwrap(), StructureAlgebra::su2());
        FockSpace::new(ca, 1, cutoff).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn basis_enumeration_matches_binomial() {
        for (m, p) in [(1usize, 3usize), (4, 2), (5, 3), (27, 2)] {
            let b = FockBasis::new(m, p);
            assert_eq!(b.dim() as u64, binomial((m + p) as u64, p as u64));
            for (i, k) in b.keys().iter().enumerate() {
                assert_eq!(b.index_of(k), Some(i));
                assert!(k.windows(2).all(|w| w[0] <= w[1]));
            }
        }
        assert_eq!(binomial(31, 4), 31465);
        let b = FockBasis::new(3, 2);
        assert_eq!(b.occupations(b.index_of(&[0, 0]).unwrap(), 3), vec![2, 0, 0]);
    }

    #[test]
    fn modes_are_orthonormal() {
        let fs = space(2);
        let g = fs.grid();
        let idx = [0usize, 1, 5, 13, 40, 100, 146];
        for &i in &idx {
            for &j in &idx {
                let gij = fs.ca.l2_inner(&fs.modes.field(g, i).unwrap(), &fs.modes.field(g, j).unwrap()).unwrap();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gij - c(e)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn spectral_projection_matches_inner_products() {
        let fs = space(2);
        let g = fs.grid();
        let mut rng = Lcg::new(11);
        let a = fs.ca.random_field(&mut rng, 2).unwrap();
        let proj = fs.project(&a).unwrap();
        assert!(proj.residual < 1e-13);
        for j in [0usize, 7, 50, 120] {
            let direct = fs.ca.l2_inner(&fs.modes.field(g, j).unwrap(), &a).unwrap();
            assert!((direct - proj.coeffs[j]).norm() <= 1e-13);
        }
        let exact = fs.modes.project_exact(g, &a).unwrap();
        for (x, y) in exact.coeffs.iter().zip(&proj.coeffs) {
            assert!((x - y).norm() <= 1e-13);
        }
        let back = fs.synthesize(&proj.coeffs).unwrap();
        assert!(back.sub(&a).unwrap().max_abs(g) <= 1e-13);
    }

    #[test]
    fn creation_and_annihilation_basics() {
        let fs = space(3);
        let mut rng = Lcg::new(12);
        let a = fs.random_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let vac = FockState::vacuum();
        let one = fs.creation(&a).unwrap().apply(&vac, fs.cutoff);
        let expect = fs.one_particle(&a).unwrap();
        assert!(one.add(&expect.scale(c(-1.0))).max_abs() <= 1e-15);
        assert!(fs.annihilation(&a).unwrap().apply(&vac, fs.cutoff).max_abs() == 0.0);
        let bb = fs.one_particle(&b).unwrap();
        let ab = fs.annihilation(&a).unwrap().apply(&bb, fs.cutoff);
        let ip = fs.ca.l2_inner(&a, &b).unwrap();
        assert!((ab.amplitude(&[]) - ip).norm() <= 1e-13);
        // truncation: a full state is annihilated by B*
        let full = FockState::basis(Key::from_slice(&[0, 1, 2]));
        assert!(fs.creation(&a).unwrap().apply(&full, 3).max_abs() == 0.0);
    }

    #[test]
    fn ccr_and_adjoints_on_explicit_basis() {
        let fs = space(2);
        let mut rng = Lcg::new(13);
        let a = fs.random_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let basis = fs.inner_basis(2);
        let ba = fs.annihilation(&a).unwrap();
        let bsb = fs.creation(&b).unwrap();
        let bsa = fs.creation(&a).unwrap();
        assert!(adjoint_residual(&bsa.to_csr(&basis), &ba.to_csr(&basis)) <= 1e-12);
        // [B(a), B*(b)] = (a, b) below the cutoff
        let ip = fs.ca.l2_inner(&a, &b).unwrap();
        let low = fs.inner_basis(1);
        for key in low.keys() {
            let v = FockState::basis(key.clone());
            let comm = ba.apply(&bsb.apply(&v, 2), 2).add(&bsb.apply(&ba.apply(&v, 2), 2).scale(c(-1.0)));
            let diff = comm.add(&v.scale(-ip));
            assert!(diff.max_abs() <= 1e-12);
        }
    }

    #[test]
    fn l0_derivation_and_antihermiticity() {
        let fs = space(2);
        let mut rng = Lcg::new(14);
        let a = fs.random_real_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let l0 = fs.second_quantized_l0(&a).unwrap();
        assert!(l0.closure_residual <= 1e-14);
        assert!(l0.apply(&FockState::vacuum(), 2).max_abs() == 0.0);
        let lb = l0.apply(&fs.one_particle(&b).unwrap(), 2);
        let expect = fs.one_particle(&fs.ca.pointwise_bracket(&a, &b).unwrap()).unwrap();
        assert!(lb.add(&expect.scale(c(-1.0))).max_abs() <= 1e-13);
        let basis = fs.inner_basis(2);
        assert!(antihermiticity_residual(&l0.to_csr(&basis)) <= 1e-12);
    }

    #[test]
    fn representation_operator_identities() {
        let fs = space(3);
        let g = fs.grid().clone();
        let mut rng = Lcg::new(15);
        let z1 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let z2 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let y = ComplexVectorField::complexify(&z1, &z2);
        let a = fs.random_real_field(&mut rng).unwrap();
        let basis = fs.inner_basis(2);
        let lz = fs.rep_lz(&z1, &a).unwrap();
        assert!(antihermiticity_residual(&lz.to_csr(&basis)) <= 1e-11);
        let zero = CurrentField::zero(&g, 3);
        assert!(fs.rep_lz(&z1, &zero).unwrap().to_csr(&basis).nnz() == 0);
        // real Y reduces to L^Z
        let ly_real = fs.rep_ly(&z1, &a).unwrap();
        assert!(difference_max(&ly_real.to_csr(&basis), &lz.to_csr(&basis)) == 0.0);
        // L^Y(a) = L^{Z1}(a) + i[B*(Z2 a) + B(Z2 a)] for real a
        let ly = fs.rep_ly(&y, &a).unwrap();
        let z2a = fs.ca.apply_field(&z2, &a).unwrap();
        let extra = fs.creation(&z2a).unwrap().add(&fs.annihilation(&z2a).unwrap());
        let rhs = lz.axpy(Complex64::new(0.0, 1.0), &extra);
        assert!(difference_max(&ly.to_csr(&basis), &rhs.to_csr(&basis)) <= 1e-12);
        // the literal block sum differs by -i L0(a) + 2i B(Z2 a)
        let literal = lz.axpy(Complex64::new(0.0, 1.0), &fs.rep_lz(&z2, &a).unwrap());
        assert!(difference_max(&ly.to_csr(&basis), &literal.to_csr(&basis)) > 1e-3);
        // adjoint of L^Y(a) is -L^Y(ā)
        let ac = fs.random_field(&mut rng).unwrap();
        let m1 = fs.rep_ly(&y, &ac).unwrap().to_csr(&basis);
        let m2 = fs.rep_ly(&y, &ac.conj()).unwrap().scale(c(-1.0)).to_csr(&basis);
        assert!(adjoint_residual(&m1, &m2) <= 1e-11);
        // equal gauges reduce the two-field operator to L^Y
        let lt = fs.rep_l_two(&y, &y, &ac).unwrap();
        assert!(difference_max(&lt.to_csr(&basis), &m1) == 0.0);
    }

    #[test]
    fn defect_is_minus_complex_cocycle() {
        let fs = space(4);
        let g = fs.grid().clone();
        let mut rng = Lcg::new(16);
        let z1 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let z2 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let y = ComplexVectorField::complexify(&z1, &z2);
        let a = fs.random_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let d = fs.commutator_defect(|x| fs.rep_ly(&y, x), &a, &b).unwrap();
        let c6 = fs.ca.cocycle_complex(&z1, &z2, &a, &b).unwrap();
        assert!(d.residual <= 1e-9, "{}", d.residual);
        assert!((d.lambda + c6).norm() <= 1e-9, "{} vs {}", d.lambda, c6);
        let dba = fs.commutator_defect(|x| fs.rep_ly(&y, x), &b, &a).unwrap();
        assert!((d.lambda + dba.lambda).norm() <= 1e-12);
        let same = fs.commutator_defect(|x| fs.rep_ly(&y, x), &a, &a).unwrap();
        assert_eq!(same.lambda, ZERO);
        let ar = fs.random_real_field(&mut rng).unwrap();
        let br = fs.random_real_field(&mut rng).unwrap();
        let dz = fs.commutator_defect(|x| fs.rep_lz(&z1, x), &ar, &br).unwrap();
        assert!(dz.lambda.norm() <= 1e-10 && dz.residual <= 1e-10);
        let small = space(1);
        assert!(matches!(small.commutator_defect(|x| small.rep_lz(&z1, x), &ar, &br), Err(Error::Config(_))));
    }

    #[test]
    fn two_field_defect_matches_two_field_cocycle_for_cut_fields() {
        let fs = space(4);
        let mut rng = Lcg::new(17);
        let phi = fs.ca.build_phi(c(1.0), Complex64::new(0.0, 1.0), (3, 3)).unwrap();
        let (yl, yr) = fs.ca.fields_from_phi(&phi);
        let a = fs.random_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let d = fs.commutator_defect(|x| fs.rep_l_two(&yl, &yr, x), &a, &b).unwrap();
        let c10 = fs.ca.cocycle_two_fields(&yl, &yr, &a, &b).unwrap();
        assert!(d.residual <= 1e-9, "{}", d.residual);
        assert!((d.lambda - c10).norm() <= 1e-9, "{} vs {}", d.lambda, c10);
    }

    #[test]
    fn truncated_apply_matches_restricted_apply() {
        let fs = space(4);
        let mut rng = Lcg::new(18);
        let z = ComplexVectorField::random_real(fs.grid(), &mut rng, 1).unwrap();
        let a = fs.random_field(&mut rng).unwrap();
        let op = fs.rep_lz(&z, &a).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let v = fs.creation(&b).unwrap().apply(&fs.creation(&b).unwrap().apply(&fs.one_particle(&b).unwrap(), 4), 4);
        for keep in 0..4 {
            let full = op.apply(&v, 4);
            let cut = op.apply_below(&v, 4, keep);
            for (k, val) in &full.amps {
                let expect = if k.len() <= keep { *val } else { ZERO };
                assert_eq!(cut.amplitude(k), expect);
            }
            assert!(cut.amps.keys().all(|k| k.len() <= keep));
        }
    }

    #[test]
    fn config_json() {
        let cfg = FockConfig::from_json(r#"{"M_shell": 1, "P": 4, "algebra": "su2", "seed": 3}"#).unwrap();
        assert_eq!(cfg.p, 4);
        assert!(FockConfig::from_json(r#"{"M_shell": 3, "P": 4, "algebra": "su2", "seed": 3}"#).is_err());
        assert!(FockSpace::from_config(&cfg, 16).is_ok());
        assert!(FockSpace::from_config(&FockConfig { algebra: "so5".into(), ..cfg.clone() }, 16).is_err());
    }
}
