//! Finite-dimensional Lie algebras given by structure constants and an
//! invariant bilinear form.
//!
//! Elements are complex coefficient vectors in a fixed real basis, so the
//! same type covers the compact real form and its complexification.
//! Conjugation always means conjugating coefficients in that basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-12;

/// A coefficient vector `x = Σ x_i e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(pub Vec<Complex64>);

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// JSON layout: `{"dim": n, "c": [[i, j, k, value], ...], "gram": [[...], ...]}`
/// with 0-based indices; unlisted constants are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub c: Vec<(usize, usize, usize, f64)>,
    pub gram: Vec<Vec<f64>>,
}

/// Structure constants `[e_i, e_j] = Σ_k c_ijk e_k` and invariant form
/// `⟨e_i, e_j⟩ = gram_ij`.
#[derive(Clone, Debug)]
pub struct StructureAlgebra {
    name: String,
    dim: usize,
    c: Vec<f64>,
    gram: Vec<f64>,
}

impl StructureAlgebra {
    /// su(2) with `c_ijk = ε_ijk` and identity Gram matrix.
    pub fn su2() -> Self {
        let mut entries = Vec::new();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            entries.push((i, j, k, 1.0));
            entries.push((j, i, k, -1.0));
        }
        Self::from_entries("su2", 3, &entries, identity(3)).expect("su(2) constants are valid")
    }

    /// su(3) in the basis `-iλ_a/2`, where the Gell-Mann constants `f_abc`
    /// are totally antisymmetric and the Gram matrix is the identity.
    pub fn su3() -> Self {
        let h = 0.5;
        let r = 3f64.sqrt() / 2.0;
        let f = [
            (0, 1, 2, 1.0),
            (0, 3, 6, h),
            (0, 4, 5, -h),
            (1, 3, 5, h),
            (1, 4, 6, h),
            (2, 3, 4, h),
            (2, 5, 6, -h),
            (3, 4, 7, r),
            (5, 6, 7, r),
        ];
        let mut entries = Vec::new();
        for &(a, b, c, v) in &f {
            // all six permutations with sign
            for (p, s) in [
                ((a, b, c), 1.0),
                ((b, c, a), 1.0),
                ((c, a, b), 1.0),
                ((b, a, c), -1.0),
                ((a, c, b), -1.0),
                ((c, b, a), -1.0),
            ] {
                entries.push((p.0, p.1, p.2, s * v));
            }
        }
        Self::from_entries("su3", 8, &entries, identity(8)).expect("su(3) constants are valid")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "su2" => Ok(Self::su2()),
            "su3" => Ok(Self::su3()),
            other => Err(Error::Input(format!("unknown built-in algebra `{other}`"))),
        }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let mut gram = Vec::with_capacity(spec.dim * spec.dim);
        if spec.gram.len() != spec.dim || spec.gram.iter().any(|row| row.len() != spec.dim) {
            return Err(Error::Input("gram must be a dim x dim matrix".into()));
        }
        for row in &spec.gram {
            gram.extend_from_slice(row);
        }
        Self::from_entries("custom", spec.dim, &spec.c, gram)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: AlgebraSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    fn from_entries(
        name: &str,
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        gram: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dim must be positive".into()));
        }
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Input(format!("index ({i},{j},{k}) out of range")));
            }
            if !v.is_finite() {
                return Err(Error::Input("structure constants must be finite".into()));
            }
            c[(i * dim + j) * dim + k] = v;
        }
        let alg = Self { name: name.to_string(), dim, c, gram };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.c(i, j, k) != -self.c(j, i, k) {
                        return Err(Error::Input(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                let (gij, gji) = (self.gram[i * d + j], self.gram[j * d + i]);
                if gij != gji || !gij.is_finite() {
                    return Err(Error::Input("gram must be symmetric and finite".into()));
                }
            }
        }
        let g = DMatrix::from_row_slice(d, d, &self.gram);
        if g.cholesky().is_none() {
            return Err(Error::Input("gram must be positive definite".into()));
        }
        let jac = self.jacobi_residual();
        if jac > JACOBI_TOL {
            return Err(Error::Input(format!("Jacobi identity violated (residual {jac:e})")));
        }
        let inv = self.invariance_residual();
        if inv > INVARIANCE_TOL {
            return Err(Error::Input(format!("gram is not invariant (residual {inv:e})")));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn gram(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.dim + j]
    }

    /// Nonzero structure constants as `(i, j, k, c_ijk)`.
    pub fn nonzero_constants(&self) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.c(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// Whether the Gram matrix is exactly the identity.
    pub fn has_identity_gram(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| self.gram(i, j) == if i == j { 1.0 } else { 0.0 }))
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::Input(format!(
                "element has length {}, algebra dimension is {}",
                x.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        let mut out = AlgebraElement::zero(self.dim);
        // pair terms so that [x, x] cancels exactly
        for (i, j, k, v) in self.nonzero_constants() {
            if i < j {
                out.0[k] += (x.0[i] * y.0[j] - x.0[j] * y.0[i]) * v;
            }
        }
        Ok(out)
    }

    /// Bilinear `x^T · gram · y`; no conjugation at the fiber level.
    pub fn inner(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Complex64> {
        self.check(x)?;
        self.check(y)?;
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let g = self.gram(i, j);
                if g != 0.0 {
                    acc += x.0[i] * y.0[j] * g;
                }
            }
        }
        Ok(acc)
    }

    /// Matrix of `y ↦ [a, y]`.
    pub fn ad_matrix(&self, a: &AlgebraElement) -> Result<DMatrix<Complex64>> {
        self.check(a)?;
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for (i, j, k, v) in self.nonzero_constants() {
            m[(k, j)] += a.0[i] * v;
        }
        Ok(m)
    }

    /// Max over basis triples and output components of the Jacobi sum.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for n in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.c(j, l, m) * self.c(i, m, n)
                                + self.c(l, i, m) * self.c(j, m, n)
                                + self.c(i, j, m) * self.c(l, m, n);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Max over basis triples of `⟨[e_i, e_j], e_l⟩ + ⟨e_j, [e_i, e_l]⟩`.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += self.c(i, j, k) * self.gram(k, l) + self.gram(j, k) * self.c(i, l, k);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        g[i * d + i] = 1.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lcg;

    fn random_element(rng: &mut Lcg, d: usize) -> AlgebraElement {
        AlgebraElement((0..d).map(|_| rng.complex()).collect())
    }

    #[test]
    fn su2_basis_bracket() {
        let g = StructureAlgebra::su2();
        let e = |i| AlgebraElement::basis(3, i);
        assert_eq!(g.bracket(&e(0), &e(1)).unwrap(), e(2));
        assert_eq!(g.bracket(&e(1), &e(2)).unwrap(), e(0));
        assert_eq!(g.bracket(&e(2), &e(0)).unwrap(), e(1));
    }

    #[test]
    fn self_bracket_vanishes_and_jacobi_holds() {
        let mut rng = Lcg::new(7);
        for alg in [StructureAlgebra::su2(), StructureAlgebra::su3()] {
            let d = alg.dim();
            for _ in 0..20 {
                let (x, y, z) = (
                    random_element(&mut rng, d),
                    random_element(&mut rng, d),
                    random_element(&mut rng, d),
                );
                assert!(alg.bracket(&x, &x).unwrap().max_abs() == 0.0);
                let j1 = alg.bracket(&x, &alg.bracket(&y, &z).unwrap()).unwrap();
                let j2 = alg.bracket(&y, &alg.bracket(&z, &x).unwrap()).unwrap();
                let j3 = alg.bracket(&z, &alg.bracket(&x, &y).unwrap()).unwrap();
                assert!(j1.add(&j2).add(&j3).max_abs() < 1e-12);
            }
            assert!(alg.jacobi_residual() <= 1e-12);
            assert!(alg.invariance_residual() <= 1e-12);
        }
    }

    #[test]
    fn inner_product_examples() {
        let g = StructureAlgebra::su2();
        let e1 = AlgebraElement::basis(3, 0);
        assert_eq!(g.inner(&e1, &e1).unwrap(), Complex64::new(1.0, 0.0));
        let x = AlgebraElement::from_real(&[1.0, 1.0, 0.0]);
        let y = AlgebraElement::from_real(&[1.0, -1.0, 0.0]);
        assert_eq!(g.inner(&x, &y).unwrap().norm(), 0.0);

        let mut rng = Lcg::new(11);
        for _ in 0..20 {
            let (a, x, y) = (
                random_element(&mut rng, 3),
                random_element(&mut rng, 3),
                random_element(&mut rng, 3),
            );
            let lhs = g.inner(&g.bracket(&a, &x).unwrap(), &y).unwrap()
                + g.inner(&x, &g.bracket(&a, &y).unwrap()).unwrap();
            assert!(lhs.norm() < 1e-12);
        }
    }

    #[test]
    fn ad_matrix_matches_bracket() {
        let mut rng = Lcg::new(3);
        for alg in [StructureAlgebra::su2(), StructureAlgebra::su3()] {
            let d = alg.dim();
            assert!(alg.ad_matrix(&AlgebraElement::zero(d)).unwrap().iter().all(|c| c.norm() == 0.0));
            for _ in 0..100 {
                let (a, y) = (random_element(&mut rng, d), random_element(&mut rng, d));
                let m = alg.ad_matrix(&a).unwrap();
                let my = m * nalgebra::DVector::from_vec(y.0.clone());
                let direct = alg.bracket(&a, &y).unwrap();
                for k in 0..d {
                    assert!((my[k] - direct.0[k]).norm() < 1e-14);
                }
            }
            let real = AlgebraElement::from_real(&(0..d).map(|_| rng.uniform() - 0.5).collect::<Vec<_>>());
            let m = alg.ad_matrix(&real).unwrap();
            assert!((&m + m.transpose()).iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn ad_of_e3_rotates_e1_e2() {
        let g = StructureAlgebra::su2();
        let m = g.ad_matrix(&AlgebraElement::basis(3, 2)).unwrap();
        // [e3, e1] = e2, [e3, e2] = -e1
        assert_eq!(m[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(2, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let g = StructureAlgebra::su2();
        let bad = AlgebraElement::zero(2);
        assert!(matches!(g.bracket(&bad, &AlgebraElement::zero(3)), Err(Error::Input(_))));
        assert!(matches!(g.inner(&bad, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn json_loading_validates() {
        let ok = r#"{"dim": 3, "c": [[0,1,2,1.0],[1,0,2,-1.0],[1,2,0,1.0],[2,1,0,-1.0],[2,0,1,1.0],[0,2,1,-1.0]],
                     "gram": [[1,0,0],[0,1,0],[0,0,1]]}"#;
        let alg = StructureAlgebra::from_json(ok).unwrap();
        assert_eq!(alg.dim(), 3);

        let not_antisym = r#"{"dim": 2, "c": [[0,1,0,1.0]], "gram": [[1,0],[0,1]]}"#;
        assert!(StructureAlgebra::from_json(not_antisym).is_err());

        // [e0,e1] = e0 is antisymmetric and satisfies Jacobi but admits no
        // positive invariant form
        let solvable = r#"{"dim": 2, "c": [[0,1,0,1.0],[1,0,0,-1.0]], "gram": [[1,0],[0,1]]}"#;
        assert!(StructureAlgebra::from_json(solvable).is_err());

        // antisymmetric but not Jacobi
        let bad_jacobi = r#"{"dim": 3, "c": [[0,1,2,1.0],[1,0,2,-1.0],[1,2,0,2.0],[2,1,0,-2.0],[0,2,1,1.0],[2,0,1,-1.0]],
                            "gram": [[1,0,0],[0,1,0],[0,0,1]]}"#;
        assert!(StructureAlgebra::from_json(bad_jacobi).is_err());
    }
}
