//! Property tests for the module invariants.

use current_lab::current::{random_scalar, ComplexVectorField, CurrentAlgebra};
use current_lab::fock::{adjoint_residual, antihermiticity_residual, FockSpace};
use current_lab::grid::{Cycle, Direction, TorusGrid};
use current_lab::lie::{AlgebraElement, StructureAlgebra};
use current_lab::periods::{segment_integral, segment_integral_with, HyperellipticCurve};
use current_lab::rng::Lcg;
use current_lab::search::{classify_charge, impossibility_check, period_ratio, search_rational, ChargeKind};
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn algebras() -> [StructureAlgebra; 2] {
    [StructureAlgebra::su2(), StructureAlgebra::su3()]
}

fn curve_strategy() -> impl Strategy<Value = HyperellipticCurve> {
    (0.05f64..2.0, 0.05f64..2.0, 0.05f64..2.0).prop_map(|(a, b, c)| HyperellipticCurve::new(a, a + b, a + b + c).unwrap())
}

#[test]
fn structure_constants_on_basis_triples() {
    for alg in algebras() {
        let d = alg.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    assert_eq!(alg.c(i, j, k), -alg.c(j, i, k));
                }
            }
        }
        assert!(alg.jacobi_residual() <= 1e-12);
        assert!(alg.invariance_residual() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ad_matrix_of_real_element_is_real_antisymmetric(seed in any::<u64>()) {
        for alg in algebras() {
            let mut rng = Lcg::new(seed);
            let a = AlgebraElement::from_real(&(0..alg.dim()).map(|_| rng.symmetric()).collect::<Vec<_>>());
            let m = alg.ad_matrix(&a).unwrap();
            prop_assert!(m.iter().all(|z| z.im == 0.0));
            prop_assert!((&m + m.transpose()).iter().all(|z| z.norm() <= 1e-15));
        }
    }

    #[test]
    fn spectral_calculus(seed in any::<u64>(), bw in 1usize..6, tau_re in -0.5f64..0.5, tau_im in 0.5f64..2.0) {
        let cfg = current_lab::grid::GridConfig { n: 16, lattice_tau: [tau_re, tau_im], cut_x: 0.0, cut_y: 0.0 };
        let g = TorusGrid::new(&cfg).unwrap();
        let mut rng = Lcg::new(seed);
        let f = random_scalar(&g, &mut rng, bw).unwrap();
        let dx = g.spectral_derivative(&f, Direction::X);
        let dy = g.spectral_derivative(&f, Direction::Y);
        let dxy = g.spectral_derivative(&dx, Direction::Y);
        let dyx = g.spectral_derivative(&dy, Direction::X);
        prop_assert!(dxy.sub(&dyx).max_abs() <= 1e-12);
        prop_assert!(g.integrate(&dx).norm() <= 1e-13);
        prop_assert!(g.integrate(&dy).norm() <= 1e-13);
        for cycle in [Cycle::Gamma1, Cycle::Gamma2] {
            prop_assert!(g.cycle_integral(&dx, &dy, cycle).norm() <= 1e-12);
        }
        let fine = TorusGrid::new(&current_lab::grid::GridConfig { n: 32, ..cfg }).unwrap();
        let f2 = random_scalar(&fine, &mut Lcg::new(seed), bw).unwrap();
        prop_assert!((fine.integrate(&f2) - g.integrate(&f)).norm() <= 1e-13);
    }

    #[test]
    fn central_terms_are_antisymmetric_and_refinement_stable(seed in any::<u64>()) {
        let mut values = Vec::new();
        for n in [16usize, 32] {
            let ca = CurrentAlgebra::new(TorusGrid::square(n).unwrap(), StructureAlgebra::su2());
            let mut rng = Lcg::new(seed);
            let z1 = ComplexVectorField::random_real(&ca.grid, &mut rng, 1).unwrap();
            let z2 = ComplexVectorField::random_real(&ca.grid, &mut rng, 1).unwrap();
            let yl = ComplexVectorField::random(&ca.grid, &mut rng, 1).unwrap();
            let yr = ComplexVectorField::random(&ca.grid, &mut rng, 1).unwrap();
            let (ax, ay) = (rng.complex(), rng.complex());
            let a = ca.random_field(&mut rng, 2).unwrap();
            let b = ca.random_field(&mut rng, 2).unwrap();
            let pairs = [
                (ca.cocycle_real(&z1, &z2, &a.real_part(), &b.real_part()).unwrap(), ca.cocycle_real(&z1, &z2, &b.real_part(), &a.real_part()).unwrap()),
                (ca.cocycle_complex(&z1, &z2, &a, &b).unwrap(), ca.cocycle_complex(&z1, &z2, &b, &a).unwrap()),
                (ca.cocycle_two_fields(&yl, &yr, &a, &b).unwrap(), ca.cocycle_two_fields(&yl, &yr, &b, &a).unwrap()),
                (ca.omega_ef(&a, &b, ax, ay).unwrap(), ca.omega_ef(&b, &a, ax, ay).unwrap()),
            ];
            for (ab, ba) in pairs {
                prop_assert!((ab + ba).norm() <= 1e-11);
            }
            values.push(pairs.map(|p| p.0));
        }
        for (coarse, fine) in values[0].iter().zip(&values[1]) {
            prop_assert!((coarse - fine).norm() <= 1e-12, "{} vs {}", coarse, fine);
        }
    }

    #[test]
    fn classify_is_scale_consistent(re in -3i32..=3, im in -4i32..=4, frac in 0.0f64..1.0, lambda in 1u32..6) {
        let c = Complex64::new(re as f64, im as f64 + frac);
        let scaled = c * lambda as f64;
        let imaginary = |z: Complex64| z.re.abs() <= 1e-9;
        prop_assert_eq!(imaginary(c), imaginary(scaled));
        if classify_charge(c).class != ChargeKind::Nonintegrable {
            prop_assert_eq!(classify_charge(scaled).class, classify_charge(c).class);
        }
    }

    #[test]
    fn segment_integral_invariants(cv in curve_strategy(), frac in 0.05f64..0.95, lambda in 0.3f64..3.0) {
        let u = frac * cv.s;
        prop_assert!(segment_integral(&cv, 1, -u, u).unwrap().abs() <= 1e-13);
        prop_assert!(segment_integral(&cv, 1, -cv.s, cv.s).unwrap().abs() <= 1e-13);
        for (x0, x1) in [(cv.s, cv.t), (cv.t, cv.r)] {
            let base = segment_integral(&cv, 1, x0, x1).unwrap();
            let fine = segment_integral_with(&cv, 1, x0, x1, 128).unwrap();
            prop_assert!((base - fine).abs() <= 1e-12 * base.abs());
            let scaled = cv.scaled(lambda).unwrap();
            let sv = segment_integral(&scaled, 1, lambda * x0, lambda * x1).unwrap();
            prop_assert!((sv - base / lambda).abs() <= 1e-10 * base.abs());
        }
    }

    #[test]
    fn riemann_relations(cv in curve_strategy()) {
        let pd = current_lab::periods::full_periods(&cv).unwrap();
        prop_assert!(pd.symmetry_residual() <= 1e-9 * (1.0 + pd.tau.norm()));
        prop_assert!(pd.im_tau_eigenvalues()[0] > 0.0);
    }

    #[test]
    fn impossibility_is_a_function_of_tau_only(a in 0.5f64..3.0, b in -0.4f64..0.4, c in 0.5f64..3.0) {
        let tau = Matrix2::new(I * a, I * b, I * b, I * c);
        let r1 = impossibility_check(&tau).unwrap();
        let r2 = impossibility_check(&tau).unwrap();
        prop_assert_eq!(r1, r2);
        // swapping the two cycles permutes the integer pairs
        let swapped = Matrix2::new(I * c, I * b, I * b, I * a);
        prop_assert_eq!(impossibility_check(&swapped).unwrap().min_distance, r1.min_distance);
    }

    #[test]
    fn search_results_reproduce_their_ratio(p in 11u64..40) {
        let q = 10u64;
        prop_assume!(p % 2 != 0 && p % 5 != 0);
        let res = search_rational(p, q, 2.0, 3.0).unwrap();
        prop_assert!(res.iterations <= 200);
        let again = period_ratio(&res.curve).unwrap();
        prop_assert!((again - res.ratio_found).abs() <= 1e-11);
        prop_assert!((again - p as f64 / q as f64).abs() <= 1e-11);
        prop_assert_eq!(search_rational(p, q, 2.0, 3.0).unwrap(), res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn fock_adjoint_laws_and_defect_antisymmetry(seed in any::<u64>()) {
        let ca = CurrentAlgebra::new(TorusGrid::square(16).unwrap(), StructureAlgebra::su2());
        let fs = FockSpace::new(ca, 1, 3).unwrap();
        let g = fs.grid().clone();
        let mut rng = Lcg::new(seed);
        let z1 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let z2 = ComplexVectorField::random_real(&g, &mut rng, 1).unwrap();
        let y = ComplexVectorField::complexify(&z1, &z2);
        let a = fs.random_field(&mut rng).unwrap();
        let b = fs.random_field(&mut rng).unwrap();
        let ar = fs.random_real_field(&mut rng).unwrap();
        let basis = fs.inner_basis(1);
        prop_assert!(adjoint_residual(&fs.creation(&a).unwrap().to_csr(&basis), &fs.annihilation(&a).unwrap().to_csr(&basis)) <= 1e-12);
        prop_assert!(antihermiticity_residual(&fs.rep_lz(&z1, &ar).unwrap().to_csr(&basis)) <= 1e-11);
        let m1 = fs.rep_ly(&y, &a).unwrap().to_csr(&basis);
        let m2 = fs.rep_ly(&y, &a.conj()).unwrap().scale(Complex64::new(-1.0, 0.0)).to_csr(&basis);
        prop_assert!(adjoint_residual(&m1, &m2) <= 1e-11);
        let ly = |x: &current_lab::current::CurrentField| fs.rep_ly(&y, x);
        let ab = fs.commutator_defect(ly, &a, &b).unwrap();
        let ba = fs.commutator_defect(ly, &b, &a).unwrap();
        prop_assert!((ab.lambda + ba.lambda).norm() <= 1e-12);
        let residuals = [ly(&a).unwrap().projection_residual, ly(&b).unwrap().projection_residual];
        if residuals.iter().all(|r| *r <= 1e-10) {
            prop_assert!(ab.residual <= 1e-9);
        }
    }
}
