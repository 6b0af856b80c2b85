use proptest::prelude::*;
use pso_core::matops::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interspherical_composition_law(seed in any::<u64>(), m in 1usize..=4, norm in 0.0..0.95f64) {
        let mut r = rng(seed);
        let k1 = random_krein_unitary::<f64, _>(&mut r, m, 0.8);
        let k2 = random_krein_unitary::<f64, _>(&mut r, m, 0.8);
        let z = random_contraction::<f64, _>(&mut r, m, norm);
        let k21 = k2.compose(&k1).unwrap();
        prop_assert!(k21.krein_residual() <= 1e-10);
        let direct = interspherical(&k21, &z).unwrap();
        let nested = interspherical(&k2, &interspherical(&k1, &z).unwrap()).unwrap();
        prop_assert!(op_norm(&(direct.clone() - nested)) <= 1e-10);
        prop_assert!(op_norm(&direct) <= 1.0 + 1e-10);
    }

    #[test]
    fn inverse_cayley_then_cayley_is_identity(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let u = random_unitary::<f64, _>(&mut r, n);
        prop_assume!(min_singular(&(u.clone() - identity::<f64>(n))) > 1e-3);
        let a = inverse_cayley(&u).unwrap();
        prop_assert!(hermitian_residual(&a) <= 1e-9);
        prop_assert!(op_norm(&(cayley(&a).unwrap() - u)) <= 1e-9);
    }

    #[test]
    fn wandering_report_is_unitarily_invariant(seed in any::<u64>(), n in 3usize..=8, k in 1usize..=2) {
        let mut r = rng(seed);
        let d = n.max(k + 1);
        // cyclic shift has a wandering span{e_0} up to n = d - 1
        let mut u = CMat::<f64>::zeros(d, d);
        for j in 0..d - 1 {
            u[(j + 1, j)] = num_complex::Complex::new(1.0, 0.0);
        }
        u[(0, d - 1)] = num_complex::Complex::new(-1.0, 0.0);
        let l = SubspaceBasis::coordinates(d, &(0..k).collect::<Vec<_>>()).unwrap();
        let w = random_unitary::<f64, _>(&mut r, d);
        let a = wandering_check(&u, &l, 2 * d).unwrap();
        let b = wandering_check(&(&w * &u * w.adjoint()), &l.mapped(&w).unwrap(), 2 * d).unwrap();
        prop_assert_eq!(a.first_violation, b.first_violation);
        for (x, y) in a.defect_per_n.iter().zip(&b.defect_per_n) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn krein_unitaries_form_a_group(seed in any::<u64>(), m in 1usize..=4) {
        let mut r = rng(seed);
        let k1 = random_krein_unitary::<f64, _>(&mut r, m, 1.0);
        let k2 = random_krein_unitary::<f64, _>(&mut r, m, 1.0);
        prop_assert!(k1.compose(&k2).unwrap().krein_residual() <= 1e-10);
        let id = k1.compose(&k1.krein_inverse()).unwrap();
        prop_assert!(op_norm(&(id.to_matrix() - identity::<f64>(2 * m))) <= 1e-10);
    }
}
