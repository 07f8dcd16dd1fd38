use proptest::prelude::*;

use ucinv::inverse::orthonormality_defect;
use ucinv::pinv::PenroseResiduals;
use ucinv::random::{orthonormal, seeded};
use ucinv::verify::unit_product_defect;
use ucinv::{
    check_rotation_consistency, check_unit_consistency, kron, mixed_inverse, pinv, scale_decompose,
    uc_inverse, BalanceSettings, BlockPartition, InverseKind, InverseOptions, Matrix,
    RankTolerance,
};

fn entry(zero_weight: u32) -> impl Strategy<Value = f64> {
    prop_oneof![zero_weight => Just(0.0), 10 => -1.0..1.0f64]
}

fn matrix_with(max: usize, zero_weight: u32) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(move |(m, n)| {
        prop::collection::vec(entry(zero_weight), m * n)
            .prop_map(move |v| Matrix::from_row_slice(m, n, &v).unwrap())
    })
}

fn dense(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        prop::collection::vec(-1.0..1.0f64, m * n)
            .prop_map(move |v| Matrix::from_row_slice(m, n, &v).unwrap())
    })
}

fn scales(n: usize, half_span: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-half_span..half_span).prop_map(|e| 10f64.powf(e)), n)
}

fn relative(lhs: &Matrix, rhs: &Matrix) -> f64 {
    lhs.max_abs_diff(rhs) / rhs.max_abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pinv_satisfies_penrose_conditions(a in matrix_with(8, 2)) {
        let p = pinv(&a, RankTolerance::Auto).unwrap();
        prop_assert_eq!(p.shape(), (a.cols(), a.rows()));
        prop_assert!(PenroseResiduals::of(&a, &p).unwrap().max() < 1e-8);
    }

    #[test]
    fn pinv_is_rotation_consistent(a in dense(6), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let u = orthonormal(&mut rng, a.rows());
        let v = orthonormal(&mut rng, a.cols());
        prop_assert!(orthonormality_defect(&u) < 1e-12);
        let dev = check_rotation_consistency(InverseKind::Mp, &a, &u, &v, &InverseOptions::default()).unwrap();
        prop_assert!(dev < 1e-8, "deviation {dev}");
    }

    #[test]
    fn uc_is_unit_consistent_across_nine_decades(
        (a, d, e) in matrix_with(6, 2).prop_flat_map(|a| {
            let (m, n) = a.shape();
            (Just(a), scales(n, 4.5), scales(m, 4.5))
        })
    ) {
        let dev = check_unit_consistency(InverseKind::Uc, &a, &d, &e, &InverseOptions::default()).unwrap();
        prop_assert!(dev < 1e-8, "deviation {dev}");
    }

    #[test]
    fn uc_is_a_generalized_inverse(a in matrix_with(6, 2)) {
        let x = uc_inverse(&a, &BalanceSettings::default()).unwrap();
        prop_assert!(PenroseResiduals::of(&a, &x).unwrap().generalized() < 1e-8);
    }

    #[test]
    fn decomposition_invariants(a in matrix_with(8, 4)) {
        let dec = scale_decompose(&a, &BalanceSettings::default()).unwrap();
        prop_assert!(dec.d.iter().chain(&dec.e).all(|&x| x > 0.0 && x.is_finite()));
        prop_assert!(dec.reconstruct().frobenius_diff(&a) <= 1e-10 * a.frobenius_norm().max(1.0));
        prop_assert!(unit_product_defect(&dec.s) < 1e-8);
        for (x, s) in a.as_slice().iter().zip(dec.s.as_slice()) {
            prop_assert_eq!(*x == 0.0, *s == 0.0);
            prop_assert_eq!(x.signum(), s.signum());
        }
    }

    #[test]
    fn balanced_core_is_scale_equivariant(
        (a, d, e) in matrix_with(6, 3).prop_flat_map(|a| {
            let (m, n) = a.shape();
            (Just(a), scales(m, 3.0), scales(n, 3.0))
        })
    ) {
        let settings = BalanceSettings::default();
        let s = scale_decompose(&a, &settings).unwrap().s;
        let scaled = a.scale_rows(&d).unwrap().scale_cols(&e).unwrap();
        let t = scale_decompose(&scaled, &settings).unwrap().s;
        prop_assert!(s.max_abs_diff(&t) < 1e-8);
    }

    #[test]
    fn kron_structure_identities(
        a in dense(3), b in dense(3), c in dense(3), k in -3.0..3.0f64
    ) {
        let ab = kron(&a, &b).unwrap();
        prop_assert_eq!(ab.shape(), (a.rows() * b.rows(), a.cols() * b.cols()));
        prop_assert!(ab.transpose().max_abs_diff(&kron(&a.transpose(), &b.transpose()).unwrap()) < 1e-12);
        let lhs = kron(&ab, &c).unwrap();
        let rhs = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        prop_assert!(kron(&a.scale(k), &b).unwrap().max_abs_diff(&ab.scale(k)) < 1e-12);
        let a2 = a.map(|x| 0.5 - x);
        let sum = kron(&(&a + &a2), &b).unwrap();
        prop_assert!(sum.max_abs_diff(&(&ab + &kron(&a2, &b).unwrap())) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in dense(3), b in dense(3), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = seeded(seed);
        let (cn, dn) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let c = ucinv::random::uniform_matrix(&mut rng, a.cols(), cn);
        let d = ucinv::random::uniform_matrix(&mut rng, b.cols(), dn);
        let lhs = &kron(&a, &b).unwrap() * &kron(&c, &d).unwrap();
        let rhs = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn inverses_distribute_over_kron(a in dense(4), b in dense(4)) {
        let settings = BalanceSettings::default();
        let ab = kron(&a, &b).unwrap();
        let uc = kron(&uc_inverse(&a, &settings).unwrap(), &uc_inverse(&b, &settings).unwrap()).unwrap();
        prop_assert!(relative(&uc_inverse(&ab, &settings).unwrap(), &uc) < 1e-8);
        let mp = kron(&pinv(&a, RankTolerance::Auto).unwrap(), &pinv(&b, RankTolerance::Auto).unwrap()).unwrap();
        prop_assert!(relative(&pinv(&ab, RankTolerance::Auto).unwrap(), &mp) < 1e-8);
    }

    #[test]
    fn uc_distributes_over_three_factor_kron(a in dense(3), b in dense(3), c in dense(2)) {
        let settings = BalanceSettings::default();
        let lhs = uc_inverse(&kron(&kron(&a, &b).unwrap(), &c).unwrap(), &settings).unwrap();
        let rhs = kron(
            &kron(&uc_inverse(&a, &settings).unwrap(), &uc_inverse(&b, &settings).unwrap()).unwrap(),
            &uc_inverse(&c, &settings).unwrap(),
        ).unwrap();
        prop_assert!(relative(&lhs, &rhs) < 1e-8);
    }

    #[test]
    fn mixed_inverse_of_nonsingular_is_the_inverse(v in prop::collection::vec(-1.0..1.0f64, 16)) {
        let a = &Matrix::from_row_slice(4, 4, &v).unwrap() + &Matrix::identity(4).scale(5.0);
        let x = mixed_inverse(&BlockPartition::split(&a, 2).unwrap(), &BalanceSettings::default()).unwrap();
        prop_assert!((&a * &x).max_abs_diff(&Matrix::identity(4)) < 1e-10);
    }

    #[test]
    fn mixed_inverse_respects_block_invariances(
        v in prop::collection::vec(-1.0..1.0f64, 16),
        scale in scales(2, 3.0),
        seed in any::<u64>(),
    ) {
        // v' = blkdiag(E, U) v and q' = blkdiag(D, V) q give
        // A' = blkdiag(E, U) A blkdiag(D⁻¹, Vᵀ), inverted as blkdiag(D, V) A⁻ blkdiag(E⁻¹, Uᵀ).
        let a = &Matrix::from_row_slice(4, 4, &v).unwrap() + &Matrix::identity(4).scale(5.0);
        let mut rng = seeded(seed);
        let u = orthonormal(&mut rng, 2);
        let w = orthonormal(&mut rng, 2);
        let e = ucinv::diag_from(&scale);
        let d = ucinv::diag_from(&[scale[1] * 3.0, scale[0] / 7.0]);
        let d_inv = d.map(|x| if x == 0.0 { 0.0 } else { 1.0 / x });
        let e_inv = e.map(|x| if x == 0.0 { 0.0 } else { 1.0 / x });
        let left = Matrix::block_diag(&e, &u);
        let right = Matrix::block_diag(&d_inv, &w.transpose());
        let transformed = &(&left * &a) * &right;
        let settings = BalanceSettings::default();
        let lhs = mixed_inverse(&BlockPartition::split(&transformed, 2).unwrap(), &settings).unwrap();
        let base = mixed_inverse(&BlockPartition::split(&a, 2).unwrap(), &settings).unwrap();
        let rhs = &(&Matrix::block_diag(&d, &w) * &base) * &Matrix::block_diag(&e_inv, &u.transpose());
        prop_assert!(relative(&lhs, &rhs) < 1e-8);
    }
}
