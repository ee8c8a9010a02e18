//! Randomized invariants across the crate. Each case draws a seed and sizes
//! from proptest and builds its operators with the seeded generators, so a
//! shrunk failure is reproducible from the printed seed alone.

use epmod::compacts::{
    element_is_ep, ideal_equality_check, left_mult_matrix, random_commuting_ep_elements,
    BlockAlgebra,
};
use epmod::ep::{
    canonical_form, ep_factor_adjoint, ep_factor_commuting, is_ep, random_commuting_ep_pair,
    random_ep,
};
use epmod::linalg::{factorize, numerical_rank};
use epmod::products::{commuting_ep_product, ep_product_conditions, kernel_split_check};
use epmod::pseudoinverse::{default_schedule, mp_svd, mp_tikhonov, penrose_residuals, pinv};
use epmod::random::{
    complex_gaussian, random_exact_rank, random_isometry, random_unitary, random_with_rank,
    rng_from_seed,
};
use epmod::shift::verify_shift_example;
use epmod::subspace::{complement, intersect, principal_angles, sum, Subspace};
use epmod::{ComplexMatrix, NumericalContext};
use proptest::prelude::*;

fn ctx() -> NumericalContext {
    NumericalContext::default()
}

/// Two subspaces of ℂⁿ sharing an `s`-dimensional part, each with its own
/// generic extra directions; `s + a + b ≤ n`, so the intersection is exactly
/// the shared part.
fn overlapping_pair(n: usize, s: usize, a: usize, b: usize, seed: u64) -> (Subspace, Subspace) {
    let mut rng = rng_from_seed(seed);
    let frame = random_isometry(&mut rng, n, s + a + b);
    let mix_a = random_unitary(&mut rng, s + a);
    let mix_b = random_unitary(&mut rng, s + b);
    let shared = frame.columns(0, s);
    let first = shared.hstack(&frame.columns(s, s + a)).unwrap();
    let second = shared.hstack(&frame.columns(s + a, s + a + b)).unwrap();
    (
        Subspace::span(&(&first * &mix_a), &ctx()).unwrap(),
        Subspace::span(&(&second * &mix_b), &ctx()).unwrap(),
    )
}

fn subspace_dims() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (3usize..=8).prop_flat_map(|n| {
        (Just(n), 0..=n).prop_flat_map(move |(n, s)| {
            (Just(n), Just(s), 0..=n - s).prop_flat_map(move |(n, s, a)| {
                (Just(n), Just(s), Just(a), 0..=n - s - a)
            })
        })
    })
}

fn close(a: &Subspace, b: &Subspace) -> bool {
    a.projector_distance(b).unwrap() <= 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ep_is_unitarily_invariant(n in 2usize..=7, seed in any::<u64>(), generic in any::<bool>()) {
        let r = if generic { n } else { seed as usize % n };
        let t = if generic {
            complex_gaussian(&mut rng_from_seed(seed), n, n)
        } else {
            random_ep(n, r, seed).unwrap()
        };
        let u = random_unitary(&mut rng_from_seed(seed ^ 0x5eed), n);
        let conj = &(&u * &t) * &u.adjoint();
        let before = is_ep(&t, &ctx()).unwrap();
        let after = is_ep(&conj, &ctx()).unwrap();
        prop_assert_eq!(before.is_ep, after.is_ep);
        prop_assert!(!before.disagreement && !after.disagreement);
    }

    #[test]
    fn non_ep_stays_non_ep_under_unitary_conjugation(n in 2usize..=7, seed in any::<u64>()) {
        // strictly upper triangular: nilpotent, never EP
        let mut t = complex_gaussian(&mut rng_from_seed(seed), n, n);
        for i in 0..n {
            for j in 0..=i {
                t.set(i, j, 0.0.into());
            }
        }
        let u = random_unitary(&mut rng_from_seed(seed ^ 1), n);
        let conj = &(&u * &t) * &u.adjoint();
        prop_assert!(!is_ep(&t, &ctx()).unwrap().is_ep);
        prop_assert!(!is_ep(&conj, &ctx()).unwrap().is_ep);
    }

    #[test]
    fn lattice_sum_and_intersection_commute((n, s, a, b) in subspace_dims(), seed in any::<u64>()) {
        let (p, q) = overlapping_pair(n, s, a, b, seed);
        prop_assert!(close(&sum(&p, &q).unwrap(), &sum(&q, &p).unwrap()));
        prop_assert!(close(&intersect(&p, &q).unwrap(), &intersect(&q, &p).unwrap()));
    }

    #[test]
    fn lattice_sum_is_associative(n in 3usize..=8, dims in (0usize..=3, 0usize..=3, 0usize..=3), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let mut draw = |k: usize| Subspace::from_orthonormal(random_isometry(&mut rng, n, k.min(n)), ctx());
        let (x, y, z) = (draw(dims.0), draw(dims.1), draw(dims.2));
        let left = sum(&sum(&x, &y).unwrap(), &z).unwrap();
        let right = sum(&x, &sum(&y, &z).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn de_morgan((n, s, a, b) in subspace_dims(), seed in any::<u64>()) {
        let (p, q) = overlapping_pair(n, s, a, b, seed);
        let lhs = complement(&sum(&p, &q).unwrap());
        let rhs = intersect(&complement(&p), &complement(&q)).unwrap();
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn dimension_formula((n, s, a, b) in subspace_dims(), seed in any::<u64>()) {
        let (p, q) = overlapping_pair(n, s, a, b, seed);
        let join = sum(&p, &q).unwrap();
        let meet = intersect(&p, &q).unwrap();
        prop_assert_eq!(join.dim() + meet.dim(), p.dim() + q.dim());
        prop_assert_eq!(meet.dim(), s);
    }

    #[test]
    fn principal_angles_detect_the_intersection((n, s, a, b) in subspace_dims(), seed in any::<u64>()) {
        let (p, q) = overlapping_pair(n, s, a, b, seed);
        let zero_angles = principal_angles(&p, &q)
            .unwrap()
            .into_iter()
            .filter(|&theta| theta < 1e-6)
            .count();
        prop_assert_eq!(zero_angles, intersect(&p, &q).unwrap().dim());
    }

    #[test]
    fn pseudoinverse_involutions(m in 1usize..=7, n in 1usize..=7, seed in any::<u64>()) {
        let r = (seed as usize % m.min(n)) + 1;
        let t = random_with_rank(&mut rng_from_seed(seed), m, n, r, 0.2, 3.0);
        let g = pinv(&t, &ctx()).unwrap();
        prop_assert!(pinv(&g, &ctx()).unwrap().distance(&t) <= 1e-9);
        prop_assert!(pinv(&t.adjoint(), &ctx()).unwrap().distance(&g.adjoint()) <= 1e-9);
    }

    #[test]
    fn penrose_equations_hold(m in 1usize..=8, n in 1usize..=8, seed in any::<u64>()) {
        let r = seed as usize % (m.min(n) + 1);
        let t = random_with_rank(&mut rng_from_seed(seed), m, n, r, 0.1, 2.0);
        let g = mp_svd(&t, &ctx()).unwrap();
        prop_assert_eq!(g.rank.rank, r);
        let report = penrose_residuals(&t, &g.inverse, &ctx()).unwrap();
        prop_assert!(report.within(1e-10 * (1.0 + t.frobenius_norm())), "{:?}", report.residuals);
    }

    #[test]
    fn rank_agrees_for_t_adjoint_and_gram(m in 1usize..=7, n in 1usize..=7, seed in any::<u64>()) {
        let r = seed as usize % (m.min(n) + 1);
        let t = random_with_rank(&mut rng_from_seed(seed), m, n, r, 0.1, 2.0);
        let rank = |x: &ComplexMatrix| numerical_rank(&factorize(x).unwrap(), &ctx()).rank;
        prop_assert_eq!(rank(&t), r);
        prop_assert_eq!(rank(&t.adjoint()), r);
        prop_assert_eq!(rank(&(&t.adjoint() * &t)), r);
    }

    #[test]
    fn tikhonov_errors_decrease(n in 2usize..=7, seed in any::<u64>()) {
        let r = seed as usize % n + 1;
        let t = random_exact_rank(&mut rng_from_seed(seed), n, n, r, 0.1);
        let trace = mp_tikhonov(&t, &default_schedule(), &ctx()).unwrap();
        prop_assert!(trace.is_nonincreasing(1e-14), "{:?}", trace.errors);
        prop_assert!(trace.final_error() <= 1e-5 * trace.reference.frobenius_norm().max(1.0));
    }

    #[test]
    fn ep_factorizations_reproduce(n in 1usize..=7, seed in any::<u64>()) {
        let r = seed as usize % (n + 1);
        let t = random_ep(n, r, seed).unwrap();
        let adj = ep_factor_adjoint(&t, &ctx()).unwrap();
        let com = ep_factor_commuting(&t, &ctx()).unwrap();
        prop_assert!(adj.residual <= 1e-10 && com.residual <= 1e-10);
        prop_assert!(adj.sigma_min_v > 1e-10 && com.sigma_min_v > 1e-10);
        let form = canonical_form(&t, &ctx()).unwrap();
        prop_assert_eq!(form.rank(), r);
        prop_assert!(form.reconstruction_residual <= 1e-10 && form.inverse_residual <= 1e-10);
    }

    #[test]
    fn commuting_ep_products(n in 1usize..=7, seed in any::<u64>()) {
        let (t, s) = random_commuting_ep_pair(n, seed).unwrap();
        prop_assert!(commuting_ep_product(&t, &s, &ctx()).unwrap().holds);
        let report = ep_product_conditions(&t, &s, &ctx()).unwrap();
        prop_assert!(report.cond_i && report.cond_iii && report.cond_iv);
        prop_assert!(report.consistent());
        prop_assert!(kernel_split_check(&t, &s, &ctx()).unwrap().holds);
    }

    #[test]
    fn ep_implies_range_intersection(n in 2usize..=6, seed in any::<u64>()) {
        // independent unitaries: the product is usually not EP, and whatever
        // the outcome the implication and the biconditional must hold
        let rt = seed as usize % n + 1;
        let rs = (seed >> 8) as usize % n + 1;
        let t = random_ep(n, rt, seed).unwrap();
        let s = random_ep(n, rs, seed.wrapping_add(1)).unwrap();
        prop_assert!(ep_product_conditions(&t, &s, &ctx()).unwrap().consistent());
    }

    #[test]
    fn shift_verdicts_are_cutoff_independent(half in 5u64..=120) {
        let base = verify_shift_example(10).unwrap();
        let other = verify_shift_example(2 * half).unwrap();
        prop_assert!(other.passes());
        prop_assert_eq!(other.verdicts(), base.verdicts());
    }

    #[test]
    fn left_multiplication_is_a_homomorphism(seed in any::<u64>()) {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let (a, b) = random_commuting_ep_elements(&alg, seed).unwrap();
        let ab = a.mul(&b).unwrap();
        let product = &left_mult_matrix(&a) * &left_mult_matrix(&b);
        prop_assert!(left_mult_matrix(&ab).distance(&product) <= 1e-10);
        let report = element_is_ep(&a, &ctx()).unwrap();
        prop_assert!(report.is_ep() && report.agree);
        let ideals = ideal_equality_check(&a, &b, &ctx()).unwrap();
        prop_assert_eq!(ideals.ideal_equality_holds, Some(true));
        prop_assert!(ideals.ideal_distance <= 1e-9);
    }
}
