mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stablecy::algebra::truncated_polynomial;
use stablecy::bimod::{syzygy, twisted_bimodule, DEFAULT_DIM_CAP};
use stablecy::classify::{solve_min_congruence, CongruenceProblem};
use stablecy::exactlin::{Field, Matrix, Scalar};
use stablecy::families::{construct_family, parse_family};

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::fp(2)), Just(Field::fp(3)), Just(Field::fp(7)), Just(Field::rationals())]
}

fn scalars(f: Field, n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(-6i64..=6, n).prop_map(move |v| v.into_iter().map(|x| f.from_i64(x)).collect())
}

fn matrix(f: Field, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    scalars(f, rows * cols).prop_map(move |v| Matrix::from_rows(f, &v.chunks(cols.max(1)).take(rows).map(|c| c.to_vec()).collect::<Vec<_>>()))
}

fn field_and_matrix() -> impl Strategy<Value = (Field, Matrix)> {
    (field(), 1usize..6, 1usize..6).prop_flat_map(|(f, r, c)| (Just(f), matrix(f, r, c)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms((f, v) in field().prop_flat_map(|f| (Just(f), scalars(f, 3)))) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(&(a + b) + c, a + &(b + c));
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(a + &f.zero(), a.clone());
        prop_assert_eq!(a * &f.one(), a.clone());
        prop_assert!((a + &(-a)).is_zero());
        if !a.is_zero() {
            prop_assert!((a * &a.inv().unwrap()).is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn kernel_is_annihilated_and_rank_nullity((_f, m) in field_and_matrix()) {
        let ker = m.kernel_basis();
        prop_assert_eq!(ker.len() + m.rank(), m.cols());
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_round_trip((_f, m, x) in field_and_matrix().prop_flat_map(|(f, m)| { let c = m.cols(); (Just(f), Just(m), scalars(f, c)) })) {
        let b = m.mul_vec(&x);
        let sol = m.solve(&b).unwrap();
        prop_assert_eq!(m.mul_vec(&sol.particular), b);
        for k in &sol.kernel {
            prop_assert!(m.mul_vec(k).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rref_is_idempotent((_f, m) in field_and_matrix()) {
        let (r, piv) = m.rref();
        let (r2, piv2) = r.rref();
        prop_assert_eq!(r, r2);
        prop_assert_eq!(piv, piv2);
    }

    #[test]
    fn congruence_solver_matches_scan(a in -40i64..40, b in -40i64..40, modulus in 1i64..60, lo in -5i64..5, width in 0i64..80) {
        let p = CongruenceProblem { a, b, modulus, lo, hi: lo + width };
        let scan = (p.lo..=p.hi).find(|&l| (a * l - b).rem_euclid(modulus) == 0);
        prop_assert_eq!(solve_min_congruence(&p), scan);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn truncated_polynomial_is_associative(n in 1usize..7, f in field(), seed in any::<u64>()) {
        let a = truncated_polynomial(n, f);
        prop_assert!(a.check_associativity());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = if n >= 2 { random_trunc_automorphism(&a, &mut rng) } else { stablecy::algebra::AlgebraMorphism::identity(&a) };
        prop_assert!(phi.check_homomorphism(&a).is_ok());
    }

    #[test]
    fn bimodule_actions_commute(n in 2usize..6, p in prop_oneof![Just(2u32), Just(3), Just(5)], seed in any::<u64>()) {
        let a = truncated_polynomial(n, Field::fp(p));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_trunc_automorphism(&a, &mut rng);
        let m = twisted_bimodule(&a, &phi).unwrap();
        let om = syzygy(&a, &m, DEFAULT_DIM_CAP, 1).unwrap().kernel;
        prop_assert!(bimodule_commutes(&a, &m, &mut rng));
        prop_assert!(bimodule_commutes(&a, &om, &mut rng));
    }

    #[test]
    fn covers_are_minimal(n in 2usize..6, p in prop_oneof![Just(2u32), Just(3)], seed in any::<u64>()) {
        let a = truncated_polynomial(n, Field::fp(p));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = twisted_bimodule(&a, &random_trunc_automorphism(&a, &mut rng)).unwrap();
        prop_assert!(cover_is_minimal(&a, &m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn twist_round_trip_on_truncated(n in 2usize..=5, p in prop_oneof![Just(2u32), Just(3), Just(5)], seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(twist_round_trip(n, p, &mut rng, seed), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn twist_round_trip_on_family(seed in any::<u64>()) {
        let b = construct_family(&parse_family("A3:r=1:t=2").unwrap(), Field::fp(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(family_round_trip(&b, &mut rng, seed), Ok(()));
        let m = twisted_bimodule(&b.algebra, &b.sigma).unwrap();
        prop_assert!(bimodule_commutes(&b.algebra, &m, &mut rng));
        prop_assert!(cover_is_minimal(&b.algebra, &m));
    }
}
