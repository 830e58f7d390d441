use cycsieve_core::characters::PrimeContext;
use cycsieve_core::cyclotomic::{Cyclotomic, RootCounts};
use cycsieve_core::field::valuation::{product_formula_exponent, RatFn};
use cycsieve_core::field::{is_irreducible, Factorizer, FieldSpec, Poly};
use cycsieve_core::form::MultiForm;
use cycsieve_core::identities::verify_completion;
use cycsieve_core::sieve::fiber_count;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly_strategy(q: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..q, 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn nonzero_poly(q: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    poly_strategy(q, max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn field_q() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7])
}

proptest! {
    #[test]
    fn divrem_reconstructs((q, a, b) in field_q().prop_flat_map(|q| (Just(q), poly_strategy(q, 8), nonzero_poly(q, 5)))) {
        let spec = FieldSpec::from_q(q as u64).unwrap();
        let ring = spec.ring();
        let (quo, rem) = ring.divrem(&a, &b).unwrap();
        prop_assert_eq!(ring.add(&ring.mul(&quo, &b), &rem), a);
        prop_assert!(rem.is_zero() || rem.degree() < b.degree());
    }

    #[test]
    fn irreducibility_matches_trial_division(q in prop::sample::select(vec![3u32, 5, 7]), deg in 1usize..=4, idx in any::<u64>()) {
        let spec = FieldSpec::from_q(q as u64).unwrap();
        let ring = spec.ring();
        let count = (q as u64).pow(deg as u32);
        let mut coeffs: Vec<u32> = (0..deg).map(|i| ((idx % count) / (q as u64).pow(i as u32) % q as u64) as u32).collect();
        coeffs.push(1);
        let f = Poly::from_coeffs(coeffs);
        let has_factor = (1..=deg / 2).any(|d| ring.monics(d).any(|g| ring.rem(&f, &g).is_zero()));
        prop_assert_eq!(is_irreducible(ring, &f), !has_factor);
    }

    #[test]
    fn product_formula((q, num, den) in prop::sample::select(vec![3u32, 5]).prop_flat_map(|q| (Just(q), nonzero_poly(q, 6), nonzero_poly(q, 6)))) {
        let spec = FieldSpec::from_q(q as u64).unwrap();
        let mut factorizer = Factorizer::new(spec.ring().clone());
        let x = RatFn::new(num, den).unwrap();
        prop_assert_eq!(product_formula_exponent(&mut factorizer, spec.ring(), &x).unwrap(), 0);
    }

    #[test]
    fn cyclotomic_machine_and_big_integers_agree(
        a in prop::collection::vec((0u32..5, 0u32..3, -50i64..50), 1..12),
        b in prop::collection::vec((0u32..5, 0u32..3, -50i64..50), 1..12),
    ) {
        let build = |terms: &[(u32, u32, i64)]| {
            terms.iter().fold(Cyclotomic::<i64>::zero(5, 3), |acc, &(i, j, c)| &acc + &Cyclotomic::root(5, 3, i, j).scale(&c))
        };
        let (x, y) = (build(&a), build(&b));
        let small = &x * &y;
        let big = &x.map_int::<BigInt>() * &y.map_int::<BigInt>();
        prop_assert_eq!(small.map_int::<BigInt>(), big);
    }

    #[test]
    fn root_sums_are_order_invariant(mut terms in prop::collection::vec((0u32..7, 0u32..3), 0..40), rot in 0usize..40) {
        let mut counts = RootCounts::new(7, 3);
        for &(i, j) in &terms {
            counts.add(i, j, 1);
        }
        if !terms.is_empty() {
            let k = rot % terms.len();
            terms.rotate_left(k);
        }
        terms.reverse();
        let direct = terms.iter().fold(Cyclotomic::<i64>::zero(7, 3), |acc, &(i, j)| &acc + &Cyclotomic::root(7, 3, i, j));
        prop_assert_eq!(counts.finish::<i64>(), direct);
    }

    #[test]
    fn fibers_match_root_enumeration(
        (q, ell, pi_idx) in prop::sample::select(vec![(3u32, 2u32), (7, 2), (7, 3)]).prop_flat_map(|(q, l)| (Just(q), Just(l), 0usize..8)),
        xs in prop::collection::vec(prop::collection::vec(0u32..7, 0..4), 3),
    ) {
        let spec = FieldSpec::from_q(q as u64).unwrap();
        let form = MultiForm::parse_text(&spec, 2, &format!("X0^{ell} + T*X1^{ell} + (1+T)*X2^{ell}")).unwrap();
        let primes: Vec<_> = (1..=2).flat_map(|d| spec.primes_of_degree(d).unwrap().primes).collect();
        let pi = &primes[pi_idx % primes.len()];
        let ctx = PrimeContext::new(&spec, pi, ell).unwrap();
        let x: Vec<Poly> = xs.iter().map(|c| Poly::from_coeffs(c.iter().map(|v| v % q).collect())).collect();
        let res = ctx.residue();
        let value = res.reduce(&form.eval(spec.ring(), &x));
        let roots = (0..res.size() as u32).filter(|&y| res.field().pow(y, ell as u64) == value).count() as u32;
        let fiber = fiber_count(&ctx, &form, &x);
        prop_assert!(fiber == 0 || fiber == 1 || fiber == ell);
        prop_assert_eq!(fiber, roots);
        prop_assert_eq!(ctx.root_count_pair(value).1 as u32, roots);
    }

    #[test]
    fn completion_is_symmetric_in_the_pair(a in 0usize..3, c in 0usize..3, b in 1usize..2) {
        prop_assume!(a != c);
        let spec = FieldSpec::from_q(3).unwrap();
        let g = MultiForm::parse_text(&spec, 2, "X0^2 + X1^2 + T*X2^2").unwrap();
        let linear = spec.primes_of_degree(1).unwrap().primes;
        let one = verify_completion(&spec, &linear[a], &linear[c], 2, 1, 1, &g, b, 1 << 24).unwrap();
        let two = verify_completion(&spec, &linear[c], &linear[a], 2, 1, 1, &g, b, 1 << 24).unwrap();
        prop_assert!(one.equal && two.equal);
        prop_assert_eq!(one.lhs, two.lhs);
    }

    #[test]
    fn form_text_round_trip(coeffs in prop::collection::vec(prop::collection::vec(0u32..3, 0..3), 3), mixed in 0u32..3) {
        let spec = FieldSpec::from_q(3).unwrap();
        let ring = spec.ring();
        let mut terms: Vec<(Vec<u32>, Poly)> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut e = vec![0; 3];
                e[i] = 2;
                (e, Poly::from_coeffs(c.clone()))
            })
            .collect();
        terms.push((vec![1, 1, 0], Poly::constant(mixed)));
        let form = MultiForm::new(ring, 2, 2, terms).unwrap();
        prop_assume!(!form.is_zero());
        let text = form.to_string();
        prop_assert_eq!(MultiForm::parse_text(&spec, 2, &text).unwrap(), form);
    }

    #[test]
    fn poly_text_round_trip(p in poly_strategy(7, 6)) {
        let spec = FieldSpec::from_q(7).unwrap();
        prop_assert_eq!(spec.parse_poly(&p.to_string()).unwrap(), p);
    }
}
