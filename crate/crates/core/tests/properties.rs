use proptest::prelude::*;
use refcommit::lattice::{
    decode_commit, difference_accepted, encode, lattice_mu, LatticeCodeword, Predicate,
};
use refcommit::security::{binding_search, binding_search_finite_precision, estimate, BindingAnalysis, PayloadBinding};
use refcommit::so3::{sample_haar, Rotation, Vec3};
use refcommit::{DLatticeParams, ExactProb, Probability};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit() -> impl Strategy<Value = Vec3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("nonzero", |(x, y, z)| Vec3::new(x, y, z).normalized())
}

fn codeword(d: usize, max: u32) -> impl Strategy<Value = LatticeCodeword> {
    proptest::collection::vec(0..max, d).prop_map(LatticeCodeword::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_preserve_geometry(seed in any::<u64>(), u in unit(), v in unit()) {
        let r: Rotation<f64> = sample_haar(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!((r.apply(&u).dot(&r.apply(&v)) - u.dot(&v)).abs() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        prop_assert!(r.inverse().apply(&r.apply(&u)).distance(&u) < 1e-12);
    }

    #[test]
    fn decode_inverts_encode(d in 1usize..=3, a in codeword(3, 8)) {
        let a = LatticeCodeword::new(a.coords()[..d].to_vec());
        let p = DLatticeParams::with_default_eps(d, 8, Predicate::Lenient).unwrap();
        let v = encode(&p, &a).unwrap();
        prop_assert_eq!(decode_commit(&p, &v), Some(a.clone()));
        // every channel rotation lands on a + e_j or a + 2e_j
        let support = lattice_mu(&p).enumerate_support().unwrap();
        for (i, (r, _)) in support.iter().enumerate() {
            let got = decode_commit(&p, &r.apply(&v)).unwrap();
            prop_assert_eq!(got, a.shifted(i / 2, (i % 2) as u32 + 1));
        }
    }

    #[test]
    fn lenient_accepts_superset(x in codeword(3, 10), y in codeword(3, 10)) {
        if difference_accepted(&x, &y, Predicate::Strict) {
            prop_assert!(difference_accepted(&x, &y, Predicate::Lenient));
        }
    }

    #[test]
    fn lenient_binding_dominates(d in 1usize..=3, l in 2u32..=9) {
        let p = DLatticeParams::with_default_eps(d, l, Predicate::Lenient).unwrap();
        let a: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Lenient);
        let b: BindingAnalysis<ExactProb> = binding_search(&p, Predicate::Strict);
        prop_assert!(a.flip.probability >= b.flip.probability);
        prop_assert!(a.sum_max >= b.sum_max);
    }

    #[test]
    fn random_payloads_bounded(u in unit()) {
        let p = DLatticeParams::with_default_eps(3, 8, Predicate::Lenient).unwrap();
        let pb: PayloadBinding<ExactProb> =
            binding_search_finite_precision(&p, &u, Predicate::Lenient).unwrap();
        prop_assert!(pb.cheat_probability() <= ExactProb::ratio(1, 3));
    }

    #[test]
    fn wilson_contains_rate(k in 0u64..=500, extra in 0u64..500) {
        let n = k + extra.max(1);
        let (lo, hi) = refcommit::security::wilson_interval(k, n, 2.5758293035489004);
        let r = k as f64 / n as f64;
        prop_assert!(lo <= r + 1e-15 && r <= hi + 1e-15);
    }
}

#[test]
fn estimates_are_seed_deterministic() {
    use rand::Rng;
    let f = |rng: &mut ChaCha8Rng| rng.random_bool(0.25);
    assert_eq!(estimate(9_000, 1, f), estimate(9_000, 1, f));
}
