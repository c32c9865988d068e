use num_rational::BigRational;
use proptest::prelude::*;

use grouplab::attacks::{
    distinguish_f3_sprp, f1_trial, f2_trial, f3_trial, slide_attack, verify_key, Guess, SlideConfig,
};
use grouplab::em::EmInstance;
use grouplab::exhaustive::{exact_distribution, probability};
use grouplab::feistel::{PairPermutation, RoundFunction, RoundFunctionChain};
use grouplab::games::psi_games::estimate_rate;
use grouplab::{Coins, Group, SeededCoins};

fn r(n: u32, d: u32) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f3_always_breaks_three_rounds(seed in any::<u64>(), which in 0usize..5) {
        let spec = ["zmod:3", "zmod:257", "sym:4", "dihedral:7", "prod:(xor:2,sym:3)"][which];
        let g = Group::parse(spec).unwrap();
        let mut c = SeededCoins::from_seed(seed);
        let mut cipher = RoundFunctionChain::random(&g, 3, &mut c).unwrap();
        let v = distinguish_f3_sprp(&mut cipher, 20, &mut c).unwrap();
        prop_assert_eq!(v.hits, 20);
        prop_assert_eq!(v.guess, Guess::Cipher);
    }

    #[test]
    fn slide_returns_only_verified_keys(seed in any::<u64>(), which in 0usize..3, d in 1u128..40) {
        let spec = ["zmod:1024", "sym:5", "dihedral:60"][which];
        let g = Group::parse(spec).unwrap();
        let mut c = SeededCoins::from_seed(seed);
        let mut inst = EmInstance::generate(&g, &mut c).unwrap();
        let out = slide_attack(&mut inst, &SlideConfig { d, verify_checks: 8 }, &mut c).unwrap();
        prop_assert_eq!(out.enc_queries, d as u64);
        prop_assert_eq!(out.perm_queries, d as u64);
        if let Some(k) = out.key {
            prop_assert!(verify_key(&mut inst, &k, 8, &mut c).unwrap());
            prop_assert_eq!(&k, inst.key());
        }
    }
}

#[test]
fn one_and_two_round_tests_against_random_permutations_exactly() {
    for n in [4u32, 8, 16] {
        let g = Group::zmod(n as u64).unwrap();
        let d = exact_distribution(|c: &mut dyn Coins| {
            let mut p = PairPermutation::new(&g, c)?;
            f1_trial(&mut p, c)
        })
        .unwrap();
        assert_eq!(probability(&d, |w| *w), r(1, n), "f1 at {n}");
    }
    for n in [4u32, 8] {
        let g = Group::zmod(n as u64).unwrap();
        let probe = g.from_int(1).unwrap();
        let d = exact_distribution(|c: &mut dyn Coins| {
            let mut p = PairPermutation::new(&g, c)?;
            f2_trial(&mut p, &probe, c)
        })
        .unwrap();
        // The second answer is uniform over the other n² − 1 points, n of
        // which carry the required left half.
        assert_eq!(probability(&d, |w| *w), r(n, n * n - 1), "f2 at {n}");
    }
}

#[test]
fn three_round_test_against_random_permutation_exactly() {
    let g = Group::zmod(4).unwrap();
    let d = exact_distribution(|c: &mut dyn Coins| {
        let mut p = PairPermutation::new(&g, c)?;
        f3_trial(&mut p, c)
    })
    .unwrap();
    let p = probability(&d, |w| *w);
    assert!(p <= r(3, 4), "{p}");
    assert!(p > r(0, 1));
}

#[test]
fn distinguishers_rarely_fire_on_random_permutations() {
    for n in [8u64, 16, 32] {
        let g = Group::zmod(n).unwrap();
        let threshold = 3.0 / n as f64;
        let trials: [(&str, fn(&Group, &mut dyn Coins) -> grouplab::Result<bool>); 3] = [
            ("f1", |g, c| f1_trial(&mut PairPermutation::new(g, c)?, c)),
            ("f2", |g, c| {
                let probe = g.sample_non_identity(c)?;
                f2_trial(&mut PairPermutation::new(g, c)?, &probe, c)
            }),
            ("f3", |g, c| f3_trial(&mut PairPermutation::new(g, c)?, c)),
        ];
        for (name, trial) in trials {
            let est = estimate_rate(20_000, n, |c| trial(&g, c)).unwrap();
            assert!(
                est.rate <= threshold + est.ci_halfwidth,
                "{name} at {n}: {} > {threshold}",
                est.rate
            );
        }
    }
}

#[test]
fn four_rounds_look_random_to_f3() {
    let g = Group::zmod(32).unwrap();
    let mut c = SeededCoins::from_seed(77);
    let f = RoundFunction::random(&g, &mut c);
    let h = RoundFunction::random(&g, &mut c);
    let mut cipher = RoundFunctionChain::gffg(&g, f, h);
    let v = distinguish_f3_sprp(&mut cipher, 100, &mut c).unwrap();
    assert_eq!(v.guess, Guess::Random);
    assert!(v.success_rate() <= 3.0 / 32.0, "{}", v.success_rate());
}

#[test]
fn wrong_key_passes_one_check_with_probability_one_over_order_minus_one() {
    let g = Group::zmod(8).unwrap();
    for wrong in 1..8u128 {
        let d = exact_distribution(|c: &mut dyn Coins| {
            let mut inst = EmInstance::generate(&g, c)?;
            let k = g.op(inst.key(), &g.from_int(wrong)?)?;
            verify_key(&mut inst, &k, 1, c)
        })
        .unwrap();
        // With x·k' ≠ x·k, P(x·k') is uniform over the other 7 points and
        // exactly one of them maps to E(x) after multiplying by k'.
        assert_eq!(probability(&d, |w| *w), r(1, 7));
    }
}

#[test]
fn slide_birthday_rate_matches_hypergeometric() {
    let g = Group::zmod(1024).unwrap();
    let d = 32u32;
    let n = 1024u32;
    // A slid pair exists iff one of the d values x_i·k lands among the d
    // distinct y_j: 1 − C(n−d, d)/C(n, d).
    let miss: f64 = (0..d).map(|i| (n - d - i) as f64 / (n - i) as f64).product();
    let expected = 1.0 - miss;
    let cfg = SlideConfig { d: d as u128, verify_checks: 8 };
    let est = estimate_rate(4000, 5, |c| {
        let mut inst = EmInstance::generate(&g, c)?;
        Ok(slide_attack(&mut inst, &cfg, c)?.key.is_some())
    })
    .unwrap();
    assert!((est.rate - expected).abs() <= est.ci_halfwidth, "{} vs {expected}", est.rate);
}
