mod common;

use beatty_core::decomposition::{fixed_point_slope, mex_family_slope};
use beatty_core::mesalg::{
    derive_skipping, mex, mex_k, run_mes, run_mes_counted, run_mex, run_self_generating, ExclusionState, GapSequence,
};
use beatty_core::sequences::{BeattySeq, ComplementaryPair};
use beatty_core::Error;
use common::{naive_mes, random_alpha};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn mex_k_counting(set in proptest::collection::btree_set(1u64..80, 0..50), k in 0u64..20) {
        let m = mex_k(&set, k);
        prop_assert!(!set.contains(&m));
        let free_below = (1..m).filter(|x| !set.contains(x)).count() as u64;
        prop_assert_eq!(free_below, k);
        prop_assert_eq!(mex(&set), mex_k(&set, 0));
    }

    #[test]
    fn exclusion_state_matches_naive(skips in proptest::collection::vec(0u64..12, 1..80)) {
        let signed: Vec<i64> = skips.iter().map(|&c| c as i64).collect();
        let run = run_mes(&signed, skips.len()).unwrap();
        let (a, b) = naive_mes(&skips);
        prop_assert_eq!(&run.a, &a);
        prop_assert_eq!(&run.b, &b);
        prop_assert!(run.decomposition_violation().is_none());
    }

    #[test]
    fn exclusion_state_free_counts(marks in proptest::collection::vec(1u64..200, 0..100), probe in 1u64..250) {
        let mut st = ExclusionState::new();
        let mut seen = std::collections::BTreeSet::new();
        for &x in &marks {
            prop_assert_eq!(st.mark(x), seen.insert(x));
        }
        let free = (1..probe).filter(|x| !seen.contains(x)).count() as u64;
        prop_assert_eq!(st.free_below(probe), free);
        prop_assert_eq!(st.is_occupied(probe), seen.contains(&probe));
        let expected_mex = (1..).find(|x| !seen.contains(x)).unwrap();
        prop_assert_eq!(st.mex(), expected_mex);
    }
}

#[test]
fn mes_round_trip_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 10_000;
    for _ in 0..20 {
        let alpha = random_alpha(&mut rng, 50);
        let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
        let (c, r) = derive_skipping(&pair, n).unwrap();
        let skips: Vec<i64> = c.iter().map(|&v| v as i64).collect();
        let run = run_mes(&skips, n).unwrap();
        assert_eq!(run.a, pair.lower().unwrap().prefix(n), "A for alpha = {alpha}");
        assert_eq!(run.b, pair.upper().unwrap().prefix(n), "B for alpha = {alpha}");
        assert_eq!(run.c, c);
        assert_eq!(run.r, r);
    }
}

#[test]
fn mex_and_golden_mes_coincide() {
    let mex = run_mex(&GapSequence::Linear(1), 1000).unwrap();
    let sg = run_self_generating(2, 1000).unwrap();
    assert_eq!(&mex, sg.run());
    let phi = BeattySeq::new(beatty_core::QuadExpr::phi()).unwrap();
    assert_eq!(mex.a, phi.prefix(1000));
}

#[test]
fn work_is_linear_in_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let alpha = random_alpha(&mut rng, 50);
        let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
        let n = 50_000;
        let (c, _) = derive_skipping(&pair, n).unwrap();
        let skips: Vec<i64> = c.iter().map(|&v| v as i64).collect();
        let (run, touched) = run_mes_counted(&skips, n).unwrap();
        let top = *run.b.last().unwrap();
        assert!(touched <= 10 * top, "touched {touched} for max B {top}");
    }
}

#[test]
fn adversarial_skips_keep_decomposition() {
    let rising: Vec<i64> = (0..40).map(|i| 1i64 << i.min(16)).collect();
    let falling: Vec<i64> = rising.iter().rev().copied().collect();
    for (skips, monotone) in [(rising, true), (falling, false)] {
        let run = run_mes(&skips, skips.len()).unwrap();
        assert!(run.decomposition_violation().is_none());
        assert_eq!(run.is_monotone(), monotone);
        let mut all: Vec<u64> = run.a.iter().chain(&run.b).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 2 * skips.len(), "A and B overlap");
    }
}

#[test]
fn mes_rejects_bad_input() {
    assert!(matches!(
        run_mes(&[0, -1], 2),
        Err(Error::NegativeSkip { n: 2, value: -1 })
    ));
    assert!(matches!(
        run_mes(&[0], 2),
        Err(Error::SequenceTooShort {
            needed: 2,
            available: 1
        })
    ));
    assert!(matches!(
        run_mex(&GapSequence::Linear(0), 3),
        Err(Error::GapTooSmall { n: 1, .. })
    ));
    assert!(matches!(
        run_mex(&GapSequence::Explicit(vec![2, 1]), 2),
        Err(Error::Collision { n: 2, value: 3 })
    ));
}

#[test]
fn mex_linear_family_is_beatty() {
    for t in 1..=6u64 {
        let alpha = mex_family_slope(t).unwrap();
        let run = run_mex(&GapSequence::Linear(t as i64), 2000).unwrap();
        let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
        assert_eq!(run.a, pair.lower().unwrap().prefix(2000), "t = {t}");
        assert_eq!(run.b, pair.upper().unwrap().prefix(2000), "t = {t}");
        for (i, (a, b)) in run.a.iter().zip(&run.b).enumerate() {
            assert_eq!(b - a, t * (i as u64 + 1));
        }
    }
}

#[test]
fn self_generating_rules_hit_fixed_points() {
    for k in 1..=6u64 {
        let alpha = fixed_point_slope(k).unwrap();
        let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
        let sg = run_self_generating(k, 3000).unwrap();
        assert_eq!(sg.run().a, pair.lower().unwrap().prefix(3000), "k = {k}");
        assert_eq!(sg.run().b, pair.upper().unwrap().prefix(3000), "k = {k}");
    }
}
