mod common;

use beatty_core::decomposition::{
    defining_slope, derived_slopes, fixed_point_slope, frequency_k, slope_from_defining, verify_corollary1,
    verify_entry, verify_mes_produces_beatty, verify_mex_family, verify_wythoff, Battery, BatteryEntry, Identity,
    PairPrefix,
};
use beatty_core::mesalg::run_self_generating;
use beatty_core::sequences::ComplementaryPair;
use beatty_core::{Error, QuadExpr};
use common::{random_alpha, random_slope, to_u64, IntervalOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(p: i64, q: i64, d: i64, r: i64) -> QuadExpr {
    QuadExpr::make(p, q, d, r).unwrap()
}

/// Counts `A` and `B` members between `a_n` and `b_n` by brute force and
/// compares with floors computed by the interval oracle.
#[test]
fn counts_match_slopes_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut oracle = IntervalOracle::new();
    for _ in 0..10 {
        let alpha = random_alpha(&mut rng, 50);
        let bundle = derived_slopes(&alpha).unwrap();
        let n = 2000u64;
        let b: Vec<u64> = (1..=n).map(|m| to_u64(&oracle.floor_mul(&bundle.beta, m))).collect();
        let top = b[n as usize - 1];
        let a: Vec<u64> = (1..)
            .map(|m| to_u64(&oracle.floor_mul(&alpha, m)))
            .take_while(|&x| x <= top)
            .collect();
        for m in 1..=n as usize {
            let (am, bm) = (a[m - 1], b[m - 1]);
            let between = |s: &[u64]| s.iter().filter(|&&x| am < x && x < bm).count() as u64;
            let (c, r) = (between(&a), between(&b));
            assert_eq!(bm - am, c + r + 1);
            assert_eq!(
                c,
                to_u64(&oracle.floor_mul(&bundle.gamma, m as u64)),
                "c_{m} for {alpha}"
            );
            assert_eq!(r, to_u64(&oracle.floor_mul(&bundle.rho, m as u64)), "r_{m} for {alpha}");
        }
    }
}

#[test]
fn pair_identities_on_random_slopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let alpha = random_alpha(&mut rng, 50);
        let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
        let prefix = PairPrefix::new(&pair, 10_000).unwrap();
        for report in [
            prefix.decomposition(),
            prefix.slope_match().unwrap(),
            prefix.identity_12a().unwrap(),
            prefix.identity_12b().unwrap(),
            prefix.floor_sum(),
            prefix.r_differences(),
            prefix.c_differences(),
            verify_corollary1(&alpha, 10_000).unwrap(),
        ] {
            assert!(
                report.passed(),
                "{} for {alpha}: {:?}",
                report.identity,
                report.failures
            );
        }
    }
}

#[test]
fn standard_battery_passes() {
    for entry in Battery::standard(10_000).entries {
        for report in verify_entry(&entry).unwrap() {
            assert!(
                report.passed(),
                "{} on {}: {:?}",
                report.identity,
                entry.label,
                report.failures
            );
        }
    }
}

#[test]
fn corrupted_complement_is_caught() {
    let entry = BatteryEntry {
        label: "bad".into(),
        slope: QuadExpr::sqrt(2),
        n: 2000,
        beta_override: Some(
            q(2, 1, 2, 1)
                .checked_add(&QuadExpr::rational(1, 1000).unwrap())
                .unwrap(),
        ),
    };
    let reports = verify_entry(&entry).unwrap();
    let decomposition = reports.iter().find(|r| r.identity == Identity::Decomposition).unwrap();
    assert!(!decomposition.passed());
}

#[test]
fn defining_slope_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let delta = random_slope(&mut rng, 50, (1, 1), (12, 1));
        let k = rng.gen_range(1..=6u64);
        let alpha = slope_from_defining(&delta, k).unwrap();
        assert_eq!(frequency_k(&alpha).unwrap(), k);
        assert_eq!(defining_slope(&alpha).unwrap(), (delta.clone(), k));
        let report = verify_mes_produces_beatty(&delta, k, 5000).unwrap();
        assert!(report.passed(), "delta = {delta}, k = {k}: {:?}", report.failures);
    }
}

#[test]
fn defining_slope_below_one_is_rejected() {
    let delta = q(-1, 1, 5, 2); // φ − 1
    assert!(matches!(
        slope_from_defining(&delta, 2),
        Err(Error::SlopeOutOfRange { .. })
    ));
    assert!(matches!(
        slope_from_defining(&QuadExpr::integer(3), 2),
        Err(Error::NotIrrational(_))
    ));
}

#[test]
fn sqrt13_example() {
    let delta = q(0, 1, 13, 2);
    assert_eq!(slope_from_defining(&delta, 3).unwrap(), q(187, 2, 13, 113));
    let alpha = q(187, 2, 13, 113);
    let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
    let prefix = PairPrefix::new(&pair, 12).unwrap();
    let gamma = derived_slopes(&alpha).unwrap().gamma;
    assert_eq!(prefix.c()[11], 4);
    assert_eq!(gamma.scale(12).floor(), 4.into());
}

#[test]
fn fixed_point_four_is_self_generating() {
    let alpha = fixed_point_slope(4).unwrap();
    assert_eq!(alpha, q(3, 1, 17, 4));
    let (delta, k) = defining_slope(&alpha).unwrap();
    assert_eq!((delta, k), (alpha.clone(), 4));
    let (pair, _) = ComplementaryPair::from_slope(&alpha).unwrap();
    let sg = run_self_generating(4, 1000).unwrap();
    assert_eq!(sg.run().a, pair.lower().unwrap().prefix(1000));
}

#[test]
fn wythoff_and_mex_family() {
    assert!(verify_wythoff(100_000).passed());
    for t in 1..=5 {
        assert!(verify_mex_family(t, 5000).unwrap().passed(), "t = {t}");
    }
}

#[test]
fn corollary1_reorients_large_slopes() {
    let report = verify_corollary1(&q(3, 1, 5, 2), 1000).unwrap();
    assert!(report.passed());
    assert_eq!(report.alpha, QuadExpr::phi());
    assert_eq!(report.warnings.len(), 1);
    assert!(verify_corollary1(&QuadExpr::rational(3, 2).unwrap(), 10).is_err());
}

#[test]
fn report_json_shape() {
    let report = verify_wythoff(10);
    let v: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert_eq!(v["identity"], "wythoff");
    assert_eq!(v["N"], 10);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert!(v["elapsed_ms"].is_u64());
    assert!(v.get("aborted").is_none());
}

#[test]
fn battery_parsing() {
    let text = r#"
default_n = 500

[[slope]]
expr = "sqrt(2)"

[[slope]]
expr = "(1+1*sqrt(5))/2"
n = 100
label = "golden"
"#;
    let battery = Battery::parse(text, 7).unwrap();
    assert_eq!(battery.entries.len(), 2);
    assert_eq!(battery.entries[0].n, 500);
    assert_eq!(battery.entries[1].label, "golden");
    assert_eq!(battery.entries[1].slope, QuadExpr::phi());
    assert!(matches!(
        Battery::parse("[[slope]]\nexpr = \"3/2\"\n", 7),
        Err(Error::NotIrrational(_))
    ));
    assert!(matches!(
        Battery::parse("[[slope]]\nexpr = \"sqrt(\"\n", 7),
        Err(Error::Exact(_))
    ));
    assert!(matches!(Battery::parse("default_n = \"x\"", 7), Err(Error::Config(_))));
}
