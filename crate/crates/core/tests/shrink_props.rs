use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toroshrink::linkio::NmLinkSpec;
use toroshrink::shrink::*;

fn nm(n: u64, m: u64) -> NmLinkSpec {
    NmLinkSpec::new(n, m).unwrap()
}

/// `ceil(2mk/n) - 1` written out directly.
fn naive_g(period: &[(u64, u64)], k: u64) -> u64 {
    period.iter().fold(k, |x, &(n, m)| if x == 0 { 0 } else { (2 * m * x).div_ceil(n) - 1 })
}

#[test]
fn k_star_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut corpus: Vec<Vec<(u64, u64)>> = (0..30)
        .map(|_| {
            let p = rng.gen_range(1..=4);
            (0..p).map(|_| (rng.gen_range(1..=8), rng.gen_range(1..=8))).collect()
        })
        .collect();
    // products just above and at 1
    corpus.extend([vec![(7, 4)], vec![(8, 4), (7, 4)], vec![(2, 1)], vec![(3, 2), (4, 3)], vec![(5, 3), (6, 5)]]);
    for period in corpus {
        let links: Vec<_> = period.iter().map(|&(n, m)| nm(n, m)).collect();
        let d = periodic_orbit_decision(&links, 0);
        let first = (1..=1_000_000u64).find(|&k| naive_g(&period, k) >= k);
        assert_eq!(first.is_some(), d.expanding, "{period:?}");
        assert_eq!(d.witness.is_some(), d.expanding, "{period:?}");
        if let (Some(k), Some(ks)) = (first, &d.k_star) {
            assert!(BigUint::from(k) <= *ks, "{period:?}: brute {k} > k* {ks}");
            let ks: u64 = ks.try_into().unwrap();
            assert!(naive_g(&period, ks) >= ks);
        }
    }
}

fn arb_period(max: u64, len: usize) -> impl Strategy<Value = Vec<NmLinkSpec>> {
    prop::collection::vec((1..=max, 1..=max).prop_map(|(n, m)| nm(n, m)), 1..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn criteria_never_contradict(period in arb_period(12, 6)) {
        let seq = LinkSequence::periodic(period.clone()).unwrap();
        let d = decide(&seq, Horizons::new(16, 2, 200).unwrap());
        prop_assert!(d.is_ok(), "{:?}", d);
        let d = d.unwrap();
        prop_assert!(verify_certificate(&d.verdict));
        let expect = if shrinks_by_period_product(&period) { Outcome::Shrinks } else { Outcome::DoesNotShrink };
        prop_assert_eq!(d.verdict.outcome, expect);
        for r in &d.criteria {
            if let Some(o) = r.outcome {
                prop_assert!(o == expect || o == Outcome::Unknown, "{:?}", r);
            }
        }
    }

    #[test]
    fn orbit_agrees_with_product(period in arb_period(12, 6)) {
        let seq = LinkSequence::periodic(period).unwrap();
        let a = period_product(&seq).unwrap();
        let b = orbit_decide(&seq, Horizons::new(8, 1, 100).unwrap()).unwrap();
        prop_assert_eq!(a.outcome, b.outcome);
        prop_assert!(verify_certificate(&b));
    }

    #[test]
    fn gap_patterns_agree(gaps in prop::collection::vec(0u64..=4, 1..=5), prefix in prop::collection::vec(0u64..=4, 0..=2)) {
        let g = GapSequence::new(prefix, GapTail::Periodic(gaps)).unwrap();
        let v = ancel_starbird(&g);
        prop_assert!(v.is_ok(), "{:?}", v);
        let v = v.unwrap();
        prop_assert_eq!(v.outcome, Outcome::DoesNotShrink);
        prop_assert!(verify_certificate(&v));
    }

    #[test]
    fn comparison_survives_smaller_m(period in arb_period(6, 4), drop in prop::collection::vec(0u64..=3, 4)) {
        let b = LinkSequence::periodic(period.clone()).unwrap();
        let claim = DivergenceClaim::HarmonicComparison { c: BigRational::new(1.into(), 64.into()), from: 1 };
        if let Ok(v) = divergent_series(&b, &claim) {
            // lowering m raises every tau and so every comparison term
            let a_links: Vec<_> = period
                .iter()
                .zip(drop.iter().cycle())
                .map(|(l, &d)| nm(l.n(), l.m().saturating_sub(d).max(1)))
                .collect();
            let a = LinkSequence::periodic(a_links).unwrap();
            prop_assert!(verify_certificate(&v));
            prop_assert!(divergent_series(&a, &claim).is_ok());
        }
    }
}
