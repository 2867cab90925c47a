use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use toroshrink::drf::{compose, nm_drf};
use toroshrink::linkio::NmLinkSpec;
use toroshrink::shrink::*;

fn nm(n: u64, m: u64) -> NmLinkSpec {
    NmLinkSpec::new(n, m).unwrap()
}

fn periodic(links: &[(u64, u64)]) -> LinkSequence {
    LinkSequence::periodic(links.iter().map(|&(n, m)| nm(n, m)).collect()).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn growing_chain() -> LinkSequence {
    LinkSequence::Generator(Generator::single("2*i", "i+1").unwrap())
}

fn alternating_chain() -> LinkSequence {
    LinkSequence::from_json(r#"{"variant":"generator","even":{"n":"2*s^2","m":"1"},"odd":{"n":"2","m":"(s+1)^2"}}"#)
        .unwrap()
}

fn decided(seq: &LinkSequence) -> ShrinkVerdict {
    let d = decide(seq, Horizons::default()).unwrap();
    if d.verdict.outcome != Outcome::Unknown {
        assert!(verify_certificate(&d.verdict), "{:?}", d.verdict);
    }
    d.verdict
}

#[test]
fn period_product_examples() {
    let bing = period_product(&periodic(&[(2, 1)])).unwrap();
    assert_eq!(bing.outcome, Outcome::Shrinks);
    assert!(verify_certificate(&bing));
    let wh = period_product(&periodic(&[(1, 1)])).unwrap();
    assert_eq!(wh.outcome, Outcome::DoesNotShrink);
    assert_eq!(period_product(&periodic(&[(2, 2)])).unwrap().outcome, Outcome::DoesNotShrink);
    assert!(period_product(&growing_chain()).is_err());
}

#[test]
fn sher_armentrout_examples() {
    let v = sher_armentrout(&growing_chain(), 100).unwrap();
    assert_eq!(v.outcome, Outcome::DoesNotShrink);
    assert!(verify_certificate(&v));
    assert!(sher_armentrout(&periodic(&[(1, 1)]), 100).is_ok());
    assert_eq!(sher_armentrout(&periodic(&[(2, 1)]), 100).unwrap_err(), Rejection::Violation { index: 1 });
    // fails at the odd index 1, which is a Bing link
    assert!(matches!(sher_armentrout(&alternating_chain(), 100), Err(Rejection::Violation { .. })));
}

#[test]
fn convergent_series_examples() {
    // one Bing link between consecutive Whitehead links
    let seq = LinkSequence::BingWhitehead(GapSequence::periodic(vec![1]).unwrap());
    let flat = periodic(&[(2, 1), (1, 1)]);
    let claim = ConvergenceClaim::GeometricRatio { ratio: rat(1, 2), from: 1, stride: 2 };
    for s in [&seq, &flat] {
        let v = convergent_series(s, &claim).unwrap();
        assert!(verify_certificate(&v));
        let Some(Certificate::GeometricTail { bound, k0, .. }) = &v.certificate else { panic!() };
        // partial sums to 100 terms, and the closed value 2 * sum c_i/2^i + 1 = 3
        let links = s.links(100);
        let sum = partial_products(&links).iter().skip(1).fold(BigRational::zero(), |a, p| a + p);
        assert!(sum < rat(3, 1) && sum > rat(29999, 10000));
        assert!(bound >= &rat(3, 1));
        assert!(BigRational::from_integer((*k0).clone().into()) > *bound);
    }
    let v = convergent_series(&periodic(&[(1, 1)]), &ConvergenceClaim::GeometricRatio { ratio: rat(1, 2), from: 1, stride: 1 })
        .unwrap();
    let Some(Certificate::GeometricTail { bound, k0, .. }) = &v.certificate else { panic!() };
    assert_eq!(bound, &rat(2, 1));
    assert_eq!(k0, &BigUint::from(3u32));
    // no ratio below 1 bounds a Bing link
    let bing = periodic(&[(2, 1)]);
    assert!(convergent_series_auto(&bing).is_err());
    assert_eq!(
        convergent_series(&bing, &ConvergenceClaim::GeometricRatio { ratio: rat(99, 100), from: 1, stride: 1 }).unwrap_err(),
        Rejection::Violation { index: 1 }
    );
    // with stride 1 the Bing link in the alternating sequence is the first violation
    assert_eq!(
        convergent_series(&flat, &ConvergenceClaim::GeometricRatio { ratio: rat(1, 2), from: 1, stride: 1 }).unwrap_err(),
        Rejection::Violation { index: 1 }
    );
    let user = ConvergenceClaim::UserBound { bound: rat(3, 1), note: "sum equals 3".into() };
    let v = convergent_series(&seq, &user).unwrap();
    assert!(verify_certificate(&v));
    let low = ConvergenceClaim::UserBound { bound: rat(2, 1), note: "too small".into() };
    assert!(matches!(convergent_series(&seq, &low), Err(Rejection::Violation { .. })));
}

#[test]
fn convergent_series_on_generators() {
    // tau_i = 2 / 2i -> 0
    let g = LinkSequence::Generator(Generator::single("2", "i").unwrap());
    let v = convergent_series_auto(&g).unwrap();
    assert!(verify_certificate(&v), "{v:?}");
    let v = bounded_n(&g).unwrap();
    assert_eq!(v.outcome, Outcome::DoesNotShrink);
    assert!(verify_certificate(&v));
    assert!(convergent_series_auto(&growing_chain()).is_err());
    assert!(convergent_series_auto(&alternating_chain()).is_err());
}

#[test]
fn divergent_series_examples() {
    let bing = periodic(&[(2, 1)]);
    let v = divergent_series(&bing, &DivergenceClaim::PeriodicProduct).unwrap();
    assert!(verify_certificate(&v));
    let claim = DivergenceClaim::HarmonicComparison { c: rat(1, 2), from: 1 };
    let v = divergent_series(&bing, &claim).unwrap();
    assert!(verify_certificate(&v));
    // terms of order 1/j^2 fall below any c/j
    let e = divergent_series(&alternating_chain(), &DivergenceClaim::HarmonicComparison { c: rat(1, 100), from: 1 });
    assert!(matches!(e, Err(Rejection::Violation { .. })), "{e:?}");
    assert!(divergent_series(&periodic(&[(1, 1)]), &DivergenceClaim::PeriodicProduct).is_err());
}

#[test]
fn alternating_chain_terms() {
    // the partial product is 1 after each odd/even pair, so term j is 1/(2 ceil(j/2)^2)
    let seq = alternating_chain();
    let links = seq.links(40);
    let p = partial_products(&links);
    for j in 1..=40usize {
        let term = &p[j] / BigRational::from_integer(links[j - 1].n().into());
        let s = (j as i64 + 1) / 2;
        assert_eq!(term, rat(1, 2 * s * s), "j = {j}");
    }
}

#[test]
fn bounded_n_examples() {
    assert_eq!(bounded_n(&periodic(&[(2, 1)])).unwrap().outcome, Outcome::Shrinks);
    assert_eq!(bounded_n(&periodic(&[(2, 2)])).unwrap().outcome, Outcome::DoesNotShrink);
    assert!(verify_certificate(&bounded_n(&periodic(&[(2, 2)])).unwrap()));
    assert!(matches!(bounded_n(&growing_chain()), Err(Rejection::Inapplicable { .. })));
}

#[test]
fn ancel_starbird_examples() {
    let ones = ancel_starbird(&GapSequence::periodic(vec![1]).unwrap()).unwrap();
    assert_eq!(ones.outcome, Outcome::DoesNotShrink);
    let pow = ancel_starbird(&GapSequence::closed_form("2^i").unwrap()).unwrap();
    assert_eq!(pow.outcome, Outcome::Shrinks);
    let lin = ancel_starbird(&GapSequence::closed_form("i").unwrap()).unwrap();
    assert_eq!(lin.outcome, Outcome::DoesNotShrink);
    for v in [&ones, &pow, &lin] {
        assert!(verify_certificate(v), "{v:?}");
    }
    // sum i/2^i = 2 exactly, so the ratio-test bound is at least 2
    let Some(Certificate::GapSeries { rule: GapRule::RatioTest { bound, .. } }) = &lin.certificate else { panic!() };
    assert!(bound >= &rat(2, 1));
    let unknown = ancel_starbird(&GapSequence::explicit(vec![1, 2, 3]).unwrap()).unwrap();
    assert_eq!(unknown.outcome, Outcome::Unknown);
    assert_eq!(ancel_starbird(&GapSequence::closed_form("i*2^i").unwrap()).unwrap().outcome, Outcome::Shrinks);
    assert_eq!(ancel_starbird(&GapSequence::closed_form("3^i - 2^i").unwrap()).unwrap().outcome, Outcome::Shrinks);
}

#[test]
fn gap_series_identity() {
    // sum_j prod tau = 2 sum c_i/2^i + 1 for periodic gaps, checked on partial sums
    for gaps in [vec![1], vec![0, 2], vec![3, 0, 1]] {
        let g = GapSequence::periodic(gaps.clone()).unwrap();
        let seq = LinkSequence::BingWhitehead(g.clone());
        let links = seq.links(400);
        let lhs = partial_products(&links).iter().skip(1).fold(BigRational::zero(), |a, p| a + p);
        let whiteheads = links.iter().filter(|l| l.n() == 1).count() as u64;
        let rhs = (1..=whiteheads).fold(BigRational::zero(), |a, i| {
            a + BigRational::new(BigInt::from(g.gap(i).unwrap()) * 2, BigInt::from(2u32).pow(i as u32))
        }) + BigRational::one();
        let diff = if lhs > rhs { &lhs - &rhs } else { &rhs - &lhs };
        assert!(diff < rat(1, 1_000_000), "{gaps:?}");
    }
}

#[test]
fn orbit_examples() {
    let bing = periodic(&[(2, 1)]);
    let v = orbit_decide(&bing, Horizons::new(10, 1, 100).unwrap()).unwrap();
    assert_eq!(v.outcome, Outcome::Shrinks);
    let Some(Certificate::BlockDescent { traces, .. }) = &v.certificate else { panic!() };
    let ten: Vec<BigUint> = (0..=10u32).rev().map(BigUint::from).collect();
    assert_eq!(traces[0].values, ten);
    assert!(verify_certificate(&v));

    let wh = orbit_decide(&periodic(&[(1, 1)]), Horizons::default()).unwrap();
    assert_eq!(wh.outcome, Outcome::DoesNotShrink);
    assert!(verify_certificate(&wh));

    let alternating = orbit_decide(&alternating_chain(), Horizons::default()).unwrap();
    assert_eq!(alternating.outcome, Outcome::Shrinks);
    assert!(verify_certificate(&alternating));

    let growing = orbit_decide(&growing_chain(), Horizons::default()).unwrap();
    assert_eq!(growing.outcome, Outcome::Unknown);
    let ev = growing.evidence.unwrap();
    assert_eq!(ev.reached_zero, 0);
    assert_eq!(ev.unresolved, ev.orbits);

    let explicit = LinkSequence::Explicit { links: vec![nm(2, 1); 5] };
    let v = orbit_decide(&explicit, Horizons::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
    assert!(v.evidence.unwrap().sequence_exhausted);
    assert!(orbit_decide(&bing, Horizons { k_max: 0, m_max: 1, p_max: 1 }).is_err());
}

#[test]
fn alternating_chain_two_step_composite() {
    for s in 0..=50u64 {
        let fs = [nm(2, (s + 1) * (s + 1)), nm(2 * (s + 1) * (s + 1), 1)];
        let fs: Vec<_> = fs.into_iter().map(nm_drf).collect();
        for k in 1..=1000u64 {
            let o = compose(&fs, &BigUint::from(k)).unwrap();
            // at s = 0 both links are Bing links
            let expect = if s == 0 { k.saturating_sub(2) } else { k - 1 };
            assert_eq!(o.values[2], BigUint::from(expect), "s = {s}, k = {k}");
        }
    }
}

#[test]
fn decide_examples() {
    assert_eq!(decided(&periodic(&[(2, 1)])).outcome, Outcome::Shrinks);
    assert_eq!(decided(&periodic(&[(1, 1)])).outcome, Outcome::DoesNotShrink);
    assert_eq!(decided(&periodic(&[(2, 2)])).outcome, Outcome::DoesNotShrink);
    let v = decided(&growing_chain());
    assert_eq!((v.outcome, v.criterion), (Outcome::DoesNotShrink, CriterionId::SherArmentrout));
    let v = decided(&alternating_chain());
    assert_eq!((v.outcome, v.criterion), (Outcome::Shrinks, CriterionId::Orbit));
    let v = decided(&LinkSequence::Explicit { links: vec![nm(2, 1)] });
    assert_eq!(v.outcome, Outcome::Unknown);
    let v = decided(&LinkSequence::BingWhitehead(GapSequence::closed_form("2^i").unwrap()));
    assert_eq!(v.outcome, Outcome::Shrinks);
}

#[test]
fn mutated_certificates_are_rejected() {
    let mut v = period_product(&periodic(&[(2, 1), (1, 1)])).unwrap();
    assert!(verify_certificate(&v));
    if let Some(Certificate::PeriodProduct { product, .. }) = &mut v.certificate {
        *product = rat(1, 1);
    }
    assert!(!verify_certificate(&v));

    let mut v = orbit_decide(&periodic(&[(1, 1)]), Horizons::default()).unwrap();
    if let Some(Certificate::FixedPoint { trace, .. }) = &mut v.certificate {
        trace[1] += 1u32;
    }
    assert!(!verify_certificate(&v));

    let mut v = orbit_decide(&periodic(&[(2, 1)]), Horizons::default()).unwrap();
    if let Some(Certificate::BlockDescent { traces, .. }) = &mut v.certificate {
        traces[0].values[3] = BigUint::from(7u32);
    }
    assert!(!verify_certificate(&v));

    let mut v = bounded_n(&periodic(&[(2, 2)])).unwrap();
    v.outcome = Outcome::Shrinks;
    assert!(!verify_certificate(&v));

    let mut v = sher_armentrout(&periodic(&[(1, 1)]), 10).unwrap();
    v.sequence = periodic(&[(1, 1), (2, 1)]);
    assert!(!verify_certificate(&v));
}

#[test]
fn verdicts_serialize() {
    for seq in [growing_chain(), alternating_chain(), periodic(&[(3, 2), (1, 1)])] {
        let v = decided(&seq);
        let json = serde_json::to_string(&v).unwrap();
        let back: ShrinkVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert!(verify_certificate(&back));
    }
}
