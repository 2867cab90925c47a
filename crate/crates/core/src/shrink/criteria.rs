//! Series criteria on `tau_i = n_i / 2m_i` and the Bing/Whitehead gap test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linkio::NmLinkSpec;

use super::certificate::{check_windows, Certificate, GapRule, WindowKind};
use super::expr::Poly;
use super::orbit::orbit_decide;
use super::sequence::{partial_products, tau_product, GapSequence, GapTail, Generator, LinkSequence, THRESHOLD_LIMIT};
use super::{floor_plus_one, CriterionId, Horizons, Outcome, Rejection, ShrinkError, ShrinkVerdict};

/// Terms scanned when looking for a counterexample to a comparison claim.
const SCAN: u64 = 10_000;
/// Terms of the series checked against a caller-supplied bound.
const USER_BOUND_TERMS: u64 = 1_000;

/// `prod n >= prod 2m` over one period.
pub fn shrinks_by_period_product(period: &[NmLinkSpec]) -> bool {
    let mut n: u128 = 1;
    let mut two_m: u128 = 1;
    for l in period {
        match (n.checked_mul(l.n() as u128), two_m.checked_mul(2 * l.m() as u128)) {
            (Some(a), Some(b)) => (n, two_m) = (a, b),
            _ => return tau_product(period) >= BigRational::one(),
        }
    }
    n >= two_m
}

/// Periodic sequences shrink iff the tau product over one period is at least 1.
pub fn period_product(seq: &LinkSequence) -> Result<ShrinkVerdict, Rejection> {
    let LinkSequence::Periodic { links } = seq else {
        return Err(Rejection::inapplicable("not periodic"));
    };
    let product = tau_product(links);
    let outcome = if shrinks_by_period_product(links) { Outcome::Shrinks } else { Outcome::DoesNotShrink };
    let cert = Certificate::PeriodProduct { prefix_len: 0, period_len: links.len() as u64, product };
    Ok(ShrinkVerdict::certified(outcome, CriterionId::PeriodProduct, seq, cert))
}

/// `n_i < 2m_i` for every `i`: each disc function satisfies `D(k) >= k`.
pub fn sher_armentrout(seq: &LinkSequence, horizon: u64) -> Result<ShrinkVerdict, Rejection> {
    let proof = check_windows(seq, 1, 1, 1, &WindowKind::Growth, horizon)?;
    Ok(ShrinkVerdict::certified(
        Outcome::DoesNotShrink,
        CriterionId::SherArmentrout,
        seq,
        Certificate::StepGrowth { proof },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceClaim {
    /// Every product of `stride` consecutive taus starting at index `>= from` is at most `ratio`.
    GeometricRatio { ratio: BigRational, from: u64, stride: u64 },
    /// The caller asserts the series is at most `bound`.
    UserBound { bound: BigRational, note: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DivergenceClaim {
    /// `(1/n_j) prod_{i<=j} tau_i >= c/j` for every `j >= from`.
    HarmonicComparison { c: BigRational, from: u64 },
    /// Eventually periodic with period product at least 1.
    PeriodicProduct,
}

/// Head `sum_{j=1}^{from-2} P_j` and geometric tail bound
/// `sum_{t<stride} P_{from-1+t} / (1 - ratio)` of the partial product series.
pub(crate) fn series_tail_bound(
    seq: &LinkSequence,
    ratio: &BigRational,
    from: u64,
    stride: u64,
) -> Option<(BigRational, BigRational)> {
    let need = (from + stride).saturating_sub(2) as usize;
    let links = seq.links(need);
    if links.len() < need || *ratio >= BigRational::one() {
        return None;
    }
    let p = partial_products(&links);
    let head = p[1..(from as usize).saturating_sub(1).max(1)].iter().fold(BigRational::zero(), |a, x| a + x);
    let window = p[(from - 1) as usize..(from - 1 + stride) as usize].iter().fold(BigRational::zero(), |a, x| a + x);
    Some((head, window / (BigRational::one() - ratio)))
}

/// A convergent sum of partial tau products gives a start value `k0` above the
/// sum, from which no orbit reaches zero.
pub fn convergent_series(seq: &LinkSequence, claim: &ConvergenceClaim) -> Result<ShrinkVerdict, Rejection> {
    let cert = match claim {
        ConvergenceClaim::GeometricRatio { ratio, from, stride } => {
            if ratio.is_negative() || *ratio >= BigRational::one() {
                return Err(Rejection::inapplicable(format!("ratio {ratio} is not in [0, 1)")));
            }
            if *from == 0 || *stride == 0 {
                return Err(Rejection::inapplicable("index and stride start at 1"));
            }
            let proof = check_windows(seq, *stride, 1, *from, &WindowKind::Ratio(ratio.clone()), SCAN)?;
            let (head, tail) = series_tail_bound(seq, ratio, *from, *stride)
                .ok_or_else(|| Rejection::unverifiable("not enough known links for the head of the series"))?;
            let bound = head.clone() + tail.clone();
            let k0 = floor_plus_one(&bound);
            Certificate::GeometricTail { ratio: ratio.clone(), from: *from, stride: *stride, proof, head, tail, bound, k0 }
        }
        ConvergenceClaim::UserBound { bound, note } => {
            if bound.is_negative() {
                return Err(Rejection::inapplicable("negative bound"));
            }
            let links = seq.links(USER_BOUND_TERMS as usize);
            let mut sum = BigRational::zero();
            for (j, p) in partial_products(&links).iter().enumerate().skip(1) {
                sum += p;
                if &sum > bound {
                    return Err(Rejection::Violation { index: j as u64 });
                }
            }
            Certificate::UserBound {
                bound: bound.clone(),
                note: note.clone(),
                checked_terms: links.len() as u64,
                k0: floor_plus_one(bound),
            }
        }
    };
    Ok(ShrinkVerdict::certified(Outcome::DoesNotShrink, CriterionId::ConvergentSeries, seq, cert))
}

/// Limit of the window tau product for one generator window class, as
/// `None` for infinity.
fn window_limit(prod_n: &Poly, prod_2m: &Poly) -> Option<BigRational> {
    use std::cmp::Ordering;
    match prod_n.degree().cmp(&prod_2m.degree()) {
        Ordering::Less => Some(BigRational::zero()),
        Ordering::Equal => Some(prod_n.leading() / prod_2m.leading()),
        Ordering::Greater => None,
    }
}

/// Searches for a geometric-ratio claim and applies [`convergent_series`].
pub fn convergent_series_auto(seq: &LinkSequence) -> Result<ShrinkVerdict, Rejection> {
    if let Some((prefix, period)) = seq.eventually_periodic_parts() {
        let ratio = tau_product(&period);
        if ratio >= BigRational::one() {
            return Err(Rejection::inapplicable("period product is at least 1, the series diverges"));
        }
        let claim = ConvergenceClaim::GeometricRatio { ratio, from: prefix.len() as u64 + 1, stride: period.len() as u64 };
        return convergent_series(seq, &claim);
    }
    let LinkSequence::Generator(g) = seq else {
        return Err(Rejection::inapplicable("no closed form for the tau products"));
    };
    let stride = match g {
        Generator::Single(_) => 1,
        Generator::Parity { .. } => 2,
    };
    let classes = g.windows(stride, 1, 1).expect("step 1 fits every generator");
    let two = BigRational::from_integer(2.into());
    let mut limit = BigRational::zero();
    let mut polys = Vec::new();
    for class in &classes {
        let prod_n = class.links.iter().fold(Poly::from_int(1), |a, (n, _)| a.mul(n));
        let prod_2m = class.links.iter().fold(Poly::from_int(1), |a, (_, m)| a.mul(&m.scale(&two)));
        match window_limit(&prod_n, &prod_2m) {
            Some(l) if l < BigRational::one() => limit = limit.max(l),
            _ => return Err(Rejection::inapplicable("tau window products do not stay below 1")),
        }
        polys.push((class, prod_n, prod_2m));
    }
    let ratio = (limit + BigRational::one()) / two;
    let mut from = 1;
    for (class, prod_n, prod_2m) in polys {
        let p = prod_2m.scale(&ratio).sub(&prod_n);
        let t = p
            .eventually_nonnegative(class.t_min, THRESHOLD_LIMIT)
            .ok_or_else(|| Rejection::unverifiable("ratio threshold beyond the search limit"))?;
        from = from.max((class.scale * t + class.offset).max(1) as u64);
    }
    convergent_series(seq, &ConvergenceClaim::GeometricRatio { ratio, from, stride: stride as u64 })
}

/// Returns the last index evaluated when the claim `j P_j / n_j >= c` for all
/// `j >= from` is proved; periodicity with product at least 1 makes that
/// quantity nondecreasing along each residue class.
pub(crate) fn harmonic_check(seq: &LinkSequence, c: &BigRational, from: u64) -> Result<u64, Rejection> {
    let from = from.max(1);
    let periodic = seq.eventually_periodic_parts().filter(|(_, period)| tau_product(period) >= BigRational::one());
    let last = match &periodic {
        Some((prefix, period)) => from.max(prefix.len() as u64 + 1) + period.len() as u64 - 1,
        None => from + SCAN,
    };
    let links = seq.links(last as usize);
    // P_j = num / den kept unreduced: each step and comparison is a product with small factors
    let (cn, cd) = (c.numer(), c.denom());
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (j, l) in (1..).zip(&links) {
        num *= l.n();
        den *= 2 * l.m();
        if j >= from && &num * j * cd < cn * &den * l.n() {
            return Err(Rejection::Violation { index: j });
        }
    }
    match periodic {
        Some(_) => Ok(last),
        None => Err(Rejection::unverifiable("comparison holds on the scanned terms but has no argument past them")),
    }
}

/// A divergent sum of `(1/n_j) P_j` forces shrinking.
pub fn divergent_series(seq: &LinkSequence, claim: &DivergenceClaim) -> Result<ShrinkVerdict, Rejection> {
    let cert = match claim {
        DivergenceClaim::PeriodicProduct => {
            let (prefix, period) =
                seq.eventually_periodic_parts().ok_or_else(|| Rejection::inapplicable("not eventually periodic"))?;
            let product = tau_product(&period);
            if product < BigRational::one() {
                return Err(Rejection::inapplicable("period product below 1"));
            }
            Certificate::PeriodProduct { prefix_len: prefix.len() as u64, period_len: period.len() as u64, product }
        }
        DivergenceClaim::HarmonicComparison { c, from } => {
            if !c.is_positive() {
                return Err(Rejection::inapplicable("comparison constant must be positive"));
            }
            let checked_to = harmonic_check(seq, c, *from)?;
            Certificate::HarmonicComparison { c: c.clone(), from: *from, checked_to }
        }
    };
    Ok(ShrinkVerdict::certified(Outcome::Shrinks, CriterionId::DivergentSeries, seq, cert))
}

/// With `n` bounded the two series criteria meet: shrinks iff the sum of
/// partial tau products diverges.
pub fn bounded_n(seq: &LinkSequence) -> Result<ShrinkVerdict, Rejection> {
    let wrap = |n_bound: u64, outcome: Outcome, inner: Certificate| {
        let cert = Certificate::BoundedN { n_bound, inner: Box::new(inner) };
        Ok(ShrinkVerdict::certified(outcome, CriterionId::BoundedN, seq, cert))
    };
    if let LinkSequence::BingWhitehead(g) = seq {
        let rule = gap_rule(g).ok_or_else(|| Rejection::inapplicable("gap tail unknown"))?;
        let outcome = rule.outcome();
        return wrap(2, outcome, Certificate::GapSeries { rule });
    }
    if let Some((prefix, period)) = seq.eventually_periodic_parts() {
        let n_bound = prefix.iter().chain(&period).map(|l| l.n()).max().expect("nonempty period");
        let product = tau_product(&period);
        if product >= BigRational::one() {
            let inner = Certificate::PeriodProduct { prefix_len: prefix.len() as u64, period_len: period.len() as u64, product };
            return wrap(n_bound, Outcome::Shrinks, inner);
        }
        let v = convergent_series_auto(seq)?;
        return wrap(n_bound, Outcome::DoesNotShrink, v.certificate.expect("certified"));
    }
    match seq {
        LinkSequence::Generator(g) => {
            let n_bound = g.n_bound().ok_or_else(|| Rejection::inapplicable("n is unbounded"))?;
            let v = convergent_series_auto(seq)?;
            wrap(n_bound, Outcome::DoesNotShrink, v.certificate.expect("certified"))
        }
        _ => Err(Rejection::inapplicable("the tail of the sequence is unknown")),
    }
}

fn gap_term_sum(gaps: &GapSequence, upto: u64) -> BigRational {
    (1..=upto)
        .map(|i| {
            let c = BigInt::from(gaps.gap(i).expect("known gap"));
            BigRational::new(c, BigInt::from(2u32).pow(i as u32))
        })
        .fold(BigRational::zero(), |a, x| a + x)
}

/// Decides convergence of `sum c_i / 2^i`, or `None` for an unknown tail.
pub(crate) fn gap_rule(gaps: &GapSequence) -> Option<GapRule> {
    let l = gaps.prefix().len() as u64;
    match gaps.tail() {
        GapTail::Unknown => None,
        GapTail::Periodic(period) => {
            let tail_max = *period.iter().max().expect("nonempty period");
            let max_gap = gaps.prefix().iter().copied().chain(period.iter().copied()).max().unwrap_or(0);
            let bound = gap_term_sum(gaps, l) + BigRational::new(tail_max.into(), BigInt::from(2u32).pow(l as u32));
            Some(GapRule::Bounded { max_gap, bound })
        }
        GapTail::ClosedForm { expr, .. } => {
            let (base, lead) = expr.dominant().expect("validated nonzero");
            if base >= 2 {
                return Some(GapRule::DominantExponential { base, leading: lead.leading().to_string() });
            }
            let q = lead.scale(&BigRational::from_integer(3.into())).sub(&lead.shift(1).scale(&BigRational::from_integer(2.into())));
            let threshold = q.eventually_nonnegative(l as i64 + 1, THRESHOLD_LIMIT)?;
            let t = threshold as u64;
            let last = BigRational::new(BigInt::from(gaps.gap(t)?) * 4, BigInt::from(2u32).pow(t as u32));
            Some(GapRule::RatioTest { poly: q.to_string(), threshold, bound: gap_term_sum(gaps, t - 1) + last })
        }
    }
}

/// Bing links separated by Whitehead links: shrinks iff `sum c_i / 2^i` diverges.
/// Periodic gap patterns are cross-checked against the period product of the
/// constructed link sequence.
pub fn ancel_starbird(gaps: &GapSequence) -> Result<ShrinkVerdict, ShrinkError> {
    let seq = LinkSequence::BingWhitehead(gaps.clone());
    let Some(rule) = gap_rule(gaps) else {
        let mut v = orbit_decide(&seq, Horizons::default())?;
        v.criterion = CriterionId::AncelStarbird;
        return Ok(v);
    };
    let outcome = rule.outcome();
    if let Some((prefix, period)) = gaps.as_eventually_periodic() {
        let constructed = if prefix.is_empty() {
            LinkSequence::periodic(period)?
        } else {
            LinkSequence::eventually_periodic(prefix, period)?
        };
        let check = period_product(&constructed).or_else(|_| bounded_n(&constructed));
        match check {
            Ok(v) if v.outcome == outcome => {}
            Ok(v) => {
                return Err(ShrinkError::Inconsistent(format!(
                    "gap series says {outcome}, {} on the link sequence says {}",
                    v.criterion, v.outcome
                )))
            }
            Err(r) => return Err(ShrinkError::Inconsistent(format!("cross-check failed: {r}"))),
        }
    }
    Ok(ShrinkVerdict::certified(outcome, CriterionId::AncelStarbird, &seq, Certificate::GapSeries { rule }))
}
