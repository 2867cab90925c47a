//! Certificates and their verifier. Verification starts again from the raw
//! sequence and redoes every arithmetic claim; orbit values are recomputed with
//! the disc replicating functions from [`crate::drf`].

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::drf::{compose, nm_drf};
use crate::linkio::NmLinkSpec;

use super::criteria::{gap_rule, harmonic_check, series_tail_bound};
use super::expr::Poly;
use super::orbit::k_star;
use super::sequence::{partial_products, tau_product, LinkSequence, THRESHOLD_LIMIT};
use super::{floor_plus_one, Outcome, Rejection, ShrinkVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Product of tau over the period that starts after `prefix_len` links.
    PeriodProduct {
        prefix_len: u64,
        period_len: u64,
        #[serde(with = "crate::serde_str")]
        product: BigRational,
    },
    /// `n_i < 2m_i` at every index, so no stage lowers the interlacing count.
    StepGrowth { proof: WindowProof },
    /// Every product of `stride` consecutive taus from index `from` on is at most
    /// `ratio < 1`; `bound` dominates the whole series and `k0 > bound`.
    GeometricTail {
        #[serde(with = "crate::serde_str")]
        ratio: BigRational,
        from: u64,
        stride: u64,
        proof: WindowProof,
        #[serde(with = "crate::serde_str")]
        head: BigRational,
        #[serde(with = "crate::serde_str")]
        tail: BigRational,
        #[serde(with = "crate::serde_str")]
        bound: BigRational,
        #[serde(with = "crate::serde_str")]
        k0: BigUint,
    },
    /// A caller-supplied bound on the series; only its first terms are checked.
    UserBound {
        #[serde(with = "crate::serde_str")]
        bound: BigRational,
        note: String,
        checked_terms: u64,
        #[serde(with = "crate::serde_str")]
        k0: BigUint,
    },
    /// `(1/n_j) P_j >= c/j` for all `j >= from`; indices up to `checked_to`
    /// were evaluated and the periodic structure covers the rest.
    HarmonicComparison {
        #[serde(with = "crate::serde_str")]
        c: BigRational,
        from: u64,
        checked_to: u64,
    },
    BoundedN { n_bound: u64, inner: Box<Certificate> },
    GapSeries { rule: GapRule },
    /// One period composite maps `trace[0]` to `trace[last] >= trace[0]`.
    FixedPoint {
        start: u64,
        period_len: u64,
        #[serde(with = "crate::serde_str_vec")]
        trace: Vec<BigUint>,
        #[serde(with = "crate::serde_str_opt", default)]
        k_star: Option<BigUint>,
    },
    /// Every block of `block` links starting at `first + t*block` has tau product
    /// at least 1, so each block lowers the count by at least one.
    BlockDescent { block: u64, first: u64, proof: WindowProof, traces: Vec<OrbitTrace> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum WindowProof {
    /// The windows repeat; all distinct ones were evaluated.
    Finite { windows: u64 },
    Symbolic { checks: Vec<PolyCheck> },
}

/// `poly(t) >= 0` for every integer `t` at least the class minimum: directly
/// below `threshold`, by nonnegative Taylor coefficients at `threshold` above.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCheck {
    pub class: String,
    pub poly: String,
    pub threshold: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub start: u64,
    #[serde(with = "crate::serde_str_vec")]
    pub values: Vec<BigUint>,
}

/// Why `sum c_i / 2^i` converges or diverges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum GapRule {
    /// Periodic gaps are bounded by `max_gap`; the sum is at most `bound`.
    Bounded {
        max_gap: u64,
        #[serde(with = "crate::serde_str")]
        bound: BigRational,
    },
    /// `c_i ~ lead * i^d * base^i` with `base >= 2`: terms stay away from zero.
    DominantExponential { base: u64, leading: String },
    /// Polynomial gaps `p`: `3p(i) - 2p(i+1) = poly >= 0` from `threshold` on, so
    /// consecutive terms shrink by 3/4 and the sum is at most `bound`.
    RatioTest {
        poly: String,
        threshold: i64,
        #[serde(with = "crate::serde_str")]
        bound: BigRational,
    },
}

impl GapRule {
    pub fn outcome(&self) -> Outcome {
        match self {
            GapRule::DominantExponential { .. } => Outcome::Shrinks,
            GapRule::Bounded { .. } | GapRule::RatioTest { .. } => Outcome::DoesNotShrink,
        }
    }
}

/// The inequality a window of consecutive links must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum WindowKind {
    /// `n < 2m` (single links).
    Growth,
    /// `prod n <= ratio * prod 2m`.
    Ratio(BigRational),
    /// `prod n >= prod 2m`.
    Descent,
}

impl WindowKind {
    pub fn holds(&self, links: &[NmLinkSpec]) -> bool {
        let p = tau_product(links);
        match self {
            WindowKind::Growth => p < BigRational::one(),
            WindowKind::Ratio(r) => &p <= r,
            WindowKind::Descent => p >= BigRational::one(),
        }
    }

    /// A polynomial that is nonnegative exactly when the window satisfies the claim.
    pub fn poly(&self, links: &[(Poly, Poly)]) -> Poly {
        let two = BigRational::from_integer(2.into());
        let prod_n = links.iter().fold(Poly::from_int(1), |a, (n, _)| a.mul(n));
        let prod_2m = links.iter().fold(Poly::from_int(1), |a, (_, m)| a.mul(&m.scale(&two)));
        match self {
            WindowKind::Growth => prod_2m.sub(&prod_n).sub(&Poly::from_int(1)),
            WindowKind::Ratio(r) => prod_2m.scale(r).sub(&prod_n),
            WindowKind::Descent => prod_n.sub(&prod_2m),
        }
    }
}

/// Window start indices of an eventually periodic sequence that cover every
/// distinct window from `first` on.
fn finite_window_starts(prefix_len: u64, period_len: u64, step: u64, first: u64) -> impl Iterator<Item = u64> {
    let lcm = num_integer::lcm(step, period_len);
    let last = first.max(prefix_len + 1) + lcm;
    (first..last).step_by(step as usize)
}

/// Checks that every window of `len` links starting at `first + u*step` satisfies `kind`.
pub(crate) fn check_windows(
    seq: &LinkSequence,
    len: u64,
    step: u64,
    first: u64,
    kind: &WindowKind,
    horizon: u64,
) -> Result<WindowProof, Rejection> {
    let first = first.max(1);
    if let Some((prefix, period)) = seq.eventually_periodic_parts() {
        let mut windows = 0;
        for s in finite_window_starts(prefix.len() as u64, period.len() as u64, step, first) {
            let links: Vec<_> = (s..s + len).map(|i| seq.link(i).expect("periodic")).collect();
            if !kind.holds(&links) {
                return Err(Rejection::Violation { index: s });
            }
            windows += 1;
        }
        return Ok(WindowProof::Finite { windows });
    }
    if let LinkSequence::Generator(g) = seq {
        let classes = g
            .windows(len as usize, step, first)
            .ok_or_else(|| Rejection::inapplicable(format!("window step {step} does not fit the generator")))?;
        let mut checks = Vec::new();
        for class in classes {
            let p = kind.poly(&class.links);
            match p.nonnegative_from(class.t_min, THRESHOLD_LIMIT) {
                Some(threshold) => checks.push(PolyCheck { class: class.describe(), poly: p.to_string(), threshold }),
                None => {
                    return Err(match (class.t_min..class.t_min + horizon as i64).find(|&t| p.eval_int(t).is_negative()) {
                        Some(t) => Rejection::Violation { index: (class.scale * t + class.offset) as u64 },
                        None => Rejection::unverifiable(format!("no nonnegativity threshold for {p}")),
                    });
                }
            }
        }
        return Ok(WindowProof::Symbolic { checks });
    }
    // Finitely many links are known: a violation can still be found.
    let links = seq.links((first + horizon + len) as usize);
    let mut s = first;
    while s + len - 1 <= links.len() as u64 {
        if !kind.holds(&links[(s - 1) as usize..(s - 1 + len) as usize]) {
            return Err(Rejection::Violation { index: s });
        }
        s += step;
    }
    Err(Rejection::unverifiable("the sequence has no periodic or closed form"))
}

fn verify_windows(seq: &LinkSequence, len: u64, step: u64, first: u64, kind: &WindowKind, proof: &WindowProof) -> bool {
    if len == 0 || step == 0 {
        return false;
    }
    match proof {
        WindowProof::Finite { windows } => {
            let Some((prefix, period)) = seq.eventually_periodic_parts() else { return false };
            let mut count = 0;
            for s in finite_window_starts(prefix.len() as u64, period.len() as u64, step, first.max(1)) {
                let links: Vec<_> = (s..s + len).filter_map(|i| seq.link(i)).collect();
                if links.len() as u64 != len || !kind.holds(&links) {
                    return false;
                }
                count += 1;
            }
            count == *windows
        }
        WindowProof::Symbolic { checks } => {
            let LinkSequence::Generator(g) = seq else { return false };
            let Some(classes) = g.windows(len as usize, step, first) else { return false };
            classes.len() == checks.len()
                && classes.iter().zip(checks).all(|(class, check)| {
                    let p = kind.poly(&class.links);
                    p.to_string() == check.poly
                        && check.threshold >= class.t_min
                        && check.threshold - class.t_min <= THRESHOLD_LIMIT
                        && p.shifted_nonnegative(check.threshold)
                        && (class.t_min..check.threshold).all(|t| !p.eval_int(t).is_negative())
                })
        }
    }
}

/// Recomputes an orbit through `L^start, L^{start+1}, ...` with exact disc functions.
fn recompute_trace(seq: &LinkSequence, start: u64, k: &BigUint, steps: usize) -> Option<Vec<BigUint>> {
    let fs: Vec<_> = (start..start + steps as u64).map(|i| seq.link(i).map(nm_drf)).collect::<Option<_>>()?;
    compose(&fs, k).ok().map(|o| o.values)
}

fn trace_matches(seq: &LinkSequence, t: &OrbitTrace) -> bool {
    match t.values.first() {
        Some(k) => recompute_trace(seq, t.start, k, t.values.len() - 1).as_deref() == Some(&t.values[..]),
        None => false,
    }
}

/// Re-checks the certificate of `v` against `v.sequence`; `false` for verdicts
/// without a certificate.
pub fn verify_certificate(v: &ShrinkVerdict) -> bool {
    match &v.certificate {
        Some(c) if v.outcome != Outcome::Unknown => verify(&v.sequence, v.outcome, c),
        _ => false,
    }
}

fn verify(seq: &LinkSequence, outcome: Outcome, cert: &Certificate) -> bool {
    let one = BigRational::one();
    match cert {
        Certificate::PeriodProduct { prefix_len, period_len, product } => {
            let Some((prefix, period)) = seq.eventually_periodic_parts() else { return false };
            prefix.len() as u64 == *prefix_len
                && period.len() as u64 == *period_len
                && &tau_product(&period) == product
                && outcome == if *product >= one { Outcome::Shrinks } else { Outcome::DoesNotShrink }
        }
        Certificate::StepGrowth { proof } => {
            outcome == Outcome::DoesNotShrink && verify_windows(seq, 1, 1, 1, &WindowKind::Growth, proof)
        }
        Certificate::GeometricTail { ratio, from, stride, proof, head, tail, bound, k0 } => {
            if outcome != Outcome::DoesNotShrink || ratio.is_negative() || *ratio >= one || *from == 0 {
                return false;
            }
            if !verify_windows(seq, *stride, 1, *from, &WindowKind::Ratio(ratio.clone()), proof) {
                return false;
            }
            match series_tail_bound(seq, ratio, *from, *stride) {
                Some((h, t)) => &h == head && &t == tail && &(h.clone() + t.clone()) == bound && &floor_plus_one(bound) == k0,
                None => false,
            }
        }
        Certificate::UserBound { bound, checked_terms, k0, .. } => {
            let links = seq.links(*checked_terms as usize);
            outcome == Outcome::DoesNotShrink
                && !bound.is_negative()
                && links.len() as u64 == *checked_terms
                && partial_products(&links).iter().skip(1).fold(BigRational::zero(), |a, p| a + p) <= *bound
                && &floor_plus_one(bound) == k0
        }
        Certificate::HarmonicComparison { c, from, checked_to } => {
            outcome == Outcome::Shrinks && c.is_positive() && harmonic_check(seq, c, *from) == Ok(*checked_to)
        }
        Certificate::BoundedN { n_bound, inner } => {
            let actual = match seq {
                LinkSequence::Generator(g) => g.n_bound(),
                LinkSequence::BingWhitehead(_) => Some(2),
                _ => seq
                    .eventually_periodic_parts()
                    .and_then(|(p, q)| p.iter().chain(&q).map(|l| l.n()).max()),
            };
            actual == Some(*n_bound) && !matches!(**inner, Certificate::BoundedN { .. }) && verify(seq, outcome, inner)
        }
        Certificate::GapSeries { rule } => {
            let LinkSequence::BingWhitehead(g) = seq else { return false };
            outcome == rule.outcome() && gap_rule(g).as_ref() == Some(rule)
        }
        Certificate::FixedPoint { start, period_len, trace, k_star: ks } => {
            let Some((prefix, period)) = seq.eventually_periodic_parts() else { return false };
            let Some(k) = trace.first() else { return false };
            outcome == Outcome::DoesNotShrink
                && *start == prefix.len() as u64 + 1
                && *period_len == period.len() as u64
                && !k.is_zero()
                && trace.len() == period.len() + 1
                && recompute_trace(seq, *start, k, period.len()).as_deref() == Some(&trace[..])
                && trace.last() >= Some(k)
                && *ks == k_star(&period)
        }
        Certificate::BlockDescent { block, first, proof, traces } => {
            outcome == Outcome::Shrinks
                && verify_windows(seq, *block, *block, *first, &WindowKind::Descent, proof)
                && traces.iter().all(|t| trace_matches(seq, t))
        }
    }
}
