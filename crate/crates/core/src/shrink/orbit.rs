//! Orbits `k, D_{L^m}(k), D_{L^{m+1}}(D_{L^m}(k)), ...` of (n,m)-link disc functions.
//!
//! For one period with composite `g`, put `a_i = 2m_i / n_i` and `alpha = prod a_i`.
//! Since `a x - 1 <= D(x) < a x` for `x >= 1`:
//!
//! * `alpha <= 1` gives `g(k) < k` for every `k >= 1`, so all orbits reach 0;
//! * `alpha > 1` gives `g(k) >= alpha k - C` with `C = sum_j prod_{i>j} a_i`, so
//!   `k* = ceil(C / (alpha - 1))` satisfies `g(k*) >= k*` and, `g` being monotone,
//!   the orbit of `k*` never drops below `k*`.

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};

use crate::linkio::NmLinkSpec;

use super::certificate::{check_windows, Certificate, OrbitTrace, WindowKind};
use super::criteria::shrinks_by_period_product;
use super::sequence::{Generator, LinkSequence, THRESHOLD_LIMIT};
use super::{CriterionId, Evidence, Horizons, Outcome, ShrinkError, ShrinkVerdict};

/// Longest sample trace stored in a certificate.
const TRACE_CAP: u64 = 100_000;

trait Arith: Clone + Ord + From<u64> + CheckedAdd + CheckedMul + CheckedSub + CheckedDiv + Zero + One {}

impl<T: Clone + Ord + From<u64> + CheckedAdd + CheckedMul + CheckedSub + CheckedDiv + Zero + One> Arith for T {}

/// `ceil(2mk/n) - 1`, with 0 fixed; `None` on overflow.
fn step<T: Arith>(n: &T, two_m: &T, k: &T) -> Option<T> {
    if k.is_zero() {
        return Some(T::zero());
    }
    let num = two_m.checked_mul(k)?.checked_add(n)?.checked_sub(&T::one())?;
    num.checked_div(n)?.checked_sub(&T::one())
}

fn composite<T: Arith>(pairs: &[(T, T)], k: &T) -> Option<T> {
    pairs.iter().try_fold(k.clone(), |x, (n, m2)| step(n, m2, &x))
}

struct Analysis<T> {
    expanding: bool,
    k_star: Option<T>,
    witness: Option<T>,
}

fn analyze<T: Arith>(period: &[NmLinkSpec], k_scan: u64) -> Option<Analysis<T>> {
    let pairs: Vec<(T, T)> = period.iter().map(|l| (T::from(l.n()), T::from(2 * l.m()))).collect();
    let mut a = T::one();
    let mut b = T::one();
    for (n, m2) in &pairs {
        a = a.checked_mul(m2)?;
        b = b.checked_mul(n)?;
    }
    let expanding = a > b;
    let k_star = if expanding {
        // C * prod n = sum_j (prod_{i>j} 2m_i)(prod_{i<=j} n_i)
        let mut c = T::zero();
        for j in 0..pairs.len() {
            let mut term = T::one();
            for (i, (n, m2)) in pairs.iter().enumerate() {
                term = term.checked_mul(if i <= j { n } else { m2 })?;
            }
            c = c.checked_add(&term)?;
        }
        let d = a.checked_sub(&b)?;
        Some(c.checked_add(&d)?.checked_sub(&T::one())?.checked_div(&d)?)
    } else {
        None
    };
    let mut witness = None;
    for k in 1..=k_scan {
        let k = T::from(k);
        if composite(&pairs, &k)? >= k {
            witness = Some(k);
            break;
        }
    }
    if witness.is_none() {
        if let Some(ks) = &k_star {
            if composite(&pairs, ks)? >= *ks {
                witness = Some(ks.clone());
            }
        }
    }
    Some(Analysis { expanding, k_star, witness })
}

/// The orbit view of a periodic sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicOrbit {
    /// `prod 2m > prod n`.
    pub expanding: bool,
    pub k_star: Option<BigUint>,
    /// First `k` among `1..=k_scan`, then `k*`, with `g(k) >= k`.
    pub witness: Option<BigUint>,
}

/// Looks for a start value that one period does not lower. Without one, the
/// period lowers every positive count.
pub fn periodic_orbit_decision(period: &[NmLinkSpec], k_scan: u64) -> PeriodicOrbit {
    let big = |x: u128| BigUint::from(x);
    if let Some(a) = analyze::<u128>(period, k_scan) {
        return PeriodicOrbit { expanding: a.expanding, k_star: a.k_star.map(big), witness: a.witness.map(big) };
    }
    let a = analyze::<BigUint>(period, k_scan).expect("big integers do not overflow");
    PeriodicOrbit { expanding: a.expanding, k_star: a.k_star, witness: a.witness }
}

pub(crate) fn k_star(period: &[NmLinkSpec]) -> Option<BigUint> {
    periodic_orbit_decision(period, 0).k_star
}

fn trace(seq: &LinkSequence, start: u64, k: &BigUint, max_steps: u64, stop_at_zero: bool) -> OrbitTrace {
    let mut values = vec![k.clone()];
    let mut x = k.clone();
    for i in start..start + max_steps {
        if stop_at_zero && x.is_zero() {
            break;
        }
        let Some(l) = seq.link(i) else { break };
        x = step(&BigUint::from(l.n()), &BigUint::from(2 * l.m()), &x).expect("big integers do not overflow");
        values.push(x.clone());
    }
    OrbitTrace { start, values }
}

fn sample_traces(seq: &LinkSequence, starts: &[u64], h: Horizons) -> Vec<OrbitTrace> {
    let mut starts = starts.to_vec();
    starts.sort_unstable();
    starts.dedup();
    let k = BigUint::from(h.k_max);
    starts.into_iter().map(|s| trace(seq, s, &k, h.p_max.min(TRACE_CAP), true)).collect()
}

/// Blocks of equal length, aligned at some index, each with tau product at least 1.
fn block_descent(seq: &LinkSequence, g: &Generator, h: Horizons) -> Option<Certificate> {
    let candidates: &[(usize, u64)] = match g {
        Generator::Single(_) => &[(1, 1), (2, 1), (2, 2)],
        Generator::Parity { .. } => &[(2, 1), (2, 2)],
    };
    for &(len, phase) in candidates {
        let Some(classes) = g.windows(len, len as u64, phase) else { continue };
        let mut first = phase;
        let mut ok = true;
        for class in &classes {
            match WindowKind::Descent.poly(&class.links).eventually_nonnegative(class.t_min, THRESHOLD_LIMIT) {
                Some(t) => first = first.max((class.scale * t + class.offset) as u64),
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        if let Ok(proof) = check_windows(seq, len as u64, len as u64, first, &WindowKind::Descent, h.p_max) {
            let traces = sample_traces(seq, &[1, first], h);
            return Some(Certificate::BlockDescent { block: len as u64, first, proof, traces });
        }
    }
    None
}

/// Simulates all orbits within the horizons. A start value whose orbit stays
/// positive makes every larger start value stay positive too, by monotonicity.
fn simulate(seq: &LinkSequence, h: Horizons) -> Evidence {
    let links = seq.links((h.m_max + h.p_max) as usize);
    let pairs: Vec<(u128, u128)> = links.iter().map(|l| (l.n() as u128, 2 * l.m() as u128)).collect();
    let mut ev = Evidence {
        horizons: h,
        orbits: h.m_max * h.k_max,
        reached_zero: 0,
        unresolved: 0,
        max_steps_to_zero: 0,
        sequence_exhausted: false,
    };
    for m in 1..=h.m_max {
        for k in 1..=h.k_max {
            let mut x = k as u128;
            let mut steps = 0;
            let reached = loop {
                if x == 0 {
                    break true;
                }
                if steps == h.p_max {
                    break false;
                }
                let Some((n, m2)) = pairs.get((m - 1 + steps) as usize) else {
                    ev.sequence_exhausted = true;
                    break false;
                };
                match step(n, m2, &x) {
                    Some(y) => x = y,
                    None => break false,
                }
                steps += 1;
            };
            if reached {
                ev.reached_zero += 1;
                ev.max_steps_to_zero = ev.max_steps_to_zero.max(steps);
            } else {
                ev.unresolved += h.k_max - k + 1;
                break;
            }
        }
    }
    ev
}

/// Full decision for eventually periodic sequences, a block descent search for
/// generators, and orbit statistics otherwise. For periodic input the period
/// product is computed alongside; disagreement is an error.
pub fn orbit_decide(seq: &LinkSequence, h: Horizons) -> Result<ShrinkVerdict, ShrinkError> {
    Horizons::new(h.k_max, h.m_max, h.p_max)?;
    if let Some((prefix, period)) = seq.eventually_periodic_parts() {
        let d = periodic_orbit_decision(&period, h.k_max);
        let product_shrinks = shrinks_by_period_product(&period);
        if d.witness.is_some() == product_shrinks || d.expanding == product_shrinks {
            return Err(ShrinkError::Inconsistent(format!(
                "period product says {}, orbit search found {}",
                if product_shrinks { Outcome::Shrinks } else { Outcome::DoesNotShrink },
                match &d.witness {
                    Some(k) => format!("g({k}) >= {k}"),
                    None => "no start value that survives a period".into(),
                }
            )));
        }
        let start = prefix.len() as u64 + 1;
        let p = period.len() as u64;
        let (outcome, cert) = match d.witness {
            Some(k) => {
                let t = trace(seq, start, &k, p, false);
                (Outcome::DoesNotShrink, Certificate::FixedPoint { start, period_len: p, trace: t.values, k_star: d.k_star })
            }
            None => {
                let proof = check_windows(seq, p, p, start, &WindowKind::Descent, h.p_max)
                    .map_err(|r| ShrinkError::Inconsistent(format!("period block check: {r}")))?;
                let traces = sample_traces(seq, &[1, start], h);
                (Outcome::Shrinks, Certificate::BlockDescent { block: p, first: start, proof, traces })
            }
        };
        return Ok(ShrinkVerdict::certified(outcome, CriterionId::Orbit, seq, cert));
    }
    if let LinkSequence::Generator(g) = seq {
        if let Some(cert) = block_descent(seq, g, h) {
            return Ok(ShrinkVerdict::certified(Outcome::Shrinks, CriterionId::Orbit, seq, cert));
        }
    }
    Ok(ShrinkVerdict {
        outcome: Outcome::Unknown,
        criterion: CriterionId::Orbit,
        sequence: seq.clone(),
        certificate: None,
        evidence: Some(simulate(seq, h)),
    })
}
