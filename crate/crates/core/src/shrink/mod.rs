//! Shrinkability of toroidal decompositions defined by sequences of (n,m)-links.
//!
//! Every criterion returns a [`ShrinkVerdict`] whose certificate can be re-checked
//! by [`verify_certificate`], or a [`Rejection`] saying why it stayed silent.
//! Series are never judged from partial sums alone: convergence and divergence
//! need a symbolic argument (a period product, a geometric tail, a comparison,
//! or a dominant term) that is checked against the whole sequence.

mod certificate;
mod criteria;
pub mod expr;
mod orbit;
mod sequence;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linkio::LinkError;

pub use certificate::{verify_certificate, Certificate, GapRule, OrbitTrace, PolyCheck, WindowProof};
pub use criteria::{
    ancel_starbird, bounded_n, convergent_series, convergent_series_auto, divergent_series, period_product,
    shrinks_by_period_product, sher_armentrout, ConvergenceClaim, DivergenceClaim,
};
pub use expr::ExprError;
pub use orbit::{orbit_decide, periodic_orbit_decision, PeriodicOrbit};
pub use sequence::{partial_products, tau_product, CaseExpr, GapSequence, GapTail, Generator, LinkSequence, Tau};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShrinkError {
    #[error("invalid sequence config: {0}")]
    Config(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid generator: {0}")]
    Generator(String),
    #[error("invalid gap sequence: {0}")]
    Gaps(String),
    #[error("a period must contain at least one link")]
    EmptyPeriod,
    #[error("`{0}` is not an (n,m)-link")]
    NotNmLink(String),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("invalid horizon: {0}")]
    Horizon(String),
    #[error("contradictory verdicts: {0}")]
    Inconsistent(String),
}

/// Why a criterion produced no verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    #[error("not applicable: {detail}")]
    Inapplicable { detail: String },
    #[error("claim fails at index {index}")]
    Violation { index: u64 },
    #[error("claim cannot be checked: {detail}")]
    Unverifiable { detail: String },
}

impl Rejection {
    pub(crate) fn inapplicable(detail: impl Into<String>) -> Rejection {
        Rejection::Inapplicable { detail: detail.into() }
    }

    pub(crate) fn unverifiable(detail: impl Into<String>) -> Rejection {
        Rejection::Unverifiable { detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Shrinks,
    DoesNotShrink,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Shrinks => "shrinks",
            Outcome::DoesNotShrink => "does not shrink",
            Outcome::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionId {
    /// Periodic sequences: shrinks iff the product of tau over a period is at least 1.
    PeriodProduct,
    /// Bounded n: shrinks iff the sum of partial tau products diverges.
    BoundedN,
    /// n < 2m at every stage: no stage ever lowers the interlacing count.
    SherArmentrout,
    /// A convergent sum of partial tau products rules out shrinking.
    ConvergentSeries,
    /// A divergent sum of partial tau products weighted by 1/n forces shrinking.
    DivergentSeries,
    /// Bing links with Whitehead links at chosen positions.
    AncelStarbird,
    /// Direct simulation of disc replicating function orbits.
    Orbit,
}

impl CriterionId {
    pub const ALL: [CriterionId; 7] = [
        CriterionId::PeriodProduct,
        CriterionId::BoundedN,
        CriterionId::SherArmentrout,
        CriterionId::AncelStarbird,
        CriterionId::Orbit,
        CriterionId::ConvergentSeries,
        CriterionId::DivergentSeries,
    ];
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

/// Orbit statistics for inputs no criterion settles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub horizons: Horizons,
    pub orbits: u64,
    pub reached_zero: u64,
    /// Orbits still positive when the step or value budget ran out.
    pub unresolved: u64,
    /// Longest orbit that did reach zero.
    pub max_steps_to_zero: u64,
    /// Fewer than `p_max` links were known past some start.
    pub sequence_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkVerdict {
    pub outcome: Outcome,
    pub criterion: CriterionId,
    pub sequence: LinkSequence,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evidence: Option<Evidence>,
}

impl ShrinkVerdict {
    pub(crate) fn certified(
        outcome: Outcome,
        criterion: CriterionId,
        sequence: &LinkSequence,
        certificate: Certificate,
    ) -> ShrinkVerdict {
        ShrinkVerdict { outcome, criterion, sequence: sequence.clone(), certificate: Some(certificate), evidence: None }
    }
}

/// Orbit simulation limits: start values `k <= k_max`, start indices `m <= m_max`,
/// at most `p_max` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizons {
    pub k_max: u64,
    pub m_max: u64,
    pub p_max: u64,
}

impl Default for Horizons {
    fn default() -> Horizons {
        Horizons { k_max: 64, m_max: 16, p_max: 10_000 }
    }
}

impl Horizons {
    pub const ENV: &'static str = "TOROSHRINK_HORIZON";

    pub fn new(k_max: u64, m_max: u64, p_max: u64) -> Result<Horizons, ShrinkError> {
        if k_max == 0 || m_max == 0 || p_max == 0 {
            return Err(ShrinkError::Horizon("horizons must be at least 1".into()));
        }
        Ok(Horizons { k_max, m_max, p_max })
    }

    /// Defaults overridden by `TOROSHRINK_HORIZON`, if set.
    pub fn from_env() -> Result<Horizons, ShrinkError> {
        match std::env::var(Self::ENV) {
            Ok(v) => v.parse(),
            Err(_) => Ok(Horizons::default()),
        }
    }
}

/// `k_max=64,m_max=16,p_max=10000`; keys may be omitted, or three bare numbers given in order.
impl FromStr for Horizons {
    type Err = ShrinkError;

    fn from_str(s: &str) -> Result<Horizons, ShrinkError> {
        let mut h = Horizons::default();
        let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        let num = |v: &str| v.parse::<u64>().map_err(|e| ShrinkError::Horizon(format!("`{v}`: {e}")));
        if parts.iter().all(|p| !p.contains('=')) && parts.len() == 3 {
            return Horizons::new(num(parts[0])?, num(parts[1])?, num(parts[2])?);
        }
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(|| ShrinkError::Horizon(format!("expected key=value, got `{part}`")))?;
            match k.trim() {
                "k_max" | "k" => h.k_max = num(v.trim())?,
                "m_max" | "m" => h.m_max = num(v.trim())?,
                "p_max" | "p" => h.p_max = num(v.trim())?,
                other => return Err(ShrinkError::Horizon(format!("unknown key `{other}`"))),
            }
        }
        Horizons::new(h.k_max, h.m_max, h.p_max)
    }
}

/// What one criterion said.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: CriterionId,
    pub outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: ShrinkVerdict,
    pub criteria: Vec<CriterionReport>,
}

/// Runs every applicable criterion concurrently and returns the first decisive
/// verdict in [`CriterionId::ALL`] order. Two decisive verdicts that disagree are
/// an error.
pub fn decide(seq: &LinkSequence, horizons: Horizons) -> Result<Decision, ShrinkError> {
    type Run = Result<Result<ShrinkVerdict, Rejection>, ShrinkError>;
    let runs: Vec<(CriterionId, Run)> = std::thread::scope(|scope| {
        let handles: Vec<_> = CriterionId::ALL
            .iter()
            .map(|&id| {
                let handle = scope.spawn(move || -> Run {
                    match id {
                        CriterionId::PeriodProduct => Ok(period_product(seq)),
                        CriterionId::BoundedN => Ok(bounded_n(seq)),
                        CriterionId::SherArmentrout => Ok(sher_armentrout(seq, horizons.p_max)),
                        CriterionId::AncelStarbird => match seq {
                            LinkSequence::BingWhitehead(g) => ancel_starbird(g).map(Ok),
                            _ => Ok(Err(Rejection::inapplicable("not a Bing/Whitehead sequence"))),
                        },
                        CriterionId::Orbit => orbit_decide(seq, horizons).map(Ok),
                        CriterionId::ConvergentSeries => Ok(convergent_series_auto(seq)),
                        CriterionId::DivergentSeries => Ok(divergent_series(seq, &DivergenceClaim::PeriodicProduct)),
                    }
                });
                (id, handle)
            })
            .collect();
        handles.into_iter().map(|(id, h)| (id, h.join().expect("criterion thread panicked"))).collect()
    });

    let mut reports = Vec::new();
    let mut decisive: Vec<ShrinkVerdict> = Vec::new();
    let mut fallback = None;
    for (id, run) in runs {
        match run? {
            Ok(v) => {
                reports.push(CriterionReport { criterion: id, outcome: Some(v.outcome), note: None });
                if v.outcome == Outcome::Unknown {
                    fallback.get_or_insert(v);
                } else {
                    decisive.push(v);
                }
            }
            Err(r) => reports.push(CriterionReport { criterion: id, outcome: None, note: Some(r.to_string()) }),
        }
    }
    if let Some(first) = decisive.first() {
        if let Some(other) = decisive.iter().find(|v| v.outcome != first.outcome) {
            return Err(ShrinkError::Inconsistent(format!(
                "{} says {}, {} says {}",
                first.criterion, first.outcome, other.criterion, other.outcome
            )));
        }
    }
    let verdict = match decisive.into_iter().next() {
        Some(v) => v,
        None => fallback.unwrap_or_else(|| ShrinkVerdict {
            outcome: Outcome::Unknown,
            criterion: CriterionId::Orbit,
            sequence: seq.clone(),
            certificate: None,
            evidence: None,
        }),
    };
    Ok(Decision { verdict, criteria: reports })
}

pub(crate) fn floor_plus_one(r: &BigRational) -> BigUint {
    let f = r.floor().to_integer();
    (f + 1u32).to_biguint().unwrap_or_default()
}
