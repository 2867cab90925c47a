//! Disc replicating functions and their compositions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linkio::{Builtin, CoverDerivation, LinkError, NmLinkSpec, Witness};
use crate::milnor::{mubar, MilnorError, MultiIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DrfError {
    #[error("k = {k} is outside the table (largest entry {max:?})")]
    OutOfTable { k: BigUint, max: Option<u64> },
    #[error("table must send 0 to 0")]
    TableAtZero,
    #[error("witness {index} on {link} was claimed nonzero but computes to 0")]
    WitnessVanishes { link: String, index: String },
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    Lower,
    Upper,
    Exact,
}

impl BoundDirection {
    /// Direction of a composite, or `None` when lower and upper bounds are mixed.
    pub fn compose(a: Option<BoundDirection>, b: BoundDirection) -> Option<BoundDirection> {
        use BoundDirection::*;
        match (a?, b) {
            (Exact, d) | (d, Exact) => Some(d),
            (Lower, Lower) => Some(Lower),
            (Upper, Upper) => Some(Upper),
            _ => None,
        }
    }
}

impl fmt::Display for BoundDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundDirection::Lower => "lower",
            BoundDirection::Upper => "upper",
            BoundDirection::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// The witness invariant was recomputed from link data.
    Verified,
    /// No link data was available; the witness is taken as stated.
    Declared,
}

/// One term of the maximum defining a lower function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerCase {
    pub derivation: CoverDerivation,
    pub provenance: Provenance,
    pub rule: CaseRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CaseRule {
    Zero,
    /// `coefficient * k`.
    Linear { coefficient: u64 },
    /// `ceil(numerator * k / denominator) - 1`.
    Ceiling { numerator: u64, denominator: u64 },
}

impl CaseRule {
    fn evaluate(&self, k: &BigUint) -> BigUint {
        if k.is_zero() {
            return BigUint::zero();
        }
        match *self {
            CaseRule::Zero => BigUint::zero(),
            CaseRule::Linear { coefficient } => k * coefficient,
            CaseRule::Ceiling { numerator, denominator } => {
                ceil_div(&(k * numerator), &BigUint::from(denominator)) - 1u32
            }
        }
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - 1u32) / b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscFn {
    /// `max(ceil(2mk/n) - 1, 0)` for the (n,m)-link.
    ExactNm { link: NmLinkSpec },
    LowerMilnor { cases: Vec<LowerCase> },
    Tabulated {
        #[serde(with = "table_serde")]
        values: BTreeMap<u64, BigUint>,
        direction: BoundDirection,
    },
}

mod table_serde {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BTreeMap<u64, BigUint>, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = v.iter().map(|(k, x)| (k.to_string(), x.to_string())).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, BigUint>, D::Error> {
        let m = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
        m.into_iter()
            .map(|(k, v)| {
                let k = k.parse::<u64>().map_err(D::Error::custom)?;
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(D::Error::custom(format!("bad table value {other}"))),
                };
                Ok((k, text.parse::<BigUint>().map_err(D::Error::custom)?))
            })
            .collect()
    }
}

impl DiscFn {
    pub fn tabulated(values: BTreeMap<u64, BigUint>, direction: BoundDirection) -> Result<DiscFn, DrfError> {
        if values.get(&0).is_some_and(|v| !v.is_zero()) {
            return Err(DrfError::TableAtZero);
        }
        Ok(DiscFn::Tabulated { values, direction })
    }

    pub fn direction(&self) -> BoundDirection {
        match self {
            DiscFn::ExactNm { .. } => BoundDirection::Exact,
            DiscFn::LowerMilnor { .. } => BoundDirection::Lower,
            DiscFn::Tabulated { direction, .. } => *direction,
        }
    }

    pub fn evaluate(&self, k: &BigUint) -> Result<BigUint, DrfError> {
        if k.is_zero() {
            return Ok(BigUint::zero());
        }
        match self {
            DiscFn::ExactNm { link } => Ok(nm_value(*link, k)),
            DiscFn::LowerMilnor { cases } => {
                Ok(cases.iter().map(|c| c.rule.evaluate(k)).max().unwrap_or_default())
            }
            DiscFn::Tabulated { values, .. } => k
                .to_u64()
                .and_then(|k| values.get(&k))
                .cloned()
                .ok_or_else(|| DrfError::OutOfTable { k: k.clone(), max: values.keys().last().copied() }),
        }
    }

    pub fn evaluate_u64(&self, k: u64) -> Result<BigUint, DrfError> {
        self.evaluate(&BigUint::from(k))
    }
}

fn nm_value(link: NmLinkSpec, k: &BigUint) -> BigUint {
    if k.is_zero() {
        return BigUint::zero();
    }
    let num = k * (2 * link.m());
    ceil_div(&num, &BigUint::from(link.n())) - 1u32
}

pub fn nm_drf(link: NmLinkSpec) -> DiscFn {
    DiscFn::ExactNm { link }
}

/// Cover derivations behind the lower bound for an (n,m)-link: an m-fold cover,
/// then for n >= 2 blowing down n-2 components leaves the Bing pair, and for
/// n = 1 the Whitehead link appears as a sublink.
pub fn nm_derivations(link: NmLinkSpec) -> Vec<CoverDerivation> {
    let d = link.m();
    let one = BigInt::one();
    let derivation = if link.n() >= 2 {
        CoverDerivation::new(
            d,
            2,
            link.n() - 2,
            Witness { link: "borromean".into(), index: vec![0, 1, 2], claimed: one },
        )
    } else {
        CoverDerivation::new(
            d,
            1,
            0,
            Witness { link: "whitehead".into(), index: vec![0, 0, 1, 1], claimed: one },
        )
    };
    vec![derivation.expect("parameters are valid by construction")]
}

/// Lower function from declared derivations. Witnesses on builtin links are
/// recomputed; a witness claimed nonzero that computes to zero is an error.
pub fn lower_milnor_drf(derivations: &[CoverDerivation]) -> Result<DiscFn, DrfError> {
    let mut cases = Vec::with_capacity(derivations.len());
    for dv in derivations {
        let w = dv.witness();
        let (value, provenance) = match w.link.parse::<Builtin>() {
            Ok(b) => {
                let link = b.link()?;
                let index = MultiIndex::new(w.index.clone(), link.component_count())?;
                let record = mubar(&link, &index)?;
                if !w.claimed.is_zero() && record.mubar.is_zero() {
                    return Err(DrfError::WitnessVanishes {
                        link: w.link.clone(),
                        index: index.to_string(),
                    });
                }
                (record.signed, Provenance::Verified)
            }
            Err(_) => (w.claimed.clone(), Provenance::Declared),
        };
        let rule = if value.is_zero() || !w.index.contains(&0) {
            CaseRule::Zero
        } else if w.index.len() == 2 {
            let coefficient = value.abs().to_u64().unwrap_or(u64::MAX);
            CaseRule::Linear { coefficient }
        } else {
            CaseRule::Ceiling { numerator: 2 * dv.degree(), denominator: dv.kept() + dv.blowdowns() }
        };
        cases.push(LowerCase { derivation: dv.clone(), provenance, rule });
    }
    Ok(DiscFn::LowerMilnor { cases })
}

/// `k, f_0(k), f_1(f_0(k)), ...` with the bound direction of the last composite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    #[serde(with = "crate::serde_str_vec")]
    pub values: Vec<BigUint>,
    pub direction: Option<BoundDirection>,
}

pub fn compose(fs: &[DiscFn], k: &BigUint) -> Result<Orbit, DrfError> {
    let mut values = vec![k.clone()];
    let mut direction = Some(BoundDirection::Exact);
    let mut current = k.clone();
    for f in fs {
        direction = BoundDirection::compose(direction, f.direction());
        current = if current.is_zero() { current } else { f.evaluate(&current)? };
        values.push(current.clone());
    }
    Ok(Orbit { values, direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(n: u64, m: u64) -> NmLinkSpec {
        NmLinkSpec::new(n, m).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(nm_drf(nm(2, 1)).evaluate_u64(5).unwrap(), big(4));
        assert_eq!(nm_drf(nm(1, 1)).evaluate_u64(5).unwrap(), big(9));
        assert_eq!(nm_drf(nm(3, 2)).evaluate_u64(8).unwrap(), big(10));
        assert_eq!(nm_drf(nm(4, 3)).evaluate_u64(1).unwrap(), big(1));
        assert_eq!(nm_drf(nm(7, 1)).evaluate_u64(1).unwrap(), big(0));
        assert_eq!(nm_drf(nm(7, 1)).evaluate_u64(0).unwrap(), big(0));
    }

    #[test]
    fn lower_functions_from_witnesses() {
        let whitehead = lower_milnor_drf(&nm_derivations(nm(1, 3))).unwrap();
        let bing_like = lower_milnor_drf(&nm_derivations(nm(5, 2))).unwrap();
        for k in 0..200u64 {
            assert_eq!(whitehead.evaluate_u64(k).unwrap(), big((6 * k).saturating_sub(1)));
            assert_eq!(bing_like.evaluate_u64(k).unwrap(), nm_drf(nm(5, 2)).evaluate_u64(k).unwrap());
        }
        let DiscFn::LowerMilnor { cases } = &whitehead else { panic!() };
        assert_eq!(cases[0].provenance, Provenance::Verified);
        assert_eq!(lower_milnor_drf(&[]).unwrap().evaluate_u64(9).unwrap(), big(0));
    }

    #[test]
    fn vanishing_witness_is_rejected() {
        let bad = CoverDerivation::new(
            1,
            2,
            0,
            Witness { link: "unlink(3)".into(), index: vec![0, 1, 2], claimed: BigInt::one() },
        )
        .unwrap();
        assert!(matches!(lower_milnor_drf(&[bad]), Err(DrfError::WitnessVanishes { .. })));
        let declared = CoverDerivation::new(
            2,
            2,
            1,
            Witness { link: "somewhere".into(), index: vec![0, 1, 2], claimed: BigInt::one() },
        )
        .unwrap();
        let f = lower_milnor_drf(&[declared]).unwrap();
        assert_eq!(f.evaluate_u64(3).unwrap(), big(3));
    }

    #[test]
    fn linking_witness_is_linear() {
        let hopf = CoverDerivation::new(
            3,
            1,
            0,
            Witness { link: "hopf".into(), index: vec![0, 1], claimed: BigInt::one() },
        )
        .unwrap();
        let f = lower_milnor_drf(&[hopf]).unwrap();
        assert_eq!(f.evaluate_u64(7).unwrap(), big(7));
    }

    #[test]
    fn orbits() {
        let pair = [nm_drf(nm(2, 4)), nm_drf(nm(8, 1))];
        let o = compose(&pair, &big(3)).unwrap();
        assert_eq!(o.values, vec![big(3), big(11), big(2)]);
        assert_eq!(o.direction, Some(BoundDirection::Exact));
        let bing = vec![nm_drf(nm(2, 1)); 5];
        assert_eq!(compose(&bing, &big(5)).unwrap().values, (0..=5).rev().map(big).collect::<Vec<_>>());
        assert_eq!(compose(&[], &big(7)).unwrap().values, vec![big(7)]);
    }

    #[test]
    fn tables_and_directions() {
        let t = DiscFn::tabulated([(1, big(0))].into_iter().collect(), BoundDirection::Upper).unwrap();
        assert_eq!(t.evaluate_u64(1).unwrap(), big(0));
        assert_eq!(t.evaluate_u64(0).unwrap(), big(0));
        assert!(matches!(t.evaluate_u64(2), Err(DrfError::OutOfTable { .. })));
        assert!(DiscFn::tabulated([(0, big(1))].into_iter().collect(), BoundDirection::Upper).is_err());
        let lower = lower_milnor_drf(&nm_derivations(nm(2, 1))).unwrap();
        assert_eq!(compose(&[nm_drf(nm(2, 1)), lower.clone()], &big(4)).unwrap().direction, Some(BoundDirection::Lower));
        assert_eq!(compose(&[t.clone(), nm_drf(nm(2, 1))], &big(1)).unwrap().direction, Some(BoundDirection::Upper));
        assert_eq!(compose(&[t, lower], &big(1)).unwrap().direction, None);
    }

    #[test]
    fn serde_round_trip() {
        let f = DiscFn::tabulated([(1, big(3)), (2, big(5))].into_iter().collect(), BoundDirection::Lower).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<DiscFn>(&text).unwrap(), f);
        let g = nm_drf(nm(3, 2));
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"kind":"exact_nm","link":[3,2]}"#);
    }
}
