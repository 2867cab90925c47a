//! Link input: PD codes, Wirtinger presentations, builtin families.

mod chain;
pub mod pd;
pub mod polygon;
pub mod wirtinger;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{Generator, Word};

pub use chain::{chain_diagram, chain_polygons};
pub use pd::{Passage, PdCode, PdError};
pub use polygon::ProjectionError;
pub use wirtinger::{UnderPassage, WirtingerPresentation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("unknown link family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParameters { family: String, reason: String },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("`{0}` is not an (n,m)-link")]
    NotNmLink(String),
}

/// Parameters of an (n,m)-link: chain length and winding number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct NmLinkSpec {
    n: u64,
    m: u64,
}

impl NmLinkSpec {
    pub fn new(n: u64, m: u64) -> Result<NmLinkSpec, LinkError> {
        if n == 0 || m == 0 {
            return Err(LinkError::InvalidParameters {
                family: "nm".into(),
                reason: format!("need n >= 1 and m >= 1, got ({n},{m})"),
            });
        }
        Ok(NmLinkSpec { n, m })
    }

    pub fn n(self) -> u64 {
        self.n
    }

    pub fn m(self) -> u64 {
        self.m
    }
}

impl TryFrom<(u64, u64)> for NmLinkSpec {
    type Error = LinkError;
    fn try_from((n, m): (u64, u64)) -> Result<Self, LinkError> {
        NmLinkSpec::new(n, m)
    }
}

impl From<NmLinkSpec> for (u64, u64) {
    fn from(s: NmLinkSpec) -> (u64, u64) {
        (s.n, s.m)
    }
}

/// `nm(n,m)`, or a builtin that is an (n,m)-link: `whitehead` is nm(1,1) and
/// `bing` (alias `borromean`) is nm(2,1).
impl FromStr for NmLinkSpec {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<NmLinkSpec, LinkError> {
        match s.parse::<Builtin>()? {
            Builtin::Whitehead => NmLinkSpec::new(1, 1),
            Builtin::Borromean => NmLinkSpec::new(2, 1),
            Builtin::Nm(spec) => Ok(spec),
            other => Err(LinkError::NotNmLink(other.to_string())),
        }
    }
}

impl fmt::Display for NmLinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nm({},{})", self.n, self.m)
    }
}

/// Longitudes written in meridian generators, one generator per component.
/// Each word is correct modulo the `class`-th lower central series term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkPresentation {
    longitudes: Vec<Word>,
    class: usize,
}

impl LinkPresentation {
    pub fn new(longitudes: Vec<Word>, class: usize) -> Result<LinkPresentation, LinkError> {
        let n = longitudes.len();
        if n == 0 {
            return Err(LinkError::InvalidPresentation("no components".into()));
        }
        for (i, w) in longitudes.iter().enumerate() {
            if w.rank() != n {
                return Err(LinkError::InvalidPresentation(format!(
                    "longitude {i} has rank {} but there are {n} components",
                    w.rank()
                )));
            }
            if w.exponent_sum(Generator(i)) != 0 {
                return Err(LinkError::InvalidPresentation(format!(
                    "longitude {i} is not zero-framed"
                )));
            }
        }
        Ok(LinkPresentation { longitudes, class })
    }

    pub fn component_count(&self) -> usize {
        self.longitudes.len()
    }

    /// Meridian of component i is generator x_i.
    pub fn meridian(&self, i: usize) -> Generator {
        Generator(i)
    }

    pub fn longitude(&self, i: usize) -> &Word {
        &self.longitudes[i]
    }

    pub fn longitudes(&self) -> &[Word] {
        &self.longitudes
    }

    pub fn class(&self) -> usize {
        self.class
    }
}

/// A link given either by a diagram or by longitude words.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkData {
    Diagram(PdCode),
    Presentation(LinkPresentation),
}

impl LinkData {
    pub fn component_count(&self) -> usize {
        match self {
            LinkData::Diagram(pd) => pd.component_count(),
            LinkData::Presentation(p) => p.component_count(),
        }
    }
}

/// Named builtin link families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Hopf,
    Whitehead,
    Borromean,
    Unlink(usize),
    Nm(NmLinkSpec),
}

pub const HOPF_PD: &str = "X[1,3,2,4] X[3,1,4,2]";
/// Closure of the 3-braid s1 s2^-1 s1 s2^-2.
pub const WHITEHEAD_PD: &str = "X[10,1,7,6] X[1,4,2,5] X[8,2,9,3] X[3,9,4,10] X[5,8,6,7]";
/// Closure of the 3-braid (s1 s2^-1)^3.
pub const BORROMEAN_PD: &str = "X[8,1,5,4] X[1,12,2,9] X[6,2,7,3] X[3,11,4,10] X[9,6,10,5] X[11,7,12,8]";

impl Builtin {
    pub fn link(self) -> Result<LinkData, LinkError> {
        let pd = match self {
            Builtin::Hopf => PdCode::parse(HOPF_PD)?,
            Builtin::Whitehead => PdCode::parse(WHITEHEAD_PD)?,
            Builtin::Borromean => PdCode::parse(BORROMEAN_PD)?,
            Builtin::Unlink(k) => PdCode::build(Vec::new(), (1..=k as u32).collect(), Vec::new())?,
            Builtin::Nm(spec) => chain_diagram(spec.n, spec.m)?,
        };
        Ok(LinkData::Diagram(pd))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Hopf => f.write_str("hopf"),
            Builtin::Whitehead => f.write_str("whitehead"),
            Builtin::Borromean => f.write_str("borromean"),
            Builtin::Unlink(k) => write!(f, "unlink({k})"),
            Builtin::Nm(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Builtin {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Builtin, LinkError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase();
        let args = |prefix: &str| -> Option<Vec<&str>> {
            lower.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')').map(|a| a.split(',').collect())
        };
        let invalid = |family: &str, reason: String| LinkError::InvalidParameters { family: family.into(), reason };
        match lower.as_str() {
            "hopf" => return Ok(Builtin::Hopf),
            "whitehead" => return Ok(Builtin::Whitehead),
            "borromean" | "bing" => return Ok(Builtin::Borromean),
            _ => {}
        }
        if let Some(a) = args("nm") {
            let nums = a
                .iter()
                .map(|x| x.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid("nm", e.to_string()))?;
            if nums.len() != 2 {
                return Err(invalid("nm", format!("expected two parameters, got {}", nums.len())));
            }
            return Ok(Builtin::Nm(NmLinkSpec::new(nums[0], nums[1])?));
        }
        if let Some(a) = args("unlink") {
            let k = a.first().and_then(|x| x.parse::<usize>().ok()).filter(|&k| k >= 1 && a.len() == 1);
            return k.map(Builtin::Unlink).ok_or_else(|| invalid("unlink", "expected one positive count".into()));
        }
        Err(LinkError::UnknownFamily(s.to_string()))
    }
}

/// Branched-cover derivation of a disc replicating function, as declared data:
/// cover degree, components kept besides the distinguished one, blow-downs, and
/// a Milnor invariant of a named link that must be nonzero for the derivation to apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDerivation {
    degree: u64,
    kept: u64,
    blowdowns: u64,
    witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Builtin link on which the invariant is evaluated.
    pub link: String,
    pub index: Vec<usize>,
    /// Claimed signed representative of the residue.
    pub claimed: BigInt,
}

impl CoverDerivation {
    pub fn new(degree: u64, kept: u64, blowdowns: u64, witness: Witness) -> Result<CoverDerivation, LinkError> {
        let invalid = |reason: String| LinkError::InvalidParameters { family: "cover derivation".into(), reason };
        if degree == 0 {
            return Err(invalid("degree must be at least 1".into()));
        }
        if kept == 0 {
            return Err(invalid("at least one component must be kept".into()));
        }
        if witness.claimed != BigInt::from(0) && !witness.index.contains(&0) {
            return Err(invalid("a nonzero witness index must involve component 0".into()));
        }
        Ok(CoverDerivation { degree, kept, blowdowns, witness })
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn kept(&self) -> u64 {
        self.kept
    }

    pub fn blowdowns(&self) -> u64 {
        self.blowdowns
    }

    pub fn witness(&self) -> &Witness {
        &self.witness
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        assert_eq!("nm(3, 2)".parse::<Builtin>().unwrap(), Builtin::Nm(NmLinkSpec::new(3, 2).unwrap()));
        assert_eq!("Hopf".parse::<Builtin>().unwrap(), Builtin::Hopf);
        assert!(matches!("nm(0,2)".parse::<Builtin>(), Err(LinkError::InvalidParameters { .. })));
        assert!(matches!("trefoil".parse::<Builtin>(), Err(LinkError::UnknownFamily(_))));
        assert_eq!(Builtin::Nm(NmLinkSpec::new(2, 1).unwrap()).to_string(), "nm(2,1)");
    }

    #[test]
    fn literal_diagrams() {
        for (text, comps) in [(HOPF_PD, 2), (WHITEHEAD_PD, 2), (BORROMEAN_PD, 3)] {
            let pd = PdCode::parse(text).unwrap();
            assert_eq!(pd.component_count(), comps, "{text}");
        }
        let w = PdCode::parse(WHITEHEAD_PD).unwrap();
        assert_eq!(w.linking_matrix()[0][1], 0);
        let b = PdCode::parse(BORROMEAN_PD).unwrap();
        assert!(b.linking_matrix().iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn chain_linking_numbers() {
        for (n, m) in [(1, 1), (2, 1), (3, 1), (3, 2), (4, 3), (1, 2)] {
            let pd = chain_diagram(n, m).unwrap();
            let lk = pd.linking_matrix();
            assert_eq!(pd.component_count(), n as usize + 1);
            for j in 1..=n as usize {
                assert_eq!(lk[0][j], 0, "nm({n},{m}) axis vs {j}");
            }
            if n >= 3 {
                for j in 1..=n as usize {
                    let next = j % n as usize + 1;
                    assert_eq!(lk[j][next], 1, "nm({n},{m}) clasp {j}");
                }
            }
            if n == 2 {
                assert_eq!(lk[1][2], 0);
            }
        }
    }

    #[test]
    fn presentation_checks_framing() {
        let x = |i| Word::generator(2, i).unwrap();
        assert!(LinkPresentation::new(vec![x(1), x(0)], 2).is_ok());
        assert!(LinkPresentation::new(vec![x(0), x(0)], 2).is_err());
    }
}
