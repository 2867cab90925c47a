//! Defining sequences `L^1, L^2, ...` of (n,m)-links, indexed from 1.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::linkio::{LinkError, NmLinkSpec};

use super::expr::{parse_expr, parse_poly, ExpPoly, Poly};
use super::ShrinkError;

/// Search limit for polynomial nonnegativity thresholds.
pub(crate) const THRESHOLD_LIMIT: i64 = 4096;

/// `tau = n / 2m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tau(BigRational);

impl Tau {
    pub fn of(link: NmLinkSpec) -> Tau {
        Tau(BigRational::new(link.n().into(), (2 * link.m()).into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One branch of a generator: `n` and `m` as polynomials in the branch variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseExpr {
    n_text: String,
    m_text: String,
    n: Poly,
    m: Poly,
}

impl CaseExpr {
    fn parse(n: &str, m: &str, var: &str, from: i64) -> Result<CaseExpr, ShrinkError> {
        let case = CaseExpr {
            n_text: n.to_string(),
            m_text: m.to_string(),
            n: parse_poly(n, var)?,
            m: parse_poly(m, var)?,
        };
        for (name, p) in [("n", &case.n), ("m", &case.m)] {
            if !p.integer_valued() {
                return Err(ShrinkError::Generator(format!("{name} = {p} is not integer-valued")));
            }
            if p.sub(&Poly::from_int(1)).nonnegative_from(from, THRESHOLD_LIMIT).is_none() {
                return Err(ShrinkError::Generator(format!("{name} = {p} is not at least 1 for all {var} >= {from}")));
            }
        }
        Ok(case)
    }

    pub fn n(&self) -> &Poly {
        &self.n
    }

    pub fn m(&self) -> &Poly {
        &self.m
    }

    fn eval(&self, x: i64) -> NmLinkSpec {
        let v = |p: &Poly| p.eval_int(x).to_integer().to_u64().expect("validated positive integer");
        NmLinkSpec::new(v(&self.n), v(&self.m)).expect("validated positive")
    }

    fn shifted(&self, by: i64) -> (Poly, Poly) {
        (self.n.shift(by), self.m.shift(by))
    }
}

/// Closed-form sequence: either one formula in `i`, or an even/odd pair in `s`
/// with `L^{2s}` from `even` (s >= 1) and `L^{2s+1}` from `odd` (s >= 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Single(CaseExpr),
    Parity { even: CaseExpr, odd: CaseExpr },
}

/// Windows `L^{start}, ..., L^{start+len-1}` whose start runs through an
/// arithmetic progression, written as polynomials in a parameter `t >= t_min`.
#[derive(Debug, Clone)]
pub(crate) struct WindowClass {
    /// start index = `scale * t + offset`
    pub scale: i64,
    pub offset: i64,
    pub t_min: i64,
    pub links: Vec<(Poly, Poly)>,
}

impl WindowClass {
    pub fn describe(&self) -> String {
        format!("start = {}*t + {}, t >= {}", self.scale, self.offset, self.t_min)
    }
}

impl Generator {
    pub fn single(n: &str, m: &str) -> Result<Generator, ShrinkError> {
        Ok(Generator::Single(CaseExpr::parse(n, m, "i", 1)?))
    }

    pub fn parity(even: (&str, &str), odd: (&str, &str)) -> Result<Generator, ShrinkError> {
        Ok(Generator::Parity {
            even: CaseExpr::parse(even.0, even.1, "s", 1)?,
            odd: CaseExpr::parse(odd.0, odd.1, "s", 0)?,
        })
    }

    pub fn link(&self, i: u64) -> NmLinkSpec {
        match self {
            Generator::Single(c) => c.eval(i as i64),
            Generator::Parity { even, odd } => {
                if i.is_multiple_of(2) {
                    even.eval((i / 2) as i64)
                } else {
                    odd.eval((i / 2) as i64)
                }
            }
        }
    }

    pub fn cases(&self) -> Vec<&CaseExpr> {
        match self {
            Generator::Single(c) => vec![c],
            Generator::Parity { even, odd } => vec![even, odd],
        }
    }

    /// Windows of length `len` starting at `first, first + step, ...`; `None`
    /// when the step does not respect the generator's period.
    pub(crate) fn windows(&self, len: usize, step: u64, first: u64) -> Option<Vec<WindowClass>> {
        let first = first.max(1) as i64;
        let step = step as i64;
        match self {
            Generator::Single(c) => {
                // start = first + step * t
                let links = (0..len as i64)
                    .map(|j| (c.n.compose_affine(step, first + j), c.m.compose_affine(step, first + j)))
                    .collect();
                Some(vec![WindowClass { scale: step, offset: first, t_min: 0, links }])
            }
            Generator::Parity { even, odd } => {
                let parities: Vec<i64> = match step {
                    1 => vec![0, 1],
                    2 => vec![first % 2],
                    _ => return None,
                };
                Some(
                    parities
                        .into_iter()
                        .map(|c| {
                            // start = 2s + c with 2s + c >= first
                            let t_min = (first - c + 1).div_euclid(2);
                            let links = (0..len as i64)
                                .map(|j| {
                                    let case = if (c + j) % 2 == 0 { even } else { odd };
                                    case.shifted((c + j).div_euclid(2))
                                })
                                .collect();
                            WindowClass { scale: 2, offset: c, t_min, links }
                        })
                        .collect(),
                )
            }
        }
    }

    /// Bounded `n`: every branch has constant `n`.
    pub fn n_bound(&self) -> Option<u64> {
        self.cases().iter().map(|c| c.n.as_constant().and_then(|v| v.to_integer().to_u64())).try_fold(0, |acc, v| v.map(|v| acc.max(v)))
    }

    /// The generator as a periodic list when every branch is constant.
    pub fn as_periodic(&self) -> Option<Vec<NmLinkSpec>> {
        if self.cases().iter().any(|c| c.n.as_constant().is_none() || c.m.as_constant().is_none()) {
            return None;
        }
        Some(match self {
            Generator::Single(_) => vec![self.link(1)],
            Generator::Parity { .. } => vec![self.link(1), self.link(2)],
        })
    }
}

/// Gap sequence `c_1, c_2, ...`: `c_i` Bing links, then one Whitehead link, repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSequence {
    prefix: Vec<u64>,
    tail: GapTail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapTail {
    Periodic(Vec<u64>),
    /// `c_i` for every `i` past the prefix, in the variable `i`.
    ClosedForm { text: String, expr: ExpPoly },
    Unknown,
}

impl GapSequence {
    pub fn periodic(period: Vec<u64>) -> Result<GapSequence, ShrinkError> {
        GapSequence::new(Vec::new(), GapTail::Periodic(period))
    }

    pub fn closed_form(text: &str) -> Result<GapSequence, ShrinkError> {
        let expr = parse_expr(text, "i")?;
        GapSequence::new(Vec::new(), GapTail::ClosedForm { text: text.into(), expr })
    }

    pub fn explicit(gaps: Vec<u64>) -> Result<GapSequence, ShrinkError> {
        GapSequence::new(gaps, GapTail::Unknown)
    }

    /// From increasing Whitehead positions `w_1 < w_2 < ...` (with `w_0 = 0`).
    pub fn from_positions(positions: &[u64]) -> Result<GapSequence, ShrinkError> {
        let mut prev = 0;
        let mut gaps = Vec::with_capacity(positions.len());
        for &w in positions {
            if w <= prev {
                return Err(ShrinkError::Gaps(format!("positions must increase from 1, got {w} after {prev}")));
            }
            gaps.push(w - prev - 1);
            prev = w;
        }
        GapSequence::explicit(gaps)
    }

    pub fn new(prefix: Vec<u64>, tail: GapTail) -> Result<GapSequence, ShrinkError> {
        let tail = match tail {
            GapTail::Periodic(p) if p.is_empty() => return Err(ShrinkError::EmptyPeriod),
            GapTail::ClosedForm { expr, .. } if expr.terms().is_empty() => GapTail::Periodic(vec![0]),
            GapTail::ClosedForm { text, expr } => {
                validate_gap_expr(&expr, prefix.len() as u64 + 1)?;
                GapTail::ClosedForm { text, expr }
            }
            t => t,
        };
        Ok(GapSequence { prefix, tail })
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> &GapTail {
        &self.tail
    }

    /// `c_i` for `i >= 1`, `None` past a declared-unknown tail.
    pub fn gap(&self, i: u64) -> Option<BigUint> {
        let i0 = i.checked_sub(1)? as usize;
        if let Some(&c) = self.prefix.get(i0) {
            return Some(c.into());
        }
        let j = i0 - self.prefix.len();
        match &self.tail {
            GapTail::Periodic(p) => Some(p[j % p.len()].into()),
            GapTail::ClosedForm { expr, .. } => expr.eval(i).to_integer().to_biguint(),
            GapTail::Unknown => None,
        }
    }

    /// First `count` links of the Bing/Whitehead sequence (fewer if the tail is unknown).
    pub fn links(&self, count: usize) -> Vec<NmLinkSpec> {
        let bing = NmLinkSpec::new(2, 1).expect("valid");
        let whitehead = NmLinkSpec::new(1, 1).expect("valid");
        let mut out = Vec::with_capacity(count);
        let mut i = 1;
        while out.len() < count {
            let Some(c) = self.gap(i) else { break };
            let c = c.to_usize().unwrap_or(usize::MAX).min(count - out.len());
            out.extend(std::iter::repeat_n(bing, c));
            if out.len() < count {
                out.push(whitehead);
            }
            i += 1;
        }
        out
    }

    /// The link sequence as prefix + period, when the gap tail is periodic.
    pub fn as_eventually_periodic(&self) -> Option<(Vec<NmLinkSpec>, Vec<NmLinkSpec>)> {
        let GapTail::Periodic(p) = &self.tail else { return None };
        let expand = |gaps: &[u64]| {
            let mut v = Vec::new();
            for &c in gaps {
                v.extend(std::iter::repeat_n(NmLinkSpec::new(2, 1).expect("valid"), c as usize));
                v.push(NmLinkSpec::new(1, 1).expect("valid"));
            }
            v
        };
        Some((expand(&self.prefix), expand(p)))
    }
}

/// Gaps must be nonnegative integers. Polynomial parts are checked symbolically;
/// with an exponential part the dominant term must have positive leading
/// coefficient, and the first values are checked directly.
fn validate_gap_expr(expr: &ExpPoly, from: u64) -> Result<(), ShrinkError> {
    for (b, p) in expr.terms() {
        if !p.integer_valued() {
            return Err(ShrinkError::Gaps(format!("coefficient {p} of {b}^i is not integer-valued")));
        }
    }
    let (base, lead) = expr.dominant().expect("nonzero expression");
    if base == 1 {
        if lead.nonnegative_from(from as i64, THRESHOLD_LIMIT).is_none() {
            return Err(ShrinkError::Gaps(format!("gap {lead} is negative for some i >= {from}")));
        }
    } else if !lead.leading().is_positive() {
        return Err(ShrinkError::Gaps("dominant exponential term has negative coefficient".into()));
    }
    for i in from..from + 64 {
        if expr.eval(i).is_negative() {
            return Err(ShrinkError::Gaps(format!("gap at i = {i} is negative")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkSequence {
    Periodic { links: Vec<NmLinkSpec> },
    EventuallyPeriodic { prefix: Vec<NmLinkSpec>, period: Vec<NmLinkSpec> },
    Generator(Generator),
    /// Finitely many known links; nothing is assumed about the rest.
    Explicit { links: Vec<NmLinkSpec> },
    BingWhitehead(GapSequence),
}

impl LinkSequence {
    pub fn periodic(links: Vec<NmLinkSpec>) -> Result<LinkSequence, ShrinkError> {
        if links.is_empty() {
            return Err(ShrinkError::EmptyPeriod);
        }
        Ok(LinkSequence::Periodic { links })
    }

    pub fn eventually_periodic(prefix: Vec<NmLinkSpec>, period: Vec<NmLinkSpec>) -> Result<LinkSequence, ShrinkError> {
        if period.is_empty() {
            return Err(ShrinkError::EmptyPeriod);
        }
        Ok(LinkSequence::EventuallyPeriodic { prefix, period })
    }

    /// `L^i` for `i >= 1`; `None` when unknown.
    pub fn link(&self, i: u64) -> Option<NmLinkSpec> {
        let j = i.checked_sub(1)? as usize;
        match self {
            LinkSequence::Periodic { links } => Some(links[j % links.len()]),
            LinkSequence::EventuallyPeriodic { prefix, period } => Some(match prefix.get(j) {
                Some(&l) => l,
                None => period[(j - prefix.len()) % period.len()],
            }),
            LinkSequence::Generator(g) => Some(g.link(i)),
            LinkSequence::Explicit { links } => links.get(j).copied(),
            LinkSequence::BingWhitehead(g) => g.links(j + 1).get(j).copied(),
        }
    }

    /// `L^1, ..., L^count`, stopping early at an unknown tail.
    pub fn links(&self, count: usize) -> Vec<NmLinkSpec> {
        match self {
            LinkSequence::BingWhitehead(g) => g.links(count),
            _ => (1..=count as u64).map_while(|i| self.link(i)).collect(),
        }
    }

    pub fn tau(&self, i: u64) -> Option<Tau> {
        self.link(i).map(Tau::of)
    }

    /// `(prefix, period)` for sequences that are eventually periodic.
    pub fn eventually_periodic_parts(&self) -> Option<(Vec<NmLinkSpec>, Vec<NmLinkSpec>)> {
        match self {
            LinkSequence::Periodic { links } => Some((Vec::new(), links.clone())),
            LinkSequence::EventuallyPeriodic { prefix, period } => Some((prefix.clone(), period.clone())),
            LinkSequence::Generator(g) => g.as_periodic().map(|p| (Vec::new(), p)),
            LinkSequence::BingWhitehead(g) => g.as_eventually_periodic(),
            LinkSequence::Explicit { .. } => None,
        }
    }

    pub fn from_json(text: &str) -> Result<LinkSequence, ShrinkError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ShrinkError::Config(e.to_string()))?;
        LinkSequence::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<LinkSequence, ShrinkError> {
        let obj = v.as_object().ok_or_else(|| ShrinkError::Config("expected a JSON object".into()))?;
        let variant = str_field(obj, "variant")?;
        match variant {
            "periodic" => LinkSequence::periodic(link_list(obj, "links")?),
            "eventually_periodic" => {
                LinkSequence::eventually_periodic(link_list(obj, "prefix")?, link_list(obj, "period")?)
            }
            "explicit" => Ok(LinkSequence::Explicit { links: link_list(obj, "links")? }),
            "generator" => {
                let case = |key: &str| -> Result<(String, String), ShrinkError> {
                    let c = obj
                        .get(key)
                        .and_then(Value::as_object)
                        .ok_or_else(|| ShrinkError::Config(format!("missing object `{key}`")))?;
                    Ok((str_field(c, "n")?.to_string(), str_field(c, "m")?.to_string()))
                };
                let g = if obj.contains_key("even") || obj.contains_key("odd") {
                    let (even, odd) = (case("even")?, case("odd")?);
                    Generator::parity((&even.0, &even.1), (&odd.0, &odd.1))?
                } else {
                    Generator::single(str_field(obj, "n")?, str_field(obj, "m")?)?
                };
                Ok(LinkSequence::Generator(g))
            }
            "bing_whitehead" => {
                let gaps = obj.get("gaps").ok_or_else(|| ShrinkError::Config("missing `gaps`".into()))?;
                Ok(LinkSequence::BingWhitehead(gaps_from_value(gaps)?))
            }
            other => Err(ShrinkError::Config(format!("unknown variant `{other}`"))),
        }
    }

    pub fn to_value(&self) -> Value {
        let links = |l: &[NmLinkSpec]| Value::Array(l.iter().map(|s| json!({"nm": [s.n(), s.m()]})).collect());
        match self {
            LinkSequence::Periodic { links: l } => json!({"variant": "periodic", "links": links(l)}),
            LinkSequence::EventuallyPeriodic { prefix, period } => {
                json!({"variant": "eventually_periodic", "prefix": links(prefix), "period": links(period)})
            }
            LinkSequence::Explicit { links: l } => json!({"variant": "explicit", "links": links(l)}),
            LinkSequence::Generator(Generator::Single(c)) => {
                json!({"variant": "generator", "n": c.n_text, "m": c.m_text})
            }
            LinkSequence::Generator(Generator::Parity { even, odd }) => json!({
                "variant": "generator",
                "even": {"n": even.n_text, "m": even.m_text},
                "odd": {"n": odd.n_text, "m": odd.m_text},
            }),
            LinkSequence::BingWhitehead(g) => {
                let mut gaps = Map::new();
                if !g.prefix.is_empty() {
                    gaps.insert("prefix".into(), json!(g.prefix));
                }
                match &g.tail {
                    GapTail::Periodic(p) => {
                        gaps.insert("periodic".into(), json!(p));
                    }
                    GapTail::ClosedForm { text, .. } => {
                        gaps.insert("closed_form".into(), json!(text));
                    }
                    GapTail::Unknown => {}
                }
                json!({"variant": "bing_whitehead", "gaps": gaps})
            }
        }
    }
}

impl fmt::Display for LinkSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_value().to_string())
    }
}

impl Serialize for LinkSequence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinkSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<LinkSequence, D::Error> {
        let v = Value::deserialize(d)?;
        LinkSequence::from_value(&v).map_err(serde::de::Error::custom)
    }
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, ShrinkError> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ShrinkError::Config(format!("missing string field `{key}`")))
}

fn link_list(obj: &Map<String, Value>, key: &str) -> Result<Vec<NmLinkSpec>, ShrinkError> {
    let arr = obj
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| ShrinkError::Config(format!("missing array `{key}`")))?;
    arr.iter().map(link_entry).collect()
}

/// `{"nm": [n, m]}` or `{"builtin": "whitehead"}`.
fn link_entry(v: &Value) -> Result<NmLinkSpec, ShrinkError> {
    if let Some(pair) = v.get("nm") {
        let (n, m): (u64, u64) = serde_json::from_value(pair.clone()).map_err(|e| ShrinkError::Config(e.to_string()))?;
        return Ok(NmLinkSpec::new(n, m)?);
    }
    if let Some(name) = v.get("builtin").and_then(Value::as_str) {
        return name.parse::<NmLinkSpec>().map_err(|e| match e {
            LinkError::NotNmLink(other) => ShrinkError::NotNmLink(other),
            e => e.into(),
        });
    }
    Err(ShrinkError::Config(format!("link entry must be {{\"nm\": [n, m]}} or {{\"builtin\": name}}, got {v}")))
}

fn gaps_from_value(v: &Value) -> Result<GapSequence, ShrinkError> {
    let obj = v.as_object().ok_or_else(|| ShrinkError::Config("`gaps` must be an object".into()))?;
    let ints = |key: &str| -> Result<Option<Vec<u64>>, ShrinkError> {
        obj.get(key)
            .map(|x| serde_json::from_value(x.clone()).map_err(|e| ShrinkError::Config(format!("`{key}`: {e}"))))
            .transpose()
    };
    let prefix = ints("prefix")?.unwrap_or_default();
    let tail = match (ints("periodic")?, obj.get("closed_form")) {
        (Some(_), Some(_)) => return Err(ShrinkError::Config("give `periodic` or `closed_form`, not both".into())),
        (Some(p), None) => GapTail::Periodic(p),
        (None, Some(text)) => {
            let text = text.as_str().ok_or_else(|| ShrinkError::Config("`closed_form` must be a string".into()))?;
            GapTail::ClosedForm { text: text.into(), expr: parse_expr(text, "i")? }
        }
        (None, None) => GapTail::Unknown,
    };
    GapSequence::new(prefix, tail)
}

/// Exact `prod_{i in links} tau_i`.
pub fn tau_product(links: &[NmLinkSpec]) -> BigRational {
    let num: BigInt = links.iter().map(|l| BigInt::from(l.n())).product();
    let den: BigInt = links.iter().map(|l| BigInt::from(2 * l.m())).product();
    BigRational::new(num, den)
}

/// Partial products `P_0 = 1, P_1, ..., P_len` of `tau`.
pub fn partial_products(links: &[NmLinkSpec]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(links.len() + 1);
    let mut acc = BigRational::one();
    out.push(acc.clone());
    for &l in links {
        acc *= Tau::of(l).0;
        out.push(acc.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(n: u64, m: u64) -> NmLinkSpec {
        NmLinkSpec::new(n, m).unwrap()
    }

    #[test]
    fn example_generators() {
        let g = Generator::single("2*i", "i+1").unwrap();
        assert_eq!(g.link(3), nm(6, 4));
        let g = Generator::parity(("2*s^2", "1"), ("2", "(s+1)^2")).unwrap();
        assert_eq!(g.link(1), nm(2, 1));
        assert_eq!(g.link(2), nm(2, 1));
        assert_eq!(g.link(3), nm(2, 4));
        assert_eq!(g.link(4), nm(8, 1));
        assert!(Generator::single("i - 1", "1").is_err());
        assert!(Generator::single("i/2", "1").is_err());
    }

    #[test]
    fn config_round_trip() {
        for text in [
            r#"{"variant":"periodic","links":[{"nm":[2,1]},{"nm":[1,1]}]}"#,
            r#"{"variant":"generator","even":{"n":"2*s^2","m":"1"},"odd":{"n":"2","m":"(s+1)^2"}}"#,
            r#"{"variant":"generator","n":"2*i","m":"i+1"}"#,
            r#"{"variant":"eventually_periodic","prefix":[{"nm":[3,2]}],"period":[{"nm":[2,2]}]}"#,
            r#"{"variant":"explicit","links":[{"nm":[2,1]}]}"#,
            r#"{"variant":"bing_whitehead","gaps":{"closed_form":"2^i"}}"#,
            r#"{"variant":"bing_whitehead","gaps":{"prefix":[3],"periodic":[1,0]}}"#,
        ] {
            let s = LinkSequence::from_json(text).unwrap();
            let back: LinkSequence = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            assert_eq!(s, back, "{text}");
        }
        let s = LinkSequence::from_json(r#"{"variant":"periodic","links":[{"builtin":"bing"},{"builtin":"whitehead"}]}"#);
        assert_eq!(s.unwrap(), LinkSequence::periodic(vec![nm(2, 1), nm(1, 1)]).unwrap());
        assert!(matches!(
            LinkSequence::from_json(r#"{"variant":"periodic","links":[]}"#),
            Err(ShrinkError::EmptyPeriod)
        ));
        assert!(LinkSequence::from_json(r#"{"variant":"periodic","links":[{"builtin":"hopf"}]}"#).is_err());
        assert!(LinkSequence::from_json(r#"{"variant":"spiral"}"#).is_err());
    }

    #[test]
    fn gap_links() {
        let g = GapSequence::periodic(vec![1]).unwrap();
        assert_eq!(g.links(4), vec![nm(2, 1), nm(1, 1), nm(2, 1), nm(1, 1)]);
        let g = GapSequence::closed_form("2^i").unwrap();
        assert_eq!(g.links(8).iter().filter(|l| l.n() == 1).count(), 2);
        assert_eq!(GapSequence::from_positions(&[1, 3]).unwrap().prefix(), &[0, 1]);
        assert!(GapSequence::closed_form("i - 3").is_err());
        assert!(GapSequence::closed_form("1 - 2^i").is_err());
        assert_eq!(GapSequence::closed_form("0").unwrap().tail(), &GapTail::Periodic(vec![0]));
    }

    #[test]
    fn products() {
        assert_eq!(tau_product(&[nm(2, 1)]), BigRational::one());
        assert_eq!(tau_product(&[nm(1, 1), nm(2, 2)]), BigRational::new(1.into(), 4.into()));
        assert_eq!(partial_products(&[nm(1, 1)]).len(), 2);
    }
}
