//! Reproduction checks for the published examples, run by `toroshrink report`.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use serde::Serialize;
use toroshrink::drf::{compose, nm_drf};
use toroshrink::linkio::{Builtin, LinkData, NmLinkSpec};
use toroshrink::milnor::{mubar, MultiIndex};
use toroshrink::shrink::{
    ancel_starbird, decide, verify_certificate, CriterionId, GapSequence, Generator, Horizons, LinkSequence, Outcome,
    ShrinkVerdict,
};

use crate::CliError;

type CheckFn = fn() -> Result<Passed, String>;

/// What a passing check observed.
struct Passed {
    detail: String,
    verdict: Option<ShrinkVerdict>,
}

impl Passed {
    fn detail(detail: impl Into<String>) -> Passed {
        Passed { detail: detail.into(), verdict: None }
    }
}

pub struct Check {
    pub id: &'static str,
    pub about: &'static str,
    run: CheckFn,
}

/// Sorted by id.
pub const CHECKS: &[Check] = &[
    Check { id: "drf-bing-lowers-by-one", about: "nm(2,1) sends k to k-1 for k <= 10^4", run: drf_bing },
    Check { id: "drf-nm-3-2-at-8", about: "nm(3,2) sends 8 to 10", run: drf_3_2 },
    Check { id: "drf-whitehead-doubles", about: "nm(1,1) sends k to 2k-1 for k <= 10^4", run: drf_whitehead },
    Check { id: "gaps-constant", about: "one Whitehead link between consecutive Bing links does not shrink", run: gaps_constant },
    Check { id: "gaps-linear", about: "Bing gaps c_i = i do not shrink", run: gaps_linear },
    Check { id: "gaps-powers-of-two", about: "Bing gaps c_i = 2^i shrink", run: gaps_powers },
    Check { id: "milnor-borromean-linking", about: "pairwise linking numbers of the Borromean rings vanish", run: borromean_linking },
    Check { id: "milnor-borromean-triple", about: "mu-bar(0,1,2) of the Borromean rings is +-1", run: borromean_triple },
    Check { id: "milnor-whitehead-0011", about: "mu-bar(0,0,1,1) of the Whitehead link is +-1", run: whitehead_0011 },
    Check { id: "verdict-alternating-chain", about: "n = 2s^2, m = 1 at even steps and n = 2, m = (s+1)^2 at odd steps shrinks", run: alternating },
    Check { id: "verdict-bing", about: "repeated Bing links shrink", run: bing },
    Check { id: "verdict-growing-chain", about: "n = 2i, m = i+1 does not shrink", run: growing },
    Check { id: "verdict-nm-2-2", about: "repeated (2,2)-links do not shrink", run: nm_2_2 },
    Check { id: "verdict-whitehead", about: "repeated Whitehead links do not shrink", run: whitehead },
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub about: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ShrinkVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Runs the selected checks (all when `only` is empty) concurrently; results
/// come back in id order.
pub fn run(only: &[String], timing: bool) -> Result<Vec<CheckResult>, CliError> {
    for id in only {
        if !CHECKS.iter().any(|c| c.id == id) {
            return Err(CliError::UnknownCheck(id.clone()));
        }
    }
    let selected: Vec<&Check> = CHECKS.iter().filter(|c| only.is_empty() || only.iter().any(|id| id == c.id)).collect();
    let mut results: Vec<CheckResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let r = (c.run)();
                    let elapsed_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                    let (passed, detail, verdict) = match r {
                        Ok(p) => (true, p.detail, p.verdict),
                        Err(e) => (false, e, None),
                    };
                    CheckResult { id: c.id, about: c.about, passed, detail, verdict, elapsed_ms }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    results.sort_by_key(|r| r.id);
    Ok(results)
}

fn nm(n: u64, m: u64) -> NmLinkSpec {
    NmLinkSpec::new(n, m).expect("valid parameters")
}

fn drf_table(link: NmLinkSpec, expect: impl Fn(u64) -> u64) -> Result<Passed, String> {
    let f = nm_drf(link);
    for k in 0..=10_000u64 {
        let got = f.evaluate_u64(k).map_err(|e| e.to_string())?;
        if got != BigUint::from(expect(k)) {
            return Err(format!("D({k}) = {got}, expected {}", expect(k)));
        }
    }
    Ok(Passed::detail("all 10001 values match"))
}

fn drf_bing() -> Result<Passed, String> {
    drf_table(nm(2, 1), |k| k.saturating_sub(1))
}

fn drf_whitehead() -> Result<Passed, String> {
    drf_table(nm(1, 1), |k| (2 * k).saturating_sub(1))
}

fn drf_3_2() -> Result<Passed, String> {
    let v = nm_drf(nm(3, 2)).evaluate_u64(8).map_err(|e| e.to_string())?;
    if v == BigUint::from(10u32) {
        Ok(Passed::detail("D(8) = 10"))
    } else {
        Err(format!("D(8) = {v}"))
    }
}

fn builtin(b: Builtin) -> Result<LinkData, String> {
    b.link().map_err(|e| e.to_string())
}

fn unit_mubar(b: Builtin, index: &[usize]) -> Result<Passed, String> {
    let link = builtin(b)?;
    let idx = MultiIndex::new(index.to_vec(), link.component_count()).map_err(|e| e.to_string())?;
    let r = mubar(&link, &idx).map_err(|e| e.to_string())?;
    if r.signed.abs() == BigInt::from(1) {
        Ok(Passed::detail(format!("mu = {}, delta = {}, mu-bar = {}", r.mu, r.delta, r.signed)))
    } else {
        Err(format!("mu-bar({idx}) = {} modulo {}", r.signed, r.delta))
    }
}

fn borromean_triple() -> Result<Passed, String> {
    unit_mubar(Builtin::Borromean, &[0, 1, 2])
}

fn whitehead_0011() -> Result<Passed, String> {
    unit_mubar(Builtin::Whitehead, &[0, 0, 1, 1])
}

fn borromean_linking() -> Result<Passed, String> {
    let LinkData::Diagram(pd) = builtin(Builtin::Borromean)? else { return Err("expected a diagram".into()) };
    let lk = pd.linking_matrix();
    if lk.iter().flatten().any(|&v| v != 0) {
        return Err(format!("linking matrix {lk:?}"));
    }
    let link = LinkData::Diagram(pd);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let r = mubar(&link, &MultiIndex::new(vec![i, j], 3).expect("in range")).map_err(|e| e.to_string())?;
        if r.mu != BigInt::from(0) {
            return Err(format!("mu({i},{j}) = {}", r.mu));
        }
    }
    Ok(Passed::detail("linking matrix and mu(i,j) are zero"))
}

fn expect_verdict(seq: LinkSequence, outcome: Outcome, criterion: Option<CriterionId>) -> Result<Passed, String> {
    let d = decide(&seq, Horizons::default()).map_err(|e| e.to_string())?;
    let v = d.verdict;
    if v.outcome != outcome {
        return Err(format!("{} by {}", v.outcome, v.criterion));
    }
    if criterion.is_some_and(|c| c != v.criterion) {
        return Err(format!("decided by {}, expected {}", v.criterion, criterion.expect("checked")));
    }
    if v.certificate.is_some() && !verify_certificate(&v) {
        return Err("certificate does not verify".into());
    }
    Ok(Passed { detail: format!("{} by {}", v.outcome, v.criterion), verdict: Some(v) })
}

fn periodic(links: &[(u64, u64)]) -> LinkSequence {
    LinkSequence::periodic(links.iter().map(|&(n, m)| nm(n, m)).collect()).expect("nonempty")
}

fn bing() -> Result<Passed, String> {
    expect_verdict(periodic(&[(2, 1)]), Outcome::Shrinks, None)
}

fn whitehead() -> Result<Passed, String> {
    expect_verdict(periodic(&[(1, 1)]), Outcome::DoesNotShrink, None)
}

fn nm_2_2() -> Result<Passed, String> {
    expect_verdict(periodic(&[(2, 2)]), Outcome::DoesNotShrink, None)
}

fn growing() -> Result<Passed, String> {
    let g = Generator::single("2*i", "i+1").map_err(|e| e.to_string())?;
    expect_verdict(LinkSequence::Generator(g), Outcome::DoesNotShrink, Some(CriterionId::SherArmentrout))
}

fn alternating() -> Result<Passed, String> {
    let g = Generator::parity(("2*s^2", "1"), ("2", "(s+1)^2")).map_err(|e| e.to_string())?;
    // the link pair at steps 2s+1, 2s+2 lowers every count by one once s >= 1
    for s in 1..=50u64 {
        let fs = [nm_drf(nm(2, (s + 1) * (s + 1))), nm_drf(nm(2 * (s + 1) * (s + 1), 1))];
        for k in 1..=1000u64 {
            let o = compose(&fs, &BigUint::from(k)).map_err(|e| e.to_string())?;
            if o.values[2] != BigUint::from(k - 1) {
                return Err(format!("s = {s}: {k} goes to {}", o.values[2]));
            }
        }
    }
    let mut p = expect_verdict(LinkSequence::Generator(g), Outcome::Shrinks, Some(CriterionId::Orbit))?;
    p.detail.push_str("; two-step composite is k-1 for 1 <= s <= 50, k <= 1000");
    Ok(p)
}

fn gaps(g: Result<GapSequence, impl std::fmt::Display>, outcome: Outcome) -> Result<Passed, String> {
    let g = g.map_err(|e| e.to_string())?;
    let v = ancel_starbird(&g).map_err(|e| e.to_string())?;
    if v.outcome != outcome {
        return Err(format!("{}", v.outcome));
    }
    if !verify_certificate(&v) {
        return Err("certificate does not verify".into());
    }
    Ok(Passed { detail: v.outcome.to_string(), verdict: Some(v) })
}

fn gaps_constant() -> Result<Passed, String> {
    gaps(GapSequence::periodic(vec![1]), Outcome::DoesNotShrink)
}

fn gaps_linear() -> Result<Passed, String> {
    gaps(GapSequence::closed_form("i"), Outcome::DoesNotShrink)
}

fn gaps_powers() -> Result<Passed, String> {
    gaps(GapSequence::closed_form("2^i"), Outcome::Shrinks)
}
