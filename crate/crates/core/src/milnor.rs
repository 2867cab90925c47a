//! Milnor invariants from longitudes rewritten in meridians.
//!
//! Components are numbered from 0; component 0 is the distinguished one when a
//! link describes a stage of a toroidal decomposition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{Generator, Letter, Word};
use crate::linkio::{LinkData, LinkError, LinkPresentation, PdCode, WirtingerPresentation};
use crate::magnus::{expand, lcs_depth, MagnusSeries};

/// Longest multi-index accepted.
pub const MAX_INDEX_LEN: usize = 8;
/// Cap on the number of monomials a truncated longitude may carry.
pub const MONOMIAL_BUDGET: u128 = 2_000_000;
/// Cap on total letters held while rewriting longitudes as words.
pub const LETTER_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MilnorError {
    #[error("multi-index must have at least two entries, got {0}")]
    IndexTooShort(usize),
    #[error("multi-index of length {len} exceeds the limit {max}")]
    IndexTooLong { len: usize, max: usize },
    #[error("index entry {entry} out of range for {components} components")]
    IndexOutOfRange { entry: usize, components: usize },
    #[error("cannot parse multi-index `{0}`")]
    IndexParse(String),
    #[error("class {0} is too small; need at least 2")]
    ClassTooSmall(usize),
    #[error("presentation is valid modulo class {have}, but class {need} was requested")]
    PresentationTooShallow { have: usize, need: usize },
    #[error("computation too large: {0}")]
    Budget(String),
    #[error("longitude of component {component} did not stabilise modulo class {class}")]
    NonConvergence { component: usize, class: usize },
    #[error(transparent)]
    Link(#[from] LinkError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>, components: usize) -> Result<MultiIndex, MilnorError> {
        if entries.len() < 2 {
            return Err(MilnorError::IndexTooShort(entries.len()));
        }
        if entries.len() > MAX_INDEX_LEN {
            return Err(MilnorError::IndexTooLong { len: entries.len(), max: MAX_INDEX_LEN });
        }
        if let Some(&entry) = entries.iter().find(|&&e| e >= components) {
            return Err(MilnorError::IndexOutOfRange { entry, components });
        }
        Ok(MultiIndex(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sub-indices for the indeterminacy: delete at least one entry keeping at
    /// least two, then take every cyclic rotation of what remains.
    pub fn reductions(&self) -> BTreeSet<Vec<usize>> {
        let r = self.0.len();
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << r) - 1 {
            let kept: Vec<usize> =
                (0..r).filter(|&i| mask & (1 << i) != 0).map(|i| self.0[i]).collect();
            if kept.len() < 2 {
                continue;
            }
            for s in 0..kept.len() {
                let mut rot = kept.clone();
                rot.rotate_left(s);
                out.insert(rot);
            }
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `0,0,1,1`; range is checked when the index meets a link.
impl FromStr for MultiIndex {
    type Err = MilnorError;

    fn from_str(s: &str) -> Result<MultiIndex, MilnorError> {
        let entries = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| MilnorError::IndexParse(s.to_string()))?;
        MultiIndex::new(entries, usize::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilnorRecord {
    pub index: MultiIndex,
    #[serde(with = "crate::serde_str")]
    pub mu: BigInt,
    /// 0 when there is no indeterminacy.
    #[serde(with = "crate::serde_str")]
    pub delta: BigInt,
    /// Residue in `[0, delta)`, or `mu` when `delta` is 0.
    #[serde(with = "crate::serde_str")]
    pub mubar: BigInt,
    /// Representative of the residue closest to zero.
    #[serde(with = "crate::serde_str")]
    pub signed: BigInt,
}

impl MilnorRecord {
    fn assemble(index: MultiIndex, mu: BigInt, delta: BigInt) -> MilnorRecord {
        let (mubar, signed) = if delta.is_zero() {
            (mu.clone(), mu.clone())
        } else {
            let r = mu.mod_floor(&delta);
            let s = if &r * 2 > delta { &r - &delta } else { r.clone() };
            (r, s)
        };
        MilnorRecord { index, mu, delta, mubar, signed }
    }
}

fn check_class(q: usize) -> Result<(), MilnorError> {
    if q < 2 {
        return Err(MilnorError::ClassTooSmall(q));
    }
    Ok(())
}

fn check_budget(components: usize, q: usize) -> Result<(), MilnorError> {
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..q {
        layer = layer.saturating_mul(components as u128);
        total = total.saturating_add(layer);
    }
    if total > MONOMIAL_BUDGET {
        return Err(MilnorError::Budget(format!(
            "{components} components at class {q} allow {total} monomials (limit {MONOMIAL_BUDGET})"
        )));
    }
    Ok(())
}

/// One round of the rewriting: each arc becomes the previous arc of its
/// component conjugated by the previous image of the arc passing over.
fn rewrite_round<T: Clone>(
    pres: &WirtingerPresentation,
    prev: &[T],
    meridian_image: impl Fn(usize) -> T,
    conjugate: &mut impl FnMut(&T, &T, i64) -> Result<T, MilnorError>,
) -> Result<Vec<T>, MilnorError> {
    let mut next: Vec<Option<T>> = vec![None; prev.len()];
    for c in 0..pres.component_count() {
        let first = pres.meridian[c];
        next[first] = Some(meridian_image(c));
        let mut current = meridian_image(c);
        for p in &pres.passages[c] {
            if p.to == first {
                break;
            }
            current = conjugate(&current, &prev[p.over], p.sign)?;
            next[p.to] = Some(current.clone());
        }
    }
    Ok(next.into_iter().map(|t| t.expect("every arc is reached")).collect())
}

/// Longitude of `component` rewritten as a word in meridians, correct modulo
/// the `q`-th lower central series term.
pub fn reduce_longitude(
    pres: &WirtingerPresentation,
    component: usize,
    q: usize,
) -> Result<Word, MilnorError> {
    Ok(reduce_all_longitudes(pres, q)?.swap_remove(component))
}

fn reduce_all_longitudes(pres: &WirtingerPresentation, q: usize) -> Result<Vec<Word>, MilnorError> {
    check_class(q)?;
    let n = pres.component_count();
    let x = |c: usize| Word::generator(n, c).expect("component in range");
    let mut letters = 0usize;
    let mut conj = |a: &Word, over: &Word, sign: i64| -> Result<Word, MilnorError> {
        let w = over.pow(sign);
        let out = w.invert().mul_same_rank(a).mul_same_rank(&w);
        letters += out.len();
        if letters > LETTER_BUDGET {
            return Err(MilnorError::Budget(format!(
                "rewriting longitudes needs more than {LETTER_BUDGET} letters; use the series path"
            )));
        }
        Ok(out)
    };
    let mut images: Vec<Word> = pres.arc_component.iter().map(|&c| x(c)).collect();
    for _ in 1..q {
        images = rewrite_round(pres, &images, x, &mut conj)?;
    }
    let longitudes = |images: &[Word]| -> Vec<Word> {
        (0..n)
            .map(|c| {
                let mut w = Word::identity(n);
                for p in &pres.passages[c] {
                    w = w.mul_same_rank(&images[p.over].pow(p.sign));
                }
                w.mul_same_rank(&x(c).pow(-pres.self_writhe[c]))
            })
            .collect()
    };
    let current = longitudes(&images);
    let refined = longitudes(&rewrite_round(pres, &images, x, &mut conj)?);
    for c in 0..n {
        let defect = refined[c].mul_same_rank(&current[c].invert());
        if lcs_depth(&defect, q).expect("class at least 2") < q {
            return Err(MilnorError::NonConvergence { component: c, class: q });
        }
    }
    Ok(current)
}

/// Presentation of a diagram by longitude words in meridians, valid modulo class `q`.
pub fn presentation(pd: &PdCode, q: usize) -> Result<LinkPresentation, MilnorError> {
    let pres = WirtingerPresentation::from_pd(pd);
    Ok(LinkPresentation::new(reduce_all_longitudes(&pres, q)?, q)?)
}

/// Magnus expansion of an arc image and of its inverse.
#[derive(Clone)]
struct SeriesPair {
    fwd: MagnusSeries,
    inv: MagnusSeries,
}

fn letter_pair(c: usize, degree: usize) -> SeriesPair {
    let g = |inverse| {
        let w = Word::reduce(c + 1, vec![Letter::new(c, inverse)]).expect("generator in range");
        expand(&w, degree).expect("degree at least 1")
    };
    SeriesPair { fwd: g(false), inv: g(true) }
}

fn series_longitudes(pres: &WirtingerPresentation, q: usize) -> Result<Vec<MagnusSeries>, MilnorError> {
    check_class(q)?;
    let n = pres.component_count();
    check_budget(n, q - 1)?;
    let degree = q - 1;
    let meridians: Vec<SeriesPair> = (0..n).map(|c| letter_pair(c, degree)).collect();
    let mul = |a: &MagnusSeries, b: &MagnusSeries| a.multiply(b).expect("same degree");
    let mut conj = |a: &SeriesPair, over: &SeriesPair, sign: i64| -> Result<SeriesPair, MilnorError> {
        let (w, wi) = if sign > 0 { (&over.fwd, &over.inv) } else { (&over.inv, &over.fwd) };
        Ok(SeriesPair { fwd: mul(&mul(wi, &a.fwd), w), inv: mul(&mul(wi, &a.inv), w) })
    };
    let merid = |c: usize| meridians[c].clone();
    let mut images: Vec<SeriesPair> = pres.arc_component.iter().map(|&c| merid(c)).collect();
    for _ in 1..q {
        images = rewrite_round(pres, &images, merid, &mut conj)?;
    }
    let longitudes = |images: &[SeriesPair]| -> Vec<MagnusSeries> {
        (0..n)
            .map(|c| {
                let mut s = MagnusSeries::one(degree);
                for p in &pres.passages[c] {
                    let f = if p.sign > 0 { &images[p.over].fwd } else { &images[p.over].inv };
                    s = mul(&s, f);
                }
                let w = pres.self_writhe[c];
                let m = if w > 0 { &meridians[c].inv } else { &meridians[c].fwd };
                for _ in 0..w.abs() {
                    s = mul(&s, m);
                }
                s
            })
            .collect()
    };
    let current = longitudes(&images);
    let refined = longitudes(&rewrite_round(pres, &images, merid, &mut conj)?);
    for c in 0..n {
        if current[c] != refined[c] {
            return Err(MilnorError::NonConvergence { component: c, class: q });
        }
    }
    Ok(current)
}

/// Truncated longitude expansions of a link at a fixed class, for repeated queries.
#[derive(Debug, Clone)]
pub struct MilnorContext {
    class: usize,
    longitudes: Vec<MagnusSeries>,
}

impl MilnorContext {
    /// Prepares invariants of length up to `class`.
    pub fn new(link: &LinkData, class: usize) -> Result<MilnorContext, MilnorError> {
        check_class(class)?;
        let longitudes = match link {
            LinkData::Diagram(pd) => series_longitudes(&WirtingerPresentation::from_pd(pd), class)?,
            LinkData::Presentation(p) => {
                if p.class() < class {
                    return Err(MilnorError::PresentationTooShallow { have: p.class(), need: class });
                }
                check_budget(p.component_count(), class - 1)?;
                p.longitudes()
                    .iter()
                    .map(|w| expand(w, class - 1).expect("degree at least 1"))
                    .collect()
            }
        };
        Ok(MilnorContext { class, longitudes })
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn component_count(&self) -> usize {
        self.longitudes.len()
    }

    /// Expansion of the longitude of component `c`, truncated below the class.
    pub fn longitude_series(&self, c: usize) -> &MagnusSeries {
        &self.longitudes[c]
    }

    fn check(&self, index: &MultiIndex) -> Result<(), MilnorError> {
        MultiIndex::new(index.0.clone(), self.component_count())?;
        if index.len() > self.class {
            return Err(MilnorError::PresentationTooShallow { have: self.class, need: index.len() });
        }
        Ok(())
    }

    fn raw_mu(&self, entries: &[usize]) -> BigInt {
        let (last, rest) = entries.split_last().expect("at least two entries");
        self.longitudes[*last].coefficient(rest).expect("length within class")
    }

    pub fn mu(&self, index: &MultiIndex) -> Result<BigInt, MilnorError> {
        self.check(index)?;
        Ok(self.raw_mu(&index.0))
    }

    pub fn delta(&self, index: &MultiIndex) -> Result<BigInt, MilnorError> {
        self.check(index)?;
        Ok(index
            .reductions()
            .iter()
            .fold(BigInt::zero(), |g, sub| g.gcd(&self.raw_mu(sub))))
    }

    pub fn mubar(&self, index: &MultiIndex) -> Result<MilnorRecord, MilnorError> {
        let mu = self.mu(index)?;
        let delta = self.delta(index)?;
        Ok(MilnorRecord::assemble(index.clone(), mu, delta))
    }

    /// Records for every multi-index of length 2 through `max_len`.
    pub fn all_upto_length(&self, max_len: usize) -> Result<Vec<MilnorRecord>, MilnorError> {
        let n = self.component_count();
        let mut out = Vec::new();
        for len in 2..=max_len {
            let total = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
            if total > MONOMIAL_BUDGET {
                return Err(MilnorError::Budget(format!("{total} multi-indices of length {len}")));
            }
            let mut entries = vec![0usize; len];
            loop {
                out.push(self.mubar(&MultiIndex::new(entries.clone(), n)?)?);
                let Some(pos) = entries.iter().rposition(|&e| e + 1 < n) else { break };
                entries[pos] += 1;
                entries[pos + 1..].iter_mut().for_each(|e| *e = 0);
            }
        }
        Ok(out)
    }
}

pub fn mu(link: &LinkData, index: &MultiIndex) -> Result<BigInt, MilnorError> {
    MilnorContext::new(link, index.len())?.mu(index)
}

pub fn delta(link: &LinkData, index: &MultiIndex) -> Result<BigInt, MilnorError> {
    MilnorContext::new(link, index.len())?.delta(index)
}

pub fn mubar(link: &LinkData, index: &MultiIndex) -> Result<MilnorRecord, MilnorError> {
    MilnorContext::new(link, index.len())?.mubar(index)
}

/// Exponent sum of meridian `j` in the longitude word, i.e. a linking number.
pub fn exponent_in(w: &Word, j: usize) -> i64 {
    w.exponent_sum(Generator(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::linkio::Builtin;

    fn link(name: &str) -> LinkData {
        name.parse::<Builtin>().unwrap().link().unwrap()
    }

    fn idx(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e.to_vec(), 16).unwrap()
    }

    #[test]
    fn hopf_linking() {
        let l = link("hopf");
        assert_eq!(mu(&l, &idx(&[1, 0])).unwrap(), BigInt::from(1));
        assert_eq!(mu(&l, &idx(&[0, 1])).unwrap(), BigInt::from(1));
        let LinkData::Diagram(pd) = &l else { panic!() };
        let pres = WirtingerPresentation::from_pd(pd);
        let w = reduce_longitude(&pres, 0, 2).unwrap();
        assert_eq!(exponent_in(&w, 1), 1);
        assert_eq!(exponent_in(&w, 0), 0);
    }

    #[test]
    fn borromean_triple() {
        let l = link("borromean");
        let ctx = MilnorContext::new(&l, 3).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(ctx.mu(&idx(&[i, j])).unwrap().is_zero());
        }
        let r = ctx.mubar(&idx(&[0, 1, 2])).unwrap();
        assert_eq!(r.delta, BigInt::zero());
        assert_eq!(r.mu.abs(), BigInt::from(1));
        // the longitude of the last component is a commutator of the others modulo F_3
        let LinkData::Diagram(pd) = &l else { panic!() };
        let w = reduce_longitude(&WirtingerPresentation::from_pd(pd), 2, 3).unwrap();
        let s = expand(&w, 2).unwrap();
        assert_eq!(s.coefficient(&[0, 1]).unwrap(), r.mu);
        assert_eq!(s.coefficient(&[1, 0]).unwrap(), -r.mu.clone());
    }

    #[test]
    fn whitehead_fourfold() {
        let r = mubar(&link("whitehead"), &idx(&[0, 0, 1, 1])).unwrap();
        assert_eq!(r.signed.abs(), BigInt::from(1), "{r:?}");
    }

    #[test]
    fn unlink_is_trivial() {
        let l = link("unlink(3)");
        let ctx = MilnorContext::new(&l, 4).unwrap();
        for r in ctx.all_upto_length(4).unwrap() {
            assert!(r.mu.is_zero() && r.mubar.is_zero());
        }
    }

    #[test]
    fn word_and_series_paths_agree() {
        for name in ["hopf", "whitehead", "borromean"] {
            let LinkData::Diagram(pd) = link(name) else { panic!() };
            for q in 2..=4 {
                let p = presentation(&pd, q).unwrap();
                let a = MilnorContext::new(&LinkData::Presentation(p), q).unwrap();
                let b = MilnorContext::new(&LinkData::Diagram(pd.clone()), q).unwrap();
                for c in 0..pd.component_count() {
                    assert_eq!(a.longitude_series(c), b.longitude_series(c), "{name} q={q}");
                }
            }
        }
    }

    #[test]
    fn reductions_enumerate_deletions_and_rotations() {
        let subs = idx(&[0, 1, 2]).reductions();
        let want: BTreeSet<Vec<usize>> =
            [[0, 1], [1, 0], [0, 2], [2, 0], [1, 2], [2, 1]].iter().map(|v| v.to_vec()).collect();
        assert_eq!(subs, want);
        assert!(idx(&[0, 1]).reductions().is_empty());
    }

    #[test]
    fn residue_normalisation() {
        let r = MilnorRecord::assemble(idx(&[0, 1, 2]), BigInt::from(-3), BigInt::from(4));
        assert_eq!((r.mubar, r.signed), (BigInt::from(1), BigInt::from(1)));
        let r = MilnorRecord::assemble(idx(&[0, 1, 2]), BigInt::from(3), BigInt::from(4));
        assert_eq!((r.mubar, r.signed), (BigInt::from(3), BigInt::from(-1)));
    }

    #[test]
    fn index_guards() {
        assert!(matches!(MultiIndex::new(vec![0], 2), Err(MilnorError::IndexTooShort(1))));
        assert!(matches!(MultiIndex::new(vec![0; 9], 2), Err(MilnorError::IndexTooLong { .. })));
        assert!(matches!(MultiIndex::new(vec![0, 3], 2), Err(MilnorError::IndexOutOfRange { .. })));
        assert_eq!("0, 0,1,1".parse::<MultiIndex>().unwrap(), idx(&[0, 0, 1, 1]));
    }

    #[test]
    fn chain_models_match_classical_links() {
        let bing = "nm(2,1)".parse::<Builtin>().unwrap().link().unwrap();
        let r = mubar(&bing, &MultiIndex::new(vec![0, 1, 2], 3).unwrap()).unwrap();
        assert_eq!(r.signed.abs(), BigInt::from(1));
        let wh = "nm(1,1)".parse::<Builtin>().unwrap().link().unwrap();
        let r = mubar(&wh, &MultiIndex::new(vec![0, 0, 1, 1], 2).unwrap()).unwrap();
        assert_eq!(r.signed.abs(), BigInt::from(1));
    }
}
