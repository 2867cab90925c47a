//! Words in a finitely generated free group.
//!
//! Words are stored freely reduced as a sequence of `(generator, ±1)` letters.
//! Every word carries the rank of its ambient free group; combining words of
//! different ranks is an error rather than a silent promotion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeGroupError {
    #[error("generator x{index} out of range for free group of rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("cannot parse word token `{token}` at byte {offset}")]
    Parse { token: String, offset: usize },
}

/// A free generator `x_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Generator(pub usize);

impl Generator {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The ambient free group, identified by its rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeGroup {
    pub rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        FreeGroup { rank }
    }

    pub fn identity(self) -> Word {
        Word::identity(self.rank)
    }

    pub fn generator(self, index: usize) -> Result<Word, FreeGroupError> {
        Word::generator(self.rank, index)
    }

    pub fn parse(self, text: &str) -> Result<Word, FreeGroupError> {
        Word::parse(self.rank, text)
    }

    fn check(self, g: Generator) -> Result<(), FreeGroupError> {
        if g.0 < self.rank {
            Ok(())
        } else {
            Err(FreeGroupError::GeneratorOutOfRange { index: g.0, rank: self.rank })
        }
    }
}

/// One letter `x_g` or `x_g^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: Generator(generator), inverse }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self, FreeGroupError> {
        Self::reduce(rank, [Letter::new(index, false)])
    }

    /// Freely reduces a raw letter sequence with a single stack pass.
    pub fn reduce(
        rank: usize,
        letters: impl IntoIterator<Item = Letter>,
    ) -> Result<Self, FreeGroupError> {
        let group = FreeGroup::new(rank);
        let mut stack: Vec<Letter> = Vec::new();
        for letter in letters {
            group.check(letter.generator)?;
            push_reduced(&mut stack, letter);
        }
        Ok(Word { rank, letters: stack })
    }

    /// Builds a word from `(generator, exponent)` pairs, e.g. `[(0, 1), (1, -2)]`.
    pub fn from_powers(rank: usize, powers: &[(usize, i64)]) -> Result<Self, FreeGroupError> {
        let mut letters = Vec::new();
        for &(g, e) in powers {
            for _ in 0..e.unsigned_abs() {
                letters.push(Letter::new(g, e < 0));
            }
        }
        Self::reduce(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group(&self) -> FreeGroup {
        FreeGroup::new(self.rank)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_rank(&self, other: &Word) -> Result<(), FreeGroupError> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(FreeGroupError::RankMismatch { left: self.rank, right: other.rank })
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, FreeGroupError> {
        self.same_rank(other)?;
        Ok(self.mul_same_rank(other))
    }

    pub(crate) fn mul_same_rank(&self, other: &Word) -> Word {
        debug_assert_eq!(self.rank, other.rank);
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        letters.extend_from_slice(&self.letters);
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Word { rank: self.rank, letters }
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul_same_rank(&base);
        }
        out
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, FreeGroupError> {
        self.same_rank(other)?;
        Ok(self
            .mul_same_rank(other)
            .mul_same_rank(&self.invert())
            .mul_same_rank(&other.invert()))
    }

    /// `c^-1 self c`.
    pub fn conjugate_by(&self, c: &Word) -> Result<Word, FreeGroupError> {
        self.same_rank(c)?;
        Ok(c.invert().mul_same_rank(self).mul_same_rank(c))
    }

    pub fn exponent_sum(&self, g: Generator) -> i64 {
        self.letters.iter().filter(|l| l.generator == g).map(|l| l.sign()).sum()
    }

    /// Re-embeds the word in a free group of larger (or equal) rank.
    pub fn with_rank(&self, rank: usize) -> Result<Word, FreeGroupError> {
        Word::reduce(rank, self.letters.iter().copied())
    }

    /// Substitutes a word for each generator (a homomorphism of free groups).
    pub fn substitute(&self, images: &[Word]) -> Result<Word, FreeGroupError> {
        let target = images.first().map(|w| w.rank).unwrap_or(0);
        if images.len() != self.rank {
            return Err(FreeGroupError::RankMismatch { left: self.rank, right: images.len() });
        }
        let mut out = Word::identity(target);
        for l in &self.letters {
            let img = &images[l.generator.0];
            img.same_rank(&out)?;
            out = if l.inverse {
                out.mul_same_rank(&img.invert())
            } else {
                out.mul_same_rank(img)
            };
        }
        Ok(out)
    }

    pub fn parse(rank: usize, text: &str) -> Result<Word, FreeGroupError> {
        let mut letters = Vec::new();
        let bytes = text.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let c = bytes[pos];
            if c.is_ascii_whitespace() || c == b'*' {
                pos += 1;
                continue;
            }
            let start = pos;
            let err = |end: usize| FreeGroupError::Parse {
                token: text[start..end.min(text.len())].to_string(),
                offset: start,
            };
            if c == b'1' && bytes.get(pos + 1).is_none_or(|b| b.is_ascii_whitespace() || *b == b'*')
            {
                pos += 1;
                continue;
            }
            if c != b'x' {
                return Err(err(pos + 1));
            }
            pos += 1;
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if digits_start == pos {
                return Err(err(pos));
            }
            let index: usize = text[digits_start..pos].parse().map_err(|_| err(pos))?;
            let mut exponent: i64 = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let exp_start = pos;
                if pos < bytes.len() && bytes[pos] == b'-' {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exponent = text[exp_start..pos].parse().map_err(|_| err(pos))?;
            }
            for _ in 0..exponent.unsigned_abs() {
                letters.push(Letter::new(index, exponent < 0));
            }
        }
        Word::reduce(rank, letters)
    }
}

fn push_reduced(stack: &mut Vec<Letter>, letter: Letter) {
    match stack.last() {
        Some(&top) if top.cancels(letter) => {
            stack.pop();
        }
        _ => stack.push(letter),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{}", l.generator.0)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// Parses with the smallest rank that contains every generator mentioned.
impl FromStr for Word {
    type Err = FreeGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let probe = Word::parse(usize::MAX, s)?;
        let rank = probe.letters.iter().map(|l| l.generator.0 + 1).max().unwrap_or(0);
        Ok(Word { rank, letters: probe.letters })
    }
}

/// A finite integer combination of group elements, i.e. an element of `Z[F]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    rank: usize,
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero(rank: usize) -> Self {
        GroupRingElement { rank, terms: BTreeMap::new() }
    }

    pub fn from_word(word: Word) -> Self {
        let mut out = Self::zero(word.rank);
        out.add_term(word, BigInt::one());
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &GroupRingElement) -> Result<GroupRingElement, FreeGroupError> {
        if self.rank != other.rank {
            return Err(FreeGroupError::RankMismatch { left: self.rank, right: other.rank });
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> GroupRingElement {
        GroupRingElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    /// Left multiplication by a group element.
    pub fn left_mul(&self, u: &Word) -> Result<GroupRingElement, FreeGroupError> {
        if self.rank != u.rank {
            return Err(FreeGroupError::RankMismatch { left: u.rank, right: self.rank });
        }
        let mut out = Self::zero(self.rank);
        for (w, c) in &self.terms {
            out.add_term(u.mul_same_rank(w), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &GroupRingElement) -> Result<GroupRingElement, FreeGroupError> {
        if self.rank != other.rank {
            return Err(FreeGroupError::RankMismatch { left: self.rank, right: other.rank });
        }
        let mut out = Self::zero(self.rank);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.mul_same_rank(v), a * b);
            }
        }
        Ok(out)
    }

    /// The augmentation `Z[F] -> Z`, sending every group element to 1.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Fox derivative extended linearly.
    pub fn fox_derivative(&self, g: Generator) -> Result<GroupRingElement, FreeGroupError> {
        FreeGroup::new(self.rank).check(g)?;
        let mut out = Self::zero(self.rank);
        for (w, c) in &self.terms {
            for (u, d) in fox_derivative(w, g)?.terms {
                out.add_term(u, d * c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let abs = c.abs();
            if abs.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{abs}*({w})")?;
            }
        }
        Ok(())
    }
}

/// Fox free derivative `∂w/∂g`.
///
/// Each occurrence of `g` contributes the prefix before it; each occurrence of
/// `g^-1` contributes minus the prefix including it.
pub fn fox_derivative(w: &Word, g: Generator) -> Result<GroupRingElement, FreeGroupError> {
    w.group().check(g)?;
    let mut out = GroupRingElement::zero(w.rank);
    for (pos, l) in w.letters.iter().enumerate() {
        if l.generator != g {
            continue;
        }
        if l.inverse {
            let prefix = Word { rank: w.rank, letters: w.letters[..=pos].to_vec() };
            out.add_term(prefix, -BigInt::one());
        } else {
            let prefix = Word { rank: w.rank, letters: w.letters[..pos].to_vec() };
            out.add_term(prefix, BigInt::one());
        }
    }
    Ok(out)
}

/// Iterated derivative `∂^s w / ∂x_{j_1} ... ∂x_{j_s}`; the last index is applied first.
pub fn iterated_fox_derivative(
    w: &Word,
    indices: &[usize],
) -> Result<GroupRingElement, FreeGroupError> {
    let mut current = GroupRingElement::from_word(w.clone());
    for &j in indices.iter().rev() {
        current = current.fox_derivative(Generator(j))?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let l = |g, inv| Letter::new(g, inv);
        assert!(Word::reduce(3, [l(1, false), l(1, true)]).unwrap().is_identity());
        assert_eq!(
            Word::reduce(3, [l(1, false), l(2, false), l(2, true), l(1, false)]).unwrap(),
            w(3, "x1 x1")
        );
        let r = Word::reduce(3, [l(1, false), l(2, false), l(1, true)]).unwrap();
        assert_eq!(r.to_string(), "x1 x2 x1^-1");
        assert_eq!(
            Word::reduce(2, [l(2, false)]),
            Err(FreeGroupError::GeneratorOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn multiply_invert_commutator() {
        assert!(w(4, "x1").multiply(&w(4, "x1^-1")).unwrap().is_identity());
        assert_eq!(w(4, "x1 x2").multiply(&w(4, "x2^-1 x3")).unwrap(), w(4, "x1 x3"));
        assert_eq!(Word::identity(4).multiply(&w(4, "x2 x3")).unwrap(), w(4, "x2 x3"));
        assert!(matches!(
            w(3, "x1").multiply(&w(4, "x1")),
            Err(FreeGroupError::RankMismatch { .. })
        ));

        assert_eq!(w(3, "x1 x2").invert(), w(3, "x2^-1 x1^-1"));
        assert!(Word::identity(3).invert().is_identity());
        assert_eq!(w(3, "x1^-1").invert(), w(3, "x1"));

        assert_eq!(w(3, "x1").commutator(&w(3, "x2")).unwrap().to_string(), "x1 x2 x1^-1 x2^-1");
        assert!(w(3, "x1").commutator(&w(3, "x1")).unwrap().is_identity());
        assert!(w(3, "x1").commutator(&Word::identity(3)).unwrap().is_identity());
    }

    #[test]
    fn parse_print() {
        let word = w(5, "x1*x2  x1^-1 x4^2 1");
        assert_eq!(word.to_string(), "x1 x2 x1^-1 x4 x4");
        assert_eq!(w(5, &word.to_string()), word);
        assert_eq!(w(2, "1"), Word::identity(2));
        assert_eq!(w(2, ""), Word::identity(2));
        assert!(Word::parse(2, "y1").is_err());
        assert!(Word::parse(2, "x").is_err());
        assert!(Word::parse(2, "x5").is_err());
        let parsed: Word = "x0 x3^-1".parse().unwrap();
        assert_eq!(parsed.rank(), 4);
    }

    #[test]
    fn fox_examples() {
        let d = fox_derivative(&w(3, "x1"), Generator(1)).unwrap();
        assert_eq!(d, GroupRingElement::from_word(Word::identity(3)));

        let d = fox_derivative(&w(3, "x1^-1"), Generator(1)).unwrap();
        assert_eq!(d.coefficient(&w(3, "x1^-1")), BigInt::from(-1));
        assert_eq!(d.terms().count(), 1);

        // [x1,x2] = x1 x2 x1^-1 x2^-1: 1 - x1 x2 x1^-1
        let c = w(3, "x1").commutator(&w(3, "x2")).unwrap();
        let d = fox_derivative(&c, Generator(1)).unwrap();
        let mut expected = GroupRingElement::from_word(Word::identity(3));
        expected.add_term(w(3, "x1 x2 x1^-1"), BigInt::from(-1));
        assert_eq!(d, expected);
        assert_eq!(d.augmentation(), BigInt::zero());
        assert!(fox_derivative(&c, Generator(3)).is_err());
    }
}
