//! Truncated power series in non-commuting variables and the Magnus expansion.
//!
//! `x_j` maps to `1 + k_j` and `x_j^-1` to `1 - k_j + k_j^2 - ...`. Series are
//! sparse maps from monomials to arbitrary-precision integers and never carry a
//! monomial above their truncation degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::freegroup::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnusError {
    #[error("truncation degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("index of length {len} exceeds truncation degree {degree}")]
    TruncationTooShallow { len: usize, degree: usize },
    #[error("truncation degree must be at least 1")]
    ZeroDegree,
}

/// A word in the variables `k_j`, ordered degree-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|v| format!("k{v}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    degree: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MagnusSeries {
    pub fn one(degree: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::one(), BigInt::one());
        MagnusSeries { degree, terms }
    }

    pub fn zero(degree: usize) -> Self {
        MagnusSeries { degree, terms: BTreeMap::new() }
    }

    /// Builds a series from explicit terms, dropping zeros and anything above `degree`.
    pub fn from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, BigInt)>,
    ) -> Self {
        let mut s = Self::zero(degree);
        for (m, c) in terms {
            if m.len() <= degree {
                s.add_term(Monomial(m), c);
            }
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn multiply(&self, other: &MagnusSeries) -> Result<MagnusSeries, MagnusError> {
        if self.degree != other.degree {
            return Err(MagnusError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let mut out = Self::zero(self.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.degree() + b.degree() > self.degree {
                    // terms are degree-ordered, so later b only get longer
                    break;
                }
                let mut m = a.0.clone();
                m.extend_from_slice(&b.0);
                out.add_term(Monomial(m), ca * cb);
            }
        }
        Ok(out)
    }

    /// Right multiplication by the expansion of a single letter.
    fn mul_letter(&mut self, letter: Letter) {
        let j = letter.generator.index();
        let mut extra: Vec<(Monomial, BigInt)> = Vec::new();
        for (m, c) in &self.terms {
            let room = self.degree - m.degree();
            let mut mono = m.0.clone();
            let mut coeff = c.clone();
            for _ in 0..room {
                mono.push(j);
                if letter.inverse {
                    coeff = -coeff;
                }
                extra.push((Monomial(mono.clone()), coeff.clone()));
                if !letter.inverse {
                    break;
                }
            }
        }
        for (m, c) in extra {
            self.add_term(m, c);
        }
    }

    /// Coefficient of `k_{i_1} ... k_{i_s}`.
    pub fn coefficient(&self, index: &[usize]) -> Result<BigInt, MagnusError> {
        if index.len() > self.degree {
            return Err(MagnusError::TruncationTooShallow {
                len: index.len(),
                degree: self.degree,
            });
        }
        Ok(self.terms.get(&Monomial(index.to_vec())).cloned().unwrap_or_default())
    }

    /// Smallest degree `d >= 1` carrying a nonzero coefficient, if any.
    pub fn lowest_nonconstant_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).find(|&d| d >= 1)
    }
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let abs = c.abs();
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Magnus expansion of `w` truncated at degree `q`.
pub fn expand(w: &Word, q: usize) -> Result<MagnusSeries, MagnusError> {
    if q == 0 {
        return Err(MagnusError::ZeroDegree);
    }
    let mut s = MagnusSeries::one(q);
    for &l in w.letters() {
        s.mul_letter(l);
    }
    Ok(s)
}

/// Largest `k <= q` such that the expansion is `1` modulo monomials of degree `>= k`.
pub fn lcs_depth(w: &Word, q: usize) -> Result<usize, MagnusError> {
    let s = expand(w, q)?;
    Ok(s.lowest_nonconstant_degree().map_or(q, |d| d.min(q)))
}

/// Coefficient of `k_{i_1}...k_{i_s}` in the expansion of `w`, computed without
/// building the full series.
///
/// Multiplying on the right only appends variables, so the only monomials that
/// can grow into the target are its prefixes; the state is one coefficient per
/// prefix length.
pub fn word_coefficient(w: &Word, index: &[usize]) -> BigInt {
    match word_coefficient_i128(w, index) {
        Some(v) => BigInt::from(v),
        None => word_coefficient_big(w, index),
    }
}

fn word_coefficient_i128(w: &Word, index: &[usize]) -> Option<i128> {
    let r = index.len();
    let mut state = vec![0i128; r + 1];
    state[0] = 1;
    for &l in w.letters() {
        let j = l.generator.index();
        // process longer prefixes first so each update reads old values
        for t in (1..=r).rev() {
            if index[t - 1] != j {
                continue;
            }
            let mut acc = state[t];
            if l.inverse {
                let mut sign = -1i128;
                let mut u = t;
                while u >= 1 && index[u - 1] == j {
                    acc = acc.checked_add(sign.checked_mul(state[u - 1])?)?;
                    sign = -sign;
                    u -= 1;
                }
            } else {
                acc = acc.checked_add(state[t - 1])?;
            }
            state[t] = acc;
        }
    }
    Some(state[r])
}

fn word_coefficient_big(w: &Word, index: &[usize]) -> BigInt {
    let r = index.len();
    let mut state = vec![BigInt::zero(); r + 1];
    state[0] = BigInt::one();
    for &l in w.letters() {
        let j = l.generator.index();
        for t in (1..=r).rev() {
            if index[t - 1] != j {
                continue;
            }
            let mut acc = state[t].clone();
            if l.inverse {
                let mut negative = true;
                let mut u = t;
                while u >= 1 && index[u - 1] == j {
                    if negative {
                        acc -= &state[u - 1];
                    } else {
                        acc += &state[u - 1];
                    }
                    negative = !negative;
                    u -= 1;
                }
            } else {
                acc += &state[t - 1];
            }
            state[t] = acc;
        }
    }
    state.swap_remove(r)
}
