//! Planar-diagram codes.
//!
//! A crossing `X[i,j,k,l]` lists its four edge labels counterclockwise starting
//! from the incoming under-strand, so the under-strand runs from slot 0 to slot 2.
//! The over-strand direction is recovered by walking each component; a crossing
//! is positive when the over-strand enters at slot 3 and leaves at slot 1.
//!
//! Text grammar (whitespace or commas separate items):
//!
//! ```text
//! X[a,b,c,d]          crossing
//! Loop[a]             crossing-free unknotted component
//! % 0: a, b, c        component 0 traverses edges a, b, c in this order
//! % anything else     comment
//! ```
//!
//! An optional `PD[ ... ]` wrapper is accepted.
//!
//! A component that never passes under is oriented by its annotation. When that
//! leaves the direction open (two edges between the same two crossings), the first
//! listed edge enters the crossing listed earlier. Unannotated, such components
//! follow increasing labels, with the same tie-break.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdError {
    #[error("empty diagram")]
    Empty,
    #[error("malformed input near `{token}` at byte {offset}")]
    Malformed { token: String, offset: usize },
    #[error("edge label {label} appears {count} time(s); every label must appear exactly twice")]
    LabelCount { label: u32, count: usize },
    #[error("component annotation: {0}")]
    Annotation(String),
    #[error("component indices are not contiguous: {0}")]
    NonContiguousComponents(String),
    #[error("inconsistent orientation at crossing {crossing}: {reason}")]
    InconsistentOrientation { crossing: usize, reason: String },
}

/// One endpoint of an edge: crossing index and slot 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Slot {
    crossing: usize,
    pos: usize,
}

/// A passage of a component through a crossing, met at the head of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Passage {
    pub crossing: usize,
    pub under: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdCode {
    crossings: Vec<[u32; 4]>,
    loops: Vec<u32>,
    /// Edge labels of each component in traversal order.
    components: Vec<Vec<u32>>,
    component_of: BTreeMap<u32, usize>,
    /// Slot (1 or 3) at which the over-strand enters each crossing.
    over_entry: Vec<u8>,
}

impl PdCode {
    pub fn parse(text: &str) -> Result<PdCode, PdError> {
        let (crossings, loops, annotations) = tokenize(text)?;
        PdCode::build(crossings, loops, annotations)
    }

    /// Builds a diagram from crossings, crossing-free loops and optional
    /// component annotations (component index, edge labels in order).
    pub fn build(
        crossings: Vec<[u32; 4]>,
        loops: Vec<u32>,
        annotations: Vec<(usize, Vec<u32>)>,
    ) -> Result<PdCode, PdError> {
        if crossings.is_empty() && loops.is_empty() {
            return Err(PdError::Empty);
        }
        let mut occurrences: BTreeMap<u32, Vec<Slot>> = BTreeMap::new();
        for (c, x) in crossings.iter().enumerate() {
            for (pos, &label) in x.iter().enumerate() {
                occurrences.entry(label).or_default().push(Slot { crossing: c, pos });
            }
        }
        for &label in &loops {
            if occurrences.contains_key(&label) || loops.iter().filter(|&&l| l == label).count() > 1
            {
                return Err(PdError::LabelCount { label, count: 3 });
            }
        }
        for (&label, occ) in &occurrences {
            if occ.len() != 2 {
                return Err(PdError::LabelCount { label, count: occ.len() });
            }
        }

        let slot_label = |s: Slot| crossings[s.crossing][s.pos];
        let other_end = |label: u32, s: Slot| -> Slot {
            let occ = &occurrences[&label];
            if occ[0] == s {
                occ[1]
            } else {
                occ[0]
            }
        };

        // Walk a component from a known head slot of `first`; returns the edges
        // in order together with the head slot of each.
        let walk = |first: u32, head: Slot| -> Vec<(u32, Slot)> {
            let mut out = Vec::new();
            let mut label = first;
            let mut head = head;
            loop {
                out.push((label, head));
                let tail = Slot { crossing: head.crossing, pos: (head.pos + 2) % 4 };
                label = slot_label(tail);
                head = other_end(label, tail);
                if label == first {
                    break;
                }
            }
            out
        };

        let mut annotated: BTreeMap<u32, usize> = BTreeMap::new();
        for (comp, labels) in &annotations {
            for &l in labels {
                if annotated.insert(l, *comp).is_some() {
                    return Err(PdError::Annotation(format!("label {l} listed twice")));
                }
            }
        }

        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut walks: Vec<Vec<(u32, Slot)>> = Vec::new();
        // Components that pass under somewhere: orientation is forced.
        for (c, x) in crossings.iter().enumerate() {
            let label = x[0];
            if seen.contains(&label) {
                continue;
            }
            let w = walk(label, Slot { crossing: c, pos: 0 });
            seen.extend(w.iter().map(|(l, _)| *l));
            walks.push(w);
        }
        // Components that only pass over: the annotation (or increasing labels)
        // picks the direction; ties go to the earlier crossing.
        for &label in occurrences.keys() {
            if seen.contains(&label) {
                continue;
            }
            let (first, next) = match annotated.get(&label) {
                Some(&comp) => {
                    let list = &annotations.iter().find(|(c, _)| *c == comp).unwrap().1;
                    (list[0], list[1 % list.len()])
                }
                None => (label, label + 1),
            };
            let occ = occurrences
                .get(&first)
                .ok_or_else(|| PdError::Annotation(format!("unknown label {first}")))?;
            let through = |s: Slot| slot_label(Slot { crossing: s.crossing, pos: (s.pos + 2) % 4 });
            let matching: Vec<Slot> = occ.iter().copied().filter(|&s| through(s) == next).collect();
            let head = if matching.len() == 1 { matching[0] } else { occ[0].min(occ[1]) };
            let w = walk(first, head);
            seen.extend(w.iter().map(|(l, _)| *l));
            walks.push(w);
        }

        // Over-strand direction and consistency of under-strands.
        let mut over_entry: Vec<Option<u8>> = vec![None; crossings.len()];
        for w in &walks {
            for &(_, head) in w {
                match head.pos {
                    0 => {}
                    2 => {
                        return Err(PdError::InconsistentOrientation {
                            crossing: head.crossing,
                            reason: "under-strand enters through its outgoing slot".into(),
                        })
                    }
                    p => {
                        let p = p as u8;
                        match over_entry[head.crossing] {
                            None => over_entry[head.crossing] = Some(p),
                            Some(q) if q == p => {}
                            Some(_) => {
                                return Err(PdError::InconsistentOrientation {
                                    crossing: head.crossing,
                                    reason: "over-strand traversed in both directions".into(),
                                })
                            }
                        }
                    }
                }
            }
        }
        let over_entry: Vec<u8> = over_entry
            .into_iter()
            .enumerate()
            .map(|(c, e)| {
                e.ok_or_else(|| PdError::InconsistentOrientation {
                    crossing: c,
                    reason: "over-strand never traversed".into(),
                })
            })
            .collect::<Result<_, _>>()?;

        let mut comps: Vec<Vec<u32>> = walks
            .into_iter()
            .map(|w| w.into_iter().map(|(l, _)| l).collect())
            .collect();
        comps.extend(loops.iter().map(|&l| vec![l]));

        let components = if annotations.is_empty() {
            // canonical start: smallest label, components ordered by it
            let mut comps: Vec<Vec<u32>> = comps
                .into_iter()
                .map(|c| {
                    let start = c.iter().enumerate().min_by_key(|(_, l)| **l).unwrap().0;
                    let mut r = c[start..].to_vec();
                    r.extend_from_slice(&c[..start]);
                    r
                })
                .collect();
            comps.sort_by_key(|c| c[0]);
            comps
        } else {
            let n = comps.len();
            let mut indices: Vec<usize> = annotations.iter().map(|(c, _)| *c).collect();
            indices.sort_unstable();
            if indices != (0..n).collect::<Vec<_>>() {
                return Err(PdError::NonContiguousComponents(format!(
                    "annotated indices {indices:?} for {n} components"
                )));
            }
            let mut ordered = vec![Vec::new(); n];
            for (comp, labels) in &annotations {
                let found = comps
                    .iter()
                    .find(|c| c.contains(&labels[0]))
                    .ok_or_else(|| PdError::Annotation(format!("unknown label {}", labels[0])))?;
                let start = found.iter().position(|&l| l == labels[0]).unwrap();
                let mut rotated = found[start..].to_vec();
                rotated.extend_from_slice(&found[..start]);
                if &rotated != labels {
                    return Err(PdError::InconsistentOrientation {
                        crossing: 0,
                        reason: format!(
                            "component {comp} annotation {labels:?} disagrees with traversal {rotated:?}"
                        ),
                    });
                }
                ordered[*comp] = rotated;
            }
            ordered
        };

        let mut component_of = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            for &l in c {
                component_of.insert(l, i);
            }
        }
        Ok(PdCode { crossings, loops, components, component_of, over_entry })
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_edges(&self, c: usize) -> &[u32] {
        &self.components[c]
    }

    pub fn component_of(&self, label: u32) -> usize {
        self.component_of[&label]
    }

    /// +1 or -1.
    pub fn sign(&self, crossing: usize) -> i64 {
        if self.over_entry[crossing] == 3 {
            1
        } else {
            -1
        }
    }

    /// Component of the under-strand and of the over-strand.
    pub fn strands(&self, crossing: usize) -> (usize, usize) {
        let x = self.crossings[crossing];
        (self.component_of[&x[0]], self.component_of[&x[1]])
    }

    /// Passages met at the head of each edge of component `c`, in traversal order.
    pub fn passages(&self, c: usize) -> Vec<Passage> {
        let edges = &self.components[c];
        if edges.len() == 1 && self.loops.contains(&edges[0]) {
            return Vec::new();
        }
        edges
            .iter()
            .enumerate()
            .map(|(t, &label)| {
                let next = edges[(t + 1) % edges.len()];
                // the head of `label` is the crossing where `label` and `next` meet as a strand
                let (crossing, pos) = self.head_slot(label, next);
                Passage { crossing, under: pos == 0 }
            })
            .collect()
    }

    fn head_slot(&self, label: u32, next: u32) -> (usize, usize) {
        for (c, x) in self.crossings.iter().enumerate() {
            for pos in 0..4 {
                if x[pos] != label || x[(pos + 2) % 4] != next {
                    continue;
                }
                let is_head = match pos {
                    0 => true,
                    2 => false,
                    p => self.over_entry[c] as usize == p,
                };
                if is_head {
                    return (c, pos);
                }
            }
        }
        unreachable!("validated diagram has a head for every edge")
    }

    /// Sum of signs of crossings of component `c` with itself.
    pub fn self_writhe(&self, c: usize) -> i64 {
        (0..self.crossings.len())
            .filter(|&x| self.strands(x) == (c, c))
            .map(|x| self.sign(x))
            .sum()
    }

    /// Linking numbers by signed crossing count: half the sum of signs of the
    /// crossings between two distinct components.
    pub fn linking_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.components.len();
        let mut twice = vec![vec![0i64; n]; n];
        for x in 0..self.crossings.len() {
            let (a, b) = self.strands(x);
            if a != b {
                twice[a][b] += self.sign(x);
                twice[b][a] += self.sign(x);
            }
        }
        twice.into_iter().map(|row| row.into_iter().map(|v| v / 2).collect()).collect()
    }
}

impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        items.extend(self.loops.iter().map(|l| format!("Loop[{l}]")));
        writeln!(f, "{}", items.join(" "))?;
        for (i, c) in self.components.iter().enumerate() {
            let labels: Vec<String> = c.iter().map(|l| l.to_string()).collect();
            writeln!(f, "% {i}: {}", labels.join(", "))?;
        }
        Ok(())
    }
}

type Tokens = (Vec<[u32; 4]>, Vec<u32>, Vec<(usize, Vec<u32>)>);

fn tokenize(text: &str) -> Result<Tokens, PdError> {
    let mut crossings = Vec::new();
    let mut loops = Vec::new();
    let mut annotations = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_offset = offset;
        offset += line.len();
        let (body, comment) = match line.find('%') {
            Some(p) => (&line[..p], Some((&line[p + 1..], line_offset + p))),
            None => (line, None),
        };
        if let Some((comment, at)) = comment {
            if let Some(a) = parse_annotation(comment, at)? {
                annotations.push(a);
            }
        }
        parse_items(body, line_offset, &mut crossings, &mut loops)?;
    }
    Ok((crossings, loops, annotations))
}

fn parse_annotation(comment: &str, at: usize) -> Result<Option<(usize, Vec<u32>)>, PdError> {
    let Some((head, rest)) = comment.split_once(':') else {
        return Ok(None);
    };
    let Ok(comp) = head.trim().parse::<usize>() else {
        return Ok(None);
    };
    let labels = rest
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| PdError::Malformed { token: s.to_string(), offset: at })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if labels.is_empty() {
        return Err(PdError::Annotation(format!("component {comp} lists no edges")));
    }
    Ok(Some((comp, labels)))
}

fn parse_items(
    body: &str,
    base: usize,
    crossings: &mut Vec<[u32; 4]>,
    loops: &mut Vec<u32>,
) -> Result<(), PdError> {
    let bytes = body.as_bytes();
    let mut pos = 0;
    let malformed = |from: usize, to: usize| PdError::Malformed {
        token: body[from..to.min(body.len())].trim().to_string(),
        offset: base + from,
    };
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() || c == b',' || c == b']' {
            pos += 1;
            continue;
        }
        let rest = &body[pos..];
        let (head_len, arity) = if rest.starts_with("PD[") {
            pos += 3;
            continue;
        } else if rest.starts_with("X[") {
            (2, 4)
        } else if rest.starts_with("Loop[") {
            (5, 1)
        } else {
            let end = rest.find(|c: char| c.is_whitespace()).map_or(body.len(), |e| pos + e);
            return Err(malformed(pos, end));
        };
        let start = pos;
        let close = rest.find(']').ok_or_else(|| malformed(start, body.len()))?;
        let inner = &rest[head_len..close];
        let values = inner
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| malformed(start, start + close + 1))?;
        if values.len() != arity {
            return Err(malformed(start, start + close + 1));
        }
        if arity == 4 {
            crossings.push([values[0], values[1], values[2], values[3]]);
        } else {
            loops.push(values[0]);
        }
        pos = start + close + 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";

    #[test]
    fn parse_hopf() {
        let pd = PdCode::parse(HOPF).unwrap();
        assert_eq!(pd.crossing_count(), 2);
        assert_eq!(pd.component_count(), 2);
        assert_eq!(pd.component_edges(0), &[1, 2]);
        assert_eq!(pd.component_edges(1), &[3, 4]);
        assert_eq!(pd.sign(0), 1);
        assert_eq!(pd.sign(1), 1);
        assert_eq!(pd.linking_matrix(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn every_label_twice() {
        let pd = PdCode::parse(HOPF).unwrap();
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for x in pd.crossings() {
            for l in x {
                *counts.entry(*l).or_default() += 1;
            }
        }
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(PdCode::parse(""), Err(PdError::Empty));
        assert_eq!(PdCode::parse("  % just a comment\n"), Err(PdError::Empty));
        assert_eq!(
            PdCode::parse("X[1,3,2,4]"),
            Err(PdError::LabelCount { label: 1, count: 1 })
        );
        assert!(matches!(PdCode::parse("X[1,3,2]"), Err(PdError::Malformed { .. })));
        assert!(matches!(PdCode::parse("Y[1,2,3,4]"), Err(PdError::Malformed { .. })));
        assert!(matches!(
            PdCode::parse("X[1,3,2,4] X[3,1,4,2]\n% 0: 1, 2\n% 2: 3, 4"),
            Err(PdError::NonContiguousComponents(_))
        ));
        // the second crossing lists the under-strand backwards
        assert!(matches!(
            PdCode::parse("X[1,3,2,4] X[1,4,2,3]"),
            Err(PdError::InconsistentOrientation { .. })
        ));
    }

    #[test]
    fn annotations_reorder_components() {
        let pd = PdCode::parse("PD[X[1,3,2,4], X[3,1,4,2]]\n% 1: 1, 2\n% 0: 4, 3").unwrap();
        assert_eq!(pd.component_edges(0), &[4, 3]);
        assert_eq!(pd.component_edges(1), &[1, 2]);
        let bad = PdCode::parse("X[1,3,2,4] X[3,1,4,2]\n% 0: 1, 3\n% 1: 2, 4");
        assert!(matches!(bad, Err(PdError::InconsistentOrientation { .. })));
    }

    #[test]
    fn loops_and_round_trip() {
        let pd = PdCode::parse("X[1,3,2,4] X[3,1,4,2] Loop[9]").unwrap();
        assert_eq!(pd.component_count(), 3);
        assert!(pd.passages(2).is_empty());
        let again = PdCode::parse(&pd.to_string()).unwrap();
        assert_eq!(again, pd);
        assert!(PdCode::parse("Loop[5]").is_ok());
        assert!(matches!(PdCode::parse("Loop[1] X[1,3,2,4] X[3,1,4,2]"), Err(PdError::LabelCount { .. })));
    }

    #[test]
    fn passages_of_hopf() {
        let pd = PdCode::parse(HOPF).unwrap();
        let p = pd.passages(0);
        assert_eq!(p, vec![Passage { crossing: 0, under: true }, Passage { crossing: 1, under: false }]);
    }
}
