//! Wirtinger presentations and longitudes read off a diagram.

use crate::freegroup::Word;

use super::pd::PdCode;

/// An under-passage met while walking a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnderPassage {
    pub crossing: usize,
    /// Arc passing over.
    pub over: usize,
    pub sign: i64,
    /// Arc entering the crossing.
    pub from: usize,
    /// Arc leaving the crossing.
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirtingerPresentation {
    /// Component of each arc generator.
    pub arc_component: Vec<usize>,
    /// First arc of each component; it serves as the meridian.
    pub meridian: Vec<usize>,
    /// Under-passages of each component in traversal order from its meridian arc.
    pub passages: Vec<Vec<UnderPassage>>,
    pub self_writhe: Vec<i64>,
    /// One relator per crossing: `c^-e a c^e b^-1`.
    pub relators: Vec<Word>,
}

impl WirtingerPresentation {
    pub fn from_pd(pd: &PdCode) -> WirtingerPresentation {
        let n = pd.component_count();
        // edge label -> arc index
        let mut arc_of = std::collections::BTreeMap::new();
        let mut arc_component = Vec::new();
        let mut meridian = Vec::new();
        let mut rotations = Vec::new();
        for c in 0..n {
            let edges = pd.component_edges(c);
            let passages = pd.passages(c);
            // rotate so that the walk starts just after an under-passage
            let start = match passages.iter().rposition(|p| p.under) {
                Some(last) => (last + 1) % edges.len(),
                None => 0,
            };
            rotations.push(start);
            let first_arc = arc_component.len();
            meridian.push(first_arc);
            arc_component.push(c);
            let len = edges.len();
            for step in 0..len {
                let t = (start + step) % len;
                arc_of.insert(edges[t], arc_component.len() - 1);
                if passages.get(t).is_some_and(|p| p.under) && step + 1 < len {
                    arc_component.push(c);
                }
            }
        }
        let rank = arc_component.len();

        let crossing_arcs = |x: usize| {
            let labels = pd.crossings()[x];
            (arc_of[&labels[0]], arc_of[&labels[2]], arc_of[&labels[1]])
        };

        let mut passages = Vec::with_capacity(n);
        for (c, &start) in rotations.iter().enumerate() {
            let edges = pd.component_edges(c);
            let raw = pd.passages(c);
            let mut list = Vec::new();
            for step in 0..edges.len() {
                let t = (start + step) % edges.len();
                if let Some(p) = raw.get(t).filter(|p| p.under) {
                    let (from, to, over) = crossing_arcs(p.crossing);
                    list.push(UnderPassage { crossing: p.crossing, over, sign: pd.sign(p.crossing), from, to });
                }
            }
            passages.push(list);
        }

        let relators = (0..pd.crossing_count())
            .map(|x| {
                let (a, b, c) = crossing_arcs(x);
                let e = pd.sign(x);
                let g = |i: usize, p: i64| Word::from_powers(rank, &[(i, p)]).expect("arc in range");
                g(c, -e).mul_same_rank(&g(a, 1)).mul_same_rank(&g(c, e)).mul_same_rank(&g(b, -1))
            })
            .collect();

        WirtingerPresentation {
            arc_component,
            meridian,
            passages,
            self_writhe: (0..n).map(|c| pd.self_writhe(c)).collect(),
            relators,
        }
    }

    pub fn rank(&self) -> usize {
        self.arc_component.len()
    }

    pub fn component_count(&self) -> usize {
        self.meridian.len()
    }

    /// Longitude of component `c` as a word in the arc generators: the product of
    /// over-arcs met at under-passages, corrected by the meridian so its total
    /// self-linking vanishes.
    pub fn longitude(&self, c: usize) -> Word {
        let rank = self.rank();
        let mut powers: Vec<(usize, i64)> =
            self.passages[c].iter().map(|p| (p.over, p.sign)).collect();
        powers.push((self.meridian[c], -self.self_writhe[c]));
        Word::from_powers(rank, &powers).expect("arc in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_presentation() {
        let pd = PdCode::parse("X[1,3,2,4] X[3,1,4,2]").unwrap();
        let w = WirtingerPresentation::from_pd(&pd);
        assert_eq!(w.rank(), 2);
        assert_eq!(w.arc_component, vec![0, 1]);
        assert_eq!(w.relators.len(), 2);
        // each longitude has total exponent on the other component equal to lk = 1
        for c in 0..2 {
            let l = w.longitude(c);
            let other: i64 = (0..2)
                .filter(|&a| w.arc_component[a] != c)
                .map(|a| l.exponent_sum(crate::freegroup::Generator(a)))
                .sum();
            assert_eq!(other, 1);
        }
    }
}
