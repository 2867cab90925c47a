//! Conversion of closed polygonal links in R^3 to PD codes by projection.

use super::pd::{PdCode, PdError};

pub type Point = [f64; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjectionError {
    #[error("component {0} has fewer than three vertices")]
    TooFewVertices(usize),
    #[error("degenerate projection near segments {a} and {b}")]
    Degenerate { a: usize, b: usize },
    #[error(transparent)]
    Pd(#[from] PdError),
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: Point, b: Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: Point) -> Point {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

struct Segment {
    component: usize,
    index: usize,
    p: [f64; 2],
    q: [f64; 2],
    hp: f64,
    hq: f64,
}

struct Event {
    param: f64,
    crossing: usize,
    over: bool,
}

/// Projects `components` along `view` (pointing toward the viewer) and returns
/// the PD code, oriented along vertex order, with component annotations in input order.
pub fn project(components: &[Vec<Point>], view: Point) -> Result<PdCode, ProjectionError> {
    let d = normalize(view);
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize(cross3(helper, d));
    let v = cross3(d, u);
    let flat = |p: Point| ([dot(p, u), dot(p, v)], dot(p, d));

    let mut segments = Vec::new();
    for (c, poly) in components.iter().enumerate() {
        if poly.len() < 3 {
            return Err(ProjectionError::TooFewVertices(c));
        }
        for i in 0..poly.len() {
            let (p, hp) = flat(poly[i]);
            let (q, hq) = flat(poly[(i + 1) % poly.len()]);
            segments.push(Segment { component: c, index: i, p, q, hp, hq });
        }
    }

    const EPS: f64 = 1e-9;
    // crossing: (under segment, under param, over segment, over param)
    let mut found: Vec<(usize, f64, usize, f64)> = Vec::new();
    for a in 0..segments.len() {
        let sa = &segments[a];
        let (minax, maxax) = (sa.p[0].min(sa.q[0]), sa.p[0].max(sa.q[0]));
        let (minay, maxay) = (sa.p[1].min(sa.q[1]), sa.p[1].max(sa.q[1]));
        for b in a + 1..segments.len() {
            let sb = &segments[b];
            if sb.p[0].max(sb.q[0]) < minax - EPS
                || sb.p[0].min(sb.q[0]) > maxax + EPS
                || sb.p[1].max(sb.q[1]) < minay - EPS
                || sb.p[1].min(sb.q[1]) > maxay + EPS
            {
                continue;
            }
            let adjacent = sa.component == sb.component && {
                let len = components[sa.component].len();
                (sa.index + 1) % len == sb.index || (sb.index + 1) % len == sa.index
            };
            let r = [sa.q[0] - sa.p[0], sa.q[1] - sa.p[1]];
            let s = [sb.q[0] - sb.p[0], sb.q[1] - sb.p[1]];
            let denom = r[0] * s[1] - r[1] * s[0];
            let w = [sb.p[0] - sa.p[0], sb.p[1] - sa.p[1]];
            let scale = (r[0].hypot(r[1]) * s[0].hypot(s[1])).max(EPS);
            if denom.abs() < EPS * scale {
                if adjacent {
                    continue;
                }
                if (w[0] * r[1] - w[1] * r[0]).abs() < 1e-7 * scale.sqrt() {
                    return Err(ProjectionError::Degenerate { a, b });
                }
                continue;
            }
            let t = (w[0] * s[1] - w[1] * s[0]) / denom;
            let tb = (w[0] * r[1] - w[1] * r[0]) / denom;
            if adjacent {
                // adjacent segments share an endpoint; only an interior hit is a problem
                if t > EPS && t < 1.0 - EPS && tb > EPS && tb < 1.0 - EPS {
                    return Err(ProjectionError::Degenerate { a, b });
                }
                continue;
            }
            let margin = 1e-7;
            if t < -margin || t > 1.0 + margin || tb < -margin || tb > 1.0 + margin {
                continue;
            }
            if t < margin || t > 1.0 - margin || tb < margin || tb > 1.0 - margin {
                return Err(ProjectionError::Degenerate { a, b });
            }
            let ha = sa.hp + t * (sa.hq - sa.hp);
            let hb = sb.hp + tb * (sb.hq - sb.hp);
            if (ha - hb).abs() < 1e-6 {
                return Err(ProjectionError::Degenerate { a, b });
            }
            if ha > hb {
                found.push((b, tb, a, t));
            } else {
                found.push((a, t, b, tb));
            }
        }
    }

    // events along each component
    let mut events: Vec<Vec<(usize, Event)>> = (0..components.len()).map(|_| Vec::new()).collect();
    for (x, &(us, ut, os, ot)) in found.iter().enumerate() {
        let su = &segments[us];
        events[su.component].push((su.index, Event { param: ut, crossing: x, over: false }));
        let so = &segments[os];
        events[so.component].push((so.index, Event { param: ot, crossing: x, over: true }));
    }
    let mut next_label = 1u32;
    // per crossing: (under in, under out, over in, over out)
    let mut labels = vec![[0u32; 4]; found.len()];
    let mut loops = Vec::new();
    let mut annotations = Vec::new();
    for (c, list) in events.iter_mut().enumerate() {
        list.sort_by(|a, b| (a.0, a.1.param).partial_cmp(&(b.0, b.1.param)).unwrap());
        if list.is_empty() {
            loops.push(next_label);
            annotations.push((c, vec![next_label]));
            next_label += 1;
            continue;
        }
        let k = list.len() as u32;
        let base = next_label;
        // edge t runs from event t to event t+1
        for (t, (_, e)) in list.iter().enumerate() {
            let t = t as u32;
            let incoming = base + (t + k - 1) % k;
            let outgoing = base + t;
            let slot = &mut labels[e.crossing];
            if e.over {
                slot[2] = incoming;
                slot[3] = outgoing;
            } else {
                slot[0] = incoming;
                slot[1] = outgoing;
            }
        }
        let mut order: Vec<u32> = (base..base + k).collect();
        if list.iter().all(|(_, e)| e.over) {
            // an over-only component starts with the edge entering the earliest crossing
            let t0 = (0..k as usize).min_by_key(|&t| list[(t + 1) % k as usize].1.crossing).unwrap();
            order.rotate_left(t0);
        }
        annotations.push((c, order));
        next_label += k;
    }

    let crossings = found
        .iter()
        .zip(&labels)
        .map(|(&(us, _, os, _), l)| {
            let du = direction(&segments[us]);
            let dov = direction(&segments[os]);
            let [ui, uo, oi, oo] = *l;
            if du[0] * dov[1] - du[1] * dov[0] > 0.0 {
                [ui, oi, uo, oo]
            } else {
                [ui, oo, uo, oi]
            }
        })
        .collect();
    Ok(PdCode::build(crossings, loops, annotations)?)
}

fn direction(s: &Segment) -> [f64; 2] {
    [s.q[0] - s.p[0], s.q[1] - s.p[1]]
}

/// Samples a closed curve at `samples` points of `[0, period)`.
pub fn sample(f: impl Fn(f64) -> Point, period: f64, samples: usize) -> Vec<Point> {
    (0..samples).map(|i| f(period * i as f64 / samples as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn hopf_from_circles() {
        let a = sample(|t| [t.cos(), t.sin(), 0.0], TAU, 40);
        let b = sample(|t| [1.0 + t.cos(), 0.0, t.sin()], TAU, 40);
        let pd = project(&[a, b], [0.013, 0.021, 1.0]).unwrap();
        assert_eq!(pd.component_count(), 2);
        assert_eq!(pd.crossing_count(), 2);
        assert_eq!(pd.linking_matrix()[0][1].abs(), 1);
    }

    #[test]
    fn split_circles_are_loops() {
        let a = sample(|t| [t.cos(), t.sin(), 0.0], TAU, 12);
        let b = sample(|t| [5.0 + t.cos(), t.sin(), 0.0], TAU, 12);
        let pd = project(&[a, b], [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(pd.crossing_count(), 0);
        assert_eq!(pd.component_count(), 2);
    }

    #[test]
    fn reversing_a_component_flips_linking() {
        let a = sample(|t| [t.cos(), t.sin(), 0.0], TAU, 40);
        let b = sample(|t| [1.0 + t.cos(), 0.0, t.sin()], TAU, 40);
        let mut rb = b.clone();
        rb.reverse();
        let view = [0.013, 0.021, 1.0];
        let lk = project(&[a.clone(), b], view).unwrap().linking_matrix()[0][1];
        let rlk = project(&[a, rb], view).unwrap().linking_matrix()[0][1];
        assert_eq!(lk, -rlk);
    }
}
