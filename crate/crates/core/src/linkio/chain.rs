//! Polygonal model of the (n,m)-link: a cyclic chain of `n` clasped bands that
//! winds `m` times around a solid torus, plus a meridian circle of that torus as
//! component 0.

use std::f64::consts::{PI, TAU};

use super::pd::PdCode;
use super::polygon::{project, Point, ProjectionError};

const VIEW: Point = [0.013, 0.021, 1.0];
const SAMPLES_PER_TURN: f64 = 48.0;
const NARROW: f64 = 0.25;
const WIDE: f64 = 0.5;
const TILT: f64 = 0.6;

struct Torus {
    m: f64,
    tube: f64,
    radius: f64,
}

impl Torus {
    fn new(m: u64) -> Torus {
        let tube = if m == 1 { 2.0 } else { (1.0 / (PI / m as f64).sin()).max(2.0) };
        Torus { m: m as f64, tube, radius: 3.0 * tube + 5.0 }
    }

    fn core(&self, t: f64) -> Point {
        let r = self.radius + self.tube * (t / self.m).cos();
        [r * t.cos(), r * t.sin(), self.tube * (t / self.m).sin()]
    }

    /// Unit normal of the torus surface containing the core, and the unit vector
    /// tangent to that surface and perpendicular to the core.
    fn frame(&self, t: f64) -> (Point, Point) {
        let s = t / self.m;
        let normal = [s.cos() * t.cos(), s.cos() * t.sin(), s.sin()];
        let h = 1e-5;
        let (a, b) = (self.core(t + h), self.core(t - h));
        let tangent = unit([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
        (normal, unit(cross(tangent, normal)))
    }
}

fn unit(a: Point) -> Point {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn cross(a: Point, b: Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn band(torus: &Torus, start: f64, span: f64, tilt_sign: f64) -> Vec<Point> {
    let end = start + span * 1.25;
    let steps = ((end - start) / TAU * SAMPLES_PER_TURN).ceil().max(8.0) as usize;
    let offset = |t: f64| {
        let l = smoothstep((t - start - span / 3.0) / (span / 3.0));
        let w = NARROW + (WIDE - NARROW) * l;
        let theta = tilt_sign * TILT * (1.0 - l);
        let (normal, side) = torus.frame(t);
        let c = torus.core(t);
        let o = [
            w * (theta.cos() * side[0] + theta.sin() * normal[0]),
            w * (theta.cos() * side[1] + theta.sin() * normal[1]),
            w * (theta.cos() * side[2] + theta.sin() * normal[2]),
        ];
        (c, o)
    };
    let params: Vec<f64> =
        (0..=steps).map(|i| start + (end - start) * i as f64 / steps as f64).collect();
    let mut out = Vec::with_capacity(2 * params.len());
    for &t in &params {
        let (c, o) = offset(t);
        out.push([c[0] + o[0], c[1] + o[1], c[2] + o[2]]);
    }
    for &t in params.iter().rev() {
        let (c, o) = offset(t);
        out.push([c[0] - o[0], c[1] - o[1], c[2] - o[2]]);
    }
    out
}

fn meridian(torus: &Torus) -> Vec<Point> {
    let phi: f64 = 0.7;
    let beta: f64 = 0.5;
    let r = (torus.tube + 1.0) / beta.cos() + 1.0;
    let centre = [torus.radius * phi.cos(), torus.radius * phi.sin(), 0.0];
    let radial = [phi.cos(), phi.sin(), 0.0];
    let up = [-beta.sin() * phi.sin(), beta.sin() * phi.cos(), beta.cos()];
    (0..64)
        .map(|i| {
            let s = TAU * i as f64 / 64.0;
            [
                centre[0] + r * (s.cos() * radial[0] + s.sin() * up[0]),
                centre[1] + r * (s.cos() * radial[1] + s.sin() * up[1]),
                centre[2] + r * (s.cos() * radial[2] + s.sin() * up[2]),
            ]
        })
        .collect()
}

/// Polygonal (n,m)-link with clasp tilts `signs` (one per chain component).
pub fn chain_polygons(n: u64, m: u64, signs: &[f64]) -> Vec<Vec<Point>> {
    let torus = Torus::new(m);
    let span = TAU * m as f64 / n as f64;
    let mut comps = vec![meridian(&torus)];
    for j in 0..n as usize {
        comps.push(band(&torus, j as f64 * span, span, signs[j]));
    }
    comps
}

/// Diagram of the (n,m)-link. Consecutive chain components clasp with linking
/// number +1, except for n = 2 where the two clasps have opposite signs so the
/// result is the Bing link.
pub fn chain_diagram(n: u64, m: u64) -> Result<PdCode, ProjectionError> {
    let n_us = n as usize;
    let mut signs = vec![1.0; n_us];
    if n == 2 {
        signs[1] = -1.0;
    }
    let pd = project(&chain_polygons(n, m, &signs), VIEW)?;
    if n >= 3 && pd.linking_matrix()[1][2] < 0 {
        signs.iter_mut().for_each(|s| *s = -*s);
        return project(&chain_polygons(n, m, &signs), VIEW);
    }
    Ok(pd)
}
