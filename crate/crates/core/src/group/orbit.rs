//! Orbit balls by breadth-first word enumeration and the exponential
//! growth rate fitted from their counting function.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupActionModel, MobiusIsometry};

/// Matrix dedup quantum for word enumeration. Integer matrix groups hash
/// exactly; float presets stay well clear of this granularity for the word
/// lengths reachable at desk scale.
const MATRIX_QUANTUM: f64 = 1e-6;

/// Point dedup quantum (orbit points, in model coordinates).
const POINT_QUANTUM: f64 = 1e-9;

/// Deduplicated orbit points within distance R of the base point.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitBall {
    pub radius: f64,
    pub margin: f64,
    pub word_cap: u32,
    /// Sorted displacement of every distinct orbit point with d <= R
    /// (the base point contributes 0).
    pub dists: Vec<f64>,
    /// N(r) on a uniform grid of step `grid_step`.
    pub grid: Vec<(f64, usize)>,
    pub grid_step: f64,
    /// Set when the word cap was reached with expandable words left:
    /// counts are then lower bounds.
    pub truncated: bool,
    pub words_expanded: usize,
}

impl OrbitBall {
    /// N(r): orbit points within distance r.
    pub fn count_at(&self, r: f64) -> usize {
        self.dists.partition_point(|&d| d <= r)
    }
}

/// Enumerate the orbit ball of radius `r` by breadth-first word expansion,
/// pruning words whose matrix was already seen or whose point lies beyond
/// `r + margin`.
pub fn orbit_ball(model: &GroupActionModel, r: f64, word_cap: u32) -> Result<OrbitBall> {
    orbit_ball_with_margin(model, r, word_cap, 2.0)
}

pub fn orbit_ball_with_margin(
    model: &GroupActionModel,
    r: f64,
    word_cap: u32,
    margin: f64,
) -> Result<OrbitBall> {
    if !(r > 0.0) {
        return Err(Error::parameter(format!("radius must be > 0, got {r}")));
    }
    let base = model.base();
    let mut seen: HashSet<[i64; 8]> = HashSet::new();
    let mut points: HashSet<[i64; 3]> = HashSet::new();
    let mut dists: Vec<f64> = Vec::new();

    let ident = MobiusIsometry::identity();
    seen.insert(ident.key(MATRIX_QUANTUM));
    record_point(model, &ident, &base, r, &mut points, &mut dists);

    let mut frontier: Vec<MobiusIsometry> = vec![ident];
    let mut truncated = false;
    let mut expanded = 0usize;
    let mut depth = 0u32;
    while !frontier.is_empty() {
        if depth >= word_cap {
            truncated = true;
            break;
        }
        depth += 1;
        let mut next: Vec<MobiusIsometry> = Vec::new();
        for w in &frontier {
            expanded += 1;
            for g in model.generators() {
                let wg = w.compose(g);
                if !seen.insert(wg.key(MATRIX_QUANTUM)) {
                    continue;
                }
                let d = model.dist(&base, &model.apply(&wg, &base));
                if d > r + margin {
                    continue;
                }
                record_point(model, &wg, &base, r, &mut points, &mut dists);
                next.push(wg);
            }
        }
        frontier = next;
    }

    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let grid_step = 0.25;
    let mut grid = Vec::new();
    let mut x = 0.0;
    while x <= r + 1e-12 {
        grid.push((x, dists.partition_point(|&d| d <= x)));
        x += grid_step;
    }
    Ok(OrbitBall {
        radius: r,
        margin,
        word_cap,
        dists,
        grid,
        grid_step,
        truncated,
        words_expanded: expanded,
    })
}

fn record_point(
    model: &GroupActionModel,
    w: &MobiusIsometry,
    base: &crate::group::Point,
    r: f64,
    points: &mut HashSet<[i64; 3]>,
    dists: &mut Vec<f64>,
) {
    let p = model.apply(w, base);
    let d = model.dist(base, &p);
    if d > r {
        return;
    }
    let key = match p {
        crate::group::Point::H2(z) => [
            (z.re / POINT_QUANTUM).round() as i64,
            (z.im / POINT_QUANTUM).round() as i64,
            0,
        ],
        crate::group::Point::H3(z, t) => [
            (z.re / POINT_QUANTUM).round() as i64,
            (z.im / POINT_QUANTUM).round() as i64,
            (t / POINT_QUANTUM).round() as i64,
        ],
    };
    if points.insert(key) {
        dists.push(d);
    }
}

/// Orbit-ray sample: the base point followed by `w^k(p)`, `k = 1..=len`,
/// for each listed word, with the exact model metric. Returns the space
/// and one index sequence per ray (each starting at the shared base).
pub fn orbit_ray_space(
    model: &GroupActionModel,
    words: &[MobiusIsometry],
    len: usize,
) -> (crate::metric::FiniteMetricSpace, Vec<Vec<usize>>) {
    let base = model.base();
    let mut pts = vec![base];
    let mut seqs = Vec::with_capacity(words.len());
    for w in words {
        let mut seq = vec![0usize];
        let mut acc = *w;
        for _ in 0..len {
            seq.push(pts.len());
            pts.push(model.apply(&acc, &base));
            acc = acc.compose(w);
        }
        seqs.push(seq);
    }
    let n = pts.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = model.dist(&pts[i], &pts[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let space = crate::metric::FiniteMetricSpace::new(
        "orbit_rays",
        n,
        dist,
        None,
        crate::metric::Validation::Off,
    )
    .expect("exact model distances form a metric");
    (space, seqs)
}

/// Least-squares slope of `log N(R)` against `R` over a window.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub slope: f64,
    /// OLS standard error of the slope.
    pub stderr: f64,
    pub window: (f64, f64),
    pub points_used: usize,
}

/// Fit the exponential growth rate over `window`; refuses truncated orbits
/// because their counts are only lower bounds.
pub fn entropy(orbit: &OrbitBall, window: (f64, f64)) -> Result<EntropyEstimate> {
    if orbit.truncated {
        return Err(Error::parameter(
            "orbit enumeration was truncated by the word cap; counts are lower \
             bounds and the slope would be biased"
                .to_string(),
        ));
    }
    let (lo, hi) = window;
    if !(lo < hi) || hi > orbit.radius + 1e-12 {
        return Err(Error::parameter(format!(
            "window [{lo}, {hi}] must be increasing and lie within the \
             enumerated radius {}",
            orbit.radius
        )));
    }
    let pts: Vec<(f64, f64)> = orbit
        .grid
        .iter()
        .filter(|&&(r, n)| r >= lo - 1e-12 && r <= hi + 1e-12 && n > 0)
        .map(|&(r, n)| (r, (n as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::parameter(
            "fewer than 3 usable grid points in the window".to_string(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (my + slope * (p.0 - mx));
            e * e
        })
        .sum();
    let stderr = if pts.len() > 2 {
        (resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(EntropyEstimate {
        slope: slope.max(0.0),
        stderr,
        window,
        points_used: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, psl2z, schottky, SchottkyParams};

    #[test]
    fn cyclic_count_is_arithmetic() {
        // N(R) = 2 floor(R / l) + 1 for a hyperbolic translation of length l
        let l = 1.5;
        let m = cyclic(l).unwrap();
        let orbit = orbit_ball(&m, 10.0, 100).unwrap();
        assert!(!orbit.truncated);
        for r in [1.0f64, 2.9, 4.6, 7.4, 10.0] {
            let expect = 2 * (r / l).floor() as usize + 1;
            assert_eq!(orbit.count_at(r), expect, "r = {r}");
        }
    }

    #[test]
    fn cyclic_entropy_tends_to_zero() {
        let m = cyclic(1.0).unwrap();
        let orbit = orbit_ball(&m, 40.0, 200).unwrap();
        let slopes: Vec<f64> = [(4.0, 10.0), (10.0, 22.0), (22.0, 40.0)]
            .iter()
            .map(|&w| entropy(&orbit, w).unwrap().slope)
            .collect();
        assert!(slopes[1] < slopes[0] && slopes[2] < slopes[1], "{slopes:?}");
        assert!(slopes[2] < 0.06);
    }

    #[test]
    fn psl2z_matches_integer_matrix_oracle() {
        // independent oracle: all integer matrices (a,b;c,d), ad-bc=1, with
        // a^2+b^2+c^2+d^2 <= 2 cosh R; orbit points = matrices mod the
        // base-point stabilizer {1, S}, counted via point dedup
        let r = 6.0;
        let m = psl2z().unwrap();
        let orbit = orbit_ball(&m, r, 80).unwrap();
        assert!(!orbit.truncated);
        let oracle = psl2z_orbit_count_oracle(r);
        assert_eq!(orbit.count_at(r), oracle, "BFS vs direct enumeration");
    }

    /// Count distinct PSL(2,Z)-orbit points of i within hyperbolic distance
    /// R by enumerating integer matrices with squared Frobenius norm at
    /// most 2 cosh R (exact for the base point i).
    pub(crate) fn psl2z_orbit_count_oracle(r: f64) -> usize {
        let bound = 2.0 * r.cosh() + 1e-9;
        let amax = bound.sqrt().floor() as i64;
        let mut pts: HashSet<(i64, i64, i64)> = HashSet::new();
        for a in -amax..=amax {
            for c in -amax..=amax {
                let f = (a * a + c * c) as f64;
                if f > bound || (a == 0 && c == 0) {
                    continue;
                }
                // solve a d - b c = 1
                let (g, x, y) = ext_gcd(a, -c);
                if g.abs() != 1 {
                    continue;
                }
                // particular solution: d0 = x/g, b0 = y/g, general (b,d) =
                // (b0 + k a, d0 + k c)
                let d0 = x / g;
                let b0 = y / g;
                let rem = bound - f;
                // bound |b|, |d| by sqrt(rem)
                let lim = rem.sqrt().ceil() as i64 + a.abs() + c.abs() + 2;
                for k in -lim..=lim {
                    let b = b0 + k * a;
                    let d = d0 + k * c;
                    if ((b * b + d * d) as f64) <= rem {
                        // orbit point of i under (a,b;c,d):
                        // z = (ai + b)(conj(ci + d)) / |ci+d|^2
                        let den = (c * c + d * d) as f64;
                        let re = (b * d + a * c) as f64 / den;
                        let im = 1.0 / den; // det = 1
                        let q = 1e-9;
                        pts.insert((
                            (re / q).round() as i64,
                            (im / q).round() as i64,
                            0,
                        ));
                    }
                }
            }
        }
        pts.len()
    }

    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - (a.div_euclid(b)) * y)
        }
    }

    #[test]
    fn schottky_growth_decreases_with_separation() {
        // the convex core of the line-circle family is thin, so the
        // exponential regime only shows at moderately deep radii
        let mut slopes = Vec::new();
        for radius in [0.99, 0.95, 0.9] {
            let m = schottky(SchottkyParams::symmetric(radius).unwrap()).unwrap();
            let orbit = orbit_ball(&m, 22.0, 120).unwrap();
            assert!(!orbit.truncated);
            let e = entropy(&orbit, (10.0, 22.0)).unwrap();
            slopes.push(e.slope);
        }
        assert!(
            slopes[0] > slopes[1] && slopes[1] > slopes[2],
            "separating the circles must lower the growth rate: {slopes:?}"
        );
        assert!(slopes[0] < 1.0 && slopes[2] > 0.0);
    }

    #[test]
    fn entropy_refuses_truncation() {
        let m = psl2z().unwrap();
        let orbit = orbit_ball(&m, 8.0, 3).unwrap();
        assert!(orbit.truncated);
        assert!(entropy(&orbit, (2.0, 8.0)).is_err());
    }
}
