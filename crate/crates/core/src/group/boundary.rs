//! Boundary actions, limit sets, and triple separation.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{BoundaryPoint, GroupActionModel, MobiusIsometry};

/// Images of boundary points under one group element, with the chordal
/// cross-ratio distortion over sampled quadruples.
#[derive(Debug, Clone)]
pub struct BoundaryActionReport {
    pub images: Vec<BoundaryPoint>,
    pub linear_constant_c: f64,
    pub worst_quadruple: [usize; 4],
    pub sample_count: usize,
}

/// Apply `g` to boundary points and measure cross-ratio distortion in the
/// chordal metric over seeded quadruples (exhaustive when few).
pub fn boundary_action(
    model: &GroupActionModel,
    g: &MobiusIsometry,
    points: &[BoundaryPoint],
    quadruple_budget: usize,
    seed: u64,
) -> Result<BoundaryActionReport> {
    let n = points.len();
    if n < 4 {
        return Err(Error::parameter("need at least 4 boundary points"));
    }
    for p in points {
        model.validate_boundary(p)?;
    }
    let images: Vec<BoundaryPoint> = points.iter().map(|p| model.boundary_apply(g, p)).collect();

    let cross = |pts: &[BoundaryPoint], q: [usize; 4]| -> f64 {
        let d = |i: usize, j: usize| pts[i].chordal(&pts[j]);
        d(q[0], q[2]) * d(q[1], q[3]) / (d(q[0], q[3]) * d(q[1], q[2]))
    };

    let mut best = f64::NEG_INFINITY;
    let mut worst = [0usize; 4];
    let mut count = 0usize;
    let mut eval = |q: [usize; 4]| {
        let ratio = cross(&images, q) / cross(points, q);
        if ratio > best {
            best = ratio;
            worst = q;
        }
        count += 1;
    };

    let total = (n as u128) * (n as u128 - 1) * (n as u128 - 2) * (n as u128 - 3);
    if total <= quadruple_budget as u128 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if a != b && a != c && a != d && b != c && b != d && c != d {
                            eval([a, b, c, d]);
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0usize;
        while drawn < quadruple_budget {
            let q = [
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            ];
            if q[0] != q[1]
                && q[0] != q[2]
                && q[0] != q[3]
                && q[1] != q[2]
                && q[1] != q[3]
                && q[2] != q[3]
            {
                eval(q);
                drawn += 1;
            }
        }
    }

    Ok(BoundaryActionReport {
        images,
        linear_constant_c: best,
        worst_quadruple: worst,
        sample_count: count,
    })
}

/// Attracting fixed points of reduced words up to a depth.
#[derive(Debug, Clone)]
pub struct LimitSetSample {
    pub points: Vec<BoundaryPoint>,
    pub words_scanned: usize,
    pub skipped_non_loxodromic: usize,
    pub warning: Option<String>,
}

/// Sample the limit set: attracting fixed points of all reduced words up
/// to `depth`, deduplicated at 1e-9 chordal.
pub fn limit_set_sample(model: &GroupActionModel, depth: u32, _seed: u64) -> Result<LimitSetSample> {
    if depth == 0 {
        return Err(Error::parameter("depth must be at least 1"));
    }
    let mut seen: HashSet<[i64; 3]> = HashSet::new();
    let mut points = Vec::new();
    let mut scanned = 0usize;
    let mut skipped = 0usize;

    // depth-first over reduced words (no immediate backtracking)
    let gens = model.generators();
    let mut stack: Vec<(MobiusIsometry, usize, u32)> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, i, 1u32))
        .collect();
    while let Some((w, last, len)) = stack.pop() {
        scanned += 1;
        if w.is_loxodromic(1e-9) {
            if let Some(p) = attracting_fixed_point(model, &w) {
                if seen.insert(p.key(1e-9)) {
                    points.push(p);
                }
            }
        } else {
            skipped += 1;
        }
        if len < depth {
            for (i, g) in gens.iter().enumerate() {
                if i == model.inverse_of(last) {
                    continue;
                }
                stack.push((w.compose(g), i, len + 1));
            }
        }
    }

    let warning = if points.is_empty() {
        Some(format!(
            "no loxodromic words up to depth {depth}; limit-set sample is empty"
        ))
    } else {
        None
    };
    Ok(LimitSetSample {
        points,
        words_scanned: scanned,
        skipped_non_loxodromic: skipped,
        warning,
    })
}

/// Attracting fixed point of a loxodromic matrix, as a boundary point of
/// the model.
pub fn attracting_fixed_point(
    model: &GroupActionModel,
    g: &MobiusIsometry,
) -> Option<BoundaryPoint> {
    let [[a, b], [c, d]] = g.m;
    let one = Complex64::new(1.0, 0.0);
    // fixed points of (az+b)/(cz+d); attracting has |cz+d| > 1
    let (num, den) = if c.norm() > 1e-12 {
        let disc = ((a + d) * (a + d) - 4.0 * one).sqrt();
        let z1 = (a - d + disc) / (2.0 * c);
        let z2 = (a - d - disc) / (2.0 * c);
        let pick = if (c * z1 + d).norm() >= (c * z2 + d).norm() {
            z1
        } else {
            z2
        };
        (pick, one)
    } else {
        // fixed points: infinity and b/(d - a)
        if a.norm() > d.norm() {
            (one, Complex64::new(0.0, 0.0))
        } else {
            (b / (d - a), one)
        }
    };
    match model.kind {
        crate::group::ModelKind::H2 => Some(model.circle_from_projective(num, den)),
        crate::group::ModelKind::H3 => {
            let u = crate::group::model::chart_to_sphere(num, den);
            Some(BoundaryPoint::Sphere(u))
        }
    }
}

/// Result of searching the word ball for the element best separating a
/// boundary triple.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationSearch {
    #[serde(skip)]
    pub best: MobiusIsometry,
    pub best_word: Vec<usize>,
    pub achieved: f64,
    /// For each threshold tau, the number of words in the ball whose three
    /// images are pairwise tau-separated (finite by proper discontinuity).
    pub counts_above: Vec<(f64, usize)>,
    pub words_scanned: usize,
}

/// Search the reduced-word ball of radius `word_budget` for the element
/// maximizing the min pairwise chordal distance of the triple's images.
/// The identity is always a candidate.
pub fn separate_triple(
    model: &GroupActionModel,
    triple: &[BoundaryPoint; 3],
    word_budget: u32,
    taus: &[f64],
) -> Result<SeparationSearch> {
    if word_budget == 0 {
        return Err(Error::parameter("word budget must be at least 1"));
    }
    for p in triple {
        model.validate_boundary(p)?;
    }
    let d01 = triple[0].chordal(&triple[1]);
    let d02 = triple[0].chordal(&triple[2]);
    let d12 = triple[1].chordal(&triple[2]);
    if d01 == 0.0 || d02 == 0.0 || d12 == 0.0 {
        return Err(Error::parameter("triple points must be distinct"));
    }

    let minsep = |g: &MobiusIsometry| -> f64 {
        let a = model.boundary_apply(g, &triple[0]);
        let b = model.boundary_apply(g, &triple[1]);
        let c = model.boundary_apply(g, &triple[2]);
        a.chordal(&b).min(a.chordal(&c)).min(b.chordal(&c))
    };

    let gens = model.generators();
    let mut best = MobiusIsometry::identity();
    let mut best_word: Vec<usize> = Vec::new();
    let mut best_sep = minsep(&best);
    let mut counts = vec![0usize; taus.len()];
    let mut scanned = 1usize;
    for (ti, &tau) in taus.iter().enumerate() {
        if best_sep >= tau {
            counts[ti] += 1;
        }
    }

    // iterative DFS over reduced words carrying the word spelling
    let mut stack: Vec<(MobiusIsometry, usize, u32, Vec<usize>)> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, i, 1u32, vec![i]))
        .collect();
    while let Some((w, last, len, spelling)) = stack.pop() {
        scanned += 1;
        let sep = minsep(&w);
        if sep > best_sep {
            best_sep = sep;
            best = w;
            best_word = spelling.clone();
        }
        for (ti, &tau) in taus.iter().enumerate() {
            if sep >= tau {
                counts[ti] += 1;
            }
        }
        if len < word_budget {
            for (i, g) in gens.iter().enumerate() {
                if i == model.inverse_of(last) {
                    continue;
                }
                let mut sp = spelling.clone();
                sp.push(i);
                stack.push((w.compose(g), i, len + 1, sp));
            }
        }
    }

    Ok(SeparationSearch {
        best,
        best_word,
        achieved: best_sep,
        counts_above: taus.iter().cloned().zip(counts).collect(),
        words_scanned: scanned,
    })
}
