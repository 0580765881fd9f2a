//! Cross-ratio and bi-Lipschitz distortion between corresponding spaces.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{cross_ratio, FiniteMetricSpace, Quadruple};

/// Linear quasi-Mobius distortion report: the fitted constant of
/// `[f(q)] <= C [q]` over sampled quadruples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistortionReport {
    pub map_label: String,
    pub linear_constant_c: f64,
    pub worst_quadruple: Quadruple,
    pub sample_count: usize,
    pub exhaustive: bool,
}

fn check_correspondence(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    correspondence: &[usize],
) -> Result<()> {
    let n = source.len();
    if target.len() != n {
        return Err(Error::Shape(format!(
            "point counts differ: {} vs {}",
            n,
            target.len()
        )));
    }
    if correspondence.len() != n {
        return Err(Error::Shape(format!(
            "correspondence has {} entries for {} points",
            correspondence.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &t in correspondence {
        if t >= n || seen[t] {
            return Err(Error::Shape("correspondence is not a bijection".into()));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Fit the linear quasi-Mobius constant of the map `source -> target`
/// given by `correspondence`.
///
/// Exhaustive over all ordered distinct quadruples when their count is at
/// most `quadruple_budget`, otherwise over a seeded uniform sample without
/// replacement of that size.
pub fn qm_distortion(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    correspondence: &[usize],
    quadruple_budget: usize,
    seed: u64,
) -> Result<DistortionReport> {
    check_correspondence(source, target, correspondence)?;
    let n = source.len();
    if n < 4 {
        return Err(Error::parameter("need at least 4 points for quadruples"));
    }

    let mut best = f64::NEG_INFINITY;
    let mut worst = Quadruple([0, 1, 2, 3]);
    let mut count = 0usize;

    let mut eval = |q: Quadruple| -> Result<()> {
        let [a, b, c, d] = q.0;
        let img = Quadruple([
            correspondence[a],
            correspondence[b],
            correspondence[c],
            correspondence[d],
        ]);
        let ratio = cross_ratio(target, img)? / cross_ratio(source, q)?;
        if ratio > best {
            best = ratio;
            worst = q;
        }
        count += 1;
        Ok(())
    };

    let total = (n as u128) * (n as u128 - 1) * (n as u128 - 2) * (n as u128 - 3);
    let exhaustive = total <= quadruple_budget as u128;
    if exhaustive {
        for a in 0..n {
            for b in 0..n {
                if b == a {
                    continue;
                }
                for c in 0..n {
                    if c == a || c == b {
                        continue;
                    }
                    for d in 0..n {
                        if d == a || d == b || d == c {
                            continue;
                        }
                        eval(Quadruple([a, b, c, d]))?;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn: HashSet<[usize; 4]> = HashSet::with_capacity(quadruple_budget * 2);
        let mut attempts = 0usize;
        while drawn.len() < quadruple_budget && attempts < quadruple_budget * 20 {
            attempts += 1;
            let q = [
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            ];
            if q[0] == q[1]
                || q[0] == q[2]
                || q[0] == q[3]
                || q[1] == q[2]
                || q[1] == q[3]
                || q[2] == q[3]
            {
                continue;
            }
            if drawn.insert(q) {
                eval(Quadruple(q))?;
            }
        }
    }

    Ok(DistortionReport {
        map_label: format!("{} -> {}", source.label(), target.label()),
        linear_constant_c: best,
        worst_quadruple: worst,
        sample_count: count,
        exhaustive,
    })
}

/// Bi-Lipschitz distortion: max over pairs of the larger of
/// `d_target/d_source` and `d_source/d_target`.
pub fn bilipschitz_distortion(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    correspondence: &[usize],
) -> Result<f64> {
    check_correspondence(source, target, correspondence)?;
    let n = source.len();
    let mut best = 1.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let ds = source.dist(i, j);
            let dt = target.dist(correspondence[i], correspondence[j]);
            best = best.max(dt / ds).max(ds / dt);
        }
    }
    Ok(best)
}
