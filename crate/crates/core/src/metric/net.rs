//! Maximal separated nets and net-count regularity fitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// A maximal `separation`-separated subset of a parent space.
///
/// Member indices refer to the space the net was built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Net {
    pub members: Vec<usize>,
    pub separation: f64,
    pub seed: u64,
}

impl Net {
    /// Exhaustive check of both net invariants against the parent.
    pub fn verify(&self, space: &FiniteMetricSpace) -> Result<()> {
        for (a, &i) in self.members.iter().enumerate() {
            for &j in &self.members[a + 1..] {
                if space.dist(i, j) < self.separation {
                    return Err(Error::Invariant(format!(
                        "net members {i},{j} at distance {} < separation {}",
                        space.dist(i, j),
                        self.separation
                    )));
                }
            }
        }
        for p in 0..space.len() {
            if !self
                .members
                .iter()
                .any(|&m| space.dist(p, m) < self.separation || m == p)
            {
                return Err(Error::Invariant(format!(
                    "point {p} not within {} of any net member",
                    self.separation
                )));
            }
        }
        Ok(())
    }
}

/// Greedy maximal `sep`-separated net, iterating points in seeded-shuffled
/// index order. Any maximal set works up to uniform constants; the shuffle
/// makes the choice deterministic per seed.
pub fn max_separated_net(space: &FiniteMetricSpace, sep: f64, seed: u64) -> Result<Net> {
    if !(sep > 0.0) {
        return Err(Error::parameter(format!("separation must be > 0, got {sep}")));
    }
    let mut order: Vec<usize> = (0..space.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let members = greedy_net(space, sep, &order);
    Ok(Net {
        members,
        separation: sep,
        seed,
    })
}

/// Greedy net in a fixed iteration order.
pub(crate) fn greedy_net(space: &FiniteMetricSpace, sep: f64, order: &[usize]) -> Vec<usize> {
    let mut members: Vec<usize> = Vec::new();
    for &i in order {
        if members.iter().all(|&m| space.dist(i, m) >= sep) {
            members.push(i);
        }
    }
    members
}

/// Two-sided Ahlfors-regularity fit with counting measure as the volume
/// proxy: at each radius `r` the size of a maximal `r`-net stands in for
/// `mu(B(x,r))^{-1}` coverage statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityFit {
    pub dimension_alpha: f64,
    pub constant_c: f64,
    /// (radius, net count) pairs, strictly decreasing in radius.
    pub scales: Vec<(f64, usize)>,
    /// Heuristic flag: the per-scale constant drifts by more than 4x across
    /// the grid, signalling that `alpha` does not fit.
    pub failing: bool,
}

/// Ratio of per-scale constants beyond which a fit is flagged as failing.
const FIT_DRIFT_FACTOR: f64 = 4.0;

/// Fit the two-sided constant of `(1/C) (r/diam)^{-alpha} <= N(r) <= C (r/diam)^{-alpha}`
/// over a radius grid, where `N(r)` is a greedy maximal `r`-net count.
pub fn ahlfors_fit(
    space: &FiniteMetricSpace,
    alpha: f64,
    scale_grid: &[f64],
) -> Result<RegularityFit> {
    if scale_grid.is_empty() {
        return Err(Error::parameter("ahlfors_fit needs a non-empty scale grid"));
    }
    if !(alpha > 0.0) {
        return Err(Error::parameter(format!("alpha must be > 0, got {alpha}")));
    }
    let diam = space.diam();
    let mut grid: Vec<f64> = scale_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    grid.dedup();
    if grid.iter().any(|&r| !(r > 0.0 && r <= diam)) {
        return Err(Error::parameter(format!(
            "scale grid must lie in (0, diam = {diam}]"
        )));
    }

    let order: Vec<usize> = (0..space.len()).collect();
    let mut scales = Vec::with_capacity(grid.len());
    let mut c_per_scale = Vec::with_capacity(grid.len());
    for &r in &grid {
        let count = greedy_net(space, r, &order).len();
        let target = (r / diam).powf(-alpha);
        let ratio = count as f64 / target;
        c_per_scale.push(ratio.max(1.0 / ratio));
        scales.push((r, count));
    }
    let constant_c = c_per_scale.iter().cloned().fold(1.0f64, f64::max);
    let c_min = c_per_scale.iter().cloned().fold(f64::INFINITY, f64::min);
    let failing = constant_c / c_min > FIT_DRIFT_FACTOR;
    Ok(RegularityFit {
        dimension_alpha: alpha,
        constant_c,
        scales,
        failing,
    })
}
