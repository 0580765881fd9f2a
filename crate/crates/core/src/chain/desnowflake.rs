//! De-snowflake reports: chain distances across a window of scales
//! compared against `d^{1/eps}`, with two-sided bands.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::nerve::ball_set_chain;
use crate::chain::{build_cover, build_nerve, resolved_kmax, MESH_GUARD_FACTOR, PAIR_MESH_FACTOR};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Per-pair trace of `d_k` across the window.
#[derive(Debug, Clone, Serialize)]
pub struct PairTrace {
    pub i: usize,
    pub j: usize,
    /// `d(i,j)` in normalized units.
    pub dist: f64,
    /// `d(i,j)^{1/eps}`, the de-snowflake target.
    pub target: f64,
    /// One entry per k in the window; `None` when unreachable.
    pub d_k: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesnowflakeReport {
    pub eps: f64,
    pub k_window: (u32, u32),
    /// Normalization factor (the input diameter).
    pub scale: f64,
    /// Sample mesh in normalized units.
    pub mesh: f64,
    /// Pairs below this normalized distance were excluded.
    pub pair_threshold: f64,
    pub mesh_guard_factor: f64,
    pub pairs: Vec<PairTrace>,
    /// Extreme values of `d_k(x,y) / d(x,y)^{1/eps}` over all admitted
    /// (pair, k) samples: a pair is admitted at k once `e^{-eps k} < d(x,y)`.
    pub band: (f64, f64),
    /// Per-k bands over the pairs admitted at that k.
    pub per_k_bands: Vec<KBand>,
    pub unreachable_pairs: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KBand {
    pub k: u32,
    pub c_low: f64,
    pub c_high: f64,
    pub pairs: usize,
}

impl DesnowflakeReport {
    pub fn band_ratio(&self) -> f64 {
        self.band.1 / self.band.0
    }
}

/// Compare chain distances against `d^{1/eps}` over a window of scales.
///
/// Pairs are sampled with `d(x,y)` at least 10x the sample mesh (both
/// `d_k` and `d^{1/eps}` are unresolved below that), and each pair enters
/// the band only at scales fine enough to resolve it.
pub fn desnowflake(
    space: Arc<FiniteMetricSpace>,
    eps: f64,
    k_window: (u32, u32),
    pair_budget: usize,
    seed: u64,
) -> Result<DesnowflakeReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::parameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    if pair_budget == 0 {
        return Err(Error::parameter("pair budget must be positive"));
    }
    let (kmin, kmax_req) = k_window;
    if kmin > kmax_req {
        return Err(Error::parameter(format!(
            "empty k window: {kmin} > {kmax_req}"
        )));
    }
    let scale = space.diam();
    let mesh = space.mesh() / scale;
    let kmax_resolved = resolved_kmax(eps, mesh).ok_or_else(|| {
        Error::Resolution(format!(
            "no k satisfies e^(-eps k) >= {MESH_GUARD_FACTOR} * mesh = {:.3e}; \
             the sample is too coarse",
            MESH_GUARD_FACTOR * mesh
        ))
    })?;
    if kmax_resolved < kmin {
        return Err(Error::Resolution(format!(
            "window starts at k = {kmin} but the sample mesh {mesh:.3e} only \
             resolves k <= {kmax_resolved} (e^(-eps k) >= {MESH_GUARD_FACTOR} * mesh)"
        )));
    }
    let kmax = kmax_req.min(kmax_resolved);

    // seeded pair sample above the mesh threshold
    let n = space.len();
    let threshold = PAIR_MESH_FACTOR * mesh;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(pair_budget);
    let mut attempts = 0usize;
    let max_attempts = pair_budget.saturating_mul(200).max(10_000);
    while pairs.len() < pair_budget && attempts < max_attempts {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        if space.dist(i, j) / scale >= threshold {
            pairs.push((i.min(j), i.max(j)));
        }
    }
    if pairs.is_empty() {
        return Err(Error::Resolution(format!(
            "no pairs with normalized distance >= {threshold:.3e} found"
        )));
    }

    let mut traces: Vec<PairTrace> = pairs
        .iter()
        .map(|&(i, j)| {
            let d = space.dist(i, j) / scale;
            PairTrace {
                i,
                j,
                dist: d,
                target: d.powf(1.0 / eps),
                d_k: Vec::with_capacity((kmax - kmin + 1) as usize),
            }
        })
        .collect();

    let mut per_k_bands = Vec::new();
    let mut band = (f64::INFINITY, f64::NEG_INFINITY);
    let mut unreachable = 0usize;
    for k in kmin..=kmax {
        let cover = build_cover(space.clone(), eps, k, seed.wrapping_add(k as u64))?;
        let nerve = build_nerve(cover);
        let sep = (-eps * k as f64).exp();
        let ek = (-(k as f64)).exp();
        let mut c_low = f64::INFINITY;
        let mut c_high = f64::NEG_INFINITY;
        let mut admitted = 0usize;
        for t in traces.iter_mut() {
            let balls = ball_set_chain(
                &nerve,
                &nerve.cover.memberships[t.i],
                &nerve.cover.memberships[t.j],
            );
            let dk = balls.map(|b| b as f64 * ek);
            if dk.is_none() {
                unreachable += 1;
            }
            if let Some(v) = dk {
                if sep < t.dist {
                    let ratio = v / t.target;
                    c_low = c_low.min(ratio);
                    c_high = c_high.max(ratio);
                    admitted += 1;
                }
            }
            t.d_k.push(dk);
        }
        if admitted > 0 {
            band.0 = band.0.min(c_low);
            band.1 = band.1.max(c_high);
            per_k_bands.push(KBand {
                k,
                c_low,
                c_high,
                pairs: admitted,
            });
        }
    }
    if !band.0.is_finite() || !band.1.is_finite() {
        return Err(Error::Resolution(
            "no (pair, k) sample was resolved; widen the window or densify the sample".into(),
        ));
    }

    Ok(DesnowflakeReport {
        eps,
        k_window: (kmin, kmax),
        scale,
        mesh,
        pair_threshold: threshold,
        mesh_guard_factor: MESH_GUARD_FACTOR,
        pairs: traces,
        band,
        per_k_bands,
        unreachable_pairs: unreachable,
    })
}

/// Empirical constant of the iteration step: for pairs with
/// `d(x,y) <= e^{-eps (m-1)}`, the shortest k-ball chain between
/// `B(x, e^{-eps m})` and `B(y, e^{-eps m})` divided by `e^{k-m}`.
#[derive(Debug, Clone, Serialize)]
pub struct IterationLemmaReport {
    pub eps: f64,
    pub m: u32,
    pub k: u32,
    pub pairs: usize,
    pub max_normalized_length: f64,
    pub mean_normalized_length: f64,
    pub unreachable: usize,
}

pub fn iteration_lemma_check(
    space: Arc<FiniteMetricSpace>,
    eps: f64,
    m: u32,
    k: u32,
    pair_budget: usize,
    seed: u64,
) -> Result<IterationLemmaReport> {
    if m > k {
        return Err(Error::parameter(format!("need m <= k, got m = {m}, k = {k}")));
    }
    if pair_budget == 0 {
        return Err(Error::parameter("pair budget must be positive"));
    }
    let scale = space.diam();
    let mesh = space.mesh() / scale;
    let kmax = resolved_kmax(eps, mesh)
        .ok_or_else(|| Error::Resolution("sample too coarse for any k".into()))?;
    if k > kmax {
        return Err(Error::Resolution(format!(
            "k = {k} beyond the resolved range (max {kmax})"
        )));
    }

    let n = space.len();
    let dmax = (-eps * (m as f64 - 1.0)).exp();
    let r_m = (-eps * m as f64).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut attempts = 0usize;
    while pairs.len() < pair_budget && attempts < pair_budget * 400 {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j && space.dist(i, j) / scale <= dmax {
            pairs.push((i, j));
        }
    }
    if pairs.is_empty() {
        return Err(Error::Resolution(format!(
            "no pairs with normalized distance <= {dmax:.3e}"
        )));
    }

    let cover = build_cover(space.clone(), eps, k, seed)?;
    let nerve = build_nerve(cover);
    let ekm = ((k - m) as f64).exp();
    let mut max_norm = 0.0f64;
    let mut sum = 0.0f64;
    let mut reached = 0usize;
    let mut unreachable = 0usize;
    for &(x, y) in &pairs {
        // balls sample-witnessed to meet B(x, e^{-eps m}) / B(y, e^{-eps m})
        let mut sources: Vec<u32> = Vec::new();
        let mut targets: Vec<u32> = Vec::new();
        for p in 0..n {
            if space.dist(p, x) / scale < r_m {
                sources.extend_from_slice(&nerve.cover.memberships[p]);
            }
            if space.dist(p, y) / scale < r_m {
                targets.extend_from_slice(&nerve.cover.memberships[p]);
            }
        }
        sources.sort_unstable();
        sources.dedup();
        targets.sort_unstable();
        targets.dedup();
        match ball_set_chain(&nerve, &sources, &targets) {
            Some(len) => {
                let norm = len as f64 / ekm;
                max_norm = max_norm.max(norm);
                sum += norm;
                reached += 1;
            }
            None => unreachable += 1,
        }
    }
    if reached == 0 {
        return Err(Error::Resolution("all sampled pairs unreachable".into()));
    }
    Ok(IterationLemmaReport {
        eps,
        m,
        k,
        pairs: reached,
        max_normalized_length: max_norm,
        mean_normalized_length: sum / reached as f64,
        unreachable,
    })
}
