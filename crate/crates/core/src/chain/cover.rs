//! Covers of a space by balls of radius `2 e^{-eps k}` centered on a
//! maximal `e^{-eps k}`-separated net.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{max_separated_net, FiniteMetricSpace, Net};

/// A k-ball cover: a maximal `e^{-eps k}`-separated net together with the
/// open balls of twice that radius around its members. Distances are
/// normalized so the parent diameter is 1; the scale factor is recorded.
#[derive(Debug, Clone, Serialize)]
pub struct KBallCover {
    #[serde(skip)]
    pub space: Arc<FiniteMetricSpace>,
    /// Diameter of the parent space in its own units (the normalization factor).
    pub scale: f64,
    pub eps: f64,
    pub k: u32,
    pub net: Net,
    /// `2 e^{-eps k}` in normalized units.
    pub ball_radius: f64,
    /// For each sample point, the net-ball indices whose ball contains it.
    pub memberships: Vec<Vec<u32>>,
    /// For each net ball, the sample points it contains.
    pub ball_members: Vec<Vec<u32>>,
    /// Set when `e^{-eps k}` drops below the minimum pairwise sample
    /// distance; the cover is still built.
    pub resolution_warning: Option<String>,
}

impl KBallCover {
    /// Distance in normalized units (diam = 1).
    #[inline]
    pub fn dist_norm(&self, i: usize, j: usize) -> f64 {
        self.space.dist(i, j) / self.scale
    }

    pub fn separation(&self) -> f64 {
        (-self.eps * self.k as f64).exp()
    }

    pub fn ball_count(&self) -> usize {
        self.net.members.len()
    }

    /// Exhaustive scan of the two cover invariants: net separation /
    /// maximality and the covering property of the doubled balls.
    pub fn verify(&self) -> Result<()> {
        let sep = self.separation();
        let members = &self.net.members;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if self.dist_norm(i, j) < sep {
                    return Err(Error::Invariant(format!(
                        "net members {i},{j} closer than separation {sep}"
                    )));
                }
            }
        }
        for p in 0..self.space.len() {
            if self.memberships[p].is_empty() {
                return Err(Error::Invariant(format!(
                    "sample point {p} not covered by any k-ball"
                )));
            }
        }
        Ok(())
    }
}

/// Build the k-ball cover of a space at scale `e^{-eps k}` (after
/// normalizing the diameter to 1).
pub fn build_cover(
    space: Arc<FiniteMetricSpace>,
    eps: f64,
    k: u32,
    seed: u64,
) -> Result<KBallCover> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::parameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let scale = space.diam();
    if !(scale > 0.0) {
        return Err(Error::parameter("cover needs a space with positive diameter"));
    }
    let sep_norm = (-eps * k as f64).exp();
    let radius = 2.0 * sep_norm;

    // The greedy net works in original units.
    let net = max_separated_net(&space, sep_norm * scale, seed)?;

    let n = space.len();
    let m = net.members.len();
    let mut memberships: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut ball_members: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (b, &center) in net.members.iter().enumerate() {
        for p in 0..n {
            if space.dist(p, center) < radius * scale {
                memberships[p].push(b as u32);
                ball_members[b].push(p as u32);
            }
        }
    }

    let resolution_warning = if n > 1 && sep_norm * scale < space.min_dist() {
        Some(format!(
            "separation e^(-eps k) = {:.3e} is below the minimum pairwise sample \
             distance {:.3e}; chain distances at k = {k} reflect the sample, not the space",
            sep_norm * scale,
            space.min_dist()
        ))
    } else {
        None
    };

    Ok(KBallCover {
        space,
        scale,
        eps,
        k,
        net,
        ball_radius: radius,
        memberships,
        ball_members,
        resolution_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::circle_snowflake;

    #[test]
    fn k_zero_is_diameter_scale() {
        let space = Arc::new(circle_snowflake(64, 1.0).unwrap());
        let cover = build_cover(space, 0.7, 0, 5).unwrap();
        assert_eq!(cover.separation(), 1.0);
        // a 1-separated net of a diam-1 space is tiny but nonempty
        assert!(cover.ball_count() >= 1 && cover.ball_count() <= 4);
        cover.verify().unwrap();
    }

    #[test]
    fn circle_net_count_matches_greedy_oracle() {
        let space = Arc::new(circle_snowflake(4096, 1.0).unwrap());
        let cover = build_cover(space.clone(), 1.0, 3, 11).unwrap();
        cover.verify().unwrap();
        // e^{-3} separation on a chordal circle normalized to diam 1:
        // count must land within a fixed band of e^3.
        let e3 = 3f64.exp();
        let count = cover.ball_count() as f64;
        assert!(
            count >= e3 / 4.0 && count <= 4.0 * e3,
            "net count {count} outside [e^3/4, 4e^3]"
        );
        // oracle: direct greedy construction in index order
        let order: Vec<usize> = (0..space.len()).collect();
        let oracle =
            crate::metric::greedy_net_for_tests(&space, cover.separation() * cover.scale, &order);
        let ratio = count / oracle.len() as f64;
        assert!(ratio > 0.5 && ratio < 2.0, "oracle count {}", oracle.len());
    }

    #[test]
    fn every_point_covered() {
        let space = Arc::new(circle_snowflake(512, 0.5).unwrap());
        for k in 0..=4 {
            let cover = build_cover(space.clone(), 0.5, k, 3).unwrap();
            cover.verify().unwrap();
        }
    }

    #[test]
    fn resolution_warning_below_sample_mesh() {
        let space = Arc::new(circle_snowflake(16, 1.0).unwrap());
        let cover = build_cover(space, 1.0, 9, 3).unwrap();
        assert!(cover.resolution_warning.is_some());
    }
}
