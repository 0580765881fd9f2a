//! Nerve graphs of k-ball covers and chain distances through them.

use std::collections::VecDeque;

use serde::Serialize;

use crate::chain::KBallCover;
use crate::error::{Error, Result};

/// Intersection graph of the k-balls: an edge joins two balls exactly when
/// some sample point lies in both (chains only ever use sample points in
/// intersections, so intersection is sample-witnessed).
#[derive(Debug, Clone, Serialize)]
pub struct NerveGraph {
    pub cover: KBallCover,
    /// Sorted neighbour lists over net-ball indices; symmetric, no loops.
    pub adjacency: Vec<Vec<u32>>,
    pub max_degree: usize,
    pub edge_count: usize,
}

/// Build the nerve of a cover.
pub fn build_nerve(cover: KBallCover) -> NerveGraph {
    let m = cover.ball_count();
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); m];
    for balls in &cover.memberships {
        for (ai, &a) in balls.iter().enumerate() {
            for &b in &balls[ai + 1..] {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
    }
    let mut edge_count = 0;
    let mut max_degree = 0;
    for list in adjacency.iter_mut() {
        list.sort_unstable();
        list.dedup();
        edge_count += list.len();
        max_degree = max_degree.max(list.len());
    }
    NerveGraph {
        cover,
        adjacency,
        max_degree,
        edge_count: edge_count / 2,
    }
}

/// Chain distances `d_k(x, y) = (shortest k-ball chain length) * e^{-k}`
/// for the queried point pairs.
#[derive(Debug, Clone, Serialize)]
pub struct ChainDistanceTable {
    pub eps: f64,
    pub k: u32,
    pub entries: Vec<ChainEntry>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainEntry {
    pub i: usize,
    pub j: usize,
    /// Number of balls in the shortest chain; `None` when the nerve
    /// disconnects the two ball sets.
    pub balls: Option<u32>,
}

impl ChainEntry {
    pub fn d_k(&self, k: u32) -> Option<f64> {
        self.balls.map(|b| b as f64 * (-(k as f64)).exp())
    }
}

impl ChainDistanceTable {
    pub fn value(&self, idx: usize) -> Option<f64> {
        self.entries[idx].d_k(self.k)
    }
}

/// Multi-source BFS from the balls containing `x` to the balls containing
/// `y`; the value is the number of balls in the chain. Two points in a
/// common ball have chain length 1.
pub fn chain_distance(nerve: &NerveGraph, pairs: &[(usize, usize)]) -> Result<ChainDistanceTable> {
    let cover = &nerve.cover;
    let n = cover.space.len();
    for &(i, j) in pairs {
        if i >= n || j >= n {
            return Err(Error::parameter(format!(
                "pair ({i},{j}) out of range for {n} points"
            )));
        }
    }
    let entries = pairs
        .iter()
        .map(|&(i, j)| ChainEntry {
            i,
            j,
            balls: ball_set_chain(nerve, &cover.memberships[i], &cover.memberships[j]),
        })
        .collect();
    Ok(ChainDistanceTable {
        eps: cover.eps,
        k: cover.k,
        entries,
    })
}

/// Shortest chain (in balls, counted with multiplicity-free BFS) from any
/// ball in `sources` to any ball in `targets`.
pub(crate) fn ball_set_chain(
    nerve: &NerveGraph,
    sources: &[u32],
    targets: &[u32],
) -> Option<u32> {
    let m = nerve.adjacency.len();
    if sources.is_empty() || targets.is_empty() {
        return None;
    }
    let mut is_target = vec![false; m];
    for &t in targets {
        is_target[t as usize] = true;
    }
    let mut level: Vec<u32> = vec![0; m];
    let mut queue = VecDeque::new();
    // lowest-net-index first for deterministic traversal
    let mut srcs: Vec<u32> = sources.to_vec();
    srcs.sort_unstable();
    for &s in &srcs {
        if level[s as usize] == 0 {
            level[s as usize] = 1;
            if is_target[s as usize] {
                return Some(1);
            }
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let lu = level[u as usize];
        for &v in &nerve.adjacency[u as usize] {
            if level[v as usize] == 0 {
                level[v as usize] = lu + 1;
                if is_target[v as usize] {
                    return Some(lu + 1);
                }
                queue.push_back(v);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chain::build_cover;
    use crate::gen::circle_snowflake;
    use crate::metric::{FiniteMetricSpace, Validation};

    #[test]
    fn far_balls_share_no_edge() {
        // two clusters far apart: nerve splits into two components
        let coords = vec![vec![0.0], vec![0.01], vec![10.0], vec![10.01]];
        let space =
            Arc::new(FiniteMetricSpace::from_points("two", coords, Validation::Full).unwrap());
        let cover = build_cover(space, 1.0, 3, 1).unwrap();
        let nerve = build_nerve(cover);
        let table = chain_distance(&nerve, &[(0, 2)]).unwrap();
        assert_eq!(table.entries[0].balls, None, "disconnected pair must be unreachable");
    }

    #[test]
    fn circle_nerve_is_a_cycle() {
        let space = Arc::new(circle_snowflake(2048, 1.0).unwrap());
        let cover = build_cover(space, 1.0, 3, 7).unwrap();
        let nerve = build_nerve(cover);
        // on a circle each ball meets a bounded set of neighbours on each side
        assert!(nerve.max_degree >= 2);
        assert!(nerve.max_degree <= 12, "degree {}", nerve.max_degree);
        // connected: every pair reachable
        let table = chain_distance(&nerve, &[(0, 1024), (5, 900)]).unwrap();
        assert!(table.entries.iter().all(|e| e.balls.is_some()));
    }

    #[test]
    fn same_ball_pairs_cost_one_ball() {
        let space = Arc::new(circle_snowflake(512, 1.0).unwrap());
        let cover = build_cover(space, 1.0, 2, 3).unwrap();
        let nerve = build_nerve(cover);
        // x = y
        let t = chain_distance(&nerve, &[(17, 17)]).unwrap();
        assert_eq!(t.entries[0].balls, Some(1));
        assert!((t.value(0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        // adjacent sample points lie within e^{-eps k} of the same net point
        let t = chain_distance(&nerve, &[(100, 101)]).unwrap();
        assert_eq!(t.entries[0].balls, Some(1));
    }

    #[test]
    fn symmetry_and_triangle_exact() {
        let space = Arc::new(circle_snowflake(1024, 0.5).unwrap());
        let cover = build_cover(space, 0.5, 3, 5).unwrap();
        let nerve = build_nerve(cover);
        let probes = [(0usize, 700usize, 300usize), (10, 512, 900), (33, 66, 999)];
        for &(x, y, z) in &probes {
            let t = chain_distance(&nerve, &[(x, y), (y, x), (y, z), (x, z)]).unwrap();
            let xy = t.entries[0].balls.unwrap();
            let yx = t.entries[1].balls.unwrap();
            let yz = t.entries[2].balls.unwrap();
            let xz = t.entries[3].balls.unwrap();
            assert_eq!(xy, yx, "chain length must be symmetric");
            assert!(xz <= xy + yz, "triangle fails: {xz} > {xy} + {yz}");
        }
    }

    #[test]
    fn degree_bound_stable_across_k() {
        // the overlap bound is k-independent: fitted once per (space, eps)
        let space = Arc::new(circle_snowflake(4096, 1.0).unwrap());
        let mut degrees = Vec::new();
        for k in 1..=6 {
            let nerve = build_nerve(build_cover(space.clone(), 1.0, k, 2).unwrap());
            degrees.push(nerve.max_degree);
        }
        let dmax = *degrees.iter().max().unwrap();
        let dmin = *degrees.iter().min().unwrap();
        assert!(
            dmax <= 3 * dmin.max(2),
            "overlap drifts with k: {degrees:?}"
        );
    }
}
