//! Face-to-face chain distances, the length-volume inequality, and the
//! chain-count witness map.

use std::collections::VecDeque;

use serde::Serialize;

use crate::cube::CubeCover;
use crate::error::{Error, Result};

/// Shortest chain of sets connecting the two opposite faces along an axis.
#[derive(Debug, Clone, Serialize)]
pub struct FaceChainResult {
    pub axis: usize,
    /// Number of sets in the chain (nodes, not hops).
    pub d: usize,
    /// Witness: set indices from the F-face to the G-face; consecutive
    /// sets intersect.
    pub witness: Vec<usize>,
}

/// BFS over the nerve from the sets meeting `F_axis = {x_axis = 0}` to the
/// sets meeting `G_axis = {x_axis = 1}`.
pub fn face_chain_distance(cover: &CubeCover, axis: usize) -> Result<FaceChainResult> {
    if axis >= cover.n {
        return Err(Error::parameter(format!(
            "axis {axis} out of range for dimension {}",
            cover.n
        )));
    }
    let adj = cover.nerve();
    face_chain_on_nerve(cover, &adj, axis)
}

fn face_chain_on_nerve(
    cover: &CubeCover,
    adj: &[Vec<u32>],
    axis: usize,
) -> Result<FaceChainResult> {
    let n = cover.set_count();
    let mut level: Vec<u32> = vec![0; n];
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if cover.set_meets_face(s, axis, 0.0) {
            level[s] = 1;
            queue.push_back(s);
        }
    }
    let finish = |s: usize, level: &[u32], parent: &[usize]| -> FaceChainResult {
        let mut witness = vec![s];
        let mut cur = s;
        while parent[cur] != usize::MAX {
            cur = parent[cur];
            witness.push(cur);
        }
        witness.reverse();
        FaceChainResult {
            axis,
            d: level[s] as usize,
            witness,
        }
    };
    // a single set can meet both faces
    for s in 0..n {
        if level[s] == 1 && cover.set_meets_face(s, axis, 1.0) {
            return Ok(finish(s, &level, &parent));
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            let v = v as usize;
            if level[v] == 0 {
                level[v] = level[u] + 1;
                parent[v] = u;
                if cover.set_meets_face(v, axis, 1.0) {
                    return Ok(finish(v, &level, &parent));
                }
                queue.push_back(v);
            }
        }
    }
    Err(Error::Resolution(format!(
        "no chain connects the opposite faces along axis {axis}; a true \
         cover always connects them, so the membership grid is too coarse"
    )))
}

/// The discrete length-volume check: `N >= d_1 d_2 ... d_n`.
#[derive(Debug, Clone, Serialize)]
pub struct LengthVolumeResult {
    pub n_sets: usize,
    pub d: Vec<usize>,
    pub product: u128,
    pub holds: bool,
}

pub fn check_length_volume(cover: &CubeCover) -> Result<LengthVolumeResult> {
    let adj = cover.nerve();
    let mut d = Vec::with_capacity(cover.n);
    for axis in 0..cover.n {
        d.push(face_chain_on_nerve(cover, &adj, axis)?.d);
    }
    let product: u128 = d.iter().map(|&x| x as u128).product();
    Ok(LengthVolumeResult {
        n_sets: cover.set_count(),
        d,
        product,
        holds: cover.set_count() as u128 >= product,
    })
}

/// The chain-count map from the proof of the inequality: per surviving
/// set, the smallest number of sets in a chain from each face to that
/// set's private witness point.
#[derive(Debug, Clone, Serialize)]
pub struct ChainCountMap {
    /// Sets kept after the redundancy reduction (original indices).
    pub kept: Vec<usize>,
    /// Sets dropped because no grid cell was theirs alone.
    pub dropped: Vec<usize>,
    /// One interior witness point per kept set (center of a uniquely
    /// covered grid cell).
    pub witnesses: Vec<Vec<f64>>,
    /// `f0[s][axis]` for kept sets, in `kept` order.
    pub f0: Vec<Vec<usize>>,
    /// Face-to-face distances of the reduced cover.
    pub d: Vec<usize>,
}

/// Compute witness points and the chain-count map, performing the proof's
/// redundancy reduction (drop sets with no uniquely-covered cell) first.
pub fn chain_count_map(cover: &CubeCover) -> Result<ChainCountMap> {
    // iterate the reduction: dropping a set can make another redundant
    let mut kept: Vec<usize> = (0..cover.set_count()).collect();
    let mut dropped: Vec<usize> = Vec::new();
    let mut current = cover.clone();
    loop {
        let owner = current.grid_unique_owner();
        let mut has_witness = vec![false; current.set_count()];
        for o in owner.iter().flatten() {
            has_witness[*o as usize] = true;
        }
        match has_witness.iter().position(|&h| !h) {
            Some(local) => {
                dropped.push(kept.remove(local));
                let mut sets = current.sets.clone();
                sets.remove(local);
                current = CubeCover::new(current.n, sets, current.grid_res)?;
            }
            None => break,
        }
    }

    let owner = current.grid_unique_owner();
    let mut witnesses: Vec<Vec<f64>> = vec![Vec::new(); current.set_count()];
    for (cell, o) in owner.iter().enumerate() {
        if let Some(s) = o {
            if witnesses[*s as usize].is_empty() {
                witnesses[*s as usize] = current.cell_center(cell);
            }
        }
    }

    // f0 per axis: BFS levels from the face-meeting sets
    let adj = current.nerve();
    let m = current.set_count();
    let mut f0 = vec![vec![0usize; current.n]; m];
    let mut d = Vec::with_capacity(current.n);
    for axis in 0..current.n {
        let mut level: Vec<u32> = vec![0; m];
        let mut queue = VecDeque::new();
        for s in 0..m {
            if current.set_meets_face(s, axis, 0.0) {
                level[s] = 1;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let v = v as usize;
                if level[v] == 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(s) = (0..m).find(|&s| level[s] == 0) {
            return Err(Error::Resolution(format!(
                "set {s} unreachable from face {axis}; grid too coarse"
            )));
        }
        for s in 0..m {
            f0[s][axis] = level[s] as usize;
        }
        d.push(face_chain_on_nerve(&current, &adj, axis)?.d);
    }

    // the proof's two claims, as exact integer assertions
    for s in 0..m {
        for axis in 0..current.n {
            if current.set_meets_face(s, axis, 0.0) && f0[s][axis] != 1 {
                return Err(Error::Invariant(format!(
                    "set {s} meets face F_{axis} but has count {}",
                    f0[s][axis]
                )));
            }
            if current.set_meets_face(s, axis, 1.0) && f0[s][axis] < d[axis] {
                return Err(Error::Invariant(format!(
                    "set {s} meets face G_{axis} with count {} < d_{axis} = {}",
                    f0[s][axis], d[axis]
                )));
            }
        }
    }

    Ok(ChainCountMap {
        kept,
        dropped,
        witnesses,
        f0,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{grid_cover, slab_cover, Boxn};

    #[test]
    fn single_set_cover() {
        let b = Boxn::new(vec![-0.1, -0.1], vec![1.1, 1.1]);
        let cover = CubeCover::new(2, vec![vec![b]], 64).unwrap();
        for axis in 0..2 {
            assert_eq!(face_chain_distance(&cover, axis).unwrap().d, 1);
        }
        let lv = check_length_volume(&cover).unwrap();
        assert!(lv.holds);
        assert_eq!(lv.product, 1);
        let ccm = chain_count_map(&cover).unwrap();
        assert_eq!(ccm.f0, vec![vec![1, 1]]);
    }

    #[test]
    fn grid_cover_distances_and_equality() {
        for m in [2usize, 3, 5, 8] {
            let cover = grid_cover(2, m, 1e-6, 256).unwrap();
            let lv = check_length_volume(&cover).unwrap();
            assert_eq!(lv.d, vec![m, m], "m = {m}");
            assert_eq!(lv.n_sets as u128, lv.product, "grid is tight");
            assert!(lv.holds);
        }
    }

    #[test]
    fn grid_witness_counts_are_columns() {
        let m = 4usize;
        let cover = grid_cover(2, m, 1e-6, 128).unwrap();
        let ccm = chain_count_map(&cover).unwrap();
        assert!(ccm.dropped.is_empty());
        // set index (i, j) -> i m + j in the generator; f0 along axis 0 is
        // the column number i + 1
        for (pos, &orig) in ccm.kept.iter().enumerate() {
            let col = orig % m; // axis-0 index varies fastest in the generator
            assert_eq!(ccm.f0[pos][0], col + 1, "set {orig}");
        }
    }

    #[test]
    fn two_slabs() {
        let cover = slab_cover(0.6, 0.4, 128).unwrap();
        let lv = check_length_volume(&cover).unwrap();
        assert_eq!(lv.d, vec![2, 1]);
        assert!(lv.holds);
        let ccm = chain_count_map(&cover).unwrap();
        assert_eq!(ccm.f0.iter().map(|f| f[0]).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn adding_sets_never_increases_chain_distance() {
        let cover = grid_cover(2, 5, 1e-6, 256).unwrap();
        let before = check_length_volume(&cover).unwrap();
        let mut sets = cover.sets.clone();
        // add a big set crossing several columns
        sets.push(vec![Boxn::new(vec![0.1, 0.4], vec![0.9, 0.6])]);
        let bigger = CubeCover::new(2, sets, cover.grid_res).unwrap();
        let after = check_length_volume(&bigger).unwrap();
        for axis in 0..2 {
            assert!(after.d[axis] <= before.d[axis]);
        }
    }

    #[test]
    fn redundant_set_is_reduced() {
        let m = 3usize;
        let base = grid_cover(2, m, 1e-6, 128).unwrap();
        let mut sets = base.sets.clone();
        // a set strictly inside cell (1,1): covered wherever its cells are,
        // and every one of its cells is also covered by the grid cell box
        sets.push(vec![Boxn::new(vec![0.4, 0.4], vec![0.55, 0.55])]);
        let cover = CubeCover::new(2, sets, 128).unwrap();
        let ccm = chain_count_map(&cover).unwrap();
        assert_eq!(ccm.dropped, vec![m * m], "the added set is redundant");
        assert_eq!(ccm.kept.len(), m * m);
    }
}
