//! Chain metrics on ball covers: k-ball covers, nerve graphs, chain
//! distances `d_k`, and de-snowflake reports comparing `d_k` against
//! `d^{1/eps}` over a window of scales.

mod cover;
mod desnowflake;
mod nerve;

pub use cover::{build_cover, KBallCover};
pub use desnowflake::{
    desnowflake, iteration_lemma_check, DesnowflakeReport, IterationLemmaReport, PairTrace,
};
pub use nerve::{build_nerve, chain_distance, ChainDistanceTable, ChainEntry, NerveGraph};

/// k is admitted only while `e^{-eps k}` stays at least this multiple of the
/// sample mesh; below that, chain distances reflect the sample, not the space.
pub const MESH_GUARD_FACTOR: f64 = 3.0;

/// Pairs closer than this multiple of the mesh are excluded from
/// de-snowflake bands: both `d_k` and `d^{1/eps}` are unresolved there.
pub const PAIR_MESH_FACTOR: f64 = 10.0;

/// Largest admissible k for a given sample: `e^{-eps k} >= 3 * mesh`.
pub fn resolved_kmax(eps: f64, mesh_norm: f64) -> Option<u32> {
    if mesh_norm <= 0.0 {
        return Some(u32::MAX);
    }
    let bound = -(MESH_GUARD_FACTOR * mesh_norm).ln() / eps;
    if bound < 0.0 {
        None
    } else {
        Some(bound.floor() as u32)
    }
}
