//! The discrete length-volume inequality for covers of the unit cube:
//! chain distances between opposite faces, the chain-count witness map,
//! fuzzing campaigns, and the sphere-side geometry (stereographic
//! projection and topological cubes between caps).

mod boxes;
mod chains;
mod cover;
mod fuzz;
mod sphere;

pub use boxes::Boxn;
pub use chains::{
    chain_count_map, check_length_volume, face_chain_distance, ChainCountMap, FaceChainResult,
    LengthVolumeResult,
};
pub use cover::CubeCover;
pub use fuzz::{fuzz_length_volume, grid_cover, random_cover, slab_cover, FuzzReport, InstanceResult};
pub use sphere::{
    cube_in_sphere, inverse_stereographic, stereographic, Cap, SphereConfig, SphericalCube,
};
