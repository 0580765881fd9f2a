//! Exact Mobius-isometry models of the hyperbolic plane and 3-space:
//! orbit growth and entropy, boundary actions on the circle/sphere with
//! chordal cross-ratios, limit sets, triple separation, conformal-elevator
//! certificates, and rough-isometry defect estimation.

mod boundary;
mod elevator;
mod mobius;
mod model;
mod orbit;
mod presets;
mod rough;

pub use boundary::{
    boundary_action, limit_set_sample, separate_triple, BoundaryActionReport, LimitSetSample,
    SeparationSearch,
};
pub use elevator::{conformal_elevator, ElevatorCertificate};
pub use mobius::MobiusIsometry;
pub use model::{BoundaryPoint, GroupActionModel, ModelKind, Point};
pub use orbit::{entropy, orbit_ball, orbit_ball_with_margin, orbit_ray_space, EntropyEstimate, OrbitBall};
pub use presets::{
    cyclic, cyclic_h3, octagon_surface_group, parse_group_spec, psl2z, schottky,
    schottky_limit_set_refined, triangle_237, SchottkyParams,
};
pub use rough::{rough_equivariance_defect, rough_isometry_defect, RoughIsometryReport};
