//! Finite metric spaces, cross-ratio calculus, snowflake transforms,
//! distortion estimation, separated nets, and Ahlfors-regularity fitting.

mod distortion;
mod net;
mod path;
mod space;

pub use distortion::{bilipschitz_distortion, qm_distortion, DistortionReport};
pub use net::{ahlfors_fit, max_separated_net, Net, RegularityFit};
pub use path::{min_delta_path, min_delta_paths_from, PathLength};
pub use space::{cross_ratio, snowflake, FiniteMetricSpace, Quadruple, Validation};

#[cfg(test)]
pub(crate) fn greedy_net_for_tests(
    space: &FiniteMetricSpace,
    sep: f64,
    order: &[usize],
) -> Vec<usize> {
    net::greedy_net(space, sep, order)
}
