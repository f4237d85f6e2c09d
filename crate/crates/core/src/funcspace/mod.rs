//! Driving functions on the line and their one-dimensional function-space
//! quantities: BMO and VMO oscillation, Besov seminorms, Muckenhoupt and
//! doubling constants of weights, truncation and mollification.

mod besov;
mod intervals;
mod ops;
mod sampled;

pub use besov::{besov_norm, neighborhood_distance, BesovEstimate, NeighborhoodDistance, NormConstants, DIVERGENCE_GROWTH};
pub(crate) use besov::{abs_pow, check_exponent, classify};
pub use intervals::{
    a2_constant, a_infty_constant, bmo_norm, doubling_constant, exp_oscillation, vmo_profile, Interval,
    IntervalFamily,
};
pub use ops::{bump, mollify, truncate, BUMP_NORMALIZER};
pub use sampled::{ExtensionPolicy, Handle, SampledFunction};
