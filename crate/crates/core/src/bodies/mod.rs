//! Convex bodies and gauges.

pub mod gauge;
pub mod polytope;
pub mod smooth;

pub use gauge::{
    anisotropic_perimeter, moment_body_support, BallSupport, GaugeBody, GaugeKind, MomentBody, SupportFunction,
};
pub use polytope::{cube, regular_fan_2d, regular_polygon, wulff_shape, Facet, PerturbationField, PolytopeBody};
pub use smooth::{Principal, SmoothBody};
