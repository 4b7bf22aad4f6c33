//! Anisotropic fractional perimeters of convex bodies in the plane and in
//! space: three routes to the perimeter, the associated area measure on
//! facet normals, limit diagnostics, a Minkowski-problem solver and an
//! isoperimetric search.
//!
//! Points and directions are `Vec3`; planar data carries a zero third
//! coordinate.

pub mod bodies;
pub mod error;
pub mod fracperim;
pub mod limits;
pub mod measures;
pub mod minkowski;
pub mod numeric;
pub mod presets;
pub mod quadrature;
pub mod schema;

pub type Vec3 = nalgebra::Vector3<f64>;

pub use bodies::{GaugeBody, PerturbationField, PolytopeBody, SmoothBody};
pub use error::{GeoError, Result};
pub use measures::AtomicSphericalMeasure;
pub use quadrature::{BoundaryQuadrature, QuadratureRule, RandomSource};

/// Runs `f` on a rayon pool capped at `threads` workers (0 keeps the default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
