//! Integration rules on the sphere, on polytope boundaries and inside
//! bodies, plus the seeded random source used by every Monte-Carlo path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::PolytopeBody;
use crate::error::{GeoError, Result};
use crate::Vec3;

/// Nodes and positive weights on `S^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    /// Resolution the rule was built with.
    pub resolution: usize,
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(u)).collect();
        crate::numeric::pairwise_sum(&terms)
    }
}

/// Sphere rule. In the plane: midpoint rule on `resolution` equal arcs. In
/// space: `resolution` Fibonacci spiral nodes united with their antipodes,
/// each of weight `2π/resolution`.
///
/// Panics if `resolution < 4`.
pub fn sphere_rule(dim: usize, resolution: usize) -> QuadratureRule {
    assert!(resolution >= 4, "sphere rule resolution must be at least 4");
    match dim {
        2 => {
            let h = std::f64::consts::TAU / resolution as f64;
            let nodes = (0..resolution)
                .map(|k| {
                    let t = (k as f64 + 0.5) * h;
                    Vec3::new(t.cos(), t.sin(), 0.0)
                })
                .collect();
            QuadratureRule { dim, resolution, nodes, weights: vec![h; resolution] }
        }
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let n = resolution as f64;
            let mut nodes = Vec::with_capacity(2 * resolution);
            for k in 0..resolution {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / n;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * k as f64;
                nodes.push(Vec3::new(r * phi.cos(), r * phi.sin(), z));
            }
            let mirrored: Vec<Vec3> = nodes.iter().map(|u| -u).collect();
            nodes.extend(mirrored);
            let w = std::f64::consts::TAU / n;
            QuadratureRule { dim, resolution, weights: vec![w; nodes.len()], nodes }
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// The open hemisphere `{u : u·pole > 0}` covered by the same cells a full
/// rule of this resolution would use, rotated so that no cell straddles the
/// equator: half of the midpoint arcs in the plane, and in space the
/// northern half of a Fibonacci spiral whose axis is `pole`.
pub fn hemisphere_rule(dim: usize, resolution: usize, pole: &Vec3) -> QuadratureRule {
    let half = (resolution / 2).max(1);
    if dim == 2 {
        let t = crate::numeric::perp2(pole);
        let h = std::f64::consts::PI / half as f64;
        let nodes = (0..half)
            .map(|k| {
                let phi = -std::f64::consts::FRAC_PI_2 + (k as f64 + 0.5) * h;
                pole * phi.cos() + t * phi.sin()
            })
            .collect();
        return QuadratureRule { dim, resolution, nodes, weights: vec![h; half] };
    }
    let (e1, e2) = crate::numeric::orthonormal_complement(pole);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    // a full spatial rule of this resolution has 2·resolution nodes
    let count = resolution.max(1);
    let n = (2 * count) as f64;
    let nodes: Vec<Vec3> = (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            e1 * (r * phi.cos()) + e2 * (r * phi.sin()) + pole * z
        })
        .collect();
    let w = 4.0 * std::f64::consts::PI / n;
    QuadratureRule { dim, resolution, weights: vec![w; nodes.len()], nodes }
}

/// Midpoint rule on the unit circle of the plane spanned by `e1, e2`.
pub fn circle_rule(e1: &Vec3, e2: &Vec3, resolution: usize) -> QuadratureRule {
    let h = std::f64::consts::TAU / resolution as f64;
    let nodes = (0..resolution)
        .map(|k| {
            let t = (k as f64 + 0.5) * h;
            e1 * t.cos() + e2 * t.sin()
        })
        .collect();
    QuadratureRule { dim: 3, resolution, nodes, weights: vec![h; resolution] }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub z: Vec3,
    pub normal: Vec3,
    pub weight: f64,
    pub facet: usize,
}

/// Weighted sample points on the facets of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub samples: Vec<BoundarySample>,
}

impl BoundaryQuadrature {
    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }
}

/// Uniform facet grids: edge midpoints in the plane; in space, each facet is
/// fan-triangulated and every triangle split into `m²` congruent pieces
/// sampled at their centroids, with `m` chosen so a facet gets roughly
/// `per_facet` points.
pub fn boundary_rule(body: &PolytopeBody, per_facet: usize) -> BoundaryQuadrature {
    let per_facet = per_facet.max(1);
    if body.dim() == 2 {
        return edge_rule(body, per_facet);
    }
    let mut samples = Vec::new();
    for (i, f) in body.facets().iter().enumerate() {
        if !f.is_active() {
            continue;
        }
        let normal = body.normals()[i];
        let p0 = f.polygon[0];
        let tris = f.polygon.len() - 2;
        let m = ((per_facet as f64 / tris as f64).sqrt().round() as usize).max(1);
        for w in f.polygon[1..].windows(2) {
            let (a, b, c) = (p0, w[0], w[1]);
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if area <= 0.0 {
                continue;
            }
            let weight = area / (m * m) as f64;
            let (db, dc) = ((b - a) / m as f64, (c - a) / m as f64);
            for r in 0..m {
                for q in 0..(m - r) {
                    // upright piece
                    let base = a + db * r as f64 + dc * q as f64;
                    samples.push(BoundarySample { z: base + (db + dc) / 3.0, normal, weight, facet: i });
                    // inverted piece
                    if q + r + 1 < m {
                        samples.push(BoundarySample { z: base + (db + dc) * (2.0 / 3.0), normal, weight, facet: i });
                    }
                }
            }
        }
    }
    BoundaryQuadrature { samples }
}

/// Like [`boundary_rule`], but in the plane the edge points cluster toward
/// both endpoints through `u -> (2u)^p / 2` (mirrored on the second half),
/// which resolves the integrable endpoint singularity of boundary integrands.
/// The weights integrate the graded map exactly for integer `p`, so they sum
/// to the perimeter. Spatial bodies fall back to the uniform rule.
pub fn boundary_rule_graded(body: &PolytopeBody, per_facet: usize, exponent: f64) -> BoundaryQuadrature {
    if body.dim() != 2 || exponent <= 1.0 {
        return boundary_rule(body, per_facet);
    }
    // Gauss–Legendre in u on each half edge, at distance (2u)^p ℓ/2 from the
    // nearer vertex; for integer p the d^{-s} vertex singularity becomes a
    // power series in u.
    let half = per_facet.div_ceil(2).max(1);
    let order = half.clamp(2, 8);
    let nodes = crate::numeric::composite_gauss_legendre(0.0, 0.5, half.div_ceil(order), order);
    let mut samples = Vec::with_capacity(2 * nodes.len() * body.facets().len());
    for (i, f) in body.facets().iter().enumerate() {
        if !f.is_active() {
            continue;
        }
        let (a, b) = (f.polygon[0], f.polygon[1]);
        let normal = body.normals()[i];
        for (end, other) in [(a, b), (b, a)] {
            for &(u, w) in &nodes {
                let t = 0.5 * (2.0 * u).powf(exponent);
                let dt = exponent * (2.0 * u).powf(exponent - 1.0);
                samples.push(BoundarySample { z: end + (other - end) * t, normal, weight: f.area * dt * w, facet: i });
            }
        }
    }
    BoundaryQuadrature { samples }
}

fn edge_rule(body: &PolytopeBody, m: usize) -> BoundaryQuadrature {
    let mut samples = Vec::with_capacity(m * body.facets().len());
    for (i, f) in body.facets().iter().enumerate() {
        if !f.is_active() {
            continue;
        }
        let (a, b) = (f.polygon[0], f.polygon[1]);
        let normal = body.normals()[i];
        for k in 0..m {
            let mid = (k as f64 + 0.5) / m as f64;
            samples.push(BoundarySample { z: a + (b - a) * mid, normal, weight: f.area / m as f64, facet: i });
        }
    }
    BoundaryQuadrature { samples }
}

/// Seed plus stream id for a ChaCha8 generator. The `mirrored` flag makes
/// samplers emit point reflections of their usual draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
    pub mirrored: bool,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0, mirrored: false }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn mirror(self) -> Self {
        Self { mirrored: !self.mirrored, ..self }
    }

    /// Independent sub-source for work chunk `k`.
    pub fn child(&self, k: u64) -> Self {
        Self { stream: self.stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k + 1), ..*self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }

    fn sign(&self) -> f64 {
        if self.mirrored {
            -1.0
        } else {
            1.0
        }
    }
}

/// Uniform direction on `S^{n-1}`, reflected when the source is mirrored.
pub fn random_direction(dim: usize, rng: &mut ChaCha8Rng, src: &RandomSource) -> Vec3 {
    let u = if dim == 2 {
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        Vec3::new(t.cos(), t.sin(), 0.0)
    } else {
        let z = 2.0 * rng.gen::<f64>() - 1.0;
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        let r = (1.0 - z * z).max(0.0).sqrt();
        Vec3::new(r * t.cos(), r * t.sin(), z)
    };
    u * src.sign()
}

/// One uniform point of `body` by bounding-box rejection; returns the point
/// and the number of proposals used.
pub fn random_interior_point(body: &PolytopeBody, rng: &mut ChaCha8Rng, src: &RandomSource) -> (Vec3, usize) {
    let s = src.sign();
    let (lo, hi) = body.bounding_box();
    // draw in the box of s·K so mirrored sources reflect the draws exactly
    let (blo, bhi) = if s > 0.0 { (lo, hi) } else { (-hi, -lo) };
    let mut tries = 0;
    loop {
        tries += 1;
        let mut p = Vec3::zeros();
        for k in 0..body.dim() {
            p[k] = blo[k] + (bhi[k] - blo[k]) * rng.gen::<f64>();
        }
        let x = p * s;
        if body.contains(&x, 0.0) {
            return (x, tries);
        }
        if tries > 10_000_000 {
            return (x, usize::MAX);
        }
    }
}

/// Uniform samples inside `body` with the observed acceptance rate.
pub fn sample_interior(body: &PolytopeBody, n: usize, src: &RandomSource) -> Result<(Vec<Vec3>, f64)> {
    let mut rng = src.rng();
    let mut pts = Vec::with_capacity(n);
    let mut tries = 0usize;
    for _ in 0..n {
        let (x, t) = random_interior_point(body, &mut rng, src);
        if t == usize::MAX {
            return Err(GeoError::DegenerateBody(0.0));
        }
        tries += t;
        pts.push(x);
    }
    let rate = if tries == 0 { 1.0 } else { n as f64 / tries as f64 };
    if rate < 1e-4 {
        return Err(GeoError::DegenerateBody(rate));
    }
    Ok((pts, rate))
}
