//! Convex polytopes in H-representation `{x : x·v_i <= h_i}` with eagerly
//! derived vertices and facet polygons.
//!
//! Facets stay index-aligned with the input normal fan: a normal whose
//! half-space does not touch the body in an (n-1)-dimensional face keeps its
//! slot with zero area.

use crate::error::{GeoError, Result};
use crate::numeric::{orthonormal_complement, perp2};
use crate::Vec3;

/// Tolerance used when checking that a point lies in the body.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// One facet slot of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// (n-1)-dimensional area; zero for inactive normals.
    pub area: f64,
    /// Vertices of the facet, counter-clockwise around the outward normal.
    /// In the plane this is the pair (start, end) of the edge.
    pub polygon: Vec<Vec3>,
}

impl Facet {
    pub fn is_active(&self) -> bool {
        self.area > 0.0
    }

    pub fn centroid(&self) -> Option<Vec3> {
        match self.polygon.len() {
            0 => None,
            1 | 2 => Some(self.polygon.iter().sum::<Vec3>() / self.polygon.len() as f64),
            _ => {
                // area-weighted centroid of a fan triangulation
                let p0 = self.polygon[0];
                let mut acc = Vec3::zeros();
                let mut total = 0.0;
                for w in self.polygon[1..].windows(2) {
                    let a = (w[0] - p0).cross(&(w[1] - p0)).norm();
                    acc += a * (p0 + w[0] + w[1]) / 3.0;
                    total += a;
                }
                if total > 0.0 {
                    Some(acc / total)
                } else {
                    Some(self.polygon.iter().sum::<Vec3>() / self.polygon.len() as f64)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeBody {
    dim: usize,
    normals: Vec<Vec3>,
    support: Vec<f64>,
    vertices: Vec<Vec3>,
    facets: Vec<Facet>,
    origin_interior: bool,
    volume: f64,
}

/// Builds the Wulff shape `[h] = {x : x·v_i <= h_i for all i}`.
///
/// Points are stored as `Vec3`; planar bodies use a zero third coordinate.
pub fn wulff_shape(dim: usize, normals: &[Vec3], support: &[f64]) -> Result<PolytopeBody> {
    if dim != 2 && dim != 3 {
        return Err(GeoError::Invalid(format!("dimension must be 2 or 3, got {dim}")));
    }
    if normals.len() != support.len() {
        return Err(GeoError::Invalid(format!(
            "{} normals but {} support values",
            normals.len(),
            support.len()
        )));
    }
    if normals.len() < dim + 1 {
        return Err(GeoError::Unbounded(dim));
    }
    for (i, v) in normals.iter().enumerate() {
        if (v.norm() - 1.0).abs() > 1e-12 || (dim == 2 && v.z != 0.0) {
            return Err(GeoError::Invalid(format!("normal {i} is not a unit vector in R^{dim}")));
        }
    }
    if let Some(i) = support.iter().position(|h| !h.is_finite()) {
        return Err(GeoError::Invalid(format!("support value {i} is not finite")));
    }
    if !positively_spanning(dim, normals) {
        return Err(GeoError::Unbounded(dim));
    }

    let hmax = support.iter().fold(0.0f64, |m, h| m.max(h.abs())).max(1e-300);
    let eps = 1e-11 * hmax;
    let facets: Vec<Facet> = if dim == 2 {
        (0..normals.len()).map(|i| facet_2d(i, normals, support, eps)).collect()
    } else {
        facets_3d(normals, support, eps)
    };

    let mut vertices: Vec<Vec3> = Vec::new();
    for f in facets.iter().filter(|f| f.is_active()) {
        for p in &f.polygon {
            if !vertices.iter().any(|q| (q - p).norm() <= 1e-9 * hmax) {
                vertices.push(*p);
            }
        }
    }
    if vertices.len() < dim + 1 {
        return Err(GeoError::Empty);
    }
    if dim == 2 {
        let c = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
        vertices.sort_by(|a, b| {
            let ta = (a.y - c.y).atan2(a.x - c.x);
            let tb = (b.y - c.y).atan2(b.x - c.x);
            ta.total_cmp(&tb)
        });
    }
    let volume = if dim == 2 { shoelace(&vertices) } else { tetra_volume(&facets) };
    let extent = vertices.iter().fold(0.0f64, |m, p| m.max(p.norm())).max(hmax);
    if !(volume > 1e-13 * extent.powi(dim as i32)) {
        return Err(GeoError::Empty);
    }
    Ok(PolytopeBody {
        dim,
        normals: normals.to_vec(),
        support: support.to_vec(),
        origin_interior: support.iter().all(|&h| h > 0.0),
        vertices,
        facets,
        volume,
    })
}

/// Whether every direction has positive inner product with some normal,
/// i.e. the recession cone `{d : d·v_i <= 0}` is trivial.
fn positively_spanning(dim: usize, normals: &[Vec3]) -> bool {
    let tol = 1e-12;
    let covered = |d: &Vec3| normals.iter().any(|v| v.dot(d) > tol);
    if dim == 2 {
        let mut angles: Vec<f64> = normals.iter().map(|v| v.y.atan2(v.x)).collect();
        angles.sort_by(f64::total_cmp);
        let mut gaps: Vec<f64> = angles.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.push(angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1]);
        return gaps.iter().all(|&g| g < std::f64::consts::PI - 1e-12);
    }
    // An extreme ray of a nontrivial polyhedral cone in R^3 is cut out by two
    // tight constraints, so it is parallel to some v_i x v_j.
    for i in 0..normals.len() {
        for j in (i + 1)..normals.len() {
            let d = normals[i].cross(&normals[j]);
            let len = d.norm();
            if len < 1e-12 {
                continue;
            }
            let d = d / len;
            if !covered(&d) || !covered(&-d) {
                return false;
            }
        }
    }
    true
}

/// Edge of a planar polytope on the line `x·v_i = h_i`, as an interval of the
/// counter-clockwise tangent parameter.
fn facet_2d(i: usize, normals: &[Vec3], support: &[f64], eps: f64) -> Facet {
    let v = normals[i];
    let p0 = v * support[i];
    let t = perp2(&v);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (j, (w, &hj)) in normals.iter().zip(support).enumerate() {
        if j == i {
            continue;
        }
        let a = t.dot(w);
        let b = hj - p0.dot(w);
        if a.abs() <= 1e-14 {
            if parallel_excludes(i, j, v.dot(w), b, eps) {
                return Facet { area: 0.0, polygon: Vec::new() };
            }
        } else if a > 0.0 {
            hi = hi.min(b / a);
        } else {
            lo = lo.max(b / a);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) || hi - lo < -eps {
        return Facet { area: 0.0, polygon: Vec::new() };
    }
    let len = (hi - lo).max(0.0);
    if len <= eps {
        let p = p0 + t * (0.5 * (lo + hi));
        return Facet { area: 0.0, polygon: vec![p] };
    }
    Facet { area: len, polygon: vec![p0 + t * lo, p0 + t * hi] }
}

/// Parallel constraint `j` against facet `i`: same direction with smaller
/// support (or a tie won by the earlier index) hides facet `i`; the opposite
/// direction empties it when the slab is inverted.
fn parallel_excludes(i: usize, j: usize, cos: f64, slack: f64, eps: f64) -> bool {
    if cos > 0.0 {
        slack < -eps || (slack.abs() <= eps && j < i)
    } else {
        slack < -eps
    }
}

type Line2 = ([f64; 2], f64);

fn solve2(a: &Line2, b: &Line2) -> Option<[f64; 2]> {
    let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        (a.1 * b.0[1] - b.1 * a.0[1]) / det,
        (a.0[0] * b.1 - b.0[0] * a.1) / det,
    ])
}

/// Clips a convex polygon (vertex k followed by the line label of edge k→k+1)
/// against `c·p <= d` carrying label `label`.
fn clip_polygon(poly: &[([f64; 2], usize)], c: [f64; 2], d: f64, label: usize, tol: f64) -> Vec<([f64; 2], usize)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for k in 0..n {
        let (p, lab) = poly[k];
        let (q, _) = poly[(k + 1) % n];
        let dp = c[0] * p[0] + c[1] * p[1] - d;
        let dq = c[0] * q[0] + c[1] * q[1] - d;
        let cut = |dp: f64, dq: f64| {
            let t = dp / (dp - dq);
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        };
        if dp <= tol {
            out.push((p, lab));
            if dq > tol {
                out.push((cut(dp, dq), label));
            }
        } else if dq <= tol {
            out.push((cut(dp, dq), lab));
        }
    }
    out
}

fn facets_3d(normals: &[Vec3], support: &[f64], eps: f64) -> Vec<Facet> {
    let hmax = support.iter().fold(0.0f64, |m, h| m.max(h.abs())).max(1e-300);
    let mut bound = 8.0 * hmax;
    loop {
        let mut touched = false;
        let facets: Vec<Facet> = (0..normals.len())
            .map(|i| {
                let (f, t) = facet_3d(i, normals, support, eps, bound);
                touched |= t;
                f
            })
            .collect();
        if !touched || bound > 1e12 * hmax {
            return facets;
        }
        bound *= 16.0;
    }
}

/// Facet polygon in the plane `x·v_i = h_i`, clipped from a square of half
/// side `bound`. Returns whether the result still touches that square.
fn facet_3d(i: usize, normals: &[Vec3], support: &[f64], eps: f64, bound: f64) -> (Facet, bool) {
    let v = normals[i];
    let (e1, e2) = orthonormal_complement(&v);
    let p0 = v * support[i];
    let n = normals.len();
    // labels n..n+4 are the bounding square sides
    let mut lines: Vec<Line2> = vec![([0.0, 0.0], 0.0); n + 4];
    lines[n] = ([1.0, 0.0], bound);
    lines[n + 1] = ([0.0, 1.0], bound);
    lines[n + 2] = ([-1.0, 0.0], bound);
    lines[n + 3] = ([0.0, -1.0], bound);
    let mut poly = vec![
        ([bound, -bound], n),
        ([bound, bound], n + 1),
        ([-bound, bound], n + 2),
        ([-bound, -bound], n + 3),
    ];
    for (j, (w, &hj)) in normals.iter().zip(support).enumerate() {
        if j == i {
            continue;
        }
        let c = [e1.dot(w), e2.dot(w)];
        let d = hj - p0.dot(w);
        if c[0].abs().max(c[1].abs()) <= 1e-14 {
            if parallel_excludes(i, j, v.dot(w), d, eps) {
                return (Facet { area: 0.0, polygon: Vec::new() }, false);
            }
            continue;
        }
        lines[j] = (c, d);
        poly = clip_polygon(&poly, c, d, j, eps);
        if poly.is_empty() {
            return (Facet { area: 0.0, polygon: Vec::new() }, false);
        }
    }
    // recompute each vertex as the intersection of its two edge lines
    let m = poly.len();
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(m);
    for k in 0..m {
        let prev = poly[(k + m - 1) % m].1;
        let cur = poly[k].1;
        let p = if prev != cur { solve2(&lines[prev], &lines[cur]).unwrap_or(poly[k].0) } else { poly[k].0 };
        pts.push(p);
    }
    let touched = pts.iter().any(|p| p[0].abs().max(p[1].abs()) >= 0.999 * bound);
    let mut uniq: Vec<[f64; 2]> = Vec::with_capacity(m);
    for p in pts {
        let dup = uniq
            .last()
            .map(|q: &[f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]) <= 1e-9 * bound.max(1.0) * 1e-3)
            .unwrap_or(false);
        if !dup {
            uniq.push(p);
        }
    }
    while uniq.len() > 1 {
        let (a, b) = (uniq[0], uniq[uniq.len() - 1]);
        if (a[0] - b[0]).hypot(a[1] - b[1]) <= 1e-12 * bound.max(1.0) {
            uniq.pop();
        } else {
            break;
        }
    }
    let mut area = 0.0;
    for k in 0..uniq.len() {
        let (a, b) = (uniq[k], uniq[(k + 1) % uniq.len()]);
        area += a[0] * b[1] - a[1] * b[0];
    }
    area *= 0.5;
    let polygon: Vec<Vec3> = uniq.iter().map(|p| p0 + e1 * p[0] + e2 * p[1]).collect();
    if uniq.len() < 3 || area <= eps * eps {
        return (Facet { area: 0.0, polygon }, false);
    }
    (Facet { area, polygon }, touched)
}

fn shoelace(sorted: &[Vec3]) -> f64 {
    let n = sorted.len();
    let mut acc = 0.0;
    for k in 0..n {
        let (a, b) = (sorted[k], sorted[(k + 1) % n]);
        acc += a.x * b.y - a.y * b.x;
    }
    0.5 * acc
}

/// Signed tetrahedra from the origin over fan triangulations of every facet.
fn tetra_volume(facets: &[Facet]) -> f64 {
    let mut acc = 0.0;
    for f in facets.iter().filter(|f| f.is_active()) {
        let p0 = f.polygon[0];
        for w in f.polygon[1..].windows(2) {
            acc += p0.dot(&w[0].cross(&w[1]));
        }
    }
    acc / 6.0
}

impl PolytopeBody {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    /// Support values as given at construction (may exceed the true support
    /// function on inactive normals).
    pub fn support_values(&self) -> &[f64] {
        &self.support
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_areas(&self) -> Vec<f64> {
        self.facets.iter().map(|f| f.area).collect()
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Perimeter (surface area) `Σ a_i`.
    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    /// Largest distance of a vertex from the origin.
    pub fn extent(&self) -> f64 {
        self.vertices.iter().fold(0.0f64, |m, p| m.max(p.norm()))
    }

    /// `h_K(v) = max_x x·v` over the vertices.
    pub fn support(&self, v: &Vec3) -> f64 {
        self.vertices.iter().map(|x| x.dot(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The true support function sampled at the fan normals.
    pub fn support_at_normals(&self) -> Vec<f64> {
        self.normals.iter().map(|v| self.support(v)).collect()
    }

    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        self.normals.iter().zip(&self.support).all(|(v, h)| x.dot(v) <= h + tol)
    }

    /// Slacks `h_i - z·v_i` of every constraint at `z`.
    pub fn slacks(&self, z: &Vec3) -> Vec<f64> {
        self.normals.iter().zip(&self.support).map(|(v, h)| h - z.dot(v)).collect()
    }

    /// Distance to the boundary along `u` given precomputed slacks.
    pub fn ray_exit(&self, slacks: &[f64], u: &Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for (v, &sl) in self.normals.iter().zip(slacks) {
            let c = u.dot(v);
            if c > 0.0 {
                let t = sl.max(0.0) / c;
                if t < best {
                    best = t;
                }
            }
        }
        best
    }

    /// Radial function `ρ_{K,z}(u) = max{t >= 0 : z + t u ∈ K}`.
    pub fn radial(&self, z: &Vec3, u: &Vec3) -> Result<f64> {
        let mut slacks = self.slacks(z);
        let floor = 1e-12 * self.extent().max(1.0);
        for (i, sl) in slacks.iter_mut().enumerate() {
            if *sl < -MEMBERSHIP_TOL {
                return Err(GeoError::PointOutside { index: i, violation: -*sl });
            }
            if *sl < floor {
                *sl = 0.0;
            }
        }
        Ok(self.ray_exit(&slacks, u))
    }

    /// X-ray function: length of `K ∩ (y + R u)`.
    pub fn xray(&self, y: &Vec3, u: &Vec3) -> f64 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (v, &h) in self.normals.iter().zip(&self.support) {
            let c = u.dot(v);
            let sl = h - y.dot(v);
            if c > 0.0 {
                hi = hi.min(sl / c);
            } else if c < 0.0 {
                lo = lo.max(sl / c);
            } else if sl < 0.0 {
                return 0.0;
            }
        }
        (hi - lo).max(0.0)
    }

    /// The body translated by `x0`.
    pub fn translated(&self, x0: &Vec3) -> PolytopeBody {
        let mut out = self.clone();
        for (h, v) in out.support.iter_mut().zip(&self.normals) {
            *h += x0.dot(v);
        }
        out.vertices.iter_mut().for_each(|p| *p += x0);
        for f in out.facets.iter_mut() {
            f.polygon.iter_mut().for_each(|p| *p += x0);
        }
        out.origin_interior = out.support.iter().all(|&h| h > 0.0);
        out
    }

    /// The body dilated by `lambda > 0` about the origin.
    pub fn scaled(&self, lambda: f64) -> PolytopeBody {
        assert!(lambda > 0.0, "dilation factor must be positive");
        let mut out = self.clone();
        out.support.iter_mut().for_each(|h| *h *= lambda);
        out.vertices.iter_mut().for_each(|p| *p *= lambda);
        for f in out.facets.iter_mut() {
            f.area *= lambda.powi(self.dim as i32 - 1);
            f.polygon.iter_mut().for_each(|p| *p *= lambda);
        }
        out.volume *= lambda.powi(self.dim as i32);
        out
    }

    /// The point reflection `-K`.
    pub fn reflected(&self) -> PolytopeBody {
        let mut out = self.clone();
        out.normals.iter_mut().for_each(|v| *v = -*v);
        out.vertices.iter_mut().for_each(|p| *p = -*p);
        for f in out.facets.iter_mut() {
            f.polygon.iter_mut().for_each(|p| *p = -*p);
        }
        out
    }

    /// Axis-aligned bounding box of the vertices.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if self.dim == 2 {
            lo.z = 0.0;
            hi.z = 0.0;
        }
        (lo, hi)
    }

    /// Rebuilds the Wulff shape of the same fan with support `h + t f`.
    pub fn perturbed(&self, field: &PerturbationField, t: f64) -> Result<PolytopeBody> {
        if field.values.len() != self.normals.len() {
            return Err(GeoError::Invalid("perturbation field does not match the normal fan".into()));
        }
        let h: Vec<f64> = self.support.iter().zip(&field.values).map(|(h, f)| h + t * f).collect();
        wulff_shape(self.dim, &self.normals, &h).map_err(|_| GeoError::WulffDegenerate(t))
    }
}

/// A continuous function on the sphere sampled at a polytope's normals.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationField {
    pub values: Vec<f64>,
}

impl PerturbationField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|f| !f.is_finite()) {
            return Err(GeoError::Invalid("perturbation values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Self { values: vec![c; len] }
    }

    /// `f_i = x0·v_i`, whose Wulff perturbation is a pure translation.
    pub fn translation(normals: &[Vec3], x0: &Vec3) -> Self {
        Self { values: normals.iter().map(|v| v.dot(x0)).collect() }
    }
}

/// Unit normals at angles `2πk/m + offset` in the plane.
pub fn regular_fan_2d(m: usize, offset: f64) -> Vec<Vec3> {
    (0..m)
        .map(|k| {
            let a = offset + 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            Vec3::new(a.cos(), a.sin(), 0.0)
        })
        .collect()
}

/// Axis-aligned cube `[-r, r]^dim` (a square in the plane).
pub fn cube(dim: usize, r: f64) -> PolytopeBody {
    let mut normals = Vec::new();
    for k in 0..dim {
        let mut e = Vec3::zeros();
        e[k] = 1.0;
        normals.push(e);
        normals.push(-e);
    }
    wulff_shape(dim, &normals, &vec![r; 2 * dim]).expect("cube is a valid body")
}

/// Regular m-gon with inradius `r`, first normal at angle `offset`.
pub fn regular_polygon(m: usize, r: f64, offset: f64) -> PolytopeBody {
    wulff_shape(2, &regular_fan_2d(m, offset), &vec![r; m]).expect("regular polygon is a valid body")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn square() -> PolytopeBody {
        cube(2, 1.0)
    }

    #[test]
    fn square_and_cube() {
        let k = square();
        assert!((k.volume() - 4.0).abs() < 1e-12);
        assert!(k.facet_areas().iter().all(|a| (a - 2.0).abs() < 1e-12));
        assert_eq!(k.vertices().len(), 4);
        let c = cube(3, 1.0);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        assert_eq!(c.vertices().len(), 8);
        assert!(c.facet_areas().iter().all(|a| (a - 4.0).abs() < 1e-12));
    }

    #[test]
    fn support_values() {
        let k = square();
        assert!((k.support(&Vec3::x()) - 1.0).abs() < 1e-15);
        assert!((k.support(&Vec3::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0)) - SQRT_2).abs() < 1e-15);
    }

    /// Exhaustive pairwise line intersection oracle for planar half-plane systems.
    fn brute_force_vertices(normals: &[Vec3], h: &[f64]) -> Vec<Vec3> {
        let mut out: Vec<Vec3> = Vec::new();
        for i in 0..normals.len() {
            for j in (i + 1)..normals.len() {
                let (a, b) = (normals[i], normals[j]);
                let det = a.x * b.y - a.y * b.x;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = Vec3::new((h[i] * b.y - h[j] * a.y) / det, (a.x * h[j] - b.x * h[i]) / det, 0.0);
                if normals.iter().zip(h).all(|(v, hk)| x.dot(v) <= hk + 1e-9)
                    && !out.iter().any(|q| (q - x).norm() < 1e-9)
                {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn octagon_with_pushed_diagonal_facet() {
        let normals = regular_fan_2d(8, 0.0);
        let mut h = vec![1.0; 8];
        h[1] = 2.0;
        let k = wulff_shape(2, &normals, &h).unwrap();
        assert_eq!(k.facets()[1].area, 0.0);
        assert!(k.facets().iter().enumerate().all(|(i, f)| i == 1 || f.area > 0.0));
        let oracle = brute_force_vertices(&normals, &h);
        assert_eq!(oracle.len(), k.vertices().len());
        for p in &oracle {
            assert!(k.vertices().iter().any(|q| (q - p).norm() < 1e-9));
        }
        // the corner replacing the dropped facet is (1,1)
        assert!(k.vertices().iter().any(|q| (q - Vec3::new(1.0, 1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn pentagon_support_matches_vertex_brute_force() {
        let normals = regular_fan_2d(5, 0.3);
        let h = [1.0, 0.8, 1.3, 0.9, 1.1];
        let k = wulff_shape(2, &normals, &h).unwrap();
        let oracle = brute_force_vertices(&normals, &h);
        for a in 0..36 {
            let t = a as f64 * PI / 18.0;
            let v = Vec3::new(t.cos(), t.sin(), 0.0);
            let expect = oracle.iter().map(|x| x.dot(&v)).fold(f64::NEG_INFINITY, f64::max);
            assert!((k.support(&v) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_and_empty() {
        let normals = [Vec3::x(), Vec3::y(), Vec3::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0)];
        assert_eq!(wulff_shape(2, &normals, &[1.0, 1.0, 1.0]).unwrap_err(), GeoError::Unbounded(2));
        let normals = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()];
        assert_eq!(wulff_shape(2, &normals, &[1.0, -2.0, 1.0, 1.0]).unwrap_err(), GeoError::Empty);
        let flat = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()];
        assert!(wulff_shape(3, &flat, &[1.0; 4]).is_err());
    }

    #[test]
    fn radial_and_xray() {
        let k = square();
        assert!((k.radial(&Vec3::zeros(), &Vec3::x()).unwrap() - 1.0).abs() < 1e-15);
        assert!((k.radial(&Vec3::x(), &-Vec3::x()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(k.radial(&Vec3::x(), &Vec3::x()).unwrap(), 0.0);
        assert!(matches!(k.radial(&Vec3::new(1.1, 0.0, 0.0), &Vec3::x()), Err(GeoError::PointOutside { .. })));
        assert!((k.xray(&Vec3::zeros(), &Vec3::x()) - 2.0).abs() < 1e-15);
        assert_eq!(k.xray(&Vec3::new(0.0, 2.0, 0.0), &Vec3::x()), 0.0);
    }

    #[test]
    fn radial_hits_boundary_by_bisection() {
        let k = wulff_shape(2, &regular_fan_2d(5, 0.1), &[1.0, 0.7, 1.2, 1.0, 0.9]).unwrap();
        let z = Vec3::new(0.1, -0.05, 0.0);
        for a in 0..24 {
            let t = 0.3 + a as f64 * PI / 12.0;
            let u = Vec3::new(t.cos(), t.sin(), 0.0);
            // bisection on the membership predicate
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if k.contains(&(z + u * mid), 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((k.radial(&z, &u).unwrap() - lo).abs() < 1e-9);
        }
    }

    #[test]
    fn xray_equals_radial_from_boundary() {
        let k = wulff_shape(2, &regular_fan_2d(6, 0.2), &[1.0, 0.8, 1.1, 1.0, 0.95, 1.2]).unwrap();
        for f in k.facets() {
            let z = f.centroid().unwrap();
            for a in 0..12 {
                let t = 0.05 + a as f64 * PI / 6.0;
                let u = Vec3::new(t.cos(), t.sin(), 0.0);
                let r = k.radial(&z, &u).unwrap();
                if r > 0.0 {
                    assert!((k.xray(&z, &u) - r).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_surface_area_measure() {
        let k = wulff_shape(3, &icosa_normals(), &[1.0, 1.2, 0.9, 1.1, 1.0, 1.3, 0.8, 1.0, 1.05, 0.95, 1.1, 1.0]).unwrap();
        let s: Vec3 = k.normals().iter().zip(k.facet_areas()).map(|(v, a)| v * a).sum();
        assert!(s.norm() <= 1e-8 * k.surface_area());
        for x in k.vertices() {
            assert!(k.contains(x, 1e-9));
        }
        // divergence theorem: V = (1/n) Σ a_i h_i(K)
        let v: f64 = k.facet_areas().iter().zip(k.support_at_normals()).map(|(a, h)| a * h).sum::<f64>() / 3.0;
        assert!((v - k.volume()).abs() < 1e-10 * v);
    }

    fn icosa_normals() -> Vec<Vec3> {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let mut out = Vec::new();
        for &(a, b) in &[(1.0, g), (1.0, -g), (-1.0, g), (-1.0, -g)] {
            out.push(Vec3::new(0.0, a, b).normalize());
            out.push(Vec3::new(a, b, 0.0).normalize());
            out.push(Vec3::new(b, 0.0, a).normalize());
        }
        out
    }

    #[test]
    fn cube_with_inactive_corner_cut() {
        let mut normals: Vec<Vec3> = cube(3, 1.0).normals().to_vec();
        normals.push(Vec3::new(1.0, 1.0, 1.0).normalize());
        let mut h = vec![1.0; 6];
        h.push(3f64.sqrt() + 0.5);
        let k = wulff_shape(3, &normals, &h).unwrap();
        assert_eq!(k.facets()[6].area, 0.0);
        assert!((k.volume() - 8.0).abs() < 1e-10);
        h[6] = 3f64.sqrt() - 0.5 / 3f64.sqrt();
        let cut = wulff_shape(3, &normals, &h).unwrap();
        assert!(cut.facets()[6].area > 0.0);
        assert!((cut.volume() - (8.0 - 0.5f64.powi(3) / 6.0)).abs() < 1e-10);
    }

    #[test]
    fn translation_and_scaling() {
        let k = wulff_shape(2, &regular_fan_2d(5, 0.0), &[1.0; 5]).unwrap();
        let x0 = Vec3::new(0.3, -0.7, 0.0);
        let kt = k.translated(&x0);
        for a in 0..100 {
            let t = a as f64 * 0.0628;
            let v = Vec3::new(t.cos(), t.sin(), 0.0);
            assert!((kt.support(&v) - k.support(&v) - x0.dot(&v)).abs() < 1e-12);
        }
        let rebuilt = wulff_shape(2, kt.normals(), kt.support_values()).unwrap();
        assert!((rebuilt.volume() - k.volume()).abs() < 1e-12);
        assert!((k.scaled(2.0).volume() - 4.0 * k.volume()).abs() < 1e-12);
    }

    #[test]
    fn wulff_rebuild_reproduces_vertices() {
        let k = wulff_shape(2, &regular_fan_2d(7, 0.4), &[1.0, 1.1, 0.9, 1.2, 1.0, 0.95, 1.05]).unwrap();
        let again = wulff_shape(2, k.normals(), &k.support_at_normals()).unwrap();
        for (p, q) in k.vertices().iter().zip(again.vertices()) {
            assert!((p - q).norm() < 1e-9);
        }
    }
}
