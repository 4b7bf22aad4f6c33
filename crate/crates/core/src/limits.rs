//! Endpoint behaviour of the fractional area measure: the s → 0 ratio on
//! polytope facets, and the s → 1 curvature integrals on ellipsoids.
//!
//! Where a limit constant is in doubt every row carries both the literal
//! target and the one obtained from the definitions (see the README).

use serde::Serialize;

use crate::bodies::{GaugeBody, PolytopeBody, SmoothBody};
use crate::error::{check_s, Result};
use crate::measures::area_measure;
use crate::numeric::{composite_gauss_legendre, orthonormal_complement, perp2};
use crate::quadrature::{circle_rule, BoundaryQuadrature, QuadratureRule};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallSRow {
    pub s: f64,
    pub facet: usize,
    /// `s A_i`.
    pub lhs: f64,
    /// `(|L|/2) a_i`.
    pub half_gauge_area: f64,
    /// `s A_i / ((|L|/2) a_i)`.
    pub ratio: f64,
    /// `s A_i / (n (|L|/2) a_i)`; tends to 1.
    pub ratio_normalized: f64,
}

/// `|L| = (1/n) ∫ ρ_L^n` by the sphere rule.
pub fn gauge_volume(gauge: &GaugeBody, rule: &QuadratureRule) -> f64 {
    let n = gauge.dim() as i32;
    rule.integrate(|u| gauge.rho(u).powi(n)) / n as f64
}

/// Per-facet ratios of `s A_s` against the surface area measure for each `s`.
pub fn limit_s0_check(body: &PolytopeBody, gauge: &GaugeBody, s_list: &[f64], bq: &BoundaryQuadrature, rule: &QuadratureRule) -> Result<Vec<SmallSRow>> {
    let vol_l = gauge_volume(gauge, rule);
    let n = body.dim() as f64;
    let mut rows = Vec::new();
    for &s in s_list {
        let a = area_measure(body, gauge, s, bq, rule)?;
        for (i, (f, at)) in body.facets().iter().zip(&a.atoms).enumerate() {
            if !f.is_active() {
                continue;
            }
            let half = 0.5 * vol_l * f.area;
            let lhs = s * at.w;
            rows.push(SmallSRow { s, facet: i, lhs, half_gauge_area: half, ratio: lhs / half, ratio_normalized: lhs / (n * half) });
        }
    }
    Ok(rows)
}

/// Normal curvature of the ellipsoid at `∇h(v)` in the tangent direction `theta`.
pub fn normal_curvature(body: &SmoothBody, v: &Vec3, theta: &Vec3) -> Result<f64> {
    body.normal_curvature(v, theta)
}

/// Unit tangent directions at normal `v` with their weights: the circle
/// `S^{n-1} ∩ v⊥` in space, the two points `±t` (counting measure) in the plane.
fn tangent_rule(dim: usize, v: &Vec3, circle_res: usize) -> Vec<(Vec3, f64)> {
    if dim == 2 {
        let t = perp2(v);
        vec![(t, 1.0), (-t, 1.0)]
    } else {
        let (e1, e2) = orthonormal_complement(v);
        let r = circle_rule(&e1, &e2, circle_res);
        r.nodes.into_iter().zip(r.weights).collect()
    }
}

/// `∫_{S^{n-1} ∩ v⊥} ρ_L(θ)^{n+1} κ(z, θ) dθ` at `z = ∇h(v)`.
pub fn curvature_integral(body: &SmoothBody, gauge: &GaugeBody, v: &Vec3, circle_res: usize) -> Result<f64> {
    let n1 = body.dim() as i32 + 1;
    let mut acc = 0.0;
    for (theta, w) in tangent_rule(body.dim(), v, circle_res) {
        acc += w * gauge.rho(&theta).powi(n1) * body.normal_curvature(v, &theta)?;
    }
    Ok(acc)
}

/// `(1-s) ∫_{S_z^+} ρ_L(u)^{n+s} X_E(z,u)^{-s} du` at `z = ∇h(v)`.
///
/// Inward directions are written `u = cos α θ - sin α v` with `θ` tangent
/// and `α ∈ (0, π/2]`, so `du = cos^{n-2} α dα dθ` and the chord is
/// `X = 2 sin α / (h(v) uᵀAu)`. The weak singularity `α^{-s}` is removed by
/// `β = α^{1-s}`, which also absorbs the factor `1-s`; the β-integral uses
/// composite Gauss–Legendre with `panels` panels.
pub fn scaled_chord_integral(body: &SmoothBody, gauge: &GaugeBody, v: &Vec3, s: f64, circle_res: usize, panels: usize) -> Result<f64> {
    check_s(s)?;
    let n = body.dim() as f64;
    let h = body.support(v);
    let top = std::f64::consts::FRAC_PI_2.powf(1.0 - s);
    let nodes = composite_gauss_legendre(0.0, top, panels, 8);
    let axes = body.axes();
    let quad = |u: &Vec3| -> f64 { (0..axes.len()).map(|k| (u[k] / axes[k]).powi(2)).sum() };
    let mut acc = 0.0;
    for (theta, wt) in tangent_rule(body.dim(), v, circle_res) {
        let mut inner = 0.0;
        for &(beta, wb) in &nodes {
            let alpha = beta.powf(1.0 / (1.0 - s));
            let (sa, ca) = alpha.sin_cos();
            let u = theta * ca - v * sa;
            let sinc = if alpha < 1e-8 { 1.0 } else { alpha / sa };
            let g = gauge.rho(&u).powf(n + s) * (sinc * h * quad(&u) / 2.0).powf(s) * ca.powf(n - 2.0);
            inner += wb * g;
        }
        acc += wt * inner;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureLimitRow {
    pub s: f64,
    pub lhs: f64,
    /// `∫ ρ_L^{n+1} κ dθ`.
    pub rhs: f64,
    pub ratio: f64,
    /// `lhs / (rhs/2)`; the limit of `lhs` is half the curvature integral.
    pub ratio_half: f64,
}

/// Tabulates the s → 1 behaviour of the scaled chord integral at `∇h(v)`.
pub fn lemma_conv_check(body: &SmoothBody, gauge: &GaugeBody, v: &Vec3, s_list: &[f64], circle_res: usize) -> Result<Vec<CurvatureLimitRow>> {
    let rhs = curvature_integral(body, gauge, v, circle_res)?;
    s_list
        .iter()
        .map(|&s| {
            let lhs = scaled_chord_integral(body, gauge, v, s, circle_res, 400)?;
            Ok(CurvatureLimitRow { s, lhs, rhs, ratio: lhs / rhs, ratio_half: lhs / (0.5 * rhs) })
        })
        .collect()
}

/// Density of `(1-s) A_s` against `H^{n-1}` at `∇h(v)`, i.e.
/// `(1-s)(n/s) Ṽ_{n+s}`, compared with the curvature integral.
pub fn mixed_area_density_check(body: &SmoothBody, gauge: &GaugeBody, v: &Vec3, s_list: &[f64], circle_res: usize) -> Result<Vec<CurvatureLimitRow>> {
    let rhs = curvature_integral(body, gauge, v, circle_res)?;
    s_list
        .iter()
        .map(|&s| {
            // (1-s)(n/s)Ṽ = (1-s)/s ∫ ρ_L^{n+s} X^{-s}
            let lhs = scaled_chord_integral(body, gauge, v, s, circle_res, 400)? / s;
            Ok(CurvatureLimitRow { s, lhs, rhs, ratio: lhs / rhs, ratio_half: lhs / (0.5 * rhs) })
        })
        .collect()
}

/// Planar `h_{ZL}(v)` with the angular integral split where `v·u` changes
/// sign, so each Gauss–Legendre panel sees a smooth integrand.
pub fn moment_body_support_2d(gauge: &GaugeBody, v: &Vec3, panels: usize) -> f64 {
    let t0 = v.y.atan2(v.x);
    let half = std::f64::consts::FRAC_PI_2;
    let mut acc = 0.0;
    for (a, b) in [(t0 - half, t0 + half), (t0 + half, t0 + 3.0 * half)] {
        for (t, w) in composite_gauss_legendre(a, b, panels, 8) {
            let u = Vec3::new(t.cos(), t.sin(), 0.0);
            acc += w * gauge.rho(&u).powi(3) * v.dot(&u).abs();
        }
    }
    0.5 * acc
}

/// Radius of curvature `h + h''` of the planar moment body `ZL` at the
/// angle of `v`, by a central second difference of its support function.
pub fn moment_body_curvature_radius_2d(gauge: &GaugeBody, v: &Vec3) -> f64 {
    let t0 = v.y.atan2(v.x);
    let d = 1e-2;
    let h = |t: f64| moment_body_support_2d(gauge, &Vec3::new(t.cos(), t.sin(), 0.0), 64);
    let (hm, h0, hp) = (h(t0 - d), h(t0), h(t0 + d));
    h0 + (hp - 2.0 * h0 + hm) / (d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
}

/// Curvature of the shadow `E|u⊥` at the image of `∇h(v)` against
/// `κ(z) / κ(z, u)`.
pub fn lemma_xzlem_check(body: &SmoothBody, v: &Vec3, u: &Vec3) -> Result<ShadowCheck> {
    let lhs = body.projected_curvature(v, u)?;
    let rhs = body.gauss_curvature(v) / body.normal_curvature(v, u)?;
    Ok(ShadowCheck { lhs, rhs, rel_error: (lhs - rhs).abs() / rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{cube, moment_body_support};
    use crate::quadrature::{boundary_rule_graded, sphere_rule};
    use std::f64::consts::PI;

    #[test]
    fn ball_chord_integral_closed_form() {
        // (1-s) ∫ (2 cos)^{-s} over the inward hemisphere of B³ is 2π 2^{-s}
        let b = SmoothBody::ball(3, 1.0).unwrap();
        let l = GaugeBody::ball(3);
        for s in [0.3, 0.9, 0.99] {
            let v = scaled_chord_integral(&b, &l, &Vec3::z(), s, 64, 400).unwrap();
            assert!((v - 2.0 * PI * 2f64.powf(-s)).abs() < 1e-10, "{s}: {v}");
        }
    }

    #[test]
    fn disc_limit_is_half_the_curvature_integral() {
        let b = SmoothBody::ball(2, 1.0).unwrap();
        let rows = lemma_conv_check(&b, &GaugeBody::ball(2), &Vec3::x(), &[0.9, 0.95, 0.99], 0).unwrap();
        assert_eq!(rows[0].rhs, 2.0);
        let dev: Vec<f64> = rows.iter().map(|r| (r.ratio_half - 1.0).abs()).collect();
        assert!(dev[2] < 0.03 && dev[0] > dev[1] && dev[1] > dev[2], "{rows:?}");
    }

    #[test]
    fn ellipse_limit() {
        let e = SmoothBody::ellipsoid(2, &[2.0, 1.0]).unwrap();
        let rows = lemma_conv_check(&e, &GaugeBody::ball(2), &Vec3::x(), &[0.995], 0).unwrap();
        assert!((rows[0].rhs - 4.0).abs() < 1e-12);
        assert!((rows[0].ratio_half - 1.0).abs() < 0.03, "{rows:?}");
    }

    #[test]
    fn density_ratio_invariant_under_gauge_scaling() {
        let e = SmoothBody::ellipsoid(3, &[2.0, 1.0, 1.0]).unwrap();
        let l = GaugeBody::ball(3);
        let a = mixed_area_density_check(&e, &l, &Vec3::x(), &[0.99], 128).unwrap()[0];
        let b = mixed_area_density_check(&e, &l.scaled(2.0), &Vec3::x(), &[0.99], 128).unwrap()[0];
        // the two sides pick up 2^{n+s} and 2^{n+1}
        assert!((b.ratio / a.ratio - 2f64.powf(-0.01)).abs() < 1e-10);
        assert!((a.ratio_half - 1.0).abs() < 0.05, "{a:?}");
    }

    #[test]
    fn planar_mixed_area_density_constant() {
        // (1-s)A_s has density ½(ρ(t)³+ρ(-t)³)κ R_K = ρ_L(t)³ per unit angle;
        // the radius of curvature of ZL is 2ρ_L(t)³, so the constant is (n-1)/2
        let l = GaugeBody::ellipsoid(2, &[1.3, 0.8]).unwrap();
        let rule = sphere_rule(2, 4096);
        for k in 0..6 {
            let a = 0.3 + k as f64;
            let v = Vec3::new(a.cos(), a.sin(), 0.0);
            assert!((moment_body_support_2d(&l, &v, 64) - moment_body_support(&l, &v, &rule)).abs() < 1e-5);
            let r = moment_body_curvature_radius_2d(&l, &v);
            let t = perp2(&v);
            assert!((0.5 * r - l.rho(&t).powi(3)).abs() < 1e-3 * r, "{r}");
        }
    }

    #[test]
    fn small_s_ratio_tends_to_dimension() {
        let k = cube(2, 1.0);
        let l = GaugeBody::ball(2);
        let rule = sphere_rule(2, 512);
        let bq = boundary_rule_graded(&k, 64, 4.0);
        let rows = limit_s0_check(&k, &l, &[0.3, 0.1, 0.03, 0.01], &bq, &rule).unwrap();
        let last: Vec<_> = rows.iter().filter(|r| r.s == 0.01).collect();
        assert!(last.iter().all(|r| (r.ratio_normalized - 1.0).abs() < 0.02));
        let scaled = limit_s0_check(&k, &l.scaled(1.7), &[0.01], &bq, &rule).unwrap();
        // s A_s picks up λ^{n+s}, the target λ^n
        assert!((scaled[0].ratio / last[0].ratio - 1.7f64.powf(0.01)).abs() < 1e-10);
    }

    #[test]
    fn shadow_identity() {
        let e = SmoothBody::ellipsoid(3, &[2.0, 1.5, 1.0]).unwrap();
        let chk = lemma_xzlem_check(&e, &Vec3::x(), &Vec3::z()).unwrap();
        assert!(chk.rel_error < 1e-8);
        let b = SmoothBody::ball(3, 2.0).unwrap();
        let chk = lemma_xzlem_check(&b, &Vec3::y(), &Vec3::x()).unwrap();
        assert!((chk.lhs - 0.5).abs() < 1e-12 && chk.rel_error < 1e-12);
    }
}
