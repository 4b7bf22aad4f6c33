//! The anisotropic fractional s-perimeter `P_s(K, L)` by three independent
//! routes: a deterministic X-ray quadrature, a Monte-Carlo estimator over
//! interior points, and random line sampling.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{anisotropic_perimeter, GaugeBody, MomentBody, PolytopeBody};
use crate::error::{check_s, Result};
use crate::numeric::{orthonormal_complement, pairwise_sum, perp2, sphere_area};
use crate::quadrature::{random_direction, random_interior_point, QuadratureRule, RandomSource};
use crate::Vec3;

/// Samples per Monte-Carlo work chunk; each chunk owns a child stream.
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Xray,
    MonteCarlo,
    LineSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerimeterEstimate {
    pub value: f64,
    pub stderr: f64,
    pub route: Route,
    /// Integrand evaluations.
    pub cost: u64,
}

/// Midpoint grid over the bounding box of the shadow `K|u⊥`: returns the
/// line base points and the cell measure.
fn shadow_grid(body: &PolytopeBody, u: &Vec3, res: usize) -> (Vec<Vec3>, f64) {
    if body.dim() == 2 {
        let t = perp2(u);
        let (lo, hi) = extent_along(body, &t);
        let h = (hi - lo) / res as f64;
        let pts = (0..res).map(|j| t * (lo + (j as f64 + 0.5) * h)).collect();
        (pts, h)
    } else {
        let (e1, e2) = orthonormal_complement(u);
        let (lo1, hi1) = extent_along(body, &e1);
        let (lo2, hi2) = extent_along(body, &e2);
        let (h1, h2) = ((hi1 - lo1) / res as f64, (hi2 - lo2) / res as f64);
        let mut pts = Vec::with_capacity(res * res);
        for a in 0..res {
            let x = lo1 + (a as f64 + 0.5) * h1;
            for b in 0..res {
                pts.push(e1 * x + e2 * (lo2 + (b as f64 + 0.5) * h2));
            }
        }
        (pts, h1 * h2)
    }
}

fn extent_along(body: &PolytopeBody, d: &Vec3) -> (f64, f64) {
    body.vertices()
        .iter()
        .map(|x| x.dot(d))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
}

/// `∫_{u⊥} X_K(y, u)^{1-s} dy` by the midpoint rule.
pub fn chord_power_integral(body: &PolytopeBody, u: &Vec3, s: f64, proj_res: usize) -> f64 {
    let (pts, cell) = shadow_grid(body, u, proj_res);
    let terms: Vec<f64> = pts
        .iter()
        .map(|y| {
            let x = body.xray(y, u);
            if x > 0.0 {
                x.powf(1.0 - s)
            } else {
                0.0
            }
        })
        .collect();
    cell * pairwise_sum(&terms)
}

/// `P_s(K,L) = 1/(s(1-s)) ∫_S ρ_L(u)^{n+s} ∫_{u⊥} X_K(y,u)^{1-s} dy du`.
pub fn ps_xray(body: &PolytopeBody, gauge: &GaugeBody, s: f64, rule: &QuadratureRule, proj_res: usize) -> Result<PerimeterEstimate> {
    check_s(s)?;
    let n = body.dim() as f64;
    let proj_res = proj_res.max(1);
    let terms: Vec<f64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(u, w)| w * gauge.rho(u).powf(n + s) * chord_power_integral(body, u, s, proj_res))
        .collect();
    let cost = rule.len() as u64 * (proj_res as u64).pow(body.dim() as u32 - 1);
    Ok(PerimeterEstimate { value: pairwise_sum(&terms) / (s * (1.0 - s)), stderr: 0.0, route: Route::Xray, cost })
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: f64,
    sumsq: f64,
    count: u64,
}

fn reduce_moments(chunks: &[Moments]) -> Moments {
    let sums: Vec<f64> = chunks.iter().map(|m| m.sum).collect();
    let sqs: Vec<f64> = chunks.iter().map(|m| m.sumsq).collect();
    Moments { sum: pairwise_sum(&sums), sumsq: pairwise_sum(&sqs), count: chunks.iter().map(|m| m.count).sum() }
}

fn run_chunks(n: usize, src: &RandomSource, sample: impl Fn(&mut rand_chacha::ChaCha8Rng, &RandomSource) -> f64 + Sync) -> Moments {
    let chunks = n.div_ceil(CHUNK);
    let per: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let child = src.child(c as u64);
            let mut rng = child.rng();
            let len = CHUNK.min(n - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let x = sample(&mut rng, &child);
                m.sum += x;
                m.sumsq += x * x;
                m.count += 1;
            }
            m
        })
        .collect();
    reduce_moments(&per)
}

fn finish(m: Moments, scale: f64, route: Route) -> PerimeterEstimate {
    let k = m.count.max(1) as f64;
    let mean = m.sum / k;
    let var = if m.count > 1 { ((m.sumsq - k * mean * mean) / (k - 1.0)).max(0.0) } else { 0.0 };
    PerimeterEstimate { value: scale * mean, stderr: scale * (var / k).sqrt(), route, cost: m.count }
}

/// Monte-Carlo estimate of `(1/s) ∫_S ρ_L(u)^{n+s} ∫_K ρ_{K,y}(u)^{-s} dy du`
/// with `y` uniform in `K`, `u` uniform on the sphere, and each sample
/// averaged over the pair `u, -u`.
pub fn ps_montecarlo(body: &PolytopeBody, gauge: &GaugeBody, s: f64, samples: usize, src: &RandomSource) -> Result<PerimeterEstimate> {
    check_s(s)?;
    let dim = body.dim();
    let n = dim as f64;
    let floor = 1e-12;
    let m = run_chunks(samples, src, |rng, child| loop {
        let (y, _) = random_interior_point(body, rng, child);
        let u = random_direction(dim, rng, child);
        let slacks = body.slacks(&y);
        let (r1, r2) = (body.ray_exit(&slacks, &u), body.ray_exit(&slacks, &-u));
        if r1 < floor || r2 < floor {
            continue;
        }
        break 0.5 * (gauge.rho(&u).powf(n + s) * r1.powf(-s) + gauge.rho(&-u).powf(n + s) * r2.powf(-s));
    });
    let scale = sphere_area(dim) * body.volume() / s;
    Ok(finish(m, scale, Route::MonteCarlo))
}

/// Line-sampling estimate for the Euclidean gauge: `u` uniform on the sphere
/// and `y` uniform in a box of half-width `radius` in `u⊥` centred at the
/// projection of `center`. Lines missing `K` count as zero.
pub fn ps_linesample_in_box(body: &PolytopeBody, s: f64, samples: usize, src: &RandomSource, center: &Vec3, radius: f64) -> Result<PerimeterEstimate> {
    check_s(s)?;
    let dim = body.dim();
    let m = run_chunks(samples, src, |rng, child| {
        use rand::Rng;
        let u = random_direction(dim, rng, child);
        let base = center - u * u.dot(center);
        let y = if dim == 2 {
            base + perp2(&u) * (radius * (2.0 * rng.gen::<f64>() - 1.0))
        } else {
            let (e1, e2) = orthonormal_complement(&u);
            base + e1 * (radius * (2.0 * rng.gen::<f64>() - 1.0)) + e2 * (radius * (2.0 * rng.gen::<f64>() - 1.0))
        };
        let x = body.xray(&y, &u);
        if x > 0.0 {
            x.powf(1.0 - s)
        } else {
            0.0
        }
    });
    let scale = sphere_area(dim) * (2.0 * radius).powi(dim as i32 - 1) / (s * (1.0 - s));
    Ok(finish(m, scale, Route::LineSample))
}

/// [`ps_linesample_in_box`] with the box centred at the vertex centroid and
/// wide enough to cover every shadow.
pub fn ps_linesample(body: &PolytopeBody, s: f64, samples: usize, src: &RandomSource) -> Result<PerimeterEstimate> {
    let c = body.vertices().iter().sum::<Vec3>() / body.vertices().len() as f64;
    let r = body.vertices().iter().map(|x| (x - c).norm()).fold(0.0, f64::max);
    ps_linesample_in_box(body, s, samples, src, &c, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LudwigRow {
    pub s: f64,
    /// `s P_s(K, L)`.
    pub small_s: f64,
    /// `(1-s) P_s(K, L)`.
    pub large_s: f64,
    /// `n |K| |L|`.
    pub small_target: f64,
    /// `P(K, ZL)`.
    pub large_target: f64,
}

/// Both endpoint limits of the perimeter, tabulated over `s_list`.
pub fn ludwig_limits(body: &PolytopeBody, gauge: &GaugeBody, s_list: &[f64], rule: &QuadratureRule, proj_res: usize) -> Result<Vec<LudwigRow>> {
    let small_target = body.dim() as f64 * body.volume() * gauge.volume();
    let large_target = anisotropic_perimeter(body, &MomentBody { gauge, rule });
    s_list
        .iter()
        .map(|&s| {
            let p = ps_xray(body, gauge, s, rule, proj_res)?.value;
            Ok(LudwigRow { s, small_s: s * p, large_s: (1.0 - s) * p, small_target, large_target })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{cube, regular_polygon};
    use crate::quadrature::sphere_rule;
    use crate::GeoError;

    #[test]
    fn rejects_bad_s() {
        let k = cube(2, 1.0);
        let r = sphere_rule(2, 16);
        for s in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            assert!(matches!(ps_xray(&k, &GaugeBody::ball(2), s, &r, 8), Err(GeoError::InvalidS(_))));
        }
    }

    #[test]
    fn homogeneity_and_gauge_scaling() {
        let k = cube(2, 1.0);
        let l = GaugeBody::ball(2);
        let r = sphere_rule(2, 128);
        let p1 = ps_xray(&k, &l, 0.5, &r, 128).unwrap().value;
        let p2 = ps_xray(&k.scaled(2.0), &l, 0.5, &r, 128).unwrap().value;
        assert!(((p2 / p1).log2() - 1.5).abs() < 1e-3);
        let pl = ps_xray(&k, &l.scaled(2.0), 0.5, &r, 128).unwrap().value;
        assert!((pl / p1 - 2f64.powf(2.5)).abs() < 1e-10 * 2f64.powf(2.5));
    }

    #[test]
    fn translation_invariance() {
        let k = regular_polygon(5, 1.0, 0.1);
        let l = GaugeBody::cube(2);
        let r = sphere_rule(2, 64);
        let p = ps_xray(&k, &l, 0.4, &r, 64).unwrap().value;
        let q = ps_xray(&k.translated(&Vec3::new(3.0, -1.0, 0.0)), &l, 0.4, &r, 64).unwrap().value;
        assert!((p - q).abs() < 1e-8 * p);
    }

    #[test]
    fn xray_matches_disc_closed_form_inner_integral() {
        // square chord integral in the direction e1: ∫ 2^{1-s} over [-1,1]
        let k = cube(2, 1.0);
        let v = chord_power_integral(&k, &Vec3::x(), 0.3, 10);
        assert!((v - 2.0 * 2f64.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn routes_agree_on_square() {
        let k = cube(2, 1.0);
        let l = GaugeBody::ball(2);
        let x = ps_xray(&k, &l, 0.3, &sphere_rule(2, 256), 256).unwrap();
        let mc = ps_montecarlo(&k, &l, 0.3, 200_000, &RandomSource::new(11)).unwrap();
        let ls = ps_linesample(&k, 0.3, 200_000, &RandomSource::new(12)).unwrap();
        assert!((x.value - mc.value).abs() <= 3.0 * mc.stderr + 0.01 * x.value, "{x:?} {mc:?}");
        assert!((x.value - ls.value).abs() <= 3.0 * ls.stderr, "{x:?} {ls:?}");
    }

    #[test]
    fn reflected_body_with_mirrored_stream_is_identical() {
        let k = regular_polygon(5, 1.0, 0.3);
        let l = GaugeBody::cube(2);
        let src = RandomSource::new(5);
        let a = ps_montecarlo(&k, &l, 0.5, 20_000, &src).unwrap();
        let b = ps_montecarlo(&k.reflected(), &l, 0.5, 20_000, &src.mirror()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn stderr_shrinks_like_inverse_sqrt() {
        let k = cube(2, 1.0);
        let a = ps_linesample(&k, 0.3, 40_000, &RandomSource::new(1)).unwrap();
        let b = ps_linesample(&k, 0.3, 160_000, &RandomSource::new(1)).unwrap();
        let ratio = b.stderr / a.stderr;
        assert!((ratio - 0.5).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn linesample_monotone_under_inclusion() {
        let small = cube(2, 1.0);
        let big = cube(2, 1.2);
        let src = RandomSource::new(9);
        let c = Vec3::zeros();
        let a = ps_linesample_in_box(&small, 0.3, 100_000, &src, &c, 2.0).unwrap();
        let b = ps_linesample_in_box(&big, 0.3, 100_000, &src, &c, 2.0).unwrap();
        assert!(b.value - a.value > 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
    }

    #[test]
    fn endpoint_limits_on_square() {
        let k = cube(2, 1.0);
        let l = GaugeBody::ball(2);
        let rows = ludwig_limits(&k, &l, &[0.5, 0.2, 0.05, 0.01], &sphere_rule(2, 512), 512).unwrap();
        let last = rows.last().unwrap();
        assert!((last.small_s / last.small_target - 1.0).abs() < 0.02);
        let dev: Vec<f64> = rows.iter().map(|r| (r.small_s / r.small_target - 1.0).abs()).collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
        let hi = ludwig_limits(&k, &l, &[0.9, 0.99], &sphere_rule(2, 512), 512).unwrap();
        assert!((hi[1].large_s / hi[1].large_target - 1.0).abs() < 0.03);
        assert!((hi[1].large_target - 16.0).abs() < 1e-3);
    }
}
