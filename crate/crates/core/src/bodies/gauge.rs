//! Origin-symmetric gauge bodies `L` and the norms they induce.

use crate::bodies::polytope::{wulff_shape, PolytopeBody};
use crate::error::{GeoError, Result};
use crate::numeric::unit_ball_volume;
use crate::quadrature::QuadratureRule;
use crate::Vec3;

/// Anything that can report a support function `h(v)`.
pub trait SupportFunction {
    fn support(&self, v: &Vec3) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub enum GaugeKind {
    Ball,
    Ellipsoid { axes: Vec3 },
    Polytope(PolytopeBody),
    /// Wulff shape of support values tabulated on the nodes of a rule.
    SupportSampled { nodes: Vec<Vec3>, values: Vec<f64>, body: PolytopeBody },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeBody {
    dim: usize,
    kind: GaugeKind,
    scale: f64,
}

impl GaugeBody {
    pub fn ball(dim: usize) -> Self {
        Self { dim, kind: GaugeKind::Ball, scale: 1.0 }
    }

    pub fn ellipsoid(dim: usize, axes: &[f64]) -> Result<Self> {
        if axes.len() != dim || axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(GeoError::Invalid(format!("ellipsoid needs {dim} positive semi-axes")));
        }
        let mut a = Vec3::repeat(1.0);
        for (k, v) in axes.iter().enumerate() {
            a[k] = *v;
        }
        Ok(Self { dim, kind: GaugeKind::Ellipsoid { axes: a }, scale: 1.0 })
    }

    /// Polytopal gauge; the body must contain the origin in its interior and
    /// be symmetric under `x -> -x`.
    pub fn polytope(body: PolytopeBody) -> Result<Self> {
        if !body.origin_interior() {
            return Err(GeoError::Invalid("gauge polytope must contain the origin in its interior".into()));
        }
        let tol = 1e-10 * body.extent();
        for p in body.vertices() {
            if !body.vertices().iter().any(|q| (q + p).norm() <= tol) {
                return Err(GeoError::Invalid("gauge polytope is not origin-symmetric".into()));
            }
        }
        Ok(Self { dim: body.dim(), kind: GaugeKind::Polytope(body), scale: 1.0 })
    }

    /// The cube gauge `[-1,1]^dim`, whose norm is the max-norm.
    pub fn cube(dim: usize) -> Self {
        Self::polytope(crate::bodies::polytope::cube(dim, 1.0)).expect("cube is symmetric")
    }

    /// Gauge defined by support values on the nodes of a sphere rule.
    pub fn support_sampled(rule: &QuadratureRule, values: &[f64]) -> Result<Self> {
        if values.len() != rule.nodes.len() {
            return Err(GeoError::Invalid("one support value per rule node is required".into()));
        }
        let body = wulff_shape(rule.dim, &rule.nodes, values)?;
        let g = Self::polytope(body.clone())?;
        Ok(Self {
            dim: g.dim,
            kind: GaugeKind::SupportSampled { nodes: rule.nodes.clone(), values: values.to_vec(), body },
            scale: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The dilate `lambda L`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "gauge dilation must be positive");
        Self { scale: self.scale * lambda, ..self.clone() }
    }

    /// Radial function `ρ_L(u)` for a unit vector `u`.
    pub fn rho(&self, u: &Vec3) -> f64 {
        let r = match &self.kind {
            GaugeKind::Ball => 1.0,
            GaugeKind::Ellipsoid { axes } => {
                let q: f64 = (0..self.dim).map(|k| (u[k] / axes[k]).powi(2)).sum();
                1.0 / q.sqrt()
            }
            GaugeKind::Polytope(body) | GaugeKind::SupportSampled { body, .. } => {
                let m = body
                    .normals()
                    .iter()
                    .zip(body.support_values())
                    .map(|(v, h)| u.dot(v) / h)
                    .fold(0.0f64, f64::max);
                1.0 / m
            }
        };
        self.scale * r
    }

    /// `‖x‖_L = |x| / ρ_L(x/|x|)`, zero at the origin.
    pub fn norm(&self, x: &Vec3) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        r / self.rho(&(x / r))
    }

    /// Volume `|L|`.
    pub fn volume(&self) -> f64 {
        let base = match &self.kind {
            GaugeKind::Ball => unit_ball_volume(self.dim),
            GaugeKind::Ellipsoid { axes } => unit_ball_volume(self.dim) * (0..self.dim).map(|k| axes[k]).product::<f64>(),
            GaugeKind::Polytope(body) | GaugeKind::SupportSampled { body, .. } => body.volume(),
        };
        base * self.scale.powi(self.dim as i32)
    }
}

impl SupportFunction for GaugeBody {
    fn support(&self, v: &Vec3) -> f64 {
        let h = match &self.kind {
            GaugeKind::Ball => v.norm(),
            GaugeKind::Ellipsoid { axes } => (0..self.dim).map(|k| (axes[k] * v[k]).powi(2)).sum::<f64>().sqrt(),
            GaugeKind::Polytope(body) | GaugeKind::SupportSampled { body, .. } => body.support(v),
        };
        self.scale * h
    }
}

impl SupportFunction for PolytopeBody {
    fn support(&self, v: &Vec3) -> f64 {
        PolytopeBody::support(self, v)
    }
}

/// Support function `r |v|` of a centred ball of radius `r`.
#[derive(Debug, Clone, Copy)]
pub struct BallSupport(pub f64);

impl SupportFunction for BallSupport {
    fn support(&self, v: &Vec3) -> f64 {
        self.0 * v.norm()
    }
}

/// The moment body of a gauge, evaluated by a sphere rule.
pub struct MomentBody<'a> {
    pub gauge: &'a GaugeBody,
    pub rule: &'a QuadratureRule,
}

impl SupportFunction for MomentBody<'_> {
    fn support(&self, v: &Vec3) -> f64 {
        moment_body_support(self.gauge, v, self.rule)
    }
}

/// `h_{ZL}(v) = ((n+1)/2) ∫_L |v·x| dx`, reduced along rays to
/// `(1/2) ∫_{S^{n-1}} ρ_L(u)^{n+1} |v·u| du`.
pub fn moment_body_support(gauge: &GaugeBody, v: &Vec3, rule: &QuadratureRule) -> f64 {
    let n1 = gauge.dim() as i32 + 1;
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(u, w)| w * gauge.rho(u).powi(n1) * v.dot(u).abs())
        .collect();
    0.5 * crate::numeric::pairwise_sum(&terms)
}

/// Anisotropic perimeter `P(K, M) = Σ a_i h_M(v_i)`.
pub fn anisotropic_perimeter(body: &PolytopeBody, m: &impl SupportFunction) -> f64 {
    body.facets()
        .iter()
        .zip(body.normals())
        .filter(|(f, _)| f.is_active())
        .map(|(f, v)| f.area * m.support(v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::polytope::{cube, regular_polygon};
    use crate::quadrature::sphere_rule;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn unit(t: f64) -> Vec3 {
        Vec3::new(t.cos(), t.sin(), 0.0)
    }

    #[test]
    fn ball_and_cube_gauges() {
        let b = GaugeBody::ball(2);
        assert_eq!(b.rho(&unit(0.3)), 1.0);
        assert!((b.norm(&Vec3::new(3.0, 4.0, 0.0)) - 5.0).abs() < 1e-15);
        let q = GaugeBody::cube(2);
        assert!((q.rho(&Vec3::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0)) - SQRT_2).abs() < 1e-14);
        assert!((q.norm(&Vec3::new(0.3, -0.7, 0.0)) - 0.7).abs() < 1e-15);
        assert_eq!(q.norm(&Vec3::zeros()), 0.0);
    }

    #[test]
    fn ellipse_radial_lies_on_boundary() {
        let e = GaugeBody::ellipsoid(2, &[2.0, 0.5]).unwrap();
        for k in 0..24 {
            let u = unit(0.1 + k as f64 * PI / 12.0);
            let r = e.rho(&u);
            let expect = ((u.x / 2.0).powi(2) + (u.y / 0.5).powi(2)).powf(-0.5);
            assert!((r - expect).abs() < 1e-14);
            assert!((e.norm(&(u * r)) - 1.0).abs() < 1e-14);
            // bisection on the membership predicate x^2/a^2 + y^2/b^2 <= 1
            let (mut lo, mut hi) = (0.0, 5.0);
            for _ in 0..100 {
                let m = 0.5 * (lo + hi);
                let p = u * m;
                if (p.x / 2.0).powi(2) + (p.y / 0.5).powi(2) <= 1.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            assert!((lo - r).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_and_homogeneity() {
        let gauges = [
            GaugeBody::ball(2),
            GaugeBody::cube(2),
            GaugeBody::ellipsoid(2, &[1.5, 0.7]).unwrap(),
            GaugeBody::polytope(regular_polygon(6, 1.0, 0.2)).unwrap(),
        ];
        for g in &gauges {
            for k in 0..50 {
                let u = unit(k as f64 * 0.13);
                assert!((g.rho(&u) - g.rho(&-u)).abs() < 1e-10);
                let x = u * 0.7;
                assert!((g.norm(&(x * -3.0)) - 3.0 * g.norm(&x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymmetric_polytope_gauge_rejected() {
        assert!(GaugeBody::polytope(regular_polygon(5, 1.0, 0.0)).is_err());
    }

    #[test]
    fn moment_body_of_balls() {
        let r2 = sphere_rule(2, 2048);
        for k in 0..8 {
            let v = unit(k as f64 * 0.7);
            assert!((moment_body_support(&GaugeBody::ball(2), &v, &r2) - 2.0).abs() < 1e-5);
        }
        let r3 = sphere_rule(3, 20000);
        let v = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let h = moment_body_support(&GaugeBody::ball(3), &v, &r3);
        assert!((h / PI - 1.0).abs() < 2e-3, "{h}");
        assert!((h - moment_body_support(&GaugeBody::ball(3), &-v, &r3)).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_perimeter_of_square() {
        let k = cube(2, 1.0);
        let rule = sphere_rule(2, 4096);
        assert!((anisotropic_perimeter(&k, &GaugeBody::ball(2)) - 8.0).abs() < 1e-12);
        assert!((anisotropic_perimeter(&k, &GaugeBody::ball(2).scaled(2.0)) - 16.0).abs() < 1e-12);
        let z = MomentBody { gauge: &GaugeBody::ball(2), rule: &rule };
        assert!((anisotropic_perimeter(&k, &z) - 16.0).abs() < 1e-5);
    }

    #[test]
    fn volumes() {
        assert!((GaugeBody::ball(3).volume() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((GaugeBody::cube(2).scaled(2.0).volume() - 16.0).abs() < 1e-12);
        assert!((GaugeBody::ellipsoid(2, &[2.0, 1.0]).unwrap().volume() - 2.0 * PI).abs() < 1e-14);
    }
}
