//! Ellipsoids `{x : Σ x_k²/a_k² <= 1}` with closed-form support function,
//! boundary map and curvatures.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};

use crate::error::{GeoError, Result};
use crate::numeric::{orthonormal_complement, perp2};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBody {
    dim: usize,
    axes: Vec3,
}

/// A principal curvature and its tangent direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Principal {
    pub curvature: f64,
    pub direction: Vec3,
}

impl SmoothBody {
    pub fn ellipsoid(dim: usize, axes: &[f64]) -> Result<Self> {
        if !(dim == 2 || dim == 3) || axes.len() != dim || axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(GeoError::Invalid(format!("ellipsoid needs {dim} positive semi-axes in dimension 2 or 3")));
        }
        let mut a = Vec3::repeat(1.0);
        for (k, v) in axes.iter().enumerate() {
            a[k] = *v;
        }
        Ok(Self { dim, axes: a })
    }

    pub fn ball(dim: usize, r: f64) -> Result<Self> {
        Self::ellipsoid(dim, &vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[f64] {
        &self.axes.as_slice()[..self.dim]
    }

    /// Quadratic form `A = diag(1/a²)` restricted to the active coordinates.
    fn quad(&self, x: &Vec3, y: &Vec3) -> f64 {
        (0..self.dim).map(|k| x[k] * y[k] / (self.axes[k] * self.axes[k])).sum()
    }

    pub fn support(&self, v: &Vec3) -> f64 {
        (0..self.dim).map(|k| (self.axes[k] * v[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Boundary point with outer normal `v`, i.e. `∇h(v)`.
    pub fn boundary_point(&self, v: &Vec3) -> Vec3 {
        let h = self.support(v);
        let mut z = Vec3::zeros();
        for k in 0..self.dim {
            z[k] = self.axes[k] * self.axes[k] * v[k] / h;
        }
        z
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.quad(x, x) <= 1.0
    }

    /// Outer unit normal at a boundary point.
    pub fn normal_at(&self, z: &Vec3) -> Vec3 {
        let mut g = Vec3::zeros();
        for k in 0..self.dim {
            g[k] = z[k] / (self.axes[k] * self.axes[k]);
        }
        g.normalize()
    }

    /// Hessian of the 1-homogeneous support function at a unit vector `v`.
    pub fn support_hessian(&self, v: &Vec3) -> Matrix3<f64> {
        let h = self.support(v);
        let mut d = Matrix3::zeros();
        for k in 0..self.dim {
            d[(k, k)] = self.axes[k] * self.axes[k];
        }
        let dv = d * v;
        (d - dv * dv.transpose() / (h * h)) / h
    }

    /// Principal curvatures at `∇h(v)`, from the eigen-decomposition of the
    /// support Hessian on `v⊥` (its eigenvalues are the principal radii).
    pub fn principal(&self, v: &Vec3) -> Vec<Principal> {
        let hess = self.support_hessian(v);
        if self.dim == 2 {
            let t = perp2(v);
            let r = t.dot(&(hess * t));
            return vec![Principal { curvature: 1.0 / r, direction: t }];
        }
        let (b1, b2) = orthonormal_complement(v);
        let m = Matrix2::new(
            b1.dot(&(hess * b1)),
            b1.dot(&(hess * b2)),
            b2.dot(&(hess * b1)),
            b2.dot(&(hess * b2)),
        );
        let eig = SymmetricEigen::new(m);
        (0..2)
            .map(|k| {
                let c = eig.eigenvectors.column(k);
                Principal { curvature: 1.0 / eig.eigenvalues[k], direction: (b1 * c[0] + b2 * c[1]).normalize() }
            })
            .collect()
    }

    /// Gauss curvature at `∇h(v)`.
    pub fn gauss_curvature(&self, v: &Vec3) -> f64 {
        self.principal(v).iter().map(|p| p.curvature).product()
    }

    /// Normal curvature at `∇h(v)` in tangent direction `theta`, from the
    /// second fundamental form `θᵀAθ / |Az|`; here `|Az| = 1/h(v)`.
    pub fn normal_curvature(&self, v: &Vec3, theta: &Vec3) -> Result<f64> {
        let dot = theta.dot(v).abs();
        if dot > 1e-10 || (theta.norm() - 1.0).abs() > 1e-10 {
            return Err(GeoError::NotTangent(dot));
        }
        Ok(self.support(v) * self.quad(theta, theta))
    }

    /// Chord length `X(z, u)` of the line through the boundary point `z`.
    pub fn chord_from_boundary(&self, z: &Vec3, u: &Vec3) -> f64 {
        (2.0 * self.quad(z, u)).abs() / self.quad(u, u)
    }

    /// X-ray function `X(y, u)` for an arbitrary line.
    pub fn xray(&self, y: &Vec3, u: &Vec3) -> f64 {
        let a = self.quad(u, u);
        let b = self.quad(y, u);
        let c = self.quad(y, y) - 1.0;
        let disc = b * b - a * c;
        if disc <= 0.0 {
            0.0
        } else {
            2.0 * disc.sqrt() / a
        }
    }

    /// Curvature of the shadow `E|u⊥` at the projection of `∇h(v)`, for a
    /// tangent `u` in three dimensions. The shadow is the ellipse whose
    /// support function is `h` restricted to `u⊥`.
    pub fn projected_curvature(&self, v: &Vec3, u: &Vec3) -> Result<f64> {
        if self.dim != 3 {
            return Err(GeoError::Invalid("shadow curvature needs a three-dimensional body".into()));
        }
        let dot = u.dot(v).abs();
        if dot > 1e-10 {
            return Err(GeoError::NotTangent(dot));
        }
        let (b1, b2) = orthonormal_complement(u);
        let mut d = Matrix3::zeros();
        for k in 0..3 {
            d[(k, k)] = self.axes[k] * self.axes[k];
        }
        // shadow = {y : yᵀ C⁻¹ y <= 1} with C = Bᵀ D B
        let c = Matrix2::new(b1.dot(&(d * b1)), b1.dot(&(d * b2)), b2.dot(&(d * b1)), b2.dot(&(d * b2)));
        let n = c.try_inverse().ok_or_else(|| GeoError::Invalid("degenerate shadow".into()))?;
        let z = self.boundary_point(v);
        let y = nalgebra::Vector2::new(z.dot(&b1), z.dot(&b2));
        let g = n * y;
        let t = nalgebra::Vector2::new(-g[1], g[0]).normalize();
        Ok(t.dot(&(n * t)) / g.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ball_curvatures() {
        let b = SmoothBody::ball(3, 2.0).unwrap();
        let v = Vec3::new(1.0, 2.0, -2.0) / 3.0;
        let (t, _) = orthonormal_complement(&v);
        assert!((b.normal_curvature(&v, &t).unwrap() - 0.5).abs() < 1e-15);
        assert!((b.gauss_curvature(&v) - 0.25).abs() < 1e-14);
        assert!(b.normal_curvature(&v, &v).is_err());
    }

    #[test]
    fn ellipse_axis_curvature() {
        let e = SmoothBody::ellipsoid(2, &[2.0, 1.0]).unwrap();
        let k = e.normal_curvature(&Vec3::x(), &Vec3::y()).unwrap();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((e.normal_curvature(&Vec3::x(), &-Vec3::y()).unwrap() - k).abs() < 1e-15);
        assert!((e.gauss_curvature(&Vec3::x()) - 2.0).abs() < 1e-14);
        assert!((e.gauss_curvature(&Vec3::y()) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn chords() {
        let e = SmoothBody::ellipsoid(2, &[2.0, 1.0]).unwrap();
        let z = Vec3::new(2.0, 0.0, 0.0);
        assert!((e.chord_from_boundary(&z, &-Vec3::x()) - 4.0).abs() < 1e-15);
        assert!((e.xray(&Vec3::zeros(), &Vec3::y()) - 2.0).abs() < 1e-15);
        assert_eq!(e.xray(&Vec3::new(0.0, 3.0, 0.0), &Vec3::x()), 0.0);
        let u = Vec3::new(-0.6, 0.8, 0.0);
        assert!((e.chord_from_boundary(&z, &u) - e.xray(&z, &u)).abs() < 1e-12);
    }

    #[test]
    fn projection_of_equator_point() {
        let e = SmoothBody::ellipsoid(3, &[2.0, 1.5, 1.0]).unwrap();
        // shadow along e3 is the ellipse (2, 1.5); curvature at (2,0) is a/b²
        let k = e.projected_curvature(&Vec3::x(), &Vec3::z()).unwrap();
        assert!((k - 2.0 / 2.25).abs() < 1e-12);
    }

    fn dir3() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(c, p)| {
            let r = (1.0 - c * c).sqrt();
            Vec3::new(r * p.cos(), r * p.sin(), c)
        })
    }

    proptest! {
        #[test]
        fn boundary_map_is_consistent(a in 0.5f64..3.0, b in 0.5f64..3.0, c in 0.5f64..3.0, v in dir3()) {
            let e = SmoothBody::ellipsoid(3, &[a, b, c]).unwrap();
            let z = e.boundary_point(&v);
            prop_assert!((z.dot(&v) - e.support(&v)).abs() < 1e-10);
            prop_assert!((e.normal_at(&z) - v).norm() < 1e-10);
        }

        #[test]
        fn euler_formula_holds(a in 0.5f64..3.0, b in 0.5f64..3.0, c in 0.5f64..3.0, v in dir3(), phi in 0.0f64..6.3) {
            let e = SmoothBody::ellipsoid(3, &[a, b, c]).unwrap();
            let (b1, b2) = orthonormal_complement(&v);
            let theta = b1 * phi.cos() + b2 * phi.sin();
            let direct = e.normal_curvature(&v, &theta).unwrap();
            let euler: f64 = e.principal(&v).iter().map(|p| p.curvature * p.direction.dot(&theta).powi(2)).sum();
            prop_assert!((direct - euler).abs() < 1e-10 * direct.max(1.0));
        }

        #[test]
        fn shadow_curvature_identity(a in 0.5f64..3.0, b in 0.5f64..3.0, c in 0.5f64..3.0, v in dir3(), phi in 0.0f64..6.3) {
            let e = SmoothBody::ellipsoid(3, &[a, b, c]).unwrap();
            let (b1, b2) = orthonormal_complement(&v);
            let u = b1 * phi.cos() + b2 * phi.sin();
            let lhs = e.projected_curvature(&v, &u).unwrap();
            let rhs = e.gauss_curvature(&v) / e.normal_curvature(&v, &u).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-8 * rhs);
            let flipped = e.projected_curvature(&v, &-u).unwrap();
            prop_assert!((lhs - flipped).abs() < 1e-10 * lhs);
        }
    }
}
