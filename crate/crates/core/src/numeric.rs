//! Small numeric helpers shared by the integration routines.

use crate::Vec3;

/// Pairwise (cascade) summation. The reduction tree only depends on the
/// slice length, so parallel map + this sum is run-to-run reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Orthonormal basis of the complement of a unit vector `u` in R^3.
pub fn orthonormal_complement(u: &Vec3) -> (Vec3, Vec3) {
    let a = if u.x.abs() < 0.6 {
        Vec3::x()
    } else if u.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (a - u * u.dot(&a)).normalize();
    let e2 = u.cross(&e1);
    (e1, e2)
}

/// Unit direction perpendicular to `u` in the plane (counter-clockwise rotation).
pub fn perp2(u: &Vec3) -> Vec3 {
    Vec3::new(-u.y, u.x, 0.0)
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Surface area of the unit sphere S^{n-1}.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order.max(1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// Composite Gauss–Legendre rule on `[a, b]`: `panels` equal panels of `order` points.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for &(x, w) in &rule {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    out
}
