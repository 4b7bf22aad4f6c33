//! Discrete Minkowski problem for the fractional area measure and the
//! isoperimetric search, both as gradient descents over support vectors on
//! a fixed normal fan.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{wulff_shape, GaugeBody, PolytopeBody};
use crate::error::{check_s, GeoError, Result};
use crate::fracperim::ps_xray;
use crate::measures::{area_measure, vtilde_samples, Atom, AtomicSphericalMeasure};
use crate::quadrature::{boundary_rule_graded, sphere_rule, BoundaryQuadrature, BoundarySample, QuadratureRule};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetDiagnostics {
    pub mass: f64,
    pub centroid_norm: f64,
    pub min_eigenvalue: f64,
    pub centroid_ok: bool,
    pub spread_ok: bool,
    pub pass: bool,
}

/// Balance and non-degeneracy of a target measure: `|Σ w v| <= tol_c·mass`
/// and smallest eigenvalue of `Σ w v vᵀ` at least `tol_e·mass`.
pub fn validate_target_with(m: &AtomicSphericalMeasure, centroid_tol: f64, eigen_tol: f64) -> TargetDiagnostics {
    let mass = m.mass();
    let centroid_norm = m.centroid().norm();
    let min_eigenvalue = second_moment_min_eigenvalue(m);
    let centroid_ok = mass > 0.0 && centroid_norm <= centroid_tol * mass;
    let spread_ok = mass > 0.0 && min_eigenvalue >= eigen_tol * mass;
    TargetDiagnostics { mass, centroid_norm, min_eigenvalue, centroid_ok, spread_ok, pass: centroid_ok && spread_ok }
}

/// [`validate_target_with`] at the default thresholds 1e-8 and 1e-6.
pub fn validate_target(m: &AtomicSphericalMeasure) -> TargetDiagnostics {
    validate_target_with(m, 1e-8, 1e-6)
}

fn second_moment_min_eigenvalue(m: &AtomicSphericalMeasure) -> f64 {
    let mut s = Matrix3::zeros();
    for a in &m.atoms {
        let v = a.direction();
        s += v * v.transpose() * a.w;
    }
    if m.dim == 2 {
        let s2 = Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
        SymmetricEigen::new(s2).eigenvalues.min()
    } else {
        SymmetricEigen::new(s).eigenvalues.min()
    }
}

#[derive(Debug, Clone)]
pub struct MinkowskiProblem {
    pub target: AtomicSphericalMeasure,
    pub gauge: GaugeBody,
    pub s: f64,
    /// Normal fan; every atom direction must appear in it.
    pub fan: Vec<Vec3>,
}

impl MinkowskiProblem {
    /// Problem on the fan of the target's own directions.
    pub fn new(target: AtomicSphericalMeasure, gauge: GaugeBody, s: f64) -> Self {
        let fan = target.directions();
        Self { target, gauge, s, fan }
    }

    /// Target weights aligned with the fan.
    pub fn aligned_weights(&self) -> Result<Vec<f64>> {
        let mut w = vec![0.0; self.fan.len()];
        for (k, a) in self.target.atoms.iter().enumerate() {
            let d = a.direction();
            let i = self
                .fan
                .iter()
                .position(|v| (v - d).norm() < 1e-9)
                .ok_or_else(|| GeoError::InvalidTarget(format!("atom {k} is not a fan direction")))?;
            w[i] += a.w;
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Sphere rule resolution.
    pub res: usize,
    /// Boundary samples per facet.
    pub per_facet: usize,
    /// Endpoint clustering exponent of the planar boundary rule.
    pub grading: f64,
    pub max_iter: usize,
    pub kkt_tol: f64,
    /// Stop once the objective drops by less than this (relative) over `window` iterations.
    pub rel_tol: f64,
    pub window: usize,
    pub max_backtracks: usize,
    /// Projection grid for the final X-ray perimeter of reports.
    pub proj_res: usize,
    /// Keep every iterate's support vector.
    pub trace_supports: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            res: 256,
            per_facet: 32,
            grading: 4.0,
            max_iter: 500,
            kkt_tol: 1e-5,
            rel_tol: 1e-8,
            window: 10,
            max_backtracks: 40,
            proj_res: 256,
            trace_supports: false,
        }
    }
}

/// Body, its area measure atoms and the perimeter from the measure.
#[derive(Debug, Clone)]
struct State {
    h: Vec<f64>,
    body: PolytopeBody,
    atoms: Vec<f64>,
    perimeter: f64,
}

struct Evaluator<'a> {
    gauge: &'a GaugeBody,
    s: f64,
    fan: &'a [Vec3],
    rule: QuadratureRule,
    opts: SolveOptions,
    /// Facets that must stay active. An inactive facet has zero gradient, so
    /// descent could never bring it back.
    required: Vec<bool>,
}

impl Evaluator<'_> {
    fn dim(&self) -> usize {
        self.gauge.dim()
    }

    fn bq(&self, body: &PolytopeBody) -> BoundaryQuadrature {
        boundary_rule_graded(body, self.opts.per_facet, self.opts.grading)
    }

    fn atoms(&self, body: &PolytopeBody) -> Result<Vec<f64>> {
        Ok(area_measure(body, self.gauge, self.s, &self.bq(body), &self.rule)?.weights())
    }

    /// `None` when the Wulff shape degenerates.
    fn state(&self, h: &[f64]) -> Result<Option<State>> {
        let body = match wulff_shape(self.dim(), self.fan, h) {
            Ok(b) => b,
            Err(_) => return Ok(None),
        };
        if body.facets().iter().zip(&self.required).any(|(f, r)| *r && !f.is_active()) {
            return Ok(None);
        }
        let atoms = self.atoms(&body)?;
        let n = self.dim() as f64;
        let sum: f64 = atoms.iter().zip(self.fan).map(|(a, v)| a * body.support(v)).sum();
        let perimeter = 2.0 / (n - self.s) * sum;
        Ok(Some(State { h: h.to_vec(), body, atoms, perimeter }))
    }

    /// Translate so the Steiner-point proxy `Σ a_i h_i v_i / Σ a_i` vanishes,
    /// then rescale by `lambda`; the atoms follow by homogeneity.
    fn normalize(&self, st: State, lambda: f64) -> State {
        let mut m = Matrix3::zeros();
        let mut p = Vec3::zeros();
        let mut total = 0.0;
        for ((f, v), h) in st.body.facets().iter().zip(self.fan).zip(&st.h) {
            m += v * v.transpose() * f.area;
            p += v * (f.area * h);
            total += f.area;
        }
        let x = if self.dim() == 2 {
            let m2 = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            m2.try_inverse().map(|inv| {
                let r = inv * nalgebra::Vector2::new(p.x, p.y);
                Vec3::new(-r[0], -r[1], 0.0)
            })
        } else {
            m.try_inverse().map(|inv| -(inv * p))
        }
        .unwrap_or_else(Vec3::zeros);
        let _ = total;
        let n = self.dim() as f64;
        let h: Vec<f64> = st.h.iter().zip(self.fan).map(|(h, v)| lambda * (h + x.dot(v))).collect();
        State {
            h,
            body: st.body.translated(&x).scaled(lambda),
            atoms: st.atoms.iter().map(|a| a * lambda.powf(n - 1.0 - self.s)).collect(),
            perimeter: st.perimeter * lambda.powf(n - self.s),
        }
    }
}

struct Descent {
    state: State,
    iterations: usize,
    trace: Vec<f64>,
    supports: Vec<Vec<f64>>,
    kkt: f64,
}

/// Objective value, its gradient, and the scale-invariant KKT residual
/// vector whose norm is the reported KKT residual.
struct Eval {
    value: f64,
    grad: Vec<f64>,
    resid: Vec<f64>,
}

impl Eval {
    fn kkt(&self) -> f64 {
        norm(&self.resid)
    }
}

type Oracle<'a> = dyn Fn(&State) -> Eval + Sync + 'a;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Removes from `r` its least-squares fit by a translation `x ↦ (x·v_i)`.
/// Translations leave the problem invariant, and the computed measure is only
/// balanced to quadrature accuracy, so that component can never be reduced.
fn project_translations(fan: &[Vec3], r: &mut [f64]) {
    let mut m = Matrix3::zeros();
    let mut b = Vec3::zeros();
    for (v, x) in fan.iter().zip(r.iter()) {
        m += v * v.transpose();
        b += v * *x;
    }
    if fan.iter().all(|v| v.z == 0.0) {
        m[(2, 2)] = 1.0;
    }
    if let Some(inv) = m.try_inverse() {
        let y = inv * b;
        for (v, x) in fan.iter().zip(r.iter_mut()) {
            *x -= y.dot(v);
        }
    }
}

fn initial_step(h: &[f64], g: &[f64]) -> f64 {
    let h_scale = h.iter().map(|x| x.abs()).sum::<f64>() / h.len() as f64;
    let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if gmax > 0.0 {
        0.1 * h_scale / gmax
    } else {
        0.0
    }
}

/// Forward-difference Jacobian of the residual vector, one column per
/// support value (backward where the forward body degenerates).
fn residual_jacobian(ev: &Evaluator, st: &State, e0: &Eval, oracle: &Oracle) -> Result<DMatrix<f64>> {
    let n = st.h.len();
    let d = 1e-6 * st.h.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    let cols: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            for sign in [1.0, -1.0] {
                let mut h = st.h.clone();
                h[i] += sign * d;
                if let Some(c) = ev.state(&h)? {
                    let r = oracle(&c).resid;
                    return Ok(r.iter().zip(&e0.resid).map(|(a, b)| (a - b) / (sign * d)).collect());
                }
            }
            Ok(vec![0.0; e0.resid.len()])
        })
        .collect();
    let mut j = DMatrix::zeros(e0.resid.len(), n);
    for (i, c) in cols.into_iter().enumerate() {
        j.set_column(i, &DVector::from_vec(c?));
    }
    Ok(j)
}

/// Two-phase descent. First gradient descent on the objective with Armijo
/// backtracking and Barzilai–Borwein step guesses. The objective is very flat
/// at its minimum, so once its quadrature noise defeats the line search (or
/// it stagnates) the KKT residual is driven to zero by damped Gauss–Newton
/// steps, which pins the optimum far more sharply. Each accepted iterate goes
/// through `renormalize`.
fn descend(ev: &Evaluator, start: State, oracle: &Oracle, renormalize: &(dyn Fn(State) -> State + Sync)) -> Result<Descent> {
    let opts = ev.opts;
    let mut st = renormalize(start);
    let mut e = oracle(&st);
    let mut trace = vec![e.value];
    let mut supports = if opts.trace_supports { vec![st.h.clone()] } else { Vec::new() };
    let mut step = initial_step(&st.h, &e.grad);
    let mut residual_phase = false;
    let mut damping = f64::NAN;
    let mut iterations = 0;
    while iterations < opts.max_iter && e.kkt() > opts.kkt_tol {
        let mut accepted = None;
        if !residual_phase {
            let gg: f64 = e.grad.iter().map(|x| x * x).sum();
            let mut alpha = step;
            for _ in 0..opts.max_backtracks {
                let trial: Vec<f64> = st.h.iter().zip(&e.grad).map(|(h, d)| h - alpha * d).collect();
                if let Some(cand) = ev.state(&trial)? {
                    let fc = oracle(&cand).value;
                    if fc.is_finite() && fc <= e.value - 1e-4 * alpha * gg {
                        accepted = Some((cand, alpha));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            residual_phase = accepted.is_none();
        }
        if residual_phase {
            let j = residual_jacobian(ev, &st, &e, oracle)?;
            let jtj = j.transpose() * &j;
            let jtr = j.transpose() * DVector::from_column_slice(&e.resid);
            if damping.is_nan() {
                damping = 1e-3 * jtj.trace() / st.h.len() as f64;
            }
            let kkt = e.kkt();
            for _ in 0..opts.max_backtracks {
                let mut a = jtj.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += damping;
                }
                let Some(delta) = a.cholesky().map(|c| c.solve(&jtr)) else {
                    damping *= 4.0;
                    continue;
                };
                let trial: Vec<f64> = st.h.iter().zip(delta.iter()).map(|(h, d)| h - d).collect();
                if let Some(cand) = ev.state(&trial)? {
                    let ec = oracle(&cand);
                    if ec.value.is_finite() && ec.kkt() < kkt {
                        damping /= 3.0;
                        accepted = Some((cand, 0.0));
                        break;
                    }
                }
                damping *= 4.0;
            }
        }
        let Some((cand, alpha)) = accepted else {
            return Err(GeoError::Stalled { iterations, kkt: e.kkt() });
        };
        let next = renormalize(cand);
        let en = oracle(&next);
        if !residual_phase {
            // BB1 step from the normalized iterates
            let sk: Vec<f64> = next.h.iter().zip(&st.h).map(|(a, b)| a - b).collect();
            let yk: Vec<f64> = en.grad.iter().zip(&e.grad).map(|(a, b)| a - b).collect();
            let sy: f64 = sk.iter().zip(&yk).map(|(a, b)| a * b).sum();
            let ss: f64 = sk.iter().map(|x| x * x).sum();
            step = if sy > 0.0 { (ss / sy).clamp(alpha * 1e-3, alpha * 1e3) } else { alpha * 2.0 };
        }
        st = next;
        e = en;
        iterations += 1;
        trace.push(e.value);
        if opts.trace_supports {
            supports.push(st.h.clone());
        }
        if trace.len() > opts.window {
            let old = trace[trace.len() - 1 - opts.window];
            if (old - e.value).abs() <= opts.rel_tol * e.value.abs() {
                residual_phase = true;
            }
        }
    }
    let kkt = e.kkt();
    Ok(Descent { state: st, iterations, trace, supports, kkt })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub solution: PolytopeBody,
    /// Support values of the reported solution on the fan.
    pub support: Vec<f64>,
    /// Dilation taking the unit-perimeter minimizer onto the solution:
    /// `c^{n-1-s} = 2 Σ μ_i h_i / (n-s)`.
    pub scale: f64,
    /// `max_i |A_i - μ_i| / max(μ_i, ε)` of the reported solution.
    pub residual: f64,
    /// The constant `(2n/(n-s))^{1/(n-s)}` and the residual it would give.
    pub nominal_scale: f64,
    pub nominal_residual: f64,
    /// Relative KKT residual of the unit-perimeter minimizer.
    pub kkt: f64,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub support_trace: Vec<Vec<f64>>,
}

fn max_relative_error(atoms: &[f64], target: &[f64]) -> f64 {
    let eps = 1e-12 * target.iter().fold(0.0f64, |m, x| m.max(*x));
    atoms
        .iter()
        .zip(target)
        .map(|(a, m)| (a - m).abs() / m.max(eps))
        .fold(0.0, f64::max)
}

/// Solves `μ = A_s(K, L, ·)` on the fan by minimizing the scale-invariant
/// `G(h) = (Σ μ_i h_i) P_s([h], L)^{-1/(n-s)}`, whose gradient is
/// `P^{-1/(n-s)} (μ - (Σμh / ((n-s) P)) 2A)`, starting from `h ≡ 1`.
pub fn solve_minkowski(p: &MinkowskiProblem, opts: &SolveOptions) -> Result<SolveReport> {
    solve_minkowski_from(p, &vec![1.0; p.fan.len()], opts)
}

pub fn solve_minkowski_from(p: &MinkowskiProblem, h0: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    check_s(p.s)?;
    if p.gauge.dim() != p.target.dim {
        return Err(GeoError::InvalidTarget("target and gauge dimensions differ".into()));
    }
    let diag = validate_target(&p.target);
    if !diag.pass {
        return Err(GeoError::InvalidTarget(format!(
            "centroid {:.3e}, smallest second-moment eigenvalue {:.3e}, mass {:.3e}",
            diag.centroid_norm, diag.min_eigenvalue, diag.mass
        )));
    }
    let mu = p.aligned_weights()?;
    let n = p.gauge.dim() as f64;
    let s = p.s;
    let mut ev = Evaluator { gauge: &p.gauge, s, fan: &p.fan, rule: sphere_rule(p.gauge.dim(), opts.res), opts: *opts, required: Vec::new() };
    let start = ev.state(h0)?.ok_or(GeoError::WulffDegenerate(0.0))?;
    ev.required = start.body.facets().iter().zip(&mu).map(|(f, w)| f.is_active() && *w > 0.0).collect();
    let mu_norm = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
    let oracle = |st: &State| -> Eval {
        let m: f64 = mu.iter().zip(&st.h).map(|(a, b)| a * b).sum();
        let pf = st.perimeter.powf(-1.0 / (n - s));
        let lambda = m / ((n - s) * st.perimeter);
        let mut r: Vec<f64> = mu.iter().zip(&st.atoms).map(|(u, a)| u - lambda * 2.0 * a).collect();
        project_translations(&p.fan, &mut r);
        Eval { value: m * pf, grad: r.iter().map(|x| x * pf).collect(), resid: r.iter().map(|x| x / mu_norm).collect() }
    };
    // keep P = 1 and the Steiner proxy at the origin
    let renorm = |st: State| {
        let lambda = st.perimeter.powf(-1.0 / (n - s));
        ev.normalize(st, lambda)
    };
    let d = descend(&ev, start, &oracle, &renorm)?;

    let k0 = &d.state;
    let m: f64 = mu.iter().zip(&k0.h).map(|(a, b)| a * b).sum();
    let scale = (2.0 * m / ((n - s) * k0.perimeter)).powf(1.0 / (n - 1.0 - s));
    let solution = k0.body.scaled(scale);
    let residual = max_relative_error(&ev.atoms(&solution)?, &mu);
    let nominal_scale = (2.0 * n / (n - s)).powf(1.0 / (n - s));
    let nominal_residual = max_relative_error(&ev.atoms(&k0.body.scaled(nominal_scale))?, &mu);
    Ok(SolveReport {
        support: k0.h.iter().map(|h| h * scale).collect(),
        solution,
        scale,
        residual,
        nominal_scale,
        nominal_residual,
        kkt: d.kkt,
        iterations: d.iterations,
        objective_trace: d.trace,
        support_trace: d.supports,
    })
}

/// Forward map used to build round-trip targets: the area measure of `body`
/// at the given resolutions, balanced with [`balance`].
pub fn forward_measure(body: &PolytopeBody, gauge: &GaugeBody, s: f64, opts: &SolveOptions) -> Result<AtomicSphericalMeasure> {
    let rule = sphere_rule(body.dim(), opts.res);
    let m = area_measure(body, gauge, s, &boundary_rule_graded(body, opts.per_facet, opts.grading), &rule)?;
    balance(&m)
}

/// Smallest weighted change of weights that puts the centroid at the origin:
/// `w_i (1 - v_i·y)` with `(Σ w v vᵀ) y = Σ w v`. Relative changes keep zero
/// atoms at zero. Computed measures are only balanced to quadrature accuracy.
pub fn balance(m: &AtomicSphericalMeasure) -> Result<AtomicSphericalMeasure> {
    let c = m.centroid();
    let mut g = Matrix3::zeros();
    for a in &m.atoms {
        let v = a.direction();
        g += v * v.transpose() * a.w;
    }
    if m.dim == 2 {
        g[(2, 2)] = 1.0;
    }
    let y = g
        .try_inverse()
        .map(|inv| inv * c)
        .ok_or_else(|| GeoError::InvalidTarget("directions do not span".into()))?;
    let atoms = m.atoms.iter().map(|a| Atom::new(a.direction(), a.w * (1.0 - a.direction().dot(&y)))).collect();
    AtomicSphericalMeasure::new(m.dim, atoms)
}

/// Best translation `x` minimizing `Σ (h_i + x·v_i - g_i)²` applied to `h`,
/// then the largest relative deviation from `g`.
pub fn support_error_up_to_translation(fan: &[Vec3], h: &[f64], g: &[f64]) -> f64 {
    let mut m = Matrix3::zeros();
    let mut r = Vec3::zeros();
    for ((v, a), b) in fan.iter().zip(h).zip(g) {
        m += v * v.transpose();
        r += v * (b - a);
    }
    let x = if fan.iter().all(|v| v.z == 0.0) {
        let m2 = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        m2.try_inverse()
            .map(|inv| {
                let y = inv * nalgebra::Vector2::new(r.x, r.y);
                Vec3::new(y[0], y[1], 0.0)
            })
            .unwrap_or_else(Vec3::zeros)
    } else {
        m.try_inverse().map(|inv| inv * r).unwrap_or_else(Vec3::zeros)
    };
    fan.iter()
        .zip(h)
        .zip(g)
        .map(|((v, a), b)| (a + x.dot(v) - b).abs() / b.abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricReport {
    #[serde(skip)]
    pub optimizer: PolytopeBody,
    pub support: Vec<f64>,
    /// `P_s(K, L) / |K|^{(n-s)/n}` of the optimizer, with the X-ray perimeter.
    pub gamma_estimate: f64,
    /// `(max - min) / mean` of the recentred support values.
    pub h_spread: f64,
    /// `(max - min) / mean` of `A_i / a_i` over active facets.
    pub density_spread: f64,
    /// `max / min - 1` of `Ṽ_{n+s}` at the facet centroids.
    pub vtilde_spread: f64,
    pub kkt: f64,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub support_trace: Vec<Vec<f64>>,
}

fn spread(xs: &[f64]) -> f64 {
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (hi - lo) / mean
}

/// Support values of the ellipse (ellipsoid) with semi-axes 1.2, 0.85 (, 1)
/// on the fan: a deliberately non-round starting body.
pub fn elliptic_start(fan: &[Vec3]) -> Vec<f64> {
    fan.iter().map(|v| (1.44 * v.x * v.x + 0.7225 * v.y * v.y + v.z * v.z).sqrt()).collect()
}

/// Minimizes `ψ(h) = P_s([h], L) / |[h]|^{(n-s)/n}` on the fan, with
/// gradient `(2A - ((n-s)P/(nV)) a) / V^{(n-s)/n}`.
pub fn isoperimetric_search(gauge: &GaugeBody, s: f64, fan: &[Vec3], opts: &SolveOptions) -> Result<IsoperimetricReport> {
    isoperimetric_search_from(gauge, s, fan, &elliptic_start(fan), opts)
}

pub fn isoperimetric_search_from(gauge: &GaugeBody, s: f64, fan: &[Vec3], h0: &[f64], opts: &SolveOptions) -> Result<IsoperimetricReport> {
    check_s(s)?;
    let n = gauge.dim() as f64;
    let mut ev = Evaluator { gauge, s, fan, rule: sphere_rule(gauge.dim(), opts.res), opts: *opts, required: Vec::new() };
    let start = ev.state(h0)?.ok_or(GeoError::WulffDegenerate(0.0))?;
    ev.required = start.body.facets().iter().map(|f| f.is_active()).collect();
    let e = (n - s) / n;
    let oracle = |st: &State| -> Eval {
        let v = st.body.volume();
        let areas = st.body.facet_areas();
        let kappa = (n - s) * st.perimeter / (n * v);
        let mut r: Vec<f64> = st.atoms.iter().zip(&areas).map(|(a, ar)| 2.0 * a - kappa * ar).collect();
        project_translations(fan, &mut r);
        let norm2a = 2.0 * norm(&st.atoms);
        let ve = v.powf(e);
        Eval { value: st.perimeter / ve, grad: r.iter().map(|x| x / ve).collect(), resid: r.iter().map(|x| x / norm2a).collect() }
    };
    // unit volume, Steiner proxy at the origin
    let renorm = |st: State| {
        let lambda = st.body.volume().powf(-1.0 / n);
        ev.normalize(st, lambda)
    };
    let d = descend(&ev, start, &oracle, &renorm)?;
    let k = d.state;
    let body = &k.body;
    let active: Vec<usize> = (0..fan.len()).filter(|&i| body.facets()[i].is_active()).collect();
    let dens: Vec<f64> = active.iter().map(|&i| k.atoms[i] / body.facets()[i].area).collect();
    let centroids = BoundaryQuadrature {
        samples: active
            .iter()
            .map(|&i| BoundarySample {
                z: body.facets()[i].centroid().expect("active facet"),
                normal: fan[i],
                weight: body.facets()[i].area,
                facet: i,
            })
            .collect(),
    };
    let vt = vtilde_samples(body, gauge, s, &centroids, &ev.rule)?;
    let (lo, hi) = vt.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let p = ps_xray(body, gauge, s, &ev.rule, opts.proj_res)?.value;
    let hs = body.support_at_normals();
    Ok(IsoperimetricReport {
        gamma_estimate: p / body.volume().powf(e),
        h_spread: spread(&active.iter().map(|&i| hs[i]).collect::<Vec<_>>()),
        density_spread: spread(&dens),
        vtilde_spread: hi / lo - 1.0,
        support: k.h.clone(),
        optimizer: k.body,
        kkt: d.kkt,
        iterations: d.iterations,
        objective_trace: d.trace,
        support_trace: d.supports,
    })
}

/// `ψ(h) = P_s / V^{(n-s)/n}` with the perimeter from the area measure.
pub fn isoperimetric_ratio(gauge: &GaugeBody, s: f64, fan: &[Vec3], h: &[f64], opts: &SolveOptions) -> Result<f64> {
    let ev = Evaluator { gauge, s, fan, rule: sphere_rule(gauge.dim(), opts.res), opts: *opts, required: Vec::new() };
    let st = ev.state(h)?.ok_or(GeoError::WulffDegenerate(0.0))?;
    let n = gauge.dim() as f64;
    Ok(st.perimeter / st.body.volume().powf((n - s) / n))
}

/// Measure with equal weights on the given directions.
pub fn uniform_target(dim: usize, dirs: &[Vec3], w: f64) -> Result<AtomicSphericalMeasure> {
    AtomicSphericalMeasure::new(dim, dirs.iter().map(|v| Atom::new(*v, w)).collect())
}
