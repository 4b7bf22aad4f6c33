//! Named experiment presets. Each runs one acceptance check at fixed
//! settings and returns a report of named pass/fail checks plus the raw
//! numbers. Reports serialize to byte-identical JSON for identical seeds.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bodies::{cube, regular_fan_2d, regular_polygon, wulff_shape, GaugeBody, PerturbationField, PolytopeBody, SmoothBody};
use crate::error::{GeoError, Result};
use crate::fracperim::{ludwig_limits, ps_montecarlo, ps_xray};
use crate::limits::{lemma_conv_check, lemma_xzlem_check, limit_s0_check};
use crate::measures::{area_measure, identity_asint_check, lemma_id_check, variational_check};
use crate::minkowski::{
    forward_measure, isoperimetric_search, solve_minkowski_from, support_error_up_to_translation, uniform_target,
    validate_target, MinkowskiProblem, SolveOptions,
};
use crate::measures::{Atom, AtomicSphericalMeasure};
use crate::quadrature::{boundary_rule_graded, sphere_rule, RandomSource};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    /// Human-readable acceptance condition on `value`.
    pub limit: String,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), pass: value <= bound, value, limit: format!("<= {bound}") }
    }

    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), pass: value >= bound, value, limit: format!(">= {bound}") }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), pass: (lo..=hi).contains(&value), value, limit: format!("in [{lo}, {hi}]") }
    }

    fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), pass, value: if pass { 1.0 } else { 0.0 }, limit: "== 1".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetReport {
    pub preset: String,
    pub criterion: u8,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Informational numbers that do not decide the outcome.
    pub data: Value,
}

impl PresetReport {
    fn new(preset: &str, criterion: u8, checks: Vec<Check>, data: Value) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { preset: preset.into(), criterion, pass, checks, data }
    }

    /// Pretty JSON; keys are sorted and floats round-trip exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = format!("{} {} (criterion {})\n", if self.pass { "PASS" } else { "FAIL" }, self.preset, self.criterion);
        for c in &self.checks {
            out.push_str(&format!("  {} {}: {:e} {}\n", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.limit));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetOptions {
    pub seed: u64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self { seed: 42 }
    }
}

/// Preset names in criterion order, plus the quick centroid check.
pub const PRESETS: &[(&str, u8)] = &[
    ("route-agreement", 1),
    ("homogeneity", 2),
    ("centroid", 3),
    ("asint-identity", 4),
    ("variational", 5),
    ("swap-identity", 6),
    ("small-s", 7),
    ("pointwise-large-s", 8),
    ("endpoint-limits", 9),
    ("shadow-curvature", 10),
    ("minkowski-roundtrip", 11),
    ("subsphere", 12),
    ("isoperimetric", 13),
    ("determinism", 14),
    ("centroid-check", 3),
];

pub fn run(name: &str, opts: &PresetOptions) -> Result<PresetReport> {
    match name {
        "route-agreement" => route_agreement(opts),
        "homogeneity" => homogeneity(),
        "centroid" => centroid(opts),
        "asint-identity" => asint_identity(opts),
        "variational" => variational(),
        "swap-identity" => swap_identity(),
        "small-s" => small_s(),
        "pointwise-large-s" => pointwise_large_s(),
        "endpoint-limits" => endpoint_limits(),
        "shadow-curvature" => shadow_curvature(),
        "minkowski-roundtrip" => minkowski_roundtrip(),
        "subsphere" => subsphere(),
        "isoperimetric" => isoperimetric(),
        "determinism" => determinism(opts),
        "centroid-check" => centroid_check(),
        other => Err(GeoError::Invalid(format!(
            "unknown preset \"{other}\"; known: {}",
            PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn pentagon() -> PolytopeBody {
    regular_polygon(5, 1.0, 0.0)
}

/// A triangle without rotational symmetry, so its centroid is not zero by
/// symmetry alone.
pub fn asymmetric_triangle() -> PolytopeBody {
    let normals = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(-1.0, -1.0, 0.0).normalize()];
    wulff_shape(2, &normals, &[1.0, 0.5, 0.3]).expect("triangle")
}

/// Hexagon with a seeded random fan rotation and support values in [0.75, 1.25].
pub fn random_hexagon(seed: u64) -> PolytopeBody {
    let mut rng = RandomSource::new(seed).with_stream(6).rng();
    let fan = regular_fan_2d(6, rng.gen_range(0.0..std::f64::consts::FRAC_PI_3));
    let h: Vec<f64> = (0..6).map(|_| rng.gen_range(0.75..1.25)).collect();
    wulff_shape(2, &fan, &h).expect("hexagon")
}

fn suite(opts: &PresetOptions) -> Vec<(&'static str, PolytopeBody)> {
    vec![("square", cube(2, 1.0)), ("triangle", asymmetric_triangle()), ("hexagon", random_hexagon(opts.seed))]
}

fn route_agreement(opts: &PresetOptions) -> Result<PresetReport> {
    let configs: [(&str, PolytopeBody, &str, GaugeBody, f64); 5] = [
        ("square", cube(2, 1.0), "ball", GaugeBody::ball(2), 0.3),
        ("square", cube(2, 1.0), "square", GaugeBody::cube(2), 0.7),
        ("pentagon", pentagon(), "ball", GaugeBody::ball(2), 0.7),
        ("pentagon", pentagon(), "square", GaugeBody::cube(2), 0.5),
        ("cube", cube(3, 1.0), "cube", GaugeBody::cube(3), 0.5),
    ];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (k, (bname, body, gname, gauge, s)) in configs.iter().enumerate() {
        let rule = sphere_rule(body.dim(), 512);
        let x = ps_xray(body, gauge, *s, &rule, 512)?;
        let mc = ps_montecarlo(body, gauge, *s, 1_000_000, &RandomSource::new(opts.seed).with_stream(k as u64))?;
        let dev = (x.value - mc.value).abs();
        let allowed = 3.0 * mc.stderr + 0.01 * x.value;
        checks.push(Check::at_most(format!("{bname}/{gname}/s={s}: |xray - mc| / (3 se + 1%)"), dev / allowed, 1.0));
        rows.push(json!({"body": bname, "gauge": gname, "s": s, "xray": x, "montecarlo": mc}));
    }
    Ok(PresetReport::new("route-agreement", 1, checks, json!({"rows": rows})))
}

fn homogeneity() -> Result<PresetReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, body, gauge, s) in [("square", cube(2, 1.0), GaugeBody::ball(2), 0.5), ("cube", cube(3, 1.0), GaugeBody::ball(3), 0.3)] {
        let n = body.dim() as f64;
        let rule = sphere_rule(body.dim(), 256);
        let lambdas = [1.0f64, 2.0, 4.0];
        let logs: Vec<(f64, f64)> = lambdas
            .iter()
            .map(|&l| Ok((l.ln(), ps_xray(&body.scaled(l), &gauge, s, &rule, 256)?.value.ln())))
            .collect::<Result<_>>()?;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let slope = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / logs.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
        checks.push(Check::at_most(format!("{name}/s={s}: |slope - (n - s)|"), (slope - (n - s)).abs(), 1e-3));
        rows.push(json!({"body": name, "s": s, "slope": slope, "expected": n - s}));
    }
    Ok(PresetReport::new("homogeneity", 2, checks, json!({"rows": rows})))
}

fn relative_centroid(body: &PolytopeBody, per_facet: usize, res: usize) -> Result<f64> {
    let a = area_measure(body, &GaugeBody::ball(2), 0.5, &boundary_rule_graded(body, per_facet, 4.0), &sphere_rule(2, res))?;
    Ok(a.centroid().norm() / a.mass())
}

fn centroid(opts: &PresetOptions) -> Result<PresetReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, body) in suite(opts) {
        let coarse = relative_centroid(&body, 64, 512)?;
        let fine = relative_centroid(&body, 128, 1024)?;
        checks.push(Check::at_most(format!("{name}: |centroid| / mass"), coarse, 1e-3));
        // at least halves on refinement; exact zeros stay zero
        let ratio = if coarse == 0.0 { if fine == 0.0 { 0.0 } else { f64::INFINITY } } else { fine / coarse };
        checks.push(Check::at_most(format!("{name}: refinement ratio"), ratio, 0.65));
        rows.push(json!({"body": name, "coarse": coarse, "fine": fine}));
    }
    Ok(PresetReport::new("centroid", 3, checks, json!({"rows": rows, "s": 0.5, "gauge": "ball"})))
}

fn centroid_check() -> Result<PresetReport> {
    let mut checks = Vec::new();
    for (name, body) in [("square", cube(2, 1.0)), ("triangle", asymmetric_triangle())] {
        checks.push(Check::at_most(format!("{name}: |centroid| / mass"), relative_centroid(&body, 32, 256)?, 1e-3));
    }
    Ok(PresetReport::new("centroid-check", 3, checks, json!({"s": 0.5, "gauge": "ball", "per_facet": 32, "res": 256})))
}

fn asint_identity(opts: &PresetOptions) -> Result<PresetReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, body) in suite(opts) {
        let c = identity_asint_check(&body, &GaugeBody::ball(2), 0.5, &boundary_rule_graded(&body, 64, 4.0), &sphere_rule(2, 512), 512)?;
        checks.push(Check::at_most(format!("{name}: relative error"), c.rel_error, 0.01));
        rows.push(json!({"body": name, "perimeter": c.left, "pairing": c.right}));
    }
    Ok(PresetReport::new("asint-identity", 4, checks, json!({"rows": rows})))
}

fn variational() -> Result<PresetReport> {
    // normals of the square: +x, -x, +y, -y
    let body = cube(2, 1.0);
    let gauge = GaugeBody::ball(2);
    let (s, n) = (0.5, 2.0);
    let bq = boundary_rule_graded(&body, 64, 4.0);
    let rule = sphere_rule(2, 512);
    let fields = [
        ("one-facet", vec![1.0, 0.0, 0.0, 0.0]),
        ("mixed", vec![1.0, -0.5, 0.25, 0.75]),
        ("constant", vec![1.0; 4]),
    ];
    let mass = area_measure(&body, &gauge, s, &bq, &rule)?.mass();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, f) in fields {
        let row = variational_check(&body, &gauge, s, &PerturbationField::new(f)?, &[1e-3], &bq, &rule, 512)?[0];
        checks.push(Check::at_most(format!("{name}: |FD - 2n<f,A>| / |2n<f,A>|"), row.rel_error(2.0 * n), 0.02));
        rows.push(json!({"field": name, "fd": row.finite_difference, "pairing": row.pairing, "rel_error_coefficient_2": row.rel_error(2.0)}));
    }
    let tr = PerturbationField::translation(body.normals(), &Vec3::new(0.3, -0.2, 0.0));
    let row = variational_check(&body, &gauge, s, &tr, &[1e-3], &bq, &rule, 512)?[0];
    checks.push(Check::at_most("translation: |FD| / mass", row.finite_difference.abs() / mass, 1e-3));
    rows.push(json!({"field": "translation", "fd": row.finite_difference, "pairing": row.pairing}));
    Ok(PresetReport::new("variational", 5, checks, json!({"rows": rows, "mass": mass, "t": 1e-3})))
}

fn swap_identity() -> Result<PresetReport> {
    let body = cube(2, 1.0);
    let bq = boundary_rule_graded(&body, 64, 4.0);
    let rule = sphere_rule(2, 512);
    let fields = [
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0],
        vec![1.0, -1.0, 2.0, 0.5],
        vec![1.0; 4],
    ];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (k, f) in fields.into_iter().enumerate() {
        let c = lemma_id_check(&body, &GaugeBody::ball(2), 0.5, &PerturbationField::new(f.clone())?, &bq, &rule)?;
        checks.push(Check::at_most(format!("field {k}: relative gap"), c.rel_error, 0.02));
        rows.push(json!({"field": f, "left": c.left, "right": c.right}));
    }
    Ok(PresetReport::new("swap-identity", 6, checks, json!({"rows": rows})))
}

fn small_s() -> Result<PresetReport> {
    let body = cube(2, 1.0);
    let s_list = [0.3, 0.1, 0.03, 0.01];
    let bq = boundary_rule_graded(&body, 64, 4.0);
    let rule = sphere_rule(2, 512);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (gname, gauge) in [("ball", GaugeBody::ball(2)), ("square", GaugeBody::cube(2))] {
        let table = limit_s0_check(&body, &gauge, &s_list, &bq, &rule)?;
        let worst = |s: f64, f: &dyn Fn(&crate::limits::SmallSRow) -> f64| {
            table.iter().filter(|r| r.s == s).map(f).fold(0.0f64, |m, d| m.max(d))
        };
        let at_end: Vec<f64> = table.iter().filter(|r| r.s == 0.01).map(|r| r.ratio).collect();
        let (lo, hi) = at_end.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
        checks.push(Check::within(format!("{gname}: min ratio at s=0.01"), lo, 0.98, 1.02));
        checks.push(Check::within(format!("{gname}: max ratio at s=0.01"), hi, 0.98, 1.02));
        let devs: Vec<f64> = s_list.iter().map(|&s| worst(s, &|r| (r.ratio - 1.0).abs())).collect();
        checks.push(Check::flag(format!("{gname}: deviation decreasing in s"), devs.windows(2).all(|w| w[1] < w[0])));
        let normalized: Vec<f64> = s_list.iter().map(|&s| worst(s, &|r| (r.ratio_normalized - 1.0).abs())).collect();
        rows.push(json!({"gauge": gname, "rows": table, "deviation": devs, "deviation_of_ratio_over_n": normalized}));
    }
    Ok(PresetReport::new("small-s", 7, checks, json!({"tables": rows})))
}

fn pointwise_large_s() -> Result<PresetReport> {
    let s = 0.99;
    let cases = [
        ("disc", SmoothBody::ball(2, 1.0)?, Vec3::x()),
        ("ball", SmoothBody::ball(3, 1.0)?, Vec3::z()),
        ("ellipse(2,1)", SmoothBody::ellipsoid(2, &[2.0, 1.0])?, Vec3::new(1.0, 1.0, 0.0).normalize()),
    ];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, body, v) in cases {
        let gauge = GaugeBody::ball(body.dim());
        let row = lemma_conv_check(&body, &gauge, &v, &[s], 256)?[0];
        checks.push(Check::within(format!("{name}: LHS/RHS at s=0.99"), row.ratio, 0.97, 1.03));
        rows.push(json!({"body": name, "row": row}));
    }
    Ok(PresetReport::new("pointwise-large-s", 8, checks, json!({"rows": rows})))
}

fn endpoint_limits() -> Result<PresetReport> {
    let body = cube(2, 1.0);
    let gauge = GaugeBody::ball(2);
    let rows = ludwig_limits(&body, &gauge, &[0.01, 0.99], &sphere_rule(2, 512), 512)?;
    let small = rows[0];
    let large = rows[1];
    // Z B² = 2 B², so P(K, Z B²) is twice the Euclidean perimeter
    let closed_form = 2.0 * body.surface_area();
    let checks = vec![
        Check::at_most("s P_s vs n|K||L| at s=0.01", (small.small_s - small.small_target).abs() / small.small_target, 0.02),
        Check::at_most("(1-s) P_s vs P(K, ZL) at s=0.99", (large.large_s - large.large_target).abs() / large.large_target, 0.03),
        Check::at_most("P(K, ZL) vs closed form", (large.large_target - closed_form).abs() / closed_form, 1e-3),
    ];
    Ok(PresetReport::new("endpoint-limits", 9, checks, json!({"rows": rows, "closed_form_large": closed_form})))
}

fn shadow_curvature() -> Result<PresetReport> {
    let bodies = [SmoothBody::ellipsoid(3, &[1.0, 2.0, 3.0])?, SmoothBody::ellipsoid(3, &[0.5, 1.0, 1.5])?];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (b, body) in bodies.iter().enumerate() {
        for (k, (v, w)) in [
            (Vec3::new(1.0, 1.0, 1.0), Vec3::new(1.0, -1.0, 0.0)),
            (Vec3::new(0.2, -0.5, 1.0), Vec3::new(1.0, 0.0, 0.0)),
            (Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.3, 1.0, 0.0)),
        ]
        .into_iter()
        .enumerate()
        {
            let v = v.normalize();
            // tangent direction: project w onto v⊥
            let u = (w - v * w.dot(&v)).normalize();
            let c = lemma_xzlem_check(body, &v, &u)?;
            checks.push(Check::at_most(format!("ellipsoid {b}, direction {k}: relative error"), c.rel_error, 1e-8));
            rows.push(json!({"ellipsoid": body.axes(), "v": v.as_slice(), "u": u.as_slice(), "check": c}));
        }
    }
    Ok(PresetReport::new("shadow-curvature", 10, checks, json!({"rows": rows})))
}

fn minkowski_roundtrip() -> Result<PresetReport> {
    let gauge = GaugeBody::ball(2);
    let s = 0.5;
    let opts = SolveOptions::default();
    let irregular_fan = regular_fan_2d(5, 0.2);
    let cases = [
        // h ≡ 1 is the regular pentagon itself, so start elsewhere
        ("regular pentagon", pentagon(), vec![1.3, 0.8, 1.1, 0.9, 1.2]),
        ("irregular pentagon", wulff_shape(2, &irregular_fan, &[1.0, 0.8, 1.2, 0.9, 1.1])?, vec![1.0; 5]),
    ];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (name, body, h0) in cases {
        let mu = forward_measure(&body, &gauge, s, &opts)?;
        let p = MinkowskiProblem::new(mu, gauge.clone(), s);
        let rep = solve_minkowski_from(&p, &h0, &opts)?;
        let recovery = support_error_up_to_translation(&p.fan, &rep.support, body.support_values());
        checks.push(Check::at_most(format!("{name}: max relative atom error"), rep.residual, 0.02));
        checks.push(Check::at_most(format!("{name}: support recovery up to translation"), recovery, 0.02));
        checks.push(Check::at_most(format!("{name}: iterations"), rep.iterations as f64, 499.0));
        rows.push(json!({
            "body": name,
            "scale": rep.scale,
            "residual": rep.residual,
            "nominal_scale": rep.nominal_scale,
            "nominal_residual": rep.nominal_residual,
            "kkt": rep.kkt,
            "iterations": rep.iterations,
            "support": rep.support,
            "objective_trace": rep.objective_trace,
        }));
    }
    Ok(PresetReport::new("minkowski-roundtrip", 11, checks, json!({"rows": rows, "s": s, "gauge": "ball"})))
}

fn subsphere() -> Result<PresetReport> {
    let at = |t: f64| Atom::new(Vec3::new(t.cos(), t.sin(), 0.0), 1.0);
    let pair = AtomicSphericalMeasure::new(2, vec![at(0.0), at(std::f64::consts::PI)])?;
    let triple = AtomicSphericalMeasure::new(2, (0..3).map(|k| at(std::f64::consts::TAU * k as f64 / 3.0)).collect())?;
    let dp = validate_target(&pair);
    let dt = validate_target(&triple);
    let square = validate_target(&uniform_target(2, cube(2, 1.0).normals(), 1.0)?);
    let checks = vec![
        Check::flag("antipodal pair rejected", !dp.pass),
        Check::flag("120 degree triple accepted", dt.pass),
        Check::at_most("triple: |min eigenvalue - mass/2|", (dt.min_eigenvalue - dt.mass / 2.0).abs(), 1e-12),
        Check::flag("square accepted", square.pass),
    ];
    Ok(PresetReport::new("subsphere", 12, checks, json!({"pair": dp, "triple": dt, "square": square})))
}

fn isoperimetric() -> Result<PresetReport> {
    let fan = regular_fan_2d(64, 0.0);
    let opts = SolveOptions { res: 256, per_facet: 16, ..SolveOptions::default() };
    let s = 0.5;
    let ball = isoperimetric_search(&GaugeBody::ball(2), s, &fan, &opts)?;
    let square = isoperimetric_search(&GaugeBody::cube(2), s, &fan, &opts)?;
    let checks = vec![
        Check::at_most("ball gauge: h spread", ball.h_spread, 1e-3),
        Check::at_most("ball gauge: A_i/a_i spread", ball.density_spread, 0.02),
        Check::at_most("square gauge: Vtilde spread", square.vtilde_spread, 0.05),
        Check::at_least("square gauge: h spread", square.h_spread, 0.05),
    ];
    Ok(PresetReport::new("isoperimetric", 13, checks, json!({"ball": ball, "square": square, "s": s, "normals": 64})))
}

fn determinism(opts: &PresetOptions) -> Result<PresetReport> {
    let mut checks = Vec::new();
    for &(name, _) in PRESETS.iter().filter(|p| p.0 != "determinism") {
        let a = run(name, opts)?.to_json();
        let b = run(name, opts)?.to_json();
        checks.push(Check::flag(format!("{name}: identical output"), a == b));
    }
    Ok(PresetReport::new("determinism", 14, checks, json!({"seed": opts.seed})))
}
