//! `fracgeo`: fractional perimeters, area measures, limit tables, the
//! Minkowski solver and the isoperimetric search from the command line.
//!
//! Exit status: 0 on success, 2 on invalid input, 1 on numerical failure or
//! a preset whose checks fail.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracgeo_core::bodies::{cube, regular_fan_2d, regular_polygon};
use fracgeo_core::error::check_s;
use fracgeo_core::fracperim::{ps_linesample, ps_montecarlo, ps_xray};
use fracgeo_core::limits::{lemma_conv_check, limit_s0_check};
use fracgeo_core::measures::{area_measure, identity_asint_check};
use fracgeo_core::minkowski::{isoperimetric_search, solve_minkowski, MinkowskiProblem, SolveOptions};
use fracgeo_core::presets::{self, asymmetric_triangle, PresetOptions};
use fracgeo_core::quadrature::{boundary_rule_graded, sphere_rule};
use fracgeo_core::schema::{body_from_str, body_to_json, gauge_from_str, target_from_str};
use fracgeo_core::{with_threads, GaugeBody, GeoError, PolytopeBody, RandomSource, SmoothBody, Vec3};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "fracgeo", version, about = "Anisotropic fractional perimeters of convex bodies")]
struct Cli {
    /// Worker thread cap (0 = all cores).
    #[arg(long, global = true, env = "FRACGEO_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fractional perimeter by one route, as JSON {value, stderr, route, cost}.
    Perimeter(PerimeterArgs),
    /// Fractional area measure on the facet normals plus its diagnostics.
    AreaMeasure(MeasureArgs),
    /// CSV table (s, id, lhs, rhs, ratio) of an endpoint limit.
    Limits(LimitArgs),
    /// Solve the Minkowski problem for an atomic target measure.
    Solve(SolveArgs),
    /// Search for the isoperimetric optimizer on a regular fan of normals.
    Isoperimetric(IsoArgs),
    /// Run a named acceptance preset.
    Preset(PresetArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Body file (JSON) or one of: square, cube, triangle, pentagon, hexagon.
    #[arg(long, default_value = "square")]
    body: String,
    /// Gauge name (ball, square, cube), JSON file or inline JSON.
    #[arg(long, default_value = "ball")]
    gauge: String,
    /// Sphere rule resolution.
    #[arg(long, default_value_t = 256)]
    res: usize,
    /// Projection grid per axis for the X-ray route.
    #[arg(long, default_value_t = 256)]
    proj_res: usize,
    /// Boundary samples per facet.
    #[arg(long, default_value_t = 32)]
    per_facet: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    Xray,
    Mc,
    Linesample,
}

#[derive(Args, Debug)]
struct PerimeterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, value_enum, default_value_t = Route::Xray)]
    route: Route,
    /// Samples for the random routes.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    s: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LimitKind {
    /// s → 0 per facet of a polytope: s A_i against n (|L|/2) a_i.
    Small,
    /// s → 1 at boundary points of an ellipsoid: scaled chord integral
    /// against half the curvature integral.
    Large,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = LimitKind::Small)]
    kind: LimitKind,
    /// Comma-separated s values.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.1,0.03,0.01")]
    s_list: Vec<f64>,
    /// Ellipsoid semi-axes for `--kind large`; replaces `--body`.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    axes: Vec<f64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Target measure file: {"atoms": [{"v": [..], "w": ..}, ..]}.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value = "ball")]
    gauge: String,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, default_value_t = 256)]
    res: usize,
    #[arg(long, default_value_t = 32)]
    per_facet: usize,
    #[arg(long, default_value_t = 256)]
    proj_res: usize,
    /// Keep every iterate's support vector.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IsoArgs {
    #[arg(long, default_value = "ball")]
    gauge: String,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    s: f64,
    /// Number of facet normals (planar fan).
    #[arg(long, default_value_t = 64)]
    normals: usize,
    #[arg(long, default_value_t = 256)]
    res: usize,
    #[arg(long, default_value_t = 16)]
    per_facet: usize,
    #[arg(long, default_value_t = 256)]
    proj_res: usize,
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// Preset name; `list` prints the names.
    name: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report here and print the check summary instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Self { code: if e.is_validation() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_body(arg: &str) -> Result<PolytopeBody, Failure> {
    Ok(match arg {
        "square" => cube(2, 1.0),
        "cube" => cube(3, 1.0),
        "triangle" => asymmetric_triangle(),
        "pentagon" => regular_polygon(5, 1.0, 0.0),
        "hexagon" => regular_polygon(6, 1.0, 0.0),
        path => body_from_str(&read(Path::new(path))?)?,
    })
}

fn load_gauge(arg: &str, dim: usize) -> Result<GaugeBody, Failure> {
    let path = Path::new(arg);
    let text = if !matches!(arg, "ball" | "square" | "cube") && path.is_file() { read(path)? } else { arg.to_string() };
    Ok(gauge_from_str(&text, dim)?)
}

fn check_resolution(name: &str, value: usize, min: usize) -> Result<(), Failure> {
    if value < min {
        return Err(invalid(format!("--{name} must be at least {min}")));
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", p.display()) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure { code: 1, message: format!("cannot write output: {e}") }),
                _ => Ok(()),
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn perimeter(a: &PerimeterArgs) -> Result<(), Failure> {
    check_s(a.s)?;
    let c = &a.common;
    check_resolution("res", c.res, 8)?;
    check_resolution("proj-res", c.proj_res, 8)?;
    let body = load_body(&c.body)?;
    let gauge = load_gauge(&c.gauge, body.dim())?;
    let src = RandomSource::new(a.seed);
    let est = match a.route {
        Route::Xray => ps_xray(&body, &gauge, a.s, &sphere_rule(body.dim(), c.res), c.proj_res)?,
        Route::Mc => ps_montecarlo(&body, &gauge, a.s, a.samples, &src)?,
        Route::Linesample => {
            if gauge != GaugeBody::ball(body.dim()) {
                return Err(invalid("the linesample route needs the ball gauge"));
            }
            ps_linesample(&body, a.s, a.samples, &src)?
        }
    };
    emit(&pretty(&serde_json::to_value(est).expect("json")), c.out.as_deref())
}

fn measure(a: &MeasureArgs) -> Result<(), Failure> {
    check_s(a.s)?;
    let c = &a.common;
    check_resolution("res", c.res, 8)?;
    check_resolution("per-facet", c.per_facet, 1)?;
    let body = load_body(&c.body)?;
    let gauge = load_gauge(&c.gauge, body.dim())?;
    let bq = boundary_rule_graded(&body, c.per_facet, 4.0);
    let rule = sphere_rule(body.dim(), c.res);
    let m = area_measure(&body, &gauge, a.s, &bq, &rule)?;
    let id = identity_asint_check(&body, &gauge, a.s, &bq, &rule, c.proj_res)?;
    let d = body.dim();
    let centroid = m.centroid();
    let doc = json!({
        "s": a.s,
        "body": body_to_json(&body),
        "atoms": m.atoms.iter().map(|x| json!({"v": x.v[..d].to_vec(), "w": x.w})).collect::<Vec<_>>(),
        "mass": m.mass(),
        "centroid": centroid.as_slice()[..d].to_vec(),
        "centroid_relative": centroid.norm() / m.mass(),
        "identity": {"perimeter": id.left, "pairing": id.right, "rel_error": id.rel_error},
    });
    emit(&pretty(&doc), c.out.as_deref())
}

/// Boundary points used by the s → 1 table: coordinate axes and the diagonal.
fn probe_normals(dim: usize) -> Vec<Vec3> {
    let mut out = vec![Vec3::x(), Vec3::y()];
    if dim == 3 {
        out.push(Vec3::z());
        out.push(Vec3::new(1.0, 1.0, 1.0).normalize());
    } else {
        out.push(Vec3::new(1.0, 1.0, 0.0).normalize());
    }
    out
}

fn limits(a: &LimitArgs) -> Result<(), Failure> {
    for &s in &a.s_list {
        check_s(s)?;
    }
    let c = &a.common;
    let mut csv = String::from("s,id,lhs,rhs,ratio\n");
    match a.kind {
        LimitKind::Small => {
            check_resolution("res", c.res, 8)?;
            let body = load_body(&c.body)?;
            let gauge = load_gauge(&c.gauge, body.dim())?;
            let n = body.dim() as f64;
            let rows = limit_s0_check(&body, &gauge, &a.s_list, &boundary_rule_graded(&body, c.per_facet, 4.0), &sphere_rule(body.dim(), c.res))?;
            for r in rows {
                let rhs = n * r.half_gauge_area;
                writeln!(csv, "{},{},{},{},{}", r.s, r.facet, r.lhs, rhs, r.lhs / rhs).expect("string write");
            }
        }
        LimitKind::Large => {
            check_resolution("res", c.res, 16)?;
            let body = SmoothBody::ellipsoid(a.axes.len(), &a.axes)?;
            let gauge = load_gauge(&c.gauge, body.dim())?;
            for (id, v) in probe_normals(body.dim()).iter().enumerate() {
                for r in lemma_conv_check(&body, &gauge, v, &a.s_list, c.res)? {
                    let rhs = r.rhs / 2.0;
                    writeln!(csv, "{},{},{},{},{}", r.s, id, r.lhs, rhs, r.lhs / rhs).expect("string write");
                }
            }
        }
    }
    emit(&csv, c.out.as_deref())
}

fn solve(a: &SolveArgs) -> Result<(), Failure> {
    check_s(a.s)?;
    check_resolution("res", a.res, 8)?;
    let target = target_from_str(&read(&a.target)?)?;
    let gauge = load_gauge(&a.gauge, target.dim)?;
    let opts = SolveOptions { res: a.res, per_facet: a.per_facet, proj_res: a.proj_res, trace_supports: a.trace, ..SolveOptions::default() };
    let rep = solve_minkowski(&MinkowskiProblem::new(target, gauge, a.s), &opts)?;
    let mut doc = serde_json::to_value(&rep).expect("json");
    doc["body"] = body_to_json(&rep.solution);
    emit(&pretty(&doc), a.out.as_deref())
}

fn isoperimetric(a: &IsoArgs) -> Result<(), Failure> {
    check_s(a.s)?;
    check_resolution("res", a.res, 8)?;
    check_resolution("normals", a.normals, 3)?;
    let gauge = load_gauge(&a.gauge, 2)?;
    let opts = SolveOptions { res: a.res, per_facet: a.per_facet, proj_res: a.proj_res, trace_supports: a.trace, ..SolveOptions::default() };
    let rep = isoperimetric_search(&gauge, a.s, &regular_fan_2d(a.normals, 0.0), &opts)?;
    let mut doc = serde_json::to_value(&rep).expect("json");
    doc["body"] = body_to_json(&rep.optimizer);
    emit(&pretty(&doc), a.out.as_deref())
}

fn preset(a: &PresetArgs) -> Result<(), Failure> {
    if a.name == "list" {
        let names: String = presets::PRESETS.iter().map(|(n, c)| format!("{n} (criterion {c})\n")).collect();
        return emit(&names, None);
    }
    let rep = presets::run(&a.name, &PresetOptions { seed: a.seed })?;
    match &a.out {
        Some(p) => {
            emit(&rep.to_json(), Some(p))?;
            print!("{}", rep.summary());
        }
        None => {
            emit(&rep.to_json(), None)?;
            eprint!("{}", rep.summary());
        }
    }
    if rep.pass {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("preset {} failed", rep.preset) })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = with_threads(cli.threads, || match &cli.command {
        Command::Perimeter(a) => perimeter(a),
        Command::AreaMeasure(a) => measure(a),
        Command::Limits(a) => limits(a),
        Command::Solve(a) => solve(a),
        Command::Isoperimetric(a) => isoperimetric(a),
        Command::Preset(a) => preset(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
