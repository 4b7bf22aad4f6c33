//! JSON documents for bodies, gauges and target measures.
//!
//! Body: `{"dim": 2, "normals": [[1,0], ...], "support": [1, ...]}`. Normals
//! need not be unit; each row is normalized and its support value divided by
//! the original length.
//!
//! Gauge: one of the strings `"ball"`, `"square"` (planar unit square),
//! `"cube"` (unit cube of the body's dimension), or an object
//! `{"kind": "ball"}`, `{"kind": "ellipsoid", "axes": [..]}`,
//! `{"kind": "polytope", "normals": .., "support": ..}` (origin-symmetric), or
//! `{"kind": "support-sampled", "resolution": N, "values": [..]}` with one
//! value per node of the sphere rule of that resolution.
//!
//! Target: `{"atoms": [{"v": [..], "w": 1.0}, ...]}`.
//!
//! Errors carry the JSON path of the offending value, e.g. `$.normals[3]`.

use serde_json::{json, Value};

use crate::bodies::{wulff_shape, GaugeBody, PolytopeBody};
use crate::error::{GeoError, Result};
use crate::measures::{Atom, AtomicSphericalMeasure};
use crate::quadrature::sphere_rule;
use crate::Vec3;

fn err(path: &str, message: impl Into<String>) -> GeoError {
    GeoError::Schema { path: path.to_string(), message: message.into() }
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    let obj = v.as_object().ok_or_else(|| err(path, "expected an object"))?;
    obj.get(key).ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(err(path, "expected a finite number")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| number(x, &format!("{path}[{i}]"))).collect()
}

fn dimension(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(d @ (2 | 3)) => Ok(d as usize),
        _ => Err(err(path, "dimension must be 2 or 3")),
    }
}

fn vector(v: &Value, path: &str, dim: usize) -> Result<Vec3> {
    let xs = numbers(v, path)?;
    if xs.len() != dim {
        return Err(err(path, format!("expected {dim} components, got {}", xs.len())));
    }
    Ok(Vec3::new(xs[0], xs[1], if dim == 3 { xs[2] } else { 0.0 }))
}

/// Unit normals and rescaled support values.
fn halfspaces(v: &Value, path: &str, dim: usize) -> Result<(Vec<Vec3>, Vec<f64>)> {
    let np = format!("{path}.normals");
    let sp = format!("{path}.support");
    let normals = array(field(v, path, "normals")?, &np)?;
    let support = numbers(field(v, path, "support")?, &sp)?;
    if normals.len() != support.len() {
        return Err(err(&sp, format!("{} support values for {} normals", support.len(), normals.len())));
    }
    let mut units = Vec::with_capacity(normals.len());
    let mut h = Vec::with_capacity(normals.len());
    for (i, (n, s)) in normals.iter().zip(&support).enumerate() {
        let p = format!("{np}[{i}]");
        let x = vector(n, &p, dim)?;
        let len = x.norm();
        if len == 0.0 {
            return Err(err(&p, "zero normal"));
        }
        units.push(x / len);
        h.push(s / len);
    }
    Ok((units, h))
}

fn with_path(path: &str, e: GeoError) -> GeoError {
    match e {
        GeoError::Schema { .. } => e,
        other => err(path, other.to_string()),
    }
}

pub fn parse_body(v: &Value) -> Result<PolytopeBody> {
    let dim = dimension(field(v, "$", "dim")?, "$.dim")?;
    let (normals, h) = halfspaces(v, "$", dim)?;
    wulff_shape(dim, &normals, &h)
}

pub fn body_from_str(text: &str) -> Result<PolytopeBody> {
    parse_body(&serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?)
}

pub fn body_to_json(body: &PolytopeBody) -> Value {
    let d = body.dim();
    json!({
        "dim": d,
        "normals": body.normals().iter().map(|v| v.as_slice()[..d].to_vec()).collect::<Vec<_>>(),
        "support": body.support_values(),
    })
}

pub fn parse_gauge(v: &Value, dim: usize) -> Result<GaugeBody> {
    if let Some(name) = v.as_str() {
        return match name {
            "ball" => Ok(GaugeBody::ball(dim)),
            "cube" => Ok(GaugeBody::cube(dim)),
            "square" if dim == 2 => Ok(GaugeBody::cube(2)),
            "square" => Err(err("$", "the square gauge is planar")),
            other => Err(err("$", format!("unknown gauge \"{other}\""))),
        };
    }
    let kind = field(v, "$", "kind")?.as_str().ok_or_else(|| err("$.kind", "expected a string"))?;
    match kind {
        "ball" => Ok(GaugeBody::ball(dim)),
        "ellipsoid" => {
            let axes = numbers(field(v, "$", "axes")?, "$.axes")?;
            GaugeBody::ellipsoid(dim, &axes).map_err(|e| with_path("$.axes", e))
        }
        "polytope" => {
            let (normals, h) = halfspaces(v, "$", dim)?;
            let body = wulff_shape(dim, &normals, &h).map_err(|e| with_path("$", e))?;
            GaugeBody::polytope(body).map_err(|e| with_path("$", e))
        }
        "support-sampled" => {
            let res = field(v, "$", "resolution")?
                .as_u64()
                .filter(|r| *r >= 4)
                .ok_or_else(|| err("$.resolution", "expected an integer of at least 4"))?;
            let rule = sphere_rule(dim, res as usize);
            let values = numbers(field(v, "$", "values")?, "$.values")?;
            if values.len() != rule.len() {
                return Err(err("$.values", format!("expected {} values, got {}", rule.len(), values.len())));
            }
            GaugeBody::support_sampled(&rule, &values).map_err(|e| with_path("$.values", e))
        }
        other => Err(err("$.kind", format!("unknown gauge kind \"{other}\""))),
    }
}

/// A gauge given either by a bare name or by a JSON document.
pub fn gauge_from_str(text: &str, dim: usize) -> Result<GaugeBody> {
    match text {
        "ball" | "square" | "cube" => parse_gauge(&Value::String(text.into()), dim),
        _ => parse_gauge(&serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?, dim),
    }
}

pub fn parse_target(v: &Value) -> Result<AtomicSphericalMeasure> {
    let atoms = array(field(v, "$", "atoms")?, "$.atoms")?;
    let Some(first) = atoms.first() else {
        return Err(err("$.atoms", "no atoms"));
    };
    let dim = array(field(first, "$.atoms[0]", "v")?, "$.atoms[0].v")?.len();
    if dim != 2 && dim != 3 {
        return Err(err("$.atoms[0].v", "directions must have 2 or 3 components"));
    }
    let mut out = Vec::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        let p = format!("$.atoms[{i}]");
        let x = vector(field(a, &p, "v")?, &format!("{p}.v"), dim)?;
        let w = number(field(a, &p, "w")?, &format!("{p}.w"))?;
        if x.norm() == 0.0 {
            return Err(err(&format!("{p}.v"), "zero direction"));
        }
        if w < 0.0 {
            return Err(err(&format!("{p}.w"), "negative weight"));
        }
        out.push(Atom::new(x.normalize(), w));
    }
    AtomicSphericalMeasure::new(dim, out).map_err(|e| with_path("$.atoms", e))
}

pub fn target_from_str(text: &str) -> Result<AtomicSphericalMeasure> {
    parse_target(&serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?)
}

pub fn target_to_json(m: &AtomicSphericalMeasure) -> Value {
    json!({
        "atoms": m.atoms.iter().map(|a| json!({"v": a.v[..m.dim].to_vec(), "w": a.w})).collect::<Vec<_>>(),
    })
}
