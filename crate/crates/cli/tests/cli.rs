use std::path::PathBuf;
use std::process::{Command, Output};

fn fracgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracgeo")).args(args).output().expect("spawn fracgeo")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracgeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const SQUARE: &str = r#"{"dim":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"support":[1,1,1,1]}"#;

#[test]
fn perimeter_routes_agree() {
    let body = scratch("square.json", SQUARE);
    let b = body.to_str().unwrap();
    let x = fracgeo(&["perimeter", "--body", b, "--gauge", "ball", "--s", "0.5", "--route", "xray", "--res", "256"]);
    assert!(x.status.success());
    let x = stdout_json(&x);
    assert_eq!(x["route"], "xray");
    assert!(x["cost"].as_u64().unwrap() > 0);
    let mc = stdout_json(&fracgeo(&["perimeter", "--body", b, "--s", "0.5", "--route", "mc", "--samples", "200000"]));
    let (xv, mv, se) = (x["value"].as_f64().unwrap(), mc["value"].as_f64().unwrap(), mc["stderr"].as_f64().unwrap());
    assert!((xv - mv).abs() <= 3.0 * se + 0.01 * xv, "{xv} vs {mv} ± {se}");
}

#[test]
fn bad_s_exits_2() {
    let o = fracgeo(&["perimeter", "--s", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s must lie in (0,1)"));
}

#[test]
fn schema_errors_name_the_path() {
    let body = scratch("bad.json", r#"{"dim":2,"normals":[[1,0],[0,1],[-1,0],[0,-1,3]],"support":[1,1,1,1]}"#);
    let o = fracgeo(&["area-measure", "--body", body.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.normals[3]"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(fracgeo(&["perimeter", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(fracgeo(&["preset", "no-such-preset"]).status.code(), Some(2));
}

#[test]
fn centroid_preset_passes() {
    let o = fracgeo(&["preset", "centroid-check"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("PASS centroid-check"));
    assert_eq!(stdout_json(&o)["pass"], true);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let body = scratch("square2.json", SQUARE);
    let run = |threads: &str, out: &str| {
        let out = std::env::temp_dir().join(format!("fracgeo-cli-{}-{out}", std::process::id()));
        let o = fracgeo(&["--threads", threads, "perimeter", "--body", body.to_str().unwrap(), "--route", "mc", "--samples", "100000", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("1", "a.json");
    assert_eq!(a, run("1", "b.json"));
    assert_eq!(a, run("4", "c.json"));
}

#[test]
fn limits_csv_has_the_documented_columns() {
    let o = fracgeo(&["limits", "--body", "square", "--s-list", "0.1,0.01", "--res", "128"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,id,lhs,rhs,ratio"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!((r[2] / r[3] - r[4]).abs() < 1e-12);
    }
    let o = fracgeo(&["limits", "--kind", "large", "--axes", "1,1", "--s-list", "0.99", "--res", "128"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
}

#[test]
fn solve_square_target() {
    let t = scratch("target.json", r#"{"atoms":[{"v":[1,0],"w":2},{"v":[-1,0],"w":2},{"v":[0,1],"w":2},{"v":[0,-1],"w":2}]}"#);
    let o = fracgeo(&["solve", "--target", t.to_str().unwrap(), "--res", "128", "--per-facet", "16", "--trace"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(v["residual"].as_f64().unwrap() < 1e-3);
    let h: Vec<f64> = v["support"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(h.iter().all(|x| (x - h[0]).abs() < 1e-3 * h[0]));
    assert_eq!(v["body"]["dim"], 2);
    assert!(v["support_trace"].is_array());

    let pair = scratch("pair.json", r#"{"atoms":[{"v":[1,0],"w":1},{"v":[-1,0],"w":1}]}"#);
    assert_eq!(fracgeo(&["solve", "--target", pair.to_str().unwrap()]).status.code(), Some(2));
}
