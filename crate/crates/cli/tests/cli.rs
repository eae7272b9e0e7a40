use std::process::{Command, Output};

use serde_json::Value;

const F_Z: &str = r#"{"num":[[0,0],[1,0]],"den":[[1,0]]}"#;
const ORIGIN_ATOM: &str = r#"{"kind":"atomic","atoms":[{"point":[0,0],"mass":1}]}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirichlet-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn scalar(o: &Output) -> f64 {
    stdout(o).parse().expect("numeric output")
}

#[test]
fn local_dirichlet_of_identity() {
    let o = bin(&["local", "--f", F_Z, "--zeta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.0");
    let o = bin(&["local", "--f", F_Z, "--zeta", "0.6,0.8", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn bundled_two_atom_measure_fails_moments() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/two_atom.json");
    let o = bin(&["verify", "moments", "--measure", path, "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "moments/user-measure")
        .unwrap();
    assert_eq!(c["max_residual"].as_f64().unwrap(), 0.0625);
    assert_eq!(c["pass"], false);
}

#[test]
fn malformed_input_exits_two() {
    let o = bin(&["local", "--f", r#"{"num":[[0,0],[1,0]"#, "--zeta", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));
    let o = bin(&["verify", "moments", "--measure", r#"{"atoms":[{"point":[0,0]}]}"#]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pole_inside_disk_is_rejected() {
    let phi = r#"{"num":[[1,0]],"den":[[1,0],[-2,0]]}"#;
    let o = bin(&["pair", "--phi", phi]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pair_export_for_identity_symbol() {
    let o = bin(&["pair", "--phi", F_Z, "--M", "256", "--N", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["M"], 256);
    assert_eq!(v["N"], 16);
    let a0 = v["a"][0][0].as_f64().unwrap();
    let b1 = v["b"][1][0].as_f64().unwrap();
    assert!((a0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    assert!((b1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
}

#[test]
fn hb_norm_and_f_plus_of_identity() {
    assert!((scalar(&bin(&["hbnorm", "--f", F_Z, "--phi", F_Z])) - 2.0).abs() < 1e-12);
    let o = bin(&["fplus", "--f", F_Z, "--phi", F_Z, "--N", "4"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v[0][0].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn weight_transforms_at_a_point() {
    let q = bin(&["bergman", "--weight", ORIGIN_ATOM, "--z", "0.5"]);
    assert_eq!(q.status.code(), Some(0));
    let b = scalar(&bin(&["berezin", "--weight", ORIGIN_ATOM, "--z", "0.5"]));
    assert!((b - 0.75).abs() < 1e-10);
    let d = scalar(&bin(&["dirichlet", "--f", F_Z, "--weight", ORIGIN_ATOM, "--nr", "200", "--ntheta", "256"]));
    assert!((d - 1.0).abs() < 1e-4);
}

#[test]
fn scanners_emit_csv() {
    let o = bin(&["scan", "moments", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,c,residual,n,m"));
    assert_eq!(lines.count(), 20);
}

#[test]
fn seeded_suites_are_reproducible() {
    let run = || {
        let o = bin(&["verify", "dilation", "--seed", "11", "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let mut v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        for c in v["checks"].as_array_mut().unwrap() {
            c.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn report_written_to_file() {
    let dir = std::env::temp_dir().join(format!("dirichlet-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.csv");
    let o = bin(&["verify", "moments", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("name,max_residual,tolerance,pass,elapsed_ms"));
    std::fs::remove_dir_all(&dir).unwrap();
}
