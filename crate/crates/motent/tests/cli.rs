//! End-to-end tests of the motent binary: golden outputs, exit codes, and
//! JSON schema conformance.

use std::process::{Command, Output};

use serde_json::Value;

fn motent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn zeta_of_p2_under_chi() {
    let out = motent(&[
        "zeta", "--measure", "chi", "--variety", "P^2", "--order", "8",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "motent-v1");
    // (1-t)^{-3}: binomial coefficients C(n+2,2)
    let coeffs: Vec<String> = doc["zeta"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let want: Vec<String> = (0..=8u64)
        .map(|n| format!("{}/1", (n + 1) * (n + 2) / 2))
        .collect();
    assert_eq!(coeffs, want);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "entropy", "--measure", "poincare", "--variety", "betti[1,2,1]", "--order", "8",
    ];
    let a = motent(&args);
    let b = motent(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn entropy_json_and_samples() {
    let out = motent(&[
        "entropy", "--measure", "chi", "--variety", "pt", "--order", "12", "--t", "0.25",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "motent-v1");
    assert_eq!(doc["entropy"]["regular"][1], "1/1");
    assert_eq!(doc["entropy"]["logpart"][1], "-1/1");
    let t: f64 = 0.25;
    let closed = -(1.0 - t).ln() - t * t.ln() / (1.0 - t);
    let sampled = doc["samples"][0]["value"].as_f64().unwrap();
    assert!((sampled - closed).abs() < 1e-6);
}

#[test]
fn poincare_component_split() {
    let out = motent(&[
        "entropy", "--measure", "poincare", "--variety", "P^1", "--order", "6", "--components",
    ]);
    let doc = stdout_json(&out);
    let log_z = doc["components"]["log_z"].as_array().unwrap();
    for c in log_z {
        assert_eq!(c.as_array().unwrap().len(), 0, "log z must vanish");
    }
}

#[test]
fn hw_zeta_from_definition_file() {
    let dir = std::env::temp_dir().join("motent-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gm.def");
    std::fs::write(&path, "q=3 kind=affine vars=x,y\nx*y + 2\n").unwrap();
    let out = motent(&["hw-zeta", "--def", path.to_str().unwrap(), "--order", "4"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "motent-v1");
    let counts: Vec<&str> = doc["point_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(counts, ["2", "8", "26", "80"]);
}

#[test]
fn global_entropy_json_fields() {
    let out = motent(&[
        "global-entropy", "--variety", "pt", "--s", "2.0", "--pmax", "1000", "--json",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "motent-v1");
    assert_eq!(doc["s"].as_f64().unwrap(), 2.0);
    assert_eq!(doc["pmax"].as_u64().unwrap(), 1000);
    for key in ["value", "logL", "sdds"] {
        assert!(doc[key].is_f64(), "missing {key}");
    }
    assert!((doc["value"].as_f64().unwrap() - 1.6377).abs() < 0.05);
}

#[test]
fn ringhom_loss_vanishes_on_even_classes() {
    let out = motent(&[
        "infoloss", "ringhom", "--phi", "z->-1", "--mu", "poincare", "--muprime", "chi",
        "--variety", "P^2", "--order", "8",
    ]);
    let doc = stdout_json(&out);
    for part in ["regular", "logpart"] {
        for c in doc["loss"][part].as_array().unwrap() {
            assert_eq!(c.as_str().unwrap(), "0/1");
        }
    }
}

#[test]
fn flat_infoloss_with_kl() {
    let dir = std::env::temp_dir().join("motent-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let y = dir.join("p1.def");
    std::fs::write(&y, "q=2 kind=projective vars=x,y\n").unwrap();
    // source: zeta JSON for (P^1/F_2) x {2 points}, i.e. the square
    let zeta_out = motent(&["hw-zeta", "--def", y.to_str().unwrap(), "--order", "12"]);
    let zeta_doc = stdout_json(&zeta_out);
    let series: Vec<String> = zeta_doc["zeta"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(series[1], "3/1");
    let out = motent(&[
        "infoloss",
        "flat",
        "--src",
        y.to_str().unwrap(),
        "--dst",
        y.to_str().unwrap(),
        "--deg",
        "1",
        "--order",
        "12",
        "--kl-t0",
        "1/4",
    ]);
    let doc = stdout_json(&out);
    // identity morphism: zero loss, zero KL value
    for part in ["regular", "logpart"] {
        for c in doc["loss"][part].as_array().unwrap() {
            assert_eq!(c.as_str().unwrap(), "0/1");
        }
    }
    assert!(doc["kl"]["value"].as_f64().unwrap().abs() < 1e-12);
    assert!(doc["kl"]["truncated_mass"].as_f64().unwrap() > 0.99);
}

#[test]
fn verify_suites_exit_zero() {
    for suite in ["witt", "entropy"] {
        let out = motent(&["verify", "--suite", suite]);
        assert!(out.status.success());
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("0 failed"));
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn exit_codes() {
    // usage error: unknown flag
    let out = motent(&["zeta", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // domain error: s at the abscissa
    let out = motent(&["global-entropy", "--variety", "pt", "--s", "1.0", "--pmax", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    // parse error in the class expression
    let out = motent(&["zeta", "--measure", "chi", "--variety", "Q^1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enum_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_motent"))
        .args(["hw-zeta", "--order", "8", "--def", "/dev/null"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1)); // empty definition is invalid

    let dir = std::env::temp_dir().join("motent-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plane.def");
    std::fs::write(&path, "q=3 kind=affine vars=x,y\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_motent"))
        .args(["hw-zeta", "--def", path.to_str().unwrap(), "--order", "6"])
        .env("MOTENT_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
