use std::fs;
use std::process::{Command, Output};

fn isovert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isovert")).args(args).output().expect("spawn isovert")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn moments_of_three_vertices() {
    let o = isovert(&["moments", "--n", "3", "--p", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "mu=0.75 sigma2=0.9375");
}

#[test]
fn chernoff_at_zero() {
    let o = isovert(&["chernoff", "--n", "3", "--p", "0.5", "--t", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "theta=0 bound=1");
}

#[test]
fn usage_errors() {
    for args in [
        &["moments", "--n", "3"][..],
        &["moments", "--n", "3", "--p", "0.5", "--unknown"],
        &["moments", "--n", "1", "--p", "0.5"],
        &["bounds", "--n", "10", "--p", "0.1", "--t-grid", "2:1:0.5"],
        &["oracle", "--n", "9", "--p", "0.5"],
        &["frobnicate"],
    ] {
        let o = isovert(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn compare_columns_and_flags() {
    let o = isovert(&["compare", "--n", "200", "--p", "0.01", "--samples", "20000", "--t-grid", "0.5,1,2", "--workers", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,p_hat_right,ci_low,ci_high,log_chernoff,theta_star,log_piecewise,log_left_at_minus_t,log_raic,clipped_flags,pass_flags"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 11);
        assert!(fields[9].starts_with("chernoff=") && fields[9].contains(";raic="));
        assert_eq!(fields[10], "chernoff=1;piecewise=1;left=1;raic=1");
    }
}

#[test]
fn output_file_is_reproducible_and_has_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, workers) in [(&a, "1"), (&b, "3")] {
        let o = isovert(&[
            "simulate", "--n", "100", "--p", "0.02", "--samples", "40000", "--seed", "7",
            "--workers", workers, "--t-grid", "0:2:0.5", "--out", path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["parameters"]["n"], 100);
    assert!(manifest.get("duration_secs").is_some());
}

#[test]
fn json_output_embeds_manifest() {
    let run = || stdout(&isovert(&["bounds", "--n", "50", "--p", "0.05", "--t-grid", "1,2", "--format", "json"]));
    let first = run();
    assert_eq!(first, run());
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["manifest"]["command"], "bounds");
    assert!(v["manifest"].get("duration_secs").is_none());
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert!(first.contains("e-1") || first.contains("e0"));
}

#[test]
fn oracle_and_corollary() {
    let o = isovert(&["oracle", "--n", "4", "--p", "0.3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("kind,x,value,reference,pass\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("log_mgf_")).count(), 100);

    let o = isovert(&["corollary", "--c", "1", "--n-grid", "10,100"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn couple_report() {
    let o = isovert(&["couple", "--n", "100", "--p", "0.01", "--samples", "20000", "--full-adjacency", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["violations"]["monotone"], 0);
}

#[test]
fn verify_quick_passes() {
    let o = isovert(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
}
