use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn catalog_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog").join(format!("{name}.json"))
}

fn bflab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bflab")).args(args).env("BFLAB_CACHE_DIR", cache).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn analyze_writes_a_versioned_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s3.json");
    let s3 = catalog_file("s3");
    let o = bflab(&["analyze", "--group", s3.to_str().unwrap(), "--prime", "3", "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "bflab-report/1");
    assert_eq!(v["group"]["order"], 6);
    assert_eq!(v["blocks"][0]["defect_group"]["order"], 3);
    assert_eq!(v["blocks"][0]["source_dim"], 6);
    assert!(v["blocks"][0].get("equivalence").is_none());
}

#[test]
fn check_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let a4 = catalog_file("a4");
    let run = || {
        let o = bflab(&["check", "--group", a4.to_str().unwrap(), "--prime", "2", "--no-cache"], tmp.path());
        assert_eq!(code(&o), 0);
        o.stdout
    };
    let first = run();
    assert_eq!(first, run());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["blocks"][0]["equivalence"]["agree"], true);
}

#[test]
fn cached_and_fresh_reports_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let d8 = catalog_file("d8");
    let args = ["check", "--group", d8.to_str().unwrap(), "--prime", "2"];
    let fresh = bflab(&args, tmp.path());
    let cached = bflab(&args, tmp.path());
    let mut bypass_args = args.to_vec();
    bypass_args.push("--no-cache");
    let bypass = bflab(&bypass_args, tmp.path());
    assert_eq!(fresh.stdout, cached.stdout);
    assert_eq!(fresh.stdout, bypass.stdout);
    let entries = std::fs::read_dir(tmp.path()).unwrap().count();
    assert_eq!(entries, 1);
}

#[test]
fn input_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let s3 = catalog_file("s3");
    let s3 = s3.to_str().unwrap();
    assert_eq!(code(&bflab(&["analyze", "--group", s3, "--prime", "5"], tmp.path())), 2);
    assert_eq!(code(&bflab(&["analyze", "--group", s3, "--prime", "4"], tmp.path())), 2);
    assert_eq!(code(&bflab(&["analyze", "--group", "/nonexistent.json", "--prime", "2"], tmp.path())), 2);
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"label":"x","degree":3,"generators":[[1,1,2]]}"#).unwrap();
    assert_eq!(code(&bflab(&["analyze", "--group", bad.to_str().unwrap(), "--prime", "2"], tmp.path())), 2);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&bflab(&["analyze", "--group", bad.to_str().unwrap(), "--prime", "2"], tmp.path())), 2);
}

#[test]
fn order_cap_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let s4 = catalog_file("s4");
    let o = bflab(&["analyze", "--group", s4.to_str().unwrap(), "--prime", "2", "--order-cap", "10"], tmp.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn empty_catalog_dir_gives_empty_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("groups");
    std::fs::create_dir(&dir).unwrap();
    let o = bflab(&["catalog", dir.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("group"));
}

#[test]
fn catalog_dir_rows_per_dividing_prime() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("groups");
    let out = tmp.path().join("out");
    std::fs::create_dir(&dir).unwrap();
    for name in ["s3", "c4"] {
        std::fs::copy(catalog_file(name), dir.join(format!("{name}.json"))).unwrap();
    }
    let o = bflab(&["catalog", dir.to_str().unwrap(), "--out", out.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with("pass")));
    for f in ["c4-p2.json", "s3-p2.json", "s3-p3.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

/// A report carrying a finding (here planted in the cache) must produce a
/// finding file and exit 4.
#[test]
fn findings_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let c2 = catalog_file("c2");
    let out = tmp.path().join("c2.json");
    let args = ["check", "--group", c2.to_str().unwrap(), "--prime", "2", "--out", out.to_str().unwrap()];
    assert_eq!(code(&bflab(&args, tmp.path())), 0);
    let cached = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "json") && p != &out)
        .unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cached).unwrap()).unwrap();
    v["findings"] = serde_json::json!([{
        "group": "C2", "prime": 2, "block": 0, "defect_group": ["()", "(1,2)"],
        "maximal_pair_block": [1, 0], "source_idempotent": [1, 0],
        "finding": {"condition": "planted", "morphism": null, "detail": "", "witnesses": []}
    }]);
    std::fs::write(&cached, serde_json::to_string(&v).unwrap()).unwrap();
    let o = bflab(&args, tmp.path());
    assert_eq!(code(&o), 4);
    let finding = tmp.path().join("FINDING-C2-p2.json");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(finding).unwrap()).unwrap();
    assert_eq!(doc["findings"][0]["finding"]["condition"], "planted");
}
