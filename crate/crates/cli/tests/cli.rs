use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn scmkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scmkit"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = scmkit(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&path).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn generate_twice_is_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    ok(&[
        "generate",
        "--model",
        "alphabet",
        "--count",
        "8",
        "--seed",
        "7",
        "--out",
        p(&a),
    ]);
    ok(&[
        "--jobs",
        "1",
        "generate",
        "--model",
        "alphabet",
        "--count",
        "8",
        "--seed",
        "7",
        "--out",
        p(&b),
    ]);
    assert_eq!(tree(&a), tree(&b));
    assert_eq!(tree(&a).len(), 9);
}

#[test]
fn count_zero_writes_an_empty_manifest() {
    let t = tempfile::tempdir().unwrap();
    ok(&[
        "generate",
        "--model",
        "flag",
        "--count",
        "0",
        "--out",
        p(t.path()),
    ]);
    let text = fs::read_to_string(t.path().join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 0);
}

#[test]
fn analyze_compare_and_report_are_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let ens = t.path().join("ens");
    ok(&[
        "generate",
        "--model",
        "voronoi",
        "--count",
        "12",
        "--seed",
        "1",
        "--out",
        p(&ens),
    ]);
    let (r1, r2) = (t.path().join("r1.json"), t.path().join("r2.json"));
    ok(&[
        "analyze",
        "--model",
        "voronoi",
        "--in",
        p(&ens),
        "--out",
        p(&r1),
    ]);
    ok(&[
        "--jobs",
        "2",
        "analyze",
        "--model",
        "voronoi",
        "--in",
        p(&ens),
        "--out",
        p(&r2),
    ]);
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());

    let (pa, pb) = (t.path().join("pa"), t.path().join("pb"));
    ok(&["report", "--in", p(&r1), "--out", p(&pa)]);
    ok(&["report", "--in", p(&r1), "--out", p(&pb)]);
    assert_eq!(tree(&pa), tree(&pb));
    assert!(tree(&pa).iter().any(|(n, _)| n.contains("region_class")));

    let gen = t.path().join("gen");
    ok(&[
        "generate",
        "--model",
        "voronoi",
        "--count",
        "12",
        "--seed",
        "2",
        "--out",
        p(&gen),
    ]);
    let (c1, c2) = (t.path().join("c1.json"), t.path().join("c2.json"));
    ok(&[
        "compare",
        "--train",
        p(&ens),
        "--gen",
        p(&gen),
        "--seed",
        "3",
        "--out",
        p(&c1),
    ]);
    ok(&[
        "compare",
        "--train",
        p(&ens),
        "--gen",
        p(&gen),
        "--seed",
        "3",
        "--out",
        p(&c2),
    ]);
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&c1).unwrap()).unwrap();
    let families: Vec<&str> = v["comparison"]["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["family"].as_str().unwrap())
        .collect();
    assert_eq!(families, ["texture", "morphology", "skeleton", "fg_ratio"]);
    ok(&["report", "--in", p(&c1), "--out", p(&t.path().join("pc"))]);
}

#[test]
fn report_embeds_resolved_config() {
    let t = tempfile::tempdir().unwrap();
    let ens = t.path().join("ens");
    let cfg = t.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"schema_version": 1, "flag": {"gof_alpha": 0.01}}"#,
    )
    .unwrap();
    ok(&[
        "generate",
        "--model",
        "flag",
        "--count",
        "2",
        "--out",
        p(&ens),
    ]);
    let r = t.path().join("r.json");
    ok(&[
        "--config",
        p(&cfg),
        "analyze",
        "--model",
        "flag",
        "--in",
        p(&ens),
        "--out",
        p(&r),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&r).unwrap()).unwrap();
    assert_eq!(v["run_config"]["config"]["flag"]["gof_alpha"], 0.01);
    assert_eq!(
        v["run_config"]["config"]["flag"]["foreground_boundary"],
        148.0
    );
}

#[test]
fn corrupt_at_zero_rate_is_a_copy() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    ok(&[
        "generate",
        "--model",
        "flag",
        "--count",
        "4",
        "--out",
        p(&a),
    ]);
    ok(&[
        "corrupt",
        "--in",
        p(&a),
        "--error",
        "forbidden-tile",
        "--rate",
        "0",
        "--out",
        p(&b),
    ]);
    assert_eq!(tree(&a), tree(&b));
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let t = tempfile::tempdir().unwrap();
    let ens = t.path().join("ens");
    ok(&[
        "generate",
        "--model",
        "flag",
        "--count",
        "2",
        "--out",
        p(&ens),
    ]);
    let out = t.path().join("x");

    let bad_cfg = t.path().join("bad.json");
    fs::write(&bad_cfg, r#"{"schema_version": 1, "nonsense": 3}"#).unwrap();
    let code = |args: &[&str]| scmkit(args).status.code().unwrap();
    assert_eq!(
        code(&[
            "--config",
            p(&bad_cfg),
            "analyze",
            "--model",
            "flag",
            "--in",
            p(&ens),
            "--out",
            p(&out)
        ]),
        2
    );
    assert_eq!(
        code(&[
            "analyze",
            "--model",
            "alphabet",
            "--in",
            p(&ens),
            "--out",
            p(&out)
        ]),
        2
    );
    assert_eq!(
        code(&[
            "corrupt",
            "--in",
            p(&ens),
            "--error",
            "pair-break",
            "--rate",
            "0.5",
            "--out",
            p(&out)
        ]),
        2
    );
    assert_eq!(
        code(&[
            "generate",
            "--model",
            "flag",
            "--count",
            "1",
            "--class-mix",
            "1,2",
            "--out",
            p(&out)
        ]),
        2
    );
    assert_eq!(
        code(&[
            "analyze",
            "--model",
            "flag",
            "--in",
            p(&t.path().join("missing")),
            "--out",
            p(&out)
        ]),
        3
    );
    let junk = t.path().join("junk.json");
    fs::write(&junk, "not json").unwrap();
    assert_eq!(code(&["report", "--in", p(&junk), "--out", p(&out)]), 3);
    let one = t.path().join("one");
    ok(&[
        "generate",
        "--model",
        "flag",
        "--count",
        "1",
        "--out",
        p(&one),
    ]);
    assert_eq!(
        code(&[
            "compare",
            "--train",
            p(&ens),
            "--gen",
            p(&one),
            "--out",
            p(&out)
        ]),
        4
    );
}
