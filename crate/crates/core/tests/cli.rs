use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use asymap::demo::synthetic_citations;
use asymap::io::CitationTableJson;
use serde_json::Value;

fn asymap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymap"))
        .args(args)
        .env_remove("ASYMAP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_table(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let path = dir.join("citations.json");
    let json = serde_json::to_string(&CitationTableJson::from(&synthetic_citations(n, seed))).unwrap();
    fs::write(&path, json).unwrap();
    path
}

fn files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn pipeline_is_byte_identical_across_runs_and_output_dirs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 9, 5);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = asymap(&[
            "pipeline",
            "--input",
            s(&input),
            "--out-dir",
            s(out),
            "--restarts",
            "4",
            "--seed",
            "9",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let fa = files(&a);
    assert!(fa.len() >= 9);
    for p in &fa {
        let q = b.join(p.strip_prefix(&a).unwrap());
        assert_eq!(fs::read(p).unwrap(), fs::read(&q).unwrap(), "{}", p.display());
    }
    let manifest: Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["seed"], 9);
    assert!(manifest["artifacts"].as_array().unwrap().len() >= 8);
    for key in ["tool_version", "config_hash", "seed", "artifacts"] {
        assert!(manifest.get(key).is_some(), "{key}");
    }
}

#[test]
fn numeric_artifacts_embed_hash_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 7, 1);
    let out = tmp.path().join("out");
    let o = asymap(&[
        "pipeline",
        "--input",
        s(&input),
        "--out-dir",
        s(&out),
        "--restarts",
        "2",
        "--seed",
        "31",
    ]);
    assert!(o.status.success());
    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let hash = manifest["config_hash"].as_str().unwrap();
    for a in manifest["artifacts"].as_array().unwrap() {
        let text = fs::read_to_string(out.join(a["path"].as_str().unwrap())).unwrap();
        assert!(text.contains(hash), "{}", a["path"]);
        assert!(text.contains("31"), "{}", a["path"]);
    }
}

#[test]
fn svg_outputs_are_well_formed_xml() {
    let tmp = tempfile::tempdir().unwrap();
    // labels that need escaping
    let mut table = CitationTableJson::from(&synthetic_citations(6, 8));
    table.labels = vec![
        "A&B".into(),
        "<C>".into(),
        "\"D\"".into(),
        "E'".into(),
        "F".into(),
        "G".into(),
    ];
    let input = tmp.path().join("t.json");
    fs::write(&input, serde_json::to_string(&table).unwrap()).unwrap();
    let out = tmp.path().join("out");
    let o = asymap(&[
        "pipeline",
        "--input",
        s(&input),
        "--out-dir",
        s(&out),
        "--restarts",
        "2",
        "--k",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svgs: Vec<PathBuf> = files(&out)
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();
    assert!(svgs.len() >= 6, "{svgs:?}");
    for p in svgs {
        let text = fs::read_to_string(&p).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn missing_input_and_numerical_failure_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = asymap(&["hplot", "--input", "no-such-file.csv", "--out-dir", s(&out)]);
    let constant = tmp.path().join("c.csv");
    fs::write(&constant, "label,a,b,c\na,2,2,2\nb,2,2,2\nc,2,2,2\n").unwrap();
    let numeric = asymap(&["hplot", "--input", s(&constant), "--out-dir", s(&out)]);
    let (m, n) = (missing.status.code().unwrap(), numeric.status.code().unwrap());
    assert_ne!(m, 0);
    assert_ne!(n, 0);
    assert_ne!(m, n);
    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "partial");
    assert_eq!(manifest["failed_stage"], "hplot");
}

#[test]
fn malformed_csv_reports_the_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "label,a,b\na,1,\nb,2,1\n").unwrap();
    let o = asymap(&["hplot", "--input", s(&bad), "--out-dir", s(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2, column 3"), "{err}");
}

#[test]
fn hplot_prints_gof_with_three_decimals() {
    let tmp = tempfile::tempdir().unwrap();
    let m = tmp.path().join("m.csv");
    fs::write(&m, "label,x,y,z\nx,1,4,9\ny,2,1,5\nz,7,3,1\n").unwrap();
    let o = asymap(&["hplot", "--input", s(&m), "--out-dir", s(&tmp.path().join("o"))]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    let line = stdout.lines().find(|l| l.starts_with("gof = ")).unwrap();
    let value = line.trim_start_matches("gof = ");
    assert_eq!(value.split('.').nth(1).unwrap().len(), 3, "{line}");
}

#[test]
fn symmetric_matrix_reports_zero_asymmetry() {
    let tmp = tempfile::tempdir().unwrap();
    let m = tmp.path().join("sym.csv");
    fs::write(&m, "label,x,y,z\nx,0,3,5\ny,3,0,4\nz,5,4,0\n").unwrap();
    let out = tmp.path().join("o");
    let o = asymap(&["hplot", "--input", s(&m), "--out-dir", s(&out), "--format", "csv"]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("hplot/asymmetry.csv")).unwrap();
    for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        assert!(row.ends_with(",0"), "{row}");
    }
    assert!(!out.join("hplot/hplot.svg").exists());
}

#[test]
fn ingest_marks_zero_cells_and_rejects_single_object() {
    let tmp = tempfile::tempdir().unwrap();
    let cites = tmp.path().join("cites.csv");
    let meta = tmp.path().join("meta.csv");
    fs::write(&cites, "label,a,b\na,5,0\nb,3,7\n").unwrap();
    fs::write(&meta, "label,papers,refs\nb,20,300\na,10,100\n").unwrap();
    let out = tmp.path().join("o");
    let o = asymap(&["ingest", "--input", s(&cites), s(&meta), "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let prov: Value = serde_json::from_slice(&fs::read(out.join("ingest/provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["undefined_count"], 1);
    assert_eq!(prov["undefined_cell_labels"][0], serde_json::json!(["a", "b"]));
    let delta = asymap::io::load_dissimilarity(out.join("ingest/dissimilarity.csv")).unwrap();
    assert_eq!(delta.get(0, 1), delta.sentinel());

    let one = tmp.path().join("one.json");
    fs::write(&one, r#"{"labels":["a"],"cites":[[3]],"papers":[4],"refs":[9]}"#).unwrap();
    let o = asymap(&["ingest", "--input", s(&one), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ada_with_k_equal_n_has_zero_rss_and_exhaustive_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 6, 3);
    let out = tmp.path().join("o");
    let o = asymap(&[
        "ada",
        "--input",
        s(&input),
        "--out-dir",
        s(&out),
        "--k-range",
        "1..6",
        "--exhaustive",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let model: Value = serde_json::from_slice(&fs::read(out.join("ada/model_k6.json")).unwrap()).unwrap();
    assert!(model["rss"].as_f64().unwrap().abs() < 1e-12);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.contains("k = 3: exhaustive search agrees") || stdout.contains("k = 3: exhaustive optimum")
    );
    assert!(out.join("ada/ternary_k3.svg").exists());
}

#[test]
fn exhaustive_budget_error_names_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 8, 3);
    let o = asymap(&[
        "ada",
        "--input",
        s(&input),
        "--out-dir",
        s(&tmp.path().join("o")),
        "--k",
        "4",
        "--exhaustive",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--budget"));
}

#[test]
fn empty_network_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 5, 2);
    let o = asymap(&[
        "compare",
        "--input",
        s(&input),
        "--out-dir",
        s(&tmp.path().join("o")),
        "--threshold",
        "0.5",
        "--restarts",
        "2",
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no edges"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("0 edges, isolated: 1, 2, 3, 4, 5"), "{stdout}");
}

#[test]
fn planted_matrix_unfolds_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let planted = asymap::demo::planted_unfolding(6, 4);
    let csv = asymap::io::dissimilarity_to_csv(&planted.delta, &[]);
    let path = tmp.path().join("planted.csv");
    fs::write(&path, csv).unwrap();
    let out = tmp.path().join("o");
    let o = asymap(&[
        "compare",
        "--input",
        s(&path),
        "--out-dir",
        s(&out),
        "--restarts",
        "10",
    ]);
    assert!(o.status.success());
    let report: Value = serde_json::from_slice(&fs::read(out.join("compare/report.json")).unwrap()).unwrap();
    let stress = report["unfolding_stress"][0]["stress"].as_f64().unwrap();
    assert!(stress < 1e-6, "{stress}");
}

#[test]
fn out_dir_defaults_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let m = tmp.path().join("m.csv");
    fs::write(&m, "label,x,y,z\nx,1,4,9\ny,2,1,5\nz,7,3,1\n").unwrap();
    let target = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_asymap"))
        .args(["hplot", "--input", s(&m)])
        .env("ASYMAP_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(target.join("manifest.json").exists());
}

#[test]
fn config_hash_ignores_out_dir_but_tracks_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_table(tmp.path(), 5, 6);
    let hash = |out: &str, seed: &str| {
        let out = tmp.path().join(out);
        let o = asymap(&[
            "hplot",
            "--input",
            s(&input),
            "--out-dir",
            s(&out),
            "--seed",
            seed,
        ]);
        assert!(o.status.success());
        let m: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
        m["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("a", "1"), hash("b", "1"));
    assert_ne!(hash("a", "1"), hash("c", "2"));
}
