use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use wquiv_core::analysis::frame;
use wquiv_core::io::{document_to_json, load_quiver, parse_quiver};
use wquiv_core::mutation::{mutate_along, MutationOptions};
use wquiv_core::tame::{cn_membership, CnMembership};
use wquiv_core::GroupElement;

fn wquiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wquiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("samples").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn doubled_triangle_sample_loads_and_mutates() {
    let path = sample("doubled-triangle.json");
    let q = load_quiver(&path).unwrap();
    assert_eq!(q.vertices().len(), 3);
    let weights: Vec<(u32, u32, String)> = q.canonical_arrows();
    assert_eq!(
        weights,
        vec![
            (1, 2, String::new()),
            (2, 3, String::new()),
            (3, 1, String::new()),
            (3, 1, "x1".into()),
        ]
    );

    let out = wquiv(&["mutate", path.to_str().unwrap(), "--at", "2"]);
    assert!(out.status.success());
    let result = parse_quiver(&stdout(&out)).unwrap();
    assert_eq!(
        result.canonical_arrows(),
        vec![(2, 1, String::new()), (3, 1, "x1".into()), (3, 2, String::new())]
    );
    assert_eq!(stdout(&out), document_to_json(&result, None));
}

#[test]
fn malformed_weight_names_the_arrow() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(sample("doubled-triangle.json")).unwrap().replace("\"x1\"", "\"y1\"");
    fs::write(&bad, text).unwrap();
    let out = wquiv(&["frame", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("arrow 3"), "{err}");
    assert!(err.contains("y1"), "{err}");
}

#[test]
fn frozen_mutation_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let framed = dir.path().join("framed.json");
    let out = wquiv(&["frame", sample("doubled-triangle.json").to_str().unwrap(), "-o", framed.to_str().unwrap()]);
    assert!(out.status.success());
    let out = wquiv(&["mutate", framed.to_str().unwrap(), "--at", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("frozen"));
}

#[test]
fn gen_corpus_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = wquiv(&[
            "gen-corpus", "--policy", "cn", "--group", "free:1", "--count", "6", "--n", "5", "--seed", "11",
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let t = GroupElement::generator(wquiv_core::GroupKind::Free { rank: 1 }, 1).unwrap();
    for i in 0..6 {
        let name = format!("cn-{i:04}.json");
        let x = fs::read(a.join(&name)).unwrap();
        assert_eq!(x, fs::read(b.join(&name)).unwrap());
        let q = load_quiver(a.join(&name)).unwrap();
        match cn_membership(&q).unwrap() {
            CnMembership::Member { n, t: w, .. } => {
                assert_eq!(n, 5);
                assert!(w == t || w == t.inverse());
            }
            other => panic!("{name}: {other:?}"),
        }
    }

    let o = wquiv(&[
        "gen-corpus", "--policy", "cn", "--group", "trivial", "--count", "1", "--n", "4", "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("unsatisfiable"));
}

#[test]
fn c_vectors_match_the_library() {
    let path = sample("doubled-triangle.json");
    let out = wquiv(&["c-vectors", path.to_str().unwrap(), "--at", "1,3"]);
    assert!(out.status.success());
    let v = json(&out);
    let q = frame(&load_quiver(&path).unwrap()).unwrap();
    let cur = mutate_along(&q, &[1, 3], MutationOptions::STRICT).unwrap();
    let m = wquiv_core::analysis::c_vectors(&cur).unwrap();
    assert_eq!(v["c_vectors"], serde_json::to_value(&m).unwrap());
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn sign_coherence_experiment_on_a_catalog_dir() {
    let dir = tempfile::tempdir().unwrap();
    for (name, q) in wquiv_core::corpus::sign_coherence_catalog(3, 2).into_iter().take(12) {
        fs::write(dir.path().join(format!("{name}.json")), document_to_json(&q, None)).unwrap();
    }
    let out = wquiv(&["sign-coherence-experiment", "--catalog", dir.path().to_str().unwrap(), "--max-len", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["cases"].as_array().unwrap().len(), 12);
    assert_eq!(v["max_len"], 5);
}

#[test]
fn check_nondeg_reports_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.json");
    fs::write(
        &path,
        r#"{"group": {"kind": "free", "rank": 1}, "vertices": [{"id": 1}, {"id": 2}, {"id": 3}],
            "arrows": [{"src": 1, "dst": 2, "weight": "x1"}, {"src": 2, "dst": 3, "weight": ""},
                       {"src": 3, "dst": 1, "weight": ""}]}"#,
    )
    .unwrap();
    let out = wquiv(&["check-nondeg", path.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["exhaustive"]["outcome"], "counterexample");
    assert_eq!(v["exhaustive"]["sequence"], serde_json::json!([1]));
}

#[test]
fn equivalence_and_classification() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, w: [&str; 3]| {
        let p = dir.path().join(name);
        fs::write(
            &p,
            format!(
                r#"{{"group": {{"kind": "free-abelian", "rank": 1}}, "vertices": [{{"id": 1}}, {{"id": 2}}, {{"id": 3}}],
                "arrows": [{{"src": 1, "dst": 2, "weight": "{}"}}, {{"src": 2, "dst": 3, "weight": "{}"}},
                           {{"src": 1, "dst": 3, "weight": "{}"}}]}}"#,
                w[0], w[1], w[2]
            ),
        )
        .unwrap();
        p
    };
    let a = write("a.json", ["(1)", "(2)", "(3)"]);
    let b = write("b.json", ["(0)", "(0)", "(0)"]);
    let c = write("c.json", ["(0)", "(0)", "(1)"]);
    let v = json(&wquiv(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]));
    assert_eq!(v["verdict"]["verdict"], "equivalent");
    let v = json(&wquiv(&["equiv", a.to_str().unwrap(), c.to_str().unwrap()]));
    assert_eq!(v["verdict"]["verdict"], "not-equivalent");
    let v = json(&wquiv(&["classify-tame", c.to_str().unwrap()]));
    assert_eq!(v["classification"]["class"], "cn-member");
    let v = json(&wquiv(&["classify-tame", a.to_str().unwrap()]));
    assert_eq!(v["classification"]["class"], "gauge-trivial");
}

#[test]
fn canonicalize_reaches_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = wquiv(&[
        "gen-corpus", "--policy", "cn", "--group", "free:2", "--count", "3", "--n", "6", "--seed", "3", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v = json(&wquiv(&["canonicalize", line]));
        let result: wquiv_core::WeightedQuiver =
            parse_quiver(&serde_json::to_string(&v["result"]).unwrap()).unwrap();
        assert_eq!(result.arrow_count(), 6);
        assert_eq!(v["cycle"]["steps"].as_array().unwrap().len(), 6);
    }
}

#[test]
fn qp_commands() {
    let path = sample("doubled-triangle-qp.json");
    let out = wquiv(&["qp-split", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 0);

    let out = wquiv(&["qp-mutate", path.to_str().unwrap(), "--at", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = wquiv_core::io::parse_document(&stdout(&out)).unwrap();
    assert_eq!(doc.quiver.arrow_count(), 3);
    assert!(doc.potential.unwrap().is_zero());

    let out = wquiv(&["qp-split", sample("doubled-triangle.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn serve_reports_a_busy_port() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let out = wquiv(&["serve", sample("doubled-triangle.json").to_str().unwrap(), "--port", &port]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("cannot serve"));
}
