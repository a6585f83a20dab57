//! End-to-end checks of the command-line contract: payload shapes, exit
//! codes, and file outputs.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treecolor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn payload(out: &Output) -> Value {
    let report: Value = serde_json::from_slice(&out.stdout).expect("valid JSON report");
    assert_eq!(report["tool"], "treecolor");
    assert!(report["version"].is_string());
    assert!(report["config"].is_object());
    report["payload"].clone()
}

#[test]
fn enumerate_lists_trees_in_canonical_order() {
    let out = run(&["enumerate", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["count"], "2");
    assert_eq!(p["trees"][0], "((x1x2)x3)");
    assert_eq!(p["trees"][1], "(x1(x2x3))");
}

#[test]
fn enumerate_count_only_uses_big_integers() {
    let out = run(&["enumerate", "--n", "24", "--count-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["count"], "343059613650");
}

#[test]
fn enumerate_cap_is_usage_error() {
    let out = run(&["enumerate", "--n", "40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn color_propagates_and_inverts() {
    let out = run(&[
        "color",
        "--tree",
        "((x1x2)x3)",
        "--root",
        "K",
        "--signs",
        "++",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["leaf_vector"], "JKJ");

    let out = run(&[
        "color",
        "--tree",
        "((x1x2)x3)",
        "--leaves",
        "JKJ",
        "--root",
        "K",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["count"], 1);
    assert_eq!(p["colorings"][0]["coloring"]["signs"], "++");

    // not sharp: verified-negative exit
    let out = run(&["color", "--tree", "((x1x2)x3)", "--leaves", "IIJ"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sharp_lists_solutions() {
    let out = run(&["sharp", "--left", "((x1x2)x3)", "--right", "(x1(x2x3))"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["count"], 6);
    let solutions: Vec<String> = p["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect();
    assert!(solutions.contains(&"JIJ".to_string()));
}

#[test]
fn path_exit_codes() {
    let out = run(&["path", "--left", "(x1(x2x3))", "--right", "((x1x2)x3)"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["path"]["moves"].as_array().unwrap().len(), 1);
    assert_eq!(p["path"]["start"]["signs"], "++");

    // frozen signs admit nothing
    let out = run(&[
        "path",
        "--left",
        "((x1x2)x3)",
        "--right",
        "(x1(x2x3))",
        "--signs",
        "+-",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["path", "--left", "((x1x2)", "--right", "(x1(x2x3))"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["path", "--left", "(x1x2)", "--right", "((x1x2)x3)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn comb_block_targets() {
    let out = run(&["comb", "--tree", "(x1(x2(x3x4)))"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["length"], 2);
    assert_eq!(p["target"], "(((x1x2)x3)x4)");

    let out = run(&["comb", "--tree", "(((x1x2)x3)x4)", "--target", "right"]);
    assert_eq!(payload(&out)["target"], "(x1(x2(x3x4)))");

    let out = run(&[
        "comb",
        "--tree",
        "(x1(x2(x3x4)))",
        "--target",
        "block",
        "--k",
        "2",
    ]);
    assert_eq!(payload(&out)["target"], "((x1x2)(x3x4))");

    let out = run(&["comb", "--tree", "(x1(x2(x3x4)))", "--target", "block"]);
    assert_eq!(out.status.code(), Some(2), "block needs --k");
}

#[test]
fn tie_reports_and_dot() {
    let out = run(&[
        "tie",
        "--left",
        "((x1x2)x3)",
        "--right",
        "(x1(x2x3))",
        "--correspondence",
        "--colorings",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["map"]["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(p["map"]["edges"].as_array().unwrap().len(), 6);
    assert_eq!(p["map"]["edges"][0]["label"], "root");
    assert_eq!(p["bridgeless"], true);
    assert_eq!(p["correspondence"]["surjective"], true);
    assert_eq!(
        p["tait_colorings"]["count"],
        p["correspondence"]["sharp_solution_count"]
    );

    let out = run(&[
        "tie", "--left", "(x1x2)", "--right", "(x1x2)", "--format", "dot",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph tied {"));
    assert_eq!(dot.matches(" -- ").count(), 3, "theta graph");
}

#[test]
fn verify_kinds_pass() {
    for (kind, n) in [
        ("conjecture", "4"),
        ("sign-theorem", "3"),
        ("admissibility-oracle", "4"),
        ("colorings", "4"),
        ("girth", "4"),
        ("geodesics", "4"),
        ("frozen", "5"),
    ] {
        let out = run(&["verify", kind, "--n", n]);
        assert_eq!(out.status.code(), Some(0), "verify {kind} --n {n}");
    }
    let out = run(&["verify", "girth", "--n", "40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_writes_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma4.dot");
    let out = run(&[
        "export",
        "gamma",
        "--n",
        "4",
        "--dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 5, "pentagon edges");
    assert_eq!(dot.matches("label=\"(").count(), 5, "pentagon nodes");

    let path = dir.path().join("states4.dot");
    let out = run(&[
        "export",
        "stategraph",
        "--n",
        "4",
        "--dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches("\\n").count(), 40, "5 * 2^3 state nodes");

    let path = dir.path().join("tie.dot");
    let out = run(&[
        "export",
        "tiedmap",
        "--left",
        "((x1x2)x3)",
        "--right",
        "((x1x2)x3)",
        "--dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&path)
            .unwrap()
            .matches(" -- ")
            .count(),
        6
    );

    let out = run(&[
        "export",
        "gamma",
        "--n",
        "4",
        "--dot",
        "/nonexistent-dir/x.dot",
    ]);
    assert_eq!(out.status.code(), Some(3), "I/O failure exit code");
}

#[test]
fn witness_payload_includes_replay() {
    let out = run(&["witness", "--max-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["found"], false);

    let out = run(&["witness", "--max-n", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["found"], true);
    assert_eq!(p["witness"]["n"], 5);
    assert_eq!(p["witness"]["left_admissible_moves"], 0);
    assert_eq!(p["witness"]["right_admissible_moves"], 0);
}

#[test]
fn gamma_summary() {
    let out = run(&["gamma", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["vertices"], 14);
    assert_eq!(p["edges"], 21);
    assert_eq!(p["regular"], true);
}

#[test]
fn path_to_self_is_empty() {
    let out = run(&["path", "--left", "((x1x2)x3)", "--right", "((x1x2)x3)"]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["path"]["moves"].as_array().unwrap().len(), 0);
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["gamma", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "report went to the file");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["payload"]["vertices"], 5);

    let out = run(&["gamma", "--n", "4", "--out", "/nonexistent-dir/r.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn geodesics_above_five_are_exploratory() {
    let out = run(&["verify", "geodesics", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0), "exploratory at n=6");
    let p = payload(&out);
    assert_eq!(p["exploratory"], true);
    assert_eq!(p["report"]["all_geodesic"], false);
    assert_eq!(p["report"]["exceptions"].as_array().unwrap().len(), 42);
}

#[test]
fn emitted_brackets_reparse() {
    let out = run(&["enumerate", "--n", "5"]);
    let p = payload(&out);
    for tree in p["trees"].as_array().unwrap() {
        let s = tree.as_str().unwrap();
        let reprinted = run(&["comb", "--tree", s]);
        assert_eq!(reprinted.status.code(), Some(0), "{s} reparses");
        assert_eq!(payload(&reprinted)["tree"], s);
    }
}
