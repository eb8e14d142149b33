//! End-to-end tests against the compiled binary: output schemas, exit
//! codes, and rerun determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transpoly"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn margins_file(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(content.as_bytes()).expect("write margins");
    file
}

fn example_margins() -> tempfile::NamedTempFile {
    margins_file(r#"{"r": ["1", "1", "2"], "c": ["1", "1", "2"]}"#)
}

fn path_arg(file: &tempfile::NamedTempFile) -> &str {
    file.path().to_str().expect("utf-8 path")
}

fn margins_args<'a>(file: &'a tempfile::NamedTempFile, rest: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec![rest[0], "--margins", path_arg(file)];
    args.extend_from_slice(&rest[1..]);
    args
}

#[test]
fn vertices_of_the_degenerate_example() {
    let file = example_margins();
    let doc = run_json(&margins_args(&file, &["vertices"]));
    assert_eq!(doc["vertex_count"], 7);
    assert_eq!(doc["dimension"], 4);
    assert_eq!(doc["nondegenerate"], false);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 7);
    // Every vertex carries a matrix, a support, and a degeneracy flag.
    for v in doc["vertices"].as_array().unwrap() {
        assert!(v["matrix"].is_array());
        assert!(v["support"].is_array());
        assert!(v["degenerate"].is_boolean());
    }
}

#[test]
fn perturb_reports_eighteen_vertices_in_seven_groups() {
    let file = example_margins();
    let doc = run_json(&margins_args(&file, &["perturb"]));
    assert_eq!(doc["k_lcm"], "1");
    assert_eq!(doc["t0"], "1/6");
    assert_eq!(doc["t"], "1/6");
    assert_eq!(doc["perturbed_vertices"].as_array().unwrap().len(), 18);

    let groups = doc["groups"].as_object().unwrap();
    assert_eq!(groups.len(), 7);
    let mut sizes: Vec<usize> = groups
        .values()
        .map(|v| v.as_array().unwrap().len())
        .collect();
    sizes.sort();
    assert_eq!(sizes, [2, 2, 2, 2, 3, 3, 4]);
    // The member indices partition 0..18.
    let mut members: Vec<u64> = groups
        .values()
        .flat_map(|v| v.as_array().unwrap().iter().map(|i| i.as_u64().unwrap()))
        .collect();
    members.sort();
    assert_eq!(members, (0..18).collect::<Vec<_>>());
}

#[test]
fn perturb_accepts_an_explicit_parameter() {
    let file = example_margins();
    let doc = run_json(&margins_args(&file, &["perturb", "--t", "1/12"]));
    assert_eq!(doc["t"], "1/12");
    let first = &doc["perturbed_vertices"][0]["matrix_at_t"];
    assert!(first.is_array());
}

#[test]
fn cones_of_the_central_vertex() {
    let file = example_margins();
    let doc = run_json(&margins_args(&file, &["cones"]));
    let key = |matrix: &Value| -> String {
        matrix
            .as_array()
            .unwrap()
            .iter()
            .map(|row| {
                row.as_array()
                    .unwrap()
                    .iter()
                    .map(|e| e.as_str().unwrap().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    };
    let central = doc["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| key(&v["matrix"]) == "1,0,0;0,1,0;0,0,2")
        .expect("diagonal vertex present");
    assert_eq!(central["ray_count"], 5);
    assert_eq!(central["rays"].as_array().unwrap().len(), 5);
}

#[test]
fn mgf_dilation_scales_apexes_only() {
    let file = example_margins();
    let single = run_json(&margins_args(&file, &["mgf"]));
    let doubled = run_json(&margins_args(&file, &["mgf", "--dilation", "2"]));
    assert_eq!(single["term_count"], 18);
    assert_eq!(doubled["term_count"], 18);
    let apex = |doc: &Value, i: usize| doc["terms"][i]["apex"].clone();
    for i in 0..18 {
        let a1 = apex(&single, i);
        let a2 = apex(&doubled, i);
        for (r1, r2) in a1.as_array().unwrap().iter().zip(a2.as_array().unwrap()) {
            for (e1, e2) in r1.as_array().unwrap().iter().zip(r2.as_array().unwrap()) {
                assert_eq!(e1.as_i64().unwrap() * 2, e2.as_i64().unwrap());
            }
        }
        assert_eq!(single["terms"][i]["rays"], doubled["terms"][i]["rays"]);
    }
}

#[test]
fn central_counts_schema() {
    let doc = run_json(&[
        "central", "--k", "1", "--n", "3", "--a", "1", "--emit", "counts",
    ]);
    assert_eq!(doc, serde_json::json!({"vertices": 6, "max_vertices": 18}));
}

#[test]
fn central_counts_for_larger_parameters() {
    let doc = run_json(&[
        "central", "--k", "3", "--n", "2", "--a", "5", "--emit", "counts",
    ]);
    // 6!/(3!)^2 = 20 partitions; 20 * 2^0 * 3^1 = 60 trees.
    assert_eq!(doc, serde_json::json!({"vertices": 20, "max_vertices": 60}));
}

#[test]
fn ehrhart_of_the_central_birkhoff_cube() {
    let doc = run_json(&["ehrhart", "--central", "1", "3", "1"]);
    assert_eq!(
        doc["ehrhart"],
        serde_json::json!(["1", "9/4", "15/8", "3/4", "1/8"])
    );
    assert_eq!(doc["dim"], 4);
    assert_eq!(doc["leading"], "1/8");
    assert_eq!(doc["normalized_volume"], "3");
    assert_eq!(doc["direction_base"], 2);
}

#[test]
fn ehrhart_of_the_unit_square_polytope() {
    let file = margins_file(r#"{"r": ["1", "1"], "c": ["1", "1"]}"#);
    let doc = run_json(&margins_args(&file, &["ehrhart"]));
    assert_eq!(doc["ehrhart"], serde_json::json!(["1", "1"]));
    assert_eq!(doc["dim"], 1);
    assert_eq!(doc["normalized_volume"], "1");
}

#[test]
fn volume_matches_ehrhart_leading_data() {
    let doc = run_json(&["volume", "--central", "1", "3", "1"]);
    assert_eq!(doc["dim"], 4);
    assert_eq!(doc["leading"], "1/8");
    assert_eq!(doc["normalized_volume"], "3");
    assert_eq!(doc["direction_base"], 2);
    assert!(doc.get("ehrhart").is_none());
}

#[test]
fn verify_passes_on_margins_input() {
    let file = example_margins();
    let doc = run_json(&margins_args(&file, &["verify"]));
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["seed"], 0);
    for check in doc["checks"].as_array().unwrap() {
        assert_ne!(check["status"], "failed", "{check}");
    }
}

#[test]
fn verify_passes_on_central_input_with_extra_checks() {
    let doc = run_json(&["verify", "--central", "2", "2", "1", "--seed", "7"]);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["seed"], 7);
    let names: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"central-counts"));
    assert!(names.contains(&"central-vertices"));
    assert!(names.contains(&"central-mgf"));
}

#[test]
fn verify_skips_brute_force_beyond_the_size_bound() {
    // 4 x 6 = 24 cells is past the brute-force bound, so the oracle-backed
    // checks skip while the purely structural ones still run.
    let file = margins_file(r#"{"r": ["6", "6", "6", "6"], "c": ["4", "4", "4", "4", "4", "4"]}"#);
    let doc = run_json(&margins_args(&file, &["verify"]));
    assert_eq!(doc["status"], "ok");
    let status_of = |name: &str| -> String {
        doc["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == name)
            .map(|c| c["status"].as_str().unwrap().to_string())
            .expect("check present")
    };
    assert_eq!(status_of("vertex-enumeration"), "skipped");
    assert_eq!(status_of("parameter-independence"), "ok");
    assert_eq!(status_of("limit-reconstruction"), "ok");
}

#[test]
fn reruns_are_byte_identical() {
    let file = example_margins();
    for rest in [
        vec!["vertices"],
        vec!["perturb"],
        vec!["mgf"],
        vec!["ehrhart"],
        vec!["verify"],
        vec!["vertices", "--format", "text"],
    ] {
        let args = margins_args(&file, &rest);
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "{rest:?} differs between runs");
    }
}

#[test]
fn text_format_prints_aligned_reports() {
    let file = example_margins();
    let out = run(&margins_args(&file, &["vertices", "--format", "text"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("polytope r = (1, 1, 2); c = (1, 1, 2)"));
    assert!(text.contains("dimension 4, degenerate (7 vertices)"));
    assert!(text.contains("[degenerate]"));

    let out = run(&["ehrhart", "--central", "1", "3", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("normalized volume 3"));
}

#[test]
fn malformed_inputs_exit_one() {
    let not_json = margins_file("not json at all");
    let bad_total = margins_file(r#"{"r": ["1", "1"], "c": ["3"]}"#);
    let nonpositive = margins_file(r#"{"r": ["0", "2"], "c": ["1", "1"]}"#);
    let cases: Vec<Vec<&str>> = vec![
        margins_args(&not_json, &["vertices"]),
        margins_args(&bad_total, &["vertices"]),
        margins_args(&nonpositive, &["ehrhart"]),
        vec!["vertices", "--margins", "/nonexistent/margins.json"],
        vec!["vertices"],
        vec!["central", "--k", "0", "--n", "2", "--a", "1"],
        vec!["mgf", "--central", "1", "2", "1", "--dilation", "0"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "{args:?} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
    }
}

#[test]
fn conflicting_input_modes_exit_one() {
    let file = example_margins();
    let out = run(&[
        "vertices",
        "--margins",
        path_arg(&file),
        "--central",
        "1",
        "2",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_of_range_parameter_exits_one() {
    let file = example_margins();
    let out = run(&margins_args(&file, &["perturb", "--t", "2/3"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("admissible"));
}

#[test]
fn help_and_version_exit_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
    assert!(run(&["vertices", "--help"]).status.success());
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn margins_file_with_rational_entries_is_accepted() {
    let file = margins_file(r#"{"r": ["1/2", "1/2"], "c": ["1/3", "2/3"]}"#);
    let doc = run_json(&margins_args(&file, &["vertices"]));
    // A 2 x 2 transportation polytope is a segment: two vertices.
    assert_eq!(doc["vertex_count"], 2);
    // Generating functions need integral margins to sum lattice points.
    let out = run(&margins_args(&file, &["mgf"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn central_vertices_match_the_dedicated_subcommand() {
    let via_central = run_json(&[
        "central", "--k", "2", "--n", "2", "--a", "1", "--emit", "vertices",
    ]);
    let via_margins = {
        let file = margins_file(r#"{"r": ["1", "1", "1", "1"], "c": ["2", "2"]}"#);
        run_json(&margins_args(&file, &["vertices"]))
    };
    assert_eq!(via_central["vertex_count"], 6);
    assert_eq!(via_central["vertices"], via_margins["vertices"]);
}

#[test]
fn output_path_is_relative_to_invocation() {
    // Margins paths are resolved by the OS, not the tool: a relative path
    // works when the process is started in that directory.
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("margins.json"),
        r#"{"r": ["2", "1"], "c": ["1", "2"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["vertices", "--margins", "margins.json"])
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(Path::new(env!("CARGO_BIN_EXE_transpoly")).is_absolute());
}
