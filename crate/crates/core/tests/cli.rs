use std::fs;

use ymflow::cli::{run, to_json_lines};
use ymflow::evolve::EvolutionTrace;
use ymflow::ggmt::GgmtReport;
use ymflow::model::make_dimension;
use ymflow::spectral::EigenResult;

fn run_in(dir: &std::path::Path, args: &[&str]) -> i32 {
    let mut argv = vec!["ymflow"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    run(argv)
}

#[test]
fn ggmt_pairs_emit_four_passing_lines() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["ggmt", "--pathway", "paper"]), 0);
    let text = fs::read_to_string(dir.path().join("ggmt.jsonl")).unwrap();
    let reports: Vec<GgmtReport> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r.passes));
    // the records survive a second trip through the emitter unchanged
    assert_eq!(to_json_lines(&reports).unwrap(), text);
}

#[test]
fn single_pair_verdict() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run_in(
            dir.path(),
            &["ggmt", "--n", "8", "--p", "4", "--pathway", "paper"]
        ),
        0
    );
    let text = fs::read_to_string(dir.path().join("ggmt.jsonl")).unwrap();
    let r: GgmtReport = serde_json::from_str(text.trim()).unwrap();
    assert!(r.passes && r.n == 8);
}

#[test]
fn profile_csv_starts_at_inverse_b() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "profile",
        "--d",
        "5",
        "--rho-max",
        "10",
        "--samples",
        "100",
        "--format",
        "csv",
    ];
    assert_eq!(run_in(dir.path(), &args), 0);
    let text = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,W,V"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let dim = make_dimension(5).unwrap();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 1.0 / dim.b);
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn spectrum_starts_with_unstable_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run_in(
            dir.path(),
            &["spectrum", "--n", "8", "--spec", "linearized", "--k", "2"]
        ),
        0
    );
    let text = fs::read_to_string(dir.path().join("spectrum.jsonl")).unwrap();
    let r: EigenResult = serde_json::from_str(text.trim()).unwrap();
    assert!((r.eigenvalues[0] + 1.0).abs() < 1e-4);
    assert!(r.eigenvalues[1] > 0.0);
}

#[test]
fn trace_csv_has_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "evolve",
        "--d",
        "6",
        "--eps",
        "0.01",
        "--tau-max",
        "1",
        "--N",
        "500",
    ];
    assert_eq!(
        run_in(dir.path(), &[&base[..], &["--format", "csv"]].concat()),
        0
    );
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(run_in(dir.path(), &base), 0);
    let json = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    let tr: EvolutionTrace = serde_json::from_str(json.trim()).unwrap();
    assert_eq!(csv.lines().count(), tr.len() + 1);
    assert_eq!(tr.len(), 11);
}

#[test]
fn identical_configs_give_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "evolve",
        "--d",
        "5",
        "--eps",
        "0.01",
        "--T",
        "1.01",
        "--tau-max",
        "2",
        "--N",
        "800",
    ];
    assert_eq!(run_in(a.path(), &args), 0);
    assert_eq!(run_in(b.path(), &args), 0);
    let x = fs::read(a.path().join("trace.jsonl")).unwrap();
    let y = fs::read(b.path().join("trace.jsonl")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(["ymflow", "ggmt", "--no-such-flag"]), 2);
    assert_eq!(run(["ymflow"]), 2);
    assert_eq!(run_in(dir.path(), &["ggmt", "--n", "8"]), 1);
    assert_eq!(run_in(dir.path(), &["profile", "--d", "2"]), 1);
    assert_eq!(
        run_in(dir.path(), &["spectrum", "--n", "8", "--N", "10"]),
        1
    );
    assert_eq!(run_in(dir.path(), &["ggmt", "--format", "csv"]), 1);
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    // a regular file cannot serve as the output directory
    assert_eq!(
        run_in(
            &file,
            &["ggmt", "--n", "8", "--p", "4", "--pathway", "paper"]
        ),
        1
    );
}

#[test]
fn empty_record_set_is_an_empty_file() {
    let empty: Vec<GgmtReport> = Vec::new();
    assert_eq!(to_json_lines(&empty).unwrap(), "");
}
