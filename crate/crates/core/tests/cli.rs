use std::fs;

use habituation::cli::run_with_io;
use habituation::experiments::{sweep, Dataset, Metric, SweepParameter, SweepSpec};
use habituation::HabituationParams;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("habituation").chain(args.iter().copied());
    let code = run_with_io(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn gain_table_matches_known_first_step() {
    let (code, out, _) = run(&["gain", "--delta", "4", "--steps", "3"]);
    assert_eq!(code, 0);
    let first = out.lines().find(|l| l.trim_start().starts_with("1 ")).unwrap();
    assert!(first.contains("0.230050"), "{first}");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn invalid_parameters_exit_with_validation_code() {
    let (code, _, err) = run(&["gain", "--alpha", "-1"]);
    assert_eq!(code, 1);
    assert!(err.contains("learning_rate"));
    assert_eq!(run(&["figure", "fig9"]).0, 1);
    assert_eq!(run(&["gain", "--noise", "0"]).0, 1);
}

#[test]
fn large_learning_rate_warns() {
    let (code, _, err) = run(&["gain", "--alpha", "2"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("fig.csv");
    assert_eq!(run(&["figure", "fig2", "--out", target.to_str().unwrap()]).0, 3);
}

#[test]
fn figure_csv_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    assert_eq!(run(&["figure", "fig1", "--out", path.to_str().unwrap()]).0, 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("series,x,y"));
    assert_eq!(lines.count(), 50);
    assert!(!text.contains('\r'));
}

#[test]
fn figure_json_round_trips_and_regenerates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.json");
    assert_eq!(run(&["figure", "fig4", "--out", path.to_str().unwrap()]).0, 0);
    let dataset: Dataset = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dataset.series().len(), 3);
    assert_eq!(dataset.provenance().regenerate().unwrap(), dataset);
}

#[test]
fn figure_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.json");
    let args = ["--steps", "4", "--noise", "1", "figure", "fig1", "--out", path.to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let dataset: Dataset = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(dataset.series().iter().all(|s| s.points.len() == 4));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"delta": 10, "steps": 2}"#).unwrap();
    let (code, out, _) = run(&["--config", config.to_str().unwrap(), "update", "--steps", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# delta_i=10 "), "{out}");
    assert!(out.contains("N=3"));

    fs::write(&config, r#"{"delta": 10, "bogus": 1}"#).unwrap();
    assert_eq!(run(&["--config", config.to_str().unwrap(), "gain"]).0, 1);
}

#[test]
fn sweep_spec_file_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        parameter: SweepParameter::InitialUncertainty,
        values: vec![5.0, 30.0],
        fixed: HabituationParams::new(10.0, 1.0, 0.5, 0.1, 10).unwrap(),
        wundt: None,
        metric: Metric::Gain,
        steps: 6,
        literal_range: false,
    };
    let spec_path = dir.path().join("spec.json");
    let out_path = dir.path().join("sweep.json");
    fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let args = ["sweep", "--spec", spec_path.to_str().unwrap(), "--out", out_path.to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let written: Dataset = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written, sweep(&spec).unwrap());
}

#[test]
fn sweep_flags_produce_requested_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("range.csv");
    let args = [
        "--steps", "5", "sweep", "--vary", "uncertainty", "--values", "1,5,30",
        "--metric", "acceptable_range", "--out", path.to_str().unwrap(),
    ];
    assert_eq!(run(&args).0, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 5);
}

#[test]
fn svg_output_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.svg");
    assert_eq!(run(&["figure", "fig2", "--out", path.to_str().unwrap()]).0, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<polyline").count(), 2);
}

#[test]
fn valence_reports_crossing() {
    let (code, out, _) = run(&["valence", "--steps", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("1.82026"), "{out}");
    let (code, out, _) = run(&["--eq5-literal", "valence", "--steps", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("130.495"), "{out}");
}

#[test]
fn verify_is_seeded() {
    let a = run(&["verify", "--seed", "3", "--samples", "50"]);
    let b = run(&["verify", "--seed", "3", "--samples", "50"]);
    assert_eq!(a.0, 0, "{}", a.1);
    assert_eq!(a, b);
}
