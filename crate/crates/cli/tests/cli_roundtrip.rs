//! End-to-end runs of the binary: exit codes, report contents, and the
//! determinism contract of seeded runs.

use std::path::Path;
use std::process::{Command, Output};

const AFFINE_DEMO: &str = "\
[system]
kind = \"affine\"
dims = [2, 1]
matrix = [
    [0.25, 0.15, -0.20],
    [0.10, 0.30, -0.15],
    [-0.15, -0.20, 0.25],
]
offset = [0.5, -0.25, 1.0]

[phi]
kind = \"linear\"
alpha = 0.65
";

fn mfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfix"))
        .args(args)
        .env_remove("MFIX_LOG")
        .output()
        .expect("the binary runs")
}

fn mfix_logged(args: &[&str], level: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfix"))
        .args(args)
        .env("MFIX_LOG", level)
        .output()
        .expect("the binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("problem.toml");
    std::fs::write(&path, text).expect("config written");
    path.to_string_lossy().into_owned()
}

fn code(output: &Output) -> i32 {
    output
        .status
        .code()
        .expect("terminated by exit, not signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf8")
}

#[test]
fn solve_reports_a_converged_certified_run() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), AFFINE_DEMO);
    let output = mfix(&["solve", "--config", &config]);
    let text = stdout(&output);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(text.contains("report = solve"));
    assert!(text.contains("signature = +-/-+"));
    assert!(text.contains("certified = true"));
    assert!(text.contains("status = converged"));
    assert!(text.contains("bracket-valid = true"));
}

#[test]
fn a_fixed_point_start_converges_in_zero_iterations() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        "\
[system]
kind = \"affine\"
dims = [1, 1]
matrix = [[0.5, -0.25], [-0.25, 0.5]]
offset = [0.75, 0.75]

[phi]
kind = \"linear\"
alpha = 0.8

[solve]
start = [[1.0], [1.0]]
",
    );
    let output = mfix(&["solve", "--config", &config]);
    let text = stdout(&output);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(text.contains("iterations = 0"));
    assert!(text.contains("solution 0 = [1.0000000000000000e0]"));
    assert!(text.contains("solution 1 = [1.0000000000000000e0]"));
}

#[test]
fn admissible_bounds_are_reported_and_used_as_starts() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        &format!(
            "{AFFINE_DEMO}
[bounds]
lower = [[-0.36, -1.15], [0.98]]
upper = [[0.64, -0.15], [1.98]]
"
        ),
    );
    let verify = mfix(&["verify", "--config", &config]);
    assert_eq!(code(&verify), 0, "stderr: {}", stderr(&verify));
    assert!(stdout(&verify).contains("bounds = admissible"));
    assert!(stdout(&verify).contains("bounds-failures = 0"));

    let solve = mfix(&["solve", "--config", &config]);
    assert_eq!(code(&solve), 0, "stderr: {}", stderr(&solve));
    assert!(stdout(&solve).contains("status = converged"));
}

#[test]
fn configuration_mistakes_exit_with_code_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), AFFINE_DEMO);

    let zero_tol = mfix(&["solve", "--config", &config, "--tol", "0"]);
    assert_eq!(code(&zero_tol), 2, "stderr: {}", stderr(&zero_tol));

    let missing = mfix(&[
        "solve",
        "--config",
        dir.path().join("absent.toml").to_str().unwrap(),
    ]);
    assert_eq!(code(&missing), 2);

    let unknown_key = write_config(dir.path(), "[system]\nkind = \"affine\"\nshape = [2]\n");
    let output = mfix(&["verify", "--config", &unknown_key]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("shape"));

    let no_section = write_config(dir.path(), "[phi]\nkind = \"rational\"\n");
    assert_eq!(code(&mfix(&["solve", "--config", &no_section])), 2);

    let tiny_grid = write_config(
        dir.path(),
        "[pbvs]\nrhs = \"relaxation\"\nlambda = 1.0\ntarget = 0.0\ngrid-size = 2\n",
    );
    assert_eq!(code(&mfix(&["pbvs", "--config", &tiny_grid])), 2);

    let no_lambda = write_config(dir.path(), "[pbvs]\nrhs = \"relaxation\"\ntarget = 0.0\n");
    let output = mfix(&["pbvs", "--config", &no_lambda]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("lambda"));

    let one_sided = write_config(
        dir.path(),
        "[pbvs]\nrhs = \"relaxation\"\nlambda = 1.0\ntarget = 0.0\nlower = 0.0\n",
    );
    assert_eq!(code(&mfix(&["pbvs", "--config", &one_sided])), 2);

    assert_eq!(code(&mfix(&["classify"])), 2);
    assert_eq!(code(&mfix(&["classify", "--count", "9"])), 2);
    assert_eq!(code(&mfix(&["classify", "--signature", "+?/-+"])), 2);

    let usage = mfix(&["solve", "--no-such-flag"]);
    assert_eq!(code(&usage), 2);
}

#[test]
fn a_missigned_system_is_refused_with_exit_three() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        &AFFINE_DEMO.replace("[phi]", "signature = \"++/++\"\n\n[phi]"),
    );
    let output = mfix(&["solve", "--config", &config]);
    assert_eq!(code(&output), 3, "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("operator"));
}

#[test]
fn refuted_starting_bounds_exit_with_code_three() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        &format!(
            "{AFFINE_DEMO}
[bounds]
lower = [[10.0, 10.0], [10.0]]
upper = [[-10.0, -10.0], [-10.0]]
"
        ),
    );
    let output = mfix(&["solve", "--config", &config]);
    assert_eq!(code(&output), 3, "stderr: {}", stderr(&output));

    let verify = mfix(&["verify", "--config", &config]);
    assert_eq!(code(&verify), 3);
    assert!(stdout(&verify).contains("bounds = refuted"));
}

#[test]
fn an_uncertified_contraction_exits_with_code_five() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        &AFFINE_DEMO
            .replace("0.25, 0.15, -0.20", "0.50, 0.30, -0.40")
            .replace("0.10, 0.30, -0.15", "0.20, 0.60, -0.30")
            .replace("-0.15, -0.20, 0.25", "-0.30, -0.40, 0.50")
            .replace("alpha = 0.65", "alpha = 0.9"),
    );
    let verify = mfix(&["verify", "--config", &config]);
    assert_eq!(code(&verify), 5, "stderr: {}", stderr(&verify));
    let text = stdout(&verify);
    assert!(text.contains("certified = false"));
    assert!(text.contains("violation 0 = sample"));

    let solve = mfix(&["solve", "--config", &config]);
    assert_eq!(code(&solve), 5);
}

#[test]
fn a_stalled_iteration_exits_with_code_four() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), AFFINE_DEMO);
    let output = mfix(&[
        "solve",
        "--config",
        &config,
        "--max-iter",
        "3",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(code(&output), 4, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("status = max-iterations-reached"));
}

#[test]
fn census_counts_match_the_rank_one_formula() {
    for (order, expected) in [("2", "counts = 16 2"), ("3", "counts = 512 4")] {
        let output = mfix(&["classify", "--count", order]);
        assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
        assert!(
            stdout(&output).contains(expected),
            "census for order {order}: {}",
            stdout(&output)
        );
    }
}

#[test]
fn the_out_file_mirrors_stdout_byte_for_byte() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), AFFINE_DEMO);
    let out = dir.path().join("report.txt");
    let output = mfix(&["solve", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let written = std::fs::read(&out).expect("report file");
    assert_eq!(written, output.stdout);
}

#[test]
fn logging_goes_to_stderr_and_quiet_runs_say_nothing() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), AFFINE_DEMO);

    let quiet = mfix_logged(&["solve", "--config", &config], "quiet");
    assert_eq!(code(&quiet), 0);
    assert!(stderr(&quiet).is_empty());

    let info = mfix_logged(&["solve", "--config", &config], "info");
    assert_eq!(code(&info), 0);
    assert!(stderr(&info).contains("[mfix]"));
    assert_eq!(stdout(&info), stdout(&quiet));

    let trace = mfix_logged(&["solve", "--config", &config], "trace");
    assert!(stderr(&trace).contains("iteration 1"));
}
