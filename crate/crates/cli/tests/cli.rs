use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn qiplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qiplab")).args(args).output().unwrap()
}

fn qiplab_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qiplab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows of a CSV report, skipping the comment echo and the header.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn chsh_gap_reports_both_values() {
    let o = qiplab(&["chsh-gap", "--restarts", "8", "--seed", "2"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("# qiplab chsh-gap config="));
    let rows = rows(&csv);
    assert_eq!(rows[0][0], "exact_classical");
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(rows[1][0], "seesaw");
    assert!((rows[1][1].parse::<f64>().unwrap() - 0.8535533905932737).abs() < 1e-6);
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.contains("gap 0.103553"));
}

#[test]
fn amplify_at_one_half() {
    let o = qiplab(&["amplify", "--p", "0.5", "--k", "41"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn out_flag_writes_file_and_summary_to_stdout() {
    let path = scratch("amplify.csv");
    let o = qiplab(&["amplify", "--p", "0.9", "--k", "5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("majority success probability"));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("p,k,probability"));
    assert!(!csv.contains("\"out\""));
}

#[test]
fn subsample_has_one_row_per_trial() {
    let o = qiplab(&["subsample", "--trials", "100", "--r", "64", "--seed", "3"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let trials = rows(&csv)
        .into_iter()
        .filter(|r| r[0].parse::<usize>().is_ok())
        .count();
    assert_eq!(trials, 100);
    assert!(csv.contains("failure_fraction"));
}

#[test]
fn flags_override_config_file() {
    let path = scratch("amplify.json");
    std::fs::write(&path, r#"{"p": 0.9, "k": 5}"#).unwrap();
    let from_file = qiplab(&["amplify", "--config", path.to_str().unwrap()]);
    let overridden = qiplab(&["amplify", "--config", path.to_str().unwrap(), "--k", "1"]);
    assert!(from_file.status.success() && overridden.status.success());
    let a = rows(&stdout(&from_file));
    let b = rows(&stdout(&overridden));
    assert_eq!(a[0][1], "5");
    assert_eq!(b[0][1], "1");
    assert!((b[0][2].parse::<f64>().unwrap() - 0.9).abs() < 1e-15);
}

#[test]
fn run_reads_config_from_stdin() {
    let o = qiplab_with_stdin(&["run", "--config", "-"], r#"{"command": "amplify", "p": 0.5, "k": 3}"#);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# qiplab amplify"));
}

#[test]
fn run_rejects_mismatched_command() {
    let path = scratch("mismatch.json");
    std::fs::write(&path, r#"{"command": "subsample"}"#).unwrap();
    let o = qiplab(&["amplify", "--config", path.to_str().unwrap(), "--p", "0.5", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_with_two() {
    let malformed = scratch("malformed.json");
    std::fs::write(&malformed, "{ not json").unwrap();
    let unknown = scratch("unknown.json");
    std::fs::write(&unknown, r#"{"p": 0.5, "bogus": 1}"#).unwrap();
    for args in [
        vec!["amplify", "--config", malformed.to_str().unwrap()],
        vec!["amplify", "--config", unknown.to_str().unwrap()],
        vec!["amplify", "--p", "0.5", "--k", "4"],
        vec!["amplify", "--p", "0.5", "--k", "3", "--r", "8"],
        vec!["nexp-decide", "--c", "0.62", "--s", "0.6", "--resolution", "50"],
        vec!["chsh-gap", "--no-such-flag"],
    ] {
        let o = qiplab(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bad_thread_count_exits_with_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_qiplab"))
        .args(["amplify", "--p", "0.5", "--k", "3"])
        .env("LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn canonical_prover_cannot_be_recanonicalized() {
    let emitted = scratch("canonical.json");
    let first = qiplab(&["canonicalize", "--seed", "4", "--emit", emitted.to_str().unwrap()]);
    assert!(first.status.success());
    let o = qiplab(&["canonicalize", "--seed", "4", "--prover", emitted.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn canonicalize_does_not_lose_acceptance() {
    let o = qiplab(&["canonicalize", "--seed", "9"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let footer = |key: &str| -> f64 {
        csv.lines()
            .find_map(|l| l.strip_prefix(&format!("# {key}=")))
            .or_else(|| csv.lines().find_map(|l| l.strip_prefix(&format!("{key},"))))
            .unwrap_or_else(|| panic!("missing {key} in\n{csv}"))
            .parse()
            .unwrap()
    };
    assert!(footer("canonical_acceptance") >= footer("raw_acceptance") - 1e-9);
}

#[test]
fn eb_check_verdicts() {
    let id = stdout(&qiplab(&["eb-check", "--instance", "identity"]));
    assert!(id.contains("npt"), "{id}");
    let deph = stdout(&qiplab(&["eb-check", "--instance", "dephasing"]));
    assert!(deph.contains("ppt"), "{deph}");
}

#[test]
fn output_is_independent_of_worker_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qiplab"))
            .args(["subsample", "--family", "random", "--r", "16", "--trials", "20", "--seed", "6"])
            .env("LAB_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}
