//! End-to-end checks of the installed binary: deterministic reruns
//! (criterion 14) and the exit-code contract, driven through real
//! process invocations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levycop"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("levycop-test-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).expect("write spec");
    p
}

const CLAYTON: &str = r#"{"kind": "copula", "d": 2, "family": "clayton"}"#;
const ARCH_LEVY: &str = r#"{"kind": "levy", "d": 2, "family": "archimedean-levy",
 "generator": {"d": 2, "family": "reciprocal"}}"#;
const INDEP_LEVY: &str = r#"{"kind": "levy", "d": 2, "family": "independence"}"#;
const JUMP1: &str = r#"{"kind": "jump-process", "d": 1, "eps": 0.1, "horizon": 1.0,
 "measure": {"form": "radial-simplex",
             "radial": {"family": "truncated-reciprocal", "d": 1, "eps": 0.1}}}"#;

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_exit(out: &Output, want: i32, what: &str) {
    let code = out.status.code().expect("no signal");
    assert_eq!(
        code,
        want,
        "{what}: exit {code}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn criterion_14_sample_reruns_are_byte_identical() {
    let dir = workdir("sample");
    let spec = write_spec(&dir, "clayton.json", CLAYTON);
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for out in [&a, &b] {
        let r = run(&[
            "sample",
            "--spec",
            spec.to_str().unwrap(),
            "--n",
            "500",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_exit(&r, 0, "sample");
    }
    let fa = fs::read(&a).unwrap();
    assert_eq!(fa, fs::read(&b).unwrap(), "sample reruns differ");
    assert!(fa.starts_with(b"# seed=7 n=500 family=clayton\nu1,u2\n"));
    println!("PASS criterion 14a: sample byte-identical across reruns");
}

#[test]
fn criterion_14_simulate_reruns_are_byte_identical_and_thread_independent() {
    let dir = workdir("simulate");
    let spec = write_spec(&dir, "jump1.json", JUMP1);
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let base = [
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--n",
        "400",
        "--seed",
        "11",
        "--out",
    ];
    let mut args_a: Vec<&str> = base.to_vec();
    args_a.push(a.to_str().unwrap());
    let r = bin().args(&args_a).env("LEVYCOP_THREADS", "1").output().unwrap();
    assert_exit(&r, 0, "simulate single-thread");
    let mut args_b: Vec<&str> = base.to_vec();
    args_b.push(b.to_str().unwrap());
    let r = bin().args(&args_b).env("LEVYCOP_THREADS", "4").output().unwrap();
    assert_exit(&r, 0, "simulate multi-thread");
    let fa = fs::read(&a).unwrap();
    assert_eq!(fa, fs::read(&b).unwrap(), "thread count changed output");
    // Poisson mean over the horizon: total truncated mass 1/eps = 10.
    let text = String::from_utf8(fa).unwrap();
    let mean: f64 = text
        .lines()
        .next()
        .and_then(|l| l.split("mean_jumps=").nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!((mean - 10.0).abs() < 0.5, "mean jump count {mean}");
    println!("PASS criterion 14b: simulate byte-identical and thread-count independent");
}

#[test]
fn criterion_14_eval_and_verify_reruns_are_byte_identical() {
    let dir = workdir("eval");
    let spec = write_spec(&dir, "clayton.json", CLAYTON);
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for out in [&a, &b] {
        let r = run(&[
            "eval",
            "--spec",
            spec.to_str().unwrap(),
            "--grid",
            "0.1:0.9:7,0.1:0.9:7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_exit(&r, 0, "eval");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "eval reruns differ");

    let ra = dir.join("ra.json");
    let rb = dir.join("rb.json");
    for out in [&ra, &rb] {
        let r = run(&[
            "verify",
            "--suite",
            "frechet",
            "--seed",
            "9",
            "--n",
            "200",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_exit(&r, 0, "verify frechet");
    }
    assert_eq!(fs::read(&ra).unwrap(), fs::read(&rb).unwrap(), "verify reruns differ");
    println!("PASS criterion 14c: eval and verify byte-identical across reruns");
}

#[test]
fn eval_archimedean_levy_reciprocal_hits_pinned_value() {
    let dir = workdir("pinned");
    let spec = write_spec(&dir, "arch.json", ARCH_LEVY);
    let out = run(&[
        "eval",
        "--spec",
        spec.to_str().unwrap(),
        "--grid",
        "1:1:1,1:1:1",
    ]);
    assert_exit(&out, 0, "eval archimedean-levy");
    let text = String::from_utf8(out.stdout).unwrap();
    // phi(phi^{-1}(1) + phi^{-1}(1)) with phi = 1/x.
    assert!(text.contains("5.0000000000000000e-1"), "got: {text}");
}

#[test]
fn convert_clayton_reports_tiny_round_trip_residual() {
    let dir = workdir("convert");
    let spec = write_spec(&dir, "clayton.json", CLAYTON);
    let out_file = dir.join("converted.json");
    let r = run(&[
        "convert",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_exit(&r, 0, "convert clayton");
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(doc["converted"]["kind"], "levy");
    assert_eq!(doc["converted"]["family"], "from-proper");
    assert_eq!(doc["round_trip"]["degenerate"], false);
    let residual = doc["round_trip"]["max_residual"].as_f64().unwrap();
    assert!(residual <= 1e-12, "residual {residual}");

    // The emitted Lévy spec evaluates to the pinned image value at (1,1).
    let levy_spec = dir.join("levy.json");
    fs::write(&levy_spec, serde_json::to_string(&doc["converted"]).unwrap()).unwrap();
    let out = run(&[
        "eval",
        "--spec",
        levy_spec.to_str().unwrap(),
        "--grid",
        "1:1:1,1:1:1",
        "--format",
        "json",
    ]);
    assert_exit(&out, 0, "eval converted spec");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = doc["values"][0].as_f64().unwrap();
    assert!((v - 0.6201145069582775).abs() <= 1e-12, "got {v}");
}

#[test]
fn convert_independence_levy_is_a_degenerate_success() {
    let dir = workdir("degenerate");
    let spec = write_spec(&dir, "indep.json", INDEP_LEVY);
    let out = run(&["convert", "--spec", spec.to_str().unwrap()]);
    assert_exit(&out, 0, "degenerate convert still exits 0");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["round_trip"]["degenerate"], true);
    assert!(doc["round_trip"]["message"].as_str().unwrap().contains("axes"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = workdir("exits");

    // 2: malformed spec.
    let bad = write_spec(&dir, "bad.json", r#"{"kind": "copula", "d": 2"#);
    let out = run(&["eval", "--spec", bad.to_str().unwrap(), "--grid", "0.5:0.5:1,0.5:0.5:1"]);
    assert_exit(&out, 2, "malformed spec");
    assert!(!out.stderr.is_empty(), "parse failure should explain itself");

    // 2: n = 0.
    let clayton = write_spec(&dir, "clayton.json", CLAYTON);
    let out = run(&["sample", "--spec", clayton.to_str().unwrap(), "--n", "0"]);
    assert_exit(&out, 2, "n=0");

    // 2: grid dimension mismatch.
    let out = run(&["eval", "--spec", clayton.to_str().unwrap(), "--grid", "0.5:0.5:1"]);
    assert_exit(&out, 2, "grid arity");

    // 3: numeric/evaluation failure on valid arguments.
    let table = write_spec(
        &dir,
        "table.json",
        r#"{"kind": "generator-psi", "d": 2, "family": "custom-table",
            "xs": [0.0, 1.0, 2.0], "values": [1.0, 0.4, 0.1]}"#,
    );
    let out = run(&["eval", "--spec", table.to_str().unwrap(), "--grid", "5:5:1"]);
    assert_exit(&out, 3, "out-of-domain eval");

    // 1: a verification suite that finds a violation.
    let concave = write_spec(
        &dir,
        "concave.json",
        r#"{"kind": "generator-psi", "d": 2, "family": "custom-table",
            "xs": [0.0, 1.0, 2.0, 3.0], "values": [1.0, 0.9, 0.1, 0.05]}"#,
    );
    let out = run(&["verify", "--suite", "monotone", "--spec", concave.to_str().unwrap()]);
    assert_exit(&out, 1, "failed verification");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"), "failing entry listed: {text}");

    // 0: the same suite on sound defaults.
    let out = run(&["verify", "--suite", "roundtrip", "--n", "50"]);
    assert_exit(&out, 0, "roundtrip on built-ins");
}

#[test]
fn verify_suites_pass_at_reduced_scale() {
    for suite in ["frechet", "monotone", "roundtrip", "iid-records"] {
        let out = run(&["verify", "--suite", suite, "--n", "500", "--seed", "5"]);
        assert_exit(&out, 0, suite);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(
            text.lines().all(|l| l.starts_with("PASS")),
            "{suite} printed: {text}"
        );
    }
    // Monte Carlo suites at trimmed replicate counts to keep the test fast.
    for (suite, n) in [("eqexpo", "20000"), ("record-count", "20000"), ("factorization", "8000")] {
        let out = run(&["verify", "--suite", suite, "--n", n, "--seed", "5"]);
        assert_exit(&out, 0, suite);
    }
}
