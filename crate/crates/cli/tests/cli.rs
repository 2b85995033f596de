use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn qproof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qproof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scenario(name: &str) -> String {
    bundled()
        .join(format!("{name}.toml"))
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const WRONG_Q: &str = r#"
kind = "epr-qma"
seed = 11
shots = 40000

[verifier]
preset = "cnot-check"

[prover]
preset = "wrong-q"
q = "1/5"

[params]
n = 2

[[expect]]
quantity = "reject"
value = 0
relation = "ge"
"#;

#[test]
fn honest_epr_n2_accepts_with_certainty() {
    let o = qproof(&["run", &scenario("honest-epr-n2")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("check     accept == 1.000000000000 +/- 1e-9: measured 1.000000000000 PASS")
    );
    assert!(out.contains("seed      0 (ChaCha8)"));
    assert!(out.contains("trace     step6"));
}

#[test]
fn rst_cheat_is_rejected_with_a_sixteenth() {
    let o = qproof(&["run", &scenario("rst-cheat-q0.3")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reject == 0.062500000000 +/- 1e-9: measured 0.062500000000 PASS"));
}

#[test]
fn full_bundled_suite_passes() {
    let o = qproof(&["suite", bundled().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains(", 0 failed, 0 error(s);"), "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn malformed_file_is_a_parse_error_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.toml",
        "kind = \"rst\"\n[params]\nq = [1,\n",
    );
    let o = qproof(&["run", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let err = stderr(&o);
    assert!(err.contains("parse error") && err.contains("line"), "{err}");

    let f = write(
        dir.path(),
        "frac.toml",
        "kind = \"rst\"\n\n[params]\nq = \"3/x\"\n",
    );
    let o = qproof(&["run", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn validation_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (body, field) in [
        ("kind = \"mrp\"\n[params]\np = 2\nq = 1\n", "params.p"),
        ("kind = \"rst\"\n[params]\ninput = \"cheat\"\n", "params.q"),
        (
            "kind = \"rst\"\n[params]\ninput = \"cheat\"\nq = 0.5\n[[expect]]\nquantity = \"rejekt\"\nvalue = 0\n",
            "expect[0].quantity",
        ),
        (
            "kind = \"epr-qma\"\n[verifier]\npreset = \"nope\"\n[prover]\npreset = \"honest\"\n[params]\nn = 2\n",
            "verifier.preset",
        ),
        ("kind = \"reflection\"\nmode = \"mc\"\nshots = 5\n[params]\np = 1\nq = 1\n", "mode"),
    ] {
        let f = write(dir.path(), "s.toml", body);
        let o = qproof(&["run", &f]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(stdout(&o).is_empty());
        assert!(stderr(&o).contains(field), "{}", stderr(&o));
    }
}

#[test]
fn filter_matching_nothing_is_an_empty_suite() {
    let o = qproof(&[
        "suite",
        bundled().to_str().unwrap(),
        "--filter",
        "no-such-scenario",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).is_empty());
}

#[test]
fn failing_synthetic_scenario_is_itemized() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(scenario("rst-honest"), dir.path().join("rst-honest.toml")).unwrap();
    write(
        dir.path(),
        "synthetic.toml",
        "kind = \"rst\"\n[params]\ninput = \"cheat\"\nq = \"1/2\"\n[[expect]]\nquantity = \"reject\"\nvalue = \"1/8\"\n",
    );
    let o = qproof(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("1 passed, 1 failed"), "{out}");
    assert!(out
        .contains("failed: synthetic: reject == 0.125000000000 +/- 1e-9, measured 0.062500000000"));
    // ordering is by name
    assert!(out.find("scenario rst-honest").unwrap() < out.find("scenario synthetic").unwrap());
}

#[test]
fn budget_exceeded_has_its_own_status() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "tight.toml",
        "kind = \"epr-qma\"\nbudget = 6\n[verifier]\npreset = \"hadamard-coin\"\n[prover]\npreset = \"honest\"\n[params]\nn = 2\n",
    );
    let o = qproof(&["run", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("budget exceeded"));

    let f = write(
        dir.path(),
        "qip.toml",
        "kind = \"qip-transform\"\nbudget = 5\n[system]\npreset = \"twist3-yes\"\n[prover]\npreset = \"honest\"\n",
    );
    assert_eq!(qproof(&["run", &f]).status.code(), Some(3));
}

#[test]
fn exact_reports_are_byte_identical() {
    let dir = bundled();
    let args = ["suite", dir.to_str().unwrap(), "--filter", "epr"];
    let a = qproof(&args);
    let b = qproof(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "suite",
        dir.to_str().unwrap(),
        "--filter",
        "checker",
        "--format",
        "csv",
    ];
    assert_eq!(qproof(&args).stdout, qproof(&args).stdout);
}

#[test]
fn monte_carlo_is_reproducible_and_tracks_the_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "wrong-q.toml", WRONG_Q);
    let mc = ["run", f.as_str(), "--mode", "mc", "--format", "csv"];
    let a = qproof(&mc);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, qproof(&mc).stdout);
    let other = qproof(&["run", &f, "--mode", "mc", "--seed", "12", "--format", "csv"]);
    assert_ne!(a.stdout, other.stdout);

    let measured = |o: &Output| -> f64 {
        let out = stdout(o);
        let row = out.lines().find(|l| l.contains(",reject,")).unwrap();
        row.split(',').nth(4).unwrap().parse().unwrap()
    };
    let exact = measured(&qproof(&["run", &f, "--format", "csv"]));
    let sampled = measured(&a);
    assert!(exact > 0.01, "wrong q should be caught: {exact}");
    let sigma = (exact * (1.0 - exact) / 40000.0).sqrt();
    assert!(
        (sampled - exact).abs() < 5.0 * sigma,
        "{sampled} vs {exact}"
    );
}

#[test]
fn csv_carries_tolerances_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = qproof(&[
        "run",
        &scenario("rst-honest"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("scenario,quantity,relation,claimed,measured,tolerance,pass")
    );
    assert_eq!(
        lines.next(),
        Some("rst-honest,accept,==,1.000000000000,1.000000000000,1e-9,true")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn list_presets_and_describe() {
    let o = qproof(&["list-presets"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for name in ["twist3-no", "hadamard-coin", "raw-zero", "cj-rounding"] {
        assert!(out.contains(name), "{name}");
    }
    let o = qproof(&["describe", &scenario("honest-epr-n2-mc")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("mode      mc"));
    assert!(out.contains("seed      7 (ChaCha8)"));
    assert!(out.contains("expect    accept == 1.000000000000 +/- 1e-9"));
}

#[test]
fn malformed_file_in_suite_blocks_the_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(scenario("rst-honest"), dir.path().join("a.toml")).unwrap();
    write(dir.path(), "b.toml", "kind = \"warp\"\n");
    let o = qproof(&["suite", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}
