use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

use frac_spectra::Potential;
use frac_spectra_cli::report::{Format, Report};
use frac_spectra_cli::{parse_potential, run, CliError};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac-spectra"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Report {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn column(csv: &str, col: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn potential_text_forms() {
    assert_eq!(parse_potential("zero").unwrap(), Potential::Zero);
    assert_eq!(
        parse_potential("const:2.5").unwrap(),
        Potential::Constant(2.5)
    );
    assert_eq!(
        parse_potential("poly:0,1").unwrap(),
        Potential::Polynomial(vec![0.0, 1.0])
    );
    assert_eq!(parse_potential("poly:0,1").unwrap().eval(0.3), 0.3);
    for bad in ["", "one", "const:x", "const:inf", "poly:1,,2", "cubic:1"] {
        assert!(
            matches!(parse_potential(bad), Err(CliError::Parse { .. })),
            "{bad}"
        );
    }
    let e = parse_potential("const:abc").unwrap_err();
    assert!(e.to_string().contains("abc"));
}

#[test]
fn potential_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    let with_header = dir.path().join("q.csv");
    let mut f = std::fs::File::create(&with_header).unwrap();
    writeln!(f, "t,value\n0,1\n0.5,2\n1,0").unwrap();
    let q = parse_potential(&format!("csv:{}", with_header.display())).unwrap();
    assert_eq!(q.eval(0.25), 1.5);
    assert_eq!(q.eval(0.75), 1.0);

    let bare = dir.path().join("bare.csv");
    std::fs::write(&bare, "0,3\n1,3\n").unwrap();
    assert_eq!(
        parse_potential(&format!("csv:{}", bare.display()))
            .unwrap()
            .eval(0.4),
        3.0
    );

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "0,1\n0.5,1\n").unwrap();
    assert!(matches!(
        parse_potential(&format!("csv:{}", short.display())),
        Err(CliError::Parse { .. })
    ));

    let wide = dir.path().join("wide.csv");
    std::fs::write(&wide, "0,1,2\n1,1,2\n").unwrap();
    assert!(matches!(
        parse_potential(&format!("csv:{}", wide.display())),
        Err(CliError::Parse { .. })
    ));

    let missing = dir.path().join("missing.csv");
    assert!(matches!(
        parse_potential(&format!("csv:{}", missing.display())),
        Err(CliError::Io { .. })
    ));
}

#[test]
fn classical_spectrum_as_csv() {
    let o = bin(&[
        "spectrum",
        "--alpha",
        "0.999",
        "--q",
        "zero",
        "--lambda-max",
        "300",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(
        "lambda,index,residual,interval,interval_lo,interval_hi,refinement_iters,low_confidence\n"
    ));
    let lambdas = column(&text, 0);
    assert!(lambdas.len() >= 5);
    for (n, l) in lambdas.iter().take(5).enumerate() {
        let want = ((n + 1) as f64 * PI).powi(2);
        assert!((l - want).abs() <= 0.02 * want, "{l} vs {want}");
    }
}

#[test]
fn mittag_leffler_at_a_sine_zero() {
    let o = bin(&["ml", "--delta", "2", "--theta", "2", "--z", "-9.8696044"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!(r.records[0]["value"].as_f64().unwrap().abs() <= 1e-7);
    assert_eq!(r.records[0]["regime"], "series");
}

#[test]
fn critical_alpha_report() {
    let o = bin(&["critical-alpha", "--tol", "1e-3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let a = column(&stdout(&o), 0)[0];
    // extended-precision value 0.7995578
    assert!((a - 0.7995578).abs() <= 1e-3, "{a}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["spectrum"],
        vec!["spectrum", "--alpha", "0.9", "--bogus"],
        vec!["spectrum", "--alpha", "abc"],
        vec!["spectrum", "--alpha", "0.9", "--q", "nope"],
        vec!["spectrum", "--alpha", "0.9", "--format", "xml"],
        vec![
            "solve",
            "--alpha",
            "0.9",
            "--lambda",
            "5",
            "--q",
            "csv:/does/not/exist.csv",
        ],
        vec!["frobnicate"],
    ] {
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn domain_errors_write_a_report_and_exit_with_two() {
    let o = bin(&["spectrum", "--alpha", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&o);
    assert_eq!(r.metadata.status, "error");
    assert_eq!(r.metadata.error.unwrap().kind, "DomainError");
    assert!(r.records.is_empty());
}

#[test]
fn computational_errors_exit_with_one() {
    let o = bin(&["critical-alpha", "--lambda-max", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r.metadata.error.unwrap().kind, "Inconclusive");

    let o = bin(&[
        "ml", "--delta", "0.5", "--theta", "1", "--z", "1e4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("error_kind,message\nOverflow,"));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = vec![];
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let o = bin(&[
            "spectrum",
            "--alpha",
            "0.95",
            "--q",
            "poly:0,2",
            "--lambda-max",
            "120",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn json_reports_round_trip() {
    for args in [
        vec![
            "x",
            "solve",
            "--alpha",
            "0.8",
            "--lambda",
            "12.5",
            "--q",
            "poly:1,-0.3",
            "--nodes",
            "70",
        ],
        vec!["x", "spectrum", "--alpha", "0.9", "--lambda-max", "200"],
        vec!["x", "intervals", "--alpha", "0.7", "--n-max", "3"],
    ] {
        let (mut out, mut err) = (vec![], vec![]);
        assert_eq!(run(&args, &mut out, &mut err), 0, "{args:?}");
        let r: Report = serde_json::from_slice(&out).unwrap();
        let mut again = vec![];
        r.emit(Format::Json, &mut again).unwrap();
        assert_eq!(out, again);
        assert_eq!(serde_json::from_slice::<Report>(&again).unwrap(), r);
    }
}

#[test]
fn solve_report_contains_every_node() {
    let (mut out, mut err) = (vec![], vec![]);
    let code = run(
        [
            "x",
            "solve",
            "--alpha",
            "1",
            "--lambda",
            "9.869604401089358",
            "--nodes",
            "129",
            "--format",
            "csv",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("t,y\n"));
    let y = column(&text, 1);
    assert_eq!(y.len(), 129);
    assert!(y[128].abs() <= 1e-12);
    assert!((y[64] - 1.0 / PI).abs() <= 1e-12);
}

#[test]
fn plot_data() {
    let o = bin(&[
        "trace",
        "--alpha",
        "1",
        "--lambda-max",
        "40",
        "--points",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("lambda,characteristic\n"));
    let lambdas = column(&text, 0);
    let values = column(&text, 1);
    assert_eq!(lambdas, vec![10.0, 20.0, 30.0, 40.0]);
    for (l, v) in lambdas.iter().zip(values) {
        assert!((v - l.sqrt().sin() / l.sqrt()).abs() <= 1e-14);
    }

    let o = bin(&[
        "count",
        "--alpha-min",
        "0.6",
        "--alpha-max",
        "0.9",
        "--steps",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("alpha,n_star,tail_certified,search_bound\n"));
    let counts = column(&text, 1);
    assert_eq!(counts, vec![0.0, 0.0, 2.0, 8.0]);
}

#[test]
fn thread_cap_from_the_environment() {
    let run_with = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_frac-spectra"))
            .args([
                "spectrum",
                "--alpha",
                "0.9",
                "--lambda-max",
                "200",
                "--format",
                "csv",
            ])
            .env("FRAC_SPECTRA_THREADS", v)
            .output()
            .unwrap()
    };
    let one = run_with("1");
    let four = run_with("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_with("0").status.code(), Some(2));
    assert_eq!(run_with("many").status.code(), Some(2));
}
