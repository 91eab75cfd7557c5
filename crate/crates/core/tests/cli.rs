use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_slicedw");

fn slicedw(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("SW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut args = vec!["generate", "--out", s(&path)];
    args.extend_from_slice(extra);
    let o = slicedw(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn estimate_fields(o: &Output) -> Vec<String> {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "{text}");
    lines[0].split(',').map(str::to_string).collect()
}

#[test]
fn help_on_every_subcommand() {
    for sub in [
        "estimate",
        "diagnostics",
        "convergence",
        "timing",
        "generate",
    ] {
        let o = slicedw(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("--"), "{sub}");
    }
    let o = slicedw(&["estimate", "--help"]);
    let help = stdout(&o);
    for flag in ["--method", "--L", "--p", "--seed", "--header"] {
        assert!(help.contains(flag), "{flag} missing from\n{help}");
    }
    let help = stdout(&slicedw(&["convergence", "--help"]));
    for flag in [
        "--scenario",
        "--d",
        "--n",
        "--runs",
        "--alpha",
        "--paper-scale",
        "--out",
        "--burn-in",
    ] {
        assert!(help.contains(flag), "{flag} missing from\n{help}");
    }
    assert!(stdout(&slicedw(&["diagnostics", "--help"])).contains("--pair-budget"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(slicedw(&[]).status.code(), Some(1));
    assert_eq!(
        slicedw(&["estimate", "a.csv", "b.csv", "--bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        slicedw(&[
            "estimate",
            "a.csv",
            "b.csv",
            "--method",
            "mc-sphere",
            "--L",
            "0"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        slicedw(&["estimate", "a.csv", "b.csv", "--method", "nope"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn same_file_twice_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate(
        dir.path(),
        "x.csv",
        &["--family", "gamma", "--d", "5", "--n", "40"],
    );
    let f = estimate_fields(&slicedw(&[
        "estimate",
        s(&x),
        s(&x),
        "--method",
        "deterministic",
    ]));
    assert_eq!(f[0], "deterministic");
    assert_eq!(f[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(f[3], "0");
}

#[test]
fn sphere_and_gaussian_directions_agree_at_p_two() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate(
        dir.path(),
        "x.csv",
        &["--family", "gamma", "--d", "8", "--n", "200", "--seed", "1"],
    );
    let y = generate(
        dir.path(),
        "y.csv",
        &[
            "--family", "gamma", "--role", "second", "--d", "8", "--n", "200", "--seed", "2",
        ],
    );
    let run = |method: &str, seed: &str| {
        let f = estimate_fields(&slicedw(&[
            "estimate",
            s(&x),
            s(&y),
            "--method",
            method,
            "--L",
            "10000",
            "--p",
            "2",
            "--seed",
            seed,
        ]));
        assert_eq!(f[0], method);
        assert_eq!(f[3], "10000");
        f[1].parse::<f64>().unwrap()
    };
    let sphere = run("mc-sphere", "3");
    let gauss = run("mc-gaussian", "4");
    // Standard errors from the library on the same inputs and seeds.
    let read = |p: &Path| slicedw::io::read_dataset(p, false).unwrap();
    let (mx, my) = (read(&x), read(&y));
    let se = |law, seed| {
        slicedw::estimators::monte_carlo_sw_pp(&mx, &my, 10_000, 2.0, law, seed)
            .unwrap()
            .standard_error()
    };
    use slicedw::estimators::ProjectionLaw::{GaussianGammaD, SphereUniform};
    let combined = (se(SphereUniform, 3).powi(2) + se(GaussianGammaD, 4).powi(2)).sqrt();
    assert!(
        (sphere - gauss).abs() <= 3.0 * combined,
        "{sphere} vs {gauss} (SE {combined})"
    );
}

#[test]
fn closed_form_gauss_and_header_input() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate(
        dir.path(),
        "x.csv",
        &["--family", "gaussian", "--d", "4", "--n", "30", "--header"],
    );
    let y = generate(
        dir.path(),
        "y.csv",
        &[
            "--family", "gaussian", "--role", "second", "--d", "4", "--n", "50", "--header",
        ],
    );
    let cf = estimate_fields(&slicedw(&[
        "estimate",
        s(&x),
        s(&y),
        "--method",
        "closed-form-gauss",
        "--header",
    ]));
    let det = estimate_fields(&slicedw(&["estimate", s(&x), s(&y), "--header"]));
    assert_eq!(cf[0], "closed-form-gauss");
    let (a, b): (f64, f64) = (cf[1].parse().unwrap(), det[1].parse().unwrap());
    assert!((a - b).abs() < 1e-9 * b);
    let v: f64 = det[2].parse().unwrap();
    assert!((v * v - b).abs() < 1e-9 * b);
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3,oops\n").unwrap();
    let o = slicedw(&["estimate", s(&bad), s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.csv:2"), "{err}");

    let a = generate(
        dir.path(),
        "a.csv",
        &["--family", "gaussian", "--d", "3", "--n", "10"],
    );
    let b = generate(
        dir.path(),
        "b.csv",
        &["--family", "gaussian", "--d", "4", "--n", "10"],
    );
    assert_eq!(slicedw(&["estimate", s(&a), s(&b)]).status.code(), Some(2));
    let c = generate(
        dir.path(),
        "c.csv",
        &["--family", "gaussian", "--d", "3", "--n", "11"],
    );
    assert_eq!(
        slicedw(&["estimate", s(&a), s(&c), "--method", "mc-sphere"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(slicedw(&["estimate", s(&a), s(&c)]).status.code(), Some(0));
    assert_eq!(
        slicedw(&["estimate", s(&dir.path().join("missing.csv")), s(&a)])
            .status
            .code(),
        Some(2)
    );

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = slicedw(&[
        "convergence",
        "--scenario",
        "gaussian-centered",
        "--runs",
        "1",
        "--d",
        "4",
        "--n",
        "10",
        "--out",
        s(&blocker.join("r.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--family", "gamma", "--role", "first", "--d", "4", "--n", "10", "--seed", "7",
    ];
    let a = generate(dir.path(), "a.csv", &args);
    let b = generate(dir.path(), "b.csv", &args);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.split(',').count() == 4));
    let ar = generate(
        dir.path(),
        "ar.csv",
        &[
            "--family",
            "ar1-student-t",
            "--d",
            "6",
            "--n",
            "5",
            "--alpha",
            "0.8",
            "--burn-in",
            "50",
        ],
    );
    assert_eq!(fs::read_to_string(&ar).unwrap().lines().count(), 5);
    let o = slicedw(&[
        "generate",
        "--family",
        "ar1-gaussian",
        "--alpha",
        "1.0",
        "--d",
        "3",
        "--n",
        "3",
        "--out",
        s(&dir.path().join("z.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convergence_ar1_single_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = slicedw(&[
        "convergence",
        "--scenario",
        "ar1-gaussian",
        "--alpha",
        "0.5",
        "--runs",
        "1",
        "--d",
        "10",
        "--n",
        "50",
        "--burn-in",
        "100",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# "));
    assert!(lines[0].contains("regenerated"));
    assert_eq!(lines[1], slicedw::bench::RECORD_HEADER);
    assert_eq!(lines.len(), 3);
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields[0], "ar1-gaussian");
    assert_eq!(fields[4], "0.5");
    assert_eq!(fields[7].parse::<f64>().unwrap(), 0.0);

    let summary = fs::read_to_string(dir.path().join("conv.summary.csv")).unwrap();
    assert!(summary.starts_with(slicedw::bench::SUMMARY_HEADER));
    assert_eq!(summary.lines().count(), 2);
    assert!(stdout(&o).starts_with(slicedw::bench::SUMMARY_HEADER));
}

#[test]
fn convergence_is_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(BIN)
            .args([
                "convergence",
                "--scenario",
                "gamma-noncentered",
                "--runs",
                "2",
                "--d",
                "4,8",
                "--n",
                "30",
                "--reference-l",
                "200",
                "--seed",
                "5",
                "--out",
                s(&out),
            ])
            .env("SW_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        // Drop wall_time_ns, the only field allowed to differ.
        fs::read_to_string(out)
            .unwrap()
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                if f.len() == 11 {
                    f.remove(9);
                }
                f.join(",")
            })
            .collect::<Vec<_>>()
    };
    let a = run("a.csv", "1");
    assert_eq!(a.len(), 2 + 4);
    assert_eq!(a, run("b.csv", "4"));
}

#[test]
fn timing_writes_all_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = slicedw(&[
        "timing",
        "--runs",
        "1",
        "--d",
        "5",
        "--n",
        "40",
        "--L",
        "10,20",
        "--reference-l",
        "100",
        "--repetitions",
        "1",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let methods: Vec<&str> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(5).unwrap())
        .collect();
    assert_eq!(
        methods,
        vec!["deterministic", "mc-sphere-L10", "mc-sphere-L20"]
    );
}

#[test]
fn diagnostics_output() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.csv");
    fs::write(&zeros, "0,0,0\n0,0,0\n0,0,0\n").unwrap();
    let o = slicedw(&["diagnostics", s(&zeros)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let get = |text: &str, key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
            .parse()
            .unwrap()
    };
    for key in [
        "m2_raw",
        "m2_raw/d",
        "mean_norm",
        "alpha",
        "beta1",
        "beta2",
        "xi_d",
        "autocov_lag0",
        "autocov_lag2",
    ] {
        assert_eq!(get(&text, key), 0.0, "{key}");
    }
    assert!(!text.contains("autocov_lag3"));

    let g = generate(
        dir.path(),
        "g.csv",
        &[
            "--family",
            "ar1-gaussian",
            "--alpha",
            "0",
            "--burn-in",
            "0",
            "--d",
            "100",
            "--n",
            "10000",
        ],
    );
    let o = slicedw(&["diagnostics", s(&g), "--pair-budget", "200000"]);
    let text = stdout(&o);
    assert!((get(&text, "m2_raw/d") - 1.0).abs() < 0.05);
    assert!(get(&text, "beta1") <= get(&text, "beta2"));
    for k in 0..=10 {
        get(&text, &format!("autocov_lag{k}"));
    }
    get(&text, "indep_bound");
    get(&text, "weakdep_bound");

    let h = generate(
        dir.path(),
        "h.csv",
        &["--family", "gamma", "--d", "100", "--n", "50"],
    );
    let o = slicedw(&["diagnostics", s(&h), s(&h), "--pair-budget", "all"]);
    let text = stdout(&o);
    assert!(get(&text, "gap_bound") > 0.0);
    assert_eq!(get(&text, "first.m2_raw"), get(&text, "second.m2_raw"));
    assert_eq!(
        slicedw(&["diagnostics", s(&h), "--pair-budget", "zero"])
            .status
            .code(),
        Some(1)
    );
}
