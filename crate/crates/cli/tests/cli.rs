use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn netplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn netplan_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netplan"))
        .args(args)
        .env("NETPLAN_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and rows of a CSV document, skipping `#` lines.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# timestamp"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn ccdf_reports_the_anchor_outage() {
    let out = netplan(&[
        "ccdf",
        "--alpha",
        "4",
        "--m",
        "1",
        "--p-over-sigma2-db",
        "100",
        "--lc-over-ls",
        "10",
    ]);
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["beta_db", "ccdf", "outage", "method"]);
    assert_eq!(rows.len(), 31);
    let at0 = rows.iter().find(|r| num(&r[0]) == 0.0).unwrap();
    assert!((num(&at0[2]) - 0.23).abs() < 0.005);
    assert_eq!(at0[3], "sinr_rayleigh_alpha4");
}

#[test]
fn ccdf_noiseless_matches_the_rayleigh_form() {
    let out = netplan(&[
        "ccdf",
        "--lc-over-ls",
        "20",
        "--noiseless",
        "--beta-db-range",
        "0:0:1",
    ]);
    let (_, rows) = csv(&stdout(&out));
    assert!((num(&rows[0][1]) - 20.0 / (20.0 + PI / 2.0)).abs() < 1e-12);
    assert_eq!(rows[0][3], "sir_rayleigh");
}

#[test]
fn ccdf_orders_path_loss_exponents() {
    let grab = |alpha: &str| {
        let out = netplan(&[
            "ccdf",
            "--alpha",
            alpha,
            "--noiseless",
            "--beta-db-range",
            "0:20:2",
        ]);
        let (h, rows) = csv(&stdout(&out));
        let i = col(&h, "outage");
        rows.iter().map(|r| num(&r[i])).collect::<Vec<_>>()
    };
    let (a3, a5) = (grab("3"), grab("5"));
    for (x, y) in a3.iter().zip(&a5) {
        assert!(x > y);
    }
}

#[test]
fn json_mirrors_csv() {
    let args = [
        "ccdf",
        "--m",
        "2",
        "--noiseless",
        "--beta-db-range",
        "-3:3:3",
    ];
    let (_, rows) = csv(&stdout(&netplan(&args)));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&netplan(&json_args))).unwrap();
    assert_eq!(v["manifest"]["subcommand"], "ccdf");
    assert_eq!(v["manifest"]["seed"], 42);
    assert!(v["manifest"]["timestamp"].as_str().unwrap().ends_with('Z'));
    let jrows = v["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (j, r) in jrows.iter().zip(&rows) {
        assert_eq!(j["ccdf"].as_f64().unwrap(), num(&r[1]));
        assert_eq!(j["method"], "sir_nakagami");
    }
}

#[test]
fn dump_config_round_trips_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let dumped = stdout(&netplan(&[
        "simulate",
        "--alpha",
        "3.5",
        "--m-s",
        "2",
        "--lc-over-ls",
        "7",
        "--noise-dbm",
        "-100",
        "--p-over-sigma2-db",
        "110",
        "--seed",
        "9",
        "--dump-config",
    ]));
    let path = dir.path().join("cfg.json");
    fs::write(&path, &dumped).unwrap();
    let path = path.to_str().unwrap();
    let again = stdout(&netplan(&["simulate", "--config", path, "--dump-config"]));
    assert_eq!(dumped, again);

    let overridden: Value = serde_json::from_str(&stdout(&netplan(&[
        "ccdf",
        "--config",
        path,
        "--alpha",
        "5",
        "--dump-config",
    ])))
    .unwrap();
    assert_eq!(overridden["alpha"], 5.0);
    assert_eq!(overridden["m_s"], 2);
    assert_eq!(overridden["seed"], 9);
}

#[test]
fn manifest_config_reproduces_a_simulation_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let first = stdout(&netplan(&[
        "simulate",
        "--trials",
        "3000",
        "--m",
        "2",
        "--seed",
        "5",
        "--beta-db-range",
        "-6:12:3",
    ]));
    let echo = first
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .unwrap()
        .to_string();
    let path = dir.path().join("echo.json");
    fs::write(&path, echo).unwrap();
    let second = stdout(&netplan(&["simulate", "--config", path.to_str().unwrap()]));
    assert_eq!(without_timestamp(&first), without_timestamp(&second));
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let args = [
        "simulate",
        "--trials",
        "4000",
        "--beta-db-range",
        "-10:20:5",
    ];
    let one = stdout(&netplan_with_threads(&args, "1"));
    let four = stdout(&netplan_with_threads(&args, "4"));
    let auto = stdout(&netplan_with_threads(&args, "0"));
    assert_eq!(without_timestamp(&one), without_timestamp(&four));
    assert_eq!(without_timestamp(&one), without_timestamp(&auto));
}

#[test]
fn simulation_agrees_with_closed_form() {
    let common = [
        "--lc-over-ls",
        "10",
        "--p-over-sigma2-db",
        "100",
        "--beta-db-range",
        "-10:20:5",
    ];
    let mut sim_args = vec!["simulate", "--trials", "20000", "--seed", "3"];
    sim_args.extend(common);
    let mut ccdf_args = vec!["ccdf"];
    ccdf_args.extend(common);
    let (hs, sim) = csv(&stdout(&netplan(&sim_args)));
    let (hc, exact) = csv(&stdout(&netplan(&ccdf_args)));
    for (s, e) in sim.iter().zip(&exact) {
        let p = num(&s[col(&hs, "outage")]);
        let ci = num(&s[col(&hs, "ci_halfwidth_95")]);
        let q = num(&e[col(&hc, "outage")]);
        assert!((p - q).abs() < 2.5 * ci + 1e-3, "{p} vs {q} (ci {ci})");
    }
}

#[test]
fn noise_only_simulation_matches_analysis() {
    // no active sensors: outage is the SNR-only law
    let common = [
        "--rho",
        "0",
        "--lambda-c",
        "1e-5",
        "--p-over-sigma2-db",
        "100",
        "--beta-db-range",
        "-10:30:10",
    ];
    let mut sim_args = vec!["simulate", "--trials", "20000"];
    sim_args.extend(common);
    let mut ccdf_args = vec!["ccdf"];
    ccdf_args.extend(common);
    let (_, sim) = csv(&stdout(&netplan(&sim_args)));
    let (_, exact) = csv(&stdout(&netplan(&ccdf_args)));
    for (s, e) in sim.iter().zip(&exact) {
        let (p, ci, q) = (num(&s[1]), num(&s[2]), num(&e[2]));
        assert!((p - q).abs() < 2.5 * ci + 1e-3, "{p} vs {q}");
    }
}

#[test]
fn sample_dump_has_one_value_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.txt");
    let out = netplan(&[
        "simulate",
        "--trials",
        "500",
        "--dump-samples",
        path.to_str().unwrap(),
        "--beta-db-range",
        "0:0:1",
    ]);
    let (_, rows) = csv(&stdout(&out));
    let text = fs::read_to_string(&path).unwrap();
    let (header, samples) = csv(&text);
    assert_eq!(header, ["sinr_db"]);
    assert_eq!(samples.len(), 500);
    let below = samples.iter().filter(|s| num(&s[0]) < 0.0).count();
    assert_eq!(below as f64 / 500.0, num(&rows[0][1]));
}

#[test]
fn design_examples() {
    let v: Value = serde_json::from_str(&stdout(&netplan(&[
        "design",
        "--epsilon",
        "0.1",
        "--beta-db",
        "0",
        "--alpha",
        "4",
        "--noiseless",
    ])))
    .unwrap();
    let row = &v["rows"][0];
    assert!((row["lc_over_ls"].as_f64().unwrap() - 14.137).abs() < 1e-3);
    assert_eq!(row["kind"], "necessary_and_sufficient");
    assert!((row["predicted_outage"].as_f64().unwrap() - 0.1).abs() < 1e-12);

    let v: Value = serde_json::from_str(&stdout(&netplan(&[
        "design",
        "--epsilon",
        "0.5",
        "--noiseless",
    ])))
    .unwrap();
    assert!((v["rows"][0]["lc_over_ls"].as_f64().unwrap() - PI / 2.0).abs() < 1e-12);

    let v: Value =
        serde_json::from_str(&stdout(&netplan(&["design", "--epsilon", "0.1"]))).unwrap();
    assert_eq!(v["rows"][0]["kind"], "sufficient");
    assert!(v["rows"][0]["predicted_outage"].as_f64().unwrap() <= 0.1);
}

#[test]
fn design_with_power_is_a_two_step_plan() {
    let v: Value = serde_json::from_str(&stdout(&netplan(&[
        "design",
        "--with-power",
        "--c",
        "0.1",
        "--epsilon",
        "0.1",
    ])))
    .unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["kind"], "approximate");
    assert_eq!(row["design_c"], 0.1);
    assert!((row["tx_power_dbm"].as_f64().unwrap() + 10.855095).abs() < 1e-5);
    assert!((row["noise_merit"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!((row["lc_over_ls"].as_f64().unwrap() - 14.137).abs() < 1e-3);
}

#[test]
fn compare_reports_a_density_gain_for_nakagami() {
    let v: Value = serde_json::from_str(&stdout(&netplan(&[
        "compare",
        "--m",
        "2",
        "--lc-over-ls",
        "10",
    ])))
    .unwrap();
    let row = &v["rows"][0];
    assert!(row["density_ratio"].as_f64().unwrap() > 1.0);
    assert!(row["outage_other"].as_f64().unwrap() < row["outage_rayleigh"].as_f64().unwrap());
}

#[test]
fn invalid_input_exits_with_two() {
    let cases: &[&[&str]] = &[
        &["design", "--epsilon", "1.5"],
        &["design", "--epsilon", "0"],
        &["design", "--m", "2"],
        &["design", "--alpha", "3"],
        &["ccdf", "--beta-db-range", "5:1:1"],
        &["ccdf", "--alpha", "2"],
        &["ccdf", "--m", "9"],
        &["ccdf", "--alpha", "3", "--method", "closed-form"],
        &["simulate", "--trials", "0"],
        &["figure", "fig2"],
        &["figure", "fig3", "--trials", "0"],
        &["ccdf", "--config", "/nonexistent/cfg.json"],
        &["bogus"],
    ];
    for args in cases {
        let out = netplan(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    fs::write(&path, r#"{"alpah": 4}"#).unwrap();
    assert_eq!(
        netplan(&["ccdf", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        netplan_with_threads(&["ccdf"], "many").status.code(),
        Some(2)
    );
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = netplan(&["ccdf", "--noiseless", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (header, rows) = csv(&fs::read_to_string(path).unwrap());
    assert_eq!(header.len(), 4);
    assert_eq!(rows.len(), 31);
}

#[test]
fn help_documents_the_columns() {
    for (sub, cols) in [
        ("ccdf", &["beta_db", "ccdf", "outage", "method"][..]),
        (
            "simulate",
            &["beta_db", "outage", "ci_halfwidth_95", "trials"][..],
        ),
        ("figure", &["series", "source", "ci_halfwidth_95"][..]),
        (
            "design",
            &["lambda_c_min", "noise_merit", "predicted_outage"][..],
        ),
    ] {
        let text = stdout(&netplan(&[sub, "--help"]));
        for c in cols {
            assert!(text.contains(c), "{sub} --help lacks {c}");
        }
    }
}

#[test]
fn fig3_bundle_has_analytic_and_simulated_series() {
    let out = netplan(&[
        "figure",
        "fig3",
        "--trials",
        "2000",
        "--beta-db-range",
        "-10:20:5",
    ]);
    let text = stdout(&out);
    assert!(text.contains("# config:") && text.contains("\"figure\":\"fig3\""));
    let (header, rows) = csv(&text);
    assert_eq!(header, ["series", "source", "x", "y", "ci_halfwidth_95"]);
    let series = |source: &str| {
        let mut s: Vec<&str> = rows
            .iter()
            .filter(|r| r[1] == source)
            .map(|r| r[0].as_str())
            .collect();
        s.dedup();
        s
    };
    assert_eq!(series("simulation").len(), 4);
    assert_eq!(series("analytic").len(), 6);
    let anchor = rows
        .iter()
        .find(|r| {
            r[0] == "lc_over_ls=10;p_over_sigma2_db=100" && r[1] == "analytic" && num(&r[2]) == 0.0
        })
        .unwrap();
    assert!((num(&anchor[3]) - 0.23).abs() < 0.005);
}

#[test]
fn analytic_figures_are_deterministic() {
    for fig in ["fig4", "fig5", "fig8", "fig9"] {
        let a = stdout(&netplan(&["figure", fig]));
        let b = stdout(&netplan(&["figure", fig]));
        assert_eq!(without_timestamp(&a), without_timestamp(&b), "{fig}");
        assert!(csv(&a).1.len() > 20);
    }
}

#[test]
fn fig7_simulated_series_track_the_noiseless_analysis() {
    let text = stdout(&netplan(&[
        "figure",
        "fig7",
        "--trials",
        "3000",
        "--beta-db-range",
        "-10:20:10",
    ]));
    let (_, rows) = csv(&text);
    for m in 1..=4 {
        let analytic: Vec<f64> = rows
            .iter()
            .filter(|r| r[0] == format!("m={m};noiseless"))
            .map(|r| num(&r[3]))
            .collect();
        let sim: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r[0] == format!("m={m};p_over_sigma2_db=120"))
            .map(|r| (num(&r[3]), num(&r[4])))
            .collect();
        assert_eq!(analytic.len(), sim.len());
        for (a, (s, ci)) in analytic.iter().zip(&sim) {
            assert!((a - s).abs() < 3.0 * ci + 0.01, "m = {m}: {a} vs {s}");
        }
    }
}
