use std::path::Path;
use std::process::{Command, Output};

fn qfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfp"))
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

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|h| h == name).unwrap()
}

#[test]
fn exact_run_reports_half() {
    let o = qfp(&["run", "--code", "hadamard", "--n", "4", "--x", "0000", "--y", "0001", "--exact"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0].join(","), "n,m,t,k,x_hex,y_hex,pn_exact,verdict,n_clicks_n,seed");
    assert_eq!(rows.len(), 2);
    let pn: f64 = rows[1][column(&rows, "pn_exact")].parse().unwrap();
    assert!((pn - 0.5).abs() < 1e-12);
    assert!(stderr(&o).contains("master_seed = 0"));
}

#[test]
fn trit_phase_protocol_average_is_one_sixth() {
    let o = qfp(&["run", "--q", "3", "--phase-protocol", "--all-pairs"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    let avg = column(&rows, "average_error");
    let exact = column(&rows, "average_error_exact");
    let err = column(&rows, "error_probability");
    let mut total = 0.0;
    for r in &rows[1..] {
        let a: f64 = r[avg].parse().unwrap();
        assert!((a - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(r[exact], "1/6");
        total += r[err].parse::<f64>().unwrap();
    }
    assert!((total / 9.0 - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(format!("{name}.csv"));
        let json = dir.path().join(format!("{name}.json"));
        let o = qfp(&[
            "run",
            "--n",
            "4",
            "--random-pairs",
            "5",
            "--trials",
            "20",
            "--seed",
            "42",
            "--csv",
            csv.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let other = qfp(&["run", "--n", "4", "--random-pairs", "5", "--trials", "20", "--seed", "43"]);
    assert_ne!(other.stdout, a.0);
}

#[test]
fn json_mirrors_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = qfp(&[
        "run", "--n", "3", "--x", "101", "--y", "100", "--trials", "4", "--seed", "9", "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&qfp(&["run", "--n", "3", "--x", "101", "--y", "100", "--trials", "4", "--seed", "9"]));
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["master_seed"], 9);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    let mut sorted_header = header.clone();
    sorted_header.sort();
    let mut sorted_keys = keys.clone();
    sorted_keys.sort();
    assert_eq!(sorted_header, sorted_keys);
    assert_eq!(v["pairs"][0]["trials"], 4);
}

#[test]
fn equal_inputs_never_flagged() {
    let o = qfp(&["run", "--n", "4", "--x", "0x9", "--y", "1001", "--trials", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let v = column(&rows, "verdict");
    assert_eq!(rows.len(), 201);
    assert!(rows[1..].iter().all(|r| r[v] == "equal"));
}

#[test]
fn classical_floor_and_witness() {
    let o = qfp(&["classical", "--q", "3", "--alice", "3", "--bob", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("min_avg_error = 2/9"));
    assert!(out.contains("alice map"));
    assert!(out.contains("referee table"));
    let full = stdout(&qfp(&["classical", "--q", "3", "--alice", "3", "--bob", "2", "--full"]));
    assert!(full.contains("min_avg_error = 2/9"));
}

#[test]
fn classical_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let o = qfp(&["classical", "--q", "3", "--alice", "3", "--bob", "2", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["smp"]["min_avg_error"], "2/9");
    assert_eq!(v["smp"]["quantum_average_error_exact"], "1/6");
    assert_eq!(v["smp"]["witness"]["referee"].as_array().unwrap().len(), 3);
}

#[test]
fn bounds_at_ten_to_ten() {
    let o = qfp(&["classical", "--bounds", "--n", "10000000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "max_lower = 5000"));
}

#[test]
fn breakeven_prints_both_sides() {
    let o = qfp(&["classical", "--breakeven", "--epsilon", "0.01", "--mu", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let n: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("breakeven_n = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1e9..=1e11).contains(&n));
    assert!(out.contains("<= sqrt(n)/40"));
    assert!(out.contains("> sqrt(n)/40"));
}

#[test]
fn breakeven_rejects_small_mu() {
    let o = qfp(&["classical", "--breakeven", "--mu", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn feasibility_ten_km() {
    let o = qfp(&["feasibility", "--L", "10km", "--period", "1ns"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modes"]["d_vacuum"], 33356);
    assert_eq!(v["modes"]["paper_claim_slot"], 3000);
    assert!(v["modes"]["d_fiber"].as_u64().unwrap() > 33356);
    assert_eq!(v["model"]["separation"], 10000.0);
    assert!(v.get("master_seed").is_some());
}

#[test]
fn feasibility_zero_period_is_domain_error() {
    let o = qfp(&["feasibility", "--period", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("period"));
}

#[test]
fn feasibility_echoes_poisson_triple() {
    let o = qfp(&["feasibility", "--mu-photon", "0.1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = &v["photon_numbers"];
    let mu: f64 = 0.1;
    assert!((p["p0"].as_f64().unwrap() - (-mu).exp()).abs() < 1e-15);
    assert!((p["p1"].as_f64().unwrap() - mu * (-mu).exp()).abs() < 1e-15);
    assert!((p["p_multi"].as_f64().unwrap() - (1.0 - (-mu).exp() - mu * (-mu).exp())).abs() < 1e-12);
    assert_eq!(v["model"]["source"]["mean_photon_number"], 0.1);
}

#[test]
fn noise_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = qfp(&[
        "feasibility",
        "--single-photon",
        "--sweep-dark",
        "0,0.05",
        "--trials",
        "2000",
        "--seed",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows[0].join(","), "parameter,value,metric,rate,stderr");
    assert_eq!(rows.len(), 7);
    // noiseless single photon, pN = 0.5, k = 10
    assert_eq!(rows[1][2], "false_equal");
    let rate: f64 = rows[1][3].parse().unwrap();
    assert!(rate < 0.01);
}

#[test]
fn resource_limit_exits_two() {
    let o = qfp(&["run", "--n", "25", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qfp(&["classical", "--q", "6", "--alice", "6", "--bob", "6", "--full"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qfp(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(qfp(&["run", "--n", "4"]).status.code(), Some(1));
    assert_eq!(qfp(&["run", "--n", "4", "--x", "000", "--y", "0000"]).status.code(), Some(1));
    assert_eq!(qfp(&["run", "--n", "4", "--x", "0", "--y", "0", "--epsilon", "0.7"]).status.code(), Some(1));
    assert_eq!(qfp(&[]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qfp(&["--help"]).status.code(), Some(0));
    assert_eq!(qfp(&["--version"]).status.code(), Some(0));
    assert_eq!(qfp(&["run", "--help"]).status.code(), Some(0));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    write(
        &cfg,
        "# trial\n[run]\ncode = hadamard\nn = 4\nx = 0000\ny = 0011\nexact = true\n\n[classical]\nq = 3\n",
    );
    let c = cfg.to_str().unwrap();
    let rows = csv_rows(&stdout(&qfp(&["run", "--config", c])));
    assert_eq!(rows[1][column(&rows, "y_hex")], "3");
    let rows = csv_rows(&stdout(&qfp(&["run", "--config", c, "--y", "0001"])));
    assert_eq!(rows[1][column(&rows, "y_hex")], "1");
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "[run]\nn = 4\n\nwidth = 3\n");
    let o = qfp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":4:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("width"));

    write(&cfg, "[run]\nn = 4\nk = lots\n");
    let o = qfp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));

    write(&cfg, "[sprint]\nn = 4\n");
    let o = qfp(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(stderr(&o).contains(":1:"));
}

#[test]
fn codes_round_trip_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h3.code");
    let f = file.to_str().unwrap();
    let o = qfp(&["codes", "export", "--code", "hadamard", "--n", "3", "--out", f]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("3 8 4 hadamard\n"));
    let o = qfp(&["codes", "import", "--file", f]);
    assert!(stdout(&o).contains("t = 4"));
    let o = qfp(&["codes", "verify", "--file", f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("matches = true"));

    write(&file, &text.replacen("3 8 4", "3 8 3", 1));
    let o = qfp(&["codes", "verify", "--file", f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("recomputed_t = 4"));

    let exported = stdout(&qfp(&["codes", "export", "--code", "hadamard", "--n", "3"]));
    assert_eq!(exported, text);
}

#[test]
fn run_with_imported_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rep.code");
    let f = file.to_str().unwrap();
    qfp(&["codes", "export", "--code", "repetition", "--n", "2", "--r", "3", "--out", f]);
    let o = qfp(&["run", "--code-file", f, "--x", "10", "--y", "11", "--exact"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[1][column(&rows, "m")], "6");
    let pn: f64 = rows[1][column(&rows, "pn_exact")].parse().unwrap();
    assert!((pn - 0.5).abs() < 1e-12);
}

#[test]
fn malformed_code_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.code");
    write(&file, "2 3 1 identity\n101\n01\n");
    let o = qfp(&["codes", "import", "--file", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains('3'), "{}", stderr(&o));
}
