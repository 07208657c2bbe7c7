use std::path::Path;
use std::process::{Command, Output};

use pathsym::statefile;
use pathsym_core::{states, Basis, MultiSectorState, PureSector, SpinSector, WeightedSector};
use serde_json::Value;

fn pathsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = pathsym(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&out)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn noon_qfi_as_json() {
    let v = json(&["qfi", "--state", "noon:N=3", "--format", "json"]);
    assert_eq!(num(&v["qfi"]), 9.0);
    assert_eq!(v["state"], "noon:N=3");
    assert_eq!(v["sectors"][0]["N"], 3);
}

#[test]
fn state_specs_are_echoed_canonically() {
    let v = json(&["qfi", "--state", "cs:r=0.50,alpha=2.0", "--format", "json"]);
    assert_eq!(v["state"], "cs:alpha=2,r=0.5");
}

#[test]
fn every_subcommand_speaks_json() {
    let cases: &[&[&str]] = &[
        &["qfi", "--state", "twin:n=1"],
        &["cfi", "--state", "noon:N=2", "--steps", "4"],
        &["estimator", "--state", "noon:N=2", "--phi", "0.3"],
        &["symmetry", "--state", "noon:N=2"],
        &["report", "--state", "numcoh:n=1,alpha=1"],
        &["optimize-q", "--nbar", "100"],
        &["simulate", "--state", "noon:N=2", "--phi", "0.3", "--samples", "100", "--trials", "3", "--seed", "1"],
        &["paper-report"],
    ];
    for case in cases {
        let mut args = case.to_vec();
        args.extend(["--format", "json"]);
        let v = json(&args);
        assert!(v.is_object() || v.is_array(), "{case:?}");
    }
}

#[test]
fn cfi_scan_is_csv_by_default() {
    let out = pathsym(&["cfi", "--state", "noon:N=4", "--phi-start", "0", "--phi-end", "1", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,cfi,qfi,gap"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[10][0], 1.0);
    for r in &rows {
        assert_eq!(r[2], 16.0);
        assert!(r[3].abs() < 1e-8, "gap {}", r[3]);
    }
}

#[test]
fn cfi_gap_is_visible_for_an_asymmetric_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("asym.json");
    let s = PureSector::from_real(SpinSector::new(2), Basis::InternalJ3, &[0.8f64.sqrt(), 0.0, 0.2f64.sqrt()]).unwrap();
    statefile::save(&path, &MultiSectorState::single(s)).unwrap();
    let spec = format!("file:{}", path.display());
    let v = json(&["cfi", "--state", &spec, "--steps", "32", "--format", "json"]);
    let gaps: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| num(&p["gap"])).collect();
    assert!(gaps.iter().cloned().fold(0.0, f64::max) > 0.1);
    let sym = json(&["symmetry", "--state", &spec, "--format", "json"]);
    assert_eq!(sym["symmetric"], false);
}

#[test]
fn parse_errors_exit_2_with_position() {
    let out = pathsym(&["qfi", "--state", "noon:N=0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("column 8"), "{err}");
    let out = pathsym(&["qfi", "--state", "cs:alpha=2,q=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key `q`"));
    let out = pathsym(&["qfi", "--state", "laser:p=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`noon`"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pathsym(&["qfi"]).status.code(), Some(2));
    assert_eq!(pathsym(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pathsym(&["qfi", "--state", "noon:N=2", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(pathsym(&["qfi", "--state", "noon:N=2", "--eps-trunc", "-1"]).status.code(), Some(2));
}

#[test]
fn computation_failures_exit_1() {
    // zero-sensitivity state
    let out = pathsym(&["simulate", "--state", "twin:n=0", "--phi", "0.3", "--samples", "10", "--trials", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    // window beyond the fringe ambiguity
    let out = pathsym(&[
        "simulate", "--state", "noon:N=4", "--phi", "0.3", "--samples", "10", "--trials", "2", "--seed", "1", "--window", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("window"));
    // missing file
    let out = pathsym(&["qfi", "--state", "file:/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(1));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn state_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let state = states::squeezed_coherent(1.0, 0.4, &Default::default()).unwrap();
    statefile::save(&path, &state).unwrap();
    let loaded = statefile::load(&path).unwrap();
    assert_eq!(loaded.sectors().len(), state.sectors().len());
    let spec = format!("file:{}", path.display());
    let from_file = json(&["qfi", "--state", &spec, "--format", "json"]);
    let direct = json(&["qfi", "--state", "cs:alpha=1,r=0.4", "--format", "json"]);
    // file weights are renormalized over the kept sectors
    let a = num(&from_file["qfi"]);
    let b = num(&direct["qfi"]);
    assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
}

#[test]
fn documented_file_example_and_j1_basis() {
    let dir = tempfile::tempdir().unwrap();
    let j3 = dir.path().join("j3.json");
    write(
        &j3,
        r#"{"sectors":[{"N":2,"weight":1.0,"basis":"j3","amps":[[0.707106781187,0],[0,0],[0.707106781187,0]]}]}"#,
    );
    let v = json(&["qfi", "--state", &format!("file:{}", j3.display()), "--format", "json"]);
    assert!((num(&v["qfi"]) - 4.0).abs() < 1e-10);

    // twin-Fock |1,1> written in the counting basis
    let j1 = dir.path().join("j1.json");
    write(&j1, r#"{"sectors":[{"N":2,"weight":1.0,"basis":"j1","amps":[[0,0],[1,0],[0,0]]}]}"#);
    let v = json(&["qfi", "--state", &format!("file:{}", j1.display()), "--format", "json"]);
    assert!((num(&v["qfi"]) - 4.0).abs() < 1e-12);
}

#[test]
fn malformed_state_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    for text in [
        "not json",
        r#"{"sectors":[{"N":2,"weight":1.0,"basis":"j3","amps":[[1,0]]}]}"#,
        r#"{"sectors":[{"N":1,"weight":0.3,"basis":"j3","amps":[[1,0],[0,0]]}]}"#,
        r#"{"sectors":[{"N":1,"weight":1.0,"basis":"j3","amps":[[1,0],[1,0]]}]}"#,
    ] {
        write(&path, text);
        let out = pathsym(&["qfi", "--state", &format!("file:{}", path.display())]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(stderr(&out).contains("bad.json"));
    }
}

#[test]
fn paper_report_passes_and_lists_rows() {
    let out = pathsym(&["paper-report", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rows: Vec<Value> = serde_json::from_str(&stdout(&out)).unwrap();
    let ids: Vec<&str> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["noon_qfi", "q_star", "ratio_star", "pair_ratio", "db_equivalent", "cfi_flatness"]);
    for r in &rows {
        assert_eq!(r["pass"], true, "{r}");
        for key in ["value", "target", "tolerance", "claim"] {
            assert!(!r[key].is_null(), "{key}");
        }
    }
    let text = stdout(&pathsym(&["paper-report"]));
    assert_eq!(text.matches("PASS").count(), 6);
}

#[test]
fn wrong_report_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    write(&cfg, "# too strict for 10 log10(3)\nreport.db_equivalent.tolerance = 1e-4\n");
    let out = pathsym(&["paper-report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    write(&cfg, "report.q_star.target = 1.0\n");
    assert_eq!(pathsym(&["paper-report", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));

    write(&cfg, "report.no_such_row.tolerance = 1\n");
    assert_eq!(pathsym(&["paper-report", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    write(&cfg, "typo_key = 1\n");
    let out = pathsym(&["paper-report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(":1:"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    // a cap this small cannot hold a squeezed vacuum with r = 1
    write(&cfg, "n_max_cap = 8\n");
    let c = cfg.to_str().unwrap();
    assert_eq!(pathsym(&["qfi", "--state", "pairs:r=1", "--config", c]).status.code(), Some(1));
    assert_eq!(
        pathsym(&["qfi", "--state", "pairs:r=1", "--config", c, "--n-max-cap", "4096"]).status.code(),
        Some(0)
    );
}

#[test]
fn simulation_output_is_deterministic() {
    let args = [
        "simulate", "--state", "cs:alpha=1,r=0.3", "--phi", "1.1", "--samples", "500", "--trials", "16", "--seed", "7", "--format", "json",
    ];
    let a = pathsym(&args);
    let b = pathsym(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["trial_seeds"].as_array().unwrap().len(), 16);
    assert_eq!(v["estimates"].as_array().unwrap().len(), 16);
    let other = pathsym(&["simulate", "--state", "cs:alpha=1,r=0.3", "--phi", "1.1", "--samples", "500", "--trials", "16", "--seed", "8", "--format", "json"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn optimize_q_prefers_unequal_intensities() {
    let v = json(&["optimize-q", "--nbar", "1000", "--format", "json"]);
    assert!((num(&v["q"]) - 3f64.sqrt()).abs() < 0.02);
    assert!(num(&v["ratio_at_q1"]) < num(&v["ratio"]));
}

#[test]
fn report_stays_below_the_number_squared_limit() {
    for spec in ["noon:N=5", "twin:n=3", "cs:alpha=1.5,r=0.7", "pairs:r=0.8", "numcoh:n=2,alpha=1"] {
        let v = json(&["report", "--state", spec, "--format", "json"]);
        let (qfi, hl, mean) = (num(&v["total_qfi"]), num(&v["heisenberg_limit"]), num(&v["mean_n"]));
        assert!(qfi <= hl + 1e-8, "{spec}");
        assert!(hl >= mean * mean, "{spec}");
        assert!(num(&v["cfi_flatness"]) < 1e-8, "{spec}");
    }
}

#[test]
fn vacuum_report_has_zero_ratio() {
    let v = json(&["report", "--state", "twin:n=0", "--format", "json"]);
    assert_eq!(num(&v["ratio"]), 0.0);
    assert_eq!(num(&v["heisenberg_limit"]), 0.0);
}

#[test]
fn two_sector_file_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mix.json");
    let state = MultiSectorState::new(
        vec![
            WeightedSector { weight: 0.25, state: states::noon(2).unwrap() },
            WeightedSector { weight: 0.75, state: states::noon(4).unwrap() },
        ],
        0.0,
    )
    .unwrap();
    statefile::save(&path, &state).unwrap();
    let v = json(&["qfi", "--state", &format!("file:{}", path.display()), "--format", "json"]);
    assert!((num(&v["qfi"]) - (0.25 * 4.0 + 0.75 * 16.0)).abs() < 1e-10);
}
