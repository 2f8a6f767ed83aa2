use std::path::PathBuf;
use std::process::{Command, Output};

use qes_core::document::parse_documents;
use qes_core::wavefunction::eval_log_psi;

fn qes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qes")).args(args).env_remove("QES_SEED").output().expect("run qes")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const QUARTIC0: &[&str] =
    &["solve", "--family", "quartic", "--case", "harmonic", "--n", "0", "--ell", "0", "--param", "omega=1", "--param", "c=0", "--param", "d=0.5"];

#[test]
fn solve_quartic_ground_state() {
    let o = qes(QUARTIC0);
    assert_eq!(code(&o), 0);
    let docs = parse_documents(&stdout(&o)).unwrap();
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0].energy, 1.5);
    assert_eq!(docs[0].derived["a"], -1.0);
    assert_eq!(docs[0].derived["b"], 0.0);
    assert!(docs[0].verification.as_ref().unwrap().passed);
}

#[test]
fn solve_sextic_first_level_reports_both_roots() {
    let o = qes(&["solve", "--family", "sextic", "--n", "1", "--param", "omega=1", "--param", "e=0", "--param", "d=0.5"]);
    assert_eq!(code(&o), 0);
    let docs = parse_documents(&stdout(&o)).unwrap();
    let s2 = 2.0_f64.sqrt();
    assert_eq!(docs.len(), 1);
    assert!((docs[0].roots[0].re - (1.0 - s2)).abs() < 1e-13);
    // the other BAE root is reported as an infeasible branch
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("2.41421356237309") && err.contains("infeasible"), "{err}");
}

#[test]
fn invariant_violation_exits_one() {
    let o = qes(&["solve", "--family", "quartic", "--case", "harmonic", "--n", "0", "--param", "d=-1", "--param", "omega=1", "--param", "c=0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("d > 0"));
    assert_eq!(code(&qes(&["solve", "--family", "nonagonal", "--n", "0"])), 1);
    assert_eq!(code(&qes(&["solve", "--family", "quartic"])), 1);
}

#[test]
fn infeasible_problem_exits_two() {
    let o = qes(&["solve", "--family", "sextic", "--n", "0", "--param", "omega=3", "--param", "e=0", "--param", "d=0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_round_trip_and_negative_controls() {
    let path = tmp("q1.json");
    let p = path.to_str().unwrap();
    let o = qes(&["solve", "--family", "quartic", "--n", "1", "--param", "omega=1", "--param", "c=0", "--param", "d=0.5", "--out", p]);
    assert_eq!(code(&o), 0);
    let v = qes(&["verify", p]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));

    let mut docs: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let e = docs[0]["energy"].as_f64().unwrap();
    docs[0]["energy"] = serde_json::json!(e + 1e-3);
    let bad = tmp("q1-bad.json");
    std::fs::write(&bad, serde_json::to_string(&docs).unwrap()).unwrap();
    let v = qes(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&v), 3);
    assert!(stdout(&v).contains("FAIL schrodinger_residual"), "{}", stdout(&v));

    let text = std::fs::read_to_string(&path).unwrap();
    let cut = tmp("q1-cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let v = qes(&["verify", cut.to_str().unwrap()]);
    assert_eq!(code(&v), 1);
    assert!(String::from_utf8(v.stderr).unwrap().contains("line"));
}

#[test]
fn sample_grid_contract() {
    let path = tmp("q0.json");
    let p = path.to_str().unwrap();
    let mut args = QUARTIC0.to_vec();
    args.extend(["--out", p]);
    assert_eq!(code(&qes(&args)), 0);
    let o = qes(&["sample", p, "--rmin", "0.01", "--rmax", "10", "--points", "100"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,log_abs_psi,sign,psi1_over_psi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let doc = parse_documents(&std::fs::read_to_string(&path).unwrap()).unwrap().remove(0);
    for row in &rows {
        let (l, s) = eval_log_psi(&doc.waveform, row[0]).unwrap();
        assert_eq!(row[1], l);
        assert_eq!(row[2], s as f64);
    }
    let at_one = qes(&["sample", p, "--rmin", "0.01", "--rmax", "100", "--points", "5"]);
    let one: Vec<f64> = stdout(&at_one).lines().nth(3).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(one[0], 1.0);
    assert_eq!(one[1], -1.5);
    assert_eq!(code(&qes(&["sample", p, "--rmin", "0"])), 1);
}

#[test]
fn scan_rows_follow_sweep_order() {
    let o = qes(&[
        "scan", "--family", "quartic", "--n", "1", "--param", "omega=1", "--param", "c=0", "--param", "d=0.5", "--sweep",
        "omega=0.5:2:4",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let h = rdr.headers().unwrap().clone();
    let iw = h.iter().position(|x| x == "omega").unwrap();
    let ie = h.iter().position(|x| x == "energy").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    // one real branch per value (the cubic single-root equation)
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let w: f64 = r[iw].parse().unwrap();
        let e: f64 = r[ie].parse().unwrap();
        assert_eq!(e, w * 2.5);
    }
}

#[test]
fn scan_marks_infeasible_rows() {
    let o = qes(&["scan", "--family", "sextic", "--n", "0", "--param", "omega=1", "--param", "e=0.5", "--param", "d=0.5", "--sweep", "omega=0.5:2:4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("ConstraintInfeasible")).count(), 2);
    assert_eq!(code(&qes(&["scan", "--family", "sextic", "--n", "0", "--param", "omega=1", "--param", "e=0.5", "--param", "d=0.5", "--sweep", "zeta=0:1:2"])), 1);
}

#[test]
fn single_step_scan_matches_solve() {
    let o = qes(&["scan", "--family", "quartic", "--n", "0", "--param", "omega=1", "--param", "c=0", "--param", "d=0.5", "--sweep", "omega=1:1:1"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let docs = parse_documents(&stdout(&qes(QUARTIC0))).unwrap();
    assert_eq!(row, format!("1,0,{},{},{},true,", docs[0].energy, docs[0].derived["a"], docs[0].derived["b"]));
}

#[test]
fn output_is_deterministic() {
    let args = ["solve", "--family", "octic", "--case", "coulombic", "--n", "2", "--param", "a=-1.3", "--param", "e=0.2", "--param", "f=0.4", "--param", "g=-0.1", "--param", "h=0.9", "--seed", "99"];
    let a = qes(&args);
    let b = qes(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_qes")).args(&args[..args.len() - 2]).env("QES_SEED", "99").output().unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn match_ell_decatic() {
    let o = qes(&["solve", "--family", "decatic", "--n", "0", "--ell", "0", "--param", "b=0", "--param", "c=1", "--param", "d=0.5", "--match-ell"]);
    assert_eq!(code(&o), 0);
    let d = parse_documents(&stdout(&o)).unwrap().remove(0);
    assert!((d.derived["omega"] - 1.0).abs() < 1e-12);
    assert!((d.energy - 2.5).abs() < 1e-12);
}
