use std::path::Path;
use std::process::{Command, Output};

const TINY: &str = "pqp-qp 1\nn 1\nm 1\nQ 1\n0 0 1\nq\n-2\nA 1\n0 0 1\nl\n-1\nu\n1\n";

fn pqp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqp")).args(args).env_remove("PQP_TIME_LIMIT").output().expect("run pqp")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON result document")
}

#[test]
fn solve_tiny_prints_result() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "tiny.qp", TINY);
    let out = pqp(&["solve", &f, "--eps-abs", "1e-8", "--eps-rel", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "solved");
    assert!((v["x"][0].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!((v["y"][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "tiny.qp", TINY);
    assert_eq!(pqp(&["solve", &f, "--max-iter", "0"]).status.code(), Some(2));
    assert_eq!(pqp(&["solve", &f, "--rho", "2"]).status.code(), Some(1));
    assert_eq!(pqp(&["solve", &f, "--no-such-flag"]).status.code(), Some(1));
    let bad = write(dir.path(), "bad.qp", "pqp-qp 1\nn 1\nm 0\nq\nabc\n");
    let out = pqp(&["solve", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
    assert_eq!(pqp(&["solve", "/nonexistent/p.qp"]).status.code(), Some(1));
    assert_eq!(pqp(&["--help"]).status.code(), Some(0));
}

#[test]
fn infeasible_with_certificate_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "inf.qp", "pqp-qp 1\nn 1\nm 2\nQ 1\n0 0 1\nq\n0\nA 2\n0 0 1\n1 0 1\nl\n1\n-inf\nu\ninf\n-1\n");
    let out = pqp(&["solve", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "primal_infeasible");
    assert!(v["certificate"].is_array());
}

#[test]
fn time_limit_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "tiny.qp", TINY);
    let out = Command::new(env!("CARGO_BIN_EXE_pqp")).args(["solve", &f]).env("PQP_TIME_LIMIT", "1e-12").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "time_limit");
    let out = Command::new(env!("CARGO_BIN_EXE_pqp"))
        .args(["solve", &f, "--time-limit", "inf"])
        .env("PQP_TIME_LIMIT", "1e-12")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn warm_start_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "tiny.qp", TINY);
    let ws = dir.path().join("ws.txt");
    let ws = ws.to_str().unwrap();
    let first = pqp(&["solve", &f, "--save-warm-start", ws]);
    assert_eq!(first.status.code(), Some(0));
    let second = pqp(&["solve", &f, "--warm-start", ws]);
    assert_eq!(second.status.code(), Some(0));
    let v = json(&second);
    assert_eq!(v["info"]["newton_iterations"], 0);
    assert_eq!(v["info"]["outer_iterations"], 1);
}

#[test]
fn generate_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mpc.qp");
    let p = p.to_str().unwrap();
    assert_eq!(pqp(&["generate", "mpc", "--horizon", "3", "--nx", "2", "--nu", "1", "-o", p]).status.code(), Some(0));
    let out = pqp(&["solve", p, "--linsys", "schur"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["info"]["linsys"], "schur");
}

#[test]
fn bench_portfolio_range_gives_five_records() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.csv");
    let r = r.to_str().unwrap();
    let out = pqp(&["bench", "portfolio", "--n", "100..500", "--step", "100", "--beta", "1", "-o", r]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(r).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "problem,solver,runtime,status,objective,prim_res,dual_res");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.contains(",solved,")));
}

#[test]
fn stats_sgm_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let header = "problem,solver,runtime,status,objective,prim_res,dual_res\n";
    let r = write(dir.path(), "r.csv", &format!("{header}p1,a,1,solved,0,0,0\np2,a,1,solved,0,0,0\n"));
    let out = pqp(&["stats", "sgm", &r]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "solver,sgm\na,1.0\n");

    let r = write(
        dir.path(),
        "two.csv",
        &format!("{header}p1,a,1,solved,0,0,0\np1,b,2,solved,0,0,0\np2,a,2,solved,0,0,0\np2,b,1,solved,0,0,0\n"),
    );
    let out = pqp(&["stats", "profile", &r]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "solver,f,q\na,1.0,0.5\na,2.0,1.0\nb,1.0,0.5\nb,2.0,1.0\n");

    let r = write(dir.path(), "fail.csv", &format!("{header}p1,a,0,solved,0,0,0\np2,a,1,max_iter,0,0,0\n"));
    assert_eq!(pqp(&["stats", "sgm", &r]).status.code(), Some(1));
    let out = pqp(&["stats", "sgm", &r, "--time-limit", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "solver,sgm\na,1.0\n");
}
