use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_projcanon"))
}

fn run(args: &[&str]) -> Output {
    bin().env_remove("PROJCANON_NODE_LIMIT").args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("projcanon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn hyperoval(d: &str) -> PathBuf {
    let o = run(&["gen-hyperoval", d]);
    assert!(o.status.success());
    tmp(&format!("hyperoval_d{d}.inst"), &stdout(&o))
}

fn line<'a>(report: &'a str, key: &str) -> &'a str {
    report.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` line"))
}

/// Three planes of F_3^4 and one more plane in a second set.
const PLANES: &str = "projcanon 1\nfield 3 1\ndim 4\nsubspaces 2\n\
    set 2 2\n1 0\n0 1\n0 0\n0 0\n\n0 0\n0 0\n1 0\n0 1\n\
    set 1 2\n1 0\n0 0\n0 1\n0 0\n";

/// The same family after the coordinate swap e1 <-> e3 and a basis change.
const PLANES_MOVED: &str = "projcanon 1\nfield 3 1\ndim 4\nsubspaces 2\n\
    set 2 2\n0 0\n0 1\n1 1\n0 0\n\n1 0\n0 0\n0 0\n0 1\n\
    set 1 2\n1 0\n0 0\n0 1\n0 0\n";

#[test]
fn hyperoval_d3_report() {
    let o = run(&["canonize", hyperoval("3").to_str().unwrap()]);
    assert!(o.status.success());
    let r = stdout(&o);
    assert_eq!(line(&r, "h "), "h 28");
    assert_eq!(line(&r, "initial_cells"), "initial_cells 8 28");
    assert_eq!(line(&r, "aut_order_gammal"), "aut_order_gammal 1344");
    assert_eq!(line(&r, "aut_order_pgammal"), "aut_order_pgammal 1344");
}

#[test]
fn reports_are_byte_identical_and_timing_goes_to_stderr() {
    let p = hyperoval("4");
    let a = run(&["canonize", p.to_str().unwrap()]);
    let b = run(&["canonize", p.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("search time"));
    assert!(!stdout(&a).contains("time"));
}

#[test]
fn json_carries_the_text_data() {
    let p = tmp("planes.inst", PLANES);
    let text = stdout(&run(&["canonize", p.to_str().unwrap()]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["canonize", "--format", "json", p.to_str().unwrap()]))).unwrap();
    assert_eq!(json["schema"], "projcanon-report");
    assert_eq!(json["schema_version"], 1);
    let res = &json["result"];
    assert_eq!(format!("h {}", res["preprocess"]["h"]), line(&text, "h "));
    assert_eq!(format!("aut_order_gammal {}", res["automorphisms"]["order_gammal"].as_str().unwrap()), line(&text, "aut_order_gammal"));
    assert_eq!(format!("config_hash {}", res["config_hash"].as_str().unwrap()), line(&text, "config_hash"));
    let gens = res["automorphisms"]["generators"].as_array().unwrap().len();
    assert_eq!(format!("aut_generators {gens}"), line(&text, "aut_generators"));
}

#[test]
fn equiv_verdicts_and_exit_codes() {
    let a = tmp("a.inst", PLANES);
    let b = tmp("b.inst", PLANES_MOVED);
    let same = run(&["equiv", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0));
    // the identity up to a scalar; over GF(3) the transporters agree exactly
    let m = stdout(&same);
    assert!(m.contains("mapping frob 0\n  1 0 0 0\n  0 1 0 0\n  0 0 1 0\n  0 0 0 1\n"), "{m}");
    let moved = run(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(moved.status.code(), Some(0), "{}", stdout(&moved));
    // GL_4(3) is beyond the exhaustive oracle
    assert_eq!(run(&["equiv", "--oracle", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(3));
    let lines = tmp("lines.inst", "projcanon 1\nfield 2 1\ndim 3\nsubspaces 1\nset 2 2\n1 0\n0 1\n0 0\n\n1 0\n0 0\n0 1\n");
    let lines2 = tmp("lines2.inst", "projcanon 1\nfield 2 1\ndim 3\nsubspaces 1\nset 2 2\n0 1\n1 1\n1 0\n\n0 0\n1 0\n0 1\n");
    let o = run(&["equiv", "--oracle", lines.to_str().unwrap(), lines2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("oracle same_orbit true agrees"));
    let h = hyperoval("3");
    let other = tmp("other.inst", "projcanon 1\nfield 3 1\ndim 4\nsubspaces 1\nset 2 2\n1 0\n0 1\n0 0\n0 0\n\n0 0\n0 0\n1 0\n0 1\n");
    assert_eq!(run(&["equiv", a.to_str().unwrap(), other.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["equiv", a.to_str().unwrap(), h.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn code_equivalence_with_certificate() {
    let a = tmp("c1.inst", "projcanon 1\nfield 3 1\nlincode 2 5\n1 0 1 1 2\n0 1 1 2 0\n");
    // columns permuted and scaled
    let b = tmp("c2.inst", "projcanon 1\nfield 3 1\nlincode 2 5\n2 1 1 0 2\n0 2 1 1 0\n");
    let o = run(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("code_certificate perm"));
    let c = run(&["canonize", a.to_str().unwrap()]);
    assert!(stdout(&c).contains("code canonical"));
}

#[test]
fn usage_and_capacity_errors() {
    assert_eq!(run(&["gen-hyperoval", "9"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let bad = tmp("bad.inst", "projcanon 1\nfield 3 1\ndim 4\nsubspaces 1\nset 1 2\n1 0\n0 5\n");
    let o = run(&["canonize", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 7"));
    let h = hyperoval("3");
    assert_eq!(run(&["canonize", "--node-limit", "3", h.to_str().unwrap()]).status.code(), Some(3));
    let env = bin().env("PROJCANON_NODE_LIMIT", "3").args(["aut", h.to_str().unwrap()]).output().unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn oracle_flag_checks_the_group_order() {
    let p = tmp("oracle.inst", "projcanon 1\nfield 2 1\ndim 3\nsubspaces 1\nset 3 1\n1\n0\n0\n0\n1\n0\n0\n0\n1\n");
    let o = run(&["aut", "--oracle", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle stabilizer_order 6 agrees"), "{}", stdout(&o));
}

#[test]
fn pruning_flags_keep_the_form() {
    let p = hyperoval("3");
    let form = |extra: &[&str]| {
        let mut args = vec!["canonize"];
        args.extend_from_slice(extra);
        args.push(p.to_str().unwrap());
        let r = stdout(&run(&args));
        r.split("transporter").next().unwrap().to_string()
    };
    let base = form(&[]);
    assert_eq!(form(&["--no-aut-prune"]), base);
    assert_eq!(form(&["--no-candidate-prune"]), base);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--count", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("failures 0"));
}
