use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const COMPARE: &str = "\
monoid M
  orbit 1 0
  orbit A 1
  orbit 1bar 0
  orbit Abar 1
  unit 1
  A(x) * A(x) -> Abar(x)
  A(x) * A(y) -> Abar(x)
  A(x) * 1bar -> Abar(x)
  A(x) * Abar(x) -> Abar(x)
  A(x) * Abar(y) -> Abar(x)
  1bar * A(x) -> Abar(x)
  1bar * 1bar -> 1bar
  1bar * Abar(x) -> Abar(x)
  Abar(x) * A(x) -> Abar(x)
  Abar(x) * A(y) -> Abar(x)
  Abar(x) * 1bar -> Abar(x)
  Abar(x) * Abar(x) -> Abar(x)
  Abar(x) * Abar(y) -> Abar(x)
end

monoid N
  orbit 1 0
  orbit A 1
  orbit 0 0
  unit 1
  A(x) * A(x) -> 0
  A(x) * A(y) -> 0
  A(x) * 0 -> 0
  0 * A(x) -> 0
  0 * 0 -> 0
end

morphism e : M -> N
  1 -> 1
  A(x) -> A(x)
  1bar -> 0
  Abar(x) -> 0
end
";

const NO_LIFT: &str = "\
map h : atoms -> zero-adjoined
  A(x) -> A(x)
end
";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

fn orbitfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitfin")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn aperiodic_cutoff_holds() {
    let o = orbitfin(&["aperiodic", "cutoff2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn cyclic_group_is_refuted_with_counterexample() {
    let o = orbitfin(&["aperiodic", "cyclic2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn compare_quotient_is_reflecting_but_not_msr() {
    let o = orbitfin(&["classify-quotient", "ex-compare"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reflecting=yes msr=no"), "{}", stdout(&o));
    assert_eq!(code(&orbitfin(&["classify-quotient", "ex-compare", "--expect", "msr"])), 1);
    assert_eq!(code(&orbitfin(&["classify-quotient", "ex-compare", "--expect", "reflecting"])), 0);
}

#[test]
fn hand_written_compare_file_validates_and_classifies() {
    let f = Fixture::new();
    let path = f.file("compare.orb", COMPARE);
    let o = orbitfin(&["validate", &path]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = orbitfin(&["classify-quotient", &path, "e", "--format", "json-report"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["class"]["support_reflecting"], true);
    assert_eq!(v["data"]["class"]["msr"], false);
    assert!(v["data"]["class"]["subsets_examined"].as_u64().unwrap() <= 4);
}

#[test]
fn corrupted_entry_gives_positioned_input_error() {
    let f = Fixture::new();
    let path = f.file("bad.orb", &COMPARE.replace("1bar * 1bar -> 1bar", "1bar * 1bar -> A(q)"));
    let o = orbitfin(&["validate", &path]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("line 13, column 20"), "{}", stdout(&o));
}

#[test]
fn associativity_failure_is_refuted_with_witness() {
    let f = Fixture::new();
    let path = f.file("bad.orb", &COMPARE.replace("1bar * A(x) -> Abar(x)", "1bar * A(x) -> 1bar"));
    let o = orbitfin(&["validate", &path]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("invalid"), "{}", stdout(&o));
}

#[test]
fn membership_follows_the_repeat_scan() {
    assert_eq!(code(&orbitfin(&["member", "L0", "a b b a"])), 0);
    assert_eq!(code(&orbitfin(&["member", "L0", "a b a"])), 1);
    assert_eq!(code(&orbitfin(&["member", "L0", "a B"])), 2);
}

#[test]
fn no_lift_through_pair_zero() {
    let f = Fixture::new();
    let path = f.file("h.orb", NO_LIFT);
    let o = orbitfin(&["factor", &path, "h", "no-s-quot"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn distance_of_swapped_letters() {
    let o = orbitfin(&["dist", "a b", "b a", "--format", "json-report"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["value"], 0.25);
    let o = orbitfin(&["dist", "a b", "a c", "--format", "json-report"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["value"], 0.0);
}

#[test]
fn syntactic_monoid_definition_reparses() {
    let f = Fixture::new();
    let o = orbitfin(&["syntactic", "L0", "--format", "json-report"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["orbit_count"], 4);
    let path = f.file("syn.orb", v["data"]["definition"].as_str().unwrap());
    assert_eq!(code(&orbitfin(&["validate", &path])), 0);
}

#[test]
fn stage_round_trips_a_language() {
    let o = orbitfin(&["stage", "L0", "even-length", "--bound", "L0", "--language", "L0"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("round trip exact"));
}

#[test]
fn explicit_equation_from_text() {
    assert_eq!(code(&orbitfin(&["proeq", "cutoff2", "(a)^w a = (a)^w"])), 0);
    assert_eq!(code(&orbitfin(&["proeq", "cyclic2", "(a)^w a = (a)^w"])), 1);
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    let o = orbitfin(&["dist", "a b", "b a", "--budget", "10"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
}

#[test]
fn unknown_names_are_input_errors() {
    assert_eq!(code(&orbitfin(&["aperiodic", "nosuch"])), 2);
    assert_eq!(code(&orbitfin(&["orbits"])), 2);
}
