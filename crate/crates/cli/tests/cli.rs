use std::process::{Command, Output};

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi")).args(args).env_remove("JACOBI_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn module_structure() {
    let o = jacobi(&["module", "--ideg", "6", "--loops", "2", "--colors", "1+,1+,1+,1+"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("(6,2; 1+,1+,1+,1+): ℤ/3 ⊕ ℤ"), "{}", stdout(&o));

    let o = jacobi(&["--json", "module", "--ideg", "6", "--loops", "2", "--colors", "1+,1+,1+,2+"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free_rank"], 1);
    assert_eq!(v["torsion"], serde_json::json!(["3"]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(jacobi(&["module", "--bogus"]).status.code(), Some(2));
    assert_eq!(jacobi(&["module", "--ideg", "6", "--loops", "2", "--colors", "1+"]).status.code(), Some(2));
    assert_eq!(jacobi(&["verify", "no-such-case"]).status.code(), Some(2));
    assert_eq!(jacobi(&["reduce", "--input", "T(1+,1+"]).status.code(), Some(2));
}

#[test]
fn reduce_with_bindings() {
    let o = jacobi(&["--bind", "a=1+,b=2+", "reduce", "--input", "3*theta(a,b;a;a)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("zero"), "{}", stdout(&o));
    let o = jacobi(&["reduce", "--input", "theta(1+,2+;1+;1+)"]);
    assert_eq!(stdout(&o).lines().last(), Some("nonzero"), "{}", stdout(&o));
}

#[test]
fn ops_and_weights() {
    let o = jacobi(&["op", "--op", "delta2", "--input", "T(1+,2+,2-,1+)"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "0"));
    let o = jacobi(&["weight", "--input", "theta(;;)"]);
    assert_eq!(stdout(&o).trim().trim_start_matches('-'), "6");
    let o = jacobi(&["--json", "op", "--op", "delta0", "--input", "T(1+,2+,2-,1+)"]);
    assert!(serde_json::from_str::<serde_json::Value>(&stdout(&o)).is_ok());
}

#[test]
fn lmo_commands() {
    let o = jacobi(&["lmo", "list"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("psi11: 2 → 2")), "{}", stdout(&o));
    let o = jacobi(&["lmo", "compose", "--left", "psi11", "--right", "psi11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("top 2 bottom 2 cap 2"));
    assert_eq!(jacobi(&["lmo", "compose", "--left", "psi11", "--right", "psi21"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let o = jacobi(&["verify", "a62-torsion"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[PASS] a62-torsion"));
    assert_eq!(jacobi(&["verify", "example-delta"]).status.code(), Some(1));
    let o = jacobi(&["--json", "verify", "a62-torsion"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["reports"][0].get("elapsed_ms").is_none());
    let o = jacobi(&["verify", "--list"]);
    assert_eq!(stdout(&o).lines().count(), 14);
}

#[test]
fn cache_dir_is_written() {
    let dir = std::env::temp_dir().join(format!("jacobi-cli-cache-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let d = dir.to_str().unwrap();
    let args = ["--cache-dir", d, "module", "--ideg", "6", "--loops", "2", "--colors", "1+,1+,2+,2+"];
    let first = jacobi(&args);
    assert!(dir.join("sector_6_2_2-2.json").exists());
    let second = jacobi(&args);
    assert_eq!(stdout(&first), stdout(&second));
    let none = jacobi(&["--no-cache", "--cache-dir", d, "module", "--ideg", "4", "--loops", "2", "--colors", "1+,2+"]);
    assert_eq!(none.status.code(), Some(0));
    assert!(!dir.join("sector_4_2_1-1.json").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}
