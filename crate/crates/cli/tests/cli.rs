use std::path::Path;
use std::process::{Command, Output};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/golden/ci.ksv");

fn ksv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksv")).args(args).env_remove("KSV_DEFAULT_WINDOW").output().unwrap()
}

fn write(dir: &Path, name: &str, src: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn golden_file_passes() {
    let o = ksv(&["run", GOLDEN]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("verify theorem A B window 6: PASS"));
    assert!(!text.contains("FAIL") && !text.contains("ERROR"));
}

#[test]
fn json_is_byte_identical() {
    let a = ksv(&["run", GOLDEN, "--format", "json", "--jobs", "1"]);
    let b = ksv(&["run", GOLDEN, "--format", "json", "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["failures"], 0);
    let theorem = v["reports"].as_array().unwrap().iter().find(|r| r["directive"] == "verify theorem A B window 6").unwrap();
    assert_eq!(theorem["status"], "pass");
    assert_eq!(theorem["details"]["join"]["ideal"], serde_json::json!([]));
    assert_eq!(theorem["details"]["direct"]["ideal"], serde_json::json!([]));
    assert!(theorem.get("elapsed_ms").is_none());
}

#[test]
fn unclosed_bracket_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.ksv", "field Fp 5\nring [x, y]\nkoszul f = [x^2\n");
    let o = ksv(&["check", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn semantic_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("field Fp 6\n", "prime"),
        ("field Q\nring [x]\nkoszul f = [x^2]\nkmodule M { gens: g:(0, 0); d: g -> x*h; sigma1: ; }\n", "unknown basis element `h`"),
        ("field Q\nlmodule K { basis: v:0 w:1 z:2; d: ; e1: v -> w  w -> z; }\n", "e_1² ≠ 0"),
        ("field Q\nring [x]\nkoszul f = [x^2]\nverify theorem M N\n", "`M` is not defined"),
        ("field Q\nring [x]\nkoszul f = [x + x^2]\n", "f_1"),
    ];
    for (i, (src, needle)) in cases.iter().enumerate() {
        let f = write(dir.path(), &format!("e{i}.ksv"), src);
        let o = ksv(&["run", &f]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{src}");
        assert!(err.contains("line") && err.to_lowercase().contains(&needle.to_lowercase()), "{src}: {err}");
    }
}

#[test]
fn directive_errors_exit_1_and_continue() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(GOLDEN).unwrap() + "verify tor-bound C C window 1\ncompute support A\n";
    let f = write(dir.path(), "w.ksv", &src);
    let o = ksv(&["run", &f]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("verify tor-bound C C window 1: ERROR"));
    assert!(text.contains("window too small: s + t = 4"));
    assert!(text.trim_end().lines().rev().take(2).any(|l| l.contains("V(chi2)")), "{text}");
}

#[test]
fn hopf_of_cyclic_quotients_is_a_cone_point() {
    let dir = tempfile::tempdir().unwrap();
    let src = "field Q\nlmodule A { basis: u:0 q:1; d: ; e1: ; e2: u -> q; }\n\
               lmodule B { basis: u:0 p:1; d: ; e1: u -> p; e2: ; }\nverify hopf A B\n";
    let f = write(dir.path(), "h.ksv", src);
    let o = ksv(&["run", &f, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = &v["reports"][0]["details"];
    assert_eq!(d["tensor"]["classification"], "CONE_POINT");
    assert_eq!(d["intersection"]["classification"], "CONE_POINT");
}

#[test]
fn join_command() {
    let o = ksv(&["join", "--vars", "2", "--ideal", "chi1", "--ideal", "chi2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "V()\nclassification: POSITIVE\nproj_dim: 1\n");
    let o = ksv(&["join", "--vars", "2", "--field", "Fp 5", "--ideal", "chi1", "--ideal", "chi1^2"]);
    assert!(stdout(&o).starts_with("V(chi1^2)\nclassification: POSITIVE\nproj_dim: 0"));
    let o = ksv(&["join", "--vars", "2", "--ideal", "chi1 +", "--ideal", "chi2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn window_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(GOLDEN).unwrap().lines().take(44).collect::<Vec<_>>().join("\n") + "\ncompute tensor-support A B\n";
    let f = write(dir.path(), "env.ksv", &src);
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ksv"));
        c.args(["run", &f, "--format", "json"]).env_remove("KSV_DEFAULT_WINDOW");
        if let Some(w) = env {
            c.env("KSV_DEFAULT_WINDOW", w);
        }
        let v: serde_json::Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v["reports"][0]["details"]["window_oracle"]["window"].as_i64().unwrap()
    };
    assert_eq!(run(None), 6);
    assert_eq!(run(Some("3")), 3);
}

#[test]
fn check_pretty_round_trips() {
    let o = ksv(&["check", GOLDEN, "--pretty"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.ksv", &stdout(&o));
    let again = ksv(&["check", &f, "--pretty"]);
    assert_eq!(again.stdout, o.stdout);
}
