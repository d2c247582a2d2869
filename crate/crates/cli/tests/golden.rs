//! Golden-file tests for every command. Set `UPDATE_GOLDEN=1` to rewrite
//! the expected outputs after an intended change.

use std::path::{Path, PathBuf};
use std::process::Command;

const WHAS: &[&str] = &["kz2", "kp2", "kp3", "ks3", "kz2_kz2"];
const GROUPOIDS: &[&str] = &["z2", "pair2", "broken-assoc"];
const INCLUSIONS: &[&str] = &["diag-in-m2", "z2-in-s3", "identity-m2"];

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weakhopf"));
    c.current_dir(dir().join("fixtures"));
    c
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = bin().args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn transcript(args: &[&str], r: &Run) -> String {
    format!("$ weakhopf {}\nexit: {}\n--- stdout\n{}--- stderr\n{}", args.join(" "), r.code, r.stdout, r.stderr)
}

/// Compares against `golden/<name>.txt`; returns a mismatch description.
fn check(name: &str, args: &[&str]) -> Option<String> {
    let got = transcript(args, &run(args));
    let path = dir().join("golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return None;
    }
    match std::fs::read_to_string(&path) {
        Ok(want) if want == got => None,
        Ok(want) => {
            let line = want
                .lines()
                .zip(got.lines())
                .position(|(a, b)| a != b)
                .unwrap_or(want.lines().count().min(got.lines().count()));
            Some(format!("{name}: first difference at line {}\n{got}", line + 1))
        }
        Err(_) => Some(format!("{name}: missing golden file {}", path.display())),
    }
}

fn check_all(cases: Vec<(String, Vec<String>)>) {
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|(name, args)| check(name, &args.iter().map(String::as_str).collect::<Vec<_>>()))
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

fn case(name: String, args: &[&str]) -> (String, Vec<String>) {
    (name, args.iter().map(|s| s.to_string()).collect())
}

#[test]
fn verify_golden() {
    let mut cases = Vec::new();
    for w in WHAS {
        let f = format!("{w}.wha.json");
        cases.push(case(format!("verify-{w}"), &["verify", &f]));
        cases.push(case(format!("verify-{w}-json"), &["verify", "--json", &f]));
    }
    for g in GROUPOIDS {
        cases.push(case(format!("verify-{g}.gpd"), &["verify", &format!("{g}.gpd.json")]));
    }
    for i in INCLUSIONS {
        cases.push(case(format!("verify-{i}.incl"), &["verify", &format!("{i}.incl.json")]));
    }
    cases.push(case("verify-weyl-kp2.action".into(), &["verify", "weyl-kp2.action.json"]));
    cases.push(case("verify-corrupted".into(), &["verify", "corrupted.wha.json"]));
    cases.push(case("verify-misnamed".into(), &["verify", "misnamed.wha.json"]));
    cases.push(case("verify-missing".into(), &["verify", "does-not-exist.json"]));
    check_all(cases);
}

#[test]
fn compute_golden() {
    let mut cases = Vec::new();
    for w in WHAS {
        let f = format!("{w}.wha.json");
        for what in ["haar", "dual", "grouplike", "fusion", "subalgebras"] {
            cases.push(case(format!("compute-{what}-{w}"), &["compute", what, &f]));
        }
        cases.push(case(format!("compute-fusion-{w}-json"), &["compute", "fusion", "--json", &f]));
    }
    check_all(cases);
}

#[test]
fn groupoid_golden() {
    let cases =
        GROUPOIDS.iter().map(|g| case(format!("groupoid-{g}"), &["groupoid", &format!("{g}.gpd.json")])).collect();
    check_all(cases);
}

#[test]
fn reconstruct_golden() {
    let mut cases: Vec<_> = INCLUSIONS
        .iter()
        .map(|i| case(format!("reconstruct-{i}"), &["reconstruct", &format!("{i}.incl.json")]))
        .collect();
    cases.push(case("reconstruct-diag-in-m2-json".into(), &["reconstruct", "--json", "diag-in-m2.incl.json"]));
    cases.push(case("reconstruct-wrong-kind".into(), &["reconstruct", "kz2.wha.json"]));
    check_all(cases);
}

#[test]
fn example_golden() {
    check_all(vec![case("example-list".into(), &["example"]), case("example-unknown".into(), &["example", "nope"])]);
}

#[test]
fn fixtures_are_the_built_in_examples() {
    let mut names: Vec<(String, String)> = WHAS.iter().map(|w| (w.to_string(), format!("{w}.wha.json"))).collect();
    names.extend(["z2", "pair2"].iter().map(|g| (format!("{g}.gpd"), format!("{g}.gpd.json"))));
    names.extend(INCLUSIONS.iter().map(|i| (format!("{i}.incl"), format!("{i}.incl.json"))));
    names.push(("weyl-kp2.action".into(), "weyl-kp2.action.json".into()));
    for (name, file) in names {
        let r = run(&["example", &name]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let want = std::fs::read_to_string(dir().join("fixtures").join(&file)).unwrap();
        assert!(r.stdout == want, "{name} differs from {file}");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["verify", "kp2.wha.json"]).code, 0);
    assert_eq!(run(&["groupoid", "broken-assoc.gpd.json"]).code, 1);
    assert_eq!(run(&["reconstruct", "z2-in-s3.incl.json"]).code, 1);
    assert_eq!(run(&["verify", "corrupted.wha.json"]).code, 2);
    assert_eq!(run(&["verify", "misnamed.wha.json"]).code, 2);
    assert_eq!(run(&["compute", "haar", "--tol=-1", "kz2.wha.json"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
}

#[test]
fn written_documents_round_trip_through_verify() {
    let tmp = std::env::temp_dir().join(format!("weakhopf-golden-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let dual = tmp.join("kp2dual.wha.json");
    let r = run(&["compute", "dual", "kp2.wha.json", "-o", dual.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(run(&["verify", dual.to_str().unwrap()]).code, 0);

    let prefix = tmp.join("rec");
    let r = run(&["reconstruct", "diag-in-m2.incl.json", "-o", prefix.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for suffix in [".wha.json", ".action.json"] {
        let p = format!("{}{suffix}", prefix.display());
        assert_eq!(run(&["verify", &p]).code, 0, "{p}");
    }
    let gp = tmp.join("pair2.wha.json");
    assert_eq!(run(&["groupoid", "pair2.gpd.json", "-o", gp.to_str().unwrap()]).code, 0);
    assert_eq!(std::fs::read(&gp).unwrap(), std::fs::read(dir().join("fixtures/kp2.wha.json")).unwrap());
    std::fs::remove_dir_all(&tmp).unwrap();
}
