use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn prefnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefnet"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("prefnet-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_accepts_every_fixture() {
    for entry in std::fs::read_dir(root().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let out = prefnet(&["check", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        assert!(text(&out).starts_with("ok: "));
    }
}

#[test]
fn invalid_models_exit_3() {
    let cyclic = temp(
        "cyclic",
        "kind cpnet\n[variables]\nA: a1 a2\nB: b1 b2\n[cpts]\nA | B=b1: a1 > a2\nA | B=b2: a2 > a1\nB | A=a1: b1 > b2\nB | A=a2: b2 > b1\n",
    );
    let garbled = temp("garbled", "kind cpnet\n[variables]\nA: a1 a2\n[cpts]\nA: a1 > a3\n");
    for path in [&cyclic, &garbled] {
        let out = prefnet(&["check", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3));
        assert!(out.stdout.is_empty());
    }
    let out = prefnet(&["check", garbled.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("5:9"));
    let _ = std::fs::remove_file(cyclic);
    let _ = std::fs::remove_file(garbled);
}

#[test]
fn usage_errors_exit_2() {
    let cases: [&[&str]; 5] = [
        &["frobnicate"],
        &["check", "fixtures/does-not-exist"],
        &["dominance", "fixtures/fig3-cpnet", "--o1", "A=a1,B=b1,Q=q1", "--o2", "A=a2,B=b1,C=c1"],
        &["dominance", "fixtures/fig3-cpnet", "--o1", "A=a1,B=b1,C=c1", "--o2", "C=c1,B=b1,A=a1"],
        &["solve", "fixtures/fig1-cpnet"],
    ];
    for args in cases {
        assert_eq!(prefnet(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bindings_are_order_insensitive() {
    let a = prefnet(&["order", "fixtures/fig4-cprnet", "--o1", "C=c2,A=a1,B=b1", "--o2", "B=b1,C=c1,A=a2"]);
    assert_eq!(text(&a), "first\n");
    let b = prefnet(&["order", "fixtures/fig2-lptree", "--o1", "A=a2,B=b2,C=c2", "--o2", "A=a2,B=b1,C=c2"]);
    assert_eq!(text(&b), "second\n");
}

#[test]
fn contradiction_is_infeasible() {
    let base = std::fs::read_to_string(root().join("fixtures/fig7-lptree")).unwrap();
    let path = temp("contradiction", &format!("{base}{{A=a2}} -> {{B=b1}}\n"));
    let out = prefnet(&["solve", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(text(&out), "infeasible\n");
    let _ = std::fs::remove_file(path);
}

#[test]
fn solve_trace_with_forward_checking() {
    let out = prefnet(&["solve", "fixtures/fig5-cprnet", "--consistency", "fc", "--trace"]);
    let t = text(&out);
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(&lines[..3], ["try A=a1", "induced B=b2,D=d2", "  try C=c1"]);
    assert_eq!(lines.last(), Some(&"A=a2,B=b2,C=c1,D=d1"));
}

#[test]
fn oracle_and_recursive_test_agree() {
    for (o1, o2, answer) in [
        ("A=a1,B=b1,C=c2", "A=a2,B=b1,C=c1", "yes\n"),
        ("A=a2,B=b2,C=c2", "A=a1,B=b1,C=c1", "no\n"),
    ] {
        for extra in [&[][..], &["--oracle"][..]] {
            let mut args = vec!["dominance", "fixtures/fig3-cpnet", "--o1", o1, "--o2", o2];
            args.extend_from_slice(extra);
            assert_eq!(text(&prefnet(&args)), answer);
        }
    }
}

#[test]
fn gen_is_deterministic_and_valid() {
    for kind in ["cpnet", "cprnet", "lptree"] {
        let args = ["gen", "--kind", kind, "--vars", "4", "--domain", "3", "--constraints", "3", "--tightness", "0.3", "--seed", "11"];
        let a = prefnet(&args);
        let b = prefnet(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
        let path = temp(kind, &text(&a));
        assert!(prefnet(&["check", path.to_str().unwrap()]).status.success());
        let _ = std::fs::remove_file(path);
    }
}

#[test]
fn tightness_extremes() {
    for kind in ["cprnet", "lptree"] {
        let gen = |t: &str| {
            let out = prefnet(&["gen", "--kind", kind, "--vars", "4", "--domain", "3", "--constraints", "2", "--tightness", t, "--seed", "5"]);
            temp(&format!("{kind}-{t}"), &text(&out))
        };
        let loose = gen("0");
        let l = loose.to_str().unwrap();
        assert_eq!(text(&prefnet(&["solve", l])), text(&prefnet(&["optimal", l])));
        let tight = gen("1");
        assert_eq!(text(&prefnet(&["solve", tight.to_str().unwrap()])), "infeasible\n");
        let _ = std::fs::remove_file(loose);
        let _ = std::fs::remove_file(tight);
    }
}

#[test]
fn gen_rejects_bad_config() {
    assert_eq!(prefnet(&["gen", "--domain", "1"]).status.code(), Some(2));
    assert_eq!(prefnet(&["gen", "--tightness", "2"]).status.code(), Some(2));
}

#[test]
fn enumerate_cap_exits_4() {
    let out = prefnet(&["enumerate", "fixtures/fig7-lptree", "--limit", "10"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
}

#[test]
fn quick_selftest_passes() {
    let out = prefnet(&["selftest", "--scale", "quick"]);
    assert!(out.status.success(), "{}", text(&out));
    assert!(text(&out).lines().all(|l| l.starts_with("pass ") || l.is_empty()));
}
