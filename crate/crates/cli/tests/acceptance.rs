//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p prefnet-cli --test acceptance -- --nocapture`
//! to see the report.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use prefnet::verify::{self, SuiteReport, SuiteSizes};

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

fn stdout(args: &[&str]) -> Result<String, String> {
    let out = prefnet(args);
    if !out.status.success() {
        return Err(format!(
            "`prefnet {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8(out.stdout).expect("utf-8"))
}

fn expect(args: &[&str], expected: &str) -> Result<(), String> {
    let got = stdout(args)?;
    if got != expected {
        return Err(format!("`prefnet {}` printed\n{got}expected\n{expected}", args.join(" ")));
    }
    Ok(())
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        return Err(format!("took {took:.2?}, limit {limit:?}"));
    }
    Ok(())
}

fn fixture_traces() -> Result<(), String> {
    let t = Instant::now();
    expect(&["optimal", "fixtures/fig1-cpnet"], "A=a1,B=b1,C=c1,D=d1\n")?;
    expect(&["solve", "fixtures/fig5-cprnet"], "A=a2,B=b2,C=c1,D=d1\n")?;
    expect(&["solve", "fixtures/fig7-lptree"], "A=a2,B=b2,C=c2,D=d1\n")?;
    expect(
        &["enumerate", "fixtures/fig4-cprnet"],
        "A=a1,B=b1,C=c1\nA=a1,B=b1,C=c2\nA=a1,B=b2,C=c2\nA=a1,B=b2,C=c1\n\
         A=a2,B=b2,C=c2\nA=a2,B=b2,C=c1\nA=a2,B=b1,C=c1\nA=a2,B=b1,C=c2\n",
    )?;
    expect(
        &["enumerate", "fixtures/fig2-lptree"],
        "A=a1,B=b1,C=c1\nA=a1,B=b1,C=c2\nA=a1,B=b2,C=c2\nA=a1,B=b2,C=c1\n\
         A=a2,B=b1,C=c1\nA=a2,B=b2,C=c1\nA=a2,B=b1,C=c2\nA=a2,B=b2,C=c2\n",
    )?;
    within(Duration::from_secs(1), t)
}

fn dominance_regressions() -> Result<(), String> {
    let t = Instant::now();
    let q = |o1: &str, o2: &str| {
        stdout(&["dominance", "fixtures/fig3-cpnet", "--o1", o1, "--o2", o2, "--witness"])
    };
    let no = q("A=a2,B=b2,C=c2", "A=a1,B=b1,C=c1")?;
    if no != "no\n" {
        return Err(format!("first query: {no}"));
    }
    let single = q("A=a2,B=b2,C=c2", "A=a2,B=b1,C=c2")?;
    if single != "yes\nA=a2,B=b1,C=c2\nA=a2,B=b2,C=c2\n" {
        return Err(format!("second query: {single}"));
    }
    let long = q("A=a1,B=b1,C=c2", "A=a2,B=b1,C=c1")?;
    let expected = "yes\nA=a2,B=b1,C=c1\nA=a2,B=b2,C=c1\nA=a1,B=b2,C=c1\nA=a1,B=b2,C=c2\nA=a1,B=b1,C=c2\n";
    if long != expected {
        return Err(format!("third query: {long}"));
    }
    let short = q("A=a1,B=b1,C=c1", "A=a2,B=b1,C=c2")?;
    if short != "yes\nA=a2,B=b1,C=c2\nA=a1,B=b1,C=c2\nA=a1,B=b1,C=c1\n" {
        return Err(format!("shortest-witness query: {short}"));
    }
    within(Duration::from_secs(1), t)
}

fn suite(report: SuiteReport, min_cases: usize) -> Result<(), String> {
    if report.cases < min_cases {
        return Err(format!("only {} cases, need {min_cases}", report.cases));
    }
    if !report.passed() {
        return Err(format!("{}\n  {}", report.summary(), report.failures.join("\n  ")));
    }
    Ok(())
}

fn budget_exit_code() -> Result<(), String> {
    let path = std::env::temp_dir().join(format!("prefnet-budget-{}.pn", std::process::id()));
    let file = path.to_str().expect("utf-8 path");
    stdout(&[
        "gen", "--kind", "cpnet", "--vars", "10", "--domain", "3", "--max-parents", "3", "--seed", "7", "-o", file,
    ])?;
    let out = prefnet(&[
        "dominance",
        file,
        "--o1",
        "A=a3,B=b3,C=c2,D=d3,E=e1,F=f2,G=g1,H=h3,I=i2,J=j2",
        "--o2",
        "A=a3,B=b2,C=c1,D=d2,E=e3,F=f2,G=g2,H=h1,I=i1,J=j1",
        "--budget",
        "1000",
    ]);
    let _ = std::fs::remove_file(&path);
    match out.status.code() {
        Some(4) if out.stdout.is_empty() => Ok(()),
        code => Err(format!(
            "exit {code:?}, stdout {:?}",
            String::from_utf8_lossy(&out.stdout)
        )),
    }
}

#[test]
fn acceptance() {
    let sizes = SuiteSizes::default();
    let mut results: Vec<(u32, &str, Result<(), String>, Duration)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &dyn Fn() -> Result<(), String>| {
        let t = Instant::now();
        let r = f();
        results.push((n, name, r, t.elapsed()));
    };
    run(1, "fixture traces", &fixture_traces);
    run(2, "dominance regressions", &dominance_regressions);
    run(3, "dominance agrees with the flip-graph oracle", &|| {
        suite(verify::dominance_suite(sizes.dominance, sizes.seed).map_err(|e| e.to_string())?, 200)
    });
    run(4, "constrained search agrees with brute force", &|| {
        // two instances (one CPR-net, one LP-tree) per count
        suite(verify::optimization_suite(sizes.optimization, sizes.seed).map_err(|e| e.to_string())?, 400)
    });
    run(5, "full adjacency iff total dominance", &|| {
        suite(verify::adjacency_suite(sizes.adjacency, sizes.seed).map_err(|e| e.to_string())?, 100)
    });
    run(6, "LP-tree reduction", &|| {
        suite(verify::reduction_suite(sizes.reduction, sizes.seed).map_err(|e| e.to_string())?, 100)
    });
    run(7, "compare is a strict total order", &|| {
        suite(verify::order_suite(&sizes).map_err(|e| e.to_string())?, 400)
    });
    run(8, "budget overrun exits with code 4", &budget_exit_code);

    let mut failed = Vec::new();
    for (n, name, r, took) in &results {
        match r {
            Ok(()) => println!("criterion {n}: pass  {name} ({took:.2?})"),
            Err(e) => {
                println!("criterion {n}: FAIL  {name} ({took:.2?})\n  {e}");
                failed.push(*n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
