use std::process::Command;

use qvanish::cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("qvanish").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn coefficients(text: &str) -> Vec<(i64, i64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (e, c) = l.split_once('\t').unwrap();
            (e.parse().unwrap(), c.parse().unwrap())
        })
        .collect()
}

#[test]
fn expand_f() {
    let (code, out, _) = call(&["expand", "num=3,5:8", "den=1,7:8", "order=12"]);
    assert_eq!(code, EXIT_OK);
    let c = coefficients(&out);
    assert_eq!(c.len(), 12);
    for (e, v) in c {
        if e % 4 == 3 {
            assert_eq!(v, 0, "c_{e}");
        }
    }
}

#[test]
fn expand_trivial_and_positive() {
    let (_, out, _) = call(&["expand", "num=1:2", "den=1:2", "order=10"]);
    assert_eq!(coefficients(&out)[0], (0, 1));
    assert!(coefficients(&out)[1..].iter().all(|&(_, v)| v == 0));
    let (_, out, _) = call(&["expand", "den=2:4", "order=20"]);
    assert!(coefficients(&out).iter().all(|&(_, v)| v >= 0));
}

#[test]
fn expand_with_prefactor() {
    let (code, out, _) = call(&["expand", "num=16,14:30", "pre=-1:-14", "order=3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(coefficients(&out)[0], (-14, -1));
}

#[test]
fn parse_errors_name_the_flag() {
    let (code, _, err) = call(&["expand", "--num", "3,x:8"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--num"));
    let (code, _, err) = call(&["expand", "--den", "1,7"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--den"));
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = call(&[
        "verify",
        "family=mcl",
        "sign=plus",
        "m=2",
        "k=15",
        "s=0",
        "t=1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("15n+14"));

    let (code, out, _) = call(&["--format", "json", "verify", "family=ab", "k=6", "r=1"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["zero_class"]["mod"], 6);
    assert_eq!(v["zero_class"]["res"], 3);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let (code, _, err) = call(&["verify", "family=mcl", "m=2", "k=6", "s=1", "t=1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("gcd(r,k) != 1"), "{err}");
}

#[test]
fn scan_summary_and_csv() {
    let (code, out, _) = call(&["scan", "family=plus", "m=2..6", "k=2..6", "order=500"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("0 violated"), "{out}");

    let (code, out, _) = call(&[
        "--format",
        "csv",
        "scan",
        "family=ag",
        "m=2..4",
        "k=5..7",
        "order=500",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,params,r,order,zero_mod,zero_res,violations,observed_zero_classes"
    );
    assert!(lines.all(|l| l.starts_with("ag-plus,")));

    let (code, out, _) = call(&["scan", "family=plus", "m=5..4", "k=2..3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("0 tuples"), "{out}");
}

#[test]
fn json_is_deterministic() {
    let args = [
        "--format",
        "json",
        "scan",
        "family=minus",
        "m=2..4",
        "k=3..7",
        "order=300",
        "jobs=4",
    ];
    let first = call(&args).1;
    for _ in 0..3 {
        assert_eq!(call(&args).1, first);
    }
    let v: Value = serde_json::from_str(&first).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn partition_commands() {
    let (code, out, _) = call(&["partitions", "count", "modulus=30", "rep=0,1,29", "n=0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out.trim().rsplit(|c: char| c.is_whitespace()).next(),
        Some("1")
    );

    let (code, out, _) = call(&[
        "partitions",
        "parity",
        "m=2",
        "k=15",
        "s=8",
        "t=1",
        "n=149",
        "--enumerate",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("2+13^10+17"));
    assert!(out.contains("17^6+47"));

    let (code, out, _) = call(&[
        "--format",
        "csv",
        "partitions",
        "parity",
        "m=2",
        "k=15",
        "s=8",
        "t=1",
        "n=149",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "n,even,odd\n149,6,6\n");

    let (code, _, _) = call(&[
        "partitions",
        "parity-identity",
        "m=2",
        "k=15",
        "s=8",
        "t=1",
        "n-max=300",
    ]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn identity_commands() {
    assert_eq!(
        call(&[
            "identity",
            "1psi1",
            "m=2",
            "k=15",
            "t=1",
            "r=1",
            "order=300"
        ])
        .0,
        EXIT_OK
    );
    assert_eq!(
        call(&["identity", "jtp", "M=9", "a=4", "order=200"]).0,
        EXIT_OK
    );
    assert_eq!(
        call(&["identity", "lambert-cancel", "m=3", "k=3", "s=1", "t=1"]).0,
        EXIT_OK
    );
    let (code, out, _) = call(&[
        "identity",
        "lambert-cancel",
        "m=3",
        "k=3",
        "s=1",
        "t=1",
        "r=5",
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(
        out.contains("q^7") && out.contains("left=-1") && out.contains("right=0"),
        "{out}"
    );
}

#[test]
fn binary_reads_order_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_qvanish"))
        .args(["--format", "csv", "expand", "--num", "1:1"])
        .env("QVANISH_ORDER", "6")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "exponent,coefficient\n0,1\n1,-1\n2,-1\n3,0\n4,0\n5,1\n"
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_qvanish"))
        .args(["verify", "--family", "ab", "--k", "7", "--r", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
