use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use clap::Parser;
use topolab_cli::{Cli, Command, Format, GalleryAction, SieveAction, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};

fn parse(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("topolab").chain(args.iter().copied())).expect("parses")
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn topolab(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_topolab")).args(args).current_dir(repo()).output().expect("binary runs")
}

#[test]
fn parses_check() {
    let c = parse(&["check", "xsum_identity", "--depth", "8", "--seed", "0"]);
    assert_eq!(c.command, Command::Check { instance: "xsum_identity".into(), depth: 8, seed: 0, bless: false });
    assert_eq!(c.format, Format::Text);
}

#[test]
fn parses_play() {
    let c = parse(&["play", "tandem-michael", "--space", "q", "--alpha", "shrink_to:0", "--beta", "thm81:xsum_identity", "--depth", "10"]);
    match c.command {
        Command::Play { schedule, space, alpha, beta, depth, manual } => {
            assert_eq!(schedule, "tandem-michael");
            assert_eq!(space.as_deref(), Some("q"));
            assert_eq!((alpha.as_str(), beta.as_str(), depth), ("shrink_to:0", "thm81:xsum_identity", 10));
            assert_eq!(manual, None);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn parses_sieve() {
    let c = parse(&["sieve", "verify", "trees/non_mu.sieve", "--checks", "s,p,delta,mu", "--depth", "6"]);
    assert_eq!(
        c.command,
        Command::Sieve {
            action: SieveAction::Verify {
                file: "trees/non_mu.sieve".into(),
                checks: vec!["s".into(), "p".into(), "delta".into(), "mu".into()],
                depth: 6
            }
        }
    );
}

#[test]
fn canonical_args_roundtrip() {
    let cases: [&[&str]; 8] = [
        &["check", "wilhelm", "--depth", "5", "--seed", "3", "--bless"],
        &["play", "michael", "--space", "m1", "--alpha", "singleton_isolated", "--beta", "random_beta:7", "--depth", "4"],
        &["play", "bm", "--space", "q", "--depth", "3", "--manual"],
        &["play", "bm", "--space", "q", "--manual", "beta", "--format", "json"],
        &["sieve", "verify", "trees/cylinder.sieve", "--checks", "mu", "--output", "/tmp/x.json"],
        &["gallery", "list"],
        &["gallery", "run-all", "--depth", "6"],
        &["--format", "json", "gallery", "run-all", "--bless"],
    ];
    for args in cases {
        let c = parse(args);
        let again = Cli::try_parse_from(c.to_args()).expect("canonical args parse");
        assert_eq!(again, c, "{:?}", args);
        assert_eq!(again.to_args(), c.to_args());
    }
    assert_eq!(parse(&["gallery", "list"]).command, Command::Gallery { action: GalleryAction::List });
}

#[test]
fn usage_errors() {
    for args in [&["check"][..], &["check", "x", "--depth", "deep"], &["frobnicate"], &["check", "x", "--bogus"]] {
        assert!(Cli::try_parse_from(std::iter::once("topolab").chain(args.iter().copied())).is_err(), "{:?}", args);
    }
    assert_eq!(topolab(&["check", "x", "--depth", "deep"]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn unknown_instance_is_input_error() {
    let out = topolab(&["check", "no_such_instance"]);
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_instance"));
}

#[test]
fn check_matches_golden() {
    let out = topolab(&["check", "xsum_identity", "--depth", "8", "--seed", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let golden = std::fs::read(repo().join("crates/core/golden/v1/xsum_identity.d8.s0.json")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn corrupted_golden_exits_3_naming_the_certificate() {
    let dir = std::env::temp_dir().join(format!("topolab-cli-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let name = "michael_isolated.d8.s0.json";
    let text = std::fs::read_to_string(repo().join("crates/core/golden/v1").join(name)).unwrap();
    std::fs::write(dir.join(name), text.replacen("random_beta(1)", "random_beta(9)", 1)).unwrap();
    let out = Proc::new(env!("CARGO_BIN_EXE_topolab"))
        .args(["check", "michael_isolated"])
        .env("TOPOLAB_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_MISMATCH));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(name), "{}", err);
    assert!(err.contains("certificate legality on random_beta(1)"), "{}", err);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sieve_non_mu_refutes_mu() {
    let out = topolab(&["sieve", "verify", "trees/non_mu.sieve", "--checks", "mu", "--depth", "6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"][0]["verdict"], "Refuted");
    assert_eq!(v["checks"][0]["certificate"][0]["verdict"], "Refuted");
}

#[test]
fn sieve_expectation_mismatch_exits_3() {
    let path = std::env::temp_dir().join(format!("topolab-wrong-{}.sieve", std::process::id()));
    std::fs::write(&path, "tree wrong\nkind nonmu\nexpect mu verified\n").unwrap();
    let out = topolab(&["sieve", "verify", path.to_str().unwrap(), "--checks", "mu", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(EXIT_MISMATCH));
    std::fs::remove_file(&path).ok();
    assert_eq!(topolab(&["sieve", "verify", "trees/none.sieve"]).status.code(), Some(EXIT_INPUT));
    assert_eq!(topolab(&["sieve", "verify", "trees/non_mu.sieve", "--checks", "zeta"]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn beta_prime_play_and_refusal() {
    let out = topolab(&["play", "tandem-michael", "--beta", "thm91:xsum_identity", "--depth", "6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["legality"]["verdict"], "Verified");
    assert_eq!(v["meander"]["verdict"], "Verified");
    assert!(v["rechecks"].as_array().unwrap().iter().all(|r| r["verdict"] == "Verified"));
    let out = topolab(&["play", "tandem-michael", "--beta", "thm81:id_q", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not launchable"));
}

#[test]
fn manual_moves_use_engine_diagnostics() {
    use std::io::Write;
    let mut child = Proc::new(env!("CARGO_BIN_EXE_topolab"))
        .args(["play", "michael", "--space", "q", "--beta", "follow_basis:3", "--depth", "2", "--manual", "--format", "json"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"rational:(5,6)\nrational:(0,1/2)\nrational:(0,1/4)\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rejected = v["rejected"].as_array().unwrap();
    assert_eq!(rejected.len(), 1);
    assert!(rejected[0].as_str().unwrap().contains("is not inside the previous move"));
    assert_eq!(v["legality"]["verdict"], "Verified");
    assert_eq!(v["play"]["plies"].as_array().unwrap().len(), 4);
}

#[test]
fn gallery_list_names_every_instance() {
    let out = topolab(&["gallery", "list"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8_lossy(&out.stdout);
    for n in topolab::gallery::INSTANCES {
        assert!(text.contains(n));
    }
}
