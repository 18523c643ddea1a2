//! Gallery reports at depth 8, seed 0 against the shipped golden files.
//! `TOPOLAB_BLESS=1` rewrites them instead.

use topolab::gallery::{bless, compare_golden, golden_dir, run_many, GoldenStatus, INSTANCES};

#[test]
fn gallery_matches_goldens() {
    let dir = golden_dir();
    let blessing = std::env::var("TOPOLAB_BLESS").is_ok_and(|v| v == "1");
    let mut failures = Vec::new();
    for r in run_many(&INSTANCES, 8, 0) {
        let r = r.expect("instance runs");
        if !r.matches {
            failures.push(format!("{}", r));
        }
        if blessing {
            bless(&dir, &r).expect("golden written");
            continue;
        }
        match compare_golden(&dir, &r).expect("golden readable") {
            GoldenStatus::Match => {}
            other => failures.push(format!("{}: {}", r.instance, other)),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corrupted_golden_is_reported() {
    let dir = std::env::temp_dir().join(format!("topolab-golden-{}", std::process::id()));
    let r = &run_many(&["michael_isolated"], 3, 0)[0];
    let r = r.as_ref().unwrap();
    let path = bless(&dir, r).unwrap();
    assert_eq!(compare_golden(&dir, r).unwrap(), GoldenStatus::Match);
    let text = std::fs::read_to_string(&path).unwrap().replacen("\"Verified\"", "\"Refuted\"", 1);
    std::fs::write(&path, text).unwrap();
    match compare_golden(&dir, r).unwrap() {
        GoldenStatus::Differs { path: p, expected, actual, .. } => {
            assert!(p.ends_with("michael_isolated.d3.s0.json"));
            assert!(expected.contains("Refuted") && actual.contains("Verified"));
        }
        other => panic!("expected a diff, got {:?}", other),
    }
    std::fs::remove_dir_all(&dir).ok();
}
