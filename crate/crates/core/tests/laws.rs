mod common;

use common::*;
use proptest::prelude::*;
use topolab::space::Space;

#[test]
fn laws_on_every_exact_space() {
    for (id, s) in exact_spaces() {
        let t = std::time::Instant::now();
        let sep = run_laws(&s, 1000, 11).unwrap_or_else(|m| panic!("{}: {}", id, m));
        eprintln!("{:<18} {:>4} separated {:?}", id, sep, t.elapsed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laws_hold_for_any_seed(seed in any::<u64>(), which in 0usize..EXACT_SPACES.len()) {
        let s = Space::from_id(EXACT_SPACES[which]).unwrap();
        prop_assert!(run_laws(&s, 3, seed).is_ok(), "{:?}", run_laws(&s, 3, seed));
    }
}

#[test]
#[ignore]
fn bench_one_space() {
    let id = std::env::var("SPACE").unwrap_or("wilhelm_domain".into());
    let n: usize = std::env::var("N").ok().and_then(|s| s.parse().ok()).unwrap_or(10);
    let s = Space::from_id(&id).unwrap();
    run_laws(&s, n, 11).unwrap();
}
