mod common;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use topolab::field::{rat, Rat, Sign};
use topolab::games::{playout, RandomBeta, ScheduleKind, ShrinkTo};
use topolab::gallery::aggregate;
use topolab::maps::{Outcome, Verdict};
use topolab::sieves::branch_distance;
use topolab::space::Space;
use topolab::{ExactSet, FieldPoint, SeqPoint};

/// Sign of `p + q·√k` for `k` not a square, by comparing squares.
fn sign_root(p: &Rat, q: &Rat, k: i64) -> Ordering {
    let sp = p.cmp(&Rat::zero());
    let sq = q.cmp(&Rat::zero());
    if sq == Ordering::Equal || sp == sq {
        return if sq == Ordering::Equal { sp } else { sq };
    }
    if sp == Ordering::Equal {
        return sq;
    }
    let lhs = p * p;
    let rhs = q * q * Rat::from_integer(BigInt::from(k));
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Reference sign of `a + b√2 + c√3 + d√6`, grouped over √2 then √3.
/// The grouping differs from the library's, which splits over √3 first.
fn oracle_sign(a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Ordering {
    // x = (a + c√3) + √2 (b + d√3)
    let u = sign_root(a, c, 3);
    let w = sign_root(b, d, 3);
    if w == Ordering::Equal || u == w {
        return if w == Ordering::Equal { u } else { w };
    }
    if u == Ordering::Equal {
        return w;
    }
    // compare (a + c√3)^2 with 2 (b + d√3)^2, both in Q(√3)
    let two = Rat::from_integer(2.into());
    let three = Rat::from_integer(3.into());
    let p = a * a + c * c * &three - (b * b + d * d * &three) * &two;
    let q = a * c * &two - b * d * &two * &two;
    match sign_root(&p, &q, 3) {
        Ordering::Greater => u,
        Ordering::Less => w,
        Ordering::Equal => Ordering::Equal,
    }
}

fn to_ordering(s: Sign) -> Ordering {
    match s {
        Sign::Negative => Ordering::Less,
        Sign::Zero => Ordering::Equal,
        Sign::Positive => Ordering::Greater,
    }
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-400i64..400, 1i64..60).prop_map(|(n, d)| rat(n, d))
}

/// Convergents `p/q` of √2, so `p - q√2` is tiny.
fn pell(n: usize) -> (BigInt, BigInt) {
    let (mut p, mut q) = (BigInt::from(1), BigInt::from(1));
    for _ in 0..n {
        let np = &p + &q * 2;
        q = &p + &q;
        p = np;
    }
    (p, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sign_agrees_with_oracle(a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat()) {
        let x = FieldPoint::new(a.clone(), b.clone(), c.clone(), d.clone());
        prop_assert_eq!(to_ordering(x.sign()), oracle_sign(&a, &b, &c, &d));
    }

    #[test]
    fn sign_near_cancellation(n in 1usize..60, flip in any::<bool>(), shift in -3i64..4) {
        // p - q√2 shrinks like 1/q; a tiny rational shift may or may not cancel it
        let (p, q) = pell(n);
        let s = if flip { -1 } else { 1 };
        let a = Rat::from_integer(p * s) + rat(shift, 1) * Rat::new(1.into(), &q * &q * 1000);
        let b = Rat::from_integer(-q * s);
        let x = FieldPoint::new(a.clone(), b.clone(), Rat::zero(), Rat::zero());
        prop_assert_eq!(to_ordering(x.sign()), oracle_sign(&a, &b, &Rat::zero(), &Rat::zero()));
    }

    #[test]
    fn order_is_consistent(a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat(), e in small_rat()) {
        let x = FieldPoint::new(a.clone(), b.clone(), c, d);
        let y = FieldPoint::new(e, b, Rat::zero(), Rat::zero());
        prop_assert_eq!(x.cmp(&y), to_ordering((&x - &y).sign()));
        prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
    }

    #[test]
    fn floor_times_matches_scaled_floor(a in small_rat(), b in small_rat(), k in 1i64..5000) {
        let x = FieldPoint::new(a, b, Rat::zero(), Rat::zero());
        let kk = BigInt::from(k);
        let (f, exact) = x.floor_times(&kk);
        let scaled = x.scale(&Rat::from_integer(kk));
        prop_assert_eq!(&f, &scaled.floor());
        prop_assert_eq!(exact, FieldPoint::rational(Rat::from_integer(f)) == scaled);
    }

    #[test]
    fn sets_print_and_parse_back(seed in any::<u64>(), which in 0usize..common::EXACT_SPACES.len()) {
        let s = Space::from_id(common::EXACT_SPACES[which]).unwrap();
        let mut r = common::rng(seed);
        let a = s.random_set(&mut r, 3).unwrap();
        let back: ExactSet = a.to_string().parse().unwrap();
        prop_assert!(s.same(&a, &back), "{} reparsed as {}", a, back);
        prop_assert_eq!(back.to_string(), a.to_string());
    }

    #[test]
    fn playouts_are_deterministic(seed in 0u64..1000, which in 0usize..4) {
        let id = ["q", "m1", "xsum", "qk"][which];
        let s = Space::from_id(id).unwrap();
        let run = || {
            let play = playout(ScheduleKind::Michael, &s, &mut ShrinkTo::first(), &mut RandomBeta::new(seed), 5).unwrap();
            serde_json::to_string(&play).unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn branch_distance_is_an_ultrametric(
        xs in proptest::collection::vec((proptest::collection::vec(0u64..3, 0..8), 0u64..3), 3)
    ) {
        let b: Vec<SeqPoint> = xs.into_iter().map(|(p, t)| SeqPoint::new(p, t)).collect();
        let d = |i: usize, j: usize| branch_distance(&b[i], &b[j]);
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert!(!d(0, 1).is_negative());
        prop_assert_eq!(d(0, 1).is_zero(), b[0] == b[1]);
        prop_assert!(d(0, 2) <= d(0, 1).max(d(1, 2)));
    }

    #[test]
    fn aggregation_is_unanimity(outs in proptest::collection::vec(0u8..3, 0..6)) {
        let o = |k: u8| [Outcome::Verified, Outcome::Refuted, Outcome::Unknown][k as usize];
        let vs: Vec<Verdict> = outs.iter().map(|&k| Verdict::new("p", "s", o(k), 1)).collect();
        let want = match outs.first() {
            Some(&k) if outs.iter().all(|&j| j == k) => o(k),
            _ => Outcome::Unknown,
        };
        prop_assert_eq!(aggregate(&vs), want);
    }
}
