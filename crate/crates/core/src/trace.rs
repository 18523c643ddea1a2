//! Countable point traces on the ordered field Q(√2, √3).
//!
//! A linear space is a finite union of disjoint traces ("atoms"). Each
//! trace decides membership, tells whether an open interval meets it and
//! where its points accumulate, and can enumerate candidate points.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::field::{int, FieldPoint, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trace {
    Rational,
    Dyadic,
    NonDyadic,
    Naturals,
    Harmonic,
    NonHarmonic,
    M1,
    Field,
    RatPlusSqrt2,
    WilhelmH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// Dense in the reals.
    Dense,
    /// Accumulates only from the right, at 0 (and at points outside the trace).
    Fan,
    /// No accumulation points at all.
    Sparse,
}

pub const ALL_TRACES: [Trace; 10] = [
    Trace::Rational,
    Trace::Dyadic,
    Trace::NonDyadic,
    Trace::Naturals,
    Trace::Harmonic,
    Trace::NonHarmonic,
    Trace::M1,
    Trace::Field,
    Trace::RatPlusSqrt2,
    Trace::WilhelmH,
];

/// Cap on denominators tried while enumerating candidates.
const MAX_DENOM: i64 = 1 << 12;
/// Cap on block indices `n` when enumerating M₁.
const M1_BLOCKS: u64 = 1 << 12;

fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

fn is_dyadic(q: &Rat) -> bool {
    is_power_of_two(q.denom())
}

fn is_harmonic(q: &Rat) -> bool {
    q.is_positive() && q.numer().is_one()
}

/// `1/n + 1/(n² m)`
pub fn m1_point(n: u64, m: u64) -> Rat {
    let n = BigInt::from(n);
    let m = BigInt::from(m);
    Rat::new(BigInt::one(), n.clone()) + Rat::new(BigInt::one(), &n * &n * m)
}

/// Decides membership in M₁ by bounded search over `n ∈ (1/q, 2/q]`.
pub fn m1_decompose(q: &Rat) -> Option<(u64, u64)> {
    if !q.is_positive() {
        return None;
    }
    let inv = q.recip();
    let lo: BigInt = inv.floor().to_integer() + 1;
    let hi = (inv * int(2)).floor().to_integer();
    let mut n = lo;
    while n <= hi {
        let excess = q - Rat::new(BigInt::one(), n.clone());
        if excess.is_positive() {
            let m = (excess * Rat::from_integer(&n * &n)).recip();
            if m.is_integer() && m.is_positive() {
                let nn: u64 = n.try_into().ok()?;
                let mm: u64 = m.to_integer().try_into().ok()?;
                return Some((nn, mm));
            }
        }
        n += 1;
    }
    None
}

fn lt(a: &FieldPoint, b: &FieldPoint) -> bool {
    a < b
}

/// Inside `(l, r)` where `None` stands for an infinite end.
pub fn strictly_between(x: &FieldPoint, l: Option<&FieldPoint>, r: Option<&FieldPoint>) -> bool {
    l.map_or(true, |l| lt(l, x)) && r.map_or(true, |r| lt(x, r))
}

impl Trace {
    pub fn name(self) -> &'static str {
        match self {
            Trace::Rational => "rational",
            Trace::Dyadic => "dyadic",
            Trace::NonDyadic => "nondyadic",
            Trace::Naturals => "naturals",
            Trace::Harmonic => "harmonic",
            Trace::NonHarmonic => "nonharmonic",
            Trace::M1 => "m1",
            Trace::Field => "field",
            Trace::RatPlusSqrt2 => "ratsqrt2",
            Trace::WilhelmH => "wilhelmh",
        }
    }

    pub fn kind(self) -> TraceKind {
        match self {
            Trace::Harmonic | Trace::M1 => TraceKind::Fan,
            Trace::Naturals => TraceKind::Sparse,
            _ => TraceKind::Dense,
        }
    }

    /// True when the trace lies inside the rationals.
    pub fn is_rational(self) -> bool {
        !matches!(self, Trace::Field | Trace::RatPlusSqrt2 | Trace::WilhelmH)
    }

    pub fn contains(self, x: &FieldPoint) -> bool {
        let q = x.as_rational();
        match self {
            Trace::Rational => q.is_some(),
            Trace::Dyadic => q.is_some_and(is_dyadic),
            Trace::NonDyadic => q.is_some_and(|q| !is_dyadic(q)),
            Trace::Naturals => q.is_some_and(|q| q.is_integer() && !q.is_negative()),
            Trace::Harmonic => q.is_some_and(is_harmonic),
            Trace::NonHarmonic => q.is_some_and(|q| !is_harmonic(q)),
            Trace::M1 => q.is_some_and(|q| q.is_zero() || m1_decompose(q).is_some()),
            Trace::Field => true,
            Trace::RatPlusSqrt2 => matches!(x.coeffs(), [_, b, c, d] if b.is_one() && c.is_zero() && d.is_zero()),
            Trace::WilhelmH => {
                q.is_none() && !(matches!(x.coeffs(), [_, b, c, d] if b.is_one() && c.is_zero() && d.is_zero()))
            }
        }
    }

    /// Trace points approach `x` from the right.
    pub fn accumulates_right(self, x: &FieldPoint) -> bool {
        match self.kind() {
            TraceKind::Dense => true,
            TraceKind::Sparse => false,
            TraceKind::Fan => match self {
                Trace::M1 => x.is_zero() || x.as_rational().is_some_and(is_harmonic),
                _ => x.is_zero(),
            },
        }
    }

    pub fn accumulates_left(self, _x: &FieldPoint) -> bool {
        self.kind() == TraceKind::Dense
    }

    /// Does some trace point lie strictly inside `(l, r)`?
    pub fn meets_open(self, l: Option<&FieldPoint>, r: Option<&FieldPoint>) -> bool {
        if let (Some(l), Some(r)) = (l, r) {
            if l >= r {
                return false;
            }
        }
        match self {
            Trace::Naturals => {
                let k = match l {
                    Some(l) if !l.sign_is_negative() => l.floor() + 1,
                    _ => BigInt::zero(),
                };
                r.map_or(true, |r| FieldPoint::rational(Rat::from_integer(k)) < *r)
            }
            Trace::Harmonic => {
                let zero = FieldPoint::zero();
                if r.is_some_and(|r| *r <= zero) {
                    return false;
                }
                if l.map_or(true, |l| *l < zero || l.is_zero()) {
                    return true;
                }
                // smallest n with 1/n < r, then test 1/n > l
                let n = match r {
                    None => 1,
                    Some(r) => first_index(|n| FieldPoint::from_ratio(1, n as i64) < *r),
                };
                FieldPoint::from_ratio(1, n as i64) > *l.unwrap()
            }
            Trace::M1 => !m1_points(l, r, 1).is_empty(),
            _ => true,
        }
    }

    /// Up to `limit` trace points strictly inside `(l, r)`, in a fixed
    /// order favouring simple points. Enumeration is bounded, so very thin
    /// intervals of sparse traces may come back short.
    pub fn points_in(self, l: Option<&FieldPoint>, r: Option<&FieldPoint>, limit: usize) -> Vec<FieldPoint> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        match self {
            Trace::Rational | Trace::Dyadic | Trace::NonDyadic | Trace::NonHarmonic => {
                rational_candidates(l, r, limit, &mut |q| {
                    let keep = match self {
                        Trace::Dyadic => is_dyadic(q),
                        Trace::NonDyadic => !is_dyadic(q),
                        Trace::NonHarmonic => !is_harmonic(q),
                        _ => true,
                    };
                    keep.then(|| FieldPoint::rational(q.clone()))
                }, &mut out);
            }
            Trace::RatPlusSqrt2 | Trace::WilhelmH => {
                let shift = if self == Trace::RatPlusSqrt2 { FieldPoint::sqrt2() } else { FieldPoint::sqrt3() };
                let ls = l.map(|l| l - &shift);
                let rs = r.map(|r| r - &shift);
                rational_candidates(ls.as_ref(), rs.as_ref(), limit, &mut |q| {
                    Some(&FieldPoint::rational(q.clone()) + &shift)
                }, &mut out);
            }
            Trace::Field => {
                let per = limit.div_ceil(3);
                let mut parts = [
                    Trace::Rational.points_in(l, r, per),
                    Trace::RatPlusSqrt2.points_in(l, r, per),
                    Trace::WilhelmH.points_in(l, r, per),
                ];
                let mut i = 0;
                while out.len() < limit && parts.iter().any(|p| i < p.len()) {
                    for p in parts.iter_mut() {
                        if i < p.len() && out.len() < limit {
                            out.push(p[i].clone());
                        }
                    }
                    i += 1;
                }
            }
            Trace::Naturals => {
                let mut k = match l {
                    Some(l) if !l.sign_is_negative() => l.floor() + 1,
                    _ => BigInt::zero(),
                };
                let cap = &k + BigInt::from(MAX_DENOM);
                while out.len() < limit && k < cap {
                    let x = FieldPoint::rational(Rat::from_integer(k.clone()));
                    if r.is_some_and(|r| x >= *r) {
                        break;
                    }
                    out.push(x);
                    k += 1;
                }
            }
            Trace::Harmonic => {
                for n in 1..=MAX_DENOM {
                    let x = FieldPoint::from_ratio(1, n);
                    if strictly_between(&x, l, r) {
                        out.push(x);
                        if out.len() == limit {
                            break;
                        }
                    } else if l.is_some_and(|l| x <= *l) {
                        break;
                    }
                }
            }
            Trace::M1 => out = m1_points(l, r, limit),
        }
        out.truncate(limit);
        out
    }
}

/// M₁ points inside `(l, r)`, block by block: block `n` holds the points
/// `1/n + 1/(n²m)`, which decrease in `m` towards `1/n`.
fn m1_points(l: Option<&FieldPoint>, r: Option<&FieldPoint>, limit: usize) -> Vec<FieldPoint> {
    let mut out = Vec::new();
    let zero = FieldPoint::zero();
    if strictly_between(&zero, l, r) {
        out.push(zero.clone());
    }
    if r.is_some_and(|r| *r <= zero) {
        return out;
    }
    let x = |n: u64, m: u64| FieldPoint::rational(m1_point(n, m));
    let n_min = match r {
        None => 1,
        Some(r) => first_index(|n| FieldPoint::from_ratio(1, n as i64) < *r),
    };
    let mut n = n_min;
    while out.len() < limit && n <= M1_BLOCKS {
        if l.is_some_and(|l| x(n, 1) <= *l) {
            break;
        }
        let m_start = match r {
            Some(r) if x(n, 1) >= *r => first_index(|m| x(n, m) < *r),
            _ => 1,
        };
        for m in m_start..m_start + limit as u64 {
            let p = x(n, m);
            if l.is_some_and(|l| p <= *l) {
                break;
            }
            out.push(p);
            if out.len() >= limit {
                break;
            }
        }
        n += 1;
    }
    out
}

/// Smallest `n ≥ 1` satisfying a predicate that is monotone in `n`.
fn first_index(pred: impl Fn(u64) -> bool) -> u64 {
    let mut hi = 1u64;
    while !pred(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2 + 1;
    if hi == 1 {
        return 1;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

fn rational_candidates(
    l: Option<&FieldPoint>,
    r: Option<&FieldPoint>,
    limit: usize,
    accept: &mut dyn FnMut(&Rat) -> Option<FieldPoint>,
    out: &mut Vec<FieldPoint>,
) {
    // past the small denominators, bounded intervals are refined by
    // q * 2^e so that arbitrarily short ones still get points
    let bounded = l.is_some() && r.is_some();
    let fine = (13..256u32).flat_map(|e| (1..=12i64).map(move |q| BigInt::from(q) << e));
    let denoms = (1..=MAX_DENOM).map(BigInt::from).chain(fine.take_while(move |_| bounded));
    for big_q in denoms {
        let coarse = big_q <= BigInt::from(MAX_DENOM);
        let reach = &big_q * &big_q;
        let lo = match l {
            Some(l) => l.floor_times(&big_q).0 + 1,
            None => -reach.clone(),
        };
        let hi = match r {
            Some(r) => match r.floor_times(&big_q) {
                (f, true) => f - 1,
                (f, false) => f,
            },
            None => reach.clone(),
        };
        if lo > hi {
            continue;
        }
        // walk outward from the numerator closest to zero
        let start = if lo > BigInt::zero() {
            lo.clone()
        } else if hi < BigInt::zero() {
            hi.clone()
        } else {
            BigInt::zero()
        };
        let mut up: BigInt = start.clone();
        let mut down: BigInt = &start - 1;
        let mut steps = 0;
        loop {
            steps += 1;
            if !coarse && steps > 64 {
                break;
            }
            let up_ok = up <= hi;
            let down_ok = down >= lo;
            if !up_ok && !down_ok {
                break;
            }
            for p in [up_ok.then(|| up.clone()), down_ok.then(|| down.clone())].into_iter().flatten() {
                let coprime = match (p.to_i64(), big_q.to_i64()) {
                    (Some(a), Some(b)) => a.gcd(&b) == 1,
                    _ => p.gcd(&big_q).is_one(),
                };
                if coprime {
                    // already in lowest terms with a positive denominator
                    if let Some(x) = accept(&Rat::new_raw(p, big_q.clone())) {
                        out.push(x);
                        if out.len() >= limit {
                            return;
                        }
                    }
                }
            }
            up += 1;
            down -= 1;
        }
    }
}

impl FieldPoint {
    fn sign_is_negative(&self) -> bool {
        self.sign() == crate::field::Sign::Negative
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Trace {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        ALL_TRACES
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| ParseError::new(format!("unknown trace '{}'", s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_membership() {
        assert_eq!(m1_decompose(&Rat::new(3.into(), 2.into())), Some((1, 2)));
        assert!(Trace::M1.contains(&FieldPoint::zero()));
        assert!(!Trace::M1.contains(&FieldPoint::from_ratio(1, 2)));
        // 1/3 + 1/18 = 7/18
        assert!(Trace::M1.contains(&FieldPoint::from_ratio(7, 18)));
    }

    #[test]
    fn harmonic_meets() {
        let a = FieldPoint::from_ratio(1, 3);
        let b = FieldPoint::from_ratio(1, 2);
        assert!(!Trace::Harmonic.meets_open(Some(&a), Some(&b)));
        let c = FieldPoint::from_ratio(2, 5);
        assert!(!Trace::Harmonic.meets_open(Some(&c), Some(&b)));
        assert!(Trace::Harmonic.meets_open(Some(&FieldPoint::from_ratio(1, 4)), Some(&b)));
    }

    #[test]
    fn candidates_are_inside() {
        let l = FieldPoint::from_ratio(1, 7);
        let r = FieldPoint::from_ratio(1, 6);
        for t in ALL_TRACES {
            for x in t.points_in(Some(&l), Some(&r), 5) {
                assert!(t.contains(&x), "{} {}", t, x);
                assert!(strictly_between(&x, Some(&l), Some(&r)));
            }
        }
    }

    #[test]
    fn nondyadic_witness_near_zero() {
        let e = FieldPoint::from_ratio(1, 8);
        let pts = Trace::NonDyadic.points_in(Some(&-&e), Some(&e), 3);
        assert!(pts.iter().all(|x| Trace::NonDyadic.contains(x)));
        assert!(Trace::NonDyadic.contains(&FieldPoint::from_ratio(1, 12)));
    }
}
