//! Exact arithmetic in the biquadratic field Q(√2, √3).
//!
//! Every element is stored as `a + b√2 + c√3 + d√6` with rational
//! coefficients. Since `1, √2, √3, √6` are linearly independent over the
//! rationals, coefficient-wise equality is value equality and the sign of
//! an element can be decided exactly by squaring twice.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

pub type Rat = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of_rat(q: &Rat) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Sign of `p + q√2`.
fn sign_sqrt2(p: &Rat, q: &Rat) -> Sign {
    let sp = Sign::of_rat(p);
    let sq = Sign::of_rat(q);
    if sq == Sign::Zero {
        return sp;
    }
    if sp == Sign::Zero || sp == sq {
        return sq;
    }
    // opposite signs: compare p^2 with 2q^2
    let lhs = p * p;
    let rhs = q * q * int(2);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Sign::Zero,
    }
}

#[derive(Clone)]
pub struct FieldPoint {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
    /// Floating value and total term size, filled on first comparison.
    approx: OnceLock<Option<(f64, f64)>>,
}

impl PartialEq for FieldPoint {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && self.c == o.c && self.d == o.d
    }
}

impl Eq for FieldPoint {}

impl Hash for FieldPoint {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.coeffs().hash(h)
    }
}

impl FieldPoint {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Self {
        FieldPoint { a, b, c, d, approx: OnceLock::new() }
    }

    pub fn rational(q: Rat) -> Self {
        Self::new(q, Rat::zero(), Rat::zero(), Rat::zero())
    }

    /// Coefficients of `1, √2, √3, √6`.
    pub fn coeffs(&self) -> [&Rat; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(rat(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn zero() -> Self {
        Self::rational(Rat::zero())
    }

    pub fn sqrt2() -> Self {
        FieldPoint::new(Rat::zero(), Rat::one(), Rat::zero(), Rat::zero())
    }

    pub fn sqrt3() -> Self {
        FieldPoint::new(Rat::zero(), Rat::zero(), Rat::one(), Rat::zero())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    /// Exact sign of `a + b√2 + c√3 + d√6`.
    ///
    /// Write the value as `u + √3·w` with `u = a + b√2`, `w = c + d√2`.
    /// When `u` and `√3·w` have opposite signs the magnitudes are compared
    /// through `u² − 3w²`, which again lies in Q(√2).
    pub fn sign(&self) -> Sign {
        if let Some(s) = self.float_sign() {
            return s;
        }
        let su = sign_sqrt2(&self.a, &self.b);
        let sv = sign_sqrt2(&self.c, &self.d);
        if sv == Sign::Zero {
            return su;
        }
        if su == Sign::Zero || su == sv {
            return sv;
        }
        // u^2 = a^2 + 2b^2 + 2ab√2 ; 3w^2 = 3c^2 + 6d^2 + 6cd√2
        let two = int(2);
        let three = int(3);
        let six = int(6);
        let p = &self.a * &self.a + &self.b * &self.b * &two
            - &self.c * &self.c * &three
            - &self.d * &self.d * &six;
        let q = &self.a * &self.b * &two - &self.c * &self.d * &six;
        match sign_sqrt2(&p, &q) {
            Sign::Positive => su,
            Sign::Negative => sv,
            Sign::Zero => Sign::Zero,
        }
    }

    fn approx(&self) -> Option<(f64, f64)> {
        *self.approx.get_or_init(|| {
            let f = |q: &Rat| quick_f64(q).filter(|x| x.is_finite());
            let terms = [
                f(&self.a)?,
                f(&self.b)? * std::f64::consts::SQRT_2,
                f(&self.c)? * 3f64.sqrt(),
                f(&self.d)? * 6f64.sqrt(),
            ];
            Some((terms.iter().sum(), terms.iter().map(|t| t.abs()).sum()))
        })
    }

    /// The sign of `x - y` read off floating-point evaluations, when the
    /// value clears the rounding error by a wide margin. Each term is off by
    /// a few ulps, so anything above `2^-40` of the total size is safe.
    fn float_sign_of_difference(x: &FieldPoint, y: Option<&FieldPoint>) -> Option<Sign> {
        let (vx, sx) = x.approx()?;
        let (vy, sy) = match y {
            Some(y) => y.approx()?,
            None => (0.0, 0.0),
        };
        let (v, size) = (vx - vy, sx + sy);
        if v.abs() > size * 1e-12 && size > f64::MIN_POSITIVE * 1e20 {
            Some(if v > 0.0 { Sign::Positive } else { Sign::Negative })
        } else {
            None
        }
    }

    fn float_sign(&self) -> Option<Sign> {
        if self.is_rational() {
            return None;
        }
        Self::float_sign_of_difference(self, None)
    }

    pub fn scale(&self, k: &Rat) -> FieldPoint {
        FieldPoint::new(&self.a * k, &self.b * k, &self.c * k, &self.d * k)
    }

    pub fn to_f64(&self) -> f64 {
        let f = |q: &Rat| q.to_f64().unwrap_or(0.0);
        f(&self.a)
            + f(&self.b) * std::f64::consts::SQRT_2
            + f(&self.c) * 3f64.sqrt()
            + f(&self.d) * 6f64.sqrt()
    }

    /// A rational `r` with `|self − r| < 2^-bits`, found by bisection on
    /// exact comparisons.
    pub fn rational_approx(&self, bits: u32) -> Rat {
        if let Some(q) = self.as_rational() {
            return q.clone();
        }
        let guess = self.to_f64();
        let mut lo = Rat::from_integer(BigInt::from(guess.floor() as i64 - 1));
        let mut hi = Rat::from_integer(BigInt::from(guess.ceil() as i64 + 1));
        let eps = Rat::new(BigInt::one(), BigInt::one() << bits as usize);
        while &hi - &lo >= eps {
            let mid = (&lo + &hi) / int(2);
            if FieldPoint::rational(mid.clone()) < *self {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let guess = self.to_f64();
        let mut n = if guess.is_finite() && guess.abs() < 1e15 {
            BigInt::from(guess.floor() as i64)
        } else {
            self.rational_approx(8).floor().to_integer()
        };
        while FieldPoint::rational(Rat::from_integer(n.clone())) > *self {
            n -= 1;
        }
        while FieldPoint::rational(Rat::from_integer(&n + 1)) <= *self {
            n += 1;
        }
        n
    }
}

impl FieldPoint {
    /// `floor(k·self)` and whether `k·self` is an integer, without forming
    /// the scaled point. `k` must be positive.
    pub fn floor_times(&self, k: &BigInt) -> (BigInt, bool) {
        if let Some(q) = self.as_rational() {
            let (n, r) = (q.numer() * k).div_mod_floor(q.denom());
            return (n, r.is_zero());
        }
        let kf = k.to_f64().unwrap_or(f64::INFINITY);
        let guess = self.approx().map(|(v, _)| v * kf).filter(|g| g.is_finite() && g.abs() < 1e15);
        let Some(g) = guess else { return (self.scale(&Rat::from_integer(k.clone())).floor(), false) };
        let at = |n: &BigInt| FieldPoint::rational(Rat::new(n.clone(), k.clone()));
        let mut n = BigInt::from(g.floor() as i64);
        while at(&n) > *self {
            n -= 1;
        }
        while at(&(&n + 1)) <= *self {
            n += 1;
        }
        // an irrational point is never k times an integer
        (n, false)
    }
}

/// Within a couple of ulps; word-sized parts skip the exact rounding.
fn quick_f64(q: &Rat) -> Option<f64> {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Some(n as f64 / d as f64),
        _ => q.to_f64(),
    }
}

impl Ord for FieldPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.is_rational() && other.is_rational() {
            return self.a.cmp(&other.a);
        }
        let s = FieldPoint::float_sign_of_difference(self, Some(other)).unwrap_or_else(|| (self - other).sign());
        match s {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl PartialOrd for FieldPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Sub<&'a FieldPoint> for &'a FieldPoint {
    type Output = FieldPoint;
    fn sub(self, o: &FieldPoint) -> FieldPoint {
        FieldPoint::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl<'a> Add<&'a FieldPoint> for &'a FieldPoint {
    type Output = FieldPoint;
    fn add(self, o: &FieldPoint) -> FieldPoint {
        FieldPoint::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl Neg for &FieldPoint {
    type Output = FieldPoint;
    fn neg(self) -> FieldPoint {
        FieldPoint::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl<'a> Mul<&'a FieldPoint> for &'a FieldPoint {
    type Output = FieldPoint;
    fn mul(self, o: &FieldPoint) -> FieldPoint {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&o.a, &o.b, &o.c, &o.d);
        let two = int(2);
        let three = int(3);
        let six = int(6);
        // √2√3 = √6, √2√6 = 2√3, √3√6 = 3√2, √6√6 = 6
        let r0 = a * e + b * f * &two + c * g * &three + d * h * &six;
        let r2 = a * f + b * e + c * h * &three + d * g * &three;
        let r3 = a * g + c * e + b * h * &two + d * f * &two;
        let r6 = a * h + d * e + b * g + c * f;
        FieldPoint::new(r0, r2, r3, r6)
    }
}

fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_rat(&self.a));
        }
        let mut out = String::new();
        let terms = [(&self.a, ""), (&self.b, "r2"), (&self.c, "r3"), (&self.d, "r6")];
        for (coef, unit) in terms {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if !out.is_empty() {
                out.push(if neg { '-' } else { '+' });
            } else if neg {
                out.push('-');
            }
            if unit.is_empty() {
                out.push_str(&fmt_rat(&mag));
            } else if mag.is_one() {
                out.push_str(unit);
            } else {
                out.push_str(&fmt_rat(&mag));
                out.push('*');
                out.push_str(unit);
            }
        }
        write!(f, "{}", out)
    }
}

impl fmt::Debug for FieldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let bad = || ParseError::new(format!("bad rational '{}'", s));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for FieldPoint {
    type Err = ParseError;

    /// Parses the `Display` form, e.g. `-1/2`, `1+r2`, `3/4*r3-r6`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseError::new("empty number"));
        }
        let mut coefs = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut neg = false;
            if bytes[i] == '+' || bytes[i] == '-' {
                neg = bytes[i] == '-';
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
                i += 1;
            }
            let term: String = bytes[start..i].iter().collect();
            if term.is_empty() {
                return Err(ParseError::new(format!("bad number '{}'", s)));
            }
            let (coef, unit) = match term.split_once('*') {
                Some((c, u)) => (parse_rat(c)?, u.to_string()),
                None if term.starts_with('r') => (Rat::one(), term.clone()),
                None => (parse_rat(&term)?, String::new()),
            };
            let slot = match unit.as_str() {
                "" => 0,
                "r2" => 1,
                "r3" => 2,
                "r6" => 3,
                other => return Err(ParseError::new(format!("unknown unit '{}'", other))),
            };
            coefs[slot] += if neg { -coef } else { coef };
        }
        let [a, b, c, d] = coefs;
        Ok(FieldPoint::new(a, b, c, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(a: i64, b: i64, c: i64, d: i64) -> FieldPoint {
        FieldPoint::new(int(a), int(b), int(c), int(d))
    }

    #[test]
    fn sign_examples() {
        assert_eq!(fp(0, 0, 0, 0).sign(), Sign::Zero);
        assert_eq!(fp(-1, 1, 0, 0).sign(), Sign::Positive);
        assert_eq!(fp(1, 1, -1, 0).sign(), Sign::Positive);
        assert_eq!(fp(0, 1, -1, 0).sign(), Sign::Negative);
        assert_eq!(fp(5, 0, 0, -2).sign(), Sign::Positive); // 5 - 2√6 ≈ 0.101
        assert_eq!(fp(-5, 0, 0, 2).sign(), Sign::Negative);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "-1/2", "1+r2", "3/4*r3-r6", "-r2+2*r6"] {
            let p: FieldPoint = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn floor_of_irrationals() {
        assert_eq!(FieldPoint::sqrt2().floor(), BigInt::from(1));
        assert_eq!((-&FieldPoint::sqrt3()).floor(), BigInt::from(-2));
    }

    #[test]
    fn product_matches_float() {
        let x = fp(1, 2, -1, 3);
        let y = fp(-2, 1, 1, -1);
        let z = &x * &y;
        assert!((z.to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-9);
    }
}
