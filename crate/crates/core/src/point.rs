//! Carrier points.

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;
use crate::field::FieldPoint;
use crate::parse::Cursor;

/// An eventually constant sequence of naturals: `prefix` followed by
/// `tail` repeated forever. Trailing prefix entries equal to the tail are
/// stripped, so structural equality is sequence equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeqPoint {
    prefix: Vec<u64>,
    tail: u64,
}

impl SeqPoint {
    pub fn new(mut prefix: Vec<u64>, tail: u64) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        SeqPoint { prefix, tail }
    }

    pub fn constant(tail: u64) -> Self {
        SeqPoint { prefix: Vec::new(), tail }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    pub fn at(&self, i: usize) -> u64 {
        self.prefix.get(i).copied().unwrap_or(self.tail)
    }

    pub fn take(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Index of the first disagreement, `None` when equal.
    pub fn first_difference(&self, other: &SeqPoint) -> Option<usize> {
        if self == other {
            return None;
        }
        let n = self.prefix.len().max(other.prefix.len());
        (0..=n).find(|&i| self.at(i) != other.at(i))
    }

    pub fn starts_with(&self, s: &[u64]) -> bool {
        s.iter().enumerate().all(|(i, &v)| self.at(i) == v)
    }
}

impl fmt::Display for SeqPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
        write!(f, "<{};{}>", body.join(","), self.tail)
    }
}

impl fmt::Debug for SeqPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Real(FieldPoint),
    Seq(SeqPoint),
    Tagged(Box<Point>, u8),
    Pair(Box<Point>, Box<Point>),
}

impl Point {
    pub fn real(x: FieldPoint) -> Self {
        Point::Real(x)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Point::Real(FieldPoint::from_ratio(num, den))
    }

    pub fn int(n: i64) -> Self {
        Point::Real(FieldPoint::from_int(n))
    }

    pub fn seq(prefix: Vec<u64>, tail: u64) -> Self {
        Point::Seq(SeqPoint::new(prefix, tail))
    }

    pub fn tagged(self, tag: u8) -> Self {
        Point::Tagged(Box::new(self), tag)
    }

    pub fn pair(a: Point, b: Point) -> Self {
        Point::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_real(&self) -> Option<&FieldPoint> {
        match self {
            Point::Real(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&SeqPoint> {
        match self {
            Point::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn untag(&self) -> Option<(&Point, u8)> {
        match self {
            Point::Tagged(p, t) => Some((p, *t)),
            _ => None,
        }
    }

    pub(crate) fn parse_from(cur: &mut Cursor<'_>) -> Result<Point, ParseError> {
        cur.skip_ws();
        let mut p = match cur.peek() {
            Some('<') => {
                cur.expect('<')?;
                let mut prefix = Vec::new();
                if !cur.eat(';') {
                    loop {
                        let tok = cur.take_while(|c| c.is_ascii_digit());
                        prefix.push(tok.parse::<u64>().map_err(|_| cur.error("bad sequence entry"))?);
                        if cur.eat(';') {
                            break;
                        }
                        cur.expect(',')?;
                    }
                }
                let tok = cur.take_while(|c| c.is_ascii_digit());
                let tail = tok.parse::<u64>().map_err(|_| cur.error("bad sequence tail"))?;
                cur.expect('>')?;
                Point::Seq(SeqPoint::new(prefix, tail))
            }
            Some('(') => {
                cur.expect('(')?;
                let a = Point::parse_from(cur)?;
                cur.expect('|')?;
                let b = Point::parse_from(cur)?;
                cur.expect(')')?;
                Point::pair(a, b)
            }
            _ => {
                let tok = cur.take_while(|c| c.is_ascii_digit() || "/+-r*".contains(c));
                if tok.is_empty() {
                    return Err(cur.error("expected a point"));
                }
                Point::Real(tok.parse()?)
            }
        };
        while cur.eat('@') {
            let tok = cur.take_while(|c| c.is_ascii_digit());
            let tag = tok.parse::<u8>().map_err(|_| cur.error("bad tag"))?;
            p = p.tagged(tag);
        }
        Ok(p)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{}", x),
            Point::Seq(s) => write!(f, "{}", s),
            Point::Tagged(p, t) => write!(f, "{}@{}", p, t),
            Point::Pair(a, b) => write!(f, "({}|{})", a, b),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Point {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut cur = Cursor::new(s);
        let p = Point::parse_from(&mut cur)?;
        cur.finish()?;
        Ok(p)
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_normalizes_trailing_tail() {
        assert_eq!(SeqPoint::new(vec![1, 0, 0], 0), SeqPoint::new(vec![1], 0));
        assert_eq!(SeqPoint::new(vec![1, 2], 0).first_difference(&SeqPoint::new(vec![1], 0)), Some(1));
    }

    #[test]
    fn point_text_roundtrip() {
        for s in ["1/2", "<1,2;0>", "<;3>", "1+r2@1", "(0|<1;0>)", "-3/4*r3@0@2"] {
            let p: Point = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }
}
