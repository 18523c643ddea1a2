//! The uniform set type shared by every space.

use std::fmt;
use std::str::FromStr;

use crate::cylinder::SeqSet;
use crate::error::{ParseError, Result, TopoError};
use crate::linear::LinearSet;
use crate::parse::Cursor;
use crate::point::Point;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExactSet {
    Linear(LinearSet),
    Seq(SeqSet),
    /// Level-1 and level-2 parts of a duplicate, both as sets of the base.
    Dup(Box<ExactSet>, Box<ExactSet>),
    /// One component per summand.
    Sum(Vec<ExactSet>),
}

impl ExactSet {
    pub fn dup(level1: ExactSet, level2: ExactSet) -> Self {
        ExactSet::Dup(Box::new(level1), Box::new(level2))
    }

    fn kind(&self) -> &'static str {
        match self {
            ExactSet::Linear(_) => "linear",
            ExactSet::Seq(_) => "sequence",
            ExactSet::Dup(..) => "duplicate",
            ExactSet::Sum(_) => "sum",
        }
    }

    fn zip(&self, other: &ExactSet, op: Op) -> Result<ExactSet> {
        Ok(match (self, other) {
            (ExactSet::Linear(a), ExactSet::Linear(b)) => ExactSet::Linear(match op {
                Op::Union => a.union(b),
                Op::Intersect => a.intersect(b),
                Op::Difference => a.difference(b),
            }),
            (ExactSet::Seq(a), ExactSet::Seq(b)) => ExactSet::Seq(match op {
                Op::Union => a.union(b),
                Op::Intersect => a.intersect(b),
                Op::Difference => a.difference(b),
            }),
            (ExactSet::Dup(a1, a2), ExactSet::Dup(b1, b2)) => ExactSet::dup(a1.zip(b1, op)?, a2.zip(b2, op)?),
            (ExactSet::Sum(a), ExactSet::Sum(b)) if a.len() == b.len() => {
                ExactSet::Sum(a.iter().zip(b).map(|(x, y)| x.zip(y, op)).collect::<Result<_>>()?)
            }
            _ => {
                return Err(TopoError::CarrierMismatch(format!("{} vs {}", self.kind(), other.kind())));
            }
        })
    }

    pub fn union(&self, other: &ExactSet) -> Result<ExactSet> {
        self.zip(other, Op::Union)
    }

    pub fn intersect(&self, other: &ExactSet) -> Result<ExactSet> {
        self.zip(other, Op::Intersect)
    }

    pub fn difference(&self, other: &ExactSet) -> Result<ExactSet> {
        self.zip(other, Op::Difference)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (ExactSet::Linear(s), Point::Real(x)) => s.contains(x),
            (ExactSet::Seq(s), Point::Seq(x)) => s.contains(x),
            (ExactSet::Dup(a, _), Point::Tagged(x, 1)) => a.contains(x),
            (ExactSet::Dup(_, b), Point::Tagged(x, 2)) => b.contains(x),
            (ExactSet::Sum(parts), Point::Tagged(x, i)) => parts.get(*i as usize).is_some_and(|s| s.contains(x)),
            _ => false,
        }
    }

    /// Emptiness of the represented set of points. Exact for every variant;
    /// branch spaces add their own validity constraint on top.
    pub fn is_empty(&self) -> bool {
        match self {
            ExactSet::Linear(s) => s.is_empty(),
            ExactSet::Seq(s) => s.is_empty(),
            ExactSet::Dup(a, b) => a.is_empty() && b.is_empty(),
            ExactSet::Sum(parts) => parts.iter().all(ExactSet::is_empty),
        }
    }

    pub fn as_linear(&self) -> Option<&LinearSet> {
        match self {
            ExactSet::Linear(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&SeqSet> {
        match self {
            ExactSet::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub(crate) fn parse_from(cur: &mut Cursor<'_>) -> std::result::Result<ExactSet, ParseError> {
        if cur.eat_str("seq:") {
            return Ok(ExactSet::Seq(SeqSet::parse_body(cur)?));
        }
        if cur.eat_str("dup(") {
            let a = ExactSet::parse_from(cur)?;
            cur.expect(';')?;
            let b = ExactSet::parse_from(cur)?;
            cur.expect(')')?;
            return Ok(ExactSet::dup(a, b));
        }
        if cur.eat_str("sum(") {
            let mut parts = vec![ExactSet::parse_from(cur)?];
            while cur.eat(';') {
                parts.push(ExactSet::parse_from(cur)?);
            }
            cur.expect(')')?;
            return Ok(ExactSet::Sum(parts));
        }
        Ok(ExactSet::Linear(LinearSet::parse_from(cur)?))
    }
}

#[derive(Clone, Copy)]
enum Op {
    Union,
    Intersect,
    Difference,
}

impl fmt::Display for ExactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactSet::Linear(s) => write!(f, "{}", s),
            ExactSet::Seq(s) => write!(f, "seq:{}", s),
            ExactSet::Dup(a, b) => write!(f, "dup({}; {})", a, b),
            ExactSet::Sum(parts) => {
                let items: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "sum({})", items.join("; "))
            }
        }
    }
}

impl FromStr for ExactSet {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        let mut cur = Cursor::new(s);
        let out = ExactSet::parse_from(&mut cur)?;
        cur.finish()?;
        Ok(out)
    }
}

impl serde::Serialize for ExactSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_roundtrip() {
        for s in [
            "dup(rational:(0,1) \\ {1/2}; rational:(0,1))",
            "sum(dyadic:(0,1); nondyadic:[1/3,1))",
            "seq:+[] -[0]",
            "sum(empty; seq:-[] +[2])",
        ] {
            let a: ExactSet = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let a: ExactSet = "rational:(0,1)".parse().unwrap();
        let b: ExactSet = "seq:+[]".parse().unwrap();
        assert!(matches!(a.union(&b), Err(TopoError::CarrierMismatch(_))));
    }
}
