//! Subsets of linear carriers.
//!
//! A [`Pattern`] is a step function on the field line: finitely many
//! breakpoints carrying their own truth value and open gaps in between.
//! Intersected with a trace it denotes a subset of that trace. A
//! [`LinearSet`] keeps one pattern per trace atom.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ParseError;
use crate::field::FieldPoint;
use crate::parse::Cursor;
use crate::trace::{Trace, TraceKind};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pattern {
    breaks: Vec<(FieldPoint, bool)>,
    gaps: Vec<bool>,
}

/// One open region of a pattern: `(l, r)` with `None` for an infinite end.
pub struct Region<'a> {
    pub left: Option<&'a FieldPoint>,
    pub right: Option<&'a FieldPoint>,
    pub value: bool,
}

impl Pattern {
    pub fn constant(v: bool) -> Self {
        Pattern { breaks: Vec::new(), gaps: vec![v] }
    }

    pub fn empty() -> Self {
        Self::constant(false)
    }

    pub fn full() -> Self {
        Self::constant(true)
    }

    /// Interval with optional finite ends `(point, closed)`.
    pub fn interval(left: Option<(FieldPoint, bool)>, right: Option<(FieldPoint, bool)>) -> Self {
        match (left, right) {
            (None, None) => Self::full(),
            (Some((a, ca)), None) => Pattern { breaks: vec![(a, ca)], gaps: vec![false, true] },
            (None, Some((b, cb))) => Pattern { breaks: vec![(b, cb)], gaps: vec![true, false] },
            (Some((a, ca)), Some((b, cb))) => {
                if a > b {
                    Self::empty()
                } else if a == b {
                    if ca && cb {
                        Self::points(std::iter::once(a))
                    } else {
                        Self::empty()
                    }
                } else {
                    Pattern { breaks: vec![(a, ca), (b, cb)], gaps: vec![false, true, false] }
                }
            }
        }
    }

    pub fn open(a: FieldPoint, b: FieldPoint) -> Self {
        Self::interval(Some((a, false)), Some((b, false)))
    }

    pub fn points(pts: impl IntoIterator<Item = FieldPoint>) -> Self {
        let mut v: Vec<FieldPoint> = pts.into_iter().collect();
        v.sort();
        v.dedup();
        let n = v.len();
        Pattern { breaks: v.into_iter().map(|x| (x, true)).collect(), gaps: vec![false; n + 1] }
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (&FieldPoint, bool)> {
        self.breaks.iter().map(|(x, v)| (x, *v))
    }

    pub fn regions(&self) -> impl Iterator<Item = Region<'_>> {
        (0..self.gaps.len()).map(move |i| Region {
            left: i.checked_sub(1).map(|j| &self.breaks[j].0),
            right: self.breaks.get(i).map(|b| &b.0),
            value: self.gaps[i],
        })
    }

    fn locate(&self, x: &FieldPoint) -> Result<usize, usize> {
        self.breaks.binary_search_by(|(b, _)| b.cmp(x))
    }

    /// Raw step-function value, ignoring trace membership.
    pub fn eval(&self, x: &FieldPoint) -> bool {
        match self.locate(x) {
            Ok(i) => self.breaks[i].1,
            Err(i) => self.gaps[i],
        }
    }

    pub fn gap_right_of(&self, x: &FieldPoint) -> bool {
        match self.locate(x) {
            Ok(i) => self.gaps[i + 1],
            Err(i) => self.gaps[i],
        }
    }

    pub fn gap_left_of(&self, x: &FieldPoint) -> bool {
        match self.locate(x) {
            Ok(i) | Err(i) => self.gaps[i],
        }
    }

    pub fn contains(&self, t: Trace, x: &FieldPoint) -> bool {
        t.contains(x) && self.eval(x)
    }

    /// Canonical form relative to a trace: breakpoints outside the trace
    /// carry `false` and survive only where the gap value changes; trace
    /// breakpoints survive unless they agree with both neighbours.
    pub fn normalize(self, t: Trace) -> Self {
        let mut breaks: Vec<(FieldPoint, bool)> = Vec::with_capacity(self.breaks.len());
        let mut gaps = vec![self.gaps[0]];
        for (i, (x, v)) in self.breaks.into_iter().enumerate() {
            let right = self.gaps[i + 1];
            let left = *gaps.last().unwrap();
            let v = v && t.contains(&x);
            let redundant = left == right && (!t.contains(&x) || v == left);
            if redundant {
                continue;
            }
            breaks.push((x, v));
            gaps.push(right);
        }
        Pattern { breaks, gaps }
    }

    /// Pointwise combination of several patterns; the result is not normalized.
    pub fn combine(pats: &[&Pattern], extra: &[FieldPoint], f: impl Fn(&[bool]) -> bool) -> Pattern {
        let mut pos: Vec<FieldPoint> = pats.iter().flat_map(|p| p.breaks.iter().map(|b| b.0.clone())).collect();
        pos.extend(extra.iter().cloned());
        pos.sort();
        pos.dedup();
        let mut vals = vec![false; pats.len()];
        let mut gaps = Vec::with_capacity(pos.len() + 1);
        for (j, p) in pats.iter().enumerate() {
            vals[j] = p.gaps[0];
        }
        gaps.push(f(&vals));
        let mut breaks = Vec::with_capacity(pos.len());
        for x in pos {
            for (j, p) in pats.iter().enumerate() {
                vals[j] = p.eval(&x);
            }
            let v = f(&vals);
            for (j, p) in pats.iter().enumerate() {
                vals[j] = p.gap_right_of(&x);
            }
            gaps.push(f(&vals));
            breaks.push((x, v));
        }
        Pattern { breaks, gaps }
    }

    pub fn union(&self, other: &Pattern, t: Trace) -> Pattern {
        Self::combine(&[self, other], &[], |v| v[0] || v[1]).normalize(t)
    }

    pub fn intersect(&self, other: &Pattern, t: Trace) -> Pattern {
        Self::combine(&[self, other], &[], |v| v[0] && v[1]).normalize(t)
    }

    pub fn difference(&self, other: &Pattern, t: Trace) -> Pattern {
        Self::combine(&[self, other], &[], |v| v[0] && !v[1]).normalize(t)
    }

    pub fn complement(&self, t: Trace) -> Pattern {
        Pattern {
            breaks: self.breaks.iter().map(|(x, v)| (x.clone(), !v)).collect(),
            gaps: self.gaps.iter().map(|v| !v).collect(),
        }
        .normalize(t)
    }

    /// Does the pattern select no point of the trace?
    pub fn is_empty(&self, t: Trace) -> bool {
        !self.breaks.iter().any(|(x, v)| *v && t.contains(x))
            && !self.regions().any(|r| r.value && t.meets_open(r.left, r.right))
    }

    pub fn is_trivially_empty(&self) -> bool {
        self.breaks.is_empty() && !self.gaps[0]
    }

    /// Up to `per_region` trace points from every selected region, plus the
    /// selected breakpoints.
    pub fn candidates(&self, t: Trace, per_region: usize) -> Vec<FieldPoint> {
        let mut out: Vec<FieldPoint> =
            self.breaks.iter().filter(|(x, v)| *v && t.contains(x)).map(|b| b.0.clone()).collect();
        for r in self.regions().filter(|r| r.value) {
            out.extend(t.points_in(r.left, r.right, per_region));
        }
        out
    }

    pub(crate) fn write_body(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut items: Vec<String> = Vec::new();
        let mut added: Vec<&FieldPoint> = Vec::new();
        let mut removed: Vec<&FieldPoint> = Vec::new();
        let n = self.breaks.len();
        let mut i = 0;
        while i <= n {
            if !self.gaps[i] {
                if i < n && self.breaks[i].1 && (i + 1 > n || !self.gaps[i + 1]) {
                    added.push(&self.breaks[i].0);
                }
                i += 1;
                continue;
            }
            // run of true gaps starting at gap i
            let start = i;
            let mut end = i;
            while end < n && self.gaps[end + 1] {
                if !self.breaks[end].1 {
                    removed.push(&self.breaks[end].0);
                }
                end += 1;
            }
            let left = match start {
                0 => "(-inf".to_string(),
                s => {
                    let (x, v) = &self.breaks[s - 1];
                    format!("{}{}", if *v { '[' } else { '(' }, x)
                }
            };
            let right = if end == n {
                "+inf)".to_string()
            } else {
                let (x, v) = &self.breaks[end];
                format!("{}{}", x, if *v { ']' } else { ')' })
            };
            items.push(format!("{},{}", left, right));
            i = end + 1;
        }
        if !added.is_empty() {
            items.push(format!("{{{}}}", join(&added)));
        }
        if items.is_empty() {
            items.push("{}".to_string());
        }
        write!(f, "{}", items.join(" u "))?;
        if !removed.is_empty() {
            write!(f, " \\ {{{}}}", join(&removed))?;
        }
        Ok(())
    }

    pub(crate) fn parse_body(cur: &mut Cursor<'_>, t: Trace) -> Result<Pattern, ParseError> {
        let mut acc = Pattern::empty();
        loop {
            cur.skip_ws();
            let item = match cur.peek() {
                Some('{') => Pattern::points(parse_point_list(cur)?),
                Some('(') | Some('[') => parse_interval(cur)?,
                _ => return Err(cur.error("expected interval or point set")),
            };
            acc = Pattern::combine(&[&acc, &item], &[], |v| v[0] || v[1]);
            if !eat_word(cur, "u") {
                break;
            }
        }
        if cur.eat('\\') {
            let rem = Pattern::points(parse_point_list(cur)?);
            acc = Pattern::combine(&[&acc, &rem], &[], |v| v[0] && !v[1]);
        }
        Ok(acc.normalize(t))
    }
}

fn eat_word(cur: &mut Cursor<'_>, w: &str) -> bool {
    cur.skip_ws();
    let rest = cur.rest();
    if rest.starts_with(w) && !rest[w.len()..].starts_with(|c: char| c.is_alphanumeric()) {
        cur.eat_str(w)
    } else {
        false
    }
}

fn join(pts: &[&FieldPoint]) -> String {
    pts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_number(cur: &mut Cursor<'_>) -> Result<FieldPoint, ParseError> {
    let tok = cur.take_while(|c| c.is_ascii_digit() || "/+-r*".contains(c));
    tok.parse()
}

fn parse_point_list(cur: &mut Cursor<'_>) -> Result<Vec<FieldPoint>, ParseError> {
    cur.expect('{')?;
    let mut out = Vec::new();
    if cur.eat('}') {
        return Ok(out);
    }
    loop {
        out.push(parse_number(cur)?);
        if cur.eat('}') {
            return Ok(out);
        }
        cur.expect(',')?;
    }
}

fn parse_interval(cur: &mut Cursor<'_>) -> Result<Pattern, ParseError> {
    let lc = if cur.eat('[') {
        true
    } else {
        cur.expect('(')?;
        false
    };
    let left = if cur.eat_str("-inf") { None } else { Some((parse_number(cur)?, lc)) };
    cur.expect(',')?;
    let right_num = if cur.eat_str("+inf") { None } else { Some(parse_number(cur)?) };
    let rc = if cur.eat(']') {
        true
    } else {
        cur.expect(')')?;
        false
    };
    Ok(Pattern::interval(left, right_num.map(|x| (x, rc))))
}

/// Topology carried by a linear space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum LineTopology {
    /// Subspace topology from the reals.
    Order,
    Discrete,
    /// Order topology refined at 0 by removing the harmonic atom.
    KTopology,
}

/// A subset of a linear carrier: one nonempty pattern per atom.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LinearSet {
    parts: BTreeMap<Trace, Pattern>,
}

impl LinearSet {
    pub fn empty() -> Self {
        LinearSet::default()
    }

    pub fn from_parts(parts: impl IntoIterator<Item = (Trace, Pattern)>) -> Self {
        let mut out = LinearSet::empty();
        for (t, p) in parts {
            let p = match out.parts.remove(&t) {
                Some(q) => q.union(&p, t),
                None => p.normalize(t),
            };
            out.insert(t, p);
        }
        out
    }

    pub fn on_atoms(atoms: &[Trace], p: &Pattern) -> Self {
        Self::from_parts(atoms.iter().map(|&t| (t, p.clone())))
    }

    fn insert(&mut self, t: Trace, p: Pattern) {
        if !p.is_empty(t) {
            self.parts.insert(t, p);
        }
    }

    pub fn part(&self, t: Trace) -> Option<&Pattern> {
        self.parts.get(&t)
    }

    pub fn parts(&self) -> impl Iterator<Item = (Trace, &Pattern)> {
        self.parts.iter().map(|(t, p)| (*t, p))
    }

    pub fn traces(&self) -> impl Iterator<Item = Trace> + '_ {
        self.parts.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &FieldPoint) -> bool {
        self.parts.iter().any(|(t, p)| p.contains(*t, x))
    }

    fn zip(&self, other: &LinearSet, f: impl Fn(&Pattern, &Pattern, Trace) -> Pattern) -> LinearSet {
        let mut out = LinearSet::empty();
        let empty = Pattern::empty();
        let keys: std::collections::BTreeSet<Trace> = self.traces().chain(other.traces()).collect();
        for t in keys {
            let a = self.parts.get(&t).unwrap_or(&empty);
            let b = other.parts.get(&t).unwrap_or(&empty);
            out.insert(t, f(a, b, t));
        }
        out
    }

    pub fn union(&self, other: &LinearSet) -> LinearSet {
        self.zip(other, |a, b, t| a.union(b, t))
    }

    pub fn intersect(&self, other: &LinearSet) -> LinearSet {
        self.zip(other, |a, b, t| a.intersect(b, t))
    }

    pub fn difference(&self, other: &LinearSet) -> LinearSet {
        self.zip(other, |a, b, t| a.difference(b, t))
    }

    pub fn complement(&self, atoms: &[Trace]) -> LinearSet {
        let mut out = LinearSet::empty();
        for &t in atoms {
            let p = self.parts.get(&t).map_or_else(Pattern::full, |p| p.complement(t));
            out.insert(t, p);
        }
        out
    }

    /// Restricts the set to the given atoms.
    pub fn restrict(&self, atoms: &[Trace]) -> LinearSet {
        LinearSet { parts: self.parts.iter().filter(|(t, _)| atoms.contains(t)).map(|(t, p)| (*t, p.clone())).collect() }
    }

    /// Closure (`derived == false`) or derived set (`derived == true`) in
    /// the linear space with the given atoms and topology.
    pub fn closure_like(&self, atoms: &[Trace], topo: LineTopology, derived: bool) -> LinearSet {
        if topo == LineTopology::Discrete {
            return if derived { LinearSet::empty() } else { self.clone() };
        }
        let empty = Pattern::empty();
        let pats: Vec<(Trace, &Pattern)> = atoms.iter().map(|&t| (t, self.parts.get(&t).unwrap_or(&empty))).collect();
        let mut pos: Vec<FieldPoint> = pats.iter().flat_map(|(_, p)| p.breaks.iter().map(|b| b.0.clone())).collect();
        if atoms.iter().any(|t| t.kind() == TraceKind::Fan) {
            pos.push(FieldPoint::zero());
        }
        pos.sort();
        pos.dedup();
        let side_acc: Vec<bool> = pos
            .iter()
            .map(|x| {
                pats.iter().any(|(t, p)| {
                    let k_blocked = topo == LineTopology::KTopology && *t == Trace::Harmonic && x.is_zero();
                    (p.gap_right_of(x) && t.accumulates_right(x) && !k_blocked)
                        || (p.gap_left_of(x) && t.accumulates_left(x))
                })
            })
            .collect();
        let dense_gap = |idx: usize| -> bool {
            pats.iter().any(|(t, p)| {
                t.kind() == TraceKind::Dense
                    && if idx == 0 { p.gaps[0] } else { p.gap_right_of(&pos[idx - 1]) }
            })
        };
        let region_dense: Vec<bool> = (0..=pos.len()).map(dense_gap).collect();
        let mut out = LinearSet::empty();
        for (t, own) in &pats {
            let mut gaps = Vec::with_capacity(pos.len() + 1);
            let mut breaks = Vec::with_capacity(pos.len());
            gaps.push(region_dense[0] || (!derived && own.gaps[0]));
            for (i, x) in pos.iter().enumerate() {
                breaks.push((x.clone(), side_acc[i] || (!derived && own.eval(x))));
                gaps.push(region_dense[i + 1] || (!derived && own.gap_right_of(x)));
            }
            out.insert(*t, Pattern { breaks, gaps }.normalize(*t));
        }
        out
    }

    pub fn candidates(&self, per_region: usize) -> Vec<FieldPoint> {
        self.parts.iter().flat_map(|(t, p)| p.candidates(*t, per_region)).collect()
    }

    pub(crate) fn parse_from(cur: &mut Cursor<'_>) -> Result<LinearSet, ParseError> {
        if cur.eat_str("empty") {
            return Ok(LinearSet::empty());
        }
        let mut parts = Vec::new();
        loop {
            let name = cur.take_while(|c| c.is_ascii_alphanumeric());
            let t: Trace = name.parse()?;
            cur.expect(':')?;
            parts.push((t, Pattern::parse_body(cur, t)?));
            if !cur.eat('|') {
                break;
            }
        }
        Ok(LinearSet::from_parts(parts))
    }
}

impl fmt::Display for LinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("empty");
        }
        for (i, (t, p)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}:", t)?;
            p.write_body(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldPoint {
        FieldPoint::from_ratio(n, d)
    }

    fn parse(s: &str) -> LinearSet {
        let mut c = Cursor::new(s);
        let out = LinearSet::parse_from(&mut c).unwrap();
        c.finish().unwrap();
        out
    }

    #[test]
    fn complement_of_unit_interval() {
        let a = parse("rational:(0,1)");
        assert_eq!(a.complement(&[Trace::Rational]).to_string(), "rational:(-inf,0] u [1,+inf)");
    }

    #[test]
    fn readding_removed_point() {
        let a = parse("rational:(0,1) \\ {1/2}");
        let b = parse("rational:{1/2}");
        assert_eq!(a.union(&b), parse("rational:(0,1)"));
    }

    #[test]
    fn dyadic_interval_intersection() {
        let a = parse("dyadic:(0,1)");
        let b = parse("dyadic:(1/2,2)");
        assert_eq!(a.intersect(&b).to_string(), "dyadic:(1/2,1)");
    }

    #[test]
    fn text_roundtrip() {
        for s in [
            "rational:(-inf,0] u [1,+inf)",
            "dyadic:(0,1/3) u {5}",
            "rational:(0,1) \\ {1/2,3/4}",
            "field:(r2,2] | rational:{}",
            "empty",
        ] {
            let a = parse(s);
            let again = parse(&a.to_string());
            assert_eq!(a, again, "{}", s);
        }
        assert_eq!(parse("dyadic:(0,1/3]").to_string(), "dyadic:(0,1/3)");
    }

    #[test]
    fn closure_in_rational_line() {
        let atoms = [Trace::Rational];
        let a = parse("rational:(0,1)");
        assert_eq!(a.closure_like(&atoms, LineTopology::Order, false).to_string(), "rational:[0,1]");
    }

    #[test]
    fn harmonic_accumulates_at_zero() {
        let atoms = [Trace::Harmonic, Trace::NonHarmonic];
        let k = LinearSet::from_parts([(Trace::Harmonic, Pattern::full())]);
        let acc = k.closure_like(&atoms, LineTopology::Order, true);
        assert_eq!(acc.to_string(), "nonharmonic:{0}");
        let acc_k = k.closure_like(&atoms, LineTopology::KTopology, true);
        assert!(acc_k.is_empty());
    }

    #[test]
    fn m1_only_zero_is_non_isolated() {
        let atoms = [Trace::M1];
        let all = LinearSet::from_parts([(Trace::M1, Pattern::full())]);
        let acc = all.closure_like(&atoms, LineTopology::Order, true);
        assert!(acc.contains(&q(0, 1)));
        assert!(!acc.contains(&q(3, 2)));
    }
}
