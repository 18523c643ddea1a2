//! Subsets of the space of eventually constant sequences of naturals.
//!
//! The clopen part is a finite decision tree over prefixes; finitely many
//! points may be added to or removed from it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::ParseError;
use crate::parse::Cursor;
use crate::point::{Point, SeqPoint};

/// A node answers `default` for every next entry not listed in `children`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CylTree {
    default: bool,
    children: BTreeMap<u64, CylTree>,
}

impl CylTree {
    pub fn leaf(v: bool) -> Self {
        CylTree { default: v, children: BTreeMap::new() }
    }

    /// The cylinder of all sequences starting with `s`.
    pub fn cylinder(s: &[u64]) -> Self {
        let mut t = CylTree::leaf(false);
        t.assign(s, true);
        t
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn default_value(&self) -> bool {
        self.default
    }

    pub fn children(&self) -> impl Iterator<Item = (u64, &CylTree)> {
        self.children.iter().map(|(k, v)| (*k, v))
    }

    /// Replaces the subtree at `s` by the constant `v`.
    pub fn assign(&mut self, s: &[u64], v: bool) {
        match s.split_first() {
            None => *self = CylTree::leaf(v),
            Some((k, rest)) => {
                let d = self.default;
                self.children.entry(*k).or_insert_with(|| CylTree::leaf(d)).assign(rest, v);
                self.prune();
            }
        }
    }

    fn prune(&mut self) {
        let d = self.default;
        self.children.retain(|_, c| !(c.is_leaf() && c.default == d));
    }

    pub fn eval(&self, x: &SeqPoint) -> bool {
        let mut node = self;
        let mut i = 0;
        while let Some(c) = node.children.get(&x.at(i)) {
            node = c;
            i += 1;
        }
        node.default
    }

    /// Value on the whole cylinder `[s]` if it is constant there.
    pub fn constant_on(&self, s: &[u64]) -> Option<bool> {
        let mut node = self;
        for k in s {
            match node.children.get(k) {
                Some(c) => node = c,
                None => return Some(node.default),
            }
        }
        node.is_leaf().then_some(node.default)
    }

    pub fn combine(a: &CylTree, b: &CylTree, f: &impl Fn(bool, bool) -> bool) -> CylTree {
        let mut out = CylTree::leaf(f(a.default, b.default));
        let keys: BTreeSet<u64> = a.children.keys().chain(b.children.keys()).copied().collect();
        let la = CylTree::leaf(a.default);
        let lb = CylTree::leaf(b.default);
        for k in keys {
            let ca = a.children.get(&k).unwrap_or(&la);
            let cb = b.children.get(&k).unwrap_or(&lb);
            out.children.insert(k, CylTree::combine(ca, cb, f));
        }
        out.prune();
        out
    }

    pub fn negate(&self) -> CylTree {
        CylTree {
            default: !self.default,
            children: self.children.iter().map(|(k, c)| (*k, c.negate())).collect(),
        }
    }

    /// Normalized trees are empty exactly when they are the `false` leaf,
    /// because a `true` default covers infinitely many branches.
    pub fn is_empty(&self) -> bool {
        self.is_leaf() && !self.default
    }

    pub fn depth(&self) -> usize {
        self.children.values().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    /// Sample sequences inside the tree: for every node with a true
    /// default, a few fresh next entries followed by constant tails.
    pub fn candidates(&self, per_node: usize) -> Vec<SeqPoint> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect(&mut path, per_node, &mut out);
        out
    }

    fn collect(&self, path: &mut Vec<u64>, per_node: usize, out: &mut Vec<SeqPoint>) {
        if self.default {
            let mut k = 0u64;
            let mut taken = 0;
            while taken < per_node {
                if !self.children.contains_key(&k) {
                    let mut p = path.clone();
                    p.push(k);
                    out.push(SeqPoint::new(p.clone(), 0));
                    if taken + 1 < per_node {
                        out.push(SeqPoint::new(p, k + 1));
                        taken += 1;
                    }
                    taken += 1;
                }
                k += 1;
            }
        }
        for (k, c) in &self.children {
            path.push(*k);
            c.collect(path, per_node, out);
            path.pop();
        }
    }

    fn write_signed(&self, parent: Option<bool>, path: &mut Vec<u64>, out: &mut Vec<String>) {
        if parent != Some(self.default) {
            let body: Vec<String> = path.iter().map(u64::to_string).collect();
            out.push(format!("{}[{}]", if self.default { '+' } else { '-' }, body.join(",")));
        }
        for (k, c) in &self.children {
            path.push(*k);
            c.write_signed(Some(self.default), path, out);
            path.pop();
        }
    }
}

impl fmt::Display for CylTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        self.write_signed(None, &mut Vec::new(), &mut items);
        f.write_str(&items.join(" "))
    }
}

/// Clopen tree part plus finite exceptions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SeqSet {
    tree: CylTree,
    added: BTreeSet<SeqPoint>,
    removed: BTreeSet<SeqPoint>,
}

impl SeqSet {
    pub fn from_tree(tree: CylTree) -> Self {
        SeqSet { tree, added: BTreeSet::new(), removed: BTreeSet::new() }
    }

    pub fn new(tree: CylTree, added: impl IntoIterator<Item = SeqPoint>, removed: impl IntoIterator<Item = SeqPoint>) -> Self {
        let added = added.into_iter().filter(|p| !tree.eval(p)).collect();
        let removed = removed.into_iter().filter(|p| tree.eval(p)).collect();
        SeqSet { tree, added, removed }
    }

    pub fn empty() -> Self {
        Self::from_tree(CylTree::leaf(false))
    }

    pub fn full() -> Self {
        Self::from_tree(CylTree::leaf(true))
    }

    pub fn cylinder(s: &[u64]) -> Self {
        Self::from_tree(CylTree::cylinder(s))
    }

    pub fn points(pts: impl IntoIterator<Item = SeqPoint>) -> Self {
        Self::new(CylTree::leaf(false), pts, [])
    }

    pub fn tree(&self) -> &CylTree {
        &self.tree
    }

    pub fn added(&self) -> impl Iterator<Item = &SeqPoint> {
        self.added.iter()
    }

    pub fn removed(&self) -> impl Iterator<Item = &SeqPoint> {
        self.removed.iter()
    }

    pub fn contains(&self, x: &SeqPoint) -> bool {
        if self.tree.eval(x) {
            !self.removed.contains(x)
        } else {
            self.added.contains(x)
        }
    }

    pub fn combine(&self, other: &SeqSet, f: impl Fn(bool, bool) -> bool) -> SeqSet {
        let tree = CylTree::combine(&self.tree, &other.tree, &f);
        let special: BTreeSet<&SeqPoint> =
            self.added.iter().chain(&self.removed).chain(&other.added).chain(&other.removed).collect();
        let mut added = BTreeSet::new();
        let mut removed = BTreeSet::new();
        for p in special {
            let inside = f(self.contains(p), other.contains(p));
            match (inside, tree.eval(p)) {
                (true, false) => {
                    added.insert(p.clone());
                }
                (false, true) => {
                    removed.insert(p.clone());
                }
                _ => {}
            }
        }
        SeqSet { tree, added, removed }
    }

    pub fn union(&self, o: &SeqSet) -> SeqSet {
        self.combine(o, |a, b| a || b)
    }

    pub fn intersect(&self, o: &SeqSet) -> SeqSet {
        self.combine(o, |a, b| a && b)
    }

    pub fn difference(&self, o: &SeqSet) -> SeqSet {
        self.combine(o, |a, b| a && !b)
    }

    pub fn complement(&self) -> SeqSet {
        SeqSet { tree: self.tree.negate(), added: self.removed.clone(), removed: self.added.clone() }
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty() && self.added.is_empty()
    }

    pub fn closure(&self) -> SeqSet {
        SeqSet { tree: self.tree.clone(), added: self.added.clone(), removed: BTreeSet::new() }
    }

    pub fn interior(&self) -> SeqSet {
        SeqSet { tree: self.tree.clone(), added: BTreeSet::new(), removed: self.removed.clone() }
    }

    pub fn derived(&self) -> SeqSet {
        SeqSet::from_tree(self.tree.clone())
    }

    pub fn candidates(&self, per_node: usize) -> Vec<SeqPoint> {
        let mut out: Vec<SeqPoint> = self.added.iter().cloned().collect();
        out.extend(self.tree.candidates(per_node).into_iter().filter(|p| !self.removed.contains(p)));
        out
    }

    pub(crate) fn parse_body(cur: &mut Cursor<'_>) -> Result<SeqSet, ParseError> {
        let mut tree = CylTree::leaf(false);
        loop {
            cur.skip_ws();
            let v = match cur.peek() {
                Some('+') => true,
                Some('-') => false,
                _ => break,
            };
            cur.eat(if v { '+' } else { '-' });
            cur.expect('[')?;
            let mut path = Vec::new();
            if !cur.eat(']') {
                loop {
                    let tok = cur.take_while(|c| c.is_ascii_digit());
                    path.push(tok.parse::<u64>().map_err(|_| cur.error("bad cylinder entry"))?);
                    if cur.eat(']') {
                        break;
                    }
                    cur.expect(',')?;
                }
            }
            tree.assign(&path, v);
        }
        let mut added = Vec::new();
        let mut removed = Vec::new();
        if cur.eat('u') {
            added = parse_seq_list(cur)?;
        }
        if cur.eat('\\') {
            removed = parse_seq_list(cur)?;
        }
        Ok(SeqSet::new(tree, added, removed))
    }
}

fn parse_seq_list(cur: &mut Cursor<'_>) -> Result<Vec<SeqPoint>, ParseError> {
    cur.expect('{')?;
    let mut out = Vec::new();
    if cur.eat('}') {
        return Ok(out);
    }
    loop {
        match Point::parse_from(cur)? {
            Point::Seq(s) => out.push(s),
            other => return Err(ParseError::new(format!("expected a sequence, got {}", other))),
        }
        if cur.eat('}') {
            return Ok(out);
        }
        cur.expect(',')?;
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, pts: &BTreeSet<SeqPoint>) -> fmt::Result {
    let items: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
    write!(f, "{{{}}}", items.join(","))
}

impl fmt::Display for SeqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tree)?;
        if !self.added.is_empty() {
            f.write_str(" u ")?;
            write_list(f, &self.added)?;
        }
        if !self.removed.is_empty() {
            f.write_str(" \\ ")?;
            write_list(f, &self.removed)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_normal_form_is_unique() {
        let mut a = CylTree::leaf(true);
        a.assign(&[0], false);
        a.assign(&[0], true);
        assert_eq!(a, CylTree::leaf(true));
        let b = CylTree::combine(&CylTree::cylinder(&[1]), &CylTree::cylinder(&[1, 2]), &|x, y| x || y);
        assert_eq!(b, CylTree::cylinder(&[1]));
    }

    #[test]
    fn closure_and_interior() {
        let s = SeqSet::new(CylTree::cylinder(&[0]), [SeqPoint::new(vec![5], 0)], [SeqPoint::new(vec![0, 1], 0)]);
        assert_eq!(s.closure(), SeqSet::new(CylTree::cylinder(&[0]), [SeqPoint::new(vec![5], 0)], []));
        assert_eq!(s.interior(), SeqSet::new(CylTree::cylinder(&[0]), [], [SeqPoint::new(vec![0, 1], 0)]));
    }

    #[test]
    fn text_roundtrip() {
        let s = SeqSet::new(CylTree::cylinder(&[0, 3]).negate(), [], [SeqPoint::new(vec![1], 0)]);
        let txt = s.to_string();
        assert_eq!(txt, "+[] -[0,3] \\ {<1;0>}");
        let mut c = Cursor::new(&txt);
        assert_eq!(SeqSet::parse_body(&mut c).unwrap(), s);
    }
}
