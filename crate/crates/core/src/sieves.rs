//! Labeled trees over a space: web and sieve axioms, completeness and the
//! μ conditions, the branch space Σ with its ultrametric, the canonical
//! map, and sieves built from continuous surjections.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cylinder::SeqSet;
use crate::error::{Result, TopoError};
use crate::field::{rat, FieldPoint, Rat};
use crate::linear::{LinearSet, Pattern};
use crate::maps::{CMap, MapKind, MapOracle, Outcome, Verdict};
use crate::point::{Point, SeqPoint};
use crate::set::ExactSet;
use crate::space::{BranchTree, Space};

/// Cofinal branches are eventually constant index sequences.
pub type Branch = SeqPoint;

/// Explicit children materialized per node by the bounded checkers.
pub const EXPLICIT_CHILDREN: u64 = 3;
const NODE_BUDGET: usize = 60_000;

#[derive(Clone, Debug)]
enum TreeKind {
    /// `φ(s) = [s]` on the sequence space.
    Cylinder,
    /// Roots `{q}` over the rationals in height order, constant chains.
    Singletons,
    /// Main chain `((−r,r) ∪ (√2−r,√2+r)) ∩ ℚ` with `r = 2^{-(k+1)}`, plus
    /// singleton chains over each ring between consecutive chain labels.
    NonMu,
    /// Open dyadic intervals: roots `(z, z+1)`, two halves per node.
    Bisection,
    /// Chains of cylinders `[s|1] ⊇ [s|2] ⊇ …` labeled by their images.
    Surjection(Box<CMap>),
    /// One root, one child per node, the same label throughout.
    Chain(ExactSet),
    /// Another tree with one node and its subtree removed.
    Pruned(Box<LabeledTree>, Vec<u64>),
}

#[derive(Clone, Debug)]
pub struct LabeledTree {
    pub name: String,
    pub space: Space,
    kind: TreeKind,
}

fn sqrt2() -> FieldPoint {
    FieldPoint::sqrt2()
}

fn real(q: Rat) -> Point {
    Point::Real(FieldPoint::rational(q))
}

/// The rationals of height `h = max(|p|, q)`, in increasing order.
fn height_layer(h: u64) -> Vec<Rat> {
    if h == 0 {
        return vec![Rat::zero()];
    }
    let h = h as i64;
    let mut out = Vec::new();
    for q in 1..=h {
        for p in -h..=h {
            if p != 0 && p.abs().max(q) == h && p.unsigned_abs().gcd(&(q as u64)) == 1 {
                out.push(rat(p, q));
            }
        }
    }
    out.sort();
    out
}

/// The `n`-th rational (from 0) in height order that passes `keep`.
fn nth_by_height(n: u64, keep: impl Fn(&Rat) -> bool) -> Rat {
    let mut seen = 0;
    for h in 0.. {
        for q in height_layer(h) {
            if keep(&q) {
                if seen == n {
                    return q;
                }
                seen += 1;
            }
        }
    }
    unreachable!("the rationals are infinite")
}

fn index_by_height(x: &Rat, keep: impl Fn(&Rat) -> bool) -> u64 {
    let h: u64 = if x.is_zero() {
        0
    } else {
        x.numer().abs().max(x.denom().clone()).try_into().unwrap_or(u64::MAX)
    };
    let mut count = 0;
    for g in 0..h {
        count += height_layer(g).iter().filter(|q| keep(q)).count() as u64;
    }
    count + height_layer(h).iter().filter(|q| keep(q) && *q < x).count() as u64
}

fn ceil(x: &FieldPoint) -> num_bigint::BigInt {
    -(-x).floor()
}

/// Integers `p` with `p/q` in the interval.
fn numerators(lo: &FieldPoint, lo_closed: bool, hi: &FieldPoint, hi_closed: bool, q: u64) -> (num_bigint::BigInt, num_bigint::BigInt) {
    let qq = Rat::from_integer(q.into());
    let (a, b) = (lo.scale(&qq), hi.scale(&qq));
    let first = if lo_closed && a.is_rational() && a.as_rational().is_some_and(|r| r.is_integer()) {
        a.floor()
    } else {
        a.floor() + 1
    };
    let last = if hi_closed && b.is_rational() && b.as_rational().is_some_and(|r| r.is_integer()) {
        b.floor()
    } else {
        ceil(&b) - 1
    };
    (first, last)
}

fn pow2(k: usize) -> Rat {
    Rat::new(One::one(), num_bigint::BigInt::one() << k)
}

/// Radius of the main chain label at main depth `i`.
fn chain_radius(i: usize) -> Rat {
    pow2(i + 1)
}

fn nonmu_label(i: usize) -> ExactSet {
    let r = FieldPoint::rational(chain_radius(i));
    let s2 = sqrt2();
    let near0 = Pattern::open(-&r, r.clone());
    let near2 = Pattern::open(&s2 - &r, &s2 + &r);
    ExactSet::Linear(LinearSet::on_atoms(&[crate::trace::Trace::Rational], &near0))
        .union(&ExactSet::Linear(LinearSet::on_atoms(&[crate::trace::Trace::Rational], &near2)))
        .expect("linear")
}

/// Pieces of `L_i ∖ L_{i+1}` in increasing order, each with closedness flags.
fn ring_pieces(i: usize) -> Vec<(FieldPoint, bool, FieldPoint, bool)> {
    let r = FieldPoint::rational(chain_radius(i));
    let h = FieldPoint::rational(chain_radius(i + 1));
    let s2 = sqrt2();
    vec![
        (-&r, false, -&h, true),
        (h.clone(), true, r.clone(), false),
        (&s2 - &r, false, &s2 - &h, true),
        (&s2 + &h, true, &s2 + &r, false),
    ]
}

/// Ring members ordered by denominator, then value; yields `(index, q)`.
fn ring_members(i: usize, mut visit: impl FnMut(u64, &Rat) -> bool) {
    let pieces = ring_pieces(i);
    let mut idx = 0;
    for q in 1u64.. {
        for (lo, lc, hi, hc) in &pieces {
            let (mut p, last) = numerators(lo, *lc, hi, *hc, q);
            while p <= last {
                if p.gcd(&q.into()).is_one() {
                    let x = Rat::new(p.clone(), q.into());
                    if !visit(idx, &x) {
                        return;
                    }
                    idx += 1;
                }
                p += 1;
            }
        }
    }
}

fn ring_member(i: usize, n: u64) -> Rat {
    let mut out = None;
    ring_members(i, |j, x| {
        if j == n {
            out = Some(x.clone());
            false
        } else {
            true
        }
    });
    out.expect("rings are infinite")
}

fn outside_first_label(q: &Rat) -> bool {
    !nonmu_label(0).contains(&real(q.clone()))
}

fn zigzag(k: u64) -> i64 {
    if k % 2 == 0 {
        (k / 2) as i64
    } else {
        -((k as i64 + 1) / 2)
    }
}

impl LabeledTree {
    pub fn cylinder() -> Self {
        LabeledTree { name: "cylinder".into(), space: Space::Seq, kind: TreeKind::Cylinder }
    }

    pub fn singletons(space: Space) -> Self {
        LabeledTree { name: "singletons".into(), space, kind: TreeKind::Singletons }
    }

    pub fn non_mu() -> Self {
        LabeledTree { name: "non_mu".into(), space: Space::rationals(), kind: TreeKind::NonMu }
    }

    pub fn bisection(space: Space) -> Self {
        LabeledTree { name: "bisection".into(), space, kind: TreeKind::Bisection }
    }

    pub fn chain(space: Space, label: ExactSet) -> Self {
        LabeledTree { name: format!("chain({})", label), space, kind: TreeKind::Chain(label) }
    }

    /// Removes the node at `path` together with its subtree.
    pub fn pruned(self, path: Vec<u64>) -> Self {
        let name = format!("{}-{:?}", self.name, path);
        let space = self.space.clone();
        LabeledTree { name, space, kind: TreeKind::Pruned(Box::new(self), path) }
    }

    /// The tree-file `kind` keyword of this tree.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            TreeKind::Cylinder => "cylinder",
            TreeKind::Singletons => "singletons",
            TreeKind::NonMu => "nonmu",
            TreeKind::Bisection => "bisection",
            TreeKind::Surjection(_) => "surjection",
            TreeKind::Chain(_) => "chain",
            TreeKind::Pruned(t, _) => t.kind_name(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Label of the node at `path`; the empty path is the whole space.
    /// `None` when there is no such node.
    pub fn label(&self, path: &[u64]) -> Option<ExactSet> {
        if path.is_empty() {
            return Some(self.space.full());
        }
        match &self.kind {
            TreeKind::Cylinder => Some(ExactSet::Seq(SeqSet::cylinder(path))),
            TreeKind::Singletons => {
                if path[1..].iter().any(|&k| k != 0) {
                    return None;
                }
                let q = nth_by_height(path[0], |_| true);
                self.space.singleton(&real(q)).ok()
            }
            TreeKind::NonMu => {
                let zeros = path.iter().take_while(|&&k| k == 0).count();
                if zeros == path.len() {
                    return Some(nonmu_label(zeros - 1));
                }
                if path[zeros + 1..].iter().any(|&k| k != 0) {
                    return None;
                }
                Some(self.space.singleton(&real(self.nonmu_singleton(zeros, path[zeros]))).ok()?)
            }
            TreeKind::Bisection => {
                if path[1..].iter().any(|&k| k > 1) {
                    return None;
                }
                let mut lo = Rat::from_integer(zigzag(path[0]).into());
                let mut width = Rat::one();
                for &b in &path[1..] {
                    width /= Rat::from_integer(2.into());
                    if b == 1 {
                        lo += &width;
                    }
                }
                let hi = &lo + &width;
                self.line_set(Pattern::open(FieldPoint::rational(lo), FieldPoint::rational(hi)))
            }
            TreeKind::Surjection(f) => f.image(&ExactSet::Seq(SeqSet::cylinder(path))).ok(),
            TreeKind::Chain(l) => path.iter().all(|&k| k == 0).then(|| l.clone()),
            TreeKind::Pruned(base, cut) => {
                if path.starts_with(cut) {
                    None
                } else {
                    base.label(path)
                }
            }
        }
    }

    fn line_set(&self, p: Pattern) -> Option<ExactSet> {
        self.space.base().as_line().map(|l| l.set(p))
    }

    /// Singleton child `j ≥ 1` below the main node at depth `zeros - 1`,
    /// or below the root when `zeros == 0`.
    fn nonmu_singleton(&self, zeros: usize, j: u64) -> Rat {
        if zeros == 0 {
            nth_by_height(j - 1, outside_first_label)
        } else {
            ring_member(zeros - 1, j - 1)
        }
    }

    /// Number of children of `path`; `None` for infinitely many.
    pub fn child_count(&self, path: &[u64]) -> Option<u64> {
        match &self.kind {
            TreeKind::Cylinder | TreeKind::Surjection(_) => None,
            TreeKind::Singletons => (!path.is_empty()).then_some(1),
            TreeKind::NonMu => {
                let main = path.iter().all(|&k| k == 0);
                (!main).then_some(1)
            }
            TreeKind::Bisection => (!path.is_empty()).then_some(2),
            TreeKind::Chain(_) => Some(1),
            TreeKind::Pruned(base, _) => base.child_count(path),
        }
    }

    /// Union of the labels of children with index `≥ n`, when the tree
    /// declares it.
    pub fn residual(&self, path: &[u64], n: u64) -> Option<ExactSet> {
        let label = self.label(path)?;
        if n == 0 {
            return Some(label);
        }
        if self.child_count(path).is_some_and(|c| n >= c) {
            return Some(self.space.empty());
        }
        match &self.kind {
            TreeKind::Cylinder => {
                let mut out = label;
                for k in 0..n {
                    let mut c = path.to_vec();
                    c.push(k);
                    out = out.difference(&ExactSet::Seq(SeqSet::cylinder(&c))).ok()?;
                }
                Some(out)
            }
            TreeKind::Singletons => {
                let firsts: Vec<Point> = (0..n).map(|k| real(nth_by_height(k, |_| true))).collect();
                label.difference(&self.space.points(&firsts).ok()?).ok()
            }
            TreeKind::NonMu => {
                let zeros = path.len();
                let ring = if zeros == 0 {
                    label.difference(&nonmu_label(0)).ok()?
                } else {
                    label.difference(&nonmu_label(zeros)).ok()?
                };
                let listed: Vec<Point> = (1..n).map(|j| real(self.nonmu_singleton(zeros, j))).collect();
                ring.difference(&self.space.points(&listed).ok()?).ok()
            }
            TreeKind::Surjection(f) => {
                let mut dom = ExactSet::Seq(SeqSet::cylinder(path));
                for k in 0..n {
                    let mut c = path.to_vec();
                    c.push(k);
                    dom = dom.difference(&ExactSet::Seq(SeqSet::cylinder(&c))).ok()?;
                }
                f.image(&dom).ok()
            }
            TreeKind::Bisection | TreeKind::Chain(_) => None,
            TreeKind::Pruned(base, _) => base.residual(path, n),
        }
    }

    /// The point certified to lie in every label along `b`.
    pub fn limit(&self, b: &Branch) -> Option<Point> {
        if !self.valid_branch(b) {
            return None;
        }
        match &self.kind {
            TreeKind::Cylinder => Some(Point::Seq(b.clone())),
            TreeKind::Singletons => Some(real(nth_by_height(b.at(0), |_| true))),
            TreeKind::NonMu => {
                let zeros = (0..b.prefix().len() + 1).take_while(|&i| b.at(i) == 0).count();
                if b.prefix().is_empty() && b.tail() == 0 {
                    return Some(real(Rat::zero()));
                }
                Some(real(self.nonmu_singleton(zeros, b.at(zeros))))
            }
            TreeKind::Bisection => None,
            TreeKind::Surjection(f) => f.eval(&Point::Seq(b.clone())).ok(),
            TreeKind::Chain(l) => self.space.candidates(l, 2).into_iter().next(),
            TreeKind::Pruned(base, _) => base.limit(b),
        }
    }

    /// Points outside the carrier that shrinking label pieces close in on.
    pub fn ghosts(&self, b: &Branch) -> Vec<FieldPoint> {
        match &self.kind {
            TreeKind::NonMu if b.prefix().is_empty() && b.tail() == 0 => vec![sqrt2()],
            TreeKind::Pruned(base, _) => base.ghosts(b),
            _ => Vec::new(),
        }
    }

    /// Depth from which the labels along `b` no longer change.
    pub fn stable_from(&self, b: &Branch) -> Option<usize> {
        match &self.kind {
            TreeKind::Singletons | TreeKind::Chain(_) => Some(1),
            TreeKind::NonMu => {
                let zeros = (0..b.prefix().len() + 1).take_while(|&i| b.at(i) == 0).count();
                (zeros <= b.prefix().len()).then_some(zeros + 1)
            }
            TreeKind::Pruned(base, _) => base.stable_from(b),
            _ => None,
        }
    }

    /// For the main chain: the singleton child of main node `k` that sits
    /// nearest the ghost, as `(child path, point)`.
    pub fn escape(&self, b: &Branch, k: usize) -> Option<(Vec<u64>, Point)> {
        match &self.kind {
            TreeKind::NonMu if b.prefix().is_empty() && b.tail() == 0 => {
                let near = FieldPoint::rational(Rat::one());
                let mut found = None;
                ring_members(k, |j, x| {
                    let d = &FieldPoint::rational(x.clone()) - &sqrt2();
                    let close = if d.sign() == crate::field::Sign::Negative { -&d } else { d };
                    if close < near {
                        found = Some((j, x.clone()));
                        false
                    } else {
                        true
                    }
                });
                let (j, x) = found?;
                let mut path = vec![0; k + 1];
                path.push(j + 1);
                Some((path, real(x)))
            }
            TreeKind::Pruned(base, cut) => base.escape(b, k).filter(|(p, _)| !p.starts_with(cut)),
            _ => None,
        }
    }

    fn explicit(&self, path: &[u64]) -> u64 {
        self.child_count(path).map_or(EXPLICIT_CHILDREN, |c| c.min(EXPLICIT_CHILDREN))
    }

    fn child_paths(&self, path: &[u64], n: u64) -> Vec<Vec<u64>> {
        (0..n)
            .map(|k| {
                let mut c = path.to_vec();
                c.push(k);
                c
            })
            .collect()
    }

    /// The branch that follows `path` and then child 0 forever.
    pub fn branch_through(path: &[u64]) -> Branch {
        SeqPoint::new(path.to_vec(), 0)
    }

    /// Branch of the singleton chain for `q` in a singleton sieve.
    pub fn singleton_branch(&self, q: &Rat) -> Option<Branch> {
        match &self.kind {
            TreeKind::Singletons => Some(SeqPoint::new(vec![index_by_height(q, |_| true)], 0)),
            TreeKind::NonMu => {
                if q.is_zero() {
                    return Some(SeqPoint::constant(0));
                }
                let x = real(q.clone());
                if !nonmu_label(0).contains(&x) {
                    return Some(SeqPoint::new(vec![index_by_height(q, outside_first_label) + 1], 0));
                }
                let mut i = 0;
                while nonmu_label(i + 1).contains(&x) {
                    i += 1;
                }
                let mut idx = None;
                ring_members(i, |j, y| {
                    if y == q {
                        idx = Some(j);
                        false
                    } else {
                        true
                    }
                });
                let mut path = vec![0; i + 1];
                path.push(idx? + 1);
                Some(SeqPoint::new(path, 0))
            }
            _ => None,
        }
    }
}

impl BranchTree for LabeledTree {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn child_count(&self, path: &[u64]) -> Option<u64> {
        LabeledTree::child_count(self, path)
    }

    fn valid_branch(&self, b: &SeqPoint) -> bool {
        let horizon = b.prefix().len() + 4;
        let mut path = Vec::new();
        for i in 0..horizon {
            let k = b.at(i);
            if LabeledTree::child_count(self, &path).is_some_and(|c| k >= c) {
                return false;
            }
            path.push(k);
            if let TreeKind::Pruned(_, cut) = &self.kind {
                if path.starts_with(cut) {
                    return false;
                }
            }
        }
        match &self.kind {
            TreeKind::Singletons | TreeKind::NonMu | TreeKind::Bisection | TreeKind::Chain(_) => {
                // finite branching below level one allows only child 0 or 1
                b.tail() == 0 || matches!(self.kind, TreeKind::Bisection) && b.tail() == 1
            }
            _ => true,
        }
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.name, self.space.name())
    }
}

fn witness(space: &Space, a: &ExactSet, b: &ExactSet) -> Option<Point> {
    let d1 = a.difference(b).ok()?;
    let d2 = b.difference(a).ok()?;
    space.candidates(&d1, 2).into_iter().chain(space.candidates(&d2, 2)).next()
}

/// `(s₁)` and `(s₂)` on every node up to `depth`, with a few explicit
/// children per node and the declared residual for the rest. The residual
/// is itself re-checked one child further.
pub fn check_sieve(tree: &LabeledTree, depth: usize) -> Verdict {
    let prop = "sieve";
    let space = &tree.space;
    let mut queue = vec![Vec::<u64>::new()];
    let mut visited = 0;
    while let Some(path) = queue.pop() {
        visited += 1;
        if visited > NODE_BUDGET {
            return Verdict::new(prop, &tree.name, Outcome::Unknown, depth).note("node budget exhausted");
        }
        let Some(label) = tree.label(&path) else { continue };
        let node = ExactSet::Seq(SeqSet::cylinder(&path));
        if space.is_empty(&label) {
            return Verdict::new(prop, &tree.name, Outcome::Refuted, depth).sets([node]).note("empty label");
        }
        if path.len() >= depth {
            continue;
        }
        let n = tree.explicit(&path);
        let Some(rest) = tree.residual(&path, n) else {
            return Verdict::new(prop, &tree.name, Outcome::Unknown, depth)
                .sets([node])
                .note("no residual descriptor");
        };
        let kids = tree.child_paths(&path, n);
        let mut union = rest.clone();
        for c in &kids {
            if let Some(l) = tree.label(c) {
                union = union.union(&l).expect("same carrier");
            }
        }
        if !space.same(&union, &label) {
            let w = witness(space, &label, &union);
            return Verdict::new(prop, &tree.name, Outcome::Refuted, depth)
                .sets([node, label, union])
                .points(w)
                .note(format!("children of {:?} do not cover its label", path));
        }
        if tree.child_count(&path).map_or(true, |c| c > n) {
            let mut next = path.clone();
            next.push(n);
            let deeper = tree.label(&next).unwrap_or_else(|| space.empty());
            let split = tree.residual(&path, n + 1).map(|r| r.union(&deeper).expect("same carrier"));
            if !split.as_ref().is_some_and(|s| space.same(s, &rest)) {
                let w = split.as_ref().and_then(|s| witness(space, &rest, s));
                return Verdict::new(prop, &tree.name, Outcome::Refuted, depth)
                    .sets([node, rest])
                    .points(w)
                    .note(format!("residual of {:?} does not split at child {}", path, n));
            }
        }
        queue.extend(kids.into_iter().rev());
    }
    Verdict::new(prop, &tree.name, Outcome::Verified, depth)
        .note(format!("{} nodes, {} explicit children each", visited, EXPLICIT_CHILDREN))
}

/// Descends from `path` towards a node whose label lies inside `u`.
fn find_inside(tree: &LabeledTree, path: &[u64], u: &ExactSet, budget: usize) -> Option<Vec<u64>> {
    let space = &tree.space;
    let label = tree.label(path)?;
    if !path.is_empty() && space.subset(&label, u).ok()? {
        return Some(path.to_vec());
    }
    if budget == 0 {
        return None;
    }
    let n = tree.child_count(path).unwrap_or(4 * budget as u64 + 8);
    for c in tree.child_paths(path, n) {
        if let Some(l) = tree.label(&c) {
            if space.meets(&l, u).ok()? {
                if let Some(found) = find_inside(tree, &c, u, budget - 1) {
                    return Some(found);
                }
            }
        }
    }
    None
}

/// `(w₁)`: every probe basic contains a label; `(w₂)`: below each node of
/// the first two levels, every probe basic inside its label contains the
/// label of a descendant.
pub fn check_web(tree: &LabeledTree, space: &Space, depth: usize) -> Verdict {
    let prop = "web";
    let basis = space.probe_basis(depth);
    let search = depth + 4;
    for u in &basis {
        if find_inside(tree, &[], u, search).is_none() {
            return Verdict::new(prop, &tree.name, Outcome::Unknown, depth).sets([u.clone()]).note("w1: basic without a label inside");
        }
    }
    let mut nodes: Vec<Vec<u64>> = Vec::new();
    for r in tree.child_paths(&[], 4) {
        for c in tree.child_paths(&r, tree.explicit(&r)) {
            nodes.push(c);
        }
        nodes.push(r);
    }
    for t in nodes {
        let Some(label) = tree.label(&t) else { continue };
        for u in basis.iter().filter(|u| space.subset(u, &label).unwrap_or(false)) {
            let n = tree.child_count(&t).unwrap_or(4 * search as u64 + 8);
            let hit = tree.child_paths(&t, n).iter().any(|c| find_inside_from(tree, c, u, search));
            if !hit {
                return Verdict::new(prop, &tree.name, Outcome::Unknown, depth)
                    .sets([ExactSet::Seq(SeqSet::cylinder(&t)), u.clone()])
                    .note("w2: basic inside a label without a descendant label inside");
            }
        }
    }
    Verdict::new(prop, &tree.name, Outcome::Verified, depth)
}

fn find_inside_from(tree: &LabeledTree, path: &[u64], u: &ExactSet, budget: usize) -> bool {
    let Some(l) = tree.label(path) else { return false };
    tree.space.meets(&l, u).unwrap_or(false) && find_inside(tree, path, u, budget).is_some()
}

/// Membership of the certified limit point in every label up to `depth`.
pub fn check_p_complete(tree: &LabeledTree, branches: &[Branch], depth: usize) -> Vec<Verdict> {
    branches
        .iter()
        .map(|b| {
            let subject = format!("{} along {}", tree.name, b);
            let node = ExactSet::Seq(SeqSet::cylinder(&b.take(depth)));
            match tree.limit(b) {
                Some(y) if (1..=depth).all(|k| tree.label(&b.take(k)).is_some_and(|l| l.contains(&y))) => {
                    Verdict::new("p_complete", subject, Outcome::Verified, depth).sets([node]).points([y])
                }
                _ => Verdict::new("p_complete", subject, Outcome::Unknown, depth).sets([node]),
            }
        })
        .collect()
}

/// `P(b)` has at most one point: the closures along `b` up to `depth` fit
/// in a ball of radius `2^{3-depth}` around the certified limit, apart
/// from pieces shrinking onto ghost points outside the carrier. On the
/// sequence space the cylinder of length `depth` around the limit is used.
pub fn check_delta(tree: &LabeledTree, b: &Branch, depth: usize) -> Verdict {
    let prop = "delta";
    let space = &tree.space;
    let subject = format!("{} along {}", tree.name, b);
    let mut inter = space.full();
    for k in 1..=depth {
        let Some(l) = tree.label(&b.take(k)) else {
            return Verdict::new(prop, subject, Outcome::Unknown, depth).note("branch leaves the tree");
        };
        let cl = match space.closure(&l) {
            Ok(c) => c,
            Err(e) => return Verdict::new(prop, subject, Outcome::Unknown, depth).note(e.to_string()),
        };
        inter = inter.intersect(&cl).expect("same carrier");
    }
    if let Some(s) = tree.stable_from(b).filter(|&s| s <= depth) {
        let pts = space.candidates(&inter, 3);
        if pts.len() >= 2 {
            return Verdict::new(prop, subject, Outcome::Refuted, depth)
                .sets([ExactSet::Seq(SeqSet::cylinder(&b.take(s))), inter])
                .points(pts.into_iter().take(2))
                .note(format!("labels constant from depth {}", s));
        }
    }
    let Some(y) = tree.limit(b) else {
        return Verdict::new(prop, subject, Outcome::Unknown, depth).note("no certified limit");
    };
    let envelope = match (&y, space.base().as_line()) {
        (Point::Real(x), Some(line)) => {
            let eps = FieldPoint::rational(pow2(depth).scale_up(8));
            let mut pat = Pattern::open(x - &eps, x + &eps);
            let ghosts = tree.ghosts(b);
            if ghosts.iter().any(|g| line.atoms.iter().any(|t| t.contains(g))) {
                return Verdict::new(prop, subject, Outcome::Unknown, depth).note("ghost inside the carrier");
            }
            for g in &ghosts {
                pat = pat.union(&Pattern::open(g - &eps, g + &eps), crate::trace::Trace::Field);
            }
            line.set(pat)
        }
        (Point::Seq(s), None) if matches!(space, Space::Seq) => ExactSet::Seq(SeqSet::cylinder(&s.take(depth))),
        (y, _) => match space.singleton(y) {
            Ok(one) => one,
            Err(e) => return Verdict::new(prop, subject, Outcome::Unknown, depth).note(e.to_string()),
        },
    };
    let ok = inter.contains(&y) && space.subset(&inter, &envelope).unwrap_or(false);
    let outcome = if ok { Outcome::Verified } else { Outcome::Unknown };
    Verdict::new(prop, subject, outcome, depth).sets([inter, envelope]).points([y])
}

trait ScaleUp {
    fn scale_up(self, k: i64) -> Rat;
}

impl ScaleUp for Rat {
    fn scale_up(self, k: i64) -> Rat {
        self * Rat::from_integer(k.into())
    }
}

/// Exact radius `2^{-j}` with the ghost ball disjoint from `u`.
fn ghost_gap(space: &Space, g: &FieldPoint, u: &ExactSet) -> Option<usize> {
    let line = space.base().as_line()?;
    (0..24).find(|&j| {
        let r = FieldPoint::rational(pow2(j));
        let ball = line.set(Pattern::open(g - &r, g + &r));
        !space.meets(&ball, u).unwrap_or(true)
    })
}

/// Escape certificate for `u`: singleton descendants of every chain node
/// outside `u`, justified for all depths by a ghost ball disjoint from `u`.
fn escape_certificate(tree: &LabeledTree, b: &Branch, u: &ExactSet, depth: usize) -> Option<(usize, Vec<(Vec<u64>, Point)>)> {
    let g = tree.ghosts(b).into_iter().next()?;
    let j = ghost_gap(&tree.space, &g, u)?;
    // escapes at chain depth k lie within 2^{-(k+1)} of the ghost, so from
    // k = j on they are inside the ghost ball; below that check directly
    let upto = depth.max(j + 1);
    let mut escapes = Vec::new();
    for k in 0..upto {
        let (path, x) = tree.escape(b, k)?;
        let parent_label = tree.label(&b.take(k + 1))?;
        if u.contains(&x) || !parent_label.contains(&x) {
            return None;
        }
        escapes.push((path, x));
    }
    Some((j, escapes))
}

/// `(μ)` and `(qμ)` along `b` at `y ∈ U`.
pub fn check_mu_properties(tree: &LabeledTree, b: &Branch, y: &Point, u: &ExactSet, depth: usize) -> Result<(Verdict, Verdict)> {
    if !u.contains(y) {
        return Err(TopoError::OutsideCarrier(format!("{} not in {}", y, u)));
    }
    let space = &tree.space;
    let subject = format!("{} along {} at {}", tree.name, b, y);
    let in_p = (1..=depth).all(|k| {
        tree.label(&b.take(k))
            .and_then(|l| space.closure(&l).ok())
            .is_some_and(|c| c.contains(y))
    });
    if !in_p {
        return Err(TopoError::SpecViolation(format!("{} is not in P({})", y, b)));
    }
    for k in 1..=depth {
        let l = tree.label(&b.take(k)).expect("valid branch");
        if space.subset(&l, u)? {
            let node = ExactSet::Seq(SeqSet::cylinder(&b.take(k)));
            let mu = Verdict::new("mu", &subject, Outcome::Verified, k).sets([u.clone(), node.clone(), l.clone()]).points([y.clone()]);
            let qmu = Verdict::new("quasi_mu", &subject, Outcome::Verified, k)
                .sets([u.clone(), node, l])
                .points([y.clone()])
                .note("every descendant label lies inside the chain label, hence inside U");
            return Ok((mu, qmu));
        }
    }
    if let Some((j, escapes)) = escape_certificate(tree, b, u, depth) {
        let pts: Vec<Point> = escapes.iter().map(|(_, x)| x.clone()).collect();
        let ghost = tree.ghosts(b)[0].clone();
        let note = format!("escape points stay within 2^-(k+1) of {} and U misses its 2^-{} ball", ghost, j);
        let mu = Verdict::new("mu", &subject, Outcome::Refuted, depth)
            .sets([u.clone()])
            .points(std::iter::once(y.clone()).chain(pts.clone()))
            .note(note.clone());
        let nodes = escapes.iter().map(|(p, _)| ExactSet::Seq(SeqSet::cylinder(p)));
        let qmu = Verdict::new("quasi_mu", &subject, Outcome::Refuted, depth)
            .sets(std::iter::once(u.clone()).chain(nodes))
            .points(std::iter::once(y.clone()).chain(pts))
            .note(format!("every chain node has a singleton descendant outside U; {}", note));
        return Ok((mu, qmu));
    }
    Ok((
        Verdict::new("mu", &subject, Outcome::Unknown, depth).sets([u.clone()]).points([y.clone()]),
        Verdict::new("quasi_mu", &subject, Outcome::Unknown, depth).sets([u.clone()]).points([y.clone()]),
    ))
}

/// Branches through the first few children of the first levels.
pub fn sample_branches(tree: &LabeledTree, levels: usize, width: u64) -> Vec<Branch> {
    let mut out = vec![SeqPoint::constant(0)];
    let mut frontier = vec![Vec::<u64>::new()];
    for _ in 0..levels {
        let mut next = Vec::new();
        for p in &frontier {
            let n = tree.child_count(p).map_or(width, |c| c.min(width));
            for c in tree.child_paths(p, n) {
                if tree.label(&c).is_some() {
                    next.push(c);
                }
            }
        }
        out.extend(next.iter().map(|p| LabeledTree::branch_through(p)));
        frontier = next;
    }
    out.sort();
    out.dedup();
    out.retain(|b| tree.valid_branch(b));
    out
}

/// Searches branch/neighbourhood pairs for a `(μ)` failure certificate.
pub fn find_mu_refutation(tree: &LabeledTree, depth: usize) -> Option<Verdict> {
    let branches = sample_branches(tree, 2, 3);
    for d in 1..=depth {
        for b in &branches {
            let Some(y) = tree.limit(b) else { continue };
            let Ok(us) = tree.space.neighborhoods_of(&y, d) else { continue };
            for u in us {
                if let Ok((mu, _)) = check_mu_properties(tree, b, &y, &u, depth) {
                    if mu.is(Outcome::Refuted) {
                        return Some(mu.note(format!("found at neighbourhood depth {}", d)));
                    }
                }
            }
        }
    }
    None
}

/// `d(b, b') = 1/(n+1)` at the first disagreement `n`, `0` when equal.
pub fn branch_distance(b: &Branch, c: &Branch) -> Rat {
    match b.first_difference(c) {
        None => Rat::zero(),
        Some(n) => Rat::new(One::one(), (n as u64 + 1).into()),
    }
}

/// The open ball of radius `1/(n+1)`, as a set of the branch space.
pub fn ball(b: &Branch, n: usize) -> ExactSet {
    ExactSet::Seq(SeqSet::cylinder(&b.take(n + 1)))
}

pub fn sigma_space(tree: Arc<LabeledTree>) -> Space {
    Space::Branches(tree)
}

/// Limit of a Cauchy sequence of branches with modulus `m`: entry `i` is
/// read off the `m(i+1)`-th term, beyond which terms agree on `0..=i`.
pub fn diagonal_limit(seq: &[Branch], modulus: impl Fn(usize) -> usize, len: usize) -> Branch {
    let prefix: Vec<u64> = (0..len).map(|i| seq[modulus(i + 1).min(seq.len() - 1)].at(i)).collect();
    let last = &seq[modulus(len + 1).min(seq.len() - 1)];
    let mut full = prefix;
    full.extend(last.take(last.prefix().len() + 1).into_iter().skip(full.len()));
    SeqPoint::new(full, last.tail())
}

#[derive(Debug)]
struct Canonical(Arc<LabeledTree>);

impl MapOracle for Canonical {
    fn eval(&self, p: &Point) -> Result<Point> {
        let b = p.as_seq().ok_or_else(|| TopoError::OutsideCarrier(p.to_string()))?;
        self.0.limit(b).ok_or_else(|| TopoError::Unsupported(format!("no limit certificate for {}", b)))
    }

    fn preimage(&self, _v: &ExactSet) -> Result<ExactSet> {
        Err(TopoError::Unsupported("canonical preimages are not finitely described".into()))
    }
}

/// `b ↦ x_b` from the branch space to the label space.
pub fn canonical_map(tree: Arc<LabeledTree>) -> CMap {
    let name = format!("canonical({})", tree.name);
    let cod = tree.space.clone();
    CMap::new(name, sigma_space(tree.clone()), cod, MapKind::Oracle(Arc::new(Canonical(tree))))
}

/// Certificates `(B(b, 1/(n+1)), V)` with `V ∋ y` missing `φ(b_n)`.
pub fn canonical_closed_graph(tree: &LabeledTree, pairs: &[(Branch, Point)], depth: usize) -> Result<Vec<Verdict>> {
    let space = &tree.space;
    let mut out = Vec::new();
    for (b, y) in pairs {
        let subject = format!("canonical({}) at ({}, {})", tree.name, b, y);
        let fb = tree.limit(b).ok_or_else(|| TopoError::Unsupported(format!("no limit for {}", b)))?;
        if &fb == y {
            return Err(TopoError::OnGraph(subject));
        }
        let mut found = None;
        'search: for n in 0..depth {
            let Some(l) = tree.label(&b.take(n + 1)) else { break };
            if space.closure(&l)?.contains(y) {
                continue;
            }
            for d in 1..=depth {
                for v in space.neighborhoods_of(y, d)? {
                    if !space.meets(&v, &l)? {
                        found = Some((n, v));
                        break 'search;
                    }
                }
            }
        }
        out.push(match found {
            Some((n, v)) => Verdict::new("closed_graph", subject, Outcome::Verified, n + 1)
                .sets([ball(b, n), v])
                .points([Point::Seq(b.clone()), y.clone()]),
            None => Verdict::new("closed_graph", subject, Outcome::Unknown, depth),
        });
    }
    Ok(out)
}

/// For each probe `U ∋ f(b)`: is some ball `B(b, 1/(n+1))` inside
/// `cl f⁻¹(U)`? Verified through a chain label inside `U`; refuted when
/// every ball holds a singleton subtree whose value escapes `U`.
pub fn canonical_near_continuity(tree: &LabeledTree, b: &Branch, depth: usize) -> Result<Vec<Verdict>> {
    let space = &tree.space;
    let y = tree.limit(b).ok_or_else(|| TopoError::Unsupported(format!("no limit for {}", b)))?;
    let mut out = Vec::new();
    for u in space.neighborhoods_of(&y, depth)? {
        let subject = format!("canonical({}) at {} for {}", tree.name, b, u);
        let inside = (1..=depth).find(|&k| tree.label(&b.take(k)).is_some_and(|l| space.subset(&l, &u).unwrap_or(false)));
        let v = if let Some(k) = inside {
            Verdict::new("canonical_near_continuity", subject, Outcome::Verified, depth).sets([u, ball(b, k - 1)])
        } else if let Some((_, escapes)) = escape_certificate(tree, b, &u, depth) {
            let isolated = escapes.iter().map(|(p, _)| ExactSet::Seq(SeqSet::cylinder(p)));
            Verdict::new("canonical_near_continuity", subject, Outcome::Refuted, depth)
                .sets(std::iter::once(u).chain(isolated))
                .points(escapes.iter().map(|(_, x)| x.clone()))
                .note("each ball around b contains a singleton subtree mapped outside U")
        } else {
            Verdict::new("canonical_near_continuity", subject, Outcome::Unknown, depth).sets([u])
        };
        out.push(v);
    }
    Ok(out)
}

/// Continuity of the canonical map at `b`: verified when each probe
/// `U ∋ f(b)` contains the closure of a chain label; refuted by the
/// sequence `bⁿ → b` committing to escape singletons.
pub fn canonical_continuity(tree: &LabeledTree, b: &Branch, depth: usize) -> Result<Verdict> {
    let space = &tree.space;
    let subject = format!("canonical({}) at {}", tree.name, b);
    let y = tree.limit(b).ok_or_else(|| TopoError::Unsupported(format!("no limit for {}", b)))?;
    let mut all = true;
    for u in space.neighborhoods_of(&y, depth)? {
        if let Some((_, escapes)) = escape_certificate(tree, b, &u, depth) {
            let seq: Vec<Point> = escapes.iter().map(|(p, _)| Point::Seq(LabeledTree::branch_through(p))).collect();
            let vals = escapes.iter().map(|(_, x)| x.clone());
            return Ok(Verdict::new("continuity", subject, Outcome::Refuted, depth)
                .sets([u])
                .points(std::iter::once(Point::Seq(b.clone())).chain(seq).chain(vals))
                .note("b^n agrees with b on n+1 places and maps outside U"));
        }
        let ok = (1..=depth).any(|k| {
            tree.label(&b.take(k))
                .and_then(|l| space.closure(&l).ok())
                .is_some_and(|c| space.subset(&c, &u).unwrap_or(false))
        });
        all &= ok;
    }
    let o = if all { Outcome::Verified } else { Outcome::Unknown };
    Ok(Verdict::new("continuity", subject, o, depth).points([Point::Seq(b.clone()), y]))
}

/// The sieve of nested chains `V_1 ⊇ cl V_2 ⊇ V_2 ⊇ …` of cylinders
/// with `diam V_k = 1/(k+1)`, labeled by images.
pub fn sieve_from_surjection(f: CMap) -> Result<LabeledTree> {
    if !matches!(f.domain, Space::Seq) {
        return Err(TopoError::Unsupported(format!("{} has no declared complete metric", f.domain.name())));
    }
    if !f.has_image() {
        return Err(TopoError::Unsupported(format!("{} has no image operator", f.name)));
    }
    let space = f.codomain.clone();
    Ok(LabeledTree { name: format!("chains({})", f.name), space, kind: TreeKind::Surjection(Box::new(f)) })
}

/// Diameter of a cylinder of length `k` in the sequence metric.
pub fn cylinder_diameter(k: usize) -> Rat {
    Rat::new(One::one(), (k as u64 + 1).into())
}

/// Nesting `V_k ⊇ cl V_{k+1}`, `diam V_k ≤ 1/k` and `φ = f(V_k)` on every
/// node up to `depth`.
pub fn check_surjection_chain(tree: &LabeledTree, depth: usize) -> Verdict {
    let prop = "chain_nesting";
    let TreeKind::Surjection(f) = &tree.kind else {
        return Verdict::new(prop, &tree.name, Outcome::Unknown, depth).note("not a chain sieve");
    };
    let mut queue: Vec<Vec<u64>> = tree.child_paths(&[], EXPLICIT_CHILDREN);
    let mut count = 0;
    while let Some(path) = queue.pop() {
        count += 1;
        if count > NODE_BUDGET {
            return Verdict::new(prop, &tree.name, Outcome::Unknown, depth).note("node budget exhausted");
        }
        let k = path.len();
        let v = SeqSet::cylinder(&path);
        if cylinder_diameter(k) > Rat::new(One::one(), (k as u64).into()) {
            return Verdict::new(prop, &tree.name, Outcome::Refuted, depth).sets([ExactSet::Seq(v)]).note("diameter");
        }
        let label = tree.label(&path);
        let image = f.image(&ExactSet::Seq(v.clone())).ok();
        if label.is_none() || label != image {
            return Verdict::new(prop, &tree.name, Outcome::Refuted, depth).sets([ExactSet::Seq(v)]).note("label");
        }
        if k >= depth {
            continue;
        }
        for c in tree.child_paths(&path, EXPLICIT_CHILDREN) {
            let w = SeqSet::cylinder(&c);
            if !w.closure().difference(&v).is_empty() {
                return Verdict::new(prop, &tree.name, Outcome::Refuted, depth)
                    .sets([ExactSet::Seq(v), ExactSet::Seq(w)])
                    .note("closure of the next set escapes");
            }
            queue.push(c);
        }
    }
    Verdict::new(prop, &tree.name, Outcome::Verified, depth).note(format!("{} nodes", count))
}

/// Tree description files: one directive per line, `#` comments.
///
/// ```text
/// tree non_mu
/// kind nonmu            # cylinder | singletons | nonmu | bisection | chain <set>
///                       # | surjection identity | surjection projection
/// space q               # registry identifier, where the kind needs one
/// prune 0 0 2           # optional, repeatable
/// expect mu refuted     # optional: check (s, p, delta, mu) and outcome
/// ```
pub fn parse_tree_file(text: &str) -> Result<LabeledTree> {
    parse_tree_spec(text).map(|t| t.tree)
}

/// A parsed tree file with its stated expectations.
#[derive(Clone, Debug)]
pub struct TreeFile {
    pub tree: LabeledTree,
    pub expect: Vec<(String, Outcome)>,
}

/// Check names accepted by `expect` and by the CLI.
pub const TREE_CHECKS: [&str; 4] = ["s", "p", "delta", "mu"];

pub fn parse_tree_spec(text: &str) -> Result<TreeFile> {
    let mut expect = Vec::new();
    let mut name = None;
    let mut kind: Option<String> = None;
    let mut space: Option<Space> = None;
    let mut prunes = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "tree" => name = Some(rest.to_string()),
            "kind" => kind = Some(rest.to_string()),
            "space" => space = Some(Space::from_id(rest)?),
            "prune" => {
                let path = rest
                    .split_whitespace()
                    .map(|t| t.parse::<u64>().map_err(|_| TopoError::Parse(crate::ParseError::new(format!("line {}: bad index {}", no + 1, t)))))
                    .collect::<Result<Vec<_>>>()?;
                prunes.push(path);
            }
            "expect" => {
                let bad = || TopoError::Parse(crate::ParseError::new(format!("line {}: expected `expect <check> <outcome>`", no + 1)));
                let (check, outcome) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
                if !TREE_CHECKS.contains(&check) {
                    return Err(bad());
                }
                expect.push((check.to_string(), outcome.trim().parse()?));
            }
            other => {
                return Err(TopoError::Parse(crate::ParseError::new(format!("line {}: unknown directive {}", no + 1, other))));
            }
        }
    }
    let kind = kind.ok_or_else(|| TopoError::Parse(crate::ParseError::new("missing kind")))?;
    let line_space = || space.clone().unwrap_or_else(Space::rationals);
    let (k, arg) = kind.split_once(char::is_whitespace).map_or((kind.as_str(), ""), |(a, b)| (a, b.trim()));
    let mut tree = match (k, arg) {
        ("cylinder", _) => LabeledTree::cylinder(),
        ("singletons", _) => LabeledTree::singletons(line_space()),
        ("nonmu", _) => LabeledTree::non_mu(),
        ("bisection", _) => LabeledTree::bisection(line_space()),
        ("chain", set) => LabeledTree::chain(line_space(), set.parse()?),
        ("surjection", "identity") => sieve_from_surjection(CMap::identity("identity", Space::Seq, Space::Seq))?,
        ("surjection", "projection") => sieve_from_surjection(crate::gallery::seq_projection())?,
        _ => return Err(TopoError::UnknownName(kind.clone())),
    };
    for p in prunes {
        tree = tree.pruned(p);
    }
    if let Some(n) = name {
        tree = tree.with_name(n);
    }
    Ok(TreeFile { tree, expect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_order_roundtrip() {
        for n in 0..60 {
            let q = nth_by_height(n, |_| true);
            assert_eq!(index_by_height(&q, |_| true), n);
        }
    }

    #[test]
    fn ring_members_are_in_ring() {
        for i in 0..4 {
            for j in 0..5 {
                let x = real(ring_member(i, j));
                assert!(nonmu_label(i).contains(&x) && !nonmu_label(i + 1).contains(&x), "{} {}", i, x);
            }
        }
    }

    #[test]
    fn sieves_pass_axioms() {
        assert!(check_sieve(&LabeledTree::non_mu(), 5).is(Outcome::Verified));
        assert!(check_sieve(&LabeledTree::cylinder(), 4).is(Outcome::Verified));
        assert!(check_sieve(&LabeledTree::singletons(Space::rationals()), 5).is(Outcome::Verified));
    }

    #[test]
    fn pruned_sieve_is_refuted_with_point() {
        let t = LabeledTree::non_mu().pruned(vec![0, 0, 1]);
        let v = check_sieve(&t, 4);
        assert!(v.is(Outcome::Refuted), "{:?}", v);
        assert!(!v.witness_points.is_empty());
    }

    #[test]
    fn non_mu_main_branch() {
        let t = LabeledTree::non_mu();
        let b = SeqPoint::constant(0);
        assert_eq!(t.limit(&b), Some(Point::int(0)));
        assert!(check_delta(&t, &b, 8).is(Outcome::Verified));
        let u: ExactSet = "rational:(-1/2,1/2)".parse().unwrap();
        let (mu, _) = check_mu_properties(&t, &b, &Point::int(0), &u, 6).unwrap();
        assert!(mu.is(Outcome::Refuted), "{:?}", mu);
        assert!(find_mu_refutation(&t, 3).is_some());
    }

    #[test]
    fn singleton_branch_inverse() {
        let t = LabeledTree::non_mu();
        for q in [rat(3, 1), rat(1, 3), rat(-7, 2), rat(5, 4)] {
            let b = t.singleton_branch(&q).unwrap();
            assert_eq!(t.limit(&b), Some(real(q)));
        }
    }

    #[test]
    fn metric_and_balls() {
        let b = SeqPoint::new(vec![1, 2, 3], 0);
        let c = SeqPoint::new(vec![1, 2, 4], 0);
        assert_eq!(branch_distance(&b, &c), rat(1, 3));
        assert!(ball(&b, 2).contains(&Point::Seq(b.clone())));
        assert!(!ball(&b, 2).contains(&Point::Seq(c)));
    }

    #[test]
    fn bisection_web_and_pruning() {
        let t = LabeledTree::bisection(Space::rationals());
        assert!(check_web(&t, &Space::rationals(), 4).is(Outcome::Verified));
        let p = LabeledTree::bisection(Space::rationals()).pruned(vec![0, 1]);
        assert!(check_web(&p, &Space::rationals(), 4).is(Outcome::Unknown));
    }

    #[test]
    fn canonical_map_on_non_mu() {
        let t = LabeledTree::non_mu();
        let b = SeqPoint::constant(0);
        let c = canonical_continuity(&t, &b, 5).unwrap();
        assert!(c.is(Outcome::Refuted), "{:?}", c);
        let nc = canonical_near_continuity(&t, &b, 3).unwrap();
        assert!(nc.iter().any(|v| v.is(Outcome::Refuted)));
        let g = canonical_closed_graph(&t, &[(b.clone(), Point::int(3))], 5).unwrap();
        assert!(g[0].is(Outcome::Verified), "{:?}", g[0]);
    }

    #[test]
    fn chain_sieve_delta_refuted() {
        let u: ExactSet = "rational:(0,1)".parse().unwrap();
        let t = LabeledTree::chain(Space::rationals(), u);
        assert!(check_delta(&t, &SeqPoint::constant(0), 4).is(Outcome::Refuted));
    }

    #[test]
    fn surjection_chains() {
        let f = CMap::identity("id", Space::Seq, Space::Seq);
        let t = sieve_from_surjection(f).unwrap();
        assert!(check_surjection_chain(&t, 3).is(Outcome::Verified));
        assert!(check_sieve(&t, 3).is(Outcome::Verified));
        let c = LabeledTree::cylinder();
        let b = SeqPoint::new(vec![2, 1], 0);
        assert!(canonical_continuity(&c, &b, 4).unwrap().is(Outcome::Verified));
        assert!(check_delta(&c, &b, 6).is(Outcome::Verified));
    }
}
