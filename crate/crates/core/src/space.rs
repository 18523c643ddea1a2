//! The space zoo behind one interface: membership, exact set algebra
//! where available, probe bases and neighbourhood enumeration.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cylinder::{CylTree, SeqSet};
use crate::error::{Result, TopoError};
use crate::field::{int, FieldPoint, Rat};
use crate::linear::{LineTopology, LinearSet, Pattern};
use crate::point::{Point, SeqPoint};
use crate::refine::RefinementSpec;
use crate::set::ExactSet;
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Tier {
    /// Full Kuratowski algebra.
    Exact,
    /// Basis enumeration, membership and meets only.
    Probe,
}

/// Branch structure of a labeled tree, as seen by its branch space.
pub trait BranchTree: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    /// Number of children of the node at `path`; `None` for infinitely many.
    fn child_count(&self, path: &[u64]) -> Option<u64>;
    /// Is the eventually constant index sequence a branch of the tree?
    fn valid_branch(&self, b: &SeqPoint) -> bool {
        let horizon = b.prefix().len() + 32;
        let mut path = Vec::new();
        for i in 0..horizon {
            let k = b.at(i);
            if self.child_count(&path).is_some_and(|c| k >= c) {
                return false;
            }
            path.push(k);
        }
        true
    }
    fn valid_path(&self, path: &[u64]) -> bool {
        (0..path.len()).all(|i| self.child_count(&path[..i]).map_or(true, |c| path[i] < c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSpace {
    pub atoms: Vec<Trace>,
    pub topology: LineTopology,
}

fn traces_disjoint(a: Trace, b: Trace) -> bool {
    use Trace::*;
    let pair = |x, y| (a == x && b == y) || (a == y && b == x);
    if pair(Dyadic, NonDyadic) || pair(Harmonic, NonHarmonic) {
        return true;
    }
    let irrational = |t: Trace| matches!(t, RatPlusSqrt2 | WilhelmH);
    (a.is_rational() && irrational(b)) || (b.is_rational() && irrational(a)) || pair(RatPlusSqrt2, WilhelmH)
}

impl LineSpace {
    pub fn new(atoms: Vec<Trace>, topology: LineTopology) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                if !traces_disjoint(*a, *b) {
                    return Err(TopoError::CarrierMismatch(format!("atoms {} and {} overlap", a, b)));
                }
            }
        }
        if atoms.contains(&Trace::M1) && atoms.len() > 1 {
            return Err(TopoError::CarrierMismatch("m1 must be the only atom of its line".into()));
        }
        if topology == LineTopology::KTopology && !atoms.contains(&Trace::Harmonic) {
            return Err(TopoError::CarrierMismatch("K-topology needs the harmonic atom".into()));
        }
        Ok(LineSpace { atoms, topology })
    }

    pub fn set(&self, p: Pattern) -> ExactSet {
        ExactSet::Linear(LinearSet::on_atoms(&self.atoms, &p))
    }

    fn ball(&self, c: &FieldPoint, r: &Rat) -> ExactSet {
        let rr = FieldPoint::rational(r.clone());
        self.set(Pattern::open(c - &rr, c + &rr))
    }

    fn harmonic_free(&self, s: &ExactSet) -> ExactSet {
        match s {
            ExactSet::Linear(l) => ExactSet::Linear(l.difference(&LinearSet::from_parts([(Trace::Harmonic, Pattern::full())]))),
            other => other.clone(),
        }
    }

    fn basis(&self, depth: usize) -> Vec<ExactSet> {
        let mut out = Vec::new();
        let zero = FieldPoint::zero();
        for j in 0..depth {
            let r = Rat::new(1.into(), num_bigint::BigInt::from(1u64) << j);
            let reach = (depth as i64) << j;
            for k in -reach..=reach {
                let c = FieldPoint::rational(Rat::new(k.into(), num_bigint::BigInt::from(1u64) << j));
                let b = self.ball(&c, &r);
                if self.topology == LineTopology::KTopology && b.contains(&Point::Real(zero.clone())) {
                    out.push(self.harmonic_free(&b));
                }
                out.push(b);
            }
        }
        if self.topology == LineTopology::Discrete {
            let d = FieldPoint::from_int(depth as i64);
            for t in &self.atoms {
                for x in t.points_in(Some(&-&d), Some(&d), 2 * depth) {
                    out.push(self.set(Pattern::points([x])));
                }
            }
        }
        out.retain(|s| !s.is_empty());
        out
    }

    fn neighborhoods(&self, x: &FieldPoint, depth: usize) -> Vec<ExactSet> {
        let mut out = Vec::new();
        if self.topology == LineTopology::Discrete {
            out.push(self.set(Pattern::points([x.clone()])));
        }
        for j in 0..depth {
            let r = Rat::new(1.into(), num_bigint::BigInt::from(1u64) << j);
            let scaled = x.scale(&Rat::from_integer(num_bigint::BigInt::from(1u64) << j));
            let fl = scaled.floor();
            let exact = FieldPoint::rational(Rat::from_integer(fl.clone())) == scaled;
            let ks = if exact { vec![fl.clone()] } else { vec![fl.clone(), fl + 1] };
            let reach = num_bigint::BigInt::from((depth as i64) << j);
            for k in ks {
                if k > reach || k < -reach.clone() {
                    continue;
                }
                let c = FieldPoint::rational(Rat::new(k, num_bigint::BigInt::from(1u64) << j));
                let b = self.ball(&c, &r);
                if self.topology == LineTopology::KTopology && x.is_zero() {
                    out.push(self.harmonic_free(&b));
                }
                out.push(b);
            }
        }
        out
    }

    fn name(&self) -> String {
        let atoms: Vec<&str> = self.atoms.iter().map(|t| t.name()).collect();
        let topo = match self.topology {
            LineTopology::Order => "",
            LineTopology::Discrete => "discrete ",
            LineTopology::KTopology => "K ",
        };
        format!("{}line[{}]", topo, atoms.join(","))
    }
}

#[derive(Clone, Debug)]
pub enum Space {
    Line(LineSpace),
    /// Eventually constant sequences of naturals with the product topology.
    Seq,
    Duplicate(Box<Space>),
    Sum(Vec<Space>),
    Subspace(Box<Space>, ExactSet),
    Refined(Box<Space>, Box<RefinementSpec>),
    Branches(Arc<dyn BranchTree>),
}

/// Sequence bases are enumerated only up to this depth; deeper requests
/// fall back to it, since the family grows like `(d+1)^d`.
pub const SEQ_BASIS_CAP: usize = 4;
/// Size of the sample pool feeding the finite sets `Y` of duplicate basics.
pub const DUP_POOL: usize = 6;

impl Space {
    pub fn line(atoms: Vec<Trace>) -> Self {
        Space::Line(LineSpace::new(atoms, LineTopology::Order).expect("valid atoms"))
    }

    pub fn line_with(atoms: Vec<Trace>, topology: LineTopology) -> Result<Self> {
        Ok(Space::Line(LineSpace::new(atoms, topology)?))
    }

    /// The rational line.
    pub fn rationals() -> Self {
        Space::line(vec![Trace::Rational])
    }

    /// The rational line split into dyadic and non-dyadic atoms.
    pub fn rationals_split() -> Self {
        Space::line(vec![Trace::Dyadic, Trace::NonDyadic])
    }

    pub fn duplicate(f: Space) -> Result<Self> {
        if f.tier() != Tier::Exact {
            return Err(TopoError::ProbeOnly(f.name()));
        }
        Ok(Space::Duplicate(Box::new(f)))
    }

    pub fn sum(parts: Vec<Space>) -> Self {
        Space::Sum(parts)
    }

    pub fn subspace(base: Space, s: ExactSet) -> Result<Self> {
        let s = s.intersect(&base.full())?;
        if base.is_empty(&s) {
            return Err(TopoError::EmptySet);
        }
        Ok(Space::Subspace(Box::new(base), s))
    }

    pub fn refine(base: Space, spec: RefinementSpec) -> Result<Self> {
        spec.validate(&base)?;
        Ok(Space::Refined(Box::new(base), Box::new(spec)))
    }

    pub fn name(&self) -> String {
        match self {
            Space::Line(l) => l.name(),
            Space::Seq => "seq".into(),
            Space::Duplicate(f) => format!("dup({})", f.name()),
            Space::Sum(parts) => {
                let names: Vec<String> = parts.iter().map(Space::name).collect();
                format!("sum({})", names.join(","))
            }
            Space::Subspace(b, s) => format!("sub({},{})", b.name(), s),
            Space::Refined(b, spec) => match spec.x0() {
                Some(x0) => format!("{}({},{})", spec.label(), b.name(), x0),
                None => format!("{}({})", spec.label(), b.name()),
            },
            Space::Branches(t) => format!("sigma({})", t.name()),
        }
    }

    pub fn tier(&self) -> Tier {
        match self {
            Space::Line(_) | Space::Seq | Space::Branches(_) => Tier::Exact,
            Space::Duplicate(f) | Space::Subspace(f, _) => f.tier(),
            Space::Sum(parts) => {
                if parts.iter().all(|p| p.tier() == Tier::Exact) {
                    Tier::Exact
                } else {
                    Tier::Probe
                }
            }
            Space::Refined(..) => Tier::Probe,
        }
    }

    pub fn as_line(&self) -> Option<&LineSpace> {
        match self {
            Space::Line(l) => Some(l),
            _ => None,
        }
    }

    /// The underlying space whose set algebra this space borrows.
    pub fn base(&self) -> &Space {
        match self {
            Space::Refined(b, _) => b.base(),
            other => other,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::Line(l), Point::Real(x)) => l.atoms.iter().any(|t| t.contains(x)),
            (Space::Seq, Point::Seq(_)) => true,
            (Space::Duplicate(f), Point::Tagged(x, t)) => (*t == 1 || *t == 2) && f.contains(x),
            (Space::Sum(parts), Point::Tagged(x, i)) => parts.get(*i as usize).is_some_and(|s| s.contains(x)),
            (Space::Subspace(_, s), p) => s.contains(p),
            (Space::Refined(b, _), p) => b.contains(p),
            (Space::Branches(t), Point::Seq(b)) => t.valid_branch(b),
            _ => false,
        }
    }

    pub fn full(&self) -> ExactSet {
        match self {
            Space::Line(l) => l.set(Pattern::full()),
            Space::Seq | Space::Branches(_) => ExactSet::Seq(SeqSet::full()),
            Space::Duplicate(f) => ExactSet::dup(f.full(), f.full()),
            Space::Sum(parts) => ExactSet::Sum(parts.iter().map(Space::full).collect()),
            Space::Subspace(_, s) => s.clone(),
            Space::Refined(b, _) => b.full(),
        }
    }

    pub fn empty(&self) -> ExactSet {
        match self {
            Space::Line(_) => ExactSet::Linear(LinearSet::empty()),
            Space::Seq | Space::Branches(_) => ExactSet::Seq(SeqSet::empty()),
            Space::Duplicate(f) => ExactSet::dup(f.empty(), f.empty()),
            Space::Sum(parts) => ExactSet::Sum(parts.iter().map(Space::empty).collect()),
            Space::Subspace(b, _) | Space::Refined(b, _) => b.empty(),
        }
    }

    /// Singleton `{p}`.
    pub fn singleton(&self, p: &Point) -> Result<ExactSet> {
        if !self.contains(p) {
            return Err(TopoError::OutsideCarrier(p.to_string()));
        }
        Ok(match (self, p) {
            (Space::Line(l), Point::Real(x)) => l.set(Pattern::points([x.clone()])),
            (Space::Seq | Space::Branches(_), Point::Seq(s)) => ExactSet::Seq(SeqSet::points([s.clone()])),
            (Space::Duplicate(f), Point::Tagged(x, t)) => {
                let one = f.singleton(x)?;
                if *t == 1 {
                    ExactSet::dup(one, f.empty())
                } else {
                    ExactSet::dup(f.empty(), one)
                }
            }
            (Space::Sum(parts), Point::Tagged(x, i)) => ExactSet::Sum(
                parts
                    .iter()
                    .enumerate()
                    .map(|(j, s)| if j == *i as usize { s.singleton(x) } else { Ok(s.empty()) })
                    .collect::<Result<_>>()?,
            ),
            (Space::Subspace(b, _) | Space::Refined(b, _), p) => b.singleton(p)?,
            _ => return Err(TopoError::OutsideCarrier(p.to_string())),
        })
    }

    pub fn points(&self, pts: &[Point]) -> Result<ExactSet> {
        pts.iter().try_fold(self.empty(), |acc, p| acc.union(&self.singleton(p)?))
    }

    pub fn complement(&self, a: &ExactSet) -> Result<ExactSet> {
        Ok(match (self, a) {
            (Space::Line(l), ExactSet::Linear(s)) => ExactSet::Linear(s.complement(&l.atoms)),
            (Space::Seq | Space::Branches(_), ExactSet::Seq(s)) => ExactSet::Seq(s.complement()),
            (Space::Duplicate(f), ExactSet::Dup(a1, a2)) => ExactSet::dup(f.complement(a1)?, f.complement(a2)?),
            (Space::Sum(parts), ExactSet::Sum(sets)) if parts.len() == sets.len() => ExactSet::Sum(
                parts.iter().zip(sets).map(|(p, s)| p.complement(s)).collect::<Result<_>>()?,
            ),
            (Space::Subspace(_, c), a) => c.difference(a)?,
            (Space::Refined(b, _), a) => b.complement(a)?,
            _ => return Err(self.mismatch(a)),
        })
    }

    fn mismatch(&self, a: &ExactSet) -> TopoError {
        TopoError::CarrierMismatch(format!("set {} does not live in {}", a, self.name()))
    }

    fn closure_like(&self, a: &ExactSet, derived: bool) -> Result<ExactSet> {
        Ok(match (self, a) {
            (Space::Line(l), ExactSet::Linear(s)) => ExactSet::Linear(s.closure_like(&l.atoms, l.topology, derived)),
            (Space::Seq, ExactSet::Seq(s)) => ExactSet::Seq(if derived { s.derived() } else { s.closure() }),
            (Space::Branches(_), ExactSet::Seq(s)) => {
                if s.removed().next().is_some() {
                    return Err(TopoError::Unsupported(
                        "branch-space closure of sets with removed branches".into(),
                    ));
                }
                ExactSet::Seq(if derived { s.derived() } else { s.closure() })
            }
            (Space::Duplicate(f), ExactSet::Dup(a1, a2)) => {
                if derived {
                    ExactSet::dup(f.empty(), f.omega_acc(a2)?.union(&f.omega_acc(a1)?)?)
                } else {
                    let level2 = a2.union(&f.closure(a2)?)?.union(&f.omega_acc(a1)?)?;
                    ExactSet::dup((**a1).clone(), level2)
                }
            }
            (Space::Sum(parts), ExactSet::Sum(sets)) if parts.len() == sets.len() => ExactSet::Sum(
                parts.iter().zip(sets).map(|(p, s)| p.closure_like(s, derived)).collect::<Result<_>>()?,
            ),
            (Space::Subspace(b, c), a) => b.closure_like(a, derived)?.intersect(c)?,
            (Space::Refined(..), _) => return Err(TopoError::ProbeOnly(self.name())),
            _ => return Err(self.mismatch(a)),
        })
    }

    pub fn closure(&self, a: &ExactSet) -> Result<ExactSet> {
        self.closure_like(a, false)
    }

    /// Points every neighbourhood of which meets `a` in infinitely many
    /// points (the derived set, as all shipped spaces are T1).
    pub fn omega_acc(&self, a: &ExactSet) -> Result<ExactSet> {
        self.closure_like(a, true)
    }

    pub fn interior(&self, a: &ExactSet) -> Result<ExactSet> {
        self.complement(&self.closure(&self.complement(a)?)?)
    }

    /// Exact openness. On star and cardinal refinements only sets of the
    /// form `U ∩ V*` or `U` with `x₀ ∉ U` (`U` open in the base) are
    /// recognized, so a union of such basics may be reported as not open.
    pub fn is_open(&self, a: &ExactSet) -> Result<bool> {
        let Space::Refined(base, spec) = self else {
            return Ok(self.same(&self.interior(a)?, a));
        };
        match spec.as_ref() {
            RefinementSpec::Dense { d } => {
                let plain = base.interior(a)?;
                let via_d = base.interior(&a.union(&base.complement(d)?)?)?.intersect(d)?;
                base.subset(a, &plain.union(&via_d)?)
            }
            RefinementSpec::Star { x0, .. } | RefinementSpec::Cardinal { x0, .. } => {
                if !a.contains(x0) && base.is_open(a)? {
                    return Ok(true);
                }
                for vs in spec.starred(base)? {
                    if !base.subset(a, &vs)? {
                        continue;
                    }
                    let u = base.interior(&a.union(&base.complement(&vs)?)?)?;
                    if base.same(&u.intersect(&vs)?, a) {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn is_empty(&self, a: &ExactSet) -> bool {
        match (self, a) {
            (Space::Branches(t), ExactSet::Seq(s)) => branch_set_empty(t.as_ref(), s),
            (Space::Refined(b, _), a) => b.is_empty(a),
            (Space::Subspace(b, _), a) => b.is_empty(a),
            _ => a.is_empty(),
        }
    }

    pub fn subset(&self, a: &ExactSet, b: &ExactSet) -> Result<bool> {
        Ok(self.is_empty(&a.difference(b)?))
    }

    pub fn meets(&self, a: &ExactSet, b: &ExactSet) -> Result<bool> {
        Ok(!self.is_empty(&a.intersect(b)?))
    }

    /// Semantic equality; mismatched carriers compare unequal.
    pub fn same(&self, a: &ExactSet, b: &ExactSet) -> bool {
        a == b || (self.subset(a, b).unwrap_or(false) && self.subset(b, a).unwrap_or(false))
    }

    /// `W(U, Y)`: level 2 over `U`, level 1 over `U ∖ Y`.
    pub fn dup_basic(&self, u: &ExactSet, y: &[Point]) -> Result<ExactSet> {
        let Space::Duplicate(f) = self else {
            return Err(TopoError::Unsupported(format!("{} is not a duplicate", self.name())));
        };
        let ys = f.points(y)?;
        Ok(ExactSet::dup(u.difference(&ys)?, u.clone()))
    }

    fn dup_pool(f: &Space) -> Vec<Point> {
        f.candidates(&f.full(), DUP_POOL).into_iter().take(DUP_POOL).collect()
    }

    /// The finite probe family at `depth`.
    pub fn probe_basis(&self, depth: usize) -> Vec<ExactSet> {
        match self {
            Space::Line(l) => l.basis(depth),
            Space::Seq => {
                let d = depth.min(SEQ_BASIS_CAP);
                let mut out = Vec::new();
                let mut frontier: Vec<Vec<u64>> = vec![Vec::new()];
                for len in 0..=d {
                    let mut next = Vec::new();
                    for s in &frontier {
                        out.push(ExactSet::Seq(SeqSet::cylinder(s)));
                        if len < d {
                            for k in 0..=d as u64 {
                                let mut t = s.clone();
                                t.push(k);
                                next.push(t);
                            }
                        }
                    }
                    frontier = next;
                }
                out
            }
            Space::Branches(t) => {
                let mut out = Vec::new();
                let mut frontier: Vec<Vec<u64>> = vec![Vec::new()];
                for len in 0..=depth {
                    let mut next = Vec::new();
                    for s in &frontier {
                        out.push(ExactSet::Seq(SeqSet::cylinder(s)));
                        if len < depth {
                            let cap = t.child_count(s).map_or(depth as u64 + 1, |c| c.min(depth as u64 + 1));
                            for k in 0..cap {
                                let mut c = s.clone();
                                c.push(k);
                                next.push(c);
                            }
                        }
                    }
                    frontier = next;
                }
                out
            }
            Space::Duplicate(f) => {
                let pool = Self::dup_pool(f);
                let mut out: Vec<ExactSet> =
                    pool.iter().filter_map(|y| self.singleton(&y.clone().tagged(1)).ok()).collect();
                for u in f.probe_basis(depth) {
                    out.push(ExactSet::dup(u.clone(), u.clone()));
                    for y in pool.iter().filter(|y| u.contains(y)) {
                        if let Ok(w) = self.dup_basic(&u, std::slice::from_ref(y)) {
                            out.push(w);
                        }
                    }
                }
                out
            }
            Space::Sum(parts) => {
                let mut out = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    for b in p.probe_basis(depth) {
                        out.push(self.inject(i, b));
                    }
                }
                out
            }
            Space::Subspace(b, c) => b
                .probe_basis(depth)
                .into_iter()
                .filter_map(|u| u.intersect(c).ok())
                .filter(|u| !b.is_empty(u))
                .collect(),
            Space::Refined(b, spec) => refined_basis(b, spec, depth, None),
        }
    }

    /// Embeds a set of summand `i` into a sum space.
    pub fn inject(&self, i: usize, s: ExactSet) -> ExactSet {
        match self {
            Space::Sum(parts) => ExactSet::Sum(
                parts.iter().enumerate().map(|(j, p)| if j == i { s.clone() } else { p.empty() }).collect(),
            ),
            _ => s,
        }
    }

    /// All depth-`depth` probe basics containing `p`.
    pub fn neighborhoods_of(&self, p: &Point, depth: usize) -> Result<Vec<ExactSet>> {
        if !self.contains(p) {
            return Err(TopoError::OutsideCarrier(p.to_string()));
        }
        Ok(match (self, p) {
            (Space::Line(l), Point::Real(x)) => l.neighborhoods(x, depth),
            (Space::Seq, Point::Seq(s)) => (0..=depth)
                .map(|n| s.take(n))
                .filter(|pre| pre.iter().all(|&k| k <= depth as u64))
                .map(|pre| ExactSet::Seq(SeqSet::cylinder(&pre)))
                .collect(),
            (Space::Branches(_), Point::Seq(s)) => {
                (0..=depth).map(|n| ExactSet::Seq(SeqSet::cylinder(&s.take(n)))).collect()
            }
            (Space::Duplicate(f), Point::Tagged(x, t)) => {
                let pool = Self::dup_pool(f);
                let mut out = Vec::new();
                if *t == 1 {
                    out.push(self.singleton(p)?);
                }
                for u in f.neighborhoods_of(x, depth)? {
                    out.push(ExactSet::dup(u.clone(), u.clone()));
                    if *t == 2 {
                        out.push(self.dup_basic(&u, std::slice::from_ref(x))?);
                    }
                    for y in pool.iter().filter(|y| *y != &**x && u.contains(y)) {
                        out.push(self.dup_basic(&u, std::slice::from_ref(y))?);
                    }
                }
                out
            }
            (Space::Sum(parts), Point::Tagged(x, i)) => {
                let i = *i as usize;
                parts[i].neighborhoods_of(x, depth)?.into_iter().map(|u| self.inject(i, u)).collect()
            }
            (Space::Subspace(b, c), p) => {
                b.neighborhoods_of(p, depth)?.into_iter().filter_map(|u| u.intersect(c).ok()).collect()
            }
            (Space::Refined(b, spec), p) => refined_basis(b, spec, depth, Some(p)),
            _ => return Err(TopoError::OutsideCarrier(p.to_string())),
        })
    }

    /// Deterministic candidate points of `a`, favouring simple ones.
    pub fn candidates(&self, a: &ExactSet, per: usize) -> Vec<Point> {
        let mut out: Vec<Point> = match (self, a) {
            (Space::Line(_), ExactSet::Linear(s)) => s.candidates(per).into_iter().map(Point::Real).collect(),
            (Space::Seq, ExactSet::Seq(s)) => s.candidates(per).into_iter().map(Point::Seq).collect(),
            (Space::Branches(t), ExactSet::Seq(s)) => branch_candidates(t.as_ref(), s, per),
            (Space::Duplicate(f), ExactSet::Dup(a1, a2)) => {
                let mut v: Vec<Point> = f.candidates(a1, per).into_iter().map(|x| x.tagged(1)).collect();
                v.extend(f.candidates(a2, per).into_iter().map(|x| x.tagged(2)));
                v
            }
            (Space::Sum(parts), ExactSet::Sum(sets)) => parts
                .iter()
                .zip(sets)
                .enumerate()
                .flat_map(|(i, (p, s))| p.candidates(s, per).into_iter().map(move |x| x.tagged(i as u8)))
                .collect(),
            (Space::Subspace(b, c), a) => match a.intersect(c) {
                Ok(s) => b.candidates(&s, per),
                Err(_) => Vec::new(),
            },
            (Space::Refined(b, _), a) => b.candidates(a, per),
            _ => Vec::new(),
        };
        let mut seen = std::collections::HashSet::new();
        out.retain(|p| a.contains(p) && seen.insert(p.clone()));
        out
    }

    /// `n` distinct points of `a`, deterministic in `seed`. Returns fewer
    /// when the bounded enumeration cannot find `n`.
    pub fn sample_points(&self, a: &ExactSet, n: usize, seed: u64) -> Result<Vec<Point>> {
        if self.is_empty(a) {
            return Err(TopoError::EmptySet);
        }
        let mut pool = self.candidates(a, (2 * n).max(4));
        if pool.is_empty() {
            return Err(TopoError::EmptySet);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pool.shuffle(&mut rng);
        pool.truncate(n);
        Ok(pool)
    }

    /// Disjoint basics around two distinct points, searching depths
    /// `1..=max_depth`.
    pub fn separate(&self, p: &Point, q: &Point, max_depth: usize) -> Result<Option<(ExactSet, ExactSet, usize)>> {
        if p == q {
            return Err(TopoError::SamePoint(p.to_string()));
        }
        for d in 1..=max_depth {
            let np = self.neighborhoods_of(p, d)?;
            let nq = self.neighborhoods_of(q, d)?;
            for u in &np {
                for v in &nq {
                    if !self.meets(u, v)? {
                        return Ok(Some((u.clone(), v.clone(), d)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Parses a registry identifier such as `q`, `dup(q)` or `sum(q,seq)`.
    pub fn from_id(id: &str) -> Result<Space> {
        let id = id.trim();
        if let Some(inner) = id.strip_prefix("dup(").and_then(|s| s.strip_suffix(')')) {
            return Space::duplicate(Space::from_id(inner)?);
        }
        if let Some(inner) = id.strip_prefix("sum(").and_then(|s| s.strip_suffix(')')) {
            return Ok(Space::sum(split_top(inner).iter().map(|s| Space::from_id(s)).collect::<Result<_>>()?));
        }
        if let Some(inner) = id.strip_prefix("disc(").and_then(|s| s.strip_suffix(')')) {
            return match Space::from_id(inner)? {
                Space::Line(l) => Space::line_with(l.atoms, LineTopology::Discrete),
                other => Err(TopoError::UnknownName(format!("disc({})", other.name()))),
            };
        }
        Ok(match id {
            "q" => Space::rationals(),
            "q2" => Space::rationals_split(),
            "field" => Space::line(vec![Trace::Field]),
            "qh" => Space::line(vec![Trace::Harmonic, Trace::NonHarmonic]),
            "qk" => Space::line_with(vec![Trace::Harmonic, Trace::NonHarmonic], LineTopology::KTopology)?,
            "m1" => Space::line(vec![Trace::M1]),
            "nat" => Space::line(vec![Trace::Naturals]),
            "seq" => Space::Seq,
            "xsum" => Space::sum(vec![Space::line(vec![Trace::Dyadic]), Space::line(vec![Trace::NonDyadic])]),
            other => match crate::gallery::space_by_id(other) {
                Some(r) => return r,
                None => return Err(TopoError::UnknownName(other.to_string())),
            },
        })
    }
}

/// Splits on commas not nested in parentheses.
pub(crate) fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out
}

fn refined_basis(base: &Space, spec: &RefinementSpec, depth: usize, at: Option<&Point>) -> Vec<ExactSet> {
    let ambient: Vec<ExactSet> = match at {
        Some(p) => base.neighborhoods_of(p, depth).unwrap_or_default(),
        None => base.probe_basis(depth),
    };
    let mut out = Vec::new();
    match spec {
        RefinementSpec::Dense { d } => {
            for u in ambient {
                if let Ok(ud) = u.intersect(d) {
                    if !base.is_empty(&ud) && at.map_or(true, |p| ud.contains(p)) {
                        out.push(ud);
                    }
                }
                out.push(u);
            }
        }
        RefinementSpec::Star { x0, .. } | RefinementSpec::Cardinal { x0, .. } => {
            let stars = spec.starred(base).unwrap_or_default();
            let take = stars.len().min(depth.max(1));
            for u in ambient.iter().chain(std::iter::once(&base.full())) {
                if !u.contains(x0) {
                    out.push(u.clone());
                }
                for vs in &stars[..take] {
                    if let Ok(b) = u.intersect(vs) {
                        if !base.is_empty(&b) && at.map_or(true, |p| b.contains(p)) {
                            out.push(b);
                        }
                    }
                }
            }
            if let Some(p) = at {
                out.retain(|b| b.contains(p));
            }
        }
    }
    out
}

fn branch_set_empty(t: &dyn BranchTree, s: &SeqSet) -> bool {
    if s.added().any(|b| t.valid_branch(b)) {
        return false;
    }
    fn walk(t: &dyn BranchTree, node: &CylTree, path: &mut Vec<u64>) -> bool {
        // returns true when some valid branch runs through a true region below
        let count = t.child_count(path);
        if node.default_value() {
            let listed = node.children().filter(|(k, _)| count.map_or(true, |c| *k < c)).count() as u64;
            let free = match count {
                None => true,
                Some(c) => c > listed,
            };
            if free {
                return true;
            }
        }
        for (k, child) in node.children() {
            if count.is_some_and(|c| k >= c) {
                continue;
            }
            path.push(k);
            let hit = walk(t, child, path);
            path.pop();
            if hit {
                return true;
            }
        }
        false
    }
    // removed branches are isolated only in degenerate trees; a region
    // holding only removed branches is detected by candidate search below
    let mut path = Vec::new();
    if !walk(t, s.tree(), &mut path) {
        return true;
    }
    if s.removed().next().is_none() {
        return false;
    }
    branch_candidates(t, s, 8).is_empty()
}

fn branch_candidates(t: &dyn BranchTree, s: &SeqSet, per: usize) -> Vec<Point> {
    let mut out: Vec<Point> = s.added().filter(|b| t.valid_branch(b)).cloned().map(Point::Seq).collect();
    fn walk(t: &dyn BranchTree, s: &SeqSet, node: &CylTree, path: &mut Vec<u64>, per: usize, out: &mut Vec<Point>) {
        let count = t.child_count(path);
        if node.default_value() {
            let mut k = 0u64;
            let mut taken = 0;
            while taken < per && count.map_or(true, |c| k < c) && k < per as u64 + 64 {
                if node.children().all(|(c, _)| c != k) {
                    let mut p = path.clone();
                    p.push(k);
                    for tail in [0u64, 1] {
                        let b = SeqPoint::new(p.clone(), tail);
                        if t.valid_branch(&b) && s.contains(&b) {
                            out.push(Point::Seq(b));
                            taken += 1;
                        }
                    }
                }
                k += 1;
            }
        }
        for (k, child) in node.children() {
            if count.is_some_and(|c| k >= c) {
                continue;
            }
            path.push(k);
            walk(t, s, child, path, per, out);
            path.pop();
        }
    }
    walk(t, s, s.tree(), &mut Vec::new(), per, &mut out);
    out
}

impl Space {
    /// A seeded random set in normal form: up to `size` intervals and
    /// points per atom on lines, cylinders and points on sequences,
    /// componentwise on duplicates and sums. Refinements have no exact
    /// algebra and are refused.
    pub fn random_set(&self, rng: &mut impl Rng, size: usize) -> Result<ExactSet> {
        Ok(match self {
            Space::Line(l) => {
                let mut out = LinearSet::empty();
                for &t in &l.atoms {
                    if rng.gen_bool(0.3) {
                        continue;
                    }
                    let mut p = Pattern::empty();
                    for _ in 0..rng.gen_range(0..=size) {
                        let mut ends = [random_end(rng, t), random_end(rng, t)];
                        ends.sort();
                        let left = (!rng.gen_bool(0.1)).then(|| (ends[0].clone(), rng.gen_bool(0.5)));
                        let right = (!rng.gen_bool(0.1)).then(|| (ends[1].clone(), rng.gen_bool(0.5)));
                        p = p.union(&Pattern::interval(left, right), t);
                    }
                    let pool = t.points_in(Some(&FieldPoint::from_int(-4)), Some(&FieldPoint::from_int(4)), 24);
                    if !pool.is_empty() {
                        let add: Vec<FieldPoint> = (0..rng.gen_range(0..=size)).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
                        let del: Vec<FieldPoint> = (0..rng.gen_range(0..=size)).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
                        p = p.union(&Pattern::points(add), t).difference(&Pattern::points(del), t);
                    }
                    out = out.union(&LinearSet::from_parts([(t, p)]));
                }
                ExactSet::Linear(out)
            }
            Space::Seq | Space::Branches(_) => {
                let mut out = SeqSet::empty();
                for _ in 0..rng.gen_range(0..=size) {
                    let s: Vec<u64> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..3)).collect();
                    let c = SeqSet::cylinder(&s);
                    out = if rng.gen_bool(0.25) { out.difference(&c) } else { out.union(&c) };
                }
                let pt = |rng: &mut dyn rand::RngCore| {
                    let s: Vec<u64> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..3)).collect();
                    SeqPoint::new(s, rng.gen_range(0..3))
                };
                let add: Vec<SeqPoint> = (0..rng.gen_range(0..=size)).map(|_| pt(rng)).collect();
                let del: Vec<SeqPoint> = (0..rng.gen_range(0..=size)).map(|_| pt(rng)).collect();
                ExactSet::Seq(out.union(&SeqSet::points(add)).difference(&SeqSet::points(del)))
            }
            Space::Duplicate(f) => ExactSet::dup(f.random_set(rng, size)?, f.random_set(rng, size)?),
            Space::Sum(parts) => ExactSet::Sum(parts.iter().map(|p| p.random_set(rng, size)).collect::<Result<_>>()?),
            Space::Subspace(b, s) => b.random_set(rng, size)?.intersect(s)?,
            Space::Refined(..) => return Err(TopoError::ProbeOnly(self.name())),
        })
    }
}

/// An interval endpoint near the atom: small rationals, shifted by √2 for
/// the irrational atoms, and `1/n` for the fan atoms.
fn random_end(rng: &mut impl Rng, t: Trace) -> FieldPoint {
    let q = FieldPoint::from_ratio(rng.gen_range(-12..=12), rng.gen_range(1..=4));
    match t {
        Trace::Harmonic | Trace::M1 if rng.gen_bool(0.6) => FieldPoint::from_ratio(1, rng.gen_range(1..=9)),
        Trace::RatPlusSqrt2 | Trace::WilhelmH | Trace::Field if rng.gen_bool(0.5) => &q + &FieldPoint::sqrt2(),
        _ => q,
    }
}

pub fn dyadic(k: i64, j: u32) -> FieldPoint {
    FieldPoint::rational(Rat::new(k.into(), num_bigint::BigInt::from(1u64) << j))
}

pub fn unit(n: i64) -> Rat {
    int(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> ExactSet {
        s.parse().unwrap()
    }

    #[test]
    fn line_basis_depth_two() {
        let q = Space::rationals();
        let b = q.probe_basis(2);
        assert!(b.contains(&set("rational:(-1,1)")));
        assert!(b.contains(&set("rational:(3/2,5/2)")));
        assert!(b.iter().all(|u| u.as_linear().is_some()));
    }

    #[test]
    fn seq_basis_depth_two() {
        let b = Space::Seq.probe_basis(2);
        assert_eq!(b.len(), 1 + 3 + 9);
    }

    #[test]
    fn duplicate_singleton_neighbourhood() {
        let d = Space::duplicate(Space::rationals()).unwrap();
        let p = Point::int(0).tagged(1);
        let nb = d.neighborhoods_of(&p, 3).unwrap();
        assert!(nb.contains(&d.singleton(&p).unwrap()));
    }

    #[test]
    fn interior_of_dyadic_closure() {
        let q = Space::rationals_split();
        let a = set("dyadic:(0,1)");
        let int = q.interior(&q.closure(&a).unwrap()).unwrap();
        assert_eq!(int, set("dyadic:(0,1) | nondyadic:(0,1)"));
    }
}
