//! Computable maps with exact preimages, and checkers for near
//! continuity, closed graph, separation, continuity and openness variants.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cylinder::{CylTree, SeqSet};
use crate::error::{Result, TopoError};
use crate::field::FieldPoint;
use crate::linear::{LineTopology, LinearSet, Pattern};
use crate::point::{Point, SeqPoint};
use crate::set::ExactSet;
use crate::space::{Space, Tier};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Verified,
    Refuted,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Verified => "Verified",
            Outcome::Refuted => "Refuted",
            Outcome::Unknown => "Unknown",
        })
    }
}

impl std::str::FromStr for Outcome {
    type Err = crate::error::ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "verified" => Ok(Outcome::Verified),
            "refuted" => Ok(Outcome::Refuted),
            "unknown" => Ok(Outcome::Unknown),
            other => Err(crate::error::ParseError::new(format!("unknown outcome {}", other))),
        }
    }
}

/// A three-valued verdict carrying the sets and points that justify it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub property: String,
    pub subject: String,
    pub witness_sets: Vec<ExactSet>,
    pub witness_points: Vec<Point>,
    #[serde(rename = "verdict")]
    pub outcome: Outcome,
    pub depth: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Verdict {
    pub fn new(property: &str, subject: impl Into<String>, outcome: Outcome, depth: usize) -> Self {
        Verdict {
            property: property.into(),
            subject: subject.into(),
            witness_sets: Vec::new(),
            witness_points: Vec::new(),
            outcome,
            depth,
            note: String::new(),
        }
    }

    pub fn sets(mut self, s: impl IntoIterator<Item = ExactSet>) -> Self {
        self.witness_sets.extend(s);
        self
    }

    pub fn points(mut self, p: impl IntoIterator<Item = Point>) -> Self {
        self.witness_points.extend(p);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = n.into();
        self
    }

    pub fn is(&self, o: Outcome) -> bool {
        self.outcome == o
    }
}

/// Reassembly of linear pieces: points of `trace` in domain summand `from`
/// go, unchanged, to codomain summand `to` (`None` for an unsplit space).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub from: Option<u8>,
    pub trace: Trace,
    pub to: Option<u8>,
}

impl Route {
    pub fn new(from: Option<u8>, trace: Trace, to: Option<u8>) -> Self {
        Route { from, trace, to }
    }
}

/// Maps whose preimages are computed outside this module.
pub trait MapOracle: Send + Sync + fmt::Debug {
    fn eval(&self, p: &Point) -> Result<Point>;
    fn preimage(&self, v: &ExactSet) -> Result<ExactSet>;
    fn image(&self, _a: &ExactSet) -> Result<ExactSet> {
        Err(TopoError::Unsupported("image".into()))
    }
}

#[derive(Clone, Debug)]
pub enum MapKind {
    /// Same points, same set representation on both sides.
    Identity,
    Route(Vec<Route>),
    /// Sends `region` to the point `to`, fixes the rest of a line.
    Collapse { region: ExactSet, to: Point },
    Constant(Point),
    /// Duplicate to its base, forgetting the level.
    DupProjection,
    /// A sequence to its first entry, as a natural number.
    SeqProjection,
    /// `outer ∘ inner`.
    Compose(Box<CMap>, Box<CMap>),
    /// Summand-wise maps from a sum into a common codomain.
    Sum(Vec<CMap>),
    Oracle(Arc<dyn MapOracle>),
}

#[derive(Clone, Debug)]
pub struct CMap {
    pub name: String,
    pub domain: Space,
    pub codomain: Space,
    pub kind: MapKind,
}

fn linear_part(s: &ExactSet, idx: Option<u8>) -> Result<&LinearSet> {
    let part = match (s, idx) {
        (ExactSet::Sum(parts), Some(i)) => parts.get(i as usize),
        (s, None) => Some(s),
        _ => None,
    };
    part.and_then(ExactSet::as_linear)
        .ok_or_else(|| TopoError::CarrierMismatch(format!("{} has no linear component {:?}", s, idx)))
}

fn place(space: &Space, idx: Option<u8>, part: LinearSet) -> ExactSet {
    match idx {
        None => ExactSet::Linear(part),
        Some(i) => space.base().inject(i as usize, ExactSet::Linear(part)),
    }
}

fn naturals_set(s: &LinearSet) -> (Vec<u64>, bool, u64) {
    // (members below bound, membership from bound on, bound)
    let mut bound = 0u64;
    if let Some(p) = s.part(Trace::Naturals) {
        for (x, _) in p.breakpoints() {
            let f = x.floor();
            let b: u64 = (f + 2u8).try_into().unwrap_or(0);
            bound = bound.max(b);
        }
    }
    let members = (0..bound).filter(|k| s.contains(&FieldPoint::from_int(*k as i64))).collect();
    (members, s.contains(&FieldPoint::from_int(bound as i64)), bound)
}

impl CMap {
    pub fn new(name: impl Into<String>, domain: Space, codomain: Space, kind: MapKind) -> Self {
        CMap { name: name.into(), domain, codomain, kind }
    }

    pub fn identity(name: impl Into<String>, domain: Space, codomain: Space) -> Self {
        CMap::new(name, domain, codomain, MapKind::Identity)
    }

    pub fn compose(name: impl Into<String>, outer: CMap, inner: CMap) -> Self {
        let (d, c) = (inner.domain.clone(), outer.codomain.clone());
        CMap::new(name, d, c, MapKind::Compose(Box::new(outer), Box::new(inner)))
    }

    pub fn eval(&self, p: &Point) -> Result<Point> {
        if !self.domain.contains(p) {
            return Err(TopoError::OutsideCarrier(p.to_string()));
        }
        match &self.kind {
            MapKind::Identity => Ok(p.clone()),
            MapKind::Route(routes) => {
                let (x, tag) = match p {
                    Point::Tagged(x, i) => (&**x, Some(*i)),
                    other => (other, None),
                };
                let r = x.as_real().ok_or_else(|| TopoError::OutsideCarrier(p.to_string()))?;
                let route = routes
                    .iter()
                    .find(|rt| rt.from == tag && rt.trace.contains(r))
                    .ok_or_else(|| TopoError::OutsideCarrier(p.to_string()))?;
                Ok(match route.to {
                    None => x.clone(),
                    Some(j) => x.clone().tagged(j),
                })
            }
            MapKind::Collapse { region, to } => Ok(if region.contains(p) { to.clone() } else { p.clone() }),
            MapKind::Constant(c) => Ok(c.clone()),
            MapKind::DupProjection => Ok(p.untag().map(|(x, _)| x.clone()).expect("duplicate point")),
            MapKind::SeqProjection => {
                let s = p.as_seq().expect("sequence point");
                Ok(Point::int(s.at(0) as i64))
            }
            MapKind::Compose(outer, inner) => outer.eval(&inner.eval(p)?),
            MapKind::Sum(parts) => match p {
                Point::Tagged(x, i) => parts[*i as usize].eval(x),
                _ => Err(TopoError::OutsideCarrier(p.to_string())),
            },
            MapKind::Oracle(o) => o.eval(p),
        }
    }

    /// Exact preimage of any set of the codomain's algebra.
    pub fn preimage(&self, v: &ExactSet) -> Result<ExactSet> {
        let raw = match &self.kind {
            MapKind::Identity => v.clone(),
            MapKind::Route(routes) => {
                let mut out = self.domain.base().empty();
                for r in routes {
                    let part = linear_part(v, r.to)?.restrict(&[r.trace]);
                    out = out.union(&place(&self.domain, r.from, part))?;
                }
                out
            }
            MapKind::Collapse { region, to } => {
                let rest = v.difference(region)?;
                if v.contains(to) {
                    rest.union(region)?
                } else {
                    rest
                }
            }
            MapKind::Constant(c) => {
                if v.contains(c) {
                    self.domain.full()
                } else {
                    self.domain.empty()
                }
            }
            MapKind::DupProjection => ExactSet::dup(v.clone(), v.clone()),
            MapKind::SeqProjection => {
                let lin = v.as_linear().ok_or_else(|| TopoError::CarrierMismatch(v.to_string()))?;
                let (members, tail, bound) = naturals_set(lin);
                let mut tree = CylTree::leaf(tail);
                for k in 0..bound {
                    tree.assign(&[k], members.contains(&k));
                }
                ExactSet::Seq(SeqSet::from_tree(tree))
            }
            MapKind::Compose(outer, inner) => inner.preimage(&outer.preimage(v)?)?,
            MapKind::Sum(parts) => {
                ExactSet::Sum(parts.iter().map(|m| m.preimage(v)).collect::<Result<_>>()?)
            }
            MapKind::Oracle(o) => o.preimage(v)?,
        };
        raw.intersect(&self.domain.full())
    }

    /// Exact image, where the map supports it.
    pub fn image(&self, a: &ExactSet) -> Result<ExactSet> {
        let a = a.intersect(&self.domain.full())?;
        let raw = match &self.kind {
            MapKind::Identity => a,
            MapKind::Route(routes) => {
                let mut out = self.codomain.base().empty();
                for r in routes {
                    let part = linear_part(&a, r.from)?.restrict(&[r.trace]);
                    out = out.union(&place(&self.codomain, r.to, part))?;
                }
                out
            }
            MapKind::Collapse { region, to } => {
                let rest = a.difference(region)?;
                if self.domain.meets(&a, region)? {
                    rest.union(&self.codomain.singleton(to)?)?
                } else {
                    rest
                }
            }
            MapKind::Constant(c) => {
                if self.domain.is_empty(&a) {
                    self.codomain.empty()
                } else {
                    self.codomain.singleton(c)?
                }
            }
            MapKind::DupProjection => match &a {
                ExactSet::Dup(x, y) => x.union(y)?,
                other => return Err(TopoError::CarrierMismatch(other.to_string())),
            },
            MapKind::SeqProjection => {
                let s = a.as_seq().ok_or_else(|| TopoError::CarrierMismatch(a.to_string()))?;
                let nat = |k: u64| FieldPoint::from_int(k as i64);
                let root = s.tree();
                let listed: Vec<(u64, bool)> = root.children().map(|(k, c)| (k, !c.is_empty())).collect();
                let mut pat = if root.default_value() {
                    let gone = listed.iter().filter(|(_, ne)| !ne).map(|(k, _)| nat(*k));
                    Pattern::full().difference(&Pattern::points(gone), Trace::Naturals)
                } else {
                    Pattern::points(listed.iter().filter(|(_, ne)| *ne).map(|(k, _)| nat(*k)))
                };
                pat = pat.union(&Pattern::points(s.added().map(|p| nat(p.at(0)))), Trace::Naturals);
                ExactSet::Linear(LinearSet::from_parts([(Trace::Naturals, pat)]))
            }
            MapKind::Compose(outer, inner) => outer.image(&inner.image(&a)?)?,
            MapKind::Sum(parts) => match &a {
                ExactSet::Sum(sets) => {
                    let mut out = self.codomain.empty();
                    for (m, s) in parts.iter().zip(sets) {
                        out = out.union(&m.image(s)?)?;
                    }
                    out
                }
                other => return Err(TopoError::CarrierMismatch(other.to_string())),
            },
            MapKind::Oracle(o) => o.image(&a)?,
        };
        raw.intersect(&self.codomain.full())
    }

    pub fn has_image(&self) -> bool {
        match &self.kind {
            MapKind::Oracle(_) => false,
            MapKind::Compose(a, b) => a.has_image() && b.has_image(),
            MapKind::Sum(parts) => parts.iter().all(CMap::has_image),
            _ => true,
        }
    }

    /// Inverse of a bijective identity or reassembly map.
    pub fn inverse(&self) -> Result<CMap> {
        let name = format!("inverse({})", self.name);
        match &self.kind {
            MapKind::Identity => Ok(CMap::identity(name, self.codomain.clone(), self.domain.clone())),
            MapKind::Route(routes) => {
                for (i, a) in routes.iter().enumerate() {
                    for b in &routes[i + 1..] {
                        if a.to == b.to && a.trace == b.trace {
                            return Err(TopoError::Unsupported(format!("{} is not injective", self.name)));
                        }
                    }
                }
                let back = routes.iter().map(|r| Route::new(r.to, r.trace, r.from)).collect();
                Ok(CMap::new(name, self.codomain.clone(), self.domain.clone(), MapKind::Route(back)))
            }
            _ => Err(TopoError::Unsupported(format!("{} has no computable inverse", self.name))),
        }
    }

    /// `f ⊕ id` on `F ⊕ E_d`, with `E_d` the codomain made discrete.
    pub fn surjectivize(&self) -> Result<CMap> {
        let discrete = discrete_copy(&self.codomain)?;
        let id = CMap::identity("id", discrete.clone(), self.codomain.clone());
        Ok(CMap::new(
            format!("surj({})", self.name),
            Space::sum(vec![self.domain.clone(), discrete]),
            self.codomain.clone(),
            MapKind::Sum(vec![self.clone(), id]),
        ))
    }
}

fn discrete_copy(s: &Space) -> Result<Space> {
    match s {
        Space::Line(l) => Space::line_with(l.atoms.clone(), LineTopology::Discrete),
        Space::Subspace(b, c) => Space::subspace(discrete_copy(b)?, c.clone()),
        other => Err(TopoError::Unsupported(format!("discrete copy of {}", other.name()))),
    }
}

fn need_exact(space: &Space) -> Option<String> {
    (space.tier() != Tier::Exact).then(|| format!("{} has no exact closure", space.name()))
}

/// `f⁻¹(V) ⊆ int cl f⁻¹(V)` for every codomain basic `V` at `depth`.
pub fn check_near_continuity(f: &CMap, depth: usize) -> Verdict {
    let prop = "near_continuity";
    if let Some(why) = need_exact(&f.domain) {
        return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(why);
    }
    let dom = &f.domain;
    for v in f.codomain.probe_basis(depth) {
        let step = || -> Result<Option<Point>> {
            let p = f.preimage(&v)?;
            let core = dom.interior(&dom.closure(&p)?)?;
            let bad = p.difference(&core)?;
            Ok(dom.candidates(&bad, 2).into_iter().next())
        };
        match step() {
            Ok(None) => {}
            Ok(Some(x)) => return Verdict::new(prop, &f.name, Outcome::Refuted, depth).sets([v]).points([x]),
            Err(e) => return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(e.to_string()),
        }
    }
    Verdict::new(prop, &f.name, Outcome::Verified, depth)
}

/// `f(U) ⊆ int cl f(U)` for every domain basic `U` at `depth`.
pub fn check_nearly_open(f: &CMap, depth: usize) -> Verdict {
    let prop = "nearly_open";
    if let Some(why) = need_exact(&f.codomain) {
        return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(why);
    }
    let cod = &f.codomain;
    for u in f.domain.probe_basis(depth) {
        let step = || -> Result<Option<Point>> {
            let im = f.image(&u)?;
            let bad = im.difference(&cod.interior(&cod.closure(&im)?)?)?;
            Ok(cod.candidates(&bad, 2).into_iter().next())
        };
        match step() {
            Ok(None) => {}
            Ok(Some(y)) => return Verdict::new(prop, &f.name, Outcome::Refuted, depth).sets([u]).points([y]),
            Err(e) => return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(e.to_string()),
        }
    }
    Verdict::new(prop, &f.name, Outcome::Verified, depth)
}

/// `int f(U) ≠ ∅` for every domain basic `U` at `depth`.
pub fn check_feebly_open(f: &CMap, depth: usize) -> Verdict {
    let prop = "feebly_open";
    if !f.has_image() {
        return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note("map has no image operator");
    }
    if let Some(why) = need_exact(&f.codomain) {
        return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(why);
    }
    let cod = &f.codomain;
    for u in f.domain.probe_basis(depth) {
        match f.image(&u).and_then(|im| cod.interior(&im)) {
            Ok(int) if cod.is_empty(&int) => {
                return Verdict::new(prop, &f.name, Outcome::Refuted, depth).sets([u]);
            }
            Ok(_) => {}
            Err(e) => return Verdict::new(prop, &f.name, Outcome::Unknown, depth).note(e.to_string()),
        }
    }
    Verdict::new(prop, &f.name, Outcome::Verified, depth)
}

/// Searches `U ∋ x`, `V ∋ y` with `U ∩ f⁻¹(V) = ∅` for each off-graph pair.
pub fn check_closed_graph(f: &CMap, pairs: &[(Point, Point)], depth: usize) -> Result<Vec<Verdict>> {
    pairs.iter().map(|(x, y)| closed_graph_pair(f, x, y, depth)).collect()
}

fn closed_graph_pair(f: &CMap, x: &Point, y: &Point, depth: usize) -> Result<Verdict> {
    let subject = format!("{} at ({}, {})", f.name, x, y);
    if &f.eval(x)? == y {
        return Err(TopoError::OnGraph(format!("({}, {})", x, y)));
    }
    if !f.codomain.contains(y) {
        return Err(TopoError::OutsideCarrier(y.to_string()));
    }
    for d in 1..=depth {
        let us = f.domain.neighborhoods_of(x, d)?;
        for v in f.codomain.neighborhoods_of(y, d)? {
            let pre = f.preimage(&v)?;
            for u in &us {
                if !f.domain.meets(u, &pre)? {
                    return Ok(Verdict::new("closed_graph", subject, Outcome::Verified, d)
                        .sets([u.clone(), v])
                        .points([x.clone(), y.clone()]));
                }
            }
        }
    }
    Ok(Verdict::new("closed_graph", subject, Outcome::Unknown, depth).points([x.clone(), y.clone()]))
}

/// Searches codomain basics `V_x ∋ x`, `V_y ∋ y` whose preimages are
/// separated: `cl f⁻¹(V_x) ∩ f⁻¹(V_y) = ∅ = f⁻¹(V_x) ∩ cl f⁻¹(V_y)`.
pub fn check_separating(f: &CMap, pairs: &[(Point, Point)], depth: usize) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (x, y) in pairs {
        if x == y {
            return Err(TopoError::SamePoint(x.to_string()));
        }
        let subject = format!("{} at ({}, {})", f.name, x, y);
        if let Some(why) = need_exact(&f.domain) {
            out.push(Verdict::new("separating", subject, Outcome::Unknown, depth).note(why));
            continue;
        }
        let mut found = None;
        'search: for d in 1..=depth {
            let ys: Vec<(ExactSet, ExactSet, ExactSet)> = f
                .codomain
                .neighborhoods_of(y, d)?
                .into_iter()
                .map(|v| {
                    let p = f.preimage(&v)?;
                    let c = f.domain.closure(&p)?;
                    Ok((v, p, c))
                })
                .collect::<Result<_>>()?;
            for vx in f.codomain.neighborhoods_of(x, d)? {
                let px = f.preimage(&vx)?;
                let cx = f.domain.closure(&px)?;
                for (vy, py, cy) in &ys {
                    if !f.domain.meets(&cx, py)? && !f.domain.meets(&px, cy)? {
                        found = Some((vx, vy.clone(), d));
                        break 'search;
                    }
                }
            }
        }
        out.push(match found {
            Some((vx, vy, d)) => Verdict::new("separating", subject, Outcome::Verified, d)
                .sets([vx, vy])
                .points([x.clone(), y.clone()]),
            None => Verdict::new("separating", subject, Outcome::Unknown, depth).points([x.clone(), y.clone()]),
        });
    }
    Ok(out)
}

/// Continuity at each point: refuted by a basic `V ∋ f(p)` with
/// `p ∈ cl f⁻¹(E ∖ V)`, verified when every such `V` has a domain basic
/// `U ∋ p` inside `f⁻¹(V)`.
pub fn check_continuity(f: &CMap, points: &[Point], depth: usize) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for p in points {
        let subject = format!("{} at {}", f.name, p);
        let fp = f.eval(p)?;
        let vs = f.codomain.neighborhoods_of(&fp, depth)?;
        let mut verdict = None;
        if f.domain.tier() == Tier::Exact {
            for v in &vs {
                let outside = f.preimage(&f.codomain.complement(v)?)?;
                if f.domain.closure(&outside)?.contains(p) {
                    verdict = Some(
                        Verdict::new("continuity", &subject, Outcome::Refuted, depth)
                            .sets([v.clone(), outside])
                            .points([p.clone()]),
                    );
                    break;
                }
            }
        }
        if verdict.is_none() {
            let us = f.domain.neighborhoods_of(p, depth)?;
            let mut all = true;
            for v in &vs {
                let pre = f.preimage(v)?;
                let mut ok = false;
                for u in &us {
                    if f.domain.subset(u, &pre)? {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    all = false;
                    break;
                }
            }
            let o = if all { Outcome::Verified } else { Outcome::Unknown };
            verdict = Some(Verdict::new("continuity", &subject, o, depth).points([p.clone()]));
        }
        out.extend(verdict);
    }
    Ok(out)
}

/// Re-runs the set algebra behind a certificate.
pub fn recheck(f: &CMap, v: &Verdict) -> Result<bool> {
    let dom = &f.domain;
    Ok(match (v.property.as_str(), v.outcome) {
        ("closed_graph", Outcome::Verified) => {
            let [u, w] = &v.witness_sets[..] else { return Ok(false) };
            let [x, y] = &v.witness_points[..] else { return Ok(false) };
            u.contains(x) && w.contains(y) && !dom.meets(u, &f.preimage(w)?)?
        }
        ("separating", Outcome::Verified) => {
            let [vx, vy] = &v.witness_sets[..] else { return Ok(false) };
            let [x, y] = &v.witness_points[..] else { return Ok(false) };
            let (px, py) = (f.preimage(vx)?, f.preimage(vy)?);
            vx.contains(x)
                && vy.contains(y)
                && !dom.meets(&dom.closure(&px)?, &py)?
                && !dom.meets(&px, &dom.closure(&py)?)?
        }
        ("continuity", Outcome::Refuted) => {
            let (Some(w), Some(p)) = (v.witness_sets.first(), v.witness_points.first()) else { return Ok(false) };
            let outside = f.preimage(&f.codomain.complement(w)?)?;
            w.contains(&f.eval(p)?) && dom.closure(&outside)?.contains(p)
        }
        ("near_continuity", Outcome::Refuted) => {
            let (Some(w), Some(p)) = (v.witness_sets.first(), v.witness_points.first()) else { return Ok(false) };
            let pre = f.preimage(w)?;
            pre.contains(p) && !dom.interior(&dom.closure(&pre)?)?.contains(p)
        }
        _ => false,
    })
}

/// `n` pairs `(x, y)` with `y ≠ f(x)`, deterministic in `seed`.
pub fn off_graph_pairs(f: &CMap, n: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
    let xs = f.domain.sample_points(&f.domain.full(), n.max(8), seed)?;
    let ys = f.codomain.sample_points(&f.codomain.full(), n.max(8), seed ^ 0x9e37)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < n && guard < 50 * n {
        guard += 1;
        let x = xs.choose(&mut rng).expect("nonempty");
        let y = ys.choose(&mut rng).expect("nonempty");
        if &f.eval(x)? != y && !out.contains(&(x.clone(), y.clone())) {
            out.push((x.clone(), y.clone()));
        }
    }
    Ok(out)
}

/// `n` pairs of distinct codomain points, deterministic in `seed`.
pub fn codomain_pairs(f: &CMap, n: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
    let ys = f.codomain.sample_points(&f.codomain.full(), n.max(8), seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < n && guard < 50 * n {
        guard += 1;
        let a = ys.choose(&mut rng).expect("nonempty");
        let b = ys.choose(&mut rng).expect("nonempty");
        if a != b && !out.contains(&(a.clone(), b.clone())) {
            out.push((a.clone(), b.clone()));
        }
    }
    Ok(out)
}

pub fn seq_point(p: &Point) -> Option<&SeqPoint> {
    p.as_seq()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> ExactSet {
        s.parse().unwrap()
    }

    fn xsum_identity() -> CMap {
        let dom = Space::rationals_split();
        let cod = Space::from_id("xsum").unwrap();
        let routes = vec![Route::new(None, Trace::Dyadic, Some(0)), Route::new(None, Trace::NonDyadic, Some(1))];
        CMap::new("xsum_identity", dom, cod, MapKind::Route(routes))
    }

    #[test]
    fn xsum_preimage_and_image() {
        let f = xsum_identity();
        let v = set("sum(dyadic:(0,1); empty)");
        assert_eq!(f.preimage(&v).unwrap(), set("dyadic:(0,1)"));
        assert_eq!(f.image(&set("dyadic:(0,1) | nondyadic:(0,1)")).unwrap(), set("sum(dyadic:(0,1); nondyadic:(0,1))"));
    }

    #[test]
    fn xsum_near_continuous_not_continuous() {
        let f = xsum_identity();
        assert!(check_near_continuity(&f, 4).is(Outcome::Verified));
        let c = check_continuity(&f, &[Point::int(0)], 4).unwrap();
        assert!(c[0].is(Outcome::Refuted));
        assert!(recheck(&f, &c[0]).unwrap());
    }

    #[test]
    fn collapse_is_not_nearly_continuous() {
        let q = Space::rationals();
        let f = CMap::new(
            "collapse",
            q.clone(),
            q,
            MapKind::Collapse { region: set("rational:(0,1)"), to: Point::int(0) },
        );
        let v = check_near_continuity(&f, 3);
        assert!(v.is(Outcome::Refuted), "{:?}", v);
        assert!(recheck(&f, &v).unwrap());
    }

    #[test]
    fn closed_graph_certificate_rechecks() {
        let f = xsum_identity();
        let y = Point::ratio(1, 3).tagged(1);
        let v = check_closed_graph(&f, &[(Point::int(0), y)], 6).unwrap();
        assert!(v[0].is(Outcome::Verified));
        assert!(recheck(&f, &v[0]).unwrap());
    }

    #[test]
    fn seq_projection_preimage_image() {
        let f = CMap::new("proj", Space::Seq, Space::line(vec![Trace::Naturals]), MapKind::SeqProjection);
        let v = set("naturals:{2} u [5,+inf)");
        let pre = f.preimage(&v).unwrap();
        assert!(pre.contains(&Point::seq(vec![2, 9], 0)));
        assert!(pre.contains(&Point::seq(vec![7], 1)));
        assert!(!pre.contains(&Point::seq(vec![3], 1)));
        assert!(Space::line(vec![Trace::Naturals]).same(&f.image(&pre).unwrap(), &v));
    }
}
