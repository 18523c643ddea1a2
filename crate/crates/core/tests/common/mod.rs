//! Oracles shared by the law tests and the acceptance run.
//!
//! Set identities are compared with exact equality and, independently, by
//! membership of sample points, so a wrong normal form cannot hide behind
//! an equally wrong equality test.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topolab::point::Point;
use topolab::set::ExactSet;
use topolab::space::{Space, Tier};

/// Registry identifiers of the exact spaces.
pub const EXACT_SPACES: [&str; 13] = [
    "q", "q2", "field", "qh", "qk", "m1", "nat", "seq", "xsum", "dup(q)", "disc(q)", "wilhelm_domain", "wilhelm_codomain",
];

pub fn exact_spaces() -> Vec<(String, Space)> {
    EXACT_SPACES
        .iter()
        .map(|id| {
            let s = Space::from_id(id).expect("registered");
            assert_eq!(s.tier(), Tier::Exact, "{}", id);
            (id.to_string(), s)
        })
        .collect()
}

/// Points of the space and of the given sets, boundary points included.
pub fn probe_points(space: &Space, sets: &[&ExactSet]) -> Vec<Point> {
    let mut pts = space.candidates(&space.full(), 3);
    for s in sets {
        pts.extend(space.candidates(s, 2));
    }
    pts.sort_by_key(|p| p.to_string());
    pts.dedup();
    pts
}

fn same(space: &Space, what: &str, x: &ExactSet, y: &ExactSet) -> Result<(), String> {
    if space.same(x, y) {
        Ok(())
    } else {
        Err(format!("{} fails: {} vs {}", what, x, y))
    }
}

fn pointwise(pts: &[Point], what: &str, f: impl Fn(&Point) -> bool) -> Result<(), String> {
    match pts.iter().find(|p| !f(p)) {
        None => Ok(()),
        Some(p) => Err(format!("{} fails at {}", what, p)),
    }
}

type R = Result<(), String>;

fn e<T>(r: topolab::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Boolean-algebra laws on `a, b, c`, exactly and pointwise.
pub fn boolean_laws(space: &Space, a: &ExactSet, b: &ExactSet, c: &ExactSet, pts: &[Point]) -> R {
    let x = space.full();
    let comp = |s: &ExactSet| e(space.complement(s));
    same(space, "(a u b) u c = a u (b u c)", &e(e(a.union(b))?.union(c))?, &e(a.union(&e(b.union(c))?))?)?;
    same(space, "(a n b) n c = a n (b n c)", &e(e(a.intersect(b))?.intersect(c))?, &e(a.intersect(&e(b.intersect(c))?))?)?;
    same(space, "a u b = b u a", &e(a.union(b))?, &e(b.union(a))?)?;
    same(space, "a n (b u c) = (a n b) u (a n c)", &e(a.intersect(&e(b.union(c))?))?, &e(e(a.intersect(b))?.union(&e(a.intersect(c))?))?)?;
    same(space, "a u (b n c) = (a u b) n (a u c)", &e(a.union(&e(b.intersect(c))?))?, &e(e(a.union(b))?.intersect(&e(a.union(c))?))?)?;
    same(space, "X - (a u b) = (X - a) n (X - b)", &comp(&e(a.union(b))?)?, &e(comp(a)?.intersect(&comp(b)?))?)?;
    same(space, "X - (a n b) = (X - a) u (X - b)", &comp(&e(a.intersect(b))?)?, &e(comp(a)?.union(&comp(b)?))?)?;
    same(space, "X - (X - a) = a", &comp(&comp(a)?)?, &e(a.intersect(&x))?)?;
    same(space, "a u (a n b) = a", &e(a.union(&e(a.intersect(b))?))?, a)?;
    same(space, "a - b = a n (X - b)", &e(a.difference(b))?, &e(a.intersect(&comp(b)?))?)?;
    if !space.is_empty(&e(a.intersect(&comp(a)?))?) {
        return Err(format!("a n (X - a) nonempty for {}", a));
    }
    let (u, i, d, ca) = (e(a.union(b))?, e(a.intersect(b))?, e(a.difference(b))?, comp(a)?);
    pointwise(pts, "membership of a u b", |p| u.contains(p) == (a.contains(p) || b.contains(p)))?;
    pointwise(pts, "membership of a n b", |p| i.contains(p) == (a.contains(p) && b.contains(p)))?;
    pointwise(pts, "membership of a - b", |p| d.contains(p) == (a.contains(p) && !b.contains(p)))?;
    pointwise(pts, "membership of X - a", |p| ca.contains(p) == !a.contains(p))?;
    Ok(())
}

/// Kuratowski closure axioms and the interior duality.
pub fn kuratowski_laws(space: &Space, a: &ExactSet, b: &ExactSet, pts: &[Point]) -> R {
    let cl = |s: &ExactSet| e(space.closure(s));
    let empty = space.empty();
    same(space, "cl 0 = 0", &cl(&empty)?, &empty)?;
    let ca = cl(a)?;
    if !e(space.subset(a, &ca))? {
        return Err(format!("a not inside cl a for {}", a));
    }
    same(space, "cl cl a = cl a", &cl(&ca)?, &ca)?;
    same(space, "cl (a u b) = cl a u cl b", &cl(&e(a.union(b))?)?, &e(ca.union(&cl(b)?))?)?;
    let int = e(space.interior(a))?;
    same(space, "int a = X - cl (X - a)", &int, &e(space.complement(&cl(&e(space.complement(a))?)?))?)?;
    pointwise(pts, "a inside cl a pointwise", |p| !a.contains(p) || ca.contains(p))?;
    pointwise(pts, "int a inside a pointwise", |p| !int.contains(p) || a.contains(p))?;
    Ok(())
}

/// Exact `p ∈ cl a` must agree with "every basic neighbourhood of `p` up to
/// `depth` meets `a`". Returns how many non-members were separated.
pub fn probe_agreement(space: &Space, a: &ExactSet, pts: &[Point], depth: usize) -> Result<usize, String> {
    let ca = e(space.closure(a))?;
    let mut separated = 0;
    for p in pts {
        let ns = e(space.neighborhoods_of(p, depth))?;
        let all_meet = ns.iter().all(|n| space.meets(n, a).unwrap_or(false));
        if ca.contains(p) && !all_meet {
            return Err(format!("{} in cl {} but a basic neighbourhood misses it", p, a));
        }
        if a.contains(p) && !all_meet {
            return Err(format!("{} in {} but a basic neighbourhood misses it", p, a));
        }
        if !ca.contains(p) && !all_meet {
            separated += 1;
        }
    }
    Ok(separated)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` random normal forms on one space; each one is checked as `a`
/// against its two successors. The first 50 also get probe agreement on
/// four points each, 200 samples in all. Returns the number of probe
/// separations seen.
pub fn run_laws(space: &Space, n: usize, seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let sets = (0..n.max(1)).map(|i| e(space.random_set(&mut r, 2 + i % 2))).collect::<Result<Vec<_>, _>>()?;
    let mut separated = 0;
    for i in 0..n {
        let (a, b, c) = (&sets[i], &sets[(i + 1) % n], &sets[(i + 2) % n]);
        let pts = probe_points(space, &[a, b]);
        boolean_laws(space, a, b, c, &pts).map_err(|m| format!("form {}: {}", i, m))?;
        kuratowski_laws(space, a, b, &pts).map_err(|m| format!("form {}: {}", i, m))?;
        if i < 50 {
            separated += probe_agreement(space, a, &pts[..pts.len().min(4)], 8).map_err(|m| format!("form {}: {}", i, m))?;
        }
    }
    Ok(separated)
}
