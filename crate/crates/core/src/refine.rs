//! Refinement descriptors: a dense set added to the basis, and the two
//! star refinements at a point that fails regularity.

use crate::error::{Result, TopoError};
use crate::point::Point;
use crate::set::ExactSet;
use crate::space::Space;

#[derive(Clone, Debug)]
pub enum RefinementSpec {
    /// Basis `τ ∪ {U ∩ D}`.
    Dense { d: ExactSet },
    /// Subbasis `{U : x₀ ∉ U} ∪ {V* : V ∈ 𝒱}` with `V* = V ∪ (cl V ∖ V₀)`.
    /// `family` must be nested.
    Star { x0: Point, v0: ExactSet, family: Vec<ExactSet> },
    /// Countable-character variant: `V_n* = V_n ∪ {x_m : V_m ⊆ V_n}`. The
    /// star parts `{x_m : V_m ⊆ V_n}` are supplied in closed form as
    /// `tails`; `points` lists the chosen `x_m` for the finite checks.
    Cardinal { x0: Point, v: ExactSet, chain: Vec<ExactSet>, tails: Vec<ExactSet>, points: Vec<Point> },
}

impl RefinementSpec {
    pub fn label(&self) -> &'static str {
        match self {
            RefinementSpec::Dense { .. } => "dense",
            RefinementSpec::Star { .. } => "star",
            RefinementSpec::Cardinal { .. } => "cardinal",
        }
    }

    /// The distinguished point, when there is one.
    pub fn x0(&self) -> Option<&Point> {
        match self {
            RefinementSpec::Dense { .. } => None,
            RefinementSpec::Star { x0, .. } | RefinementSpec::Cardinal { x0, .. } => Some(x0),
        }
    }

    /// The starred sets `V*`, in family order.
    pub fn starred(&self, base: &Space) -> Result<Vec<ExactSet>> {
        match self {
            RefinementSpec::Dense { .. } => Ok(Vec::new()),
            RefinementSpec::Star { v0, family, .. } => family
                .iter()
                .map(|v| {
                    let extra = base.closure(v)?.difference(v0)?;
                    v.union(&extra)
                })
                .collect(),
            RefinementSpec::Cardinal { chain, tails, .. } => {
                chain.iter().zip(tails).map(|(v, t)| v.union(t)).collect()
            }
        }
    }

    /// The underlying nested family `V` (without stars).
    pub fn family(&self) -> &[ExactSet] {
        match self {
            RefinementSpec::Dense { .. } => &[],
            RefinementSpec::Star { family, .. } => family,
            RefinementSpec::Cardinal { chain, .. } => chain,
        }
    }

    /// Checks the constructor preconditions against the base space.
    pub fn validate(&self, base: &Space) -> Result<()> {
        let fail = |msg: String| Err(TopoError::SpecViolation(msg));
        match self {
            RefinementSpec::Dense { d } => {
                let cl = base.closure(d)?;
                let gap = base.complement(&cl)?;
                if !base.is_empty(&gap) {
                    return fail(format!("D is not dense; uncovered region {}", gap));
                }
            }
            RefinementSpec::Star { x0, v0, family } => {
                if !v0.contains(x0) || !base.same(&base.interior(v0)?, v0) {
                    return fail(format!("V0 = {} is not an open neighbourhood of {}", v0, x0));
                }
                for (i, v) in family.iter().enumerate() {
                    if !v.contains(x0) || !base.same(&base.interior(v)?, v) {
                        return fail(format!("family member {} is not an open neighbourhood of {}", v, x0));
                    }
                    if i > 0 && !base.subset(v, &family[i - 1])? {
                        return fail(format!("family is not nested at index {}", i));
                    }
                }
                for a in family {
                    for b in family {
                        let lhs = base.closure(&a.intersect(b)?)?;
                        let rhs = base.closure(a)?.intersect(&base.closure(b)?)?;
                        if !base.same(&lhs, &rhs) {
                            return fail(format!("cl(V ∩ V') differs from cl V ∩ cl V' for {} and {}", a, b));
                        }
                    }
                }
            }
            RefinementSpec::Cardinal { x0, v, chain, tails, points } => {
                if chain.len() != tails.len() || chain.len() != points.len() {
                    return fail("chain, tails and points must have equal length".into());
                }
                for (n, vn) in chain.iter().enumerate() {
                    if !vn.contains(x0) || !base.subset(vn, v)? {
                        return fail(format!("V_{} must contain x0 and lie inside V", n));
                    }
                    if n > 0 && !base.subset(vn, &chain[n - 1])? {
                        return fail(format!("chain is not nested at index {}", n));
                    }
                    let xn = &points[n];
                    if v.contains(xn) || !base.closure(vn)?.contains(xn) {
                        return fail(format!("x_{} = {} is not in cl V_{} minus V", n, xn, n));
                    }
                    for (m, xm) in points.iter().enumerate() {
                        if m != n && xm == xn {
                            return fail(format!("x_{} repeats x_{}", n, m));
                        }
                        if tails[n].contains(xm) != (m >= n) {
                            return fail(format!("star part of V_{} disagrees at x_{}", n, m));
                        }
                    }
                    if !base.subset(&tails[n], &base.closure(vn)?.difference(v)?)? {
                        return fail(format!("star part of V_{} leaves cl V_{} minus V", n, n));
                    }
                }
            }
        }
        Ok(())
    }
}
