//! Named instances with stored expectations, their runs and golden reports.
//!
//! Every instance rebuilds from its recipe, runs a fixed list of checks at a
//! given `(depth, seed)` and compares each aggregated verdict with the stored
//! expectation. Expectations are checker-level facts about the countable
//! carriers used here, not statements about the uncountable spaces the
//! constructions come from.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TopoError};
use crate::field::{rat, FieldPoint};
use crate::games::{
    beta_prime_web, beta_prime_separating, check_meander, check_play, check_win_bounded, playout, recheck_web,
    recheck_separating, FollowBasis, Launch, Move, RandomBeta, Replay, ScheduleKind, ShrinkTo, SingletonIsolated, Strategy,
    WinOutcome,
};
use crate::linear::Pattern;
use crate::maps::{
    check_closed_graph, check_continuity, check_near_continuity, check_separating, codomain_pairs, off_graph_pairs, recheck,
    CMap, MapKind, Outcome, Route, Verdict,
};
use crate::point::{Point, SeqPoint};
use crate::refine::RefinementSpec;
use crate::set::ExactSet;
use crate::sieves::{
    canonical_closed_graph, canonical_continuity, canonical_near_continuity, check_delta, check_mu_properties,
    check_p_complete, check_sieve, find_mu_refutation, sample_branches, Branch, LabeledTree,
};
use crate::space::Space;
use crate::trace::Trace;

/// Version tag of the report schema and of the golden directory.
pub const GOLDEN_VERSION: &str = "v1";
/// Environment variable overriding the golden directory.
pub const GOLDEN_DIR_ENV: &str = "TOPOLAB_GOLDEN_DIR";

fn set(s: &str) -> ExactSet {
    s.parse().expect("gallery set literal")
}

fn real(num: i64, den: i64) -> Point {
    Point::ratio(num, den)
}

// ---------------------------------------------------------------------------
// Spaces and maps.

/// First entry of a sequence, onto the naturals.
pub fn seq_projection() -> CMap {
    CMap::new("seq_projection", Space::Seq, Space::from_id("nat").expect("registered"), MapKind::SeqProjection)
}

/// `ℚ → X ⊕ Y` with `X` the dyadic and `Y` the non-dyadic rationals.
pub fn xsum_identity() -> CMap {
    let routes = vec![Route::new(None, Trace::Dyadic, Some(0)), Route::new(None, Trace::NonDyadic, Some(1))];
    CMap::new("xsum_identity", Space::rationals_split(), Space::from_id("xsum").expect("registered"), MapKind::Route(routes))
}

/// `F = (Q₂ ∪ Q₁) ⊕ H₁ ⊕ H₂ → P₁ ⊕ P₂` on the quadratic carrier, with
/// `Q₁` the rationals, `Q₂ = ℚ + √2`, `H` the remaining field points,
/// `P₁ = Q₂ ∪ H` and `P₂ = Q₁ ∪ H`.
pub fn wilhelm() -> CMap {
    let dom = Space::sum(vec![
        Space::line(vec![Trace::Rational, Trace::RatPlusSqrt2]),
        Space::line(vec![Trace::WilhelmH]),
        Space::line(vec![Trace::WilhelmH]),
    ]);
    let cod = Space::sum(vec![
        Space::line(vec![Trace::RatPlusSqrt2, Trace::WilhelmH]),
        Space::line(vec![Trace::Rational, Trace::WilhelmH]),
    ]);
    let routes = vec![
        Route::new(Some(0), Trace::RatPlusSqrt2, Some(0)),
        Route::new(Some(0), Trace::Rational, Some(1)),
        Route::new(Some(1), Trace::WilhelmH, Some(0)),
        Route::new(Some(2), Trace::WilhelmH, Some(1)),
    ];
    CMap::new("wilhelm", dom, cod, MapKind::Route(routes))
}

/// `ℚ` split into dyadic and non-dyadic atoms, refined by `D` = dyadics.
pub fn dense_refined_q() -> Result<Space> {
    Space::refine(Space::rationals_split(), RefinementSpec::Dense { d: set("dyadic:(-inf,+inf)") })
}

/// Star refinement of `ℚ` at 0 along `(−1/n, 1/n)`: the star parts are
/// empty since `ℚ` is regular.
pub fn star_space_q() -> Result<Space> {
    let family = (2..=6).map(|n| set(&format!("rational:(-1/{},1/{})", n, n))).collect();
    Space::refine(
        Space::rationals(),
        RefinementSpec::Star { x0: Point::int(0), v0: set("rational:(-1,1)"), family },
    )
}

/// `V_n = (−1/n, 1/n) ∖ K` in the K-line, `n = 2, 3, …`
fn k_chain(len: usize) -> Vec<ExactSet> {
    (2..2 + len).map(|n| set(&format!("nonharmonic:(-1/{},1/{})", n, n))).collect()
}

/// Star refinement of the K-line at 0, where regularity fails: each
/// `V*` adds `K ∩ (0, 1/n]` to `V_n`.
pub fn star_space_k() -> Result<Space> {
    Space::refine(
        Space::from_id("qk")?,
        RefinementSpec::Star { x0: Point::int(0), v0: set("nonharmonic:(-1,1)"), family: k_chain(5) },
    )
}

/// Countable-character refinement of the K-line at 0 with `x_n = 1/(n+2)`.
pub fn cardinal_space_k(len: usize) -> Result<Space> {
    let chain = k_chain(len);
    let tails = (2..2 + len as i64).map(|n| set(&format!("harmonic:(0,1/{}]", n))).collect();
    let points = (2..2 + len as i64).map(|n| real(1, n)).collect();
    Space::refine(
        Space::from_id("qk")?,
        RefinementSpec::Cardinal { x0: Point::int(0), v: set("nonharmonic:(-1,1)"), chain, tails, points },
    )
}

/// Space identifiers provided by this module, for `Space::from_id`.
pub fn space_by_id(id: &str) -> Option<Result<Space>> {
    Some(match id {
        "star_q" => star_space_q(),
        "star_k" => star_space_k(),
        "cardinal_k" => cardinal_space_k(6),
        "dense_q" => dense_refined_q(),
        "wilhelm_domain" => Ok(wilhelm().domain),
        "wilhelm_codomain" => Ok(wilhelm().codomain),
        _ => return None,
    })
}

/// The β′ launch data on `xsum_identity`: `x = 0`, `O = (−2,2)` and
/// `W = (−1,1)` inside the dyadic summand.
pub fn xsum_launch() -> (CMap, Point, ExactSet, ExactSet) {
    (xsum_identity(), Point::int(0), set("sum(dyadic:(-2,2); empty)"), set("sum(dyadic:(-1,1); empty)"))
}

/// Continuous maps with launch data `(f, x, O, W)`; both β′ constructions
/// must refuse them.
pub fn continuous_maps() -> Result<Vec<(CMap, Point, ExactSet, ExactSet)>> {
    let q = Space::rationals();
    let o = set("rational:(-2,2)");
    let w = set("rational:(-1,1)");
    let xsum = Space::from_id("xsum")?;
    let fold = CMap::new(
        "fold",
        xsum,
        q.clone(),
        MapKind::Route(vec![Route::new(Some(0), Trace::Dyadic, None), Route::new(Some(1), Trace::NonDyadic, None)]),
    );
    let dup = Space::duplicate(q.clone())?;
    Ok(vec![
        (CMap::identity("id_q", q.clone(), q.clone()), Point::int(0), o.clone(), w.clone()),
        (fold, Point::int(0).tagged(0), o.clone(), w.clone()),
        (
            CMap::identity("id_dense_q", dense_refined_q()?, Space::rationals_split()),
            Point::int(0),
            set("dyadic:(-2,2) | nondyadic:(-2,2)"),
            set("dyadic:(-1,1) | nondyadic:(-1,1)"),
        ),
        (CMap::new("dup_projection", dup, q.clone(), MapKind::DupProjection), Point::int(0).tagged(2), o.clone(), w.clone()),
        (seq_projection(), Point::seq(vec![], 0), set("naturals:{0}"), set("naturals:{0}")),
    ])
}

/// A web on the domain of `f`, for the web construction.
pub fn domain_web(f: &CMap) -> LabeledTree {
    match &f.domain {
        Space::Seq => LabeledTree::cylinder(),
        d => LabeledTree::bisection(d.clone()),
    }
}

// ---------------------------------------------------------------------------
// Registry.

/// One stored expectation: the property, the checking operation and the
/// aggregated outcome it must produce.
#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub property: &'static str,
    pub operation: &'static str,
    pub outcome: Outcome,
}

const fn expect(property: &'static str, operation: &'static str, outcome: Outcome) -> Expectation {
    Expectation { property, operation, outcome }
}

/// What an instance is about.
#[derive(Clone, Debug)]
pub enum Subject {
    Map(CMap),
    Space(Space),
    Tree(LabeledTree),
    Game { schedule: ScheduleKind, space: Space },
}

#[derive(Clone, Debug)]
pub struct GalleryInstance {
    pub name: &'static str,
    pub recipe: &'static str,
    pub provenance: &'static str,
    pub expected: Vec<Expectation>,
    pub subject: Subject,
}

use Outcome::{Refuted, Unknown, Verified};

/// Instance names in registry order (alphabetical).
pub const INSTANCES: [&str; 13] = [
    "cardinal_refine_omega",
    "cylinder_identity_sieve",
    "dense_refine_nonopen_D",
    "duplicate_q",
    "m1_space",
    "michael_isolated",
    "non_mu_sieve_on_Q",
    "singleton_sieve",
    "star_refine_control",
    "tandem_thm81",
    "web_thm91",
    "wilhelm",
    "xsum_identity",
];

pub fn load_instance(name: &str) -> Result<GalleryInstance> {
    let inst = |name, recipe, provenance, expected, subject| GalleryInstance { name, recipe, provenance, expected, subject };
    Ok(match name {
        "xsum_identity" => inst(
            "xsum_identity",
            "identity q2 -> sum(line[dyadic], line[nondyadic])",
            "sum of the dense set X and its complement Y; the real line is replaced by the rationals, X by the dyadics",
            vec![
                expect("near_continuity", "check_near_continuity", Verified),
                expect("closed_graph", "check_closed_graph on 100 off-graph pairs", Verified),
                expect("separating", "check_separating on 100 codomain pairs", Verified),
                expect("continuity", "check_continuity at 50 sampled points", Refuted),
            ],
            Subject::Map(xsum_identity()),
        ),
        "wilhelm" => inst(
            "wilhelm",
            "route map sum(line[rational,ratsqrt2], line[wilhelmh], line[wilhelmh]) -> sum(line[ratsqrt2,wilhelmh], line[rational,wilhelmh])",
            "two dense sets G_i with complements Q_i; carried by Q(sqrt2, sqrt3) with Q1 the rationals, Q2 = Q + sqrt2 and H the rest",
            vec![
                expect("near_continuity", "check_near_continuity", Verified),
                expect("closed_graph", "check_closed_graph on 40 off-graph pairs", Verified),
                expect("continuity", "check_continuity at 20 points of the first summand", Refuted),
            ],
            Subject::Map(wilhelm()),
        ),
        "m1_space" => inst(
            "m1_space",
            "line[m1], M1 = {1/n + 1/(n^2 m)} u {0}",
            "M1 has exactly one non-isolated point; the closure witness is an infinite closed discrete block",
            vec![
                expect("non_isolated_points", "omega_acc of the whole space and isolation of sampled points", Verified),
                expect("locally_compact_at_0", "closed discrete block inside each neighbourhood of 0", Refuted),
            ],
            Subject::Space(Space::line(vec![Trace::M1])),
        ),
        "duplicate_q" => inst(
            "duplicate_q",
            "dup(q)",
            "Alexandrov duplicate of the rationals; level 1 points isolated, basics W(U,Y)",
            vec![
                expect("dense_level1", "closure of F x {1}", Verified),
                expect("closed_level2", "closure of F x {2}", Verified),
                expect("hausdorff_level1_level1", "separate", Verified),
                expect("hausdorff_level1_level2", "separate", Verified),
                expect("hausdorff_level2_level2", "separate", Verified),
                expect("hausdorff_same_base", "separate", Verified),
                expect("semi_regular", "int cl B = B for neighbourhood basics", Verified),
                expect("w_intersection", "W(U,Y) n F x {2} = U x {2} on 50 random pairs", Verified),
            ],
            Subject::Space(Space::duplicate(Space::rationals())?),
        ),
        "dense_refine_nonopen_D" => inst(
            "dense_refine_nonopen_D",
            "identity q2 -> dense(q2) with D = dyadics",
            "refinement by a dense set D that is not open; the reals are replaced by the rationals",
            vec![
                expect("d_open", "is_open of D in the base", Refuted),
                expect("near_continuity", "check_near_continuity", Verified),
                expect("separating", "check_separating on 20 codomain pairs", Verified),
                expect("continuity", "check_continuity at 10 points of D", Refuted),
            ],
            Subject::Map(CMap::identity("id_into_dense", Space::rationals_split(), dense_refined_q()?)),
        ),
        "star_refine_control" => inst(
            "star_refine_control",
            "star(q, 0) along (-1/n,1/n); star(qk, 0) along (-1/n,1/n) minus K",
            "the star refinement at a point; on q it changes nothing, on the K-line regularity fails at 0 and the star parts are nonempty",
            vec![
                expect("star_part_empty", "V* = V on star(q)", Verified),
                expect("identity_continuity", "check_continuity of q -> star(q)", Verified),
                expect("star_part_nonempty", "V* strictly contains V on star(qk)", Verified),
            ],
            Subject::Space(star_space_k()?),
        ),
        "cardinal_refine_omega" => inst(
            "cardinal_refine_omega",
            "cardinal(qk, 0) with V_n = (-1/(n+2),1/(n+2)) minus K, x_n = 1/(n+2)",
            "countable character variant of the star refinement on the K-line",
            vec![
                expect("nonregular_at_x0", "cl V_n not inside V", Verified),
                expect("star_parts", "refinement preconditions", Verified),
                expect("hausdorff", "separate in the refinement", Verified),
                expect("near_continuity_at_x0", "x_m in cl* V_n for m >= n, by refined neighbourhoods", Verified),
            ],
            Subject::Space(cardinal_space_k(6)?),
        ),
        "michael_isolated" => inst(
            "michael_isolated",
            "michael game on line[m1], alpha = singleton_isolated",
            "alpha answers with an isolated singleton and keeps it",
            vec![
                expect("legality", "check_play", Verified),
                expect("alpha_wins", "check_win_bounded", Verified),
            ],
            Subject::Game { schedule: ScheduleKind::Michael, space: Space::line(vec![Trace::M1]) },
        ),
        "tandem_thm81" => inst(
            "tandem_thm81",
            "tandem michael on xsum, beta' from the separating construction for xsum_identity at 0, alpha' = shrink_to:first",
            "beta' built from a nearly continuous separating map; rationals for the reals",
            vec![
                expect("launch", "beta_prime_separating", Verified),
                expect("not_launchable_continuous", "beta_prime_separating on 5 continuous maps", Verified),
                expect("legality", "check_play", Verified),
                expect("meander", "check_meander", Verified),
                expect("invariant_i", "recheck_separating", Verified),
                expect("invariant_ii", "recheck_separating", Verified),
                expect("invariant_iii", "recheck_separating", Verified),
                expect("nonempty_moves", "recheck_separating", Verified),
            ],
            Subject::Game { schedule: ScheduleKind::TandemMichael, space: xsum_identity().codomain },
        ),
        "web_thm91" => inst(
            "web_thm91",
            "tandem michael on xsum, beta' threading the bisection web of q2, alpha' = shrink_to:first",
            "beta' built from a web on the domain; the bisection web of the rationals stands in for a complete web",
            vec![
                expect("launch", "beta_prime_web", Verified),
                expect("not_launchable_continuous", "beta_prime_web on 5 continuous maps", Verified),
                expect("legality", "check_play", Verified),
                expect("meander", "check_meander", Verified),
                expect("invariant_1", "recheck_web (node chain)", Verified),
                expect("invariant_2", "recheck_web", Verified),
                expect("invariant_3", "recheck_web", Verified),
                expect("invariant_i", "recheck_web", Verified),
                expect("invariant_ii", "recheck_web", Verified),
                expect("invariant_iii", "recheck_web", Verified),
            ],
            Subject::Game { schedule: ScheduleKind::TandemMichael, space: xsum_identity().codomain },
        ),
        "cylinder_identity_sieve" => inst(
            "cylinder_identity_sieve",
            "cylinder tree on seq, phi([s]) = [s]",
            "the sieve of the identity on the sequence space, which replaces Baire space",
            vec![
                expect("sieve", "check_sieve", Verified),
                expect("p_complete", "check_p_complete on 20 branches", Verified),
                expect("delta", "check_delta on 20 branches", Verified),
                expect("mu", "check_mu_properties on 20 branches", Verified),
                expect("quasi_mu", "check_mu_properties on 20 branches", Verified),
                expect("mu_refutation", "find_mu_refutation", Unknown),
                expect("canonical_continuity", "canonical_continuity on 20 branches", Verified),
            ],
            Subject::Tree(LabeledTree::cylinder().with_name("cylinder_identity")),
        ),
        "singleton_sieve" => inst(
            "singleton_sieve",
            "singletons tree on q: roots {q} in height order, constant chains",
            "trivial sieve of singletons",
            vec![
                expect("sieve", "check_sieve", Verified),
                expect("p_complete", "check_p_complete on 20 branches", Verified),
                expect("delta", "check_delta on 20 branches", Verified),
                expect("mu", "check_mu_properties on 20 branches", Verified),
                expect("mu_refutation", "find_mu_refutation", Unknown),
            ],
            Subject::Tree(LabeledTree::singletons(Space::rationals())),
        ),
        "non_mu_sieve_on_Q" => inst(
            "non_mu_sieve_on_Q",
            "non_mu tree on q: main chain ((-r,r) u (sqrt2-r,sqrt2+r)) n Q, r = 2^-(k+1), singleton chains over the rings",
            "hand-built p-complete delta sieve on the rationals that is not mu; singleton descendants escaping every U also defeat quasi-mu",
            vec![
                expect("sieve", "check_sieve", Verified),
                expect("p_complete", "check_p_complete on sampled branches", Verified),
                expect("delta", "check_delta at the main branch", Verified),
                expect("mu", "check_mu_properties at the main branch, U = (-1/2,1/2)", Refuted),
                expect("quasi_mu", "check_mu_properties at the main branch, U = (-1/2,1/2)", Refuted),
                expect("mu_refutation", "find_mu_refutation at depth 3", Refuted),
                expect("canonical_closed_graph", "canonical_closed_graph on 50 pairs", Verified),
                expect("canonical_near_continuity", "canonical_near_continuity at the main branch", Refuted),
                expect("canonical_continuity", "canonical_continuity at the main branch", Refuted),
            ],
            Subject::Tree(LabeledTree::non_mu()),
        ),
        other => return Err(TopoError::UnknownName(other.to_string())),
    })
}

// ---------------------------------------------------------------------------
// Reports.

/// One executed expectation.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub property: String,
    pub operation: String,
    /// `None` when nothing was stated; such rows always match.
    pub expected: Option<Outcome>,
    pub verdict: Outcome,
    pub matches: bool,
    /// Number of certificates whose set algebra was re-run and held.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rechecked: Option<usize>,
    pub certificate: Vec<Verdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub instance: String,
    pub version: &'static str,
    pub depth: usize,
    pub seed: u64,
    pub checks: Vec<CheckRow>,
    pub matches: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.matches)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (depth {}, seed {}): {}", self.instance, self.depth, self.seed, if self.matches { "ok" } else { "MISMATCH" })?;
        for c in &self.checks {
            let mark = if c.matches { "ok " } else { "BAD" };
            let expected = c.expected.map_or("-".to_string(), |o| o.to_string());
            write!(f, "  [{}] {:<28} expected {:<8} got {:<8} ({} certificates", mark, c.property, expected, c.verdict, c.certificate.len())?;
            if let Some(n) = c.rechecked {
                write!(f, ", {} rechecked", n)?;
            }
            writeln!(f, ")")?;
            if !c.matches {
                if let Some(v) = offending(c) {
                    writeln!(f, "        offending: {} on {} {}", v.outcome, v.subject, v.note)?;
                }
            }
        }
        Ok(())
    }
}

/// The first certificate that disagrees with the expectation.
pub fn offending(c: &CheckRow) -> Option<&Verdict> {
    c.certificate.iter().find(|v| Some(v.outcome) != c.expected).or(c.certificate.first())
}

/// All the same outcome gives that outcome; mixed or none gives Unknown.
pub fn aggregate(vs: &[Verdict]) -> Outcome {
    match vs.first() {
        Some(v) if vs.iter().all(|w| w.outcome == v.outcome) => v.outcome,
        _ => Unknown,
    }
}

struct Rows<'a> {
    inst: &'a GalleryInstance,
    rows: Vec<CheckRow>,
}

impl Rows<'_> {
    fn push(&mut self, property: &str, certificate: Vec<Verdict>, rechecked: Option<usize>) {
        let e = self
            .inst
            .expected
            .iter()
            .find(|e| e.property == property)
            .unwrap_or_else(|| panic!("{} has no expectation for {}", self.inst.name, property));
        let verdict = aggregate(&certificate);
        self.rows.push(CheckRow {
            property: property.into(),
            operation: e.operation.into(),
            expected: Some(e.outcome),
            verdict,
            matches: verdict == e.outcome,
            rechecked,
            certificate,
        });
    }

    fn one(&mut self, property: &str, v: Verdict) {
        self.push(property, vec![v], None);
    }

    /// Pushes map certificates, re-running their set algebra.
    fn map(&mut self, property: &str, f: &CMap, vs: Vec<Verdict>) -> Result<()> {
        let mut n = 0;
        let mut vs = vs;
        for v in vs.iter_mut() {
            if matches!(v.outcome, Verified | Refuted) && is_recheckable(v) {
                if recheck(f, v)? {
                    n += 1;
                } else {
                    v.outcome = Unknown;
                    v.note = "certificate failed its recheck".into();
                }
            }
        }
        self.push(property, vs, Some(n));
        Ok(())
    }
}

fn is_recheckable(v: &Verdict) -> bool {
    matches!(
        (v.property.as_str(), v.outcome),
        ("closed_graph", Verified) | ("separating", Verified) | ("continuity", Refuted) | ("near_continuity", Refuted)
    )
}

fn bool_verdict(prop: &str, subject: impl Into<String>, ok: bool, depth: usize) -> Verdict {
    Verdict::new(prop, subject, if ok { Verified } else { Refuted }, depth)
}

/// Runs every expectation of an instance.
pub fn run_instance(name: &str, depth: usize, seed: u64) -> Result<Report> {
    let inst = load_instance(name)?;
    let mut rows = Rows { inst: &inst, rows: Vec::new() };
    match inst.name {
        "xsum_identity" => run_xsum(&mut rows, depth, seed)?,
        "wilhelm" => run_wilhelm(&mut rows, depth, seed)?,
        "m1_space" => run_m1(&mut rows, depth, seed)?,
        "duplicate_q" => run_duplicate(&mut rows, depth, seed)?,
        "dense_refine_nonopen_D" => run_dense(&mut rows, depth, seed)?,
        "star_refine_control" => run_star(&mut rows, depth, seed)?,
        "cardinal_refine_omega" => run_cardinal(&mut rows, depth)?,
        "michael_isolated" => run_michael(&mut rows, depth, seed)?,
        "tandem_thm81" => run_tandem(&mut rows, depth, false)?,
        "web_thm91" => run_tandem(&mut rows, depth, true)?,
        "cylinder_identity_sieve" | "singleton_sieve" => run_plain_sieve(&mut rows, depth)?,
        "non_mu_sieve_on_Q" => run_non_mu(&mut rows, depth, seed)?,
        other => return Err(TopoError::UnknownName(other.into())),
    }
    let checks = rows.rows;
    let matches = checks.iter().all(|c| c.matches);
    Ok(Report { instance: inst.name.into(), version: GOLDEN_VERSION, depth, seed, checks, matches })
}

/// Runs several instances on scoped threads; results keep the input order.
pub fn run_many(names: &[&str], depth: usize, seed: u64) -> Vec<Result<Report>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = names.iter().map(|n| s.spawn(move || run_instance(n, depth, seed))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(TopoError::Unsupported("instance panicked".into())))).collect()
    })
}

fn run_xsum(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let f = xsum_identity();
    rows.one("near_continuity", check_near_continuity(&f, depth));
    let pairs = off_graph_pairs(&f, 100, seed)?;
    rows.map("closed_graph", &f, check_closed_graph(&f, &pairs, depth)?)?;
    let pairs = codomain_pairs(&f, 100, seed)?;
    rows.map("separating", &f, check_separating(&f, &pairs, depth)?)?;
    let pts = f.domain.sample_points(&f.domain.full(), 50, seed)?;
    rows.map("continuity", &f, check_continuity(&f, &pts, depth)?)
}

fn run_wilhelm(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let f = wilhelm();
    rows.one("near_continuity", check_near_continuity(&f, depth));
    let pairs = off_graph_pairs(&f, 40, seed)?;
    rows.map("closed_graph", &f, check_closed_graph(&f, &pairs, depth)?)?;
    let first = f.domain.inject(0, set("rational:(-inf,+inf) | ratsqrt2:(-inf,+inf)"));
    let pts = f.domain.sample_points(&first, 20, seed)?;
    rows.map("continuity", &f, check_continuity(&f, &pts, depth)?)
}

/// `M₁ ∩ (1/n, 1/n + 1/n²]`, the `n`-th block.
fn m1_block(n: i64) -> ExactSet {
    let lo = FieldPoint::rational(rat(1, n));
    let hi = FieldPoint::rational(rat(n + 1, n * n));
    Space::line(vec![Trace::M1]).as_line().expect("line").set(Pattern::interval(Some((lo, false)), Some((hi, true))))
}

fn run_m1(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let m1 = Space::line(vec![Trace::M1]);
    let zero = Point::int(0);
    let derived = m1.omega_acc(&m1.full())?;
    let mut certs = vec![bool_verdict("non_isolated_points", "omega_acc(M1) = {0}", m1.same(&derived, &m1.singleton(&zero)?), depth)
        .sets([derived])
        .points([zero.clone()])];
    for p in m1.sample_points(&m1.full(), 20, seed)? {
        let open = m1.is_open(&m1.singleton(&p)?)?;
        certs.push(bool_verdict("non_isolated_points", format!("{} isolated iff nonzero", p), open == (p != zero), depth).points([p]));
    }
    rows.push("non_isolated_points", certs, None);

    let mut certs = Vec::new();
    for u in m1.neighborhoods_of(&zero, depth)? {
        let subject = format!("neighbourhood {} of 0", u);
        let found = (1..24).map(|k| m1_block(1i64 << k)).find(|b| m1.subset(b, &u).unwrap_or(false));
        let v = match found {
            Some(b) => {
                let closed = m1.same(&m1.closure(&b)?, &b);
                let discrete = m1.is_empty(&m1.omega_acc(&b)?);
                let many = m1.candidates(&b, 8).len() >= 8;
                let o = if closed && discrete && many { Refuted } else { Unknown };
                Verdict::new("locally_compact_at_0", subject, o, depth)
                    .sets([u, b.clone()])
                    .points(m1.candidates(&b, 3))
                    .note("infinite closed discrete block inside cl U, so cl U is not compact")
            }
            None => Verdict::new("locally_compact_at_0", subject, Unknown, depth).sets([u]),
        };
        certs.push(v);
    }
    rows.push("locally_compact_at_0", certs, None);
    Ok(())
}

/// `W(U,Y) ∩ F×{2} = U×{2}` on `n` random basics of the duplicate of `ℚ`.
pub fn w_intersection_identity(n: usize, depth: usize, seed: u64) -> Result<Vec<Verdict>> {
    let q = Space::rationals();
    let e = Space::duplicate(q.clone())?;
    let basis = q.probe_basis(depth);
    let pool = q.candidates(&q.full(), 16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level2 = ExactSet::dup(q.empty(), q.full());
    let mut out = Vec::new();
    for _ in 0..n {
        let u = basis.choose(&mut rng).expect("nonempty basis").clone();
        let k = rng.gen_range(0..4);
        let y: Vec<Point> = pool.choose_multiple(&mut rng, k).cloned().collect();
        let w = e.dup_basic(&u, &y)?;
        let lhs = w.intersect(&level2)?;
        let rhs = ExactSet::dup(q.empty(), u.clone());
        out.push(bool_verdict("w_intersection", format!("W({}, {} points)", u, y.len()), e.same(&lhs, &rhs), depth).sets([u]).points(y));
    }
    Ok(out)
}

fn run_duplicate(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let q = Space::rationals();
    let e = Space::duplicate(q.clone())?;
    let d = ExactSet::dup(q.full(), q.empty());
    let cl = e.closure(&d)?;
    rows.one("dense_level1", bool_verdict("dense_level1", "cl(F x {1})", e.same(&cl, &e.full()), depth).sets([d, cl]));
    let s2 = ExactSet::dup(q.empty(), q.full());
    let cl = e.closure(&s2)?;
    rows.one("closed_level2", bool_verdict("closed_level2", "cl(F x {2})", e.same(&cl, &s2), depth).sets([s2, cl]));

    let xs = q.sample_points(&q.full(), 6, seed)?;
    let pairs = |a: u8, b: u8| -> Vec<(Point, Point)> {
        let mut v = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            if a != b || x == &xs[0] {
                // distinct base points, or the same point on both levels
            }
            let y = &xs[(i + 1) % xs.len()];
            v.push((x.clone().tagged(a), y.clone().tagged(b)));
        }
        v
    };
    let same: Vec<(Point, Point)> = xs.iter().map(|x| (x.clone().tagged(1), x.clone().tagged(2))).collect();
    for (prop, ps) in [
        ("hausdorff_level1_level1", pairs(1, 1)),
        ("hausdorff_level1_level2", pairs(1, 2)),
        ("hausdorff_level2_level2", pairs(2, 2)),
        ("hausdorff_same_base", same),
    ] {
        let mut certs = Vec::new();
        for (p, r) in ps {
            let subject = format!("{} / {}", p, r);
            certs.push(match e.separate(&p, &r, depth)? {
                Some((u, v, k)) => Verdict::new(prop, subject, Verified, k).sets([u, v]).points([p, r]),
                None => Verdict::new(prop, subject, Unknown, depth).points([p, r]),
            });
        }
        rows.push(prop, certs, None);
    }

    let mut certs = Vec::new();
    let nd = depth.min(4);
    for x in xs.iter().take(3) {
        for lvl in [1u8, 2] {
            let p = x.clone().tagged(lvl);
            for b in e.neighborhoods_of(&p, nd)? {
                let r = e.interior(&e.closure(&b)?)?;
                let ok = e.same(&r, &b);
                let v = bool_verdict("semi_regular", format!("int cl B = B at {}", p), ok, nd).points([p.clone()]);
                certs.push(if ok { v } else { v.sets([b, r]) });
            }
        }
    }
    rows.push("semi_regular", certs, None);
    rows.push("w_intersection", w_intersection_identity(50, depth, seed)?, None);
    Ok(())
}

fn run_dense(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let inst = rows.inst.clone();
    let Subject::Map(f) = &inst.subject else { unreachable!("map instance") };
    let base = f.codomain.base();
    let d = set("dyadic:(-inf,+inf)");
    rows.one("d_open", bool_verdict("d_open", "D in q2", base.is_open(&d)?, depth).sets([d.clone()]));
    rows.one("near_continuity", check_near_continuity(f, depth));
    let pairs = codomain_pairs(f, 20, seed)?;
    rows.map("separating", f, check_separating(f, &pairs, depth)?)?;
    let pts = f.domain.sample_points(&d, 10, seed)?;
    rows.map("continuity", f, check_continuity(f, &pts, depth)?)
}

fn star_verdicts(space: &Space, prop: &str, want_strict: bool, depth: usize) -> Result<Vec<Verdict>> {
    let Space::Refined(base, spec) = space else { unreachable!("refined space") };
    let mut out = Vec::new();
    for (v, vs) in spec.family().iter().zip(spec.starred(base)?) {
        let extra = vs.difference(v)?;
        let strict = !base.is_empty(&extra);
        let subject = format!("V = {}", v);
        let verdict = bool_verdict(prop, subject, strict == want_strict, depth).sets([v.clone(), vs.clone()]);
        out.push(verdict.points(base.candidates(&extra, 1).into_iter().take(1)));
    }
    Ok(out)
}

fn run_star(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let sq = star_space_q()?;
    rows.push("star_part_empty", star_verdicts(&sq, "star_part_empty", false, depth)?, None);
    let q = Space::rationals();
    let id = CMap::identity("id_q_to_star_q", q.clone(), sq);
    let mut pts = vec![Point::int(0)];
    pts.extend(q.sample_points(&q.full(), 9, seed)?.into_iter().filter(|p| p != &Point::int(0)));
    rows.map("identity_continuity", &id, check_continuity(&id, &pts, depth)?)?;
    let sk = star_space_k()?;
    rows.push("star_part_nonempty", star_verdicts(&sk, "star_part_nonempty", true, depth)?, None);
    Ok(())
}

fn run_cardinal(rows: &mut Rows<'_>, depth: usize) -> Result<()> {
    let inst = rows.inst.clone();
    let Subject::Space(space) = &inst.subject else { unreachable!("space instance") };
    let Space::Refined(base, spec) = space else { unreachable!("refined space") };
    let RefinementSpec::Cardinal { v, chain, tails, points, .. } = spec.as_ref() else { unreachable!("cardinal") };
    let mut certs = Vec::new();
    for (n, vn) in chain.iter().enumerate() {
        let cl = base.closure(vn)?;
        let outside = cl.difference(v)?;
        certs.push(
            bool_verdict("nonregular_at_x0", format!("cl V_{} minus V", n), !base.is_empty(&outside), depth)
                .sets([vn.clone(), outside])
                .points([points[n].clone()]),
        );
    }
    rows.push("nonregular_at_x0", certs, None);
    let ok = spec.validate(base).is_ok();
    rows.one("star_parts", bool_verdict("star_parts", space.name(), ok, depth).sets(tails.iter().cloned()).points(points.iter().cloned()));

    let zero = Point::int(0);
    let mut pairs: Vec<(Point, Point)> = points.iter().map(|x| (zero.clone(), x.clone())).collect();
    pairs.extend(points.windows(2).map(|w| (w[0].clone(), w[1].clone())));
    pairs.push((zero.clone(), real(-1, 3)));
    let mut certs = Vec::new();
    for (p, r) in pairs {
        let subject = format!("{} / {}", p, r);
        certs.push(match space.separate(&p, &r, depth)? {
            Some((a, b, k)) => Verdict::new("hausdorff", subject, Verified, k).sets([a, b]).points([p, r]),
            None => Verdict::new("hausdorff", subject, Unknown, depth).points([p, r]),
        });
    }
    rows.push("hausdorff", certs, None);

    let mut certs = Vec::new();
    for (n, vn) in chain.iter().enumerate() {
        for xm in &points[n..] {
            let mut ok = true;
            let mut bad = None;
            for b in space.neighborhoods_of(xm, depth)? {
                if !base.meets(&b, vn)? {
                    ok = false;
                    bad = Some(b);
                    break;
                }
            }
            let v = bool_verdict("near_continuity_at_x0", format!("{} in cl* V_{}", xm, n), ok, depth).points([xm.clone()]);
            certs.push(match bad {
                Some(b) => v.sets([vn.clone(), b]),
                None => v,
            });
        }
    }
    rows.push("near_continuity_at_x0", certs, None);
    Ok(())
}

fn win_verdict(space: &Space, play: &crate::games::Play) -> Verdict {
    let r = check_win_bounded(space, play);
    let subject = format!("{} vs {}", play.alpha, play.beta);
    match r.overall {
        WinOutcome::AlphaWinCertified { point } => Verdict::new("alpha_wins", subject, Verified, play.rounds()).points([point]),
        WinOutcome::BetaWins { ply } => Verdict::new("alpha_wins", subject, Refuted, ply).note(format!("closures empty from ply {}", ply)),
        WinOutcome::UndecidedNonempty { depth } => Verdict::new("alpha_wins", subject, Unknown, depth),
    }
}

fn run_michael(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let m1 = Space::line(vec![Trace::M1]);
    let mut betas: Vec<Box<dyn Strategy>> = (0..4).map(|k| Box::new(RandomBeta::new(seed + k)) as Box<dyn Strategy>).collect();
    betas.push(Box::new(FollowBasis::new(depth)));
    betas.push(Box::new(Replay::new("whole_space", [Move::new(m1.full())])));
    let mut legal = Vec::new();
    let mut wins = Vec::new();
    for mut beta in betas {
        let mut alpha = SingletonIsolated::default();
        let rounds = if beta.name() == "whole_space" { 1 } else { depth };
        let play = playout(ScheduleKind::Michael, &m1, &mut alpha, beta.as_mut(), rounds)?;
        legal.push(check_play(&m1, &play));
        wins.push(win_verdict(&m1, &play));
    }
    rows.push("legality", legal, None);
    rows.push("alpha_wins", wins, None);
    Ok(())
}

/// Refusals of both β′ constructions on the continuous maps.
pub fn not_launchable_verdicts(web: bool, depth: usize) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (f, x, o, w) in continuous_maps()? {
        let refused = if web {
            matches!(beta_prime_web(&f, domain_web(&f), &x, &o, &w, depth)?, Launch::NotLaunchable(_))
        } else {
            matches!(beta_prime_separating(&f, &x, &o, &w, depth)?, Launch::NotLaunchable(_))
        };
        out.push(bool_verdict("not_launchable", format!("{} at {}", f.name, x), refused, depth).sets([o, w]).points([x]));
    }
    Ok(out)
}

/// Launch data `(f, x, O, W)` by map name: `xsum_identity` or one of
/// [`continuous_maps`].
pub fn launch_data(name: &str) -> Result<(CMap, Point, ExactSet, ExactSet)> {
    if name == "xsum_identity" {
        return Ok(xsum_launch());
    }
    continuous_maps()?
        .into_iter()
        .find(|(f, ..)| f.name == name)
        .ok_or_else(|| TopoError::UnknownName(name.to_string()))
}

/// Names accepted by [`launch_data`].
pub fn launch_names() -> Vec<String> {
    let mut v = vec!["xsum_identity".to_string()];
    v.extend(continuous_maps().into_iter().flatten().map(|(f, ..)| f.name));
    v
}

/// A β′ playout with its per-ply rechecks.
pub struct BetaPrimeRun {
    pub space: Space,
    pub play: crate::games::Play,
    pub launch: Verdict,
    pub rechecks: Vec<Verdict>,
    pub notes: Vec<String>,
}

pub enum BetaPrimeOutcome {
    Played(Box<BetaPrimeRun>),
    Refused(Verdict),
}

/// β′ for the named map (web construction when `web`) against `alpha`,
/// on the tandem Michael schedule over the codomain.
pub fn beta_prime_play(web: bool, name: &str, alpha: &mut dyn Strategy, rounds: usize) -> Result<BetaPrimeOutcome> {
    let (f, x, o, w) = launch_data(name)?;
    let e = f.codomain.clone();
    let subject = format!("{} at {}", f.name, x);
    let launch = Verdict::new("launch", subject, Verified, rounds).sets([o.clone(), w.clone()]).points([x.clone()]);
    let (play, rechecks, notes) = if web {
        let tree = domain_web(&f);
        let mut beta = match beta_prime_web(&f, tree.clone(), &x, &o, &w, rounds)? {
            Launch::Ready(b) => b,
            Launch::NotLaunchable(v) => return Ok(BetaPrimeOutcome::Refused(v)),
        };
        let play = playout(ScheduleKind::TandemMichael, &e, alpha, &mut beta, rounds)?;
        let rechecks = recheck_web(&f, &tree, &w, &play, &beta.trace)?;
        (play, rechecks, beta.notes())
    } else {
        let mut beta = match beta_prime_separating(&f, &x, &o, &w, rounds)? {
            Launch::Ready(b) => b,
            Launch::NotLaunchable(v) => return Ok(BetaPrimeOutcome::Refused(v)),
        };
        let play = playout(ScheduleKind::TandemMichael, &e, alpha, &mut beta, rounds)?;
        let rechecks = recheck_separating(&f, &w, &play, &beta.trace)?;
        (play, rechecks, beta.notes())
    };
    Ok(BetaPrimeOutcome::Played(Box::new(BetaPrimeRun { space: e, play, launch, rechecks, notes })))
}

/// β′ on `xsum_identity` against `shrink_to:first`.
pub fn beta_prime_run(web: bool, rounds: usize) -> Result<Option<BetaPrimeRun>> {
    Ok(match beta_prime_play(web, "xsum_identity", &mut ShrinkTo::first(), rounds)? {
        BetaPrimeOutcome::Played(r) => Some(*r),
        BetaPrimeOutcome::Refused(_) => None,
    })
}

fn run_tandem(rows: &mut Rows<'_>, depth: usize, web: bool) -> Result<()> {
    let e = xsum_identity().codomain;
    let Some(run) = beta_prime_run(web, depth)? else {
        rows.one("launch", Verdict::new("launch", "xsum_identity at 0", Refuted, depth));
        return Ok(());
    };
    rows.one("launch", run.launch.clone());
    rows.push("not_launchable_continuous", not_launchable_verdicts(web, depth)?, None);
    let mut legal = check_play(&e, &run.play);
    if let Some(r) = &run.play.resignation {
        legal = Verdict::new("legality", &run.play.beta, Refuted, r.ply).note(format!("{:?} resigned: {}", r.mover, r.reason));
    }
    rows.one("legality", legal);
    rows.one("meander", check_meander(&e, &run.play));
    let group = |p: &str| -> Vec<Verdict> { run.rechecks.iter().filter(|v| v.property == p).cloned().collect() };
    if web {
        rows.push("invariant_1", group("chain"), None);
        rows.push("invariant_2", group("2"), None);
        rows.push("invariant_3", group("3"), None);
    }
    rows.push("invariant_i", group("i"), None);
    rows.push("invariant_ii", group("ii"), None);
    rows.push("invariant_iii", group("iii"), None);
    if !web {
        let bad = group("nonempty");
        let v = if bad.is_empty() { vec![Verdict::new("nonempty", "beta moves", Verified, depth)] } else { bad };
        rows.push("nonempty_moves", v, None);
    }
    Ok(())
}

/// Up to `n` branches through the first levels, main branch first.
fn branches(tree: &LabeledTree, n: usize) -> Vec<Branch> {
    let mut bs = sample_branches(tree, 2, 5);
    if let Some(i) = bs.iter().position(|b| b == &SeqPoint::constant(0)) {
        let main = bs.remove(i);
        bs.insert(0, main);
    }
    bs.truncate(n);
    bs
}

/// A probe neighbourhood of the limit, a few levels down.
fn limit_nbhd(tree: &LabeledTree, y: &Point) -> Result<ExactSet> {
    for d in 3..64 {
        if let Some(n) = tree.space.neighborhoods_of(y, d)?.pop() {
            return Ok(n);
        }
    }
    Err(TopoError::EmptySet)
}

fn run_plain_sieve(rows: &mut Rows<'_>, depth: usize) -> Result<()> {
    let inst = rows.inst.clone();
    let Subject::Tree(tree) = &inst.subject else { unreachable!("tree instance") };
    let bs = if tree.kind_name() == "singletons" {
        (0..20).map(|k| SeqPoint::new(vec![k], 0)).collect()
    } else {
        branches(tree, 20)
    };
    rows.one("sieve", check_sieve(tree, depth));
    rows.push("p_complete", check_p_complete(tree, &bs, depth), None);
    rows.push("delta", bs.iter().map(|b| check_delta(tree, b, depth)).collect(), None);
    let mut mu = Vec::new();
    let mut qmu = Vec::new();
    for b in &bs {
        let y = tree.limit(b).ok_or_else(|| TopoError::Unsupported(format!("no limit for {}", b)))?;
        let u = limit_nbhd(tree, &y)?;
        let (m, q) = check_mu_properties(tree, b, &y, &u, depth)?;
        mu.push(m);
        qmu.push(q);
    }
    rows.push("mu", mu, None);
    if inst.expected.iter().any(|e| e.property == "quasi_mu") {
        rows.push("quasi_mu", qmu, None);
    }
    let search = match find_mu_refutation(tree, depth) {
        Some(v) => v,
        None => Verdict::new("mu_refutation", &tree.name, Unknown, depth).note("search exhausted"),
    };
    rows.one("mu_refutation", search);
    if inst.expected.iter().any(|e| e.property == "canonical_continuity") {
        let cs = bs.iter().map(|b| canonical_continuity(tree, b, depth)).collect::<Result<Vec<_>>>()?;
        rows.push("canonical_continuity", cs, None);
    }
    Ok(())
}

/// Runs the named tree checks (`s`, `p`, `delta`, `mu`) on up to 20
/// branches; `expect` pairs a check name with its stated outcome.
pub fn sieve_report(tree: &LabeledTree, checks: &[&str], expect: &[(String, Outcome)], depth: usize) -> Result<Report> {
    let bs = if tree.kind_name() == "singletons" {
        (0..20).map(|k| SeqPoint::new(vec![k], 0)).collect()
    } else {
        branches(tree, 20)
    };
    let mut rows = Vec::new();
    for &check in checks {
        let (operation, certificate) = match check {
            "s" => ("check_sieve", vec![check_sieve(tree, depth)]),
            "p" => ("check_p_complete", check_p_complete(tree, &bs, depth)),
            "delta" => ("check_delta", bs.iter().map(|b| check_delta(tree, b, depth)).collect()),
            "mu" => match find_mu_refutation(tree, depth) {
                Some(v) => ("find_mu_refutation", vec![v]),
                None => {
                    let mut vs = Vec::new();
                    for b in &bs {
                        let Some(y) = tree.limit(b) else { continue };
                        let u = limit_nbhd(tree, &y)?;
                        vs.push(check_mu_properties(tree, b, &y, &u, depth)?.0);
                    }
                    ("check_mu_properties", vs)
                }
            },
            other => return Err(TopoError::UnknownName(format!("tree check {}", other))),
        };
        let expected = expect.iter().find(|(c, _)| c == check).map(|(_, o)| *o);
        let verdict = aggregate(&certificate);
        rows.push(CheckRow {
            property: check.to_string(),
            operation: operation.to_string(),
            expected,
            verdict,
            matches: expected.is_none_or(|e| e == verdict),
            rechecked: None,
            certificate,
        });
    }
    let matches = rows.iter().all(|c| c.matches);
    Ok(Report { instance: tree.name.clone(), version: GOLDEN_VERSION, depth, seed: 0, checks: rows, matches })
}

/// `U = (−1/2, 1/2) ∩ ℚ`, the planted neighbourhood of the non-μ sieve.
pub fn non_mu_u() -> ExactSet {
    set("rational:(-1/2,1/2)")
}

fn run_non_mu(rows: &mut Rows<'_>, depth: usize, seed: u64) -> Result<()> {
    let tree = LabeledTree::non_mu();
    let main = SeqPoint::constant(0);
    let zero = Point::int(0);
    rows.one("sieve", check_sieve(&tree, depth));
    rows.push("p_complete", check_p_complete(&tree, &branches(&tree, 20), depth), None);
    rows.one("delta", check_delta(&tree, &main, depth));
    let (mu, qmu) = check_mu_properties(&tree, &main, &zero, &non_mu_u(), depth)?;
    rows.one("mu", mu);
    rows.one("quasi_mu", qmu);
    let search = find_mu_refutation(&tree, 3).unwrap_or_else(|| Verdict::new("mu", &tree.name, Unknown, 3).note("search exhausted"));
    rows.one("mu_refutation", search);
    let q = Space::rationals();
    let ys = q.sample_points(&q.full(), 51, seed)?;
    let pairs: Vec<(Branch, Point)> = ys.into_iter().filter(|y| y != &zero).take(50).map(|y| (main.clone(), y)).collect();
    rows.push("canonical_closed_graph", canonical_closed_graph(&tree, &pairs, depth)?, None);
    let nc = canonical_near_continuity(&tree, &main, depth)?;
    // the inclusion fails as soon as one probe U does
    let refuted: Vec<Verdict> = nc.iter().filter(|v| v.is(Refuted)).cloned().collect();
    rows.push("canonical_near_continuity", if refuted.is_empty() { nc } else { refuted }, None);
    rows.one("canonical_continuity", canonical_continuity(&tree, &main, depth)?);
    Ok(())
}

/// The Σ-space of the shipped non-μ sieve.
pub fn non_mu_sigma() -> Space {
    crate::sieves::sigma_space(Arc::new(LabeledTree::non_mu()))
}

// ---------------------------------------------------------------------------
// Golden files.

/// Golden directory: `$TOPOLAB_GOLDEN_DIR` or the versioned directory
/// shipped with this crate.
pub fn golden_dir() -> PathBuf {
    match std::env::var_os(GOLDEN_DIR_ENV) {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("golden").join(GOLDEN_VERSION),
    }
}

pub fn golden_path(dir: &Path, name: &str, depth: usize, seed: u64) -> PathBuf {
    dir.join(format!("{}.d{}.s{}.json", name, depth, seed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GoldenStatus {
    Match,
    Missing { path: String },
    /// First differing line, 1-based.
    Differs { path: String, line: usize, certificate: String, expected: String, actual: String },
}

impl GoldenStatus {
    pub fn is_match(&self) -> bool {
        matches!(self, GoldenStatus::Match)
    }
}

impl fmt::Display for GoldenStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoldenStatus::Match => write!(f, "golden: match"),
            GoldenStatus::Missing { path } => write!(f, "golden: none at {}", path),
            GoldenStatus::Differs { path, line, certificate, expected, actual } => {
                write!(f, "golden: {} differs at line {} in {}\n  golden:   {}\n  computed: {}", path, line, certificate, expected, actual)
            }
        }
    }
}

/// Byte-for-byte comparison of a report with its golden file.
pub fn compare_golden(dir: &Path, report: &Report) -> std::io::Result<GoldenStatus> {
    let path = golden_path(dir, &report.instance, report.depth, report.seed);
    let shown = path.display().to_string();
    let stored = match std::fs::read_to_string(&path) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(GoldenStatus::Missing { path: shown }),
        Err(e) => return Err(e),
    };
    let actual = report.to_json();
    if stored == actual {
        return Ok(GoldenStatus::Match);
    }
    let mut a = stored.lines();
    let mut b = actual.lines();
    let mut line = 1;
    loop {
        match (a.next(), b.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return Ok(GoldenStatus::Differs {
                    path: shown,
                    line,
                    certificate: enclosing(&actual, line),
                    expected: x.unwrap_or("<end of file>").trim().to_string(),
                    actual: y.unwrap_or("<end of file>").trim().to_string(),
                })
            }
        }
    }
}

/// `check <property>` or `certificate <property> on <subject>` for the
/// object around a 1-based line of a pretty report.
fn enclosing(text: &str, line: usize) -> String {
    let field = |l: &str, key: &str| {
        l.trim().strip_prefix(&format!("\"{}\": ", key)).map(|v| v.trim_end_matches(',').trim_matches('"').to_string())
    };
    let lines: Vec<&str> = text.lines().take(line).collect();
    let mut subject = None;
    for l in lines.iter().rev() {
        if subject.is_none() {
            subject = field(l, "subject");
        }
        if let Some(p) = field(l, "property") {
            // certificates carry a subject right after the property
            let indent = l.len() - l.trim_start().len();
            return match subject {
                Some(s) if indent > 6 => format!("certificate {} on {}", p, s),
                _ => format!("check {}", p),
            };
        }
    }
    "report header".into()
}

/// Writes the report as the new golden file.
pub fn bless(dir: &Path, report: &Report) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = golden_path(dir, &report.instance, report.depth, report.seed);
    std::fs::write(&path, report.to_json())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_loads() {
        for n in INSTANCES {
            let i = load_instance(n).unwrap();
            assert_eq!(i.name, n);
            assert!(!i.expected.is_empty());
        }
        assert!(load_instance("nope").is_err());
    }

    #[test]
    fn aggregation_rule() {
        let v = |o| Verdict::new("p", "s", o, 1);
        assert_eq!(aggregate(&[v(Verified), v(Verified)]), Verified);
        assert_eq!(aggregate(&[v(Verified), v(Refuted)]), Unknown);
        assert_eq!(aggregate(&[]), Unknown);
    }

    #[test]
    fn refined_spaces_build() {
        star_space_q().unwrap();
        star_space_k().unwrap();
        cardinal_space_k(6).unwrap();
        dense_refined_q().unwrap();
    }

    #[test]
    fn m1_block_is_closed_discrete() {
        let m1 = Space::line(vec![Trace::M1]);
        let b = m1_block(3);
        assert!(m1.is_empty(&m1.omega_acc(&b).unwrap()));
        assert!(b.contains(&Point::Real(FieldPoint::rational(crate::trace::m1_point(3, 5)))));
    }

    #[test]
    #[ignore]
    fn timing_all() {
        let depth: usize = std::env::var("D").ok().and_then(|d| d.parse().ok()).unwrap_or(8);
        for n in INSTANCES {
            let t = std::time::Instant::now();
            match run_instance(n, depth, 0) {
                Ok(r) => eprint!("{}{:?}\n", r, t.elapsed()),
                Err(e) => eprintln!("{}: error {} {:?}", n, e, t.elapsed()),
            }
        }
    }
}
