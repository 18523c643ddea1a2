//! Banach–Mazur and Michael games with their tandem versions, bounded
//! playouts with exact legality, the β-lift through a star refinement and
//! the two β′ strategies against tandem Michael players.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TopoError};
use crate::maps::{CMap, Outcome, Verdict};
use crate::point::Point;
use crate::refine::RefinementSpec;
use crate::set::ExactSet;
use crate::sieves::LabeledTree;
use crate::space::Space;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    #[serde(rename = "bm")]
    BanachMazur,
    Michael,
    #[serde(rename = "tandem_bm")]
    TandemBanachMazur,
    TandemMichael,
}

impl ScheduleKind {
    pub fn is_tandem(self) -> bool {
        matches!(self, ScheduleKind::TandemBanachMazur | ScheduleKind::TandemMichael)
    }

    pub fn is_michael(self) -> bool {
        matches!(self, ScheduleKind::Michael | ScheduleKind::TandemMichael)
    }

    pub fn id(self) -> &'static str {
        match self {
            ScheduleKind::BanachMazur => "bm",
            ScheduleKind::Michael => "michael",
            ScheduleKind::TandemBanachMazur => "tandem-bm",
            ScheduleKind::TandemMichael => "tandem-michael",
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = TopoError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bm" => ScheduleKind::BanachMazur,
            "michael" => ScheduleKind::Michael,
            "tandem-bm" => ScheduleKind::TandemBanachMazur,
            "tandem-michael" => ScheduleKind::TandemMichael,
            other => return Err(TopoError::UnknownName(other.to_string())),
        })
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mover {
    Alpha,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    Plain,
    Primed,
}

impl Track {
    fn slot(self) -> usize {
        match self {
            Track::Plain => 0,
            Track::Primed => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// A nonempty open set.
    Open,
    /// Any nonempty set.
    Arbitrary,
    /// `B ∩ U` for an open `U`, nonempty.
    RelativeOpen,
}

/// One row of the ply table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlySpec {
    pub index: usize,
    /// 1-based round: `B_round`, `A_round` and their primed partners.
    pub round: usize,
    pub mover: Mover,
    pub track: Track,
    pub rule: Rule,
    /// The earlier ply whose set must contain this move.
    pub inside: Option<usize>,
}

impl PlySpec {
    pub fn label(&self) -> String {
        let letter = match self.mover {
            Mover::Beta => 'B',
            Mover::Alpha => 'A',
        };
        let prime = if self.track == Track::Primed { "'" } else { "" };
        format!("{}{}{}", letter, self.round, prime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameSchedule {
    pub kind: ScheduleKind,
}

impl GameSchedule {
    pub fn new(kind: ScheduleKind) -> Self {
        GameSchedule { kind }
    }

    pub fn plies_per_round(&self) -> usize {
        if self.kind.is_tandem() {
            4
        } else {
            2
        }
    }

    /// Row `i` of the ply table. Tandem order is
    /// `B₁, A₁, B₁′, A₁′, B₂, A₂, …` with `B_{k+1} ⊆ A_k`, `B′_{k+1} ⊆ A′_k`
    /// and `B₁′` unconstrained.
    pub fn ply(&self, i: usize) -> PlySpec {
        let per = self.plies_per_round();
        let round = i / per + 1;
        let pos = i % per;
        let mover = if pos % 2 == 0 { Mover::Beta } else { Mover::Alpha };
        let track = if pos >= 2 { Track::Primed } else { Track::Plain };
        let rule = match (self.kind.is_michael(), mover) {
            (false, _) => Rule::Open,
            (true, Mover::Beta) => Rule::Arbitrary,
            (true, Mover::Alpha) => Rule::RelativeOpen,
        };
        let inside = match mover {
            Mover::Alpha => Some(i - 1),
            Mover::Beta => (round > 1).then(|| i + 1 - per),
        };
        PlySpec { index: i, round, mover, track, rule, inside }
    }

    pub fn table(&self, rounds: usize) -> Vec<PlySpec> {
        (0..rounds * self.plies_per_round()).map(|i| self.ply(i)).collect()
    }
}

/// A move: the set, and for relatively open moves optionally the open
/// `U` with `A = B ∩ U`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Move {
    pub set: ExactSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExactSet>,
}

impl Move {
    pub fn new(set: ExactSet) -> Self {
        Move { set, witness: None }
    }

    pub fn with_witness(set: ExactSet, u: ExactSet) -> Self {
        Move { set, witness: Some(u) }
    }
}

pub enum Response {
    Move(Move),
    Resign(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct PlyRecord {
    pub index: usize,
    pub label: String,
    pub mover: Mover,
    pub track: Track,
    pub set: ExactSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExactSet>,
    pub containment_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Resignation {
    pub ply: usize,
    pub mover: Mover,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Play {
    pub schedule: ScheduleKind,
    pub space: String,
    pub alpha: String,
    pub beta: String,
    pub plies: Vec<PlyRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resignation: Option<Resignation>,
    /// Designated limit points carried by α, one per track.
    pub designated: Vec<Option<Point>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Play {
    pub fn new(kind: ScheduleKind, space: &Space, alpha: &str, beta: &str) -> Self {
        let tracks = if kind.is_tandem() { 2 } else { 1 };
        Play {
            schedule: kind,
            space: space.name(),
            alpha: alpha.into(),
            beta: beta.into(),
            plies: Vec::new(),
            resignation: None,
            designated: vec![None; tracks],
            notes: Vec::new(),
        }
    }

    pub fn schedule(&self) -> GameSchedule {
        GameSchedule::new(self.schedule)
    }

    pub fn set(&self, i: usize) -> Option<&ExactSet> {
        self.plies.get(i).map(|r| &r.set)
    }

    /// The moves of one player on one track, in order.
    pub fn moves(&self, track: Track, mover: Mover) -> Vec<&ExactSet> {
        self.plies.iter().filter(|r| r.track == track && r.mover == mover).map(|r| &r.set).collect()
    }

    pub fn rounds(&self) -> usize {
        self.plies.len() / self.schedule().plies_per_round()
    }

    /// The plain or primed track as a game of its own (Michael or BM).
    pub fn restrict(&self, track: Track) -> Play {
        let kind = match self.schedule {
            ScheduleKind::TandemMichael => ScheduleKind::Michael,
            ScheduleKind::TandemBanachMazur => ScheduleKind::BanachMazur,
            k => k,
        };
        let mut out = self.clone();
        out.schedule = kind;
        out.plies = Vec::new();
        let sched = GameSchedule::new(kind);
        for r in self.plies.iter().filter(|r| r.track == track) {
            let spec = sched.ply(out.plies.len());
            out.plies.push(PlyRecord { index: spec.index, label: spec.label(), track: Track::Plain, ..r.clone() });
        }
        out.designated = vec![self.designated.get(track.slot()).cloned().flatten()];
        out.resignation = None;
        out
    }
}

/// Everything a strategy may look at when it has to move.
pub struct Ctx<'a> {
    pub space: &'a Space,
    pub play: &'a Play,
    pub ply: PlySpec,
    pub prior: Option<&'a ExactSet>,
}

impl Ctx<'_> {
    /// The prior constraint, or the whole space for unconstrained moves.
    pub fn region(&self) -> ExactSet {
        self.prior.cloned().unwrap_or_else(|| self.space.full())
    }
}

/// A deterministic player. Moves depend on the full history.
pub trait Strategy {
    fn name(&self) -> String;
    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response>;
    /// A point the strategy keeps inside each of its moves on `track`.
    fn designated(&self, _track: Track) -> Option<Point> {
        None
    }
    /// Remarks to copy into the play record.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

/// The largest open `U` with `A = B ∩ U` when `A` is relatively open in `B`.
pub fn open_witness(space: &Space, b: &ExactSet, a: &ExactSet) -> Result<ExactSet> {
    space.interior(&a.union(&space.complement(b)?)?)
}

/// Exact legality of a move against its ply row.
pub fn check_move(space: &Space, spec: &PlySpec, prior: Option<&ExactSet>, mv: &Move) -> std::result::Result<(), String> {
    let err = |e: TopoError| e.to_string();
    let s = &mv.set;
    if !space.subset(s, &space.full()).map_err(err)? {
        return Err(format!("{} leaves the space", spec.label()));
    }
    if space.is_empty(s) {
        return Err(format!("{} is empty", spec.label()));
    }
    if let Some(p) = prior {
        if !space.subset(s, p).map_err(err)? {
            let w = space.candidates(&s.difference(p).map_err(err)?, 1);
            let at = w.first().map(|x| format!(" (contains {})", x)).unwrap_or_default();
            return Err(format!("{} is not inside the previous move{}", spec.label(), at));
        }
    }
    match spec.rule {
        Rule::Arbitrary => Ok(()),
        Rule::Open => {
            if space.is_open(s).map_err(err)? {
                Ok(())
            } else {
                Err(format!("{} is not open", spec.label()))
            }
        }
        Rule::RelativeOpen => {
            let b = prior.cloned().unwrap_or_else(|| space.full());
            match &mv.witness {
                Some(u) => {
                    if !space.is_open(u).map_err(err)? {
                        return Err(format!("witness of {} is not open", spec.label()));
                    }
                    if !space.same(&b.intersect(u).map_err(err)?, s) {
                        return Err(format!("{} differs from the previous move cut by its witness", spec.label()));
                    }
                    Ok(())
                }
                None => {
                    let rest = b.difference(s).map_err(err)?;
                    let cl = space.closure(&rest).map_err(err)?;
                    if space.meets(s, &cl).map_err(err)? {
                        Err(format!("{} is not relatively open in the previous move", spec.label()))
                    } else {
                        Ok(())
                    }
                }
            }
        }
    }
}

fn run(
    kind: ScheduleKind,
    space: &Space,
    alpha: &mut dyn Strategy,
    beta: &mut dyn Strategy,
    rounds: usize,
    strict: bool,
) -> Result<Play> {
    let sched = GameSchedule::new(kind);
    let mut play = Play::new(kind, space, &alpha.name(), &beta.name());
    for spec in sched.table(rounds) {
        let prior = spec.inside.and_then(|i| play.set(i)).cloned();
        let player: &mut dyn Strategy = match spec.mover {
            Mover::Alpha => &mut *alpha,
            Mover::Beta => &mut *beta,
        };
        let ctx = Ctx { space, play: &play, ply: spec, prior: prior.as_ref() };
        let mv = match player.respond(&ctx)? {
            Response::Move(m) => m,
            Response::Resign(reason) => {
                play.resignation = Some(Resignation { ply: spec.index, mover: spec.mover, reason });
                break;
            }
        };
        let verdict = check_move(space, &spec, prior.as_ref(), &mv);
        if strict {
            if let Err(reason) = &verdict {
                return Err(TopoError::IllegalMove { ply: spec.index, mover: player.name(), reason: reason.clone() });
            }
        }
        play.plies.push(PlyRecord {
            index: spec.index,
            label: spec.label(),
            mover: spec.mover,
            track: spec.track,
            set: mv.set,
            witness: mv.witness,
            containment_ok: verdict.is_ok(),
            note: verdict.err(),
        });
    }
    for t in [Track::Plain, Track::Primed].iter().take(play.designated.len()) {
        play.designated[t.slot()] = alpha.designated(*t);
    }
    play.notes.extend(beta.notes());
    play.notes.extend(alpha.notes());
    Ok(play)
}

/// Plays `rounds` rounds, checking every move exactly. The first illegal
/// move aborts with an error naming the strategy.
pub fn playout(kind: ScheduleKind, space: &Space, alpha: &mut dyn Strategy, beta: &mut dyn Strategy, rounds: usize) -> Result<Play> {
    run(kind, space, alpha, beta, rounds, true)
}

/// Like [`playout`] but records illegal moves instead of stopping.
pub fn playout_tolerant(kind: ScheduleKind, space: &Space, alpha: &mut dyn Strategy, beta: &mut dyn Strategy, rounds: usize) -> Result<Play> {
    run(kind, space, alpha, beta, rounds, false)
}

/// Re-checks every recorded ply of a play against its schedule.
pub fn check_play(space: &Space, play: &Play) -> Verdict {
    let sched = play.schedule();
    for (i, r) in play.plies.iter().enumerate() {
        let spec = sched.ply(i);
        if spec.mover != r.mover || spec.track != r.track {
            return Verdict::new("legality", &play.beta, Outcome::Refuted, i).note(format!("ply {} out of order", i));
        }
        let prior = spec.inside.and_then(|j| play.set(j));
        let mv = Move { set: r.set.clone(), witness: r.witness.clone() };
        if let Err(reason) = check_move(space, &spec, prior, &mv) {
            return Verdict::new("legality", &play.beta, Outcome::Refuted, i).sets([r.set.clone()]).note(reason);
        }
    }
    Verdict::new("legality", &play.beta, Outcome::Verified, play.plies.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WinOutcome {
    /// The closures of α's moves have empty intersection from this ply on.
    BetaWins { ply: usize },
    /// Every α move contains this point.
    AlphaWinCertified { point: Point },
    UndecidedNonempty { depth: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct WinReport {
    pub overall: WinOutcome,
    pub tracks: Vec<(Track, WinOutcome)>,
}

fn track_outcome(space: &Space, play: &Play, track: Track) -> WinOutcome {
    let alpha: Vec<&PlyRecord> = play.plies.iter().filter(|r| r.track == track && r.mover == Mover::Alpha).collect();
    let mut inter: Option<ExactSet> = None;
    for r in &alpha {
        let Ok(cl) = space.closure(&r.set) else { break };
        let next = match &inter {
            None => cl,
            Some(i) => match i.intersect(&cl) {
                Ok(x) => x,
                Err(_) => break,
            },
        };
        if space.is_empty(&next) {
            return WinOutcome::BetaWins { ply: r.index };
        }
        inter = Some(next);
    }
    let alpha_resigned = play.resignation.as_ref().is_some_and(|r| r.mover == Mover::Alpha);
    if let Some(p) = play.designated.get(track.slot()).cloned().flatten() {
        if !alpha_resigned && !alpha.is_empty() && alpha.iter().all(|r| r.set.contains(&p)) {
            return WinOutcome::AlphaWinCertified { point: p };
        }
    }
    WinOutcome::UndecidedNonempty { depth: alpha.len() }
}

/// Bounded win check. Tandem games need both tracks for α.
pub fn check_win_bounded(space: &Space, play: &Play) -> WinReport {
    let tracks: Vec<Track> = if play.schedule.is_tandem() { vec![Track::Plain, Track::Primed] } else { vec![Track::Plain] };
    let per: Vec<(Track, WinOutcome)> = tracks.iter().map(|t| (*t, track_outcome(space, play, *t))).collect();
    let overall = if let Some((_, b)) = per.iter().find(|(_, o)| matches!(o, WinOutcome::BetaWins { .. })) {
        b.clone()
    } else if per.iter().all(|(_, o)| matches!(o, WinOutcome::AlphaWinCertified { .. })) {
        per[0].1.clone()
    } else {
        WinOutcome::UndecidedNonempty { depth: play.rounds() }
    };
    WinReport { overall, tracks: per }
}

/// Probe neighbourhoods of `p` from `depth` on. The probe basis only
/// reaches `|x| ≤ depth`, so far points need a deeper level.
fn nbhds_reaching(space: &Space, p: &Point, depth: usize) -> Result<Vec<ExactSet>> {
    for d in depth.max(1)..depth.max(1) + 64 {
        let ns = space.neighborhoods_of(p, d)?;
        if !ns.is_empty() {
            return Ok(ns);
        }
    }
    Err(TopoError::Unsupported(format!("no neighbourhood of {}", p)))
}

fn smallest_nbhd(space: &Space, p: &Point, depth: usize) -> Result<ExactSet> {
    Ok(nbhds_reaching(space, p, depth)?.pop().expect("nonempty"))
}

/// α: cut the last β move down to a basic neighbourhood of a fixed point,
/// halving with each round. When the point is missing from β's move the
/// strategy moves its anchor and gives up its certificate.
#[derive(Clone, Debug)]
pub struct ShrinkTo {
    target: Option<Point>,
    anchors: [Option<Point>; 2],
    lost: [bool; 2],
}

impl ShrinkTo {
    pub fn new(p: Point) -> Self {
        ShrinkTo { target: Some(p), anchors: [None, None], lost: [false; 2] }
    }

    /// Anchors at the first candidate point of β's first move.
    pub fn first() -> Self {
        ShrinkTo { target: None, anchors: [None, None], lost: [false; 2] }
    }
}

impl Strategy for ShrinkTo {
    fn name(&self) -> String {
        match &self.target {
            Some(p) => format!("shrink_to({})", p),
            None => "shrink_to(first)".into(),
        }
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let b = ctx.region();
        let t = ctx.ply.track.slot();
        let current = self.anchors[t].clone().or_else(|| self.target.clone());
        let anchor = match current {
            Some(p) if b.contains(&p) => p,
            other => {
                if other.is_some() && self.anchors[t].is_some() {
                    self.lost[t] = true;
                }
                match ctx.space.candidates(&b, 2).into_iter().next() {
                    Some(c) => c,
                    None => return Ok(Response::Resign("no point found in the previous move".into())),
                }
            }
        };
        self.anchors[t] = Some(anchor.clone());
        let n = smallest_nbhd(ctx.space, &anchor, ctx.ply.round + 1)?;
        let a = b.intersect(&n)?;
        Ok(Response::Move(match ctx.ply.rule {
            Rule::RelativeOpen => Move::with_witness(a, n),
            _ => Move::new(a),
        }))
    }

    fn designated(&self, track: Track) -> Option<Point> {
        let t = track.slot();
        (!self.lost[t]).then(|| self.anchors[t].clone()).flatten()
    }
}

/// α: answer with the singleton of an isolated point of β's move.
#[derive(Clone, Debug, Default)]
pub struct SingletonIsolated {
    chosen: [Option<Point>; 2],
}

impl Strategy for SingletonIsolated {
    fn name(&self) -> String {
        "singleton_isolated".into()
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let b = ctx.region();
        let t = ctx.ply.track.slot();
        if let Some(p) = self.chosen[t].clone().filter(|p| b.contains(p)) {
            let one = ctx.space.singleton(&p)?;
            return Ok(Response::Move(Move::with_witness(one.clone(), one)));
        }
        for p in ctx.space.candidates(&b, 12) {
            let one = ctx.space.singleton(&p)?;
            if ctx.space.is_open(&one)? {
                self.chosen[t] = Some(p);
                return Ok(Response::Move(Move::with_witness(one.clone(), one)));
            }
        }
        Ok(Response::Resign("no isolated point among the candidates".into()))
    }

    fn designated(&self, track: Track) -> Option<Point> {
        self.chosen[track.slot()].clone()
    }
}

/// β: a neighbourhood of a random candidate point, cut to the last α
/// move. In Michael games it sometimes also drops a point.
#[derive(Clone, Debug)]
pub struct RandomBeta {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomBeta {
    pub fn new(seed: u64) -> Self {
        RandomBeta { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Strategy for RandomBeta {
    fn name(&self) -> String {
        format!("random_beta({})", self.seed)
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let region = ctx.region();
        let pool = ctx.space.candidates(&region, 4);
        if pool.is_empty() {
            return Ok(Response::Resign("no point found in the previous move".into()));
        }
        let c = pool[self.rng.gen_range(0..pool.len())].clone();
        let depth = ctx.ply.round + self.rng.gen_range(0..3);
        let nbhds = nbhds_reaching(ctx.space, &c, depth)?;
        let n = &nbhds[self.rng.gen_range(nbhds.len() / 2..nbhds.len())];
        let mut b = region.intersect(n)?;
        if ctx.ply.rule == Rule::Arbitrary && self.rng.gen_bool(1.0 / 3.0) {
            if let Some(q) = ctx.space.candidates(&b, 2).into_iter().find(|q| *q != c) {
                b = b.difference(&ctx.space.singleton(&q)?)?;
            }
        }
        Ok(Response::Move(Move::new(b)))
    }
}

/// β: the smallest basic neighbourhood, at `min(round, depth)`, of the
/// first candidate point of the last α move.
#[derive(Clone, Debug)]
pub struct FollowBasis {
    depth: usize,
}

impl FollowBasis {
    pub fn new(depth: usize) -> Self {
        FollowBasis { depth }
    }
}

impl Strategy for FollowBasis {
    fn name(&self) -> String {
        format!("follow_basis({})", self.depth)
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let region = ctx.region();
        let Some(c) = ctx.space.candidates(&region, 2).into_iter().next() else {
            return Ok(Response::Resign("no point found in the previous move".into()));
        };
        let n = smallest_nbhd(ctx.space, &c, ctx.ply.round.min(self.depth))?;
        Ok(Response::Move(Move::new(region.intersect(&n)?)))
    }
}

/// Plays a fixed list of moves, one per call; resigns when they run out.
#[derive(Clone, Debug)]
pub struct Replay {
    name: String,
    moves: std::collections::VecDeque<Move>,
    designated: [Option<Point>; 2],
}

impl Replay {
    pub fn new(name: impl Into<String>, moves: impl IntoIterator<Item = Move>) -> Self {
        Replay { name: name.into(), moves: moves.into_iter().collect(), designated: [None, None] }
    }

    pub fn with_designated(mut self, track: Track, p: Option<Point>) -> Self {
        self.designated[track.slot()] = p;
        self
    }
}

impl Strategy for Replay {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn respond(&mut self, _ctx: &Ctx<'_>) -> Result<Response> {
        Ok(match self.moves.pop_front() {
            Some(m) => Response::Move(m),
            None => Response::Resign("no more recorded moves".into()),
        })
    }

    fn designated(&self, track: Track) -> Option<Point> {
        self.designated[track.slot()].clone()
    }
}

/// Builds a named strategy: `shrink_to:<point>`, `shrink_to:first`,
/// `singleton_isolated`, `random_beta:<seed>`, `follow_basis:<depth>`.
pub fn builtin_strategy(spec: &str) -> Result<Box<dyn Strategy>> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b.trim())));
    let bad = || TopoError::UnknownName(spec.to_string());
    Ok(match (name, arg) {
        ("shrink_to", Some("first")) => Box::new(ShrinkTo::first()),
        ("shrink_to", Some(p)) => Box::new(ShrinkTo::new(p.parse()?)),
        ("singleton_isolated", None) => Box::new(SingletonIsolated::default()),
        ("random_beta", Some(s)) => Box::new(RandomBeta::new(s.parse().map_err(|_| bad())?)),
        ("follow_basis", Some(d)) => Box::new(FollowBasis::new(d.parse().map_err(|_| bad())?)),
        _ => return Err(bad()),
    })
}

// ---------------------------------------------------------------------------
// The lift through a star refinement.

fn star_parts(space: &Space) -> Result<(&Space, &RefinementSpec)> {
    match space {
        Space::Refined(b, spec) if matches!(spec.as_ref(), RefinementSpec::Star { .. } | RefinementSpec::Cardinal { .. }) => {
            Ok((b.as_ref(), spec.as_ref()))
        }
        other => Err(TopoError::Unsupported(format!("{} is not a star refinement", other.name()))),
    }
}

/// Writes a refined move as `U ∩ V_j*` (`Some(j)`) or as a base-open `U`
/// avoiding `x₀` (`None`).
pub fn decompose_basic(star: &Space, w: &ExactSet) -> Result<(ExactSet, Option<usize>)> {
    let (base, spec) = star_parts(star)?;
    let x0 = spec.x0().expect("star refinements carry x0");
    if !w.contains(x0) && base.is_open(w)? {
        return Ok((w.clone(), None));
    }
    for (j, vs) in spec.starred(base)?.iter().enumerate() {
        if !base.subset(w, vs)? {
            continue;
        }
        let u = base.interior(&w.union(&base.complement(vs)?)?)?;
        if base.same(&u.intersect(vs)?, w) {
            return Ok((u, Some(j)));
        }
    }
    Err(TopoError::Unsupported(format!("{} is not a basic set of {}", w, star.name())))
}

/// A nonempty base-open subset of `s` avoiding `x0`.
fn open_avoiding(base: &Space, s: &ExactSet, x0: &Point) -> Result<ExactSet> {
    for c in base.candidates(s, 6).into_iter().filter(|c| c != x0) {
        for d in 1..=24 {
            for n in base.neighborhoods_of(&c, d)?.into_iter().rev() {
                if !n.contains(x0) && base.subset(&n, s)? {
                    return Ok(n);
                }
            }
        }
    }
    Err(TopoError::EmptySet)
}

/// One row of a joint playout: `W_i*`, `W_i`, `O_i`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftRow {
    pub w_star: ExactSet,
    pub w: ExactSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub o: Option<ExactSet>,
}

/// β on the base space copied from a β* that plays basic sets of the
/// refinement: `W_i = U_i ∩ V_i`, except that `W₁` avoids `x₀` when
/// `x₀ ∈ U₁ ∩ V₁`.
pub struct LiftedBeta {
    star_space: Space,
    star: Box<dyn Strategy>,
    star_play: Play,
    pub rows: Vec<LiftRow>,
}

pub fn lift_strategy_baire(star_space: Space, beta_star: Box<dyn Strategy>) -> Result<LiftedBeta> {
    star_parts(&star_space)?;
    let star_play = Play::new(ScheduleKind::BanachMazur, &star_space, "alpha*", &beta_star.name());
    Ok(LiftedBeta { star_space, star: beta_star, star_play, rows: Vec::new() })
}

impl LiftedBeta {
    pub fn star_play(&self) -> &Play {
        &self.star_play
    }
}

impl Strategy for LiftedBeta {
    fn name(&self) -> String {
        format!("lift({})", self.star.name())
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let (base, spec) = star_parts(&self.star_space)?;
        let sched = GameSchedule::new(ScheduleKind::BanachMazur);
        if let Some(o) = ctx.prior {
            // α's last move, seen as a move of α* against β*
            let i = self.star_play.plies.len();
            let row = sched.ply(i);
            self.star_play.plies.push(PlyRecord {
                index: i,
                label: row.label(),
                mover: Mover::Alpha,
                track: Track::Plain,
                set: o.clone(),
                witness: None,
                containment_ok: true,
                note: None,
            });
            if let Some(last) = self.rows.last_mut() {
                last.o = Some(o.clone());
            }
        }
        let i = self.star_play.plies.len();
        let row = sched.ply(i);
        let prior = row.inside.and_then(|j| self.star_play.set(j)).cloned();
        let sctx = Ctx { space: &self.star_space, play: &self.star_play, ply: row, prior: prior.as_ref() };
        let w_star = match self.star.respond(&sctx)? {
            Response::Move(m) => m.set,
            Response::Resign(r) => return Ok(Response::Resign(format!("beta* resigned: {}", r))),
        };
        let (u, j) = decompose_basic(&self.star_space, &w_star)?;
        let x0 = spec.x0().expect("star refinements carry x0");
        let mut w = match j {
            Some(j) => u.intersect(&spec.family()[j])?,
            None => u,
        };
        if self.rows.is_empty() && w.contains(x0) {
            w = open_avoiding(base, &w, x0)?;
        }
        self.star_play.plies.push(PlyRecord {
            index: i,
            label: row.label(),
            mover: Mover::Beta,
            track: Track::Plain,
            set: w_star.clone(),
            witness: None,
            containment_ok: true,
            note: None,
        });
        self.rows.push(LiftRow { w_star, w: w.clone(), o: None });
        Ok(Response::Move(Move::new(w)))
    }
}

/// Base play, refined replay and the interleaving check of one joint run.
#[derive(Clone, Debug, Serialize)]
pub struct JointPlay {
    pub base: Play,
    pub star: Play,
    pub rows: Vec<LiftRow>,
    pub interleaving: Verdict,
}

/// Plays the lifted β against `alpha` on the base, then replays α's moves
/// as α* against a fresh β* on the refinement and checks
/// `W_i* ⊇ W_i ⊇ O_i ⊇ W_{i+1}*` at every `i`.
pub fn lift_playout(
    star_space: &Space,
    make_beta_star: &dyn Fn() -> Box<dyn Strategy>,
    alpha: &mut dyn Strategy,
    rounds: usize,
) -> Result<JointPlay> {
    let (base, _) = star_parts(star_space)?;
    let mut lifted = lift_strategy_baire(star_space.clone(), make_beta_star())?;
    let base_play = playout(ScheduleKind::BanachMazur, base, alpha, &mut lifted, rounds)?;
    let mut rows = lifted.rows.clone();
    if let (Some(last), Some(o)) = (rows.last_mut(), base_play.moves(Track::Plain, Mover::Alpha).last()) {
        if base_play.plies.len() % 2 == 0 {
            last.o = Some((*o).clone());
        }
    }
    let alpha_moves: Vec<Move> = base_play.moves(Track::Plain, Mover::Alpha).into_iter().map(|s| Move::new(s.clone())).collect();
    let mut projected = project_alpha(alpha_moves, base_play.designated[0].clone());
    let mut beta_star = make_beta_star();
    let star = playout(ScheduleKind::BanachMazur, star_space, &mut projected, beta_star.as_mut(), rounds)?;
    let mut bad = None;
    for (i, r) in rows.iter().enumerate() {
        let star_w = star.moves(Track::Plain, Mover::Beta).get(i).map(|s| (*s).clone());
        if star_w.as_ref() != Some(&r.w_star) {
            bad = Some(format!("replay diverged at W{}*", i + 1));
            break;
        }
        let mut ok = base.subset(&r.w, &r.w_star)?;
        if let Some(o) = &r.o {
            ok &= base.subset(o, &r.w)?;
            if let Some(next) = rows.get(i + 1) {
                ok &= base.subset(&next.w_star, o)?;
            }
        }
        if !ok {
            bad = Some(format!("chain breaks at index {}", i + 1));
            break;
        }
    }
    let interleaving = match bad {
        None => Verdict::new("interleaving", star_space.name(), Outcome::Verified, rows.len()),
        Some(n) => Verdict::new("interleaving", star_space.name(), Outcome::Refuted, rows.len()).note(n),
    };
    Ok(JointPlay { base: base_play, star, rows, interleaving })
}

/// α* making the same moves as α.
pub fn project_alpha(moves: Vec<Move>, designated: Option<Point>) -> Replay {
    Replay::new("alpha*", moves).with_designated(Track::Plain, designated)
}

/// β* on a star refinement: `U ∩ V_j*` around a random point of the last
/// α move, with `U` a base neighbourhood cut to that move.
pub struct RandomStarBeta {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStarBeta {
    pub fn new(seed: u64) -> Self {
        RandomStarBeta { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Strategy for RandomStarBeta {
    fn name(&self) -> String {
        format!("random_star_beta({})", self.seed)
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let (base, spec) = star_parts(ctx.space)?;
        let x0 = spec.x0().expect("star refinements carry x0");
        let region = ctx.region();
        let mut pool = base.candidates(&region, 4);
        if region.contains(x0) && self.rng.gen_bool(0.5) {
            pool.insert(0, x0.clone());
        }
        if pool.is_empty() {
            return Ok(Response::Resign("no point found in the previous move".into()));
        }
        let c = pool[self.rng.gen_range(0..pool.len())].clone();
        let nbhds = nbhds_reaching(base, &c, ctx.ply.round + self.rng.gen_range(0..3))?;
        let n = &nbhds[self.rng.gen_range(nbhds.len() / 2..nbhds.len())];
        let u = region.intersect(n)?;
        let stars = spec.starred(base)?;
        let start = self.rng.gen_range(0..stars.len());
        for k in 0..stars.len() {
            let w = u.intersect(&stars[(start + k) % stars.len()])?;
            if !base.is_empty(&w) && ctx.space.is_open(&w)? {
                return Ok(Response::Move(Move::new(w)));
            }
        }
        if !u.contains(x0) && !base.is_empty(&u) {
            return Ok(Response::Move(Move::new(u)));
        }
        Ok(Response::Resign("no basic set found".into()))
    }
}

// ---------------------------------------------------------------------------
// β′ strategies.

/// Construction outcome for the β′ strategies.
pub enum Launch<S> {
    Ready(S),
    /// Evidence that the premise fails, usually a neighbourhood `U ∋ x`
    /// with `f(U) ⊆ O`.
    NotLaunchable(Verdict),
}

impl<S> Launch<S> {
    pub fn ready(self) -> Option<S> {
        match self {
            Launch::Ready(s) => Some(s),
            Launch::NotLaunchable(_) => None,
        }
    }
}

/// The chains `V₀ ⊇ V₁ ⊇ …`, `W₀ ⊇ W₁ ⊇ …` read off α′'s moves, the tree
/// nodes used (web version) and the plies where α′'s witness was cut down.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BetaPrimeTrace {
    pub v: Vec<ExactSet>,
    pub w: Vec<ExactSet>,
    pub nodes: Vec<Vec<u64>>,
    pub normalized: Vec<usize>,
}

/// `int cl f⁻¹(s)` in the domain.
fn icl(f: &CMap, s: &ExactSet) -> Result<ExactSet> {
    let d = &f.domain;
    d.interior(&d.closure(&f.preimage(s)?)?)
}

/// Premise shared by both β′ strategies.
fn launch_premise(f: &CMap, x: &Point, o: &ExactSet, w: &ExactSet, depth: usize) -> Result<Option<Verdict>> {
    let e = &f.codomain;
    let subject = format!("{} at {}", f.name, x);
    if !f.has_image() {
        return Err(TopoError::Unsupported(format!("{} has no image operator", f.name)));
    }
    let fx = f.eval(x)?;
    if !w.contains(&fx) || !e.is_open(w)? || !e.is_open(o)? {
        return Err(TopoError::SpecViolation(format!("W must be an open neighbourhood of {} and O open", fx)));
    }
    if !e.subset(&e.closure(w)?, o)? {
        return Err(TopoError::SpecViolation("cl W is not inside O".into()));
    }
    for d in 1..=depth {
        for u in f.domain.neighborhoods_of(x, d)? {
            if e.subset(&f.image(&u)?, o)? {
                return Ok(Some(
                    Verdict::new("discontinuity", subject, Outcome::Refuted, d)
                        .sets([u, o.clone()])
                        .points([x.clone()])
                        .note("f(U) lies inside O"),
                ));
            }
        }
    }
    Ok(None)
}

/// The open set behind α′'s relatively open move, cut to the previous
/// constraint.
fn alpha_open(e: &Space, play: &Play, at: usize, prev: &ExactSet, trace: &mut BetaPrimeTrace) -> Result<ExactSet> {
    let r = &play.plies[at];
    let b = play.set(at - 1).expect("alpha moves follow beta moves");
    let u = match &r.witness {
        Some(u) => u.clone(),
        None => open_witness(e, b, &r.set)?,
    };
    if !e.subset(&u, prev)? {
        trace.normalized.push(at);
        return u.intersect(prev);
    }
    Ok(u)
}

/// β′ for a nearly continuous separating `f : F → E` into a regular
/// space: `B_n = V_{n−1} ∩ f(int cl f⁻¹(W_{n−1}))`,
/// `B′_n = W_{n−1} ∩ f(int cl f⁻¹(V_n))`.
pub struct BetaPrimeSeparating {
    f: CMap,
    pub trace: BetaPrimeTrace,
}

pub fn beta_prime_separating(f: &CMap, x: &Point, o: &ExactSet, w: &ExactSet, depth: usize) -> Result<Launch<BetaPrimeSeparating>> {
    if let Some(v) = launch_premise(f, x, o, w, depth)? {
        return Ok(Launch::NotLaunchable(v));
    }
    let e = &f.codomain;
    let v0 = e.complement(&e.closure(w)?)?;
    let b1 = v0.intersect(&f.image(&icl(f, w)?)?)?;
    if e.is_empty(&b1) {
        return Ok(Launch::NotLaunchable(
            Verdict::new("discontinuity", format!("{} at {}", f.name, x), Outcome::Unknown, depth)
                .sets([v0])
                .note("V0 misses f(int cl f^-1(W0))"),
        ));
    }
    let trace = BetaPrimeTrace { v: vec![v0], w: vec![w.clone()], ..Default::default() };
    Ok(Launch::Ready(BetaPrimeSeparating { f: f.clone(), trace }))
}

impl Strategy for BetaPrimeSeparating {
    fn name(&self) -> String {
        format!("beta_prime_separating({})", self.f.name)
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let e = &self.f.codomain;
        let i = ctx.ply.index;
        let set = match ctx.ply.track {
            Track::Plain => {
                // B_n needs W_{n-1}; for n > 1 read it off A'_{n-1}
                if i > 0 {
                    let prev = self.trace.w.last().expect("W0").clone();
                    let wn = alpha_open(e, ctx.play, i - 1, &prev, &mut self.trace)?;
                    self.trace.w.push(wn);
                }
                let vn = &self.trace.v[self.trace.v.len() - 1];
                let wn = &self.trace.w[self.trace.w.len() - 1];
                vn.intersect(&self.f.image(&icl(&self.f, wn)?)?)?
            }
            Track::Primed => {
                let prev = self.trace.v.last().expect("V0").clone();
                let vn = alpha_open(e, ctx.play, i - 1, &prev, &mut self.trace)?;
                self.trace.v.push(vn);
                let wprev = &self.trace.w[self.trace.w.len() - 1];
                wprev.intersect(&self.f.image(&icl(&self.f, &self.trace.v[self.trace.v.len() - 1])?)?)?
            }
        };
        if e.is_empty(&set) {
            return Ok(Response::Resign(format!("{} would be empty", ctx.ply.label())));
        }
        Ok(Response::Move(Move::new(set)))
    }

    fn notes(&self) -> Vec<String> {
        self.trace.normalized.iter().map(|p| format!("alpha' witness at ply {} cut to the previous constraint", p)).collect()
    }
}

fn eq_verdict(prop: &str, what: String, e: &Space, lhs: &ExactSet, rhs: &ExactSet, depth: usize) -> Verdict {
    if e.same(lhs, rhs) {
        Verdict::new(prop, what, Outcome::Verified, depth)
    } else {
        Verdict::new(prop, what, Outcome::Refuted, depth).sets([lhs.clone(), rhs.clone()])
    }
}

fn sub_verdict(prop: &str, what: String, e: &Space, lhs: &ExactSet, rhs: &ExactSet, depth: usize) -> Verdict {
    if e.subset(lhs, rhs).unwrap_or(false) {
        Verdict::new(prop, what, Outcome::Verified, depth)
    } else {
        Verdict::new(prop, what, Outcome::Refuted, depth).sets([lhs.clone(), rhs.clone()])
    }
}

/// Chains and α′-identities shared by both rechecks.
fn recheck_chains(e: &Space, play: &Play, tr: &BetaPrimeTrace, w: &ExactSet, out: &mut Vec<Verdict>) -> Result<()> {
    let b = play.moves(Track::Plain, Mover::Beta);
    let a = play.moves(Track::Plain, Mover::Alpha);
    let bp = play.moves(Track::Primed, Mover::Beta);
    let ap = play.moves(Track::Primed, Mover::Alpha);
    out.push(eq_verdict("iii", "V0 = E - cl W".into(), e, &tr.v[0], &e.complement(&e.closure(w)?)?, 0));
    out.push(eq_verdict("iii", "W0 = W".into(), e, &tr.w[0], w, 0));
    for n in 1..tr.v.len() {
        out.push(sub_verdict("iii", format!("V{} in V{}", n, n - 1), e, &tr.v[n], &tr.v[n - 1], n));
        if let (Some(bn), Some(an)) = (b.get(n - 1), a.get(n - 1)) {
            out.push(eq_verdict("i", format!("A{} = B{} & V{}", n, n, n), e, an, &bn.intersect(&tr.v[n])?, n));
        }
    }
    for n in 1..tr.w.len() {
        out.push(sub_verdict("iii", format!("W{} in W{}", n, n - 1), e, &tr.w[n], &tr.w[n - 1], n));
        if let (Some(bn), Some(an)) = (bp.get(n - 1), ap.get(n - 1)) {
            out.push(eq_verdict("ii", format!("A{}' = B{}' & W{}", n, n, n), e, an, &bn.intersect(&tr.w[n])?, n));
        }
    }
    for (k, s) in b.iter().chain(bp.iter()).enumerate() {
        if e.is_empty(s) {
            out.push(Verdict::new("nonempty", format!("beta move {}", k), Outcome::Refuted, k));
        }
    }
    Ok(())
}

/// Recomputes the displayed identities of the separating construction at
/// every ply: `B_n = V_{n−1} ∩ f(int cl f⁻¹(W_{n−1}))`, `A_n = B_n ∩ V_n`,
/// `B′_n = W_{n−1} ∩ f(int cl f⁻¹(V_n))`, `A′_n = B′_n ∩ W_n`, nesting.
pub fn recheck_separating(f: &CMap, w: &ExactSet, play: &Play, tr: &BetaPrimeTrace) -> Result<Vec<Verdict>> {
    let e = &f.codomain;
    let mut out = Vec::new();
    recheck_chains(e, play, tr, w, &mut out)?;
    for (k, bn) in play.moves(Track::Plain, Mover::Beta).iter().enumerate() {
        let n = k + 1;
        if n - 1 < tr.v.len() && n - 1 < tr.w.len() {
            let rhs = tr.v[n - 1].intersect(&f.image(&icl(f, &tr.w[n - 1])?)?)?;
            out.push(eq_verdict("i", format!("B{} = V{} & f(int cl f^-1 W{})", n, n - 1, n - 1), e, bn, &rhs, n));
        }
    }
    for (k, bn) in play.moves(Track::Primed, Mover::Beta).iter().enumerate() {
        let n = k + 1;
        if n < tr.v.len() {
            let rhs = tr.w[n - 1].intersect(&f.image(&icl(f, &tr.v[n])?)?)?;
            out.push(eq_verdict("ii", format!("B{}' = W{} & f(int cl f^-1 V{})", n, n - 1, n), e, bn, &rhs, n));
        }
    }
    Ok(out)
}

/// β′ threading a chain `t₀ <_T t₁ <_T …` of a web on the domain:
/// `B_k = V_{k−1} ∩ f(φ(t_{2k−2}))`, `B′_k = W_{k−1} ∩ f(φ(t_{2k−1}))`.
pub struct BetaPrimeWeb {
    f: CMap,
    web: LabeledTree,
    budget: usize,
    pub trace: BetaPrimeTrace,
}

/// A node strictly below `from` whose label lies inside the open `g`.
fn web_search(web: &LabeledTree, from: &[u64], g: &ExactSet, budget: usize) -> Option<Vec<u64>> {
    let d = &web.space;
    fn go(web: &LabeledTree, d: &Space, path: &[u64], g: &ExactSet, left: usize, top: bool) -> Option<Vec<u64>> {
        let l = web.label(path)?;
        if !top && d.subset(&l, g).ok()? {
            return Some(path.to_vec());
        }
        if left == 0 {
            return None;
        }
        let n = web.child_count(path).unwrap_or(2 * left as u64 + 8);
        for k in 0..n {
            let mut c = path.to_vec();
            c.push(k);
            if web.label(&c).is_some_and(|cl| d.meets(&cl, g).unwrap_or(false)) {
                if let Some(hit) = go(web, d, &c, g, left - 1, false) {
                    return Some(hit);
                }
            }
        }
        None
    }
    go(web, d, from, g, budget, true)
}

pub fn beta_prime_web(
    f: &CMap,
    web: LabeledTree,
    x: &Point,
    o: &ExactSet,
    w: &ExactSet,
    depth: usize,
) -> Result<Launch<BetaPrimeWeb>> {
    if let Some(v) = launch_premise(f, x, o, w, depth)? {
        return Ok(Launch::NotLaunchable(v));
    }
    let e = &f.codomain;
    let v0 = e.complement(&e.closure(w)?)?;
    let g = icl(f, &v0)?.intersect(&icl(f, w)?)?;
    let budget = 4 * depth + 16;
    let Some(t0) = web_search(&web, &[], &g, budget) else {
        return Ok(Launch::NotLaunchable(
            Verdict::new("web_search", format!("{} at {}", f.name, x), Outcome::Unknown, budget).sets([g]).note("no t0 found"),
        ));
    };
    let trace = BetaPrimeTrace { v: vec![v0], w: vec![w.clone()], nodes: vec![t0], normalized: Vec::new() };
    Ok(Launch::Ready(BetaPrimeWeb { f: f.clone(), web, budget, trace }))
}

impl Strategy for BetaPrimeWeb {
    fn name(&self) -> String {
        format!("beta_prime_web({}, {})", self.f.name, self.web.name)
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> Result<Response> {
        let e = self.f.codomain.clone();
        let i = ctx.ply.index;
        let last = self.trace.nodes.last().expect("t0").clone();
        let phi_last = self.web.label(&last).expect("node in web");
        let set = match ctx.ply.track {
            Track::Plain if i == 0 => {
                // t0 was fixed at launch
                self.trace.v[0].intersect(&self.f.image(&phi_last)?)?
            }
            Track::Plain => {
                let prev = self.trace.w.last().expect("W0").clone();
                let wn = alpha_open(&e, ctx.play, i - 1, &prev, &mut self.trace)?;
                let g = phi_last.intersect(&icl(&self.f, &wn)?)?;
                self.trace.w.push(wn);
                let Some(t) = web_search(&self.web, &last, &g, self.budget) else {
                    return Ok(Response::Resign(format!("web search exhausted at depth {}", self.budget)));
                };
                let phi = self.web.label(&t).expect("node in web");
                self.trace.nodes.push(t);
                self.trace.v[self.trace.v.len() - 1].intersect(&self.f.image(&phi)?)?
            }
            Track::Primed => {
                let prev = self.trace.v.last().expect("V0").clone();
                let vn = alpha_open(&e, ctx.play, i - 1, &prev, &mut self.trace)?;
                let g = phi_last.intersect(&icl(&self.f, &vn)?)?;
                self.trace.v.push(vn);
                let Some(t) = web_search(&self.web, &last, &g, self.budget) else {
                    return Ok(Response::Resign(format!("web search exhausted at depth {}", self.budget)));
                };
                let phi = self.web.label(&t).expect("node in web");
                self.trace.nodes.push(t);
                self.trace.w[self.trace.w.len() - 1].intersect(&self.f.image(&phi)?)?
            }
        };
        if e.is_empty(&set) {
            return Ok(Response::Resign(format!("{} would be empty", ctx.ply.label())));
        }
        Ok(Response::Move(Move::new(set)))
    }

    fn notes(&self) -> Vec<String> {
        self.trace.normalized.iter().map(|p| format!("alpha' witness at ply {} cut to the previous constraint", p)).collect()
    }
}

/// Invariants 1–3 of the web construction at every ply, plus the strict
/// growth of the node chain.
pub fn recheck_web(f: &CMap, web: &LabeledTree, w: &ExactSet, play: &Play, tr: &BetaPrimeTrace) -> Result<Vec<Verdict>> {
    let e = &f.codomain;
    let d = &f.domain;
    let mut out = Vec::new();
    recheck_chains(e, play, tr, w, &mut out)?;
    let phi = |k: usize| web.label(&tr.nodes[k]).ok_or_else(|| TopoError::UnknownName(format!("node {:?}", tr.nodes[k])));
    for k in 1..tr.nodes.len() {
        let (a, b) = (&tr.nodes[k - 1], &tr.nodes[k]);
        let ok = b.len() > a.len() && b.starts_with(a);
        let v = Verdict::new("chain", format!("t{} < t{}", k - 1, k), if ok { Outcome::Verified } else { Outcome::Refuted }, k);
        out.push(v);
    }
    for (j, bk) in play.moves(Track::Plain, Mover::Beta).iter().enumerate() {
        let k = j + 1;
        if 2 * k - 2 < tr.nodes.len() {
            let rhs = tr.v[k - 1].intersect(&f.image(&phi(2 * k - 2)?)?)?;
            out.push(eq_verdict("2", format!("B{} = V{} & f(phi(t{}))", k, k - 1, 2 * k - 2), e, bk, &rhs, k));
        }
        if 2 * k < tr.nodes.len() && k < tr.w.len() {
            let rhs = phi(2 * k - 1)?.intersect(&icl(f, &tr.w[k])?)?;
            out.push(sub_verdict("2", format!("phi(t{}) in phi(t{}) & int cl f^-1 W{}", 2 * k, 2 * k - 1, k), d, &phi(2 * k)?, &rhs, k));
        }
    }
    for (j, bk) in play.moves(Track::Primed, Mover::Beta).iter().enumerate() {
        let k = j + 1;
        if 2 * k - 1 < tr.nodes.len() {
            let rhs = tr.w[k - 1].intersect(&f.image(&phi(2 * k - 1)?)?)?;
            out.push(eq_verdict("3", format!("B{}' = W{} & f(phi(t{}))", k, k - 1, 2 * k - 1), e, bk, &rhs, k));
            if k < tr.v.len() {
                let rhs = phi(2 * k - 2)?.intersect(&icl(f, &tr.v[k])?)?;
                out.push(sub_verdict("3", format!("phi(t{}) in phi(t{}) & int cl f^-1 V{}", 2 * k - 1, 2 * k - 2, k), d, &phi(2 * k - 1)?, &rhs, k));
            }
        }
    }
    Ok(out)
}

/// The meander table: ply order and the containments of both tracks.
pub fn check_meander(space: &Space, play: &Play) -> Verdict {
    if !play.schedule.is_tandem() {
        return Verdict::new("meander", &play.beta, Outcome::Unknown, 0).note("not a tandem play");
    }
    let expect = ["B", "A", "B'", "A'"];
    for (i, r) in play.plies.iter().enumerate() {
        let round = i / 4 + 1;
        let (letter, prime) = expect[i % 4].split_at(1);
        if r.label != format!("{}{}{}", letter, round, prime) {
            return Verdict::new("meander", &play.beta, Outcome::Refuted, i).note(format!("ply {} is {}", i, r.label));
        }
        let inside = match i % 4 {
            0 | 2 if i < 4 => None,
            0 | 2 => Some(i - 3),
            _ => Some(i - 1),
        };
        if let Some(j) = inside {
            if !space.subset(&r.set, &play.plies[j].set).unwrap_or(false) {
                return Verdict::new("meander", &play.beta, Outcome::Refuted, i)
                    .sets([r.set.clone(), play.plies[j].set.clone()])
                    .note(format!("{} not inside {}", r.label, play.plies[j].label));
            }
        }
    }
    Verdict::new("meander", &play.beta, Outcome::Verified, play.plies.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Trace;

    fn set(s: &str) -> ExactSet {
        s.parse().unwrap()
    }

    #[test]
    fn tandem_order() {
        let t = GameSchedule::new(ScheduleKind::TandemMichael).table(2);
        let labels: Vec<String> = t.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["B1", "A1", "B1'", "A1'", "B2", "A2", "B2'", "A2'"]);
        assert_eq!(t[2].inside, None);
        assert_eq!(t[4].inside, Some(1));
        assert_eq!(t[6].inside, Some(3));
    }

    #[test]
    fn shrink_to_zero_on_q() {
        let q = Space::rationals();
        let mut a = ShrinkTo::new(Point::int(0));
        let mut b = FollowBasis::new(10);
        let play = playout(ScheduleKind::BanachMazur, &q, &mut a, &mut b, 10).unwrap();
        assert_eq!(play.plies.len(), 20);
        let r = check_win_bounded(&q, &play);
        assert_eq!(r.overall, WinOutcome::AlphaWinCertified { point: Point::int(0) });
    }

    #[test]
    fn michael_isolated_on_m1() {
        let m1 = Space::line(vec![Trace::M1]);
        let mut a = SingletonIsolated::default();
        let mut b = Replay::new("full", [Move::new(m1.full())]);
        let play = playout(ScheduleKind::Michael, &m1, &mut a, &mut b, 1).unwrap();
        assert!(play.plies[1].set.contains(&Point::ratio(3, 2)) || m1.is_open(&play.plies[1].set).unwrap());
    }

    #[test]
    fn illegal_move_is_attributed() {
        let q = Space::rationals();
        let mut a = Replay::new("cheat", [Move::new(set("rational:(5,6)"))]);
        let mut b = Replay::new("beta", [Move::new(set("rational:(0,1)"))]);
        let err = playout(ScheduleKind::BanachMazur, &q, &mut a, &mut b, 1).unwrap_err();
        assert!(matches!(err, TopoError::IllegalMove { ply: 1, ref mover, .. } if mover == "cheat"));
    }

    #[test]
    fn separating_on_xsum() {
        let f = crate::gallery::xsum_identity();
        let o = set("sum(dyadic:(-2,2); empty)");
        let w = set("sum(dyadic:(-1,1); empty)");
        let mut beta = beta_prime_separating(&f, &Point::int(0), &o, &w, 4).unwrap().ready().unwrap();
        let mut alpha = ShrinkTo::first();
        let play = playout(ScheduleKind::TandemMichael, &f.codomain, &mut alpha, &mut beta, 4).unwrap();
        assert_eq!(play.plies.len(), 16, "{:?}", play.resignation);
        assert!(check_meander(&f.codomain, &play).is(Outcome::Verified));
        let checks = recheck_separating(&f, &w, &play, &beta.trace).unwrap();
        assert!(checks.iter().all(|v| v.is(Outcome::Verified)), "{:?}", checks.iter().find(|v| !v.is(Outcome::Verified)));
    }

    #[test]
    fn continuous_map_not_launchable() {
        let q = Space::rationals();
        let f = CMap::identity("id", q.clone(), q);
        let o = set("rational:(-2,2)");
        let w = set("rational:(-1,1)");
        assert!(beta_prime_separating(&f, &Point::int(0), &o, &w, 4).unwrap().ready().is_none());
    }
}
