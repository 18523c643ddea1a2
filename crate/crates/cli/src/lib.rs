//! Argument parsing and command execution for the `topolab` binary.
//!
//! Exit codes: 0 when every stated expectation matches (or none was
//! stated), 2 on input errors, 3 on an expectation or golden mismatch.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use topolab::error::TopoError;
use topolab::gallery::{self, BetaPrimeOutcome, GoldenStatus, Report, INSTANCES};
use topolab::games::{
    builtin_strategy, check_meander, check_move, check_play, check_win_bounded, playout, Ctx, Move, Play, Response,
    ScheduleKind, Strategy, WinReport,
};
use topolab::maps::Verdict;
use topolab::set::ExactSet;
use topolab::sieves::{parse_tree_spec, TREE_CHECKS};
use topolab::space::Space;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "topolab", version, about = "Exact set algebra, map checkers, games and sieves on countable spaces")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alpha,
    Beta,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Run one gallery instance and compare it with its golden report.
    Check {
        instance: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Store the computed report as the golden file.
        #[arg(long)]
        bless: bool,
    },
    /// Play a game: bm, michael, tandem-bm or tandem-michael.
    Play {
        schedule: String,
        /// Space identifier; β′ strategies play on their map's codomain.
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value = "shrink_to:first")]
        alpha: String,
        /// A built-in strategy, or β′ for a map: `separating:<map>` (alias
        /// `thm81:`) or `web:<map>` (alias `thm91:`).
        #[arg(long, default_value = "random_beta:0")]
        beta: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Read this side's moves from stdin, one set per line.
        #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "alpha")]
        manual: Option<Side>,
    },
    /// Tree files.
    Sieve {
        #[command(subcommand)]
        action: SieveAction,
    },
    /// The shipped instances.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum SieveAction {
    /// Check a tree file.
    Verify {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "s,p,delta,mu")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum GalleryAction {
    List,
    /// Run every instance, in parallel, and compare with the goldens.
    RunAll {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bless: bool,
    },
}

impl Cli {
    /// The canonical argument list; parsing it gives back `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["topolab".to_string()];
        let mut push = |xs: &[&str]| a.extend(xs.iter().map(|s| s.to_string()));
        match &self.command {
            Command::Check { instance, depth, seed, bless } => {
                push(&["check", instance, "--depth", &depth.to_string(), "--seed", &seed.to_string()]);
                if *bless {
                    push(&["--bless"]);
                }
            }
            Command::Play { schedule, space, alpha, beta, depth, manual } => {
                push(&["play", schedule]);
                if let Some(s) = space {
                    push(&["--space", s]);
                }
                push(&["--alpha", alpha, "--beta", beta, "--depth", &depth.to_string()]);
                match manual {
                    Some(Side::Alpha) => push(&["--manual", "alpha"]),
                    Some(Side::Beta) => push(&["--manual", "beta"]),
                    None => {}
                }
            }
            Command::Sieve { action: SieveAction::Verify { file, checks, depth } } => {
                push(&["sieve", "verify", &file.display().to_string(), "--checks", &checks.join(","), "--depth", &depth.to_string()]);
            }
            Command::Gallery { action: GalleryAction::List } => push(&["gallery", "list"]),
            Command::Gallery { action: GalleryAction::RunAll { depth, seed, bless } } => {
                push(&["gallery", "run-all", "--depth", &depth.to_string(), "--seed", &seed.to_string()]);
                if *bless {
                    push(&["--bless"]);
                }
            }
        }
        if let Some(o) = &self.output {
            a.extend(["--output".to_string(), o.display().to_string()]);
        }
        a.extend(["--format".to_string(), match self.format {
            Format::Json => "json".into(),
            Format::Text => "text".into(),
        }]);
        a
    }
}

/// Exit code plus the rendered report.
pub struct Outcome {
    pub code: i32,
    pub body: String,
    /// Diagnostics for stderr.
    pub messages: Vec<String>,
}

impl Outcome {
    fn input_error(msg: impl Into<String>) -> Self {
        Outcome { code: EXIT_INPUT, body: String::new(), messages: vec![msg.into()] }
    }
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => text(),
    }
}

/// Runs a command with `input` as the manual-move source.
pub fn execute(cli: &Cli, input: &mut dyn BufRead) -> Outcome {
    let res = match &cli.command {
        Command::Check { instance, depth, seed, bless } => check(cli.format, instance, *depth, *seed, *bless),
        Command::Play { schedule, space, alpha, beta, depth, manual } => {
            play(cli.format, schedule, space.as_deref(), alpha, beta, *depth, *manual, input)
        }
        Command::Sieve { action: SieveAction::Verify { file, checks, depth } } => sieve(cli.format, file, checks, *depth),
        Command::Gallery { action: GalleryAction::List } => Ok(list(cli.format)),
        Command::Gallery { action: GalleryAction::RunAll { depth, seed, bless } } => run_all(cli.format, *depth, *seed, *bless),
    };
    res.unwrap_or_else(|e| Outcome::input_error(e.to_string()))
}

fn golden_outcome(report: &Report, bless: bool) -> Result<GoldenStatus, TopoError> {
    let dir = gallery::golden_dir();
    let io = |e: std::io::Error| TopoError::Unsupported(format!("golden directory {}: {}", dir.display(), e));
    if bless {
        gallery::bless(&dir, report).map_err(io)?;
        return Ok(GoldenStatus::Match);
    }
    gallery::compare_golden(&dir, report).map_err(io)
}

fn check(format: Format, name: &str, depth: usize, seed: u64, bless: bool) -> Result<Outcome, TopoError> {
    let report = gallery::run_instance(name, depth, seed)?;
    let golden = golden_outcome(&report, bless)?;
    let code = if report.matches && !matches!(golden, GoldenStatus::Differs { .. }) { EXIT_OK } else { EXIT_MISMATCH };
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => format!("{}{}\n", report, golden),
    };
    let messages = if golden.is_match() { Vec::new() } else { vec![golden.to_string()] };
    Ok(Outcome { code, body, messages })
}

#[derive(Serialize)]
struct RunAllRow<'a> {
    instance: &'a str,
    matches: bool,
    golden: GoldenStatus,
    report: &'a Report,
}

#[derive(Serialize)]
struct RunAllReport<'a> {
    depth: usize,
    seed: u64,
    matches: bool,
    instances: Vec<RunAllRow<'a>>,
}

fn run_all(format: Format, depth: usize, seed: u64, bless: bool) -> Result<Outcome, TopoError> {
    let reports = gallery::run_many(&INSTANCES, depth, seed).into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut messages = Vec::new();
    for r in &reports {
        let golden = golden_outcome(r, bless)?;
        if let GoldenStatus::Differs { .. } = golden {
            messages.push(format!("{}: {}", r.instance, golden));
        }
        if !r.matches {
            for c in r.mismatches() {
                let cert = gallery::offending(c).map(|v| v.subject.clone()).unwrap_or_default();
                messages.push(format!("{}: {} got {} ({})", r.instance, c.property, c.verdict, cert));
            }
        }
        rows.push(RunAllRow { instance: &r.instance, matches: r.matches, golden, report: r });
    }
    let ok = rows.iter().all(|r| r.matches && !matches!(r.golden, GoldenStatus::Differs { .. }));
    let summary = RunAllReport { depth, seed, matches: ok, instances: rows };
    let body = render(format, &summary, || {
        let mut s = String::new();
        for r in &summary.instances {
            let g = match &r.golden {
                GoldenStatus::Match => "golden ok".to_string(),
                GoldenStatus::Missing { .. } => "no golden".to_string(),
                GoldenStatus::Differs { line, certificate, .. } => format!("golden differs at line {} in {}", line, certificate),
            };
            s.push_str(&format!("{:<26} {:<9} {}\n", r.instance, if r.matches { "ok" } else { "MISMATCH" }, g));
        }
        s.push_str(&format!("{} instances, depth {}, seed {}: {}\n", summary.instances.len(), depth, seed, if ok { "all match" } else { "FAILED" }));
        s
    });
    Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_MISMATCH }, body, messages })
}

#[derive(Serialize)]
struct ListRow {
    name: &'static str,
    recipe: &'static str,
    provenance: &'static str,
    expected: Vec<gallery::Expectation>,
}

fn list(format: Format) -> Outcome {
    let rows: Vec<ListRow> = INSTANCES
        .iter()
        .map(|n| {
            let i = gallery::load_instance(n).expect("registered");
            ListRow { name: i.name, recipe: i.recipe, provenance: i.provenance, expected: i.expected }
        })
        .collect();
    let body = render(format, &rows, || rows.iter().map(|r| format!("{:<26} {}\n", r.name, r.recipe)).collect());
    Outcome { code: EXIT_OK, body, messages: Vec::new() }
}

fn sieve(format: Format, file: &PathBuf, checks: &[String], depth: usize) -> Result<Outcome, TopoError> {
    for c in checks {
        if !TREE_CHECKS.contains(&c.as_str()) {
            return Err(TopoError::UnknownName(format!("check {} (expected one of {})", c, TREE_CHECKS.join(","))));
        }
    }
    let text = std::fs::read_to_string(file).map_err(|e| TopoError::Unsupported(format!("{}: {}", file.display(), e)))?;
    let spec = parse_tree_spec(&text)?;
    let names: Vec<&str> = checks.iter().map(String::as_str).collect();
    let report = gallery::sieve_report(&spec.tree, &names, &spec.expect, depth)?;
    let code = if report.matches { EXIT_OK } else { EXIT_MISMATCH };
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_string(),
    };
    Ok(Outcome { code, body, messages: Vec::new() })
}

/// Moves read from a line source: `<set>` or `<set> with <open witness>`.
/// Illegal or unparsable lines are rejected with the engine's diagnostics
/// and the next line is read.
pub struct Manual<'a> {
    input: &'a mut dyn BufRead,
    pub rejected: Vec<String>,
}

impl<'a> Manual<'a> {
    pub fn new(input: &'a mut dyn BufRead) -> Self {
        Manual { input, rejected: Vec::new() }
    }

    fn parse(line: &str) -> Result<Move, TopoError> {
        Ok(match line.split_once(" with ") {
            Some((s, w)) => Move::with_witness(s.trim().parse::<ExactSet>()?, w.trim().parse::<ExactSet>()?),
            None => Move::new(line.parse::<ExactSet>()?),
        })
    }
}

impl Strategy for Manual<'_> {
    fn name(&self) -> String {
        "manual".into()
    }

    fn respond(&mut self, ctx: &Ctx<'_>) -> topolab::error::Result<Response> {
        loop {
            eprint!("{}> ", ctx.ply.label());
            let mut line = String::new();
            if self.input.read_line(&mut line).unwrap_or(0) == 0 {
                return Ok(Response::Resign("input closed".into()));
            }
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let reason = match Manual::parse(line) {
                Ok(mv) => match check_move(ctx.space, &ctx.ply, ctx.prior, &mv) {
                    Ok(()) => return Ok(Response::Move(mv)),
                    Err(r) => r,
                },
                Err(e) => e.to_string(),
            };
            eprintln!("rejected: {}", reason);
            self.rejected.push(format!("{}: {}: {}", ctx.ply.label(), line, reason));
        }
    }
}

#[derive(Serialize)]
struct PlayReport {
    play: Play,
    legality: Verdict,
    win: WinReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    meander: Option<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rechecks: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rejected: Vec<String>,
}

fn play_text(r: &PlayReport) -> String {
    let mut s = format!("{} on {}: {} vs {}\n", r.play.schedule, r.play.space, r.play.alpha, r.play.beta);
    for p in &r.play.plies {
        s.push_str(&format!("  {:<5} {}{}\n", p.label, p.set, p.note.as_ref().map(|n| format!("  [{}]", n)).unwrap_or_default()));
    }
    if let Some(res) = &r.play.resignation {
        s.push_str(&format!("  resigned at ply {}: {}\n", res.ply, res.reason));
    }
    s.push_str(&format!("legality: {}\n", r.legality.outcome));
    if let Some(m) = &r.meander {
        s.push_str(&format!("meander: {}\n", m.outcome));
    }
    let bad = r.rechecks.iter().filter(|v| !v.is(topolab::maps::Outcome::Verified)).count();
    if !r.rechecks.is_empty() {
        s.push_str(&format!("invariant rechecks: {} passed, {} failed\n", r.rechecks.len() - bad, bad));
    }
    s.push_str(&format!("win: {:?}\n", r.win.overall));
    for x in &r.rejected {
        s.push_str(&format!("rejected {}\n", x));
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn play(
    format: Format,
    schedule: &str,
    space: Option<&str>,
    alpha: &str,
    beta: &str,
    depth: usize,
    manual: Option<Side>,
    input: &mut dyn BufRead,
) -> Result<Outcome, TopoError> {
    let kind: ScheduleKind = schedule.parse()?;
    let mut messages = Vec::new();
    let mut manual_player = Manual::new(input);
    let prime = beta.split_once(':').filter(|(k, _)| matches!(*k, "separating" | "thm81" | "web" | "thm91"));
    let (space, play, rechecks) = if let Some((k, map)) = prime {
        if kind != ScheduleKind::TandemMichael {
            return Err(TopoError::Unsupported(format!("{} plays the tandem-michael schedule", beta)));
        }
        if manual == Some(Side::Beta) {
            return Err(TopoError::Unsupported("β′ cannot be manual".into()));
        }
        let mut programmed;
        let a: &mut dyn Strategy = if manual.is_some() {
            &mut manual_player
        } else {
            programmed = builtin_strategy(alpha)?;
            programmed.as_mut()
        };
        match gallery::beta_prime_play(matches!(k, "web" | "thm91"), map, a, depth)? {
            BetaPrimeOutcome::Played(run) => {
                if let Some(s) = space {
                    messages.push(format!("--space {} ignored: β′ plays on {}", s, run.space.name()));
                }
                (run.space, run.play, run.rechecks)
            }
            BetaPrimeOutcome::Refused(v) => {
                let body = render(format, &v, || format!("not launchable: {} ({})\n", v.subject, v.note));
                return Ok(Outcome { code: EXIT_INPUT, body, messages: vec![format!("not launchable: {}", v.note)] });
            }
        }
    } else {
        let id = space.ok_or_else(|| TopoError::Unsupported("--space is required".into()))?;
        let sp = Space::from_id(id)?;
        let mut a_prog;
        let mut b_prog;
        let (a, b): (&mut dyn Strategy, &mut dyn Strategy) = match manual {
            Some(Side::Alpha) => {
                b_prog = builtin_strategy(beta)?;
                (&mut manual_player, b_prog.as_mut())
            }
            Some(Side::Beta) => {
                a_prog = builtin_strategy(alpha)?;
                (a_prog.as_mut(), &mut manual_player)
            }
            None => {
                a_prog = builtin_strategy(alpha)?;
                b_prog = builtin_strategy(beta)?;
                (a_prog.as_mut(), b_prog.as_mut())
            }
        };
        let p = playout(kind, &sp, a, b, depth)?;
        (sp, p, Vec::new())
    };
    let rejected = std::mem::take(&mut manual_player.rejected);
    let legality = check_play(&space, &play);
    let meander = kind.is_tandem().then(|| check_meander(&space, &play));
    let win = check_win_bounded(&space, &play);
    let report = PlayReport { play, legality, win, meander, rechecks, rejected };
    let failed = !report.legality.is(topolab::maps::Outcome::Verified)
        || report.meander.as_ref().is_some_and(|m| !m.is(topolab::maps::Outcome::Verified))
        || report.rechecks.iter().any(|v| !v.is(topolab::maps::Outcome::Verified));
    let code = if !report.rejected.is_empty() {
        EXIT_INPUT
    } else if failed {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    let body = render(format, &report, || play_text(&report));
    Ok(Outcome { code, body, messages })
}

/// Parses `argv`, executes, writes the report and returns the exit code.
pub fn main_with(argv: Vec<String>, input: &mut dyn BufRead) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let out = execute(&cli, input);
    for m in &out.messages {
        eprintln!("{}", m);
    }
    let written = match &cli.output {
        Some(p) => std::fs::write(p, &out.body),
        None => std::io::stdout().write_all(out.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {}", e);
        return EXIT_INPUT;
    }
    out.code
}
