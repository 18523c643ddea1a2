//! Acceptance run: one PASS/FAIL line per criterion, then a single assert.
//!
//! Everything runs inside one test so the timing budgets are not shared
//! with other tests of this binary.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command as Proc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use topolab::cylinder::SeqSet;
use topolab::field::Rat;
use topolab::gallery::{self, BetaPrimeRun, Report, INSTANCES};
use topolab::games::{
    check_meander, check_play, check_win_bounded, lift_playout, playout, RandomBeta, RandomStarBeta, ScheduleKind, ShrinkTo, Strategy,
    Track, WinOutcome,
};
use topolab::maps::{CMap, Outcome, Verdict};
use topolab::sieves::{
    ball, branch_distance, canonical_closed_graph, canonical_continuity, canonical_near_continuity, check_surjection_chain, find_mu_refutation,
    sieve_from_surjection, sigma_space, LabeledTree,
};
use topolab::space::Space;
use topolab::{ExactSet, Point, SeqPoint};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_are(vs: &[Verdict], o: Outcome, what: &str) -> Result<(), String> {
    match vs.iter().find(|v| !v.is(o)) {
        None => Ok(()),
        Some(v) => Err(format!("{}: {} on {} is {:?} ({})", what, v.property, v.subject, v.outcome, v.note)),
    }
}

fn row<'a>(r: &'a Report, property: &str) -> Result<&'a gallery::CheckRow, String> {
    r.checks.iter().find(|c| c.property == property).ok_or_else(|| format!("{} has no {} row", r.instance, property))
}

fn within(t: Instant, budget: Duration, what: &str) -> Result<Duration, String> {
    let d = t.elapsed();
    ensure(d < budget, || format!("{} took {:?}, budget {:?}", what, d, budget))?;
    Ok(d)
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let mut separated = 0;
    for (id, s) in common::exact_spaces() {
        separated += common::run_laws(&s, 1000, 1).map_err(|m| format!("{}: {}", id, m))?;
    }
    let d = within(t, Duration::from_secs(10), "laws")?;
    Ok(format!("13 spaces x 1000 forms, 200 probe samples each, {} separations, {:.1?}", separated, d))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let dir = gallery::golden_dir();
    let reports = gallery::run_many(&INSTANCES, 8, 0);
    for (name, r) in INSTANCES.iter().zip(&reports) {
        let r = r.as_ref().map_err(|e| format!("{}: {}", name, e))?;
        ensure(r.matches, || format!("{} misses its stated outcomes: {:?}", name, r.mismatches().map(|c| &c.property).collect::<Vec<_>>()))?;
        let st = gallery::compare_golden(&dir, r).map_err(|e| e.to_string())?;
        ensure(st.is_match(), || st.to_string())?;
    }
    let d = within(t, Duration::from_secs(60), "gallery")?;
    let x = reports[INSTANCES.iter().position(|n| *n == "xsum_identity").unwrap()].as_ref().unwrap();
    let counted = |p: &str, o: Outcome, n: usize| -> Result<(), String> {
        let r = row(x, p)?;
        ensure(r.verdict == o, || format!("xsum {} is {:?}", p, r.verdict))?;
        let k = r.certificate.iter().filter(|v| v.is(o)).count();
        ensure(k >= n, || format!("xsum {}: {} certificates, want {}", p, k, n))
    };
    counted("near_continuity", Outcome::Verified, 1)?;
    counted("closed_graph", Outcome::Verified, 100)?;
    counted("separating", Outcome::Verified, 100)?;
    let cont = row(x, "continuity")?;
    ensure(cont.verdict == Outcome::Refuted, || format!("xsum continuity is {:?}", cont.verdict))?;
    ensure(cont.certificate.len() == 50, || format!("continuity sampled at {} points", cont.certificate.len()))?;
    Ok(format!("13 goldens match at depth 8 seed 0, xsum 100/100/50, {:.1?}", d))
}

fn criterion_3() -> Check {
    let w = gallery::w_intersection_identity(500, 8, 3).map_err(|e| e.to_string())?;
    ensure(w.len() == 500, || format!("{} pairs", w.len()))?;
    all_are(&w, Outcome::Verified, "w_intersection")?;
    let r = gallery::run_instance("duplicate_q", 8, 0).map_err(|e| e.to_string())?;
    let props = [
        "dense_level1",
        "closed_level2",
        "hausdorff_level1_level1",
        "hausdorff_level1_level2",
        "hausdorff_level2_level2",
        "hausdorff_same_base",
        "semi_regular",
    ];
    for p in props {
        let c = row(&r, p)?;
        ensure(c.verdict == Outcome::Verified, || format!("{} is {:?}", p, c.verdict))?;
        all_are(&c.certificate, Outcome::Verified, p)?;
    }
    Ok(format!("500 W-identities exact, {} proof-step checks Verified", props.len()))
}

fn criterion_4() -> Check {
    let mut certified = 0;
    let mut runs = 0;
    for (sid, star) in [("star_q", gallery::star_space_q()), ("star_k", gallery::star_space_k())] {
        let star = star.map_err(|e| e.to_string())?;
        let Space::Refined(base, _) = &star else { return Err(format!("{} is not a refinement", sid)) };
        for seed in 0..50u64 {
            let mut alpha = if seed % 2 == 0 { ShrinkTo::first() } else { ShrinkTo::new(Point::ratio(1, 3 + seed as i64)) };
            let make = move || Box::new(RandomStarBeta::new(seed)) as Box<dyn Strategy>;
            let jp = lift_playout(&star, &make, &mut alpha, 10).map_err(|e| format!("{} seed {}: {}", sid, seed, e))?;
            ensure(jp.interleaving.is(Outcome::Verified), || format!("{} seed {}: {}", sid, seed, jp.interleaving.note))?;
            if let WinOutcome::AlphaWinCertified { point } = check_win_bounded(base, &jp.base).overall {
                match check_win_bounded(&star, &jp.star).overall {
                    WinOutcome::AlphaWinCertified { point: q } if q == point => certified += 1,
                    other => return Err(format!("{} seed {}: base certified at {}, lifted {:?}", sid, seed, point, other)),
                }
            }
            runs += 1;
        }
    }
    Ok(format!("{} joint plays interleave, {} certified wins carried over", runs, certified))
}

fn criterion_5() -> Check {
    let ids = ["q", "m1", "xsum", "q2", "qk"];
    for i in 0..100u64 {
        let id = ids[i as usize % ids.len()];
        let space = Space::from_id(id).map_err(|e| e.to_string())?;
        let mut alpha: Box<dyn Strategy> = if i % 2 == 0 { Box::new(ShrinkTo::first()) } else { Box::new(RandomBeta::new(1000 + i)) };
        let mut beta = RandomBeta::new(i);
        let play = playout(ScheduleKind::TandemMichael, &space, alpha.as_mut(), &mut beta, 16).map_err(|e| format!("{} #{}: {}", id, i, e))?;
        let m = check_meander(&space, &play);
        ensure(m.is(Outcome::Verified), || format!("{} #{}: meander {:?} {}", id, i, m.outcome, m.note))?;
        for track in [Track::Plain, Track::Primed] {
            let r = play.restrict(track);
            ensure(r.schedule == ScheduleKind::Michael, || format!("restriction is {:?}", r.schedule))?;
            let v = check_play(&space, &r);
            ensure(v.is(Outcome::Verified), || format!("{} #{} {:?} track: {}", id, i, track, v.note))?;
        }
    }
    Ok("100 tandem playouts at depth 16, meander exact, both tracks legal Michael plays".into())
}

fn beta_prime_ok(run: &BetaPrimeRun, what: &str) -> Result<usize, String> {
    ensure(run.play.resignation.is_none(), || format!("{}: {:?}", what, run.play.resignation))?;
    ensure(run.play.rounds() == 10, || format!("{}: {} rounds", what, run.play.rounds()))?;
    let legal = check_play(&run.space, &run.play);
    ensure(legal.is(Outcome::Verified), || format!("{}: {}", what, legal.note))?;
    ensure(!run.rechecks.is_empty(), || format!("{}: no rechecks", what))?;
    all_are(&run.rechecks, Outcome::Verified, what)?;
    Ok(run.rechecks.len())
}

fn criterion_6() -> Check {
    let mut rechecks = 0;
    for (web, what) in [(false, "separating"), (true, "web")] {
        let refusals = gallery::not_launchable_verdicts(web, 10).map_err(|e| e.to_string())?;
        ensure(refusals.len() == 5, || format!("{}: {} continuous maps", what, refusals.len()))?;
        all_are(&refusals, Outcome::Verified, what)?;
        let run = gallery::beta_prime_run(web, 10).map_err(|e| e.to_string())?.ok_or_else(|| format!("{} refused xsum", what))?;
        rechecks += beta_prime_ok(&run, what)?;
    }
    Ok(format!("10 refusals, 2 legal depth-10 plays, {} rechecks exact", rechecks))
}

fn criterion_7() -> Check {
    let cyl = gallery::run_instance("cylinder_identity_sieve", 8, 0).map_err(|e| e.to_string())?;
    for p in ["sieve", "p_complete", "delta", "mu"] {
        let c = row(&cyl, p)?;
        ensure(c.verdict == Outcome::Verified, || format!("cylinder {} is {:?}", p, c.verdict))?;
    }
    ensure(row(&cyl, "delta")?.certificate.len() == 20, || "cylinder checked on fewer than 20 branches".into())?;
    let nm = gallery::run_instance("non_mu_sieve_on_Q", 8, 0).map_err(|e| e.to_string())?;
    for p in ["sieve", "p_complete", "delta", "quasi_mu"] {
        let c = row(&nm, p)?;
        ensure(c.verdict == Outcome::Verified, || {
            let why = c.certificate.iter().find(|v| !v.is(Outcome::Verified)).map(|v| v.note.clone()).unwrap_or_default();
            format!("non_mu {} is {:?}: {}", p, c.verdict, why)
        })?;
    }
    let found = find_mu_refutation(&LabeledTree::non_mu(), 3).ok_or("no mu refutation by depth 3")?;
    ensure(found.is(Outcome::Refuted), || format!("mu search gave {:?}", found.outcome))?;
    Ok("cylinder and non_mu sieves pass".into())
}

/// Reference distance: first disagreement by a plain scan.
fn oracle_distance(b: &SeqPoint, c: &SeqPoint) -> Rat {
    let n = b.prefix().len().max(c.prefix().len()) + 1;
    match (0..n).find(|&i| b.at(i) != c.at(i)) {
        Some(i) => Rat::new(1.into(), (i as i64 + 1).into()),
        None => Rat::zero(),
    }
}

fn random_branch(r: &mut impl Rng) -> SeqPoint {
    let len = r.gen_range(0..=8);
    SeqPoint::new((0..len).map(|_| r.gen_range(0..3)).collect(), r.gen_range(0..3))
}

fn criterion_8() -> Check {
    let mut r = common::rng(8);
    for i in 0..1000 {
        let (a, b, c) = (random_branch(&mut r), random_branch(&mut r), random_branch(&mut r));
        let (ab, bc, ac) = (branch_distance(&a, &b), branch_distance(&b, &c), branch_distance(&a, &c));
        ensure(ab == oracle_distance(&a, &b), || format!("triple {}: d({}, {}) = {}", i, a, b, ab))?;
        ensure(branch_distance(&a, &a).is_zero() && ab == branch_distance(&b, &a), || format!("triple {}: identity or symmetry", i))?;
        ensure(ab.is_zero() == (a == b), || format!("triple {}: zero distance between distinct branches", i))?;
        ensure(ac <= ab.clone().max(bc.clone()), || format!("triple {}: ultrametric fails", i))?;
        ensure(ac <= &ab + &bc, || format!("triple {}: triangle fails", i))?;
    }
    let sigma = sigma_space(Arc::new(LabeledTree::cylinder()));
    for i in 0..200 {
        let b = random_branch(&mut r);
        let n = r.gen_range(0..8);
        let prefix: Vec<u64> = (0..=n).map(|k| b.at(k)).collect();
        let cyl = ExactSet::Seq(SeqSet::cylinder(&prefix));
        let bl = ball(&b, n);
        ensure(sigma.same(&bl, &cyl), || format!("ball {} vs {}", bl, cyl))?;
        let radius = Rat::new(One::one(), (n as i64 + 1).into());
        for _ in 0..10 {
            let c = random_branch(&mut r);
            let inside = oracle_distance(&b, &c) < radius;
            ensure(bl.contains(&Point::Seq(c.clone())) == inside, || format!("ball {} sample {}: {} misplaced", i, bl, c))?;
        }
    }
    let tree = LabeledTree::non_mu();
    let main = SeqPoint::constant(0);
    let q = Space::rationals();
    let ys: Vec<Point> = q.sample_points(&q.full(), 51, 0).map_err(|e| e.to_string())?.into_iter().filter(|y| y != &Point::int(0)).take(50).collect();
    let pairs: Vec<_> = ys.into_iter().map(|y| (main.clone(), y)).collect();
    ensure(pairs.len() == 50, || format!("{} off-graph pairs", pairs.len()))?;
    let cg = canonical_closed_graph(&tree, &pairs, 8).map_err(|e| e.to_string())?;
    all_are(&cg, Outcome::Verified, "closed_graph")?;
    let cont = canonical_continuity(&tree, &main, 8).map_err(|e| e.to_string())?;
    ensure(cont.is(Outcome::Refuted), || format!("continuity is {:?}", cont.outcome))?;
    let nc = canonical_near_continuity(&tree, &main, 8).map_err(|e| e.to_string())?;
    all_are(&nc, Outcome::Verified, "near-continuity inclusion")?;
    Ok("metric, balls, closed graph, continuity and near-continuity as stated".into())
}

fn criterion_9() -> Check {
    let mut nodes = Vec::new();
    for f in [CMap::identity("id_seq", Space::Seq, Space::Seq), gallery::seq_projection()] {
        let name = f.name.clone();
        let tree = sieve_from_surjection(f).map_err(|e| e.to_string())?;
        let v = check_surjection_chain(&tree, 8);
        ensure(v.is(Outcome::Verified), || format!("{}: {:?} {}", name, v.outcome, v.note))?;
        nodes.push(format!("{} ({})", name, v.note));
    }
    Ok(format!("nesting and diameters exact to depth 8 on {}", nodes.join(", ")))
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn criterion_10() -> Check {
    let t = Instant::now();
    let out = Proc::new(env!("CARGO_BIN_EXE_topolab")).args(["gallery", "run-all"]).current_dir(repo()).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("run-all exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    let d = within(t, Duration::from_secs(120), "run-all")?;

    let dir = std::env::temp_dir().join(format!("topolab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for n in INSTANCES {
        let name = format!("{}.d8.s0.json", n);
        std::fs::copy(gallery::golden_dir().join(&name), dir.join(&name)).map_err(|e| e.to_string())?;
    }
    let victim = dir.join("xsum_identity.d8.s0.json");
    let text = std::fs::read_to_string(&victim).map_err(|e| e.to_string())?;
    // flip the first certificate verdict, not a row summary
    let at = text.find("\"certificate\"").ok_or("golden without certificates")?;
    let (head, tail) = text.split_at(at);
    let corrupted = format!("{}{}", head, tail.replacen("\"verdict\": \"Verified\"", "\"verdict\": \"Refuted\"", 1));
    ensure(corrupted != text, || "nothing to corrupt".into())?;
    std::fs::write(&victim, corrupted).map_err(|e| e.to_string())?;
    let out = Proc::new(env!("CARGO_BIN_EXE_topolab"))
        .args(["gallery", "run-all"])
        .env(gallery::GOLDEN_DIR_ENV, &dir)
        .output()
        .map_err(|e| e.to_string())?;
    std::fs::remove_dir_all(&dir).ok();
    let err = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(3), || format!("corrupted golden gave exit {:?}", out.status.code()))?;
    ensure(err.contains("xsum_identity.d8.s0.json") && err.contains("certificate"), || format!("diff not named: {}", err))?;
    let named = err.lines().find(|l| l.contains("certificate")).unwrap_or_default().trim().to_string();
    Ok(format!("run-all ok in {:.1?}; corruption gives exit 3 ({})", d, named))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match res {
            Ok(msg) => println!("criterion {}: PASS ({:.1?}) {}", n, t.elapsed(), msg),
            Err(msg) => {
                println!("criterion {}: FAIL ({:.1?}) {}", n, t.elapsed(), msg);
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {:?}", failed);
}
