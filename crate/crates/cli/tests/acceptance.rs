//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mcg_core::braid::{
    apply_half_twist, artin_relators, half_twist_track, reference_tracks_sphere, solve_braid, ArtinGenerator,
    BraidWord, SphereState,
};
use mcg_core::closed::{
    equal_closed, is_reduced, outer_paths, pull_across_puncture, reduce_length, solve_closed,
};
use mcg_core::curves::{multicurve_from_track, track_from_multicurve, MultiCurve};
use mcg_core::mcg_punctured::{apply_generator, reference_tracks_on, relators, solve, GeneratorWord, Verdict};
use mcg_core::oracle::{artin_identity_check, closed_curve_classes, closed_identity_check, punctured_identity_check};
use mcg_core::polygon::{PolygonDomain, SurfaceKind};
use mcg_core::tracks::MeasuredTrainTrack;
use mcgwp::bench::{self, BenchSpec};
use mcgwp::{gen, Group};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

/// Bits allowed above 2 per generator.
const BIT_SLACK: u64 = 64;

#[derive(Default)]
struct Tally {
    runs: usize,
    disagreements: Vec<String>,
    errors: Vec<String>,
    growth_violations: usize,
    bit_excess: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.runs += o.runs;
        self.disagreements.extend(o.disagreements);
        self.errors.extend(o.errors);
        self.growth_violations += o.growth_violations;
        self.bit_excess = self.bit_excess.max(o.bit_excess);
        self
    }

    fn record(&mut self, label: String, len: usize, solved: mcg_core::Result<mcg_core::mcg_punctured::SolveReport>, oracle: mcg_core::Result<bool>) {
        self.runs += 1;
        match (solved, oracle) {
            (Ok(rep), Ok(o)) => {
                if (rep.verdict == Verdict::Identity) != o {
                    self.disagreements.push(label);
                }
                self.growth_violations += rep.growth_violations;
                self.bit_excess = self.bit_excess.max(rep.peak_bits.saturating_sub(2 * len as u64 + BIT_SLACK));
            }
            (Err(e), _) | (_, Err(e)) => self.errors.push(format!("{label}: {e}")),
        }
    }

    fn clean(&self) -> bool {
        self.disagreements.is_empty() && self.errors.is_empty()
    }

    fn first_problem(&self) -> String {
        self.disagreements.first().or(self.errors.first()).cloned().unwrap_or_default()
    }
}

struct Lines {
    failed: usize,
}

impl Lines {
    fn report(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn criterion_braid() -> (Tally, Duration) {
    let t = Instant::now();
    let tally = (3..=8usize)
        .into_par_iter()
        .flat_map(|n| (0..500u64).into_par_iter().map(move |i| (n, i)))
        .map(|(n, i)| {
            let mut rng = gen::rng(0xB0 ^ (n as u64) << 32 ^ i);
            let w = BraidWord::new(n, gen::mixed_braid(&mut rng, n, 64)).unwrap();
            let mut tally = Tally::default();
            tally.record(format!("n={n} {w}"), w.len(), solve_braid(&w, false), Ok(artin_identity_check(n, &w.gens)));
            tally
        })
        .reduce(Tally::default, Tally::merge);
    (tally, t.elapsed())
}

fn criterion_mcg(closed: bool, gs: &[usize], count: u64, max: usize) -> Tally {
    gs.par_iter()
        .flat_map(|&g| (0..count).into_par_iter().map(move |i| (g, i)))
        .map(|(g, i)| {
            let mut rng = gen::rng(if closed { 0xC1 } else { 0xA1 } ^ (g as u64) << 32 ^ i);
            let w = GeneratorWord::new(g, gen::mixed_mcg(&mut rng, g, max)).unwrap();
            let mut tally = Tally::default();
            let label = format!("g={g} {w}");
            if closed {
                tally.record(label, w.len(), solve_closed(&w, false), closed_identity_check(g, &w.gens));
            } else {
                tally.record(label, w.len(), solve(&w, false), Ok(punctured_identity_check(g, &w.gens)));
            }
            tally
        })
        .reduce(Tally::default, Tally::merge)
}

/// A random multicurve: some components of a reference system with random
/// multiplicities, moved by a random word.
fn random_track<R: Rng>(rng: &mut R, kind: SurfaceKind) -> MeasuredTrainTrack {
    let d = PolygonDomain::shared(kind).unwrap();
    let refs: Vec<MeasuredTrainTrack> = match kind {
        SurfaceKind::SpherePunctures(n) => reference_tracks_sphere(n).unwrap().to_vec(),
        _ => reference_tracks_on(&d).unwrap().to_vec(),
    };
    let base = refs.iter().filter(|t| !t.is_empty()).collect::<Vec<_>>();
    let base = multicurve_from_track(base.choose(rng).unwrap()).unwrap();
    let mut comps: Vec<_> = base
        .components()
        .iter()
        .filter_map(|(w, _)| rng.gen_bool(0.7).then(|| (w.clone(), BigUint::from(rng.gen_range(1u32..=1000)))))
        .collect();
    if comps.is_empty() {
        let (w, _) = base.components()[0].clone();
        comps.push((w, BigUint::from(1u8)));
    }
    let mut tt = track_from_multicurve(&MultiCurve::new(d, comps).unwrap()).unwrap();
    let steps = rng.gen_range(0..=16);
    match kind {
        SurfaceKind::SpherePunctures(n) => {
            for s in gen::uniform_braid(rng, n, steps) {
                tt = half_twist_track(s, &tt).unwrap();
            }
        }
        _ => {
            for h in gen::uniform_mcg(rng, kind.param(), steps) {
                tt = apply_generator(h, &tt).unwrap();
            }
        }
    }
    tt
}

fn round_trip(tt: &MeasuredTrainTrack) -> Result<(), String> {
    let mc = multicurve_from_track(tt).map_err(|e| e.to_string())?;
    let back = track_from_multicurve(&mc).map_err(|e| e.to_string())?;
    if &back != tt {
        return Err(format!("track -> multicurve -> track differs:\n{}", tt.to_text()));
    }
    if multicurve_from_track(&back).map_err(|e| e.to_string())? != mc {
        return Err("multicurve -> track -> multicurve differs".into());
    }
    let text = MeasuredTrainTrack::from_text(&tt.to_text()).map_err(|e| e.to_string())?;
    let mtext = MultiCurve::from_text(tt.domain().clone(), &mc.to_text()).map_err(|e| e.to_string())?;
    if &text != tt || mtext != mc {
        return Err("text round trip differs".into());
    }
    Ok(())
}

fn criterion_round_trip() -> (usize, Vec<String>) {
    let kinds: Vec<SurfaceKind> = [2, 3, 4]
        .map(SurfaceKind::PuncturedGenus)
        .into_iter()
        .chain((3..=8).map(SurfaceKind::SpherePunctures))
        .collect();
    let results: Vec<Result<(), String>> = kinds
        .par_iter()
        .flat_map(|&k| (0..200u64).into_par_iter().map(move |i| (k, i)))
        .map(|(k, i)| {
            let mut rng = gen::rng(0x15 ^ (k.param() as u64) << 40 ^ (k.is_sphere() as u64) << 48 ^ i);
            round_trip(&random_track(&mut rng, k)).map_err(|e| format!("{k} #{i}: {e}"))
        })
        .collect();
    let fails: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    (kinds.len() * 200, fails)
}

fn criterion_relations() -> Result<String, String> {
    let mut count = 0;
    for n in 2..=8 {
        for r in artin_relators(n) {
            let w = BraidWord::new(n, r).unwrap();
            if solve_braid(&w, false).map_err(|e| e.to_string())?.verdict != Verdict::Identity {
                return Err(format!("braid n={n}: {w}"));
            }
            count += 1;
        }
    }
    for g in 2..=4 {
        for r in relators(g) {
            let w = GeneratorWord::new(g, r).unwrap();
            if solve(&w, false).map_err(|e| e.to_string())?.verdict != Verdict::Identity {
                return Err(format!("punctured g={g}: {w}"));
            }
            if g >= 3 && solve_closed(&w, false).map_err(|e| e.to_string())?.verdict != Verdict::Identity {
                return Err(format!("closed g={g}: {w}"));
            }
            count += 1;
        }
    }
    for n in 3..=6 {
        let gens: Vec<ArtinGenerator> = (0..n).flat_map(|_| (1..n).map(|i| ArtinGenerator::new(i, false))).collect();
        let w = BraidWord::new(n, gens).unwrap();
        let refs = reference_tracks_sphere(n).map_err(|e| e.to_string())?;
        for r in refs {
            let mut st = SphereState::new(r.clone()).map_err(|e| e.to_string())?;
            for &s in &w.gens {
                st = apply_half_twist(s, &st).map_err(|e| e.to_string())?;
            }
            if st.tt != r {
                return Err(format!("full twist moves a reference track at n={n}"));
            }
        }
        if w.permutation() != (1..=n).collect::<Vec<_>>() {
            return Err(format!("full twist permutes punctures at n={n}"));
        }
        if solve_braid(&w, false).map_err(|e| e.to_string())?.verdict != Verdict::NonIdentity {
            return Err(format!("full twist at n={n} reported as identity"));
        }
    }
    Ok(format!("{count} relators identity; full twist n=3..6 non-identity with ν1..ν3 and permutation fixed"))
}

fn scrambled<R: Rng>(rng: &mut R, g: usize, len: usize) -> MeasuredTrainTrack {
    let d = PolygonDomain::shared(SurfaceKind::ClosedGenus(g)).unwrap();
    let refs = reference_tracks_on(&d).unwrap();
    let mut tt = refs.iter().filter(|t| !t.is_empty()).collect::<Vec<_>>().choose(rng).copied().unwrap().clone();
    for h in gen::uniform_mcg(rng, g, len) {
        tt = apply_generator(h, &tt).unwrap();
    }
    tt
}

fn same_multicurve(a: &MeasuredTrainTrack, b: &MeasuredTrainTrack) -> bool {
    let classes = |t| closed_curve_classes(&multicurve_from_track(t).unwrap()).unwrap();
    classes(a) == classes(b)
}

/// Pulls random long paths by random amounts until reduced.
fn random_reduce<R: Rng>(rng: &mut R, tt: &MeasuredTrainTrack) -> MeasuredTrainTrack {
    let m = tt.domain().m();
    let mut tt = tt.clone();
    loop {
        let long: Vec<_> = outer_paths(&tt).into_iter().filter(|p| p.len() >= m).collect();
        let Some(p) = long.choose(rng) else { return tt };
        let psi: u64 = p.psi.to_string().parse().unwrap_or(u64::MAX);
        let amount = if rng.gen() { p.psi.clone() } else { BigUint::from(rng.gen_range(1..=psi.min(1 << 20))) };
        tt = pull_across_puncture(&tt, p, &amount).unwrap();
    }
}

fn criterion_ambiguity() -> Result<String, String> {
    let mut rng = gen::rng(0x45);
    let (mut equal_pairs, mut by_g3, mut distinct_pairs, mut orderings) = (0, 0, 0, 0);
    let mut tries = 0;
    while equal_pairs < 100 || by_g3 == 0 {
        tries += 1;
        if tries > 200_000 {
            return Err(format!("only {equal_pairs} pull pairs found"));
        }
        let g = if tries % 3 == 0 { 3 } else { 2 };
        let len = rng.gen_range(4..=16);
        let (tt, _) = reduce_length(&scrambled(&mut rng, g, len)).map_err(|e| e.to_string())?;
        let m = tt.domain().m();
        for p in outer_paths(&tt).into_iter().filter(|p| p.len() + 1 == m) {
            let psi: u64 = p.psi.to_string().parse().unwrap_or(u64::MAX);
            let amount = BigUint::from(rng.gen_range(1..=psi.min(1 << 20)));
            let other = pull_across_puncture(&tt, &p, &amount).map_err(|e| e.to_string())?;
            if other.total_measure() != tt.total_measure() || !is_reduced(&other) {
                return Err(format!("equal-length pull changed T or reducedness at g={g}"));
            }
            if !equal_closed(&tt, &other).map_err(|e| e.to_string())? {
                return Err(format!("pull pair not identified at g={g}:\n{}{}", tt.to_text(), other.to_text()));
            }
            equal_pairs += 1;
            by_g3 += (g == 3) as usize;
        }
    }
    while distinct_pairs < 100 {
        let g = 2 + distinct_pairs % 2;
        let (a, b) = (scrambled(&mut rng, g, 8), scrambled(&mut rng, g, 8));
        if same_multicurve(&a, &b) {
            continue;
        }
        let (ra, _) = reduce_length(&a).map_err(|e| e.to_string())?;
        let (rb, _) = reduce_length(&b).map_err(|e| e.to_string())?;
        if equal_closed(&ra, &rb).map_err(|e| e.to_string())? {
            return Err(format!("distinct multicurves identified at g={g}"));
        }
        distinct_pairs += 1;
    }
    while orderings < 100 {
        let g = 2 + orderings % 2;
        let (tt, _) = reduce_length(&scrambled(&mut rng, g, 10)).map_err(|e| e.to_string())?;
        let h = gen::uniform_mcg(&mut rng, g, 1)[0];
        let raw = apply_generator(h, &tt).map_err(|e| e.to_string())?;
        let (fixed, _) = reduce_length(&raw).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let r = random_reduce(&mut rng, &raw);
            if r.total_measure() != fixed.total_measure() || !equal_closed(&r, &fixed).map_err(|e| e.to_string())? {
                return Err(format!("pull order changes the result at g={g}"));
            }
        }
        orderings += 1;
    }
    Ok(format!(
        "{equal_pairs} pull pairs equal ({by_g3} at g=3), {distinct_pairs} distinct pairs unequal, \
         T invariant over {orderings}x3 random pull orders"
    ))
}

struct Scaling {
    braid_len: f64,
    punctured_len: f64,
    braid_n: f64,
    bit_excess: u64,
}

fn criterion_scaling() -> Scaling {
    let run = |group, params: Vec<usize>, lengths: Vec<usize>, samples| {
        let spec = BenchSpec { group, params, lengths, samples, seed: 8, reps: 3 };
        bench::run_bench(&spec, 1).expect("bench run")
    };
    let lengths = vec![64, 128, 256, 512, 1024];
    let braid = run(Group::Braid, vec![6], lengths.clone(), 20);
    let punct = run(Group::Punctured, vec![3], lengths, 20);
    let sweep = run(Group::Braid, vec![4, 8, 12, 16, 20, 24, 28, 32], vec![256], 10);
    let all: Vec<_> = braid.iter().chain(&punct).chain(&sweep).cloned().collect();
    Scaling {
        braid_len: bench::slopes_in_length(&braid)[&6],
        punctured_len: bench::slopes_in_length(&punct)[&3],
        braid_n: bench::slopes_in_param(&sweep)[&256],
        bit_excess: bench::bit_excess(&all),
    }
}

fn main() -> ExitCode {
    let mut out = Lines { failed: 0 };

    let (braid, elapsed) = criterion_braid();
    out.report(
        1,
        "braid vs Artin action (n=3..8, 500 words each, |w|<=64)",
        braid.clean() && braid.runs == 3000 && elapsed < Duration::from_secs(600),
        format!(
            "{} runs, {} disagreements, {} errors, {:.1}s (limit 600s) {}",
            braid.runs,
            braid.disagreements.len(),
            braid.errors.len(),
            elapsed.as_secs_f64(),
            braid.first_problem()
        ),
    );

    let punct = criterion_mcg(false, &[2, 3], 300, 32);
    out.report(
        2,
        "punctured vs free-group action (g=2,3, 300 words each, |w|<=32)",
        punct.clean() && punct.runs == 600,
        format!("{} runs, {} disagreements, {} errors {}", punct.runs, punct.disagreements.len(), punct.errors.len(), punct.first_problem()),
    );

    let closed = criterion_mcg(true, &[3], 200, 24);
    out.report(
        3,
        "closed vs surface-group action (g=3, 200 words, |w|<=24, n(τ)<4g-1 every step)",
        closed.clean() && closed.runs == 200,
        format!(
            "{} runs, {} disagreements, {} errors (includes any n(τ) >= 4g-1) {}",
            closed.runs,
            closed.disagreements.len(),
            closed.errors.len(),
            closed.first_problem()
        ),
    );

    let growth = braid.growth_violations + punct.growth_violations + closed.growth_violations;
    out.report(
        4,
        "growth bounds (T <= 2T for A/B/H, <= 3T for X)",
        growth == 0 && braid.runs + punct.runs + closed.runs > 0,
        format!("{growth} violations over {} runs", braid.runs + punct.runs + closed.runs),
    );

    let (trips, fails) = criterion_round_trip();
    out.report(
        5,
        "track <-> multicurve round trip (g=2,3,4; n=3..8; 200 each)",
        fails.is_empty(),
        format!("{} / {trips} exact {}", trips - fails.len(), fails.first().cloned().unwrap_or_default()),
    );

    let rel = criterion_relations();
    out.report(6, "relation suite and full twist", rel.is_ok(), rel.unwrap_or_else(|e| e));

    let amb = criterion_ambiguity();
    out.report(7, "closed canonical form and pull order", amb.is_ok(), amb.unwrap_or_else(|e| e));

    let sc = criterion_scaling();
    let bits = sc.bit_excess.max(braid.bit_excess).max(punct.bit_excess).max(closed.bit_excess);
    let (lo, hi) = (1.6, 2.4);
    let floor = |s: f64| if s < lo { " below floor" } else { "" };
    out.report(
        8,
        "scaling",
        sc.braid_len <= hi && sc.punctured_len <= hi && sc.braid_n <= 1.5 && bits == 0,
        format!(
            "slope time~|w| braid n=6 {:.2}{}, punctured g=3 {:.2}{} (target interval [{lo}, {hi}]; upper bound asserted, \
             see README); slope time~n at |w|=256 {:.2} (<= 1.5); bits over 2|w|+64: {bits}",
            sc.braid_len,
            floor(sc.braid_len),
            sc.punctured_len,
            floor(sc.punctured_len),
            sc.braid_n
        ),
    );

    if out.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", out.failed);
        ExitCode::FAILURE
    }
}
