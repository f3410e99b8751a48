//! Closed surfaces. The polygon vertex is now an ordinary point `P`, so
//! strands may be pushed across it; a track is reduced when no run of outer
//! branches around `P` can be pushed to the other side to shorten it.
//!
//! Corners are named by their vertex: corner `v` sits between edge `v - 1`
//! and edge `v`, its outer branch is `{v - 1, v}`, and going once around `P`
//! visits the corners in the order `v, next_corner(v), ...`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::curves::{tighten, CyclicWord};
use crate::error::{Error, Result};
use crate::mcg_punctured::{
    apply_generator, reference_tracks_on, GeneratorWord, SolveReport, StepTrace, Verdict,
};
use crate::oracle::CLOSED_G2_CAVEAT;
use crate::polygon::{Domain, PolygonDomain, SurfaceKind};
use crate::tracks::{chord, normalize, strand_key, Chord, MeasuredTrainTrack, RawBranch};

/// A maximal run of corners with positive outer measure, in link order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterPath {
    pub corners: Vec<usize>,
    /// Smallest outer measure along the path and the first corner index in
    /// `corners` attaining it.
    pub psi: BigUint,
    pub psi_index: usize,
}

impl OuterPath {
    pub fn start(&self) -> usize {
        self.corners[0]
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }
}

fn closed_genus(tt: &MeasuredTrainTrack) -> Result<usize> {
    match tt.domain().kind() {
        SurfaceKind::ClosedGenus(g) => Ok(g),
        k => Err(Error::Parameter(format!("closed-surface operation on a {} domain", k.name()))),
    }
}

fn outer_chord(n: usize, v: usize) -> Chord {
    chord((v + n - 1) % n, v)
}

/// Corners in link order starting from corner 0.
fn link(d: &PolygonDomain) -> Vec<usize> {
    let mut out = Vec::with_capacity(d.len());
    let mut v = 0;
    for _ in 0..d.len() {
        out.push(v);
        v = d.next_corner(v);
    }
    out
}

/// All maximal outer paths. When every corner is positive the single
/// returned path covers the whole link.
pub fn outer_paths(tt: &MeasuredTrainTrack) -> Vec<OuterPath> {
    let d = tt.domain();
    let n = d.len();
    let cyc = link(d);
    let mu: Vec<BigUint> = cyc.iter().map(|&v| tt.measure(outer_chord(n, v))).collect();
    let make = |idx: Vec<usize>| {
        let (mut psi_index, mut psi) = (0, mu[idx[0]].clone());
        for (t, &i) in idx.iter().enumerate() {
            if mu[i] < psi {
                psi = mu[i].clone();
                psi_index = t;
            }
        }
        OuterPath { corners: idx.iter().map(|&i| cyc[i]).collect(), psi, psi_index }
    };
    let Some(zero) = (0..n).find(|&i| mu[i].is_zero()) else {
        return vec![make((0..n).collect())];
    };
    let mut paths = Vec::new();
    let mut run = Vec::new();
    for s in 1..=n {
        let i = (zero + s) % n;
        if mu[i].is_zero() {
            if !run.is_empty() {
                paths.push(make(std::mem::take(&mut run)));
            }
        } else {
            run.push(i);
        }
    }
    paths
}

/// The longest outer path; ties go to the smaller start corner.
pub fn max_outer_path(tt: &MeasuredTrainTrack) -> Option<OuterPath> {
    outer_paths(tt).into_iter().min_by_key(|p| (std::cmp::Reverse(p.len()), p.start()))
}

/// Every outer path has length at most `m - 1`.
pub fn is_reduced(tt: &MeasuredTrainTrack) -> bool {
    let m = tt.domain().m();
    max_outer_path(tt).map_or(true, |p| p.len() < m)
}

/// Pushes the innermost `amount` strands of `path` across `P`. Total measure
/// changes by `2(m - 1 - k)·amount` for a path of length `k`.
pub fn pull_across_puncture(tt: &MeasuredTrainTrack, path: &OuterPath, amount: &BigUint) -> Result<MeasuredTrainTrack> {
    closed_genus(tt)?;
    let d = tt.domain();
    let (n, m) = (d.len(), d.m());
    if amount.is_zero() {
        return Ok(tt.clone());
    }
    let k = path.len();
    if k + 1 < m {
        return Err(Error::Precondition(format!("path of length {k} is shorter than m - 1 = {}", m - 1)));
    }
    let psi = path.corners.iter().map(|&v| tt.measure(outer_chord(n, v))).min().unwrap_or_default();
    if *amount > psi {
        return Err(Error::Precondition(format!("amount {amount} exceeds the path minimum {psi}")));
    }
    let mut mu: BTreeMap<Chord, BigUint> = tt.branches().iter().cloned().collect();
    if k == n {
        // innermost strands close up around P: a trivial loop
        for &v in &path.corners {
            sub(&mut mu, outer_chord(n, v), amount)?;
        }
        return Ok(MeasuredTrainTrack::from_map(d.clone(), mu));
    }
    let v0 = d.prev_corner(path.corners[0]);
    let vk1 = d.next_corner(path.corners[k - 1]);
    for w in path.corners.windows(2) {
        if d.next_corner(w[0]) != w[1] {
            return Err(Error::Precondition("path corners are not consecutive".into()));
        }
    }
    if !tt.measure(outer_chord(n, v0)).is_zero() || !tt.measure(outer_chord(n, vk1)).is_zero() {
        return Err(Error::Precondition("path is not maximal".into()));
    }
    // Innermost strands at the start of edge v0 and at the end of edge q.
    let q = (vk1 + n - 1) % n;
    let start_side = take_strands(tt, v0, (2..n).map(|s| (v0 + n - s) % n), amount)?;
    let end_side = take_strands(tt, q, (2..n).map(|s| (q + s) % n), amount)?;
    for &v in &path.corners {
        sub(&mut mu, outer_chord(n, v), amount)?;
    }
    // Innermost strands of {v0, q} are met from both sides; they are the
    // same strands and move at both ends at once.
    let shared = match (start_side.iter().find(|s| s.0 == q), end_side.iter().find(|s| s.0 == v0)) {
        (Some(a), Some(b)) if vk1 != v0 => a.1.clone().min(b.1.clone()),
        _ => BigUint::zero(),
    };
    for (j, t) in &start_side {
        sub(&mut mu, chord(v0, *j), t)?;
    }
    for (j, t) in &end_side {
        let t = if *j == v0 { t - &shared } else { t.clone() };
        sub(&mut mu, chord(q, *j), &t)?;
    }
    if vk1 != v0 {
        let before = (v0 + n - 1) % n;
        for (j, t) in &start_side {
            let t = if *j == q { t - &shared } else { t.clone() };
            *mu.entry(chord(*j, before)).or_default() += t;
        }
        for (j, t) in &end_side {
            let t = if *j == v0 { t - &shared } else { t.clone() };
            *mu.entry(chord((q + 1) % n, *j)).or_default() += t;
        }
        *mu.entry(chord(before, (q + 1) % n)).or_default() += &shared;
        mu.retain(|_, w| !w.is_zero());
        let mut v = d.next_corner(vk1);
        while v != v0 {
            *mu.entry(outer_chord(n, v)).or_default() += amount;
            v = d.next_corner(v);
        }
        let out = MeasuredTrainTrack::from_map(d.clone(), mu);
        out.validate().map_err(|e| Error::Inconsistent(format!("pull produced an invalid track: {e}")))?;
        return Ok(out);
    }
    // The path runs all the way round but for one corner: the pulled strands
    // join their two ends directly, possibly turning back on one edge.
    let chunks = pair_runs(&start_side, &end_side);
    let mut uturn: Option<(usize, BigUint)> = None;
    for (j, jj, t) in &chunks {
        if j == jj {
            if uturn.is_some() {
                return Err(Error::Inconsistent("more than one turn-back in a pull".into()));
            }
            uturn = Some((*j, t.clone()));
        } else {
            *mu.entry(chord(*j, *jj)).or_default() += t;
        }
    }
    let mut raw: Vec<RawBranch> = mu
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(&(i, j), w)| RawBranch::new(i, j, w.clone()))
        .collect();
    if let Some((j, t)) = uturn {
        // between the bundles {j, v0} and {j, v0 - 1}
        let limit = strand_key(n, j, v0);
        let offset: BigUint = mu
            .iter()
            .filter(|(&(a, b), _)| (a == j) != (b == j))
            .filter(|(&(a, b), _)| strand_key(n, j, if a == j { b } else { a }) <= limit)
            .map(|(_, w)| w.clone())
            .sum();
        raw.push(RawBranch { ends: (j, j), offset, measure: t });
    }
    normalize(d, raw)
}

fn sub(mu: &mut BTreeMap<Chord, BigUint>, c: Chord, by: &BigUint) -> Result<()> {
    if by.is_zero() {
        return Ok(());
    }
    let w = mu.get_mut(&c).filter(|w| **w >= *by).ok_or_else(|| {
        Error::Inconsistent(format!("pull needs measure {by} on branch {c:?}"))
    })?;
    *w -= by;
    if w.is_zero() {
        mu.remove(&c);
    }
    Ok(())
}

/// First `amount` strands on edge `e`, visiting partners in the given order.
fn take_strands(
    tt: &MeasuredTrainTrack,
    e: usize,
    partners: impl Iterator<Item = usize>,
    amount: &BigUint,
) -> Result<Vec<(usize, BigUint)>> {
    let mut left = amount.clone();
    let mut out = Vec::new();
    for j in partners {
        if left.is_zero() {
            break;
        }
        let w = tt.measure(chord(e, j));
        if w.is_zero() {
            continue;
        }
        let t = w.min(left.clone());
        left -= &t;
        out.push((j, t));
    }
    if !left.is_zero() {
        return Err(Error::Inconsistent(format!("edge {e} carries too few strands for the pull")));
    }
    Ok(out)
}

fn pair_runs(a: &[(usize, BigUint)], b: &[(usize, BigUint)]) -> Vec<(usize, usize, BigUint)> {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1.clone(), b[0].1.clone());
    let mut out = Vec::new();
    loop {
        let t = ra.clone().min(rb.clone());
        out.push((a[i].0, b[j].0, t.clone()));
        ra -= &t;
        rb -= &t;
        if ra.is_zero() {
            i += 1;
            if i == a.len() {
                break;
            }
            ra = a[i].1.clone();
        }
        if rb.is_zero() {
            j += 1;
            rb = b[j].1.clone();
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReduceStats {
    pub pulls: usize,
    /// A path missing a single corner was pulled; its cost is linear in T.
    pub slow: bool,
}

/// Pulls measure off long outer paths until the track is reduced.
pub fn reduce_length(tt: &MeasuredTrainTrack) -> Result<(MeasuredTrainTrack, ReduceStats)> {
    closed_genus(tt)?;
    let (n, m) = (tt.domain().len(), tt.domain().m());
    let mut cur = tt.clone();
    let mut stats = ReduceStats::default();
    while let Some(p) = max_outer_path(&cur).filter(|p| p.len() >= m) {
        if p.len() == n - 1 {
            stats.slow = true;
        }
        cur = pull_across_puncture(&cur, &p, &p.psi)?;
        stats.pulls += 1;
    }
    Ok((cur, stats))
}

fn complement_start(d: &PolygonDomain, p: &OuterPath) -> usize {
    d.next_corner(d.next_corner(p.corners[p.len() - 1]))
}

/// Among the tracks equivalent to a reduced `tt` under pulls of length
/// `m - 1`, the one with all such measure moved to the path that starts at
/// the smaller corner.
pub fn canonicalize(tt: &MeasuredTrainTrack) -> Result<MeasuredTrainTrack> {
    let (mut cur, _) = reduce_length(tt)?;
    let d = cur.domain().clone();
    let m = d.m();
    for _ in 0..=d.len() {
        let next = outer_paths(&cur)
            .into_iter()
            .find(|p| p.len() == m - 1 && p.start() > complement_start(&d, p));
        match next {
            Some(p) => cur = pull_across_puncture(&cur, &p, &p.psi)?,
            None => return Ok(cur),
        }
    }
    Err(Error::Inconsistent("canonical form did not settle".into()))
}

pub fn equal_closed(a: &MeasuredTrainTrack, b: &MeasuredTrainTrack) -> Result<bool> {
    Ok(canonicalize(a)? == canonicalize(b)?)
}

/// Closed reference tracks: the punctured curve systems, reduced.
pub fn closed_reference_tracks(g: usize) -> Result<[MeasuredTrainTrack; 4]> {
    let d: Domain = PolygonDomain::shared(SurfaceKind::ClosedGenus(g))?;
    let refs = reference_tracks_on(&d)?;
    let mut out = refs.clone();
    for (o, r) in out.iter_mut().zip(refs.iter()) {
        *o = canonicalize(r)?;
    }
    Ok(out)
}

pub fn solve_closed(w: &GeneratorWord, trace: bool) -> Result<SolveReport> {
    let started = std::time::Instant::now();
    if w.g < 3 {
        return Err(Error::Unsupported(CLOSED_G2_CAVEAT.into()));
    }
    let refs = closed_reference_tracks(w.g)?;
    let n = 4 * w.g;
    let mut cur = refs.clone();
    let mut report = SolveReport {
        verdict: Verdict::Identity,
        trace: Vec::new(),
        peak_bits: cur.iter().map(|t| t.max_bits()).max().unwrap_or(0),
        growth_violations: 0,
        caveat: None,
    };
    for (step, &h) in w.gens.iter().enumerate() {
        let mut notes = Vec::new();
        for tt in cur.iter_mut() {
            let before = tt.total_measure();
            let img = apply_generator(h, tt)?;
            report.peak_bits = report.peak_bits.max(img.max_bits());
            if img.total_measure() > &before * h.growth_bound() {
                report.growth_violations += 1;
            }
            let (len, psi) = max_outer_path(&img).map_or((0, BigUint::zero()), |p| (p.len(), p.psi));
            if len + 1 >= n {
                return Err(Error::Inconsistent(format!(
                    "step {}: outer path of length {len} after {h}; expected < {}",
                    step + 1,
                    n - 1
                )));
            }
            let (red, stats) = reduce_length(&img)?;
            if red.total_measure() > img.total_measure() {
                report.growth_violations += 1;
            }
            *tt = red;
            if trace {
                notes.push(format!(
                    "n={len} psi={psi} T={}{}",
                    tt.total_measure(),
                    if stats.slow { " SLOW" } else { "" }
                ));
            }
        }
        if trace {
            report.trace.push(StepTrace {
                step: step + 1,
                generator: h.to_string(),
                totals: cur.iter().map(|t| t.total_measure()).collect(),
                note: notes.join("; "),
                micros: started.elapsed().as_micros() as u64,
            });
        }
    }
    for (c, r) in cur.iter().zip(&refs) {
        if canonicalize(c)? != *r {
            report.verdict = Verdict::NonIdentity;
        }
    }
    Ok(report)
}

/// Step of the link: `l -> pair(l) + 1` runs along the relator, `pair(l) - 1`
/// along its inverse.
fn outer_step(d: &PolygonDomain, l: usize, forward: bool) -> usize {
    let n = d.len();
    if forward {
        (d.pair(l) + 1) % n
    } else {
        (d.pair(l) + n - 1) % n
    }
}

/// Longest cyclic run of outer turns: (start letter index, chords, forward).
/// `None` if the word has no outer turn; a run equal to the whole word is
/// reported with length `len`.
fn longest_run(d: &PolygonDomain, w: &[usize]) -> Option<(usize, usize, bool)> {
    let len = w.len();
    let mut best: Option<(usize, usize, bool)> = None;
    for forward in [true, false] {
        let turn: Vec<bool> = (0..len).map(|i| w[(i + 1) % len] == outer_step(d, w[i], forward)).collect();
        if turn.iter().all(|&t| t) {
            return Some((0, len, forward));
        }
        for i in 0..len {
            if !turn[i] || turn[(i + len - 1) % len] {
                continue;
            }
            let k = (0..len).take_while(|&s| turn[(i + s) % len]).count();
            if best.map_or(true, |b| k > b.1) {
                best = Some((i, k, forward));
            }
        }
    }
    best
}

/// No backtracking and no run of `m` or more outer turns.
pub fn is_shortest_curve_word(domain: &PolygonDomain, word: &CyclicWord) -> bool {
    let w = word.letters();
    let len = w.len();
    let backtrack = (0..len).any(|i| w[(i + 1) % len] == domain.pair(w[i]));
    !backtrack && longest_run(domain, w).map_or(true, |r| r.1 < domain.m())
}

/// Pushes long outer runs across `P` until the word is shortest. `None`
/// means the curve is trivial on the closed surface.
pub fn shorten_curve_word(domain: &PolygonDomain, word: &CyclicWord) -> Option<CyclicWord> {
    let n = domain.len();
    let mut cur = tighten(domain, word.letters())?;
    loop {
        let w = cur.letters().to_vec();
        let len = w.len();
        let Some((i, k, forward)) = longest_run(domain, &w).filter(|r| r.1 >= domain.m()) else {
            return Some(cur);
        };
        if k == len {
            // a power of the relator
            return None;
        }
        let last = w[(i + k) % len];
        let mut comp = Vec::with_capacity(n - k - 1);
        let mut l = last;
        for _ in 0..n - k - 1 {
            l = outer_step(domain, l, forward);
            comp.push(l);
        }
        let mut next: Vec<usize> = comp.iter().rev().map(|&l| domain.pair(l)).collect();
        next.extend((k + 1..len).map(|s| w[(i + s) % len]));
        cur = tighten(domain, &next)?;
    }
}
