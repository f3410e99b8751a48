//! Braid groups through half-twists on the punctured sphere.
//!
//! `B_n` maps onto the mapping classes of the sphere with punctures
//! `P_0, P_1, ..., P_n` fixing `P_0`, with kernel generated by the full twist
//! `Δ²`. The sphere tracks and the puncture permutation decide the image; the
//! arc decides the power of `Δ²`.
//!
//! The arc runs from `P_n` to an extra puncture `Q = P_{n+1}` placed next to
//! the boundary. It is stored as the boundary of its regular neighbourhood, a
//! curve on the `n+1` puncture polygon on which the same half-twists act
//! (`H_i` for `i < n` never touches `Q`). A curve around two punctures
//! determines the arc between them, so nothing is lost.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::curves::track_of_word;
use crate::error::{Error, Result};
use crate::mcg_punctured::{SolveReport, StepTrace, Verdict};
use crate::moves::{self, HALF_TWIST, HALF_TWIST_INV};
use crate::polygon::{Domain, Label, PolygonDomain, SurfaceKind};
use crate::tracks::{chord, Chord, MeasuredTrainTrack};

/// `σ_i` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArtinGenerator {
    pub index: usize,
    pub inverse: bool,
}

impl ArtinGenerator {
    pub fn new(index: usize, inverse: bool) -> Self {
        ArtinGenerator { index, inverse }
    }

    pub fn inv(self) -> Self {
        ArtinGenerator { inverse: !self.inverse, ..self }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.index < 1 || self.index + 1 > n {
            return Err(Error::Parameter(format!("generator {self} needs index in 1..={} for n = {n}", n - 1)));
        }
        Ok(())
    }

    pub fn all(n: usize) -> Vec<ArtinGenerator> {
        (1..n).flat_map(|i| [Self::new(i, false), Self::new(i, true)]).collect()
    }
}

impl fmt::Display for ArtinGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.inverse { 'S' } else { 's' }, self.index)
    }
}

impl FromStr for ArtinGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad Artin generator {s:?}"));
        let (body, alias_inv) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let mut chars = body.chars();
        let inverse = match chars.next() {
            Some('s') => false,
            Some('S') => true,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index = digits.parse().map_err(|_| bad())?;
        Ok(ArtinGenerator { index, inverse: inverse ^ alias_inv })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    pub n: usize,
    pub gens: Vec<ArtinGenerator>,
}

impl BraidWord {
    pub fn new(n: usize, gens: Vec<ArtinGenerator>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("braid groups need n >= 2".into()));
        }
        for s in &gens {
            s.check(n)?;
        }
        Ok(BraidWord { n, gens })
    }

    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let gens = text.split_whitespace().map(str::parse).collect::<Result<Vec<_>>>()?;
        Self::new(n, gens)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn inverse(&self) -> Self {
        BraidWord { n: self.n, gens: self.gens.iter().rev().map(|s| s.inv()).collect() }
    }

    pub fn exponent_sum(&self) -> i64 {
        self.gens.iter().map(|s| if s.inverse { -1 } else { 1 }).sum()
    }

    /// Image in `S_n` as positions: `perm[k-1]` is where `P_k` ends up.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (1..=self.n).collect();
        for s in &self.gens {
            swap_positions(&mut perm, s.index);
        }
        perm
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn swap_positions(perm: &mut [usize], i: usize) {
    for p in perm.iter_mut() {
        if *p == i {
            *p = i + 1;
        } else if *p == i + 1 {
            *p = i;
        }
    }
}

fn sphere_size(tt: &MeasuredTrainTrack) -> Result<usize> {
    match tt.domain().kind() {
        SurfaceKind::SpherePunctures(n) => Ok(n),
        _ => Err(Error::Parameter("half-twists act on sphere domains only".into())),
    }
}

/// `H_i^{±1}` on a track of any sphere polygon with more than `i` punctures.
pub fn half_twist_track(s: ArtinGenerator, tt: &MeasuredTrainTrack) -> Result<MeasuredTrainTrack> {
    let n = sphere_size(tt)?;
    s.check(n)?;
    let base: &[moves::Move] = if s.inverse { &HALF_TWIST_INV } else { &HALF_TWIST };
    let i = s.index as Label;
    let chords = moves::run(tt.domain().kind(), tt.branches(), &moves::shifted(base, i - 1), Some((i, i + 1)))?;
    Ok(MeasuredTrainTrack::from_map(tt.domain().clone(), chords.into_iter().collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereState {
    pub tt: MeasuredTrainTrack,
    /// `perm[k-1]` is the current position of `P_k`.
    pub perm: Vec<usize>,
}

impl SphereState {
    pub fn new(tt: MeasuredTrainTrack) -> Result<Self> {
        let n = sphere_size(&tt)?;
        Ok(SphereState { tt, perm: (1..=n).collect() })
    }
}

pub fn apply_half_twist(s: ArtinGenerator, state: &SphereState) -> Result<SphereState> {
    let tt = half_twist_track(s, &state.tt)?;
    let mut perm = state.perm.clone();
    swap_positions(&mut perm, s.index);
    Ok(SphereState { tt, perm })
}

/// Edge letters of the curve around `P_from, ..., P_to`.
pub fn sphere_curve(domain: &PolygonDomain, from: usize, to: usize) -> Vec<usize> {
    (from..=to).map(|i| domain.position(i as Label).unwrap()).collect()
}

/// `ν_1`: nested curves around `P_1..P_{j+1}`, `j = 1..n-2`. `ν_2`, `ν_3`:
/// the curves `γ_i` around `P_i, P_{i+1}` for odd and even `i < n`.
///
/// A class fixing the three tracks and every puncture fixes each component:
/// `γ_i` is the only `γ` meeting `α_{i-1}`, and `γ_1 = α_1`. Then it fixes the
/// half-twist curves, commutes with every `H_i`, and is central, so trivial.
/// `ν_1` has total measure about `n²/2` but only `O(n)` branches.
pub fn reference_tracks_sphere(n: usize) -> Result<[MeasuredTrainTrack; 3]> {
    let d = PolygonDomain::shared(SurfaceKind::SpherePunctures(n))?;
    let sum = |curves: Vec<(usize, usize)>| -> Result<MeasuredTrainTrack> {
        let mut acc = MeasuredTrainTrack::empty(d.clone());
        for (a, b) in curves {
            acc = acc.add(&track_of_word(&d, &sphere_curve(&d, a, b))?)?;
        }
        Ok(acc)
    };
    Ok([
        sum((1..=n - 2).map(|j| (1, j + 1)).collect())?,
        sum((1..n).step_by(2).map(|i| (i, i + 1)).collect())?,
        sum((2..n).step_by(2).map(|i| (i, i + 1)).collect())?,
    ])
}

/// The dead-end arc, kept as its neighbourhood boundary on the sphere with
/// one more puncture, plus the current position of its puncture end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcTrack {
    boundary: MeasuredTrainTrack,
    anchor: usize,
}

/// Chord view of an arc: the arc's branches with the two stubs removed.
/// `anchor_edge` is the edge the arc crosses first when leaving its puncture
/// and `end_edge` the last one before `Q`; both are `None` when the arc is a
/// single diagonal of the polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcView {
    pub anchor: usize,
    pub chords: Vec<(Chord, BigUint)>,
    pub anchor_edge: Option<usize>,
    pub end_edge: Option<usize>,
}

impl ArcTrack {
    pub fn boundary(&self) -> &MeasuredTrainTrack {
        &self.boundary
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Number of braid strands.
    pub fn n(&self) -> usize {
        self.boundary.domain().kind().param() - 1
    }

    pub fn view(&self) -> Result<ArcView> {
        let d = self.boundary.domain();
        let big = d.len();
        let q = self.n() + 1;
        let bad = |what: &str| Error::Inconsistent(format!("arc boundary malformed: {what}"));
        let mut meas: std::collections::BTreeMap<Chord, BigUint> =
            self.boundary.branches().iter().cloned().collect();
        // Edges met by the two strands hugging puncture P_a.
        let turn = |a: usize| -> (Option<usize>, Option<usize>) {
            let (e1, e2) = (2 * a - 2, 2 * a - 1);
            let find = |e: usize, step: usize| {
                (2..big).map(|k| (e + step * k) % big).find(|&j| meas.contains_key(&chord(e, j)))
            };
            (find(e1, 1), find(e2, big - 1))
        };
        let (a1, a2) = turn(self.anchor);
        let (q1, q2) = turn(q);
        let (Some(a1), Some(a2), Some(q1), Some(q2)) = (a1, a2, q1, q2) else {
            return Err(bad("no turn around an end"));
        };
        let (ea, eq) = ((2 * self.anchor - 2, 2 * self.anchor - 1), (2 * q - 2, 2 * q - 1));
        let direct = a1 == eq.1 && a2 == eq.0;
        if direct {
            if meas.len() != 2 || meas.values().any(|m| *m != BigUint::from(1u8)) {
                return Err(bad("diagonal arc with extra strands"));
            }
            return Ok(ArcView { anchor: self.anchor, chords: Vec::new(), anchor_edge: None, end_edge: None });
        }
        if a1 != a2 || q1 != q2 {
            return Err(bad("turn strands diverge"));
        }
        for c in [chord(ea.0, a1), chord(ea.1, a1), chord(eq.0, q1), chord(eq.1, q1)] {
            let m = meas.get_mut(&c).ok_or_else(|| bad("missing turn"))?;
            *m -= 1u8;
        }
        let mut chords = Vec::new();
        for (c, m) in meas {
            if m.bit(0) {
                return Err(bad("odd measure after removing turns"));
            }
            if !m.is_zero() {
                chords.push((c, m >> 1));
            }
        }
        Ok(ArcView { anchor: self.anchor, chords, anchor_edge: Some(a1), end_edge: Some(q1) })
    }
}

pub fn reference_arc(n: usize) -> Result<ArcTrack> {
    if n < 2 {
        return Err(Error::Parameter("n >= 2".into()));
    }
    let d: Domain = PolygonDomain::shared(SurfaceKind::SpherePunctures(n + 1))?;
    Ok(ArcTrack { boundary: track_of_word(&d, &sphere_curve(&d, n, n + 1))?, anchor: n })
}

pub fn apply_half_twist_arc(s: ArtinGenerator, arc: &ArcTrack) -> Result<ArcTrack> {
    s.check(arc.n())?;
    let boundary = half_twist_track(s, &arc.boundary)?;
    let anchor = match arc.anchor {
        a if a == s.index => a + 1,
        a if a == s.index + 1 => a - 1,
        a => a,
    };
    Ok(ArcTrack { boundary, anchor })
}

/// Artin relators of `B_n`: commutators of distant generators and
/// `s_i s_{i+1} s_i S_{i+1} S_i S_{i+1}`.
pub fn artin_relators(n: usize) -> Vec<Vec<ArtinGenerator>> {
    let s = |i| ArtinGenerator::new(i, false);
    let mut out = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            if j == i + 1 {
                out.push(vec![s(i), s(j), s(i), s(j).inv(), s(i).inv(), s(j).inv()]);
            } else {
                out.push(vec![s(i), s(j), s(i).inv(), s(j).inv()]);
            }
        }
    }
    out
}

/// Solves the word problem in `B_n`. For `n = 2` the group is infinite cyclic
/// and the exponent sum decides.
pub fn solve_braid(w: &BraidWord, trace: bool) -> Result<SolveReport> {
    let started = std::time::Instant::now();
    let mut report = SolveReport {
        verdict: Verdict::Identity,
        trace: Vec::new(),
        peak_bits: 0,
        growth_violations: 0,
        caveat: None,
    };
    if w.n == 2 {
        if w.exponent_sum() != 0 {
            report.verdict = Verdict::NonIdentity;
        }
        return Ok(report);
    }
    let refs = reference_tracks_sphere(w.n)?;
    let ref_arc = reference_arc(w.n)?;
    let mut states = refs.iter().cloned().map(SphereState::new).collect::<Result<Vec<_>>>()?;
    let mut arc = ref_arc.clone();
    report.peak_bits = states.iter().map(|s| s.tt.max_bits()).max().unwrap_or(0);
    for (step, &s) in w.gens.iter().enumerate() {
        for st in states.iter_mut() {
            let before = st.tt.total_measure();
            *st = apply_half_twist(s, st)?;
            if st.tt.total_measure() > before * 2u8 {
                report.growth_violations += 1;
            }
            report.peak_bits = report.peak_bits.max(st.tt.max_bits());
        }
        let before = arc.boundary.total_measure();
        arc = apply_half_twist_arc(s, &arc)?;
        if arc.boundary.total_measure() > before * 2u8 {
            report.growth_violations += 1;
        }
        report.peak_bits = report.peak_bits.max(arc.boundary.max_bits());
        if trace {
            let mut totals: Vec<BigUint> = states.iter().map(|s| s.tt.total_measure()).collect();
            totals.push(arc.boundary.total_measure());
            report.trace.push(StepTrace {
                step: step + 1,
                generator: s.to_string(),
                totals,
                note: format!("arc at P{}", arc.anchor),
                micros: started.elapsed().as_micros() as u64,
            });
        }
    }
    let fixes_refs = states.iter().zip(&refs).all(|(s, r)| s.tt == *r);
    let pure = states[0].perm.iter().enumerate().all(|(k, &p)| p == k + 1);
    if !(fixes_refs && pure && arc == ref_arc) {
        report.verdict = Verdict::NonIdentity;
    }
    Ok(report)
}
