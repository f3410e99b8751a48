//! Tight cyclic edge-words, multicurves, and the conversion between
//! multicurves and integral tracks.
//!
//! A letter is the edge position the curve leaves the polygon through; it
//! re-enters through `pair(letter)`. Consecutive letters `l, l'` therefore
//! contribute the chord `{pair(l), l'}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polygon::{Domain, PolygonDomain};
use crate::tracks::{chord, strand_key, Chord, MeasuredTrainTrack, Violation};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord {
    letters: Vec<usize>,
}

impl CyclicWord {
    /// Wraps letters that are already tight; rotates to the minimal form.
    pub fn from_tight(domain: &PolygonDomain, letters: Vec<usize>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Precondition("empty cyclic word".into()));
        }
        let k = letters.len();
        for i in 0..k {
            if letters[(i + 1) % k] == domain.pair(letters[i]) {
                return Err(Error::Precondition(format!("word backtracks at letter {i}")));
            }
        }
        Ok(CyclicWord { letters: min_rotation(&letters) })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The same curve traversed backwards.
    pub fn inverse(&self, domain: &PolygonDomain) -> Self {
        let letters: Vec<usize> = self.letters.iter().rev().map(|&p| domain.pair(p)).collect();
        CyclicWord { letters: min_rotation(&letters) }
    }

    /// Representative of the unoriented curve.
    pub fn unoriented(&self, domain: &PolygonDomain) -> Self {
        let inv = self.inverse(domain);
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    pub fn to_text(&self, domain: &PolygonDomain) -> String {
        let parts: Vec<String> = self.letters.iter().map(|&p| domain.edge_label(p)).collect();
        parts.join(" ")
    }

    pub fn parse(domain: &PolygonDomain, text: &str) -> Result<Option<Self>> {
        let raw = text
            .split_whitespace()
            .map(|t| domain.parse_label(t))
            .collect::<Result<Vec<_>>>()?;
        if raw.is_empty() {
            return Err(Error::Parse("empty curve word".into()));
        }
        Ok(tighten(domain, &raw))
    }
}

fn min_rotation(letters: &[usize]) -> Vec<usize> {
    let k = letters.len();
    (0..k)
        .map(|r| letters[r..].iter().chain(&letters[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Free and cyclic reduction. `None` is the trivial curve.
pub fn tighten(domain: &PolygonDomain, raw: &[usize]) -> Option<CyclicWord> {
    let mut stack: Vec<usize> = Vec::with_capacity(raw.len());
    for &p in raw {
        if stack.last() == Some(&domain.pair(p)) {
            stack.pop();
        } else {
            stack.push(p);
        }
    }
    let (mut lo, mut hi) = (0, stack.len());
    while hi - lo > 1 && stack[hi - 1] == domain.pair(stack[lo]) {
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        return None;
    }
    Some(CyclicWord { letters: min_rotation(&stack[lo..hi]) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiCurve {
    domain: Domain,
    components: Vec<(CyclicWord, BigUint)>,
}

impl MultiCurve {
    /// Components are identified up to rotation and orientation; repeats
    /// are merged by adding multiplicities.
    pub fn new<I>(domain: Domain, components: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CyclicWord, BigUint)>,
    {
        let mut map: BTreeMap<CyclicWord, BigUint> = BTreeMap::new();
        for (w, m) in components {
            if m.is_zero() {
                return Err(Error::Precondition("zero multiplicity".into()));
            }
            *map.entry(w.unoriented(&domain)).or_default() += m;
        }
        Ok(MultiCurve { domain, components: map.into_iter().collect() })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn components(&self) -> &[(CyclicWord, BigUint)] {
        &self.components
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (w, m) in &self.components {
            s.push_str(&format!("{m}: {}\n", w.to_text(&self.domain)));
        }
        s
    }

    pub fn from_text(domain: Domain, text: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: String| Error::Parse(format!("line {}: {what}", ln + 1));
            let (m, w) = line.split_once(':').ok_or_else(|| bad("expected `mult: word`".into()))?;
            let m: BigUint = m.trim().parse().map_err(|_| bad(format!("bad multiplicity `{}`", m.trim())))?;
            if m.is_zero() {
                return Err(bad("zero multiplicity".into()));
            }
            let word = CyclicWord::parse(&domain, w)
                .map_err(|e| bad(e.to_string()))?
                .ok_or_else(|| bad("curve is trivial".into()))?;
            comps.push((word, m));
        }
        Self::new(domain, comps)
    }
}

pub fn word_chords(domain: &PolygonDomain, letters: &[usize]) -> Vec<Chord> {
    let k = letters.len();
    (0..k)
        .map(|i| chord(domain.pair(letters[i]), letters[(i + 1) % k]))
        .collect()
}

pub fn track_from_multicurve(mc: &MultiCurve) -> Result<MeasuredTrainTrack> {
    let d = mc.domain();
    let mut raw = Vec::new();
    for (w, m) in mc.components() {
        for c in word_chords(d, w.letters()) {
            raw.push((c, m.clone()));
        }
    }
    MeasuredTrainTrack::new(d.clone(), raw).map_err(|v| match v {
        Violation::Crossing(a, b) => Error::NonEmbeddable(a, b),
        other => Error::Inconsistent(format!("curve track invalid: {other}")),
    })
}

pub fn track_of_word(domain: &Domain, letters: &[usize]) -> Result<MeasuredTrainTrack> {
    let w = CyclicWord::from_tight(domain, letters.to_vec())?;
    track_from_multicurve(&MultiCurve::new(domain.clone(), [(w, BigUint::one())])?)
}

/// Strand layout of a track: for each edge, its chord bundles in order from
/// the start of the edge, with their starting offsets.
struct Layout {
    /// per edge: (partner, measure, offset)
    bundles: Vec<Vec<(usize, BigUint, BigUint)>>,
    load: Vec<BigUint>,
}

impl Layout {
    fn new(tt: &MeasuredTrainTrack) -> Layout {
        let d = tt.domain();
        let n = d.len();
        let mut per: Vec<Vec<(usize, BigUint)>> = vec![Vec::new(); n];
        for ((i, j), m) in tt.branches() {
            per[*i].push((*j, m.clone()));
            per[*j].push((*i, m.clone()));
        }
        let mut bundles = Vec::with_capacity(n);
        let mut load = Vec::with_capacity(n);
        for (q, mut v) in per.into_iter().enumerate() {
            v.sort_by_key(|(j, _)| strand_key(n, q, *j));
            let mut off = BigUint::zero();
            let mut out = Vec::with_capacity(v.len());
            for (j, m) in v {
                let next = &off + &m;
                out.push((j, m, off));
                off = next;
            }
            bundles.push(out);
            load.push(off);
        }
        Layout { bundles, load }
    }

    /// Bundle on edge `q` containing strand position `k`.
    fn find(&self, q: usize, k: &BigUint) -> &(usize, BigUint, BigUint) {
        let v = &self.bundles[q];
        let i = v.partition_point(|(_, m, o)| &(o + m) <= k);
        &v[i]
    }

    fn offset_of(&self, q: usize, j: usize) -> &(usize, BigUint, BigUint) {
        self.bundles[q].iter().find(|(p, _, _)| *p == j).expect("bundle present")
    }
}

/// Decomposes an integral track into its multicurve.
///
/// Strands are grouped into bands by refining breakpoints through the chord
/// and gluing maps, so the cost is governed by the number of bands rather
/// than the total measure.
pub fn multicurve_from_track(tt: &MeasuredTrainTrack) -> Result<MultiCurve> {
    let d = tt.domain().clone();
    let lay = Layout::new(tt);
    let n = d.len();

    // Breakpoint k on edge q separates strands k-1 and k.
    let mut cuts: Vec<BTreeSet<BigUint>> = vec![BTreeSet::new(); n];
    let mut work: Vec<(usize, BigUint)> = Vec::new();
    for q in 0..n {
        for (_, _, o) in &lay.bundles[q] {
            if !o.is_zero() {
                work.push((q, o.clone()));
            }
        }
    }
    while let Some((q, k)) = work.pop() {
        if k.is_zero() || k >= lay.load[q] || !cuts[q].insert(k.clone()) {
            continue;
        }
        let p = d.pair(q);
        work.push((p, &lay.load[q] - &k));
        let (j, m, o) = lay.find(q, &k);
        if k > *o {
            let r = &k - o;
            let (_, _, oj) = lay.offset_of(*j, q);
            work.push((*j, oj + m - r));
        }
    }

    let mut seen: HashSet<(usize, BigUint)> = HashSet::new();
    let mut comps: Vec<(CyclicWord, BigUint)> = Vec::new();
    for q0 in 0..n {
        let starts: Vec<BigUint> =
            std::iter::once(BigUint::zero()).chain(cuts[q0].iter().cloned()).collect();
        for s0 in starts {
            if s0 >= lay.load[q0] || seen.contains(&(q0, s0.clone())) {
                continue;
            }
            let width = band_width(&cuts[q0], &lay.load[q0], &s0);
            let mut letters = Vec::new();
            let (mut q, mut s) = (q0, s0.clone());
            loop {
                seen.insert((q, s.clone()));
                let (j, m, o) = lay.find(q, &s);
                let r = &s - o;
                let (_, _, oj) = lay.offset_of(*j, q);
                let a = oj + m - &r - &width;
                seen.insert((*j, a.clone()));
                letters.push(*j);
                let p = d.pair(*j);
                s = &lay.load[*j] - &a - &width;
                q = p;
                if q == q0 && s == s0 {
                    break;
                }
                if letters.len() > 4 * tt.branches().len() * (cuts.iter().map(|c| c.len()).sum::<usize>() + 1) + 8 {
                    return Err(Error::Inconsistent("band trace does not close".into()));
                }
            }
            // The traced orientation enters through q0; letters are exits.
            let w = CyclicWord::from_tight(&d, letters)
                .map_err(|e| Error::Inconsistent(format!("traced word not tight: {e}")))?;
            comps.push((w, width));
        }
    }
    MultiCurve::new(d, comps)
}

fn band_width(cuts: &BTreeSet<BigUint>, load: &BigUint, s: &BigUint) -> BigUint {
    use std::ops::Bound::{Excluded, Unbounded};
    match cuts.range((Excluded(s.clone()), Unbounded)).next() {
        Some(e) => e - s,
        None => load - s,
    }
}
