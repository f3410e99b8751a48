//! Measured π₁-train-tracks: weighted non-crossing chord systems in the
//! fundamental polygon.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polygon::{Domain, PolygonDomain, SurfaceKind};

pub use crate::fold::normalize;

/// Unordered position pair, stored with `i <= j`.
pub type Chord = (usize, usize);

pub fn chord(i: usize, j: usize) -> Chord {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Sort key of the strand end of a chord `{q, j}` along edge `q`, read from
/// the start of `q`. Smaller keys sit nearer the start.
pub fn strand_key(n: usize, q: usize, j: usize) -> usize {
    (q + n - j) % n
}

/// Two chords with four distinct ends cross iff they interleave.
pub fn chords_cross(a: Chord, b: Chord) -> bool {
    let (i, j) = a;
    let (k, l) = b;
    if i == k || i == l || j == k || j == l {
        return false;
    }
    let inside = |x: usize| i < x && x < j;
    inside(k) != inside(l)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfBranch(usize),
    ZeroMeasure(Chord),
    NotSorted(Chord, Chord),
    Unbalanced { edge: usize, pair: usize },
    Crossing(Chord, Chord),
    TooManyBranches { count: usize, max: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfBranch(p) => write!(f, "self-branch at edge {p}"),
            Violation::ZeroMeasure(c) => write!(f, "zero measure on branch {c:?}"),
            Violation::NotSorted(a, b) => write!(f, "branches not sorted/unique: {a:?} then {b:?}"),
            Violation::Unbalanced { edge, pair } => {
                write!(f, "switch condition fails on edge pair ({edge},{pair})")
            }
            Violation::Crossing(a, b) => write!(f, "branches {a:?} and {b:?} cross"),
            Violation::TooManyBranches { count, max } => {
                write!(f, "{count} branches exceeds the bound {max}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasuredTrainTrack {
    domain: Domain,
    branches: Vec<(Chord, BigUint)>,
}

impl MeasuredTrainTrack {
    pub fn empty(domain: Domain) -> Self {
        MeasuredTrainTrack { domain, branches: Vec::new() }
    }

    /// Builds a track from chord measures, merging repeats and dropping zeros,
    /// then validates it.
    pub fn new<I>(domain: Domain, branches: I) -> std::result::Result<Self, Violation>
    where
        I: IntoIterator<Item = (Chord, BigUint)>,
    {
        let tt = Self::from_map(domain, collect(branches));
        tt.validate()?;
        Ok(tt)
    }

    pub(crate) fn from_map(domain: Domain, map: BTreeMap<Chord, BigUint>) -> Self {
        let branches = map.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        MeasuredTrainTrack { domain, branches }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn branches(&self) -> &[(Chord, BigUint)] {
        &self.branches
    }

    pub fn measure(&self, c: Chord) -> BigUint {
        let c = chord(c.0, c.1);
        match self.branches.binary_search_by(|(k, _)| k.cmp(&c)) {
            Ok(i) => self.branches[i].1.clone(),
            Err(_) => BigUint::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_measure(&self) -> BigUint {
        self.branches.iter().map(|(_, m)| m).sum()
    }

    /// Largest bit-length among branch measures.
    pub fn max_bits(&self) -> u64 {
        self.branches.iter().map(|(_, m)| m.bits()).max().unwrap_or(0)
    }

    /// Measure crossing edge `p`, i.e. the number of strand ends on it.
    pub fn edge_load(&self, p: usize) -> BigUint {
        self.branches
            .iter()
            .map(|((i, j), m)| match (*i == p, *j == p) {
                (true, true) => m * 2u32,
                (true, false) | (false, true) => m.clone(),
                _ => BigUint::zero(),
            })
            .sum()
    }

    /// Outer branches join consecutive edges; all others are inner.
    pub fn outer_branches(&self) -> impl Iterator<Item = &(Chord, BigUint)> {
        self.branches.iter().filter(|((i, j), _)| self.domain.are_consecutive(*i, *j))
    }

    pub fn inner_branches(&self) -> impl Iterator<Item = &(Chord, BigUint)> {
        self.branches.iter().filter(|((i, j), _)| !self.domain.are_consecutive(*i, *j))
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let d = &self.domain;
        for w in self.branches.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Violation::NotSorted(w[0].0, w[1].0));
            }
        }
        for (c, m) in &self.branches {
            if c.0 == c.1 {
                return Err(Violation::SelfBranch(c.0));
            }
            if m.is_zero() {
                return Err(Violation::ZeroMeasure(*c));
            }
        }
        for p in 0..d.len() {
            let q = d.pair(p);
            if p < q && self.edge_load(p) != self.edge_load(q) {
                return Err(Violation::Unbalanced { edge: p, pair: q });
            }
        }
        for (x, (a, _)) in self.branches.iter().enumerate() {
            for (b, _) in &self.branches[x + 1..] {
                if chords_cross(*a, *b) {
                    return Err(Violation::Crossing(*a, *b));
                }
            }
        }
        let max = 2 * d.len() - 3;
        if self.branches.len() > max {
            return Err(Violation::TooManyBranches { count: self.branches.len(), max });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::Precondition("tracks live on different domains".into()));
        }
        for (a, _) in &self.branches {
            for (b, _) in &other.branches {
                if chords_cross(*a, *b) {
                    return Err(Error::NotSameCone(*a, *b));
                }
            }
        }
        let map = collect(self.branches.iter().chain(&other.branches).cloned());
        Ok(Self::from_map(self.domain.clone(), map))
    }

    pub fn scale(&self, a: &BigUint) -> Self {
        let branches = if a.is_zero() {
            Vec::new()
        } else {
            self.branches.iter().map(|(c, m)| (*c, m * a)).collect()
        };
        MeasuredTrainTrack { domain: self.domain.clone(), branches }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("domain {}\n", self.domain.kind());
        for ((i, j), m) in &self.branches {
            s.push_str(&format!("{i} {j} {m}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse("line 1: missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "domain" {
            return Err(Error::Parse("line 1: expected `domain <kind> <param>`".into()));
        }
        let param = h[2].parse().map_err(|_| Error::Parse(format!("line 1: bad parameter `{}`", h[2])))?;
        let domain = PolygonDomain::shared(SurfaceKind::from_name(h[1], param)?)?;
        let mut raw = Vec::new();
        for (ln, line) in lines {
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", ln + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad("expected `i j measure`"));
            }
            let i: usize = f[0].parse().map_err(|_| bad("bad position"))?;
            let j: usize = f[1].parse().map_err(|_| bad("bad position"))?;
            if i >= domain.len() || j >= domain.len() {
                return Err(bad("position out of range"));
            }
            let m: BigUint = f[2].parse().map_err(|_| bad("bad measure"))?;
            raw.push((chord(i, j), m));
        }
        Self::new(domain, raw).map_err(|v| Error::Parse(format!("invalid track: {v}")))
    }
}

fn collect<I: IntoIterator<Item = (Chord, BigUint)>>(it: I) -> BTreeMap<Chord, BigUint> {
    let mut map: BTreeMap<Chord, BigUint> = BTreeMap::new();
    for (c, m) in it {
        *map.entry(chord(c.0, c.1)).or_default() += m;
    }
    map
}

/// One entry of an unnormalized branch list. Self-branches `{q, q}` carry an
/// `offset`: the number of ordinary (non-self) strand ends on `q` before
/// their `2·measure` ends, counted from the start of `q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawBranch {
    pub ends: Chord,
    pub offset: BigUint,
    pub measure: BigUint,
}

impl RawBranch {
    pub fn new(i: usize, j: usize, measure: BigUint) -> Self {
        RawBranch { ends: chord(i, j), offset: BigUint::zero(), measure }
    }
}

pub type RawBranchList = Vec<RawBranch>;

pub fn sort_merge(raw: RawBranchList) -> RawBranchList {
    let mut map: BTreeMap<(Chord, BigUint), BigUint> = BTreeMap::new();
    for b in raw {
        let key = if b.ends.0 == b.ends.1 { (b.ends, b.offset) } else { (b.ends, BigUint::zero()) };
        *map.entry(key).or_default() += b.measure;
    }
    map.into_iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|((ends, offset), measure)| RawBranch { ends, offset, measure })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> Domain {
        PolygonDomain::shared(SurfaceKind::PuncturedGenus(2)).unwrap()
    }

    fn b(n: u32) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn validate_cases() {
        assert!(MeasuredTrainTrack::new(g2(), [((0, 2), b(1))]).is_ok());
        assert_eq!(
            MeasuredTrainTrack::new(g2(), [((0, 1), b(1))]).unwrap_err(),
            Violation::Unbalanced { edge: 0, pair: 2 }
        );
        let crossing = [((0, 4), b(1)), ((1, 5), b(1)), ((2, 6), b(1)), ((3, 7), b(1))];
        assert!(matches!(
            MeasuredTrainTrack::new(g2(), crossing).unwrap_err(),
            Violation::Crossing(_, _)
        ));
    }

    #[test]
    fn measure_ops() {
        let a1 = MeasuredTrainTrack::new(g2(), [((0, 2), b(1))]).unwrap();
        assert_eq!(a1.total_measure(), b(1));
        assert_eq!(a1.add(&a1).unwrap(), a1.scale(&b(2)));
        assert_eq!(a1.scale(&b(7)).total_measure(), b(7));
        assert_eq!(a1.scale(&b(1)), a1);
    }

    #[test]
    fn sort_merge_cases() {
        let merged = sort_merge(vec![RawBranch::new(3, 4, b(1)), RawBranch::new(4, 3, b(2))]);
        assert_eq!(merged, vec![RawBranch::new(3, 4, b(3))]);
        let once = sort_merge(vec![RawBranch::new(1, 6, b(5))]);
        assert_eq!(sort_merge(once.clone()), once);
        assert!(sort_merge(vec![RawBranch::new(0, 2, b(0))]).is_empty());
    }

    #[test]
    fn text_round_trip() {
        let tt = MeasuredTrainTrack::new(g2(), [((3, 4), b(1)), ((1, 6), b(1))]).unwrap();
        let text = tt.to_text();
        assert_eq!(text, "domain punctured 2\n1 6 1\n3 4 1\n");
        assert_eq!(MeasuredTrainTrack::from_text(&text).unwrap(), tt);
        assert!(MeasuredTrainTrack::from_text("domain punctured 2\n0 2 -3\n").is_err());
    }
}
