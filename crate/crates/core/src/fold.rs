//! Removal of self-branches by folding U-turns across their edge.
//!
//! The raw list is laid out as bands of parallel strands. A band joins an
//! interval of one edge to an interval of another (or the same) edge, with
//! the strand order reversed between its ends. A U-turn is a band whose two
//! ends sit side by side on one edge; it is pushed through the edge, which
//! pairs up the strands it met on the partner edge. Bands that come out
//! adjacent on one edge are U-turns again and are folded in turn.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polygon::Domain;
use crate::tracks::{chord, sort_merge, strand_key, Chord, MeasuredTrainTrack, RawBranchList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Piece {
    band: usize,
    end: usize,
}

#[derive(Debug, Clone)]
struct Band {
    edges: [usize; 2],
    width: BigUint,
    alive: bool,
}

struct Layout {
    edges: Vec<Vec<Piece>>,
    bands: Vec<Band>,
}

fn inconsistent(what: &str) -> Error {
    Error::Inconsistent(format!("normalize: {what}"))
}

impl Layout {
    fn width(&self, p: Piece) -> &BigUint {
        &self.bands[p.band].width
    }

    fn index_of(&self, p: Piece) -> (usize, usize) {
        let e = self.bands[p.band].edges[p.end];
        let i = self.edges[e].iter().position(|&q| q == p).expect("piece on its edge");
        (e, i)
    }

    fn load(&self, e: usize) -> BigUint {
        self.edges[e].iter().map(|&p| self.width(p)).sum()
    }

    fn new_band(&mut self, edges: [usize; 2], width: BigUint) -> usize {
        self.bands.push(Band { edges, width, alive: true });
        self.bands.len() - 1
    }

    /// Splits band `b` so that its first `w1` strands, read along end 0, form
    /// the old band and the rest a new one.
    fn split(&mut self, b: usize, w1: BigUint) {
        let rest = &self.bands[b].width - &w1;
        let edges = self.bands[b].edges;
        let nb = self.new_band(edges, rest);
        self.bands[b].width = w1;
        let (e0, i0) = self.index_of(Piece { band: b, end: 0 });
        self.edges[e0].insert(i0 + 1, Piece { band: nb, end: 0 });
        let (e1, i1) = self.index_of(Piece { band: b, end: 1 });
        self.edges[e1].insert(i1, Piece { band: nb, end: 1 });
    }

    /// Makes `pos` a piece boundary on edge `e`.
    fn cut(&mut self, e: usize, pos: &BigUint) {
        let mut start = BigUint::zero();
        for k in 0..self.edges[e].len() {
            let p = self.edges[e][k];
            let end = &start + self.width(p);
            if *pos > start && *pos < end {
                let into = pos - &start;
                let w1 = if p.end == 0 { into } else { self.width(p) - into };
                self.split(p.band, w1);
                return;
            }
            if end >= *pos {
                return;
            }
            start = end;
        }
    }

    fn boundaries(&self, e: usize) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero()];
        let mut at = BigUint::zero();
        for &p in &self.edges[e] {
            at += self.width(p);
            out.push(at.clone());
        }
        out
    }

    /// A U-turn whose two ends are adjacent on their edge.
    fn find_uturn(&self) -> Option<(usize, usize)> {
        for (e, pieces) in self.edges.iter().enumerate() {
            for k in 1..pieces.len() {
                if pieces[k].band == pieces[k - 1].band {
                    return Some((e, k - 1));
                }
            }
        }
        None
    }

    fn has_self_band(&self) -> bool {
        self.bands.iter().any(|b| b.alive && b.edges[0] == b.edges[1])
    }

    fn fold(&mut self, domain: &Domain, e: usize, k: usize) -> Result<()> {
        let u = self.edges[e][k].band;
        let w = self.bands[u].width.clone();
        let s: BigUint = self.edges[e][..k].iter().map(|&p| self.width(p)).sum();
        let m = self.load(e);
        let pe = domain.pair(e);
        if self.load(pe) != m {
            return Err(inconsistent("unbalanced edge pair"));
        }
        let lo = &m - &s - &w * 2u8;
        let hi = &lo + &w * 2u8;
        let mirror = |x: &BigUint| &lo + &hi - x;
        // Cut J = [lo, hi) so that its pieces are symmetric about the centre.
        for x in [lo.clone(), &lo + &w, hi.clone()] {
            self.cut(pe, &x);
        }
        loop {
            let inside: Vec<BigUint> =
                self.boundaries(pe).into_iter().filter(|b| *b > lo && *b < hi).collect();
            let before = inside.len();
            for b in &inside {
                self.cut(pe, &mirror(b));
            }
            if self.boundaries(pe).into_iter().filter(|b| *b > lo && *b < hi).count() == before {
                break;
            }
        }
        // Pieces of J with their positions.
        let mut at = BigUint::zero();
        let mut span: Vec<(usize, BigUint, BigUint)> = Vec::new();
        for (i, &p) in self.edges[pe].iter().enumerate() {
            let end = &at + self.width(p);
            if at >= lo && end <= hi {
                span.push((i, at.clone(), end.clone()));
            }
            at = end;
        }
        let first = span.first().map(|x| x.0).ok_or_else(|| inconsistent("empty fold"))?;
        let pieces: Vec<Piece> = span.iter().map(|x| self.edges[pe][x.0]).collect();
        let count = pieces.len();
        for (t, (_, a, b)) in span.iter().enumerate() {
            let (ma, mb) = (mirror(b), mirror(a));
            let (_, ra, rb) = &span[count - 1 - t];
            if *ra != ma || *rb != mb {
                return Err(inconsistent("fold pieces not symmetric"));
            }
        }
        let in_j: HashMap<Piece, usize> = pieces.iter().enumerate().map(|(t, &p)| (p, t)).collect();
        let other = |p: Piece| Piece { band: p.band, end: 1 - p.end };
        let mut seen = vec![false; count];
        let mut joins: Vec<(Piece, Piece, BigUint)> = Vec::new();
        for t in 0..count {
            if seen[t] || in_j.contains_key(&other(pieces[t])) {
                continue;
            }
            let start = other(pieces[t]);
            let width = self.width(pieces[t]).clone();
            let mut cur = t;
            let far = loop {
                let y = count - 1 - cur;
                seen[cur] = true;
                seen[y] = true;
                self.bands[pieces[cur].band].alive = false;
                self.bands[pieces[y].band].alive = false;
                let z = other(pieces[y]);
                match in_j.get(&z) {
                    Some(&next) => cur = next,
                    None => break z,
                }
            };
            joins.push((start, far, width));
        }
        for (t, p) in pieces.iter().enumerate() {
            if !seen[t] {
                // closed loop made only of folded strands
                self.bands[p.band].alive = false;
            }
        }
        self.bands[u].alive = false;
        self.edges[pe].drain(first..first + count);
        // cuts above may have added pieces on `e`
        let k = self.edges[e].iter().position(|p| p.band == u).expect("U-turn on its edge");
        self.edges[e].drain(k..k + 2);
        for (f1, f2, width) in joins {
            let edges = [self.bands[f1.band].edges[f1.end], self.bands[f2.band].edges[f2.end]];
            let nb = self.new_band(edges, width);
            let (e1, i1) = self.index_of(f1);
            self.edges[e1][i1] = Piece { band: nb, end: 0 };
            let (e2, i2) = self.index_of(f2);
            self.edges[e2][i2] = Piece { band: nb, end: 1 };
        }
        Ok(())
    }
}

/// Turns a raw branch list into a π₁ track, folding away every self-branch.
/// Self-branch offsets count only the ends of ordinary branches on the edge.
pub fn normalize(domain: &Domain, raw: RawBranchList) -> Result<MeasuredTrainTrack> {
    let n = domain.len();
    let raw = sort_merge(raw);
    let mut lay = Layout { edges: vec![Vec::new(); n], bands: Vec::new() };
    let mut uturns = Vec::new();
    for b in &raw {
        let (i, j) = b.ends;
        if i >= n || j >= n {
            return Err(inconsistent("position out of range"));
        }
        if i == j {
            uturns.push(b);
            continue;
        }
        let id = lay.new_band([i, j], b.measure.clone());
        lay.edges[i].push(Piece { band: id, end: 0 });
        lay.edges[j].push(Piece { band: id, end: 1 });
    }
    for (q, pieces) in lay.edges.iter_mut().enumerate() {
        let bands = &lay.bands;
        pieces.sort_by_key(|p| strand_key(n, q, bands[p.band].edges[1 - p.end]));
    }
    for b in uturns {
        let q = b.ends.0;
        // position among ordinary ends, then insert the U-turn there
        let mut ordinary = BigUint::zero();
        let mut k = 0;
        while k < lay.edges[q].len() && ordinary < b.offset {
            let p = lay.edges[q][k];
            if lay.bands[p.band].edges[0] != lay.bands[p.band].edges[1] {
                ordinary += lay.width(p);
            }
            k += 1;
        }
        if ordinary < b.offset {
            return Err(inconsistent("self-branch offset beyond edge load"));
        }
        if ordinary > b.offset {
            // the offset falls inside piece k - 1: cut it there
            let pos: BigUint =
                lay.edges[q][..k].iter().map(|&p| lay.width(p)).sum::<BigUint>() - (&ordinary - &b.offset);
            lay.cut(q, &pos);
        }
        let id = lay.new_band([q, q], b.measure.clone());
        lay.edges[q].insert(k, Piece { band: id, end: 1 });
        lay.edges[q].insert(k, Piece { band: id, end: 0 });
    }
    for p in 0..n {
        if lay.load(p) != lay.load(domain.pair(p)) {
            return Err(inconsistent("unbalanced edge pair"));
        }
    }
    while let Some((e, k)) = lay.find_uturn() {
        lay.fold(domain, e, k)?;
    }
    if lay.has_self_band() {
        return Err(inconsistent("self-branch could not be folded"));
    }
    let mut out: BTreeMap<Chord, BigUint> = BTreeMap::new();
    for b in lay.bands.iter().filter(|b| b.alive) {
        *out.entry(chord(b.edges[0], b.edges[1])).or_default() += &b.width;
    }
    MeasuredTrainTrack::new(domain.clone(), out).map_err(|v| inconsistent(&v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::track_of_word;
    use crate::polygon::{PolygonDomain, SurfaceKind};
    use crate::tracks::RawBranch;

    fn g2() -> Domain {
        PolygonDomain::shared(SurfaceKind::PuncturedGenus(2)).unwrap()
    }

    /// Chords of a non-tight single-curve word; every edge it crosses
    /// carries at most one ordinary strand, so offsets are all zero.
    fn raw_of_word(d: &Domain, letters: &[usize]) -> RawBranchList {
        let k = letters.len();
        (0..k)
            .map(|i| RawBranch::new(d.pair(letters[i]), letters[(i + 1) % k], BigUint::from(1u8)))
            .collect()
    }

    #[test]
    fn valid_input_unchanged() {
        let d = g2();
        let tt = track_of_word(&d, &[1, 4]).unwrap().add(&track_of_word(&d, &[4]).unwrap()).unwrap();
        let raw = tt.branches().iter().map(|((i, j), m)| RawBranch::new(*i, *j, m.clone())).collect();
        assert_eq!(normalize(&d, raw).unwrap(), tt);
    }

    #[test]
    fn backtracks_fold_away() {
        let d = g2();
        let a1 = track_of_word(&d, &[0]).unwrap();
        assert_eq!(normalize(&d, raw_of_word(&d, &[0, 1, 3])).unwrap(), a1);
        let a1b1 = track_of_word(&d, &[0, 1]).unwrap();
        assert_eq!(normalize(&d, raw_of_word(&d, &[0, 1, 4, 6])).unwrap(), a1b1);
        // nested backtrack: the second fold is produced by the first
        assert_eq!(normalize(&d, raw_of_word(&d, &[0, 1, 4, 5, 7, 6])).unwrap(), a1b1);
    }

    #[test]
    fn offset_places_the_uturn() {
        let d = g2();
        // a1 b1 a2 A2 next to a disjoint a2; the U-turn on edge 6 must sit
        // past the a2 strand to give the disjoint union
        let mut raw = raw_of_word(&d, &[0, 1, 4, 6]);
        raw.push(RawBranch::new(6, 4, BigUint::from(1u8)));
        let at = |o: u32| {
            let mut r = raw.clone();
            for b in r.iter_mut().filter(|b| b.ends == (6, 6)) {
                b.offset = BigUint::from(o);
            }
            normalize(&d, r).unwrap()
        };
        let union = track_of_word(&d, &[0, 1]).unwrap().add(&track_of_word(&d, &[4]).unwrap()).unwrap();
        assert_eq!(at(1), union);
        assert_ne!(at(0), union);
        assert_eq!(at(0).total_measure(), BigUint::from(3u8));
    }

    #[test]
    fn unbalanced_rejected() {
        let d = g2();
        assert!(normalize(&d, vec![RawBranch::new(0, 1, BigUint::from(1u8))]).is_err());
    }
}
