//! Generator actions as cut-and-paste moves on the fundamental polygon.
//!
//! The chord coordinates of `h(γ)` with respect to `R` are the coordinates of
//! `γ` with respect to `h⁻¹(R)`. A move cuts the current polygon along a
//! diagonal and reglues the piece holding edge `e` to the piece holding
//! `pair(e)`. Each generator is a short fixed sequence of moves, after which
//! the polygon is the standard one up to rotation (and, for half-twists, a
//! swap of two labels).

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::polygon::{standard_labels, Label, SurfaceKind};
use crate::tracks::{chord, strand_key, Chord};

/// A polygon vertex named by an adjacent edge label: the start of that edge,
/// or its end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexRef {
    pub label: Label,
    pub at_end: bool,
}

const fn start(label: Label) -> VertexRef {
    VertexRef { label, at_end: false }
}

const fn end(label: Label) -> VertexRef {
    VertexRef { label, at_end: true }
}

/// Cut along the diagonal `s → t`, reglue along edge `e ↔ e⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub s: VertexRef,
    pub t: VertexRef,
    pub e: Label,
}

const fn mv(s: VertexRef, t: VertexRef, e: Label) -> Move {
    Move { s, t, e }
}

// Move tables for index 1. Genus labels: a1 = 1, b1 = 2, a2 = 3, b2 = 4.
pub(crate) const TWIST_A: [Move; 1] = [mv(start(2), start(-2), 1)];
pub(crate) const TWIST_A_INV: [Move; 1] = [mv(start(1), start(-1), 1)];
pub(crate) const TWIST_B: [Move; 1] = [mv(start(-1), end(-2), 2)];
pub(crate) const TWIST_B_INV: [Move; 1] = [mv(start(2), start(-2), 2)];
pub(crate) const TWIST_X: [Move; 2] = [mv(start(-1), start(-4), 2), mv(start(-4), start(4), 3)];
pub(crate) const TWIST_X_INV: [Move; 2] = [mv(start(2), start(-3), 3), mv(start(-2), start(3), 2)];
// Sphere labels: a_i = i. The half-twist leaves a1 and a2 swapped.
pub(crate) const HALF_TWIST: [Move; 1] = [mv(start(1), start(-2), 2)];
pub(crate) const HALF_TWIST_INV: [Move; 1] = [mv(start(-1), end(-2), 1)];

fn shift(l: Label, by: Label) -> Label {
    if l > 0 {
        l + by
    } else {
        l - by
    }
}

pub(crate) fn shifted(moves: &[Move], by: Label) -> Vec<Move> {
    moves
        .iter()
        .map(|m| Move {
            s: VertexRef { label: shift(m.s.label, by), ..m.s },
            t: VertexRef { label: shift(m.t.label, by), ..m.t },
            e: shift(m.e, by),
        })
        .collect()
}

/// A polygon with arbitrary labels and a chord system on it.
#[derive(Debug, Clone)]
pub(crate) struct CutState {
    pub labels: Vec<Label>,
    pub chords: Vec<(Chord, BigUint)>,
}

impl CutState {
    fn pos(&self, l: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&x| x == l)
            .ok_or_else(|| Error::Inconsistent(format!("label {l} missing from polygon")))
    }

    fn vertex(&self, v: VertexRef) -> Result<usize> {
        Ok((self.pos(v.label)? + v.at_end as usize) % self.labels.len())
    }

    fn pair(&self, p: usize) -> Result<usize> {
        self.pos(-self.labels[p])
    }

    pub fn apply(&mut self, m: &Move) -> Result<()> {
        let (s, t, e) = (self.vertex(m.s)?, self.vertex(m.t)?, self.pos(m.e)?);
        self.cut_paste(s, t, e)
    }

    fn cut_paste(&mut self, sv: usize, tv: usize, e: usize) -> Result<()> {
        let n = self.labels.len();
        let pe = self.pair(e)?;
        let x: Vec<usize> = (0..(tv + n - sv) % n).map(|k| (sv + k) % n).collect();
        let y: Vec<usize> = (0..(sv + n - tv) % n).map(|k| (tv + k) % n).collect();
        let (b_side, a_side) = if x.contains(&e) { (x, y) } else { (y, x) };
        if !a_side.contains(&pe) || a_side.len() < 2 || b_side.len() < 2 {
            return Err(Error::Inconsistent(format!("illegal move ({sv},{tv},{e})")));
        }
        // New edges: DA closes side A, DB closes side B.
        const DA: usize = usize::MAX;
        const DB: usize = usize::MAX - 1;
        let mut b_cyc = b_side.clone();
        b_cyc.push(DB);
        let k = b_cyc.iter().position(|&p| p == e).unwrap();
        let rest: Vec<usize> = b_cyc[k + 1..].iter().chain(&b_cyc[..k]).copied().collect();
        let mut seq = Vec::with_capacity(n);
        for &p in a_side.iter().chain(std::iter::once(&DA)) {
            if p == pe {
                seq.extend(&rest);
            } else {
                seq.push(p);
            }
        }
        let ylab = self.labels[e];
        let new_labels: Vec<Label> = seq
            .iter()
            .map(|&p| match p {
                DA => ylab,
                DB => -ylab,
                _ => self.labels[p],
            })
            .collect();
        let mut npos = vec![0usize; n];
        let (mut da, mut db) = (0, 0);
        for (i, &p) in seq.iter().enumerate() {
            match p {
                DA => da = i,
                DB => db = i,
                _ => npos[p] = i,
            }
        }
        let mut in_a = vec![false; n];
        for &p in &a_side {
            in_a[p] = true;
        }

        let mut out: BTreeMap<Chord, BigUint> = BTreeMap::new();
        let mut add = |i: usize, j: usize, m: &BigUint| {
            *out.entry(chord(i, j)).or_default() += m;
        };
        let mut seam_a: Vec<(usize, usize, BigUint)> = Vec::new();
        let mut seam_b: Vec<(usize, usize, BigUint)> = Vec::new();
        for ((i, j), m) in &self.chords {
            for (u, v) in [(*i, *j), (*j, *i)] {
                if u == pe {
                    if in_a[v] && v != pe {
                        seam_a.push((strand_key(n, pe, v), npos[v], m.clone()));
                    } else {
                        seam_a.push((strand_key(n, pe, v), da, m.clone()));
                        if v != e {
                            add(db, npos[v], m);
                        }
                    }
                }
                if u == e {
                    if !in_a[v] && v != e {
                        seam_b.push((strand_key(n, e, v), npos[v], m.clone()));
                    } else {
                        seam_b.push((strand_key(n, e, v), db, m.clone()));
                        if v != pe {
                            add(da, npos[v], m);
                        }
                    }
                }
            }
            if [e, pe].contains(i) || [e, pe].contains(j) {
                continue;
            }
            if in_a[*i] == in_a[*j] {
                add(npos[*i], npos[*j], m);
            } else {
                let (a, b) = if in_a[*i] { (*i, *j) } else { (*j, *i) };
                add(npos[a], da, m);
                add(db, npos[b], m);
            }
        }
        seam_a.sort_by_key(|s| s.0);
        seam_b.sort_by_key(|s| s.0);
        let mut ra: Vec<(usize, BigUint)> = seam_a.into_iter().rev().map(|(_, o, m)| (o, m)).collect();
        let mut rb: Vec<(usize, BigUint)> = seam_b.into_iter().map(|(_, o, m)| (o, m)).collect();
        let (mut ia, mut ib) = (0, 0);
        while ia < ra.len() && ib < rb.len() {
            let m = ra[ia].1.clone().min(rb[ib].1.clone());
            add(ra[ia].0, rb[ib].0, &m);
            ra[ia].1 -= &m;
            rb[ib].1 -= &m;
            if ra[ia].1 == BigUint::default() {
                ia += 1;
            }
            if rb[ib].1 == BigUint::default() {
                ib += 1;
            }
        }
        if ia < ra.len() || ib < rb.len() {
            return Err(Error::Inconsistent("seam loads differ; input track unbalanced".into()));
        }
        self.labels = new_labels;
        self.chords = out.into_iter().filter(|(_, m)| *m != BigUint::default()).collect();
        Ok(())
    }

    /// Rotates back to the standard polygon of `kind`, after applying an
    /// optional label transposition.
    pub fn restore(mut self, kind: SurfaceKind, swap: Option<(Label, Label)>) -> Result<Vec<(Chord, BigUint)>> {
        if let Some((x, y)) = swap {
            for l in &mut self.labels {
                if l.abs() == x {
                    *l = y * l.signum();
                } else if l.abs() == y {
                    *l = x * l.signum();
                }
            }
        }
        let std = standard_labels(kind);
        let n = std.len();
        let r = self.pos(std[0])?;
        if (0..n).any(|k| self.labels[(k + r) % n] != std[k]) {
            return Err(Error::Inconsistent(format!(
                "move sequence did not return to the standard polygon: {:?}",
                self.labels
            )));
        }
        let mut out: Vec<(Chord, BigUint)> = self
            .chords
            .into_iter()
            .map(|((i, j), m)| (chord((i + n - r) % n, (j + n - r) % n), m))
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Runs a move sequence on a chord system of the standard polygon.
pub(crate) fn run(
    kind: SurfaceKind,
    chords: &[(Chord, BigUint)],
    moves: &[Move],
    swap: Option<(Label, Label)>,
) -> Result<Vec<(Chord, BigUint)>> {
    let mut st = CutState { labels: standard_labels(kind), chords: chords.to_vec() };
    for m in moves {
        st.apply(m)?;
    }
    st.restore(kind, swap)
}
