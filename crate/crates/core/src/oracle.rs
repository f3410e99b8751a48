//! Slow reference checks on fundamental groups, independent of tracks.
//!
//! Free generators are signed codes: on `F_{2g}`, `a_t = 2t-1` and
//! `b_t = 2t`; on `F_n` for braids, `x_i = i`. Negative codes are inverses.
//! A generator word acts left to right: the automorphism of `s_1 ... s_k`
//! is `φ_{s_k} ∘ ... ∘ φ_{s_1}`.

use num_bigint::BigUint;

use crate::braid::ArtinGenerator;
use crate::curves::MultiCurve;
use crate::error::{Error, Result};
use crate::mcg_punctured::{Family, PuncturedGenerator};
use crate::polygon::{PolygonDomain, SurfaceKind};

pub type FreeWord = Vec<i32>;

pub fn reduce(w: &[i32]) -> FreeWord {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> FreeWord {
    w.iter().rev().map(|x| -x).collect()
}

/// Strips matching outer letters; returns (conjugator prefix, core).
pub fn cyclic_core(w: &[i32]) -> (&[i32], &[i32]) {
    let w_len = w.len();
    let mut k = 0;
    while 2 * k + 1 < w_len && w[k] == -w[w_len - 1 - k] {
        k += 1;
    }
    (&w[..k], &w[k..w_len - k])
}

/// Images of the generators `1..=k` of a free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoImages {
    images: Vec<FreeWord>,
}

impl EndoImages {
    pub fn identity(k: usize) -> Self {
        EndoImages { images: (1..=k as i32).map(|x| vec![x]).collect() }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, x: i32) -> &[i32] {
        &self.images[x.unsigned_abs() as usize - 1]
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn apply(&self, w: &[i32]) -> FreeWord {
        let mut out = Vec::new();
        for &x in w {
            let im = self.image(x);
            if x > 0 {
                for &y in im {
                    push_reduced(&mut out, y);
                }
            } else {
                for &y in im.iter().rev() {
                    push_reduced(&mut out, -y);
                }
            }
        }
        out
    }

    /// `other ∘ self`: apply self first, then other.
    pub fn then(&self, other: &EndoImages) -> EndoImages {
        EndoImages { images: self.images.iter().map(|w| other.apply(w)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| w.len() == 1 && w[0] == i as i32 + 1)
    }

    /// Total letters across all images.
    pub fn size(&self) -> usize {
        self.images.iter().map(Vec::len).sum()
    }
}

fn push_reduced(out: &mut FreeWord, y: i32) {
    if out.last() == Some(&-y) {
        out.pop();
    } else {
        out.push(y);
    }
}

/// Builds a twist automorphism: each listed generator `x` maps to
/// `δ^pre · x · δ^post`, with `pre, post ∈ {-1, 0, 1}` recording how the loop
/// of `x` crosses the twist curve. The construction is checked to fix the
/// boundary word and to be invertible.
pub fn twist_images(rank: usize, delta: &[i32], crossing: &[(i32, i32, i32)]) -> Result<EndoImages> {
    let build = |d: &[i32]| -> Result<EndoImages> {
        let mut e = EndoImages::identity(rank);
        let di = inverse(d);
        for &(x, pre, post) in crossing {
            if x < 1 || x as usize > rank || pre.abs() > 1 || post.abs() > 1 {
                return Err(Error::Precondition(format!("bad crossing entry ({x},{pre},{post})")));
            }
            let pick = |s: i32| -> &[i32] {
                match s {
                    1 => d,
                    -1 => &di,
                    _ => &[],
                }
            };
            let mut w = pick(pre).to_vec();
            w.push(x);
            w.extend_from_slice(pick(post));
            e.images[x as usize - 1] = reduce(&w);
        }
        Ok(e)
    };
    let fwd = build(delta)?;
    let back = build(&inverse(delta))?;
    if !fwd.then(&back).is_identity() {
        return Err(Error::Precondition("crossing data does not give an automorphism".into()));
    }
    if rank % 2 == 0 {
        let rel = genus_relator(rank / 2);
        if fwd.apply(&rel) != rel {
            return Err(Error::Precondition("crossing data moves the boundary word".into()));
        }
    }
    Ok(fwd)
}

/// Loop around the vertex class of the genus-g polygon, read off the link:
/// corners `0, next(0), ...`, one letter per edge crossed.
pub fn genus_relator(g: usize) -> FreeWord {
    let d = PolygonDomain::build(SurfaceKind::PuncturedGenus(g.max(2))).expect("g >= 2");
    let d = if g >= 2 { d } else { unreachable!() };
    let mut v = 0;
    let mut rel = Vec::with_capacity(d.len());
    for _ in 0..d.len() {
        rel.push(d.label(v));
        v = d.next_corner(v);
    }
    rel
}

pub fn punctured_images(g: usize, h: PuncturedGenerator) -> EndoImages {
    let t = h.index as i32;
    let (a, b) = (2 * t - 1, 2 * t);
    let rank = 2 * g;
    let (delta, crossing): (Vec<i32>, Vec<(i32, i32, i32)>) = match h.family {
        Family::A => (vec![a], vec![(b, -1, 0)]),
        Family::B => (vec![b], vec![(a, 0, 1)]),
        Family::X => {
            let (a2, b2) = (2 * t + 1, 2 * t + 2);
            (vec![b, a2], vec![(a, 0, 1), (b, -1, 1), (a2, -1, 1), (b2, -1, 0)])
        }
    };
    let delta = if h.inverse { inverse(&delta) } else { delta };
    twist_images(rank, &delta, &crossing).expect("twist crossing data is consistent")
}

pub fn punctured_action(g: usize, word: &[PuncturedGenerator]) -> EndoImages {
    word.iter()
        .fold(EndoImages::identity(2 * g), |acc, &h| acc.then(&punctured_images(g, h)))
}

/// True iff the composite is conjugation by a single element.
pub fn is_inner(e: &EndoImages) -> bool {
    if e.rank() == 0 {
        return true;
    }
    if e.rank() == 1 {
        return e.images[0] == [1];
    }
    let Some(c1) = conjugator_for(e.image(1), 1) else { return false };
    // c = c1 · x1^k for some k; pin k using the second generator.
    let v = reduce(&[inverse(&c1), e.image(2).to_vec(), c1.clone()].concat());
    let mut k = 0usize;
    let s = if v.first() == Some(&1) { 1 } else { -1 };
    while k < v.len() && v[k] == s {
        k += 1;
    }
    let mut c = c1;
    c.extend(std::iter::repeat(s).take(k));
    let c = reduce(&c);
    let ci = inverse(&c);
    (1..=e.rank() as i32).all(|x| reduce(&[c.clone(), vec![x], ci.clone()].concat()) == e.image(x))
}

/// `u` with `w = u x u⁻¹` and `u` not ending in `x^{±1}`, if one exists.
fn conjugator_for(w: &[i32], x: i32) -> Option<FreeWord> {
    let (pre, core) = cyclic_core(w);
    (core == [x]).then(|| pre.to_vec())
}

pub fn punctured_identity_check(g: usize, word: &[PuncturedGenerator]) -> bool {
    is_inner(&punctured_action(g, word))
}

pub fn artin_images(n: usize, s: ArtinGenerator) -> EndoImages {
    let mut e = EndoImages::identity(n);
    let i = s.index as i32;
    let (xi, xj) = (i, i + 1);
    if s.inverse {
        e.images[xi as usize - 1] = vec![xj];
        e.images[xj as usize - 1] = vec![-xj, xi, xj];
    } else {
        e.images[xi as usize - 1] = vec![xi, xj, -xi];
        e.images[xj as usize - 1] = vec![xi];
    }
    e
}

pub fn artin_action(n: usize, word: &[ArtinGenerator]) -> EndoImages {
    word.iter().fold(EndoImages::identity(n), |acc, &s| acc.then(&artin_images(n, s)))
}

pub fn artin_identity_check(n: usize, word: &[ArtinGenerator]) -> bool {
    artin_action(n, word).is_identity()
}

/// Dehn reduction in the closed surface group `⟨a_i, b_i | R⟩`, where `R` is
/// [`genus_relator`]. Every letter occurs once in `R` and once in `R⁻¹`.
#[derive(Debug, Clone)]
pub struct SurfaceGroup {
    rel: FreeWord,
    /// Index of each letter in `R` (slot `x + rank`).
    at: Vec<usize>,
    rank: i32,
}

impl SurfaceGroup {
    pub fn new(g: usize) -> Self {
        let rel = genus_relator(g);
        let rank = 2 * g as i32;
        let mut at = vec![0; 2 * rank as usize + 1];
        for (i, &x) in rel.iter().enumerate() {
            at[(x + rank) as usize] = i;
        }
        SurfaceGroup { rel, at, rank }
    }

    pub fn relator(&self) -> &[i32] {
        &self.rel
    }

    fn n(&self) -> usize {
        self.rel.len()
    }

    /// Cyclic relator `R^{sign}` letter at offset `k` from the start index of
    /// letter `x`.
    fn rel_letter(&self, x: i32, sign: bool, k: usize) -> i32 {
        let n = self.n();
        if sign {
            self.rel[(self.at[(x + self.rank) as usize] + k) % n]
        } else {
            // R⁻¹ read forwards is R read backwards with letters inverted.
            let i = self.at[(-x + self.rank) as usize];
            -self.rel[(i + n - k % n) % n]
        }
    }

    /// If `w` (length `len`) is a cyclic subword of `R^{±1}`, the inverse of
    /// its complement.
    fn complement(&self, w: &[i32]) -> Option<FreeWord> {
        let n = self.n();
        for sign in [true, false] {
            if w.iter().enumerate().all(|(k, &y)| self.rel_letter(w[0], sign, k) == y) {
                let rest: FreeWord = (w.len()..n).map(|k| self.rel_letter(w[0], sign, k)).collect();
                return Some(inverse(&rest));
            }
        }
        None
    }

    /// Linear Dehn reduction: no subword longer than half the relator
    /// survives, and the word is freely reduced.
    pub fn dehn_reduce(&self, w: &[i32]) -> FreeWord {
        let half = self.n() / 2;
        let mut out: FreeWord = Vec::with_capacity(w.len());
        let mut pending: Vec<i32> = w.iter().rev().copied().collect();
        while let Some(x) = pending.pop() {
            if out.last() == Some(&-x) {
                out.pop();
                continue;
            }
            out.push(x);
            if out.len() > half {
                let tail = &out[out.len() - half - 1..];
                if let Some(rep) = self.complement(tail) {
                    out.truncate(out.len() - half - 1);
                    pending.extend(rep.iter().rev());
                }
            }
        }
        out
    }

    /// Cyclic Dehn reduction: also across the wrap point.
    pub fn cyclic_reduce(&self, w: &[i32]) -> FreeWord {
        let half = self.n() / 2;
        let mut cur = self.dehn_reduce(w);
        loop {
            let (_, core) = cyclic_core(&cur);
            let mut core = core.to_vec();
            let k = core.len();
            if k == 0 {
                return core;
            }
            // Look for a long relator piece straddling the end of the word.
            let mut found = None;
            if k > half {
                for s in (k - half)..k {
                    let piece: FreeWord = (0..=half).map(|j| core[(s + j) % k]).collect();
                    if self.complement(&piece).is_some() {
                        found = Some(s);
                        break;
                    }
                }
            }
            match found {
                Some(s) => {
                    core.rotate_left(s);
                    cur = self.dehn_reduce(&core);
                }
                None if core.len() == cur.len() => return core,
                None => cur = core,
            }
        }
    }

    /// Equality in the surface group.
    pub fn equal(&self, u: &[i32], v: &[i32]) -> bool {
        self.dehn_reduce(&[u.to_vec(), inverse(v)].concat()).is_empty()
    }

    /// Position of each outgoing half-edge in the rotation at the single
    /// vertex: the corner between `r_i⁻¹` and `r_{i+1}` is a `+1` step.
    fn rotation(&self) -> Vec<usize> {
        let n = self.n();
        let slot = |x: i32| (x + self.rank) as usize;
        let mut pos = vec![usize::MAX; 2 * self.rank as usize + 1];
        let mut h = self.rel[0];
        for p in 0..n {
            pos[slot(h)] = p;
            // h = r_{i+1}; the next half-edge is r_{i+1}⁻¹'s successor in R.
            let i = self.at[slot(-h)];
            h = self.rel[(i + 1) % n];
        }
        debug_assert!(pos.iter().enumerate().all(|(i, &p)| i == self.rank as usize || p < n));
        pos
    }

    /// Turn from letter `a` into letter `b`, in `0..4g`. Consecutive letters
    /// of `R` turn by 1, of `R⁻¹` by `4g − 1`.
    fn turns(&self, pos: &[usize], w: &[i32]) -> Vec<usize> {
        let n = self.n();
        let k = w.len();
        (0..k)
            .map(|i| {
                let (a, b) = (w[i], w[(i + 1) % k]);
                (pos[(b + self.rank) as usize] + n - pos[(-a + self.rank) as usize]) % n
            })
            .collect()
    }

    /// Replace the first maximal cyclic run of exactly `2g − 1` turns equal
    /// to `t` by the other half of its face. `None` if there is none.
    fn flip_run(&self, pos: &[usize], w: &[i32], t: usize) -> Option<FreeWord> {
        let half = self.n() / 2;
        let k = w.len();
        let tr = self.turns(pos, w);
        let first = (0..k).find(|&i| tr[i] != t)?;
        let mut i = 0;
        while i < k {
            let s = (first + i) % k;
            if tr[s] == t {
                let mut len = 0;
                while len < k && tr[(s + len) % k] == t {
                    len += 1;
                }
                if len == half - 1 {
                    let start = s;
                    let piece: FreeWord = (0..half).map(|j| w[(start + j) % k]).collect();
                    let mut f = self.complement(&piece).expect("run lies on a face");
                    f.extend((half..k).map(|j| w[(start + j) % k]));
                    return Some(f);
                }
                i += len;
            } else {
                i += 1;
            }
        }
        None
    }

    /// Flip every half-run of turn `t` until none is left.
    fn push(&self, pos: &[usize], w: FreeWord, t: usize) -> Result<FreeWord> {
        let mut w = w;
        let cap = 64 + 4 * w.len() * w.len();
        for _ in 0..cap {
            match self.flip_run(pos, &w, t) {
                Some(f) => w = self.cyclic_reduce(&f),
                None => return Ok(w),
            }
        }
        Err(Error::Inconsistent("half-relator pushing did not settle".into()))
    }

    /// A curve running along a closed ring of faces (turns `2, 1^{2g−2}`
    /// repeated) is moved to the other side of the ring.
    fn flip_ring(&self, pos: &[usize], w: &[i32]) -> Result<Option<FreeWord>> {
        let n = self.n();
        let half = n / 2;
        let k = w.len();
        let tr = self.turns(pos, w);
        let Some(z) = tr.iter().position(|&t| t == 2) else { return Ok(None) };
        if k % (half - 1) != 0 || !(0..k).all(|i| tr[(z + 1 + i) % k] == if (i + 1) % (half - 1) == 0 { 2 } else { 1 }) {
            return Ok(None);
        }
        let rot: FreeWord = (0..k).map(|i| w[(z + 1 + i) % k]).collect();
        let mut out = Vec::with_capacity(k);
        for seg in rot.chunks(half - 1) {
            let p = self.at[(seg[0] + self.rank) as usize];
            let far: FreeWord = (half..n - 1).map(|j| self.rel[(p + j) % n]).collect();
            out.extend(inverse(&far));
        }
        // The ring's shared edge in front of the first segment conjugates one
        // side to the other.
        let p = self.at[(rot[0] + self.rank) as usize];
        let e = self.rel[(p + n - 1) % n];
        let ok = [e, -e].iter().any(|&e| self.equal(&[vec![-e], rot.clone(), vec![e]].concat(), &out));
        if !ok {
            return Err(Error::Inconsistent("ring flip is not a conjugation".into()));
        }
        Ok(Some(out))
    }

    /// Canonical representative of the conjugacy class of `w`: a cyclic
    /// geodesic with every half-relator face pushed to the `R⁻¹` side, read
    /// from its least rotation.
    pub fn conjugacy_key(&self, w: &[i32]) -> Result<FreeWord> {
        let pos = self.rotation();
        let (plus, minus) = (1, self.n() - 1);
        let mut w = self.cyclic_reduce(w);
        loop {
            let before = w.len();
            w = self.push(&pos, w, minus)?;
            w = self.push(&pos, w, plus)?;
            if w.len() == before {
                break;
            }
        }
        if let Some(f) = self.flip_ring(&pos, &w)? {
            w = f;
        }
        Ok(min_rotation(&w))
    }

    /// Conjugacy of `u` and `v` in the surface group.
    pub fn conjugate(&self, u: &[i32], v: &[i32]) -> Result<bool> {
        Ok(self.conjugacy_key(u)? == self.conjugacy_key(v)?)
    }
}

/// Least rotation (Booth).
pub fn min_rotation(w: &[i32]) -> FreeWord {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let at = |i: usize| w[i % n];
    let mut fail = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != usize::MAX && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = fail[i];
        }
        if i == usize::MAX && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = usize::MAX;
        } else {
            fail[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    (0..n).map(|i| at(k + i)).collect()
}

/// Components of a multicurve on the closed surface as unoriented
/// conjugacy classes of the surface group, with multiplicities, sorted.
/// Components that die in the closed surface are dropped.
pub fn closed_curve_classes(mc: &MultiCurve) -> Result<Vec<(FreeWord, BigUint)>> {
    let d = mc.domain();
    let sg = SurfaceGroup::new(d.kind().param());
    let mut out: Vec<(FreeWord, BigUint)> = Vec::new();
    for (w, m) in mc.components() {
        let c: FreeWord = w.letters().iter().map(|&p| d.label(p)).collect();
        let key = sg.conjugacy_key(&c)?.min(sg.conjugacy_key(&inverse(&c))?);
        if key.is_empty() {
            continue;
        }
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, n)) => *n += m,
            None => out.push((key, m.clone())),
        }
    }
    out.sort();
    Ok(out)
}

/// Test curves for the closed check: oriented `a_t`, `b_t`, `x_t`. A class
/// preserving each of them commutes with every generator twist, and the
/// center of the closed mapping class group is trivial for g ≥ 3.
pub fn closed_test_curves(g: usize) -> Vec<FreeWord> {
    let mut v = Vec::new();
    for t in 1..=g as i32 {
        v.push(vec![2 * t - 1]);
        v.push(vec![2 * t]);
        if (t as usize) < g {
            v.push(vec![2 * t, 2 * t + 1]);
        }
    }
    v
}

pub const CLOSED_G2_CAVEAT: &str = "closed genus 2 is not supported: there are mapping classes in M_2 \
     which fix all simple closed curves (the hyperelliptic involution)";

pub fn closed_identity_check(g: usize, word: &[PuncturedGenerator]) -> Result<bool> {
    if g < 3 {
        return Err(Error::Unsupported(CLOSED_G2_CAVEAT.into()));
    }
    let phi = punctured_action(g, word);
    let sg = SurfaceGroup::new(g);
    for c in closed_test_curves(g) {
        if !sg.conjugate(&phi.apply(&c), &c)? {
            return Ok(false);
        }
    }
    Ok(true)
}
