//! Standard fundamental polygons.
//!
//! Positions are 0-based in clockwise order, and vertex `v` is the start of
//! edge `v`. Edge labels are signed codes: on genus domains `a_t = 2t-1` and
//! `b_t = 2t`; on the punctured sphere `a_i = i`. A negative code is the
//! inverse letter.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Label = i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    PuncturedGenus(usize),
    SpherePunctures(usize),
    ClosedGenus(usize),
}

impl SurfaceKind {
    pub fn param(&self) -> usize {
        match *self {
            SurfaceKind::PuncturedGenus(g) | SurfaceKind::ClosedGenus(g) => g,
            SurfaceKind::SpherePunctures(n) => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::PuncturedGenus(_) => "punctured",
            SurfaceKind::SpherePunctures(_) => "sphere",
            SurfaceKind::ClosedGenus(_) => "closed",
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, SurfaceKind::SpherePunctures(_))
    }

    pub fn from_name(name: &str, param: usize) -> Result<SurfaceKind> {
        match name {
            "punctured" => Ok(SurfaceKind::PuncturedGenus(param)),
            "sphere" => Ok(SurfaceKind::SpherePunctures(param)),
            "closed" => Ok(SurfaceKind::ClosedGenus(param)),
            _ => Err(Error::Parse(format!("unknown domain kind `{name}`"))),
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name(), self.param())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonDomain {
    kind: SurfaceKind,
    labels: Vec<Label>,
    pair: Vec<usize>,
}

pub type Domain = Arc<PolygonDomain>;

/// Standard label sequence for a kind, without bound checks.
pub(crate) fn standard_labels(kind: SurfaceKind) -> Vec<Label> {
    let mut labels = Vec::new();
    match kind {
        SurfaceKind::PuncturedGenus(g) | SurfaceKind::ClosedGenus(g) => {
            for t in 1..=g as Label {
                labels.extend([2 * t - 1, 2 * t, -(2 * t - 1), -2 * t]);
            }
        }
        SurfaceKind::SpherePunctures(n) => {
            for i in 1..=n as Label {
                labels.extend([i, -i]);
            }
        }
    }
    labels
}

impl PolygonDomain {
    pub fn build(kind: SurfaceKind) -> Result<PolygonDomain> {
        match kind {
            SurfaceKind::PuncturedGenus(g) | SurfaceKind::ClosedGenus(g) if g < 2 => {
                return Err(Error::Parameter(format!("genus must satisfy g >= 2, got g = {g}")))
            }
            SurfaceKind::SpherePunctures(n) if n < 3 => {
                return Err(Error::Parameter(format!(
                    "puncture count must satisfy n >= 3, got n = {n}"
                )))
            }
            _ => {}
        }
        let labels = standard_labels(kind);
        let pair = labels
            .iter()
            .map(|&l| labels.iter().position(|&m| m == -l).unwrap())
            .collect();
        Ok(PolygonDomain { kind, labels, pair })
    }

    pub fn shared(kind: SurfaceKind) -> Result<Domain> {
        Ok(Arc::new(Self::build(kind)?))
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Number of edges |E|.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// m = |E| / 2.
    pub fn m(&self) -> usize {
        self.labels.len() / 2
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn pair(&self, p: usize) -> usize {
        self.pair[p]
    }

    pub fn label(&self, p: usize) -> Label {
        self.labels[p]
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn are_consecutive(&self, i: usize, j: usize) -> bool {
        let n = self.len();
        (i + 1) % n == j || (j + 1) % n == i
    }

    /// Next corner around the vertex class: crossing edge `v` near its start
    /// lands at the end of `pair(v)`, i.e. at corner `pair(v) + 1`.
    pub fn next_corner(&self, v: usize) -> usize {
        (self.pair[v] + 1) % self.len()
    }

    pub fn prev_corner(&self, v: usize) -> usize {
        let n = self.len();
        self.pair[(v + n - 1) % n]
    }

    /// Puncture index of a vertex on the sphere polygon: `Some(i)` for P_i,
    /// `Some(0)` for the remaining vertices. `None` on genus domains, where
    /// every vertex is the single puncture P.
    pub fn sphere_puncture(&self, v: usize) -> Option<usize> {
        match self.kind {
            SurfaceKind::SpherePunctures(_) if v % 2 == 1 => Some(v / 2 + 1),
            SurfaceKind::SpherePunctures(_) => Some(0),
            _ => None,
        }
    }

    pub fn label_text(&self, label: Label) -> String {
        label_text(self.kind, label)
    }

    pub fn edge_label(&self, p: usize) -> String {
        self.label_text(self.labels[p])
    }

    pub fn parse_label(&self, text: &str) -> Result<usize> {
        let label = parse_label(self.kind, text)?;
        self.position(label)
            .ok_or_else(|| Error::Parse(format!("label `{text}` not on domain {}", self.kind)))
    }
}

pub fn label_text(kind: SurfaceKind, label: Label) -> String {
    let c = label.unsigned_abs() as usize;
    let (letter, idx) = match kind {
        SurfaceKind::SpherePunctures(_) => ('a', c),
        _ if c % 2 == 1 => ('a', c.div_ceil(2)),
        _ => ('b', c / 2),
    };
    let letter = if label < 0 { letter.to_ascii_uppercase() } else { letter };
    format!("{letter}{idx}")
}

pub fn parse_label(kind: SurfaceKind, text: &str) -> Result<Label> {
    let bad = || Error::Parse(format!("bad edge label `{text}`"));
    let mut chars = text.chars();
    let head = chars.next().ok_or_else(bad)?;
    let idx: Label = chars.as_str().parse().map_err(|_| bad())?;
    if idx < 1 || !chars.as_str().bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let code = match (kind, head.to_ascii_lowercase()) {
        (SurfaceKind::SpherePunctures(_), 'a') => idx,
        (SurfaceKind::SpherePunctures(_), _) => return Err(bad()),
        (_, 'a') => 2 * idx - 1,
        (_, 'b') => 2 * idx,
        _ => return Err(bad()),
    };
    Ok(if head.is_ascii_uppercase() { -code } else { code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let d = PolygonDomain::build(SurfaceKind::PuncturedGenus(2)).unwrap();
        assert_eq!(d.len(), 8);
        assert_eq!((d.pair(0), d.pair(1)), (2, 3));
        assert_eq!(d.edge_label(4), "a2");
        let s = PolygonDomain::build(SurfaceKind::SpherePunctures(3)).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.pair(0), 1);
        assert_eq!(s.parse_label("A2").unwrap(), 3);
        let c = PolygonDomain::build(SurfaceKind::ClosedGenus(3)).unwrap();
        assert_eq!(c.edge_label(11), "B3");
    }

    #[test]
    fn pairing_is_fixed_point_free_involution() {
        for kind in [
            SurfaceKind::PuncturedGenus(4),
            SurfaceKind::SpherePunctures(7),
            SurfaceKind::ClosedGenus(3),
        ] {
            let d = PolygonDomain::build(kind).unwrap();
            for p in 0..d.len() {
                assert_ne!(d.pair(p), p);
                assert_eq!(d.pair(d.pair(p)), p);
                assert_eq!(d.label(d.pair(p)), -d.label(p));
            }
        }
    }

    #[test]
    fn bounds() {
        assert!(PolygonDomain::build(SurfaceKind::PuncturedGenus(1)).is_err());
        assert!(PolygonDomain::build(SurfaceKind::SpherePunctures(2)).is_err());
        let err = PolygonDomain::build(SurfaceKind::ClosedGenus(0)).unwrap_err();
        assert!(err.to_string().contains("g >= 2"));
    }

    #[test]
    fn consecutive() {
        let d = PolygonDomain::build(SurfaceKind::PuncturedGenus(2)).unwrap();
        assert!(d.are_consecutive(3, 4));
        assert!(d.are_consecutive(7, 0));
        assert!(!d.are_consecutive(0, 2));
    }

    #[test]
    fn corners_cycle_through_all_vertices() {
        let d = PolygonDomain::build(SurfaceKind::ClosedGenus(3)).unwrap();
        let mut v = 0;
        let mut seen = vec![false; d.len()];
        for _ in 0..d.len() {
            assert!(!seen[v]);
            seen[v] = true;
            assert_eq!(d.prev_corner(d.next_corner(v)), v);
            v = d.next_corner(v);
        }
        assert_eq!(v, 0);
    }

    #[test]
    fn label_round_trip() {
        for kind in [SurfaceKind::PuncturedGenus(3), SurfaceKind::SpherePunctures(5)] {
            let d = PolygonDomain::build(kind).unwrap();
            for p in 0..d.len() {
                assert_eq!(d.parse_label(&d.edge_label(p)).unwrap(), p);
            }
        }
        let d = PolygonDomain::build(SurfaceKind::PuncturedGenus(2)).unwrap();
        assert!(d.parse_label("c1").is_err());
        assert!(d.parse_label("a3").is_err());
        assert!(d.parse_label("a0").is_err());
    }
}
