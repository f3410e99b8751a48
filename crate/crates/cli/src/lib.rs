pub mod bench;
pub mod gen;

use std::fmt;
use std::str::FromStr;

use mcg_core::braid::{solve_braid, BraidWord};
use mcg_core::closed::solve_closed;
use mcg_core::curves::{multicurve_from_track, track_from_multicurve, MultiCurve};
use mcg_core::mcg_punctured::{solve, GeneratorWord, SolveReport, Verdict};
use mcg_core::oracle::{artin_identity_check, closed_identity_check, punctured_identity_check};
use mcg_core::polygon::{PolygonDomain, SurfaceKind};
use mcg_core::tracks::MeasuredTrainTrack;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mcg_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("oracle disagrees: solver says {solver}, oracle says {oracle}")]
    OracleDisagrees { solver: Verdict, oracle: Verdict },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Group {
    Braid,
    Punctured,
    Closed,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Braid => "braid",
            Group::Punctured => "punctured",
            Group::Closed => "closed",
        })
    }
}

impl FromStr for Group {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "braid" => Ok(Group::Braid),
            "punctured" => Ok(Group::Punctured),
            "closed" => Ok(Group::Closed),
            _ => Err(CliError::Usage(format!("unknown group `{s}`"))),
        }
    }
}

/// A parsed word for one of the three groups.
#[derive(Debug, Clone)]
pub enum GroupWord {
    Braid(BraidWord),
    Mcg(Group, GeneratorWord),
}

impl GroupWord {
    pub fn parse(group: Group, param: usize, text: &str) -> Result<Self> {
        Ok(match group {
            Group::Braid => GroupWord::Braid(BraidWord::parse(param, text)?),
            g => GroupWord::Mcg(g, GeneratorWord::parse(param, text)?),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            GroupWord::Braid(w) => w.len(),
            GroupWord::Mcg(_, w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn solve(&self, trace: bool) -> Result<SolveReport> {
        Ok(match self {
            GroupWord::Braid(w) => solve_braid(w, trace)?,
            GroupWord::Mcg(Group::Closed, w) => solve_closed(w, trace)?,
            GroupWord::Mcg(_, w) => solve(w, trace)?,
        })
    }

    pub fn oracle(&self) -> Result<Verdict> {
        let id = match self {
            GroupWord::Braid(w) => artin_identity_check(w.n, &w.gens),
            GroupWord::Mcg(Group::Closed, w) => closed_identity_check(w.g, &w.gens)?,
            GroupWord::Mcg(_, w) => punctured_identity_check(w.g, &w.gens),
        };
        Ok(if id { Verdict::Identity } else { Verdict::NonIdentity })
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Braid(w) => w.fmt(f),
            GroupWord::Mcg(_, w) => w.fmt(f),
        }
    }
}

/// Solve, optionally cross-checking with the oracle. Disagreement is an error.
pub fn solve_checked(word: &GroupWord, trace: bool, oracle: bool) -> Result<SolveReport> {
    let rep = word.solve(trace)?;
    if oracle {
        let o = word.oracle()?;
        if o != rep.verdict {
            return Err(CliError::OracleDisagrees { solver: rep.verdict, oracle: o });
        }
    }
    Ok(rep)
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Identity => 0,
        Verdict::NonIdentity => 1,
    }
}

pub fn trace_lines(rep: &SolveReport) -> Vec<String> {
    rep.trace
        .iter()
        .map(|t| {
            let totals: Vec<String> = t.totals.iter().map(|x| x.to_string()).collect();
            let mut line = format!("step {} {} T=[{}] t={}us", t.step, t.generator, totals.join(","), t.micros);
            if !t.note.is_empty() {
                line.push(' ');
                line.push_str(&t.note);
            }
            line
        })
        .collect()
}

/// Multicurve file (`mult: word` lines) to track file.
pub fn words_to_track(kind: SurfaceKind, text: &str) -> Result<String> {
    let domain = PolygonDomain::shared(kind)?;
    let mc = MultiCurve::from_text(domain, text)?;
    Ok(track_from_multicurve(&mc)?.to_text())
}

/// Track file to multicurve file.
pub fn track_to_words(text: &str) -> Result<String> {
    let tt = MeasuredTrainTrack::from_text(text)?;
    Ok(multicurve_from_track(&tt)?.to_text())
}
