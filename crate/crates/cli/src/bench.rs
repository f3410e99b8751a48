//! Benchmark harness: one CSV row per sample, plus log-log slopes.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use mcg_core::braid::BraidWord;
use mcg_core::mcg_punctured::GeneratorWord;
use rayon::prelude::*;

use crate::{gen, CliError, Group, GroupWord, Result};

pub const CSV_HEADER: &str = "group,param,length,seed,micros,verdict,peak_bits";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub group: Group,
    pub param: usize,
    pub length: usize,
    pub seed: u64,
    pub micros: u64,
    pub verdict: String,
    pub peak_bits: u64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.group, self.param, self.length, self.seed, self.micros, self.verdict, self.peak_bits
        )
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub group: Group,
    pub params: Vec<usize>,
    pub lengths: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Timing repetitions per sample; the median is recorded.
    pub reps: usize,
}

/// Seed of one sample, derived from the run seed and its coordinates.
pub fn sample_seed(base: u64, group: Group, param: usize, length: usize, i: usize) -> u64 {
    let mut x = base ^ ((group as u64) << 56) ^ ((param as u64) << 40) ^ ((length as u64) << 16) ^ i as u64;
    // splitmix64 finalizer
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// The uniform word of a sample.
pub fn sample_word(group: Group, param: usize, length: usize, seed: u64) -> Result<GroupWord> {
    let mut rng = gen::rng(seed);
    Ok(match group {
        Group::Braid => GroupWord::Braid(BraidWord::new(param, gen::uniform_braid(&mut rng, param, length))?),
        g => GroupWord::Mcg(g, GeneratorWord::new(param, gen::uniform_mcg(&mut rng, param, length))?),
    })
}

fn run_sample(group: Group, param: usize, length: usize, seed: u64, reps: usize) -> Result<BenchRecord> {
    let w = sample_word(group, param, length, seed)?;
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        let rep = w.solve(false)?;
        times.push(t.elapsed().as_micros() as u64);
        last = Some(rep);
    }
    times.sort_unstable();
    let rep = last.expect("at least one repetition");
    Ok(BenchRecord {
        group,
        param,
        length,
        seed,
        micros: times[times.len() / 2],
        verdict: rep.verdict.to_string(),
        peak_bits: rep.peak_bits,
    })
}

/// Worker count from `WP_THREADS`, else the machine's parallelism.
pub fn threads() -> usize {
    std::env::var("WP_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_bench(spec: &BenchSpec, threads: usize) -> Result<Vec<BenchRecord>> {
    if spec.params.is_empty() || spec.lengths.is_empty() || spec.samples == 0 {
        return Err(CliError::Usage("bench ranges must be nonempty".into()));
    }
    let mut jobs = Vec::new();
    for &p in &spec.params {
        for &l in &spec.lengths {
            for i in 0..spec.samples {
                jobs.push((p, l, sample_seed(spec.seed, spec.group, p, l, i)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| jobs.par_iter().map(|&(p, l, s)| run_sample(spec.group, p, l, s, spec.reps)).collect())
}

pub fn write_csv<W: Write>(out: &mut W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn median(v: &mut [u64]) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2] as f64
    } else {
        (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0
    }
}

/// Median micros per (param, length).
pub fn medians(records: &[BenchRecord]) -> BTreeMap<(usize, usize), f64> {
    let mut groups: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.param, r.length)).or_default().push(r.micros.max(1));
    }
    groups.into_iter().map(|(k, mut v)| (k, median(&mut v))).collect()
}

/// Slope of median time against length, for each parameter.
pub fn slopes_in_length(records: &[BenchRecord]) -> BTreeMap<usize, f64> {
    let med = medians(records);
    let mut by: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (&(p, l), &t) in &med {
        by.entry(p).or_default().push((l as f64, t));
    }
    by.into_iter().filter_map(|(p, pts)| loglog_slope(&pts).map(|s| (p, s))).collect()
}

/// Slope of median time against the parameter, for each length.
pub fn slopes_in_param(records: &[BenchRecord]) -> BTreeMap<usize, f64> {
    let med = medians(records);
    let mut by: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (&(p, l), &t) in &med {
        by.entry(l).or_default().push((p as f64, t));
    }
    by.into_iter().filter_map(|(l, pts)| loglog_slope(&pts).map(|s| (l, s))).collect()
}

/// Largest excess of peak bit-length over `2·|w| + 64`; zero when the bound holds.
pub fn bit_excess(records: &[BenchRecord]) -> u64 {
    records.iter().map(|r| r.peak_bits.saturating_sub(2 * r.length as u64 + 64)).max().unwrap_or(0)
}

pub fn summary(records: &[BenchRecord]) -> String {
    let mut s = String::from("# summary\n");
    for (p, k) in slopes_in_length(records) {
        s.push_str(&format!("slope time~length param={p}: {k:.3}\n"));
    }
    for (l, k) in slopes_in_param(records) {
        s.push_str(&format!("slope time~param length={l}: {k:.3}\n"));
    }
    let peak = records.iter().map(|r| r.peak_bits).max().unwrap_or(0);
    s.push_str(&format!("peak bits: {peak} (excess over 2|w|+64: {})\n", bit_excess(records)));
    s
}

/// `4,8,16`, `4..32` (inclusive) or `64..1024:x2` (geometric).
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Usage(format!("bad range `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = text.split_once("..") {
        let (b, step) = match b.split_once(':') {
            Some((b, st)) => (b, Some(st)),
            None => (b, None),
        };
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        return match step {
            None => Ok((a..=b).collect()),
            Some(st) if st.starts_with('x') => {
                let f = num(&st[1..])?;
                if f < 2 || a == 0 {
                    return Err(bad());
                }
                Ok(std::iter::successors(Some(a), |&x| Some(x * f)).take_while(|&x| x <= b).collect())
            }
            Some(st) => {
                let d = num(st)?;
                if d == 0 {
                    return Err(bad());
                }
                Ok((a..=b).step_by(d).collect())
            }
        };
    }
    let v: Vec<usize> = text.split(',').map(num).collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}
