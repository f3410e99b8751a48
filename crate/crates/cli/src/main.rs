use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mcg_core::polygon::SurfaceKind;
use mcgwp::bench::{self, BenchSpec};
use mcgwp::{exit_code, solve_checked, trace_lines, track_to_words, words_to_track, CliError, Group, GroupWord};

#[derive(Parser)]
#[command(name = "mcgwp", version, about = "Word problems in braid groups and surface mapping class groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a word is the identity (exit 0) or not (exit 1).
    Solve {
        #[arg(long, value_enum)]
        group: Group,
        /// Strand count (braid).
        #[arg(long)]
        n: Option<usize>,
        /// Genus (punctured, closed).
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, conflicts_with = "word_file")]
        word: Option<String>,
        #[arg(long)]
        word_file: Option<PathBuf>,
        /// Print T, n(ν) and timings after every generator.
        #[arg(long)]
        trace: bool,
        /// Also run the slow oracle; disagreement is an error.
        #[arg(long)]
        oracle: bool,
    },
    /// Time the solver on seeded uniform words and write CSV.
    Bench {
        #[arg(long, value_enum)]
        group: Group,
        /// Parameter range: `6`, `4,8,16`, `4..32` or `4..32:x2`.
        #[arg(long)]
        param: String,
        #[arg(long, default_value = "64..1024:x2")]
        lengths: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// CSV destination; `-` for stdout.
        #[arg(long, short, default_value = "-")]
        output: String,
    },
    /// Convert between multicurve word files and track files.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        /// Surface of a word file: `punctured`, `sphere` or `closed`.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        param: Option<usize>,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short, default_value = "-")]
        output: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Track,
    Words,
}

fn emit(dest: &str, text: &str) -> io::Result<()> {
    if dest == "-" {
        io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(dest, text)
    }
}

fn run(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Solve { group, n, g, word, word_file, trace, oracle } => {
            let param = match group {
                Group::Braid => n.or(g),
                _ => g.or(n),
            }
            .ok_or_else(|| CliError::Usage("missing --n / --g".into()))?;
            let text = match (word, word_file) {
                (Some(w), _) => w,
                (None, Some(f)) => fs::read_to_string(f)?,
                (None, None) => return Err(CliError::Usage("missing --word or --word-file".into())),
            };
            let w = GroupWord::parse(group, param, &text)?;
            let rep = solve_checked(&w, trace, oracle)?;
            for line in trace_lines(&rep) {
                println!("{line}");
            }
            println!("{}", rep.verdict);
            if let Some(c) = &rep.caveat {
                println!("caveat: {c}");
            }
            if oracle {
                println!("oracle agrees");
            }
            Ok(exit_code(rep.verdict))
        }
        Cmd::Bench { group, param, lengths, samples, seed, reps, output } => {
            let spec = BenchSpec {
                group,
                params: bench::parse_range(&param)?,
                lengths: bench::parse_range(&lengths)?,
                samples,
                seed,
                reps,
            };
            let records = bench::run_bench(&spec, bench::threads())?;
            let mut csv = Vec::new();
            bench::write_csv(&mut csv, &records)?;
            emit(&output, &String::from_utf8_lossy(&csv))?;
            eprint!("{}", bench::summary(&records));
            Ok(0)
        }
        Cmd::Convert { to, kind, param, input, output } => {
            let text = fs::read_to_string(&input)?;
            let out = match to {
                Target::Words => track_to_words(&text)?,
                Target::Track => {
                    let (Some(k), Some(p)) = (kind, param) else {
                        return Err(CliError::Usage("word files need --kind and --param".into()));
                    };
                    words_to_track(SurfaceKind::from_name(&k, p)?, &text)?
                }
            };
            emit(&output, &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
