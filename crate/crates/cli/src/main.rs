use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hialcs::hia::SampleRate;
use hialcs::lcs::EngineChoice;
use hialcs_cli::verify::{hia_suite, lcs_suite, HiaSuiteConfig, LcsSuiteConfig};
use hialcs_cli::{run_query, IndexContainer, IndexStats};

const USAGE: u8 = 1;
const DATA: u8 = 2;
const VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "hialcs", version, about = "Longest common substring queries over LZ77-indexed text")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Baseline,
    Skyline,
    Sampled,
}

impl EngineKind {
    fn name(self) -> &'static str {
        match self {
            EngineKind::Baseline => "baseline",
            EngineKind::Skyline => "skyline",
            EngineKind::Sampled => "sampled",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Index a text file.
    Build {
        text: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Engine tables to store; may be repeated.
        #[arg(long, value_enum, default_values_t = [EngineKind::Skyline])]
        engine: Vec<EngineKind>,
        /// Sample rate for the sampled engine (default ⌈log₂ n⌉).
        #[arg(long)]
        sample_rate: Option<usize>,
    },
    /// Longest common substring of a pattern and the indexed text.
    Query {
        index: PathBuf,
        #[arg(short, long, required_unless_present = "pattern_file", conflicts_with = "pattern_file")]
        pattern: Option<String>,
        /// File with one pattern per line.
        #[arg(short = 'f', long)]
        pattern_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EngineKind::Skyline)]
        engine: EngineKind,
        #[arg(long)]
        sample_rate: Option<usize>,
        #[arg(long)]
        json: bool,
        /// Also print the best value found at every split of the pattern.
        #[arg(long)]
        verbose_splits: bool,
    },
    /// Run the randomized oracle suites.
    Verify {
        /// Overridden by HIALCS_SEED when set.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8, 16, 32, 64, 128, 256])]
        sizes: Vec<usize>,
        /// Tree pairs per size.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Queries per tree pair.
        #[arg(long, default_value_t = 200)]
        queries: usize,
        /// Text/pattern instances per alphabet.
        #[arg(long, default_value_t = 30)]
        lcs_trials: usize,
        #[arg(long, default_value_t = 2000)]
        max_text: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Print structure sizes of an index.
    Stats { index: PathBuf },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn rate(arg: Option<usize>) -> Result<Option<SampleRate>, ExitCode> {
    match arg {
        None => Ok(None),
        Some(b) => SampleRate::new(b)
            .map(Some)
            .ok_or_else(|| fail(USAGE, "sample rate must be at least 1")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match cli.cmd {
        Cmd::Build { text, out, engine, sample_rate } => build(text, out, engine, sample_rate),
        Cmd::Query { index, pattern, pattern_file, engine, sample_rate, json, verbose_splits } => {
            query(index, pattern, pattern_file, engine, sample_rate, json, verbose_splits)
        }
        Cmd::Verify { seed, sizes, trials, queries, lcs_trials, max_text, inject_fault } => {
            let seed = match std::env::var("HIALCS_SEED") {
                Ok(s) => match s.trim().parse() {
                    Ok(v) => v,
                    Err(_) => return fail(USAGE, format!("HIALCS_SEED is not an integer: {s:?}")),
                },
                Err(_) => seed,
            };
            verify(seed, sizes, trials, queries, lcs_trials, max_text, inject_fault)
        }
        Cmd::Stats { index } => match IndexContainer::load(&index) {
            Ok(c) => {
                print!("{}", IndexStats::of(&c).to_text());
                ExitCode::SUCCESS
            }
            Err(e) => fail(DATA, format!("{}: {e}", index.display())),
        },
    }
}

fn build(text: PathBuf, out: PathBuf, engines: Vec<EngineKind>, sample_rate: Option<usize>) -> ExitCode {
    let sample_rate = match rate(sample_rate) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let bytes = match fs::read(&text) {
        Ok(b) => b,
        Err(e) => return fail(DATA, format!("{}: {e}", text.display())),
    };
    if bytes.is_empty() {
        return fail(DATA, format!("{}: input is empty", text.display()));
    }
    let mut c = match IndexContainer::build(bytes, &[]) {
        Ok(c) => c,
        Err(e) => return fail(DATA, e),
    };
    let n = c.index().parse().len();
    for e in engines {
        c.add_engine(match e {
            EngineKind::Baseline => EngineChoice::Baseline,
            EngineKind::Skyline => EngineChoice::Skyline,
            EngineKind::Sampled => EngineChoice::Sampled(sample_rate.unwrap_or_else(|| SampleRate::log(n))),
        });
    }
    if let Err(e) = c.save(&out) {
        return fail(DATA, format!("{}: {e}", out.display()));
    }
    print!("{}", IndexStats::of(&c).to_text());
    ExitCode::SUCCESS
}

fn query(
    index: PathBuf,
    pattern: Option<String>,
    pattern_file: Option<PathBuf>,
    engine: EngineKind,
    sample_rate: Option<usize>,
    json: bool,
    verbose_splits: bool,
) -> ExitCode {
    let sample_rate = match rate(sample_rate) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let c = match IndexContainer::load(&index) {
        Ok(c) => c,
        Err(e) => return fail(DATA, format!("{}: {e}", index.display())),
    };
    let patterns: Vec<Vec<u8>> = match (pattern, pattern_file) {
        (Some(p), _) => vec![p.into_bytes()],
        (None, Some(f)) => match fs::read(&f) {
            Ok(b) => b
                .split(|&x| x == b'\n')
                .map(|l| l.strip_suffix(b"\r").unwrap_or(l).to_vec())
                .filter(|l| !l.is_empty())
                .collect(),
            Err(e) => return fail(DATA, format!("{}: {e}", f.display())),
        },
        (None, None) => return fail(USAGE, "no pattern given"),
    };
    if patterns.is_empty() {
        return fail(DATA, "no pattern given");
    }
    let engine = c
        .engine(engine.name(), sample_rate)
        .expect("engine names come from the value enum");
    let reports: Vec<_> = patterns
        .par_iter()
        .map(|p| run_query(c.index(), &engine, p, verbose_splits))
        .collect();
    let many = reports.len() > 1;
    for r in reports {
        match r {
            Ok(r) if json => println!("{}", r.to_json()),
            Ok(r) => {
                print!("{}", r.to_text());
                if many {
                    println!();
                }
            }
            Err(e) => return fail(DATA, e),
        }
    }
    ExitCode::SUCCESS
}

fn verify(
    seed: u64,
    sizes: Vec<usize>,
    trials: usize,
    queries: usize,
    lcs_trials: usize,
    max_text: usize,
    inject_fault: bool,
) -> ExitCode {
    if sizes.contains(&0) || max_text == 0 {
        return fail(USAGE, "sizes and text lengths must be positive");
    }
    let hia = hia_suite(&HiaSuiteConfig { seed, sizes, trials, queries, inject_fault });
    println!(
        "hia: {} instances, {} queries, {} mismatches, max skyline ratio {:.4}, max path-pair visits {}",
        hia.instances, hia.queries, hia.mismatch_count, hia.max_skyline_ratio, hia.max_visits
    );
    println!(
        "hia bounds: skyline {} violations, probes {} violations, visits {} violations",
        hia.skyline_bound_violations, hia.probe_bound_violations, hia.visit_bound_violations
    );
    let lcs = lcs_suite(&LcsSuiteConfig {
        seed,
        trials: lcs_trials,
        max_text,
        max_pattern: 200,
        alphabets: vec![2, 4, 26],
    });
    println!("lcs: {} instances, {} mismatches", lcs.instances, lcs.mismatch_count);
    for m in hia.mismatches.iter().chain(&lcs.mismatches) {
        println!("reproducer: {m}");
    }
    if hia.passed() && lcs.passed() {
        println!("ok");
        ExitCode::SUCCESS
    } else {
        println!("FAILED");
        ExitCode::from(VERIFY_FAILED)
    }
}
