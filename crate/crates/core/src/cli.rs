//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input/usage/IO error, 2 instance too large for
//! the chosen solver (memory budget or brute-force limit), 3 unknown
//! algorithm, 4 exact solver disagreed with the brute-force cross-check.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::approx::{borda, borda_tally, heuristic_kemeny};
use crate::error::Error;
use crate::exact::{
    brute_force_kemeny, compute_rank_windows, count_table_keys, dp_kemeny, estimate_table_size,
    implementation_table_bytes, DEFAULT_MEMORY_BUDGET,
};
use crate::harness::{
    generate_correlated_profile, generate_random_profile, run_experiment, Algorithm, DatasetKind,
    ExperimentConfig, GeneratorConfig,
};
use crate::metrics::{
    average_kt_distance, average_ranks, closest_rankings, format_ratio, majority_lower_bound,
    pairwise_distances, Score,
};
use crate::model::{build_preference_graph, Profile, Ranking};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TOO_LARGE: i32 = 2;
pub const EXIT_UNKNOWN_ALGORITHM: i32 = 3;
pub const EXIT_CROSS_CHECK: i32 = 4;

/// Largest instance on which `aggregate --algorithm dp` re-solves by
/// exhaustive search and compares scores.
pub const CROSS_CHECK_MAX_CANDIDATES: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "kemeny", version, about = "Kemeny rank aggregation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate a profile file into a consensus ranking
    Aggregate(AggregateArgs),
    /// Print distance statistics and the preference graph of a profile
    Stats(StatsArgs),
    /// Generate a synthetic profile file
    Gen(GenArgs),
    /// Run a seeded multi-trial benchmark sweep
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// dp, brute, heuristic or borda
    #[arg(long, default_value = "dp")]
    pub algorithm: String,
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget_bytes: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// random, or correlated (base ranking plus adjacent-swap noise)
    pub kind: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub noise_swaps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset kinds: random, same, diff, correlated:K
    #[arg(long, value_delimiter = ',', default_value = "same,diff,random")]
    pub kinds: Vec<String>,
    #[arg(long = "m-list", value_delimiter = ',', default_value = "6,8,10,12")]
    pub m_list: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Algorithms to compare
    #[arg(long, value_delimiter = ',', default_value = "borda,heuristic,dp")]
    pub algorithm: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Agents per profile
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget_bytes: u64,
    /// Write the comma-separated report here
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Replace wall times with '-' so reruns produce identical files
    #[arg(long)]
    pub omit_timing: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Aggregate(a) => aggregate(&a, out, err),
        Command::Stats(a) => stats(&a, out),
        Command::Gen(a) => gen(&a, out),
        Command::Bench(a) => bench(&a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MemoryBudgetExceeded { .. } | Error::InstanceTooLarge { .. } => EXIT_TOO_LARGE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn read_profile(path: &Path) -> std::result::Result<Profile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    Profile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_algorithm(name: &str) -> std::result::Result<Algorithm, Failure> {
    name.parse().map_err(|message| Failure {
        code: EXIT_UNKNOWN_ALGORITHM,
        message,
    })
}

fn aggregate(args: &AggregateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let algorithm = parse_algorithm(&args.algorithm)?;
    let profile = read_profile(&args.input)?;
    let param = average_kt_distance(&profile);

    let mut stats_lines = Vec::new();
    let (consensus, score, elapsed): (Ranking, Score, _) = match algorithm {
        Algorithm::Dp => {
            let res = dp_kemeny(&profile, args.memory_budget_bytes)?;
            stats_lines.push(format!("table_entries: {}", res.stats.table_entries));
            stats_lines.push(format!("estimated_bytes: {}", res.stats.estimated_bytes));
            stats_lines.push(format!("table_bytes: {}", res.stats.table_bytes));
            if let Some(w) = res.stats.max_window {
                stats_lines.push(format!("max_window: {w}"));
            }
            if profile.m() <= CROSS_CHECK_MAX_CANDIDATES {
                let brute = brute_force_kemeny(&profile)?;
                if brute.score != res.score {
                    return Err(Failure {
                        code: EXIT_CROSS_CHECK,
                        message: format!(
                            "dp score {} disagrees with exhaustive search score {}",
                            res.score, brute.score
                        ),
                    });
                }
                stats_lines.push(format!("cross_check: brute {} ok", brute.score));
            }
            (res.consensus, res.score, res.stats.elapsed)
        }
        Algorithm::Brute => {
            let res = brute_force_kemeny(&profile)?;
            (res.consensus, res.score, res.stats.elapsed)
        }
        Algorithm::Heuristic => {
            let start = std::time::Instant::now();
            let (r, s) = heuristic_kemeny(&profile);
            (r, s, start.elapsed())
        }
        Algorithm::Borda => {
            let start = std::time::Instant::now();
            let (r, s) = borda(&profile);
            let tally = borda_tally(&profile);
            let points: Vec<String> = r.order().iter().map(|&u| tally.0[u].to_string()).collect();
            stats_lines.push(format!("borda_points: {}", points.join(",")));
            (r, s, start.elapsed())
        }
    };

    let closest = closest_rankings(&profile, &consensus)?;
    writeln!(out, "algorithm: {algorithm}")?;
    writeln!(out, "candidates: {}", profile.m())?;
    writeln!(out, "rankings: {}", profile.n())?;
    writeln!(out, "consensus: {}", profile.format_ranking(&consensus, ","))?;
    writeln!(out, "score: {score}")?;
    writeln!(out, "d_ave: {}", format_ratio(param.d_ave))?;
    writeln!(out, "d: {}", param.d)?;
    for line in stats_lines {
        writeln!(out, "{line}")?;
    }
    if let Some(&(index, _)) = closest.first() {
        writeln!(out, "closest_index: {index}")?;
    }
    writeln!(out, "closest:")?;
    writeln!(out, "index,distance,ranking")?;
    for (index, dist) in closest {
        let r = &profile.rankings()[index];
        writeln!(out, "{index},{dist},{}", profile.format_ranking(r, " > "))?;
    }
    writeln!(err, "solved in {:.3} ms", elapsed.as_secs_f64() * 1e3)?;
    Ok(())
}

fn stats(args: &StatsArgs, out: &mut dyn Write) -> CmdResult {
    let profile = read_profile(&args.input)?;
    let m = profile.m();
    let param = average_kt_distance(&profile);
    let g = build_preference_graph(&profile);
    let width = profile
        .candidates()
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(1)
        .max(3);

    writeln!(out, "candidates: {m}")?;
    writeln!(out, "rankings: {}", profile.n())?;
    writeln!(out, "average_ranks:")?;
    for (u, r) in average_ranks(&profile).iter().enumerate() {
        writeln!(
            out,
            "  {:<width$}  {:>7}  {:.4}",
            profile.name(u),
            format_ratio(r.value()),
            r.to_f64()
        )?;
    }
    writeln!(out, "kendall_tau_matrix:")?;
    for row in pairwise_distances(&profile) {
        let cells: Vec<String> = row.iter().map(|s| format!("{:>4}", s.0)).collect();
        writeln!(out, " {}", cells.join(""))?;
    }
    writeln!(out, "d_ave: {}", format_ratio(param.d_ave))?;
    writeln!(out, "d_ave_decimal: {:.4}", param.d_ave_f64())?;
    writeln!(out, "d: {}", param.d)?;
    writeln!(out, "preference_graph:")?;
    let header: Vec<String> = (0..m)
        .map(|v| format!("{:>width$}", profile.name(v)))
        .collect();
    writeln!(out, "  {:<width$}  {}", "", header.join("  "))?;
    for u in 0..m {
        let cells: Vec<String> = g.row(u).iter().map(|w| format!("{w:>width$}")).collect();
        writeln!(out, "  {:<width$}  {}", profile.name(u), cells.join("  "))?;
    }
    writeln!(out, "majority_lower_bound: {}", majority_lower_bound(&g))?;
    writeln!(out, "estimated_table_bytes: {}", estimate_table_size(m, param.d))?;
    if param.d > 0 {
        let windows = compute_rank_windows(&profile)?;
        writeln!(out, "max_window: {}", windows.max_width())?;
        writeln!(out, "table_keys: {}", count_table_keys(&windows))?;
        writeln!(out, "implementation_table_bytes: {}", implementation_table_bytes(&windows))?;
    }
    Ok(())
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> CmdResult {
    if args.m == 0 || args.n == 0 {
        return Err(Failure::input("--m and --n must be at least 1"));
    }
    if args.m > crate::set::MAX_CANDIDATES {
        return Err(Error::TooManyCandidates {
            m: args.m,
            max: crate::set::MAX_CANDIDATES,
        }
        .into());
    }
    let (profile, header) = match args.kind.as_str() {
        "random" => (
            generate_random_profile(args.m, args.n, args.seed),
            format!("# random m={} n={} seed={}", args.m, args.n, args.seed),
        ),
        "correlated" => (
            generate_correlated_profile(&GeneratorConfig {
                m: args.m,
                n: args.n,
                noise_swaps: args.noise_swaps,
                seed: args.seed,
            }),
            format!(
                "# correlated m={} n={} noise_swaps={} seed={}",
                args.m, args.n, args.noise_swaps, args.seed
            ),
        ),
        other => {
            return Err(Failure::input(format!(
                "unknown profile kind {other:?} (expected random or correlated)"
            )))
        }
    };
    let text = format!("{header}\n{}", profile.to_text());
    match &args.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let algorithms = args
        .algorithm
        .iter()
        .map(|a| parse_algorithm(a))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let kinds = args
        .kinds
        .iter()
        .map(|k| k.parse::<DatasetKind>().map_err(Failure::input))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if args.n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    let config = ExperimentConfig {
        kinds,
        m_values: args.m_list.clone(),
        trials: args.trials,
        algorithms,
        seed: args.seed,
        n: args.n,
        memory_budget: args.memory_budget_bytes,
        ..ExperimentConfig::default()
    };
    if let Some(&m) = config.m_values.iter().find(|&&m| m == 0) {
        return Err(Failure::input(format!("invalid m value {m}")));
    }
    let report = run_experiment(&config)?;
    let with_timing = !args.omit_timing;
    if let Some(path) = &args.output {
        fs::write(path, report.to_csv(with_timing))
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    out.write_all(report.to_text(with_timing).as_bytes())?;
    let violations = report.ordering_violations();
    if !violations.is_empty() {
        writeln!(err, "warning: {} trials broke dp <= heuristic <= borda", violations.len())?;
    }
    Ok(())
}
