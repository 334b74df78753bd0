//! Synthetic profile generators and the multi-trial experiment runner.
//!
//! Three dataset kinds are available. `random` draws every agent's ranking
//! uniformly. `correlated(k)` perturbs one seeded base ranking with `k`
//! random adjacent transpositions per agent; small `k` gives closely agreeing
//! agents (`same`, k = 2) and larger `k` looser agreement (`diff`, k = 8).
//!
//! [`run_experiment`] builds one 40-candidate pool profile per (kind, m),
//! then for every trial keeps a random `m`-subset of the candidates and runs
//! each algorithm on the same restricted profile. Only the subsample varies
//! between trials.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{borda, heuristic_kemeny};
use crate::error::{Error, Result};
use crate::exact::{brute_force_kemeny, dp_kemeny, DEFAULT_MEMORY_BUDGET};
use crate::metrics::{average_kt_distance, ratio_to_f64, Score};
use crate::model::{validate_profile, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub m: usize,
    pub n: usize,
    pub noise_swaps: usize,
    pub seed: u64,
}

fn candidate_name(u: usize) -> String {
    format!("c{u:02}")
}

fn profile_from_orders(orders: &[Vec<usize>]) -> Profile {
    let raw: Vec<Vec<String>> = orders
        .iter()
        .map(|o| o.iter().map(|&u| candidate_name(u)).collect())
        .collect();
    validate_profile(&raw).expect("generated orders are permutations")
}

/// `n` independent uniform permutations of `m` candidates.
pub fn generate_random_profile(m: usize, n: usize, seed: u64) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut o: Vec<usize> = (0..m).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();
    profile_from_orders(&orders)
}

/// A seeded base permutation; each agent applies `noise_swaps` uniformly
/// chosen adjacent transpositions to it, one after another.
pub fn generate_correlated_profile(config: &GeneratorConfig) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut base: Vec<usize> = (0..config.m).collect();
    base.shuffle(&mut rng);
    let orders: Vec<Vec<usize>> = (0..config.n)
        .map(|_| {
            let mut o = base.clone();
            if config.m > 1 {
                for _ in 0..config.noise_swaps {
                    let p = rng.gen_range(0..config.m - 1);
                    o.swap(p, p + 1);
                }
            }
            o
        })
        .collect();
    profile_from_orders(&orders)
}

/// Keeps `keep` uniformly chosen candidates, restricting every ranking to
/// them in their original relative order. Ids are reassigned densely.
pub fn subsample_profile(profile: &Profile, keep: usize, seed: u64) -> Result<Profile> {
    let m = profile.m();
    if keep > m {
        return Err(Error::SubsetTooLarge {
            requested: keep,
            available: m,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = vec![false; m];
    for u in index::sample(&mut rng, m, keep) {
        kept[u] = true;
    }
    let raw: Vec<Vec<&str>> = profile
        .rankings()
        .iter()
        .map(|r| {
            r.order()
                .iter()
                .filter(|&&u| kept[u])
                .map(|&u| profile.name(u))
                .collect()
        })
        .collect();
    validate_profile(&raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    Random,
    Correlated { noise_swaps: usize },
}

impl DatasetKind {
    pub const SAME: DatasetKind = DatasetKind::Correlated { noise_swaps: 2 };
    pub const DIFF: DatasetKind = DatasetKind::Correlated { noise_swaps: 8 };

    pub fn generate(self, m: usize, n: usize, seed: u64) -> Profile {
        match self {
            DatasetKind::Random => generate_random_profile(m, n, seed),
            DatasetKind::Correlated { noise_swaps } => generate_correlated_profile(&GeneratorConfig {
                m,
                n,
                noise_swaps,
                seed,
            }),
        }
    }

    fn seed_tag(self) -> u64 {
        match self {
            DatasetKind::Random => 0,
            DatasetKind::Correlated { noise_swaps } => 1 + noise_swaps as u64,
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetKind::Random => f.write_str("random"),
            DatasetKind::Correlated { noise_swaps } => write!(f, "correlated(k={noise_swaps})"),
        }
    }
}

impl FromStr for DatasetKind {
    type Err = String;

    /// Accepts `random`, `same`, `diff`, `correlated(k=N)` and `correlated:N`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let swaps = |digits: &str| {
            digits
                .parse::<usize>()
                .map(|noise_swaps| DatasetKind::Correlated { noise_swaps })
                .map_err(|_| format!("bad noise level in dataset kind {s:?}"))
        };
        match s {
            "random" => Ok(DatasetKind::Random),
            "same" => Ok(DatasetKind::SAME),
            "diff" => Ok(DatasetKind::DIFF),
            _ => {
                if let Some(rest) = s.strip_prefix("correlated:") {
                    swaps(rest)
                } else if let Some(rest) = s
                    .strip_prefix("correlated(k=")
                    .and_then(|r| r.strip_suffix(')'))
                {
                    swaps(rest)
                } else {
                    Err(format!("unknown dataset kind {s:?}"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Dp,
    Brute,
    Heuristic,
    Borda,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dp,
        Algorithm::Brute,
        Algorithm::Heuristic,
        Algorithm::Borda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dp => "dp",
            Algorithm::Brute => "brute",
            Algorithm::Heuristic => "heuristic",
            Algorithm::Borda => "borda",
        }
    }

    /// Runs the algorithm and returns its Kemeny score.
    pub fn score(self, profile: &Profile, memory_budget: u64) -> Result<Score> {
        Ok(match self {
            Algorithm::Dp => dp_kemeny(profile, memory_budget)?.score,
            Algorithm::Brute => brute_force_kemeny(profile)?.score,
            Algorithm::Heuristic => heuristic_kemeny(profile).1,
            Algorithm::Borda => borda(profile).1,
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Runs shorter than this are repeated and averaged.
const MIN_TIMED: Duration = Duration::from_micros(50);
const TIMING_TARGET: Duration = Duration::from_millis(1);
const MAX_REPEATS: u32 = 1000;

/// Wall time of `f` alone; very fast calls are looped and averaged.
pub fn time_call<T>(mut f: impl FnMut() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    let once = start.elapsed();
    if once >= MIN_TIMED {
        return (out, once);
    }
    let mut reps = 0u32;
    let start = Instant::now();
    while reps < MAX_REPEATS && start.elapsed() < TIMING_TARGET {
        std::hint::black_box(f());
        reps += 1;
    }
    let total = start.elapsed();
    (out, if reps == 0 { once } else { total / reps })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of indices into an independent child seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub kinds: Vec<DatasetKind>,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    /// Agents per profile.
    pub n: usize,
    /// Candidates in the pool each trial subsamples from.
    pub pool_size: usize,
    pub memory_budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kinds: vec![DatasetKind::SAME, DatasetKind::DIFF, DatasetKind::Random],
            m_values: vec![6, 8, 10, 12],
            trials: 20,
            algorithms: vec![Algorithm::Borda, Algorithm::Heuristic, Algorithm::Dp],
            seed: 0,
            n: 5,
            pool_size: 40,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub outcome: std::result::Result<(Score, Duration), Error>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub d_ave: Ratio<u64>,
    pub runs: Vec<AlgorithmRun>,
}

impl TrialOutcome {
    pub fn score_of(&self, algorithm: Algorithm) -> Option<Score> {
        self.runs
            .iter()
            .find(|r| r.algorithm == algorithm)
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|&(s, _)| s)
    }
}

/// All trials for one (kind, m) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialGroup {
    pub kind: DatasetKind,
    pub m: usize,
    pub pool_seed: u64,
    pub trials: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub avg: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let avg = values.iter().sum::<f64>() / values.len() as f64;
        // keep avg inside [min, max] despite rounding
        Some(Summary {
            min,
            max,
            avg: avg.clamp(min, max),
        })
    }
}

/// Aggregates over the successful trials of one (kind, m, algorithm) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub kind: DatasetKind,
    pub m: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub failures: usize,
    pub d_ave: Option<Summary>,
    pub score: Option<Summary>,
    pub time_ms: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub groups: Vec<TrialGroup>,
}

/// One line of the flat report table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub kind: String,
    pub m: usize,
    pub algorithm: String,
    pub stat: String,
    pub d_ave: String,
    pub score: String,
    pub time_ms: String,
    pub trials: usize,
    pub seed: u64,
}

pub const REPORT_COLUMNS: [&str; 9] = [
    "kind",
    "m",
    "algorithm",
    "stat",
    "d_ave",
    "score",
    "time_ms",
    "trials",
    "seed",
];

impl ExperimentReport {
    pub fn cells(&self) -> Vec<CellStats> {
        let mut out = Vec::new();
        for group in &self.groups {
            for &algorithm in &self.config.algorithms {
                let mut d_aves = Vec::new();
                let mut scores = Vec::new();
                let mut times = Vec::new();
                let mut failures = 0;
                for t in &group.trials {
                    let run = t.runs.iter().find(|r| r.algorithm == algorithm);
                    match run.map(|r| &r.outcome) {
                        Some(Ok((score, time))) => {
                            d_aves.push(ratio_to_f64(t.d_ave));
                            scores.push(score.0 as f64);
                            times.push(time.as_secs_f64() * 1e3);
                        }
                        _ => failures += 1,
                    }
                }
                out.push(CellStats {
                    kind: group.kind,
                    m: group.m,
                    algorithm,
                    trials: scores.len(),
                    failures,
                    d_ave: Summary::of(&d_aves),
                    score: Summary::of(&scores),
                    time_ms: Summary::of(&times),
                });
            }
        }
        out
    }

    pub fn cell(&self, kind: DatasetKind, m: usize, algorithm: Algorithm) -> Option<CellStats> {
        self.cells()
            .into_iter()
            .find(|c| c.kind == kind && c.m == m && c.algorithm == algorithm)
    }

    /// Every failed run as `(kind, m, trial, algorithm, error)`.
    pub fn failures(&self) -> Vec<(DatasetKind, usize, usize, Algorithm, Error)> {
        let mut out = Vec::new();
        for g in &self.groups {
            for t in &g.trials {
                for r in &t.runs {
                    if let Err(e) = &r.outcome {
                        out.push((g.kind, g.m, t.trial, r.algorithm, e.clone()));
                    }
                }
            }
        }
        out
    }

    /// Trials where an exact score exceeds the heuristic score or the
    /// heuristic score exceeds Borda's.
    pub fn ordering_violations(&self) -> Vec<(DatasetKind, usize, usize)> {
        let mut out = Vec::new();
        for g in &self.groups {
            for t in &g.trials {
                let exact = t
                    .score_of(Algorithm::Dp)
                    .or_else(|| t.score_of(Algorithm::Brute));
                let heur = t.score_of(Algorithm::Heuristic);
                let bord = t.score_of(Algorithm::Borda);
                let ok = match (exact, heur, bord) {
                    (Some(e), Some(h), _) if e > h => false,
                    (Some(e), _, Some(b)) if e > b => false,
                    (_, Some(h), Some(b)) if h > b => false,
                    _ => true,
                };
                if !ok {
                    out.push((g.kind, g.m, t.trial));
                }
            }
        }
        out
    }

    /// The flat table; `time_ms` is written as `-` when `with_timing` is off.
    pub fn rows(&self, with_timing: bool) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        for c in self.cells() {
            let base = |stat: &str| ReportRow {
                kind: c.kind.to_string(),
                m: c.m,
                algorithm: c.algorithm.to_string(),
                stat: stat.to_string(),
                d_ave: String::new(),
                score: String::new(),
                time_ms: String::new(),
                trials: c.trials,
                seed: self.config.seed,
            };
            if let (Some(d), Some(s), Some(t)) = (c.d_ave, c.score, c.time_ms) {
                for (stat, pick) in [
                    ("min", (|x: &Summary| x.min) as fn(&Summary) -> f64),
                    ("max", |x: &Summary| x.max),
                    ("avg", |x: &Summary| x.avg),
                ] {
                    let mut row = base(stat);
                    row.d_ave = format!("{:.4}", pick(&d));
                    row.score = if stat == "avg" {
                        format!("{:.4}", pick(&s))
                    } else {
                        format!("{}", pick(&s) as u64)
                    };
                    row.time_ms = if with_timing {
                        format!("{:.4}", pick(&t))
                    } else {
                        "-".to_string()
                    };
                    rows.push(row);
                }
            }
            if c.failures > 0 {
                let mut row = base("failed");
                row.trials = c.failures;
                rows.push(row);
            }
        }
        rows
    }

    fn metadata(&self) -> Vec<String> {
        let c = &self.config;
        let kinds: Vec<String> = c.kinds.iter().map(ToString::to_string).collect();
        let ms: Vec<String> = c.m_values.iter().map(ToString::to_string).collect();
        let algs: Vec<String> = c.algorithms.iter().map(ToString::to_string).collect();
        let mut lines = vec![
            format!("kinds: {}", kinds.join(" ")),
            format!("m: {}", ms.join(" ")),
            format!("algorithms: {}", algs.join(" ")),
            format!("trials: {}  agents: {}  pool: {}", c.trials, c.n, c.pool_size),
            format!("seed: {}", c.seed),
            "pool profile fixed per (kind, m); each trial draws a new candidate subsample".to_string(),
            "heuristic: adjacent-swap local search started from the borda ranking".to_string(),
        ];
        for (kind, m, trial, alg, err) in self.failures() {
            lines.push(format!("failure: {kind} m={m} trial={trial} {alg}: {err}"));
        }
        lines
    }

    /// Comma-separated table preceded by `#` metadata lines.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::new();
        for line in self.metadata() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.rows(with_timing) {
            w.serialize(row).expect("in-memory csv write");
        }
        let body = w.into_inner().expect("in-memory csv flush");
        if body.is_empty() {
            out.push_str(&REPORT_COLUMNS.join(","));
            out.push('\n');
        } else {
            out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        }
        out
    }

    /// Column-aligned version of the same table.
    pub fn to_text(&self, with_timing: bool) -> String {
        let header: Vec<String> = REPORT_COLUMNS.iter().map(|s| s.to_string()).collect();
        let mut table = vec![header];
        for r in self.rows(with_timing) {
            table.push(vec![
                r.kind,
                r.m.to_string(),
                r.algorithm,
                r.stat,
                r.d_ave,
                r.score,
                r.time_ms,
                r.trials.to_string(),
                r.seed.to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..REPORT_COLUMNS.len())
            .map(|i| table.iter().map(|row| row[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in self.metadata() {
            out.push_str(&line);
            out.push('\n');
        }
        out.push('\n');
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i < 4 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Runs the sweep. Solver errors are recorded per trial and do not stop it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(&m) = config.m_values.iter().find(|&&m| m > config.pool_size) {
        return Err(Error::SubsetTooLarge {
            requested: m,
            available: config.pool_size,
        });
    }
    let mut groups = Vec::new();
    for &kind in &config.kinds {
        for &m in &config.m_values {
            let pool_seed = derive_seed(config.seed, &[kind.seed_tag(), m as u64]);
            let pool = kind.generate(config.pool_size, config.n, pool_seed);
            let mut trials = Vec::with_capacity(config.trials);
            for trial in 0..config.trials {
                let seed = derive_seed(pool_seed, &[trial as u64]);
                let profile = subsample_profile(&pool, m, seed)?;
                let d_ave = average_kt_distance(&profile).d_ave;
                let runs = config
                    .algorithms
                    .iter()
                    .map(|&algorithm| {
                        let (res, time) =
                            time_call(|| algorithm.score(&profile, config.memory_budget));
                        AlgorithmRun {
                            algorithm,
                            outcome: res.map(|s| (s, time)),
                        }
                    })
                    .collect();
                trials.push(TrialOutcome {
                    trial,
                    seed,
                    d_ave,
                    runs,
                });
            }
            groups.push(TrialGroup {
                kind,
                m,
                pool_seed,
                trials,
            });
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        groups,
    })
}
