//! Experiment harness.
//!
//! A suite is a set of instances × algorithms × repetitions. Each instance gets
//! one cross table, built and timed before any algorithm runs; that time is
//! reported in its own column and never included in search time.
//!
//! Seeds are derived from the master seed and the coordinates of a run, never
//! from scheduling, so serial and parallel execution produce identical reports.
//!
//! Output files (all CSV, first line `obcm-bench 1`):
//!
//! | file               | contents                                      |
//! |--------------------|-----------------------------------------------|
//! | `runs.csv`         | one row per run                               |
//! | `instances.csv`    | sizes, lower bound and reference per instance |
//! | `summary.csv`      | mean / median gap per algorithm               |
//! | `comparisons.csv`  | rank-sum test for every pair of algorithms    |
//! | `convergence.csv`  | mean gap per algorithm on a geometric grid    |
//! | `timings.csv`      | wall-clock durations (not reproducible)       |
//! | `traces/<instance>_<algo>_<rep>.trace.csv` | improvement events   |

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;

use crate::classic::{barycenter, median, sifting};
use crate::crossings::{crossings_unchecked, pairwise_lower_bound};
use crate::evolutionary::{run_scanning_rls, run_search, MutationConfig, Operator, RunTrace, ScanStrategy, StopRule};
use crate::exact::{exact_dp, DP_MAX_N2};
use crate::instance::{generate_random, random_ordering, read_instance};
use crate::stats::{wilcoxon_rank_sum, TestResult};
use crate::{BipartiteInstance, CrossTable, Error, Ordering, Result, Seed};

pub const CSV_VERSION_LINE: &str = "obcm-bench 1";

/// Reference optima are computed exactly up to this free-layer size.
pub const DEFAULT_EXACT_CAP: usize = 20;

pub const DEFAULT_STAGNATION_EXPONENT: f64 = 1.5;

/// Significance level used when the harness labels a comparison.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Barycenter,
    Median,
    /// Sifting from the identity ordering.
    Sifting,
    Search(MutationConfig),
    Scan(ScanStrategy),
}

impl Algorithm {
    /// The twelve algorithms of a full comparison.
    pub fn all() -> Vec<Algorithm> {
        let mut out = vec![Algorithm::Barycenter, Algorithm::Median, Algorithm::Sifting];
        out.extend(Operator::ALL.map(|op| Algorithm::Search(MutationConfig::rls(op))));
        out.extend(Operator::ALL.map(|op| Algorithm::Search(MutationConfig::ea(op))));
        out.extend(ScanStrategy::ALL.map(Algorithm::Scan));
        out
    }

    pub fn name(&self) -> String {
        match self {
            Algorithm::Barycenter => "barycenter".into(),
            Algorithm::Median => "median".into(),
            Algorithm::Sifting => "sifting".into(),
            Algorithm::Search(cfg) => cfg.name(),
            Algorithm::Scan(s) => s.name().into(),
        }
    }

    /// Randomised algorithms start from a random ordering and consume a seed.
    pub fn is_randomized(&self) -> bool {
        matches!(self, Algorithm::Search(_) | Algorithm::Scan(_))
    }

    fn uses_table(&self) -> bool {
        !matches!(self, Algorithm::Barycenter | Algorithm::Median)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::all()
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::param(format!("unknown algorithm `{s}`")))
    }
}

/// Runs one algorithm on one instance.
///
/// `start` is used by sifting and the randomised algorithms; barycenter and
/// median ignore it. `seed` drives the randomised algorithms only.
pub fn run_algorithm(
    algorithm: Algorithm,
    inst: &BipartiteInstance,
    table: &CrossTable,
    stop: StopRule,
    seed: Seed,
    start: &Ordering,
) -> Result<RunTrace> {
    let single = |ord: Ordering, clock: Instant| {
        let elapsed = clock.elapsed();
        let k = crossings_unchecked(table, &ord);
        RunTrace::single(algorithm.name(), seed, ord, k, elapsed)
    };
    let clock = Instant::now();
    match algorithm {
        Algorithm::Barycenter => Ok(single(barycenter(inst), clock)),
        Algorithm::Median => Ok(single(median(inst), clock)),
        Algorithm::Sifting => Ok(single(sifting(table, start)?, clock)),
        Algorithm::Search(cfg) => run_search(table, cfg, stop, seed, start),
        Algorithm::Scan(s) => run_scanning_rls(table, s, stop, seed, start),
    }
}

/// Stop-rule parameters; the stagnation limit is `⌈n2^exponent⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopParams {
    pub stagnation_exponent: Option<f64>,
    pub max_generations: Option<u64>,
}

impl Default for StopParams {
    fn default() -> Self {
        Self {
            stagnation_exponent: Some(DEFAULT_STAGNATION_EXPONENT),
            max_generations: None,
        }
    }
}

impl StopParams {
    pub fn rule(&self, n2: usize) -> Result<StopRule> {
        if let Some(e) = self.stagnation_exponent {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::param(format!("stagnation exponent {e} must be finite and >= 0")));
            }
        }
        StopRule::new(
            self.stagnation_exponent
                .map(|e| crate::evolutionary::stagnation_generations(n2, e)),
            self.max_generations,
            None,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    /// Overrides the suite-wide stop parameters.
    pub stop: Option<StopParams>,
}

impl From<Algorithm> for AlgorithmSpec {
    fn from(algorithm: Algorithm) -> Self {
        Self { algorithm, stop: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// `count` random instances; instance `i` uses seed `master.child("instance", i)`.
    Random { n1: usize, n2: usize, p: f64, count: usize },
    /// Every `*.obcm` file in a directory, sorted by file name.
    Directory(PathBuf),
    /// Instances supplied in memory as `(id, instance)`.
    Given(Vec<(String, BipartiteInstance)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub instances: InstanceSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub repetitions: usize,
    pub master_seed: Seed,
    pub stop: StopParams,
    /// Largest `n2` for which the reference is the exact optimum.
    pub exact_cap: usize,
    /// Worker threads; 1 runs serially, 0 uses all cores.
    pub threads: usize,
    pub output_dir: Option<PathBuf>,
    pub write_traces: bool,
}

impl SuiteConfig {
    pub fn new(instances: InstanceSource, algorithms: impl IntoIterator<Item = Algorithm>, master_seed: Seed) -> Self {
        Self {
            instances,
            algorithms: algorithms.into_iter().map(AlgorithmSpec::from).collect(),
            repetitions: 1,
            master_seed,
            stop: StopParams::default(),
            exact_cap: DEFAULT_EXACT_CAP,
            threads: 1,
            output_dir: None,
            write_traces: true,
        }
    }

    /// Parses a TOML suite description. Relative paths are resolved against
    /// `base_dir`.
    ///
    /// ```toml
    /// master_seed = 7
    /// repetitions = 1
    /// output_dir = "out"
    /// algorithms = ["barycenter", "rls-jump", { name = "jsrls", max_generations = 100 }]
    ///
    /// [instances]
    /// n1 = 100
    /// n2 = 100
    /// p = 0.05
    /// count = 10        # or: dir = "instances/"
    ///
    /// [stop]
    /// stagnation_exponent = 1.5
    /// ```
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: None,
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        let instances = match file.instances {
            InstancesFile::Random { n1, n2, p, count } => InstanceSource::Random { n1, n2, p, count },
            InstancesFile::Directory { dir } => InstanceSource::Directory(base_dir.join(dir)),
        };
        let algorithms = file
            .algorithms
            .into_iter()
            .map(|entry| {
                Ok(match entry {
                    AlgorithmEntry::Name(name) => AlgorithmSpec {
                        algorithm: name.parse()?,
                        stop: None,
                    },
                    AlgorithmEntry::Detailed {
                        name,
                        stagnation_exponent,
                        max_generations,
                    } => AlgorithmSpec {
                        algorithm: name.parse()?,
                        stop: (stagnation_exponent.is_some() || max_generations.is_some()).then_some(StopParams {
                            stagnation_exponent,
                            max_generations,
                        }),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let config = Self {
            instances,
            algorithms,
            repetitions: file.repetitions,
            master_seed: Seed(file.master_seed),
            stop: file.stop.unwrap_or_default(),
            exact_cap: file.exact_cap,
            threads: file.threads,
            output_dir: file.output_dir.map(|d| base_dir.join(d)),
            write_traces: file.write_traces,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                msg,
            },
            e => e,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::param("repetitions must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::param("suite needs at least one algorithm"));
        }
        if let InstanceSource::Random { p, count, .. } = self.instances {
            if count == 0 {
                return Err(Error::param("instance count must be at least 1"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("edge probability {p} not in [0, 1]")));
            }
        }
        if self.exact_cap > DP_MAX_N2 {
            return Err(Error::param(format!("exact_cap {} exceeds {DP_MAX_N2}", self.exact_cap)));
        }
        let mut names: Vec<String> = self.algorithms.iter().map(|a| a.algorithm.name()).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("algorithm `{}` listed twice", w[0])));
        }
        for spec in &self.algorithms {
            spec.stop.unwrap_or(self.stop).rule(1)?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    master_seed: u64,
    #[serde(default = "one")]
    repetitions: usize,
    instances: InstancesFile,
    algorithms: Vec<AlgorithmEntry>,
    stop: Option<StopParams>,
    #[serde(default = "default_exact_cap")]
    exact_cap: usize,
    #[serde(default = "one")]
    threads: usize,
    output_dir: Option<PathBuf>,
    #[serde(default = "yes")]
    write_traces: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_exact_cap() -> usize {
    DEFAULT_EXACT_CAP
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum InstancesFile {
    Random { n1: usize, n2: usize, p: f64, count: usize },
    Directory { dir: PathBuf },
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum AlgorithmEntry {
    Name(String),
    Detailed {
        name: String,
        stagnation_exponent: Option<f64>,
        max_generations: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Optimum from the subset DP.
    Exact,
    /// Fewest crossings found by any run on the instance.
    BestKnown,
}

impl ReferenceKind {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceKind::Exact => "exact",
            ReferenceKind::BestKnown => "best-known",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub id: String,
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub lower_bound: u64,
    pub reference: u64,
    pub reference_kind: ReferenceKind,
    /// Cross-table construction time.
    pub preprocess: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    /// Index into [`SuiteReport::instances`].
    pub instance: usize,
    pub algorithm: Algorithm,
    pub rep: usize,
    pub trace: RunTrace,
    /// `final crossings - reference`.
    pub gap: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_gap: f64,
    pub median_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: Algorithm,
    pub b: Algorithm,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub instances: Vec<InstanceSummary>,
    /// Ordered by instance, then algorithm (config order), then repetition.
    pub rows: Vec<RunRow>,
    pub summaries: Vec<AlgorithmSummary>,
    /// One per unordered pair of algorithms, in config order.
    pub comparisons: Vec<Comparison>,
}

fn load_instances(source: &InstanceSource, master: Seed) -> Result<Vec<(String, BipartiteInstance)>> {
    match source {
        InstanceSource::Random { n1, n2, p, count } => (0..*count)
            .map(|i| Ok((format!("inst{i:03}"), generate_random(*n1, *n2, *p, instance_seed(master, i))?)))
            .collect(),
        InstanceSource::Directory(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
            let mut paths = Vec::new();
            for entry in entries {
                let path = entry.map_err(|e| Error::io(dir, e))?.path();
                if path.extension().is_some_and(|e| e == "obcm") {
                    paths.push(path);
                }
            }
            paths.sort();
            if paths.is_empty() {
                return Err(Error::param(format!("no .obcm files in {}", dir.display())));
            }
            paths
                .into_iter()
                .map(|p| {
                    let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    Ok((id, read_instance(&p)?))
                })
                .collect()
        }
        InstanceSource::Given(list) => {
            if list.is_empty() {
                return Err(Error::param("suite needs at least one instance"));
            }
            Ok(list.clone())
        }
    }
}

/// Seed of the `index`-th random instance of a suite.
pub fn instance_seed(master: Seed, index: usize) -> Seed {
    master.child("instance", index as u64)
}

/// Seed for the search of one run.
pub fn run_seed(master: Seed, instance: usize, algorithm: &str, rep: usize) -> Seed {
    instance_seed(master, instance).child(algorithm, rep as u64)
}

/// Random start ordering shared by every algorithm for the given instance and
/// repetition.
pub fn start_ordering(master: Seed, instance: usize, rep: usize, n2: usize) -> Ordering {
    random_ordering(n2, instance_seed(master, instance).child("start", rep as u64))
}

struct Prepared {
    id: String,
    inst: BipartiteInstance,
    table: CrossTable,
    preprocess: Duration,
    lower_bound: u64,
    exact: Option<u64>,
}

/// Runs every (instance, algorithm, repetition) cell of the suite and, when
/// `output_dir` is set, writes the CSV files.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let master = config.master_seed;
    let prepared: Vec<Prepared> = load_instances(&config.instances, master)?
        .into_iter()
        .map(|(id, inst)| {
            let clock = Instant::now();
            let table = CrossTable::build(&inst);
            let preprocess = clock.elapsed();
            let exact = if inst.n2() <= config.exact_cap {
                Some(exact_dp(&table)?.0)
            } else {
                None
            };
            Ok(Prepared {
                lower_bound: pairwise_lower_bound(&table),
                id,
                inst,
                table,
                preprocess,
                exact,
            })
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize, usize)> = (0..prepared.len())
        .flat_map(|i| (0..config.algorithms.len()).flat_map(move |a| (0..config.repetitions).map(move |r| (i, a, r))))
        .collect();

    let run_cell = |&(i, a, rep): &(usize, usize, usize)| -> Result<RunTrace> {
        let p = &prepared[i];
        let spec = &config.algorithms[a];
        let algorithm = spec.algorithm;
        let stop = spec.stop.unwrap_or(config.stop).rule(p.inst.n2())?;
        let start = match algorithm {
            Algorithm::Sifting => Ordering::identity(p.inst.n2()),
            _ => start_ordering(master, i, rep, p.inst.n2()),
        };
        let seed = run_seed(master, i, &algorithm.name(), rep);
        let mut trace = run_algorithm(algorithm, &p.inst, &p.table, stop, seed, &start)?;
        if algorithm.uses_table() {
            trace.preprocess = p.preprocess;
        }
        Ok(trace)
    };

    let traces: Vec<RunTrace> = match config.threads {
        1 => cells.iter().map(run_cell).collect::<Result<_>>()?,
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
            pool.install(|| cells.par_iter().map(run_cell).collect::<Result<_>>())?
        }
    };

    let instances: Vec<InstanceSummary> = prepared
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (reference, reference_kind) = match p.exact {
                Some(opt) => (opt, ReferenceKind::Exact),
                None => {
                    let best = cells
                        .iter()
                        .zip(&traces)
                        .filter(|((ci, _, _), _)| *ci == i)
                        .map(|(_, t)| t.final_crossings)
                        .min()
                        .expect("every instance has at least one run");
                    (best, ReferenceKind::BestKnown)
                }
            };
            InstanceSummary {
                id: p.id.clone(),
                n1: p.inst.n1(),
                n2: p.inst.n2(),
                m: p.inst.num_edges(),
                lower_bound: p.lower_bound,
                reference,
                reference_kind,
                preprocess: p.preprocess,
            }
        })
        .collect();

    let rows: Vec<RunRow> = cells
        .iter()
        .zip(traces)
        .map(|(&(i, a, rep), trace)| RunRow {
            instance: i,
            algorithm: config.algorithms[a].algorithm,
            rep,
            gap: trace
                .final_crossings
                .checked_sub(instances[i].reference)
                .expect("no run beats the reference"),
            trace,
        })
        .collect();

    let mut report = SuiteReport {
        instances,
        rows,
        summaries: Vec::new(),
        comparisons: Vec::new(),
    };
    report.summaries = config
        .algorithms
        .iter()
        .map(|spec| summarize(&report, spec.algorithm))
        .collect();
    for (x, a) in config.algorithms.iter().enumerate() {
        for b in &config.algorithms[x + 1..] {
            report.comparisons.push(Comparison {
                a: a.algorithm,
                b: b.algorithm,
                result: compare_algorithms(&report, &a.algorithm.name(), &b.algorithm.name())?,
            });
        }
    }

    if let Some(dir) = &config.output_dir {
        report.write_csv(dir, config.write_traces)?;
    }
    Ok(report)
}

fn summarize(report: &SuiteReport, algorithm: Algorithm) -> AlgorithmSummary {
    let mut gaps: Vec<u64> = report.rows_of(algorithm).map(|r| r.gap).collect();
    gaps.sort_unstable();
    let n = gaps.len();
    let mean_gap = gaps.iter().sum::<u64>() as f64 / n as f64;
    let median_gap = if n % 2 == 1 {
        gaps[n / 2] as f64
    } else {
        (gaps[n / 2 - 1] + gaps[n / 2]) as f64 / 2.0
    };
    AlgorithmSummary {
        algorithm,
        runs: n,
        mean_gap,
        median_gap,
    }
}

impl SuiteReport {
    pub fn rows_of(&self, algorithm: Algorithm) -> impl Iterator<Item = &RunRow> {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }

    fn algorithm_named(&self, name: &str) -> Result<Algorithm> {
        self.rows
            .iter()
            .map(|r| r.algorithm)
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::param(format!("algorithm `{name}` not in report")))
    }

    pub fn write_csv(&self, dir: &Path, traces: bool) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        write_table(
            &dir.join("runs.csv"),
            &[
                "instance",
                "algorithm",
                "rep",
                "seed",
                "crossings",
                "reference",
                "reference_kind",
                "gap",
                "lower_bound",
                "generations",
                "evaluations",
                "delta_ops",
            ],
            self.rows.iter().map(|r| {
                let inst = &self.instances[r.instance];
                vec![
                    inst.id.clone(),
                    r.algorithm.name(),
                    r.rep.to_string(),
                    r.trace.seed.to_string(),
                    r.trace.final_crossings.to_string(),
                    inst.reference.to_string(),
                    inst.reference_kind.name().into(),
                    r.gap.to_string(),
                    inst.lower_bound.to_string(),
                    r.trace.generations.to_string(),
                    r.trace.evaluations.to_string(),
                    r.trace.delta_ops.to_string(),
                ]
            }),
        )?;

        write_table(
            &dir.join("instances.csv"),
            &["instance", "n1", "n2", "m", "lower_bound", "reference", "reference_kind"],
            self.instances.iter().map(|i| {
                vec![
                    i.id.clone(),
                    i.n1.to_string(),
                    i.n2.to_string(),
                    i.m.to_string(),
                    i.lower_bound.to_string(),
                    i.reference.to_string(),
                    i.reference_kind.name().into(),
                ]
            }),
        )?;

        write_table(
            &dir.join("summary.csv"),
            &["algorithm", "runs", "mean_gap", "median_gap"],
            self.summaries.iter().map(|s| {
                vec![
                    s.algorithm.name(),
                    s.runs.to_string(),
                    s.mean_gap.to_string(),
                    s.median_gap.to_string(),
                ]
            }),
        )?;

        write_table(
            &dir.join("comparisons.csv"),
            &["a", "b", "u_statistic", "rank_sum", "p_two_sided", "p_less", "method", "a_better"],
            self.comparisons.iter().map(|c| {
                vec![
                    c.a.name(),
                    c.b.name(),
                    c.result.u_statistic.to_string(),
                    c.result.rank_sum.to_string(),
                    c.result.p_two_sided.to_string(),
                    c.result.p_less.to_string(),
                    c.result.method.name().into(),
                    (c.result.p_less < DEFAULT_ALPHA).to_string(),
                ]
            }),
        )?;

        let inputs: Vec<ConvergenceInput> = self
            .rows
            .iter()
            .map(|r| ConvergenceInput {
                instance: r.instance,
                algorithm: r.algorithm.name(),
                reference: self.instances[r.instance].reference,
                trace: &r.trace,
            })
            .collect();
        let max_gen = self.rows.iter().map(|r| r.trace.generations).max().unwrap_or(0);
        let curve = emit_convergence(&inputs, &geometric_grid(max_gen))?;
        write_table(
            &dir.join("convergence.csv"),
            &["generation", "algorithm", "mean_gap", "std_gap"],
            curve.iter().map(|c| {
                vec![
                    c.generation.to_string(),
                    c.algorithm.clone(),
                    c.mean_gap.to_string(),
                    c.std_gap.to_string(),
                ]
            }),
        )?;

        write_table(
            &dir.join("timings.csv"),
            &["instance", "algorithm", "rep", "preprocess_ns", "search_ns"],
            self.rows.iter().map(|r| {
                vec![
                    self.instances[r.instance].id.clone(),
                    r.algorithm.name(),
                    r.rep.to_string(),
                    r.trace.preprocess.as_nanos().to_string(),
                    r.trace.search.as_nanos().to_string(),
                ]
            }),
        )?;

        if traces {
            let tdir = dir.join("traces");
            std::fs::create_dir_all(&tdir).map_err(|e| Error::io(&tdir, e))?;
            for r in &self.rows {
                let name = format!(
                    "{}_{}_{}.trace.csv",
                    self.instances[r.instance].id,
                    r.algorithm.name(),
                    r.rep
                );
                write_table(
                    &tdir.join(name),
                    &["generation", "crossings"],
                    r.trace.improvements.iter().map(|&(g, k)| vec![g.to_string(), k.to_string()]),
                )?;
            }
        }
        Ok(())
    }
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let io = |e| Error::io(path, e);
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "{CSV_VERSION_LINE}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

/// Reads one numeric column from a CSV file written by the harness (or any
/// CSV with a header row).
pub fn read_csv_column(path: impl AsRef<Path>, column: &str) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (body, skipped) = match text.split_once('\n') {
        Some((first, rest)) if first.trim_end() == CSV_VERSION_LINE => (rest, 1),
        _ => (text.as_str(), 0),
    };
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: Some(path.to_path_buf()),
        line,
        msg,
    };
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(skipped + 1, e.to_string()))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::param(format!("{}: no column `{column}`", path.display())))?;
    let mut out = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let line = skipped + k + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let cell = rec.get(idx).unwrap_or("");
        out.push(cell.trim().parse().map_err(|_| parse_err(line, format!("`{cell}` is not a number")))?);
    }
    Ok(out)
}

/// Rank-sum test on the gaps to the per-instance reference of two algorithms;
/// `p_less` small means `a` is better.
///
/// Both algorithms must have the same number of runs on every instance.
pub fn compare_algorithms(report: &SuiteReport, a: &str, b: &str) -> Result<TestResult> {
    let (alg_a, alg_b) = (report.algorithm_named(a)?, report.algorithm_named(b)?);
    for i in 0..report.instances.len() {
        let na = report.rows_of(alg_a).filter(|r| r.instance == i).count();
        let nb = report.rows_of(alg_b).filter(|r| r.instance == i).count();
        if na != nb {
            return Err(Error::param(format!(
                "`{a}` has {na} runs on instance {} but `{b}` has {nb}",
                report.instances[i].id
            )));
        }
    }
    let gaps = |alg| report.rows_of(alg).map(|r| r.gap as f64).collect::<Vec<_>>();
    wilcoxon_rank_sum(&gaps(alg_a), &gaps(alg_b))
}

/// `1, 2, 4, ...` up to the first power of two `>= max_generation`.
pub fn geometric_grid(max_generation: u64) -> Vec<u64> {
    let mut grid = vec![1u64];
    while *grid.last().unwrap() < max_generation {
        grid.push(grid.last().unwrap() * 2);
    }
    grid
}

#[derive(Debug, Clone)]
pub struct ConvergenceInput<'a> {
    pub instance: usize,
    pub algorithm: String,
    pub reference: u64,
    pub trace: &'a RunTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub generation: u64,
    pub algorithm: String,
    pub mean_gap: f64,
    /// Population standard deviation.
    pub std_gap: f64,
}

/// Mean gap to the reference of each algorithm's best-so-far crossings at
/// each checkpoint. A run that stopped earlier keeps its final value.
pub fn emit_convergence(inputs: &[ConvergenceInput], grid: &[u64]) -> Result<Vec<ConvergencePoint>> {
    if inputs.is_empty() {
        return Err(Error::param("no traces to aggregate"));
    }
    let mut refs = std::collections::HashMap::new();
    for inp in inputs {
        if let Some(&r) = refs.get(&inp.instance) {
            if r != inp.reference {
                return Err(Error::param(format!(
                    "instance {} has traces with references {r} and {}",
                    inp.instance, inp.reference
                )));
            }
        } else {
            refs.insert(inp.instance, inp.reference);
        }
    }
    let mut algorithms: Vec<&str> = Vec::new();
    for inp in inputs {
        if !algorithms.contains(&inp.algorithm.as_str()) {
            algorithms.push(&inp.algorithm);
        }
    }
    let mut out = Vec::with_capacity(algorithms.len() * grid.len());
    for alg in algorithms {
        let runs: Vec<&ConvergenceInput> = inputs.iter().filter(|i| i.algorithm == alg).collect();
        for &g in grid {
            let gaps: Vec<f64> = runs
                .iter()
                .map(|r| r.trace.best_at(g).saturating_sub(r.reference) as f64)
                .collect();
            let n = gaps.len() as f64;
            let mean = gaps.iter().sum::<f64>() / n;
            let var = gaps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            out.push(ConvergencePoint {
                generation: g,
                algorithm: alg.to_string(),
                mean_gap: mean,
                std_gap: var.sqrt(),
            });
        }
    }
    Ok(out)
}
