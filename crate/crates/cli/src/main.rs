//! `obcm` command line.
//!
//! Exit codes: 0 success, 2 parameter error, 3 I/O or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use obcm::bench::{run_algorithm, read_csv_column, run_suite, Algorithm, StopParams, SuiteConfig};
use obcm::crossings::crossings_of;
use obcm::exact::exact_dp;
use obcm::instance::{generate_random, random_ordering, read_instance, read_ordering, write_instance, write_ordering};
use obcm::stats::wilcoxon_rank_sum;
use obcm::{CrossTable, Error, Ordering, Seed};

#[derive(Parser)]
#[command(name = "obcm", version, about = "One-sided bipartite crossing minimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instance files.
    Gen {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Edge probability.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances; more than one writes `<out>/inst###.obcm`.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file (count = 1) or directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one algorithm on an instance and print the ordering.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// barycenter, median, sifting, rls-{swap,exchange,jump},
        /// ea-{swap,exchange,jump}, jfirls, jrirls, jsrls or exact.
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 1.5)]
        stagnation_exponent: f64,
        #[arg(long)]
        max_generations: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start ordering file; defaults to a random ordering (identity for sifting).
        #[arg(long)]
        start: Option<PathBuf>,
        /// Write the ordering here and print only the crossing count.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite described by a TOML file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `threads` from the config (1 = serial, 0 = all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Rank-sum test between one column of two CSV files.
    Stats {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "crossings")]
        column: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_parameter() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(command: Command) -> obcm::Result<()> {
    match command {
        Command::Gen {
            n1,
            n2,
            p,
            seed,
            count,
            out,
        } => {
            if count == 0 {
                return Err(Error::Parameter("count must be at least 1".into()));
            }
            if count == 1 {
                write_instance(&generate_random(n1, n2, p, Seed(seed))?, &out)?;
            } else {
                std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                    path: out.clone(),
                    source: e,
                })?;
                for i in 0..count {
                    let inst = generate_random(n1, n2, p, obcm::bench::instance_seed(Seed(seed), i))?;
                    write_instance(&inst, out.join(format!("inst{i:03}.obcm")))?;
                }
            }
            Ok(())
        }
        Command::Solve {
            instance,
            algo,
            stagnation_exponent,
            max_generations,
            seed,
            start,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let table = CrossTable::build(&inst);
            let (crossings, ord) = if algo == "exact" {
                exact_dp(&table)?
            } else {
                let algorithm: Algorithm = algo.parse()?;
                let stop = StopParams {
                    stagnation_exponent: Some(stagnation_exponent),
                    max_generations,
                }
                .rule(inst.n2())?;
                let seed = Seed(seed);
                let start = match start {
                    Some(path) => read_ordering(path)?,
                    None if algorithm == Algorithm::Sifting => Ordering::identity(inst.n2()),
                    None => random_ordering(inst.n2(), seed.child("start", 0)),
                };
                crossings_of(&table, &start)?;
                let trace = run_algorithm(algorithm, &inst, &table, stop, seed, &start)?;
                (trace.final_crossings, trace.final_ordering)
            };
            match out {
                Some(path) => {
                    write_ordering(&ord, path)?;
                    println!("crossings {crossings}");
                }
                None => {
                    print!("{}", ord.to_text());
                    eprintln!("crossings {crossings}");
                }
            }
            Ok(())
        }
        Command::Bench { config, out, threads } => {
            let mut cfg = SuiteConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output_dir = Some(out);
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let report = run_suite(&cfg)?;
            println!("{:<14} {:>6} {:>12} {:>12}", "algorithm", "runs", "mean_gap", "median_gap");
            for s in &report.summaries {
                println!(
                    "{:<14} {:>6} {:>12.2} {:>12.1}",
                    s.algorithm.name(),
                    s.runs,
                    s.mean_gap,
                    s.median_gap
                );
            }
            Ok(())
        }
        Command::Stats { a, b, column } => {
            let xs = read_csv_column(&a, &column)?;
            let ys = read_csv_column(&b, &column)?;
            let r = wilcoxon_rank_sum(&xs, &ys)?;
            println!("n_a {}", xs.len());
            println!("n_b {}", ys.len());
            println!("u_statistic {}", r.u_statistic);
            println!("rank_sum {}", r.rank_sum);
            println!("p_two_sided {}", r.p_two_sided);
            println!("p_less {}", r.p_less);
            println!("method {}", r.method.name());
            Ok(())
        }
    }
}
