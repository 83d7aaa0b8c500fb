//! `simulate` subcommands: pivot and coverage checks, the CI width
//! envelope, bin-count studies, and scenario sample generation. Each prints
//! a human summary and optionally writes a machine-readable JSON record.

use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde_json::json;

use betatree::config::{Config, RootMode};
use betatree::harness::{
    bin_count_study, coverage_check, pivot_check, rep_seed, sample_uniform_cube,
    width_bound_check, MixtureSpec, Target,
};
use betatree::inference::infer;
use betatree::partition::build_kdtree;

use crate::error::CliError;
use crate::fileconfig::BuildFlags;
use crate::ingest::write_csv;

#[derive(Clone, clap::ValueEnum)]
pub enum Scenario {
    /// Two-component 2-d Gaussian mixture benchmark
    #[value(name = "2d")]
    TwoD,
    /// Three-component 3-d Gaussian mixture benchmark
    #[value(name = "3d")]
    ThreeD,
    /// Uniform on the unit cube (use --d for the dimension)
    Uniform,
}

impl Scenario {
    fn target(&self, d: usize) -> Target {
        match self {
            Scenario::TwoD => Target::Mixture(MixtureSpec::scenario_2d()),
            Scenario::ThreeD => Target::Mixture(MixtureSpec::scenario_3d()),
            Scenario::Uniform => Target::UniformCube { dim: d },
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Scenario::TwoD => "2d",
            Scenario::ThreeD => "3d",
            Scenario::Uniform => "uniform",
        }
    }
}

#[derive(Subcommand)]
pub enum SimulateCommand {
    /// KS-test the probability content of one tree node against its
    /// Beta pivot law under the uniform null
    Pivot {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Heap index of the node under test (children of k are 2k+1, 2k+2)
        #[arg(long, default_value_t = 1)]
        node: u64,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Fraction of replications in which every bounded rectangle's CI
    /// holds its true probability content
    Coverage {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Partition all of space instead of a bounding box
        #[arg(long)]
        no_box: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Check the sharp CI width envelope on every eligible node
    Envelope {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Histogram bin counts over independent replications
    Bins {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Dimension for the uniform scenario
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[command(flatten)]
        flags: BuildFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Write a CSV sample from a benchmark scenario
    Sample {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Dimension for the uniform scenario
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(cmd: SimulateCommand) -> Result<(), CliError> {
    match cmd {
        SimulateCommand::Pivot { n, d, node, reps, seed, out } => {
            let r = pivot_check(n, d, node, reps, seed)?;
            println!(
                "pivot: n={n} d={d} node={node} (n_k={}) reps={reps} ks={:.5} p={:.5}",
                r.node_count, r.ks_statistic, r.p_value
            );
            write_record(
                out.as_deref(),
                &json!({
                    "kind": "pivot",
                    "n": n, "d": d, "node": node, "node_count": r.node_count,
                    "reps": reps, "seed": seed,
                    "ks_statistic": r.ks_statistic, "p_value": r.p_value,
                }),
            )
        }

        SimulateCommand::Coverage { n, d, alpha, reps, seed, no_box, out } => {
            let cfg = Config {
                alpha,
                root_mode: if no_box { RootMode::FullSpace } else { RootMode::BoundingBox },
                ..Config::default()
            };
            let r = coverage_check(&Target::UniformCube { dim: d }, n, alpha, &cfg, reps, seed)?;
            let (lo, med, hi) = r.bin_count_stats();
            println!(
                "coverage: n={n} d={d} alpha={alpha} reps={reps} rate={:.4} se={:.4} discarded={} bins[min/med/max]={lo}/{med}/{hi}",
                r.coverage_rate, r.std_error, r.discarded
            );
            write_record(
                out.as_deref(),
                &json!({
                    "kind": "coverage",
                    "n": n, "d": d, "alpha": alpha, "reps": reps, "seed": seed,
                    "no_box": no_box,
                    "coverage_rate": r.coverage_rate, "std_error": r.std_error,
                    "hits": r.hits, "discarded": r.discarded,
                    "bin_counts": r.bin_counts,
                }),
            )
        }

        SimulateCommand::Envelope { n, d, q, seeds, seed, out } => {
            let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
            let mut eligible = 0;
            let mut violations = 0;
            for rep in 0..seeds {
                let data = sample_uniform_cube(n, d, rep_seed(seed, rep));
                let tree = build_kdtree(data, &cfg)?;
                let inf = infer(&tree, 0.1)?;
                let r = width_bound_check(&tree, &inf, q);
                eligible += r.eligible;
                violations += r.violations;
            }
            println!(
                "envelope: n={n} d={d} q={q} seeds={seeds} eligible={eligible} violations={violations}"
            );
            write_record(
                out.as_deref(),
                &json!({
                    "kind": "envelope",
                    "n": n, "d": d, "q": q, "seeds": seeds, "seed": seed,
                    "eligible": eligible, "violations": violations,
                }),
            )
        }

        SimulateCommand::Bins { scenario, n, d, reps, flags, out } => {
            let target = scenario.target(d);
            let cfg = flags.resolve(n)?;
            let counts = bin_count_study(&target, n, cfg.alpha, &cfg, reps, cfg.seed)?;
            let mut sorted = counts.clone();
            sorted.sort_unstable();
            let (lo, med, hi) = (sorted[0], sorted[sorted.len() / 2], sorted[sorted.len() - 1]);
            println!(
                "bins: scenario={} n={n} alpha={} reps={reps} min/median/max = {lo}/{med}/{hi}",
                scenario.name(),
                cfg.alpha
            );
            write_record(
                out.as_deref(),
                &json!({
                    "kind": "bins",
                    "scenario": scenario.name(), "n": n, "alpha": cfg.alpha,
                    "reps": reps, "seed": cfg.seed,
                    "root_mode": cfg.root_mode.as_str(),
                    "counts": counts, "min": lo, "median": med, "max": hi,
                }),
            )
        }

        SimulateCommand::Sample { scenario, n, d, seed, out } => {
            let data = scenario.target(d).sample(n, seed);
            write_csv(&out, &data)?;
            println!(
                "sample: scenario={} n={n} d={} seed={seed} -> {}",
                scenario.name(),
                data.dim(),
                out.display()
            );
            Ok(())
        }
    }
}

fn write_record(out: Option<&Path>, record: &serde_json::Value) -> Result<(), CliError> {
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(record)
            .map_err(|e| CliError::Document(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(())
}
