//! Batch front end for beta-tree histograms.
//!
//! Subcommands: `build` (CSV -> histogram document), `modes` (mode hunt on a
//! document or straight from data), `plot` (plot-ready rectangles/points,
//! optionally sliced), and `simulate` (pivot, coverage, width-envelope and
//! bin-count studies, plus scenario sample generation).

mod document;
mod error;
mod fileconfig;
mod ingest;
mod plot;
mod sim;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use betatree::modes::{build_adjacency, find_modes};
use betatree::PointMatrix;

use document::HistogramDocument;
use error::CliError;
use fileconfig::BuildFlags;
use ingest::IngestOptions;
use plot::SliceSpec;

#[derive(Parser)]
#[command(
    name = "betatree",
    about = "Data-adaptive multivariate histograms with simultaneous confidence bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CsvFlags {
    /// Input CSV file
    #[arg(long)]
    data: PathBuf,

    /// Field delimiter
    #[arg(long, default_value = ",")]
    delimiter: char,

    /// First row is a header
    #[arg(long)]
    header: bool,

    /// Comma-separated column names (with --header) or 0-based indices
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
}

impl CsvFlags {
    fn ingest(&self) -> Result<PointMatrix, CliError> {
        let opts = IngestOptions {
            delimiter: u8::try_from(self.delimiter).map_err(|_| {
                CliError::InvalidArgument("delimiter must be a single ASCII character".into())
            })?,
            header: self.header,
            columns: self.columns.clone(),
        };
        let (matrix, _) = ingest::ingest_csv(&self.data, &opts)?;
        Ok(matrix)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a histogram document from CSV data
    Build {
        #[command(flatten)]
        csv: CsvFlags,

        #[command(flatten)]
        flags: BuildFlags,

        /// Output document path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Tag density modes; reads a document or builds one from data first
    Modes {
        /// Existing histogram document
        #[arg(long, conflicts_with = "data", required_unless_present = "data")]
        doc: Option<PathBuf>,

        /// Build from this CSV instead of reading a document
        #[arg(long)]
        data: Option<PathBuf>,

        #[arg(long, default_value = ",")]
        delimiter: char,

        #[arg(long)]
        header: bool,

        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,

        #[command(flatten)]
        flags: BuildFlags,

        /// Output document path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Emit plot-ready rectangles and observations
    Plot {
        /// Histogram document to plot
        #[arg(long)]
        doc: PathBuf,

        /// Observations to overlay (CSV, same columns as the build)
        #[arg(long)]
        data: Option<PathBuf>,

        #[arg(long, default_value = ",")]
        delimiter: char,

        #[arg(long)]
        header: bool,

        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,

        /// Slice plane coordinate (0-based; needs d >= 3)
        #[arg(long, requires = "slice_value")]
        slice_axis: Option<usize>,

        /// Slice plane position
        #[arg(long, requires = "slice_axis")]
        slice_value: Option<f64>,

        /// Half-width of the observation slab around the plane
        #[arg(long, default_value_t = 0.2)]
        slab: f64,

        /// Omit rectangles with empirical density below this value
        #[arg(long)]
        density_floor: Option<f64>,

        /// Output path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Monte Carlo checks and sample generation
    #[command(subcommand)]
    Simulate(sim::SimulateCommand),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { csv, flags, out } => {
            let data = csv.ingest()?;
            let cfg = flags.resolve(data.n())?;
            let fit = betatree::fit(data, &cfg)?;
            let doc = document::from_beta_tree(&fit.beta_tree, &cfg);
            emit_document(&doc, out.as_deref())
        }

        Command::Modes { doc, data, delimiter, header, columns, flags, out } => {
            let mut document = match (doc, data) {
                (Some(path), None) => document::read_document(&path)?,
                (None, Some(path)) => {
                    let csv = CsvFlags { data: path, delimiter, header, columns };
                    let matrix = csv.ingest()?;
                    let cfg = flags.resolve(matrix.n())?;
                    let fit = betatree::fit(matrix, &cfg)?;
                    document::from_beta_tree(&fit.beta_tree, &cfg)
                }
                _ => unreachable!("clap enforces exactly one of --doc/--data"),
            };
            let bt = document::to_beta_tree(&document)?;
            let graph = build_adjacency(&bt);
            let max_len = flags
                .max_path_len
                .unwrap_or(document.config.max_path_length);
            let report = find_modes(&bt, &graph, max_len);
            document.config.max_path_length = max_len;
            document.modes = Some(document::mode_section(&report));
            emit_document(&document, out.as_deref())
        }

        Command::Plot {
            doc,
            data,
            delimiter,
            header,
            columns,
            slice_axis,
            slice_value,
            slab,
            density_floor,
            out,
        } => {
            let document = document::read_document(&doc)?;
            let matrix = match data {
                Some(path) => {
                    let csv = CsvFlags { data: path, delimiter, header, columns };
                    Some(csv.ingest()?)
                }
                None => None,
            };
            let slice = match (slice_axis, slice_value) {
                (Some(axis), Some(value)) => Some(SliceSpec { axis, value, slab }),
                _ => None,
            };
            let plot = plot::emit_plot_data(&document, slice, density_floor, matrix.as_ref())?;
            let mut text = serde_json::to_string_pretty(&plot)
                .map_err(|e| CliError::Document(e.to_string()))?;
            text.push('\n');
            write_out(&text, out.as_deref())
        }

        Command::Simulate(cmd) => sim::run(cmd),
    }
}

fn emit_document(doc: &HistogramDocument, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = document::render(doc)?;
    write_out(&text, out)
}

fn write_out(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
