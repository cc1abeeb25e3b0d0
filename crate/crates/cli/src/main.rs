mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geospec::FieldLevel;

use crate::commands::Figure;
use crate::config::{parse_formats, ConfigFile, Overrides, RunConfig, TableFormat, CONFIG_ENV};
use crate::error::Failure;

/// Regional specialization (RSI) and citation impact (RCI) indicators.
#[derive(Debug, Parser)]
#[command(name = "geospec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute indicator rows for every eligible region.
    Compute {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        tables: Tables,
    },
    /// Top-N RSI ranking among regions above the baseline threshold.
    Rank {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        tables: Tables,
        /// Number of regions to keep [default: 20]
        #[arg(long)]
        top: Option<usize>,
    },
    /// Partition regions into RSI x RCI profiles.
    Classify {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        tables: Tables,
    },
    /// Render a figure as SVG.
    Plot {
        #[arg(value_enum)]
        figure: FigureArg,
        #[command(flatten)]
        shared: Shared,
        /// GeoJSON FeatureCollection of NUTS-3 polygons (required for `map`)
        #[arg(long)]
        geojson: Option<PathBuf>,
        /// Feature property holding the NUTS code [default: NUTS_ID]
        #[arg(long)]
        nuts_property: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    /// Documents vs. citations, bubbles encode RSI
    Fig1,
    /// RSI vs. RCI with quadrant reference lines
    Fig3,
    /// RSI choropleth
    Map,
}

#[derive(Debug, Args)]
struct Shared {
    /// Dataset CSV (nuts_code,region_name,country,level,docs,cites)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Reference totals CSV (level,docs,cites); defaults to dataset sums
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Focal field level [default: AI]
    #[arg(long)]
    focal: Option<FieldLevel>,
    /// Baseline field level [default: COMPU]
    #[arg(long)]
    baseline: Option<FieldLevel>,
    /// Minimum baseline documents for the ranking [default: 200]
    #[arg(long)]
    min_baseline_docs: Option<u64>,
    /// Minimum focal documents for the quadrant plot [default: 100]
    #[arg(long)]
    min_focal_docs: Option<u64>,
    /// Output directory [default: .]
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Config file of `key = value` lines; flags take precedence
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Tables {
    /// Comma-separated table formats: csv, json [default: csv,json]
    #[arg(long, value_parser = parse_format_list)]
    formats: Option<FormatList>,
}

#[derive(Debug, Clone)]
struct FormatList(Vec<TableFormat>);

fn parse_format_list(s: &str) -> Result<FormatList, String> {
    parse_formats(s).map(FormatList)
}

impl Tables {
    fn into_formats(self) -> Option<Vec<TableFormat>> {
        self.formats.map(|f| f.0)
    }
}

impl Shared {
    fn into_overrides(self) -> (Overrides, Option<PathBuf>) {
        let overrides = Overrides {
            input: self.input,
            reference: self.reference,
            focal: self.focal,
            baseline: self.baseline,
            min_baseline_docs: self.min_baseline_docs,
            min_focal_docs: self.min_focal_docs,
            out_dir: self.out_dir,
            ..Overrides::default()
        };
        (overrides, self.config)
    }
}

fn resolve(overrides: Overrides, config_path: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let file = match config_path {
        Some(path) => ConfigFile::load(&path)?,
        None => ConfigFile::default(),
    };
    RunConfig::resolve(overrides, &file)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { shared, tables } => {
            let (mut o, path) = shared.into_overrides();
            o.formats = tables.into_formats();
            commands::compute(&resolve(o, path)?)
        }
        Command::Rank {
            shared,
            tables,
            top,
        } => {
            let (mut o, path) = shared.into_overrides();
            o.formats = tables.into_formats();
            o.top = top;
            commands::rank(&resolve(o, path)?)
        }
        Command::Classify { shared, tables } => {
            let (mut o, path) = shared.into_overrides();
            o.formats = tables.into_formats();
            commands::classify(&resolve(o, path)?)
        }
        Command::Plot {
            figure,
            shared,
            geojson,
            nuts_property,
        } => {
            let (mut o, path) = shared.into_overrides();
            o.geojson = geojson;
            o.nuts_property = nuts_property;
            let figure = match figure {
                FigureArg::Fig1 => Figure::Fig1,
                FigureArg::Fig3 => Figure::Fig3,
                FigureArg::Map => Figure::Map,
            };
            commands::plot(&resolve(o, path)?, figure)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
