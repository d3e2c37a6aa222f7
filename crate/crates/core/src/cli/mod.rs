//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid configuration or usage, 3 numerical
//! failure, 1 I/O failure. Nothing is written unless the run succeeds.

pub mod config;
pub mod figures;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{run_campaign, CampaignReport, SchemeMetrics};
use crate::optimizer::{joint_optimize, OptimizationResult};
use config::FileConfig;
use figures::{figure_table, Figure, Table};

#[derive(Debug, Parser)]
#[command(
    name = "rfd2d",
    version,
    about = "Mode selection and time allocation for RF-powered D2D pairs"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; omitted or empty means built-in defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `campaign.seed` and `instance.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads for the trial loop.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides `campaign.trials`.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jointly optimize one instance.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Monte-Carlo comparison of the configured schemes.
    Campaign {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        workers: Workers,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// CSV data behind one figure.
    Figures {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        workers: Workers,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();

    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Optimize { common, format } => {
            let file = load(common, None)?;
            let (params, links) = file.instance_links()?;
            let result = joint_optimize(&links, &params)?;
            emit(common, &optimize_output(&file, &result, *format)?)
        }
        Command::Campaign {
            common,
            workers,
            format,
        } => {
            let file = load(common, workers.trials)?;
            let cfg = file.campaign_config()?;
            let report = with_threads(workers.threads, || run_campaign(&cfg))?;
            emit(common, &campaign_output(&file, &report, *format)?)
        }
        Command::Figures {
            figure,
            common,
            workers,
        } => {
            let file = load(common, workers.trials)?;
            file.campaign_config()?;
            let table = with_threads(workers.threads, || figure_table(*figure, &file))?;
            emit(common, &figure_output(&file, *figure, &table)?)
        }
    }
}

fn load(common: &Common, trials: Option<usize>) -> Result<FileConfig> {
    let mut file = FileConfig::load(common.config.as_deref())?;
    file.override_with(common.seed, trials);
    Ok(file)
}

fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    F: FnOnce() -> Result<T> + Send,
    T: Send,
{
    match threads {
        None => f(),
        Some(0) => Err(Error::Config("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn csv_header(out: &mut String, command: &str, file: &FileConfig) -> Result<()> {
    let _ = writeln!(out, "# command: {command}");
    let _ = writeln!(out, "# config: {}", serde_json::to_string(file)?);
    let _ = writeln!(out, "# seed: {}", file.campaign.seed);
    Ok(())
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a FileConfig,
    seed: u64,
    result: &'a T,
}

fn json_output<T: Serialize>(
    command: &str,
    file: &FileConfig,
    seed: u64,
    result: &T,
) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&Envelope {
        command,
        config: file,
        seed,
        result,
    })?;
    text.push('\n');
    Ok(text)
}

/// Serialized `optimize` result.
pub fn optimize_output(
    file: &FileConfig,
    r: &OptimizationResult,
    format: Format,
) -> Result<String> {
    if format == Format::Json {
        return json_output("optimize", file, file.instance.seed, r);
    }
    let mut out = String::new();
    let _ = writeln!(out, "# command: optimize");
    let _ = writeln!(out, "# config: {}", serde_json::to_string(file)?);
    let _ = writeln!(out, "# seed: {}", file.instance.seed);
    out.push_str("pair,mode,t_e,t_d,tau\n");
    for (i, ((m, td), tau)) in r
        .modes
        .iter()
        .zip(&r.td_star)
        .zip(&r.per_pair_tau)
        .enumerate()
    {
        let _ = writeln!(out, "{i},{},{},{td},{tau}", m.indicator(), r.te_star);
    }
    let _ = writeln!(out, "sum,,{},,{}", r.te_star, r.tau_s);
    Ok(out)
}

/// Serialized campaign report; the CSV form has one row per
/// scheme × cell × metric.
pub fn campaign_output(
    file: &FileConfig,
    report: &CampaignReport,
    format: Format,
) -> Result<String> {
    if format == Format::Json {
        return json_output("campaign", file, file.campaign.seed, report);
    }
    let mut out = String::new();
    csv_header(&mut out, "campaign", file)?;
    out.push_str("n_nodes,n_exp,field_size,scheme,metric,value\n");
    for cell in &report.cells {
        for (scheme, metric, value) in cell.metric_rows() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                cell.cell.n_nodes,
                cell.cell.n_exp,
                cell.cell.field_size,
                scheme,
                metric,
                fmt_value(value)
            );
        }
    }
    debug_assert_eq!(
        out.lines().filter(|l| !l.starts_with('#')).count() - 1,
        report.cells.len() * report.config.schemes.len() * SchemeMetrics::METRICS.len()
    );
    Ok(out)
}

pub fn figure_output(file: &FileConfig, fig: Figure, table: &Table) -> Result<String> {
    let mut out = String::new();
    csv_header(&mut out, &format!("figures {}", fig.id()), file)?;
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_value(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}
