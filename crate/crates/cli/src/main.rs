use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};

use normcite::pipeline::{read_list, AnalysisParams, RunConfig};
use normcite::records::match_audit;
use normcite::{compute_ref_rates, load_dataset, run, FieldLevel, Format};

#[derive(Parser)]
#[command(name = "normcite", version, about = "Compare field-normalized citation scores from two sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score both sources, match them by DOI and write the concordance report.
    Analyze(AnalyzeArgs),
    /// Compute reference citation rates and write them as CSV.
    Rates(RatesArgs),
    /// Match two datasets by DOI and write an audit CSV.
    Match(MatchArgs),
}

#[derive(Parser)]
struct AnalyzeArgs {
    #[arg(long)]
    focal_a: PathBuf,
    #[arg(long)]
    focal_b: PathBuf,
    #[arg(long)]
    ref_a: PathBuf,
    #[arg(long)]
    ref_b: PathBuf,
    #[arg(long, value_parser = parse_level)]
    level_a: FieldLevel,
    #[arg(long, value_parser = parse_level)]
    level_b: FieldLevel,
    #[arg(long, default_value_t = 1)]
    min_cell_size: u64,
    #[arg(long, default_value_t = 3)]
    css_iterations: usize,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    /// File with one affiliation variant per line.
    #[arg(long)]
    affiliation_variants: Option<PathBuf>,
    /// File with one record_id per line to drop from the focal sets.
    #[arg(long)]
    exclude_ids: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Parser)]
struct RatesArgs {
    /// Reference dataset (.csv or .json).
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, value_parser = parse_level)]
    level: FieldLevel,
    #[arg(long, default_value_t = 1)]
    min_cell_size: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct MatchArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_level(s: &str) -> Result<FieldLevel, String> {
    s.parse().map_err(|e: normcite::RecordError| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Rates(args) => rates(args),
        Command::Match(args) => match_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            error!("{msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn input_err(e: impl std::fmt::Display) -> (u8, String) {
    (1, e.to_string())
}

fn analyze(args: AnalyzeArgs) -> CmdResult {
    let mut params = AnalysisParams {
        level_a: args.level_a,
        level_b: args.level_b,
        min_cell_size: args.min_cell_size,
        css_iterations: args.css_iterations,
        confidence: args.confidence,
        ..AnalysisParams::default()
    };
    if let Some(path) = &args.affiliation_variants {
        params.affiliation_variants = read_list(path).map_err(input_err)?;
    }
    if let Some(path) = &args.exclude_ids {
        params.exclude_ids = read_list(path).map_err(input_err)?;
    }
    let config = RunConfig {
        focal_a: args.focal_a,
        focal_b: args.focal_b,
        ref_a: args.ref_a,
        ref_b: args.ref_b,
        params,
        out_dir: args.out,
    };
    let analysis = run(&config).map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    let r = &analysis.report;
    info!(
        "n = {}: pearson {:.3}, ccc {:.3} ({}), kappa {:.3} ({})",
        r.counts.n_scored,
        r.pearson,
        r.ccc.estimate.point,
        r.ccc.band,
        r.kappa.value,
        r.kappa.band
    );
    info!("wrote report to {}", config.out_dir.display());
    Ok(())
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn rates(args: RatesArgs) -> CmdResult {
    let ds = load_dataset(&args.reference, Format::from_path(&args.reference), "ref").map_err(input_err)?;
    let rates = compute_ref_rates(&ds, args.level, args.min_cell_size).map_err(input_err)?;
    info!("{} cells from {} reference papers", rates.len(), ds.len());
    let w = output(args.out.as_deref()).map_err(input_err)?;
    rates.write_csv(w).map_err(input_err)
}

fn match_cmd(args: MatchArgs) -> CmdResult {
    let a = load_dataset(&args.a, Format::from_path(&args.a), "A").map_err(input_err)?;
    let b = load_dataset(&args.b, Format::from_path(&args.b), "B").map_err(input_err)?;
    let matched = normcite::match_by_doi(&a, &b);
    info!(
        "{} pairs; {} of {} in A and {} of {} in B unmatched",
        matched.len(),
        matched.unmatched_a,
        a.len(),
        matched.unmatched_b,
        b.len()
    );
    let mut w = csv::Writer::from_writer(output(args.out.as_deref()).map_err(input_err)?);
    for row in match_audit(&a, &b) {
        w.serialize(row).map_err(input_err)?;
    }
    w.flush().map_err(input_err)
}
