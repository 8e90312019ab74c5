//! End-to-end comparison of normalized scores from two sources.
//!
//! Stages: load, optional affiliation filter, reference rates per source,
//! DOI matching, scoring, dropping pairs without a defined score on either
//! side, statistics, CSS classes per series and the class contingency table.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::css::{css_classify, CssClassification};
use crate::error::{CssError, NormalizeError, RecordError, StatsError};
use crate::normalize::{compute_ref_rates, ncs, RefRates};
use crate::records::{filter_by_affiliation, load_dataset, match_by_doi, Dataset, FieldLevel, Format};
use crate::stats::{
    agreement_share, cohen_kappa, contingency, interpret_ccc, interpret_kappa, lin_ccc,
    off_by_more_than_one, ols_fit, paired_mean_ci, pearson, spearman, CccBand, ContingencyTable,
    FarOffDiagonal, IntervalEstimate, KappaBand, LinearFit, PairedSeries,
};

pub const REPORT_FILE: &str = "report.json";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const MEANS_FILE: &str = "means.csv";
pub const MIN_SCORED_PAIRS: usize = 3;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("loading {stage}: {source}")]
    Load {
        stage: &'static str,
        #[source]
        source: RecordError,
    },
    #[error("reference rates for source {source_label}: {error}")]
    Rates {
        source_label: &'static str,
        #[source]
        error: NormalizeError,
    },
    #[error("fewer than {MIN_SCORED_PAIRS} scored pairs (got {0})")]
    TooFewScored(usize),
    #[error("{stage}: {error}")]
    Stats {
        stage: &'static str,
        #[source]
        error: StatsError,
    },
    #[error("CSS classification of source {source_label}: {error}")]
    Css {
        source_label: &'static str,
        #[source]
        error: CssError,
    },
    #[error("writing {path}: {error}")]
    Output { path: String, error: String },
}

impl PipelineError {
    /// 1 for input or validation problems, 2 when a statistic is undefined.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::TooFewScored(_)
            | PipelineError::Stats { .. }
            | PipelineError::Css { .. } => 2,
            _ => 1,
        }
    }
}

fn stats_err(stage: &'static str) -> impl FnOnce(StatsError) -> PipelineError {
    move |error| PipelineError::Stats { stage, error }
}

/// Parameters of the analysis proper, independent of where data lives.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub level_a: FieldLevel,
    pub level_b: FieldLevel,
    pub min_cell_size: u64,
    pub css_iterations: usize,
    pub confidence: f64,
    pub affiliation_variants: Vec<String>,
    pub exclude_ids: Vec<String>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            level_a: FieldLevel::L1,
            level_b: FieldLevel::Flat,
            min_cell_size: 1,
            css_iterations: crate::css::DEFAULT_ITERATIONS,
            confidence: crate::stats::DEFAULT_LEVEL,
            affiliation_variants: Vec::new(),
            exclude_ids: Vec::new(),
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(PipelineError::Config(format!(
                "confidence {} outside (0, 1)",
                self.confidence
            )));
        }
        if self.min_cell_size == 0 {
            return Err(PipelineError::Config("min-cell-size must be at least 1".into()));
        }
        if self.css_iterations == 0 {
            return Err(PipelineError::Config("css-iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub focal_a: PathBuf,
    pub focal_b: PathBuf,
    pub ref_a: PathBuf,
    pub ref_b: PathBuf,
    pub params: AnalysisParams,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn output_paths(&self) -> [PathBuf; 3] {
        [REPORT_FILE, SCATTER_FILE, MEANS_FILE].map(|f| self.out_dir.join(f))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.params.validate()?;
        let outputs = self.output_paths();
        for input in [&self.focal_a, &self.focal_b, &self.ref_a, &self.ref_b] {
            if *input == self.out_dir || outputs.contains(input) {
                return Err(PipelineError::Config(format!(
                    "input {} collides with an output path",
                    input.display()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub level_a: FieldLevel,
    pub level_b: FieldLevel,
    pub min_cell_size: u64,
    pub css_iterations: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Funnel {
    pub focal_a_loaded: usize,
    pub focal_b_loaded: usize,
    pub focal_a_filtered: usize,
    pub focal_b_filtered: usize,
    pub reference_a: usize,
    pub reference_b: usize,
    pub rate_cells_a: usize,
    pub rate_cells_b: usize,
    pub n_matched: usize,
    pub unmatched_a: usize,
    pub unmatched_b: usize,
    pub ambiguous_a: usize,
    pub ambiguous_b: usize,
    pub n_scored: usize,
    pub dropped_undefined_a: usize,
    pub dropped_undefined_b: usize,
    pub dropped_undefined_both: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CccReport {
    #[serde(flatten)]
    pub estimate: IntervalEstimate,
    pub band: CccBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeansReport {
    pub a: IntervalEstimate,
    pub b: IntervalEstimate,
    pub diff: IntervalEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub x: &'static str,
    pub y: &'static str,
    #[serde(flatten)]
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CssReport {
    pub thresholds: Vec<f64>,
    pub completed_splits: usize,
    pub degenerate: bool,
    pub class_counts: Vec<usize>,
}

impl From<&CssClassification> for CssReport {
    fn from(c: &CssClassification) -> Self {
        Self {
            thresholds: c.thresholds.clone(),
            completed_splits: c.completed_splits,
            degenerate: c.degenerate,
            class_counts: c.class_counts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CssPair {
    pub a: CssReport,
    pub b: CssReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaReport {
    pub value: f64,
    pub band: KappaBand,
}

/// Everything the analysis reports; serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceReport {
    pub config: ReportConfig,
    pub counts: Funnel,
    pub pearson: f64,
    pub spearman: f64,
    pub ccc: CccReport,
    pub means: MeansReport,
    pub regression: RegressionReport,
    pub css: CssPair,
    /// Rows are source A classes, columns source B classes.
    pub contingency: ContingencyTable,
    pub agreement_share: f64,
    pub off_by_more_than_one: FarOffDiagonal,
    pub kappa: KappaReport,
}

impl ConcordanceReport {
    /// Pretty JSON with every non-integer number rounded to 6 significant digits.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut value);
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }
}

pub fn round_sig6(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|f| serde_json::Number::from_f64(round_sig6(f))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Report plus the scored pairs and class labels it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub report: ConcordanceReport,
    pub scored: PairedSeries,
    pub classes_a: CssClassification,
    pub classes_b: CssClassification,
}

fn apply_affiliation_filter(ds: &Dataset, params: &AnalysisParams) -> Result<Dataset, RecordError> {
    if !params.affiliation_variants.is_empty() {
        return filter_by_affiliation(ds, &params.affiliation_variants, &params.exclude_ids);
    }
    if params.exclude_ids.is_empty() {
        return Ok(ds.clone());
    }
    let records = ds
        .records()
        .iter()
        .filter(|r| !params.exclude_ids.contains(&r.record_id))
        .cloned()
        .collect();
    Dataset::new(ds.source_label(), records)
}

fn rates(reference: &Dataset, level: FieldLevel, min: u64, label: &'static str) -> Result<RefRates, PipelineError> {
    compute_ref_rates(reference, level, min).map_err(|error| PipelineError::Rates {
        source_label: label,
        error,
    })
}

/// Runs the analysis on datasets already in memory.
pub fn analyze(
    params: &AnalysisParams,
    focal_a: &Dataset,
    focal_b: &Dataset,
    ref_a: &Dataset,
    ref_b: &Dataset,
) -> Result<Analysis, PipelineError> {
    params.validate()?;
    let mut funnel = Funnel {
        focal_a_loaded: focal_a.len(),
        focal_b_loaded: focal_b.len(),
        reference_a: ref_a.len(),
        reference_b: ref_b.len(),
        ..Funnel::default()
    };

    let load = |stage| move |source| PipelineError::Load { stage, source };
    let focal_a = apply_affiliation_filter(focal_a, params).map_err(load("focal A"))?;
    let focal_b = apply_affiliation_filter(focal_b, params).map_err(load("focal B"))?;
    funnel.focal_a_filtered = focal_a.len();
    funnel.focal_b_filtered = focal_b.len();
    info!(
        "focal papers after filter: A {} of {}, B {} of {}",
        focal_a.len(),
        funnel.focal_a_loaded,
        focal_b.len(),
        funnel.focal_b_loaded
    );

    let rates_a = rates(ref_a, params.level_a, params.min_cell_size, "A")?;
    let rates_b = rates(ref_b, params.level_b, params.min_cell_size, "B")?;
    funnel.rate_cells_a = rates_a.len();
    funnel.rate_cells_b = rates_b.len();
    info!(
        "reference rates: A {} cells from {} papers, B {} cells from {} papers",
        rates_a.len(),
        ref_a.len(),
        rates_b.len(),
        ref_b.len()
    );

    let matched = match_by_doi(&focal_a, &focal_b);
    funnel.n_matched = matched.len();
    funnel.unmatched_a = matched.unmatched_a;
    funnel.unmatched_b = matched.unmatched_b;
    funnel.ambiguous_a = matched.ambiguous_a.len();
    funnel.ambiguous_b = matched.ambiguous_b.len();
    info!(
        "matched by DOI: {} pairs ({} of A unmatched, {} of B unmatched)",
        matched.len(),
        matched.unmatched_a,
        matched.unmatched_b
    );

    let (mut xs, mut ys, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    for (ra, rb) in &matched.pairs {
        match (ncs(ra, &rates_a).value, ncs(rb, &rates_b).value) {
            (Some(a), Some(b)) => {
                xs.push(a);
                ys.push(b);
                ids.push(ra.record_id.clone());
            }
            (None, Some(_)) => funnel.dropped_undefined_a += 1,
            (Some(_), None) => funnel.dropped_undefined_b += 1,
            (None, None) => funnel.dropped_undefined_both += 1,
        }
    }
    funnel.n_scored = xs.len();
    info!(
        "scored pairs: {} (dropped: {} undefined in A, {} in B, {} in both)",
        funnel.n_scored,
        funnel.dropped_undefined_a,
        funnel.dropped_undefined_b,
        funnel.dropped_undefined_both
    );
    if xs.len() < MIN_SCORED_PAIRS {
        return Err(PipelineError::TooFewScored(xs.len()));
    }

    let scored = PairedSeries::new(xs, ys, ids).map_err(stats_err("pairing"))?;
    let pearson = pearson(&scored).map_err(stats_err("pearson"))?;
    let spearman = spearman(&scored).map_err(stats_err("spearman"))?;
    let ccc = lin_ccc(&scored, params.confidence).map_err(stats_err("concordance"))?;
    let ccc_band = interpret_ccc(ccc.point).map_err(stats_err("concordance band"))?;
    let means = paired_mean_ci(&scored, params.confidence).map_err(stats_err("paired means"))?;
    let fit = ols_fit(&scored).map_err(stats_err("regression"))?;

    let classify = |xs: &[f64], label| {
        css_classify(xs, params.css_iterations).map_err(|error| PipelineError::Css {
            source_label: label,
            error,
        })
    };
    let classes_a = classify(scored.x(), "A")?;
    let classes_b = classify(scored.y(), "B")?;
    let k = params.css_iterations + 1;
    let table = contingency(&classes_a.labels, &classes_b.labels, k).map_err(stats_err("contingency"))?;
    let agreement = agreement_share(&table).map_err(stats_err("agreement"))?;
    let far = off_by_more_than_one(&table).map_err(stats_err("agreement"))?;
    let kappa = cohen_kappa(&table).map_err(stats_err("kappa"))?;
    let kappa_band = interpret_kappa(kappa).map_err(stats_err("kappa band"))?;

    let report = ConcordanceReport {
        config: ReportConfig {
            level_a: params.level_a,
            level_b: params.level_b,
            min_cell_size: params.min_cell_size,
            css_iterations: params.css_iterations,
            confidence: params.confidence,
        },
        counts: funnel,
        pearson,
        spearman,
        ccc: CccReport {
            estimate: ccc,
            band: ccc_band,
        },
        means: MeansReport {
            a: means.mean_x,
            b: means.mean_y,
            diff: means.diff,
        },
        regression: RegressionReport {
            x: "ncs_a",
            y: "ncs_b",
            fit,
        },
        css: CssPair {
            a: (&classes_a).into(),
            b: (&classes_b).into(),
        },
        contingency: table,
        agreement_share: agreement,
        off_by_more_than_one: far,
        kappa: KappaReport {
            value: kappa,
            band: kappa_band,
        },
    };
    Ok(Analysis {
        report,
        scored,
        classes_a,
        classes_b,
    })
}

fn load(path: &Path, label: &str, stage: &'static str) -> Result<Dataset, PipelineError> {
    load_dataset(path, Format::from_path(path), label).map_err(|source| PipelineError::Load { stage, source })
}

/// Loads the four datasets named in `config`, analyzes them and writes
/// `report.json`, `scatter.csv` and `means.csv` into the output directory.
pub fn run(config: &RunConfig) -> Result<Analysis, PipelineError> {
    config.validate()?;
    let focal_a = load(&config.focal_a, "A", "focal A")?;
    let focal_b = load(&config.focal_b, "B", "focal B")?;
    let ref_a = load(&config.ref_a, "A", "reference A")?;
    let ref_b = load(&config.ref_b, "B", "reference B")?;
    info!(
        "loaded focal A {}, focal B {}, reference A {}, reference B {}",
        focal_a.len(),
        focal_b.len(),
        ref_a.len(),
        ref_b.len()
    );
    let analysis = analyze(&config.params, &focal_a, &focal_b, &ref_a, &ref_b)?;

    fs::create_dir_all(&config.out_dir).map_err(|e| output_err(&config.out_dir, e))?;
    let report_path = config.out_dir.join(REPORT_FILE);
    fs::write(&report_path, analysis.report.to_json()).map_err(|e| output_err(&report_path, e))?;
    emit_plot_data(&analysis, &config.out_dir)?;
    Ok(analysis)
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Output {
        path: path.display().to_string(),
        error: e.to_string(),
    }
}

/// Writes `scatter.csv` (one row per scored pair, with the regression line
/// evaluated at `ncs_a`) and `means.csv` (means and difference with intervals).
pub fn emit_plot_data(analysis: &Analysis, out_dir: &Path) -> Result<(), PipelineError> {
    let scatter = out_dir.join(SCATTER_FILE);
    write_csv(&scatter, |w| {
        let fit = &analysis.report.regression.fit;
        w.write_record(["record_id", "ncs_a", "ncs_b", "class_a", "class_b", "fit_b"])?;
        let s = &analysis.scored;
        for i in 0..s.len() {
            w.write_record([
                s.ids()[i].as_str(),
                &s.x()[i].to_string(),
                &s.y()[i].to_string(),
                &analysis.classes_a.labels[i].to_string(),
                &analysis.classes_b.labels[i].to_string(),
                &fit.predict(s.x()[i]).to_string(),
            ])?;
        }
        Ok(())
    })?;

    let means = out_dir.join(MEANS_FILE);
    write_csv(&means, |w| {
        w.write_record(["series", "mean", "ci_lower", "ci_upper"])?;
        let m = &analysis.report.means;
        for (name, est) in [("a", &m.a), ("b", &m.b), ("diff", &m.diff)] {
            w.write_record([
                name,
                &est.point.to_string(),
                &est.lower.to_string(),
                &est.upper.to_string(),
            ])?;
        }
        Ok(())
    })
}

fn write_csv<F>(path: &Path, body: F) -> Result<(), PipelineError>
where
    F: FnOnce(&mut csv::Writer<BufWriter<File>>) -> csv::Result<()>,
{
    let file = File::create(path).map_err(|e| output_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    body(&mut w).map_err(|e| output_err(path, e))?;
    w.flush().map_err(|e| output_err(path, e))?;
    Ok(())
}

/// Reads lines of a plain-text list, skipping blanks and `#` comments.
pub fn read_list(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}
