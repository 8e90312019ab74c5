//! Field-normalized citation scores from two bibliographic sources and the
//! statistics that measure how well the two score series agree.
//!
//! The usual flow is [`records::load_dataset`] for the focal and reference
//! sets of each source, [`normalize::compute_ref_rates`] and
//! [`normalize::ncs`] per source, [`records::match_by_doi`] to pair the focal
//! papers, then the [`stats`] and [`css`] functions on the paired scores.
//! [`pipeline::run`] does all of it and writes a JSON report.

pub mod css;
pub mod error;
pub mod normalize;
pub mod pipeline;
pub mod records;
pub mod stats;
pub mod synth;

pub use css::{css_classify, CssClassification, TieRule};
pub use error::{CssError, NormalizeError, RecordError, StatsError};
pub use normalize::{compute_ref_rates, ncs, score_set, NcsScore, RefRates};
pub use pipeline::{analyze, run, AnalysisParams, ConcordanceReport, PipelineError, RunConfig};
pub use records::{
    filter_by_affiliation, load_dataset, match_by_doi, normalize_doi, Dataset, FieldAssignment,
    FieldLevel, Format, MatchedPairs, PubRecord,
};
pub use stats::{ContingencyTable, IntervalEstimate, PairedSeries};
