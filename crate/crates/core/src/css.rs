//! Characteristic Scores and Scales.
//!
//! The score set is split at its mean; values below the mean form the lowest
//! class and the remainder is split again at its own mean, and so on. After
//! `iterations` splits the values left over form the top class, so there are
//! always `iterations + 1` classes (some possibly empty).

use std::io::Write;

use crate::error::CssError;

pub const DEFAULT_ITERATIONS: usize = 3;

pub const DEFAULT_CLASS_NAMES: [&str; 4] = [
    "poorly cited",
    "fairly cited",
    "remarkably cited",
    "outstandingly cited",
];

/// Where a value equal to the split mean goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Lower class holds `x < mean`; ties move up.
    #[default]
    StrictBelow,
    /// Lower class holds `x <= mean`.
    AtOrBelow,
}

impl TieRule {
    fn is_lower(self, x: f64, mean: f64) -> bool {
        match self {
            TieRule::StrictBelow => x < mean,
            TieRule::AtOrBelow => x <= mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CssClassification {
    /// Split means in the order they were computed; non-decreasing.
    pub thresholds: Vec<f64>,
    /// Class index per input position, in `0..class_count()`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    /// Splits performed on a set that still had distinct values.
    pub completed_splits: usize,
    /// Set when a split met an empty or all-equal set and could not separate anything.
    pub degenerate: bool,
}

impl CssClassification {
    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Fraction of inputs in each class.
    pub fn class_shares(&self) -> Vec<f64> {
        let n = self.labels.len() as f64;
        self.class_counts()
            .into_iter()
            .map(|c| if n > 0.0 { c as f64 / n } else { 0.0 })
            .collect()
    }

    /// Writes `record_id,score,class_index,class_name` for parallel ids and scores.
    pub fn write_csv<W: Write>(&self, ids: &[String], scores: &[f64], writer: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["record_id", "score", "class_index", "class_name"])?;
        for ((id, score), &label) in ids.iter().zip(scores).zip(&self.labels) {
            wtr.write_record([
                id.as_str(),
                &score.to_string(),
                &label.to_string(),
                &self.class_names[label],
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Class names for `k` classes: the four conventional names when `k == 4`,
/// generic `class N` otherwise.
pub fn class_names(k: usize) -> Vec<String> {
    if k == DEFAULT_CLASS_NAMES.len() {
        DEFAULT_CLASS_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..k).map(|i| format!("class {i}")).collect()
    }
}

pub fn css_classify(scores: &[f64], iterations: usize) -> Result<CssClassification, CssError> {
    css_classify_with(scores, iterations, TieRule::default())
}

pub fn css_classify_with(
    scores: &[f64],
    iterations: usize,
    ties: TieRule,
) -> Result<CssClassification, CssError> {
    if scores.is_empty() {
        return Err(CssError::Empty);
    }
    if iterations == 0 {
        return Err(CssError::Iterations);
    }
    if let Some(pos) = scores.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(CssError::InvalidScore(pos));
    }

    let top = iterations;
    let mut labels = vec![top; scores.len()];
    let mut upper: Vec<usize> = (0..scores.len()).collect();
    let mut thresholds = Vec::with_capacity(iterations);
    let mut completed_splits = 0;
    let mut degenerate = false;

    for class in 0..iterations {
        if upper.is_empty() {
            degenerate = true;
            break;
        }
        let mean = upper.iter().map(|&i| scores[i]).sum::<f64>() / upper.len() as f64;
        let first = scores[upper[0]];
        if upper.iter().all(|&i| scores[i] == first) {
            degenerate = true;
        } else if !degenerate {
            completed_splits += 1;
        }
        thresholds.push(mean);
        upper.retain(|&i| {
            if ties.is_lower(scores[i], mean) {
                labels[i] = class;
                false
            } else {
                true
            }
        });
    }

    Ok(CssClassification {
        thresholds,
        labels,
        class_names: class_names(iterations + 1),
        completed_splits,
        degenerate,
    })
}
