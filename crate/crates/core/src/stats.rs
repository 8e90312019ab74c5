//! Agreement statistics for paired score series and paired class labels.
//!
//! Conventions: Pearson, Spearman and the t-based intervals use sample
//! moments (n - 1); Lin's concordance coefficient uses population moments (n).

use std::fmt;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::css::class_names;
use crate::error::StatsError;

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Two aligned series of measurements of the same items.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    x: Vec<f64>,
    y: Vec<f64>,
    ids: Vec<String>,
}

impl PairedSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>, ids: Vec<String>) -> Result<Self, StatsError> {
        if x.len() != y.len() || x.len() != ids.len() {
            return Err(StatsError::LengthMismatch {
                x: x.len(),
                y: y.len(),
                ids: ids.len(),
            });
        }
        if let Some(pos) = x.iter().zip(&y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(StatsError::NonFinite(pos));
        }
        Ok(Self { x, y, ids })
    }

    /// Series with positional ids `0..n`.
    pub fn from_xy(x: Vec<f64>, y: Vec<f64>) -> Result<Self, StatsError> {
        let ids = (0..x.len()).map(|i| i.to_string()).collect();
        Self::new(x, y, ids)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            ids: self.ids.clone(),
        }
    }

    fn require(&self, needed: usize) -> Result<(), StatsError> {
        if self.len() < needed {
            Err(StatsError::TooFew {
                needed,
                got: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn exact(point: f64, level: f64) -> Self {
        Self {
            point,
            lower: point,
            upper: point,
            level,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of centered cross-products.
fn co_moment(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum()
}

/// Sample variance (n - 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    co_moment(xs, xs) / (xs.len() as f64 - 1.0)
}

fn check_level(level: f64) -> Result<(), StatsError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(StatsError::Level(level))
    }
}

/// Two-sided Student t critical value, i.e. the `(1 + level) / 2` quantile.
pub fn t_critical(level: f64, df: f64) -> Result<f64, StatsError> {
    check_level(level)?;
    let t = StudentsT::new(0.0, 1.0, df).map_err(|_| StatsError::Undefined("t quantile"))?;
    Ok(t.inverse_cdf((1.0 + level) / 2.0))
}

pub fn z_critical(level: f64) -> Result<f64, StatsError> {
    check_level(level)?;
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(n.inverse_cdf((1.0 + level) / 2.0))
}

fn correlation(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let sxx = co_moment(x, x);
    let syy = co_moment(y, y);
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    Ok((co_moment(x, y) / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn pearson(s: &PairedSeries) -> Result<f64, StatsError> {
    s.require(2)?;
    correlation(&s.x, &s.y)
}

/// Ranks starting at 1; tied values share the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub fn spearman(s: &PairedSeries) -> Result<f64, StatsError> {
    s.require(2)?;
    correlation(&average_ranks(&s.x), &average_ranks(&s.y)).map_err(|e| match e {
        StatsError::ZeroVariance(which) => StatsError::AllTied(which),
        other => other,
    })
}

/// Lin's concordance correlation coefficient with a Fisher-z interval.
pub fn lin_ccc(s: &PairedSeries, level: f64) -> Result<IntervalEstimate, StatsError> {
    check_level(level)?;
    s.require(3)?;
    let n = s.len() as f64;
    let vx = co_moment(&s.x, &s.x) / n;
    let vy = co_moment(&s.y, &s.y) / n;
    let cov = co_moment(&s.x, &s.y) / n;
    let shift = mean(&s.x) - mean(&s.y);
    if vx == 0.0 && vy == 0.0 && shift == 0.0 {
        return Err(StatsError::Undefined("concordance correlation"));
    }
    if vx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if vy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    let rho = (2.0 * cov / (vx + vy + shift * shift)).clamp(-1.0, 1.0);
    if rho.abs() == 1.0 {
        return Ok(IntervalEstimate::exact(rho, level));
    }
    let r = cov / (vx * vy).sqrt();
    if r == 0.0 {
        return Err(StatsError::Undefined("concordance interval (zero correlation)"));
    }

    // Lin's asymptotic variance of atanh(rho).
    let u2 = shift * shift / (vx * vy).sqrt();
    let one_m = 1.0 - rho * rho;
    let var_z = ((1.0 - r * r) * rho * rho / (one_m * r * r)
        + 2.0 * rho.powi(3) * (1.0 - rho) * u2 / (r * one_m * one_m)
        - rho.powi(4) * u2 * u2 / (2.0 * r * r * one_m * one_m))
        / (n - 2.0);
    if var_z.is_nan() || var_z < 0.0 {
        return Err(StatsError::Undefined("concordance interval (negative variance)"));
    }
    let z = rho.atanh();
    let half = z_critical(level)? * var_z.sqrt();
    Ok(IntervalEstimate {
        point: rho,
        lower: (z - half).tanh(),
        upper: (z + half).tanh(),
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CccBand {
    #[serde(rename = "poor")]
    Poor,
    #[serde(rename = "fair")]
    Fair,
    #[serde(rename = "moderate")]
    Moderate,
    #[serde(rename = "strong")]
    Strong,
    #[serde(rename = "almost perfect")]
    AlmostPerfect,
}

impl CccBand {
    pub fn name(self) -> &'static str {
        match self {
            CccBand::Poor => "poor",
            CccBand::Fair => "fair",
            CccBand::Moderate => "moderate",
            CccBand::Strong => "strong",
            CccBand::AlmostPerfect => "almost perfect",
        }
    }
}

impl fmt::Display for CccBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_unit(value: f64) -> Result<(), StatsError> {
    if (-1.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(StatsError::OutOfRange(value))
    }
}

/// Agreement bands in 0.20 steps; a value on a boundary belongs to the lower band.
pub fn interpret_ccc(value: f64) -> Result<CccBand, StatsError> {
    check_unit(value)?;
    Ok(if value <= 0.20 {
        CccBand::Poor
    } else if value <= 0.40 {
        CccBand::Fair
    } else if value <= 0.60 {
        CccBand::Moderate
    } else if value <= 0.80 {
        CccBand::Strong
    } else {
        CccBand::AlmostPerfect
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedMeans {
    pub mean_x: IntervalEstimate,
    pub mean_y: IntervalEstimate,
    pub diff: IntervalEstimate,
}

fn t_interval(point: f64, variance: f64, n: usize, level: f64) -> Result<IntervalEstimate, StatsError> {
    check_level(level)?;
    let se = (variance / n as f64).sqrt();
    if se == 0.0 {
        return Ok(IntervalEstimate::exact(point, level));
    }
    let half = t_critical(level, n as f64 - 1.0)? * se;
    Ok(IntervalEstimate {
        point,
        lower: point - half,
        upper: point + half,
        level,
    })
}

/// t interval for the mean of `xs`.
pub fn mean_ci(xs: &[f64], level: f64) -> Result<IntervalEstimate, StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: xs.len(),
        });
    }
    t_interval(mean(xs), sample_variance(xs), xs.len(), level)
}

/// Means of both series and their difference. The difference interval is
/// built from the per-pair differences (paired design).
pub fn paired_mean_ci(s: &PairedSeries, level: f64) -> Result<PairedMeans, StatsError> {
    s.require(2)?;
    let d: Vec<f64> = s.x.iter().zip(&s.y).map(|(a, b)| a - b).collect();
    let mean_x = mean_ci(&s.x, level)?;
    let mean_y = mean_ci(&s.y, level)?;
    let diff = t_interval(mean_x.point - mean_y.point, sample_variance(&d), d.len(), level)?;
    Ok(PairedMeans {
        mean_x,
        mean_y,
        diff,
    })
}

/// Pooled-variance interval for the difference of two independent group means.
pub fn independent_diff_ci(xs: &[f64], ys: &[f64], level: f64) -> Result<IntervalEstimate, StatsError> {
    check_level(level)?;
    for v in [xs, ys] {
        if v.len() < 2 {
            return Err(StatsError::TooFew {
                needed: 2,
                got: v.len(),
            });
        }
    }
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let pooled = (co_moment(xs, xs) + co_moment(ys, ys)) / (n1 + n2 - 2.0);
    let se = (pooled * (1.0 / n1 + 1.0 / n2)).sqrt();
    let point = mean(xs) - mean(ys);
    let half = t_critical(level, n1 + n2 - 2.0)? * se;
    Ok(IntervalEstimate {
        point,
        lower: point - half,
        upper: point + half,
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Least-squares regression of y on x.
pub fn ols_fit(s: &PairedSeries) -> Result<LinearFit, StatsError> {
    s.require(2)?;
    let sxx = co_moment(&s.x, &s.x);
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    let slope = co_moment(&s.x, &s.y) / sxx;
    Ok(LinearFit {
        slope,
        intercept: mean(&s.y) - slope * mean(&s.x),
    })
}

/// Square cross-tabulation of two labelings; rows are the first labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl ContingencyTable {
    pub fn new(
        counts: Vec<Vec<u64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self, StatsError> {
        let k = counts.len();
        if counts.iter().any(|r| r.len() != k) || row_labels.len() != k || col_labels.len() != k {
            return Err(StatsError::NotSquare);
        }
        Ok(Self {
            counts,
            row_labels,
            col_labels,
        })
    }

    /// Table with generic (or, for k = 4, the conventional CSS) class names.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let names = class_names(counts.len());
        Self::new(counts, names.clone(), names)
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.k()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.k())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    fn nonempty_total(&self) -> Result<u64, StatsError> {
        match self.total() {
            0 => Err(StatsError::EmptyTable),
            t => Ok(t),
        }
    }
}

pub fn contingency(labels_a: &[usize], labels_b: &[usize], k: usize) -> Result<ContingencyTable, StatsError> {
    if labels_a.len() != labels_b.len() {
        return Err(StatsError::LengthMismatch {
            x: labels_a.len(),
            y: labels_b.len(),
            ids: labels_a.len(),
        });
    }
    let mut counts = vec![vec![0u64; k]; k];
    for (pos, (&a, &b)) in labels_a.iter().zip(labels_b).enumerate() {
        for label in [a, b] {
            if label >= k {
                return Err(StatsError::LabelRange { pos, label, k });
            }
        }
        counts[a][b] += 1;
    }
    ContingencyTable::from_counts(counts)
}

pub fn agreement_share(t: &ContingencyTable) -> Result<f64, StatsError> {
    let total = t.nonempty_total()?;
    Ok(t.diagonal() as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarOffDiagonal {
    pub count: u64,
    pub share: f64,
}

/// Items whose two class labels are at least two classes apart.
pub fn off_by_more_than_one(t: &ContingencyTable) -> Result<FarOffDiagonal, StatsError> {
    let total = t.nonempty_total()?;
    let count = t
        .counts
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| i.abs_diff(*j) >= 2))
        .map(|(_, c)| c)
        .sum();
    Ok(FarOffDiagonal {
        count,
        share: count as f64 / total as f64,
    })
}

/// Cohen's kappa, `(p_o - p_e) / (1 - p_e)`.
pub fn cohen_kappa(t: &ContingencyTable) -> Result<f64, StatsError> {
    let total = u128::from(t.nonempty_total()?);
    // Scaled by total^2 everything is an integer:
    // kappa = (total * diag - sum(row_i * col_i)) / (total^2 - sum(row_i * col_i)).
    let chance: u128 = t
        .row_sums()
        .into_iter()
        .zip(t.col_sums())
        .map(|(r, c)| u128::from(r) * u128::from(c))
        .sum();
    let denom = total * total - chance;
    if denom == 0 {
        return Err(StatsError::Undefined("kappa (chance agreement is 1)"));
    }
    let numer = (total * u128::from(t.diagonal())) as f64 - chance as f64;
    Ok(numer / denom as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KappaBand {
    #[serde(rename = "poor")]
    Poor,
    #[serde(rename = "slight")]
    Slight,
    #[serde(rename = "fair")]
    Fair,
    #[serde(rename = "moderate")]
    Moderate,
    #[serde(rename = "substantial")]
    Substantial,
    #[serde(rename = "almost perfect")]
    AlmostPerfect,
}

impl KappaBand {
    pub fn name(self) -> &'static str {
        match self {
            KappaBand::Poor => "poor",
            KappaBand::Slight => "slight",
            KappaBand::Fair => "fair",
            KappaBand::Moderate => "moderate",
            KappaBand::Substantial => "substantial",
            KappaBand::AlmostPerfect => "almost perfect",
        }
    }
}

impl fmt::Display for KappaBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Landis and Koch bands; upper bounds are inclusive.
pub fn interpret_kappa(value: f64) -> Result<KappaBand, StatsError> {
    check_unit(value)?;
    Ok(if value < 0.0 {
        KappaBand::Poor
    } else if value <= 0.20 {
        KappaBand::Slight
    } else if value <= 0.40 {
        KappaBand::Fair
    } else if value <= 0.60 {
        KappaBand::Moderate
    } else if value <= 0.80 {
        KappaBand::Substantial
    } else {
        KappaBand::AlmostPerfect
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(x: &[f64], y: &[f64]) -> PairedSeries {
        PairedSeries::from_xy(x.to_vec(), y.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pearson_examples() {
        assert!(close(pearson(&ps(&[1., 2., 3.], &[1., 2., 3.])).unwrap(), 1.0, 1e-12));
        assert!(close(pearson(&ps(&[1., 2., 3.], &[3., 2., 1.])).unwrap(), -1.0, 1e-12));
        // sxy = 4, sxx = syy = 5
        assert!(close(pearson(&ps(&[1., 2., 3., 4.], &[1., 3., 2., 4.])).unwrap(), 0.8, 1e-12));
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(
            pearson(&ps(&[1., 1., 1.], &[1., 2., 3.])),
            Err(StatsError::ZeroVariance("x"))
        );
        assert_eq!(
            pearson(&ps(&[1., 2., 3.], &[2., 2., 2.])),
            Err(StatsError::ZeroVariance("y"))
        );
        assert!(matches!(pearson(&ps(&[1.], &[1.])), Err(StatsError::TooFew { .. })));
        assert!(matches!(
            PairedSeries::from_xy(vec![1.0], vec![]),
            Err(StatsError::LengthMismatch { .. })
        ));
        assert_eq!(
            PairedSeries::from_xy(vec![1.0, f64::NAN], vec![1.0, 2.0]),
            Err(StatsError::NonFinite(1))
        );
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[1., 1., 2.]), vec![1.5, 1.5, 3.0]);
        assert_eq!(average_ranks(&[3., 1., 2., 1.]), vec![4.0, 1.5, 3.0, 1.5]);
        assert!(average_ranks(&[]).is_empty());
    }

    #[test]
    fn spearman_examples() {
        let x = [0.5, 1.0, 2.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.exp()).collect();
        assert!(close(spearman(&ps(&x, &y)).unwrap(), 1.0, 1e-12));
        assert!(close(spearman(&ps(&[1., 2., 3.], &[9., 4., 1.])).unwrap(), -1.0, 1e-12));
        // ranks x = [1.5,1.5,3], y = [1,2,3]: sxy = 1.5, sxx = 1.5, syy = 2
        let expected = 1.5 / (1.5f64 * 2.0).sqrt();
        assert!(close(spearman(&ps(&[1., 1., 2.], &[1., 2., 3.])).unwrap(), expected, 1e-12));
        assert_eq!(
            spearman(&ps(&[4., 4., 4.], &[1., 2., 3.])),
            Err(StatsError::AllTied("x"))
        );
    }

    #[test]
    fn ccc_examples() {
        let c = lin_ccc(&ps(&[1., 2., 4., 8.], &[1., 2., 4., 8.]), 0.95).unwrap();
        assert_eq!((c.point, c.lower, c.upper), (1.0, 1.0, 1.0));
        let c = lin_ccc(&ps(&[1., 2., 3.], &[2., 3., 4.]), 0.95).unwrap();
        assert!(close(c.point, 4.0 / 7.0, 1e-12));
        assert!(c.lower <= c.point && c.point <= c.upper);
    }

    #[test]
    fn ccc_errors() {
        assert_eq!(
            lin_ccc(&ps(&[2., 2., 2.], &[2., 2., 2.]), 0.95),
            Err(StatsError::Undefined("concordance correlation"))
        );
        assert_eq!(
            lin_ccc(&ps(&[2., 2., 2.], &[1., 2., 3.]), 0.95),
            Err(StatsError::ZeroVariance("x"))
        );
        assert!(matches!(lin_ccc(&ps(&[1., 2.], &[1., 2.]), 0.95), Err(StatsError::TooFew { .. })));
        assert_eq!(
            lin_ccc(&ps(&[1., 2., 3.], &[1., 2., 4.]), 1.0),
            Err(StatsError::Level(1.0))
        );
    }

    #[test]
    fn ccc_bands() {
        assert_eq!(interpret_ccc(0.69).unwrap(), CccBand::Strong);
        assert_eq!(interpret_ccc(1.0).unwrap(), CccBand::AlmostPerfect);
        assert_eq!(interpret_ccc(0.61).unwrap(), CccBand::Strong);
        assert_eq!(interpret_ccc(0.60).unwrap(), CccBand::Moderate);
        assert_eq!(interpret_ccc(0.80).unwrap(), CccBand::Strong);
        assert_eq!(interpret_ccc(0.20).unwrap(), CccBand::Poor);
        assert_eq!(interpret_ccc(0.21).unwrap(), CccBand::Fair);
        assert_eq!(interpret_ccc(-0.5).unwrap(), CccBand::Poor);
        assert!(interpret_ccc(1.01).is_err());
        assert!(interpret_ccc(f64::NAN).is_err());
    }

    #[test]
    fn kappa_bands() {
        assert_eq!(interpret_kappa(0.56).unwrap(), KappaBand::Moderate);
        assert_eq!(interpret_kappa(1.0).unwrap(), KappaBand::AlmostPerfect);
        assert_eq!(interpret_kappa(-0.1).unwrap(), KappaBand::Poor);
        assert_eq!(interpret_kappa(0.0).unwrap(), KappaBand::Slight);
        assert_eq!(interpret_kappa(0.60).unwrap(), KappaBand::Moderate);
        assert_eq!(interpret_kappa(0.61).unwrap(), KappaBand::Substantial);
        assert!(interpret_kappa(-1.5).is_err());
        assert_eq!(KappaBand::AlmostPerfect.to_string(), "almost perfect");
    }

    #[test]
    fn t_table_value() {
        assert!(close(t_critical(0.95, 10.0).unwrap(), 2.2281, 0.0005));
        assert!(close(t_critical(0.99, 5.0).unwrap(), 4.0321, 0.0005));
        assert!(close(z_critical(0.95).unwrap(), 1.95996, 1e-5));
    }

    #[test]
    fn paired_examples() {
        let m = paired_mean_ci(&ps(&[1., 2., 5.], &[1., 2., 5.]), 0.95).unwrap();
        assert_eq!((m.diff.point, m.diff.lower, m.diff.upper), (0.0, 0.0, 0.0));
        let m = paired_mean_ci(&ps(&[2., 4.], &[1., 3.]), 0.95).unwrap();
        assert_eq!((m.diff.point, m.diff.lower, m.diff.upper), (1.0, 1.0, 1.0));
        assert!(matches!(paired_mean_ci(&ps(&[1.], &[1.]), 0.95), Err(StatsError::TooFew { .. })));
    }

    #[test]
    fn mean_ci_by_hand() {
        // mean 2, s = 1, n = 3, t(0.975, 2) = 4.302653
        let c = mean_ci(&[1., 2., 3.], 0.95).unwrap();
        let half = 4.302653 / 3f64.sqrt();
        assert!(close(c.lower, 2.0 - half, 1e-5));
        assert!(close(c.upper, 2.0 + half, 1e-5));
    }

    #[test]
    fn ols_examples() {
        let x = [0., 1., 2., 5.];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = ols_fit(&ps(&x, &y)).unwrap();
        assert!(close(f.slope, 2.0, 1e-12) && close(f.intercept, 1.0, 1e-12));
        let f = ols_fit(&ps(&[0., 1.], &[0., 0.])).unwrap();
        assert_eq!((f.slope, f.intercept), (0.0, 0.0));
        assert_eq!(ols_fit(&ps(&[3., 3.], &[0., 1.])), Err(StatsError::ZeroVariance("x")));
    }

    #[test]
    fn contingency_examples() {
        let t = contingency(&[0, 1, 2, 3], &[0, 1, 2, 3], 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(t.counts[i][j], u64::from(i == j));
            }
        }
        let t = contingency(&[], &[], 4).unwrap();
        assert_eq!(t.total(), 0);
        assert!(matches!(contingency(&[0], &[], 4), Err(StatsError::LengthMismatch { .. })));
        assert_eq!(
            contingency(&[0, 4], &[0, 1], 4),
            Err(StatsError::LabelRange { pos: 1, label: 4, k: 4 })
        );
    }

    #[test]
    fn contingency_by_enumeration() {
        let a = [0, 1, 1, 2, 0, 2];
        let b = [0, 1, 2, 2, 1, 0];
        let t = contingency(&a, &b, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let n = a.iter().zip(&b).filter(|(x, y)| **x == i && **y == j).count() as u64;
                assert_eq!(t.counts[i][j], n);
            }
        }
        assert_eq!(t.counts, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
    }

    #[test]
    fn table_shares() {
        let id = ContingencyTable::from_counts(vec![vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(agreement_share(&id).unwrap(), 1.0);
        assert_eq!(off_by_more_than_one(&id).unwrap().count, 0);
        assert_eq!(cohen_kappa(&id).unwrap(), 1.0);

        let off = ContingencyTable::from_counts(vec![vec![0, 3], vec![2, 0]]).unwrap();
        assert_eq!(agreement_share(&off).unwrap(), 0.0);

        let tri = ContingencyTable::from_counts(vec![
            vec![5, 1, 0],
            vec![2, 4, 3],
            vec![0, 1, 6],
        ])
        .unwrap();
        assert_eq!(off_by_more_than_one(&tri).unwrap().count, 0);

        let empty = ContingencyTable::from_counts(vec![vec![0; 2]; 2]).unwrap();
        assert_eq!(agreement_share(&empty), Err(StatsError::EmptyTable));
        assert_eq!(off_by_more_than_one(&empty), Err(StatsError::EmptyTable));
        assert_eq!(cohen_kappa(&empty), Err(StatsError::EmptyTable));
    }

    #[test]
    fn kappa_undefined_when_all_mass_in_one_cell() {
        let t = ContingencyTable::from_counts(vec![vec![9, 0], vec![0, 0]]).unwrap();
        assert!(matches!(cohen_kappa(&t), Err(StatsError::Undefined(_))));
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            ContingencyTable::from_counts(vec![vec![1, 2], vec![3]]),
            Err(StatsError::NotSquare)
        );
    }
}
