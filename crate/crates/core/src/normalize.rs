//! Expected citation rates and normalized citation scores.
//!
//! A paper's normalized citation score is its citation count divided by the
//! mean citation count of the reference papers sharing its field and
//! publication year. Papers with several fields get the arithmetic mean of
//! their per-field scores.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::NormalizeError;
use crate::records::{Dataset, FieldLevel, PubRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCell {
    pub mean_citations: f64,
    pub paper_count: u64,
}

/// Mean citations per `(field_id, pub_year)` at one field level.
#[derive(Debug, Clone, PartialEq)]
pub struct RefRates {
    level: FieldLevel,
    cells: BTreeMap<(String, i32), RateCell>,
}

impl RefRates {
    pub fn level(&self) -> FieldLevel {
        self.level
    }

    pub fn get(&self, field_id: &str, pub_year: i32) -> Option<&RateCell> {
        // BTreeMap<(String, i32)> cannot be queried by (&str, i32) without allocating.
        self.cells.get(&(field_id.to_string(), pub_year))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, i32, &RateCell)> {
        self.cells.iter().map(|((f, y), c)| (f.as_str(), *y, c))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Writes `level,field_id,pub_year,mean_citations,paper_count`, sorted by field and year.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), NormalizeError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["level", "field_id", "pub_year", "mean_citations", "paper_count"])?;
        for (field, year, cell) in self.cells() {
            wtr.write_record([
                self.level.as_str(),
                field,
                &year.to_string(),
                &cell.mean_citations.to_string(),
                &cell.paper_count.to_string(),
            ])?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, NormalizeError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut level = None;
        let mut cells = BTreeMap::new();
        for (idx, row) in rdr.records().enumerate() {
            let row_no = idx + 1;
            let row = row?;
            let bad = |reason: &str| NormalizeError::RatesRow {
                row: row_no,
                reason: reason.to_string(),
            };
            if row.len() != 5 {
                return Err(bad("expected 5 columns"));
            }
            let row_level: FieldLevel = row[0].parse().map_err(|_| bad("unknown level"))?;
            if *level.get_or_insert(row_level) != row_level {
                return Err(bad("mixed levels"));
            }
            let year: i32 = row[2].parse().map_err(|_| bad("invalid pub_year"))?;
            let mean: f64 = row[3].parse().map_err(|_| bad("invalid mean_citations"))?;
            let count: u64 = row[4].parse().map_err(|_| bad("invalid paper_count"))?;
            if !(mean.is_finite() && mean >= 0.0) || count == 0 {
                return Err(bad("mean must be >= 0 and count >= 1"));
            }
            cells.insert(
                (row[1].to_string(), year),
                RateCell {
                    mean_citations: mean,
                    paper_count: count,
                },
            );
        }
        let level = level.ok_or_else(|| NormalizeError::RatesRow {
            row: 0,
            reason: "no rate cells".into(),
        })?;
        Ok(Self { level, cells })
    }
}

/// Builds expected citation rates from `reference` at `level`.
///
/// A paper with several fields at the level contributes its full citation
/// count to each of its cells. Cells with fewer than `min_cell_size` papers
/// are left out.
pub fn compute_ref_rates(
    reference: &Dataset,
    level: FieldLevel,
    min_cell_size: u64,
) -> Result<RefRates, NormalizeError> {
    if min_cell_size == 0 {
        return Err(NormalizeError::MinCellSize);
    }
    let mut sums: BTreeMap<(String, i32), (u128, u64)> = BTreeMap::new();
    for rec in reference.records() {
        for f in rec.fields_at(level) {
            let e = sums.entry((f.field_id.clone(), rec.pub_year)).or_default();
            e.0 += u128::from(rec.citations);
            e.1 += 1;
        }
    }
    if sums.is_empty() {
        return Err(NormalizeError::NoAssignments(level));
    }
    let cells = sums
        .into_iter()
        .filter(|(_, (_, n))| *n >= min_cell_size)
        .map(|(k, (sum, n))| {
            (
                k,
                RateCell {
                    mean_citations: sum as f64 / n as f64,
                    paper_count: n,
                },
            )
        })
        .collect();
    Ok(RefRates { level, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    MissingCell,
    ZeroMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldOutcome {
    Defined(f64),
    Excluded(Exclusion),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldNcs {
    pub field_id: String,
    pub outcome: FieldOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NcsScore {
    pub record_id: String,
    /// `None` when no field assignment produced a defined ratio.
    pub value: Option<f64>,
    pub per_field: Vec<FieldNcs>,
}

impl NcsScore {
    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_field.iter().filter_map(|f| match f.outcome {
            FieldOutcome::Defined(v) => Some(v),
            FieldOutcome::Excluded(_) => None,
        })
    }
}

pub fn ncs(paper: &PubRecord, rates: &RefRates) -> NcsScore {
    let c = paper.citations as f64;
    let per_field: Vec<FieldNcs> = paper
        .fields_at(rates.level())
        .map(|f| {
            let outcome = match rates.get(&f.field_id, paper.pub_year) {
                None => FieldOutcome::Excluded(Exclusion::MissingCell),
                Some(cell) if cell.mean_citations == 0.0 => {
                    FieldOutcome::Excluded(Exclusion::ZeroMean)
                }
                Some(cell) => FieldOutcome::Defined(c / cell.mean_citations),
            };
            FieldNcs {
                field_id: f.field_id.clone(),
                outcome,
            }
        })
        .collect();

    let mut score = NcsScore {
        record_id: paper.record_id.clone(),
        value: None,
        per_field,
    };
    let (sum, n) = score.defined_values().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n > 0 {
        score.value = Some(sum / n as f64);
    }
    score
}

pub fn score_set<'a, I>(papers: I, rates: &RefRates) -> Vec<NcsScore>
where
    I: IntoIterator<Item = &'a PubRecord>,
{
    papers.into_iter().map(|p| ncs(p, rates)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::FieldAssignment;

    fn paper(id: &str, year: i32, c: u64, fields: &[&str]) -> PubRecord {
        PubRecord {
            record_id: id.into(),
            doi: None,
            pub_year: year,
            citations: c,
            fields: fields
                .iter()
                .map(|f| FieldAssignment::new(FieldLevel::L1, *f))
                .collect(),
            affiliations: vec![],
            source_label: "r".into(),
        }
    }

    fn dataset(p: Vec<PubRecord>) -> Dataset {
        Dataset::new("r", p).unwrap()
    }

    fn rates_of(cells: &[(&str, i32, f64)]) -> RefRates {
        RefRates {
            level: FieldLevel::L1,
            cells: cells
                .iter()
                .map(|(f, y, m)| {
                    (
                        (f.to_string(), *y),
                        RateCell {
                            mean_citations: *m,
                            paper_count: 1,
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn cell_mean_and_threshold() {
        let d = dataset(vec![paper("a", 2007, 2, &["f1"]), paper("b", 2007, 4, &["f1"])]);
        let r = compute_ref_rates(&d, FieldLevel::L1, 1).unwrap();
        assert_eq!(
            r.get("f1", 2007),
            Some(&RateCell {
                mean_citations: 3.0,
                paper_count: 2
            })
        );
        let r = compute_ref_rates(&d, FieldLevel::L1, 3).unwrap();
        assert!(r.get("f1", 2007).is_none());
        assert!(r.is_empty());
    }

    /// Toy set whose cell memberships are enumerated by hand:
    /// (f1,2005) = {p1,p2,p5}, (f2,2005) = {p1,p3}, (f2,2006) = {p4}.
    #[test]
    fn multi_field_contributes_to_each_cell() {
        let d = dataset(vec![
            paper("p1", 2005, 6, &["f1", "f2"]),
            paper("p2", 2005, 2, &["f1"]),
            paper("p3", 2005, 0, &["f2"]),
            paper("p4", 2006, 3, &["f2"]),
            paper("p5", 2005, 4, &["f1"]),
        ]);
        let r = compute_ref_rates(&d, FieldLevel::L1, 1).unwrap();
        let expected = [
            ("f1", 2005, (6.0 + 2.0 + 4.0) / 3.0, 3),
            ("f2", 2005, (6.0 + 0.0) / 2.0, 2),
            ("f2", 2006, 3.0, 1),
        ];
        assert_eq!(r.len(), expected.len());
        for (f, y, mean, n) in expected {
            let cell = r.get(f, y).unwrap();
            assert!((cell.mean_citations - mean).abs() < 1e-12);
            assert_eq!(cell.paper_count, n);
        }
    }

    #[test]
    fn other_levels_are_ignored() {
        let mut p = paper("a", 2000, 1, &["f"]);
        p.fields[0].level = FieldLevel::L2;
        let d = dataset(vec![p]);
        assert!(matches!(
            compute_ref_rates(&d, FieldLevel::L1, 1),
            Err(NormalizeError::NoAssignments(FieldLevel::L1))
        ));
        assert!(matches!(
            compute_ref_rates(&d, FieldLevel::L2, 0),
            Err(NormalizeError::MinCellSize)
        ));
    }

    #[test]
    fn single_field_division() {
        let r = rates_of(&[("f1", 2000, 5.0)]);
        assert_eq!(ncs(&paper("a", 2000, 10, &["f1"]), &r).value, Some(2.0));
        assert_eq!(ncs(&paper("a", 2000, 5, &["f1"]), &r).value, Some(1.0));
    }

    #[test]
    fn multi_field_average() {
        let r = rates_of(&[("f1", 2000, 2.0), ("f2", 2000, 6.0)]);
        let s = ncs(&paper("a", 2000, 6, &["f1", "f2"]), &r);
        let per: Vec<_> = s.defined_values().collect();
        assert_eq!(per, vec![3.0, 1.0]);
        assert_eq!(s.value, Some((3.0 + 1.0) / 2.0));
    }

    #[test]
    fn zero_mean_cell_is_excluded() {
        let r = rates_of(&[("f1", 2000, 0.0), ("f2", 2000, 2.0)]);
        let s = ncs(&paper("a", 2000, 4, &["f1", "f2"]), &r);
        assert_eq!(s.per_field[0].outcome, FieldOutcome::Excluded(Exclusion::ZeroMean));
        assert_eq!(s.per_field[1].outcome, FieldOutcome::Defined(2.0));
        assert_eq!(s.value, Some(2.0));
    }

    #[test]
    fn undefined_when_nothing_matches() {
        let r = rates_of(&[("f1", 2000, 2.0)]);
        let s = ncs(&paper("a", 2001, 4, &["f1"]), &r);
        assert_eq!(s.per_field[0].outcome, FieldOutcome::Excluded(Exclusion::MissingCell));
        assert_eq!(s.value, None);
        let s = ncs(&paper("b", 2000, 4, &[]), &r);
        assert_eq!(s.value, None);
        assert!(s.per_field.is_empty());
    }

    #[test]
    fn score_set_keeps_order() {
        let r = rates_of(&[("f1", 2000, 2.0)]);
        assert!(score_set(&[], &r).is_empty());
        let ps = [
            paper("x", 2000, 1, &["f1"]),
            paper("y", 2000, 2, &["f1"]),
            paper("z", 2000, 3, &["f1"]),
        ];
        let ids: Vec<_> = score_set(&ps, &r).into_iter().map(|s| s.record_id).collect();
        assert_eq!(ids, vec!["x", "y", "z"]);
    }

    #[test]
    fn rates_csv_round_trip() {
        let d = dataset(vec![
            paper("p1", 2005, 6, &["f1", "f2"]),
            paper("p2", 2005, 1, &["f1"]),
        ]);
        let r = compute_ref_rates(&d, FieldLevel::L1, 1).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "level,field_id,pub_year,mean_citations,paper_count\n\
             L1,f1,2005,3.5,2\nL1,f2,2005,6,1\n"
        );
        assert_eq!(RefRates::read_csv(buf.as_slice()).unwrap(), r);
    }
}
