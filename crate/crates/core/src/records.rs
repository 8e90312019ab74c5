//! Publication records, dataset ingestion and DOI-based matching.
//!
//! Two on-disk layouts are supported. The CSV layout has the header
//! `record_id,doi,pub_year,citations,fields,affiliations`; `fields` holds
//! `;`-separated `level:field_id` tokens (a bare token is a `FLAT` field) and
//! `affiliations` holds `|`-separated strings. The JSON layout is an array of
//! objects with the same keys, `fields` being an array of `{level, field_id}`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RecordError;

pub const CSV_HEADER: [&str; 6] = [
    "record_id",
    "doi",
    "pub_year",
    "citations",
    "fields",
    "affiliations",
];

/// Level of a field classification scheme.
///
/// `L0`..`L3` are the levels of a hierarchical scheme; `Flat` stands for a
/// non-hierarchical one such as journal subject categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FieldLevel {
    L0,
    L1,
    L2,
    L3,
    #[serde(rename = "FLAT")]
    Flat,
}

impl FieldLevel {
    pub const ALL: [FieldLevel; 5] = [
        FieldLevel::L0,
        FieldLevel::L1,
        FieldLevel::L2,
        FieldLevel::L3,
        FieldLevel::Flat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldLevel::L0 => "L0",
            FieldLevel::L1 => "L1",
            FieldLevel::L2 => "L2",
            FieldLevel::L3 => "L3",
            FieldLevel::Flat => "FLAT",
        }
    }
}

impl fmt::Display for FieldLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldLevel {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldLevel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| RecordError::UnknownLevel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldAssignment {
    pub level: FieldLevel,
    pub field_id: String,
}

impl FieldAssignment {
    pub fn new(level: FieldLevel, field_id: impl Into<String>) -> Self {
        Self {
            level,
            field_id: field_id.into(),
        }
    }

    fn parse_token(token: &str) -> Result<Self, RecordError> {
        if let Some((prefix, id)) = token.split_once(':') {
            if let Ok(level) = prefix.parse::<FieldLevel>() {
                if id.is_empty() {
                    return Err(RecordError::Field(token.to_string()));
                }
                return Ok(Self::new(level, id));
            }
        }
        Ok(Self::new(FieldLevel::Flat, token))
    }

    fn to_token(&self) -> String {
        match self.level {
            // A bare token is only unambiguous when it does not look prefixed.
            FieldLevel::Flat if !self.field_id.contains(':') => self.field_id.clone(),
            level => format!("{}:{}", level, self.field_id),
        }
    }
}

/// One publication as delivered by a bibliographic database.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PubRecord {
    pub record_id: String,
    pub doi: Option<String>,
    pub pub_year: i32,
    pub citations: u64,
    pub fields: Vec<FieldAssignment>,
    pub affiliations: Vec<String>,
    pub source_label: String,
}

impl PubRecord {
    /// Field assignments at `level`, in input order.
    pub fn fields_at(&self, level: FieldLevel) -> impl Iterator<Item = &FieldAssignment> {
        self.fields.iter().filter(move |f| f.level == level)
    }
}

/// A set of records from one source. Record ids are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    source_label: String,
    records: Vec<PubRecord>,
}

impl Dataset {
    /// Builds a dataset, canonicalizing DOIs, dropping duplicate field
    /// assignments and stamping every record with `source_label`.
    pub fn new(
        source_label: impl Into<String>,
        records: Vec<PubRecord>,
    ) -> Result<Self, RecordError> {
        let source_label = source_label.into();
        let mut seen = HashSet::with_capacity(records.len());
        let mut out = Vec::with_capacity(records.len());
        for (idx, mut rec) in records.into_iter().enumerate() {
            if rec.record_id.is_empty() {
                return Err(RecordError::Row {
                    row: idx + 1,
                    reason: "missing record_id".into(),
                });
            }
            if !seen.insert(rec.record_id.clone()) {
                return Err(RecordError::DuplicateId(rec.record_id));
            }
            rec.doi = rec.doi.as_deref().and_then(normalize_doi);
            dedup_fields(&mut rec.fields);
            rec.source_label = source_label.clone();
            out.push(rec);
        }
        Ok(Self {
            source_label,
            records: out,
        })
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn records(&self) -> &[PubRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<PubRecord> {
        self.records
    }
}

fn dedup_fields(fields: &mut Vec<FieldAssignment>) {
    let mut seen = HashSet::new();
    fields.retain(|f| seen.insert((f.level, f.field_id.clone())));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(RecordError::UnknownFormat(other.to_string())),
        }
    }
}

/// Canonical DOI form: trimmed, lowercased, resolver or `doi:` prefix removed.
/// Returns `None` unless the result starts with `10.`.
pub fn normalize_doi(raw: &str) -> Option<String> {
    let lower = raw.trim().to_lowercase();
    let mut s = lower.as_str();
    for prefix in ["https://doi.org/", "http://doi.org/", "doi:"] {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest;
            break;
        }
    }
    let s = s.trim();
    if s.starts_with("10.") {
        Some(s.to_string())
    } else {
        None
    }
}

pub fn load_dataset(path: &Path, format: Format, source_label: &str) -> Result<Dataset, RecordError> {
    let file = File::open(path).map_err(|e| RecordError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_dataset(file, format, source_label)
}

pub fn read_dataset<R: Read>(reader: R, format: Format, source_label: &str) -> Result<Dataset, RecordError> {
    let records = match format {
        Format::Csv => read_csv(reader, source_label)?,
        Format::Json => read_json(reader, source_label)?,
    };
    Dataset::new(source_label, records)
}

fn read_csv<R: Read>(reader: R, source_label: &str) -> Result<Vec<PubRecord>, RecordError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).ne(CSV_HEADER.iter().copied()) {
        return Err(RecordError::Header(headers.iter().collect::<Vec<_>>().join(",")));
    }
    let mut records = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let row_no = idx + 1;
        let row = row.map_err(|e| RecordError::Row {
            row: row_no,
            reason: e.to_string(),
        })?;
        let bad = |reason: String| RecordError::Row { row: row_no, reason };

        let record_id = row[0].trim();
        if record_id.is_empty() {
            return Err(bad("missing record_id".into()));
        }
        let pub_year = parse_year(&row[2]).map_err(bad)?;
        let citations = parse_citations(&row[3]).map_err(bad)?;
        let fields = row[4]
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(FieldAssignment::parse_token)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(e.to_string()))?;
        let affiliations = row[5]
            .split('|')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(String::from)
            .collect();
        records.push(PubRecord {
            record_id: record_id.to_string(),
            doi: normalize_doi(&row[1]),
            pub_year,
            citations,
            fields,
            affiliations,
            source_label: source_label.to_string(),
        });
    }
    Ok(records)
}

fn parse_year(raw: &str) -> Result<i32, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("missing pub_year".into());
    }
    raw.parse().map_err(|_| format!("invalid pub_year {raw:?}"))
}

fn parse_citations(raw: &str) -> Result<u64, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("missing citations".into());
    }
    match raw.parse::<i64>() {
        Ok(n) if n < 0 => Err(format!("negative citations {n}")),
        Ok(n) => Ok(n as u64),
        Err(_) => Err(format!("invalid citations {raw:?}")),
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    record_id: Option<String>,
    #[serde(default)]
    doi: Option<String>,
    pub_year: Option<i32>,
    citations: Option<i64>,
    #[serde(default)]
    fields: Vec<FieldAssignment>,
    #[serde(default)]
    affiliations: Vec<String>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    record_id: &'a str,
    doi: Option<&'a str>,
    pub_year: i32,
    citations: u64,
    fields: &'a [FieldAssignment],
    affiliations: &'a [String],
}

fn read_json<R: Read>(reader: R, source_label: &str) -> Result<Vec<PubRecord>, RecordError> {
    let rows: Vec<JsonRecord> = serde_json::from_reader(reader)?;
    rows.into_iter()
        .enumerate()
        .map(|(idx, r)| {
            let bad = |reason: &str| RecordError::Row {
                row: idx + 1,
                reason: reason.to_string(),
            };
            let record_id = r
                .record_id
                .filter(|id| !id.trim().is_empty())
                .ok_or_else(|| bad("missing record_id"))?;
            let pub_year = r.pub_year.ok_or_else(|| bad("missing pub_year"))?;
            let citations = match r.citations {
                None => return Err(bad("missing citations")),
                Some(n) if n < 0 => return Err(bad(&format!("negative citations {n}"))),
                Some(n) => n as u64,
            };
            Ok(PubRecord {
                record_id: record_id.trim().to_string(),
                doi: r.doi.as_deref().and_then(normalize_doi),
                pub_year,
                citations,
                fields: r.fields,
                affiliations: r.affiliations,
                source_label: source_label.to_string(),
            })
        })
        .collect()
}

pub fn write_dataset<W: Write>(ds: &Dataset, format: Format, writer: W) -> Result<(), RecordError> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(writer);
            wtr.write_record(CSV_HEADER)?;
            for r in ds.records() {
                let fields = r
                    .fields
                    .iter()
                    .map(FieldAssignment::to_token)
                    .collect::<Vec<_>>()
                    .join(";");
                wtr.write_record([
                    r.record_id.as_str(),
                    r.doi.as_deref().unwrap_or(""),
                    &r.pub_year.to_string(),
                    &r.citations.to_string(),
                    &fields,
                    &r.affiliations.join("|"),
                ])?;
            }
            wtr.flush().map_err(csv::Error::from)?;
        }
        Format::Json => {
            let rows: Vec<_> = ds
                .records()
                .iter()
                .map(|r| JsonRecordOut {
                    record_id: &r.record_id,
                    doi: r.doi.as_deref(),
                    pub_year: r.pub_year,
                    citations: r.citations,
                    fields: &r.fields,
                    affiliations: &r.affiliations,
                })
                .collect();
            serde_json::to_writer_pretty(writer, &rows)?;
        }
    }
    Ok(())
}

/// Keeps records with an affiliation containing any of `include_variants`
/// (case-insensitive), then drops records listed in `exclude_ids`.
pub fn filter_by_affiliation(
    ds: &Dataset,
    include_variants: &[String],
    exclude_ids: &[String],
) -> Result<Dataset, RecordError> {
    if include_variants.is_empty() {
        return Err(RecordError::NoVariants);
    }
    let variants: Vec<String> = include_variants.iter().map(|v| v.to_lowercase()).collect();
    let excluded: HashSet<&str> = exclude_ids.iter().map(String::as_str).collect();
    let records = ds
        .records()
        .iter()
        .filter(|r| {
            r.affiliations.iter().any(|a| {
                let a = a.to_lowercase();
                variants.iter().any(|v| a.contains(v.as_str()))
            })
        })
        .filter(|r| !excluded.contains(r.record_id.as_str()))
        .cloned()
        .collect();
    Ok(Dataset {
        source_label: ds.source_label.clone(),
        records,
    })
}

/// Records of two datasets joined on canonical DOI.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPairs {
    /// Ordered by DOI.
    pub pairs: Vec<(PubRecord, PubRecord)>,
    pub unmatched_a: usize,
    pub unmatched_b: usize,
    /// Records excluded because their DOI occurs more than once in their own dataset.
    pub ambiguous_a: Vec<String>,
    pub ambiguous_b: Vec<String>,
    pub no_doi_a: usize,
    pub no_doi_b: usize,
}

impl MatchedPairs {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

struct DoiIndex<'a> {
    unique: BTreeMap<&'a str, &'a PubRecord>,
    ambiguous: Vec<String>,
    no_doi: usize,
}

fn index_by_doi(ds: &Dataset) -> DoiIndex<'_> {
    let mut groups: HashMap<&str, Vec<&PubRecord>> = HashMap::new();
    let mut no_doi = 0;
    for r in ds.records() {
        match r.doi.as_deref() {
            Some(doi) => groups.entry(doi).or_default().push(r),
            None => no_doi += 1,
        }
    }
    let mut unique = BTreeMap::new();
    let mut ambiguous = Vec::new();
    for (doi, recs) in groups {
        if recs.len() == 1 {
            unique.insert(doi, recs[0]);
        } else {
            ambiguous.extend(recs.into_iter().map(|r| r.record_id.clone()));
        }
    }
    ambiguous.sort();
    DoiIndex {
        unique,
        ambiguous,
        no_doi,
    }
}

/// Pairs records with equal canonical DOI. A DOI carried by several records
/// of the same dataset is ambiguous and none of those records are matched.
///
/// `unmatched_*` counts every record of a dataset that ends up in no pair,
/// including records without DOI and ambiguous ones.
pub fn match_by_doi(a: &Dataset, b: &Dataset) -> MatchedPairs {
    let ia = index_by_doi(a);
    let ib = index_by_doi(b);
    let pairs: Vec<_> = ia
        .unique
        .iter()
        .filter_map(|(doi, ra)| ib.unique.get(doi).map(|rb| ((*ra).clone(), (*rb).clone())))
        .collect();
    MatchedPairs {
        unmatched_a: a.len() - pairs.len(),
        unmatched_b: b.len() - pairs.len(),
        pairs,
        ambiguous_a: ia.ambiguous,
        ambiguous_b: ib.ambiguous,
        no_doi_a: ia.no_doi,
        no_doi_b: ib.no_doi,
    }
}

/// Row of the match audit written by `normcite match`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchAuditRow {
    pub doi: String,
    pub record_id_a: String,
    pub record_id_b: String,
    pub status: &'static str,
}

/// One audit row per record of either dataset, sorted by status, DOI and ids.
pub fn match_audit(a: &Dataset, b: &Dataset) -> Vec<MatchAuditRow> {
    let ia = index_by_doi(a);
    let ib = index_by_doi(b);
    let amb_a: HashSet<&str> = ia.ambiguous.iter().map(String::as_str).collect();
    let amb_b: HashSet<&str> = ib.ambiguous.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for r in a.records() {
        let doi = r.doi.clone().unwrap_or_default();
        let (rid_b, status) = if r.doi.is_none() {
            (String::new(), "no_doi_a")
        } else if amb_a.contains(r.record_id.as_str()) {
            (String::new(), "ambiguous_a")
        } else if let Some(rb) = ib.unique.get(doi.as_str()) {
            (rb.record_id.clone(), "matched")
        } else {
            (String::new(), "unmatched_a")
        };
        rows.push(MatchAuditRow {
            doi,
            record_id_a: r.record_id.clone(),
            record_id_b: rid_b,
            status,
        });
    }
    for r in b.records() {
        let doi = r.doi.clone().unwrap_or_default();
        let status = if r.doi.is_none() {
            "no_doi_b"
        } else if amb_b.contains(r.record_id.as_str()) {
            "ambiguous_b"
        } else if ia.unique.contains_key(doi.as_str()) {
            continue;
        } else {
            "unmatched_b"
        };
        rows.push(MatchAuditRow {
            doi,
            record_id_a: String::new(),
            record_id_b: r.record_id.clone(),
            status,
        });
    }
    rows.sort_by(|x, y| {
        (x.status, &x.doi, &x.record_id_a, &x.record_id_b)
            .cmp(&(y.status, &y.doi, &y.record_id_a, &y.record_id_b))
    });
    rows
}
