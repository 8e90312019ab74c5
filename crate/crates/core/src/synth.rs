//! Deterministic synthetic datasets for tests, benchmarks and demos.

use crate::records::{Dataset, FieldAssignment, FieldLevel, PubRecord};

/// Class cross-tabulation the `paperlike` fixture reproduces; rows are
/// source A classes, columns source B classes.
pub const PAPERLIKE_TABLE: [[u64; 4]; 4] = [
    [291, 23, 1, 0],
    [32, 50, 8, 0],
    [0, 13, 7, 2],
    [0, 0, 4, 7],
];

/// Citation counts representative of each CSS class, three variants each.
/// Class means of the fixture fall well inside the gaps between these bands.
const CLASS_CITATIONS: [[u64; 3]; 4] = [[0, 1, 2], [9, 10, 11], [28, 30, 32], [55, 60, 65]];

pub const PAPERLIKE_YEAR: i32 = 2010;
pub const FIELD_A: &str = "condensed_matter_physics";
pub const FIELD_B: &str = "Physics, Condensed Matter";
pub const AFFILIATION: &str = "Institute for Solid State Studies, Example City";

#[derive(Debug, Clone)]
pub struct SyntheticStudy {
    pub focal_a: Dataset,
    pub focal_b: Dataset,
    pub ref_a: Dataset,
    pub ref_b: Dataset,
}

fn record(id: String, doi: Option<String>, c: u64, field: FieldAssignment, aff: &str) -> PubRecord {
    PubRecord {
        record_id: id,
        doi,
        pub_year: PAPERLIKE_YEAR,
        citations: c,
        fields: vec![field],
        affiliations: vec![aff.to_string()],
        source_label: String::new(),
    }
}

/// Two-source study whose scored pairs land in the classes of
/// [`PAPERLIKE_TABLE`] under three-step CSS.
///
/// Besides the 438 scorable pairs it contains one pair without a defined
/// score in A, one in B and one in both (so 441 DOI matches), focal records
/// without DOI or without a partner, and reference-only papers. Every
/// scorable paper sits in a single field-year cell, so scores are citations
/// divided by one constant and the classes depend only on the citation
/// bands above.
pub fn paperlike() -> SyntheticStudy {
    let field_a = || FieldAssignment::new(FieldLevel::L1, FIELD_A);
    let field_b = || FieldAssignment::new(FieldLevel::Flat, FIELD_B);
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut k = 0usize;
    for (i, row) in PAPERLIKE_TABLE.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            for _ in 0..n {
                let doi = format!("10.5555/paperlike.{k:04}");
                // Different offsets so the two series are not identical within a cell.
                let ca = CLASS_CITATIONS[i][k % 3];
                let cb = CLASS_CITATIONS[j][(k / 3) % 3];
                a.push(record(format!("A{k:04}"), Some(doi.clone()), ca, field_a(), AFFILIATION));
                b.push(record(format!("B{k:04}"), Some(doi), cb, field_b(), AFFILIATION));
                k += 1;
            }
        }
    }

    // Pairs whose score is undefined on one or both sides: the "uncited"
    // cells hold only zero-cited papers, so their mean is zero.
    let zero_a = || FieldAssignment::new(FieldLevel::L1, "uncited_field");
    let zero_b = || FieldAssignment::new(FieldLevel::Flat, "Uncited Category");
    let undefined = [(true, false), (false, true), (true, true)];
    for (u, (za, zb)) in undefined.into_iter().enumerate() {
        let doi = format!("10.5555/undefined.{u}");
        let (fa, ca) = if za { (zero_a(), 0) } else { (field_a(), 10) };
        let (fb, cb) = if zb { (zero_b(), 0) } else { (field_b(), 10) };
        a.push(record(format!("AU{u}"), Some(doi.clone()), ca, fa, AFFILIATION));
        b.push(record(format!("BU{u}"), Some(doi), cb, fb, AFFILIATION));
    }

    for u in 0..5 {
        a.push(record(format!("AX{u}"), None, 3 + u, field_a(), AFFILIATION));
    }
    for u in 0..4 {
        let doi = Some(format!("10.5555/only-a.{u}"));
        a.push(record(format!("AY{u}"), doi, 2 * u, field_a(), AFFILIATION));
    }
    for u in 0..3 {
        let doi = Some(format!("10.5555/only-b.{u}"));
        b.push(record(format!("BY{u}"), doi, 5 * u, field_b(), AFFILIATION));
    }

    let mut ref_a = a.clone();
    let mut ref_b = b.clone();
    for u in 0..60u64 {
        let other = "Another University";
        ref_a.push(record(format!("RA{u}"), None, u % 13, field_a(), other));
        ref_b.push(record(format!("RB{u}"), None, u % 11, field_b(), other));
        // Other fields and years exercise the cell keys.
        let mut ra = record(format!("RA-x{u}"), None, u % 7, FieldAssignment::new(FieldLevel::L1, "optics"), other);
        ra.pub_year = PAPERLIKE_YEAR + 1;
        ref_a.push(ra);
        let mut rb = record(format!("RB-x{u}"), None, u % 5, FieldAssignment::new(FieldLevel::Flat, "Optics"), other);
        rb.pub_year = PAPERLIKE_YEAR - 1;
        ref_b.push(rb);
    }

    let ds = |label: &str, recs| Dataset::new(label, recs).expect("synthetic ids are unique");
    SyntheticStudy {
        focal_a: ds("A", a),
        focal_b: ds("B", b),
        ref_a: ds("A", ref_a),
        ref_b: ds("B", ref_b),
    }
}
