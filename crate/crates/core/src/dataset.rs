//! Region count tables: parsing, validation and reference totals.
//!
//! The dataset is long-format CSV, one row per region and field level:
//!
//! ```text
//! nuts_code,region_name,country,level,docs,cites
//! ES614,Granada,Spain,AI,1200,9000
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::FieldCounts;

pub const DATASET_HEADER: [&str; 6] = [
    "nuts_code",
    "region_name",
    "country",
    "level",
    "docs",
    "cites",
];
pub const REFERENCE_HEADER: [&str; 3] = ["level", "docs", "cites"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: duplicate key ({nuts}, {level})")]
    DuplicateKey {
        line: u64,
        nuts: String,
        level: String,
    },
    #[error("line {line}: bad NUTS-3 code {code:?}")]
    BadNutsCode { line: u64, code: String },
    #[error("line {line}: region {nuts} is listed as {first:?} and as {second:?}")]
    ConflictingIdentity {
        line: u64,
        nuts: String,
        first: String,
        second: String,
    },
    #[error("line {line}: region {nuts}: {inner} docs ({inner_docs}) exceed {outer} docs ({outer_docs})")]
    NestingViolation {
        line: u64,
        nuts: String,
        inner: FieldLevel,
        inner_docs: u64,
        outer: FieldLevel,
        outer_docs: u64,
    },
    #[error("level {0} is not present")]
    MissingLevel(FieldLevel),
    #[error("no region records to aggregate")]
    EmptyDataset,
    #[error("count overflow while summing level {0}")]
    Overflow(FieldLevel),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl DatasetError {
    /// Input line the error refers to, if any.
    pub fn line(&self) -> Option<u64> {
        match self {
            DatasetError::MalformedRow { line, .. }
            | DatasetError::DuplicateKey { line, .. }
            | DatasetError::BadNutsCode { line, .. }
            | DatasetError::ConflictingIdentity { line, .. }
            | DatasetError::NestingViolation { line, .. } => Some(*line),
            DatasetError::Csv(e) => e.position().map(|p| p.line()),
            _ => None,
        }
    }
}

/// A five-character NUTS-3 code: two-letter country prefix followed by three
/// alphanumeric characters, e.g. `ES614`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NutsCode(String);

impl NutsCode {
    pub fn parse(code: &str) -> Option<Self> {
        let bytes = code.as_bytes();
        let valid = bytes.len() == 5
            && bytes[..2].iter().all(u8::is_ascii_uppercase)
            && bytes[2..].iter().all(u8::is_ascii_alphanumeric);
        valid.then(|| Self(code.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn country_prefix(&self) -> &str {
        &self.0[..2]
    }
}

impl fmt::Display for NutsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NutsCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        NutsCode::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("bad NUTS-3 code {s:?}")))
    }
}

/// A thematic aggregation level.
///
/// `Compu` is Macro Citation Topic 4 and `Ai` is Meso Citation Topic 4.61;
/// any other token is carried verbatim as a topic code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldLevel {
    All,
    Compu,
    Ai,
    Topic(String),
}

impl FieldLevel {
    pub fn as_str(&self) -> &str {
        match self {
            FieldLevel::All => "ALL",
            FieldLevel::Compu => "COMPU",
            FieldLevel::Ai => "AI",
            FieldLevel::Topic(t) => t,
        }
    }

    pub fn description(&self) -> &str {
        match self {
            FieldLevel::All => "all scientific output",
            FieldLevel::Compu => {
                "Electrical Engineering, Electronics & Computer Science (Macro Citation Topic 4)"
            }
            FieldLevel::Ai => {
                "Artificial Intelligence & Machine Learning (Meso Citation Topic 4.61)"
            }
            FieldLevel::Topic(t) => t,
        }
    }

    /// Built-in levels ordered from innermost to outermost.
    const NESTING: [FieldLevel; 3] = [FieldLevel::Ai, FieldLevel::Compu, FieldLevel::All];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("field level must be a non-empty token without whitespace")]
pub struct BadFieldLevel;

impl FromStr for FieldLevel {
    type Err = BadFieldLevel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(BadFieldLevel);
        }
        Ok(match s {
            "ALL" => FieldLevel::All,
            "COMPU" => FieldLevel::Compu,
            "AI" => FieldLevel::Ai,
            other => FieldLevel::Topic(other.to_owned()),
        })
    }
}

impl fmt::Display for FieldLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for FieldLevel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for FieldLevel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One NUTS-3 region with its counts per field level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionRecord {
    pub nuts: NutsCode,
    pub name: String,
    pub country: String,
    pub counts: BTreeMap<FieldLevel, FieldCounts>,
}

impl RegionRecord {
    pub fn counts(&self, level: &FieldLevel) -> Option<FieldCounts> {
        self.counts.get(level).copied()
    }

    fn check_nesting(&self, line: u64) -> Result<(), DatasetError> {
        let present: Vec<(&FieldLevel, FieldCounts)> = FieldLevel::NESTING
            .iter()
            .filter_map(|l| self.counts.get(l).map(|c| (l, *c)))
            .collect();
        for pair in present.windows(2) {
            let (inner, inner_counts) = pair[0];
            let (outer, outer_counts) = pair[1];
            if inner_counts.docs > outer_counts.docs {
                return Err(DatasetError::NestingViolation {
                    line,
                    nuts: self.nuts.to_string(),
                    inner: inner.clone(),
                    inner_docs: inner_counts.docs,
                    outer: outer.clone(),
                    outer_docs: outer_counts.docs,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ComputedFromDataset,
    SuppliedExternally,
}

/// Totals for the reference population against which regional shares are
/// benchmarked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceTotals {
    pub counts: BTreeMap<FieldLevel, FieldCounts>,
    pub provenance: Provenance,
}

impl ReferenceTotals {
    pub fn get(&self, level: &FieldLevel) -> Result<FieldCounts, DatasetError> {
        self.counts
            .get(level)
            .copied()
            .ok_or_else(|| DatasetError::MissingLevel(level.clone()))
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_count(field: &str, column: &str, line: u64) -> Result<u64, DatasetError> {
    let field = field.trim();
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DatasetError::MalformedRow {
            line,
            reason: format!("{column} must be a non-negative base-10 integer, got {field:?}"),
        });
    }
    field.parse().map_err(|_| DatasetError::MalformedRow {
        line,
        reason: format!("{column} value {field} does not fit in 64 bits"),
    })
}

fn parse_counts(docs: &str, cites: &str, line: u64) -> Result<FieldCounts, DatasetError> {
    let docs = parse_count(docs, "docs", line)?;
    let cites = parse_count(cites, "cites", line)?;
    FieldCounts::new(docs, cites).map_err(|e| DatasetError::MalformedRow {
        line,
        reason: e.to_string(),
    })
}

fn parse_level(field: &str, line: u64) -> Result<FieldLevel, DatasetError> {
    field
        .parse()
        .map_err(|e: BadFieldLevel| DatasetError::MalformedRow {
            line,
            reason: e.to_string(),
        })
}

fn reader<R: Read>(source: R, has_headers: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .trim(csv::Trim::Headers)
        .from_reader(source)
}

/// Parse a dataset table into one record per NUTS code, sorted by code.
pub fn parse_dataset<R: Read>(source: R) -> Result<Vec<RegionRecord>, DatasetError> {
    let mut rdr = reader(source, true);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(DATASET_HEADER.iter().copied()) {
        return Err(DatasetError::MalformedRow {
            line: 1,
            reason: format!(
                "expected header {:?}, got {:?}",
                DATASET_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut by_code: BTreeMap<NutsCode, RegionRecord> = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = line_of(&row);
        if row.len() != DATASET_HEADER.len() {
            return Err(DatasetError::MalformedRow {
                line,
                reason: format!(
                    "expected {} columns, found {}",
                    DATASET_HEADER.len(),
                    row.len()
                ),
            });
        }
        let code = row[0].trim();
        let nuts = NutsCode::parse(code).ok_or_else(|| DatasetError::BadNutsCode {
            line,
            code: code.to_owned(),
        })?;
        let name = row[1].trim();
        let country = row[2].trim();
        let level = parse_level(&row[3], line)?;
        let counts = parse_counts(&row[4], &row[5], line)?;

        let record = by_code.entry(nuts.clone()).or_insert_with(|| RegionRecord {
            nuts: nuts.clone(),
            name: name.to_owned(),
            country: country.to_owned(),
            counts: BTreeMap::new(),
        });
        if record.name != name || record.country != country {
            return Err(DatasetError::ConflictingIdentity {
                line,
                nuts: nuts.to_string(),
                first: format!("{}, {}", record.name, record.country),
                second: format!("{name}, {country}"),
            });
        }
        if record.counts.contains_key(&level) {
            return Err(DatasetError::DuplicateKey {
                line,
                nuts: nuts.to_string(),
                level: level.to_string(),
            });
        }
        record.counts.insert(level, counts);
        // Checked per row so the error points at the row that broke nesting.
        record.check_nesting(line)?;
    }
    Ok(by_code.into_values().collect())
}

/// Write records back in the dataset schema, one row per region and level.
pub fn write_dataset<W: Write>(records: &[RegionRecord], sink: W) -> Result<(), DatasetError> {
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(DATASET_HEADER)?;
    for record in records {
        for (level, counts) in &record.counts {
            wtr.write_record([
                record.nuts.as_str(),
                &record.name,
                &record.country,
                level.as_str(),
                &counts.docs.to_string(),
                &counts.cites.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Sum counts per requested level over every record.
pub fn compute_reference(
    records: &[RegionRecord],
    levels: &BTreeSet<FieldLevel>,
) -> Result<ReferenceTotals, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let mut counts = BTreeMap::new();
    for level in levels {
        let mut seen = false;
        let mut total = FieldCounts::default();
        for c in records.iter().filter_map(|r| r.counts.get(level)) {
            seen = true;
            total.docs = total
                .docs
                .checked_add(c.docs)
                .ok_or_else(|| DatasetError::Overflow(level.clone()))?;
            total.cites = total
                .cites
                .checked_add(c.cites)
                .ok_or_else(|| DatasetError::Overflow(level.clone()))?;
        }
        if !seen {
            return Err(DatasetError::MissingLevel(level.clone()));
        }
        counts.insert(level.clone(), total);
    }
    Ok(ReferenceTotals {
        counts,
        provenance: Provenance::ComputedFromDataset,
    })
}

/// Every level that appears in at least one record.
pub fn levels_present(records: &[RegionRecord]) -> BTreeSet<FieldLevel> {
    records
        .iter()
        .flat_map(|r| r.counts.keys().cloned())
        .collect()
}

/// Read externally supplied reference totals (`level,docs,cites`). The header
/// line is optional.
pub fn load_reference<R: Read>(source: R) -> Result<ReferenceTotals, DatasetError> {
    let mut rdr = reader(source, false);
    let mut counts = BTreeMap::new();
    for (index, row) in rdr.records().enumerate() {
        let row = row?;
        let line = line_of(&row);
        if index == 0
            && row
                .iter()
                .map(str::trim)
                .eq(REFERENCE_HEADER.iter().copied())
        {
            continue;
        }
        if row.len() != REFERENCE_HEADER.len() {
            return Err(DatasetError::MalformedRow {
                line,
                reason: format!(
                    "expected {} columns, found {}",
                    REFERENCE_HEADER.len(),
                    row.len()
                ),
            });
        }
        let level = parse_level(&row[0], line)?;
        let totals = parse_counts(&row[1], &row[2], line)?;
        if counts.insert(level.clone(), totals).is_some() {
            return Err(DatasetError::DuplicateKey {
                line,
                nuts: "reference".to_owned(),
                level: level.to_string(),
            });
        }
    }
    Ok(ReferenceTotals {
        counts,
        provenance: Provenance::SuppliedExternally,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "nuts_code,region_name,country,level,docs,cites\n";

    fn parse(body: &str) -> Result<Vec<RegionRecord>, DatasetError> {
        parse_dataset(format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn single_row() {
        let records = parse("ES614,Granada,Spain,AI,1200,9000\n").unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].nuts.as_str(), "ES614");
        assert_eq!(records[0].name, "Granada");
        assert_eq!(
            records[0].counts(&FieldLevel::Ai),
            Some(FieldCounts {
                docs: 1200,
                cites: 9000
            })
        );
    }

    #[test]
    fn duplicate_key() {
        let err =
            parse("ES614,Granada,Spain,AI,1200,9000\nES614,Granada,Spain,AI,1,1\n").unwrap_err();
        assert!(
            matches!(err, DatasetError::DuplicateKey { line: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn nesting_violation() {
        let err = parse("ES614,Granada,Spain,COMPU,100,500\nES614,Granada,Spain,AI,101,900\n")
            .unwrap_err();
        match err {
            DatasetError::NestingViolation {
                inner,
                outer,
                inner_docs,
                outer_docs,
                ..
            } => {
                assert_eq!((inner, outer), (FieldLevel::Ai, FieldLevel::Compu));
                assert_eq!((inner_docs, outer_docs), (101, 100));
            }
            other => panic!("unexpected {other}"),
        }
        let err = parse("ES614,Granada,Spain,COMPU,100,500\nES614,Granada,Spain,ALL,99,900\n")
            .unwrap_err();
        assert!(matches!(err, DatasetError::NestingViolation { .. }));
        // AI against ALL when COMPU is absent
        let err = parse("ES614,Granada,Spain,ALL,10,5\nES614,Granada,Spain,AI,11,9\n").unwrap_err();
        assert!(matches!(err, DatasetError::NestingViolation { .. }));
    }

    #[test]
    fn rejects_bad_rows() {
        for (body, line) in [
            ("ES614,Granada,Spain,AI,-3,1\n", 2),
            ("ES614,Granada,Spain,AI,3\n", 2),
            ("ES614,Granada,Spain,AI,3.5,1\n", 2),
            ("ES614,Granada,Spain,AI,0,4\n", 2),
            ("ES614,Granada,Spain,,3,1\n", 2),
            ("ES614,Granada,Spain,AI,1,1\nES615,Jaen,Spain,AI,x,1\n", 3),
        ] {
            let err = parse(body).unwrap_err();
            assert!(
                matches!(err, DatasetError::MalformedRow { .. }),
                "{body}: {err}"
            );
            assert_eq!(err.line(), Some(line), "{body}");
        }
    }

    #[test]
    fn rejects_bad_codes() {
        for code in ["es614", "ES61", "ES6145", "E1614", "ES6-4"] {
            let err = parse(&format!("{code},X,Y,AI,1,1\n")).unwrap_err();
            assert!(matches!(err, DatasetError::BadNutsCode { .. }), "{code}");
        }
        assert!(NutsCode::parse("ITH20").is_some());
        assert!(NutsCode::parse("ESZZZ").is_some());
    }

    #[test]
    fn rejects_wrong_header() {
        let err = parse_dataset("code,name,country,level,docs,cites\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedRow { line: 1, .. }));
    }

    #[test]
    fn conflicting_identity() {
        let err = parse("ES614,Granada,Spain,AI,1,1\nES614,Jaen,Spain,ALL,9,9\n").unwrap_err();
        assert!(matches!(
            err,
            DatasetError::ConflictingIdentity { line: 3, .. }
        ));
    }

    #[test]
    fn quoting_crlf_and_order() {
        let body =
            "DE721,\"Giessen, Landkreis\",Germany,AI,5,7\r\nBG341,Burgas,Bulgaria,AI,3,2\r\n";
        let records = parse(body).unwrap();
        assert_eq!(records[0].nuts.as_str(), "BG341");
        assert_eq!(records[1].name, "Giessen, Landkreis");
    }

    #[test]
    fn missing_levels_are_retained() {
        let records = parse("ES614,Granada,Spain,AI,1,1\nES616,Jaen,Spain,ALL,9,9\n").unwrap();
        assert_eq!(records.len(), 2);
        assert!(records[0].counts(&FieldLevel::All).is_none());
    }

    #[test]
    fn topic_levels() {
        let records = parse("ES614,Granada,Spain,4.61.123,1,1\n").unwrap();
        let level: FieldLevel = "4.61.123".parse().unwrap();
        assert!(records[0].counts(&level).is_some());
        assert!("".parse::<FieldLevel>().is_err());
    }

    #[test]
    fn reference_sums() {
        let records = parse("ES614,Granada,Spain,AI,10,3\nES616,Jaen,Spain,AI,20,4\n").unwrap();
        let levels = BTreeSet::from([FieldLevel::Ai]);
        let totals = compute_reference(&records, &levels).unwrap();
        assert_eq!(
            totals.get(&FieldLevel::Ai).unwrap(),
            FieldCounts { docs: 30, cites: 7 }
        );
        assert_eq!(totals.provenance, Provenance::ComputedFromDataset);

        let totals = compute_reference(&records[..1], &levels).unwrap();
        assert_eq!(
            totals.get(&FieldLevel::Ai).unwrap(),
            FieldCounts { docs: 10, cites: 3 }
        );

        let err = compute_reference(&records, &BTreeSet::from([FieldLevel::Compu])).unwrap_err();
        assert!(matches!(err, DatasetError::MissingLevel(FieldLevel::Compu)));
        assert!(matches!(
            compute_reference(&[], &levels),
            Err(DatasetError::EmptyDataset)
        ));
    }

    #[test]
    fn reference_file() {
        let totals = load_reference("AI,100000,800000\n".as_bytes()).unwrap();
        assert_eq!(
            totals.get(&FieldLevel::Ai).unwrap(),
            FieldCounts {
                docs: 100000,
                cites: 800000
            }
        );
        assert_eq!(totals.provenance, Provenance::SuppliedExternally);

        let with_header =
            load_reference("level,docs,cites\nAI,1,2\nCOMPU,3,4\n".as_bytes()).unwrap();
        assert_eq!(with_header.counts.len(), 2);

        let empty = load_reference("".as_bytes()).unwrap();
        assert!(matches!(
            empty.get(&FieldLevel::Ai),
            Err(DatasetError::MissingLevel(FieldLevel::Ai))
        ));

        let err = load_reference("AI,-1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedRow { line: 1, .. }));
        let err = load_reference("AI,1,2\nAI,3,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateKey { line: 2, .. }));
    }
}
