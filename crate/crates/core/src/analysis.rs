//! Per-region indicator rows for a focal/baseline field pair, the
//! threshold-filtered RSI ranking, and the quadrant partition.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{FieldLevel, NutsCode, ReferenceTotals, RegionRecord};
use crate::indicators::{
    activity_index, classify_quadrant, relative_citation_impact, rsi_from_activity, ActivityIndex,
    IndicatorError, QuadrantProfile, Rci, Rsi,
};

/// Minimum baseline-field documents for a region to enter the RSI ranking.
pub const DEFAULT_MIN_BASELINE_DOCS: u64 = 200;
/// Minimum focal-field documents for a region to enter the quadrant plot.
pub const DEFAULT_MIN_FOCAL_DOCS: u64 = 100;
pub const DEFAULT_TOP_N: usize = 20;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("focal and baseline levels must differ (both are {0})")]
    SameLevels(FieldLevel),
    #[error("reference totals lack level {0}")]
    MissingReferenceLevel(FieldLevel),
    #[error("region {nuts}: {source}")]
    Region {
        nuts: NutsCode,
        #[source]
        source: IndicatorError,
    },
    #[error("reference totals: {0}")]
    Reference(#[source] IndicatorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    focal: FieldLevel,
    baseline: FieldLevel,
    reference: ReferenceTotals,
    pub min_baseline_docs: u64,
    pub min_focal_docs: u64,
}

impl AnalysisConfig {
    /// Config with the default thresholds (200 baseline docs, 100 focal docs).
    pub fn new(
        focal: FieldLevel,
        baseline: FieldLevel,
        reference: ReferenceTotals,
    ) -> Result<Self, AnalysisError> {
        if focal == baseline {
            return Err(AnalysisError::SameLevels(focal));
        }
        Ok(Self {
            focal,
            baseline,
            reference,
            min_baseline_docs: DEFAULT_MIN_BASELINE_DOCS,
            min_focal_docs: DEFAULT_MIN_FOCAL_DOCS,
        })
    }

    pub fn with_thresholds(mut self, min_baseline_docs: u64, min_focal_docs: u64) -> Self {
        self.min_baseline_docs = min_baseline_docs;
        self.min_focal_docs = min_focal_docs;
        self
    }

    pub fn focal(&self) -> &FieldLevel {
        &self.focal
    }

    pub fn baseline(&self) -> &FieldLevel {
        &self.baseline
    }

    pub fn reference(&self) -> &ReferenceTotals {
        &self.reference
    }
}

/// Indicator values of one region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub nuts: NutsCode,
    pub name: String,
    pub country: String,
    pub focal_docs: u64,
    pub focal_cites: u64,
    pub baseline_docs: u64,
    pub aindx: ActivityIndex,
    pub rsi: Rsi,
    pub rci: Option<Rci>,
    pub quadrant: Option<QuadrantProfile>,
}

/// Why a region produced no row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipNotice {
    pub nuts: NutsCode,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Computation {
    pub rows: Vec<IndicatorRow>,
    pub skipped: Vec<SkipNotice>,
}

/// Descending RSI, ties by ascending NUTS code.
pub fn sort_rows(rows: &mut [IndicatorRow]) {
    rows.sort_by(|a, b| {
        b.rsi
            .value()
            .total_cmp(&a.rsi.value())
            .then_with(|| a.nuts.cmp(&b.nuts))
    });
}

pub fn compute_rows(
    records: &[RegionRecord],
    config: &AnalysisConfig,
) -> Result<Vec<IndicatorRow>, AnalysisError> {
    compute_rows_detailed(records, config).map(|c| c.rows)
}

/// Like [`compute_rows`], also returning the regions that were skipped.
pub fn compute_rows_detailed(
    records: &[RegionRecord],
    config: &AnalysisConfig,
) -> Result<Computation, AnalysisError> {
    let reference = &config.reference;
    let ref_focal = reference
        .get(&config.focal)
        .map_err(|_| AnalysisError::MissingReferenceLevel(config.focal.clone()))?;
    let ref_baseline = reference
        .get(&config.baseline)
        .map_err(|_| AnalysisError::MissingReferenceLevel(config.baseline.clone()))?;

    // Surface reference problems once rather than per region.
    activity_index(0, 1, ref_focal.docs, ref_baseline.docs).map_err(AnalysisError::Reference)?;
    relative_citation_impact(0, 0, ref_focal.cites, ref_focal.docs)
        .map_err(AnalysisError::Reference)?;

    let mut rows = Vec::with_capacity(records.len());
    let mut skipped = Vec::new();
    for record in records {
        let skip = |reason: String| {
            log::info!("skipping region {}: {reason}", record.nuts);
            SkipNotice {
                nuts: record.nuts.clone(),
                reason,
            }
        };
        let Some(baseline) = record.counts(&config.baseline) else {
            skipped.push(skip(format!("no {} counts", config.baseline)));
            continue;
        };
        let Some(focal) = record.counts(&config.focal) else {
            skipped.push(skip(format!("no {} counts", config.focal)));
            continue;
        };
        if baseline.docs == 0 {
            skipped.push(skip(format!("zero {} documents", config.baseline)));
            continue;
        }
        let region_err = |source| AnalysisError::Region {
            nuts: record.nuts.clone(),
            source,
        };
        let aindx = activity_index(focal.docs, baseline.docs, ref_focal.docs, ref_baseline.docs)
            .map_err(region_err)?;
        let rsi = rsi_from_activity(aindx);
        let rci =
            relative_citation_impact(focal.cites, focal.docs, ref_focal.cites, ref_focal.docs)
                .map_err(region_err)?;
        let quadrant = rci
            .map(|_| classify_quadrant(rsi, rci))
            .transpose()
            .map_err(region_err)?;
        rows.push(IndicatorRow {
            nuts: record.nuts.clone(),
            name: record.name.clone(),
            country: record.country.clone(),
            focal_docs: focal.docs,
            focal_cites: focal.cites,
            baseline_docs: baseline.docs,
            aindx,
            rsi,
            rci,
            quadrant,
        });
    }
    sort_rows(&mut rows);
    Ok(Computation { rows, skipped })
}

/// Rows meeting the baseline-docs threshold, by descending RSI, truncated to
/// `top_n`. `top_n == 0` yields nothing.
pub fn rank_rsi(rows: &[IndicatorRow], config: &AnalysisConfig, top_n: usize) -> Vec<IndicatorRow> {
    let mut ranked: Vec<IndicatorRow> = rows
        .iter()
        .filter(|r| r.baseline_docs >= config.min_baseline_docs)
        .cloned()
        .collect();
    sort_rows(&mut ranked);
    ranked.truncate(top_n);
    ranked
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadrantReport {
    pub buckets: BTreeMap<QuadrantProfile, Vec<IndicatorRow>>,
    /// Rows dropped for too few focal documents or undefined impact.
    pub excluded: usize,
}

impl QuadrantReport {
    pub fn bucket(&self, profile: QuadrantProfile) -> &[IndicatorRow] {
        self.buckets.get(&profile).map_or(&[], Vec::as_slice)
    }

    pub fn included(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn find(&self, nuts: &str) -> Option<(QuadrantProfile, &IndicatorRow)> {
        self.buckets.iter().find_map(|(profile, rows)| {
            rows.iter()
                .find(|r| r.nuts.as_str() == nuts)
                .map(|r| (*profile, r))
        })
    }

    /// Included rows in ranking order.
    pub fn rows(&self) -> Vec<&IndicatorRow> {
        let mut out: Vec<&IndicatorRow> = self.buckets.values().flatten().collect();
        out.sort_by(|a, b| {
            b.rsi
                .value()
                .total_cmp(&a.rsi.value())
                .then_with(|| a.nuts.cmp(&b.nuts))
        });
        out
    }
}

pub fn quadrant_report(rows: &[IndicatorRow], config: &AnalysisConfig) -> QuadrantReport {
    let mut buckets: BTreeMap<QuadrantProfile, Vec<IndicatorRow>> = QuadrantProfile::ALL
        .iter()
        .map(|p| (*p, Vec::new()))
        .collect();
    let mut excluded = 0;
    for row in rows {
        match row.quadrant {
            Some(profile) if row.focal_docs >= config.min_focal_docs => {
                buckets.entry(profile).or_default().push(row.clone());
            }
            _ => excluded += 1,
        }
    }
    QuadrantReport { buckets, excluded }
}

/// Column order of the indicator table.
pub const ROW_HEADER: [&str; 12] = [
    "nuts_code",
    "region_name",
    "country",
    "focal_docs",
    "focal_cites",
    "aindx",
    "rsi",
    "rci",
    "quadrant",
    "aindx_display",
    "rsi_display",
    "rci_display",
];

pub fn display_rsi(rsi: Rsi) -> String {
    format!("{:.3}", rsi.value())
}

pub fn display_rci(rci: Rci) -> String {
    format!("{:.2}", rci.value())
}

fn display_aindx(aindx: ActivityIndex) -> String {
    format!("{:.3}", aindx.value())
}

/// Serialized form shared by the CSV and JSON outputs.
#[derive(Debug, Serialize)]
struct RowRecord<'a> {
    nuts_code: &'a str,
    region_name: &'a str,
    country: &'a str,
    focal_docs: u64,
    focal_cites: u64,
    aindx: f64,
    rsi: f64,
    rci: Option<f64>,
    quadrant: Option<&'static str>,
    aindx_display: String,
    rsi_display: String,
    rci_display: Option<String>,
}

impl<'a> From<&'a IndicatorRow> for RowRecord<'a> {
    fn from(row: &'a IndicatorRow) -> Self {
        RowRecord {
            nuts_code: row.nuts.as_str(),
            region_name: &row.name,
            country: &row.country,
            focal_docs: row.focal_docs,
            focal_cites: row.focal_cites,
            aindx: row.aindx.value(),
            rsi: row.rsi.value(),
            rci: row.rci.map(Rci::value),
            quadrant: row.quadrant.map(QuadrantProfile::as_str),
            aindx_display: display_aindx(row.aindx),
            rsi_display: display_rsi(row.rsi),
            rci_display: row.rci.map(display_rci),
        }
    }
}

/// Undefined RCI and absent quadrants become empty fields.
pub fn write_rows_csv<'a, W, I>(rows: I, sink: W) -> Result<(), AnalysisError>
where
    W: Write,
    I: IntoIterator<Item = &'a IndicatorRow>,
{
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(ROW_HEADER)?;
    for row in rows {
        let r = RowRecord::from(row);
        wtr.write_record([
            r.nuts_code.to_owned(),
            r.region_name.to_owned(),
            r.country.to_owned(),
            r.focal_docs.to_string(),
            r.focal_cites.to_string(),
            r.aindx.to_string(),
            r.rsi.to_string(),
            r.rci.map(|v| v.to_string()).unwrap_or_default(),
            r.quadrant.unwrap_or_default().to_owned(),
            r.aindx_display,
            r.rsi_display,
            r.rci_display.unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Undefined RCI and absent quadrants become `null`.
pub fn rows_to_json<'a, I>(rows: I) -> serde_json::Value
where
    I: IntoIterator<Item = &'a IndicatorRow>,
{
    let records: Vec<RowRecord<'_>> = rows.into_iter().map(RowRecord::from).collect();
    serde_json::to_value(records).expect("row records serialize to JSON")
}
