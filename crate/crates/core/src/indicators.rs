//! Activity Index, Relative Specialization Index, Relative Citation Impact
//! and the RSI x RCI quadrant taxonomy.
//!
//! Every function here is a pure function of its arguments. Counts stay as
//! exact integers until the final division; ratios are `f64`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicatorError {
    #[error("region has zero output in the baseline field and cannot be assessed")]
    ZeroRegionOutput,
    #[error("reference benchmark is degenerate: {0}")]
    DegenerateReference(&'static str),
    #[error("inconsistent counts: {what} ({focal}) exceeds its total ({total})")]
    InconsistentCounts {
        what: &'static str,
        focal: u64,
        total: u64,
    },
    #[error("value {0} is outside the domain of the transform")]
    OutOfDomain(f64),
    #[error("citation impact is undefined for a region without focal publications")]
    UndefinedImpact,
    #[error("citations ({cites}) reported without any documents")]
    CitesWithoutDocs { cites: u64 },
}

/// Document and citation counts of one region (or the reference population)
/// in one field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldCounts {
    pub docs: u64,
    pub cites: u64,
}

impl FieldCounts {
    pub fn new(docs: u64, cites: u64) -> Result<Self, IndicatorError> {
        if docs == 0 && cites > 0 {
            return Err(IndicatorError::CitesWithoutDocs { cites });
        }
        Ok(Self { docs, cites })
    }
}

/// Ratio of a region's share of output in a field to the reference share.
/// Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ActivityIndex(f64);

impl ActivityIndex {
    pub fn new(value: f64) -> Result<Self, IndicatorError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(IndicatorError::OutOfDomain(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Symmetric specialization index in `[-1, 1)`, neutral at 0.
///
/// Besides the value itself the type keeps the gap `1 - value`, computed
/// directly from the activity index. Near the upper bound `1 - value` loses
/// almost every significant digit when formed by subtraction, and the
/// inverse transform divides by exactly that quantity.
#[derive(Debug, Clone, Copy)]
pub struct Rsi {
    value: f64,
    upper_gap: f64,
}

/// Largest `f64` strictly below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

impl Rsi {
    pub fn new(value: f64) -> Result<Self, IndicatorError> {
        if value.is_finite() && (-1.0..1.0).contains(&value) {
            Ok(Self {
                value,
                upper_gap: 1.0 - value,
            })
        } else {
            Err(IndicatorError::OutOfDomain(value))
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn is_specialized(self) -> bool {
        self.value > 0.0
    }
}

impl PartialEq for Rsi {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Rsi {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl Serialize for Rsi {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value)
    }
}

/// Relative citation impact of a region with at least one focal publication.
/// 1.0 is the reference mean.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Rci(f64);

impl Rci {
    pub fn new(value: f64) -> Result<Self, IndicatorError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(IndicatorError::OutOfDomain(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Position of a region in the RSI x RCI plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QuadrantProfile {
    /// RSI > 0, RCI > 1.
    SpecializedHighImpact,
    /// RSI > 0, RCI < 1.
    SpecializedLowImpact,
    /// RSI < 0, RCI > 1.
    UnspecializedHighImpact,
    /// RSI < 0, RCI < 1.
    UnspecializedLowImpact,
    /// Exactly on RSI = 0 or RCI = 1.
    Boundary,
}

impl QuadrantProfile {
    pub const ALL: [QuadrantProfile; 5] = [
        QuadrantProfile::SpecializedHighImpact,
        QuadrantProfile::SpecializedLowImpact,
        QuadrantProfile::UnspecializedHighImpact,
        QuadrantProfile::UnspecializedLowImpact,
        QuadrantProfile::Boundary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuadrantProfile::SpecializedHighImpact => "SpecializedHighImpact",
            QuadrantProfile::SpecializedLowImpact => "SpecializedLowImpact",
            QuadrantProfile::UnspecializedHighImpact => "UnspecializedHighImpact",
            QuadrantProfile::UnspecializedLowImpact => "UnspecializedLowImpact",
            QuadrantProfile::Boundary => "Boundary",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            QuadrantProfile::SpecializedHighImpact => "specialized, above-average impact",
            QuadrantProfile::SpecializedLowImpact => "specialized, below-average impact",
            QuadrantProfile::UnspecializedHighImpact => "not specialized, above-average impact",
            QuadrantProfile::UnspecializedLowImpact => "not specialized, below-average impact",
            QuadrantProfile::Boundary => "on a reference line",
        }
    }
}

impl fmt::Display for QuadrantProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(region_focal / region_total) / (reference_focal / reference_total)`.
pub fn activity_index(
    region_focal_docs: u64,
    region_total_docs: u64,
    reference_focal_docs: u64,
    reference_total_docs: u64,
) -> Result<ActivityIndex, IndicatorError> {
    if reference_total_docs == 0 {
        return Err(IndicatorError::DegenerateReference(
            "reference has no documents in the baseline field",
        ));
    }
    if reference_focal_docs == 0 {
        return Err(IndicatorError::DegenerateReference(
            "reference has no documents in the focal field",
        ));
    }
    if reference_focal_docs > reference_total_docs {
        return Err(IndicatorError::InconsistentCounts {
            what: "reference focal documents",
            focal: reference_focal_docs,
            total: reference_total_docs,
        });
    }
    if region_total_docs == 0 {
        return Err(IndicatorError::ZeroRegionOutput);
    }
    if region_focal_docs > region_total_docs {
        return Err(IndicatorError::InconsistentCounts {
            what: "region focal documents",
            focal: region_focal_docs,
            total: region_total_docs,
        });
    }
    let region_share = region_focal_docs as f64 / region_total_docs as f64;
    let reference_share = reference_focal_docs as f64 / reference_total_docs as f64;
    ActivityIndex::new(region_share / reference_share)
}

/// `(a - 1) / (a + 1)`.
pub fn rsi_from_activity(aindx: ActivityIndex) -> Rsi {
    let a = aindx.value();
    let value = ((a - 1.0) / (a + 1.0)).min(BELOW_ONE);
    let upper_gap = 2.0 / (a + 1.0);
    Rsi { value, upper_gap }
}

/// `(1 + rsi) / (1 - rsi)`, the inverse of [`rsi_from_activity`].
pub fn activity_from_rsi(rsi: Rsi) -> Result<ActivityIndex, IndicatorError> {
    let v = rsi.value;
    if !(v.is_finite() && (-1.0..1.0).contains(&v)) || rsi.upper_gap <= 0.0 {
        return Err(IndicatorError::OutOfDomain(v));
    }
    // 1 + v == 2 - gap
    ActivityIndex::new((2.0 - rsi.upper_gap) / rsi.upper_gap)
}

/// Convenience wrapper over [`activity_from_rsi`] for a raw value.
pub fn activity_from_rsi_value(rsi: f64) -> Result<ActivityIndex, IndicatorError> {
    activity_from_rsi(Rsi::new(rsi)?)
}

/// `(region_cites / region_docs) / (reference_cites / reference_docs)`.
///
/// Returns `Ok(None)` when the region has no focal publications.
pub fn relative_citation_impact(
    region_focal_cites: u64,
    region_focal_docs: u64,
    reference_focal_cites: u64,
    reference_focal_docs: u64,
) -> Result<Option<Rci>, IndicatorError> {
    if reference_focal_docs == 0 {
        return Err(IndicatorError::DegenerateReference(
            "reference has no documents in the focal field",
        ));
    }
    if reference_focal_cites == 0 {
        return Err(IndicatorError::DegenerateReference(
            "reference mean citation rate in the focal field is zero",
        ));
    }
    if region_focal_docs == 0 {
        if region_focal_cites > 0 {
            return Err(IndicatorError::CitesWithoutDocs {
                cites: region_focal_cites,
            });
        }
        return Ok(None);
    }
    let region_mean = region_focal_cites as f64 / region_focal_docs as f64;
    let reference_mean = reference_focal_cites as f64 / reference_focal_docs as f64;
    Rci::new(region_mean / reference_mean).map(Some)
}

pub fn classify_quadrant(rsi: Rsi, rci: Option<Rci>) -> Result<QuadrantProfile, IndicatorError> {
    let rci = rci.ok_or(IndicatorError::UndefinedImpact)?.value();
    let rsi = rsi.value();
    let profile = match (rsi.partial_cmp(&0.0), rci.partial_cmp(&1.0)) {
        (Some(Ordering::Greater), Some(Ordering::Greater)) => {
            QuadrantProfile::SpecializedHighImpact
        }
        (Some(Ordering::Greater), Some(Ordering::Less)) => QuadrantProfile::SpecializedLowImpact,
        (Some(Ordering::Less), Some(Ordering::Greater)) => QuadrantProfile::UnspecializedHighImpact,
        (Some(Ordering::Less), Some(Ordering::Less)) => QuadrantProfile::UnspecializedLowImpact,
        _ => QuadrantProfile::Boundary,
    };
    Ok(profile)
}
