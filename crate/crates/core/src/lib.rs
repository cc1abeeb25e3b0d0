//! Regional scientific specialization and citation-impact indicators.
//!
//! The crate computes the Activity Index, the Relative Specialization Index
//! (RSI) and the Relative Citation Impact (RCI) from region x field
//! publication and citation counts, classifies regions into the four
//! RSI x RCI profiles, and renders the results as SVG scatter plots and
//! choropleth maps.
//!
//! ```
//! use geospec::indicators::{activity_index, rsi_from_activity};
//!
//! let aindx = activity_index(10, 100, 50, 1000).unwrap();
//! let rsi = rsi_from_activity(aindx);
//! assert!((rsi.value() - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod dataset;
pub mod indicators;
pub mod render;

pub use analysis::{
    compute_rows, quadrant_report, rank_rsi, AnalysisConfig, AnalysisError, IndicatorRow,
    QuadrantReport,
};
pub use dataset::{
    compute_reference, load_reference, parse_dataset, DatasetError, FieldLevel, NutsCode,
    Provenance, ReferenceTotals, RegionRecord,
};
pub use indicators::{ActivityIndex, FieldCounts, IndicatorError, QuadrantProfile, Rci, Rsi};
