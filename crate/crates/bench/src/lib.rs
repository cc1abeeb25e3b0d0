//! Synthetic inputs sized like a full NUTS-3 run, for the criterion benches.

use std::collections::BTreeSet;

use geospec::analysis::{compute_rows, AnalysisConfig, IndicatorRow};
use geospec::dataset::{compute_reference, parse_dataset, FieldLevel, RegionRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of NUTS-3 regions in the full analysis.
pub const FULL_REGIONS: usize = 781;

/// Dataset text with AI, COMPU and ALL rows for `n` regions.
pub fn synthetic_csv(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("nuts_code,region_name,country,level,docs,cites\n");
    for i in 0..n {
        let code = format!("B{}{:03}", (b'A' + (i / 1000) as u8) as char, i % 1000);
        let all = rng.gen_range(500..200_000u64);
        let compu = rng.gen_range(0..=all / 5);
        let ai = rng.gen_range(0..=compu / 4);
        for (level, docs) in [("ALL", all), ("COMPU", compu), ("AI", ai)] {
            let cites = docs * rng.gen_range(0..30);
            out.push_str(&format!(
                "{code},Region {i},Country {},{level},{docs},{cites}\n",
                i % 27
            ));
        }
    }
    out
}

pub fn synthetic_records(n: usize, seed: u64) -> Vec<RegionRecord> {
    parse_dataset(synthetic_csv(n, seed).as_bytes()).expect("synthetic dataset parses")
}

pub fn default_config(records: &[RegionRecord]) -> AnalysisConfig {
    let levels = BTreeSet::from([FieldLevel::Ai, FieldLevel::Compu]);
    let reference = compute_reference(records, &levels).expect("reference totals");
    AnalysisConfig::new(FieldLevel::Ai, FieldLevel::Compu, reference).expect("distinct levels")
}

pub fn synthetic_rows(n: usize, seed: u64) -> Vec<IndicatorRow> {
    let records = synthetic_records(n, seed);
    compute_rows(&records, &default_config(&records)).expect("rows compute")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_size_dataset_is_valid() {
        let rows = synthetic_rows(FULL_REGIONS, 7);
        assert_eq!(rows.len(), FULL_REGIONS);
        assert_eq!(synthetic_csv(20, 3), synthetic_csv(20, 3));
    }
}
