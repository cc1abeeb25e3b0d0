//! Human-readable summaries printed to stdout or written as `report.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use geospec::analysis::{
    display_rci, display_rsi, rank_rsi, AnalysisConfig, IndicatorRow, QuadrantReport,
};
use geospec::QuadrantProfile;

pub fn ranking_table(rows: &[IndicatorRow], config: &AnalysisConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Top {} RSI regions ({} in {}, baseline {}, at least {} {} documents)",
        rows.len(),
        config.focal(),
        config.baseline(),
        config.baseline(),
        config.min_baseline_docs,
        config.baseline()
    );
    let name_w = rows
        .iter()
        .map(|r| r.name.chars().count())
        .max()
        .unwrap_or(6)
        .max(6);
    let country_w = rows
        .iter()
        .map(|r| r.country.chars().count())
        .max()
        .unwrap_or(7)
        .max(7);
    let _ = writeln!(
        out,
        "{:>4}  {:<5}  {:<name_w$}  {:<country_w$}  {:>6}",
        "rank", "nuts", "region", "country", "RSI"
    );
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:<5}  {:<name_w$}  {:<country_w$}  {:>6}",
            i + 1,
            r.nuts.as_str(),
            r.name,
            r.country,
            display_rsi(r.rsi)
        );
    }
    out
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Quadrant profile report with per-profile members and the spread of impact
/// across specialization bands.
pub fn quadrant_markdown(
    all_rows: &[IndicatorRow],
    report: &QuadrantReport,
    config: &AnalysisConfig,
) -> String {
    let mut md = String::new();
    let _ = writeln!(
        md,
        "# Regional profiles: {} specialization vs. citation impact\n",
        config.focal()
    );
    let _ = writeln!(
        md,
        "Focal level `{}`, baseline `{}`, reference totals {:?}. Regions need at least {} {} documents \
         and a defined citation impact to be placed; {} of {} computed regions were excluded.\n",
        config.focal(),
        config.baseline(),
        config.reference().provenance,
        config.min_focal_docs,
        config.focal(),
        report.excluded,
        all_rows.len()
    );

    md.push_str("## Profiles\n\n| profile | RSI | RCI | regions |\n|---|---|---|---|\n");
    for profile in QuadrantProfile::ALL {
        let (rsi, rci) = match profile {
            QuadrantProfile::SpecializedHighImpact => ("> 0", "> 1"),
            QuadrantProfile::SpecializedLowImpact => ("> 0", "< 1"),
            QuadrantProfile::UnspecializedHighImpact => ("< 0", "> 1"),
            QuadrantProfile::UnspecializedLowImpact => ("< 0", "< 1"),
            QuadrantProfile::Boundary => ("= 0", "or = 1"),
        };
        let _ = writeln!(
            md,
            "| {} ({}) | {rsi} | {rci} | {} |",
            profile,
            profile.description(),
            report.bucket(profile).len()
        );
    }

    md.push_str(
        "\n## Leading regions per profile\n\nUp to ten regions per profile, by descending RCI.\n",
    );
    for profile in QuadrantProfile::ALL {
        let bucket = report.bucket(profile);
        if bucket.is_empty() {
            continue;
        }
        let mut by_impact: Vec<&IndicatorRow> = bucket.iter().collect();
        by_impact.sort_by(|a, b| {
            b.rci
                .map(|r| r.value())
                .unwrap_or(0.0)
                .total_cmp(&a.rci.map(|r| r.value()).unwrap_or(0.0))
                .then_with(|| a.nuts.cmp(&b.nuts))
        });
        let _ = writeln!(md, "\n### {profile}\n\n| region | country | NUTS | docs | RSI | RCI |\n|---|---|---|---|---|---|");
        for r in by_impact.iter().take(10) {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} |",
                r.name,
                r.country,
                r.nuts,
                r.focal_docs,
                display_rsi(r.rsi),
                r.rci.map(display_rci).unwrap_or_default()
            );
        }
    }

    md.push_str("\n## Impact across specialization bands\n\n");
    md.push_str("A wide RCI range inside every RSI band means specialization alone says little about impact.\n\n");
    md.push_str("| RSI band | regions | min RCI | median RCI | max RCI |\n|---|---|---|---|---|\n");
    let bands: [(&str, f64, f64); 4] = [
        ("[-1, -0.33)", -1.0, -0.33),
        ("[-0.33, 0)", -0.33, 0.0),
        ("[0, 0.33)", 0.0, 0.33),
        ("[0.33, 1)", 0.33, 1.0),
    ];
    let placed = report.rows();
    for (label, lo, hi) in bands {
        let mut rci: Vec<f64> = placed
            .iter()
            .filter(|r| (lo..hi).contains(&r.rsi.value()))
            .filter_map(|r| r.rci.map(|v| v.value()))
            .collect();
        rci.sort_by(f64::total_cmp);
        if rci.is_empty() {
            let _ = writeln!(md, "| {label} | 0 | | | |");
        } else {
            let _ = writeln!(
                md,
                "| {label} | {} | {:.2} | {:.2} | {:.2} |",
                rci.len(),
                rci[0],
                median(&rci),
                rci[rci.len() - 1]
            );
        }
    }

    let top = rank_rsi(all_rows, config, 20);
    if !top.is_empty() {
        let mut countries: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &top {
            *countries.entry(r.country.as_str()).or_default() += 1;
        }
        let mut countries: Vec<(&str, usize)> = countries.into_iter().collect();
        countries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let _ = writeln!(
            md,
            "\n## Countries in the top-{} RSI ranking\n\nRegions with at least {} {} documents.\n\n| country | regions |\n|---|---|",
            top.len(),
            config.min_baseline_docs,
            config.baseline()
        );
        for (country, n) in countries {
            let _ = writeln!(md, "| {country} | {n} |");
        }
    }
    md
}
