//! Straight-from-the-formula recomputation of the indicator pipeline.
//!
//! Nothing here touches the `geospec` crate. Inputs are plain tuples, the
//! dataset text is produced by hand, and every ratio is formed from exact
//! integer cross products before a single final division.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;

#[derive(Debug, Clone)]
pub struct SyntheticRegion {
    pub code: String,
    pub name: String,
    pub ai: (u64, u64),
    pub compu: (u64, u64),
    pub all: Option<(u64, u64)>,
}

pub fn generate<R: Rng>(rng: &mut R, max_regions: usize) -> Vec<SyntheticRegion> {
    let n = rng.gen_range(1..=max_regions);
    (0..n)
        .map(|i| {
            let compu_docs = if rng.gen_bool(0.1) {
                0
            } else {
                rng.gen_range(1..3000)
            };
            let ai_docs = if compu_docs == 0 || rng.gen_bool(0.1) {
                0
            } else {
                rng.gen_range(0..=compu_docs)
            };
            let cites = |rng: &mut R, docs: u64| {
                if docs == 0 {
                    0
                } else {
                    rng.gen_range(0..docs * 30)
                }
            };
            let ai = (ai_docs, cites(rng, ai_docs));
            let compu = (compu_docs, cites(rng, compu_docs));
            let all = rng.gen_bool(0.7).then(|| {
                let d = compu_docs + rng.gen_range(0..20_000);
                (d, cites(rng, d))
            });
            SyntheticRegion {
                code: format!("Q{}{:03}", (b'A' + (i % 26) as u8) as char, 100 + i),
                name: format!("Region {i}"),
                ai,
                compu,
                all,
            }
        })
        .collect()
}

pub fn to_csv(regions: &[SyntheticRegion]) -> String {
    let mut out = String::from("nuts_code,region_name,country,level,docs,cites\n");
    for r in regions {
        out.push_str(&format!(
            "{},{},Testland,AI,{},{}\n",
            r.code, r.name, r.ai.0, r.ai.1
        ));
        out.push_str(&format!(
            "{},{},Testland,COMPU,{},{}\n",
            r.code, r.name, r.compu.0, r.compu.1
        ));
        if let Some((d, c)) = r.all {
            out.push_str(&format!("{},{},Testland,ALL,{},{}\n", r.code, r.name, d, c));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub code: String,
    pub focal_docs: u64,
    pub baseline_docs: u64,
    pub aindx: f64,
    pub rsi: f64,
    pub rci: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Expected {
    pub rows: BTreeMap<String, ExpectedRow>,
    pub ranked: Vec<String>,
    pub buckets: BTreeMap<&'static str, Vec<String>>,
    pub excluded: usize,
}

/// `None` when the reference totals are degenerate for this pair.
pub fn expected(
    regions: &[SyntheticRegion],
    baseline_all: bool,
    min_baseline: u64,
    min_focal: u64,
    top_n: usize,
) -> Option<Expected> {
    let baseline = |r: &SyntheticRegion| if baseline_all { r.all } else { Some(r.compu) };
    let w_focal_docs: u128 = regions.iter().map(|r| r.ai.0 as u128).sum();
    let w_focal_cites: u128 = regions.iter().map(|r| r.ai.1 as u128).sum();
    let w_base_docs: u128 = regions
        .iter()
        .filter_map(baseline)
        .map(|b| b.0 as u128)
        .sum();
    let any_base = regions.iter().any(|r| baseline(r).is_some());
    if !any_base || w_focal_docs == 0 || w_focal_cites == 0 || w_base_docs == 0 {
        return None;
    }

    let mut rows = BTreeMap::new();
    for r in regions {
        let Some(base) = baseline(r) else { continue };
        if base.0 == 0 {
            continue;
        }
        let (fd, fc) = (r.ai.0 as u128, r.ai.1 as u128);
        let bd = base.0 as u128;
        // aindx = fd * W_base / (bd * W_focal)
        let num = fd * w_base_docs;
        let den = bd * w_focal_docs;
        let aindx = num as f64 / den as f64;
        let rsi = (num as i128 - den as i128) as f64 / (num + den) as f64;
        let rci = (fd > 0).then(|| (fc * w_focal_docs) as f64 / (fd * w_focal_cites) as f64);
        rows.insert(
            r.code.clone(),
            ExpectedRow {
                code: r.code.clone(),
                focal_docs: r.ai.0,
                baseline_docs: base.0,
                aindx,
                rsi,
                rci,
            },
        );
    }

    // Rank position = number of eligible rows strictly ahead.
    let eligible: Vec<&ExpectedRow> = rows
        .values()
        .filter(|r| r.baseline_docs >= min_baseline)
        .collect();
    let mut positioned: Vec<(usize, String)> = eligible
        .iter()
        .map(|r| {
            let ahead = eligible
                .iter()
                .filter(|o| o.rsi > r.rsi || (o.rsi == r.rsi && o.code < r.code))
                .count();
            (ahead, r.code.clone())
        })
        .collect();
    positioned.sort();
    let ranked = positioned
        .into_iter()
        .filter(|(pos, _)| *pos < top_n)
        .map(|(_, code)| code)
        .collect();

    let mut buckets: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
    let mut excluded = 0;
    for r in rows.values() {
        let Some(rci) = r.rci else {
            excluded += 1;
            continue;
        };
        if r.focal_docs < min_focal {
            excluded += 1;
            continue;
        }
        let name = if r.rsi == 0.0 || rci == 1.0 {
            "Boundary"
        } else if r.rsi > 0.0 && rci > 1.0 {
            "SpecializedHighImpact"
        } else if r.rsi > 0.0 {
            "SpecializedLowImpact"
        } else if rci > 1.0 {
            "UnspecializedHighImpact"
        } else {
            "UnspecializedLowImpact"
        };
        buckets.entry(name).or_default().push(r.code.clone());
    }
    Some(Expected {
        rows,
        ranked,
        buckets,
        excluded,
    })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
