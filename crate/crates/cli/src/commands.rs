use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use geospec::analysis::{
    compute_rows_detailed, quadrant_report, rank_rsi, rows_to_json, write_rows_csv, AnalysisConfig,
    Computation, IndicatorRow,
};
use geospec::dataset::{
    compute_reference, load_reference, parse_dataset, DatasetError, ReferenceTotals, RegionRecord,
};
use geospec::render::{
    render_choropleth, render_scatter, ChoroplethSpec, GeometrySource, ScatterSpec,
};
use serde_json::json;

use crate::config::{RunConfig, TableFormat};
use crate::error::Failure;
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig3,
    Map,
}

impl Figure {
    fn file_name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1.svg",
            Figure::Fig3 => "fig3.svg",
            Figure::Map => "map.svg",
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig3 => "fig3",
            Figure::Map => "map",
        }
    }
}

/// Dataset, reference and computed rows shared by every subcommand.
struct Prepared {
    records: Vec<RegionRecord>,
    analysis: AnalysisConfig,
    computation: Computation,
}

fn dataset_failure(path: &Path, e: DatasetError) -> Failure {
    match e {
        DatasetError::Csv(ref inner) if inner.is_io_error() => {
            Failure::input(format!("{}: cannot read: {inner}", path.display()))
        }
        other => Failure::input(format!("{}: {other}", path.display())),
    }
}

fn prepare(config: &RunConfig) -> Result<Prepared, Failure> {
    let file = File::open(&config.input).map_err(|e| {
        Failure::input(format!(
            "{}: cannot open input: {e}",
            config.input.display()
        ))
    })?;
    let records = parse_dataset(file).map_err(|e| dataset_failure(&config.input, e))?;
    if records.is_empty() {
        return Err(Failure::input(format!(
            "{}: dataset has no rows",
            config.input.display()
        )));
    }

    let reference: ReferenceTotals = match &config.reference {
        Some(path) => {
            let file = File::open(path).map_err(|e| {
                Failure::input(format!("{}: cannot open reference: {e}", path.display()))
            })?;
            load_reference(file).map_err(|e| dataset_failure(path, e))?
        }
        None => {
            let levels = BTreeSet::from([config.focal.clone(), config.baseline.clone()]);
            compute_reference(&records, &levels).map_err(|e| dataset_failure(&config.input, e))?
        }
    };
    let reference_path = config.reference.as_deref().unwrap_or(&config.input);
    for level in [&config.focal, &config.baseline] {
        reference
            .get(level)
            .map_err(|e| dataset_failure(reference_path, e))?;
    }

    let analysis = AnalysisConfig::new(config.focal.clone(), config.baseline.clone(), reference)
        .map_err(|e| Failure::input(e.to_string()))?
        .with_thresholds(config.min_baseline_docs, config.min_focal_docs);
    let computation = compute_rows_detailed(&records, &analysis)
        .map_err(|e| Failure::input(format!("{}: {e}", reference_path.display())))?;
    Ok(Prepared {
        records,
        analysis,
        computation,
    })
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
    ) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()
            .with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    fn tables(
        &mut self,
        stem: &str,
        formats: &[TableFormat],
        rows: &[&IndicatorRow],
    ) -> Result<(), Failure> {
        for format in formats {
            match format {
                TableFormat::Csv => self.write(&format!("{stem}.csv"), |w| {
                    write_rows_csv(rows.iter().copied(), w)?;
                    Ok(())
                })?,
                TableFormat::Json => self.write(&format!("{stem}.json"), |w| {
                    json_to(w, &rows_to_json(rows.iter().copied()))
                })?,
            }
        }
        Ok(())
    }
}

fn json_to(w: &mut dyn Write, value: &serde_json::Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn write_run_json(
    out: &mut Outputs<'_>,
    command: &str,
    config: &RunConfig,
    prepared: &Prepared,
    emitted: usize,
    extra: serde_json::Value,
) -> Result<(), Failure> {
    let reference = prepared.analysis.reference();
    let data_rows: usize = prepared.records.iter().map(|r| r.counts.len()).sum();
    let levels: BTreeSet<String> = prepared
        .records
        .iter()
        .flat_map(|r| r.counts.keys().map(ToString::to_string))
        .collect();
    let totals: BTreeMap<String, serde_json::Value> = reference
        .counts
        .iter()
        .map(|(l, c)| (l.to_string(), json!({ "docs": c.docs, "cites": c.cites })))
        .collect();
    let mut outputs = out.written.clone();
    outputs.push("run.json".to_owned());
    let run = json!({
        "command": command,
        "config": config,
        "dataset": {
            "path": config.input,
            "data_rows": data_rows,
            "regions": prepared.records.len(),
            "levels": levels,
        },
        "reference": {
            "provenance": reference.provenance,
            "totals": totals,
        },
        "rows": {
            "computed": prepared.computation.rows.len(),
            "skipped": prepared.computation.skipped.len(),
            "emitted": emitted,
        },
        "skipped_regions": prepared.computation.skipped,
        "outputs": outputs,
        "details": extra,
    });
    out.write("run.json", |w| json_to(w, &run))
}

pub fn compute(config: &RunConfig) -> Result<(), Failure> {
    let prepared = prepare(config)?;
    let rows: Vec<&IndicatorRow> = prepared.computation.rows.iter().collect();
    let mut out = Outputs::new(&config.out_dir)?;
    out.tables("indicators", &config.formats, &rows)?;
    write_run_json(
        &mut out,
        "compute",
        config,
        &prepared,
        rows.len(),
        json!({}),
    )?;
    println!(
        "{} indicator rows ({} regions skipped) written to {}",
        rows.len(),
        prepared.computation.skipped.len(),
        config.out_dir.display()
    );
    Ok(())
}

pub fn rank(config: &RunConfig) -> Result<(), Failure> {
    let prepared = prepare(config)?;
    let ranked = rank_rsi(&prepared.computation.rows, &prepared.analysis, config.top);
    let eligible = prepared
        .computation
        .rows
        .iter()
        .filter(|r| r.baseline_docs >= config.min_baseline_docs)
        .count();
    let refs: Vec<&IndicatorRow> = ranked.iter().collect();
    let mut out = Outputs::new(&config.out_dir)?;
    out.tables("ranking", &config.formats, &refs)?;
    write_run_json(
        &mut out,
        "rank",
        config,
        &prepared,
        ranked.len(),
        json!({ "eligible": eligible, "top": config.top }),
    )?;
    print!("{}", report::ranking_table(&ranked, &prepared.analysis));
    Ok(())
}

pub fn classify(config: &RunConfig) -> Result<(), Failure> {
    let prepared = prepare(config)?;
    let report = quadrant_report(&prepared.computation.rows, &prepared.analysis);
    let included = report.rows();
    let mut out = Outputs::new(&config.out_dir)?;
    for format in &config.formats {
        match format {
            TableFormat::Csv => out.write("quadrants.csv", |w| {
                write_rows_csv(included.iter().copied(), w)?;
                Ok(())
            })?,
            TableFormat::Json => {
                let buckets: BTreeMap<&str, serde_json::Value> = report
                    .buckets
                    .iter()
                    .map(|(p, rows)| (p.as_str(), rows_to_json(rows)))
                    .collect();
                let doc = json!({ "buckets": buckets, "excluded": report.excluded });
                out.write("quadrants.json", |w| json_to(w, &doc))?
            }
        }
    }
    let markdown =
        report::quadrant_markdown(&prepared.computation.rows, &report, &prepared.analysis);
    out.write("report.md", |w| {
        w.write_all(markdown.as_bytes())?;
        Ok(())
    })?;
    let counts: BTreeMap<&str, usize> = report
        .buckets
        .iter()
        .map(|(p, r)| (p.as_str(), r.len()))
        .collect();
    write_run_json(
        &mut out,
        "classify",
        config,
        &prepared,
        included.len(),
        json!({ "bucket_sizes": counts, "excluded": report.excluded }),
    )?;
    for (profile, n) in &counts {
        println!("{profile:<24} {n}");
    }
    println!("{:<24} {}", "excluded", report.excluded);
    Ok(())
}

pub fn plot(config: &RunConfig, figure: Figure) -> Result<(), Failure> {
    // Check for geometry before touching the dataset.
    let geometry = match figure {
        Figure::Map => {
            let path = config.geojson.as_ref().ok_or_else(|| {
                Failure::input("plot map requires --geojson with NUTS-3 geometries")
            })?;
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::input(format!("{}: cannot read geometry: {e}", path.display()))
            })?;
            Some(
                GeometrySource::from_geojson(&text, &config.nuts_property)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
            )
        }
        _ => None,
    };
    let prepared = prepare(config)?;
    let rows = &prepared.computation.rows;
    let (svg, plotted) = match figure {
        Figure::Fig1 => {
            let svg = render_scatter(rows, &ScatterSpec::output_vs_cites())
                .map_err(|e| Failure::input(format!("{}: {e}", config.input.display())))?;
            (svg, rows.len())
        }
        Figure::Fig3 => {
            let report = quadrant_report(rows, &prepared.analysis);
            let kept: Vec<IndicatorRow> = report.rows().into_iter().cloned().collect();
            let mut spec = ScatterSpec::rsi_vs_rci();
            spec.title = format!(
                "{} (regions with at least {} {} papers)",
                spec.title, config.min_focal_docs, config.focal
            );
            let svg = render_scatter(&kept, &spec)
                .map_err(|e| Failure::input(format!("{}: {e}", config.input.display())))?;
            (svg, kept.len())
        }
        Figure::Map => {
            let spec = ChoroplethSpec::new(geometry.expect("geometry loaded for map"));
            let svg = render_choropleth(rows, &spec).map_err(|e| Failure::input(e.to_string()))?;
            (svg, spec.geometry.shapes.len())
        }
    };
    let mut out = Outputs::new(&config.out_dir)?;
    out.write(figure.file_name(), |w| {
        w.write_all(svg.as_bytes())?;
        Ok(())
    })?;
    write_run_json(
        &mut out,
        &format!("plot {}", figure.as_str()),
        config,
        &prepared,
        plotted,
        json!({ "figure": figure.as_str() }),
    )?;
    println!(
        "wrote {}",
        config.out_dir.join(figure.file_name()).display()
    );
    Ok(())
}
