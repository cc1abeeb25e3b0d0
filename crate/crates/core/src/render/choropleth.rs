use std::collections::HashMap;
use std::fmt::Write as _;

use geojson::{GeoJson, Value};

use super::color::{DivergingScale, Rgb};
use super::{escape, num, tick_label, RenderError, Svg};
use crate::analysis::{display_rsi, IndicatorRow};

pub const DEFAULT_NUTS_PROPERTY: &str = "NUTS_ID";

#[derive(Debug, Clone, PartialEq)]
pub struct RegionShape {
    pub nuts: String,
    /// Outer rings and holes, in planar (pre-projected) coordinates.
    pub rings: Vec<Vec<(f64, f64)>>,
}

/// NUTS-3 polygons keyed by code.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySource {
    pub shapes: Vec<RegionShape>,
}

impl GeometrySource {
    /// Read a GeoJSON FeatureCollection whose features carry the NUTS code
    /// in the string property `property`.
    pub fn from_geojson(text: &str, property: &str) -> Result<Self, RenderError> {
        let geojson: GeoJson = text
            .parse()
            .map_err(|e: geojson::Error| RenderError::GeoJson(e.to_string()))?;
        let GeoJson::FeatureCollection(collection) = geojson else {
            return Err(RenderError::GeoJson(
                "top-level object is not a FeatureCollection".to_owned(),
            ));
        };
        let mut shapes = Vec::with_capacity(collection.features.len());
        for (index, feature) in collection.features.iter().enumerate() {
            let nuts = feature
                .properties
                .as_ref()
                .and_then(|p| p.get(property))
                .and_then(|v| v.as_str())
                .ok_or_else(|| RenderError::KeyMissing {
                    index,
                    property: property.to_owned(),
                })?;
            let bad = |reason: &str| RenderError::BadGeometry {
                index,
                reason: reason.to_owned(),
            };
            let geometry = feature
                .geometry
                .as_ref()
                .ok_or_else(|| bad("feature has no geometry"))?;
            let polygons: Vec<&Vec<Vec<Vec<f64>>>> = match &geometry.value {
                Value::Polygon(rings) => vec![rings],
                Value::MultiPolygon(polys) => polys.iter().collect(),
                other => return Err(bad(&format!("{} is not polygonal", other.type_name()))),
            };
            let mut rings = Vec::new();
            for ring in polygons.into_iter().flatten() {
                let mut points = Vec::with_capacity(ring.len());
                for pos in ring {
                    match pos.as_slice() {
                        [x, y, ..] if x.is_finite() && y.is_finite() => points.push((*x, *y)),
                        _ => return Err(bad("ring position is not a finite coordinate pair")),
                    }
                }
                if points.len() < 3 {
                    return Err(bad("ring has fewer than three positions"));
                }
                rings.push(points);
            }
            if rings.is_empty() {
                return Err(bad("polygon has no rings"));
            }
            shapes.push(RegionShape {
                nuts: nuts.to_owned(),
                rings,
            });
        }
        Ok(Self { shapes })
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in self.shapes.iter().flat_map(|s| s.rings.iter().flatten()) {
            b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoroplethSpec {
    pub geometry: GeometrySource,
    pub scale: DivergingScale,
    pub missing_fill: Rgb,
    pub title: String,
    pub width: f64,
    pub height: f64,
}

impl ChoroplethSpec {
    pub fn new(geometry: GeometrySource) -> Self {
        Self {
            geometry,
            scale: DivergingScale::default(),
            missing_fill: Rgb(255, 255, 255),
            title: "Relative Specialization Index (RSI) by NUTS-3 region".to_owned(),
            width: 900.0,
            height: 800.0,
        }
    }
}

const MAP_MARGIN: f64 = 20.0;
const TITLE_BAND: f64 = 40.0;
const LEGEND_BAND: f64 = 70.0;
const LEGEND_STEPS: usize = 40;

/// Fill every shape by its region's RSI; shapes without a row get
/// `missing_fill`.
pub fn render_choropleth(
    rows: &[IndicatorRow],
    spec: &ChoroplethSpec,
) -> Result<String, RenderError> {
    if spec.geometry.shapes.is_empty() {
        return Err(RenderError::EmptyInput);
    }
    if !(spec.width > 200.0 && spec.height > 200.0) {
        return Err(RenderError::InvalidSpec(
            "canvas must be larger than 200x200".to_owned(),
        ));
    }
    let mut by_code: HashMap<&str, &IndicatorRow> = HashMap::with_capacity(rows.len());
    for row in rows {
        by_code.entry(row.nuts.as_str()).or_insert(row);
    }

    let (min_x, min_y, max_x, max_y) = spec.geometry.bounds();
    let avail_w = spec.width - 2.0 * MAP_MARGIN;
    let avail_h = spec.height - 2.0 * MAP_MARGIN - TITLE_BAND - LEGEND_BAND;
    let bw = (max_x - min_x).max(f64::MIN_POSITIVE);
    let bh = (max_y - min_y).max(f64::MIN_POSITIVE);
    let k = (avail_w / bw).min(avail_h / bh);
    let off_x = MAP_MARGIN + (avail_w - bw * k) / 2.0;
    let off_y = MAP_MARGIN + TITLE_BAND + (avail_h - bh * k) / 2.0;
    let project = |(x, y): (f64, f64)| (off_x + (x - min_x) * k, off_y + (max_y - y) * k);

    let mut svg = Svg::new(spec.width, spec.height, &spec.title);
    svg.text(
        spec.width / 2.0,
        30.0,
        "middle",
        16.0,
        " font-weight=\"bold\"",
        &spec.title,
    );
    svg.line("<g class=\"regions\" stroke=\"#666666\" stroke-width=\"0.3\" fill-rule=\"evenodd\">");
    for shape in &spec.geometry.shapes {
        let mut d = String::new();
        for ring in &shape.rings {
            for (i, p) in ring.iter().enumerate() {
                let (x, y) = project(*p);
                let _ = write!(
                    d,
                    "{}{} {}",
                    if i == 0 { "M" } else { " L" },
                    num(x),
                    num(y)
                );
            }
            d.push_str(" Z ");
        }
        let d = d.trim_end();
        let (class, fill, tip) = match by_code.get(shape.nuts.as_str()) {
            Some(row) => (
                "region",
                spec.scale.color(row.rsi.value()),
                format!("{} ({}): RSI={}", row.name, row.nuts, display_rsi(row.rsi)),
            ),
            None => (
                "region missing",
                spec.missing_fill,
                format!("{}: no data", shape.nuts),
            ),
        };
        svg.line(&format!(
            "<path class=\"{class}\" d=\"{d}\" fill=\"{}\"><title>{}</title></path>",
            fill.hex(),
            escape(&tip)
        ));
    }
    svg.line("</g>");

    // Legend: a stepped bar over the scale domain plus a no-data swatch.
    let (lo, hi) = spec.scale.domain();
    let bar_w = (spec.width * 0.5).min(400.0);
    let bar_x = (spec.width - bar_w) / 2.0;
    let bar_y = spec.height - MAP_MARGIN - LEGEND_BAND + 18.0;
    let step_w = bar_w / LEGEND_STEPS as f64;
    svg.line("<g class=\"legend\">");
    svg.text(spec.width / 2.0, bar_y - 6.0, "middle", 12.0, "", "RSI");
    for i in 0..LEGEND_STEPS {
        let v = lo + (hi - lo) * (i as f64 + 0.5) / LEGEND_STEPS as f64;
        svg.line(&format!(
            "<rect class=\"legend-swatch\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"14.00\" fill=\"{}\"/>",
            num(bar_x + i as f64 * step_w),
            num(bar_y),
            num(step_w + 0.05),
            spec.scale.color(v).hex()
        ));
    }
    for stop in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let x = bar_x + (stop - lo) / (hi - lo) * bar_w;
        svg.line(&format!(
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"0.8\"/>",
            num(bar_y + 14.0),
            num(bar_y + 18.0),
            x = num(x)
        ));
        svg.text(x, bar_y + 30.0, "middle", 11.0, "", &tick_label(stop));
    }
    let nd_x = bar_x + bar_w + 24.0;
    svg.line(&format!(
        "<rect class=\"legend-missing\" x=\"{}\" y=\"{}\" width=\"14.00\" height=\"14.00\" fill=\"{}\" stroke=\"#666666\" stroke-width=\"0.5\"/>",
        num(nd_x),
        num(bar_y),
        spec.missing_fill.hex()
    ));
    svg.text(nd_x + 18.0, bar_y + 11.0, "start", 11.0, "", "no data");
    svg.line("</g>");
    Ok(svg.finish())
}
