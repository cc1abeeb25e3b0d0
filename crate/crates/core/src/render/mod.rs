//! Static SVG output: indicator scatter plots and RSI choropleth maps.
//!
//! Rendering is a pure function of its inputs. Coordinates are printed with
//! a fixed number of decimals so identical inputs give byte-identical files.

mod choropleth;
pub mod color;
mod scatter;

use std::fmt::Write as _;

use thiserror::Error;

pub use choropleth::{
    render_choropleth, ChoroplethSpec, GeometrySource, RegionShape, DEFAULT_NUTS_PROPERTY,
};
pub use color::{DivergingScale, Rgb};
pub use scatter::{render_scatter, PlotVariable, ReferenceLine, ScatterSpec};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("no row has values for both plot axes")]
    EmptyInput,
    #[error("invalid plot specification: {0}")]
    InvalidSpec(String),
    #[error("feature {index}: {reason}")]
    BadGeometry { index: usize, reason: String },
    #[error("feature {index} lacks a string {property:?} property")]
    KeyMissing { index: usize, property: String },
    #[error("geometry source is not a GeoJSON FeatureCollection: {0}")]
    GeoJson(String),
}

/// Escape text for element content and attribute values.
pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // XML 1.0 forbids most control characters outright.
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

/// Fixed two-decimal coordinate, with negative zero normalized.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

pub(crate) struct Svg {
    buf: String,
}

impl Svg {
    pub(crate) fn new(width: f64, height: f64, title: &str) -> Self {
        let mut buf = String::new();
        buf.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">",
            w = num(width),
            h = num(height)
        );
        let _ = writeln!(buf, "<title>{}</title>", escape(title));
        let _ = writeln!(
            buf,
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
            num(width),
            num(height)
        );
        Self { buf }
    }

    pub(crate) fn line(&mut self, s: &str) {
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    pub(crate) fn text(
        &mut self,
        x: f64,
        y: f64,
        anchor: &str,
        size: f64,
        extra: &str,
        content: &str,
    ) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-size=\"{}\"{extra}>{}</text>",
            num(x),
            num(y),
            num(size),
            escape(content)
        );
    }

    pub(crate) fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Round tick positions covering `[lo, hi]` at a 1-2-5 step.
pub(crate) fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span.is_finite() && span > 0.0) {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Tick label without trailing zero noise.
pub(crate) fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}
