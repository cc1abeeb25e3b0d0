use std::fmt::Write as _;

use super::color::DivergingScale;
use super::{escape, nice_ticks, num, tick_label, RenderError, Svg};
use crate::analysis::IndicatorRow;

/// A per-row quantity that can be placed on an axis or drive bubbles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlotVariable {
    Docs,
    Cites,
    Rsi,
    Rci,
}

impl PlotVariable {
    pub fn value(self, row: &IndicatorRow) -> Option<f64> {
        match self {
            PlotVariable::Docs => Some(row.focal_docs as f64),
            PlotVariable::Cites => Some(row.focal_cites as f64),
            PlotVariable::Rsi => Some(row.rsi.value()),
            PlotVariable::Rci => row.rci.map(|r| r.value()),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PlotVariable::Docs => "Documents",
            PlotVariable::Cites => "Citations",
            PlotVariable::Rsi => "Relative Specialization Index (RSI)",
            PlotVariable::Rci => "Relative Citation Impact (RCI)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLine {
    /// Vertical line at a constant x.
    X(f64),
    /// Horizontal line at a constant y.
    Y(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSpec {
    pub x_axis: PlotVariable,
    pub y_axis: PlotVariable,
    pub bubble_encoding: Option<PlotVariable>,
    pub reference_lines: Vec<ReferenceLine>,
    pub label_top_k: usize,
    pub title: String,
    pub width: f64,
    pub height: f64,
    pub scale: DivergingScale,
}

impl ScatterSpec {
    pub fn new(x_axis: PlotVariable, y_axis: PlotVariable) -> Self {
        Self {
            x_axis,
            y_axis,
            bubble_encoding: None,
            reference_lines: Vec::new(),
            label_top_k: 0,
            title: format!("{} vs. {}", x_axis.label(), y_axis.label()),
            width: 800.0,
            height: 600.0,
            scale: DivergingScale::default(),
        }
    }

    /// Citations on x, documents on y, bubbles sized and colored by RSI.
    pub fn output_vs_cites() -> Self {
        Self {
            bubble_encoding: Some(PlotVariable::Rsi),
            label_top_k: 7,
            title: "Output vs. cites".to_owned(),
            ..Self::new(PlotVariable::Cites, PlotVariable::Docs)
        }
    }

    /// RSI on x, RCI on y, split by the RSI = 0 and RCI = 1 reference lines.
    pub fn rsi_vs_rci() -> Self {
        Self {
            reference_lines: vec![ReferenceLine::X(0.0), ReferenceLine::Y(1.0)],
            label_top_k: 10,
            title: "Relative Specialization Index (RSI) vs. Relative Citation Impact (RCI)"
                .to_owned(),
            ..Self::new(PlotVariable::Rsi, PlotVariable::Rci)
        }
    }

    fn validate(&self) -> Result<(), RenderError> {
        if self.x_axis == self.y_axis {
            return Err(RenderError::InvalidSpec(
                "x and y axes must differ".to_owned(),
            ));
        }
        if !(self.width > 200.0 && self.height > 200.0) {
            return Err(RenderError::InvalidSpec(
                "canvas must be larger than 200x200".to_owned(),
            ));
        }
        let finite = self.reference_lines.iter().all(|l| match l {
            ReferenceLine::X(v) | ReferenceLine::Y(v) => v.is_finite(),
        });
        if !finite {
            return Err(RenderError::InvalidSpec(
                "reference lines must be finite".to_owned(),
            ));
        }
        Ok(())
    }
}

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const POINT_RADIUS: f64 = 4.0;
const MIN_BUBBLE: f64 = 3.0;
const MAX_BUBBLE: f64 = 16.0;
const LABEL_OFFSET: f64 = 6.0;

/// Linear map from a padded data range onto a pixel range.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let span = hi - lo;
        let pad = if span > 0.0 {
            0.05 * span
        } else if lo != 0.0 {
            0.05 * lo.abs()
        } else {
            1.0
        };
        Self {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn unit(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

struct Point<'a> {
    row: &'a IndicatorRow,
    x: f64,
    y: f64,
    bubble: Option<f64>,
}

/// One `circle.point` per row with values on both axes, in row order.
pub fn render_scatter(rows: &[IndicatorRow], spec: &ScatterSpec) -> Result<String, RenderError> {
    spec.validate()?;
    let points: Vec<Point<'_>> = rows
        .iter()
        .filter_map(|row| {
            let x = spec.x_axis.value(row)?;
            let y = spec.y_axis.value(row)?;
            let bubble = match spec.bubble_encoding {
                Some(var) => Some(var.value(row)?),
                None => None,
            };
            (x.is_finite() && y.is_finite()).then_some(Point { row, x, y, bubble })
        })
        .collect();
    if points.is_empty() {
        return Err(RenderError::EmptyInput);
    }

    let plot_left = MARGIN_LEFT;
    let plot_right = spec.width - MARGIN_RIGHT;
    let plot_top = MARGIN_TOP;
    let plot_bottom = spec.height - MARGIN_BOTTOM;

    let ref_x = spec.reference_lines.iter().filter_map(|l| match l {
        ReferenceLine::X(v) => Some(*v),
        ReferenceLine::Y(_) => None,
    });
    let ref_y = spec.reference_lines.iter().filter_map(|l| match l {
        ReferenceLine::Y(v) => Some(*v),
        ReferenceLine::X(_) => None,
    });
    let xa = Axis::fit(
        points.iter().map(|p| p.x).chain(ref_x),
        plot_left,
        plot_right,
    );
    let ya = Axis::fit(
        points.iter().map(|p| p.y).chain(ref_y),
        plot_bottom,
        plot_top,
    );

    let mut svg = Svg::new(spec.width, spec.height, &spec.title);
    svg.text(
        spec.width / 2.0,
        28.0,
        "middle",
        16.0,
        " font-weight=\"bold\"",
        &spec.title,
    );
    svg.line(&format!(
        "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>",
        num(plot_left),
        num(plot_top),
        num(plot_right - plot_left),
        num(plot_bottom - plot_top)
    ));

    svg.line("<g class=\"grid-x\" stroke=\"#e0e0e0\" stroke-width=\"0.5\">");
    for t in nice_ticks(xa.lo, xa.hi, 8) {
        let px = xa.px(t);
        svg.line(&format!(
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\"/>",
            num(plot_top),
            num(plot_bottom),
            x = num(px)
        ));
        svg.text(
            px,
            plot_bottom + 16.0,
            "middle",
            11.0,
            " stroke=\"none\" fill=\"#333333\"",
            &tick_label(t),
        );
    }
    svg.line("</g>");
    svg.line("<g class=\"grid-y\" stroke=\"#e0e0e0\" stroke-width=\"0.5\">");
    for t in nice_ticks(ya.lo, ya.hi, 8) {
        let py = ya.px(t);
        svg.line(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\"/>",
            num(plot_left),
            num(plot_right),
            y = num(py)
        ));
        svg.text(
            plot_left - 6.0,
            py + 4.0,
            "end",
            11.0,
            " stroke=\"none\" fill=\"#333333\"",
            &tick_label(t),
        );
    }
    svg.line("</g>");

    for line in &spec.reference_lines {
        let (x1, y1, x2, y2) = match *line {
            ReferenceLine::X(v) => (xa.px(v), plot_top, xa.px(v), plot_bottom),
            ReferenceLine::Y(v) => (plot_left, ya.px(v), plot_right, ya.px(v)),
        };
        svg.line(&format!(
            "<line class=\"refline\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#555555\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        ));
    }

    let bubble_range = spec.bubble_encoding.map(|_| {
        let (lo, hi) = points
            .iter()
            .filter_map(|p| p.bubble)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        (lo, hi)
    });
    let style = |p: &Point<'_>| -> (f64, String) {
        match (p.bubble, bubble_range, spec.bubble_encoding) {
            (Some(v), Some((lo, hi)), Some(var)) => {
                // Area, not radius, tracks the distance from the minimum.
                let frac = if hi > lo {
                    ((v - lo) / (hi - lo)).sqrt()
                } else {
                    0.5
                };
                let radius = MIN_BUBBLE + (MAX_BUBBLE - MIN_BUBBLE) * frac;
                let scale_value = if var == PlotVariable::Rsi {
                    v
                } else if hi > lo {
                    2.0 * (v - lo) / (hi - lo) - 1.0
                } else {
                    0.0
                };
                (radius, spec.scale.color(scale_value).hex())
            }
            _ => (POINT_RADIUS, "#3b6ea5".to_owned()),
        }
    };

    svg.line("<g class=\"points\" stroke=\"#333333\" stroke-width=\"0.5\" fill-opacity=\"0.85\">");
    let mut placed = Vec::with_capacity(points.len());
    for p in &points {
        let (r, fill) = style(p);
        let (cx, cy) = (xa.px(p.x), ya.px(p.y));
        let mut tip = format!(
            "{} ({}): {}={}, {}={}",
            p.row.name,
            p.row.nuts,
            short(spec.x_axis),
            tick_label(p.x),
            short(spec.y_axis),
            tick_label(p.y)
        );
        if let (Some(v), Some(var)) = (p.bubble, spec.bubble_encoding) {
            let _ = write!(tip, ", {}={}", short(var), tick_label(v));
        }
        svg.line(&format!(
            "<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"><title>{}</title></circle>",
            num(cx),
            num(cy),
            num(r),
            escape(&tip)
        ));
        placed.push((cx, cy, r));
    }
    svg.line("</g>");

    if spec.label_top_k > 0 {
        let n = points.len() as f64;
        let (mx, my) = points.iter().fold((0.0, 0.0), |(sx, sy), p| {
            (sx + xa.unit(p.x), sy + ya.unit(p.y))
        });
        let (mx, my) = (mx / n, my / n);
        let mut order: Vec<(usize, f64)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (xa.unit(p.x) - mx).hypot(ya.unit(p.y) - my)))
            .collect();
        order.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| points[a.0].row.nuts.cmp(&points[b.0].row.nuts))
                .then_with(|| a.0.cmp(&b.0))
        });
        let (cx0, cy0) = (
            xa.px(xa.lo + mx * (xa.hi - xa.lo)),
            ya.px(ya.lo + my * (ya.hi - ya.lo)),
        );
        svg.line("<g class=\"labels\" fill=\"#111111\">");
        for &(i, _) in order.iter().take(spec.label_top_k) {
            let (px, py, r) = placed[i];
            let (dx, dy) = (px - cx0, py - cy0);
            let len = dx.hypot(dy);
            let (ux, uy) = if len > 0.0 {
                (dx / len, dy / len)
            } else {
                (1.0, 0.0)
            };
            let off = r + LABEL_OFFSET;
            let anchor = if ux >= 0.0 { "start" } else { "end" };
            svg.text(
                px + ux * off,
                py + uy * off + 4.0,
                anchor,
                11.0,
                " class=\"label\"",
                &points[i].row.name,
            );
        }
        svg.line("</g>");
    }

    svg.text(
        (plot_left + plot_right) / 2.0,
        spec.height - 18.0,
        "middle",
        13.0,
        " class=\"axis-title\"",
        spec.x_axis.label(),
    );
    svg.line(&format!(
        "<text class=\"axis-title\" x=\"0\" y=\"0\" text-anchor=\"middle\" font-size=\"13.00\" transform=\"translate({} {}) rotate(-90)\">{}</text>",
        num(22.0),
        num((plot_top + plot_bottom) / 2.0),
        escape(spec.y_axis.label())
    ));
    if let Some(var) = spec.bubble_encoding {
        svg.text(
            plot_right,
            plot_top - 8.0,
            "end",
            11.0,
            " class=\"legend\"",
            &format!("circle size and color: {}", short(var)),
        );
    }
    Ok(svg.finish())
}

fn short(var: PlotVariable) -> &'static str {
    match var {
        PlotVariable::Docs => "docs",
        PlotVariable::Cites => "cites",
        PlotVariable::Rsi => "RSI",
        PlotVariable::Rci => "RCI",
    }
}
