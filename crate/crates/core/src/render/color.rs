//! Continuous diverging color scale for RSI values.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    pub fn parse_hex(s: &str) -> Option<Self> {
        let s = s.strip_prefix('#')?;
        if s.len() != 6 {
            return None;
        }
        let channel = |i: usize| u8::from_str_radix(&s[i..i + 2], 16).ok();
        Some(Rgb(channel(0)?, channel(2)?, channel(4)?))
    }

    /// WCAG relative luminance in `[0, 1]`.
    pub fn relative_luminance(self) -> f64 {
        fn linear(c: u8) -> f64 {
            let c = f64::from(c) / 255.0;
            if c <= 0.04045 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            }
        }
        0.2126 * linear(self.0) + 0.7152 * linear(self.1) + 0.0722 * linear(self.2)
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

/// Piecewise-linear scale over `[-1, 1]` with its midpoint at 0.
///
/// Stops must have every channel non-increasing from the low end to the high
/// end. Rounding is monotone per channel and luminance is increasing in each
/// channel, so a higher value never yields a lighter color even after
/// quantization to 8 bits.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergingScale {
    stops: Vec<(f64, [f64; 3])>,
}

impl Default for DivergingScale {
    /// Pale blue through light grey at 0 to dark red.
    fn default() -> Self {
        Self::new(vec![
            (-1.0, Rgb(222, 235, 247)),
            (0.0, Rgb(222, 222, 222)),
            (0.5, Rgb(214, 96, 77)),
            (1.0, Rgb(103, 0, 31)),
        ])
        .expect("default stops are ordered and darkening")
    }
}

impl DivergingScale {
    /// `stops` must start at -1, end at 1, include 0, be strictly increasing
    /// in position and non-increasing in every channel.
    pub fn new(stops: Vec<(f64, Rgb)>) -> Option<Self> {
        let ok_ends =
            stops.first().map(|s| s.0) == Some(-1.0) && stops.last().map(|s| s.0) == Some(1.0);
        let has_mid = stops.iter().any(|s| s.0 == 0.0);
        let ordered = stops.windows(2).all(|w| {
            let (a, b) = (w[0].1, w[1].1);
            w[0].0 < w[1].0 && a.0 >= b.0 && a.1 >= b.1 && a.2 >= b.2
        });
        (ok_ends && has_mid && ordered).then(|| Self {
            stops: stops
                .into_iter()
                .map(|(p, c)| (p, [f64::from(c.0), f64::from(c.1), f64::from(c.2)]))
                .collect(),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// Color for `value`, clamped into the domain. NaN maps to the midpoint.
    pub fn color(&self, value: f64) -> Rgb {
        let v = if value.is_nan() {
            0.0
        } else {
            value.clamp(-1.0, 1.0)
        };
        let upper = self
            .stops
            .iter()
            .position(|s| s.0 >= v)
            .unwrap_or(self.stops.len() - 1)
            .max(1);
        let (p0, c0) = self.stops[upper - 1];
        let (p1, c1) = self.stops[upper];
        let t = ((v - p0) / (p1 - p0)).clamp(0.0, 1.0);
        let mix = |i: usize| (c0[i] + (c1[i] - c0[i]) * t).round().clamp(0.0, 255.0) as u8;
        Rgb(mix(0), mix(1), mix(2))
    }
}
