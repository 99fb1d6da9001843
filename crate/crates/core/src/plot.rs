//! SVG rendering of a fitted density with the probability region shaded.
//!
//! The document opens with a comment recording the data-to-pixel map:
//!
//! ```text
//! <!-- pearsonprob-map x_range=[x_lo,x_hi] y_range=[0,y_max] plot_area=[left,top,width,height] -->
//! px = left + (x − x_lo) / (x_hi − x_lo) · width
//! py = top + height − y / y_max · height
//! ```
//!
//! Elements carry stable ids: `density-curve` (one path), `probability-region`
//! (at most one path) and `probability-value` (one text).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fit::FittedPearson;
use crate::quadrature::{quantile, IntegrationSettings, ProbabilityResult};

const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 64.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Probability mass left out of each infinite tail by the default x-range.
const TAIL_MASS: f64 = 0.0005;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width_px: u32,
    pub height_px: u32,
    /// Abscissa range (deviations from the mean). Defaults to the support,
    /// with each infinite end replaced by the 0.05% / 99.95% point.
    pub x_range: Option<(f64, f64)>,
    /// Number of uniformly spaced curve samples.
    pub samples: usize,
    pub title: Option<String>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            width_px: 800,
            height_px: 500,
            x_range: None,
            samples: 512,
            title: None,
        }
    }
}

impl PlotOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("width_px", self.width_px), ("height_px", self.height_px)] {
            if !(64..=8192).contains(&v) {
                return Err(Error::InvalidOptions(format!(
                    "{name} must lie in 64..=8192, got {v}"
                )));
            }
        }
        if self.samples < 64 {
            return Err(Error::InvalidOptions(format!(
                "samples must be at least 64, got {}",
                self.samples
            )));
        }
        if let Some((lo, hi)) = self.x_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidOptions(format!(
                    "x_range must be a finite interval with lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Affine data-to-pixel map of the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelMap {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_max: f64,
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl PixelMap {
    pub fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x_lo) / (self.x_hi - self.x_lo) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.top + self.height - y / self.y_max * self.height
    }

    /// Parses the map back out of a rendered document's header comment.
    pub fn from_svg(svg: &str) -> Option<PixelMap> {
        let start = svg.find("<!-- pearsonprob-map ")?;
        let rest = &svg[start..];
        let line = &rest[..rest.find("-->")?];
        let field = |key: &str| -> Option<Vec<f64>> {
            let i = line.find(key)? + key.len();
            let tail = &line[i..];
            let body = &tail[..tail.find(']')?];
            body.split(',').map(|t| t.trim().parse().ok()).collect()
        };
        let xr = field("x_range=[")?;
        let yr = field("y_range=[")?;
        let area = field("plot_area=[")?;
        Some(PixelMap {
            x_lo: xr[0],
            x_hi: xr[1],
            y_max: yr[1],
            left: area[0],
            top: area[1],
            width: area[2],
            height: area[3],
        })
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round-number tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    let values = (first..=last).map(|k| k as f64 * step).collect();
    (values, decimals)
}

fn default_x_range(f: &FittedPearson) -> Result<(f64, f64)> {
    let s = IntegrationSettings::default();
    let support = f.support();
    let lo = if support.lo.is_finite() {
        support.lo
    } else {
        quantile(f, TAIL_MASS, &s)?
    };
    let hi = if support.hi.is_finite() {
        support.hi
    } else {
        quantile(f, 1.0 - TAIL_MASS, &s)?
    };
    Ok((lo, hi))
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Renders the density of `f` with `P(X ≤ x0)` shaded and annotated.
pub fn render_density_plot(
    f: &FittedPearson,
    x0: f64,
    result: &ProbabilityResult,
    opts: &PlotOptions,
) -> Result<String> {
    opts.validate()?;
    let (x_lo, x_hi) = match opts.x_range {
        Some(r) => r,
        None => default_x_range(f)?,
    };

    let n = opts.samples;
    let xs: Vec<f64> = (0..n)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let ds: Vec<f64> = xs.iter().map(|&x| f.density(x)).collect();
    let mut finite: Vec<f64> = ds.iter().copied().filter(|d| d.is_finite()).collect();
    finite.sort_by(f64::total_cmp);
    let mut y_max = if finite.is_empty() {
        0.0
    } else {
        1.2 * percentile(&finite, 0.99)
    };
    if y_max.is_nan() || y_max <= 0.0 {
        y_max = 1.0;
    }

    let map = PixelMap {
        x_lo,
        x_hi,
        y_max,
        left: MARGIN_LEFT,
        top: MARGIN_TOP,
        width: opts.width_px as f64 - MARGIN_LEFT - MARGIN_RIGHT,
        height: opts.height_px as f64 - MARGIN_TOP - MARGIN_BOTTOM,
    };
    let clip = |d: f64| if d.is_finite() { d.min(y_max) } else { y_max };

    let mut svg = String::new();
    let (w, h) = (opts.width_px, opts.height_px);
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        "<!-- pearsonprob-map x_range=[{x_lo},{x_hi}] y_range=[0,{y_max}] plot_area=[{},{},{},{}] -->",
        map.left, map.top, map.width, map.height
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    let title = opts
        .title
        .clone()
        .unwrap_or_else(|| format!("Pearson type {} density", f.pearson_type().name()));
    let _ = writeln!(
        svg,
        r#"<text id="title" x="{:.3}" y="22" text-anchor="middle" font-size="16">{}</text>"#,
        w as f64 / 2.0,
        escape(&title)
    );
    if let Some(warning) = &result.domain_warning {
        let _ = writeln!(
            svg,
            r#"<text id="domain-warning" x="{:.3}" y="42" text-anchor="middle" fill="firebrick">{}</text>"#,
            w as f64 / 2.0,
            escape(warning)
        );
    }

    // Shaded region from the left end of the visible support up to x0.
    let support = f.support();
    let region_lo = support.lo.max(x_lo);
    let region_hi = x0.min(x_hi).min(support.hi);
    if result.p > 0.0 && region_hi > region_lo {
        let mut d = String::new();
        let _ = write!(d, "M{:.3},{:.3}", map.px(region_lo), map.py(0.0));
        let _ = write!(
            d,
            " L{:.3},{:.3}",
            map.px(region_lo),
            map.py(clip(f.density(region_lo)))
        );
        for (&x, &dv) in xs.iter().zip(&ds) {
            if x > region_lo && x < region_hi {
                let _ = write!(d, " L{:.3},{:.3}", map.px(x), map.py(clip(dv)));
            }
        }
        let _ = write!(
            d,
            " L{:.3},{:.3} L{:.3},{:.3} Z",
            map.px(region_hi),
            map.py(clip(f.density(region_hi))),
            map.px(region_hi),
            map.py(0.0)
        );
        let _ = writeln!(
            svg,
            r##"<path id="probability-region" d="{d}" fill="#9ecae1" stroke="none"/>"##
        );
    }

    // Axes.
    let base = map.py(0.0);
    let _ = writeln!(
        svg,
        r#"<g id="axes" stroke="black" stroke-width="1"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/></g>"#,
        map.left,
        base,
        map.left + map.width,
        base,
        map.left,
        map.top,
        map.left,
        base
    );
    let mut tick_svg = String::new();
    let (xt, xdec) = ticks(x_lo, x_hi, 8);
    for t in xt {
        let px = map.px(t);
        let _ = write!(
            tick_svg,
            r#"<line x1="{px:.3}" y1="{base:.3}" x2="{px:.3}" y2="{:.3}" stroke="black"/><text x="{px:.3}" y="{:.3}" text-anchor="middle">{t:.xdec$}</text>"#,
            base + 5.0,
            base + 18.0
        );
    }
    let (yt, ydec) = ticks(0.0, y_max, 5);
    for t in yt {
        let py = map.py(t);
        let _ = write!(
            tick_svg,
            r#"<line x1="{:.3}" y1="{py:.3}" x2="{:.3}" y2="{py:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{t:.ydec$}</text>"#,
            map.left - 5.0,
            map.left,
            map.left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(svg, r#"<g id="ticks">{tick_svg}</g>"#);

    let mut curve = String::new();
    for (i, (&x, &dv)) in xs.iter().zip(&ds).enumerate() {
        let cmd = if i == 0 { "M" } else { " L" };
        let _ = write!(curve, "{cmd}{:.3},{:.3}", map.px(x), map.py(clip(dv)));
    }
    let _ = writeln!(
        svg,
        r#"<path id="density-curve" d="{curve}" fill="none" stroke="navy" stroke-width="1.5"/>"#
    );

    if x0 >= x_lo && x0 <= x_hi {
        let px = map.px(x0);
        let _ = writeln!(
            svg,
            r#"<line id="x0-marker" x1="{px:.3}" y1="{:.3}" x2="{px:.3}" y2="{base:.3}" stroke="firebrick" stroke-dasharray="4 3"/>"#,
            map.top
        );
    }

    let _ = writeln!(
        svg,
        r#"<text id="probability-value" x="{:.3}" y="{:.3}" text-anchor="end">P(X ≤ {x0:.4}) = {:.6}</text>"#,
        map.left + map.width,
        map.top + 14.0,
        result.p
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_are_round() {
        let (t, dec) = ticks(-3.0, 3.0, 8);
        assert_eq!(dec, 0);
        assert_eq!(t, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let (t, dec) = ticks(0.0, 0.48, 5);
        assert_eq!(dec, 1);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
    }

    #[test]
    fn option_validation() {
        assert!(PlotOptions::default().validate().is_ok());
        let bad = PlotOptions {
            width_px: 10,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidOptions(_))));
        let bad = PlotOptions {
            samples: 10,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = PlotOptions {
            x_range: Some((1.0, 1.0)),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
