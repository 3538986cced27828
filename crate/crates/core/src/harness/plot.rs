//! Minimal static SVG line charts.
//!
//! Output is a pure function of the input data: coordinates are printed
//! with fixed precision, so rendering the same series twice produces the
//! same bytes.

use std::fmt::Write;

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 40.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points: points
                .into_iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect(),
        }
    }

    /// Drops consecutive duplicate points.
    pub fn dedup(mut self) -> Self {
        self.points.dedup();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Use the same scale on both axes (for paths in the plane).
    pub equal_axes: bool,
}

impl Panel {
    pub fn new(title: &str, x_label: &str, y_label: &str, series: Vec<Series>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series,
            equal_axes: false,
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut it = self.series.iter().flat_map(|s| s.points.iter());
        let Some(&(x0, y0)) = it.next() else {
            return (0.0, 1.0, 0.0, 1.0);
        };
        let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (x0, x0, y0, y0);
        for &(x, y) in it {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
        let pad = |lo: f64, hi: f64| {
            let span = hi - lo;
            if span < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo - 0.05 * span, hi + 0.05 * span)
            }
        };
        let (x_lo, x_hi) = pad(x_lo, x_hi);
        let (y_lo, y_hi) = pad(y_lo, y_hi);
        if self.equal_axes {
            let half = 0.5 * (x_hi - x_lo).max(y_hi - y_lo);
            let (cx, cy) = (0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi));
            (cx - half, cx + half, cy - half, cy + half)
        } else {
            (x_lo, x_hi, y_lo, y_hi)
        }
    }

    fn render(&self, out: &mut String, top: f64) {
        let (x_lo, x_hi, y_lo, y_hi) = self.bounds();
        let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
        let left = MARGIN_L;
        let ptop = top + MARGIN_T;
        let sx = |x: f64| left + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |y: f64| ptop + (y_hi - y) / (y_hi - y_lo) * plot_h;

        let _ = writeln!(
            out,
            r##"<g class="panel"><rect x="{left:.2}" y="{ptop:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
            left + plot_w / 2.0,
            top + 20.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            left + plot_w / 2.0,
            ptop + plot_h + 32.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">{}</text>"#,
            ptop + plot_h / 2.0,
            ptop + plot_h / 2.0,
            escape(&self.y_label)
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x_lo + f * (x_hi - x_lo);
            let yv = y_lo + f * (y_hi - y_lo);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
                sx(xv),
                ptop + plot_h + 14.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                left - 4.0,
                sy(yv) + 3.0,
                tick(yv)
            );
        }

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let label = escape(&s.label);
            if s.points.len() == 1 {
                let (x, y) = s.points[0];
                let _ = writeln!(
                    out,
                    r#"<circle data-series="{label}" data-points="1" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            } else if !s.points.is_empty() {
                let mut pts = String::new();
                for (i, &(x, y)) in s.points.iter().enumerate() {
                    if i > 0 {
                        pts.push(' ');
                    }
                    let _ = write!(pts, "{:.2},{:.2}", sx(x), sy(y));
                }
                let _ = writeln!(
                    out,
                    r#"<polyline data-series="{label}" data-points="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#,
                    s.points.len()
                );
            }
            let ly = ptop + 12.0 + 16.0 * k as f64;
            let lx = left + plot_w + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{label}</text>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0,
                lx + 22.0,
                ly
            );
        }
        out.push_str("</g>\n");
    }
}

/// A stack of panels rendered as one SVG document.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub panels: Vec<Panel>,
}

impl Figure {
    pub fn single(panel: Panel) -> Self {
        Self {
            panels: vec![panel],
        }
    }

    pub fn to_svg(&self) -> String {
        let height = PANEL_H * self.panels.len().max(1) as f64;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif">"#
        );
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        for (i, p) in self.panels.iter().enumerate() {
            p.render(&mut out, i as f64 * PANEL_H);
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
