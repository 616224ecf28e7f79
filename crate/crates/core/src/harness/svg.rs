//! Minimal hand-written SVG charts. Coordinates are printed with fixed
//! precision so output bytes depend only on the input.

use std::fmt::Write as _;

use super::{ContinuityReport, HarnessError};
use crate::channels::budget;
use crate::induced::ReturnTimeCensus;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * (v / self.x_max)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v / self.y_max)
    }

    fn open(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
            WIDTH / 2.0
        );
        let (x0, y0, x1, y1) = (self.x(0.0), self.y(0.0), self.x(self.x_max), self.y(self.y_max));
        let _ = writeln!(
            out,
            r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let fx = self.x_max * k as f64 / 4.0;
            let fy = self.y_max * k as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                self.x(fx),
                y0 + 18.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                self.y(fy) + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 14.0
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0
        );
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 10.0 {
        format!("{v:.0}")
    } else if v.abs() >= 0.1 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

fn polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
    }
    d
}

/// `|Δh|` against the rate, one marker per row, with the budget curve.
pub fn continuity_svg(report: &ContinuityReport) -> Result<String, HarnessError> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let unit = report.unit;
    let l = report.alphabet_size.max(2);
    let eps_max = report.rows.iter().map(|r| r.eps).fold(0.0, f64::max);
    let x_max = if eps_max > 0.0 { eps_max * 1.1 } else { 1.0 };
    let curve: Vec<(f64, f64)> = (1..=64)
        .map(|k| {
            let e = x_max * k as f64 / 64.0;
            (e, unit.convert(budget(e.min(0.999), l).unwrap_or(0.0)))
        })
        .collect();
    let data_max = report.rows.iter().map(|r| unit.convert(r.delta_h)).fold(0.0, f64::max);
    let budget_at_max = unit.convert(budget(eps_max.clamp(1e-9, 0.999), l).unwrap_or(0.0));
    let mut y_max = data_max.max(budget_at_max) * 1.1;
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let frame = Frame { x_max, y_max };
    let mut out = String::new();
    frame.open(
        &mut out,
        "entropy change under perturbation",
        "rate eps",
        &format!("|delta h| ({})", unit.name()),
    );
    let clipped = curve
        .iter()
        .filter(|&&(_, b)| b <= y_max)
        .map(|&(e, b)| (frame.x(e), frame.y(b)));
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="none" stroke="#c0392b" stroke-dasharray="6 4"/>"##,
        polyline(clipped)
    );
    for r in &report.rows {
        let fill = if r.hard_pass { "#2c7fb8" } else { "#e31a1c" };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{fill}"/>"#,
            frame.x(r.eps),
            frame.y(unit.convert(r.delta_h))
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Histogram of return-time masses with the geometric law of the same mean.
pub fn return_time_svg(census: &ReturnTimeCensus, max_bars: usize) -> Result<String, HarnessError> {
    if census.is_empty() || max_bars == 0 {
        return Err(HarnessError::EmptyReport);
    }
    let p = 1.0 / census.mean();
    let bars = census.max_return().min(max_bars);
    let geometric = |r: usize| p * (1.0 - p).powi(r as i32 - 1);
    let y_max = (1..=bars)
        .map(|r| census.mass(r).max(geometric(r)))
        .fold(0.0, f64::max)
        * 1.1;
    let frame = Frame {
        x_max: bars as f64 + 1.0,
        y_max: if y_max > 0.0 { y_max } else { 1.0 },
    };
    let mut out = String::new();
    frame.open(&mut out, "return times", "return time", "mass");
    let bar_w = (frame.x(1.0) - frame.x(0.0)) * 0.8;
    for r in 1..=bars {
        let m = census.mass(r);
        if m > 0.0 {
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{bar_w:.2}" height="{:.2}" fill="#7fa7c9"/>"##,
                frame.x(r as f64) - bar_w / 2.0,
                frame.y(m),
                frame.y(0.0) - frame.y(m)
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="none" stroke="#c0392b"/>"##,
        polyline((1..=bars).map(|r| (frame.x(r as f64), frame.y(geometric(r)))))
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{ContinuityRow, Unit};
    use crate::rng::Seed;

    fn row(eps: f64, delta_h: f64) -> ContinuityRow {
        ContinuityRow {
            eps,
            seed: Seed(1),
            metric: "dbar",
            distance: eps,
            h_x: 0.5,
            h_y: 0.5 + delta_h,
            delta_h,
            budget: 1.0,
            hard_pass: true,
            soft_pass: true,
        }
    }

    fn report(rows: Vec<ContinuityRow>) -> ContinuityReport {
        ContinuityReport {
            unit: Unit::Nats,
            alphabet_size: 2,
            rows,
            warnings: vec![],
        }
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(matches!(continuity_svg(&report(vec![])), Err(HarnessError::EmptyReport)));
        assert!(return_time_svg(&ReturnTimeCensus::default(), 10).is_err());
    }

    #[test]
    fn single_point_has_one_marker() {
        let svg = continuity_svg(&report(vec![row(0.05, 0.1)])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg, continuity_svg(&report(vec![row(0.05, 0.1)])).unwrap());
    }

    #[test]
    fn histogram_bars() {
        let census = ReturnTimeCensus::from_times(&[1, 1, 2, 3, 1, 2]);
        let svg = return_time_svg(&census, 10).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 3);
    }
}
