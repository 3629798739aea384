//! Static SVG progress plots: median coverage with a min-max band, against
//! iterations (left) and evaluations (right).

use std::fmt::Write;

use super::aggregate::AggregateRow;
use super::SCHEMA_VERSION;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const GAP: f64 = 80.0;
const LEGEND_H: f64 = 24.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// One labelled curve.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub rows: Vec<AggregateRow>,
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Self {
        if hi > lo {
            Self { lo, hi }
        } else {
            Self { lo, hi: lo + 1.0 }
        }
    }

    fn scale(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    fn ticks(&self) -> Vec<f64> {
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step + 1e-9).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

type Pick = fn(&AggregateRow) -> f64;

fn panel(
    svg: &mut String,
    series: &[Series],
    x0: f64,
    title: &str,
    x_label: &str,
    pick_x: Pick,
    y: &Axis,
) {
    let xs = series.iter().flat_map(|s| s.rows.iter().map(pick_x));
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let x = Axis::new(if xmin.is_finite() { xmin } else { 0.0 }, xmax.max(xmin));
    let (left, right) = (x0 + MARGIN_L, x0 + PANEL_W);
    let (top, bottom) = (MARGIN_T, MARGIN_T + PANEL_H);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="15">{title}</text>"#,
        (left + right) / 2.0,
        top - 14.0
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{PANEL_H:.1}" fill="none" stroke="#444"/>"##,
        right - left
    );
    for t in x.ticks() {
        let px = x.scale(t, left, right);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.1}" y1="{bottom:.1}" x2="{px:.1}" y2="{:.1}" stroke="#444"/><text x="{px:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"##,
            bottom + 5.0,
            bottom + 18.0,
            fmt_tick(t)
        );
    }
    for t in y.ticks() {
        let py = y.scale(t, bottom, top);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.1}" y1="{py:.1}" x2="{right:.1}" y2="{py:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"##,
            left - 6.0,
            py + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{x_label}</text>"#,
        (left + right) / 2.0,
        bottom + 38.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 {:.1} {:.1})">hypervolume coverage</text>"#,
        left - 42.0,
        (top + bottom) / 2.0,
        left - 42.0,
        (top + bottom) / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64, f64, f64)> = s
            .rows
            .iter()
            .filter_map(|r| Some((pick_x(r), r.hc_median?, r.hc_min?, r.hc_max?)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let upper = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", x.scale(p.0, left, right), y.scale(p.3, bottom, top)));
        let lower = pts
            .iter()
            .rev()
            .map(|p| format!("{:.2},{:.2}", x.scale(p.0, left, right), y.scale(p.2, bottom, top)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", x.scale(p.0, left, right), y.scale(p.1, bottom, top)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            line.join(" ")
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `series` on shared coverage axes.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let values = series
        .iter()
        .flat_map(|s| s.rows.iter().flat_map(|r| [r.hc_min, r.hc_max]))
        .flatten();
    let (lo, hi) = values.fold((0.0f64, 1.0f64), |(a, b), v| (a.min(v), b.max(v)));
    let y = Axis::new(lo, hi);
    let width = 2.0 * PANEL_W + GAP;
    let height = MARGIN_T + PANEL_H + MARGIN_B + LEGEND_H * series.len().max(1) as f64 + 20.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" data-schema-version="{SCHEMA_VERSION}">"#
    );
    let _ = writeln!(
        svg,
        "<metadata>{{\"schema_version\":{SCHEMA_VERSION},\"title\":\"{}\"}}</metadata>",
        escape(title)
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel(
        &mut svg,
        series,
        0.0,
        &format!("{} by iteration", escape(title)),
        "iteration (wall-clock units)",
        |r| r.iteration as f64,
        &y,
    );
    panel(
        &mut svg,
        series,
        PANEL_W + GAP,
        &format!("{} by evaluation", escape(title)),
        "function evaluations",
        |r| r.evaluations as f64,
        &y,
    );
    let legend_top = MARGIN_T + PANEL_H + MARGIN_B + 10.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = legend_top + i as f64 * LEGEND_H;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}" font-size="12">{} (median, min-max band)</text>"#,
            MARGIN_L,
            MARGIN_L + 30.0,
            MARGIN_L + 38.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(iteration: usize, hc: f64) -> AggregateRow {
        AggregateRow {
            iteration,
            evaluations: 18 + 4 * iteration,
            trials: 3,
            hc_mean: Some(hc),
            hc_median: Some(hc),
            hc_min: Some(hc - 0.1),
            hc_max: Some(hc + 0.1),
            hv_mean: 0.0,
            hv_median: 0.0,
        }
    }

    #[test]
    fn svg_is_versioned_and_complete() {
        let s = Series {
            label: "mopls N=4 <test>".into(),
            rows: (0..10).map(|i| row(i, i as f64 / 10.0)).collect(),
        };
        let svg = render_svg("zdt1-d8", &[s]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("data-schema-version=\"1\""));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&lt;test&gt;"));
    }

    #[test]
    fn ticks_are_round() {
        let labels: Vec<String> = Axis::new(0.0, 1.0).ticks().into_iter().map(fmt_tick).collect();
        assert_eq!(labels, ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
        assert_eq!(Axis::new(18.0, 400.0).ticks().first(), Some(&100.0));
    }
}
