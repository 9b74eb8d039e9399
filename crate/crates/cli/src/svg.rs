//! Minimal static SVG charts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use tarclust_core::pipeline::ClusterReport;
use tarclust_core::simlab::{ScenarioResult, ScenarioSummary};

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f",
    "#bab0ac",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.x.1 - self.x.0).max(1e-12);
        self.left + (x - self.x.0) / span * (self.width - self.left - self.right)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y.1 - self.y.0).max(1e-12);
        self.height - self.bottom - (y - self.y.0) / span * (self.height - self.top - self.bottom)
    }

    fn open(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (w, h) = (self.width, self.height);
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
        writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title)).unwrap();
        let (x0, x1, y0, y1) = (self.left, w - self.right, self.top, h - self.bottom);
        writeln!(out, r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#).unwrap();
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, h - 8.0, escape(xlabel)).unwrap();
        writeln!(
            out,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(ylabel)
        )
        .unwrap();
    }

    fn y_ticks(&self, out: &mut String, n: usize) {
        for i in 0..=n {
            let v = self.y.0 + (self.y.1 - self.y.0) * i as f64 / n as f64;
            let y = self.py(v);
            writeln!(
                out,
                r##"<line x1="{}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{v:.2}</text>"##,
                self.left,
                self.width - self.right,
                self.left - 4.0,
                y + 4.0
            )
            .unwrap();
        }
    }

    fn x_ticks(&self, out: &mut String, xs: impl Iterator<Item = usize>) {
        let base = self.height - self.bottom;
        for c in xs {
            writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{c}</text>"#, self.px(c as f64), base + 16.0).unwrap();
        }
    }
}

fn y_range<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo.is_finite() {
        let lo = lo.min(0.0);
        (lo, hi.max(lo + 0.1))
    } else {
        (0.0, 1.0)
    }
}

/// Average silhouette against `c`, one line per window; the chosen `c` is circled.
pub fn silhouette_curves(report: &ClusterReport) -> String {
    let curves: Vec<(&str, &BTreeMap<usize, f64>, usize)> = report
        .windows
        .iter()
        .filter_map(|w| w.clustering.as_ref().map(|c| (w.name.as_str(), &c.silhouette_by_c, c.c)))
        .collect();
    let cs: Vec<usize> = curves.iter().flat_map(|(_, m, _)| m.keys().copied()).collect();
    let (cmin, cmax) = (cs.iter().min().copied().unwrap_or(2), cs.iter().max().copied().unwrap_or(3));
    let frame = Frame {
        width: 640.0,
        height: 400.0,
        left: 60.0,
        right: 130.0,
        top: 36.0,
        bottom: 44.0,
        x: (cmin as f64, cmax.max(cmin + 1) as f64),
        y: y_range(curves.iter().flat_map(|(_, m, _)| m.values())),
    };
    let mut out = String::new();
    frame.open(&mut out, "Average silhouette by cluster count", "clusters (c)", "average silhouette");
    frame.y_ticks(&mut out, 5);
    frame.x_ticks(&mut out, cmin..=cmax);
    for (i, (name, curve, chosen)) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = curve
            .iter()
            .map(|(&c, &s)| format!("{:.1},{:.1}", frame.px(c as f64), frame.py(s)))
            .collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#, pts.join(" ")).unwrap();
        if let Some(s) = curve.get(chosen) {
            writeln!(
                out,
                r#"<circle cx="{:.1}" cy="{:.1}" r="5" fill="none" stroke="{colour}" stroke-width="2"/>"#,
                frame.px(*chosen as f64),
                frame.py(*s)
            )
            .unwrap();
        }
        let ly = frame.top + 16.0 * i as f64;
        let lx = frame.width - frame.right + 12.0;
        writeln!(
            out,
            r#"<rect x="{lx}" y="{}" width="12" height="12" fill="{colour}"/><text x="{}" y="{}">{} (c={chosen})</text>"#,
            ly,
            lx + 16.0,
            ly + 10.0,
            escape(name)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Membership timeline: one row per series, one column per window, cells
/// coloured by cluster id; series not clustered in a window are grey.
pub fn membership_timeline(report: &ClusterReport) -> String {
    let cell_w = 90.0;
    let cell_h = 22.0;
    let left = 130.0;
    let top = 60.0;
    let width = left + cell_w * report.windows.len() as f64 + 20.0;
    let height = top + cell_h * report.labels.len() as f64 + 20.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">Cluster membership by window</text>"#, width / 2.0).unwrap();
    for (j, w) in report.windows.iter().enumerate() {
        let x = left + cell_w * j as f64;
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, x + cell_w / 2.0, top - 10.0, escape(&w.name)).unwrap();
    }
    for (i, label) in report.labels.iter().enumerate() {
        let y = top + cell_h * i as f64;
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 8.0, y + cell_h / 2.0 + 4.0, escape(label)).unwrap();
        for (j, w) in report.windows.iter().enumerate() {
            let x = left + cell_w * j as f64;
            let (fill, text) = match w.membership.get(label) {
                Some(&c) => (PALETTE[c % PALETTE.len()], c.to_string()),
                None => ("#eeeeee", "-".to_string()),
            };
            writeln!(
                out,
                r#"<rect x="{x}" y="{y}" width="{}" height="{}" fill="{fill}" stroke="white"/><text x="{}" y="{}" text-anchor="middle">{text}</text>"#,
                cell_w,
                cell_h,
                x + cell_w / 2.0,
                y + cell_h / 2.0 + 4.0
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Box plots of the average silhouette across replicates for every `c`.
pub fn silhouette_boxes(summary: &ScenarioSummary) -> String {
    let stats = &summary.silhouette_by_c;
    let cmin = stats.keys().next().copied().unwrap_or(2);
    let cmax = stats.keys().last().copied().unwrap_or(3);
    let frame = Frame {
        width: 640.0,
        height: 400.0,
        left: 60.0,
        right: 20.0,
        top: 36.0,
        bottom: 44.0,
        x: (cmin as f64 - 0.5, cmax as f64 + 0.5),
        y: y_range(stats.values().flat_map(|s| [&s.min, &s.max])),
    };
    let mut out = String::new();
    frame.open(&mut out, "Average silhouette across replicates", "clusters (c)", "average silhouette");
    frame.y_ticks(&mut out, 5);
    frame.x_ticks(&mut out, cmin..=cmax);
    let half = 0.3 * (frame.px(1.0) - frame.px(0.0));
    for (&c, s) in stats {
        let x = frame.px(c as f64);
        let colour = if c == summary.mechanisms { PALETTE[2] } else { PALETTE[0] };
        writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{colour}"/><rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{colour}" fill-opacity="0.3" stroke="{colour}"/><line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-width="2"/>"#,
            frame.py(s.min),
            frame.py(s.max),
            x - half,
            frame.py(s.q3),
            2.0 * half,
            (frame.py(s.q1) - frame.py(s.q3)).max(0.5),
            x - half,
            frame.py(s.median),
            x + half,
            frame.py(s.median)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Exact grouping percentage per replicate.
pub fn grouping_bars(results: &[ScenarioResult]) -> String {
    let n = results.len().max(1);
    let frame = Frame {
        width: (80.0 + 18.0 * n as f64).max(360.0),
        height: 320.0,
        left: 50.0,
        right: 20.0,
        top: 36.0,
        bottom: 44.0,
        x: (0.0, n as f64),
        y: (0.0, 100.0),
    };
    let mut out = String::new();
    frame.open(&mut out, "Exact grouping per replicate", "replicate", "exact grouping (%)");
    frame.y_ticks(&mut out, 5);
    let w = frame.px(1.0) - frame.px(0.0);
    for (i, r) in results.iter().enumerate() {
        let Some(pct) = r.exact_grouping_pct else { continue };
        let colour = if r.chosen_c == Some(r.true_labels.iter().max().map_or(0, |m| m + 1)) {
            PALETTE[0]
        } else {
            PALETTE[1]
        };
        writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{colour}"/>"#,
            frame.px(i as f64) + 0.1 * w,
            frame.py(pct),
            0.8 * w,
            frame.py(0.0) - frame.py(pct)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
