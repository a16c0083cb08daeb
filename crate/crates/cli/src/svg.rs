//! In-process SVG heatmaps and line plots. Output depends only on the data.

use std::fmt::Write;

/// Viridis anchors, interpolated into the 256-step ramp.
const ANCHORS: [(f64, [f64; 3]); 9] = [
    (0.0, [68.0, 1.0, 84.0]),
    (0.125, [71.0, 44.0, 122.0]),
    (0.25, [59.0, 81.0, 139.0]),
    (0.375, [44.0, 113.0, 142.0]),
    (0.5, [33.0, 144.0, 141.0]),
    (0.625, [39.0, 173.0, 129.0]),
    (0.75, [92.0, 200.0, 99.0]),
    (0.875, [170.0, 220.0, 50.0]),
    (1.0, [253.0, 231.0, 37.0]),
];

pub const RAMP_STEPS: usize = 256;

pub fn ramp() -> Vec<[u8; 3]> {
    (0..RAMP_STEPS)
        .map(|i| {
            let t = i as f64 / (RAMP_STEPS - 1) as f64;
            let k = ANCHORS.windows(2).position(|w| t <= w[1].0).unwrap_or(ANCHORS.len() - 2);
            let ((t0, c0), (t1, c1)) = (ANCHORS[k], ANCHORS[k + 1]);
            let s = (t - t0) / (t1 - t0);
            [0, 1, 2].map(|c| (c0[c] + s * (c1[c] - c0[c])).round() as u8)
        })
        .collect()
}

const NAN_FILL: &str = "#bdbdbd";

fn colour(ramp: &[[u8; 3]], v: f64, lo: f64, hi: f64) -> String {
    if !v.is_finite() {
        return NAN_FILL.to_string();
    }
    let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
    let [r, g, b] = ramp[(t * (RAMP_STEPS - 1) as f64).round() as usize];
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// One heatmap panel; `values` is row-major with `ys` outer.
pub struct Heatmap {
    pub title: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

const PANEL: f64 = 320.0;
const MARGIN: f64 = 56.0;

/// Panels side by side on a shared colour scale.
pub fn heatmaps(title: &str, x_label: &str, y_label: &str, panels: &[Heatmap]) -> String {
    let ramp = ramp();
    let (lo, hi) = finite_range(panels.iter().flat_map(|p| p.values.iter().copied())).unwrap_or((0.0, 0.0));
    let width = MARGIN + panels.len() as f64 * (PANEL + MARGIN) + 60.0;
    let height = PANEL + 2.0 * MARGIN + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    for (k, panel) in panels.iter().enumerate() {
        let x0 = MARGIN + k as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        let (nx, ny) = (panel.xs.len().max(1), panel.ys.len().max(1));
        let (cw, ch) = (PANEL / nx as f64, PANEL / ny as f64);
        let _ = writeln!(s, r#"<text x="{x0:.1}" y="{:.1}">{}</text>"#, y0 - 8.0, escape(&panel.title));
        for (iy, _) in panel.ys.iter().enumerate() {
            for (ix, _) in panel.xs.iter().enumerate() {
                let v = panel.values.get(iy * nx + ix).copied().unwrap_or(f64::NAN);
                // y grows upward.
                let y = y0 + PANEL - (iy + 1) as f64 * ch;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    x0 + ix as f64 * cw,
                    cw + 0.05,
                    ch + 0.05,
                    colour(&ramp, v, lo, hi)
                );
            }
        }
        let _ = writeln!(s, r#"<rect x="{x0:.1}" y="{y0:.1}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#);
        axis_labels(&mut s, x0, y0, &panel.xs, &panel.ys, x_label, y_label);
    }
    colour_bar(&mut s, &ramp, width - 50.0, MARGIN, lo, hi);
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    finite_range(v.iter().copied()).unwrap_or((0.0, 1.0))
}

fn axis_labels(s: &mut String, x0: f64, y0: f64, xs: &[f64], ys: &[f64], x_label: &str, y_label: &str) {
    let (xl, xh) = bounds(xs);
    let (yl, yh) = bounds(ys);
    let base = y0 + PANEL;
    let _ = writeln!(s, r#"<text x="{x0:.1}" y="{:.1}">{}</text>"#, base + 16.0, fmt_tick(xl));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, x0 + PANEL, base + 16.0, fmt_tick(xh));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, x0 + PANEL / 2.0, base + 32.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{base:.1}" text-anchor="end">{}</text>"#, x0 - 4.0, fmt_tick(yl));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, x0 - 4.0, y0 + 10.0, fmt_tick(yh));
    let _ = writeln!(
        s,
        r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        x0 - 40.0,
        y0 + PANEL / 2.0,
        escape(y_label)
    );
}

fn colour_bar(s: &mut String, ramp: &[[u8; 3]], x: f64, y0: f64, lo: f64, hi: f64) {
    let step = PANEL / RAMP_STEPS as f64;
    for (i, [r, g, b]) in ramp.iter().enumerate() {
        let y = y0 + PANEL - (i + 1) as f64 * step;
        let _ = writeln!(s, r##"<rect x="{x:.1}" y="{y:.3}" width="14" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##, step + 0.05);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">max {}</text>"#, x - 10.0, y0 - 6.0, fmt_tick(hi));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">min {}</text>"#, x - 10.0, y0 + PANEL + 16.0, fmt_tick(lo));
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const LINE_COLOURS: [&str; 6] = ["#440154", "#3b528b", "#21908d", "#5dc963", "#e0a800", "#b5367a"];

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (560.0, 360.0);
    let (left, top) = (70.0, 40.0);
    let (pw, ph) = (w - left - 150.0, h - top - 50.0);
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (xl, xh) = finite_range(all().map(|p| p.0)).unwrap_or((0.0, 1.0));
    let (yl, yh) = finite_range(all().map(|p| p.1)).unwrap_or((0.0, 1.0));
    let sx = |x: f64| left + if xh > xl { (x - xl) / (xh - xl) * pw } else { pw / 2.0 };
    let sy = |y: f64| top + ph - if yh > yl { (y - yl) / (yh - yl) * ph } else { ph / 2.0 };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for (k, line) in series.iter().enumerate() {
        let colour = LINE_COLOURS[k % LINE_COLOURS.len()];
        // Non-finite values break the line.
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in &line.points {
            if x.is_finite() && y.is_finite() {
                let _ = write!(d, "{}{:.3},{:.3} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, d.trim_end());
        let ly = top + 14.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#, left + pw + 10.0, left + pw + 30.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, left + pw + 34.0, ly + 4.0, escape(&line.label));
    }
    let _ = writeln!(s, r#"<text x="{left}" y="{:.1}">{}</text>"#, top + ph + 16.0, fmt_tick(xl));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left + pw, top + ph + 16.0, fmt_tick(xh));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw / 2.0, top + ph + 36.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">max {}</text>"#, left - 4.0, top + 10.0, fmt_tick(yh));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">min {}</text>"#, left - 4.0, top + ph, fmt_tick(yl));
    let _ = writeln!(
        s,
        r#"<text transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        top + ph / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints() {
        let r = ramp();
        assert_eq!(r.len(), 256);
        assert_eq!(r[0], [68, 1, 84]);
        assert_eq!(r[255], [253, 231, 37]);
    }

    #[test]
    fn heatmap_is_pure() {
        let panel = || Heatmap { title: "j = 10".into(), xs: vec![0.0, 1.0], ys: vec![0.0, 1.0], values: vec![0.0, 1.0, f64::NAN, 0.5] };
        let a = heatmaps("t", "x", "y", &[panel()]);
        assert_eq!(a, heatmaps("t", "x", "y", &[panel()]));
        assert!(a.contains(NAN_FILL));
        assert!(a.contains("max 1.0000") && a.contains("min 0.0000"));
        // Background, four cells, frame, colour bar.
        assert_eq!(a.matches("<rect").count(), 1 + 4 + 1 + RAMP_STEPS);
    }

    #[test]
    fn line_plot_breaks_at_nan() {
        let s = Series { label: "a&b".into(), points: vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)] };
        let svg = line_plot("t", "x", "y", &[s]);
        assert_eq!(svg.matches('M').count(), 2);
        assert!(svg.contains("a&amp;b"));
    }
}
