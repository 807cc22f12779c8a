//! Static SVG line charts, fixed 800x600 viewBox. Presentation only.

use crate::csvio::fmt_sig9;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Degenerate span: pad symmetrically.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() >= 0.01 && v.abs() < 1e5 {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    } else {
        fmt_sig9(v)
    }
}

/// Renders one chart with shared axes for every series.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (x_lo, x_hi) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    ));

    // Axes box and ticks.
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let xp = sx(xv);
        let yp = sy(yv);
        svg.push_str(&format!(
            "<line x1=\"{xp:.1}\" y1=\"{:.1}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{xp:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 20.0,
            tick_label(xv)
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{MARGIN_LEFT}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 6.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 10.0,
            yp + 4.0,
            tick_label(yv)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{y_label}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.color,
            coords.join(" ")
        ));
        let ly = MARGIN_TOP + 18.0 + 18.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            MARGIN_LEFT + 12.0,
            MARGIN_LEFT + 42.0,
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            MARGIN_LEFT + 48.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines_per_series() {
        let svg = line_chart(
            "t",
            "x",
            "y",
            &[
                Series {
                    label: "up",
                    color: "#1f77b4",
                    points: vec![(0.0, 1.0), (1.0, 2.0)],
                },
                Series {
                    label: "down",
                    color: "#d62728",
                    points: vec![(1.0, 2.5), (0.0, 1.5)],
                },
            ],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn constant_series_does_not_divide_by_zero() {
        let svg = line_chart(
            "t",
            "x",
            "y",
            &[Series {
                label: "flat",
                color: "#1f77b4",
                points: vec![(0.0, 5.0), (1.0, 5.0)],
            }],
        );
        assert!(!svg.contains("NaN"));
    }
}
