//! Minimal SVG plot of contour overlays: one group of polylines per scale
//! value, axes with ticks, and a legend. Pure string assembly, no XML
//! dependency.

use morse_lsm::{Contour64, ParamGrid64};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Per-scale stroke colors, cycled when more scales than entries.
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Viewport {
    a_min: f64,
    a_max: f64,
    c_min: f64,
    c_max: f64,
}

impl Viewport {
    /// Affine map from (a, C) to pixel coordinates; C grows upward.
    fn to_px(&self, a: f64, c: f64) -> (f64, f64) {
        let x = MARGIN_LEFT + (a - self.a_min) / (self.a_max - self.a_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
        let y = HEIGHT - MARGIN_BOTTOM
            - (c - self.c_min) / (self.c_max - self.c_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);
        (x, y)
    }
}

fn axis_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Render the contour overlay figure. `groups` pairs each scale value with
/// its contours; ordering is preserved in the output.
pub fn contour_svg(grid: &ParamGrid64, level: f64, groups: &[(f64, Vec<Contour64>)]) -> String {
    let vp = Viewport {
        a_min: grid.a_min,
        a_max: grid.a_max,
        c_min: grid.c_min,
        c_max: grid.c_max,
    };
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <title>Equal transition-dipole level sets, level {level:.6}</title>\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // plot frame
    let (x0, y0) = vp.to_px(grid.a_min, grid.c_min);
    let (x1, y1) = vp.to_px(grid.a_max, grid.c_max);
    out.push_str(&format!(
        "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>\n",
        x0.min(x1),
        y0.min(y1),
        (x1 - x0).abs(),
        (y0 - y1).abs()
    ));

    // axis ticks and labels
    for a in axis_ticks(grid.a_min, grid.a_max, 7) {
        let (x, y) = vp.to_px(a, grid.c_min);
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y + 6.0
        ));
        out.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{a:.2}</text>\n",
            y + 20.0
        ));
    }
    for c in axis_ticks(grid.c_min, grid.c_max, 8) {
        let (x, y) = vp.to_px(grid.a_min, c);
        out.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            x - 6.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{c:.1}</text>\n",
            x - 10.0,
            y + 4.0
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">a</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 15.0
    ));
    out.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">C</text>\n",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    ));

    // one group per scale
    for (k, (s, contours)) in groups.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        out.push_str(&format!("  <g id=\"s-{s}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1.5\">\n"));
        for contour in contours {
            let pts: Vec<String> = contour
                .points
                .iter()
                .map(|&(a, c)| {
                    let (x, y) = vp.to_px(a, c);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            out.push_str(&format!("    <polyline points=\"{}\"/>\n", pts.join(" ")));
        }
        out.push_str("  </g>\n");
    }

    // legend
    let legend_x = WIDTH - MARGIN_RIGHT + 15.0;
    for (k, (s, _)) in groups.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = MARGIN_TOP + 20.0 * k as f64 + 10.0;
        out.push_str(&format!(
            "  <line x1=\"{legend_x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            legend_x + 25.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">s = {s}</text>\n",
            legend_x + 32.0,
            y + 4.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
