//! Minimal SVG line plots of a [`CurveTable`]: first column on the x axis,
//! every other column as a polyline. No computation beyond scaling.

use std::fmt::Write;

use crate::table::CurveTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_Y: f64 = 40.0;

const PALETTE: [&str; 8] = [
    "#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    if !(raw > 0.0 && raw.is_finite()) {
        return vec![lo];
    }
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| (k as f64 * step * 1e9).round() / 1e9)
        .collect()
}

/// Render `table` as a standalone SVG document.
pub fn render(table: &CurveTable, title: &str) -> String {
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let (x_lo, x_hi) = (
        xs.first().copied().unwrap_or(0.0),
        xs.last().copied().unwrap_or(1.0),
    );
    let y_hi = table
        .rows
        .iter()
        .flat_map(|r| r[1..].iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let y_lo = table
        .rows
        .iter()
        .flat_map(|r| r[1..].iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min);
    let y_hi = if y_hi > y_lo { y_hi * 1.05 } else { y_lo + 1.0 };
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / x_span * plot_w;
    let sy = |y: f64| MARGIN_Y + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{:.1},{:.1} V{:.1} H{:.1}" stroke="black" fill="none"/>"#,
        MARGIN_LEFT,
        MARGIN_Y,
        MARGIN_Y + plot_h,
        MARGIN_LEFT + plot_w
    );
    for t in ticks(x_lo, x_hi, 8) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            MARGIN_Y + plot_h,
            MARGIN_Y + plot_h + 5.0,
            MARGIN_Y + plot_h + 18.0,
            t
        );
    }
    for t in ticks(y_lo, y_hi, 6) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            t
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 6.0,
        escape(&table.column_names[0])
    );

    for (k, name) in table.column_names.iter().enumerate().skip(1) {
        let color = PALETTE[(k - 1) % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for row in &table.rows {
            let v = row[k];
            if !v.is_finite() {
                pen_down = false;
                continue;
            }
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if pen_down { "L" } else { "M" },
                sx(row[0]),
                sy(v)
            );
            pen_down = true;
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#,
            d.trim_end()
        );
        let ly = MARGIN_Y + 10.0 + 18.0 * (k - 1) as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
