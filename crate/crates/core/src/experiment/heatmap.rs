//! Static SVG heatmaps of a surface: site `j` across, time index `ℓ` down.
//!
//! Commutator values use a fixed five-stop sequential scale over `[0, 4]`
//! (`#440154 → #3b528b → #21918c → #5ec962 → #fde725`); difference surfaces use a
//! diverging scale over `[−2, 2]` (`#3b4cc0 → #f7f7f7 → #b40426`). Values outside the
//! range are clamped and empty cells are drawn gray (`#bdbdbd`). The output depends only
//! on the input values, so identical surfaces render to identical bytes.

use std::fmt::Write;

use crate::otoc::{SpreadSurface, Variant};

pub const SEQUENTIAL_STOPS: [[u8; 3]; 5] = [
    [0x44, 0x01, 0x54],
    [0x3b, 0x52, 0x8b],
    [0x21, 0x91, 0x8c],
    [0x5e, 0xc9, 0x62],
    [0xfd, 0xe7, 0x25],
];

pub const DIVERGING_STOPS: [[u8; 3]; 3] =
    [[0x3b, 0x4c, 0xc0], [0xf7, 0xf7, 0xf7], [0xb4, 0x04, 0x26]];

pub const MISSING_COLOR: &str = "#bdbdbd";

const CELL_W: usize = 36;
const CELL_H: usize = 8;
const LEFT: usize = 48;
const TOP: usize = 36;
const BAR_W: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorScale {
    /// Commutator values over `[0, 4]`.
    #[default]
    Sequential,
    /// Differences over `[−2, 2]`.
    Diverging,
}

impl ColorScale {
    pub fn range(self) -> (f64, f64) {
        match self {
            ColorScale::Sequential => (0.0, 4.0),
            ColorScale::Diverging => (-2.0, 2.0),
        }
    }

    fn stops(self) -> &'static [[u8; 3]] {
        match self {
            ColorScale::Sequential => &SEQUENTIAL_STOPS,
            ColorScale::Diverging => &DIVERGING_STOPS,
        }
    }

    /// `#rrggbb` for a value; NaN counts as missing.
    pub fn color(self, value: Option<f64>) -> String {
        let Some(v) = value.filter(|v| !v.is_nan()) else {
            return MISSING_COLOR.to_string();
        };
        let (lo, hi) = self.range();
        let stops = self.stops();
        let x = ((v - lo) / (hi - lo)).clamp(0.0, 1.0) * (stops.len() - 1) as f64;
        let i = (x.floor() as usize).min(stops.len() - 2);
        let f = x - i as f64;
        let mix = |c: usize| {
            let a = stops[i][c] as f64;
            let b = stops[i + 1][c] as f64;
            (a + (b - a) * f).round() as u8
        };
        format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
    }
}

/// Renders one column of the surface.
pub fn render_heatmap(surface: &SpreadSurface, variant: Variant, scale: ColorScale) -> String {
    let rows = surface.ell_max + 1;
    let grid_w = surface.n * CELL_W;
    let grid_h = rows * CELL_H;
    let width = LEFT + grid_w + 24 + BAR_W + 48;
    let height = TOP + grid_h + 40;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="16" font-size="12">{} (n={}, ell_max={})</text>"#,
        variant.column(),
        surface.n,
        surface.ell_max
    );

    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for p in &surface.points {
        let x = LEFT + (p.j - 1) * CELL_W;
        let y = TOP + p.ell * CELL_H;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{}"/>"#,
            scale.color(p.get(variant))
        );
    }
    let _ = writeln!(s, "</g>");

    // axes
    for j in 1..=surface.n {
        let x = LEFT + (j - 1) * CELL_W + CELL_W / 2;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle">{j}</text>"#,
            TOP - 4
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">j</text>"#,
        LEFT + grid_w / 2,
        TOP + grid_h + 16
    );
    let label_step = rows.div_ceil(12).max(1);
    for ell in (0..rows).step_by(label_step) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{ell}</text>"#,
            LEFT - 4,
            TOP + ell * CELL_H + CELL_H
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">ell</text>"#,
        TOP + grid_h / 2,
        TOP + grid_h / 2
    );

    // color bar, high values on top
    let bar_x = LEFT + grid_w + 24;
    let steps = 32;
    let (lo, hi) = scale.range();
    let step_h = grid_h as f64 / steps as f64;
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for k in 0..steps {
        let v = hi - (hi - lo) * (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{bar_x}" y="{:.2}" width="{BAR_W}" height="{:.2}" fill="{}"/>"#,
            TOP as f64 + k as f64 * step_h,
            step_h + 0.01,
            scale.color(Some(v))
        );
    }
    let _ = writeln!(s, "</g>");
    for (v, y) in [(hi, TOP + 8), (lo, TOP + grid_h)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}">{v}</text>"#, bar_x + BAR_W + 4);
    }
    s.push_str("</svg>\n");
    s
}
