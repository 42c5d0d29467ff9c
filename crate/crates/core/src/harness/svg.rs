//! Minimal standalone SVG renderings of sweeps and heat maps.

use std::fmt::Write;

use super::{HeatGrid, SweepPair};

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

fn open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

/// Median error against M on a log scale, one panel per sparsity stacked vertically.
pub fn sweep_svg(pairs: &[SweepPair], threshold: f64) -> String {
    let mut out = String::new();
    open(&mut out, W, H * pairs.len().max(1) as f64);
    for (k, pair) in pairs.iter().enumerate() {
        let top = k as f64 * H;
        let ms: Vec<usize> = pair.cs.ms().into_iter().chain(pair.nocs.ms()).collect();
        let (m_lo, m_hi) = (*ms.iter().min().unwrap_or(&0) as f64, *ms.iter().max().unwrap_or(&1) as f64);
        let errs = pair
            .cs
            .medians()
            .into_iter()
            .chain(pair.nocs.medians())
            .filter(|e| *e > 0.0 && e.is_finite());
        let (mut lo, mut hi) = errs.fold((threshold.log10(), threshold.log10()), |(a, b), e| {
            (a.min(e.log10()), b.max(e.log10()))
        });
        lo = lo.floor();
        hi = hi.ceil().max(lo + 1.0);
        let px = |m: f64| PAD + (m - m_lo) / (m_hi - m_lo).max(1.0) * (W - 2.0 * PAD);
        let py = |e: f64| top + PAD + (hi - e.max(10f64.powf(lo)).log10()) / (hi - lo) * (H - 2.0 * PAD);

        let _ = writeln!(
            out,
            r#"<rect x="{PAD}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            top + PAD,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(out, r#"<text x="{PAD}" y="{}">s = {}</text>"#, top + PAD - 8.0, pair.s);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">M</text>"#,
            W / 2.0,
            top + H - 12.0
        );
        for d in (lo as i32)..=(hi as i32) {
            let y = py(10f64.powi(d));
            let _ = writeln!(out, r#"<text x="{}" y="{y:.1}" text-anchor="end">1e{d}</text>"#, PAD - 4.0);
        }
        let ty = py(threshold);
        let _ = writeln!(
            out,
            r##"<line x1="{PAD}" y1="{ty:.1}" x2="{}" y2="{ty:.1}" stroke="#888" stroke-dasharray="4 3"/>"##,
            W - PAD
        );
        for (curve, color) in [(&pair.cs, "#c0392b"), (&pair.nocs, "#2c6fbb")] {
            let pts: Vec<String> = curve
                .points
                .iter()
                .filter(|p| p.median_err.is_finite())
                .map(|p| format!("{:.1},{:.1}", px(p.m as f64), py(p.median_err)))
                .collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, pts.join(" "));
            let label_y = top
                + PAD
                + if curve.protocol == crate::pipeline::Protocol::Cs {
                    14.0
                } else {
                    28.0
                };
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{label_y}" fill="{color}" text-anchor="end">{}</text>"#,
                W - PAD - 6.0,
                curve.protocol.as_str()
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Success rate per cell, white (0) to red (1); NA cells grey. M runs right, s runs up.
pub fn heatmap_svg(grid: &HeatGrid) -> String {
    let (cols, rows) = (grid.m_values.len(), grid.s_values.len());
    let cell = ((W - 2.0 * PAD) / cols.max(1) as f64).min((H - 2.0 * PAD) / rows.max(1) as f64);
    let mut out = String::new();
    open(&mut out, W, H);
    for r in 0..rows {
        for c in 0..cols {
            let x = PAD + c as f64 * cell;
            let y = PAD + (rows - 1 - r) as f64 * cell;
            let fill = match grid.cell(r, c).success_rate {
                None => "#bbbbbb".to_string(),
                Some(p) => {
                    let g = (255.0 * (1.0 - p)).round() as u8;
                    format!("#ff{g:02x}{g:02x}")
                }
            };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="{fill}"/>"#
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">M/N</text>"#,
        PAD + cols as f64 * cell / 2.0,
        PAD + rows as f64 * cell + 16.0
    );
    let _ = writeln!(out, r#"<text x="12" y="{}">s/N</text>"#, PAD + rows as f64 * cell / 2.0);
    out.push_str("</svg>\n");
    out
}
