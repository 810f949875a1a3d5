//! SVG drawing of a planar region export.

use std::fmt::Write;

use crate::classifier::{Label, LineLevel, RegionExport};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
    "#bcbd22", "#7f7f7f",
];

const SIZE: f64 = 600.0;

pub fn class_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Data overlaid on the regions: per-class points and per-class support
/// indices into them.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overlay<'a> {
    pub classes: &'a [Vec<Vec<f64>>],
    pub supports: &'a [Vec<usize>],
    /// Palette slot of each class; class `i` uses slot `i` when empty.
    pub colors: &'a [usize],
}

impl Overlay<'_> {
    fn color(&self, class: usize) -> &'static str {
        class_color(self.colors.get(class).copied().unwrap_or(class))
    }
}

struct View {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.sx, SIZE - (y - self.y0) * self.sy)
    }
}

/// Confident cells are drawn solid, argmax-only cells faded, ambiguous cells
/// grey. Margin lines are solid and zero lines dashed.
pub fn render_svg(export: &RegionExport, overlay: Overlay<'_>) -> String {
    let b = export.bounds;
    let view = View {
        x0: b.x_min,
        y0: b.y_min,
        sx: SIZE / (b.x_max - b.x_min),
        sy: SIZE / (b.y_max - b.y_min),
    };
    let n = export.resolution;
    let cell = SIZE / n as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for (row, cells) in export.cells.iter().enumerate() {
        // Merge horizontal runs of identical cells to keep the file small.
        let y = SIZE - (row + 1) as f64 * cell;
        let mut col = 0;
        while col < n {
            let start = col;
            while col + 1 < n && cells[col + 1] == cells[start] {
                col += 1;
            }
            let (fill, opacity) = match cells[start].label {
                Label::Class(i) => (
                    class_color(i),
                    if cells[start].confident { 0.45 } else { 0.15 },
                ),
                Label::Ambiguous => ("#999999", 0.5),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}" fill-opacity="{opacity}"/>"#,
                start as f64 * cell,
                y,
                (col - start + 1) as f64 * cell,
                cell
            );
            col += 1;
        }
    }
    s.push_str("</g>\n");
    for line in &export.lines {
        let Some([p, q]) = line.segment else { continue };
        let (x1, y1) = view.px(p[0], p[1]);
        let (x2, y2) = view.px(q[0], q[1]);
        let dash = match line.level {
            LineLevel::Margin => "",
            LineLevel::Zero => r#" stroke-dasharray="6 4""#,
        };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            overlay.color(line.class)
        );
    }
    for (i, pts) in overlay.classes.iter().enumerate() {
        let sup = overlay.supports.get(i).map(Vec::as_slice).unwrap_or(&[]);
        for (j, p) in pts.iter().enumerate() {
            let (x, y) = view.px(p[0], p[1]);
            let color = overlay.color(i);
            if sup.contains(&j) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.3}" cy="{y:.3}" r="7" fill="none" stroke="black" stroke-width="2"/>"#
                );
            }
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}" stroke="black" stroke-width="0.5"/>"#
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{export_regions_2d, Bounds};
    use crate::geometry::LabeledDataset;
    use crate::trainer::train_tsvm_deterministic;

    #[test]
    fn draws_everything() {
        let ds = LabeledDataset::new(vec![
            vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            vec![vec![3.0, 0.0], vec![3.0, 1.0]],
        ])
        .unwrap();
        let m = train_tsvm_deterministic(&ds).unwrap();
        let e = export_regions_2d(&m, Bounds::new(-1.0, 4.0, -1.0, 2.0).unwrap(), 20).unwrap();
        let svg = render_svg(
            &e,
            Overlay {
                classes: ds.classes(),
                supports: &m.supports,
                ..Overlay::default()
            },
        );
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 4 + m.support_count());
        assert!(svg.contains("stroke-dasharray"));
        // Two half-planes and a grey band: a handful of runs per row.
        assert!(svg.matches("<rect").count() <= 1 + 20 * 5);
    }
}
