//! Point queries against a trained model and the planar region export.
//!
//! A point gets the class with the largest score `g_i`; near-ties are
//! reported as ambiguous rather than resolved. `λ` separates a confident
//! call (`x ∈ H_i`) from a merely plausible one, and the band where every
//! score stays below `λ` is the ambiguity region between the half-spaces.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TsvmError};
use crate::linalg::is_finite;
use crate::trainer::MulticlassModel;

/// Scores closer than this to the maximum count as a tie.
pub const TIE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Class(usize),
    Ambiguous,
}

impl Label {
    pub fn class(self) -> Option<usize> {
        match self {
            Label::Class(i) => Some(i),
            Label::Ambiguous => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub scores: Vec<f64>,
    /// The top score reaches `λ`.
    pub in_confident_region: bool,
    /// No score exceeds `λ`.
    pub in_delta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMembership {
    /// Classes whose half-space contains the point.
    pub containing: Vec<usize>,
    pub in_delta: bool,
    /// Every score is (numerically) zero: the core of the subdivision.
    pub in_t: bool,
}

fn check_point(model: &MulticlassModel, x: &[f64]) -> Result<()> {
    if x.len() != model.d() {
        return invalid(format!(
            "point has {} coordinates, model expects {}",
            x.len(),
            model.d()
        ));
    }
    if !is_finite(x) {
        return invalid("point is not finite");
    }
    Ok(())
}

/// Argmax of the scores with the tie band applied.
pub fn decide(scores: &[f64], lambda: f64) -> Prediction {
    let (best, top) =
        scores.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |b, (i, &s)| if s > b.1 { (i, s) } else { b },
        );
    let tied = scores
        .iter()
        .enumerate()
        .any(|(i, &s)| i != best && s >= top - TIE_BAND);
    Prediction {
        label: if tied {
            Label::Ambiguous
        } else {
            Label::Class(best)
        },
        in_confident_region: top >= lambda - TIE_BAND,
        in_delta: scores.iter().all(|&s| s <= lambda + TIE_BAND),
        scores: scores.to_vec(),
    }
}

pub fn predict(model: &MulticlassModel, x: &[f64]) -> Result<Prediction> {
    check_point(model, x)?;
    Ok(decide(&model.score_values(x), model.lambda()))
}

pub fn region_membership(model: &MulticlassModel, x: &[f64]) -> Result<RegionMembership> {
    check_point(model, x)?;
    let g = model.score_values(x);
    let lam = model.lambda();
    Ok(RegionMembership {
        containing: (0..g.len()).filter(|&i| g[i] >= lam - TIE_BAND).collect(),
        in_delta: g.iter().all(|&s| s <= lam + TIE_BAND),
        in_t: g.iter().all(|&s| s >= -TIE_BAND),
    })
}

/// Axis-aligned plotting window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let b = Bounds {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        if !(x_min < x_max && y_min < y_max) || !is_finite(&[x_min, x_max, y_min, y_max]) {
            return invalid("bounds must be finite with min < max on both axes");
        }
        Ok(b)
    }

    /// The data box padded by 10% on each side.
    pub fn around(points: &[&[f64]]) -> Self {
        let mut b = [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ];
        for p in points {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Bounds {
                x_min: -1.0,
                x_max: 1.0,
                y_min: -1.0,
                y_max: 1.0,
            };
        }
        let pad_x = 0.1 * (b[1] - b[0]).max(1e-3);
        let pad_y = 0.1 * (b[3] - b[2]).max(1e-3);
        let pad = pad_x.max(pad_y);
        Bounds {
            x_min: b[0] - pad,
            x_max: b[1] + pad,
            y_min: b[2] - pad,
            y_max: b[3] + pad,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineLevel {
    /// `g_i(x) = λ`, the boundary of `H_i`.
    Margin,
    /// `g_i(x) = 0`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    pub class: usize,
    pub level: LineLevel,
    /// Clipped to the bounds; `None` when the line misses the window.
    pub segment: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub label: Label,
    pub confident: bool,
}

/// Grid of cell-centre predictions plus the boundary lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionExport {
    pub bounds: Bounds,
    pub resolution: usize,
    /// `cells[row][col]`, row 0 at `y_min`.
    pub cells: Vec<Vec<GridCell>>,
    pub lines: Vec<BoundaryLine>,
}

impl RegionExport {
    pub fn cell_center(&self, row: usize, col: usize) -> [f64; 2] {
        let b = &self.bounds;
        let r = self.resolution as f64;
        [
            b.x_min + (col as f64 + 0.5) * (b.x_max - b.x_min) / r,
            b.y_min + (row as f64 + 0.5) * (b.y_max - b.y_min) / r,
        ]
    }

    /// `x,y,label,confident` with `label` either a class index or `AMBIGUOUS`.
    pub fn to_csv(&self, names: Option<&[String]>) -> String {
        let mut out = String::from("x,y,label,confident\n");
        for (row, cells) in self.cells.iter().enumerate() {
            for (col, cell) in cells.iter().enumerate() {
                let [x, y] = self.cell_center(row, col);
                let label = match (cell.label, names) {
                    (Label::Class(i), Some(n)) => n[i].clone(),
                    (Label::Class(i), None) => i.to_string(),
                    (Label::Ambiguous, _) => "AMBIGUOUS".to_string(),
                };
                out.push_str(&format!("{x},{y},{label},{}\n", cell.confident));
            }
        }
        out
    }
}

pub fn export_regions_2d(
    model: &MulticlassModel,
    bounds: Bounds,
    resolution: usize,
) -> Result<RegionExport> {
    if model.d() != 2 {
        return Err(TsvmError::UnsupportedDimension {
            expected: 2,
            got: model.d(),
        });
    }
    if resolution == 0 {
        return invalid("resolution must be positive");
    }
    let bounds = Bounds::new(bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max)?;
    let g = model.scores();
    let lam = model.lambda();
    let mut export = RegionExport {
        bounds,
        resolution,
        cells: Vec::with_capacity(resolution),
        lines: Vec::new(),
    };
    for row in 0..resolution {
        let mut cells = Vec::with_capacity(resolution);
        for col in 0..resolution {
            let x = export.cell_center(row, col);
            let scores: Vec<f64> = g.iter().map(|gi| gi.eval(&x)).collect();
            let p = decide(&scores, lam);
            cells.push(GridCell {
                label: p.label,
                confident: p.in_confident_region,
            });
        }
        export.cells.push(cells);
    }
    for (i, gi) in g.iter().enumerate() {
        for (level, value) in [(LineLevel::Margin, lam), (LineLevel::Zero, 0.0)] {
            export.lines.push(BoundaryLine {
                class: i,
                level,
                segment: clip_line(&gi.weights, value - gi.bias, &bounds),
            });
        }
    }
    Ok(export)
}

/// Segment of `{x : ⟨a, x⟩ = c}` inside the box.
fn clip_line(a: &[f64], c: f64, b: &Bounds) -> Option<[[f64; 2]; 2]> {
    let (ax, ay) = (a[0], a[1]);
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let eps = 1e-12 * (1.0 + b.x_max.abs() + b.x_min.abs() + b.y_max.abs() + b.y_min.abs());
    if ay.abs() > 1e-300 {
        for x in [b.x_min, b.x_max] {
            let y = (c - ax * x) / ay;
            if y >= b.y_min - eps && y <= b.y_max + eps {
                pts.push([x, y.clamp(b.y_min, b.y_max)]);
            }
        }
    }
    if ax.abs() > 1e-300 {
        for y in [b.y_min, b.y_max] {
            let x = (c - ay * y) / ax;
            if x >= b.x_min - eps && x <= b.x_max + eps {
                pts.push([x.clamp(b.x_min, b.x_max), y]);
            }
        }
    }
    // Farthest pair among the (at most four, possibly repeated) hits.
    let mut best: Option<([f64; 2], [f64; 2], f64)> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dist = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
            if best.is_none_or(|b| dist > b.2) {
                best = Some((pts[i], pts[j], dist));
            }
        }
    }
    best.filter(|b| b.2 > 0.0).map(|b| [b.0, b.1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LabeledDataset;
    use crate::trainer::train_tsvm_deterministic;

    fn toy() -> MulticlassModel {
        let ds = LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![2.0]]]).unwrap();
        train_tsvm_deterministic(&ds).unwrap()
    }

    #[test]
    fn toy_predictions() {
        let m = toy();
        let p = predict(&m, &[-1.0]).unwrap();
        assert_eq!(p.label, Label::Class(0));
        assert!(p.in_confident_region);
        let p = predict(&m, &[1.0]).unwrap();
        assert_eq!(p.label, Label::Ambiguous);
        assert!(p.in_delta);
        assert!((p.scores.iter().sum::<f64>()).abs() < 1e-12);
        assert!(predict(&m, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn toy_regions() {
        let m = toy();
        let r = region_membership(&m, &[-3.0]).unwrap();
        assert_eq!(r.containing, vec![0]);
        assert!(!r.in_t);
        let r = region_membership(&m, &[1.0]).unwrap();
        assert!(r.containing.is_empty() && r.in_t && r.in_delta);
    }

    #[test]
    fn export_requires_plane() {
        let m = toy();
        let b = Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            export_regions_2d(&m, b, 10),
            Err(TsvmError::UnsupportedDimension {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn triangle_cones() {
        let ds = LabeledDataset::new(vec![
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            vec![vec![2.0, 0.0], vec![1.0, 2.0]],
            vec![vec![1.0, 2.0], vec![0.0, 0.0]],
        ])
        .unwrap();
        let m = train_tsvm_deterministic(&ds).unwrap();
        for (i, class) in ds.classes().iter().enumerate() {
            let c = [
                (class[0][0] + class[1][0]) / 2.0,
                (class[0][1] + class[1][1]) / 2.0,
            ];
            assert_eq!(predict(&m, &c).unwrap().label, Label::Class(i));
        }
        let b = Bounds::new(-1.0, 3.0, -1.0, 3.0).unwrap();
        assert!(export_regions_2d(&m, b, 0).is_err());
        let e = export_regions_2d(&m, b, 40).unwrap();
        assert_eq!(e.cells.len(), 40);
        assert_eq!(e.lines.len(), 6);
        let ambiguous = e
            .cells
            .iter()
            .flatten()
            .filter(|c| c.label == Label::Ambiguous)
            .count();
        assert!(ambiguous < 40);
    }

    #[test]
    fn clip_diagonal() {
        let b = Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let s = clip_line(&[1.0, -1.0], 0.0, &b).unwrap();
        let len = (s[0][0] - s[1][0]).hypot(s[0][1] - s[1][1]);
        assert!((len - 2f64.sqrt()).abs() < 1e-12);
        assert!(clip_line(&[1.0, 0.0], 5.0, &b).is_none());
    }
}
