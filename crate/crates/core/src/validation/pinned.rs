//! Archived instances that regression tests depend on.

use crate::geometry::LabeledDataset;

/// Points on the three edges of a triangle, one edge per class. Every two
/// classes share a vertex, yet no point lies on all three edges.
pub fn triangle_edges() -> LabeledDataset {
    LabeledDataset::new(vec![
        vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.0]],
        vec![vec![4.0, 0.0], vec![2.0, 3.0], vec![3.0, 1.5]],
        vec![vec![2.0, 3.0], vec![0.0, 0.0], vec![1.0, 1.5]],
    ])
    .expect("static dataset")
}

/// Dataset and shift for which the Simple TSVM support set changes: before
/// the shift both points of the second class carry weight, after it only the
/// first does. Found by exhaustive search over a small integer grid.
pub fn simple_translation_counterexample() -> (LabeledDataset, Vec<f64>) {
    let ds = LabeledDataset::new(vec![
        vec![vec![-2.0, -2.0], vec![-2.0, -1.0]],
        vec![vec![-2.0, 0.0], vec![-1.0, -2.0]],
    ])
    .expect("static dataset");
    (ds, vec![0.0, 10.0])
}
