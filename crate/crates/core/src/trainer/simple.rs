use crate::error::{Result, TsvmError};
use crate::geometry::{build_simplex_frame, lift_dataset, LabeledDataset, LiftedHalfSpace};
use crate::kernels::{default_tol_opt, hulls_jointly_intersect, tol_origin, wolfe, PointSet};
use crate::linalg::{norm, norm_sq};

use super::{Algorithm, ModelKind, MulticlassModel, TrainingInfo};

/// The half-space farthest from the origin that contains every lifted point.
pub fn train_simple_tsvm(dataset: &LabeledDataset) -> Result<MulticlassModel> {
    train_simple_with(dataset, None)
}

pub(crate) fn train_simple_with(
    dataset: &LabeledDataset,
    tol_opt: Option<f64>,
) -> Result<MulticlassModel> {
    let frame = build_simplex_frame(dataset.k())?;
    let lifted = lift_dataset(dataset, &frame);
    let set = PointSet::new(&lifted)?;
    let scale = lifted.iter().map(|y| norm(y)).fold(0.0, f64::max);
    let tol_opt = tol_opt.unwrap_or_else(|| default_tol_opt(scale));
    let t_origin = tol_origin(scale);
    let sol = wolfe(&set, tol_opt)?;
    let pn = norm(&sol.point);
    if sol.reached_origin || pn <= t_origin {
        return Err(not_trainable(dataset, pn));
    }

    let owner: Vec<(usize, usize)> = dataset.iter().map(|(c, j, _)| (c, j)).collect();
    let mut supports = vec![Vec::new(); dataset.k()];
    for (key, _, w) in &sol.corral {
        if *w > 0.0 {
            let (c, j) = owner[*key];
            supports[c].push(j);
        }
    }
    supports.iter_mut().for_each(|s| s.sort_unstable());

    let h = LiftedHalfSpace::from_functional(
        dataset.d(),
        dataset.k(),
        &sol.point,
        norm_sq(&sol.point),
    )?;
    let mut info = TrainingInfo::new(Algorithm::Deterministic, tol_opt, t_origin);
    info.iterations = sol.iterations;
    MulticlassModel::new(ModelKind::Simple, frame, h, supports, pn, info)
}

/// Error for a dataset whose lifted hull reaches the origin, with the LP
/// witness of a common point when the LP confirms it.
pub(crate) fn not_trainable(dataset: &LabeledDataset, norm: f64) -> TsvmError {
    let witness = hulls_jointly_intersect(dataset)
        .ok()
        .and_then(|v| v.witness);
    TsvmError::NotTrainable {
        reason: format!("closest lifted point has norm {norm:e}, inside the origin band"),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn toy_segment() {
        // Y = {(0, 1), (−2, −1)}; the segment (−2t, 1 − 2t) is closest to the
        // origin at t = 1/4, giving p* = (−1/2, 1/2).
        let ds = LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![2.0]]]).unwrap();
        let m = train_simple_tsvm(&ds).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(m.closest_point_norm, s, epsilon = 1e-12);
        assert_abs_diff_eq!(m.lifted_margin, s, epsilon = 1e-12);
        assert_eq!(m.supports, vec![vec![0], vec![0]]);
        // ⟨p*, x̄⟩ ≥ 1/2 → x ≤ 0 for class 1; −⟨p*, x̄⟩ ≥ 1/2 → x ≥ 2 for class 2.
        assert_abs_diff_eq!(m.halfspace(0).unwrap().normal[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.halfspace(0).unwrap().offset, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.halfspace(1).unwrap().normal[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.halfspace(1).unwrap().offset, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn refuses_overlap() {
        let ds = LabeledDataset::new(vec![
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            vec![vec![0.0, -1.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        match train_simple_tsvm(&ds) {
            Err(TsvmError::NotTrainable {
                witness: Some(w), ..
            }) => {
                assert!(w[0].abs() < 1e-9 && w[1].abs() < 1e-9)
            }
            other => panic!("{other:?}"),
        }
    }
}
