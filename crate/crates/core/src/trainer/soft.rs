//! Soft-margin variants.
//!
//! Both models become the homogeneous problem "separate the lifted data from
//! the origin with slack":
//!
//! * simple: `min ½‖W‖² + C Σ ξ` with `⟨W, S(x)⟩ ≥ 1 − ξ_x`;
//! * tsvm: only the `R`-part `P` is regularized, and the last row enters
//!   through per-class offsets `ρ_i` with `Σ ρ_i = 0`, i.e.
//!   `⟨P v_i, x⟩ + ρ_i ≥ 1 − ξ_x`. For `k = 2` this is the ordinary C-SVM.
//!
//! As `C → ∞` on separable data both reduce to their hard-margin models.

use crate::error::{invalid, Result};
use crate::geometry::{
    build_simplex_frame, outer_lift, LabeledDataset, LiftedHalfSpace, SimplexFrame,
};
use crate::kernels::{solve_dual, DualProblem};
use crate::linalg::norm;

use super::{assemble_functional, Algorithm, ModelKind, MulticlassModel, SoftInfo, TrainingInfo};

const DUAL_TOL: f64 = 1e-9;

/// Soft-margin training; total on any valid dataset.
pub fn train_soft(dataset: &LabeledDataset, kind: ModelKind, c: f64) -> Result<MulticlassModel> {
    if !(c > 0.0) || !c.is_finite() {
        return invalid("penalty C must be positive and finite");
    }
    let frame = build_simplex_frame(dataset.k())?;
    let d = dataset.d();
    let k = dataset.k();
    let group: Vec<usize> = dataset.iter().map(|(cl, _, _)| cl).collect();
    let features: Vec<Vec<f64>> = match kind {
        ModelKind::Simple => dataset
            .iter()
            .map(|(cl, _, x)| outer_lift(x, frame.vector(cl)))
            .collect(),
        ModelKind::Tsvm => dataset
            .iter()
            .map(|(cl, _, x)| {
                let mut z = outer_lift(x, frame.vector(cl));
                z.truncate(d * (k - 1));
                z
            })
            .collect(),
    };
    let problem = DualProblem {
        features: &features,
        group: &group,
        groups: k,
        coupled: kind == ModelKind::Tsvm,
        c,
    };
    let cap = 200_000 + 2000 * features.len();
    let sol = solve_dual(&problem, DUAL_TOL, cap);
    if !sol.converged {
        log::warn!(
            "soft-margin dual stopped after {} moves (violation {:e})",
            sol.iterations,
            sol.violation
        );
    }

    let raw = match kind {
        ModelKind::Simple => sol.w.clone(),
        ModelKind::Tsvm => {
            let rho: Vec<f64> = sol.mu.iter().map(|m| -m).collect();
            assemble_functional(&sol.w, &rho, &frame)
        }
    };
    let raw_norm = norm(&raw);
    let (functional, lambda) = if raw_norm > 1e-300 {
        (raw, 1.0)
    } else {
        (fallback_functional(&frame, d), f64::MIN_POSITIVE)
    };
    let h = LiftedHalfSpace::from_functional(d, k, &functional, lambda)?;

    let mut supports = vec![Vec::new(); k];
    for ((cl, j, _), &a) in dataset.iter().zip(&sol.alpha) {
        if a > 0.0 {
            supports[cl].push(j);
        }
    }
    let mut info = TrainingInfo::new(Algorithm::Soft, DUAL_TOL, 0.0);
    info.iterations = sol.iterations;
    // In the hard limit the regularized part tends to p/‖p‖², so its inverse
    // norm plays the role of the closest-point norm.
    let reg_norm = norm(&sol.w);
    let cp = if reg_norm > 1e-300 {
        1.0 / reg_norm
    } else {
        0.0
    };
    let mut model = MulticlassModel::new(kind, frame, h, supports, cp, info)?;
    let violations = count_violations(&model, dataset);
    let scale = dataset.scale();
    model.info.soft = Some(SoftInfo {
        c,
        violations,
        raw_norm,
        low_confidence: raw_norm * (1.0 + scale) < 1e-2
            || violations as f64 > 0.5 * dataset.len() as f64,
    });
    Ok(model)
}

/// Any functional whose restrictions are all nondegenerate: `e_1 ⊗ v_1`.
fn fallback_functional(frame: &SimplexFrame, d: usize) -> Vec<f64> {
    let cols = frame.dim();
    let mut w = vec![0.0; (d + 1) * cols];
    w[..cols].copy_from_slice(frame.vector(0));
    w
}

fn count_violations(model: &MulticlassModel, dataset: &LabeledDataset) -> usize {
    let g = model.scores();
    let lam = model.lambda();
    dataset
        .iter()
        .filter(|(c, _, x)| g[*c].eval(x) < lam - 1e-8 * (1.0 + lam))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::{train_simple_tsvm, train_tsvm_deterministic};

    fn close(a: &MulticlassModel, b: &MulticlassModel, tol: f64) -> bool {
        let fa = a.lifted.functional();
        let fb = b.lifted.functional();
        fa.iter().zip(&fb).all(|(x, y)| (x - y).abs() <= tol)
            && (a.lambda() - b.lambda()).abs() <= tol
    }

    fn triangle() -> LabeledDataset {
        LabeledDataset::new(vec![
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            vec![vec![2.0, 0.0], vec![1.0, 2.0]],
            vec![vec![1.0, 2.0], vec![0.0, 0.0]],
        ])
        .unwrap()
    }

    #[test]
    fn large_c_recovers_hard_models() {
        let ds = triangle();
        let hard = train_tsvm_deterministic(&ds).unwrap();
        let soft = train_soft(&ds, ModelKind::Tsvm, 1e6).unwrap();
        assert!(
            close(&hard, &soft, 1e-4),
            "{:?}\n{:?}",
            hard.lifted,
            soft.lifted
        );
        let hard = train_simple_tsvm(&ds).unwrap();
        let soft = train_soft(&ds, ModelKind::Simple, 1e6).unwrap();
        assert!(close(&hard, &soft, 1e-4));
    }

    #[test]
    fn overlapping_still_trains() {
        let ds = LabeledDataset::new(vec![
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            vec![vec![0.0, -1.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        for kind in [ModelKind::Simple, ModelKind::Tsvm] {
            let m = train_soft(&ds, kind, 1.0).unwrap();
            assert!(m.lambda() > 0.0);
            assert!(m.info.soft.as_ref().unwrap().violations > 0);
        }
    }

    #[test]
    fn tiny_c_is_low_confidence() {
        let m = train_soft(&triangle(), ModelKind::Tsvm, 1e-6).unwrap();
        let s = m.info.soft.unwrap();
        assert!(s.raw_norm < 1e-4);
        assert!(s.low_confidence);
    }
}
