//! Multi-class trainers and the model they produce.

mod randomized;
mod simple;
mod soft;
mod tsvm;

pub use randomized::train_tsvm_randomized;
pub use simple::train_simple_tsvm;
pub use soft::train_soft;
pub use tsvm::train_tsvm_deterministic;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    score_functions, AffineScore, ClassRegion, HalfSpaceD, LabeledDataset, LiftedHalfSpace,
    SimplexFrame,
};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Simple,
    Tsvm,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Simple => "simple",
            ModelKind::Tsvm => "tsvm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Deterministic,
    Randomized,
    Soft,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Deterministic => "deterministic",
            Algorithm::Randomized => "randomized",
            Algorithm::Soft => "soft",
        })
    }
}

/// Diagnostics of a soft-margin fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoftInfo {
    pub c: f64,
    /// Training points outside their class half-space.
    pub violations: usize,
    /// Frobenius norm of the functional before normalization.
    pub raw_norm: f64,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub tol_opt: f64,
    pub tol_origin: f64,
    pub iterations: usize,
    /// Randomized trainer only: basis recomputations and membership tests.
    pub basis_changes: usize,
    pub scans: usize,
    pub soft: Option<SoftInfo>,
}

impl TrainingInfo {
    pub(crate) fn new(algorithm: Algorithm, tol_opt: f64, tol_origin: f64) -> Self {
        TrainingInfo {
            algorithm,
            seed: None,
            tol_opt,
            tol_origin,
            iterations: 0,
            basis_changes: 0,
            scans: 0,
            soft: None,
        }
    }
}

/// A trained model: the lifted half-space, its `k` restrictions, and the
/// supports that determine it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub kind: ModelKind,
    pub frame: SimplexFrame,
    pub lifted: LiftedHalfSpace,
    pub halfspaces: Vec<ClassRegion>,
    /// Per-class indices into the training classes.
    pub supports: Vec<Vec<usize>>,
    /// Distance from the origin to the boundary of the lifted half-space.
    pub lifted_margin: f64,
    /// Norm of the closest point the model was built from.
    pub closest_point_norm: f64,
    pub info: TrainingInfo,
}

impl MulticlassModel {
    pub fn new(
        kind: ModelKind,
        frame: SimplexFrame,
        lifted: LiftedHalfSpace,
        supports: Vec<Vec<usize>>,
        closest_point_norm: f64,
        info: TrainingInfo,
    ) -> Result<Self> {
        if frame.k() != lifted.k() {
            return invalid("frame and lifted half-space disagree on k");
        }
        let halfspaces = (0..frame.k())
            .map(|i| ClassRegion::from_restriction(&lifted, i, &frame))
            .collect::<Result<Vec<_>>>()?;
        Ok(MulticlassModel {
            kind,
            lifted_margin: lifted.lambda(),
            frame,
            lifted,
            halfspaces,
            supports,
            closest_point_norm,
            info,
        })
    }

    pub fn d(&self) -> usize {
        self.lifted.d()
    }

    pub fn k(&self) -> usize {
        self.lifted.k()
    }

    /// The half-space of class `i`, unless its region is trivial.
    pub fn halfspace(&self, i: usize) -> Option<&HalfSpaceD> {
        self.halfspaces.get(i).and_then(ClassRegion::halfspace)
    }

    pub fn lambda(&self) -> f64 {
        self.lifted.lambda()
    }

    pub fn scores(&self) -> Vec<AffineScore> {
        score_functions(&self.lifted, &self.frame)
    }

    pub fn score_values(&self, x: &[f64]) -> Vec<f64> {
        self.scores().iter().map(|g| g.eval(x)).collect()
    }

    pub fn support_count(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    /// Largest shortfall `λ − g_i(x)` over the training points (negative when
    /// every point is strictly inside its half-space).
    pub fn worst_containment(&self, dataset: &LabeledDataset) -> f64 {
        let g = self.scores();
        dataset
            .iter()
            .map(|(c, _, x)| self.lambda() - g[c].eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `W = [P ; r]` with `r = ((k−1)/k) Σ ρ_i v_i`, so that
/// `g_i(x) = ⟨P v_i, x⟩ + ρ_i` before normalization. Requires `Σ ρ_i = 0`.
pub(crate) fn assemble_functional(p: &[f64], rho: &[f64], frame: &SimplexFrame) -> Vec<f64> {
    let k = frame.k();
    let cols = k - 1;
    let mut w = p.to_vec();
    let f = (k as f64 - 1.0) / k as f64;
    for c in 0..cols {
        w.push(
            f * rho
                .iter()
                .zip(frame.vectors())
                .map(|(r, v)| r * v[c])
                .sum::<f64>(),
        );
    }
    w
}

/// `P v` for `P` row-major `d×(k−1)`.
pub(crate) fn apply(p: &[f64], v: &[f64]) -> Vec<f64> {
    let cols = v.len();
    p.chunks(cols).map(|row| dot(row, v)).collect()
}

/// Training options.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub soft_margin: Option<f64>,
    pub tol_opt: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            kind: ModelKind::Tsvm,
            algorithm: Algorithm::Deterministic,
            seed: 0,
            soft_margin: None,
            tol_opt: None,
        }
    }
}

/// Dispatch on the configuration.
pub fn train(dataset: &LabeledDataset, config: &TrainConfig) -> Result<MulticlassModel> {
    if let Some(c) = config.soft_margin {
        return train_soft(dataset, config.kind, c);
    }
    match (config.kind, config.algorithm) {
        (ModelKind::Simple, _) => simple::train_simple_with(dataset, config.tol_opt),
        (ModelKind::Tsvm, Algorithm::Randomized) => {
            randomized::train_randomized_with(dataset, config.seed, config.tol_opt)
        }
        (ModelKind::Tsvm, _) => tsvm::train_deterministic_with(dataset, config.tol_opt),
    }
}

/// Per-class preimages of the lifted points active in the model's certificate.
///
/// Hard models are re-solved on the points lying on their class boundary,
/// which yields the same closest point; soft models report their stored
/// supports.
pub fn extract_supports(
    model: &MulticlassModel,
    dataset: &LabeledDataset,
) -> Result<Vec<Vec<usize>>> {
    if dataset.d() != model.d() || dataset.k() != model.k() {
        return invalid("dataset shape does not match the model");
    }
    if model.info.soft.is_some() {
        return Ok(model.supports.clone());
    }
    let g = model.scores();
    let lam = model.lambda();
    let band = 1e-7 * (1.0 + lam);
    let tight: Vec<Vec<usize>> = (0..dataset.k())
        .map(|i| {
            (0..dataset.class(i).len())
                .filter(|&j| g[i].eval(&dataset.class(i)[j]) - lam <= band)
                .collect()
        })
        .collect();
    // A class that never touches the boundary has no supports, but one of its
    // points keeps the class count; it cannot enter the optimum.
    let tight: Vec<Vec<usize>> = tight
        .into_iter()
        .map(|t| if t.is_empty() { vec![0] } else { t })
        .collect();
    let sub = dataset.subset(&tight)?;
    let inner = match model.kind {
        ModelKind::Simple => train_simple_tsvm(&sub)?,
        ModelKind::Tsvm => train_tsvm_deterministic(&sub)?,
    };
    Ok(inner
        .supports
        .iter()
        .zip(&tight)
        .map(|(s, t)| s.iter().map(|&j| t[j]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> LabeledDataset {
        LabeledDataset::new(vec![
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![-2.0, 0.5]],
            vec![vec![2.0, 0.0], vec![2.0, 1.0], vec![4.0, 3.0]],
        ])
        .unwrap()
    }

    #[test]
    fn extracted_supports_match_training() {
        let ds = data();
        for kind in [ModelKind::Simple, ModelKind::Tsvm] {
            let config = TrainConfig {
                kind,
                ..TrainConfig::default()
            };
            let m = train(&ds, &config).unwrap();
            let s = extract_supports(&m, &ds).unwrap();
            assert_eq!(s, m.supports, "{kind:?}");
            // The far points never touch the boundary.
            assert!(!s[0].contains(&2) && !s[1].contains(&2));
        }
    }

    #[test]
    fn extract_rejects_other_shapes() {
        let m = train(&data(), &TrainConfig::default()).unwrap();
        let other = LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![1.0]]]).unwrap();
        assert!(extract_supports(&m, &other).is_err());
    }

    #[test]
    fn soft_config_dispatches() {
        let config = TrainConfig {
            soft_margin: Some(1e6),
            ..TrainConfig::default()
        };
        let m = train(&data(), &config).unwrap();
        assert!(m.info.soft.is_some());
        assert_eq!(extract_supports(&m, &data()).unwrap(), m.supports);
    }
}
