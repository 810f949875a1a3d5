//! Versioned JSON model files.
//!
//! Floats are written in their shortest round-trip form and parsed back
//! exactly, so `load(save(m))` reproduces every number bit for bit.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use tsvm_core::{
    Algorithm, ClassRegion, LiftedHalfSpace, ModelKind, MulticlassModel, SimplexFrame, SoftInfo,
    TrainingInfo,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    pub kind: ModelKind,
    pub d: usize,
    pub k: usize,
    /// Label text of each class, in class order.
    pub labels: Vec<String>,
    pub frame: Vec<Vec<f64>>,
    /// Row-major `(k−1)×(d+1)` functional matrix with unit Frobenius norm.
    pub m: Vec<f64>,
    pub lambda: f64,
    pub halfspaces: Vec<ClassRegion>,
    pub supports: Vec<Vec<usize>>,
    pub lifted_margin: f64,
    pub closest_point_norm: f64,
    pub training: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub tol_opt: f64,
    pub tol_origin: f64,
    pub iterations: usize,
    pub basis_changes: usize,
    pub scans: usize,
    pub soft: Option<SoftInfo>,
    /// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` when set so
    /// that builds stay reproducible; absent otherwise.
    pub created: Option<u64>,
}

impl ModelFile {
    pub fn from_model(model: &MulticlassModel, labels: &[String]) -> Self {
        let created = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok());
        let info = &model.info;
        ModelFile {
            version: FORMAT_VERSION,
            kind: model.kind,
            d: model.d(),
            k: model.k(),
            labels: labels.to_vec(),
            frame: model.frame.vectors().to_vec(),
            m: model.lifted.matrix().to_vec(),
            lambda: model.lambda(),
            halfspaces: model.halfspaces.clone(),
            supports: model.supports.clone(),
            lifted_margin: model.lifted_margin,
            closest_point_norm: model.closest_point_norm,
            training: Metadata {
                algorithm: info.algorithm,
                seed: info.seed,
                tol_opt: info.tol_opt,
                tol_origin: info.tol_origin,
                iterations: info.iterations,
                basis_changes: info.basis_changes,
                scans: info.scans,
                soft: info.soft.clone(),
                created,
            },
        }
    }

    pub fn to_model(&self) -> anyhow::Result<MulticlassModel> {
        ensure!(
            self.version == FORMAT_VERSION,
            "unsupported model format version {} (expected {FORMAT_VERSION})",
            self.version
        );
        ensure!(
            self.labels.len() == self.k,
            "{} labels for k = {}",
            self.labels.len(),
            self.k
        );
        ensure!(
            self.halfspaces.len() == self.k,
            "{} half-spaces for k = {}",
            self.halfspaces.len(),
            self.k
        );
        ensure!(
            self.supports.len() == self.k,
            "{} support sets for k = {}",
            self.supports.len(),
            self.k
        );
        for h in &self.halfspaces {
            if let Some(h) = h.halfspace() {
                ensure!(
                    h.normal.len() == self.d,
                    "half-space normal of length {} for d = {}",
                    h.normal.len(),
                    self.d
                );
            }
        }
        let frame = SimplexFrame::from_vectors(self.frame.clone())?;
        if frame.k() != self.k {
            bail!("frame has {} vectors for k = {}", frame.k(), self.k);
        }
        let lifted = LiftedHalfSpace::from_parts(self.d, self.k, self.m.clone(), self.lambda)?;
        let t = &self.training;
        Ok(MulticlassModel {
            kind: self.kind,
            frame,
            lifted,
            halfspaces: self.halfspaces.clone(),
            supports: self.supports.clone(),
            lifted_margin: self.lifted_margin,
            closest_point_norm: self.closest_point_norm,
            info: TrainingInfo {
                algorithm: t.algorithm,
                seed: t.seed,
                tol_opt: t.tol_opt,
                tol_origin: t.tol_origin,
                iterations: t.iterations,
                basis_changes: t.basis_changes,
                scans: t.scans,
                soft: t.soft.clone(),
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model files serialize");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json())
            .with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a valid model file", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsvm_core::{train_tsvm_deterministic, LabeledDataset};

    fn model() -> MulticlassModel {
        let ds = LabeledDataset::new(vec![
            vec![vec![0.1, 0.0], vec![0.0, 1.0 / 3.0]],
            vec![vec![3.0, 0.7], vec![2.9, 1.1]],
            vec![vec![1.3, 4.0]],
        ])
        .unwrap();
        train_tsvm_deterministic(&ds).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let f = ModelFile::from_model(&m, &labels);
        let back: ModelFile = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_model().unwrap(), m);
        assert_eq!(back.to_json(), f.to_json());
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let f = ModelFile::from_model(&model(), &["a", "b", "c"].map(String::from));
        let mut v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        v["future"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ModelFile>(v.clone()).is_err());
        v.as_object_mut().unwrap().remove("future");
        v["version"] = serde_json::json!(2);
        let g: ModelFile = serde_json::from_value(v).unwrap();
        assert!(g.to_model().is_err());
    }
}
