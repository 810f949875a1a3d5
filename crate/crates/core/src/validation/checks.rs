//! Properties of the models, each run end to end on one instance.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::binary::train_hard_margin;
use crate::error::{invalid, Result};
use crate::geometry::{build_simplex_frame, lift_dataset, ClassRegion, LabeledDataset};
use crate::kernels::{
    halfspace_intersection_feasible, hulls_jointly_intersect, min_norm_point, tol_origin,
};
use crate::linalg::{dot, norm};
use crate::trainer::{train_simple_tsvm, train_tsvm_deterministic, ModelKind, MulticlassModel};

use super::oracles::{binary_qp_oracle, functional_deviation};

pub fn train_hard(dataset: &LabeledDataset, kind: ModelKind) -> Result<MulticlassModel> {
    match kind {
        ModelKind::Simple => train_simple_tsvm(dataset),
        ModelKind::Tsvm => train_tsvm_deterministic(dataset),
    }
}

/// Haar-distributed orthogonal matrix (Gram–Schmidt on a Gaussian matrix).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for r in &rows {
                    let c = dot(&v, r);
                    v.iter_mut().zip(r).for_each(|(a, b)| *a -= c * b);
                }
            }
            let n = norm(&v);
            if n < 1e-6 {
                break;
            }
            v.iter_mut().for_each(|a| *a /= n);
            rows.push(v);
        }
        if rows.len() == d {
            return rows;
        }
    }
}

fn orthogonality_defect(q: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..q.len() {
        for j in 0..q.len() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&q[i], &q[j]) - e).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub kind: ModelKind,
    pub max_normal_deviation: f64,
    pub max_offset_deviation: f64,
}

impl EquivarianceReport {
    pub fn deviation(&self) -> f64 {
        self.max_normal_deviation.max(self.max_offset_deviation)
    }
}

/// Train on `X` and on `QX`; the half-spaces of the second must be the
/// images `{⟨Qw, y⟩ ≥ b}` of the first.
pub fn check_orthogonal_equivariance(
    dataset: &LabeledDataset,
    kind: ModelKind,
    q: &[Vec<f64>],
) -> Result<EquivarianceReport> {
    let d = dataset.d();
    if q.len() != d || q.iter().any(|r| r.len() != d) {
        return invalid("Q must be d×d");
    }
    if orthogonality_defect(q) > 1e-10 {
        return invalid("Q is not orthogonal");
    }
    let base = train_hard(dataset, kind)?;
    let moved = train_hard(&dataset.transformed(q), kind)?;
    let mut report = EquivarianceReport {
        kind,
        max_normal_deviation: 0.0,
        max_offset_deviation: 0.0,
    };
    for (a, b) in base.halfspaces.iter().zip(&moved.halfspaces) {
        let (Some(h), Some(g)) = (a.halfspace(), b.halfspace()) else {
            let dev = a.deviation(b);
            report.max_normal_deviation = report.max_normal_deviation.max(dev);
            continue;
        };
        let qw: Vec<f64> = q.iter().map(|r| dot(r, &h.normal)).collect();
        let dn = qw
            .iter()
            .zip(&g.normal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        report.max_normal_deviation = report.max_normal_deviation.max(dn);
        report.max_offset_deviation = report.max_offset_deviation.max((h.offset - g.offset).abs());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub kind: ModelKind,
    pub supports_before: Vec<Vec<usize>>,
    pub supports_after: Vec<Vec<usize>>,
    pub supports_identical: bool,
    /// Distance between the half-spaces trained on `X + q` and the
    /// translates of those trained on `X`.
    pub geometry_deviation: f64,
    /// Change of the closest-point norm, which a translation-equivariant
    /// model keeps.
    pub distance_change: f64,
}

pub fn check_translation_behavior(
    dataset: &LabeledDataset,
    kind: ModelKind,
    q: &[f64],
) -> Result<TranslationReport> {
    if q.len() != dataset.d() || !q.iter().all(|v| v.is_finite()) {
        return invalid("translation must be a finite d-vector");
    }
    let base = train_hard(dataset, kind)?;
    let moved = train_hard(&dataset.translated(q), kind)?;
    let mut dev = 0.0f64;
    for (a, b) in base.halfspaces.iter().zip(&moved.halfspaces) {
        let (Some(h), Some(g)) = (a.halfspace(), b.halfspace()) else {
            dev = dev.max(a.deviation(b));
            continue;
        };
        let dn = h
            .normal
            .iter()
            .zip(&g.normal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let shifted = h.offset + dot(&h.normal, q);
        dev = dev
            .max(dn)
            .max((shifted - g.offset).abs() / (1.0 + norm(q)));
    }
    Ok(TranslationReport {
        kind,
        supports_identical: base.supports == moved.supports,
        supports_before: base.supports,
        supports_after: moved.supports,
        geometry_deviation: dev,
        distance_change: (base.closest_point_norm - moved.closest_point_norm).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    /// Class `i` against the union of the others.
    pub one_vs_all: Vec<bool>,
    /// `(i, j, separable)` for every pair.
    pub all_vs_all: Vec<(usize, usize, bool)>,
    pub simple_tsvm: bool,
    pub tsvm: bool,
}

impl BaselineReport {
    pub fn one_vs_all_ok(&self) -> bool {
        self.one_vs_all.iter().all(|&b| b)
    }

    pub fn all_vs_all_ok(&self) -> bool {
        self.all_vs_all.iter().all(|t| t.2)
    }
}

/// Which hard-margin approaches train on this dataset.
#[allow(non_snake_case)]
pub fn baseline_1vA_AvA(dataset: &LabeledDataset) -> BaselineReport {
    let k = dataset.k();
    let one_vs_all = (0..k)
        .map(|i| {
            let rest: Vec<Vec<f64>> = (0..k)
                .filter(|&j| j != i)
                .flat_map(|j| dataset.class(j).iter().cloned())
                .collect();
            train_hard_margin(dataset.class(i), &rest).is_ok()
        })
        .collect();
    let mut all_vs_all = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            all_vs_all.push((
                i,
                j,
                train_hard_margin(dataset.class(i), dataset.class(j)).is_ok(),
            ));
        }
    }
    BaselineReport {
        one_vs_all,
        all_vs_all,
        simple_tsvm: train_simple_tsvm(dataset).is_ok(),
        tsvm: train_tsvm_deterministic(dataset).is_ok(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullIntersectionReport {
    pub hulls_intersect: bool,
    pub lifted_min_norm: f64,
    pub tol_origin: f64,
}

impl HullIntersectionReport {
    /// Joint intersection exactly when the lifted hull reaches the origin.
    pub fn consistent(&self) -> bool {
        self.hulls_intersect == (self.lifted_min_norm <= self.tol_origin)
    }
}

pub fn check_hull_intersection(dataset: &LabeledDataset) -> Result<HullIntersectionReport> {
    let frame = build_simplex_frame(dataset.k())?;
    let lifted = lift_dataset(dataset, &frame);
    let scale = lifted.iter().map(|y| norm(y)).fold(0.0, f64::max);
    let cert = min_norm_point(&lifted, crate::kernels::default_tol_opt(scale))?;
    Ok(HullIntersectionReport {
        hulls_intersect: hulls_jointly_intersect(dataset)?.feasible,
        lifted_min_norm: cert.norm,
        tol_origin: tol_origin(scale),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub lambda: f64,
    /// `max λ − g_i(x)` over the training points.
    pub worst_shortfall: f64,
    pub halfspaces_intersect: bool,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.lambda > 0.0 && self.worst_shortfall <= 1e-8 && !self.halfspaces_intersect
    }
}

pub fn check_containment(
    model: &MulticlassModel,
    dataset: &LabeledDataset,
) -> Result<ContainmentReport> {
    let cons: Vec<(Vec<f64>, f64)> = model
        .halfspaces
        .iter()
        .filter_map(|r| r.halfspace())
        .map(|h| (h.normal.clone(), h.offset))
        .collect();
    let any_empty = model.halfspaces.contains(&ClassRegion::Empty);
    let intersect = if any_empty {
        false
    } else if cons.is_empty() {
        true
    } else {
        halfspace_intersection_feasible(&cons, false)?.feasible
    };
    Ok(ContainmentReport {
        lambda: model.lambda(),
        worst_shortfall: model.worst_containment(dataset),
        halfspaces_intersect: intersect,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K2Report {
    /// TSVM half-spaces against the oracle's two support hyperplanes.
    pub boundary_deviation: f64,
    /// `‖p‖` against the binary margin.
    pub margin_deviation: f64,
}

/// Two-class TSVM against the independent hard-margin oracle.
pub fn check_k2_equivalence(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<K2Report> {
    let ds = LabeledDataset::new(vec![a.to_vec(), b.to_vec()])?;
    let model = train_tsvm_deterministic(&ds)?;
    let (w, lo, hi, margin) = binary_qp_oracle(a, b)?;
    let (Some(h0), Some(h1)) = (model.halfspace(0), model.halfspace(1)) else {
        return invalid("two-class model with a trivial half-space");
    };
    let h = [h0, h1];
    // H_1 = {⟨w, x⟩ ≥ lo}, H_2 = {⟨−w, x⟩ ≥ −hi}.
    let mut dev = (h[0].offset - lo).abs().max((h[1].offset + hi).abs());
    for i in 0..w.len() {
        dev = dev
            .max((h[0].normal[i] - w[i]).abs())
            .max((h[1].normal[i] + w[i]).abs());
    }
    Ok(K2Report {
        boundary_deviation: dev,
        margin_deviation: (model.closest_point_norm - margin).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub count: usize,
    pub bound: usize,
    /// Functional and threshold difference after retraining on the supports.
    pub retrain_deviation: f64,
}

impl SupportReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.count <= self.bound && self.retrain_deviation <= tol
    }
}

/// A class without supports still needs one point in the retraining set to
/// keep `k`; any of its points lies in the model's half-space and cannot
/// move the optimum, so the first is used.
pub fn check_supports(model: &MulticlassModel, dataset: &LabeledDataset) -> Result<SupportReport> {
    let keep: Vec<Vec<usize>> = model
        .supports
        .iter()
        .map(|s| if s.is_empty() { vec![0] } else { s.clone() })
        .collect();
    let sub = dataset.subset(&keep)?;
    let again = train_hard(&sub, model.kind)?;
    Ok(SupportReport {
        count: model.support_count(),
        bound: (dataset.d() + 1) * (dataset.k() - 1),
        retrain_deviation: functional_deviation(model, &again),
    })
}
