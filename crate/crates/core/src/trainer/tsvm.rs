//! The barycenter model: closest point of `R ∩ conv(Y)` and the half-space
//! through it that keeps the full distance inside `R`.
//!
//! The barycenters of one-point-per-class tuples span the polytope, and
//! linear minimization over them splits into one independent minimization
//! per class, so Wolfe's method runs without enumerating the product.

use crate::error::Result;
use crate::geometry::{
    build_simplex_frame, outer_lift, LabeledDataset, LiftedHalfSpace, SimplexFrame,
};
use crate::kernels::{
    caratheodory_reduce, default_tol_opt, phase_one, tol_origin, wolfe, TupleOracle, VertexOracle,
};
use crate::linalg::{norm, norm_sq};

use super::simple::not_trainable;
use super::{apply, assemble_functional, Algorithm, ModelKind, MulticlassModel, TrainingInfo};

/// Closest point and supports for the classes restricted to `active`.
#[derive(Debug, Clone)]
pub(crate) struct TsvmSolution {
    /// `P`, row-major `d×(k−1)`.
    pub p: Vec<f64>,
    /// `min_{x ∈ A_i} ⟨P v_i, x⟩`.
    pub minima: Vec<f64>,
    /// Dataset indices per class.
    pub supports: Vec<Vec<usize>>,
    /// Frobenius norm of the raw functional `[P ; r]`.
    pub w_norm: f64,
    pub iterations: usize,
    pub tol_opt: f64,
    pub tol_origin: f64,
}

impl TsvmSolution {
    pub fn norm(&self) -> f64 {
        norm(&self.p)
    }

    pub fn rho(&self) -> Vec<f64> {
        let pp = norm_sq(&self.p);
        self.minima.iter().map(|m| pp - m).collect()
    }

    pub fn functional(&self, frame: &SimplexFrame) -> Vec<f64> {
        assemble_functional(&self.p, &self.rho(), frame)
    }
}

pub(crate) fn solve_tsvm(
    dataset: &LabeledDataset,
    frame: &SimplexFrame,
    active: &[Vec<usize>],
    tol_opt: Option<f64>,
) -> Result<TsvmSolution> {
    let k = dataset.k();
    let classes: Vec<Vec<&[f64]>> = active
        .iter()
        .enumerate()
        .map(|(i, idx)| {
            idx.iter()
                .map(|&j| dataset.class(i)[j].as_slice())
                .collect()
        })
        .collect();
    let oracle = TupleOracle::new(classes, frame.vectors(), 1.0 / k as f64);
    let classes = oracle.classes();
    let scale = oracle.scale();
    let tol_opt = tol_opt.unwrap_or_else(|| default_tol_opt(scale));
    let t_origin = tol_origin(scale);
    let sol = wolfe(&oracle, tol_opt)?;
    let pn = norm(&sol.point);
    if sol.reached_origin || pn <= t_origin {
        let sub = dataset.subset(active)?;
        return Err(not_trainable(&sub, pn));
    }
    let minima: Vec<f64> = oracle
        .class_minima(&sol.point)
        .iter()
        .map(|m| m.1)
        .collect();

    // Tuple weights become point weights α_x = Σ_{t ∋ x} w_t / k; the lifted
    // combination Σ α_x S(x) equals p with a zero last row.
    let mut alpha: Vec<Vec<f64>> = active.iter().map(|a| vec![0.0; a.len()]).collect();
    for (key, _, w) in &sol.corral {
        for (i, &j) in key.iter().enumerate() {
            alpha[i][j] += w / k as f64;
        }
    }
    let mut owners = Vec::new();
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    for (i, a) in alpha.iter().enumerate() {
        for (j, &w) in a.iter().enumerate() {
            if w > 0.0 {
                owners.push((i, j));
                pts.push(outer_lift(classes[i][j], frame.vector(i)));
                weights.push(w);
            }
        }
    }
    let reduced = caratheodory_reduce(&pts, &weights, 1e-9);
    let mut target = vec![0.0; pts.first().map_or(0, Vec::len)];
    for (y, &w) in pts.iter().zip(&reduced) {
        crate::linalg::axpy(w, y, &mut target);
    }

    // Every tight point, in (class, index) order, with the reduced
    // certificate as the starting solution.
    let mut tight = Vec::new();
    let mut lifts = Vec::new();
    let mut start = Vec::new();
    for (i, pts_i) in classes.iter().enumerate() {
        let u = apply(&sol.point, frame.vector(i));
        let reach = norm(&sol.point) * norm(frame.vector(i));
        for j in tight_points(pts_i, &u, reach) {
            let w = owners
                .iter()
                .zip(&reduced)
                .find(|(o, _)| **o == (i, j))
                .map_or(0.0, |(_, &w)| w);
            tight.push((i, j));
            lifts.push(outer_lift(classes[i][j], frame.vector(i)));
            start.push(w);
        }
    }
    for (o, &w) in owners.iter().zip(&reduced) {
        if w > 0.0 && !tight.contains(o) {
            tight.push(*o);
            lifts.push(outer_lift(classes[o.0][o.1], frame.vector(o.0)));
            start.push(w);
        }
    }
    // Without extra tight points the certificate is already determined by
    // the (translation invariant) barycenter problem.
    let kept = if start.iter().all(|&w| w > 0.0) {
        vec![true; start.len()]
    } else {
        canonical_certificate(&lifts, &target, start)?
    };
    let mut supports = vec![Vec::new(); k];
    for ((c, j), keep) in tight.into_iter().zip(kept) {
        if keep {
            supports[c].push(active[c][j]);
        }
    }
    supports.iter_mut().for_each(|s| s.sort_unstable());
    let bound = (dataset.d() + 1) * (k - 1);
    let count: usize = supports.iter().map(Vec::len).sum();
    if count > bound {
        log::warn!("support reduction left {count} points, above the bound {bound}");
    }

    let mut out = TsvmSolution {
        p: sol.point,
        minima,
        supports,
        w_norm: 0.0,
        iterations: sol.iterations,
        tol_opt,
        tol_origin: t_origin,
    };
    out.w_norm = norm(&out.functional(frame));
    Ok(out)
}

/// Indices whose value `⟨u, x⟩` is within a relative band of the class
/// minimum. Values are taken relative to the first point so a translation of
/// the class cannot move a point in or out of the band. `reach` bounds `‖u‖`
/// and sets the band, so a `u` that is zero up to rounding ties everything.
fn tight_points(pts: &[&[f64]], u: &[f64], reach: f64) -> Vec<usize> {
    let base = pts[0];
    let rel: Vec<f64> = pts
        .iter()
        .map(|x| {
            x.iter()
                .zip(base)
                .zip(u)
                .map(|((a, b), w)| (a - b) * w)
                .sum()
        })
        .collect();
    let min = rel.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = pts
        .iter()
        .map(|x| norm(&crate::linalg::sub(x, base)))
        .fold(0.0, f64::max);
    let band = 1e-9 * reach * spread;
    (0..pts.len()).filter(|&j| rel[j] <= min + band).collect()
}

/// Which lifted points to keep so that the certificate depends only on the
/// tight set. Points are dropped from the last one down whenever `target`
/// stays in the cone of the rest; a point with zero weight in the current
/// solution goes without a test. Each test is a linear feasibility question,
/// and translating the data maps every lift by one invertible linear map
/// that fixes `target`, so the kept set does not move with the data.
fn canonical_certificate(lifts: &[Vec<f64>], target: &[f64], start: Vec<f64>) -> Result<Vec<bool>> {
    let n = lifts.len();
    let mut keep = vec![true; n];
    let mut z = start;
    for c in (0..n).rev() {
        if z[c] <= 0.0 {
            keep[c] = false;
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|&j| keep[j] && j != c).collect();
        if rest.is_empty() {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..target.len())
            .map(|r| rest.iter().map(|&j| lifts[j][r]).collect())
            .collect();
        let (sol, gap) = phase_one(&rows, target)?;
        if gap <= 1e-9 {
            keep[c] = false;
            z = vec![0.0; n];
            for (&j, w) in rest.iter().zip(sol) {
                z[j] = w;
            }
        }
    }
    Ok(keep)
}

/// Per-class values `⟨P v_i, x⟩` at class `c`.
pub(crate) fn class_value(sol: &TsvmSolution, frame: &SimplexFrame, c: usize, x: &[f64]) -> f64 {
    crate::linalg::dot(&apply(&sol.p, frame.vector(c)), x)
}

pub(crate) fn model_from_solution(
    dataset: &LabeledDataset,
    frame: SimplexFrame,
    sol: &TsvmSolution,
    info: TrainingInfo,
) -> Result<MulticlassModel> {
    let w = sol.functional(&frame);
    let h = LiftedHalfSpace::from_functional(dataset.d(), dataset.k(), &w, norm_sq(&sol.p))?;
    MulticlassModel::new(
        ModelKind::Tsvm,
        frame,
        h,
        sol.supports.clone(),
        sol.norm(),
        info,
    )
}

/// Deterministic training via the implicit barycenter polytope.
pub fn train_tsvm_deterministic(dataset: &LabeledDataset) -> Result<MulticlassModel> {
    train_deterministic_with(dataset, None)
}

pub(crate) fn train_deterministic_with(
    dataset: &LabeledDataset,
    tol_opt: Option<f64>,
) -> Result<MulticlassModel> {
    let frame = build_simplex_frame(dataset.k())?;
    let all: Vec<Vec<usize>> = dataset
        .classes()
        .iter()
        .map(|c| (0..c.len()).collect())
        .collect();
    let sol = solve_tsvm(dataset, &frame, &all, tol_opt)?;
    let mut info = TrainingInfo::new(Algorithm::Deterministic, sol.tol_opt, sol.tol_origin);
    info.iterations = sol.iterations;
    model_from_solution(dataset, frame, &sol, info)
}
