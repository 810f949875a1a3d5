//! Two-class linear SVMs: hard margin through the Minkowski difference,
//! soft margin through the box-constrained dual.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TsvmError};
use crate::kernels::{
    default_tol_opt, hulls_intersect, solve_dual, tol_origin, wolfe, DualProblem, TupleOracle,
};
use crate::linalg::{dot, is_finite, norm};

/// Separator `⟨w, x⟩ = b` with class A on the positive side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub margin: f64,
    pub positive_supports: Vec<usize>,
    pub negative_supports: Vec<usize>,
}

impl BinarySvmModel {
    /// Signed distance to the separating hyperplane.
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// Soft-margin fit and its diagnostics.
#[derive(Debug, Clone)]
pub struct SoftMarginFit {
    pub model: BinarySvmModel,
    /// `½‖w‖² + C Σ ξ` in the unnormalized primal.
    pub objective: f64,
    /// Points with positive slack.
    pub violations: usize,
    pub dual_gap: f64,
    pub iterations: usize,
}

fn check_sets(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return invalid("both point sets must be nonempty");
    }
    let d = a[0].len();
    if d == 0 {
        return invalid("points must have at least one coordinate");
    }
    for p in a.iter().chain(b) {
        if p.len() != d || !is_finite(p) {
            return invalid("points must be finite and share one dimension");
        }
    }
    Ok(d)
}

const SIGNS: [[f64; 1]; 2] = [[1.0], [-1.0]];

fn sign_frame() -> Vec<Vec<f64>> {
    SIGNS.iter().map(|s| s.to_vec()).collect()
}

/// Maximum-margin separator of two sets with disjoint hulls.
pub fn train_hard_margin(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<BinarySvmModel> {
    check_sets(a, b)?;
    let frame = sign_frame();
    let oracle = TupleOracle::new(
        vec![
            a.iter().map(Vec::as_slice).collect(),
            b.iter().map(Vec::as_slice).collect(),
        ],
        &frame,
        1.0,
    );
    let scale = crate::kernels::VertexOracle::scale(&oracle);
    let sol = wolfe(&oracle, default_tol_opt(scale))?;
    let n = norm(&sol.point);
    if sol.reached_origin || n <= tol_origin(scale) {
        let v = hulls_intersect(&[a, b])?;
        return Err(TsvmError::NotSeparable {
            witness: v.witness.unwrap_or_default(),
        });
    }
    let w: Vec<f64> = sol.point.iter().map(|x| x / n).collect();
    Ok(assemble(a, b, w, n / 2.0))
}

fn assemble(a: &[Vec<f64>], b: &[Vec<f64>], w: Vec<f64>, margin: f64) -> BinarySvmModel {
    let min_a = a.iter().map(|x| dot(&w, x)).fold(f64::INFINITY, f64::min);
    let max_b = b
        .iter()
        .map(|x| dot(&w, x))
        .fold(f64::NEG_INFINITY, f64::max);
    let offset = 0.5 * (min_a + max_b);
    let tol = 1e-7 * (1.0 + margin);
    let positive_supports = (0..a.len())
        .filter(|&i| dot(&w, &a[i]) - offset <= margin + tol)
        .collect();
    let negative_supports = (0..b.len())
        .filter(|&i| offset - dot(&w, &b[i]) <= margin + tol)
        .collect();
    BinarySvmModel {
        normal: w,
        offset,
        margin,
        positive_supports,
        negative_supports,
    }
}

/// `min ½‖w‖² + C Σ hinge` over hyperplanes `⟨w, x⟩ + ρ = 0`.
pub fn train_soft_margin(a: &[Vec<f64>], b: &[Vec<f64>], c: f64) -> Result<SoftMarginFit> {
    let d = check_sets(a, b)?;
    if !(c > 0.0) || !c.is_finite() {
        return invalid("penalty C must be positive and finite");
    }
    let features: Vec<Vec<f64>> = a
        .iter()
        .cloned()
        .chain(b.iter().map(|x| x.iter().map(|v| -v).collect()))
        .collect();
    let group: Vec<usize> = (0..a.len())
        .map(|_| 0)
        .chain((0..b.len()).map(|_| 1))
        .collect();
    let problem = DualProblem {
        features: &features,
        group: &group,
        groups: 2,
        coupled: true,
        c,
    };
    let cap = 200_000 + 2000 * features.len();
    let mut tol = 1e-9;
    let mut sol = solve_dual(&problem, tol, cap);
    let (mut objective, mut rho, mut gap);
    loop {
        let w = &sol.w;
        rho = best_bias(a, b, w, c, -sol.mu[0]);
        objective = primal(a, b, w, rho, c);
        let dual = sol.alpha.iter().sum::<f64>() - 0.5 * dot(w, w);
        gap = objective - dual;
        if gap <= 1e-8 * objective.max(1.0) || tol < 1e-15 || !sol.converged {
            break;
        }
        tol *= 0.01;
        sol = solve_dual(&problem, tol, cap);
    }
    if !sol.converged {
        log::warn!("soft-margin dual stopped at the iteration cap (gap {gap:e})");
    }

    let w = &sol.w;
    let wn = norm(w);
    let (normal, offset, margin) = if wn > 1e-300 {
        (w.iter().map(|x| x / wn).collect(), -rho / wn, 1.0 / wn)
    } else {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        (e, 0.0, 0.0)
    };
    let slack = |s: f64| s > 1e-8;
    let violations = a.iter().filter(|x| slack(1.0 - dot(w, x) - rho)).count()
        + b.iter().filter(|x| slack(1.0 + dot(w, x) + rho)).count();
    let positive_supports = (0..a.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let negative_supports = (0..b.len())
        .filter(|&i| sol.alpha[a.len() + i] > 0.0)
        .collect();
    Ok(SoftMarginFit {
        model: BinarySvmModel {
            normal,
            offset,
            margin,
            positive_supports,
            negative_supports,
        },
        objective,
        violations,
        dual_gap: gap,
        iterations: sol.iterations,
    })
}

fn primal(a: &[Vec<f64>], b: &[Vec<f64>], w: &[f64], rho: f64, c: f64) -> f64 {
    let hinge: f64 = a
        .iter()
        .map(|x| (1.0 - dot(w, x) - rho).max(0.0))
        .chain(b.iter().map(|x| (1.0 + dot(w, x) + rho).max(0.0)))
        .sum();
    0.5 * dot(w, w) + c * hinge
}

/// Bias minimizing the hinge sum for fixed `w`: the minimum of a convex
/// piecewise-linear function lies at the dual guess or at a breakpoint.
fn best_bias(a: &[Vec<f64>], b: &[Vec<f64>], w: &[f64], c: f64, guess: f64) -> f64 {
    let mut best = (primal(a, b, w, guess, c), guess);
    let candidates = a
        .iter()
        .map(|x| 1.0 - dot(w, x))
        .chain(b.iter().map(|x| -1.0 - dot(w, x)));
    for r in candidates {
        let v = primal(a, b, w, r, c);
        if v < best.0 {
            best = (v, r);
        }
    }
    best.1
}

/// Project the supports of the maximum-margin separator onto it and test
/// whether the two projected hulls meet.
pub fn check_projection_theorem(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<bool> {
    let model = train_hard_margin(a, b)?;
    let project = |x: &Vec<f64>| -> Vec<f64> {
        let s = model.decision(x);
        x.iter()
            .zip(&model.normal)
            .map(|(xi, wi)| xi - s * wi)
            .collect()
    };
    let pa: Vec<Vec<f64>> = model
        .positive_supports
        .iter()
        .map(|&i| project(&a[i]))
        .collect();
    let pb: Vec<Vec<f64>> = model
        .negative_supports
        .iter()
        .map(|&i| project(&b[i]))
        .collect();
    Ok(hulls_intersect(&[&pa, &pb])?.feasible)
}
