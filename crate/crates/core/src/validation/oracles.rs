//! Reference solvers that share no code path with the trainers' Wolfe
//! kernel: accelerated projected gradient over the simplex of weights, with
//! an equality-constrained polish once the support settles.

use crate::error::{invalid, Result, TsvmError};
use crate::geometry::{build_simplex_frame, outer_lift, LabeledDataset, LiftedHalfSpace};
use crate::kernels::caratheodory_reduce;
use crate::linalg::{dot, least_squares, norm, norm_sq, solve_square};
use crate::trainer::{Algorithm, ModelKind, MulticlassModel, TrainingInfo};

/// Euclidean projection onto `{α ≥ 0, Σα = 1}` by sorting.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        acc += ui;
        let t = (acc - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

fn combine(gens: &[Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; gens[0].len()];
    for (g, a) in gens.iter().zip(alpha) {
        if *a != 0.0 {
            p.iter_mut().zip(g).for_each(|(x, y)| *x += a * y);
        }
    }
    p
}

fn fw_gap(gens: &[Vec<f64>], p: &[f64]) -> f64 {
    let m = gens.iter().map(|g| dot(p, g)).fold(f64::INFINITY, f64::min);
    norm_sq(p) - m
}

/// Min-norm solution restricted to the affine hull of the support; `None`
/// if it leaves the simplex.
fn polish(gens: &[Vec<f64>], alpha: &[f64]) -> Option<Vec<f64>> {
    // Thin the support to affinely independent points first, otherwise the
    // KKT matrix is singular (difference sets are dependent by design).
    let s: Vec<usize> = (0..alpha.len()).filter(|&i| alpha[i] > 1e-12).collect();
    let pts: Vec<Vec<f64>> = s.iter().map(|&i| gens[i].clone()).collect();
    let w: Vec<f64> = s.iter().map(|&i| alpha[i]).collect();
    let reduced = caratheodory_reduce(&pts, &w, 1e-10);
    let s: Vec<usize> = s
        .into_iter()
        .zip(reduced)
        .filter(|(_, w)| *w > 0.0)
        .map(|(i, _)| i)
        .collect();
    let n = s.len();
    let mut kkt = vec![vec![0.0; n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            kkt[a][b] = dot(&gens[s[a]], &gens[s[b]]);
        }
        kkt[a][n] = 1.0;
        kkt[n][a] = 1.0;
    }
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    let sol = solve_square(&kkt, &rhs)?;
    if sol[..n].iter().any(|&b| b < -1e-12) {
        return None;
    }
    let mut out = vec![0.0; alpha.len()];
    for (a, &i) in s.iter().enumerate() {
        out[i] = sol[a].max(0.0);
    }
    let t: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= t);
    Some(out)
}

/// Closest point of `conv(generators)` to the origin, with its weights.
pub fn pg_min_norm(generators: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if generators.is_empty() {
        return invalid("no generators");
    }
    let n = generators.len();
    let scale = generators.iter().map(|g| norm(g)).fold(0.0, f64::max);
    let tol = 1e-15 * (1.0 + scale).powi(2);
    // Lipschitz constant of the gradient: ‖G‖₂² by power iteration.
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut l = 0.0;
    for _ in 0..100 {
        let gv = combine(generators, &v);
        let w: Vec<f64> = generators.iter().map(|g| dot(g, &gv)).collect();
        l = norm(&w);
        if l == 0.0 {
            break;
        }
        v = w.iter().map(|x| x / l).collect();
    }
    let step = 1.0 / (1.05 * l).max(1e-300);

    let mut alpha = vec![1.0 / n as f64; n];
    let mut y = alpha.clone();
    let mut t = 1.0f64;
    let max_iter = 2_000_000 / n.max(1) + 20_000;
    for it in 0..max_iter {
        let py = combine(generators, &y);
        let grad: Vec<f64> = generators.iter().map(|g| dot(g, &py)).collect();
        let next = project_simplex(
            &y.iter()
                .zip(&grad)
                .map(|(a, g)| a - step * g)
                .collect::<Vec<_>>(),
        );
        // Gradient-based restart keeps the momentum from oscillating.
        let restart = grad
            .iter()
            .zip(next.iter().zip(&alpha))
            .map(|(g, (a, b))| g * (a - b))
            .sum::<f64>()
            > 0.0;
        let t_next = if restart {
            1.0
        } else {
            (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
        };
        let mom = if restart { 0.0 } else { (t - 1.0) / t_next };
        y = next
            .iter()
            .zip(&alpha)
            .map(|(a, b)| a + mom * (a - b))
            .collect();
        alpha = next;
        t = t_next;

        if it % 50 == 0 {
            let p = combine(generators, &alpha);
            if fw_gap(generators, &p) <= tol {
                return Ok((p, alpha));
            }
            if let Some(beta) = polish(generators, &alpha) {
                let q = combine(generators, &beta);
                if fw_gap(generators, &q) <= tol {
                    return Ok((q, beta));
                }
            }
        }
    }
    let p = combine(generators, &alpha);
    Err(TsvmError::ConvergenceFailure {
        iterations: max_iter,
        residual: fw_gap(generators, &p),
        best: p,
    })
}

/// Hard-margin separator of two sets from the explicit difference set
/// `{a − b}`: returns the unit normal `w` (pointing from B to A), the two
/// support offsets `min_A ⟨w,x⟩` and `max_B ⟨w,x⟩`, and the margin.
pub fn binary_qp_oracle(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(Vec<f64>, f64, f64, f64)> {
    let diffs: Vec<Vec<f64>> = a
        .iter()
        .flat_map(|x| {
            b.iter()
                .map(move |y| x.iter().zip(y).map(|(p, q)| p - q).collect())
        })
        .collect();
    let (p, _) = pg_min_norm(&diffs)?;
    let pn = norm(&p);
    if pn <= 1e-12 {
        return Err(TsvmError::NotSeparable {
            witness: Vec::new(),
        });
    }
    let w: Vec<f64> = p.iter().map(|x| x / pn).collect();
    let lo = a.iter().map(|x| dot(&w, x)).fold(f64::INFINITY, f64::min);
    let hi = b
        .iter()
        .map(|x| dot(&w, x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((w, lo, hi, pn / 2.0))
}

/// Largest instance the brute-force oracle accepts.
pub const BRUTE_FORCE_CAP: (usize, usize, usize) = (3, 3, 12);

/// Barycenter model from the explicit tuple enumeration.
///
/// Every one-point-per-class barycenter is materialized, the closest point
/// comes from the projected-gradient oracle, and the last row of the
/// functional is the least-squares solution of `⟨r, v_i⟩ = ‖p‖² − m_i`.
pub fn brute_force_tsvm(dataset: &LabeledDataset) -> Result<MulticlassModel> {
    let (d, k, n) = (dataset.d(), dataset.k(), dataset.len());
    if d > BRUTE_FORCE_CAP.0 || k > BRUTE_FORCE_CAP.1 || n > BRUTE_FORCE_CAP.2 {
        return Err(TsvmError::TooLarge(format!(
            "brute force handles d ≤ 3, k ≤ 3, n ≤ 12; got d = {d}, k = {k}, n = {n}"
        )));
    }
    let frame = build_simplex_frame(k)?;
    let cols = k - 1;
    let lifted: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|i| {
            dataset
                .class(i)
                .iter()
                .map(|x| outer_lift(x, frame.vector(i))[..d * cols].to_vec())
                .collect()
        })
        .collect();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 0..k {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..dataset.class(i).len()).map(move |j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    let bary: Vec<Vec<f64>> = tuples
        .iter()
        .map(|t| {
            let mut b = vec![0.0; d * cols];
            for (i, &j) in t.iter().enumerate() {
                b.iter_mut()
                    .zip(&lifted[i][j])
                    .for_each(|(x, y)| *x += y / k as f64);
            }
            b
        })
        .collect();
    let (p, weights) = pg_min_norm(&bary)?;
    let pp = norm_sq(&p);
    if pp.sqrt() <= 1e-8 * (1.0 + dataset.scale()) {
        return Err(TsvmError::NotTrainable {
            reason: "barycenter polytope reaches the origin".into(),
            witness: None,
        });
    }
    let rho: Vec<f64> = (0..k)
        .map(|i| {
            let m = lifted[i]
                .iter()
                .map(|y| dot(&p, y))
                .fold(f64::INFINITY, f64::min);
            pp - m
        })
        .collect();
    // Columns of the k×(k−1) system are the coordinates of the v_i.
    let columns: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..k).map(|i| frame.vector(i)[c]).collect())
        .collect();
    let r = least_squares(&columns, &rho)
        .ok_or_else(|| TsvmError::InvalidArgument("singular frame system".into()))?;
    let mut w = p.clone();
    w.extend(r);
    let h = LiftedHalfSpace::from_functional(d, k, &w, pp)?;

    let mut supports = vec![Vec::new(); k];
    for (t, &a) in tuples.iter().zip(&weights) {
        if a > 1e-9 {
            for (i, &j) in t.iter().enumerate() {
                if !supports[i].contains(&j) {
                    supports[i].push(j);
                }
            }
        }
    }
    supports.iter_mut().for_each(|s| s.sort_unstable());
    let info = TrainingInfo::new(Algorithm::Deterministic, 0.0, 0.0);
    MulticlassModel::new(ModelKind::Tsvm, frame, h, supports, pp.sqrt(), info)
}

/// Largest difference between the per-class half-spaces of two models.
pub fn halfspace_deviation(a: &MulticlassModel, b: &MulticlassModel) -> f64 {
    a.halfspaces
        .iter()
        .zip(&b.halfspaces)
        .map(|(x, y)| x.deviation(y))
        .fold(0.0, f64::max)
}

/// Largest entry difference of the normalized functionals and thresholds.
pub fn functional_deviation(a: &MulticlassModel, b: &MulticlassModel) -> f64 {
    let fa = a.lifted.functional();
    let fb = b.lifted.functional();
    fa.iter()
        .zip(&fb)
        .map(|(x, y)| (x - y).abs())
        .fold((a.lambda() - b.lambda()).abs(), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simplex_projection() {
        assert_eq!(project_simplex(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.3, -0.2, 0.9]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn segment() {
        let (p, w) = pg_min_norm(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn binary_toy() {
        let (w, lo, hi, m) = binary_qp_oracle(&[vec![0.0]], &[vec![2.0]]).unwrap();
        assert_abs_diff_eq!(w[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn brute_force_toy() {
        let ds = LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![2.0]]]).unwrap();
        let m = brute_force_tsvm(&ds).unwrap();
        assert_abs_diff_eq!(m.halfspace(0).unwrap().normal[0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.halfspace(0).unwrap().offset, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.halfspace(1).unwrap().normal[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.halfspace(1).unwrap().offset, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn brute_force_symmetric_vertices() {
        // Singletons at the vertices of an equilateral triangle.
        let s = 3f64.sqrt() / 2.0;
        let ds = LabeledDataset::new(vec![
            vec![vec![1.0, 0.0]],
            vec![vec![-0.5, s]],
            vec![vec![-0.5, -s]],
        ])
        .unwrap();
        let m = brute_force_tsvm(&ds).unwrap();
        let offs: Vec<f64> = (0..3).map(|i| m.halfspace(i).unwrap().offset).collect();
        assert!(offs.iter().all(|o| (o - offs[0]).abs() < 1e-9), "{offs:?}");
        let big = LabeledDataset::new(vec![vec![vec![0.0]; 7], vec![vec![1.0]; 7]]).unwrap();
        assert!(matches!(
            brute_force_tsvm(&big),
            Err(TsvmError::TooLarge(_))
        ));
    }
}
