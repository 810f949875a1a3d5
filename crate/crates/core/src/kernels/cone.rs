//! Projection onto a polyhedral cone `{w : ⟨w, c_j⟩ ≥ 0}`.
//!
//! By Moreau's decomposition `p = Π_C(p) + Π_{C°}(p)`, and the polar cone is
//! generated by the `−c_j`. Projecting onto the polar cone is a nonnegative
//! least-squares problem `min_{μ ≥ 0} ‖p + Σ μ_j c_j‖`, solved here with the
//! Lawson–Hanson active-set method. The residual is the projection onto `C`.

use crate::error::{invalid, Result, TsvmError};
use crate::linalg::{axpy, dot, is_finite, least_squares, norm, sub};

fn nnls_residual(p: &[f64], gens: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    let n = gens.len();
    let mut mu = vec![0.0; n];
    let mut passive: Vec<usize> = Vec::new();
    let mut resid = p.to_vec();
    let cap = 30 * (n + p.len()) + 100;
    let mut iters = 0;

    loop {
        // Negative gradient of ½‖p + Cμ‖² is −Cᵀ(p + Cμ).
        let mut best = None;
        let mut best_val = tol;
        for j in 0..n {
            if passive.contains(&j) {
                continue;
            }
            let g = -dot(&gens[j], &resid);
            if g > best_val {
                best_val = g;
                best = Some(j);
            }
        }
        let Some(t) = best else { break };
        passive.push(t);

        loop {
            iters += 1;
            if iters > cap {
                return Err(TsvmError::ConvergenceFailure {
                    iterations: iters,
                    residual: best_val,
                    best: resid,
                });
            }
            let cols: Vec<Vec<f64>> = passive.iter().map(|&j| gens[j].clone()).collect();
            let neg_p: Vec<f64> = p.iter().map(|x| -x).collect();
            let Some(z) = least_squares(&cols, &neg_p) else {
                // Dependent column: it adds nothing to the span.
                passive.pop();
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                for (&j, &v) in passive.iter().zip(&z) {
                    mu[j] = v;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&j, &v) in passive.iter().zip(&z) {
                if v <= 0.0 {
                    let denom = mu[j] - v;
                    if denom > 0.0 {
                        alpha = alpha.min(mu[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (&j, &v) in passive.iter().zip(&z) {
                mu[j] += alpha * (v - mu[j]);
            }
            passive.retain(|&j| {
                if mu[j] <= 1e-15 {
                    mu[j] = 0.0;
                    false
                } else {
                    true
                }
            });
            if passive.is_empty() {
                break;
            }
        }

        resid = p.to_vec();
        for (j, g) in gens.iter().enumerate() {
            if mu[j] != 0.0 {
                axpy(mu[j], g, &mut resid);
            }
        }
    }
    Ok(resid)
}

/// Nearest point of `{w : ⟨w, c_j⟩ ≥ 0 ∀j}` to `p`.
pub fn project_onto_cone(p: &[f64], cone_generators: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    if !is_finite(p) {
        return invalid("point is not finite");
    }
    for c in cone_generators {
        if c.len() != p.len() || !is_finite(c) {
            return invalid("cone constraint has the wrong size or is not finite");
        }
    }
    let scale = cone_generators
        .iter()
        .map(|c| norm(c))
        .fold(norm(p), f64::max)
        .max(1.0);
    let inner = 1e-13 * scale * scale;
    let w = nnls_residual(p, cone_generators, inner)?;
    let worst = cone_generators
        .iter()
        .map(|c| -dot(&w, c))
        .fold(0.0f64, f64::max);
    if worst > tol.max(inner) {
        return Err(TsvmError::ConvergenceFailure {
            iterations: 0,
            residual: worst,
            best: w,
        });
    }
    Ok(w)
}

/// Unit normal `w` and offset `⟨w, p⟩` of the supporting half-space of
/// `conv(points)` at `p` that lies farthest from the origin.
pub fn max_distance_supporting_halfspace(
    p: &[f64],
    points: &[Vec<f64>],
) -> Result<(Vec<f64>, f64)> {
    if points.is_empty() {
        return invalid("no points given");
    }
    let scale = points.iter().map(|y| norm(y)).fold(norm(p), f64::max);
    let cons: Vec<Vec<f64>> = points.iter().map(|y| sub(y, p)).collect();
    let w = project_onto_cone(p, &cons, 1e-9 * (1.0 + scale))?;
    let n = norm(&w);
    if n <= 1e-12 * (1.0 + scale) {
        return Err(TsvmError::NoPositiveMargin);
    }
    let w: Vec<f64> = w.iter().map(|x| x / n).collect();
    let offset = dot(&w, p);
    if offset <= 0.0 {
        return Err(TsvmError::NoPositiveMargin);
    }
    Ok((w, offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn already_inside() {
        let w = project_onto_cone(&[2.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-12).unwrap();
        assert_eq!(w, vec![2.0, 1.0]);
    }

    #[test]
    fn clamps_one_coordinate() {
        let w = project_onto_cone(&[-1.0, 2.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-12).unwrap();
        assert_abs_diff_eq!(w[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn idempotent() {
        let cons = vec![
            vec![1.0, 2.0, -1.0],
            vec![-0.5, 1.0, 0.3],
            vec![0.2, -1.0, 1.0],
        ];
        let w = project_onto_cone(&[-3.0, 0.5, 2.0], &cons, 1e-12).unwrap();
        let w2 = project_onto_cone(&w, &cons, 1e-12).unwrap();
        for (a, b) in w.iter().zip(&w2) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn segment_supporting_normal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (w, off) =
            max_distance_supporting_halfspace(&[-1.0, 0.0], &[vec![0.0, 1.0], vec![-2.0, -1.0]])
                .unwrap();
        assert_abs_diff_eq!(w[0], -s, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], s, epsilon = 1e-12);
        assert_abs_diff_eq!(off, s, epsilon = 1e-12);
    }

    #[test]
    fn square_vertex() {
        let pts = vec![
            vec![3.0, 3.0],
            vec![4.0, 3.0],
            vec![3.0, 4.0],
            vec![4.0, 4.0],
        ];
        let (w, off) = max_distance_supporting_halfspace(&[3.0, 3.0], &pts).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(w[0], s, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], s, epsilon = 1e-12);
        assert_abs_diff_eq!(off, 18f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn origin_point_has_no_margin() {
        let r = max_distance_supporting_halfspace(&[0.0, 0.0], &[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert!(matches!(r, Err(TsvmError::NoPositiveMargin)));
    }
}
