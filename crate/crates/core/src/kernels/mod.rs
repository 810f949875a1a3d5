//! Numerical kernels shared by every trainer.

mod caratheodory;
mod cone;
mod dual;
mod lp;
mod wolfe;

pub use caratheodory::caratheodory_reduce;
pub use cone::{max_distance_supporting_halfspace, project_onto_cone};
pub use dual::{solve_dual, DualProblem, DualSolution};
pub use lp::{
    halfspace_intersection_feasible, hulls_intersect, hulls_jointly_intersect, phase_one,
    worst_violation, FeasibilityVerdict,
};
pub use wolfe::{
    default_tol_opt, tol_origin, wolfe, PointSet, TupleOracle, VertexOracle, WolfeSolution,
};

use crate::error::Result;
use crate::linalg::{axpy, dot, norm, norm_sq};

/// A minimum-norm point together with the convex combination that produces it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPointCertificate {
    pub point: Vec<f64>,
    /// `(generator index, weight)`, sorted by index, weights positive.
    pub coefficients: Vec<(usize, f64)>,
    pub norm: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl ClosestPointCertificate {
    /// Largest violation of the certificate invariants against `generators`:
    /// weight sum, recombination error, and the Wolfe optimality gap.
    pub fn residuals(&self, generators: &[Vec<f64>]) -> (f64, f64, f64) {
        let sum: f64 = self.coefficients.iter().map(|c| c.1).sum();
        let mut x = vec![0.0; self.point.len()];
        for &(j, w) in &self.coefficients {
            axpy(w, &generators[j], &mut x);
        }
        let recomb = norm(&crate::linalg::sub(&x, &self.point));
        let pp = norm_sq(&self.point);
        let worst = generators
            .iter()
            .map(|y| pp - dot(&self.point, y))
            .fold(f64::NEG_INFINITY, f64::max);
        ((sum - 1.0).abs(), recomb, worst)
    }
}

/// Minimum-norm point of `conv(generators)` with its certificate.
pub fn min_norm_point(generators: &[Vec<f64>], tol_opt: f64) -> Result<ClosestPointCertificate> {
    let set = PointSet::new(generators)?;
    let sol = wolfe(&set, tol_opt)?;
    let mut coefficients: Vec<(usize, f64)> = sol.corral.iter().map(|(k, _, w)| (*k, *w)).collect();
    coefficients.sort_by_key(|c| c.0);
    Ok(ClosestPointCertificate {
        norm: norm(&sol.point),
        point: sol.point,
        coefficients,
        gap: sol.gap,
        iterations: sol.iterations,
    })
}

/// `min_norm_point` with the default band for the given generators.
pub fn min_norm_point_default(generators: &[Vec<f64>]) -> Result<ClosestPointCertificate> {
    let scale = generators.iter().map(|g| norm(g)).fold(0.0, f64::max);
    min_norm_point(generators, default_tol_opt(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::TsvmError;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_unit_vectors() {
        let c = min_norm_point_default(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(c.point[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.point[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.norm, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_eq!(c.coefficients.len(), 2);
        assert_abs_diff_eq!(c.coefficients[0].1, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn nearest_on_first_edge() {
        let g = [vec![1.0, 1.0], vec![1.0, -1.0], vec![3.0, 0.0]];
        let c = min_norm_point_default(&g).unwrap();
        assert_abs_diff_eq!(c.point[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.point[1], 0.0, epsilon = 1e-14);
        let idx: Vec<usize> = c.coefficients.iter().map(|x| x.0).collect();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn origin_inside() {
        let g = [vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let c = min_norm_point_default(&g).unwrap();
        assert!(c.norm <= tol_origin(2f64.sqrt()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            min_norm_point_default(&[]),
            Err(TsvmError::InvalidArgument(_))
        ));
        assert!(min_norm_point_default(&[vec![f64::NAN]]).is_err());
        assert!(min_norm_point(&[vec![1.0]], 0.0).is_err());
    }

    #[test]
    fn certificate_invariants_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=25);
            let shift: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
            let g: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|j| shift[j] + rng.random_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let c = min_norm_point_default(&g).unwrap();
            let (sum, recomb, worst) = c.residuals(&g);
            assert!(sum <= 1e-10 && recomb <= 1e-9, "{sum} {recomb}");
            assert!(worst <= default_tol_opt(10.0));
            assert!(c.coefficients.len() <= m + 1);
            assert!(c.coefficients.iter().all(|x| x.1 > 0.0));
        }
    }
}
