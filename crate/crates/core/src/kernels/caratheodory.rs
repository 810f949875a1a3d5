use crate::linalg::null_vector;

/// Thin a convex combination `Σ α_j y_j` down to affinely independent points
/// without changing the combined point.
///
/// Each step uses the dependency among the shortest dependent prefix of the
/// active points, which is unique up to scale, and breaks near-ties in the
/// step length towards the highest index. Both choices depend only on the
/// affine structure, so any invertible linear map of the points leads to
/// the same surviving set.
///
/// Returns new weights (same length as `alpha`); entries that were removed
/// are exactly zero.
pub fn caratheodory_reduce(points: &[Vec<f64>], alpha: &[f64], rel_tol: f64) -> Vec<f64> {
    let mut w = alpha.to_vec();
    loop {
        let active: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
        if active.len() <= 1 {
            return w;
        }
        let cols: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| {
                std::iter::once(1.0)
                    .chain(points[j].iter().copied())
                    .collect()
            })
            .collect();
        let Some((len, beta)) = shortest_dependency(&cols, rel_tol) else {
            return w;
        };
        let active = &active[..len];
        // Move along −β until the first weight hits zero; Σβ = 0 keeps the sum.
        let beta: Vec<f64> = if beta.iter().any(|&b| b > 0.0) {
            beta
        } else {
            beta.iter().map(|b| -b).collect()
        };
        let t = active
            .iter()
            .zip(&beta)
            .filter(|(_, &b)| b > 0.0)
            .map(|(&j, &b)| w[j] / b)
            .fold(f64::INFINITY, f64::min);
        let hit = active
            .iter()
            .zip(&beta)
            .rposition(|(&j, &b)| b > 0.0 && w[j] / b <= t * (1.0 + 1e-9))
            .expect("a positive entry exists");
        for (&j, &b) in active.iter().zip(&beta) {
            w[j] = (w[j] - t * b).max(0.0);
        }
        w[active[hit]] = 0.0;
    }
}

/// Null vector of the first `m` columns for the smallest dependent `m`.
fn shortest_dependency(cols: &[Vec<f64>], rel_tol: f64) -> Option<(usize, Vec<f64>)> {
    // Anything longer than the ambient dimension plus one is dependent.
    let cap = cols.len().min(cols[0].len() + 1);
    (2..=cap).find_map(|m| null_vector(&cols[..m], rel_tol).map(|b| (m, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_center_needs_three() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        let w = caratheodory_reduce(&pts, &[0.25; 4], 1e-12);
        let used = w.iter().filter(|&&x| x > 0.0).count();
        assert!(used <= 3);
        let s: f64 = w.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        for r in 0..2 {
            let c: f64 = pts.iter().zip(&w).map(|(p, a)| p[r] * a).sum();
            assert!((c - 0.5).abs() < 1e-12);
        }
    }
}
