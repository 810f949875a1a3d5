//! Small dense vector helpers shared by the kernels.
//!
//! Everything here works on plain `&[f64]` slices; problem sizes are at
//! desk scale (dimensions in the tens, a few hundred columns at most).

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// y += a * x
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Least-squares solution of `min ‖A x − b‖` by Householder QR, where `A`
/// is given by its columns. Returns `None` when `A` is numerically rank
/// deficient.
pub fn least_squares(columns: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = columns.len();
    let rows = b.len();
    if n == 0 || n > rows {
        return None;
    }
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut rhs = b.to_vec();
    let scale = a.iter().map(|c| norm(c)).fold(0.0f64, f64::max).max(1e-300);
    let mut diag = vec![0.0; n];

    for j in 0..n {
        let col_norm = norm(&a[j][j..]);
        if col_norm <= 1e-13 * scale {
            return None;
        }
        let alpha = if a[j][j] > 0.0 { -col_norm } else { col_norm };
        let mut v = a[j][j..].to_vec();
        v[0] -= alpha;
        let v_norm_sq = norm_sq(&v);
        diag[j] = alpha;
        if v_norm_sq > 0.0 {
            for col in a.iter_mut().skip(j + 1) {
                let f = 2.0 * dot(&v, &col[j..]) / v_norm_sq;
                axpy(-f, &v, &mut col[j..]);
            }
            let f = 2.0 * dot(&v, &rhs[j..]) / v_norm_sq;
            axpy(-f, &v, &mut rhs[j..]);
        }
    }

    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let mut s = rhs[j];
        for (l, col) in a.iter().enumerate().skip(j + 1) {
            s -= col[j] * x[l];
        }
        x[j] = s / diag[j];
    }
    Some(x)
}

/// A nonzero vector `β` with `Σ_j β_j c_j = 0`, or `None` when the columns are
/// linearly independent up to `rel_tol`.
///
/// Gaussian elimination with partial pivoting; the first free column gets
/// coefficient one.
pub fn null_vector(columns: &[Vec<f64>], rel_tol: f64) -> Option<Vec<f64>> {
    let n = columns.len();
    if n == 0 {
        return None;
    }
    let rows = columns[0].len();
    // Row-major working copy.
    let mut m: Vec<Vec<f64>> = (0..rows)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    let tol = rel_tol * scale;

    // Elimination stops at the first column without a pivot, so the pivot
    // row always equals the column.
    let mut pivot_cols = Vec::new();
    let mut free = None;
    for col in 0..n {
        let row = col;
        if row == rows {
            free = Some(col);
            break;
        }
        let (best, best_val) = (row..rows)
            .map(|r| (r, m[r][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            free = Some(col);
            break;
        }
        m.swap(row, best);
        let p = m[row][col];
        for r in 0..rows {
            if r != row {
                let f = m[r][col] / p;
                if f != 0.0 {
                    for c in col..n {
                        m[r][c] -= f * m[row][c];
                    }
                }
            }
        }
        pivot_cols.push((row, col));
    }
    let free = free?;
    let mut beta = vec![0.0; n];
    beta[free] = 1.0;
    for &(r, c) in &pivot_cols {
        beta[c] = -m[r][free] / m[r][c];
    }
    Some(beta)
}

/// Solve a small square system by Gaussian elimination with partial pivoting.
pub fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let best = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[best][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, best);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_system() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        let x = least_squares(&cols, &[3.0, 2.0, 0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_rank_deficient() {
        let cols = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(least_squares(&cols, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn null_vector_finds_dependence() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let beta = null_vector(&cols, 1e-12).unwrap();
        for r in 0..2 {
            let s: f64 = cols.iter().zip(&beta).map(|(c, b)| c[r] * b).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(null_vector(&cols[..2], 1e-12).is_none());
    }

    #[test]
    fn solve_square_small() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_square(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }
}
