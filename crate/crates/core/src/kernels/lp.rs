//! Dense phase-one simplex method and the feasibility questions built on it.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::LabeledDataset;
use crate::linalg::{axpy, dot, is_finite};

/// Outcome of a feasibility test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub witness: Option<Vec<f64>>,
    /// Optimal phase-one value when infeasible (row-normalized units).
    pub certificate_gap: Option<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

/// Phase one for `{z ≥ 0 : A z = b}` with `A` given by rows.
///
/// Returns the final point and the optimal sum of artificial variables; the
/// system is feasible when that sum is below `1e−9` after each row has been
/// scaled to unit max-norm. Entering and leaving variables follow Bland's
/// rule, so the method cannot cycle.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = a.len();
    if b.len() != m {
        return invalid("row count of A and length of b differ");
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n || !is_finite(r)) || !is_finite(b) {
        return invalid("LP data must be finite with equal row lengths");
    }
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let s = row.iter().fold(bi.abs(), |acc, x| acc.max(x.abs()));
        let s = if s > 0.0 { s } else { 1.0 };
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; width];
        for j in 0..n {
            r[j] = sign * row[j] / s;
        }
        r[n + i] = 1.0;
        r[width - 1] = sign * bi / s;
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective Σ artificials.
    let mut obj = vec![0.0; width];
    for r in &t {
        for j in 0..n {
            obj[j] -= r[j];
        }
        obj[width - 1] -= r[width - 1];
    }

    let cap = 50_000 + 200 * (n + m);
    for _ in 0..cap {
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, r) in t.iter().enumerate() {
            if r[enter] > PIVOT_TOL {
                let ratio = r[width - 1] / r[enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - 1e-15
                            || (ratio <= best_ratio + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        // Phase one is bounded below by zero, so a leaving row always exists
        // unless the column is numerically zero.
        let Some(l) = leave else {
            obj[enter] = 0.0;
            continue;
        };
        let piv = t[l][enter];
        t[l].iter_mut().for_each(|x| *x /= piv);
        let prow = t[l].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != l {
                let f = r[enter];
                if f != 0.0 {
                    axpy(-f, &prow, r);
                }
            }
        }
        let f = obj[enter];
        axpy(-f, &prow, &mut obj);
        basis[l] = enter;
    }

    let mut z = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            z[bv] = t[i][width - 1].max(0.0);
        }
    }
    Ok((z, (-obj[width - 1]).max(0.0)))
}

/// Is `{x : ⟨w_j, x⟩ ≥ b_j ∀j}` nonempty? `strict` asks for slack `1e−9`.
pub fn halfspace_intersection_feasible(
    constraints: &[(Vec<f64>, f64)],
    strict: bool,
) -> Result<FeasibilityVerdict> {
    let Some(first) = constraints.first() else {
        return Ok(FeasibilityVerdict {
            feasible: true,
            witness: None,
            certificate_gap: None,
        });
    };
    let d = first.0.len();
    let m = constraints.len();
    let margin = if strict { 1e-9 } else { 0.0 };
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (j, (w, off)) in constraints.iter().enumerate() {
        if w.len() != d {
            return invalid("constraint normals have mismatched dimensions");
        }
        let mut row = vec![0.0; 2 * d + m];
        for i in 0..d {
            row[i] = w[i];
            row[d + i] = -w[i];
        }
        row[2 * d + j] = -1.0;
        a.push(row);
        b.push(off + margin);
    }
    let (z, gap) = phase_one(&a, &b)?;
    if gap <= FEAS_TOL {
        let x: Vec<f64> = (0..d).map(|i| z[i] - z[d + i]).collect();
        Ok(FeasibilityVerdict {
            feasible: true,
            witness: Some(x),
            certificate_gap: None,
        })
    } else {
        Ok(FeasibilityVerdict {
            feasible: false,
            witness: None,
            certificate_gap: Some(gap),
        })
    }
}

/// Do the convex hulls of the given point sets share a common point?
pub fn hulls_intersect(classes: &[&[Vec<f64>]]) -> Result<FeasibilityVerdict> {
    let k = classes.len();
    if k == 0 || classes.iter().any(|c| c.is_empty()) {
        return invalid("every point set must be nonempty");
    }
    let d = classes[0][0].len();
    let offsets: Vec<usize> = classes
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.len();
            Some(o)
        })
        .collect();
    let n: usize = classes.iter().map(|c| c.len()).sum();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[offsets[i]..offsets[i] + c.len()].fill(1.0);
        a.push(row);
        b.push(1.0);
    }
    for (i, c) in classes.iter().enumerate().skip(1) {
        for r in 0..d {
            let mut row = vec![0.0; n];
            for (j, x) in c.iter().enumerate() {
                row[offsets[i] + j] = x[r];
            }
            for (j, x) in classes[0].iter().enumerate() {
                row[j] = -x[r];
            }
            a.push(row);
            b.push(0.0);
        }
    }
    let (z, gap) = phase_one(&a, &b)?;
    if gap <= FEAS_TOL {
        let mut w = vec![0.0; d];
        let s: f64 = z[..classes[0].len()].iter().sum();
        for (j, x) in classes[0].iter().enumerate() {
            axpy(z[j] / s, x, &mut w);
        }
        Ok(FeasibilityVerdict {
            feasible: true,
            witness: Some(w),
            certificate_gap: None,
        })
    } else {
        Ok(FeasibilityVerdict {
            feasible: false,
            witness: None,
            certificate_gap: Some(gap),
        })
    }
}

/// Is there a point common to the convex hulls of all classes?
pub fn hulls_jointly_intersect(dataset: &LabeledDataset) -> Result<FeasibilityVerdict> {
    let classes: Vec<&[Vec<f64>]> = dataset.classes().iter().map(|c| c.as_slice()).collect();
    hulls_intersect(&classes)
}

/// Largest violation of `⟨w_j, x⟩ ≥ b_j` at `x`.
pub fn worst_violation(constraints: &[(Vec<f64>, f64)], x: &[f64]) -> f64 {
    constraints
        .iter()
        .map(|(w, b)| b - dot(w, x))
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_infeasible() {
        let v =
            halfspace_intersection_feasible(&[(vec![1.0], 1.0), (vec![-1.0], 0.0)], false).unwrap();
        assert!(!v.feasible);
        assert!(v.certificate_gap.unwrap() > 0.0);
    }

    #[test]
    fn one_dimensional_feasible() {
        let c = [(vec![1.0], 0.0)];
        let v = halfspace_intersection_feasible(&c, false).unwrap();
        assert!(v.feasible);
        let x = v.witness.unwrap();
        assert!(worst_violation(&c, &x) <= 1e-8);
        assert!(x[0] >= 0.0);
    }

    #[test]
    fn strict_rejects_touching() {
        let c = [(vec![1.0], 1.0), (vec![-1.0], -1.0)];
        assert!(halfspace_intersection_feasible(&c, false).unwrap().feasible);
        assert!(!halfspace_intersection_feasible(&c, true).unwrap().feasible);
    }

    #[test]
    fn crossing_segments() {
        let ds = LabeledDataset::new(vec![
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            vec![vec![0.0, -1.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        let v = hulls_jointly_intersect(&ds).unwrap();
        assert!(v.feasible);
        let w = v.witness.unwrap();
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);
    }

    #[test]
    fn triangle_edges_disjoint_jointly() {
        let ds = LabeledDataset::new(vec![
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            vec![vec![2.0, 0.0], vec![1.0, 2.0]],
            vec![vec![1.0, 2.0], vec![0.0, 0.0]],
        ])
        .unwrap();
        assert!(!hulls_jointly_intersect(&ds).unwrap().feasible);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let v = hulls_intersect(&[ds.class(i), ds.class(j)]).unwrap();
            assert!(v.feasible);
        }
    }

    #[test]
    fn identical_singletons() {
        let ds = LabeledDataset::new(vec![vec![vec![0.0]]; 3]).unwrap();
        assert!(hulls_jointly_intersect(&ds).unwrap().feasible);
    }
}
