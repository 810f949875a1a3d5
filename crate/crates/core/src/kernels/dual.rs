//! Box-constrained dual of the homogeneous soft-margin problem
//!
//! ```text
//! min_α ½‖Σ α_x z_x‖² − Σ α_x   s.t.  0 ≤ α_x ≤ C
//! ```
//!
//! optionally with the coupling "every group has the same α-sum". With two
//! groups and `z = ±x` this is exactly the usual C-SVM dual; with one
//! uncoupled group it is the SVM separating the `z_x` from the origin.
//!
//! Solved by greedy minimal moves: a single coordinate (uncoupled), a pair
//! inside one group, or one coordinate in every group at once (coupled).

use crate::linalg::{axpy, dot, norm_sq};

pub struct DualProblem<'a> {
    pub features: &'a [Vec<f64>],
    pub group: &'a [usize],
    pub groups: usize,
    pub coupled: bool,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// `Σ α_x z_x`.
    pub w: Vec<f64>,
    /// Per-group multiplier of the coupling constraint, summing to zero.
    /// All zero when uncoupled.
    pub mu: Vec<f64>,
    pub iterations: usize,
    pub violation: f64,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Ends {
    // min G over α < C, max G over α > 0, with argmins.
    up: f64,
    up_at: usize,
    low: f64,
    low_at: usize,
}

fn group_ends(g: &[f64], alpha: &[f64], group: &[usize], groups: usize, c: f64) -> Vec<Ends> {
    let mut ends = vec![
        Ends {
            up: f64::INFINITY,
            up_at: usize::MAX,
            low: f64::NEG_INFINITY,
            low_at: usize::MAX,
        };
        groups
    ];
    for (x, (&gx, &ax)) in g.iter().zip(alpha).enumerate() {
        let e = &mut ends[group[x]];
        if ax < c && gx < e.up {
            e.up = gx;
            e.up_at = x;
        }
        if ax > 0.0 && gx > e.low {
            e.low = gx;
            e.low_at = x;
        }
    }
    ends
}

pub fn solve_dual(p: &DualProblem, tol: f64, max_iter: usize) -> DualSolution {
    let n = p.features.len();
    let dim = p.features.first().map_or(0, Vec::len);
    let c = p.c;
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut g = vec![-1.0; n];
    let mut iterations = 0;
    let mut violation = f64::INFINITY;
    let mut converged = false;
    let mut moves: Vec<(usize, f64)> = Vec::with_capacity(p.groups.max(2));

    while iterations < max_iter {
        for (gx, z) in g.iter_mut().zip(p.features) {
            *gx = dot(&w, z) - 1.0;
        }
        let ends = group_ends(&g, &alpha, p.group, p.groups, c);
        moves.clear();
        let mut best = 0.0f64;

        if p.coupled {
            for e in &ends {
                if e.up_at != usize::MAX && e.low_at != usize::MAX && e.low - e.up > best {
                    best = e.low - e.up;
                    moves.clear();
                    moves.push((e.up_at, 1.0));
                    moves.push((e.low_at, -1.0));
                }
            }
            if ends.iter().all(|e| e.up_at != usize::MAX) {
                let v = -ends.iter().map(|e| e.up).sum::<f64>();
                if v > best {
                    best = v;
                    moves.clear();
                    moves.extend(ends.iter().map(|e| (e.up_at, 1.0)));
                }
            }
            if ends.iter().all(|e| e.low_at != usize::MAX) {
                let v = ends.iter().map(|e| e.low).sum::<f64>();
                if v > best {
                    best = v;
                    moves.clear();
                    moves.extend(ends.iter().map(|e| (e.low_at, -1.0)));
                }
            }
        } else {
            for e in &ends {
                if e.up_at != usize::MAX && -e.up > best {
                    best = -e.up;
                    moves.clear();
                    moves.push((e.up_at, 1.0));
                }
                if e.low_at != usize::MAX && e.low > best {
                    best = e.low;
                    moves.clear();
                    moves.push((e.low_at, -1.0));
                }
            }
        }

        violation = best;
        if best <= tol || moves.is_empty() {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir = vec![0.0; dim];
        let mut slope = 0.0;
        let mut t_max = f64::INFINITY;
        for &(x, s) in &moves {
            axpy(s, &p.features[x], &mut dir);
            slope += s * g[x];
            let room = if s > 0.0 { c - alpha[x] } else { alpha[x] };
            t_max = t_max.min(room);
        }
        let curv = norm_sq(&dir);
        let mut t = if curv > 0.0 {
            -slope / curv
        } else {
            f64::INFINITY
        };
        if t > t_max {
            t = t_max;
        }
        if !(t > 0.0) {
            // Numerically stalled move.
            break;
        }
        for &(x, s) in &moves {
            let v = (alpha[x] + s * t).clamp(0.0, c);
            // Bound hits are set exactly to avoid slivers.
            alpha[x] = if v <= 1e-16 * c {
                0.0
            } else if c - v <= 1e-16 * c {
                c
            } else {
                v
            };
        }
        axpy(t, &dir, &mut w);
    }

    for (gx, z) in g.iter_mut().zip(p.features) {
        *gx = dot(&w, z) - 1.0;
    }
    let mu = if p.coupled {
        recover_mu(&g, &alpha, p, c)
    } else {
        vec![0.0; p.groups]
    };
    // Recompute w from α to shed accumulated drift.
    let mut w2 = vec![0.0; dim];
    for (z, &a) in p.features.iter().zip(&alpha) {
        if a != 0.0 {
            axpy(a, z, &mut w2);
        }
    }
    DualSolution {
        alpha,
        w: w2,
        mu,
        iterations,
        violation,
        converged,
    }
}

/// Multipliers `μ_i ∈ [max G over α>0, min G over α<C]` with `Σ μ_i = 0`,
/// preferring the mean gradient over free coordinates.
fn recover_mu(g: &[f64], alpha: &[f64], p: &DualProblem, c: f64) -> Vec<f64> {
    let ends = group_ends(g, alpha, p.group, p.groups, c);
    let mut free_sum = vec![0.0; p.groups];
    let mut free_cnt = vec![0usize; p.groups];
    for (x, (&gx, &ax)) in g.iter().zip(alpha).enumerate() {
        if ax > 0.0 && ax < c {
            free_sum[p.group[x]] += gx;
            free_cnt[p.group[x]] += 1;
        }
    }
    let mut lo = Vec::with_capacity(p.groups);
    let mut hi = Vec::with_capacity(p.groups);
    let mut pref = Vec::with_capacity(p.groups);
    for (i, e) in ends.iter().enumerate() {
        let (a, b) = if e.low <= e.up {
            (e.low, e.up)
        } else {
            (e.up, e.low)
        };
        lo.push(a);
        hi.push(b);
        pref.push(if free_cnt[i] > 0 {
            free_sum[i] / free_cnt[i] as f64
        } else if a.is_finite() && b.is_finite() {
            0.5 * (a + b)
        } else if a.is_finite() {
            a
        } else if b.is_finite() {
            b
        } else {
            0.0
        });
    }
    let f = |s: f64| -> f64 {
        pref.iter()
            .zip(lo.iter().zip(&hi))
            .map(|(&c, (&l, &h))| (c - s).clamp(l, h))
            .sum()
    };
    let bound = 1.0
        + pref.iter().map(|x| x.abs()).sum::<f64>()
        + lo.iter()
            .chain(&hi)
            .filter(|x| x.is_finite())
            .map(|x| x.abs())
            .sum::<f64>();
    let (mut a, mut b) = (-bound, bound);
    if f(a) < 0.0 || f(b) > 0.0 {
        let m = pref.iter().sum::<f64>() / pref.len() as f64;
        return pref.iter().map(|x| x - m).collect();
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let s = 0.5 * (a + b);
    let mut mu: Vec<f64> = pref
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(&c, (&l, &h))| (c - s).clamp(l, h))
        .collect();
    // Remove the bisection residue exactly.
    let m = mu.iter().sum::<f64>() / mu.len() as f64;
    mu.iter_mut().for_each(|x| *x -= m);
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_pair_matches_closed_form() {
        // A = {2}, B = {0} on the line: z = +x for A and −x for B.
        let feats = vec![vec![2.0], vec![-0.0]];
        let group = vec![0, 1];
        let p = DualProblem {
            features: &feats,
            group: &group,
            groups: 2,
            coupled: true,
            c: 1e6,
        };
        let s = solve_dual(&p, 1e-12, 10_000);
        assert!(s.converged);
        assert!((s.w[0] - 1.0).abs() < 1e-12, "{:?}", s.w);
        // A: w·2 + ρ_A = 1 → ρ_A = −1, μ_A = 1.
        assert!((s.mu[0] - 1.0).abs() < 1e-9 && (s.mu[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_origin_separation() {
        let feats = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let group = vec![0, 0];
        let p = DualProblem {
            features: &feats,
            group: &group,
            groups: 1,
            coupled: false,
            c: 1e6,
        };
        let s = solve_dual(&p, 1e-12, 10_000);
        // Hard solution: w = p*/‖p*‖² with p* = (1,1).
        assert!((s.w[0] - 0.5).abs() < 1e-10 && (s.w[1] - 0.5).abs() < 1e-10);
    }
}
