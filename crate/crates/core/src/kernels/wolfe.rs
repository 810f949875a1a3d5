//! Wolfe's minimum-norm-point method over a polytope given by a linear
//! minimization oracle.
//!
//! The polytope never has to be enumerated: every major cycle asks the
//! oracle for the vertex minimizing `⟨x, ·⟩` and the corral stays affinely
//! independent, so at most `dim + 1` vertices are ever stored.

use crate::error::{invalid, Result, TsvmError};
use crate::linalg::{axpy, dot, is_finite, least_squares, norm, norm_sq};

/// Access to the vertices of a polytope through linear minimization.
pub trait VertexOracle {
    type Key: Clone + PartialEq + std::fmt::Debug;

    fn dim(&self) -> usize;

    /// A vertex minimizing `⟨direction, y⟩`, ties broken towards the lowest key.
    fn minimize(&self, direction: &[f64]) -> (Self::Key, Vec<f64>);

    /// Starting vertex.
    fn initial(&self) -> (Self::Key, Vec<f64>) {
        self.minimize(&vec![0.0; self.dim()])
    }

    /// Largest vertex norm, or an upper bound of it.
    fn scale(&self) -> f64;

    /// Rough number of input objects, used only for the iteration budget.
    fn size_hint(&self) -> usize;
}

/// Explicit finite generator list.
pub struct PointSet<'a> {
    points: &'a [Vec<f64>],
    scale: f64,
}

impl<'a> PointSet<'a> {
    pub fn new(points: &'a [Vec<f64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return invalid("generator list is empty");
        };
        let m = first.len();
        if m == 0 {
            return invalid("generators must have at least one coordinate");
        }
        for p in points {
            if p.len() != m {
                return invalid("generators have mismatched dimensions");
            }
            if !is_finite(p) {
                return invalid("generator is not finite");
            }
        }
        let scale = points.iter().map(|p| norm(p)).fold(0.0, f64::max);
        Ok(PointSet { points, scale })
    }
}

impl VertexOracle for PointSet<'_> {
    type Key = usize;

    fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn minimize(&self, direction: &[f64]) -> (usize, Vec<f64>) {
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for (j, p) in self.points.iter().enumerate() {
            let v = dot(direction, p);
            if v < best_val {
                best = j;
                best_val = v;
            }
        }
        (best, self.points[best].clone())
    }

    fn initial(&self) -> (usize, Vec<f64>) {
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for (j, p) in self.points.iter().enumerate() {
            let v = norm_sq(p);
            if v < best_val {
                best = j;
                best_val = v;
            }
        }
        (best, self.points[best].clone())
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn size_hint(&self) -> usize {
        self.points.len()
    }
}

/// Result of a Wolfe run: the closest point and the corral it sits in.
#[derive(Debug, Clone)]
pub struct WolfeSolution<K> {
    pub point: Vec<f64>,
    /// `(key, vertex, weight)` with positive weights summing to one.
    pub corral: Vec<(K, Vec<f64>, f64)>,
    /// Final Wolfe gap `‖x‖² − min_y ⟨x, y⟩`.
    pub gap: f64,
    pub iterations: usize,
    /// The point is within `tol_origin` of the origin.
    pub reached_origin: bool,
}

impl<K> WolfeSolution<K> {
    pub fn norm(&self) -> f64 {
        norm(&self.point)
    }
}

/// Default optimality band for generators of norm at most `scale`.
pub fn default_tol_opt(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

/// Below this norm the origin is declared inside the hull.
pub fn tol_origin(scale: f64) -> f64 {
    1e-8 * (1.0 + scale)
}

struct Corral<K> {
    keys: Vec<K>,
    pts: Vec<Vec<f64>>,
    w: Vec<f64>,
}

impl<K> Corral<K> {
    fn combine(&self, dim: usize) -> Vec<f64> {
        let mut x = vec![0.0; dim];
        for (p, &w) in self.pts.iter().zip(&self.w) {
            axpy(w, p, &mut x);
        }
        x
    }

    fn remove(&mut self, i: usize) {
        self.keys.remove(i);
        self.pts.remove(i);
        self.w.remove(i);
    }
}

/// Affine minimizer of the corral: `argmin ‖Σ α_i p_i‖` with `Σ α_i = 1`.
///
/// Solved as an unconstrained least-squares problem on the columns
/// `(σ, p_i)` against `(σ, 0)`; the solution is a positive multiple of the
/// affine minimizer, so dividing by its sum recovers it.
fn affine_minimizer(pts: &[Vec<f64>], sigma: f64) -> Option<Vec<f64>> {
    let dim = pts[0].len();
    let cols: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| std::iter::once(sigma).chain(p.iter().copied()).collect())
        .collect();
    let mut rhs = vec![0.0; dim + 1];
    rhs[0] = sigma;
    let a = least_squares(&cols, &rhs)?;
    let s: f64 = a.iter().sum();
    if !(s.abs() > 1e-300) {
        return None;
    }
    Some(a.iter().map(|x| x / s).collect())
}

/// Run Wolfe's method. `tol_opt` is the certificate band: the returned point
/// satisfies `⟨x, y⟩ ≥ ‖x‖² − tol_opt` for every vertex `y`.
pub fn wolfe<O: VertexOracle>(oracle: &O, tol_opt: f64) -> Result<WolfeSolution<O::Key>> {
    if !(tol_opt > 0.0) {
        return invalid("tol_opt must be positive");
    }
    let dim = oracle.dim();
    let scale = oracle.scale();
    let sigma = 1.0 + scale;
    let t_origin = tol_origin(scale);
    // Iterate to roundoff, certify at `tol_opt`.
    let tol_stop = tol_opt.min(1e-14 * sigma * sigma);
    let cap = 50 * (dim + oracle.size_hint()).max(1);
    let eps_w = 1e-14;

    let (k0, p0) = oracle.initial();
    let mut corral = Corral {
        keys: vec![k0],
        pts: vec![p0],
        w: vec![1.0],
    };
    let mut x = corral.pts[0].clone();
    let mut iterations = 0;
    let mut gap;
    let mut stalled = false;

    loop {
        let xx = norm_sq(&x);
        if xx.sqrt() <= t_origin {
            let (_, y) = oracle.minimize(&x);
            gap = xx - dot(&x, &y);
            return Ok(finish(x, corral, gap, iterations, true));
        }
        let (key, y) = oracle.minimize(&x);
        gap = xx - dot(&x, &y);
        if stalled || gap <= tol_stop || corral.keys.contains(&key) || corral.pts.len() > dim {
            break;
        }
        iterations += 1;
        if iterations > cap {
            break;
        }
        corral.keys.push(key);
        corral.pts.push(y);
        corral.w.push(0.0);

        // Minor cycles.
        loop {
            iterations += 1;
            let Some(alpha) = affine_minimizer(&corral.pts, sigma) else {
                // The new vertex is numerically in the affine hull of the
                // corral, so no further progress is possible.
                let last = corral.pts.len() - 1;
                corral.remove(last);
                let s: f64 = corral.w.iter().sum();
                corral.w.iter_mut().for_each(|w| *w /= s);
                x = corral.combine(dim);
                stalled = true;
                break;
            };
            if alpha.iter().all(|&a| a > eps_w) {
                corral.w = alpha;
                x = corral.combine(dim);
                break;
            }
            let mut theta = 1.0f64;
            for (&a, &w) in alpha.iter().zip(&corral.w) {
                if a <= eps_w {
                    let denom = w - a;
                    if denom > 0.0 {
                        theta = theta.min(w / denom);
                    }
                }
            }
            for (w, a) in corral.w.iter_mut().zip(&alpha) {
                *w += theta * (a - *w);
            }
            // Drop every vertex whose weight hit zero; at least one does.
            let mut dropped = false;
            let mut i = 0;
            while i < corral.w.len() {
                if corral.w[i] <= eps_w && corral.w.len() > 1 {
                    corral.remove(i);
                    dropped = true;
                } else {
                    i += 1;
                }
            }
            if !dropped {
                let (i, _) = corral
                    .w
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |b, (i, &w)| if w < b.1 { (i, w) } else { b },
                    );
                corral.remove(i);
            }
            let s: f64 = corral.w.iter().sum();
            corral.w.iter_mut().for_each(|w| *w /= s);
            x = corral.combine(dim);
            if iterations > cap {
                break;
            }
        }
    }

    if gap > tol_opt {
        return Err(TsvmError::ConvergenceFailure {
            iterations,
            residual: gap,
            best: x,
        });
    }
    Ok(finish(x, corral, gap, iterations, false))
}

fn finish<K>(
    x: Vec<f64>,
    corral: Corral<K>,
    gap: f64,
    iterations: usize,
    reached_origin: bool,
) -> WolfeSolution<K> {
    let corral = corral
        .keys
        .into_iter()
        .zip(corral.pts)
        .zip(corral.w)
        .map(|((k, p), w)| (k, p, w))
        .collect();
    WolfeSolution {
        point: x,
        corral,
        gap,
        iterations,
        reached_origin,
    }
}

/// The polytope `conv{ c · Σ_i x_i v_iᵀ : x_i ∈ A_i }` over all tuples with
/// one point per class, stored as row-major `d×(k−1)` matrices.
///
/// With `c = 1/k` these are the barycenters of lifted tuples restricted to
/// the first `d` rows; with `k = 2`, `v = ±1` and `c = 1` it is the
/// Minkowski difference `A − B`. Linear minimization splits per class, so
/// the product is never enumerated.
pub struct TupleOracle<'a> {
    classes: Vec<Vec<&'a [f64]>>,
    vectors: &'a [Vec<f64>],
    factor: f64,
    d: usize,
    scale: f64,
}

impl<'a> TupleOracle<'a> {
    pub fn new(classes: Vec<Vec<&'a [f64]>>, vectors: &'a [Vec<f64>], factor: f64) -> Self {
        let d = classes[0][0].len();
        let scale = factor.abs()
            * classes
                .iter()
                .map(|c| c.iter().map(|x| norm(x)).fold(0.0, f64::max))
                .sum::<f64>();
        TupleOracle {
            classes,
            vectors,
            factor,
            d,
            scale,
        }
    }

    pub fn classes(&self) -> &[Vec<&'a [f64]>] {
        &self.classes
    }

    /// Per-class minimizers of `⟨x, D v_i⟩` and their values.
    pub fn class_minima(&self, direction: &[f64]) -> Vec<(usize, f64)> {
        let cols = self.vectors[0].len();
        self.classes
            .iter()
            .zip(self.vectors)
            .map(|(pts, v)| {
                let u: Vec<f64> = (0..self.d)
                    .map(|r| dot(&direction[r * cols..(r + 1) * cols], v))
                    .collect();
                // Values relative to the first point: translating the class
                // shifts them all by one constant, so ties stay ties.
                let base = pts[0];
                let rel = |x: &[f64]| -> f64 {
                    x.iter()
                        .zip(base)
                        .zip(&u)
                        .map(|((a, b), w)| (a - b) * w)
                        .sum()
                };
                let vals: Vec<f64> = pts.iter().map(|x| rel(x)).collect();
                let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
                // Exact ties (a whole face orthogonal to u) would otherwise be
                // broken by rounding; take the lowest index within the band.
                let spread = pts
                    .iter()
                    .map(|x| {
                        x.iter()
                            .zip(base)
                            .map(|(a, b)| (a - b).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0, f64::max);
                let band = 1e-11 * norm(direction) * norm(v) * spread;
                let j = vals.iter().position(|&v| v <= min + band).unwrap_or(0);
                (j, dot(&u, pts[j]))
            })
            .collect()
    }

    /// `c · Σ_i x_{key_i} v_iᵀ`.
    pub fn vertex(&self, key: &[usize]) -> Vec<f64> {
        let cols = self.vectors[0].len();
        let mut out = vec![0.0; self.d * cols];
        for ((pts, v), &j) in self.classes.iter().zip(self.vectors).zip(key) {
            for (r, &xr) in pts[j].iter().enumerate() {
                for (c, &vc) in v.iter().enumerate() {
                    out[r * cols + c] += self.factor * xr * vc;
                }
            }
        }
        out
    }
}

impl VertexOracle for TupleOracle<'_> {
    type Key = Vec<usize>;

    fn dim(&self) -> usize {
        self.d * self.vectors[0].len()
    }

    fn minimize(&self, direction: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let key: Vec<usize> = self.class_minima(direction).iter().map(|m| m.0).collect();
        let v = self.vertex(&key);
        (key, v)
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn size_hint(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }
}
