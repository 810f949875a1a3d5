//! The tensor lift between `R^d` and the space of `(d+1)×(k−1)` matrices.
//!
//! A point `x` of class `i` is sent to `S(x) = x̄ v_iᵀ`, where `x̄ = (x, 1)` and
//! `v_1, …, v_k` are the vertices of a regular simplex centred at the origin.
//! Lifted matrices are stored row-major as flat vectors; the matrix view and
//! the `(d+1)(k−1)`-vector view share that storage everywhere in the crate.
//!
//! Class indices are zero-based throughout the Rust API.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Degeneracy, Result, TsvmError};
use crate::linalg::{dot, is_finite, norm};

/// Unit vectors `v_1, …, v_k` in `R^{k−1}` with `Σ v_i = 0`.
///
/// The frame is canonical: `v_1 = e_1`, and each following vertex is written
/// in the basis obtained by Gram–Schmidt on the centred vertices in their
/// natural order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexFrame {
    k: usize,
    vectors: Vec<Vec<f64>>,
}

impl SimplexFrame {
    pub fn new(k: usize) -> Result<Self> {
        build_simplex_frame(k)
    }

    /// Adopt stored vectors as they are, after checking the frame invariants.
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let k = vectors.len();
        if k < 2 || vectors.iter().any(|v| v.len() != k - 1 || !is_finite(v)) {
            return invalid("a frame needs k >= 2 finite vectors of length k - 1");
        }
        let frame = SimplexFrame { k, vectors };
        if frame.invariant_residual() > 1e-12 {
            return invalid("vectors do not form a regular simplex frame");
        }
        Ok(frame)
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension of the frame space, `k − 1`.
    pub fn dim(&self) -> usize {
        self.k - 1
    }

    pub fn vector(&self, class: usize) -> &[f64] {
        &self.vectors[class]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub(crate) fn check_class(&self, class: usize) -> Result<()> {
        if class >= self.k {
            return invalid(format!(
                "class index {class} out of range for k = {}",
                self.k
            ));
        }
        Ok(())
    }

    /// Largest deviation from the three frame invariants (unit norm, zero
    /// sum, equal pairwise dot products `−1/(k−1)`).
    pub fn invariant_residual(&self) -> f64 {
        let k = self.k;
        let target = -1.0 / (k as f64 - 1.0);
        let mut worst = 0.0f64;
        let mut sum = vec![0.0; k - 1];
        for (i, v) in self.vectors.iter().enumerate() {
            worst = worst.max((norm(v) - 1.0).abs());
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            for w in &self.vectors[i + 1..] {
                worst = worst.max((dot(v, w) - target).abs());
            }
        }
        worst.max(norm(&sum))
    }
}

/// Build the canonical frame for `k ≥ 2` classes.
pub fn build_simplex_frame(k: usize) -> Result<SimplexFrame> {
    if k < 2 {
        return invalid(format!("a simplex frame needs k >= 2, got {k}"));
    }
    let kf = k as f64;
    // Centred vertices e_i − (1/k)·1 in R^k.
    let centred: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 1.0 - 1.0 / kf } else { -1.0 / kf })
                .collect()
        })
        .collect();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k - 1);
    for c in centred.iter().take(k - 1) {
        let mut u = c.clone();
        // Two passes of modified Gram–Schmidt keep the basis orthonormal to
        // machine precision.
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&u, b);
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= proj * bi;
                }
            }
        }
        let n = norm(&u);
        u.iter_mut().for_each(|x| *x /= n);
        basis.push(u);
    }

    let scale = (kf / (kf - 1.0)).sqrt();
    let vectors = centred
        .iter()
        .map(|c| {
            basis
                .iter()
                .map(|b| dot(c, b) * scale)
                // Exact zeros keep the k = 2 and k = 3 frames bit-clean.
                .map(|x| if x.abs() <= 1e-15 { 0.0 } else { x })
                .collect()
        })
        .collect();
    Ok(SimplexFrame { k, vectors })
}

/// `k` nonempty classes of points in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct LabeledDataset {
    d: usize,
    classes: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawDataset {
    #[allow(dead_code)]
    d: Option<usize>,
    classes: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawDataset> for LabeledDataset {
    type Error = TsvmError;

    fn try_from(raw: RawDataset) -> Result<Self> {
        let ds = LabeledDataset::new(raw.classes)?;
        if let Some(d) = raw.d {
            if d != ds.d {
                return invalid(format!(
                    "declared d = {d} but points have {} coordinates",
                    ds.d
                ));
            }
        }
        Ok(ds)
    }
}

impl LabeledDataset {
    pub fn new(classes: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if classes.len() < 2 {
            return invalid(format!("need at least two classes, got {}", classes.len()));
        }
        let d = match classes.iter().flat_map(|c| c.first()).next() {
            Some(p) => p.len(),
            None => return invalid("every class is empty"),
        };
        if d == 0 {
            return invalid("points must have at least one coordinate");
        }
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return invalid(format!("class {i} is empty"));
            }
            for (j, p) in class.iter().enumerate() {
                if p.len() != d {
                    return invalid(format!(
                        "point {j} of class {i} has {} coordinates, expected {d}",
                        p.len()
                    ));
                }
                if !is_finite(p) {
                    return invalid(format!("point {j} of class {i} is not finite"));
                }
            }
        }
        Ok(LabeledDataset { d, classes })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, i: usize) -> &[Vec<f64>] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<Vec<f64>>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(class, index within class, point)` for every point, classes in order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        self.classes.iter().enumerate().flat_map(|(c, pts)| {
            pts.iter()
                .enumerate()
                .map(move |(j, p)| (c, j, p.as_slice()))
        })
    }

    /// Largest absolute coordinate, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.iter()
            .flat_map(|(_, _, p)| p.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Keep only the listed points of each class. Fails if a class ends up empty.
    pub fn subset(&self, keep: &[Vec<usize>]) -> Result<Self> {
        let classes = self
            .classes
            .iter()
            .zip(keep)
            .map(|(pts, idx)| idx.iter().map(|&j| pts[j].clone()).collect())
            .collect();
        LabeledDataset::new(classes)
    }

    pub fn translated(&self, q: &[f64]) -> Self {
        self.map_points(|p| p.iter().zip(q).map(|(a, b)| a + b).collect())
    }

    /// Apply a `d×d` matrix given row-major.
    pub fn transformed(&self, matrix: &[Vec<f64>]) -> Self {
        self.map_points(|p| matrix.iter().map(|row| dot(row, p)).collect())
    }

    fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        LabeledDataset {
            d: self.d,
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|p| f(p)).collect())
                .collect(),
        }
    }
}

/// `S(x) = x̄ ⊗ v_class` together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub matrix: Vec<f64>,
    pub class_index: usize,
    pub source: Vec<f64>,
}

/// Row-major `(d+1)×(k−1)` outer product `x̄ vᵀ`.
pub(crate) fn outer_lift(x: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity((x.len() + 1) * v.len());
    for xr in x.iter().chain(std::iter::once(&1.0)) {
        out.extend(v.iter().map(|vc| xr * vc));
    }
    out
}

pub fn lift(x: &[f64], class_index: usize, frame: &SimplexFrame) -> Result<LiftedPoint> {
    frame.check_class(class_index)?;
    if !is_finite(x) {
        return invalid("cannot lift a non-finite point");
    }
    Ok(LiftedPoint {
        matrix: outer_lift(x, frame.vector(class_index)),
        class_index,
        source: x.to_vec(),
    })
}

/// Lift every point of a dataset, classes in order.
pub fn lift_dataset(dataset: &LabeledDataset, frame: &SimplexFrame) -> Vec<Vec<f64>> {
    dataset
        .iter()
        .map(|(c, _, p)| outer_lift(p, frame.vector(c)))
        .collect()
}

/// `f_i(y)`: the first `d` entries of the matrix–vector product `y v_i`.
pub fn unlift_point(y: &[f64], class_index: usize, frame: &SimplexFrame) -> Result<Vec<f64>> {
    frame.check_class(class_index)?;
    let cols = frame.dim();
    if y.is_empty() || !y.len().is_multiple_of(cols) || y.len() / cols < 2 {
        return invalid(format!(
            "a lifted matrix needs (d+1)·{cols} entries with d >= 1, got {}",
            y.len()
        ));
    }
    let d = y.len() / cols - 1;
    let v = frame.vector(class_index);
    Ok((0..d)
        .map(|r| dot(&y[r * cols..(r + 1) * cols], v))
        .collect())
}

/// `{S : tr(S·M) ≥ λ}` for a `(k−1)×(d+1)` functional matrix `M`, kept with
/// `‖M‖_F = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedHalfSpace {
    d: usize,
    k: usize,
    m: Vec<f64>,
    lambda: f64,
}

impl LiftedHalfSpace {
    /// From a row-major `(k−1)×(d+1)` matrix; both `M` and `λ` are divided by `‖M‖_F`.
    pub fn new(d: usize, k: usize, m: Vec<f64>, lambda: f64) -> Result<Self> {
        if m.len() != (k - 1) * (d + 1) {
            return invalid(format!(
                "functional matrix must have {} entries, got {}",
                (k - 1) * (d + 1),
                m.len()
            ));
        }
        let n = norm(&m);
        if !(n > 0.0) || !n.is_finite() || !lambda.is_finite() {
            return invalid("functional matrix must be finite with a nonzero entry");
        }
        Ok(LiftedHalfSpace {
            d,
            k,
            m: m.iter().map(|x| x / n).collect(),
            lambda: lambda / n,
        })
    }

    /// Adopt an already normalized `M` without rescaling it, so stored
    /// values come back bit for bit.
    pub fn from_parts(d: usize, k: usize, m: Vec<f64>, lambda: f64) -> Result<Self> {
        if k < 2 || m.len() != (k - 1) * (d + 1) || !is_finite(&m) || !lambda.is_finite() {
            return invalid("functional matrix has the wrong size or non-finite entries");
        }
        if (norm(&m) - 1.0).abs() > 1e-12 {
            return invalid("functional matrix must have unit Frobenius norm");
        }
        Ok(LiftedHalfSpace { d, k, m, lambda })
    }

    /// From `W = Mᵀ` in the lifted-point layout, so that membership reads `⟨W, S⟩ ≥ λ`.
    pub fn from_functional(d: usize, k: usize, w: &[f64], lambda: f64) -> Result<Self> {
        let cols = k - 1;
        let rows = d + 1;
        if w.len() != rows * cols {
            return invalid("functional has the wrong size");
        }
        let mut m = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                m[c * rows + r] = w[r * cols + c];
            }
        }
        Self::new(d, k, m, lambda)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row-major `(k−1)×(d+1)` matrix `M`.
    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `Mᵀ` flattened in the lifted-point layout.
    pub fn functional(&self) -> Vec<f64> {
        let rows = self.d + 1;
        let cols = self.k - 1;
        let mut w = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                w[r * cols + c] = self.m[c * rows + r];
            }
        }
        w
    }

    /// `tr(S·M)` for a lifted matrix `S`.
    pub fn evaluate(&self, s: &[f64]) -> f64 {
        dot(&self.functional(), s)
    }

    pub fn contains(&self, s: &[f64]) -> bool {
        self.evaluate(s) >= self.lambda
    }

    /// `r_i = v_iᵀ M`, a row of length `d+1`.
    pub(crate) fn class_row(&self, v: &[f64]) -> Vec<f64> {
        let rows = self.d + 1;
        (0..rows)
            .map(|r| {
                v.iter()
                    .enumerate()
                    .map(|(c, vc)| vc * self.m[c * rows + r])
                    .sum()
            })
            .collect()
    }
}

/// `{x : ⟨normal, x⟩ ≥ offset}` with `‖normal‖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceD {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpaceD {
    /// Signed distance to the boundary, positive inside.
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.value(x) >= 0.0
    }
}

/// Region of one class in a model. A class whose restricted functional has
/// no linear part gets all of space, or nothing for an inconsistent model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassRegion {
    HalfSpace(HalfSpaceD),
    Universe,
    Empty,
}

impl ClassRegion {
    /// Like [`restrict_halfspace`], with degenerate restrictions kept as
    /// trivial regions instead of errors.
    pub fn from_restriction(
        h: &LiftedHalfSpace,
        class_index: usize,
        frame: &SimplexFrame,
    ) -> Result<Self> {
        match restrict_halfspace(h, class_index, frame) {
            Ok(hs) => Ok(ClassRegion::HalfSpace(hs)),
            Err(TsvmError::DegenerateHalfspace {
                kind: Degeneracy::Universe,
                ..
            }) => Ok(ClassRegion::Universe),
            Err(TsvmError::DegenerateHalfspace {
                kind: Degeneracy::Empty,
                ..
            }) => Ok(ClassRegion::Empty),
            Err(e) => Err(e),
        }
    }

    pub fn halfspace(&self) -> Option<&HalfSpaceD> {
        match self {
            ClassRegion::HalfSpace(h) => Some(h),
            _ => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ClassRegion::HalfSpace(h) => h.contains(x),
            ClassRegion::Universe => true,
            ClassRegion::Empty => false,
        }
    }

    /// Largest coordinate difference between two regions; infinite when
    /// they are of different types.
    pub fn deviation(&self, other: &ClassRegion) -> f64 {
        match (self, other) {
            (ClassRegion::HalfSpace(a), ClassRegion::HalfSpace(b)) => a
                .normal
                .iter()
                .zip(&b.normal)
                .map(|(p, q)| (p - q).abs())
                .fold((a.offset - b.offset).abs(), f64::max),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// `g(x) = ⟨weights, x⟩ + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineScore {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl AffineScore {
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

/// `H_i = f_i(U_i ∩ H)` as an affine half-space of `R^d`.
pub fn restrict_halfspace(
    h: &LiftedHalfSpace,
    class_index: usize,
    frame: &SimplexFrame,
) -> Result<HalfSpaceD> {
    frame.check_class(class_index)?;
    if frame.k() != h.k() {
        return invalid("frame and half-space disagree on k");
    }
    let row = h.class_row(frame.vector(class_index));
    let d = h.d();
    let normal = &row[..d];
    let offset = h.lambda() - row[d];
    let n = norm(normal);
    // Solver accuracy is about 1e-9 relative, so a linear part below that is
    // treated as zero rather than normalized into an arbitrary direction.
    let tol = 1e-9 * (norm(&row) + h.lambda().abs()).max(1e-300);
    if n <= tol {
        let kind = if offset <= tol {
            Degeneracy::Universe
        } else {
            Degeneracy::Empty
        };
        return Err(TsvmError::DegenerateHalfspace {
            class: class_index,
            kind,
        });
    }
    Ok(HalfSpaceD {
        normal: normal.iter().map(|x| x / n).collect(),
        offset: offset / n,
    })
}

/// `g_i(x) = tr((x̄ ⊗ v_i)·M)` for every class.
pub fn score_functions(h: &LiftedHalfSpace, frame: &SimplexFrame) -> Vec<AffineScore> {
    (0..frame.k())
        .map(|i| {
            let row = h.class_row(frame.vector(i));
            let d = h.d();
            AffineScore {
                weights: row[..d].to_vec(),
                bias: row[d],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const S3: f64 = 0.866_025_403_784_438_6;

    #[test]
    fn frame_k2_is_plus_minus_one() {
        let f = build_simplex_frame(2).unwrap();
        assert_eq!(f.vectors(), &[vec![1.0], vec![-1.0]]);
    }

    #[test]
    fn frame_k3_canonical_rotation() {
        let f = build_simplex_frame(3).unwrap();
        let expected = [[1.0, 0.0], [-0.5, S3], [-0.5, -S3]];
        for (v, e) in f.vectors().iter().zip(expected) {
            assert_abs_diff_eq!(v[0], e[0], epsilon = 1e-12);
            assert_abs_diff_eq!(v[1], e[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn frame_k4_dots() {
        let f = build_simplex_frame(4).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_abs_diff_eq!(dot(f.vector(i), f.vector(j)), -1.0 / 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn frame_invariants_up_to_twelve() {
        for k in 2..=12 {
            let f = build_simplex_frame(k).unwrap();
            assert!(f.invariant_residual() <= 1e-12, "k = {k}");
            assert_eq!(f, build_simplex_frame(k).unwrap());
        }
    }

    #[test]
    fn frame_rejects_k1() {
        assert!(matches!(
            build_simplex_frame(1),
            Err(TsvmError::InvalidArgument(_))
        ));
        assert!(build_simplex_frame(0).is_err());
    }

    #[test]
    fn lift_examples() {
        let f2 = build_simplex_frame(2).unwrap();
        assert_eq!(
            lift(&[2.0, 3.0], 0, &f2).unwrap().matrix,
            vec![2.0, 3.0, 1.0]
        );
        assert_eq!(
            lift(&[2.0, 3.0], 1, &f2).unwrap().matrix,
            vec![-2.0, -3.0, -1.0]
        );
        let f3 = build_simplex_frame(3).unwrap();
        let s = lift(&[0.0], 0, &f3).unwrap().matrix;
        assert_eq!(s, vec![0.0, 0.0, 1.0, 0.0]);
        assert!(lift(&[1.0], 3, &f3).is_err());
    }

    #[test]
    fn unlift_examples() {
        let f2 = build_simplex_frame(2).unwrap();
        let y = lift(&[2.0, 3.0], 0, &f2).unwrap().matrix;
        assert_eq!(unlift_point(&y, 0, &f2).unwrap(), vec![2.0, 3.0]);
        let y = lift(&[5.0], 1, &f2).unwrap().matrix;
        assert_eq!(unlift_point(&y, 1, &f2).unwrap(), vec![5.0]);
        let f3 = build_simplex_frame(3).unwrap();
        assert_eq!(unlift_point(&[0.0; 6], 2, &f3).unwrap(), vec![0.0, 0.0]);
        assert!(unlift_point(&[0.0; 6], 5, &f3).is_err());
    }

    fn toy_halfspace() -> LiftedHalfSpace {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        LiftedHalfSpace::new(1, 2, vec![-s, s], s).unwrap()
    }

    #[test]
    fn restrict_k2_toy() {
        let f2 = build_simplex_frame(2).unwrap();
        let h = toy_halfspace();
        let h1 = restrict_halfspace(&h, 0, &f2).unwrap();
        assert_abs_diff_eq!(h1.normal[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h1.offset, 0.0, epsilon = 1e-15);
        let h2 = restrict_halfspace(&h, 1, &f2).unwrap();
        assert_abs_diff_eq!(h2.normal[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h2.offset, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn restrict_degenerate_reports_kind() {
        let f2 = build_simplex_frame(2).unwrap();
        // Only the appended coordinate is touched: g_1 = 1, g_2 = −1.
        let h = LiftedHalfSpace::new(1, 2, vec![0.0, 1.0], 0.5).unwrap();
        assert!(matches!(
            restrict_halfspace(&h, 0, &f2),
            Err(TsvmError::DegenerateHalfspace {
                class: 0,
                kind: Degeneracy::Universe
            })
        ));
        assert!(matches!(
            restrict_halfspace(&h, 1, &f2),
            Err(TsvmError::DegenerateHalfspace {
                class: 1,
                kind: Degeneracy::Empty
            })
        ));
    }

    #[test]
    fn scores_k2_toy() {
        let f2 = build_simplex_frame(2).unwrap();
        let g = score_functions(&toy_halfspace(), &f2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for x in [-3.0, 0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(g[0].eval(&[x]), (1.0 - x) * s, epsilon = 1e-14);
            assert_abs_diff_eq!(g[1].eval(&[x]), (x - 1.0) * s, epsilon = 1e-14);
        }
    }

    #[test]
    fn functional_layout_matches_trace() {
        let f3 = build_simplex_frame(3).unwrap();
        let m: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let h = LiftedHalfSpace::new(2, 3, m, 0.1).unwrap();
        let s = lift(&[0.3, -1.2], 2, &f3).unwrap().matrix;
        // tr(S·M) with S (3×2) and M (2×3).
        let mm = h.matrix();
        let mut trace = 0.0;
        for r in 0..3 {
            for c in 0..2 {
                trace += s[r * 2 + c] * mm[c * 3 + r];
            }
        }
        assert_abs_diff_eq!(h.evaluate(&s), trace, epsilon = 1e-14);
        let g = score_functions(&h, &f3);
        assert_abs_diff_eq!(g[2].eval(&[0.3, -1.2]), trace, epsilon = 1e-14);
    }

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::new(vec![vec![vec![0.0]]]).is_err());
        assert!(LabeledDataset::new(vec![vec![vec![0.0]], vec![]]).is_err());
        assert!(LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![0.0, 1.0]]]).is_err());
        assert!(LabeledDataset::new(vec![vec![vec![f64::NAN]], vec![vec![0.0]]]).is_err());
        let ds = LabeledDataset::new(vec![vec![vec![0.0]], vec![vec![2.0], vec![3.0]]]).unwrap();
        assert_eq!((ds.d(), ds.k(), ds.len()), (1, 2, 3));
    }

    fn lift_case() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>, usize, usize)> {
        (1usize..=8, 2usize..=6).prop_flat_map(|(d, k)| {
            (
                Just(d),
                Just(k),
                prop::collection::vec(-50.0f64..50.0, d),
                prop::collection::vec(-50.0f64..50.0, d),
                0..k,
                0..k,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unlift_inverts_lift((_d, k, x, _y, i, _j) in lift_case()) {
            let f = build_simplex_frame(k).unwrap();
            let s = lift(&x, i, &f).unwrap();
            let back = unlift_point(&s.matrix, i, &f).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn lifted_dot_factorizes((_d, k, x, y, i, j) in lift_case()) {
            let f = build_simplex_frame(k).unwrap();
            let sx = lift(&x, i, &f).unwrap().matrix;
            let sy = lift(&y, j, &f).unwrap().matrix;
            let bar = |p: &[f64]| p.iter().copied().chain(std::iter::once(1.0)).collect::<Vec<_>>();
            let expected = dot(&bar(&x), &bar(&y)) * dot(f.vector(i), f.vector(j));
            prop_assert!((dot(&sx, &sy) - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        }

        #[test]
        fn scores_sum_to_zero(
            (d, k, x, _y, _i, _j) in lift_case(),
            seed in prop::collection::vec(-1.0f64..1.0, 64),
            lambda in 0.01f64..3.0,
        ) {
            let f = build_simplex_frame(k).unwrap();
            let m: Vec<f64> = seed.iter().cycle().take((k - 1) * (d + 1)).copied().collect();
            prop_assume!(norm(&m) > 1e-6);
            let h = LiftedHalfSpace::new(d, k, m, lambda).unwrap();
            let total: f64 = score_functions(&h, &f).iter().map(|g| g.eval(&x)).sum();
            prop_assert!(total.abs() <= 1e-10 * (1.0 + norm(&x)));
        }
    }
}
