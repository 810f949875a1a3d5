//! Seeded random instances in three overlap regimes, each certified by LP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TsvmError};
use crate::geometry::LabeledDataset;
use crate::kernels::hulls_intersect;

/// Attempts before giving up on a regime.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// The class hulls have no common point.
    JointlyDisjoint,
    /// Every two hulls meet, all of them together do not.
    PairwiseOverlappingJointlyDisjoint,
    /// Some point lies in every hull.
    JointlyOverlapping,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::JointlyDisjoint => "jointly-disjoint",
            Regime::PairwiseOverlappingJointlyDisjoint => "pairwise-overlapping-jointly-disjoint",
            Regime::JointlyOverlapping => "jointly-overlapping",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub d: usize,
    pub k: usize,
    pub per_class: usize,
    pub regime: Regime,
    pub seed: u64,
    pub scale: f64,
}

impl InstanceSpec {
    pub fn new(d: usize, k: usize, per_class: usize, regime: Regime, seed: u64) -> Self {
        InstanceSpec {
            d,
            k,
            per_class,
            regime,
            seed,
            scale: 1.0,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize, sigma: f64) -> Vec<f64> {
    (0..d)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Uniform point of the standard simplex on `m` vertices.
fn dirichlet(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn centroid(pts: &[Vec<f64>]) -> Vec<f64> {
    let mut c = vec![0.0; pts[0].len()];
    for p in pts {
        c.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    c.iter_mut().for_each(|a| *a /= pts.len() as f64);
    c
}

/// Scale every class about its centroid.
fn dilate(classes: &[Vec<Vec<f64>>], factor: f64) -> Vec<Vec<Vec<f64>>> {
    classes
        .iter()
        .map(|c| {
            let m = centroid(c);
            c.iter()
                .map(|p| {
                    p.iter()
                        .zip(&m)
                        .map(|(x, o)| o + factor * (x - o))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn joint(classes: &[Vec<Vec<f64>>]) -> Result<bool> {
    let refs: Vec<&[Vec<f64>]> = classes.iter().map(Vec::as_slice).collect();
    Ok(hulls_intersect(&refs)?.feasible)
}

fn pairwise(classes: &[Vec<Vec<f64>>]) -> Result<bool> {
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            if !hulls_intersect(&[&classes[i], &classes[j]])?.feasible {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// LP certification of the declared regime.
pub fn certify_regime(dataset: &LabeledDataset, regime: Regime) -> Result<bool> {
    let c = dataset.classes();
    Ok(match regime {
        Regime::JointlyDisjoint => !joint(c)?,
        Regime::PairwiseOverlappingJointlyDisjoint => pairwise(c)? && !joint(c)?,
        Regime::JointlyOverlapping => joint(c)?,
    })
}

/// Well-separated clusters. Accepted only if the hulls stay jointly disjoint
/// after a 25% dilation, which keeps the lifted distance away from zero.
fn clusters(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<f64>>> {
    let sigma = 0.15;
    (0..spec.k)
        .map(|_| {
            let center: Vec<f64> = (0..spec.d).map(|_| rng.random_range(-1.0..1.0)).collect();
            (0..spec.per_class)
                .map(|_| {
                    let n = gaussian(rng, spec.d, sigma);
                    center.iter().zip(n).map(|(c, e)| c + e).collect()
                })
                .collect()
        })
        .collect()
}

/// Facets of a random simplex: class `i` holds the vertices opposite `i` and
/// random points of that facet. Two facets share a face, all of them share
/// nothing.
fn facets(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<f64>>> {
    let k = spec.k;
    let vertices: Vec<Vec<f64>> = (0..k).map(|_| gaussian(rng, spec.d, 1.0)).collect();
    (0..k)
        .map(|i| {
            let face: Vec<&Vec<f64>> = (0..k).filter(|&j| j != i).map(|j| &vertices[j]).collect();
            let mut pts: Vec<Vec<f64>> = face.iter().map(|v| v.to_vec()).collect();
            while pts.len() < spec.per_class {
                let w = dirichlet(rng, face.len());
                let mut p = vec![0.0; spec.d];
                for (wj, v) in w.iter().zip(&face) {
                    p.iter_mut().zip(v.iter()).for_each(|(a, b)| *a += wj * b);
                }
                pts.push(p);
            }
            pts.truncate(spec.per_class.max(k - 1));
            pts
        })
        .collect()
}

/// Gaussian clouds sharing a centroid, so that point lies in every hull.
fn shared_centroid(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<f64>>> {
    let z: Vec<f64> = (0..spec.d).map(|_| rng.random_range(-0.5..0.5)).collect();
    (0..spec.k)
        .map(|_| {
            let n = spec.per_class;
            let mut pts: Vec<Vec<f64>> = (0..n - 1)
                .map(|_| {
                    let e = gaussian(rng, spec.d, 0.5);
                    z.iter().zip(e).map(|(a, b)| a + b).collect()
                })
                .collect();
            // The last point puts the centroid exactly on z.
            let mut last: Vec<f64> = z.iter().map(|a| a * n as f64).collect();
            for p in &pts {
                last.iter_mut().zip(p).for_each(|(a, b)| *a -= b);
            }
            pts.push(last);
            pts
        })
        .collect()
}

/// Deterministic per seed; rejection-samples until the LP certifies the regime.
pub fn generate_instance(spec: &InstanceSpec) -> Result<LabeledDataset> {
    if spec.d == 0 || spec.k < 2 || spec.per_class == 0 {
        return invalid("instance needs d ≥ 1, k ≥ 2 and at least one point per class");
    }
    if !(spec.scale > 0.0) || !spec.scale.is_finite() {
        return invalid("scale must be positive and finite");
    }
    if spec.regime == Regime::PairwiseOverlappingJointlyDisjoint && spec.k < 3 {
        return Err(TsvmError::GenerationFailure(
            "two classes cannot overlap pairwise yet be jointly disjoint".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let classes = match spec.regime {
            Regime::JointlyDisjoint => clusters(spec, &mut rng),
            Regime::PairwiseOverlappingJointlyDisjoint => facets(spec, &mut rng),
            Regime::JointlyOverlapping => shared_centroid(spec, &mut rng),
        };
        let ok = match spec.regime {
            Regime::JointlyDisjoint => !joint(&dilate(&classes, 1.25))?,
            Regime::PairwiseOverlappingJointlyDisjoint => {
                pairwise(&classes)? && !joint(&dilate(&classes, 1.1))?
            }
            Regime::JointlyOverlapping => joint(&classes)?,
        };
        if !ok {
            continue;
        }
        let scaled = classes
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|p| p.into_iter().map(|x| x * spec.scale).collect())
                    .collect()
            })
            .collect();
        let ds = LabeledDataset::new(scaled)?;
        if certify_regime(&ds, spec.regime)? {
            return Ok(ds);
        }
    }
    Err(TsvmError::GenerationFailure(format!(
        "no {} instance with d = {}, k = {} after {MAX_ATTEMPTS} attempts",
        spec.regime, spec.d, spec.k
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::hulls_jointly_intersect;

    #[test]
    fn deterministic() {
        let s = InstanceSpec::new(3, 3, 5, Regime::JointlyDisjoint, 42);
        assert_eq!(
            generate_instance(&s).unwrap(),
            generate_instance(&s).unwrap()
        );
    }

    #[test]
    fn regimes_certify() {
        for regime in [
            Regime::JointlyDisjoint,
            Regime::PairwiseOverlappingJointlyDisjoint,
            Regime::JointlyOverlapping,
        ] {
            for seed in 0..5 {
                let ds = generate_instance(&InstanceSpec::new(2, 3, 4, regime, seed)).unwrap();
                assert!(certify_regime(&ds, regime).unwrap(), "{regime} {seed}");
            }
        }
        let ds =
            generate_instance(&InstanceSpec::new(2, 2, 3, Regime::JointlyOverlapping, 1)).unwrap();
        assert!(hulls_jointly_intersect(&ds).unwrap().feasible);
    }

    #[test]
    fn impossible_regime() {
        let s = InstanceSpec::new(2, 2, 3, Regime::PairwiseOverlappingJointlyDisjoint, 0);
        assert!(matches!(
            generate_instance(&s),
            Err(TsvmError::GenerationFailure(_))
        ));
    }
}
