//! Tverberg-style multi-class support vector machines.
//!
//! Labeled points are lifted into a tensor space where the whole training
//! set sits on one side of a hyperplane avoiding the origin. Pulling that
//! hyperplane back gives one half-space per class, with the guarantee that
//! the `k` half-spaces have no common point.

// Negated float comparisons are deliberate: they let NaN fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod binary;
pub mod classifier;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod render;
pub mod trainer;
pub mod validation;

pub use classifier::{
    export_regions_2d, predict, region_membership, Bounds, Label, Prediction, RegionExport,
    RegionMembership,
};
pub use error::{Degeneracy, Result, TsvmError};
pub use geometry::{
    build_simplex_frame, lift, restrict_halfspace, score_functions, unlift_point, AffineScore,
    ClassRegion, HalfSpaceD, LabeledDataset, LiftedHalfSpace, LiftedPoint, SimplexFrame,
};
pub use trainer::{
    extract_supports, train, train_simple_tsvm, train_soft, train_tsvm_deterministic,
    train_tsvm_randomized, Algorithm, ModelKind, MulticlassModel, SoftInfo, TrainConfig,
    TrainingInfo,
};
