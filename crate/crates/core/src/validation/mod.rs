//! Executable versions of the theorems behind the models, independent
//! oracles, instance generators and the suites that tie them together.

mod checks;
mod generate;
mod oracles;
pub mod pinned;
mod suites;

pub use checks::{
    baseline_1vA_AvA, check_containment, check_hull_intersection, check_k2_equivalence,
    check_orthogonal_equivariance, check_supports, check_translation_behavior, random_orthogonal,
    train_hard, BaselineReport, ContainmentReport, EquivarianceReport, HullIntersectionReport,
    K2Report, SupportReport, TranslationReport,
};
pub use generate::{certify_regime, generate_instance, InstanceSpec, Regime, MAX_ATTEMPTS};
pub use oracles::{
    binary_qp_oracle, brute_force_tsvm, functional_deviation, halfspace_deviation, pg_min_norm,
    project_simplex, BRUTE_FORCE_CAP,
};
pub use suites::{
    run_all, run_suite, scan_slope, trial_seed, SuiteOptions, SuiteReport, Trial, SUITES,
};
