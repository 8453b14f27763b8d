//! Delone checks, approximate-subgroup certificates, log-image checks,
//! linearization of homomorphisms and the power counterexample.

mod delone;
mod index;
mod linearize;
mod logimage;
mod powers;
mod products;

pub use delone::{
    covering_radius, delone_scale, delone_two_scale, min_separation, CoveringReport, DeloneReport,
    DeloneScale, SeparationReport,
};
pub use index::Metric;
pub use linearize::{linearize_hom, HomValues, LinearizationResult};
pub use logimage::{
    check_bracket_word_identity, check_word_sum_identity, log_image_delone, n0_from_certificates,
    LogImageReport, WordIdentityReport,
};
pub use powers::{counterexample_powers, PowersReport};
pub use products::{
    approx_certificate, product_patch, product_patch_with_budget, ApproxCertificate, Factorization,
    DEFAULT_PRODUCT_BUDGET,
};

use crate::cutproject::CutProjectError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("fewer than two points in the core of radius {core_radius}")]
    EmptyCore { core_radius: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("budget of {budget} points exceeded ({partial} found so far)")]
    BudgetExceeded { partial: u64, budget: u64 },
    #[error("product {product:?} has no factorization f * l with l in the patch; enlarge the patch region")]
    FactorizationGap { product: Vec<(i64, i64)> },
    #[error("patch does not span: rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error(transparent)]
    CutProject(#[from] CutProjectError),
    #[error("internal: {0}")]
    Internal(String),
}

/// Pass/fail thresholds shared by the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Separation must exceed this.
    pub min_separation: f64,
    /// Allowed relative change of the separation between scales.
    pub separation_rel_tol: f64,
    /// Allowed relative change of the covering radius between scales.
    pub covering_rel_tol: f64,
    /// Allowed residual growth ratio for linearization.
    pub growth_ratio_tol: f64,
    /// Allowed coefficient drift for linearization.
    pub drift_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            min_separation: 1e-9,
            separation_rel_tol: 1e-9,
            covering_rel_tol: 0.10,
            growth_ratio_tol: 1.05,
            drift_tol: 1e-6,
        }
    }
}
