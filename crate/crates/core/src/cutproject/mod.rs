//! Cut-and-project schemes over real quadratic fields and their model sets.

mod config;
mod patch;
mod scheme;

pub use config::{builtin_algebra, load_scheme_config, SchemeConfig};
pub use patch::{
    abelianize_patch, enumerate_model_set, enumerate_model_set_with_budget, intersect_derived,
    pisot_patch, region, ModelSetPatch, PatchKind, PatchMeta, PointSet, Window,
    DEFAULT_CANDIDATE_BUDGET, DOUBLING_CHECK_LIMIT,
};
pub use scheme::{
    build_scheme, verify_lattice_closure, ClosureCertificate, ClosureWitness, LatticeLaw,
    LatticePoint, LevelLaw, Pair, Scheme,
};
pub(crate) use scheme::{pair_abs_le, rational_parts};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CutProjectError {
    #[error("lattice is not closed under the group law: {witness}")]
    ClosureFailed { witness: ClosureWitness },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("enumeration needs about {count} candidates, budget is {budget}")]
    RegionTooLarge { count: u128, budget: u128 },
    #[error("not a Pisot number: {0}")]
    NotPisot(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("config: {0}")]
    Config(String),
    #[error("internal: {0}")]
    Internal(String),
}
