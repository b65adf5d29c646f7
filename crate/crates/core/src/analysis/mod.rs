//! Diagnostics against a reference clustering and the exact small-instance
//! oracle.

pub mod estimators;
pub mod oracle;
pub mod structure;

pub use estimators::{costly_cluster_frequency, settling_frequency, step_success_frequency};
pub use oracle::{exact_opt, planted_reference, OptClustering, ReferenceKind};
pub use structure::{
    approximation_factor, choose_beta, cluster_costs, gamma_good_flags, good_mass_fractions,
    match_and_lonely, owned_costs, reassignment_cost, settled_flags, settledness_report,
    ApproxFactor, BetaCount, CenterRole, ClusterGoodness, LegalBetaSet, Matching, StructureReport,
};
