//! Persistent homology of embedding point clouds and bootstrap comparison of
//! in-distribution and out-of-distribution samples.
//!
//! The pipeline: a [`PointCloud`] is subsampled with replacement, each sample's
//! Vietoris-Rips H0/H1 diagram is computed ([`persistence`]), reduced to
//! lifetime statistics ([`summaries`]), and the statistics are gathered into
//! percentile confidence intervals ([`bootstrap`]). [`compare`] sets the
//! intervals of Train, Test and OOD runs side by side and flags OOD when the
//! candidate's H0 average lifetime interval lies above Train's.

pub mod bootstrap;
pub mod compare;
pub mod error;
pub mod io;
pub mod persistence;
pub mod pointcloud;
pub mod rips;
pub mod summaries;
pub mod synth;

pub use bootstrap::{
    draw_sample, percentile_ci, run_bootstrap, run_bootstrap_with, BootstrapConfig, BootstrapOutput, EmptyPolicy,
    RunControl, StatisticDistribution,
};
pub use compare::{compare_distributions, ood_verdict, ComparisonReport, Decision, DistributionSet, OodVerdict};
pub use error::{Error, Result};
pub use persistence::{
    betti_at_scale, compute_h0, compute_h1, compute_persistence, Bar, BettiVector, PersistenceConfig,
    PersistenceDiagram, ThresholdPolicy,
};
pub use pointcloud::{enclosing_radius, pairwise_distances, DistanceMatrix, PointCloud, Role};
pub use rips::{build_filtration, simplex_diameter, Filtration, Simplex};
pub use summaries::{summarize, DiagramSummary, StatKind, StatisticId};
pub use synth::{generate, SynthSpec};
