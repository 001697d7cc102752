//! Sampling `w`-uniform spanning trees and estimating effective resistances
//! through recursive approximate Schur complements.
//!
//! ```
//! use schursample_core::{sample_tree_seeded, SamplerConfig, WeightedMultigraph};
//!
//! let g = WeightedMultigraph::build(&[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)]).unwrap();
//! let tree = sample_tree_seeded(&g, &SamplerConfig::default(), 7).unwrap();
//! assert_eq!(tree.edges.len(), 2);
//! ```

pub mod approx;
pub mod dense;
pub mod error;
pub mod generators;
pub mod graph;
pub mod reff;
pub mod sampler;
pub mod stats;

pub use approx::{
    apx_partial_cholesky, approx_schur, clique_sample, exact_schur_graph, graph_sparsify, lev_score_est,
    split_edges, ApproxConfig, CholeskyOptions, CliqueRule, LeverageEstimates, PartialCholesky,
    SplitMultigraph,
};
pub use dense::{
    check_spectral_approx, effective_resistance_exact, enumerate_trees, laplacian_solve, leverage_score_exact,
    leverage_scores_exact, schur_exact, spanning_tree_count, wilson_sample, DenseLaplacian, SpectralBound,
};
pub use error::{Error, Result};
pub use graph::{EdgeId, EdgeSet, EdgeView, Origin, UnionFind, VertexPartition, WeightedMultigraph};
pub use reff::{estimate_reff, ReffConfig, ReffEstimates};
pub use sampler::{
    generate_spanning_tree, is_good, sample_tree_seeded, sequential_sample, EpsMode, EpsilonSchedule,
    SamplerConfig, SamplerStats, TreeSample,
};
pub use stats::{
    distribution_report, expectation_test, marginal_report, marginal_test, retry_once, tree_distribution_test,
    DistributionTestReport, ExpectationReport, MarginalReport, Verdict,
};
