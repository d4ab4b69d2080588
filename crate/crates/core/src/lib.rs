//! Exact dominating-set laboratory for the random graph G(n,p).
//!
//! * [`graph`]: bitmask graphs, seeded G(n,p) sampling, domination checks.
//! * [`solver`]: exact counts of dominating / near-dominating k-sets.
//! * [`moments`]: log-domain first and second moments of those counts and
//!   calibration of p against a target E[X].
//! * [`symmetry`]: degree-preserving four-vertex swaps with certificates.
//! * [`oracle`]: brute force over the whole labeled graph space, n ≤ 7.
//! * [`experiment`]: batch drivers that put the formulas next to sampled
//!   statistics.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod logreal;
pub mod moments;
pub mod oracle;
pub mod rng;
pub mod solver;
pub mod symmetry;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::{
    generate_gnp, induced_subgraph, is_dominating, toggle_edges, undominated, Graph,
};
pub use logreal::LogReal;
pub use moments::{
    asymptotic_p, calibrate_p, corollary_bounds, expected_n, expected_n2, expected_x,
    expected_x2, f_term, phi, prob_single_neighbor, w_terms, CorollaryBounds, ModelParams,
    MomentReport, WTerms,
};
pub use oracle::{enumerate_graph_space, GraphSpace, OracleReport};
pub use rng::RngStream;
pub use solver::{
    classify_instance, count_k_sets, count_k_sets_naive, find_dominating_sets,
    find_near_witness, ClassTag, InstanceClass, SolveCounts,
};
pub use symmetry::{
    apply_mapping, find_forward_witness, find_reverse_witness, verify_certificate, Direction,
    MappingCertificate, Quad,
};
pub use vertex_set::{VertexSet, MAX_VERTICES};
