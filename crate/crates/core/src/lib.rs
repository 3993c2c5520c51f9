//! Metric geometry of the spherical Veronese variety and its use for
//! answering "how likely is a random symmetric tensor to be close to
//! rank one?".
//!
//! The crate has two halves that check each other:
//!
//! * closed forms ([`tube_formula`], [`geometry`]): reach, curvature
//!   coefficients, tube volumes and closeness probabilities of the
//!   Veronese variety under the Bombieri–Weyl metric;
//! * sampling ([`ensembles`], [`solver`], [`mc`]): Kostlan / GOE random
//!   tensors, a best rank-one approximation solver and Monte-Carlo and
//!   finite-difference estimators of the same quantities.
//!
//! Symmetric tensors are stored as homogeneous polynomials in the
//! orthonormal Bombieri–Weyl basis (see [`tensor_space`]), so the
//! Frobenius norm of a tensor is the Euclidean norm of its coordinates.

pub mod ensembles;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mc;
pub mod numeric;
pub mod quadrature;
pub mod solver;
pub mod tensor_space;
pub mod tube_formula;

pub use ensembles::{sample_goe, sample_kostlan, sample_normal_w, GoeSample, SeedSpec};
pub use error::{Error, Result};
pub use geometry::{
    geodesic_curvature_norm, normal_split, pullback_factor, tangent_basis, weingarten, NormalSplit,
    WeingartenMatrix,
};
pub use linalg::SymMatrix;
pub use mc::{
    check_geodesic_curvature, check_metric_pullback, mc_goe_det, mc_probability,
    mc_weingarten_stats, FiniteDifferenceReport, McConfig, McReport, OracleKind, ProbabilityRun,
    SampleRecord, WeingartenReport,
};
pub use solver::{
    best_rank_one, eckart_young_distance, entanglement_geometric, entanglement_log,
    EntanglementLog, RankOneResult, SolverMethod, SolverOptions,
};
pub use tensor_space::{
    enumerate_multi_indices, poly_to_sym_matrix, sym_matrix_to_poly, veronese, BwPolynomial,
    MultiIndex, SpaceParams, TensorSpace,
};
pub use tube_formula::{
    curvature_coefficient, curvature_table, expected_gj, goe_det_expectation, j_integral,
    prob_close_rank_one, prob_rational_curve, prob_sym3_matrices, reach, tube_volume,
    unique_approx_lower_bound, veronese_volume, CurvatureTable, DetExpansionPoly, Flagged,
    ReachResult,
};
