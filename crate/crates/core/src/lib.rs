//! Numerical admissibility of dominant self-rational maps of generic
//! polarized K3 surfaces.
//!
//! Given a genus `g`, a topological degree `deg` and an algebraic degree `l`,
//! the [`feasibility`] engine runs the known necessary conditions (square
//! degree, eigenvalue divisibility, β-decomposition with parity, the Chern
//! class bound and the exceptional-tree predicates) and reports either a
//! witness or the first constraint that fails.
//!
//! ```
//! use k3maps::{check, ConstraintProfile};
//!
//! let v = check(2, 9, 5, &ConstraintProfile::basic()).unwrap();
//! assert!(v.admissible);
//! assert_eq!(v.lambda, vec![3, -3]);
//! assert_eq!(v.witness_partition.unwrap().parts(), &[2, 2]);
//! ```

pub mod constraints;
pub mod feasibility;
pub mod lattice;
pub mod severi;
pub mod tree;

/// Exact rational used for every non-integral quantity.
pub type Rational = num_rational::BigRational;

pub use constraints::{
    amerik_admits, amerik_bound, amerik_score, enumerate_beta_partitions, lambda_candidates,
    required_sum_sq, square_root_degree, BetaPartition, LambdaWitness,
};
pub use feasibility::{
    admissible_l, check, check_with_budget, first_admissible, paper_table_report, published_rows,
    witness_tree, AdmissibilityTable, ConstraintProfile, FailureReason, FeasibilityError,
    FeasibilityVerdict, MatchStatus, ReportRow, TableReport,
};
pub use lattice::{
    canonical_class, degree_from_pullback, intersect, pullback_polarization, BlowupContext,
    DivisorClass, PolarizedGenus,
};
pub use severi::{
    arithmetic_genus, expected_severi_dimension, genericity_threshold, genus_ratio, node_count,
};
pub use tree::{
    classify_shapes, ExceptionalTree, ForestShape, ShapeBudget, TreeError, TreeNode, TreeReport,
};
