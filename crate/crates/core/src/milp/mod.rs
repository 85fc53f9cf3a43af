//! Canonical standard-form MILP data model and exact solution evaluation.
//!
//! A problem is held as `min c^T x  s.t.  A x <= b,  l <= x <= u`, with the
//! integrality index set `I`. Arbitrary senses and comparators are brought
//! into this shape by [`to_standard_form`].

mod eval;
mod instance;
mod raw;

pub use eval::{count_bound_violations, evaluate, EvalResult};
pub use instance::{MilpInstance, Solution, SparseTriplets};
pub use raw::{to_standard_form, Comparator, RawConstraint, RawProblem, Sense};

/// Tolerance on `b - Ax` below which a constraint counts as violated.
pub const FEAS_TOL: f64 = 1e-9;
/// Tolerance for the integrality check `|x_i - round(x_i)| <= INT_TOL`.
pub const INT_TOL: f64 = 1e-9;
