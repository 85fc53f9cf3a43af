use serde::{Deserialize, Serialize};

use super::{MilpInstance, Solution, FEAS_TOL, INT_TOL};
use crate::error::{Error, Result};

/// Exact evaluation of a solution against an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// `A x`, one entry per constraint.
    pub lhs: Vec<f64>,
    /// `c^T x`.
    pub obj: f64,
    /// Raw feasible state `b - lhs`; positive means satisfied.
    pub f_raw: Vec<f64>,
    /// Feasible state scaled by `|b| + |lhs|` elementwise, so every entry
    /// lies in `[-1, 1]`. A `0/0` entry is defined as `0` (exactly tight).
    pub f_scaled: Vec<f64>,
    /// All constraints satisfied, all bounds respected, all integral.
    pub feasible: bool,
    /// Number of variables outside `[l_i, u_i]`.
    pub n_bound_violations: usize,
    /// Number of constraints with `f_raw < 0` (beyond tolerance).
    pub n_constraint_violations: usize,
}

/// Evaluate `x` against `inst`: left-hand sides, objective, raw and scaled
/// feasible state, and the feasibility verdict.
pub fn evaluate(inst: &MilpInstance, x: &Solution) -> Result<EvalResult> {
    if x.len() != inst.num_vars() {
        return Err(Error::validation(format!(
            "solution has length {} but instance has n={}",
            x.len(),
            inst.num_vars()
        )));
    }
    let lhs = inst.lhs(x.as_slice());
    let obj = inst.objective_value(x.as_slice());
    let b = inst.rhs();

    let mut f_raw = Vec::with_capacity(lhs.len());
    let mut f_scaled = Vec::with_capacity(lhs.len());
    let mut n_constraint_violations = 0usize;
    for (j, &lhs_j) in lhs.iter().enumerate() {
        let raw = b[j] - lhs_j;
        let denom = b[j].abs() + lhs_j.abs();
        // Dividing each term separately keeps the ratio finite even for
        // magnitudes where `b - lhs` would overflow.
        let scaled = if denom > 0.0 {
            b[j] / denom - lhs_j / denom
        } else {
            0.0
        };
        if raw < -FEAS_TOL {
            n_constraint_violations += 1;
        }
        f_raw.push(raw);
        f_scaled.push(scaled);
    }

    let n_bound_violations = count_bound_violations(inst, x);

    let integral = x
        .as_slice()
        .iter()
        .enumerate()
        .all(|(i, &xi)| !inst.is_integer(i) || (xi - xi.round()).abs() <= INT_TOL);

    let feasible = n_constraint_violations == 0 && n_bound_violations == 0 && integral;

    Ok(EvalResult {
        lhs,
        obj,
        f_raw,
        f_scaled,
        feasible,
        n_bound_violations,
        n_constraint_violations,
    })
}

/// `|{ i : x_i < l_i or x_i > u_i }|`.
pub fn count_bound_violations(inst: &MilpInstance, x: &Solution) -> usize {
    let lb = inst.lower_bounds();
    let ub = inst.upper_bounds();
    x.as_slice()
        .iter()
        .enumerate()
        .filter(|&(i, &xi)| xi < lb[i] || xi > ub[i])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::SparseTriplets;
    use approx::assert_abs_diff_eq;

    /// Instance whose single purpose is to produce chosen lhs values:
    /// rows are 1-wide, so lhs_j = x_j.
    fn diag_instance(b: Vec<f64>) -> MilpInstance {
        let m = b.len();
        MilpInstance::new(
            "diag",
            None,
            m,
            m,
            vec![1.0; m],
            SparseTriplets {
                rows: (0..m).collect(),
                cols: (0..m).collect(),
                vals: vec![1.0; m],
            },
            b,
            vec![f64::MIN; m].iter().map(|_| -1e18).collect(),
            vec![f64::INFINITY; m],
            vec![true; m],
        )
        .unwrap()
    }

    #[test]
    fn worked_observation_example() {
        // lhs = (31, 4) against b = (30, 5): constraint 1 violated,
        // constraint 2 satisfied.
        let inst = diag_instance(vec![30.0, 5.0]);
        let res = evaluate(&inst, &Solution(vec![31.0, 4.0])).unwrap();
        assert_eq!(res.f_raw, vec![-1.0, 1.0]);
        assert_eq!(res.n_constraint_violations, 1);
        assert_abs_diff_eq!(res.f_scaled[0], -1.0 / 61.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.f_scaled[1], 1.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_solution_with_positive_rhs_is_satisfied() {
        let inst = diag_instance(vec![3.0, 7.0]);
        let res = evaluate(&inst, &Solution(vec![0.0, 0.0])).unwrap();
        assert_eq!(res.f_raw, vec![3.0, 7.0]);
        assert_eq!(res.n_constraint_violations, 0);
        assert!(res.feasible);
    }

    #[test]
    fn zero_over_zero_scales_to_zero() {
        let inst = diag_instance(vec![0.0]);
        let res = evaluate(&inst, &Solution(vec![0.0])).unwrap();
        assert_eq!(res.f_scaled, vec![0.0]);
        assert!(res.feasible);
    }

    #[test]
    fn bound_violations_count_additively() {
        let inst = MilpInstance::new(
            "bv",
            None,
            3,
            0,
            vec![0.0; 3],
            SparseTriplets {
                rows: vec![],
                cols: vec![],
                vals: vec![],
            },
            vec![],
            vec![0.0; 3],
            vec![f64::INFINITY; 3],
            vec![true; 3],
        )
        .unwrap();
        assert_eq!(count_bound_violations(&inst, &Solution(vec![3.0, 9.0, -2.0])), 1);
        assert_eq!(count_bound_violations(&inst, &Solution(vec![1.0, 0.0, 2.0])), 0);
        assert_eq!(count_bound_violations(&inst, &Solution(vec![-1.0, -1.0, 0.0])), 2);
    }

    #[test]
    fn non_integral_entries_break_feasibility() {
        let inst = diag_instance(vec![10.0]);
        let res = evaluate(&inst, &Solution(vec![0.5])).unwrap();
        assert!(!res.feasible);
        assert_eq!(res.n_constraint_violations, 0);
    }

    #[test]
    fn dimension_mismatch_is_validation_error() {
        let inst = diag_instance(vec![1.0]);
        assert!(evaluate(&inst, &Solution(vec![1.0, 2.0]))
            .unwrap_err()
            .is_validation());
    }
}
