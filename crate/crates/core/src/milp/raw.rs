use serde::{Deserialize, Serialize};

use super::{MilpInstance, SparseTriplets};
use crate::error::{Error, Result};

/// Optimization direction of a raw (not yet standardized) problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// Constraint comparator of a raw problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

/// One raw constraint: `coeffs . x  <cmp>  rhs` over all variables (dense).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConstraint {
    pub coeffs: Vec<f64>,
    pub cmp: Comparator,
    pub rhs: f64,
}

/// A problem as modeled, before conversion to standard form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawProblem {
    pub name: String,
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<RawConstraint>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub integers: Vec<usize>,
}

/// Bring a raw problem into standard form:
/// maximization is negated into minimization, each `=` constraint becomes a
/// `<=`/`>=` pair, and each `>=` constraint is negated into `<=`. The
/// constraint count can grow (equalities double).
pub fn to_standard_form(raw: &RawProblem) -> Result<MilpInstance> {
    let n = raw.objective.len();
    if raw.lb.len() != n || raw.ub.len() != n {
        return Err(Error::validation(format!(
            "bounds must have length n={n} (lb={}, ub={})",
            raw.lb.len(),
            raw.ub.len()
        )));
    }
    for &i in &raw.integers {
        if i >= n {
            return Err(Error::validation(format!(
                "integer index {i} out of range for n={n}"
            )));
        }
    }

    let c: Vec<f64> = match raw.sense {
        Sense::Min => raw.objective.clone(),
        Sense::Max => raw.objective.iter().map(|v| -v).collect(),
    };

    let mut a = SparseTriplets {
        rows: Vec::new(),
        cols: Vec::new(),
        vals: Vec::new(),
    };
    let mut b = Vec::new();
    let mut push_le = |a: &mut SparseTriplets, b: &mut Vec<f64>, coeffs: &[f64], sign: f64, rhs: f64| {
        let row = b.len();
        for (col, &v) in coeffs.iter().enumerate() {
            if v != 0.0 {
                a.rows.push(row);
                a.cols.push(col);
                a.vals.push(sign * v);
            }
        }
        b.push(sign * rhs);
    };

    for (idx, cons) in raw.constraints.iter().enumerate() {
        if cons.coeffs.len() != n {
            return Err(Error::validation(format!(
                "constraint {idx} has {} coefficients, expected {n}",
                cons.coeffs.len()
            )));
        }
        match cons.cmp {
            Comparator::Le => push_le(&mut a, &mut b, &cons.coeffs, 1.0, cons.rhs),
            Comparator::Ge => push_le(&mut a, &mut b, &cons.coeffs, -1.0, cons.rhs),
            Comparator::Eq => {
                push_le(&mut a, &mut b, &cons.coeffs, 1.0, cons.rhs);
                push_le(&mut a, &mut b, &cons.coeffs, -1.0, cons.rhs);
            }
        }
    }

    let m = b.len();
    let mut mask = vec![false; n];
    for &i in &raw.integers {
        mask[i] = true;
    }
    MilpInstance::new(
        raw.name.clone(),
        None,
        n,
        m,
        c,
        a,
        b,
        raw.lb.clone(),
        raw.ub.clone(),
        mask,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_objective_is_negated() {
        // maximize 2x1 + 3x2 - x3  ->  minimize -2x1 - 3x2 + x3
        let raw = RawProblem {
            name: "neg".into(),
            sense: Sense::Max,
            objective: vec![2.0, 3.0, -1.0],
            constraints: vec![],
            lb: vec![0.0; 3],
            ub: vec![10.0; 3],
            integers: vec![0, 1, 2],
        };
        let inst = to_standard_form(&raw).unwrap();
        assert_eq!(inst.objective(), &[-2.0, -3.0, 1.0]);
    }

    #[test]
    fn ge_constraint_is_negated() {
        // -x1 + 2x3 >= -5  ->  x1 - 2x3 <= 5
        let raw = RawProblem {
            name: "ge".into(),
            sense: Sense::Min,
            objective: vec![0.0, 0.0, 0.0],
            constraints: vec![RawConstraint {
                coeffs: vec![-1.0, 0.0, 2.0],
                cmp: Comparator::Ge,
                rhs: -5.0,
            }],
            lb: vec![0.0; 3],
            ub: vec![f64::INFINITY; 3],
            integers: vec![],
        };
        let inst = to_standard_form(&raw).unwrap();
        assert_eq!(inst.rhs(), &[5.0]);
        let dense = inst.matrix().to_dense(1, 3);
        assert_eq!(dense[0], vec![1.0, 0.0, -2.0]);
    }

    #[test]
    fn equality_becomes_two_rows() {
        let raw = RawProblem {
            name: "eq".into(),
            sense: Sense::Min,
            objective: vec![1.0],
            constraints: vec![RawConstraint {
                coeffs: vec![2.0],
                cmp: Comparator::Eq,
                rhs: 4.0,
            }],
            lb: vec![0.0],
            ub: vec![f64::INFINITY],
            integers: vec![0],
        };
        let inst = to_standard_form(&raw).unwrap();
        assert_eq!(inst.num_cons(), 2);
        assert_eq!(inst.rhs(), &[4.0, -4.0]);
        let dense = inst.matrix().to_dense(2, 1);
        assert_eq!(dense, vec![vec![2.0], vec![-2.0]]);
    }

    #[test]
    fn standard_form_passes_through_unchanged() {
        let raw = RawProblem {
            name: "id".into(),
            sense: Sense::Min,
            objective: vec![-1.0, -1.0],
            constraints: vec![
                RawConstraint {
                    coeffs: vec![1.0, 2.0],
                    cmp: Comparator::Le,
                    rhs: 4.0,
                },
                RawConstraint {
                    coeffs: vec![3.0, 1.0],
                    cmp: Comparator::Le,
                    rhs: 6.0,
                },
            ],
            lb: vec![0.0, 0.0],
            ub: vec![f64::INFINITY, f64::INFINITY],
            integers: vec![0, 1],
        };
        let inst = to_standard_form(&raw).unwrap();
        assert_eq!(inst.objective(), raw.objective.as_slice());
        assert_eq!(inst.rhs(), &[4.0, 6.0]);
        assert_eq!(
            inst.matrix().to_dense(2, 2),
            vec![vec![1.0, 2.0], vec![3.0, 1.0]]
        );
    }

    #[test]
    fn mismatched_constraint_width_is_rejected() {
        let raw = RawProblem {
            name: "bad".into(),
            sense: Sense::Min,
            objective: vec![1.0, 1.0],
            constraints: vec![RawConstraint {
                coeffs: vec![1.0],
                cmp: Comparator::Le,
                rhs: 1.0,
            }],
            lb: vec![0.0, 0.0],
            ub: vec![1.0, 1.0],
            integers: vec![],
        };
        assert!(to_standard_form(&raw).unwrap_err().is_validation());
    }
}
