use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Sparse matrix in triplet storage. Row/col indices are parallel to `vals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseTriplets {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseTriplets {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterate `(row, col, val)` triplets.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    /// Dense `m x n` copy as nested rows.
    pub fn to_dense(&self, m: usize, n: usize) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; n]; m];
        for (r, c, v) in self.iter() {
            dense[r][c] = v;
        }
        dense
    }
}

/// An immutable minimization MILP in standard form:
/// `min c^T x  s.t.  A x <= b,  l <= x <= u,  x_i integral for i in I`.
///
/// Upper bounds may be `f64::INFINITY`; lower bounds are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpInstance {
    name: String,
    seed: Option<u64>,
    n: usize,
    m: usize,
    c: Vec<f64>,
    a: SparseTriplets,
    b: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    integer_mask: Vec<bool>,
}

impl MilpInstance {
    /// Build an instance, checking the standard-form invariants:
    /// in-range triplet indices, no duplicate cells, `l <= u`, finite `l`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        seed: Option<u64>,
        n: usize,
        m: usize,
        c: Vec<f64>,
        a: SparseTriplets,
        b: Vec<f64>,
        lb: Vec<f64>,
        ub: Vec<f64>,
        integer_mask: Vec<bool>,
    ) -> Result<Self> {
        if c.len() != n || lb.len() != n || ub.len() != n || integer_mask.len() != n {
            return Err(Error::validation(format!(
                "variable-sized vectors must have length n={n} (c={}, lb={}, ub={}, mask={})",
                c.len(),
                lb.len(),
                ub.len(),
                integer_mask.len()
            )));
        }
        if b.len() != m {
            return Err(Error::validation(format!(
                "b has length {} but m={m}",
                b.len()
            )));
        }
        if a.rows.len() != a.cols.len() || a.rows.len() != a.vals.len() {
            return Err(Error::validation("triplet arrays have mismatched lengths"));
        }
        let mut seen = HashSet::with_capacity(a.nnz());
        for (r, c_, _) in a.iter() {
            if r >= m || c_ >= n {
                return Err(Error::validation(format!(
                    "triplet ({r}, {c_}) out of range for {m}x{n} matrix"
                )));
            }
            if !seen.insert((r, c_)) {
                return Err(Error::validation(format!("duplicate triplet at ({r}, {c_})")));
            }
        }
        for i in 0..n {
            if !lb[i].is_finite() {
                return Err(Error::validation(format!("lower bound {i} must be finite")));
            }
            if lb[i] > ub[i] {
                return Err(Error::validation(format!(
                    "bounds crossed at {i}: {} > {}",
                    lb[i], ub[i]
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            seed,
            n,
            m,
            c,
            a,
            b,
            lb,
            ub,
            integer_mask,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of decision variables.
    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Number of constraints.
    pub fn num_cons(&self) -> usize {
        self.m
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &SparseTriplets {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lb
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.ub
    }

    pub fn integer_mask(&self) -> &[bool] {
        &self.integer_mask
    }

    pub fn is_integer(&self, i: usize) -> bool {
        self.integer_mask[i]
    }

    /// `A x` for a full-length vector of variable values.
    pub fn lhs(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut lhs = vec![0.0; self.m];
        for (r, c, v) in self.a.iter() {
            lhs[r] += v * x[c];
        }
        lhs
    }

    /// `c^T x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(ci, xi)| ci * xi).sum()
    }

    /// Serialize to the instance JSON schema (infinite upper bounds as `null`).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(InstanceFile::from(self)).expect("instance serialization")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn write_json(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s)
    }
}

/// On-disk schema. `ub` entries are `null` for `+inf`.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    name: String,
    seed: Option<u64>,
    n: usize,
    m: usize,
    c: Vec<f64>,
    #[serde(rename = "A")]
    a: SparseTriplets,
    b: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<Option<f64>>,
    integer_mask: Vec<bool>,
}

impl From<&MilpInstance> for InstanceFile {
    fn from(inst: &MilpInstance) -> Self {
        InstanceFile {
            name: inst.name.clone(),
            seed: inst.seed,
            n: inst.n,
            m: inst.m,
            c: inst.c.clone(),
            a: inst.a.clone(),
            b: inst.b.clone(),
            lb: inst.lb.clone(),
            ub: inst
                .ub
                .iter()
                .map(|&u| if u.is_infinite() { None } else { Some(u) })
                .collect(),
            integer_mask: inst.integer_mask.clone(),
        }
    }
}

impl TryFrom<InstanceFile> for MilpInstance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let ub = f
            .ub
            .into_iter()
            .map(|u| u.unwrap_or(f64::INFINITY))
            .collect();
        MilpInstance::new(
            f.name,
            f.seed,
            f.n,
            f.m,
            f.c,
            f.a,
            f.b,
            f.lb,
            ub,
            f.integer_mask,
        )
    }
}

/// An integer-valued assignment to all decision variables.
///
/// Values are stored as `f64` so that evaluation shares one code path with
/// continuous relaxation output; [`evaluate`](super::evaluate) enforces
/// integrality (within [`INT_TOL`](super::INT_TOL)) as part of feasibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution(pub Vec<f64>);

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Chebyshev (infinity-norm) distance to another solution.
    pub fn linf_distance(&self, other: &Solution) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for Solution {
    fn from(v: Vec<f64>) -> Self {
        Solution(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MilpInstance {
        MilpInstance::new(
            "t",
            None,
            2,
            2,
            vec![-1.0, -1.0],
            SparseTriplets {
                rows: vec![0, 0, 1, 1],
                cols: vec![0, 1, 0, 1],
                vals: vec![1.0, 2.0, 3.0, 1.0],
            },
            vec![4.0, 6.0],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            vec![true, true],
        )
        .unwrap()
    }

    #[test]
    fn rejects_out_of_range_triplets() {
        let err = MilpInstance::new(
            "bad",
            None,
            1,
            1,
            vec![1.0],
            SparseTriplets {
                rows: vec![1],
                cols: vec![0],
                vals: vec![1.0],
            },
            vec![1.0],
            vec![0.0],
            vec![1.0],
            vec![true],
        )
        .unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn rejects_duplicate_triplets() {
        let err = MilpInstance::new(
            "dup",
            None,
            1,
            1,
            vec![1.0],
            SparseTriplets {
                rows: vec![0, 0],
                cols: vec![0, 0],
                vals: vec![1.0, 2.0],
            },
            vec![1.0],
            vec![0.0],
            vec![1.0],
            vec![true],
        )
        .unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn rejects_crossed_bounds() {
        let err = MilpInstance::new(
            "crossed",
            None,
            1,
            0,
            vec![1.0],
            SparseTriplets {
                rows: vec![],
                cols: vec![],
                vals: vec![],
            },
            vec![],
            vec![2.0],
            vec![1.0],
            vec![true],
        )
        .unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let inst = tiny();
        let s = inst.to_json_string();
        let back = MilpInstance::from_json_str(&s).unwrap();
        assert_eq!(inst, back);
        // Infinite upper bounds serialize as null.
        assert!(s.contains("null"));
    }

    #[test]
    fn lhs_matches_dense_product() {
        let inst = tiny();
        let x = [2.0, 1.0];
        assert_eq!(inst.lhs(&x), vec![4.0, 7.0]);
        assert_eq!(inst.objective_value(&x), -3.0);
    }
}
