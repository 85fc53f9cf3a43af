//! Self-contained LP solver: bounded-variable primal simplex on the dense
//! slack-form tableau.
//!
//! Solves `min c^T x  s.t.  A x <= b,  l <= x <= u` with finite `l` and
//! possibly infinite `u`. Infinite bounds are handled natively by the
//! bounded-variable ratio test (no big-M). Infeasible starts go through a
//! phase-1 pass that drives artificial variables to zero. Bland's rule is
//! engaged after `2(n+m)` pivots without objective improvement.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{MilpInstance, Solution};

/// Reduced-cost optimality tolerance.
const DTOL: f64 = 1e-9;
/// Smallest pivot element magnitude accepted.
const PIVOT_TOL: f64 = 1e-10;
/// Rate threshold below which a basic variable does not limit the step.
const RATE_TOL: f64 = 1e-10;
/// Ratio-test tie window.
const TIE_TOL: f64 = 1e-9;
/// Phase-1 objective below this is declared feasible.
const PHASE1_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an LP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Continuous optimum, present only when `status == Optimal`.
    pub x_cont: Option<Vec<f64>>,
    /// Objective value at the optimum (`-inf` when unbounded, `inf` when
    /// infeasible).
    pub obj: f64,
    /// Pivot count, for diagnostics and termination assertions.
    pub pivots: usize,
}

/// Solve the LP relaxation of `inst` (integrality dropped).
pub fn solve_relaxation(inst: &MilpInstance) -> Result<LpResult> {
    solve_relaxation_with_bounds(inst, inst.lower_bounds(), inst.upper_bounds())
}

/// Solve the LP relaxation with overriding variable bounds (used by
/// branch-and-bound nodes).
pub fn solve_relaxation_with_bounds(inst: &MilpInstance, lb: &[f64], ub: &[f64]) -> Result<LpResult> {
    let n = inst.num_vars();
    let m = inst.num_cons();
    if lb.len() != n || ub.len() != n {
        return Err(Error::validation("bound overrides must have length n"));
    }
    for i in 0..n {
        if !lb[i].is_finite() {
            return Err(Error::validation("lower bounds must be finite"));
        }
        if lb[i] > ub[i] {
            // A branching step can cross bounds; that node is simply empty.
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                x_cont: None,
                obj: f64::INFINITY,
                pivots: 0,
            });
        }
    }
    let mut solver = Simplex::new(inst, lb, ub);
    solver.solve()
}

/// Round the LP optimum half-away-from-zero into an integral starting point
/// and return it with the relaxation objective `obj_r` (the lower bound).
/// The rounded point may be infeasible.
pub fn initial_solution(inst: &MilpInstance) -> Result<(Solution, f64)> {
    let res = solve_relaxation(inst)?;
    match res.status {
        LpStatus::Optimal => {
            let x_cont = res.x_cont.expect("optimal result carries a solution");
            let x0 = Solution(x_cont.iter().map(|v| v.round()).collect());
            Ok((x0, res.obj))
        }
        status => Err(Error::LpNotOptimal(status)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoundHit {
    Lower,
    Upper,
}

struct Simplex {
    n_struct: usize,
    ncols: usize,
    tab: Array2<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    real_cost: Vec<f64>,
    artificials: Vec<usize>,
    pivots: usize,
    bland: bool,
    stall: usize,
    best_obj: f64,
    pivot_cap: usize,
    bland_after: usize,
}

impl Simplex {
    fn new(inst: &MilpInstance, lb: &[f64], ub: &[f64]) -> Self {
        let n = inst.num_vars();
        let m = inst.num_cons();

        // Column layout: structurals, slacks, then one artificial per
        // initially-violated row.
        let mut dense = Array2::<f64>::zeros((m, n + m));
        for (r, c, v) in inst.matrix().iter() {
            dense[[r, c]] = v;
        }
        for r in 0..m {
            dense[[r, n + r]] = 1.0;
        }

        let mut lower: Vec<f64> = lb.to_vec();
        let mut upper: Vec<f64> = ub.to_vec();
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));

        // Slack values at the all-at-lower-bound starting point.
        let slack0: Vec<f64> = {
            let lhs = inst.lhs(&lower[..n]);
            inst.rhs().iter().zip(lhs).map(|(&b, l)| b - l).collect()
        };

        let art_rows: Vec<usize> = (0..m).filter(|&r| slack0[r] < 0.0).collect();
        let ncols = n + m + art_rows.len();
        let mut tab = Array2::<f64>::zeros((m, ncols));
        tab.slice_mut(ndarray::s![.., ..n + m]).assign(&dense);

        let mut basis = vec![0usize; m];
        let mut beta = vec![0.0; m];
        let mut state = vec![VarState::AtLower; ncols];
        let mut artificials = Vec::with_capacity(art_rows.len());
        let mut next_art = n + m;
        for r in 0..m {
            if slack0[r] < 0.0 {
                // Row r: A_r x + s_r - a_r = b_r, with the artificial basic.
                // The basis matrix entry is -1, so the tableau row flips sign.
                tab[[r, next_art]] = -1.0;
                for j in 0..ncols {
                    tab[[r, j]] = -tab[[r, j]];
                }
                lower.push(0.0);
                upper.push(f64::INFINITY);
                basis[r] = next_art;
                beta[r] = -slack0[r];
                state[next_art] = VarState::Basic;
                artificials.push(next_art);
                next_art += 1;
            } else {
                basis[r] = n + r;
                beta[r] = slack0[r];
                state[n + r] = VarState::Basic;
            }
        }

        let mut real_cost = vec![0.0; ncols];
        real_cost[..n].copy_from_slice(inst.objective());

        let nm = n + m;
        Simplex {
            n_struct: n,
            ncols,
            tab,
            beta,
            basis,
            state,
            lower,
            upper,
            cost: vec![0.0; ncols],
            real_cost,
            artificials,
            pivots: 0,
            bland: false,
            stall: 0,
            best_obj: f64::INFINITY,
            pivot_cap: (50 * nm).max(1000),
            bland_after: 2 * nm,
        }
    }

    fn bound_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Basic => unreachable!("basic variable has no bound value"),
        }
    }

    fn objective(&self) -> f64 {
        let mut obj = 0.0;
        for (i, &bi) in self.basis.iter().enumerate() {
            obj += self.cost[bi] * self.beta[i];
        }
        for j in 0..self.ncols {
            if self.state[j] != VarState::Basic && self.cost[j] != 0.0 {
                obj += self.cost[j] * self.bound_value(j);
            }
        }
        obj
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let m = self.basis.len();
        let mut d = self.cost.clone();
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = self.tab.row(i);
                for j in 0..self.ncols {
                    d[j] -= cb * row[j];
                }
            }
        }
        d
    }

    /// Pick the entering column, or `None` when optimal. `skip` marks
    /// columns that failed the pivot-magnitude check this iteration.
    fn entering(&self, d: &[f64], skip: &[bool]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if skip[j] || self.state[j] == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let improving = match self.state[j] {
                VarState::AtLower => d[j] < -DTOL,
                VarState::AtUpper => d[j] > DTOL,
                VarState::Basic => false,
            };
            if !improving {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            let score = d[j].abs();
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run_phase(&mut self) -> Result<LpStatus> {
        self.bland = false;
        self.stall = 0;
        self.best_obj = f64::INFINITY;
        loop {
            if self.pivots >= self.pivot_cap {
                return Err(Error::numerical(format!(
                    "pivot cap {} exceeded",
                    self.pivot_cap
                )));
            }
            let d = self.reduced_costs();
            let mut skip = vec![false; self.ncols];
            let step = loop {
                let Some(q) = self.entering(&d, &skip) else {
                    return Ok(LpStatus::Optimal);
                };
                match self.ratio_test(q) {
                    RatioOutcome::Unbounded => return Ok(LpStatus::Unbounded),
                    RatioOutcome::TinyPivot => {
                        // Retry with another column before declaring breakdown.
                        skip[q] = true;
                        if skip.iter().filter(|&&s| s).count() >= self.ncols {
                            return Err(Error::numerical("degenerate pivot: no usable column"));
                        }
                    }
                    RatioOutcome::Step(step) => break step,
                }
            };
            self.apply_step(step);
            self.pivots += 1;

            let obj = self.objective();
            if obj < self.best_obj - 1e-12 {
                self.best_obj = obj;
                self.stall = 0;
            } else {
                self.stall += 1;
                if self.stall > self.bland_after {
                    self.bland = true;
                }
            }
        }
    }

    fn ratio_test(&self, q: usize) -> RatioOutcome {
        let dir: f64 = match self.state[q] {
            VarState::AtLower => 1.0,
            VarState::AtUpper => -1.0,
            VarState::Basic => unreachable!(),
        };
        let m = self.basis.len();
        let mut t_min = f64::INFINITY;
        let mut candidates: Vec<(usize, BoundHit, f64)> = Vec::new();
        for i in 0..m {
            let y = self.tab[[i, q]];
            let rate = -dir * y; // d(basic_i)/dt
            if rate > RATE_TOL {
                let head = (self.upper[self.basis[i]] - self.beta[i]).max(0.0);
                if head.is_finite() {
                    let t = head / rate;
                    if t < t_min - TIE_TOL {
                        t_min = t;
                        candidates.clear();
                    }
                    if t <= t_min + TIE_TOL {
                        candidates.push((i, BoundHit::Upper, y.abs()));
                    }
                }
            } else if rate < -RATE_TOL {
                let head = (self.beta[i] - self.lower[self.basis[i]]).max(0.0);
                if head.is_finite() {
                    let t = head / -rate;
                    if t < t_min - TIE_TOL {
                        t_min = t;
                        candidates.clear();
                    }
                    if t <= t_min + TIE_TOL {
                        candidates.push((i, BoundHit::Lower, y.abs()));
                    }
                }
            }
        }

        let t_flip = self.upper[q] - self.lower[q];
        if t_flip <= t_min {
            if t_flip.is_infinite() {
                return RatioOutcome::Unbounded;
            }
            return RatioOutcome::Step(Step {
                q,
                dir,
                t: t_flip,
                pivot_row: None,
            });
        }
        if t_min.is_infinite() {
            return RatioOutcome::Unbounded;
        }

        // Drop candidates whose actual ratio exceeds the winning one.
        candidates.retain(|&(i, hit, _)| {
            let y = self.tab[[i, q]];
            let rate = -dir * y;
            let head = match hit {
                BoundHit::Upper => (self.upper[self.basis[i]] - self.beta[i]).max(0.0),
                BoundHit::Lower => (self.beta[i] - self.lower[self.basis[i]]).max(0.0),
            };
            head / rate.abs() <= t_min + TIE_TOL
        });
        let chosen = if self.bland {
            candidates
                .iter()
                .min_by_key(|&&(i, _, _)| self.basis[i])
                .copied()
        } else {
            // Largest pivot magnitude among ties, for stability.
            candidates
                .iter()
                .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
                .copied()
        };
        let Some((row, hit, py)) = chosen else {
            return RatioOutcome::Unbounded;
        };
        if py < PIVOT_TOL {
            return RatioOutcome::TinyPivot;
        }
        RatioOutcome::Step(Step {
            q,
            dir,
            t: t_min.max(0.0),
            pivot_row: Some((row, hit)),
        })
    }

    fn apply_step(&mut self, step: Step) {
        let Step { q, dir, t, pivot_row } = step;
        let m = self.basis.len();
        if t > 0.0 {
            for i in 0..m {
                self.beta[i] -= dir * t * self.tab[[i, q]];
            }
        }
        match pivot_row {
            None => {
                // Bound flip: the entering variable runs to its other bound.
                self.state[q] = match self.state[q] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    VarState::Basic => unreachable!(),
                };
                log::trace!("simplex flip col {q} t={t:.3e}");
            }
            Some((r, hit)) => {
                let entering_value = self.bound_value(q) + dir * t;
                let leaving = self.basis[r];
                self.state[leaving] = match hit {
                    BoundHit::Lower => VarState::AtLower,
                    BoundHit::Upper => VarState::AtUpper,
                };
                self.state[q] = VarState::Basic;
                self.basis[r] = q;
                self.beta[r] = entering_value;

                let piv = self.tab[[r, q]];
                let mut row = self.tab.row_mut(r);
                row /= piv;
                let pivot_row_copy = self.tab.row(r).to_owned();
                for i in 0..m {
                    if i != r {
                        let f = self.tab[[i, q]];
                        if f != 0.0 {
                            let mut other = self.tab.row_mut(i);
                            other.scaled_add(-f, &pivot_row_copy);
                            // Clean the pivot column explicitly.
                            other[q] = 0.0;
                        }
                    }
                }
                log::trace!("simplex pivot col {q} row {r} t={t:.3e} piv={piv:.3e}");
            }
        }
    }

    fn solve(&mut self) -> Result<LpResult> {
        if !self.artificials.is_empty() {
            for &a in &self.artificials {
                self.cost[a] = 1.0;
            }
            let status = self.run_phase()?;
            debug_assert_ne!(status, LpStatus::Unbounded, "phase 1 is bounded below");
            let infeas = self.objective();
            for &a in &self.artificials {
                self.cost[a] = 0.0;
            }
            if infeas > PHASE1_TOL {
                return Ok(LpResult {
                    status: LpStatus::Infeasible,
                    x_cont: None,
                    obj: f64::INFINITY,
                    pivots: self.pivots,
                });
            }
            // Lock artificials at zero for phase 2.
            for &a in &self.artificials {
                self.upper[a] = 0.0;
                if self.state[a] != VarState::Basic {
                    self.state[a] = VarState::AtLower;
                }
            }
        }

        self.cost.copy_from_slice(&self.real_cost);
        let status = self.run_phase()?;
        if status == LpStatus::Unbounded {
            return Ok(LpResult {
                status,
                x_cont: None,
                obj: f64::NEG_INFINITY,
                pivots: self.pivots,
            });
        }

        let mut x = vec![0.0; self.n_struct];
        for j in 0..self.n_struct {
            if self.state[j] != VarState::Basic {
                x[j] = self.bound_value(j);
            }
        }
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.n_struct {
                x[bj] = self.beta[i];
            }
        }
        let obj = self
            .real_cost
            .iter()
            .take(self.n_struct)
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        Ok(LpResult {
            status: LpStatus::Optimal,
            x_cont: Some(x),
            obj,
            pivots: self.pivots,
        })
    }
}

struct Step {
    q: usize,
    dir: f64,
    t: f64,
    pivot_row: Option<(usize, BoundHit)>,
}

enum RatioOutcome {
    Step(Step),
    Unbounded,
    TinyPivot,
}
