//! Linear programming layer: the revised bounded-variable simplex engine and
//! a naive dense reference solver used as an independent oracle.

pub mod reference;
mod simplex;

pub use simplex::{Basis, EngineRow, LpProblem, Simplex, TableauRow};

use crate::instances::RowSense;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("variable {0} has an infinite bound; the engine requires finite boxes")]
    UnboundedBox(usize),
    #[error("variable {0} is not basic")]
    NotBasic(usize),
    #[error("no optimal solution available")]
    NotSolved,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Simplex basis status, also used as the one-hot basis feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Lower,
    Basic,
    Upper,
    Zero,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LpParams {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub drop_tol: f64,
    pub max_pivots: usize,
    pub refactor_every: usize,
    pub bland_after: usize,
}

impl Default for LpParams {
    fn default() -> Self {
        LpParams {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            drop_tol: 1e-12,
            max_pivots: 50_000,
            refactor_every: 100,
            bland_after: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub var_status: Vec<BasisStatus>,
    pub row_status: Vec<BasisStatus>,
    pub pivot_count: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Cold solve of an LP with its own bounds.
pub fn solve_lp(p: &LpProblem, params: &LpParams) -> Result<LpSolution, LpError> {
    let mut s = Simplex::new();
    let lower = p.lower.clone();
    let upper = p.upper.clone();
    s.solve(p, &lower, &upper, None, params)
}

/// Append rows to the problem and re-solve from a warm basis that was
/// primal-optimal for the problem without the new rows. The new rows' slacks
/// enter the basis, preserving dual feasibility, so the dual simplex
/// continues from there.
pub fn resolve_with_rows(
    p: &mut LpProblem,
    new_rows: Vec<(Vec<(usize, f64)>, RowSense, f64)>,
    integral_vars: &[bool],
    warm: &Basis,
    params: &LpParams,
) -> Result<LpSolution, LpError> {
    for (coeffs, sense, rhs) in new_rows {
        p.append_row(coeffs, sense, rhs, integral_vars);
    }
    let mut s = Simplex::new();
    let lower = p.lower.clone();
    let upper = p.upper.clone();
    s.solve(p, &lower, &upper, Some(warm), params)
}
