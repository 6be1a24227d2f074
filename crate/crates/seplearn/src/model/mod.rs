//! Triplet-graph context encoding and the reward network.
//!
//! A MILP instance at a separation round, together with a candidate
//! separator configuration, is encoded as a graph with variable, constraint,
//! and separator nodes. The reward network embeds the three node families,
//! runs three bipartite message-passing passes, an attention block over the
//! separator nodes, global mean pooling, and a scalar head. Gradients are
//! exact reverse-mode, written by hand over this fixed operator set, so the
//! same code path serves both training and the bandit's confidence bonus.

mod net;

pub use net::{ArchConfig, FitOptions, RewardNet};

use crate::bnc::LpSnapshot;
use crate::instances::MilpInstance;
use crate::lp::BasisStatus;
use crate::separators::{SeparatorConfig, NUM_SEPARATORS};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of per-variable features.
pub const V_FEATS: usize = 17;
/// Number of per-row scalar features before the separator-type one-hot.
pub const C_SCALAR_FEATS: usize = 25;
/// Full per-row feature width.
pub const C_FEATS: usize = C_SCALAR_FEATS + NUM_SEPARATORS;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("snapshot inconsistent with instance: {0}")]
    BadSnapshot(String),
    #[error("buffer is empty")]
    EmptyBuffer,
    #[error("architecture hash mismatch: checkpoint {found:#x}, net {expected:#x}")]
    ArchMismatch { expected: u64, found: u64 },
    #[error("i/o error on {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}

/// Width of the separator-node feature block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SepFeatMode {
    /// Activation bit plus a one-hot separator identity (M+1 dims).
    Rich,
    /// Activation bit only (1 dim).
    Binary,
}

impl SepFeatMode {
    pub fn dim(&self) -> usize {
        match self {
            SepFeatMode::Rich => NUM_SEPARATORS + 1,
            SepFeatMode::Binary => 1,
        }
    }
}

/// The bandit context: variable/constraint/separator node features plus the
/// weighted variable-constraint edges. Separator nodes connect to every
/// variable and constraint node with weight one; that block is complete, so
/// it is kept implicit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripletGraph {
    pub v_feats: Array2<f64>,
    pub c_feats: Array2<f64>,
    pub s_feats: Array2<f64>,
    /// (variable, row, coefficient) for every nonzero.
    pub vc_edges: Vec<(usize, usize, f64)>,
    pub config: SeparatorConfig,
}

impl TripletGraph {
    pub fn num_vars(&self) -> usize {
        self.v_feats.nrows()
    }

    pub fn num_rows(&self) -> usize {
        self.c_feats.nrows()
    }

    pub fn finite(&self) -> bool {
        self.v_feats.iter().all(|v| v.is_finite())
            && self.c_feats.iter().all(|v| v.is_finite())
            && self.s_feats.iter().all(|v| v.is_finite())
            && self.vc_edges.iter().all(|&(_, _, w)| w.is_finite())
    }
}

fn onehot_status(s: BasisStatus) -> [f64; 4] {
    match s {
        BasisStatus::Lower => [1.0, 0.0, 0.0, 0.0],
        BasisStatus::Basic => [0.0, 1.0, 0.0, 0.0],
        BasisStatus::Upper => [0.0, 0.0, 1.0, 0.0],
        BasisStatus::Zero => [0.0, 0.0, 0.0, 1.0],
    }
}

/// Encode the solver state at an update round plus a candidate configuration.
///
/// The layout follows the standard variable/constraint feature tables with
/// two local substitutions, both marked below: row age in LP-count units is
/// approximated from round ages, and the cut score slot carries this
/// solver's own selection score.
pub fn encode(
    inst: &MilpInstance,
    snapshot: &LpSnapshot,
    config: SeparatorConfig,
    mode: SepFeatMode,
) -> Result<TripletGraph, ModelError> {
    let n = inst.num_vars;
    if snapshot.x.len() != n {
        return Err(ModelError::BadSnapshot(format!(
            "snapshot has {} variables, instance has {n}",
            snapshot.x.len()
        )));
    }
    let m_total = snapshot.rows.len();
    if snapshot.duals.len() != m_total || snapshot.row_status.len() != m_total {
        return Err(ModelError::BadSnapshot(
            "row-indexed fields disagree in length".into(),
        ));
    }

    let obj_norm = inst
        .objective
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
        .max(1e-10);
    let round = snapshot.round.max(1) as f64;

    let mut v = Array2::zeros((n, V_FEATS));
    for j in 0..n {
        let x = snapshot.x[j];
        let binary = inst.integrality[j]
            && inst.lower[j].abs() < 1e-9
            && (inst.upper[j] - 1.0).abs() < 1e-9;
        v[[j, 0]] = inst.objective[j] / obj_norm;
        v[[j, 1]] = f64::from(binary);
        v[[j, 2]] = f64::from(inst.integrality[j] && !binary);
        v[[j, 3]] = 0.0; // implied-integer type: not derived by this solver
        v[[j, 4]] = f64::from(!inst.integrality[j]);
        v[[j, 5]] = f64::from(inst.lower[j].is_finite());
        v[[j, 6]] = f64::from(inst.upper[j].is_finite());
        v[[j, 7]] = snapshot.reduced_costs[j] / obj_norm;
        v[[j, 8]] = x;
        v[[j, 9]] = x - x.floor();
        v[[j, 10]] = f64::from((x - inst.lower[j]).abs() <= 1e-6);
        v[[j, 11]] = f64::from((inst.upper[j] - x).abs() <= 1e-6);
        v[[j, 12]] = 0.0; // column age: columns never enter or leave here
        let st = onehot_status(snapshot.var_status[j]);
        for (k, sv) in st.iter().enumerate() {
            v[[j, 13 + k]] = *sv;
        }
    }

    let mut c = Array2::zeros((m_total, C_FEATS));
    let mut vc_edges = Vec::new();
    for (i, row) in snapshot.rows.iter().enumerate() {
        let norm = row
            .coeffs
            .iter()
            .map(|&(_, a)| a * a)
            .sum::<f64>()
            .sqrt()
            .max(1e-10);
        let activity: f64 = row.coeffs.iter().map(|&(j, a)| a * snapshot.x[j]).sum();
        let nnz = row.coeffs.len().max(1);
        let intcols = row
            .coeffs
            .iter()
            .filter(|&&(j, _)| inst.integrality[j])
            .count();
        let violation = match row.sense_code {
            1 => (activity - row.rhs) / norm,
            -1 => (row.rhs - activity) / norm,
            _ => (activity - row.rhs).abs() / norm,
        };
        let dot_obj: f64 = row
            .coeffs
            .iter()
            .map(|&(j, a)| a * inst.objective[j])
            .sum();
        let obj_par = dot_obj / (norm * obj_norm);
        let age = (snapshot.round.saturating_sub(row.created_round)) as f64 / round;

        c[[i, 0]] = f64::from(row.is_cut);
        c[[i, 1]] = row.created_round as f64 / round;
        c[[i, 2]] = nnz as f64 / n as f64;
        c[[i, 3]] = row.rhs / norm;
        c[[i, 4]] = f64::from(row.sense_code <= 0 && (activity - row.rhs).abs() <= 1e-6);
        c[[i, 5]] = f64::from(row.sense_code >= 0 && (activity - row.rhs).abs() <= 1e-6);
        c[[i, 6]] = snapshot.duals[i] / (norm * obj_norm);
        let st = onehot_status(snapshot.row_status[i]);
        for (k, sv) in st.iter().enumerate() {
            c[[i, 7 + k]] = *sv;
        }
        c[[i, 11]] = age;
        // LP-count age approximated from round age (no per-row LP counter).
        c[[i, 12]] = (snapshot.round.saturating_sub(row.created_round)) as f64
            / snapshot.lps_solved.max(1) as f64;
        c[[i, 13]] = intcols as f64 / n as f64;
        c[[i, 14]] = f64::from(row.integral);
        c[[i, 15]] = f64::from(row.is_cut); // cuts are the removable rows
        c[[i, 16]] = 1.0; // every snapshot row is in the LP
        c[[i, 17]] = violation;
        c[[i, 18]] = violation / (1.0 + (row.rhs / norm).abs());
        c[[i, 19]] = obj_par;
        c[[i, 20]] = violation * obj_par;
        c[[i, 21]] = 1.0 - nnz as f64 / n as f64;
        c[[i, 22]] = intcols as f64 / nnz as f64;
        // This solver's cut-selection score in the external score slot.
        c[[i, 23]] = violation + 0.1 * obj_par;
        c[[i, 24]] = row.sense_code as f64;
        if let Some(origin) = row.origin {
            c[[i, C_SCALAR_FEATS + origin.index()]] = 1.0;
        }
        for &(j, a) in &row.coeffs {
            vc_edges.push((j, i, a));
        }
    }

    let mut s = Array2::zeros((NUM_SEPARATORS, mode.dim()));
    for k in 0..NUM_SEPARATORS {
        let active = config.is_active(crate::separators::SeparatorId::from_index(k));
        s[[k, 0]] = f64::from(active);
        if mode == SepFeatMode::Rich {
            s[[k, 1 + k]] = 1.0;
        }
    }

    let graph = TripletGraph {
        v_feats: v,
        c_feats: c,
        s_feats: s,
        vc_edges,
        config,
    };
    if !graph.finite() {
        return Err(ModelError::BadSnapshot(
            "encoded features contain NaN or infinity".into(),
        ));
    }
    Ok(graph)
}
