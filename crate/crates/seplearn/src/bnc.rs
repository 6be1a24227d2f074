//! Branch-and-cut engine: best-bound tree search, separation rounds driven by
//! a per-round separator configuration schedule, and deterministic effort
//! accounting that stands in for wall-clock time.
//!
//! The schedule is keyed by a single global separation-round counter: root
//! rounds first, then node rounds in execution order. Cuts are globally valid
//! (see the separators module), so applied cuts live in one growing LP shared
//! by the whole tree; node solves warm-start from their parent basis extended
//! with the slacks of cuts applied since.

use crate::instances::{Assignment, MilpInstance, INT_TOL};
use crate::lp::{Basis, BasisStatus, LpParams, LpProblem, LpSolution, LpStatus, Simplex};
use crate::separators::{
    separate, CutPool, SepContext, SepParams, SeparatorConfig, SeparatorId, NUM_SEPARATORS,
};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BncError {
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
}

/// Piecewise-constant separator configuration over separation rounds: the
/// config attached to round n_j applies to all rounds in [n_j, n_{j+1}), and
/// the last config persists to termination. Rounds before the first update
/// (only possible with a nonzero first index) run with everything active.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSchedule {
    pub updates: Vec<(usize, SeparatorConfig)>,
}

impl ConfigSchedule {
    pub fn new(updates: Vec<(usize, SeparatorConfig)>) -> Result<Self, BncError> {
        for w in updates.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(BncError::BadSchedule(format!(
                    "update rounds must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(ConfigSchedule { updates })
    }

    /// Single configuration held from round 0 to termination.
    pub fn constant(config: SeparatorConfig) -> Self {
        ConfigSchedule {
            updates: vec![(0, config)],
        }
    }

    pub fn config_at(&self, round: usize) -> SeparatorConfig {
        let mut cfg = SeparatorConfig::ALL_ON;
        for &(r, c) in &self.updates {
            if r <= round {
                cfg = c;
            } else {
                break;
            }
        }
        cfg
    }

    /// Rounds at which the configuration changes.
    pub fn update_rounds(&self) -> Vec<usize> {
        self.updates.iter().map(|&(r, _)| r).collect()
    }
}

/// All separators active from round 0; the reference configuration.
pub fn default_schedule() -> ConfigSchedule {
    ConfigSchedule::constant(SeparatorConfig::ALL_ON)
}

/// Linear work model over the solver counters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffortWeights {
    pub w_pivot: f64,
    pub w_sepcall: f64,
    pub w_node: f64,
    /// Relative per-call cost of each separator.
    pub sep_call_weights: [f64; NUM_SEPARATORS],
}

impl Default for EffortWeights {
    fn default() -> Self {
        EffortWeights {
            w_pivot: 1.0,
            w_sepcall: 1.0,
            w_node: 5.0,
            sep_call_weights: [30.0, 30.0, 15.0, 8.0, 10.0, 40.0, 15.0, 20.0],
        }
    }
}

impl EffortWeights {
    pub fn effort(&self, pivots: usize, sep_calls: &[usize; NUM_SEPARATORS], nodes: usize) -> f64 {
        let weighted_calls: f64 = sep_calls
            .iter()
            .zip(&self.sep_call_weights)
            .map(|(&c, &w)| c as f64 * w)
            .sum();
        self.w_pivot * pivots as f64 + self.w_sepcall * weighted_calls + self.w_node * nodes as f64
    }

    pub fn effort_of(&self, r: &SolveResult) -> f64 {
        self.effort(r.pivots, &r.sep_calls, r.nodes)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BnCParams {
    /// Maximum separation rounds at the root.
    pub max_sep_rounds_root: usize,
    /// Node separation frequency: one round at nodes with depth % d == 0.
    pub node_sep_frequency: usize,
    pub max_cuts_per_round: usize,
    pub cut_parallelism_thresh: f64,
    /// Stop when the primal-dual gap falls to this value (0 = optimality).
    pub gap_limit: f64,
    pub node_limit: usize,
    pub effort: EffortWeights,
    /// Hard stop at `hard_stop_ratio * reference_effort` when a reference is
    /// supplied (evaluation rule).
    pub hard_stop_ratio: f64,
    pub reference_effort: Option<f64>,
    /// Plain effort budget (gap-objective mode).
    pub effort_limit: Option<f64>,
    pub lp: LpParams,
    pub sep: SepParams,
    /// Extra rounds to snapshot beyond the schedule's own update rounds.
    pub snapshot_rounds: Vec<usize>,
    /// Return right after recording the snapshot at this round (inference
    /// simulation).
    pub stop_after_snapshot: Option<usize>,
}

impl Default for BnCParams {
    fn default() -> Self {
        BnCParams {
            max_sep_rounds_root: 30,
            node_sep_frequency: 4,
            max_cuts_per_round: 20,
            cut_parallelism_thresh: 0.9,
            gap_limit: 0.0,
            node_limit: 100_000,
            effort: EffortWeights::default(),
            hard_stop_ratio: 3.0,
            reference_effort: None,
            effort_limit: None,
            lp: LpParams::default(),
            sep: SepParams::default(),
            snapshot_rounds: Vec::new(),
            stop_after_snapshot: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    GapReached,
    NodeLimit,
    HardStop,
    EffortLimit,
    Infeasible,
    /// Stopped after a requested snapshot (inference simulation).
    Stopped,
}

/// One LP row at snapshot time (base constraint or applied cut).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    /// -1/0/1 for Ge/Eq/Le; cuts are always Le.
    pub sense_code: i8,
    pub is_cut: bool,
    pub origin: Option<SeparatorId>,
    pub created_round: usize,
    pub integral: bool,
}

/// LP state captured immediately before a configured update round, carrying
/// everything the feature encoder needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSnapshot {
    pub round: usize,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub var_status: Vec<BasisStatus>,
    pub row_status: Vec<BasisStatus>,
    pub rows: Vec<SnapshotRow>,
    pub lps_solved: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Incumbent (minimization objective and point), when one exists.
    pub incumbent: Option<Assignment>,
    pub best_bound: f64,
    /// |z - bound| / max(|z|, 1e-10), capped at 1; 1 when no incumbent.
    pub gap: f64,
    pub nodes: usize,
    pub sep_rounds: usize,
    pub effort: f64,
    pub wall_seconds: f64,
    pub pivots: usize,
    pub lps_solved: usize,
    pub sep_calls: [usize; NUM_SEPARATORS],
    pub cuts_generated: [usize; NUM_SEPARATORS],
    pub cuts_applied: [usize; NUM_SEPARATORS],
    pub snapshots: Vec<LpSnapshot>,
}

impl SolveResult {
    pub fn incumbent_objective(&self) -> Option<f64> {
        self.incumbent.as_ref().map(|a| a.objective)
    }
}

/// Deterministic effort of a finished solve under the given weights.
pub fn effort(result: &SolveResult, weights: &EffortWeights) -> f64 {
    weights.effort_of(result)
}

struct NodeEntry {
    bound: f64,
    id: usize,
    depth: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Basis,
}

impl PartialEq for NodeEntry {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for NodeEntry {}
impl PartialOrd for NodeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeEntry {
    // BinaryHeap is a max-heap; invert so the smallest bound pops first,
    // FIFO on ties.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap()
            .then(other.id.cmp(&self.id))
    }
}

struct SolveState<'a> {
    inst: &'a MilpInstance,
    schedule: &'a ConfigSchedule,
    params: &'a BnCParams,
    prob: LpProblem,
    simplex: Simplex,
    pool: CutPool,
    applied_order: Vec<usize>,
    incumbent: Option<Assignment>,
    round: usize,
    nodes: usize,
    pivots: usize,
    lps_solved: usize,
    sep_calls: [usize; NUM_SEPARATORS],
    snapshots: Vec<LpSnapshot>,
    snapshot_stop: bool,
    start: std::time::Instant,
}

pub fn solve(
    inst: &MilpInstance,
    schedule: &ConfigSchedule,
    params: &BnCParams,
    _seed: u64,
) -> Result<SolveResult, BncError> {
    inst.validate()
        .map_err(|e| BncError::BadInstance(e.to_string()))?;
    if !inst.has_finite_bounds() {
        return Err(BncError::BadInstance(
            "engine requires finite bound boxes".into(),
        ));
    }
    let mut st = SolveState {
        inst,
        schedule,
        params,
        prob: LpProblem::from_instance(inst),
        simplex: Simplex::new(),
        pool: CutPool::new(),
        applied_order: Vec::new(),
        incumbent: None,
        round: 0,
        nodes: 0,
        pivots: 0,
        lps_solved: 0,
        sep_calls: [0; NUM_SEPARATORS],
        snapshots: Vec::new(),
        snapshot_stop: false,
        start: std::time::Instant::now(),
    };

    let mut queue: BinaryHeap<NodeEntry> = BinaryHeap::new();
    let mut next_id = 0usize;
    queue.push(NodeEntry {
        bound: f64::NEG_INFINITY,
        id: next_id,
        depth: 0,
        lower: inst.lower.clone(),
        upper: inst.upper.clone(),
        basis: Basis::empty(),
    });
    next_id += 1;

    let status = loop {
        let Some(node) = queue.pop() else {
            break if st.incumbent.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            };
        };
        let open_bound = node
            .bound
            .min(queue.peek().map_or(f64::INFINITY, |n| n.bound));
        if let Some(z) = st.incumbent.as_ref().map(|a| a.objective) {
            if node.bound >= z - 1e-9 {
                break SolveStatus::Optimal; // best-bound order: all remaining prune
            }
            let gap = gap_of(z, open_bound);
            if st.params.gap_limit > 0.0 && gap <= st.params.gap_limit + 1e-9 {
                break SolveStatus::GapReached;
            }
        }
        if st.nodes >= st.params.node_limit {
            break SolveStatus::NodeLimit;
        }
        if let Some(stop) = st.budget_exceeded() {
            break stop;
        }

        st.nodes += 1;
        let warm = if node.depth == 0 { None } else { Some(&node.basis) };
        let mut sol = st.solve_lp(&node.lower, &node.upper, warm)?;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Optimal => {}
            other => {
                return Err(BncError::Numerical(format!("node LP ended with {other:?}")))
            }
        }
        if let Some(z) = st.incumbent.as_ref().map(|a| a.objective) {
            if sol.objective >= z - 1e-9 {
                continue;
            }
        }
        st.try_round_heuristic(&sol);

        // Separation: up to R rounds at the root, one round at nodes whose
        // depth is a multiple of the frequency.
        let rounds_here = if node.depth == 0 {
            st.params.max_sep_rounds_root
        } else if st.params.node_sep_frequency > 0 && node.depth % st.params.node_sep_frequency == 0
        {
            1
        } else {
            0
        };
        let mut pruned = false;
        for _ in 0..rounds_here {
            if st.snapshot_stop || st.budget_exceeded().is_some() {
                break;
            }
            if is_integral(st.inst, &sol.x) {
                break;
            }
            match st.separation_round(&node, &sol)? {
                RoundOutcome::NewSolution(next) => sol = next,
                RoundOutcome::NoCuts => break,
                RoundOutcome::Pruned => {
                    pruned = true;
                    break;
                }
            }
            if let Some(z) = st.incumbent.as_ref().map(|a| a.objective) {
                if sol.objective >= z - 1e-9 {
                    pruned = true;
                    break;
                }
            }
        }
        if st.snapshot_stop {
            break SolveStatus::Stopped;
        }
        if pruned {
            continue;
        }

        if is_integral(st.inst, &sol.x) {
            st.offer_incumbent(&sol.x);
            continue;
        }

        // Branch on the most fractional integer variable, ties by index.
        let Some(bvar) = most_fractional(st.inst, &sol.x) else {
            st.offer_incumbent(&sol.x);
            continue;
        };
        let basis = st.simplex.basis();
        let xv = sol.x[bvar];
        let mut lo = node.lower.clone();
        let mut hi = node.upper.clone();
        hi[bvar] = xv.floor();
        queue.push(NodeEntry {
            bound: sol.objective,
            id: next_id,
            depth: node.depth + 1,
            lower: node.lower.clone(),
            upper: hi,
            basis: basis.clone(),
        });
        next_id += 1;
        lo[bvar] = xv.ceil();
        queue.push(NodeEntry {
            bound: sol.objective,
            id: next_id,
            depth: node.depth + 1,
            lower: lo,
            upper: node.upper.clone(),
            basis,
        });
        next_id += 1;
    };

    let open_bound = queue.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let mut status = status;
    let (best_bound, gap) = match (&st.incumbent, status) {
        (Some(a), SolveStatus::Optimal) => (a.objective, 0.0),
        (Some(a), _) => {
            let b = open_bound.min(a.objective);
            (b, gap_of(a.objective, b))
        }
        (None, _) => (open_bound, 1.0),
    };
    if status == SolveStatus::Optimal && st.incumbent.is_none() {
        status = SolveStatus::Infeasible;
    }

    Ok(SolveResult {
        status,
        incumbent: st.incumbent,
        best_bound,
        gap,
        nodes: st.nodes,
        sep_rounds: st.round,
        effort: st.params.effort.effort(st.pivots, &st.sep_calls, st.nodes),
        wall_seconds: st.start.elapsed().as_secs_f64(),
        pivots: st.pivots,
        lps_solved: st.lps_solved,
        sep_calls: st.sep_calls,
        cuts_generated: st.pool.generated,
        cuts_applied: st.pool.applied,
        snapshots: st.snapshots,
    })
}

enum RoundOutcome {
    NewSolution(LpSolution),
    NoCuts,
    Pruned,
}

impl<'a> SolveState<'a> {
    fn solve_lp(
        &mut self,
        lower: &[f64],
        upper: &[f64],
        warm: Option<&Basis>,
    ) -> Result<LpSolution, BncError> {
        let sol = self
            .simplex
            .solve(&self.prob, lower, upper, warm, &self.params.lp)
            .map_err(|e| BncError::Numerical(e.to_string()))?;
        if sol.status == LpStatus::IterationLimit {
            return Err(BncError::Numerical("simplex iteration limit".into()));
        }
        self.pivots += sol.pivot_count;
        self.lps_solved += 1;
        Ok(sol)
    }

    fn budget_exceeded(&self) -> Option<SolveStatus> {
        let effort = self
            .params
            .effort
            .effort(self.pivots, &self.sep_calls, self.nodes);
        if let Some(reference) = self.params.reference_effort {
            if effort > self.params.hard_stop_ratio * reference {
                return Some(SolveStatus::HardStop);
            }
        }
        if let Some(limit) = self.params.effort_limit {
            if effort > limit {
                return Some(SolveStatus::EffortLimit);
            }
        }
        None
    }

    /// One separation round at the current LP optimum: snapshot if requested,
    /// run the active separators into the pool, select and apply cuts,
    /// re-solve warm.
    fn separation_round(
        &mut self,
        node: &NodeEntry,
        sol: &LpSolution,
    ) -> Result<RoundOutcome, BncError> {
        let wants_snapshot = self.params.snapshot_rounds.contains(&self.round)
            || self.schedule.update_rounds().contains(&self.round);
        if wants_snapshot {
            self.snapshots.push(self.make_snapshot(sol));
            if self.params.stop_after_snapshot == Some(self.round) {
                self.snapshot_stop = true;
                return Ok(RoundOutcome::NoCuts);
            }
        }

        let config = self.schedule.config_at(self.round);
        let mut new_cuts = Vec::new();
        {
            let ctx = SepContext {
                prob: &self.prob,
                simplex: &self.simplex,
                sol,
                inst: self.inst,
                params: &self.params.sep,
            };
            for sep in config.active() {
                self.sep_calls[sep.index()] += 1;
                new_cuts.extend(separate(sep, &ctx, self.round));
            }
        }
        self.pool.add_cuts(new_cuts);
        let selected = self.pool.select_cuts(
            &sol.x,
            self.params.max_cuts_per_round,
            self.params.cut_parallelism_thresh,
        );
        self.round += 1;
        if selected.is_empty() {
            return Ok(RoundOutcome::NoCuts);
        }
        let warm = self.simplex.basis();
        for &ci in &selected {
            let cut = self.pool.cuts[ci].clone();
            self.applied_order.push(ci);
            self.prob.append_row(
                cut.coeffs,
                crate::instances::RowSense::Le,
                cut.rhs,
                &self.inst.integrality,
            );
        }
        let next = self.solve_lp(&node.lower, &node.upper, Some(&warm))?;
        match next.status {
            LpStatus::Infeasible => Ok(RoundOutcome::Pruned),
            LpStatus::Optimal => {
                self.try_round_heuristic(&next);
                Ok(RoundOutcome::NewSolution(next))
            }
            other => Err(BncError::Numerical(format!(
                "post-cut LP ended with {other:?}"
            ))),
        }
    }

    fn make_snapshot(&self, sol: &LpSolution) -> LpSnapshot {
        let n_base = self.inst.num_rows();
        let rows = self
            .prob
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let is_cut = i >= n_base;
                let (origin, created_round) = if is_cut {
                    let cut = &self.pool.cuts[self.applied_order[i - n_base]];
                    (Some(cut.origin), cut.created_round)
                } else {
                    (None, 0)
                };
                SnapshotRow {
                    coeffs: row.coeffs.clone(),
                    rhs: row.rhs,
                    sense_code: match row.sense {
                        crate::instances::RowSense::Ge => -1,
                        crate::instances::RowSense::Eq => 0,
                        crate::instances::RowSense::Le => 1,
                    },
                    is_cut,
                    origin,
                    created_round,
                    integral: row.integral,
                }
            })
            .collect();
        LpSnapshot {
            round: self.round,
            x: sol.x.clone(),
            objective: sol.objective,
            duals: sol.duals.clone(),
            reduced_costs: sol.reduced_costs.clone(),
            var_status: sol.var_status.clone(),
            row_status: sol.row_status.clone(),
            rows,
            lps_solved: self.lps_solved,
        }
    }

    fn try_round_heuristic(&mut self, sol: &LpSolution) {
        let mut x = sol.x.clone();
        for j in 0..self.inst.num_vars {
            if self.inst.integrality[j] {
                x[j] = x[j].round();
            }
        }
        if self.inst.is_feasible(&x, 1e-7) {
            self.offer_incumbent(&x);
        }
    }

    fn offer_incumbent(&mut self, x: &[f64]) {
        let mut xr = x.to_vec();
        for j in 0..self.inst.num_vars {
            if self.inst.integrality[j] {
                xr[j] = xr[j].round();
            }
        }
        let obj = self.inst.objective_value(&xr);
        if self
            .incumbent
            .as_ref()
            .map_or(true, |a| obj < a.objective - 1e-12)
            && self.inst.is_feasible(&xr, 1e-7)
        {
            self.incumbent = Some(Assignment {
                values: xr,
                objective: obj,
            });
        }
    }
}

fn gap_of(z: f64, bound: f64) -> f64 {
    if !bound.is_finite() {
        return 1.0;
    }
    ((z - bound).abs() / z.abs().max(1e-10)).min(1.0)
}

fn is_integral(inst: &MilpInstance, x: &[f64]) -> bool {
    (0..inst.num_vars).all(|j| !inst.integrality[j] || (x[j] - x[j].round()).abs() <= INT_TOL)
}

fn most_fractional(inst: &MilpInstance, x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..inst.num_vars {
        if !inst.integrality[j] {
            continue;
        }
        let f = x[j] - x[j].floor();
        let dist = f.min(1.0 - f);
        if dist <= INT_TOL {
            continue;
        }
        if best.map_or(true, |(_, bd)| dist > bd + 1e-12) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        brute_force_opt, generate_bin_packing, generate_comb_auction, generate_max_cut,
        generate_packing, BruteForceOutcome, IndepSetParams,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_instances(n_per_class: u64) -> Vec<MilpInstance> {
        let mut insts = Vec::new();
        for seed in 0..n_per_class {
            insts.push(generate_packing(6, 5, seed));
            insts.push(generate_bin_packing(9, 9, seed));
            insts.push(generate_max_cut(4, 5, seed));
            insts.push(generate_comb_auction(5, 10, seed));
            insts.push(
                IndepSetParams {
                    n_nodes: 10,
                    edge_probability: (0.2, 0.4),
                    affinity: (2, 3),
                }
                .generate(seed),
            );
        }
        insts.retain(|i| i.num_integer_vars() <= 12);
        insts
    }

    fn random_schedule(rng: &mut ChaCha8Rng) -> ConfigSchedule {
        let k = rng.gen_range(1..=2);
        let mut updates = vec![(0usize, SeparatorConfig(rng.gen()))];
        if k == 2 {
            updates.push((rng.gen_range(1..=4), SeparatorConfig(rng.gen())));
        }
        ConfigSchedule::new(updates).unwrap()
    }

    #[test]
    fn all_off_binary_instance_matches_brute_force() {
        let inst = generate_bin_packing(8, 6, 3);
        let res = solve(
            &inst,
            &ConfigSchedule::constant(SeparatorConfig::ALL_OFF),
            &BnCParams::default(),
            0,
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        let expect = match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => a.objective,
            _ => panic!(),
        };
        assert!((res.incumbent_objective().unwrap() - expect).abs() <= 1e-6);
        assert!(res.gap <= 1e-9, "optimal must close the gap");
    }

    #[test]
    fn random_configs_never_change_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for inst in small_instances(8) {
            let expect = match brute_force_opt(&inst, 12).unwrap() {
                BruteForceOutcome::Optimal(a) => a.objective,
                BruteForceOutcome::Infeasible => panic!("generated instances are feasible"),
            };
            for _ in 0..4 {
                let schedule = random_schedule(&mut rng);
                let res = solve(&inst, &schedule, &BnCParams::default(), 0).unwrap();
                assert_eq!(res.status, SolveStatus::Optimal, "{}", inst.name);
                assert!(
                    (res.incumbent_objective().unwrap() - expect).abs() <= 1e-6,
                    "{} schedule {:?}: got {} want {}",
                    inst.name,
                    schedule.updates,
                    res.incumbent_objective().unwrap(),
                    expect
                );
            }
        }
    }

    #[test]
    fn cuts_reduce_nodes_on_packing_instances() {
        // Paired runs over 30 seeds: the all-on schedule should process no
        // more nodes than all-off in the median.
        let mut diffs: Vec<i64> = Vec::new();
        for seed in 0..30u64 {
            let inst = generate_packing(10, 8, seed);
            let on = solve(
                &inst,
                &default_schedule(),
                &BnCParams::default(),
                0,
            )
            .unwrap();
            let off = solve(
                &inst,
                &ConfigSchedule::constant(SeparatorConfig::ALL_OFF),
                &BnCParams::default(),
                0,
            )
            .unwrap();
            assert_eq!(on.status, SolveStatus::Optimal);
            assert_eq!(off.status, SolveStatus::Optimal);
            diffs.push(off.nodes as i64 - on.nodes as i64);
        }
        diffs.sort_unstable();
        let median = diffs[diffs.len() / 2];
        assert!(
            median >= 0,
            "cuts should not increase the median node count: {diffs:?}"
        );
    }

    #[test]
    fn gap_limit_is_respected() {
        let inst = generate_packing(14, 10, 11);
        let params = BnCParams {
            gap_limit: 0.1,
            ..BnCParams::default()
        };
        let res = solve(&inst, &default_schedule(), &params, 0).unwrap();
        if res.status == SolveStatus::GapReached {
            assert!(res.gap <= 0.1 + 1e-9);
        } else {
            assert_eq!(res.status, SolveStatus::Optimal);
        }
    }

    #[test]
    fn determinism_of_counters() {
        let inst = generate_comb_auction(7, 14, 2);
        let schedule = ConfigSchedule::new(vec![
            (0, SeparatorConfig(0b1011_0110)),
            (3, SeparatorConfig(0b0100_1001)),
        ])
        .unwrap();
        let a = solve(&inst, &schedule, &BnCParams::default(), 1).unwrap();
        let b = solve(&inst, &schedule, &BnCParams::default(), 1).unwrap();
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.pivots, b.pivots);
        assert_eq!(a.sep_rounds, b.sep_rounds);
        assert_eq!(a.sep_calls, b.sep_calls);
        assert_eq!(a.cuts_generated, b.cuts_generated);
        assert_eq!(a.cuts_applied, b.cuts_applied);
        assert_eq!(a.effort, b.effort);
    }

    #[test]
    fn effort_is_linear_in_counters() {
        let w = EffortWeights::default();
        assert_eq!(w.effort(0, &[0; NUM_SEPARATORS], 0), 0.0);
        let calls = [1, 2, 3, 4, 5, 6, 7, 8];
        let doubled = [2, 4, 6, 8, 10, 12, 14, 16];
        assert!((2.0 * w.effort(10, &calls, 3) - w.effort(20, &doubled, 6)).abs() < 1e-12);
    }

    #[test]
    fn default_schedule_is_all_on_from_round_zero() {
        let s = default_schedule();
        assert_eq!(s.updates, vec![(0, SeparatorConfig(0xFF))]);
        for round in [0, 1, 7, 100] {
            assert_eq!(s.config_at(round), SeparatorConfig::ALL_ON);
        }
        // Equivalent to passing all-on explicitly.
        let inst = generate_packing(8, 6, 4);
        let a = solve(&inst, &s, &BnCParams::default(), 0).unwrap();
        let b = solve(
            &inst,
            &ConfigSchedule::constant(SeparatorConfig::ALL_ON),
            &BnCParams::default(),
            0,
        )
        .unwrap();
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.effort, b.effort);
    }

    #[test]
    fn schedule_validation_rejects_nonincreasing_rounds() {
        assert!(ConfigSchedule::new(vec![
            (0, SeparatorConfig::ALL_ON),
            (0, SeparatorConfig::ALL_OFF)
        ])
        .is_err());
    }

    #[test]
    fn snapshots_are_recorded_at_update_rounds() {
        let inst = generate_packing(12, 10, 9);
        let schedule = ConfigSchedule::new(vec![
            (0, SeparatorConfig::ALL_ON),
            (2, SeparatorConfig(0b0001_1111)),
        ])
        .unwrap();
        let res = solve(&inst, &schedule, &BnCParams::default(), 0).unwrap();
        let rounds: Vec<usize> = res.snapshots.iter().map(|s| s.round).collect();
        assert!(rounds.contains(&0), "round-0 snapshot missing: {rounds:?}");
        if res.sep_rounds > 2 {
            assert!(rounds.contains(&2), "round-2 snapshot missing: {rounds:?}");
        }
        // Snapshot rows = base rows + cuts applied so far.
        for snap in &res.snapshots {
            assert!(snap.rows.len() >= inst.num_rows());
            assert_eq!(snap.x.len(), inst.num_vars);
            assert_eq!(snap.duals.len(), snap.rows.len());
        }
    }

    #[test]
    fn stop_after_snapshot_halts_early() {
        let inst = generate_packing(12, 10, 10);
        let schedule = default_schedule();
        let params = BnCParams {
            snapshot_rounds: vec![2],
            stop_after_snapshot: Some(2),
            ..BnCParams::default()
        };
        let res = solve(&inst, &schedule, &params, 0).unwrap();
        if res.status == SolveStatus::Stopped {
            assert_eq!(res.snapshots.last().unwrap().round, 2);
            assert_eq!(res.sep_rounds, 2);
        } else {
            // Instance solved before round 2; no snapshot possible.
            assert_eq!(res.status, SolveStatus::Optimal);
        }
    }

    #[test]
    fn hard_stop_triggers_on_tiny_reference() {
        let inst = generate_packing(14, 12, 13);
        let params = BnCParams {
            reference_effort: Some(1.0),
            ..BnCParams::default()
        };
        let res = solve(&inst, &default_schedule(), &params, 0).unwrap();
        assert_eq!(res.status, SolveStatus::HardStop);
    }
}
