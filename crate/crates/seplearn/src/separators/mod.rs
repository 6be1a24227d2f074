//! The eight separator algorithms, the cutpool, cut scoring and selection,
//! and cut-validity oracles.
//!
//! Every separator receives the solved LP state and the original instance and
//! returns cuts in structural variable space, normalized to `<=` sense.
//! Cuts are derived against the instance's *global* bounds, so they are valid
//! for the whole tree even when generated at a branched node; a cut is only
//! emitted if it is violated by the current LP optimum.

mod aggregation;
mod conflict;
mod gomory;
mod implied;
mod knapsack;
mod zerohalf;

use crate::instances::{InstanceError, MilpInstance, RowSense};
use crate::lp::{LpProblem, LpSolution, Simplex};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of implemented separators.
pub const NUM_SEPARATORS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatorId {
    GomoryFractional = 0,
    GomoryMir = 1,
    CmirAggregation = 2,
    KnapsackCover = 3,
    Clique = 4,
    OddCycle = 5,
    ZeroHalf = 6,
    ImpliedBounds = 7,
}

impl SeparatorId {
    pub const ALL: [SeparatorId; NUM_SEPARATORS] = [
        SeparatorId::GomoryFractional,
        SeparatorId::GomoryMir,
        SeparatorId::CmirAggregation,
        SeparatorId::KnapsackCover,
        SeparatorId::Clique,
        SeparatorId::OddCycle,
        SeparatorId::ZeroHalf,
        SeparatorId::ImpliedBounds,
    ];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn from_index(i: usize) -> SeparatorId {
        SeparatorId::ALL[i]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SeparatorId::GomoryFractional => "gomory_fractional",
            SeparatorId::GomoryMir => "gomory_mir",
            SeparatorId::CmirAggregation => "cmir_aggregation",
            SeparatorId::KnapsackCover => "knapsack_cover",
            SeparatorId::Clique => "clique",
            SeparatorId::OddCycle => "oddcycle",
            SeparatorId::ZeroHalf => "zerohalf",
            SeparatorId::ImpliedBounds => "impliedbounds",
        }
    }
}

impl fmt::Display for SeparatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// Fixed-width activation bitmask over the eight separators; bit k activates
/// `SeparatorId::from_index(k)`. The full space has 2^8 = 256 elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeparatorConfig(pub u8);

impl SeparatorConfig {
    pub const ALL_ON: SeparatorConfig = SeparatorConfig(0xFF);
    pub const ALL_OFF: SeparatorConfig = SeparatorConfig(0);

    pub fn is_active(&self, id: SeparatorId) -> bool {
        self.0 >> id.index() & 1 == 1
    }

    pub fn with_bit(&self, id: SeparatorId, on: bool) -> SeparatorConfig {
        if on {
            SeparatorConfig(self.0 | 1 << id.index())
        } else {
            SeparatorConfig(self.0 & !(1 << id.index()))
        }
    }

    pub fn active_count(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn active(&self) -> impl Iterator<Item = SeparatorId> + '_ {
        SeparatorId::ALL.into_iter().filter(|id| self.is_active(*id))
    }

    pub fn hamming(&self, other: SeparatorConfig) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    /// All 2^8 configurations in ascending bitmask order.
    pub fn enumerate_all() -> impl Iterator<Item = SeparatorConfig> {
        (0..=u8::MAX).map(SeparatorConfig)
    }
}

impl fmt::Display for SeparatorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08b}", self.0)
    }
}

/// One cutting plane `coeffs . x <= rhs` over the structural variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cut {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    pub origin: SeparatorId,
    /// Normalized violation at the LP optimum the cut was generated at.
    pub efficacy: f64,
    /// cos(coeffs, objective) in [-1, 1].
    pub obj_parallelism: f64,
    /// Separation round at which the cut was generated.
    pub created_round: usize,
    pub applied: bool,
}

impl Cut {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt()
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Rounds since the cut was generated.
    pub fn age(&self, current_round: usize) -> usize {
        current_round.saturating_sub(self.created_round)
    }
}

/// Normalized violation of a cut at a point: (v.x - w) / ||v||_2.
pub fn cut_efficacy(cut: &Cut, x_lp: &[f64]) -> f64 {
    let norm = cut.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (cut.activity(x_lp) - cut.rhs) / norm
}

fn parallelism(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let na: f64 = a.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let mut dot = 0.0;
    let mut ia = 0;
    let mut ib = 0;
    while ia < a.len() && ib < b.len() {
        match a[ia].0.cmp(&b[ib].0) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                dot += a[ia].1 * b[ib].1;
                ia += 1;
                ib += 1;
            }
        }
    }
    dot / (na * nb)
}

/// Numerical filters applied to every candidate cut.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SepParams {
    /// Coefficients below this magnitude are dropped (with a sound rhs
    /// relaxation using the global bounds).
    pub drop_tol: f64,
    /// Cuts with max|coef| / min|coef| above this are discarded.
    pub max_dynamism: f64,
    /// Minimum efficacy at the generating LP optimum.
    pub min_efficacy: f64,
    /// Gomory away parameter: required distance of the rhs fraction from 0/1.
    pub away: f64,
    /// Per-separator cap on cuts emitted in one call.
    pub max_cuts_per_call: usize,
}

impl Default for SepParams {
    fn default() -> Self {
        SepParams {
            drop_tol: 1e-10,
            max_dynamism: 1e7,
            min_efficacy: 1e-6,
            away: 0.01,
            max_cuts_per_call: 10,
        }
    }
}

/// Everything a separator may look at: the solved LP (with all applied cuts),
/// the original instance (global bounds, integrality), and filters.
pub struct SepContext<'a> {
    pub prob: &'a LpProblem,
    pub simplex: &'a Simplex,
    pub sol: &'a LpSolution,
    pub inst: &'a MilpInstance,
    pub params: &'a SepParams,
}

impl<'a> SepContext<'a> {
    /// Finalize a raw `coeffs . x <= rhs` inequality into a cut: sparsify,
    /// drop tiny coefficients soundly, run the dynamism and efficacy filters.
    /// Returns `None` if the cut is filtered out.
    pub(crate) fn finish_cut(
        &self,
        dense: &[f64],
        mut rhs: f64,
        origin: SeparatorId,
        round: usize,
    ) -> Option<Cut> {
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        for (j, &a) in dense.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            if a.abs() < self.params.drop_tol {
                // Dropping v_j * x_j from the <= side is sound after
                // relaxing rhs by its minimum over the global box.
                let contrib = (a * self.inst.lower[j]).min(a * self.inst.upper[j]);
                rhs -= contrib;
            } else {
                coeffs.push((j, a));
            }
        }
        if coeffs.is_empty() || !rhs.is_finite() {
            return None;
        }
        let max_a = coeffs.iter().map(|&(_, a)| a.abs()).fold(0.0f64, f64::max);
        let min_a = coeffs
            .iter()
            .map(|&(_, a)| a.abs())
            .fold(f64::INFINITY, f64::min);
        if max_a / min_a > self.params.max_dynamism {
            return None;
        }
        if coeffs.iter().any(|&(_, a)| !a.is_finite()) {
            return None;
        }
        let mut cut = Cut {
            coeffs,
            rhs,
            origin,
            efficacy: 0.0,
            obj_parallelism: 0.0,
            created_round: round,
            applied: false,
        };
        cut.efficacy = cut_efficacy(&cut, &self.sol.x);
        if cut.efficacy <= self.params.min_efficacy {
            return None;
        }
        let obj_sparse: Vec<(usize, f64)> = self
            .inst
            .objective
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        cut.obj_parallelism = parallelism(&cut.coeffs, &obj_sparse);
        Some(cut)
    }
}

/// Invoke one separator. A separator that finds nothing returns an empty
/// list; every returned cut is violated by the LP optimum in the context.
pub fn separate(sep_id: SeparatorId, ctx: &SepContext, round: usize) -> Vec<Cut> {
    let mut cuts = match sep_id {
        SeparatorId::GomoryFractional => gomory::separate_fractional(ctx, round),
        SeparatorId::GomoryMir => gomory::separate_mir(ctx, round),
        SeparatorId::CmirAggregation => aggregation::separate(ctx, round),
        SeparatorId::KnapsackCover => knapsack::separate(ctx, round),
        SeparatorId::Clique => conflict::separate_clique(ctx, round),
        SeparatorId::OddCycle => conflict::separate_oddcycle(ctx, round),
        SeparatorId::ZeroHalf => zerohalf::separate(ctx, round),
        SeparatorId::ImpliedBounds => implied::separate(ctx, round),
    };
    // Strongest first, capped per call; ties resolved by insertion order for
    // determinism.
    cuts.sort_by(|a, b| b.efficacy.partial_cmp(&a.efficacy).unwrap());
    cuts.truncate(ctx.params.max_cuts_per_call);
    cuts
}

/// Exhaustive validity oracle: true iff every feasible point of the MILP
/// satisfies the cut (integer enumeration; residual LP maximization over any
/// continuous part via the dense reference solver).
pub fn validate_cut(
    cut: &Cut,
    inst: &MilpInstance,
    var_limit: usize,
) -> Result<bool, InstanceError> {
    let int_vars: Vec<usize> = (0..inst.num_vars).filter(|&j| inst.integrality[j]).collect();
    if int_vars.len() > var_limit {
        return Err(InstanceError::TooLarge(format!(
            "{} integer variables exceed the validation limit {var_limit}",
            int_vars.len()
        )));
    }
    let cont_vars: Vec<usize> = (0..inst.num_vars).filter(|&j| !inst.integrality[j]).collect();
    let mut values = vec![0.0; inst.num_vars];
    let mut ok = true;
    enumerate_validity(inst, cut, &int_vars, &cont_vars, 0, &mut values, &mut ok);
    Ok(ok)
}

fn enumerate_validity(
    inst: &MilpInstance,
    cut: &Cut,
    int_vars: &[usize],
    cont_vars: &[usize],
    depth: usize,
    values: &mut Vec<f64>,
    ok: &mut bool,
) {
    if !*ok {
        return;
    }
    if depth == int_vars.len() {
        if cont_vars.is_empty() {
            if inst.is_feasible(values, 1e-9) && cut.activity(values) > cut.rhs + 1e-6 {
                *ok = false;
            }
            return;
        }
        // Maximize the cut activity over the continuous completion.
        use crate::lp::reference::{solve_dense, DenseLpOutcome};
        let obj: Vec<f64> = cont_vars
            .iter()
            .map(|&j| -cut.coeffs.iter().find(|&&(c, _)| c == j).map_or(0.0, |&(_, a)| a))
            .collect();
        let lower: Vec<f64> = cont_vars.iter().map(|&j| inst.lower[j]).collect();
        let upper: Vec<f64> = cont_vars.iter().map(|&j| inst.upper[j]).collect();
        let mut rows = Vec::new();
        for row in &inst.rows {
            let mut coeffs = Vec::new();
            let mut fixed = 0.0;
            for &(j, a) in &row.coeffs {
                match cont_vars.iter().position(|&c| c == j) {
                    Some(c) => coeffs.push((c, a)),
                    None => fixed += a * values[j],
                }
            }
            let rhs = row.rhs - fixed;
            if coeffs.is_empty() {
                let sat = match row.sense {
                    RowSense::Le => 0.0 <= rhs + 1e-9,
                    RowSense::Ge => 0.0 >= rhs - 1e-9,
                    RowSense::Eq => rhs.abs() <= 1e-9,
                };
                if !sat {
                    return; // this integer part is infeasible
                }
            } else {
                rows.push((coeffs, row.sense, rhs));
            }
        }
        let fixed_act: f64 = cut
            .coeffs
            .iter()
            .filter(|&&(j, _)| inst.integrality[j])
            .map(|&(j, a)| a * values[j])
            .sum();
        match solve_dense(&obj, &rows, &lower, &upper) {
            DenseLpOutcome::Optimal { objective, .. } => {
                let max_act = fixed_act - objective;
                if max_act > cut.rhs + 1e-6 {
                    *ok = false;
                }
            }
            DenseLpOutcome::Infeasible => {}
            DenseLpOutcome::Unbounded => *ok = false,
        }
        return;
    }
    let j = int_vars[depth];
    let lo = inst.lower[j].ceil() as i64;
    let hi = inst.upper[j].floor() as i64;
    for v in lo..=hi {
        values[j] = v as f64;
        enumerate_validity(inst, cut, int_vars, cont_vars, depth + 1, values, ok);
        if !*ok {
            return;
        }
    }
}

/// Buffer of candidate cuts plus per-separator generation and application
/// counters.
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    pub cuts: Vec<Cut>,
    pub generated: [usize; NUM_SEPARATORS],
    pub applied: [usize; NUM_SEPARATORS],
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    pub fn add_cuts(&mut self, cuts: Vec<Cut>) {
        for cut in cuts {
            self.generated[cut.origin.index()] += 1;
            self.cuts.push(cut);
        }
    }

    /// Greedy selection by score = efficacy + 0.1 * objective parallelism,
    /// recomputed at the current LP optimum. Candidates whose parallelism
    /// with an already-selected cut exceeds the threshold are skipped.
    /// Selected cuts are marked applied and their indices returned.
    pub fn select_cuts(
        &mut self,
        x_lp: &[f64],
        max_cuts: usize,
        parallelism_thresh: f64,
    ) -> Vec<usize> {
        let mut candidates: Vec<(usize, f64)> = Vec::new();
        for (i, cut) in self.cuts.iter_mut().enumerate() {
            if cut.applied {
                continue;
            }
            cut.efficacy = cut_efficacy(cut, x_lp);
            if cut.efficacy <= 1e-6 {
                continue;
            }
            candidates.push((i, cut.efficacy + 0.1 * cut.obj_parallelism));
        }
        candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut selected: Vec<usize> = Vec::new();
        for (i, _) in candidates {
            if selected.len() >= max_cuts {
                break;
            }
            let too_parallel = selected.iter().any(|&s| {
                parallelism(&self.cuts[s].coeffs, &self.cuts[i].coeffs) > parallelism_thresh
            });
            if too_parallel {
                continue;
            }
            selected.push(i);
        }
        for &i in &selected {
            self.cuts[i].applied = true;
            self.applied[self.cuts[i].origin.index()] += 1;
        }
        selected
    }

    /// Counter consistency against a recount (pool invariant).
    pub fn counters_consistent(&self) -> bool {
        let mut gen = [0usize; NUM_SEPARATORS];
        let mut app = [0usize; NUM_SEPARATORS];
        for c in &self.cuts {
            gen[c.origin.index()] += 1;
            if c.applied {
                app[c.origin.index()] += 1;
            }
        }
        gen == self.generated && app == self.applied
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        brute_force_opt, generate_bin_packing, generate_comb_auction, generate_indep_set,
        generate_max_cut, generate_packing, BruteForceOutcome, InstanceClass, SparseRow,
        INSTANCE_FORMAT_VERSION,
    };
    use crate::lp::{LpParams, LpStatus};
    use std::collections::BTreeMap;

    fn custom(
        objective: Vec<f64>,
        rows: Vec<SparseRow>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integral: Vec<bool>,
    ) -> MilpInstance {
        let n = objective.len();
        assert_eq!(lower.len(), n);
        MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: "custom".into(),
            num_vars: n,
            objective,
            rows,
            lower,
            upper,
            integrality: integral,
            class_tag: InstanceClass::Custom,
            gen_params: BTreeMap::new(),
        }
    }

    struct Solved {
        prob: LpProblem,
        simplex: Simplex,
        sol: LpSolution,
        params: SepParams,
    }

    fn solve_relaxation(inst: &MilpInstance) -> Solved {
        let prob = LpProblem::from_instance(inst);
        let mut simplex = Simplex::new();
        let sol = simplex
            .solve(&prob, &inst.lower, &inst.upper, None, &LpParams::default())
            .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "relaxation must solve");
        Solved {
            prob,
            simplex,
            sol,
            params: SepParams::default(),
        }
    }

    impl Solved {
        fn ctx<'a>(&'a self, inst: &'a MilpInstance) -> SepContext<'a> {
            SepContext {
                prob: &self.prob,
                simplex: &self.simplex,
                sol: &self.sol,
                inst,
                params: &self.params,
            }
        }
    }

    #[test]
    fn gomory_cuts_are_violated_and_valid() {
        // max x + y s.t. 2x + 3y <= 8, 4x + y <= 9, integer: LP optimum is
        // (1.9, 1.4), both basics fractional.
        let inst = custom(
            vec![-1.0, -1.0],
            vec![
                SparseRow::new(vec![(0, 2.0), (1, 3.0)], RowSense::Le, 8.0),
                SparseRow::new(vec![(0, 4.0), (1, 1.0)], RowSense::Le, 9.0),
            ],
            vec![0.0, 0.0],
            vec![5.0, 5.0],
            vec![true, true],
        );
        let solved = solve_relaxation(&inst);
        let ctx = solved.ctx(&inst);
        assert!(
            (0..2).any(|j| (solved.sol.x[j] - solved.sol.x[j].round()).abs() > 1e-6),
            "fixture must have a fractional relaxation"
        );
        for sep in [SeparatorId::GomoryFractional, SeparatorId::GomoryMir] {
            let cuts = separate(sep, &ctx, 0);
            assert!(!cuts.is_empty(), "{sep} found no cut");
            for cut in &cuts {
                assert!(
                    cut.activity(&solved.sol.x) > cut.rhs + 1e-6,
                    "{sep} cut not violated"
                );
                assert!(validate_cut(cut, &inst, 16).unwrap(), "{sep} cut invalid");
            }
        }
    }

    #[test]
    fn clique_cut_on_fractional_triangle() {
        // Independent-set triangle; LP optimum is x = (.5, .5, .5).
        let inst = custom(
            vec![-1.0, -1.0, -1.0],
            vec![
                SparseRow::new(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0),
                SparseRow::new(vec![(1, 1.0), (2, 1.0)], RowSense::Le, 1.0),
                SparseRow::new(vec![(0, 1.0), (2, 1.0)], RowSense::Le, 1.0),
            ],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        );
        let solved = solve_relaxation(&inst);
        for j in 0..3 {
            assert!((solved.sol.x[j] - 0.5).abs() < 1e-7);
        }
        let ctx = solved.ctx(&inst);
        let cuts = separate(SeparatorId::Clique, &ctx, 0);
        assert_eq!(cuts.len(), 1);
        let cut = &cuts[0];
        // The triangle is the max clique (checked by enumeration of subsets):
        // cut is x0 + x1 + x2 <= 1, violated by 0.5.
        assert_eq!(cut.coeffs.len(), 3);
        assert!((cut.rhs - 1.0).abs() < 1e-9);
        assert!((cut.activity(&solved.sol.x) - cut.rhs - 0.5).abs() < 1e-7);
        assert!(validate_cut(cut, &inst, 16).unwrap());
    }

    #[test]
    fn knapsack_cover_on_small_knapsack() {
        // 3x1 + 4x2 + 5x3 <= 6, binary, maximize the sum: fractional LP.
        let inst = custom(
            vec![-1.0, -1.0, -1.0],
            vec![SparseRow::new(
                vec![(0, 3.0), (1, 4.0), (2, 5.0)],
                RowSense::Le,
                6.0,
            )],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        );
        let solved = solve_relaxation(&inst);
        let ctx = solved.ctx(&inst);
        let cuts = separate(SeparatorId::KnapsackCover, &ctx, 0);
        assert!(!cuts.is_empty(), "cover must be found");
        for cut in &cuts {
            // Validity confirmed by full 2^3 enumeration.
            assert!(validate_cut(cut, &inst, 16).unwrap());
            assert!(cut.activity(&solved.sol.x) > cut.rhs + 1e-6);
        }
    }

    #[test]
    fn validate_cut_examples() {
        let inst = custom(
            vec![-3.0, -2.0],
            vec![SparseRow::new(vec![(0, 2.0), (1, 1.0)], RowSense::Le, 2.0)],
            vec![0.0; 2],
            vec![1.0; 2],
            vec![true; 2],
        );
        let mk = |coeffs: Vec<(usize, f64)>, rhs: f64| Cut {
            coeffs,
            rhs,
            origin: SeparatorId::Clique,
            efficacy: 0.0,
            obj_parallelism: 0.0,
            created_round: 0,
            applied: false,
        };
        // Trivially true cut.
        assert!(validate_cut(&mk(vec![], 0.0), &inst, 16).unwrap());
        // Cut that excludes the optimum (1, 0): x0 <= 0 is invalid.
        let opt = match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => a,
            _ => panic!(),
        };
        assert_eq!(opt.values, vec![1.0, 0.0]);
        assert!(!validate_cut(&mk(vec![(0, 1.0)], 0.0), &inst, 16).unwrap());
        // A valid face: x0 + x1 <= 2.
        assert!(validate_cut(&mk(vec![(0, 1.0), (1, 1.0)], 2.0), &inst, 16).unwrap());
    }

    #[test]
    fn efficacy_examples() {
        let mk = |coeffs: Vec<(usize, f64)>, rhs: f64| Cut {
            coeffs,
            rhs,
            origin: SeparatorId::Clique,
            efficacy: 0.0,
            obj_parallelism: 0.0,
            created_round: 0,
            applied: false,
        };
        // Cut x <= 0 at x* = 1: efficacy 1.0.
        assert!((cut_efficacy(&mk(vec![(0, 1.0)], 0.0), &[1.0]) - 1.0).abs() < 1e-12);
        // Scaling by 2 leaves efficacy unchanged.
        assert!((cut_efficacy(&mk(vec![(0, 2.0)], 0.0), &[1.0]) - 1.0).abs() < 1e-12);
        // Non-violated cut: <= 0.
        assert!(cut_efficacy(&mk(vec![(0, 1.0)], 2.0), &[1.0]) <= 0.0);
    }

    #[test]
    fn select_cuts_greedy_with_parallelism_filter() {
        let mk = |coeffs: Vec<(usize, f64)>, rhs: f64| Cut {
            coeffs,
            rhs,
            origin: SeparatorId::Clique,
            efficacy: 0.0,
            obj_parallelism: 0.0,
            created_round: 0,
            applied: false,
        };
        let mut pool = CutPool::new();
        assert!(pool.select_cuts(&[1.0, 1.0], 20, 0.9).is_empty());

        // Two identical cuts: only one survives the parallelism filter.
        pool.add_cuts(vec![mk(vec![(0, 1.0)], 0.0), mk(vec![(0, 1.0)], 0.0)]);
        let sel = pool.select_cuts(&[1.0, 1.0], 20, 0.9);
        assert_eq!(sel.len(), 1);
        assert!(pool.counters_consistent());

        // Five orthogonal-ish cuts with distinct efficacies, max_cuts = 2:
        // the two most violated win (hand-scored: efficacies 0.5, 0.4, 0.3,
        // 0.2, 0.1 on unit-norm cuts and zero objective parallelism).
        let mut pool = CutPool::new();
        let x = vec![0.5, 0.4, 0.3, 0.2, 0.1];
        pool.add_cuts(vec![
            mk(vec![(0, 1.0)], 0.0),
            mk(vec![(1, 1.0)], 0.0),
            mk(vec![(2, 1.0)], 0.0),
            mk(vec![(3, 1.0)], 0.0),
            mk(vec![(4, 1.0)], 0.0),
        ]);
        let sel = pool.select_cuts(&x, 2, 0.9);
        assert_eq!(sel, vec![0, 1]);
        assert!(pool.counters_consistent());
    }

    #[test]
    fn all_separators_emit_only_valid_violated_cuts_on_random_instances() {
        let mut checked_cuts = 0usize;
        let mut insts: Vec<MilpInstance> = Vec::new();
        for seed in 0..6u64 {
            insts.push(generate_packing(6, 5, seed));
            insts.push(generate_bin_packing(8, 8, seed));
            insts.push(generate_max_cut(4, 5, seed));
            insts.push(generate_comb_auction(5, 9, seed));
            insts.push(
                crate::instances::IndepSetParams {
                    n_nodes: 9,
                    edge_probability: (0.25, 0.45),
                    affinity: (2, 3),
                }
                .generate(seed),
            );
        }
        for inst in &insts {
            if inst.num_integer_vars() > 12 {
                continue;
            }
            let solved = solve_relaxation(inst);
            let ctx = solved.ctx(inst);
            for sep in SeparatorId::ALL {
                let cuts = separate(sep, &ctx, 0);
                // Determinism: same state gives identical lists.
                let again = separate(sep, &ctx, 0);
                assert_eq!(cuts.len(), again.len());
                for (a, b) in cuts.iter().zip(&again) {
                    assert_eq!(a.coeffs, b.coeffs);
                    assert_eq!(a.rhs, b.rhs);
                }
                for cut in &cuts {
                    assert!(
                        cut.activity(&solved.sol.x) > cut.rhs + 1e-6,
                        "{sep} cut not violated on {}",
                        inst.name
                    );
                    assert!(
                        validate_cut(cut, inst, 12).unwrap(),
                        "{sep} emitted an INVALID cut on {}: {:?} <= {}",
                        inst.name,
                        cut.coeffs,
                        cut.rhs
                    );
                    checked_cuts += 1;
                }
            }
        }
        assert!(
            checked_cuts > 50,
            "validity sweep too weak: only {checked_cuts} cuts checked"
        );
    }

    #[test]
    fn config_bitmask_basics() {
        assert_eq!(SeparatorConfig::ALL_ON.active_count(), 8);
        assert_eq!(SeparatorConfig::enumerate_all().count(), 256);
        let c = SeparatorConfig::ALL_OFF.with_bit(SeparatorId::Clique, true);
        assert!(c.is_active(SeparatorId::Clique));
        assert_eq!(c.active_count(), 1);
        assert_eq!(c.hamming(SeparatorConfig::ALL_OFF), 1);
    }
}
