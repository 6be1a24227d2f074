//! Bounded-variable revised simplex with a dense, periodically refactorized
//! basis inverse.
//!
//! Cold solves start from the all-slack basis with nonbasic structurals
//! placed on their cost-consistent bound, which is dual feasible by
//! construction, and run the dual simplex. Warm resolves after row (cut)
//! additions or bound (branching) changes reuse the previous basis, extend
//! it with the new slack columns, and continue with the dual simplex; a
//! primal simplex covers bases that are primal- but not dual-feasible.
//! Dantzig pricing by default with a smallest-index rule after a run of
//! degenerate pivots.

use super::{LpError, LpParams, LpSolution, LpStatus};
use crate::instances::{MilpInstance, RowSense};

/// A constraint row inside the engine: `coeffs . x + slack = rhs`.
#[derive(Debug, Clone)]
pub struct EngineRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    /// True if the row's slack takes integer values at every integer-feasible
    /// point (integer data over integer variables). Set at construction and
    /// used by the tableau-based separators.
    pub integral: bool,
}

/// An LP with a fixed column set and dynamically appended cut rows.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_structs: usize,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    rows: Vec<EngineRow>,
    cols: Vec<Vec<(usize, f64)>>,
}

fn is_near_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-9
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        rows: Vec<(Vec<(usize, f64)>, RowSense, f64)>,
        integral_vars: &[bool],
    ) -> Self {
        let n = objective.len();
        let mut p = LpProblem {
            num_structs: n,
            objective,
            lower,
            upper,
            rows: Vec::new(),
            cols: vec![Vec::new(); n],
        };
        for (coeffs, sense, rhs) in rows {
            p.append_row(coeffs, sense, rhs, integral_vars);
        }
        p
    }

    /// LP relaxation of a MILP instance.
    pub fn from_instance(inst: &MilpInstance) -> Self {
        LpProblem::new(
            inst.objective.clone(),
            inst.lower.clone(),
            inst.upper.clone(),
            inst.rows
                .iter()
                .map(|r| (r.coeffs.clone(), r.sense, r.rhs))
                .collect(),
            &inst.integrality,
        )
    }

    /// Appends a row (base constraint or cut) and returns its index.
    pub fn append_row(
        &mut self,
        mut coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
        integral_vars: &[bool],
    ) -> usize {
        coeffs.sort_by_key(|&(j, _)| j);
        coeffs.retain(|&(_, a)| a != 0.0);
        let integral = is_near_integer(rhs)
            && coeffs
                .iter()
                .all(|&(j, a)| is_near_integer(a) && integral_vars[j]);
        let idx = self.rows.len();
        for &(j, a) in &coeffs {
            self.cols[j].push((idx, a));
        }
        self.rows.push(EngineRow {
            coeffs,
            sense,
            rhs,
            integral,
        });
        idx
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &EngineRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[EngineRow] {
        &self.rows
    }

    /// Slack bounds implied by a row's sense.
    pub fn slack_bounds(sense: RowSense) -> (f64, f64) {
        match sense {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VSt {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// Compact basis snapshot for warm starts: one entry per variable
/// (structurals then slacks) at the time of the snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    statuses: Vec<SnapSt>,
}

impl Basis {
    /// Placeholder that never matches a problem; solves fall back to a cold
    /// start.
    pub fn empty() -> Self {
        Basis {
            statuses: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SnapSt {
    Basic,
    AtLower,
    AtUpper,
}

/// A dense simplex tableau row for a basic variable: the identity
/// `coeffs . x = rhs` holds for every x satisfying the row equations,
/// with `coeffs[basic_var] == 1` and zeros on the other basic variables.
#[derive(Debug, Clone)]
pub struct TableauRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

pub struct Simplex {
    n: usize,
    m: usize,
    tot: usize,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    st: Vec<VSt>,
    basic: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    d: Vec<f64>,
    pivots: usize,
    degenerate_run: usize,
    solved: bool,
}

impl Default for Simplex {
    fn default() -> Self {
        Self::new()
    }
}

impl Simplex {
    pub fn new() -> Self {
        Simplex {
            n: 0,
            m: 0,
            tot: 0,
            cost: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            st: Vec::new(),
            basic: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            d: Vec::new(),
            pivots: 0,
            degenerate_run: 0,
            solved: false,
        }
    }

    /// Solve with the given structural bounds (node-local bounds override the
    /// problem's own) and an optional warm basis.
    pub fn solve(
        &mut self,
        p: &LpProblem,
        lower: &[f64],
        upper: &[f64],
        warm: Option<&Basis>,
        params: &LpParams,
    ) -> Result<LpSolution, LpError> {
        let n = p.num_structs;
        let m = p.num_rows();
        for j in 0..n {
            if !lower[j].is_finite() || !upper[j].is_finite() {
                return Err(LpError::UnboundedBox(j));
            }
        }
        self.n = n;
        self.m = m;
        self.tot = n + m;
        self.pivots = 0;
        self.degenerate_run = 0;
        self.solved = false;

        self.cost = vec![0.0; self.tot];
        self.cost[..n].copy_from_slice(&p.objective);
        self.lo = vec![0.0; self.tot];
        self.hi = vec![0.0; self.tot];
        self.lo[..n].copy_from_slice(lower);
        self.hi[..n].copy_from_slice(upper);
        for i in 0..m {
            let (sl, su) = LpProblem::slack_bounds(p.row(i).sense);
            self.lo[n + i] = sl;
            self.hi[n + i] = su;
        }

        let mut warm_ok = false;
        if let Some(basis) = warm {
            if basis.statuses.len() <= self.tot
                && basis.statuses.len() >= n
                && (basis.statuses.len() - n) <= m
            {
                self.st = basis
                    .statuses
                    .iter()
                    .map(|s| match s {
                        SnapSt::Basic => VSt::Basic(usize::MAX),
                        SnapSt::AtLower => VSt::AtLower,
                        SnapSt::AtUpper => VSt::AtUpper,
                    })
                    .collect();
                // Rows appended after the snapshot enter with their slack basic.
                while self.st.len() < self.tot {
                    self.st.push(VSt::Basic(usize::MAX));
                }
                let n_basic = self.st.iter().filter(|s| matches!(s, VSt::Basic(_))).count();
                if n_basic == m && self.assign_positions() && self.refactorize(p) {
                    warm_ok = true;
                }
            }
        }
        if !warm_ok {
            self.cold_basis(p);
            if !self.refactorize(p) {
                return Err(LpError::Numerical("singular all-slack basis".into()));
            }
        }
        self.recompute_primal(p);
        self.recompute_duals(p);

        // Nonbasic statuses must sit on a finite bound; repair if a one-sided
        // slack ended up on its infinite side (possible only with a stale
        // warm basis).
        for v in 0..self.tot {
            match self.st[v] {
                VSt::AtLower if !self.lo[v].is_finite() => self.st[v] = VSt::AtUpper,
                VSt::AtUpper if !self.hi[v].is_finite() => self.st[v] = VSt::AtLower,
                _ => {}
            }
        }

        // Restore dual feasibility by bound flips where possible.
        let mut flipped = false;
        let mut dual_infeasible = false;
        for v in 0..self.tot {
            if self.is_fixed(v) {
                continue;
            }
            match self.st[v] {
                VSt::AtLower if self.d[v] < -params.opt_tol => {
                    if self.hi[v].is_finite() {
                        self.st[v] = VSt::AtUpper;
                        flipped = true;
                    } else {
                        dual_infeasible = true;
                    }
                }
                VSt::AtUpper if self.d[v] > params.opt_tol => {
                    if self.lo[v].is_finite() {
                        self.st[v] = VSt::AtLower;
                        flipped = true;
                    } else {
                        dual_infeasible = true;
                    }
                }
                _ => {}
            }
        }
        if flipped {
            self.recompute_primal(p);
        }

        let status = if dual_infeasible {
            if self.max_primal_violation() <= params.feas_tol {
                self.primal_loop(p, params)
            } else {
                // Neither side feasible: restart cold (always dual feasible).
                self.cold_basis(p);
                if !self.refactorize(p) {
                    return Err(LpError::Numerical("singular all-slack basis".into()));
                }
                self.recompute_primal(p);
                self.recompute_duals(p);
                self.dual_loop(p, params)
            }
        } else {
            self.dual_loop(p, params)
        };

        self.solved = matches!(status, LpStatus::Optimal);
        Ok(self.extract(p, status))
    }

    fn is_fixed(&self, v: usize) -> bool {
        self.lo[v] == self.hi[v]
    }

    fn nb_value(&self, v: usize) -> f64 {
        match self.st[v] {
            VSt::AtLower => self.lo[v],
            VSt::AtUpper => self.hi[v],
            VSt::Basic(_) => unreachable!("nb_value on basic variable"),
        }
    }

    fn cold_basis(&mut self, p: &LpProblem) {
        let n = self.n;
        self.st = (0..self.tot)
            .map(|v| {
                if v >= n {
                    VSt::Basic(v - n)
                } else if p.objective[v] >= 0.0 {
                    VSt::AtLower
                } else {
                    VSt::AtUpper
                }
            })
            .collect();
        self.basic = (0..self.m).map(|i| n + i).collect();
    }

    fn assign_positions(&mut self) -> bool {
        self.basic = vec![usize::MAX; self.m];
        let mut pos = 0;
        for v in 0..self.tot {
            if matches!(self.st[v], VSt::Basic(_)) {
                if pos >= self.m {
                    return false;
                }
                self.st[v] = VSt::Basic(pos);
                self.basic[pos] = v;
                pos += 1;
            }
        }
        pos == self.m
    }

    /// Rebuild the dense basis inverse by Gauss-Jordan with partial pivoting.
    fn refactorize(&mut self, p: &LpProblem) -> bool {
        let m = self.m;
        let n = self.n;
        let mut a = vec![0.0f64; m * m]; // B, column per basis position
        for (pos, &v) in self.basic.iter().enumerate() {
            if v >= n {
                a[(v - n) * m + pos] = 1.0;
            } else {
                for &(i, coef) in &p.cols[v] {
                    a[i * m + pos] = coef;
                }
            }
        }
        let mut inv = vec![0.0f64; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].abs();
            for r in (col + 1)..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if piv != col {
                // Row swaps are elementary operations on the augmented
                // system; the basis column order is untouched.
                for c in 0..m {
                    a.swap(piv * m + c, col * m + c);
                    inv.swap(piv * m + c, col * m + c);
                }
            }
            let pv = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= pv;
                inv[col * m + c] /= pv;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[col * m + c];
                            inv[r * m + c] -= f * inv[col * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        true
    }

    /// xb = B^-1 (b - A_N x_N).
    fn recompute_primal(&mut self, p: &LpProblem) {
        let m = self.m;
        let n = self.n;
        let mut rhs: Vec<f64> = (0..m).map(|i| p.row(i).rhs).collect();
        for v in 0..self.tot {
            if matches!(self.st[v], VSt::Basic(_)) {
                continue;
            }
            let xv = self.nb_value(v);
            if xv == 0.0 {
                continue;
            }
            if v >= n {
                rhs[v - n] -= xv;
            } else {
                for &(i, coef) in &p.cols[v] {
                    rhs[i] -= coef * xv;
                }
            }
        }
        self.xb = vec![0.0; m];
        for r in 0..m {
            let mut acc = 0.0;
            for c in 0..m {
                acc += self.binv[r * m + c] * rhs[c];
            }
            self.xb[r] = acc;
        }
    }

    /// y = c_B B^-1, then d_j = c_j - y . a_j for nonbasic j.
    fn recompute_duals(&mut self, p: &LpProblem) {
        let n = self.n;
        let y = self.dual_values();
        self.d = vec![0.0; self.tot];
        for v in 0..self.tot {
            if matches!(self.st[v], VSt::Basic(_)) {
                continue;
            }
            let ya = if v >= n {
                y[v - n]
            } else {
                p.cols[v].iter().map(|&(i, coef)| y[i] * coef).sum()
            };
            self.d[v] = self.cost[v] - ya;
        }
    }

    fn dual_values(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (pos, &v) in self.basic.iter().enumerate() {
            let cb = self.cost[v];
            if cb != 0.0 {
                for c in 0..m {
                    y[c] += cb * self.binv[pos * m + c];
                }
            }
        }
        y
    }

    /// w = B^-1 a_v.
    fn ftran(&self, p: &LpProblem, v: usize) -> Vec<f64> {
        let m = self.m;
        let n = self.n;
        let mut w = vec![0.0; m];
        if v >= n {
            let k = v - n;
            for r in 0..m {
                w[r] = self.binv[r * m + k];
            }
        } else {
            for &(i, coef) in &p.cols[v] {
                for r in 0..m {
                    w[r] += coef * self.binv[r * m + i];
                }
            }
        }
        w
    }

    /// alpha_j = (row r of B^-1 A) for every nonbasic j; also returns the row.
    fn pivot_row(&self, p: &LpProblem, r: usize) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let n = self.n;
        let rho: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
        let mut alpha = vec![0.0; self.tot];
        for v in 0..self.tot {
            if matches!(self.st[v], VSt::Basic(_)) {
                continue;
            }
            alpha[v] = if v >= n {
                rho[v - n]
            } else {
                p.cols[v].iter().map(|&(i, coef)| rho[i] * coef).sum()
            };
        }
        (alpha, rho)
    }

    fn update_binv(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let pr = w[r];
        for c in 0..m {
            self.binv[r * m + c] /= pr;
        }
        for i in 0..m {
            if i != r {
                let f = w[i];
                if f.abs() > 1e-13 {
                    for c in 0..m {
                        self.binv[i * m + c] -= f * self.binv[r * m + c];
                    }
                }
            }
        }
    }

    fn maybe_refactor(&mut self, p: &LpProblem, params: &LpParams) {
        if self.pivots % params.refactor_every == 0 {
            if self.refactorize(p) {
                self.recompute_primal(p);
                self.recompute_duals(p);
            }
        }
    }

    fn max_primal_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (pos, &v) in self.basic.iter().enumerate() {
            let x = self.xb[pos];
            worst = worst.max(self.lo[v] - x).max(x - self.hi[v]);
        }
        worst
    }

    fn dual_loop(&mut self, p: &LpProblem, params: &LpParams) -> LpStatus {
        loop {
            if self.pivots >= params.max_pivots {
                return LpStatus::IterationLimit;
            }
            let bland = self.degenerate_run > params.bland_after;

            // Leaving: most violated basic variable (or smallest index in
            // Bland mode).
            let mut r_pick: Option<(usize, f64, bool)> = None; // (pos, viol, below_lower)
            for (pos, &v) in self.basic.iter().enumerate() {
                let x = self.xb[pos];
                let below = self.lo[v] - x;
                let above = x - self.hi[v];
                let (viol, is_below) = if below >= above { (below, true) } else { (above, false) };
                if viol <= params.feas_tol {
                    continue;
                }
                let better = match r_pick {
                    None => true,
                    Some((bp, bv, _)) => {
                        if bland {
                            v < self.basic[bp]
                        } else {
                            viol > bv
                        }
                    }
                };
                if better {
                    r_pick = Some((pos, viol, is_below));
                }
            }
            let Some((r, _, below_lower)) = r_pick else {
                return LpStatus::Optimal;
            };
            let leaving = self.basic[r];

            let (alpha, _rho) = self.pivot_row(p, r);
            // Entering: dual ratio test.
            let mut e_pick: Option<(usize, f64, f64)> = None; // (var, ratio, |alpha|)
            for v in 0..self.tot {
                if matches!(self.st[v], VSt::Basic(_)) || self.is_fixed(v) {
                    continue;
                }
                let a = alpha[v];
                if a.abs() <= 1e-9 {
                    continue;
                }
                let eligible = match (self.st[v], below_lower) {
                    (VSt::AtLower, true) => a < 0.0,
                    (VSt::AtLower, false) => a > 0.0,
                    (VSt::AtUpper, true) => a > 0.0,
                    (VSt::AtUpper, false) => a < 0.0,
                    _ => false,
                };
                if !eligible {
                    continue;
                }
                let ratio = (self.d[v] / a).abs();
                let better = match e_pick {
                    None => true,
                    Some((bv, br, ba)) => {
                        if bland {
                            ratio < br - 1e-10 || (ratio < br + 1e-10 && v < bv)
                        } else {
                            ratio < br - 1e-10 || (ratio < br + 1e-10 && a.abs() > ba)
                        }
                    }
                };
                if better {
                    e_pick = Some((v, ratio, a.abs()));
                }
            }
            let Some((e, _, _)) = e_pick else {
                return LpStatus::Infeasible;
            };

            let w = self.ftran(p, e);
            let a_re = w[r];
            debug_assert!(a_re.abs() > 1e-12);
            let bound_r = if below_lower { self.lo[leaving] } else { self.hi[leaving] };
            let delta = (self.xb[r] - bound_r) / a_re;
            if delta.abs() <= 1e-11 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            let x_e_new = self.nb_value(e) + delta;
            for i in 0..self.m {
                self.xb[i] -= w[i] * delta;
            }
            self.xb[r] = x_e_new;

            let t = self.d[e] / a_re;
            for v in 0..self.tot {
                if !matches!(self.st[v], VSt::Basic(_)) && alpha[v] != 0.0 {
                    self.d[v] -= t * alpha[v];
                }
            }
            self.d[e] = 0.0;
            self.d[leaving] = -t;

            self.st[leaving] = if below_lower { VSt::AtLower } else { VSt::AtUpper };
            self.st[e] = VSt::Basic(r);
            self.basic[r] = e;
            self.update_binv(r, &w);
            self.pivots += 1;
            self.maybe_refactor(p, params);
        }
    }

    fn primal_loop(&mut self, p: &LpProblem, params: &LpParams) -> LpStatus {
        loop {
            if self.pivots >= params.max_pivots {
                return LpStatus::IterationLimit;
            }
            let bland = self.degenerate_run > params.bland_after;

            // Entering: most attractive reduced cost.
            let mut e_pick: Option<(usize, f64)> = None;
            for v in 0..self.tot {
                if matches!(self.st[v], VSt::Basic(_)) || self.is_fixed(v) {
                    continue;
                }
                let gain = match self.st[v] {
                    VSt::AtLower => -self.d[v],
                    VSt::AtUpper => self.d[v],
                    _ => unreachable!(),
                };
                if gain <= params.opt_tol {
                    continue;
                }
                let better = match e_pick {
                    None => true,
                    Some((bv, bg)) => {
                        if bland {
                            v < bv
                        } else {
                            gain > bg
                        }
                    }
                };
                if better {
                    e_pick = Some((v, gain));
                }
            }
            let Some((e, _)) = e_pick else {
                return LpStatus::Optimal;
            };

            let dir = if self.st[e] == VSt::AtLower { 1.0 } else { -1.0 };
            let w = self.ftran(p, e);
            // Ratio test: basic bound hits plus the entering bound flip.
            let mut limit = self.hi[e] - self.lo[e]; // flip distance (may be inf)
            let mut blocker: Option<(usize, bool, f64)> = None; // (pos, hits_lower, |pivot|)
            for i in 0..self.m {
                let rate = -dir * w[i];
                let (step, hits_lower) = if rate > 1e-9 {
                    (((self.hi[self.basic[i]] - self.xb[i]).max(0.0)) / rate, false)
                } else if rate < -1e-9 {
                    (((self.xb[i] - self.lo[self.basic[i]]).max(0.0)) / -rate, true)
                } else {
                    continue;
                };
                if !step.is_finite() {
                    continue;
                }
                let replace = step < limit - 1e-12
                    || (step < limit + 1e-12
                        && match blocker {
                            None => true,
                            Some((bp, _, bw)) => {
                                if bland {
                                    self.basic[i] < self.basic[bp]
                                } else {
                                    w[i].abs() > bw
                                }
                            }
                        });
                if replace {
                    limit = limit.min(step.max(0.0));
                    blocker = Some((i, hits_lower, w[i].abs()));
                }
            }
            if !limit.is_finite() {
                return LpStatus::Unbounded;
            }
            if limit <= 1e-11 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }

            match blocker {
                None => {
                    // Bound flip: entering variable crosses to its other bound.
                    let change = dir * limit;
                    for i in 0..self.m {
                        self.xb[i] -= w[i] * change;
                    }
                    self.st[e] = if dir > 0.0 { VSt::AtUpper } else { VSt::AtLower };
                    self.pivots += 1;
                    self.maybe_refactor(p, params);
                }
                Some((r, hits_lower, _)) => {
                    let leaving = self.basic[r];
                    let (alpha, _rho) = self.pivot_row(p, r);
                    let a_re = w[r];
                    let change = dir * limit;
                    for i in 0..self.m {
                        self.xb[i] -= w[i] * change;
                    }
                    self.xb[r] = self.nb_value(e) + change;

                    let t = self.d[e] / a_re;
                    for v in 0..self.tot {
                        if !matches!(self.st[v], VSt::Basic(_)) && alpha[v] != 0.0 {
                            self.d[v] -= t * alpha[v];
                        }
                    }
                    self.d[e] = 0.0;
                    self.d[leaving] = -t;

                    self.st[leaving] = if hits_lower { VSt::AtLower } else { VSt::AtUpper };
                    self.st[e] = VSt::Basic(r);
                    self.basic[r] = e;
                    self.update_binv(r, &w);
                    self.pivots += 1;
                    self.maybe_refactor(p, params);
                }
            }
        }
    }

    fn extract(&self, p: &LpProblem, status: LpStatus) -> LpSolution {
        use super::BasisStatus;
        let n = self.n;
        let mut x = vec![0.0; n];
        for j in 0..n {
            x[j] = match self.st[j] {
                VSt::Basic(pos) => self.xb[pos],
                VSt::AtLower => self.lo[j],
                VSt::AtUpper => self.hi[j],
            };
        }
        let objective = (0..n).map(|j| p.objective[j] * x[j]).sum();
        let duals = self.dual_values();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| match self.st[j] {
                VSt::Basic(_) => 0.0,
                _ => self.d[j],
            })
            .collect();
        let to_status = |v: usize| -> BasisStatus {
            match self.st[v] {
                VSt::Basic(_) => BasisStatus::Basic,
                VSt::AtLower => BasisStatus::Lower,
                VSt::AtUpper => BasisStatus::Upper,
            }
        };
        LpSolution {
            status,
            x,
            objective,
            duals,
            reduced_costs,
            var_status: (0..n).map(to_status).collect(),
            row_status: (n..self.tot).map(to_status).collect(),
            pivot_count: self.pivots,
        }
    }

    /// Basis snapshot for later warm starts.
    pub fn basis(&self) -> Basis {
        Basis {
            statuses: self
                .st
                .iter()
                .map(|s| match s {
                    VSt::Basic(_) => SnapSt::Basic,
                    VSt::AtLower => SnapSt::AtLower,
                    VSt::AtUpper => SnapSt::AtUpper,
                })
                .collect(),
        }
    }

    /// Tableau row of a basic variable, valid after an optimal solve.
    pub fn tableau_row(&self, p: &LpProblem, basic_var: usize) -> Result<TableauRow, LpError> {
        if !self.solved {
            return Err(LpError::NotSolved);
        }
        let pos = match self.st.get(basic_var) {
            Some(VSt::Basic(pos)) => *pos,
            _ => return Err(LpError::NotBasic(basic_var)),
        };
        let (alpha, rho) = self.pivot_row(p, pos);
        let mut coeffs = alpha;
        coeffs[basic_var] = 1.0;
        let rhs: f64 = (0..self.m).map(|i| rho[i] * p.row(i).rhs).sum();
        Ok(TableauRow { coeffs, rhs })
    }

    /// Value of any variable (structural or slack) in the current solution.
    pub fn var_value(&self, v: usize) -> f64 {
        match self.st[v] {
            VSt::Basic(pos) => self.xb[pos],
            VSt::AtLower => self.lo[v],
            VSt::AtUpper => self.hi[v],
        }
    }
}
