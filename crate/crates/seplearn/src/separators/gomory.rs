//! Gomory fractional and Gomory mixed-integer cuts from simplex tableau rows.
//!
//! A tableau row of a basic integer variable is an identity
//! `x_B + sum_j alpha_j xi_j = rhs` over the nonbasic variables (structurals
//! and slacks). Each nonbasic term is shifted onto the *global* bound nearest
//! its current value, `t_j = xi_j - L` or `t_j = U - xi_j`, so `t_j >= 0`
//! holds for every point of the original MILP and the derived cut is valid
//! for the whole tree, not just the current node. At the root every `t_j` is
//! zero and the cut is violated by exactly the rhs fraction.

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shift {
    /// t = xi - bound (xi at or near its lower bound).
    Lower(f64),
    /// t = bound - xi (xi at or near its upper bound).
    Upper(f64),
}

#[derive(Debug, Clone)]
struct TTerm {
    var: usize, // < n structural, >= n slack index n + row
    coef: f64,  // coefficient of t in the shifted row
    shift: Shift,
    integral: bool,
}

struct ShiftedRow {
    terms: Vec<TTerm>,
    rhs: f64,
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// Shift a tableau row into nonnegative t-space using global bounds.
/// Returns None if a needed bound is unusable (non-finite or, for an integer
/// variable, not integral).
fn shift_row(ctx: &SepContext, basic_var: usize) -> Option<ShiftedRow> {
    let trow = ctx.simplex.tableau_row(ctx.prob, basic_var).ok()?;
    let n = ctx.inst.num_vars;
    let mut terms = Vec::new();
    let mut rhs = trow.rhs;
    for (v, &coef) in trow.coeffs.iter().enumerate() {
        if v == basic_var || coef.abs() <= 1e-11 {
            continue;
        }
        if v < n {
            let (lo, hi) = (ctx.inst.lower[v], ctx.inst.upper[v]);
            let val = ctx.simplex.var_value(v);
            let integral = ctx.inst.integrality[v];
            let use_lower = (val - lo).abs() <= (hi - val).abs();
            let (shift, bound, tcoef) = if use_lower {
                (Shift::Lower(lo), lo, coef)
            } else {
                (Shift::Upper(hi), hi, -coef)
            };
            if !bound.is_finite() || (integral && (bound - bound.round()).abs() > 1e-9) {
                return None;
            }
            rhs -= coef * bound;
            terms.push(TTerm {
                var: v,
                coef: tcoef,
                shift,
                integral,
            });
        } else {
            let row = ctx.prob.row(v - n);
            match row.sense {
                RowSense::Eq => continue, // slack fixed at zero
                RowSense::Le => terms.push(TTerm {
                    var: v,
                    coef,
                    shift: Shift::Lower(0.0),
                    integral: row.integral,
                }),
                RowSense::Ge => terms.push(TTerm {
                    var: v,
                    coef: -coef,
                    shift: Shift::Upper(0.0),
                    integral: row.integral,
                }),
            }
        }
    }
    Some(ShiftedRow { terms, rhs })
}

/// Translate a t-space inequality `sum c_j t_j >= rhs_t` back to structural
/// space as a `<=` cut.
fn to_structural_cut(
    ctx: &SepContext,
    row: &ShiftedRow,
    tcoefs: &[f64],
    rhs_t: f64,
    origin: SeparatorId,
    round: usize,
) -> Option<Cut> {
    let n = ctx.inst.num_vars;
    let mut gamma = vec![0.0f64; n];
    let mut constant = 0.0f64;
    for (term, &c) in row.terms.iter().zip(tcoefs) {
        if c == 0.0 {
            continue;
        }
        if term.var < n {
            match term.shift {
                Shift::Lower(b) => {
                    gamma[term.var] += c;
                    constant -= c * b;
                }
                Shift::Upper(b) => {
                    gamma[term.var] -= c;
                    constant += c * b;
                }
            }
        } else {
            // Slack substitution: s = b_row - a.x.
            let prow = ctx.prob.row(term.var - n);
            let sign = match term.shift {
                Shift::Lower(_) => 1.0,  // t = s
                Shift::Upper(_) => -1.0, // t = -s
            };
            for &(j, a) in &prow.coeffs {
                gamma[j] -= sign * c * a;
            }
            constant += sign * c * prow.rhs;
        }
    }
    // gamma.x + constant >= rhs_t  =>  (-gamma).x <= constant - rhs_t.
    for g in gamma.iter_mut() {
        *g = -*g;
    }
    ctx.finish_cut(&gamma, constant - rhs_t, origin, round)
}

/// Basic structural integer variables with fractional values, most
/// fractional first.
fn candidates(ctx: &SepContext) -> Vec<usize> {
    use crate::lp::BasisStatus;
    let mut cands: Vec<(usize, f64)> = (0..ctx.inst.num_vars)
        .filter(|&j| ctx.inst.integrality[j] && ctx.sol.var_status[j] == BasisStatus::Basic)
        .filter_map(|j| {
            let f = frac(ctx.sol.x[j]);
            let dist = f.min(1.0 - f);
            (dist > 1e-6).then_some((j, dist))
        })
        .collect();
    cands.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    cands.truncate(2 * ctx.params.max_cuts_per_call);
    cands.into_iter().map(|(j, _)| j).collect()
}

/// Pure fractional Gomory cuts. Applicable only when every term in the
/// shifted row is integral; the cut is sum_j frac(a_j) t_j >= frac(rhs).
pub fn separate_fractional(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for j in candidates(ctx) {
        let Some(row) = shift_row(ctx, j) else {
            continue;
        };
        if !row.terms.iter().all(|t| t.integral) {
            continue;
        }
        let f0 = frac(row.rhs);
        if f0 < ctx.params.away || f0 > 1.0 - ctx.params.away {
            continue;
        }
        let tcoefs: Vec<f64> = row.terms.iter().map(|t| frac(t.coef)).collect();
        if let Some(cut) =
            to_structural_cut(ctx, &row, &tcoefs, f0, SeparatorId::GomoryFractional, round)
        {
            cuts.push(cut);
        }
    }
    cuts
}

/// Gomory mixed-integer cuts; continuous terms are handled by the standard
/// mixed-integer rounding coefficients.
pub fn separate_mir(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for j in candidates(ctx) {
        let Some(row) = shift_row(ctx, j) else {
            continue;
        };
        let f0 = frac(row.rhs);
        if f0 < ctx.params.away || f0 > 1.0 - ctx.params.away {
            continue;
        }
        let tcoefs: Vec<f64> = row
            .terms
            .iter()
            .map(|t| {
                if t.integral {
                    let fj = frac(t.coef);
                    if fj <= f0 {
                        fj
                    } else {
                        f0 * (1.0 - fj) / (1.0 - f0)
                    }
                } else if t.coef >= 0.0 {
                    t.coef
                } else {
                    f0 * (-t.coef) / (1.0 - f0)
                }
            })
            .collect();
        if let Some(cut) = to_structural_cut(ctx, &row, &tcoefs, f0, SeparatorId::GomoryMir, round)
        {
            cuts.push(cut);
        }
    }
    cuts
}
