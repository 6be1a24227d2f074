//! Aggregated mixed-integer-rounding cuts: combine up to three base rows
//! with weights taken from the dual solution, complement the integer
//! variables onto their nearer global bound, and apply MIR with a small
//! divisor search.

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;

const MAX_AGGREGATED_ROWS: usize = 3;

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// Aggregate the given base rows as `alpha . x <= beta` with nonnegative
/// weights (equalities may take either sign).
fn aggregate(ctx: &SepContext, rows: &[(usize, f64)]) -> (Vec<f64>, f64) {
    let n = ctx.inst.num_vars;
    let mut alpha = vec![0.0f64; n];
    let mut beta = 0.0;
    for &(ri, weight) in rows {
        let row = &ctx.inst.rows[ri];
        let sign = match row.sense {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => weight.signum(),
        };
        let w = weight.abs() * sign;
        for &(j, a) in &row.coeffs {
            alpha[j] += w * a;
        }
        beta += w * row.rhs;
    }
    (alpha, beta)
}

/// MIR on `sum a_j z_j <= b` over nonnegative integers z:
/// sum (floor(a_j) + (frac(a_j) - f)^+ / (1 - f)) z_j <= floor(b).
fn mir_coef(a: f64, f: f64) -> f64 {
    let fj = frac(a);
    a.floor() + if fj > f { (fj - f) / (1.0 - f) } else { 0.0 }
}

pub fn separate(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let inst = ctx.inst;
    let n = inst.num_vars;
    let n_base = inst.rows.len();

    // Seed rows: largest |dual| first.
    let mut seeds: Vec<(usize, f64)> = (0..n_base)
        .filter_map(|i| {
            let y = ctx.sol.duals[i];
            (y.abs() > 1e-9).then_some((i, y))
        })
        .collect();
    seeds.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap().then(a.0.cmp(&b.0)));
    seeds.truncate(MAX_AGGREGATED_ROWS);
    if seeds.is_empty() {
        return Vec::new();
    }
    let max_w = seeds[0].1.abs();

    let mut cuts = Vec::new();
    for take in 1..=seeds.len() {
        let combo: Vec<(usize, f64)> = seeds[..take]
            .iter()
            .map(|&(i, y)| (i, y / max_w))
            .collect();
        let (alpha, beta) = aggregate(ctx, &combo);

        // Complement every supported variable onto its nearer global bound;
        // all must be integer with integral finite bounds.
        let mut ok = true;
        let mut comp_upper = vec![false; n];
        let mut ahat = vec![0.0f64; n];
        let mut bhat = beta;
        for j in 0..n {
            if alpha[j] == 0.0 {
                continue;
            }
            let (lo, hi) = (inst.lower[j], inst.upper[j]);
            if !inst.integrality[j]
                || !lo.is_finite()
                || !hi.is_finite()
                || (lo - lo.round()).abs() > 1e-9
                || (hi - hi.round()).abs() > 1e-9
            {
                ok = false;
                break;
            }
            let xj = ctx.sol.x[j];
            if xj - lo <= hi - xj {
                ahat[j] = alpha[j];
                bhat -= alpha[j] * lo;
            } else {
                comp_upper[j] = true;
                ahat[j] = -alpha[j];
                bhat -= alpha[j] * hi;
            }
        }
        if !ok {
            continue;
        }

        // Divisor candidates: 1 plus |coefficients| of the most fractional
        // supported variables.
        let mut frac_vars: Vec<(usize, f64)> = (0..n)
            .filter(|&j| ahat[j].abs() > 1e-9)
            .map(|j| {
                let f = (ctx.sol.x[j] - ctx.sol.x[j].round()).abs();
                (j, f)
            })
            .filter(|&(_, f)| f > 1e-6)
            .collect();
        frac_vars.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut divisors = vec![1.0f64];
        for &(j, _) in frac_vars.iter().take(3) {
            let d = ahat[j].abs();
            if divisors.iter().all(|&x| (x - d).abs() > 1e-9) {
                divisors.push(d);
            }
        }

        let mut best: Option<Cut> = None;
        for &div in &divisors {
            let f = frac(bhat / div);
            if f < 0.05 || f > 0.95 {
                continue;
            }
            // Cut over complemented variables, then substitute back.
            let mut dense = vec![0.0f64; n];
            let mut rhs = (bhat / div).floor();
            for j in 0..n {
                if ahat[j] == 0.0 {
                    continue;
                }
                let c = mir_coef(ahat[j] / div, f);
                if c == 0.0 {
                    continue;
                }
                if comp_upper[j] {
                    // z_j = hi - x_j.
                    dense[j] -= c;
                    rhs -= c * inst.upper[j];
                } else {
                    // z_j = x_j - lo.
                    dense[j] += c;
                    rhs += c * inst.lower[j];
                }
            }
            if let Some(cut) = ctx.finish_cut(&dense, rhs, SeparatorId::CmirAggregation, round) {
                let better = best
                    .as_ref()
                    .map_or(true, |b| cut.efficacy > b.efficacy + 1e-12);
                if better {
                    best = Some(cut);
                }
            }
        }
        if let Some(cut) = best {
            cuts.push(cut);
        }
    }
    cuts
}
