//! {0, 1/2}-Chvatal-Gomory cuts by exact mod-2 reduction of integral base
//! rows, searching single rows and pairs only.
//!
//! Only combinations whose coefficient sum is even everywhere are used, so no
//! coefficient rounding occurs and validity needs nothing beyond integrality
//! of the row activities; the rhs rounds down iff the rhs sum is odd.

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;

struct IntRow {
    coeffs: Vec<(usize, i64)>,
    rhs: i64,
    slack: f64,
    /// Columns with odd coefficients; two rows combine to an all-even sum
    /// iff these sets are equal.
    odd_support: Vec<usize>,
}

fn integral_rows(ctx: &SepContext) -> Vec<IntRow> {
    let mut out = Vec::new();
    let near_int = |v: f64| (v - v.round()).abs() < 1e-9;
    for row in &ctx.inst.rows {
        let ok = near_int(row.rhs)
            && row
                .coeffs
                .iter()
                .all(|&(j, a)| near_int(a) && ctx.inst.integrality[j]);
        if !ok {
            continue;
        }
        let oriented: Vec<(Vec<(usize, i64)>, i64)> = match row.sense {
            RowSense::Le => vec![(to_int(&row.coeffs), row.rhs.round() as i64)],
            RowSense::Ge => vec![(neg_int(&row.coeffs), -row.rhs.round() as i64)],
            RowSense::Eq => vec![
                (to_int(&row.coeffs), row.rhs.round() as i64),
                (neg_int(&row.coeffs), -row.rhs.round() as i64),
            ],
        };
        for (coeffs, rhs) in oriented {
            let act: f64 = coeffs.iter().map(|&(j, a)| a as f64 * ctx.sol.x[j]).sum();
            let slack = rhs as f64 - act;
            if slack >= 1.0 - 1e-6 {
                continue; // cannot participate in a violated combination
            }
            let odd_support: Vec<usize> = coeffs
                .iter()
                .filter(|&&(_, a)| a.rem_euclid(2) == 1)
                .map(|&(j, _)| j)
                .collect();
            out.push(IntRow {
                coeffs,
                rhs,
                slack,
                odd_support,
            });
        }
    }
    out.sort_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap());
    out.truncate(40);
    out
}

fn to_int(coeffs: &[(usize, f64)]) -> Vec<(usize, i64)> {
    coeffs.iter().map(|&(j, a)| (j, a.round() as i64)).collect()
}

fn neg_int(coeffs: &[(usize, f64)]) -> Vec<(usize, i64)> {
    coeffs.iter().map(|&(j, a)| (j, -a.round() as i64)).collect()
}

fn emit(ctx: &SepContext, sum: &[i64], rhs_sum: i64, round: usize) -> Option<Cut> {
    debug_assert!(sum.iter().all(|a| a % 2 == 0));
    debug_assert!(rhs_sum % 2 != 0);
    let dense: Vec<f64> = sum.iter().map(|&a| (a / 2) as f64).collect();
    let rhs = ((rhs_sum - 1) / 2) as f64;
    ctx.finish_cut(&dense, rhs, SeparatorId::ZeroHalf, round)
}

pub fn separate(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let rows = integral_rows(ctx);
    let n = ctx.inst.num_vars;
    let mut cuts = Vec::new();

    // Singles: all-even coefficients with odd rhs.
    for r in &rows {
        if r.odd_support.is_empty() && r.rhs.rem_euclid(2) == 1 {
            let mut sum = vec![0i64; n];
            for &(j, a) in &r.coeffs {
                sum[j] = a;
            }
            if let Some(cut) = emit(ctx, &sum, r.rhs, round) {
                cuts.push(cut);
            }
        }
    }

    // Pairs: identical odd supports with opposite rhs parity, tightest first.
    for i in 0..rows.len() {
        for k in (i + 1)..rows.len() {
            let (a, b) = (&rows[i], &rows[k]);
            if a.slack + b.slack >= 1.0 - 1e-6 {
                continue;
            }
            if (a.rhs + b.rhs).rem_euclid(2) != 1 || a.odd_support != b.odd_support {
                continue;
            }
            let mut sum = vec![0i64; n];
            for &(j, c) in &a.coeffs {
                sum[j] += c;
            }
            for &(j, c) in &b.coeffs {
                sum[j] += c;
            }
            if let Some(cut) = emit(ctx, &sum, a.rhs + b.rhs, round) {
                cuts.push(cut);
            }
        }
    }
    cuts
}
