//! Minimal cover cuts from knapsack-like base rows over binary variables.

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;

/// A row restricted to binary variables, complemented so all coefficients are
/// positive: sum a_j x~_j <= b with x~ = x or 1 - x.
struct BinKnapsack {
    items: Vec<(usize, f64, bool)>, // (var, positive coef, complemented)
    rhs: f64,
}

fn binary_knapsack(ctx: &SepContext, coeffs: &[(usize, f64)], rhs: f64) -> Option<BinKnapsack> {
    let mut items = Vec::with_capacity(coeffs.len());
    let mut b = rhs;
    for &(j, a) in coeffs {
        if a == 0.0 {
            continue;
        }
        let binary = ctx.inst.integrality[j]
            && ctx.inst.lower[j].abs() < 1e-9
            && (ctx.inst.upper[j] - 1.0).abs() < 1e-9;
        if !binary {
            return None;
        }
        if a > 0.0 {
            items.push((j, a, false));
        } else {
            items.push((j, -a, true));
            b -= a;
        }
    }
    (items.len() >= 2 && b >= -1e-9).then_some(BinKnapsack { items, rhs: b })
}

fn cover_cut(ctx: &SepContext, knap: &BinKnapsack, round: usize) -> Option<Cut> {
    let total: f64 = knap.items.iter().map(|&(_, a, _)| a).sum();
    if total <= knap.rhs + 1e-9 {
        return None;
    }
    // Complemented LP values; covers with small sum of (1 - x~*) are the
    // most violated. Greedy by (1 - x~*) / a ascending.
    let xval = |&(j, _, compl): &(usize, f64, bool)| -> f64 {
        let v = ctx.sol.x[j].clamp(0.0, 1.0);
        if compl {
            1.0 - v
        } else {
            v
        }
    };
    let mut order: Vec<usize> = (0..knap.items.len()).collect();
    order.sort_by(|&i, &k| {
        let ri = (1.0 - xval(&knap.items[i])) / knap.items[i].1;
        let rk = (1.0 - xval(&knap.items[k])) / knap.items[k].1;
        ri.partial_cmp(&rk).unwrap().then(i.cmp(&k))
    });
    let mut cover: Vec<usize> = Vec::new();
    let mut weight = 0.0;
    for &i in &order {
        cover.push(i);
        weight += knap.items[i].1;
        if weight > knap.rhs + 1e-9 {
            break;
        }
    }
    if weight <= knap.rhs + 1e-9 {
        return None;
    }
    // Minimalize: drop members with the largest (1 - x~*) while the cover
    // property survives.
    let mut drop_order = cover.clone();
    drop_order.sort_by(|&i, &k| {
        let vi = 1.0 - xval(&knap.items[i]);
        let vk = 1.0 - xval(&knap.items[k]);
        vk.partial_cmp(&vi).unwrap().then(i.cmp(&k))
    });
    for i in drop_order {
        if cover.len() <= 2 {
            break;
        }
        if weight - knap.items[i].1 > knap.rhs + 1e-9 {
            weight -= knap.items[i].1;
            cover.retain(|&c| c != i);
        }
    }

    // sum_{C} x~_j <= |C| - 1, complements substituted back.
    let mut dense = vec![0.0f64; ctx.inst.num_vars];
    let mut rhs = cover.len() as f64 - 1.0;
    for &i in &cover {
        let (j, _, compl) = knap.items[i];
        if compl {
            dense[j] -= 1.0;
            rhs -= 1.0;
        } else {
            dense[j] += 1.0;
        }
    }
    ctx.finish_cut(&dense, rhs, SeparatorId::KnapsackCover, round)
}

pub fn separate(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for row in &ctx.inst.rows {
        let oriented: Vec<(Vec<(usize, f64)>, f64)> = match row.sense {
            RowSense::Le => vec![(row.coeffs.clone(), row.rhs)],
            RowSense::Ge => vec![(
                row.coeffs.iter().map(|&(j, a)| (j, -a)).collect(),
                -row.rhs,
            )],
            RowSense::Eq => vec![
                (row.coeffs.clone(), row.rhs),
                (row.coeffs.iter().map(|&(j, a)| (j, -a)).collect(), -row.rhs),
            ],
        };
        for (coeffs, rhs) in oriented {
            if let Some(knap) = binary_knapsack(ctx, &coeffs, rhs) {
                if let Some(cut) = cover_cut(ctx, &knap, round) {
                    cuts.push(cut);
                }
            }
        }
    }
    cuts
}
