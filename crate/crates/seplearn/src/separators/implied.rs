//! Implied-bound cuts: a binary trigger variable in a row implies a tighter
//! bound on another variable in that row, by interval arithmetic over the
//! global bound box.
//!
//! For a row `sum a_k x_k <= b`, a binary y and a target t with a_t != 0,
//! fixing y and relaxing every other variable to its minimum contribution
//! gives an implied bound on x_t; if it improves on the global bound the
//! linear interpolation between the two trigger states is a valid cut
//! (e.g. `x_t + (u_t - iub) y <= u_t` for an implied upper bound at y = 1).

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;

pub fn separate(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let inst = ctx.inst;
    let x = &ctx.sol.x;
    let n = inst.num_vars;
    let mut cuts = Vec::new();
    let push = |dense: &[f64], rhs: f64, cuts: &mut Vec<Cut>| {
        if let Some(cut) = ctx.finish_cut(dense, rhs, SeparatorId::ImpliedBounds, round) {
            cuts.push(cut);
        }
    };

    for row in &inst.rows {
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
        for (coeffs, b) in oriented {
            if coeffs.len() < 2 || coeffs.len() > 50 {
                continue;
            }
            let min_contrib: Vec<f64> = coeffs
                .iter()
                .map(|&(j, a)| (a * inst.lower[j]).min(a * inst.upper[j]))
                .collect();
            let total_min: f64 = min_contrib.iter().sum();
            for (yi, &(y, a_y)) in coeffs.iter().enumerate() {
                let y_binary = inst.integrality[y]
                    && inst.lower[y].abs() < 1e-9
                    && (inst.upper[y] - 1.0).abs() < 1e-9;
                if !y_binary {
                    continue;
                }
                for (ti, &(t, a_t)) in coeffs.iter().enumerate() {
                    if ti == yi || a_t == 0.0 {
                        continue;
                    }
                    let others = total_min - min_contrib[ti] - min_contrib[yi];
                    let (lt, ut) = (inst.lower[t], inst.upper[t]);
                    for yval in [0.0, 1.0] {
                        let resid = b - a_y * yval - others;
                        if a_t > 0.0 {
                            let mut iub = resid / a_t;
                            if inst.integrality[t] {
                                iub = (iub + 1e-9).floor();
                            }
                            if iub >= ut - 1e-7 || iub < lt - 1e-9 {
                                continue;
                            }
                            let gap = ut - iub;
                            // yval = 1: x_t + gap*y <= ut; yval = 0: x_t - gap*y <= iub.
                            let (ycoef, rhs) = if yval == 1.0 { (gap, ut) } else { (-gap, iub) };
                            if x[t] + ycoef * x[y] <= rhs + 1e-6 {
                                continue;
                            }
                            let mut dense = vec![0.0; n];
                            dense[t] = 1.0;
                            dense[y] += ycoef;
                            push(&dense, rhs, &mut cuts);
                        } else {
                            let mut ilb = resid / a_t;
                            if inst.integrality[t] {
                                ilb = (ilb - 1e-9).ceil();
                            }
                            if ilb <= lt + 1e-7 || ilb > ut + 1e-9 {
                                continue;
                            }
                            let gap = ilb - lt;
                            // yval = 1: -x_t + gap*y <= -lt; yval = 0: -x_t - gap*y <= -ilb.
                            let (ycoef, rhs) = if yval == 1.0 { (gap, -lt) } else { (-gap, -ilb) };
                            if -x[t] + ycoef * x[y] <= rhs + 1e-6 {
                                continue;
                            }
                            let mut dense = vec![0.0; n];
                            dense[t] = -1.0;
                            dense[y] += ycoef;
                            push(&dense, rhs, &mut cuts);
                        }
                    }
                }
            }
        }
    }
    cuts
}
