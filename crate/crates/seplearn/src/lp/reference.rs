//! Slow dense two-phase tableau simplex, kept deliberately naive.
//!
//! This is the independent oracle the revised-simplex engine is checked
//! against, and the residual-LP solver inside the brute-force MILP oracle.
//! It shares no code with the engine: bounds are reduced to explicit rows,
//! everything is dense, and Bland's rule is used throughout so termination
//! is unconditional.

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DenseLpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

use crate::instances::RowSense;

/// Solve min c.x subject to the given rows and bounds. Lower bounds must be
/// finite; upper bounds may be +inf.
pub fn solve_dense(
    obj: &[f64],
    rows: &[(Vec<(usize, f64)>, RowSense, f64)],
    lower: &[f64],
    upper: &[f64],
) -> DenseLpOutcome {
    let n = obj.len();
    assert!(lower.iter().all(|l| l.is_finite()), "reference oracle requires finite lower bounds");

    // Shift to x_hat = x - l >= 0 and collect all rows as <= with rhs of any
    // sign, then upper-bound rows.
    let mut le_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut push_le = |coeffs: &[(usize, f64)], rhs: f64| {
        let mut dense = vec![0.0; n];
        for &(j, a) in coeffs {
            dense[j] = a;
        }
        le_rows.push((dense, rhs));
    };
    for (coeffs, sense, rhs) in rows {
        let shift: f64 = coeffs.iter().map(|&(j, a)| a * lower[j]).sum();
        let r = rhs - shift;
        match sense {
            RowSense::Le => push_le(coeffs, r),
            RowSense::Ge => {
                let neg: Vec<(usize, f64)> = coeffs.iter().map(|&(j, a)| (j, -a)).collect();
                push_le(&neg, -r);
            }
            RowSense::Eq => {
                push_le(coeffs, r);
                let neg: Vec<(usize, f64)> = coeffs.iter().map(|&(j, a)| (j, -a)).collect();
                push_le(&neg, -r);
            }
        }
    }
    for j in 0..n {
        if upper[j].is_finite() {
            push_le(&[(j, 1.0)], upper[j] - lower[j]);
        }
    }

    let m = le_rows.len();
    // Columns: n structurals, m slacks, then one artificial per negative-rhs
    // row. Rows with rhs >= 0 start with their slack basic.
    let mut needs_art: Vec<bool> = vec![false; m];
    for (i, (row, rhs)) in le_rows.iter_mut().enumerate() {
        if *rhs < 0.0 {
            for a in row.iter_mut() {
                *a = -*a;
            }
            *rhs = -*rhs;
            needs_art[i] = true; // slack coefficient becomes -1; artificial basic
        }
    }
    let n_art: usize = needs_art.iter().filter(|&&b| b).count();
    let width = n + m + n_art + 1; // + rhs column
    let mut t = vec![vec![0.0f64; width]; m + 1];
    let mut basis = vec![0usize; m];
    let mut art_col = n + m;
    for i in 0..m {
        for j in 0..n {
            t[i][j] = le_rows[i].0[j];
        }
        t[i][n + i] = if needs_art[i] { -1.0 } else { 1.0 };
        t[i][width - 1] = le_rows[i].1;
        if needs_art[i] {
            t[i][art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        } else {
            basis[i] = n + i;
        }
    }

    if n_art > 0 {
        // Phase 1: minimize the sum of artificials.
        for j in 0..width {
            t[m][j] = 0.0;
        }
        for i in 0..m {
            if basis[i] >= n + m {
                for j in 0..width {
                    t[m][j] -= t[i][j];
                }
            }
        }
        if !pivot_to_optimum(&mut t, &mut basis, n + m) {
            return DenseLpOutcome::Unbounded; // cannot happen in phase 1
        }
        if -t[m][width - 1] > 1e-7 {
            return DenseLpOutcome::Infeasible;
        }
        // Drive leftover artificials out of the basis where possible.
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| t[i][j].abs() > TOL) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
    }

    // Phase 2 objective row (artificial columns are frozen out).
    for j in 0..width {
        t[m][j] = 0.0;
    }
    for j in 0..n {
        t[m][j] = obj[j];
    }
    for i in 0..m {
        let b = basis[i];
        if b < n && obj[b].abs() > 0.0 {
            let c = obj[b];
            for j in 0..width {
                t[m][j] -= c * t[i][j];
            }
        }
    }
    if !pivot_to_optimum(&mut t, &mut basis, n + m) {
        return DenseLpOutcome::Unbounded;
    }

    let mut x_hat = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x_hat[basis[i]] = t[i][width - 1];
        }
    }
    let x: Vec<f64> = (0..n).map(|j| lower[j] + x_hat[j]).collect();
    let objective: f64 = (0..n).map(|j| obj[j] * x[j]).sum();
    DenseLpOutcome::Optimal { x, objective }
}

/// Bland-rule pivoting until no improving column among columns < ncols.
/// Returns false on an unbounded ray.
fn pivot_to_optimum(t: &mut [Vec<f64>], basis: &mut [usize], ncols: usize) -> bool {
    let m = basis.len();
    let width = t[0].len();
    let mut guard = 0usize;
    loop {
        guard += 1;
        assert!(guard < 200_000, "reference simplex exceeded pivot budget");
        // Bland: smallest-index column with negative reduced cost.
        let Some(e) = (0..ncols).find(|&j| t[m][j] < -TOL) else {
            return true;
        };
        // Bland ratio test: smallest ratio, ties by smallest basis variable.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > TOL {
                let ratio = t[i][width - 1] / t[i][e];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - TOL || (ratio < lr + TOL && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(t, basis, r, e);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, e: usize) {
    let width = t[0].len();
    let pv = t[r][e];
    for j in 0..width {
        t[r][j] /= pv;
    }
    for i in 0..t.len() {
        if i != r && t[i][e].abs() > 1e-13 {
            let f = t[i][e];
            for j in 0..width {
                t[i][j] -= f * t[r][j];
            }
        }
    }
    basis[r] = e;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binding_single_row() {
        // min -x - y s.t. x + y <= 1.5, x,y in [0,1].
        let out = solve_dense(
            &[-1.0, -1.0],
            &[(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.5)],
            &[0.0, 0.0],
            &[1.0, 1.0],
        );
        match out {
            DenseLpOutcome::Optimal { objective, .. } => assert!((objective + 1.5).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn box_conflicts_with_row() {
        // x in [2,3] but x <= 1.
        let out = solve_dense(
            &[1.0],
            &[(vec![(0, 1.0)], RowSense::Le, 1.0)],
            &[2.0],
            &[3.0],
        );
        assert_eq!(out, DenseLpOutcome::Infeasible);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y s.t. x + y = 2, x >= 0.5, boxes [0, 5].
        let out = solve_dense(
            &[1.0, 1.0],
            &[
                (vec![(0, 1.0), (1, 1.0)], RowSense::Eq, 2.0),
                (vec![(0, 1.0)], RowSense::Ge, 0.5),
            ],
            &[0.0, 0.0],
            &[5.0, 5.0],
        );
        match out {
            DenseLpOutcome::Optimal { objective, x } => {
                assert!((objective - 2.0).abs() < 1e-9);
                assert!(x[0] >= 0.5 - 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_is_detected() {
        let out = solve_dense(&[-1.0], &[], &[0.0], &[f64::INFINITY]);
        assert_eq!(out, DenseLpOutcome::Unbounded);
    }

    #[test]
    fn negative_lower_bounds_shift_correctly() {
        // min x s.t. x >= -2 (box), no rows: optimum at lb.
        let out = solve_dense(&[1.0], &[], &[-2.0], &[3.0]);
        match out {
            DenseLpOutcome::Optimal { objective, x } => {
                assert!((objective + 2.0).abs() < 1e-9);
                assert!((x[0] + 2.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }
}
