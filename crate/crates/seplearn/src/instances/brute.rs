//! Brute-force optimum oracle: enumerate all integer combinations within the
//! bound box and, when continuous variables remain, solve the residual LP
//! with the slow dense reference simplex. Deliberately independent of the
//! revised-simplex engine it is used to check.

use super::{Assignment, InstanceError, MilpInstance};
use crate::lp::reference::{solve_dense, DenseLpOutcome};
use crate::instances::RowSense;

pub const DEFAULT_VAR_LIMIT: usize = 16;

/// Hard cap on the number of enumerated integer points.
const MAX_POINTS: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub enum BruteForceOutcome {
    Optimal(Assignment),
    Infeasible,
}

pub fn brute_force_opt(
    inst: &MilpInstance,
    var_limit: usize,
) -> Result<BruteForceOutcome, InstanceError> {
    inst.validate()?;
    let int_vars: Vec<usize> = (0..inst.num_vars).filter(|&j| inst.integrality[j]).collect();
    if int_vars.len() > var_limit {
        return Err(InstanceError::TooLarge(format!(
            "{} integer variables exceed the enumeration limit {var_limit}",
            int_vars.len()
        )));
    }
    let mut points: u128 = 1;
    for &j in &int_vars {
        let (lb, ub) = (inst.lower[j], inst.upper[j]);
        if !lb.is_finite() || !ub.is_finite() {
            return Err(InstanceError::TooLarge(format!(
                "integer variable {j} has an infinite bound; cannot enumerate"
            )));
        }
        let range = (ub.floor() - lb.ceil()) as i64;
        if range < 0 {
            // Empty integer range inside a nonempty real box.
            return Ok(BruteForceOutcome::Infeasible);
        }
        points = points.saturating_mul(range as u128 + 1);
        if points > MAX_POINTS {
            return Err(InstanceError::TooLarge(format!(
                "integer grid exceeds {MAX_POINTS} points"
            )));
        }
    }

    let cont_vars: Vec<usize> = (0..inst.num_vars).filter(|&j| !inst.integrality[j]).collect();

    let mut best: Option<Assignment> = None;
    let mut values = vec![0.0f64; inst.num_vars];
    for &j in &cont_vars {
        values[j] = inst.lower[j].max(0.0).min(inst.upper[j]);
    }
    enumerate(inst, &int_vars, &cont_vars, 0, &mut values, &mut best);
    Ok(match best {
        Some(a) => BruteForceOutcome::Optimal(a),
        None => BruteForceOutcome::Infeasible,
    })
}

fn enumerate(
    inst: &MilpInstance,
    int_vars: &[usize],
    cont_vars: &[usize],
    depth: usize,
    values: &mut Vec<f64>,
    best: &mut Option<Assignment>,
) {
    if depth == int_vars.len() {
        evaluate_point(inst, cont_vars, values, best);
        return;
    }
    let j = int_vars[depth];
    let lo = inst.lower[j].ceil() as i64;
    let hi = inst.upper[j].floor() as i64;
    for v in lo..=hi {
        values[j] = v as f64;
        enumerate(inst, int_vars, cont_vars, depth + 1, values, best);
    }
}

fn evaluate_point(
    inst: &MilpInstance,
    cont_vars: &[usize],
    values: &mut Vec<f64>,
    best: &mut Option<Assignment>,
) {
    if cont_vars.is_empty() {
        if !inst.is_feasible(values, 1e-9) {
            return;
        }
        let obj = inst.objective_value(values);
        if best.as_ref().map_or(true, |b| obj < b.objective - 1e-12) {
            *best = Some(Assignment {
                values: values.clone(),
                objective: obj,
            });
        }
        return;
    }

    // Residual LP over the continuous variables with integers fixed.
    let nc = cont_vars.len();
    let obj: Vec<f64> = cont_vars.iter().map(|&j| inst.objective[j]).collect();
    let lower: Vec<f64> = cont_vars.iter().map(|&j| inst.lower[j]).collect();
    let upper: Vec<f64> = cont_vars.iter().map(|&j| inst.upper[j]).collect();
    let mut rows: Vec<(Vec<(usize, f64)>, RowSense, f64)> = Vec::with_capacity(inst.rows.len());
    let col_of = |j: usize| cont_vars.iter().position(|&c| c == j);
    for row in &inst.rows {
        let mut coeffs = Vec::new();
        let mut fixed = 0.0;
        for &(j, a) in &row.coeffs {
            match col_of(j) {
                Some(c) => coeffs.push((c, a)),
                None => fixed += a * values[j],
            }
        }
        let rhs = row.rhs - fixed;
        if coeffs.is_empty() {
            let ok = match row.sense {
                RowSense::Le => 0.0 <= rhs + 1e-9,
                RowSense::Ge => 0.0 >= rhs - 1e-9,
                RowSense::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return;
            }
        } else {
            rows.push((coeffs, row.sense, rhs));
        }
    }
    let fixed_obj: f64 = (0..inst.num_vars)
        .filter(|&j| inst.integrality[j])
        .map(|j| inst.objective[j] * values[j])
        .sum();
    match solve_dense(&obj, &rows, &lower, &upper) {
        DenseLpOutcome::Optimal { x, objective } => {
            let total = fixed_obj + objective;
            if best.as_ref().map_or(true, |b| total < b.objective - 1e-12) {
                let mut full = values.clone();
                for c in 0..nc {
                    full[cont_vars[c]] = x[c];
                }
                *best = Some(Assignment {
                    values: full,
                    objective: total,
                });
            }
        }
        DenseLpOutcome::Infeasible => {}
        DenseLpOutcome::Unbounded => {
            // Finite boxes rule this out; treat as infeasible defensively.
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{InstanceClass, SparseRow, INSTANCE_FORMAT_VERSION};
    use std::collections::BTreeMap;

    fn knapsack() -> MilpInstance {
        // max 3x + 2y s.t. 2x + y <= 2, binary -> min -3x - 2y.
        MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: "knap".into(),
            num_vars: 2,
            objective: vec![-3.0, -2.0],
            rows: vec![SparseRow::new(vec![(0, 2.0), (1, 1.0)], RowSense::Le, 2.0)],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            integrality: vec![true, true],
            class_tag: InstanceClass::Custom,
            gen_params: BTreeMap::new(),
        }
    }

    #[test]
    fn knapsack_optimum() {
        match brute_force_opt(&knapsack(), 16).unwrap() {
            BruteForceOutcome::Optimal(a) => {
                assert_eq!(a.values, vec![1.0, 0.0]);
                assert_eq!(a.objective, -3.0);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn zero_objective_gives_zero() {
        let mut inst = knapsack();
        inst.objective = vec![0.0, 0.0];
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => assert_eq!(a.objective, 0.0),
            _ => panic!(),
        }
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut inst = knapsack();
        inst.rows = vec![
            SparseRow::new(vec![(0, 1.0)], RowSense::Ge, 1.0),
            SparseRow::new(vec![(0, 1.0)], RowSense::Le, 0.0),
        ];
        assert_eq!(
            brute_force_opt(&inst, 16).unwrap(),
            BruteForceOutcome::Infeasible
        );
    }

    #[test]
    fn too_many_integers_is_refused() {
        let mut inst = knapsack();
        inst.num_vars = 20;
        inst.objective = vec![0.0; 20];
        inst.rows = vec![];
        inst.lower = vec![0.0; 20];
        inst.upper = vec![1.0; 20];
        inst.integrality = vec![true; 20];
        match brute_force_opt(&inst, 16) {
            Err(InstanceError::TooLarge(_)) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn mixed_integer_residual_lp() {
        // min -x - 2y, x binary, y in [0, 1.5] continuous, x + y <= 2.
        let inst = MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: "mixed".into(),
            num_vars: 2,
            objective: vec![-1.0, -2.0],
            rows: vec![SparseRow::new(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 2.0)],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.5],
            integrality: vec![true, false],
            class_tag: InstanceClass::Custom,
            gen_params: BTreeMap::new(),
        };
        // Both x=1,y=1 and x=0,y=1.5 attain -3; only the value is pinned.
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => {
                assert!((a.objective + 3.0).abs() < 1e-7);
                assert!(inst.is_feasible(&a.values, 1e-7));
            }
            _ => panic!(),
        }
    }
}
