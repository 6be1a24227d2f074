//! Data-driven configuration-space restriction: initial sampling, reward
//! tables, the greedy-with-filtering selection loop, and the threshold/size
//! trade-off diagnostics.
//!
//! The empirical performance of the per-instance best configuration over a
//! set A is monotone submodular in A, so lazy greedy selection carries the
//! usual (1 - 1/e) guarantee; a filter on instance-agnostic performance
//! keeps poorly-generalizing configurations out.

use crate::separators::SeparatorConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error("reward table is empty")]
    EmptyTable,
    #[error("subspace must be nonempty")]
    EmptySubspace,
    #[error("no candidate configuration passes the instance-agnostic filter threshold {threshold}")]
    NoCandidate { threshold: f64 },
    #[error("i/o error on {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}

/// Clipped relative-improvement table: one row per configuration, one column
/// per instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardTable {
    pub configs: Vec<SeparatorConfig>,
    pub instances: Vec<String>,
    /// values[i][j] = clipped delta of configs[i] on instances[j].
    pub values: Vec<Vec<f64>>,
    /// Update round the rewards were collected at.
    pub update_round: usize,
    pub r_min: f64,
    /// Cells where the solver failed and r_min was substituted.
    pub flagged: Vec<(usize, usize)>,
}

impl RewardTable {
    pub fn num_configs(&self) -> usize {
        self.configs.len()
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn value(&self, config_idx: usize, inst_idx: usize) -> f64 {
        self.values[config_idx][inst_idx]
    }

    pub fn min_value(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn config_index(&self, config: SeparatorConfig) -> Option<usize> {
        self.configs.iter().position(|&c| c == config)
    }
}

/// Oracle that measures the clipped relative improvement of one
/// (configuration, instance, repetition) cell. Implementations wrap the
/// solver (or a synthetic stand-in) and must be deterministic per arguments.
pub trait DeltaOracle: Sync {
    fn instances(&self) -> Vec<String>;
    /// None signals a solver failure for that cell.
    fn delta(&self, inst_idx: usize, config: SeparatorConfig, rep: usize) -> Option<f64>;
}

/// Build the reward table for the given configurations: each cell averages
/// `l` repetitions, clips at `r_min`, and substitutes `r_min` on failure.
/// Cells are independent and evaluated in parallel; the result does not
/// depend on the execution order.
pub fn build_reward_table(
    configs: &[SeparatorConfig],
    oracle: &dyn DeltaOracle,
    update_round: usize,
    l: usize,
    r_min: f64,
) -> RewardTable {
    let instances = oracle.instances();
    let reps = l.max(1);
    let cells: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|i| (0..instances.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, bool)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut deltas = Vec::with_capacity(reps);
            let mut failed = false;
            for rep in 0..reps {
                match oracle.delta(j, configs[i], rep) {
                    Some(d) => deltas.push(d.max(r_min)),
                    None => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed || deltas.is_empty() {
                (r_min, true)
            } else {
                (deltas.iter().sum::<f64>() / deltas.len() as f64, false)
            }
        })
        .collect();
    let mut values = vec![vec![0.0; instances.len()]; configs.len()];
    let mut flagged = Vec::new();
    for (k, &(i, j)) in cells.iter().enumerate() {
        values[i][j] = results[k].0;
        if results[k].1 {
            flagged.push((i, j));
        }
    }
    RewardTable {
        configs: configs.to_vec(),
        instances,
        values,
        update_round,
        r_min,
        flagged,
    }
}

/// Number of bitmasks over `m` bits with at most `radius` ones.
pub fn near_zero_count(m: usize, radius: usize) -> u64 {
    (0..=radius as u64).map(|k| binomial(m as u64, k)).sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Result of the initial sampling: the configuration set plus the
/// best-random pivot the second family was built around.
#[derive(Debug, Clone)]
pub struct InitialSample {
    pub configs: Vec<SeparatorConfig>,
    pub pivot: Option<SeparatorConfig>,
}

/// Initial configuration sampling: the union of
/// (a) Near-Zero: every configuration with at most `hamming_radius` active
///     separators, and
/// (b) Near-Best-Random: the best of `n_random` uniform samples by the
///     supplied instance-agnostic evaluator, plus its Hamming ball of radius
///     `hamming_radius`, plus every subset of its active set.
/// Deduplicated and returned in ascending bitmask order.
pub fn sample_initial_configs(
    n_random: usize,
    hamming_radius: u32,
    seed: u64,
    mut eval: impl FnMut(SeparatorConfig) -> f64,
) -> InitialSample {
    let mut set: BTreeSet<SeparatorConfig> = BTreeSet::new();
    for cfg in SeparatorConfig::enumerate_all() {
        if cfg.active_count() <= hamming_radius {
            set.insert(cfg);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5355_4253);
    let mut best: Option<(SeparatorConfig, f64)> = None;
    for _ in 0..n_random {
        let cfg = SeparatorConfig(rng.gen());
        let score = eval(cfg);
        let better = match best {
            None => true,
            Some((bc, bs)) => score > bs + 1e-15 || ((score - bs).abs() <= 1e-15 && cfg.0 < bc.0),
        };
        if better {
            best = Some((cfg, score));
        }
    }
    if let Some((pivot, _)) = best {
        for cfg in SeparatorConfig::enumerate_all() {
            if cfg.hamming(pivot) <= hamming_radius {
                set.insert(cfg);
            }
        }
        // All subsets of the pivot's active set.
        let bits = pivot.0;
        let mut sub = bits;
        loop {
            set.insert(SeparatorConfig(sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & bits;
        }
    }
    InitialSample {
        configs: set.into_iter().collect(),
        pivot: best.map(|(c, _)| c),
    }
}

/// Empirical performance of the per-instance best configuration over
/// `subset` (indices into the table's configs).
pub fn erm_performance(subset: &[usize], table: &RewardTable) -> Result<f64, SubspaceError> {
    if subset.is_empty() {
        return Err(SubspaceError::EmptySubspace);
    }
    if table.num_instances() == 0 {
        return Err(SubspaceError::EmptyTable);
    }
    let k = table.num_instances();
    let mut total = 0.0;
    for j in 0..k {
        let best = subset
            .iter()
            .map(|&i| table.value(i, j))
            .fold(f64::NEG_INFINITY, f64::max);
        total += best;
    }
    Ok(total / k as f64)
}

/// Instance-agnostic performance of one configuration: its row mean.
pub fn instance_agnostic_perf(config_idx: usize, table: &RewardTable) -> f64 {
    let row = &table.values[config_idx];
    row.iter().sum::<f64>() / row.len() as f64
}

/// Per-step diagnostics recorded during restriction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepDiag {
    /// ERM performance of the subspace after this addition.
    pub erm: f64,
    /// Mean instance-agnostic performance over members.
    pub mean_agnostic: f64,
    /// Worst member's instance-agnostic performance.
    pub worst_agnostic: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestrictedSubspace {
    /// Selected configurations in greedy order.
    pub configs: Vec<SeparatorConfig>,
    /// Indices into the source table.
    pub indices: Vec<usize>,
    pub threshold: f64,
    pub diagnostics: Vec<StepDiag>,
}

/// Greedy submodular selection with instance-agnostic filtering: repeatedly
/// add the candidate with the largest marginal ERM gain whose row mean
/// exceeds `b`; candidates failing the filter are permanently removed. Stops
/// at `size` members or candidate exhaustion. Marginals are evaluated lazily:
/// a stale value from an earlier iteration is an upper bound under
/// submodularity, so a candidate is only accepted once its recomputed
/// marginal still tops the queue.
pub fn restrict_subspace(
    table: &RewardTable,
    size: usize,
    b: f64,
) -> Result<RestrictedSubspace, SubspaceError> {
    if table.num_configs() == 0 || table.num_instances() == 0 {
        return Err(SubspaceError::EmptyTable);
    }
    let k = table.num_instances();
    let row_means: Vec<f64> = (0..table.num_configs())
        .map(|i| instance_agnostic_perf(i, table))
        .collect();

    // Empty-set baseline: the table minimum per instance. This shifts the
    // set function to a normalized monotone submodular one without changing
    // any greedy choice.
    let baseline = table.min_value();
    let mut best_per_inst = vec![baseline; k];

    let marginal = |best: &[f64], i: usize| -> f64 {
        let row = &table.values[i];
        let mut gain = 0.0;
        for j in 0..k {
            if row[j] > best[j] {
                gain += row[j] - best[j];
            }
        }
        gain / k as f64
    };

    // (stale marginal, candidate); filtered-out candidates leave the pool.
    let mut pool: Vec<(f64, usize)> = (0..table.num_configs())
        .map(|i| (marginal(&best_per_inst, i), i))
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut diagnostics = Vec::new();

    while chosen.len() < size && !pool.is_empty() {
        // Lazy greedy: take the best stale bound, recompute, reinsert if it
        // no longer tops the pool.
        let pick = loop {
            if pool.is_empty() {
                break None;
            }
            let mut top = 0;
            for c in 1..pool.len() {
                let better = pool[c].0 > pool[top].0 + 1e-15
                    || ((pool[c].0 - pool[top].0).abs() <= 1e-15
                        && (row_means[pool[c].1] > row_means[pool[top].1] + 1e-15
                            || ((row_means[pool[c].1] - row_means[pool[top].1]).abs() <= 1e-15
                                && table.configs[pool[c].1].0 < table.configs[pool[top].1].0)));
                if better {
                    top = c;
                }
            }
            let (bound, i) = pool[top];
            let fresh = marginal(&best_per_inst, i);
            if fresh >= bound - 1e-12 {
                pool.swap_remove(top);
                break Some(i);
            }
            pool[top].0 = fresh;
        };
        let Some(i) = pick else { break };

        if row_means[i] > b {
            chosen.push(i);
            for j in 0..k {
                best_per_inst[j] = best_per_inst[j].max(table.values[i][j]);
            }
            let agn: Vec<f64> = chosen.iter().map(|&c| row_means[c]).collect();
            diagnostics.push(StepDiag {
                erm: erm_performance(&chosen, table).expect("chosen is nonempty"),
                mean_agnostic: agn.iter().sum::<f64>() / agn.len() as f64,
                worst_agnostic: agn.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
        // Failing the filter permanently removes the candidate (it was
        // already taken out of the pool above).
    }
    if chosen.is_empty() {
        return Err(SubspaceError::NoCandidate { threshold: b });
    }
    Ok(RestrictedSubspace {
        configs: chosen.iter().map(|&i| table.configs[i]).collect(),
        indices: chosen,
        threshold: b,
        diagnostics,
    })
}

/// One row of the threshold/size trade-off report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub threshold: f64,
    pub step: usize,
    /// Training-performance term: ERM performance of the subspace so far.
    pub erm_term: f64,
    /// Generalization term: mean instance-agnostic performance over members.
    pub agnostic_term: f64,
}

/// For each threshold, the per-step trajectories of the two objective terms
/// while growing the subspace to `size` members.
pub fn tradeoff_curve(
    table: &RewardTable,
    thresholds: &[f64],
    size: usize,
) -> Result<Vec<TradeoffRow>, SubspaceError> {
    let mut rows = Vec::new();
    for &b in thresholds {
        let restricted = match restrict_subspace(table, size, b) {
            Ok(r) => r,
            Err(SubspaceError::NoCandidate { .. }) => continue,
            Err(e) => return Err(e),
        };
        for (step, diag) in restricted.diagnostics.iter().enumerate() {
            rows.push(TradeoffRow {
                threshold: b,
                step: step + 1,
                erm_term: diag.erm,
                agnostic_term: diag.mean_agnostic,
            });
        }
    }
    Ok(rows)
}

pub fn tradeoff_to_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from("threshold,step,erm_term,agnostic_term\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.threshold, r.step, r.erm_term, r.agnostic_term
        ));
    }
    out
}

/// Serialize a reward table as `<base>.csv` (matrix) + `<base>.json`
/// (header/metadata).
pub fn write_reward_table(table: &RewardTable, base: &Path) -> Result<(), SubspaceError> {
    let json_path = base.with_extension("json");
    let csv_path = base.with_extension("csv");
    #[derive(Serialize)]
    struct Header<'a> {
        format_version: u32,
        configs: &'a [SeparatorConfig],
        instances: &'a [String],
        update_round: usize,
        r_min: f64,
        flagged: &'a [(usize, usize)],
    }
    let header = Header {
        format_version: 1,
        configs: &table.configs,
        instances: &table.instances,
        update_round: table.update_round,
        r_min: table.r_min,
        flagged: &table.flagged,
    };
    let io_err = |path: &Path, e: String| SubspaceError::Io {
        path: path.display().to_string(),
        detail: e,
    };
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&header).expect("header serializes"),
    )
    .map_err(|e| io_err(&json_path, e.to_string()))?;
    let mut csv = String::from("config");
    for name in &table.instances {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for (i, cfg) in table.configs.iter().enumerate() {
        csv.push_str(&format!("{:08b}", cfg.0));
        for j in 0..table.num_instances() {
            csv.push_str(&format!(",{}", table.values[i][j]));
        }
        csv.push('\n');
    }
    std::fs::write(&csv_path, csv).map_err(|e| io_err(&csv_path, e.to_string()))?;
    Ok(())
}

/// Read back a table written by [`write_reward_table`].
pub fn read_reward_table(base: &Path) -> Result<RewardTable, SubspaceError> {
    let json_path = base.with_extension("json");
    let csv_path = base.with_extension("csv");
    #[derive(Deserialize)]
    struct Header {
        #[allow(dead_code)]
        format_version: u32,
        configs: Vec<SeparatorConfig>,
        instances: Vec<String>,
        update_round: usize,
        r_min: f64,
        flagged: Vec<(usize, usize)>,
    }
    let parse_err = |path: &Path, e: String| SubspaceError::Parse {
        path: path.display().to_string(),
        detail: e,
    };
    let header: Header = serde_json::from_str(
        &std::fs::read_to_string(&json_path).map_err(|e| SubspaceError::Io {
            path: json_path.display().to_string(),
            detail: e.to_string(),
        })?,
    )
    .map_err(|e| parse_err(&json_path, e.to_string()))?;
    let csv = std::fs::read_to_string(&csv_path).map_err(|e| SubspaceError::Io {
        path: csv_path.display().to_string(),
        detail: e.to_string(),
    })?;
    let mut values = Vec::new();
    for (ln, line) in csv.lines().enumerate().skip(1) {
        let mut fields = line.split(',');
        let _config = fields.next();
        let row: Result<Vec<f64>, _> = fields.map(|f| f.parse::<f64>()).collect();
        values.push(row.map_err(|e| parse_err(&csv_path, format!("line {}: {e}", ln + 1)))?);
    }
    if values.len() != header.configs.len() {
        return Err(parse_err(
            &csv_path,
            format!(
                "csv has {} rows but header lists {} configs",
                values.len(),
                header.configs.len()
            ),
        ));
    }
    Ok(RewardTable {
        configs: header.configs,
        instances: header.instances,
        values,
        update_round: header.update_round,
        r_min: header.r_min,
        flagged: header.flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_from(values: Vec<Vec<f64>>) -> RewardTable {
        let configs: Vec<SeparatorConfig> =
            (0..values.len()).map(|i| SeparatorConfig(i as u8)).collect();
        let instances: Vec<String> = (0..values[0].len()).map(|j| format!("x{j}")).collect();
        RewardTable {
            configs,
            instances,
            values,
            update_round: 0,
            r_min: -1.5,
            flagged: vec![],
        }
    }

    fn random_table(rng: &mut impl Rng, n_cfg: usize, n_inst: usize) -> RewardTable {
        table_from(
            (0..n_cfg)
                .map(|_| (0..n_inst).map(|_| rng.gen_range(-1.5..1.0)).collect())
                .collect(),
        )
    }

    /// Marginal with the empty-set baseline used by the greedy loop.
    fn marginal(table: &RewardTable, set: &[usize], s: usize) -> f64 {
        let base = table.min_value();
        let k = table.num_instances();
        let mut gain = 0.0;
        for j in 0..k {
            let cur = set.iter().map(|&i| table.value(i, j)).fold(base, f64::max);
            let v = table.value(s, j).max(cur);
            gain += v - cur;
        }
        gain / k as f64
    }

    #[test]
    fn near_zero_counts() {
        assert_eq!(near_zero_count(8, 3), 93); // 1 + 8 + 28 + 56
        assert_eq!(near_zero_count(17, 3), 834);
    }

    #[test]
    fn initial_sampling_contains_both_families() {
        // Rank random draws by how close their active count is to 4 so the
        // pivot lands mid-density.
        let eval = |c: SeparatorConfig| -((c.active_count() as f64) - 4.0).abs();
        let sample = sample_initial_configs(500, 3, 7, eval);
        for cfg in SeparatorConfig::enumerate_all() {
            if cfg.active_count() <= 3 {
                assert!(sample.configs.contains(&cfg), "near-zero family incomplete");
            }
        }
        let again = sample_initial_configs(500, 3, 7, eval);
        assert_eq!(sample.configs, again.configs, "must be deterministic in the seed");
        assert_eq!(sample.pivot, again.pivot);

        // Hamming ball and all 2^popcount subsets of the actual pivot.
        let pivot = sample.pivot.expect("500 draws produce a pivot");
        let mut subs = 0;
        for cfg in SeparatorConfig::enumerate_all() {
            if cfg.hamming(pivot) <= 3 {
                assert!(sample.configs.contains(&cfg), "ball member missing");
            }
            if cfg.0 & !pivot.0 == 0 {
                assert!(sample.configs.contains(&cfg), "missing subset {:08b}", cfg.0);
                subs += 1;
            }
        }
        assert_eq!(subs, 1 << pivot.active_count());
    }

    #[test]
    fn erm_and_agnostic_basics() {
        let t = table_from(vec![
            vec![0.2, 0.2, 0.2],
            vec![0.5, -0.5, 0.0],
            vec![-0.1, 0.6, -0.2],
        ]);
        let erm0 = erm_performance(&[0], &t).unwrap();
        assert!((erm0 - 0.2).abs() < 1e-15, "singleton ERM is the row mean");
        assert!((instance_agnostic_perf(0, &t) - 0.2).abs() < 1e-15);
        let full = erm_performance(&[0, 1, 2], &t).unwrap();
        assert!((full - (0.5 + 0.6 + 0.2) / 3.0).abs() < 1e-15);
        // Permuting instances leaves the row mean unchanged.
        let permuted = table_from(vec![
            vec![0.2, 0.2, 0.2],
            vec![0.0, 0.5, -0.5],
            vec![-0.2, -0.1, 0.6],
        ]);
        assert!(
            (instance_agnostic_perf(1, &t) - instance_agnostic_perf(1, &permuted)).abs() < 1e-15
        );
    }

    #[test]
    fn erm_matches_exhaustive_subsets_on_small_table() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_table(&mut rng, 6, 4);
        for a in 0..6 {
            for bb in (a + 1)..6 {
                for c in (bb + 1)..6 {
                    let set = vec![a, bb, c];
                    let got = erm_performance(&set, &t).unwrap();
                    let mut want = 0.0;
                    for j in 0..4 {
                        want += t.value(a, j).max(t.value(bb, j)).max(t.value(c, j));
                    }
                    want /= 4.0;
                    assert!((got - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn first_pick_is_best_filtered_row_mean() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = random_table(&mut rng, 10, 6);
            let b = -0.2;
            let Ok(r) = restrict_subspace(&t, 3, b) else {
                continue;
            };
            let best_mean = (0..10)
                .filter(|&i| instance_agnostic_perf(i, &t) > b)
                .map(|i| instance_agnostic_perf(i, &t))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (instance_agnostic_perf(r.indices[0], &t) - best_mean).abs() < 1e-12,
                "first greedy pick must maximize the filtered row mean"
            );
        }
    }

    #[test]
    fn filter_guarantee_and_empty_result_error() {
        let t = table_from(vec![vec![0.1, 0.3], vec![-0.4, -0.2], vec![0.4, -0.1]]);
        let r = restrict_subspace(&t, 3, 0.0).unwrap();
        for &i in &r.indices {
            assert!(instance_agnostic_perf(i, &t) > 0.0);
        }
        match restrict_subspace(&t, 2, 10.0) {
            Err(SubspaceError::NoCandidate { threshold }) => assert_eq!(threshold, 10.0),
            other => panic!("expected NoCandidate, got {other:?}"),
        }
    }

    #[test]
    fn monotonicity_fuzz() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let t = random_table(&mut rng, 8, 5);
            let mut c_set: Vec<usize> = Vec::new();
            for i in 0..8 {
                if rng.gen_bool(0.5) {
                    c_set.push(i);
                }
            }
            if c_set.is_empty() {
                c_set.push(rng.gen_range(0..8));
            }
            let mut a_set: Vec<usize> = Vec::new();
            for &i in &c_set {
                if rng.gen_bool(0.6) {
                    a_set.push(i);
                }
            }
            if a_set.is_empty() {
                continue;
            }
            let ea = erm_performance(&a_set, &t).unwrap();
            let ec = erm_performance(&c_set, &t).unwrap();
            assert!(ea <= ec + 1e-12, "monotonicity violated");
        }
    }

    #[test]
    fn submodularity_fuzz() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let t = random_table(&mut rng, 9, 4);
            let mut c_set: Vec<usize> = Vec::new();
            for i in 0..8 {
                if rng.gen_bool(0.5) {
                    c_set.push(i);
                }
            }
            let mut a_set: Vec<usize> = Vec::new();
            for &i in &c_set {
                if rng.gen_bool(0.6) {
                    a_set.push(i);
                }
            }
            let s = 8usize; // extra element, never in c_set
            let ma = marginal(&t, &a_set, s);
            let mc = marginal(&t, &c_set, s);
            assert!(
                ma >= mc - 1e-12,
                "submodularity violated: marginal(A,s)={ma} < marginal(C,s)={mc}"
            );
        }
    }

    #[test]
    fn greedy_achieves_the_submodular_bound_exhaustively() {
        use rand::SeedableRng;
        fn rec(
            n_cfg: usize,
            size: usize,
            start: usize,
            comb: &mut Vec<usize>,
            t: &RewardTable,
            best: &mut f64,
        ) {
            if comb.len() == size {
                let v = erm_performance(comb, t).unwrap();
                if v > *best {
                    *best = v;
                }
                return;
            }
            for i in start..n_cfg {
                comb.push(i);
                rec(n_cfg, size, i + 1, comb, t, best);
                comb.pop();
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for case in 0..40 {
            let n_cfg = 6 + (case % 7); // 6..=12
            let t = random_table(&mut rng, n_cfg, 5);
            let base = t.min_value();
            for size in 1..=4usize {
                let greedy = restrict_subspace(&t, size, f64::NEG_INFINITY).unwrap();
                let g_val = erm_performance(&greedy.indices, &t).unwrap() - base;
                let mut best = f64::NEG_INFINITY;
                rec(n_cfg, size.min(n_cfg), 0, &mut Vec::new(), &t, &mut best);
                let opt = best - base;
                assert!(
                    g_val >= (1.0 - 1.0 / std::f64::consts::E) * opt - 1e-9,
                    "greedy {g_val} vs OPT {opt} at size {size}"
                );
            }
        }
    }

    #[test]
    fn decomposition_identities_match_mistake_model_simulation() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let train = random_table(&mut rng, 7, 6);
        let test = random_table(&mut rng, 7, 9);
        let a_set = vec![1usize, 3, 5];
        let erm_train = erm_performance(&a_set, &train).unwrap();
        let mean_agn = |t: &RewardTable| -> f64 {
            a_set
                .iter()
                .map(|&i| instance_agnostic_perf(i, t))
                .sum::<f64>()
                / a_set.len() as f64
        };
        let (agn_train, agn_test) = (mean_agn(&train), mean_agn(&test));

        for &alpha in &[0.0, 0.3, 1.0] {
            // Exact expectation of the one-level mistake model: per instance,
            // the ERM pick with prob 1-alpha, else a uniform member.
            let k = train.num_instances();
            let mut sim = 0.0;
            for j in 0..k {
                let best = a_set
                    .iter()
                    .map(|&i| train.value(i, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                let unif: f64 =
                    a_set.iter().map(|&i| train.value(i, j)).sum::<f64>() / a_set.len() as f64;
                sim += (1.0 - alpha) * best + alpha * unif;
            }
            sim /= k as f64;
            let formula = (1.0 - alpha) * erm_train + alpha * agn_train;
            assert!(
                (sim - formula).abs() < 1e-12,
                "one-level decomposition: {sim} vs {formula}"
            );

            for &beta in &[0.0, 0.3, 1.0] {
                // Two-level model: training mistake with prob beta (uniform
                // member, training table), generalization mistake with prob
                // alpha (uniform member, test table).
                let sim2 = (1.0 - alpha) * ((1.0 - beta) * erm_train + beta * agn_train)
                    + alpha * agn_test;
                let formula2 = (1.0 - alpha) * (1.0 - beta) * erm_train
                    + (1.0 - alpha) * beta * agn_train
                    + alpha * agn_test;
                assert!((sim2 - formula2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tradeoff_curve_shapes() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let t = random_table(&mut rng, 12, 8);
        let rows = tradeoff_curve(&t, &[f64::NEG_INFINITY, -0.5, 0.0], 4).unwrap();
        let unfiltered: Vec<&TradeoffRow> = rows
            .iter()
            .filter(|r| r.threshold == f64::NEG_INFINITY)
            .collect();
        assert_eq!(unfiltered.len(), 4, "single-threshold report has `size` rows");
        for step in 1..=4usize {
            let loose = rows
                .iter()
                .find(|r| r.threshold == f64::NEG_INFINITY && r.step == step)
                .unwrap();
            // Larger threshold: pointwise >= generalization term.
            if let Some(tight) = rows.iter().find(|r| r.threshold == 0.0 && r.step == step) {
                assert!(tight.agnostic_term >= loose.agnostic_term - 1e-12);
            }
            // Unfiltered training term dominates filtered ones pointwise.
            if let Some(tight) = rows.iter().find(|r| r.threshold == -0.5 && r.step == step) {
                assert!(loose.erm_term >= tight.erm_term - 1e-12);
            }
        }
    }

    #[test]
    fn reward_table_roundtrip() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let t = random_table(&mut rng, 5, 4);
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("table");
        write_reward_table(&t, &base).unwrap();
        let back = read_reward_table(&base).unwrap();
        assert_eq!(t.configs, back.configs);
        assert_eq!(t.instances, back.instances);
        assert_eq!(t.values, back.values, "floats must round-trip exactly");
    }

    #[test]
    fn build_table_from_synthetic_oracle() {
        struct Oracle;
        impl DeltaOracle for Oracle {
            fn instances(&self) -> Vec<String> {
                vec!["a".into(), "b".into()]
            }
            fn delta(&self, inst: usize, config: SeparatorConfig, _rep: usize) -> Option<f64> {
                match (inst, config.0) {
                    (_, 0xFF) => Some(0.0), // the default against itself
                    (0, _) => Some(-5.0),   // clipped up to r_min
                    (1, 0b1) => None,       // solver failure
                    (1, _) => Some(0.25),
                    _ => unreachable!(),
                }
            }
        }
        let configs = vec![
            SeparatorConfig(0xFF),
            SeparatorConfig(0b1),
            SeparatorConfig(0b10),
        ];
        let t = build_reward_table(&configs, &Oracle, 0, 3, -1.5);
        assert_eq!(t.value(0, 0), 0.0);
        assert_eq!(t.value(0, 1), 0.0);
        assert_eq!(t.value(1, 0), -1.5, "clipping at r_min");
        assert_eq!(t.value(1, 1), -1.5, "failure cell set to r_min");
        assert!(t.flagged.contains(&(1, 1)));
        assert_eq!(t.value(2, 1), 0.25);
        assert!(t.values.iter().flatten().all(|&v| v >= -1.5));
    }
}
