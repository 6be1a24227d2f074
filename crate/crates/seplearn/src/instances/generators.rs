//! Synthetic instance generators for the five benchmark classes.
//!
//! Every generator is deterministic in its seed, emits a minimization-form
//! instance with finite bound boxes, and post-checks that a constructive
//! feasible point exists. Coefficient distributions not fixed by the
//! benchmark descriptions are this crate's own choices and are recorded in
//! each instance's `gen_params` metadata.

use super::{InstanceClass, MilpInstance, RowSense, SparseRow, INSTANCE_FORMAT_VERSION};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn rng_for(class: InstanceClass, seed: u64) -> ChaCha8Rng {
    // Distinct stream per class so shared seeds do not correlate datasets.
    let salt: u64 = match class {
        InstanceClass::Packing => 0x5041434b,
        InstanceClass::BinPacking => 0x42494e50,
        InstanceClass::MaxCut => 0x4d415843,
        InstanceClass::CombAuction => 0x434f4d42,
        InstanceClass::IndepSet => 0x494e4453,
        InstanceClass::Custom => 0x43555354,
    };
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15) ^ salt)
}

fn assert_well_formed(inst: &MilpInstance, feasible_point: &[f64]) {
    debug_assert!(inst.validate().is_ok());
    assert!(inst.has_finite_bounds(), "generator produced unbounded box");
    assert!(
        inst.is_feasible(feasible_point, 1e-9),
        "generator post-check failed: constructive point infeasible for {}",
        inst.name
    );
}

/// Resource-packing instances: maximize c'x subject to Ax <= b over bounded
/// nonnegative integers, emitted in min-form with the objective negated.
#[derive(Debug, Clone)]
pub struct PackingParams {
    pub n: usize,
    pub m: usize,
    /// Row density range; one density is drawn per instance.
    pub density: (f64, f64),
    /// Row tightness range for rhs = tightness * row coefficient sum.
    pub tightness: (f64, f64),
    /// Constraint coefficients drawn from U{1..=coeff_max}.
    pub coeff_max: u64,
    /// Objective coefficients drawn from U{1..=cost_max}.
    pub cost_max: u64,
    /// Cap on derived variable upper bounds.
    pub ub_cap: f64,
}

impl Default for PackingParams {
    fn default() -> Self {
        PackingParams {
            n: 60,
            m: 60,
            density: (0.25, 0.6),
            tightness: (0.25, 0.7),
            coeff_max: 8,
            cost_max: 10,
            ub_cap: 10.0,
        }
    }
}

impl PackingParams {
    pub fn generate(&self, seed: u64) -> MilpInstance {
        build_packing(self, seed, false)
    }
}

/// Binary variant of the packing class: identical construction with all
/// variables restricted to {0, 1}.
#[derive(Debug, Clone)]
pub struct BinPackingParams {
    pub n: usize,
    pub m: usize,
    pub density: (f64, f64),
    pub tightness: (f64, f64),
    pub coeff_max: u64,
    pub cost_max: u64,
}

impl Default for BinPackingParams {
    fn default() -> Self {
        BinPackingParams {
            n: 66,
            m: 132,
            density: (0.2, 0.5),
            tightness: (0.2, 0.55),
            coeff_max: 8,
            cost_max: 10,
        }
    }
}

impl BinPackingParams {
    pub fn generate(&self, seed: u64) -> MilpInstance {
        let p = PackingParams {
            n: self.n,
            m: self.m,
            density: self.density,
            tightness: self.tightness,
            coeff_max: self.coeff_max,
            cost_max: self.cost_max,
            ub_cap: 1.0,
        };
        build_packing(&p, seed, true)
    }
}

fn build_packing(p: &PackingParams, seed: u64, binary: bool) -> MilpInstance {
    let class = if binary {
        InstanceClass::BinPacking
    } else {
        InstanceClass::Packing
    };
    let mut rng = rng_for(class, seed);
    let n = p.n.max(1);
    let m = p.m.max(1);
    let density = rng.gen_range(p.density.0..=p.density.1);
    let tightness = rng.gen_range(p.tightness.0..=p.tightness.1);

    let mut a = vec![vec![0u64; n]; m];
    for row in a.iter_mut() {
        for cell in row.iter_mut() {
            if rng.gen_bool(density) {
                *cell = rng.gen_range(1..=p.coeff_max);
            }
        }
    }
    // Every column must hit at least one row (finite derived bounds), and
    // every row must be non-empty.
    for j in 0..n {
        if (0..m).all(|i| a[i][j] == 0) {
            let i = rng.gen_range(0..m);
            a[i][j] = rng.gen_range(1..=p.coeff_max);
        }
    }
    for i in 0..m {
        if a[i].iter().all(|&v| v == 0) {
            let j = rng.gen_range(0..n);
            a[i][j] = rng.gen_range(1..=p.coeff_max);
        }
    }

    let mut rhs = vec![0.0f64; m];
    for i in 0..m {
        let row_sum: u64 = a[i].iter().sum();
        let max_coef = *a[i].iter().max().unwrap();
        rhs[i] = ((tightness * row_sum as f64).round()).max(max_coef as f64);
    }

    let mut upper = vec![0.0f64; n];
    for j in 0..n {
        let mut ub = p.ub_cap;
        for i in 0..m {
            if a[i][j] > 0 {
                ub = ub.min((rhs[i] / a[i][j] as f64).floor());
            }
        }
        upper[j] = ub.max(1.0);
    }

    let objective: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1..=p.cost_max) as f64))
        .collect();

    let rows: Vec<SparseRow> = (0..m)
        .map(|i| {
            let coeffs: Vec<(usize, f64)> = (0..n)
                .filter(|&j| a[i][j] > 0)
                .map(|j| (j, a[i][j] as f64))
                .collect();
            SparseRow::new(coeffs, RowSense::Le, rhs[i])
        })
        .collect();

    let mut gen_params = BTreeMap::new();
    gen_params.insert("density".into(), format!("{density}"));
    gen_params.insert("tightness".into(), format!("{tightness}"));
    gen_params.insert("coeff_dist".into(), format!("U{{1..{}}}", p.coeff_max));
    gen_params.insert("cost_dist".into(), format!("U{{1..{}}}", p.cost_max));

    let inst = MilpInstance {
        format_version: INSTANCE_FORMAT_VERSION,
        name: format!("{}_{n}x{m}_s{seed}", class.as_str()),
        num_vars: n,
        objective,
        rows,
        lower: vec![0.0; n],
        upper,
        integrality: vec![true; n],
        class_tag: class,
        gen_params,
    };
    assert_well_formed(&inst, &vec![0.0; n]);
    inst
}

pub fn generate_packing(n: usize, m: usize, seed: u64) -> MilpInstance {
    PackingParams {
        n,
        m,
        ..PackingParams::default()
    }
    .generate(seed)
}

pub fn generate_bin_packing(n: usize, m: usize, seed: u64) -> MilpInstance {
    BinPackingParams {
        n,
        m,
        ..BinPackingParams::default()
    }
    .generate(seed)
}

/// Maximum cut on a random graph, in the standard edge-variable MILP form:
/// maximize sum of w_e y_e with y_e <= x_u + x_v and y_e <= 2 - x_u - x_v.
///
/// Variables: one binary per vertex followed by one binary per edge, so
/// num_vars = n_vertices + n_edges and num_rows = 2 * n_edges.
#[derive(Debug, Clone)]
pub struct MaxCutParams {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub weight_max: u64,
}

impl Default for MaxCutParams {
    fn default() -> Self {
        MaxCutParams {
            n_vertices: 54,
            n_edges: 134,
            weight_max: 10,
        }
    }
}

impl MaxCutParams {
    pub fn generate(&self, seed: u64) -> MilpInstance {
        let mut rng = rng_for(InstanceClass::MaxCut, seed);
        let nv = self.n_vertices.max(2);
        let max_edges = nv * (nv - 1) / 2;
        let ne = self.n_edges.clamp(1, max_edges);

        let mut all_pairs: Vec<(usize, usize)> = (0..nv)
            .flat_map(|u| ((u + 1)..nv).map(move |v| (u, v)))
            .collect();
        // Partial Fisher-Yates: first ne entries are the sampled edges.
        for k in 0..ne {
            let pick = rng.gen_range(k..all_pairs.len());
            all_pairs.swap(k, pick);
        }
        let mut edges: Vec<(usize, usize)> = all_pairs[..ne].to_vec();
        edges.sort_unstable();
        let weights: Vec<u64> = (0..ne).map(|_| rng.gen_range(1..=self.weight_max)).collect();

        let n = nv + ne;
        let mut objective = vec![0.0; n];
        let mut rows = Vec::with_capacity(2 * ne);
        for (e, &(u, v)) in edges.iter().enumerate() {
            let ye = nv + e;
            objective[ye] = -(weights[e] as f64);
            rows.push(SparseRow::new(
                vec![(u, -1.0), (v, -1.0), (ye, 1.0)],
                RowSense::Le,
                0.0,
            ));
            rows.push(SparseRow::new(
                vec![(u, 1.0), (v, 1.0), (ye, 1.0)],
                RowSense::Le,
                2.0,
            ));
        }

        let mut gen_params = BTreeMap::new();
        gen_params.insert("graph".into(), format!("uniform_{ne}_edges"));
        gen_params.insert("weight_dist".into(), format!("U{{1..{}}}", self.weight_max));

        let inst = MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: format!("max_cut_{nv}v{ne}e_s{seed}"),
            num_vars: n,
            objective,
            rows,
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            integrality: vec![true; n],
            class_tag: InstanceClass::MaxCut,
            gen_params,
        };
        assert_well_formed(&inst, &vec![0.0; n]);
        inst
    }
}

pub fn generate_max_cut(n_vertices: usize, n_edges: usize, seed: u64) -> MilpInstance {
    MaxCutParams {
        n_vertices,
        n_edges,
        ..MaxCutParams::default()
    }
    .generate(seed)
}

/// Combinatorial-auction winner determination as a set-packing MILP.
///
/// Bids are generated by a simplified CATS-style scheme; the per-instance
/// parameters below are each drawn uniformly from their stated ranges.
/// Variables: one binary per bid. Rows: one `<= 1` row per item, so
/// num_vars = n_bids and num_rows = n_items.
#[derive(Debug, Clone)]
pub struct CombAuctionParams {
    pub n_items: usize,
    pub n_bids: usize,
    pub value_deviation: (f64, f64),
    pub add_item_prob: (f64, f64),
    pub max_n_sub_bids: (u64, u64),
    pub additivity: (f64, f64),
    pub budget_factor: (f64, f64),
    pub resale_factor: (f64, f64),
}

impl Default for CombAuctionParams {
    fn default() -> Self {
        CombAuctionParams {
            n_items: 100,
            n_bids: 500,
            value_deviation: (0.25, 0.75),
            add_item_prob: (0.5, 0.75),
            max_n_sub_bids: (3, 7),
            additivity: (-0.1, 0.4),
            budget_factor: (1.25, 1.75),
            resale_factor: (0.35, 0.65),
        }
    }
}

impl CombAuctionParams {
    pub fn generate(&self, seed: u64) -> MilpInstance {
        let mut rng = rng_for(InstanceClass::CombAuction, seed);
        let n_items = self.n_items.max(1);
        let n_bids = self.n_bids.max(1);

        let value_deviation = rng.gen_range(self.value_deviation.0..=self.value_deviation.1);
        let add_item_prob = rng.gen_range(self.add_item_prob.0..=self.add_item_prob.1);
        let max_n_sub_bids = rng.gen_range(self.max_n_sub_bids.0..=self.max_n_sub_bids.1);
        let additivity = rng.gen_range(self.additivity.0..=self.additivity.1);
        let budget_factor = rng.gen_range(self.budget_factor.0..=self.budget_factor.1);
        let resale_factor = rng.gen_range(self.resale_factor.0..=self.resale_factor.1);

        let common: Vec<f64> = (0..n_items).map(|_| rng.gen_range(1.0..=100.0)).collect();

        // Bundle price: private values plus a size-dependent additivity bonus.
        let price_of = |bundle: &[usize], private: &[f64]| -> f64 {
            let s: f64 = bundle.iter().map(|&i| private[i]).sum();
            let k = bundle.len() as f64;
            s * (1.0 + additivity * (k - 1.0) / k)
        };

        let mut bids: Vec<(Vec<usize>, f64)> = Vec::with_capacity(n_bids);
        while bids.len() < n_bids {
            // One bidder: private valuations around the common values.
            let private: Vec<f64> = (0..n_items)
                .map(|i| (common[i] + 100.0 * value_deviation * rng.gen_range(-1.0..=1.0)).max(0.1))
                .collect();

            // Main bundle: weighted start, then grow with add_item_prob.
            let mut in_bundle = vec![false; n_items];
            let pick_weighted = |rng: &mut ChaCha8Rng, taken: &[bool], w: &[f64]| -> Option<usize> {
                let total: f64 = (0..w.len()).filter(|&i| !taken[i]).map(|i| w[i]).sum();
                if total <= 0.0 {
                    return None;
                }
                let mut t = rng.gen_range(0.0..total);
                for i in 0..w.len() {
                    if taken[i] {
                        continue;
                    }
                    if t < w[i] {
                        return Some(i);
                    }
                    t -= w[i];
                }
                (0..w.len()).rev().find(|&i| !taken[i])
            };
            let first = pick_weighted(&mut rng, &in_bundle, &private).unwrap();
            in_bundle[first] = true;
            let mut bundle = vec![first];
            while bundle.len() < n_items && rng.gen_bool(add_item_prob) {
                match pick_weighted(&mut rng, &in_bundle, &private) {
                    Some(i) => {
                        in_bundle[i] = true;
                        bundle.push(i);
                    }
                    None => break,
                }
            }
            bundle.sort_unstable();
            let main_price = price_of(&bundle, &private);
            let budget = budget_factor * main_price;
            bids.push((bundle.clone(), main_price));

            // Substitute bundles: single-item swaps kept under budget and
            // above the resale floor of their own bundle.
            for _ in 0..max_n_sub_bids {
                if bids.len() >= n_bids || bundle.len() >= n_items {
                    break;
                }
                let mut sub = bundle.clone();
                let out = rng.gen_range(0..sub.len());
                let candidates: Vec<usize> =
                    (0..n_items).filter(|i| !sub.contains(i)).collect();
                if candidates.is_empty() {
                    break;
                }
                sub[out] = candidates[rng.gen_range(0..candidates.len())];
                sub.sort_unstable();
                let price = price_of(&sub, &private);
                let resale: f64 = resale_factor * sub.iter().map(|&i| common[i]).sum::<f64>();
                if price <= budget && price >= resale {
                    bids.push((sub, price));
                }
            }
        }
        bids.truncate(n_bids);

        let objective: Vec<f64> = bids.iter().map(|(_, p)| -p).collect();
        let rows: Vec<SparseRow> = (0..n_items)
            .map(|item| {
                let coeffs: Vec<(usize, f64)> = bids
                    .iter()
                    .enumerate()
                    .filter(|(_, (bundle, _))| bundle.binary_search(&item).is_ok())
                    .map(|(b, _)| (b, 1.0))
                    .collect();
                SparseRow::new(coeffs, RowSense::Le, 1.0)
            })
            .collect();

        let mut gen_params = BTreeMap::new();
        gen_params.insert("value_deviation".into(), format!("{value_deviation}"));
        gen_params.insert("add_item_prob".into(), format!("{add_item_prob}"));
        gen_params.insert("max_n_sub_bids".into(), format!("{max_n_sub_bids}"));
        gen_params.insert("additivity".into(), format!("{additivity}"));
        gen_params.insert("budget_factor".into(), format!("{budget_factor}"));
        gen_params.insert("resale_factor".into(), format!("{resale_factor}"));

        let inst = MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: format!("comb_auction_{n_items}i{n_bids}b_s{seed}"),
            num_vars: n_bids,
            objective,
            rows,
            lower: vec![0.0; n_bids],
            upper: vec![1.0; n_bids],
            integrality: vec![true; n_bids],
            class_tag: InstanceClass::CombAuction,
            gen_params,
        };
        assert_well_formed(&inst, &vec![0.0; n_bids]);
        inst
    }
}

pub fn generate_comb_auction(n_items: usize, n_bids: usize, seed: u64) -> MilpInstance {
    CombAuctionParams {
        n_items,
        n_bids,
        ..CombAuctionParams::default()
    }
    .generate(seed)
}

/// Graph model for the independent-set class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphModel {
    BarabasiAlbert,
    ErdosRenyi,
}

/// Maximum independent set on a random graph; per instance the graph model
/// is drawn from {barabasi_albert, erdos_renyi} with edge_probability and
/// affinity drawn from the stated ranges.
///
/// Variables: one binary per node. Rows: one `x_u + x_v <= 1` per edge.
#[derive(Debug, Clone)]
pub struct IndepSetParams {
    pub n_nodes: usize,
    pub edge_probability: (f64, f64),
    pub affinity: (u64, u64),
}

impl Default for IndepSetParams {
    fn default() -> Self {
        IndepSetParams {
            n_nodes: 500,
            edge_probability: (0.005, 0.01),
            affinity: (2, 6),
        }
    }
}

impl IndepSetParams {
    pub fn generate(&self, seed: u64) -> MilpInstance {
        let mut rng = rng_for(InstanceClass::IndepSet, seed);
        let n = self.n_nodes.max(2);
        let model = if rng.gen_bool(0.5) {
            GraphModel::BarabasiAlbert
        } else {
            GraphModel::ErdosRenyi
        };

        let mut edges: Vec<(usize, usize)> = Vec::new();
        let model_str;
        match model {
            GraphModel::ErdosRenyi => {
                let p = rng.gen_range(self.edge_probability.0..=self.edge_probability.1);
                model_str = format!("erdos_renyi(p={p})");
                for u in 0..n {
                    for v in (u + 1)..n {
                        if rng.gen_bool(p) {
                            edges.push((u, v));
                        }
                    }
                }
            }
            GraphModel::BarabasiAlbert => {
                let affinity =
                    rng.gen_range(self.affinity.0..=self.affinity.1).min(n as u64 - 1) as usize;
                model_str = format!("barabasi_albert(affinity={affinity})");
                // Endpoint list doubles as the preferential-attachment urn.
                let mut urn: Vec<usize> = (0..affinity.max(1)).collect();
                for v in affinity.max(1)..n {
                    let mut targets = Vec::with_capacity(affinity);
                    let mut guard = 0;
                    while targets.len() < affinity && guard < 50 * affinity + 50 {
                        guard += 1;
                        let t = urn[rng.gen_range(0..urn.len())];
                        if t != v && !targets.contains(&t) {
                            targets.push(t);
                        }
                    }
                    for &t in &targets {
                        edges.push((t.min(v), t.max(v)));
                        urn.push(t);
                        urn.push(v);
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let objective = vec![-1.0; n];
        let rows: Vec<SparseRow> = edges
            .iter()
            .map(|&(u, v)| SparseRow::new(vec![(u, 1.0), (v, 1.0)], RowSense::Le, 1.0))
            .collect();

        let mut gen_params = BTreeMap::new();
        gen_params.insert("graph_type".into(), model_str);

        let inst = MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: format!("indep_set_{n}n_s{seed}"),
            num_vars: n,
            objective,
            rows,
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            integrality: vec![true; n],
            class_tag: InstanceClass::IndepSet,
            gen_params,
        };
        assert_well_formed(&inst, &vec![0.0; n]);
        inst
    }
}

pub fn generate_indep_set(n_nodes: usize, seed: u64) -> MilpInstance {
    IndepSetParams {
        n_nodes,
        ..IndepSetParams::default()
    }
    .generate(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{brute_force_opt, BruteForceOutcome};

    #[test]
    fn packing_dimensions_and_determinism() {
        let a = generate_packing(60, 60, 7);
        assert_eq!(a.num_vars, 60);
        assert_eq!(a.num_rows(), 60);
        assert!(a.rows.iter().all(|r| r.sense == RowSense::Le));
        let b = generate_packing(60, 60, 7);
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap(),
            "same seed must give byte-identical instances"
        );
        let c = generate_packing(60, 60, 8);
        assert_ne!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&c).unwrap()
        );
    }

    #[test]
    fn bin_packing_dimensions() {
        let inst = generate_bin_packing(66, 132, 3);
        assert_eq!(inst.num_vars, 66);
        assert_eq!(inst.num_rows(), 132);
        assert!((0..66).all(|j| inst.lower[j] == 0.0 && inst.upper[j] == 1.0));
        let again = generate_bin_packing(66, 132, 3);
        assert_eq!(
            serde_json::to_vec(&inst).unwrap(),
            serde_json::to_vec(&again).unwrap()
        );
    }

    #[test]
    fn max_cut_dimensions_follow_formulation() {
        let inst = generate_max_cut(54, 134, 11);
        assert_eq!(inst.num_vars, 54 + 134);
        assert_eq!(inst.num_rows(), 2 * 134);
        let again = generate_max_cut(54, 134, 11);
        assert_eq!(
            serde_json::to_vec(&inst).unwrap(),
            serde_json::to_vec(&again).unwrap()
        );
    }

    #[test]
    fn max_cut_triangle_optimum_is_two_edges() {
        // Unit-ish weights are not guaranteed, so check against vertex-labeling
        // enumeration: best cut value over all 2^3 labelings.
        let inst = generate_max_cut(3, 3, 5);
        // Recover edge weights from the objective (edge vars follow vertices).
        let w: Vec<f64> = (3..6).map(|j| -inst.objective[j]).collect();
        let mut best = 0.0f64;
        for mask in 0u32..8 {
            let side = |v: usize| mask >> v & 1;
            // Triangle edges in sorted order: (0,1), (0,2), (1,2).
            let edges = [(0, 1), (0, 2), (1, 2)];
            let cut: f64 = edges
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| side(u) != side(v))
                .map(|(e, _)| w[e])
                .sum();
            best = best.max(cut);
        }
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => {
                assert!((a.objective - (-best)).abs() < 1e-9);
                // A triangle cut always has exactly two edges.
                let cut_edges: f64 = (3..6).map(|j| a.values[j]).sum();
                assert!((cut_edges - 2.0).abs() < 1e-9);
            }
            BruteForceOutcome::Infeasible => panic!("triangle instance must be feasible"),
        }
    }

    #[test]
    fn comb_auction_rows_are_set_packing() {
        let inst = generate_comb_auction(10, 25, 9);
        assert_eq!(inst.num_vars, 25);
        assert_eq!(inst.num_rows(), 10);
        for row in &inst.rows {
            assert_eq!(row.sense, RowSense::Le);
            assert_eq!(row.rhs, 1.0);
            assert!(row.coeffs.iter().all(|&(_, a)| a == 1.0));
        }
        let again = generate_comb_auction(10, 25, 9);
        assert_eq!(
            serde_json::to_vec(&inst).unwrap(),
            serde_json::to_vec(&again).unwrap()
        );
    }

    #[test]
    fn comb_auction_toy_optimum_matches_enumeration() {
        let inst = generate_comb_auction(2, 3, 4);
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => {
                // Enumerate all 2^3 bid subsets directly.
                let mut best = 0.0f64;
                for mask in 0u32..8 {
                    let x: Vec<f64> = (0..3).map(|j| f64::from(mask >> j & 1)).collect();
                    if inst.is_feasible(&x, 1e-9) {
                        best = best.min(inst.objective_value(&x));
                    }
                }
                assert!((a.objective - best).abs() < 1e-9);
            }
            BruteForceOutcome::Infeasible => panic!("all-zero is always feasible"),
        }
    }

    #[test]
    fn indep_set_rows_are_edge_constraints() {
        let params = IndepSetParams {
            n_nodes: 40,
            edge_probability: (0.1, 0.2),
            affinity: (2, 4),
        };
        let inst = params.generate(13);
        for row in &inst.rows {
            assert_eq!(row.sense, RowSense::Le);
            assert_eq!(row.rhs, 1.0);
            assert_eq!(row.coeffs.len(), 2);
        }
        let again = params.generate(13);
        assert_eq!(
            serde_json::to_vec(&inst).unwrap(),
            serde_json::to_vec(&again).unwrap()
        );
    }

    #[test]
    fn indep_set_path_graph_optimum_is_two() {
        // Build a 3-node path directly as a custom check of the formulation.
        let inst = MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: "path3".into(),
            num_vars: 3,
            objective: vec![-1.0; 3],
            rows: vec![
                SparseRow::new(vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0),
                SparseRow::new(vec![(1, 1.0), (2, 1.0)], RowSense::Le, 1.0),
            ],
            lower: vec![0.0; 3],
            upper: vec![1.0; 3],
            integrality: vec![true; 3],
            class_tag: InstanceClass::IndepSet,
            gen_params: BTreeMap::new(),
        };
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => assert!((a.objective - (-2.0)).abs() < 1e-9),
            BruteForceOutcome::Infeasible => panic!(),
        }
    }

    #[test]
    fn small_packing_has_feasible_optimum() {
        let inst = generate_packing(4, 3, 1);
        match brute_force_opt(&inst, 16).unwrap() {
            BruteForceOutcome::Optimal(a) => {
                assert!(inst.is_feasible(&a.values, 1e-9));
                assert!(a.objective <= 0.0); // all-zero is feasible with value 0
            }
            BruteForceOutcome::Infeasible => panic!("generated packing must be feasible"),
        }
    }
}
