//! Clique and odd-cycle cuts over the conflict graph.
//!
//! The conflict graph is built from set-packing base rows only: rows of the
//! form `sum_{j in Q} x_j <= 1` (or `= 1`) over binary variables make every
//! pair in Q adjacent. A clique K then yields `sum_{K} x <= 1`; an odd cycle
//! C yields `sum_{C} x <= (|C| - 1) / 2`.

use super::{Cut, SepContext, SeparatorId};
use crate::instances::RowSense;
use std::collections::BTreeSet;

struct ConflictGraph {
    neighbors: Vec<Vec<usize>>,
}

impl ConflictGraph {
    fn build(ctx: &SepContext) -> ConflictGraph {
        let n = ctx.inst.num_vars;
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        let is_binary = |j: usize| {
            ctx.inst.integrality[j]
                && ctx.inst.lower[j].abs() < 1e-9
                && (ctx.inst.upper[j] - 1.0).abs() < 1e-9
        };
        for row in &ctx.inst.rows {
            let packing = matches!(row.sense, RowSense::Le | RowSense::Eq)
                && (row.rhs - 1.0).abs() < 1e-9
                && row.coeffs.len() >= 2
                && row
                    .coeffs
                    .iter()
                    .all(|&(j, a)| (a - 1.0).abs() < 1e-9 && is_binary(j));
            if !packing {
                continue;
            }
            for (ai, &(u, _)) in row.coeffs.iter().enumerate() {
                for &(v, _) in &row.coeffs[ai + 1..] {
                    neighbors[u].push(v);
                    neighbors[v].push(u);
                }
            }
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
        }
        ConflictGraph { neighbors }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    fn is_empty(&self) -> bool {
        self.neighbors.iter().all(|nb| nb.is_empty())
    }
}

/// Variables worth seeding a search from, most fractional first.
fn fractional_seeds(ctx: &SepContext, limit: usize) -> Vec<usize> {
    let mut seeds: Vec<(usize, f64)> = (0..ctx.inst.num_vars)
        .filter_map(|j| {
            let x = ctx.sol.x[j];
            let f = (x - x.round()).abs();
            (f > 1e-4).then_some((j, f))
        })
        .collect();
    seeds.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    seeds.truncate(limit);
    seeds.into_iter().map(|(j, _)| j).collect()
}

pub fn separate_clique(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let graph = ConflictGraph::build(ctx);
    if graph.is_empty() {
        return Vec::new();
    }
    let x = &ctx.sol.x;
    let mut cuts = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for seed in fractional_seeds(ctx, 3 * ctx.params.max_cuts_per_call) {
        // Grow a clique greedily by LP value.
        let mut clique = vec![seed];
        let mut candidates: Vec<usize> = graph.neighbors[seed]
            .iter()
            .copied()
            .filter(|&v| x[v] > 1e-6)
            .collect();
        candidates.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap().then(a.cmp(&b)));
        for v in candidates {
            if clique.iter().all(|&u| graph.adjacent(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() < 3 {
            continue; // pairs are already rows of the LP
        }
        let mut key = clique.clone();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        let mut dense = vec![0.0; ctx.inst.num_vars];
        for &v in &clique {
            dense[v] = 1.0;
        }
        if let Some(cut) = ctx.finish_cut(&dense, 1.0, SeparatorId::Clique, round) {
            cuts.push(cut);
        }
    }
    cuts
}

pub fn separate_oddcycle(ctx: &SepContext, round: usize) -> Vec<Cut> {
    let graph = ConflictGraph::build(ctx);
    if graph.is_empty() {
        return Vec::new();
    }
    let n = ctx.inst.num_vars;
    let x = &ctx.sol.x;
    // Edge weight 1 - x_u - x_v >= 0 at any LP point satisfying the packing
    // rows; an odd cycle of total weight < 1 gives a violated cut.
    let weight = |u: usize, v: usize| (1.0 - x[u] - x[v]).max(0.0);

    let mut cuts = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for seed in fractional_seeds(ctx, 10) {
        let Some(walk) = shortest_odd_walk(&graph, n, seed, weight) else {
            continue;
        };
        let Some(cycle) = simple_odd_cycle(&walk) else {
            continue;
        };
        if cycle.len() < 3 {
            continue;
        }
        let mut key = cycle.clone();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        let mut dense = vec![0.0; n];
        for &v in &cycle {
            dense[v] = 1.0;
        }
        let rhs = (cycle.len() as f64 - 1.0) / 2.0;
        if let Some(cut) = ctx.finish_cut(&dense, rhs, SeparatorId::OddCycle, round) {
            cuts.push(cut);
        }
    }
    cuts
}

/// Shortest closed odd walk through `seed` via Dijkstra on the bipartite
/// double cover; returns the vertex sequence (seed ... seed, odd length) if
/// its total weight is below 1.
fn shortest_odd_walk(
    graph: &ConflictGraph,
    n: usize,
    seed: usize,
    weight: impl Fn(usize, usize) -> f64,
) -> Option<Vec<usize>> {
    let size = 2 * n; // (v, parity) -> v + parity * n
    let mut dist = vec![f64::INFINITY; size];
    let mut prev = vec![usize::MAX; size];
    let mut done = vec![false; size];
    dist[seed] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..size {
            if !done[i] && dist[i] < best {
                best = dist[i];
                u = i;
            }
        }
        if u == usize::MAX || best >= 1.0 - 1e-9 {
            break;
        }
        done[u] = true;
        let (v, parity) = (u % n, u / n);
        for &w in &graph.neighbors[v] {
            let node = w + (1 - parity) * n;
            let d = dist[u] + weight(v, w);
            if d < dist[node] - 1e-12 {
                dist[node] = d;
                prev[node] = u;
            }
        }
    }
    let target = seed + n;
    if dist[target] >= 1.0 - 1e-9 {
        return None;
    }
    let mut walk = Vec::new();
    let mut cur = target;
    while cur != usize::MAX {
        walk.push(cur % n);
        cur = prev[cur];
    }
    walk.reverse();
    (walk.len() >= 4 && walk.len() % 2 == 0).then_some(walk) // odd edge count
}

/// Extract a simple odd cycle from a closed odd walk by splicing out even
/// sub-loops; an odd closed walk always contains one.
fn simple_odd_cycle(walk: &[usize]) -> Option<Vec<usize>> {
    let mut stack: Vec<usize> = Vec::new();
    for &v in walk {
        if let Some(pos) = stack.iter().position(|&s| s == v) {
            let len = stack.len() - pos;
            if len >= 3 && len % 2 == 1 {
                return Some(stack[pos..].to_vec());
            }
            // Even loop: drop it and keep scanning.
            stack.truncate(pos + 1);
        } else {
            stack.push(v);
        }
    }
    None
}
