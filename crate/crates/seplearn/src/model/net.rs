//! The reward network and its hand-written exact backward pass.
//!
//! Operator set: per-feature input normalization (frozen dataset statistics,
//! trainable scale/shift), affine layers with rectifiers, normalized sparse
//! or complete bipartite aggregation, row-wise layer normalization,
//! multi-head softmax attention with a residual, and global mean pooling.

use super::{ModelError, SepFeatMode, TripletGraph, C_FEATS, V_FEATS};
use crate::separators::NUM_SEPARATORS;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::path::Path;

const LN_EPS: f64 = 1e-5;
const STD_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchConfig {
    pub d_hidden: usize,
    pub n_heads: usize,
    pub dropout: f64,
    pub sep_feat: SepFeatMode,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig {
            d_hidden: 64,
            n_heads: 4,
            dropout: 0.1,
            sep_feat: SepFeatMode::Rich,
        }
    }
}

impl ArchConfig {
    /// Stable hash of everything that determines the parameter layout.
    pub fn hash(&self) -> u64 {
        let desc = format!(
            "v{V_FEATS}/c{C_FEATS}/s{}/d{}/h{}/m{}",
            self.sep_feat.dim(),
            self.d_hidden,
            self.n_heads,
            NUM_SEPARATORS,
        );
        // FNV-1a, stable across platforms and toolchains.
        let mut h: u64 = 0xcbf29ce484222325;
        for b in desc.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

#[derive(Debug, Clone)]
struct Alloc {
    next: usize,
}

impl Alloc {
    fn take(&mut self, len: usize) -> Range<usize> {
        let r = self.next..self.next + len;
        self.next += len;
        r
    }
}

#[derive(Debug, Clone)]
struct EmbLayout {
    in_dim: usize,
    gamma: Range<usize>,
    beta: Range<usize>,
    w1: Range<usize>,
    b1: Range<usize>,
    w2: Range<usize>,
    b2: Range<usize>,
}

#[derive(Debug, Clone)]
struct HopLayout {
    w_self: Range<usize>,
    w_nbr: Range<usize>,
    b: Range<usize>,
    ln_g: Range<usize>,
    ln_b: Range<usize>,
    w_out: Range<usize>,
    b_out: Range<usize>,
}

#[derive(Debug, Clone)]
struct AttnLayout {
    wq: Range<usize>,
    wk: Range<usize>,
    wv: Range<usize>,
    wo: Range<usize>,
    bo: Range<usize>,
}

#[derive(Debug, Clone)]
struct HeadLayout {
    w1: Range<usize>,
    b1: Range<usize>,
    w2: Range<usize>,
    b2: Range<usize>,
}

#[derive(Debug, Clone)]
struct Layout {
    emb_v: EmbLayout,
    emb_c: EmbLayout,
    emb_s: EmbLayout,
    hops: Vec<HopLayout>,
    attn: AttnLayout,
    head: HeadLayout,
    total: usize,
}

fn emb_layout(a: &mut Alloc, in_dim: usize, d: usize) -> EmbLayout {
    EmbLayout {
        in_dim,
        gamma: a.take(in_dim),
        beta: a.take(in_dim),
        w1: a.take(in_dim * d),
        b1: a.take(d),
        w2: a.take(d * d),
        b2: a.take(d),
    }
}

fn hop_layout(a: &mut Alloc, d: usize) -> HopLayout {
    HopLayout {
        w_self: a.take(d * d),
        w_nbr: a.take(d * d),
        b: a.take(d),
        ln_g: a.take(d),
        ln_b: a.take(d),
        w_out: a.take(d * d),
        b_out: a.take(d),
    }
}

fn build_layout(arch: &ArchConfig) -> Layout {
    let d = arch.d_hidden;
    let mut a = Alloc { next: 0 };
    let emb_v = emb_layout(&mut a, V_FEATS, d);
    let emb_c = emb_layout(&mut a, C_FEATS, d);
    let emb_s = emb_layout(&mut a, arch.sep_feat.dim(), d);
    let hops = (0..6).map(|_| hop_layout(&mut a, d)).collect();
    let attn = AttnLayout {
        wq: a.take(d * d),
        wk: a.take(d * d),
        wv: a.take(d * d),
        wo: a.take(d * d),
        bo: a.take(d),
    };
    let head = HeadLayout {
        w1: a.take(3 * d * d),
        b1: a.take(d),
        w2: a.take(d),
        b2: a.take(1),
    };
    Layout {
        emb_v,
        emb_c,
        emb_s,
        hops,
        attn,
        head,
        total: a.next,
    }
}

/// Per-feature normalization statistics, frozen after the first fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputStats {
    pub v_mean: Vec<f64>,
    pub v_std: Vec<f64>,
    pub c_mean: Vec<f64>,
    pub c_std: Vec<f64>,
    pub s_mean: Vec<f64>,
    pub s_std: Vec<f64>,
    pub frozen: bool,
}

impl InputStats {
    fn identity(s_dim: usize) -> Self {
        InputStats {
            v_mean: vec![0.0; V_FEATS],
            v_std: vec![1.0; V_FEATS],
            c_mean: vec![0.0; C_FEATS],
            c_std: vec![1.0; C_FEATS],
            s_mean: vec![0.0; s_dim],
            s_std: vec![1.0; s_dim],
            frozen: false,
        }
    }
}

/// Normalized bipartite aggregation: either the explicit variable-constraint
/// edges or an implicit complete block of weight-one edges.
enum Adj {
    Sparse {
        // (src, tgt, normalized weight)
        edges: Vec<(usize, usize, f64)>,
        n_src: usize,
        n_tgt: usize,
    },
    Complete {
        n_src: usize,
        n_tgt: usize,
        w: f64,
    },
}

impl Adj {
    fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let d = x.ncols();
        match self {
            Adj::Sparse { edges, n_tgt, .. } => {
                let mut out = Array2::zeros((*n_tgt, d));
                for &(s, t, w) in edges {
                    for k in 0..d {
                        out[[t, k]] += w * x[[s, k]];
                    }
                }
                out
            }
            Adj::Complete { n_tgt, w, .. } => {
                let colsum = x.sum_axis(Axis(0)) * *w;
                let mut out = Array2::zeros((*n_tgt, d));
                for t in 0..*n_tgt {
                    out.row_mut(t).assign(&colsum);
                }
                out
            }
        }
    }

    fn apply_transpose(&self, g: &Array2<f64>) -> Array2<f64> {
        let d = g.ncols();
        match self {
            Adj::Sparse { edges, n_src, .. } => {
                let mut out = Array2::zeros((*n_src, d));
                for &(s, t, w) in edges {
                    for k in 0..d {
                        out[[s, k]] += w * g[[t, k]];
                    }
                }
                out
            }
            Adj::Complete { n_src, w, .. } => {
                let colsum = g.sum_axis(Axis(0)) * *w;
                let mut out = Array2::zeros((*n_src, d));
                for s in 0..*n_src {
                    out.row_mut(s).assign(&colsum);
                }
                out
            }
        }
    }
}

/// Normalized adjacency for one graph: symmetric degree normalization on the
/// variable-constraint edges; uniform scaling on the complete separator
/// blocks.
struct GraphAdj {
    vc: Vec<(usize, usize, f64)>,
    n: usize,
    m: usize,
}

impl GraphAdj {
    fn new(g: &TripletGraph) -> Self {
        let n = g.num_vars();
        let m = g.num_rows();
        let mut dv = vec![0.0f64; n];
        let mut dc = vec![0.0f64; m];
        for &(j, i, w) in &g.vc_edges {
            dv[j] += w.abs();
            dc[i] += w.abs();
        }
        let vc = g
            .vc_edges
            .iter()
            .map(|&(j, i, w)| (j, i, w / ((1.0 + dv[j]) * (1.0 + dc[i])).sqrt()))
            .collect();
        GraphAdj { vc, n, m }
    }

    fn hop(&self, kind: HopKind) -> Adj {
        let s = NUM_SEPARATORS;
        let sv = 1.0 / (((1 + self.n) as f64) * ((1 + s) as f64)).sqrt();
        let sc = 1.0 / (((1 + self.m) as f64) * ((1 + s) as f64)).sqrt();
        match kind {
            HopKind::VtoC => Adj::Sparse {
                edges: self.vc.clone(),
                n_src: self.n,
                n_tgt: self.m,
            },
            HopKind::CtoV => Adj::Sparse {
                edges: self.vc.iter().map(|&(j, i, w)| (i, j, w)).collect(),
                n_src: self.m,
                n_tgt: self.n,
            },
            HopKind::StoV => Adj::Complete {
                n_src: s,
                n_tgt: self.n,
                w: sv,
            },
            HopKind::VtoS => Adj::Complete {
                n_src: self.n,
                n_tgt: s,
                w: sv,
            },
            HopKind::StoC => Adj::Complete {
                n_src: s,
                n_tgt: self.m,
                w: sc,
            },
            HopKind::CtoS => Adj::Complete {
                n_src: self.m,
                n_tgt: s,
                w: sc,
            },
        }
    }
}

#[derive(Clone, Copy)]
enum HopKind {
    VtoC,
    CtoV,
    StoV,
    VtoS,
    StoC,
    CtoS,
}

const HOP_KINDS: [HopKind; 6] = [
    HopKind::VtoC,
    HopKind::CtoV,
    HopKind::StoV,
    HopKind::VtoS,
    HopKind::StoC,
    HopKind::CtoS,
];

struct EmbCache {
    xhat: Array2<f64>,
    xn: Array2<f64>,
    a1: Array2<f64>,
    r1: Array2<f64>,
    a2: Array2<f64>,
}

struct HopCache {
    x_src: Array2<f64>,
    x_tgt: Array2<f64>,
    agg: Array2<f64>,
    ln_xhat: Array2<f64>,
    ln_inv: Array1<f64>,
    ln_out: Array2<f64>,
    relu_out: Array2<f64>,
}

struct AttnCache {
    input: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    // per head: (probs after softmax, dropout mask scaled)
    probs: Vec<Array2<f64>>,
    masks: Option<Vec<Array2<f64>>>,
    o: Array2<f64>,
}

struct HeadCache {
    z: Array1<f64>,
    a1: Array1<f64>,
    r1: Array1<f64>,
}

struct Cache {
    emb_v: EmbCache,
    emb_c: EmbCache,
    emb_s: EmbCache,
    hops: Vec<HopCache>,
    attn: AttnCache,
    head: HeadCache,
    nv: usize,
    nc: usize,
}

fn mat<'a>(params: &'a [f64], r: &Range<usize>, rows: usize, cols: usize) -> ArrayView2<'a, f64> {
    ArrayView2::from_shape((rows, cols), &params[r.clone()]).expect("layout shape")
}

fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

fn relu_mask_mul(g: &Array2<f64>, pre: &Array2<f64>) -> Array2<f64> {
    let mut out = g.clone();
    out.zip_mut_with(pre, |gv, &p| {
        if p <= 0.0 {
            *gv = 0.0;
        }
    });
    out
}

fn add_to(acc: &mut [f64], r: &Range<usize>, val: &Array2<f64>) {
    let flat = val.as_slice().expect("contiguous");
    for (dst, &v) in acc[r.clone()].iter_mut().zip(flat) {
        *dst += v;
    }
}

fn add_to_1d(acc: &mut [f64], r: &Range<usize>, val: &Array1<f64>) {
    for (dst, &v) in acc[r.clone()].iter_mut().zip(val.iter()) {
        *dst += v;
    }
}

pub struct RewardNet {
    pub arch: ArchConfig,
    layout: Layout,
    pub params: Vec<f64>,
    pub stats: InputStats,
}

impl Clone for RewardNet {
    fn clone(&self) -> Self {
        RewardNet {
            arch: self.arch.clone(),
            layout: self.layout.clone(),
            params: self.params.clone(),
            stats: self.stats.clone(),
        }
    }
}

/// Options for [`RewardNet::fit`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            epochs: 1,
            lr: 1e-3,
            batch_size: 64,
            seed: 0,
        }
    }
}

impl RewardNet {
    /// All-zero parameters: forward is identically zero.
    pub fn new_zero(arch: ArchConfig) -> Self {
        let layout = build_layout(&arch);
        let params = vec![0.0; layout.total];
        let stats = InputStats::identity(arch.sep_feat.dim());
        let mut net = RewardNet {
            arch,
            layout,
            params,
            stats,
        };
        net.reset_norm_scales();
        net
    }

    /// Uniform Glorot-style initialization, deterministic in the seed.
    pub fn init(arch: ArchConfig, seed: u64) -> Self {
        let mut net = RewardNet::new_zero(arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e45_5452);
        let d = net.arch.d_hidden;
        let l = net.layout.clone();
        let mut fill = |range: &Range<usize>, fan_in: usize, fan_out: usize, p: &mut Vec<f64>| {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for i in range.clone() {
                p[i] = rng.gen_range(-bound..bound);
            }
        };
        for emb in [&l.emb_v, &l.emb_c, &l.emb_s] {
            fill(&emb.w1, emb.in_dim, d, &mut net.params);
            fill(&emb.w2, d, d, &mut net.params);
        }
        for hop in &l.hops {
            fill(&hop.w_self, d, d, &mut net.params);
            fill(&hop.w_nbr, d, d, &mut net.params);
            fill(&hop.w_out, d, d, &mut net.params);
        }
        fill(&l.attn.wq, d, d, &mut net.params);
        fill(&l.attn.wk, d, d, &mut net.params);
        fill(&l.attn.wv, d, d, &mut net.params);
        fill(&l.attn.wo, d, d, &mut net.params);
        fill(&l.head.w1, 3 * d, d, &mut net.params);
        fill(&l.head.w2, d, 1, &mut net.params);
        net
    }

    /// Normalization scale parameters start at one (zero would kill input).
    fn reset_norm_scales(&mut self) {
        let l = self.layout.clone();
        for r in [
            &l.emb_v.gamma,
            &l.emb_c.gamma,
            &l.emb_s.gamma,
            &l.hops[0].ln_g,
            &l.hops[1].ln_g,
            &l.hops[2].ln_g,
            &l.hops[3].ln_g,
            &l.hops[4].ln_g,
            &l.hops[5].ln_g,
        ] {
            for i in r.clone() {
                self.params[i] = 1.0;
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.layout.total
    }

    pub fn arch_hash(&self) -> u64 {
        self.arch.hash()
    }

    /// Dataset-level normalization statistics from a set of graphs, after
    /// which the statistics stay fixed for the lifetime of the net.
    pub fn freeze_stats(&mut self, graphs: &[&TripletGraph]) {
        if self.stats.frozen || graphs.is_empty() {
            return;
        }
        let collect = |sel: &dyn Fn(&TripletGraph) -> &Array2<f64>, dim: usize| {
            let mut mean = vec![0.0f64; dim];
            let mut sq = vec![0.0f64; dim];
            let mut count = 0usize;
            for g in graphs {
                let x = sel(g);
                for row in x.rows() {
                    for (k, &v) in row.iter().enumerate() {
                        mean[k] += v;
                        sq[k] += v * v;
                    }
                    count += 1;
                }
            }
            let count = count.max(1) as f64;
            let mut std = vec![1.0f64; dim];
            for k in 0..dim {
                mean[k] /= count;
                std[k] = (sq[k] / count - mean[k] * mean[k]).max(0.0).sqrt().max(STD_FLOOR);
            }
            (mean, std)
        };
        let (vm, vs) = collect(&|g| &g.v_feats, V_FEATS);
        let (cm, cs) = collect(&|g| &g.c_feats, C_FEATS);
        let (sm, ss) = collect(&|g| &g.s_feats, self.arch.sep_feat.dim());
        self.stats = InputStats {
            v_mean: vm,
            v_std: vs,
            c_mean: cm,
            c_std: cs,
            s_mean: sm,
            s_std: ss,
            frozen: true,
        };
    }

    fn embed_forward(
        &self,
        el: &EmbLayout,
        x: &Array2<f64>,
        mean: &[f64],
        std: &[f64],
    ) -> (Array2<f64>, EmbCache) {
        let d = self.arch.d_hidden;
        let p = &self.params;
        let mut xhat = x.clone();
        for mut row in xhat.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = (*v - mean[k]) / std[k];
            }
        }
        let gamma = &p[el.gamma.clone()];
        let beta = &p[el.beta.clone()];
        let mut xn = xhat.clone();
        for mut row in xn.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = *v * gamma[k] + beta[k];
            }
        }
        let w1 = mat(p, &el.w1, el.in_dim, d);
        let b1 = &p[el.b1.clone()];
        let mut a1 = xn.dot(&w1);
        for mut row in a1.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += b1[k];
            }
        }
        let r1 = relu(&a1);
        let w2 = mat(p, &el.w2, d, d);
        let b2 = &p[el.b2.clone()];
        let mut a2 = r1.dot(&w2);
        for mut row in a2.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += b2[k];
            }
        }
        let out = relu(&a2);
        (
            out,
            EmbCache {
                xhat,
                xn,
                a1,
                r1,
                a2,
            },
        )
    }

    fn embed_backward(&self, el: &EmbLayout, cache: &EmbCache, g_out: &Array2<f64>, grad: &mut [f64]) {
        let d = self.arch.d_hidden;
        let p = &self.params;
        let g_a2 = relu_mask_mul(g_out, &cache.a2);
        add_to(grad, &el.w2, &cache.r1.t().dot(&g_a2));
        add_to_1d(grad, &el.b2, &g_a2.sum_axis(Axis(0)));
        let w2 = mat(p, &el.w2, d, d);
        let g_r1 = g_a2.dot(&w2.t());
        let g_a1 = relu_mask_mul(&g_r1, &cache.a1);
        add_to(grad, &el.w1, &cache.xn.t().dot(&g_a1));
        add_to_1d(grad, &el.b1, &g_a1.sum_axis(Axis(0)));
        let w1 = mat(p, &el.w1, el.in_dim, d);
        let g_xn = g_a1.dot(&w1.t());
        // d gamma = sum rows (g_xn * xhat); d beta = column sums.
        add_to_1d(grad, &el.gamma, &(&g_xn * &cache.xhat).sum_axis(Axis(0)));
        add_to_1d(grad, &el.beta, &g_xn.sum_axis(Axis(0)));
    }

    fn hop_forward(
        &self,
        hl: &HopLayout,
        x_src: &Array2<f64>,
        x_tgt: &Array2<f64>,
        adj: &Adj,
    ) -> (Array2<f64>, HopCache) {
        let d = self.arch.d_hidden;
        let p = &self.params;
        let agg = adj.apply(x_src);
        let w_self = mat(p, &hl.w_self, d, d);
        let w_nbr = mat(p, &hl.w_nbr, d, d);
        let b = &p[hl.b.clone()];
        let mut pre = x_tgt.dot(&w_self) + agg.dot(&w_nbr);
        for mut row in pre.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += b[k];
            }
        }
        // Row-wise layer norm.
        let rows = pre.nrows();
        let mut ln_xhat = Array2::zeros((rows, d));
        let mut ln_inv = Array1::zeros(rows);
        let gamma = &p[hl.ln_g.clone()];
        let beta = &p[hl.ln_b.clone()];
        let mut ln_out = Array2::zeros((rows, d));
        for r in 0..rows {
            let row = pre.row(r);
            let mean = row.sum() / d as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let inv = 1.0 / (var + LN_EPS).sqrt();
            ln_inv[r] = inv;
            for k in 0..d {
                let xh = (row[k] - mean) * inv;
                ln_xhat[[r, k]] = xh;
                ln_out[[r, k]] = xh * gamma[k] + beta[k];
            }
        }
        let relu_out = relu(&ln_out);
        let w_out = mat(p, &hl.w_out, d, d);
        let b_out = &p[hl.b_out.clone()];
        let mut out = relu_out.dot(&w_out);
        for mut row in out.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v += b_out[k];
            }
        }
        (
            out,
            HopCache {
                x_src: x_src.clone(),
                x_tgt: x_tgt.clone(),
                agg,
                ln_xhat,
                ln_inv,
                ln_out,
                relu_out,
            },
        )
    }

    /// Returns (g_src, g_tgt).
    fn hop_backward(
        &self,
        hl: &HopLayout,
        cache: &HopCache,
        adj: &Adj,
        g_out: &Array2<f64>,
        grad: &mut [f64],
    ) -> (Array2<f64>, Array2<f64>) {
        let d = self.arch.d_hidden;
        let p = &self.params;
        add_to(grad, &hl.w_out, &cache.relu_out.t().dot(g_out));
        add_to_1d(grad, &hl.b_out, &g_out.sum_axis(Axis(0)));
        let w_out = mat(p, &hl.w_out, d, d);
        let g_relu = g_out.dot(&w_out.t());
        let g_ln_out = relu_mask_mul(&g_relu, &cache.ln_out);

        // Layer-norm backward.
        let gamma = &p[hl.ln_g.clone()];
        add_to_1d(grad, &hl.ln_g, &(&g_ln_out * &cache.ln_xhat).sum_axis(Axis(0)));
        add_to_1d(grad, &hl.ln_b, &g_ln_out.sum_axis(Axis(0)));
        let rows = g_ln_out.nrows();
        let mut g_pre = Array2::zeros((rows, d));
        for r in 0..rows {
            let inv = cache.ln_inv[r];
            let mut gxh = vec![0.0f64; d];
            let mut mean_gxh = 0.0;
            let mut mean_gxh_xh = 0.0;
            for k in 0..d {
                let v = g_ln_out[[r, k]] * gamma[k];
                gxh[k] = v;
                mean_gxh += v;
                mean_gxh_xh += v * cache.ln_xhat[[r, k]];
            }
            mean_gxh /= d as f64;
            mean_gxh_xh /= d as f64;
            for k in 0..d {
                g_pre[[r, k]] =
                    inv * (gxh[k] - mean_gxh - cache.ln_xhat[[r, k]] * mean_gxh_xh);
            }
        }

        add_to(grad, &hl.w_self, &cache.x_tgt.t().dot(&g_pre));
        add_to(grad, &hl.w_nbr, &cache.agg.t().dot(&g_pre));
        add_to_1d(grad, &hl.b, &g_pre.sum_axis(Axis(0)));
        let w_self = mat(p, &hl.w_self, d, d);
        let w_nbr = mat(p, &hl.w_nbr, d, d);
        let g_tgt = g_pre.dot(&w_self.t());
        let g_agg = g_pre.dot(&w_nbr.t());
        let g_src = adj.apply_transpose(&g_agg);
        (g_src, g_tgt)
    }

    fn attn_forward(
        &self,
        x: &Array2<f64>,
        dropout: Option<(f64, &mut ChaCha8Rng)>,
    ) -> (Array2<f64>, AttnCache) {
        let d = self.arch.d_hidden;
        let h = self.arch.n_heads;
        let dh = d / h;
        let p = &self.params;
        let al = &self.layout.attn;
        let q = x.dot(&mat(p, &al.wq, d, d));
        let k = x.dot(&mat(p, &al.wk, d, d));
        let v = x.dot(&mat(p, &al.wv, d, d));
        let rows = x.nrows();
        let mut o = Array2::zeros((rows, d));
        let mut probs = Vec::with_capacity(h);
        let mut masks: Option<Vec<Array2<f64>>> = dropout.is_some().then(Vec::new);
        let mut dropout = dropout;
        for head in 0..h {
            let cols = head * dh..(head + 1) * dh;
            let qh = q.slice(ndarray::s![.., cols.clone()]);
            let kh = k.slice(ndarray::s![.., cols.clone()]);
            let vh = v.slice(ndarray::s![.., cols.clone()]);
            let mut scores = qh.dot(&kh.t());
            scores.mapv_inplace(|s| s / (dh as f64).sqrt());
            // Row softmax, stable.
            let mut prob = scores;
            for mut row in prob.rows_mut() {
                let mx = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut z = 0.0;
                for v in row.iter_mut() {
                    *v = (*v - mx).exp();
                    z += *v;
                }
                for v in row.iter_mut() {
                    *v /= z;
                }
            }
            let applied = if let Some((rate, rng)) = dropout.as_mut() {
                let mut mask = Array2::zeros(prob.raw_dim());
                for mv in mask.iter_mut() {
                    *mv = if rng.gen_bool(*rate) {
                        0.0
                    } else {
                        1.0 / (1.0 - *rate)
                    };
                }
                let dropped = &prob * &mask;
                masks.as_mut().unwrap().push(mask);
                dropped
            } else {
                prob.clone()
            };
            let oh = applied.dot(&vh);
            o.slice_mut(ndarray::s![.., cols]).assign(&oh);
            probs.push(prob);
        }
        let mut out = o.dot(&mat(p, &al.wo, d, d));
        let bo = &p[al.bo.clone()];
        for mut row in out.rows_mut() {
            for (kk, vv) in row.iter_mut().enumerate() {
                *vv += bo[kk];
            }
        }
        let res = &out + x;
        (
            res,
            AttnCache {
                input: x.clone(),
                q,
                k,
                v,
                probs,
                masks,
                o,
            },
        )
    }

    fn attn_backward(&self, cache: &AttnCache, g_res: &Array2<f64>, grad: &mut [f64]) -> Array2<f64> {
        let d = self.arch.d_hidden;
        let h = self.arch.n_heads;
        let dh = d / h;
        let p = &self.params;
        let al = &self.layout.attn;
        let mut g_x = g_res.clone(); // residual path
        let g_out = g_res;
        add_to(grad, &al.wo, &cache.o.t().dot(g_out));
        add_to_1d(grad, &al.bo, &g_out.sum_axis(Axis(0)));
        let g_o = g_out.dot(&mat(p, &al.wo, d, d).t());

        let rows = cache.input.nrows();
        let mut g_q = Array2::zeros((rows, d));
        let mut g_k = Array2::zeros((rows, d));
        let mut g_v = Array2::zeros((rows, d));
        for head in 0..h {
            let cols = head * dh..(head + 1) * dh;
            let qh = cache.q.slice(ndarray::s![.., cols.clone()]);
            let kh = cache.k.slice(ndarray::s![.., cols.clone()]);
            let vh = cache.v.slice(ndarray::s![.., cols.clone()]);
            let g_oh = g_o.slice(ndarray::s![.., cols.clone()]);
            let prob = &cache.probs[head];
            let applied = match &cache.masks {
                Some(masks) => prob * &masks[head],
                None => prob.clone(),
            };
            let g_applied = g_oh.dot(&vh.t());
            let g_vh = applied.t().dot(&g_oh);
            let g_prob = match &cache.masks {
                Some(masks) => &g_applied * &masks[head],
                None => g_applied,
            };
            // Softmax backward per row.
            let mut g_scores = Array2::zeros(prob.raw_dim());
            for r in 0..rows {
                let dot: f64 = (0..rows).map(|c| g_prob[[r, c]] * prob[[r, c]]).sum();
                for c in 0..rows {
                    g_scores[[r, c]] = prob[[r, c]] * (g_prob[[r, c]] - dot);
                }
            }
            g_scores.mapv_inplace(|v| v / (dh as f64).sqrt());
            let g_qh = g_scores.dot(&kh);
            let g_kh = g_scores.t().dot(&qh);
            g_q.slice_mut(ndarray::s![.., cols.clone()]).assign(&g_qh);
            g_k.slice_mut(ndarray::s![.., cols.clone()]).assign(&g_kh);
            g_v.slice_mut(ndarray::s![.., cols]).assign(&g_vh);
        }
        add_to(grad, &al.wq, &cache.input.t().dot(&g_q));
        add_to(grad, &al.wk, &cache.input.t().dot(&g_k));
        add_to(grad, &al.wv, &cache.input.t().dot(&g_v));
        g_x = g_x
            + g_q.dot(&mat(p, &al.wq, d, d).t())
            + g_k.dot(&mat(p, &al.wk, d, d).t())
            + g_v.dot(&mat(p, &al.wv, d, d).t());
        g_x
    }

    fn forward_impl(
        &self,
        g: &TripletGraph,
        dropout: Option<(f64, &mut ChaCha8Rng)>,
    ) -> (f64, Cache) {
        let d = self.arch.d_hidden;
        let adj = GraphAdj::new(g);
        let l = &self.layout;
        let (v0, emb_v) = self.embed_forward(&l.emb_v, &g.v_feats, &self.stats.v_mean, &self.stats.v_std);
        let (c0, emb_c) = self.embed_forward(&l.emb_c, &g.c_feats, &self.stats.c_mean, &self.stats.c_std);
        let (s0, emb_s) = self.embed_forward(&l.emb_s, &g.s_feats, &self.stats.s_mean, &self.stats.s_std);

        let adjs: Vec<Adj> = HOP_KINDS.iter().map(|&k| adj.hop(k)).collect();
        let (c1, h1) = self.hop_forward(&l.hops[0], &v0, &c0, &adjs[0]);
        let (v1, h2) = self.hop_forward(&l.hops[1], &c1, &v0, &adjs[1]);
        let (v2, h3) = self.hop_forward(&l.hops[2], &s0, &v1, &adjs[2]);
        let (s1, h4) = self.hop_forward(&l.hops[3], &v2, &s0, &adjs[3]);
        let (c2, h5) = self.hop_forward(&l.hops[4], &s1, &c1, &adjs[4]);
        let (s2, h6) = self.hop_forward(&l.hops[5], &c2, &s1, &adjs[5]);
        let (s3, attn) = self.attn_forward(&s2, dropout);

        // Global mean pooling and the scalar head.
        let pool = |x: &Array2<f64>| x.sum_axis(Axis(0)) / x.nrows().max(1) as f64;
        let (pv, pc, ps) = (pool(&v2), pool(&c2), pool(&s3));
        let mut z = Array1::zeros(3 * d);
        z.slice_mut(ndarray::s![0..d]).assign(&pv);
        z.slice_mut(ndarray::s![d..2 * d]).assign(&pc);
        z.slice_mut(ndarray::s![2 * d..3 * d]).assign(&ps);
        let p = &self.params;
        let hw1 = mat(p, &l.head.w1, 3 * d, d);
        let hb1 = &p[l.head.b1.clone()];
        let mut a1 = z.dot(&hw1);
        for (k, v) in a1.iter_mut().enumerate() {
            *v += hb1[k];
        }
        let r1 = a1.mapv(|v| v.max(0.0));
        let hw2 = &p[l.head.w2.clone()];
        let out: f64 = r1
            .iter()
            .zip(hw2)
            .map(|(a, w)| a * w)
            .sum::<f64>()
            + p[l.head.b2.clone()][0];

        let cache = Cache {
            emb_v,
            emb_c,
            emb_s,
            hops: vec![h1, h2, h3, h4, h5, h6],
            attn,
            head: HeadCache { z, a1, r1 },
            nv: g.num_vars(),
            nc: g.num_rows(),
        };
        (out, cache)
    }

    /// Scalar score; deterministic when `train_mode` is false. Dropout is
    /// active only in train mode, driven by the seed.
    pub fn forward(&self, g: &TripletGraph, train_mode: bool, seed: u64) -> f64 {
        if train_mode && self.arch.dropout > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4452_4f50);
            self.forward_impl(g, Some((self.arch.dropout, &mut rng))).0
        } else {
            self.forward_impl(g, None).0
        }
    }

    /// Exact reverse-mode gradient of the deterministic forward with respect
    /// to every parameter.
    pub fn gradient(&self, g: &TripletGraph) -> Vec<f64> {
        let (_, cache) = self.forward_impl(g, None);
        self.backward(g, &cache, 1.0)
    }

    /// Forward value and gradient in one pass (used by training).
    fn value_and_grad(
        &self,
        g: &TripletGraph,
        dropout: Option<(f64, &mut ChaCha8Rng)>,
    ) -> (f64, Vec<f64>) {
        let (out, cache) = self.forward_impl(g, dropout);
        let grad = self.backward(g, &cache, 1.0);
        (out, grad)
    }

    fn backward(&self, g: &TripletGraph, cache: &Cache, g_out: f64) -> Vec<f64> {
        let d = self.arch.d_hidden;
        let l = &self.layout;
        let p = &self.params;
        let mut grad = vec![0.0f64; l.total];

        // Head backward.
        let hb2_g = g_out;
        grad[l.head.b2.start] += hb2_g;
        let hw2 = &p[l.head.w2.clone()];
        let mut g_r1 = Array1::zeros(d);
        for k in 0..d {
            grad[l.head.w2.start + k] += cache.head.r1[k] * g_out;
            g_r1[k] = hw2[k] * g_out;
        }
        let mut g_a1 = g_r1;
        for k in 0..d {
            if cache.head.a1[k] <= 0.0 {
                g_a1[k] = 0.0;
            }
        }
        // dW1 = z^T g_a1 (outer product), db1 = g_a1, gz = W1 g_a1.
        let hw1 = mat(p, &l.head.w1, 3 * d, d);
        for r in 0..3 * d {
            for c in 0..d {
                grad[l.head.w1.start + r * d + c] += cache.head.z[r] * g_a1[c];
            }
        }
        add_to_1d(&mut grad, &l.head.b1, &g_a1);
        let g_z = hw1.dot(&g_a1);

        // Un-pool.
        let nv = cache.nv.max(1) as f64;
        let nc = cache.nc.max(1) as f64;
        let ns = NUM_SEPARATORS as f64;
        let broadcast = |slice: ndarray::ArrayView1<f64>, rows: usize, scale: f64| {
            let mut out = Array2::zeros((rows, d));
            for r in 0..rows {
                for c in 0..d {
                    out[[r, c]] = slice[c] / scale;
                }
            }
            out
        };
        let g_v2_pool = broadcast(g_z.slice(ndarray::s![0..d]), cache.nv, nv);
        let g_c2_pool = broadcast(g_z.slice(ndarray::s![d..2 * d]), cache.nc, nc);
        let g_s3 = broadcast(g_z.slice(ndarray::s![2 * d..3 * d]), NUM_SEPARATORS, ns);

        let adj = GraphAdj::new(g);
        let adjs: Vec<Adj> = HOP_KINDS.iter().map(|&k| adj.hop(k)).collect();

        let g_s2 = self.attn_backward(&cache.attn, &g_s3, &mut grad);
        let (g_c2_h6, g_s1_h6) =
            self.hop_backward(&l.hops[5], &cache.hops[5], &adjs[5], &g_s2, &mut grad);
        let g_c2 = &g_c2_pool + &g_c2_h6;
        let (g_s1_h5, g_c1_h5) =
            self.hop_backward(&l.hops[4], &cache.hops[4], &adjs[4], &g_c2, &mut grad);
        let g_s1 = &g_s1_h6 + &g_s1_h5;
        let (g_v2_h4, g_s0_h4) =
            self.hop_backward(&l.hops[3], &cache.hops[3], &adjs[3], &g_s1, &mut grad);
        let g_v2 = &g_v2_pool + &g_v2_h4;
        let (g_s0_h3, g_v1_h3) =
            self.hop_backward(&l.hops[2], &cache.hops[2], &adjs[2], &g_v2, &mut grad);
        let g_s0 = &g_s0_h4 + &g_s0_h3;
        let (g_c1_h2, g_v0_h2) =
            self.hop_backward(&l.hops[1], &cache.hops[1], &adjs[1], &g_v1_h3, &mut grad);
        let g_c1 = &g_c1_h5 + &g_c1_h2;
        let (g_v0_h1, g_c0_h1) =
            self.hop_backward(&l.hops[0], &cache.hops[0], &adjs[0], &g_c1, &mut grad);
        let g_v0 = &g_v0_h2 + &g_v0_h1;

        self.embed_backward(&l.emb_v, &cache.emb_v, &g_v0, &mut grad);
        self.embed_backward(&l.emb_c, &cache.emb_c, &g_c0_h1, &mut grad);
        self.embed_backward(&l.emb_s, &cache.emb_s, &g_s0, &mut grad);
        grad
    }

    /// Adaptive-moment SGD on the squared error against clipped rewards.
    /// Returns the per-epoch mean training loss. Normalization statistics
    /// freeze on the first call from the supplied buffer.
    pub fn fit(
        &mut self,
        buffer: &[(TripletGraph, f64)],
        opts: FitOptions,
    ) -> Result<Vec<f64>, ModelError> {
        if buffer.is_empty() {
            return Err(ModelError::EmptyBuffer);
        }
        if !self.stats.frozen {
            let graphs: Vec<&TripletGraph> = buffer.iter().map(|(g, _)| g).collect();
            self.freeze_stats(&graphs);
        }
        let n = self.param_count();
        let mut m = vec![0.0f64; n];
        let mut v = vec![0.0f64; n];
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
        let mut t = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4649_5421);
        let mut order: Vec<usize> = (0..buffer.len()).collect();
        let mut trace = Vec::with_capacity(opts.epochs);
        let mut step_counter = 0u64;
        for _epoch in 0..opts.epochs {
            // Fisher-Yates shuffle.
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let mut epoch_loss = 0.0;
            let mut seen = 0usize;
            for chunk in order.chunks(opts.batch_size.max(1)) {
                let mut grad_acc = vec![0.0f64; n];
                let mut batch_loss = 0.0;
                for &idx in chunk {
                    let (graph, target) = &buffer[idx];
                    step_counter += 1;
                    let (out, grad) = if self.arch.dropout > 0.0 {
                        let mut drng = ChaCha8Rng::seed_from_u64(
                            opts.seed ^ step_counter.wrapping_mul(0x9e3779b97f4a7c15),
                        );
                        self.value_and_grad(graph, Some((self.arch.dropout, &mut drng)))
                    } else {
                        self.value_and_grad(graph, None)
                    };
                    let resid = out - target;
                    batch_loss += resid * resid;
                    let scale = 2.0 * resid / chunk.len() as f64;
                    for (a, g) in grad_acc.iter_mut().zip(&grad) {
                        *a += scale * g;
                    }
                }
                epoch_loss += batch_loss;
                seen += chunk.len();
                t += 1;
                let bc1 = 1.0 - b1.powi(t as i32);
                let bc2 = 1.0 - b2.powi(t as i32);
                for k in 0..n {
                    m[k] = b1 * m[k] + (1.0 - b1) * grad_acc[k];
                    v[k] = b2 * v[k] + (1.0 - b2) * grad_acc[k] * grad_acc[k];
                    self.params[k] -= opts.lr * (m[k] / bc1) / ((v[k] / bc2).sqrt() + eps);
                }
            }
            trace.push(epoch_loss / seen.max(1) as f64);
        }
        Ok(trace)
    }

    /// Versioned JSON checkpoint (exact float round-trip).
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        #[derive(Serialize)]
        struct Checkpoint<'a> {
            format_version: u32,
            arch: &'a ArchConfig,
            arch_hash: u64,
            params: &'a [f64],
            stats: &'a InputStats,
        }
        let ck = Checkpoint {
            format_version: 1,
            arch: &self.arch,
            arch_hash: self.arch_hash(),
            params: &self.params,
            stats: &self.stats,
        };
        std::fs::write(path, serde_json::to_string(&ck).expect("net serializes")).map_err(|e| {
            ModelError::Io {
                path: path.display().to_string(),
                detail: e.to_string(),
            }
        })
    }

    /// Load a checkpoint, refusing architecture-hash mismatches.
    pub fn load(path: &Path) -> Result<RewardNet, ModelError> {
        #[derive(Deserialize)]
        struct Checkpoint {
            #[allow(dead_code)]
            format_version: u32,
            arch: ArchConfig,
            arch_hash: u64,
            params: Vec<f64>,
            stats: InputStats,
        }
        let body = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let ck: Checkpoint = serde_json::from_str(&body).map_err(|e| ModelError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let expected = ck.arch.hash();
        if ck.arch_hash != expected || ck.params.len() != build_layout(&ck.arch).total {
            return Err(ModelError::ArchMismatch {
                expected,
                found: ck.arch_hash,
            });
        }
        let layout = build_layout(&ck.arch);
        Ok(RewardNet {
            arch: ck.arch,
            layout,
            params: ck.params,
            stats: ck.stats,
        })
    }

    /// Range of the final output layer's parameters (weights and bias); the
    /// "last layer" restriction for the bandit's confidence matrix.
    pub fn head_output_range(&self) -> Range<usize> {
        self.layout.head.w2.start..self.layout.head.b2.end
    }

    /// Index of the scalar output bias.
    pub fn output_bias_index(&self) -> usize {
        self.layout.head.b2.start
    }
}
