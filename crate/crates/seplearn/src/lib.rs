//! A self-contained branch-and-cut framework that learns which cutting-plane
//! separators to activate, per MILP instance and per separation round.
//!
//! The crate bundles everything needed to run the full loop at desk scale:
//!
//! * [`instances`] — MILP data model, five synthetic benchmark generators,
//!   JSON instance files, and a brute-force optimum oracle.
//! * [`lp`] — bounded-variable revised simplex with warm-started resolves
//!   after cut additions, plus a slow dense reference solver used as an
//!   independent oracle in tests.
//! * [`separators`] — eight cut separators, the cutpool, and cut scoring,
//!   selection, and validity checking. The 8-bit activation mask over these
//!   separators is the configuration space everything else optimizes over.
//! * [`bnc`] — the branch-and-cut engine with a per-round configuration
//!   schedule hook and deterministic effort accounting.
//! * [`metrics`] — relative improvement, clipped rewards, gap improvement,
//!   and the median/IQM/mean/std aggregation used in reports.
//! * [`subspace`] — data-driven restriction of the 256-element configuration
//!   space: reward tables, greedy submodular selection with an
//!   instance-agnostic performance filter, and trade-off diagnostics.
//! * [`model`] — the variable/constraint/separator triplet-graph encoding and
//!   a reward network with hand-written exact reverse-mode gradients.
//! * [`bandit`] — neural-UCB training, forward training across update steps,
//!   an epsilon-greedy ablation, and inference-time schedule construction.
//! * [`harness`] — experiment orchestration: datasets, baselines, pipeline
//!   checkpointing, and report generation.
//!
//! See the `examples/` directory for one runnable example per capability; the
//! thin `seplearn` binary exposes the same operations as subcommands for
//! batch runs.

pub mod bandit;
pub mod bnc;
pub mod harness;
pub mod instances;
pub mod lp;
pub mod metrics;
pub mod model;
pub mod separators;
pub mod subspace;
