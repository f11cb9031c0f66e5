//! Exact toolkit for spin synchronization models on multigraphs.
//!
//! A spin synchronization model places independent group-valued labels on the
//! vertices of a graph and reveals, for every edge, a noisy channel observation
//! of the difference (for `Z2`: the product) of the endpoint labels. This crate
//! computes, with exact rational arithmetic wherever the quantity is rational:
//!
//! - chi-squared and KL mutual informations, joint and conditional, by direct
//!   enumeration of observation outcomes ([`info`]);
//! - channel algebra: series/parallel composition, sufficient-statistic output
//!   merging, and output-symmetry detection ([`channel`]);
//! - series-parallel recognition and decomposition of two-terminal multigraphs,
//!   self-avoiding path enumeration, tied-tree construction, and the collapse
//!   of a series-parallel model to a single equivalent edge channel ([`sp`]);
//! - two-terminal bond-percolation connectivity, exact and Monte Carlo ([`conn`]);
//! - the information-percolation upper bounds (path-sum over self-avoiding
//!   walks, symmetric-channel percolation, SDPI percolation) together with
//!   verification harnesses, broadcasting-on-trees reductions, counterexample
//!   instances and conjecture fuzzing ([`bounds`], [`bot`], [`experiments`],
//!   [`fuzz`]).
//!
//! The crate is `no_std` + `alloc`; everything is a pure function of its
//! inputs, all types are immutable after construction, and any stochastic
//! routine is a deterministic function of an explicit seed.

#![cfg_attr(not(test), no_std)]

extern crate alloc;



pub mod bot;
pub mod bounds;
pub mod budget;
pub mod channel;
pub mod conn;
pub mod experiments;
pub mod fuzz;


pub mod graph;
pub mod group;
pub mod info;
pub mod logfix;
pub mod model;
pub mod rational;
pub mod rng;
pub mod sp;

pub use budget::Budgets;
pub use channel::{make_bernoulli_pair, make_bsc, Channel};
pub use graph::MultiGraph;
pub use group::GroupSpec;
pub use model::{Prior, SyncModel};
pub use rational::{parse_ratio, rat, Rational};
