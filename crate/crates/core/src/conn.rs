//! Two-terminal and one-to-set bond percolation connectivity.
//!
//! Three routes, exact to approximate:
//! - subset enumeration over all 2^|E| open/closed patterns (exact, capped);
//! - the series-parallel reliability recursion over a decomposition tree
//!   (exact, linear in |E|, series multiplies and parallel complements);
//! - Monte Carlo with a counter-based generator, bit-reproducible for a
//!   fixed seed under any partition of the trial range.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Float, One, Zero};

use crate::budget::{BudgetExceeded, Budgets};
use crate::graph::{GraphError, MultiGraph};
use crate::rational::{is_probability, Rational};
use crate::rng;
use crate::sp::SpTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnError {
    Graph(GraphError),
    Budget(BudgetExceeded),
    MissingGamma(String),
    GammaOutOfRange(String),
    ZeroTrials,
    EmptyTargets,
}

impl fmt::Display for ConnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnError::Graph(e) => write!(f, "{e}"),
            ConnError::Budget(e) => write!(f, "{e}"),
            ConnError::MissingGamma(e) => write!(f, "no open probability for edge `{e}`"),
            ConnError::GammaOutOfRange(e) => {
                write!(f, "open probability for edge `{e}` outside [0,1]")
            }
            ConnError::ZeroTrials => write!(f, "trials must be >= 1"),
            ConnError::EmptyTargets => write!(f, "target vertex set is empty"),
        }
    }
}

impl core::error::Error for ConnError {}

impl From<GraphError> for ConnError {
    fn from(e: GraphError) -> Self {
        ConnError::Graph(e)
    }
}

fn gamma_vec(
    g: &MultiGraph,
    gamma: &BTreeMap<String, Rational>,
) -> Result<Vec<Rational>, ConnError> {
    g.edges()
        .iter()
        .map(|e| {
            let p = gamma
                .get(&e.id)
                .ok_or_else(|| ConnError::MissingGamma(e.id.clone()))?;
            if !is_probability(p) {
                return Err(ConnError::GammaOutOfRange(e.id.clone()));
            }
            Ok(p.clone())
        })
        .collect()
}

fn target_set(g: &MultiGraph, targets: &[&str]) -> Result<BTreeSet<usize>, ConnError> {
    if targets.is_empty() {
        return Err(ConnError::EmptyTargets);
    }
    let mut set = BTreeSet::new();
    for t in targets {
        set.insert(g.vertex_id(t)?);
    }
    Ok(set)
}

/// Exact connection probability by enumerating all open/closed patterns:
/// the probability that `u` lies in the same open component as some target.
pub fn conn_exact_subsets(
    g: &MultiGraph,
    gamma: &BTreeMap<String, Rational>,
    u: &str,
    targets: &[&str],
    budgets: &Budgets,
) -> Result<Rational, ConnError> {
    if g.edge_count() as u32 > budgets.max_subset_edges {
        return Err(ConnError::Budget(BudgetExceeded {
            what: String::from("subset percolation edges"),
            needed: g.edge_count() as u128,
            allowed: budgets.max_subset_edges as u128,
        }));
    }
    let ui = g.vertex_id(u)?;
    let tset = target_set(g, targets)?;
    let gv = gamma_vec(g, gamma)?;
    let mut open: Vec<usize> = Vec::with_capacity(g.edge_count());
    let mut acc = Rational::zero();
    branch(g, &gv, 0, &Rational::one(), &mut open, ui, &tset, &mut acc);
    Ok(acc)
}

/// Depth-first expansion over edge states; edges with probability 0 or 1
/// contribute a single branch.
#[allow(clippy::too_many_arguments)]
fn branch(
    g: &MultiGraph,
    gv: &[Rational],
    e: usize,
    weight: &Rational,
    open: &mut Vec<usize>,
    u: usize,
    targets: &BTreeSet<usize>,
    acc: &mut Rational,
) {
    if e == gv.len() {
        if g.connected_via(open, u, targets) {
            *acc += weight;
        }
        return;
    }
    let p = &gv[e];
    if !p.is_zero() {
        open.push(e);
        branch(g, gv, e + 1, &(weight * p), open, u, targets, acc);
        open.pop();
    }
    let q = Rational::one() - p;
    if !q.is_zero() {
        branch(g, gv, e + 1, &(weight * &q), open, u, targets, acc);
    }
}

/// Two-terminal reliability over a series-parallel decomposition:
/// series multiplies, parallel complements-and-multiplies. O(|E|).
pub fn conn_sp_reliability(
    tree: &SpTree,
    gamma: &BTreeMap<String, Rational>,
) -> Result<Rational, ConnError> {
    match tree {
        SpTree::Leaf { edge, .. } => {
            let p = gamma
                .get(edge)
                .ok_or_else(|| ConnError::MissingGamma(edge.clone()))?;
            if !is_probability(p) {
                return Err(ConnError::GammaOutOfRange(edge.clone()));
            }
            Ok(p.clone())
        }
        SpTree::Series { left, right, .. } => {
            Ok(conn_sp_reliability(left, gamma)? * conn_sp_reliability(right, gamma)?)
        }
        SpTree::Parallel { left, right } => {
            let l = conn_sp_reliability(left, gamma)?;
            let r = conn_sp_reliability(right, gamma)?;
            Ok(Rational::one() - (Rational::one() - l) * (Rational::one() - r))
        }
    }
}

/// A Monte Carlo connectivity estimate with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial 95% half-width, 1.96 sqrt(p(1-p)/n).
    pub half_width: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
    pub generator: &'static str,
}

/// Number of connected trials in the half-open trial range [lo, hi).
///
/// Each (trial, edge) pair addresses one counter-based draw, so partial
/// sums over a partition of the range reproduce the full-range count.
pub fn conn_mc_hits(
    g: &MultiGraph,
    gamma_f64: &BTreeMap<String, f64>,
    u: &str,
    targets: &[&str],
    seed: u64,
    lo: u64,
    hi: u64,
) -> Result<u64, ConnError> {
    let ui = g.vertex_id(u)?;
    let tset = target_set(g, targets)?;
    let gv: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| {
            let p = gamma_f64
                .get(&e.id)
                .ok_or_else(|| ConnError::MissingGamma(e.id.clone()))?;
            if !(0.0..=1.0).contains(p) {
                return Err(ConnError::GammaOutOfRange(e.id.clone()));
            }
            Ok(*p)
        })
        .collect::<Result<_, _>>()?;
    let mut hits = 0u64;
    let mut open = Vec::with_capacity(gv.len());
    for trial in lo..hi {
        let stream = rng::substream(seed, trial);
        open.clear();
        for (j, p) in gv.iter().enumerate() {
            if rng::unit_f64(rng::at(stream, j as u64)) < *p {
                open.push(j);
            }
        }
        if g.connected_via(&open, ui, &tset) {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Unbiased Monte Carlo estimate of the connection probability,
/// deterministic for fixed (seed, trials).
pub fn conn_monte_carlo(
    g: &MultiGraph,
    gamma_f64: &BTreeMap<String, f64>,
    u: &str,
    targets: &[&str],
    trials: u64,
    seed: u64,
) -> Result<McEstimate, ConnError> {
    if trials == 0 {
        return Err(ConnError::ZeroTrials);
    }
    let hits = conn_mc_hits(g, gamma_f64, u, targets, seed, 0, trials)?;
    Ok(mc_estimate_from_hits(hits, trials, seed))
}

/// Assembles the estimate from a (possibly merged) hit count.
pub fn mc_estimate_from_hits(hits: u64, trials: u64, seed: u64) -> McEstimate {
    let p = hits as f64 / trials as f64;
    let half_width = 1.96 * Float::sqrt(p * (1.0 - p) / trials as f64);
    McEstimate {
        estimate: p,
        half_width,
        hits,
        trials,
        seed,
        generator: rng::GENERATOR_NAME,
    }
}
