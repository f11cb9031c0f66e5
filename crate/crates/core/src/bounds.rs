//! The three information-percolation upper bounds and their verification.
//!
//! For a uniform binary model with query (u, W):
//!
//! - the path-sum bound (series-parallel graphs, arbitrary channels) sums,
//!   over self-avoiding u-to-v paths, the product of per-edge chi-squared
//!   informations (the exact conditional information of a path model);
//! - the symmetric percolation bound (general graphs, symmetric channels)
//!   is the connection probability under per-edge open probability
//!   gamma(e) = per-edge chi-squared information;
//! - the SDPI percolation bound (general graphs, any channels, against the
//!   KL information) opens each edge with its SDPI constant instead.
//!
//! Applicability is explicit in the report rather than silently skipped:
//! each bound column carries a value or the reason it does not apply.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;
use core::fmt;

use num_traits::Zero;

use crate::budget::Budgets;
use crate::channel::ChannelError;
use crate::conn::{conn_exact_subsets, conn_monte_carlo, conn_sp_reliability, ConnError, McEstimate};
use crate::graph::{GraphError, MultiGraph};
use crate::info::{
    edge_gamma, exact_i2_conditional, exact_i2_conditional_set, exact_ikl_conditional_set,
    sdpi_chi2, InfoError,
};
use crate::model::{ModelError, SyncModel};
use crate::rational::{ratio_from_f64, ratio_to_f64, Rational};
use crate::sp::{enumerate_paths, sp_recognize, SpError, SpRecognition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    Model(ModelError),
    Graph(GraphError),
    Channel(ChannelError),
    Info(InfoError),
    Sp(SpError),
    Conn(ConnError),
    AsymmetricChannel(String),
    NotSeriesParallel,
    TerminalsMissing,
    SeedRequired,
    EmptyTargets,
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Model(e) => write!(f, "{e}"),
            BoundsError::Graph(e) => write!(f, "{e}"),
            BoundsError::Channel(e) => write!(f, "{e}"),
            BoundsError::Info(e) => write!(f, "{e}"),
            BoundsError::Sp(e) => write!(f, "{e}"),
            BoundsError::Conn(e) => write!(f, "{e}"),
            BoundsError::AsymmetricChannel(e) => {
                write!(f, "edge `{e}` has an asymmetric channel; bound not applicable")
            }
            BoundsError::NotSeriesParallel => write!(f, "graph is not series-parallel"),
            BoundsError::TerminalsMissing => write!(f, "model has no terminal pair"),
            BoundsError::SeedRequired => {
                write!(f, "graph too large for exact connectivity; Monte Carlo needs a seed")
            }
            BoundsError::EmptyTargets => write!(f, "target set W is empty"),
        }
    }
}

impl core::error::Error for BoundsError {}

impl From<ModelError> for BoundsError {
    fn from(e: ModelError) -> Self {
        BoundsError::Model(e)
    }
}
impl From<GraphError> for BoundsError {
    fn from(e: GraphError) -> Self {
        BoundsError::Graph(e)
    }
}
impl From<ChannelError> for BoundsError {
    fn from(e: ChannelError) -> Self {
        BoundsError::Channel(e)
    }
}
impl From<InfoError> for BoundsError {
    fn from(e: InfoError) -> Self {
        BoundsError::Info(e)
    }
}
impl From<SpError> for BoundsError {
    fn from(e: SpError) -> Self {
        BoundsError::Sp(e)
    }
}
impl From<ConnError> for BoundsError {
    fn from(e: ConnError) -> Self {
        BoundsError::Conn(e)
    }
}

/// How a Monte Carlo fallback, if needed, should be run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPolicy {
    pub trials: u64,
    pub seed: u64,
}

/// A connectivity value with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub enum ConnValue {
    ExactSubsets(Rational),
    SpReliability(Rational),
    MonteCarlo(McEstimate),
}

impl ConnValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ConnValue::ExactSubsets(r) | ConnValue::SpReliability(r) => Some(r),
            ConnValue::MonteCarlo(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ConnValue::ExactSubsets(r) | ConnValue::SpReliability(r) => ratio_to_f64(r),
            ConnValue::MonteCarlo(mc) => mc.estimate,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            ConnValue::ExactSubsets(_) => "exact-subsets",
            ConnValue::SpReliability(_) => "sp-reliability",
            ConnValue::MonteCarlo(_) => "monte-carlo",
        }
    }
}

/// Per-edge weights table of a bound report.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBoundRow {
    pub edge: String,
    pub gamma_i2: Rational,
    pub eta: f64,
    pub symmetric: bool,
}

/// Everything the bounds command reports for one (u, W) query.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub u: String,
    pub w: Vec<String>,
    pub exact_i2: Option<Rational>,
    pub exact_i2_note: Option<String>,
    pub ikl_bits: Option<f64>,
    pub path_sum: Option<Rational>,
    pub path_sum_note: Option<String>,
    pub symmetric_perc: Option<ConnValue>,
    pub symmetric_perc_note: Option<String>,
    pub sdpi_perc: Option<ConnValue>,
    pub sdpi_perc_note: Option<String>,
    pub edges: Vec<EdgeBoundRow>,
    pub theorem1_ok: Option<bool>,
    pub theorem2_ok: Option<bool>,
    pub theorem3_ok: Option<bool>,
}

/// Sum over self-avoiding u-to-v paths of the product of per-edge
/// chi-squared informations. Exact; uniform binary spins only.
pub fn path_sum_bound(
    model: &SyncModel,
    u: &str,
    v: &str,
    budgets: &Budgets,
) -> Result<Rational, BoundsError> {
    model.require_uniform_binary()?;
    let g = model.graph();
    let mut gamma: BTreeMap<String, Rational> = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        gamma.insert(e.id.clone(), edge_gamma(model.channel(i))?);
    }
    let paths = enumerate_paths(g, u, v, budgets)?;
    let mut total = Rational::zero();
    for p in &paths {
        let mut prod = Rational::from_integer(1.into());
        for id in p {
            prod *= &gamma[id];
        }
        total += prod;
    }
    Ok(total)
}

/// Outcome of checking the series-parallel path-sum bound on one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    pub exact_i2: Rational,
    pub path_sum: Rational,
    pub satisfied: bool,
    pub tight: bool,
}

/// Verifies exact I2 <= path-sum on a series-parallel model with terminals.
/// Arbitrary (possibly asymmetric) channels; exact rational comparison.
pub fn verify_theorem1(model: &SyncModel, budgets: &Budgets) -> Result<Theorem1Report, BoundsError> {
    model.require_uniform_binary()?;
    let g = model.graph();
    let (u, v) = g.terminal_names().ok_or(BoundsError::TerminalsMissing)?;
    match sp_recognize(g, u, v)? {
        SpRecognition::SeriesParallel(_) => {}
        SpRecognition::NotSeriesParallel => return Err(BoundsError::NotSeriesParallel),
    }
    let exact = exact_i2_conditional(model, u, v, None, budgets)?;
    let bound = path_sum_bound(model, u, v, budgets)?;
    Ok(Theorem1Report {
        satisfied: exact <= bound,
        tight: exact == bound,
        exact_i2: exact,
        path_sum: bound,
    })
}

/// Adds a fresh tie vertex joined to every vertex of `w`; the tie edges get
/// open probability 1, so two-terminal connectivity of (u, tie) equals the
/// one-to-set connectivity of (u, w).
pub fn augment_with_tie(
    g: &MultiGraph,
    w: &[&str],
    gamma: &BTreeMap<String, Rational>,
) -> Result<(MultiGraph, String, BTreeMap<String, Rational>), BoundsError> {
    let tie = g.fresh_vertex_id("sink");
    let mut vertices: Vec<String> = g.vertices().to_vec();
    vertices.push(tie.clone());
    let mut edges: Vec<(String, String, String)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                String::from(g.vertex_name(e.from)),
                String::from(g.vertex_name(e.to)),
            )
        })
        .collect();
    let mut gamma2 = gamma.clone();
    for name in w {
        g.vertex_id(name)?;
        let mut tie_id = format!("tie:{name}");
        while gamma2.contains_key(&tie_id) {
            tie_id.push('_');
        }
        edges.push((tie_id.clone(), (*name).to_string(), tie.clone()));
        gamma2.insert(tie_id, Rational::from_integer(1.into()));
    }
    let graph = MultiGraph::new(vertices, edges, None)?;
    Ok((graph, tie, gamma2))
}

/// Connectivity cascade: exact subsets within budget, else series-parallel
/// reliability (after tying W to one sink when needed), else Monte Carlo.
pub fn conn_cascade(
    g: &MultiGraph,
    gamma: &BTreeMap<String, Rational>,
    u: &str,
    w: &[&str],
    budgets: &Budgets,
    mc: Option<McPolicy>,
) -> Result<ConnValue, BoundsError> {
    if w.is_empty() {
        return Err(BoundsError::EmptyTargets);
    }
    if g.edge_count() as u32 <= budgets.max_subset_edges {
        return Ok(ConnValue::ExactSubsets(conn_exact_subsets(
            g, gamma, u, w, budgets,
        )?));
    }
    // reduce one-to-set to two-terminal, then try the SP recursion
    let (g2, tie, gamma2) = augment_with_tie(g, w, gamma)?;
    if let SpRecognition::SeriesParallel(tree) = sp_recognize(&g2, u, &tie)? {
        return Ok(ConnValue::SpReliability(conn_sp_reliability(
            &tree, &gamma2,
        )?));
    }
    let policy = mc.ok_or(BoundsError::SeedRequired)?;
    let gf: BTreeMap<String, f64> = gamma
        .iter()
        .map(|(k, v)| (k.clone(), ratio_to_f64(v)))
        .collect();
    Ok(ConnValue::MonteCarlo(conn_monte_carlo(
        g,
        &gf,
        u,
        w,
        policy.trials,
        policy.seed,
    )?))
}

/// The symmetric-channel percolation bound: connection probability with
/// gamma(e) = per-edge I2. Errors on any asymmetric channel — that bound
/// simply does not apply there, while the path-sum bound still may.
pub fn symmetric_percolation_bound(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    budgets: &Budgets,
    mc: Option<McPolicy>,
) -> Result<ConnValue, BoundsError> {
    model.require_uniform_binary()?;
    let g = model.graph();
    let mut gamma = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        let ch = model.channel(i);
        if ch.detect_symmetry()?.is_none() {
            return Err(BoundsError::AsymmetricChannel(e.id.clone()));
        }
        gamma.insert(e.id.clone(), edge_gamma(ch)?);
    }
    conn_cascade(g, &gamma, u, w, budgets, mc)
}

/// The SDPI percolation bound: connection probability with gamma(e) equal to
/// the per-edge SDPI constant (applies to any channels; bounds the KL
/// information). Eta values are floats; they are embedded exactly as dyadic
/// rationals so the connectivity itself is computed exactly.
pub fn sdpi_percolation_bound(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    budgets: &Budgets,
    mc: Option<McPolicy>,
) -> Result<(ConnValue, Vec<f64>), BoundsError> {
    model.require_uniform_binary()?;
    let g = model.graph();
    let mut gamma = BTreeMap::new();
    let mut etas = Vec::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        let eta = sdpi_chi2(model.channel(i))?.eta;
        etas.push(eta);
        let r = ratio_from_f64(eta).expect("eta is finite");
        gamma.insert(e.id.clone(), r);
    }
    Ok((conn_cascade(g, &gamma, u, w, budgets, mc)?, etas))
}

/// Assembles the full bound report for one query: exact values, each bound
/// or its inapplicability reason, the per-edge table, and verdict flags.
pub fn compute_bound_report(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    budgets: &Budgets,
    mc: Option<McPolicy>,
) -> Result<BoundReport, BoundsError> {
    model.require_uniform_binary()?;
    if w.is_empty() {
        return Err(BoundsError::EmptyTargets);
    }
    let g = model.graph();
    g.vertex_id(u)?;
    for name in w {
        g.vertex_id(name)?;
    }

    let mut edges = Vec::with_capacity(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        let ch = model.channel(i);
        edges.push(EdgeBoundRow {
            edge: e.id.clone(),
            gamma_i2: edge_gamma(ch)?,
            eta: sdpi_chi2(ch)?.eta,
            symmetric: ch.detect_symmetry()?.is_some(),
        });
    }

    let (exact_i2, exact_i2_note, ikl_bits) =
        match exact_i2_conditional_set(model, u, w, None, budgets) {
            Ok(r) => {
                let ikl = exact_ikl_conditional_set(model, u, w, None, budgets)?;
                (Some(r), None, Some(ikl.to_f64()))
            }
            Err(InfoError::Budget(b)) => (None, Some(format!("skipped: {b}")), None),
            Err(e) => return Err(e.into()),
        };

    // path-sum needs a single target and a series-parallel pair
    let (path_sum, path_sum_note) = if w.len() != 1 {
        (None, Some(String::from("n/a: W is not a single vertex")))
    } else {
        match sp_recognize(g, u, w[0])? {
            SpRecognition::SeriesParallel(_) => {
                match path_sum_bound(model, u, w[0], budgets) {
                    Ok(r) => (Some(r), None),
                    Err(BoundsError::Sp(SpError::Budget(b))) => {
                        (None, Some(format!("skipped: {b}")))
                    }
                    Err(e) => return Err(e),
                }
            }
            SpRecognition::NotSeriesParallel => {
                (None, Some(String::from("n/a: not series-parallel")))
            }
        }
    };

    let (symmetric_perc, symmetric_perc_note) =
        match symmetric_percolation_bound(model, u, w, budgets, mc) {
            Ok(v) => (Some(v), None),
            Err(BoundsError::AsymmetricChannel(e)) => {
                (None, Some(format!("n/a: asymmetric channel `{e}`")))
            }
            Err(BoundsError::SeedRequired) => (None, Some(String::from("skipped: needs seed"))),
            Err(e) => return Err(e),
        };

    let (sdpi_perc, sdpi_perc_note) = match sdpi_percolation_bound(model, u, w, budgets, mc) {
        Ok((v, _)) => (Some(v), None),
        Err(BoundsError::SeedRequired) => (None, Some(String::from("skipped: needs seed"))),
        Err(e) => return Err(e),
    };

    let theorem1_ok = match (&exact_i2, &path_sum) {
        (Some(x), Some(b)) => Some(x <= b),
        _ => None,
    };
    let theorem2_ok = match (&exact_i2, &symmetric_perc) {
        (Some(x), Some(c)) => c.exact().map(|r| x <= r),
        _ => None,
    };
    // Theorem 3 bounds the KL information; allow float slack
    let theorem3_ok = match (&ikl_bits, &sdpi_perc) {
        (Some(kl), Some(c)) => Some(*kl <= c.to_f64() + 1e-6),
        _ => None,
    };

    Ok(BoundReport {
        u: String::from(u),
        w: w.iter().map(|s| s.to_string()).collect(),
        exact_i2,
        exact_i2_note,
        ikl_bits,
        path_sum,
        path_sum_note,
        symmetric_perc,
        symmetric_perc_note,
        sdpi_perc,
        sdpi_perc_note,
        edges,
        theorem1_ok,
        theorem2_ok,
        theorem3_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bernoulli_pair, make_bsc, noiseless};
    use crate::rational::rat;
    use alloc::vec;

    fn budgets() -> Budgets {
        Budgets::default()
    }

    fn parallel_pair(eps: Rational) -> SyncModel {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![
                ("e".into(), "u".into(), "v".into()),
                ("f".into(), "u".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&eps).unwrap());
        chans.insert("f".into(), make_bsc(&eps).unwrap());
        SyncModel::uniform_z2(g, chans).unwrap()
    }

    fn triangle_bsc(eps: Rational) -> SyncModel {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "v".into(), "w".into()),
                ("e3".into(), "w".into(), "u".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        for id in ["e1", "e2", "e3"] {
            chans.insert(id.into(), make_bsc(&eps).unwrap());
        }
        SyncModel::uniform_z2(g, chans).unwrap()
    }

    #[test]
    fn path_sum_on_parallel_pair() {
        let m = parallel_pair(rat(1, 4));
        let b = path_sum_bound(&m, "u", "v", &budgets()).unwrap();
        assert_eq!(b, rat(1, 2)); // 1/4 + 1/4
        let rep = verify_theorem1(&m, &budgets()).unwrap();
        assert_eq!(rep.exact_i2, rat(2, 5));
        assert!(rep.satisfied);
        assert!(!rep.tight);
    }

    #[test]
    fn path_sum_on_triangle() {
        let m = triangle_bsc(rat(1, 4));
        let b = path_sum_bound(&m, "u", "v", &budgets()).unwrap();
        // (1-2e)^2 + (1-2e)^4 with e = 1/4
        assert_eq!(b, rat(1, 4) + rat(1, 16));
        let rep = verify_theorem1(&m, &budgets()).unwrap();
        assert!(rep.satisfied);
    }

    #[test]
    fn theorem1_tight_on_single_path() {
        let g = MultiGraph::new(
            vec!["u".into(), "w".into(), "v".into()],
            vec![
                ("e1".into(), "u".into(), "w".into()),
                ("e2".into(), "w".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e1".into(), make_bernoulli_pair(&rat(3, 1), &rat(1, 1), 8).unwrap());
        chans.insert("e2".into(), make_bsc(&rat(1, 5)).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let rep = verify_theorem1(&m, &budgets()).unwrap();
        assert!(rep.satisfied);
        assert!(rep.tight, "single path: Lemma-9 equality");
    }

    #[test]
    fn theorem1_tight_on_noiseless_chain() {
        let g = MultiGraph::new(
            vec!["u".into(), "w".into(), "v".into()],
            vec![
                ("e1".into(), "u".into(), "w".into()),
                ("e2".into(), "w".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e1".into(), noiseless());
        chans.insert("e2".into(), noiseless());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let rep = verify_theorem1(&m, &budgets()).unwrap();
        assert_eq!(rep.exact_i2, rat(1, 1));
        assert_eq!(rep.path_sum, rat(1, 1));
        assert!(rep.tight);
    }

    #[test]
    fn theorem1_zero_when_every_path_blocked() {
        // independent edge on every path
        let m = {
            let g = MultiGraph::new(
                vec!["u".into(), "w".into(), "v".into()],
                vec![
                    ("e1".into(), "u".into(), "w".into()),
                    ("e2".into(), "w".into(), "v".into()),
                ],
                Some(("u".into(), "v".into())),
            )
            .unwrap();
            let mut chans = BTreeMap::new();
            chans.insert("e1".into(), make_bsc(&rat(1, 2)).unwrap());
            chans.insert("e2".into(), make_bsc(&rat(1, 5)).unwrap());
            SyncModel::uniform_z2(g, chans).unwrap()
        };
        let rep = verify_theorem1(&m, &budgets()).unwrap();
        assert_eq!(rep.exact_i2, rat(0, 1));
        assert_eq!(rep.path_sum, rat(0, 1));
    }

    #[test]
    fn symmetric_bound_on_parallel_pair() {
        let m = parallel_pair(rat(1, 4));
        let c = symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        // 1 - (1 - 1/4)^2 = 7/16, and exact I2 = 2/5 <= 7/16
        assert_eq!(c.exact().unwrap(), &rat(7, 16));
        assert!(rat(2, 5) <= rat(7, 16));
    }

    #[test]
    fn symmetric_bound_tight_on_tree_single_leaf() {
        let g = MultiGraph::new(
            vec!["u".into(), "m".into(), "v".into()],
            vec![
                ("e1".into(), "u".into(), "m".into()),
                ("e2".into(), "m".into(), "v".into()),
            ],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e1".into(), make_bsc(&rat(1, 10)).unwrap());
        chans.insert("e2".into(), make_bsc(&rat(1, 4)).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let c = symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        let exact = exact_i2_conditional(&m, "u", "v", None, &budgets()).unwrap();
        assert_eq!(c.exact().unwrap(), &exact); // product along the unique path
        assert_eq!(exact, rat(16, 25) * rat(1, 4));
    }

    #[test]
    fn symmetric_bound_rejects_asymmetric_channels() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bernoulli_pair(&rat(3, 1), &rat(1, 1), 10).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        assert!(matches!(
            symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None),
            Err(BoundsError::AsymmetricChannel(_))
        ));
    }

    #[test]
    fn noiseless_graph_bound_is_one() {
        let m = parallel_pair(rat(0, 1));
        let c = symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        assert_eq!(c.exact().unwrap(), &rat(1, 1));
    }

    #[test]
    fn sdpi_matches_symmetric_bound_for_symmetric_channels() {
        let m = triangle_bsc(rat(1, 5));
        let sym = symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        let (sdpi, etas) = sdpi_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        for eta in etas {
            let gamma = ratio_to_f64(&rat(9, 25));
            assert!((eta - gamma).abs() < 1e-9);
        }
        assert!((sym.to_f64() - sdpi.to_f64()).abs() < 1e-6);
    }

    #[test]
    fn sdpi_bound_on_noiseless_edge_is_one() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), noiseless());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let (c, _) = sdpi_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
        assert!((c.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corollary_ordering_symmetric_perc_below_path_sum() {
        // union bound over paths: conn <= sum of per-path products
        for eps in [rat(1, 4), rat(1, 10), rat(2, 5)] {
            let m = triangle_bsc(eps);
            let c = symmetric_percolation_bound(&m, "u", &["v"], &budgets(), None).unwrap();
            let ps = path_sum_bound(&m, "u", "v", &budgets()).unwrap();
            assert!(c.exact().unwrap() <= &ps);
        }
    }

    #[test]
    fn report_covers_applicability() {
        // asymmetric SP model: theorem 1 applies, theorem 2 does not
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![
                ("e".into(), "u".into(), "v".into()),
                ("f".into(), "u".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bernoulli_pair(&rat(3, 1), &rat(1, 1), 10).unwrap());
        chans.insert("f".into(), make_bsc(&rat(1, 4)).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let rep = compute_bound_report(&m, "u", &["v"], &budgets(), None).unwrap();
        assert!(rep.exact_i2.is_some());
        assert!(rep.path_sum.is_some());
        assert_eq!(rep.theorem1_ok, Some(true));
        assert!(rep.symmetric_perc.is_none());
        assert!(rep.symmetric_perc_note.unwrap().contains("asymmetric"));
        assert!(rep.sdpi_perc.is_some());
        assert_eq!(rep.theorem3_ok, Some(true));
        assert_eq!(rep.edges.len(), 2);
        assert!(!rep.edges[0].symmetric);
        assert!(rep.edges[1].symmetric);
    }

    #[test]
    fn report_on_k4_has_no_path_sum() {
        let vs: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let pairs = [
            ("a", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "d"),
        ];
        let es = pairs
            .iter()
            .enumerate()
            .map(|(i, (x, y))| (format!("e{i}"), x.to_string(), y.to_string()))
            .collect();
        let g = MultiGraph::new(vs, es, None).unwrap();
        let mut chans = BTreeMap::new();
        for i in 0..6 {
            chans.insert(format!("e{i}"), make_bsc(&rat(1, 4)).unwrap());
        }
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let rep = compute_bound_report(&m, "a", &["d"], &budgets(), None).unwrap();
        assert!(rep.path_sum.is_none());
        assert!(rep.path_sum_note.unwrap().contains("not series-parallel"));
        assert!(rep.sdpi_perc.is_some());
        assert_eq!(rep.theorem2_ok, Some(true));
        assert_eq!(rep.theorem3_ok, Some(true));
    }

    #[test]
    fn set_query_uses_multi_target_connectivity() {
        // star with two leaves: I2(u; {w1,w2}) <= 1 - (1-gamma)^2
        let g = MultiGraph::new(
            vec!["r".into(), "w1".into(), "w2".into()],
            vec![
                ("e1".into(), "r".into(), "w1".into()),
                ("e2".into(), "r".into(), "w2".into()),
            ],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e1".into(), make_bsc(&rat(1, 10)).unwrap());
        chans.insert("e2".into(), make_bsc(&rat(1, 10)).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let rep = compute_bound_report(&m, "r", &["w1", "w2"], &budgets(), None).unwrap();
        let gamma = rat(16, 25);
        let conn = rat(1, 1) - (rat(1, 1) - &gamma) * (rat(1, 1) - &gamma);
        assert_eq!(
            rep.symmetric_perc.as_ref().unwrap().exact().unwrap(),
            &conn
        );
        assert_eq!(rep.theorem2_ok, Some(true));
        // set queries have no path-sum column
        assert!(rep.path_sum.is_none());
    }
}
