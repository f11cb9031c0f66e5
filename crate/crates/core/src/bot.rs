//! Broadcasting on trees and its synchronization-model equivalent.
//!
//! In the broadcast model a uniform root spin propagates down the tree, each
//! edge flipping it independently with probability epsilon. The equivalent
//! synchronization-on-tree model keeps i.i.d. uniform vertex spins and
//! observes every edge through a BSC(epsilon); any f-mutual information
//! between the root and a vertex set agrees between the two descriptions,
//! which is what [`bot_equivalence_check`] verifies exactly.
//!
//! [`evans_subadditivity_check`] verifies the information subadditivity over
//! leaves, together with every equality step of the tied-tree chain that
//! re-derives it: conditioning removal, the noiseless-tie swap, dropping an
//! independent tie, widening the observation set to the full tree, and the
//! broadcast equivalence itself.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::budget::{BudgetExceeded, Budgets};
use crate::channel::make_bsc;
use crate::graph::{GraphError, MultiGraph};
use crate::info::{
    conditional_tuple_info, spins_vs_spins_and_observations_joint, FKind, InfoError, JointTable,
};
use crate::model::{ModelError, SyncModel};
use crate::rational::{is_probability, rat, ratio_from_f64, Rational};
use crate::sp::{tied_build_for_set, tree_path_edges, SpError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BotError {
    Graph(GraphError),
    Model(ModelError),
    Info(InfoError),
    Sp(SpError),
    Budget(BudgetExceeded),
    EpsilonOutOfRange,
    EmptyW,
    WContainsRoot,
}

impl fmt::Display for BotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BotError::Graph(e) => write!(f, "{e}"),
            BotError::Model(e) => write!(f, "{e}"),
            BotError::Info(e) => write!(f, "{e}"),
            BotError::Sp(e) => write!(f, "{e}"),
            BotError::Budget(e) => write!(f, "{e}"),
            BotError::EpsilonOutOfRange => write!(f, "epsilon must lie in [0,1]"),
            BotError::EmptyW => write!(f, "W must be nonempty"),
            BotError::WContainsRoot => write!(f, "W may not contain the root"),
        }
    }
}

impl core::error::Error for BotError {}

impl From<GraphError> for BotError {
    fn from(e: GraphError) -> Self {
        BotError::Graph(e)
    }
}
impl From<ModelError> for BotError {
    fn from(e: ModelError) -> Self {
        BotError::Model(e)
    }
}
impl From<InfoError> for BotError {
    fn from(e: InfoError) -> Self {
        BotError::Info(e)
    }
}
impl From<SpError> for BotError {
    fn from(e: SpError) -> Self {
        BotError::Sp(e)
    }
}
impl From<BudgetExceeded> for BotError {
    fn from(e: BudgetExceeded) -> Self {
        BotError::Budget(e)
    }
}

/// The broadcast law of (sigma_root, sigma_subset), by enumeration of all
/// spin assignments: P(sigma) = 1/2 * prod_edges (agree ? 1-eps : eps).
pub fn bot_joint(
    tree: &MultiGraph,
    root: &str,
    eps: &Rational,
    subset: &[&str],
    budgets: &Budgets,
) -> Result<JointTable, BotError> {
    if !is_probability(eps) {
        return Err(BotError::EpsilonOutOfRange);
    }
    if !tree.is_tree() {
        return Err(BotError::Graph(GraphError::NotATree));
    }
    if subset.is_empty() {
        return Err(BotError::EmptyW);
    }
    let ri = tree.vertex_id(root)?;
    let mut subs = Vec::with_capacity(subset.len());
    for s in subset {
        let si = tree.vertex_id(s)?;
        if si == ri {
            return Err(BotError::WContainsRoot);
        }
        subs.push(si);
    }
    let n = tree.vertex_count();
    let states = 1u128
        .checked_shl(n as u32)
        .filter(|s| *s <= budgets.max_states)
        .ok_or_else(|| BudgetExceeded {
            what: String::from("broadcast law enumeration"),
            needed: u128::MAX,
            allowed: budgets.max_states,
        })?;
    let _ = states;

    let keep = Rational::one() - eps;
    let half = rat(1, 2);
    let ncols = 1usize << subs.len();
    let mut table = vec![vec![Rational::zero(); ncols]; 2];
    for assign in 0u64..(1u64 << n) {
        let spin = |v: usize| -> u64 { (assign >> v) & 1 };
        let mut mass = half.clone();
        for e in tree.edges() {
            mass *= if spin(e.from) == spin(e.to) {
                &keep
            } else {
                eps
            };
        }
        let mut col = 0usize;
        for &s in &subs {
            col = (col << 1) | spin(s) as usize;
        }
        table[spin(ri) as usize][col] += mass;
    }
    let row_labels = vec![String::from("+1"), String::from("-1")];
    let col_labels = (0..ncols)
        .map(|c| {
            let spins: Vec<&str> = (0..subs.len())
                .map(|i| {
                    if (c >> (subs.len() - 1 - i)) & 1 == 0 {
                        "+1"
                    } else {
                        "-1"
                    }
                })
                .collect();
            format!("({})", spins.join(","))
        })
        .collect();
    JointTable::new(row_labels, col_labels, table, None).map_err(BotError::Info)
}

/// A broadcast instance: the explicit root-vs-leaves law and the equivalent
/// synchronization model with BSC(eps) edge channels.
#[derive(Debug, Clone)]
pub struct BotInstance {
    pub joint: JointTable,
    pub leaves: Vec<String>,
    pub model: SyncModel,
}

/// Builds both descriptions of the broadcast process on a tree, with
/// sigma_W ranging over the leaves.
pub fn bot_build(
    tree: &MultiGraph,
    root: &str,
    eps: &Rational,
    budgets: &Budgets,
) -> Result<BotInstance, BotError> {
    if !is_probability(eps) {
        return Err(BotError::EpsilonOutOfRange);
    }
    if !tree.is_tree() {
        return Err(BotError::Graph(GraphError::NotATree));
    }
    let leaves = crate::sp::tree_leaves(tree, root)?;
    if leaves.is_empty() {
        return Err(BotError::EmptyW);
    }
    let leaf_refs: Vec<&str> = leaves.iter().map(|s| s.as_str()).collect();
    let joint = bot_joint(tree, root, eps, &leaf_refs, budgets)?;
    let mut channels = BTreeMap::new();
    for e in tree.edges() {
        channels.insert(e.id.clone(), make_bsc(eps).map_err(InfoError::Channel)?);
    }
    let model = SyncModel::uniform_z2(tree.clone(), channels)?;
    Ok(BotInstance {
        joint,
        leaves,
        model,
    })
}

/// Both sides of the broadcast equivalence for one (tree, eps, W).
#[derive(Debug, Clone, PartialEq)]
pub struct BotEquivalenceReport {
    pub i2_broadcast: Rational,
    pub i2_sync: Rational,
    pub i2_equal: bool,
    pub kl_broadcast_hp: Rational,
    pub kl_sync_hp: Rational,
    pub kl_close: bool,
}

/// Verifies I(sigma_root; sigma_W) = I(X_root; X_W, Y) with exact equality
/// for chi-squared and 1e-9 closeness for KL. The synchronization side is
/// computed by the definitional joint (root spin against the (X_W, Y)
/// tuple), independent of the broadcast-law enumeration.
pub fn bot_equivalence_check(
    tree: &MultiGraph,
    root: &str,
    eps: &Rational,
    w: &[&str],
    budgets: &Budgets,
) -> Result<BotEquivalenceReport, BotError> {
    let bot = bot_joint(tree, root, eps, w, budgets)?;
    let mut channels = BTreeMap::new();
    for e in tree.edges() {
        channels.insert(e.id.clone(), make_bsc(eps).map_err(InfoError::Channel)?);
    }
    let model = SyncModel::uniform_z2(tree.clone(), channels)?;
    let sot = spins_vs_spins_and_observations_joint(&model, &[root], w, None, budgets)?;

    let i2_broadcast = bot.chi2_mi();
    let i2_sync = sot.chi2_mi();
    let kl_broadcast_hp = bot.kl_mi_bits_hp();
    let kl_sync_hp = sot.kl_mi_bits_hp();
    let tol = ratio_from_f64(1e-9).expect("finite");
    let kl_close = (&kl_broadcast_hp - &kl_sync_hp).abs() <= tol;
    Ok(BotEquivalenceReport {
        i2_equal: i2_broadcast == i2_sync,
        i2_broadcast,
        i2_sync,
        kl_broadcast_hp,
        kl_sync_hp,
        kl_close,
    })
}

/// One verified equality (or inequality) link of the tied-tree chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub name: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

/// Subadditivity over W plus the step-by-step tied-tree chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EvansReport {
    pub i2_joint: Rational,
    pub i2_singles: Vec<(String, Rational)>,
    pub i2_sum: Rational,
    pub i2_holds: bool,
    pub kl_joint_hp: Rational,
    pub kl_singles_hp: Vec<Rational>,
    pub kl_sum_hp: Rational,
    pub kl_holds: bool,
    pub chain: Vec<ChainStep>,
    pub chain_ok: bool,
}

fn i2_of(v: crate::info::InfoValue) -> Rational {
    match v {
        crate::info::InfoValue::Chi2(r) => r,
        crate::info::InfoValue::KlBits(_) => unreachable!("asked for chi2"),
    }
}

/// Verifies I(sigma_root; sigma_W) <= sum_w I(sigma_root; sigma_w), exactly
/// for chi-squared and within 1e-9 for KL, and checks each equality step of
/// the tied-tree derivation numerically.
pub fn evans_subadditivity_check(
    tree: &MultiGraph,
    root: &str,
    eps: &Rational,
    w: &[&str],
    budgets: &Budgets,
) -> Result<EvansReport, BotError> {
    if w.is_empty() {
        return Err(BotError::EmptyW);
    }
    let joint = bot_joint(tree, root, eps, w, budgets)?;
    let i2_joint = joint.chi2_mi();
    let kl_joint_hp = joint.kl_mi_bits_hp();

    let mut i2_singles = Vec::new();
    let mut kl_singles_hp = Vec::new();
    let mut i2_sum = Rational::zero();
    let mut kl_sum_hp = Rational::zero();
    for name in w {
        let single = bot_joint(tree, root, eps, &[name], budgets)?;
        let i2 = single.chi2_mi();
        let kl = single.kl_mi_bits_hp();
        i2_sum += &i2;
        kl_sum_hp += &kl;
        i2_singles.push((name.to_string(), i2));
        kl_singles_hp.push(kl);
    }
    let tol = ratio_from_f64(1e-9).expect("finite");
    let i2_holds = i2_joint <= i2_sum;
    let kl_holds = kl_joint_hp <= &kl_sum_hp + &tol;

    // The tied-tree chain. Build the full-tree sync model and the tied model
    // on the pruned union of root-to-W paths.
    let mut channels = BTreeMap::new();
    for e in tree.edges() {
        channels.insert(e.id.clone(), make_bsc(eps).map_err(InfoError::Channel)?);
    }
    let full_model = SyncModel::uniform_z2(tree.clone(), channels.clone())?;
    let w_owned: Vec<String> = w.iter().map(|s| s.to_string()).collect();
    let tied_model = tied_build_for_set(tree, root, &w_owned, &channels, None)?;
    let (_, tied_name) = tied_model.graph().terminal_names().expect("tied terminals");
    let tied_name = String::from(tied_name);

    let mut chain: Vec<ChainStep> = Vec::new();
    let push_eq = |name: String, lhs: Rational, rhs: Rational, chain: &mut Vec<ChainStep>| {
        chain.push(ChainStep {
            name,
            holds: lhs == rhs,
            lhs,
            rhs,
        });
    };

    // conditioning removal on the tied graph:
    // I2(X_root; X_tied, Y_all) = I2(X_root; X_tied | Y_all)
    let lhs_joint =
        spins_vs_spins_and_observations_joint(&tied_model, &[root], &[&tied_name], None, budgets)?
            .chi2_mi();
    let rhs_cond = i2_of(conditional_tuple_info(
        &tied_model,
        &[root],
        &[&tied_name],
        None,
        FKind::Chi2,
        budgets,
    )?);
    push_eq(
        String::from("conditioning-removal"),
        lhs_joint.clone(),
        rhs_cond.clone(),
        &mut chain,
    );

    // per-leaf path steps
    let mut path_sum = Rational::zero();
    for name in w {
        let path = tree_path_edges(tree, root, name).map_err(BotError::Sp)?;
        let tie_edge = {
            // the tie edge incident to this leaf in the tied model
            let g = tied_model.graph();
            let wi = g.vertex_id(name)?;
            let ti = g.vertex_id(&tied_name)?;
            g.incident(wi)
                .into_iter()
                .map(|ei| g.edge(ei))
                .find(|e| e.from == ti || e.to == ti)
                .expect("leaf is tied")
                .id
                .clone()
        };
        let mut with_tie: Vec<&str> = path.iter().map(|s| s.as_str()).collect();
        with_tie.push(&tie_edge);

        // noiseless-tie swap: I2(X_root; X_tied | Y_path+tie) = I2(X_root; X_w | Y_path+tie)
        let a = i2_of(conditional_tuple_info(
            &tied_model,
            &[root],
            &[&tied_name],
            Some(&with_tie),
            FKind::Chi2,
            budgets,
        )?);
        let b = i2_of(conditional_tuple_info(
            &tied_model,
            &[root],
            &[name],
            Some(&with_tie),
            FKind::Chi2,
            budgets,
        )?);
        push_eq(format!("tie-swap[{name}]"), a.clone(), b.clone(), &mut chain);
        path_sum += &a;

        // independent-tie removal: = I2(X_root; X_w | Y_path)
        let path_refs: Vec<&str> = path.iter().map(|s| s.as_str()).collect();
        let c = i2_of(conditional_tuple_info(
            &tied_model,
            &[root],
            &[name],
            Some(&path_refs),
            FKind::Chi2,
            budgets,
        )?);
        push_eq(format!("tie-removal[{name}]"), b, c.clone(), &mut chain);

        // widening to the full tree: = I2(X_root; X_w | Y_E(T))
        let d = i2_of(conditional_tuple_info(
            &full_model,
            &[root],
            &[name],
            None,
            FKind::Chi2,
            budgets,
        )?);
        push_eq(format!("widen-to-tree[{name}]"), c, d.clone(), &mut chain);

        // conditioning removal on the tree: = I2(X_root; X_w, Y_E(T))
        let e = spins_vs_spins_and_observations_joint(&full_model, &[root], &[name], None, budgets)?
            .chi2_mi();
        push_eq(format!("tree-conditioning[{name}]"), d, e.clone(), &mut chain);

        // broadcast equivalence: = I2(sigma_root; sigma_w)
        let f = bot_joint(tree, root, eps, &[name], budgets)?.chi2_mi();
        push_eq(format!("broadcast-equivalence[{name}]"), e, f, &mut chain);
    }

    // the path-sum inequality of the series-parallel bound on the tied graph
    chain.push(ChainStep {
        name: String::from("path-subadditivity"),
        holds: rhs_cond <= path_sum,
        lhs: rhs_cond,
        rhs: path_sum,
    });

    // conclusion: the tied joint equals the broadcast joint
    push_eq(
        String::from("tied-equals-broadcast"),
        lhs_joint,
        i2_joint.clone(),
        &mut chain,
    );

    let chain_ok = chain.iter().all(|s| s.holds);
    Ok(EvansReport {
        i2_joint,
        i2_singles,
        i2_sum,
        i2_holds,
        kl_joint_hp,
        kl_singles_hp,
        kl_sum_hp,
        kl_holds,
        chain,
        chain_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn budgets() -> Budgets {
        Budgets::default()
    }

    fn path_tree(len: usize) -> MultiGraph {
        let mut vs = vec![String::from("r")];
        let mut es = Vec::new();
        let mut prev = String::from("r");
        for i in 0..len {
            let name = format!("p{i}");
            es.push((format!("e{i}"), prev.clone(), name.clone()));
            vs.push(name.clone());
            prev = name;
        }
        MultiGraph::new(vs, es, None).unwrap()
    }

    fn star_tree(k: usize) -> MultiGraph {
        let mut vs = vec![String::from("r")];
        let mut es = Vec::new();
        for i in 0..k {
            let name = format!("w{i}");
            es.push((format!("e{i}"), String::from("r"), name.clone()));
            vs.push(name);
        }
        MultiGraph::new(vs, es, None).unwrap()
    }

    #[test]
    fn depth_one_broadcast_is_a_bsc() {
        let tree = path_tree(1);
        let inst = bot_build(&tree, "r", &rat(1, 5), &budgets()).unwrap();
        assert_eq!(inst.leaves, vec!["p0"]);
        // joint is the BSC joint: diag 2/5, off-diag 1/10
        assert_eq!(inst.joint.p[0][0], rat(2, 5));
        assert_eq!(inst.joint.p[0][1], rat(1, 10));
        assert_eq!(inst.joint.chi2_mi(), rat(9, 25));
    }

    #[test]
    fn depth_two_path_multiplies_biases() {
        let tree = path_tree(2);
        let joint = bot_joint(&tree, "r", &rat(1, 10), &["p1"], &budgets()).unwrap();
        // I2 = delta^4 = (4/5)^4
        assert_eq!(joint.chi2_mi(), rat(256, 625));
    }

    #[test]
    fn star_leaves_are_conditionally_independent_flips() {
        let tree = star_tree(3);
        let eps = rat(1, 5);
        let joint = bot_joint(&tree, "r", &eps, &["w0", "w1", "w2"], &budgets()).unwrap();
        // P(sigma_W | root=+1) factorizes into per-leaf flips
        let keep = rat(4, 5);
        let p_all_plus_given_plus = &joint.p[0][0] / rat(1, 2);
        assert_eq!(p_all_plus_given_plus, &keep * &keep * &keep);
    }

    #[test]
    fn equivalence_on_star_two_leaves() {
        let tree = star_tree(2);
        let rep = bot_equivalence_check(&tree, "r", &rat(1, 10), &["w0", "w1"], &budgets()).unwrap();
        assert!(rep.i2_equal, "{:?} vs {:?}", rep.i2_broadcast, rep.i2_sync);
        assert!(rep.kl_close);
    }

    #[test]
    fn equivalence_degenerate_epsilons() {
        let tree = star_tree(2);
        // eps = 1/2: everything independent, both sides zero
        let rep = bot_equivalence_check(&tree, "r", &rat(1, 2), &["w0", "w1"], &budgets()).unwrap();
        assert!(rep.i2_broadcast.is_zero());
        assert!(rep.i2_sync.is_zero());
        // eps = 0: perfect propagation, both sides one
        let rep0 = bot_equivalence_check(&tree, "r", &rat(0, 1), &["w0", "w1"], &budgets()).unwrap();
        assert_eq!(rep0.i2_broadcast, rat(1, 1));
        assert!(rep0.i2_equal);
        assert_eq!(rep0.kl_broadcast_hp, rat(1, 1));
    }

    #[test]
    fn evans_on_binary_depth_two() {
        // binary tree depth 2, all leaves
        let mut vs = vec![String::from("r")];
        let mut es = Vec::new();
        for c in 0..2 {
            let mid = format!("m{c}");
            es.push((format!("a{c}"), "r".into(), mid.clone()));
            vs.push(mid.clone());
            for l in 0..2 {
                let leaf = format!("l{c}{l}");
                es.push((format!("b{c}{l}"), mid.clone(), leaf.clone()));
                vs.push(leaf);
            }
        }
        let tree = MultiGraph::new(vs, es, None).unwrap();
        let rep = evans_subadditivity_check(
            &tree,
            "r",
            &rat(1, 5),
            &["l00", "l01", "l10", "l11"],
            &budgets(),
        )
        .unwrap();
        assert!(rep.i2_holds);
        assert!(rep.kl_holds);
        assert!(rep.chain_ok, "failed step: {:?}",
            rep.chain.iter().find(|s| !s.holds));
    }

    #[test]
    fn evans_single_w_is_equality() {
        let tree = path_tree(2);
        let rep = evans_subadditivity_check(&tree, "r", &rat(1, 5), &["p1"], &budgets()).unwrap();
        assert_eq!(rep.i2_joint, rep.i2_sum);
        assert!(rep.chain_ok);
    }

    #[test]
    fn evans_noiseless_is_one_vs_leaf_count() {
        let tree = star_tree(3);
        let rep = evans_subadditivity_check(
            &tree,
            "r",
            &rat(0, 1),
            &["w0", "w1", "w2"],
            &budgets(),
        )
        .unwrap();
        assert_eq!(rep.i2_joint, rat(1, 1));
        assert_eq!(rep.i2_sum, rat(3, 1));
        assert!(rep.i2_holds);
        assert!(rep.chain_ok);
    }

    #[test]
    fn evans_with_internal_w_vertex() {
        // W containing an internal vertex exercises the pruned tying
        let tree = path_tree(3);
        let rep =
            evans_subadditivity_check(&tree, "r", &rat(1, 5), &["p0", "p2"], &budgets()).unwrap();
        assert!(rep.i2_holds);
        assert!(rep.chain_ok, "failed step: {:?}",
            rep.chain.iter().find(|s| !s.holds));
    }

    #[test]
    fn rejects_bad_inputs() {
        let tree = path_tree(1);
        assert!(matches!(
            bot_joint(&tree, "r", &rat(3, 2), &["p0"], &budgets()),
            Err(BotError::EpsilonOutOfRange)
        ));
        assert!(matches!(
            bot_joint(&tree, "r", &rat(1, 5), &["r"], &budgets()),
            Err(BotError::WContainsRoot)
        ));
        let not_tree = MultiGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "a".into(), "b".into()),
            ],
            None,
        )
        .unwrap();
        assert!(matches!(
            bot_joint(&not_tree, "a", &rat(1, 5), &["b"], &budgets()),
            Err(BotError::Graph(GraphError::NotATree))
        ));
    }
}
