//! Series-parallel structure of two-terminal multigraphs.
//!
//! Recognition is by iterated reductions: parallel edge pairs merge, degree-2
//! non-terminal vertices contract, and the graph is series-parallel for the
//! terminal pair iff the process ends in a single terminal-to-terminal edge.
//! The reduction order is canonical (parallel merges exhausted before each
//! series contraction, edges scanned in id order) so the recorded tree is
//! deterministic.
//!
//! Also here: self-avoiding path enumeration, the tied-tree construction
//! (leaves joined to one new terminal by noiseless edges, which turns a tree
//! reconstruction problem into a two-terminal series-parallel one), and the
//! collapse of a series-parallel model into a single equivalent channel by
//! folding the decomposition tree through the channel algebra.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::budget::{BudgetExceeded, Budgets};
use crate::channel::{noiseless, Channel, ChannelError};
use crate::graph::{GraphError, MultiGraph};
use crate::model::{ModelError, SyncModel};

/// Decomposition tree of a two-terminal series-parallel multigraph.
///
/// Terminals are derived: a leaf is oriented source -> sink; a series node
/// runs left.source -> middle -> right.sink; a parallel node shares its
/// children's terminal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpTree {
    Leaf {
        edge: String,
        source: String,
        sink: String,
    },
    Series {
        left: Box<SpTree>,
        right: Box<SpTree>,
        middle: String,
    },
    Parallel {
        left: Box<SpTree>,
        right: Box<SpTree>,
    },
}

impl SpTree {
    pub fn source(&self) -> &str {
        match self {
            SpTree::Leaf { source, .. } => source,
            SpTree::Series { left, .. } => left.source(),
            SpTree::Parallel { left, .. } => left.source(),
        }
    }

    pub fn sink(&self) -> &str {
        match self {
            SpTree::Leaf { sink, .. } => sink,
            SpTree::Series { right, .. } => right.sink(),
            SpTree::Parallel { left, .. } => left.sink(),
        }
    }

    /// Swaps the roles of source and sink in the whole subtree.
    pub fn reverse(&self) -> SpTree {
        match self {
            SpTree::Leaf { edge, source, sink } => SpTree::Leaf {
                edge: edge.clone(),
                source: sink.clone(),
                sink: source.clone(),
            },
            SpTree::Series {
                left,
                right,
                middle,
            } => SpTree::Series {
                left: Box::new(right.reverse()),
                right: Box::new(left.reverse()),
                middle: middle.clone(),
            },
            SpTree::Parallel { left, right } => SpTree::Parallel {
                left: Box::new(left.reverse()),
                right: Box::new(right.reverse()),
            },
        }
    }

    /// Leaf edge ids in left-to-right order.
    pub fn edge_ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_edges(&mut out);
        out
    }

    fn collect_edges(&self, out: &mut Vec<String>) {
        match self {
            SpTree::Leaf { edge, .. } => out.push(edge.clone()),
            SpTree::Series { left, right, .. } | SpTree::Parallel { left, right } => {
                left.collect_edges(out);
                right.collect_edges(out);
            }
        }
    }

    /// Parenthesized text form, e.g. `P(S(e1,e2@w),e3)`.
    pub fn to_text(&self) -> String {
        match self {
            SpTree::Leaf { edge, .. } => edge.clone(),
            SpTree::Series {
                left,
                right,
                middle,
            } => format!("S({},{}@{})", left.to_text(), right.to_text(), middle),
            SpTree::Parallel { left, right } => {
                format!("P({},{})", left.to_text(), right.to_text())
            }
        }
    }

    /// Checks the structural invariants (series endpoints meet at the middle
    /// vertex, parallel children share terminals, leaf ids distinct).
    pub fn validate(&self) -> Result<(), SpError> {
        self.validate_inner()?;
        let ids = self.edge_ids();
        let mut seen = BTreeMap::new();
        for id in &ids {
            if seen.insert(id.clone(), ()).is_some() {
                return Err(SpError::InvalidTree(format!("duplicate leaf `{id}`")));
            }
        }
        Ok(())
    }

    fn validate_inner(&self) -> Result<(), SpError> {
        match self {
            SpTree::Leaf { .. } => Ok(()),
            SpTree::Series {
                left,
                right,
                middle,
            } => {
                if left.sink() != middle || right.source() != middle {
                    return Err(SpError::InvalidTree(format!(
                        "series children do not meet at `{middle}`"
                    )));
                }
                left.validate_inner()?;
                right.validate_inner()
            }
            SpTree::Parallel { left, right } => {
                if left.source() != right.source() || left.sink() != right.sink() {
                    return Err(SpError::InvalidTree(String::from(
                        "parallel children have different terminals",
                    )));
                }
                left.validate_inner()?;
                right.validate_inner()
            }
        }
    }

    /// Rebuilds the multigraph this tree decomposes (edge ids preserved,
    /// endpoint order of a leaf may be flipped relative to the original).
    pub fn recompose(&self) -> MultiGraph {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, String)> = Vec::new();
        self.collect_graph(&mut vertices, &mut edges);
        let terminals = Some((String::from(self.source()), String::from(self.sink())));
        MultiGraph::new(vertices, edges, terminals).expect("valid tree recomposes")
    }

    fn collect_graph(&self, vertices: &mut Vec<String>, edges: &mut Vec<(String, String, String)>) {
        fn push_vertex(v: &str, vertices: &mut Vec<String>) {
            if !vertices.iter().any(|x| x == v) {
                vertices.push(String::from(v));
            }
        }
        match self {
            SpTree::Leaf { edge, source, sink } => {
                push_vertex(source, vertices);
                push_vertex(sink, vertices);
                edges.push((edge.clone(), source.clone(), sink.clone()));
            }
            SpTree::Series { left, right, .. } | SpTree::Parallel { left, right } => {
                left.collect_graph(vertices, edges);
                right.collect_graph(vertices, edges);
            }
        }
    }
}

/// Outcome of recognition: a decomposition tree, or a definite "no".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpRecognition {
    SeriesParallel(SpTree),
    NotSeriesParallel,
}

impl SpRecognition {
    pub fn tree(&self) -> Option<&SpTree> {
        match self {
            SpRecognition::SeriesParallel(t) => Some(t),
            SpRecognition::NotSeriesParallel => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpError {
    Graph(GraphError),
    Model(ModelError),
    Channel(ChannelError),
    Budget(BudgetExceeded),
    InvalidTree(String),
    NoLeaves,
    NotSeriesParallel,
}

impl fmt::Display for SpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpError::Graph(e) => write!(f, "{e}"),
            SpError::Model(e) => write!(f, "{e}"),
            SpError::Channel(e) => write!(f, "{e}"),
            SpError::Budget(e) => write!(f, "{e}"),
            SpError::InvalidTree(s) => write!(f, "invalid decomposition tree: {s}"),
            SpError::NoLeaves => write!(f, "tree has no leaves besides the root"),
            SpError::NotSeriesParallel => write!(f, "graph is not series-parallel"),
        }
    }
}

impl core::error::Error for SpError {}

impl From<GraphError> for SpError {
    fn from(e: GraphError) -> Self {
        SpError::Graph(e)
    }
}
impl From<ModelError> for SpError {
    fn from(e: ModelError) -> Self {
        SpError::Model(e)
    }
}
impl From<ChannelError> for SpError {
    fn from(e: ChannelError) -> Self {
        SpError::Channel(e)
    }
}
impl From<BudgetExceeded> for SpError {
    fn from(e: BudgetExceeded) -> Self {
        SpError::Budget(e)
    }
}

struct WorkEdge {
    a: usize,
    b: usize,
    tree: SpTree,
    alive: bool,
}

impl WorkEdge {
    fn other_end(&self, x: usize) -> usize {
        if self.a == x {
            self.b
        } else {
            self.a
        }
    }
}

/// Recognizes a two-terminal series-parallel multigraph by iterated
/// reductions. Terminals are never contracted.
pub fn sp_recognize(g: &MultiGraph, u: &str, v: &str) -> Result<SpRecognition, SpError> {
    let ui = g.vertex_id(u)?;
    let vi = g.vertex_id(v)?;
    if ui == vi {
        return Err(SpError::Graph(GraphError::TerminalsNotDistinct));
    }
    if !g.is_connected() {
        return Err(SpError::Graph(GraphError::Disconnected));
    }
    if g.edge_count() == 0 {
        return Ok(SpRecognition::NotSeriesParallel);
    }

    // initial scan order: lexicographic edge id
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&x, &y| g.edge(x).id.cmp(&g.edge(y).id));
    let mut work: Vec<WorkEdge> = order
        .iter()
        .map(|&ei| {
            let e = g.edge(ei);
            WorkEdge {
                a: e.from,
                b: e.to,
                tree: SpTree::Leaf {
                    edge: e.id.clone(),
                    source: String::from(g.vertex_name(e.from)),
                    sink: String::from(g.vertex_name(e.to)),
                },
                alive: true,
            }
        })
        .collect();

    let n = g.vertex_count();
    loop {
        // exhaust parallel merges
        loop {
            let mut merged = false;
            'outer: for i in 0..work.len() {
                if !work[i].alive {
                    continue;
                }
                for j in (i + 1)..work.len() {
                    if !work[j].alive {
                        continue;
                    }
                    let same = (work[i].a == work[j].a && work[i].b == work[j].b)
                        || (work[i].a == work[j].b && work[i].b == work[j].a);
                    if same {
                        let right = if work[j].tree.source() == work[i].tree.source() {
                            work[j].tree.clone()
                        } else {
                            work[j].tree.reverse()
                        };
                        work[i].tree = SpTree::Parallel {
                            left: Box::new(work[i].tree.clone()),
                            right: Box::new(right),
                        };
                        work[j].alive = false;
                        merged = true;
                        break 'outer;
                    }
                }
            }
            if !merged {
                break;
            }
        }

        // one series contraction: first edge in slot order with a
        // degree-2 non-terminal endpoint
        let mut degree = vec![0usize; n];
        for w in work.iter().filter(|w| w.alive) {
            degree[w.a] += 1;
            degree[w.b] += 1;
        }
        let contractible = |x: usize| -> bool { x != ui && x != vi && degree[x] == 2 };
        let mut target = None;
        'scan: for (i, w) in work.iter().enumerate() {
            if !w.alive {
                continue;
            }
            for x in [w.a, w.b] {
                if contractible(x) {
                    target = Some((i, x));
                    break 'scan;
                }
            }
        }
        let (i, x) = match target {
            Some(t) => t,
            None => break,
        };
        let j = work
            .iter()
            .enumerate()
            .position(|(k, w)| w.alive && k != i && (w.a == x || w.b == x))
            .expect("degree-2 vertex has a second edge");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let left = if work[lo].tree.sink() == g.vertex_name(x) {
            work[lo].tree.clone()
        } else {
            work[lo].tree.reverse()
        };
        let right = if work[hi].tree.source() == g.vertex_name(x) {
            work[hi].tree.clone()
        } else {
            work[hi].tree.reverse()
        };
        let la = work[lo].other_end(x);
        let hb = work[hi].other_end(x);
        work[lo].tree = SpTree::Series {
            left: Box::new(left),
            right: Box::new(right),
            middle: String::from(g.vertex_name(x)),
        };
        work[lo].a = la;
        work[lo].b = hb;
        work[hi].alive = false;
    }

    let alive: Vec<&WorkEdge> = work.iter().filter(|w| w.alive).collect();
    if alive.len() == 1
        && ((alive[0].a == ui && alive[0].b == vi) || (alive[0].a == vi && alive[0].b == ui))
    {
        let mut tree = alive[0].tree.clone();
        if tree.source() != u {
            tree = tree.reverse();
        }
        Ok(SpRecognition::SeriesParallel(tree))
    } else {
        Ok(SpRecognition::NotSeriesParallel)
    }
}

/// All self-avoiding walks from `u` to `v`, as edge-id sequences, in
/// depth-first order with incident edges taken in id order.
pub fn enumerate_paths(
    g: &MultiGraph,
    u: &str,
    v: &str,
    budgets: &Budgets,
) -> Result<Vec<Vec<String>>, SpError> {
    let ui = g.vertex_id(u)?;
    let vi = g.vertex_id(v)?;
    if ui == vi {
        return Err(SpError::Graph(GraphError::TerminalsNotDistinct));
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&x, &y| g.edge(x).id.cmp(&g.edge(y).id));
    for &ei in &order {
        let e = g.edge(ei);
        incident[e.from].push(ei);
        incident[e.to].push(ei);
    }
    let mut paths = Vec::new();
    let mut visited = vec![false; g.vertex_count()];
    let mut stack: Vec<String> = Vec::new();
    visited[ui] = true;
    dfs_paths(
        g, &incident, ui, vi, &mut visited, &mut stack, &mut paths, budgets,
    )?;
    Ok(paths)
}

#[allow(clippy::too_many_arguments)]
fn dfs_paths(
    g: &MultiGraph,
    incident: &[Vec<usize>],
    at: usize,
    target: usize,
    visited: &mut Vec<bool>,
    stack: &mut Vec<String>,
    paths: &mut Vec<Vec<String>>,
    budgets: &Budgets,
) -> Result<(), SpError> {
    for &ei in &incident[at] {
        let e = g.edge(ei);
        let next = if e.from == at { e.to } else { e.from };
        if next == target {
            if paths.len() as u64 >= budgets.max_paths {
                return Err(SpError::Budget(BudgetExceeded {
                    what: String::from("self-avoiding paths"),
                    needed: paths.len() as u128 + 1,
                    allowed: budgets.max_paths as u128,
                }));
            }
            stack.push(e.id.clone());
            paths.push(stack.clone());
            stack.pop();
            continue;
        }
        if visited[next] {
            continue;
        }
        visited[next] = true;
        stack.push(e.id.clone());
        dfs_paths(g, incident, next, target, visited, stack, paths, budgets)?;
        stack.pop();
        visited[next] = false;
    }
    Ok(())
}

/// Leaves of a tree relative to a root: degree-1 vertices other than the root.
pub fn tree_leaves(tree: &MultiGraph, root: &str) -> Result<Vec<String>, SpError> {
    let ri = tree.vertex_id(root)?;
    if !tree.is_tree() {
        return Err(SpError::Graph(GraphError::NotATree));
    }
    Ok((0..tree.vertex_count())
        .filter(|&x| x != ri && tree.degree(x) == 1)
        .map(|x| String::from(tree.vertex_name(x)))
        .collect())
}

/// Ties the leaves of a tree to one new vertex through (by default
/// noiseless) edges, producing a two-terminal model with terminals
/// (root, new vertex). The result is always series-parallel.
pub fn tied_tree_build(
    tree: &MultiGraph,
    root: &str,
    edge_channels: &BTreeMap<String, Channel>,
    leaf_channel: Option<&Channel>,
) -> Result<SyncModel, SpError> {
    let leaves = tree_leaves(tree, root)?;
    tied_build_for_set(tree, root, &leaves, edge_channels, leaf_channel)
}

/// Generalized tying: joins an arbitrary vertex set W of a tree to a new
/// terminal. Vertices outside the root-to-W paths are pruned first, so the
/// result stays series-parallel.
pub fn tied_build_for_set(
    tree: &MultiGraph,
    root: &str,
    w: &[String],
    edge_channels: &BTreeMap<String, Channel>,
    leaf_channel: Option<&Channel>,
) -> Result<SyncModel, SpError> {
    let ri = tree.vertex_id(root)?;
    if !tree.is_tree() {
        return Err(SpError::Graph(GraphError::NotATree));
    }
    if w.is_empty() {
        return Err(SpError::NoLeaves);
    }
    let mut keep = vec![false; tree.vertex_count()];
    keep[ri] = true;
    for name in w {
        let wi = tree.vertex_id(name)?;
        if wi == ri {
            return Err(SpError::InvalidTree(String::from(
                "tied set may not contain the root",
            )));
        }
        for x in tree_path_vertices(tree, ri, wi) {
            keep[x] = true;
        }
    }

    let mut vertices: Vec<String> = Vec::new();
    for (i, name) in tree.vertices().iter().enumerate() {
        if keep[i] {
            vertices.push(name.clone());
        }
    }
    let tied = {
        let mut candidate = String::from("tied");
        while vertices.iter().any(|x| *x == candidate) {
            candidate.push('_');
        }
        candidate
    };
    vertices.push(tied.clone());

    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut channels: BTreeMap<String, Channel> = BTreeMap::new();
    for e in tree.edges() {
        if keep[e.from] && keep[e.to] {
            let ch = edge_channels
                .get(&e.id)
                .ok_or_else(|| SpError::Model(ModelError::MissingChannel(e.id.clone())))?;
            edges.push((
                e.id.clone(),
                String::from(tree.vertex_name(e.from)),
                String::from(tree.vertex_name(e.to)),
            ));
            channels.insert(e.id.clone(), ch.clone());
        }
    }
    let leaf_ch = leaf_channel.cloned().unwrap_or_else(noiseless);
    for name in w {
        let mut tie_id = format!("tie:{name}");
        while channels.contains_key(&tie_id) {
            tie_id.push('_');
        }
        edges.push((tie_id.clone(), name.clone(), tied.clone()));
        channels.insert(tie_id, leaf_ch.clone());
    }

    let graph = MultiGraph::new(vertices, edges, Some((String::from(root), tied)))?;
    SyncModel::uniform_z2(graph, channels).map_err(SpError::Model)
}

/// Edge ids on the unique tree path between two named vertices.
pub fn tree_path_edges(tree: &MultiGraph, from: &str, to: &str) -> Result<Vec<String>, SpError> {
    if !tree.is_tree() {
        return Err(SpError::Graph(GraphError::NotATree));
    }
    let fi = tree.vertex_id(from)?;
    let ti = tree.vertex_id(to)?;
    let verts = tree_path_vertices(tree, fi, ti);
    let mut ids = Vec::new();
    for pair in verts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let ei = tree
            .incident(a)
            .into_iter()
            .find(|&ei| {
                let e = tree.edge(ei);
                (e.from == a && e.to == b) || (e.from == b && e.to == a)
            })
            .expect("consecutive path vertices share an edge");
        ids.push(tree.edge(ei).id.clone());
    }
    Ok(ids)
}

/// Vertices on the unique tree path between two vertices (inclusive).
fn tree_path_vertices(tree: &MultiGraph, from: usize, to: usize) -> Vec<usize> {
    let n = tree.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut queue = alloc::collections::VecDeque::new();
    parent[from] = from;
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for ei in tree.incident(x) {
            let e = tree.edge(ei);
            let y = if e.from == x { e.to } else { e.from };
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path
}

/// Folds a decomposition tree into one channel carrying the law of the whole
/// observation vector given the product of the terminal spins. Equivalent
/// outputs are merged at every node, so alphabets stay collapsed.
///
/// For uniform binary spins, the chi-squared information of the result at
/// uniform prior equals the exact conditional information of the model.
pub fn sp_collapse_to_channel(model: &SyncModel, tree: &SpTree) -> Result<Channel, SpError> {
    model.require_uniform_binary()?;
    collapse_node(model, tree)
}

fn collapse_node(model: &SyncModel, tree: &SpTree) -> Result<Channel, SpError> {
    match tree {
        SpTree::Leaf { edge, .. } => {
            let ch = model.channel_by_id(edge).map_err(SpError::Model)?;
            Ok(ch.merge_equivalent_outputs())
        }
        SpTree::Series { left, right, .. } => {
            let l = collapse_node(model, left)?;
            let r = collapse_node(model, right)?;
            Ok(l.compose_series(&r)?.canonical_form())
        }
        SpTree::Parallel { left, right } => {
            let l = collapse_node(model, left)?;
            let r = collapse_node(model, right)?;
            Ok(l.product_parallel(&r)?.canonical_form())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budgets;
    use crate::channel::make_bsc;
    use crate::info::{chi2_mi_binary, exact_i2_conditional};
    use crate::rational::rat;

    fn triangle() -> MultiGraph {
        MultiGraph::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "v".into(), "w".into()),
                ("e3".into(), "w".into(), "u".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap()
    }

    fn k4() -> MultiGraph {
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
        MultiGraph::new(vs, es, None).unwrap()
    }

    #[test]
    fn single_edge_is_a_leaf() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            None,
        )
        .unwrap();
        match sp_recognize(&g, "u", "v").unwrap() {
            SpRecognition::SeriesParallel(t) => {
                assert_eq!(t.to_text(), "e");
                assert_eq!(t.source(), "u");
                assert_eq!(t.sink(), "v");
            }
            _ => panic!("single edge must be series-parallel"),
        }
    }

    #[test]
    fn triangle_decomposes_as_parallel_of_edge_and_chain() {
        let t = match sp_recognize(&triangle(), "u", "v").unwrap() {
            SpRecognition::SeriesParallel(t) => t,
            _ => panic!("triangle is series-parallel"),
        };
        t.validate().unwrap();
        assert_eq!(t.to_text(), "P(e1,S(e3,e2@w))");
        assert_eq!((t.source(), t.sink()), ("u", "v"));
        let r = t.recompose();
        assert_eq!(r.edge_count(), 3);
        let mut ids = t.edge_ids();
        ids.sort();
        assert_eq!(ids, vec!["e1", "e2", "e3"]);
    }

    #[test]
    fn k4_is_not_series_parallel() {
        let g = k4();
        for (u, v) in [("a", "b"), ("a", "d"), ("c", "d")] {
            assert_eq!(
                sp_recognize(&g, u, v).unwrap(),
                SpRecognition::NotSeriesParallel
            );
        }
    }

    #[test]
    fn dangling_vertex_blocks_recognition() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into(), "x".into()],
            vec![
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "v".into(), "x".into()),
            ],
            None,
        )
        .unwrap();
        assert_eq!(
            sp_recognize(&g, "u", "v").unwrap(),
            SpRecognition::NotSeriesParallel
        );
    }

    #[test]
    fn disconnected_input_is_an_error() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into(), "x".into(), "y".into()],
            vec![
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "x".into(), "y".into()),
            ],
            None,
        )
        .unwrap();
        assert!(matches!(
            sp_recognize(&g, "u", "v"),
            Err(SpError::Graph(GraphError::Disconnected))
        ));
    }

    #[test]
    fn paths_in_triangle_and_parallel_pair() {
        let b = Budgets::default();
        let paths = enumerate_paths(&triangle(), "u", "v", &b).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0], vec!["e1"]);
        assert_eq!(paths[1], vec!["e3", "e2"]);

        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "u".into(), "v".into()),
            ],
            None,
        )
        .unwrap();
        let paths = enumerate_paths(&g, "u", "v", &b).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn path_cap_is_enforced() {
        let b = Budgets {
            max_paths: 1,
            ..Budgets::default()
        };
        assert!(matches!(
            enumerate_paths(&triangle(), "u", "v", &b),
            Err(SpError::Budget(_))
        ));
    }

    fn star_tree(leaves: usize) -> MultiGraph {
        let mut vs = vec![String::from("r")];
        let mut es = Vec::new();
        for i in 0..leaves {
            let name = format!("w{i}");
            es.push((format!("e{i}"), String::from("r"), name.clone()));
            vs.push(name);
        }
        MultiGraph::new(vs, es, None).unwrap()
    }

    fn binary_depth2_tree() -> MultiGraph {
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
        MultiGraph::new(vs, es, None).unwrap()
    }

    #[test]
    fn tied_star_is_parallel_of_two_chains() {
        let tree = star_tree(2);
        let mut chans = BTreeMap::new();
        chans.insert("e0".into(), make_bsc(&rat(1, 4)).unwrap());
        chans.insert("e1".into(), make_bsc(&rat(1, 4)).unwrap());
        let model = tied_tree_build(&tree, "r", &chans, None).unwrap();
        let (u, v) = model.graph().terminal_names().unwrap();
        assert_eq!(u, "r");
        let t = match sp_recognize(model.graph(), u, v).unwrap() {
            SpRecognition::SeriesParallel(t) => t,
            _ => panic!("tied trees are series-parallel"),
        };
        match &t {
            SpTree::Parallel { left, right } => {
                assert!(matches!(**left, SpTree::Series { .. }));
                assert!(matches!(**right, SpTree::Series { .. }));
            }
            _ => panic!("expected parallel root, got {}", t.to_text()),
        }
    }

    #[test]
    fn tied_path_is_a_series_chain() {
        let tree = MultiGraph::new(
            vec!["r".into(), "m".into(), "l".into()],
            vec![
                ("e0".into(), "r".into(), "m".into()),
                ("e1".into(), "m".into(), "l".into()),
            ],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e0".into(), make_bsc(&rat(1, 4)).unwrap());
        chans.insert("e1".into(), make_bsc(&rat(1, 4)).unwrap());
        let model = tied_tree_build(&tree, "r", &chans, None).unwrap();
        assert_eq!(model.graph().edge_count(), 3);
        let t = sp_recognize(model.graph(), "r", "tied").unwrap();
        let tree = t.tree().expect("series-parallel");
        assert!(matches!(tree, SpTree::Series { .. }));
    }

    #[test]
    fn regular_tied_tree_depth2_has_four_paths() {
        let tree = binary_depth2_tree();
        let mut chans = BTreeMap::new();
        for e in tree.edges() {
            chans.insert(e.id.clone(), make_bsc(&rat(1, 10)).unwrap());
        }
        let model = tied_tree_build(&tree, "r", &chans, None).unwrap();
        let rec = sp_recognize(model.graph(), "r", "tied").unwrap();
        assert!(rec.tree().is_some());
        let paths = enumerate_paths(model.graph(), "r", "tied", &Budgets::default()).unwrap();
        assert_eq!(paths.len(), 4); // d^t = 2^2
        assert!(paths.iter().all(|p| p.len() == 3)); // t tree edges + tie
    }

    #[test]
    fn collapse_single_edge_is_merged_channel() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 4)).unwrap());
        let model = SyncModel::uniform_z2(g, chans).unwrap();
        let t = sp_recognize(model.graph(), "u", "v")
            .unwrap()
            .tree()
            .unwrap()
            .clone();
        let q = sp_collapse_to_channel(&model, &t).unwrap();
        assert_eq!(q, make_bsc(&rat(1, 4)).unwrap().merge_equivalent_outputs());
    }

    #[test]
    fn collapse_two_edge_series_is_bsc_with_multiplied_bias() {
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
        chans.insert("e1".into(), make_bsc(&rat(1, 4)).unwrap());
        chans.insert("e2".into(), make_bsc(&rat(1, 10)).unwrap());
        let model = SyncModel::uniform_z2(g, chans).unwrap();
        let t = sp_recognize(model.graph(), "u", "v")
            .unwrap()
            .tree()
            .unwrap()
            .clone();
        let q = sp_collapse_to_channel(&model, &t).unwrap();
        // delta = (1/2)(4/5) = 2/5, equivalent flip probability 3/10
        assert_eq!(
            q.canonical_form(),
            make_bsc(&rat(3, 10)).unwrap().canonical_form()
        );
        let i2 = exact_i2_conditional(&model, "u", "v", None, &Budgets::default()).unwrap();
        assert_eq!(chi2_mi_binary(&rat(1, 2), &q).unwrap(), i2);
    }

    #[test]
    fn collapse_matches_enumeration_on_tied_depth2_tree() {
        let tree = binary_depth2_tree();
        let mut chans = BTreeMap::new();
        for e in tree.edges() {
            chans.insert(e.id.clone(), make_bsc(&rat(1, 10)).unwrap());
        }
        let model = tied_tree_build(&tree, "r", &chans, None).unwrap();
        let t = sp_recognize(model.graph(), "r", "tied")
            .unwrap()
            .tree()
            .unwrap()
            .clone();
        let q = sp_collapse_to_channel(&model, &t).unwrap();
        let collapsed = chi2_mi_binary(&rat(1, 2), &q).unwrap();
        let exact = exact_i2_conditional(&model, "r", "tied", None, &Budgets::default()).unwrap();
        assert_eq!(collapsed, exact);
    }

    #[test]
    fn recognition_is_deterministic() {
        let t1 = sp_recognize(&triangle(), "u", "v").unwrap();
        let t2 = sp_recognize(&triangle(), "u", "v").unwrap();
        assert_eq!(t1, t2);
    }
}
