//! Multigraphs with named vertices and edges.
//!
//! Parallel edges are allowed (and needed: parallel composition of channels
//! lives on multi-edges); self-loops are rejected, since an observation of a
//! label differenced with itself carries no information.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// One edge: an id and the indices of its endpoints. Direction matters for
/// group-valued labels (the observation sees X_from - X_to).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

/// Undirected multigraph with optional ordered terminal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: Vec<String>,
    vertex_index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<String, usize>,
    terminals: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DuplicateVertex(String),
    DuplicateEdge(String),
    UnknownVertex(String),
    UnknownEdge(String),
    SelfLoop(String),
    TerminalsNotDistinct,
    Disconnected,
    TerminalsMissing,
    NotATree,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateVertex(v) => write!(f, "duplicate vertex id `{v}`"),
            GraphError::DuplicateEdge(e) => write!(f, "duplicate edge id `{e}`"),
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex `{v}`"),
            GraphError::UnknownEdge(e) => write!(f, "unknown edge `{e}`"),
            GraphError::SelfLoop(e) => write!(f, "edge `{e}` is a self-loop"),
            GraphError::TerminalsNotDistinct => write!(f, "terminals must be distinct"),
            GraphError::Disconnected => write!(f, "graph is not connected"),
            GraphError::TerminalsMissing => write!(f, "graph has no terminals"),
            GraphError::NotATree => write!(f, "graph is not a tree"),
        }
    }
}

impl core::error::Error for GraphError {}

impl MultiGraph {
    /// Builds a graph from names. Edges are (id, from, to).
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        terminals: Option<(String, String)>,
    ) -> Result<MultiGraph, GraphError> {
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut edge_list = Vec::with_capacity(edges.len());
        let mut edge_index = BTreeMap::new();
        for (id, from, to) in edges {
            let &fi = vertex_index
                .get(&from)
                .ok_or_else(|| GraphError::UnknownVertex(from.clone()))?;
            let &ti = vertex_index
                .get(&to)
                .ok_or_else(|| GraphError::UnknownVertex(to.clone()))?;
            if fi == ti {
                return Err(GraphError::SelfLoop(id));
            }
            if edge_index.insert(id.clone(), edge_list.len()).is_some() {
                return Err(GraphError::DuplicateEdge(id));
            }
            edge_list.push(Edge {
                id,
                from: fi,
                to: ti,
            });
        }
        let terminals = match terminals {
            None => None,
            Some((u, v)) => {
                let &ui = vertex_index
                    .get(&u)
                    .ok_or_else(|| GraphError::UnknownVertex(u.clone()))?;
                let &vi = vertex_index
                    .get(&v)
                    .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
                if ui == vi {
                    return Err(GraphError::TerminalsNotDistinct);
                }
                Some((ui, vi))
            }
        };
        Ok(MultiGraph {
            vertices,
            vertex_index,
            edges: edge_list,
            edge_index,
            terminals,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize, GraphError> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(String::from(name)))
    }

    pub fn edge_id(&self, id: &str) -> Result<usize, GraphError> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownEdge(String::from(id)))
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn terminals(&self) -> Option<(usize, usize)> {
        self.terminals
    }

    pub fn terminal_names(&self) -> Option<(&str, &str)> {
        self.terminals
            .map(|(u, v)| (self.vertices[u].as_str(), self.vertices[v].as_str()))
    }

    /// Edge indices incident to `v`, in insertion order.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.from == v || e.to == v)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).len()
    }

    /// Connectivity over an explicit edge subset (by edge index).
    pub fn connected_via(&self, open_edges: &[usize], start: usize, targets: &BTreeSet<usize>) -> bool {
        if targets.contains(&start) {
            return true;
        }
        let n = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &ei in open_edges {
            let e = &self.edges[ei];
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    if targets.contains(&w) {
                        return true;
                    }
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        let mut targets = BTreeSet::new();
        for i in 0..self.vertices.len() {
            targets.insert(i);
        }
        // reuse the DFS: connected iff every vertex reachable from 0
        let n = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &ei in &all {
            let e = &self.edges[ei];
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// A tree: connected with |E| = |V| - 1.
    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1
            && self.edge_count() + 1 == self.vertex_count()
            && self.is_connected()
    }

    /// Same graph with the terminal pair replaced.
    pub fn with_terminals(&self, u: &str, v: &str) -> Result<MultiGraph, GraphError> {
        let ui = self.vertex_id(u)?;
        let vi = self.vertex_id(v)?;
        if ui == vi {
            return Err(GraphError::TerminalsNotDistinct);
        }
        let mut g = self.clone();
        g.terminals = Some((ui, vi));
        Ok(g)
    }

    /// Builds a fresh id not colliding with existing vertex names.
    pub fn fresh_vertex_id(&self, base: &str) -> String {
        let mut candidate = String::from(base);
        while self.vertex_index.contains_key(&candidate) {
            candidate = format!("{candidate}_");
        }
        candidate
    }

    /// A rooted regular tree: root `r`, every internal vertex with
    /// `branching` children, `depth` generations. Vertex names are dotted
    /// paths (`r`, `r.0`, `r.0.1`, ...); the edge into a child is `e:<child>`.
    pub fn regular_tree(depth: u32, branching: u64) -> MultiGraph {
        let mut vertices = vec![String::from("r")];
        let mut edges: Vec<(String, String, String)> = Vec::new();
        let mut frontier = vec![String::from("r")];
        for _ in 0..depth {
            let mut next = Vec::new();
            for parent in &frontier {
                for c in 0..branching {
                    let child = format!("{parent}.{c}");
                    edges.push((format!("e:{child}"), parent.clone(), child.clone()));
                    vertices.push(child.clone());
                    next.push(child);
                }
            }
            frontier = next;
        }
        MultiGraph::new(vertices, edges, None).expect("regular tree is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn construction_and_lookup() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(g.vertex_id("v").unwrap()), 2);
        assert!(g.is_connected());
        assert!(!g.is_tree());
        assert_eq!(g.terminal_names(), Some(("u", "v")));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(matches!(
            MultiGraph::new(
                vec!["a".into()],
                vec![("e".into(), "a".into(), "a".into())],
                None
            ),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            MultiGraph::new(
                vec!["a".into(), "b".into()],
                vec![
                    ("e".into(), "a".into(), "b".into()),
                    ("e".into(), "b".into(), "a".into())
                ],
                None
            ),
            Err(GraphError::DuplicateEdge(_))
        ));
        assert!(matches!(
            MultiGraph::new(vec!["a".into(), "a".into()], vec![], None),
            Err(GraphError::DuplicateVertex(_))
        ));
    }

    #[test]
    fn parallel_edges_allowed() {
        let g = MultiGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                ("e1".into(), "a".into(), "b".into()),
                ("e2".into(), "a".into(), "b".into()),
            ],
            None,
        )
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_connected());
        assert!(!g.is_tree());
    }

    #[test]
    fn connectivity_via_subsets() {
        let g = triangle();
        let u = g.vertex_id("u").unwrap();
        let v = g.vertex_id("v").unwrap();
        let mut t = BTreeSet::new();
        t.insert(v);
        assert!(g.connected_via(&[0], u, &t));
        assert!(g.connected_via(&[1, 2], u, &t));
        assert!(!g.connected_via(&[1], u, &t));
        assert!(!g.connected_via(&[], u, &t));
    }

    #[test]
    fn fresh_ids_avoid_collisions() {
        let g = triangle();
        assert_eq!(g.fresh_vertex_id("tied"), "tied");
        assert_eq!(g.fresh_vertex_id("u"), "u_");
    }
}
