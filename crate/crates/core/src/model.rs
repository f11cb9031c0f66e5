//! Synchronization models: a multigraph, one channel per edge, a label
//! group, and a vertex prior.
//!
//! The prior defaults to uniform. Binary models may carry a per-vertex bias
//! (the probability of spin +1) for the non-uniform counterexample; the
//! theorem-bound operations reject non-uniform priors and non-binary groups.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::channel::Channel;
use crate::graph::{GraphError, MultiGraph};
use crate::group::GroupSpec;
use crate::rational::{is_probability, rat, Rational};

/// Vertex label prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prior {
    /// Uniform over the group, every vertex.
    Uniform,
    /// Binary only: per-vertex P[X_v = +1], indexed like the vertex list.
    Biased(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    Graph(GraphError),
    MissingChannel(String),
    UnknownChannelEdge(String),
    ArityMismatch { edge: String },
    BiasedPriorNeedsBinaryGroup,
    PriorLengthMismatch,
    PriorOutOfRange(String),
    NotUniformBinary,
    DegeneratePrior(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Graph(e) => write!(f, "{e}"),
            ModelError::MissingChannel(e) => write!(f, "edge `{e}` has no channel"),
            ModelError::UnknownChannelEdge(e) => {
                write!(f, "channel given for unknown edge `{e}`")
            }
            ModelError::ArityMismatch { edge } => {
                write!(f, "channel on edge `{edge}` does not match the model group")
            }
            ModelError::BiasedPriorNeedsBinaryGroup => {
                write!(f, "biased priors are only defined for binary labels")
            }
            ModelError::PriorLengthMismatch => {
                write!(f, "prior vector length differs from vertex count")
            }
            ModelError::PriorOutOfRange(v) => {
                write!(f, "prior for vertex `{v}` is outside [0,1]")
            }
            ModelError::NotUniformBinary => {
                write!(f, "operation requires uniform binary (Z2) labels")
            }
            ModelError::DegeneratePrior(v) => {
                write!(f, "degenerate prior at vertex `{v}` (0 or 1)")
            }
        }
    }
}

impl core::error::Error for ModelError {}

impl From<GraphError> for ModelError {
    fn from(e: GraphError) -> Self {
        ModelError::Graph(e)
    }
}

/// A spin (or group-label) synchronization model. Immutable after build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncModel {
    graph: MultiGraph,
    /// Parallel to `graph.edges()`.
    channels: Vec<Channel>,
    group: GroupSpec,
    prior: Prior,
}

impl SyncModel {
    pub fn new(
        graph: MultiGraph,
        channels: BTreeMap<String, Channel>,
        group: GroupSpec,
        prior: Prior,
    ) -> Result<SyncModel, ModelError> {
        for id in channels.keys() {
            if graph.edge_id(id).is_err() {
                return Err(ModelError::UnknownChannelEdge(id.clone()));
            }
        }
        let mut ordered = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            let ch = channels
                .get(&e.id)
                .ok_or_else(|| ModelError::MissingChannel(e.id.clone()))?;
            if ch.input_group().order() != group.order() {
                return Err(ModelError::ArityMismatch { edge: e.id.clone() });
            }
            ordered.push(ch.clone());
        }
        match &prior {
            Prior::Uniform => {}
            Prior::Biased(ps) => {
                if !group.is_binary() {
                    return Err(ModelError::BiasedPriorNeedsBinaryGroup);
                }
                if ps.len() != graph.vertex_count() {
                    return Err(ModelError::PriorLengthMismatch);
                }
                for (i, p) in ps.iter().enumerate() {
                    if !is_probability(p) {
                        return Err(ModelError::PriorOutOfRange(String::from(
                            graph.vertex_name(i),
                        )));
                    }
                }
            }
        }
        Ok(SyncModel {
            graph,
            channels: ordered,
            group,
            prior,
        })
    }

    /// Uniform-prior model on `Z2`.
    pub fn uniform_z2(
        graph: MultiGraph,
        channels: BTreeMap<String, Channel>,
    ) -> Result<SyncModel, ModelError> {
        SyncModel::new(graph, channels, GroupSpec::Z2, Prior::Uniform)
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    /// Channel of the edge with the given index (graph edge order).
    pub fn channel(&self, edge_idx: usize) -> &Channel {
        &self.channels[edge_idx]
    }

    pub fn channel_by_id(&self, id: &str) -> Result<&Channel, ModelError> {
        Ok(&self.channels[self.graph.edge_id(id)?])
    }

    /// P[X_v = group element g].
    pub fn vertex_prior(&self, v: usize, g: usize) -> Rational {
        match &self.prior {
            Prior::Uniform => rat(1, self.group.order() as i64),
            Prior::Biased(ps) => {
                if g == 0 {
                    ps[v].clone()
                } else {
                    Rational::one() - &ps[v]
                }
            }
        }
    }

    pub fn is_uniform_binary(&self) -> bool {
        self.group.is_binary() && matches!(self.prior, Prior::Uniform)
    }

    /// Guard for operations stated only for uniform binary spins.
    pub fn require_uniform_binary(&self) -> Result<(), ModelError> {
        if self.is_uniform_binary() {
            Ok(())
        } else {
            Err(ModelError::NotUniformBinary)
        }
    }

    /// A copy with one edge's channel replaced (arity must match).
    pub fn with_channel(&self, edge_id: &str, ch: Channel) -> Result<SyncModel, ModelError> {
        let idx = self.graph.edge_id(edge_id)?;
        if ch.input_group().order() != self.group.order() {
            return Err(ModelError::ArityMismatch {
                edge: String::from(edge_id),
            });
        }
        let mut m = self.clone();
        m.channels[idx] = ch;
        Ok(m)
    }

    /// All edge indices, the default observation set.
    pub fn all_edges(&self) -> Vec<usize> {
        (0..self.graph.edge_count()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_bsc;
    use alloc::vec;

    fn pair_graph() -> MultiGraph {
        MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            Some(("u".into(), "v".into())),
        )
        .unwrap()
    }

    #[test]
    fn builds_and_validates() {
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 4)).unwrap());
        let m = SyncModel::uniform_z2(pair_graph(), chans).unwrap();
        assert!(m.is_uniform_binary());
        assert_eq!(m.vertex_prior(0, 0), rat(1, 2));
    }

    #[test]
    fn missing_channel_rejected() {
        assert!(matches!(
            SyncModel::uniform_z2(pair_graph(), BTreeMap::new()),
            Err(ModelError::MissingChannel(_))
        ));
    }

    #[test]
    fn biased_prior_only_for_binary() {
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 4)).unwrap());
        let m = SyncModel::new(
            pair_graph(),
            chans,
            GroupSpec::Z2,
            Prior::Biased(vec![rat(4, 5), rat(4, 5)]),
        )
        .unwrap();
        assert!(!m.is_uniform_binary());
        assert_eq!(m.vertex_prior(0, 1), rat(1, 5));
        assert!(m.require_uniform_binary().is_err());
    }

    #[test]
    fn prior_length_checked() {
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 4)).unwrap());
        assert!(matches!(
            SyncModel::new(
                pair_graph(),
                chans,
                GroupSpec::Z2,
                Prior::Biased(vec![rat(1, 2)])
            ),
            Err(ModelError::PriorLengthMismatch)
        ));
    }
}
