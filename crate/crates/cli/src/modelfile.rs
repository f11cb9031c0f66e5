//! The on-disk model format: a UTF-8 JSON document with exact rational
//! probabilities as `"p/q"` strings.
//!
//! ```json
//! {
//!   "group": "Z2",
//!   "vertices": ["u", "v"],
//!   "terminals": ["u", "v"],
//!   "prior": "uniform",
//!   "edges": [
//!     {"id": "e1", "from": "u", "to": "v",
//!      "channel": {"alphabet": ["+1", "-1"],
//!                  "rows": {"+1": ["3/4", "1/4"], "-1": ["1/4", "3/4"]}}}
//!   ]
//! }
//! ```
//!
//! `group` defaults to `Z2`; `prior` defaults to uniform, or maps vertices
//! to P[X_v = +1]; `rows` has one entry per group element. Writing is
//! canonical (reduced rationals, sorted row keys, two-space indentation),
//! so emit -> parse -> emit is byte-identical.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use spinsync_core::channel::Channel;
use spinsync_core::graph::MultiGraph;
use spinsync_core::group::GroupSpec;
use spinsync_core::model::{Prior, SyncModel};
use spinsync_core::rational::{format_ratio, parse_ratio};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default = "default_group")]
    pub group: String,
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorFile>,
    pub edges: Vec<EdgeFile>,
}

fn default_group() -> String {
    String::from("Z2")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorFile {
    Keyword(String),
    PerVertex(BTreeMap<String, String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub from: String,
    pub to: String,
    pub channel: ChannelFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub alphabet: Vec<String>,
    pub rows: BTreeMap<String, Vec<String>>,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<SyncModel> {
        let group = GroupSpec::parse(&self.group)
            .ok_or_else(|| anyhow!("unknown group `{}`", self.group))?;
        let terminals = self
            .terminals
            .as_ref()
            .map(|[u, v]| (u.clone(), v.clone()));
        let edges: Vec<(String, String, String)> = self
            .edges
            .iter()
            .map(|e| (e.id.clone(), e.from.clone(), e.to.clone()))
            .collect();
        let graph = MultiGraph::new(self.vertices.clone(), edges, terminals)?;

        let mut channels = BTreeMap::new();
        for e in &self.edges {
            let mut rows = Vec::with_capacity(group.order());
            for key in group.row_keys() {
                let row = e.channel.rows.get(&key).ok_or_else(|| {
                    anyhow!("edge `{}`: channel is missing row \"{key}\"", e.id)
                })?;
                let parsed: Result<Vec<_>> = row
                    .iter()
                    .map(|s| {
                        parse_ratio(s)
                            .map_err(|err| anyhow!("edge `{}`: {err}", e.id))
                    })
                    .collect();
                rows.push(parsed?);
            }
            if e.channel.rows.len() != group.order() {
                bail!(
                    "edge `{}`: channel has {} rows but group {} needs {}",
                    e.id,
                    e.channel.rows.len(),
                    group,
                    group.order()
                );
            }
            let ch = Channel::new(group, e.channel.alphabet.clone(), rows)
                .map_err(|err| anyhow!("edge `{}`: {err}", e.id))?;
            channels.insert(e.id.clone(), ch);
        }

        let prior = match &self.prior {
            None => Prior::Uniform,
            Some(PriorFile::Keyword(k)) if k == "uniform" => Prior::Uniform,
            Some(PriorFile::Keyword(k)) => bail!("unknown prior keyword `{k}`"),
            Some(PriorFile::PerVertex(map)) => {
                let mut ps = Vec::with_capacity(self.vertices.len());
                for v in &self.vertices {
                    let s = map.get(v).ok_or_else(|| {
                        anyhow!("prior map is missing vertex `{v}`")
                    })?;
                    ps.push(parse_ratio(s).map_err(|err| anyhow!("prior for `{v}`: {err}"))?);
                }
                for key in map.keys() {
                    if !self.vertices.contains(key) {
                        bail!("prior map names unknown vertex `{key}`");
                    }
                }
                Prior::Biased(ps)
            }
        };

        Ok(SyncModel::new(graph, channels, group, prior)?)
    }

    pub fn from_model(model: &SyncModel) -> ModelFile {
        let g = model.graph();
        let group = model.group();
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let ch = model.channel(i);
                let mut rows = BTreeMap::new();
                for (gi, key) in group.row_keys().into_iter().enumerate() {
                    rows.insert(key, ch.row(gi).iter().map(format_ratio).collect());
                }
                EdgeFile {
                    id: e.id.clone(),
                    from: String::from(g.vertex_name(e.from)),
                    to: String::from(g.vertex_name(e.to)),
                    channel: ChannelFile {
                        alphabet: ch.alphabet().to_vec(),
                        rows,
                    },
                }
            })
            .collect();
        let prior = match model.prior() {
            Prior::Uniform => None,
            Prior::Biased(ps) => {
                let map = g
                    .vertices()
                    .iter()
                    .zip(ps.iter())
                    .map(|(v, p)| (v.clone(), format_ratio(p)))
                    .collect();
                Some(PriorFile::PerVertex(map))
            }
        };
        ModelFile {
            group: group.to_string(),
            vertices: g.vertices().to_vec(),
            terminals: g
                .terminal_names()
                .map(|(u, v)| [String::from(u), String::from(v)]),
            prior,
            edges,
        }
    }
}

/// Canonical serialization: pretty JSON plus a trailing newline.
pub fn write_model_string(model: &SyncModel) -> Result<String> {
    let file = ModelFile::from_model(model);
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_model_str(s: &str) -> Result<SyncModel> {
    let file: ModelFile = serde_json::from_str(s).context("invalid model JSON")?;
    file.to_model()
}

pub fn load_model(path: &std::path::Path) -> Result<SyncModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read model file {}", path.display()))?;
    parse_model_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinsync_core::channel::make_bsc;
    use spinsync_core::rational::rat;

    fn demo_model() -> SyncModel {
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
        chans.insert("e".into(), make_bsc(&rat(1, 4)).unwrap());
        chans.insert("f".into(), make_bsc(&rat(1, 10)).unwrap());
        SyncModel::uniform_z2(g, chans).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let model = demo_model();
        let s1 = write_model_string(&model).unwrap();
        let parsed = parse_model_str(&s1).unwrap();
        let s2 = write_model_string(&parsed).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(parsed, model);
    }

    #[test]
    fn biased_prior_round_trips() {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 5)).unwrap());
        let model = SyncModel::new(
            g,
            chans,
            GroupSpec::Z2,
            Prior::Biased(vec![rat(4, 5), rat(4, 5)]),
        )
        .unwrap();
        let s = write_model_string(&model).unwrap();
        assert!(s.contains("\"prior\""));
        let parsed = parse_model_str(&s).unwrap();
        assert_eq!(parsed, model);
    }

    #[test]
    fn z4_rows_keyed_by_element() {
        let text = r#"{
          "group": "Z4",
          "vertices": ["a", "b"],
          "edges": [{"id": "e", "from": "a", "to": "b",
            "channel": {"alphabet": ["0", "1"],
              "rows": {"0": ["1", "0"], "1": ["1", "0"], "2": ["0", "1"], "3": ["0", "1"]}}}]
        }"#;
        let model = parse_model_str(text).unwrap();
        assert_eq!(model.group(), GroupSpec::Zk(4));
        let s = write_model_string(&model).unwrap();
        let reparsed = parse_model_str(&s).unwrap();
        assert_eq!(reparsed, model);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(parse_model_str("{not json").is_err());
        // bad rational
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"e","from":"a","to":"b",
          "channel":{"alphabet":["x","y"],"rows":{"+1":["1/0","0"],"-1":["0","1"]}}}]}"#;
        assert!(parse_model_str(text).is_err());
        // row does not sum to one
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"e","from":"a","to":"b",
          "channel":{"alphabet":["x","y"],"rows":{"+1":["1/2","1/3"],"-1":["0","1"]}}}]}"#;
        assert!(parse_model_str(text).is_err());
        // missing row
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"e","from":"a","to":"b",
          "channel":{"alphabet":["x","y"],"rows":{"+1":["1/2","1/2"]}}}]}"#;
        assert!(parse_model_str(text).is_err());
        // unknown group
        let text = r#"{"group":"Q8","vertices":["a"],"edges":[]}"#;
        assert!(parse_model_str(text).is_err());
    }
}
