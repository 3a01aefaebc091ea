//! Dynamic networks as an ordered sequence of undirected snapshots over one
//! shared node registry.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a node in a [`NodeRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijection between external string labels and contiguous [`NodeId`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRegistry {
    labels: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a registry from labels in id order. Duplicate labels are rejected.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = Self::new();
        for label in labels {
            let label = label.into();
            if reg.ids.contains_key(&label) {
                return Err(Error::InvalidArgument(format!("duplicate node label {label:?}")));
            }
            reg.intern(&label);
        }
        Ok(reg)
    }

    /// Return the id for `label`, registering it if unseen.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = NodeId::from(self.labels.len());
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id.index()).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId::from)
    }
}

/// The state of the network at one timestep.
///
/// Edges are stored normalized (`u < v`), sorted and deduplicated. The
/// per-node neighbor index is built lazily on the first neighborhood query.
#[derive(Debug)]
pub struct Snapshot {
    index: usize,
    num_nodes: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: OnceLock<Vec<Vec<NodeId>>>,
}

impl Clone for Snapshot {
    fn clone(&self) -> Self {
        Snapshot {
            index: self.index,
            num_nodes: self.num_nodes,
            edges: self.edges.clone(),
            adjacency: OnceLock::new(),
        }
    }
}

impl PartialEq for Snapshot {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.num_nodes == other.num_nodes && self.edges == other.edges
    }
}

impl Snapshot {
    /// Normalize and validate an edge list for a graph with `num_nodes` nodes.
    pub fn new(index: usize, num_nodes: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u.index(), v.index()));
            }
            for n in [u, v] {
                if n.index() >= num_nodes {
                    return Err(Error::NodeOutOfRange {
                        id: n.index(),
                        len: num_nodes,
                    });
                }
            }
            normalized.push(if u < v { (u, v) } else { (v, u) });
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Snapshot {
            index,
            num_nodes,
            edges: normalized,
            adjacency: OnceLock::new(),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).is_ok()
    }

    fn adjacency(&self) -> &[Vec<NodeId>] {
        self.adjacency.get_or_init(|| {
            let mut adj = vec![Vec::new(); self.num_nodes];
            for &(u, v) in &self.edges {
                adj[u.index()].push(v);
                adj[v.index()].push(u);
            }
            for list in &mut adj {
                list.sort_unstable();
            }
            adj
        })
    }

    /// Sorted one-hop neighbors of `p`.
    pub fn neighbors(&self, p: NodeId) -> Result<&[NodeId]> {
        self.adjacency()
            .get(p.index())
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                id: p.index(),
                len: self.num_nodes,
            })
    }

    pub fn degree(&self, p: NodeId) -> Result<usize> {
        self.neighbors(p).map(<[NodeId]>::len)
    }

    fn reindexed(&self, index: usize) -> Snapshot {
        Snapshot { index, ..self.clone() }
    }
}

/// A dynamic network: snapshots `0..=t` sharing one registry.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraph {
    registry: NodeRegistry,
    snapshots: Vec<Snapshot>,
}

impl TemporalGraph {
    /// Assemble a graph from per-timestep edge lists. Snapshot `i` receives
    /// index `i`.
    pub fn new<E>(registry: NodeRegistry, edge_lists: impl IntoIterator<Item = E>) -> Result<Self>
    where
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = registry.len();
        let snapshots = edge_lists
            .into_iter()
            .enumerate()
            .map(|(i, edges)| Snapshot::new(i, n, edges))
            .collect::<Result<Vec<_>>>()?;
        Ok(TemporalGraph { registry, snapshots })
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    pub fn num_nodes(&self) -> usize {
        self.registry.len()
    }

    pub fn num_snapshots(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, i: usize) -> Result<&Snapshot> {
        self.snapshots.get(i).ok_or(Error::TimestepOutOfRange {
            index: i,
            len: self.snapshots.len(),
        })
    }

    pub fn last_snapshot(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    /// One-hop neighborhood of `p` in snapshot `i`, excluding `p` itself.
    pub fn neighbors(&self, i: usize, p: NodeId) -> Result<&[NodeId]> {
        self.snapshot(i)?.neighbors(p)
    }

    /// Per-node degree in snapshot `i`, in id order.
    pub fn degree_sequence(&self, i: usize) -> Result<Vec<(NodeId, usize)>> {
        let snap = self.snapshot(i)?;
        let mut counts = vec![0usize; self.num_nodes()];
        for &(u, v) in snap.edges() {
            counts[u.index()] += 1;
            counts[v.index()] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .map(|(p, c)| (NodeId::from(p), c))
            .collect())
    }

    /// Restrict every snapshot to `nodes`, re-indexing them contiguously in
    /// ascending order of their original ids.
    pub fn induced_subgraph(&self, nodes: &BTreeSet<NodeId>) -> Result<TemporalGraph> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("induced subgraph of an empty node set".into()));
        }
        let mut remap = vec![None; self.num_nodes()];
        let mut registry = NodeRegistry::new();
        for &p in nodes {
            let label = self.registry.label(p).ok_or(Error::NodeOutOfRange {
                id: p.index(),
                len: self.num_nodes(),
            })?;
            remap[p.index()] = Some(registry.intern(label));
        }
        let edge_lists = self.snapshots.iter().map(|s| {
            s.edges()
                .iter()
                .filter_map(|&(u, v)| Some((remap[u.index()]?, remap[v.index()]?)))
                .collect::<Vec<_>>()
        });
        TemporalGraph::new(registry, edge_lists)
    }

    /// Consecutive snapshots `range`, re-indexed from zero.
    pub fn window(&self, range: std::ops::Range<usize>) -> Result<TemporalGraph> {
        if range.start >= range.end || range.end > self.snapshots.len() {
            return Err(Error::InvalidArgument(format!(
                "snapshot window {range:?} invalid for {} snapshots",
                self.snapshots.len()
            )));
        }
        let snapshots = self.snapshots[range.clone()]
            .iter()
            .enumerate()
            .map(|(i, s)| s.reindexed(i))
            .collect();
        Ok(TemporalGraph {
            registry: self.registry.clone(),
            snapshots,
        })
    }

    /// Number of edges in each snapshot.
    pub fn edge_counts(&self) -> Vec<usize> {
        self.snapshots.iter().map(Snapshot::num_edges).collect()
    }
}

/// On-disk JSON form of a [`TemporalGraph`].
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    labels: Vec<String>,
    snapshots: Vec<Vec<(u32, u32)>>,
}

impl Serialize for TemporalGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile {
            labels: self.registry.labels.clone(),
            snapshots: self
                .snapshots
                .iter()
                .map(|s| s.edges.iter().map(|&(u, v)| (u.0, v.0)).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TemporalGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(deserializer)?;
        let registry = NodeRegistry::from_labels(file.labels).map_err(serde::de::Error::custom)?;
        let lists = file.snapshots.into_iter().map(|edges| {
            edges
                .into_iter()
                .map(|(u, v)| (NodeId(u), NodeId(v)))
                .collect::<Vec<_>>()
        });
        TemporalGraph::new(registry, lists).map_err(serde::de::Error::custom)
    }
}
