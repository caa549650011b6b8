use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distinct node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected simple graph: no self-loops, no parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<NodeId>,
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

/// On-disk form: `{"nodes": [..], "edges": [[a, b], ..]}`.
#[derive(Debug, Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<NodeId>,
    edges: Vec<[NodeId; 2]>,
}

impl Topology {
    pub fn new(
        nodes: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        Self::from_ids(
            nodes.into_iter().map(NodeId).collect(),
            edges.into_iter().map(|(a, b)| (NodeId(a), NodeId(b))).collect(),
        )
    }

    pub fn from_ids(nodes: Vec<NodeId>, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for &n in &nodes {
            if adj.insert(n, BTreeSet::new()).is_some() {
                return Err(Error::Topology(format!("duplicate node {n}")));
            }
        }
        for (a, b) in edges {
            if a == b {
                return Err(Error::Topology(format!("self-loop at node {a}")));
            }
            if !adj.contains_key(&a) || !adj.contains_key(&b) {
                return Err(Error::Topology(format!("edge ({a}, {b}) has an unknown endpoint")));
            }
            if !adj.get_mut(&a).unwrap().insert(b) {
                return Err(Error::Topology(format!("duplicate edge ({a}, {b})")));
            }
            adj.get_mut(&b).unwrap().insert(a);
        }
        let nodes = adj.keys().copied().collect();
        Ok(Topology { nodes, adj })
    }

    /// Nodes in ascending identifier order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.adj.contains_key(&u)
    }

    /// Rank of `u` in ascending identifier order.
    pub fn position(&self, u: NodeId) -> Option<usize> {
        self.nodes.binary_search(&u).ok()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj.get(&a).is_some_and(|ns| ns.contains(&b))
    }

    pub fn neighbors(&self, u: NodeId) -> Result<&BTreeSet<NodeId>> {
        self.adj.get(&u).ok_or_else(|| Error::arg(format!("unknown node {u}")))
    }

    pub fn degree(&self, u: NodeId) -> Result<usize> {
        Ok(self.neighbors(u)?.len())
    }

    /// Nodes at distance at most `radius` from `u` (breadth-first).
    pub fn neighborhood(&self, u: NodeId, radius: usize) -> Result<BTreeSet<NodeId>> {
        self.neighbors(u)?;
        let mut seen = BTreeSet::from([u]);
        let mut queue = VecDeque::from([(u, 0usize)]);
        while let Some((v, dist)) = queue.pop_front() {
            if dist == radius {
                continue;
            }
            for &w in &self.adj[&v] {
                if seen.insert(w) {
                    queue.push_back((w, dist + 1));
                }
            }
        }
        Ok(seen)
    }

    pub fn components(&self) -> Vec<BTreeSet<NodeId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &u in &self.nodes {
            if seen.contains(&u) {
                continue;
            }
            let comp = self.neighborhood(u, usize::MAX).expect("node exists");
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Same node set, keeping only the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> Topology {
        let edges = self.edges().filter(|&(a, b)| keep(a, b)).collect();
        Topology::from_ids(self.nodes.clone(), edges).expect("subgraph of a valid topology")
    }

    /// Renames every node through `map`, which must be injective on the nodes.
    pub fn relabel(&self, map: &BTreeMap<NodeId, NodeId>) -> Result<Topology> {
        let get = |n: NodeId| {
            map.get(&n)
                .copied()
                .ok_or_else(|| Error::arg(format!("relabeling does not cover node {n}")))
        };
        let nodes = self.nodes.iter().map(|&n| get(n)).collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges()
            .map(|(a, b)| Ok((get(a)?, get(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Topology::from_ids(nodes, edges)
    }

    /// Disjoint union; identifiers must not collide.
    pub fn disjoint_union(parts: &[Topology]) -> Result<Topology> {
        let nodes = parts.iter().flat_map(|t| t.nodes.iter().copied()).collect();
        let edges = parts.iter().flat_map(|t| t.edges()).collect();
        Topology::from_ids(nodes, edges)
    }

    pub fn to_json(&self) -> String {
        let file = TopologyFile {
            nodes: self.nodes.clone(),
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&file).expect("topology serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text)?;
        Topology::from_ids(file.nodes, file.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Breadth-first ball of radius `r` around `u`.
pub fn neighborhood(topology: &Topology, u: NodeId, r: usize) -> Result<BTreeSet<NodeId>> {
    topology.neighborhood(u, r)
}
