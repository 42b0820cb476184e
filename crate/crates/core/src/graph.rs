//! The network model: a directed acyclic multigraph with an ordered list of
//! source nodes and a single sink.
//!
//! Edges are identified by id, never by endpoint pair, so parallel edges are
//! ordinary. All tie-breaks use ascending lexicographic order of ids.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{EdgeSet, SourceSet};

/// Largest edge or source count representable by the bitset types.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone)]
pub struct Network {
    alphabet_size: usize,
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    sources: Vec<usize>,
    sink: usize,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    source_of_node: Vec<Option<usize>>,
    /// Sources with a directed path to each node (reflexive).
    reached_by: Vec<SourceSet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    alphabet_size: usize,
    nodes: Vec<String>,
    sources: Vec<String>,
    sink: String,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    id: String,
    tail: String,
    head: String,
}

impl Network {
    /// Builds a network, checking id uniqueness and that every referenced
    /// node exists. Structural rules are left to [`validate_network`].
    pub fn new<N, S, E>(alphabet_size: usize, nodes: N, sources: S, sink: &str, edges: E) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        S: IntoIterator,
        S::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, id) in nodes.iter().enumerate() {
            if node_index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "node",
                    id: id.clone(),
                });
            }
        }
        let lookup = |id: &str| {
            node_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownNode(id.to_string()))
        };

        let mut edge_list = Vec::new();
        let mut edge_index = HashMap::new();
        for (id, tail, head) in edges {
            if edge_index.contains_key(&id) {
                return Err(Error::DuplicateId { kind: "edge", id });
            }
            let edge = Edge {
                tail: lookup(&tail)?,
                head: lookup(&head)?,
                id: id.clone(),
            };
            edge_index.insert(id, edge_list.len());
            edge_list.push(edge);
        }
        let sources = sources
            .into_iter()
            .map(|s| lookup(&s.into()))
            .collect::<Result<Vec<_>>>()?;
        let sink = lookup(sink)?;

        if edge_list.len() > MAX_ELEMENTS {
            return Err(Error::LimitExceeded {
                limit: "edge count",
                required: edge_list.len() as u128,
                allowed: MAX_ELEMENTS as u128,
            });
        }
        if sources.len() > MAX_ELEMENTS {
            return Err(Error::LimitExceeded {
                limit: "source count",
                required: sources.len() as u128,
                allowed: MAX_ELEMENTS as u128,
            });
        }

        let mut in_edges = vec![Vec::new(); nodes.len()];
        let mut out_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edge_list.iter().enumerate() {
            out_edges[e.tail].push(i);
            in_edges[e.head].push(i);
        }
        let mut source_of_node = vec![None; nodes.len()];
        for (pos, &node) in sources.iter().enumerate() {
            source_of_node[node].get_or_insert(pos);
        }

        let mut net = Network {
            alphabet_size,
            nodes,
            node_index,
            edges: edge_list,
            edge_index,
            sources,
            sink,
            in_edges,
            out_edges,
            source_of_node,
            reached_by: Vec::new(),
        };
        net.reached_by = (0..net.nodes.len()).map(|_| SourceSet::EMPTY).collect();
        for pos in 0..net.sources.len() {
            for node in net.forward_closure(net.sources[pos]) {
                net.reached_by[node].insert(pos);
            }
        }
        Ok(net)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_id(&self, node: usize) -> &str {
        &self.nodes[node]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Result<usize> {
        self.node_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn edge_id(&self, index: usize) -> &str {
        &self.edges[index].id
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Resolves edge ids to an edge set.
    pub fn edge_set<I, T>(&self, ids: I) -> Result<EdgeSet>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        ids.into_iter().map(|id| self.edge_by_id(id.as_ref())).collect()
    }

    /// Edge ids of a set, in ascending id order.
    pub fn edge_ids(&self, set: EdgeSet) -> Vec<String> {
        let mut ids: Vec<String> = set.iter().map(|e| self.edges[e].id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    /// Node index of source position `pos` (0-based).
    pub fn source_node(&self, pos: usize) -> usize {
        self.sources[pos]
    }

    pub fn source_position(&self, node: usize) -> Option<usize> {
        self.source_of_node[node]
    }

    pub fn all_sources(&self) -> SourceSet {
        SourceSet::full(self.sources.len())
    }

    /// Source node ids of a set, in source order.
    pub fn source_ids(&self, set: SourceSet) -> Vec<String> {
        set.iter().map(|pos| self.nodes[self.sources[pos]].clone()).collect()
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    /// Sources with a directed path to `node`; a source reaches itself.
    pub fn sources_reaching(&self, node: usize) -> SourceSet {
        self.reached_by[node]
    }

    fn forward_closure(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &e in &self.out_edges[u] {
                let v = self.edges[e].head;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        out
    }

    /// Nodes with a directed path to the sink once `removed` edges are deleted.
    pub(crate) fn reaching_sink_without(&self, removed: EdgeSet) -> Vec<bool> {
        let mut alive = vec![false; self.nodes.len()];
        let mut stack = vec![self.sink];
        alive[self.sink] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.in_edges[v] {
                if removed.contains(e) {
                    continue;
                }
                let u = self.edges[e].tail;
                if !alive[u] {
                    alive[u] = true;
                    stack.push(u);
                }
            }
        }
        alive
    }

    /// Serializes to the network file format with canonical field order.
    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            alphabet_size: self.alphabet_size,
            nodes: self.nodes.clone(),
            sources: self.sources.iter().map(|&s| self.nodes[s].clone()).collect(),
            sink: self.nodes[self.sink].clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    tail: self.nodes[e.tail].clone(),
                    head: self.nodes[e.head].clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("network serialization")
    }

    /// Topological order of node indices, ties broken by ascending node id.
    pub(crate) fn topo_indices(&self) -> Result<Vec<usize>> {
        let mut indegree: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(&str, usize)> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| (self.nodes[v].as_str(), v))
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(first) = ready.pop_first() {
            let u = first.1;
            order.push(u);
            for &e in &self.out_edges[u] {
                let v = self.edges[e].head;
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    ready.insert((self.nodes[v].as_str(), v));
                }
            }
        }
        if order.len() != self.nodes.len() {
            return Err(Error::Cycle);
        }
        Ok(order)
    }

    /// Edge indices sorted by the topological position of their tail, then
    /// by id. Every edge comes after all in-edges of its tail.
    pub fn edge_order(&self) -> Result<Vec<usize>> {
        let topo = self.topo_indices()?;
        let mut position = vec![0; self.nodes.len()];
        for (i, &v) in topo.iter().enumerate() {
            position[v] = i;
        }
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            (position[self.edges[a].tail], &self.edges[a].id).cmp(&(position[self.edges[b].tail], &self.edges[b].id))
        });
        Ok(order)
    }
}

/// Parses the JSON network file. Does not check structural invariants.
pub fn parse_network(text: &str) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text).map_err(Error::from_json)?;
    Network::new(
        file.alphabet_size,
        file.nodes,
        file.sources,
        &file.sink,
        file.edges.into_iter().map(|e| (e.id, e.tail, e.head)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AlphabetTooSmall(usize),
    NoSources,
    DuplicateSource(String),
    SinkIsSource(String),
    SourceHasIncomingEdge(String),
    SinkHasOutgoingEdge(String),
    Cycle,
    NoPathToSink(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AlphabetTooSmall(q) => write!(f, "alphabet size below 2: {q}"),
            Violation::NoSources => write!(f, "no sources"),
            Violation::DuplicateSource(id) => write!(f, "duplicate source: {id}"),
            Violation::SinkIsSource(id) => write!(f, "sink listed as source: {id}"),
            Violation::SourceHasIncomingEdge(id) => write!(f, "source has incoming edge: {id}"),
            Violation::SinkHasOutgoingEdge(id) => write!(f, "sink has outgoing edge: {id}"),
            Violation::Cycle => write!(f, "cycle detected"),
            Violation::NoPathToSink(id) => write!(f, "no path to sink: {id}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_network(net: &Network) -> ValidationReport {
    let mut violations = Vec::new();
    if net.alphabet_size < 2 {
        violations.push(Violation::AlphabetTooSmall(net.alphabet_size));
    }
    if net.sources.is_empty() {
        violations.push(Violation::NoSources);
    }
    let mut seen = BTreeSet::new();
    for &s in &net.sources {
        let id = &net.nodes[s];
        if !seen.insert(s) {
            violations.push(Violation::DuplicateSource(id.clone()));
        }
        if s == net.sink {
            violations.push(Violation::SinkIsSource(id.clone()));
        }
    }
    for &s in &seen {
        if !net.in_edges[s].is_empty() {
            violations.push(Violation::SourceHasIncomingEdge(net.nodes[s].clone()));
        }
    }
    if !net.out_edges[net.sink].is_empty() {
        violations.push(Violation::SinkHasOutgoingEdge(net.nodes[net.sink].clone()));
    }
    if net.topo_indices().is_err() {
        violations.push(Violation::Cycle);
    }
    let alive = net.reaching_sink_without(EdgeSet::EMPTY);
    for (v, ok) in alive.iter().enumerate() {
        if !ok {
            violations.push(Violation::NoPathToSink(net.nodes[v].clone()));
        }
    }
    ValidationReport { violations }
}

/// Node ids in topological order, ties broken by ascending id.
pub fn topo_order(net: &Network) -> Result<Vec<String>> {
    Ok(net.topo_indices()?.into_iter().map(|v| net.nodes[v].clone()).collect())
}

/// Whether a directed path leads from `u` to `v`. `reaches(u, u)` is true.
pub fn reaches(net: &Network, u: &str, v: &str) -> Result<bool> {
    let u = net.node(u)?;
    let v = net.node(v)?;
    Ok(net.forward_closure(u).contains(&v))
}
