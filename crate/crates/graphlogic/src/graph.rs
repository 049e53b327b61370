//! Labeled graphs with irreflexive symmetric edges, modules, contexts,
//! duals and composition-via.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GraphError;

/// A propositional literal: an atom with a polarity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: Arc<str>,
    positive: bool,
}

impl Literal {
    pub fn new(atom: &str, positive: bool) -> Self {
        Literal {
            atom: Arc::from(atom),
            positive,
        }
    }

    pub fn pos(atom: &str) -> Self {
        Self::new(atom, true)
    }

    pub fn neg(atom: &str) -> Self {
        Self::new(atom, false)
    }

    pub fn atom(&self) -> &str {
        &self.atom
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Flip the polarity. Negating twice yields the original literal.
    pub fn negate(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    /// Parse `a` or `~a`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let t = text.trim();
        let (body, positive) = match t.strip_prefix('~') {
            Some(rest) => (rest, false),
            None => (t, true),
        };
        if !is_atom_name(body) {
            return Err(GraphError::Format(format!("invalid literal `{text}`")));
        }
        Ok(Literal::new(body, positive))
    }
}

/// Atom names: `[a-z][a-z0-9_]*`, excluding the unit `o`.
pub fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    s != "o" && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Literal::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// An explicit vertex map, used for isomorphisms and similarities.
pub type VertexMap = BTreeMap<VertexId, VertexId>;

fn ordered(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A finite graph whose vertices may carry literal labels.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct LabeledGraph {
    labels: BTreeMap<VertexId, Option<Literal>>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl LabeledGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from vertex and edge lists, validating every invariant.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (VertexId, Option<Literal>)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = LabeledGraph::new();
        for (v, l) in vertices {
            g.add_vertex(v, l)?;
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// A single labeled vertex.
    pub fn singleton(v: VertexId, label: Option<Literal>) -> Self {
        let mut g = LabeledGraph::new();
        g.labels.insert(v, label);
        g
    }

    /// Unlabeled graph on vertices `0..n` with the given index edges.
    pub fn unlabeled(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = LabeledGraph::new();
        for i in 0..n {
            g.labels.insert(VertexId(i as u32), None);
        }
        for &(a, b) in edges {
            g.add_edge(VertexId(a as u32), VertexId(b as u32))
                .expect("valid edge");
        }
        g
    }

    pub fn add_vertex(&mut self, v: VertexId, label: Option<Literal>) -> Result<(), GraphError> {
        if self.labels.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.labels.insert(v, label);
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.labels.contains_key(&w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        self.edges.insert(ordered(u, v));
        Ok(())
    }

    pub fn set_label(&mut self, v: VertexId, label: Option<Literal>) -> Result<(), GraphError> {
        match self.labels.get_mut(&v) {
            Some(l) => {
                *l = label;
                Ok(())
            }
            None => Err(GraphError::UnknownVertex(v)),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.labels.contains_key(&v)
    }

    /// Vertices in increasing id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.labels.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.labels.keys().copied().collect()
    }

    pub fn label(&self, v: VertexId) -> Option<&Literal> {
        self.labels.get(&v).and_then(|l| l.as_ref())
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, Option<Literal>> {
        &self.labels
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.edges.contains(&ordered(u, v))
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn max_id(&self) -> Option<VertexId> {
        self.labels.keys().next_back().copied()
    }

    fn check_subset(&self, w: &BTreeSet<VertexId>) -> Result<(), GraphError> {
        match w.iter().find(|v| !self.labels.contains_key(v)) {
            Some(&v) => Err(GraphError::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    /// The graph induced by `w`.
    pub fn induced_subgraph(&self, w: &BTreeSet<VertexId>) -> Result<LabeledGraph, GraphError> {
        self.check_subset(w)?;
        let labels = w.iter().map(|v| (*v, self.labels[v].clone())).collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| w.contains(a) && w.contains(b))
            .copied()
            .collect();
        Ok(LabeledGraph { labels, edges })
    }

    /// Whether every pair in `w` has identical adjacency to every outside vertex.
    pub fn is_module(&self, w: &BTreeSet<VertexId>) -> Result<bool, GraphError> {
        self.check_subset(w)?;
        let Some(&first) = w.iter().next() else {
            return Ok(true);
        };
        for z in self.vertices().filter(|z| !w.contains(z)) {
            let reference = self.has_edge(first, z);
            if w.iter().any(|&x| self.has_edge(x, z) != reference) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The dual graph: complemented edges and negated labels.
    pub fn dual(&self) -> Result<LabeledGraph, GraphError> {
        let mut labels = BTreeMap::new();
        for (v, l) in &self.labels {
            match l {
                Some(l) => labels.insert(*v, Some(l.negate())),
                None => return Err(GraphError::Unlabeled(*v)),
            };
        }
        let mut out = LabeledGraph {
            labels,
            edges: BTreeSet::new(),
        };
        out.edges = self.complement_edges();
        Ok(out)
    }

    /// Complement edges, keeping labels untouched (works for unlabeled graphs).
    pub fn complement(&self) -> LabeledGraph {
        LabeledGraph {
            labels: self.labels.clone(),
            edges: self.complement_edges(),
        }
    }

    fn complement_edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        let vs: Vec<VertexId> = self.vertices().collect();
        let mut edges = BTreeSet::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !self.edges.contains(&(u, v)) {
                    edges.insert((u, v));
                }
            }
        }
        edges
    }

    /// Shift every vertex id by `offset`.
    pub fn shifted(&self, offset: u32) -> LabeledGraph {
        self.relabeled(|v| VertexId(v.0 + offset))
    }

    /// Rename vertices through `f`, which must be injective on this graph.
    pub fn relabeled(&self, f: impl Fn(VertexId) -> VertexId) -> LabeledGraph {
        let labels = self
            .labels
            .iter()
            .map(|(v, l)| (f(*v), l.clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| ordered(f(a), f(b)))
            .collect();
        LabeledGraph { labels, edges }
    }

    /// Rename vertices to `0..n` in id order; returns the graph and the old ids.
    pub fn compacted(&self) -> (LabeledGraph, Vec<VertexId>) {
        let old: Vec<VertexId> = self.vertices().collect();
        let index: BTreeMap<VertexId, u32> = old
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        (self.relabeled(|v| VertexId(index[&v])), old)
    }

    /// Composition of `parts` via this graph, whose vertices are taken in id order.
    /// Parts keep their vertex ids and must be pairwise disjoint.
    pub fn compose_via(&self, parts: &[LabeledGraph]) -> Result<LabeledGraph, GraphError> {
        if parts.len() != self.len() {
            return Err(GraphError::ArityMismatch {
                expected: self.len(),
                got: parts.len(),
            });
        }
        let mut out = LabeledGraph::new();
        for part in parts {
            for (v, l) in &part.labels {
                if out.labels.insert(*v, l.clone()).is_some() {
                    return Err(GraphError::OverlappingParts(*v));
                }
            }
            out.edges.extend(part.edges.iter().copied());
        }
        let order: Vec<VertexId> = self.vertices().collect();
        for (i, &vi) in order.iter().enumerate() {
            for (j, &vj) in order.iter().enumerate().skip(i + 1) {
                if self.has_edge(vi, vj) {
                    for a in parts[i].vertices() {
                        for b in parts[j].vertices() {
                            out.edges.insert(ordered(a, b));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Disjoint union (composition via a stable set).
    pub fn disjoint_union(parts: &[LabeledGraph]) -> Result<LabeledGraph, GraphError> {
        let template = LabeledGraph::unlabeled(parts.len(), &[]);
        template.compose_via(parts)
    }

    /// Maximal connected vertex sets, ordered by their least vertex.
    pub fn connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let adjacency: BTreeMap<VertexId, Vec<VertexId>> = {
            let mut m: BTreeMap<VertexId, Vec<VertexId>> =
                self.vertices().map(|v| (v, Vec::new())).collect();
            for &(a, b) in &self.edges {
                m.get_mut(&a).unwrap().push(b);
                m.get_mut(&b).unwrap().push(a);
            }
            m
        };
        for start in self.vertices() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[&v] {
                    if seen.insert(w) {
                        comp.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Whether `f` is a label- and edge-preserving bijection onto `other`.
    /// Runs in quadratic time in the number of vertices.
    pub fn verify_isomorphism(
        &self,
        other: &LabeledGraph,
        f: &VertexMap,
    ) -> Result<bool, GraphError> {
        self.check_bijection(other, f)?;
        for (v, l) in &self.labels {
            if other.labels[&f[v]] != *l {
                return Ok(false);
            }
        }
        Ok(self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .all(|&(a, b)| other.has_edge(f[&a], f[&b])))
    }

    /// Whether `f` preserves edges (labels ignored): a similarity.
    pub fn verify_similarity(
        &self,
        other: &LabeledGraph,
        f: &VertexMap,
    ) -> Result<bool, GraphError> {
        self.check_bijection(other, f)?;
        Ok(self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .all(|&(a, b)| other.has_edge(f[&a], f[&b])))
    }

    fn check_bijection(&self, other: &LabeledGraph, f: &VertexMap) -> Result<(), GraphError> {
        let domain: BTreeSet<VertexId> = f.keys().copied().collect();
        let image: BTreeSet<VertexId> = f.values().copied().collect();
        if domain != self.vertex_set() || image != other.vertex_set() || image.len() != domain.len()
        {
            return Err(GraphError::NotBijection);
        }
        Ok(())
    }

    /// Whether every vertex carries a label.
    pub fn fully_labeled(&self) -> bool {
        self.labels.values().all(|l| l.is_some())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .labels
                .iter()
                .map(|(v, l)| VertexJson {
                    id: v.0,
                    label: l.clone(),
                })
                .collect(),
            edges: self.edges.iter().map(|(a, b)| [a.0, b.0]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        LabeledGraph::from_parts(
            json.vertices
                .iter()
                .map(|v| (VertexId(v.id), v.label.clone())),
            json.edges.iter().map(|[a, b]| (VertexId(*a), VertexId(*b))),
        )
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let json: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        Self::from_json(&json)
    }

    /// Deterministic DOT rendering with sorted vertices and edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, l) in &self.labels {
            let text = l.as_ref().map(|l| l.to_string()).unwrap_or_default();
            out.push_str(&format!("  v{} [label=\"{}\"];\n", v.0, text));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  v{} -- v{};\n", a.0, b.0));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexJson {
    pub id: u32,
    pub label: Option<Literal>,
}

/// Wire format: `{"vertices":[{"id":0,"label":"a"}],"edges":[[0,1]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[u32; 2]>,
}

/// A graph with exactly one unlabeled hole vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphContext {
    graph: LabeledGraph,
    hole: VertexId,
}

impl GraphContext {
    pub fn new(graph: LabeledGraph, hole: VertexId) -> Result<Self, GraphError> {
        match graph.labels.get(&hole) {
            None => Err(GraphError::UnknownVertex(hole)),
            Some(Some(_)) => Err(GraphError::LabeledHole(hole)),
            Some(None) => Ok(GraphContext { graph, hole }),
        }
    }

    /// The trivial context consisting of the hole alone.
    pub fn trivial(hole: VertexId) -> Self {
        GraphContext {
            graph: LabeledGraph::singleton(hole, None),
            hole,
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn hole(&self) -> VertexId {
        self.hole
    }

    /// Replace the hole by `g`; former hole neighbours see all of `g`.
    pub fn plug(&self, g: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
        let mut out = LabeledGraph::new();
        for (v, l) in &self.graph.labels {
            if *v != self.hole {
                out.labels.insert(*v, l.clone());
            }
        }
        for (v, l) in &g.labels {
            if out.labels.insert(*v, l.clone()).is_some() {
                return Err(GraphError::OverlappingParts(*v));
            }
        }
        for &(a, b) in &self.graph.edges {
            if a != self.hole && b != self.hole {
                out.edges.insert((a, b));
            }
        }
        out.edges.extend(g.edges.iter().copied());
        for n in self.graph.neighbors(self.hole) {
            for v in g.vertices() {
                out.edges.insert(ordered(n, v));
            }
        }
        Ok(out)
    }
}

/// Free function form of [`GraphContext::plug`].
pub fn plug_context(c: &GraphContext, g: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
    c.plug(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn set(ids: &[u32]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    fn labeled_chain(names: &[&str]) -> LabeledGraph {
        let mut g = LabeledGraph::new();
        for (i, n) in names.iter().enumerate() {
            g.add_vertex(v(i as u32), Some(Literal::parse(n).unwrap()))
                .unwrap();
        }
        for i in 1..names.len() {
            g.add_edge(v(i as u32 - 1), v(i as u32)).unwrap();
        }
        g
    }

    #[test]
    fn literal_double_negation() {
        let a = Literal::pos("a");
        assert_eq!(a.negate().negate(), a);
        assert_eq!(Literal::parse("~x1").unwrap(), Literal::neg("x1"));
        assert!(Literal::parse("o").is_err());
        assert!(Literal::parse("A").is_err());
    }

    #[test]
    fn rejects_self_loops_and_unknown_endpoints() {
        let mut g = LabeledGraph::unlabeled(2, &[]);
        assert_eq!(g.add_edge(v(0), v(0)), Err(GraphError::SelfLoop(v(0))));
        assert_eq!(g.add_edge(v(0), v(7)), Err(GraphError::UnknownVertex(v(7))));
        g.add_edge(v(1), v(0)).unwrap();
        assert!(g.has_edge(v(0), v(1)));
    }

    #[test]
    fn induced_path_of_chain() {
        let g = labeled_chain(&["a", "b", "c", "d"]);
        let h = g.induced_subgraph(&set(&[0, 1, 2])).unwrap();
        assert_eq!(
            h.edges().collect::<Vec<_>>(),
            vec![(v(0), v(1)), (v(1), v(2))]
        );
        assert!(g.induced_subgraph(&BTreeSet::new()).unwrap().is_empty());
        assert_eq!(g.induced_subgraph(&g.vertex_set()).unwrap(), g);
        assert!(g.induced_subgraph(&set(&[9])).is_err());
    }

    #[test]
    fn module_checks() {
        let chain = labeled_chain(&["a", "b", "c", "d"]);
        assert!(!chain.is_module(&set(&[1, 2])).unwrap());
        assert!(chain.is_module(&set(&[2])).unwrap());
        // two boxed pairs {a,b} and {c,d}, with e adjacent to both pairs
        let g = LabeledGraph::from_parts(
            (0..5).map(|i| {
                (
                    v(i),
                    Some(Literal::pos(["a", "b", "c", "d", "e"][i as usize])),
                )
            }),
            [(0, 1), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)].map(|(a, b)| (v(a), v(b))),
        )
        .unwrap();
        assert!(g.is_module(&set(&[0, 1])).unwrap());
        assert!(g.is_module(&set(&[2, 3])).unwrap());
    }

    #[test]
    fn dual_of_edge_is_stable_pair() {
        let g = labeled_chain(&["a", "b"]);
        let d = g.dual().unwrap();
        assert_eq!(d.edge_count(), 0);
        assert_eq!(d.label(v(0)), Some(&Literal::neg("a")));
        assert_eq!(d.dual().unwrap(), g);
        assert!(LabeledGraph::unlabeled(1, &[]).dual().is_err());
    }

    #[test]
    fn composition_via_stable_set_and_singleton() {
        let h1 = labeled_chain(&["a", "b"]);
        let h2 = labeled_chain(&["c"]).shifted(5);
        let union = LabeledGraph::unlabeled(2, &[])
            .compose_via(&[h1.clone(), h2.clone()])
            .unwrap();
        assert_eq!(union.len(), 3);
        assert_eq!(union.edge_count(), 1);
        let single = LabeledGraph::unlabeled(1, &[])
            .compose_via(&[h1.clone()])
            .unwrap();
        assert_eq!(single, h1);
        assert!(LabeledGraph::unlabeled(2, &[])
            .compose_via(&[h1.clone()])
            .is_err());
        assert!(LabeledGraph::unlabeled(2, &[])
            .compose_via(&[h1.clone(), h1])
            .is_err());
    }

    #[test]
    fn plugging_contexts() {
        let g = labeled_chain(&["a", "b"]).shifted(10);
        assert_eq!(GraphContext::trivial(v(0)).plug(&g).unwrap(), g);
        // hole tensor x, plugged with the empty graph
        let mut c = LabeledGraph::unlabeled(1, &[]);
        c.add_vertex(v(1), Some(Literal::pos("x"))).unwrap();
        c.add_edge(v(0), v(1)).unwrap();
        let ctx = GraphContext::new(c, v(0)).unwrap();
        let plugged = ctx.plug(&LabeledGraph::new()).unwrap();
        assert_eq!(plugged.len(), 1);
        // hole par x, plugged with a tensor b
        let mut c = LabeledGraph::unlabeled(1, &[]);
        c.add_vertex(v(1), Some(Literal::pos("x"))).unwrap();
        let ctx = GraphContext::new(c, v(0)).unwrap();
        let plugged = ctx.plug(&g).unwrap();
        assert_eq!(plugged.edges().collect::<Vec<_>>(), vec![(v(10), v(11))]);
        assert_eq!(plugged.len(), 3);
    }

    #[test]
    fn components() {
        let stable = LabeledGraph::unlabeled(3, &[]);
        assert_eq!(stable.connected_components().len(), 3);
        let p4 = LabeledGraph::unlabeled(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(p4.connected_components().len(), 1);
        let g = LabeledGraph::unlabeled(3, &[(0, 1)]);
        assert_eq!(g.connected_components(), vec![set(&[0, 1]), set(&[2])]);
    }

    #[test]
    fn json_and_dot_roundtrip() {
        let g = labeled_chain(&["a", "~b"]);
        let text = g.to_json_string();
        assert_eq!(
            text,
            r#"{"vertices":[{"id":0,"label":"a"},{"id":1,"label":"~b"}],"edges":[[0,1]]}"#
        );
        assert_eq!(LabeledGraph::from_json_str(&text).unwrap(), g);
        let dot = labeled_chain(&["a"]).to_dot();
        assert_eq!(dot, "graph G {\n  v0 [label=\"a\"];\n}\n");
    }

    #[test]
    fn candidate_isomorphism_is_checked() {
        let g = labeled_chain(&["a", "b"]);
        let swap: VertexMap = [(v(0), v(1)), (v(1), v(0))].into_iter().collect();
        assert!(!g.verify_isomorphism(&g, &swap).unwrap());
        assert!(g.verify_similarity(&g, &swap).unwrap());
        let bad: VertexMap = [(v(0), v(0))].into_iter().collect();
        assert_eq!(
            g.verify_isomorphism(&g, &bad),
            Err(GraphError::NotBijection)
        );
    }
}
