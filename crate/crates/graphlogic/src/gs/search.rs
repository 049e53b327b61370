//! Bounded backward proof search in GS. From the goal graph, rule instances
//! are matched against the modular decomposition and replaced by their
//! premises until the empty graph is reached. Every backward step either
//! deletes two vertices (ai↓) or strictly adds edges, so search terminates.

use std::collections::HashMap;

use super::{context_around, Derivation, GsRule, RuleInstance, Template, VertexSet, Witness};
use crate::decomp::{self, Adj, Base, RootKind};
use crate::error::GsError;
use crate::graph::{LabeledGraph, VertexId};
use std::collections::BTreeSet;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GsSearchConfig {
    /// Maximal number of rule instances in a derivation.
    pub bound: usize,
    /// Maximal number of graphs expanded before giving up.
    pub node_budget: usize,
}

impl Default for GsSearchConfig {
    fn default() -> Self {
        GsSearchConfig {
            bound: 64,
            node_budget: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GsOutcome {
    Found(Derivation),
    Refuted,
    Unknown,
}

impl GsOutcome {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            GsOutcome::Found(d) => Some(d),
            _ => None,
        }
    }
}

/// Search a derivation of `g` from the empty graph using `rules`.
/// Only ai↓, s⅋, s⊗, p↓ and p1↓ are searched.
pub fn gs_search(
    g: &LabeledGraph,
    rules: &BTreeSet<GsRule>,
    cfg: GsSearchConfig,
    base: &Base,
) -> Result<GsOutcome, GsError> {
    if rules.contains(&GsRule::P2) {
        return Err(GsError::Domain("search does not support p2↓".into()));
    }
    if !g.fully_labeled() {
        return Err(GsError::Domain("search needs every vertex labeled".into()));
    }
    let mut s = Searcher {
        rules,
        base,
        memo: HashMap::new(),
        visited: 0,
        budget: cfg.node_budget,
    };
    Ok(match s.prove(g, cfg.bound)? {
        Res::Found(d) => GsOutcome::Found(d),
        Res::Failed { cut: false } => GsOutcome::Refuted,
        Res::Failed { cut: true } => GsOutcome::Unknown,
    })
}

enum Res {
    Found(Derivation),
    /// `cut` records whether the bound or budget pruned part of the search.
    Failed {
        cut: bool,
    },
}

enum Memo {
    Found(Derivation, LabeledGraph),
    /// Refuted within the given bound; `None` means refuted outright.
    Refuted(Option<usize>),
}

struct Searcher<'a> {
    rules: &'a BTreeSet<GsRule>,
    base: &'a Base,
    memo: HashMap<String, Memo>,
    visited: usize,
    budget: usize,
}

impl Searcher<'_> {
    fn prove(&mut self, g: &LabeledGraph, bound: usize) -> Result<Res, GsError> {
        if g.is_empty() {
            return Ok(Res::Found(Derivation::Trivial(g.clone())));
        }
        if !balanced(g) {
            return Ok(Res::Failed { cut: false });
        }
        let key = decomp::canonical_form(&decomp::decompose(g, self.base)?).shape_key();
        match self.memo.get(&key) {
            Some(Memo::Found(d, h)) => {
                if let Some(iso) = decomp::find_isomorphism(h, g, None)? {
                    return Ok(Res::Found(d.clone().renamed(g.clone(), iso)));
                }
            }
            Some(Memo::Refuted(None)) => return Ok(Res::Failed { cut: false }),
            Some(Memo::Refuted(Some(b))) if *b >= bound => return Ok(Res::Failed { cut: true }),
            _ => {}
        }
        if bound == 0 || self.visited >= self.budget {
            return Ok(Res::Failed { cut: true });
        }
        self.visited += 1;
        let mut cut = false;
        for (rule, witness) in moves(g, self.rules, self.base)? {
            let site = witness.support();
            let local = g.induced_subgraph(&site)?;
            let Ok(inst) = RuleInstance::from_conclusion(rule, local, witness) else {
                continue;
            };
            if inst.is_identity() {
                continue;
            }
            let inst = inst.with_context(context_around(g, &site)?);
            let premise = inst.premise_graph()?;
            match self.prove(&premise, bound - 1)? {
                Res::Found(d) => {
                    let d = d.then(Derivation::rule(inst))?;
                    self.memo.insert(key, Memo::Found(d.clone(), g.clone()));
                    return Ok(Res::Found(d));
                }
                Res::Failed { cut: c } => cut |= c,
            }
        }
        self.memo.insert(key, Memo::Refuted(cut.then_some(bound)));
        Ok(Res::Failed { cut })
    }
}

/// Every atom occurs as often positively as negatively.
fn balanced(g: &LabeledGraph) -> bool {
    let mut count: HashMap<&str, i64> = HashMap::new();
    for v in g.vertices() {
        if let Some(l) = g.label(v) {
            *count.entry(l.atom()).or_default() += if l.is_positive() { 1 } else { -1 };
        }
    }
    count.values().all(|&c| c == 0)
}

/// A node of the modular decomposition with its vertex set.
struct Node {
    verts: VertexSet,
    kind: RootKind,
    children: Vec<Node>,
    /// Quotient of a prime node, indexed like `children`.
    quotient: Adj,
}

impl Node {
    fn build(g: &LabeledGraph, verts: VertexSet) -> Result<Node, GsError> {
        let sub = g.induced_subgraph(&verts)?;
        let (kind, blocks) = decomp::root_partition(&sub);
        if kind == RootKind::Single {
            return Ok(Node {
                verts,
                kind,
                children: vec![],
                quotient: vec![],
            });
        }
        let children = blocks
            .into_iter()
            .map(|b| Node::build(g, b))
            .collect::<Result<Vec<_>, _>>()?;
        let reps: Vec<VertexId> = children
            .iter()
            .map(|c| *c.verts.iter().next().expect("non-empty block"))
            .collect();
        let quotient = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| a != b && g.has_edge(a, b)).collect())
            .collect();
        Ok(Node {
            verts,
            kind,
            children,
            quotient,
        })
    }

    fn leaf(&self) -> Option<VertexId> {
        (self.kind == RootKind::Single).then(|| *self.verts.iter().next().expect("leaf vertex"))
    }

    fn visit<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        self.children.iter().for_each(|c| c.visit(out));
    }
}

fn union_of<'a>(nodes: impl IntoIterator<Item = &'a Node>) -> VertexSet {
    nodes
        .into_iter()
        .flat_map(|n| n.verts.iter().copied())
        .collect()
}

/// Proper non-empty sub-unions of a node's children, with their complements.
fn splits(n: &Node) -> Vec<(VertexSet, VertexSet)> {
    let k = n.children.len();
    (1..(1usize << k) - 1)
        .map(|mask| {
            let pick = |inside: bool| {
                union_of(
                    (0..k)
                        .filter(|i| (mask >> i & 1 == 1) == inside)
                        .map(|i| &n.children[i]),
                )
            };
            (pick(true), pick(false))
        })
        .collect()
}

/// Backward rule applications whose conclusion is a module of `g`.
fn moves(
    g: &LabeledGraph,
    rules: &BTreeSet<GsRule>,
    base: &Base,
) -> Result<Vec<(GsRule, Witness)>, GsError> {
    let root = Node::build(g, g.vertex_set())?;
    let mut nodes = Vec::new();
    root.visit(&mut nodes);
    let mut out = Vec::new();
    let has = |r| rules.contains(&r);
    if has(GsRule::Ai) {
        for n in nodes.iter().filter(|n| n.kind == RootKind::Par) {
            let leaves: Vec<VertexId> = n.children.iter().filter_map(Node::leaf).collect();
            for (i, &a) in leaves.iter().enumerate() {
                for &b in &leaves[i + 1..] {
                    if let (Some(x), Some(y)) = (g.label(a), g.label(b)) {
                        if *y == x.negate() {
                            out.push((
                                GsRule::Ai,
                                Witness::Atom {
                                    first: a,
                                    second: b,
                                },
                            ));
                        }
                    }
                }
            }
        }
    }
    for n in &nodes {
        match n.kind {
            RootKind::Par => par_moves(n, rules, base, g, &mut out)?,
            RootKind::Prime => {
                let q = Template::from_adj(&n.quotient);
                let parts: Vec<VertexSet> = n.children.iter().map(|c| c.verts.clone()).collect();
                if has(GsRule::STens) {
                    for (i, c) in n.children.iter().enumerate() {
                        let mut ps = parts.clone();
                        ps[i].clear();
                        out.push((
                            GsRule::STens,
                            Witness::Switch {
                                template: q.clone(),
                                slot: i,
                                parts: ps,
                                moved: c.verts.clone(),
                            },
                        ));
                        if c.kind == RootKind::Tens {
                            for (m, rest) in splits(c) {
                                let mut ps = parts.clone();
                                ps[i] = rest;
                                out.push((
                                    GsRule::STens,
                                    Witness::Switch {
                                        template: q.clone(),
                                        slot: i,
                                        parts: ps,
                                        moved: m,
                                    },
                                ));
                            }
                        }
                    }
                }
                if has(GsRule::P1) {
                    let right = vec![VertexSet::new(); parts.len()];
                    out.push((
                        GsRule::P1,
                        Witness::Medial {
                            template: q.complement(),
                            left: parts,
                            right,
                        },
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

fn par_moves(
    n: &Node,
    rules: &BTreeSet<GsRule>,
    base: &Base,
    g: &LabeledGraph,
    out: &mut Vec<(GsRule, Witness)>,
) -> Result<(), GsError> {
    let c = &n.children;
    let k = c.len();
    let has = |r| rules.contains(&r);
    let pairs = || (0..k).flat_map(move |a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)));
    if has(GsRule::P) || has(GsRule::P1) {
        let rule = if has(GsRule::P) {
            GsRule::P
        } else {
            GsRule::P1
        };
        for (x, nx) in c
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == RootKind::Tens)
        {
            for (n1, n2) in splits(nx)
                .into_iter()
                .filter(|(n1, _)| n1.first() == nx.verts.first())
            {
                for (i, j) in pairs().filter(|&(i, j)| i != x && j != x) {
                    let left = vec![c[i].verts.clone(), c[j].verts.clone()];
                    out.push((
                        rule,
                        Witness::Medial {
                            template: Template::tens(),
                            left,
                            right: vec![n1.clone(), n2.clone()],
                        },
                    ));
                }
            }
        }
        for x in 0..k {
            for y in x + 1..k {
                let (l, r) = (&c[x], &c[y]);
                if l.kind != RootKind::Prime
                    || r.kind != RootKind::Prime
                    || l.children.len() != r.children.len()
                {
                    continue;
                }
                for sigma in decomp::dualizing_pairings(&l.quotient, &r.quotient, base.cap())? {
                    let left = sigma.iter().map(|&s| l.children[s].verts.clone()).collect();
                    let right = r.children.iter().map(|ch| ch.verts.clone()).collect();
                    out.push((
                        rule,
                        Witness::Medial {
                            template: Template::from_adj(&r.quotient),
                            left,
                            right,
                        },
                    ));
                }
            }
        }
    }
    if has(GsRule::SPar) {
        for (a, r) in pairs() {
            let moved = c[a].verts.clone();
            match c[r].kind {
                RootKind::Tens => {
                    for (nn, rest) in splits(&c[r]) {
                        out.push((
                            GsRule::SPar,
                            Witness::Switch {
                                template: Template::tens(),
                                slot: 1,
                                parts: vec![rest, nn],
                                moved: moved.clone(),
                            },
                        ));
                    }
                }
                RootKind::Prime => {
                    let parts: Vec<VertexSet> =
                        c[r].children.iter().map(|ch| ch.verts.clone()).collect();
                    for i in 0..parts.len() {
                        let template = Template::from_adj(&c[r].quotient);
                        out.push((
                            GsRule::SPar,
                            Witness::Switch {
                                template,
                                slot: i,
                                parts: parts.clone(),
                                moved: moved.clone(),
                            },
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    if has(GsRule::STens) {
        for (x, d) in pairs().filter(|&(x, _)| c[x].kind == RootKind::Tens) {
            for (m, rest) in splits(&c[x]) {
                out.push((
                    GsRule::STens,
                    Witness::Switch {
                        template: Template::par(),
                        slot: 1,
                        parts: vec![c[d].verts.clone(), rest],
                        moved: m,
                    },
                ));
            }
        }
    }
    if has(GsRule::P1) {
        // M₁ ⅋ X ⟵ M₁ ⊗ X
        for i in 0..k {
            let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
            for mask in 1..(1usize << others.len()) {
                let x = union_of(
                    others
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &j)| &c[j]),
                );
                let left = vec![c[i].verts.clone(), x];
                out.push((
                    GsRule::P1,
                    Witness::Medial {
                        template: Template::tens(),
                        left,
                        right: vec![VertexSet::new(); 2],
                    },
                ));
            }
        }
        // ¬T⟨M⟩ ⅋ T⟨N⟩ with some Nᵢ empty, T of arity at least four
        for (x, l) in c
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == RootKind::Prime)
        {
            let t = decomp::complement_adj(&l.quotient);
            let left: Vec<VertexSet> = l.children.iter().map(|ch| ch.verts.clone()).collect();
            let others: Vec<usize> = (0..k).filter(|&j| j != x).collect();
            for mask in 1..(1usize << others.len()) {
                let r: Vec<VertexId> = others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .flat_map(|(_, &j)| c[j].verts.iter().copied())
                    .collect();
                for right in slot_assignments(g, &t, &r) {
                    out.push((
                        GsRule::P1,
                        Witness::Medial {
                            template: Template::from_adj(&t),
                            left: left.clone(),
                            right,
                        },
                    ));
                }
            }
        }
    }
    Ok(())
}

/// All ways to read `g[r]` as `t⟨N₁..Nₙ⟩` with possibly empty parts.
fn slot_assignments(g: &LabeledGraph, t: &Adj, r: &[VertexId]) -> Vec<Vec<VertexSet>> {
    fn go(
        g: &LabeledGraph,
        t: &Adj,
        r: &[VertexId],
        slots: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<VertexSet>>,
    ) {
        let i = slots.len();
        if i == r.len() {
            let mut parts = vec![VertexSet::new(); t.len()];
            for (v, &s) in r.iter().zip(slots.iter()) {
                parts[s].insert(*v);
            }
            out.insert(parts);
            return;
        }
        for s in 0..t.len() {
            let ok = (0..i).all(|j| slots[j] == s || g.has_edge(r[i], r[j]) == t[s][slots[j]]);
            if ok {
                slots.push(s);
                go(g, t, r, slots, out);
                slots.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, t, r, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}
