//! The deep inference system GS acting directly on graphs. Derivations are
//! open deductions: rule instances inside a context, sequential composition
//! through an explicit interface isomorphism, and composition via a template
//! graph whose vertices are replaced by derivations.

mod build;
mod search;
mod translate;

pub use build::{derive_weak_p, expand_weak_p, identity_derivation, Chain};
pub use search::{gs_search, GsOutcome, GsSearchConfig};
pub use translate::{gs_to_mgl0, mgl0_to_gs, rule_implication};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomp::{self, Adj};
use crate::error::GsError;
use crate::graph::{GraphContext, GraphJson, LabeledGraph, VertexId, VertexMap};

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GsRule {
    #[serde(rename = "ai")]
    Ai,
    #[serde(rename = "s_par")]
    SPar,
    #[serde(rename = "s_tens")]
    STens,
    #[serde(rename = "p")]
    P,
    /// p↓ where only the left factors must be non-empty.
    #[serde(rename = "p1")]
    P1,
    /// p↓ where each pair of factors must be non-empty.
    #[serde(rename = "p2")]
    P2,
}

impl GsRule {
    pub const ALL: [GsRule; 6] = [
        GsRule::Ai,
        GsRule::SPar,
        GsRule::STens,
        GsRule::P,
        GsRule::P1,
        GsRule::P2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GsRule::Ai => "ai↓",
            GsRule::SPar => "s⅋",
            GsRule::STens => "s⊗",
            GsRule::P => "p↓",
            GsRule::P1 => "p1↓",
            GsRule::P2 => "p2↓",
        }
    }

    /// Accepts the wire names (`ai`, `s_par`, ...) and the display names.
    pub fn parse(s: &str) -> Option<GsRule> {
        GsRule::ALL.into_iter().find(|r| {
            r.name() == s
                || serde_json::to_value(r)
                    .ok()
                    .and_then(|v| v.as_str().map(|x| x == s))
                    .unwrap_or(false)
        })
    }
}

impl fmt::Display for GsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The rules ai↓, s⅋, s⊗ and p↓.
pub fn gs_rules() -> BTreeSet<GsRule> {
    [GsRule::Ai, GsRule::SPar, GsRule::STens, GsRule::P].into()
}

/// The rules ai↓, s⅋ and p1↓ (no s⊗, weaker side condition on p).
pub fn weak_p_rules() -> BTreeSet<GsRule> {
    [GsRule::Ai, GsRule::SPar, GsRule::P1].into()
}

/// An unlabeled graph on `0..size`, used as the shape of a rule or composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Template {
    pub size: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Template {
    pub fn from_adj(adj: &Adj) -> Self {
        let n = adj.len();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| adj[i][j])
            .collect();
        Template { size: n, edges }
    }

    pub fn par() -> Self {
        Template {
            size: 2,
            edges: vec![],
        }
    }

    pub fn tens() -> Self {
        Template {
            size: 2,
            edges: vec![(0, 1)],
        }
    }

    pub fn complete(n: usize) -> Self {
        Template::from_adj(&(0..n).map(|i| (0..n).map(|j| i != j).collect()).collect())
    }

    /// Template of an ordered graph, vertices taken in id order.
    pub fn of_graph(g: &LabeledGraph) -> Self {
        let (c, _) = g.compacted();
        let edges = c
            .edges()
            .map(|(a, b)| (a.0 as usize, b.0 as usize))
            .collect();
        Template {
            size: c.len(),
            edges,
        }
    }

    pub fn adj(&self) -> Adj {
        decomp::adj_from_edges(self.size, &self.edges)
    }

    pub fn complement(&self) -> Self {
        Template::from_adj(&decomp::complement_adj(&self.adj()))
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        let adj = self.adj();
        Template::from_adj(
            &keep
                .iter()
                .map(|&i| keep.iter().map(|&j| adj[i][j]).collect())
                .collect(),
        )
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn is_valid(&self) -> bool {
        self.edges.iter().all(|&(a, b)| a < b && b < self.size)
    }

    /// Prime in the sense of rule schemes: at least two vertices, only trivial modules.
    pub fn is_prime(&self) -> bool {
        self.is_valid() && decomp::is_prime_adj(&self.adj())
    }

    pub fn graph(&self) -> LabeledGraph {
        LabeledGraph::unlabeled(self.size, &self.edges)
    }

    pub fn compose(&self, parts: &[LabeledGraph]) -> Result<LabeledGraph, GsError> {
        Ok(self.graph().compose_via(parts)?)
    }
}

/// Data that pins a rule instance down: which vertices play which role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// ai↓: the two dual vertices it creates.
    Atom { first: VertexId, second: VertexId },
    /// s⅋: `template⟨.., moved ⅋ parts[slot], ..⟩ ⟶ moved ⅋ template⟨parts⟩`.
    /// s⊗: `moved ⊗ template⟨parts⟩ ⟶ template⟨.., moved ⊗ parts[slot], ..⟩`.
    Switch {
        template: Template,
        slot: usize,
        parts: Vec<VertexSet>,
        moved: VertexSet,
    },
    /// p↓ family: `⊗ᵢ (left[i] ⅋ right[i]) ⟶ ¬template⟨left⟩ ⅋ template⟨right⟩`.
    Medial {
        template: Template,
        left: Vec<VertexSet>,
        right: Vec<VertexSet>,
    },
}

impl Witness {
    /// Every vertex the witness mentions.
    pub fn support(&self) -> VertexSet {
        match self {
            Witness::Atom { first, second } => [*first, *second].into(),
            Witness::Switch { parts, moved, .. } => {
                parts.iter().flatten().chain(moved).copied().collect()
            }
            Witness::Medial { left, right, .. } => {
                left.iter().chain(right).flatten().copied().collect()
            }
        }
    }

    fn relabel(&self, f: &dyn Fn(VertexId) -> VertexId) -> Witness {
        let map = |s: &VertexSet| s.iter().map(|v| f(*v)).collect::<VertexSet>();
        match self {
            Witness::Atom { first, second } => Witness::Atom {
                first: f(*first),
                second: f(*second),
            },
            Witness::Switch {
                template,
                slot,
                parts,
                moved,
            } => Witness::Switch {
                template: template.clone(),
                slot: *slot,
                parts: parts.iter().map(map).collect(),
                moved: map(moved),
            },
            Witness::Medial {
                template,
                left,
                right,
            } => Witness::Medial {
                template: template.clone(),
                left: left.iter().map(map).collect(),
                right: right.iter().map(map).collect(),
            },
        }
    }
}

fn pairwise_disjoint<'a>(sets: impl IntoIterator<Item = &'a VertexSet>) -> bool {
    let mut seen = VertexSet::new();
    sets.into_iter().all(|s| s.iter().all(|v| seen.insert(*v)))
}

/// Local premise and conclusion of a scheme, with part contents read off `source`.
pub fn scheme_graphs(
    rule: GsRule,
    witness: &Witness,
    source: &LabeledGraph,
) -> Result<(LabeledGraph, LabeledGraph), String> {
    let sub = |s: &VertexSet| {
        source
            .induced_subgraph(s)
            .map_err(|e| format!("{rule}: {e}"))
    };
    let union = |a: LabeledGraph, b: LabeledGraph| {
        LabeledGraph::disjoint_union(&[a, b]).map_err(|e| e.to_string())
    };
    let via = |t: &Template, parts: &[LabeledGraph]| t.compose(parts).map_err(|e| e.to_string());
    match (rule, witness) {
        (GsRule::Ai, Witness::Atom { first, second }) => {
            if first == second {
                return Err("ai↓ needs two distinct vertices".into());
            }
            let (Some(a), Some(b)) = (source.label(*first), source.label(*second)) else {
                return Err("ai↓ vertices must be labeled".into());
            };
            if *b != a.negate() {
                return Err(format!("ai↓ needs dual literals, found {a} and {b}"));
            }
            let c = LabeledGraph::from_parts(
                [(*first, Some(a.clone())), (*second, Some(b.clone()))],
                [],
            )
            .map_err(|e| e.to_string())?;
            Ok((LabeledGraph::new(), c))
        }
        (
            GsRule::SPar | GsRule::STens,
            Witness::Switch {
                template,
                slot,
                parts,
                moved,
            },
        ) => {
            if !template.is_prime() {
                return Err(format!("{rule} needs a prime template"));
            }
            if parts.len() != template.size || *slot >= template.size {
                return Err(format!(
                    "{rule}: {} parts or slot {slot} for a template of size {}",
                    parts.len(),
                    template.size
                ));
            }
            if moved.is_empty() {
                return Err(format!("{rule} with empty moved factor"));
            }
            if !pairwise_disjoint(parts.iter().chain([moved])) {
                return Err(format!("{rule}: factors overlap"));
            }
            let subs = parts.iter().map(sub).collect::<Result<Vec<_>, _>>()?;
            let m = sub(moved)?;
            let mut inner = subs.clone();
            if rule == GsRule::SPar {
                inner[*slot] = union(m.clone(), subs[*slot].clone())?;
                Ok((via(template, &inner)?, union(m, via(template, &subs)?)?))
            } else {
                inner[*slot] = via(&Template::tens(), &[m.clone(), subs[*slot].clone()])?;
                Ok((
                    via(&Template::tens(), &[m, via(template, &subs)?])?,
                    via(template, &inner)?,
                ))
            }
        }
        (
            GsRule::P | GsRule::P1 | GsRule::P2,
            Witness::Medial {
                template,
                left,
                right,
            },
        ) => {
            if !template.is_prime() {
                return Err(format!("{rule} needs a prime template"));
            }
            let n = template.size;
            if left.len() != n || right.len() != n {
                return Err(format!(
                    "{rule}: factor lists do not match the template size {n}"
                ));
            }
            if rule == GsRule::P2 && n < 4 {
                return Err(format!("{rule} needs a prime template other than ⅋ and ⊗"));
            }
            let empty = match rule {
                GsRule::P => (0..n).any(|i| left[i].is_empty() || right[i].is_empty()),
                GsRule::P1 => left.iter().any(|s| s.is_empty()),
                _ => (0..n).any(|i| left[i].is_empty() && right[i].is_empty()),
            };
            if empty {
                return Err(format!("{rule} with empty factor"));
            }
            if !pairwise_disjoint(left.iter().chain(right)) {
                return Err(format!("{rule}: factors overlap"));
            }
            let ls = left.iter().map(sub).collect::<Result<Vec<_>, _>>()?;
            let rs = right.iter().map(sub).collect::<Result<Vec<_>, _>>()?;
            let pairs = ls
                .iter()
                .zip(&rs)
                .map(|(l, r)| union(l.clone(), r.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            let premise = via(&Template::complete(n), &pairs)?;
            let conclusion = union(via(&template.complement(), &ls)?, via(template, &rs)?)?;
            Ok((premise, conclusion))
        }
        _ => Err(format!("witness kind does not fit rule {rule}")),
    }
}

/// One rule application: local premise and conclusion, the witness relating
/// them, and the context they sit in (none means the whole graph).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: GsRule,
    pub premise: LabeledGraph,
    pub conclusion: LabeledGraph,
    pub witness: Witness,
    pub context: Option<GraphContext>,
}

impl RuleInstance {
    /// ai↓ creating `first` and `second`, which must carry dual labels.
    pub fn atom(
        first: VertexId,
        second: VertexId,
        label: &crate::graph::Literal,
    ) -> Result<Self, GsError> {
        let g = LabeledGraph::from_parts(
            [(first, Some(label.clone())), (second, Some(label.negate()))],
            [],
        )?;
        let witness = Witness::Atom { first, second };
        let (premise, conclusion) =
            scheme_graphs(GsRule::Ai, &witness, &g).map_err(GsError::Domain)?;
        Ok(RuleInstance {
            rule: GsRule::Ai,
            premise,
            conclusion,
            witness,
            context: None,
        })
    }

    /// Instance whose local premise is `premise`; the conclusion is computed.
    pub fn from_premise(
        rule: GsRule,
        premise: LabeledGraph,
        witness: Witness,
    ) -> Result<Self, GsError> {
        let (p, c) = scheme_graphs(rule, &witness, &premise).map_err(GsError::Domain)?;
        if p != premise {
            return Err(GsError::Domain(format!(
                "{rule}: witness does not describe the premise"
            )));
        }
        Ok(RuleInstance {
            rule,
            premise,
            conclusion: c,
            witness,
            context: None,
        })
    }

    /// Instance whose local conclusion is `conclusion`; the premise is computed.
    pub fn from_conclusion(
        rule: GsRule,
        conclusion: LabeledGraph,
        witness: Witness,
    ) -> Result<Self, GsError> {
        let (p, c) = scheme_graphs(rule, &witness, &conclusion).map_err(GsError::Domain)?;
        if c != conclusion {
            return Err(GsError::Domain(format!(
                "{rule}: witness does not describe the conclusion"
            )));
        }
        Ok(RuleInstance {
            rule,
            premise: p,
            conclusion,
            witness,
            context: None,
        })
    }

    pub fn with_context(mut self, context: Option<GraphContext>) -> Self {
        self.context = context;
        self
    }

    /// The same instance without its context.
    pub fn local(&self) -> RuleInstance {
        RuleInstance {
            context: None,
            ..self.clone()
        }
    }

    pub fn premise_graph(&self) -> Result<LabeledGraph, GsError> {
        match &self.context {
            Some(c) => Ok(c.plug(&self.premise)?),
            None => Ok(self.premise.clone()),
        }
    }

    pub fn conclusion_graph(&self) -> Result<LabeledGraph, GsError> {
        match &self.context {
            Some(c) => Ok(c.plug(&self.conclusion)?),
            None => Ok(self.conclusion.clone()),
        }
    }

    /// Whether premise and conclusion coincide.
    pub fn is_identity(&self) -> bool {
        self.premise == self.conclusion
    }

    /// Scheme match and context disjointness.
    pub fn check(&self) -> Result<(), String> {
        let source = if self.rule == GsRule::Ai {
            &self.conclusion
        } else {
            &self.premise
        };
        let (p, c) = scheme_graphs(self.rule, &self.witness, source)?;
        if p != self.premise {
            return Err(format!("{}: premise does not match the scheme", self.rule));
        }
        if c != self.conclusion {
            return Err(format!(
                "{}: conclusion does not match the scheme",
                self.rule
            ));
        }
        if let Some(ctx) = &self.context {
            let local: VertexSet = self
                .premise
                .vertices()
                .chain(self.conclusion.vertices())
                .collect();
            if ctx
                .graph()
                .vertices()
                .any(|v| v != ctx.hole() && local.contains(&v))
            {
                return Err(format!(
                    "{}: context shares vertices with the instance",
                    self.rule
                ));
            }
        }
        Ok(())
    }

    fn relabel(&self, f: &dyn Fn(VertexId) -> VertexId) -> RuleInstance {
        RuleInstance {
            rule: self.rule,
            premise: self.premise.relabeled(f),
            conclusion: self.conclusion.relabeled(f),
            witness: self.witness.relabel(f),
            context: self.context.as_ref().map(|c| {
                GraphContext::new(c.graph().relabeled(f), f(c.hole())).expect("relabeled hole")
            }),
        }
    }
}

/// The context of `g` around the module `x`, with a fresh hole; `None` when `x` is all of `g`.
pub fn context_around(g: &LabeledGraph, x: &VertexSet) -> Result<Option<GraphContext>, GsError> {
    let all = g.vertex_set();
    if *x == all {
        return Ok(None);
    }
    if !g.is_module(x)? {
        return Err(GsError::Domain("rule site is not a module".into()));
    }
    let hole = VertexId(all.iter().chain(x).map(|v| v.0 + 1).max().unwrap_or(0));
    let rest: VertexSet = all.difference(x).copied().collect();
    let mut c = g.induced_subgraph(&rest)?;
    c.add_vertex(hole, None)?;
    if let Some(v) = x.iter().next() {
        for n in g.neighbors(*v).difference(x) {
            c.add_edge(hole, *n)?;
        }
    }
    Ok(Some(GraphContext::new(c, hole)?))
}

/// Open-deduction derivation over graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Trivial(LabeledGraph),
    Rule(Box<RuleInstance>),
    /// `first` followed by `second`; `iso` maps the conclusion of `first` onto the premise of `second`.
    Seq {
        first: Box<Derivation>,
        second: Box<Derivation>,
        iso: VertexMap,
    },
    /// Vertex `i` of the template (in id order) is replaced by `children[i]`.
    Via {
        template: Template,
        children: Vec<Derivation>,
    },
}

impl Derivation {
    pub fn rule(r: RuleInstance) -> Self {
        Derivation::Rule(Box::new(r))
    }

    pub fn premise(&self) -> Result<LabeledGraph, GsError> {
        match self {
            Derivation::Trivial(g) => Ok(g.clone()),
            Derivation::Rule(r) => r.premise_graph(),
            Derivation::Seq { first, .. } => first.premise(),
            Derivation::Via { template, children } => template.compose(
                &children
                    .iter()
                    .map(|c| c.premise())
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        }
    }

    pub fn conclusion(&self) -> Result<LabeledGraph, GsError> {
        match self {
            Derivation::Trivial(g) => Ok(g.clone()),
            Derivation::Rule(r) => r.conclusion_graph(),
            Derivation::Seq { second, .. } => second.conclusion(),
            Derivation::Via { template, children } => template.compose(
                &children
                    .iter()
                    .map(|c| c.conclusion())
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        }
    }

    /// Sequential composition where the conclusion of `self` is literally the premise of `next`.
    pub fn then(self, next: Derivation) -> Result<Derivation, GsError> {
        let g = self.conclusion()?;
        if let Derivation::Trivial(_) = self {
            return Ok(next);
        }
        let iso = g.vertices().map(|v| (v, v)).collect();
        Ok(Derivation::Seq {
            first: Box::new(self),
            second: Box::new(next),
            iso,
        })
    }

    /// Rename the conclusion onto `target` through the isomorphism `map`.
    pub fn renamed(self, target: LabeledGraph, map: VertexMap) -> Derivation {
        Derivation::Seq {
            first: Box::new(self),
            second: Box::new(Derivation::Trivial(target)),
            iso: map,
        }
    }

    /// Put a derivation into a context: the hole is replaced by `d`, every
    /// other vertex by a trivial derivation.
    pub fn in_context(d: Derivation, ctx: &GraphContext) -> Derivation {
        let g = ctx.graph();
        let children = g
            .vertices()
            .map(|v| {
                if v == ctx.hole() {
                    d.clone()
                } else {
                    Derivation::Trivial(LabeledGraph::singleton(v, g.label(v).cloned()))
                }
            })
            .collect();
        Derivation::Via {
            template: Template::of_graph(g),
            children,
        }
    }

    /// Every vertex occurring in some graph of the derivation (context holes excluded).
    pub fn universe(&self) -> VertexSet {
        let mut out = VertexSet::new();
        self.collect_universe(&mut out);
        out
    }

    fn collect_universe(&self, out: &mut VertexSet) {
        match self {
            Derivation::Trivial(g) => out.extend(g.vertices()),
            Derivation::Rule(r) => {
                out.extend(r.premise.vertices().chain(r.conclusion.vertices()));
                if let Some(c) = &r.context {
                    out.extend(c.graph().vertices().filter(|v| *v != c.hole()));
                }
            }
            Derivation::Seq { first, second, .. } => {
                first.collect_universe(out);
                second.collect_universe(out);
            }
            Derivation::Via { children, .. } => {
                children.iter().for_each(|c| c.collect_universe(out))
            }
        }
    }

    /// Largest id in the universe, or in a context hole.
    pub fn max_id(&self) -> Option<u32> {
        let mut m = self.universe().iter().map(|v| v.0).max();
        self.visit_rules(&mut |r| {
            if let Some(c) = &r.context {
                m = m.max(Some(c.hole().0));
            }
        });
        m
    }

    pub fn relabel(&self, f: &dyn Fn(VertexId) -> VertexId) -> Derivation {
        match self {
            Derivation::Trivial(g) => Derivation::Trivial(g.relabeled(f)),
            Derivation::Rule(r) => Derivation::rule(r.relabel(f)),
            Derivation::Seq { first, second, iso } => Derivation::Seq {
                first: Box::new(first.relabel(f)),
                second: Box::new(second.relabel(f)),
                iso: iso.iter().map(|(a, b)| (f(*a), f(*b))).collect(),
            },
            Derivation::Via { template, children } => Derivation::Via {
                template: template.clone(),
                children: children.iter().map(|c| c.relabel(f)).collect(),
            },
        }
    }

    pub fn shifted(&self, offset: u32) -> Derivation {
        self.relabel(&|v| VertexId(v.0 + offset))
    }

    pub fn visit_rules(&self, visit: &mut dyn FnMut(&RuleInstance)) {
        match self {
            Derivation::Trivial(_) => {}
            Derivation::Rule(r) => visit(r),
            Derivation::Seq { first, second, .. } => {
                first.visit_rules(visit);
                second.visit_rules(visit);
            }
            Derivation::Via { children, .. } => children.iter().for_each(|c| c.visit_rules(visit)),
        }
    }

    /// Number of rule instances.
    pub fn length(&self) -> usize {
        let mut n = 0;
        self.visit_rules(&mut |_| n += 1);
        n
    }

    pub fn count(&self, rule: GsRule) -> usize {
        let mut n = 0;
        self.visit_rules(&mut |r| n += usize::from(r.rule == rule));
        n
    }

    pub fn rules_used(&self) -> BTreeSet<GsRule> {
        let mut out = BTreeSet::new();
        self.visit_rules(&mut |r| {
            out.insert(r.rule);
        });
        out
    }

    /// Rebuild every rule node through `f`, bottom-up.
    pub fn map_rules(
        &self,
        f: &mut dyn FnMut(&RuleInstance) -> Result<Derivation, GsError>,
    ) -> Result<Derivation, GsError> {
        Ok(match self {
            Derivation::Trivial(_) => self.clone(),
            Derivation::Rule(r) => f(r)?,
            Derivation::Seq { first, second, iso } => Derivation::Seq {
                first: Box::new(first.map_rules(f)?),
                second: Box::new(second.map_rules(f)?),
                iso: iso.clone(),
            },
            Derivation::Via { template, children } => Derivation::Via {
                template: template.clone(),
                children: children
                    .iter()
                    .map(|c| c.map_rules(f))
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    /// A proof is a derivation from the empty graph.
    pub fn is_proof(&self) -> bool {
        self.premise().map(|g| g.is_empty()).unwrap_or(false)
    }

    pub fn to_json(&self) -> DerivationJson {
        match self {
            Derivation::Trivial(g) => DerivationJson::Trivial { graph: g.to_json() },
            Derivation::Rule(r) => DerivationJson::Rule {
                rule: r.rule,
                premise: r.premise.to_json(),
                conclusion: r.conclusion.to_json(),
                witness: r.witness.clone(),
                context: r.context.as_ref().map(|c| ContextJson {
                    graph: c.graph().to_json(),
                    hole: c.hole().0,
                }),
            },
            Derivation::Seq { first, second, iso } => DerivationJson::Seq {
                first: Box::new(first.to_json()),
                second: Box::new(second.to_json()),
                iso: iso.iter().map(|(a, b)| [a.0, b.0]).collect(),
            },
            Derivation::Via { template, children } => DerivationJson::Via {
                template: template.clone(),
                children: children.iter().map(|c| c.to_json()).collect(),
            },
        }
    }

    pub fn from_json(json: &DerivationJson) -> Result<Derivation, GsError> {
        Ok(match json {
            DerivationJson::Trivial { graph } => {
                Derivation::Trivial(LabeledGraph::from_json(graph)?)
            }
            DerivationJson::Rule {
                rule,
                premise,
                conclusion,
                witness,
                context,
            } => Derivation::rule(RuleInstance {
                rule: *rule,
                premise: LabeledGraph::from_json(premise)?,
                conclusion: LabeledGraph::from_json(conclusion)?,
                witness: witness.clone(),
                context: match context {
                    Some(c) => Some(GraphContext::new(
                        LabeledGraph::from_json(&c.graph)?,
                        VertexId(c.hole),
                    )?),
                    None => None,
                },
            }),
            DerivationJson::Seq { first, second, iso } => {
                let map: VertexMap = iso
                    .iter()
                    .map(|[a, b]| (VertexId(*a), VertexId(*b)))
                    .collect();
                if map.len() != iso.len() {
                    return Err(GsError::Format("interface map lists a vertex twice".into()));
                }
                Derivation::Seq {
                    first: Box::new(Derivation::from_json(first)?),
                    second: Box::new(Derivation::from_json(second)?),
                    iso: map,
                }
            }
            DerivationJson::Via { template, children } => Derivation::Via {
                template: template.clone(),
                children: children
                    .iter()
                    .map(Derivation::from_json)
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("derivation JSON serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Derivation, GsError> {
        let json: DerivationJson =
            serde_json::from_str(text).map_err(|e| GsError::Format(e.to_string()))?;
        Derivation::from_json(&json)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub graph: GraphJson,
    pub hole: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum DerivationJson {
    Trivial {
        graph: GraphJson,
    },
    Rule {
        rule: GsRule,
        premise: GraphJson,
        conclusion: GraphJson,
        witness: Witness,
        #[serde(default)]
        context: Option<ContextJson>,
    },
    Seq {
        first: Box<DerivationJson>,
        second: Box<DerivationJson>,
        iso: Vec<[u32; 2]>,
    },
    Via {
        template: Template,
        children: Vec<DerivationJson>,
    },
}

/// Check every node of `d` against the schemes of `rules`.
pub fn check_derivation(d: &Derivation, rules: &BTreeSet<GsRule>) -> Result<(), GsError> {
    check_at(d, rules, &mut Vec::new())
}

fn check_at(
    d: &Derivation,
    rules: &BTreeSet<GsRule>,
    path: &mut Vec<usize>,
) -> Result<(), GsError> {
    let reject = |path: &[usize], message: String| GsError::Rejected {
        path: path.to_vec(),
        message,
    };
    match d {
        Derivation::Trivial(_) => Ok(()),
        Derivation::Rule(r) => {
            if !rules.contains(&r.rule) {
                return Err(reject(
                    path,
                    format!("rule {} is not part of the system", r.rule),
                ));
            }
            r.check().map_err(|m| reject(path, m))?;
            r.premise_graph()
                .and(r.conclusion_graph())
                .map_err(|e| reject(path, e.to_string()))?;
            Ok(())
        }
        Derivation::Seq { first, second, iso } => {
            for (i, c) in [first, second].into_iter().enumerate() {
                path.push(i);
                check_at(c, rules, path)?;
                path.pop();
            }
            let (c, p) = (first.conclusion()?, second.premise()?);
            match c.verify_isomorphism(&p, iso) {
                Ok(true) => Ok(()),
                Ok(false) => Err(reject(path, "interface map is not an isomorphism".into())),
                Err(e) => Err(reject(path, format!("interface map: {e}"))),
            }
        }
        Derivation::Via { template, children } => {
            if !template.is_valid() {
                return Err(reject(path, "malformed template".into()));
            }
            if template.size != children.len() {
                return Err(reject(
                    path,
                    format!(
                        "template of size {} with {} children",
                        template.size,
                        children.len()
                    ),
                ));
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                check_at(c, rules, path)?;
                path.pop();
            }
            let universes: Vec<VertexSet> = children.iter().map(|c| c.universe()).collect();
            if !pairwise_disjoint(&universes) {
                return Err(reject(path, "children share vertices".into()));
            }
            d.premise()
                .and(d.conclusion())
                .map_err(|e| reject(path, e.to_string()))?;
            Ok(())
        }
    }
}

/// One rule application on whole graphs. The instance is local; its
/// conclusion occupies a module of `after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub before: LabeledGraph,
    pub after: LabeledGraph,
    pub instance: RuleInstance,
}

impl Step {
    /// Vertices of `after` holding the instance's conclusion.
    pub fn site(&self) -> VertexSet {
        self.instance.conclusion.vertex_set()
    }

    /// The instance placed in its context inside `after`.
    pub fn in_context(&self) -> Result<RuleInstance, GsError> {
        Ok(self
            .instance
            .local()
            .with_context(context_around(&self.after, &self.site())?))
    }
}

/// A derivation as a sequence of rule applications over a single vertex space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear {
    pub start: LabeledGraph,
    pub steps: Vec<Step>,
    pub end: LabeledGraph,
}

/// Sequentialize a checked derivation. Compositions via templates run their
/// children one after the other; interface isomorphisms are absorbed by
/// renaming, with fresh ids for vertices created later.
pub fn linearize(d: &Derivation) -> Result<Linear, GsError> {
    let mut fresh = d.max_id().map_or(0, |m| m + 1);
    let flat = flatten(d, &mut fresh)?;
    Ok(Linear {
        start: flat.start,
        steps: flat.steps,
        end: flat.end,
    })
}

struct Flat {
    start: LabeledGraph,
    steps: Vec<Step>,
    end: LabeledGraph,
    /// Conclusion ids of the derivation to ids of `end`.
    end_map: VertexMap,
}

fn identity_map(g: &LabeledGraph) -> VertexMap {
    g.vertices().map(|v| (v, v)).collect()
}

fn flatten(d: &Derivation, fresh: &mut u32) -> Result<Flat, GsError> {
    match d {
        Derivation::Trivial(g) => Ok(Flat {
            start: g.clone(),
            steps: vec![],
            end: g.clone(),
            end_map: identity_map(g),
        }),
        Derivation::Rule(r) => {
            let (before, after) = (r.premise_graph()?, r.conclusion_graph()?);
            let end_map = identity_map(&after);
            Ok(Flat {
                start: before.clone(),
                steps: vec![Step {
                    before,
                    after: after.clone(),
                    instance: r.local(),
                }],
                end: after,
                end_map,
            })
        }
        Derivation::Seq { first, second, iso } => {
            let a = flatten(first, fresh)?;
            let b = flatten(second, fresh)?;
            let inverse: VertexMap = iso.iter().map(|(x, y)| (*y, *x)).collect();
            let mut ids = VertexSet::new();
            for s in &b.steps {
                ids.extend(s.before.vertices().chain(s.after.vertices()));
            }
            ids.extend(b.start.vertices().chain(b.end.vertices()));
            let mut rho = VertexMap::new();
            for v in ids {
                let image = match inverse.get(&v).and_then(|u| a.end_map.get(u)) {
                    Some(w) if b.start.contains(v) => *w,
                    _ => {
                        *fresh += 1;
                        VertexId(*fresh - 1)
                    }
                };
                rho.insert(v, image);
            }
            let f = |v: VertexId| rho.get(&v).copied().unwrap_or(v);
            let mut steps = a.steps;
            steps.extend(b.steps.iter().map(|s| Step {
                before: s.before.relabeled(f),
                after: s.after.relabeled(f),
                instance: s.instance.relabel(&f),
            }));
            let end_map = b.end_map.iter().map(|(c, x)| (*c, f(*x))).collect();
            Ok(Flat {
                start: a.start,
                steps,
                end: b.end.relabeled(f),
                end_map,
            })
        }
        Derivation::Via { template, children } => {
            let flats = children
                .iter()
                .map(|c| flatten(c, fresh))
                .collect::<Result<Vec<_>, _>>()?;
            let mut current: Vec<LabeledGraph> = flats.iter().map(|f| f.start.clone()).collect();
            let start = template.compose(&current)?;
            let mut steps = Vec::new();
            let mut end_map = BTreeMap::new();
            for (i, f) in flats.iter().enumerate() {
                for s in &f.steps {
                    current[i] = s.before.clone();
                    let before = template.compose(&current)?;
                    current[i] = s.after.clone();
                    let after = template.compose(&current)?;
                    steps.push(Step {
                        before,
                        after,
                        instance: s.instance.clone(),
                    });
                }
                current[i] = f.end.clone();
                end_map.extend(f.end_map.iter().map(|(a, b)| (*a, *b)));
            }
            Ok(Flat {
                start,
                steps,
                end: template.compose(&current)?,
                end_map,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Literal;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn set(ids: &[u32]) -> VertexSet {
        ids.iter().map(|&i| v(i)).collect()
    }

    #[test]
    fn atom_rule_accepted() {
        let r = RuleInstance::atom(v(0), v(1), &Literal::neg("a")).unwrap();
        let d = Derivation::rule(r);
        check_derivation(&d, &gs_rules()).unwrap();
        assert!(d.is_proof());
        let c = d.conclusion().unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.edge_count(), 0);
    }

    #[test]
    fn trivial_accepted() {
        let g = LabeledGraph::singleton(v(3), Some(Literal::pos("a")));
        let d = Derivation::Trivial(g.clone());
        check_derivation(&d, &gs_rules()).unwrap();
        assert_eq!(d.premise().unwrap(), g);
        assert_eq!(d.conclusion().unwrap(), g);
    }

    fn four_atoms() -> LabeledGraph {
        LabeledGraph::from_parts(
            (0..4).map(|i| (v(i), Some(Literal::pos(&format!("x{i}"))))),
            [],
        )
        .unwrap()
    }

    #[test]
    fn medial_with_empty_factor_rejected() {
        let src = four_atoms();
        let w = Witness::Medial {
            template: Template::tens(),
            left: vec![set(&[0]), set(&[1])],
            right: vec![set(&[2]), set(&[])],
        };
        let err =
            RuleInstance::from_premise(GsRule::P, LabeledGraph::new(), w.clone()).unwrap_err();
        assert!(err.to_string().contains("empty factor"), "{err}");
        // A forged node carrying the instance is rejected with a located diagnostic.
        let (p, c) = (src.clone(), src);
        let d = Derivation::rule(RuleInstance {
            rule: GsRule::P,
            premise: p,
            conclusion: c,
            witness: w,
            context: None,
        });
        let err = check_derivation(&d, &gs_rules()).unwrap_err();
        assert!(
            matches!(err, GsError::Rejected { ref message, .. } if message.contains("p↓ with empty factor")),
            "{err}"
        );
    }

    #[test]
    fn medial_on_tensor_template() {
        // (x0 ⅋ x2) ⊗ (x1 ⅋ x3) ⟶ (x0 ⅋ x1) ⅋ (x2 ⊗ x3)
        let src = four_atoms();
        let w = Witness::Medial {
            template: Template::tens(),
            left: vec![set(&[0]), set(&[1])],
            right: vec![set(&[2]), set(&[3])],
        };
        let (p, c) = scheme_graphs(GsRule::P, &w, &src).unwrap();
        let r = RuleInstance::from_premise(GsRule::P, p.clone(), w).unwrap();
        assert_eq!(r.conclusion, c);
        assert_eq!(p.edge_count(), 4);
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(v(2), v(3))]);
        check_derivation(&Derivation::rule(r), &gs_rules()).unwrap();
    }

    #[test]
    fn switch_schemes() {
        let src = LabeledGraph::from_parts(
            (0..3).map(|i| (v(i), Some(Literal::pos(&format!("x{i}"))))),
            [],
        )
        .unwrap();
        // s⅋ on ⊗: x0 ⊗ (x2 ⅋ x1) ⟶ x2 ⅋ (x0 ⊗ x1)
        let w = Witness::Switch {
            template: Template::tens(),
            slot: 1,
            parts: vec![set(&[0]), set(&[1])],
            moved: set(&[2]),
        };
        let (p, c) = scheme_graphs(GsRule::SPar, &w, &src).unwrap();
        assert_eq!(p.edge_count(), 2);
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(v(0), v(1))]);
        // s⊗ on ⅋: x2 ⊗ (x0 ⅋ x1) ⟶ x0 ⅋ (x2 ⊗ x1)
        let w = Witness::Switch {
            template: Template::par(),
            slot: 1,
            parts: vec![set(&[0]), set(&[1])],
            moved: set(&[2]),
        };
        let (p, c) = scheme_graphs(GsRule::STens, &w, &src).unwrap();
        assert_eq!(p.edge_count(), 2);
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(v(1), v(2))]);
        // A non-prime template is refused.
        let w = Witness::Switch {
            template: Template::complete(3),
            slot: 0,
            parts: vec![set(&[0]), set(&[1]), set(&[])],
            moved: set(&[2]),
        };
        assert!(scheme_graphs(GsRule::STens, &w, &src).is_err());
    }

    #[test]
    fn seq_interface_checked_and_json_roundtrip() {
        let r = RuleInstance::atom(v(0), v(1), &Literal::pos("a")).unwrap();
        let target = LabeledGraph::from_parts(
            [
                (v(7), Some(Literal::neg("a"))),
                (v(8), Some(Literal::pos("a"))),
            ],
            [],
        )
        .unwrap();
        let good = Derivation::rule(r.clone())
            .renamed(target.clone(), [(v(0), v(8)), (v(1), v(7))].into());
        check_derivation(&good, &gs_rules()).unwrap();
        let bad = Derivation::rule(r).renamed(target, [(v(0), v(7)), (v(1), v(8))].into());
        assert!(check_derivation(&bad, &gs_rules()).is_err());
        let back = Derivation::from_json_str(&good.to_json_string()).unwrap();
        assert_eq!(back, good);
    }

    #[test]
    fn rules_outside_the_system_rejected() {
        let d = Derivation::rule(RuleInstance::atom(v(0), v(1), &Literal::pos("a")).unwrap());
        let err = check_derivation(&d, &[GsRule::SPar].into()).unwrap_err();
        assert!(err.to_string().contains("not part of the system"));
    }

    #[test]
    fn via_and_linearize() {
        let a = Derivation::rule(RuleInstance::atom(v(0), v(1), &Literal::pos("a")).unwrap());
        let b = Derivation::rule(RuleInstance::atom(v(2), v(3), &Literal::pos("b")).unwrap());
        let d = Derivation::Via {
            template: Template::tens(),
            children: vec![a.clone(), b],
        };
        check_derivation(&d, &gs_rules()).unwrap();
        assert_eq!(d.conclusion().unwrap().edge_count(), 4);
        let lin = linearize(&d).unwrap();
        assert_eq!(lin.steps.len(), 2);
        assert!(lin.start.is_empty());
        assert_eq!(lin.steps[0].after.len(), 2);
        assert_eq!(lin.end, d.conclusion().unwrap());
        let clash = Derivation::Via {
            template: Template::par(),
            children: vec![a.clone(), a],
        };
        assert!(check_derivation(&clash, &gs_rules()).is_err());
    }
}
