//! Forward construction of GS derivations: a chain of rule applications on
//! one graph, the generic derivation of `⊗ᵢ(Mᵢ ⅋ Nᵢ) ⟶ ¬G⟨M⟩ ⅋ G⟨N⟩`, and
//! the elimination of p1↓.

use std::mem;

use super::{context_around, Derivation, GsRule, RuleInstance, Template, VertexSet, Witness};
use crate::decomp::{self, Adj, RootKind};
use crate::error::GsError;
use crate::graph::LabeledGraph;

/// A derivation under construction together with its current conclusion.
#[derive(Clone, Debug)]
pub struct Chain {
    d: Derivation,
    g: LabeledGraph,
}

impl Chain {
    pub fn new(g: LabeledGraph) -> Self {
        Chain {
            d: Derivation::Trivial(g.clone()),
            g,
        }
    }

    /// Continue an existing derivation.
    pub fn extend(d: Derivation) -> Result<Self, GsError> {
        let g = d.conclusion()?;
        Ok(Chain { d, g })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.g
    }

    /// Apply a rule at the module spanned by the witness, reading the
    /// premise off the current graph. Identity instances are skipped.
    pub fn apply(&mut self, rule: GsRule, witness: Witness) -> Result<(), GsError> {
        if rule == GsRule::Ai {
            return Err(GsError::Domain(
                "ai↓ creates vertices and cannot be applied to an existing site".into(),
            ));
        }
        let site = witness.support();
        let local = self.g.induced_subgraph(&site)?;
        let inst = RuleInstance::from_premise(rule, local, witness)?;
        if inst.is_identity() {
            return Ok(());
        }
        let inst = inst.with_context(context_around(&self.g, &site)?);
        let next = inst.conclusion_graph()?;
        let d = mem::replace(&mut self.d, Derivation::Trivial(LabeledGraph::new()));
        self.d = d.then(Derivation::rule(inst))?;
        self.g = next;
        Ok(())
    }

    pub fn finish(self) -> Derivation {
        self.d
    }
}

/// A factor `Mᵢ ⅋ Nᵢ` given by its two vertex sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Pair {
    pub left: VertexSet,
    pub right: VertexSet,
}

impl Pair {
    fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }
}

fn merge(items: &[Pair]) -> Pair {
    let mut out = Pair::default();
    for p in items {
        out.left.extend(&p.left);
        out.right.extend(&p.right);
    }
    out
}

fn restrict(adj: &Adj, keep: &[usize]) -> Adj {
    keep.iter()
        .map(|&i| keep.iter().map(|&j| adj[i][j]).collect())
        .collect()
}

/// Rewrite the module `⊗ᵢ(leftᵢ ⅋ rightᵢ)` of the chain into `¬G⟨left⟩ ⅋ G⟨right⟩`,
/// by induction on the modular decomposition of `G`.
pub(crate) fn build(chain: &mut Chain, adj: &Adj, items: &[Pair]) -> Result<(), GsError> {
    let n = adj.len();
    if n <= 1 {
        return Ok(());
    }
    let (kind, blocks) =
        decomp::root_partition(&LabeledGraph::unlabeled(n, &Template::from_adj(adj).edges));
    let blocks: Vec<Vec<usize>> = blocks
        .into_iter()
        .map(|b| b.into_iter().map(|v| v.0 as usize).collect())
        .collect();
    let mut collapsed = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let sub: Vec<Pair> = b.iter().map(|&i| items[i].clone()).collect();
        build(chain, &restrict(adj, b), &sub)?;
        collapsed.push(merge(&sub));
    }
    match kind {
        RootKind::Single => Ok(()),
        RootKind::Par | RootKind::Tens => {
            let t = if kind == RootKind::Par {
                Template::par()
            } else {
                Template::tens()
            };
            let mut acc = collapsed[0].clone();
            for next in &collapsed[1..] {
                combine(chain, &t, &[acc.clone(), next.clone()])?;
                acc = merge(&[acc, next.clone()]);
            }
            Ok(())
        }
        RootKind::Prime => {
            let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
            combine(
                chain,
                &Template::from_adj(&restrict(adj, &reps)),
                &collapsed,
            )
        }
    }
}

/// The prime step: `⊗ᵢ(leftᵢ ⅋ rightᵢ) ⟶ ¬t⟨left⟩ ⅋ t⟨right⟩` for a prime template `t`.
/// With every factor present this is a single p↓; empty factors are peeled
/// off with s⊗.
pub(crate) fn combine(chain: &mut Chain, t: &Template, items: &[Pair]) -> Result<(), GsError> {
    if items
        .iter()
        .all(|p| !p.left.is_empty() && !p.right.is_empty())
    {
        let left = items.iter().map(|p| p.left.clone()).collect();
        let right = items.iter().map(|p| p.right.clone()).collect();
        return chain.apply(
            GsRule::P,
            Witness::Medial {
                template: t.clone(),
                left,
                right,
            },
        );
    }
    if items.iter().any(Pair::is_empty) {
        let keep: Vec<usize> = (0..items.len()).filter(|&i| !items[i].is_empty()).collect();
        let sub: Vec<Pair> = keep.iter().map(|&i| items[i].clone()).collect();
        return build(chain, &t.restrict(&keep).adj(), &sub);
    }
    let (j, right_empty) = match items.iter().position(|p| p.right.is_empty()) {
        Some(j) => (j, true),
        None => (
            items
                .iter()
                .position(|p| p.left.is_empty())
                .expect("some side is empty"),
            false,
        ),
    };
    let others: Vec<usize> = (0..items.len()).filter(|&i| i != j).collect();
    let rest: Vec<Pair> = others.iter().map(|&i| items[i].clone()).collect();
    build(chain, &t.restrict(&others).adj(), &rest)?;
    let done = merge(&rest);
    // The module is now `moved ⊗ (L' ⅋ R')`; move `moved` next to the side it belongs to.
    let (moved, near, far, template) = if right_empty {
        (items[j].left.clone(), done.left, done.right, t.complement())
    } else {
        (items[j].right.clone(), done.right, done.left, t.clone())
    };
    if !far.is_empty() {
        let parts = vec![far, near];
        chain.apply(
            GsRule::STens,
            Witness::Switch {
                template: Template::par(),
                slot: 1,
                parts,
                moved: moved.clone(),
            },
        )?;
    }
    let parts = (0..items.len())
        .map(|i| {
            if i == j {
                VertexSet::new()
            } else if right_empty {
                items[i].left.clone()
            } else {
                items[i].right.clone()
            }
        })
        .collect();
    chain.apply(
        GsRule::STens,
        Witness::Switch {
            template,
            slot: j,
            parts,
            moved,
        },
    )
}

/// Derivation from `(M₁ ⅋ N₁) ⊗ … ⊗ (Mₙ ⅋ Nₙ)` to `¬g⟨M⟩ ⅋ g⟨N⟩` using only
/// s⊗ and p↓. The vertices of `g` are taken in id order; its labels are ignored.
pub fn identity_derivation(
    g: &LabeledGraph,
    m: &[LabeledGraph],
    n: &[LabeledGraph],
) -> Result<Derivation, GsError> {
    let k = g.len();
    if m.len() != k || n.len() != k {
        return Err(GsError::Domain(format!(
            "{k} template vertices but {} and {} parts",
            m.len(),
            n.len()
        )));
    }
    let pairs = m
        .iter()
        .zip(n)
        .map(|(a, b)| LabeledGraph::disjoint_union(&[a.clone(), b.clone()]))
        .collect::<Result<Vec<_>, _>>()?;
    let t = Template::of_graph(g);
    let premise = Template::complete(k).compose(&pairs)?;
    let target = LabeledGraph::disjoint_union(&[t.complement().compose(m)?, t.compose(n)?])?;
    let items: Vec<Pair> = m
        .iter()
        .zip(n)
        .map(|(a, b)| Pair {
            left: a.vertex_set(),
            right: b.vertex_set(),
        })
        .collect();
    let mut chain = Chain::new(premise);
    build(&mut chain, &t.adj(), &items)?;
    if *chain.graph() != target {
        return Err(GsError::Domain(
            "identity derivation missed its target".into(),
        ));
    }
    Ok(chain.finish())
}

/// GS derivation of a p1↓ instance, in the instance's context if it has one.
pub fn derive_weak_p(inst: &RuleInstance) -> Result<Derivation, GsError> {
    let Witness::Medial {
        template,
        left,
        right,
    } = &inst.witness
    else {
        return Err(GsError::Domain(format!(
            "expected a p1↓ instance, found {}",
            inst.rule
        )));
    };
    if inst.rule != GsRule::P1 {
        return Err(GsError::Domain(format!(
            "expected a p1↓ instance, found {}",
            inst.rule
        )));
    }
    if left.iter().any(|s| s.is_empty()) {
        return Err(GsError::Domain("p1↓ with empty left factor".into()));
    }
    inst.check().map_err(GsError::Domain)?;
    let items: Vec<Pair> = left
        .iter()
        .zip(right)
        .map(|(l, r)| Pair {
            left: l.clone(),
            right: r.clone(),
        })
        .collect();
    let mut chain = Chain::new(inst.premise.clone());
    combine(&mut chain, template, &items)?;
    if *chain.graph() != inst.conclusion {
        return Err(GsError::Domain(
            "p1↓ elimination missed the conclusion".into(),
        ));
    }
    let local = chain.finish();
    Ok(match &inst.context {
        Some(ctx) => Derivation::in_context(local, ctx),
        None => local,
    })
}

/// Replace every p1↓ node of `d` by its derivation.
pub fn expand_weak_p(d: &Derivation) -> Result<Derivation, GsError> {
    d.map_rules(&mut |r| {
        if r.rule == GsRule::P1 {
            derive_weak_p(r)
        } else {
            Ok(Derivation::rule(r.clone()))
        }
    })
}
