//! Translations between MGL° sequent proofs and GS derivations, and the
//! sequent-calculus implications realizing single GS rule instances.

use super::build::{build, combine, Chain, Pair};
use super::{
    check_derivation, context_around, expand_weak_p, linearize, Derivation, GsRule, RuleInstance,
    Template, VertexSet, Witness,
};
use crate::decomp::{self, Base};
use crate::error::GsError;
use crate::formula::{
    formula_of, formula_of_tree, formula_of_with_vertices, graph_of, negate, Formula,
    FormulaContext, Path,
};
use crate::graph::{GraphContext, Literal, VertexId, VertexMap};
use crate::sequent::deep::congruence;
use crate::sequent::{
    check_proof, derive_axiom, derive_deep, eliminate_cut, eliminate_wd_par, fresh_atoms,
    remove_all, retype, same_multiset, substitute_formula, Proof, Rule, System,
};

/// GS derivation of the graph of `⅋Γ` from an MGL° proof of ⊢ Γ.
/// Cuts are eliminated first.
pub fn mgl0_to_gs(p: &Proof, base: &Base) -> Result<Derivation, GsError> {
    let cut_free;
    let p = if p.is_cut_free() {
        p
    } else {
        cut_free = eliminate_cut(p, System::Mgl0, base)?.proof;
        &cut_free
    };
    check_proof(p, &System::Mgl0.rules(), base)
        .map_err(|d| GsError::Domain(format!("not an MGL° proof: {d}")))?;
    let mut tr = Translator { next: 0 };
    let (d, ids) = tr.proof(p)?;
    let Some(target) = Formula::par_all(p.conclusion.clone()) else {
        return Ok(d);
    };
    let order: Vec<VertexId> = ids.concat();
    let map: VertexMap = order
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, VertexId(i as u32)))
        .collect();
    let d = if map.iter().all(|(a, b)| a == b) {
        d
    } else {
        d.renamed(graph_of(&target), map)
    };
    check_derivation(&d, &super::gs_rules())?;
    Ok(d)
}

struct Translator {
    next: u32,
}

/// Vertex ids of each argument of `f`, given the ids of its literals.
fn arg_ids(f: &Formula, ids: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut at = 0;
    for c in f.children() {
        let n = c.literal_count();
        out.push(ids[at..at + n].to_vec());
        at += n;
    }
    out
}

fn set(ids: &[VertexId]) -> VertexSet {
    ids.iter().copied().collect()
}

fn sets(groups: &[Vec<VertexId>]) -> VertexSet {
    groups.iter().flatten().copied().collect()
}

/// Shape of the top connective of a compound formula.
fn top_template(f: &Formula) -> Option<Template> {
    match f {
        Formula::Par(..) => Some(Template::par()),
        Formula::Tens(..) => Some(Template::tens()),
        Formula::App(c, _) => Some(Template::from_adj(c.adj())),
        _ => None,
    }
}

/// Contexts and actives of a premise, with the vertex ids of each formula.
fn split(
    concl: &[Formula],
    ids: &[Vec<VertexId>],
    actives: &[Formula],
) -> Result<(Vec<Vec<VertexId>>, Vec<Vec<VertexId>>), GsError> {
    let mut rest: Vec<(Formula, Vec<VertexId>)> =
        concl.iter().cloned().zip(ids.iter().cloned()).collect();
    let mut act = Vec::new();
    for a in actives {
        let i = rest
            .iter()
            .position(|(f, _)| f == a)
            .ok_or_else(|| GsError::Domain(format!("active {a} missing")))?;
        act.push(rest.remove(i).1);
    }
    Ok((rest.into_iter().map(|(_, v)| v).collect(), act))
}

impl Translator {
    /// The derivation and, per conclusion formula, the vertex ids of its literals.
    fn proof(&mut self, p: &Proof) -> Result<(Derivation, Vec<Vec<VertexId>>), GsError> {
        let mut kids = Vec::new();
        for (c, a) in p.children.iter().zip(&p.actives) {
            let (d, ids) = self.proof(c)?;
            let (ctx, act) = split(&c.conclusion, &ids, a)?;
            kids.push((d, ctx, act));
        }
        let principals: Vec<Formula> = p.principals().into_iter().cloned().collect();
        let contexts =
            |kids: &[(Derivation, Vec<Vec<VertexId>>, Vec<Vec<VertexId>>)]| -> Vec<Vec<VertexId>> {
                kids.iter().flat_map(|k| k.1.iter().cloned()).collect()
            };
        match p.rule {
            Rule::Ax => {
                let Formula::Lit(l) = &p.conclusion[0] else {
                    return Err(GsError::Domain("ax on a non-literal".into()));
                };
                let (u, v) = (VertexId(self.next), VertexId(self.next + 1));
                self.next += 2;
                Ok((
                    Derivation::rule(RuleInstance::atom(u, v, l)?),
                    vec![vec![u], vec![v]],
                ))
            }
            Rule::Par => {
                let (d, mut ids, act) = kids.pop().expect("one premise");
                ids.push(act.concat());
                Ok((d, ids))
            }
            Rule::Mix => {
                let ids = contexts(&kids);
                let ds = kids.into_iter().map(|k| k.0).collect();
                Ok((
                    Derivation::Via {
                        template: Template::par(),
                        children: ds,
                    },
                    ids,
                ))
            }
            Rule::Tens => {
                let mut ids = contexts(&kids);
                let items: Vec<Pair> = kids
                    .iter()
                    .map(|k| Pair {
                        left: sets(&k.1),
                        right: set(&k.2[0]),
                    })
                    .collect();
                ids.push(kids.iter().flat_map(|k| k.2[0].iter().copied()).collect());
                let mut chain = Chain::extend(Derivation::Via {
                    template: Template::tens(),
                    children: kids.into_iter().map(|k| k.0).collect(),
                })?;
                combine(&mut chain, &Template::tens(), &items)?;
                Ok((chain.finish(), ids))
            }
            Rule::Dconr => {
                let (x, y) = (&principals[0], &principals[1]);
                let n = kids.len();
                let mut ids = contexts(&kids);
                let gather: Vec<Pair> = kids
                    .iter()
                    .map(|k| Pair {
                        left: sets(&k.1),
                        right: sets(&k.2),
                    })
                    .collect();
                let mut xs = vec![Vec::new(); x.children().len()];
                let mut ys = vec![Vec::new(); y.children().len()];
                for (k, kid) in kids.iter().enumerate() {
                    xs[p.sigma[k]] = kid.2[0].clone();
                    ys[p.tau[k]] = kid.2[1].clone();
                }
                if x.children()
                    .iter()
                    .chain(y.children().iter())
                    .any(|a| a.literal_count() == 0)
                {
                    return Err(GsError::Domain("dconr with a vacuous argument".into()));
                }
                let children = kids.into_iter().map(|k| k.0).collect();
                let mut chain = Chain::extend(Derivation::Via {
                    template: Template::complete(n),
                    children,
                })?;
                build(&mut chain, &Template::complete(n).adj(), &gather)?;
                let mut medial = vec![Pair::default(); n];
                for k in 0..n {
                    medial[p.tau[k]] = Pair {
                        left: set(&xs[p.sigma[k]]),
                        right: set(&ys[p.tau[k]]),
                    };
                }
                let t =
                    top_template(y).ok_or_else(|| GsError::Domain("dconr on a literal".into()))?;
                combine(&mut chain, &t, &medial)?;
                ids.push(xs.concat());
                ids.push(ys.concat());
                Ok((chain.finish(), ids))
            }
            Rule::WdTens => {
                let f = &principals[0];
                let k = p
                    .slot
                    .ok_or_else(|| GsError::Domain("wd_tens without slot".into()))?;
                let mut ids = contexts(&kids);
                let items: Vec<Pair> = kids
                    .iter()
                    .map(|kid| Pair {
                        left: sets(&kid.1),
                        right: set(&kid.2[0]),
                    })
                    .collect();
                let factor = kids[0].2[0].clone();
                let residual = arg_ids(&p.actives[1][0], &kids[1].2[0]);
                let mut chain = Chain::extend(Derivation::Via {
                    template: Template::tens(),
                    children: kids.into_iter().map(|k| k.0).collect(),
                })?;
                combine(&mut chain, &Template::tens(), &items)?;
                if !factor.is_empty() {
                    let t = top_template(f)
                        .ok_or_else(|| GsError::Domain("wd_tens on a literal".into()))?;
                    let parts = residual.iter().map(|r| set(r)).collect();
                    chain.apply(
                        GsRule::STens,
                        Witness::Switch {
                            template: t,
                            slot: k,
                            parts,
                            moved: set(&factor),
                        },
                    )?;
                }
                let mut args = residual;
                args[k] = factor;
                ids.push(args.concat());
                Ok((chain.finish(), ids))
            }
            Rule::Unitor => {
                let (d, mut ids, act) = kids.pop().expect("one premise");
                let (chi, f) = (&p.actives[0][0], &principals[0]);
                let iso = decomp::find_isomorphism(&graph_of(f), &graph_of(chi), None)?
                    .ok_or_else(|| {
                        GsError::Domain("unitor between formulas with different graphs".into())
                    })?;
                ids.push(
                    (0..f.literal_count())
                        .map(|i| act[0][iso[&VertexId(i as u32)].0 as usize])
                        .collect(),
                );
                Ok((d, ids))
            }
            r => Err(GsError::Domain(format!("rule {r} is not part of MGL°"))),
        }
    }
}

/// MGL° proof of ⊢ formula_of(G) from a GS derivation of G (p1↓ allowed)
/// whose premise is empty.
pub fn gs_to_mgl0(d: &Derivation, base: &Base) -> Result<Proof, GsError> {
    check_derivation(
        d,
        &[
            GsRule::Ai,
            GsRule::SPar,
            GsRule::STens,
            GsRule::P,
            GsRule::P1,
        ]
        .into(),
    )?;
    if !d.premise()?.is_empty() {
        return Err(GsError::Domain("derivation has a non-empty premise".into()));
    }
    let conclusion = d.conclusion()?;
    if conclusion.is_empty() {
        return Err(GsError::Domain("empty conclusion".into()));
    }
    let lin = linearize(&expand_weak_p(d)?)?;
    let mut cur: Option<(Proof, Formula)> = None;
    for step in &lin.steps {
        let next = if step.instance.rule == GsRule::Ai {
            let Witness::Atom { first, second } = step.instance.witness else {
                unreachable!("ai↓ carries an atom witness")
            };
            let l = step.after.label(first).expect("labeled").clone();
            let kappa = Formula::par(Formula::Lit(l.clone()), Formula::Lit(l.negate()));
            let pa = Proof::par(
                Proof::ax(&l),
                &kappa.children()[0].clone(),
                &kappa.children()[1].clone(),
            )?;
            match cur.take() {
                None => (pa, kappa),
                Some((p, f)) => {
                    let ctx = context_around(&step.after, &[first, second].into())?
                        .expect("non-empty context");
                    let (zeta, path) = skeleton(&ctx, base)?;
                    let hole = zeta.replace_at(&path, Formula::Unit).expect("valid path");
                    let pb = retype(&p, &f, &hole, System::Mgl0, base)?;
                    let q = derive_deep(
                        &FormulaContext::new(zeta.clone(), path.clone())?,
                        &pa,
                        &kappa,
                        &pb,
                        &hole,
                        base,
                    )?;
                    (q, zeta.replace_at(&path, kappa).expect("valid path"))
                }
            }
        } else {
            let (p, f) = cur.take().ok_or_else(|| {
                GsError::Domain("derivation starts with a rule other than ai↓".into())
            })?;
            let (imp, psi, phi) = rule_implication(&step.in_context()?, base)?;
            let left = retype(&p, &f, &psi, System::Mgl0, base)?;
            let cut = Proof::cut(left, &psi, imp, base)?;
            (eliminate_cut(&cut, System::Mgl0, base)?.proof, phi)
        };
        cur = Some(next);
    }
    let (p, f) = cur.ok_or_else(|| GsError::Domain("derivation has no rule instance".into()))?;
    let out = retype(&p, &f, &formula_of(&conclusion, base)?, System::Mgl0, base)?;
    check_proof(&out, &System::Mgl0.rules(), base)
        .map_err(|d| GsError::Domain(format!("translation produced an invalid proof: {d}")))?;
    Ok(out)
}

/// Formula of a graph context with a fresh atom at the hole, and the hole's position.
fn skeleton(ctx: &GraphContext, base: &Base) -> Result<(Formula, Path), GsError> {
    let mut g = ctx.graph().clone();
    let used: Vec<Formula> = g
        .vertices()
        .filter_map(|v| g.label(v).map(|l| Formula::Lit(l.clone())))
        .collect();
    let name = fresh_atoms(1, &used.iter().collect::<Vec<_>>()).remove(0);
    g.set_label(ctx.hole(), Some(Literal::pos(&name)))?;
    let (f, _) = formula_of_with_vertices(&g, base)?;
    let marker = Formula::Lit(Literal::pos(&name));
    let path = f
        .positions()
        .into_iter()
        .find(|p| f.at(p) == Some(&marker))
        .expect("marker occurs");
    Ok((f, path))
}

/// Formula with graph `t⟨args⟩`; ◦ arguments stand for empty parts.
fn via_template(t: &Template, args: &[Formula], base: &Base) -> Result<Formula, GsError> {
    let tree = decomp::decompose(&t.graph(), base)?;
    Ok(formula_of_tree(&tree, &mut |v, _| {
        args[v.0 as usize].clone()
    }))
}

/// Make sure the conclusion of `p` is literally ⊢ ¬ψ, φ.
fn normalize(p: Proof, psi: &Formula, phi: &Formula, base: &Base) -> Result<Proof, GsError> {
    let want = [negate(psi, base), phi.clone()];
    if same_multiset(&p.conclusion, &want) {
        return Ok(p);
    }
    let Some(rest) = remove_all(&p.conclusion, &[phi.clone()]) else {
        return Err(GsError::Domain(
            "implication lost its conclusion formula".into(),
        ));
    };
    match rest.as_slice() {
        [other] => Ok(retype(&p, other, &want[0], System::Mgl0, base)?),
        _ => Err(GsError::Domain(
            "implication has a malformed sequent".into(),
        )),
    }
}

/// A proof of ⊢ ¬ψ, φ where ψ and φ are formulas of the premise and the
/// conclusion of a rule instance (s⅋, s⊗ or p↓), placed in its context.
pub fn rule_implication(
    inst: &RuleInstance,
    base: &Base,
) -> Result<(Proof, Formula, Formula), GsError> {
    inst.check().map_err(GsError::Domain)?;
    let (proof, psi, phi) = if inst.is_identity() {
        let f = formula_of(&inst.premise, base)?;
        (derive_axiom(&f, base)?, f.clone(), f)
    } else {
        local_implication(inst, base)?
    };
    let proof = normalize(proof, &psi, &phi, base)?;
    match &inst.context {
        None => Ok((proof, psi, phi)),
        Some(ctx) => {
            let (zeta, path) = skeleton(ctx, base)?;
            wrap(&zeta, &path, proof, psi, phi, base)
        }
    }
}

/// Lift ⊢ ¬ψ, φ into ⊢ ¬ζ[ψ], ζ[φ] along `path`.
fn wrap(
    zeta: &Formula,
    path: &[usize],
    p: Proof,
    psi: Formula,
    phi: Formula,
    base: &Base,
) -> Result<(Proof, Formula, Formula), GsError> {
    let Some((&k, rest)) = path.split_first() else {
        return Ok((p, psi, phi));
    };
    let (p, psi, phi) = wrap(zeta.at(&[k]).expect("valid path"), rest, p, psi, phi, base)?;
    let outer_phi = zeta.replace_at(&[k], phi).expect("valid slot");
    let outer_psi = zeta.replace_at(&[k], psi.clone()).expect("valid slot");
    let q = congruence(&outer_phi, k, &psi, p, base)?;
    let q = normalize(q, &outer_psi, &outer_phi, base)?;
    Ok((q, outer_psi, outer_phi))
}

/// Schematic implication over fresh atoms, then instantiated with the parts.
fn local_implication(
    inst: &RuleInstance,
    base: &Base,
) -> Result<(Proof, Formula, Formula), GsError> {
    let part = |s: &VertexSet| -> Result<Formula, GsError> {
        Ok(formula_of(&inst.premise.induced_subgraph(s)?, base)?)
    };
    let mut blocks: Vec<VertexSet> = Vec::new();
    let (shape, psi, phi) = match &inst.witness {
        Witness::Medial {
            template,
            left,
            right,
        } => {
            blocks.extend(left.iter().cloned());
            blocks.extend(right.iter().cloned());
            let names = fresh_atoms(blocks.len(), &[]);
            medial_schema(template, &names, base)?
        }
        Witness::Switch {
            template,
            slot,
            parts,
            moved,
        } => {
            blocks.push(moved.clone());
            blocks.extend(parts.iter().cloned());
            let names = fresh_atoms(blocks.len(), &[]);
            let empty: Vec<bool> = parts.iter().map(|p| p.is_empty()).collect();
            match inst.rule {
                GsRule::SPar => switch_schema(template, *slot, &names, &empty, true, base)?,
                _ => switch_schema(&template.complement(), *slot, &names, &empty, false, base)?,
            }
        }
        Witness::Atom { .. } => return Err(GsError::Domain("ai↓ has no implication form".into())),
    };
    let formulas: Vec<Option<Formula>> = blocks
        .iter()
        .map(|b| {
            if b.is_empty() {
                Ok(None)
            } else {
                part(b).map(Some)
            }
        })
        .collect::<Result<_, _>>()?;
    let avoid: Vec<&Formula> = formulas.iter().flatten().collect();
    let names = fresh_atoms(blocks.len(), &[]);
    if avoid
        .iter()
        .any(|f| names.iter().any(|n| f.atoms().contains(n)))
    {
        return Err(GsError::Domain("graph uses reserved atom names".into()));
    }
    let index = |l: &Literal| names.iter().position(|n| **n == *l.atom());
    let subst = |l: &Literal| {
        index(l).and_then(|i| formulas[i].clone()).map(|m| {
            if l.is_positive() {
                m
            } else {
                negate(&m, base)
            }
        })
    };
    let mut leaf_err = None;
    let proof = shape.substitute(&subst, &mut |leaf| {
        let Some(Formula::Lit(l)) = leaf.conclusion.first() else {
            return None;
        };
        let m = index(l).and_then(|i| formulas[i].clone())?;
        match derive_axiom(&m, base) {
            Ok(p) => Some(p),
            Err(e) => {
                leaf_err = Some(e);
                None
            }
        }
    })?;
    if let Some(e) = leaf_err {
        return Err(e.into());
    }
    Ok((
        proof,
        substitute_formula(&psi, &subst),
        substitute_formula(&phi, &subst),
    ))
}

/// p↓ over atoms `lᵢ = names[i]`, `rᵢ = names[n + i]`: ⊢ ¬⊗ᵢ(lᵢ ⅋ rᵢ), ¬T⟨l⟩ ⅋ T⟨r⟩.
fn medial_schema(
    t: &Template,
    names: &[String],
    base: &Base,
) -> Result<(Proof, Formula, Formula), GsError> {
    let n = t.size;
    let l: Vec<Literal> = (0..n).map(|i| Literal::pos(&names[i])).collect();
    let r: Vec<Literal> = (0..n).map(|i| Literal::pos(&names[n + i])).collect();
    let lit = |x: &Literal| Formula::Lit(x.clone());
    let pi = |i: usize| {
        Proof::tens(
            Proof::ax(&l[i]),
            &lit(&l[i].negate()),
            Proof::ax(&r[i]),
            &lit(&r[i].negate()),
        )
    };
    let x = via_template(
        &t.complement(),
        &l.iter().map(lit).collect::<Vec<_>>(),
        base,
    )?;
    let y = via_template(t, &r.iter().map(lit).collect::<Vec<_>>(), base)?;
    let joined = match (&x, &y) {
        (Formula::Par(a, b), Formula::Tens(c, d)) => {
            let q = Proof::tens(pi(0)?, c, pi(1)?, d)?;
            Proof::par(q, a, b)?
        }
        (Formula::Tens(a, b), Formula::Par(c, d)) => {
            let q = Proof::tens(pi(0)?, a, pi(1)?, b)?;
            Proof::par(q, c, d)?
        }
        (Formula::App(..), Formula::App(..)) => {
            let slot = |f: &Formula, x: &Literal| {
                f.children()
                    .iter()
                    .position(|c| **c == lit(x))
                    .expect("atom occurs once")
            };
            let sigma = l.iter().map(|a| slot(&x, a)).collect();
            let tau = r.iter().map(|a| slot(&y, a)).collect();
            Proof::dconr(
                &x,
                &y,
                sigma,
                tau,
                (0..n).map(pi).collect::<Result<_, _>>()?,
            )?
        }
        _ => return Err(GsError::Domain("p↓ template is not prime".into())),
    };
    let phi = Formula::par(x.clone(), y.clone());
    let joined = Proof::par(joined, &x, &y)?;
    let psi = Formula::tens_all(
        (0..n)
            .map(|i| Formula::par(lit(&l[i]), lit(&r[i])))
            .collect(),
    )
    .expect("n ≥ 2");
    Ok((close_par(joined, &negate(&psi, base))?, psi, phi))
}

/// Apply ⅋ introductions until `target` occurs in the conclusion.
fn close_par(p: Proof, target: &Formula) -> Result<Proof, GsError> {
    if p.conclusion.contains(target) {
        return Ok(p);
    }
    match target {
        Formula::Par(a, b) => {
            let p = close_par(close_par(p, a)?, b)?;
            Ok(Proof::par(p, a, b)?)
        }
        _ => Err(GsError::Domain(format!(
            "{target} is missing from the sequent"
        ))),
    }
}

/// The switch schema. Atom `names[0]` is the moved factor, `names[1 + i]`
/// part `i` (absent where `empty[i]`). With `positive`, the s⅋ implication
/// ⊢ ¬T⟨.., a ⅋ xₛ, ..⟩, a ⅋ T⟨x⟩ over `t`; otherwise the s⊗ implication
/// obtained by dualizing the s⅋ one over `t` (the complement of the s⊗ template).
fn switch_schema(
    t: &Template,
    slot: usize,
    names: &[String],
    empty: &[bool],
    positive: bool,
    base: &Base,
) -> Result<(Proof, Formula, Formula), GsError> {
    let lit = |i: usize| {
        Formula::Lit(if positive {
            Literal::pos(&names[i])
        } else {
            Literal::neg(&names[i])
        })
    };
    let a = lit(0);
    let mut args: Vec<Formula> = (0..t.size)
        .map(|i| if empty[i] { Formula::Unit } else { lit(1 + i) })
        .collect();
    args[slot] = if empty[slot] {
        a.clone()
    } else {
        Formula::par(a.clone(), args[slot].clone())
    };
    let f = via_template(t, &args, base)?;
    let path = f
        .positions()
        .into_iter()
        .find(|p| f.at(p) == Some(&a))
        .expect("moved atom occurs");
    let residual = f.replace_at(&path, Formula::Unit).expect("valid path");
    let p = Proof::wd_par(derive_axiom(&f, base)?, &f, path)?;
    let p = eliminate_wd_par(&Proof::par(p, &residual, &a)?, base)?;
    let moved_out = Formula::par(residual, a);
    if positive {
        Ok((p, f, moved_out))
    } else {
        // ⊢ ¬F, F° ⅋ ā read as ⊢ ¬ψ, φ with φ = ¬F and ψ = ¬(F° ⅋ ā).
        Ok((p, negate(&moved_out, base), negate(&f, base)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_sequent};
    use crate::graph::LabeledGraph;
    use crate::gs::{gs_rules, gs_search, GsOutcome, GsSearchConfig};
    use crate::sequent::{prove, Outcome};

    fn proof_of(s: &str, base: &Base) -> Proof {
        match prove(&parse_sequent(s, base).unwrap(), System::Mgl0, base) {
            Outcome::Found(p) => p,
            o => panic!("{s}: {o:?}"),
        }
    }

    fn conclusion_graph(p: &Proof) -> LabeledGraph {
        graph_of(&Formula::par_all(p.conclusion.clone()).unwrap())
    }

    #[test]
    fn axiom_becomes_atom_rule() {
        let base = Base::new();
        let p = Proof::ax(&Literal::pos("a"));
        let d = mgl0_to_gs(&p, &base).unwrap();
        assert_eq!(d.rules_used(), [GsRule::Ai].into());
        assert_eq!(d.length(), 1);
        assert_eq!(d.conclusion().unwrap(), conclusion_graph(&p));
    }

    #[test]
    fn mix_is_juxtaposition() {
        let base = Base::new();
        let p = Proof::mix(Proof::ax(&Literal::pos("a")), Proof::ax(&Literal::pos("b")));
        let d = mgl0_to_gs(&p, &base).unwrap();
        assert_eq!(d.count(GsRule::Ai), 2);
        assert_eq!(d.length(), 2);
        assert_eq!(d.conclusion().unwrap(), conclusion_graph(&p));
    }

    #[test]
    fn tensor_is_medial_on_two_clique() {
        let base = Base::new();
        let a = Formula::lit("a");
        let b = Formula::lit("b");
        let p = Proof::tens(
            Proof::ax(&Literal::pos("a")),
            &a,
            Proof::ax(&Literal::pos("b")),
            &b,
        )
        .unwrap();
        let d = mgl0_to_gs(&p, &base).unwrap();
        assert_eq!(d.count(GsRule::P), 1);
        let mut medial = None;
        d.visit_rules(&mut |r| {
            if r.rule == GsRule::P {
                medial = Some(r.witness.clone());
            }
        });
        assert!(
            matches!(medial, Some(Witness::Medial { template, .. }) if template == Template::tens())
        );
        assert_eq!(d.conclusion().unwrap(), conclusion_graph(&p));
    }

    #[test]
    fn mgl0_proofs_translate() {
        let base = Base::new();
        for s in [
            "a & b, ~a, ~b",
            "P4<a,b,c,d>, P4<~b,~d,~a,~c>",
            "(a | b) & c, ~a & ~b, ~c",
            "P4<a & b,c,d,e>, P4<~c,~e,~a | ~b,~d>",
        ] {
            let p = proof_of(s, &base);
            let d = mgl0_to_gs(&p, &base).unwrap_or_else(|e| panic!("{s}: {e}"));
            check_derivation(&d, &gs_rules()).unwrap();
            assert!(d.is_proof());
            assert_eq!(d.conclusion().unwrap(), conclusion_graph(&p), "{s}");
        }
    }

    fn back(s: &str, base: &Base) -> Proof {
        let g = graph_of(&parse(s, base).unwrap());
        let d = match gs_search(&g, &gs_rules(), GsSearchConfig::default(), base).unwrap() {
            GsOutcome::Found(d) => d,
            o => panic!("{s}: {o:?}"),
        };
        let p = gs_to_mgl0(&d, base).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(check_proof(&p, &System::Mgl0.rules(), base).is_ok());
        assert!(p.is_cut_free());
        assert_eq!(p.conclusion, vec![formula_of(&g, base).unwrap()]);
        p
    }

    #[test]
    fn atom_rule_alone_gives_par_of_axiom() {
        let base = Base::new();
        let p = back("a | ~a", &base);
        assert_eq!(p.rule, Rule::Par);
        assert_eq!(p.children[0].rule, Rule::Ax);
    }

    #[test]
    fn derivations_translate_back() {
        let base = Base::new();
        for s in [
            "(~a & ~b) | (a | b)",
            "(a | b) & c | ~a & ~b | ~c",
            "P4<~b,~d,~a,~c> | P4<a,b,c,d>",
            "(a & b) | (~a | (c & ~b)) | ~c",
        ] {
            back(s, &base);
        }
    }

    #[test]
    fn implications_for_each_rule() {
        let base = Base::new();
        let src = LabeledGraph::from_parts(
            (0..8).map(|i| (VertexId(i), Some(Literal::pos(&format!("x{i}"))))),
            [],
        )
        .unwrap();
        let s = |ids: &[u32]| ids.iter().map(|&i| VertexId(i)).collect::<VertexSet>();
        let p4 = Template {
            size: 4,
            edges: vec![(0, 1), (1, 2), (2, 3)],
        };
        let cases = vec![
            (
                GsRule::SPar,
                Witness::Switch {
                    template: p4.clone(),
                    slot: 1,
                    parts: vec![s(&[0]), s(&[1]), s(&[2]), s(&[3])],
                    moved: s(&[4, 5]),
                },
            ),
            (
                GsRule::SPar,
                Witness::Switch {
                    template: Template::tens(),
                    slot: 0,
                    parts: vec![s(&[]), s(&[1])],
                    moved: s(&[4]),
                },
            ),
            (
                GsRule::STens,
                Witness::Switch {
                    template: p4.clone(),
                    slot: 2,
                    parts: vec![s(&[0]), s(&[1]), s(&[]), s(&[3])],
                    moved: s(&[4]),
                },
            ),
            (
                GsRule::STens,
                Witness::Switch {
                    template: Template::par(),
                    slot: 1,
                    parts: vec![s(&[0]), s(&[1])],
                    moved: s(&[4]),
                },
            ),
            (
                GsRule::P,
                Witness::Medial {
                    template: p4.clone(),
                    left: vec![s(&[0]), s(&[1]), s(&[2]), s(&[3])],
                    right: vec![s(&[4]), s(&[5]), s(&[6]), s(&[7])],
                },
            ),
            (
                GsRule::P,
                Witness::Medial {
                    template: Template::par(),
                    left: vec![s(&[0]), s(&[1])],
                    right: vec![s(&[4]), s(&[5, 6])],
                },
            ),
        ];
        for (rule, w) in cases {
            let (premise, conclusion) = super::super::scheme_graphs(rule, &w, &src).unwrap();
            let inst = RuleInstance::from_premise(rule, premise.clone(), w).unwrap();
            let (p, psi, phi) =
                rule_implication(&inst, &base).unwrap_or_else(|e| panic!("{rule}: {e}"));
            assert!(
                check_proof(&p, &System::Mgl0.rules(), &base).is_ok(),
                "{rule}"
            );
            assert!(same_multiset(
                &p.conclusion,
                &[negate(&psi, &base), phi.clone()]
            ));
            assert!(
                decomp::find_isomorphism(&graph_of(&psi), &premise, None)
                    .unwrap()
                    .is_some(),
                "{rule}"
            );
            assert!(
                decomp::find_isomorphism(&graph_of(&phi), &conclusion, None)
                    .unwrap()
                    .is_some(),
                "{rule}"
            );
        }
    }

    #[test]
    fn implication_in_context() {
        let base = Base::new();
        let src = LabeledGraph::from_parts(
            (0..3).map(|i| (VertexId(i), Some(Literal::pos(&format!("x{i}"))))),
            [],
        )
        .unwrap();
        let s = |ids: &[u32]| ids.iter().map(|&i| VertexId(i)).collect::<VertexSet>();
        let w = Witness::Switch {
            template: Template::tens(),
            slot: 1,
            parts: vec![s(&[0]), s(&[1])],
            moved: s(&[2]),
        };
        let (premise, _) = super::super::scheme_graphs(GsRule::SPar, &w, &src).unwrap();
        let ctx = LabeledGraph::from_parts(
            [
                (VertexId(10), Some(Literal::pos("z"))),
                (VertexId(11), None),
                (VertexId(12), Some(Literal::pos("y"))),
            ],
            [(VertexId(10), VertexId(11))],
        )
        .unwrap();
        let inst = RuleInstance::from_premise(GsRule::SPar, premise, w)
            .unwrap()
            .with_context(Some(GraphContext::new(ctx, VertexId(11)).unwrap()));
        let (p, psi, phi) = rule_implication(&inst, &base).unwrap();
        assert!(check_proof(&p, &System::Mgl0.rules(), &base).is_ok());
        assert!(same_multiset(
            &p.conclusion,
            &[negate(&psi, &base), phi.clone()]
        ));
        assert!(
            decomp::find_isomorphism(&graph_of(&psi), &inst.premise_graph().unwrap(), None)
                .unwrap()
                .is_some()
        );
        assert!(
            decomp::find_isomorphism(&graph_of(&phi), &inst.conclusion_graph().unwrap(), None)
                .unwrap()
                .is_some()
        );
    }
}
