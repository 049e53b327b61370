//! Derived axioms: identity proofs ⊢ φ, ¬φ from atomic axioms, their
//! generalization to formulas with dual graphs, and equivalence proofs.

use super::{fresh_atoms, Proof, System};
use crate::decomp::{self, Base};
use crate::error::{ProofError, ProofResult};
use crate::formula::{self, graph_of, negate, Formula, Path};
use crate::graph::{Literal, VertexId};

/// Canonical unitor premise of `f`: the restriction of `f`'s connective to its
/// non-◦ slots, instantiated with the remaining arguments. Also returns the
/// path of every argument inside the result (`None` for ◦ slots).
/// `None` when every slot is ◦ or `f` is not compound.
pub fn unitor_premise(f: &Formula, base: &Base) -> Option<(Formula, Vec<Option<Path>>)> {
    let c = f.connective(base)?;
    let args: Vec<&Formula> = f.children();
    let keep: Vec<usize> = (0..args.len()).filter(|&i| !args[i].is_unit()).collect();
    if keep.is_empty() {
        return None;
    }
    let template = formula::restrict_template(&c, &keep, base);
    let markers = fresh_atoms(keep.len(), &[f]);
    let skeleton =
        formula::formula_of_tree(&template, &mut |v, _| Formula::lit(&markers[v.0 as usize]));
    let mut paths = vec![None; args.len()];
    for pos in skeleton.positions() {
        if let Some(Formula::Lit(l)) = skeleton.at(&pos) {
            let j = markers
                .iter()
                .position(|m| **m == *l.atom())
                .expect("marker");
            paths[keep[j]] = Some(pos);
        }
    }
    let chi = super::substitute_formula(&skeleton, &|l: &Literal| {
        markers
            .iter()
            .position(|m| **m == *l.atom())
            .map(|j| args[keep[j]].clone())
    });
    Some((chi, paths))
}

/// Replace, bottom-up, every compound subformula having ◦ slots by its
/// canonical unitor premise. Vacuous subformulas are left alone.
pub fn collapse_units(f: &Formula, base: &Base) -> Formula {
    match f {
        Formula::Unit | Formula::Lit(_) => f.clone(),
        _ => {
            let mut g = f.clone();
            for (c, orig) in g.children_mut().into_iter().zip(f.children()) {
                *c = collapse_units(orig, base);
            }
            if g.children().iter().any(|c| c.is_unit()) && !g.is_vacuous() {
                unitor_premise(&g, base).map(|(chi, _)| chi).unwrap_or(g)
            } else {
                g
            }
        }
    }
}

/// Cut-free proof of ⊢ f, g whenever the graph of `g` is isomorphic to the
/// dual of the graph of `f`. Uses MGL rules plus unitor (only when units occur).
pub fn axg(f: &Formula, g: &Formula, base: &Base) -> ProofResult<Proof> {
    if !f.is_pure() || !g.is_pure() {
        return Err(ProofError::Domain(
            "generalized axiom needs pure formulas".into(),
        ));
    }
    axg_seq(vec![f.clone()], vec![g.clone()], base)
}

fn domain(msg: &str) -> ProofError {
    ProofError::Domain(msg.into())
}

/// Prove ⊢ Γ, Δ where the graph of ⅋Δ is the dual of the graph of ⅋Γ.
fn axg_seq(gamma: Vec<Formula>, delta: Vec<Formula>, base: &Base) -> ProofResult<Proof> {
    for side in 0..2 {
        let list = if side == 0 { &gamma } else { &delta };
        for (i, f) in list.iter().enumerate() {
            if let Some(k) = f.children().iter().position(|c| c.is_unit()) {
                let (chi, _) = unitor_premise(f, base).ok_or_else(|| domain("vacuous formula"))?;
                let (mut g2, mut d2) = (gamma.clone(), delta.clone());
                if side == 0 {
                    g2[i] = chi.clone();
                } else {
                    d2[i] = chi.clone();
                }
                return Proof::unitor(axg_seq(g2, d2, base)?, &chi, f, k);
            }
            if let Formula::Par(a, b) = f {
                let (mut g2, mut d2) = (gamma.clone(), delta.clone());
                let target = if side == 0 { &mut g2 } else { &mut d2 };
                target.remove(i);
                target.push((**a).clone());
                target.push((**b).clone());
                return Proof::par(axg_seq(g2, d2, base)?, a, b);
            }
        }
    }
    match (gamma.as_slice(), delta.as_slice()) {
        ([Formula::Lit(x)], [Formula::Lit(y)]) if x.negate() == *y => return Ok(Proof::ax(x)),
        ([Formula::Lit(_)], [Formula::Lit(_)]) => return Err(domain("literals are not dual")),
        _ => {}
    }
    let (m, ranges_g, ranges_d) = occurrence_map(&gamma, &delta)?;
    match (gamma.as_slice(), delta.as_slice()) {
        (_, [Formula::Tens(a, b)]) if gamma.len() > 1 => {
            let (ga, gb) = split_by(&gamma, &ranges_g, &m, a.literal_count())?;
            Proof::tens(
                axg_seq(ga, vec![(**a).clone()], base)?,
                a,
                axg_seq(gb, vec![(**b).clone()], base)?,
                b,
            )
        }
        ([Formula::Tens(a, b)], _) if delta.len() > 1 => {
            let inv: Vec<usize> = invert(&m);
            let (da, db) = split_by(&delta, &ranges_d, &inv, a.literal_count())?;
            Proof::tens(
                axg_seq(vec![(**a).clone()], da, base)?,
                a,
                axg_seq(vec![(**b).clone()], db, base)?,
                b,
            )
        }
        ([x @ Formula::App(c, xs)], [y @ Formula::App(q, ys)]) => {
            if base.dual_of(c).name() != q.name() {
                return Err(domain("connectives are not dual"));
            }
            let slot_of =
                |offsets: &[usize], v: usize| offsets.iter().rposition(|&o| o <= v).unwrap();
            let xo = slot_offsets(xs);
            let yo = slot_offsets(ys);
            let tau: Vec<usize> = (0..xs.len()).map(|i| slot_of(&yo, m[xo[i]])).collect();
            let kids = (0..xs.len())
                .map(|i| axg_seq(vec![xs[i].clone()], vec![ys[tau[i]].clone()], base))
                .collect::<ProofResult<Vec<_>>>()?;
            Proof::dconr(x, y, (0..xs.len()).collect(), tau, kids)
        }
        _ => Err(domain("graphs are not dual")),
    }
}

fn slot_offsets(args: &[Formula]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 0;
    for a in args {
        out.push(n);
        n += a.literal_count();
    }
    out
}

/// Isomorphism from the dual of ⅋Γ to ⅋Δ as occurrence indices, plus the
/// occurrence offsets of each formula on both sides.
fn occurrence_map(
    gamma: &[Formula],
    delta: &[Formula],
) -> ProofResult<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let g =
        graph_of(&Formula::par_all(gamma.to_vec()).ok_or_else(|| domain("empty side"))?).dual()?;
    let d = graph_of(&Formula::par_all(delta.to_vec()).ok_or_else(|| domain("empty side"))?);
    let iso =
        decomp::find_isomorphism(&g, &d, None)?.ok_or_else(|| domain("graphs are not dual"))?;
    let m = (0..g.len())
        .map(|i| iso[&VertexId(i as u32)].0 as usize)
        .collect();
    Ok((m, slot_offsets(gamma), slot_offsets(delta)))
}

fn invert(m: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; m.len()];
    for (i, &j) in m.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Partition `list` by whether its occurrences map below `cut` or not.
fn split_by(
    list: &[Formula],
    offsets: &[usize],
    m: &[usize],
    cut: usize,
) -> ProofResult<(Vec<Formula>, Vec<Formula>)> {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for (f, &o) in list.iter().zip(offsets) {
        let sides: Vec<bool> = (o..o + f.literal_count()).map(|v| m[v] < cut).collect();
        if sides.iter().all(|&s| s) {
            lo.push(f.clone());
        } else if sides.iter().all(|&s| !s) {
            hi.push(f.clone());
        } else {
            return Err(domain("isomorphism splits a formula"));
        }
    }
    if lo.is_empty() || hi.is_empty() {
        return Err(domain("graphs are not dual"));
    }
    Ok((lo, hi))
}

/// Proof of ⊢ f, ¬f with atomic axiom leaves.
pub fn derive_axiom(f: &Formula, base: &Base) -> ProofResult<Proof> {
    if !f.is_pure() {
        return Err(ProofError::Domain(format!("{f} is not pure")));
    }
    axg(f, &negate(f, base), base)
}

/// Proofs of ⊢ ¬f ⅋ g and ⊢ ¬g ⅋ f for pure formulas with isomorphic graphs.
pub fn equivalence_proof(f: &Formula, g: &Formula, base: &Base) -> ProofResult<(Proof, Proof)> {
    if !f.is_pure() || !g.is_pure() {
        return Err(ProofError::Domain("equivalence needs pure formulas".into()));
    }
    if decomp::find_isomorphism(&graph_of(f), &graph_of(g), None)?.is_none() {
        return Err(ProofError::Domain("graphs do not match".into()));
    }
    let one = |x: &Formula, y: &Formula| -> ProofResult<Proof> {
        let nx = negate(x, base);
        Proof::par(axg(&nx, y, base)?, &nx, y)
    };
    Ok((one(f, g)?, one(g, f)?))
}

/// Turn a proof of ⊢ Γ, `from` into one of ⊢ Γ, `to` when both formulas have
/// the same graph, by cutting against a generalized axiom and eliminating.
pub fn retype(
    p: &Proof,
    from: &Formula,
    to: &Formula,
    system: System,
    base: &Base,
) -> ProofResult<Proof> {
    if from == to {
        return Ok(p.clone());
    }
    let bridge = axg(&negate(from, base), to, base)?;
    let cut = Proof::cut(p.clone(), from, bridge, base)?;
    Ok(super::eliminate_cut(&cut, system, base)?.proof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::{check_proof, Rule};

    fn p(s: &str, base: &Base) -> Formula {
        parse(s, base).unwrap()
    }

    #[test]
    fn atom_gives_single_axiom() {
        let base = Base::new();
        let pr = derive_axiom(&p("a", &base), &base).unwrap();
        assert_eq!(pr.rule, Rule::Ax);
    }

    #[test]
    fn p4_gives_dconr_over_axioms() {
        let base = Base::new();
        let pr = derive_axiom(&p("P4<a,b,c,d>", &base), &base).unwrap();
        assert_eq!(pr.rule, Rule::Dconr);
        assert!(pr.children.iter().all(|c| c.rule == Rule::Ax));
        assert!(check_proof(&pr, &System::Mgl.into(), &base).is_ok());
    }

    #[test]
    fn unit_slot_uses_two_unitors() {
        let base = Base::new();
        let pr = derive_axiom(&p("o & a", &base), &base).unwrap();
        assert_eq!(pr.count(Rule::Unitor), 2);
        assert_eq!(pr.count(Rule::Ax), 1);
        assert!(check_proof(&pr, &System::Mgl0.into(), &base).is_ok());
    }

    #[test]
    fn impure_rejected() {
        let base = Base::new();
        assert!(derive_axiom(&p("(o & o) | a", &base), &base).is_err());
    }

    #[test]
    fn equivalences() {
        let base = Base::new();
        for (f, g) in [
            ("(a & b) & c", "a & (b & c)"),
            ("P4<a,b,c,d>", "P4<d,c,b,a>"),
            ("o | a", "a"),
        ] {
            let (x, y) = equivalence_proof(&p(f, &base), &p(g, &base), &base).unwrap();
            assert!(
                check_proof(&x, &System::Mgl0.into(), &base).is_ok(),
                "{f} -o {g}"
            );
            assert!(
                check_proof(&y, &System::Mgl0.into(), &base).is_ok(),
                "{g} -o {f}"
            );
        }
        assert!(equivalence_proof(&p("a & b", &base), &p("a | b", &base), &base).is_err());
    }

    #[test]
    fn unitor_premise_tracks_paths() {
        let base = Base::new();
        let f = p("Bull<x, o, y, z, w>", &base);
        let (chi, paths) = unitor_premise(&f, &base).unwrap();
        assert!(paths[1].is_none());
        for (i, name) in [(0, "x"), (2, "y"), (3, "z"), (4, "w")] {
            assert_eq!(
                chi.at(paths[i].as_ref().unwrap()),
                Some(&Formula::lit(name))
            );
        }
    }
}
