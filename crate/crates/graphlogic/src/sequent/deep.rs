//! Admissibility of the deep rule: from ⊢ Γ, φ and ⊢ Δ, ψ with the graph of
//! ζ[◦] equal to that of ψ, derive ⊢ Γ, Δ, ζ[φ].

use super::axiom::{axg, derive_axiom, retype};
use super::{fresh_atoms, Proof, Rule, System};
use crate::decomp::{self, Base};
use crate::error::{ProofError, ProofResult};
use crate::formula::{graph_of, negate, Formula, FormulaContext};
use crate::graph::Literal;

/// MGL° proof of ⊢ Γ, Δ, ctx[φ] from `pa` (⊢ Γ, φ) and `pb` (⊢ Δ, ψ).
pub fn derive_deep(
    ctx: &FormulaContext,
    pa: &Proof,
    phi: &Formula,
    pb: &Proof,
    psi: &Formula,
    base: &Base,
) -> ProofResult<Proof> {
    deep_at(&ctx.plug(phi), ctx.hole(), pa, phi, pb, psi, base)
}

/// Replace every deep node by its derivation, topmost first.
pub fn expand_deep(p: &Proof, base: &Base) -> ProofResult<Proof> {
    let kids = p
        .children
        .iter()
        .map(|c| expand_deep(c, base))
        .collect::<ProofResult<Vec<_>>>()?;
    if p.rule == Rule::Deep {
        let path = p
            .path
            .clone()
            .ok_or_else(|| ProofError::Format("deep without path".into()))?;
        let (phi, psi) = (&p.actives[0][0], &p.actives[1][0]);
        return deep_at(p.principals()[0], &path, &kids[0], phi, &kids[1], psi, base);
    }
    if kids == p.children {
        Ok(p.clone())
    } else {
        p.rebuild(kids)
    }
}

fn deep_at(
    zeta_phi: &Formula,
    path: &[usize],
    pa: &Proof,
    phi: &Formula,
    pb: &Proof,
    psi: &Formula,
    base: &Base,
) -> ProofResult<Proof> {
    if path.is_empty() {
        return Err(ProofError::Domain("context must be non-trivial".into()));
    }
    if zeta_phi.at(path) != Some(phi) {
        return Err(ProofError::Domain(
            "context does not hold the formula at its hole".into(),
        ));
    }
    let hole = zeta_phi.replace_at(path, Formula::Unit).unwrap();
    if !hole.is_pure() || !psi.is_pure() {
        return Err(ProofError::Domain(
            "context with ◦ plugged must be pure".into(),
        ));
    }
    if decomp::find_isomorphism(&graph_of(&hole), &graph_of(psi), None)?.is_none() {
        return Err(ProofError::Domain(
            "context graph differs from the right premise formula".into(),
        ));
    }
    let d = towards(zeta_phi, path, pa, phi, base)?;
    let pb2 = retype(pb, psi, &hole, System::Mgl0, base)?;
    let cut = Proof::cut(pb2, &hole, d, base)?;
    Ok(super::eliminate_cut(&cut, System::Mgl0, base)?.proof)
}

/// Proof of ⊢ Γ, ¬ζ[◦], ζ[φ] from `pa` proving ⊢ Γ, φ.
fn towards(
    zeta_phi: &Formula,
    path: &[usize],
    pa: &Proof,
    phi: &Formula,
    base: &Base,
) -> ProofResult<Proof> {
    let (&k, rest) = path.split_first().unwrap();
    let hole = zeta_phi.replace_at(path, Formula::Unit).unwrap();
    if rest.is_empty() {
        return Proof::wd_tens(pa.clone(), derive_axiom(&hole, base)?, zeta_phi, k);
    }
    let inner_hole = hole.at(&[k]).unwrap().clone();
    congruence(
        zeta_phi,
        k,
        &inner_hole,
        towards(zeta_phi.at(&[k]).unwrap(), rest, pa, phi, base)?,
        base,
    )
}

/// Lift `below` (⊢ Γ, ¬ν, ζₖ) through the top connective of `zeta`, whose
/// argument `k` is ζₖ: the result proves ⊢ Γ, ¬ζ[ν/k], ζ. The other
/// arguments are closed by identity proofs.
pub(crate) fn congruence(
    zeta: &Formula,
    k: usize,
    nu: &Formula,
    below: Proof,
    base: &Base,
) -> ProofResult<Proof> {
    // Identity on ζ's top connective over fresh atoms, instantiated slotwise.
    let args: Vec<Formula> = zeta.children().into_iter().cloned().collect();
    let names = fresh_atoms(args.len(), &[zeta, nu]);
    let mut skeleton = zeta.clone();
    for (i, a) in args.iter().enumerate() {
        if !a.is_unit() || i == k {
            *skeleton.at_mut(&[i]).unwrap() = Formula::Lit(Literal::pos(&names[i]));
        }
    }
    let proof = axg(&skeleton, &negate(&skeleton, base), base)?;
    let index = |l: &Literal| names.iter().position(|s| **s == *l.atom());
    let mut leaves: Vec<Option<Proof>> = args
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i == k || a.is_unit() {
                Ok(None)
            } else {
                derive_axiom(a, base).map(Some)
            }
        })
        .collect::<ProofResult<_>>()?;
    leaves[k] = Some(below);
    proof.substitute(
        &|l| {
            index(l).map(|i| match (i == k, l.is_positive()) {
                (true, true) => args[k].clone(),
                (true, false) => negate(nu, base),
                (false, true) => args[i].clone(),
                (false, false) => negate(&args[i], base),
            })
        },
        &mut |leaf| {
            let Some(Formula::Lit(l)) = leaf.conclusion.first() else {
                return None;
            };
            index(l).and_then(|i| leaves[i].clone())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::{check_proof, prove, Outcome};

    fn f(s: &str, base: &Base) -> Formula {
        parse(s, base).unwrap()
    }

    fn found(s: &str, base: &Base) -> Proof {
        match prove(
            &crate::formula::parse_sequent(s, base).unwrap(),
            System::Mgl0,
            base,
        ) {
            Outcome::Found(p) => p,
            o => panic!("{s}: {o:?}"),
        }
    }

    #[test]
    fn tensor_context() {
        let base = Base::new();
        let phi = f("a | ~a", &base);
        let pa = found("a | ~a", &base);
        let pb = found("x, ~x", &base);
        let ctx = FormulaContext::new(f("z & x", &base), vec![0]).unwrap();
        let out = derive_deep(&ctx, &pa, &phi, &pb, &f("x", &base), &base).unwrap();
        assert!(check_proof(&out, &System::Mgl0.into(), &base).is_ok());
        let mut expect = vec![f("(a | ~a) & x", &base), f("~x", &base)];
        expect.sort();
        let mut got = out.conclusion.clone();
        got.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn par_context_and_nesting() {
        let base = Base::new();
        let phi = f("a | ~a", &base);
        let pa = found("a | ~a", &base);
        for (ctx, hole, psi, pb) in [
            ("z | x", vec![0], "x", "x, ~x"),
            ("(z & y) | x", vec![0, 0], "y | x", "y | x, ~y & ~x"),
            (
                "P4<y, z & w, x, v>",
                vec![1, 0],
                "P4<y, w, x, v>",
                "P4<y,w,x,v>, ~P4<y,w,x,v>",
            ),
        ] {
            let ctx = FormulaContext::new(f(ctx, &base), hole).unwrap();
            let out =
                derive_deep(&ctx, &pa, &phi, &found(pb, &base), &f(psi, &base), &base).unwrap();
            assert!(
                check_proof(&out, &System::Mgl0.into(), &base).is_ok(),
                "{ctx}"
            );
            assert!(out.conclusion.contains(&ctx.plug(&phi)));
        }
    }

    #[test]
    fn side_condition_enforced() {
        let base = Base::new();
        let phi = f("a | ~a", &base);
        let pa = found("a | ~a", &base);
        let ctx = FormulaContext::new(f("z & x", &base), vec![0]).unwrap();
        assert!(derive_deep(
            &ctx,
            &pa,
            &phi,
            &found("y, ~y", &base),
            &f("y", &base),
            &base
        )
        .is_err());
    }
}
