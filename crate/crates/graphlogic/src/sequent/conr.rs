//! The conr rule of MLL with connectives, derived in MGL°: one premise per
//! argument, assembled by ⅋ with mix, ⊗, and wd_tens followed by unitor.

use super::axiom::unitor_premise;
use super::{fresh_atoms, with_unit_at, Proof, Rule};
use crate::decomp::Base;
use crate::error::{ProofError, ProofResult};
use crate::formula::Formula;
use crate::graph::Literal;

/// MGL° derivation of a conr node from its (already derived) premises.
pub fn derive_conr(p: &Proof, base: &Base) -> ProofResult<Proof> {
    if p.rule != Rule::Conr {
        return Err(ProofError::Domain(format!(
            "expected a conr node, found {}",
            p.rule
        )));
    }
    let f = p.principals()[0].clone();
    let args: Vec<Formula> = f.children().into_iter().cloned().collect();
    let names = fresh_atoms(args.len(), &[&f]);
    let mut skeleton = f.clone();
    for (k, c) in skeleton.children_mut().into_iter().enumerate() {
        *c = Formula::Lit(Literal::pos(&names[k]));
    }
    let index = |l: &Literal| names.iter().position(|s| **s == *l.atom());
    skel(&skeleton, base)?.substitute(&|l| index(l).map(|k| args[k].clone()), &mut |leaf| {
        let Some(Formula::Lit(l)) = leaf.conclusion.first() else {
            return None;
        };
        index(l).map(|k| p.children[k].clone())
    })
}

/// Replace every conr node by its derivation.
pub fn expand_conr(p: &Proof, base: &Base) -> ProofResult<Proof> {
    let kids = p
        .children
        .iter()
        .map(|c| expand_conr(c, base))
        .collect::<ProofResult<Vec<_>>>()?;
    let q = if kids == p.children {
        p.clone()
    } else {
        p.rebuild(kids)?
    };
    if q.rule == Rule::Conr {
        derive_conr(&q, base)
    } else {
        Ok(q)
    }
}

/// Proof of ⊢ f from one open premise ⊢ x per literal x of `f`.
fn skel(f: &Formula, base: &Base) -> ProofResult<Proof> {
    match f {
        Formula::Lit(_) => Ok(Proof::hyp(vec![f.clone()])),
        Formula::Unit => Err(ProofError::Domain("conr argument is ◦".into())),
        Formula::Par(a, b) => Proof::par(Proof::mix(skel(a, base)?, skel(b, base)?), a, b),
        Formula::Tens(a, b) => Proof::tens(skel(a, base)?, a, skel(b, base)?, b),
        Formula::App(_, args) => {
            let residual = with_unit_at(f, 0).unwrap();
            let (chi, _) = unitor_premise(&residual, base)
                .ok_or_else(|| ProofError::Domain("vacuous residual".into()))?;
            let right = Proof::unitor(skel(&chi, base)?, &chi, &residual, 0)?;
            Proof::wd_tens(skel(&args[0], base)?, right, f, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::{check_proof, derive_axiom, System};

    fn axioms(args: &[&str], base: &Base) -> Vec<Proof> {
        args.iter()
            .map(|a| derive_axiom(&parse(a, base).unwrap(), base).unwrap())
            .collect()
    }

    #[test]
    fn par_becomes_par_and_mix() {
        let base = Base::new();
        let f = parse("a | b", &base).unwrap();
        let c = Proof::conr(&f, axioms(&["a", "b"], &base)).unwrap();
        assert!(check_proof(&c, &System::MllConr.into(), &base).is_ok());
        let d = derive_conr(&c, &base).unwrap();
        assert_eq!(d.rule, Rule::Par);
        assert_eq!(d.children[0].rule, Rule::Mix);
        assert!(check_proof(&d, &System::Mgl0.into(), &base).is_ok());
    }

    #[test]
    fn prime_becomes_wd_tens_cascade() {
        let base = Base::new();
        let f = parse("P4<a,b & c,d,e>", &base).unwrap();
        let c = Proof::conr(&f, axioms(&["a", "b & c", "d", "e"], &base)).unwrap();
        let d = expand_conr(&c, &base).unwrap();
        assert_eq!(d.rule, Rule::WdTens);
        assert!(d.uses(Rule::Unitor));
        assert!(check_proof(&d, &System::Mgl0.into(), &base).is_ok(), "{d}");
        assert!(super::super::same_multiset(&d.conclusion, &c.conclusion));
    }
}
