//! Elimination of the weak-distributivity rule wd_par: each occurrence is
//! pushed up the proof until it meets the rule introducing its formula.

use super::axiom::{axg, retype, unitor_premise};
use super::{fresh_atoms, with_unit_at, Proof, Rule, System};
use crate::decomp::Base;
use crate::error::{ProofError, ProofResult};
use crate::formula::{Formula, Path};
use crate::graph::Literal;

/// Remove every wd_par node, topmost first. Other rules are kept; the
/// output checks in MGL° whenever the input checks in MGL° with wd_par.
pub fn eliminate_wd_par(p: &Proof, base: &Base) -> ProofResult<Proof> {
    let children = p
        .children
        .iter()
        .map(|c| eliminate_wd_par(c, base))
        .collect::<ProofResult<Vec<_>>>()?;
    if p.rule == Rule::WdPar {
        let f = p.actives[0][0].clone();
        let path = p
            .path
            .clone()
            .ok_or_else(|| ProofError::Format("wd_par without path".into()))?;
        return push(&children[0], &f, &path, base);
    }
    if children == p.children {
        return Ok(p.clone());
    }
    p.rebuild(children)
}

/// From a wd_par-free proof `q` of ⊢ Γ, F build one of ⊢ Γ, F[◦/path], F@path.
pub(crate) fn push(q: &Proof, f: &Formula, path: &[usize], base: &Base) -> ProofResult<Proof> {
    let (k, rest) = path
        .split_first()
        .ok_or_else(|| ProofError::Domain("wd_par needs a non-empty path".into()))?;
    let k = *k;
    let residual = f
        .replace_at(path, Formula::Unit)
        .ok_or_else(|| ProofError::Domain("path out of range".into()))?;
    if !q.principals().contains(&f) {
        let j = (0..q.children.len())
            .find(|&j| q.context_of(j).contains(f))
            .ok_or_else(|| ProofError::Domain(format!("{f} does not occur in the proof")))?;
        let mut kids = q.children.clone();
        kids[j] = push(&q.children[j], f, path, base)?;
        return q.rebuild(kids);
    }
    let kid = f.at(&[k]).unwrap().clone();
    match q.rule {
        Rule::Par => {
            let child = &q.children[0];
            if rest.is_empty() {
                let other = f.at(&[1 - k]).unwrap();
                return Proof::unitor(child.clone(), other, &residual, k);
            }
            let c2 = push(child, &kid, rest, base)?;
            let new_kid = kid.replace_at(rest, Formula::Unit).unwrap();
            let (a, b) = if k == 0 {
                (new_kid, f.at(&[1]).unwrap().clone())
            } else {
                (f.at(&[0]).unwrap().clone(), new_kid)
            };
            Proof::par(c2, &a, &b)
        }
        Rule::Tens => {
            let (l, r) = (&q.children[0], &q.children[1]);
            if rest.is_empty() {
                let other = f.at(&[1 - k]).unwrap();
                return Proof::unitor(Proof::mix(l.clone(), r.clone()), other, &residual, k);
            }
            let new_kid = kid.replace_at(rest, Formula::Unit).unwrap();
            if k == 0 {
                Proof::tens(
                    push(l, &kid, rest, base)?,
                    &new_kid,
                    r.clone(),
                    f.at(&[1]).unwrap(),
                )
            } else {
                Proof::tens(
                    l.clone(),
                    f.at(&[0]).unwrap(),
                    push(r, &kid, rest, base)?,
                    &new_kid,
                )
            }
        }
        Rule::Dconr => {
            let pr = q.principals();
            let first = *pr[0] == *f;
            let (own, other_slots) = if first {
                (&q.sigma, &q.tau)
            } else {
                (&q.tau, &q.sigma)
            };
            let m = own
                .iter()
                .position(|&s| s == k)
                .ok_or_else(|| ProofError::Format("dconr pairing incomplete".into()))?;
            let g = if first { pr[1].clone() } else { pr[0].clone() };
            if rest.is_empty() {
                let right = dconr_residual(q, m, base)?;
                return Proof::wd_tens(q.children[m].clone(), right, &g, other_slots[m]);
            }
            let mut kids = q.children.clone();
            kids[m] = push(&q.children[m], &kid, rest, base)?;
            if first {
                Proof::dconr(&residual, &g, q.sigma.clone(), q.tau.clone(), kids)
            } else {
                Proof::dconr(&g, &residual, q.sigma.clone(), q.tau.clone(), kids)
            }
        }
        Rule::WdTens => {
            let e = q.slot.unwrap();
            let (l, r) = (&q.children[0], &q.children[1]);
            let f_e = with_unit_at(f, e).unwrap();
            if rest.is_empty() && k == e {
                return Ok(Proof::mix(l.clone(), r.clone()));
            }
            if rest.is_empty() {
                let both = with_unit_at(&f_e, k).unwrap();
                if both.is_vacuous() {
                    // Only slots e and k carry literals: unitor on the left,
                    // and the right premise already has the graph of slot k.
                    let left =
                        Proof::unitor(l.clone(), &f.at(&[e]).unwrap().clone(), &residual, k)?;
                    let right = retype(r, &f_e, &kid, System::Mgl0, base)?;
                    return Ok(Proof::mix(left, right));
                }
                let r2 = push(r, &f_e, &[k], base)?;
                return Proof::wd_tens(l.clone(), r2, &residual, e);
            }
            if k == e {
                let l2 = push(l, &kid, rest, base)?;
                Proof::wd_tens(l2, r.clone(), &residual, e)
            } else {
                let r2 = push(r, &f_e, path, base)?;
                Proof::wd_tens(l.clone(), r2, &residual, e)
            }
        }
        Rule::Unitor => {
            let u = q.slot.unwrap();
            let chi = q.actives[0][0].clone();
            let (canon, paths) = unitor_premise(f, base)
                .ok_or_else(|| ProofError::Domain("vacuous formula".into()))?;
            let child = retype(&q.children[0], &chi, &canon, System::Mgl0, base)?;
            let mut inner: Path = paths[k]
                .clone()
                .ok_or_else(|| ProofError::Domain("cannot extract a unit".into()))?;
            inner.extend_from_slice(rest);
            let c2 = push(&child, &canon, &inner, base)?;
            let canon_res = canon.replace_at(&inner, Formula::Unit).unwrap();
            Proof::unitor(c2, &canon_res, &residual, u)
        }
        r => Err(ProofError::Domain(format!(
            "wd_par cannot be pushed through {r}"
        ))),
    }
}

/// For a dconr node `q`, prove its principal pair with the slots of premise
/// `m` replaced by ◦, from the other premises: the derived rule dconr over
/// the restricted connectives, followed by the unitors.
pub(crate) fn dconr_residual(q: &Proof, m: usize, base: &Base) -> ProofResult<Proof> {
    let pr = q.principals();
    let (x, y) = (pr[0].clone(), pr[1].clone());
    let n = q.children.len();
    let avoid: Vec<&Formula> = vec![&x, &y];
    let names = fresh_atoms(n, &avoid);
    let mut xs = x.clone();
    let mut ys = y.clone();
    for k in 0..n {
        let (sx, sy) = if k == m {
            (Formula::Unit, Formula::Unit)
        } else {
            (
                Formula::Lit(Literal::pos(&names[k])),
                Formula::Lit(Literal::neg(&names[k])),
            )
        };
        *xs.at_mut(&[q.sigma[k]]).unwrap() = sx;
        *ys.at_mut(&[q.tau[k]]).unwrap() = sy;
    }
    let skeleton = axg(&xs, &ys, base)?;
    let xk: Vec<Formula> = (0..n)
        .map(|k| x.at(&[q.sigma[k]]).unwrap().clone())
        .collect();
    let yk: Vec<Formula> = (0..n).map(|k| y.at(&[q.tau[k]]).unwrap().clone()).collect();
    let index = |l: &Literal| names.iter().position(|s| **s == *l.atom());
    skeleton.substitute(
        &|l| {
            index(l).map(|k| {
                if l.is_positive() {
                    xk[k].clone()
                } else {
                    yk[k].clone()
                }
            })
        },
        &mut |leaf| {
            let Some(Formula::Lit(l)) = leaf.conclusion.first() else {
                return None;
            };
            index(l).map(|k| q.children[k].clone())
        },
    )
}
