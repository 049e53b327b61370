//! The rule checker.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{remove_all, same_multiset, with_unit_at, Proof, Rule, RuleSet, System};
use crate::decomp::{self, Base};
use crate::formula::{self, graph_of, negate, normal_form, Formula, NormalForm};
use crate::perm;

/// Why a node was rejected, and where: `path` lists child indices from the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node {:?}: {}", self.rule, self.path, self.message)
    }
}

/// Accept iff every node instantiates a rule of `rules`.
pub fn check_proof(p: &Proof, rules: &RuleSet, base: &Base) -> Result<(), Diagnostic> {
    let mut path = Vec::new();
    check_node(p, rules, base, &mut path)
}

fn check_node(
    p: &Proof,
    rules: &RuleSet,
    base: &Base,
    path: &mut Vec<usize>,
) -> Result<(), Diagnostic> {
    let fail = |msg: String| Diagnostic {
        path: path.clone(),
        rule: p.rule,
        message: msg,
    };
    if !rules.contains(p.rule) {
        return Err(fail(format!("rule {} is not part of the system", p.rule)));
    }
    local(p, base).map_err(fail)?;
    for (i, c) in p.children.iter().enumerate() {
        path.push(i);
        check_node(c, rules, base, path)?;
        path.pop();
    }
    Ok(())
}

/// Check the node's own inference, trusting nothing stored in it.
fn local(p: &Proof, base: &Base) -> Result<(), String> {
    if p.actives.len() != p.children.len() {
        return Err("active lists do not match the premises".into());
    }
    let distinct: BTreeSet<usize> = p.principal.iter().copied().collect();
    if distinct.len() != p.principal.len() || p.principal.iter().any(|&i| i >= p.conclusion.len()) {
        return Err("bad principal indices".into());
    }
    let mut contexts = Vec::new();
    for (c, a) in p.children.iter().zip(&p.actives) {
        let ctx =
            remove_all(&c.conclusion, a).ok_or("active formulas are missing from a premise")?;
        contexts.extend(ctx);
    }
    let rest: Vec<Formula> = p
        .conclusion
        .iter()
        .enumerate()
        .filter(|(i, _)| !distinct.contains(i))
        .map(|(_, f)| f.clone())
        .collect();
    if !same_multiset(&rest, &contexts) {
        return Err("conclusion context differs from the premise contexts".into());
    }
    let pr: Vec<&Formula> = p.principals();
    let a = &p.actives;
    let arity = |n: usize| -> Result<(), String> {
        if p.children.len() == n {
            Ok(())
        } else {
            Err(format!("expected {n} premises, found {}", p.children.len()))
        }
    };
    let shape = |ok: bool, what: &str| -> Result<(), String> {
        ok.then_some(()).ok_or_else(|| what.to_string())
    };
    match p.rule {
        Rule::Ax => {
            arity(0)?;
            match pr.as_slice() {
                [Formula::Lit(x), Formula::Lit(y)] if x.negate() == *y => Ok(()),
                _ => Err("not dual atoms".into()),
            }
        }
        Rule::Par => {
            arity(1)?;
            match (pr.as_slice(), a[0].as_slice()) {
                ([Formula::Par(x, y)], [u, v]) if **x == *u && **y == *v => Ok(()),
                _ => Err("⅋ must join its two active formulas".into()),
            }
        }
        Rule::Tens => {
            arity(2)?;
            match (pr.as_slice(), a[0].as_slice(), a[1].as_slice()) {
                ([Formula::Tens(x, y)], [u], [v]) if **x == *u && **y == *v => Ok(()),
                _ => Err("⊗ must join one active formula from each premise".into()),
            }
        }
        Rule::Dconr => check_dconr(p, &pr, base),
        Rule::Mix => {
            arity(2)?;
            shape(
                pr.is_empty() && a.iter().all(|x| x.is_empty()),
                "mix has no active formulas",
            )
        }
        Rule::WdTens => {
            arity(2)?;
            let [f] = pr.as_slice() else {
                return Err("wd_tens has one principal formula".into());
            };
            let k = p.slot.ok_or("wd_tens needs a slot")?;
            let factor = f
                .at(&[k])
                .filter(|_| !f.children().is_empty())
                .ok_or("slot out of range")?;
            let residual = with_unit_at(f, k).unwrap();
            shape(
                a[0] == [factor.clone()],
                "left premise must hold the extracted factor",
            )?;
            shape(
                a[1] == [residual],
                "right premise must hold the residual with ◦ at the slot",
            )
        }
        Rule::Unitor => {
            arity(1)?;
            let [f] = pr.as_slice() else {
                return Err("unitor has one principal formula".into());
            };
            let k = p.slot.ok_or("unitor needs a slot")?;
            shape(
                !f.children().is_empty() && f.at(&[k]) == Some(&Formula::Unit),
                "slot must hold ◦",
            )?;
            let [chi] = a[0].as_slice() else {
                return Err("unitor has one active formula".into());
            };
            let (gf, gc) = (graph_of(f), graph_of(chi));
            shape(!gf.is_empty(), "graph must be non-empty")?;
            shape(
                isomorphic(&gf, &gc),
                "premise graph differs from the conclusion graph",
            )
        }
        Rule::Cut => {
            arity(2)?;
            shape(pr.is_empty(), "cut has no principal formula")?;
            match (a[0].as_slice(), a[1].as_slice()) {
                ([x], [y]) if negate(x, base) == *y => Ok(()),
                _ => Err("cut formulas are not each other's negation".into()),
            }
        }
        Rule::AxG => {
            arity(0)?;
            let [f, g] = pr.as_slice() else {
                return Err("AX has two principal formulas".into());
            };
            shape(f.is_pure() && g.is_pure(), "AX formulas must be pure")?;
            let dual = graph_of(f).dual().map_err(|e| e.to_string())?;
            shape(isomorphic(&graph_of(g), &dual), "graphs are not dual")
        }
        Rule::WdPar => {
            arity(1)?;
            let path = p.path.as_ref().ok_or("wd_par needs a path")?;
            let [f] = a[0].as_slice() else {
                return Err("wd_par has one active formula".into());
            };
            shape(!path.is_empty(), "path must be non-empty")?;
            let factor = f.at(path).ok_or("path out of range")?;
            let residual = f.replace_at(path, Formula::Unit).unwrap();
            shape(
                pr == [&residual, factor],
                "principals must be the residual and the factor",
            )?;
            shape(!factor.is_vacuous(), "extracted factor is vacuous")?;
            shape(
                (0..path.len()).all(|d| !residual.at(&path[..d]).unwrap().is_vacuous()),
                "residual becomes vacuous",
            )
        }
        Rule::Deep => {
            arity(2)?;
            let path = p.path.as_ref().ok_or("deep needs a path")?;
            let [z] = pr.as_slice() else {
                return Err("deep has one principal formula".into());
            };
            let ([phi], [psi]) = (a[0].as_slice(), a[1].as_slice()) else {
                return Err("deep has one active formula per premise".into());
            };
            shape(!path.is_empty(), "context must be non-trivial")?;
            shape(
                z.at(path) == Some(phi),
                "principal must hold the left active formula at the path",
            )?;
            let hole = z.replace_at(path, Formula::Unit).unwrap();
            let gh = graph_of(&hole);
            shape(
                !gh.is_empty() && isomorphic(&gh, &graph_of(psi)),
                "context graph differs from the right active formula",
            )
        }
        Rule::DconrChi => Err("dconr_chi must be expanded before checking".into()),
        Rule::Conr => {
            let [f] = pr.as_slice() else {
                return Err("conr has one principal formula".into());
            };
            let kids = f.children();
            shape(!kids.is_empty(), "conr needs a compound formula")?;
            arity(kids.len())?;
            shape(
                kids.iter()
                    .zip(a)
                    .all(|(k, x)| x.as_slice() == [(*k).clone()]),
                "premise k must hold argument k",
            )
        }
        Rule::Weaken => {
            arity(1)?;
            shape(
                pr.len() == 1 && a[0].is_empty(),
                "w introduces exactly one formula",
            )
        }
        Rule::Contract => {
            arity(1)?;
            match (pr.as_slice(), a[0].as_slice()) {
                ([f], [x, y]) if *f == x && *f == y => Ok(()),
                _ => Err("c merges two copies of its principal formula".into()),
            }
        }
        Rule::Hyp => {
            arity(0)?;
            Ok(())
        }
    }
}

fn check_dconr(p: &Proof, pr: &[&Formula], base: &Base) -> Result<(), String> {
    let [x, y] = pr else {
        return Err("dconr has two principal formulas".into());
    };
    let (Some(c), Some(q)) = (x.connective(base), y.connective(base)) else {
        return Err("dconr principals must be compound".into());
    };
    if base.dual_of(&c).name() != q.name() {
        return Err(format!(
            "{} and {} are not dual connectives",
            c.name(),
            q.name()
        ));
    }
    let n = c.arity();
    if p.children.len() != n {
        return Err(format!("expected {n} premises, found {}", p.children.len()));
    }
    if !perm::is_permutation(&p.sigma)
        || !perm::is_permutation(&p.tau)
        || p.sigma.len() != n
        || p.tau.len() != n
    {
        return Err("sigma and tau must be permutations of the slots".into());
    }
    let (xs, ys) = (x.children(), y.children());
    for k in 0..n {
        if p.actives[k] != [xs[p.sigma[k]].clone(), ys[p.tau[k]].clone()] {
            return Err(format!("premise {k} must hold the paired factors"));
        }
    }
    for k in 0..n {
        for l in 0..n {
            if k != l && c.has_edge(p.sigma[k], p.sigma[l]) == q.has_edge(p.tau[k], p.tau[l]) {
                return Err("pairing does not dualize the connective".into());
            }
        }
    }
    Ok(())
}

fn isomorphic(g: &crate::LabeledGraph, h: &crate::LabeledGraph) -> bool {
    matches!(decomp::find_isomorphism(g, h, None), Ok(Some(_)))
}

/// Strict analyticity: every formula in every sequent is a subformula (MGL,
/// GLK) or a quasi-subformula (MGL°) of a conclusion formula, compared up to ≡
/// after collapsing unit slots.
pub fn check_analytic(p: &Proof, system: System, base: &Base) -> Result<(), Diagnostic> {
    let mut allowed: BTreeSet<NormalForm> = BTreeSet::new();
    for f in &p.conclusion {
        match system {
            System::Mgl0 => {
                for q in formula::quasi_subformulas(f, base, 200_000) {
                    allowed.insert(normal_form(&super::axiom::collapse_units(&q, base)));
                }
            }
            _ => {
                for pos in f.positions() {
                    allowed.insert(normal_form(f.at(&pos).unwrap()));
                }
            }
        }
    }
    let mut path = Vec::new();
    walk_analytic(p, system, base, &allowed, &mut path)
}

fn walk_analytic(
    p: &Proof,
    system: System,
    base: &Base,
    allowed: &BTreeSet<NormalForm>,
    path: &mut Vec<usize>,
) -> Result<(), Diagnostic> {
    for f in &p.conclusion {
        let key = match system {
            System::Mgl0 => normal_form(&super::axiom::collapse_units(f, base)),
            _ => normal_form(f),
        };
        if !f.is_unit() && !allowed.contains(&key) {
            return Err(Diagnostic {
                path: path.clone(),
                rule: p.rule,
                message: format!("{f} is not analytic"),
            });
        }
    }
    for (i, c) in p.children.iter().enumerate() {
        path.push(i);
        walk_analytic(c, system, base, allowed, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::graph::Literal;

    #[test]
    fn axiom_accepted() {
        let base = Base::new();
        assert!(check_proof(&Proof::ax(&Literal::pos("a")), &System::Mgl.into(), &base).is_ok());
    }

    #[test]
    fn par_then_axiom_accepted() {
        let base = Base::new();
        let p = Proof::par(
            Proof::ax(&Literal::pos("a")),
            &Formula::lit("a"),
            &Formula::lit("~a"),
        )
        .unwrap();
        assert!(check_proof(&p, &System::Mgl.into(), &base).is_ok());
        assert_eq!(p.conclusion, vec![parse("a | ~a", &base).unwrap()]);
    }

    #[test]
    fn axiom_on_distinct_atoms_rejected() {
        let base = Base::new();
        let bad = Proof::node(
            Rule::Ax,
            vec![],
            vec![],
            vec![Formula::lit("a"), Formula::lit("b")],
        )
        .unwrap();
        let d = check_proof(&bad, &System::Mgl.into(), &base).unwrap_err();
        assert_eq!(d.message, "not dual atoms");
    }

    #[test]
    fn rule_outside_system_rejected() {
        let base = Base::new();
        let p = Proof::mix(Proof::ax(&Literal::pos("a")), Proof::ax(&Literal::pos("b")));
        assert!(check_proof(&p, &System::Mgl0.into(), &base).is_ok());
        assert!(check_proof(&p, &System::Mgl.into(), &base)
            .unwrap_err()
            .message
            .contains("not part"));
    }

    #[test]
    fn dconr_pairing_checked() {
        let base = Base::new();
        let x = parse("P4<a,b,c,d>", &base).unwrap();
        let y = negate(&x, &base);
        let sigma = base.get("P4").unwrap().sigma().to_vec();
        // Premise k pairs slot sigma[k] of x with slot k of y.
        let kids: Vec<Proof> = sigma
            .iter()
            .map(|&i| Proof::ax(x.children()[i].as_literal().unwrap()))
            .collect();
        let ok = Proof::dconr(&x, &y, sigma.clone(), (0..4).collect(), kids.clone()).unwrap();
        assert!(check_proof(&ok, &System::Mgl.into(), &base).is_ok());
        let mut bad = ok.clone();
        bad.tau = vec![1, 0, 2, 3];
        assert!(check_proof(&bad, &System::Mgl.into(), &base).is_err());
    }
}
