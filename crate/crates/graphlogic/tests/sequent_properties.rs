mod common;

use graphlogic::decomp::Base;
use graphlogic::formula::{negate, Formula};
use graphlogic::gen::{random_equivalent, random_formula, random_proof, rng, FormulaSpec};
use graphlogic::sequent::{
    check_analytic, check_proof, eliminate_cut, equivalence_proof, prove, same_multiset, Outcome,
    Proof, StepKind, System,
};

#[test]
fn found_proofs_are_analytic() {
    let base = Base::new();
    let mut r = rng(21);
    let mut found = 0;
    for system in [System::Mgl, System::Mgl0, System::Glk] {
        for i in 0..60 {
            let shape = random_formula(&mut r, &FormulaSpec::standard(2 + 2 * (i % 3), 2, &base));
            let f = common::balance(&mut r, &shape, 2);
            if let Outcome::Found(p) = prove(&[f.clone()], system, &base) {
                check_analytic(&p, system, &base).unwrap_or_else(|e| panic!("{system:?} {f}: {e}"));
                found += 1;
            }
        }
    }
    assert!(found > 20, "{found}");
}

#[test]
fn cut_free_results_are_analytic() {
    let base = Base::new();
    let mut r = rng(22);
    for system in [System::Mgl, System::Mgl0] {
        for _ in 0..40 {
            let p = random_proof(&mut r, system, 10, 3, &base);
            let Some(a) = p.conclusion.iter().find(|a| a.is_pure()).cloned() else {
                continue;
            };
            let id = graphlogic::sequent::derive_axiom(&a, &base).unwrap();
            let out = eliminate_cut(
                &Proof::cut(p.clone(), &a, id, &base).unwrap(),
                system,
                &base,
            )
            .unwrap();
            check_analytic(&out.proof, system, &base).unwrap();
        }
    }
}

#[test]
fn commuting_steps_never_raise_the_weight() {
    let base = Base::new();
    let mut r = rng(23);
    for system in [System::Mgl, System::Mgl0, System::Glk] {
        for _ in 0..40 {
            let p = random_proof(&mut r, system, 12, 3, &base);
            let Some(a) = p.conclusion.iter().find(|a| a.is_pure()).cloned() else {
                continue;
            };
            let id = graphlogic::sequent::derive_axiom(&a, &base).unwrap();
            let out = eliminate_cut(&Proof::cut(p, &a, id, &base).unwrap(), system, &base).unwrap();
            for s in out.trace.iter().filter(|s| s.kind == StepKind::Commute) {
                assert!(s.weight_after <= s.weight_before, "{s:?}");
            }
        }
    }
}

/// Compose ⊢ ¬f ⅋ g and ⊢ ¬g ⅋ h through a cut on g and eliminate it.
#[test]
fn implications_compose() {
    let base = Base::new();
    let mut r = rng(24);
    for i in 0..80 {
        let f = random_formula(&mut r, &FormulaSpec::standard(2 + i % 6, 3, &base));
        let g = random_equivalent(&mut r, &f, &base, false);
        let h = random_equivalent(&mut r, &g, &base, false);
        let (fg, _) = equivalence_proof(&f, &g, &base).unwrap();
        let (gh, _) = equivalence_proof(&g, &h, &base).unwrap();
        let left = fg.children[0].clone();
        let right = gh.children[0].clone();
        let cut = Proof::cut(left, &g, right, &base).unwrap();
        let out = eliminate_cut(&cut, System::Mgl, &base).unwrap();
        let nf = negate(&f, &base);
        let p = Proof::par(out.proof, &nf, &h).unwrap();
        check_proof(&p, &System::Mgl.into(), &base).unwrap();
        assert!(same_multiset(&p.conclusion, &[Formula::par(nf, h)]));
    }
}
