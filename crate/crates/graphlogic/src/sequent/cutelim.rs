//! Cut-elimination by repeatedly reducing a topmost cut.

use serde::Serialize;

use super::axiom::axg;
use super::wdpar::{dconr_residual, push};
use super::{remove_all, with_unit_at, Proof, Rule, System};
use crate::decomp::Base;
use crate::error::{ProofError, ProofResult};
use crate::formula::{negate, Formula};

/// Sum over cut nodes of the sizes of both cut formulas.
pub fn cut_weight(p: &Proof) -> usize {
    let own = if p.rule == Rule::Cut {
        p.actives.iter().flatten().map(|f| f.size()).sum()
    } else {
        0
    };
    own + p.children.iter().map(cut_weight).sum::<usize>()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Axiom,
    TensPar,
    Dconr,
    Conr,
    Unitor,
    WdTens,
    DconrWdTens,
    /// A wd_tens principal meeting a rule it has no dedicated step with.
    WdTensViaWdPar,
    Weaken,
    Contract,
    Commute,
}

impl StepKind {
    /// Logical steps, where both cut formulas are principal in logical rules.
    pub fn is_principal(self) -> bool {
        !matches!(self, StepKind::Commute)
    }
}

/// One reduction: the weight of the reduced cut and the total weight of
/// the cuts the step created in its place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub cut_formula: String,
    pub weight_before: usize,
    pub weight_after: usize,
}

#[derive(Clone, Debug)]
pub struct CutElimination {
    pub proof: Proof,
    pub trace: Vec<TraceStep>,
}

/// Default bound on reduction steps; exceeding it is reported as an error.
pub const DEFAULT_STEP_BUDGET: usize = 2_000_000;

/// Eliminate every cut. AX leaves, deep, wd_par and conr nodes (outside
/// MLLconr) are expanded first.
pub fn eliminate_cut(p: &Proof, system: System, base: &Base) -> ProofResult<CutElimination> {
    let p = prepare(p, system, base)?;
    let mut e = Eliminator {
        base,
        trace: Vec::new(),
        steps: 0,
        budget: DEFAULT_STEP_BUDGET,
    };
    let proof = e.run(&p)?;
    Ok(CutElimination {
        proof,
        trace: e.trace,
    })
}

fn prepare(p: &Proof, system: System, base: &Base) -> ProofResult<Proof> {
    let mut q = expand_leaves(p, base)?;
    if q.uses(Rule::Deep) {
        q = super::expand_deep(&q, base)?;
    }
    if q.uses(Rule::Conr) && system != System::MllConr {
        q = super::expand_conr(&q, base)?;
    }
    if q.uses(Rule::WdPar) {
        q = super::eliminate_wd_par(&q, base)?;
    }
    desugar_binary_dconr(&q)
}

fn expand_leaves(p: &Proof, base: &Base) -> ProofResult<Proof> {
    match p.rule {
        Rule::AxG => {
            let pr = p.principals();
            axg(pr[0], pr[1], base)
        }
        Rule::Hyp => Err(ProofError::Domain("open premise".into())),
        _ if p.children.is_empty() => Ok(p.clone()),
        _ => p.rebuild(
            p.children
                .iter()
                .map(|c| expand_leaves(c, base))
                .collect::<ProofResult<_>>()?,
        ),
    }
}

/// dconr on a ⅋/⊗ pair is ⊗ followed by ⅋.
fn desugar_binary_dconr(p: &Proof) -> ProofResult<Proof> {
    let kids = p
        .children
        .iter()
        .map(desugar_binary_dconr)
        .collect::<ProofResult<Vec<_>>>()?;
    if p.rule == Rule::Dconr {
        let pr = p.principals();
        let (par, tens, tens_slots) = match (pr[0], pr[1]) {
            (x @ Formula::Par(..), y @ Formula::Tens(..)) => (x, y, &p.tau),
            (x @ Formula::Tens(..), y @ Formula::Par(..)) => (y, x, &p.sigma),
            _ => return p.rebuild(kids),
        };
        let first = tens_slots.iter().position(|&s| s == 0).unwrap();
        let (ka, kb) = (first, 1 - first);
        let t = Proof::tens(
            kids[ka].clone(),
            tens.at(&[0]).unwrap(),
            kids[kb].clone(),
            tens.at(&[1]).unwrap(),
        )?;
        return Proof::par(t, par.at(&[0]).unwrap(), par.at(&[1]).unwrap());
    }
    if kids == p.children {
        Ok(p.clone())
    } else {
        p.rebuild(kids)
    }
}

struct Eliminator<'b> {
    base: &'b Base,
    trace: Vec<TraceStep>,
    steps: usize,
    budget: usize,
}

fn weight(a: &Formula, base: &Base) -> usize {
    a.size() + negate(a, base).size()
}

impl Eliminator<'_> {
    fn run(&mut self, p: &Proof) -> ProofResult<Proof> {
        let kids = p
            .children
            .iter()
            .map(|c| self.run(c))
            .collect::<ProofResult<Vec<_>>>()?;
        if p.rule == Rule::Cut {
            let a = p.actives[0][0].clone();
            let mut it = kids.into_iter();
            let (l, r) = (it.next().unwrap(), it.next().unwrap());
            return self.reduce(l, &a, r);
        }
        if kids == p.children {
            Ok(p.clone())
        } else {
            p.rebuild(kids)
        }
    }

    fn log(&mut self, kind: StepKind, a: &Formula, after: &[&Formula]) {
        let weight_after = after.iter().map(|f| weight(f, self.base)).sum();
        self.trace.push(TraceStep {
            kind,
            cut_formula: a.to_string(),
            weight_before: weight(a, self.base),
            weight_after,
        });
    }

    /// Cut-free proof of ⊢ Γ, Δ from cut-free proofs of ⊢ Γ, A and ⊢ Δ, ¬A.
    fn reduce(&mut self, l: Proof, a: &Formula, r: Proof) -> ProofResult<Proof> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(ProofError::Budget(self.budget));
        }
        let na = negate(a, self.base);
        if l.rule == Rule::Ax {
            self.log(StepKind::Axiom, a, &[]);
            return Ok(r);
        }
        if r.rule == Rule::Ax {
            self.log(StepKind::Axiom, a, &[]);
            return Ok(l);
        }
        if !l.principals().contains(&a) {
            let k = (0..l.children.len())
                .find(|&k| l.context_of(k).contains(a))
                .ok_or_else(|| {
                    ProofError::Domain(format!("cut formula {a} missing from the left proof"))
                })?;
            self.log(StepKind::Commute, a, &[a]);
            let mut kids = l.children.clone();
            kids[k] = self.reduce(l.children[k].clone(), a, r)?;
            return l.rebuild(kids);
        }
        if !r.principals().contains(&&na) {
            let k = (0..r.children.len())
                .find(|&k| r.context_of(k).contains(&na))
                .ok_or_else(|| {
                    ProofError::Domain(format!("cut formula {na} missing from the right proof"))
                })?;
            self.log(StepKind::Commute, a, &[a]);
            let mut kids = r.children.clone();
            kids[k] = self.reduce(l, a, r.children[k].clone())?;
            return r.rebuild(kids);
        }
        self.principal(l, a, &na, r)
    }

    fn principal(&mut self, l: Proof, a: &Formula, na: &Formula, r: Proof) -> ProofResult<Proof> {
        let base = self.base;
        match (l.rule, r.rule) {
            (Rule::Weaken, _) => {
                self.log(StepKind::Weaken, a, &[]);
                let delta = remove_all(&r.conclusion, &[na.clone()]).unwrap();
                Ok(delta
                    .iter()
                    .fold(l.children[0].clone(), |p, f| Proof::weaken(p, f)))
            }
            (_, Rule::Weaken) => {
                self.log(StepKind::Weaken, a, &[]);
                let gamma = remove_all(&l.conclusion, &[a.clone()]).unwrap();
                Ok(gamma
                    .iter()
                    .fold(r.children[0].clone(), |p, f| Proof::weaken(p, f)))
            }
            (Rule::Contract, _) => {
                self.log(StepKind::Contract, a, &[a, a]);
                let delta = remove_all(&r.conclusion, &[na.clone()]).unwrap();
                let once = self.reduce(l.children[0].clone(), a, r.clone())?;
                let twice = self.reduce(once, a, r)?;
                delta.iter().try_fold(twice, |p, f| Proof::contract(p, f))
            }
            (_, Rule::Contract) => {
                self.log(StepKind::Contract, a, &[a, a]);
                let gamma = remove_all(&l.conclusion, &[a.clone()]).unwrap();
                let once = self.reduce(l.clone(), a, r.children[0].clone())?;
                let twice = self.reduce(l, a, once)?;
                gamma.iter().try_fold(twice, |p, f| Proof::contract(p, f))
            }
            (Rule::Unitor, Rule::Unitor) => {
                let chi = l.actives[0][0].clone();
                let chi_r = r.actives[0][0].clone();
                let target = negate(&chi, base);
                if chi_r == target {
                    self.log(StepKind::Unitor, a, &[&chi]);
                    return self.reduce(l.children[0].clone(), &chi, r.children[0].clone());
                }
                self.log(StepKind::Unitor, a, &[&chi, &chi_r]);
                let bridge = axg(&negate(&chi_r, base), &target, base)?;
                let right = self.reduce(r.children[0].clone(), &chi_r, bridge)?;
                self.reduce(l.children[0].clone(), &chi, right)
            }
            (Rule::WdTens, Rule::WdTens) if matching_slots(&l, &r, a, base) => {
                let k = l.slot.unwrap();
                let phi = a.at(&[k]).unwrap().clone();
                let res = with_unit_at(a, k).unwrap();
                self.log(StepKind::WdTens, a, &[&phi, &res]);
                let left = self.reduce(l.children[0].clone(), &phi, r.children[0].clone())?;
                let right = self.reduce(l.children[1].clone(), &res, r.children[1].clone())?;
                Ok(Proof::mix(left, right))
            }
            (Rule::Dconr, Rule::WdTens) => self.dconr_wd(l, a, r, a, false),
            (Rule::WdTens, Rule::Dconr) => self.dconr_wd(r, na, l, a, true),
            (Rule::WdTens, _) => {
                // Extract the same factor on the right with wd_par, then cut the pieces.
                let k = l.slot.unwrap();
                let phi = a.at(&[k]).unwrap().clone();
                let res = with_unit_at(a, k).unwrap();
                let k2 = negated_slot(a, k);
                let r2 = push(&r, na, &[k2], base)?;
                self.log(StepKind::WdTensViaWdPar, a, &[&res, &phi]);
                let x = self.reduce(l.children[1].clone(), &res, r2)?;
                self.reduce(l.children[0].clone(), &phi, x)
            }
            (_, Rule::WdTens) => {
                let m = r.slot.unwrap();
                let j = negated_slot_source(a, m);
                let phi = a.at(&[j]).unwrap().clone();
                let res = with_unit_at(a, j).unwrap();
                let l2 = push(&l, a, &[j], base)?;
                self.log(StepKind::WdTensViaWdPar, a, &[&res, &phi]);
                let x = self.reduce(l2, &res, r.children[1].clone())?;
                self.reduce(x, &phi, r.children[0].clone())
            }
            (Rule::Dconr, Rule::Dconr) => self.dconr_dconr(l, a, na, r),
            (Rule::Par, Rule::Tens | Rule::Conr) => {
                let (x, y) = (a.at(&[0]).unwrap().clone(), a.at(&[1]).unwrap().clone());
                self.log(StepKind::TensPar, a, &[&x, &y]);
                let first = self.reduce(l.children[0].clone(), &x, r.children[0].clone())?;
                self.reduce(first, &y, r.children[1].clone())
            }
            (Rule::Tens | Rule::Conr, Rule::Par) => {
                let (x, y) = (a.at(&[0]).unwrap().clone(), a.at(&[1]).unwrap().clone());
                self.log(StepKind::TensPar, a, &[&x, &y]);
                let inner = self.reduce(l.children[1].clone(), &y, r.children[0].clone())?;
                self.reduce(l.children[0].clone(), &x, inner)
            }
            (Rule::Conr | Rule::Tens, Rule::Conr | Rule::Tens) => {
                // Componentwise cuts joined by mix.
                let args: Vec<Formula> = a.children().into_iter().cloned().collect();
                let refs: Vec<&Formula> = args.iter().collect();
                self.log(StepKind::Conr, a, &refs);
                let mut out: Option<Proof> = None;
                for (i, _) in na.children().iter().enumerate() {
                    let j = negated_slot_source(a, i);
                    let c = self.reduce(l.children[j].clone(), &args[j], r.children[i].clone())?;
                    out = Some(match out {
                        None => c,
                        Some(p) => Proof::mix(p, c),
                    });
                }
                out.ok_or_else(|| ProofError::Domain("conr without arguments".into()))
            }
            (x, y) => Err(ProofError::Domain(format!(
                "no cut-elimination step for {x} against {y} on {a}"
            ))),
        }
    }

    /// `d` is a dconr with principal `dform`; `w` a wd_tens on its negation.
    /// `a` is the cut formula of the original cut, held by the left proof;
    /// `swapped` says the dconr side was the right one.
    fn dconr_wd(
        &mut self,
        d: Proof,
        dform: &Formula,
        w: Proof,
        a: &Formula,
        swapped: bool,
    ) -> ProofResult<Proof> {
        let base = self.base;
        let pr = d.principals();
        let first = *pr[0] == *dform;
        let (own, other) = if first {
            (&d.sigma, &d.tau)
        } else {
            (&d.tau, &d.sigma)
        };
        let b = if first { pr[1].clone() } else { pr[0].clone() };
        let e = w.slot.unwrap();
        // The slot of `dform` facing the extracted slot of the wd_tens formula.
        let kd = if swapped {
            negated_slot(a, e)
        } else {
            negated_slot_source(a, e)
        };
        let m = own.iter().position(|&s| s == kd).unwrap();
        let bm = other[m];
        let (w0, w1) = (w.children[0].clone(), w.children[1].clone());
        let (left, right);
        if swapped {
            let phi = a.at(&[e]).unwrap().clone();
            let res = with_unit_at(a, e).unwrap();
            self.log(StepKind::DconrWdTens, a, &[&phi, &res]);
            left = self.reduce(w0, &phi, d.children[m].clone())?;
            let resid = dconr_residual(&d, m, base)?;
            right = self.reduce(w1, &res, resid)?;
        } else {
            let psi = a.at(&[kd]).unwrap().clone();
            let res = with_unit_at(a, kd).unwrap();
            self.log(StepKind::DconrWdTens, a, &[&psi, &res]);
            left = self.reduce(d.children[m].clone(), &psi, w0)?;
            let resid = dconr_residual(&d, m, base)?;
            right = self.reduce(resid, &res, w1)?;
        }
        Proof::wd_tens(left, right, &b, bm)
    }

    fn dconr_dconr(&mut self, l: Proof, a: &Formula, na: &Formula, r: Proof) -> ProofResult<Proof> {
        let lp = l.principals();
        let l_first = *lp[0] == *a;
        let (la, lb) = if l_first {
            (&l.sigma, &l.tau)
        } else {
            (&l.tau, &l.sigma)
        };
        let b = if l_first {
            lp[1].clone()
        } else {
            lp[0].clone()
        };
        let rp = r.principals();
        let r_first = *rp[0] == *na;
        let (ra, rd) = if r_first {
            (&r.sigma, &r.tau)
        } else {
            (&r.tau, &r.sigma)
        };
        let d = if r_first {
            rp[1].clone()
        } else {
            rp[0].clone()
        };
        let args: Vec<Formula> = a.children().into_iter().cloned().collect();
        let refs: Vec<&Formula> = args.iter().collect();
        self.log(StepKind::Dconr, a, &refs);
        let n = l.children.len();
        let (mut kids, mut sigma, mut tau) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..n {
            let slot_a = la[k];
            let m = (0..n)
                .find(|&m| negated_slot_source(a, ra[m]) == slot_a)
                .unwrap();
            kids.push(self.reduce(l.children[k].clone(), &args[slot_a], r.children[m].clone())?);
            sigma.push(lb[k]);
            tau.push(rd[m]);
        }
        Proof::dconr(&b, &d, sigma, tau, kids)
    }
}

/// Slot of ¬a holding the negation of slot `k` of `a`.
fn negated_slot(a: &Formula, k: usize) -> usize {
    match a {
        Formula::App(c, _) => c.sigma().iter().position(|&i| i == k).unwrap(),
        _ => k,
    }
}

/// Slot of `a` whose negation sits at slot `i` of ¬a.
fn negated_slot_source(a: &Formula, i: usize) -> usize {
    match a {
        Formula::App(c, _) => c.sigma()[i],
        _ => i,
    }
}

fn matching_slots(l: &Proof, r: &Proof, a: &Formula, _base: &Base) -> bool {
    negated_slot(a, l.slot.unwrap()) == r.slot.unwrap()
}
