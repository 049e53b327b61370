//! Backward proof search with memoization on sorted sequents.
//!
//! Linear systems (MGL, MGL°, MLLconr) apply ⅋ and unitor eagerly on pure
//! sequents and branch over axioms, context splits, pairings and mix. GLK
//! keeps principal formulas in every premise, so sequents only grow and each
//! rule is invertible through weakening: the search never backtracks.

use std::collections::{BTreeMap, HashMap};

use super::axiom::unitor_premise;
use super::{remove_all, Proof, System};
use crate::decomp::{dualizing_pairings, Base};
use crate::formula::Formula;
use crate::graph::Literal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Proof),
    /// The whole analytic space was explored without success.
    Refuted,
    /// A bound cut the search short.
    Unknown,
}

impl Outcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            Outcome::Found(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Outcome::Refuted)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Visited sequents plus tried context distributions.
    pub node_budget: usize,
    /// Maximal proof height explored.
    pub depth_bound: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 2_000_000,
            depth_bound: 512,
        }
    }
}

pub fn prove(seq: &[Formula], system: System, base: &Base) -> Outcome {
    prove_with(seq, system, base, &SearchConfig::default())
}

pub fn prove_with(seq: &[Formula], system: System, base: &Base, cfg: &SearchConfig) -> Outcome {
    let mut s = Searcher {
        system,
        base,
        cfg: *cfg,
        memo: HashMap::new(),
        nodes: 0,
        incomplete: false,
    };
    let found = if system == System::Glk {
        let mut set = seq.to_vec();
        set.sort();
        set.dedup();
        s.glk(set, 0).map(|p| weaken_to(p, seq))
    } else {
        s.linear(seq.to_vec(), 0)
    };
    match found {
        Some(p) => Outcome::Found(p),
        None if s.incomplete => Outcome::Unknown,
        None => Outcome::Refuted,
    }
}

struct Searcher<'a> {
    system: System,
    base: &'a Base,
    cfg: SearchConfig,
    memo: HashMap<Vec<Formula>, Option<Proof>>,
    nodes: usize,
    incomplete: bool,
}

/// Every atom occurs as often positively as negatively.
fn balanced<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> bool {
    let mut count: BTreeMap<&str, i64> = BTreeMap::new();
    for f in fs {
        for l in f.literals() {
            *count.entry(l.atom()).or_default() += if l.is_positive() { 1 } else { -1 };
        }
    }
    count.values().all(|&c| c == 0)
}

fn has_unit_child(f: &Formula) -> bool {
    f.children().iter().any(|c| c.is_unit())
}

fn without(seq: &[Formula], i: usize) -> Vec<Formula> {
    let mut rest = seq.to_vec();
    rest.remove(i);
    rest
}

/// Add weakenings so that the conclusion becomes `target` (a super-multiset).
fn weaken_to(mut p: Proof, target: &[Formula]) -> Proof {
    let extra = remove_all(target, &p.conclusion).expect("target contains the conclusion");
    for f in &extra {
        p = Proof::weaken(p, f);
    }
    p
}

/// Contract repeated formulas until every one occurs once.
fn contract_to_set(mut p: Proof) -> Proof {
    loop {
        let mut sorted = p.conclusion.clone();
        sorted.sort();
        let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) else {
            return p;
        };
        let f = w[0].clone();
        p = Proof::contract(p, &f).expect("duplicate present");
    }
}

/// Call `visit` on every distribution of the multiset `items` into `parts`
/// labelled parts, up to reordering equal items. Stops when `visit` returns true.
fn distribute(
    items: &[Formula],
    parts: usize,
    visit: &mut dyn FnMut(&[Vec<Formula>]) -> bool,
) -> bool {
    let mut groups: Vec<(Formula, usize)> = Vec::new();
    for f in items {
        match groups.iter_mut().find(|(g, _)| g == f) {
            Some((_, n)) => *n += 1,
            None => groups.push((f.clone(), 1)),
        }
    }
    let mut acc = vec![Vec::new(); parts];
    fn go(
        groups: &[(Formula, usize)],
        acc: &mut Vec<Vec<Formula>>,
        visit: &mut dyn FnMut(&[Vec<Formula>]) -> bool,
    ) -> bool {
        let Some(((f, n), rest)) = groups.split_first() else {
            return visit(acc);
        };
        // Compositions of n into acc.len() parts.
        fn place(
            f: &Formula,
            left: usize,
            part: usize,
            rest: &[(Formula, usize)],
            acc: &mut Vec<Vec<Formula>>,
            visit: &mut dyn FnMut(&[Vec<Formula>]) -> bool,
        ) -> bool {
            if part + 1 == acc.len() {
                acc[part].extend(std::iter::repeat(f.clone()).take(left));
                let stop = go(rest, acc, visit);
                let len = acc[part].len() - left;
                acc[part].truncate(len);
                return stop;
            }
            for take in (0..=left).rev() {
                acc[part].extend(std::iter::repeat(f.clone()).take(take));
                let stop = place(f, left - take, part + 1, rest, acc, visit);
                let len = acc[part].len() - take;
                acc[part].truncate(len);
                if stop {
                    return true;
                }
            }
            false
        }
        place(f, *n, 0, rest, acc, visit)
    }
    go(&groups, &mut acc, visit)
}

impl Searcher<'_> {
    fn tick(&mut self) -> bool {
        if self.nodes >= self.cfg.node_budget {
            self.incomplete = true;
            return false;
        }
        self.nodes += 1;
        true
    }

    fn linear(&mut self, mut seq: Vec<Formula>, depth: usize) -> Option<Proof> {
        seq.sort();
        if let Some(hit) = self.memo.get(&seq) {
            return hit.clone();
        }
        if depth >= self.cfg.depth_bound {
            self.incomplete = true;
            return None;
        }
        if !self.tick() {
            return None;
        }
        let out = self.linear_step(&seq, depth + 1);
        self.memo.insert(seq, out.clone());
        out
    }

    fn viable(&self, seq: &[Formula]) -> bool {
        let atoms_ok = !seq.is_empty() && balanced(seq);
        atoms_ok
            && match self.system {
                // No rule introduces a formula without literals.
                System::Mgl0 => seq.iter().all(|f| !f.is_vacuous()),
                _ => seq.iter().all(|f| f.is_unit_free()),
            }
    }

    fn linear_step(&mut self, seq: &[Formula], d: usize) -> Option<Proof> {
        if !self.viable(seq) {
            return None;
        }
        // On pure sequents ⅋ and unitor are invertible; otherwise they are
        // only tried first.
        let pure = seq.iter().all(|f| f.is_pure());
        if self.system == System::Mgl0 {
            if let Some(i) = seq.iter().position(has_unit_child) {
                let f = &seq[i];
                let found = unitor_premise(f, self.base).and_then(|(chi, _)| {
                    let k = f.children().iter().position(|c| c.is_unit()).unwrap();
                    let mut premise = without(seq, i);
                    premise.push(chi.clone());
                    let p = self.linear(premise, d)?;
                    Proof::unitor(p, &chi, f, k).ok()
                });
                if pure || found.is_some() {
                    return found;
                }
            }
        }
        if let Some(i) = seq
            .iter()
            .position(|f| matches!(f, Formula::Par(..)) && !has_unit_child(f))
        {
            let Formula::Par(a, b) = &seq[i] else {
                unreachable!()
            };
            let mut premise = without(seq, i);
            premise.extend([(**a).clone(), (**b).clone()]);
            let found = self
                .linear(premise, d)
                .and_then(|p| Proof::par(p, a, b).ok());
            if pure || found.is_some() {
                return found;
            }
        }
        if let [Formula::Lit(x), Formula::Lit(y)] = seq {
            if x.negate() == *y {
                return Some(Proof::ax(x));
            }
        }
        for i in 0..seq.len() {
            if let Some(p) = self.decompose_at(seq, i, d) {
                return Some(p);
            }
        }
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if let Some(p) = self.dconr_at(seq, i, j, d) {
                    return Some(p);
                }
            }
        }
        if self.system.rules().contains(super::Rule::Mix) {
            return self.mix_split(seq, d);
        }
        None
    }

    /// Try proving each premise `k` as its context part plus `actives[k]`.
    fn premises(
        &mut self,
        rest: &[Formula],
        actives: &[Vec<Formula>],
        d: usize,
    ) -> Option<Vec<Proof>> {
        let mut out = None;
        distribute(rest, actives.len(), &mut |parts| {
            if !self.tick() {
                return true;
            }
            let seqs: Vec<Vec<Formula>> = parts
                .iter()
                .zip(actives)
                .map(|(p, a)| [p.as_slice(), a].concat())
                .collect();
            if !seqs.iter().all(|s| balanced(s)) {
                return false;
            }
            let mut proofs = Vec::new();
            for s in seqs {
                match self.linear(s, d) {
                    Some(p) => proofs.push(p),
                    None => return false,
                }
            }
            out = Some(proofs);
            true
        });
        out
    }

    /// ⊗, wd_tens and conr with `seq[i]` principal.
    fn decompose_at(&mut self, seq: &[Formula], i: usize, d: usize) -> Option<Proof> {
        let rest = without(seq, i);
        let f = &seq[i];
        match f {
            Formula::Tens(a, b) => {
                let kids = self.premises(&rest, &[vec![(**a).clone()], vec![(**b).clone()]], d)?;
                let [l, r]: [Proof; 2] = kids.try_into().ok()?;
                Proof::tens(l, a, r, b).ok()
            }
            Formula::App(_, args) if self.system == System::Mgl0 => (0..args.len()).find_map(|k| {
                let residual = super::with_unit_at(f, k).unwrap();
                let kids = self.premises(&rest, &[vec![args[k].clone()], vec![residual]], d)?;
                let [l, r]: [Proof; 2] = kids.try_into().ok()?;
                Proof::wd_tens(l, r, f, k).ok()
            }),
            Formula::App(_, args) if self.system == System::MllConr => {
                let actives: Vec<Vec<Formula>> = args.iter().map(|a| vec![a.clone()]).collect();
                let kids = self.premises(&rest, &actives, d)?;
                Proof::conr(f, kids).ok()
            }
            _ => None,
        }
    }

    fn pairings(&self, x: &Formula, y: &Formula) -> Vec<Vec<usize>> {
        match (x, y) {
            (Formula::App(c, xs), Formula::App(q, ys)) if xs.len() == ys.len() => {
                dualizing_pairings(c.adj(), q.adj(), self.base.cap()).unwrap_or_default()
            }
            _ => Vec::new(),
        }
    }

    fn dconr_at(&mut self, seq: &[Formula], i: usize, j: usize, d: usize) -> Option<Proof> {
        if !self.system.rules().contains(super::Rule::Dconr) {
            return None;
        }
        let (x, y) = (&seq[i], &seq[j]);
        let pairings = self.pairings(x, y);
        if pairings.is_empty() {
            return None;
        }
        let rest: Vec<Formula> = seq
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != i && t != j)
            .map(|(_, f)| f.clone())
            .collect();
        let (xs, ys) = (x.children(), y.children());
        let tau: Vec<usize> = (0..ys.len()).collect();
        pairings.into_iter().find_map(|sigma| {
            let actives: Vec<Vec<Formula>> = (0..ys.len())
                .map(|k| vec![xs[sigma[k]].clone(), ys[k].clone()])
                .collect();
            let kids = self.premises(&rest, &actives, d)?;
            Proof::dconr(x, y, sigma, tau.clone(), kids).ok()
        })
    }

    fn mix_split(&mut self, seq: &[Formula], d: usize) -> Option<Proof> {
        let (first, rest) = seq.split_first()?;
        let mut out = None;
        distribute(rest, 2, &mut |parts| {
            if parts[1].is_empty() {
                return false;
            }
            if !self.tick() {
                return true;
            }
            let left = [std::slice::from_ref(first), &parts[0]].concat();
            if !balanced(&left) || !balanced(&parts[1]) {
                return false;
            }
            let Some(l) = self.linear(left, d) else {
                return false;
            };
            let Some(r) = self.linear(parts[1].clone(), d) else {
                return false;
            };
            out = Some(Proof::mix(l, r));
            true
        });
        out
    }

    /// GLK on a duplicate-free sorted sequent.
    fn glk(&mut self, seq: Vec<Formula>, depth: usize) -> Option<Proof> {
        if let Some(hit) = self.memo.get(&seq) {
            return hit.clone();
        }
        if depth >= self.cfg.depth_bound {
            self.incomplete = true;
            return None;
        }
        if !self.tick() {
            return None;
        }
        let out = self.glk_step(&seq, depth + 1);
        self.memo.insert(seq, out.clone());
        out
    }

    /// Premise `seq ∪ actives`, proved and weakened to the multiset `seq, actives`.
    fn glk_premise(&mut self, seq: &[Formula], actives: &[Formula], d: usize) -> Option<Proof> {
        let target = [seq, actives].concat();
        let mut set = target.clone();
        set.sort();
        set.dedup();
        self.glk(set, d).map(|p| weaken_to(p, &target))
    }

    fn glk_step(&mut self, seq: &[Formula], d: usize) -> Option<Proof> {
        if let Some(l) = seq.iter().find_map(|f| {
            f.as_literal()
                .filter(|l| seq.contains(&Formula::Lit(l.negate())))
        }) {
            let l: Literal = l.clone();
            return Some(weaken_to(Proof::ax(&l), seq));
        }
        let fresh = |f: &Formula| !seq.contains(f);
        // Each rule keeps its principal formula, so any instance adding a new
        // formula is invertible by weakening: commit to the first one.
        for f in seq {
            if let Formula::Par(a, b) = f {
                if fresh(a) || fresh(b) {
                    let p = self.glk_premise(seq, &[(**a).clone(), (**b).clone()], d)?;
                    return Some(contract_to_set(Proof::par(p, a, b).ok()?));
                }
            }
        }
        for f in seq {
            if let Formula::Tens(a, b) = f {
                if fresh(a) && fresh(b) {
                    let l = self.glk_premise(seq, &[(**a).clone()], d)?;
                    let r = self.glk_premise(seq, &[(**b).clone()], d)?;
                    return Some(contract_to_set(Proof::tens(l, a, r, b).ok()?));
                }
            }
        }
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                let (x, y) = (&seq[i], &seq[j]);
                let (xs, ys) = (x.children(), y.children());
                for sigma in self.pairings(x, y) {
                    let actives: Vec<Vec<Formula>> = (0..ys.len())
                        .map(|k| vec![xs[sigma[k]].clone(), ys[k].clone()])
                        .collect();
                    if actives.iter().any(|a| !a.iter().any(fresh)) {
                        continue;
                    }
                    let mut kids = Vec::new();
                    for a in &actives {
                        kids.push(self.glk_premise(seq, a, d)?);
                    }
                    let tau = (0..ys.len()).collect();
                    return Some(contract_to_set(Proof::dconr(x, y, sigma, tau, kids).ok()?));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sequent;
    use crate::sequent::check_proof;

    fn run(s: &str, system: System) -> Outcome {
        let base = Base::new();
        let seq = parse_sequent(s, &base).unwrap();
        let out = prove(&seq, system, &base);
        if let Outcome::Found(p) = &out {
            assert!(check_proof(p, &system.into(), &base).is_ok(), "{p}");
            assert!(super::super::same_multiset(&p.conclusion, &seq));
        }
        out
    }

    #[test]
    fn small_mll() {
        assert!(run("a | ~a", System::Mgl).is_found());
        assert!(run("~a | ~b, a & b", System::Mgl).is_found());
        assert!(run("a, b", System::Mgl).is_refuted());
        assert!(run("a & ~a", System::Mgl).is_refuted());
    }

    #[test]
    fn prime_axiom_and_refutation() {
        assert!(run("P4<a,b,c,d>, ~P4<a,b,c,d>", System::Mgl).is_found());
        assert!(run("P4<a,b,c,d>", System::Mgl0).is_refuted());
    }

    #[test]
    fn mix_and_units() {
        assert!(run("a, ~a, b, ~b", System::Mgl0).is_found());
        assert!(run("a, ~a, b, ~b", System::Mgl).is_refuted());
        assert!(run("o | a, ~a", System::Mgl0).is_found());
        assert!(run("o, a, ~a", System::Mgl0).is_refuted());
    }

    #[test]
    fn glk_classical() {
        assert!(run("a | ~a", System::Glk).is_found());
        assert!(run("(a & b) | ~a", System::Glk).is_refuted());
        assert!(run("(a & a) | ~a", System::Glk).is_found());
        assert!(run("a | a", System::Glk).is_refuted());
    }

    #[test]
    fn conr_system() {
        assert!(run("P4<a,b,c,d>, ~a, ~b, ~c, ~d", System::MllConr).is_found());
    }

    #[test]
    fn budget_gives_unknown() {
        let base = Base::new();
        let seq = parse_sequent("P4<a,b,c,d>, ~a, ~b, ~c, ~d", &base).unwrap();
        let cfg = SearchConfig {
            node_budget: 1,
            depth_bound: 10,
        };
        assert_eq!(
            prove_with(&seq, System::Mgl0, &base, &cfg),
            Outcome::Unknown
        );
    }
}
