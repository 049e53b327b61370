//! Sequent calculi over graphical formulas: proof objects, the rule checker,
//! proof search and the proof transformations built on them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomp::Base;
use crate::error::{ProofError, ProofResult};
use crate::formula::{self, negate, Formula, Path};
use crate::graph::Literal;
use crate::perm::Perm;

pub mod axiom;
pub mod check;
pub mod conr;
pub mod cutelim;
pub mod deep;
pub mod search;
pub mod wdpar;

pub use axiom::{axg, derive_axiom, equivalence_proof, retype, unitor_premise};
pub use check::{check_analytic, check_proof, Diagnostic};
pub use conr::{derive_conr, expand_conr};
pub use cutelim::{cut_weight, eliminate_cut, CutElimination, StepKind, TraceStep};
pub use deep::{derive_deep, expand_deep};
pub use search::{prove, prove_with, Outcome, SearchConfig};
pub use wdpar::eliminate_wd_par;

/// A sequent: a multiset of formula occurrences, indexed by position.
pub type Sequent = Vec<Formula>;

/// Inference rules. Names follow the JSON spelling.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "ax")]
    Ax,
    #[serde(rename = "par")]
    Par,
    #[serde(rename = "tens")]
    Tens,
    #[serde(rename = "dconr")]
    Dconr,
    #[serde(rename = "mix")]
    Mix,
    #[serde(rename = "wd_tens")]
    WdTens,
    #[serde(rename = "unitor")]
    Unitor,
    #[serde(rename = "cut")]
    Cut,
    /// Generalized axiom on a formula and a formula with the dual graph.
    #[serde(rename = "AX")]
    AxG,
    #[serde(rename = "wd_par")]
    WdPar,
    #[serde(rename = "deep")]
    Deep,
    #[serde(rename = "dconr_chi")]
    DconrChi,
    #[serde(rename = "conr")]
    Conr,
    #[serde(rename = "w")]
    Weaken,
    #[serde(rename = "c")]
    Contract,
    /// Open premise.
    #[serde(rename = "hyp")]
    Hyp,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::Par => "par",
            Rule::Tens => "tens",
            Rule::Dconr => "dconr",
            Rule::Mix => "mix",
            Rule::WdTens => "wd_tens",
            Rule::Unitor => "unitor",
            Rule::Cut => "cut",
            Rule::AxG => "AX",
            Rule::WdPar => "wd_par",
            Rule::Deep => "deep",
            Rule::DconrChi => "dconr_chi",
            Rule::Conr => "conr",
            Rule::Weaken => "w",
            Rule::Contract => "c",
            Rule::Hyp => "hyp",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The named systems.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "mgl")]
    Mgl,
    #[serde(rename = "mgl0")]
    Mgl0,
    #[serde(rename = "glk")]
    Glk,
    #[serde(rename = "mllconr")]
    MllConr,
}

impl System {
    pub fn rules(self) -> RuleSet {
        use Rule::*;
        let rules: &[Rule] = match self {
            System::Mgl => &[Ax, Par, Tens, Dconr],
            System::Mgl0 => &[Ax, Par, Tens, Dconr, Mix, WdTens, Unitor],
            System::Glk => &[Ax, Par, Tens, Dconr, Weaken, Contract],
            System::MllConr => &[Ax, Par, Tens, Mix, Conr],
        };
        RuleSet(rules.iter().copied().collect())
    }

    pub fn parse(s: &str) -> Option<System> {
        match s.to_ascii_lowercase().as_str() {
            "mgl" => Some(System::Mgl),
            "mgl0" | "mglo" | "mgl°" => Some(System::Mgl0),
            "glk" => Some(System::Glk),
            "mllconr" => Some(System::MllConr),
            _ => None,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Mgl => "MGL",
            System::Mgl0 => "MGL°",
            System::Glk => "GLK",
            System::MllConr => "MLLconr",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet(pub BTreeSet<Rule>);

impl RuleSet {
    pub fn contains(&self, r: Rule) -> bool {
        self.0.contains(&r)
    }

    pub fn with(mut self, r: Rule) -> Self {
        self.0.insert(r);
        self
    }
}

impl From<System> for RuleSet {
    fn from(s: System) -> Self {
        s.rules()
    }
}

/// A proof tree. Every node lists, per child, the active formulas consumed
/// from that child, and the indices of its principal formulas in the
/// conclusion. The remaining conclusion formulas are the children's contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub principal: Vec<usize>,
    pub actives: Vec<Vec<Formula>>,
    /// dconr: slot of the first principal formula paired in each premise.
    pub sigma: Perm,
    /// dconr: slot of the second principal formula paired in each premise.
    pub tau: Perm,
    /// wd_tens and unitor: the argument slot involved.
    pub slot: Option<usize>,
    /// wd_par and deep: position inside the principal formula.
    pub path: Option<Path>,
    pub children: Vec<Proof>,
}

/// Remove one occurrence of each item; `None` if some item is missing.
pub fn remove_all(seq: &[Formula], items: &[Formula]) -> Option<Sequent> {
    let mut rest = seq.to_vec();
    for it in items {
        let i = rest.iter().position(|f| f == it)?;
        rest.remove(i);
    }
    Some(rest)
}

pub fn same_multiset(a: &[Formula], b: &[Formula]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

/// Copy of `f` with ◦ at argument slot `k`.
pub fn with_unit_at(f: &Formula, k: usize) -> Option<Formula> {
    f.replace_at(&[k], Formula::Unit)
}

impl Proof {
    /// Generic node: conclusion is the children's contexts followed by the principals.
    pub fn node(
        rule: Rule,
        children: Vec<Proof>,
        actives: Vec<Vec<Formula>>,
        principals: Vec<Formula>,
    ) -> ProofResult<Proof> {
        if actives.len() != children.len() {
            return Err(ProofError::Format(format!(
                "{rule}: {} active lists for {} children",
                actives.len(),
                children.len()
            )));
        }
        let mut conclusion = Vec::new();
        for (c, a) in children.iter().zip(&actives) {
            let ctx = remove_all(&c.conclusion, a).ok_or_else(|| {
                ProofError::Format(format!(
                    "{rule}: active formulas {} missing from premise",
                    show(a)
                ))
            })?;
            conclusion.extend(ctx);
        }
        let start = conclusion.len();
        conclusion.extend(principals);
        let principal = (start..conclusion.len()).collect();
        Ok(Proof {
            rule,
            conclusion,
            principal,
            actives,
            sigma: vec![],
            tau: vec![],
            slot: None,
            path: None,
            children,
        })
    }

    pub fn ax(l: &Literal) -> Proof {
        Proof::node(
            Rule::Ax,
            vec![],
            vec![],
            vec![Formula::Lit(l.clone()), Formula::Lit(l.negate())],
        )
        .unwrap()
    }

    /// Open premise with the given conclusion.
    pub fn hyp(seq: Sequent) -> Proof {
        Proof::node(Rule::Hyp, vec![], vec![], seq).unwrap()
    }

    pub fn axg_leaf(f: Formula, g: Formula) -> Proof {
        Proof::node(Rule::AxG, vec![], vec![], vec![f, g]).unwrap()
    }

    pub fn par(child: Proof, a: &Formula, b: &Formula) -> ProofResult<Proof> {
        Proof::node(
            Rule::Par,
            vec![child],
            vec![vec![a.clone(), b.clone()]],
            vec![Formula::par(a.clone(), b.clone())],
        )
    }

    pub fn tens(left: Proof, a: &Formula, right: Proof, b: &Formula) -> ProofResult<Proof> {
        Proof::node(
            Rule::Tens,
            vec![left, right],
            vec![vec![a.clone()], vec![b.clone()]],
            vec![Formula::tens(a.clone(), b.clone())],
        )
    }

    /// dconr on `x` and `y`; premise k pairs slot `sigma[k]` of `x` with slot `tau[k]` of `y`.
    pub fn dconr(
        x: &Formula,
        y: &Formula,
        sigma: Perm,
        tau: Perm,
        children: Vec<Proof>,
    ) -> ProofResult<Proof> {
        let (xs, ys) = (x.children(), y.children());
        if sigma.len() != children.len() || tau.len() != children.len() {
            return Err(ProofError::Format(
                "dconr: pairing length differs from premise count".into(),
            ));
        }
        let mut actives = Vec::new();
        for k in 0..children.len() {
            let (Some(a), Some(b)) = (xs.get(sigma[k]), ys.get(tau[k])) else {
                return Err(ProofError::Format("dconr: slot out of range".into()));
            };
            actives.push(vec![(*a).clone(), (*b).clone()]);
        }
        let mut p = Proof::node(Rule::Dconr, children, actives, vec![x.clone(), y.clone()])?;
        p.sigma = sigma;
        p.tau = tau;
        Ok(p)
    }

    pub fn mix(left: Proof, right: Proof) -> Proof {
        Proof::node(Rule::Mix, vec![left, right], vec![vec![], vec![]], vec![]).unwrap()
    }

    /// wd_tens on `f` extracting slot `k`: left proves the factor, right the residual.
    pub fn wd_tens(left: Proof, right: Proof, f: &Formula, k: usize) -> ProofResult<Proof> {
        let factor = f
            .at(&[k])
            .ok_or_else(|| ProofError::Format("wd_tens: slot out of range".into()))?
            .clone();
        let residual = with_unit_at(f, k).unwrap();
        let mut p = Proof::node(
            Rule::WdTens,
            vec![left, right],
            vec![vec![factor], vec![residual]],
            vec![f.clone()],
        )?;
        p.slot = Some(k);
        Ok(p)
    }

    pub fn unitor(child: Proof, chi: &Formula, f: &Formula, k: usize) -> ProofResult<Proof> {
        let mut p = Proof::node(
            Rule::Unitor,
            vec![child],
            vec![vec![chi.clone()]],
            vec![f.clone()],
        )?;
        p.slot = Some(k);
        Ok(p)
    }

    /// Cut on `a`: the left premise holds `a`, the right one its negation.
    pub fn cut(left: Proof, a: &Formula, right: Proof, base: &Base) -> ProofResult<Proof> {
        Proof::node(
            Rule::Cut,
            vec![left, right],
            vec![vec![a.clone()], vec![negate(a, base)]],
            vec![],
        )
    }

    pub fn wd_par(child: Proof, f: &Formula, path: Path) -> ProofResult<Proof> {
        let factor = f
            .at(&path)
            .ok_or_else(|| ProofError::Format("wd_par: path out of range".into()))?
            .clone();
        let residual = f.replace_at(&path, Formula::Unit).unwrap();
        let mut p = Proof::node(
            Rule::WdPar,
            vec![child],
            vec![vec![f.clone()]],
            vec![residual, factor],
        )?;
        p.path = Some(path);
        Ok(p)
    }

    /// deep: `zeta_phi` holds `phi` at `path`; ψ must have the graph of `zeta_phi` with ◦ at `path`.
    pub fn deep(
        left: Proof,
        phi: &Formula,
        right: Proof,
        psi: &Formula,
        zeta_phi: &Formula,
        path: Path,
    ) -> ProofResult<Proof> {
        let mut p = Proof::node(
            Rule::Deep,
            vec![left, right],
            vec![vec![phi.clone()], vec![psi.clone()]],
            vec![zeta_phi.clone()],
        )?;
        p.path = Some(path);
        Ok(p)
    }

    /// conr: premise k proves argument k of `f`.
    pub fn conr(f: &Formula, children: Vec<Proof>) -> ProofResult<Proof> {
        let actives = f.children().into_iter().map(|a| vec![a.clone()]).collect();
        Proof::node(Rule::Conr, children, actives, vec![f.clone()])
    }

    pub fn weaken(child: Proof, f: &Formula) -> Proof {
        Proof::node(Rule::Weaken, vec![child], vec![vec![]], vec![f.clone()]).unwrap()
    }

    pub fn contract(child: Proof, f: &Formula) -> ProofResult<Proof> {
        Proof::node(
            Rule::Contract,
            vec![child],
            vec![vec![f.clone(), f.clone()]],
            vec![f.clone()],
        )
    }

    /// Principal formulas, in order.
    pub fn principals(&self) -> Vec<&Formula> {
        self.principal
            .iter()
            .map(|&i| &self.conclusion[i])
            .collect()
    }

    /// Context contributed by child `k`.
    pub fn context_of(&self, k: usize) -> Sequent {
        remove_all(&self.children[k].conclusion, &self.actives[k]).unwrap_or_default()
    }

    /// The same rule instance over new children, conclusion recomputed.
    pub fn rebuild(&self, children: Vec<Proof>) -> ProofResult<Proof> {
        let principals = self.principals().into_iter().cloned().collect();
        let mut p = Proof::node(self.rule, children, self.actives.clone(), principals)?;
        p.sigma = self.sigma.clone();
        p.tau = self.tau.clone();
        p.slot = self.slot;
        p.path = self.path.clone();
        Ok(p)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn uses(&self, r: Rule) -> bool {
        self.rule == r || self.children.iter().any(|c| c.uses(r))
    }

    pub fn count(&self, r: Rule) -> usize {
        usize::from(self.rule == r) + self.children.iter().map(|c| c.count(r)).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        !self.uses(Rule::Cut)
    }

    /// Every rule used in the tree.
    pub fn rules_used(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::from([self.rule]);
        for c in &self.children {
            out.extend(c.rules_used());
        }
        out
    }

    /// Replace literals by formulas throughout, and leaves (`ax` or `hyp`)
    /// whose conclusion `leaf` recognizes by the proof it returns. A
    /// replacement leaf must contain the substituted leaf formulas; its
    /// extra formulas flow into the context below.
    pub fn substitute(
        &self,
        subst: &dyn Fn(&Literal) -> Option<Formula>,
        leaf: &mut dyn FnMut(&Proof) -> Option<Proof>,
    ) -> ProofResult<Proof> {
        if matches!(self.rule, Rule::Ax | Rule::Hyp) {
            if let Some(p) = leaf(self) {
                return Ok(p);
            }
        }
        let children = self
            .children
            .iter()
            .map(|c| c.substitute(subst, leaf))
            .collect::<ProofResult<Vec<_>>>()?;
        let sub = |f: &Formula| substitute_formula(f, subst);
        let actives = self
            .actives
            .iter()
            .map(|a| a.iter().map(sub).collect())
            .collect();
        let principals = self.principals().into_iter().map(sub).collect();
        let mut p = Proof::node(self.rule, children, actives, principals)?;
        p.sigma = self.sigma.clone();
        p.tau = self.tau.clone();
        p.slot = self.slot;
        p.path = self.path.clone();
        Ok(p)
    }

    pub fn to_json(&self) -> ProofJson {
        ProofJson {
            rule: self.rule,
            conclusion: self.conclusion.iter().map(|f| f.to_string()).collect(),
            principal: self.principal.clone(),
            actives: self
                .actives
                .iter()
                .map(|a| a.iter().map(|f| f.to_string()).collect())
                .collect(),
            sigma: self.sigma.clone(),
            tau: self.tau.clone(),
            slot: self.slot,
            path: self.path.clone(),
            children: self.children.iter().map(|c| c.to_json()).collect(),
        }
    }

    /// Rebuild from JSON. The stored conclusion must agree with the one
    /// recomputed from children, actives and principals.
    pub fn from_json(json: &ProofJson, base: &Base) -> ProofResult<Proof> {
        let parse = |s: &String| formula::parse(s, base).map_err(ProofError::from);
        let conclusion: Sequent = json
            .conclusion
            .iter()
            .map(parse)
            .collect::<ProofResult<_>>()?;
        let children = json
            .children
            .iter()
            .map(|c| Proof::from_json(c, base))
            .collect::<ProofResult<Vec<_>>>()?;
        let actives: Vec<Vec<Formula>> = json
            .actives
            .iter()
            .map(|a| a.iter().map(parse).collect::<ProofResult<_>>())
            .collect::<ProofResult<_>>()?;
        if json.principal.iter().any(|&i| i >= conclusion.len()) {
            return Err(ProofError::Format("principal index out of range".into()));
        }
        let actives = if actives.is_empty() && !children.is_empty() {
            vec![vec![]; children.len()]
        } else {
            actives
        };
        let p = Proof {
            rule: json.rule,
            conclusion,
            principal: json.principal.clone(),
            actives,
            sigma: json.sigma.clone(),
            tau: json.tau.clone(),
            slot: json.slot,
            path: json.path.clone(),
            children,
        };
        Ok(p)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("proof JSON serializes")
    }

    pub fn from_json_str(text: &str, base: &Base) -> ProofResult<Proof> {
        let json: ProofJson =
            serde_json::from_str(text).map_err(|e| ProofError::Format(e.to_string()))?;
        Proof::from_json(&json, base)
    }

    /// Deterministic DOT rendering of the proof tree.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph proof {\n  node [shape=box];\n");
        let mut next = 0usize;
        fn go(p: &Proof, out: &mut String, next: &mut usize) -> usize {
            let id = *next;
            *next += 1;
            let label = format!("{}: ⊢ {}", p.rule, show(&p.conclusion)).replace('"', "\\\"");
            out.push_str(&format!("  n{id} [label=\"{label}\"];\n"));
            for c in &p.children {
                let cid = go(c, out, next);
                out.push_str(&format!("  n{cid} -> n{id};\n"));
            }
            id
        }
        go(self, &mut out, &mut next);
        out.push_str("}\n");
        out
    }
}

/// Render a sequent as comma-separated formulas.
pub fn show(seq: &[Formula]) -> String {
    seq.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(p: &Proof, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(
                f,
                "{:indent$}{} ⊢ {}",
                "",
                p.rule,
                show(&p.conclusion),
                indent = 2 * depth
            )?;
            p.children.iter().try_for_each(|c| go(c, depth + 1, f))
        }
        go(self, 0, f)
    }
}

pub fn substitute_formula(f: &Formula, subst: &dyn Fn(&Literal) -> Option<Formula>) -> Formula {
    match f {
        Formula::Unit => Formula::Unit,
        Formula::Lit(l) => subst(l).unwrap_or_else(|| f.clone()),
        Formula::Par(a, b) => {
            Formula::par(substitute_formula(a, subst), substitute_formula(b, subst))
        }
        Formula::Tens(a, b) => {
            Formula::tens(substitute_formula(a, subst), substitute_formula(b, subst))
        }
        Formula::App(c, args) => Formula::App(
            c.clone(),
            args.iter().map(|a| substitute_formula(a, subst)).collect(),
        ),
    }
}

/// `n` atom names that occur in none of `avoid`.
pub fn fresh_atoms(n: usize, avoid: &[&Formula]) -> Vec<String> {
    let used: BTreeSet<String> = avoid.iter().flat_map(|f| f.atoms()).collect();
    (0..)
        .map(|i| format!("h{i}_"))
        .filter(|s| !used.contains(s))
        .take(n)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofJson {
    pub rule: Rule,
    pub conclusion: Vec<String>,
    pub principal: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actives: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Path>,
    #[serde(default)]
    pub children: Vec<ProofJson>,
}
