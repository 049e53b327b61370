//! Classical graphical logic: decomposition of GLK proofs into an MGL proof
//! followed by deep structural rewrites, refinement of contraction into
//! medial and atomic contraction, and a truth-table oracle.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomp::{is_prime, Base, Conn};
use crate::error::{FormulaError, GsError, ProofError, ProofResult};
use crate::formula::{self, formula_of, normal_form, Formula, Path};
use crate::graph::{GraphJson, LabeledGraph, Literal, VertexId};
use crate::gs::{gs_rules, gs_search, GsOutcome, GsSearchConfig};
use crate::sequent::{
    check_proof, prove_with, same_multiset, show, Outcome, Proof, ProofJson, Rule, SearchConfig,
    Sequent, System,
};

/// Deep structural rules.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructuralRule {
    /// w↓: ψ becomes ψ⅋φ (or φ⅋ψ); at sequent level a new formula appears.
    #[serde(rename = "w")]
    Weaken,
    /// c↓: φ⅋φ becomes φ.
    #[serde(rename = "c")]
    Contract,
    /// ac↓: a⅋a becomes a.
    #[serde(rename = "ac")]
    AtomicContract,
    /// m: P⟨φ…⟩⅋P⟨ψ…⟩ becomes P⟨φ₁⅋ψ₁,…⟩ for P prime and not ⅋.
    #[serde(rename = "m")]
    Medial,
}

impl fmt::Display for StructuralRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructuralRule::Weaken => "w↓",
            StructuralRule::Contract => "c↓",
            StructuralRule::AtomicContract => "ac↓",
            StructuralRule::Medial => "m",
        })
    }
}

/// One rewrite of a sequent. `path` is `None` only for a sequent-level
/// weakening, which inserts `after[index]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: StructuralRule,
    pub index: usize,
    pub path: Option<Path>,
    pub before: Sequent,
    pub after: Sequent,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            None => write!(
                f,
                "{} at sequent position {}: ⊢ {}",
                self.rule,
                self.index,
                show(&self.after)
            ),
            Some(p) => write!(
                f,
                "{} in formula {} at {:?}: ⊢ {}",
                self.rule,
                self.index,
                p,
                show(&self.after)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub rules: Vec<StructuralRule>,
    pub steps: Vec<Step>,
}

/// An MGL proof followed by ordered stages of deep structural rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedDerivation {
    pub head: Proof,
    pub stages: Vec<Stage>,
    pub conclusion: Sequent,
}

impl StagedDerivation {
    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.stages.iter().flat_map(|s| s.steps.iter())
    }

    pub fn count(&self, rule: StructuralRule) -> usize {
        self.steps().filter(|s| s.rule == rule).count()
    }

    /// Rules of each stage, in order.
    pub fn stage_rules(&self) -> Vec<Vec<StructuralRule>> {
        self.stages.iter().map(|s| s.rules.clone()).collect()
    }

    pub fn to_json(&self) -> StagedJson {
        let seq = |s: &Sequent| s.iter().map(|f| f.to_string()).collect();
        StagedJson {
            head: self.head.to_json(),
            conclusion: seq(&self.conclusion),
            stages: self
                .stages
                .iter()
                .map(|st| StageJson {
                    rules: st.rules.clone(),
                    steps: st
                        .steps
                        .iter()
                        .map(|s| StepJson {
                            rule: s.rule,
                            index: s.index,
                            path: s.path.clone(),
                            before: seq(&s.before),
                            after: seq(&s.after),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &StagedJson, base: &Base) -> ProofResult<Self> {
        let seq = |s: &[String]| -> ProofResult<Sequent> {
            s.iter()
                .map(|x| formula::parse(x, base).map_err(ProofError::from))
                .collect()
        };
        let mut stages = Vec::new();
        for st in &json.stages {
            let mut steps = Vec::new();
            for s in &st.steps {
                steps.push(Step {
                    rule: s.rule,
                    index: s.index,
                    path: s.path.clone(),
                    before: seq(&s.before)?,
                    after: seq(&s.after)?,
                });
            }
            stages.push(Stage {
                rules: st.rules.clone(),
                steps,
            });
        }
        Ok(StagedDerivation {
            head: Proof::from_json(&json.head, base)?,
            stages,
            conclusion: seq(&json.conclusion)?,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("staged derivation serializes")
    }

    pub fn from_json_str(text: &str, base: &Base) -> ProofResult<Self> {
        let json: StagedJson =
            serde_json::from_str(text).map_err(|e| ProofError::Format(e.to_string()))?;
        Self::from_json(&json, base)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedJson {
    pub head: ProofJson,
    pub conclusion: Vec<String>,
    pub stages: Vec<StageJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    pub rules: Vec<StructuralRule>,
    pub steps: Vec<StepJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub rule: StructuralRule,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Path>,
    pub before: Vec<String>,
    pub after: Vec<String>,
}

/// Same multiset of formulas up to ≡. Steps are chained modulo this
/// relation, so ⅋ may be reassociated between two rewrites.
pub fn sequent_equiv(a: &[Formula], b: &[Formula]) -> bool {
    let key = |s: &[Formula]| {
        let mut v: Vec<_> = s.iter().map(normal_form).collect();
        v.sort();
        v
    };
    a.len() == b.len() && key(a) == key(b)
}

/// Check one step against its rule scheme.
pub fn check_step(s: &Step) -> Result<(), String> {
    let (b, a) = (&s.before, &s.after);
    let Some(path) = &s.path else {
        if s.rule != StructuralRule::Weaken {
            return Err(format!("{} needs a position inside a formula", s.rule));
        }
        if a.len() != b.len() + 1 || s.index >= a.len() {
            return Err("sequent-level w↓ adds exactly one formula".into());
        }
        let mut rest = a.clone();
        rest.remove(s.index);
        return if rest == *b {
            Ok(())
        } else {
            Err("sequent-level w↓ changes other formulas".into())
        };
    };
    if a.len() != b.len() || s.index >= b.len() {
        return Err("deep rewrite changes the number of formulas".into());
    }
    if (0..b.len()).any(|j| j != s.index && a[j] != b[j]) {
        return Err("deep rewrite touches another formula".into());
    }
    let (fb, fa) = (&b[s.index], &a[s.index]);
    let old = fb.at(path).ok_or("path out of range")?;
    let new = fa.at(path).ok_or("path out of range after the step")?;
    if fb.replace_at(path, new.clone()).as_ref() != Some(fa) {
        return Err("formula changes outside the rewritten position".into());
    }
    match s.rule {
        StructuralRule::Weaken => match new {
            Formula::Par(x, y) if **x == *old || **y == *old => Ok(()),
            _ => Err("w↓ must put the old subformula under a new ⅋".into()),
        },
        StructuralRule::Contract | StructuralRule::AtomicContract => match old {
            Formula::Par(x, y) if x == y && **x == *new => {
                if s.rule == StructuralRule::AtomicContract && !x.is_literal() {
                    Err("ac↓ contracts atoms only".into())
                } else {
                    Ok(())
                }
            }
            _ => Err(format!("{} needs two equal ⅋-operands", s.rule)),
        },
        StructuralRule::Medial => {
            let Formula::Par(x, y) = old else {
                return Err("m applies to a ⅋ of two compounds".into());
            };
            let same_conn = match (&**x, &**y) {
                (Formula::Tens(..), Formula::Tens(..)) => true,
                (Formula::App(c, _), Formula::App(d, _)) => c.name() == d.name(),
                _ => false,
            };
            if !same_conn {
                return Err("m needs the same prime connective other than ⅋ on both sides".into());
            }
            let joined: Vec<Formula> = x
                .children()
                .into_iter()
                .zip(y.children())
                .map(|(u, v)| Formula::par(u.clone(), v.clone()))
                .collect();
            if with_children(x, joined).as_ref() == Some(new) {
                Ok(())
            } else {
                Err("m must pair the arguments slot by slot".into())
            }
        }
    }
}

/// Check a staged derivation: the head proof in MGL, every step against
/// its scheme and stage, the chaining of steps, and the final conclusion.
pub fn check_staged(s: &StagedDerivation, base: &Base) -> ProofResult<()> {
    check_proof(&s.head, &System::Mgl.rules(), base)
        .map_err(|d| ProofError::Rejected(format!("head proof: {d}")))?;
    let mut current = s.head.conclusion.clone();
    for (i, st) in s.stages.iter().enumerate() {
        for (j, step) in st.steps.iter().enumerate() {
            let at = |m: String| ProofError::Rejected(format!("stage {i} step {j}: {m}"));
            if !st.rules.contains(&step.rule) {
                return Err(at(format!("{} is not part of this stage", step.rule)));
            }
            if !sequent_equiv(&current, &step.before) {
                return Err(at("premise does not match the previous sequent".into()));
            }
            check_step(step).map_err(at)?;
            current = step.after.clone();
        }
    }
    if !same_multiset(&current, &s.conclusion) {
        return Err(ProofError::Rejected(format!(
            "derivation ends in ⊢ {} instead of ⊢ {}",
            show(&current),
            show(&s.conclusion)
        )));
    }
    Ok(())
}

/// Same connective with new arguments.
fn with_children(f: &Formula, kids: Vec<Formula>) -> Option<Formula> {
    match f {
        Formula::Par(..) if kids.len() == 2 => {
            let mut it = kids.into_iter();
            Some(Formula::par(it.next()?, it.next()?))
        }
        Formula::Tens(..) if kids.len() == 2 => {
            let mut it = kids.into_iter();
            Some(Formula::tens(it.next()?, it.next()?))
        }
        Formula::App(c, args) if args.len() == kids.len() => Some(Formula::App(c.clone(), kids)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Decomposition into MGL plus {w↓, c↓}
// ---------------------------------------------------------------------------

/// A rewrite local to one formula occurrence.
#[derive(Clone, Debug)]
enum Local {
    /// Put `formula` beside the subformula at the path; `left` puts it first.
    Weaken {
        path: Path,
        formula: Formula,
        left: bool,
    },
    Contract {
        path: Path,
    },
}

impl Local {
    fn under(self, k: usize) -> Local {
        let pre = |p: Path| std::iter::once(k).chain(p).collect();
        match self {
            Local::Weaken {
                path,
                formula,
                left,
            } => Local::Weaken {
                path: pre(path),
                formula,
                left,
            },
            Local::Contract { path } => Local::Contract { path: pre(path) },
        }
    }
}

/// What a conclusion occurrence comes from in the MGL head proof: its
/// pre-image (`None` when it was introduced by weakening) and the local
/// rewrites leading from the pre-image to it.
#[derive(Clone, Debug)]
struct Track {
    pre: Option<Formula>,
    steps: Vec<Local>,
}

impl Track {
    fn plain(f: &Formula) -> Track {
        Track {
            pre: Some(f.clone()),
            steps: vec![],
        }
    }

    fn weakened() -> Track {
        Track {
            pre: None,
            steps: vec![],
        }
    }
}

struct Walk {
    head: Proof,
    tracks: Vec<Track>,
}

/// Rewrite a cut-free GLK proof as an MGL proof of some Γ′ followed by deep
/// w↓ and c↓ steps from Γ′ to the original conclusion. Weakenings and
/// contractions are permuted towards the root: a weakened formula drops out
/// of the head proof (taking a whole branch with it when it meets ⊗ or a
/// prime connective), and the two copies of a contraction are joined by ⅋
/// in the head and merged by a deep c↓ afterwards.
pub fn decompose_structural(p: &Proof, base: &Base) -> ProofResult<StagedDerivation> {
    check_proof(p, &System::Glk.rules(), base)
        .map_err(|d| ProofError::Domain(format!("not a cut-free GLK proof: {d}")))?;
    let w = walk(p)?;
    let mut state: Sequent = w.tracks.iter().filter_map(|t| t.pre.clone()).collect();
    if !same_multiset(&state, &w.head.conclusion) {
        return Err(ProofError::Domain(
            "internal: head conclusion lost track of its formulas".into(),
        ));
    }
    let mut steps = Vec::new();
    let mut index = 0;
    for t in &w.tracks {
        if t.pre.is_none() {
            continue;
        }
        for l in &t.steps {
            let f = &state[index];
            let (rule, path, new) = match l {
                Local::Weaken {
                    path,
                    formula,
                    left,
                } => {
                    let old = f
                        .at(path)
                        .ok_or_else(|| internal("weakening path"))?
                        .clone();
                    let node = if *left {
                        Formula::par(formula.clone(), old)
                    } else {
                        Formula::par(old, formula.clone())
                    };
                    (StructuralRule::Weaken, path, f.replace_at(path, node))
                }
                Local::Contract { path } => {
                    let new = match f.at(path) {
                        Some(Formula::Par(x, y)) if x == y => f.replace_at(path, (**x).clone()),
                        _ => None,
                    };
                    (StructuralRule::Contract, path, new)
                }
            };
            let mut after = state.clone();
            after[index] = new.ok_or_else(|| internal("contraction of unequal copies"))?;
            steps.push(Step {
                rule,
                index,
                path: Some(path.clone()),
                before: state,
                after: after.clone(),
            });
            state = after;
        }
        index += 1;
    }
    for (i, t) in w.tracks.iter().enumerate() {
        if t.pre.is_none() {
            let mut after = state.clone();
            after.insert(i, p.conclusion[i].clone());
            steps.push(Step {
                rule: StructuralRule::Weaken,
                index: i,
                path: None,
                before: state,
                after: after.clone(),
            });
            state = after;
        }
    }
    if state != p.conclusion {
        return Err(internal("replay does not reach the conclusion"));
    }
    Ok(StagedDerivation {
        head: w.head,
        stages: vec![Stage {
            rules: vec![StructuralRule::Weaken, StructuralRule::Contract],
            steps,
        }],
        conclusion: p.conclusion.clone(),
    })
}

/// A dconr premise that weakens one of its two active arguments but not the
/// other leaves the kept argument stranded: no w↓ step can rebuild a prime
/// connective around it, so no MGL head proof exists.
pub const HALF_WEAKENED: &str =
    "a dconr premise weakens one of its two active arguments but not the other";

fn internal(what: &str) -> ProofError {
    ProofError::Domain(format!("internal: {what}"))
}

/// Split a child's tracks into its active ones (first occurrences, in the
/// order of `actives`) and its context, paired with formulas.
fn split(
    conclusion: &[Formula],
    tracks: Vec<Track>,
    actives: &[Formula],
) -> (Vec<Track>, Vec<(Formula, Track)>) {
    let mut slots: Vec<Option<Track>> = tracks.into_iter().map(Some).collect();
    let mut act = Vec::new();
    for a in actives {
        let i = (0..conclusion.len())
            .find(|&i| slots[i].is_some() && conclusion[i] == *a)
            .expect("active present");
        act.push(slots[i].take().unwrap());
    }
    let ctx = conclusion
        .iter()
        .cloned()
        .zip(slots)
        .filter_map(|(f, t)| t.map(|t| (f, t)))
        .collect();
    (act, ctx)
}

/// Lay tracks out in the order of the node's conclusion.
fn assemble(p: &Proof, mut ctx: Vec<(Formula, Track)>, principal: Vec<Track>) -> Vec<Track> {
    let mut principal: Vec<Option<Track>> = principal.into_iter().map(Some).collect();
    (0..p.conclusion.len())
        .map(|i| match p.principal.iter().position(|&j| j == i) {
            Some(k) => principal[k].take().expect("principal used once"),
            None => {
                let k = ctx
                    .iter()
                    .position(|(f, _)| *f == p.conclusion[i])
                    .expect("context present");
                ctx.remove(k).1
            }
        })
        .collect()
}

fn weaken_all(ctx: Vec<(Formula, Track)>) -> Vec<(Formula, Track)> {
    ctx.into_iter()
        .map(|(f, _)| (f, Track::weakened()))
        .collect()
}

fn walk(p: &Proof) -> ProofResult<Walk> {
    let mut kids = Vec::new();
    for c in &p.children {
        kids.push(walk(c)?);
    }
    let mut parts = Vec::new();
    for ((c, k), a) in p.children.iter().zip(kids).zip(&p.actives) {
        let (act, ctx) = split(&c.conclusion, k.tracks, a);
        parts.push((k.head, act, ctx));
    }
    match p.rule {
        Rule::Ax => {
            let pr = p.principals().into_iter().map(Track::plain).collect();
            Ok(Walk {
                head: p.clone(),
                tracks: assemble(p, vec![], pr),
            })
        }
        Rule::Weaken => {
            let (head, _, ctx) = parts.pop().unwrap();
            Ok(Walk {
                head,
                tracks: assemble(p, ctx, vec![Track::weakened()]),
            })
        }
        Rule::Contract | Rule::Par => {
            let (head, mut act, ctx) = parts.pop().unwrap();
            let b = act.pop().unwrap();
            let a = act.pop().unwrap();
            let contract = p.rule == Rule::Contract;
            let pr = p.principals()[0].clone();
            let (head, track) = match (a.pre, b.pre) {
                (Some(x), Some(y)) => {
                    let head = Proof::par(head, &x, &y)?;
                    let mut steps: Vec<Local> = a.steps.into_iter().map(|l| l.under(0)).collect();
                    steps.extend(b.steps.into_iter().map(|l| l.under(1)));
                    if contract {
                        steps.push(Local::Contract { path: vec![] });
                    }
                    (
                        head,
                        Track {
                            pre: Some(Formula::par(x, y)),
                            steps,
                        },
                    )
                }
                (None, None) => (head, Track::weakened()),
                (x, y) => {
                    let left_missing = x.is_none();
                    let (pre, mut steps) = if left_missing {
                        (y, b.steps)
                    } else {
                        (x, a.steps)
                    };
                    if !contract {
                        let Formula::Par(l, r) = &pr else {
                            return Err(internal("par principal"));
                        };
                        let formula = if left_missing {
                            (**l).clone()
                        } else {
                            (**r).clone()
                        };
                        steps.push(Local::Weaken {
                            path: vec![],
                            formula,
                            left: left_missing,
                        });
                    }
                    (head, Track { pre, steps })
                }
            };
            Ok(Walk {
                head,
                tracks: assemble(p, ctx, vec![track]),
            })
        }
        Rule::Tens => {
            let (hb, mut ab, cb) = parts.pop().unwrap();
            let (ha, mut aa, ca) = parts.pop().unwrap();
            let (a, b) = (aa.pop().unwrap(), ab.pop().unwrap());
            match (a.pre, b.pre) {
                (Some(x), Some(y)) => {
                    let head = Proof::tens(ha, &x, hb, &y)?;
                    let mut steps: Vec<Local> = a.steps.into_iter().map(|l| l.under(0)).collect();
                    steps.extend(b.steps.into_iter().map(|l| l.under(1)));
                    let track = Track {
                        pre: Some(Formula::tens(x, y)),
                        steps,
                    };
                    Ok(Walk {
                        head,
                        tracks: assemble(p, [ca, cb].concat(), vec![track]),
                    })
                }
                (None, _) => Ok(Walk {
                    head: ha,
                    tracks: assemble(p, [ca, weaken_all(cb)].concat(), vec![Track::weakened()]),
                }),
                (_, None) => Ok(Walk {
                    head: hb,
                    tracks: assemble(p, [weaken_all(ca), cb].concat(), vec![Track::weakened()]),
                }),
            }
        }
        Rule::Dconr => {
            let pr: Vec<Formula> = p.principals().into_iter().cloned().collect();
            let (x, y) = (&pr[0], &pr[1]);
            if parts
                .iter()
                .any(|(_, act, _)| act.iter().filter(|t| t.pre.is_none()).count() == 1)
            {
                return Err(ProofError::Domain(HALF_WEAKENED.into()));
            }
            let keep = parts
                .iter()
                .position(|(_, act, _)| act.iter().all(|t| t.pre.is_none()));
            if let Some(k) = keep {
                let mut ctx = Vec::new();
                let mut head = None;
                for (i, (h, _, c)) in parts.into_iter().enumerate() {
                    if i == k {
                        head = Some(h);
                        ctx.extend(c);
                    } else {
                        ctx.extend(weaken_all(c));
                    }
                }
                let tracks = assemble(p, ctx, vec![Track::weakened(), Track::weakened()]);
                return Ok(Walk {
                    head: head.unwrap(),
                    tracks,
                });
            }
            let n = parts.len();
            let mut xs: Vec<Formula> = x.children().into_iter().cloned().collect();
            let mut ys: Vec<Formula> = y.children().into_iter().cloned().collect();
            let (mut sx, mut sy) = (Vec::new(), Vec::new());
            let mut heads = Vec::new();
            let mut ctx = Vec::new();
            for (k, (h, act, c)) in parts.into_iter().enumerate() {
                let mut it = act.into_iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                xs[p.sigma[k]] = a.pre.unwrap();
                ys[p.tau[k]] = b.pre.unwrap();
                sx.extend(a.steps.into_iter().map(|l| l.under(p.sigma[k])));
                sy.extend(b.steps.into_iter().map(|l| l.under(p.tau[k])));
                heads.push(h);
                ctx.extend(c);
            }
            debug_assert_eq!(heads.len(), n);
            let (px, py) = (with_children(x, xs).unwrap(), with_children(y, ys).unwrap());
            let head = Proof::dconr(&px, &py, p.sigma.clone(), p.tau.clone(), heads)?;
            let tracks = assemble(
                p,
                ctx,
                vec![
                    Track {
                        pre: Some(px),
                        steps: sx,
                    },
                    Track {
                        pre: Some(py),
                        steps: sy,
                    },
                ],
            );
            Ok(Walk { head, tracks })
        }
        r => Err(ProofError::Domain(format!(
            "rule {r} cannot occur in a cut-free GLK proof"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Refinement into m; ac↓; w↓
// ---------------------------------------------------------------------------

/// A formula annotated with weakened material and atom multiplicities.
/// Its projection drops weakened parts and repeats each atom as often as
/// copies of it have been merged so far.
#[derive(Clone, Debug)]
enum Ann {
    Lit {
        lit: Literal,
        mult: usize,
        weak: bool,
    },
    Node {
        shape: Formula,
        kids: Vec<Ann>,
        weak: bool,
    },
    /// Two copies being merged.
    Pending(Box<Ann>, Box<Ann>),
}

impl Ann {
    fn of(f: &Formula, weak: bool) -> ProofResult<Ann> {
        Ok(match f {
            Formula::Unit => {
                return Err(ProofError::Domain(
                    "units do not occur in GLK sequents".into(),
                ))
            }
            Formula::Lit(l) => Ann::Lit {
                lit: l.clone(),
                mult: 1,
                weak,
            },
            _ => Ann::Node {
                shape: f.clone(),
                kids: f
                    .children()
                    .into_iter()
                    .map(|c| Ann::of(c, weak))
                    .collect::<ProofResult<_>>()?,
                weak,
            },
        })
    }

    fn weak(&self) -> bool {
        match self {
            Ann::Lit { weak, .. } | Ann::Node { weak, .. } => *weak,
            Ann::Pending(a, b) => a.weak() && b.weak(),
        }
    }

    fn is_par(&self) -> bool {
        matches!(
            self,
            Ann::Node {
                shape: Formula::Par(..),
                ..
            } | Ann::Pending(..)
        )
    }

    fn kids_mut(&mut self) -> Vec<&mut Ann> {
        match self {
            Ann::Lit { .. } => vec![],
            Ann::Node { kids, .. } => kids.iter_mut().collect(),
            Ann::Pending(a, b) => vec![&mut **a, &mut **b],
        }
    }

    fn kids(&self) -> Vec<&Ann> {
        match self {
            Ann::Lit { .. } => vec![],
            Ann::Node { kids, .. } => kids.iter().collect(),
            Ann::Pending(a, b) => vec![&**a, &**b],
        }
    }

    fn at_mut(&mut self, path: &[usize]) -> Option<&mut Ann> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.kids_mut().into_iter().nth(i)?.at_mut(rest),
        }
    }

    /// Projection; `None` when everything is weakened.
    fn proj(&self, with_mult: bool) -> Option<Formula> {
        if self.weak() {
            return None;
        }
        match self {
            Ann::Lit { lit, mult, .. } => {
                let copies = if with_mult { *mult } else { 1 };
                (0..copies)
                    .map(|_| Formula::Lit(lit.clone()))
                    .rev()
                    .reduce(|acc, x| Formula::par(x, acc))
            }
            Ann::Node {
                shape: Formula::Par(..),
                kids,
                ..
            } => par_opt(kids[0].proj(with_mult), kids[1].proj(with_mult)),
            Ann::Node { shape, kids, .. } => with_children(
                shape,
                kids.iter()
                    .map(|k| k.proj(with_mult))
                    .collect::<Option<_>>()?,
            ),
            Ann::Pending(a, b) => par_opt(a.proj(with_mult), b.proj(with_mult)),
        }
    }

    /// Path in the projection of the node at `path` (which must be present).
    fn proj_path(&self, path: &[usize]) -> Path {
        let mut out = Vec::new();
        let mut node = self;
        for &i in path {
            let kids = node.kids();
            if !node.is_par() || kids.iter().all(|k| !k.weak()) {
                out.push(i);
            }
            node = kids[i];
        }
        out
    }

    fn clear_weak(&mut self) {
        match self {
            Ann::Lit { weak, .. } | Ann::Node { weak, .. } => *weak = false,
            Ann::Pending(..) => {}
        }
        for k in self.kids_mut() {
            k.clear_weak();
        }
    }

    fn reset_mult(&mut self) {
        if let Ann::Lit { mult, .. } = self {
            *mult = 1;
        }
        for k in self.kids_mut() {
            k.reset_mult();
        }
    }
}

fn par_opt(a: Option<Formula>, b: Option<Formula>) -> Option<Formula> {
    match (a, b) {
        (Some(x), Some(y)) => Some(Formula::par(x, y)),
        (x, y) => x.or(y),
    }
}

struct Refiner {
    state: Vec<Ann>,
    medial: Vec<Step>,
}

impl Refiner {
    fn project(&self, with_mult: bool) -> Sequent {
        self.state
            .iter()
            .filter_map(|a| a.proj(with_mult))
            .collect()
    }

    /// Index in the projection of top-level formula `i`.
    fn proj_index(&self, i: usize) -> usize {
        self.state[..i].iter().filter(|a| !a.weak()).count()
    }

    fn node(&mut self, i: usize, path: &[usize]) -> &mut Ann {
        self.state[i].at_mut(path).expect("annotated path")
    }

    /// Resolve the pending merge at `path`, emitting medial steps.
    fn resolve(&mut self, i: usize, path: Path) -> ProofResult<()> {
        let Ann::Pending(a, b) = self.node(i, &path).clone() else {
            return Err(internal("no pending merge"));
        };
        if a.weak() || b.weak() {
            *self.node(i, &path) = if a.weak() { *b } else { *a };
            return Ok(());
        }
        match (*a, *b) {
            (
                Ann::Lit { lit, mult: m, .. },
                Ann::Lit {
                    lit: l2, mult: n, ..
                },
            ) if lit == l2 => {
                *self.node(i, &path) = Ann::Lit {
                    lit,
                    mult: m + n,
                    weak: false,
                };
                Ok(())
            }
            (
                Ann::Node {
                    shape, kids: ka, ..
                },
                Ann::Node {
                    shape: s2,
                    kids: kb,
                    ..
                },
            ) if std::mem::discriminant(&shape) == std::mem::discriminant(&s2)
                && ka.len() == kb.len() =>
            {
                let par = matches!(shape, Formula::Par(..));
                let before = self.project(true);
                let (index, at) = (self.proj_index(i), self.state[i].proj_path(&path));
                let kids = ka
                    .into_iter()
                    .zip(kb)
                    .map(|(x, y)| Ann::Pending(Box::new(x), Box::new(y)))
                    .collect();
                *self.node(i, &path) = Ann::Node {
                    shape,
                    kids,
                    weak: false,
                };
                if !par {
                    let after = self.project(true);
                    self.medial.push(Step {
                        rule: StructuralRule::Medial,
                        index,
                        path: Some(at),
                        before,
                        after,
                    });
                }
                let n = self.node(i, &path).kids().len();
                for k in 0..n {
                    let mut sub = path.clone();
                    sub.push(k);
                    self.resolve(i, sub)?;
                }
                Ok(())
            }
            _ => Err(ProofError::Domain("c↓ on copies of different shape".into())),
        }
    }
}

/// Replace every c↓ by medial and atomic contraction steps and permute the
/// result into the stages m; ac↓; w↓. Weakened material is carried along
/// and only inserted in the last stage, so copies merged by a contraction
/// only need their non-weakened parts to agree.
pub fn refine_contractions(s: &StagedDerivation, base: &Base) -> ProofResult<StagedDerivation> {
    check_staged(s, base)?;
    let start: Sequent = s
        .steps()
        .next()
        .map(|st| st.before.clone())
        .unwrap_or_else(|| s.conclusion.clone());
    let state = start
        .iter()
        .map(|f| Ann::of(f, false))
        .collect::<ProofResult<_>>()?;
    let mut r = Refiner {
        state,
        medial: vec![],
    };
    for step in s.steps() {
        match (step.rule, &step.path) {
            (StructuralRule::Weaken, None) => {
                r.state
                    .insert(step.index, Ann::of(&step.after[step.index], true)?);
            }
            (StructuralRule::Weaken, Some(path)) => {
                let old = step.before[step.index]
                    .at(path)
                    .ok_or_else(|| internal("step path"))?;
                let Some(Formula::Par(x, y)) = step.after[step.index].at(path) else {
                    return Err(internal("w↓ shape"));
                };
                let left = **x != *old;
                let node = r.node(step.index, path);
                let inserted = Ann::of(if left { x } else { y }, true)?;
                let shape = Formula::par((**x).clone(), (**y).clone());
                let weak = node.weak();
                let kept = std::mem::replace(
                    node,
                    Ann::Lit {
                        lit: Literal::pos("x"),
                        mult: 1,
                        weak: true,
                    },
                );
                let kids = if left {
                    vec![inserted, kept]
                } else {
                    vec![kept, inserted]
                };
                *node = Ann::Node { shape, kids, weak };
            }
            (StructuralRule::Contract | StructuralRule::AtomicContract, Some(path)) => {
                let node = r.node(step.index, path);
                let Ann::Node { kids, .. } = node else {
                    return Err(internal("c↓ shape"));
                };
                let mut it = std::mem::take(kids).into_iter();
                *node = Ann::Pending(Box::new(it.next().unwrap()), Box::new(it.next().unwrap()));
                r.resolve(step.index, path.clone())?;
            }
            (rule, _) => {
                return Err(ProofError::Domain(format!(
                    "cannot refine a derivation that already uses {rule}"
                )))
            }
        }
    }
    // ac↓: collapse each atom chain from the inside out.
    let mut current = r.project(true);
    let mut ac = Vec::new();
    for i in 0..r.state.len() {
        let mut chains = Vec::new();
        collect_chains(&r.state[i], &mut vec![], &mut chains);
        let index = r.proj_index(i);
        for (path, mult) in chains {
            let at = r.state[i].proj_path(&path);
            for k in (0..mult - 1).rev() {
                let p: Path = at
                    .iter()
                    .copied()
                    .chain(std::iter::repeat(1).take(k))
                    .collect();
                let mut after = current.clone();
                let lit = after[index]
                    .at(&p)
                    .and_then(|f| f.children().first().map(|c| (*c).clone()));
                after[index] = after[index]
                    .replace_at(&p, lit.ok_or_else(|| internal("atom chain"))?)
                    .unwrap();
                ac.push(Step {
                    rule: StructuralRule::AtomicContract,
                    index,
                    path: Some(p),
                    before: current,
                    after: after.clone(),
                });
                current = after;
            }
        }
    }
    for a in &mut r.state {
        a.reset_mult();
    }
    if current != r.project(false) {
        return Err(internal("atomic contraction stage"));
    }
    // w↓: reinsert weakened material top-down.
    let mut weak = Vec::new();
    for i in 0..r.state.len() {
        if r.state[i].weak() {
            r.state[i].clear_weak();
            let after = r.project(false);
            weak.push(Step {
                rule: StructuralRule::Weaken,
                index: i,
                path: None,
                before: current,
                after: after.clone(),
            });
            current = after;
            continue;
        }
        loop {
            let Some(path) = first_weak(&r.state[i], &mut vec![]) else {
                break;
            };
            let parent = &path[..path.len() - 1];
            let at = r.state[i].proj_path(parent);
            r.node(i, &path).clear_weak();
            let after = r.project(false);
            weak.push(Step {
                rule: StructuralRule::Weaken,
                index: i,
                path: Some(at),
                before: current,
                after: after.clone(),
            });
            current = after;
        }
    }
    if current != s.conclusion {
        return Err(internal("weakening stage misses the conclusion"));
    }
    let out = StagedDerivation {
        head: s.head.clone(),
        stages: vec![
            Stage {
                rules: vec![StructuralRule::Medial],
                steps: r.medial,
            },
            Stage {
                rules: vec![StructuralRule::AtomicContract],
                steps: ac,
            },
            Stage {
                rules: vec![StructuralRule::Weaken],
                steps: weak,
            },
        ],
        conclusion: s.conclusion.clone(),
    };
    check_staged(&out, base)?;
    Ok(out)
}

fn collect_chains(a: &Ann, path: &mut Path, out: &mut Vec<(Path, usize)>) {
    if a.weak() {
        return;
    }
    match a {
        Ann::Lit { mult, .. } if *mult > 1 => out.push((path.clone(), *mult)),
        _ => {
            for (k, c) in a.kids().into_iter().enumerate() {
                path.push(k);
                collect_chains(c, path, out);
                path.pop();
            }
        }
    }
}

/// Preorder-first maximal weakened subtree below a non-weakened node.
fn first_weak(a: &Ann, path: &mut Path) -> Option<Path> {
    for (k, c) in a.kids().into_iter().enumerate() {
        path.push(k);
        if c.weak() {
            return Some(path.clone());
        }
        if let Some(p) = first_weak(c, path) {
            return Some(p);
        }
        path.pop();
    }
    None
}

// ---------------------------------------------------------------------------
// Truth tables
// ---------------------------------------------------------------------------

/// How [`classical_oracle`] evaluates its formula.
#[derive(Clone, Debug)]
pub enum Evaluation<'a> {
    Assignment(&'a BTreeMap<String, bool>),
    /// Tautology status over all assignments of the atoms.
    Exhaustive,
}

/// Read ⅋ as ∨ and ⊗ as ∧; ◦ is neutral. `None` for a vacuous formula.
fn eval(f: &Formula, v: &BTreeMap<String, bool>) -> Result<Option<bool>, FormulaError> {
    Ok(match f {
        Formula::Unit => None,
        Formula::Lit(l) => {
            let x = *v
                .get(l.atom())
                .ok_or_else(|| FormulaError::Domain(format!("atom {} is unassigned", l.atom())))?;
            Some(x == l.is_positive())
        }
        Formula::Par(a, b) | Formula::Tens(a, b) => {
            let or = matches!(f, Formula::Par(..));
            match (eval(a, v)?, eval(b, v)?) {
                (Some(x), Some(y)) => Some(if or { x || y } else { x && y }),
                (x, y) => x.or(y),
            }
        }
        Formula::App(c, _) => {
            return Err(FormulaError::Domain(format!(
                "{} is not a cograph connective",
                c.name()
            )))
        }
    })
}

pub fn classical_oracle(f: &Formula, mode: Evaluation<'_>) -> Result<bool, FormulaError> {
    if !f.is_mll() {
        return Err(FormulaError::Domain(
            "classical evaluation needs a formula built from ⅋ and ⊗".into(),
        ));
    }
    if f.is_vacuous() {
        return Err(FormulaError::Domain("formula has no atoms".into()));
    }
    match mode {
        Evaluation::Assignment(v) => Ok(eval(f, v)?.expect("non-vacuous")),
        Evaluation::Exhaustive => {
            let atoms: Vec<String> = f.atoms().into_iter().collect();
            if atoms.len() > 24 {
                return Err(FormulaError::Domain(
                    "too many atoms for a truth table".into(),
                ));
            }
            for bits in 0u32..(1 << atoms.len()) {
                let v = atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (a.clone(), bits >> i & 1 == 1))
                    .collect();
                if !eval(f, &v)?.expect("non-vacuous") {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Tautology status of a sequent read as the ⅋ of its formulas.
pub fn sequent_tautology(seq: &[Formula]) -> Result<bool, FormulaError> {
    let f = Formula::par_all(seq.to_vec()).ok_or(FormulaError::Empty)?;
    classical_oracle(&f, Evaluation::Exhaustive)
}

// ---------------------------------------------------------------------------
// The six-cycle counterexample
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Found,
    Refuted,
    Unknown,
}

impl From<&Outcome> for Verdict {
    fn from(o: &Outcome) -> Self {
        match o {
            Outcome::Found(_) => Verdict::Found,
            Outcome::Refuted => Verdict::Refuted,
            Outcome::Unknown => Verdict::Unknown,
        }
    }
}

impl From<&GsOutcome> for Verdict {
    fn from(o: &GsOutcome) -> Self {
        match o {
            GsOutcome::Found(_) => Verdict::Found,
            GsOutcome::Refuted => Verdict::Refuted,
            GsOutcome::Unknown => Verdict::Unknown,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub graph: GraphJson,
    pub formula: String,
    pub connective: String,
    pub prime: bool,
    pub mgl0: Verdict,
    pub gs: Verdict,
    pub glk: Verdict,
}

impl CounterexampleReport {
    /// Prime and refuted everywhere.
    pub fn certified(&self) -> bool {
        self.prime
            && [self.mgl0, self.gs, self.glk]
                .iter()
                .all(|v| *v == Verdict::Refuted)
    }
}

/// The six-cycle a – b – c̄ – b̄ – ā – c – a.
pub fn six_cycle() -> LabeledGraph {
    let labels = ["a", "b", "~c", "~b", "~a", "c"];
    let mut g = LabeledGraph::new();
    for (i, l) in labels.iter().enumerate() {
        g.add_vertex(
            VertexId(i as u32),
            Some(Literal::parse(l).expect("literal")),
        )
        .expect("fresh vertex");
    }
    for i in 0..6u32 {
        g.add_edge(VertexId(i), VertexId((i + 1) % 6))
            .expect("edge");
    }
    g
}

/// Build the six-cycle, certify it prime, and refute it by exhaustive
/// search in MGL°, GS and GLK.
pub fn check_counterexample(base: &Base) -> Result<CounterexampleReport, GsError> {
    let g = six_cycle();
    let f = formula_of(&g, base)?;
    let connective: Conn = f
        .connective(base)
        .ok_or_else(|| GsError::Domain("six-cycle formula is atomic".into()))?;
    let seq = [f.clone()];
    let cfg = SearchConfig::default();
    let mgl0 = Verdict::from(&prove_with(&seq, System::Mgl0, base, &cfg));
    let glk = Verdict::from(&prove_with(&seq, System::Glk, base, &cfg));
    let gs = Verdict::from(&gs_search(
        &g,
        &gs_rules(),
        GsSearchConfig::default(),
        base,
    )?);
    Ok(CounterexampleReport {
        prime: is_prime(&g),
        formula: f.to_string(),
        connective: connective.name().to_string(),
        graph: g.to_json(),
        mgl0,
        gs,
        glk,
    })
}
