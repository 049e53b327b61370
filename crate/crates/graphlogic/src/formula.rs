//! Formulas over graphical connectives: syntax, interpretation as graphs,
//! negation, classification, equivalence and quasi-subformulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;

use crate::decomp::{self, Base, Conn, DecompositionTree};
use crate::error::FormulaError;
use crate::graph::{is_atom_name, GraphContext, LabeledGraph, Literal, VertexId};
use crate::perm;

/// A formula in negation normal form: negation only on literals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Unit,
    Lit(Literal),
    Par(Box<Formula>, Box<Formula>),
    Tens(Box<Formula>, Box<Formula>),
    /// Application of a prime connective (never ⅋ or ⊗).
    App(Conn, Vec<Formula>),
}

/// Position of a subformula: child indices from the root.
pub type Path = Vec<usize>;

impl Formula {
    pub fn lit(s: &str) -> Self {
        Formula::Lit(Literal::parse(s).expect("valid literal"))
    }

    pub fn par(a: Formula, b: Formula) -> Self {
        Formula::Par(Box::new(a), Box::new(b))
    }

    pub fn tens(a: Formula, b: Formula) -> Self {
        Formula::Tens(Box::new(a), Box::new(b))
    }

    /// Apply any connective; binary ⅋/⊗ become the dedicated variants.
    pub fn apply(c: &Conn, mut args: Vec<Formula>) -> Result<Self, FormulaError> {
        if args.len() != c.arity() {
            return Err(FormulaError::Arity {
                name: c.name().into(),
                expected: c.arity(),
                got: args.len(),
            });
        }
        Ok(if c.is_par() || c.is_tens() {
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            if c.is_par() {
                Formula::par(a, b)
            } else {
                Formula::tens(a, b)
            }
        } else {
            Formula::App(c.clone(), args)
        })
    }

    /// Left-nested ⅋ of a non-empty list.
    pub fn par_all(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::par)
    }

    /// Left-nested ⊗ of a non-empty list.
    pub fn tens_all(items: Vec<Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::tens)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Unit | Formula::Lit(_) => vec![],
            Formula::Par(a, b) | Formula::Tens(a, b) => vec![a, b],
            Formula::App(_, args) => args.iter().collect(),
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Formula> {
        match self {
            Formula::Unit | Formula::Lit(_) => vec![],
            Formula::Par(a, b) | Formula::Tens(a, b) => vec![a, b],
            Formula::App(_, args) => args.iter_mut().collect(),
        }
    }

    /// Main connective, with ⅋/⊗ looked up in `base`.
    pub fn connective(&self, base: &Base) -> Option<Conn> {
        match self {
            Formula::Par(..) => Some(base.par()),
            Formula::Tens(..) => Some(base.tens()),
            Formula::App(c, _) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Formula::Unit)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Lit(_))
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Formula::Lit(l) => Some(l),
            _ => None,
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at(rest)),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self
                .children_mut()
                .into_iter()
                .nth(i)
                .and_then(|c| c.at_mut(rest)),
        }
    }

    /// Copy with the subformula at `path` replaced.
    pub fn replace_at(&self, path: &[usize], new: Formula) -> Option<Formula> {
        let mut out = self.clone();
        *out.at_mut(path)? = new;
        Some(out)
    }

    /// Literal occurrences in left-to-right order.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Literal>) {
            match f {
                Formula::Lit(l) => out.push(l),
                _ => f.children().into_iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn literal_count(&self) -> usize {
        self.literals().len()
    }

    pub fn unit_count(&self) -> usize {
        match self {
            Formula::Unit => 1,
            Formula::Lit(_) => 0,
            _ => self.children().into_iter().map(|c| c.unit_count()).sum(),
        }
    }

    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Unit | Formula::Lit(_) => 0,
            _ => {
                1 + self
                    .children()
                    .into_iter()
                    .map(|c| c.connective_count())
                    .sum::<usize>()
            }
        }
    }

    /// Units plus connectives plus twice the literals.
    pub fn size(&self) -> usize {
        self.unit_count() + self.connective_count() + 2 * self.literal_count()
    }

    pub fn is_vacuous(&self) -> bool {
        self.literal_count() == 0
    }

    pub fn is_unit_free(&self) -> bool {
        self.unit_count() == 0
    }

    /// Non-vacuous, and every vacuous subformula is exactly ◦.
    pub fn is_pure(&self) -> bool {
        fn ok(f: &Formula) -> bool {
            match f {
                Formula::Unit | Formula::Lit(_) => true,
                _ => !f.is_vacuous() && f.children().into_iter().all(ok),
            }
        }
        !self.is_vacuous() && ok(self)
    }

    pub fn is_mll(&self) -> bool {
        match self {
            Formula::App(..) => false,
            _ => self.children().into_iter().all(|c| c.is_mll()),
        }
    }

    pub fn classify(&self) -> Classification {
        Classification {
            unit_free: self.is_unit_free(),
            vacuous: self.is_vacuous(),
            pure: self.is_pure(),
            mll: self.is_mll(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.literals()
            .into_iter()
            .map(|l| l.atom().to_string())
            .collect()
    }

    /// Paths of every subformula, in preorder.
    pub fn positions(&self) -> Vec<Path> {
        let mut out = Vec::new();
        fn go(f: &Formula, path: &mut Path, out: &mut Vec<Path>) {
            out.push(path.clone());
            for (i, c) in f.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub unit_free: bool,
    pub vacuous: bool,
    pub pure: bool,
    pub mll: bool,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Unit => f.write_str("o"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Par(a, b) => {
                write!(f, "{a} | ")?;
                if matches!(**b, Formula::Par(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::Tens(a, b) => {
                let wrap = |x: &Formula, right: bool| match x {
                    Formula::Par(..) => true,
                    Formula::Tens(..) => right,
                    _ => false,
                };
                if wrap(a, false) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(" & ")?;
                if wrap(b, true) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::App(c, args) => {
                write!(f, "{}<", c.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn render(f: &Formula) -> String {
    f.to_string()
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    base: &'a Base,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.term()?;
        while self.eat('|') {
            left = Formula::par(left, self.term()?);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.unary()?;
        while self.eat('&') {
            left = Formula::tens(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some('~') => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(negate(&inner, self.base))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                let name = self.ident();
                if name == "o" {
                    Ok(Formula::Unit)
                } else if is_atom_name(name) {
                    Ok(Formula::Lit(Literal::pos(name)))
                } else {
                    self.pos = start;
                    self.err(format!("invalid atom `{name}`"))
                }
            }
            Some(c) if c.is_ascii_uppercase() => {
                let start = self.pos;
                let name = self.ident();
                let conn = self
                    .base
                    .get(name)
                    .ok_or_else(|| FormulaError::UnknownConnective(name.into()))?;
                if !self.eat('<') {
                    return self.err("expected `<` after connective name");
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat('>') {
                    return self.err("expected `>` or `,`");
                }
                let _ = start;
                Formula::apply(&conn, args)
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a formula; negation of compound formulas is pushed to the literals.
pub fn parse(text: &str, base: &Base) -> Result<Formula, FormulaError> {
    let mut p = Parser { text, pos: 0, base };
    let f = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parse a sequent: formulas separated by commas at depth zero, or by newlines.
pub fn parse_sequent(text: &str, base: &Base) -> Result<Vec<Formula>, FormulaError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut push = |s: &str, offset: usize| -> Result<(), FormulaError> {
        if s.trim().is_empty() {
            return Ok(());
        }
        parse(s, base).map(|f| out.push(f)).map_err(|e| match e {
            FormulaError::Syntax { pos, msg } => FormulaError::Syntax {
                pos: pos + offset,
                msg,
            },
            other => other,
        })
    };
    for &(i, c) in &bytes {
        match c {
            '<' | '(' => depth += 1,
            '>' | ')' => depth -= 1,
            ',' | '\n' if depth == 0 => {
                push(&text[start..i], start)?;
                start = i + 1;
            }
            _ => {}
        }
    }
    push(&text[start..], start)?;
    Ok(out)
}

/// Linear negation using each connective's registered pairing with its dual.
pub fn negate(f: &Formula, base: &Base) -> Formula {
    match f {
        Formula::Unit => Formula::Unit,
        Formula::Lit(l) => Formula::Lit(l.negate()),
        Formula::Par(a, b) => Formula::tens(negate(a, base), negate(b, base)),
        Formula::Tens(a, b) => Formula::par(negate(a, base), negate(b, base)),
        Formula::App(c, args) => {
            let dual = base.dual_of(c);
            let negated: Vec<Formula> = c.sigma().iter().map(|&i| negate(&args[i], base)).collect();
            Formula::App(dual, negated)
        }
    }
}

/// Graph of a formula; vertex ids `offset..` number literal occurrences left to right.
pub fn graph_of_from(f: &Formula, offset: u32) -> LabeledGraph {
    let (g, _) = build_graph(f, offset, None);
    g
}

pub fn graph_of(f: &Formula) -> LabeledGraph {
    graph_of_from(f, 0)
}

fn build_graph(f: &Formula, next: u32, hole: Option<&[usize]>) -> (LabeledGraph, u32) {
    match f {
        _ if hole == Some(&[][..]) => (LabeledGraph::singleton(VertexId(next), None), next + 1),
        Formula::Unit => (LabeledGraph::new(), next),
        Formula::Lit(l) => (
            LabeledGraph::singleton(VertexId(next), Some(l.clone())),
            next + 1,
        ),
        _ => {
            let mut parts = Vec::new();
            let mut n = next;
            for (i, c) in f.children().into_iter().enumerate() {
                let sub_hole = match hole {
                    Some(h) if h[0] == i => Some(&h[1..]),
                    _ => None,
                };
                let (g, m) = build_graph(c, n, sub_hole);
                parts.push(g);
                n = m;
            }
            let template = match f {
                Formula::Par(..) => LabeledGraph::unlabeled(2, &[]),
                Formula::Tens(..) => LabeledGraph::unlabeled(2, &[(0, 1)]),
                Formula::App(c, _) => c.graph(),
                _ => unreachable!(),
            };
            (template.compose_via(&parts).expect("parts are disjoint"), n)
        }
    }
}

/// A formula with a hole at a leaf position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaContext {
    skeleton: Formula,
    hole: Path,
}

impl FormulaContext {
    /// The subformula at `hole` must be a literal or ◦; it is ignored.
    pub fn new(skeleton: Formula, hole: Path) -> Result<Self, FormulaError> {
        match skeleton.at(&hole) {
            Some(Formula::Unit | Formula::Lit(_)) => Ok(FormulaContext { skeleton, hole }),
            Some(_) => Err(FormulaError::Domain(
                "hole must sit at a leaf position".into(),
            )),
            None => Err(FormulaError::Domain("hole path out of range".into())),
        }
    }

    pub fn hole(&self) -> &[usize] {
        &self.hole
    }

    pub fn is_trivial(&self) -> bool {
        self.hole.is_empty()
    }

    pub fn plug(&self, f: &Formula) -> Formula {
        self.skeleton
            .replace_at(&self.hole, f.clone())
            .expect("hole path valid")
    }

    /// Graph context; the hole gets the vertex id following the literal occurrences.
    pub fn graph(&self) -> GraphContext {
        let (g, _) = build_graph(&self.skeleton, 0, Some(&self.hole));
        let hole = g
            .vertices()
            .find(|v| g.labels()[v].is_none())
            .expect("hole vertex");
        GraphContext::new(g, hole).expect("one unlabeled vertex")
    }
}

impl fmt::Display for FormulaContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marked = self
            .skeleton
            .replace_at(&self.hole, Formula::Lit(Literal::pos("hole")))
            .unwrap();
        write!(f, "{}", marked.to_string().replacen("hole", "[]", 1))
    }
}

/// Turn a decomposition tree into a formula, mapping each leaf through `leaf`.
/// ⅋ and ⊗ nodes become left-nested binary applications.
pub fn formula_of_tree(
    t: &DecompositionTree,
    leaf: &mut dyn FnMut(VertexId, Option<&Literal>) -> Formula,
) -> Formula {
    match t {
        DecompositionTree::Leaf { vertex, label } => leaf(*vertex, label.as_ref()),
        DecompositionTree::Par(kids) => {
            Formula::par_all(kids.iter().map(|k| formula_of_tree(k, leaf)).collect()).unwrap()
        }
        DecompositionTree::Tens(kids) => {
            Formula::tens_all(kids.iter().map(|k| formula_of_tree(k, leaf)).collect()).unwrap()
        }
        DecompositionTree::Prime(c, kids) => Formula::App(
            c.clone(),
            kids.iter().map(|k| formula_of_tree(k, leaf)).collect(),
        ),
    }
}

/// Canonical unit-free formula of a non-empty labeled graph, with the vertex
/// of each literal occurrence in left-to-right order.
pub fn formula_of_with_vertices(
    g: &LabeledGraph,
    base: &Base,
) -> Result<(Formula, Vec<VertexId>), FormulaError> {
    if g.is_empty() {
        return Err(FormulaError::Empty);
    }
    if let Some(v) = g.vertices().find(|v| g.label(*v).is_none()) {
        return Err(crate::error::GraphError::Unlabeled(v).into());
    }
    let t = decomp::canonical_form(&decomp::decompose(g, base)?);
    let mut order = Vec::new();
    let f = formula_of_tree(&t, &mut |v, l| {
        order.push(v);
        Formula::Lit(l.expect("labeled").clone())
    });
    Ok((f, order))
}

pub fn formula_of(g: &LabeledGraph, base: &Base) -> Result<Formula, FormulaError> {
    formula_of_with_vertices(g, base).map(|(f, _)| f)
}

/// Normal form for ≡: flattened, sorted ⅋/⊗ and Sym-minimal argument lists.
/// Units are kept, so ◦⊗◦ and ◦⅋◦ stay apart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalForm {
    Unit,
    Lit(Literal),
    Par(Vec<NormalForm>),
    Tens(Vec<NormalForm>),
    App(String, Vec<NormalForm>),
}

pub fn normal_form(f: &Formula) -> NormalForm {
    match f {
        Formula::Unit => NormalForm::Unit,
        Formula::Lit(l) => NormalForm::Lit(l.clone()),
        Formula::Par(..) | Formula::Tens(..) => {
            let is_par = matches!(f, Formula::Par(..));
            let mut flat = Vec::new();
            for c in f.children() {
                match normal_form(c) {
                    NormalForm::Par(xs) if is_par => flat.extend(xs),
                    NormalForm::Tens(xs) if !is_par => flat.extend(xs),
                    x => flat.push(x),
                }
            }
            flat.sort();
            if is_par {
                NormalForm::Par(flat)
            } else {
                NormalForm::Tens(flat)
            }
        }
        Formula::App(c, args) => {
            let kids: Vec<NormalForm> = args.iter().map(normal_form).collect();
            let best = c
                .sym()
                .iter()
                .map(|s| perm::pick(&kids, s))
                .min()
                .unwrap_or(kids);
            NormalForm::App(c.name().to_string(), best)
        }
    }
}

/// Decide `f ≡ g`.
pub fn equiv(f: &Formula, g: &Formula) -> bool {
    normal_form(f) == normal_form(g)
}

/// Quasi-subformulas of `f`, stopping once `bound` formulas are collected.
pub fn quasi_subformulas(f: &Formula, base: &Base, bound: usize) -> BTreeSet<Formula> {
    let mut memo: BTreeMap<Formula, Vec<Formula>> = BTreeMap::new();
    let all = qsf(f, base, bound, &mut memo);
    all.into_iter().take(bound).collect()
}

fn qsf(
    f: &Formula,
    base: &Base,
    bound: usize,
    memo: &mut BTreeMap<Formula, Vec<Formula>>,
) -> Vec<Formula> {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let mut out: BTreeSet<Formula> = BTreeSet::from([f.clone()]);
    let Some(c) = f.connective(base) else {
        return vec![f.clone()];
    };
    let kids: Vec<&Formula> = f.children();
    let per_child: Vec<Vec<Formula>> = kids.iter().map(|k| qsf(k, base, bound, memo)).collect();
    let n = kids.len();
    'subsets: for mask in 1u32..(1 << n) {
        let slots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let template = restrict_template(&c, &slots, base);
        let choices: Vec<&Vec<Formula>> = slots.iter().map(|&i| &per_child[i]).collect();
        for combo in choices
            .iter()
            .map(|v| v.iter())
            .collect::<Vec<_>>()
            .into_iter()
            .multi_cartesian_product()
        {
            if out.len() >= bound {
                break 'subsets;
            }
            let args: Vec<Formula> = combo.into_iter().cloned().collect();
            out.insert(instantiate(&template, &args));
        }
    }
    let v: Vec<Formula> = out.into_iter().collect();
    memo.insert(f.clone(), v.clone());
    v
}

/// Tree of the connective restricted to `slots`; leaf vertex `i` stands for the i-th kept slot.
pub(crate) fn restrict_template(c: &Conn, slots: &[usize], base: &Base) -> DecompositionTree {
    let edges: Vec<(usize, usize)> = slots
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| {
            slots
                .iter()
                .enumerate()
                .skip(a + 1)
                .filter(move |(_, &j)| c.has_edge(i, j))
                .map(move |(b, _)| (a, b))
        })
        .collect();
    let g = LabeledGraph::unlabeled(slots.len(), &edges);
    decomp::decompose(&g, base).expect("restriction of a small connective decomposes")
}

pub(crate) fn instantiate(t: &DecompositionTree, args: &[Formula]) -> Formula {
    formula_of_tree(t, &mut |v, _| args[v.0 as usize].clone())
}
