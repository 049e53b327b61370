//! Prime graphs, graphical connectives, the connective base and modular
//! decomposition with canonical forms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{DecompError, GraphError};
use crate::graph::{LabeledGraph, Literal, VertexId, VertexMap};
use crate::perm::{self, Perm};

/// Dense symmetric adjacency matrix.
pub type Adj = Vec<Vec<bool>>;

pub const DEFAULT_ARITY_CAP: usize = 8;
pub const PAR: &str = "Par";
pub const TENS: &str = "Tens";

pub fn adj_from_edges(n: usize, edges: &[(usize, usize)]) -> Adj {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

pub fn complement_adj(adj: &Adj) -> Adj {
    let n = adj.len();
    (0..n)
        .map(|i| (0..n).map(|j| i != j && !adj[i][j]).collect())
        .collect()
}

fn edge_list(adj: &Adj) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..adj.len() {
        for j in i + 1..adj.len() {
            if adj[i][j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// Visit every `s` with `a[i][j] == b[s[i]][s[j]]`, in lexicographic order of `s`.
/// The visitor returns `false` to stop early.
pub fn for_each_isomorphism(a: &Adj, b: &Adj, mut visit: impl FnMut(&Perm) -> bool) {
    let n = a.len();
    if b.len() != n {
        return;
    }
    let deg = |m: &Adj, i: usize| m[i].iter().filter(|&&x| x).count();
    let da: Vec<usize> = (0..n).map(|i| deg(a, i)).collect();
    let db: Vec<usize> = (0..n).map(|i| deg(b, i)).collect();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        a: &Adj,
        b: &Adj,
        da: &[usize],
        db: &[usize],
        image: &mut Perm,
        used: &mut [bool],
        visit: &mut dyn FnMut(&Perm) -> bool,
    ) -> bool {
        let n = a.len();
        if i == n {
            return visit(image);
        }
        for t in 0..n {
            if used[t] || da[i] != db[t] {
                continue;
            }
            if (0..i).any(|j| a[i][j] != b[t][image[j]]) {
                continue;
            }
            image[i] = t;
            used[t] = true;
            let go_on = go(i + 1, a, b, da, db, image, used, visit);
            used[t] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    go(0, a, b, &da, &db, &mut image, &mut used, &mut visit);
}

fn check_cap(n: usize, cap: usize) -> Result<(), DecompError> {
    if n > cap {
        Err(DecompError::Capacity { arity: n, cap })
    } else {
        Ok(())
    }
}

/// Automorphisms of an ordered graph: all `σ` with `C⟨a_1..a_n⟩ = C⟨a_σ(1)..a_σ(n)⟩`.
pub fn symmetry_group_of(adj: &Adj, cap: usize) -> Result<Vec<Perm>, DecompError> {
    check_cap(adj.len(), cap)?;
    let mut out = Vec::new();
    for_each_isomorphism(adj, adj, |p| {
        out.push(p.clone());
        true
    });
    Ok(out)
}

/// All `σ` with `q(i,j) ⟺ ¬c(σ(i),σ(j))`: the pairings realising `¬C⟨a⟩ = Q⟨ā_σ⟩`.
pub fn dualizing_pairings(c: &Adj, q: &Adj, cap: usize) -> Result<Vec<Perm>, DecompError> {
    check_cap(c.len(), cap)?;
    let mut out = Vec::new();
    for_each_isomorphism(q, &complement_adj(c), |p| {
        out.push(p.clone());
        true
    });
    Ok(out)
}

/// Dualizing symmetries of an ordered graph (empty unless self-dual).
pub fn dualizing_symmetries_of(adj: &Adj, cap: usize) -> Result<Vec<Perm>, DecompError> {
    dualizing_pairings(adj, adj, cap)
}

/// Order of vertices minimising the lower-triangle adjacency code, read row by row.
/// Returns `(order, code)` where `order[pos]` is the vertex placed at `pos`.
pub fn canonical_order(adj: &Adj) -> (Vec<usize>, Vec<bool>) {
    // At each position only candidates with the least row can lead to the
    // minimum, since rows of equal length are compared in sequence.
    fn go(
        adj: &Adj,
        placed: &mut Vec<usize>,
        rows: &mut Vec<Vec<bool>>,
        best: &mut Option<(Vec<Vec<bool>>, Vec<usize>)>,
    ) {
        let n = adj.len();
        if let Some((b, _)) = best.as_ref() {
            if rows.as_slice() > &b[..rows.len()] {
                return;
            }
        }
        if placed.len() == n {
            if best.as_ref().is_none_or(|(b, _)| *rows < *b) {
                *best = Some((rows.clone(), placed.clone()));
            }
            return;
        }
        let candidates: Vec<(usize, Vec<bool>)> = (0..n)
            .filter(|v| !placed.contains(v))
            .map(|v| (v, placed.iter().map(|&p| adj[v][p]).collect()))
            .collect();
        let min_row = candidates
            .iter()
            .map(|(_, r)| r.clone())
            .min()
            .expect("candidate");
        for (v, row) in candidates {
            if row == min_row {
                placed.push(v);
                rows.push(min_row.clone());
                go(adj, placed, rows, best);
                rows.pop();
                placed.pop();
            }
        }
    }
    let mut best = None;
    go(adj, &mut Vec::new(), &mut Vec::new(), &mut best);
    let (rows, order) = best.expect("at least one order");
    (order, rows.into_iter().flatten().collect())
}

fn hex_code(n: usize, bits: &[bool]) -> String {
    let mut s = format!("{n}_");
    for chunk in bits.chunks(4) {
        let mut nib = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                nib |= 8 >> i;
            }
        }
        s.push(char::from_digit(nib as u32, 16).unwrap());
    }
    s
}

/// A prime graph with an ordered vertex list, used as an n-ary connective.
#[derive(Debug)]
pub struct Connective {
    name: String,
    adj: Adj,
    sym: Vec<Perm>,
    dsym: Vec<Perm>,
    dual: String,
    sigma: Perm,
    /// `canon[pos]` is the own vertex placed at canonical position `pos`.
    canon: Vec<usize>,
    code: String,
}

pub type Conn = Arc<Connective>;

impl Connective {
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn arity(&self) -> usize {
        self.adj.len()
    }
    pub fn adj(&self) -> &Adj {
        &self.adj
    }
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }
    pub fn sym(&self) -> &[Perm] {
        &self.sym
    }
    pub fn dsym(&self) -> &[Perm] {
        &self.dsym
    }
    pub fn dual_name(&self) -> &str {
        &self.dual
    }
    /// Fixed pairing with the dual: `¬C⟨a⟩ = C̄⟨ā_σ(1),…,ā_σ(n)⟩`.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }
    pub fn is_self_dual(&self) -> bool {
        self.dual == self.name
    }
    pub fn is_par(&self) -> bool {
        self.name == PAR
    }
    pub fn is_tens(&self) -> bool {
        self.name == TENS
    }
    pub fn is_prime_connective(&self) -> bool {
        !self.is_par() && !self.is_tens()
    }
    /// Canonical adjacency code shared by every graph similar to this one.
    pub fn code(&self) -> &str {
        &self.code
    }
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_list(&self.adj)
    }
    /// Unlabeled graph on `0..n`.
    pub fn graph(&self) -> LabeledGraph {
        LabeledGraph::unlabeled(self.arity(), &self.edges())
    }
}

impl PartialEq for Connective {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}
impl Eq for Connective {}
impl PartialOrd for Connective {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Connective {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}
impl Hash for Connective {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}
impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Default)]
struct BaseInner {
    by_name: BTreeMap<String, Conn>,
    by_code: HashMap<String, String>,
}

/// Registry of connectives: one per similarity class, each paired with its dual.
/// Registration takes a write lock; lookups only read.
#[derive(Debug)]
pub struct Base {
    inner: RwLock<BaseInner>,
    cap: usize,
}

impl Default for Base {
    fn default() -> Self {
        Self::new()
    }
}

/// Serialized connective entry.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConnectiveJson {
    pub name: String,
    pub arity: usize,
    pub edges: Vec<[usize; 2]>,
    pub dual: String,
    pub sigma: Perm,
    pub sym: Vec<Perm>,
    pub dsym: Vec<Perm>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BaseJson {
    pub arity_cap: usize,
    pub connectives: Vec<ConnectiveJson>,
}

impl Base {
    /// The standard base: ⅋, ⊗, P4, Bull, Path5 and the dual of Path5.
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_ARITY_CAP)
    }

    pub fn with_cap(cap: usize) -> Self {
        let base = Base {
            inner: RwLock::new(BaseInner::default()),
            cap: cap.max(5),
        };
        base.install_binary();
        let p4 = adj_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let bull = adj_from_edges(5, &[(0, 1), (1, 2), (2, 3), (4, 1), (4, 2)]);
        let path5 = adj_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        for (name, adj) in [("P4", p4), ("Bull", bull), ("Path5", path5)] {
            base.register_named(name, adj)
                .expect("standard connectives are prime");
        }
        base
    }

    /// A process-wide base used where no base is supplied (isomorphism tests).
    pub fn shared() -> &'static Base {
        static SHARED: OnceLock<Base> = OnceLock::new();
        SHARED.get_or_init(|| Base::with_cap(12))
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn install_binary(&self) {
        let swap = vec![vec![0, 1], vec![1, 0]];
        let mk = |name: &str, dual: &str, edge: bool| Connective {
            name: name.into(),
            adj: adj_from_edges(2, if edge { &[(0, 1)] } else { &[] }),
            sym: swap.clone(),
            dsym: Vec::new(),
            dual: dual.into(),
            sigma: perm::identity(2),
            canon: perm::identity(2),
            code: String::new(),
        };
        let mut inner = self.inner.write().expect("base lock");
        inner
            .by_name
            .insert(PAR.into(), Arc::new(mk(PAR, TENS, false)));
        inner
            .by_name
            .insert(TENS.into(), Arc::new(mk(TENS, PAR, true)));
    }

    pub fn get(&self, name: &str) -> Option<Conn> {
        self.inner
            .read()
            .expect("base lock")
            .by_name
            .get(name)
            .cloned()
    }

    pub fn par(&self) -> Conn {
        self.get(PAR).expect("par registered")
    }

    pub fn tens(&self) -> Conn {
        self.get(TENS).expect("tens registered")
    }

    pub fn dual_of(&self, c: &Connective) -> Conn {
        self.get(&c.dual)
            .expect("dual registered with its connective")
    }

    pub fn connectives(&self) -> Vec<Conn> {
        self.inner
            .read()
            .expect("base lock")
            .by_name
            .values()
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("base lock").by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sym(C) with the arity cap enforced.
    pub fn symmetry_group(&self, c: &Connective) -> Result<Vec<Perm>, DecompError> {
        check_cap(c.arity(), self.cap)?;
        Ok(c.sym.clone())
    }

    /// Dsym(C) with the arity cap enforced.
    pub fn dualizing_symmetries(&self, c: &Connective) -> Result<Vec<Perm>, DecompError> {
        check_cap(c.arity(), self.cap)?;
        Ok(c.dsym.clone())
    }

    /// Register a prime graph under a given name with its given vertex order.
    pub fn register_named(&self, name: &str, adj: Adj) -> Result<Conn, DecompError> {
        if !is_prime_adj(&adj) {
            return Err(DecompError::NotPrime);
        }
        check_cap(adj.len(), self.cap)?;
        let (canon, code_bits) = canonical_order(&adj);
        let code = hex_code(adj.len(), &code_bits);
        let existing = self
            .inner
            .read()
            .expect("base lock")
            .by_code
            .get(&code)
            .cloned();
        if let Some(existing) = existing {
            return if existing == name {
                Ok(self.get(name).unwrap())
            } else {
                Err(DecompError::Format(format!(
                    "`{name}` is similar to registered `{existing}`"
                )))
            };
        }
        self.install_pair(name.to_string(), adj, canon, code)
    }

    /// Find or register the connective similar to `adj` (a prime graph).
    /// Returns the connective and `m` with `m[i]` the connective vertex matched to vertex `i`.
    pub fn lookup_or_register(&self, adj: &Adj) -> Result<(Conn, Vec<usize>), DecompError> {
        check_cap(adj.len(), self.cap)?;
        let (order, code_bits) = canonical_order(adj);
        let code = hex_code(adj.len(), &code_bits);
        let found = self
            .inner
            .read()
            .expect("base lock")
            .by_code
            .get(&code)
            .cloned();
        let conn = match found {
            Some(name) => self.get(&name).unwrap(),
            None => {
                let canon_adj: Adj = (0..adj.len())
                    .map(|i| (0..adj.len()).map(|j| adj[order[i]][order[j]]).collect())
                    .collect();
                let name = format!("Prime_{code}");
                self.install_pair(name, canon_adj, perm::identity(adj.len()), code)?
            }
        };
        // vertex order[pos] sits at canonical position pos, i.e. at conn vertex canon[pos]
        let mut m = vec![0; adj.len()];
        for pos in 0..adj.len() {
            m[order[pos]] = conn.canon[pos];
        }
        Ok((conn, m))
    }

    fn install_pair(
        &self,
        name: String,
        adj: Adj,
        canon: Vec<usize>,
        code: String,
    ) -> Result<Conn, DecompError> {
        let sym = symmetry_group_of(&adj, self.cap)?;
        let comp = complement_adj(&adj);
        let (dual_canon, dual_bits) = canonical_order(&comp);
        let dual_code = hex_code(adj.len(), &dual_bits);
        let mut inner = self.inner.write().expect("base lock");
        if let Some(n) = inner.by_code.get(&code) {
            // another writer got here first
            return Ok(inner.by_name[n].clone());
        }
        if dual_code == code {
            let dsym = dualizing_symmetries_of(&adj, self.cap)?;
            let sigma = dsym
                .iter()
                .find(|s| perm::is_identity(&perm::compose(s, s)))
                .or_else(|| dsym.first())
                .cloned()
                .ok_or_else(|| {
                    DecompError::Format("self-dual graph without dualizing symmetry".into())
                })?;
            let c = Arc::new(Connective {
                name: name.clone(),
                adj,
                sym,
                dsym,
                dual: name.clone(),
                sigma,
                canon,
                code: code.clone(),
            });
            inner.by_code.insert(code, name.clone());
            inner.by_name.insert(name, c.clone());
            return Ok(c);
        }
        let (dual_name, dual_adj, dual_canon) = match inner.by_code.get(&dual_code) {
            Some(n) => {
                let d = &inner.by_name[n];
                (n.clone(), d.adj.clone(), d.canon.clone())
            }
            None => {
                let dadj: Adj = (0..comp.len())
                    .map(|i| {
                        (0..comp.len())
                            .map(|j| comp[dual_canon[i]][dual_canon[j]])
                            .collect()
                    })
                    .collect();
                (
                    format!("Prime_{dual_code}"),
                    dadj,
                    perm::identity(comp.len()),
                )
            }
        };
        let dual_sym = symmetry_group_of(&dual_adj, self.cap)?;
        // the lexicographically smaller name owns the least pairing; the other gets its inverse
        let (first_adj, second_adj) = if name < dual_name {
            (&adj, &dual_adj)
        } else {
            (&dual_adj, &adj)
        };
        let pairing = dualizing_pairings(first_adj, second_adj, self.cap)?
            .into_iter()
            .next()
            .ok_or_else(|| DecompError::Format("complement is not similar to its dual".into()))?;
        let (sigma, dual_sigma) = if name < dual_name {
            (pairing.clone(), perm::inverse(&pairing))
        } else {
            (perm::inverse(&pairing), pairing)
        };
        let c = Arc::new(Connective {
            name: name.clone(),
            adj,
            sym,
            dsym: Vec::new(),
            dual: dual_name.clone(),
            sigma,
            canon,
            code: code.clone(),
        });
        let d = Arc::new(Connective {
            name: dual_name.clone(),
            adj: dual_adj,
            sym: dual_sym,
            dsym: Vec::new(),
            dual: name.clone(),
            sigma: dual_sigma,
            canon: dual_canon,
            code: dual_code.clone(),
        });
        inner.by_code.insert(code, name.clone());
        inner.by_code.insert(dual_code, dual_name.clone());
        inner.by_name.insert(name, c.clone());
        inner.by_name.insert(dual_name, d);
        Ok(c)
    }

    pub fn to_json(&self) -> BaseJson {
        BaseJson {
            arity_cap: self.cap,
            connectives: self
                .connectives()
                .iter()
                .map(|c| ConnectiveJson {
                    name: c.name.clone(),
                    arity: c.arity(),
                    edges: c.edges().into_iter().map(|(a, b)| [a, b]).collect(),
                    dual: c.dual.clone(),
                    sigma: c.sigma.clone(),
                    sym: c.sym.clone(),
                    dsym: c.dsym.clone(),
                })
                .collect(),
        }
    }

    /// Rebuild a base from its export. Standard connectives are always present;
    /// other entries are re-registered and their recorded data verified.
    pub fn from_json(json: &BaseJson) -> Result<Self, DecompError> {
        let base = Base::with_cap(json.arity_cap);
        for c in &json.connectives {
            if c.edges
                .iter()
                .any(|[a, b]| *a >= c.arity || *b >= c.arity || a == b)
            {
                return Err(DecompError::Format(format!(
                    "bad edge list for `{}`",
                    c.name
                )));
            }
            let adj = adj_from_edges(
                c.arity,
                &c.edges.iter().map(|[a, b]| (*a, *b)).collect::<Vec<_>>(),
            );
            let conn = match base.get(&c.name) {
                Some(existing) => existing,
                None if c.arity == 2 => {
                    return Err(DecompError::Format(format!("unknown binary `{}`", c.name)))
                }
                None => base.register_named(&c.name, adj.clone())?,
            };
            if conn.adj != adj
                || conn.dual != c.dual
                || conn.sigma != c.sigma
                || conn.sym != c.sym
                || conn.dsym != c.dsym
            {
                return Err(DecompError::Format(format!(
                    "recorded data for `{}` does not match",
                    c.name
                )));
            }
        }
        Ok(base)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("base serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, DecompError> {
        let json: BaseJson =
            serde_json::from_str(text).map_err(|e| DecompError::Format(e.to_string()))?;
        Self::from_json(&json)
    }
}

/// Dense view of a labeled graph: vertex ids in order plus adjacency.
struct Dense<'g> {
    g: &'g LabeledGraph,
    ids: Vec<VertexId>,
    adj: Adj,
}

impl<'g> Dense<'g> {
    fn new(g: &'g LabeledGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut adj = vec![vec![false; ids.len()]; ids.len()];
        for (a, b) in g.edges() {
            adj[index[&a]][index[&b]] = true;
            adj[index[&b]][index[&a]] = true;
        }
        Dense { g, ids, adj }
    }
}

/// Components of the subgraph induced by `set` in `adj` (or its complement).
fn components_within(adj: &Adj, set: &[usize], complement: bool) -> Vec<Vec<usize>> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for &s in set {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in set {
                if w != v && adj[v][w] != complement && seen.insert(w) {
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Least module of `adj[set]` containing `seed`.
fn module_closure(adj: &Adj, set: &[usize], seed: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; adj.len()];
    let mut w: Vec<usize> = seed.to_vec();
    for &x in seed {
        inside[x] = true;
    }
    loop {
        let splitter = set.iter().copied().find(|&z| {
            !inside[z] && {
                let first = adj[w[0]][z];
                w.iter().any(|&x| adj[x][z] != first)
            }
        });
        match splitter {
            Some(z) => {
                inside[z] = true;
                w.push(z);
            }
            None => break,
        }
    }
    w.sort_unstable();
    w
}

/// Maximal strong modules of a connected, co-connected induced subgraph.
fn prime_partition(adj: &Adj, set: &[usize]) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; adj.len()];
    let mut parts = Vec::new();
    for &v in set {
        if assigned[v] {
            continue;
        }
        let mut part: BTreeSet<usize> = BTreeSet::from([v]);
        for &u in set {
            if u != v && !part.contains(&u) {
                let m = module_closure(adj, set, &[v, u]);
                if m.len() < set.len() {
                    part.extend(m);
                }
            }
        }
        for &x in &part {
            assigned[x] = true;
        }
        parts.push(part.into_iter().collect());
    }
    parts
}

/// The partition of `V(g)` at the root of its modular decomposition, with the root kind.
pub fn root_partition(g: &LabeledGraph) -> (RootKind, Vec<BTreeSet<VertexId>>) {
    let d = Dense::new(g);
    let set: Vec<usize> = (0..d.ids.len()).collect();
    let (kind, parts) = root_split(&d.adj, &set);
    let to_ids = |p: Vec<usize>| p.into_iter().map(|i| d.ids[i]).collect();
    (kind, parts.into_iter().map(to_ids).collect())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RootKind {
    Single,
    Par,
    Tens,
    Prime,
}

fn root_split(adj: &Adj, set: &[usize]) -> (RootKind, Vec<Vec<usize>>) {
    if set.len() <= 1 {
        return (RootKind::Single, vec![set.to_vec()]);
    }
    let comps = components_within(adj, set, false);
    if comps.len() > 1 {
        return (RootKind::Par, comps);
    }
    let co = components_within(adj, set, true);
    if co.len() > 1 {
        return (RootKind::Tens, co);
    }
    (RootKind::Prime, prime_partition(adj, set))
}

/// Prime test through the root partition: at least two vertices, every module trivial.
pub fn is_prime(g: &LabeledGraph) -> bool {
    let d = Dense::new(g);
    is_prime_adj(&d.adj)
}

pub fn is_prime_adj(adj: &Adj) -> bool {
    let n = adj.len();
    if n < 2 {
        return false;
    }
    if n == 2 {
        return true;
    }
    let set: Vec<usize> = (0..n).collect();
    let (kind, parts) = root_split(adj, &set);
    kind == RootKind::Prime && parts.iter().all(|p| p.len() == 1)
}

/// Whether the decomposition uses only ⅋ and ⊗.
pub fn is_cograph(g: &LabeledGraph) -> bool {
    let d = Dense::new(g);
    fn go(adj: &Adj, set: &[usize]) -> bool {
        match root_split(adj, set) {
            (RootKind::Single, _) => true,
            (RootKind::Prime, _) => false,
            (_, parts) => parts.iter().all(|p| go(adj, p)),
        }
    }
    let set: Vec<usize> = (0..d.ids.len()).collect();
    go(&d.adj, &set)
}

/// Modular decomposition tree; ⅋ and ⊗ nodes are n-ary and flattened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionTree {
    Leaf {
        vertex: VertexId,
        label: Option<Literal>,
    },
    Par(Vec<DecompositionTree>),
    Tens(Vec<DecompositionTree>),
    Prime(Conn, Vec<DecompositionTree>),
}

impl DecompositionTree {
    pub fn children(&self) -> &[DecompositionTree] {
        match self {
            DecompositionTree::Leaf { .. } => &[],
            DecompositionTree::Par(c)
            | DecompositionTree::Tens(c)
            | DecompositionTree::Prime(_, c) => c,
        }
    }

    pub fn node_name(&self) -> &str {
        match self {
            DecompositionTree::Leaf { .. } => "",
            DecompositionTree::Par(_) => PAR,
            DecompositionTree::Tens(_) => TENS,
            DecompositionTree::Prime(c, _) => c.name(),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<(VertexId, Option<Literal>)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<(VertexId, Option<Literal>)>) {
        match self {
            DecompositionTree::Leaf { vertex, label } => out.push((*vertex, label.clone())),
            _ => self.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Whether the tree mentions only ⅋/⊗ nodes.
    pub fn is_cograph_tree(&self) -> bool {
        match self {
            DecompositionTree::Prime(..) => false,
            _ => self.children().iter().all(|c| c.is_cograph_tree()),
        }
    }

    /// Order on shapes, ignoring vertex ids.
    pub fn cmp_shape(&self, other: &Self) -> Ordering {
        use DecompositionTree::*;
        match (self, other) {
            (Leaf { label: a, .. }, Leaf { label: b, .. }) => {
                let key = |l: &Option<Literal>| {
                    l.as_ref().map(|l| (l.atom().to_string(), l.is_positive()))
                };
                key(a).cmp(&key(b))
            }
            (Leaf { .. }, _) => Ordering::Less,
            (_, Leaf { .. }) => Ordering::Greater,
            _ => self
                .node_name()
                .cmp(other.node_name())
                .then(self.children().len().cmp(&other.children().len()))
                .then_with(|| {
                    for (a, b) in self.children().iter().zip(other.children()) {
                        let o = a.cmp_shape(b);
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                }),
        }
    }

    pub fn shape_eq(&self, other: &Self) -> bool {
        self.cmp_shape(other) == Ordering::Equal
    }

    /// Text key of the shape; equal keys iff equal shapes.
    pub fn shape_key(&self) -> String {
        match self {
            DecompositionTree::Leaf { label: Some(l), .. } => l.to_string(),
            DecompositionTree::Leaf { label: None, .. } => "_".into(),
            _ => {
                let kids: Vec<String> = self.children().iter().map(|c| c.shape_key()).collect();
                format!("{}({})", self.node_name(), kids.join(","))
            }
        }
    }

    pub fn to_json(&self) -> TreeJson {
        match self {
            DecompositionTree::Leaf { vertex, label } => TreeJson::Leaf {
                vertex: vertex.0,
                label: label.clone(),
            },
            _ => TreeJson::Node {
                connective: self.node_name().to_string(),
                children: self.children().iter().map(|c| c.to_json()).collect(),
            },
        }
    }

    pub fn from_json(json: &TreeJson, base: &Base) -> Result<Self, DecompError> {
        Ok(match json {
            TreeJson::Leaf { vertex, label } => DecompositionTree::Leaf {
                vertex: VertexId(*vertex),
                label: label.clone(),
            },
            TreeJson::Node {
                connective,
                children,
            } => {
                let kids = children
                    .iter()
                    .map(|c| Self::from_json(c, base))
                    .collect::<Result<Vec<_>, _>>()?;
                match connective.as_str() {
                    PAR => DecompositionTree::Par(kids),
                    TENS => DecompositionTree::Tens(kids),
                    name => {
                        let c = base
                            .get(name)
                            .ok_or_else(|| DecompError::UnknownConnective(name.into()))?;
                        if c.arity() != kids.len() {
                            return Err(DecompError::Arity {
                                name: name.into(),
                                arity: c.arity(),
                                got: kids.len(),
                            });
                        }
                        DecompositionTree::Prime(c, kids)
                    }
                }
            }
        })
    }
}

impl fmt::Display for DecompositionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionTree::Leaf {
                vertex,
                label: Some(l),
            } => write!(f, "{l}@{}", vertex.0),
            DecompositionTree::Leaf {
                vertex,
                label: None,
            } => write!(f, "_@{}", vertex.0),
            _ => {
                write!(f, "{}(", self.node_name())?;
                for (i, c) in self.children().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum TreeJson {
    Leaf {
        vertex: u32,
        label: Option<Literal>,
    },
    Node {
        connective: String,
        children: Vec<TreeJson>,
    },
}

/// Modular decomposition; unknown prime quotients are registered in `base`.
pub fn decompose(g: &LabeledGraph, base: &Base) -> Result<DecompositionTree, DecompError> {
    if g.is_empty() {
        return Err(DecompError::EmptyGraph);
    }
    let d = Dense::new(g);
    let set: Vec<usize> = (0..d.ids.len()).collect();
    decompose_set(&d, &set, base)
}

fn decompose_set(
    d: &Dense<'_>,
    set: &[usize],
    base: &Base,
) -> Result<DecompositionTree, DecompError> {
    let (kind, parts) = root_split(&d.adj, set);
    match kind {
        RootKind::Single => {
            let v = d.ids[set[0]];
            Ok(DecompositionTree::Leaf {
                vertex: v,
                label: d.g.label(v).cloned(),
            })
        }
        RootKind::Par | RootKind::Tens => {
            let kids = parts
                .iter()
                .map(|p| decompose_set(d, p, base))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if kind == RootKind::Par {
                DecompositionTree::Par(kids)
            } else {
                DecompositionTree::Tens(kids)
            })
        }
        RootKind::Prime => {
            let reps: Vec<usize> = parts.iter().map(|p| p[0]).collect();
            let quotient: Adj = reps
                .iter()
                .map(|&a| reps.iter().map(|&b| d.adj[a][b]).collect())
                .collect();
            let (conn, m) = base.lookup_or_register(&quotient)?;
            let mut slots: Vec<Option<DecompositionTree>> = vec![None; parts.len()];
            for (i, p) in parts.iter().enumerate() {
                slots[m[i]] = Some(decompose_set(d, p, base)?);
            }
            Ok(DecompositionTree::Prime(
                conn,
                slots
                    .into_iter()
                    .map(|s| s.expect("bijective match"))
                    .collect(),
            ))
        }
    }
}

/// Build the graph bottom-up by composition-via.
pub fn realize(t: &DecompositionTree, base: &Base) -> Result<LabeledGraph, DecompError> {
    match t {
        DecompositionTree::Leaf { vertex, label } => {
            Ok(LabeledGraph::singleton(*vertex, label.clone()))
        }
        DecompositionTree::Par(kids) | DecompositionTree::Tens(kids) => {
            let parts = kids
                .iter()
                .map(|k| realize(k, base))
                .collect::<Result<Vec<_>, _>>()?;
            let n = parts.len();
            let edges: Vec<(usize, usize)> = if matches!(t, DecompositionTree::Tens(_)) {
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect()
            } else {
                Vec::new()
            };
            Ok(LabeledGraph::unlabeled(n, &edges).compose_via(&parts)?)
        }
        DecompositionTree::Prime(c, kids) => {
            let registered = base
                .get(c.name())
                .ok_or_else(|| DecompError::UnknownConnective(c.name().into()))?;
            if registered.arity() != kids.len() {
                return Err(DecompError::Arity {
                    name: c.name().into(),
                    arity: registered.arity(),
                    got: kids.len(),
                });
            }
            let parts = kids
                .iter()
                .map(|k| realize(k, base))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(registered.graph().compose_via(&parts)?)
        }
    }
}

/// Unique representative up to connective symmetries and ⅋/⊗ associativity and commutativity.
pub fn canonical_form(t: &DecompositionTree) -> DecompositionTree {
    match t {
        DecompositionTree::Leaf { .. } => t.clone(),
        DecompositionTree::Par(kids) | DecompositionTree::Tens(kids) => {
            let is_par = matches!(t, DecompositionTree::Par(_));
            let mut flat = Vec::new();
            for k in kids.iter().map(canonical_form) {
                match k {
                    DecompositionTree::Par(inner) if is_par => flat.extend(inner),
                    DecompositionTree::Tens(inner) if !is_par => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort_by(|a, b| a.cmp_shape(b));
            if is_par {
                DecompositionTree::Par(flat)
            } else {
                DecompositionTree::Tens(flat)
            }
        }
        DecompositionTree::Prime(c, kids) => {
            let kids: Vec<DecompositionTree> = kids.iter().map(canonical_form).collect();
            let best = c
                .sym()
                .iter()
                .map(|s| perm::pick(&kids, s))
                .min_by(|a, b| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x.cmp_shape(y))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal)
                })
                .unwrap_or(kids);
            DecompositionTree::Prime(c.clone(), best)
        }
    }
}

/// Brute-force isomorphism search by backtracking; intended for small graphs.
pub fn find_isomorphism_brute(g: &LabeledGraph, h: &LabeledGraph) -> Option<VertexMap> {
    if g.len() != h.len() || g.edge_count() != h.edge_count() {
        return None;
    }
    let dg = Dense::new(g);
    let dh = Dense::new(h);
    let mut found = None;
    for_each_isomorphism(&dg.adj, &dh.adj, |p| {
        let ok = (0..p.len()).all(|i| g.label(dg.ids[i]) == h.label(dh.ids[p[i]]));
        if ok {
            found = Some((0..p.len()).map(|i| (dg.ids[i], dh.ids[p[i]])).collect());
        }
        !ok
    });
    found
}

/// Isomorphism search. With a candidate, only verifies it. Otherwise compares
/// canonical decomposition trees, falling back to brute force at or below
/// `brute_bound` vertices when decomposition is out of capacity.
pub fn find_isomorphism_with(
    g: &LabeledGraph,
    h: &LabeledGraph,
    candidate: Option<&VertexMap>,
    base: &Base,
    brute_bound: usize,
) -> Result<Option<VertexMap>, GraphError> {
    if let Some(f) = candidate {
        return Ok(g.verify_isomorphism(h, f)?.then(|| f.clone()));
    }
    if g.len() != h.len() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    if g.is_empty() {
        return Ok(Some(VertexMap::new()));
    }
    match (decompose(g, base), decompose(h, base)) {
        (Ok(tg), Ok(th)) => {
            let (cg, ch) = (canonical_form(&tg), canonical_form(&th));
            if !cg.shape_eq(&ch) {
                return Ok(None);
            }
            let map: VertexMap = cg
                .leaves()
                .into_iter()
                .zip(ch.leaves())
                .map(|((a, _), (b, _))| (a, b))
                .collect();
            debug_assert!(g.verify_isomorphism(h, &map).unwrap_or(false));
            Ok(Some(map))
        }
        _ if g.len() <= brute_bound => Ok(find_isomorphism_brute(g, h)),
        _ => Ok(find_isomorphism_brute(g, h)),
    }
}

pub const DEFAULT_BRUTE_BOUND: usize = 10;

/// [`find_isomorphism_with`] over the shared base with the default bound.
pub fn find_isomorphism(
    g: &LabeledGraph,
    h: &LabeledGraph,
    candidate: Option<&VertexMap>,
) -> Result<Option<VertexMap>, GraphError> {
    find_isomorphism_with(g, h, candidate, Base::shared(), DEFAULT_BRUTE_BOUND)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Option<Literal> {
        Some(Literal::parse(s).unwrap())
    }

    fn labeled(labels: &[&str], edges: &[(u32, u32)]) -> LabeledGraph {
        LabeledGraph::from_parts(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| (VertexId(i as u32), lit(l))),
            edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))),
        )
        .unwrap()
    }

    /// The 9-vertex graph P4⟨a⅋b, c⊗d, e⊗f, g⊗h⊗i⟩.
    fn example_nine() -> LabeledGraph {
        let mut edges = vec![(2, 3), (4, 5), (6, 7), (7, 8), (6, 8)];
        for (xs, ys) in [
            (&[0, 1][..], &[2, 3][..]),
            (&[2, 3], &[4, 5]),
            (&[4, 5], &[6, 7, 8]),
        ] {
            for &x in xs {
                for &y in ys {
                    edges.push((x, y));
                }
            }
        }
        labeled(&["a", "b", "c", "d", "e", "f", "g", "h", "i"], &edges)
    }

    fn brute_is_prime(adj: &Adj) -> bool {
        let n = adj.len();
        n >= 2
            && (1u32..(1 << n) - 1).all(|mask| {
                let w: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                w.len() == 1
                    || (0..n)
                        .filter(|z| mask >> z & 1 == 0)
                        .any(|z| w.iter().any(|&x| adj[x][z] != adj[w[0]][z]))
            })
    }

    #[test]
    fn primality_against_enumeration() {
        let p4 = adj_from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let tri = adj_from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let k2 = adj_from_edges(2, &[(0, 1)]);
        let c6 = adj_from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        for a in [&p4, &tri, &k2, &c6] {
            assert_eq!(is_prime_adj(a), brute_is_prime(a));
        }
        assert!(is_prime_adj(&p4) && !is_prime_adj(&tri) && is_prime_adj(&k2) && is_prime_adj(&c6));
    }

    #[test]
    fn standard_symmetries() {
        let base = Base::new();
        let p4 = base.get("P4").unwrap();
        assert_eq!(p4.sym(), &[vec![0, 1, 2, 3], vec![3, 2, 1, 0]]);
        assert!(p4.dsym().contains(&vec![1, 3, 0, 2]));
        assert_eq!(p4.sigma(), &[1, 3, 0, 2]);
        let bull = base.get("Bull").unwrap();
        assert_eq!(bull.sym(), &[vec![0, 1, 2, 3, 4], vec![3, 2, 1, 0, 4]]);
        assert!(bull.is_self_dual());
        assert!(base.par().dsym().is_empty() && base.tens().dsym().is_empty());
        let path5 = base.get("Path5").unwrap();
        let house = base.dual_of(&path5);
        assert!(!path5.is_self_dual());
        assert_eq!(
            perm::compose(path5.sigma(), house.sigma()),
            perm::identity(5)
        );
    }

    #[test]
    fn decomposes_nine_vertex_example() {
        let base = Base::new();
        let g = example_nine();
        let t = decompose(&g, &base).unwrap();
        assert_eq!(
            t.shape_key(),
            "P4(Par(a,b),Tens(c,d),Tens(e,f),Tens(g,h,i))"
        );
        assert_eq!(realize(&t, &base).unwrap(), g);
    }

    #[test]
    fn six_cycle_registers_fresh_connective() {
        let base = Base::new();
        let before = base.len();
        let g = labeled(
            &["a", "b", "c", "d", "e", "f"],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        );
        let t = decompose(&g, &base).unwrap();
        let DecompositionTree::Prime(c, kids) = &t else {
            panic!("expected prime root")
        };
        assert_eq!(c.arity(), 6);
        assert!(c.name().starts_with("Prime_"));
        assert!(kids
            .iter()
            .all(|k| matches!(k, DecompositionTree::Leaf { .. })));
        assert!(base.len() > before);
        assert_eq!(realize(&t, &base).unwrap(), g);
        // the same class maps to the same connective
        let again = decompose(&g.shifted(3), &base).unwrap();
        assert_eq!(again.node_name(), c.name());
    }

    #[test]
    fn singleton_and_empty() {
        let base = Base::new();
        let g = labeled(&["a"], &[]);
        assert_eq!(
            decompose(&g, &base).unwrap(),
            DecompositionTree::Leaf {
                vertex: VertexId(0),
                label: lit("a")
            }
        );
        assert_eq!(
            decompose(&LabeledGraph::new(), &base),
            Err(DecompError::EmptyGraph)
        );
    }

    #[test]
    fn canonical_forms_identify_symmetric_orders() {
        let base = Base::new();
        let p4 = base.get("P4").unwrap();
        let leaf = |i: u32, s: &str| DecompositionTree::Leaf {
            vertex: VertexId(i),
            label: lit(s),
        };
        let t1 = DecompositionTree::Prime(
            p4.clone(),
            vec![leaf(0, "a"), leaf(1, "b"), leaf(2, "c"), leaf(3, "d")],
        );
        let t2 = DecompositionTree::Prime(
            p4,
            vec![leaf(0, "d"), leaf(1, "c"), leaf(2, "b"), leaf(3, "a")],
        );
        assert!(canonical_form(&t1).shape_eq(&canonical_form(&t2)));
        let nested = DecompositionTree::Par(vec![
            leaf(0, "a"),
            DecompositionTree::Par(vec![leaf(1, "b"), leaf(2, "c")]),
        ]);
        let other = DecompositionTree::Par(vec![
            DecompositionTree::Par(vec![leaf(0, "a"), leaf(1, "b")]),
            leaf(2, "c"),
        ]);
        assert_eq!(canonical_form(&nested).shape_key(), "Par(a,b,c)");
        assert!(canonical_form(&nested).shape_eq(&canonical_form(&other)));
    }

    #[test]
    fn cograph_detection() {
        let p4 = labeled(&["a", "b", "c", "d"], &[(0, 1), (1, 2), (2, 3)]);
        assert!(!is_cograph(&p4));
        let k4 = LabeledGraph::unlabeled(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(is_cograph(&k4));
        let two_pairs = labeled(&["a", "b", "c", "d"], &[(0, 1), (2, 3)]);
        assert!(is_cograph(&two_pairs));
    }

    #[test]
    fn isomorphism_by_canonical_trees() {
        // a path a-b-c-d against a relabelled copy and against a similar but differently labelled one
        let f = labeled(&["a", "b", "c", "d"], &[(0, 1), (1, 2), (2, 3)]);
        let g = labeled(&["d", "c", "b", "a"], &[(0, 1), (1, 2), (2, 3)]);
        let h = labeled(&["b", "a", "c", "d"], &[(0, 1), (1, 2), (2, 3)]);
        let m = find_isomorphism(&f, &g, None).unwrap().unwrap();
        assert!(f.verify_isomorphism(&g, &m).unwrap());
        assert_eq!(find_isomorphism(&f, &h, None).unwrap(), None);
        let id: VertexMap = f.vertices().map(|v| (v, v)).collect();
        assert_eq!(find_isomorphism(&f, &f, Some(&id)).unwrap(), Some(id));
        assert_eq!(find_isomorphism_brute(&f, &h), None);
    }

    #[test]
    fn base_json_roundtrip() {
        let base = Base::new();
        let g = labeled(
            &["a", "b", "c", "d", "e", "f"],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        );
        decompose(&g, &base).unwrap();
        let text = base.to_json_string();
        let back = Base::from_json_str(&text).unwrap();
        assert_eq!(back.to_json(), base.to_json());
    }

    #[test]
    fn canonical_order_is_invariant() {
        let c6 = adj_from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let shuffled = adj_from_edges(6, &[(0, 3), (3, 5), (5, 1), (1, 4), (4, 2), (2, 0)]);
        assert_eq!(canonical_order(&c6).1, canonical_order(&shuffled).1);
    }
}
