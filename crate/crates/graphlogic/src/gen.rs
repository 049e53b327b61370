//! Seeded random generators: labeled graphs, formulas, graph-preserving
//! reshuffles of formulas, and cut-free proofs built bottom-up.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{dualizing_pairings, Base, Conn};
use crate::formula::{Formula, Path};
use crate::graph::{LabeledGraph, Literal, VertexId};
use crate::sequent::{unitor_premise, Proof, System};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atom names `a`, `b`, … (then `a1`, `b1`, … past 26).
pub fn atom_name(i: usize) -> String {
    let c = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        c.to_string()
    } else {
        format!("{c}{}", i / 26)
    }
}

pub fn random_literal(rng: &mut GenRng, atoms: usize) -> Literal {
    Literal::new(
        &atom_name(rng.gen_range(0..atoms.max(1))),
        rng.gen_bool(0.5),
    )
}

/// `n` vertices, each edge present with probability `p`, every vertex labeled.
pub fn random_graph(rng: &mut GenRng, n: usize, atoms: usize, p: f64) -> LabeledGraph {
    let mut g = LabeledGraph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v as u32), Some(random_literal(rng, atoms)))
            .unwrap();
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(VertexId(u as u32), VertexId(v as u32)).unwrap();
            }
        }
    }
    g
}

/// Shape parameters for [`random_formula`].
#[derive(Clone, Debug)]
pub struct FormulaSpec {
    pub literals: usize,
    pub atoms: usize,
    pub connectives: Vec<Conn>,
    /// Chance that a compound node gets ◦ in some of its slots.
    pub unit_prob: f64,
}

impl FormulaSpec {
    /// ⅋, ⊗, P4 and Bull, unit-free.
    pub fn standard(literals: usize, atoms: usize, base: &Base) -> Self {
        let connectives = ["Par", "Tens", "P4", "Bull"]
            .iter()
            .filter_map(|n| base.get(n))
            .collect();
        FormulaSpec {
            literals,
            atoms,
            connectives,
            unit_prob: 0.0,
        }
    }

    pub fn mll(literals: usize, atoms: usize, base: &Base) -> Self {
        FormulaSpec {
            literals,
            atoms,
            connectives: vec![base.par(), base.tens()],
            unit_prob: 0.0,
        }
    }

    pub fn with_units(mut self, p: f64) -> Self {
        self.unit_prob = p;
        self
    }
}

/// Random composition of `n` into `parts` positive summands.
fn composition(rng: &mut GenRng, n: usize, parts: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// A pure formula with exactly `spec.literals` literal occurrences.
pub fn random_formula(rng: &mut GenRng, spec: &FormulaSpec) -> Formula {
    build(rng, spec, spec.literals.max(1))
}

fn build(rng: &mut GenRng, spec: &FormulaSpec, n: usize) -> Formula {
    let units = spec.unit_prob > 0.0 && rng.gen_bool(spec.unit_prob);
    if n == 1 && !units {
        return Formula::Lit(random_literal(rng, spec.atoms));
    }
    let fits: Vec<&Conn> = spec
        .connectives
        .iter()
        .filter(|c| units || c.arity() <= n)
        .collect();
    let Some(c) = fits.choose(rng).map(|c| (*c).clone()) else {
        return Formula::Lit(random_literal(rng, spec.atoms));
    };
    let a = c.arity();
    let filled = if units {
        rng.gen_range(1..=a.min(n).min(a - 1).max(1))
    } else {
        a
    };
    let sizes = composition(rng, n, filled);
    let mut slots: Vec<usize> = (0..a).collect();
    slots.shuffle(rng);
    let mut args = vec![Formula::Unit; a];
    for (slot, size) in slots.into_iter().zip(sizes) {
        args[slot] = build(rng, spec, size);
    }
    Formula::apply(&c, args).expect("arity matches")
}

/// A formula with the same graph as `f`: arguments permuted by symmetries,
/// ⅋/⊗ chains reassociated, and (optionally) units inserted or removed.
pub fn random_equivalent(rng: &mut GenRng, f: &Formula, base: &Base, units: bool) -> Formula {
    let mut g = match f {
        Formula::Unit | Formula::Lit(_) => f.clone(),
        Formula::Par(a, b) | Formula::Tens(a, b) => {
            let (mut x, mut y) = (
                random_equivalent(rng, a, base, units),
                random_equivalent(rng, b, base, units),
            );
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut x, &mut y);
            }
            let par = matches!(f, Formula::Par(..));
            let join = |p: Formula, q: Formula| {
                if par {
                    Formula::par(p, q)
                } else {
                    Formula::tens(p, q)
                }
            };
            // (p q) r → p (q r) when the left child has the same connective.
            match (&x, rng.gen_bool(0.5)) {
                (Formula::Par(p, q), true) if par => join((**p).clone(), join((**q).clone(), y)),
                (Formula::Tens(p, q), true) if !par => join((**p).clone(), join((**q).clone(), y)),
                _ => join(x, y),
            }
        }
        Formula::App(c, args) => {
            let sym = c.sym();
            let s = &sym[rng.gen_range(0..sym.len())];
            let args: Vec<Formula> = (0..args.len())
                .map(|i| random_equivalent(rng, &args[s[i]], base, units))
                .collect();
            Formula::App(c.clone(), args)
        }
    };
    if units && !g.is_unit() {
        if g.children().iter().any(|c| c.is_unit()) && rng.gen_bool(0.5) {
            if let Some((chi, _)) = unitor_premise(&g, base) {
                g = chi;
            }
        } else if rng.gen_bool(0.2) {
            g = match rng.gen_range(0..3) {
                0 => Formula::par(g, Formula::Unit),
                1 => Formula::tens(Formula::Unit, g),
                _ => {
                    let p4 = base.get("P4").expect("P4 in base");
                    let mut args = vec![Formula::Unit; 4];
                    args[rng.gen_range(0..4)] = g;
                    Formula::apply(&p4, args).unwrap()
                }
            };
        }
    }
    g
}

/// Random cut-free proof in `system`, assembled from about `steps` rule
/// applications over atomic axioms. The result is the largest proof built.
pub fn random_proof(
    rng: &mut GenRng,
    system: System,
    steps: usize,
    atoms: usize,
    base: &Base,
) -> Proof {
    let primes: Vec<Conn> = base
        .connectives()
        .into_iter()
        .filter(|c| c.is_prime_connective() && c.arity() <= 5)
        .collect();
    let mut pool: Vec<Proof> = (0..3)
        .map(|_| Proof::ax(&random_literal(rng, atoms)))
        .collect();
    for _ in 0..steps {
        let choice = rng.gen_range(0..10);
        let next = match (system, choice) {
            (_, 0) => Some(Proof::ax(&random_literal(rng, atoms))),
            (_, 1..=2) => take_two(rng, &mut pool).and_then(|(l, r)| {
                let (a, b) = (pick(rng, &l), pick(rng, &r));
                Proof::tens(l, &a, r, &b).ok()
            }),
            (_, 3..=4) => par_step(rng, &mut pool),
            (System::Mgl0, 5) => take_two(rng, &mut pool).map(|(l, r)| Proof::mix(l, r)),
            (System::Mgl0, 6) => unitor_step(rng, &mut pool, base),
            (System::Mgl0, 7) => wd_tens_step(rng, &mut pool),
            (System::Glk, 5..=6) => {
                let i = rng.gen_range(0..pool.len());
                let f = Formula::Lit(random_literal(rng, atoms));
                Some(Proof::weaken(pool.swap_remove(i), &f))
            }
            (System::Glk, 7) => contract_step(rng, &mut pool),
            _ => dconr_step(rng, &mut pool, &primes, base),
        };
        if let Some(p) = next {
            pool.push(p);
        }
        if pool.is_empty() {
            pool.push(Proof::ax(&random_literal(rng, atoms)));
        }
    }
    pool.into_iter()
        .max_by_key(|p| (p.size(), p.conclusion.len()))
        .unwrap()
}

fn pick(rng: &mut GenRng, p: &Proof) -> Formula {
    p.conclusion.choose(rng).unwrap().clone()
}

fn take_two(rng: &mut GenRng, pool: &mut Vec<Proof>) -> Option<(Proof, Proof)> {
    if pool.len() < 2 {
        return None;
    }
    let l = pool.swap_remove(rng.gen_range(0..pool.len()));
    let r = pool.swap_remove(rng.gen_range(0..pool.len()));
    Some((l, r))
}

fn par_step(rng: &mut GenRng, pool: &mut Vec<Proof>) -> Option<Proof> {
    let i = (0..pool.len())
        .filter(|&i| pool[i].conclusion.len() >= 2)
        .collect::<Vec<_>>()
        .choose(rng)
        .copied()?;
    let p = pool.swap_remove(i);
    let mut idx: Vec<usize> = (0..p.conclusion.len()).collect();
    idx.shuffle(rng);
    let (a, b) = (p.conclusion[idx[0]].clone(), p.conclusion[idx[1]].clone());
    Proof::par(p, &a, &b).ok()
}

fn dconr_step(
    rng: &mut GenRng,
    pool: &mut Vec<Proof>,
    primes: &[Conn],
    base: &Base,
) -> Option<Proof> {
    let c = primes.choose(rng)?.clone();
    let q = base.dual_of(&c);
    let n = c.arity();
    let usable: Vec<usize> = (0..pool.len())
        .filter(|&i| pool[i].conclusion.len() >= 2)
        .collect();
    if usable.len() < n {
        return None;
    }
    let sigma = dualizing_pairings(c.adj(), q.adj(), base.cap())
        .ok()?
        .choose(rng)?
        .clone();
    let mut chosen: Vec<usize> = usable.choose_multiple(rng, n).copied().collect();
    chosen.sort_unstable_by(|a, b| b.cmp(a));
    let mut kids: Vec<Proof> = chosen.into_iter().map(|i| pool.swap_remove(i)).collect();
    kids.shuffle(rng);
    let mut xs = vec![Formula::Unit; n];
    let mut ys = vec![Formula::Unit; n];
    for (k, p) in kids.iter().enumerate() {
        let mut idx: Vec<usize> = (0..p.conclusion.len()).collect();
        idx.shuffle(rng);
        xs[sigma[k]] = p.conclusion[idx[0]].clone();
        ys[k] = p.conclusion[idx[1]].clone();
    }
    let x = Formula::apply(&c, xs).ok()?;
    let y = Formula::apply(&q, ys).ok()?;
    Proof::dconr(&x, &y, sigma, (0..n).collect(), kids).ok()
}

fn unitor_step(rng: &mut GenRng, pool: &mut Vec<Proof>, base: &Base) -> Option<Proof> {
    let i = rng.gen_range(0..pool.len());
    let chi = pick(rng, &pool[i]);
    let conns = [base.par(), base.tens(), base.get("P4")?, base.get("Bull")?];
    let c = conns.choose(rng)?;
    let mut args = vec![Formula::Unit; c.arity()];
    let j = rng.gen_range(0..c.arity());
    args[j] = chi.clone();
    let f = Formula::apply(c, args).ok()?;
    let k = (0..c.arity()).find(|&k| k != j)?;
    Proof::unitor(pool.swap_remove(i), &chi, &f, k).ok()
}

fn wd_tens_step(rng: &mut GenRng, pool: &mut Vec<Proof>) -> Option<Proof> {
    let holders: Vec<(usize, usize)> = pool
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            p.conclusion
                .iter()
                .enumerate()
                .filter(|(_, f)| f.children().iter().any(|c| c.is_unit()))
                .map(move |(j, _)| (i, j))
        })
        .collect();
    let &(i, j) = holders.choose(rng)?;
    if pool.len() < 2 {
        return None;
    }
    let right = pool.swap_remove(i);
    let left = pool.swap_remove(rng.gen_range(0..pool.len()));
    let r = right.conclusion[j].clone();
    let units: Vec<usize> = (0..r.children().len())
        .filter(|&k| r.children()[k].is_unit())
        .collect();
    let k = *units.choose(rng)?;
    let a = pick(rng, &left);
    let f = r.replace_at(&[k], a)?;
    Proof::wd_tens(left, right, &f, k).ok()
}

/// ⊗ of a proof with a copy of itself, then contraction of the duplicated context.
fn contract_step(rng: &mut GenRng, pool: &mut Vec<Proof>) -> Option<Proof> {
    let i = rng.gen_range(0..pool.len());
    let p = pool.swap_remove(i);
    let (a, b) = (pick(rng, &p), pick(rng, &p));
    let mut q = Proof::tens(p.clone(), &a, p, &b).ok()?;
    loop {
        let mut sorted = q.conclusion.clone();
        sorted.sort();
        let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) else {
            return Some(q);
        };
        let f = w[0].clone();
        q = Proof::contract(q, &f).ok()?;
    }
}

/// Paths in `f` at which a wd_par instance is allowed: a non-vacuous factor
/// and no vacuous strict ancestor in the residual.
pub fn wd_par_paths(f: &Formula) -> Vec<Path> {
    f.positions()
        .into_iter()
        .filter(|p| {
            if p.is_empty() || f.at(p).is_none_or(|x| x.is_vacuous()) {
                return false;
            }
            let residual = f.replace_at(p, Formula::Unit).unwrap();
            (0..p.len()).all(|d| !residual.at(&p[..d]).unwrap().is_vacuous())
        })
        .collect()
}

/// Put a wd_par step below `p` on a random conclusion formula, if any allows one.
pub fn inject_wd_par(rng: &mut GenRng, p: &Proof) -> Option<Proof> {
    let options: Vec<(Formula, Path)> = p
        .conclusion
        .iter()
        .flat_map(|f| wd_par_paths(f).into_iter().map(move |q| (f.clone(), q)))
        .collect();
    let (f, path) = options.choose(rng)?.clone();
    Proof::wd_par(p.clone(), &f, path).ok()
}

/// A deep step joining `pa` (some formula φ becomes the plugged formula) and
/// `pb` (some pure formula ψ becomes the context, with φ attached by ⅋ or ⊗
/// next to a random subformula of ψ).
pub fn inject_deep(rng: &mut GenRng, pa: &Proof, pb: &Proof) -> Option<Proof> {
    let phi = pick(rng, pa);
    let psi = pb
        .conclusion
        .iter()
        .filter(|f| f.is_pure())
        .cloned()
        .collect::<Vec<_>>()
        .choose(rng)?
        .clone();
    let spots: Vec<Path> = psi
        .positions()
        .into_iter()
        .filter(|q| !psi.at(q).unwrap().is_unit())
        .collect();
    let spot = spots.choose(rng)?.clone();
    let sub = psi.at(&spot)?.clone();
    let joined = if rng.gen_bool(0.5) {
        Formula::par(sub, phi.clone())
    } else {
        Formula::tens(sub, phi.clone())
    };
    let zeta_phi = psi.replace_at(&spot, joined)?;
    let mut path = spot;
    path.push(1);
    Proof::deep(pa.clone(), &phi, pb.clone(), &psi, &zeta_phi, path).ok()
}
