//! Oracles shared by the integration tests. They share no code with the
//! provers they check.

#![allow(dead_code)]

use graphlogic::formula::Formula;
use graphlogic::gen::{atom_name, GenRng};
use graphlogic::Literal;
use rand::seq::SliceRandom;
use rand::Rng;

/// Flattened proof structure: node 0.. are literal occurrences, then one
/// node per connective. `kids[i]` lists the children of connective node i.
struct Net {
    lits: Vec<Literal>,
    /// (node, is_par, left, right)
    links: Vec<(usize, bool, usize, usize)>,
    nodes: usize,
}

fn flatten(f: &Formula, net: &mut Net, lit_ids: &mut Vec<usize>) -> Option<usize> {
    match f {
        Formula::Unit | Formula::App(..) => None,
        Formula::Lit(l) => {
            let id = net.nodes;
            net.nodes += 1;
            net.lits.push(l.clone());
            lit_ids.push(id);
            Some(id)
        }
        Formula::Par(a, b) | Formula::Tens(a, b) => {
            let x = flatten(a, net, lit_ids)?;
            let y = flatten(b, net, lit_ids)?;
            let id = net.nodes;
            net.nodes += 1;
            net.links.push((id, matches!(f, Formula::Par(..)), x, y));
            Some(id)
        }
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Danos–Regnier: for every switching the graph is a tree.
fn correct(net: &Net, lit_ids: &[usize], linking: &[(usize, usize)]) -> bool {
    let pars: Vec<usize> = (0..net.links.len()).filter(|&i| net.links[i].1).collect();
    for sw in 0u64..(1 << pars.len()) {
        let mut edges: Vec<(usize, usize)> = linking
            .iter()
            .map(|&(i, j)| (lit_ids[i], lit_ids[j]))
            .collect();
        for (k, &(node, is_par, x, y)) in net.links.iter().enumerate() {
            if is_par {
                let bit = pars.iter().position(|&p| p == k).unwrap();
                edges.push((node, if sw >> bit & 1 == 0 { x } else { y }));
            } else {
                edges.push((node, x));
                edges.push((node, y));
            }
        }
        if edges.len() + 1 != net.nodes {
            return false;
        }
        let mut parent: Vec<usize> = (0..net.nodes).collect();
        for (a, b) in edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
    }
    true
}

/// MLL provability (no units, no mix) of a sequent of ⅋/⊗ formulas, by
/// enumerating axiom linkings and testing each with Danos–Regnier switchings.
/// The sequent's formulas are joined under a ⅋ spine so the net has one root.
pub fn mll_provable(seq: &[Formula]) -> bool {
    let Some(f) = Formula::par_all(seq.to_vec()) else {
        return false;
    };
    let mut net = Net {
        lits: vec![],
        links: vec![],
        nodes: 0,
    };
    let mut lit_ids = Vec::new();
    if flatten(&f, &mut net, &mut lit_ids).is_none() {
        panic!("oracle only handles unit-free ⅋/⊗ formulas");
    }
    let n = net.lits.len();
    let pos: Vec<usize> = (0..n).filter(|&i| net.lits[i].is_positive()).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| !net.lits[i].is_positive()).collect();
    if pos.len() != neg.len() {
        return false;
    }
    let mut used = vec![false; neg.len()];
    let mut linking = Vec::new();
    fn go(
        k: usize,
        pos: &[usize],
        neg: &[usize],
        used: &mut [bool],
        linking: &mut Vec<(usize, usize)>,
        net: &Net,
        ids: &[usize],
    ) -> bool {
        if k == pos.len() {
            return correct(net, ids, linking);
        }
        for j in 0..neg.len() {
            if !used[j] && net.lits[neg[j]].atom() == net.lits[pos[k]].atom() {
                used[j] = true;
                linking.push((pos[k], neg[j]));
                if go(k + 1, pos, neg, used, linking, net, ids) {
                    return true;
                }
                linking.pop();
                used[j] = false;
            }
        }
        false
    }
    go(0, &pos, &neg, &mut used, &mut linking, &net, &lit_ids)
}

/// Replace the literals of `f`, left to right, by a shuffled balanced list:
/// each atom occurs as often positively as negatively. Needs an even count.
pub fn balance(rng: &mut GenRng, f: &Formula, atoms: usize) -> Formula {
    let n = f.literal_count();
    assert!(n % 2 == 0, "odd literal count");
    let mut lits: Vec<Literal> = Vec::new();
    for _ in 0..n / 2 {
        let a = atom_name(rng.gen_range(0..atoms));
        lits.push(Literal::pos(&a));
        lits.push(Literal::neg(&a));
    }
    lits.shuffle(rng);
    let mut it = lits.into_iter();
    relabel(f, &mut || it.next().unwrap())
}

fn relabel(f: &Formula, next: &mut dyn FnMut() -> Literal) -> Formula {
    match f {
        Formula::Unit => Formula::Unit,
        Formula::Lit(_) => Formula::Lit(next()),
        Formula::Par(a, b) => Formula::par(relabel(a, next), relabel(b, next)),
        Formula::Tens(a, b) => Formula::tens(relabel(a, next), relabel(b, next)),
        Formula::App(c, args) => {
            Formula::App(c.clone(), args.iter().map(|a| relabel(a, next)).collect())
        }
    }
}

/// Atom name for index `i`, independent of the crate's generator.
pub fn atom(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}
