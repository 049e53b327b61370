//! Permutations of argument positions, 0-based: `p[i]` is the image of `i`.

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// `(p ∘ q)(i) = p(q(i))`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&j| j < p.len() && !std::mem::replace(&mut seen[j], true))
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all(n: usize) -> Vec<Perm> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

/// Reorder `items` so that position `i` receives `items[p[i]]`.
pub fn pick<T: Clone>(items: &[T], p: &[usize]) -> Vec<T> {
    p.iter().map(|&i| items[i].clone()).collect()
}
