//! Seeded generators for random tree pairs, HIA queries and strings.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hia::{HiaQuery, TreePair};
use crate::tree::{NodeId, WeightedTree};

/// A random tree with `n` labelled leaves, every internal node of degree at
/// least two, and strictly increasing weights. Shapes range from bushy to
/// fairly deep chains.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> WeightedTree {
    assert!(n >= 1);
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut roots: Vec<NodeId> = (0..n).collect();
    roots.shuffle(rng);
    // chance of pulling the newest root into each merge; high values make chains
    let chain_bias: f64 = [0.0, 0.3, 0.7][rng.gen_range(0..3)];
    let max_fan = if rng.gen_bool(0.5) { 2 } else { 4 };
    while roots.len() > 1 {
        let k = rng.gen_range(2..=max_fan.min(roots.len()));
        let mut picked = Vec::with_capacity(k);
        if rng.gen_bool(chain_bias) {
            picked.push(roots.pop().unwrap());
        }
        while picked.len() < k {
            let i = rng.gen_range(0..roots.len());
            picked.push(roots.swap_remove(i));
        }
        let id = parent.len();
        parent.push(None);
        for c in picked {
            parent[c] = Some(id);
        }
        roots.push(id);
    }

    let len = parent.len();
    let mut children = vec![Vec::new(); len];
    let mut root = 0;
    for (v, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(v),
            None => root = v,
        }
    }
    let mut weight = vec![0u64; len];
    weight[root] = rng.gen_range(0..3);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &c in &children[v] {
            weight[c] = weight[v] + rng.gen_range(1..=4);
            stack.push(c);
        }
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut leaf_label = vec![None; len];
    for (v, l) in labels.into_iter().enumerate() {
        leaf_label[v] = Some(l);
    }
    WeightedTree::from_parents(parent, weight, leaf_label).expect("generator builds a tree")
}

pub fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TreePair {
    let t1 = random_tree(n, rng);
    let t2 = random_tree(n, rng);
    TreePair::new(t1, t2).expect("generated trees are valid")
}

/// A random query, with each override present half the time.
pub fn random_query<R: Rng + ?Sized>(pair: &TreePair, rng: &mut R) -> HiaQuery {
    let v1 = rng.gen_range(0..pair.t1().node_count());
    let v2 = rng.gen_range(0..pair.t2().node_count());
    let pick = |t: &WeightedTree, v: NodeId, rng: &mut R| {
        if rng.gen_bool(0.5) {
            let lo = t.parent(v).map_or(0, |p| t.weight(p) + 1);
            Some(rng.gen_range(lo..=t.weight(v)))
        } else {
            None
        }
    };
    let w1 = pick(pair.t1(), v1, rng);
    let w2 = pick(pair.t2(), v2, rng);
    HiaQuery { v1, v2, w1, w2 }
}

/// Uniform string over the first `sigma` lowercase letters.
pub fn random_text<R: Rng + ?Sized>(len: usize, sigma: u8, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// `copies` near-identical copies of a random `record_len`-byte record, each
/// with a few point edits.
pub fn repetitive_corpus<R: Rng + ?Sized>(
    copies: usize,
    record_len: usize,
    edits_per_record: usize,
    rng: &mut R,
) -> Vec<u8> {
    let base = random_text(record_len, 26, rng);
    let mut out = Vec::with_capacity(copies * record_len);
    for _ in 0..copies {
        let start = out.len();
        out.extend_from_slice(&base);
        for _ in 0..edits_per_record {
            let i = start + rng.gen_range(0..record_len);
            out[i] = b'a' + rng.gen_range(0..26);
        }
    }
    out
}
