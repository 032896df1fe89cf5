use crate::tree::{validate_tree, NodeId, Weight, WeightedTree};

use super::parse::Lz77Parse;
use super::suffix::SuffixData;
use super::LzError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrieKind {
    /// Reversed phrases: string `k` reads phrase `k` backwards from its end.
    Reversed,
    /// Suffixes that start right after each phrase end.
    Suffixes,
}

/// Compacted trie over one string per phrase boundary, each closed by its
/// own terminator. Node weight is the string depth; a leaf's terminator
/// counts as one symbol so leaves stay strictly heavier than their parents.
/// Leaf labels are boundary indices.
#[derive(Debug, Clone)]
pub struct BoundaryTrie {
    kind: TrieKind,
    tree: WeightedTree,
    // per node, a boundary whose string passes through it
    rep: Vec<usize>,
    ends: Vec<usize>,
    lens: Vec<usize>,
}

impl BoundaryTrie {
    /// Boundaries `ends` with string lengths `lens`, inserted in sorted order
    /// with `lcps[j]` the common prefix of strings `order[j - 1]`, `order[j]`.
    fn assemble(
        kind: TrieKind,
        ends: Vec<usize>,
        lens: Vec<usize>,
        order: &[usize],
        lcps: &[usize],
    ) -> Self {
        let mut parent: Vec<Option<NodeId>> = vec![None];
        let mut weight: Vec<Weight> = vec![0];
        let mut rep = vec![order[0]];
        let mut label = vec![None];
        let mut stack: Vec<NodeId> = vec![0];
        for (j, &k) in order.iter().enumerate() {
            let l = if j == 0 { 0 } else { lcps[j] } as Weight;
            let mut popped = None;
            while weight[*stack.last().unwrap()] > l {
                popped = stack.pop();
            }
            let top = *stack.last().unwrap();
            if weight[top] < l {
                let below = popped.expect("a deeper leaf was just popped");
                let id = parent.len();
                parent.push(Some(top));
                weight.push(l);
                rep.push(rep[below]);
                label.push(None);
                parent[below] = Some(id);
                stack.push(id);
            }
            let top = *stack.last().unwrap();
            let id = parent.len();
            parent.push(Some(top));
            weight.push(lens[k] as Weight + 1);
            rep.push(k);
            label.push(Some(k));
            stack.push(id);
        }
        // a root with one child is not a branching node; drop it
        if parent.iter().filter(|p| **p == Some(0)).count() == 1 {
            parent.remove(0);
            weight.remove(0);
            rep.remove(0);
            label.remove(0);
            for p in parent.iter_mut() {
                *p = match *p {
                    Some(0) | None => None,
                    Some(x) => Some(x - 1),
                };
            }
        }
        let tree = WeightedTree::from_parents(parent, weight, label).expect("trie shape");
        BoundaryTrie { kind, tree, rep, ends, lens }
    }

    /// Reassembles a stored trie, checking it against the parse.
    pub fn from_parts(
        kind: TrieKind,
        tree: WeightedTree,
        rep: Vec<usize>,
        parse: &Lz77Parse,
    ) -> Result<Self, LzError> {
        let bad = |why: &str| Err(LzError::BadTrie(why.to_string()));
        let report = validate_tree(&tree);
        if !report.is_ok() {
            return Err(LzError::BadTrie(report.to_string()));
        }
        let (ends, lens) = strings(kind, parse);
        if tree.leaf_count() != ends.len() || rep.len() != tree.node_count() {
            return bad("size does not match the parse");
        }
        for v in 0..tree.node_count() {
            if rep[v] >= ends.len() {
                return bad("representative out of range");
            }
            if let Some(k) = tree.leaf_label(v) {
                if rep[v] != k || tree.weight(v) != lens[k] as Weight + 1 {
                    return bad("leaf does not match its string");
                }
            }
        }
        Ok(BoundaryTrie { kind, tree, rep, ends, lens })
    }

    pub fn kind(&self) -> TrieKind {
        self.kind
    }

    pub fn tree(&self) -> &WeightedTree {
        &self.tree
    }

    pub fn into_tree(self) -> WeightedTree {
        self.tree
    }

    pub fn reps(&self) -> &[usize] {
        &self.rep
    }

    /// Length of boundary `k`'s string, terminator excluded.
    pub fn string_len(&self, k: usize) -> usize {
        self.lens[k]
    }

    /// Symbol `d` of boundary `k`'s string, `None` at the terminator.
    pub fn symbol(&self, text: &[u8], k: usize, d: usize) -> Option<u8> {
        if d >= self.lens[k] {
            return None;
        }
        Some(match self.kind {
            TrieKind::Reversed => text[self.ends[k] - d],
            TrieKind::Suffixes => text[self.ends[k] + 1 + d],
        })
    }

    pub fn string(&self, text: &[u8], k: usize) -> Vec<u8> {
        (0..self.lens[k]).map(|d| self.symbol(text, k, d).unwrap()).collect()
    }

    /// The symbols spelled from the root to `v`, terminator excluded.
    pub fn path_label(&self, text: &[u8], v: NodeId) -> Vec<u8> {
        let k = self.rep[v];
        let len = (self.tree.weight(v) as usize).min(self.lens[k]);
        (0..len).map(|d| self.symbol(text, k, d).unwrap()).collect()
    }

    /// Matches `q(0), q(1), …, q(qlen - 1)` from the root. Returns the node at
    /// or just below where matching stops, and the matched length.
    pub fn locus(&self, text: &[u8], qlen: usize, q: impl Fn(usize) -> u8) -> (NodeId, usize) {
        let t = &self.tree;
        let mut v = t.root();
        let mut matched = 0;
        loop {
            let k = self.rep[v];
            let w = t.weight(v) as usize;
            let limit = w.min(self.lens[k]).min(qlen);
            while matched < limit && self.symbol(text, k, matched) == Some(q(matched)) {
                matched += 1;
            }
            if matched < w || matched == qlen {
                return (v, matched);
            }
            let want = Some(q(matched));
            match t
                .children(v)
                .iter()
                .find(|&&c| self.symbol(text, self.rep[c], matched) == want)
            {
                Some(&c) => v = c,
                None => return (v, matched),
            }
        }
    }
}

fn strings(kind: TrieKind, parse: &Lz77Parse) -> (Vec<usize>, Vec<usize>) {
    let ends = parse.boundaries();
    let lens = match kind {
        TrieKind::Reversed => parse.phrases().iter().map(|p| p.len()).collect(),
        TrieKind::Suffixes => ends.iter().map(|&e| parse.text_len() - 1 - e).collect(),
    };
    (ends, lens)
}

/// The reversed-phrase trie and the boundary-suffix trie of `s`.
pub fn build_tries(s: &[u8], parse: &Lz77Parse) -> (BoundaryTrie, BoundaryTrie) {
    build_tries_with(s, parse, &SuffixData::new(s))
}

pub(crate) fn build_tries_with(
    s: &[u8],
    parse: &Lz77Parse,
    sd: &SuffixData,
) -> (BoundaryTrie, BoundaryTrie) {
    let n = parse.len();

    let (ends, lens) = strings(TrieKind::Reversed, parse);
    let (e, l) = (&ends, &lens);
    let rev = |k: usize| (0..l[k]).map(move |d| s[e[k] - d]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rev(a).cmp(rev(b)));
    let mut lcps = vec![0; n];
    for j in 1..n {
        lcps[j] = rev(order[j - 1]).zip(rev(order[j])).take_while(|(x, y)| x == y).count();
    }
    let t_rev = BoundaryTrie::assemble(TrieKind::Reversed, ends, lens, &order, &lcps);

    let (ends, lens) = strings(TrieKind::Suffixes, parse);
    // the empty suffix after the last phrase sorts first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (lens[k] > 0, if lens[k] > 0 { sd.rank[ends[k] + 1] } else { 0 }));
    let mut lcps = vec![0; n];
    for j in 1..n {
        let (a, b) = (order[j - 1], order[j]);
        if lens[a] == 0 {
            continue;
        }
        let (ra, rb) = (sd.rank[ends[a] + 1], sd.rank[ends[b] + 1]);
        lcps[j] = sd.lcp[ra + 1..=rb].iter().copied().min().unwrap();
    }
    let t_suf = BoundaryTrie::assemble(TrieKind::Suffixes, ends, lens, &order, &lcps);
    (t_rev, t_suf)
}
