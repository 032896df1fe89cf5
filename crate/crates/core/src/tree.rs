//! Weighted trees over a shared leaf set and their heavy-path decompositions.

use std::fmt;

use thiserror::Error;

pub type NodeId = usize;
pub type PathId = usize;
pub type Weight = u64;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("array lengths disagree: {0}")]
    LengthMismatch(&'static str),
    #[error("node {node} has out-of-range parent {parent}")]
    BadParent { node: NodeId, parent: NodeId },
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("parent links contain a cycle through node {0}")]
    Cycle(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown path {0}")]
    UnknownPath(PathId),
    #[error("path {path} is not on the root walk of node {node}")]
    PathNotOnRootWalk { node: NodeId, path: PathId },
    #[error("invalid tree: {0}")]
    Invalid(ValidationReport),
}

/// A rooted ordered tree with strictly increasing weights from root to leaves
/// and a bijective labelling of its leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    weight: Vec<Weight>,
    leaf_label: Vec<Option<usize>>,
    depth: Vec<u32>,
    root: NodeId,
    leaf_count: usize,
}

impl WeightedTree {
    /// Builds a tree from parent links. Children keep increasing node-id order.
    ///
    /// Only the shape is checked here (one root, no cycles); the weight and
    /// labelling invariants are reported by [`validate_tree`].
    pub fn from_parents(
        parent: Vec<Option<NodeId>>,
        weight: Vec<Weight>,
        leaf_label: Vec<Option<usize>>,
    ) -> Result<Self, TreeError> {
        let len = parent.len();
        if len == 0 {
            return Err(TreeError::Empty);
        }
        if weight.len() != len {
            return Err(TreeError::LengthMismatch("weight"));
        }
        if leaf_label.len() != len {
            return Err(TreeError::LengthMismatch("leaf_label"));
        }
        let mut children = vec![Vec::new(); len];
        let mut roots = Vec::new();
        for (v, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p >= len || p == v => {
                    return Err(TreeError::BadParent { node: v, parent: p })
                }
                Some(p) => children[p].push(v),
                None => roots.push(v),
            }
        }
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        let root = roots[0];

        let mut depth = vec![NONE; len];
        depth[root] = 0;
        let mut stack = vec![root];
        let mut seen = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != len {
            let v = depth.iter().position(|&d| d == NONE).unwrap();
            return Err(TreeError::Cycle(v));
        }
        let leaf_count = children.iter().filter(|c| c.is_empty()).count();
        Ok(WeightedTree {
            parent,
            children,
            weight,
            leaf_label,
            depth,
            root,
            leaf_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Number of leaves, the `n` of the leaf grid.
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn weight(&self, v: NodeId) -> Weight {
        self.weight[v]
    }

    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaf_label(&self, v: NodeId) -> Option<usize> {
        self.leaf_label[v]
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < self.parent.len()
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weight
    }

    pub fn leaf_labels(&self) -> &[Option<usize>] {
        &self.leaf_label
    }

    /// Ancestors of `v` from the root down to `v` inclusive.
    pub fn root_path(&self, v: NodeId) -> Vec<NodeId> {
        let mut path = Vec::with_capacity(self.depth[v] as usize + 1);
        let mut cur = Some(v);
        while let Some(u) = cur {
            path.push(u);
            cur = self.parent[u];
        }
        path.reverse();
        path
    }

    pub fn is_ancestor_or_self(&self, u: NodeId, v: NodeId) -> bool {
        let (du, mut v, mut dv) = (self.depth[u], v, self.depth[v]);
        while dv > du {
            v = self.parent[v].unwrap();
            dv -= 1;
        }
        u == v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Internal node with fewer than two children.
    LowDegree { node: NodeId, children: usize },
    /// `weight(child) <= weight(parent)`.
    NonMonotone { parent: NodeId, child: NodeId },
    LeafWithoutLabel { node: NodeId },
    LabelOnInternal { node: NodeId },
    LabelOutOfRange { node: NodeId, label: usize },
    DuplicateLabel { label: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::LowDegree { node, children } => {
                write!(f, "internal node {node} with {children} child")
            }
            Violation::NonMonotone { parent, child } => {
                write!(f, "weight of child {child} not above parent {parent}")
            }
            Violation::LeafWithoutLabel { node } => write!(f, "leaf {node} has no label"),
            Violation::LabelOnInternal { node } => write!(f, "internal node {node} has a label"),
            Violation::LabelOutOfRange { node, label } => {
                write!(f, "leaf {node} label {label} out of range")
            }
            Violation::DuplicateLabel { label } => write!(f, "label {label} used twice"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_tree(t: &WeightedTree) -> ValidationReport {
    let mut violations = Vec::new();
    let n = t.leaf_count();
    let mut label_seen = vec![false; n];
    for v in 0..t.node_count() {
        let kids = t.children(v);
        if kids.len() == 1 {
            violations.push(Violation::LowDegree { node: v, children: 1 });
        }
        for &c in kids {
            if t.weight(c) <= t.weight(v) {
                violations.push(Violation::NonMonotone { parent: v, child: c });
            }
        }
        match (kids.is_empty(), t.leaf_label(v)) {
            (true, None) => violations.push(Violation::LeafWithoutLabel { node: v }),
            (false, Some(_)) => violations.push(Violation::LabelOnInternal { node: v }),
            (true, Some(label)) if label >= n => {
                violations.push(Violation::LabelOutOfRange { node: v, label })
            }
            (true, Some(label)) => {
                if std::mem::replace(&mut label_seen[label], true) {
                    violations.push(Violation::DuplicateLabel { label });
                }
            }
            (false, None) => {}
        }
    }
    ValidationReport { violations }
}

/// Which side of its parent's child list each heavy child is moved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    HeavyLeftmost,
    HeavyRightmost,
}

/// Heavy-path decomposition of a [`WeightedTree`], with the leaf order of the
/// reordered tree and per-leaf tables of lowest ancestors on each heavy path.
#[derive(Debug, Clone)]
pub struct HeavyPathDecomposition {
    orientation: Orientation,
    path_of: Vec<u32>,
    path_nodes: Vec<Vec<NodeId>>,
    path_parent: Vec<Option<PathId>>,
    path_level: Vec<u32>,
    ordered_children: Vec<Vec<NodeId>>,
    interval: Vec<(u32, u32)>,
    leaf_rank: Vec<u32>,
    leaf_at_rank: Vec<NodeId>,
    leaf_node: Vec<NodeId>,
    // per leaf label, root path first; entry k lives on a path of level k
    ancestor_table: Vec<Vec<(PathId, NodeId)>>,
    path_tree_height: u32,
}

impl HeavyPathDecomposition {
    /// Decomposes a valid tree. The heavy child is the one with the most
    /// leaves, ties going to the smaller node id.
    pub fn new(t: &WeightedTree, orientation: Orientation) -> Result<Self, TreeError> {
        let report = validate_tree(t);
        if !report.is_ok() {
            return Err(TreeError::Invalid(report));
        }
        let len = t.node_count();

        // BFS order, so reversed it visits children before parents.
        let mut order = Vec::with_capacity(len);
        order.push(t.root());
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(t.children(v));
        }

        let mut leaves = vec![0u32; len];
        for &v in order.iter().rev() {
            leaves[v] = if t.is_leaf(v) {
                1
            } else {
                t.children(v).iter().map(|&c| leaves[c]).sum()
            };
        }

        let mut ordered_children = vec![Vec::new(); len];
        for v in 0..len {
            let kids = t.children(v);
            if kids.is_empty() {
                continue;
            }
            let heavy = *kids
                .iter()
                .max_by(|&&x, &&y| leaves[x].cmp(&leaves[y]).then(y.cmp(&x)))
                .unwrap();
            let light = kids.iter().copied().filter(|&c| c != heavy);
            ordered_children[v] = match orientation {
                Orientation::HeavyLeftmost => std::iter::once(heavy).chain(light).collect(),
                Orientation::HeavyRightmost => light.chain(std::iter::once(heavy)).collect(),
            };
        }
        let heavy_child = |v: NodeId| -> Option<NodeId> {
            let kids = &ordered_children[v];
            match orientation {
                Orientation::HeavyLeftmost => kids.first().copied(),
                Orientation::HeavyRightmost => kids.last().copied(),
            }
        };

        let mut path_of = vec![NONE; len];
        let mut path_nodes: Vec<Vec<NodeId>> = Vec::new();
        let mut path_parent = Vec::new();
        let mut path_level = Vec::new();
        for &v in &order {
            if path_of[v] != NONE {
                continue;
            }
            let id = path_nodes.len();
            let (pp, level) = match t.parent(v) {
                Some(p) => {
                    let pp = path_of[p] as usize;
                    (Some(pp), path_level[pp] + 1)
                }
                None => (None, 0),
            };
            let mut nodes = Vec::new();
            let mut cur = Some(v);
            while let Some(u) = cur {
                path_of[u] = id as u32;
                nodes.push(u);
                cur = heavy_child(u);
            }
            path_nodes.push(nodes);
            path_parent.push(pp);
            path_level.push(level);
        }
        let path_tree_height = path_level.iter().copied().max().unwrap_or(0);

        let n = t.leaf_count();
        let mut interval = vec![(0u32, 0u32); len];
        let mut leaf_rank = vec![0u32; n];
        let mut leaf_at_rank = Vec::with_capacity(n);
        let mut leaf_node = vec![0; n];
        let mut ancestor_table = vec![Vec::new(); n];
        // (node, entered); the ancestor chain mirrors the DFS stack
        let mut stack = vec![(t.root(), false)];
        let mut chain: Vec<(PathId, NodeId)> = Vec::new();
        while let Some((v, entered)) = stack.pop() {
            let p = path_of[v] as usize;
            if entered {
                let kids = &ordered_children[v];
                interval[v] = (interval[kids[0]].0, interval[*kids.last().unwrap()].1);
                if chain.last().map(|e| e.1) == Some(v) {
                    chain.pop();
                    if let Some(parent) = t.parent(v) {
                        if path_of[parent] as usize == p {
                            chain.push((p, parent));
                        }
                    }
                }
                continue;
            }
            if chain.last().map(|e| e.0) == Some(p) {
                chain.pop();
            }
            chain.push((p, v));
            if t.is_leaf(v) {
                let r = leaf_at_rank.len() as u32;
                let label = t.leaf_label(v).unwrap();
                interval[v] = (r, r);
                leaf_rank[label] = r;
                leaf_at_rank.push(v);
                leaf_node[label] = v;
                ancestor_table[label] = chain.clone();
                chain.pop();
                if let Some(parent) = t.parent(v) {
                    if path_of[parent] as usize == p {
                        chain.push((p, parent));
                    }
                }
            } else {
                stack.push((v, true));
                for &c in ordered_children[v].iter().rev() {
                    stack.push((c, false));
                }
            }
        }

        Ok(HeavyPathDecomposition {
            orientation,
            path_of,
            path_nodes,
            path_parent,
            path_level,
            ordered_children,
            interval,
            leaf_rank,
            leaf_at_rank,
            leaf_node,
            ancestor_table,
            path_tree_height,
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn node_count(&self) -> usize {
        self.path_of.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_rank.len()
    }

    pub fn path_count(&self) -> usize {
        self.path_nodes.len()
    }

    pub fn path_of(&self, v: NodeId) -> PathId {
        self.path_of[v] as usize
    }

    /// Nodes of a path in increasing depth.
    pub fn path_nodes(&self, p: PathId) -> &[NodeId] {
        &self.path_nodes[p]
    }

    pub fn path_head(&self, p: PathId) -> NodeId {
        self.path_nodes[p][0]
    }

    pub fn path_tail(&self, p: PathId) -> NodeId {
        *self.path_nodes[p].last().unwrap()
    }

    /// Parent of `p` in the path tree.
    pub fn path_parent(&self, p: PathId) -> Option<PathId> {
        self.path_parent[p]
    }

    /// Depth of `p` in the path tree; the root path has level 0.
    pub fn path_level(&self, p: PathId) -> u32 {
        self.path_level[p]
    }

    /// Height of the path tree, in edges.
    pub fn path_tree_height(&self) -> u32 {
        self.path_tree_height
    }

    pub fn ordered_children(&self, v: NodeId) -> &[NodeId] {
        &self.ordered_children[v]
    }

    /// Rank of the leaf labelled `label` in the reordered tree.
    pub fn leaf_rank(&self, label: usize) -> usize {
        self.leaf_rank[label] as usize
    }

    /// Leaf node at a left-to-right rank.
    pub fn leaf_at_rank(&self, rank: usize) -> NodeId {
        self.leaf_at_rank[rank]
    }

    pub fn leaf_node(&self, label: usize) -> NodeId {
        self.leaf_node[label]
    }

    /// For each heavy path on the root-to-leaf walk, the lowest node of that
    /// path that is an ancestor of the leaf. Root path first.
    pub fn ancestor_table(&self, label: usize) -> &[(PathId, NodeId)] {
        &self.ancestor_table[label]
    }

    /// Lowest ancestor of leaf `label` on path `p`, if `p` is on its root walk.
    pub fn lowest_ancestor_on_path(&self, label: usize, p: PathId) -> Option<NodeId> {
        self.ancestor_table[label]
            .get(self.path_level[p] as usize)
            .filter(|e| e.0 == p)
            .map(|e| e.1)
    }

    /// Inclusive range of leaf ranks below `v`.
    pub fn leaf_interval(&self, v: NodeId) -> Result<(usize, usize), TreeError> {
        self.interval
            .get(v)
            .map(|&(a, b)| (a as usize, b as usize))
            .ok_or(TreeError::UnknownNode(v))
    }

    pub(crate) fn interval(&self, v: NodeId) -> (usize, usize) {
        let (a, b) = self.interval[v];
        (a as usize, b as usize)
    }

    /// Deepest node of path `p` that is an ancestor-or-self of `v`.
    pub fn deepest_ancestor_in_path(
        &self,
        t: &WeightedTree,
        v: NodeId,
        p: PathId,
    ) -> Result<NodeId, TreeError> {
        if v >= self.node_count() {
            return Err(TreeError::UnknownNode(v));
        }
        if p >= self.path_count() {
            return Err(TreeError::UnknownPath(p));
        }
        let mut u = v;
        loop {
            let q = self.path_of(u);
            if q == p {
                return Ok(u);
            }
            if self.path_level[q] <= self.path_level[p] {
                return Err(TreeError::PathNotOnRootWalk { node: v, path: p });
            }
            u = t.parent(self.path_head(q)).unwrap();
        }
    }

    /// The heavy paths met on the walk from the root to `v`, each with the
    /// deepest ancestor-or-self of `v` on it. Root path first.
    pub fn path_ancestors(&self, t: &WeightedTree, v: NodeId) -> Vec<(PathId, NodeId)> {
        let p = self.path_of(v);
        let mut out = Vec::with_capacity(self.path_level[p] as usize + 1);
        let mut u = v;
        loop {
            let q = self.path_of(u);
            out.push((q, u));
            match t.parent(self.path_head(q)) {
                Some(x) => u = x,
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// Child of `v` on its own heavy path, if `v` is not the tail.
    pub fn path_child(&self, v: NodeId) -> Option<NodeId> {
        let kids = &self.ordered_children[v];
        let c = match self.orientation {
            Orientation::HeavyLeftmost => kids.first(),
            Orientation::HeavyRightmost => kids.last(),
        };
        c.copied()
    }
}

/// `⌈log₂ n⌉` with `ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
