//! Finite rooted trees with partial boundary colorings.

mod boundary;
mod enumerate;
mod propagate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use boundary::{boundary_pair_at_distance, boundary_pair_at_distance_with, BoundaryCondition, BoundaryPair, PairOptions};
pub use enumerate::{brute_force_marginal, brute_force_message, Enumerator, DEFAULT_ENUMERATION_CAP};
pub use propagate::{
    corrupted_update, propagate, propagate_with, root_child_messages, root_marginal, root_marginal_with,
    UpdateRule,
};

pub type NodeId = usize;

/// Default upper bound on the number of nodes `build_complete_tree` will allocate.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    depth: usize,
}

impl Node {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A rooted tree in which every vertex has at most `b` children.
///
/// Node ids are dense, `0..len()`. Complete trees are numbered in
/// breadth-first order with the root at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    b: usize,
    nodes: Vec<Node>,
    root: NodeId,
    depth: usize,
    complete: bool,
}

impl TreeInstance {
    pub fn b(&self) -> usize {
        self.b
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when every internal vertex has exactly `b` children and all
    /// leaves sit at the same depth.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn nodes_at_depth(&self, depth: usize) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].depth == depth)
            .collect()
    }

    /// Build from a parent list. `parents[i]` is the parent of node `i`;
    /// exactly one entry must be `None`.
    pub fn from_parents(b: usize, parents: &[Option<NodeId>]) -> Result<Self> {
        if b == 0 {
            return Err(Error::MalformedTree("branching factor must be at least 1".into()));
        }
        let n = parents.len();
        let mut roots = parents.iter().enumerate().filter(|(_, p)| p.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some((r, _)), None) => r,
            (None, _) => return Err(Error::MalformedTree("no root".into())),
            (Some(_), Some(_)) => return Err(Error::MalformedTree("more than one root".into())),
        };
        let mut nodes: Vec<Node> = (0..n)
            .map(|i| Node {
                parent: parents[i],
                children: Vec::new(),
                depth: 0,
            })
            .collect();
        for (i, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::MalformedTree(format!("node {i} has unknown parent {p}")));
                }
                if p == i {
                    return Err(Error::MalformedTree(format!("node {i} is its own parent")));
                }
                nodes[p].children.push(i);
            }
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.children.len() > b {
                return Err(Error::MalformedTree(format!(
                    "node {i} has {} children, more than b = {b}",
                    node.children.len()
                )));
            }
        }
        // depths by BFS; unreached nodes mean a cycle or a detached component
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            let d = nodes[v].depth;
            for c in nodes[v].children.clone() {
                if seen[c] {
                    return Err(Error::MalformedTree(format!("node {c} reached twice")));
                }
                seen[c] = true;
                reached += 1;
                nodes[c].depth = d + 1;
                queue.push_back(c);
            }
        }
        if reached != n {
            return Err(Error::MalformedTree(format!(
                "{} nodes are not connected to the root",
                n - reached
            )));
        }
        let depth = nodes.iter().map(|x| x.depth).max().unwrap_or(0);
        let complete = nodes
            .iter()
            .all(|x| if x.is_leaf() { x.depth == depth } else { x.children.len() == b });
        Ok(Self {
            b,
            nodes,
            root,
            depth,
            complete,
        })
    }

    pub fn parents(&self) -> Vec<Option<NodeId>> {
        self.nodes.iter().map(|n| n.parent).collect()
    }
}

/// Node count of a complete `b`-ary tree of the given depth, or `None` on overflow.
pub fn complete_tree_size(b: usize, depth: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut level: usize = 1;
    for d in 0..=depth {
        total = total.checked_add(level)?;
        if d < depth {
            level = level.checked_mul(b)?;
        }
    }
    Some(total)
}

pub fn build_complete_tree(b: usize, depth: usize) -> Result<TreeInstance> {
    build_complete_tree_with_budget(b, depth, DEFAULT_NODE_BUDGET)
}

pub fn build_complete_tree_with_budget(b: usize, depth: usize, budget: usize) -> Result<TreeInstance> {
    if b == 0 {
        return Err(Error::Domain("branching factor must be at least 1".into()));
    }
    let n = complete_tree_size(b, depth)
        .filter(|&n| n <= budget)
        .ok_or(Error::BudgetExceeded { b, depth, budget })?;
    let mut nodes = Vec::with_capacity(n);
    let mut level_start = 0;
    let mut level_len = 1;
    for d in 0..=depth {
        for i in level_start..level_start + level_len {
            let parent = if i == 0 { None } else { Some((i - 1) / b) };
            let children = if d < depth {
                (b * i + 1..=b * i + b).collect()
            } else {
                Vec::new()
            };
            nodes.push(Node {
                parent,
                children,
                depth: d,
            });
        }
        level_start += level_len;
        level_len *= b;
    }
    Ok(TreeInstance {
        b,
        nodes,
        root: 0,
        depth,
        complete: true,
    })
}

/// One row of the tree file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub pinned: Option<usize>,
}

/// JSON file holding a tree, a color count, and a boundary coloring:
/// `{"b": int, "q": int, "nodes": [{"id", "parent", "pinned"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub b: usize,
    pub q: usize,
    pub nodes: Vec<NodeRecord>,
}

impl TreeFile {
    pub fn from_instance(tree: &TreeInstance, boundary: &BoundaryCondition, q: usize) -> Self {
        let nodes = tree
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeRecord {
                id,
                parent: n.parent,
                pinned: boundary.color(id),
            })
            .collect();
        Self { b: tree.b, q, nodes }
    }

    pub fn to_instance(&self) -> Result<(TreeInstance, BoundaryCondition)> {
        let n = self.nodes.len();
        let mut parents = vec![None; n];
        let mut seen = vec![false; n];
        let mut boundary = BoundaryCondition::default();
        for rec in &self.nodes {
            if rec.id >= n || seen[rec.id] {
                return Err(Error::MalformedTree(format!(
                    "node ids must be exactly 0..{n}, got {} twice or out of range",
                    rec.id
                )));
            }
            seen[rec.id] = true;
            parents[rec.id] = rec.parent;
            if let Some(c) = rec.pinned {
                boundary.pin(rec.id, c);
            }
        }
        let tree = TreeInstance::from_parents(self.b, &parents)?;
        boundary.validate(&tree, self.q)?;
        Ok((tree, boundary))
    }

    /// Canonical text form: pretty JSON, LF line endings, trailing newline.
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_tree_sizes() {
        assert_eq!(build_complete_tree(2, 2).unwrap().len(), 7);
        assert_eq!(build_complete_tree(3, 1).unwrap().len(), 4);
        assert_eq!(build_complete_tree(2, 0).unwrap().len(), 1);
        assert_eq!(build_complete_tree(1, 4).unwrap().len(), 5);
        for b in 2..5usize {
            for depth in 0..6usize {
                let n = build_complete_tree(b, depth).unwrap().len();
                assert_eq!(n, (b.pow(depth as u32 + 1) - 1) / (b - 1));
            }
        }
    }

    #[test]
    fn complete_tree_budget() {
        assert!(matches!(
            build_complete_tree_with_budget(2, 10, 100),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(build_complete_tree(2, 200).is_err());
        assert!(build_complete_tree(0, 1).is_err());
    }

    #[test]
    fn complete_tree_links() {
        let t = build_complete_tree(3, 2).unwrap();
        assert_eq!(t.node(0).unwrap().children(), &[1, 2, 3]);
        assert_eq!(t.node(5).unwrap().parent(), Some(1));
        assert_eq!(t.nodes_at_depth(2), (4..13).collect::<Vec<_>>());
        assert!(t.is_complete());
        let rebuilt = TreeInstance::from_parents(3, &t.parents()).unwrap();
        assert_eq!(rebuilt, t);
    }

    #[test]
    fn from_parents_rejects_bad_shapes() {
        assert!(TreeInstance::from_parents(2, &[None, None]).is_err());
        assert!(TreeInstance::from_parents(2, &[Some(1), Some(0)]).is_err());
        assert!(TreeInstance::from_parents(1, &[None, Some(0), Some(0)]).is_err());
        assert!(TreeInstance::from_parents(2, &[None, Some(5)]).is_err());
        // cycle detached from the root
        assert!(TreeInstance::from_parents(2, &[None, Some(2), Some(1)]).is_err());
        let t = TreeInstance::from_parents(2, &[None, Some(0), Some(1)]).unwrap();
        assert_eq!(t.depth(), 2);
        assert!(!t.is_complete());
    }

    #[test]
    fn tree_file_round_trip_is_bit_exact() {
        let t = build_complete_tree(2, 2).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(3, 1);
        bc.pin(6, 4);
        let file = TreeFile::from_instance(&t, &bc, 4);
        let text = file.to_json_string().unwrap();
        assert!(text.starts_with("{\n  \"b\": 2,\n  \"q\": 4,\n  \"nodes\": ["));
        assert!(text.contains("\"id\": 3,\n      \"parent\": 1,\n      \"pinned\": 1"));
        assert!(text.contains("\"parent\": null"));
        let parsed = TreeFile::from_json_str(&text).unwrap();
        assert_eq!(parsed.to_json_string().unwrap(), text);
        let (t2, bc2) = parsed.to_instance().unwrap();
        assert_eq!(t2, t);
        assert_eq!(bc2, bc);
    }

    #[test]
    fn tree_file_validation() {
        let bad_color = r#"{"b":2,"q":3,"nodes":[{"id":0,"parent":null,"pinned":4}]}"#;
        let f = TreeFile::from_json_str(bad_color).unwrap();
        assert!(matches!(f.to_instance(), Err(Error::InvalidColor { .. })));
        let dup = r#"{"b":2,"q":3,"nodes":[{"id":0,"parent":null,"pinned":null},{"id":0,"parent":0,"pinned":null}]}"#;
        assert!(TreeFile::from_json_str(dup).unwrap().to_instance().is_err());
    }
}
