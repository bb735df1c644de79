//! Exact counting of proper colorings by brute force.
//!
//! The oracle enumerates the part of a subtree reachable without passing
//! below a pinned vertex. Given its color, whatever hangs below a pinned
//! vertex is conditionally independent of the rest and only multiplies every
//! count by the same factor, so the normalized results are unaffected.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::messages::{Message, Rational};

use super::{BoundaryCondition, NodeId, TreeInstance};

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    /// Maximum number of free vertices in the enumerated region.
    pub cap: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

struct Region {
    order: Vec<NodeId>,
    /// Position in `order` of each vertex's parent (`None` for the top).
    parent_pos: Vec<Option<usize>>,
    fixed: Vec<Option<usize>>,
}

impl Enumerator {
    pub fn new(cap: usize) -> Self {
        Self { cap }
    }

    fn region(
        &self,
        tree: &TreeInstance,
        boundary: &BoundaryCondition,
        q: usize,
        top: NodeId,
    ) -> Result<Region> {
        tree.node(top)?;
        boundary.validate(tree, q)?;
        let mut order = Vec::new();
        let mut parent_pos = Vec::new();
        let mut stack = vec![(top, None)];
        while let Some((v, pp)) = stack.pop() {
            let pos = order.len();
            order.push(v);
            parent_pos.push(pp);
            if !boundary.is_pinned(v) {
                for &c in tree.nodes()[v].children().iter().rev() {
                    stack.push((c, Some(pos)));
                }
            }
        }
        let fixed: Vec<Option<usize>> = order.iter().map(|&v| boundary.color(v)).collect();
        let free = fixed.iter().filter(|c| c.is_none()).count();
        if free > self.cap {
            return Err(Error::CapExceeded { free, cap: self.cap });
        }
        Ok(Region {
            order,
            parent_pos,
            fixed,
        })
    }

    /// Number of proper colorings of the region, split by the color of `top`
    /// (index `c - 1` for color `c`).
    pub fn counts(
        &self,
        tree: &TreeInstance,
        boundary: &BoundaryCondition,
        q: usize,
        top: NodeId,
    ) -> Result<Vec<u128>> {
        let region = self.region(tree, boundary, q, top)?;
        let mut colors = vec![0usize; region.order.len()];
        let mut counts = vec![0u128; q];
        assign(&region, q, 0, &mut colors, &mut counts);
        Ok(counts)
    }

    pub fn message(
        &self,
        tree: &TreeInstance,
        boundary: &BoundaryCondition,
        q: usize,
        node: NodeId,
    ) -> Result<Message<Rational>> {
        let counts = self.counts(tree, boundary, q, node)?;
        let total: u128 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Unsatisfiable);
        }
        // entry i = #{colorings with color(node) != i} / ((q-1) * total)
        let denom = BigInt::from(total) * BigInt::from(q as u64 - 1);
        let entries = counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(total - c), denom.clone()))
            .collect();
        Message::new(entries)
    }

    pub fn marginal(
        &self,
        tree: &TreeInstance,
        boundary: &BoundaryCondition,
        q: usize,
    ) -> Result<Vec<Rational>> {
        if boundary.is_pinned(tree.root()) {
            return Err(Error::RootPinned);
        }
        let counts = self.counts(tree, boundary, q, tree.root())?;
        let total: u128 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Unsatisfiable);
        }
        Ok(counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), BigInt::from(total)))
            .collect())
    }
}

// Depth-first over the preorder; a vertex never takes its parent's color.
fn assign(region: &Region, q: usize, pos: usize, colors: &mut [usize], counts: &mut [u128]) {
    if pos == region.order.len() {
        counts[colors[0] - 1] += 1;
        return;
    }
    let forbidden = region.parent_pos[pos].map(|p| colors[p]);
    match region.fixed[pos] {
        Some(c) => {
            if forbidden != Some(c) {
                colors[pos] = c;
                assign(region, q, pos + 1, colors, counts);
            }
        }
        None => {
            for c in 1..=q {
                if forbidden != Some(c) {
                    colors[pos] = c;
                    assign(region, q, pos + 1, colors, counts);
                }
            }
        }
    }
}

/// Brute-force message from `node` to its parent, with the default cap.
pub fn brute_force_message(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
    node: NodeId,
) -> Result<Message<Rational>> {
    Enumerator::default().message(tree, boundary, q, node)
}

/// Brute-force root color distribution, with the default cap.
pub fn brute_force_marginal(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
) -> Result<Vec<Rational>> {
    Enumerator::default().marginal(tree, boundary, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::ratio;
    use crate::tree::build_complete_tree;

    #[test]
    fn single_free_node() {
        let t = build_complete_tree(2, 0).unwrap();
        let m = brute_force_message(&t, &BoundaryCondition::default(), 4, 0).unwrap();
        assert_eq!(m, Message::from_ratios(&[(1, 4); 4]).unwrap());
    }

    #[test]
    fn two_pinned_children() {
        let t = build_complete_tree(2, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 1);
        bc.pin(2, 2);
        let counts = Enumerator::default().counts(&t, &bc, 4, 0).unwrap();
        assert_eq!(counts, vec![0, 0, 1, 1]);
        let m = brute_force_message(&t, &bc, 4, 0).unwrap();
        assert_eq!(m, Message::from_ratios(&[(1, 3), (1, 3), (1, 6), (1, 6)]).unwrap());
    }

    #[test]
    fn free_path_marginal_is_uniform() {
        // b = 1 chain of 3 vertices, rooted at the middle
        let t = TreeInstance::from_parents(2, &[None, Some(0), Some(0)]).unwrap();
        let p = brute_force_marginal(&t, &BoundaryCondition::default(), 3).unwrap();
        assert!(p.iter().all(|x| *x == ratio(1, 3)));
    }

    #[test]
    fn edge_with_pinned_endpoint() {
        let t = build_complete_tree(1, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 1);
        let p = brute_force_marginal(&t, &bc, 4).unwrap();
        assert_eq!(p, vec![ratio(0, 1), ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
        // unpinned: 12 proper colorings, 3 per root color
        let counts = Enumerator::default()
            .counts(&t, &BoundaryCondition::default(), 4, 0)
            .unwrap();
        assert_eq!(counts, vec![3, 3, 3, 3]);
    }

    #[test]
    fn cap_and_unsatisfiable() {
        let t = build_complete_tree(2, 3).unwrap();
        let e = Enumerator::new(10);
        assert!(matches!(
            e.counts(&t, &BoundaryCondition::default(), 3, 0),
            Err(Error::CapExceeded { free: 15, cap: 10 })
        ));
        // q = 2, root with children pinned to both colors
        let t = build_complete_tree(2, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 1);
        bc.pin(2, 2);
        assert!(matches!(brute_force_message(&t, &bc, 2, 0), Err(Error::Unsatisfiable)));
    }

    #[test]
    fn leaves_all_pinned_to_one_color() {
        let t = build_complete_tree(2, 2).unwrap();
        let mut bc = BoundaryCondition::default();
        for v in 3..7 {
            bc.pin(v, 1);
        }
        // each depth-1 vertex takes one of colors 2..4; the root avoids both
        // children: root = 1 gets 3*3 = 9, root = c != 1 gets 2*2 = 4
        let counts = Enumerator::default().counts(&t, &bc, 4, 0).unwrap();
        assert_eq!(counts, vec![9, 4, 4, 4]);
        let p = brute_force_marginal(&t, &bc, 4).unwrap();
        assert_eq!(p, vec![ratio(9, 21), ratio(4, 21), ratio(4, 21), ratio(4, 21)]);
    }
}
