use crate::error::{Error, Result};
use crate::messages::{pinned_message, uniform_message, update, Message, Scalar};

use super::{BoundaryCondition, NodeId, TreeInstance};

/// The rule applied at free internal vertices. [`update`] in normal use.
pub type UpdateRule<S> = fn(&[Message<S>]) -> Result<Message<S>>;

/// The message from `node` to its parent under `boundary`.
///
/// Pinned vertices send the pinned message and their subtrees are not
/// visited; free leaves send the uniform message; free internal vertices
/// apply the update to their children's messages (whatever their number).
pub fn propagate<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
    node: NodeId,
) -> Result<Message<S>> {
    propagate_with(tree, boundary, q, node, update::<S>)
}

pub fn propagate_with<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
    node: NodeId,
    rule: UpdateRule<S>,
) -> Result<Message<S>> {
    check_instance(tree, boundary, q)?;
    tree.node(node)?;
    subtree_message(tree, boundary, q, node, rule)
}

fn check_instance(tree: &TreeInstance, boundary: &BoundaryCondition, q: usize) -> Result<()> {
    if q < tree.b() + 1 || q < 2 {
        return Err(Error::Domain(format!(
            "propagation needs q >= b + 1 (q = {q}, b = {})",
            tree.b()
        )));
    }
    boundary.validate(tree, q)
}

/// Bottom-up evaluation over the part of the subtree above the boundary.
/// The memo lives only for this call.
fn subtree_message<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
    top: NodeId,
    rule: UpdateRule<S>,
) -> Result<Message<S>> {
    let mut order = Vec::new();
    let mut stack = vec![top];
    while let Some(v) = stack.pop() {
        order.push(v);
        if !boundary.is_pinned(v) {
            stack.extend(tree.nodes()[v].children().iter().copied());
        }
    }
    let mut memo: Vec<Option<Message<S>>> = vec![None; tree.len()];
    for &v in order.iter().rev() {
        let node = &tree.nodes()[v];
        let msg = if let Some(color) = boundary.color(v) {
            pinned_message(q, color)?
        } else if node.is_leaf() {
            uniform_message(q)?
        } else {
            let kids: Vec<Message<S>> = node
                .children()
                .iter()
                .map(|&c| memo[c].take().expect("children are evaluated first"))
                .collect();
            rule(&kids)?
        };
        memo[v] = Some(msg);
    }
    Ok(memo[top].take().expect("top is evaluated"))
}

/// Messages from each child of the root, in child order.
pub fn root_child_messages<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
) -> Result<Vec<Message<S>>> {
    check_instance(tree, boundary, q)?;
    tree.node(tree.root())?
        .children()
        .iter()
        .map(|&c| subtree_message(tree, boundary, q, c, update::<S>))
        .collect()
}

/// Distribution of the root color among proper colorings consistent with
/// `boundary`: proportional to the product of the children's messages.
pub fn root_marginal<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
) -> Result<Vec<S>> {
    root_marginal_with(tree, boundary, q, update::<S>)
}

pub fn root_marginal_with<S: Scalar>(
    tree: &TreeInstance,
    boundary: &BoundaryCondition,
    q: usize,
    rule: UpdateRule<S>,
) -> Result<Vec<S>> {
    check_instance(tree, boundary, q)?;
    let root = tree.root();
    if boundary.is_pinned(root) {
        return Err(Error::RootPinned);
    }
    let kids: Vec<Message<S>> = tree.nodes()[root]
        .children()
        .iter()
        .map(|&c| subtree_message(tree, boundary, q, c, rule))
        .collect::<Result<_>>()?;
    if kids.is_empty() {
        return Ok(uniform_message(q)?.into_entries());
    }
    let weights = crate::messages::color_products(&kids)?;
    let total = weights.iter().cloned().fold(S::zero(), |a, x| a + x);
    if total.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(weights.into_iter().map(|w| w / total.clone()).collect())
}

/// A deliberately wrong update (drops the `(q-1)` normalization on the
/// first entry and renormalizes), used to check that the oracle harness
/// notices a broken recursion.
pub fn corrupted_update<S: Scalar>(children: &[Message<S>]) -> Result<Message<S>> {
    let honest = update(children)?;
    let mut entries = honest.into_entries();
    let q = entries.len() as i64;
    entries[0] = entries[0].clone() * S::from_int(q - 1);
    let total = entries.iter().cloned().fold(S::zero(), |a, x| a + x);
    Ok(Message::from_entries_unchecked(
        entries.into_iter().map(|x| x / total.clone()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::{ratio, Rational};
    use crate::tree::build_complete_tree;

    #[test]
    fn depth_one_examples() {
        let t = build_complete_tree(2, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 1);
        let m: Message<Rational> = propagate(&t, &bc, 4, 0).unwrap();
        assert_eq!(m, Message::from_ratios(&[(1, 3), (2, 9), (2, 9), (2, 9)]).unwrap());
        bc.pin(2, 2);
        let m: Message<Rational> = propagate(&t, &bc, 4, 0).unwrap();
        assert_eq!(m, Message::from_ratios(&[(1, 3), (1, 3), (1, 6), (1, 6)]).unwrap());
    }

    #[test]
    fn all_free_is_uniform() {
        for (b, depth, q) in [(2, 4, 3), (2, 3, 4), (3, 3, 5), (1, 6, 2)] {
            let t = build_complete_tree(b, depth).unwrap();
            let bc = BoundaryCondition::default();
            let m: Message<Rational> = propagate(&t, &bc, q, 0).unwrap();
            assert_eq!(m, uniform_message(q).unwrap());
            let p: Vec<Rational> = root_marginal(&t, &bc, q).unwrap();
            assert!(p.iter().all(|x| *x == ratio(1, q as i64)));
        }
    }

    #[test]
    fn pinned_node_ignores_its_subtree() {
        let t = build_complete_tree(2, 2).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 3);
        bc.pin(3, 3);
        let m: Message<Rational> = propagate(&t, &bc, 4, 1).unwrap();
        assert_eq!(m, pinned_message(4, 3).unwrap());
    }

    #[test]
    fn errors() {
        let t = build_complete_tree(2, 1).unwrap();
        let bc = BoundaryCondition::default();
        assert!(matches!(propagate::<f64>(&t, &bc, 4, 9), Err(Error::UnknownNode(9))));
        assert!(matches!(propagate::<f64>(&t, &bc, 2, 0), Err(Error::Domain(_))));
        let mut pinned_root = BoundaryCondition::default();
        pinned_root.pin(0, 1);
        assert!(matches!(root_marginal::<f64>(&t, &pinned_root, 4), Err(Error::RootPinned)));
    }

    #[test]
    fn edge_marginal() {
        let t = build_complete_tree(1, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 1);
        let p: Vec<Rational> = root_marginal(&t, &bc, 4).unwrap();
        assert_eq!(p, vec![ratio(0, 1), ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn irregular_tree_uses_actual_arity() {
        // root with a single child that is pinned; b = 2 declared
        let t = TreeInstance::from_parents(2, &[None, Some(0)]).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 2);
        let m: Message<Rational> = propagate(&t, &bc, 3, 0).unwrap();
        // single child: f_i = (1 - beta_i) / ((q-1) * 1)
        assert_eq!(m, Message::from_ratios(&[(1, 4), (1, 2), (1, 4)]).unwrap());
    }

    #[test]
    fn corrupted_rule_differs() {
        let t = build_complete_tree(2, 1).unwrap();
        let mut bc = BoundaryCondition::default();
        bc.pin(1, 2);
        let honest: Message<Rational> = propagate(&t, &bc, 4, 0).unwrap();
        let broken: Message<Rational> = propagate_with(&t, &bc, 4, 0, corrupted_update).unwrap();
        assert_ne!(honest, broken);
    }
}
