use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};

use super::{root_marginal, NodeId, TreeInstance};

/// A partial coloring of the tree. Colors are 1-indexed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundaryCondition {
    pinned: BTreeMap<NodeId, usize>,
}

impl BoundaryCondition {
    pub fn pin(&mut self, node: NodeId, color: usize) {
        self.pinned.insert(node, color);
    }

    pub fn unpin(&mut self, node: NodeId) -> Option<usize> {
        self.pinned.remove(&node)
    }

    pub fn color(&self, node: NodeId) -> Option<usize> {
        self.pinned.get(&node).copied()
    }

    pub fn is_pinned(&self, node: NodeId) -> bool {
        self.pinned.contains_key(&node)
    }

    pub fn len(&self) -> usize {
        self.pinned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.pinned.iter().map(|(&n, &c)| (n, c))
    }

    /// The pinned vertex set `U`.
    pub fn support(&self) -> BTreeSet<NodeId> {
        self.pinned.keys().copied().collect()
    }

    /// Every pinned node exists and every color lies in `[1, q]`.
    pub fn validate(&self, tree: &TreeInstance, q: usize) -> Result<()> {
        for (node, color) in self.iter() {
            tree.node(node)?;
            if color == 0 || color > q {
                return Err(Error::InvalidColor { color, q });
            }
        }
        Ok(())
    }

    /// Apply a color permutation (0-indexed: color `c` becomes `perm[c-1] + 1`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            pinned: self.pinned.iter().map(|(&n, &c)| (n, perm[c - 1] + 1)).collect(),
        }
    }
}

/// Two boundary colorings on the same vertex set together with the set
/// `delta` of vertices where they disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPair {
    sigma: BoundaryCondition,
    phi: BoundaryCondition,
    delta: BTreeSet<NodeId>,
}

impl BoundaryPair {
    /// Rejects pairs with different supports or with no disagreement.
    pub fn new(sigma: BoundaryCondition, phi: BoundaryCondition) -> Result<Self> {
        if sigma.support() != phi.support() {
            return Err(Error::InvalidBoundaryPair(
                "sigma and phi must pin the same vertices".into(),
            ));
        }
        let delta: BTreeSet<NodeId> = sigma
            .iter()
            .filter(|&(n, c)| phi.color(n) != Some(c))
            .map(|(n, _)| n)
            .collect();
        if delta.is_empty() {
            return Err(Error::InvalidBoundaryPair(
                "sigma and phi agree everywhere; the difference set is empty".into(),
            ));
        }
        Ok(Self { sigma, phi, delta })
    }

    /// Like [`BoundaryPair::new`], additionally checking a stored difference set.
    pub fn with_delta(
        sigma: BoundaryCondition,
        phi: BoundaryCondition,
        delta: BTreeSet<NodeId>,
    ) -> Result<Self> {
        let pair = Self::new(sigma, phi)?;
        if pair.delta != delta {
            return Err(Error::InvalidBoundaryPair(format!(
                "stored difference set {delta:?} does not match {:?}",
                pair.delta
            )));
        }
        Ok(pair)
    }

    pub fn sigma(&self) -> &BoundaryCondition {
        &self.sigma
    }

    pub fn phi(&self) -> &BoundaryCondition {
        &self.phi
    }

    pub fn delta(&self) -> &BTreeSet<NodeId> {
        &self.delta
    }

    /// Smallest depth of a vertex in `delta`, which is its distance to the root.
    pub fn distance_to_root(&self, tree: &TreeInstance) -> usize {
        self.delta
            .iter()
            .map(|&n| tree.nodes()[n].depth())
            .min()
            .unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOptions {
    /// Number of level-`d` vertices whose color differs between the two sides.
    pub delta_size: usize,
    /// Resampling budget for unsatisfiable draws.
    pub retries: usize,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            delta_size: 1,
            retries: 100,
        }
    }
}

/// Pin the whole level `d` with random colors (sigma), then recolor one
/// random level-`d` vertex (or `delta_size` of them) to get phi.
pub fn boundary_pair_at_distance<R: Rng + ?Sized>(
    tree: &TreeInstance,
    q: usize,
    d: usize,
    rng: &mut R,
) -> Result<BoundaryPair> {
    boundary_pair_at_distance_with(tree, q, d, PairOptions::default(), rng)
}

pub fn boundary_pair_at_distance_with<R: Rng + ?Sized>(
    tree: &TreeInstance,
    q: usize,
    d: usize,
    opts: PairOptions,
    rng: &mut R,
) -> Result<BoundaryPair> {
    if d == 0 || d > tree.depth() {
        return Err(Error::Domain(format!(
            "distance {d} outside [1, {}]",
            tree.depth()
        )));
    }
    if q < tree.b() + 2 {
        return Err(Error::Domain(format!(
            "boundary pairs need q >= b + 2 (q = {q}, b = {})",
            tree.b()
        )));
    }
    let level = tree.nodes_at_depth(d);
    if opts.delta_size == 0 || opts.delta_size > level.len() {
        return Err(Error::Domain(format!(
            "delta size {} outside [1, {}]",
            opts.delta_size,
            level.len()
        )));
    }
    for _ in 0..opts.retries {
        let mut sigma = BoundaryCondition::default();
        for &v in &level {
            sigma.pin(v, rng.random_range(1..=q));
        }
        let mut phi = sigma.clone();
        for i in sample(rng, level.len(), opts.delta_size) {
            let v = level[i];
            let old = sigma.color(v).expect("level is pinned");
            // uniform over the q - 1 other colors
            let mut c = rng.random_range(1..q);
            if c >= old {
                c += 1;
            }
            phi.pin(v, c);
        }
        let satisfiable = |bc: &BoundaryCondition| match root_marginal::<f64>(tree, bc, q) {
            Ok(_) => Ok(true),
            Err(Error::ZeroDenominator) => Ok(false),
            Err(e) => Err(e),
        };
        if satisfiable(&sigma)? && satisfiable(&phi)? {
            return BoundaryPair::new(sigma, phi);
        }
    }
    Err(Error::RetriesExhausted(opts.retries))
}
