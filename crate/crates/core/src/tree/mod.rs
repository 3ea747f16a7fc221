//! Exceptional trees of an elimination of indeterminacies.
//!
//! Node `i` stands for the proper transform `F̂ᵢ` of the `i`-th exceptional
//! curve. A point blown up on `F̂ᵢ` produces a child of `i`, so every parent id
//! is smaller than its children's ids. The optional `gamma` label records
//! `φ̃_* F̂ᵢ = γᵢ L`.

mod realize;
mod shape;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, BlowupContext, DivisorClass, PolarizedGenus};

pub use realize::{realize_betas, ShapeBudget, ShapeCatalog};
pub use shape::{classify_shapes, ForestShape, RootedShape, ShapeParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node id must be positive")]
    ZeroId,
    #[error("node {0} appears more than once")]
    DuplicateId(usize),
    #[error("node ids must be exactly 1..={p}; {missing} is missing")]
    MissingId { p: usize, missing: usize },
    #[error("node {child} has parent {parent}, which is not blown up before it")]
    ForwardParent { child: usize, parent: usize },
    #[error("unknown node {0}")]
    UnknownId(usize),
    #[error("node {0} carries no gamma label")]
    MissingGamma(usize),
    #[error("expected {expected} gamma labels, got {got}")]
    GammaCount { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
}

pub type Result<T> = std::result::Result<T, TreeError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u64>,
}

/// Intersection forest of the proper transforms `F̂₁, …, F̂_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalTree {
    // nodes[i] has id i + 1
    nodes: Vec<TreeNode>,
    children: Vec<Vec<usize>>,
}

impl ExceptionalTree {
    /// Builds a forest from records given in any order. Ids must be exactly
    /// `1..=p` and each parent id must be smaller than its child's id.
    pub fn new(mut nodes: Vec<TreeNode>) -> Result<Self> {
        let p = nodes.len();
        let mut seen = vec![false; p];
        for n in &nodes {
            if n.id == 0 {
                return Err(TreeError::ZeroId);
            }
            if n.id > p {
                let missing = seen.iter().position(|s| !s).unwrap_or(0) + 1;
                return Err(TreeError::MissingId { p, missing });
            }
            if std::mem::replace(&mut seen[n.id - 1], true) {
                return Err(TreeError::DuplicateId(n.id));
            }
        }
        nodes.sort_by_key(|n| n.id);
        let mut children = vec![Vec::new(); p];
        for n in &nodes {
            if let Some(parent) = n.parent {
                if parent == 0 || parent >= n.id {
                    return Err(TreeError::ForwardParent {
                        child: n.id,
                        parent,
                    });
                }
                children[parent - 1].push(n.id);
            }
        }
        Ok(Self { nodes, children })
    }

    /// `parents[i]` is the parent of node `i + 1`.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        Self::new(
            parents
                .iter()
                .enumerate()
                .map(|(i, &parent)| TreeNode {
                    id: i + 1,
                    parent,
                    gamma: None,
                })
                .collect(),
        )
    }

    pub fn with_gammas(mut self, gammas: &[u64]) -> Result<Self> {
        if gammas.len() != self.nodes.len() {
            return Err(TreeError::GammaCount {
                expected: self.nodes.len(),
                got: gammas.len(),
            });
        }
        for (n, &g) in self.nodes.iter_mut().zip(gammas) {
            n.gamma = Some(g);
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    fn node(&self, id: usize) -> Result<&TreeNode> {
        id.checked_sub(1)
            .and_then(|i| self.nodes.get(i))
            .ok_or(TreeError::UnknownId(id))
    }

    pub fn parent(&self, id: usize) -> Result<Option<usize>> {
        Ok(self.node(id)?.parent)
    }

    pub fn children(&self, id: usize) -> Result<&[usize]> {
        self.node(id)?;
        Ok(&self.children[id - 1])
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .map(|n| n.id)
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.children
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(i, _)| i + 1)
    }

    /// Depth `mᵢ`: the node itself plus its strict ancestors.
    pub fn node_depth(&self, id: usize) -> Result<usize> {
        let mut depth = 1;
        let mut cur = self.node(id)?;
        while let Some(parent) = cur.parent {
            depth += 1;
            cur = self.node(parent)?;
        }
        Ok(depth)
    }

    pub fn depths(&self) -> Vec<usize> {
        // parents precede children, so one forward pass suffices
        let mut depths = vec![0; self.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            depths[i] = n.parent.map_or(1, |p| depths[p - 1] + 1);
        }
        depths
    }

    pub fn tree_depth(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Descendants of `id`, including `id` itself, in increasing order.
    pub fn descendants(&self, id: usize) -> Result<Vec<usize>> {
        self.node(id)?;
        let mut out = vec![id];
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            for &c in &self.children[n - 1] {
                out.push(c);
                stack.push(c);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Root id of the connected component containing each node.
    fn component_roots(&self) -> Vec<usize> {
        let mut roots = vec![0; self.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            roots[i] = n.parent.map_or(n.id, |p| roots[p - 1]);
        }
        roots
    }

    /// Depth of each connected component, ordered by root id.
    pub fn component_depths(&self) -> Vec<usize> {
        let roots = self.component_roots();
        let depths = self.depths();
        let mut by_root = std::collections::BTreeMap::new();
        for (r, d) in roots.into_iter().zip(depths) {
            let e = by_root.entry(r).or_insert(0);
            *e = d.max(*e);
        }
        by_root.into_values().collect()
    }

    pub fn context(&self, genus: PolarizedGenus) -> BlowupContext {
        BlowupContext::new(genus, self.len())
    }

    /// `Eᵢ`, the total transform of the `i`-th exceptional curve.
    pub fn total_transform(&self, genus: PolarizedGenus, id: usize) -> Result<DivisorClass> {
        self.node(id)?;
        Ok(DivisorClass::exceptional(self.context(genus), id)?)
    }

    /// Ids `j` with `Eᵢ = Σ F̂ⱼ`; the descendant set of `i`.
    pub fn total_transform_expansion(&self, id: usize) -> Result<Vec<usize>> {
        self.descendants(id)
    }

    /// `F̂ᵢ = Eᵢ − Σ_{children j} Eⱼ`.
    pub fn proper_transform(&self, genus: PolarizedGenus, id: usize) -> Result<DivisorClass> {
        let ctx = self.context(genus);
        let mut coeff_e = vec![0; self.len()];
        coeff_e[id.checked_sub(1).ok_or(TreeError::UnknownId(id))?] = 1;
        for &c in self.children(id)? {
            coeff_e[c - 1] = -1;
        }
        Ok(DivisorClass::new(ctx, 0, coeff_e)?)
    }

    pub fn gammas(&self) -> Result<Vec<u64>> {
        self.nodes
            .iter()
            .map(|n| n.gamma.ok_or(TreeError::MissingGamma(n.id)))
            .collect()
    }

    pub fn has_gammas(&self) -> bool {
        self.nodes.iter().all(|n| n.gamma.is_some())
    }

    /// `βᵢ = Σ γⱼ` over the descendants `j` of `i`.
    pub fn beta_from_gamma(&self) -> Result<Vec<u64>> {
        let mut betas = self.gammas()?;
        // children have larger ids: accumulate bottom-up
        for i in (0..self.len()).rev() {
            if let Some(p) = self.nodes[i].parent {
                betas[p - 1] += betas[i];
            }
        }
        Ok(betas)
    }

    /// No leaf is contracted: every leaf has `γ ≥ 1`.
    pub fn is_minimal(&self) -> Result<bool> {
        let gammas = self.gammas()?;
        Ok(self.leaves().all(|id| gammas[id - 1] >= 1))
    }

    fn stats(&self) -> ShapeStats {
        let depths = self.depths();
        let leaf_depths = self.leaves().map(|id| depths[id - 1]).collect::<Vec<_>>();
        ShapeStats {
            nodes: self.len(),
            depth: depths.iter().copied().max().unwrap_or(0),
            top_components: top_two(self.component_depths()),
            top_leaves: top_two(leaf_depths),
        }
    }

    /// Tree depth at most `deg − 2`, and any two components have depths
    /// summing to at most `deg − 2`.
    pub fn check_depth(&self, deg: u64) -> bool {
        self.stats().depth_ok(deg)
    }

    /// Any two distinct leaves have depths with `m′ + m″ + 2 ≤ deg`.
    pub fn check_leaf_pairs(&self, deg: u64) -> bool {
        self.stats().leaf_pairs_ok(deg)
    }

    /// A depth-1 forest has at most `8(deg − 1)` nodes.
    pub fn check_width(&self, deg: u64) -> bool {
        self.stats().width_ok(deg)
    }

    pub fn shape(&self) -> ForestShape {
        ForestShape::of_tree(self)
    }

    pub fn report(&self, deg: u64) -> TreeReport {
        let depths = self.depths();
        TreeReport {
            tree_depth: depths.iter().copied().max().unwrap_or(0),
            depths,
            betas: self.beta_from_gamma().ok(),
            minimal: self.is_minimal().ok(),
            depth_ok: self.check_depth(deg),
            width_ok: self.check_width(deg),
            leaf_pair_ok: self.check_leaf_pairs(deg),
        }
    }
}

/// Everything the shape predicates need, computable without node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct ShapeStats {
    pub nodes: usize,
    pub depth: usize,
    pub top_components: [usize; 2],
    pub top_leaves: [usize; 2],
}

fn top_two(values: impl IntoIterator<Item = usize>) -> [usize; 2] {
    let mut top = [0, 0];
    for v in values {
        push_top(&mut top, v);
    }
    top
}

pub(crate) fn push_top(top: &mut [usize; 2], v: usize) {
    if v > top[0] {
        top[1] = top[0];
        top[0] = v;
    } else if v > top[1] {
        top[1] = v;
    }
}

impl ShapeStats {
    fn budget(deg: u64) -> i128 {
        deg as i128 - 2
    }

    pub fn depth_ok(&self, deg: u64) -> bool {
        let b = Self::budget(deg);
        // a missing second component contributes 0
        self.depth as i128 <= b
            && (self.top_components[1] == 0
                || (self.top_components[0] + self.top_components[1]) as i128 <= b)
    }

    pub fn leaf_pairs_ok(&self, deg: u64) -> bool {
        self.top_leaves[1] == 0
            || (self.top_leaves[0] + self.top_leaves[1]) as i128 <= Self::budget(deg)
    }

    pub fn width_ok(&self, deg: u64) -> bool {
        self.depth != 1 || (self.nodes as u128) <= 8 * (deg.max(1) as u128 - 1)
    }

    pub fn all_ok(&self, deg: u64) -> bool {
        self.depth_ok(deg) && self.leaf_pairs_ok(deg) && self.width_ok(deg)
    }
}

/// Summary of the tree predicates for one topological degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub depths: Vec<usize>,
    pub tree_depth: usize,
    /// Present when every node carries a gamma label.
    pub betas: Option<Vec<u64>>,
    pub minimal: Option<bool>,
    pub depth_ok: bool,
    pub width_ok: bool,
    pub leaf_pair_ok: bool,
}

impl TreeReport {
    /// All shape predicates hold, and minimality too when it is known.
    pub fn passes(&self) -> bool {
        self.depth_ok && self.width_ok && self.leaf_pair_ok && self.minimal != Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F̂₁ → F̂₃ → {F̂₅, F̂₆}, F̂₂ → F̂₄.
    pub(crate) fn worked_example() -> ExceptionalTree {
        ExceptionalTree::from_parents(&[None, None, Some(1), Some(2), Some(3), Some(3)])
            .unwrap()
            .with_gammas(&[0, 0, 0, 1, 1, 1])
            .unwrap()
    }

    fn chain(n: usize) -> ExceptionalTree {
        let parents = (0..n).map(|i| (i > 0).then_some(i)).collect::<Vec<_>>();
        ExceptionalTree::from_parents(&parents).unwrap()
    }

    fn roots(n: usize) -> ExceptionalTree {
        ExceptionalTree::from_parents(&vec![None; n]).unwrap()
    }

    #[test]
    fn construction_errors() {
        let node = |id, parent| TreeNode {
            id,
            parent,
            gamma: None,
        };
        assert_eq!(
            ExceptionalTree::new(vec![node(0, None)]),
            Err(TreeError::ZeroId)
        );
        assert_eq!(
            ExceptionalTree::new(vec![node(1, None), node(1, None)]),
            Err(TreeError::DuplicateId(1))
        );
        assert_eq!(
            ExceptionalTree::new(vec![node(1, None), node(3, None)]),
            Err(TreeError::MissingId { p: 2, missing: 2 })
        );
        assert_eq!(
            ExceptionalTree::new(vec![node(1, Some(2)), node(2, None)]),
            Err(TreeError::ForwardParent {
                child: 1,
                parent: 2
            })
        );
        assert_eq!(
            ExceptionalTree::new(vec![node(1, Some(1))]),
            Err(TreeError::ForwardParent {
                child: 1,
                parent: 1
            })
        );
        // order of records is irrelevant
        let t = ExceptionalTree::new(vec![node(2, Some(1)), node(1, None)]).unwrap();
        assert_eq!(t.depths(), vec![1, 2]);
    }

    #[test]
    fn depths_of_worked_example() {
        let t = worked_example();
        assert_eq!(t.node_depth(3).unwrap(), 2);
        assert_eq!(t.node_depth(1).unwrap(), 1);
        assert_eq!(t.node_depth(5).unwrap(), 3);
        assert_eq!(t.depths(), vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(t.tree_depth(), 3);
        assert_eq!(t.component_depths(), vec![3, 2]);
        assert_eq!(t.node_depth(7), Err(TreeError::UnknownId(7)));
        assert_eq!(t.node_depth(0), Err(TreeError::UnknownId(0)));
    }

    #[test]
    fn expansion_and_proper_transforms() {
        let t = worked_example();
        let g = PolarizedGenus::new(2).unwrap();
        assert_eq!(t.total_transform_expansion(3).unwrap(), vec![3, 5, 6]);
        assert_eq!(t.descendants(1).unwrap(), vec![1, 3, 5, 6]);
        assert_eq!(
            t.total_transform(g, 3).unwrap().coeff_e(),
            &[0, 0, 1, 0, 0, 0]
        );

        let f3 = t.proper_transform(g, 3).unwrap();
        assert_eq!(f3.coeff_e(), &[0, 0, 1, 0, -1, -1]);
        assert_eq!(f3.self_intersection().unwrap(), -3);
        let f1 = t.proper_transform(g, 1).unwrap();
        assert_eq!(lattice::intersect(&f1, &f3).unwrap(), 1);
        let f4 = t.proper_transform(g, 4).unwrap();
        assert_eq!(lattice::intersect(&f4, &f3).unwrap(), 0);

        let single = roots(1);
        assert_eq!(single.total_transform_expansion(1).unwrap(), vec![1]);
        assert_eq!(
            single.proper_transform(g, 1).unwrap(),
            single.total_transform(g, 1).unwrap()
        );
    }

    #[test]
    fn betas_from_gammas() {
        let t = worked_example();
        assert_eq!(t.beta_from_gamma().unwrap(), vec![2, 1, 2, 1, 1, 1]);
        assert!(t.is_minimal().unwrap());

        let r = roots(1).with_gammas(&[3]).unwrap();
        assert_eq!(r.beta_from_gamma().unwrap(), vec![3]);

        let c = chain(2).with_gammas(&[0, 1]).unwrap();
        assert_eq!(c.beta_from_gamma().unwrap(), vec![1, 1]);

        assert_eq!(roots(2).beta_from_gamma(), Err(TreeError::MissingGamma(1)));
        assert!(roots(2).with_gammas(&[1]).is_err());
    }

    #[test]
    fn minimality() {
        assert!(!roots(1).with_gammas(&[0]).unwrap().is_minimal().unwrap());
        assert!(roots(1).with_gammas(&[1]).unwrap().is_minimal().unwrap());
        // interior nodes may be contracted
        assert!(chain(3)
            .with_gammas(&[0, 0, 1])
            .unwrap()
            .is_minimal()
            .unwrap());
        assert!(roots(1).is_minimal().is_err());
    }

    #[test]
    fn depth_predicate() {
        assert!(chain(2).check_depth(4));
        let two_plus_one = ExceptionalTree::from_parents(&[None, None, Some(1)]).unwrap();
        assert_eq!(two_plus_one.component_depths(), vec![2, 1]);
        assert!(!two_plus_one.check_depth(4));
        assert!(!roots(1).check_depth(2));
        assert!(ExceptionalTree::from_parents(&[]).unwrap().check_depth(2));
        assert!(chain(7).check_depth(9));
        assert!(!chain(8).check_depth(9));
    }

    #[test]
    fn leaf_pair_predicate() {
        assert!(roots(5).check_leaf_pairs(4));
        let two_plus_one = ExceptionalTree::from_parents(&[None, None, Some(1)]).unwrap();
        assert!(!two_plus_one.check_leaf_pairs(4));
        assert!(chain(5).check_leaf_pairs(2));
        // two leaves below the same parent
        let cherry = ExceptionalTree::from_parents(&[None, Some(1), Some(1)]).unwrap();
        assert!(!cherry.check_leaf_pairs(5));
        assert!(cherry.check_leaf_pairs(6));
    }

    #[test]
    fn width_predicate() {
        assert!(roots(24).check_width(4));
        assert!(!roots(25).check_width(4));
        let deep = ExceptionalTree::from_parents(
            &std::iter::once(None)
                .chain((1..40).map(|_| Some(1)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(deep.check_width(9));
    }

    #[test]
    fn report_of_worked_example() {
        let r = worked_example().report(9);
        assert_eq!(r.tree_depth, 3);
        assert_eq!(r.betas, Some(vec![2, 1, 2, 1, 1, 1]));
        assert_eq!(r.minimal, Some(true));
        assert!(r.passes());
        let r = worked_example().report(4);
        assert!(!r.depth_ok);
        assert!(!r.passes());
    }
}
