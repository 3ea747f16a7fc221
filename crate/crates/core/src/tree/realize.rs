//! Realizing a β vector on an admissible exceptional tree.
//!
//! A labelling of a forest by `γ ≥ 0` with `γ ≥ 1` on leaves yields
//! `βᵢ = Σ_{descendants} γ`; conversely a β assignment comes from such a
//! labelling iff every node's β is at least the sum of its children's β.

use std::collections::HashMap;

use super::shape::{admissible_shapes, ShapeGenerator};
use super::{ExceptionalTree, ForestShape};

/// Largest part count for which every forest shape is tried. Larger
/// partitions are only matched against the depth-1 forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeBudget {
    pub max_nodes: usize,
}

impl Default for ShapeBudget {
    fn default() -> Self {
        Self { max_nodes: 12 }
    }
}

/// Admissible shapes for one topological degree, generated lazily per node
/// count.
pub struct ShapeCatalog {
    deg: u64,
    max_depth: usize,
    budget: ShapeBudget,
    gen: ShapeGenerator,
    cache: HashMap<usize, Vec<ForestShape>>,
}

impl ShapeCatalog {
    pub fn new(deg: u64, max_depth: usize, budget: ShapeBudget) -> Self {
        Self {
            deg,
            max_depth,
            budget,
            gen: ShapeGenerator::new(deg),
            cache: HashMap::new(),
        }
    }

    pub fn deg(&self) -> u64 {
        self.deg
    }

    /// Candidate shapes with exactly `p` nodes, shallowest first.
    pub fn shapes(&mut self, p: usize) -> &[ForestShape] {
        let (deg, max_depth, budget) = (self.deg, self.max_depth, self.budget);
        let gen = &mut self.gen;
        self.cache.entry(p).or_insert_with(|| {
            if p <= budget.max_nodes {
                admissible_shapes(gen, p, max_depth)
            } else {
                let flat = ForestShape::points(p);
                if max_depth >= 1 && flat.is_admissible(deg) {
                    vec![flat]
                } else {
                    vec![]
                }
            }
        })
    }

    /// Largest part count that can possibly be realized.
    pub fn max_parts(&self) -> usize {
        let flat = if self.max_depth >= 1 && self.deg >= 2 {
            usize::try_from(8 * (self.deg as u128 - 1)).unwrap_or(usize::MAX)
        } else {
            0
        };
        flat.max(self.budget.max_nodes)
    }

    /// First shape (in catalog order) carrying the partition `betas`, as a
    /// γ-labelled tree.
    pub fn realize(&mut self, betas: &[u64]) -> Option<ExceptionalTree> {
        let p = betas.len();
        if p == 0 || betas.contains(&0) || p > self.max_parts() {
            return None;
        }
        let shapes = self.shapes(p).to_vec();
        let mut values = betas.to_vec();
        values.sort_unstable();
        shapes.iter().find_map(|s| assign(&s.to_tree(), &values))
    }
}

/// One-shot version of [`ShapeCatalog::realize`].
pub fn realize_betas(
    deg: u64,
    betas: &[u64],
    max_depth: usize,
    budget: ShapeBudget,
) -> Option<ExceptionalTree> {
    ShapeCatalog::new(deg, max_depth, budget).realize(betas)
}

/// Backtracking bijection of `values` (sorted ascending) onto the nodes of
/// `tree` with `β(node) ≥ Σ β(children)`.
fn assign(tree: &ExceptionalTree, values: &[u64]) -> Option<ExceptionalTree> {
    let p = tree.len();
    let mut counts: Vec<(u64, usize)> = Vec::new();
    for &v in values {
        match counts.last_mut() {
            Some((x, c)) if *x == v => *c += 1,
            _ => counts.push((v, 1)),
        }
    }
    let mut beta = vec![0u64; p];
    // children have larger ids, so fill from the last id down
    if !fill(tree, p, &mut counts, &mut beta) {
        return None;
    }
    let gammas: Vec<u64> = (1..=p)
        .map(|id| {
            let kids: u64 = tree.children[id - 1].iter().map(|&c| beta[c - 1]).sum();
            beta[id - 1] - kids
        })
        .collect();
    let labelled = tree.clone().with_gammas(&gammas).ok()?;
    debug_assert_eq!(labelled.beta_from_gamma().ok()?, beta);
    Some(labelled)
}

fn fill(tree: &ExceptionalTree, id: usize, counts: &mut [(u64, usize)], beta: &mut [u64]) -> bool {
    if id == 0 {
        return true;
    }
    let need: u64 = tree.children[id - 1].iter().map(|&c| beta[c - 1]).sum();
    for k in 0..counts.len() {
        let (v, c) = counts[k];
        if c == 0 || v < need {
            continue;
        }
        counts[k].1 -= 1;
        beta[id - 1] = v;
        if fill(tree, id - 1, counts, beta) {
            return true;
        }
        counts[k].1 += 1;
    }
    false
}
