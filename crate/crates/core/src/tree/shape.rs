//! Rooted forests up to isomorphism.
//!
//! A rooted tree is encoded as `(` followed by the sorted codes of its
//! children and `)`; a forest is the sorted multiset of its component codes.
//! Two forests are isomorphic iff their codes agree.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{push_top, ExceptionalTree, ShapeStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeParseError {
    #[error("unbalanced parentheses in {0:?}")]
    Unbalanced(String),
    #[error("unexpected character {0:?}")]
    BadChar(char),
    #[error("bad multiplicity {0:?}")]
    BadMultiplicity(String),
}

/// Canonical code of a rooted tree, with its cached statistics.
#[derive(Debug, Clone)]
pub struct RootedShape {
    code: Arc<str>,
    nodes: usize,
    height: usize,
    /// Two deepest leaves, measured with the root at depth 1.
    top_leaves: [usize; 2],
}

impl PartialEq for RootedShape {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for RootedShape {}

impl PartialOrd for RootedShape {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootedShape {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

impl RootedShape {
    pub fn leaf() -> Self {
        Self::from_children(Vec::new())
    }

    pub fn from_children(mut children: Vec<RootedShape>) -> Self {
        children.sort();
        let mut code =
            String::with_capacity(2 + children.iter().map(|c| c.code.len()).sum::<usize>());
        code.push('(');
        let mut nodes = 1;
        let mut height = 0;
        let mut top_leaves = [0, 0];
        for c in &children {
            code.push_str(&c.code);
            nodes += c.nodes;
            height = height.max(c.height);
            for d in c.top_leaves.iter().filter(|&&d| d > 0) {
                push_top(&mut top_leaves, d + 1);
            }
        }
        code.push(')');
        if children.is_empty() {
            top_leaves = [1, 0];
        }
        Self {
            code: code.into(),
            nodes,
            height: height + 1,
            top_leaves,
        }
    }

    fn parse(code: &str) -> Result<Self, ShapeParseError> {
        let unbalanced = || ShapeParseError::Unbalanced(code.to_string());
        let mut stack: Vec<Vec<RootedShape>> = Vec::new();
        let mut done = None;
        for ch in code.chars() {
            if done.is_some() {
                return Err(unbalanced());
            }
            match ch {
                '(' => stack.push(Vec::new()),
                ')' => {
                    let t = Self::from_children(stack.pop().ok_or_else(unbalanced)?);
                    match stack.last_mut() {
                        Some(parent) => parent.push(t),
                        None => done = Some(t),
                    }
                }
                c => return Err(ShapeParseError::BadChar(c)),
            }
        }
        done.ok_or_else(unbalanced)
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn children(&self) -> Vec<RootedShape> {
        let inner = &self.code[1..self.code.len() - 1];
        let mut out = Vec::new();
        let mut level = 0;
        let mut start = 0;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => {
                    if level == 0 {
                        start = i;
                    }
                    level += 1;
                }
                _ => {
                    level -= 1;
                    if level == 0 {
                        out.push(Self::parse(&inner[start..=i]).expect("canonical code"));
                    }
                }
            }
        }
        out
    }
}

/// Isomorphism class of an exceptional tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ForestShape {
    components: Vec<RootedShape>,
}

impl std::hash::Hash for RootedShape {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl ForestShape {
    pub fn new(mut components: Vec<RootedShape>) -> Self {
        components.sort();
        Self { components }
    }

    /// `n` isolated points blown up once each.
    pub fn points(n: usize) -> Self {
        Self::new(vec![RootedShape::leaf(); n])
    }

    pub fn chain(n: usize) -> Self {
        let mut t = RootedShape::leaf();
        for _ in 1..n {
            t = RootedShape::from_children(vec![t]);
        }
        Self::new(if n == 0 { vec![] } else { vec![t] })
    }

    pub fn of_tree(tree: &ExceptionalTree) -> Self {
        let mut shapes: Vec<Option<RootedShape>> = vec![None; tree.len()];
        for id in (1..=tree.len()).rev() {
            let children = tree.children[id - 1]
                .iter()
                .map(|&c| shapes[c - 1].take().expect("children have larger ids"))
                .collect();
            shapes[id - 1] = Some(RootedShape::from_children(children));
        }
        Self::new(
            tree.roots()
                .map(|r| shapes[r - 1].take().expect("root shape"))
                .collect(),
        )
    }

    pub fn components(&self) -> &[RootedShape] {
        &self.components
    }

    pub fn nodes(&self) -> usize {
        self.components.iter().map(|c| c.nodes).sum()
    }

    pub fn depth(&self) -> usize {
        self.components.iter().map(|c| c.height).max().unwrap_or(0)
    }

    pub(crate) fn stats(&self) -> ShapeStats {
        let mut s = ShapeStats {
            nodes: self.nodes(),
            depth: self.depth(),
            ..ShapeStats::default()
        };
        for c in &self.components {
            push_top(&mut s.top_components, c.height);
            for &d in c.top_leaves.iter().filter(|&&d| d > 0) {
                push_top(&mut s.top_leaves, d);
            }
        }
        s
    }

    /// Passes the depth, leaf-pair and width predicates for `deg`.
    pub fn is_admissible(&self, deg: u64) -> bool {
        self.stats().all_ok(deg)
    }

    /// A representative tree: nodes numbered level by level, so every parent
    /// precedes its children.
    pub fn to_tree(&self) -> ExceptionalTree {
        let mut parents = Vec::with_capacity(self.nodes());
        let mut level: Vec<(Option<usize>, RootedShape)> =
            self.components.iter().map(|c| (None, c.clone())).collect();
        while !level.is_empty() {
            let mut next = Vec::new();
            for (parent, shape) in level {
                parents.push(parent);
                let id = parents.len();
                next.extend(shape.children().into_iter().map(|c| (Some(id), c)));
            }
            level = next;
        }
        ExceptionalTree::from_parents(&parents).expect("level order respects blow-up order")
    }
}

impl fmt::Display for ForestShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "empty");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.components.len() {
            let c = &self.components[i];
            let run = self.components[i..].iter().take_while(|x| *x == c).count();
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if run > 1 {
                write!(f, "{run}*")?;
            }
            write!(f, "{}", c.code)?;
            i += run;
        }
        Ok(())
    }
}

impl FromStr for ForestShape {
    type Err = ShapeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "empty" {
            return Ok(Self::new(vec![]));
        }
        let mut components = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let (count, code) = match term.split_once('*') {
                Some((k, code)) => (
                    k.trim()
                        .parse::<usize>()
                        .map_err(|_| ShapeParseError::BadMultiplicity(k.to_string()))?,
                    code.trim(),
                ),
                None => (1, term),
            };
            let t = RootedShape::parse(code)?;
            components.extend(std::iter::repeat_n(t, count));
        }
        Ok(Self::new(components))
    }
}

impl From<ForestShape> for String {
    fn from(s: ForestShape) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for ForestShape {
    type Error = ShapeParseError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Enumerates rooted trees and forests of bounded height, discarding
/// anything that already breaks the leaf-pair bound for `deg`.
pub(crate) struct ShapeGenerator {
    deg: u64,
    trees: HashMap<(usize, usize), Arc<Vec<RootedShape>>>,
}

impl ShapeGenerator {
    pub fn new(deg: u64) -> Self {
        Self {
            deg,
            trees: HashMap::new(),
        }
    }

    fn leaf_budget(&self) -> i128 {
        self.deg as i128 - 2
    }

    /// Trees with exactly `n` nodes and height at most `h` whose own leaves
    /// satisfy the leaf-pair bound.
    fn trees(&mut self, n: usize, h: usize) -> Arc<Vec<RootedShape>> {
        if let Some(t) = self.trees.get(&(n, h)) {
            return t.clone();
        }
        let out = if n == 0 || h == 0 {
            Vec::new()
        } else if n == 1 {
            vec![RootedShape::leaf()]
        } else {
            let budget = self.leaf_budget();
            let mut out = Vec::new();
            for kids in self.forests(n - 1, h - 1, None) {
                let t = RootedShape::from_children(kids);
                if t.top_leaves[1] == 0 || (t.top_leaves[0] + t.top_leaves[1]) as i128 <= budget {
                    out.push(t);
                }
            }
            out.sort();
            out
        };
        let out = Arc::new(out);
        self.trees.insert((n, h), out.clone());
        out
    }

    /// Multisets of trees of height at most `h` with `total` nodes. With
    /// `Some(deg)` the partial forest is pruned by the depth and leaf-pair
    /// predicates, which only get worse as components are added.
    pub fn forests(&mut self, total: usize, h: usize, prune: Option<u64>) -> Vec<Vec<RootedShape>> {
        let mut candidates = Vec::new();
        for size in (1..=total).rev() {
            candidates.extend(self.trees(size, h).iter().cloned());
        }
        let mut out = Vec::new();
        let mut current = Vec::new();
        fill(
            &candidates,
            0,
            total,
            &mut current,
            ShapeStats::default(),
            prune,
            &mut out,
        );
        out
    }
}

fn fill(
    candidates: &[RootedShape],
    start: usize,
    remaining: usize,
    current: &mut Vec<RootedShape>,
    stats: ShapeStats,
    prune: Option<u64>,
    out: &mut Vec<Vec<RootedShape>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for (i, t) in candidates.iter().enumerate().skip(start) {
        if t.nodes > remaining {
            continue;
        }
        let mut next = stats;
        next.nodes += t.nodes;
        next.depth = next.depth.max(t.height);
        push_top(&mut next.top_components, t.height);
        for &d in t.top_leaves.iter().filter(|&&d| d > 0) {
            push_top(&mut next.top_leaves, d);
        }
        if let Some(deg) = prune {
            if !(next.depth_ok(deg) && next.leaf_pairs_ok(deg)) {
                continue;
            }
        }
        current.push(t.clone());
        fill(
            candidates,
            i,
            remaining - t.nodes,
            current,
            next,
            prune,
            out,
        );
        current.pop();
    }
}

/// Admissible forests with exactly `p` nodes and depth at most `max_depth`,
/// ordered by depth then code.
pub(crate) fn admissible_shapes(
    gen: &mut ShapeGenerator,
    p: usize,
    max_depth: usize,
) -> Vec<ForestShape> {
    let deg = gen.deg;
    let h = max_depth.min((deg.saturating_sub(2)).min(p as u64) as usize);
    let mut out: Vec<ForestShape> = gen
        .forests(p, h, Some(deg))
        .into_iter()
        .map(ForestShape::new)
        .filter(|s| s.is_admissible(deg))
        .collect();
    out.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.cmp(b)));
    out
}

/// Every forest with `1..=p_max` nodes, up to isomorphism, passing the depth,
/// leaf-pair and width predicates for topological degree `deg`. Sorted by
/// node count, then depth, then code.
pub fn classify_shapes(deg: u64, p_max: usize) -> Vec<ForestShape> {
    let mut gen = ShapeGenerator::new(deg);
    (1..=p_max)
        .flat_map(|p| admissible_shapes(&mut gen, p, usize::MAX))
        .collect()
}
