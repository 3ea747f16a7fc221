//! Arithmetic constraints linking the topological degree `deg` and the
//! algebraic degree `l` of a self-rational map:
//!
//! * `deg = λ²` for an integer `λ` of unknown sign;
//! * `2g − 2` divides `l − λ`;
//! * `l² = deg + (2g − 2)·Σ βᵢ²` with every `βᵢ ≥ 1` and `Σ βᵢ` even;
//! * for shallow exceptional trees, `24(deg − 1) ≤ p + 4(g − 1)·Σ βᵢ`.

use std::cmp::Reverse;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{ExceptionalTree, ShapeBudget, ShapeCatalog};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("degree {0} is not a perfect square")]
    NotSquare(u64),
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u64),
    #[error("beta partition parts must be positive")]
    ZeroPart,
    #[error("beta partition has odd sum {0}")]
    OddSum(u64),
    #[error("integer overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, ConstraintError>;

/// `λ₀ = √deg` when `deg` is a perfect square.
pub fn square_root_degree(deg: u64) -> Option<u64> {
    let r = deg.sqrt();
    (r * r == deg && deg > 0).then_some(r)
}

/// A sign choice for the eigenvalue `λ` with `λ² = deg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaWitness {
    pub lambda: i64,
}

impl fmt::Display for LambdaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.lambda)
    }
}

fn check_genus(g: u64) -> Result<i128> {
    if g < 2 {
        return Err(ConstraintError::GenusTooSmall(g));
    }
    Ok(2 * g as i128 - 2)
}

/// Signs `λ ∈ {+λ₀, −λ₀}` for which `2g − 2` divides `l − λ`.
pub fn lambda_candidates(g: u64, deg: u64, l: u64) -> Result<Vec<LambdaWitness>> {
    let m = check_genus(g)?;
    let root = square_root_degree(deg).ok_or(ConstraintError::NotSquare(deg))? as i64;
    Ok([root, -root]
        .into_iter()
        .filter(|&lambda| (l as i128 - lambda as i128) % m == 0)
        .map(|lambda| LambdaWitness { lambda })
        .collect())
}

/// `N = (l² − deg) / (2g − 2)` when that is a nonnegative integer.
pub fn required_sum_sq(g: u64, deg: u64, l: u64) -> Option<u64> {
    let m = check_genus(g).ok()?;
    let diff = (l as i128) * (l as i128) - deg as i128;
    if diff < 0 || diff % m != 0 {
        return None;
    }
    u64::try_from(diff / m).ok()
}

/// Multiset of positive integers with even sum, kept in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct BetaPartition {
    parts: Vec<u64>,
}

impl BetaPartition {
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(ConstraintError::ZeroPart);
        }
        let sum = parts
            .iter()
            .try_fold(0u64, |a, &b| a.checked_add(b))
            .ok_or(ConstraintError::Overflow)?;
        if sum % 2 != 0 {
            return Err(ConstraintError::OddSum(sum));
        }
        parts
            .iter()
            .try_fold(0u64, |a, &b| {
                b.checked_mul(b).and_then(|sq| a.checked_add(sq))
            })
            .ok_or(ConstraintError::Overflow)?;
        parts.sort_unstable_by_key(|&b| Reverse(b));
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn sum_sq(&self) -> u64 {
        self.parts.iter().map(|b| b * b).sum()
    }
}

impl TryFrom<Vec<u64>> for BetaPartition {
    type Error = ConstraintError;

    fn try_from(parts: Vec<u64>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<BetaPartition> for Vec<u64> {
    fn from(p: BetaPartition) -> Vec<u64> {
        p.parts
    }
}

impl fmt::Display for BetaPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Lower bound `p + c·Σβ ≥ threshold` imposed on candidate partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreFloor {
    pub coef: u128,
    pub threshold: u128,
}

impl ScoreFloor {
    /// The Chern class inequality as an integer score:
    /// `p + 4(g − 1)Σβ ≥ 24(deg − 1)`.
    pub fn amerik(g: u64, deg: u64) -> Self {
        Self {
            coef: 4 * (g as u128).saturating_sub(1),
            threshold: 24 * (deg as u128).saturating_sub(1),
        }
    }
}

/// Depth-first search over square partitions of `n` in descending
/// lexicographic order, pruned by part-count and score bounds.
#[derive(Debug, Clone, Copy)]
pub struct PartitionSearch {
    pub n: u64,
    pub max_parts: Option<usize>,
    pub floor: Option<ScoreFloor>,
}

impl PartitionSearch {
    pub fn new(n: u64) -> Self {
        Self {
            n,
            max_parts: None,
            floor: None,
        }
    }

    pub fn max_parts(mut self, cap: Option<usize>) -> Self {
        self.max_parts = cap;
        self
    }

    pub fn floor(mut self, floor: Option<ScoreFloor>) -> Self {
        self.floor = floor;
        self
    }

    /// Calls `visit` on every partition in order until it returns `true`;
    /// returns that partition.
    pub fn find(&self, mut visit: impl FnMut(&[u64]) -> bool) -> Option<Vec<u64>> {
        // Σβ ≡ Σβ² (mod 2), so parity is decided by n alone
        if self.n == 0 || !self.n.is_multiple_of(2) {
            return None;
        }
        let mut parts = Vec::new();
        let top = self.n.sqrt();
        self.dfs(self.n, top, 0, &mut parts, &mut visit)
            .then_some(parts)
    }

    fn dfs(
        &self,
        rem: u64,
        max_part: u64,
        sum: u64,
        parts: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64]) -> bool,
    ) -> bool {
        if rem == 0 {
            if let Some(f) = self.floor {
                if (parts.len() as u128) + f.coef * (sum as u128) < f.threshold {
                    return false;
                }
            }
            return visit(parts);
        }
        let left = match self.max_parts {
            Some(cap) if parts.len() >= cap => return false,
            Some(cap) => (cap - parts.len()) as u128,
            None => rem as u128,
        };
        if rem as u128 > left * (max_part as u128) * (max_part as u128) {
            return false;
        }
        if let Some(f) = self.floor {
            // at most min(left, rem) more parts, and Σβ ≤ √(left·rem) by
            // Cauchy–Schwarz, also ≤ rem
            let more_parts = left.min(rem as u128);
            let more_sum = (rem as u128).min((left * rem as u128).sqrt());
            let best = parts.len() as u128 + more_parts + f.coef * (sum as u128 + more_sum);
            if best < f.threshold {
                return false;
            }
        }
        let top = max_part.min(rem.sqrt());
        for b in (1..=top).rev() {
            parts.push(b);
            if self.dfs(rem - b * b, b, sum + b, parts, visit) {
                return true;
            }
            parts.pop();
        }
        false
    }
}

/// All partitions of `n` into positive squares `β²` with even `Σβ`, at most
/// `p_cap` parts when given, in descending lexicographic order.
pub fn enumerate_beta_partitions(n: u64, p_cap: Option<usize>) -> Vec<BetaPartition> {
    let mut out = Vec::new();
    PartitionSearch::new(n).max_parts(p_cap).find(|parts| {
        out.push(BetaPartition {
            parts: parts.to_vec(),
        });
        false
    });
    out
}

/// Fewest positive squares summing to `n` (Lagrange, Legendre).
pub fn min_squares(n: u64) -> u32 {
    if n == 0 {
        return 0;
    }
    if square_root_degree(n).is_some() {
        return 1;
    }
    let mut a = 1u64;
    while 2 * a * a <= n {
        if square_root_degree(n - a * a).is_some() {
            return 2;
        }
        a += 1;
    }
    let mut m = n;
    while m.is_multiple_of(4) {
        m /= 4;
    }
    if m % 8 == 7 {
        4
    } else {
        3
    }
}

/// Whether some partition of `n` exists, without enumerating any.
pub fn partition_exists(n: u64, p_cap: Option<usize>) -> bool {
    n > 0 && n.is_multiple_of(2) && p_cap.is_none_or(|cap| min_squares(n) as usize <= cap)
}

/// `p + 4(g − 1)·Σβ`, the integer side of the Chern class bound.
pub fn amerik_score(g: u64, partition: &BetaPartition) -> u128 {
    partition.len() as u128 + 4 * (g as u128).saturating_sub(1) * partition.sum() as u128
}

/// `1 + (p + 4(g − 1)·Σβ) / 24`.
pub fn amerik_bound(g: u64, partition: &BetaPartition) -> Rational {
    Rational::new(
        BigInt::from(24u32) + BigInt::from(amerik_score(g, partition)),
        BigInt::from(24u32),
    )
}

/// Largest score over all partitions of `n`; attained by all ones.
pub fn max_amerik_score(g: u64, n: u64) -> u128 {
    n as u128 * (1 + 4 * (g as u128).saturating_sub(1))
}

/// Lexicographically first partition of `n` obeying the Chern class bound
/// for `deg`. With `shape_constraints`, the partition must also sit on an
/// admissible exceptional tree of depth at most 2, the regime in which the
/// bound is known to hold.
pub fn amerik_admits(g: u64, deg: u64, n: u64, shape_constraints: bool) -> Option<BetaPartition> {
    amerik_witness(g, deg, n, shape_constraints, ShapeBudget::default()).map(|(p, _)| p)
}

/// [`amerik_admits`] together with the tree that carries the partition,
/// when shapes were required.
pub fn amerik_witness(
    g: u64,
    deg: u64,
    n: u64,
    shape_constraints: bool,
    budget: ShapeBudget,
) -> Option<(BetaPartition, Option<ExceptionalTree>)> {
    let floor = Some(ScoreFloor::amerik(g, deg));
    if !shape_constraints {
        let parts = PartitionSearch::new(n).floor(floor).find(|_| true)?;
        return Some((BetaPartition { parts }, None));
    }
    let mut catalog = ShapeCatalog::new(deg, 2, budget);
    let cap = catalog.max_parts();
    let mut tree = None;
    let parts = PartitionSearch::new(n)
        .max_parts(Some(cap))
        .floor(floor)
        .find(|parts| {
            tree = catalog.realize(parts);
            tree.is_some()
        })?;
    Some((BetaPartition { parts }, tree))
}
