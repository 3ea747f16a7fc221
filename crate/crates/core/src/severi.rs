//! Genus, node-count and dimension formulas for nodal curves in `|kL|`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeveriError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u64),
    #[error("multiple k and degree l must be positive")]
    NonPositive,
    #[error("geometric genus {h} exceeds the arithmetic genus {p_a}")]
    GenusTooLarge { h: u64, p_a: u64 },
    #[error("epsilon must lie in (0, 1]")]
    EpsilonOutOfRange,
    #[error("integer overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, SeveriError>;

/// Parameters of the Severi variety `V_{k,h}` on a genus-`g` K3, together
/// with the algebraic degree `l` whose image curves lie in `|klL|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeveriParams {
    pub g: u64,
    pub k: u64,
    pub h: u64,
    pub l: u64,
}

fn validate(g: u64, k: u64) -> Result<()> {
    if g < 2 {
        return Err(SeveriError::GenusTooSmall(g));
    }
    if k == 0 {
        return Err(SeveriError::NonPositive);
    }
    Ok(())
}

/// `p_a(k) = 1 + k²(g − 1)`.
pub fn arithmetic_genus(g: u64, k: u64) -> Result<u64> {
    validate(g, k)?;
    k.checked_mul(k)
        .and_then(|k2| k2.checked_mul(g - 1))
        .and_then(|x| x.checked_add(1))
        .ok_or(SeveriError::Overflow)
}

/// `δ = p_a(kl) − p_a(k) = (g − 1)k²(l² − 1)`, the nodes of a generic
/// image curve.
pub fn node_count(g: u64, k: u64, l: u64) -> Result<u64> {
    validate(g, k)?;
    if l == 0 {
        return Err(SeveriError::NonPositive);
    }
    (g - 1)
        .checked_mul(k)
        .and_then(|x| x.checked_mul(k))
        .and_then(|x| l.checked_mul(l).and_then(|l2| x.checked_mul(l2 - 1)))
        .ok_or(SeveriError::Overflow)
}

/// `δ + 1`: node count of an image curve whose source already has one node.
pub fn nodes_after_one_node_source(g: u64, k: u64, l: u64) -> Result<u64> {
    node_count(g, k, l)?
        .checked_add(1)
        .ok_or(SeveriError::Overflow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeveriDimension {
    pub dimension: u64,
    /// Nodes imposed, `p_a(k) − h`.
    pub delta: u64,
}

/// `V_{k,h}` has dimension `h`; the `δ = p_a(k) − h` nodes each cut one
/// condition out of `|kL|`, which has dimension `p_a(k)`.
pub fn expected_severi_dimension(g: u64, k: u64, h: u64) -> Result<SeveriDimension> {
    let p_a = arithmetic_genus(g, k)?;
    if h > p_a {
        return Err(SeveriError::GenusTooLarge { h, p_a });
    }
    Ok(SeveriDimension {
        dimension: h,
        delta: p_a - h,
    })
}

/// `p_a(k) / p_a(lk)`, which tends to `1/l²`.
pub fn genus_ratio(g: u64, k: u64, l: u64) -> Result<Rational> {
    let lk = l.checked_mul(k).ok_or(SeveriError::Overflow)?;
    if lk == 0 {
        return Err(SeveriError::NonPositive);
    }
    Ok(Rational::new(
        BigInt::from(arithmetic_genus(g, k)?),
        BigInt::from(arithmetic_genus(g, lk)?),
    ))
}

/// `ε·p_a(kl) ≤ p_a(k) ≤ p_a(kl)`: the geometric genus `p_a(k)` of image
/// curves falls in the window `[ε p_a, p_a]` of `|klL|`.
pub fn epsilon_window_holds(g: u64, k: u64, l: u64, epsilon: &Rational) -> Result<bool> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if *epsilon <= zero || *epsilon > one {
        return Err(SeveriError::EpsilonOutOfRange);
    }
    let small = Rational::from_integer(arithmetic_genus(g, k)?.into());
    let big = Rational::from_integer(
        arithmetic_genus(g, k.checked_mul(l).ok_or(SeveriError::Overflow)?)?.into(),
    );
    Ok(epsilon * &big <= small && small <= big)
}

/// Smallest `k` from which the genericity condition on `|kL|` is known to
/// hold: 6 in genus 2, 4 otherwise.
pub fn genericity_threshold(g: u64) -> Result<u64> {
    match g {
        0 | 1 => Err(SeveriError::GenusTooSmall(g)),
        2 => Ok(6),
        _ => Ok(4),
    }
}
