//! Picard lattice of an iterated blow-up of a generic polarized K3 surface.
//!
//! After `p` point blow-ups the lattice has the orthogonal basis
//! `(τ*L, E₁, …, E_p)` with Gram matrix `diag(2g−2, −1, …, −1)`. Classes are
//! plain integer vectors over that basis; every product is checked, so an
//! overflow surfaces as [`LatticeError::Overflow`] instead of wrapping.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u64),
    #[error("divisor classes live on different blow-ups ({0:?} vs {1:?})")]
    ContextMismatch(BlowupContext, BlowupContext),
    #[error("expected {expected} exceptional coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("exceptional index {index} out of range 1..={p}")]
    IndexOutOfRange { index: usize, p: usize },
    #[error("algebraic degree must be positive")]
    NonPositiveDegree,
    #[error("beta_{index} = {value} is not positive")]
    NonPositiveBeta { index: usize, value: i64 },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Genus `g ≥ 2` of a polarization `L` with `L² = 2g − 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PolarizedGenus(u64);

impl PolarizedGenus {
    pub fn new(g: u64) -> Result<Self> {
        if g < 2 {
            return Err(LatticeError::GenusTooSmall(g));
        }
        // 2g − 2 must fit in i64 for the Gram matrix.
        if g > (i64::MAX as u64) / 2 {
            return Err(LatticeError::Overflow);
        }
        Ok(Self(g))
    }

    pub fn g(self) -> u64 {
        self.0
    }

    /// `L² = 2g − 2`.
    pub fn selfint(self) -> i64 {
        2 * self.0 as i64 - 2
    }
}

impl TryFrom<u64> for PolarizedGenus {
    type Error = LatticeError;

    fn try_from(g: u64) -> Result<Self> {
        Self::new(g)
    }
}

impl From<PolarizedGenus> for u64 {
    fn from(g: PolarizedGenus) -> u64 {
        g.0
    }
}

impl fmt::Display for PolarizedGenus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={}", self.0)
    }
}

/// A K3 surface of a given genus blown up `p` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlowupContext {
    pub genus: PolarizedGenus,
    pub p: usize,
}

impl BlowupContext {
    pub fn new(genus: PolarizedGenus, p: usize) -> Self {
        Self { genus, p }
    }

    pub fn rank(&self) -> usize {
        self.p + 1
    }

    /// Gram matrix of the basis `(τ*L, E₁, …, E_p)`.
    pub fn gram_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut m = vec![vec![0; n]; n];
        m[0][0] = self.genus.selfint();
        for (i, row) in m.iter_mut().enumerate().skip(1) {
            row[i] = -1;
        }
        m
    }
}

/// Integer class `a·τ*L + Σ bᵢ·Eᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    context: BlowupContext,
    coeff_l: i64,
    coeff_e: Vec<i64>,
}

impl DivisorClass {
    pub fn new(context: BlowupContext, coeff_l: i64, coeff_e: Vec<i64>) -> Result<Self> {
        if coeff_e.len() != context.p {
            return Err(LatticeError::WrongLength {
                expected: context.p,
                got: coeff_e.len(),
            });
        }
        Ok(Self {
            context,
            coeff_l,
            coeff_e,
        })
    }

    pub fn zero(context: BlowupContext) -> Self {
        Self {
            context,
            coeff_l: 0,
            coeff_e: vec![0; context.p],
        }
    }

    /// The pulled-back polarization `τ*L`.
    pub fn pullback_l(context: BlowupContext) -> Self {
        Self {
            coeff_l: 1,
            ..Self::zero(context)
        }
    }

    /// Total transform `Eᵢ` (1-based index).
    pub fn exceptional(context: BlowupContext, index: usize) -> Result<Self> {
        if index == 0 || index > context.p {
            return Err(LatticeError::IndexOutOfRange {
                index,
                p: context.p,
            });
        }
        let mut c = Self::zero(context);
        c.coeff_e[index - 1] = 1;
        Ok(c)
    }

    pub fn context(&self) -> BlowupContext {
        self.context
    }

    pub fn coeff_l(&self) -> i64 {
        self.coeff_l
    }

    pub fn coeff_e(&self) -> &[i64] {
        &self.coeff_e
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.context != other.context {
            return Err(LatticeError::ContextMismatch(self.context, other.context));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let coeff_l = self
            .coeff_l
            .checked_add(other.coeff_l)
            .ok_or(LatticeError::Overflow)?;
        let coeff_e = self
            .coeff_e
            .iter()
            .zip(&other.coeff_e)
            .map(|(a, b)| a.checked_add(*b).ok_or(LatticeError::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self {
            context: self.context,
            coeff_l,
            coeff_e,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_scale(-1)?)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self> {
        let coeff_l = self.coeff_l.checked_mul(k).ok_or(LatticeError::Overflow)?;
        let coeff_e = self
            .coeff_e
            .iter()
            .map(|a| a.checked_mul(k).ok_or(LatticeError::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self {
            context: self.context,
            coeff_l,
            coeff_e,
        })
    }

    pub fn self_intersection(&self) -> Result<i64> {
        intersect(self, self)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.coeff_l)?;
        for (i, c) in self.coeff_e.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}

/// Intersection product `(2g−2)·a_L·b_L − Σ aᵢ·bᵢ`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
    a.same_context(b)?;
    let mut acc = a
        .coeff_l
        .checked_mul(b.coeff_l)
        .and_then(|x| x.checked_mul(a.context.genus.selfint()))
        .ok_or(LatticeError::Overflow)?;
    for (x, y) in a.coeff_e.iter().zip(&b.coeff_e) {
        acc = x
            .checked_mul(*y)
            .and_then(|xy| acc.checked_sub(xy))
            .ok_or(LatticeError::Overflow)?;
    }
    Ok(acc)
}

/// `K = E₁ + ⋯ + E_p`; the K3 itself is K-trivial.
pub fn canonical_class(context: BlowupContext) -> DivisorClass {
    DivisorClass {
        context,
        coeff_l: 0,
        coeff_e: vec![1; context.p],
    }
}

/// `l·τ*L − Σ (2g−2)βᵢ·Eᵢ`, the pullback of `L` under the resolved map.
pub fn pullback_polarization(
    context: BlowupContext,
    l: i64,
    betas: &[i64],
) -> Result<DivisorClass> {
    if l <= 0 {
        return Err(LatticeError::NonPositiveDegree);
    }
    if betas.len() != context.p {
        return Err(LatticeError::WrongLength {
            expected: context.p,
            got: betas.len(),
        });
    }
    let selfint = context.genus.selfint();
    let coeff_e = betas
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b <= 0 {
                return Err(LatticeError::NonPositiveBeta {
                    index: i + 1,
                    value: b,
                });
            }
            b.checked_mul(selfint)
                .map(|alpha| -alpha)
                .ok_or(LatticeError::Overflow)
        })
        .collect::<Result<_>>()?;
    Ok(DivisorClass {
        context,
        coeff_l: l,
        coeff_e,
    })
}

/// `(φ̃*L)² / (2g−2)`; equals the topological degree whenever the betas are
/// consistent with `l`. Inconsistent inputs give whatever rational comes out.
pub fn degree_from_pullback(context: BlowupContext, l: i64, betas: &[i64]) -> Result<Rational> {
    let class = pullback_polarization(context, l, betas)?;
    let sq = class.self_intersection()?;
    Ok(Rational::new(
        BigInt::from(sq),
        BigInt::from(context.genus.selfint()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: u64, p: usize) -> BlowupContext {
        BlowupContext::new(PolarizedGenus::new(g).unwrap(), p)
    }

    #[test]
    fn genus_bounds() {
        assert_eq!(PolarizedGenus::new(1), Err(LatticeError::GenusTooSmall(1)));
        assert_eq!(PolarizedGenus::new(3).unwrap().selfint(), 4);
    }

    #[test]
    fn basis_products() {
        let c = ctx(3, 2);
        let l = DivisorClass::pullback_l(c);
        let e1 = DivisorClass::exceptional(c, 1).unwrap();
        let e2 = DivisorClass::exceptional(c, 2).unwrap();
        assert_eq!(intersect(&l, &l).unwrap(), 4);
        assert_eq!(intersect(&e1, &e1).unwrap(), -1);
        assert_eq!(intersect(&e1, &e2).unwrap(), 0);
        assert!(DivisorClass::exceptional(c, 3).is_err());
    }

    #[test]
    fn bilinear_hand_example() {
        let c = ctx(2, 1);
        let a = DivisorClass::new(c, 3, vec![-1]).unwrap();
        let b = DivisorClass::new(c, 1, vec![2]).unwrap();
        assert_eq!(intersect(&a, &b).unwrap(), 8);
    }

    #[test]
    fn mismatched_contexts_rejected() {
        let a = DivisorClass::pullback_l(ctx(2, 1));
        let b = DivisorClass::pullback_l(ctx(2, 2));
        assert!(matches!(
            intersect(&a, &b),
            Err(LatticeError::ContextMismatch(..))
        ));
        let c = DivisorClass::pullback_l(ctx(3, 1));
        assert!(intersect(&a, &c).is_err());
    }

    #[test]
    fn canonical() {
        assert_eq!(canonical_class(ctx(2, 0)), DivisorClass::zero(ctx(2, 0)));
        assert_eq!(canonical_class(ctx(2, 3)).coeff_e(), &[1, 1, 1]);
        assert_eq!(canonical_class(ctx(7, 5)).self_intersection().unwrap(), -5);
    }

    #[test]
    fn pullback() {
        let c = ctx(2, 4);
        let pb = pullback_polarization(c, 6, &[2, 2, 2, 2]).unwrap();
        assert_eq!(pb.coeff_l(), 6);
        assert_eq!(pb.coeff_e(), &[-4, -4, -4, -4]);
        assert_eq!(pb.self_intersection().unwrap(), 8);

        let id = pullback_polarization(ctx(5, 0), 1, &[]).unwrap();
        assert_eq!(id, DivisorClass::pullback_l(ctx(5, 0)));

        assert!(matches!(
            pullback_polarization(ctx(2, 2), 3, &[1, 0]),
            Err(LatticeError::NonPositiveBeta { index: 2, value: 0 })
        ));
        assert!(pullback_polarization(ctx(2, 2), 3, &[1]).is_err());
    }

    #[test]
    fn degree_from_pullback_examples() {
        let d = degree_from_pullback(ctx(3, 2), 6, &[2, 2]).unwrap();
        assert_eq!(d, Rational::from_integer(4.into()));
        let d = degree_from_pullback(ctx(2, 0), 1, &[]).unwrap();
        assert_eq!(d, Rational::from_integer(1.into()));
        let d = degree_from_pullback(ctx(2, 3), 4, &[2, 1, 1]).unwrap();
        assert_eq!(d, Rational::from_integer(4.into()));
        // inconsistent input is reported, not rejected
        let d = degree_from_pullback(ctx(3, 1), 2, &[1]).unwrap();
        assert_eq!(d, Rational::from_integer(0.into()));
        let d = degree_from_pullback(ctx(3, 1), 1, &[1]).unwrap();
        assert_eq!(d, Rational::from_integer((-3).into()));
    }

    #[test]
    fn overflow_is_an_error() {
        let c = ctx(2, 1);
        let big = DivisorClass::new(c, i64::MAX, vec![0]).unwrap();
        assert_eq!(intersect(&big, &big), Err(LatticeError::Overflow));
        assert_eq!(
            pullback_polarization(c, 1, &[i64::MAX]),
            Err(LatticeError::Overflow)
        );
    }
}
