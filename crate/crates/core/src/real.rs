//! Scalar abstraction for the numerical kernel.
//!
//! Everything downstream of the ephemeris (flow, tracing, oscillatory
//! quadrature) is generic over [`Real`] so the same code path runs in native
//! `f64` or in extended precision. The supported mantissa widths are fixed:
//! 53 (native), 113 and 256 bits (MPFR-backed, see [`crate::mp`]).

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Mantissa width selector for kernel arithmetic.
///
/// A `Precision` value is the "arithmetic context" of a run: it is immutable,
/// cheap to copy and shareable across workers. Identical runs at the same
/// precision are bit-identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// Native IEEE-754 binary64.
    Bits53,
    /// IEEE-754 binary128 mantissa width, via MPFR.
    Bits113,
    /// 256-bit mantissa, via MPFR.
    Bits256,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unsupported precision: {requested} bits (supported: 53, 113, 256)")]
pub struct UnsupportedPrecision {
    pub requested: u32,
}

impl Precision {
    /// Selects an arithmetic context from a mantissa width.
    pub fn from_bits(bits: u32) -> Result<Self, UnsupportedPrecision> {
        match bits {
            53 => Ok(Precision::Bits53),
            113 => Ok(Precision::Bits113),
            256 => Ok(Precision::Bits256),
            other => Err(UnsupportedPrecision { requested: other }),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Bits53 => 53,
            Precision::Bits113 => 113,
            Precision::Bits256 => 256,
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// Real scalar used by the numerical kernel.
///
/// By-value operator bounds keep generic code readable; the `f64`
/// implementation monomorphizes to plain machine arithmetic.
pub trait Real:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    /// Nearest `f64`; lossy above 53 bits.
    fn to_f64(&self) -> f64;

    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
    fn two() -> Self {
        Self::from_i64(2)
    }
    fn half() -> Self {
        Self::one() / Self::two()
    }
    fn pi() -> Self;
    fn two_pi() -> Self {
        Self::pi() * Self::two()
    }
    /// Unit roundoff (2^(1-BITS)).
    fn epsilon() -> Self;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn atan2(&self, x: &Self) -> Self;
    fn floor(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn is_finite(&self) -> bool;

    fn max_val(&self, other: &Self) -> Self {
        if *self >= *other {
            self.clone()
        } else {
            other.clone()
        }
    }
    fn min_val(&self, other: &Self) -> Self {
        if *self <= *other {
            self.clone()
        } else {
            other.clone()
        }
    }
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
    /// Euclidean remainder into [0, m).
    fn rem_euclid(&self, m: &Self) -> Self {
        let q = (self.clone() / m.clone()).floor();
        let r = self.clone() - q * m.clone();
        if r < Self::zero() {
            r + m.clone()
        } else if r >= m.clone() {
            r - m.clone()
        } else {
            r
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 53;

    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    #[inline(always)]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline(always)]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline(always)]
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    #[inline(always)]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline(always)]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline(always)]
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    #[inline(always)]
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    #[inline(always)]
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    #[inline(always)]
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    #[inline(always)]
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    #[inline(always)]
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    #[inline(always)]
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    #[inline(always)]
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    #[inline(always)]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    #[inline(always)]
    fn max_val(&self, other: &Self) -> Self {
        f64::max(*self, *other)
    }
    #[inline(always)]
    fn min_val(&self, other: &Self) -> Self {
        f64::min(*self, *other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_from_bits() {
        assert_eq!(Precision::from_bits(53).unwrap(), Precision::Bits53);
        assert_eq!(Precision::from_bits(113).unwrap(), Precision::Bits113);
        assert_eq!(Precision::from_bits(256).unwrap(), Precision::Bits256);
        assert_eq!(
            Precision::from_bits(64),
            Err(UnsupportedPrecision { requested: 64 })
        );
    }

    #[test]
    fn f64_roundoff_and_mod() {
        assert_eq!(<f64 as Real>::epsilon(), 2.0_f64.powi(-53));
        let m = f64::two_pi();
        let x = -0.5f64;
        let r = Real::rem_euclid(&x, &m);
        assert!(r >= 0.0 && r < m);
        assert!((r - (m - 0.5)).abs() < 1e-15);
    }
}
