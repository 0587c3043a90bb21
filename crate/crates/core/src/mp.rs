//! Extended-precision scalars backed by MPFR.
//!
//! [`MpFloat<B>`] wraps a [`rug::Float`] whose precision is pinned to `B`
//! mantissa bits at every operation, so results are reproducible and the
//! roundoff envelope is exactly 2^(1-B). Only the two widths the toolkit
//! supports are exported: [`F113`] and [`F256`].

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::real::Real;

/// 113-bit mantissa float (binary128 width).
pub type F113 = MpFloat<113>;
/// 256-bit mantissa float.
pub type F256 = MpFloat<256>;

#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpFloat<const B: u32>(pub Float);

impl<const B: u32> MpFloat<B> {
    fn wrap(f: Float) -> Self {
        debug_assert_eq!(f.prec(), B);
        MpFloat(f)
    }

    pub fn into_inner(self) -> Float {
        self.0
    }
}

impl<const B: u32> Debug for MpFloat<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const B: u32> Display for MpFloat<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl<const B: u32> $trait for MpFloat<B> {
            type Output = Self;
            fn $fn(self, rhs: Self) -> Self {
                MpFloat::wrap(Float::with_val(B, &self.0 $op &rhs.0))
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

macro_rules! assignop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl<const B: u32> $trait for MpFloat<B> {
            fn $fn(&mut self, rhs: Self) {
                let v = Float::with_val(B, &self.0 $op &rhs.0);
                self.0 = v;
            }
        }
    };
}

assignop!(AddAssign, add_assign, +);
assignop!(SubAssign, sub_assign, -);
assignop!(MulAssign, mul_assign, *);
assignop!(DivAssign, div_assign, /);

impl<const B: u32> Neg for MpFloat<B> {
    type Output = Self;
    fn neg(self) -> Self {
        MpFloat::wrap(-self.0)
    }
}

impl<const B: u32> Real for MpFloat<B> {
    const BITS: u32 = B;

    fn from_f64(x: f64) -> Self {
        MpFloat::wrap(Float::with_val(B, x))
    }
    fn from_i64(n: i64) -> Self {
        MpFloat::wrap(Float::with_val(B, n))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn pi() -> Self {
        MpFloat::wrap(Float::with_val(B, Constant::Pi))
    }
    fn epsilon() -> Self {
        let mut e = Float::with_val(B, 1);
        e >>= (B - 1) as u32;
        MpFloat::wrap(e)
    }
    fn abs(&self) -> Self {
        MpFloat::wrap(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        MpFloat::wrap(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        MpFloat::wrap(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        MpFloat::wrap(self.0.clone().ln())
    }
    fn sin(&self) -> Self {
        MpFloat::wrap(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        MpFloat::wrap(self.0.clone().cos())
    }
    fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(B));
        (MpFloat::wrap(s), MpFloat::wrap(c))
    }
    fn atan2(&self, x: &Self) -> Self {
        MpFloat::wrap(self.0.clone().atan2(&x.0))
    }
    fn floor(&self) -> Self {
        MpFloat::wrap(self.0.clone().floor())
    }
    fn powi(&self, n: i32) -> Self {
        MpFloat::wrap(self.0.clone().pow(n))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_pinned() {
        let a = F113::from_f64(1.0) / F113::from_i64(3);
        assert_eq!(a.0.prec(), 113);
        let b = a.clone() * a.clone() + F113::pi();
        assert_eq!(b.0.prec(), 113);
    }

    #[test]
    fn agrees_with_f64_within_its_roundoff() {
        let x = 0.731_f64;
        let hi = F113::from_f64(x).sin().to_f64();
        assert!((hi - x.sin()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn epsilon_scales_with_width() {
        assert!(F256::epsilon().to_f64() < F113::epsilon().to_f64());
        let e = F113::epsilon();
        let expected = F113::from_f64(2.0).powi(-112);
        assert_eq!(e, expected);
    }
}
