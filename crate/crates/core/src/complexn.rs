//! Minimal complex arithmetic over a generic [`Real`].
//!
//! Only what the contour quadrature and the singularity checks need; not a
//! general-purpose complex library.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R: Real> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    pub fn from_re(re: R) -> Self {
        Complex::new(re, R::zero())
    }

    pub fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }

    pub fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }

    /// e^z = e^re (cos im + i sin im).
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex::new(m.clone() * c, m * s)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Complex::new(self.re.clone() / n.clone(), -self.im.clone() / n)
    }

    /// Integer power by repeated squaring; `n` may be negative.
    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut base = self.clone();
        let mut acc = Complex::new(R::one(), R::zero());
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &R) -> Self {
        Complex::new(self.re.clone() * k.clone(), self.im.clone() * k.clone())
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Complex::new(
            self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            self.re * o.im + self.im * o.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_and_exp() {
        let z = Complex::new(0.3_f64, -0.7);
        let z3 = z.powi(3);
        let direct = z.clone() * z.clone() * z.clone();
        assert!((z3.re - direct.re).abs() < 1e-15);
        assert!((z3.im - direct.im).abs() < 1e-15);

        // e^{i pi} = -1
        let e = Complex::new(0.0, std::f64::consts::PI).exp();
        assert!((e.re + 1.0).abs() < 1e-15);
        assert!(e.im.abs() < 1e-15);

        let zi = z.powi(-2);
        let prod = zi * z.powi(2);
        assert!((prod.re - 1.0).abs() < 1e-14);
        assert!(prod.im.abs() < 1e-14);
    }
}
