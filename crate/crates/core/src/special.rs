//! Small closed-form special-function helpers: Bessel J1, the half-integer
//! Gamma ratio, and the binomial coefficients of the square-root expansion.

use crate::real::Real;

/// Bessel function of the first kind, order 1, by its power series.
///
/// The series converges rapidly for the |x| <= 4 arguments used here; terms
/// are added until they fall below the precision's roundoff.
pub fn bessel_j1<R: Real>(x: &R) -> R {
    let half_x = x.clone() * R::half();
    let x2 = half_x.clone() * half_x.clone();
    // term_0 = x/2, term_m = -term_{m-1} * (x/2)^2 / (m (m+1))
    let mut term = half_x;
    let mut sum = term.clone();
    for m in 1..200i64 {
        term = -term * x2.clone() / R::from_i64(m * (m + 1));
        let next = sum.clone() + term.clone();
        if next == sum {
            break;
        }
        sum = next;
    }
    sum
}

/// The closed form sqrt(pi) Gamma(2k - 1/2) / Gamma(2k), for k >= 1.
///
/// Evaluated as pi * prod_{j=1}^{2k-1} (j - 1/2)/j, which is stable for any
/// k the series truncation ever reaches.
pub fn gamma_ratio_half<R: Real>(k: u32) -> R {
    assert!(k >= 1);
    let mut acc = R::pi();
    for j in 1..=(2 * k as i64 - 1) {
        acc = acc * (R::from_i64(2 * j - 1) / R::from_i64(2 * j));
    }
    acc
}

/// binom(-1/2, k) by the stable recurrence b_k = -b_{k-1} (2k-1)/(2k).
pub fn binom_neg_half<R: Real>(k: u32) -> R {
    let mut b = R::one();
    for j in 1..=(k as i64) {
        b = -b * (R::from_i64(2 * j - 1) / R::from_i64(2 * j));
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_reference_values() {
        // Abramowitz & Stegun: J1(1) = 0.4400505857, J1(2) = 0.5767248078.
        assert!((bessel_j1(&1.0_f64) - 0.44005058574493355).abs() < 1e-15);
        assert!((bessel_j1(&2.0_f64) - 0.5767248077568734).abs() < 1e-15);
        assert!(bessel_j1(&0.0_f64).abs() == 0.0);
    }

    #[test]
    fn gamma_ratio_small_k() {
        // k=1: sqrt(pi) Gamma(3/2)/Gamma(2) = pi/2.
        assert!((gamma_ratio_half::<f64>(1) - std::f64::consts::PI / 2.0).abs() < 1e-15);
        // k=2: sqrt(pi) Gamma(7/2)/Gamma(4) = pi * (1/2)(3/4)(5/6) = 5 pi/16.
        assert!((gamma_ratio_half::<f64>(2) - 5.0 * std::f64::consts::PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn binom_recurrence_matches_direct() {
        assert_eq!(binom_neg_half::<f64>(0), 1.0);
        assert!((binom_neg_half::<f64>(1) + 0.5).abs() < 1e-16);
        assert!((binom_neg_half::<f64>(2) - 0.375).abs() < 1e-16);
        // (-1/2)(-3/2)(-5/2)/3! = -5/16
        assert!((binom_neg_half::<f64>(3) + 0.3125).abs() < 1e-16);
    }
}
