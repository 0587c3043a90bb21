//! Ephemeris of the colliding primaries.
//!
//! The primaries run along a rectilinear Kepler collision orbit: their scaled
//! separation is rho(t) = 1 - cos E(t) with the eccentric anomaly solving
//! t = E - sin E. This module provides the anomaly solver, the separation,
//! and the Fourier coefficients of rho^{2k} consumed by the Melnikov series.

use std::collections::HashMap;
use std::sync::RwLock;

use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeLawError {
    #[error("Kepler iteration did not converge at t = {t}: residual {residual}")]
    NonConvergence { t: f64, residual: f64 },
}

/// E - sin E without cancellation: power series below 0.9, direct otherwise.
/// Valid for e in [0, pi].
fn e_minus_sin<R: Real>(e: &R) -> R {
    if e.clone() < R::from_f64(0.9) {
        // E^3/3! - E^5/5! + ... with term recurrence
        let e2 = e.clone() * e.clone();
        let mut term = e.clone() * e2.clone() / R::from_i64(6);
        let mut sum = term.clone();
        for m in 2..40i64 {
            term = -term * e2.clone() / R::from_i64(2 * m * (2 * m + 1));
            let next = sum.clone() + term.clone();
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    } else {
        e.clone() - e.sin()
    }
}

/// Kepler function residual on [0, 2*pi], exploiting the symmetry
/// f(2*pi - E) = 2*pi - f(E) to stay in the series-safe half.
fn kepler_lhs<R: Real>(e: &R) -> R {
    let pi = R::pi();
    if e.clone() <= pi {
        e_minus_sin(e)
    } else {
        R::two_pi() - e_minus_sin(&(R::two_pi() - e.clone()))
    }
}

/// Solves t = E - sin E for the eccentric anomaly.
///
/// Newton seeded by the collision-aware estimate, with a bisection fallback
/// bracket; converges for every real t including the collision phases where
/// dE/dt diverges. The periodic shift E(t + 2*pi) = E(t) + 2*pi holds by
/// construction: t is reduced to [0, 2*pi) and the winding is added back.
pub fn solve_kepler<R: Real>(t: &R, tol: &R) -> Result<R, TimeLawError> {
    let two_pi = R::two_pi();
    let winding = (t.clone() / two_pi.clone()).floor();
    let tr = t.clone() - winding.clone() * two_pi.clone();
    // guard against roundoff pushing tr out of [0, 2*pi)
    let tr = if tr < R::zero() {
        R::zero()
    } else if tr >= two_pi.clone() {
        R::zero()
    } else {
        tr
    };

    let e = solve_kepler_reduced(&tr, tol)?;
    Ok(e + winding * two_pi)
}

fn solve_kepler_reduced<R: Real>(tr: &R, tol: &R) -> Result<R, TimeLawError> {
    let two_pi = R::two_pi();
    let pi = R::pi();

    // seed: cubic root near the collisions, Danby offset elsewhere
    let small = R::from_f64(1e-3);
    let mut e = if tr.clone() < small {
        (R::from_i64(6) * tr.clone()).cbrt_like()
    } else if two_pi.clone() - tr.clone() < small {
        two_pi.clone() - (R::from_i64(6) * (two_pi.clone() - tr.clone())).cbrt_like()
    } else if tr.clone() <= pi {
        tr.clone() + R::from_f64(0.85)
    } else {
        tr.clone() - R::from_f64(0.85)
    };

    // monotone bracket
    let mut lo = R::zero();
    let mut hi = two_pi.clone();
    if e <= lo || e >= hi {
        e = tr.clone();
    }

    let floor = R::epsilon() * R::from_i64(16) * (R::one() + tr.abs());
    let target = tol.max_val(&floor);

    for _ in 0..200 {
        let f = kepler_lhs(&e) - tr.clone();
        if f.abs() <= target {
            return Ok(e);
        }
        if f > R::zero() {
            hi = e.clone();
        } else {
            lo = e.clone();
        }
        let deriv = R::one() - e.cos();
        let mut next = if deriv > R::epsilon() {
            e.clone() - f / deriv
        } else {
            (lo.clone() + hi.clone()) * R::half()
        };
        if next <= lo || next >= hi {
            next = (lo.clone() + hi.clone()) * R::half();
        }
        e = next;
    }

    let res = (kepler_lhs(&e) - tr.clone()).abs();
    if res <= target {
        Ok(e)
    } else {
        Err(TimeLawError::NonConvergence {
            t: tr.to_f64(),
            residual: res.to_f64(),
        })
    }
}

/// Cube root helper for Real (only used for positive seeds).
trait CbrtLike: Real {
    fn cbrt_like(&self) -> Self {
        // exp(ln(x)/3) with a Newton polish; seeds only, so roundoff is fine
        if *self == Self::zero() {
            return Self::zero();
        }
        let mut x = (self.ln() / Self::from_i64(3)).exp();
        for _ in 0..2 {
            let x2 = x.clone() * x.clone();
            x = (Self::two() * x.clone() + self.clone() / x2) / Self::from_i64(3);
        }
        x
    }
}
impl<R: Real> CbrtLike for R {}

/// Primaries' separation rho(t) = 1 - cos E(t) = 2 sin^2(E/2), in [0, 2].
pub fn rho<R: Real>(t: &R, tol: &R) -> Result<R, TimeLawError> {
    let e = solve_kepler(t, tol)?;
    Ok(rho_of_anomaly(&e))
}

/// rho as a function of the eccentric anomaly (cancellation-free form).
pub fn rho_of_anomaly<R: Real>(e: &R) -> R {
    let s = (e.clone() * R::half()).sin();
    R::two() * s.clone() * s
}

/// d(rho^2)/dt = 2 sin E(t).
pub fn rho_sq_derivative<R: Real>(t: &R, tol: &R) -> Result<R, TimeLawError> {
    let e = solve_kepler(t, tol)?;
    Ok(R::two() * e.sin())
}

/// Fourier coefficient of rho^{2k}: a_{l,k} = (1/2 pi) int rho^{2k}(s) e^{-i l s} ds.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficient<R: Real> {
    pub l: i64,
    pub k: u32,
    pub value: R,
    /// Change under the final node doubling.
    pub err_est: R,
}

/// Computes a_{l,k} by periodic trapezoid in the eccentric anomaly.
///
/// Substituting s = E - sin E turns the integrand into the entire periodic
/// function (1 - cos E)^{2k+1} cos(l (E - sin E)), so node doubling converges
/// spectrally; rho even in s makes the coefficient real and a_{-l,k} = a_{l,k}.
pub fn rho_pow_fourier<R: Real>(l: i64, k: u32, tol: &R) -> FourierCoefficient<R> {
    assert!(k >= 1, "power index k must be >= 1");
    let la = l.unsigned_abs() as usize;
    let mut n = (64 + 8 * la + 16 * (k as usize).isqrt()).next_power_of_two();
    let mut prev = a_lk_trapezoid::<R>(l, k, n);
    let mut err;
    loop {
        n *= 2;
        let cur = a_lk_trapezoid::<R>(l, k, n);
        err = (cur.clone() - prev.clone()).abs();
        prev = cur;
        if err <= tol.clone() || n >= 1 << 22 {
            break;
        }
    }
    FourierCoefficient {
        l,
        k,
        value: prev,
        err_est: err,
    }
}

fn a_lk_trapezoid<R: Real>(l: i64, k: u32, n: usize) -> R {
    let lr = R::from_i64(l);
    crate::quad::periodic_mean(n, |e: &R| {
        let r = rho_of_anomaly(e);
        let phase = lr.clone() * kepler_lhs(e);
        r.powi(2 * k as i32 + 1) * phase.cos()
    })
}

/// Concurrent cache of Fourier coefficients, keyed by (l, k).
///
/// The Melnikov series re-reads coefficients across harmonics and G values;
/// the cache is safe for concurrent read/insert.
pub struct FourierCache<R: Real> {
    tol: R,
    map: RwLock<HashMap<(i64, u32), R>>,
}

impl<R: Real> FourierCache<R> {
    pub fn new(tol: R) -> Self {
        FourierCache {
            tol,
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn get(&self, l: i64, k: u32) -> R {
        let key = (l.abs(), k);
        if let Some(v) = self.map.read().unwrap().get(&key) {
            return v.clone();
        }
        let coeff = rho_pow_fourier::<R>(key.0, k, &self.tol);
        let mut w = self.map.write().unwrap();
        w.entry(key).or_insert_with(|| coeff.value.clone());
        coeff.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j1;

    const TOL: f64 = 1e-14;

    /// Independent oracle: plain bisection on E - sin E - t over [0, 2 pi].
    fn kepler_bisect(t: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 2.0 * std::f64::consts::PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - mid.sin() - t > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identity_and_symmetry_points() {
        assert_eq!(solve_kepler(&0.0, &TOL).unwrap(), 0.0);
        let e = solve_kepler(&std::f64::consts::PI, &TOL).unwrap();
        assert!((e - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn matches_bisection_oracle_at_t1() {
        let oracle = kepler_bisect(1.0);
        let e = solve_kepler(&1.0, &TOL).unwrap();
        assert!((e - oracle).abs() < 1e-12);
        // frozen value from the oracle
        assert!((e - 1.93456).abs() < 1e-5);
        assert!((e - e.sin() - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn residual_small_on_random_sample() {
        // deterministic LCG sample over [0, 2 pi)
        let mut x = 0x2545F4914F6CDD1D_u64;
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let t = (x >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
            let e = solve_kepler(&t, &1e-14).unwrap();
            let res = (kepler_lhs(&e) - t).abs();
            worst = worst.max(res);
        }
        assert!(worst <= 1e-13, "worst residual {worst:.3e}");
    }

    #[test]
    fn periodic_shift_exact_contract() {
        for &t in &[0.3, 1.7, 4.4] {
            let e0 = solve_kepler(&t, &TOL).unwrap();
            let e1 = solve_kepler(&(t + std::f64::consts::TAU), &TOL).unwrap();
            assert!((e1 - e0 - std::f64::consts::TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_in_t() {
        let mut prev = -1.0;
        for j in 0..1000 {
            let t = j as f64 * 7.0 / 1000.0;
            let e = solve_kepler(&t, &TOL).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn rho_values_and_symmetry() {
        assert_eq!(rho(&0.0, &TOL).unwrap(), 0.0);
        assert!((rho(&std::f64::consts::PI, &TOL).unwrap() - 2.0).abs() < 1e-14);
        // rho(1) = 1 - cos(E(1))
        let e1 = solve_kepler(&1.0, &TOL).unwrap();
        let r1 = rho(&1.0, &TOL).unwrap();
        assert!((r1 - (1.0 - e1.cos())).abs() < 1e-14);
        assert!((r1 - 1.355797140388828).abs() < 1e-12);
        // evenness and periodicity
        for &t in &[0.4, 2.2, 5.9] {
            let a = rho(&t, &TOL).unwrap();
            let b = rho(&-t, &TOL).unwrap();
            let c = rho(&(t + std::f64::consts::TAU), &TOL).unwrap();
            assert!((a - b).abs() < 1e-13);
            assert!((a - c).abs() < 1e-13);
        }
    }

    #[test]
    fn rho_sq_derivative_against_finite_differences() {
        let h = 1e-6;
        for &t in &[0.5, 1.3, 2.9, 4.0, 5.5] {
            let d = rho_sq_derivative(&t, &TOL).unwrap();
            let rp = rho(&(t + h), &TOL).unwrap().powi(2);
            let rm = rho(&(t - h), &TOL).unwrap().powi(2);
            let fd = (rp - rm) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8, "t={t}: {d} vs {fd}");
        }
        // derivative vanishes into the collision
        let d_small = rho_sq_derivative(&1e-9, &TOL).unwrap();
        assert!(d_small.abs() < 1e-2);
    }

    #[test]
    fn fourier_a11_is_minus_two_j1() {
        let c = rho_pow_fourier::<f64>(1, 1, &1e-12);
        let expected = -2.0 * bessel_j1(&1.0_f64);
        assert!((c.value - expected).abs() < 1e-12, "{} vs {expected}", c.value);
        assert!((c.value + 0.8801011714898671).abs() < 1e-11);
    }

    #[test]
    fn fourier_a01_exact() {
        // (1 - cos E)^3 integrates to 5/2 on the mean: trig-moment oracle
        let c = rho_pow_fourier::<f64>(0, 1, &1e-12);
        assert!((c.value - 2.5).abs() < 1e-10);
    }

    #[test]
    fn fourier_bound_and_symmetry() {
        for &(l, k) in &[(0i64, 1u32), (1, 1), (2, 1), (1, 2), (3, 2), (2, 4), (5, 3)] {
            let c = rho_pow_fourier::<f64>(l, k, &1e-10);
            assert!(c.value.abs() <= 4.0f64.powi(k as i32) + 1e-9);
            let m = rho_pow_fourier::<f64>(-l, k, &1e-10);
            assert!((c.value - m.value).abs() < 1e-10);
        }
    }

    #[test]
    fn cache_returns_consistent_values() {
        let cache = FourierCache::<f64>::new(1e-12);
        let a = cache.get(1, 1);
        let b = cache.get(-1, 1);
        assert_eq!(a, b);
        assert!((a + 2.0 * bessel_j1(&1.0_f64)).abs() < 1e-12);
    }
}
