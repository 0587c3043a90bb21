//! The rescaled vector field of the restricted elliptic isosceles problem,
//! its perturbing potential, the unperturbed limit, and the closed-form
//! parabolic homoclinic orbit.
//!
//! Rescaled variables (r, y, xi): dr/ds = y, dy/ds = 1/r^3 - 1/r^2 - dU/dr,
//! dxi/ds = G^3, with U(r, xi) = 1/r - 1/sqrt(r^2 + rho^2(xi)/(4 G^4)).
//! The centrifugal term follows the equations of motion (energy carries
//! 1/(2 r^2)), which is the form consistent with the homoclinic singularity
//! structure at v = ±i/3.

use thiserror::Error;

use crate::real::{Precision, Real};
use crate::time_law;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("radius must be positive (got {r})")]
    DomainError { r: f64 },
}

/// A point of the rescaled phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<R: Real> {
    /// Scaled radius, > 0.
    pub r: R,
    /// Scaled radial momentum.
    pub y: R,
    /// Primary phase (unwrapped; collisions at xi = 0 mod 2 pi).
    pub xi: R,
}

impl<R: Real> PhaseState<R> {
    pub fn new(r: R, y: R, xi: R) -> Self {
        PhaseState { r, y, xi }
    }
}

/// Run parameters shared across the flow, tracing and diagnostics layers.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Angular momentum of the massless body; the asymptotic regime is G >= 1.
    pub g: f64,
    /// Local error tolerance of the integrator.
    pub tol_ode: f64,
    /// Kernel mantissa width.
    pub precision: Precision,
    /// Escape radius for final-motion diagnostics.
    pub r_esc: f64,
    /// Maximum flow-time budget for a single run.
    pub horizon: f64,
    /// Parabolic energy band half-width for H/P discrimination.
    pub h_par: f64,
}

impl ModelParams {
    pub fn new(g: f64) -> Self {
        ModelParams {
            g,
            tol_ode: 1e-13,
            precision: Precision::Bits53,
            r_esc: 50.0,
            horizon: 1e4,
            h_par: 1e-4,
        }
    }

    /// G < 1 leaves the perturbative regime the toolkit is tuned for.
    pub fn g_in_asymptotic_regime(&self) -> bool {
        self.g >= 1.0
    }
}

/// rho^2(xi)/(4 G^4): the square-separation scale entering the potential.
fn coupling<R: Real>(xi: &R, g: &R) -> R {
    let tol = R::epsilon() * R::from_i64(64);
    let rho = time_law::rho(xi, &tol).expect("Kepler solver converges for finite xi");
    let g2 = g.clone() * g.clone();
    rho.clone() * rho / (R::from_i64(4) * g2.clone() * g2)
}

/// Perturbing potential U(r, xi; G) = 1/r - 1/sqrt(r^2 + rho^2(xi)/(4 G^4)).
///
/// Evaluated in the algebraically equivalent form
/// c / (r A (A + r)), A = sqrt(r^2 + c), c = rho^2/(4 G^4),
/// which has no cancellation for large r. Satisfies 0 <= U <= c/(2 r^3)
/// against its leading order.
pub fn perturbing_potential<R: Real>(r: &R, xi: &R, g: &R) -> Result<R, DynamicsError> {
    if *r <= R::zero() {
        return Err(DynamicsError::DomainError { r: r.to_f64() });
    }
    let c = coupling(xi, g);
    Ok(potential_from_coupling(r, &c))
}

pub(crate) fn potential_from_coupling<R: Real>(r: &R, c: &R) -> R {
    let a = (r.clone() * r.clone() + c.clone()).sqrt();
    c.clone() / (r.clone() * a.clone() * (a + r.clone()))
}

/// dU/dr in the cancellation-free form
/// -c (A^2 + A r + r^2) / ((A + r) r^2 A^3).
pub(crate) fn potential_dr_from_coupling<R: Real>(r: &R, c: &R) -> R {
    let r2 = r.clone() * r.clone();
    let a2 = r2.clone() + c.clone();
    let a = a2.clone().sqrt();
    let a3 = a2.clone() * a.clone();
    let num = a2 + a.clone() * r.clone() + r2.clone();
    -c.clone() * num / ((a + r.clone()) * r2 * a3)
}

/// The full rescaled vector field (dr/ds, dy/ds, dxi/ds).
pub fn vector_field<R: Real>(
    state: &PhaseState<R>,
    g: &R,
) -> Result<(R, R, R), DynamicsError> {
    if state.r <= R::zero() {
        return Err(DynamicsError::DomainError {
            r: state.r.to_f64(),
        });
    }
    let c = coupling(&state.xi, g);
    let dy = accel_from_coupling(&state.r, &c);
    let g3 = g.clone() * g.clone() * g.clone();
    Ok((state.y.clone(), dy, g3))
}

/// dy/ds = 1/r^3 - 1/r^2 - dU/dr for a precomputed coupling value.
pub(crate) fn accel_from_coupling<R: Real>(r: &R, c: &R) -> R {
    let inv_r = r.recip();
    let inv_r2 = inv_r.clone() * inv_r.clone();
    let inv_r3 = inv_r2.clone() * inv_r;
    inv_r3 - inv_r2 - potential_dr_from_coupling(r, c)
}

/// Unperturbed vector field (G -> infinity): dy/ds = 1/r^3 - 1/r^2.
pub fn unperturbed_field<R: Real>(state: &PhaseState<R>) -> Result<(R, R), DynamicsError> {
    if state.r <= R::zero() {
        return Err(DynamicsError::DomainError {
            r: state.r.to_f64(),
        });
    }
    let inv_r = state.r.recip();
    let inv_r2 = inv_r.clone() * inv_r.clone();
    let inv_r3 = inv_r2.clone() * inv_r;
    Ok((state.y.clone(), inv_r3 - inv_r2))
}

/// First integral of the unperturbed system:
/// h = y^2/2 + 1/(2 r^2) - 1/r. Zero exactly on the parabolic homoclinic.
pub fn unperturbed_energy<R: Real>(r: &R, y: &R) -> Result<R, DynamicsError> {
    if *r <= R::zero() {
        return Err(DynamicsError::DomainError { r: r.to_f64() });
    }
    let inv_r = r.recip();
    Ok(y.clone() * y.clone() * R::half() + inv_r.clone() * inv_r.clone() * R::half() - inv_r)
}

/// A point of the unperturbed parabolic homoclinic, parametrized by tau:
/// r_h = (1 + tau^2)/2, y_h = 2 tau/(1 + tau^2), v = (tau + tau^3/3)/2.
///
/// The complex continuation in v has branch points exactly at v = ±i/3
/// (tau = ±i). tau is the primary parameter; v-access inverts the cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct HomoclinicPoint<R: Real> {
    pub tau: R,
    pub v: R,
    pub r_h: R,
    pub y_h: R,
}

pub fn homoclinic_from_tau<R: Real>(tau: &R) -> HomoclinicPoint<R> {
    let t2 = tau.clone() * tau.clone();
    let r_h = (R::one() + t2.clone()) * R::half();
    let y_h = tau.clone() / r_h.clone();
    let v = (tau.clone() + tau.clone() * t2 / R::from_i64(3)) * R::half();
    HomoclinicPoint {
        tau: tau.clone(),
        v,
        r_h,
        y_h,
    }
}

/// Inverts v = (tau + tau^3/3)/2 for the unique real root.
///
/// Safeguarded Newton on the monotone cubic; round-trip error <= tol.
pub fn homoclinic_from_v<R: Real>(v: &R, tol: &R) -> HomoclinicPoint<R> {
    let tau = tau_from_v(v, tol);
    let mut p = homoclinic_from_tau(&tau);
    p.v = v.clone();
    p
}

pub fn tau_from_v<R: Real>(v: &R, tol: &R) -> R {
    // cubic tau^3/3 + tau = 2v, monotone increasing
    let b = R::two() * v.clone();
    if b == R::zero() {
        return R::zero();
    }
    // seed: max of linear and cubic-dominated estimates
    let cube = {
        let t = (R::from_i64(3) * b.abs()).ln() / R::from_i64(3);
        let s = t.exp();
        if b > R::zero() {
            s
        } else {
            -s
        }
    };
    let mut tau = if b.abs() < R::one() { b.clone() } else { cube };
    let floor = R::epsilon() * R::from_i64(8) * (R::one() + b.abs());
    let target = tol.max_val(&floor);
    for _ in 0..100 {
        let t2 = tau.clone() * tau.clone();
        let f = tau.clone() * t2.clone() / R::from_i64(3) + tau.clone() - b.clone();
        if f.abs() <= target {
            break;
        }
        tau = tau.clone() - f / (t2 + R::one());
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-14;

    #[test]
    fn potential_trivial_values() {
        // collision instant: rho(0) = 0 so U vanishes identically
        for &r in &[0.3, 1.0, 7.0] {
            let u = perturbing_potential(&r, &0.0, &2.0).unwrap();
            assert_eq!(u, 0.0);
        }
        // r = 1, rho = 2 (xi = pi), G chosen so rho^2/(4 G^4) = 1
        let u = perturbing_potential(&1.0, &std::f64::consts::PI, &1.0).unwrap();
        assert!((u - (1.0 - 1.0 / 2.0_f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn potential_bounds_and_leading_order() {
        let g = 2.0_f64;
        for &xi in &[0.7, 2.0, 3.14, 5.0] {
            let c = {
                let rho = time_law::rho(&xi, &TOL).unwrap();
                rho * rho / (4.0 * g.powi(4))
            };
            for &r in &[0.6, 1.0, 3.0, 10.0, 1e3, 1e6] {
                let u = perturbing_potential(&r, &xi, &g).unwrap();
                assert!(u >= 0.0);
                assert!(u <= c / (2.0 * r.powi(3)) + 1e-30, "r={r} xi={xi}");
            }
            // large-r limit: U * 8 G^4 r^3 / rho^2 -> 1
            let rho = time_law::rho(&xi, &TOL).unwrap();
            if rho > 0.0 {
                let r = 1e5_f64;
                let u = perturbing_potential(&r, &xi, &g).unwrap();
                let ratio = u * 8.0 * g.powi(4) * r.powi(3) / rho.powi(2);
                assert!((ratio - 1.0).abs() < 1e-9, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn potential_rejects_nonpositive_radius() {
        assert!(matches!(
            perturbing_potential(&0.0, &1.0, &2.0),
            Err(DynamicsError::DomainError { .. })
        ));
        assert!(matches!(
            perturbing_potential(&-1.0, &1.0, &2.0),
            Err(DynamicsError::DomainError { .. })
        ));
    }

    #[test]
    fn field_direct_arithmetic_cases() {
        // rho = 0 (xi = 0), r = 1/2, y = 0: dy/ds = 8 - 4 = 4
        let s = PhaseState::new(0.5, 0.0, 0.0);
        let (dr, dy, dxi) = vector_field(&s, &2.0).unwrap();
        assert_eq!(dr, 0.0);
        assert!((dy - 4.0).abs() < 1e-13);
        assert!((dxi - 8.0).abs() < 1e-14);
    }

    #[test]
    fn field_matches_independent_evaluation() {
        // r = 1, y = 0, xi = pi, G = 2: rho = 2, c = 4/(4*16) = 1/16
        // dU/dr = -1 + 1/(1 + 1/16)^{3/2}; dy/ds = 1 - 1 - dU/dr
        let s = PhaseState::new(1.0, 0.0, std::f64::consts::PI);
        let (_, dy, _) = vector_field(&s, &2.0).unwrap();
        let du = -1.0 + 1.0 / (1.0_f64 + 1.0 / 16.0).powf(1.5);
        assert!((dy - (-du)).abs() < 1e-14, "dy={dy}, expected {}", -du);
    }

    #[test]
    fn homoclinic_closed_form_points() {
        let p0 = homoclinic_from_tau(&0.0_f64);
        assert_eq!((p0.r_h, p0.y_h, p0.v), (0.5, 0.0, 0.0));
        let p1 = homoclinic_from_tau(&1.0_f64);
        assert!((p1.r_h - 1.0).abs() < 1e-15);
        assert!((p1.y_h - 1.0).abs() < 1e-15);
        assert!((p1.v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn homoclinic_energy_is_zero() {
        for &tau in &[-3.0, -1.0, -0.2, 0.0, 0.7, 2.5, 10.0] {
            let p = homoclinic_from_tau(&tau);
            let h = unperturbed_energy(&p.r_h, &p.y_h).unwrap();
            assert!(h.abs() <= 1e-14, "tau={tau}: h={h:e}");
        }
    }

    #[test]
    fn homoclinic_symmetry() {
        for &tau in &[0.3, 1.2, 4.0] {
            let p = homoclinic_from_tau(&tau);
            let m = homoclinic_from_tau(&-tau);
            assert_eq!(p.r_h, m.r_h);
            assert_eq!(p.y_h, -m.y_h);
            assert_eq!(p.v, -m.v);
        }
    }

    #[test]
    fn homoclinic_satisfies_unperturbed_ode() {
        // dr/dv = y and dy/dv = 1/r^3 - 1/r^2 with exact tau-derivatives
        // dr/dtau = tau, dy/dtau = (2 - 2 tau^2)/(1+tau^2)^2, dv/dtau = (1+tau^2)/2
        let mut worst = 0.0_f64;
        for j in 0..1000 {
            let tau = -8.0 + 16.0 * (j as f64) / 999.0;
            let p = homoclinic_from_tau(&tau);
            let dv = (1.0 + tau * tau) / 2.0;
            let dr_dv = tau / dv;
            let dy_dv = (2.0 - 2.0 * tau * tau) / (1.0 + tau * tau).powi(2) / dv;
            let res1 = (dr_dv - p.y_h).abs();
            let res2 = (dy_dv - (1.0 / p.r_h.powi(3) - 1.0 / p.r_h.powi(2))).abs();
            worst = worst.max(res1).max(res2);
        }
        assert!(worst <= 1e-12, "worst ODE residual {worst:e}");
    }

    #[test]
    fn homoclinic_large_tau_growth() {
        // r_h / v^{2/3} -> (9/2)^{1/3} for the closed form
        let p = homoclinic_from_tau(&1e6_f64);
        let ratio = p.r_h / p.v.powf(2.0 / 3.0);
        assert!((ratio - 4.5_f64.powf(1.0 / 3.0)).abs() < 1e-4, "{ratio}");
    }

    #[test]
    fn v_inversion_round_trip() {
        for &v in &[0.0, 2.0 / 3.0, -1.7, 10.0, -123.0, 4e4] {
            let p = homoclinic_from_v(&v, &1e-14);
            let back = homoclinic_from_tau(&p.tau);
            assert!((back.v - v).abs() <= 1e-12 * (1.0 + v.abs()), "v={v}");
        }
        assert_eq!(homoclinic_from_v(&0.0, &1e-14).tau, 0.0);
        let p = homoclinic_from_v(&(2.0 / 3.0), &1e-14);
        assert!((p.tau - 1.0).abs() < 1e-13);
    }

    #[test]
    fn v10_matches_bisection_oracle() {
        // tau^3/3 + tau = 20
        let (mut lo, mut hi) = (0.0_f64, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * mid / 3.0 + mid > 20.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let p = homoclinic_from_v(&10.0, &1e-14);
        assert!((p.tau - oracle).abs() < 1e-12);
    }

    #[test]
    fn reversibility_antisymmetry_of_field() {
        // (r, y, xi) -> (r, -y, -xi) flips (dr, dy) -> (-dr, dy)
        let g = 1.7_f64;
        for &(r, y, xi) in &[(0.8, 0.3, 1.1), (2.0, -0.5, 4.0), (5.5, 0.1, 2.2)] {
            let a = vector_field(&PhaseState::new(r, y, xi), &g).unwrap();
            let b = vector_field(&PhaseState::new(r, -y, -xi), &g).unwrap();
            assert!((a.0 + b.0).abs() < 1e-14);
            assert!((a.1 - b.1).abs() < 1e-14);
        }
    }
}
