//! Quadrature primitives shared by the ephemeris and the Melnikov module:
//! Gauss-Legendre panels and the periodic trapezoid rule.

use crate::real::Real;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence, seeded with the Chebyshev
/// estimate; converges to the target precision's roundoff for any `Real`.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = R::from_i64(n as i64);
    let tol = R::epsilon() * R::from_i64(8);
    for i in 0..(n + 1) / 2 {
        // Chebyshev seed for the i-th root (descending).
        let arg = R::pi() * (R::from_i64(i as i64) + R::from_f64(0.75))
            / (nf.clone() + R::half());
        let mut x = arg.cos();
        let mut dp = R::one();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence.
            let mut p0 = R::one();
            let mut p1 = x.clone();
            for k in 2..=n {
                let kf = R::from_i64(k as i64);
                let p2 = ((R::from_i64(2 * k as i64 - 1) * x.clone() * p1.clone())
                    - (kf.clone() - R::one()) * p0)
                    / kf;
                p0 = p1;
                p1 = p2;
            }
            // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = nf.clone() * (x.clone() * p1.clone() - p0)
                / (x.clone() * x.clone() - R::one());
            let dx = p1 / dp.clone();
            x = x.clone() - dx.clone();
            if dx.abs() <= tol {
                break;
            }
        }
        let w = R::two() / ((R::one() - x.clone() * x.clone()) * dp.clone() * dp);
        nodes[i] = -x.clone();
        weights[i] = w.clone();
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrates `f` over [a, b] with a single Gauss-Legendre panel.
pub fn gl_panel<R: Real>(
    nodes: &[R],
    weights: &[R],
    a: &R,
    b: &R,
    mut f: impl FnMut(&R) -> R,
) -> R {
    let mid = (a.clone() + b.clone()) * R::half();
    let hal = (b.clone() - a.clone()) * R::half();
    let mut acc = R::zero();
    for (x, w) in nodes.iter().zip(weights) {
        let t = mid.clone() + hal.clone() * x.clone();
        acc += w.clone() * f(&t);
    }
    acc * hal
}

/// Mean of a 2*pi-periodic function by the n-point trapezoid rule
/// (spectrally accurate for analytic integrands).
pub fn periodic_mean<R: Real>(n: usize, mut f: impl FnMut(&R) -> R) -> R {
    let step = R::two_pi() / R::from_i64(n as i64);
    let mut acc = R::zero();
    for j in 0..n {
        let x = step.clone() * R::from_i64(j as i64);
        acc += f(&x);
    }
    acc / R::from_i64(n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(8);
        // degree 15 is exact for 8 nodes
        let val = gl_panel(&x, &w, &-1.0, &1.0, |t| t.powi(14));
        assert!((val - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gl_panel_on_shifted_interval() {
        let (x, w) = gauss_legendre::<f64>(16);
        let val = gl_panel(&x, &w, &0.0, &std::f64::consts::PI, |t| t.sin());
        assert!((val - 2.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_mean_spectral() {
        // mean of (1 - cos x)^3 over the circle is 5/2
        let m = periodic_mean::<f64>(64, |x| (1.0 - x.cos()).powi(3));
        assert!((m - 2.5).abs() < 1e-13);
    }
}
