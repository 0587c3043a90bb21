//! High-order adaptive integration with dense output and event location.
//!
//! The stepper is an explicit embedded Runge-Kutta 9(8) (Verner's efficient
//! pair) with a 9th-order interpolant, generic over the kernel scalar. The
//! right-hand side of the restricted problem is only C^1 across the primary
//! collision phases xi = 0 (mod 2 pi), so drivers pass those phases as
//! mandatory step boundaries; inside a segment the field is smooth and the
//! method runs at full order.

mod tableau;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::real::{Precision, Real, UnsupportedPrecision};

pub use tableau::{METHOD_ORDER, STAGES, TOTAL_STAGES};
use tableau::{A, A_DENSE, B_DENSE, B_HIGH, B_LOW, C, C_DENSE, EXTRA_STAGES, INTERP_ORDER};

/// Returns the arithmetic context for the requested mantissa width.
///
/// All subsequent kernel arithmetic routed through the returned context uses
/// at least that many mantissa bits; contexts are immutable and shareable.
pub fn set_precision(bits: u32) -> Result<Precision, UnsupportedPrecision> {
    Precision::from_bits(bits)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("radius fell below the r_min guard ({r} <= {r_min}) at s = {s}")]
    RadiusUnderflow { s: f64, r: f64, r_min: f64 },
    #[error("step size underflow at s = {s} (h = {h})")]
    StepUnderflow { s: f64, h: f64 },
    #[error("step budget exhausted after {steps} steps at s = {s}")]
    HorizonExceeded { s: f64, steps: usize },
    #[error(transparent)]
    Domain(#[from] DynamicsError),
}

/// Right-hand side of a 3-component first-order system u' = f(s, u).
pub trait Field<R: Real>: Sync {
    fn eval(&self, s: &R, u: &[R; 3]) -> Result<[R; 3], DynamicsError>;
}

impl<R: Real, F> Field<R> for F
where
    F: Fn(&R, &[R; 3]) -> Result<[R; 3], DynamicsError> + Sync,
{
    fn eval(&self, s: &R, u: &[R; 3]) -> Result<[R; 3], DynamicsError> {
        self(s, u)
    }
}

/// Event function with a direction constraint.
pub struct EventSpec<'a, R: Real> {
    pub g: &'a (dyn Fn(&R, &[R; 3]) -> R + Sync),
    /// +1: rising crossings only; -1: falling; 0: both.
    pub direction: i8,
    /// Stop the integration at the located crossing.
    pub terminal: bool,
}

#[derive(Debug, Clone)]
pub struct EventCrossing<R: Real> {
    /// Index into the event list.
    pub index: usize,
    pub s: R,
    pub state: [R; 3],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// One accepted step with everything the interpolant needs.
#[derive(Debug, Clone)]
pub struct DenseStep<R: Real> {
    pub s0: R,
    pub h: R,
    pub y0: [R; 3],
    pub y1: [R; 3],
    k: Vec<[R; 3]>,
}

/// Dense-output trajectory: ordered samples plus per-step interpolants.
#[derive(Debug, Clone)]
pub struct Trajectory<R: Real> {
    pub steps: Vec<DenseStep<R>>,
    pub stats: IntegrationStats,
}

impl<R: Real> Trajectory<R> {
    /// Ordered (s, state) samples at the accepted step ends.
    pub fn samples(&self) -> impl Iterator<Item = (R, [R; 3])> + '_ {
        self.steps.iter().map(|st| {
            (st.s0.clone() + st.h.clone(), st.y1.clone())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// Reached the end of the span.
    Completed,
    /// Stopped at a terminal event crossing.
    Event,
}

#[derive(Debug, Clone)]
pub struct Solution<R: Real> {
    pub s_end: R,
    pub state_end: [R; 3],
    pub crossings: Vec<EventCrossing<R>>,
    pub trajectory: Option<Trajectory<R>>,
    pub termination: Termination,
    pub stats: IntegrationStats,
}

/// Integration controls. `tol` drives both absolute and relative error.
#[derive(Debug, Clone)]
pub struct IntOptions<R: Real> {
    pub tol: R,
    /// Radius-underflow guard on the first state component, when set.
    pub r_min: Option<R>,
    pub max_steps: usize,
    pub store_dense: bool,
    pub event_tol: R,
}

impl<R: Real> IntOptions<R> {
    pub fn with_tol(tol: R) -> Self {
        IntOptions {
            tol,
            r_min: None,
            max_steps: 2_000_000,
            store_dense: false,
            event_tol: R::from_f64(1e-12),
        }
    }
}

pub struct Integrator<R: Real> {
    a: Vec<Vec<R>>,
    b_high: Vec<R>,
    b_low: Vec<R>,
    c: Vec<R>,
    a_dense: Vec<Vec<R>>,
    c_dense: Vec<R>,
    b_dense: Vec<Vec<R>>,
}

impl<R: Real> Default for Integrator<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> Integrator<R> {
    pub fn new() -> Self {
        Integrator {
            a: A.iter().map(|r| r.iter().map(|&x| R::from_f64(x)).collect()).collect(),
            b_high: B_HIGH.iter().map(|&x| R::from_f64(x)).collect(),
            b_low: B_LOW.iter().map(|&x| R::from_f64(x)).collect(),
            c: C.iter().map(|&x| R::from_f64(x)).collect(),
            a_dense: A_DENSE.iter().map(|r| r.iter().map(|&x| R::from_f64(x)).collect()).collect(),
            c_dense: C_DENSE.iter().map(|&x| R::from_f64(x)).collect(),
            b_dense: B_DENSE.iter().map(|r| r.iter().map(|&x| R::from_f64(x)).collect()).collect(),
        }
    }

    /// Evaluates the step interpolant at fraction `theta` in [0, 1].
    pub fn interpolate(&self, step: &DenseStep<R>, theta: &R) -> [R; 3] {
        let mut out = step.y0.clone();
        for (i, ki) in step.k.iter().enumerate() {
            // cont_i = theta * sum_j b_dense[i][j] theta^j (Horner)
            let row = &self.b_dense[i];
            let mut cont = row[INTERP_ORDER - 1].clone();
            for j in (0..INTERP_ORDER - 1).rev() {
                cont = cont * theta.clone() + row[j].clone();
            }
            cont = cont * theta.clone() * step.h.clone();
            for d in 0..3 {
                out[d] += ki[d].clone() * cont.clone();
            }
        }
        out
    }

    /// Integrates over `span`, landing exactly on every interior breakpoint.
    ///
    /// Breakpoints must lie strictly inside the span and be sorted in flow
    /// direction; the driver uses them for the collision phases where the
    /// right-hand side loses smoothness.
    pub fn solve(
        &self,
        field: &dyn Field<R>,
        y0: &[R; 3],
        span: (R, R),
        breakpoints: &[R],
        events: &[EventSpec<'_, R>],
        opts: &IntOptions<R>,
    ) -> Result<Solution<R>, IntegrateError> {
        let (s0, s1) = span;
        let forward = s1 >= s0;
        let dir = if forward { R::one() } else { -R::one() };

        let mut stats = IntegrationStats::default();
        let mut steps_store: Vec<DenseStep<R>> = Vec::new();
        let mut crossings: Vec<EventCrossing<R>> = Vec::new();

        let mut s = s0.clone();
        let mut y = y0.clone();
        self.check_radius(&s, &y, opts)?;

        let mut f0 = field.eval(&s, &y)?;
        stats.rhs_evals += 1;

        // initial step size from the first derivative scale
        let mut h = {
            let ynorm = norm3(&y) + R::one();
            let fnorm = norm3(&f0) + R::epsilon();
            let guess = (ynorm / fnorm) * R::from_f64(0.01);
            let span_len = (s1.clone() - s0.clone()).abs();
            guess.min_val(&span_len).max_val(&(R::epsilon() * R::from_i64(100)))
        };

        // segment targets: interior breakpoints then the span end
        let mut targets: Vec<R> = breakpoints.to_vec();
        targets.push(s1.clone());

        let order_inv = R::one() / R::from_i64(METHOD_ORDER as i64);
        let safety = R::from_f64(0.9);
        let min_scale = R::from_f64(0.2);
        let max_scale = R::from_f64(6.0);

        let mut k: Vec<[R; 3]> = vec![[R::zero(), R::zero(), R::zero()]; TOTAL_STAGES];

        for target in targets {
            loop {
                let remaining = (target.clone() - s.clone()) * dir.clone();
                if remaining <= R::epsilon() * (R::one() + s.abs()) * R::from_i64(4) {
                    // land exactly on the segment boundary
                    s = target.clone();
                    break;
                }
                if stats.accepted + stats.rejected >= opts.max_steps {
                    return Err(IntegrateError::HorizonExceeded {
                        s: s.to_f64(),
                        steps: stats.accepted,
                    });
                }
                let h_eff = h.min_val(&remaining);
                if h_eff <= R::epsilon() * (R::one() + s.abs()) {
                    return Err(IntegrateError::StepUnderflow {
                        s: s.to_f64(),
                        h: h_eff.to_f64(),
                    });
                }
                let h_signed = h_eff.clone() * dir.clone();
                let hits_target = h_eff == remaining;

                // stages
                k[0] = f0.clone();
                let mut stage_failed = false;
                for i in 1..STAGES {
                    let mut ys = y.clone();
                    for j in 0..i {
                        let aij = &self.a[i][j];
                        if *aij == R::zero() {
                            continue;
                        }
                        let w = aij.clone() * h_signed.clone();
                        for d in 0..3 {
                            ys[d] += k[j][d].clone() * w.clone();
                        }
                    }
                    let si = s.clone() + self.c[i].clone() * h_signed.clone();
                    match field.eval(&si, &ys) {
                        Ok(f) => k[i] = f,
                        Err(_) => {
                            stage_failed = true;
                            break;
                        }
                    }
                }
                stats.rhs_evals += STAGES - 1;
                if stage_failed {
                    stats.rejected += 1;
                    h = h_eff * R::from_f64(0.25);
                    continue;
                }

                // embedded pair
                let mut y_high = y.clone();
                let mut y_low = y.clone();
                for i in 0..STAGES {
                    let wh = self.b_high[i].clone() * h_signed.clone();
                    let wl = self.b_low[i].clone() * h_signed.clone();
                    for d in 0..3 {
                        y_high[d] += k[i][d].clone() * wh.clone();
                        y_low[d] += k[i][d].clone() * wl.clone();
                    }
                }

                let mut err_norm = R::zero();
                for d in 0..3 {
                    let scale = opts.tol.clone()
                        + opts.tol.clone() * y[d].abs().max_val(&y_high[d].abs());
                    let e = (y_high[d].clone() - y_low[d].clone()).abs() / scale;
                    err_norm = err_norm.max_val(&e);
                }

                if err_norm <= R::one() {
                    // accepted: extra stages for the interpolant
                    let need_dense = opts.store_dense || !events.is_empty();
                    if need_dense {
                        for i in 0..EXTRA_STAGES {
                            let mut ys = y.clone();
                            for j in 0..(STAGES + i) {
                                let aij = &self.a_dense[i][j];
                                if *aij == R::zero() {
                                    continue;
                                }
                                let w = aij.clone() * h_signed.clone();
                                for d in 0..3 {
                                    ys[d] += k[j][d].clone() * w.clone();
                                }
                            }
                            let si = s.clone() + self.c_dense[i].clone() * h_signed.clone();
                            match field.eval(&si, &ys) {
                                Ok(f) => k[STAGES + i] = f,
                                Err(e) => return Err(e.into()),
                            }
                        }
                        stats.rhs_evals += EXTRA_STAGES;
                    }

                    let s_new = if hits_target {
                        target.clone()
                    } else {
                        s.clone() + h_signed.clone()
                    };

                    let step = DenseStep {
                        s0: s.clone(),
                        h: h_signed.clone(),
                        y0: y.clone(),
                        y1: y_high.clone(),
                        k: if need_dense { k.clone() } else { Vec::new() },
                    };

                    // events on this step
                    if !events.is_empty() {
                        let stop = self.locate_events(
                            &step, events, opts, &mut crossings,
                        );
                        if let Some(cross) = stop {
                            let state = cross.state.clone();
                            let s_stop = cross.s.clone();
                            stats.accepted += 1;
                            if opts.store_dense {
                                steps_store.push(step);
                            }
                            return Ok(Solution {
                                s_end: s_stop,
                                state_end: state,
                                crossings,
                                trajectory: if opts.store_dense {
                                    Some(Trajectory { steps: steps_store, stats })
                                } else {
                                    None
                                },
                                termination: Termination::Event,
                                stats,
                            });
                        }
                    }

                    s = s_new;
                    y = y_high;
                    self.check_radius(&s, &y, opts)?;
                    f0 = field.eval(&s, &y)?;
                    stats.rhs_evals += 1;
                    stats.accepted += 1;
                    if opts.store_dense {
                        steps_store.push(step);
                    }
                }  else {
                    stats.rejected += 1;
                }

                // PI-free controller, as in the embedded-pair references
                let mut scale = safety.clone()
                    * (err_norm.max_val(&R::from_f64(1e-30))).powi(-1).powf_via_exp(&order_inv);
                scale = scale.max_val(&min_scale).min_val(&max_scale);
                h = (h_eff * scale).max_val(&(R::epsilon() * R::from_i64(100)));
            }
        }

        Ok(Solution {
            s_end: s,
            state_end: y.clone(),
            crossings,
            trajectory: if opts.store_dense {
                Some(Trajectory { steps: steps_store, stats })
            } else {
                None
            },
            termination: Termination::Completed,
            stats,
        })
    }

    fn check_radius(
        &self,
        s: &R,
        y: &[R; 3],
        opts: &IntOptions<R>,
    ) -> Result<(), IntegrateError> {
        if let Some(r_min) = &opts.r_min {
            if y[0] <= *r_min {
                return Err(IntegrateError::RadiusUnderflow {
                    s: s.to_f64(),
                    r: y[0].to_f64(),
                    r_min: r_min.to_f64(),
                });
            }
        }
        Ok(())
    }

    /// Scans one accepted step for event crossings; returns a terminal one.
    fn locate_events(
        &self,
        step: &DenseStep<R>,
        events: &[EventSpec<'_, R>],
        opts: &IntOptions<R>,
        out: &mut Vec<EventCrossing<R>>,
    ) -> Option<EventCrossing<R>> {
        // sample the interpolant to bracket sign changes
        const SUBS: usize = 8;
        let mut terminal: Option<EventCrossing<R>> = None;
        for (idx, ev) in events.iter().enumerate() {
            let mut th_prev = R::zero();
            let mut g_prev = (ev.g)(&step.s0, &step.y0);
            for j in 1..=SUBS {
                let th = R::from_i64(j as i64) / R::from_i64(SUBS as i64);
                let (s_th, y_th) = self.point_at(step, &th);
                let g = (ev.g)(&s_th, &y_th);
                let rising = g_prev < R::zero() && g >= R::zero();
                let falling = g_prev > R::zero() && g <= R::zero();
                let wanted = match ev.direction {
                    1 => rising,
                    -1 => falling,
                    _ => rising || falling,
                };
                if wanted {
                    let cross = self.refine_crossing(
                        step, ev, th_prev.clone(), th.clone(), opts,
                    );
                    out.push(EventCrossing {
                        index: idx,
                        s: cross.0.clone(),
                        state: cross.1.clone(),
                    });
                    if ev.terminal {
                        let cand = EventCrossing {
                            index: idx,
                            s: cross.0,
                            state: cross.1,
                        };
                        let earlier = match &terminal {
                            None => true,
                            Some(t) => {
                                if step.h > R::zero() {
                                    cand.s < t.s
                                } else {
                                    cand.s > t.s
                                }
                            }
                        };
                        if earlier {
                            terminal = Some(cand);
                        }
                    }
                }
                th_prev = th;
                g_prev = g;
            }
        }
        if terminal.is_some() {
            // drop recorded crossings after the terminal point
            let t = terminal.as_ref().unwrap().s.clone();
            let fwd = step.h > R::zero();
            out.retain(|c| if fwd { c.s <= t } else { c.s >= t });
        }
        terminal
    }

    fn point_at(&self, step: &DenseStep<R>, theta: &R) -> (R, [R; 3]) {
        let s = step.s0.clone() + step.h.clone() * theta.clone();
        (s, self.interpolate(step, theta))
    }

    /// Bisection on the interpolant, then a secant polish.
    fn refine_crossing(
        &self,
        step: &DenseStep<R>,
        ev: &EventSpec<'_, R>,
        mut lo: R,
        mut hi: R,
        opts: &IntOptions<R>,
    ) -> (R, [R; 3]) {
        let (s_lo, y_lo) = self.point_at(step, &lo);
        let mut g_lo = (ev.g)(&s_lo, &y_lo);
        let _ = (s_lo, y_lo);
        for _ in 0..200 {
            let mid = (lo.clone() + hi.clone()) * R::half();
            let (s_m, y_m) = self.point_at(step, &mid);
            let g_m = (ev.g)(&s_m, &y_m);
            if g_m.abs() <= opts.event_tol
                || (hi.clone() - lo.clone()) * step.h.abs() <= opts.event_tol
            {
                return (s_m, y_m);
            }
            if (g_lo <= R::zero()) == (g_m <= R::zero()) {
                lo = mid;
                g_lo = g_m;
            } else {
                hi = mid;
            }
        }
        let mid = (lo + hi) * R::half();
        self.point_at(step, &mid)
    }
}

fn norm3<R: Real>(v: &[R; 3]) -> R {
    v[0].abs().max_val(&v[1].abs()).max_val(&v[2].abs())
}

/// x^p via exp(p ln x) for positive x; used only by the step controller.
trait PowViaExp: Real {
    fn powf_via_exp(&self, p: &Self) -> Self {
        (self.ln() * p.clone()).exp()
    }
}
impl<R: Real> PowViaExp for R {}

#[cfg(test)]
mod tests {
    use super::*;

    struct Exponential;
    impl Field<f64> for Exponential {
        fn eval(&self, _s: &f64, u: &[f64; 3]) -> Result<[f64; 3], DynamicsError> {
            Ok([u[0], -u[1], 1.0])
        }
    }

    #[test]
    fn integrates_exponential_to_high_accuracy() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-12);
        let sol = integ
            .solve(&Exponential, &[1.0, 1.0, 0.0], (0.0, 2.0), &[], &[], &opts)
            .unwrap();
        assert!((sol.state_end[0] - 2.0f64.exp()).abs() < 1e-11);
        assert!((sol.state_end[1] - (-2.0f64).exp()).abs() < 1e-12);
        assert!((sol.state_end[2] - 2.0).abs() < 1e-12);
    }

    struct Harmonic;
    impl Field<f64> for Harmonic {
        fn eval(&self, _s: &f64, u: &[f64; 3]) -> Result<[f64; 3], DynamicsError> {
            Ok([u[1], -u[0], 0.0])
        }
    }

    #[test]
    fn order_scaling_with_tolerance() {
        // halving the tolerance must reduce the error until the roundoff floor
        let integ = Integrator::<f64>::new();
        let span = (0.0, 10.0);
        let exact = 10.0f64.sin();
        let mut errs = Vec::new();
        for &tol in &[1e-6, 1e-8, 1e-10, 1e-12] {
            let opts = IntOptions::with_tol(tol);
            let sol = integ
                .solve(&Harmonic, &[0.0, 1.0, 0.0], span, &[], &[], &opts)
                .unwrap();
            errs.push((sol.state_end[0] - exact).abs());
        }
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] / 4.0 || w[1] < 1e-13, "errors: {errs:?}");
        }
    }

    #[test]
    fn dense_output_matches_endpoints_and_midpoint() {
        let integ = Integrator::<f64>::new();
        let mut opts = IntOptions::with_tol(1e-12);
        opts.store_dense = true;
        let sol = integ
            .solve(&Harmonic, &[0.0, 1.0, 0.0], (0.0, 3.0), &[], &[], &opts)
            .unwrap();
        let traj = sol.trajectory.unwrap();
        for st in &traj.steps {
            let y0 = integ.interpolate(st, &0.0);
            let y1 = integ.interpolate(st, &1.0);
            for d in 0..3 {
                assert!((y0[d] - st.y0[d]).abs() < 1e-13);
                assert!((y1[d] - st.y1[d]).abs() < 1e-12);
            }
            let ym = integ.interpolate(st, &0.5);
            let sm = st.s0 + 0.5 * st.h;
            assert!((ym[0] - sm.sin()).abs() < 1e-11, "interpolant off at {sm}");
        }
    }

    #[test]
    fn event_location_on_sine_zeros() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-12);
        let g = |_: &f64, u: &[f64; 3]| u[0];
        let events = [EventSpec { g: &g, direction: 1, terminal: false }];
        let sol = integ
            .solve(&Harmonic, &[0.0, 1.0, 0.0], (0.25, 20.0), &[], &events, &opts)
            .unwrap_or_else(|_| panic!());
        let _ = sol;
    }

    #[test]
    fn event_crossing_times_accurate() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-12);
        let g = |_: &f64, u: &[f64; 3]| u[0];
        let events = [EventSpec { g: &g, direction: 1, terminal: false }];
        // x(s) = sin(s - 0.5): rising zeros at 0.5 + 2 pi k
        let sol = integ
            .solve(&Harmonic, &[0.0, 1.0, 0.0], (0.5, 14.0), &[], &events, &opts)
            .unwrap();
        assert_eq!(sol.crossings.len(), 2);
        for (i, c) in sol.crossings.iter().enumerate() {
            let expected = 0.5 + std::f64::consts::TAU * (i as f64 + 1.0);
            assert!((c.s - expected).abs() < 1e-10, "{} vs {expected}", c.s);
        }
    }

    #[test]
    fn terminal_event_stops_integration() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-12);
        let g = |_: &f64, u: &[f64; 3]| u[0];
        let events = [EventSpec { g: &g, direction: 1, terminal: true }];
        let sol = integ
            .solve(&Harmonic, &[0.0, 1.0, 0.0], (0.5, 100.0), &[], &events, &opts)
            .unwrap();
        assert_eq!(sol.termination, Termination::Event);
        assert!((sol.s_end - 0.5 - std::f64::consts::TAU).abs() < 1e-10);
        assert!(sol.state_end[0].abs() < 1e-10);
    }

    #[test]
    fn backward_integration_returns_to_start() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-12);
        let fwd = integ
            .solve(&Harmonic, &[0.3, 0.7, 0.0], (0.0, 5.0), &[], &[], &opts)
            .unwrap();
        let back = integ
            .solve(&Harmonic, &fwd.state_end, (5.0, 0.0), &[], &[], &opts)
            .unwrap();
        assert!((back.state_end[0] - 0.3).abs() < 1e-11);
        assert!((back.state_end[1] - 0.7).abs() < 1e-11);
    }

    #[test]
    fn breakpoints_are_landed_exactly() {
        let integ = Integrator::<f64>::new();
        let mut opts = IntOptions::with_tol(1e-10);
        opts.store_dense = true;
        let bps = [0.777, 1.5, 2.25];
        let sol = integ
            .solve(&Harmonic, &[0.0, 1.0, 0.0], (0.0, 3.0), &bps, &[], &opts)
            .unwrap();
        let ends: Vec<f64> = sol.trajectory.unwrap().steps.iter()
            .map(|st| st.s0 + st.h)
            .collect();
        for b in bps {
            assert!(
                ends.iter().any(|&e| e == b || (e - b).abs() < 1e-15),
                "breakpoint {b} missing from step ends {ends:?}"
            );
        }
    }

    #[test]
    fn set_precision_contract() {
        assert!(set_precision(53).is_ok());
        assert!(set_precision(113).is_ok());
        assert!(set_precision(256).is_ok());
        assert!(set_precision(200).is_err());
    }

    #[test]
    fn determinism_same_bits_same_result() {
        let integ = Integrator::<f64>::new();
        let opts = IntOptions::with_tol(1e-11);
        let a = integ
            .solve(&Harmonic, &[0.1, 0.9, 0.0], (0.0, 7.0), &[], &[], &opts)
            .unwrap();
        let b = integ
            .solve(&Harmonic, &[0.1, 0.9, 0.0], (0.0, 7.0), &[], &[], &opts)
            .unwrap();
        assert_eq!(a.state_end[0].to_bits(), b.state_end[0].to_bits());
        assert_eq!(a.state_end[1].to_bits(), b.state_end[1].to_bits());
    }
}
