//! Numerical toolkit for the restricted elliptic isosceles three-body
//! problem: the massless body moves in the plane perpendicular to two equal
//! primaries on a rectilinear collision orbit. For large angular momentum G
//! the system is a fast, exponentially weak perturbation of the parabolic
//! Kepler problem; this crate computes the ephemeris, the flow, the
//! stable/unstable manifolds of the periodic orbit at infinity, the Melnikov
//! potential by two independent routes, the measured splitting of the
//! manifolds, and pericenter-map symbolic diagnostics, and cross-validates
//! the asymptotic splitting law against direct measurement.

pub mod complexn;
pub mod dynamics;
pub mod integrator;
pub mod melnikov;
pub mod mp;
pub mod quad;
pub mod real;
pub mod special;
pub mod time_law;

pub use dynamics::{HomoclinicPoint, ModelParams, PhaseState};
pub use real::{Precision, Real};
