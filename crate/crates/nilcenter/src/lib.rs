//! Exact symbolic-numeric toolkit for switching planar polynomial Lienard
//! systems with a nilpotent origin: generalized Lyapunov constants through a
//! higher-order Poincare-Lyapunov pipeline, center certificates (Hamiltonian,
//! integrating-factor, symmetry), global-center analysis on the Poincare
//! disc, and a high-precision numeric backend (switching ODE integration with
//! event detection and sliding, return-map oracles, polynomial root
//! isolation).
//!
//! The exact half works over Q[pi] with arbitrary-precision rationals; pi is
//! only evaluated numerically at the boundary into `numerics`. The numeric
//! half is generic over the [`numerics::real::Real`] scalar; concrete aliases
//! are exported below.

pub mod biseries;
pub mod center;
pub mod config;
pub mod engine;
pub mod error;
pub mod numerics;
pub mod params;
pub mod pipoly;
pub mod rational;
pub mod report;
pub mod system;
pub mod theta;

pub use biseries::BiSeries;
pub use error::{Error, Result};
pub use params::{ParamPoly, ParamRational, VarSet};
pub use pipoly::PiPoly;
pub use rational::Rational;
pub use theta::{Segment, ThetaSeries};

/// Arbitrary-precision float scalar (astro-float backed).
pub type Big = numerics::real::Mpf;
/// Double-precision scalar; same numeric APIs, hardware speed.
pub type F64 = f64;
