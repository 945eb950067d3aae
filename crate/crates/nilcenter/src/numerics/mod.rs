//! High-precision numeric backend: switching ODE integration with events and
//! sliding, numeric return maps (the brute-force oracle for the symbolic
//! displacement), displacement-polynomial root isolation, Jacobian
//! nondegeneracy checks, and Poincare-disc portrait data.

pub mod jacobian;
pub mod ode;
pub mod portrait;
pub mod real;
pub mod retmap;
pub mod roots;
