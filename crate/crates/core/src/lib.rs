//! Hessian-driven Nesterov accelerated gradient (H-NAG) flow and its
//! discretizations, with per-iteration Lyapunov certificates.
//!
//! * [`objectives`]: smooth and composite test problems, proximal operators,
//!   and the oracle validation battery.
//! * [`flow`]: the continuous H-NAG system, an adaptive Dormand–Prince
//!   integrator, and the continuous decay certificate.
//! * [`solvers`]: the discrete schemes behind one stepping interface.
//! * [`diagnostics`]: Lyapunov bookkeeping, rate envelopes, and certificate
//!   checks over solver traces.
//! * [`bench`]: configuration-driven benchmark runner used by the `hnag` binary.

pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod objectives;
pub mod solvers;

pub use error::{Error, Result};
