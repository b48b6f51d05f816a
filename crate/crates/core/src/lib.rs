//! Robust instability radius analysis for cyclic multi-agent networks.
//!
//! A network of `n` (odd) identical stable agents `h(s)` in a negative
//! feedback ring of strength `μ`, each agent carrying a multiplicative
//! uncertainty `(1 + δ_i(s))`, is unstable nominally; the question is how
//! large `‖Δ‖_{H∞}` must be before some stable `Δ` stabilizes it.
//!
//! - [`complexpoly`]: polynomial and rational arithmetic, root solvers.
//! - [`specnorm`]: root-location classification, L∞ / H∞ norms.
//! - [`cyclicnet`]: the ring model, modal decomposition, closed-loop polynomial.
//! - [`rirbounds`]: lower bounds, first-order closed forms, homogenization,
//!   stabilizer search and the parametric estimate.
//! - [`nyquistdata`]: inverse Nyquist and value-set data.

pub mod complexpoly;
pub mod cyclicnet;
pub mod error;
pub mod nyquistdata;
pub mod rirbounds;
pub mod specnorm;

pub use complexpoly::{ComplexPoly, RationalFn};
pub use cyclicnet::{CyclicNetwork, DiagPerturbation, ModalSet};
pub use error::{ErrorKind, Result, RirError};
pub use num_complex::Complex64;
pub use rirbounds::{RirReport, StabilizerCandidate, Tolerances};
pub use specnorm::{Classification, LinfNorm, StabilityReport};
