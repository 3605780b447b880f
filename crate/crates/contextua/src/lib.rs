//! Joint measurability of unsharp qubit observables and the LSW
//! noncontextuality inequality.
//!
//! The crate models two-outcome unbiased qubit observables
//! `O±(λ) = (I ± λ·σ)/2` in Bloch coefficient form and provides:
//!
//! - [`bloch`]: effects, POVMs, states, Born-rule probabilities and marginals;
//! - [`pairwise`]: the Busch pairwise joint-measurability criterion, the
//!   general four-effect joint POVM family and the optimal anti-correlating
//!   joint measurement;
//! - [`triplewise`]: the Fermat–Torricelli characterization of triplewise
//!   joint measurability, the explicit eight-effect joint construction and
//!   closed-form coplanar / orthogonal special cases;
//! - [`classical`]: noncontextual hidden-variable response functions,
//!   compatibility of pairwise contexts and a Monte Carlo verifier for the
//!   LSW bound `R3 <= 1 - eta_max/3`;
//! - [`lsw`]: the quantum maximum of the average anti-correlation `R3`, the
//!   violation curve over sharpness, and the critical sharpness where the
//!   violation peaks.
//!
//! All quantities are plain `f64` data; every operation is a pure function,
//! so values can be shared freely across threads.

pub mod bloch;
pub mod classical;
pub mod error;
pub mod lsw;
pub mod pairwise;
pub mod triplewise;

pub use bloch::{Effect, Povm, QubitState, UnbiasedObservable, Vec3, DEFAULT_TOL};
pub use error::{JmError, LswError, ModelError, PovmError};
