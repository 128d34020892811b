//! Precision limits for phase estimation in a Mach-Zehnder interferometer
//! whose second input port carries the vacuum.
//!
//! * [`fock`]: truncated two-mode Fock-space engine, the brute-force reference.
//! * [`probe`]: input states for mode A and their photon statistics.
//! * [`fisher`]: quantum Fisher information (matrices) and Cramér–Rao bounds.
//! * [`gaussian`]: covariance-matrix model of the squeezer / anti-squeezer
//!   detection scheme and its classical Fisher information.
//! * [`estimation`]: Monte Carlo maximum-likelihood campaigns.
//! * [`exec`]: sequential or rayon-parallel evaluation of independent work items.

pub mod error;
pub mod estimation;
pub mod exec;
pub mod fisher;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod probe;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fock::{FockCutoff, Generator, Mode, TwoModeState};
pub use probe::{PhotonStats, ProbeSpec};
