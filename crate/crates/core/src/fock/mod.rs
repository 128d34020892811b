//! Truncated two-mode Fock-space numerics.
//!
//! Two-mode states live on the basis `|n_A, n_B>` with total photon number
//! `n_A + n_B <= n_max`. Ordering is by total-number shell `N`, then by `n_A`
//! inside the shell, so every number-conserving element (beam splitter,
//! phase shift) acts block-diagonally on contiguous index ranges.
//!
//! These routines are the brute-force reference for every closed-form
//! quantity elsewhere in the crate.

mod circuit;
mod observe;
mod ops;
mod state;

pub use circuit::{squeezed_probe, squeezer_chain, squeezer_chain_auto};
pub use observe::{expectation, povm_prob_double_vacuum, quadrature_covariance, Ladder, Operator};
pub(crate) use ops::squeezed_vacuum;
pub use ops::{
    apply_beam_splitter, apply_beam_splitter_adjoint, apply_phase, apply_single_mode_squeeze,
    beam_splitter_blocks, squeeze_matrix,
};
pub use state::{StateKind, TwoModeState};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default admissible truncated-tail probability.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Photon-number truncation together with the admissible tail mass.
///
/// The tail of a state is the probability carried by the outermost shell
/// `n_A + n_B = n_max` plus anything already discarded beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockCutoff {
    n_max: usize,
    tail_tol: f64,
}

impl FockCutoff {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidCutoff(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        Ok(Self { n_max, tail_tol })
    }

    /// Cutoff with the default tail tolerance.
    pub fn with_n_max(n_max: usize) -> Self {
        Self {
            n_max,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn basis(&self) -> TwoModeBasis {
        TwoModeBasis { n_max: self.n_max }
    }

    pub(crate) fn certify(&self, tail: f64) -> Result<()> {
        if tail > self.tail_tol {
            Err(Error::CutoffOverflow {
                n_max: self.n_max,
                tail,
                tol: self.tail_tol,
            })
        } else {
            Ok(())
        }
    }
}

/// Index map for the total-number-truncated two-mode basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoModeBasis {
    n_max: usize,
}

impl TwoModeBasis {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 2) / 2
    }

    /// First index of the shell with total photon number `n`.
    pub fn shell_start(&self, n: usize) -> usize {
        n * (n + 1) / 2
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> Option<usize> {
        let n = n_a + n_b;
        (n <= self.n_max).then(|| self.shell_start(n) + n_a)
    }

    /// `(n_A, n_B)` labels in index order.
    pub fn labels(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..=self.n_max).flat_map(|n| (0..=n).map(move |a| (a, n - a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// Phase-shift generator, diagonal in the number basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `(n_A - n_B) / 2`, conjugate to the phase difference of the two arms.
    Difference,
    /// `(n_A + n_B) / 2`, conjugate to the phase sum.
    Sum,
    /// `n_A`, a phase shift in arm A only.
    OneArm,
}

impl Generator {
    pub fn eigenvalue(self, n_a: usize, n_b: usize) -> f64 {
        let (a, b) = (n_a as f64, n_b as f64);
        match self {
            Generator::Difference => 0.5 * (a - b),
            Generator::Sum => 0.5 * (a + b),
            Generator::OneArm => a,
        }
    }

    pub fn diagonal(self, basis: TwoModeBasis) -> Vec<f64> {
        basis.labels().map(|(a, b)| self.eigenvalue(a, b)).collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            Generator::Difference => "g_d",
            Generator::Sum => "g_s",
            Generator::OneArm => "g_1",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_indexing_is_dense_and_ordered() {
        let basis = FockCutoff::with_n_max(6).basis();
        for (i, (a, b)) in basis.labels().enumerate() {
            assert_eq!(basis.index(a, b), Some(i));
        }
        assert_eq!(basis.labels().count(), basis.dim());
        assert_eq!(basis.index(4, 3), None);
    }

    #[test]
    fn generator_eigenvalues() {
        assert_eq!(Generator::Difference.eigenvalue(3, 1), 1.0);
        assert_eq!(Generator::Sum.eigenvalue(3, 1), 2.0);
        assert_eq!(Generator::OneArm.eigenvalue(3, 1), 3.0);
    }

    #[test]
    fn cutoff_rejects_bad_tolerance() {
        assert!(FockCutoff::new(10, 0.0).is_err());
        assert!(FockCutoff::new(10, 1.0).is_err());
        assert!(FockCutoff::new(10, 1e-10).is_ok());
    }
}
