use nalgebra::{DMatrix, DVector};

use super::{FockCutoff, TwoModeBasis};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, C64};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Repr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// Pure or mixed two-mode state on a truncated Fock basis.
///
/// `discarded` accumulates probability removed by truncation; the stored
/// amplitudes (or density) are renormalized after every such removal.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    pub(crate) cutoff: FockCutoff,
    pub(crate) repr: Repr,
    pub(crate) discarded: f64,
}

impl TwoModeState {
    pub fn vacuum(cutoff: FockCutoff) -> Self {
        Self::number(cutoff, 0, 0).expect("vacuum fits every cutoff")
    }

    /// The product number state `|n_a, n_b>`.
    pub fn number(cutoff: FockCutoff, n_a: usize, n_b: usize) -> Result<Self> {
        let basis = cutoff.basis();
        let idx = basis.index(n_a, n_b).ok_or(Error::CutoffOverflow {
            n_max: cutoff.n_max(),
            tail: 1.0,
            tol: cutoff.tail_tol(),
        })?;
        let mut amps = DVector::zeros(basis.dim());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(Self {
            cutoff,
            repr: Repr::Pure(amps),
            discarded: 0.0,
        })
    }

    /// Pure state from amplitudes in basis order; the norm must be 1 within 1e-12.
    pub fn from_amplitudes(cutoff: FockCutoff, amps: DVector<C64>) -> Result<Self> {
        let dim = cutoff.basis().dim();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "amplitudes have squared norm {norm}"
            )));
        }
        Ok(Self {
            cutoff,
            repr: Repr::Pure(amps),
            discarded: 0.0,
        })
    }

    /// Mixed state from a density matrix: Hermitian, unit trace, eigenvalues >= -1e-12.
    pub fn from_density(cutoff: FockCutoff, rho: DMatrix<C64>) -> Result<Self> {
        let dim = cutoff.basis().dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        if hermiticity_defect(&rho) > NORM_TOL {
            return Err(Error::InvalidParameter(
                "density matrix is not Hermitian".into(),
            ));
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has trace {trace}"
            )));
        }
        let min_ev = hermitian_eigenvalues(&rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_ev < -NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_ev}"
            )));
        }
        Ok(Self {
            cutoff,
            repr: Repr::Mixed(rho),
            discarded: 0.0,
        })
    }

    pub(crate) fn from_raw_density(cutoff: FockCutoff, rho: DMatrix<C64>) -> Self {
        Self {
            cutoff,
            repr: Repr::Mixed(rho),
            discarded: 0.0,
        }
    }

    /// Convex combination `sum_i w_i rho_i` of states sharing one cutoff.
    pub fn mixture(parts: &[(f64, &TwoModeState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?
            .1;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(
                "mixture weights must be non-negative and sum to 1".into(),
            ));
        }
        let dim = first.dim();
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        let mut discarded = 0.0;
        for (w, s) in parts {
            if s.cutoff.n_max() != first.cutoff.n_max() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
            rho += s.density() * C64::new(*w, 0.0);
            discarded += w * s.discarded;
        }
        Ok(Self {
            cutoff: first.cutoff,
            repr: Repr::Mixed(rho),
            discarded,
        })
    }

    pub fn kind(&self) -> StateKind {
        match self.repr {
            Repr::Pure(_) => StateKind::Pure,
            Repr::Mixed(_) => StateKind::Mixed,
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn basis(&self) -> TwoModeBasis {
        self.cutoff.basis()
    }

    pub fn dim(&self) -> usize {
        self.basis().dim()
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix; a pure state is expanded to `|psi><psi|`.
    pub fn density(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn into_mixed(self) -> Self {
        let rho = self.density();
        Self {
            repr: Repr::Mixed(rho),
            ..self
        }
    }

    /// Diagonal of the density matrix in basis order.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|c| c.norm_sqr()).collect(),
            Repr::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// Norm (pure) or trace (mixed).
    pub fn norm(&self) -> f64 {
        self.populations().iter().sum()
    }

    /// Distribution of the total photon number `n_A + n_B`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let basis = self.basis();
        let pops = self.populations();
        (0..=basis.n_max())
            .map(|n| {
                let s = basis.shell_start(n);
                pops[s..=s + n].iter().sum()
            })
            .collect()
    }

    /// Probability mass discarded so far plus the mass on the outermost shell.
    pub fn tail_mass(&self) -> f64 {
        let n_max = self.basis().n_max();
        self.discarded + self.total_number_distribution()[n_max]
    }

    pub fn discarded_mass(&self) -> f64 {
        self.discarded
    }

    pub fn certify(&self) -> Result<()> {
        self.cutoff.certify(self.tail_mass())
    }

    /// Fidelity-style overlap `|<a|b>|^2` for two pure states.
    pub fn overlap_sqr(&self, other: &TwoModeState) -> Result<f64> {
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) if a.len() == b.len() => Ok(a.dotc(b).norm_sqr()),
            (Repr::Pure(a), Repr::Pure(b)) => Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            }),
            _ => Err(Error::MixedState),
        }
    }

    /// Largest entry-wise difference between two states of the same kind and size.
    pub fn max_abs_diff(&self, other: &TwoModeState) -> f64 {
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => (a - b).camax(),
            _ => (self.density() - other.density()).camax(),
        }
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            match &mut self.repr {
                Repr::Pure(v) => *v /= C64::new(norm.sqrt(), 0.0),
                Repr::Mixed(m) => *m /= C64::new(norm, 0.0),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_state_outside_cutoff_overflows() {
        let cutoff = FockCutoff::with_n_max(3);
        assert!(matches!(
            TwoModeState::number(cutoff, 2, 2),
            Err(Error::CutoffOverflow { .. })
        ));
    }

    #[test]
    fn boundary_shell_counts_as_tail() {
        let cutoff = FockCutoff::with_n_max(3);
        let s = TwoModeState::number(cutoff, 3, 0).unwrap();
        assert_eq!(s.tail_mass(), 1.0);
        assert!(s.certify().is_err());
        assert!(TwoModeState::number(cutoff, 2, 0)
            .unwrap()
            .certify()
            .is_ok());
    }

    #[test]
    fn from_density_rejects_non_hermitian_and_bad_trace() {
        let cutoff = FockCutoff::with_n_max(1);
        let mut rho = DMatrix::<C64>::zeros(3, 3);
        rho[(0, 0)] = C64::new(0.5, 0.0);
        assert!(TwoModeState::from_density(cutoff, rho.clone()).is_err());
        rho[(1, 1)] = C64::new(0.5, 0.0);
        rho[(0, 1)] = C64::new(0.1, 0.0);
        assert!(TwoModeState::from_density(cutoff, rho.clone()).is_err());
        rho[(1, 0)] = C64::new(0.1, 0.0);
        assert!(TwoModeState::from_density(cutoff, rho).is_ok());
    }

    #[test]
    fn mixture_of_orthogonal_states_is_diagonal() {
        let cutoff = FockCutoff::with_n_max(3);
        let a = TwoModeState::number(cutoff, 1, 0).unwrap();
        let b = TwoModeState::number(cutoff, 0, 1).unwrap();
        let m = TwoModeState::mixture(&[(0.25, &a), (0.75, &b)]).unwrap();
        assert_eq!(m.kind(), StateKind::Mixed);
        let pops = m.populations();
        assert_eq!(pops[1], 0.75);
        assert_eq!(pops[2], 0.25);
    }
}
