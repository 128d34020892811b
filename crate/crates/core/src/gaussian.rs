//! Covariance-matrix model of the squeezer / anti-squeezer detection scheme.
//!
//! Quadratures are ordered `(x_A, p_A, x_B, p_B)` and scaled so that the
//! vacuum covariance is the identity. A symplectic map `S` acts as
//! `gamma -> S gamma S^T`, `d -> S d`.

use nalgebra::{Complex, Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};

/// Finite-difference step for `dP00 / dphi`.
pub const FD_STEP: f64 = 1e-5;

/// Below this value of `1 - P00` the two-outcome CFI is taken from its
/// small-phase limit instead of the 0/0 finite-difference ratio.
pub const NEAR_CERTAIN_TOL: f64 = 1e-14;

const VALIDITY_TOL: f64 = 1e-9;

fn omega() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symplectic {
    pub s: Matrix4<f64>,
}

impl Symplectic {
    /// `max |S Omega S^T - Omega|`.
    pub fn defect(&self) -> f64 {
        (self.s * omega() * self.s.transpose() - omega()).amax()
    }

    pub fn is_valid(&self) -> bool {
        self.defect() <= VALIDITY_TOL
    }

    pub fn transpose(&self) -> Self {
        Self {
            s: self.s.transpose(),
        }
    }
}

impl std::ops::Mul for Symplectic {
    type Output = Symplectic;

    fn mul(self, rhs: Symplectic) -> Symplectic {
        Symplectic { s: self.s * rhs.s }
    }
}

pub fn symplectic_bs(t: f64) -> Result<Symplectic> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "transmittance must lie in [0, 1], got {t}"
        )));
    }
    let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
    Ok(Symplectic {
        s: Matrix4::new(
            a, 0.0, b, 0.0, //
            0.0, a, 0.0, b, //
            -b, 0.0, a, 0.0, //
            0.0, -b, 0.0, a,
        ),
    })
}

/// Phase rotation of mode A.
pub fn symplectic_ps(phi: f64) -> Symplectic {
    let (s, c) = phi.sin_cos();
    Symplectic {
        s: Matrix4::new(
            c, s, 0.0, 0.0, //
            -s, c, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ),
    }
}

/// Squeezing of mode A: `diag(e^-r, e^r, 1, 1)`.
pub fn symplectic_sq(r: f64) -> Symplectic {
    Symplectic {
        s: Matrix4::from_diagonal(&Vector4::new((-r).exp(), r.exp(), 1.0, 1.0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub cov: Matrix4<f64>,
    pub mean: Vector4<f64>,
}

impl GaussianState {
    pub fn vacuum() -> Self {
        Self {
            cov: Matrix4::identity(),
            mean: Vector4::zeros(),
        }
    }

    pub fn transform(&self, s: &Symplectic) -> Self {
        Self {
            cov: s.s * self.cov * s.s.transpose(),
            mean: s.s * self.mean,
        }
    }

    /// Checks symmetry and the uncertainty relation `gamma + i Omega >= 0`.
    pub fn validate(&self) -> Result<()> {
        let asym = (self.cov - self.cov.transpose()).amax();
        if asym > VALIDITY_TOL * self.cov.amax().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "covariance matrix is not symmetric (defect {asym:.3e})"
            )));
        }
        let om = omega();
        let herm = Matrix4::from_fn(|i, j| Complex::new(self.cov[(i, j)], om[(i, j)]));
        let min_ev = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_ev < -VALIDITY_TOL * self.cov.amax().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "covariance violates the uncertainty relation (eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(())
    }
}

/// `S_SQ(-r) S_BS^T S_PS S_BS S_SQ(r)`: squeeze, split, shift, recombine, unsqueeze.
pub fn chain_symplectic(r: f64, t: f64, phi: f64) -> Result<Symplectic> {
    let bs = symplectic_bs(t)?;
    Ok(symplectic_sq(-r) * bs.transpose() * symplectic_ps(phi) * bs * symplectic_sq(r))
}

/// Covariance in front of the two detectors for vacuum inputs.
pub fn chain_output(r: f64, t: f64, phi: f64) -> Result<GaussianState> {
    if !r.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidParameter("r and phi must be finite".into()));
    }
    Ok(GaussianState::vacuum().transform(&chain_symplectic(r, t, phi)?))
}

/// Probability that both on-off detectors see vacuum:
/// `4 / sqrt(det(gamma + I))`, times `exp(-d^T (gamma + I)^-1 d / 2)` for a
/// nonzero mean `d`.
pub fn p00(state: &GaussianState) -> f64 {
    let shifted = state.cov + Matrix4::identity();
    let base = 4.0 / shifted.determinant().sqrt();
    if state.mean.iter().all(|x| *x == 0.0) {
        return base;
    }
    let inv = shifted
        .try_inverse()
        .expect("gamma + I is positive definite");
    base * (-0.5 * (state.mean.transpose() * inv * state.mean)[(0, 0)]).exp()
}

pub fn p00_chain(r: f64, t: f64, phi: f64) -> Result<f64> {
    Ok(p00(&chain_output(r, t, phi)?))
}

/// `dP00/dphi` by central differences with one Richardson level (error `O(h^4)`).
pub fn dp00_dphi(r: f64, t: f64, phi: f64) -> Result<f64> {
    let central = |h: f64| -> Result<f64> {
        Ok((p00_chain(r, t, phi + h)? - p00_chain(r, t, phi - h)?) / (2.0 * h))
    };
    let coarse = central(FD_STEP)?;
    let fine = central(0.5 * FD_STEP)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfiEstimate {
    pub value: f64,
    pub p00: f64,
    /// The point was too close to `P00 = 1` and the small-phase limit was used.
    pub limit_path: bool,
}

/// Classical Fisher information of the two-outcome measurement
/// `{double vacuum, anything else}`: `(P00')^2 / (P00 (1 - P00))`.
pub fn cfi_two_outcome(r: f64, t: f64, phi: f64) -> Result<CfiEstimate> {
    let p = p00_chain(r, t, phi)?;
    if 1.0 - p < NEAR_CERTAIN_TOL {
        return Ok(CfiEstimate {
            value: cfi_limit(2.0 * r.sinh().powi(2), t),
            p00: p,
            limit_path: true,
        });
    }
    if p <= 0.0 {
        return Err(Error::DegenerateProbability { p });
    }
    let d = dp00_dphi(r, t, phi)?;
    Ok(CfiEstimate {
        value: d * d / (p * (1.0 - p)),
        p00: p,
        limit_path: false,
    })
}

/// Small-phase limit `2 n_tot T (1 + T + n_tot T)`, with `n_tot` counting the
/// photons of both squeezers.
pub fn cfi_limit(nbar_tot: f64, t: f64) -> f64 {
    2.0 * nbar_tot * t * (1.0 + t + nbar_tot * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_matrices() {
        assert_eq!(symplectic_ps(0.0).s, Matrix4::identity());
        assert_eq!(symplectic_bs(1.0).unwrap().s, Matrix4::identity());
        let pair = symplectic_sq(0.7) * symplectic_sq(-0.7);
        assert!((pair.s - Matrix4::identity()).amax() < 1e-12);
        for s in [
            symplectic_bs(0.3).unwrap(),
            symplectic_ps(1.1),
            symplectic_sq(-0.4),
        ] {
            assert!(s.is_valid());
        }
        assert!(symplectic_bs(-0.1).is_err());
    }

    #[test]
    fn chain_identities() {
        let g = chain_output(0.8, 0.3, 0.0).unwrap();
        assert!((g.cov - Matrix4::identity()).amax() < 1e-12);
        let g = chain_output(0.0, 0.3, 1.2).unwrap();
        assert!((g.cov - Matrix4::identity()).amax() < 1e-12);
        assert_eq!(p00(&GaussianState::vacuum()), 1.0);
        assert!(p00_chain(0.5, 0.5, std::f64::consts::PI).unwrap() < 1.0);
        chain_output(0.9, 0.6, 0.4).unwrap().validate().unwrap();
    }

    #[test]
    fn invalid_covariance_rejected() {
        let mut g = GaussianState::vacuum();
        g.cov = Matrix4::identity() * 0.5;
        assert!(g.validate().is_err());
    }

    #[test]
    fn cfi_edge_cases() {
        let zero = cfi_two_outcome(0.0, 0.5, 0.3).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.limit_path);
        assert_eq!(cfi_two_outcome(0.7, 0.0, 0.3).unwrap().value, 0.0);
        assert_eq!(cfi_limit(0.0, 0.4), 0.0);
        assert!((cfi_limit(2.0, 0.5) - 5.0).abs() < 1e-15);
        assert!((cfi_limit(2.0, 0.25) - 1.75).abs() < 1e-15);
        let at_zero = cfi_two_outcome(1f64.asinh(), 0.5, 0.0).unwrap();
        assert!(at_zero.limit_path && (at_zero.value - 5.0).abs() < 1e-12);
    }
}
