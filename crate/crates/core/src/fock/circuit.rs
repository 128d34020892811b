//! Circuit builders for the interferometer layouts.

use super::ops::squeezed_vacuum;
use super::{
    apply_beam_splitter, apply_beam_splitter_adjoint, apply_phase, apply_single_mode_squeeze,
    FockCutoff, Generator, Mode, TwoModeState,
};
use crate::error::{Error, Result};

const MAX_AUTO_N_MAX: usize = 400;

/// Squeezed vacuum in mode A, vacuum in B, after the first beam splitter.
pub fn squeezed_probe(r: f64, t: f64, cutoff: FockCutoff) -> Result<TwoModeState> {
    apply_beam_splitter(&squeezed_vacuum(cutoff, r)?, t)
}

/// Squeezer, beam splitter, arm-A phase, inverse beam splitter, anti-squeezer.
///
/// The phase is applied as `exp(-i phi n_A)`, the Fock-space action of the
/// rotation `symplectic_ps(phi)`, so quadrature moments of the result can be
/// compared entry by entry with the covariance-matrix chain.
pub fn squeezer_chain(r: f64, t: f64, phi: f64, cutoff: FockCutoff) -> Result<TwoModeState> {
    let probe = squeezed_probe(r, t, cutoff)?;
    let shifted = apply_phase(&probe, Generator::OneArm, -phi);
    let back = apply_beam_splitter_adjoint(&shifted, t)?;
    apply_single_mode_squeeze(&back, -r, Mode::A)
}

/// [`squeezer_chain`] with the cutoff grown until the tail certifies at `tail_tol`.
pub fn squeezer_chain_auto(r: f64, t: f64, phi: f64, tail_tol: f64) -> Result<TwoModeState> {
    let stretch = (2.0 * r.abs()).sinh().powi(2);
    let mut n_max = 24 + (10.0 * stretch).ceil() as usize;
    loop {
        let cutoff = FockCutoff::new(n_max, tail_tol)?;
        match squeezer_chain(r, t, phi, cutoff) {
            Err(Error::CutoffOverflow { .. }) if n_max < MAX_AUTO_N_MAX => {
                n_max = (n_max * 3 / 2).min(MAX_AUTO_N_MAX);
            }
            other => return other,
        }
    }
}
