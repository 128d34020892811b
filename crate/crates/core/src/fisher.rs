//! Quantum Fisher information for the two interferometer phase models.
//!
//! Two-arm model: the unitary `exp(i g_s phi_s) exp(i g_d phi_d)` carries two
//! unknowns and the bound on `phi_d` is the `dd` element of the inverse
//! 2x2 QFIM. One-arm model: `exp(i g_1 phi_A)`, a single parameter.
//!
//! All QFIM values are taken at zero phase. For a unitary family
//! `U(phi) rho U(phi)^dag` the QFIM at any `phi` equals the QFIM of the
//! probe itself, because the generators commute with `U(phi)`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{Generator, StateKind, TwoModeState};
use crate::linalg::{hermitian_eigen, min_eigenvalue_real, sub_matrix, support_blocks, C64};
use crate::probe::{photon_stats, ProbeSpec};

/// Eigenvalue pairs with `lambda_k + lambda_l` below this are outside the support.
pub const SLD_SUPPORT_TOL: f64 = 1e-12;

/// Tolerance for treating a QFIM as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;

/// 2x2 QFIM over `(phi_d, phi_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qfim {
    pub f_dd: f64,
    pub f_ss: f64,
    pub f_sd: f64,
}

impl Qfim {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.f_dd, self.f_sd, self.f_sd, self.f_ss)
    }

    /// From a 2x2 matrix ordered `[d, s]`; off-diagonals are symmetrized.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.nrows(),
            });
        }
        Ok(Self {
            f_dd: m[(0, 0)],
            f_ss: m[(1, 1)],
            f_sd: 0.5 * (m[(0, 1)] + m[(1, 0)]),
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.f_dd + self.f_ss);
        let half_gap = (0.25 * (self.f_dd - self.f_ss).powi(2) + self.f_sd.powi(2)).sqrt();
        mean - half_gap
    }

    fn scale(&self) -> f64 {
        self.f_dd.abs().max(self.f_ss.abs()).max(self.f_sd.abs())
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL * self.scale().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    None,
    /// `F_ss = F_sd = 0`: the sum phase decouples and the bound is `1 / F_dd`.
    SingleParameter,
    /// Singular QFIM with a nonzero coupling: `phi_d` is not estimable.
    Singular,
}

/// Cramér–Rao report for `phi_d` in the two-arm model, per single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbReport {
    /// `F_ss / (F_ss F_dd - F_sd^2)`, the tight two-parameter bound.
    pub bound_phi_d: f64,
    /// `1 / F_dd`, the bound obtained by ignoring the phase sum.
    pub single_parameter_bound: f64,
    pub t: f64,
    /// Shot-noise variance `1 / nbar`.
    pub snl: f64,
    pub beats_snl: bool,
    pub degeneracy: Degeneracy,
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "transmittance must lie in [0, 1], got {t}"
        )))
    }
}

/// `4 (<g_i g_j> - <g_i><g_j>)` for a pure state and diagonal generators.
pub fn qfim_pure(state: &TwoModeState, gens: &[Generator]) -> Result<DMatrix<f64>> {
    if state.kind() != StateKind::Pure {
        return Err(Error::MixedState);
    }
    let pops = state.populations();
    let diags: Vec<Vec<f64>> = gens.iter().map(|g| g.diagonal(state.basis())).collect();
    let means: Vec<f64> = diags
        .iter()
        .map(|d| pops.iter().zip(d).map(|(p, g)| p * g).sum())
        .collect();
    Ok(DMatrix::from_fn(gens.len(), gens.len(), |i, j| {
        let cross: f64 = pops
            .iter()
            .zip(diags[i].iter().zip(&diags[j]))
            .map(|(p, (gi, gj))| p * gi * gj)
            .sum();
        4.0 * (cross - means[i] * means[j])
    }))
}

/// Pure-state QFI `4 (<g^2> - <g>^2)`.
pub fn qfi_pure(state: &TwoModeState, gen: Generator) -> Result<f64> {
    Ok(qfim_pure(state, &[gen])?[(0, 0)])
}

/// Two-arm QFIM of a pure state, computed from its number-basis moments.
pub fn qfim_pure_two_arm(state: &TwoModeState) -> Result<Qfim> {
    Qfim::from_matrix(&qfim_pure(state, &[Generator::Difference, Generator::Sum])?)
}

/// One-arm QFI of a pure probe behind a beam splitter of transmittance `t`:
/// `4 (T^2 V + T (1 - T) nbar)`.
pub fn qfi_g1_general_t(spec: &ProbeSpec, t: f64) -> Result<f64> {
    check_t(t)?;
    if !spec.is_pure() {
        return Err(Error::MixedState);
    }
    let st = photon_stats(spec)?;
    Ok(4.0 * (t * t * st.var + t * (1.0 - t) * st.nbar))
}

/// Closed-form two-arm QFIM for a pure probe:
/// `F_dd = (1 - c^2) nbar + c^2 V`, `F_ss = V`, `F_sd = -c V` with `c = 1 - 2T`.
pub fn qfim_two_arm(spec: &ProbeSpec, t: f64) -> Result<Qfim> {
    check_t(t)?;
    if !spec.is_pure() {
        return Err(Error::MixedState);
    }
    let st = photon_stats(spec)?;
    let c = 1.0 - 2.0 * t;
    Ok(Qfim {
        f_dd: (1.0 - c * c) * st.nbar + c * c * st.var,
        f_ss: st.var,
        f_sd: -c * st.var,
    })
}

/// `1 / (4 T (1 - T) nbar)`, the single-trial variance bound on `phi_d`.
pub fn no_go_bound(nbar: f64, t: f64) -> f64 {
    1.0 / (4.0 * t * (1.0 - t) * nbar)
}

/// Variance bound on `phi_d` from the `dd` element of the inverse QFIM.
pub fn crb_phi_d(qfim: &Qfim, nbar: f64, t: f64) -> Result<CrbReport> {
    check_t(t)?;
    if !qfim.is_psd() {
        return Err(Error::InvalidParameter(format!(
            "QFIM is not positive semidefinite (min eigenvalue {})",
            qfim.min_eigenvalue()
        )));
    }
    let scale = qfim.scale();
    let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let inv_or_inf = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
    let single_parameter_bound = inv_or_inf(qfim.f_dd);
    let det = qfim.f_ss * qfim.f_dd - qfim.f_sd * qfim.f_sd;
    let (bound_phi_d, degeneracy) = if qfim.f_ss.abs() <= tiny && qfim.f_sd.abs() <= tiny {
        (single_parameter_bound, Degeneracy::SingleParameter)
    } else if det <= 1e-12 * scale * scale {
        (f64::INFINITY, Degeneracy::Singular)
    } else {
        (qfim.f_ss / det, Degeneracy::None)
    };
    let snl = inv_or_inf(nbar);
    Ok(CrbReport {
        bound_phi_d,
        single_parameter_bound,
        t,
        snl,
        beats_snl: bound_phi_d < snl - 1e-12,
        degeneracy,
    })
}

/// QFIM of a (possibly mixed) state from the symmetric-logarithmic-derivative
/// spectral formula.
///
/// With `rho = sum_k lambda_k |k><k|` and the unitary-family derivative
/// `d rho / d phi_i = i [g_i, rho]`, the entries are
/// `F_ij = 2 sum_{k,l} (lambda_k - lambda_l)^2 / (lambda_k + lambda_l)
///          Re(<k|g_i|l><l|g_j|k>)`,
/// skipping pairs with `lambda_k + lambda_l <` [`SLD_SUPPORT_TOL`].
/// The density matrix is split into the connected blocks of its nonzero
/// pattern first; diagonal generators never couple different blocks.
pub fn qfim_mixed(state: &TwoModeState, gens: &[Generator]) -> Result<DMatrix<f64>> {
    qfim_mixed_with(state, gens, Execution::default())
}

pub fn qfim_mixed_with(
    state: &TwoModeState,
    gens: &[Generator],
    exec: Execution,
) -> Result<DMatrix<f64>> {
    let rho = state.density();
    let m = gens.len();
    let diags: Vec<Vec<f64>> = gens.iter().map(|g| g.diagonal(state.basis())).collect();
    let blocks: Vec<Vec<usize>> = support_blocks(&rho)
        .into_iter()
        .filter(|b| b.len() > 1)
        .collect();
    let parts = exec.map(&blocks, |idx| {
        let (lambda, vecs) = hermitian_eigen(sub_matrix(&rho, idx));
        let d = idx.len();
        let projected: Vec<DMatrix<C64>> = diags
            .iter()
            .map(|g| {
                let scaled = DMatrix::from_fn(d, d, |i, j| vecs[(i, j)] * g[idx[i]]);
                vecs.adjoint() * scaled
            })
            .collect();
        let mut f = DMatrix::<f64>::zeros(m, m);
        for k in 0..d {
            for l in 0..d {
                let sum = lambda[k] + lambda[l];
                if sum < SLD_SUPPORT_TOL {
                    continue;
                }
                let w = 2.0 * (lambda[k] - lambda[l]).powi(2) / sum;
                if w == 0.0 {
                    continue;
                }
                for i in 0..m {
                    for j in i..m {
                        let v = w * (projected[i][(k, l)] * projected[j][(l, k)]).re;
                        f[(i, j)] += v;
                    }
                }
            }
        }
        f
    });
    let mut total = DMatrix::<f64>::zeros(m, m);
    for f in parts {
        total += f;
    }
    for i in 0..m {
        for j in 0..i {
            total[(i, j)] = total[(j, i)];
        }
    }
    Ok(total)
}

/// One-arm QFI of the phase-averaged probe: `sum_n p_n 4 n T (1 - T) = 4 T (1 - T) nbar`.
pub fn qfi_phase_averaged(spec: &ProbeSpec, t: f64) -> Result<f64> {
    check_t(t)?;
    let st = photon_stats(spec)?;
    Ok(4.0 * t * (1.0 - t) * st.nbar)
}

/// Smallest eigenvalue of `rhs - lhs`; non-negative when `lhs <= rhs` as matrices.
pub fn matrix_gap(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> f64 {
    min_eigenvalue_real(&(rhs - lhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_beam_splitter, FockCutoff};
    use crate::probe::{build_state, phase_average};

    fn probe_state(spec: &ProbeSpec, t: f64) -> TwoModeState {
        let s = build_state(spec, spec.auto_cutoff(1e-12).unwrap()).unwrap();
        apply_beam_splitter(&s, t).unwrap()
    }

    #[test]
    fn fock_two_photons_quarter_splitter() {
        let s = probe_state(&ProbeSpec::Fock { n: 2 }, 0.25);
        let f = qfi_pure(&s, Generator::Difference).unwrap();
        assert!((f - 1.5).abs() < 1e-12);
        let q = qfim_two_arm(&ProbeSpec::Fock { n: 2 }, 0.25).unwrap();
        assert!((q.f_dd - 4.0 * 2.0 * 0.25 * 0.75).abs() < 1e-15);
        assert_eq!((q.f_ss, q.f_sd), (0.0, 0.0));
    }

    #[test]
    fn squeezed_closed_form_entries() {
        let q = qfim_two_arm(&ProbeSpec::squeezed_with_nbar(1.0), 0.25).unwrap();
        assert!((q.f_dd - 1.75).abs() < 1e-12);
        assert!((q.f_ss - 4.0).abs() < 1e-12);
        assert!((q.f_sd + 2.0).abs() < 1e-12);
        let half = qfim_two_arm(&ProbeSpec::Coherent { re: 0.7, im: 0.2 }, 0.5).unwrap();
        assert_eq!(half.f_sd, 0.0);
    }

    #[test]
    fn g1_general_t_edges() {
        let sq = ProbeSpec::squeezed_with_nbar(1.0);
        assert!((qfi_g1_general_t(&sq, 0.5).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(qfi_g1_general_t(&sq, 0.0).unwrap(), 0.0);
        assert_eq!(
            qfi_g1_general_t(&ProbeSpec::Fock { n: 3 }, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            qfi_g1_general_t(&ProbeSpec::Thermal { nbar: 1.0 }, 0.5),
            Err(Error::MixedState)
        );
    }

    #[test]
    fn crb_regular_and_degenerate_branches() {
        let q = Qfim {
            f_dd: 1.75,
            f_ss: 4.0,
            f_sd: -2.0,
        };
        let rep = crb_phi_d(&q, 1.0, 0.25).unwrap();
        assert!((rep.bound_phi_d - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(rep.snl, 1.0);
        assert!(!rep.beats_snl);
        assert_eq!(rep.degeneracy, Degeneracy::None);
        assert!((rep.single_parameter_bound - 1.0 / 1.75).abs() < 1e-15);

        let fock = qfim_two_arm(&ProbeSpec::Fock { n: 3 }, 0.3).unwrap();
        let rep = crb_phi_d(&fock, 3.0, 0.3).unwrap();
        assert_eq!(rep.degeneracy, Degeneracy::SingleParameter);
        assert!((rep.bound_phi_d - no_go_bound(3.0, 0.3)).abs() < 1e-12);

        let singular = Qfim {
            f_dd: 1.0,
            f_ss: 1.0,
            f_sd: 1.0,
        };
        let rep = crb_phi_d(&singular, 1.0, 0.5).unwrap();
        assert_eq!(rep.degeneracy, Degeneracy::Singular);
        assert!(rep.bound_phi_d.is_infinite());

        let not_psd = Qfim {
            f_dd: 1.0,
            f_ss: 1.0,
            f_sd: 2.0,
        };
        assert!(crb_phi_d(&not_psd, 1.0, 0.5).is_err());
    }

    #[test]
    fn balanced_splitter_gives_snl() {
        for spec in [
            ProbeSpec::squeezed_with_nbar(0.8),
            ProbeSpec::Coherent { re: 1.3, im: 0.0 },
        ] {
            let nbar = photon_stats(&spec).unwrap().nbar;
            let rep = crb_phi_d(&qfim_two_arm(&spec, 0.5).unwrap(), nbar, 0.5).unwrap();
            assert!((rep.bound_phi_d - 1.0 / nbar).abs() < 1e-12);
            assert!(!rep.beats_snl);
        }
    }

    #[test]
    fn mixed_formula_reduces_to_pure() {
        let s = probe_state(&ProbeSpec::squeezed_with_nbar(0.5), 0.5);
        let pure = qfi_pure(&s, Generator::OneArm).unwrap();
        let mixed = qfim_mixed(&s.clone().into_mixed(), &[Generator::OneArm]).unwrap()[(0, 0)];
        assert!((pure - mixed).abs() < 1e-8, "{pure} vs {mixed}");
    }

    #[test]
    fn phase_averaged_coherent_matches_closed_form() {
        let spec = ProbeSpec::Coherent {
            re: 2f64.sqrt(),
            im: 0.0,
        };
        let closed = qfi_phase_averaged(&spec, 0.25).unwrap();
        assert!((closed - 1.5).abs() < 1e-12);
        let avg = phase_average(&spec).unwrap();
        let cutoff = FockCutoff::new(spec.auto_cutoff(1e-12).unwrap().n_max(), 1e-12).unwrap();
        let s = apply_beam_splitter(&build_state(&avg, cutoff).unwrap(), 0.25).unwrap();
        let f = qfim_mixed(&s, &[Generator::OneArm]).unwrap()[(0, 0)];
        assert!((f - closed).abs() < 1e-6, "{f}");
        assert_eq!(qfi_phase_averaged(&spec, 0.0).unwrap(), 0.0);
    }
}
