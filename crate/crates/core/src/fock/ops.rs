use nalgebra::{DMatrix, DVector};

use super::state::Repr;
use super::{FockCutoff, Generator, Mode, TwoModeBasis, TwoModeState};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Acceptable deviation of a constructed squeeze matrix from orthogonality.
pub const UNITARITY_TOL: f64 = 1e-9;

fn check_transmittance(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "transmittance must lie in [0, 1], got {t}"
        )))
    }
}

/// Number-conserving beam-splitter blocks, one per total photon number `0..=n_max`.
///
/// Block `N` maps input `|j, N-j>` (column `j`) to output `|i, N-i>` (row `i`).
/// The transformation is fixed by
/// `a^dag -> sqrt(T) a^dag - sqrt(1-T) b^dag`, `b^dag -> sqrt(1-T) a^dag + sqrt(T) b^dag`,
/// which displaces coherent amplitudes exactly as the symplectic beam-splitter
/// matrix does on quadrature means. Columns are built by applying the mapped
/// creation operators to columns of block `N-1`, so every entry comes from a
/// short product of non-cancelling factors.
pub fn beam_splitter_blocks(n_max: usize, t: f64) -> Result<Vec<DMatrix<f64>>> {
    check_transmittance(t)?;
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    let mut blocks: Vec<DMatrix<f64>> = Vec::with_capacity(n_max + 1);
    blocks.push(DMatrix::from_element(1, 1, 1.0));
    for n in 1..=n_max {
        let prev = &blocks[n - 1];
        let mut block = DMatrix::<f64>::zeros(n + 1, n + 1);
        for j in 0..=n {
            // (coefficient on a^dag, coefficient on b^dag, source column, normalisation)
            let (ca, cb, src, count) = if j >= 1 {
                (st, -sr, j - 1, j)
            } else {
                (sr, st, 0, n)
            };
            let norm = 1.0 / (count as f64).sqrt();
            for i in 0..=n {
                let mut acc = 0.0;
                if i >= 1 {
                    acc += ca * (i as f64).sqrt() * prev[(i - 1, src)];
                }
                if i < n {
                    acc += cb * ((n - i) as f64).sqrt() * prev[(i, src)];
                }
                block[(i, j)] = acc * norm;
            }
        }
        blocks.push(block);
    }
    Ok(blocks)
}

fn apply_blocks(state: &TwoModeState, blocks: &[DMatrix<f64>], adjoint: bool) -> TwoModeState {
    let basis = state.basis();
    let shell = |n: usize| basis.shell_start(n)..basis.shell_start(n) + n + 1;
    let to_complex = |m: &DMatrix<f64>| {
        let m = if adjoint { m.transpose() } else { m.clone() };
        m.map(|x| C64::new(x, 0.0))
    };
    let cblocks: Vec<DMatrix<C64>> = blocks.iter().map(to_complex).collect();
    let repr = match &state.repr {
        Repr::Pure(v) => {
            let mut out = DVector::<C64>::zeros(v.len());
            for (n, u) in cblocks.iter().enumerate() {
                let range = shell(n);
                let seg = u * v.rows(range.start, n + 1);
                out.rows_mut(range.start, n + 1).copy_from(&seg);
            }
            Repr::Pure(out)
        }
        Repr::Mixed(rho) => {
            let mut out = DMatrix::<C64>::zeros(rho.nrows(), rho.ncols());
            for (n, un) in cblocks.iter().enumerate() {
                let rn = shell(n);
                for (m, um) in cblocks.iter().enumerate() {
                    let rm = shell(m);
                    let sub = rho.view((rn.start, rm.start), (n + 1, m + 1));
                    if sub.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                        continue;
                    }
                    let img = un * sub * um.adjoint();
                    out.view_mut((rn.start, rm.start), (n + 1, m + 1))
                        .copy_from(&img);
                }
            }
            Repr::Mixed(out)
        }
    };
    TwoModeState {
        cutoff: state.cutoff,
        repr,
        discarded: state.discarded,
    }
}

/// Beam splitter of transmittance `t`.
///
/// The total-number truncation makes this exact: every shell is mapped
/// into itself and no probability leaves the represented space.
pub fn apply_beam_splitter(state: &TwoModeState, t: f64) -> Result<TwoModeState> {
    let blocks = beam_splitter_blocks(state.basis().n_max(), t)?;
    Ok(apply_blocks(state, &blocks, false))
}

/// Inverse of [`apply_beam_splitter`] for the same `t`.
pub fn apply_beam_splitter_adjoint(state: &TwoModeState, t: f64) -> Result<TwoModeState> {
    let blocks = beam_splitter_blocks(state.basis().n_max(), t)?;
    Ok(apply_blocks(state, &blocks, true))
}

/// Multiplies each basis component by `exp(i g(n_A, n_B) phi)`.
pub fn apply_phase(state: &TwoModeState, gen: Generator, phi: f64) -> TwoModeState {
    let phases: Vec<C64> = gen
        .diagonal(state.basis())
        .into_iter()
        .map(|g| C64::from_polar(1.0, g * phi))
        .collect();
    let repr = match &state.repr {
        Repr::Pure(v) => Repr::Pure(DVector::from_fn(v.len(), |i, _| v[i] * phases[i])),
        Repr::Mixed(m) => Repr::Mixed(DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            m[(i, j)] * phases[i] * phases[j].conj()
        })),
    };
    TwoModeState {
        cutoff: state.cutoff,
        repr,
        discarded: state.discarded,
    }
}

/// Working dimension used to build the squeeze matrix for inputs below `n_in`.
///
/// The generator is truncated at this size, so it is padded well past the
/// largest input level: squeezing stretches the photon-number scale by up to
/// `exp(2|r|)`.
fn squeeze_work_dim(n_in: usize, r: f64) -> usize {
    let stretch = (2.0 * r.abs()).exp();
    let q = r.tanh().powi(2);
    // squeezed-vacuum populations fall off like q^k per photon pair
    let decay = if q > 0.0 {
        2.0 * (64.0 / -q.ln()).ceil()
    } else {
        0.0
    };
    let pad = ((n_in as f64) * (stretch - 1.0) + decay).ceil() as usize;
    n_in + pad.max(40)
}

/// Single-mode squeeze `exp(r/2 (a^2 - a^dag^2))`, columns `0..n_in`, rows `0..work`.
///
/// Built by exponentiating the quadratic generator separately on the even
/// and odd parity sectors of a padded space. Returns the matrix together
/// with its orthogonality defect `max |U^T U - I|` on the padded space.
pub fn squeeze_matrix(r: f64, n_in: usize) -> (DMatrix<f64>, f64) {
    let work = squeeze_work_dim(n_in, r);
    let mut full = DMatrix::<f64>::zeros(work, work);
    let mut defect: f64 = 0.0;
    for parity in 0..2 {
        let levels: Vec<usize> = (parity..work).step_by(2).collect();
        let d = levels.len();
        let mut gen = DMatrix::<f64>::zeros(d, d);
        for k in 0..d.saturating_sub(1) {
            let n = levels[k] as f64;
            let c = 0.5 * r * ((n + 1.0) * (n + 2.0)).sqrt();
            gen[(k, k + 1)] = c;
            gen[(k + 1, k)] = -c;
        }
        let u = gen.exp();
        let gram = u.transpose() * &u - DMatrix::<f64>::identity(d, d);
        defect = defect.max(gram.amax());
        for (i, &li) in levels.iter().enumerate() {
            for (j, &lj) in levels.iter().enumerate() {
                full[(li, lj)] = u[(i, j)];
            }
        }
    }
    (full.columns(0, n_in).into_owned(), defect)
}

/// Applies a squeeze to the given mode of a pure amplitude vector.
///
/// Returns the new amplitudes and the probability mass pushed past the
/// truncation.
fn squeeze_pure(
    amps: &DVector<C64>,
    basis: TwoModeBasis,
    u: &DMatrix<f64>,
    mode: Mode,
) -> (DVector<C64>, f64) {
    let n_max = basis.n_max();
    let work = u.nrows();
    let mut out = DVector::<C64>::zeros(amps.len());
    let mut lost = 0.0;
    for other in 0..=n_max {
        let len = n_max - other + 1;
        let idx = |k: usize| match mode {
            Mode::A => basis.index(k, other).unwrap(),
            Mode::B => basis.index(other, k).unwrap(),
        };
        let input: Vec<C64> = (0..len.min(u.ncols())).map(|k| amps[idx(k)]).collect();
        if input.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            continue;
        }
        for row in 0..work {
            let mut acc = C64::new(0.0, 0.0);
            for (k, c) in input.iter().enumerate() {
                acc += c * u[(row, k)];
            }
            if row < len {
                out[idx(row)] = acc;
            } else {
                lost += acc.norm_sqr();
            }
        }
    }
    (out, lost)
}

/// Single-mode squeeze with parameter `r` on `mode`.
///
/// Fails with [`Error::CutoffOverflow`] if the squeezed state cannot be
/// certified under the cutoff, and with [`Error::InvalidParameter`] if the
/// constructed matrix is not orthogonal to within [`UNITARITY_TOL`].
pub fn apply_single_mode_squeeze(state: &TwoModeState, r: f64, mode: Mode) -> Result<TwoModeState> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeeze parameter {r}")));
    }
    if r == 0.0 {
        return Ok(state.clone());
    }
    let basis = state.basis();
    let top = basis
        .labels()
        .zip(state.populations())
        .filter(|(_, p)| *p > 0.0)
        .map(|((a, b), _)| if mode == Mode::A { a } else { b })
        .max()
        .unwrap_or(0);
    let (u, defect) = squeeze_matrix(r, top + 1);
    if defect > UNITARITY_TOL {
        return Err(Error::InvalidParameter(format!(
            "squeeze matrix unitarity defect {defect:.3e}"
        )));
    }
    let (repr, lost) = match &state.repr {
        Repr::Pure(v) => {
            let (out, lost) = squeeze_pure(v, basis, &u, mode);
            (Repr::Pure(out), lost)
        }
        Repr::Mixed(rho) => {
            // U rho U^dag: squeeze every column, then every row of the result.
            let dim = rho.nrows();
            let mut half = DMatrix::<C64>::zeros(dim, dim);
            for j in 0..dim {
                let (col, _) = squeeze_pure(&rho.column(j).into_owned(), basis, &u, mode);
                half.set_column(j, &col);
            }
            let mut out = DMatrix::<C64>::zeros(dim, dim);
            for i in 0..dim {
                let row = half.row(i).transpose().map(|c| c.conj());
                let (img, _) = squeeze_pure(&row, basis, &u, mode);
                out.set_row(i, &img.map(|c| c.conj()).transpose());
            }
            let kept = out.trace().re;
            let before = rho.trace().re;
            (Repr::Mixed(out), (before - kept).max(0.0))
        }
    };
    let mut next = TwoModeState {
        cutoff: state.cutoff,
        repr,
        discarded: state.discarded + lost,
    };
    next.renormalize();
    next.certify()?;
    Ok(next)
}

/// Convenience used by tests and builders: vacuum cutoff check for a squeezed mode.
pub(crate) fn squeezed_vacuum(cutoff: FockCutoff, r: f64) -> Result<TwoModeState> {
    apply_single_mode_squeeze(&TwoModeState::vacuum(cutoff), r, Mode::A)
}
