use nalgebra::{DMatrix, DVector, Matrix4};

use super::state::Repr;
use super::{Mode, TwoModeBasis, TwoModeState};
use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Annihilate(Mode),
    Create(Mode),
}

/// Observable on the truncated two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    /// Diagonal in the number basis, one entry per basis index.
    Diagonal(Vec<f64>),
    /// Product of ladder operators, written left to right (rightmost acts first).
    /// Components pushed past the truncation are dropped.
    Ladder(Vec<Ladder>),
    Dense(DMatrix<C64>),
}

impl Operator {
    pub fn number(mode: Mode, basis: TwoModeBasis) -> Self {
        Operator::Diagonal(
            basis
                .labels()
                .map(|(a, b)| match mode {
                    Mode::A => a as f64,
                    Mode::B => b as f64,
                })
                .collect(),
        )
    }

    pub fn number_squared(mode: Mode, basis: TwoModeBasis) -> Self {
        match Self::number(mode, basis) {
            Operator::Diagonal(d) => Operator::Diagonal(d.into_iter().map(|n| n * n).collect()),
            _ => unreachable!(),
        }
    }
}

/// Image of a basis state under a ladder product, if it stays inside the cutoff.
fn ladder_on_basis(
    ops: &[Ladder],
    basis: TwoModeBasis,
    (mut a, mut b): (usize, usize),
) -> Option<(usize, f64)> {
    let mut coeff = 1.0;
    for op in ops.iter().rev() {
        match op {
            Ladder::Annihilate(Mode::A) => {
                coeff *= (a as f64).sqrt();
                a = a.checked_sub(1)?;
            }
            Ladder::Annihilate(Mode::B) => {
                coeff *= (b as f64).sqrt();
                b = b.checked_sub(1)?;
            }
            Ladder::Create(Mode::A) => {
                a += 1;
                coeff *= (a as f64).sqrt();
            }
            Ladder::Create(Mode::B) => {
                b += 1;
                coeff *= (b as f64).sqrt();
            }
        }
    }
    basis.index(a, b).map(|i| (i, coeff))
}

fn apply_ladder(ops: &[Ladder], basis: TwoModeBasis, v: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::<C64>::zeros(v.len());
    for (j, label) in basis.labels().enumerate() {
        if let Some((i, c)) = ladder_on_basis(ops, basis, label) {
            out[i] += v[j] * c;
        }
    }
    out
}

/// `<psi|O|psi>` for pure states or `Tr[rho O]` for mixed states.
pub fn expectation(state: &TwoModeState, op: &Operator) -> Result<C64> {
    let dim = state.dim();
    let basis = state.basis();
    match op {
        Operator::Diagonal(d) if d.len() != dim => Err(Error::DimensionMismatch {
            expected: dim,
            got: d.len(),
        }),
        Operator::Dense(m) if m.nrows() != dim || m.ncols() != dim => {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: m.nrows(),
            })
        }
        Operator::Diagonal(d) => {
            let pops = state.populations();
            Ok(C64::new(pops.iter().zip(d).map(|(p, g)| p * g).sum(), 0.0))
        }
        Operator::Ladder(ops) => Ok(match &state.repr {
            Repr::Pure(v) => v.dotc(&apply_ladder(ops, basis, v)),
            Repr::Mixed(rho) => basis
                .labels()
                .enumerate()
                .filter_map(|(j, label)| {
                    ladder_on_basis(ops, basis, label).map(|(i, c)| rho[(j, i)] * c)
                })
                .sum(),
        }),
        Operator::Dense(m) => Ok(match &state.repr {
            Repr::Pure(v) => v.dotc(&(m * v)),
            Repr::Mixed(rho) => (rho * m).trace(),
        }),
    }
}

/// Probability of the double-vacuum outcome `|0><0| (x) |0><0|`.
pub fn povm_prob_double_vacuum(state: &TwoModeState) -> f64 {
    match &state.repr {
        Repr::Pure(v) => v[0].norm_sqr(),
        Repr::Mixed(rho) => rho[(0, 0)].re,
    }
}

/// Quadrature covariance matrix of a pure state in the ordering
/// `(x_A, p_A, x_B, p_B)` with `x = a + a^dag`, `p = -i (a - a^dag)`,
/// so that the vacuum maps to the identity.
pub fn quadrature_covariance(state: &TwoModeState) -> Result<(Matrix4<f64>, [f64; 4])> {
    let v = state.amplitudes().ok_or(Error::MixedState)?;
    let basis = state.basis();
    let i = C64::new(0.0, 1.0);
    let mut images: Vec<DVector<C64>> = Vec::with_capacity(4);
    for mode in [Mode::A, Mode::B] {
        let down = apply_ladder(&[Ladder::Annihilate(mode)], basis, v);
        let up = apply_ladder(&[Ladder::Create(mode)], basis, v);
        images.push(&down + &up);
        images.push((&down - &up) * (-i));
    }
    let means: [f64; 4] = std::array::from_fn(|k| v.dotc(&images[k]).re);
    let cov = Matrix4::from_fn(|r, c| images[r].dotc(&images[c]).re - means[r] * means[c]);
    Ok((cov, means))
}
