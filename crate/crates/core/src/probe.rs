//! Mode-A input states and their photon statistics.
//!
//! Mode B is always the vacuum. [`ProbeSpec`] is the declarative,
//! serializable description; [`build_state`] realizes it on a truncated
//! Fock space and [`photon_stats`] gives the closed-form statistics used by
//! the Fisher-information formulas.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockCutoff, TwoModeState};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, C64};

/// Tolerance on Hermiticity, trace and positivity of explicit density matrices.
pub const EXPLICIT_TOL: f64 = 1e-10;

/// Remainder left off when tabulating an unbounded number distribution.
pub const DISTRIBUTION_TAIL: f64 = 1e-16;

/// Number-basis density matrix `c_nm`, split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitDensity {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl ExplicitDensity {
    pub fn diagonal(p: &[f64]) -> Self {
        let d = p.len();
        let re = (0..d)
            .map(|i| (0..d).map(|j| if i == j { p[i] } else { 0.0 }).collect())
            .collect();
        Self { re, im: Vec::new() }
    }

    pub fn from_matrix(c: &DMatrix<C64>) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..c.nrows())
                .map(|i| (0..c.ncols()).map(|j| f(&c[(i, j)])).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let im = rows(|z| z.im);
        let im = if im.iter().flatten().all(|x| *x == 0.0) {
            Vec::new()
        } else {
            im
        };
        Self {
            re: rows(|z| z.re),
            im,
        }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        let d = self.re.len();
        if d == 0 || self.re.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidProbe(
                "explicit matrix must be square and non-empty".into(),
            ));
        }
        if !self.im.is_empty() && (self.im.len() != d || self.im.iter().any(|row| row.len() != d)) {
            return Err(Error::InvalidProbe(
                "imaginary part must match the real part's shape".into(),
            ));
        }
        Ok(DMatrix::from_fn(d, d, |i, j| {
            let im = if self.im.is_empty() {
                0.0
            } else {
                self.im[i][j]
            };
            C64::new(self.re[i][j], im)
        }))
    }

    fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.re[n][n]).collect()
    }
}

/// Mode-A input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeSpec {
    Fock {
        n: usize,
    },
    Coherent {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    SqueezedVacuum {
        r: f64,
    },
    Thermal {
        nbar: f64,
    },
    Explicit(ExplicitDensity),
}

impl ProbeSpec {
    pub fn coherent(alpha: C64) -> Self {
        ProbeSpec::Coherent {
            re: alpha.re,
            im: alpha.im,
        }
    }

    /// Squeezed vacuum with mean photon number `nbar = sinh^2 r`.
    pub fn squeezed_with_nbar(nbar: f64) -> Self {
        ProbeSpec::SqueezedVacuum {
            r: nbar.sqrt().asinh(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProbeSpec::Fock { .. } => Ok(()),
            ProbeSpec::Coherent { re, im } if !(re.is_finite() && im.is_finite()) => Err(
                Error::InvalidProbe("coherent amplitude must be finite".into()),
            ),
            ProbeSpec::SqueezedVacuum { r } if !r.is_finite() => Err(Error::InvalidProbe(
                "squeeze parameter must be finite".into(),
            )),
            ProbeSpec::Thermal { nbar } if !(nbar.is_finite() && *nbar >= 0.0) => Err(
                Error::InvalidProbe(format!("thermal nbar must be >= 0, got {nbar}")),
            ),
            ProbeSpec::Explicit(c) => {
                let m = c.matrix()?;
                if hermiticity_defect(&m) > EXPLICIT_TOL {
                    return Err(Error::InvalidProbe(
                        "explicit matrix is not Hermitian".into(),
                    ));
                }
                let trace = m.trace().re;
                if (trace - 1.0).abs() > EXPLICIT_TOL {
                    return Err(Error::InvalidProbe(format!(
                        "explicit matrix has trace {trace}"
                    )));
                }
                let min_ev = hermitian_eigenvalues(&m)
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                if min_ev < -EXPLICIT_TOL {
                    return Err(Error::InvalidProbe(format!(
                        "explicit matrix has negative eigenvalue {min_ev}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the input is a pure state (explicit matrices: purity 1 within tolerance).
    pub fn is_pure(&self) -> bool {
        match self {
            ProbeSpec::Fock { .. }
            | ProbeSpec::Coherent { .. }
            | ProbeSpec::SqueezedVacuum { .. } => true,
            ProbeSpec::Thermal { nbar } => *nbar == 0.0,
            ProbeSpec::Explicit(c) => c
                .matrix()
                .map(|m| ((&m * &m).trace().re - 1.0).abs() <= EXPLICIT_TOL)
                .unwrap_or(false),
        }
    }

    /// Number distribution `p_n`, tabulated until the untabulated remainder is below `tail`.
    pub fn number_distribution(&self, tail: f64) -> Vec<f64> {
        match self {
            ProbeSpec::Fock { n } => {
                let mut p = vec![0.0; n + 1];
                p[*n] = 1.0;
                p
            }
            ProbeSpec::Coherent { re, im } => {
                let lambda = re * re + im * im;
                if lambda == 0.0 {
                    return vec![1.0];
                }
                let mut p = vec![(-lambda).exp()];
                let mut log_p = -lambda;
                loop {
                    let n = p.len() as f64;
                    log_p += lambda.ln() - n.ln();
                    p.push(log_p.exp());
                    // past the mode the ratio p_{n+1}/p_n = lambda/(n+1) only shrinks
                    let ratio = lambda / (n + 1.0);
                    if ratio < 1.0 && p[p.len() - 1] * ratio / (1.0 - ratio) < tail {
                        return p;
                    }
                }
            }
            ProbeSpec::SqueezedVacuum { r } => {
                let q = r.tanh().powi(2);
                let mut p = vec![1.0 / r.cosh()];
                if q == 0.0 {
                    return p;
                }
                let mut even = p[0];
                let mut k = 0.0;
                loop {
                    k += 1.0;
                    even *= (2.0 * k - 1.0) / (2.0 * k) * q;
                    p.push(0.0);
                    p.push(even);
                    // every step ratio is below q
                    if even * q / (1.0 - q) < tail {
                        return p;
                    }
                }
            }
            ProbeSpec::Thermal { nbar } => {
                let q = nbar / (nbar + 1.0);
                let mut p = vec![1.0 / (nbar + 1.0)];
                if q == 0.0 {
                    return p;
                }
                loop {
                    let next = p[p.len() - 1] * q;
                    p.push(next);
                    if next * q / (1.0 - q) < tail {
                        return p;
                    }
                }
            }
            ProbeSpec::Explicit(c) => c.populations(),
        }
    }

    /// Smallest cutoff whose tail (mass at total photon number `>= n_max`) is within `tail_tol`.
    pub fn auto_cutoff(&self, tail_tol: f64) -> Result<FockCutoff> {
        let slack = tail_tol * 1e-3;
        let p = self.number_distribution(slack);
        let mut suffix = slack;
        let mut n_max = p.len();
        for n in (0..p.len()).rev() {
            if suffix + p[n] > tail_tol {
                break;
            }
            suffix += p[n];
            n_max = n;
        }
        FockCutoff::new(n_max.max(1), tail_tol)
    }

    /// Short `kind:key=value` form, the inverse of [`FromStr`] for the shorthand variants.
    pub fn shorthand(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ProbeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeSpec::Fock { n } => write!(f, "fock:n={n}"),
            ProbeSpec::Coherent { re, im } if *im == 0.0 => write!(f, "coherent:alpha={re}"),
            ProbeSpec::Coherent { re, im } => write!(f, "coherent:re={re},im={im}"),
            ProbeSpec::SqueezedVacuum { r } => write!(f, "squeezed:r={r}"),
            ProbeSpec::Thermal { nbar } => write!(f, "thermal:nbar={nbar}"),
            ProbeSpec::Explicit(c) => write!(f, "explicit:dim={}", c.dim()),
        }
    }
}

impl FromStr for ProbeSpec {
    type Err = Error;

    /// Parses `fock:n=2`, `coherent:alpha=1`, `coherent:re=1,im=0.5`,
    /// `squeezed:r=0.88`, `squeezed:nbar=1`, `thermal:nbar=1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidProbe(format!("{msg} in probe '{s}'"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut fields = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| bad("non-numeric value"))?;
            fields.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied();
        let spec = match kind.trim() {
            "fock" => {
                let n = get("n").ok_or_else(|| bad("missing n"))?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(bad("n must be a non-negative integer"));
                }
                ProbeSpec::Fock { n: n as usize }
            }
            "coherent" => match (get("alpha"), get("re")) {
                (Some(a), None) => ProbeSpec::Coherent { re: a, im: 0.0 },
                (None, Some(re)) => ProbeSpec::Coherent {
                    re,
                    im: get("im").unwrap_or(0.0),
                },
                _ => return Err(bad("give either alpha or re[,im]")),
            },
            "squeezed" | "squeezed_vacuum" => match (get("r"), get("nbar")) {
                (Some(r), None) => ProbeSpec::SqueezedVacuum { r },
                (None, Some(nbar)) if nbar >= 0.0 => ProbeSpec::squeezed_with_nbar(nbar),
                _ => return Err(bad("give either r or a non-negative nbar")),
            },
            "thermal" => ProbeSpec::Thermal {
                nbar: get("nbar").ok_or_else(|| bad("missing nbar"))?,
            },
            _ => return Err(bad("unknown kind")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Photon-number statistics of a mode-A input.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStats {
    pub nbar: f64,
    pub var: f64,
    pub pn: Vec<f64>,
}

/// Mean, variance and number distribution.
///
/// Closed forms: Fock `V = 0`; coherent `nbar = |alpha|^2`, `V = nbar`;
/// squeezed vacuum `nbar = sinh^2 r`, `V = 2 nbar (nbar + 1)`; thermal
/// `V = nbar (nbar + 1)`. Explicit matrices use their diagonal.
pub fn photon_stats(spec: &ProbeSpec) -> Result<PhotonStats> {
    spec.validate()?;
    let pn = spec.number_distribution(DISTRIBUTION_TAIL);
    let (nbar, var) = match spec {
        ProbeSpec::Fock { n } => (*n as f64, 0.0),
        ProbeSpec::Coherent { re, im } => {
            let l = re * re + im * im;
            (l, l)
        }
        ProbeSpec::SqueezedVacuum { r } => {
            let n = r.sinh().powi(2);
            (n, 2.0 * n * (n + 1.0))
        }
        ProbeSpec::Thermal { nbar } => (*nbar, nbar * (nbar + 1.0)),
        ProbeSpec::Explicit(_) => moments(&pn),
    };
    Ok(PhotonStats { nbar, var, pn })
}

/// Mean and variance of a number distribution.
pub fn moments(pn: &[f64]) -> (f64, f64) {
    let (m1, m2) = pn.iter().enumerate().fold((0.0, 0.0), |(a, b), (n, p)| {
        let n = n as f64;
        (a + n * p, b + n * n * p)
    });
    (m1, m2 - m1 * m1)
}

/// Randomizes the common phase: keeps `p_n = c_nn` and drops all coherences.
///
/// Number-diagonal inputs (Fock, thermal) are returned unchanged; everything
/// else becomes an explicit diagonal matrix.
pub fn phase_average(spec: &ProbeSpec) -> Result<ProbeSpec> {
    spec.validate()?;
    Ok(match spec {
        ProbeSpec::Fock { .. } | ProbeSpec::Thermal { .. } => spec.clone(),
        _ => ProbeSpec::Explicit(ExplicitDensity::diagonal(
            &spec.number_distribution(DISTRIBUTION_TAIL),
        )),
    })
}

/// Realizes `rho_in (x) |0><0|` on the given cutoff.
pub fn build_state(spec: &ProbeSpec, cutoff: FockCutoff) -> Result<TwoModeState> {
    spec.validate()?;
    let n_max = cutoff.n_max();
    let basis = cutoff.basis();
    let a_index = |n: usize| basis.index(n, 0).expect("mode-A level within cutoff");
    let mut state = match spec {
        ProbeSpec::Fock { n } => {
            let s = TwoModeState::number(cutoff, *n, 0)?;
            s.certify()?;
            return Ok(s);
        }
        ProbeSpec::SqueezedVacuum { r } => return fock::squeezed_vacuum(cutoff, *r),
        ProbeSpec::Coherent { re, im } => {
            let alpha = C64::new(*re, *im);
            let mut amps = DVector::<C64>::zeros(basis.dim());
            let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
            let mut kept = 0.0;
            for n in 0..=n_max {
                if n > 0 {
                    c = c * alpha / (n as f64).sqrt();
                }
                amps[a_index(n)] = c;
                kept += c.norm_sqr();
            }
            let tail = (1.0 - kept).max(0.0);
            let mut s = TwoModeState::from_amplitudes(cutoff, amps / C64::new(kept.sqrt(), 0.0))?;
            s.discarded = tail;
            s
        }
        ProbeSpec::Thermal { nbar } => {
            let q = nbar / (nbar + 1.0);
            let mut rho = DMatrix::<C64>::zeros(basis.dim(), basis.dim());
            for n in 0..=n_max {
                rho[(a_index(n), a_index(n))] = C64::new(q.powi(n as i32) / (nbar + 1.0), 0.0);
            }
            let tail = q.powi(n_max as i32 + 1);
            let mut s = TwoModeState::from_raw_density(cutoff, rho);
            s.discarded = tail;
            s
        }
        ProbeSpec::Explicit(c) => {
            let m = c.matrix()?;
            let d = m.nrows().min(n_max + 1);
            let mut rho = DMatrix::<C64>::zeros(basis.dim(), basis.dim());
            for i in 0..d {
                for j in 0..d {
                    rho[(a_index(i), a_index(j))] = m[(i, j)];
                }
            }
            let tail: f64 = (d..m.nrows()).map(|n| m[(n, n)].re).sum();
            let mut s = TwoModeState::from_raw_density(cutoff, rho);
            s.discarded = tail.max(0.0);
            s
        }
    };
    state.renormalize();
    state.certify()?;
    Ok(state)
}
