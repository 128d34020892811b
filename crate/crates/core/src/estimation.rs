//! Monte Carlo check that maximum-likelihood estimation with the two-outcome
//! detection scheme reaches its classical Cramér–Rao bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gaussian::{cfi_two_outcome, p00_chain};

/// Default cap on `m * reps`.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Outcome probabilities closer than this to 0 or 1 are rejected.
pub const PROBABILITY_EPS: f64 = 1e-12;

const SOLVER_TOL: f64 = 1e-13;
const BRACKET_SCAN_STEPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    /// Detection events per estimate.
    pub m: u64,
    /// Independent estimates.
    pub reps: u64,
    pub seed: u64,
    pub true_phi: f64,
    pub r: f64,
    pub t: f64,
}

impl Trial {
    pub fn validate(&self, budget: u64) -> Result<()> {
        if self.m == 0 || self.reps == 0 {
            return Err(Error::InvalidParameter(
                "m and reps must be at least 1".into(),
            ));
        }
        match self.m.checked_mul(self.reps) {
            Some(n) if n <= budget => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "m * reps exceeds the sampling budget {budget}"
                )))
            }
        }
        if !(0.0..=1.0).contains(&self.t) || !self.r.is_finite() || !self.true_phi.is_finite() {
            return Err(Error::InvalidParameter(
                "need T in [0, 1] and finite r, phi".into(),
            ));
        }
        Ok(())
    }

    fn detection_probability(&self) -> Result<f64> {
        let p = p00_chain(self.r, self.t, self.true_phi)?;
        if p <= PROBABILITY_EPS || p >= 1.0 - PROBABILITY_EPS {
            return Err(Error::DegenerateProbability { p });
        }
        Ok(p)
    }
}

/// Per-repetition generator: the trial seed selects the key, the repetition
/// index selects the ChaCha stream.
fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn draw(p00: f64, m: u64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    (0..m).map(|_| rng.random::<f64>() < p00).collect()
}

/// `m` outcomes of the first repetition; `true` is the double-vacuum event.
pub fn sample_outcomes(trial: &Trial) -> Result<Vec<bool>> {
    trial.validate(DEFAULT_BUDGET)?;
    let p = trial.detection_probability()?;
    Ok(draw(p, trial.m, &mut rep_rng(trial.seed, 0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub phi: f64,
    /// Every outcome was double vacuum; `phi` is the bracket end nearest zero.
    pub boundary: bool,
}

/// First stretch `[0, phi]` on which `P00` decreases monotonically.
pub fn monotone_bracket(r: f64, t: f64) -> Result<(f64, f64)> {
    let step = std::f64::consts::PI / BRACKET_SCAN_STEPS as f64;
    let mut prev = p00_chain(r, t, 0.0)?;
    for i in 1..=BRACKET_SCAN_STEPS {
        let p = p00_chain(r, t, i as f64 * step)?;
        if p >= prev {
            return Ok((0.0, (i - 1) as f64 * step));
        }
        prev = p;
    }
    Ok((0.0, std::f64::consts::PI))
}

/// Inverts `phi -> P00(phi)` on a bracket where it is strictly monotone.
pub fn mle_from_frequency(freq: f64, r: f64, t: f64, bracket: (f64, f64)) -> Result<MleEstimate> {
    let (lo, hi) = bracket;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidParameter(format!(
            "empty bracket [{lo}, {hi}]"
        )));
    }
    if freq >= 1.0 {
        let phi = if lo.abs() <= hi.abs() { lo } else { hi };
        return Ok(MleEstimate {
            phi,
            boundary: true,
        });
    }
    let (p_lo, p_hi) = (p00_chain(r, t, lo)?, p00_chain(r, t, hi)?);
    let (p_min, p_max) = (p_lo.min(p_hi), p_lo.max(p_hi));
    if freq < p_min || freq > p_max {
        return Err(Error::NoRoot {
            freq,
            lo: p_min,
            hi: p_max,
        });
    }
    let decreasing = p_lo > p_hi;
    let (mut a, mut b) = (lo, hi);
    while b - a > SOLVER_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let above = p00_chain(r, t, mid)? > freq;
        if above == decreasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(MleEstimate {
        phi: 0.5 * (a + b),
        boundary: false,
    })
}

/// Maximum-likelihood phase from binary outcomes: the binomial likelihood
/// is maximized where `P00(phi) = k / m`.
pub fn mle_phi(outcomes: &[bool], r: f64, t: f64, bracket: (f64, f64)) -> Result<MleEstimate> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter("no outcomes".into()));
    }
    let k = outcomes.iter().filter(|o| **o).count();
    mle_from_frequency(k as f64 / outcomes.len() as f64, r, t, bracket)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub phi_hat_mean: f64,
    /// Unbiased sample variance of the estimates.
    pub phi_hat_var: f64,
    /// Fisher information per event at the true phase.
    pub fisher: f64,
    /// `1 / (m F)`.
    pub crb: f64,
    pub ratio: f64,
    /// Jackknife standard error of `phi_hat_var`.
    pub stderr_of_var: f64,
    pub ratio_stderr: f64,
    pub boundary_hits: u64,
}

pub fn run_campaign(trial: &Trial) -> Result<EstimateReport> {
    run_campaign_with(trial, Execution::default())
}

pub fn run_campaign_with(trial: &Trial, exec: Execution) -> Result<EstimateReport> {
    trial.validate(DEFAULT_BUDGET)?;
    if trial.reps < 3 {
        return Err(Error::InsufficientReps(format!(
            "need at least 3 repetitions for a variance and its jackknife error, got {}",
            trial.reps
        )));
    }
    let p = trial.detection_probability()?;
    let bracket = monotone_bracket(trial.r, trial.t)?;
    let estimates = exec.map_range(trial.reps as usize, |rep| {
        let outcomes = draw(p, trial.m, &mut rep_rng(trial.seed, rep as u64));
        mle_phi(&outcomes, trial.r, trial.t, bracket)
    });
    let estimates = estimates.into_iter().collect::<Result<Vec<_>>>()?;
    let boundary_hits = estimates.iter().filter(|e| e.boundary).count() as u64;
    let phis: Vec<f64> = estimates.iter().map(|e| e.phi).collect();

    let n = phis.len() as f64;
    let mean = phis.iter().sum::<f64>() / n;
    let centred: Vec<f64> = phis.iter().map(|x| x - mean).collect();
    let s1: f64 = centred.iter().sum();
    let s2: f64 = centred.iter().map(|x| x * x).sum();
    let var = (s2 - s1 * s1 / n) / (n - 1.0);

    // leave-one-out variances
    let loo: Vec<f64> = centred
        .iter()
        .map(|x| {
            let (a, b) = (s1 - x, s2 - x * x);
            (b - a * a / (n - 1.0)) / (n - 2.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / n;
    let stderr_of_var =
        ((n - 1.0) / n * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>()).sqrt();

    let fisher = cfi_two_outcome(trial.r, trial.t, trial.true_phi)?.value;
    let crb = 1.0 / (trial.m as f64 * fisher);
    Ok(EstimateReport {
        phi_hat_mean: mean,
        phi_hat_var: var,
        fisher,
        crb,
        ratio: var / crb,
        stderr_of_var,
        ratio_stderr: stderr_of_var / crb,
        boundary_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial() -> Trial {
        Trial {
            m: 10_000,
            reps: 20,
            seed: 7,
            true_phi: 0.15,
            r: 1f64.asinh(),
            t: 0.5,
        }
    }

    #[test]
    fn degenerate_probability_at_zero_phase() {
        let t = Trial {
            true_phi: 0.0,
            ..trial()
        };
        assert!(matches!(
            sample_outcomes(&t),
            Err(Error::DegenerateProbability { .. })
        ));
    }

    #[test]
    fn sampling_is_reproducible_and_unbiased() {
        let t = trial();
        assert_eq!(sample_outcomes(&t).unwrap(), sample_outcomes(&t).unwrap());
        // find a phase with P00 close to 0.7 and check binomial concentration
        let r = 1f64.asinh();
        let (_, hi) = monotone_bracket(r, 0.5).unwrap();
        let phi = mle_from_frequency(0.7, r, 0.5, (0.0, hi)).unwrap().phi;
        let t = Trial {
            m: 100_000,
            true_phi: phi,
            ..trial()
        };
        let p = p00_chain(r, 0.5, phi).unwrap();
        let k = sample_outcomes(&t).unwrap().iter().filter(|o| **o).count() as f64;
        let sigma = (t.m as f64 * p * (1.0 - p)).sqrt();
        assert!((k - t.m as f64 * p).abs() < 5.0 * sigma);
    }

    #[test]
    fn exact_frequency_inverts() {
        let r = 0.6;
        let p = p00_chain(r, 0.4, 0.15).unwrap();
        let bracket = monotone_bracket(r, 0.4).unwrap();
        let est = mle_from_frequency(p, r, 0.4, bracket).unwrap();
        assert!((est.phi - 0.15).abs() < 1e-10);
        assert!(!est.boundary);
    }

    #[test]
    fn all_vacuum_hits_boundary() {
        let est = mle_phi(&[true; 50], 0.6, 0.4, (0.05, 1.0)).unwrap();
        assert_eq!(
            est,
            MleEstimate {
                phi: 0.05,
                boundary: true
            }
        );
        assert!(matches!(
            mle_from_frequency(0.999_999, 0.6, 0.4, (0.5, 1.0)),
            Err(Error::NoRoot { .. })
        ));
    }

    #[test]
    fn campaign_needs_repetitions_and_is_deterministic() {
        let one = Trial { reps: 1, ..trial() };
        assert!(matches!(
            run_campaign(&one),
            Err(Error::InsufficientReps(_))
        ));
        let a = run_campaign(&trial()).unwrap();
        let b = run_campaign_with(&trial(), Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_enforced() {
        let t = Trial {
            m: 1 << 40,
            reps: 1 << 30,
            ..trial()
        };
        assert!(t.validate(DEFAULT_BUDGET).is_err());
    }
}
