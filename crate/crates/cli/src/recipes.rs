//! Evaluation of each command over its grid.

use mzi_core::estimation::{run_campaign_with, Trial};
use mzi_core::fisher::{
    crb_phi_d, qfi_g1_general_t, qfi_phase_averaged, qfim_mixed, qfim_two_arm, Degeneracy, Qfim,
};
use mzi_core::fock::apply_beam_splitter;
use mzi_core::gaussian::{cfi_limit, cfi_two_outcome};
use mzi_core::probe::{build_state, photon_stats};
use mzi_core::{Execution, Generator, ProbeSpec, TwoModeState};
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

/// One output record; see `docs/csv-columns.md`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub recipe: &'static str,
    pub probe: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub r: Option<f64>,
    pub phi: Option<f64>,
    pub value: f64,
    pub bound: Option<f64>,
    pub snl: Option<f64>,
    pub beats_snl: Option<bool>,
    pub flags: String,
}

pub const COLUMNS: [&str; 10] = [
    "recipe",
    "probe",
    "T",
    "r",
    "phi",
    "value",
    "bound",
    "snl",
    "beats_snl",
    "flags",
];

const BEATS_TOL: f64 = 1e-12;

fn beats(bound: f64, snl: f64) -> bool {
    bound < snl * (1.0 - BEATS_TOL)
}

fn inverse(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

/// One `(T, r)` cell of the grid; every recipe emits its rows per cell.
#[derive(Debug, Clone, Copy)]
struct Cell {
    t: f64,
    r: Option<f64>,
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    run_with(cfg, Execution::default())
}

/// Evaluates every grid cell under `exec` and returns the rows in grid order
/// (`T` outermost, then `r`, then `phi`).
pub fn run_with(cfg: &RunConfig, exec: Execution) -> Result<Vec<Row>, CliError> {
    let rs: Vec<Option<f64>> = if cfg.grid.r.is_empty() {
        vec![None]
    } else {
        cfg.grid.r.iter().copied().map(Some).collect()
    };
    let cells: Vec<Cell> = cfg
        .grid
        .t
        .iter()
        .flat_map(|&t| rs.iter().map(move |&r| Cell { t, r }))
        .collect();
    // campaigns already fan out over repetitions
    let exec = if cfg.recipe() == Command::Campaign {
        Execution::Sequential
    } else {
        exec
    };
    let mut rows = Vec::new();
    for part in exec.map(&cells, |cell| eval_cell(cfg, *cell)) {
        rows.extend(part?);
    }
    Ok(rows)
}

fn cell_probe(cfg: &RunConfig, cell: Cell) -> ProbeSpec {
    match cell.r {
        Some(r) => ProbeSpec::SqueezedVacuum { r },
        None => cfg.probe.clone(),
    }
}

fn squeeze_of(spec: &ProbeSpec) -> Result<f64, CliError> {
    match spec {
        ProbeSpec::SqueezedVacuum { r } => Ok(*r),
        _ => Err(CliError::config(
            "the detection scheme needs a squeezed_vacuum probe",
        )),
    }
}

fn eval_cell(cfg: &RunConfig, cell: Cell) -> Result<Vec<Row>, CliError> {
    let spec = cell_probe(cfg, cell);
    let row = |recipe: &'static str, phi: Option<f64>, value: f64| Row {
        recipe,
        probe: spec.to_string(),
        t: cell.t,
        r: cell.r,
        phi,
        value,
        bound: None,
        snl: None,
        beats_snl: None,
        flags: String::new(),
    };
    let t = cell.t;
    match cfg.recipe() {
        Command::Qfi => {
            let (value, fock) = single_qfi(&spec, t, cfg.generator, cfg.tail_tol)?;
            let (bound, snl) = (inverse(value), inverse(photon_stats(&spec)?.nbar));
            let recipe = match cfg.generator {
                Generator::OneArm => "qfi-g1",
                Generator::Difference => "qfi-gd",
                Generator::Sum => "qfi-gs",
            };
            Ok(vec![Row {
                bound: Some(bound),
                snl: Some(snl),
                beats_snl: Some(beats(bound, snl)),
                flags: if fock {
                    "fock-engine".into()
                } else {
                    String::new()
                },
                ..row(recipe, None, value)
            }])
        }
        Command::Qfim => {
            let (q, fock) = two_arm_qfim(&spec, t, cfg.tail_tol)?;
            let flags = if fock { "fock-engine" } else { "" };
            Ok([
                ("qfim-dd", q.f_dd),
                ("qfim-ss", q.f_ss),
                ("qfim-sd", q.f_sd),
            ]
            .into_iter()
            .map(|(recipe, v)| Row {
                flags: flags.into(),
                ..row(recipe, None, v)
            })
            .collect())
        }
        Command::Crb => {
            let (q, fock) = two_arm_qfim(&spec, t, cfg.tail_tol)?;
            let rep = crb_phi_d(&q, photon_stats(&spec)?.nbar, t)?;
            let mut flags = Vec::new();
            match rep.degeneracy {
                Degeneracy::None => {}
                Degeneracy::SingleParameter => flags.push("single-parameter"),
                Degeneracy::Singular => flags.push("singular"),
            }
            if beats(rep.single_parameter_bound, rep.snl) {
                flags.push("loose-beats-snl");
            }
            if fock {
                flags.push("fock-engine");
            }
            Ok(vec![Row {
                bound: Some(rep.bound_phi_d),
                snl: Some(rep.snl),
                beats_snl: Some(rep.beats_snl),
                flags: flags.join(";"),
                ..row("two-arm-crb", None, rep.single_parameter_bound)
            }])
        }
        Command::PhaseAveraged => {
            let value = qfi_phase_averaged(&spec, t)?;
            let (bound, snl) = (inverse(value), inverse(photon_stats(&spec)?.nbar));
            Ok(vec![Row {
                bound: Some(bound),
                snl: Some(snl),
                beats_snl: Some(beats(bound, snl)),
                ..row("phase-averaged-qfi", None, value)
            }])
        }
        Command::GaussianCfi => {
            let r = squeeze_of(&spec)?;
            let n_tot = 2.0 * r.sinh().powi(2);
            let snl = inverse(n_tot);
            let limit = cfi_limit(n_tot, t);
            let mut rows = vec![Row {
                bound: Some(inverse(limit)),
                snl: Some(snl),
                beats_snl: Some(beats(inverse(limit), snl)),
                ..row("two-outcome-cfi-limit", None, limit)
            }];
            for &phi in &cfg.grid.phi {
                let est = cfi_two_outcome(r, t, phi)?;
                let bound = inverse(est.value);
                rows.push(Row {
                    bound: Some(bound),
                    snl: Some(snl),
                    beats_snl: Some(beats(bound, snl)),
                    flags: if est.limit_path {
                        "limit-path".into()
                    } else {
                        String::new()
                    },
                    ..row("two-outcome-cfi", Some(phi), est.value)
                });
            }
            Ok(rows)
        }
        Command::Campaign => {
            let r = squeeze_of(&spec)?;
            let n_tot = 2.0 * r.sinh().powi(2);
            let snl = inverse(cfg.m as f64 * n_tot);
            let mut rows = Vec::new();
            for &phi in &cfg.grid.phi {
                let trial = Trial {
                    m: cfg.m,
                    reps: cfg.reps,
                    seed: cfg.seed,
                    true_phi: phi,
                    r,
                    t,
                };
                let rep = run_campaign_with(&trial, Execution::default())?;
                rows.push(Row {
                    bound: Some(rep.crb),
                    snl: Some(snl),
                    beats_snl: Some(beats(rep.phi_hat_var, snl)),
                    flags: format!(
                        "ratio={};ratio_stderr={};mean={};boundary_hits={}",
                        rep.ratio, rep.ratio_stderr, rep.phi_hat_mean, rep.boundary_hits
                    ),
                    ..row("mle-campaign", Some(phi), rep.phi_hat_var)
                });
            }
            Ok(rows)
        }
        Command::Sweep => Err(CliError::config("a sweep cannot nest another sweep")),
    }
}

fn fock_state(spec: &ProbeSpec, t: f64, tail_tol: f64) -> Result<TwoModeState, CliError> {
    let input = build_state(spec, spec.auto_cutoff(tail_tol)?)?;
    Ok(apply_beam_splitter(&input, t)?)
}

/// Closed form for pure probes, the Fock engine for mixed ones.
fn two_arm_qfim(spec: &ProbeSpec, t: f64, tail_tol: f64) -> Result<(Qfim, bool), CliError> {
    if spec.is_pure() {
        return Ok((qfim_two_arm(spec, t)?, false));
    }
    let state = fock_state(spec, t, tail_tol)?;
    let m = qfim_mixed(&state, &[Generator::Difference, Generator::Sum])?;
    Ok((Qfim::from_matrix(&m)?, true))
}

fn single_qfi(
    spec: &ProbeSpec,
    t: f64,
    gen: Generator,
    tail_tol: f64,
) -> Result<(f64, bool), CliError> {
    if spec.is_pure() {
        let v = match gen {
            Generator::OneArm => qfi_g1_general_t(spec, t)?,
            Generator::Difference => qfim_two_arm(spec, t)?.f_dd,
            Generator::Sum => qfim_two_arm(spec, t)?.f_ss,
        };
        return Ok((v, false));
    }
    let state = fock_state(spec, t, tail_tol)?;
    Ok((qfim_mixed(&state, &[gen])?[(0, 0)], true))
}
