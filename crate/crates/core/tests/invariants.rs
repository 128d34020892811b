use mzi_core::fock::{
    apply_beam_splitter, apply_beam_splitter_adjoint, apply_phase, apply_single_mode_squeeze,
};
use mzi_core::linalg::C64;
use mzi_core::probe::phase_average;
use mzi_core::{FockCutoff, Generator, Mode, ProbeSpec, TwoModeState};
use nalgebra::DVector;
use proptest::prelude::*;

const N_MAX: usize = 5;

fn state_strategy() -> impl Strategy<Value = TwoModeState> {
    let dim = FockCutoff::with_n_max(N_MAX).basis().dim();
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let amps = DVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b)));
            let n = amps.norm();
            TwoModeState::from_amplitudes(FockCutoff::with_n_max(N_MAX), amps / C64::new(n, 0.0))
                .unwrap()
        })
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::Difference),
        Just(Generator::Sum),
        Just(Generator::OneArm)
    ]
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(s in state_strategy(), t in 0.0..=1.0f64, g in generator(), phi in -7.0..7.0f64) {
        let out = apply_phase(&apply_beam_splitter(&s, t).unwrap(), g, phi);
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_splitter_inverse(s in state_strategy(), t in 0.0..=1.0f64) {
        let back = apply_beam_splitter_adjoint(&apply_beam_splitter(&s, t).unwrap(), t).unwrap();
        prop_assert!(back.max_abs_diff(&s) < 1e-12);
        let mixed = s.clone().into_mixed();
        let back = apply_beam_splitter_adjoint(&apply_beam_splitter(&mixed, t).unwrap(), t).unwrap();
        prop_assert!(back.max_abs_diff(&mixed) < 1e-12);
    }

    #[test]
    fn beam_splitter_conserves_photon_number(s in state_strategy(), t in 0.0..=1.0f64) {
        let before = s.total_number_distribution();
        let after = apply_beam_splitter(&s, t).unwrap().total_number_distribution();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn squeeze_pair_is_identity_on_low_states(r in -0.3..0.3f64) {
        let cutoff = FockCutoff::new(40, 1e-10).unwrap();
        let s = TwoModeState::number(cutoff, 1, 2).unwrap();
        let there = apply_single_mode_squeeze(&s, r, Mode::B).unwrap();
        let back = apply_single_mode_squeeze(&there, -r, Mode::B).unwrap();
        prop_assert!(back.max_abs_diff(&s) < 1e-9);
    }

    #[test]
    fn phase_average_is_idempotent(re in -1.5..1.5f64, im in -1.5..1.5f64, r in 0.0..1.0f64) {
        for spec in [ProbeSpec::Coherent { re, im }, ProbeSpec::SqueezedVacuum { r }] {
            let once = phase_average(&spec).unwrap();
            prop_assert_eq!(phase_average(&once).unwrap(), once);
        }
    }
}
