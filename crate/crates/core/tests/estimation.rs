use mzi_core::estimation::{run_campaign, run_campaign_with, Trial};
use mzi_core::Execution;

fn trial(m: u64, reps: u64) -> Trial {
    Trial {
        m,
        reps,
        seed: 2024,
        true_phi: 0.2,
        r: 0.6,
        t: 0.5,
    }
}

#[test]
fn variance_approaches_bound_from_above() {
    let mut gaps = Vec::new();
    for m in [1_000, 10_000, 100_000] {
        let rep = run_campaign(&trial(m, 300)).unwrap();
        assert_eq!(rep.boundary_hits, 0);
        // no super-efficiency beyond statistical error
        assert!(rep.ratio >= 1.0 - 3.0 * rep.ratio_stderr, "m={m}: {rep:?}");
        gaps.push(((rep.ratio - 1.0).abs(), rep.ratio_stderr));
    }
    let (gap, err) = gaps[2];
    assert!(gap <= 3.0 * err, "{gaps:?}");
}

#[test]
fn campaign_is_seed_deterministic() {
    let a = run_campaign_with(&trial(2_000, 40), Execution::Parallel).unwrap();
    let b = run_campaign_with(&trial(2_000, 40), Execution::Sequential).unwrap();
    assert_eq!(a, b);
    let c = run_campaign(&Trial {
        seed: 2025,
        ..trial(2_000, 40)
    })
    .unwrap();
    assert_ne!(a.phi_hat_var, c.phi_hat_var);
}
