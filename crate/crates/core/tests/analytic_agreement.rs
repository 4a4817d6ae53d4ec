use cdrt_core::analytic::{closed_form, op_quadrature, op_x1_mdpr};
use cdrt_core::channel::draw_channels;
use cdrt_core::montecarlo::estimate_op;
use cdrt_core::params::derive_thresholds;
use cdrt_core::rng::RandomStream;
use cdrt_core::{SchemeKind, Signal, SystemParams, TrialBranch};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

const ADAPTIVE: [SchemeKind; 3] = [SchemeKind::Dpu, SchemeKind::Dpr, SchemeKind::Mdpr];

fn random_params() -> impl Strategy<Value = SystemParams> {
    (
        (5.0..30.0f64, 5.0..30.0f64, 5.0..30.0f64, 5.0..30.0f64),
        (2.0..3.5f64, 1usize..16, 0.0..40.0f64),
        (0.05..1.0f64, 0.05..1.0f64, 0.05..1.0f64),
        (0.5..4.0f64, 0.3..1.0f64),
    )
        .prop_map(|((d_s1, d_sr, d_r1, d_r2), (alpha, n, rho), (r1, r2, r3), (g0, eta))| {
            SystemParams {
                d_s1,
                d_sr,
                d_r1,
                d_r2,
                alpha,
                n_antennas: n,
                g0,
                eta,
                rth_x1: r1,
                rth_x2: r2,
                rth_x3: r3,
                ..SystemParams::default().with_rho_db(rho)
            }
        })
}

#[test]
fn closed_forms_track_simulation() {
    for db in [15.0, 20.0] {
        for scheme in ADAPTIVE {
            let p = scheme.adapt(&SystemParams::default().with_rho_db(db));
            let mc = estimate_op(scheme, &p, 200_000, 17).unwrap();
            for s in Signal::ALL {
                let cf = closed_form(scheme, s, &p).unwrap().p;
                let e = mc[s.index()];
                let gate = (3.0 * e.std_err).max(0.02 * cf + 0.005);
                assert!((e.p_hat - cf).abs() <= gate, "{scheme} {s} at {db} dB: mc {} cf {cf}", e.p_hat);
            }
        }
    }
}

#[test]
fn dpr_x1_oracle_tracks_simulation_where_approximation_drifts() {
    let p = SystemParams {
        n_antennas: 1,
        ..SystemParams::default().with_rho_db(25.0)
    };
    let mc = estimate_op(SchemeKind::Dpr, &p, 200_000, 5).unwrap()[0];
    let q = op_quadrature(SchemeKind::Dpr, Signal::X1, &p).unwrap().p;
    assert!((mc.p_hat - q).abs() < 4.0 * mc.std_err, "{} vs {q}", mc.p_hat);
}

#[test]
fn mc_tail_at_high_power() {
    let p = SystemParams {
        n_antennas: 1,
        ..SystemParams::default().with_rho_db(60.0)
    };
    let n = 100_000;
    let est = estimate_op(SchemeKind::Dpu, &p, n, 1).unwrap();
    // closed form at 60 dB is ~1.2e-4 for x1, ~5e-5 for x3
    assert!(est[0].p_hat <= 30.0 / n as f64);
    assert!(est[2].p_hat <= 30.0 / n as f64);
}

#[test]
fn mc_estimates_converge_toward_closed_form_est() {
    let p = SystemParams::default().with_rho_db(20.0);
    let cf: f64 = Signal::ALL
        .iter()
        .map(|&s| 0.2 * (1.0 - closed_form(SchemeKind::Mdpr, s, &p).unwrap().p))
        .sum();
    let est = |n| -> f64 {
        estimate_op(SchemeKind::Mdpr, &p, n, 9)
            .unwrap()
            .iter()
            .map(|e| 0.2 * (1.0 - e.p_hat))
            .sum()
    };
    let coarse = (est(10_000) - cf).abs();
    let fine = (est(1_000_000) - cf).abs();
    assert!(fine < 2e-3, "{fine}");
    assert!(fine <= coarse + 5e-4, "{coarse} -> {fine}");
}

#[test]
fn randomized_exactness() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = random_params();
    for _ in 0..40 {
        let p = strategy.new_tree(&mut runner).unwrap().current();
        for scheme in ADAPTIVE {
            let p = scheme.adapt(&p);
            for s in Signal::ALL {
                if scheme == SchemeKind::Dpr && s == Signal::X1 {
                    continue;
                }
                let cf = closed_form(scheme, s, &p).unwrap().p;
                let q = op_quadrature(scheme, s, &p).unwrap().p;
                assert!((cf - q).abs() <= 1e-8, "{scheme} {s} {p:?}: {cf} vs {q}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_forms_are_probabilities(p in random_params()) {
        for scheme in ADAPTIVE {
            for s in Signal::ALL {
                let v = closed_form(scheme, s, &p).unwrap().p;
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        // the multi-antenna x1 sum is not clamped into range by accident
        let raw = op_x1_mdpr(&p).unwrap().p;
        prop_assert!(raw.is_finite());
    }

    #[test]
    fn dpa_never_reaches_theta(p in random_params(), seed in 0u64..1000) {
        let thr = derive_thresholds(&p).unwrap();
        for scheme in [SchemeKind::Mdpr, SchemeKind::Ben3, SchemeKind::Dpu, SchemeKind::Dpr] {
            let pp = scheme.adapt(&p);
            let ch = draw_channels(&pp, &mut RandomStream::for_trial(seed, 0)).unwrap();
            let (_, branch) = scheme.evaluate(&pp, &thr, &ch).unwrap();
            if let TrialBranch::Noma { a1 } = branch {
                prop_assert!(a1 < thr.theta && a1 > 0.0);
            }
        }
    }

    #[test]
    fn flags_are_deterministic(p in random_params(), seed in 0u64..1000, trial in 0u64..1_000_000) {
        let thr = derive_thresholds(&p).unwrap();
        for scheme in SchemeKind::ALL {
            let pp = scheme.adapt(&p);
            let a = draw_channels(&pp, &mut RandomStream::for_trial(seed, trial)).unwrap();
            let b = draw_channels(&pp, &mut RandomStream::for_trial(seed, trial)).unwrap();
            prop_assert_eq!(scheme.evaluate(&pp, &thr, &a).unwrap(), scheme.evaluate(&pp, &thr, &b).unwrap());
        }
    }
}
