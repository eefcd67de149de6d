mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rasec::geometry::{
    beam_gain, boresight, channel_jet, channel_vector, element_gain, element_positions,
    ArrayConfig, PolarPosition, RotationState, GAIN_FLOOR_DB,
};

use common::{array, oracle_channel};

fn max_abs_diff(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn channel_matches_oracle_at_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [0.0, 1.0, 2.0, 3.5] {
        let mut cfg = array(8);
        cfg.directivity_p = p;
        for _ in 0..50 {
            let rot = RotationState {
                phi_arr: rng.gen_range(-1.0..=1.0) * cfg.phi_arr_max,
                varphi: (0..8).map(|_| rng.gen_range(-1.0..=1.0) * cfg.varphi_max).collect(),
            };
            let t = PolarPosition::new(rng.gen_range(5.0..80.0), rng.gen_range(-1.5..1.5)).unwrap();
            let h = channel_vector(&cfg, &rot, &t).unwrap();
            let o = oracle_channel(&cfg, &rot, &t);
            let scale = o.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
            assert!(max_abs_diff(h.entries(), &o) <= 1e-12 * scale);
        }
    }
}

#[test]
fn broadside_channel_has_boresight_gain() {
    let cfg = array(8);
    let far = PolarPosition::new(1e6, 0.0).unwrap();
    let h = channel_vector(&cfg, &RotationState::zeros(8), &far).unwrap();
    let beta = cfg.wavelength / (4.0 * PI * 1e6);
    for x in h.entries() {
        let g = x.norm_sqr() * 8.0 / (beta * beta);
        assert!((g - 6.0).abs() < 1e-6, "gain {g}");
    }
}

#[test]
fn rotations_are_confined_to_the_positive_half_space() {
    let cfg = array(4);
    let rot = RotationState::zeros(4);
    let behind = PolarPosition { range: 20.0, azimuth: PI / 2.0 + 0.1 };
    let h = channel_vector(&cfg, &rot, &behind).unwrap();
    assert!(h.entries().iter().all(|x| x.norm() == 0.0));
    let w = vec![num_complex::Complex64::new(0.5, 0.0); 4];
    assert_eq!(beam_gain(&cfg, &rot, &w, PI / 2.0 + 0.1, 20.0), GAIN_FLOOR_DB);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(ArrayConfig::new(0, 16, 0.01, 1.0, 0.1, 0.1).is_err());
    assert!(ArrayConfig::new(8, 16, 0.01, 1.0, 0.1, 2.0).is_err());
    assert!(ArrayConfig::new(8, 16, -0.01, 1.0, 0.1, 0.1).is_err());
    assert!(PolarPosition::new(0.0, 0.1).is_err());
    assert!(PolarPosition::new(10.0, PI / 2.0).is_err());
    let cfg = array(8);
    let bad = RotationState { phi_arr: 1.0, varphi: vec![0.0; 8] };
    assert!(bad.check_feasible(&cfg).is_err());
    let short = RotationState { phi_arr: 0.0, varphi: vec![0.0; 7] };
    assert!(short.check_feasible(&cfg).is_err());
}

/// Central differences of the oracle channel against the analytic jet,
/// skipping states where an element sits near its pattern null.
#[test]
fn channel_derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = array(8);
    let h = 1e-6;
    let mut checked = 0;
    while checked < 100 {
        let rot = RotationState {
            phi_arr: rng.gen_range(-1.0..=1.0) * cfg.phi_arr_max,
            varphi: (0..8).map(|_| rng.gen_range(-1.0..=1.0) * cfg.varphi_max).collect(),
        };
        let t = PolarPosition::new(rng.gen_range(10.0..60.0), rng.gen_range(-1.3..1.3)).unwrap();
        let pos = element_positions(&cfg, rot.phi_arr);
        let q = t.cartesian();
        let margin = pos
            .iter()
            .zip(&rot.varphi)
            .map(|(c, v)| {
                let d = [q[0] - c[0], q[1] - c[1]];
                let f = boresight(rot.phi_arr, *v);
                ((f[0] * d[0] + f[1] * d[1]) / d[0].hypot(d[1])).abs()
            })
            .fold(f64::INFINITY, f64::min);
        if margin < 1e-3 {
            continue;
        }
        checked += 1;
        let jet = channel_jet(&cfg, &rot, &t);
        let scale = jet.h.iter().map(|x| x.norm()).fold(0.0, f64::max);

        let mut up = rot.clone();
        up.phi_arr += h;
        let mut dn = rot.clone();
        dn.phi_arr -= h;
        let fd: Vec<_> = oracle_channel(&cfg, &up, &t)
            .iter()
            .zip(oracle_channel(&cfg, &dn, &t))
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        assert!(max_abs_diff(&fd, &jet.d_phi_arr) <= 1e-6 * scale * 8.0);

        for n in 0..8 {
            let mut up = rot.clone();
            up.varphi[n] += h;
            let mut dn = rot.clone();
            dn.varphi[n] -= h;
            let a = oracle_channel(&cfg, &up, &t);
            let b = oracle_channel(&cfg, &dn, &t);
            for (k, (x, y)) in a.iter().zip(&b).enumerate() {
                let d = (x - y) / (2.0 * h);
                let expect = if k == n { jet.d_varphi[n] } else { num_complex::Complex64::new(0.0, 0.0) };
                assert!((d - expect).norm() <= 1e-6 * scale * 8.0);
            }
        }
    }
}

#[test]
fn element_gain_closed_form() {
    assert_eq!(element_gain([0.0, 1.0], [0.0, 1.0], 1.0, 6.0), 6.0);
    let u = [(0.3f64).sin(), (0.3f64).cos()];
    assert!((element_gain([0.0, 1.0], u, 2.0, 10.0) - 10.0 * 0.3f64.cos().powi(4)).abs() < 1e-14);
    assert_eq!(element_gain([0.0, 1.0], [0.0, -1.0], 1.0, 6.0), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn element_gain_is_bounded(p in 0.0f64..4.0, a in -PI..PI, b in -PI..PI) {
        let g0 = 2.0 * (2.0 * p + 1.0);
        let g = element_gain([a.sin(), a.cos()], [b.sin(), b.cos()], p, g0);
        prop_assert!(g >= 0.0 && g <= g0 * (1.0 + 1e-12));
    }

    #[test]
    fn channel_magnitudes_never_exceed_boresight(
        phi in -0.26f64..0.26,
        v in proptest::collection::vec(-0.26f64..0.26, 8),
        r in 1.0f64..200.0,
        az in -1.5f64..1.5,
    ) {
        let cfg = array(8);
        let rot = RotationState { phi_arr: phi, varphi: v };
        let t = PolarPosition::new(r, az).unwrap();
        let h = channel_vector(&cfg, &rot, &t).unwrap();
        let cap = cfg.wavelength / (4.0 * PI * r) * (cfg.boresight_gain() / 8.0).sqrt();
        for x in h.entries() {
            prop_assert!(x.norm() <= cap * (1.0 + 1e-12));
        }
    }

    #[test]
    fn clamping_restores_feasibility(
        phi in -3.0f64..3.0,
        v in proptest::collection::vec(-3.0f64..3.0, 8),
    ) {
        let cfg = array(8);
        let mut rot = RotationState { phi_arr: phi, varphi: v };
        rot.clamp_into(&cfg);
        prop_assert!(rot.check_feasible(&cfg).is_ok());
    }

    #[test]
    fn element_positions_keep_spacing(phi in -PI..PI) {
        let cfg = array(8);
        let pos = element_positions(&cfg, phi);
        for w in pos.windows(2) {
            let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            prop_assert!((d - cfg.spacing).abs() < 1e-15);
        }
        let c = pos.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        prop_assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
    }
}
