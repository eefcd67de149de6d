//! Independent reference computations shared by the integration tests. Each
//! oracle is written from the model definitions directly and does not call
//! the crate's own synthesis routines.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix3, DMatrix};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rasec::geometry::{ArrayConfig, PolarPosition, RotationState};
use rasec::harness::ExperimentConfig;
use rasec::objective::{LinkBudget, SceneRealization};
use rasec::optimizer::{BeamformingSolution, DesignProblem};
use rasec::sensing::{uncertainty_region, SensingConfig, SensingOutcome};

pub fn default_config() -> ExperimentConfig {
    ExperimentConfig::default()
}

pub fn array(n_tx: usize) -> ArrayConfig {
    let mut cfg = default_config();
    cfg.array.n_tx = n_tx;
    cfg.array_config().unwrap()
}

/// Channel coefficient of element `n` toward `target`, built from positions,
/// boresights and the element pattern.
pub fn oracle_channel(cfg: &ArrayConfig, rot: &RotationState, target: &PolarPosition) -> Vec<C> {
    let lam = cfg.wavelength;
    let r = target.range;
    let beta = C::from_polar(lam / (4.0 * PI * r), 2.0 * PI * r / lam);
    let g0 = 2.0 * (2.0 * cfg.directivity_p + 1.0);
    let q = [r * target.azimuth.sin(), r * target.azimuth.cos()];
    let n = cfg.n_tx;
    (0..n)
        .map(|i| {
            let m = i as f64 - (n as f64 - 1.0) / 2.0;
            let x = m * cfg.spacing;
            // The array axis [1, 0] turns to [cos φ, −sin φ] under rotation φ.
            let pos = [x * rot.phi_arr.cos(), -x * rot.phi_arr.sin()];
            let d = [q[0] - pos[0], q[1] - pos[1]];
            let dist = d[0].hypot(d[1]);
            let ang = rot.phi_arr + rot.varphi[i];
            let cosine = (ang.sin() * d[0] + ang.cos() * d[1]) / dist;
            let gain = if cosine > 0.0 {
                g0 * cosine.powf(2.0 * cfg.directivity_p)
            } else {
                0.0
            };
            let phase = 2.0 * PI * cfg.spacing / lam * m * (target.azimuth - rot.phi_arr).sin();
            beta * gain.sqrt() * C::from_polar(1.0 / (n as f64).sqrt(), phase)
        })
        .collect()
}

pub fn response(h: &[C], w: &[C]) -> C {
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Worst-user secrecy surrogate with the Jensen leakage bound, evaluated from
/// oracle channels: `min_k log2(1+γ|h_kᴴw|²) − log2(1+γ Σ μ_m |h_mᴴw|²)`.
pub fn oracle_surrogate_min(p: &DesignProblem, w: &[C], rot: &RotationState) -> f64 {
    let gamma = p.link.gamma();
    let leak: f64 = p
        .leakage_targets
        .iter()
        .zip(&p.weights)
        .map(|(t, mu)| mu * response(&oracle_channel(&p.array, rot, t), w).norm_sqr())
        .sum();
    let re = (1.0 + gamma * leak).log2();
    p.scene
        .users
        .iter()
        .map(|u| (1.0 + gamma * response(&oracle_channel(&p.array, rot, u), w).norm_sqr()).log2() - re)
        .fold(f64::INFINITY, f64::min)
}

/// Log-sum-exp smoothing of the oracle secrecy values.
pub fn oracle_objective(p: &DesignProblem, w: &[C], rot: &RotationState, beta: f64) -> f64 {
    let gamma = p.link.gamma();
    let leak: f64 = p
        .leakage_targets
        .iter()
        .zip(&p.weights)
        .map(|(t, mu)| mu * response(&oracle_channel(&p.array, rot, t), w).norm_sqr())
        .sum();
    let re = (1.0 + gamma * leak).log2();
    let vals: Vec<f64> = p
        .scene
        .users
        .iter()
        .map(|u| (1.0 + gamma * response(&oracle_channel(&p.array, rot, u), w).norm_sqr()).log2() - re)
        .collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    lo - (vals.iter().map(|v| (-beta * (v - lo)).exp()).sum::<f64>()).ln() / beta
}

/// Noiseless echo mean `β_s a_r(θ) b(θ)ᴴ X` with `b = √G(θ) a_t(θ)` in the
/// unrotated configuration, as an `N_r × L` matrix.
pub fn echo_mean(theta: f64, gain: C, cfg: &ArrayConfig, scfg: &SensingConfig) -> DMatrix<C> {
    let nt = cfg.n_tx;
    let nr = cfg.n_rx;
    let l = scfg.n_beams;
    let g0 = 2.0 * (2.0 * cfg.directivity_p + 1.0);
    let amp = (g0 * theta.cos().max(0.0).powf(2.0 * cfg.directivity_p)).sqrt();
    let steer = |count: usize, angle: f64| -> Vec<C> {
        (0..count)
            .map(|i| {
                let m = i as f64 - (count as f64 - 1.0) / 2.0;
                C::from_polar(1.0 / (count as f64).sqrt(), PI * m * angle.sin())
            })
            .collect()
    };
    let ar = steer(nr, theta);
    let b: Vec<C> = steer(nt, theta).into_iter().map(|x| x * amp).collect();
    // bᴴ x_l for every DFT beam.
    let bx: Vec<C> = (1..=l)
        .map(|k| {
            let beam = steer(nt, (-1.0 + (2 * k - 1) as f64 / l as f64).asin());
            b.iter().zip(&beam).map(|(u, v)| u.conj() * v).sum::<C>() * scfg.sensing_power.sqrt()
        })
        .collect();
    DMatrix::from_fn(nr, l, |r, c| gain * ar[r] * bx[c])
}

/// Bound on θ from the 3×3 Fisher information of (θ, Re β_s, Im β_s), with
/// `∂μ/∂θ` taken by central differences of the echo mean.
pub fn fim_crb(theta: f64, range: f64, cfg: &ArrayConfig, scfg: &SensingConfig) -> f64 {
    let lam = cfg.wavelength;
    let mag = (lam * lam * scfg.rcs / (64.0 * PI.powi(3) * range.powi(4))).sqrt();
    let gain = C::from_polar(mag, 4.0 * PI * range / lam);
    let h = 1e-6;
    let d_theta = (echo_mean(theta + h, gain, cfg, scfg) - echo_mean(theta - h, gain, cfg, scfg))
        / C::new(2.0 * h, 0.0);
    let d_re = echo_mean(theta, C::new(1.0, 0.0), cfg, scfg);
    let d_im = echo_mean(theta, C::new(0.0, 1.0), cfg, scfg);
    let parts = [d_theta, d_re, d_im];
    let mut fim = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let s: C = parts[i].iter().zip(parts[j].iter()).map(|(a, b)| a.conj() * b).sum();
            fim[(i, j)] = 2.0 / scfg.noise_power * s.re;
        }
    }
    fim.try_inverse().expect("non-singular information")[(0, 0)]
}

pub fn random_scene(rng: &mut ChaCha8Rng, users: usize) -> SceneRealization {
    SceneRealization {
        users: (0..users)
            .map(|_| {
                PolarPosition::new(rng.gen_range(30.0..50.0), rng.gen_range(-80f64..80.0).to_radians())
                    .unwrap()
            })
            .collect(),
        eavesdropper: PolarPosition::new(30.0, 50f64.to_radians()).unwrap(),
    }
}

/// Random instance with `n_tx` elements and an `m`-sample region around a
/// slightly perturbed estimate.
pub fn random_problem(seed: u64, n_tx: usize, m: usize) -> DesignProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = default_config();
    let scene = random_scene(&mut rng, 3);
    let theta_hat = scene.eavesdropper.azimuth + rng.gen_range(-0.02..0.02);
    let crb = rng.gen_range(1e-6..1e-4);
    let region = if m == 1 {
        SensingOutcome::point_mass(theta_hat, crb)
    } else {
        uncertainty_region(theta_hat, crb, m).unwrap()
    };
    DesignProblem::new(array(n_tx), scene, &region, cfg.link_budget().unwrap())
}

pub fn link() -> LinkBudget {
    default_config().link_budget().unwrap()
}

pub fn unit_modulus(phases: &[f64]) -> Vec<C> {
    let a = 1.0 / (phases.len() as f64).sqrt();
    phases.iter().map(|p| C::from_polar(a, *p)).collect()
}

pub fn random_solution(rng: &mut ChaCha8Rng, cfg: &ArrayConfig) -> BeamformingSolution {
    BeamformingSolution {
        w: unit_modulus(&(0..cfg.n_tx).map(|_| rng.gen_range(0.0..2.0 * PI)).collect::<Vec<_>>()),
        phi_arr: rng.gen_range(-1.0..=1.0) * cfg.phi_arr_max,
        varphi: (0..cfg.n_tx).map(|_| rng.gen_range(-1.0..=1.0) * cfg.varphi_max).collect(),
    }
}
