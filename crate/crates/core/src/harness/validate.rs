//! Self-checks run by the `validate` subcommand: analytic gradients against
//! central differences, the sensing bound against the estimator's empirical
//! error, the Jensen and softmin bounds, and the probing covariance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::geometry::{boresight, element_positions, ArrayConfig, PolarPosition, RotationState};
use crate::linalg::C64;
use crate::objective::{
    softmin, softmin_objective, surrogate_eav_rate, weighted_eav_rate, ObjectiveContext,
};
use crate::optimizer::{euclidean_grad_w, DesignProblem};
use crate::sensing::{
    crb, dft_codebook, mle_estimate, probing_matrix, simulate_echoes, uncertainty_region,
};

use super::config::ExperimentConfig;
use super::trial::generate_scene;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Finite-difference step and pass threshold of the gradient checks.
const FD_STEP: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-5;
/// Sensing-power offset (dB) at which estimator efficiency is checked.
const EFFICIENCY_PROBE_DB: f64 = 10.0;
/// Points whose element projections come this close to zero are skipped.
const CLIP_MARGIN: f64 = 1e-4;

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Random design instance built from the configured scene distribution.
pub fn random_instance(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<DesignProblem> {
    let scene = generate_scene(cfg, rng.gen())?;
    let theta_hat = scene.eavesdropper.azimuth + rng.gen_range(-0.02..0.02);
    let region = uncertainty_region(theta_hat, rng.gen_range(1e-6..1e-4), cfg.sensing.n_samples)?;
    Ok(DesignProblem::new(cfg.array_config()?, scene, &region, cfg.link_budget()?))
}

pub fn random_rotation(array: &ArrayConfig, rng: &mut ChaCha8Rng) -> RotationState {
    RotationState {
        phi_arr: rng.gen_range(-1.0..=1.0) * array.phi_arr_max,
        varphi: (0..array.n_tx)
            .map(|_| rng.gen_range(-1.0..=1.0) * array.varphi_max)
            .collect(),
    }
}

pub fn random_beamformer(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let amp = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|_| Complex64::from_polar(amp, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Smallest `|f̄_nᵀ u|` over all elements and links, used to avoid points on
/// the kink of the positive projection.
pub fn min_projection_margin(
    array: &ArrayConfig,
    rot: &RotationState,
    targets: &[PolarPosition],
) -> f64 {
    let pos = element_positions(array, rot.phi_arr);
    let mut m = f64::INFINITY;
    for t in targets {
        let q = t.cartesian();
        for (n, c) in pos.iter().enumerate() {
            let d = [q[0] - c[0], q[1] - c[1]];
            let r = d[0].hypot(d[1]);
            let f = boresight(rot.phi_arr, rot.varphi[n]);
            m = m.min(((f[0] * d[0] + f[1] * d[1]) / r).abs());
        }
    }
    m
}

/// Worst relative error of the three analytic gradients over `points`
/// random feasible points: `[w, φ_arr, φ]`.
pub fn gradient_errors(cfg: &ExperimentConfig, points: usize, seed: u64) -> Result<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 3];
    let mut done = 0;
    while done < points {
        let p = random_instance(cfg, &mut rng)?;
        let rot = random_rotation(&p.array, &mut rng);
        let targets: Vec<PolarPosition> =
            p.scene.users.iter().chain(&p.leakage_targets).copied().collect();
        if min_projection_margin(&p.array, &rot, &targets) < CLIP_MARGIN {
            continue;
        }
        done += 1;
        let beta = rng.gen_range(5.0..200.0);
        let w = random_beamformer(p.n_tx(), &mut rng);
        let n = p.n_tx() as f64;

        // Beamformer, in v = √N w along a random complex direction.
        let ctx = p.context(&rot, beta);
        let v: Vec<C64> = w.iter().map(|x| x * n.sqrt()).collect();
        let g = euclidean_grad_w(&v, &ctx, &p.link);
        let dir: Vec<C64> = (0..v.len())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let eval = |s: f64| {
            let x: Vec<C64> = v.iter().zip(&dir).map(|(a, d)| (a + d * s) / n.sqrt()).collect();
            softmin_objective(&x, &ctx, &p.link)
        };
        let fd = (eval(FD_STEP) - eval(-FD_STEP)) / (2.0 * FD_STEP);
        let an: f64 = 2.0 * g.iter().zip(&dir).map(|(a, d)| (a.conj() * d).re).sum::<f64>();
        worst[0] = worst[0].max(relative_error(fd, an));

        // Array rotation.
        let shifted = |d: f64| {
            let mut r = rot.clone();
            r.phi_arr += d;
            p.objective(&w, &r, beta)
        };
        let fd = (shifted(FD_STEP) - shifted(-FD_STEP)) / (2.0 * FD_STEP);
        worst[1] = worst[1].max(relative_error(fd, p.grad_phi_arr(&w, &rot, beta)));

        // Element orientations.
        let an = p.grad_varphi(&w, &rot, beta);
        for (k, a) in an.iter().enumerate() {
            let shifted = |d: f64| {
                let mut r = rot.clone();
                r.varphi[k] += d;
                p.objective(&w, &r, beta)
            };
            let fd = (shifted(FD_STEP) - shifted(-FD_STEP)) / (2.0 * FD_STEP);
            worst[2] = worst[2].max(relative_error(fd, *a));
        }
    }
    Ok(worst)
}

/// Empirical MSE of the estimator over `trials` noisy frames at the
/// configured eavesdropper, its ratio to the bound, and the fraction of
/// errors inside `±3√CRB`.
pub fn crb_vs_mse(cfg: &ExperimentConfig, trials: usize, seed: u64) -> Result<(f64, f64, f64)> {
    let array = cfg.array_config()?;
    let scfg = cfg.sensing_config()?;
    let eav = cfg.eavesdropper()?;
    let bound = crb(eav.azimuth, eav.range, &scfg, &array)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sq = 0.0;
    let mut inside = 0usize;
    for _ in 0..trials {
        let echoes = simulate_echoes(eav.azimuth, eav.range, &scfg, &array, &mut rng)?;
        let err = mle_estimate(&echoes, &scfg, &array)? - eav.azimuth;
        sq += err * err;
        if err.abs() <= 3.0 * bound.sqrt() {
            inside += 1;
        }
    }
    let mse = sq / trials as f64;
    Ok((mse, mse / bound, inside as f64 / trials as f64))
}

/// Largest violation of `R̃_e ≥ R̄_e` and of
/// `min − ln K/β ≤ softmin ≤ min` over `instances` random draws.
pub fn surrogate_bound_violations(
    cfg: &ExperimentConfig,
    instances: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jensen = 0.0f64;
    let mut sandwich = 0.0f64;
    for _ in 0..instances {
        let p = random_instance(cfg, &mut rng)?;
        let rot = random_rotation(&p.array, &mut rng);
        let w = random_beamformer(p.n_tx(), &mut rng);
        let ctx: ObjectiveContext = p.context(&rot, 1.0);
        let gap = surrogate_eav_rate(&w, &ctx, &p.link) - weighted_eav_rate(&w, &ctx, &p.link);
        jensen = jensen.max(-gap);

        let k = rng.gen_range(1..8);
        let values: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..10.0)).collect();
        let beta = 10f64.powf(rng.gen_range(-1.0..4.0));
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let s = softmin(&values, beta);
        sandwich = sandwich
            .max(s - lo)
            .max(lo - (k as f64).ln() / beta - s);
    }
    Ok((jensen, sandwich))
}

/// `‖(1/L) X Xᴴ − (P_s/N_t) I‖_F` relative to `P_s`.
pub fn probing_covariance_residual(cfg: &ExperimentConfig) -> Result<f64> {
    let array = cfg.array_config()?;
    let scfg = cfg.sensing_config()?;
    let x = probing_matrix(&dft_codebook(scfg.n_beams, array.n_tx)?, scfg.sensing_power);
    let cov = x.mul_adjoint(&x);
    let target = scfg.sensing_power / array.n_tx as f64;
    let mut sq = 0.0;
    for i in 0..array.n_tx {
        for j in 0..array.n_tx {
            let t = if i == j { target } else { 0.0 };
            sq += (cov.get(i, j) / scfg.n_beams as f64 - t).norm_sqr();
        }
    }
    Ok(sq.sqrt() / scfg.sensing_power)
}

pub fn run_validation(cfg: &ExperimentConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let [gw, gp, gv] = gradient_errors(cfg, 100, 11)?;
    for (name, e) in [
        ("gradient/beamformer", gw),
        ("gradient/array-rotation", gp),
        ("gradient/element-orientation", gv),
    ] {
        out.push(CheckResult {
            name,
            passed: e <= GRAD_TOL,
            detail: format!("worst relative error {e:.3e} (limit {GRAD_TOL:e})"),
        });
    }

    // Efficiency is checked where the estimator operates above its SNR
    // threshold; the configured setup is reported alongside.
    let mut probe = cfg.clone();
    probe.sensing.power_dbm += EFFICIENCY_PROBE_DB;
    let (mse, ratio, coverage) = crb_vs_mse(&probe, 1000, 12)?;
    let (_, ratio_cfg, coverage_cfg) = crb_vs_mse(cfg, 1000, 12)?;
    out.push(CheckResult {
        name: "sensing/mse-vs-crb",
        passed: (0.5..=2.0).contains(&ratio) && coverage >= 0.99,
        detail: format!(
            "at P_s {:.1} dBm: mse {mse:.3e} rad², mse/crb {ratio:.3}, inside ±3σ {coverage:.3}; \
             at configured P_s: mse/crb {ratio_cfg:.3}, inside ±3σ {coverage_cfg:.3}",
            probe.sensing.power_dbm
        ),
    });

    let (jensen, sandwich) = surrogate_bound_violations(cfg, 1000, 13)?;
    out.push(CheckResult {
        name: "objective/jensen",
        passed: jensen <= 1e-12,
        detail: format!("largest violation {jensen:.3e}"),
    });
    out.push(CheckResult {
        name: "objective/softmin-sandwich",
        passed: sandwich <= 1e-12,
        detail: format!("largest violation {sandwich:.3e}"),
    });

    let res = probing_covariance_residual(cfg)?;
    out.push(CheckResult {
        name: "sensing/probing-covariance",
        passed: res <= 1e-10,
        detail: format!("relative residual {res:.3e}"),
    });
    Ok(out)
}
