use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{PolarPosition, RotationState};
use crate::objective::{evaluate_true_secrecy, SceneRealization};
use crate::optimizer::{ao_solve, AoOutcome, DesignProblem};
use crate::sensing::{crb, mle_estimate, simulate_echoes, uncertainty_region, SensingOutcome};

use super::config::ExperimentConfig;
use super::output::ResultRecord;
use super::scheme::SchemeTag;
use super::seeds::{stream_rng, trial_seed, Stream};

/// Users drawn uniformly in range and azimuth over the configured intervals;
/// the eavesdropper sits at its configured position.
pub fn generate_scene(cfg: &ExperimentConfig, seed: u64) -> Result<SceneRealization> {
    let mut rng = stream_rng(seed, Stream::Scene);
    let sc = &cfg.scene;
    let [r0, r1] = sc.user_range_m;
    let [a0, a1] = sc.user_azimuth_deg;
    let users = (0..sc.n_users)
        .map(|_| {
            let r = r0 + (r1 - r0) * rng.gen::<f64>();
            let a = a0 + (a1 - a0) * rng.gen::<f64>();
            PolarPosition::new(r, a.to_radians())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SceneRealization {
        users,
        eavesdropper: cfg.eavesdropper()?,
    })
}

/// A scene together with its sensing result, shared by all schemes of a
/// trial.
#[derive(Debug, Clone)]
pub struct SensedScene {
    pub trial: usize,
    pub seed: u64,
    pub scene: SceneRealization,
    pub theta_hat: f64,
    /// Bound evaluated at the estimate (or the configured override).
    pub crb: f64,
}

pub fn sense(cfg: &ExperimentConfig, trial: usize) -> Result<SensedScene> {
    let seed = trial_seed(cfg.experiment.master_seed, trial);
    let scene = generate_scene(cfg, seed)?;
    let array = cfg.array_config()?;
    let scfg = cfg.sensing_config()?;
    let eav = scene.eavesdropper;
    let mut rng = stream_rng(seed, Stream::Sensing);
    let echoes = simulate_echoes(eav.azimuth, eav.range, &scfg, &array, &mut rng)?;
    let theta_hat = mle_estimate(&echoes, &scfg, &array)?;
    let bound = match cfg.sensing.crb_override {
        Some(v) => v,
        None => crb(theta_hat, eav.range, &scfg, &array)?,
    };
    Ok(SensedScene {
        trial,
        seed,
        scene,
        theta_hat,
        crb: bound,
    })
}

/// Uncertainty model handed to the optimizer for `scheme`.
pub fn design_region(
    cfg: &ExperimentConfig,
    sensed: &SensedScene,
    scheme: SchemeTag,
) -> Result<SensingOutcome> {
    if scheme.uses_point_estimate() {
        Ok(SensingOutcome::point_mass(sensed.theta_hat, sensed.crb))
    } else {
        uncertainty_region(sensed.theta_hat, sensed.crb, cfg.sensing.n_samples)
    }
}

/// Optimized design of one scheme on one sensed scene.
#[derive(Debug, Clone)]
pub struct SchemeRun {
    pub scheme: SchemeTag,
    pub problem: DesignProblem,
    pub region: SensingOutcome,
    pub outcome: AoOutcome,
    pub wall_ms: f64,
}

impl SchemeRun {
    pub fn true_secrecy(&self, rot: &RotationState) -> f64 {
        let p = &self.problem;
        evaluate_true_secrecy(&self.outcome.solution.w, rot, &p.array, &p.scene, &p.link)
    }
}

pub fn solve_scheme(
    cfg: &ExperimentConfig,
    sensed: &SensedScene,
    scheme: SchemeTag,
) -> Result<SchemeRun> {
    let start = Instant::now();
    let region = design_region(cfg, sensed, scheme)?;
    let problem = DesignProblem::new(
        cfg.array_config()?,
        sensed.scene.clone(),
        &region,
        cfg.link_budget()?,
    );
    let init = problem.initial_solution();
    let outcome = ao_solve(
        &problem,
        &cfg.solver,
        &init,
        scheme.mask(cfg.experiment.es_grid_points),
    )?;
    Ok(SchemeRun {
        scheme,
        problem,
        region,
        outcome,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn record(
    sensed: &SensedScene,
    scheme: SchemeTag,
    sweep: Option<(&str, f64)>,
    run: Result<&SchemeRun>,
    rot_override: Option<&RotationState>,
) -> ResultRecord {
    let mut rec = ResultRecord {
        trial: sensed.trial,
        scheme,
        sweep_parameter: sweep.map(|(p, _)| p.to_string()),
        sweep_value: sweep.map(|(_, v)| v),
        theta_true: sensed.scene.eavesdropper.azimuth,
        theta_hat: sensed.theta_hat,
        crb: sensed.crb,
        secrecy: 0.0,
        surrogate: 0.0,
        ao_iterations: 0,
        converged: false,
        phi_arr: 0.0,
        varphi: Vec::new(),
        status: "ok".into(),
        wall_ms: 0.0,
    };
    match run {
        Ok(run) => {
            let sol = &run.outcome.solution;
            let rot = rot_override.cloned().unwrap_or_else(|| sol.rotation());
            rec.secrecy = run.true_secrecy(&rot);
            rec.surrogate = run.outcome.final_objective();
            rec.ao_iterations = run.outcome.iterations();
            rec.converged = run.outcome.converged;
            rec.phi_arr = rot.phi_arr;
            rec.varphi = rot.varphi;
            rec.wall_ms = run.wall_ms;
        }
        Err(e) => rec.status = format!("failed: {e}"),
    }
    rec
}

/// Full pipeline for one scheme on trial `trial`: scene, sensing, design
/// against the sensed region, evaluation against the true eavesdropper.
/// Failures are reported in the record's status rather than dropped.
pub fn run_trial(cfg: &ExperimentConfig, scheme: SchemeTag, trial: usize) -> ResultRecord {
    match sense(cfg, trial) {
        Ok(sensed) => {
            let run = solve_scheme(cfg, &sensed, scheme);
            record(&sensed, scheme, None, run.as_ref().map_err(Clone::clone), None)
        }
        Err(e) => failed_record(cfg, trial, scheme, None, e),
    }
}

fn failed_record(
    cfg: &ExperimentConfig,
    trial: usize,
    scheme: SchemeTag,
    sweep: Option<(&str, f64)>,
    e: crate::Error,
) -> ResultRecord {
    let sensed = SensedScene {
        trial,
        seed: trial_seed(cfg.experiment.master_seed, trial),
        scene: SceneRealization {
            users: Vec::new(),
            eavesdropper: PolarPosition {
                range: cfg.scene.eav_range_m,
                azimuth: cfg.scene.eav_azimuth_deg.to_radians(),
            },
        },
        theta_hat: 0.0,
        crb: 0.0,
    };
    record(&sensed, scheme, sweep, Err(e), None)
}

fn trial_records(
    cfg: &ExperimentConfig,
    trial: usize,
    sweep: Option<(&str, f64)>,
) -> Vec<ResultRecord> {
    let schemes = &cfg.experiment.schemes;
    match sense(cfg, trial) {
        Ok(sensed) => schemes
            .iter()
            .map(|&s| {
                let run = solve_scheme(cfg, &sensed, s);
                record(&sensed, s, sweep, run.as_ref().map_err(Clone::clone), None)
            })
            .collect(),
        Err(e) => schemes
            .iter()
            .map(|&s| failed_record(cfg, trial, s, sweep, e.clone()))
            .collect(),
    }
}

/// Every configured scheme on every trial, ordered by trial then scheme.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<ResultRecord> {
    run_cell(cfg, None)
}

fn run_cell(cfg: &ExperimentConfig, sweep: Option<(&str, f64)>) -> Vec<ResultRecord> {
    (0..cfg.experiment.n_trials)
        .into_par_iter()
        .map(|t| trial_records(cfg, t, sweep))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// One experiment per swept value, ordered by value, trial and scheme. Trial
/// seeds do not depend on the swept value, so each value sees the same scenes
/// and noise draws.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let Some(sweep) = &cfg.sweep else {
        return Err(crate::Error::Config("no [sweep] section configured".into()));
    };
    let mut out = Vec::new();
    for &v in &sweep.values {
        let cell = cfg.with_parameter(&sweep.parameter, v)?;
        out.extend(run_cell(&cell, Some((sweep.parameter.as_str(), v))));
    }
    Ok(out)
}

pub const ROTATION_ERROR_PARAMETER: &str = "rotation_error_bound_deg";

/// Optimizes each scheme once per trial, then perturbs its active rotation
/// variables by `bound · u` with `u ~ U[−1, 1]` drawn once per trial and
/// variable (shared by all bounds and schemes), clamps into the boxes and
/// re-evaluates the true secrecy rate. Frozen rotations stay untouched.
pub fn rotation_error_study(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let bounds = &cfg.experiment.rotation_error_bounds_deg;
    if bounds.is_empty() {
        return Err(crate::Error::Config(
            "experiment.rotation_error_bounds_deg is empty".into(),
        ));
    }
    let array = cfg.array_config()?;
    let per_trial = |trial: usize| -> Vec<ResultRecord> {
        let sensed = match sense(cfg, trial) {
            Ok(s) => s,
            Err(e) => {
                return cfg
                    .experiment
                    .schemes
                    .iter()
                    .flat_map(|&s| {
                        bounds.iter().map({
                            let e = e.clone();
                            move |&b| failed_record(cfg, trial, s, Some((ROTATION_ERROR_PARAMETER, b)), e.clone())
                        })
                    })
                    .collect()
            }
        };
        let mut rng = stream_rng(sensed.seed, Stream::RotationError);
        let u_arr: f64 = rng.gen_range(-1.0..=1.0);
        let u_el: Vec<f64> = (0..array.n_tx).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mut out = Vec::new();
        for &scheme in &cfg.experiment.schemes {
            let run = solve_scheme(cfg, &sensed, scheme);
            let mask = scheme.mask(cfg.experiment.es_grid_points);
            for &b in bounds {
                let sweep = Some((ROTATION_ERROR_PARAMETER, b));
                let rec = match &run {
                    Ok(r) => {
                        let mut rot = r.outcome.solution.rotation();
                        let e = b.to_radians();
                        if mask.array_rotation != crate::optimizer::ArrayRotationMode::Frozen {
                            rot.phi_arr += e * u_arr;
                        }
                        if mask.element_rotation {
                            for (v, u) in rot.varphi.iter_mut().zip(&u_el) {
                                *v += e * u;
                            }
                        }
                        rot.clamp_into(&array);
                        record(&sensed, scheme, sweep, Ok(r), Some(&rot))
                    }
                    Err(e) => record(&sensed, scheme, sweep, Err(e.clone()), None),
                };
                out.push(rec);
            }
        }
        out
    };
    Ok((0..cfg.experiment.n_trials)
        .into_par_iter()
        .map(per_trial)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect())
}
