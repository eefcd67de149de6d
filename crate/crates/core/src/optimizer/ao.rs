use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::objective::evaluate_true_secrecy;

use super::{
    exhaustive_phi_arr, solve_phi_arr, solve_varphi, solve_w, ArrayRotationMode,
    BeamformingSolution, BlockMask, DesignProblem, SolverSettings,
};

const EXTRAPOLATION_STEPS: usize = 12;

/// Objective values recorded during one outer iteration. All surrogate values
/// within a record share the same smoothing factor `beta_sm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoIterate {
    pub iteration: usize,
    pub beta_sm: f64,
    pub objective_start: f64,
    pub after_w: f64,
    pub after_phi_arr: f64,
    pub after_varphi: f64,
    /// Objective after the extrapolation step (equal to `after_varphi` when
    /// extrapolation is off or did not improve).
    pub after_extrapolation: f64,
    /// `min_k (R_k − R̃_e)` without smoothing, at the end of the iteration.
    pub surrogate_min: f64,
    /// Worst-user secrecy rate against the true eavesdropper position.
    pub evaluated_secrecy: f64,
    pub inner_iterations: usize,
}

impl AoIterate {
    /// Largest decrease across the three block updates (zero when monotone).
    pub fn worst_decrease(&self) -> f64 {
        let steps = [
            self.after_w - self.objective_start,
            self.after_phi_arr - self.after_w,
            self.after_varphi - self.after_phi_arr,
            self.after_extrapolation - self.after_varphi,
        ];
        steps.iter().fold(0.0f64, |m, d| m.max(-d))
    }
}

#[derive(Debug, Clone)]
pub struct AoOutcome {
    pub solution: BeamformingSolution,
    pub trace: Vec<AoIterate>,
    pub converged: bool,
}

impl AoOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    /// Smoothed surrogate at termination.
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.after_extrapolation)
    }
}

/// Alternates the beamformer, array-rotation and element-orientation updates,
/// growing the smoothing factor after each pass, until the surrogate changes
/// by at most `settings.tol` between passes or `max_iter_ao` passes ran.
/// Blocks excluded by `mask` keep their values from `init`.
pub fn ao_solve(
    problem: &DesignProblem,
    settings: &SolverSettings,
    init: &BeamformingSolution,
    mask: BlockMask,
) -> Result<AoOutcome> {
    settings.validate()?;
    init.check_feasible(&problem.array)?;
    let mut sol = init.clone();
    let mut beta = settings.beta_sm_init.min(settings.beta_sm_max);
    let mut trace: Vec<AoIterate> = Vec::new();
    let mut converged = false;

    for iteration in 0..settings.max_iter_ao {
        let start = sol.clone();
        let rot = sol.rotation();
        let objective_start = problem.objective(&sol.w, &rot, beta);

        let ctx = problem.context(&rot, beta);
        let rcg = solve_w(&sol.w, &ctx, &problem.link, settings);
        // Guard against round-off between the two evaluation routes.
        let after_w_value = problem.objective(&rcg.w, &rot, beta);
        let after_w = if after_w_value >= objective_start {
            sol.w = rcg.w;
            after_w_value
        } else {
            objective_start
        };

        let after_phi_arr = match mask.array_rotation {
            ArrayRotationMode::Frozen => after_w,
            ArrayRotationMode::Gradient => {
                let (phi, f) = solve_phi_arr(problem, &sol, beta, settings);
                sol.phi_arr = phi;
                f
            }
            ArrayRotationMode::Exhaustive(points) => {
                let (phi, f) = exhaustive_phi_arr(problem, &sol, beta, points);
                sol.phi_arr = phi;
                f
            }
        };

        let after_varphi = if mask.element_rotation {
            let (varphi, f) = solve_varphi(problem, &sol, beta, settings);
            sol.varphi = varphi;
            f
        } else {
            after_phi_arr
        };

        let after_extrapolation = if settings.extrapolate {
            let (x, f) = extrapolate(problem, &start, &sol, after_varphi, beta);
            sol = x;
            f
        } else {
            after_varphi
        };

        let rot = sol.rotation();
        debug_assert!(rot.check_feasible(&problem.array).is_ok());
        let record = AoIterate {
            iteration,
            beta_sm: beta,
            objective_start,
            after_w,
            after_phi_arr,
            after_varphi,
            after_extrapolation,
            surrogate_min: problem.surrogate_min(&sol.w, &rot),
            evaluated_secrecy: evaluate_true_secrecy(
                &sol.w,
                &rot,
                &problem.array,
                &problem.scene,
                &problem.link,
            ),
            inner_iterations: rcg.iterations,
        };
        let delta = trace
            .last()
            .map(|prev| (record.after_extrapolation - prev.after_extrapolation).abs());
        trace.push(record);
        if delta.is_some_and(|d| d <= settings.tol) {
            converged = true;
            break;
        }
        beta = (beta * settings.beta_sm_growth).min(settings.beta_sm_max);
    }

    Ok(AoOutcome {
        solution: sol,
        trace,
        converged,
    })
}

/// Moves along the displacement of the last pass, `x + t (x − x_prev)` for
/// `t = 1, 2, 4, …`, with `w` phases stepped on the unit circle and rotations
/// projected onto their boxes. Keeps the best point if it beats `f`.
fn extrapolate(
    problem: &DesignProblem,
    prev: &BeamformingSolution,
    cur: &BeamformingSolution,
    f: f64,
    beta: f64,
) -> (BeamformingSolution, f64) {
    let phase: Vec<f64> = cur.w.iter().zip(&prev.w).map(|(a, b)| (a * b.conj()).arg()).collect();
    let d_phi = cur.phi_arr - prev.phi_arr;
    let d_varphi: Vec<f64> = cur.varphi.iter().zip(&prev.varphi).map(|(a, b)| a - b).collect();
    let pa = problem.array.phi_arr_max;
    let pv = problem.array.varphi_max;
    let mut best = (cur.clone(), f);
    let mut t = 1.0;
    for _ in 0..EXTRAPOLATION_STEPS {
        let x = BeamformingSolution {
            w: cur
                .w
                .iter()
                .zip(&phase)
                .map(|(w, p)| w * Complex64::from_polar(1.0, t * p))
                .collect(),
            phi_arr: (cur.phi_arr + t * d_phi).clamp(-pa, pa),
            varphi: cur
                .varphi
                .iter()
                .zip(&d_varphi)
                .map(|(v, d)| (v + t * d).clamp(-pv, pv))
                .collect(),
        };
        let fx = problem.objective(&x.w, &x.rotation(), beta);
        if !(fx > best.1) {
            break;
        }
        best = (x, fx);
        t *= 2.0;
    }
    best
}
