use crate::geometry::RotationState;

use super::{BeamformingSolution, DesignProblem, SolverSettings};

/// Projected gradient ascent on the array rotation with `w` and the element
/// orientations held fixed. Returns the new angle and its objective.
pub fn solve_phi_arr(
    problem: &DesignProblem,
    sol: &BeamformingSolution,
    beta_sm: f64,
    settings: &SolverSettings,
) -> (f64, f64) {
    let bound = problem.array.phi_arr_max;
    let mut rot = sol.rotation();
    rot.phi_arr = rot.phi_arr.clamp(-bound, bound);
    let mut f = problem.objective(&sol.w, &rot, beta_sm);
    if bound == 0.0 {
        return (rot.phi_arr, f);
    }
    let eval = |phi: f64, rot: &RotationState| {
        let mut r = rot.clone();
        r.phi_arr = phi;
        problem.objective(&sol.w, &r, beta_sm)
    };
    // Largest useful move is the box width.
    let span = 2.0 * bound;
    let mut last_step: Option<f64> = None;
    for _ in 0..settings.max_iter_inner {
        let g = problem.grad_phi_arr(&sol.w, &rot, beta_sm);
        if !(g.abs() >= settings.tol) {
            break;
        }
        let cap = span / g.abs();
        let mut step = last_step.map_or(cap, |s| (2.0 * s).min(cap));
        let mut accepted = None;
        for _ in 0..=settings.max_backtracks {
            let x = (rot.phi_arr + step * g).clamp(-bound, bound);
            let dx = x - rot.phi_arr;
            if dx == 0.0 {
                break;
            }
            let f_try = eval(x, &rot);
            if f_try >= f + settings.armijo_c * g * dx && f_try > f {
                accepted = Some((x, f_try));
                break;
            }
            step *= settings.armijo_shrink;
        }
        let Some((x, f_new)) = accepted else {
            break;
        };
        last_step = Some(step);
        let gain = f_new - f;
        rot.phi_arr = x;
        f = f_new;
        if gain <= settings.tol {
            break;
        }
    }
    debug_assert!(rot.phi_arr.abs() <= bound);
    (rot.phi_arr, f)
}

/// Uniform grid enumeration of the array rotation over `[−φ_max, φ_max]`.
/// The incoming angle stays unless a grid point strictly improves on it; ties
/// within the grid favour the smallest `|φ_arr|`.
pub fn exhaustive_phi_arr(
    problem: &DesignProblem,
    sol: &BeamformingSolution,
    beta_sm: f64,
    points: usize,
) -> (f64, f64) {
    let bound = problem.array.phi_arr_max;
    let mut rot = sol.rotation();
    let incumbent = (rot.phi_arr, problem.objective(&sol.w, &rot, beta_sm));
    let mut best: Option<(f64, f64)> = None;
    for x in uniform_grid(bound, points) {
        rot.phi_arr = x;
        let f = problem.objective(&sol.w, &rot, beta_sm);
        best = match best {
            Some((bx, bf)) if f < bf || (f == bf && x.abs() >= bx.abs()) => Some((bx, bf)),
            _ => Some((x, f)),
        };
    }
    match best {
        Some((x, f)) if f > incumbent.1 => (x, f),
        _ => incumbent,
    }
}

/// `points` uniform values over `[−bound, bound]`; a single point is `0`.
pub(crate) fn uniform_grid(bound: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| -bound + 2.0 * bound * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
