use crate::linalg::{distance, norm, C64};
use crate::objective::{softmin_objective, LinkBudget, ObjectiveContext};

use super::gradient::euclidean_grad_w;
use super::manifold::{real_inner, retract, riemannian_grad, transport};
use super::SolverSettings;

/// Result of the manifold search.
#[derive(Debug, Clone)]
pub struct RcgOutcome {
    pub w: Vec<C64>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

struct Line<'a> {
    ctx: &'a ObjectiveContext,
    lb: &'a LinkBudget,
    scale: f64,
}

impl Line<'_> {
    fn value(&self, v: &[C64]) -> f64 {
        let w: Vec<C64> = v.iter().map(|x| x * self.scale).collect();
        softmin_objective(&w, self.ctx, self.lb)
    }
}

/// Riemannian conjugate gradient ascent on `{|v_n| = 1}` for the smoothed
/// surrogate with channels frozen in `ctx`. Returns `w = v/√N_t`.
///
/// Polak-Ribière with a non-negativity clip; Armijo backtracking along the
/// retraction. When backtracking fails along the conjugate direction the
/// iteration retries along the gradient, and stops if that fails too.
pub fn solve_w(
    w0: &[C64],
    ctx: &ObjectiveContext,
    lb: &LinkBudget,
    settings: &SolverSettings,
) -> RcgOutcome {
    let n = w0.len();
    let sqrt_n = (n as f64).sqrt();
    let line = Line {
        ctx,
        lb,
        scale: 1.0 / sqrt_n,
    };
    let mut v: Vec<C64> = w0
        .iter()
        .map(|x| {
            let r = x.norm();
            if r > 0.0 {
                x / r
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    let mut f = line.value(&v);
    let mut egrad = euclidean_grad_w(&v, ctx, lb);
    let mut grad = riemannian_grad(&v, &egrad);
    let mut dir = grad.clone();
    let mut trace = vec![f];
    let mut iterations = 0;

    while iterations < settings.max_iter_inner {
        let grad_sq = real_inner(&grad, &grad);
        if grad_sq.sqrt() < 1e-10 {
            break;
        }
        let mut slope = 2.0 * real_inner(&egrad, &dir);
        if !(slope > 0.0) {
            dir = grad.clone();
            slope = 2.0 * real_inner(&egrad, &dir);
        }
        let mut step = armijo(&line, &v, f, &dir, slope, settings);
        if step.is_none() && distance(&dir, &grad) > 0.0 {
            dir = grad.clone();
            slope = 2.0 * real_inner(&egrad, &dir);
            step = armijo(&line, &v, f, &dir, slope, settings);
        }
        let Some((v_new, f_new)) = step else {
            break;
        };
        iterations += 1;
        let moved = distance(&v_new, &v);
        let egrad_new = euclidean_grad_w(&v_new, ctx, lb);
        let grad_new = riemannian_grad(&v_new, &egrad_new);
        let dir_t = transport(&v_new, &dir);
        let grad_t = transport(&v_new, &grad);
        let diff: Vec<C64> = grad_new.iter().zip(&grad_t).map(|(a, b)| a - b).collect();
        let kappa = (real_inner(&grad_new, &diff) / grad_sq).max(0.0);
        dir = grad_new
            .iter()
            .zip(&dir_t)
            .map(|(g, d)| g + d * kappa)
            .collect();
        v = v_new;
        f = f_new;
        egrad = egrad_new;
        grad = grad_new;
        trace.push(f);
        if moved <= settings.tol {
            break;
        }
    }

    RcgOutcome {
        w: v.iter().map(|x| x / sqrt_n).collect(),
        objective: f,
        iterations,
        trace,
    }
}

fn armijo(
    line: &Line<'_>,
    v: &[C64],
    f: f64,
    dir: &[C64],
    slope: f64,
    settings: &SolverSettings,
) -> Option<(Vec<C64>, f64)> {
    if !(slope > 0.0) {
        return None;
    }
    let mut step = settings.step_init / norm(dir);
    for _ in 0..=settings.max_backtracks {
        let trial: Vec<C64> = dir.iter().map(|d| d * step).collect();
        let v_try = retract(v, &trial);
        let f_try = line.value(&v_try);
        if f_try >= f + settings.armijo_c * step * slope && f_try > f {
            return Some((v_try, f_try));
        }
        step *= settings.armijo_shrink;
    }
    None
}
