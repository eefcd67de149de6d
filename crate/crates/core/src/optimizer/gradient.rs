use std::f64::consts::LN_2;

use crate::geometry::{channel_jet, RotationState};
use crate::linalg::{inner, C64};
use crate::objective::{softmin_weights, LinkBudget, ObjectiveContext};

use super::DesignProblem;

/// `R_k − R̃_e` from the scalar responses `ς_q = h_qᴴ w`.
pub(crate) fn secrecy_from_responses(
    users: &[C64],
    eav: &[C64],
    weights: &[f64],
    gamma: f64,
) -> Vec<f64> {
    let leak: f64 = eav.iter().zip(weights).map(|(s, mu)| mu * s.norm_sqr()).sum();
    let leak_rate = (gamma * leak).ln_1p() / LN_2;
    users
        .iter()
        .map(|s| (gamma * s.norm_sqr()).ln_1p() / LN_2 - leak_rate)
        .collect()
}

/// Chain rule from response derivatives to `∂𝒢/∂x` for one real variable:
/// `Σ_k ω_k ∂R_k − ∂R̃_e` with `∂R = 2γ Re{ς* ∂ς} / ((1 + γ|ς|²) ln 2)`.
pub(crate) struct ResponseChain {
    omega: Vec<f64>,
    user_scale: Vec<f64>,
    eav_scale: f64,
}

impl ResponseChain {
    pub(crate) fn new(users: &[C64], eav: &[C64], weights: &[f64], gamma: f64, beta: f64) -> Self {
        let values = secrecy_from_responses(users, eav, weights, gamma);
        let leak: f64 = eav.iter().zip(weights).map(|(s, mu)| mu * s.norm_sqr()).sum();
        Self {
            omega: softmin_weights(&values, beta),
            user_scale: users
                .iter()
                .map(|s| 2.0 * gamma / ((1.0 + gamma * s.norm_sqr()) * LN_2))
                .collect(),
            eav_scale: 2.0 * gamma / ((1.0 + gamma * leak) * LN_2),
        }
    }

    /// `users_dot[k] = Re{ς_k* ∂ς_k}`, `eav_dot[m] = Re{ς_m* ∂ς_m}`.
    pub(crate) fn combine(&self, users_dot: &[f64], eav_dot: &[f64], weights: &[f64]) -> f64 {
        let gain: f64 = self
            .omega
            .iter()
            .zip(&self.user_scale)
            .zip(users_dot)
            .map(|((o, s), d)| o * s * d)
            .sum();
        let leak: f64 = weights.iter().zip(eav_dot).map(|(mu, d)| mu * d).sum();
        gain - self.eav_scale * leak
    }
}

/// Wirtinger gradient `∂𝒢/∂v*` of the smoothed surrogate in the manifold
/// variable `v = √N_t w`.
pub fn euclidean_grad_w(v: &[C64], ctx: &ObjectiveContext, lb: &LinkBudget) -> Vec<C64> {
    let n = v.len() as f64;
    let g = lb.gamma() / n;
    let users: Vec<C64> = ctx.user_channels.iter().map(|h| h.response(v)).collect();
    let sv = ctx.leakage_covariance.mul_vec(v);
    let leak = inner(v, &sv).re;
    // Secrecy values in terms of w = v/√N_t.
    let values: Vec<f64> = users
        .iter()
        .map(|s| ((g * s.norm_sqr()).ln_1p() - (g * leak).ln_1p()) / LN_2)
        .collect();
    let omega = softmin_weights(&values, ctx.beta_sm);
    let mut out: Vec<C64> = sv.iter().map(|x| -x * (g / LN_2 / (1.0 + g * leak))).collect();
    for ((h, s), o) in ctx.user_channels.iter().zip(&users).zip(&omega) {
        let coef = *s * (o * g / LN_2 / (1.0 + g * s.norm_sqr()));
        for (acc, hn) in out.iter_mut().zip(h.entries()) {
            *acc += hn * coef;
        }
    }
    out
}

pub(super) fn grad_phi_arr(p: &DesignProblem, w: &[C64], rot: &RotationState, beta: f64) -> f64 {
    let response = |target| {
        let jet = channel_jet(&p.array, rot, target);
        let s = inner(&jet.h, w);
        let ds = inner(&jet.d_phi_arr, w);
        (s, (s.conj() * ds).re)
    };
    let (users, users_dot): (Vec<C64>, Vec<f64>) = p.scene.users.iter().map(response).unzip();
    let (eav, eav_dot): (Vec<C64>, Vec<f64>) = p.leakage_targets.iter().map(response).unzip();
    ResponseChain::new(&users, &eav, &p.weights, p.link.gamma(), beta).combine(
        &users_dot,
        &eav_dot,
        &p.weights,
    )
}
