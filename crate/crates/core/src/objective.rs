//! Rate bookkeeping for the secure multicast design: per-user rates, the
//! sample-weighted eavesdropper leakage and its Jensen upper bound, the softmin
//! surrogate maximized by the optimizer, and the clipped secrecy rate used for
//! reporting.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{channel_entries, ArrayConfig, ChannelVector, PolarPosition, RotationState};
use crate::linalg::{norm_sqr, CMatrix, C64};

/// Transmit power, receiver noise and their ratio `γ = P_t / σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    tx_power: f64,
    noise_power: f64,
    gamma: f64,
}

impl LinkBudget {
    pub fn new(tx_power: f64, noise_power: f64) -> Result<Self> {
        if !(tx_power > 0.0 && tx_power.is_finite()) {
            return Err(invalid("tx_power", format!("{tx_power} is not > 0")));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(invalid("noise_power", format!("{noise_power} is not > 0")));
        }
        Ok(Self {
            tx_power,
            noise_power,
            gamma: tx_power / noise_power,
        })
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Legitimate users and the true eavesdropper position of one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRealization {
    pub users: Vec<PolarPosition>,
    pub eavesdropper: PolarPosition,
}

/// Channels for a fixed rotation state, together with the weighted leakage
/// covariance `S = Σ_m μ_m h_e(θ_m) h_e(θ_m)ᴴ`.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    pub user_channels: Vec<ChannelVector>,
    pub eav_channels: Vec<ChannelVector>,
    pub weights: Vec<f64>,
    pub leakage_covariance: CMatrix,
    pub beta_sm: f64,
}

impl ObjectiveContext {
    pub fn from_channels(
        user_channels: Vec<ChannelVector>,
        eav_channels: Vec<ChannelVector>,
        weights: Vec<f64>,
        beta_sm: f64,
    ) -> Self {
        assert_eq!(eav_channels.len(), weights.len(), "one weight per sampled channel");
        let n = user_channels
            .first()
            .or(eav_channels.first())
            .map_or(0, ChannelVector::len);
        let mut s = CMatrix::zeros(n, n);
        for (h, mu) in eav_channels.iter().zip(&weights) {
            s.add_outer(h.entries(), *mu);
        }
        Self {
            user_channels,
            eav_channels,
            weights,
            leakage_covariance: s,
            beta_sm,
        }
    }

    /// Synthesizes every channel at `rot`. `leakage_targets` are the sampled
    /// eavesdropper positions, weighted by `weights`.
    pub fn build(
        array: &ArrayConfig,
        rot: &RotationState,
        users: &[PolarPosition],
        leakage_targets: &[PolarPosition],
        weights: &[f64],
        beta_sm: f64,
    ) -> Self {
        let users = users
            .iter()
            .map(|u| ChannelVector(channel_entries(array, rot, u)))
            .collect();
        let eav = leakage_targets
            .iter()
            .map(|e| ChannelVector(channel_entries(array, rot, e)))
            .collect();
        Self::from_channels(users, eav, weights.to_vec(), beta_sm)
    }

    /// `wᴴ S w`.
    pub fn leakage_power(&self, w: &[C64]) -> f64 {
        let q = self.leakage_covariance.quadratic_form(w);
        debug_assert!(
            q.im.abs() <= 1e-12 * self.leakage_covariance.frobenius_norm() * norm_sqr(w) + 1e-300
        );
        q.re
    }

    /// Surrogate secrecy values `R_k − R̃_e`, one per user.
    pub fn surrogate_secrecy(&self, w: &[C64], lb: &LinkBudget) -> Vec<f64> {
        let leak = surrogate_eav_rate(w, self, lb);
        self.user_channels
            .iter()
            .map(|h| user_rate(w, h, lb) - leak)
            .collect()
    }
}

/// `log2(1 + γ |hᴴ w|²)`.
pub fn user_rate(w: &[C64], h: &ChannelVector, lb: &LinkBudget) -> f64 {
    (lb.gamma() * h.response(w).norm_sqr()).ln_1p() / std::f64::consts::LN_2
}

/// `Σ_m μ_m log2(1 + γ |h_e(θ_m)ᴴ w|²)`.
pub fn weighted_eav_rate(w: &[C64], ctx: &ObjectiveContext, lb: &LinkBudget) -> f64 {
    ctx.eav_channels
        .iter()
        .zip(&ctx.weights)
        .map(|(h, mu)| mu * user_rate(w, h, lb))
        .sum()
}

/// Jensen bound `log2(1 + γ wᴴ S w)` on [`weighted_eav_rate`].
pub fn surrogate_eav_rate(w: &[C64], ctx: &ObjectiveContext, lb: &LinkBudget) -> f64 {
    (lb.gamma() * ctx.leakage_power(w)).ln_1p() / std::f64::consts::LN_2
}

/// Smooth minimum `−(1/β) log Σ exp(−β c_k)`, shifted by `min c` for range.
pub fn softmin(values: &[f64], beta: f64) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail: f64 = values.iter().map(|c| (-beta * (c - lo)).exp()).sum();
    lo - tail.ln() / beta
}

/// Normalized softmin weights `ω_k`, summing to one.
pub fn softmin_weights(values: &[f64], beta: f64) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = values.iter().map(|c| (-beta * (c - lo)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

/// The smoothed surrogate `𝒢` at the context's rotation state.
pub fn softmin_objective(w: &[C64], ctx: &ObjectiveContext, lb: &LinkBudget) -> f64 {
    softmin(&ctx.surrogate_secrecy(w, lb), ctx.beta_sm)
}

/// Reported worst-user secrecy rate `[min_k R_k − R_e]₊` against the true
/// eavesdropper position.
pub fn evaluate_true_secrecy(
    w: &[C64],
    rot: &RotationState,
    array: &ArrayConfig,
    scene: &SceneRealization,
    lb: &LinkBudget,
) -> f64 {
    let eav = ChannelVector(channel_entries(array, rot, &scene.eavesdropper));
    let leak = user_rate(w, &eav, lb);
    let worst = scene
        .users
        .iter()
        .map(|u| user_rate(w, &ChannelVector(channel_entries(array, rot, u)), lb))
        .fold(f64::INFINITY, f64::min);
    (worst - leak).max(0.0)
}
