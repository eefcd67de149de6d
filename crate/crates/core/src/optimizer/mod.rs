//! Alternating optimization of the analog beamformer, the array rotation and
//! the element orientations for the smoothed worst-user secrecy surrogate.
//!
//! Each block update is monotone in the surrogate at a fixed smoothing factor:
//!
//! * [`solve_w`]: Riemannian conjugate gradient (Polak-Ribière+, Armijo) on the
//!   complex circle manifold.
//! * [`solve_phi_arr`]: projected gradient ascent on `[−φ_max, φ_max]`, or a
//!   grid enumeration for the exhaustive-search benchmark.
//! * [`solve_varphi`]: greedy coordinate grid search followed by box-projected
//!   gradient ascent.
//!
//! [`ao_solve`] cycles the three and grows the smoothing factor geometrically.

mod ao;
mod beamformer;
mod gradient;
pub mod manifold;
mod orientation;
mod rotation;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use ao::{ao_solve, AoIterate, AoOutcome};
pub use beamformer::{solve_w, RcgOutcome};
pub use gradient::euclidean_grad_w;
pub use manifold::{retract, riemannian_grad, transport};
pub use orientation::solve_varphi;
pub use rotation::{exhaustive_phi_arr, solve_phi_arr};

use crate::error::{invalid, Error, Result};
use crate::geometry::{channel_entries, ArrayConfig, ChannelVector, PolarPosition, RotationState};
use crate::linalg::C64;
use crate::objective::{softmin, LinkBudget, ObjectiveContext, SceneRealization};
use crate::sensing::SensingOutcome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter_inner: usize,
    pub max_iter_ao: usize,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub max_backtracks: usize,
    pub beta_sm_init: f64,
    pub beta_sm_growth: f64,
    pub beta_sm_max: f64,
    /// Stage-1 grid size `N_g` of the orientation search.
    pub grid_points: usize,
    /// Initial Armijo trial step of the manifold search, in units of the
    /// search-direction norm.
    pub step_init: f64,
    /// Extrapolate along each pass's displacement after the three block
    /// updates (accepted only on strict improvement).
    pub extrapolate: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter_inner: 200,
            max_iter_ao: 30,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            max_backtracks: 30,
            beta_sm_init: 5.0,
            beta_sm_growth: 1.5,
            beta_sm_max: 1e4,
            grid_points: 15,
            step_init: 1.0,
            extrapolate: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("armijo_c", self.armijo_c),
            ("beta_sm_init", self.beta_sm_init),
            ("beta_sm_max", self.beta_sm_max),
            ("step_init", self.step_init),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} is not > 0")));
            }
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return Err(invalid("armijo_shrink", "must lie in (0, 1)"));
        }
        if !(self.beta_sm_growth > 1.0) {
            return Err(invalid("beta_sm_growth", "must exceed 1"));
        }
        if self.max_iter_inner == 0 || self.max_iter_ao == 0 || self.grid_points == 0 {
            return Err(invalid("max_iter", "iteration counts and grid size must be positive"));
        }
        Ok(())
    }
}

/// Decision variables of the design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformingSolution {
    pub w: Vec<C64>,
    pub phi_arr: f64,
    pub varphi: Vec<f64>,
}

impl BeamformingSolution {
    pub fn rotation(&self) -> RotationState {
        RotationState {
            phi_arr: self.phi_arr,
            varphi: self.varphi.clone(),
        }
    }

    /// Largest `| |w_n|√N_t − 1 |`.
    pub fn modulus_error(&self) -> f64 {
        let s = (self.w.len() as f64).sqrt();
        self.w
            .iter()
            .map(|x| (x.norm() * s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_feasible(&self, array: &ArrayConfig) -> Result<()> {
        if self.w.len() != array.n_tx {
            return Err(Error::Infeasible(format!(
                "beamformer has {} entries, array has {}",
                self.w.len(),
                array.n_tx
            )));
        }
        let err = self.modulus_error();
        if !(err <= 1e-9) {
            return Err(Error::Infeasible(format!(
                "constant-modulus constraint |w_n| = 1/sqrt(N_t) violated by {err:e}"
            )));
        }
        self.rotation().check_feasible(array)
    }
}

/// How the array-level rotation block is updated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrayRotationMode {
    Frozen,
    Gradient,
    /// Uniform grid enumeration with this many points over `[−φ_max, φ_max]`.
    Exhaustive(usize),
}

/// Which blocks the alternating optimizer may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMask {
    pub array_rotation: ArrayRotationMode,
    pub element_rotation: bool,
}

impl BlockMask {
    pub const ALL: BlockMask = BlockMask {
        array_rotation: ArrayRotationMode::Gradient,
        element_rotation: true,
    };
}

/// One design instance: geometry, users, sampled eavesdropper directions with
/// their weights, and the link budget.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    pub array: ArrayConfig,
    pub scene: SceneRealization,
    pub leakage_targets: Vec<PolarPosition>,
    pub weights: Vec<f64>,
    pub link: LinkBudget,
}

impl DesignProblem {
    /// Leakage is evaluated at the eavesdropper's (known) range along each
    /// sampled direction of `sensing`.
    pub fn new(
        array: ArrayConfig,
        scene: SceneRealization,
        sensing: &SensingOutcome,
        link: LinkBudget,
    ) -> Self {
        let range = scene.eavesdropper.range;
        let leakage_targets = sensing
            .sampled_angles
            .iter()
            .map(|&azimuth| PolarPosition { range, azimuth })
            .collect();
        Self {
            array,
            scene,
            leakage_targets,
            weights: sensing.weights.clone(),
            link,
        }
    }

    pub fn n_tx(&self) -> usize {
        self.array.n_tx
    }

    pub fn context(&self, rot: &RotationState, beta_sm: f64) -> ObjectiveContext {
        ObjectiveContext::build(
            &self.array,
            rot,
            &self.scene.users,
            &self.leakage_targets,
            &self.weights,
            beta_sm,
        )
    }

    /// Surrogate secrecy values `R_k − R̃_e` at `(w, rot)`.
    pub fn secrecy_values(&self, w: &[C64], rot: &RotationState) -> Vec<f64> {
        let users: Vec<C64> = self
            .scene
            .users
            .iter()
            .map(|u| ChannelVector(channel_entries(&self.array, rot, u)).response(w))
            .collect();
        let eav: Vec<C64> = self
            .leakage_targets
            .iter()
            .map(|e| ChannelVector(channel_entries(&self.array, rot, e)).response(w))
            .collect();
        gradient::secrecy_from_responses(&users, &eav, &self.weights, self.link.gamma())
    }

    /// Smoothed surrogate `𝒢(w, φ_arr, φ)`.
    pub fn objective(&self, w: &[C64], rot: &RotationState, beta_sm: f64) -> f64 {
        softmin(&self.secrecy_values(w, rot), beta_sm)
    }

    /// Unsmoothed surrogate `min_k (R_k − R̃_e)`.
    pub fn surrogate_min(&self, w: &[C64], rot: &RotationState) -> f64 {
        self.secrecy_values(w, rot)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// `∂𝒢/∂φ_arr`.
    pub fn grad_phi_arr(&self, w: &[C64], rot: &RotationState, beta_sm: f64) -> f64 {
        gradient::grad_phi_arr(self, w, rot, beta_sm)
    }

    /// `∂𝒢/∂φ_n` for every element.
    pub fn grad_varphi(&self, w: &[C64], rot: &RotationState, beta_sm: f64) -> Vec<f64> {
        orientation::LinkTable::new(self, rot.phi_arr).gradient(w, &rot.varphi, beta_sm)
    }

    /// Deterministic feasible start: zero rotations and the phase profile of
    /// the mean user channel.
    pub fn initial_solution(&self) -> BeamformingSolution {
        let rot = RotationState::zeros(self.n_tx());
        let mut mean = vec![C64::new(0.0, 0.0); self.n_tx()];
        for u in &self.scene.users {
            for (acc, h) in mean.iter_mut().zip(channel_entries(&self.array, &rot, u)) {
                *acc += h;
            }
        }
        let amp = 1.0 / (self.n_tx() as f64).sqrt();
        let w = mean
            .iter()
            .map(|h| {
                if h.norm() > 0.0 {
                    Complex64::from_polar(amp, h.arg())
                } else {
                    C64::new(amp, 0.0)
                }
            })
            .collect();
        BeamformingSolution {
            w,
            phi_arr: rot.phi_arr,
            varphi: rot.varphi,
        }
    }
}
