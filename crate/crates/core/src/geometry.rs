//! Geometry of a rotatable array with rotatable elements, and line-of-sight
//! channel synthesis.
//!
//! The transmit ULA sits on the x-axis centred at the origin with broadside
//! along +y. Azimuths are measured from +y toward +x. An array-level rotation
//! `phi_arr` turns the whole platform; each element additionally turns its own
//! boresight by `varphi[n]` in the rotated frame. The element power pattern is
//! `G0 · [cos θ]₊^{2p}` with `G0 = 2(2p + 1)`, evaluated with the exact
//! element-to-target direction, while propagation phase follows the far-field
//! steering vector.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{inner, C64};

/// Gain floor used when a beam pattern probe sees an all-zero channel.
pub const GAIN_FLOOR_DB: f64 = -200.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Meters.
    pub wavelength: f64,
    /// Inter-element spacing in meters.
    pub spacing: f64,
    pub directivity_p: f64,
    /// Array-level rotation limit (radians).
    pub phi_arr_max: f64,
    /// Element-level rotation limit (radians), at most π/2.
    pub varphi_max: f64,
}

impl ArrayConfig {
    /// Half-wavelength spaced arrays.
    pub fn new(
        n_tx: usize,
        n_rx: usize,
        wavelength: f64,
        directivity_p: f64,
        phi_arr_max: f64,
        varphi_max: f64,
    ) -> Result<Self> {
        let cfg = Self {
            n_tx,
            n_rx,
            wavelength,
            spacing: wavelength / 2.0,
            directivity_p,
            phi_arr_max,
            varphi_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 {
            return Err(invalid("n_tx", "must be positive"));
        }
        if self.n_rx == 0 {
            return Err(invalid("n_rx", "must be positive"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(invalid("wavelength", format!("{} is not > 0", self.wavelength)));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(invalid("spacing", format!("{} is not > 0", self.spacing)));
        }
        if !(self.directivity_p >= 0.0 && self.directivity_p.is_finite()) {
            return Err(invalid("directivity_p", "must be finite and >= 0"));
        }
        if !(self.phi_arr_max >= 0.0 && self.phi_arr_max.is_finite()) {
            return Err(invalid("phi_arr_max", "must be finite and >= 0"));
        }
        if !(0.0..=PI / 2.0).contains(&self.varphi_max) {
            return Err(invalid("varphi_max", "must lie in [0, π/2]"));
        }
        Ok(())
    }

    /// `G0 = 2(2p + 1)`.
    pub fn boresight_gain(&self) -> f64 {
        2.0 * (2.0 * self.directivity_p + 1.0)
    }

    /// Phase slope `2π d / λ`, equal to π at half-wavelength spacing.
    pub fn phase_slope(&self) -> f64 {
        2.0 * PI * self.spacing / self.wavelength
    }

    pub fn tx_index(&self, n: usize) -> f64 {
        centered_index(n, self.n_tx)
    }

    pub fn rx_index(&self, n: usize) -> f64 {
        centered_index(n, self.n_rx)
    }

    pub fn tx_steering(&self, relative_angle: f64) -> Vec<C64> {
        steering(relative_angle, self.n_tx, self.phase_slope())
    }

    pub fn rx_steering(&self, angle: f64) -> Vec<C64> {
        steering(angle, self.n_rx, self.phase_slope())
    }
}

/// Normalised position index `m_n = n − (N + 1)/2` for 1-based `n`, here
/// taking the 0-based index.
pub fn centered_index(n: usize, count: usize) -> f64 {
    n as f64 - (count as f64 - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPosition {
    pub range: f64,
    pub azimuth: f64,
}

impl PolarPosition {
    pub fn new(range: f64, azimuth: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(invalid("range", format!("{range} is not > 0")));
        }
        if !(azimuth > -PI / 2.0 && azimuth < PI / 2.0) {
            return Err(invalid("azimuth", format!("{azimuth} outside (-π/2, π/2)")));
        }
        Ok(Self { range, azimuth })
    }

    pub fn cartesian(&self) -> [f64; 2] {
        [self.range * self.azimuth.sin(), self.range * self.azimuth.cos()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationState {
    pub phi_arr: f64,
    pub varphi: Vec<f64>,
}

impl RotationState {
    pub fn zeros(n_tx: usize) -> Self {
        Self {
            phi_arr: 0.0,
            varphi: vec![0.0; n_tx],
        }
    }

    pub fn check_feasible(&self, cfg: &ArrayConfig) -> Result<()> {
        if self.varphi.len() != cfg.n_tx {
            return Err(Error::Infeasible(format!(
                "orientation vector has {} entries, array has {}",
                self.varphi.len(),
                cfg.n_tx
            )));
        }
        if !(self.phi_arr.abs() <= cfg.phi_arr_max) {
            return Err(Error::Infeasible(format!(
                "array rotation |{}| exceeds phi_arr_max = {}",
                self.phi_arr, cfg.phi_arr_max
            )));
        }
        if let Some((n, v)) = self
            .varphi
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= cfg.varphi_max))
        {
            return Err(Error::Infeasible(format!(
                "element {n} orientation |{v}| exceeds varphi_max = {}",
                cfg.varphi_max
            )));
        }
        Ok(())
    }

    /// Clamps every variable into its box.
    pub fn clamp_into(&mut self, cfg: &ArrayConfig) {
        self.phi_arr = self.phi_arr.clamp(-cfg.phi_arr_max, cfg.phi_arr_max);
        for v in &mut self.varphi {
            *v = v.clamp(-cfg.varphi_max, cfg.varphi_max);
        }
    }
}

/// Channel toward one position: entry `n` is the coefficient from transmit
/// element `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(pub Vec<C64>);

impl ChannelVector {
    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `hᴴ w`.
    pub fn response(&self, w: &[C64]) -> C64 {
        inner(&self.0, w)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }
}

/// `R(φ) = [[cos φ, sin φ], [−sin φ, cos φ]]`.
pub fn rotation_matrix(phi_arr: f64) -> [[f64; 2]; 2] {
    let (s, c) = phi_arr.sin_cos();
    [[c, s], [-s, c]]
}

fn rotation_derivative(phi_arr: f64) -> [[f64; 2]; 2] {
    let (s, c) = phi_arr.sin_cos();
    [[-s, c], [-c, -s]]
}

fn apply(m: &[[f64; 2]; 2], x: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * x[0] + m[0][1] * x[1],
        m[1][0] * x[0] + m[1][1] * x[1],
    ]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn element_positions(cfg: &ArrayConfig, phi_arr: f64) -> Vec<[f64; 2]> {
    let r = rotation_matrix(phi_arr);
    (0..cfg.n_tx)
        .map(|n| apply(&r, [cfg.tx_index(n) * cfg.spacing, 0.0]))
        .collect()
}

/// Global boresight of element `n`: `R(φ_arr) [sin φ_n, cos φ_n]ᵀ`, which
/// equals `[sin(φ_n + φ_arr), cos(φ_n + φ_arr)]ᵀ`.
pub fn boresight(phi_arr: f64, varphi_n: f64) -> [f64; 2] {
    let (s, c) = (varphi_n + phi_arr).sin_cos();
    [s, c]
}

fn steering(angle: f64, count: usize, slope: f64) -> Vec<C64> {
    let scale = 1.0 / (count as f64).sqrt();
    let sin = angle.sin();
    (0..count)
        .map(|n| Complex64::from_polar(scale, slope * centered_index(n, count) * sin))
        .collect()
}

/// Half-wavelength transmit steering vector `(1/√N) exp(jπ m_n sin ψ̃)`.
pub fn transmit_steering(relative_angle: f64, n_tx: usize) -> Vec<C64> {
    steering(relative_angle, n_tx, PI)
}

/// Half-wavelength receive steering vector; the receive array does not rotate.
pub fn receive_steering(angle: f64, n_rx: usize) -> Vec<C64> {
    steering(angle, n_rx, PI)
}

/// `[x]₊^e` with the convention `[x]₊^0 = 1` only for `x > 0`.
#[inline]
pub(crate) fn positive_power(x: f64, e: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// `G0 [boresightᵀ direction]₊^{2p}`.
pub fn element_gain(boresight: [f64; 2], direction: [f64; 2], p: f64, g0: f64) -> f64 {
    g0 * positive_power(dot2(boresight, direction), 2.0 * p)
}

/// Complex free-space path gain `λ/(4πr) · exp(j2πr/λ)`.
pub fn path_gain(wavelength: f64, range: f64) -> C64 {
    Complex64::from_polar(
        wavelength / (4.0 * PI * range),
        2.0 * PI * range / wavelength,
    )
}

/// Channel plus its partial derivatives with respect to the rotation angles.
#[derive(Debug, Clone)]
pub struct ChannelJet {
    pub h: Vec<C64>,
    /// `∂h/∂φ_arr`.
    pub d_phi_arr: Vec<C64>,
    /// Entry `n` is `∂h_n/∂φ_n`; the channel's other entries do not depend on
    /// `φ_n`.
    pub d_varphi: Vec<C64>,
}

/// Exact channel toward `target`. Fails only for a non-positive range.
pub fn channel_vector(
    cfg: &ArrayConfig,
    rot: &RotationState,
    target: &PolarPosition,
) -> Result<ChannelVector> {
    if !(target.range > 0.0) {
        return Err(invalid("range", format!("{} is not > 0", target.range)));
    }
    Ok(ChannelVector(channel_entries(cfg, rot, target)))
}

pub(crate) fn channel_entries(
    cfg: &ArrayConfig,
    rot: &RotationState,
    target: &PolarPosition,
) -> Vec<C64> {
    let beta = path_gain(cfg.wavelength, target.range);
    let q = target.cartesian();
    let (s, c) = rot.phi_arr.sin_cos();
    let amp0 = cfg.boresight_gain().sqrt();
    let p = cfg.directivity_p;
    let slope = cfg.phase_slope() * (target.azimuth - rot.phi_arr).sin();
    let scale = beta / (cfg.n_tx as f64).sqrt();
    (0..cfg.n_tx)
        .map(|n| {
            let m = cfg.tx_index(n);
            let x = m * cfg.spacing;
            let diff = [q[0] - c * x, q[1] + s * x];
            let r = (diff[0] * diff[0] + diff[1] * diff[1]).sqrt();
            let f = boresight(rot.phi_arr, rot.varphi[n]);
            let proj = (f[0] * diff[0] + f[1] * diff[1]) / r;
            let amp = amp0 * positive_power(proj, p);
            if amp == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                scale * Complex64::from_polar(amp, slope * m)
            }
        })
        .collect()
}

/// Channel and analytic rotation derivatives. The derivative of the clipped
/// projection is zero wherever the projection is not strictly positive.
pub fn channel_jet(cfg: &ArrayConfig, rot: &RotationState, target: &PolarPosition) -> ChannelJet {
    let beta = path_gain(cfg.wavelength, target.range);
    let q = target.cartesian();
    let rm = rotation_matrix(rot.phi_arr);
    let rd = rotation_derivative(rot.phi_arr);
    let amp0 = cfg.boresight_gain().sqrt();
    let p = cfg.directivity_p;
    let rel = target.azimuth - rot.phi_arr;
    let (sin_rel, cos_rel) = rel.sin_cos();
    let slope = cfg.phase_slope();
    let scale = beta / (cfg.n_tx as f64).sqrt();

    let n_tx = cfg.n_tx;
    let mut h = Vec::with_capacity(n_tx);
    let mut d_phi_arr = Vec::with_capacity(n_tx);
    let mut d_varphi = Vec::with_capacity(n_tx);
    let zero = C64::new(0.0, 0.0);
    for n in 0..n_tx {
        let m = cfg.tx_index(n);
        let base = [m * cfg.spacing, 0.0];
        let pos = apply(&rm, base);
        let diff = [q[0] - pos[0], q[1] - pos[1]];
        let r = dot2(diff, diff).sqrt();
        let u = [diff[0] / r, diff[1] / r];
        let (sf, cf) = (rot.varphi[n] + rot.phi_arr).sin_cos();
        let f = [sf, cf];
        // ∂f̄/∂φ_arr = ∂f̄/∂φ_n = R ḟ_n = [cos, −sin] of the global pointing angle.
        let f_dot = [cf, -sf];
        let proj = dot2(f, u);
        let a = scale * Complex64::from_polar(1.0, slope * m * sin_rel);
        if proj <= 0.0 {
            h.push(zero);
            d_phi_arr.push(zero);
            d_varphi.push(zero);
            continue;
        }
        let amp = amp0 * positive_power(proj, p);
        let amp_dot = if p == 0.0 {
            0.0
        } else {
            amp0 * p * positive_power(proj, p - 1.0)
        };
        // ζ = ḟᵀu − f̄ᵀ(I − uuᵀ) Ṙ c̄ / r
        let rc = apply(&rd, base);
        let f_perp = dot2(f, rc) - proj * dot2(u, rc);
        let zeta = dot2(f_dot, u) - f_perp / r;
        let phase_dot = C64::new(0.0, -slope * m * cos_rel);
        h.push(a * amp);
        d_phi_arr.push(a * (amp_dot * zeta + amp * phase_dot));
        d_varphi.push(a * (amp_dot * dot2(f_dot, u)));
    }
    ChannelJet {
        h,
        d_phi_arr,
        d_varphi,
    }
}

/// Beam gain `10 log10 |hᴴ w|²` at the probe position, floored at
/// [`GAIN_FLOOR_DB`].
pub fn beam_gain(
    cfg: &ArrayConfig,
    rot: &RotationState,
    w: &[C64],
    eval_angle: f64,
    eval_range: f64,
) -> f64 {
    let target = PolarPosition {
        range: eval_range,
        azimuth: eval_angle,
    };
    let h = channel_entries(cfg, rot, &target);
    let power = inner(&h, w).norm_sqr();
    if power > 0.0 {
        (10.0 * power.log10()).max(GAIN_FLOOR_DB)
    } else {
        GAIN_FLOOR_DB
    }
}
