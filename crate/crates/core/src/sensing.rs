//! Beam-sweep eavesdropper sensing: DFT probing, echo synthesis, maximum
//! likelihood direction estimation, the closed-form Cramér-Rao bound and the
//! Gaussian-weighted angular uncertainty region built from it.
//!
//! Sensing runs in a reference configuration with the array and every element
//! at zero rotation, so each element sees the pattern `G0 cos^{2p} θ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{positive_power, transmit_steering, ArrayConfig};
use crate::linalg::{inner, norm_sqr, CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingConfig {
    /// Number of DFT probing beams `L`.
    pub n_beams: usize,
    /// Watts.
    pub sensing_power: f64,
    /// Per-entry echo noise variance (watts).
    pub noise_power: f64,
    /// Radar cross section (m²).
    pub rcs: f64,
    /// Candidate directions for the estimator, strictly increasing.
    pub search_grid: Vec<f64>,
    /// Golden-section refinement around the best grid cell.
    pub refine: bool,
}

impl SensingConfig {
    /// `points` directions uniform in `sin θ` over (−1, 1).
    pub fn sine_uniform_grid(points: usize) -> Vec<f64> {
        (0..points)
            .map(|i| (-1.0 + (2 * i + 1) as f64 / points as f64).asin())
            .collect()
    }

    pub fn validate(&self, array: &ArrayConfig) -> Result<()> {
        if self.n_beams < array.n_tx {
            return Err(Error::TooFewBeams {
                beams: self.n_beams,
                n_tx: array.n_tx,
            });
        }
        for (name, v) in [
            ("sensing_power", self.sensing_power),
            ("noise_power_sensing", self.noise_power),
            ("rcs", self.rcs),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} is not > 0")));
            }
        }
        if self.search_grid.is_empty() {
            return Err(invalid("search_grid", "must not be empty"));
        }
        if self.search_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("search_grid", "must be strictly increasing"));
        }
        if self
            .search_grid
            .iter()
            .any(|t| !(*t > -PI / 2.0 && *t < PI / 2.0))
        {
            return Err(invalid("search_grid", "must lie inside (-π/2, π/2)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingOutcome {
    pub theta_hat: f64,
    /// Rad².
    pub crb: f64,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub sampled_angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SensingOutcome {
    /// Collapses the region to the point estimate alone.
    pub fn point_mass(theta_hat: f64, crb: f64) -> Self {
        let half = 3.0 * crb.sqrt();
        Self {
            theta_hat,
            crb,
            xi_lo: theta_hat - half,
            xi_hi: theta_hat + half,
            sampled_angles: vec![theta_hat],
            weights: vec![1.0],
        }
    }
}

/// Probing beams `a_t(θ_l)` with `θ_l = asin(−1 + (2l − 1)/L)`.
pub fn dft_codebook(n_beams: usize, n_tx: usize) -> Result<Vec<Vec<C64>>> {
    if n_beams < n_tx {
        return Err(Error::TooFewBeams {
            beams: n_beams,
            n_tx,
        });
    }
    Ok((1..=n_beams)
        .map(|l| {
            let s = -1.0 + (2 * l - 1) as f64 / n_beams as f64;
            transmit_steering(s.asin(), n_tx)
        })
        .collect())
}

/// `X_s = √P_s [v_1, …, v_L]` with unit probing symbols.
pub fn probing_matrix(codebook: &[Vec<C64>], sensing_power: f64) -> CMatrix {
    let n_tx = codebook.first().map_or(0, Vec::len);
    let mut x = CMatrix::zeros(n_tx, codebook.len());
    let amp = sensing_power.sqrt();
    for (l, beam) in codebook.iter().enumerate() {
        for (n, v) in beam.iter().enumerate() {
            x.set(n, l, v * amp);
        }
    }
    x
}

/// Effective transmit response `b(θ) = diag(√G_n(θ)) a_t(θ)` in the sensing
/// reference configuration.
pub fn sensing_response(theta: f64, cfg: &ArrayConfig) -> Vec<C64> {
    let amp = cfg.boresight_gain().sqrt() * positive_power(theta.cos(), cfg.directivity_p);
    cfg.tx_steering(theta).into_iter().map(|a| a * amp).collect()
}

/// `ḃ(θ)`: product rule over the gain diagonal and the steering phase.
pub fn sensing_response_derivative(theta: f64, cfg: &ArrayConfig) -> Vec<C64> {
    let (s, c) = theta.sin_cos();
    let p = cfg.directivity_p;
    let g0 = cfg.boresight_gain().sqrt();
    let amp = g0 * positive_power(c, p);
    let amp_dot = if p == 0.0 || c <= 0.0 {
        0.0
    } else {
        -g0 * p * positive_power(c, p - 1.0) * s
    };
    let slope = cfg.phase_slope();
    cfg.tx_steering(theta)
        .into_iter()
        .enumerate()
        .map(|(n, a)| a * C64::new(amp_dot, amp * slope * cfg.tx_index(n) * c))
        .collect()
}

/// `ȧ_r(θ)`.
pub fn receive_steering_derivative(theta: f64, cfg: &ArrayConfig) -> Vec<C64> {
    let c = theta.cos();
    let slope = cfg.phase_slope();
    cfg.rx_steering(theta)
        .into_iter()
        .enumerate()
        .map(|(n, a)| a * C64::new(0.0, slope * cfg.rx_index(n) * c))
        .collect()
}

/// Round-trip coefficient `√(λ²α / (64π³ r⁴)) · exp(j4πr/λ)`.
pub fn round_trip_gain(cfg: &ArrayConfig, rcs: f64, range: f64) -> C64 {
    let lambda = cfg.wavelength;
    let mag = (lambda * lambda * rcs / (64.0 * PI.powi(3) * range.powi(4))).sqrt();
    Complex64::from_polar(mag, 4.0 * PI * range / lambda)
}

/// One sensing frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Echoes {
    /// `N_r × L` received echoes.
    pub y: CMatrix,
    /// `N_t × L` probing matrix.
    pub x: CMatrix,
}

/// `Y_s = β_s a_r(θ) bᴴ(θ) X_s + N_s` with circularly-symmetric Gaussian noise
/// of variance `σ_s²` per entry.
pub fn simulate_echoes<R: Rng + ?Sized>(
    true_theta: f64,
    true_range: f64,
    scfg: &SensingConfig,
    acfg: &ArrayConfig,
    rng: &mut R,
) -> Result<Echoes> {
    let codebook = dft_codebook(scfg.n_beams, acfg.n_tx)?;
    let x = probing_matrix(&codebook, scfg.sensing_power);
    let beta = round_trip_gain(acfg, scfg.rcs, true_range);
    let a_r = acfg.rx_steering(true_theta);
    let b = sensing_response(true_theta, acfg);
    // bᴴ X_s, one scalar per beam.
    let bx: Vec<C64> = (0..scfg.n_beams)
        .map(|l| {
            b.iter()
                .enumerate()
                .map(|(n, bn)| bn.conj() * x.get(n, l))
                .sum()
        })
        .collect();
    let sigma = (scfg.noise_power / 2.0).sqrt();
    let mut y = CMatrix::zeros(acfg.n_rx, scfg.n_beams);
    for (r, ar) in a_r.iter().enumerate() {
        for (l, bxl) in bx.iter().enumerate() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            y.set(r, l, beta * ar * bxl + C64::new(re, im) * sigma);
        }
    }
    Ok(Echoes { y, x })
}

/// Precomputed sufficient statistics of one frame for the estimator.
struct MleStatistic<'a> {
    acfg: &'a ArrayConfig,
    /// `Y Xᴴ`, `N_r × N_t`.
    yx: CMatrix,
    /// `X Xᴴ`, `N_t × N_t`.
    xx: CMatrix,
}

impl MleStatistic<'_> {
    /// `|a_rᴴ Y Xᴴ b|² / (bᴴ X Xᴴ b)`, or `None` where `b` vanishes.
    fn eval(&self, theta: f64) -> Option<f64> {
        let b = sensing_response(theta, self.acfg);
        if norm_sqr(&b) == 0.0 {
            return None;
        }
        let den = self.xx.quadratic_form(&b).re;
        if !(den > 0.0) {
            return None;
        }
        let a_r = self.acfg.rx_steering(theta);
        let num = inner(&a_r, &self.yx.mul_vec(&b)).norm_sqr();
        Some(num / den)
    }
}

/// Maximum likelihood direction estimate over `scfg.search_grid`, optionally
/// refined by golden-section search over the cell around the grid winner.
/// Ties go to the smaller angle; grid points with a vanishing sensing response
/// are skipped.
pub fn mle_estimate(echoes: &Echoes, scfg: &SensingConfig, acfg: &ArrayConfig) -> Result<f64> {
    let grid = &scfg.search_grid;
    if grid.is_empty() {
        return Err(invalid("search_grid", "must not be empty"));
    }
    let stat = MleStatistic {
        acfg,
        yx: echoes.y.mul_adjoint(&echoes.x),
        xx: echoes.x.mul_adjoint(&echoes.x),
    };
    let mut best: Option<(usize, f64)> = None;
    for (i, &theta) in grid.iter().enumerate() {
        if let Some(v) = stat.eval(theta) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    let (i, value) = best.ok_or_else(|| invalid("search_grid", "sensing response vanishes on every grid point"))?;
    let theta = grid[i];
    if !scfg.refine || grid.len() < 2 {
        return Ok(theta);
    }
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let f = |t: f64| stat.eval(t).unwrap_or(f64::NEG_INFINITY);
    let (t_ref, v_ref) = golden_section_max(f, lo, hi, 1e-12);
    Ok(if v_ref > value { t_ref } else { theta })
}

/// Maximizes a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Closed-form Cramér-Rao bound on the direction (rad²), assuming the DFT
/// probing covariance `(1/L) X Xᴴ = (P_s/N_t) I`.
pub fn crb(theta: f64, range: f64, scfg: &SensingConfig, acfg: &ArrayConfig) -> Result<f64> {
    let b = sensing_response(theta, acfg);
    let b_dot = sensing_response_derivative(theta, acfg);
    let b_sq = norm_sqr(&b);
    if b_sq == 0.0 {
        return Err(Error::DegenerateResponse { theta });
    }
    let a_r = acfg.rx_steering(theta);
    let a_dot = receive_steering_derivative(theta, acfg);
    let a_ad = inner(&a_r, &a_dot);
    let b_bd = inner(&b, &b_dot);
    let bd_b = inner(&b_dot, &b);
    let cross = (a_ad * b_bd).re;
    let coupling = (a_ad * b_sq + bd_b).norm_sqr() / b_sq;
    let info = norm_sqr(&a_dot) * b_sq + norm_sqr(&b_dot) + 2.0 * cross - coupling;
    let beta = round_trip_gain(acfg, scfg.rcs, range);
    let scale = 2.0 * scfg.n_beams as f64 * scfg.sensing_power * beta.norm_sqr() / acfg.n_tx as f64;
    let value = scfg.noise_power / (scale * info);
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::DegenerateResponse { theta });
    }
    Ok(value)
}

/// `±3√CRB` interval around the estimate, sampled at `m` uniform angles with
/// normalized Gaussian weights of variance `crb_value`.
pub fn uncertainty_region(theta_hat: f64, crb_value: f64, m: usize) -> Result<SensingOutcome> {
    if m < 2 {
        return Err(invalid("n_samples", format!("need at least 2 samples, got {m}")));
    }
    if !(crb_value > 0.0 && crb_value.is_finite()) {
        return Err(invalid("crb", format!("{crb_value} is not > 0")));
    }
    let half = 3.0 * crb_value.sqrt();
    let xi_lo = theta_hat - half;
    let xi_hi = theta_hat + half;
    let sampled_angles: Vec<f64> = (0..m)
        .map(|i| xi_lo + i as f64 / (m - 1) as f64 * (xi_hi - xi_lo))
        .collect();
    let logits: Vec<f64> = sampled_angles
        .iter()
        .map(|t| -(t - theta_hat).powi(2) / (2.0 * crb_value))
        .collect();
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(SensingOutcome {
        theta_hat,
        crb: crb_value,
        xi_lo,
        xi_hi,
        sampled_angles,
        weights: raw.into_iter().map(|r| r / total).collect(),
    })
}
