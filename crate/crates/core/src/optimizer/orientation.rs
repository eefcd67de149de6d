use num_complex::Complex64;

use crate::geometry::{element_positions, path_gain, positive_power};
use crate::linalg::C64;
use crate::objective::softmin;

use super::gradient::{secrecy_from_responses, ResponseChain};
use super::rotation::uniform_grid;
use super::{BeamformingSolution, DesignProblem, SolverSettings};

/// Per-link, per-element channel factors that do not depend on the element
/// orientations, for a fixed array rotation. Changing `φ_n` only rescales
/// column `n` by `[f̄_nᵀ u_{q,n}]₊^p`.
pub(crate) struct LinkTable<'a> {
    problem: &'a DesignProblem,
    phi_arr: f64,
    n_tx: usize,
    n_users: usize,
    /// `β_q/√N_t · √G0 · e^{jπ m_n sin(ψ_q − φ_arr)}`, row-major by link.
    base: Vec<C64>,
    /// Unit direction element → target, row-major by link.
    dir: Vec<[f64; 2]>,
}

impl<'a> LinkTable<'a> {
    pub(crate) fn new(problem: &'a DesignProblem, phi_arr: f64) -> Self {
        let array = &problem.array;
        let n_tx = array.n_tx;
        let positions = element_positions(array, phi_arr);
        let amp0 = array.boresight_gain().sqrt();
        let targets = problem.scene.users.iter().chain(&problem.leakage_targets);
        let mut base = Vec::new();
        let mut dir = Vec::new();
        for t in targets {
            let scale = path_gain(array.wavelength, t.range) * (amp0 / (n_tx as f64).sqrt());
            let q = t.cartesian();
            let slope = array.phase_slope() * (t.azimuth - phi_arr).sin();
            for (n, c) in positions.iter().enumerate() {
                base.push(scale * Complex64::from_polar(1.0, slope * array.tx_index(n)));
                let d = [q[0] - c[0], q[1] - c[1]];
                let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
                dir.push([d[0] / r, d[1] / r]);
            }
        }
        Self {
            problem,
            phi_arr,
            n_tx,
            n_users: problem.scene.users.len(),
            base,
            dir,
        }
    }

    fn n_links(&self) -> usize {
        self.base.len() / self.n_tx
    }

    fn projection(&self, idx: usize, varphi_n: f64) -> f64 {
        let (s, c) = (varphi_n + self.phi_arr).sin_cos();
        let u = self.dir[idx];
        s * u[0] + c * u[1]
    }

    fn entry(&self, q: usize, n: usize, varphi_n: f64) -> C64 {
        let idx = q * self.n_tx + n;
        let x = self.projection(idx, varphi_n);
        self.base[idx] * positive_power(x, self.problem.array.directivity_p)
    }

    /// `ς_q = h_qᴴ w` for users followed by sampled eavesdropper directions.
    fn responses(&self, w: &[C64], varphi: &[f64]) -> Vec<C64> {
        (0..self.n_links())
            .map(|q| {
                (0..self.n_tx)
                    .map(|n| self.entry(q, n, varphi[n]).conj() * w[n])
                    .sum()
            })
            .collect()
    }

    fn value_from(&self, resp: &[C64], beta: f64) -> f64 {
        let (users, eav) = resp.split_at(self.n_users);
        softmin(
            &secrecy_from_responses(users, eav, &self.problem.weights, self.problem.link.gamma()),
            beta,
        )
    }

    pub(crate) fn value(&self, w: &[C64], varphi: &[f64], beta: f64) -> f64 {
        self.value_from(&self.responses(w, varphi), beta)
    }

    pub(crate) fn gradient(&self, w: &[C64], varphi: &[f64], beta: f64) -> Vec<f64> {
        let p = self.problem.array.directivity_p;
        let resp = self.responses(w, varphi);
        let (users, eav) = resp.split_at(self.n_users);
        let weights = &self.problem.weights;
        let chain = ResponseChain::new(users, eav, weights, self.problem.link.gamma(), beta);
        let mut out = vec![0.0; self.n_tx];
        if p == 0.0 {
            return out;
        }
        let mut dots = vec![0.0; self.n_links()];
        for (n, g) in out.iter_mut().enumerate() {
            let (s, c) = (varphi[n] + self.phi_arr).sin_cos();
            for (q, d) in dots.iter_mut().enumerate() {
                let idx = q * self.n_tx + n;
                let u = self.dir[idx];
                let x = s * u[0] + c * u[1];
                *d = if x > 0.0 {
                    let dx = c * u[0] - s * u[1];
                    let dh = self.base[idx] * (p * positive_power(x, p - 1.0) * dx);
                    (resp[q].conj() * dh.conj() * w[n]).re
                } else {
                    0.0
                };
            }
            let (ud, ed) = dots.split_at(self.n_users);
            *g = chain.combine(ud, ed, weights);
        }
        out
    }
}

/// Search-based projected gradient ascent over the element orientations with
/// `w` and `φ_arr` fixed.
///
/// Stage 1 sweeps the elements once, moving each to the best of `N_g` grid
/// values when that strictly improves the objective (ties prefer the smallest
/// `|φ_n|`). Stage 2 runs box-projected gradient ascent with Armijo
/// backtracking from there.
pub fn solve_varphi(
    problem: &DesignProblem,
    sol: &BeamformingSolution,
    beta_sm: f64,
    settings: &SolverSettings,
) -> (Vec<f64>, f64) {
    let bound = problem.array.varphi_max;
    let table = LinkTable::new(problem, sol.phi_arr);
    let w = &sol.w;
    let mut varphi: Vec<f64> = sol.varphi.iter().map(|v| v.clamp(-bound, bound)).collect();
    let mut resp = table.responses(w, &varphi);
    let mut f = table.value_from(&resp, beta_sm);
    if bound == 0.0 || problem.array.directivity_p == 0.0 {
        return (varphi, f);
    }

    let grid = uniform_grid(bound, settings.grid_points);
    let mut trial = resp.clone();
    for n in 0..table.n_tx {
        let old: Vec<C64> = (0..table.n_links())
            .map(|q| table.entry(q, n, varphi[n]).conj() * w[n])
            .collect();
        let mut best: Option<(f64, f64, Vec<C64>)> = None;
        for &x in &grid {
            for (q, t) in trial.iter_mut().enumerate() {
                *t = resp[q] - old[q] + table.entry(q, n, x).conj() * w[n];
            }
            let fx = table.value_from(&trial, beta_sm);
            let better = match &best {
                None => true,
                Some((bx, bf, _)) => fx > *bf || (fx == *bf && x.abs() < bx.abs()),
            };
            if better {
                best = Some((x, fx, trial.clone()));
            }
        }
        if let Some((x, fx, r)) = best {
            if fx > f {
                varphi[n] = x;
                f = fx;
                resp = r;
            }
        }
    }

    let mut last_step: Option<f64> = None;
    for _ in 0..settings.max_iter_inner {
        let g = table.gradient(w, &varphi, beta_sm);
        let g_inf = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let g_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(g_norm >= settings.tol) {
            break;
        }
        let cap = 2.0 * bound / g_inf;
        let mut step = last_step.map_or(cap, |s| (2.0 * s).min(cap));
        let mut accepted = None;
        for _ in 0..=settings.max_backtracks {
            let x: Vec<f64> = varphi
                .iter()
                .zip(&g)
                .map(|(v, gi)| (v + step * gi).clamp(-bound, bound))
                .collect();
            let ascent: f64 = x.iter().zip(&varphi).zip(&g).map(|((a, b), gi)| gi * (a - b)).sum();
            if ascent == 0.0 {
                break;
            }
            let f_try = table.value(w, &x, beta_sm);
            if f_try >= f + settings.armijo_c * ascent && f_try > f {
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
        varphi = x;
        f = f_new;
        if gain <= settings.tol {
            break;
        }
    }
    debug_assert!(varphi.iter().all(|v| v.abs() <= bound));
    (varphi, f)
}
