//! Complex circle manifold `{v : |v_n| = 1}`.

use crate::linalg::C64;

/// Projects `egrad` onto the tangent space at `v`:
/// `egrad − Re{egrad ⊙ v*} ⊙ v`.
pub fn riemannian_grad(v: &[C64], egrad: &[C64]) -> Vec<C64> {
    project(v, egrad)
}

/// Entrywise `(v + ξ)/|v + ξ|`. An entry whose sum is exactly zero keeps its
/// previous value.
pub fn retract(v: &[C64], step: &[C64]) -> Vec<C64> {
    v.iter()
        .zip(step)
        .map(|(a, s)| {
            let z = a + s;
            let r = z.norm();
            if r == 0.0 {
                *a
            } else {
                z / r
            }
        })
        .collect()
}

/// Carries a direction into the tangent space at `v_new`.
pub fn transport(v_new: &[C64], d_old: &[C64]) -> Vec<C64> {
    project(v_new, d_old)
}

fn project(v: &[C64], x: &[C64]) -> Vec<C64> {
    v.iter()
        .zip(x)
        .map(|(p, g)| g - p * (g * p.conj()).re)
        .collect()
}

/// Largest `|Re{ξ_n v_n*}|`, zero for an exactly tangent `ξ`.
pub fn tangency_residual(v: &[C64], xi: &[C64]) -> f64 {
    v.iter()
        .zip(xi)
        .map(|(p, x)| (x * p.conj()).re.abs())
        .fold(0.0, f64::max)
}

/// Real inner product `Re{aᴴ b}`.
pub fn real_inner(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}
