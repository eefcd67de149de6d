use std::io::{self, Write};

use crate::geometry::{beam_gain, ArrayConfig};
use crate::objective::SceneRealization;
use crate::optimizer::BeamformingSolution;
use crate::sensing::SensingOutcome;

use super::output::fmt_float;
use super::scheme::SchemeTag;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamPatternRow {
    pub angle_deg: f64,
    pub gain_db: f64,
    /// Nearest grid angle to a user direction.
    pub user: bool,
    /// Nearest grid angle to the estimated eavesdropper direction.
    pub estimate: bool,
    /// Inside the uncertainty interval `[ξ1, ξ2]`.
    pub region: bool,
}

/// Beam gain over `[−90°, 90°]` at `resolution_deg` steps, probed at the
/// eavesdropper range.
pub fn export_beam_pattern(
    array: &ArrayConfig,
    solution: &BeamformingSolution,
    scene: &SceneRealization,
    sensing: &SensingOutcome,
    resolution_deg: f64,
) -> Vec<BeamPatternRow> {
    let rows = (180.0 / resolution_deg + 1e-9).floor() as usize + 1;
    let rot = solution.rotation();
    let near = |a: f64, target: f64| (a - target.to_degrees()).abs() <= resolution_deg / 2.0;
    (0..rows)
        .map(|i| {
            let angle_deg = -90.0 + i as f64 * resolution_deg;
            let theta = angle_deg.to_radians();
            BeamPatternRow {
                angle_deg,
                gain_db: beam_gain(array, &rot, &solution.w, theta, scene.eavesdropper.range),
                user: scene.users.iter().any(|u| near(angle_deg, u.azimuth)),
                estimate: near(angle_deg, sensing.theta_hat),
                region: theta >= sensing.xi_lo && theta <= sensing.xi_hi,
            }
        })
        .collect()
}

/// Largest beam gain (dB) over `[lo, hi]` (radians), sampled at `points`
/// uniform angles, at probe range `range`.
pub fn max_gain_over(
    array: &ArrayConfig,
    solution: &BeamformingSolution,
    range: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> f64 {
    let rot = solution.rotation();
    let n = points.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .map(|t| beam_gain(array, &rot, &solution.w, t, range))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn write_beam_pattern_csv<W: Write>(
    out: &mut W,
    patterns: &[(SchemeTag, Vec<BeamPatternRow>)],
) -> io::Result<()> {
    writeln!(out, "scheme,angle_deg,gain_db,user,estimate,region")?;
    for (scheme, rows) in patterns {
        for r in rows {
            writeln!(
                out,
                "{scheme},{},{},{},{},{}",
                fmt_float(r.angle_deg),
                fmt_float(r.gain_db),
                u8::from(r.user),
                u8::from(r.estimate),
                u8::from(r.region)
            )?;
        }
    }
    Ok(())
}
