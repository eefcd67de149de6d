//! Beam patterns of the robust design and the point-estimate design on the
//! same scene, around the eavesdropper's uncertainty interval.

use rasec::harness::{export_beam_pattern, max_gain_over, sense, solve_scheme, ExperimentConfig, SchemeTag};

fn main() -> rasec::Result<()> {
    let cfg = ExperimentConfig::default();
    let sensed = sense(&cfg, 1)?;
    let tra = solve_scheme(&cfg, &sensed, SchemeTag::Tra)?;
    let pe = solve_scheme(&cfg, &sensed, SchemeTag::TraPe)?;
    let scene = &sensed.scene;

    let a = export_beam_pattern(&tra.problem.array, &tra.outcome.solution, scene, &tra.region, 1.0);
    let b = export_beam_pattern(&pe.problem.array, &pe.outcome.solution, scene, &tra.region, 1.0);
    println!("angle   robust (dB)   point estimate (dB)");
    for (x, y) in a.iter().zip(&b) {
        let mut mark = String::new();
        if x.user {
            mark.push_str(" user");
        }
        if x.estimate {
            mark.push_str(" estimate");
        }
        if x.region {
            mark.push_str(" region");
        }
        println!("{:>5}  {:>12.2}  {:>20.2}{mark}", x.angle_deg, x.gain_db, y.gain_db);
    }

    let (lo, hi) = (tra.region.xi_lo, tra.region.xi_hi);
    let range = scene.eavesdropper.range;
    println!(
        "\npeak gain over [{:.2}°, {:.2}°]: robust {:.2} dB, point estimate {:.2} dB",
        lo.to_degrees(),
        hi.to_degrees(),
        max_gain_over(&tra.problem.array, &tra.outcome.solution, range, lo, hi, 201),
        max_gain_over(&pe.problem.array, &pe.outcome.solution, range, lo, hi, 201)
    );
    Ok(())
}
