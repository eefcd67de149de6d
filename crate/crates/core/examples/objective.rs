//! The secrecy surrogate on one sensed scene: exact per-user secrecy rates,
//! the averaged-leakage bound, and the smoothed minimum for several β.

use rasec::harness::trial::design_region;
use rasec::harness::{sense, ExperimentConfig, SchemeTag};
use rasec::objective::{evaluate_true_secrecy, softmin, surrogate_eav_rate, weighted_eav_rate};
use rasec::optimizer::DesignProblem;

fn main() -> rasec::Result<()> {
    let cfg = ExperimentConfig::default();
    let sensed = sense(&cfg, 1)?;
    let region = design_region(&cfg, &sensed, SchemeTag::Tra)?;
    let problem = DesignProblem::new(cfg.array_config()?, sensed.scene.clone(), &region, cfg.link_budget()?);

    let sol = problem.initial_solution();
    let rot = sol.rotation();
    let ctx = problem.context(&rot, 1.0);
    println!("estimate {:.2}° (true {:.2}°)", sensed.theta_hat.to_degrees(), sensed.scene.eavesdropper.azimuth.to_degrees());
    println!("averaged leakage rate  {:.4} bit/s/Hz", weighted_eav_rate(&sol.w, &ctx, &problem.link));
    println!("leakage bound          {:.4} bit/s/Hz", surrogate_eav_rate(&sol.w, &ctx, &problem.link));

    let values = problem.secrecy_values(&sol.w, &rot);
    println!("per-user surrogate secrecy: {values:.4?}");
    for beta in [1.0, 10.0, 100.0, 1e4] {
        println!("  softmin at β = {beta:>7}: {:.4}", softmin(&values, beta));
    }
    let exact = evaluate_true_secrecy(&sol.w, &rot, &problem.array, &problem.scene, &problem.link);
    println!("secrecy against the true eavesdropper: {exact:.4}");
    Ok(())
}
