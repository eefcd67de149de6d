//! Secrecy under execution errors of the rotation motors: each optimized
//! rotation is perturbed uniformly within ±bound before evaluation.

use std::collections::BTreeMap;

use rasec::harness::{rotation_error_study, ExperimentConfig, SchemeTag};

fn main() -> rasec::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.n_trials = 20;
    cfg.experiment.schemes = vec![SchemeTag::Fpa, SchemeTag::Gra, SchemeTag::Era, SchemeTag::Tra];
    cfg.experiment.rotation_error_bounds_deg = vec![0.0, 1.0, 2.0, 4.0];
    let records = rotation_error_study(&cfg)?;

    let mut cells: BTreeMap<(SchemeTag, u64), (f64, usize)> = BTreeMap::new();
    for r in &records {
        let cell = cells.entry((r.scheme, r.sweep_value.unwrap_or(0.0).to_bits())).or_default();
        cell.0 += r.secrecy;
        cell.1 += 1;
    }
    print!("{:<10}", "bound (°)");
    for b in &cfg.experiment.rotation_error_bounds_deg {
        print!("{b:>9}");
    }
    println!();
    for scheme in &cfg.experiment.schemes {
        print!("{:<10}", scheme.as_str());
        for b in &cfg.experiment.rotation_error_bounds_deg {
            let (sum, n) = cells[&(*scheme, b.to_bits())];
            print!("{:>9.4}", sum / n as f64);
        }
        println!();
    }
    Ok(())
}
