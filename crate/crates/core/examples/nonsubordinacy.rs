//! Condition numbers of solution Gram matrices at real energies. Inside the band of the free
//! operator all solutions grow at the same rate and `cond(G_t)` stays bounded; in a gap one
//! solution is subordinate and `cond(G_t)` grows like `exp(2 gamma t)`.
//!
//! Run with `cargo run --example nonsubordinacy`.

use bjweyl::blockcore::params::JacobiParams;
use bjweyl::subordinacy::{nonsub_diagnostic, spectral_consequence_report, DEFAULT_COND_CAP};

fn main() -> bjweyl::Result<()> {
    let p = JacobiParams::free(1);
    for (lambda, t_max) in [(0.0, 5000.0), (1.9, 5000.0), (3.0, 40.0)] {
        let grid: Vec<f64> = (1..=50).map(|i| t_max * i as f64 / 50.0).collect();
        let diag = nonsub_diagnostic(&p, lambda, &grid, DEFAULT_COND_CAP)?;
        let last = diag.cond_trajectory.last().unwrap().1;
        print!("lambda = {lambda:>4}: {:<24} cond(G_tmax) = {last:>10.3e}", diag.verdict.label());
        if let Some(rate) = diag.growth_rate {
            print!("  growth rate {rate:.4}");
        }
        println!();
        let report = spectral_consequence_report(&p, &diag, false)?;
        println!("    {}", report.claim.unwrap_or(report.reason));
    }
    println!("gap rate for lambda = 3 should be acosh(3/2) = {:.4}", (1.5f64).acosh());
    Ok(())
}
