//! Boundary behaviour of the Weyl function: scans `W(lambda + i eps)` down an epsilon ladder and
//! classifies each energy. The example uses a two-channel diagonal family whose channels have
//! different bands, so the a.c. multiplicity changes from 2 to 1 to 0 along the axis.
//!
//! Run with `cargo run --release --example boundary_scan`.

use bjweyl::blockcore::params::{make_family, FamilySpec, ScalarJacobi};
use bjweyl::weyl::{ac_report, boundary_scan, NRule, ScanThresholds};

fn main() -> bjweyl::Result<()> {
    // Channel 1: free, band [-2, 2]. Channel 2: a = 0.5, b = 1, band [0, 2].
    let p = make_family(FamilySpec::Diagonal {
        parts: vec![ScalarJacobi::free(), ScalarJacobi::new(vec![0.5], vec![1.0])],
    })?;
    let grid: Vec<f64> = (0..=16).map(|i| -2.75 + 0.35 * i as f64).collect();
    let ladder = [1e-1, 3e-2, 1e-2, 3e-3];
    let scan = boundary_scan(&p, &grid, &ladder, NRule::default(), ScanThresholds::default())?;
    println!("{:>8} {:>16} {:>14}", "lambda", "class", "tr density");
    for r in &scan.results {
        let dens = r.density.as_ref().map(|d| d.trace().re).unwrap_or(0.0);
        println!("{:>8.3} {:>16} {:>14.6}", r.lambda, r.classification.label(), dens);
    }
    let report = ac_report(&scan);
    for iv in &report.intervals {
        println!("interval [{:.3}, {:.3}]: a.c. {} (max rank {})", iv.lo, iv.hi, iv.has_ac, iv.max_rank);
    }
    println!("heuristic numerical scan on a finite grid; not a proof");
    Ok(())
}
