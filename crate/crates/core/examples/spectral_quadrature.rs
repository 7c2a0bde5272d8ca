//! The spectral matrix measure of a finite section: atoms at the eigenvalues of `H_N` with
//! weights `v_0 v_0^*`, its Cauchy transform, and agreement with the Weyl function.
//!
//! Run with `cargo run --example spectral_quadrature`.

use bjweyl::blockcore::matrix::{hermitian_eigenvalues, op_norm, C64};
use bjweyl::blockcore::params::JacobiParams;
use bjweyl::measure::{cauchy_transform, quadrature_measure, trace_views};
use bjweyl::weyl::weyl_resolvent;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bjweyl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 12;
    let p = JacobiParams::random_bounded(2, n, &mut rng);
    let m = quadrature_measure(&p, n)?;
    println!("{} atoms; total mass\n{:.3}", m.atoms().len(), m.total());
    println!("first moment (equals B_0):\n{:.6}", m.moment(1));

    println!("\natoms with trace density eigenvalues (all in [0, 1]):");
    for a in trace_views(&m).atoms.iter().take(6) {
        let ev = hermitian_eigenvalues(&a.density);
        println!("  lambda = {:>9.5}  tr = {:.5}  eig D = {ev:.4?}", a.lambda, a.trace);
    }

    for z in [C64::new(0.0, 1.0), C64::new(1.5, 0.1), C64::new(-3.0, 2.0)] {
        let c = cauchy_transform(&m, z)?;
        let w = weyl_resolvent(&p, z, n)?.w;
        println!("z = {z}: |C(z) - W(z)| = {:.2e}", op_norm(&(c - w)));
    }
    Ok(())
}
