//! The Weyl function of the free Jacobi matrix at `z = 2i`, computed by both finite-section routes
//! and compared with the closed form `m(z) = (-z + sqrt(z^2 - 4)) / 2`.
//!
//! Run with `cargo run --example free_jacobi_weyl`.

use bjweyl::blockcore::matrix::{Vector, C64};
use bjweyl::blockcore::params::JacobiParams;
use bjweyl::weyl::{energy_identity_gap, weyl_resolvent, weyl_schur};

fn main() -> bjweyl::Result<()> {
    let p = JacobiParams::free(1);
    let z = C64::new(0.0, 2.0);
    let exact = C64::new(0.0, 2f64.sqrt() - 1.0);
    println!("{:>6} {:>24} {:>24} {:>12}", "N", "Im W (Schur)", "Im W (resolvent)", "|W - m|");
    for n in [5, 10, 20, 50, 200] {
        let s = weyl_schur(&p, z, n)?;
        let r = weyl_resolvent(&p, z, n)?;
        println!("{n:>6} {:>24.16} {:>24.16} {:>12.3e}", s.w[(0, 0)].im, r.w[(0, 0)].im, (s.w[(0, 0)] - exact).norm());
    }

    let e = energy_identity_gap(&p, z, 200, &Vector::from_element(1, C64::new(1.0, 0.0)))?;
    println!("\nenergy identity at N = 200: <Im W v, v>/Im z = {:.12}, sum |U_k v|^2 = {:.12}", e.lhs, e.rhs);

    // Block version: the free operator with d = 3 has W = m(z) I.
    let w3 = weyl_schur(&JacobiParams::free(3), z, 200)?.w;
    println!("d = 3 free block: W = \n{w3:.6}");
    Ok(())
}
