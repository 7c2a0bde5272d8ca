//! Transfer matrices: the closed-form inverse of the n-step product, the symplectic-type
//! identity with `Omega`, and the Liouville-Ostrogradsky identities for the polynomials.
//!
//! Run with `cargo run --example transfer_identities`.

use bjweyl::blockcore::matrix::{identity, op_norm, C64};
use bjweyl::blockcore::params::JacobiParams;
use bjweyl::transfer::{lo_residual, omega_identity_residual, transfer_nstep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bjweyl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = JacobiParams::random_bounded(3, 60, &mut rng);
    let z = C64::new(1.2, -0.7);
    println!(
        "{:>4} {:>12} {:>14} {:>14} {:>14} {:>12} {:>12}",
        "n", "|R_n|", "|R R^-1 - I|", "scaled", "omega resid", "LO r1", "LO r2"
    );
    for n in [1, 5, 10, 25, 50] {
        let ns = transfer_nstep(&p, z, n)?;
        let defect = op_norm(&(&ns.r * &ns.r_inv - identity(6)));
        let om = omega_identity_residual(&p, z, n)?;
        let lo = lo_residual(&p, z, n)?;
        let scale = op_norm(&ns.r) * op_norm(&ns.r_inv);
        println!(
            "{n:>4} {:>12.3e} {:>14.3e} {:>14.3e} {:>14.3e} {:>12.3e} {:>12}",
            op_norm(&ns.r),
            defect,
            defect / scale,
            om.relative,
            lo.r1_relative,
            lo.r2_relative.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
        );
    }
    println!("\nThe inverse is assembled from R_n(conj z), so no linear system is solved. The raw defect of");
    println!("R R^-1 grows with |R_n| |R_n^-1| through rounding alone; the scaled column stays at machine precision.");
    Ok(())
}
