//! Powers of the formal operator applied to `delta_0(w)`: block `k` of `J^k delta_0(w)` is
//! `(A_0 ... A_{k-1})^* w` and everything beyond index `k` vanishes.
//!
//! Run with `cargo run --example cyclic_structure`.

use bjweyl::blockcore::formal::{apply_formal, cyclic_block_product};
use bjweyl::blockcore::matrix::{Vector, C64};
use bjweyl::blockcore::params::JacobiParams;
use bjweyl::blockcore::seq::delta;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bjweyl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let p = JacobiParams::random_bounded(2, 20, &mut rng);
    let w = Vector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0)]);
    let mut u = delta(0, &w);
    for k in 1..=8 {
        u = apply_formal(&p, &u, k + 1)?;
        let top = u.get(k as isize).unwrap();
        let expect = cyclic_block_product(&p, k) * &w;
        let beyond = u.get(k as isize + 1).unwrap().norm();
        println!(
            "k = {k}: |u_k| = {:>10.4}, |u_k - C_k w| = {:.1e}, |u_(k+1)| = {beyond:.1e}",
            top.norm(),
            (top - expect).norm()
        );
    }
    Ok(())
}
