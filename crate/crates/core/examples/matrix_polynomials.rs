//! Matrix orthogonal polynomials `P_n(z)`, `Q_n(z)` of a random block Jacobi matrix, the
//! decomposition of an arbitrary matrix solution in that basis, and the variation-of-constants
//! solution of the forced recurrence.
//!
//! Run with `cargo run --example matrix_polynomials`.

use bjweyl::blockcore::matrix::{op_norm, Mat, C64};
use bjweyl::blockcore::params::JacobiParams;
use bjweyl::blockcore::seq::BlockSeq;
use bjweyl::solutions::{
    compute_pq, decompose, nonhomogeneous_prefix_sums, reconstruct, solve_forward, solve_nonhomogeneous, StartMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bjweyl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 2;
    let n = 30;
    let p = JacobiParams::random_bounded(d, n + 1, &mut rng);
    let z = C64::new(0.4, 0.8);

    let pq = compute_pq(&p, z, n)?;
    println!("|P_n(z)| and |Q_n(z)| grow exponentially off the real axis:");
    for k in [0, 5, 10, 20, 30] {
        println!("  n = {k:>2}: |P_n| = {:>10.3e}  |Q_n| = {:>10.3e}", op_norm(pq.p(k)), op_norm(pq.q(k)));
    }

    let init_m1 = Mat::from_fn(d, d, |i, j| C64::new(i as f64 - j as f64, 0.5));
    let init_0 = Mat::from_fn(d, d, |i, j| C64::new(1.0 + (i * j) as f64, -0.25));
    let u = solve_forward(&p, z, (&init_m1, &init_0), StartMode::FromMinus1, n)?;
    let (s, t) = decompose(&u)?;
    let back = reconstruct(&pq, &s, &t);
    let err = (-1..=n as isize)
        .map(|k| op_norm(&(back.get(k).unwrap() - u.get(k).unwrap())) / op_norm(u.get(k).unwrap()).max(1.0))
        .fold(0.0, f64::max);
    println!("\nU = P S + Q T reconstruction error: {err:.2e}");

    let forcing =
        BlockSeq::new(0, (0..=n).map(|k| Mat::identity(d, d) * C64::new(1.0 / (k + 1) as f64, 0.0)).collect())?;
    let stable = solve_nonhomogeneous(&p, z, &forcing, n)?;
    let literal = nonhomogeneous_prefix_sums(&p, z, &forcing, n)?;
    println!("\nforced recurrence S_n (same sum, two evaluations):");
    for k in [1, 10, 20, 30] {
        let a = stable.get(k).unwrap();
        let b = literal.get(k).unwrap();
        println!(
            "  n = {k:>2}: |S_n| = {:>10.3e}, relative difference {:.2e}",
            op_norm(a),
            op_norm(&(a - b)) / op_norm(a)
        );
    }
    Ok(())
}
