//! The Jitomirskaya-Last length scale `ell(eps)`, defined by `|P|_[0,ell] |Q|_[0,ell] = 1/(2 eps)`,
//! for the free operator inside the band and a random block family.
//!
//! Run with `cargo run --example jl_function`.

use bjweyl::blockcore::params::JacobiParams;
use bjweyl::seminorms::SeminormKind;
use bjweyl::subordinacy::jl_function;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bjweyl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let families = [("free d=1", JacobiParams::free(1)), ("random d=2", JacobiParams::random_bounded(2, 50, &mut rng))];
    for (name, p) in &families {
        println!("{name}, lambda = 0.3");
        println!("{:>10} {:>14} {:>14} {:>10}", "eps", "ell (norm)", "ell (minmod)", "horizon");
        for k in 0..7 {
            let eps = 0.1 * 0.5f64.powi(k);
            let a = jl_function(p, 0.3, eps, SeminormKind::MatrixNorm)?;
            let b = jl_function(p, 0.3, eps, SeminormKind::MatrixMinmod)?;
            println!("{eps:>10.5} {:>14.6} {:>14.6} {:>10}", a.ell, b.ell, a.horizon);
        }
        println!();
    }
    Ok(())
}
