//! The formal block Jacobi operator acting on finitely supported sequences.

use super::matrix::{identity, Mat, Vector};
use super::params::JacobiParams;
use super::seq::{BlockSeq, BlockVecSeq};
use crate::error::{Error, Result};

fn term(u: &BlockVecSeq, n: usize, d: usize) -> Vector {
    u.get(n as isize).cloned().unwrap_or_else(|| Vector::zeros(d))
}

/// Terms `0..=n_max` of `J u`; `u` is read as zero past its last term.
pub fn apply_formal(p: &JacobiParams, u: &BlockVecSeq, n_max: usize) -> Result<BlockVecSeq> {
    let d = p.d();
    if u.start() != 0 {
        return Err(Error::InvalidArgument("apply_formal expects a sequence starting at 0".into()));
    }
    if let Some(du) = u.d() {
        if du != d {
            return Err(Error::Dimension { expected: d, found: du });
        }
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut a_prev: Option<Mat> = None;
    for n in 0..=n_max {
        let an = p.a(n);
        let mut v = p.b(n) * term(u, n, d) + &an * term(u, n + 1, d);
        if let Some(ap) = &a_prev {
            v += ap.adjoint() * term(u, n - 1, d);
        }
        out.push(v);
        a_prev = Some(an);
    }
    Ok(BlockSeq::from_parts(0, out))
}

/// `C_k = (A_0 ... A_{k-1})^*`, and `I` for `k = 0`.
pub fn cyclic_block_product(p: &JacobiParams, k: usize) -> Mat {
    let mut prod = identity(p.d());
    for n in 0..k {
        prod *= p.a(n);
    }
    prod.adjoint()
}
