//! Transfer matrices, their structured inverses, and the symplectic-type identities they satisfy.
//!
//! Blocks of `2d x 2d` matrices act on pairs `(u_{n-1}, u_n)` stacked as one column.

use crate::blockcore::matrix::{block2, hs_norm, identity, op_norm, singular_values, zeros, Mat, C64};
use crate::blockcore::params::{BlockTable, JacobiParams};
use crate::error::{Error, Result};
use crate::solutions::pq_from_table;

/// `Omega = [[0, I], [-I, 0]]`.
pub fn omega(d: usize) -> Mat {
    block2(&zeros(d), &identity(d), &-identity(d), &zeros(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferStep {
    pub t: Mat,
    pub t_inv: Mat,
}

fn zi(d: usize, z: C64) -> Mat {
    identity(d) * z
}

/// `T_n(z)` and its closed-form inverse from a materialized table.
pub fn step_from_table(table: &BlockTable, z: C64, n: usize) -> TransferStep {
    let d = table.d();
    let a_inv = table.a_inv(n);
    let shifted = zi(d, z) - table.b(n);
    // (A_{n-1}^*)^{-1}, which is -I at n = 0.
    let a_prev_adj_inv = if n == 0 { -identity(d) } else { table.a_inv(n - 1).adjoint() };
    let t = block2(&zeros(d), &identity(d), &-(a_inv * table.a_adj_ext(n as isize - 1)), &(a_inv * &shifted));
    let t_inv = block2(&(&a_prev_adj_inv * &shifted), &-(&a_prev_adj_inv * table.a(n)), &identity(d), &zeros(d));
    TransferStep { t, t_inv }
}

pub fn transfer_step(p: &JacobiParams, z: C64, n: usize) -> Result<TransferStep> {
    Ok(step_from_table(&p.table(n)?, z, n))
}

/// `T_0 .. T_{n-1}` and the accumulated products `R_1 .. R_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferChain {
    pub z: C64,
    pub t: Vec<Mat>,
    pub r: Vec<Mat>,
}

impl TransferChain {
    /// `R_k`, with `R_0 = I`.
    pub fn r(&self, k: usize) -> Mat {
        if k == 0 {
            identity(self.t.first().map(|m| m.nrows()).unwrap_or(0))
        } else {
            self.r[k - 1].clone()
        }
    }
}

pub fn transfer_chain(p: &JacobiParams, z: C64, n: usize) -> Result<TransferChain> {
    if n < 1 {
        return Err(Error::InvalidArgument("chain length must be at least 1".into()));
    }
    let table = p.table(n)?;
    Ok(chain_from_table(&table, z, n))
}

pub(crate) fn chain_from_table(table: &BlockTable, z: C64, n: usize) -> TransferChain {
    let mut t = Vec::with_capacity(n);
    let mut r: Vec<Mat> = Vec::with_capacity(n);
    for k in 0..n {
        let tk = step_from_table(table, z, k).t;
        let rk = match r.last() {
            Some(prev) => &tk * prev,
            None => tk.clone(),
        };
        t.push(tk);
        r.push(rk);
    }
    TransferChain { z, t, r }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NStep {
    pub r: Mat,
    pub r_inv: Mat,
    /// Product of the condition numbers of the steps; residual tolerances scale with it.
    pub cond_scale: f64,
}

fn cond(m: &Mat) -> f64 {
    let s = singular_values(m);
    s[0] / s[s.len() - 1]
}

/// `R_n(z)` and its inverse `Omega R_n(zbar)^* [[0, A_{n-1}], [-A_{n-1}^*, 0]]`.
pub fn transfer_nstep(p: &JacobiParams, z: C64, n: usize) -> Result<NStep> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let table = p.table(n)?;
    Ok(nstep_from_table(&table, z, n))
}

pub(crate) fn nstep_from_table(table: &BlockTable, z: C64, n: usize) -> NStep {
    let d = table.d();
    let mut r = identity(2 * d);
    let mut r_bar = identity(2 * d);
    let mut cond_scale = 1.0;
    for k in 0..n {
        let tk = step_from_table(table, z, k).t;
        cond_scale *= cond(&tk);
        r = &tk * r;
        r_bar = step_from_table(table, z.conj(), k).t * r_bar;
    }
    let a = table.a(n - 1);
    let tail = block2(&zeros(d), a, &-a.adjoint(), &zeros(d));
    let r_inv = omega(d) * r_bar.adjoint() * tail;
    NStep { r, r_inv, cond_scale }
}

/// `K_n = diag(A_n^*, I)`, with `K_{-1} = diag(-I, I)`.
fn k_block(table: &BlockTable, n: isize) -> Mat {
    let d = table.d();
    block2(&table.a_adj_ext(n), &zeros(d), &zeros(d), &identity(d))
}

/// The gauged step `K_n T_n K_{n-1}^{-1} = [[0, A_n^*], [-A_n^{-1}, A_n^{-1}(z - B_n)]]`.
pub fn gauged_step(table: &BlockTable, z: C64, n: usize) -> Mat {
    let d = table.d();
    let a_inv = table.a_inv(n);
    block2(&zeros(d), &table.a(n).adjoint(), &-a_inv.clone(), &(a_inv * (zi(d, z) - table.b(n))))
}

/// The gauged step computed literally as `K_n T_n K_{n-1}^{-1}`, for cross-checking [`gauged_step`].
pub fn gauged_step_by_conjugation(table: &BlockTable, z: C64, n: usize) -> Result<Mat> {
    let k_prev = k_block(table, n as isize - 1);
    let k_prev_inv = crate::blockcore::matrix::inverse(&k_prev, "K_{n-1}")?;
    Ok(k_block(table, n as isize) * step_from_table(table, z, n).t * k_prev_inv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaResidual {
    /// `|Omega - Rt(zbar)^* Omega Rt(z)|` in the operator norm.
    pub absolute: f64,
    /// `absolute` divided by `|Rt(zbar)| |Rt(z)|`.
    pub relative: f64,
}

pub fn omega_identity_residual(p: &JacobiParams, z: C64, n: usize) -> Result<OmegaResidual> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let table = p.table(n)?;
    let d = p.d();
    let mut rt = identity(2 * d);
    let mut rt_bar = identity(2 * d);
    for k in 0..n {
        rt = gauged_step(&table, z, k) * rt;
        rt_bar = gauged_step(&table, z.conj(), k) * rt_bar;
    }
    let om = omega(d);
    let absolute = op_norm(&(&om - rt_bar.adjoint() * &om * &rt));
    let scale = (op_norm(&rt_bar) * op_norm(&rt)).max(1.0);
    Ok(OmegaResidual { absolute, relative: absolute / scale })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoResidual {
    pub r1: f64,
    /// Absent at `k = 0`, where the second identity does not apply.
    pub r2: Option<f64>,
    pub r1_relative: f64,
    pub r2_relative: Option<f64>,
}

/// Residuals of `Q_k(w) P_k(wbar)^* = P_k(w) Q_k(wbar)^*` and
/// `Q_k(w) P_{k-1}(wbar)^* - P_k(w) Q_{k-1}(wbar)^* = A_{k-1}^{-1}`.
pub fn lo_residual(p: &JacobiParams, w: C64, k: usize) -> Result<LoResidual> {
    let table = p.table(k.max(1))?;
    let at_w = pq_from_table(&table, w, k.max(1));
    let at_wbar = pq_from_table(&table, w.conj(), k.max(1));
    let k = k as isize;
    let (pk, qk) = (at_w.p(k), at_w.q(k));
    let (pkb, qkb) = (at_wbar.p(k), at_wbar.q(k));
    let t1 = qk * pkb.adjoint();
    let t2 = pk * qkb.adjoint();
    let r1 = op_norm(&(&t1 - &t2));
    let r1_relative = r1 / (op_norm(&t1) + op_norm(&t2)).max(1.0);
    let (r2, r2_relative) = if k >= 1 {
        let s1 = qk * at_wbar.p(k - 1).adjoint();
        let s2 = pk * at_wbar.q(k - 1).adjoint();
        let target = table.a_inv((k - 1) as usize);
        let r2 = op_norm(&(&s1 - &s2 - target));
        let scale = (op_norm(&s1) + op_norm(&s2) + op_norm(target)).max(1.0);
        (Some(r2), Some(r2 / scale))
    } else {
        (None, None)
    };
    Ok(LoResidual { r1, r2, r1_relative, r2_relative })
}

/// Product `R_n` renormalized whenever its norm exceeds `cap`; returns the product and the log of the
/// accumulated scale factor so that `R_n = exp(log_scale) * product`.
pub fn capped_product(table: &BlockTable, z: C64, n: usize, cap: f64) -> (Mat, f64) {
    let d = table.d();
    let mut r = identity(2 * d);
    let mut log_scale = 0.0;
    for k in 0..n {
        r = step_from_table(table, z, k).t * r;
        let nr = hs_norm(&r);
        if nr > cap {
            r /= C64::new(nr, 0.0);
            log_scale += nr.ln();
        }
    }
    (r, log_scale)
}

/// Growth exponents `lim (1/n) ln s_i(R_n)` estimated by QR re-orthogonalization, in descending order.
pub fn growth_exponents(table: &BlockTable, z: C64, n: usize) -> Vec<f64> {
    let d2 = 2 * table.d();
    let mut q = identity(d2);
    let mut sums = vec![0.0; d2];
    for k in 0..n {
        let m = step_from_table(table, z, k).t * &q;
        let qr = m.qr();
        let rr = qr.r();
        for (i, s) in sums.iter_mut().enumerate() {
            *s += rr[(i, i)].norm().max(f64::MIN_POSITIVE).ln();
        }
        q = qr.q();
    }
    let mut out: Vec<f64> = sums.into_iter().map(|s| s / n.max(1) as f64).collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::compute_pq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn mat2(a: C64, b: C64, cc: C64, d: C64) -> Mat {
        Mat::from_row_slice(2, 2, &[a, b, cc, d])
    }

    #[test]
    fn free_scalar_steps() {
        let p = JacobiParams::free(1);
        let z = C64::new(0.3, 0.9);
        assert_eq!(transfer_step(&p, z, 3).unwrap().t, mat2(c(0.0), c(1.0), c(-1.0), z));
        assert_eq!(transfer_step(&p, z, 0).unwrap().t, mat2(c(0.0), c(1.0), c(1.0), z));
    }

    #[test]
    fn step_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = JacobiParams::random_bounded(3, 8, &mut rng);
        for n in 0..6 {
            let s = transfer_step(&p, C64::new(0.5, -1.2), n).unwrap();
            assert!(op_norm(&(&s.t * &s.t_inv - identity(6))) < 1e-12);
            assert!(op_norm(&(&s.t_inv * &s.t - identity(6))) < 1e-12);
        }
    }

    #[test]
    fn single_step_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = JacobiParams::random_bounded(2, 4, &mut rng);
        let z = C64::new(1.0, 1.0);
        let ns = transfer_nstep(&p, z, 1).unwrap();
        assert_eq!(ns.r, transfer_step(&p, z, 0).unwrap().t);
    }

    #[test]
    fn blocks_match_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = JacobiParams::random_bounded(2, 25, &mut rng);
        let z = C64::new(0.2, 0.6);
        let n = 20;
        let ns = transfer_nstep(&p, z, n).unwrap();
        let pq = compute_pq(&p, z, n).unwrap();
        let expect = block2(pq.q(n as isize - 1), pq.p(n as isize - 1), pq.q(n as isize), pq.p(n as isize));
        assert!(op_norm(&(&ns.r - &expect)) < 1e-9 * op_norm(&expect).max(1.0));
        assert!(op_norm(&(&ns.r * &ns.r_inv - identity(4))) < 1e-8 * ns.cond_scale);
    }

    #[test]
    fn gauged_step_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = JacobiParams::random_bounded(2, 5, &mut rng);
        let table = p.table(4).unwrap();
        for n in 0..4 {
            let z = C64::new(-0.7, 0.4);
            let lhs = gauged_step(&table, z, n);
            let rhs = gauged_step_by_conjugation(&table, z, n).unwrap();
            assert!(op_norm(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn omega_single_step_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = JacobiParams::random_bounded(3, 3, &mut rng);
        assert!(omega_identity_residual(&p, C64::new(0.4, 2.0), 1).unwrap().absolute < 1e-12);

        let scalar = crate::blockcore::params::make_family(crate::blockcore::params::FamilySpec::Constant {
            a: Mat::from_element(1, 1, c(1.7)),
            b: Mat::from_element(1, 1, c(-0.3)),
        })
        .unwrap();
        let table = scalar.table(3).unwrap();
        let det = gauged_step(&table, c(0.8), 2).determinant();
        assert!((det - 1.0).norm() < 1e-14);
    }

    #[test]
    fn lo_trivial_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = JacobiParams::random_bounded(2, 6, &mut rng);
        let w = C64::new(0.9, -0.5);
        assert_eq!(lo_residual(&p, w, 0).unwrap().r1, 0.0);
        assert!(lo_residual(&p, w, 1).unwrap().r2.unwrap() < 1e-15);
    }

    #[test]
    fn capped_product_matches_raw() {
        let p = JacobiParams::free(1);
        let z = C64::new(0.0, 2.0);
        let table = p.table(40).unwrap();
        let (m, log_scale) = capped_product(&table, z, 40, 1e3);
        let raw = nstep_from_table(&table, z, 40).r;
        let rebuilt = m * C64::new(log_scale.exp(), 0.0);
        assert!(op_norm(&(rebuilt - &raw)) < 1e-10 * op_norm(&raw));
    }

    #[test]
    fn free_exponents() {
        let p = JacobiParams::free(1);
        let table = p.table(400).unwrap();
        let g = growth_exponents(&table, C64::new(0.0, 2.0), 400);
        let root = (1.0 + 2f64.sqrt()).ln();
        assert!((g[0] - root).abs() < 1e-2 && (g[1] + root).abs() < 1e-2);
    }
}
