//! Independent oracles and instance generators shared by the integration tests.
//!
//! The oracles deliberately avoid the library's own recurrences and tables: they read blocks
//! straight from `JacobiParams` and invert with nalgebra directly.

#![allow(dead_code)]

use bjweyl::blockcore::matrix::{Mat, C64};
use bjweyl::blockcore::params::JacobiParams;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)
}

pub fn eye(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn norm(m: &Mat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn inv(m: &Mat) -> Mat {
    m.clone().lu().try_inverse().expect("invertible")
}

pub fn random_matrix(d: usize, r: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(d, d, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

pub fn random_psd(d: usize, r: &mut ChaCha8Rng) -> Mat {
    let g = random_matrix(d, r);
    &g * g.adjoint()
}

/// Random complex number with modulus at most `radius` and `|Im| >= im_min`, upper half-plane.
pub fn random_upper(r: &mut ChaCha8Rng, radius: f64, im_min: f64) -> C64 {
    loop {
        let z = C64::new(r.gen_range(-radius..radius), r.gen_range(im_min..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

pub fn random_disc(r: &mut ChaCha8Rng, radius: f64) -> C64 {
    loop {
        let z = C64::new(r.gen_range(-radius..radius), r.gen_range(-radius..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

/// Bounded random parameters of block size `d` defined on `len` indices.
pub fn random_params(d: usize, len: usize, r: &mut ChaCha8Rng) -> JacobiParams {
    JacobiParams::random_bounded(d, len, r)
}

/// Direct recursion for `A_n S_{n+1} + B_n S_n + A_{n-1}^* S_{n-1} = z S_n + F_n`, `S_{-1} = S_0 = 0`.
/// Returns `S_{-1} ..= S_{n_max}`.
pub fn nonhomogeneous_direct(p: &JacobiParams, z: C64, f: &[Mat], n_max: usize) -> Vec<Mat> {
    let d = p.d();
    let cols = f.first().map(|m| m.ncols()).unwrap_or(d);
    let zero = Mat::zeros(d, cols);
    let mut s = vec![zero.clone(), zero.clone()];
    for n in 0..n_max {
        let a_prev_adj = if n == 0 { -eye(d) } else { p.a(n - 1).adjoint() };
        let fn_ = f.get(n).cloned().unwrap_or_else(|| zero.clone());
        let rhs = (eye(d) * z - p.b(n)) * &s[n + 1] - a_prev_adj * &s[n] + fn_;
        s.push(inv(&p.a(n)) * rhs);
    }
    s
}

/// Direct forward recursion for the matrix polynomials at `z`, indices `-1 ..= n_max`.
pub fn polys_direct(p: &JacobiParams, z: C64, n_max: usize) -> (Vec<Mat>, Vec<Mat>) {
    let d = p.d();
    let mut pp = vec![Mat::zeros(d, d), eye(d)];
    let mut qq = vec![eye(d), Mat::zeros(d, d)];
    for n in 0..n_max {
        let a_prev_adj = if n == 0 { -eye(d) } else { p.a(n - 1).adjoint() };
        let shift = eye(d) * z - p.b(n);
        let ai = inv(&p.a(n));
        let pn = &ai * (&shift * &pp[n + 1] - &a_prev_adj * &pp[n]);
        let qn = &ai * (&shift * &qq[n + 1] - &a_prev_adj * &qq[n]);
        pp.push(pn);
        qq.push(qn);
    }
    (pp, qq)
}

/// Weyl function of the free scalar operator: the root of `m^2 + z m + 1 = 0` with `Im m Im z > 0`.
pub fn free_m(z: C64) -> C64 {
    let s = (z * z - 4.0).sqrt();
    let r1 = (-z + s) / 2.0;
    let r2 = (-z - s) / 2.0;
    if r1.im * z.im > 0.0 {
        r1
    } else {
        r2
    }
}

/// Dense `Nd x Nd` section assembled directly from the parameter blocks.
pub fn dense_section(p: &JacobiParams, n: usize) -> Mat {
    let d = p.d();
    let mut h = Mat::zeros(n * d, n * d);
    for k in 0..n {
        h.view_mut((k * d, k * d), (d, d)).copy_from(&p.b(k));
        if k + 1 < n {
            h.view_mut((k * d, (k + 1) * d), (d, d)).copy_from(&p.a(k));
            h.view_mut(((k + 1) * d, k * d), (d, d)).copy_from(&p.a(k).adjoint());
        }
    }
    h
}

/// Top-left block of the section resolvent by full inversion.
pub fn weyl_by_inversion(p: &JacobiParams, z: C64, n: usize) -> Mat {
    let d = p.d();
    let h = dense_section(p, n);
    let g = inv(&(h - Mat::identity(n * d, n * d) * z));
    g.view((0, 0), (d, d)).into_owned()
}
