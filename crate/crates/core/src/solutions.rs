//! Generalized eigenvectors, matrix orthogonal polynomials, and the non-homogeneous solver.
//!
//! Every solution is produced by the forward three-term recurrence
//! `u_{n+1} = A_n^{-1}((z - B_n) u_n - A_{n-1}^* u_{n-1})` with `A_{-1} = -I`,
//! reusing the inverses cached in a [`BlockTable`].

use crate::blockcore::matrix::{as_column, column_to_vector, hs_norm, identity, zeros, Mat, Vector, C64};
use crate::blockcore::params::{BlockTable, JacobiParams};
use crate::blockcore::seq::{BlockSeq, Term};
use crate::error::{Error, Result};

/// Which pair of consecutive terms the initial data prescribes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StartMode {
    /// `(u_0, u_1)` given; the solution starts at index 0.
    From01,
    /// `(u_{-1}, u_0)` given; the solution starts at index -1.
    FromMinus1,
}

/// Terms a solution can be built from: `C^d` vectors or `d x d` matrices.
pub trait SolutionTerm: Term {
    fn to_mat(&self) -> Mat;
    fn from_mat(m: Mat) -> Self;
}

impl SolutionTerm for Vector {
    fn to_mat(&self) -> Mat {
        as_column(self)
    }
    fn from_mat(m: Mat) -> Self {
        column_to_vector(&m)
    }
}

impl SolutionTerm for Mat {
    fn to_mat(&self) -> Mat {
        self.clone()
    }
    fn from_mat(m: Mat) -> Self {
        m
    }
}

/// A solution of the recurrence together with its spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub z: C64,
    pub terms: BlockSeq<T>,
}

pub type GevSolution = Solution<Vector>;
pub type MgevSolution = Solution<Mat>;

impl<T: SolutionTerm> Solution<T> {
    pub fn get(&self, n: isize) -> Option<&T> {
        self.terms.get(n)
    }

    pub fn restrict_to_nonnegative(&self) -> Self {
        Self { z: self.z, terms: self.terms.restrict_to_nonnegative() }
    }
}

/// One recurrence step: `u_{n+1}` from `u_{n-1}` and `u_n`.
pub fn step(table: &BlockTable, z: C64, n: usize, u_prev: &Mat, u_cur: &Mat) -> Mat {
    let mut rhs = u_cur * z - table.b(n) * u_cur;
    if n == 0 {
        rhs += u_prev;
    } else {
        rhs -= table.a(n - 1).adjoint() * u_prev;
    }
    table.a_inv(n) * rhs
}

/// Runs the recurrence from `(u_{n0-1}, u_{n0})` up to index `n_max`, returning all terms from `n0 - 1`.
pub(crate) fn run_recurrence(table: &BlockTable, z: C64, n0: usize, first: Mat, second: Mat, n_max: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(n_max + 3 - n0);
    out.push(first);
    out.push(second);
    for n in n0..n_max {
        let len = out.len();
        let next = step(table, z, n, &out[len - 2], &out[len - 1]);
        out.push(next);
    }
    out
}

fn check_init_shape(d: usize, m: &Mat) -> Result<()> {
    if m.nrows() != d {
        return Err(Error::Dimension { expected: d, found: m.nrows() });
    }
    Ok(())
}

/// The unique solution with prescribed initial data, terms up to `n_max`.
pub fn solve_forward<T: SolutionTerm>(
    p: &JacobiParams,
    z: C64,
    init: (&T, &T),
    mode: StartMode,
    n_max: usize,
) -> Result<Solution<T>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let table = p.table(n_max)?;
    solve_forward_table(&table, z, init, mode, n_max)
}

pub fn solve_forward_table<T: SolutionTerm>(
    table: &BlockTable,
    z: C64,
    init: (&T, &T),
    mode: StartMode,
    n_max: usize,
) -> Result<Solution<T>> {
    let (a, b) = (init.0.to_mat(), init.1.to_mat());
    check_init_shape(table.d(), &a)?;
    check_init_shape(table.d(), &b)?;
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension { expected: a.ncols(), found: b.ncols() });
    }
    if n_max < 1 || n_max > table.n_max() + 1 {
        return Err(Error::InvalidArgument(format!(
            "block table covers n <= {}, too short for n_max = {n_max}",
            table.n_max()
        )));
    }
    let (start, terms) = match mode {
        StartMode::From01 => (0, run_recurrence(table, z, 1, a, b, n_max)),
        StartMode::FromMinus1 => (-1, run_recurrence(table, z, 0, a, b, n_max)),
    };
    let terms = terms.into_iter().map(T::from_mat).collect();
    Ok(Solution { z, terms: BlockSeq::from_parts(start, terms) })
}

/// Largest scaled residual of the recurrence over all indices where it applies.
///
/// For a solution starting at 0 the recurrence is checked at `n >= 1`; for one starting at -1
/// it is also checked at `n = 0`. Each residual is divided by
/// `max(1, |u_{n-1}|, |u_n|, |u_{n+1}|)` so exponential growth does not inflate it.
pub fn recurrence_residual<T: SolutionTerm>(table: &BlockTable, z: C64, terms: &BlockSeq<T>) -> f64 {
    let mats: Vec<Mat> = terms.terms().iter().map(T::to_mat).collect();
    let start = terms.start();
    let mut worst: f64 = 0.0;
    for i in 1..mats.len().saturating_sub(1) {
        let n = start + i as isize;
        if n < 0 || n as usize > table.n_max() {
            continue;
        }
        let nu = n as usize;
        let (prev, cur, next) = (&mats[i - 1], &mats[i], &mats[i + 1]);
        let r = table.a_adj_ext(n - 1) * prev + table.b(nu) * cur + table.a(nu) * next - cur * z;
        let scale = 1f64.max(hs_norm(prev)).max(hs_norm(cur)).max(hs_norm(next));
        worst = worst.max(hs_norm(&r) / scale);
    }
    worst
}

/// Prepends `u_{-1} = (B_0 - z) u_0 + A_0 u_1` to a solution that starts at 0.
pub fn extend_to_minus_one<T: SolutionTerm>(p: &JacobiParams, u: &Solution<T>) -> Result<Solution<T>> {
    if u.terms.start() != 0 {
        return Err(Error::InvalidArgument("extension expects a solution starting at 0".into()));
    }
    let d = p.d();
    let u0 = u.terms.get(0).map(T::to_mat);
    let cols = u0.as_ref().map(|m| m.ncols()).unwrap_or(1);
    let u0 = u0.unwrap_or_else(|| Mat::zeros(d, cols));
    let u1 = u.terms.get(1).map(T::to_mat).unwrap_or_else(|| Mat::zeros(d, cols));
    let um1 = (p.b(0) - identity(d) * u.z) * &u0 + p.a(0) * &u1;
    let mut terms = Vec::with_capacity(u.terms.len() + 1);
    terms.push(T::from_mat(um1));
    terms.extend(u.terms.terms().iter().cloned());
    Ok(Solution { z: u.z, terms: BlockSeq::from_parts(-1, terms) })
}

/// Matrix orthogonal polynomials of the first (`P`) and second (`Q`) kind, indexed from -1.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPair {
    pub z: C64,
    pub p: BlockSeq<Mat>,
    pub q: BlockSeq<Mat>,
    pub n_max: usize,
}

impl PolyPair {
    pub fn p(&self, n: isize) -> &Mat {
        self.p.get(n).expect("index within the computed range")
    }

    pub fn q(&self, n: isize) -> &Mat {
        self.q.get(n).expect("index within the computed range")
    }

    pub fn p_solution(&self) -> MgevSolution {
        Solution { z: self.z, terms: self.p.clone() }
    }

    pub fn q_solution(&self) -> MgevSolution {
        Solution { z: self.z, terms: self.q.clone() }
    }
}

/// `P(z)` and `Q(z)` on `-1..=n_max`.
pub fn compute_pq(p: &JacobiParams, z: C64, n_max: usize) -> Result<PolyPair> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(pq_from_table(&p.table(n_max)?, z, n_max))
}

pub(crate) fn pq_from_table(table: &BlockTable, z: C64, n_max: usize) -> PolyPair {
    let d = table.d();
    let p = run_recurrence(table, z, 0, zeros(d), identity(d), n_max);
    let q = run_recurrence(table, z, 0, identity(d), zeros(d), n_max);
    PolyPair { z, p: BlockSeq::from_parts(-1, p), q: BlockSeq::from_parts(-1, q), n_max }
}

/// Coordinates `(S, T) = (U_0, U_{-1})` of a solution in the basis `U = P S + Q T`.
pub fn decompose(u: &MgevSolution) -> Result<(Mat, Mat)> {
    if u.terms.start() != -1 || u.terms.len() < 2 {
        return Err(Error::InvalidArgument("decomposition needs a solution with terms at -1 and 0".into()));
    }
    Ok((u.terms.terms()[1].clone(), u.terms.terms()[0].clone()))
}

/// `P(z) S + Q(z) T` on the range of `pq`.
pub fn reconstruct(pq: &PolyPair, s: &Mat, t: &Mat) -> BlockSeq<Mat> {
    let terms = pq.p.terms().iter().zip(pq.q.terms()).map(|(pn, qn)| pn * s + qn * t).collect();
    BlockSeq::from_parts(-1, terms)
}

fn forcing_setup(p: &JacobiParams, f: &BlockSeq<Mat>, n_max: usize) -> Result<(BlockTable, usize)> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if f.start() != 0 {
        return Err(Error::InvalidArgument("forcing term must start at 0".into()));
    }
    let d = p.d();
    if let Some(df) = f.d() {
        if df != d {
            return Err(Error::Dimension { expected: d, found: df });
        }
    }
    let cols = f.terms().first().map(|m| m.ncols()).unwrap_or(d);
    Ok((p.table(n_max)?, cols))
}

/// The solution of `A_n S_{n+1} + B_n S_n + A_{n-1}^* S_{n-1} = z S_n + F_n` with `S_{-1} = S_0 = 0`,
/// given by the variation-of-constants sum
/// `S_n = sum_{k<n} K(n, k) F_k` with `K(n, k) = Q_n(z) P_k(zbar)^* - P_n(z) Q_k(zbar)^*`.
///
/// Each kernel is evaluated through the factorization of the transfer product at `k + 1`: for fixed `k`,
/// `n -> K(n, k)` is the solution with `K(k, k) = 0` and `K(k + 1, k) = A_k^{-1}`, so `K(n, k) F_k` is
/// obtained by propagating `(0, A_k^{-1} F_k)` from `k`. Forming the difference of products directly
/// cancels terms of size `|P_n| |Q_k|` and loses roughly `log10 |P_n|` digits when the polynomials grow;
/// [`nonhomogeneous_prefix_sums`] keeps that literal evaluation for comparison. Cost is `O(n_max^2)` block
/// products.
///
/// Entries of `F` past its stored terms are zero.
pub fn solve_nonhomogeneous(p: &JacobiParams, z: C64, f: &BlockSeq<Mat>, n_max: usize) -> Result<BlockSeq<Mat>> {
    let (table, cols) = forcing_setup(p, f, n_max)?;
    let d = p.d();
    let mut out = vec![Mat::zeros(d, cols); n_max + 2];
    for k in 0..n_max {
        let Some(fk) = f.get(k as isize) else { break };
        let mut prev = Mat::zeros(d, cols);
        let mut cur = table.a_inv(k) * fk;
        out[k + 2] += &cur;
        for n in k + 1..n_max {
            let next = step(&table, z, n, &prev, &cur);
            out[n + 2] += &next;
            prev = cur;
            cur = next;
        }
    }
    Ok(BlockSeq::from_parts(-1, out))
}

/// The same sum as [`solve_nonhomogeneous`], evaluated literally with running sums of `P_k(zbar)^* F_k`
/// and `Q_k(zbar)^* F_k`. Linear cost, but accurate only while the polynomials stay moderate.
pub fn nonhomogeneous_prefix_sums(p: &JacobiParams, z: C64, f: &BlockSeq<Mat>, n_max: usize) -> Result<BlockSeq<Mat>> {
    let (table, cols) = forcing_setup(p, f, n_max)?;
    let d = p.d();
    let at_z = pq_from_table(&table, z, n_max);
    let at_zbar = pq_from_table(&table, z.conj(), n_max);
    let mut sum_p = Mat::zeros(d, cols);
    let mut sum_q = Mat::zeros(d, cols);
    let mut out = Vec::with_capacity(n_max + 2);
    for n in -1..=(n_max as isize) {
        out.push(at_z.q(n) * &sum_p - at_z.p(n) * &sum_q);
        if n >= 0 {
            if let Some(fk) = f.get(n) {
                sum_p += at_zbar.p(n).adjoint() * fk;
                sum_q += at_zbar.q(n).adjoint() * fk;
            }
        }
    }
    Ok(BlockSeq::from_parts(-1, out))
}

/// Residuals of the vector recurrence for each column of `U` and for the contraction `U v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnCheck {
    pub column_residuals: Vec<f64>,
    pub contraction_residual: f64,
}

impl ColumnCheck {
    pub fn max_residual(&self) -> f64 {
        self.column_residuals.iter().copied().fold(self.contraction_residual, f64::max)
    }
}

pub fn columns_as_gev_check(p: &JacobiParams, u: &MgevSolution, v: &Vector) -> Result<ColumnCheck> {
    let d = p.d();
    if v.len() != d {
        return Err(Error::Dimension { expected: d, found: v.len() });
    }
    let n_max = u.terms.last_index().max(1) as usize;
    let table = p.table(n_max)?;
    let column_residuals = (0..d)
        .map(|j| {
            let col = u.terms.map(|m| m.column(j).into_owned());
            recurrence_residual(&table, u.z, &col)
        })
        .collect();
    let contracted = u.terms.map(|m| m * v);
    Ok(ColumnCheck { column_residuals, contraction_residual: recurrence_residual(&table, u.z, &contracted) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcore::matrix::op_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn scalar(x: C64) -> Vector {
        Vector::from_element(1, x)
    }

    #[test]
    fn free_scalar_at_zero() {
        let p = JacobiParams::free(1);
        let u = solve_forward(&p, c(0.0), (&scalar(c(1.0)), &scalar(c(0.0))), StartMode::From01, 8).unwrap();
        let vals: Vec<f64> = u.terms.terms().iter().map(|v| v[0].re).collect();
        assert_eq!(vals, vec![1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn from_minus_one_reproduces_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = JacobiParams::random_bounded(2, 12, &mut rng);
        let z = C64::new(0.3, 0.7);
        let u = solve_forward(&p, z, (&identity(2), &zeros(2)), StartMode::FromMinus1, 10).unwrap();
        let pq = compute_pq(&p, z, 10).unwrap();
        assert_eq!(u.terms, pq.q);
    }

    #[test]
    fn extension_examples() {
        let p = JacobiParams::free(1);
        let z = C64::new(0.5, 1.5);
        let u = solve_forward(&p, z, (&scalar(c(1.0)), &scalar(c(0.0))), StartMode::From01, 4).unwrap();
        let e = extend_to_minus_one(&p, &u).unwrap();
        assert_eq!(e.terms.get(-1).unwrap()[0], -z);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = JacobiParams::random_bounded(2, 6, &mut rng);
        let a0_inv = p.table(1).unwrap().a_inv(0).clone();
        let u = solve_forward(&p, z, (&zeros(2), &a0_inv), StartMode::From01, 5).unwrap();
        let e = extend_to_minus_one(&p, &u).unwrap();
        assert!(op_norm(&(e.terms.get(-1).unwrap() - identity(2))) < 1e-12);
    }

    #[test]
    fn free_polynomials() {
        let p = JacobiParams::free(1);
        let z = C64::new(0.7, -0.2);
        let pq = compute_pq(&p, z, 3).unwrap();
        assert!((pq.p(2)[(0, 0)] - (z * z - 1.0)).norm() < 1e-14);
        assert!((pq.q(1)[(0, 0)] - 1.0).norm() < 1e-14);
        assert!((pq.q(2)[(0, 0)] - z).norm() < 1e-14);
    }

    #[test]
    fn p1_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = JacobiParams::random_bounded(3, 4, &mut rng);
        let z = C64::new(-0.4, 0.9);
        let pq = compute_pq(&p, z, 2).unwrap();
        let t = p.table(1).unwrap();
        let expect = t.a_inv(0) * (identity(3) * z - t.b(0));
        assert!(op_norm(&(pq.p(1) - expect)) < 1e-12);
        assert!(op_norm(&(pq.q(1) - t.a_inv(0))) < 1e-12);
    }

    #[test]
    fn decompose_basis_solutions() {
        let p = JacobiParams::free(2);
        let pq = compute_pq(&p, C64::new(0.1, 0.2), 5).unwrap();
        let (s, t) = decompose(&pq.p_solution()).unwrap();
        assert_eq!((s, t), (identity(2), zeros(2)));
        let (s, t) = decompose(&pq.q_solution()).unwrap();
        assert_eq!((s, t), (zeros(2), identity(2)));
    }

    #[test]
    fn zero_forcing() {
        let p = JacobiParams::free(2);
        let f = BlockSeq::new(0, vec![zeros(2); 5]).unwrap();
        let s = solve_nonhomogeneous(&p, C64::new(0.0, 1.0), &f, 5).unwrap();
        assert!(s.terms().iter().all(|m| op_norm(m) == 0.0));
    }

    #[test]
    fn first_nonhomogeneous_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = JacobiParams::random_bounded(2, 5, &mut rng);
        let f0 = Mat::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let f = BlockSeq::new(0, vec![f0.clone()]).unwrap();
        let s = solve_nonhomogeneous(&p, C64::new(0.2, 0.3), &f, 3).unwrap();
        let expect = p.table(0).unwrap().a_inv(0) * &f0;
        assert!(op_norm(&(s.get(1).unwrap() - expect)) < 1e-12);
        assert_eq!(op_norm(s.get(-1).unwrap()), 0.0);
        assert_eq!(op_norm(s.get(0).unwrap()), 0.0);
    }

    #[test]
    fn kernel_and_prefix_sum_evaluations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = JacobiParams::random_bounded(2, 10, &mut rng);
        let f =
            BlockSeq::new(0, (0..8).map(|k| Mat::from_fn(2, 2, |i, j| C64::new((i + k) as f64, j as f64))).collect())
                .unwrap();
        let z = C64::new(0.1, 0.4);
        let a = solve_nonhomogeneous(&p, z, &f, 8).unwrap();
        let b = nonhomogeneous_prefix_sums(&p, z, &f, 8).unwrap();
        for (x, y) in a.terms().iter().zip(b.terms()) {
            assert!(op_norm(&(x - y)) <= 1e-9 * op_norm(y).max(1.0));
        }
    }

    #[test]
    fn column_checks() {
        let p = JacobiParams::free(2);
        let pq = compute_pq(&p, C64::new(0.3, 0.4), 10).unwrap();
        let e1 = Vector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(columns_as_gev_check(&p, &pq.p_solution(), &e1).unwrap().max_residual() < 1e-10);
        let zero = Solution { z: pq.z, terms: BlockSeq::from_parts(-1, vec![zeros(2); 6]) };
        assert_eq!(columns_as_gev_check(&p, &zero, &e1).unwrap().max_residual(), 0.0);
    }

    #[test]
    fn short_n_max_rejected() {
        let p = JacobiParams::free(1);
        assert!(solve_forward(&p, c(0.0), (&identity(1), &zeros(1)), StartMode::From01, 0).is_err());
        assert!(compute_pq(&p, c(0.0), 0).is_err());
    }
}
