//! The matrix Weyl function of the half-line block Jacobi operator.
//!
//! `W(z)` is the top-left `d x d` block of `(H - z)^{-1}` for a finite section `H`. It is computed
//! by two independent routes: a dense LU solve of the section against its first block column, and a
//! backward block Schur-complement recursion. The two agree up to rounding at equal truncation,
//! which makes each a check on the other.

mod scan;

pub use scan::{
    ac_report, boundary_scan, boundary_scan_table, AcInterval, AcReport, BoundaryScan, Classification, LambdaResult,
    NRule, ScanPoint, ScanThresholds,
};

use crate::blockcore::matrix::{hermitian_eigenvalues, identity, im_part, inverse, op_norm, Mat, Vector, C64};
use crate::blockcore::params::{BlockTable, JacobiParams};
use crate::blockcore::seq::BlockSeq;
use crate::error::{Error, Result};
use crate::solutions::{pq_from_table, MgevSolution, Solution};
use crate::transfer::growth_exponents;

/// A materialized `Nd x Nd` truncation of the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSection {
    pub n: usize,
    pub d: usize,
    pub h: Mat,
}

pub fn finite_section(p: &JacobiParams, n: usize) -> Result<FiniteSection> {
    if n < 1 {
        return Err(Error::InvalidArgument("section needs at least one block".into()));
    }
    let table = p.table(n - 1)?;
    Ok(section_from_table(&table, n))
}

fn section_from_table(table: &BlockTable, n: usize) -> FiniteSection {
    let d = table.d();
    let mut h = Mat::zeros(n * d, n * d);
    for k in 0..n {
        h.view_mut((k * d, k * d), (d, d)).copy_from(table.b(k));
        if k + 1 < n {
            let a = table.a(k);
            h.view_mut((k * d, (k + 1) * d), (d, d)).copy_from(a);
            h.view_mut(((k + 1) * d, k * d), (d, d)).copy_from(&a.adjoint());
        }
    }
    FiniteSection { n, d, h }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeylMethod {
    Resolvent,
    Schur,
}

impl WeylMethod {
    pub fn name(self) -> &'static str {
        match self {
            WeylMethod::Resolvent => "resolvent",
            WeylMethod::Schur => "schur",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylDiagnostics {
    /// Smallest and largest eigenvalue of `Im W`.
    pub herglotz_min_eig: f64,
    pub herglotz_max_eig: f64,
    /// Norm of the last block of the first block column of the section resolvent; small values
    /// mean the truncation no longer influences `W`.
    pub tail_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylSample {
    pub z: C64,
    pub w: Mat,
    pub method: WeylMethod,
    pub n: usize,
    pub diagnostics: WeylDiagnostics,
}

impl WeylSample {
    fn new(z: C64, w: Mat, method: WeylMethod, n: usize, tail_norm: f64) -> Self {
        let eig = hermitian_eigenvalues(&im_part(&w));
        let diagnostics = WeylDiagnostics {
            herglotz_min_eig: eig.first().copied().unwrap_or(0.0),
            herglotz_max_eig: eig.last().copied().unwrap_or(0.0),
            tail_norm,
        };
        Self { z, w, method, n, diagnostics }
    }

    /// `Im W` is positive definite for `Im z > 0` and negative definite for `Im z < 0`.
    pub fn herglotz_ok(&self) -> bool {
        if self.z.im > 0.0 {
            self.diagnostics.herglotz_min_eig > 0.0
        } else if self.z.im < 0.0 {
            self.diagnostics.herglotz_max_eig < 0.0
        } else {
            true
        }
    }
}

/// `W` from a dense LU factorization of `H - z`, solved against the first `d` unit columns.
pub fn weyl_resolvent(p: &JacobiParams, z: C64, n: usize) -> Result<WeylSample> {
    let sec = finite_section(p, n)?;
    let d = sec.d;
    let nd = n * d;
    let shifted = &sec.h - identity(nd) * z;
    let rhs = Mat::from_fn(nd, d, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let x = shifted
        .lu()
        .solve(&rhs)
        .filter(crate::blockcore::matrix::is_finite)
        .ok_or_else(|| Error::SingularSolve(format!("z = {z} is an eigenvalue of the section")))?;
    let w = x.view((0, 0), (d, d)).into_owned();
    let tail = op_norm(&x.view(((n - 1) * d, 0), (d, d)).into_owned());
    Ok(WeylSample::new(z, w, WeylMethod::Resolvent, n, tail))
}

/// Backward Schur complements `G_{N-1}, ..., G_0`, returned in index order `G_0 ..= G_{N-1}`.
fn schur_chain(table: &BlockTable, z: C64, n: usize) -> Result<Vec<Mat>> {
    let d = table.d();
    let zi = identity(d) * z;
    let mut out = Vec::with_capacity(n);
    let mut g = pivot_inverse(&(table.b(n - 1) - &zi), n - 1)?;
    out.push(g.clone());
    for k in (0..n - 1).rev() {
        let a = table.a(k);
        g = pivot_inverse(&(table.b(k) - &zi - a * &g * a.adjoint()), k)?;
        out.push(g.clone());
    }
    out.reverse();
    Ok(out)
}

fn pivot_inverse(m: &Mat, k: usize) -> Result<Mat> {
    inverse(m, "").map_err(|_| Error::SingularSolve(format!("singular Schur pivot at block {k}")))
}

/// `G_0` only, without storing the chain.
pub(crate) fn schur_top(table: &BlockTable, z: C64, n: usize) -> Result<Mat> {
    let d = table.d();
    let zi = identity(d) * z;
    let mut g = pivot_inverse(&(table.b(n - 1) - &zi), n - 1)?;
    for k in (0..n - 1).rev() {
        let a = table.a(k);
        g = pivot_inverse(&(table.b(k) - &zi - a * &g * a.adjoint()), k)?;
    }
    Ok(g)
}

/// First block column `X_k` of `(H - z)^{-1}` from the Schur chain: `X_0 = G_0`, `X_{k+1} = -G_{k+1} A_k^* X_k`.
fn first_column(table: &BlockTable, chain: &[Mat]) -> Vec<Mat> {
    let mut x = Vec::with_capacity(chain.len());
    x.push(chain[0].clone());
    for k in 0..chain.len() - 1 {
        let next = -(&chain[k + 1] * table.a(k).adjoint() * &x[k]);
        x.push(next);
    }
    x
}

/// `W` from the backward Schur recursion on an `N`-block section.
pub fn weyl_schur(p: &JacobiParams, z: C64, n: usize) -> Result<WeylSample> {
    if n < 1 {
        return Err(Error::InvalidArgument("section needs at least one block".into()));
    }
    let table = p.table(n - 1)?;
    let chain = schur_chain(&table, z, n)?;
    let col = first_column(&table, &chain);
    let tail = op_norm(col.last().expect("non-empty chain"));
    Ok(WeylSample::new(z, chain[0].clone(), WeylMethod::Schur, n, tail))
}

/// The Weyl matrix solution `U = P W + Q` on `-1..=n_max` together with a consistency check.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylSolution {
    pub u: MgevSolution,
    /// Largest relative difference between `U` and the forward evaluation `P W + Q` over the
    /// first few indices, where forward evaluation is still accurate.
    pub forward_mismatch: f64,
}

/// Number of leading indices on which the forward form `P W + Q` is compared.
const FORWARD_CHECK_TERMS: usize = 8;

/// Builds `U` with `U_{-1} = I`, `U_0 = W` and `U_{k+1} = -G_{k+1} A_k^* U_k`, using the Schur
/// complements of the sample's own section.
///
/// Near the true Weyl function the forward recurrence amplifies the rounding error of `W` along
/// the dominant growing solution, so the decaying `U` is recovered by the backward ratios
/// instead. The result satisfies the same recurrence and initial data, hence equals `P W + Q`
/// exactly in exact arithmetic; terms stop at `min(n_max, N - 1)`.
pub fn weyl_solution(p: &JacobiParams, sample: &WeylSample, n_max: usize) -> Result<WeylSolution> {
    let n = sample.n;
    let table = p.table(n.max(2) - 1)?;
    let chain = schur_chain(&table, sample.z, n)?;
    let d = p.d();
    let last = n_max.min(n - 1);
    let mut terms = Vec::with_capacity(last + 2);
    terms.push(identity(d));
    terms.push(sample.w.clone());
    for k in 0..last {
        let next = -(&chain[k + 1] * table.a(k).adjoint() * &terms[k + 1]);
        terms.push(next);
    }
    let check = FORWARD_CHECK_TERMS.min(last).max(1);
    let pq = pq_from_table(&table, sample.z, check.min(table.n_max() + 1));
    let mut forward_mismatch: f64 = 0.0;
    for k in -1..=(pq.n_max.min(last) as isize) {
        let fwd = pq.p(k) * &sample.w + pq.q(k);
        let u = &terms[(k + 1) as usize];
        let scale = op_norm(u).max(op_norm(&fwd)).max(1e-300);
        forward_mismatch = forward_mismatch.max(op_norm(&(fwd - u)) / scale.max(1.0));
    }
    Ok(WeylSolution { u: Solution { z: sample.z, terms: BlockSeq::from_parts(-1, terms) }, forward_mismatch })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGap {
    /// `<Im W v, v> / Im z`.
    pub lhs: f64,
    /// `|U v|^2` summed over `0..N`.
    pub rhs: f64,
    pub gap: f64,
    /// `|W v|^2`, the first term of `rhs`.
    pub w_v_sq: f64,
    /// `|U|^2_[0, N-1]` (operator norms) against `tr Im W / Im z`.
    pub trace_lhs: f64,
    pub trace_rhs: f64,
    pub trace_bound_holds: bool,
}

pub fn energy_identity_gap(p: &JacobiParams, z: C64, n: usize, v: &Vector) -> Result<EnergyGap> {
    if z.im == 0.0 {
        return Err(Error::InvalidArgument("energy identity needs Im z != 0".into()));
    }
    if v.len() != p.d() {
        return Err(Error::Dimension { expected: p.d(), found: v.len() });
    }
    let sample = weyl_schur(p, z, n)?;
    let sol = weyl_solution(p, &sample, n - 1)?;
    let im_w = im_part(&sample.w);
    let lhs = (v.adjoint() * &im_w * v)[(0, 0)].re / z.im;
    let mut rhs = 0.0;
    let mut trace_lhs = 0.0;
    for (k, u) in sol.u.terms.indexed() {
        if k < 0 {
            continue;
        }
        rhs += (u * v).norm_squared();
        trace_lhs += op_norm(u).powi(2);
    }
    let trace_rhs = crate::blockcore::matrix::trace_re(&im_w) / z.im;
    let w_v_sq = (&sample.w * v).norm_squared();
    Ok(EnergyGap {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        w_v_sq,
        trace_lhs,
        trace_rhs,
        trace_bound_holds: trace_lhs <= trace_rhs * (1.0 + 1e-10) + 1e-300,
    })
}

/// Estimate of the number of independent square-summable solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Dimension {
    pub dim_estimate: usize,
    /// Growth exponents of the `2d` initial-condition directions, descending.
    pub growth_exponents: Vec<f64>,
    /// Exponents below `-threshold` count as decaying; `threshold = ln(100) / n_max`.
    pub threshold: f64,
    /// No exponent falls in the ambiguous band `(-2 threshold, -threshold / 2)`.
    pub dichotomy_clear: bool,
    /// `dim_estimate <= d`; only asserted off the real axis.
    pub bound_holds: bool,
}

pub fn gev_l2_dimension(p: &JacobiParams, z: C64, n_max: usize) -> Result<L2Dimension> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let table = p.table(n_max)?;
    let growth = growth_exponents(&table, z, n_max);
    let threshold = 100f64.ln() / n_max as f64;
    let dim_estimate = growth.iter().filter(|g| **g < -threshold).count();
    let dichotomy_clear = growth.iter().all(|g| !(*g > -2.0 * threshold && *g < -0.5 * threshold));
    Ok(L2Dimension {
        dim_estimate,
        growth_exponents: growth,
        threshold,
        dichotomy_clear,
        bound_holds: z.im == 0.0 || dim_estimate <= p.d(),
    })
}
