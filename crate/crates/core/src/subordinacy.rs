//! Jitomirskaya–Last function, Gram matrices of the solution space, and nonsubordinacy diagnostics.

use crate::blockcore::matrix::{hermitian_eigenvalues, identity, inverse, min_modulus, op_norm, zeros, Mat, C64};
use crate::blockcore::params::JacobiParams;
use crate::error::{Error, Result};
use crate::seminorms::{SeminormKind, SquareSums};
use crate::weyl::{gev_l2_dimension, L2Dimension};

/// Initial horizon of the bracketing search.
pub const JL_START_HORIZON: usize = 64;
/// Largest horizon before the search gives up.
pub const JL_MAX_HORIZON: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JLSample {
    pub lambda: f64,
    pub eps: f64,
    pub ell: f64,
    /// `|f(ell) - 1/(2 eps)|` with `f(t) = |P|_[0,t] |Q|_[0,t]`.
    pub residual: f64,
    pub variant: SeminormKind,
    /// Number of polynomial terms that were evaluated.
    pub horizon: usize,
}

/// Streams `P_n(lambda)`, `Q_n(lambda)` and their squared magnitudes.
struct PqStream<'a> {
    p: &'a JacobiParams,
    z: C64,
    n: usize,
    p_prev: Mat,
    p_cur: Mat,
    q_prev: Mat,
    q_cur: Mat,
}

impl<'a> PqStream<'a> {
    fn new(p: &'a JacobiParams, z: C64) -> Self {
        let d = p.d();
        Self { p, z, n: 0, p_prev: zeros(d), p_cur: identity(d), q_prev: identity(d), q_cur: zeros(d) }
    }

    /// Advances from index `n` to `n + 1`.
    fn advance(&mut self) -> Result<()> {
        let n = self.n;
        let d = self.p.d();
        let a = self.p.a(n);
        let a_inv = inverse(&a, "A_n").map_err(|_| Error::SingularBlock { n, sigma_min: 0.0 })?;
        let shift = identity(d) * self.z - self.p.b(n);
        let a_prev_adj = self.p.a_ext(n as isize - 1).adjoint();
        let p_next = &a_inv * (&shift * &self.p_cur - &a_prev_adj * &self.p_prev);
        let q_next = &a_inv * (&shift * &self.q_cur - &a_prev_adj * &self.q_prev);
        self.p_prev = std::mem::replace(&mut self.p_cur, p_next);
        self.q_prev = std::mem::replace(&mut self.q_cur, q_next);
        self.n += 1;
        Ok(())
    }
}

fn magnitude(m: &Mat, kind: SeminormKind) -> f64 {
    match kind {
        SeminormKind::MatrixMinmod => min_modulus(m),
        _ => op_norm(m),
    }
}

/// `ell` solving `|P(lambda)|_[0,ell] |Q(lambda)|_[0,ell] = 1/(2 eps)`.
///
/// The left side is continuous and non-decreasing in `ell`, so the integer segment containing the
/// solution is found by extending the horizon (doubling from 64 up to `2^20` terms) and the
/// crossing inside it by bisection.
pub fn jl_function(p: &JacobiParams, lambda: f64, eps: f64, variant: SeminormKind) -> Result<JLSample> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if variant == SeminormKind::VectorNorm {
        return Err(Error::InvalidArgument("the JL function uses a matrix seminorm".into()));
    }
    let target = 0.5 / eps;
    let mut stream = PqStream::new(p, C64::new(lambda, 0.0));
    let mut sp = SquareSums::from_magnitudes(0, [magnitude(&stream.p_cur, variant)]);
    let mut sq = SquareSums::from_magnitudes(0, [magnitude(&stream.q_cur, variant)]);
    let f = |sp: &SquareSums, sq: &SquareSums, t: f64| (sp.squared_at(t) * sq.squared_at(t)).sqrt();

    let mut horizon = JL_START_HORIZON;
    let mut n = 0usize;
    loop {
        while n < horizon {
            if f(&sp, &sq, n as f64) >= target {
                break;
            }
            stream.advance()?;
            sp.push(magnitude(&stream.p_cur, variant));
            sq.push(magnitude(&stream.q_cur, variant));
            n += 1;
        }
        if n < horizon || f(&sp, &sq, n as f64) >= target {
            break;
        }
        if horizon >= JL_MAX_HORIZON {
            return Err(Error::HorizonExhausted { horizon });
        }
        horizon *= 2;
    }
    // f(n - 1) < target <= f(n); n >= 1 because f(0) = 0 for the operator norm and the minimum modulus.
    let (mut lo, mut hi) = ((n.max(1) - 1) as f64, n as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(&sp, &sq, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ell = hi;
    Ok(JLSample { lambda, eps, ell, residual: (f(&sp, &sq, ell) - target).abs(), variant, horizon: n + 1 })
}

/// `f(t) = |P(lambda)|_[0,t] |Q(lambda)|_[0,t]` on a list of `t` values, for brute-force comparisons.
pub fn jl_product(p: &JacobiParams, lambda: f64, ts: &[f64], variant: SeminormKind) -> Result<Vec<f64>> {
    let t_max = ts.iter().copied().fold(0.0, f64::max).ceil() as usize + 1;
    let mut stream = PqStream::new(p, C64::new(lambda, 0.0));
    let mut pm = vec![magnitude(&stream.p_cur, variant)];
    let mut qm = vec![magnitude(&stream.q_cur, variant)];
    for _ in 0..t_max {
        stream.advance()?;
        pm.push(magnitude(&stream.p_cur, variant));
        qm.push(magnitude(&stream.q_cur, variant));
    }
    let sp = SquareSums::from_magnitudes(0, pm);
    let sq = SquareSums::from_magnitudes(0, qm);
    Ok(ts.iter().map(|t| (sp.squared_at(*t) * sq.squared_at(*t)).sqrt()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramNode {
    pub t: f64,
    /// `c^* G_t c = |u(c)|^2_[0,t]` for the solution with initial data `c = (u_{-1}, u_0)`.
    pub g: Mat,
    pub cond: f64,
    /// The smallest eigenvalue is lost in rounding (`lambda_min <= 100 eps lambda_max`); `cond` is then `+inf`.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramTrajectory {
    pub lambda: f64,
    pub nodes: Vec<GramNode>,
}

fn gram_cond(g: &Mat) -> (f64, bool) {
    let ev = hermitian_eigenvalues(g);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if hi <= 0.0 || lo <= 100.0 * f64::EPSILON * hi {
        (f64::INFINITY, true)
    } else {
        (hi / lo, false)
    }
}

/// Gram matrices of the map `c -> u(c)` in the interpolated seminorm, at the requested `t`.
pub fn solution_gram(p: &JacobiParams, lambda: f64, t_nodes: &[f64]) -> Result<GramTrajectory> {
    if t_nodes.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("t nodes must be finite and non-negative".into()));
    }
    if t_nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("t nodes must be strictly increasing".into()));
    }
    let d = p.d();
    let mut stream = PqStream::new(p, C64::new(lambda, 0.0));
    // Row block [Q_k, P_k] maps c = (u_{-1}, u_0) to u_k.
    let row = |s: &PqStream| {
        let mut m = Mat::zeros(d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&s.q_cur);
        m.view_mut((0, d), (d, d)).copy_from(&s.p_cur);
        m
    };
    let term = |m: &Mat| m.adjoint() * m;
    let mut g_n = term(&row(&stream));
    let mut next_term = {
        stream.advance()?;
        term(&row(&stream))
    };
    let mut n = 0usize;
    let mut nodes = Vec::with_capacity(t_nodes.len());
    for &t in t_nodes {
        let target = t.floor() as usize;
        while n < target {
            g_n += &next_term;
            stream.advance()?;
            next_term = term(&row(&stream));
            n += 1;
        }
        let frac = t - target as f64;
        let g = if frac == 0.0 { g_n.clone() } else { &g_n + &next_term * C64::new(frac, 0.0) };
        let g = (&g + g.adjoint()).scale(0.5);
        let (cond, saturated) = gram_cond(&g);
        nodes.push(GramNode { t, g, cond, saturated });
    }
    Ok(GramTrajectory { lambda, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    NonsubordinateEvidence,
    SubordinateEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::NonsubordinateEvidence => "nonsubordinate_evidence",
            Verdict::SubordinateEvidence => "subordinate_evidence",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Default bound on `cond(G_t)` for nonsubordinacy evidence.
pub const DEFAULT_COND_CAP: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct NonsubDiagnostic {
    pub lambda: f64,
    pub cond_trajectory: Vec<(f64, f64)>,
    pub verdict: Verdict,
    pub cap: f64,
    pub horizon: f64,
    /// Slope of `ln(cond) / 2` against `t` over the final decade when `cond` exceeds the cap;
    /// for an exponential dichotomy this is the gap between the growing and decaying rates.
    pub growth_rate: Option<f64>,
    /// Smallest eigenvalue of the last Gram matrix.
    pub min_eig_last: f64,
}

/// Compares solutions of the eigenvalue equation at real `lambda` through `cond(G_t)`.
///
/// Every ratio `|u|_[0,t] / |v|_[0,t]` of two solutions with unit initial data is at most
/// `sqrt(cond(G_t))`. The verdict looks at the final decade `[t_max / 10, t_max]` of the grid:
/// all values below `cap` is evidence of nonsubordinacy, values above `cap` that keep growing are
/// evidence of a subordinate solution.
pub fn nonsub_diagnostic(p: &JacobiParams, lambda: f64, t_grid: &[f64], cap: f64) -> Result<NonsubDiagnostic> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("t grid is empty".into()));
    }
    let traj = solution_gram(p, lambda, t_grid)?;
    let t_max = *t_grid.last().expect("non-empty");
    let cond_trajectory: Vec<(f64, f64)> = traj.nodes.iter().map(|nd| (nd.t, nd.cond)).collect();
    let tail: Vec<(f64, f64)> = cond_trajectory.iter().copied().filter(|(t, _)| *t >= t_max / 10.0).collect();
    let all_below = tail.iter().all(|(_, c)| *c <= cap);
    let growing = tail.iter().all(|(_, c)| *c > cap) && tail.windows(2).all(|w| w[1].1 >= w[0].1);
    let verdict = if all_below {
        Verdict::NonsubordinateEvidence
    } else if growing {
        Verdict::SubordinateEvidence
    } else {
        Verdict::Inconclusive
    };
    let fit: Vec<(f64, f64)> =
        tail.iter().filter(|(_, c)| c.is_finite() && *c > cap).map(|(t, c)| (*t, 0.5 * c.ln())).collect();
    let growth_rate = (fit.len() >= 2).then(|| slope(&fit));
    let min_eig_last = hermitian_eigenvalues(&traj.nodes.last().expect("non-empty").g)[0];
    Ok(NonsubDiagnostic { lambda, cond_trajectory, verdict, cap, horizon: t_max, growth_rate, min_eig_last })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub lambda: f64,
    /// `Some` only when the evidence and the self-adjointness premise both hold.
    pub claim: Option<String>,
    pub reason: String,
    pub gev_dimension: Option<L2Dimension>,
}

/// Turns a nonsubordinacy verdict into a spectral statement at `lambda`, gated on self-adjointness.
///
/// Self-adjointness is taken from `self_adjoint_asserted` or from boundedness of the family; it is
/// never decided numerically.
pub fn spectral_consequence_report(
    p: &JacobiParams,
    diag: &NonsubDiagnostic,
    self_adjoint_asserted: bool,
) -> Result<SpectralReport> {
    let lambda = diag.lambda;
    if diag.verdict != Verdict::NonsubordinateEvidence {
        return Ok(SpectralReport {
            lambda,
            claim: None,
            reason: format!("verdict {} carries no spectral claim", diag.verdict.label()),
            gev_dimension: None,
        });
    }
    if !(self_adjoint_asserted || p.is_bounded()) {
        return Ok(SpectralReport {
            lambda,
            claim: None,
            reason: "family is unbounded and not asserted self-adjoint".into(),
            gev_dimension: None,
        });
    }
    let horizon = diag.horizon.ceil().max(1.0) as usize;
    let dim = gev_l2_dimension(p, C64::new(lambda, 0.0), horizon)?;
    let claim = format!(
        "numerical evidence: no square-summable generalized eigenvector at lambda = {lambda}; lambda lies in the \
         spectrum and is not an eigenvalue (cond cap {:e}, horizon {}, l2-dimension estimate {})",
        diag.cap, diag.horizon, dim.dim_estimate
    );
    Ok(SpectralReport {
        lambda,
        claim: Some(claim),
        reason: "nonsubordinate evidence".into(),
        gev_dimension: Some(dim),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcore::matrix::Vector;
    use crate::seminorms::seminorm;
    use crate::solutions::{solve_forward, StartMode};

    #[test]
    fn jl_free_scalar_residual_and_monotonicity() {
        let p = JacobiParams::free(1);
        let mut prev = 0.0;
        for eps in [0.5, 0.1, 0.01, 0.001] {
            let s = jl_function(&p, 0.0, eps, SeminormKind::MatrixNorm).unwrap();
            assert!(s.residual <= 1e-8 * 0.5 / eps);
            assert!(s.ell > prev);
            prev = s.ell;
        }
    }

    #[test]
    fn jl_matches_dense_scan() {
        let p = JacobiParams::free(1);
        let eps = 0.05;
        let ell = jl_function(&p, 0.0, eps, SeminormKind::MatrixNorm).unwrap().ell;
        let ts: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let f = jl_product(&p, 0.0, &ts, SeminormKind::MatrixNorm).unwrap();
        let first = ts[f.iter().position(|v| *v >= 0.5 / eps).unwrap()];
        assert!((first - ell).abs() <= 0.01);
    }

    #[test]
    fn jl_exhaustion_is_reported() {
        let p = JacobiParams::free(1);
        // At the band centre f grows linearly, so eps = 1e-9 would need about 1e9 terms.
        assert!(matches!(jl_function(&p, 0.0, 1e-9, SeminormKind::MatrixNorm), Err(Error::HorizonExhausted { .. })));
    }

    #[test]
    fn gram_matches_direct_seminorm() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
        let p = JacobiParams::random_bounded(2, 30, &mut rng);
        let lambda = 0.4;
        let ts = [0.0, 1.0, 2.5, 7.25, 20.0];
        let traj = solution_gram(&p, lambda, &ts).unwrap();
        assert!(hermitian_eigenvalues(&traj.nodes[0].g).iter().filter(|e| **e > 1e-12).count() <= 2);
        let c = Vector::from_fn(4, |i, _| C64::new(0.3 * i as f64 - 0.5, 0.2 + 0.1 * i as f64));
        let um1 = c.rows(0, 2).into_owned();
        let u0 = c.rows(2, 2).into_owned();
        let sol = solve_forward(&p, C64::new(lambda, 0.0), (&um1, &u0), StartMode::FromMinus1, 25).unwrap();
        let seq = sol.terms.restrict_to_nonnegative();
        for nd in &traj.nodes {
            let quad = (c.adjoint() * &nd.g * &c)[(0, 0)].re;
            let direct = seminorm(&seq, SeminormKind::VectorNorm, 0, nd.t).unwrap().powi(2);
            assert!((quad - direct).abs() < 1e-10 * (1.0 + quad));
        }
    }

    #[test]
    fn free_verdicts() {
        let p = JacobiParams::free(1);
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 * 100.0).collect();
        let d0 = nonsub_diagnostic(&p, 0.0, &grid, DEFAULT_COND_CAP).unwrap();
        assert_eq!(d0.verdict, Verdict::NonsubordinateEvidence);
        let grid3: Vec<f64> = (1..=40).map(|i| i as f64).collect();
        let d3 = nonsub_diagnostic(&p, 3.0, &grid3, DEFAULT_COND_CAP).unwrap();
        assert_eq!(d3.verdict, Verdict::SubordinateEvidence);
        let rate = d3.growth_rate.unwrap();
        assert!((rate - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 0.05, "{rate}");
    }

    #[test]
    fn report_gating() {
        let p = JacobiParams::free(1);
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 20.0).collect();
        let d0 = nonsub_diagnostic(&p, 0.0, &grid, DEFAULT_COND_CAP).unwrap();
        let r = spectral_consequence_report(&p, &d0, false).unwrap();
        assert!(r.claim.is_some());
        assert_eq!(r.gev_dimension.unwrap().dim_estimate, 0);
        let grid3: Vec<f64> = (1..=40).map(|i| i as f64).collect();
        let d3 = nonsub_diagnostic(&p, 3.0, &grid3, DEFAULT_COND_CAP).unwrap();
        assert!(spectral_consequence_report(&p, &d3, true).unwrap().claim.is_none());
        let inconclusive = NonsubDiagnostic { verdict: Verdict::Inconclusive, ..d0 };
        assert!(spectral_consequence_report(&p, &inconclusive, true).unwrap().claim.is_none());
    }
}
