//! Boundary values `W(lambda + i eps)` along a ladder of `eps`, and the per-`lambda` classification.

use rayon::prelude::*;

use super::schur_top;
use crate::blockcore::matrix::{hermitian_eigenvalues, im_part, op_norm, trace_re, Mat, C64};
use crate::blockcore::params::{BlockTable, JacobiParams};
use crate::error::{Error, Result};

/// Truncation size as a function of `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NRule {
    /// `N = ceil(c / eps)`.
    Inverse {
        c: f64,
    },
    Fixed(usize),
}

impl Default for NRule {
    fn default() -> Self {
        NRule::Inverse { c: 50.0 }
    }
}

impl NRule {
    pub fn size(&self, eps: f64) -> usize {
        match *self {
            NRule::Inverse { c } => ((c / eps).ceil() as usize).max(1),
            NRule::Fixed(n) => n.max(1),
        }
    }
}

/// Tunable constants of the classification rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanThresholds {
    /// An eigenvalue of the extrapolated `Im W` counts toward the rank when it exceeds
    /// `max(rank_abs, rank_rel * |Im W(lambda + i eps_min)|)`.
    pub rank_abs: f64,
    pub rank_rel: f64,
    /// Successive differences `|W_k - W_{k+1}|` must shrink by at least this ratio.
    pub cauchy_ratio: f64,
    /// The trace of `Im W` must grow by this factor on each of the last `sing_rungs` steps...
    pub sing_growth: f64,
    pub sing_rungs: usize,
    /// ...and end above this value.
    pub sing_min_trace: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        Self { rank_abs: 1e-6, rank_rel: 1e-3, cauchy_ratio: 0.9, sing_growth: 2.0, sing_rungs: 3, sing_min_trace: 1e3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// `W` converges and the boundary value of `Im W` has this rank.
    Ac {
        rank: usize,
    },
    /// `tr Im W` diverges along the ladder.
    SingCandidate,
    /// `W` converges to a limit with vanishing imaginary part.
    Outside,
    Undecided,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::Ac { rank } => format!("ac({rank})"),
            Classification::SingCandidate => "sing_candidate".into(),
            Classification::Outside => "outside".into(),
            Classification::Undecided => "undecided".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub eps: f64,
    pub n: usize,
    /// `None` when the evaluation failed; the message is kept in `error`.
    pub w: Option<Mat>,
    pub error: Option<String>,
}

impl ScanPoint {
    pub fn tr_im(&self) -> Option<f64> {
        self.w.as_ref().map(|w| trace_re(&im_part(w)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaResult {
    pub lambda: f64,
    pub points: Vec<ScanPoint>,
    pub classification: Classification,
    /// Quadratic `eps -> 0` extrapolation of `Im W` from the last three rungs.
    pub im_limit: Option<Mat>,
    /// `Im W(lambda + i eps_min) / pi`, recorded for `ac` points.
    pub density: Option<Mat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryScan {
    pub lambda_grid: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    pub thresholds: ScanThresholds,
    pub results: Vec<LambdaResult>,
}

fn check_ladder(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("eps ladder is empty".into()));
    }
    if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidArgument("eps ladder entries must be positive and finite".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps ladder must be strictly decreasing".into()));
    }
    Ok(())
}

pub fn boundary_scan(
    p: &JacobiParams,
    lambda_grid: &[f64],
    eps_ladder: &[f64],
    n_rule: NRule,
    thresholds: ScanThresholds,
) -> Result<BoundaryScan> {
    check_ladder(eps_ladder)?;
    let n_max = eps_ladder.iter().map(|e| n_rule.size(*e)).max().unwrap_or(1);
    let table = p.table(n_max - 1)?;
    boundary_scan_table(&table, lambda_grid, eps_ladder, n_rule, thresholds)
}

/// Scan on a pre-materialized table that covers every truncation size the rule produces.
pub fn boundary_scan_table(
    table: &BlockTable,
    lambda_grid: &[f64],
    eps_ladder: &[f64],
    n_rule: NRule,
    thresholds: ScanThresholds,
) -> Result<BoundaryScan> {
    check_ladder(eps_ladder)?;
    let n_max = eps_ladder.iter().map(|e| n_rule.size(*e)).max().unwrap_or(1);
    if n_max > table.n_max() + 1 {
        return Err(Error::InvalidArgument(format!(
            "table covers {} blocks but the ladder needs {n_max}",
            table.n_max() + 1
        )));
    }
    let results = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let points = eps_ladder
                .iter()
                .map(|&eps| {
                    let n = n_rule.size(eps);
                    match schur_top(table, C64::new(lambda, eps), n) {
                        Ok(w) if crate::blockcore::matrix::is_finite(&w) => {
                            ScanPoint { eps, n, w: Some(w), error: None }
                        }
                        Ok(_) => ScanPoint { eps, n, w: None, error: Some("non-finite W".into()) },
                        Err(e) => ScanPoint { eps, n, w: None, error: Some(e.to_string()) },
                    }
                })
                .collect();
            classify(lambda, points, &thresholds)
        })
        .collect();
    Ok(BoundaryScan { lambda_grid: lambda_grid.to_vec(), eps_ladder: eps_ladder.to_vec(), thresholds, results })
}

fn classify(lambda: f64, points: Vec<ScanPoint>, th: &ScanThresholds) -> LambdaResult {
    let undecided = |points| LambdaResult {
        lambda,
        points,
        classification: Classification::Undecided,
        im_limit: None,
        density: None,
    };
    if points.iter().any(|p| p.w.is_none()) {
        return undecided(points);
    }
    let ws: Vec<&Mat> = points.iter().map(|p| p.w.as_ref().expect("checked above")).collect();
    let traces: Vec<f64> = points.iter().map(|p| p.tr_im().expect("checked above")).collect();
    let k = ws.len();

    if k > th.sing_rungs {
        let tail = &traces[k - th.sing_rungs - 1..];
        let growing = tail.windows(2).all(|w| w[0] > 0.0 && w[1] >= th.sing_growth * w[0]);
        if growing && traces[k - 1] > th.sing_min_trace {
            return LambdaResult {
                lambda,
                points,
                classification: Classification::SingCandidate,
                im_limit: None,
                density: None,
            };
        }
    }

    if k < 3 {
        return undecided(points);
    }
    let diffs: Vec<f64> = ws.windows(2).map(|w| op_norm(&(w[0] - w[1]))).collect();
    let cauchy = diffs.windows(2).all(|d| d[1] <= th.cauchy_ratio * d[0] || d[1] == 0.0);
    if !cauchy {
        return undecided(points);
    }

    // Quadratic extrapolation to eps = 0 through the last three rungs. Outside the spectrum
    // Im W vanishes like eps, and near a band edge the eps^2 term is still large enough on
    // typical ladders to fool a linear fit.
    let eps: Vec<f64> = points[k - 3..].iter().map(|p| p.eps).collect();
    let im_last = im_part(ws[k - 1]);
    let mut im_limit = Mat::zeros(im_last.nrows(), im_last.ncols());
    for i in 0..3 {
        let weight: f64 = (0..3).filter(|j| *j != i).map(|j| eps[j] / (eps[j] - eps[i])).product();
        im_limit += im_part(ws[k - 3 + i]) * C64::new(weight, 0.0);
    }
    let threshold = th.rank_abs.max(th.rank_rel * op_norm(&im_last));
    let rank = hermitian_eigenvalues(&im_limit).iter().filter(|e| **e > threshold).count();
    let density = (rank > 0).then(|| im_last.clone() * C64::new(1.0 / std::f64::consts::PI, 0.0));
    let classification = if rank > 0 { Classification::Ac { rank } } else { Classification::Outside };
    LambdaResult { lambda, points, classification, im_limit: Some(im_limit), density }
}

/// A maximal run of consecutive grid points none of which is a singular candidate or undecided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcInterval {
    pub lo: f64,
    pub hi: f64,
    /// Whether any point of the run carries spectral density.
    pub has_ac: bool,
    pub max_rank: usize,
}

/// Grid intervals free of singular candidates.
///
/// This is a numerical heuristic: the operator is reported as absolutely continuous over a grid
/// interval when every grid point there is classified `ac` or `outside`, and closures are taken
/// as the closed hull of the run. It does not certify anything between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct AcReport {
    pub intervals: Vec<AcInterval>,
    pub sing_candidates: Vec<f64>,
    pub undecided: Vec<f64>,
}

pub fn ac_report(scan: &BoundaryScan) -> AcReport {
    let mut intervals = Vec::new();
    let mut sing_candidates = Vec::new();
    let mut undecided = Vec::new();
    let mut run: Option<AcInterval> = None;
    for r in &scan.results {
        match r.classification {
            Classification::Ac { .. } | Classification::Outside => {
                let rank = match r.classification {
                    Classification::Ac { rank } => rank,
                    _ => 0,
                };
                let cur = run.get_or_insert(AcInterval { lo: r.lambda, hi: r.lambda, has_ac: false, max_rank: 0 });
                cur.hi = r.lambda;
                cur.has_ac |= rank > 0;
                cur.max_rank = cur.max_rank.max(rank);
            }
            other => {
                if let Some(done) = run.take() {
                    intervals.push(done);
                }
                if other == Classification::SingCandidate {
                    sing_candidates.push(r.lambda);
                } else {
                    undecided.push(r.lambda);
                }
            }
        }
    }
    intervals.extend(run);
    AcReport { intervals, sing_candidates, undecided }
}
