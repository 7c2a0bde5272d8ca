//! Jacobi parameters `(A_n)`, `(B_n)` and the built-in families.

use rand::Rng;

use super::matrix::{checked_block, identity, inverse, op_norm, real_diag, singular_values, zeros, Mat, C64};
use crate::error::{Error, Result};

/// Relative tolerance for the invertibility and Hermitianity checks.
pub const PARAM_TOL: f64 = 1e-10;

/// Scaling applied to the `n`-th term of a periodic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    None,
    /// Multiply by `(n + 1)^exponent`.
    Power {
        exponent: f64,
    },
}

impl Growth {
    pub fn factor(&self, n: usize) -> f64 {
        match *self {
            Growth::None => 1.0,
            Growth::Power { exponent } => ((n + 1) as f64).powf(exponent),
        }
    }
}

/// Parameters of a scalar Jacobi matrix, repeated periodically.
///
/// A single entry in either list is a constant sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJacobi {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ScalarJacobi {
    pub fn free() -> Self {
        Self { a: vec![1.0], b: vec![0.0] }
    }

    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { a, b }
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a[n % self.a.len()]
    }

    pub fn b(&self, n: usize) -> f64 {
        self.b[n % self.b.len()]
    }
}

/// How the blocks are produced. Unbounded sequences are rules, materialized on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockRule {
    /// `A_n = I`, `B_n = 0`.
    Free,
    Constant {
        a: Mat,
        b: Mat,
    },
    /// Diagonal blocks assembled from `d` scalar Jacobi families.
    Diagonal {
        parts: Vec<ScalarJacobi>,
    },
    /// `A_n = g_a(n) A'_{n mod p}`, `B_n = g_b(n) B'_{n mod q}`.
    PeriodicModulated {
        a: Vec<Mat>,
        b: Vec<Mat>,
        a_growth: Growth,
        b_growth: Growth,
    },
    /// User lists. Past the end of a list its last block repeats.
    Explicit {
        a: Vec<Mat>,
        b: Vec<Mat>,
    },
}

/// Knobs accepted by [`make_family`].
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Free { d: usize },
    Constant { a: Mat, b: Mat },
    Diagonal { parts: Vec<ScalarJacobi> },
    PeriodicModulated { a: Vec<Mat>, b: Vec<Mat>, a_growth: Growth, b_growth: Growth },
    Explicit { a: Vec<Mat>, b: Vec<Mat> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParams {
    d: usize,
    rule: BlockRule,
    tag: String,
}

impl JacobiParams {
    pub fn free(d: usize) -> Self {
        Self { d, rule: BlockRule::Free, tag: "free".into() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rule(&self) -> &BlockRule {
        &self.rule
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn a(&self, n: usize) -> Mat {
        match &self.rule {
            BlockRule::Free => identity(self.d),
            BlockRule::Constant { a, .. } => a.clone(),
            BlockRule::Diagonal { parts } => real_diag(&parts.iter().map(|p| p.a(n)).collect::<Vec<_>>()),
            BlockRule::PeriodicModulated { a, a_growth, .. } => a[n % a.len()].scale(a_growth.factor(n)),
            BlockRule::Explicit { a, .. } => a[n.min(a.len() - 1)].clone(),
        }
    }

    pub fn b(&self, n: usize) -> Mat {
        match &self.rule {
            BlockRule::Free => zeros(self.d),
            BlockRule::Constant { b, .. } => b.clone(),
            BlockRule::Diagonal { parts } => real_diag(&parts.iter().map(|p| p.b(n)).collect::<Vec<_>>()),
            BlockRule::PeriodicModulated { b, b_growth, .. } => b[n % b.len()].scale(b_growth.factor(n)),
            BlockRule::Explicit { b, .. } => b[n.min(b.len() - 1)].clone(),
        }
    }

    /// `A_n` with the convention `A_{-1} = -I`.
    pub fn a_ext(&self, n: isize) -> Mat {
        if n < 0 {
            -identity(self.d)
        } else {
            self.a(n as usize)
        }
    }

    /// Whether the blocks stay bounded in `n`, in which case the operator is bounded and self-adjoint.
    pub fn is_bounded(&self) -> bool {
        match &self.rule {
            BlockRule::PeriodicModulated { a_growth, b_growth, .. } => [a_growth, b_growth].iter().all(|g| match g {
                Growth::None => true,
                Growth::Power { exponent } => *exponent <= 0.0,
            }),
            _ => true,
        }
    }

    /// Number of distinct stored blocks for list-backed families (None for pure rules).
    pub fn stored_len(&self) -> Option<usize> {
        match &self.rule {
            BlockRule::Explicit { a, b } => Some(a.len().max(b.len())),
            BlockRule::PeriodicModulated { a, b, .. } => Some(a.len().max(b.len())),
            _ => None,
        }
    }

    /// Materializes blocks `0..=n_max` together with the inverses of `A_n`.
    pub fn table(&self, n_max: usize) -> Result<BlockTable> {
        let mut a = Vec::with_capacity(n_max + 1);
        let mut b = Vec::with_capacity(n_max + 1);
        let mut a_inv = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let an = self.a(n);
            if let Some(sigma_min) = singular_defect(&an) {
                return Err(Error::SingularBlock { n, sigma_min });
            }
            a_inv.push(inverse(&an, "A_n")?);
            a.push(an);
            b.push(self.b(n));
        }
        Ok(BlockTable { d: self.d, a, b, a_inv })
    }

    /// Random bounded parameters: `A_n` near the identity, `B_n` Hermitian with entries of order one.
    pub fn random_bounded<R: Rng + ?Sized>(d: usize, len: usize, rng: &mut R) -> Self {
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        for _ in 0..len {
            loop {
                let g = random_complex(d, rng);
                let an = identity(d) + g.scale(0.35);
                if singular_values(&an).last().copied().unwrap_or(0.0) > 0.25 {
                    a.push(an);
                    break;
                }
            }
            let h = random_complex(d, rng);
            b.push((&h + h.adjoint()).scale(0.5));
        }
        Self { d, rule: BlockRule::Explicit { a, b }, tag: "random".into() }
    }
}

fn random_complex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Mat {
    Mat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `Some(sigma_min)` when `A` fails the scale-aware invertibility test.
fn singular_defect(a: &Mat) -> Option<f64> {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smin <= PARAM_TOL * smax || smin == 0.0 || !smin.is_finite() {
        Some(smin)
    } else {
        None
    }
}

fn hermitian_defect(b: &Mat) -> Option<f64> {
    let defect = op_norm(&(b - b.adjoint()));
    if defect > PARAM_TOL * op_norm(b) {
        Some(defect)
    } else {
        None
    }
}

/// Materialized `A_n`, `B_n`, `A_n^{-1}` for `n <= n_max`; shared by everything evaluated on a grid of `z`.
#[derive(Debug, Clone)]
pub struct BlockTable {
    d: usize,
    a: Vec<Mat>,
    b: Vec<Mat>,
    a_inv: Vec<Mat>,
}

impl BlockTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self, n: usize) -> &Mat {
        &self.a[n]
    }

    pub fn b(&self, n: usize) -> &Mat {
        &self.b[n]
    }

    pub fn a_inv(&self, n: usize) -> &Mat {
        &self.a_inv[n]
    }

    /// `A_n^*` with `A_{-1}^* = -I`.
    pub fn a_adj_ext(&self, n: isize) -> Mat {
        if n < 0 {
            -identity(self.d)
        } else {
            self.a[n as usize].adjoint()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    SingularA { sigma_min: f64 },
    NonHermitianB { defect: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub n: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checked_up_to: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every index `n <= n_max` where `A_n` is numerically singular or `B_n` is not Hermitian.
pub fn validate_params(p: &JacobiParams, n_max: usize) -> ValidationReport {
    let mut violations = Vec::new();
    for n in 0..=n_max {
        if let Some(sigma_min) = singular_defect(&p.a(n)) {
            violations.push(Violation { n, kind: ViolationKind::SingularA { sigma_min } });
        }
        if let Some(defect) = hermitian_defect(&p.b(n)) {
            violations.push(Violation { n, kind: ViolationKind::NonHermitianB { defect } });
        }
    }
    ValidationReport { checked_up_to: n_max, violations }
}

fn check_blocks(d: usize, a: &[Mat], b: &[Mat]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("block lists must be non-empty".into()));
    }
    for m in a.iter().chain(b) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Dimension { expected: d, found: m.nrows() });
        }
        checked_block(m.clone())?;
    }
    for (n, an) in a.iter().enumerate() {
        if let Some(sigma_min) = singular_defect(an) {
            return Err(Error::SingularBlock { n, sigma_min });
        }
    }
    for (n, bn) in b.iter().enumerate() {
        if let Some(defect) = hermitian_defect(bn) {
            return Err(Error::NonHermitian { n, defect });
        }
    }
    Ok(())
}

/// Builds a parameter family, rejecting knobs that violate invertibility of `A_n` or Hermitianity of `B_n`.
pub fn make_family(spec: FamilySpec) -> Result<JacobiParams> {
    match spec {
        FamilySpec::Free { d } => {
            if d == 0 {
                return Err(Error::InvalidArgument("block size must be positive".into()));
            }
            Ok(JacobiParams::free(d))
        }
        FamilySpec::Constant { a, b } => {
            let d = a.nrows();
            check_blocks(d, std::slice::from_ref(&a), std::slice::from_ref(&b))?;
            Ok(JacobiParams { d, rule: BlockRule::Constant { a, b }, tag: "constant".into() })
        }
        FamilySpec::Diagonal { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidArgument("diagonal family needs at least one scalar part".into()));
            }
            for part in &parts {
                if part.a.is_empty() || part.b.is_empty() {
                    return Err(Error::InvalidArgument("scalar part lists must be non-empty".into()));
                }
                if let Some(n) = part.a.iter().position(|x| *x == 0.0 || !x.is_finite()) {
                    return Err(Error::SingularBlock { n, sigma_min: 0.0 });
                }
                if part.b.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { what: "scalar b" });
                }
            }
            let d = parts.len();
            Ok(JacobiParams { d, rule: BlockRule::Diagonal { parts }, tag: "diagonal".into() })
        }
        FamilySpec::PeriodicModulated { a, b, a_growth, b_growth } => {
            let d = a.first().map(|m| m.nrows()).unwrap_or(0);
            check_blocks(d, &a, &b)?;
            Ok(JacobiParams {
                d,
                rule: BlockRule::PeriodicModulated { a, b, a_growth, b_growth },
                tag: "periodic_modulated".into(),
            })
        }
        FamilySpec::Explicit { a, b } => {
            let d = a.first().map(|m| m.nrows()).unwrap_or(0);
            check_blocks(d, &a, &b)?;
            Ok(JacobiParams { d, rule: BlockRule::Explicit { a, b }, tag: "explicit".into() })
        }
    }
}
