//! Interpolated seminorms `|X|_[n1, t]` for vector and matrix sequences.
//!
//! The squared seminorm is the affine interpolation of the partial sums of
//! squared term magnitudes, so it is continuous and non-decreasing in `t`.

use crate::blockcore::matrix::{min_modulus, op_norm, Mat, Vector};
use crate::blockcore::seq::BlockSeq;
use crate::error::{Error, Result};

/// Which per-term functional enters the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeminormKind {
    /// Euclidean norm of `C^d` terms.
    VectorNorm,
    /// Operator norm of matrix terms.
    MatrixNorm,
    /// Minimum modulus of matrix terms.
    MatrixMinmod,
}

pub trait SeminormTerm {
    fn magnitude(&self, kind: SeminormKind) -> Result<f64>;
}

impl SeminormTerm for Vector {
    fn magnitude(&self, kind: SeminormKind) -> Result<f64> {
        match kind {
            SeminormKind::VectorNorm | SeminormKind::MatrixNorm => Ok(self.norm()),
            SeminormKind::MatrixMinmod => {
                Err(Error::InvalidArgument("minimum-modulus seminorm applies to matrix sequences only".into()))
            }
        }
    }
}

impl SeminormTerm for Mat {
    fn magnitude(&self, kind: SeminormKind) -> Result<f64> {
        match kind {
            SeminormKind::MatrixNorm => Ok(op_norm(self)),
            SeminormKind::MatrixMinmod => Ok(min_modulus(self)),
            SeminormKind::VectorNorm => {
                Err(Error::InvalidArgument("vector seminorm applies to vector sequences only".into()))
            }
        }
    }
}

/// `aff(f)(t)` for `f` indexed from `start`.
pub fn affine_interp(f: &[f64], start: isize, t: f64) -> Result<f64> {
    if !t.is_finite() || t < start as f64 {
        return Err(Error::InvalidArgument(format!("t = {t} below start index {start}")));
    }
    let last = start + f.len() as isize - 1;
    if f.is_empty() || t > last as f64 {
        return Err(Error::InvalidArgument(format!("t = {t} beyond last node {last}")));
    }
    let fl = t.floor();
    let k = (fl as isize - start) as usize;
    let frac = t - fl;
    if frac == 0.0 {
        return Ok(f[k]);
    }
    Ok(f[k] + frac * (f[k + 1] - f[k]))
}

/// Partial sums `S(n) = sum_{k=n1}^{n} m(X_k)^2`, with terms past the stored ones treated as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSums {
    n1: isize,
    cumulative: Vec<f64>,
    last_term_sq: f64,
}

impl SquareSums {
    pub fn from_magnitudes(n1: isize, magnitudes: impl IntoIterator<Item = f64>) -> Self {
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        let mut last_term_sq = 0.0;
        for m in magnitudes {
            last_term_sq = m * m;
            acc += last_term_sq;
            cumulative.push(acc);
        }
        Self { n1, cumulative, last_term_sq }
    }

    pub fn new<T: SeminormTerm>(x: &BlockSeq<T>, kind: SeminormKind, n1: isize) -> Result<Self> {
        if n1 < x.start() {
            return Err(Error::InvalidArgument(format!("n1 = {n1} below sequence start {}", x.start())));
        }
        let mags = x.indexed().filter(|(n, _)| *n >= n1).map(|(_, t)| t.magnitude(kind)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_magnitudes(n1, mags))
    }

    pub fn n1(&self) -> isize {
        self.n1
    }

    /// Node values `S(n)` for `n = n1, n1 + 1, ...`.
    pub fn nodes(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn push(&mut self, magnitude: f64) {
        let acc = self.cumulative.last().copied().unwrap_or(0.0);
        self.last_term_sq = magnitude * magnitude;
        self.cumulative.push(acc + self.last_term_sq);
    }

    fn node(&self, n: isize) -> f64 {
        if n < self.n1 {
            return 0.0;
        }
        let k = (n - self.n1) as usize;
        match self.cumulative.get(k) {
            Some(v) => *v,
            None => self.cumulative.last().copied().unwrap_or(0.0),
        }
    }

    /// Squared seminorm at `t >= n1`.
    pub fn squared_at(&self, t: f64) -> f64 {
        let fl = t.floor();
        let n = fl as isize;
        let frac = t - fl;
        let lo = self.node(n);
        if frac == 0.0 {
            lo
        } else {
            lo + frac * (self.node(n + 1) - lo)
        }
    }

    /// Squared full tail sum, possibly `+inf`.
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn last_term_sq(&self) -> f64 {
        self.last_term_sq
    }
}

/// `|X|_[n1, t]` for finite `t >= n1`.
pub fn seminorm<T: SeminormTerm>(x: &BlockSeq<T>, kind: SeminormKind, n1: isize, t: f64) -> Result<f64> {
    if !t.is_finite() || t < n1 as f64 {
        return Err(Error::InvalidArgument(format!("t = {t} must be finite and >= n1 = {n1}")));
    }
    Ok(SquareSums::new(x, kind, n1)?.squared_at(t).sqrt())
}

/// Tail sum `|X|_[n1, inf]` over the stored horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    /// Magnitude of the last stored term; a large value signals that the horizon is too short.
    pub last_term: f64,
    /// The sum overflowed to `+inf`; expected for non-square-summable solutions.
    pub overflow: bool,
}

pub fn seminorm_infinite<T: SeminormTerm>(x: &BlockSeq<T>, kind: SeminormKind, n1: isize) -> Result<TailSum> {
    let sums = SquareSums::new(x, kind, n1)?;
    let total = sums.total();
    Ok(TailSum { value: total.sqrt(), last_term: sums.last_term_sq().sqrt(), overflow: !total.is_finite() })
}

/// Ratio of two seminorms at `t` together with bracketing integer nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientBracket {
    pub value: f64,
    pub lower_node: isize,
    pub upper_node: isize,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
}

pub fn quotient_brackets<T: SeminormTerm>(
    x: &BlockSeq<T>,
    y: &BlockSeq<T>,
    kind: SeminormKind,
    n1: isize,
    t: f64,
) -> Result<QuotientBracket> {
    if !t.is_finite() || t < n1 as f64 {
        return Err(Error::InvalidArgument(format!("t = {t} must be finite and >= n1 = {n1}")));
    }
    let sx = SquareSums::new(x, kind, n1)?;
    let sy = SquareSums::new(y, kind, n1)?;
    let n = t.floor() as isize;
    if sy.squared_at(n as f64) <= 0.0 {
        return Err(Error::InvalidArgument(format!("denominator seminorm vanishes at node {n}")));
    }
    let ratio = |s: f64| (sx.squared_at(s) / sy.squared_at(s)).sqrt();
    let value = ratio(t);
    let (r0, r1) = (ratio(n as f64), ratio((n + 1) as f64));
    let (lower_node, upper_node) = if r0 <= r1 { (n, n + 1) } else { (n + 1, n) };
    Ok(QuotientBracket { value, lower_node, upper_node, lower_ratio: r0.min(r1), upper_ratio: r0.max(r1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcore::matrix::{real_diag, C64};

    fn scalar_vecs(vals: &[f64]) -> BlockSeq<Vector> {
        BlockSeq::new(0, vals.iter().map(|x| Vector::from_element(1, C64::new(*x, 0.0))).collect()).unwrap()
    }

    #[test]
    fn affine_examples() {
        let f = [0.0, 1.0, 4.0];
        assert_eq!(affine_interp(&f, 0, 1.5).unwrap(), 2.5);
        assert_eq!(affine_interp(&f, 0, 2.0).unwrap(), 4.0);
        assert!(affine_interp(&f, 0, -0.5).is_err());
    }

    #[test]
    fn direct_evaluation() {
        let x = scalar_vecs(&[1.0, 2.0, 3.0, 4.0]);
        let v = seminorm(&x, SeminormKind::VectorNorm, 0, 1.5).unwrap();
        assert!((v - 9.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn minmod_with_singular_term() {
        let x = BlockSeq::new(0, vec![real_diag(&[2.0, 3.0]), real_diag(&[1.0, 0.0])]).unwrap();
        let v = seminorm(&x, SeminormKind::MatrixMinmod, 0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn infinite_horizon_on_finite_support() {
        let x = scalar_vecs(&[1.0, 2.0, 3.0]);
        let tail = seminorm_infinite(&x, SeminormKind::VectorNorm, 0).unwrap();
        assert_eq!(tail.value, seminorm(&x, SeminormKind::VectorNorm, 0, 2.0).unwrap());
        assert!(!tail.overflow);
        let big = scalar_vecs(&[1e200, 1e200]);
        assert!(seminorm_infinite(&big, SeminormKind::VectorNorm, 0).unwrap().overflow);
    }

    #[test]
    fn wrong_kind_rejected() {
        let x = scalar_vecs(&[1.0]);
        assert!(seminorm(&x, SeminormKind::MatrixMinmod, 0, 0.0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let x = scalar_vecs(&[1.0, 1.0, 1.0]);
        let y = scalar_vecs(&[1.0, 2.0, 2.0]);
        let q = quotient_brackets(&x, &x, SeminormKind::VectorNorm, 0, 0.7).unwrap();
        assert_eq!((q.value, q.lower_ratio, q.upper_ratio), (1.0, 1.0, 1.0));
        let q = quotient_brackets(&x, &y, SeminormKind::VectorNorm, 0, 0.5).unwrap();
        assert!((q.upper_ratio - 1.0).abs() < 1e-15);
        assert!((q.lower_ratio - (2.0f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!(q.lower_ratio <= q.value && q.value <= q.upper_ratio);
        assert_eq!((q.lower_node, q.upper_node), (1, 0));
    }

    #[test]
    fn zero_denominator() {
        let x = scalar_vecs(&[1.0, 1.0]);
        let y = scalar_vecs(&[0.0, 1.0]);
        assert!(quotient_brackets(&x, &y, SeminormKind::VectorNorm, 0, 0.5).is_err());
    }
}
