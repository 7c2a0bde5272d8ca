use super::matrix::{Mat, Vector};
use crate::error::{Error, Result};

/// A finite sequence of blocks indexed from `start` (either -1 or 0).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSeq<T> {
    start: isize,
    terms: Vec<T>,
}

pub type BlockVecSeq = BlockSeq<Vector>;
pub type BlockMatSeq = BlockSeq<Mat>;

/// Row count of a sequence term, used for the shape checks.
pub trait Term: Clone {
    fn rows(&self) -> usize;
    fn is_square_or_vector(&self) -> bool;
}

impl Term for Vector {
    fn rows(&self) -> usize {
        self.len()
    }
    fn is_square_or_vector(&self) -> bool {
        true
    }
}

impl Term for Mat {
    fn rows(&self) -> usize {
        self.nrows()
    }
    fn is_square_or_vector(&self) -> bool {
        self.nrows() == self.ncols()
    }
}

impl<T: Term> BlockSeq<T> {
    pub fn new(start: isize, terms: Vec<T>) -> Result<Self> {
        if start != -1 && start != 0 {
            return Err(Error::InvalidArgument(format!("sequence start must be -1 or 0, got {start}")));
        }
        if let Some(first) = terms.first() {
            let d = first.rows();
            for t in &terms {
                if t.rows() != d || !t.is_square_or_vector() {
                    return Err(Error::Dimension { expected: d, found: t.rows() });
                }
            }
        }
        Ok(Self { start, terms })
    }

    pub fn d(&self) -> Option<usize> {
        self.terms.first().map(Term::rows)
    }
}

impl<T> BlockSeq<T> {
    pub(crate) fn from_parts(start: isize, terms: Vec<T>) -> Self {
        Self { start, terms }
    }

    pub fn start(&self) -> isize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last stored term (`start - 1` when empty).
    pub fn last_index(&self) -> isize {
        self.start + self.terms.len() as isize - 1
    }

    pub fn get(&self, n: isize) -> Option<&T> {
        if n < self.start {
            return None;
        }
        self.terms.get((n - self.start) as usize)
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<T> {
        self.terms
    }

    /// `(index, term)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (isize, &T)> {
        self.terms.iter().enumerate().map(move |(i, t)| (self.start + i as isize, t))
    }

    /// Drops the term at -1, if present.
    pub fn restrict_to_nonnegative(&self) -> Self
    where
        T: Clone,
    {
        if self.start == -1 {
            Self { start: 0, terms: self.terms.iter().skip(1).cloned().collect() }
        } else {
            self.clone()
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> BlockSeq<U> {
        BlockSeq { start: self.start, terms: self.terms.iter().map(f).collect() }
    }
}

/// `delta_n(v)`: `v` at index `n`, zero at `0..n`.
pub fn delta(n: usize, v: &Vector) -> BlockVecSeq {
    let mut terms = vec![Vector::zeros(v.len()); n + 1];
    terms[n] = v.clone();
    BlockSeq { start: 0, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcore::matrix::{identity, C64};

    #[test]
    fn indexing_from_minus_one() {
        let s = BlockMatSeq::new(-1, vec![identity(2), identity(2).scale(2.0)]).unwrap();
        assert_eq!(s.get(0).unwrap()[(0, 0)], C64::new(2.0, 0.0));
        assert!(s.get(1).is_none());
        assert!(s.get(-2).is_none());
        assert_eq!(s.last_index(), 0);
        assert_eq!(s.restrict_to_nonnegative().len(), 1);
    }

    #[test]
    fn rejects_bad_start_and_ragged() {
        assert!(BlockVecSeq::new(1, vec![]).is_err());
        assert!(BlockVecSeq::new(0, vec![Vector::zeros(2), Vector::zeros(3)]).is_err());
    }
}
