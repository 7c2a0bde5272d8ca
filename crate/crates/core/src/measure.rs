//! Discrete (atomic) matrix measures on the real line.
//!
//! A measure is a finite list of atoms `(lambda_k, W_k)` with positive semidefinite weights,
//! kept sorted by location with coincident locations merged.

use crate::blockcore::matrix::{hermitian_eigenvalues, op_norm, trace_re, zeros, Mat, C64};
use crate::blockcore::params::JacobiParams;
use crate::error::{Error, Result};
use crate::weyl::finite_section;

/// Relative tolerance under which two atom locations are the same point.
pub const MERGE_TOL: f64 = 1e-12;

/// Relative tolerance for the positive semidefiniteness test on weights.
const PSD_TOL: f64 = 1e-12;

pub fn same_location(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn check_psd(index: usize, w: &Mat) -> Result<()> {
    if !crate::blockcore::matrix::is_finite(w) {
        return Err(Error::NonFinite { what: "atom weight" });
    }
    let scale = op_norm(w).max(1.0);
    let herm_defect = op_norm(&(w - w.adjoint()));
    let min_eig = hermitian_eigenvalues(w).first().copied().unwrap_or(0.0);
    if herm_defect > PSD_TOL * scale || min_eig < -PSD_TOL * scale {
        return Err(Error::NotPsd { index, min_eig });
    }
    Ok(())
}

/// Sorts by location and adds the weights of coincident atoms.
fn merge_sorted<T: Clone + std::ops::AddAssign>(mut atoms: Vec<(f64, T)>) -> Vec<(f64, T)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, T)> = Vec::with_capacity(atoms.len());
    for (lambda, w) in atoms {
        match out.last_mut() {
            Some((l, acc)) if same_location(*l, lambda) => *acc += w,
            _ => out.push((lambda, w)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMatrixMeasure {
    d: usize,
    atoms: Vec<(f64, Mat)>,
}

impl DiscreteMatrixMeasure {
    pub fn new(d: usize, atoms: Vec<(f64, Mat)>) -> Result<Self> {
        for (i, (lambda, w)) in atoms.iter().enumerate() {
            if !lambda.is_finite() {
                return Err(Error::NonFinite { what: "atom location" });
            }
            if w.nrows() != d || w.ncols() != d {
                return Err(Error::Dimension { expected: d, found: w.nrows() });
            }
            check_psd(i, w)?;
        }
        Ok(Self { d, atoms: merge_sorted(atoms) })
    }

    pub fn zero(d: usize) -> Self {
        Self { d, atoms: Vec::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[(f64, Mat)] {
        &self.atoms
    }

    pub fn total(&self) -> Mat {
        self.mass_where(|_| true)
    }

    /// `M(omega)` for the union of atoms whose location satisfies `in_set`.
    pub fn mass_where(&self, in_set: impl Fn(f64) -> bool) -> Mat {
        self.atoms.iter().filter(|(l, _)| in_set(*l)).fold(zeros(self.d), |acc, (_, w)| acc + w)
    }

    /// `sum_k lambda_k^j W_k`.
    pub fn moment(&self, j: i32) -> Mat {
        self.atoms.iter().fold(zeros(self.d), |acc, (l, w)| acc + w * C64::new(l.powi(j), 0.0))
    }

    /// The scalar measure `omega -> tr M(omega)`.
    pub fn trace_measure(&self) -> DiscreteScalarMeasure {
        DiscreteScalarMeasure { atoms: self.atoms.iter().map(|(l, w)| (*l, trace_re(w).max(0.0))).collect() }
    }

    /// Sum with another measure of the same block size.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.d != self.d {
            return Err(Error::Dimension { expected: self.d, found: other.d });
        }
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(Self { d: self.d, atoms: merge_sorted(atoms) })
    }

    /// Locations of atoms with nonzero weight.
    pub fn support(&self) -> Vec<f64> {
        self.atoms.iter().filter(|(_, w)| op_norm(w) > 0.0).map(|(l, _)| *l).collect()
    }
}

/// A finite non-negative measure made of point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScalarMeasure {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteScalarMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for (l, m) in &atoms {
            if !l.is_finite() || !m.is_finite() {
                return Err(Error::NonFinite { what: "scalar atom" });
            }
            if *m < 0.0 {
                return Err(Error::InvalidArgument(format!("negative mass {m} at {l}")));
            }
        }
        Ok(Self { atoms: merge_sorted(atoms) })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// Mass at `lambda` (zero if there is no atom there).
    pub fn mass_at(&self, lambda: f64) -> f64 {
        self.atoms.iter().filter(|(l, _)| same_location(*l, lambda)).map(|(_, m)| m).sum()
    }

    /// Mass of a finite set of locations.
    pub fn mass_of(&self, set: &[f64]) -> f64 {
        self.atoms.iter().filter(|(l, _)| set.iter().any(|s| same_location(*s, *l))).map(|(_, m)| m).sum()
    }

    pub fn support(&self) -> Vec<f64> {
        self.atoms.iter().filter(|(_, m)| *m > 0.0).map(|(l, _)| *l).collect()
    }
}

/// `set` carries all the mass of `measure`.
pub fn is_support(measure: &DiscreteScalarMeasure, set: &[f64]) -> bool {
    measure.support().iter().all(|l| set.iter().any(|s| same_location(*s, *l)))
}

/// `set` is a support of `measure` and every support inside it differs from it by a `nu`-null set.
///
/// For atomic measures the smallest support inside `set` is the set of atoms carrying mass, so the
/// condition reduces to `nu(set \ supp(measure)) = 0`.
pub fn is_minimal_support(measure: &DiscreteScalarMeasure, set: &[f64], nu: &DiscreteScalarMeasure) -> bool {
    if !is_support(measure, set) {
        return false;
    }
    let supp = measure.support();
    let rest: Vec<f64> = set.iter().copied().filter(|s| !supp.iter().any(|l| same_location(*l, *s))).collect();
    nu.mass_of(&rest) == 0.0
}

/// Block Gaussian quadrature: eigenvalues of the `N`-block section with weights `v_k(0) v_k(0)^*`,
/// where `v_k(0)` is the first block of the `k`-th unit eigenvector.
pub fn quadrature_measure(p: &JacobiParams, n: usize) -> Result<DiscreteMatrixMeasure> {
    let sec = finite_section(p, n)?;
    let d = sec.d;
    let eig = sec.h.symmetric_eigen();
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite { what: "section eigenvalues" });
    }
    let atoms = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, lambda)| {
            let v0 = eig.eigenvectors.view((0, k), (d, 1)).into_owned();
            let w = &v0 * v0.adjoint();
            (*lambda, (&w + w.adjoint()).scale(0.5))
        })
        .collect();
    Ok(DiscreteMatrixMeasure { d, atoms: merge_sorted(atoms) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceAtom {
    pub lambda: f64,
    pub trace: f64,
    /// `W_k / tr W_k`.
    pub density: Mat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDensityView {
    pub atoms: Vec<TraceAtom>,
    /// Atoms with zero trace, which are zero weights and carry no density.
    pub dropped: usize,
}

pub fn trace_views(m: &DiscreteMatrixMeasure) -> TraceDensityView {
    let mut atoms = Vec::with_capacity(m.atoms.len());
    let mut dropped = 0;
    for (lambda, w) in &m.atoms {
        let trace = trace_re(w);
        if trace > 0.0 {
            atoms.push(TraceAtom { lambda: *lambda, trace, density: w * C64::new(1.0 / trace, 0.0) });
        } else {
            dropped += 1;
        }
    }
    TraceDensityView { atoms, dropped }
}

/// `sum_k W_k / (lambda_k - z)`.
pub fn cauchy_transform(m: &DiscreteMatrixMeasure, z: C64) -> Result<Mat> {
    let mut out = zeros(m.d);
    for (lambda, w) in &m.atoms {
        let gap = C64::new(*lambda, 0.0) - z;
        if gap.norm() <= MERGE_TOL * lambda.abs().max(1.0) {
            return Err(Error::AtomCollision { lambda: *lambda });
        }
        out += w * (C64::new(1.0, 0.0) / gap);
    }
    Ok(out)
}

/// The matrix measure `H d nu` for a density `H` given at the atoms of `nu`.
pub fn density_integral(nu: &DiscreteScalarMeasure, h: &[Mat]) -> Result<DiscreteMatrixMeasure> {
    if h.len() != nu.atoms.len() {
        return Err(Error::Dimension { expected: nu.atoms.len(), found: h.len() });
    }
    let d = h.first().map(|m| m.nrows()).unwrap_or(0);
    for (i, hk) in h.iter().enumerate() {
        if hk.nrows() != d || hk.ncols() != d {
            return Err(Error::Dimension { expected: d, found: hk.nrows() });
        }
        check_psd(i, hk)?;
    }
    let atoms = nu.atoms.iter().zip(h).map(|((l, mass), hk)| (*l, hk * C64::new(*mass, 0.0))).collect();
    Ok(DiscreteMatrixMeasure { d, atoms })
}

/// Parts of a measure that are absolutely continuous and singular with respect to a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub ac: DiscreteMatrixMeasure,
    pub sing: DiscreteMatrixMeasure,
}

/// Atoms at locations charged by `nu` form the absolutely continuous part; the rest is singular.
pub fn decompose_vs_reference(m: &DiscreteMatrixMeasure, nu: &DiscreteScalarMeasure) -> Decomposition {
    let (ac, sing): (Vec<_>, Vec<_>) = m.atoms.iter().cloned().partition(|(l, _)| nu.mass_at(*l) > 0.0);
    Decomposition {
        ac: DiscreteMatrixMeasure { d: m.d, atoms: ac },
        sing: DiscreteMatrixMeasure { d: m.d, atoms: sing },
    }
}

/// The same split for a scalar measure.
pub fn decompose_scalar_vs_reference(
    m: &DiscreteScalarMeasure,
    nu: &DiscreteScalarMeasure,
) -> (DiscreteScalarMeasure, DiscreteScalarMeasure) {
    let (ac, sing): (Vec<_>, Vec<_>) = m.atoms.iter().copied().partition(|(l, _)| nu.mass_at(*l) > 0.0);
    (DiscreteScalarMeasure { atoms: ac }, DiscreteScalarMeasure { atoms: sing })
}

/// The diagonal matrix measure whose `i`-th diagonal entry is the `i`-th scalar measure.
pub fn diagonal_compose(parts: &[DiscreteScalarMeasure]) -> DiscreteMatrixMeasure {
    let d = parts.len();
    let atoms = parts
        .iter()
        .enumerate()
        .flat_map(|(i, part)| {
            part.atoms.iter().map(move |(l, m)| {
                let mut w = zeros(d);
                w[(i, i)] = C64::new(*m, 0.0);
                (*l, w)
            })
        })
        .collect();
    DiscreteMatrixMeasure { d, atoms: merge_sorted(atoms) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcore::matrix::{identity, real_diag};
    use crate::blockcore::params::{make_family, FamilySpec, ScalarJacobi};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn single_block_quadrature() {
        let p = JacobiParams::free(1);
        let m = quadrature_measure(&p, 1).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].0, 0.0);
        assert!((m.atoms()[0].1[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn quadrature_total_and_first_moment() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let p = JacobiParams::random_bounded(3, 30, &mut rng);
        let m = quadrature_measure(&p, 30).unwrap();
        assert!(op_norm(&(m.total() - identity(3))) < 1e-10);
        assert!(op_norm(&(m.moment(1) - p.b(0))) < 1e-9);
    }

    #[test]
    fn diagonal_family_quadrature_is_diagonal() {
        let p = make_family(FamilySpec::Diagonal {
            parts: vec![ScalarJacobi::free(), ScalarJacobi::new(vec![0.7], vec![0.2])],
        })
        .unwrap();
        let m = quadrature_measure(&p, 20).unwrap();
        assert!(m.atoms().iter().all(|(_, w)| w[(0, 1)].norm() < 1e-12 && w[(1, 0)].norm() < 1e-12));
    }

    #[test]
    fn trace_view_examples() {
        let m = DiscreteMatrixMeasure::new(2, vec![(0.0, real_diag(&[1.0, 3.0])), (1.0, zeros(2))]).unwrap();
        let v = trace_views(&m);
        assert_eq!(v.dropped, 1);
        assert!(op_norm(&(&v.atoms[0].density - real_diag(&[0.25, 0.75]))) < 1e-15);
    }

    #[test]
    fn cauchy_examples() {
        let m = DiscreteMatrixMeasure::new(2, vec![(0.0, identity(2))]).unwrap();
        let got = cauchy_transform(&m, C64::new(0.0, 2.0)).unwrap();
        assert!(op_norm(&(got - identity(2) * C64::new(0.0, 0.5))) < 1e-15);
        assert!(matches!(cauchy_transform(&m, c(0.0)), Err(Error::AtomCollision { .. })));
    }

    #[test]
    fn density_integral_examples() {
        let nu = DiscreteScalarMeasure::new(vec![(0.0, 0.25), (1.0, 0.25), (2.0, 0.25), (3.0, 0.25)]).unwrap();
        let m = density_integral(&nu, &vec![identity(2); 4]).unwrap();
        assert!(m.atoms().iter().all(|(_, w)| op_norm(&(w - identity(2) * c(0.25))) < 1e-15));
        let z = density_integral(&nu, &vec![zeros(2); 4]).unwrap();
        assert_eq!(op_norm(&z.total()), 0.0);
        assert!(matches!(density_integral(&nu, &vec![real_diag(&[1.0, -1.0]); 4]), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn decomposition_examples() {
        let m = DiscreteMatrixMeasure::new(1, vec![(0.0, identity(1)), (1.0, identity(1) * c(2.0))]).unwrap();
        let all = DiscreteScalarMeasure::new(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let none = DiscreteScalarMeasure::new(vec![(5.0, 1.0)]).unwrap();
        assert!(decompose_vs_reference(&m, &all).sing.atoms().is_empty());
        assert!(decompose_vs_reference(&m, &none).ac.atoms().is_empty());
    }

    #[test]
    fn diagonal_compose_examples() {
        let d0 = DiscreteScalarMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let d1 = DiscreteScalarMeasure::new(vec![(1.0, 1.0)]).unwrap();
        let same = diagonal_compose(&[d0.clone(), d0.clone()]);
        assert_eq!(same.atoms(), &[(0.0, identity(2))]);
        let split = diagonal_compose(&[d0, d1]);
        assert_eq!(split.atoms(), &[(0.0, real_diag(&[1.0, 0.0])), (1.0, real_diag(&[0.0, 1.0]))]);
    }

    #[test]
    fn merge_and_sort() {
        let m = DiscreteMatrixMeasure::new(1, vec![(1.0, identity(1)), (0.0, identity(1)), (1.0 + 1e-14, identity(1))])
            .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[1].1[(0, 0)], c(2.0));
    }

    #[test]
    fn minimal_support_on_atoms() {
        let nu = DiscreteScalarMeasure::new(vec![(0.0, 1.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        let v = DiscreteScalarMeasure::new(vec![(0.0, 1.0), (1.0, 0.5)]).unwrap();
        assert!(is_minimal_support(&v, &[0.0, 1.0], &nu));
        assert!(is_minimal_support(&v, &[0.0, 1.0, 2.0], &nu));
        assert!(!is_minimal_support(&v, &[0.0, 1.0, 3.0], &DiscreteScalarMeasure::new(vec![(3.0, 1.0)]).unwrap()));
        assert!(!is_support(&v, &[0.0]));
    }
}
