//! Gram matrices of real-energy solutions, the Jitomirskaya-Last length scale and the verdict logic.

mod common;

use bjweyl::blockcore::matrix::{hermitian_eigenvalues, Vector, C64};
use bjweyl::blockcore::params::{make_family, FamilySpec, Growth, JacobiParams};
use bjweyl::error::Error;
use bjweyl::measure::DiscreteMatrixMeasure;
use bjweyl::seminorms::{seminorm, SeminormKind};
use bjweyl::solutions::{solve_forward, StartMode};
use bjweyl::subordinacy::{
    jl_function, nonsub_diagnostic, solution_gram, spectral_consequence_report, Verdict, DEFAULT_COND_CAP,
};
use common::*;
use rand::Rng;

#[test]
fn gram_quadratic_form_is_the_solution_seminorm() {
    let mut r = rng(41);
    for i in 0..100 {
        let d = 1 + i % 3;
        let p = random_params(d, 40, &mut r);
        let lambda = r.gen_range(-2.5..2.5);
        let t = r.gen_range(0.0..35.0);
        let cvec = Vector::from_fn(2 * d, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let g = &solution_gram(&p, lambda, &[t]).unwrap().nodes[0].g;
        let quad = (cvec.adjoint() * g * &cvec)[(0, 0)].re;
        let (um1, u0) = (cvec.rows(0, d).into_owned(), cvec.rows(d, d).into_owned());
        let u = solve_forward(&p, C64::new(lambda, 0.0), (&um1, &u0), StartMode::FromMinus1, 40).unwrap();
        let s = seminorm(&u.restrict_to_nonnegative().terms, SeminormKind::VectorNorm, 0, t).unwrap();
        assert!((quad - s * s).abs() < 1e-9 * (1.0 + quad), "{quad} vs {}", s * s);
    }
}

#[test]
fn interior_condition_numbers_are_bounded_by_the_nodes() {
    let mut r = rng(42);
    for i in 0..40 {
        let d = 1 + i % 3;
        let p = random_params(d, 30, &mut r);
        let lambda = r.gen_range(-2.0..2.0);
        let n = r.gen_range(2..25) as f64;
        let ts: Vec<f64> = (0..=20).map(|k| n + k as f64 / 20.0).collect();
        let traj = solution_gram(&p, lambda, &ts).unwrap();
        let (lo, hi) = (traj.nodes[0].cond, traj.nodes[20].cond);
        for node in &traj.nodes {
            assert!(node.cond <= lo.max(hi) * (1.0 + 1e-9), "t={} cond {} nodes {lo} {hi}", node.t, node.cond);
        }
        for w in traj.nodes.windows(2) {
            let diff = &w[1].g - &w[0].g;
            assert!(hermitian_eigenvalues(&diff)[0] >= -1e-9 * norm(&w[1].g));
        }
    }
}

#[test]
fn bounded_condition_number_forces_every_solution_to_diverge() {
    let p = JacobiParams::free(2);
    let grid: Vec<f64> = (1..=100).map(|i| i as f64 * 100.0).collect();
    let diag = nonsub_diagnostic(&p, 0.5, &grid, DEFAULT_COND_CAP).unwrap();
    assert_eq!(diag.verdict, Verdict::NonsubordinateEvidence);
    let traj = solution_gram(&p, 0.5, &[1e2, 1e3, 1e4]).unwrap();
    let mins: Vec<f64> = traj.nodes.iter().map(|nd| hermitian_eigenvalues(&nd.g)[0]).collect();
    assert!(mins[1] > 5.0 * mins[0] && mins[2] > 5.0 * mins[1], "{mins:?}");
}

#[test]
fn growing_family_needs_the_self_adjoint_flag() {
    let p = make_family(FamilySpec::PeriodicModulated {
        a: vec![eye(1)],
        b: vec![eye(1) * c(0.0)],
        a_growth: Growth::Power { exponent: 0.5 },
        b_growth: Growth::None,
    })
    .unwrap();
    let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 20.0).collect();
    let diag = nonsub_diagnostic(&p, 0.0, &grid, 1e6).unwrap();
    assert_eq!(diag.verdict, Verdict::NonsubordinateEvidence);
    assert!(!p.is_bounded());
    assert!(spectral_consequence_report(&p, &diag, false).unwrap().claim.is_none());
    assert!(spectral_consequence_report(&p, &diag, true).unwrap().claim.is_some());
}

#[test]
fn jl_length_is_monotone_for_both_variants() {
    let mut r = rng(43);
    for d in 1..=3 {
        let p = random_params(d, 30, &mut r);
        let lambda = r.gen_range(-0.5..0.5);
        for variant in [SeminormKind::MatrixNorm, SeminormKind::MatrixMinmod] {
            let mut prev = 0.0;
            for k in 0..20 {
                let eps = 0.1 * 0.01f64.powf(k as f64 / 19.0);
                let s = jl_function(&p, lambda, eps, variant).unwrap();
                assert!(s.ell > prev);
                assert!(s.residual <= 1e-8 * 0.5 / eps);
                prev = s.ell;
            }
        }
    }
    let free = JacobiParams::free(1);
    assert!(matches!(jl_function(&free, 0.0, 0.1, SeminormKind::VectorNorm), Err(Error::InvalidArgument(_))));
}

#[test]
fn psd_measures_reject_indefinite_weights() {
    let bad = eye(2) * c(1.0) - eye(2) * c(2.0);
    assert!(matches!(DiscreteMatrixMeasure::new(2, vec![(0.0, bad)]), Err(Error::NotPsd { .. })));
}
