use nalgebra::DMatrix;
use siss::gabor::*;
use siss::quad;
use siss::sampling::{self, frame_bounds};
use siss::{Exec, GeneratorSpec, MultiSet};
use std::f64::consts::PI;

fn h0() -> WindowVector {
    WindowVector::hermite(1).unwrap()
}

fn block_diag(b: &DMatrix<f64>, blocks: usize) -> DMatrix<f64> {
    let n = b.nrows();
    let mut out = DMatrix::zeros(n * blocks, n * blocks);
    for k in 0..blocks {
        out.view_mut((k * n, k * n), (n, n)).copy_from(b);
    }
    out
}

#[test]
fn hermite_values_and_orthogonality() {
    use siss::generators::hermite_eval;
    assert!((hermite_eval(0, 0.0) - 2f64.powf(0.25)).abs() < 1e-15);
    assert_eq!(hermite_eval(1, 0.0), 0.0);
    let ip = quad::integrate(|x| hermite_eval(0, x) * hermite_eval(1, x), -8.0, 8.0, 1e-13).unwrap();
    assert!(ip.abs() < 1e-10);
    let nrm = quad::integrate(|x| hermite_eval(3, x).powi(2), -8.0, 8.0, 1e-13).unwrap();
    assert!((nrm - 1.0).abs() < 1e-10);
}

#[test]
fn single_window_dense_vs_sparse() {
    let dense = GaborSystemSpec::new(h0(), MultiSet::lattice(0.8, 50, 1).unwrap(), 1.0).unwrap();
    let sparse = GaborSystemSpec::new(h0(), MultiSet::lattice(1.25, 32, 1).unwrap(), 1.0).unwrap();
    let d = gabor_frame_bounds(&dense, 16, 1e-14, Exec::default()).unwrap();
    let s = gabor_frame_bounds(&sparse, 16, 1e-14, Exec::default()).unwrap();
    assert!(d.grid.iter().all(|(_, fb)| fb.lower > 1e-3), "dense lower {}", d.lower);
    assert!(d.drift_ok());
    assert!(d.lower >= 100.0 * s.lower);
}

#[test]
fn hermite_pair_threshold() {
    let wv = WindowVector::hermite(2).unwrap();
    let rows = gabor_sweep(&wv, &[(1.6, 25), (2.4, 20)], 1.0, 16, 1e-14, Exec::default()).unwrap();
    assert!(rows[0].lower > 0.0);
    assert!(rows[0].lower >= 100.0 * rows[1].lower);
    assert!(rows[0].lower > rows[1].lower);
}

#[test]
fn x_periodicity() {
    let sys = GaborSystemSpec::new(WindowVector::hermite(2).unwrap(), MultiSet::lattice(1.6, 5, 1).unwrap(), 1.0).unwrap();
    for x in [0.0, 0.3, 0.71] {
        let a = frame_bounds(&window_operator(&sys, x, 1e-14).unwrap()).unwrap();
        let b = frame_bounds(&window_operator(&sys, x + 1.0, 1e-14).unwrap()).unwrap();
        assert!((a.lower - b.lower).abs() < 1e-12 * a.upper);
        assert!((a.upper - b.upper).abs() < 1e-12 * a.upper);
    }
}

#[test]
fn single_window_reduces_to_sampling() {
    let g = GeneratorSpec::Gaussian { a: PI };
    let wv = WindowVector::poly_basis(vec![vec![1.0]], g.clone()).unwrap();
    let lambda = MultiSet::lattice(0.8, 10, 1).unwrap();
    let sys = GaborSystemSpec::new(wv, lambda.clone(), 1.0).unwrap();
    let gen = siss::Generator::new(g).unwrap();
    for x in [0.0, 0.25, 0.6] {
        let w = frame_bounds(&window_operator(&sys, x, 1e-14).unwrap()).unwrap();
        let s = frame_bounds(&sampling::assemble(&lambda.translate(x), &gen, 1e-14).unwrap()).unwrap();
        assert!((w.lower - s.lower).abs() < 1e-12 && (w.upper - s.upper).abs() < 1e-12);
    }
}

#[test]
fn derivative_operator_is_block_b_times_window_operator() {
    let g = GeneratorSpec::Gaussian { a: PI };
    for wv in [
        WindowVector::poly_basis(vec![vec![1.0], vec![0.0, 1.0]], g.clone()).unwrap(),
        WindowVector::derivative_ladder(vec![1.0], g.clone()).unwrap(),
        WindowVector::hermite(2).unwrap(),
    ] {
        let sys = GaborSystemSpec::new(wv.clone(), MultiSet::lattice(1.6, 5, 1).unwrap(), 1.0).unwrap();
        let w = window_operator(&sys, 0.37, 1e-14).unwrap();
        let d = mw_to_derivative_sampling(&sys, 0.37, 1e-14).unwrap();
        assert_eq!(w.rows, d.rows);
        let bw = block_diag(wv.b_matrix(), sys.lambda.len()) * &w.matrix;
        assert!((bw - &d.matrix).amax() < 1e-10);
    }
}

#[test]
fn hermite_bounds_within_conditioning_envelope() {
    let wv = WindowVector::hermite(2).unwrap();
    let sys = GaborSystemSpec::new(wv.clone(), MultiSet::lattice(1.6, 25, 1).unwrap(), 1.0).unwrap();
    let k2 = wv.b_condition().powi(2);
    for x in [0.0, 0.5] {
        let w = frame_bounds(&window_operator(&sys, x, 1e-14).unwrap()).unwrap();
        let d = frame_bounds(&mw_to_derivative_sampling(&sys, x, 1e-14).unwrap()).unwrap();
        for r in [d.lower / w.lower, d.upper / w.upper] {
            assert!(r >= 1.0 / k2 * (1.0 - 1e-9) && r <= k2 * (1.0 + 1e-9), "ratio {r}, cond^2 {k2}");
        }
    }
}

#[test]
fn frequency_step_dilation_matches_rescaled_system() {
    // b = 0.5 with Lambda = 1.6 Z (period 40) equals b = 1 with windows
    // g(x / 0.5) and Lambda = 0.8 Z (period 20)
    let wv = WindowVector::hermite(2).unwrap();
    let sys = GaborSystemSpec::new(wv.clone(), MultiSet::lattice(1.6, 25, 1).unwrap(), 0.5).unwrap();
    let n = sys.normalized().unwrap();
    assert_eq!(n.lambda.period(), Some(20.0));
    assert!((n.lambda.points()[1] - 0.8).abs() < 1e-15);
    let gb = gabor_frame_bounds(&sys, 4, 1e-14, Exec::default()).unwrap();
    let direct = gabor_frame_bounds(&n, 4, 1e-14, Exec::default()).unwrap();
    assert_eq!(gb.lower, direct.lower);
    assert!(gb.lower > 0.0);
}

#[test]
fn non_integer_dilated_period_is_rejected() {
    let sys = GaborSystemSpec::new(h0(), MultiSet::lattice(1.0, 3, 1).unwrap(), 0.7).unwrap();
    assert!(matches!(gabor_frame_bounds(&sys, 4, 1e-14, Exec::default()), Err(siss::Error::NonIntegerPeriod(_))));
}

#[test]
fn sequential_and_parallel_agree() {
    let sys = GaborSystemSpec::new(WindowVector::hermite(2).unwrap(), MultiSet::lattice(1.6, 25, 1).unwrap(), 1.0).unwrap();
    let a = gabor_frame_bounds(&sys, 8, 1e-14, Exec::Sequential).unwrap();
    let b = gabor_frame_bounds(&sys, 8, 1e-14, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
