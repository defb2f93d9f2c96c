//! Derivative-sampling operators `A_{(lambda, j), k} = g^{(j)}(lambda - k)`,
//! their frame bounds, and coefficient reconstruction.
//!
//! The default model is periodic: coefficients of integer period `L`,
//! sampling points `Lambda ⊂ [0, L)` repeated with period `L`, and entries
//! `sum_m g^{(j)}(lambda - k + m L)`. For `Lambda = Z_L` the operator is
//! (block-)circulant, which gives an independent FFT route to its bounds.

use crate::error::{Error, Result};
use crate::generators::{Generator, MAX_DERIVATIVE_ORDER};
use crate::par::{self, Exec};
use crate::pointsets::MultiSet;
use crate::sis::CoeffSeq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Which norms the bounds relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `A ||c||^2 <= sum |f^{(j)}(lambda)|^2 <= B ||c||^2`.
    Coefficient,
    /// `A ||f||^2 <= sum |f^{(j)}(lambda)|^2 <= B ||f||^2`.
    Function,
    /// Riesz bounds of the shifts: `A ||c||^2 <= ||f||^2 <= B ||c||^2`.
    Synthesis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub domain: Domain,
}

impl FrameBounds {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Periodic { period: usize },
    Truncated { k_pad: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingOperator {
    /// `(lambda, j)`, sorted by `lambda` then `j`.
    pub rows: Vec<(f64, usize)>,
    pub cols: Vec<i64>,
    pub matrix: DMatrix<f64>,
    pub model: Model,
}

impl SamplingOperator {
    pub fn identity(n: usize) -> Self {
        SamplingOperator {
            rows: (0..n).map(|i| (i as f64, 0)).collect(),
            cols: (0..n as i64).collect(),
            matrix: DMatrix::identity(n, n),
            model: Model::Periodic { period: n },
        }
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(c)).iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    /// Absolute accuracy of each entry.
    pub tol: f64,
    /// Largest admissible multiplicity `N` (derivatives up to `N - 1`).
    pub max_height: usize,
    /// Certify `g^{(j)} ∈ W_0` through the amalgam norm before assembling.
    pub certify: bool,
    pub exec: Exec,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { tol: 1e-13, max_height: MAX_DERIVATIVE_ORDER + 1, certify: true, exec: Exec::default() }
    }
}

pub(crate) fn integer_period(ms: &MultiSet) -> Result<usize> {
    let l = ms
        .period()
        .ok_or_else(|| Error::InvalidSet("periodic model needs a periodic set".into()))?;
    let rounded = l.round();
    if (l - rounded).abs() > 1e-9 * l.max(1.0) || rounded < 1.0 {
        return Err(Error::NonIntegerPeriod(l));
    }
    Ok(rounded as usize)
}

pub(crate) fn derivative_rows(ms: &MultiSet) -> Vec<(f64, usize)> {
    ms.iter().flat_map(|(p, m)| (0..m).map(move |j| (p, j))).collect()
}

/// Fills a periodic matrix: row `i` is `kernel(tag_i, x_i - k)` for `k = 0..L`.
pub(crate) fn fill_matrix<F>(rows: &[(f64, usize)], cols: &[i64], exec: Exec, kernel: F) -> DMatrix<f64>
where
    F: Fn(usize, f64) -> f64 + Sync + Send,
{
    let row_vals = par::map_indexed(rows.len(), exec, |i| {
        let (x, tag) = rows[i];
        cols.iter().map(|&k| kernel(tag, x - k as f64)).collect::<Vec<f64>>()
    });
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| row_vals[i][j])
}

fn check_height(ms: &MultiSet, max_height: usize) -> Result<()> {
    if ms.height() > max_height {
        return Err(Error::HeightExceedsSmoothness { height: ms.height(), max: max_height });
    }
    Ok(())
}

fn certify(gen: &Generator, height: usize, tol: f64) -> Result<()> {
    if gen.spec().decay_rate().is_none() {
        // sinc: periodisation is exact on the Fourier side, no amalgam tail needed
        return Ok(());
    }
    for j in 0..height {
        gen.amalgam_norm(j, tol.max(1e-12))?;
    }
    Ok(())
}

/// Periodic-model operator for a periodic set with integer period.
pub fn assemble(ms: &MultiSet, gen: &Generator, tol: f64) -> Result<SamplingOperator> {
    assemble_with(ms, gen, &AssembleOptions { tol, ..Default::default() })
}

pub fn assemble_with(ms: &MultiSet, gen: &Generator, opts: &AssembleOptions) -> Result<SamplingOperator> {
    let period = integer_period(ms)?;
    check_height(ms, opts.max_height)?;
    if opts.certify {
        certify(gen, ms.height(), opts.tol)?;
    }
    let periodizers = (0..ms.height())
        .map(|j| gen.periodizer(period as f64, j, opts.tol))
        .collect::<Result<Vec<_>>>()?;
    let rows = derivative_rows(ms);
    let cols: Vec<i64> = (0..period as i64).collect();
    let matrix = fill_matrix(&rows, &cols, opts.exec, |j, t| periodizers[j].eval(t));
    Ok(SamplingOperator { rows, cols, matrix, model: Model::Periodic { period } })
}

/// Truncated-model operator for a finite set: columns cover the hull of the
/// set padded by `ceil(10 / decay_rate)`.
pub fn assemble_truncated(ms: &MultiSet, gen: &Generator, opts: &AssembleOptions) -> Result<SamplingOperator> {
    if ms.is_empty() {
        return Err(Error::EmptyOperator);
    }
    check_height(ms, opts.max_height)?;
    let rate = gen
        .spec()
        .decay_rate()
        .ok_or_else(|| Error::Unsupported("truncated model needs a decaying generator".into()))?;
    for j in 0..ms.height() {
        gen.check_order(j)?;
    }
    let k_pad = (10.0 / rate).ceil() as usize;
    let lo = ms.points()[0].floor() as i64 - k_pad as i64;
    let hi = ms.points()[ms.len() - 1].ceil() as i64 + k_pad as i64;
    let rows = derivative_rows(ms);
    let cols: Vec<i64> = (lo..=hi).collect();
    let matrix = fill_matrix(&rows, &cols, opts.exec, |j, t| gen.eval_unchecked(t, j));
    Ok(SamplingOperator { rows, cols, matrix, model: Model::Truncated { k_pad } })
}

/// Singular values in decreasing order; `min(rows, cols)` of them.
pub fn singular_values(op: &SamplingOperator) -> Vec<f64> {
    let mut s: Vec<f64> = op.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `A = sigma_min^2`, `B = sigma_max^2` by full SVD (coefficient domain).
/// With fewer rows than columns the operator has a kernel and `A = 0`.
pub fn frame_bounds(op: &SamplingOperator) -> Result<FrameBounds> {
    if op.matrix.nrows() == 0 || op.matrix.ncols() == 0 {
        return Err(Error::EmptyOperator);
    }
    let s = singular_values(op);
    let smax = s[0];
    let smin = if op.matrix.nrows() < op.matrix.ncols() { 0.0 } else { s[s.len() - 1] };
    Ok(FrameBounds { lower: smin * smin, upper: smax * smax, domain: Domain::Coefficient })
}

/// Bounds for `Lambda = Z_L` with constant multiplicity `m` through DFT
/// diagonalisation: the eigenvalues of `A^T A` are
/// `sum_{j<m} |sum_n G_j(n) e^{-2 pi i n r / L}|^2` with `G_j` the periodised
/// `g^{(j)}`.
pub fn lattice_frame_bounds(gen: &Generator, period: usize, mult: usize, tol: f64) -> Result<FrameBounds> {
    if period == 0 || mult == 0 {
        return Err(Error::EmptyOperator);
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(period);
    let mut eig = vec![0.0; period];
    for j in 0..mult {
        let p = gen.periodizer(period as f64, j, tol)?;
        let mut col: Vec<Complex64> = (0..period).map(|n| Complex64::new(p.eval(n as f64), 0.0)).collect();
        fft.process(&mut col);
        for (e, v) in eig.iter_mut().zip(&col) {
            *e += v.norm_sqr();
        }
    }
    let lower = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = eig.iter().copied().fold(0.0, f64::max);
    Ok(FrameBounds { lower, upper, domain: Domain::Coefficient })
}

/// Converts coefficient-domain bounds to function-domain bounds using the
/// Riesz bounds of the generator.
pub fn to_function_domain(fb: &FrameBounds, riesz: &FrameBounds) -> Result<FrameBounds> {
    if !(riesz.lower > 0.0) {
        return Err(Error::DegenerateRiesz(riesz.lower));
    }
    Ok(FrameBounds { lower: fb.lower / riesz.upper, upper: fb.upper / riesz.lower, domain: Domain::Function })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    LeastSquares,
    /// Richardson iteration on the frame operator; `relax = None` uses the
    /// optimal `2 / (A + B)`.
    FrameIter { relax: Option<f64>, tol: f64, max_iter: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameIterReport {
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    /// `||y - A c_n||` for `n = 0..=iterations`.
    pub residuals: Vec<f64>,
    pub bounds: FrameBounds,
    pub relax: f64,
}

impl FrameIterReport {
    /// Predicted per-step contraction `(B - A) / (B + A)`.
    pub fn predicted_rate(&self) -> f64 {
        (self.bounds.upper - self.bounds.lower) / (self.bounds.upper + self.bounds.lower)
    }
}

fn wrap_coeffs(op: &SamplingOperator, values: &[f64]) -> Result<CoeffSeq> {
    match op.model {
        Model::Periodic { .. } => CoeffSeq::periodic_real(values),
        Model::Truncated { .. } => CoeffSeq::finite_real(op.cols[0], values),
    }
}

fn check_samples(op: &SamplingOperator, samples: &[f64]) -> Result<()> {
    if samples.len() != op.rows.len() {
        return Err(Error::DimensionMismatch { expected: op.rows.len(), got: samples.len() });
    }
    Ok(())
}

pub fn reconstruct(samples: &[f64], op: &SamplingOperator, method: Method) -> Result<CoeffSeq> {
    check_samples(op, samples)?;
    match method {
        Method::LeastSquares => {
            let fb = frame_bounds(op)?;
            if fb.lower <= 1e-12 * fb.upper.max(1.0) {
                return Err(Error::NotAFrame(fb.lower));
            }
            let svd = op.matrix.clone().svd(true, true);
            let eps = 1e-14 * fb.upper.sqrt();
            let c = svd
                .solve(&DVector::from_column_slice(samples), eps)
                .map_err(|e| Error::Unsupported(e.to_string()))?;
            wrap_coeffs(op, c.as_slice())
        }
        Method::FrameIter { relax, tol, max_iter } => {
            let report = frame_iterate(samples, op, relax, tol, max_iter, |_, _| {})?;
            wrap_coeffs(op, &report.coeffs)
        }
    }
}

/// Richardson iteration `c_{n+1} = c_n + relax A^T (y - A c_n)` from `c_0 = 0`,
/// stopping once `||A^T (y - A c_n)|| <= tol ||A^T y||`. `observer` sees every
/// iterate (including `c_0`).
pub fn frame_iterate<O>(
    samples: &[f64],
    op: &SamplingOperator,
    relax: Option<f64>,
    tol: f64,
    max_iter: usize,
    mut observer: O,
) -> Result<FrameIterReport>
where
    O: FnMut(usize, &[f64]),
{
    check_samples(op, samples)?;
    let bounds = frame_bounds(op)?;
    if bounds.lower <= 1e-12 {
        return Err(Error::NotAFrame(bounds.lower));
    }
    let relax = relax.unwrap_or(2.0 / (bounds.lower + bounds.upper));
    let a = &op.matrix;
    let y = DVector::from_column_slice(samples);
    let aty_norm = (a.transpose() * &y).norm().max(f64::MIN_POSITIVE);
    let mut c = DVector::zeros(a.ncols());
    let mut residuals = Vec::new();
    for n in 0..=max_iter {
        observer(n, c.as_slice());
        let r = &y - a * &c;
        residuals.push(r.norm());
        let grad = a.transpose() * r;
        if grad.norm() <= tol * aty_norm {
            return Ok(FrameIterReport { coeffs: c.as_slice().to_vec(), iterations: n, residuals, bounds, relax });
        }
        if n == max_iter {
            return Err(Error::MaxIterExceeded { iterations: n, residual: grad.norm() / aty_norm });
        }
        c += grad * relax;
    }
    unreachable!("loop returns")
}

/// Smallest point count `n` such that `alpha n` is an integer period
/// `>= min_period`, with `alpha` replaced by its best rational
/// approximation `p/q`, `q <= 64`, when it is not rational at that level.
/// Returns the realised `alpha` and `n`.
pub fn realize_lattice(alpha: f64, min_period: usize) -> Result<(f64, usize)> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidSpec(format!("lattice step {alpha} must be positive")));
    }
    let (mut best_q, mut best_p, mut best_err) = (1usize, alpha.round().max(1.0), f64::INFINITY);
    for q in 1..=64usize {
        let p = (alpha * q as f64).round().max(1.0);
        let err = (alpha - p / q as f64).abs();
        if err < best_err - 1e-12 {
            (best_q, best_p, best_err) = (q, p, err);
        }
        if err <= 1e-9 * alpha {
            break;
        }
    }
    let p = best_p as usize;
    let reps = min_period.max(1).div_ceil(p);
    Ok((best_p / best_q as f64, reps * best_q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepFamily {
    /// `alpha Z` with constant multiplicity; the parameter is `alpha`.
    AlphaDilate { mult: usize, min_period: usize },
    /// `alpha Z` realised with period `>= min_period`, with `param` points
    /// removed per period at evenly spread positions.
    PointDelete { alpha: f64, mult: usize, min_period: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub density: f64,
    /// Function-domain bounds.
    pub lower: f64,
    pub upper: f64,
}

/// The periodic set for one sweep parameter.
pub fn sweep_set(family: SweepFamily, param: f64) -> Result<MultiSet> {
    match family {
        SweepFamily::AlphaDilate { mult, min_period } => {
            let (alpha, n) = realize_lattice(param, min_period)?;
            MultiSet::lattice(alpha, n, mult)
        }
        SweepFamily::PointDelete { alpha, mult, min_period } => {
            let (alpha, n) = realize_lattice(alpha, min_period)?;
            let base = MultiSet::lattice(alpha, n, mult)?;
            let k = param.round();
            if !(0.0..n as f64).contains(&k) {
                return Err(Error::InvalidSpec(format!("cannot delete {param} of {n} points")));
            }
            let k = k as usize;
            let drop: Vec<usize> = (0..k).map(|i| i * n / k.max(1)).collect();
            let (points, mults): (Vec<f64>, Vec<usize>) =
                base.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, pm)| pm).unzip();
            MultiSet::periodic(points, mults, base.period().expect("lattice is periodic"))
        }
    }
}

/// Function-domain bounds along a one-parameter family, parallel over the
/// parameters; rows are sorted by parameter.
pub fn sweep(gen: &Generator, family: SweepFamily, params: &[f64], tol: f64, exec: Exec) -> Result<Vec<SweepRow>> {
    let riesz = crate::sis::riesz_bounds(gen, 1024)?;
    let opts = AssembleOptions { tol, exec: Exec::Sequential, ..Default::default() };
    let mut rows = par::try_map_indexed(params.len(), exec, |i| {
        let ms = sweep_set(family, params[i])?;
        let fb = to_function_domain(&frame_bounds(&assemble_with(&ms, gen, &opts)?)?, &riesz)?;
        Ok::<_, Error>(SweepRow {
            param: params[i],
            density: ms.lower_density(crate::pointsets::DensityMode::ExactPeriodic)?,
            lower: fb.lower,
            upper: fb.upper,
        })
    })?;
    rows.sort_by(|a, b| a.param.total_cmp(&b.param));
    Ok(rows)
}
