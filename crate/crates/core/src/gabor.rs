//! Multi-window Gabor systems `G(g^1..g^N, Lambda x bZ)` tested through their
//! sampling reformulation: the system is a frame exactly when every
//! translate `Lambda + x` samples the vector-valued space generated by the
//! windows. The frequency lattice is never discretised.
//!
//! Windows are differential polynomials of one base generator,
//! `g^i = sum_j P_ij g^{(j)}`. With `B = P^{-1}` the window samples and the
//! derivative samples of multiplicity `N` differ by the block-diagonal map
//! `blockdiag(B)`, so their bounds agree up to the conditioning of `B`.
//!
//! Only finitely many `x` are tested; grid-uniform positivity together with
//! the drift check between the `n` and `2n` grids is the working surrogate
//! for "all x".

use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorSpec};
use crate::par::{self, Exec};
use crate::pointsets::MultiSet;
use crate::sampling::{self, AssembleOptions, FrameBounds, Model, SamplingOperator};
use crate::special::{self, Poly};
use nalgebra::DMatrix;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    /// `g^1 = g`, `g^{j+1} = (a_j I + d/dx) g^j`.
    DerivativeLadder(Vec<f64>),
    /// Hermite functions `h_0..h_{N-1}` over the Gaussian `e^{-pi x^2}`.
    Hermite(usize),
    /// Row `i` holds the coefficients of `p_i(d/dx)`.
    PolyBasis(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct WindowVector {
    construction: Construction,
    base: Generator,
    p: DMatrix<f64>,
    b: DMatrix<f64>,
}

/// Hermite function `h_k` as `q_k(x) e^{-pi x^2}`.
fn hermite_poly(k: usize) -> Poly {
    // physicists' H_k in t, then t = sqrt(2 pi) x
    let mut h = vec![Poly::one(), Poly(vec![0.0, 2.0])];
    for n in 1..k {
        let next = h[n].shift_up().scale(2.0).add(&h[n - 1].scale(-2.0 * n as f64));
        h.push(next);
    }
    let s = (2.0 * PI).sqrt();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let norm = (2.0f64).powf(0.25) / (2f64.powi(k as i32) * fact).sqrt();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Poly(h[k].0.iter().enumerate().map(|(n, c)| sign * norm * c * s.powi(n as i32)).collect())
}

impl WindowVector {
    pub fn new(construction: Construction, base: GeneratorSpec) -> Result<Self> {
        let base = Generator::new(base)?;
        let p = match &construction {
            Construction::DerivativeLadder(shifts) => {
                let n = shifts.len() + 1;
                let mut rows = vec![Poly::one()];
                for a in shifts {
                    let prev = rows.last().expect("nonempty");
                    rows.push(prev.shift_up().add(&prev.scale(*a)));
                }
                DMatrix::from_fn(n, n, |i, j| rows[i].coeff(j))
            }
            Construction::Hermite(n) => {
                if *n == 0 {
                    return Err(Error::InvalidSpec("at least one Hermite window".into()));
                }
                if *base.spec() != (GeneratorSpec::Gaussian { a: PI }) {
                    return Err(Error::Unsupported("Hermite windows live over the Gaussian with a = pi".into()));
                }
                let derivs = special::gaussian_derivative_polys(PI, *n);
                let mut p = DMatrix::zeros(*n, *n);
                for k in 0..*n {
                    let mut rest = hermite_poly(k);
                    for d in (0..=k).rev() {
                        let lead = derivs[d].coeff(d);
                        let c = rest.coeff(d) / lead;
                        p[(k, d)] = c;
                        rest = rest.add(&derivs[d].scale(-c));
                    }
                }
                p
            }
            Construction::PolyBasis(rows) => {
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() > n) {
                    return Err(Error::InvalidSpec(format!("{n} polynomial rows must have degree < {n}")));
                }
                DMatrix::from_fn(n, n, |i, j| rows[i].get(j).copied().unwrap_or(0.0))
            }
        };
        let n = p.nrows();
        for j in 0..n {
            base.check_order(j)?;
        }
        let sv = p.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || !(smax / smin < 1e12) {
            return Err(Error::SingularBasis);
        }
        let b = p.clone().try_inverse().ok_or(Error::SingularBasis)?;
        Ok(WindowVector { construction, base, p, b })
    }

    pub fn derivative_ladder(shifts: Vec<f64>, base: GeneratorSpec) -> Result<Self> {
        Self::new(Construction::DerivativeLadder(shifts), base)
    }

    pub fn hermite(n: usize) -> Result<Self> {
        Self::new(Construction::Hermite(n), GeneratorSpec::Gaussian { a: PI })
    }

    pub fn poly_basis(rows: Vec<Vec<f64>>, base: GeneratorSpec) -> Result<Self> {
        Self::new(Construction::PolyBasis(rows), base)
    }

    pub fn len(&self) -> usize {
        self.p.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn base(&self) -> &Generator {
        &self.base
    }

    /// `g^i = sum_j P_ij g^{(j)}`.
    pub fn p_matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// `B = P^{-1}`: `sum_k B_jk g^k = g^{(j)}`.
    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Condition number of `B` in the spectral norm.
    pub fn b_condition(&self) -> f64 {
        let sv = self.b.clone().svd(false, false).singular_values;
        sv.max() / sv.min()
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        (0..self.len()).map(|j| self.p[(i, j)] * self.base.eval_unchecked(x, j)).sum()
    }

    /// Windows `g^i(x / b)` over the base `g(x / b)`: `P' = P diag(b^j)`.
    pub fn dilate(&self, b: f64) -> Result<WindowVector> {
        let (spec, amp) = self.base.spec().dilate(b)?;
        let n = self.len();
        let p = DMatrix::from_fn(n, n, |i, j| self.p[(i, j)] * b.powi(j as i32) * amp);
        let b_inv = p.clone().try_inverse().ok_or(Error::SingularBasis)?;
        Ok(WindowVector { construction: self.construction.clone(), base: Generator::new(spec)?, p, b: b_inv })
    }
}

/// Windows, time shifts (periodic, integer period) and frequency step.
#[derive(Debug, Clone)]
pub struct GaborSystemSpec {
    pub windows: WindowVector,
    pub lambda: MultiSet,
    pub b: f64,
}

impl GaborSystemSpec {
    pub fn new(windows: WindowVector, lambda: MultiSet, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidSpec(format!("frequency step b = {b} must be positive")));
        }
        if lambda.period().is_none() {
            return Err(Error::InvalidSet("Gabor time shifts must be periodic".into()));
        }
        if lambda.mults().iter().any(|&m| m != 1) {
            return Err(Error::InvalidSet("Gabor time shifts carry no multiplicity".into()));
        }
        Ok(GaborSystemSpec { windows, lambda, b })
    }

    /// The equivalent system with frequency step 1 (`g(. / b)`, `b Lambda`).
    pub fn normalized(&self) -> Result<GaborSystemSpec> {
        if self.b == 1.0 {
            return Ok(self.clone());
        }
        let windows = self.windows.dilate(self.b)?;
        let period = self.lambda.period().expect("validated periodic") * self.b;
        let points = self.lambda.points().iter().map(|p| p * self.b).collect();
        let lambda = MultiSet::periodic(points, vec![1; self.lambda.len()], period)?;
        Ok(GaborSystemSpec { windows, lambda, b: 1.0 })
    }
}

fn vector_operator(sys: &GaborSystemSpec, x: f64, tol: f64, exec: Exec, derivative: bool) -> Result<SamplingOperator> {
    let shifted = sys.lambda.translate(x).with_constant_mult(sys.windows.len())?;
    let period = sampling::integer_period(&shifted)?;
    let n = sys.windows.len();
    let gen = sys.windows.base();
    let periodizers = (0..n).map(|j| gen.periodizer(period as f64, j, tol)).collect::<Result<Vec<_>>>()?;
    let rows = sampling::derivative_rows(&shifted);
    let cols: Vec<i64> = (0..period as i64).collect();
    let p = sys.windows.p_matrix();
    let matrix = sampling::fill_matrix(&rows, &cols, exec, |i, t| {
        if derivative {
            periodizers[i].eval(t)
        } else {
            (0..n).map(|j| p[(i, j)] * periodizers[j].eval(t)).sum()
        }
    });
    Ok(SamplingOperator { rows, cols, matrix, model: Model::Periodic { period } })
}

/// Window-sampling operator: row `(lambda + x, i)` holds the periodised
/// `g^i(lambda + x - k)`. Requires `b = 1` (see [`GaborSystemSpec::normalized`]).
pub fn window_operator(sys: &GaborSystemSpec, x: f64, tol: f64) -> Result<SamplingOperator> {
    vector_operator(sys, x, tol, Exec::default(), false)
}

/// Derivative-sampling operator for `(Lambda + x, m = N)` against the base
/// generator; equals `blockdiag(B)` times [`window_operator`].
pub fn mw_to_derivative_sampling(sys: &GaborSystemSpec, x: f64, tol: f64) -> Result<SamplingOperator> {
    let shifted = sys.lambda.translate(x).with_constant_mult(sys.windows.len())?;
    let opts = AssembleOptions { tol, certify: false, exec: Exec::default(), ..Default::default() };
    sampling::assemble_with(&shifted, sys.windows.base(), &opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaborBounds {
    /// Smallest lower bound over the grid.
    pub lower: f64,
    /// Largest upper bound over the grid.
    pub upper: f64,
    /// Grid point of the smallest lower bound (smallest such `x` on ties).
    pub x_min: f64,
    /// Per-point bounds on the requested grid.
    pub grid: Vec<(f64, FrameBounds)>,
    /// `|min_2n - min_n| / min_2n` from the doubled grid (`0` when both vanish).
    pub drift: f64,
}

impl GaborBounds {
    pub fn drift_ok(&self) -> bool {
        self.drift < 0.05
    }
}

fn reduce(points: &[(f64, FrameBounds)]) -> (f64, f64, f64) {
    let mut lower = f64::INFINITY;
    let mut x_min = 0.0;
    let mut upper = 0.0f64;
    for (x, fb) in points {
        if fb.lower < lower {
            lower = fb.lower;
            x_min = *x;
        }
        upper = upper.max(fb.upper);
    }
    (lower, upper, x_min)
}

/// Coefficient-domain bounds of the window sampling problem on
/// `Lambda + x`, `x = r / n`, minimised over the grid.
pub fn gabor_frame_bounds(sys: &GaborSystemSpec, x_grid_size: usize, tol: f64, exec: Exec) -> Result<GaborBounds> {
    if x_grid_size == 0 {
        return Err(Error::InvalidSpec("x grid must be nonempty".into()));
    }
    let sys = sys.normalized()?;
    let fine = 2 * x_grid_size;
    let all = par::try_map_indexed(fine, exec, |r| {
        let x = r as f64 / fine as f64;
        let op = vector_operator(&sys, x, tol, Exec::Sequential, false)?;
        Ok::<_, Error>((x, sampling::frame_bounds(&op)?))
    })?;
    let grid: Vec<(f64, FrameBounds)> = all.iter().step_by(2).copied().collect();
    let (lower, upper, x_min) = reduce(&grid);
    let (lower_fine, _, _) = reduce(&all);
    let drift = if lower_fine > 0.0 { (lower - lower_fine).abs() / lower_fine } else if lower == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(GaborBounds { lower, upper, x_min, grid, drift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaborSweepRow {
    pub alpha: f64,
    pub density: f64,
    pub x_min: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds for `Lambda = alpha Z` realised with `count` points per period.
pub fn gabor_sweep(
    windows: &WindowVector,
    family: &[(f64, usize)],
    b: f64,
    x_grid_size: usize,
    tol: f64,
    exec: Exec,
) -> Result<Vec<GaborSweepRow>> {
    let mut rows = family
        .iter()
        .map(|&(alpha, count)| {
            let lambda = MultiSet::lattice(alpha, count, 1)?;
            let sys = GaborSystemSpec::new(windows.clone(), lambda, b)?;
            let gb = gabor_frame_bounds(&sys, x_grid_size, tol, exec)?;
            Ok(GaborSweepRow { alpha, density: 1.0 / alpha, x_min: gb.x_min, lower: gb.lower, upper: gb.upper })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(rows)
}
