//! Elements `f = sum_k c_k g(. - k)` of a shift-invariant space.

use crate::error::{Error, Result};
use crate::generators::{Generator, Periodizer};
use crate::quad;
use crate::sampling::{Domain, FrameBounds};
use num_complex::Complex64;

/// Coefficients indexing the integer translates of the generator.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffSeq {
    /// `c_k = values[k - offset]` on the support, zero elsewhere.
    Finite { offset: i64, values: Vec<Complex64> },
    /// `c_k = values[k mod L]`, `L = values.len()`.
    Periodic { values: Vec<Complex64> },
}

impl CoeffSeq {
    pub fn finite(offset: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSet("finite coefficient support must be nonempty".into()));
        }
        Ok(CoeffSeq::Finite { offset, values })
    }

    pub fn periodic(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSet("period must be at least 1".into()));
        }
        Ok(CoeffSeq::Periodic { values })
    }

    pub fn finite_real(offset: i64, values: &[f64]) -> Result<Self> {
        Self::finite(offset, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn periodic_real(values: &[f64]) -> Result<Self> {
        Self::periodic(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Unit impulse at `k`.
    pub fn impulse(k: i64) -> Self {
        CoeffSeq::Finite { offset: k, values: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn values(&self) -> &[Complex64] {
        match self {
            CoeffSeq::Finite { values, .. } | CoeffSeq::Periodic { values } => values,
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            CoeffSeq::Periodic { values } => Some(values.len()),
            CoeffSeq::Finite { .. } => None,
        }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        match self {
            CoeffSeq::Finite { offset, values } => {
                let i = k - offset;
                if i >= 0 && (i as usize) < values.len() {
                    values[i as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            CoeffSeq::Periodic { values } => values[k.rem_euclid(values.len() as i64) as usize],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Squared l2 norm (over one period for periodic sequences).
    pub fn norm_sq(&self) -> f64 {
        self.values().iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn is_real(&self) -> bool {
        self.values().iter().all(|v| v.im == 0.0)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.re).collect()
    }

    /// `alpha * self + beta * other`; both must share the same layout.
    pub fn lincomb(&self, alpha: Complex64, other: &CoeffSeq, beta: Complex64) -> Result<CoeffSeq> {
        match (self, other) {
            (CoeffSeq::Periodic { values: a }, CoeffSeq::Periodic { values: b }) if a.len() == b.len() => {
                CoeffSeq::periodic(a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect())
            }
            (CoeffSeq::Finite { offset: oa, values: a }, CoeffSeq::Finite { offset: ob, values: b }) => {
                let lo = (*oa).min(*ob);
                let hi = (oa + a.len() as i64).max(ob + b.len() as i64);
                CoeffSeq::finite(lo, (lo..hi).map(|k| alpha * self.get(k) + beta * other.get(k)).collect())
            }
            _ => Err(Error::InvalidSet("coefficient layouts differ".into())),
        }
    }

    /// `(k, c_k)` over the finite support, or one period `0..L`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = match self {
            CoeffSeq::Finite { offset, .. } => *offset,
            CoeffSeq::Periodic { .. } => 0,
        };
        self.values().iter().enumerate().map(move |(i, &v)| (offset + i as i64, v))
    }
}

enum Kernel<'a> {
    Direct { gen: &'a Generator, radius: f64 },
    Periodic(Periodizer<'a>),
}

/// Evaluates `f^{(j)}` for fixed coefficients, generator and order.
pub struct Synthesizer<'a> {
    coeffs: &'a CoeffSeq,
    kernel: Kernel<'a>,
    j: usize,
}

impl<'a> Synthesizer<'a> {
    pub fn new(coeffs: &'a CoeffSeq, gen: &'a Generator, j: usize, tol: f64) -> Result<Self> {
        gen.check_order(j)?;
        if !(tol > 0.0) {
            return Err(Error::ToleranceUnachievable(format!("tolerance {tol} must be positive")));
        }
        let scale = coeffs.sup_norm().max(f64::MIN_POSITIVE);
        let kernel = match coeffs {
            CoeffSeq::Finite { .. } => {
                let radius = if gen.spec().decay_rate().is_some() {
                    gen.tail_radius(j, tol / scale)? + 1.0
                } else {
                    f64::INFINITY
                };
                Kernel::Direct { gen, radius }
            }
            CoeffSeq::Periodic { values } => {
                let l = values.len();
                Kernel::Periodic(gen.periodizer(l as f64, j, tol / (scale * l as f64))?)
            }
        };
        Ok(Synthesizer { coeffs, kernel, j })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kernel {
            Kernel::Direct { gen, radius } => self
                .coeffs
                .terms()
                .filter(|(k, _)| (x - *k as f64).abs() <= *radius)
                .map(|(k, c)| c * gen.eval_unchecked(x - k as f64, self.j))
                .sum(),
            Kernel::Periodic(p) => self.coeffs.terms().map(|(k, c)| c * p.eval(x - k as f64)).sum(),
        }
    }

    pub fn eval_re(&self, x: f64) -> f64 {
        self.eval(x).re
    }
}

/// `f^{(j)}(x) = sum_k c_k g^{(j)}(x - k)` to absolute accuracy `tol`.
pub fn synthesize(c: &CoeffSeq, gen: &Generator, x: f64, j: usize, tol: f64) -> Result<Complex64> {
    Ok(Synthesizer::new(c, gen, j, tol)?.eval(x))
}

/// `sum_k |g^(xi + k)|^2`, summed outward until the terms are negligible.
pub fn symbol(gen: &Generator, xi: f64) -> f64 {
    let mut s = gen.fourier(xi).norm_sqr();
    for k in 1..100_000 {
        let kf = k as f64;
        let t = gen.fourier(xi + kf).norm_sqr() + gen.fourier(xi - kf).norm_sqr();
        s += t;
        if k > 2 && t <= 1e-17 * s {
            break;
        }
    }
    s
}

/// Riesz bounds of the integer shifts: min and max of the periodised
/// symbol over the grid `xi = r / grid_size`, `r = 0..grid_size`.
pub fn riesz_bounds(gen: &Generator, grid_size: usize) -> Result<FrameBounds> {
    if grid_size < 64 {
        return Err(Error::Unsupported(format!("Riesz grid of size {grid_size} (< 64)")));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for r in 0..grid_size {
        let s = symbol(gen, r as f64 / grid_size as f64);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo < 1e-12 * hi {
        return Err(Error::DegenerateSymbol { min: lo, max: hi });
    }
    Ok(FrameBounds { lower: lo, upper: hi, domain: Domain::Synthesis })
}

/// `int_0^L |f|^2` for periodic coefficients: composite Gauss-Legendre with
/// eight nodes per unit cell.
pub fn norm_sq_over_period(c: &CoeffSeq, gen: &Generator, tol: f64) -> Result<f64> {
    let l = c
        .period()
        .ok_or_else(|| Error::InvalidSet("norm over a period needs periodic coefficients".into()))?;
    let syn = Synthesizer::new(c, gen, 0, tol)?;
    Ok(quad::composite_gauss_legendre(|x| syn.eval(x).norm_sqr(), 0.0, l as f64, l, 8))
}
