//! Generators of shift-invariant spaces and their derivatives.
//!
//! Supported kinds:
//!
//! * `gaussian(a)`: `e^{-a x^2}` (unnormalised).
//! * `gaussian_type(c, deltas)`: the function whose Fourier transform is
//!   `prod_j (1 + 2 pi i delta_j xi)^{-1} e^{-c xi^2}`, i.e. the unit-mass
//!   Gaussian `sqrt(pi/c) e^{-pi^2 x^2 / c}` convolved with one-sided
//!   exponentials.
//! * `sech(a)`: `sech(a x)`.
//! * `hermite(k)`: the L2-normalised Hermite function
//!   `h_k(x) = (-1)^k gamma_k e^{-pi x^2} H_k(sqrt(2 pi) x)`.
//! * `sinc`: `sin(pi x) / (pi x)`, the Paley-Wiener reference.
//!
//! Fourier transforms use `g^(xi) = int g(x) e^{-2 pi i x xi} dx`.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{self, Poly};
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

/// Reported smoothness of every supported generator (all are `C^infinity`).
pub const SMOOTHNESS_UNBOUNDED: usize = usize::MAX;

/// Highest derivative order the evaluators accept.
pub const MAX_DERIVATIVE_ORDER: usize = 16;

/// Relative spacing under which two deltas are treated as repeated.
const CONFLUENT_REL: f64 = 1e-9;

const MAX_TAIL_CELLS: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Gaussian { a: f64 },
    GaussianType { c: f64, deltas: Vec<f64> },
    Sech { a: f64 },
    Hermite { k: usize },
    Sinc,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Gaussian { a } | GeneratorSpec::Sech { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::InvalidSpec(format!("rate a = {a} must be positive")));
                }
            }
            GeneratorSpec::GaussianType { c, deltas } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidSpec(format!("c = {c} must be positive")));
                }
                if let Some(d) = deltas.iter().find(|d| !d.is_finite() || **d == 0.0) {
                    return Err(Error::InvalidSpec(format!("delta = {d} must be finite and nonzero")));
                }
            }
            GeneratorSpec::Hermite { .. } | GeneratorSpec::Sinc => {}
        }
        Ok(())
    }

    pub fn smoothness(&self) -> usize {
        SMOOTHNESS_UNBOUNDED
    }

    /// Exponential decay rate of the generator, `None` for `sinc`.
    pub fn decay_rate(&self) -> Option<f64> {
        match self {
            GeneratorSpec::Gaussian { a } | GeneratorSpec::Sech { a } => Some(*a),
            GeneratorSpec::GaussianType { c, deltas } => {
                let dmax = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                Some(if dmax > 0.0 { 1.0 / dmax } else { PI * PI / c })
            }
            GeneratorSpec::Hermite { .. } => Some(PI),
            GeneratorSpec::Sinc => None,
        }
    }

    /// True when two deltas coincide (within `1e-9 max|delta|`), which forces
    /// the numerical-convolution path.
    pub fn has_repeated_deltas(&self) -> bool {
        match self {
            GeneratorSpec::GaussianType { deltas, .. } => !split_confluent(deltas).1.is_empty(),
            _ => false,
        }
    }

    /// Returns `(spec', amp)` with `g(x / b) = amp * g'(x)`.
    pub fn dilate(&self, b: f64) -> Result<(GeneratorSpec, f64)> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidSpec(format!("dilation b = {b} must be positive")));
        }
        match self {
            GeneratorSpec::Gaussian { a } => Ok((GeneratorSpec::Gaussian { a: a / (b * b) }, 1.0)),
            GeneratorSpec::Sech { a } => Ok((GeneratorSpec::Sech { a: a / b }, 1.0)),
            GeneratorSpec::GaussianType { c, deltas } => Ok((
                GeneratorSpec::GaussianType {
                    c: c * b * b,
                    deltas: deltas.iter().map(|d| d * b).collect(),
                },
                b,
            )),
            GeneratorSpec::Hermite { .. } | GeneratorSpec::Sinc => Err(Error::Unsupported(format!(
                "dilation of {self} is not closed in the generator family"
            ))),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Gaussian { a } => write!(f, "kind=gaussian a={a:?}"),
            GeneratorSpec::Sech { a } => write!(f, "kind=sech a={a:?}"),
            GeneratorSpec::GaussianType { c, deltas } => {
                write!(f, "kind=gaussian_type c={c:?}")?;
                if !deltas.is_empty() {
                    let d: Vec<String> = deltas.iter().map(|d| format!("{d:?}")).collect();
                    write!(f, " deltas={}", d.join(","))?;
                }
                Ok(())
            }
            GeneratorSpec::Hermite { k } => write!(f, "kind=hermite k={k}"),
            GeneratorSpec::Sinc => write!(f, "kind=sinc"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `kind=gaussian_type c=1.0 deltas=1.0,-2.0` style records.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let mut kind = None;
        let mut a = None;
        let mut c = None;
        let mut k = None;
        let mut deltas = Vec::new();
        for tok in s.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{tok}`")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("bad number `{v}` for `{key}`")));
            match key {
                "kind" => kind = Some(val.to_string()),
                "a" => a = Some(num(val)?),
                "c" => c = Some(num(val)?),
                "k" => k = Some(val.parse::<usize>().map_err(|_| bad(format!("bad index `{val}`")))?),
                "deltas" => {
                    deltas = val
                        .split(',')
                        .filter(|t| !t.is_empty())
                        .map(num)
                        .collect::<Result<Vec<_>>>()?
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| bad(format!("missing `{name}`")));
        let spec = match kind.as_deref() {
            Some("gaussian") => GeneratorSpec::Gaussian { a: need(a, "a")? },
            Some("sech") => GeneratorSpec::Sech { a: need(a, "a")? },
            Some("gaussian_type") => GeneratorSpec::GaussianType { c: need(c, "c")?, deltas },
            Some("hermite") => GeneratorSpec::Hermite {
                k: k.ok_or_else(|| bad("missing `k`".into()))?,
            },
            Some("sinc") => GeneratorSpec::Sinc,
            Some(other) => return Err(bad(format!("unknown kind `{other}`"))),
            None => return Err(bad("missing `kind`".into())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn split_confluent(deltas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let scale = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mut distinct: Vec<f64> = Vec::new();
    let mut repeated = Vec::new();
    for &d in deltas {
        if distinct.iter().any(|&e| (e - d).abs() < CONFLUENT_REL * scale) {
            repeated.push(d);
        } else {
            distinct.push(d);
        }
    }
    (distinct, repeated)
}

#[derive(Debug, Clone)]
struct GaussTypeEval {
    /// Exponent of the core Gaussian `amp e^{-alpha x^2}`.
    alpha: f64,
    amp: f64,
    /// Standard deviation of the core Gaussian.
    sigma: f64,
    polys: Vec<Poly>,
    /// Partial-fraction terms `(delta, weight)` over the distinct deltas.
    terms: Vec<(f64, f64)>,
    /// Repeated deltas, convolved numerically on top of the closed form.
    confluent: Vec<f64>,
}

impl GaussTypeEval {
    fn new(c: f64, deltas: &[f64]) -> Self {
        let (distinct, confluent) = split_confluent(deltas);
        let terms = distinct
            .iter()
            .enumerate()
            .map(|(i, &di)| {
                let w = distinct
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != i)
                    .fold(1.0, |acc, (_, &dl)| acc * di / (di - dl));
                (di, w)
            })
            .collect();
        let alpha = PI * PI / c;
        GaussTypeEval {
            alpha,
            amp: (PI / c).sqrt(),
            sigma: (c / (2.0 * PI * PI)).sqrt(),
            polys: special::gaussian_derivative_polys(alpha, MAX_DERIVATIVE_ORDER),
            terms,
            confluent,
        }
    }

    fn core(&self, x: f64, j: usize) -> f64 {
        self.amp * self.polys[j].eval(x) * (-self.alpha * x * x).exp()
    }

    /// `(e_delta * core)(x)` for `delta > 0`, the exponentially modified Gaussian.
    fn emg(&self, delta: f64, x: f64) -> f64 {
        let s = self.sigma;
        let u = (s / delta - x / s) / SQRT_2;
        if u >= 0.0 {
            0.5 / delta * (-x * x / (2.0 * s * s)).exp() * special::erfcx(u)
        } else {
            0.5 / delta * (s * s / (2.0 * delta * delta) - x / delta).exp() * special::erfc(u)
        }
    }

    /// j-th derivative of `e_delta * core`, from `h + delta h' = core`.
    fn term(&self, delta: f64, x: f64, j: usize) -> f64 {
        let mut h = if delta > 0.0 { self.emg(delta, x) } else { self.emg(-delta, -x) };
        for i in 1..=j {
            h = (self.core(x, i - 1) - h) / delta;
        }
        h
    }

    fn closed(&self, x: f64, j: usize) -> f64 {
        if self.terms.is_empty() {
            return self.core(x, j);
        }
        self.terms.iter().map(|&(d, w)| w * self.term(d, x, j)).sum()
    }

    fn eval(&self, x: f64, j: usize, tol: f64) -> Result<f64> {
        self.convolved(0, x, j, tol)
    }

    fn convolved(&self, level: usize, x: f64, j: usize, tol: f64) -> Result<f64> {
        if level == self.confluent.len() {
            return Ok(self.closed(x, j));
        }
        let delta = self.confluent[level];
        // (e_delta * F)(x) = int_0^inf e^{-u} F(x - delta u) du.
        let inner_tol = tol / 4.0;
        let mut bound = 0.0f64;
        for i in 0..=64 {
            let u = i as f64 * 0.5;
            bound = bound.max(self.convolved(level + 1, x - delta * u, j, inner_tol)?.abs());
        }
        let upper = ((10.0 * bound.max(1e-300) / tol).ln() + 1.0).max(1.0);
        let err = std::cell::RefCell::new(None);
        let value = quad::integrate(
            |u| match self.convolved(level + 1, x - delta * u, j, inner_tol) {
                Ok(v) => (-u).exp() * v,
                Err(e) => {
                    *err.borrow_mut() = Some(e);
                    0.0
                }
            },
            0.0,
            upper,
            tol / 2.0,
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        value
    }

    fn fourier(&self, c: f64, deltas: &[f64], xi: f64) -> Complex64 {
        let mut v = Complex64::new((-c * xi * xi).exp(), 0.0);
        for &d in deltas {
            v /= Complex64::new(1.0, 2.0 * PI * d * xi);
        }
        v
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Gaussian { a: f64, polys: Vec<Poly> },
    GaussianType(Box<GaussTypeEval>),
    Sech { a: f64, polys: Vec<Poly> },
    Hermite { k: usize },
    Sinc,
}

/// A validated generator with precomputed derivative data.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: GeneratorSpec,
    kind: Kind,
}

impl Generator {
    pub fn new(spec: GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let kind = match &spec {
            GeneratorSpec::Gaussian { a } => Kind::Gaussian {
                a: *a,
                polys: special::gaussian_derivative_polys(*a, MAX_DERIVATIVE_ORDER),
            },
            GeneratorSpec::GaussianType { c, deltas } => Kind::GaussianType(Box::new(GaussTypeEval::new(*c, deltas))),
            GeneratorSpec::Sech { a } => Kind::Sech {
                a: *a,
                polys: special::sech_derivative_polys(MAX_DERIVATIVE_ORDER),
            },
            GeneratorSpec::Hermite { k } => Kind::Hermite { k: *k },
            GeneratorSpec::Sinc => Kind::Sinc,
        };
        Ok(Generator { spec, kind })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn check_order(&self, j: usize) -> Result<()> {
        let max = MAX_DERIVATIVE_ORDER.min(self.spec.smoothness());
        if j > max {
            return Err(Error::DerivativeOrder { order: j, max });
        }
        Ok(())
    }

    /// `g^{(j)}(x)` to absolute accuracy `tol`. Closed forms are accurate to
    /// rounding; only the repeated-delta path actually consumes `tol`.
    pub fn eval(&self, x: f64, j: usize, tol: f64) -> Result<f64> {
        self.check_order(j)?;
        if !(tol > 0.0) {
            return Err(Error::ToleranceUnachievable(format!("tolerance {tol} must be positive")));
        }
        Ok(match &self.kind {
            Kind::GaussianType(g) if !g.confluent.is_empty() => return g.eval(x, j, tol),
            _ => self.eval_unchecked(x, j),
        })
    }

    /// Evaluation for validated `j` on the closed-form paths.
    pub(crate) fn eval_unchecked(&self, x: f64, j: usize) -> f64 {
        match &self.kind {
            Kind::Gaussian { a, polys } => polys[j].eval(x) * (-a * x * x).exp(),
            Kind::GaussianType(g) => {
                if g.confluent.is_empty() {
                    g.closed(x, j)
                } else {
                    g.eval(x, j, 1e-13).unwrap_or(f64::NAN)
                }
            }
            Kind::Sech { a, polys } => {
                let t = (a * x).tanh();
                let s = 1.0 / (a * x).cosh();
                a.powi(j as i32) * s * polys[j].eval(t)
            }
            Kind::Hermite { k } => hermite_derivative(*k, x, j),
            Kind::Sinc => special::sinc_derivative(x, j),
        }
    }

    pub fn fourier(&self, xi: f64) -> Complex64 {
        match (&self.kind, &self.spec) {
            (Kind::Gaussian { a, .. }, _) => Complex64::new((PI / a).sqrt() * (-PI * PI * xi * xi / a).exp(), 0.0),
            (Kind::GaussianType(g), GeneratorSpec::GaussianType { c, deltas }) => g.fourier(*c, deltas, xi),
            (Kind::Sech { a, .. }, _) => Complex64::new(PI / a / (PI * PI * xi / a).cosh(), 0.0),
            (Kind::Hermite { k }, _) => Complex64::new(0.0, -1.0).powu(*k as u32) * hermite_eval(*k, xi),
            (Kind::Sinc, _) => {
                if (-0.5..0.5).contains(&xi) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            _ => unreachable!("kind mirrors spec"),
        }
    }

    fn sampled_cell_sup(&self, lo: f64, hi: f64, j: usize, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| self.eval_unchecked(lo + (hi - lo) * i as f64 / samples as f64, j).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest integer radius `r` such that the cell-wise suprema of
    /// `|g^{(j)}|` outside `[-r, r]` sum to less than `eps`.
    ///
    /// Past the peak, cell suprema decay at least geometrically with the
    /// observed ratio or the generator's exponential rate, whichever is
    /// larger; the tail is bounded by the geometric series.
    pub fn tail_radius(&self, j: usize, eps: f64) -> Result<f64> {
        self.check_order(j)?;
        let rate = self.spec.decay_rate().ok_or_else(|| {
            Error::ToleranceUnachievable(format!("{} has no exponential decay", self.spec))
        })?;
        let gaussian_tail = matches!(self.spec, GeneratorSpec::Gaussian { .. } | GeneratorSpec::Hermite { .. })
            || matches!(&self.spec, GeneratorSpec::GaussianType { deltas, .. } if deltas.is_empty());
        let side_sup = |r: f64| {
            self.sampled_cell_sup(r, r + 1.0, j, 8)
                .max(self.sampled_cell_sup(-r - 1.0, -r, j, 8))
        };
        let mut prev = side_sup(0.0);
        for r in 1..MAX_TAIL_CELLS {
            let rf = r as f64;
            let m = side_sup(rf);
            if m == 0.0 {
                return Ok(rf);
            }
            let theory = if gaussian_tail {
                (-rate * (2.0 * rf + 1.0)).exp()
            } else {
                (-rate).exp()
            };
            let q = (m / prev).max(theory);
            if m < prev && q < 1.0 && 2.0 * m / (1.0 - q) < eps {
                return Ok(rf);
            }
            prev = m;
        }
        Err(Error::ToleranceUnachievable(format!(
            "tail of {} (order {j}) not below {eps:e} within {MAX_TAIL_CELLS} cells",
            self.spec
        )))
    }

    /// Maximum of `|g^{(j)}|` on `[lo, hi]`: grid scan plus golden-section refinement.
    pub fn cell_max(&self, lo: f64, hi: f64, j: usize) -> f64 {
        const N: usize = 32;
        let h = (hi - lo) / N as f64;
        let vals: Vec<f64> = (0..=N).map(|i| self.eval_unchecked(lo + h * i as f64, j).abs()).collect();
        let (imax, &vmax) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty grid");
        let a = lo + h * imax.saturating_sub(1) as f64;
        let b = (lo + h * (imax + 1) as f64).min(hi);
        let f = |x: f64| self.eval_unchecked(x, j).abs();
        vmax.max(golden_max(f, a, b))
    }

    /// Wiener amalgam norm `sum_k max_{[k,k+1]} |g^{(j)}|` to within `tol`.
    pub fn amalgam_norm(&self, j: usize, tol: f64) -> Result<f64> {
        self.check_order(j)?;
        let r = self.tail_radius(j, tol / 10.0)?.ceil() as i64;
        Ok((-r - 1..=r).map(|k| self.cell_max(k as f64, k as f64 + 1.0, j)).sum())
    }

    /// Periodisation `x -> sum_m g^{(j)}(x + m L)` certified to `tol`.
    pub fn periodizer(&self, period: f64, j: usize, tol: f64) -> Result<Periodizer<'_>> {
        self.check_order(j)?;
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidSet(format!("period {period} must be positive")));
        }
        let radius = match self.kind {
            Kind::Sinc => f64::INFINITY,
            _ => self.tail_radius(j, tol)? + 1.0,
        };
        Ok(Periodizer { gen: self, period, j, radius })
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(0.5 * (a + b)))
}

/// Evaluator for a periodised generator derivative.
#[derive(Debug, Clone, Copy)]
pub struct Periodizer<'a> {
    gen: &'a Generator,
    period: f64,
    j: usize,
    radius: f64,
}

impl Periodizer<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        let l = self.period;
        if let Kind::Sinc = self.gen.kind {
            return periodized_sinc(x, self.j, l);
        }
        let x0 = x - l * (x / l).round();
        let m_max = ((self.radius + x0.abs()) / l).ceil() as i64;
        (-m_max..=m_max)
            .map(|m| x0 + m as f64 * l)
            .filter(|t| t.abs() <= self.radius)
            .map(|t| self.gen.eval_unchecked(t, self.j))
            .sum()
    }
}

/// Symmetric periodisation of sinc via its finite Fourier series; the
/// coefficients at `|n/L| = 1/2` take the midpoint value `1/2`.
fn periodized_sinc(x: f64, j: usize, period: f64) -> f64 {
    let nmax = (period / 2.0).floor() as i64;
    let mut sum = 0.0;
    for n in -nmax..=nmax {
        let freq = n as f64 / period;
        let w = if (freq.abs() - 0.5).abs() < 1e-12 { 0.5 } else { 1.0 };
        let phase = Complex64::new(0.0, 2.0 * PI * freq);
        sum += w * (phase.powu(j as u32) * (phase * x).exp()).re;
    }
    sum / period
}

fn hermite_derivative(k: usize, x: f64, j: usize) -> f64 {
    let s = (2.0 * PI).sqrt();
    let coeffs = special::hermite_derivative_coeffs(k, j);
    let psi = special::hermite_functions(coeffs.len() - 1, s * x);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let v: f64 = coeffs.iter().zip(&psi).map(|(c, p)| c * p).sum();
    sign * (2.0 * PI).powf(0.25) * s.powi(j as i32) * v
}

/// L2-normalised Hermite function `h_k(x) = (-1)^k gamma_k e^{-pi x^2} H_k(sqrt(2 pi) x)`.
pub fn hermite_eval(k: usize, x: f64) -> f64 {
    let psi = special::hermite_functions(k, (2.0 * PI).sqrt() * x);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (2.0 * PI).powf(0.25) * psi[k]
}

pub fn eval(spec: &GeneratorSpec, x: f64, j: usize, tol: f64) -> Result<f64> {
    Generator::new(spec.clone())?.eval(x, j, tol)
}

pub fn fourier(spec: &GeneratorSpec, xi: f64) -> Result<Complex64> {
    Ok(Generator::new(spec.clone())?.fourier(xi))
}

pub fn amalgam_norm(spec: &GeneratorSpec, j: usize, tol: f64) -> Result<f64> {
    Generator::new(spec.clone())?.amalgam_norm(j, tol)
}
