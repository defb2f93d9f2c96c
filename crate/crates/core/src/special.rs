//! Special functions and the small polynomial algebra used by the generators.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Real polynomial in the monomial basis, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn one() -> Self {
        Poly(vec![1.0])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    /// Sum of absolute coefficients; bounds |p(t)| on [-1, 1].
    pub fn abs_sum(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Multiplies by `x`.
    pub fn shift_up(&self) -> Poly {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(0.0);
        v.extend_from_slice(&self.0);
        Poly(v)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }
}

/// Polynomials `p_j` with `d^j/dx^j e^{-a x^2} = p_j(x) e^{-a x^2}`,
/// via `p_{j+1}(x) = -2 a x p_j(x) + p_j'(x)`.
pub fn gaussian_derivative_polys(a: f64, max_order: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(Poly::one());
    for j in 0..max_order {
        let p = &out[j];
        let next = p.shift_up().scale(-2.0 * a).add(&p.derivative());
        out.push(next);
    }
    out
}

/// Polynomials `Q_j` with `d^j/dx^j sech(x) = sech(x) Q_j(tanh x)`.
///
/// Uses `(sech)' = -sech tanh` and `(tanh)' = 1 - tanh^2`, so
/// `Q_{j+1}(t) = -t Q_j(t) + (1 - t^2) Q_j'(t)`.
pub fn sech_derivative_polys(max_order: usize) -> Vec<Poly> {
    let one_minus_t2 = Poly(vec![1.0, 0.0, -1.0]);
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(Poly::one());
    for j in 0..max_order {
        let q = &out[j];
        let next = q.shift_up().scale(-1.0).add(&one_minus_t2.mul(&q.derivative()));
        out.push(next);
    }
    out
}

/// Complex `sech` and `tanh` evaluated without overflow for large `|Re w|`.
pub fn sech_tanh(w: Complex64) -> (Complex64, Complex64) {
    // Reflect to Re >= 0; sech is even, tanh is odd.
    let (v, sign) = if w.re >= 0.0 { (w, 1.0) } else { (-w, -1.0) };
    let e = (-2.0 * v).exp();
    let denom = Complex64::new(1.0, 0.0) + e;
    let sech = 2.0 * (-v).exp() / denom;
    let tanh = (Complex64::new(1.0, 0.0) - e) / denom;
    (sech, tanh * sign)
}

pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// Scaled complementary error function `e^{x^2} erfc(x)` for `x >= 0`.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 5.0 {
        return (x * x).exp() * erfc(x);
    }
    // Lentz evaluation of erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let an = n as f64 / 2.0;
        d = x + an * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (f * PI.sqrt())
}

/// L2-normalised Hermite functions `psi_0..=psi_n` at `t` (physicists' weight `e^{-t^2/2}`).
pub fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * t * t).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * t * out[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Coefficients `v` with `psi_k^{(j)} = sum_n v[n] psi_n`, from
/// `psi_n' = sqrt(n/2) psi_{n-1} - sqrt((n+1)/2) psi_{n+1}`.
pub fn hermite_derivative_coeffs(k: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; k + j + 2];
    v[k] = 1.0;
    for _ in 0..j {
        let mut w = vec![0.0; v.len()];
        for (n, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let nf = n as f64;
            if n >= 1 {
                w[n - 1] += c * (nf / 2.0).sqrt();
            }
            if n + 1 < w.len() {
                w[n + 1] -= c * ((nf + 1.0) / 2.0).sqrt();
            }
        }
        v = w;
    }
    v
}

/// `d^j/dx^j sin(pi x)/(pi x)`.
pub fn sinc_derivative(x: f64, j: usize) -> f64 {
    // sinc^{(j)}(x) = (2 pi i)^j I_j(x), I_j(x) = int_{-1/2}^{1/2} s^j e^{2 pi i x s} ds.
    let omega = 2.0 * PI * x;
    let ij = if x.abs() <= (2.0f64).max(j as f64 / PI) {
        sinc_moment_series(omega, j)
    } else {
        sinc_moment_recurrence(omega, j)
    };
    let factor = Complex64::new(0.0, 2.0 * PI).powu(j as u32);
    (factor * ij).re
}

fn sinc_moment_series(omega: f64, j: usize) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0); // (i w)^n / n!
    for n in 0..400 {
        let p = j + n;
        if p.is_multiple_of(2) {
            let moment = 2.0 / ((p as f64 + 1.0) * 2f64.powi(p as i32 + 1));
            sum += term * moment;
        }
        if n > 10 && term.norm() < 1e-20 * sum.norm().max(1e-300) {
            break;
        }
        term = term * iw / (n as f64 + 1.0);
    }
    sum
}

fn sinc_moment_recurrence(omega: f64, j: usize) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    let ep = Complex64::from_polar(1.0, omega / 2.0);
    let em = ep.conj();
    let mut prev = (ep - em) / iw;
    for n in 1..=j {
        let half = 0.5f64.powi(n as i32);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let boundary = (ep * half - em * (sign * half)) / iw;
        prev = boundary - prev * (n as f64) / iw;
    }
    prev
}
