//! Complex extensions of `V(g)` elements for the Gaussian (entire) and the
//! hyperbolic secant (meromorphic), with zero location by the argument
//! principle, Jensen audits, real-zero search and the Rolle transference.
//!
//! For `g(x) = e^{-a x^2}`,
//! `f(x+iy) = e^{a y^2} e^{-2aixy} sum_k c_k e^{2aiky} e^{-a(x-k)^2}`,
//! so zeros replicate along `lambda + i(pi/a)Z`. Internally the bracketed
//! sum is evaluated on its own, which keeps `f'/f` and `log|f|` finite far
//! up the imaginary axis.

use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorSpec, MAX_DERIVATIVE_ORDER};
use crate::par::{self, Exec};
use crate::pointsets::MultiSet;
use crate::quad;
use crate::sis::{CoeffSeq, Synthesizer};
use crate::special::{self, Poly};
use num_complex::Complex64;
use std::f64::consts::PI;

const POLE_GUARD: f64 = 1e-9;
const CONTOUR_GUARD: f64 = 1e-6;
const GL_ORDER: usize = 8;
const BASE_NODES_PER_SIDE: usize = 512;
const MAX_DOUBLINGS: usize = 5;
const WINDING_RESIDUAL: f64 = 0.05;
const MIN_BOX: f64 = 1e-6;
const SPLITS: [f64; 4] = [0.537, 0.463, 0.611, 0.389];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionKind {
    Entire,
    Meromorphic,
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Gaussian,
    Sech,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec(format!("degenerate rectangle [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Four sub-rectangles split at fraction `s` of each side.
    pub fn quarters(&self, s: f64) -> [Rect; 4] {
        let xm = self.x0 + s * (self.x1 - self.x0);
        let ym = self.y0 + s * (self.y1 - self.y0);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }

    fn dist_to_boundary(&self, z: Complex64) -> f64 {
        let dx = if z.re < self.x0 {
            self.x0 - z.re
        } else if z.re > self.x1 {
            z.re - self.x1
        } else {
            0.0
        };
        let dy = if z.im < self.y0 {
            self.y0 - z.im
        } else if z.im > self.y1 {
            z.im - self.y1
        } else {
            0.0
        };
        if dx == 0.0 && dy == 0.0 {
            (z.re - self.x0).min(self.x1 - z.re).min(z.im - self.y0).min(self.y1 - z.im)
        } else {
            dx.hypot(dy)
        }
    }
}

/// Analytic (Gaussian) or meromorphic (sech) extension of `sum_k c_k g(. - k)`.
#[derive(Debug, Clone)]
pub struct ComplexExtension {
    coeffs: CoeffSeq,
    spec: GeneratorSpec,
    family: Family,
    a: f64,
    polys: Vec<Poly>,
    poly_abs: Vec<f64>,
    cmax: f64,
    exec: Exec,
}

impl ComplexExtension {
    pub fn new(coeffs: CoeffSeq, spec: GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let (family, a, polys) = match spec {
            GeneratorSpec::Gaussian { a } => (Family::Gaussian, a, special::gaussian_derivative_polys(a, MAX_DERIVATIVE_ORDER)),
            GeneratorSpec::Sech { a } => (Family::Sech, a, special::sech_derivative_polys(MAX_DERIVATIVE_ORDER)),
            _ => return Err(Error::Unsupported(format!("no complex extension for {spec}"))),
        };
        let poly_abs = polys.iter().map(Poly::abs_sum).collect();
        let cmax = coeffs.sup_norm();
        Ok(ComplexExtension { coeffs, spec, family, a, polys, poly_abs, cmax, exec: Exec::default() })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn kind(&self) -> ExtensionKind {
        match self.family {
            Family::Gaussian => ExtensionKind::Entire,
            Family::Sech => ExtensionKind::Meromorphic,
        }
    }

    pub fn coeffs(&self) -> &CoeffSeq {
        &self.coeffs
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn rate(&self) -> f64 {
        self.a
    }

    /// Sums `term(k)` over the coefficient support (finite) or outward from
    /// `round(x)` until `bound(d)` times `max|c|` falls under `eps`.
    fn lattice_sum<T, B>(&self, x: f64, eps: f64, term: T, bound: B) -> Complex64
    where
        T: Fn(i64, Complex64) -> Complex64,
        B: Fn(f64) -> f64,
    {
        match &self.coeffs {
            CoeffSeq::Finite { .. } => self.coeffs.terms().map(|(k, c)| term(k, c)).sum(),
            CoeffSeq::Periodic { .. } => {
                let k0 = x.round() as i64;
                let mut s = term(k0, self.coeffs.get(k0));
                for n in 1..1_000_000i64 {
                    let (kl, kr) = (k0 - n, k0 + n);
                    s += term(kl, self.coeffs.get(kl)) + term(kr, self.coeffs.get(kr));
                    let d = (n as f64) - 0.5;
                    if self.cmax * bound(d) < eps {
                        break;
                    }
                }
                s
            }
        }
    }

    /// Bracketed Gaussian sum `sum_k c_k e^{2aiky} e^{-a(x-k)^2} P_j(z - k)`.
    fn gauss_inner(&self, z: Complex64, j: usize, eps: f64) -> Complex64 {
        let (x, y, a) = (z.re, z.im, self.a);
        let p = &self.polys[j];
        let pabs = self.poly_abs[j];
        let deg = p.degree() as i32;
        let floor = (j as f64 / (2.0 * a)).sqrt() + 1.0;
        self.lattice_sum(
            x,
            eps,
            |k, c| {
                let t = x - k as f64;
                let phase = Complex64::from_polar(1.0, 2.0 * a * k as f64 * y);
                c * phase * (-a * t * t).exp() * p.eval_complex(z - k as f64)
            },
            |d| {
                if d < floor {
                    return f64::INFINITY;
                }
                let r = (d * d + y * y).sqrt().max(1.0);
                pabs * r.powi(deg) * (-a * d * d).exp() * 4.0
            },
        )
    }

    fn gauss_prefactor(&self, z: Complex64) -> Complex64 {
        let (x, y, a) = (z.re, z.im, self.a);
        Complex64::from_polar((a * y * y).exp(), -2.0 * a * x * y)
    }

    fn sech_sum(&self, z: Complex64, j: usize, eps: f64) -> Complex64 {
        let a = self.a;
        let q = &self.polys[j];
        let qabs = self.poly_abs[j];
        let aj = a.powi(j as i32);
        let floor = 1.0 / a + 1.0;
        let tanh_cap = (1.0 + (-2.0f64).exp()) / (1.0 - (-2.0f64).exp());
        self.lattice_sum(
            z.re,
            eps,
            |k, c| {
                let (s, t) = special::sech_tanh(a * (z - k as f64));
                c * aj * s * q.eval_complex(t)
            },
            |d| {
                if d < floor {
                    return f64::INFINITY;
                }
                2.5 * (-a * d).exp() * aj * qabs * tanh_cap.powi(q.degree() as i32) * 4.0
            },
        )
    }

    fn pole_distance(&self, z: Complex64) -> f64 {
        let step = PI / self.a;
        let k = z.re.round();
        let t = (z.im / step - 0.5).round();
        let p = Complex64::new(k, step * (t + 0.5));
        (z - p).norm()
    }

    fn check_order(&self, j: usize) -> Result<()> {
        if j > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder { order: j, max: MAX_DERIVATIVE_ORDER });
        }
        Ok(())
    }

    /// `f^{(j)}(z)`. The Gaussian value is accurate to `tol * e^{a y^2}`,
    /// the secant value to `tol`.
    pub fn extend_eval(&self, z: Complex64, j: usize, tol: f64) -> Result<Complex64> {
        self.check_order(j)?;
        if !(tol > 0.0) {
            return Err(Error::ToleranceUnachievable(format!("tolerance {tol} must be positive")));
        }
        match self.family {
            Family::Gaussian => Ok(self.gauss_prefactor(z) * self.gauss_inner(z, j, tol)),
            Family::Sech => {
                if self.pole_distance(z) < POLE_GUARD {
                    return Err(Error::PoleProximity(z));
                }
                Ok(self.sech_sum(z, j, tol))
            }
        }
    }

    /// `f^{(j)}(z)` divided by the Gaussian growth factor `e^{a y^2}`
    /// (unchanged for the secant).
    pub fn extend_eval_scaled(&self, z: Complex64, j: usize, tol: f64) -> Result<Complex64> {
        match self.family {
            Family::Gaussian => {
                self.check_order(j)?;
                let phase = Complex64::from_polar(1.0, -2.0 * self.a * z.re * z.im);
                Ok(phase * self.gauss_inner(z, j, tol))
            }
            Family::Sech => self.extend_eval(z, j, tol),
        }
    }

    /// `(f'(z)/f(z), |f(z)| / scale(z))` with the Gaussian growth removed.
    fn log_derivative(&self, z: Complex64) -> (Complex64, f64) {
        let eps = 1e-17;
        let (f0, f1) = match self.family {
            Family::Gaussian => (self.gauss_inner(z, 0, eps), self.gauss_inner(z, 1, eps)),
            Family::Sech => (self.sech_sum(z, 0, eps), self.sech_sum(z, 1, eps)),
        };
        (f1 / f0, f0.norm())
    }

    fn log_abs(&self, z: Complex64) -> Result<f64> {
        match self.family {
            Family::Gaussian => Ok(self.a * z.im * z.im + self.gauss_inner(z, 0, 1e-17).norm().ln()),
            Family::Sech => Ok(self.extend_eval(z, 0, 1e-17)?.norm().ln()),
        }
    }

    /// Poles of the secant extension in the closed box `[x0,x1]x[y0,y1]`:
    /// `k + i(pi/a)(1/2 + t)` with `c_k != 0`.
    pub fn poles_in(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<Complex64> {
        if let Family::Gaussian = self.family {
            return Vec::new();
        }
        let step = PI / self.a;
        let t0 = (y0 / step - 0.5).ceil() as i64;
        let t1 = (y1 / step - 0.5).floor() as i64;
        let mut out = Vec::new();
        for k in x0.ceil() as i64..=x1.floor() as i64 {
            if self.coeffs.get(k).norm() == 0.0 {
                continue;
            }
            for t in t0..=t1 {
                out.push(Complex64::new(k as f64, step * (t as f64 + 0.5)));
            }
        }
        out
    }

    fn poles_inside(&self, r: &Rect) -> Result<usize> {
        let ps = self.poles_in(r.x0 - 1.0, r.x1 + 1.0, r.y0 - 1.0, r.y1 + 1.0);
        let mut n = 0;
        for p in ps {
            if r.dist_to_boundary(p) < CONTOUR_GUARD {
                return Err(Error::ContourTooClose);
            }
            n += usize::from(r.contains(p));
        }
        Ok(n)
    }

    fn contour_integral(&self, r: &Rect, nodes_per_side: usize, gl: &(Vec<f64>, Vec<f64>)) -> Result<Complex64> {
        let corners = [
            Complex64::new(r.x0, r.y0),
            Complex64::new(r.x1, r.y0),
            Complex64::new(r.x1, r.y1),
            Complex64::new(r.x0, r.y1),
        ];
        let panels = nodes_per_side / GL_ORDER;
        let (xs, ws) = gl;
        let mut total = Complex64::new(0.0, 0.0);
        let mut fmax = 0.0f64;
        let mut fmin = f64::INFINITY;
        for side in 0..4 {
            let (za, zb) = (corners[side], corners[(side + 1) % 4]);
            let dz = (zb - za) / panels as f64;
            for p in 0..panels {
                let base = za + dz * p as f64;
                for (x, w) in xs.iter().zip(ws) {
                    let z = base + dz * (0.5 * (x + 1.0));
                    let (ld, fabs) = self.log_derivative(z);
                    if !(ld.re.is_finite() && ld.im.is_finite()) || fabs == 0.0 {
                        return Err(Error::ContourTooClose);
                    }
                    fmax = fmax.max(fabs);
                    fmin = fmin.min(fabs);
                    total += ld * dz * (0.5 * w);
                }
            }
        }
        if fmin < 1e-14 * fmax {
            return Err(Error::ContourTooClose);
        }
        Ok(total)
    }

    /// Winding number of `f` around the rectangle: zeros minus poles inside.
    pub fn count_zeros_box(&self, r: &Rect) -> Result<i64> {
        self.poles_inside(r)?;
        let gl = quad::gauss_legendre(GL_ORDER);
        let mut prev: Option<i64> = None;
        let mut last = f64::NAN;
        for d in 0..=MAX_DOUBLINGS {
            let n = BASE_NODES_PER_SIDE << d;
            let w = self.contour_integral(r, n, &gl)? / Complex64::new(0.0, 2.0 * PI);
            let rounded = w.re.round();
            let residual = (w.re - rounded).abs().max(w.im.abs());
            last = w.re;
            if residual < WINDING_RESIDUAL {
                if prev == Some(rounded as i64) {
                    return Ok(rounded as i64);
                }
                prev = Some(rounded as i64);
            } else {
                prev = None;
            }
        }
        Err(Error::NonIntegerWinding(last))
    }

    /// Zeros (not poles) inside the rectangle, counted with multiplicity.
    pub fn zero_count(&self, r: &Rect) -> Result<usize> {
        let w = self.count_zeros_box(r)?;
        let total = w + self.poles_inside(r)? as i64;
        usize::try_from(total).map_err(|_| Error::NonIntegerWinding(total as f64))
    }

    fn newton(&self, z0: Complex64, mult: usize, r: &Rect) -> Complex64 {
        let mut z = z0;
        for _ in 0..60 {
            let (ld, _) = self.log_derivative(z);
            if !(ld.re.is_finite() && ld.im.is_finite()) || ld.norm() == 0.0 {
                break;
            }
            let step = mult as f64 / ld;
            let next = z - step;
            if !r.contains(next) {
                return z0;
            }
            z = next;
            if step.norm() < 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        z
    }

    fn locate_rec(&self, r: Rect, count: usize, depth: usize) -> Result<Vec<(Complex64, usize)>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let no_poles = self.poles_inside(&r)? == 0;
        if count == 1 && no_poles && r.size() < 0.25 {
            let z = self.newton(r.center(), 1, &r);
            if z != r.center() || r.size() < MIN_BOX {
                return Ok(vec![(z, 1)]);
            }
        }
        if r.size() < MIN_BOX || depth > 60 {
            return Ok(vec![(self.newton(r.center(), count, &r), count)]);
        }
        for s in SPLITS {
            let quarters = r.quarters(s);
            let counts = par::try_map_indexed(4, self.exec, |i| self.zero_count(&quarters[i]));
            let Ok(counts) = counts else { continue };
            if counts.iter().sum::<usize>() != count {
                continue;
            }
            let parts = par::try_map_indexed(4, self.exec, |i| self.locate_rec(quarters[i], counts[i], depth + 1))?;
            return Ok(parts.into_iter().flatten().collect());
        }
        Err(Error::NonIntegerWinding(count as f64))
    }

    /// Zeros inside `r` with multiplicities (clusters tighter than `1e-6`
    /// are reported as one point).
    pub fn locate_zeros(&self, r: &Rect) -> Result<Vec<(Complex64, usize)>> {
        let n = self.zero_count(r)?;
        let mut zs = self.locate_rec(*r, n, 0)?;
        zs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        Ok(zs)
    }
}

/// `C = sup_{0<=x<=1} sum_k e^{-a(x-k)^2}`, the Gaussian growth constant.
pub fn gaussian_growth_constant(a: f64) -> f64 {
    let kmax = ((40.0 / a).sqrt()).ceil() as i64 + 2;
    (0..=200)
        .map(|i| {
            let x = i as f64 / 200.0;
            (-kmax..=kmax).map(|k| (-a * (x - k as f64).powi(2)).exp()).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `C = 1 + 2 e^a sum_{k != 0} e^{-a|k|} = 1 + 4 / (1 - e^{-a})` for the secant.
pub fn sech_growth_constant(a: f64) -> f64 {
    1.0 + 4.0 / (1.0 - (-a).exp())
}

/// Distance to the nearest integer, `<x> ∈ [-1/2, 1/2)`.
pub fn round_off(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Pointwise growth bound of the secant extension:
/// `C ||c||_inf min(|a<x>|^{-1}, |2<ay/pi - 1/2>|^{-1})`.
pub fn sech_growth_bound(a: f64, cmax: f64, z: Complex64) -> f64 {
    let bx = 1.0 / (a * round_off(z.re)).abs();
    let by = 1.0 / (2.0 * round_off(a * z.im / PI - 0.5)).abs();
    sech_growth_constant(a) * cmax * bx.min(by)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub index: i64,
    pub shift: f64,
    /// `max_{j<m} |f^{(j)}(lambda + i shift)|`, growth-adjusted for the Gaussian.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport {
    pub lambda: f64,
    pub mult: usize,
    pub rows: Vec<ReplicationRow>,
}

impl ReplicationReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Evaluates `f^{(j)}`, `j < m`, at `lambda + i(pi/a)t` for `|t| <= l_range`.
/// `lambda` must be a real zero of order exactly `m` at level `tol`.
pub fn zero_replication_check(
    ext: &ComplexExtension,
    lambda: f64,
    m: usize,
    l_range: usize,
    tol: f64,
) -> Result<ReplicationReport> {
    let z = Complex64::new(lambda, 0.0);
    for j in 0..m {
        if ext.extend_eval(z, j, tol * 1e-3)?.norm() >= tol {
            return Err(Error::NotAZero(lambda));
        }
    }
    if ext.extend_eval(z, m, tol * 1e-3)?.norm() <= tol {
        return Err(Error::NotAZero(lambda));
    }
    let step = PI / ext.rate();
    let l = l_range as i64;
    let rows = (-l..=l)
        .map(|t| {
            let shift = step * t as f64;
            let zl = Complex64::new(lambda, shift);
            let mut residual = 0.0f64;
            for j in 0..m {
                residual = residual.max(ext.extend_eval_scaled(zl, j, tol * 1e-3)?.norm());
            }
            Ok(ReplicationRow { index: t, shift, residual })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicationReport { lambda, mult: m, rows })
}

#[derive(Debug, Clone, Copy)]
pub struct RealZeroOptions {
    pub step: f64,
    /// Relative threshold below which a derivative counts as vanishing.
    pub mult_threshold: f64,
    /// Relative level below which a local minimum of `|f|` is a zero.
    pub min_threshold: f64,
    /// Zeros within this distance of the right end are excluded, of the
    /// left end included.
    pub boundary_tol: f64,
}

impl Default for RealZeroOptions {
    fn default() -> Self {
        RealZeroOptions { step: 0.05, mult_threshold: 1e-7, min_threshold: 1e-9, boundary_tol: 1e-9 }
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn local_scale<F: Fn(f64, usize) -> f64>(f: &F, x: f64, j: usize) -> f64 {
    (0..=40).map(|i| f(x - 1.0 + i as f64 / 20.0, j).abs()).fold(0.0, f64::max)
}

fn multiplicity<F: Fn(f64, usize) -> f64>(f: &F, x: f64, max_mult: usize, thr: f64) -> Result<usize> {
    for j in 0..=max_mult {
        let scale = local_scale(f, x, j);
        if f(x, j).abs() >= thr * scale && scale > 0.0 {
            return Ok(j);
        }
    }
    Err(Error::MultiplicityOverflow(x))
}

/// Real zeros of `f` in `[a, b)`; `f(x, j)` returns `f^{(j)}(x)`.
///
/// Odd-order zeros come from sign changes on a grid, even-order ones from
/// local minima of `|f|` refined as zeros of `f'`. Zeros closer together
/// than the grid step may be missed.
pub fn real_zeros_fn<F>(f: F, interval: (f64, f64), max_mult: usize, opts: &RealZeroOptions) -> Result<MultiSet>
where
    F: Fn(f64, usize) -> f64,
{
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidSpec(format!("empty interval [{a}, {b})")));
    }
    let n = ((b - a) / opts.step).ceil() as usize;
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n + 2).map(|i| a + (i as f64 - 1.0) * h).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x, 0)).collect();
    let mut cands = Vec::new();
    for i in 0..xs.len() {
        // exact zeros inside a plateau (underflow, truncated tails) carry no information
        let isolated = i > 0 && i + 1 < xs.len() && vs[i - 1] != 0.0 && vs[i + 1] != 0.0;
        if vs[i] == 0.0 && isolated {
            cands.push(xs[i]);
        }
        if i + 1 < xs.len() && vs[i] != 0.0 && vs[i + 1] != 0.0 && (vs[i] < 0.0) != (vs[i + 1] < 0.0) {
            cands.push(bisect(|x| f(x, 0), xs[i], xs[i + 1]));
        }
        if i > 0 && i + 1 < xs.len() {
            let (l, c, r) = (vs[i - 1].abs(), vs[i].abs(), vs[i + 1].abs());
            let same_sign = (vs[i - 1] < 0.0) == (vs[i] < 0.0) && (vs[i] < 0.0) == (vs[i + 1] < 0.0);
            if c <= l && c <= r && same_sign && vs[i] != 0.0 {
                let (d0, d1) = (f(xs[i - 1], 1), f(xs[i + 1], 1));
                if (d0 < 0.0) != (d1 < 0.0) {
                    let x = bisect(|x| f(x, 1), xs[i - 1], xs[i + 1]);
                    if f(x, 0).abs() <= opts.min_threshold * local_scale(&f, x, 0) {
                        cands.push(x);
                    }
                }
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
    let mut points = Vec::new();
    let mut mults = Vec::new();
    for x in cands {
        let x = if (x - a).abs() <= opts.boundary_tol { a } else { x };
        if x < a || x > b - opts.boundary_tol {
            continue;
        }
        let m = multiplicity(&f, x, max_mult, opts.mult_threshold)?;
        if m == 0 {
            continue;
        }
        points.push(x);
        mults.push(m);
    }
    MultiSet::new(points, mults)
}

/// Real zeros of `sum_k c_k g^{(j)}(. - k)` in `[a, b)`.
pub fn real_zeros(
    c: &CoeffSeq,
    gen: &Generator,
    j: usize,
    interval: (f64, f64),
    max_mult: usize,
    tol: f64,
) -> Result<MultiSet> {
    if !c.is_real() {
        return Err(Error::InvalidSpec("real zeros need real coefficients".into()));
    }
    let syn = (0..=max_mult + 1)
        .map(|i| Synthesizer::new(c, gen, j + i, tol))
        .collect::<Result<Vec<_>>>()?;
    real_zeros_fn(|x, i| syn[i].eval_re(x), interval, max_mult, &RealZeroOptions::default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolleReport {
    pub zeros_f: MultiSet,
    pub zeros_g: MultiSet,
    pub density_f: f64,
    pub density_g: f64,
    pub slack: f64,
}

impl RolleReport {
    /// `density_g >= density_f - slack`.
    pub fn holds(&self) -> bool {
        self.density_g >= self.density_f - self.slack
    }
}

/// Zeros of `f` and of `g = shift f + f'` on `[a, b)` with their window
/// densities (total multiplicity over length). `f(x, j) = f^{(j)}(x)`.
pub fn rolle_transfer<F>(f: F, shift: f64, interval: (f64, f64), max_mult: usize) -> Result<RolleReport>
where
    F: Fn(f64, usize) -> f64,
{
    let opts = RealZeroOptions::default();
    let zeros_f = real_zeros_fn(&f, interval, max_mult, &opts)?;
    let g = |x: f64, j: usize| shift * f(x, j) + f(x, j + 1);
    let zeros_g = real_zeros_fn(g, interval, max_mult, &opts)?;
    let len = interval.1 - interval.0;
    Ok(RolleReport {
        density_f: zeros_f.total_mult() as f64 / len,
        density_g: zeros_g.total_mult() as f64 / len,
        zeros_f,
        zeros_g,
        slack: 2.0 / len,
    })
}

/// [`rolle_transfer`] for `f = sum_k c_k g(. - k)`.
pub fn rolle_transfer_sis(
    c: &CoeffSeq,
    gen: &Generator,
    shift: f64,
    interval: (f64, f64),
    max_mult: usize,
    tol: f64,
) -> Result<RolleReport> {
    let syn = (0..=max_mult + 2)
        .map(|i| Synthesizer::new(c, gen, i, tol))
        .collect::<Result<Vec<_>>>()?;
    rolle_transfer(|x, i| syn[i].eval_re(x), shift, interval, max_mult)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    pub radius: f64,
    /// Real zeros on `[-R, R)` taken from the located complex zeros.
    pub real_zeros: MultiSet,
    pub zeros: Vec<(Complex64, usize)>,
    pub poles: Vec<Complex64>,
    pub radii: Vec<f64>,
    pub n_z: Vec<usize>,
    pub n_p: Vec<usize>,
    pub order_at_origin: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl ZeroReport {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// `|lhs - rhs| / max(1, |rhs|)`.
    pub fn relative_gap(&self) -> f64 {
        self.gap() / self.rhs.abs().max(1.0)
    }

    /// Counting function `n(r) = n_z(r) - n_p(r)` on the radius grid.
    pub fn n(&self) -> Vec<i64> {
        self.n_z.iter().zip(&self.n_p).map(|(&z, &p)| z as i64 - p as i64).collect()
    }
}

/// Jensen audit on the disk of radius `r`.
///
/// The left side `int_0^R n(t)/t dt` is evaluated exactly from the zeros
/// located in a square slightly larger than the disk (their number is
/// certified by the argument principle) and from the pole lattice. The right
/// side is the trapezoidal mean of `log|f(R e^{i theta})|` over `theta_grid`
/// nodes minus `log|C_m| + m log R` when `f` vanishes to order `m` at `0`.
pub fn jensen_audit(ext: &ComplexExtension, r: f64, theta_grid: usize, r_grid: usize) -> Result<ZeroReport> {
    if !(r > 0.0) || theta_grid < 16 || r_grid < 1 {
        return Err(Error::InvalidSpec(format!("jensen audit needs R > 0, theta grid >= 16, r grid >= 1 (got {r}, {theta_grid}, {r_grid})")));
    }
    let square = Rect::new(-1.0137 * r, 1.0211 * r, -1.0173 * r, 1.0119 * r)?;
    let zeros = ext.locate_zeros(&square)?;
    let poles: Vec<Complex64> =
        ext.poles_in(-r, r, -r, r).into_iter().filter(|p| p.norm() <= r).collect();
    let near = |z: Complex64| (z.norm() - r).abs() < CONTOUR_GUARD;
    if zeros.iter().any(|(z, _)| near(*z)) || poles.iter().any(|p| near(*p)) {
        return Err(Error::ZeroOnContour);
    }
    let inside: Vec<(Complex64, usize)> = zeros.iter().copied().filter(|(z, _)| z.norm() <= r).collect();
    let origin_tol = 1e-7;
    let order_at_origin: usize = inside.iter().filter(|(z, _)| z.norm() < origin_tol).map(|(_, m)| m).sum();
    let mut lhs = 0.0;
    for (z, m) in &inside {
        if z.norm() >= origin_tol {
            lhs += *m as f64 * (r / z.norm()).ln();
        }
    }
    for p in &poles {
        lhs -= (r / p.norm()).ln();
    }
    let cm = ext.extend_eval(Complex64::new(0.0, 0.0), order_at_origin, 1e-17)?.norm()
        / (1..=order_at_origin).map(|i| i as f64).product::<f64>();
    let logs = par::try_map_indexed(theta_grid, ext.exec, |i| {
        let th = 2.0 * PI * i as f64 / theta_grid as f64;
        ext.log_abs(Complex64::from_polar(r, th))
    })?;
    let mean = logs.iter().sum::<f64>() / theta_grid as f64;
    let rhs = mean - cm.ln() - order_at_origin as f64 * r.ln();
    let radii: Vec<f64> = (1..=r_grid).map(|i| r * i as f64 / r_grid as f64).collect();
    let n_z = radii
        .iter()
        .map(|&t| inside.iter().filter(|(z, _)| z.norm() <= t).map(|(_, m)| m).sum())
        .collect();
    let n_p = radii.iter().map(|&t| poles.iter().filter(|p| p.norm() <= t).count()).collect();
    let mut real: Vec<(f64, usize)> = inside
        .iter()
        .filter(|(z, _)| z.im.abs() < 1e-8 && z.re < r)
        .map(|(z, m)| (z.re, *m))
        .collect();
    real.sort_by(|a, b| a.0.total_cmp(&b.0));
    let real_zeros = MultiSet::new(real.iter().map(|p| p.0).collect(), real.iter().map(|p| p.1).collect())?;
    Ok(ZeroReport { radius: r, real_zeros, zeros, poles, radii, n_z, n_p, order_at_origin, lhs, rhs })
}
