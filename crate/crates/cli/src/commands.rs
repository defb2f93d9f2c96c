//! One function per subcommand. Each writes its CSVs into the output
//! directory and returns summary lines plus the outcome of any configured
//! checks.

use crate::config::*;
use crate::error::{CliError, CliResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siss::gabor::{gabor_sweep, WindowVector};
use siss::io::{self, fmt_f64, write_csv};
use siss::pointsets::DensityMode;
use siss::sampling::{self, AssembleOptions, Method, SamplingOperator, SweepFamily};
use siss::sis::{self, CoeffSeq};
use siss::zeros::{self, ComplexExtension, Rect};
use siss::{Exec, Generator, GeneratorSpec, MultiSet};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Debug, Default)]
pub struct Report {
    pub summary: Vec<(String, String)>,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Report {
    fn line(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn check(&mut self, name: &'static str, pass: bool, detail: String) {
        self.checks.push(CheckOutcome { name, pass, detail });
    }
}

pub struct Ctx {
    pub loaded: Loaded,
    pub out_dir: PathBuf,
    pub exec: Exec,
}

impl Ctx {
    fn cfg(&self) -> &Config {
        &self.loaded.config
    }

    fn tol(&self) -> f64 {
        self.cfg().tolerances.tol
    }

    fn comments(&self, cmd: &str) -> Vec<String> {
        let mut c = vec![format!("siss {cmd}"), format!("config_sha256={}", self.loaded.hash)];
        if let Some(g) = self.cfg().generator.as_ref().and_then(|g| g.spec().ok()) {
            c.push(format!("generator={g}"));
        }
        c
    }

    fn create(&self, name: &str, report: &mut Report) -> CliResult<BufWriter<File>> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        let f = File::create(&path)?;
        report.files.push(path);
        Ok(BufWriter::new(f))
    }

    fn spec(&self) -> CliResult<GeneratorSpec> {
        self.cfg().generator.as_ref().ok_or_else(|| missing("generator"))?.spec()
    }

    fn generator(&self) -> CliResult<Generator> {
        Ok(Generator::new(self.spec()?)?)
    }

    fn set(&self) -> CliResult<MultiSet> {
        Ok(match self.cfg().set.as_ref().ok_or_else(|| missing("set"))? {
            SetCfg::Lattice { alpha, count, min_period, mult } => {
                let (alpha, n) = match (count, min_period) {
                    (Some(n), None) => (*alpha, *n),
                    (None, p) => sampling::realize_lattice(*alpha, p.unwrap_or(40))?,
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config("[set] give `count` or `min_period`, not both".into()))
                    }
                };
                MultiSet::lattice(alpha, n, *mult)?
            }
            SetCfg::Points { points, mults, period } => {
                let mults = mults.clone().unwrap_or_else(|| vec![1; points.len()]);
                match period {
                    Some(l) => MultiSet::periodic(points.clone(), mults, *l)?,
                    None => MultiSet::new(points.clone(), mults)?,
                }
            }
            SetCfg::Csv { path } => io::read_multiset(File::open(self.loaded.resolve(path))?)?,
        })
    }

    /// Coefficients from `[coefficients]`; `default_period` sizes random
    /// periodic draws when `terms` is absent.
    fn coeffs(&self, default_period: Option<usize>) -> CliResult<CoeffSeq> {
        Ok(match self.cfg().coefficients.as_ref().ok_or_else(|| missing("coefficients"))? {
            CoeffCfg::Random { terms, offset, periodic } => {
                let n = terms.or(default_period).ok_or_else(|| {
                    CliError::Config("[coefficients] random draws need `terms`".into())
                })?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg().run.seed);
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                if *periodic {
                    CoeffSeq::periodic_real(&v)?
                } else {
                    CoeffSeq::finite_real(*offset, &v)?
                }
            }
            CoeffCfg::Finite { offset, values } => CoeffSeq::finite_real(*offset, values)?,
            CoeffCfg::Periodic { values } => CoeffSeq::periodic_real(values)?,
            CoeffCfg::Csv { path } => io::read_coeffs(File::open(self.loaded.resolve(path))?)?,
        })
    }

    fn operator(&self, ms: &MultiSet, gen: &Generator) -> CliResult<SamplingOperator> {
        let opts = AssembleOptions { tol: self.tol(), exec: self.exec, ..Default::default() };
        Ok(if ms.period().is_some() {
            sampling::assemble_with(ms, gen, &opts)?
        } else {
            sampling::assemble_truncated(ms, gen, &opts)?
        })
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("missing [{section}] section"))
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

pub fn density(ctx: &Ctx) -> CliResult<Report> {
    let ms = ctx.set()?;
    let (mode, d) = match ms.period() {
        Some(_) => ("exact_periodic", ms.lower_density(DensityMode::ExactPeriodic)?),
        None => {
            let extent = ms.points().last().copied().unwrap_or(0.0) - ms.points().first().copied().unwrap_or(0.0);
            let r_max = ctx.cfg().tolerances.r_max.unwrap_or(extent / 2.0);
            ("windowed", ms.lower_density(DensityMode::Windowed { r_max })?)
        }
    };
    let sep = ms.separation();
    let mut rep = Report::default();
    let mut w = ctx.create("density.csv", &mut rep)?;
    write_csv(
        &mut w,
        &ctx.comments("density"),
        &["mode", "density", "separation", "points", "total_mult"],
        [vec![mode.to_string(), f(d), f(sep), ms.len().to_string(), ms.total_mult().to_string()]],
    )?;
    rep.line("mode", mode);
    rep.line("density", format!("{d:?}"));
    rep.line("separation", format!("{sep:?}"));
    if let Some(want) = ctx.cfg().check.density {
        rep.check("density", (d - want).abs() <= 1e-12 * want.abs().max(1.0), format!("{d:?} vs {want:?}"));
    }
    Ok(rep)
}

pub fn framebounds(ctx: &Ctx) -> CliResult<Report> {
    let gen = ctx.generator()?;
    let ms = ctx.set()?;
    let op = ctx.operator(&ms, &gen)?;
    let coef = sampling::frame_bounds(&op)?;
    let riesz = sis::riesz_bounds(&gen, ctx.cfg().tolerances.riesz_grid)?;
    let func = sampling::to_function_domain(&coef, &riesz)?;
    let mut rep = Report::default();
    let mut w = ctx.create("framebounds.csv", &mut rep)?;
    let rows = [("coefficient", coef), ("function", func), ("riesz", riesz)];
    write_csv(
        &mut w,
        &ctx.comments("framebounds"),
        &["domain", "lower", "upper"],
        rows.iter().map(|(n, b)| vec![n.to_string(), f(b.lower), f(b.upper)]),
    )?;
    if ctx.cfg().framebounds.as_ref().is_some_and(|c| c.export_operator) {
        let mut m = ctx.create("operator.csv", &mut rep)?;
        let mut s = ctx.create("operator.json", &mut rep)?;
        io::write_operator(&op, &mut m, &mut s)?;
    }
    for (n, b) in rows {
        rep.line(&format!("{n}_lower"), f(b.lower));
        rep.line(&format!("{n}_upper"), f(b.upper));
    }
    if let Some(min) = ctx.cfg().check.min_lower {
        rep.check("min_lower", func.lower >= min, format!("function-domain lower {} vs {}", f(func.lower), f(min)));
    }
    Ok(rep)
}

pub fn reconstruct(ctx: &Ctx) -> CliResult<Report> {
    let gen = ctx.generator()?;
    let ms = ctx.set()?;
    let op = ctx.operator(&ms, &gen)?;
    let rcfg = ctx.cfg().reconstruct.clone().ok_or_else(|| missing("reconstruct"))?;
    let mut rep = Report::default();
    let comments = ctx.comments("reconstruct");

    let (truth, samples) = match &rcfg.samples {
        Some(p) => {
            let read = io::read_samples(File::open(ctx.loaded.resolve(p))?)?;
            if read.len() != op.rows.len() || read.iter().zip(&op.rows).any(|((r, _), o)| r.1 != o.1 || (r.0 - o.0).abs() > 1e-12) {
                return Err(CliError::Config("samples CSV rows do not match the set".into()));
            }
            (None, read.into_iter().map(|(_, v)| v).collect::<Vec<_>>())
        }
        None => {
            let c = ctx.coeffs(Some(op.cols.len()))?;
            let values: Vec<f64> = op.cols.iter().map(|&k| c.get(k).re).collect();
            let y = op.apply(&values);
            let mut w = ctx.create("samples.csv", &mut rep)?;
            io::write_samples(&mut w, &op.rows, &y, &comments)?;
            (Some(values), y)
        }
    };

    let (estimate, iter_rows) = match rcfg.method {
        MethodCfg::LeastSquares => (sampling::reconstruct(&samples, &op, Method::LeastSquares)?, None),
        MethodCfg::Frame => {
            let mut errs = Vec::new();
            let it = sampling::frame_iterate(&samples, &op, rcfg.relax, rcfg.iter_tol, rcfg.max_iter, |_, c| {
                if let Some(t) = &truth {
                    errs.push(rel_err(t, c));
                }
            })?;
            rep.line("iterations", it.iterations);
            rep.line("relax", f(it.relax));
            rep.line("predicted_rate", f(it.predicted_rate()));
            if !errs.is_empty() {
                let worst = errs.windows(2).filter(|w| w[0] > 1e-12).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                rep.line("worst_step_ratio", f(worst));
            }
            let coeffs = match op.model {
                sampling::Model::Periodic { .. } => CoeffSeq::periodic_real(&it.coeffs)?,
                sampling::Model::Truncated { .. } => CoeffSeq::finite_real(op.cols[0], &it.coeffs)?,
            };
            (coeffs, Some((it.residuals, errs)))
        }
    };
    let mut w = ctx.create("reconstruct.csv", &mut rep)?;
    io::write_coeffs(&mut w, &estimate, &comments)?;
    if let Some((residuals, errs)) = iter_rows {
        let mut w = ctx.create("iterations.csv", &mut rep)?;
        let rows = residuals.iter().enumerate().map(|(n, r)| {
            let e = errs.get(n).map(|e| f(*e)).unwrap_or_default();
            vec![n.to_string(), f(*r), e]
        });
        write_csv(&mut w, &comments, &["n", "residual", "error"], rows)?;
    }
    if let Some(t) = &truth {
        let est: Vec<f64> = op.cols.iter().map(|&k| estimate.get(k).re).collect();
        let e = rel_err(t, &est);
        rep.line("relative_error", f(e));
        if let Some(max) = ctx.cfg().check.max_error {
            rep.check("max_error", e <= max, format!("{} vs {}", f(e), f(max)));
        }
    }
    Ok(rep)
}

fn rel_err(truth: &[f64], est: &[f64]) -> f64 {
    let n: f64 = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d: f64 = truth.iter().zip(est).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    d / n.max(f64::MIN_POSITIVE)
}

pub fn sweep(ctx: &Ctx) -> CliResult<Report> {
    let gen = ctx.generator()?;
    let scfg = ctx.cfg().sweep.as_ref().ok_or_else(|| missing("sweep"))?;
    let params = scfg.params()?;
    let family = match *scfg {
        SweepCfg::AlphaDilate { mult, min_period, .. } => SweepFamily::AlphaDilate { mult, min_period },
        SweepCfg::PointDelete { alpha, mult, min_period, .. } => SweepFamily::PointDelete { alpha, mult, min_period },
    };
    let rows = sampling::sweep(&gen, family, &params, ctx.tol(), ctx.exec)?;
    let mut rep = Report::default();
    let mut w = ctx.create("sweep.csv", &mut rep)?;
    let mut comments = ctx.comments("sweep");
    comments.push("threshold=1".into());
    write_csv(
        &mut w,
        &comments,
        &["param", "density", "lower", "upper"],
        rows.iter().map(|r| vec![f(r.param), f(r.density), f(r.lower), f(r.upper)]),
    )?;
    for r in &rows {
        rep.line(&format!("density {:.6}", r.density), f(r.lower));
    }
    let lowers: Vec<f64> = rows.iter().map(|r| r.lower).collect();
    separation_checks(ctx, &mut rep, &lowers);
    Ok(rep)
}

/// Checks on a column of lower bounds ordered from dense to sparse.
fn separation_checks(ctx: &Ctx, rep: &mut Report, lowers: &[f64]) {
    let check = &ctx.cfg().check;
    if check.monotone == Some(true) {
        let ok = lowers.windows(2).all(|w| w[1] <= w[0]);
        rep.check("monotone", ok, format!("{} rows", lowers.len()));
    }
    if let (Some(factor), Some(first), Some(last)) = (check.min_separation, lowers.first(), lowers.last()) {
        let ok = *first > 0.0 && *first >= factor * last;
        rep.check("min_separation", ok, format!("{} vs {} x {}", f(*first), factor, f(*last)));
    }
}

pub fn zeros(ctx: &Ctx) -> CliResult<Report> {
    let spec = ctx.spec()?;
    let gen = Generator::new(spec.clone())?;
    let zcfg = ctx.cfg().zeros.as_ref().ok_or_else(|| missing("zeros"))?;
    let c = ctx.coeffs(None)?;
    let interval = (zcfg.interval[0], zcfg.interval[1]);
    let real = zeros::real_zeros(&c, &gen, zcfg.j, interval, zcfg.max_mult, ctx.tol())?;
    let mut rep = Report::default();
    let comments = ctx.comments("zeros");
    let mut w = ctx.create("zeros_real.csv", &mut rep)?;
    io::write_multiset(&mut w, &real, &comments)?;
    rep.line("real_zeros", real.len());
    rep.line("total_multiplicity", real.total_mult());

    let analytic = matches!(spec, GeneratorSpec::Gaussian { .. } | GeneratorSpec::Sech { .. });
    if analytic && zcfg.j == 0 {
        let ext = ComplexExtension::new(c.clone(), spec.clone())?.with_exec(ctx.exec);
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for (lambda, m) in real.iter() {
            let r = zeros::zero_replication_check(&ext, lambda, m, zcfg.l_range, zcfg.zero_tol)?;
            worst = worst.max(r.max_residual());
            rows.extend(r.rows.iter().map(|row| {
                vec![f(lambda), m.to_string(), row.index.to_string(), f(lambda), f(row.shift), f(row.residual)]
            }));
        }
        let mut cm = comments.clone();
        cm.push(format!("spacing={}", f(std::f64::consts::PI / ext.rate())));
        let mut w = ctx.create("replication.csv", &mut rep)?;
        write_csv(&mut w, &cm, &["lambda", "mult", "index", "re", "im", "residual"], rows)?;
        rep.line("max_replication_residual", f(worst));
        if let Some(max) = ctx.cfg().check.max_residual {
            rep.check("max_residual", worst < max, format!("{} vs {}", f(worst), f(max)));
        }
        if let Some([x0, x1, y0, y1]) = zcfg.rect {
            let located = ext.locate_zeros(&Rect::new(x0, x1, y0, y1)?)?;
            let mut w = ctx.create("zeros_complex.csv", &mut rep)?;
            write_csv(
                &mut w,
                &cm,
                &["re", "im", "mult"],
                located.iter().map(|(z, m)| vec![f(z.re), f(z.im), m.to_string()]),
            )?;
            rep.line("complex_zeros", located.len());
        }
    } else {
        rep.line("replication", "skipped (needs a gaussian or sech generator and j = 0)");
    }
    Ok(rep)
}

pub fn jensen(ctx: &Ctx) -> CliResult<Report> {
    let spec = ctx.spec()?;
    let jcfg = ctx.cfg().jensen.as_ref().ok_or_else(|| missing("jensen"))?;
    if jcfg.radii.is_empty() {
        return Err(CliError::Config("[jensen] radii is empty".into()));
    }
    let ext = ComplexExtension::new(ctx.coeffs(None)?, spec)?.with_exec(ctx.exec);
    let reports = jcfg
        .radii
        .iter()
        .map(|&r| zeros::jensen_audit(&ext, r, jcfg.theta_grid, jcfg.r_grid))
        .collect::<siss::Result<Vec<_>>>()?;
    let mut rep = Report::default();
    let comments = ctx.comments("jensen");
    let mut w = ctx.create("jensen.csv", &mut rep)?;
    write_csv(
        &mut w,
        &comments,
        &["radius", "lhs", "rhs", "gap", "relative_gap", "zeros", "poles"],
        reports.iter().map(|z| {
            vec![
                f(z.radius),
                f(z.lhs),
                f(z.rhs),
                f(z.gap()),
                f(z.relative_gap()),
                z.zeros.iter().map(|p| p.1).sum::<usize>().to_string(),
                z.poles.len().to_string(),
            ]
        }),
    )?;
    let last = reports.last().expect("radii nonempty");
    let mut w = ctx.create("jensen_counts.csv", &mut rep)?;
    io::write_zero_report(&mut w, last, &comments)?;
    for line in io::zero_report_summary(last).lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            rep.line(k, v);
        }
    }
    if let Some(max) = ctx.cfg().check.max_relative_gap {
        let worst = reports.iter().map(|z| z.relative_gap()).fold(0.0, f64::max);
        rep.check("max_relative_gap", worst < max, format!("{} vs {}", f(worst), f(max)));
    }
    Ok(rep)
}

pub fn rolle(ctx: &Ctx) -> CliResult<Report> {
    let gen = ctx.generator()?;
    let rcfg = ctx.cfg().rolle.as_ref().ok_or_else(|| missing("rolle"))?;
    let c = ctx.coeffs(None)?;
    let interval = (rcfg.interval[0], rcfg.interval[1]);
    let r = zeros::rolle_transfer_sis(&c, &gen, rcfg.shift, interval, rcfg.max_mult, ctx.tol())?;
    let mut rep = Report::default();
    let mut w = ctx.create("rolle.csv", &mut rep)?;
    let rows = r
        .zeros_f
        .iter()
        .map(|(x, m)| vec!["f".to_string(), f(x), m.to_string()])
        .chain(r.zeros_g.iter().map(|(x, m)| vec!["g".to_string(), f(x), m.to_string()]));
    write_csv(&mut w, &ctx.comments("rolle"), &["function", "lambda", "mult"], rows)?;
    let (nf, ng) = (r.zeros_f.total_mult(), r.zeros_g.total_mult());
    rep.line("zeros_f", nf);
    rep.line("zeros_g", ng);
    rep.line("density_f", f(r.density_f));
    rep.line("density_g", f(r.density_g));
    rep.line("slack", f(r.slack));
    rep.line("holds", r.holds());
    let check = &ctx.cfg().check;
    if let Some(want) = check.zeros_f {
        rep.check("zeros_f", nf == want, format!("{nf} vs {want}"));
    }
    if let Some(want) = check.zeros_g {
        rep.check("zeros_g", ng == want, format!("{ng} vs {want}"));
    }
    if check.rolle_holds == Some(true) {
        rep.check("rolle_holds", r.holds(), format!("{} >= {} - {}", f(r.density_g), f(r.density_f), f(r.slack)));
    }
    Ok(rep)
}

pub fn gabor(ctx: &Ctx) -> CliResult<Report> {
    let gcfg = ctx.cfg().gabor.as_ref().ok_or_else(|| missing("gabor"))?;
    let wv = match gcfg.windows {
        WindowsCfg::Hermite => {
            WindowVector::hermite(gcfg.n.ok_or_else(|| CliError::Config("[gabor] hermite windows need `n`".into()))?)?
        }
        WindowsCfg::Ladder => WindowVector::derivative_ladder(
            gcfg.shifts.clone().ok_or_else(|| CliError::Config("[gabor] ladder windows need `shifts`".into()))?,
            ctx.spec()?,
        )?,
    };
    let family: Vec<(f64, usize)> = match &gcfg.counts {
        Some(counts) if counts.len() == gcfg.alphas.len() => gcfg.alphas.iter().copied().zip(counts.iter().copied()).collect(),
        Some(_) => return Err(CliError::Config("[gabor] `counts` and `alphas` differ in length".into())),
        None => gcfg
            .alphas
            .iter()
            .map(|&a| sampling::realize_lattice(a, gcfg.min_period))
            .collect::<siss::Result<Vec<_>>>()?,
    };
    let rows = gabor_sweep(&wv, &family, gcfg.b, gcfg.x_grid, ctx.tol(), ctx.exec)?;
    let mut rep = Report::default();
    let mut comments = ctx.comments("gabor");
    comments.push(format!("threshold={}", f(gcfg.b / wv.len() as f64)));
    let mut w = ctx.create("gabor.csv", &mut rep)?;
    io::write_gabor_sweep(&mut w, &rows, &comments)?;
    for r in &rows {
        rep.line(&format!("alpha {:.6}", r.alpha), format!("lower {} at x = {}", f(r.lower), f(r.x_min)));
    }
    let lowers: Vec<f64> = rows.iter().map(|r| r.lower).collect();
    separation_checks(ctx, &mut rep, &lowers);
    Ok(rep)
}
