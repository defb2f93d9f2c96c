//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siss::gabor::{gabor_sweep, WindowVector};
use siss::sampling::*;
use siss::sis::CoeffSeq;
use siss::zeros::*;
use siss::{Exec, Generator, GeneratorSpec, MultiSet};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Lower bounds fall monotonically along the sweep and the densest set beats
/// the sparsest by a factor of at least 100.
fn threshold_sweep(spec: GeneratorSpec, mult: usize, alphas: &[f64]) -> Outcome {
    let g = Generator::new(spec).map_err(err)?;
    let fam = SweepFamily::AlphaDilate { mult, min_period: 40 };
    let rows = sweep(&g, fam, alphas, 1e-14, Exec::default()).map_err(err)?;
    let monotone = rows.windows(2).all(|w| w[1].lower <= w[0].lower);
    let (hi, lo) = (rows.first().unwrap(), rows.last().unwrap());
    let separated = hi.lower > 0.0 && hi.lower >= 100.0 * lo.lower;
    let lowers: Vec<String> = rows.iter().map(|r| format!("D={:.3}:A={:.3e}", r.density, r.lower)).collect();
    check(monotone && separated, format!("{} monotone={monotone}", lowers.join(" ")))
}

fn gaussian_threshold() -> Outcome {
    threshold_sweep(GeneratorSpec::Gaussian { a: PI }, 1, &[0.8, 0.9, 1.1, 1.25])
}

fn derivative_threshold() -> Outcome {
    threshold_sweep(GeneratorSpec::Gaussian { a: PI }, 2, &[1.6, 1.8, 2.2, 2.5])
}

fn sech_threshold() -> Outcome {
    threshold_sweep(GeneratorSpec::Sech { a: 1.0 }, 1, &[0.8, 0.9, 1.1, 1.25])
}

fn replication_family(spec: GeneratorSpec, tol: f64) -> Result<(usize, f64), String> {
    let gen = Generator::new(spec.clone()).map_err(err)?;
    let (mut count, mut worst) = (0usize, 0.0f64);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cs = CoeffSeq::finite_real(0, &c).map_err(err)?;
        let zs = real_zeros(&cs, &gen, 0, (-0.5, 7.5), 4, 1e-15).map_err(err)?;
        let ext = ComplexExtension::new(cs, spec.clone()).map_err(err)?;
        for (lambda, m) in zs.iter() {
            let rep = zero_replication_check(&ext, lambda, m, 3, tol).map_err(|e| format!("seed {seed}: {e}"))?;
            worst = worst.max(rep.max_residual());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn zero_replication() -> Outcome {
    let (ng, rg) = replication_family(GeneratorSpec::Gaussian { a: PI }, 1e-8)?;
    let (ns, rs) = replication_family(GeneratorSpec::Sech { a: 1.0 }, 1e-10)?;
    check(
        ng > 0 && ns > 0 && rg < 1e-8 && rs < 1e-10,
        format!("gaussian {ng} zeros max residual {rg:.2e}; sech {ns} zeros max residual {rs:.2e}"),
    )
}

fn jensen_suite() -> Outcome {
    let cases = [
        ("gaussian impulse R=1", CoeffSeq::impulse(0), GeneratorSpec::Gaussian { a: PI }, 1.0),
        (
            "two-term gaussian R=2",
            CoeffSeq::finite_real(0, &[1.0, -1.0]).map_err(err)?,
            GeneratorSpec::Gaussian { a: PI },
            2.0,
        ),
        ("sech impulse R=1", CoeffSeq::impulse(0), GeneratorSpec::Sech { a: 1.0 }, 1.0),
        ("sech impulse R=2", CoeffSeq::impulse(0), GeneratorSpec::Sech { a: 1.0 }, 2.0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c, spec, r) in cases {
        let ext = ComplexExtension::new(c, spec).map_err(err)?;
        let rep = jensen_audit(&ext, r, 4096, 64).map_err(err)?;
        ok &= rep.relative_gap() < 0.02;
        parts.push(format!(
            "{name}: lhs={:.6} rhs={:.6} poles={} gap={:.2e}",
            rep.lhs,
            rep.rhs,
            rep.poles.len(),
            rep.relative_gap()
        ));
    }
    check(ok, parts.join("; "))
}

fn rolle_periodized() -> Outcome {
    let gen = Generator::new(GeneratorSpec::Gaussian { a: PI }).map_err(err)?;
    let c = CoeffSeq::periodic_real(&[1.0]).map_err(err)?;
    let rep = rolle_transfer_sis(&c, &gen, 0.0, (0.0, 10.0), 3, 1e-15).map_err(err)?;
    let nf = rep.zeros_f.total_mult();
    let ng = rep.zeros_g.total_mult();
    let on_half = rep.zeros_g.points().iter().map(|x| (2.0 * x - (2.0 * x).round()).abs() / 2.0).fold(0.0, f64::max);
    let shifted = rolle_transfer_sis(&CoeffSeq::periodic_real(&[1.0, -1.0]).map_err(err)?, &gen, 50.0, (0.0, 10.0), 3, 1e-15)
        .map_err(err)?;
    check(
        nf == 0 && ng == 20 && on_half < 1e-9 && rep.holds() && shifted.holds(),
        format!("f zeros {nf}, f' zeros {ng}, max distance to Z/2 {on_half:.1e}, shifted transfer holds={}", shifted.holds()),
    )
}

fn circulant_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for spec in [GeneratorSpec::Gaussian { a: PI }, GeneratorSpec::Sech { a: 1.0 }] {
        let g = Generator::new(spec).map_err(err)?;
        for l in [8usize, 16, 32] {
            for m in [1usize, 2] {
                let op = assemble(&MultiSet::lattice(1.0, l, m).map_err(err)?, &g, 1e-15).map_err(err)?;
                let svd = frame_bounds(&op).map_err(err)?;
                let dft = lattice_frame_bounds(&g, l, m, 1e-15).map_err(err)?;
                worst = worst.max((svd.lower - dft.lower).abs() / dft.lower);
                worst = worst.max((svd.upper - dft.upper).abs() / dft.upper);
            }
        }
    }
    check(worst < 1e-9, format!("max relative difference {worst:.2e}"))
}

fn reconstruction() -> Outcome {
    let g = Generator::new(GeneratorSpec::Gaussian { a: PI }).map_err(err)?;
    let (alpha, n) = realize_lattice(2.0 / 1.2, 40).map_err(err)?;
    let op = assemble(&MultiSet::lattice(alpha, n, 2).map_err(err)?, &g, 1e-15).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let c: Vec<f64> = (0..op.cols.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = op.apply(&c);
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rel = |d: &[f64]| c.iter().zip(d).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / norm;
    let ls = rel(&reconstruct(&y, &op, Method::LeastSquares).map_err(err)?.real_values());
    let mut errors = Vec::new();
    let rep = frame_iterate(&y, &op, None, 1e-14, 10_000, |_, ck| errors.push(rel(ck))).map_err(err)?;
    let rho = rep.predicted_rate();
    let worst_step = errors
        .windows(2)
        .filter(|w| w[0] > 1e-12)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    check(
        ls < 1e-8 && worst_step <= rho + 0.01,
        format!("least squares error {ls:.2e}; worst step ratio {worst_step:.4} vs rate {rho:.4}; {} iterations", rep.iterations),
    )
}

fn gabor_hermite() -> Outcome {
    let wv = WindowVector::hermite(2).map_err(err)?;
    let rows = gabor_sweep(&wv, &[(1.6, 25), (2.4, 20)], 1.0, 32, 1e-14, Exec::default()).map_err(err)?;
    let (dense, sparse) = (&rows[0], &rows[1]);
    check(
        dense.lower > 0.0 && dense.lower >= 100.0 * sparse.lower,
        format!("alpha 1.6: min_x A={:.3e}; alpha 2.4: min_x A={:.3e}", dense.lower, sparse.lower),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("gaussian threshold m=1", gaussian_threshold, Some(Duration::from_secs(60))),
        ("derivative threshold m=2", derivative_threshold, Some(Duration::from_secs(60))),
        ("sech threshold m=1", sech_threshold, Some(Duration::from_secs(60))),
        ("zero replication", zero_replication, None),
        ("jensen audit", jensen_suite, Some(Duration::from_secs(120))),
        ("rolle transference", rolle_periodized, None),
        ("circulant oracle", circulant_oracle, None),
        ("reconstruction", reconstruction, None),
        ("gabor hermite threshold", gabor_hermite, Some(Duration::from_secs(300))),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > b);
        let (pass, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!("{} {name} [{:.2}s] {detail}", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
