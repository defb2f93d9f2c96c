use proptest::prelude::*;
use siss::generators::{Generator, GeneratorSpec, MAX_DERIVATIVE_ORDER};
use siss::{quad, Error};
use std::f64::consts::PI;

fn all_specs() -> Vec<GeneratorSpec> {
    vec![
        GeneratorSpec::Gaussian { a: PI },
        GeneratorSpec::Gaussian { a: 0.7 },
        GeneratorSpec::GaussianType { c: 1.0, deltas: vec![1.0, -2.0] },
        GeneratorSpec::GaussianType { c: 0.5, deltas: vec![0.3] },
        GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.5, 0.5] },
        GeneratorSpec::Sech { a: 1.0 },
        GeneratorSpec::Sech { a: 2.5 },
        GeneratorSpec::Hermite { k: 0 },
        GeneratorSpec::Hermite { k: 3 },
        GeneratorSpec::Sinc,
    ]
}

/// Ridders' extrapolated central difference.
fn ridders<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> f64 {
    const N: usize = 10;
    let mut a = [[0.0f64; N]; N];
    let mut h = h0;
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        h /= 1.4;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = 1.4f64 * 1.4;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= 1.96;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

#[test]
fn derivatives_match_numerical_differentiation() {
    for spec in all_specs() {
        let g = Generator::new(spec.clone()).unwrap();
        for j in 0..4 {
            for x in [-5.0, -1.3, -0.2, 0.0, 0.35, 1.0, 2.7, 5.0] {
                let exact = g.eval(x, j + 1, 1e-14).unwrap();
                let num = ridders(|t| g.eval(t, j, 1e-14).unwrap(), x, 0.02);
                let scale = (0..=j + 1).map(|i| g.eval(0.0, i, 1e-14).unwrap().abs()).fold(1.0, f64::max);
                assert!((exact - num).abs() < 1e-7 * scale, "{spec} j={j} x={x}: {exact} vs {num}");
            }
        }
    }
}

#[test]
fn fourier_transforms_match_quadrature() {
    for spec in all_specs() {
        if spec == GeneratorSpec::Sinc {
            continue;
        }
        let g = Generator::new(spec.clone()).unwrap();
        let r = g.tail_radius(0, 1e-15).unwrap() + 2.0;
        for xi in [0.0, 0.3, 1.1] {
            let re = quad::integrate(|x| g.eval(x, 0, 1e-14).unwrap() * (2.0 * PI * x * xi).cos(), -r, r, 1e-13).unwrap();
            let im = quad::integrate(|x| -g.eval(x, 0, 1e-14).unwrap() * (2.0 * PI * x * xi).sin(), -r, r, 1e-13).unwrap();
            let f = g.fourier(xi);
            assert!((f.re - re).abs() < 1e-9 && (f.im - im).abs() < 1e-9, "{spec} xi={xi}: {f} vs {re}+{im}i");
        }
    }
}

#[test]
fn sinc_transform_is_half_open_indicator() {
    let g = Generator::new(GeneratorSpec::Sinc).unwrap();
    assert_eq!(g.fourier(-0.5).re, 1.0);
    assert_eq!(g.fourier(0.5).re, 0.0);
    assert_eq!(g.fourier(0.2).re, 1.0);
    assert_eq!(g.eval(0.0, 0, 1e-14).unwrap(), 1.0);
    assert!(g.eval(3.0, 0, 1e-14).unwrap().abs() < 1e-16);
}

#[test]
fn parity() {
    for (spec, parity) in [
        (GeneratorSpec::Gaussian { a: PI }, 1.0),
        (GeneratorSpec::Sech { a: 1.0 }, 1.0),
        (GeneratorSpec::Hermite { k: 1 }, -1.0),
        (GeneratorSpec::Hermite { k: 2 }, 1.0),
        (GeneratorSpec::Sinc, 1.0),
    ] {
        let g = Generator::new(spec.clone()).unwrap();
        for x in [0.1, 0.9, 2.3] {
            for j in 0..3 {
                let s = if j % 2 == 0 { parity } else { -parity };
                let (a, b) = (g.eval(x, j, 1e-14).unwrap(), g.eval(-x, j, 1e-14).unwrap());
                assert!((a - s * b).abs() < 1e-12 * a.abs().max(1.0), "{spec} j={j}");
            }
        }
    }
}

#[test]
fn gaussian_type_is_positive_and_mirrors() {
    let g = Generator::new(GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.5, -1.5, 2.0] }).unwrap();
    for i in -80..=80 {
        assert!(g.eval(i as f64 * 0.1, 0, 1e-14).unwrap() > 0.0);
    }
    let p = Generator::new(GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.7] }).unwrap();
    let m = Generator::new(GeneratorSpec::GaussianType { c: 1.0, deltas: vec![-0.7] }).unwrap();
    for x in [-1.0, 0.2, 1.4] {
        assert!((p.eval(x, 0, 1e-14).unwrap() - m.eval(-x, 0, 1e-14).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn repeated_deltas_are_continuous_in_delta() {
    let rep = Generator::new(GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.5, 0.5] }).unwrap();
    let near = Generator::new(GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.5, 0.5 + 1e-5] }).unwrap();
    assert!(rep.spec().has_repeated_deltas());
    assert!(!near.spec().has_repeated_deltas());
    for x in [-1.0, 0.0, 0.6, 2.0] {
        let (a, b) = (rep.eval(x, 0, 1e-12).unwrap(), near.eval(x, 0, 1e-12).unwrap());
        assert!((a - b).abs() < 1e-4, "x={x}: {a} vs {b}");
    }
}

#[test]
fn amalgam_norms_match_closed_forms() {
    for a in [0.5, 1.0, 3.0] {
        let g = Generator::new(GeneratorSpec::Sech { a }).unwrap();
        let exact = 2.0 * (0..200).map(|n| 1.0 / (a * n as f64).cosh()).sum::<f64>();
        assert!((g.amalgam_norm(0, 1e-12).unwrap() - exact).abs() < 1e-9 * exact);
        let g = Generator::new(GeneratorSpec::Gaussian { a }).unwrap();
        let exact = 2.0 * (0..200).map(|n| (-a * (n * n) as f64).exp()).sum::<f64>();
        assert!((g.amalgam_norm(0, 1e-12).unwrap() - exact).abs() < 1e-9 * exact);
    }
    let s = Generator::new(GeneratorSpec::Sinc).unwrap();
    assert!(matches!(s.amalgam_norm(0, 1e-12), Err(Error::ToleranceUnachievable(_))));
}

#[test]
fn invalid_specs_and_orders() {
    for bad in [
        GeneratorSpec::Gaussian { a: 0.0 },
        GeneratorSpec::Sech { a: -1.0 },
        GeneratorSpec::GaussianType { c: 1.0, deltas: vec![0.0] },
        GeneratorSpec::GaussianType { c: -1.0, deltas: vec![] },
    ] {
        assert!(matches!(Generator::new(bad), Err(Error::InvalidSpec(_))));
    }
    let g = Generator::new(GeneratorSpec::Gaussian { a: 1.0 }).unwrap();
    assert!(matches!(
        g.eval(0.0, MAX_DERIVATIVE_ORDER + 1, 1e-12),
        Err(Error::DerivativeOrder { .. })
    ));
}

#[test]
fn spec_records_round_trip() {
    for spec in all_specs() {
        let text = spec.to_string();
        assert_eq!(text.parse::<GeneratorSpec>().unwrap(), spec, "{text}");
    }
    assert!("kind=cauchy a=1".parse::<GeneratorSpec>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_identity(b in 0.3f64..3.0, x in -4.0f64..4.0, which in 0usize..3) {
        let spec = [
            GeneratorSpec::Gaussian { a: 1.3 },
            GeneratorSpec::Sech { a: 0.8 },
            GeneratorSpec::GaussianType { c: 0.9, deltas: vec![0.4, -1.1] },
        ][which].clone();
        let (d, amp) = spec.dilate(b).unwrap();
        let g = Generator::new(spec).unwrap();
        let h = Generator::new(d).unwrap();
        let lhs = g.eval(x / b, 0, 1e-14).unwrap();
        let rhs = amp * h.eval(x, 0, 1e-14).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1e-3));
    }

    #[test]
    fn fourier_magnitude_bounded_by_l1(xi in -3.0f64..3.0) {
        // |g^(xi)| <= g^(0) for positive g
        for spec in [GeneratorSpec::Gaussian { a: 2.0 }, GeneratorSpec::Sech { a: 1.0 }, GeneratorSpec::GaussianType { c: 1.0, deltas: vec![1.0] }] {
            let g = Generator::new(spec).unwrap();
            prop_assert!(g.fourier(xi).norm() <= g.fourier(0.0).norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tail_radius_bounds_the_tail(eps_exp in 3i32..15, which in 0usize..3) {
        let spec = [GeneratorSpec::Gaussian { a: 0.9 }, GeneratorSpec::Sech { a: 1.2 }, GeneratorSpec::Hermite { k: 2 }][which].clone();
        let g = Generator::new(spec).unwrap();
        let eps = 10f64.powi(-eps_exp);
        let r = g.tail_radius(0, eps).unwrap();
        let tail: f64 = (r as i64..r as i64 + 400).map(|k| g.cell_max(k as f64, k as f64 + 1.0, 0)).sum::<f64>() * 2.0;
        prop_assert!(tail <= eps * 1.01);
    }
}
