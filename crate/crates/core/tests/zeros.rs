use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siss::sis::{synthesize, CoeffSeq};
use siss::zeros::*;
use siss::{Generator, GeneratorSpec};
use std::f64::consts::PI;

fn gauss() -> GeneratorSpec {
    GeneratorSpec::Gaussian { a: PI }
}

#[test]
fn gaussian_impulse_jensen_is_zero_equals_zero() {
    let ext = ComplexExtension::new(CoeffSeq::impulse(0), gauss()).unwrap();
    for r in [0.5, 1.0, 2.0] {
        let rep = jensen_audit(&ext, r, 1024, 16).unwrap();
        assert!(rep.zeros.is_empty());
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.rhs.abs() < 1e-12, "rhs = {}", rep.rhs);
    }
}

#[test]
fn two_term_gaussian_jensen() {
    let ext = ComplexExtension::new(CoeffSeq::finite_real(0, &[1.0, -1.0]).unwrap(), gauss()).unwrap();
    let rep = jensen_audit(&ext, 2.0, 4096, 64).unwrap();
    // zeros 1/2 + i n: n = 0, +-1 inside |z| <= 2
    let expected = (2.0f64 / 0.5).ln() + 2.0 * (2.0 / 1.25f64.sqrt()).ln();
    assert!((rep.lhs - expected).abs() < 1e-9);
    assert!(rep.relative_gap() < 0.02, "lhs {} rhs {}", rep.lhs, rep.rhs);
    assert_eq!(*rep.n_z.last().unwrap(), 3);
    assert_eq!(rep.real_zeros.len(), 1);
    // n(r) nondecreasing for an entire function
    assert!(rep.n().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sech_impulse_jensen_without_and_with_poles() {
    let ext = ComplexExtension::new(CoeffSeq::impulse(0), GeneratorSpec::Sech { a: 1.0 }).unwrap();
    // the poles +-i pi/2 lie outside the unit disk
    let r1 = jensen_audit(&ext, 1.0, 2048, 16).unwrap();
    assert!(r1.poles.is_empty());
    assert!(r1.relative_gap() < 0.02);
    let r2 = jensen_audit(&ext, 2.0, 4096, 64).unwrap();
    assert_eq!(r2.poles.len(), 2);
    let expected = -2.0 * (2.0 / (PI / 2.0)).ln();
    assert!((r2.lhs - expected).abs() < 1e-12);
    assert!(r2.relative_gap() < 0.02, "lhs {} rhs {}", r2.lhs, r2.rhs);
    assert_eq!(*r2.n().last().unwrap(), -2);
}

#[test]
fn jensen_with_zero_at_origin() {
    // g(x - 1) - g(x + 1) vanishes on (i/2) Z, including the origin
    let c = CoeffSeq::finite_real(-1, &[-1.0, 0.0, 1.0]).unwrap();
    let ext = ComplexExtension::new(c, gauss()).unwrap();
    let rep = jensen_audit(&ext, 1.3, 4096, 16).unwrap();
    assert_eq!(rep.order_at_origin, 1);
    assert!(rep.relative_gap() < 0.02, "lhs {} rhs {}", rep.lhs, rep.rhs);
}

#[test]
fn replication_for_two_term_gaussian_and_sech() {
    let ext = ComplexExtension::new(CoeffSeq::finite_real(0, &[1.0, -1.0]).unwrap(), gauss()).unwrap();
    let rep = zero_replication_check(&ext, 0.5, 1, 3, 1e-8).unwrap();
    assert_eq!(rep.rows.len(), 7);
    assert!(rep.max_residual() < 1e-8);
    let ext = ComplexExtension::new(CoeffSeq::finite_real(0, &[1.0, -1.0]).unwrap(), GeneratorSpec::Sech { a: 1.0 })
        .unwrap();
    let v = ext.extend_eval(Complex64::new(0.5, PI), 0, 1e-14).unwrap();
    assert!(v.norm() < 1e-10);
    assert!(zero_replication_check(&ext, 0.5, 1, 3, 1e-10).unwrap().max_residual() < 1e-10);
    assert!(matches!(zero_replication_check(&ext, 0.3, 1, 3, 1e-10), Err(siss::Error::NotAZero(_))));
}

#[test]
fn random_gaussian_zeros_replicate() {
    let gen = Generator::new(gauss()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cs = CoeffSeq::finite_real(0, &c).unwrap();
    let zs = real_zeros(&cs, &gen, 0, (-0.5, 7.5), 4, 1e-15).unwrap();
    assert!(!zs.is_empty());
    let ext = ComplexExtension::new(cs, gauss()).unwrap();
    for (lambda, m) in zs.iter() {
        let rep = zero_replication_check(&ext, lambda, m, 2, 1e-8).unwrap();
        assert!(rep.max_residual() < 1e-8);
    }
}

#[test]
fn extension_matches_real_synthesis() {
    let c = CoeffSeq::finite_real(-2, &[0.3, -1.0, 0.7, 0.2]).unwrap();
    for spec in [gauss(), GeneratorSpec::Sech { a: 1.0 }] {
        let gen = Generator::new(spec.clone()).unwrap();
        let ext = ComplexExtension::new(c.clone(), spec).unwrap();
        for x in [-3.1, -0.4, 0.0, 0.77, 2.5] {
            for j in 0..3 {
                let a = ext.extend_eval(Complex64::new(x, 0.0), j, 1e-14).unwrap();
                let b = synthesize(&c, &gen, x, j, 1e-14).unwrap();
                assert!((a - b).norm() < 1e-10, "x={x} j={j}");
            }
        }
    }
}

#[test]
fn periodic_extension_matches_synthesis() {
    let c = CoeffSeq::periodic_real(&[1.0, -0.5, 0.25]).unwrap();
    let gen = Generator::new(GeneratorSpec::Sech { a: 1.0 }).unwrap();
    let ext = ComplexExtension::new(c.clone(), GeneratorSpec::Sech { a: 1.0 }).unwrap();
    for x in [0.1, 1.3, 5.9] {
        let a = ext.extend_eval(Complex64::new(x, 0.0), 0, 1e-14).unwrap();
        let b = synthesize(&c, &gen, x, 0, 1e-14).unwrap();
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn sech_near_pole_respects_growth_bound() {
    let ext = ComplexExtension::new(CoeffSeq::impulse(0), GeneratorSpec::Sech { a: 1.0 }).unwrap();
    let z = Complex64::new(0.3, PI / 2.0 * 0.99);
    let v = ext.extend_eval(z, 0, 1e-14).unwrap().norm();
    assert!(v > 2.5);
    assert!(v <= sech_growth_bound(1.0, 1.0, z));
}

#[test]
fn growth_bounds_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cs = CoeffSeq::finite_real(0, &c).unwrap();
    let cmax = cs.sup_norm();
    let ge = ComplexExtension::new(cs.clone(), gauss()).unwrap();
    let cg = gaussian_growth_constant(PI);
    let se = ComplexExtension::new(cs, GeneratorSpec::Sech { a: 1.0 }).unwrap();
    let mut checked = 0;
    while checked < 200 {
        let z = Complex64::new(rng.random_range(-3.0..10.0), rng.random_range(-3.0..3.0));
        let g = ge.extend_eval(z, 0, 1e-14).unwrap().norm();
        assert!(g <= cg * cmax * (PI * z.im * z.im).exp() * (1.0 + 1e-12));
        let pole_dist = {
            let k = z.re.round();
            let t = (z.im / PI - 0.5).round();
            (z - Complex64::new(k, PI * (t + 0.5))).norm()
        };
        if pole_dist < 0.05 {
            continue;
        }
        let s = se.extend_eval(z, 0, 1e-14).unwrap().norm();
        assert!(s <= sech_growth_bound(1.0, cmax, z), "z = {z}");
        checked += 1;
    }
}

#[test]
fn box_counts_are_additive() {
    let ext = ComplexExtension::new(CoeffSeq::finite_real(0, &[1.0, -1.0, 0.5]).unwrap(), gauss()).unwrap();
    let r = Rect::new(-1.07, 3.03, -2.11, 2.13).unwrap();
    let whole = ext.count_zeros_box(&r).unwrap();
    let parts: i64 = r.quarters(0.5).iter().map(|q| ext.count_zeros_box(q).unwrap()).sum();
    assert_eq!(whole, parts);
    assert!(whole > 0);
    let imp = ComplexExtension::new(CoeffSeq::impulse(0), gauss()).unwrap();
    assert_eq!(imp.count_zeros_box(&r).unwrap(), 0);
}

#[test]
fn sech_box_count_subtracts_poles() {
    let ext = ComplexExtension::new(CoeffSeq::impulse(0), GeneratorSpec::Sech { a: 1.0 }).unwrap();
    let r = Rect::new(-0.5, 0.5, 0.1, 2.0).unwrap();
    assert_eq!(ext.count_zeros_box(&r).unwrap(), -1);
    assert_eq!(ext.zero_count(&r).unwrap(), 0);
}

#[test]
fn periodized_gaussian_and_its_derivative() {
    let gen = Generator::new(gauss()).unwrap();
    let c = CoeffSeq::periodic_real(&[1.0]).unwrap();
    assert!(real_zeros(&c, &gen, 0, (0.0, 10.0), 3, 1e-15).unwrap().is_empty());
    let zs = real_zeros(&c, &gen, 1, (0.0, 10.0), 3, 1e-15).unwrap();
    assert_eq!(zs.len(), 20);
    for (i, (x, m)) in zs.iter().enumerate() {
        assert!((x - 0.5 * i as f64).abs() < 1e-9);
        assert_eq!(m, 1);
    }
}

#[test]
fn symmetric_three_term_has_two_simple_zeros() {
    // f = g(x) - 2 g(x-1) + g(x-2) is negative at 1, so the zeros near 1 are
    // a simple pair placed symmetrically about it
    let gen = Generator::new(gauss()).unwrap();
    let c = CoeffSeq::finite_real(0, &[1.0, -2.0, 1.0]).unwrap();
    assert!(synthesize(&c, &gen, 1.0, 0, 1e-15).unwrap().re < 0.0);
    let zs = real_zeros(&c, &gen, 0, (-1.0, 3.0), 4, 1e-15).unwrap();
    assert_eq!(zs.len(), 2);
    assert_eq!(zs.mults(), &[1, 1]);
    assert!((zs.points()[0] + zs.points()[1] - 2.0).abs() < 1e-9);
}

#[test]
fn constructed_double_zero_is_classified() {
    // With period 2 the element c_0 = P(1), c_1 = -P(0), where P is the
    // 2-periodised Gaussian, vanishes to second order at the even integers.
    let gen = Generator::new(gauss()).unwrap();
    let p = |x: f64| (-20..=20).map(|m| (-PI * (x - 2.0 * m as f64).powi(2)).exp()).sum::<f64>();
    let c = CoeffSeq::periodic_real(&[p(1.0), -p(0.0)]).unwrap();
    let zs = real_zeros(&c, &gen, 0, (-0.5, 3.5), 4, 1e-15).unwrap();
    assert_eq!(zs.points().len(), 2);
    for (x, m) in zs.iter() {
        assert!((x - 2.0 * (x / 2.0).round()).abs() < 1e-6);
        assert_eq!(m, 2);
    }
    let ext = ComplexExtension::new(c, gauss()).unwrap();
    let rep = zero_replication_check(&ext, 0.0, 2, 3, 1e-8).unwrap();
    assert!(rep.max_residual() < 1e-8);
}

#[test]
fn rolle_on_periodized_gaussian() {
    let gen = Generator::new(gauss()).unwrap();
    let c = CoeffSeq::periodic_real(&[1.0]).unwrap();
    let rep = rolle_transfer_sis(&c, &gen, 0.0, (0.0, 10.0), 3, 1e-15).unwrap();
    assert_eq!(rep.density_f, 0.0);
    assert_eq!(rep.density_g, 2.0);
    assert!(rep.holds());
}

#[test]
fn rolle_two_term_and_large_shift() {
    let gen = Generator::new(gauss()).unwrap();
    let c = CoeffSeq::finite_real(0, &[1.0, -1.0]).unwrap();
    let rep = rolle_transfer_sis(&c, &gen, 1.0, (0.0, 20.0), 3, 1e-15).unwrap();
    assert!(rep.holds());
    // alternating periodic element: zeros at 1/2 + Z, and 50 f + f' keeps one per cell
    let c = CoeffSeq::periodic_real(&[1.0, -1.0]).unwrap();
    let rep = rolle_transfer_sis(&c, &gen, 50.0, (0.0, 10.0), 3, 1e-15).unwrap();
    assert_eq!(rep.zeros_f.len(), 10);
    assert_eq!(rep.zeros_f.total_mult(), rep.zeros_g.total_mult());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn gaussian_replication_holds_at_every_lattice_shift(x in -2.0f64..2.0, t in -3i64..=3) {
        // f(x + i t) e^{-pi t^2} has modulus |f(x)| for a = pi
        let ext = ComplexExtension::new(CoeffSeq::finite_real(-1, &[0.4, -1.0, 0.3]).unwrap(), gauss()).unwrap();
        let on = ext.extend_eval(Complex64::new(x, 0.0), 0, 1e-15).unwrap().norm();
        let off = ext.extend_eval_scaled(Complex64::new(x, t as f64), 0, 1e-15).unwrap().norm();
        prop_assert!((on - off).abs() < 1e-12);
    }
}
