use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;

fn heat() -> ProblemSpec {
    ProblemSpec::new(1.0, 2.0, 0.0)
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn hat_at_origin_is_free_kernel() {
    let spec = ProblemSpec::new(0.6, 1.3, 0.2);
    let t = 2.5f64;
    let v = green_hat(GreenKind::G, 0.0, t, &spec).unwrap();
    assert!((v.re - t.powf(-0.4) * rgamma(0.6)).abs() < 1e-14);
}

#[test]
fn hat_heat_example() {
    let v = green_hat(GreenKind::G, 1.0, 1.0, &heat()).unwrap();
    assert!((v.re - (-1.0f64).exp()).abs() < 1e-14);
}

#[test]
fn hat_two_exponent_exponential() {
    let spec = ProblemSpec::new(1.0, 1.5, 0.0).with_source(0.7, 0.0, Complex64::new(1.0, 0.0), SourceMode::RieszFeller);
    for k in [-3.0, -0.2, 0.0, 0.5, 4.0] {
        for t in [0.3, 1.0, 2.0] {
            let v = green_hat(GreenKind::G3, k, t, &spec).unwrap();
            let k: f64 = k;
            let want = (-t * (k.abs().powf(1.5) + k.abs().powf(0.7))).exp();
            assert!((v - want).norm() < 1e-12, "k={k} t={t}");
        }
    }
}

#[test]
fn second_condition_kernels_need_wave_regime() {
    let spec = ProblemSpec::new(0.8, 1.5, 0.0);
    assert!(matches!(
        green_hat(GreenKind::G2, 1.0, 1.0, &spec),
        Err(Error::Regime(_))
    ));
    assert!(matches!(
        green_hat(GreenKind::G4, 1.0, 1.0, &spec),
        Err(Error::Regime(_))
    ));
    assert!(green_hat(GreenKind::G2, 1.0, 1.0, &ProblemSpec::new(1.5, 1.5, 0.0)).is_ok());
}

#[test]
fn source_multiplier_modes() {
    let spec = ProblemSpec::new(1.0, 2.0, 0.0);
    let riesz = spec.with_source(1.5, 0.5, Complex64::new(2.0, 0.0), SourceMode::RieszFeller);
    let v = green_hat(GreenKind::G1, 1.0, 1.0, &riesz).unwrap();
    let want = Complex64::from_polar((-1.0f64).exp(), PI / 4.0);
    assert!((v - want).norm() < 1e-14);
    let ident = spec.with_source(1.5, 0.5, Complex64::new(2.0, 0.0), SourceMode::Identity);
    let v = green_hat(GreenKind::G1, 1.0, 1.0, &ident).unwrap();
    assert!((v.re - (-1.0f64).exp()).abs() < 1e-14);
}

#[test]
fn masses() {
    assert!((green_mass(GreenKind::G, 7.0, &heat()).unwrap().re - 1.0).abs() < 1e-15);
    let half = ProblemSpec::new(0.5, 1.2, 0.0);
    assert!((green_mass(GreenKind::G, 1.0, &half).unwrap().re - 1.0 / PI.sqrt()).abs() < 1e-14);
    let two = ProblemSpec::new(2.0, 2.0, 0.0);
    assert!((green_mass(GreenKind::G2, 1.0, &two).unwrap().re - 1.0).abs() < 1e-15);
}

#[test]
fn heat_kernel_by_quadrature() {
    let v0 = green_point(GreenKind::G, 0.0, 1.0, &heat(), &cfg()).unwrap();
    assert!((v0.re - 0.5 / PI.sqrt()).abs() < 1e-10, "{v0}");
    let v1 = green_point(GreenKind::G, 1.0, 1.0, &heat(), &cfg()).unwrap();
    assert!((v1.re - (-0.25f64).exp() / (2.0 * PI.sqrt())).abs() < 1e-10, "{v1}");
    assert!(v1.im.abs() < 1e-12);
}

#[test]
fn heat_kernel_closed_form() {
    let v = green_point_closed(GreenKind::G, 1.0, 1.0, &heat(), &cfg()).unwrap();
    assert!((v - 0.219_695_644_733_861).abs() < 1e-10);
    assert!(matches!(
        green_point_closed(GreenKind::G, 0.0, 1.0, &heat(), &cfg()),
        Err(Error::Domain(_))
    ));
    let complex = heat().with_lambda(Complex64::new(1.0, 0.5));
    assert!(green_point_closed(GreenKind::G, 1.0, 1.0, &complex, &cfg()).is_err());
    assert!(green_point_closed(GreenKind::G1, 1.0, 1.0, &heat(), &cfg()).is_err());
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn closed_form_matches_quadrature_examples() {
    let cases = [
        (ProblemSpec::new(0.8, 1.6, 0.2), 1.0, 1.0),
        (ProblemSpec::new(0.5, 1.5, 0.0), 1.0, 1.0),
        (
            ProblemSpec::new(0.9, 1.8, -0.1).with_lambda(Complex64::new(2.0, 0.0)),
            0.5,
            2.0,
        ),
        (
            ProblemSpec::new(0.9, 1.8, -0.1).with_lambda(Complex64::new(2.0, 0.0)),
            -0.5,
            2.0,
        ),
        (ProblemSpec::new(0.7, 0.8, 0.5), -1.3, 0.7),
    ];
    for (spec, x, t) in cases {
        let q = green_point(GreenKind::G, x, t, &spec, &cfg()).unwrap();
        let c = green_point_closed(GreenKind::G, x, t, &spec, &cfg()).unwrap();
        assert!(rel(c, q.re) < 1e-7, "{spec:?} x={x}: closed {c} vs quadrature {q}");
    }
}

#[test]
fn g2_closed_form_matches_quadrature() {
    let spec = ProblemSpec::new(1.5, 1.8, 0.1);
    for x in [-2.0, 0.4, 1.7] {
        let q = green_point(GreenKind::G2, x, 1.0, &spec, &cfg()).unwrap();
        let c = green_point_closed(GreenKind::G2, x, 1.0, &spec, &cfg()).unwrap();
        assert!(rel(c, q.re) < 1e-7, "x={x}: {c} vs {q}");
    }
}

#[test]
fn realness_and_evenness() {
    let spec = ProblemSpec::new(0.7, 1.4, 0.0);
    for x in [0.3, 1.1, 3.0] {
        let a = green_point(GreenKind::G, x, 1.0, &spec, &cfg()).unwrap();
        let b = green_point(GreenKind::G, -x, 1.0, &spec, &cfg()).unwrap();
        assert!(a.im.abs() <= 1e-9 * a.re.abs());
        assert!((a.re - b.re).abs() <= 1e-10 * a.re.abs().max(1e-3));
    }
}

#[test]
fn imaginary_lambda_is_fourier_only() {
    let spec = heat().with_lambda(Complex64::new(0.0, 0.5));
    assert!(matches!(
        green_point(GreenKind::G, 1.0, 1.0, &spec, &cfg()),
        Err(Error::FourierOnly(_))
    ));
    let wave = ProblemSpec::new(2.0, 2.0, 0.0);
    assert!(matches!(
        green_point(GreenKind::G, 1.0, 1.0, &wave, &cfg()),
        Err(Error::FourierOnly(_))
    ));
}

#[test]
fn unbounded_at_origin_for_small_beta() {
    let spec = ProblemSpec::new(0.6, 0.4, 0.0);
    assert!(matches!(
        green_point(GreenKind::G, 0.0, 1.0, &spec, &cfg()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn semigroup_at_unit_alpha() {
    // G(·, t1) ⋆ G(·, t2) = G(·, t1 + t2) when the time factor is an exponential
    let spec = ProblemSpec::new(1.0, 1.5, 0.3);
    let dx = 0.05;
    let n = 801;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 - 400.0) * dx).collect();
    let eval = |t: f64| -> Vec<f64> {
        xs.iter()
            .map(|&x| {
                if x == 0.0 {
                    green_point(GreenKind::G, x, t, &spec, &cfg()).unwrap().re
                } else {
                    green_point_closed(GreenKind::G, x, t, &spec, &cfg()).unwrap()
                }
            })
            .collect()
    };
    let (a, b, c) = (eval(0.4), eval(0.6), eval(1.0));
    let mut worst: f64 = 0.0;
    for i in (300..=500).step_by(10) {
        let mut s = 0.0;
        for j in 0..n {
            let m = i as isize - j as isize + 400;
            if (0..n as isize).contains(&m) {
                s += a[j] * b[m as usize] * dx;
            }
        }
        worst = worst.max((s - c[i]).abs());
    }
    assert!(worst < 1e-4, "semigroup defect {worst}");
}

#[test]
fn self_similarity() {
    let spec = ProblemSpec::new(0.75, 1.3, 0.2).with_lambda(Complex64::new(1.5, 0.0));
    let collapsed = |x: f64, t: f64| {
        let g = green_point(GreenKind::G, x, t, &spec, &cfg()).unwrap().re;
        spec.beta * x.abs() * t.powf(1.0 - spec.alpha) * g
    };
    // same |x| / (λ t^α)^{1/β}
    let t2: f64 = 3.0;
    let x2 = 0.8 * t2.powf(spec.alpha / spec.beta);
    assert!((collapsed(0.8, 1.0) - collapsed(x2, t2)).abs() < 1e-8);
}

#[test]
fn numeric_mass_matches_law() {
    let spec = ProblemSpec::new(0.6, 1.4, 0.3);
    let m = green_mass_numeric(GreenKind::G, 1.7, &spec, &cfg()).unwrap();
    let want = green_mass(GreenKind::G, 1.7, &spec).unwrap().re;
    assert!((m - want).abs() < 1e-6, "{m} vs {want}");
}
