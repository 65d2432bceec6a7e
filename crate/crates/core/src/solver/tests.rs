use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_lr};

use super::*;
use crate::green::SourceMode;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn grid(half: f64, nx: usize, times: Vec<f64>) -> SpaceTimeGrid {
    SpaceTimeGrid::new(-half, half, nx, times, 1e-2).unwrap()
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn gauss(width: f64) -> SourceDescriptor {
    SourceDescriptor::Gaussian { center: 0.0, width }
}

fn zero() -> SourceDescriptor {
    SourceDescriptor::Zero
}

fn mass(row: &[Complex64], dx: f64) -> Complex64 {
    row.iter().sum::<Complex64>() * dx
}

#[test]
fn delta_gives_heat_kernel() {
    let spec = ProblemSpec::new(1.0, 2.0, 0.0);
    let gr = grid(10.0, 257, vec![0.5, 1.0]);
    let f = SourceDescriptor::DiracDelta { center: 0.0 };
    for route in [Route::Spectral, Route::RealSpace] {
        let sol = solve_with(
            &spec,
            &f,
            &zero(),
            &SourceTerm::Zero,
            &gr,
            &cfg(),
            &SolveOptions { route },
        )
        .unwrap();
        assert_eq!(sol.route, route);
        for (t, row) in gr.times.iter().zip(&sol.field.values) {
            for (i, v) in row.iter().enumerate() {
                let x = gr.x(i);
                let want = (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
                assert!((v.re - want).abs() < 1e-6, "{route:?} t={t} x={x}: {v} vs {want}");
            }
        }
    }
}

#[test]
fn zero_data_zero_field() {
    let spec = ProblemSpec::new(0.6, 1.2, 0.1);
    let gr = grid(5.0, 64, vec![1.0]);
    let field = solve(&spec, &zero(), &zero(), &SourceTerm::Zero, &gr, &cfg()).unwrap();
    assert!(field.values.iter().flatten().all(|v| v.norm() == 0.0));
}

#[test]
fn linear_in_initial_data() {
    let spec = ProblemSpec::new(0.7, 1.4, 0.1);
    let gr = grid(12.0, 128, vec![0.5, 1.5]);
    let f1 = gauss(0.7);
    let f2 = SourceDescriptor::Box { lo: -1.0, hi: 2.0 };
    let sum: Vec<Complex64> = f1
        .sample(&gr)
        .unwrap()
        .iter()
        .zip(f2.sample(&gr).unwrap())
        .map(|(a, b)| a + b)
        .collect();
    let f12 = SourceDescriptor::Samples {
        x_min: gr.x_min,
        x_max: gr.x_max,
        values: sum,
    };
    let run = |f: &SourceDescriptor| solve(&spec, f, &zero(), &SourceTerm::Zero, &gr, &cfg()).unwrap();
    let (a, b, ab) = (run(&f1), run(&f2), run(&f12));
    for r in 0..2 {
        for i in 0..gr.nx {
            assert!((a.values[r][i] + b.values[r][i] - ab.values[r][i]).norm() < 1e-10);
        }
    }
}

#[test]
fn shifts_with_the_data() {
    let spec = ProblemSpec::new(0.8, 1.6, 0.3);
    let gr = grid(20.0, 256, vec![1.0]);
    let shift = 9;
    let at = |c: f64| SourceDescriptor::Gaussian { center: c, width: 0.8 };
    let run = |f: &SourceDescriptor| solve(&spec, f, &zero(), &SourceTerm::Zero, &gr, &cfg()).unwrap();
    let a = run(&at(0.0));
    let b = run(&at(shift as f64 * gr.dx()));
    for i in 60..190 {
        assert!((a.values[0][i] - b.values[0][i + shift]).norm() < 1e-8);
    }
}

#[test]
fn mass_follows_power_law() {
    let spec = ProblemSpec::new(0.8, 1.9, 0.05);
    let gr = grid(100.0, 1024, vec![0.5, 1.0]);
    let f = SourceDescriptor::Box { lo: -1.0, hi: 1.5 };
    let field = solve(&spec, &f, &zero(), &SourceTerm::Zero, &gr, &cfg()).unwrap();
    let m0 = mass(&f.sample(&gr).unwrap(), gr.dx()).re;
    for (t, row) in gr.times.iter().zip(&field.values) {
        let want = t.powf(spec.alpha - 1.0) / gamma(spec.alpha) * m0;
        assert!((mass(row, gr.dx()).re - want).abs() < 1e-4, "t={t}");
    }
}

#[test]
fn real_space_route_matches_spectral() {
    let spec = ProblemSpec::new(0.7, 1.4, 0.1);
    let gr = grid(15.0, 256, vec![1.0]);
    let run = |route| {
        solve_with(
            &spec,
            &gauss(1.0),
            &zero(),
            &SourceTerm::Zero,
            &gr,
            &cfg(),
            &SolveOptions { route },
        )
        .unwrap()
    };
    let a = run(Route::Spectral);
    let b = run(Route::RealSpace);
    let r = compare_fields(&b.field, &a.field).unwrap();
    assert!(r.relative_l2 < 1e-3, "{r:?}");
}

#[test]
fn wave_regime_with_second_condition() {
    // α = 2, β = 2: d'Alembert with N(0) = g and ∂_t N(0) = f
    let spec = ProblemSpec::new(2.0, 2.0, 0.0);
    let gr = grid(20.0, 512, vec![1.0, 3.0]);
    let f = gauss(1.0);
    let g = gauss(1.5);
    let sol = solve_with(&spec, &f, &g, &SourceTerm::Zero, &gr, &cfg(), &SolveOptions::default()).unwrap();
    assert_eq!(sol.route, Route::Periodic);
    let pdf = |x: f64, s: f64| (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
    let cdf = |x: f64, s: f64| 0.5 * (1.0 + statrs::function::erf::erf(x / (s * 2f64.sqrt())));
    for (t, row) in gr.times.iter().zip(&sol.field.values) {
        for i in (0..gr.nx).step_by(5) {
            let x = gr.x(i);
            let want = 0.5 * (pdf(x - t, 1.5) + pdf(x + t, 1.5)) + 0.5 * (cdf(x + t, 1.0) - cdf(x - t, 1.0));
            assert!((row[i].re - want).abs() < 1e-8, "t={t} x={x}: {} vs {want}", row[i]);
        }
    }
}

#[test]
fn source_mass_with_exponential_forcing() {
    // identity mode: k = 0 mode obeys D^α m = μ·M·e^{rτ}
    let mu = 0.5;
    let r = 0.8;
    let a = 0.5;
    let spec = ProblemSpec::new(a, 2.0, 0.0).with_source(1.0, 0.0, c(mu), SourceMode::Identity);
    let mut gr = grid(30.0, 256, vec![0.5, 1.0]);
    gr.dt = 1.0 / 256.0;
    let profile = SourceDescriptor::Box { lo: -1.0, hi: 1.0 };
    let u = SourceTerm::Separable {
        profile: profile.clone(),
        temporal: Temporal::Exponential { rate: r },
    };
    let sol = solve_with(&spec, &zero(), &zero(), &u, &gr, &cfg(), &SolveOptions::default()).unwrap();
    assert!(sol.source_error < SOURCE_TIME_TOL);
    let m_u = mass(&profile.sample(&gr).unwrap(), gr.dx()).re;
    for (t, row) in gr.times.iter().zip(&sol.field.values) {
        // μ M e^{rt} ∫_0^t s^{a−1} e^{−rs} ds / Γ(a)
        let want = mu * m_u * (r * t).exp() * gamma_lr(a, r * t) * r.powf(-a);
        let got = mass(row, gr.dx()).re;
        assert!((got - want).abs() < 1e-5 * want, "t={t}: {got} vs {want}");
    }
}

#[test]
fn coarse_time_grid_is_reported() {
    let spec = ProblemSpec::new(0.5, 2.0, 0.0).with_source(1.0, 0.0, c(1.0), SourceMode::Identity);
    let mut gr = grid(10.0, 64, vec![2.0]);
    gr.dt = 1.0;
    let u = SourceTerm::Separable {
        profile: gauss(1.0),
        temporal: Temporal::Exponential { rate: 6.0 },
    };
    let err = solve(&spec, &zero(), &zero(), &u, &gr, &cfg()).unwrap_err();
    assert!(matches!(err, Error::TimeGridTooCoarse { .. }), "{err}");
}

#[test]
fn self_coupled_mass() {
    let mu = 0.3;
    let spec = ProblemSpec::new(1.0, 1.9, 0.05).with_source(1.2, 0.0, c(mu), SourceMode::Identity);
    let gr = grid(40.0, 512, vec![0.5, 1.0]);
    let field = solve(&spec, &gauss(1.0), &zero(), &SourceTerm::SelfCoupled, &gr, &cfg()).unwrap();
    for (t, row) in gr.times.iter().zip(&field.values) {
        let m = mass(row, gr.dx()).re;
        assert!((m - (mu * t).exp()).abs() < 1e-3, "t={t}: {m}");
    }
}

#[test]
fn constant_source_matches_steady_transform() {
    // α = 1, Riesz-Feller source: N̂ = −μΨ_γ Û (1 − e^{−wt}) / w
    let spec = ProblemSpec::new(1.0, 2.0, 0.0).with_source(1.0, 0.0, c(0.4), SourceMode::RieszFeller);
    let gr = grid(25.0, 128, vec![1.0]);
    let u = SourceTerm::Separable {
        profile: gauss(1.0),
        temporal: Temporal::Constant,
    };
    let sol = solve_with(&spec, &zero(), &zero(), &u, &gr, &cfg(), &SolveOptions::default()).unwrap();
    assert!(sol.source_error < 1e-12);
    // x = 0 by direct quadrature of the inverse transform, Û = e^{−k²/2}
    let t = 1.0f64;
    let integrand = |k: f64| -> Complex64 {
        if k == 0.0 {
            return c(0.0);
        }
        let w = k * k;
        c(-0.4 * k.abs() * (-k * k / 2.0).exp() * (1.0 - (-w * t).exp()) / w / PI)
    };
    let est = crate::quad::adaptive(integrand, 0.0, 12.0, 1e-13, 1e-12, 400);
    let mid = gr.nx / 2;
    let x_mid = gr.x(mid);
    assert!(x_mid.abs() < 0.2);
    // shift-free comparison by interpolating the two nodes around 0
    let lo = gr.x(mid - 1);
    let w = (0.0 - lo) / gr.dx();
    let at_zero = sol.field.values[0][mid - 1] * (1.0 - w) + sol.field.values[0][mid] * w;
    assert!((at_zero.re - est.value.re).abs() < 2e-3, "{at_zero} vs {}", est.value);
}

#[test]
fn rejects_bad_inputs() {
    let gr = grid(5.0, 32, vec![1.0]);
    let sub = ProblemSpec::new(0.5, 1.5, 0.0);
    let err = solve(&sub, &zero(), &gauss(1.0), &SourceTerm::Zero, &gr, &cfg()).unwrap_err();
    assert!(matches!(err, Error::Regime(_)));
    let delta = SourceTerm::Separable {
        profile: SourceDescriptor::DiracDelta { center: 0.0 },
        temporal: Temporal::Constant,
    };
    assert!(matches!(
        solve(&sub, &zero(), &zero(), &delta, &gr, &cfg()),
        Err(Error::InvalidParameter(_))
    ));
    let bad = SourceDescriptor::Samples {
        x_min: -5.0,
        x_max: 5.0,
        values: vec![c(1.0); 31],
    };
    assert!(matches!(
        solve(&sub, &bad, &zero(), &SourceTerm::Zero, &gr, &cfg()),
        Err(Error::LengthMismatch { .. })
    ));
    let invalid = ProblemSpec::new(0.5, 2.0, 0.1);
    assert!(matches!(
        solve(&invalid, &gauss(1.0), &zero(), &SourceTerm::Zero, &gr, &cfg()),
        Err(Error::Constraint(_))
    ));
    assert!(SpaceTimeGrid::new(0.0, 1.0, 4, vec![1.0], 0.1).is_err());
    assert!(SpaceTimeGrid::new(0.0, 1.0, 16, vec![0.0, 1.0], 0.1).is_err());
}

#[test]
fn validate_spec_examples() {
    assert!(validate_spec(&ProblemSpec::new(0.5, 1.5, 0.4)).is_ok());
    match validate_spec(&ProblemSpec::new(0.5, 2.0, 0.1)) {
        Err(Error::Constraint(v)) => assert!(v.iter().any(|x| x.parameter == "theta")),
        other => panic!("{other:?}"),
    }
    let mut wave = ProblemSpec::new(1.5, 1.5, 0.0);
    wave.regime = Regime::Diffusion;
    assert!(matches!(validate_spec(&wave), Err(Error::Regime(_))));
}

#[test]
fn csv_round_trip() {
    let spec = ProblemSpec::new(0.9, 1.7, 0.0);
    let gr = grid(6.0, 16, vec![0.25, 0.5]);
    let field = solve(&spec, &gauss(0.5), &zero(), &SourceTerm::Zero, &gr, &cfg()).unwrap();
    let mut buf = Vec::new();
    field.write_csv(&mut buf).unwrap();
    let back = Field::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.values, field.values);
    assert_eq!(back.grid.times, gr.times);
    let r = compare_fields(&back, &field).unwrap();
    assert_eq!((r.l2, r.relative_l2, r.max_abs), (0.0, 0.0, 0.0));
}
