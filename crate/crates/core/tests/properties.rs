use std::f64::consts::PI;

use fracgreen::fracmath::{mittag_leffler, rgamma};
use fracgreen::green::ProblemSpec;
use fracgreen::operators::{riesz_feller_symbol, SymbolParams};
use fracgreen::oracle::{oracle_mode_evolve, OracleConfig};
use fracgreen::solver::{solve, SourceDescriptor, SourceTerm, SpaceTimeGrid};
use fracgreen::QuadratureConfig;
use num_complex::Complex64;
use proptest::prelude::*;

fn order_and_skew() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..=2.0, -1.0f64..=1.0).prop_map(|(a, s)| (a, s * a.min(2.0 - a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ml_conjugate_symmetry(alpha in 0.2f64..2.0, beta in 0.2f64..2.5, r in 0.0f64..25.0, phi in -PI..PI) {
        let z = Complex64::from_polar(r, phi);
        let (Ok(a), Ok(b)) = (mittag_leffler(alpha, beta, z), mittag_leffler(alpha, beta, z.conj())) else {
            return Ok(());
        };
        prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn ml_recurrence(alpha in prop::sample::select(vec![0.3, 0.5, 0.8, 1.0, 1.5, 2.0]), beta in 0.3f64..2.0, r in 0.0f64..20.0, phi in -PI..PI) {
        let z = Complex64::from_polar(r, phi);
        // past the f64 range E has no value to compare
        prop_assume!(!(z.arg().abs() < (alpha * PI).min(PI) && z.powf(1.0 / alpha).re > 700.0));
        let lhs = mittag_leffler(alpha, beta, z).unwrap();
        let shifted = z * mittag_leffler(alpha, alpha + beta, z).unwrap();
        let scale = lhs.norm().max(shifted.norm()).max(rgamma(beta).abs());
        prop_assert!((lhs - shifted - rgamma(beta)).norm() <= 1e-9 * scale);
    }

    #[test]
    fn symbol_is_dissipative((order, skew) in order_and_skew(), k in -100.0f64..100.0) {
        let p = SymbolParams::new(order, skew).unwrap();
        prop_assert!(riesz_feller_symbol(&p, k).re >= -1e-15 * k.abs().powf(order));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_decay_is_eventually_monotone(alpha in 0.2f64..=1.0, c in 0.1f64..10.0) {
        let cfg = OracleConfig { dt: 1.0 / 128.0, n_steps: 640, modes: 8 };
        let u = oracle_mode_evolve(alpha, Complex64::new(c, 0.0), &cfg, Complex64::new(1.0, 0.0)).unwrap();
        let tail = &u[u.len() / 2..];
        prop_assert!(tail.windows(2).all(|w| w[1].norm() <= w[0].norm()), "alpha {alpha}, c {c}");
    }

    #[test]
    fn solve_is_linear(
        (beta, skew) in (0.6f64..=2.0, -1.0f64..=1.0).prop_map(|(b, s)| (b, s * b.min(2.0 - b))),
        alpha in 0.3f64..=1.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        w1 in 0.5f64..1.5,
    ) {
        let spec = ProblemSpec::new(alpha, beta, skew);
        let grid = SpaceTimeGrid::new(-12.0, 12.0, 64, vec![0.3, 0.9], 0.01).unwrap();
        let cfg = QuadratureConfig::default();
        let f1 = SourceDescriptor::Gaussian { center: c1, width: w1 };
        let f2 = SourceDescriptor::Box { lo: c2 - 0.7, hi: c2 + 0.7 };
        let mut both = f1.sample(&grid).unwrap();
        for (a, b) in both.iter_mut().zip(f2.sample(&grid).unwrap()) {
            *a += b;
        }
        let sum = SourceDescriptor::Samples { x_min: grid.x_min, x_max: grid.x_max, values: both };
        let run = |f: &SourceDescriptor| solve(&spec, f, &SourceDescriptor::Zero, &SourceTerm::Zero, &grid, &cfg).unwrap();
        let (a, b, s) = (run(&f1), run(&f2), run(&sum));
        for ((ra, rb), rs) in a.values.iter().zip(&b.values).zip(&s.values) {
            for ((va, vb), vs) in ra.iter().zip(rb).zip(rs) {
                prop_assert!((va + vb - vs).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn solve_commutes_with_grid_shifts(shift in 1usize..12, alpha in 0.4f64..=1.0, beta in 1.0f64..=2.0) {
        let spec = ProblemSpec::new(alpha, beta, 0.3 * (2.0 - beta));
        let grid = SpaceTimeGrid::new(-16.0, 16.0, 128, vec![0.5], 0.01).unwrap();
        let cfg = QuadratureConfig::default();
        let dx = grid.dx();
        let f = |c: f64| SourceDescriptor::Gaussian { center: c, width: 0.6 };
        let run = |d: &SourceDescriptor| solve(&spec, d, &SourceDescriptor::Zero, &SourceTerm::Zero, &grid, &cfg).unwrap();
        let (a, b) = (run(&f(-2.0)), run(&f(-2.0 + shift as f64 * dx)));
        for i in 32..96 {
            prop_assert!((a.values[0][i] - b.values[0][i + shift]).norm() <= 1e-8);
        }
    }
}
