use jost_besov::jost::{jost_derivative, solve_jost};
use jost_besov::oracle::{sech2_transmission_probability, SquareBarrierOracle};
use jost_besov::scattering::{detect_resonance, reflection, transmission, Verdict, DEFAULT_TAU_SEQ};
use jost_besov::{JostSolver, Potential, Side, SpatialGrid};

#[test]
fn barrier_modifier_matches_matching_solution() {
    let g = SpatialGrid::default_grid();
    let p = Potential::square_barrier(1.0, 1.0);
    let o = SquareBarrierOracle::new(1.0, 1.0);
    for &tau in &[0.5, 1.0, 2.0, 10.0] {
        let mp = solve_jost(&p, &g, tau, Side::Plus).unwrap();
        let mm = solve_jost(&p, &g, tau, Side::Minus).unwrap();
        for i in 0..g.len() {
            let x = g.x(i);
            assert!((mp[i] - o.m_plus(x, tau)).norm() < 1e-6, "tau={tau} x={x}");
            assert!((mm[i] - o.m_minus(x, tau)).norm() < 1e-6, "tau={tau} x={x}");
        }
    }
}

#[test]
fn barrier_coefficients_match_oracle() {
    let g = SpatialGrid::default_grid();
    let p = Potential::square_barrier(1.0, 1.0);
    let o = SquareBarrierOracle::new(1.0, 1.0);
    for &tau in &[0.5, 1.0, 2.0, 5.0, 10.0] {
        let t = transmission(&p, &g, tau).unwrap();
        let rp = reflection(&p, &g, tau, Side::Plus).unwrap();
        let rm = reflection(&p, &g, tau, Side::Minus).unwrap();
        assert!((t - o.transmission_textbook(tau)).norm() < 1e-5, "{tau}");
        assert!((rm - o.reflection(tau)).norm() < 1e-5, "{tau}");
        assert!((rp - rm).norm() < 1e-8);
    }
}

#[test]
fn sech2_transmission_probability_matches() {
    let g = SpatialGrid::default_grid();
    let p = Potential::sech2(1.0);
    for &tau in &[0.2, 0.7, 1.5, 4.0] {
        let t = transmission(&p, &g, tau).unwrap();
        let exact = sech2_transmission_probability(1.0, tau);
        assert!((t.norm_sqr() - exact).abs() < 1e-7, "{tau}: {} vs {exact}", t.norm_sqr());
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let g = SpatialGrid::default_grid();
    for p in [Potential::square_barrier(1.0, 1.0), Potential::gaussian(1.0, 1.0)] {
        let d = jost_derivative(&p, &g, 2.0, Side::Plus, 1).unwrap();
        let fd = |eps: f64| {
            let a = solve_jost(&p, &g, 2.0 + eps, Side::Plus).unwrap();
            let b = solve_jost(&p, &g, 2.0 - eps, Side::Plus).unwrap();
            a.iter().zip(&b).map(|(u, v)| (u - v) / (2.0 * eps)).collect::<Vec<_>>()
        };
        // truncation error of the difference quotient grows like |x|^3, so the
        // 1e-3 step is used near the support and a finer one across the grid
        let coarse = fd(1e-3);
        let fine = fd(1e-5);
        for i in 0..g.len() {
            let x = g.x(i);
            if x.abs() <= 5.0 {
                assert!((coarse[i] - d[i]).norm() < 1e-4, "x={x} {} {}", coarse[i], d[i]);
            }
            assert!((fine[i] - d[i]).norm() < 1e-4, "x={x} {} {}", fine[i], d[i]);
        }
    }
}

#[test]
fn finite_difference_error_is_second_order() {
    let g = SpatialGrid::new(-10.0, 10.0, 801).unwrap();
    let p = Potential::gaussian(1.0, 1.0);
    let d = jost_derivative(&p, &g, 1.5, Side::Minus, 1).unwrap();
    let err = |eps: f64| {
        let a = solve_jost(&p, &g, 1.5 + eps, Side::Minus).unwrap();
        let b = solve_jost(&p, &g, 1.5 - eps, Side::Minus).unwrap();
        (0..g.len()).map(|i| ((a[i] - b[i]) / (2.0 * eps) - d[i]).norm()).fold(0.0, f64::max)
    };
    let ratio = err(2e-2) / err(1e-2);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn high_energy_decay() {
    let g = SpatialGrid::default_grid();
    let p = Potential::square_barrier(1.0, 1.0);
    let sup = |tau: f64| solve_jost(&p, &g, tau, Side::Plus).unwrap().iter().map(|m| (m - 1.0).norm()).fold(0.0, f64::max);
    let ratio = sup(20.0) / sup(10.0);
    assert!((ratio - 0.5).abs() <= 0.1, "{ratio}");
}

#[test]
fn resonance_verdicts() {
    let g = SpatialGrid::default_grid();
    for p in [Potential::square_barrier(1.0, 1.0), Potential::gaussian(2.0, 1.0), Potential::gaussian(1.0, 1.0)] {
        let r = detect_resonance(&p, &g, &DEFAULT_TAU_SEQ).unwrap();
        assert_eq!(r.verdict, Verdict::NonResonant, "{} {:?}", p.name(), r);
        assert!(r.alpha.unwrap().norm() > 0.0);
    }
}

#[test]
fn residual_within_tolerance() {
    let g = SpatialGrid::default_grid();
    for p in [Potential::gaussian(2.0, 1.0), Potential::sech2(1.0)] {
        let s = JostSolver::with_defaults(&p, &g).unwrap();
        for &tau in &[0.0, 0.5, 3.0, 20.0] {
            let c = s.solve(tau, Side::Minus, false).unwrap();
            assert!(c.max_residual() <= 1e-8);
        }
    }
}

#[test]
fn estimate_constants_are_refinement_stable() {
    use jost_besov::estimates::verify_jost_estimates_refined;
    use jost_besov::FrequencyGrid;
    let g = SpatialGrid::default_grid();
    let f = FrequencyGrid::uniform(8.0, 0.02).unwrap();
    let t0 = std::time::Instant::now();
    let r = verify_jost_estimates_refined(&Potential::square_barrier(1.0, 1.0), &g, &f, 2.0, 0.5).unwrap();
    eprintln!("{:?} {:?}", t0.elapsed(), r);
    for e in &r {
        assert!(e.constant.is_finite() && e.constant > 0.0);
        assert!(e.drift.unwrap() < 0.10, "{e:?}");
    }
}
