use jost_besov::gronwall::gronwall_bound;
use jost_besov::oracle::picard_fixed_point;
use jost_besov::potential::weighted_l1_norm;
use jost_besov::scattering::{reflection, transmission};
use jost_besov::window::phi;
use jost_besov::{JostSolver, Potential, Side, SolverOptions, SpatialGrid};
use proptest::prelude::*;

fn grid() -> SpatialGrid {
    SpatialGrid::new(-15.0, 15.0, 601).unwrap()
}

fn potentials() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.1f64..3.0, 0.2f64..2.0).prop_map(|(h, a)| Potential::square_barrier(h, a)),
        (0.1f64..3.0, 0.3f64..2.0).prop_map(|(h, w)| Potential::gaussian(h, w)),
        (0.1f64..3.0).prop_map(Potential::sech2),
    ]
}

fn asymmetric() -> impl Strategy<Value = Potential> {
    (0.2f64..2.0, -2.0f64..2.0, 0.2f64..1.5).prop_map(|(h, c, w)| {
        Potential::sampled_on(&grid(), move |x| h * (-((x - c) / w).powi(2)).exp() * (1.0 + 0.5 * (x - c).tanh()), 2.0)
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weighted_norm_monotone_in_gamma(p in potentials(), g1 in 0.0f64..4.0, dg in 0.0f64..3.0) {
        let g = grid();
        let a = weighted_l1_norm(&p, g1, &g).unwrap();
        let b = weighted_l1_norm(&p, g1 + dg, &g).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-14));
    }

    #[test]
    fn built_ins_are_even(p in potentials(), x in -20.0f64..20.0) {
        prop_assert!(p.is_even());
        prop_assert_eq!(p.eval(x), p.eval(-x));
        prop_assert_eq!(p.reflected().eval(x), p.eval(-x));
    }

    #[test]
    fn negative_frequency_is_conjugate(p in asymmetric(), tau in 0.1f64..6.0) {
        let s = JostSolver::new(&p, &grid(), SolverOptions::default()).unwrap();
        for side in [Side::Plus, Side::Minus] {
            let a = s.column(tau, side, false);
            let b = s.column(-tau, side, false);
            let d = a.m.iter().zip(&b.m).map(|(u, v)| (u.conj() - v).norm()).fold(0.0, f64::max);
            prop_assert!(d < 1e-12, "{}", d);
        }
        let t = transmission(&p, &grid(), tau).unwrap();
        let tm = transmission(&p, &grid(), -tau).unwrap();
        prop_assert!((t.conj() - tm).norm() < 1e-12);
    }

    #[test]
    fn even_potentials_reflect_alike(p in potentials(), tau in 0.1f64..10.0) {
        let rp = reflection(&p, &grid(), tau, Side::Plus).unwrap();
        let rm = reflection(&p, &grid(), tau, Side::Minus).unwrap();
        prop_assert!((rp - rm).norm() < 1e-9, "{} vs {}", rp, rm);
    }

    #[test]
    fn unitarity(p in prop_oneof![potentials(), asymmetric()], tau in 0.05f64..20.0) {
        let g = grid();
        let t = transmission(&p, &g, tau).unwrap().norm_sqr();
        for side in [Side::Plus, Side::Minus] {
            let r = reflection(&p, &g, tau, side).unwrap().norm_sqr();
            prop_assert!((t + r - 1.0).abs() < 1e-4, "{}", t + r);
        }
    }
}

proptest! {
    #[test]
    fn dyadic_windows_sum_to_one(s in 1e-5f64..1e5) {
        let total: f64 = (-25..=25).map(|j| phi(s / 2f64.powi(j))).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(phi(s) * phi(4.0 * s) == 0.0);
    }

    #[test]
    fn gronwall_dominates_fixed_point(
        bumps in prop::collection::vec((-4.0f64..4.0, 0.3f64..2.0, 0.0f64..1.5), 4),
        floor in 0.0f64..0.5,
    ) {
        let g = SpatialGrid::new(-5.0, 5.0, 101).unwrap();
        let f = |k: usize, x: f64| bumps[k].2 * (-((x - bumps[k].0) / bumps[k].1).powi(2)).exp();
        let a: Vec<f64> = g.nodes().iter().map(|&x| floor + f(0, x) + f(1, x)).collect();
        let b: Vec<f64> = g.nodes().iter().map(|&x| f(2, x) + f(3, x)).collect();
        let bound = gronwall_bound(&a, &b, &g).unwrap();
        // Richardson step removes the O(h^2) trapezoid error of the refined iterate
        let v1 = picard_fixed_point(&a, &b, &g, 64);
        let v2 = picard_fixed_point(&a, &b, &g, 128);
        let v: Vec<f64> = v1.iter().zip(&v2).map(|(p, q)| (4.0 * q - p) / 3.0).collect();
        let slack = 1e-12 * v.iter().copied().fold(0.0, f64::max);
        for (u, w) in bound.iter().zip(&v) {
            prop_assert!(u + slack >= *w, "{} < {}", u, w);
        }
    }

    #[test]
    fn gronwall_monotone_in_a(scale in 1.0f64..3.0, c in -3.0f64..3.0) {
        let g = SpatialGrid::new(-5.0, 5.0, 101).unwrap();
        let a: Vec<f64> = g.nodes().iter().map(|&x| (-(x - c).powi(2)).exp()).collect();
        let a2: Vec<f64> = a.iter().map(|v| v * scale).collect();
        let b: Vec<f64> = g.nodes().iter().map(|&x| 0.5 / (1.0 + x * x)).collect();
        let lo = gronwall_bound(&a, &b, &g).unwrap();
        let hi = gronwall_bound(&a2, &b, &g).unwrap();
        prop_assert!(lo.iter().zip(&hi).all(|(l, h)| h >= l));
    }
}
