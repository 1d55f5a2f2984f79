use jost_besov::counterexample::*;
use proptest::prelude::*;
use std::f64::consts::LN_2;

#[test]
fn exact_norm_matches_shell_count() {
    for n in [0, 1, 5, 20, 64] {
        let sf = build_phi_n(n).unwrap();
        let want = 2.0 * (n + 1) as f64 * LN_2;
        assert!((sf.l2_norm_sq() - want).abs() < 1e-12 * want);
        assert!((riesz_at_zero(&sf).unwrap() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn quadrature_cross_check() {
    for n in 0..=20 {
        let sf = build_phi_n(n).unwrap();
        let rel = (sf.l2_norm_sq_quadrature() / sf.l2_norm_sq() - 1.0).abs();
        assert!(rel < 5e-3, "N={n}: {rel}");
    }
}

#[test]
fn scaling_fits() {
    let r = scaling_report(&[4, 8, 16, 32, 64]).unwrap();
    assert!((r.slope_i0_sq - 2.0).abs() <= 0.05, "{}", r.slope_i0_sq);
    assert!((r.slope_norm_sq - 1.0).abs() <= 0.05, "{}", r.slope_norm_sq);
    let d = r.doublings.iter().find(|d| d.0 == 16).unwrap().1;
    assert!((d - 2.0).abs() <= 0.2, "{d}");
}

proptest! {
    #[test]
    fn ratio_strictly_increasing(n in 0i64..500) {
        let a = build_phi_n(n).unwrap();
        let b = build_phi_n(n + 1).unwrap();
        let ra = riesz_at_zero(&a).unwrap().powi(2) / a.l2_norm_sq();
        let rb = riesz_at_zero(&b).unwrap().powi(2) / b.l2_norm_sq();
        prop_assert!(rb > ra);
    }

    #[test]
    fn dropping_top_shell_removes_two_ln2(n in 1i64..500) {
        let a = build_phi_n(n).unwrap();
        let t = a.truncated().unwrap();
        let d = riesz_at_zero(&a).unwrap() - riesz_at_zero(&t).unwrap();
        prop_assert!((d - 2.0 * LN_2).abs() < 1e-9);
    }

    #[test]
    fn support_is_the_shell_union(n in 0i64..30, x in -1e10f64..1e10) {
        let sf = build_phi_n(n).unwrap();
        let r = x.abs();
        let inside = r >= 1.0 && r <= 2f64.powi(n as i32 + 1);
        prop_assert_eq!(sf.eval(x) != 0.0, inside);
        if inside {
            prop_assert!((sf.eval(x) - r.powf(-0.5)).abs() < 1e-15);
        }
    }
}
