use std::f64::consts::FRAC_PI_2;

use nkcoh::closed_forms::{CalabiYau, NamedSolution};
use nkcoh::series::{
    recurrence_residuals, resonance_determinant, series_psi_a, series_psi_a_bubble,
    series_psi_a_large, series_psi_b, series_psi_b_bubble, S2Bubble, S2Family, S3Bubble,
    SingularIvp,
};
use nkcoh::shooting::word_lambda_one;

mod common;

use common::SQRT3;

const ORDER: usize = 40;

fn close(got: f64, want: f64, what: &str) {
    let err = if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    };
    assert!(err < 1e-10, "{what}: got {got}, want {want}");
}

#[test]
fn s2_family_low_order_coefficients() {
    for a in [0.3, 0.75, 1.0, SQRT3, 3.0] {
        let c = series_psi_a(a, ORDER).unwrap().components;
        for (k, h, want) in common::s2_rows(a) {
            close(
                common::coefficient(&c, k, h),
                want,
                &format!("a = {a}, component {k}, order {h}"),
            );
        }
    }
}

#[test]
fn s3_bubble_low_order_coefficients() {
    for b in [0.3, 0.75, 1.0, 1.5, 3.0] {
        let c = series_psi_b_bubble(b, ORDER).unwrap().components;
        for (k, h, want) in common::s3_bubble_rows(b) {
            close(
                common::coefficient(&c, k, h),
                want,
                &format!("b = {b}, component {k}, order {h}"),
            );
        }
    }
}

#[test]
fn parity_of_the_expansions() {
    let a = series_psi_a(0.8, ORDER).unwrap();
    for (k, c) in a.components.iter().enumerate() {
        let odd = k == 0;
        for (h, v) in c.iter().enumerate() {
            if (h % 2 == 1) != odd {
                assert!(v.abs() < 1e-13, "S2 component {k} order {h}: {v}");
            }
        }
    }
    let b = series_psi_b_bubble(0.8, ORDER).unwrap();
    for (k, c) in b.components.iter().enumerate() {
        let odd = (1..=3).contains(&k);
        for (h, v) in c.iter().enumerate() {
            if (h % 2 == 1) != odd {
                assert!(v.abs() < 1e-13, "S3 component {k} order {h}: {v}");
            }
        }
    }
}

#[test]
fn resonance_determinants_match_closed_products() {
    // Independent check of the linearisation: the determinant factors are known.
    for h in 1..=12 {
        let h = h as f64;
        let want = (h + 1.0).powi(2) * (h + 2.0).powi(4) * (h + 3.0);
        let got = resonance_determinant(&S3Bubble { eps: 0.6 }, h);
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "h = {h}: {got} vs {want}"
        );
        assert!(resonance_determinant(&S2Family { a: 0.6 }, h).abs() > 1e-6);
        assert!(resonance_determinant(&S2Bubble { eps: 0.6 }, h).abs() > 1e-6);
    }
}

#[test]
fn recurrence_residuals_vanish() {
    for p in [0.2, 1.0, 4.0] {
        let s = series_psi_a(p, ORDER).unwrap();
        let r = recurrence_residuals(&S2Family { a: p }, &s.raw);
        for (row, c) in r.iter().zip(&s.raw) {
            for (h, (e, ch)) in row.iter().zip(c).enumerate() {
                assert!(
                    e.abs() <= 1e-12 * (h as f64 * ch.abs()).max(1.0),
                    "a = {p}, order {h}: {e}"
                );
            }
        }
        assert!(s.max_recurrence_residual() < 1e-12);
        assert!(series_psi_b(p, ORDER).unwrap().max_recurrence_residual() < 1e-12);
        assert!(
            series_psi_a_bubble(p, ORDER)
                .unwrap()
                .max_recurrence_residual()
                < 1e-12
        );
        assert!(
            series_psi_a_large(p, ORDER)
                .unwrap()
                .max_recurrence_residual()
                < 1e-12
        );
    }
}

#[test]
fn initial_points_solve_the_singular_part() {
    for sys in [
        &S2Family { a: 0.7 } as &dyn SingularIvp,
        &S3Bubble { eps: 0.7 },
        &S2Bubble { eps: 0.7 },
    ] {
        let m = sys.m_minus1(&sys.initial());
        assert!(m.iter().all(|v| v.abs() < 1e-14), "{m:?}");
    }
}

#[test]
fn s2_family_at_root_three_is_the_round_sphere() {
    let s = series_psi_a(SQRT3, ORDER).unwrap();
    let signs = word_lambda_one().signs();
    for t in [0.02, 0.05, 0.1, 0.2] {
        let (got, _) = s.evaluate(t);
        let want = NamedSolution::S6Round
            .eval(FRAC_PI_2 - t)
            .unwrap()
            .to_array();
        for (k, (g, w)) in got.to_array().iter().zip(want).enumerate() {
            assert!(
                (g - signs[k] * w).abs() < 1e-12,
                "t = {t}, component {k}: {g} vs {}",
                signs[k] * w
            );
        }
    }
}

#[test]
fn s3_family_at_one_is_homogeneous() {
    let s = series_psi_b(1.0, ORDER).unwrap();
    for x in [0.02, 0.1, 0.2] {
        let t = s.time_at(x);
        assert!((t - x).abs() < 1e-14);
        let (got, _) = s.evaluate(x);
        let want = NamedSolution::S3S3Homog.eval(t).unwrap().to_array();
        for (g, w) in got.to_array().iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "s = {x}: {g} vs {w}");
        }
    }
}

#[test]
fn unrescaled_s3_family_scales_the_bubble() {
    let b = 0.45;
    let bubble = series_psi_b_bubble(b, ORDER).unwrap();
    let direct = series_psi_b(b, ORDER).unwrap();
    let f = [b, b * b, b * b, b * b, b.powi(3), b.powi(3), b.powi(3)];
    for x in [0.05, 0.15] {
        let (s, _) = bubble.evaluate(x);
        let (d, _) = direct.evaluate(x);
        for (k, (sv, dv)) in s.to_array().iter().zip(d.to_array()).enumerate() {
            assert!((sv * f[k] - dv).abs() < 1e-14, "component {k}");
        }
        assert!((direct.time_at(x) - b * bubble.time_at(x)).abs() < 1e-15);
        assert!((direct.variable_at(direct.time_at(x)) - x).abs() < 1e-14);
    }
}

#[test]
fn large_parameter_expansion_agrees_with_direct_one() {
    for a in [2.0, 5.0, 12.0] {
        let big = series_psi_a_large(a, ORDER).unwrap();
        let direct = series_psi_a(a, ORDER).unwrap();
        let f = [1.0, a * a, a * a, a, a * a, a * a, a];
        for t in [0.005, 0.02] {
            let (g, _) = big.evaluate(t);
            let (d, _) = direct.evaluate(t);
            for (k, (gv, dv)) in g.to_array().iter().zip(d.to_array()).enumerate() {
                let want = dv / f[k];
                assert!(
                    (gv - want).abs() < 1e-11 * want.abs().max(1.0),
                    "a = {a}, t = {t}, component {k}: {gv} vs {want}"
                );
            }
        }
    }
}

#[test]
fn bubble_limits_are_the_calabi_yau_structures() {
    let smooth = series_psi_b_bubble(0.0, ORDER).unwrap();
    for s in [0.05, 0.1, 0.2, 0.3] {
        let (st, _) = smooth.evaluate(s);
        let cy = CalabiYau::Smoothing.eval(s).unwrap();
        for (g, w) in [
            (st.lambda, cy.lambda),
            (st.mu(), cy.mu),
            (st.u[1], cy.u[1]),
            (st.v[0], cy.v[0]),
            (st.v[2], cy.v[2]),
        ] {
            assert!((g - w).abs() < 1e-13, "s = {s}: {g} vs {w}");
        }
        assert!(st.u[0].abs() < 1e-15 && st.u[2].abs() < 1e-15 && st.v[1].abs() < 1e-15);
    }
    let small = series_psi_a_bubble(0.0, ORDER).unwrap();
    for t in [0.05, 0.1, 0.2, 0.3] {
        let (st, _) = small.evaluate(t);
        let r = st.u[1].sqrt();
        let cy = CalabiYau::SmallResolution.eval(r).unwrap();
        for (g, w) in [
            (st.lambda, cy.lambda),
            (st.mu(), cy.mu),
            (st.u[0], cy.u[0]),
            (st.v[2], cy.v[2]),
        ] {
            assert!((g - w).abs() < 1e-13, "t = {t}: {g} vs {w}");
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(series_psi_a(0.0, ORDER).is_err());
    assert!(series_psi_a(f64::NAN, ORDER).is_err());
    assert!(series_psi_b(-1.0, ORDER).is_err());
    assert!(series_psi_b_bubble(-0.1, ORDER).is_err());
    assert!(series_psi_b_bubble(0.0, ORDER).is_ok());
}
