use nkcoh::output::fmt_f64;
use nkcoh::series::{series_psi_a, series_psi_b};
use nkcoh::shooting::{run_family, Family, ShootingOptions};
use nkcoh::state::{vector_field, Symmetry};
use nkcoh::{constraints, State};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = State> {
    (
        prop_oneof![0.2..3.0, -3.0..-0.2],
        prop::array::uniform3(-2.0..2.0f64),
        prop::array::uniform3(-2.0..2.0f64),
    )
        .prop_filter("orbit must be nondegenerate", |(_, u, _)| {
            (-u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).abs() > 0.05
        })
        .prop_map(|(l, u, v)| State::new(0.7, l, u, v))
}

fn word() -> impl Strategy<Value = Symmetry> {
    prop::collection::vec(1u8..=4, 1..6).prop_map(|w| Symmetry::from_word(&w).unwrap())
}

proptest! {
    #[test]
    fn words_act_as_sign_involutions(s in state(), w in word()) {
        let twice = w.apply(&w.apply(&s));
        prop_assert_eq!(twice, s);
        prop_assert!(w.signs().iter().all(|x| x.abs() == 1.0));
        prop_assert_eq!(w.to_string().parse::<Symmetry>().unwrap(), w);
    }

    #[test]
    fn vector_field_is_equivariant(s in state(), w in word()) {
        let lhs = vector_field(&w.apply(&s));
        let rhs = w.apply_derivative(&vector_field(&s));
        for k in 0..7 {
            prop_assert!((lhs[k] - rhs[k]).abs() <= 1e-12 * lhs[k].abs().max(1.0), "component {}", k);
        }
    }

    #[test]
    fn constraints_transform_by_sign(s in state(), w in word()) {
        let a = constraints(&s).max_abs();
        let b = constraints(&w.apply(&s)).max_abs();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn float_formatting_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let s = fmt_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        let mantissa: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
        let significant = mantissa.trim_start_matches('0').len();
        prop_assert!(significant <= 17, "{}", s);
    }

    #[test]
    fn series_coefficients_depend_continuously_on_the_parameter(p in 0.3..3.0f64, beta in any::<bool>()) {
        let make = |q: f64| if beta { series_psi_b(q, 12) } else { series_psi_a(q, 12) };
        let (x, y) = (make(p).unwrap(), make(p * (1.0 + 1e-7)).unwrap());
        for (cx, cy) in x.components.iter().zip(&y.components) {
            for (a, b) in cx.iter().zip(cy) {
                prop_assert!((a - b).abs() <= 1e-4 * a.abs().max(1.0), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn truncated_series_violate_constraints_at_high_order(p in 0.3..3.0f64, n in prop::sample::select(vec![2usize, 4, 6])) {
        for ss in [series_psi_a(p, n).unwrap(), series_psi_b(p, n).unwrap()] {
            let x = 0.1 * p.min(1.0);
            let near = constraints(&ss.evaluate(x).0).max_abs();
            let far = constraints(&ss.evaluate(2.0 * x).0).max_abs();
            if near > 1e-12 {
                let slope = (far / near).log2();
                prop_assert!(slope > (n + 2) as f64 - 0.3, "order {} slope {}", n, slope);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn family_trajectories_preserve_the_constraints(p in 0.1..4.0f64, beta in any::<bool>()) {
        let family = if beta { Family::Beta } else { Family::Alpha };
        let run = run_family(family, p, &ShootingOptions::default()).unwrap();
        prop_assert!(run.trajectory.max_drift() < 1e-9, "{} {}: {}", family, p, run.trajectory.max_drift());
        let r = &run.record;
        prop_assert!(r.mu >= r.lambda - 1e-7 && r.lambda >= 1.0 - 1e-7);
        let w = r.w;
        prop_assert!((w[0] * w[0] - w[1] * w[1] - w[2] * w[2] - 1.0).abs() < 1e-8);
    }
}
