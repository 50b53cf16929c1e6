use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nkcoh::closed_forms::NamedSolution;
use nkcoh::integrator::{
    integrate, max_volume_function, resample, Direction, EventSpec, Termination, Tolerances,
};
use nkcoh::series::series_psi_b;
use nkcoh::shooting::{run_family, word_lambda_mu, word_lambda_one, Family, ShootingOptions};
use nkcoh::{Error, State};

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn tol(t: f64) -> Tolerances {
    Tolerances { rel: t, abs: t }
}

fn max_diff(a: &State, b: &State) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn sine_cone_event_at_the_equator() {
    let start = NamedSolution::SineCone.eval(0.3).unwrap();
    let traj = integrate(
        &start,
        PI,
        &[EventSpec::max_volume(true)],
        Tolerances::default(),
    )
    .unwrap();
    assert_eq!(traj.termination, Termination::Event);
    assert_eq!(traj.events.len(), 1);
    assert!(
        (traj.events[0].t - FRAC_PI_2).abs() < 1e-10,
        "{}",
        traj.events[0].t
    );
    assert_eq!(traj.t_end(), traj.events[0].t);
}

#[test]
fn homogeneous_s3s3_event_from_the_series() {
    let s = series_psi_b(1.0, 40).unwrap();
    let (_, start) = s.handoff().unwrap();
    let traj = integrate(
        &start,
        start.t + PI,
        &[EventSpec::max_volume(true)],
        Tolerances::default(),
    )
    .unwrap();
    assert!((traj.t_end() - PI / (2.0 * SQRT3)).abs() < 1e-9);
}

#[test]
fn round_sphere_event_volume() {
    let run = run_family(Family::Alpha, SQRT3, &ShootingOptions::default()).unwrap();
    let v = run.trajectory.end().volume();
    let want = 81.0 * SQRT3 / (25.0 * 5f64.sqrt());
    assert!((v - want).abs() < 1e-8, "{v} vs {want}");
}

#[test]
fn resampling() {
    let start = NamedSolution::SineCone.eval(0.3).unwrap();
    let traj = integrate(&start, 2.5, &[], Tolerances::default()).unwrap();
    assert_eq!(traj.termination, Termination::Horizon);
    let node = traj.nodes[3];
    assert_eq!(traj.state_at(node.t).unwrap(), node);
    let got = resample(&traj, &[1.0, 2.0]).unwrap();
    assert!((got[0].lambda - 1f64.sin()).abs() < 1e-9);
    assert!((got[1].lambda - 2f64.sin()).abs() < 1e-9);
    assert!(matches!(traj.state_at(2.6), Err(Error::OutOfSpan { .. })));
    assert!(traj.state_at(0.1).is_err());

    let run = run_family(Family::Alpha, 0.5 * SQRT3, &ShootingOptions::default()).unwrap();
    let t = PI / (2.0 * SQRT_2);
    let s = run.trajectory.state_at(t.min(run.t_max())).unwrap();
    assert!(s.v[0].abs() < 1e-9, "v0 = {}", s.v[0]);
}

#[test]
fn node_times_increase_and_drift_is_recorded() {
    let start = NamedSolution::Cp3Homog.eval(0.2).unwrap();
    let traj = integrate(&start, 2.0, &[], Tolerances::default()).unwrap();
    assert_eq!(traj.nodes.len(), traj.drift.len());
    assert!(traj.nodes.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn first_integrals_stay_small_on_closed_forms() {
    for sol in NamedSolution::ALL {
        let (lo, hi) = sol.domain();
        let margin = 0.02 * (hi - lo);
        let start = sol.eval(lo + margin).unwrap();
        let traj = integrate(&start, hi - margin, &[], Tolerances::default()).unwrap();
        assert!(
            traj.max_drift() < 1e-9,
            "{}: {}",
            sol.name(),
            traj.max_drift()
        );
        // Nearby solutions leave the cone ends at a power rate, so the pointwise
        // gap near them is much larger than the drift.
        let end = sol.eval(traj.t_end()).unwrap();
        assert!(
            max_diff(traj.end(), &end) < 1e-6,
            "{}: {}",
            sol.name(),
            max_diff(traj.end(), &end)
        );
    }
}

#[test]
fn endpoint_error_shrinks_like_a_high_order_method() {
    let sol = NamedSolution::S3S3Homog;
    let start = sol.eval(0.1).unwrap();
    let exact = sol.eval(1.5).unwrap();
    let errs: Vec<f64> = [1e-8, 1e-9, 1e-10, 1e-11]
        .iter()
        .map(|&t| max_diff(integrate(&start, 1.5, &[], tol(t)).unwrap().end(), &exact))
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    // Global error tracks the tolerance, and a 10⁴ tighter tolerance costs at most
    // 10 times the steps (10^{4/p} for order p ≥ 4).
    assert!(errs[3] < 1e-9 && errs[0] / errs[3] > 50.0, "{errs:?}");
    let steps: Vec<usize> = [1e-7, 1e-11]
        .iter()
        .map(|&t| integrate(&start, 1.5, &[], tol(t)).unwrap().nodes.len())
        .collect();
    let ratio = steps[1] as f64 / steps[0] as f64;
    assert!(ratio < 10.0, "step ratio {ratio}");
}

#[test]
fn reversed_data_returns_to_the_start() {
    for (sol, word) in [
        (NamedSolution::S3S3Homog, word_lambda_one()),
        (NamedSolution::Cp3Homog, word_lambda_mu()),
    ] {
        let start = sol.eval(0.3).unwrap();
        let fwd = integrate(&start, 1.0, &[], Tolerances::default()).unwrap();
        let back_start = word.apply(fwd.end());
        let back = integrate(&back_start, -0.3, &[], Tolerances::default()).unwrap();
        let want = word.apply(&start);
        assert!((back.t_end() - want.t).abs() < 1e-14);
        assert!(
            max_diff(back.end(), &want) < 1e-8,
            "{}: {}",
            sol.name(),
            max_diff(back.end(), &want)
        );
    }
}

#[test]
fn located_events_are_stable_under_re_refinement() {
    let run = run_family(Family::Beta, 0.5, &ShootingOptions::default()).unwrap();
    let t = run.t_max();
    let again = run
        .trajectory
        .locate(&max_volume_function, t - 1e-3, t)
        .unwrap();
    assert!((again - t).abs() < 1e-13, "{} vs {t}", again);
}

#[test]
fn direction_filters_and_non_terminal_events() {
    let start = NamedSolution::SineCone.eval(0.3).unwrap();
    let cos = |s: &State| s.u[1];
    let rising = EventSpec::new("u1-rising", cos, Direction::Rising, false);
    let falling = EventSpec::new("u1-falling", cos, Direction::Falling, false);
    let traj = integrate(&start, 2.8, &[rising, falling], Tolerances::default()).unwrap();
    assert_eq!(traj.termination, Termination::Horizon);
    let names: Vec<&str> = traj.events.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, ["u1-falling"]);
    assert!((traj.events[0].t - FRAC_PI_2).abs() < 1e-10);
}

#[test]
fn singular_orbit_stops_the_run() {
    let start = NamedSolution::SineCone.eval(2.0).unwrap();
    let last = match integrate(&start, 4.0, &[], Tolerances::default()) {
        Ok(traj) => {
            assert_eq!(traj.termination, Termination::Singularity);
            *traj.end()
        }
        Err(Error::StepCollapse { last }) => last,
        Err(e) => panic!("{e}"),
    };
    assert!(last.t < PI);
    assert!(last.lambda < 1e-3 || last.mu2() < 1e-6, "{last:?}");
}

#[test]
fn inadmissible_input_is_rejected() {
    let bad = State::new(0.0, -1.0, [0.0, 1.0, -1.0], [0.0, 1.0, 0.0]);
    assert!(integrate(&bad, 1.0, &[], Tolerances::default()).is_err());
    let good = NamedSolution::SineCone.eval(1.0).unwrap();
    assert!(matches!(
        integrate(&good, 0.5, &[], Tolerances::default()),
        Err(Error::InvalidArgument(_))
    ));
}
