//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nkcoh::closed_forms::NamedSolution;
use nkcoh::geometry::{bohm, bohm_increase, count_v0_zeros, project_h};
use nkcoh::integrator::{integrate, Tolerances};
use nkcoh::quad;
use nkcoh::series::{series_psi_a, series_psi_b_bubble};
use nkcoh::shooting::{
    bubble_distance, find_doubling, max_orbit, run_family, scan_s2xs4, solve_target, Boundary,
    Family, ShootingOptions, Target,
};
use nkcoh::tolerances::VOLUME_S6;
use nkcoh::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::SQRT3;

/// Failed checks of one criterion, plus informational notes.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn within(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check(
            (got - want).abs() <= tol,
            format!("{name} = {got}, want {want} ± {tol}"),
        );
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

type Outcome = Result<Report, Error>;

fn closed_form_residuals() -> Outcome {
    let mut r = Report::default();
    for sol in NamedSolution::ALL {
        let rep = sol.residual_report(1000)?;
        r.check(
            rep.system < 1e-12,
            format!("{} system residual {:e}", rep.name, rep.system),
        );
        r.check(
            rep.constraints < 1e-12,
            format!("{} constraint residual {:e}", rep.name, rep.constraints),
        );
        r.note(format!(
            "{} {:.1e}/{:.1e}",
            rep.name, rep.system, rep.constraints
        ));
    }
    Ok(r)
}

fn series_regression() -> Outcome {
    let mut r = Report::default();
    let rel = |got: f64, want: f64| {
        if want == 0.0 {
            got.abs()
        } else {
            ((got - want) / want).abs()
        }
    };
    let mut worst = 0.0_f64;
    for a in [0.3, 0.75, 1.0, SQRT3, 3.0] {
        let c = series_psi_a(a, 40)?.components;
        for (k, h, want) in common::s2_rows(a) {
            let e = rel(common::coefficient(&c, k, h), want);
            worst = worst.max(e);
            r.check(
                e < 1e-10,
                format!("a = {a}: component {k} order {h} off by {e:e}"),
            );
        }
    }
    for b in [0.3, 0.75, 1.0, 1.5, 3.0] {
        let c = series_psi_b_bubble(b, 40)?.components;
        for (k, h, want) in common::s3_bubble_rows(b) {
            let e = rel(common::coefficient(&c, k, h), want);
            worst = worst.max(e);
            r.check(
                e < 1e-10,
                format!("b = {b}: component {k} order {h} off by {e:e}"),
            );
        }
    }
    r.note(format!("worst relative error {worst:.1e}"));
    Ok(r)
}

fn homogeneous_rediscovery() -> Outcome {
    let mut r = Report::default();
    let b1 = max_orbit(Family::Beta, 1.0)?;
    r.within("T(beta 1)", b1.t, PI / (2.0 * SQRT3), 1e-8);
    r.within("lambda(beta 1)", b1.lambda, 1.0, 1e-8);
    r.within("mu(beta 1)", b1.mu, 2.0 / SQRT3, 1e-8);
    r.within("w1(beta 1)", b1.w[1], 1.0 / SQRT3, 1e-8);
    r.within("w2(beta 1)", b1.w[2], 0.0, 1e-8);
    let s6 = max_orbit(Family::Alpha, SQRT3)?;
    r.within(
        "Vmax(alpha √3)",
        s6.vmax,
        81.0 * SQRT3 / (25.0 * 5f64.sqrt()),
        1e-6,
    );
    let cp3 = max_orbit(Family::Alpha, 0.5 * SQRT3)?;
    r.within("Vmax(alpha √3/2)", cp3.vmax, 27.0 * SQRT_2 / 32.0, 1e-6);
    r.within("v0(T)(alpha √3/2)", cp3.state.v[0], 0.0, 1e-7);
    Ok(r)
}

fn volume_quadrature() -> Outcome {
    let mut r = Report::default();
    let opts = ShootingOptions::default();
    let cp3 = solve_target(Target::Cp3, &opts)?.normalized_volume();
    let s3s3 = solve_target(Target::S3S3Homog, &opts)?.normalized_volume();
    let s6 = solve_target(Target::S6Homog, &opts)?.normalized_volume();
    let cone = quad::integrate(|t: f64| t.sin().powi(5), 0.0, PI, 1e-13) / VOLUME_S6;
    r.within("vol CP3", cp3, 0.625, 1e-6);
    r.within("vol S3xS3", s3s3, 10.0 * PI / (27.0 * SQRT3), 1e-6);
    r.within("vol S6", s6, 1.0, 1e-6);
    r.within("vol sine-cone", cone, 16.0 / 27.0, 1e-6);
    r.note(format!(
        "CP3 {cp3:.9} S3xS3 {s3s3:.9} S6 {s6:.9} cone {cone:.9}"
    ));
    Ok(r)
}

fn exotic_s3xs3() -> Outcome {
    let mut r = Report::default();
    let s = find_doubling(
        Family::Beta,
        (0.2, 0.6),
        Boundary::V0,
        &ShootingOptions::default(),
    )?
    .summary();
    r.within("b", s.param_left, 0.3736, 0.002);
    r.within("Vmax", s.vmax, 1.0041, 0.001);
    r.within("vol", s.vol, 0.5929, 0.001);
    r.note(format!(
        "b = {:.6}, Vmax = {:.6}, vol = {:.6}",
        s.param_left, s.vmax, s.vol
    ));
    Ok(r)
}

fn exotic_s6() -> Outcome {
    let mut r = Report::default();
    let s = solve_target(Target::S6Exotic, &ShootingOptions::default())?.summary();
    r.within("a", s.param_left, 0.5646, 0.003);
    r.within("b", s.param_right, 0.5985, 0.003);
    r.within("Vmax", s.vmax, 1.0385, 0.002);
    r.within("vol", s.vol, 0.5752, 0.002);
    r.note(format!(
        "a = {:.6}, b = {:.6}, Vmax = {:.6}, vol = {:.6}",
        s.param_left, s.param_right, s.vmax, s.vol
    ));
    Ok(r)
}

fn zero_counts() -> Outcome {
    let mut r = Report::default();
    let opts = ShootingOptions::default();
    let count = |f, p| run_family(f, p, &opts).and_then(|run| count_v0_zeros(&run.trajectory));
    let (b1, b005, a) = (
        count(Family::Beta, 1.0)?,
        count(Family::Beta, 0.05)?,
        count(Family::Alpha, SQRT3)?,
    );
    r.check(b1 == 1, format!("C(b = 1) = {b1}"));
    r.check(b005 >= 2, format!("C(b = 0.05) = {b005}"));
    r.check(a == 0, format!("C(a = √3) = {a}"));
    r.note(format!("C(b=1) = {b1}, C(b=0.05) = {b005}, C(a=√3) = {a}"));
    Ok(r)
}

/// End of the continued solution: where the integrator stops short of `end.t + π`.
fn existence_end(run: &nkcoh::shooting::FamilyRun) -> Result<f64, Error> {
    let end = *run.trajectory.end();
    match integrate(&end, end.t + PI, &[], Tolerances::default()) {
        Ok(t) => Ok(t.t_end()),
        Err(Error::StepCollapse { last }) => Ok(last.t),
        Err(Error::ConstraintDrift { t, .. }) => Ok(t),
        Err(e) => Err(e),
    }
}

fn property_suites() -> Outcome {
    let mut r = Report::default();
    let opts = ShootingOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut worst_b, mut worst_inc, mut worst_h, mut latest) =
        (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let family = if rng.gen_bool(0.5) {
            Family::Alpha
        } else {
            Family::Beta
        };
        let p = (rng.gen_range(0.05_f64.ln()..4.0_f64.ln())).exp();
        let run = run_family(family, p, &opts)?;
        let samples = run.trajectory.dense_samples(3);
        let inc = bohm_increase(&samples)?;
        worst_inc = worst_inc.max(inc);
        r.check(
            inc <= 1e-9,
            format!("{family} {p}: Böhm increases by {inc:e} where l ≥ 0"),
        );
        let rec = &run.record;
        let b = bohm(&rec.state)?.b;
        worst_b = worst_b.min(b);
        r.check(
            b >= 20.0 - 1e-7,
            format!("{family} {p}: B = {b} at the maximal orbit"),
        );
        r.check(
            rec.mu >= rec.lambda - 1e-7 && rec.lambda >= 1.0 - 1e-7,
            format!(
                "{family} {p}: ({}, {}) outside the wedge",
                rec.lambda, rec.mu
            ),
        );
        let stop = existence_end(&run)?;
        latest = latest.max(stop);
        r.check(
            stop < PI,
            format!("{family} {p}: solution continues to {stop}"),
        );
        for s in &samples {
            let w = project_h(s)?;
            let e = (w[0] * w[0] - w[1] * w[1] - w[2] * w[2] - 1.0).abs();
            worst_h = worst_h.max(e);
            r.check(
                e <= 1e-8,
                format!("{family} {p} t = {}: hyperboloid off by {e:e}", s.t),
            );
        }
    }
    r.note(format!(
        "min B {worst_b:.6}, max Böhm increase {worst_inc:.1e}, latest end {latest:.4}, hyperboloid {worst_h:.1e}"
    ));
    Ok(r)
}

fn bubble_convergence() -> Outcome {
    let mut r = Report::default();
    let opts = ShootingOptions::default();
    for (family, window) in [(Family::Beta, (0.2, 1.0)), (Family::Alpha, (1.1, 1.5))] {
        let d: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&e| bubble_distance(family, e, window, 33, &opts))
            .collect::<Result<_, _>>()?;
        r.check(
            d.windows(2).all(|w| w[1] < w[0]),
            format!("{family} distances not decreasing: {d:?}"),
        );
        let shown: Vec<String> = d.iter().map(|x| format!("{x:.3e}")).collect();
        r.note(format!("{family} [{}]", shown.join(", ")));
    }
    Ok(r)
}

fn negative_scan() -> Outcome {
    let mut r = Report::default();
    let scan = scan_s2xs4(0.1, 10.0, 120, &ShootingOptions::default())?;
    let roots = scan.s2xs4_roots();
    if roots.is_empty() {
        r.note(format!(
            "no lambda = 1, mu > 1 root; min |u0/mu| = {:.3e}",
            scan.min_abs_u0
        ));
    } else {
        r.note(format!("WARNING: boundary roots found {roots:?}"));
    }
    Ok(r)
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
    asserted: bool,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "closed-form residuals",
            budget: Duration::from_secs(1),
            run: closed_form_residuals,
            asserted: true,
        },
        Criterion {
            id: 2,
            name: "series regression",
            budget: Duration::from_secs(5),
            run: series_regression,
            asserted: true,
        },
        Criterion {
            id: 3,
            name: "homogeneous rediscovery",
            budget: Duration::from_secs(2),
            run: homogeneous_rediscovery,
            asserted: true,
        },
        Criterion {
            id: 4,
            name: "volume quadrature",
            budget: Duration::from_secs(5),
            run: volume_quadrature,
            asserted: true,
        },
        Criterion {
            id: 5,
            name: "exotic S3xS3",
            budget: Duration::from_secs(30),
            run: exotic_s3xs3,
            asserted: true,
        },
        Criterion {
            id: 6,
            name: "exotic S6",
            budget: Duration::from_secs(120),
            run: exotic_s6,
            asserted: true,
        },
        Criterion {
            id: 7,
            name: "zero counts",
            budget: Duration::from_secs(10),
            run: zero_counts,
            asserted: true,
        },
        Criterion {
            id: 8,
            name: "property suites",
            budget: Duration::from_secs(60),
            run: property_suites,
            asserted: true,
        },
        Criterion {
            id: 9,
            name: "bubble convergence",
            budget: Duration::from_secs(30),
            run: bubble_convergence,
            asserted: true,
        },
        Criterion {
            id: 10,
            name: "negative scan",
            budget: Duration::from_secs(60),
            run: negative_scan,
            asserted: false,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (mut problems, notes) = match outcome {
            Ok(rep) => (rep.failures, rep.notes),
            Err(e) => (vec![format!("error: {e}")], Vec::new()),
        };
        if elapsed > c.budget {
            problems.push(format!("runtime {elapsed:.2?} over budget {:?}", c.budget));
        }
        let status = match (c.asserted, problems.is_empty()) {
            (false, _) => "REPORT",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] {:>2} {} ({elapsed:.2?})", c.id, c.name);
        for n in &notes {
            println!("       {n}");
        }
        for p in &problems {
            println!("       - {p}");
        }
    }
    let asserted = criteria.iter().filter(|c| c.asserted).count();
    println!(
        "acceptance: {} of {asserted} asserted criteria passed",
        asserted - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
