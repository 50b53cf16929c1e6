//! Scalar invariants of a principal orbit and the two charts of the space of
//! maximal volume orbits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::shooting::Family;
use crate::state::{rhs, State};
use crate::tolerances::{LAMBDA_MIN, MU2_MIN, ON_BOUNDARY};

fn admissible(s: &State) -> Result<(f64, f64)> {
    let mu2 = s.mu2();
    if !(s.lambda > LAMBDA_MIN) || !(mu2 > MU2_MIN) {
        return Err(Error::Degenerate {
            reason: format!("lambda = {:e}, mu^2 = {:e} at t = {}", s.lambda, mu2, s.t),
        });
    }
    Ok((s.lambda, mu2))
}

/// Orbital volume `V = λμ²` and mean curvature `l = V̇/V`.
pub fn volume_and_mean_curvature(s: &State) -> Result<(f64, f64)> {
    let (l, mu2) = admissible(s)?;
    let d = rhs(s)?;
    let mu_dot_over_mu = 2.0 * l * s.u[1] / mu2;
    Ok((l * mu2, d[0] / l + 2.0 * mu_dot_over_mu))
}

/// Mean curvature `2x₁/y₁ − 3y₂/x₂` in orbit-metric variables.
pub fn mean_curvature_orbital(s: &State) -> Result<f64> {
    let (l, mu2) = admissible(s)?;
    let mu = mu2.sqrt();
    let (x1, y1, y2, x2) = (s.u[1] / mu, mu / l, s.v[2] / (l * mu), -l);
    Ok(2.0 * x1 / y1 - 3.0 * y2 / x2)
}

/// `(w₀, w₁, w₂)`, the Minkowski cross product of `u` and `v` divided by `V`.
pub fn project_h(s: &State) -> Result<[f64; 3]> {
    let (l, mu2) = admissible(s)?;
    let v = l * mu2;
    let [u0, u1, u2] = s.u;
    let [v0, v1, v2] = s.v;
    Ok([
        (u1 * v2 - u2 * v1) / v,
        (u0 * v2 - u2 * v0) / v,
        (u1 * v0 - u0 * v1) / v,
    ])
}

struct OrbitVariables {
    lambda: f64,
    mu: f64,
    x1: f64,
    y2: f64,
    w1: f64,
    w2: f64,
}

fn orbit_variables(s: &State) -> Result<OrbitVariables> {
    let (lambda, mu2) = admissible(s)?;
    let mu = mu2.sqrt();
    let w = project_h(s)?;
    Ok(OrbitVariables {
        lambda,
        mu,
        x1: s.u[1] / mu,
        y2: s.v[2] / (lambda * mu),
        w1: w[1],
        w2: w[2],
    })
}

/// Scalar curvature of the orbit metric.
pub fn scalar_curvature(s: &State) -> Result<f64> {
    let o = orbit_variables(s)?;
    let (l2, mu2) = (o.lambda * o.lambda, o.mu * o.mu);
    Ok(
        20.0 - 4.0 * l2 * o.x1 * o.x1 / mu2 + 24.0 * o.x1 * o.y2 / o.mu
            - 4.0 * l2 * o.w1 * o.w1 / mu2
            - 9.0 * o.w2 * o.w2 / l2,
    )
}

/// Squared norm of the traceless second fundamental form.
pub fn traceless_l_norm2(s: &State) -> Result<f64> {
    let o = orbit_variables(s)?;
    let (l2, mu2) = (o.lambda * o.lambda, o.mu * o.mu);
    let a = o.lambda * o.x1 / o.mu - o.y2 / o.lambda;
    Ok(36.0 / 5.0 * a * a + 4.0 * l2 * o.w1 * o.w1 / mu2 + 9.0 * o.w2 * o.w2 / l2)
}

/// Böhm functional with its ingredients (`n = 5`, `Λ = 5`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BohmValue {
    /// `V^{2/5}(20 + (4/5)l²)`, the definition reduced with the Gauss equation.
    pub b: f64,
    /// `V^{2/5}(|L̊|² + Scal)` from the curvature formulas.
    pub b_check: f64,
    /// `V^{2/5}(20 + l²)`; equal to `b` exactly when `l = 0`.
    pub b_trace_form: f64,
    pub volume: f64,
    pub l: f64,
    pub ldot_norm2: f64,
    pub scal: f64,
}

pub fn bohm(s: &State) -> Result<BohmValue> {
    let (volume, l) = volume_and_mean_curvature(s)?;
    let ldot_norm2 = traceless_l_norm2(s)?;
    let scal = scalar_curvature(s)?;
    let p = volume.powf(0.4);
    Ok(BohmValue {
        b: p * (20.0 + 0.8 * l * l),
        b_check: p * (ldot_norm2 + scal),
        b_trace_form: p * (20.0 + l * l),
        volume,
        l,
        ldot_norm2,
        scal,
    })
}

/// Maximal volume orbit of one family member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxOrbitRecord {
    pub family: Family,
    pub param: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub state: State,
    pub lambda: f64,
    pub mu: f64,
    pub w: [f64; 3],
    pub vmax: f64,
    pub bohm: f64,
}

impl MaxOrbitRecord {
    pub fn new(family: Family, param: f64, state: State) -> Result<Self> {
        let w = project_h(&state)?;
        let b = bohm(&state)?;
        Ok(MaxOrbitRecord {
            family,
            param,
            t: state.t,
            state,
            lambda: state.lambda,
            mu: state.mu(),
            w,
            vmax: state.volume(),
            bohm: b.b,
        })
    }

    pub fn h_point(&self) -> [f64; 2] {
        [self.w[1], self.w[2]]
    }

    pub fn wedge_point(&self) -> [f64; 2] {
        [self.lambda, self.mu]
    }

    /// `μ ≥ λ ≥ 1` up to `tol`.
    pub fn in_wedge(&self, tol: f64) -> bool {
        self.mu >= self.lambda - tol && self.lambda >= 1.0 - tol
    }

    /// `|u₀(T)|/μ` below the boundary tolerance.
    pub fn on_lambda_one_boundary(&self) -> bool {
        self.state.u[0].abs() / self.mu < ON_BOUNDARY
    }

    /// `|v₀(T)|/μ` below the boundary tolerance.
    pub fn on_lambda_mu_boundary(&self) -> bool {
        self.state.v[0].abs() / self.mu < ON_BOUNDARY
    }
}

/// Sign changes in a sequence, ignoring entries with magnitude at most `floor`.
pub fn count_sign_changes(values: impl IntoIterator<Item = f64>, floor: f64) -> usize {
    let mut last = 0.0_f64;
    let mut n = 0;
    for x in values {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            n += 1;
        }
        last = x;
    }
    n
}

/// Samples of the dense output used for zero counting.
pub const ZERO_COUNT_SAMPLES: usize = 16;

/// Number of zeros of `v₀` on the open span of a trajectory ending at its
/// maximal volume orbit.
pub fn count_v0_zeros(traj: &Trajectory) -> Result<usize> {
    let end = traj.end();
    if end.v[0].abs() / end.mu() < ON_BOUNDARY {
        return Err(Error::BoundaryAmbiguous(format!(
            "v0(T) = {:e} at T = {}",
            end.v[0], end.t
        )));
    }
    let samples = traj.dense_samples(ZERO_COUNT_SAMPLES);
    let scale = samples.iter().fold(0.0_f64, |m, s| m.max(s.v[0].abs()));
    Ok(count_sign_changes(
        samples.iter().map(|s| s.v[0]),
        1e-12 * scale,
    ))
}

/// Outcome of the comparison with the sine-cone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Phase with `l(t_start) = 5 cot t₀`.
    pub t0: f64,
    /// Smallest and largest `5 cot(t − t_start + t₀) − l(t)` after the start.
    pub l_slack: [f64; 2],
    /// Smallest and largest `1 − V(t) sin⁵t₀ / (V(t_start) sin⁵(t − t_start + t₀))`.
    pub v_slack: [f64; 2],
    /// Latest time the comparison solution allows.
    pub t_limit: f64,
}

const COMPARISON_TOL: f64 = 1e-8;

pub fn comparison_bounds(traj: &Trajectory) -> Result<ComparisonReport> {
    let start = traj.start();
    let (v_start, l_start) = volume_and_mean_curvature(start)?;
    let t0 = 5f64.atan2(l_start);
    let s0 = t0.sin().powi(5);
    let mut l_slack = [f64::INFINITY, f64::NEG_INFINITY];
    let mut v_slack = [f64::INFINITY, f64::NEG_INFINITY];
    for s in &traj.nodes[1..] {
        let tau = s.t - start.t + t0;
        if tau >= std::f64::consts::PI {
            return Err(Error::BoundViolation {
                t: s.t,
                what: "existence time beyond the comparison solution".into(),
            });
        }
        let (v, l) = volume_and_mean_curvature(s)?;
        let lb = 5.0 / tau.tan();
        let dl = lb - l;
        if dl < -COMPARISON_TOL * l.abs().max(1.0) {
            return Err(Error::BoundViolation {
                t: s.t,
                what: format!("l = {l} above 5 cot = {lb}"),
            });
        }
        let dv = 1.0 - v * s0 / (v_start * tau.sin().powi(5));
        if dv < -COMPARISON_TOL {
            return Err(Error::BoundViolation {
                t: s.t,
                what: format!("V = {v} above the comparison volume"),
            });
        }
        l_slack = [l_slack[0].min(dl), l_slack[1].max(dl)];
        v_slack = [v_slack[0].min(dv), v_slack[1].max(dv)];
    }
    Ok(ComparisonReport {
        t0,
        l_slack,
        v_slack,
        t_limit: start.t + std::f64::consts::PI - t0,
    })
}

/// Largest increase of `B` between consecutive samples on which `l ≥ 0`.
pub fn bohm_increase(samples: &[State]) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    let mut prev: Option<BohmValue> = None;
    for s in samples {
        let b = bohm(s)?;
        if let Some(p) = prev {
            if p.l >= 0.0 && b.l >= 0.0 {
                worst = worst.max(b.b - p.b);
            }
        }
        prev = Some(b);
    }
    Ok(worst)
}
