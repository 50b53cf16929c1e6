//! Family solves, curve tracing, doubling and matching.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{count_sign_changes, MaxOrbitRecord, ZERO_COUNT_SAMPLES};
use crate::integrator::{integrate, EventSpec, Termination, Tolerances, Trajectory};
use crate::roots::{brent, nelder_mead};
use crate::series::{series_psi_a, series_psi_b, SeriesSolution};
use crate::state::{rhs, State, Symmetry, Vec7};
use crate::tolerances::{JUNCTION, MATCH_RESIDUAL, ON_BOUNDARY, ROOT_TOL, SERIES_ORDER, VOLUME_S6};

/// The family closing on `S²` (alpha) or on `S³` (beta).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
    Beta,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" | "a" => Ok(Family::Alpha),
            "beta" | "b" => Ok(Family::Beta),
            _ => Err(Error::InvalidArgument(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingOptions {
    pub order: usize,
    pub tol: Tolerances,
    /// Length of the interval integrated past the event to rule out a second one.
    pub guard: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            order: SERIES_ORDER,
            tol: Tolerances::default(),
            guard: 0.1,
        }
    }
}

/// Series, trajectory and maximal volume orbit of one family member.
#[derive(Clone, Debug)]
pub struct FamilyRun {
    pub family: Family,
    pub param: f64,
    pub series: SeriesSolution,
    /// Expansion variable at the handoff to the integrator.
    pub handoff: f64,
    pub trajectory: Trajectory,
    pub record: MaxOrbitRecord,
}

impl FamilyRun {
    pub fn t_handoff(&self) -> f64 {
        self.trajectory.t_start()
    }

    pub fn t_max(&self) -> f64 {
        self.trajectory.t_end()
    }

    /// State on `[0, T]`: the series up to the handoff, the integrator after it.
    pub fn state_at(&self, t: f64) -> Result<State> {
        if t < self.t_handoff() {
            if !(t >= 0.0) {
                return Err(Error::OutOfSpan {
                    t,
                    lo: 0.0,
                    hi: self.t_max(),
                });
            }
            let mut s = self.series.evaluate(self.series.variable_at(t)).0;
            s.t = t;
            return Ok(s);
        }
        self.trajectory.state_at(t)
    }

    /// `∫₀ᵀ V dt`.
    pub fn volume(&self) -> f64 {
        self.series.volume_to(self.handoff) + self.trajectory.quadrature(State::volume)
    }

    /// Zeros of `v₀` on `(0, T)`.
    pub fn v0_zero_count(&self) -> Result<usize> {
        self.zero_count(|s| s.v[0])
    }

    /// Zeros of `u₀` on `(0, T)`.
    pub fn u0_zero_count(&self) -> Result<usize> {
        self.zero_count(|s| s.u[0])
    }

    fn zero_count(&self, f: impl Fn(&State) -> f64) -> Result<usize> {
        let end = self.trajectory.end();
        if f(end).abs() / end.mu() < ON_BOUNDARY {
            return Err(Error::BoundaryAmbiguous(format!(
                "component vanishes at the maximal volume orbit T = {} ({} {})",
                end.t, self.family, self.param
            )));
        }
        let n = 4 * ZERO_COUNT_SAMPLES;
        let mut values: Vec<f64> = (1..n)
            .map(|k| f(&self.series.evaluate(self.handoff * k as f64 / n as f64).0))
            .collect();
        values.extend(
            self.trajectory
                .dense_samples(ZERO_COUNT_SAMPLES)
                .iter()
                .map(&f),
        );
        let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Ok(count_sign_changes(values, 1e-12 * scale))
    }
}

pub fn family_series(family: Family, param: f64, order: usize) -> Result<SeriesSolution> {
    match family {
        Family::Alpha => series_psi_a(param, order),
        Family::Beta => series_psi_b(param, order),
    }
}

fn check_guard(family: Family, param: f64, end: &State, opts: &ShootingOptions) -> Result<()> {
    if opts.guard <= 0.0 {
        return Ok(());
    }
    let traj = match integrate(
        end,
        end.t + opts.guard,
        &[EventSpec::max_volume(false)],
        opts.tol,
    ) {
        Ok(t) => t,
        Err(
            Error::ConstraintDrift { .. } | Error::StepCollapse { .. } | Error::Degenerate { .. },
        ) => return Ok(()),
        Err(e) => return Err(e),
    };
    let eps = 1e-9 * end.t.max(1.0);
    if let Some(ev) = traj.events.iter().find(|e| e.t > end.t + eps) {
        return Err(Error::SecondEvent {
            family: family.to_string(),
            param,
            t: ev.t,
        });
    }
    Ok(())
}

/// Series handoff, integration to the maximal volume orbit and the guard check.
pub fn run_family(family: Family, param: f64, opts: &ShootingOptions) -> Result<FamilyRun> {
    let series = family_series(family, param, opts.order)?;
    let (handoff, start) = series.handoff()?;
    let trajectory = integrate(
        &start,
        start.t + PI,
        &[EventSpec::max_volume(true)],
        opts.tol,
    )?;
    if trajectory.termination != Termination::Event {
        return Err(Error::NoEvent {
            family: family.to_string(),
            param,
            reason: match trajectory.termination {
                Termination::Singularity => format!("a singularity at t = {}", trajectory.t_end()),
                _ => format!("the horizon t = {}", trajectory.t_end()),
            },
        });
    }
    let end = *trajectory.end();
    check_guard(family, param, &end, opts)?;
    let record = MaxOrbitRecord::new(family, param, end)?;
    Ok(FamilyRun {
        family,
        param,
        series,
        handoff,
        trajectory,
        record,
    })
}

pub fn max_orbit(family: Family, param: f64) -> Result<MaxOrbitRecord> {
    max_orbit_with(family, param, &ShootingOptions::default())
}

pub fn max_orbit_with(
    family: Family,
    param: f64,
    opts: &ShootingOptions,
) -> Result<MaxOrbitRecord> {
    if !(param > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "family parameter must be positive, got {param}"
        )));
    }
    run_family(family, param, opts).map(|r| r.record)
}

/// Maximal volume orbits along a parameter grid.
#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub family: Family,
    pub samples: Vec<MaxOrbitRecord>,
}

impl Curve {
    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|r| r.param).collect()
    }

    pub fn h_points(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(MaxOrbitRecord::h_point).collect()
    }

    /// Crossings between non-adjacent segments of the H polyline.
    pub fn self_intersections(&self) -> usize {
        let p = self.h_points();
        let mut n = 0;
        for i in 0..p.len().saturating_sub(1) {
            for j in i + 2..p.len().saturating_sub(1) {
                if segment_intersection(p[i], p[i + 1], p[j], p[j + 1]).is_some() {
                    n += 1;
                }
            }
        }
        n
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn h_distance(p: &MaxOrbitRecord, q: &MaxOrbitRecord) -> f64 {
    let (a, b) = (p.h_point(), q.h_point());
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Samples maximal volume orbits on a log grid, bisecting (geometrically)
/// wherever consecutive H-points are farther apart than `spacing`.
pub fn trace_curve(
    family: Family,
    lo: f64,
    hi: f64,
    n: usize,
    spacing: Option<f64>,
    opts: &ShootingOptions,
) -> Result<Curve> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "parameter range [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a curve needs at least two samples".into(),
        ));
    }
    let mut samples: Vec<MaxOrbitRecord> = log_grid(lo, hi, n)
        .par_iter()
        .map(|p| max_orbit_with(family, *p, opts))
        .collect::<Result<_>>()?;
    if let Some(cap) = spacing {
        for _ in 0..8 {
            if samples.len() >= 8 * n {
                break;
            }
            let mids: Vec<f64> = samples
                .windows(2)
                .filter(|w| h_distance(&w[0], &w[1]) > cap)
                .map(|w| (w[0].param * w[1].param).sqrt())
                .collect();
            if mids.is_empty() {
                break;
            }
            let extra: Vec<MaxOrbitRecord> = mids
                .par_iter()
                .map(|p| max_orbit_with(family, *p, opts))
                .collect::<Result<_>>()?;
            samples.extend(extra);
            samples.sort_by(|a, b| a.param.total_cmp(&b.param));
        }
    }
    Ok(Curve { family, samples })
}

/// Intersection parameters `(s, t) ∈ [0,1]²` of segments `pq` and `rs`.
pub fn segment_intersection(
    p: [f64; 2],
    q: [f64; 2],
    r: [f64; 2],
    s: [f64; 2],
) -> Option<(f64, f64)> {
    let d1 = [q[0] - p[0], q[1] - p[1]];
    let d2 = [s[0] - r[0], s[1] - r[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den == 0.0 {
        return None;
    }
    let e = [r[0] - p[0], r[1] - p[1]];
    let a = (e[0] * d2[1] - e[1] * d2[0]) / den;
    let b = (e[0] * d1[1] - e[1] * d1[0]) / den;
    ((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)).then_some((a, b))
}

/// Which component of the state at `T` must vanish for a doubling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `v₀(T) = 0`: the boundary `λ = μ` of the wedge.
    V0,
    /// `u₀(T) = 0`: the boundary `λ = 1` of the wedge.
    U0,
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v0" => Ok(Boundary::V0),
            "u0" => Ok(Boundary::U0),
            _ => Err(Error::InvalidArgument(format!(
                "unknown boundary `{s}` (expected v0 or u0)"
            ))),
        }
    }
}

impl Boundary {
    fn value(self, r: &MaxOrbitRecord) -> f64 {
        match self {
            Boundary::V0 => r.state.v[0] / r.mu,
            Boundary::U0 => r.state.u[0] / r.mu,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Doubling,
    Matching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Manifold {
    S6,
    S3xS3,
    CP3,
    S2xS4,
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::S6 => "S6",
            Manifold::S3xS3 => "S3xS3",
            Manifold::CP3 => "CP3",
            Manifold::S2xS4 => "S2xS4",
        })
    }
}

/// Word fixing the `λ = 1` boundary: `(λ, −u₀, −u₁, u₂, v₀, v₁, −v₂)`, time reversed.
pub fn word_lambda_one() -> Symmetry {
    Symmetry::from_word(&[1, 2, 3]).expect("valid word")
}

/// Word fixing the `λ = μ` boundary: `(λ, u₀, −u₁, u₂, −v₀, v₁, −v₂)`, time reversed.
pub fn word_lambda_mu() -> Symmetry {
    Symmetry::from_word(&[1, 4]).expect("valid word")
}

/// Closed manifold obtained from the pair of singular orbits and the gluing word.
pub fn classify(left: Family, right: Family, word: &Symmetry) -> Manifold {
    match (left, right) {
        (Family::Beta, Family::Beta) => Manifold::S3xS3,
        (Family::Alpha, Family::Alpha) if *word == word_lambda_mu() => Manifold::CP3,
        (Family::Alpha, Family::Alpha) => Manifold::S2xS4,
        _ => Manifold::S6,
    }
}

/// Summary record of a complete solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompleteSolution {
    #[serde(rename = "type")]
    pub kind: Construction,
    pub family_left: Family,
    pub param_left: f64,
    pub family_right: Family,
    pub param_right: f64,
    pub symmetry: String,
    pub manifold: Manifold,
    #[serde(rename = "T_total")]
    pub t_total: f64,
    #[serde(rename = "Vmax")]
    pub vmax: f64,
    pub vol: f64,
}

/// Two family members glued across their common maximal volume orbit.
#[derive(Clone, Debug)]
pub struct GluedSolution {
    pub kind: Construction,
    pub left: FamilyRun,
    pub right: FamilyRun,
    pub word: Symmetry,
    /// Largest component difference at the junction.
    pub junction_gap: f64,
    /// Largest difference of the one-sided time derivatives at the junction.
    pub derivative_gap: f64,
}

fn right_image(word: &Symmetry, s: &State) -> Vec7 {
    let signs = word.signs();
    let y = s.to_array();
    std::array::from_fn(|k| signs[k] * y[k])
}

fn max_diff(a: &Vec7, b: &Vec7) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Glues `right`, time reversed and transformed by a time-reversing word, after `left`.
///
/// With `word = None` the word whose image matches at the junction is chosen.
pub fn glue(
    left: FamilyRun,
    right: FamilyRun,
    word: Option<Symmetry>,
    kind: Construction,
) -> Result<GluedSolution> {
    let a = left.trajectory.end().to_array();
    let b = right.trajectory.end();
    let candidates = match word {
        Some(w) => {
            if !w.reverses_time() || w.signs()[0] < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "gluing word {w} must reverse time and preserve lambda"
                )));
            }
            vec![w]
        }
        None => vec![word_lambda_one(), word_lambda_mu()],
    };
    let (word, gap) = candidates
        .into_iter()
        .map(|w| {
            let g = max_diff(&a, &right_image(&w, b));
            (w, g)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("at least one word");
    if !(gap < JUNCTION) {
        return Err(Error::JunctionMismatch { gap });
    }
    let dl = rhs(left.trajectory.end())?;
    let dr = right_image(&word, &State::from_array(0.0, &rhs(b)?));
    let dr: Vec7 = std::array::from_fn(|k| -dr[k]);
    let derivative_gap = max_diff(&dl, &dr);
    Ok(GluedSolution {
        kind,
        left,
        right,
        word,
        junction_gap: gap,
        derivative_gap,
    })
}

impl GluedSolution {
    pub fn t_total(&self) -> f64 {
        self.left.t_max() + self.right.t_max()
    }

    pub fn state_at(&self, t: f64) -> Result<State> {
        let t1 = self.left.t_max();
        if t <= t1 {
            return self.left.state_at(t);
        }
        let total = self.t_total();
        if t > total {
            return Err(Error::OutOfSpan {
                t,
                lo: 0.0,
                hi: total,
            });
        }
        let s = self.right.state_at(total - t)?;
        Ok(State::from_array(t, &right_image(&self.word, &s)))
    }

    /// Profile on `[0, T₁ + T₂]` at `n` equally spaced times.
    pub fn profile(&self, n: usize) -> Result<Vec<State>> {
        let total = self.t_total();
        (0..n)
            .map(|k| self.state_at(total * k as f64 / (n.max(2) - 1) as f64))
            .collect()
    }

    /// Total volume divided by that of the round six-sphere.
    pub fn normalized_volume(&self) -> f64 {
        (self.left.volume() + self.right.volume()) / VOLUME_S6
    }

    pub fn vmax(&self) -> f64 {
        self.left.record.vmax
    }

    pub fn manifold(&self) -> Manifold {
        classify(self.left.family, self.right.family, &self.word)
    }

    pub fn summary(&self) -> CompleteSolution {
        CompleteSolution {
            kind: self.kind,
            family_left: self.left.family,
            param_left: self.left.param,
            family_right: self.right.family,
            param_right: self.right.param,
            symmetry: self.word.to_string(),
            manifold: self.manifold(),
            t_total: self.t_total(),
            vmax: self.vmax(),
            vol: self.normalized_volume(),
        }
    }
}

/// Root of `v₀(T)` or `u₀(T)` in the parameter, doubled across its maximal volume orbit.
pub fn find_doubling(
    family: Family,
    bracket: (f64, f64),
    which: Boundary,
    opts: &ShootingOptions,
) -> Result<GluedSolution> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "bracket [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    let g = |p: f64| {
        max_orbit_with(family, p, opts)
            .map(|r| which.value(&r))
            .unwrap_or(f64::NAN)
    };
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo * ghi <= 0.0) {
        return Err(Error::NoSignChange {
            what: format!("{which:?} at the maximal volume orbit of {family}").to_lowercase(),
            lo,
            hi,
        });
    }
    let p = brent(g, lo, hi, ROOT_TOL)?;
    let run = run_family(family, p, opts)?;
    let r = &run.record;
    if (r.lambda - 1.0).abs() < 1e-4 && (r.mu - 1.0).abs() < 1e-4 {
        return Err(Error::BoundaryAmbiguous(format!(
            "root {p} lies at the Sasaki-Einstein point (lambda, mu) = ({}, {})",
            r.lambda, r.mu
        )));
    }
    let word = match which {
        Boundary::V0 => word_lambda_mu(),
        Boundary::U0 => word_lambda_one(),
    };
    glue(run.clone(), run, Some(word), Construction::Doubling)
}

/// Reflection of the `(w₁, w₂)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reflection {
    /// `(w₁, w₂) ↦ (−w₁, w₂)`.
    W1,
    /// `(w₁, w₂) ↦ (w₁, −w₂)`.
    W2,
    /// `(w₁, w₂) ↦ (−w₁, −w₂)`.
    Origin,
}

impl Reflection {
    pub fn apply(self, p: [f64; 2]) -> [f64; 2] {
        match self {
            Reflection::W1 => [-p[0], p[1]],
            Reflection::W2 => [p[0], -p[1]],
            Reflection::Origin => [-p[0], -p[1]],
        }
    }
}

/// Reflections tried by [`find_matching`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReflectionSet {
    W1,
    W2,
    Both,
}

impl ReflectionSet {
    pub fn members(self) -> Vec<Reflection> {
        match self {
            ReflectionSet::W1 => vec![Reflection::W1],
            ReflectionSet::W2 => vec![Reflection::W2],
            ReflectionSet::Both => vec![Reflection::W1, Reflection::W2],
        }
    }
}

impl FromStr for ReflectionSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w1" => Ok(ReflectionSet::W1),
            "w2" => Ok(ReflectionSet::W2),
            "both" => Ok(ReflectionSet::Both),
            _ => Err(Error::InvalidArgument(format!("unknown reflection `{s}`"))),
        }
    }
}

/// A crossing of the alpha polyline with a reflected beta polyline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub reflection: Reflection,
    pub a: f64,
    pub b: f64,
}

/// Polyline crossings between `alpha` and the image of `beta` under `r`.
pub fn crossings(alpha: &Curve, beta: &Curve, r: Reflection) -> Vec<Crossing> {
    let p = alpha.h_points();
    let q: Vec<[f64; 2]> = beta.h_points().into_iter().map(|x| r.apply(x)).collect();
    let (pa, pb) = (alpha.params(), beta.params());
    let mut out = Vec::new();
    for i in 0..p.len().saturating_sub(1) {
        for j in 0..q.len().saturating_sub(1) {
            if let Some((s, t)) = segment_intersection(p[i], p[i + 1], q[j], q[j + 1]) {
                let a = (pa[i].ln() + s * (pa[i + 1].ln() - pa[i].ln())).exp();
                let b = (pb[j].ln() + t * (pb[j + 1].ln() - pb[j].ln())).exp();
                out.push(Crossing {
                    reflection: r,
                    a,
                    b,
                });
            }
        }
    }
    out
}

/// Result of [`find_matching`].
#[derive(Clone, Debug)]
pub struct Matching {
    pub solution: GluedSolution,
    pub crossing: Crossing,
    /// `|α_H(a) − R β_H(b)|` after refinement.
    pub residual: f64,
    /// Crossings with the point reflection, expected to be absent.
    pub origin_crossings: usize,
    pub evaluations: usize,
}

fn h_mismatch(a: f64, b: f64, r: Reflection, opts: &ShootingOptions) -> f64 {
    if !(a > 0.0 && b > 0.0) {
        return f64::INFINITY;
    }
    match (
        max_orbit_with(Family::Alpha, a, opts),
        max_orbit_with(Family::Beta, b, opts),
    ) {
        (Ok(p), Ok(q)) => {
            let (x, y) = (p.h_point(), r.apply(q.h_point()));
            (x[0] - y[0]).hypot(x[1] - y[1])
        }
        _ => f64::INFINITY,
    }
}

/// Refines a crossing to `|α_H(a) − R β_H(b)| < MATCH_RESIDUAL`.
pub fn refine_crossing(c: Crossing, opts: &ShootingOptions) -> Result<(f64, f64, f64, usize)> {
    let f = |x: [f64; 2]| h_mismatch(x[0], x[1], c.reflection, opts).powi(2);
    let mut x = [c.a, c.b];
    let mut step = [0.01 * c.a, 0.01 * c.b];
    let mut evals = 0;
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let m = nelder_mead(f, x, step, (0.01 * MATCH_RESIDUAL).powi(2), 1e-15, 600);
        evals += m.evaluations;
        x = m.x;
        best = m.f.sqrt();
        if best < 0.01 * MATCH_RESIDUAL {
            break;
        }
        step = [step[0] * 0.05, step[1] * 0.05];
    }
    if !(best < MATCH_RESIDUAL) {
        return Err(Error::RefinementStall { residual: best });
    }
    Ok((x[0], x[1], best, evals))
}

/// Traces both curves over the given ranges, finds the polyline crossing of
/// the alpha curve with the reflected beta curve and refines it.
pub fn find_matching(
    alpha_range: (f64, f64),
    beta_range: (f64, f64),
    reflections: ReflectionSet,
    samples: usize,
    opts: &ShootingOptions,
) -> Result<Matching> {
    let alpha = trace_curve(
        Family::Alpha,
        alpha_range.0,
        alpha_range.1,
        samples,
        Some(0.02),
        opts,
    )?;
    let beta = trace_curve(
        Family::Beta,
        beta_range.0,
        beta_range.1,
        samples,
        Some(0.02),
        opts,
    )?;
    match_curves(&alpha, &beta, reflections, opts)
}

/// Matching on already traced curves.
pub fn match_curves(
    alpha: &Curve,
    beta: &Curve,
    reflections: ReflectionSet,
    opts: &ShootingOptions,
) -> Result<Matching> {
    let found: Vec<Crossing> = reflections
        .members()
        .into_iter()
        .flat_map(|r| crossings(alpha, beta, r))
        .collect();
    let origin_crossings = crossings(alpha, beta, Reflection::Origin).len();
    let (mid_a, mid_b) = (geometric_mid(alpha), geometric_mid(beta));
    let crossing = found
        .into_iter()
        .min_by(|x, y| {
            let dx = (x.a / mid_a).ln().abs() + (x.b / mid_b).ln().abs();
            let dy = (y.a / mid_a).ln().abs() + (y.b / mid_b).ln().abs();
            dx.total_cmp(&dy)
        })
        .ok_or(Error::NoCrossing)?;
    let (a, b, residual, evaluations) = refine_crossing(crossing, opts)?;
    let left = run_family(Family::Alpha, a, opts)?;
    let right = run_family(Family::Beta, b, opts)?;
    let dw = (left.record.lambda - right.record.lambda)
        .abs()
        .max((left.record.mu - right.record.mu).abs());
    if !(dw < JUNCTION) {
        return Err(Error::JunctionMismatch { gap: dw });
    }
    let solution = glue(left, right, None, Construction::Matching)?;
    Ok(Matching {
        solution,
        crossing,
        residual,
        origin_crossings,
        evaluations,
    })
}

fn geometric_mid(c: &Curve) -> f64 {
    let p = c.params();
    (p[0] * p[p.len() - 1]).sqrt()
}

/// Named complete solutions reachable by the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    S3xS3Exotic,
    S6Exotic,
    Cp3,
    S3S3Homog,
    S6Homog,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::S3xS3Exotic,
        Target::S6Exotic,
        Target::Cp3,
        Target::S3S3Homog,
        Target::S6Homog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::S3xS3Exotic => "s3xs3-exotic",
            Target::S6Exotic => "s6-exotic",
            Target::Cp3 => "cp3",
            Target::S3S3Homog => "s3s3-homog",
            Target::S6Homog => "s6-homog",
        }
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target `{s}`")))
    }
}

/// Default samples per curve for matching solves.
pub const MATCH_SAMPLES: usize = 24;

pub fn solve_target(target: Target, opts: &ShootingOptions) -> Result<GluedSolution> {
    match target {
        Target::S3xS3Exotic => find_doubling(Family::Beta, (0.2, 0.6), Boundary::V0, opts),
        Target::Cp3 => find_doubling(Family::Alpha, (0.7, 1.0), Boundary::V0, opts),
        Target::S3S3Homog => find_doubling(Family::Beta, (0.9, 1.1), Boundary::U0, opts),
        Target::S6Exotic => find_matching(
            (0.45, 0.7),
            (0.45, 0.75),
            ReflectionSet::Both,
            MATCH_SAMPLES,
            opts,
        )
        .map(|m| m.solution),
        Target::S6Homog => find_matching(
            (1.5, 2.0),
            (1.3, 1.7),
            ReflectionSet::Both,
            MATCH_SAMPLES,
            opts,
        )
        .map(|m| m.solution),
    }
}

/// One row of the table of complete solutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table2Row {
    pub name: String,
    pub manifold: String,
    pub o1: String,
    pub o2: String,
    pub param_left: Option<f64>,
    pub param_right: Option<f64>,
    #[serde(rename = "Vmax")]
    pub vmax: f64,
    pub vol: f64,
}

fn orbit_label(f: Family, p: f64) -> String {
    match f {
        Family::Alpha => format!("a = {p:.4}"),
        Family::Beta => format!("b = {p:.4}"),
    }
}

/// Sine-cone row followed by the five solver rows, in the order sine-cone,
/// exotic S³×S³, exotic S⁶, CP³, homogeneous S³×S³, round S⁶.
pub fn table2(opts: &ShootingOptions) -> Result<Vec<Table2Row>> {
    use crate::closed_forms::NamedSolution;
    let order = [
        Target::S3xS3Exotic,
        Target::S6Exotic,
        Target::Cp3,
        Target::S3S3Homog,
        Target::S6Homog,
    ];
    let solved: Vec<GluedSolution> = order
        .par_iter()
        .map(|t| solve_target(*t, opts))
        .collect::<Result<_>>()?;
    let sc = NamedSolution::SineCone;
    let mut rows = vec![Table2Row {
        name: "sine-cone".into(),
        manifold: "sine-cone".into(),
        o1: "0".into(),
        o2: "0".into(),
        param_left: None,
        param_right: None,
        vmax: sc.max_volume(),
        vol: sc.total_volume() / VOLUME_S6,
    }];
    for (t, g) in order.iter().zip(&solved) {
        let s = g.summary();
        rows.push(Table2Row {
            name: t.name().into(),
            manifold: s.manifold.to_string(),
            o1: orbit_label(s.family_left, s.param_left),
            o2: orbit_label(s.family_right, s.param_right),
            param_left: Some(s.param_left),
            param_right: Some(s.param_right),
            vmax: s.vmax,
            vol: s.vol,
        });
    }
    Ok(rows)
}

/// Scan of the alpha curve for the `λ = 1`, `μ > 1` boundary.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryScan {
    pub family: Family,
    pub range: (f64, f64),
    pub samples: usize,
    /// `(a, u₀(T)/μ, λ, μ)` per sample.
    pub values: Vec<(f64, f64, f64, f64)>,
    /// Refined roots of `u₀(T)` with `(a, λ, μ)`.
    pub roots: Vec<(f64, f64, f64)>,
    pub min_abs_u0: f64,
}

impl BoundaryScan {
    /// Roots on the `λ = 1`, `μ > 1` edge.
    pub fn s2xs4_roots(&self) -> Vec<(f64, f64, f64)> {
        self.roots
            .iter()
            .copied()
            .filter(|r| (r.1 - 1.0).abs() < 1e-6 && r.2 > 1.0 + 1e-6)
            .collect()
    }
}

pub fn scan_s2xs4(
    lo: f64,
    hi: f64,
    samples: usize,
    opts: &ShootingOptions,
) -> Result<BoundaryScan> {
    let curve = trace_curve(Family::Alpha, lo, hi, samples, None, opts)?;
    let values: Vec<(f64, f64, f64, f64)> = curve
        .samples
        .iter()
        .map(|r| (r.param, r.state.u[0] / r.mu, r.lambda, r.mu))
        .collect();
    let mut roots = Vec::new();
    for w in values.windows(2) {
        if w[0].1 * w[1].1 <= 0.0 {
            let g = |p: f64| {
                max_orbit_with(Family::Alpha, p, opts)
                    .map(|r| r.state.u[0] / r.mu)
                    .unwrap_or(f64::NAN)
            };
            let p = brent(g, w[0].0, w[1].0, ROOT_TOL)?;
            let r = max_orbit_with(Family::Alpha, p, opts)?;
            roots.push((p, r.lambda, r.mu));
        }
    }
    let min_abs_u0 = values.iter().fold(f64::INFINITY, |m, v| m.min(v.1.abs()));
    Ok(BoundaryScan {
        family: Family::Alpha,
        range: (lo, hi),
        samples,
        values,
        roots,
        min_abs_u0,
    })
}

/// Sup-distance between a family member blown up by its own parameter and
/// the Calabi–Yau limit, over a window of the matching coordinate: `s` for
/// beta (smoothing) and `r = √ũ₁` for alpha (small resolution). Compares
/// `λ, μ, u₀, u₁, v₀, v₁, v₂`, each relative to `max(1, |reference|)`.
pub fn bubble_distance(
    family: Family,
    eps: f64,
    window: (f64, f64),
    samples: usize,
    opts: &ShootingOptions,
) -> Result<f64> {
    use crate::closed_forms::{rescale_bubble, CalabiYau, RescaleDirection, RescaleScheme};
    use crate::quad;
    use crate::tolerances::QUAD_TOL;

    if !(window.0 < window.1) || samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "bad comparison window {window:?}"
        )));
    }
    let run = run_family(family, eps, opts)?;
    let inv_lambda = |t: f64| run.state_at(t).map(|s| 1.0 / s.lambda).unwrap_or(f64::NAN);
    let t_h = run.t_handoff();
    let (t_end, grid_n) = (run.t_max(), 400);
    let times: Vec<f64> = (1..=grid_n)
        .map(|k| t_end * k as f64 / grid_n as f64)
        .collect();
    // Matching coordinate on the grid, cumulative beyond the handoff.
    let mut coord = Vec::with_capacity(grid_n);
    let mut acc = (t_h, run.handoff);
    for &t in &times {
        let c = match family {
            Family::Alpha => (run.state_at(t)?.u[1]).sqrt() / eps,
            Family::Beta if t <= t_h => run.series.variable_at(t),
            Family::Beta => {
                acc.1 += quad::integrate(inv_lambda, acc.0, t, QUAD_TOL);
                acc.0 = t;
                acc.1
            }
        };
        coord.push(c);
    }
    let coord_at = |t: f64, k: usize| -> f64 {
        match family {
            Family::Alpha => run
                .state_at(t)
                .map(|s| s.u[1].sqrt() / eps)
                .unwrap_or(f64::NAN),
            Family::Beta if t <= t_h => run.series.variable_at(t),
            Family::Beta => {
                let (t0, c0) = if k > 0 && times[k - 1] >= t_h {
                    (times[k - 1], coord[k - 1])
                } else {
                    (t_h, run.handoff)
                };
                c0 + quad::integrate(inv_lambda, t0, t, QUAD_TOL)
            }
        }
    };
    let limit = match family {
        Family::Alpha => CalabiYau::SmallResolution,
        Family::Beta => CalabiYau::Smoothing,
    };
    let mut worst = 0.0_f64;
    for j in 0..samples {
        let c = window.0 + (window.1 - window.0) * j as f64 / (samples - 1) as f64;
        let k = coord.iter().position(|&x| x >= c).ok_or(Error::OutOfSpan {
            t: c,
            lo: coord[0],
            hi: coord[grid_n - 1],
        })?;
        let lo = if k == 0 { 0.0 } else { times[k - 1] };
        let t = if k == 0 && c < coord[0] {
            brent(|t| coord_at(t, 0) - c, 1e-12, times[0], ROOT_TOL)?
        } else {
            brent(|t| coord_at(t, k) - c, lo, times[k], ROOT_TOL)?
        };
        let b = rescale_bubble(
            &run.state_at(t)?,
            eps,
            RescaleDirection::Blowup,
            RescaleScheme::Bubble,
        )?;
        let cy = limit.eval(c)?;
        let pairs = [
            (b.lambda, cy.lambda),
            (b.mu(), cy.mu),
            (b.u[0], cy.u[0]),
            (b.u[1], cy.u[1]),
            (b.v[0], cy.v[0]),
            (b.v[1], cy.v[1]),
            (b.v[2], cy.v[2]),
        ];
        for (x, y) in pairs {
            worst = worst.max((x - y).abs() / y.abs().max(1.0));
        }
    }
    Ok(worst)
}
