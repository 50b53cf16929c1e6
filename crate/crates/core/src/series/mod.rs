//! Formal power series solutions of singular initial value problems
//! `t·ẏ = M₋₁(y) + t·M(t, y)`, `y(0) = y₀`.
//!
//! Coefficients are fixed order by order: with `y` known through order
//! `h − 1`, the coefficient of `t^h` in the right-hand side equals
//! `dM₋₁(y₀)·y_h` plus data already known, so
//! `(h·Id − dM₋₁(y₀)) y_h = [M₋₁(y) + t·M(t, y)]_h |_{y_h = 0}`.
//! The right-hand side is evaluated in truncated power series arithmetic.

mod families;

pub use families::{Family, S2Bubble, S2Family, S2Large, S3Bubble};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{horner, Series};
use crate::state::State;
use crate::tolerances::{HANDOFF_TAIL, MAX_CONDITION, SERIES_ORDER};

/// A singular system `t·ẏ = F(t, y)` with `F(t, y) = M₋₁(y) + t·M(t, y)`.
pub trait SingularIvp {
    fn dim(&self) -> usize;

    /// The point `y₀` with `M₋₁(y₀) = 0`.
    fn initial(&self) -> Vec<f64>;

    /// `F(t, y)` on truncated power series.
    fn rhs(&self, t: &Series, y: &[Series]) -> Vec<Series>;

    fn m_minus1(&self, y: &[f64]) -> Vec<f64> {
        let t = Series::constant(0.0, 0);
        let ys: Vec<Series> = y.iter().map(|v| Series::constant(*v, 0)).collect();
        self.rhs(&t, &ys).iter().map(Series::value).collect()
    }

    /// `M(t, y)` for `t ≠ 0`.
    fn m(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let ts = Series::constant(t, 0);
        let ys: Vec<Series> = y.iter().map(|v| Series::constant(*v, 0)).collect();
        let full = self.rhs(&ts, &ys);
        let sing = self.m_minus1(y);
        full.iter()
            .zip(sing)
            .map(|(f, s)| (f.value() - s) / t)
            .collect()
    }

    /// `dM₋₁` at `y` by forward differentiation.
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let k = self.dim();
        let t = Series::constant(0.0, 1);
        let mut j = DMatrix::zeros(k, k);
        for col in 0..k {
            let ys: Vec<Series> = y
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if i == col {
                        Series::variable(*v, 1)
                    } else {
                        Series::constant(*v, 1)
                    }
                })
                .collect();
            for (row, f) in self.rhs(&t, &ys).iter().enumerate() {
                j[(row, col)] = f.coeff(1);
            }
        }
        j
    }
}

/// `det(h·Id − dM₋₁(y₀))`.
pub fn resonance_determinant<P: SingularIvp + ?Sized>(p: &P, h: f64) -> f64 {
    let k = p.dim();
    let m = DMatrix::identity(k, k) * h - p.jacobian(&p.initial());
    m.determinant()
}

/// Coefficient table `y[i][h]`, `h = 0..=order`.
pub fn solve_singular_ivp<P: SingularIvp + ?Sized>(p: &P, order: usize) -> Result<Vec<Vec<f64>>> {
    let k = p.dim();
    let y0 = p.initial();
    let scale = y0.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let residual = p.m_minus1(&y0).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if residual > 1e-14 * scale * scale {
        return Err(Error::Inconsistent { residual });
    }
    let jac = p.jacobian(&y0);
    let mut coeffs: Vec<Vec<f64>> = y0
        .iter()
        .map(|v| {
            let mut c = vec![0.0; order + 1];
            c[0] = *v;
            c
        })
        .collect();
    for h in 1..=order {
        let t = Series::variable(0.0, h);
        let ys: Vec<Series> = coeffs
            .iter()
            .map(|c| Series::from_coeffs(c[..=h].to_vec()))
            .collect();
        let f = p.rhs(&t, &ys);
        let b = DVector::from_iterator(k, f.iter().map(|s| s.coeff(h)));
        let a = DMatrix::identity(k, k) * h as f64 - &jac;
        let sv = a.clone().singular_values();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            sv.max() / smin
        } else {
            f64::INFINITY
        };
        if !(condition < MAX_CONDITION) {
            return Err(Error::Resonance {
                order: h,
                condition,
            });
        }
        let x = a.lu().solve(&b).ok_or(Error::Resonance {
            order: h,
            condition,
        })?;
        for i in 0..k {
            coeffs[i][h] = x[i];
        }
    }
    Ok(coeffs)
}

/// Coefficient of `t^h` in `F(t, y) − t·ẏ` for a computed table.
pub fn recurrence_residuals<P: SingularIvp + ?Sized>(p: &P, coeffs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let order = coeffs[0].len() - 1;
    let t = Series::variable(0.0, order);
    let ys: Vec<Series> = coeffs
        .iter()
        .map(|c| Series::from_coeffs(c.clone()))
        .collect();
    let f = p.rhs(&t, &ys);
    f.iter()
        .zip(coeffs)
        .map(|(fi, ci)| {
            (0..=order)
                .map(|h| fi.coeff(h) - h as f64 * ci[h])
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variable {
    /// Geodesic time.
    T,
    /// `s` with `ds/dt = 1/λ`.
    S,
}

/// Truncated Taylor expansion of a family member about its singular orbit.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub family: Family,
    pub param: f64,
    pub variable: Variable,
    pub order: usize,
    /// State components `(λ, u₀, u₁, u₂, v₀, v₁, v₂)` in the expansion variable.
    pub components: [Vec<f64>; 7],
    /// Time as a series in `s` (present when the variable is `s`).
    pub time: Option<Vec<f64>>,
    /// Coefficients of the regularised unknowns `y₁ … y₇`.
    pub raw: Vec<Vec<f64>>,
}

const COMPONENT_NAMES: [&str; 7] = ["lambda", "u0", "u1", "u2", "v0", "v1", "v2"];

impl SeriesSolution {
    pub fn component_names() -> [&'static str; 7] {
        COMPONENT_NAMES
    }

    /// Largest recurrence residual over the regularised coefficient table,
    /// each entry relative to `max(1, h·|c_h|)`.
    pub fn max_recurrence_residual(&self) -> f64 {
        let p = self.param;
        let r = match self.family {
            Family::S2 => recurrence_residuals(&S2Family { a: p }, &self.raw),
            Family::S3 | Family::S3Bubble => recurrence_residuals(&S3Bubble { eps: p }, &self.raw),
            Family::S2Bubble => recurrence_residuals(&S2Bubble { eps: p }, &self.raw),
            Family::S2Large => recurrence_residuals(&S2Large { eps: 1.0 / p }, &self.raw),
        };
        r.iter()
            .zip(&self.raw)
            .flat_map(|(ri, ci)| {
                ri.iter()
                    .zip(ci)
                    .enumerate()
                    .map(|(h, (e, c))| e.abs() / (h as f64 * c.abs()).max(1.0))
            })
            .fold(0.0_f64, f64::max)
    }

    /// Time at expansion variable `x`.
    pub fn time_at(&self, x: f64) -> f64 {
        match &self.time {
            Some(c) => horner(c, x),
            None => x,
        }
    }

    /// Expansion variable at time `t`.
    pub fn variable_at(&self, t: f64) -> f64 {
        let Some(c) = &self.time else { return t };
        let dc: Vec<f64> = (1..c.len()).map(|k| k as f64 * c[k]).collect();
        let mut x = t / dc[0];
        for _ in 0..60 {
            let dx = (horner(c, x) - t) / horner(&dc, x);
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        x
    }

    /// Horner evaluation without a radius check; returns the tail estimate.
    pub fn evaluate(&self, x: f64) -> (State, f64) {
        let mut y = [0.0; 7];
        let mut tail = 0.0_f64;
        for (k, c) in self.components.iter().enumerate() {
            y[k] = horner(c, x);
            let n = c.len() - 1;
            let est =
                c[n].abs() * x.abs().powi(n as i32) + c[n - 1].abs() * x.abs().powi(n as i32 - 1);
            tail = tail.max(est);
        }
        (State::from_array(self.time_at(x), &y), tail)
    }

    /// Tail bound relative to the size of the state.
    pub fn relative_tail(&self, x: f64) -> f64 {
        let (s, tail) = self.evaluate(x);
        tail / s.max_abs().max(1.0)
    }

    /// Largest expansion variable whose time is at most `0.1·min(1, param)`
    /// and whose relative tail is below the handoff tolerance.
    pub fn handoff(&self) -> Result<(f64, State)> {
        let cap = 0.1 * self.param.min(1.0);
        let mut x = self.variable_at(cap);
        for _ in 0..60 {
            if self.relative_tail(x) < HANDOFF_TAIL {
                return Ok((x, self.evaluate(x).0));
            }
            x *= 0.5;
        }
        Err(Error::OutOfRadius {
            x,
            tail: self.relative_tail(x),
        })
    }

    /// `∫₀ V dt` up to expansion variable `x`.
    pub fn volume_to(&self, x: f64) -> f64 {
        let comp = |k: usize| Series::from_coeffs(self.components[k].clone());
        let lambda = comp(0);
        let (u0, u1, u2) = (comp(1), comp(2), comp(3));
        let mu2 = &(&(&u1 * &u1) + &(&u2 * &u2)) - &(&u0 * &u0);
        let mut v = &lambda * &mu2;
        if let Some(tc) = &self.time {
            let dt = Series::from_coeffs(tc.clone()).derivative();
            v = &v * &dt;
        }
        v.integral().eval(x)
    }

    /// Rows `(component, order, coefficient)`.
    pub fn coefficient_rows(&self) -> Vec<(String, usize, f64)> {
        let mut rows = Vec::new();
        for (k, c) in self.components.iter().enumerate() {
            for (h, v) in c.iter().enumerate() {
                rows.push((COMPONENT_NAMES[k].to_string(), h, *v));
            }
        }
        if let Some(tc) = &self.time {
            for (h, v) in tc.iter().enumerate() {
                rows.push(("t".to_string(), h, *v));
            }
        }
        rows
    }
}

/// Evaluates a series solution, refusing points outside its validated radius.
pub fn eval_series(ss: &SeriesSolution, x: f64) -> Result<(State, f64)> {
    let (s, tail) = ss.evaluate(x);
    if tail / s.max_abs().max(1.0) > HANDOFF_TAIL {
        return Err(Error::OutOfRadius { x, tail });
    }
    Ok((s, tail))
}

fn check_param(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "family parameter must be positive, got {p}"
        )));
    }
    Ok(())
}

/// The family closing on the singular orbit `S²` with `u₀(0) = u₁(0) = a²`.
pub fn series_psi_a(a: f64, order: usize) -> Result<SeriesSolution> {
    check_param(a)?;
    let sys = S2Family { a };
    let raw = solve_singular_ivp(&sys, order)?;
    Ok(families::s2_components(Family::S2, a, a * a, 1.0, raw))
}

/// The family closing on `S³` with `λ(0) = b`, expanded in `s`.
pub fn series_psi_b(b: f64, order: usize) -> Result<SeriesSolution> {
    let bubble = series_psi_b_bubble(b, order)?;
    Ok(families::unrescale_s3(&bubble))
}

/// The rescaled `S³` family in `s`, including the limit `b = 0`.
pub fn series_psi_b_bubble(b: f64, order: usize) -> Result<SeriesSolution> {
    if !(b >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bubble parameter must be nonnegative, got {b}"
        )));
    }
    let sys = S3Bubble { eps: b };
    let raw = solve_singular_ivp(&sys, order)?;
    Ok(families::s3_bubble_components(b, raw))
}

/// The rescaled `S²` family with `ũ₀(0) = ũ₁(0) = 1`, including the limit `a = 0`.
pub fn series_psi_a_bubble(a: f64, order: usize) -> Result<SeriesSolution> {
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bubble parameter must be nonnegative, got {a}"
        )));
    }
    let sys = S2Bubble { eps: a };
    let raw = solve_singular_ivp(&sys, order)?;
    Ok(families::s2_components(Family::S2Bubble, a, 1.0, a, raw))
}

/// The `S²` family rescaled for large `a` (`u₀, u₁, v₀, v₁` divided by `a²`, `u₂, v₂` by `a`).
pub fn series_psi_a_large(a: f64, order: usize) -> Result<SeriesSolution> {
    check_param(a)?;
    let sys = S2Large { eps: 1.0 / a };
    let raw = solve_singular_ivp(&sys, order)?;
    Ok(families::s2_components(Family::S2Large, a, 1.0, 1.0, raw))
}

pub fn default_order() -> usize {
    SERIES_ORDER
}
