//! Exact reference solutions.
//!
//! The four explicit solutions of the fundamental system, the two conical
//! Calabi–Yau structures that model the rescaled families near their
//! singular orbits, the bubble rescalings, and the Legendre solutions of the
//! linearisation about the sine-cone.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Series;
use crate::quad;
use crate::state::{constraints, minkowski, rhs, State, Vec7};
use crate::tolerances::QUAD_TOL;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedSolution {
    SineCone,
    S6Round,
    S3S3Homog,
    Cp3Homog,
}

/// Type of the end of a named solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndKind {
    /// Conical singularity.
    Cone,
    /// Singular orbit `S²` of the `a`-family with the given parameter.
    S2 { a: f64 },
    /// Singular orbit `S³` of the `b`-family with the given parameter.
    S3 { b: f64 },
}

impl NamedSolution {
    pub const ALL: [NamedSolution; 4] = [
        NamedSolution::SineCone,
        NamedSolution::S6Round,
        NamedSolution::S3S3Homog,
        NamedSolution::Cp3Homog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedSolution::SineCone => "sine-cone",
            NamedSolution::S6Round => "s6-round",
            NamedSolution::S3S3Homog => "s3s3-homog",
            NamedSolution::Cp3Homog => "cp3-homog",
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            NamedSolution::SineCone => (0.0, PI),
            NamedSolution::S6Round => (0.0, FRAC_PI_2),
            NamedSolution::S3S3Homog => (0.0, PI / SQRT3),
            NamedSolution::Cp3Homog => (0.0, PI / SQRT_2),
        }
    }

    pub fn ends(self) -> (EndKind, EndKind) {
        match self {
            NamedSolution::SineCone => (EndKind::Cone, EndKind::Cone),
            NamedSolution::S6Round => (EndKind::S3 { b: 1.5 }, EndKind::S2 { a: SQRT3 }),
            NamedSolution::S3S3Homog => (EndKind::S3 { b: 1.0 }, EndKind::S3 { b: 1.0 }),
            NamedSolution::Cp3Homog => (
                EndKind::S2 { a: 0.5 * SQRT3 },
                EndKind::S2 { a: 0.5 * SQRT3 },
            ),
        }
    }

    /// Components as series in time about `t.value()`.
    pub fn eval_jet(self, t: &Series) -> [Series; 7] {
        let n = t.order();
        let k = |v: f64| Series::constant(v, n);
        match self {
            NamedSolution::SineCone => {
                let (s, c) = t.sin_cos();
                let s2 = &s * &s;
                let s3 = &s2 * &s;
                [
                    s.clone(),
                    k(0.0),
                    &s2 * &c,
                    -&s3,
                    k(0.0),
                    &s3 * &s,
                    &s3 * &c,
                ]
            }
            NamedSolution::S6Round => {
                let (s, c) = t.sin_cos();
                let c2 = &c * &c;
                [
                    &c * 1.5,
                    &(&s * &(2.0 - &(&c2 * 5.0))) * -1.5,
                    &(&s * &(1.0 - &(&c2 * 2.0))) * -3.0,
                    &(&s * &c2) * -4.5,
                    &(&c2 * &(4.0 - &(&c2 * 5.0))) * 2.25,
                    &(&(&s * &s) * &c2) * 9.0,
                    &(&c2 * &(&(&c2 * 3.0) - 2.0)) * 2.25,
                ]
            }
            NamedSolution::S3S3Homog => {
                let (s1, c1) = (t * SQRT3).sin_cos();
                let (s2, c2) = (t * (2.0 * SQRT3)).sin_cos();
                let u01 = &s2 / SQRT3;
                [
                    k(1.0),
                    u01.clone(),
                    u01,
                    &s1 * (-2.0 / SQRT3),
                    &c2 * (-2.0 / 3.0),
                    &(1.0 - &c2) * (2.0 / 3.0),
                    &c1 * (2.0 / 3.0),
                ]
            }
            NamedSolution::Cp3Homog => {
                let (s, c) = (t * SQRT_2).sin_cos();
                let s2 = &s * &s;
                [
                    &s * (0.75 * SQRT_2),
                    &(&(&(&c * &c) * 3.0) - 1.0) * 0.375,
                    &c * 0.75,
                    &s2 * -1.125,
                    &(&c * &s2) * 1.125,
                    &s2 * 1.125,
                    &(&c * &s2) * 1.125,
                ]
            }
        }
    }

    fn check(self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfDomain {
                value: t,
                domain: format!("[{lo}, {hi}] for {}", self.name()),
            });
        }
        Ok(())
    }

    pub fn eval(self, t: f64) -> Result<State> {
        self.check(t)?;
        let c = self.eval_jet(&Series::constant(t, 0));
        let y: Vec7 = std::array::from_fn(|k| c[k].value());
        Ok(State::from_array(t, &y))
    }

    /// Exact time derivative.
    pub fn derivative(self, t: f64) -> Result<Vec7> {
        self.check(t)?;
        let c = self.eval_jet(&Series::variable(t, 1));
        Ok(std::array::from_fn(|k| c[k].coeff(1)))
    }

    /// Largest residual of the seven equations in their polynomial form.
    pub fn system_residual(self, t: f64) -> Result<f64> {
        let s = self.eval(t)?;
        let d = self.derivative(t)?;
        Ok(polynomial_residual(&s, &d))
    }

    /// Largest difference between the exact derivative and the vector field.
    pub fn rhs_residual(self, t: f64) -> Result<f64> {
        let s = self.eval(t)?;
        let d = self.derivative(t)?;
        let f = rhs(&s)?;
        Ok((0..7).fold(0.0_f64, |m, k| m.max((f[k] - d[k]).abs())))
    }

    /// `∫ λμ² dt` over the whole domain.
    pub fn total_volume(self) -> f64 {
        let (lo, hi) = self.domain();
        quad::integrate(
            |t| self.eval(t).map(|s| s.volume()).unwrap_or(f64::NAN),
            lo,
            hi,
            QUAD_TOL,
        )
    }

    /// Time of the maximal volume orbit.
    pub fn max_volume_time(self) -> f64 {
        match self {
            NamedSolution::SineCone => FRAC_PI_2,
            NamedSolution::S6Round => (0.6_f64).sqrt().acos(),
            NamedSolution::S3S3Homog => PI / (2.0 * SQRT3),
            NamedSolution::Cp3Homog => PI / (2.0 * SQRT_2),
        }
    }

    /// Exact maximal volume.
    pub fn max_volume(self) -> f64 {
        match self {
            NamedSolution::SineCone => 1.0,
            NamedSolution::S6Round => 81.0 * SQRT3 / (25.0 * 5f64.sqrt()),
            NamedSolution::S3S3Homog => 4.0 / 3.0,
            NamedSolution::Cp3Homog => 27.0 * SQRT_2 / 32.0,
        }
    }
}

/// Largest residuals of a named solution over interior sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub samples: usize,
    /// Polynomial form of the seven equations.
    pub system: f64,
    /// Exact derivative against the solved vector field, relative to `max(1, |ẏ|)`.
    pub rhs: f64,
    pub constraints: f64,
    pub volume: f64,
    pub volume_exact: f64,
}

impl NamedSolution {
    /// Exact total volume.
    pub fn total_volume_exact(self) -> f64 {
        match self {
            NamedSolution::SineCone => 16.0 / 15.0,
            NamedSolution::S6Round => 9.0 / 5.0,
            NamedSolution::S3S3Homog => 2.0 * PI / (3.0 * SQRT3),
            NamedSolution::Cp3Homog => 9.0 / 8.0,
        }
    }

    /// Residuals at `n` midpoints of a uniform partition of the domain.
    pub fn residual_report(self, n: usize) -> Result<ResidualReport> {
        let (lo, hi) = self.domain();
        let mut r = ResidualReport {
            name: self.name().to_string(),
            samples: n,
            system: 0.0,
            rhs: 0.0,
            constraints: 0.0,
            volume: self.total_volume(),
            volume_exact: self.total_volume_exact(),
        };
        for k in 0..n {
            let t = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
            let s = self.eval(t)?;
            let d = self.derivative(t)?;
            r.system = r.system.max(polynomial_residual(&s, &d));
            let f = rhs(&s)?;
            let rel = (0..7).fold(0.0_f64, |m, k| {
                m.max((f[k] - d[k]).abs() / d[k].abs().max(1.0))
            });
            r.rhs = r.rhs.max(rel);
            r.constraints = r.constraints.max(constraints(&s).max_abs());
        }
        Ok(r)
    }
}

impl fmt::Display for NamedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedSolution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NamedSolution::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown named solution `{s}`")))
    }
}

/// Residual of `λu̇₀ + 3v₀ = 0`, …, `λ²|u|²λ̇ + 2λ⁴u₁ + 3u₂v₂ = 0`.
pub fn polynomial_residual(s: &State, d: &Vec7) -> f64 {
    let l = s.lambda;
    let [u0, u1, u2] = s.u;
    let [v0, v1, v2] = s.v;
    let mu2 = minkowski(&s.u, &s.u);
    let r = [
        l * d[1] + 3.0 * v0,
        l * d[2] + 3.0 * v1 - 2.0 * l * l,
        l * d[3] + 3.0 * v2,
        d[4] - 4.0 * l * u0,
        d[5] - 4.0 * l * u1,
        l * d[6] - 4.0 * l * l * u2 + 3.0 * u2,
        l * l * mu2 * d[0] + 2.0 * l.powi(4) * u1 + 3.0 * u2 * v2,
    ];
    r.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalabiYau {
    /// Small resolution, coordinate `r ≥ 1`.
    SmallResolution,
    /// Smoothing, coordinate `s ≥ 0`, with `κ = 2/3`.
    Smoothing,
}

/// Scale of the smoothing.
pub const KAPPA: f64 = 2.0 / 3.0;

/// Point of a Calabi–Yau form.
///
/// `u` and `v` are the components of the limit of the rescaled family in the
/// state convention, except that `u[2]` holds `lim ũ₂/ε = −λμ` so that the
/// direction of the vanishing component stays visible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalabiYauPoint {
    pub coord: f64,
    pub lambda: f64,
    pub mu: f64,
    pub u: [f64; 3],
    pub v: [f64; 3],
    /// Largest residual of the hypo evolution equations.
    pub residual: f64,
}

/// `(sinh x − x)/2` without cancellation near zero.
fn half_sinh_minus_id(x: &Series) -> Series {
    if x.value().abs() > 0.5 {
        let (s, _) = x.sinh_cosh();
        return &(&s - x) * 0.5;
    }
    let x2 = x * x;
    let mut acc = Series::constant(0.0, x.order());
    let mut fact = [0.0; 12];
    let mut f = 1.0;
    for (k, slot) in fact.iter_mut().enumerate() {
        let n = 2 * k + 3;
        f = if k == 0 {
            6.0
        } else {
            f * (n - 1) as f64 * n as f64
        };
        *slot = f;
    }
    for k in (0..12).rev() {
        acc = &(&acc * &x2) + 1.0 / fact[k];
    }
    &(&(&acc * &x2) * x) * 0.5
}

impl CalabiYau {
    pub fn name(self) -> &'static str {
        match self {
            CalabiYau::SmallResolution => "small-resolution",
            CalabiYau::Smoothing => "smoothing",
        }
    }

    /// `(λ, μ)` as series in the coordinate.
    pub fn lambda_mu_jet(self, x: &Series) -> (Series, Series) {
        match self {
            CalabiYau::SmallResolution => {
                let r2 = x * x;
                let l2 = &(&(&r2 - 1.0) * &(&r2 + 2.0)) / &(&r2 + 1.0);
                let mu = (&(&r2 * &r2) - 1.0).sqrt();
                (l2.sqrt(), mu)
            }
            CalabiYau::Smoothing => {
                let g = half_sinh_minus_id(&(x * 6.0));
                let mu = (&g * (KAPPA * KAPPA)).powf(1.0 / 3.0);
                let (sh, _) = (x * 3.0).sinh_cosh();
                let lambda = &(&sh * KAPPA) / &mu;
                (lambda, mu)
            }
        }
    }

    pub fn eval(self, x: f64) -> Result<CalabiYauPoint> {
        match self {
            CalabiYau::SmallResolution if !(x >= 1.0) => {
                return Err(Error::OutOfDomain {
                    value: x,
                    domain: "r >= 1".into(),
                })
            }
            CalabiYau::Smoothing if !(x >= 0.0) => {
                return Err(Error::OutOfDomain {
                    value: x,
                    domain: "s >= 0".into(),
                })
            }
            _ => {}
        }
        let edge = match self {
            CalabiYau::SmallResolution => x == 1.0,
            CalabiYau::Smoothing => x == 0.0,
        };
        let (l, m) = self.lambda_mu_jet(&Series::constant(x, 0));
        let (lambda, mu) = (l.value(), m.value());
        let (u, v) = match self {
            CalabiYau::SmallResolution => ([1.0, x * x, -lambda * mu], [0.0, 0.0, lambda * mu]),
            CalabiYau::Smoothing => (
                [0.0, mu, -lambda * mu],
                [-KAPPA, 0.0, KAPPA * (3.0 * x).cosh()],
            ),
        };
        let residual = if edge { 0.0 } else { self.residual(x) };
        Ok(CalabiYauPoint {
            coord: x,
            lambda: if edge { 0.0 } else { lambda },
            mu: if edge { 0.0 } else { mu },
            u,
            v,
            residual,
        })
    }

    fn residual(self, x: f64) -> f64 {
        let xs = Series::variable(x, 1);
        let (l, m) = self.lambda_mu_jet(&xs);
        let lm = &l * &m;
        match self {
            CalabiYau::SmallResolution => {
                // d(λμ)/dr = 3μ dt/dr with dt/dr = r/λ.
                let lhs = lm.coeff(1);
                let rhs = 3.0 * m.value() * x / l.value();
                (lhs - rhs).abs() / rhs.abs().max(1.0)
            }
            CalabiYau::Smoothing => {
                let (_, ch) = (&xs * 3.0).sinh_cosh();
                let v0 = &Series::constant(-KAPPA, 1) / &l;
                let v2 = &(&ch * KAPPA) / &l;
                let mu3 = &(&m * &m) * &m;
                let r = [
                    mu3.coeff(1) - 6.0 * lm.value() * lm.value(),
                    lm.coeff(1) - 3.0 * (&l * &v2).value(),
                    (&l * &v0).coeff(1),
                    (&l * &v2).coeff(1) - 3.0 * lm.value(),
                ];
                let scale = mu3.coeff(1).abs().max(1.0);
                r.iter().fold(0.0_f64, |a, b| a.max(b.abs())) / scale
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RescaleDirection {
    Blowup,
    Blowdown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RescaleScheme {
    /// `(ε⁻¹λ(εt), ε⁻²u(εt), ε⁻³v(εt))`.
    Bubble,
    /// `(λ, u₀/ε², u₁/ε², u₂/ε, v₀/ε², v₁/ε², v₂/ε)` at the same time.
    LargeA,
}

pub fn rescale_bubble(
    s: &State,
    eps: f64,
    direction: RescaleDirection,
    scheme: RescaleScheme,
) -> Result<State> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rescaling factor must be positive, got {eps}"
        )));
    }
    let e = match direction {
        RescaleDirection::Blowup => 1.0 / eps,
        RescaleDirection::Blowdown => eps,
    };
    let y = s.to_array();
    let (f, t): (Vec7, f64) = match scheme {
        RescaleScheme::Bubble => {
            let e2 = e * e;
            ([e, e2, e2, e2, e2 * e, e2 * e, e2 * e], s.t * e)
        }
        RescaleScheme::LargeA => {
            let e2 = e * e;
            ([1.0, e2, e2, e, e2, e2, e], s.t)
        }
    };
    let z: Vec7 = std::array::from_fn(|k| y[k] * f[k]);
    Ok(State::from_array(t, &z))
}

fn legendre_jet(c1: f64, c2: f64, t: &Series) -> Series {
    let c = t.cos();
    let s = t.sin();
    let c2s = &c * &c;
    let reg = &(&(&c2s * &c) * 5.0) - &(&c * 3.0);
    let log = (&(1.0 - &c) / &(1.0 + &c)).ln();
    let odd = &c * &(&(&c2s * 4.0) - &(&(&s * &s) * 6.0));
    let sing = &(&(&c2s * 2.5) + &(&(&odd * &log) * 0.125)) - 2.0 / 3.0;
    &(&reg * c1) + &(&sing * c2)
}

/// `ξ = C₁ξ_reg + C₂ξ_sing` and `ξ′` at `t ∈ (0, π)`.
pub fn legendre_xi(c1: f64, c2: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::OutOfDomain {
            value: t,
            domain: "(0, pi)".into(),
        });
    }
    let j = legendre_jet(c1, c2, &Series::variable(t, 1));
    Ok((j.value(), j.coeff(1)))
}

/// Residual of `(sin t ξ′)′ + 12 sin t ξ = 0`.
pub fn legendre_residual(c1: f64, c2: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::OutOfDomain {
            value: t,
            domain: "(0, pi)".into(),
        });
    }
    let j = legendre_jet(c1, c2, &Series::variable(t, 2));
    let (xi, d1, d2) = (j.value(), j.nth_derivative(1), j.nth_derivative(2));
    Ok(t.cos() * d1 + t.sin() * d2 + 12.0 * t.sin() * xi)
}
