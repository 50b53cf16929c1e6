//! Regularised singular systems for the two families and their rescalings.
//!
//! Each system is the fundamental system rewritten in unknowns `y₁ … y₇`
//! that are analytic at the singular orbit.

use std::fmt;

use serde::Serialize;

use super::{SeriesSolution, SingularIvp, Variable};
use crate::jet::Series;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Closing on `S²`, parameter `a`.
    S2,
    /// Closing on `S³`, parameter `b`.
    S3,
    /// Rescaled `S²` family, parameter `ε = a`.
    S2Bubble,
    /// Rescaled `S³` family, parameter `ε = b`.
    S3Bubble,
    /// `S²` family with the large-`a` rescaling.
    S2Large,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::S2 => "S2",
            Family::S3 => "S3",
            Family::S2Bubble => "S2-bubble",
            Family::S3Bubble => "S3-bubble",
            Family::S2Large => "S2-large",
        })
    }
}

fn t2(t: &Series) -> Series {
    t * t
}

/// `u₀ = a² + t²y₁`, `u₁ = a² + t²y₂`, `u₂ = t²y₃`, `vᵢ = t²y₄₊ᵢ`, `λ = t·y₇`.
pub struct S2Family {
    pub a: f64,
}

impl SingularIvp for S2Family {
    fn dim(&self) -> usize {
        7
    }

    fn initial(&self) -> Vec<f64> {
        let a = self.a;
        let a2 = a * a;
        vec![
            -3.0 * a2,
            -3.0 * a2 + 1.5,
            -1.5 * SQRT3 * a,
            3.0 * a2,
            3.0 * a2,
            1.5 * SQRT3 * a,
            1.5,
        ]
    }

    fn rhs(&self, t: &Series, y: &[Series]) -> Vec<Series> {
        let a2 = self.a * self.a;
        let tt = t2(t);
        let (y1, y2, y3, y4, y5, y6, y7) = (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
        let r7 = y7.recip();
        let q = &((y2 - y1) * (2.0 * a2)) + &(&tt * &(&(&(y2 * y2) - &(y1 * y1)) + &(y3 * y3)));
        let y7sq = y7 * y7;
        let num = &(&(&y7sq * &y7sq) * &(&(&tt * y2) + a2) * 2.0) + &(&(y3 * y6) * 3.0);
        vec![
            -(&(y1 * 2.0) + &(&(y4 * &r7) * 3.0)),
            -(&(&(y2 * 2.0) + &(&(y5 * &r7) * 3.0)) - &(y7 * 2.0)),
            -(&(y3 * 2.0) + &(&(y6 * &r7) * 3.0)),
            &(&(y4 * -2.0) + &(y7 * (4.0 * a2))) + &(&(&tt * &(y1 * y7)) * 4.0),
            &(&(y5 * -2.0) + &(y7 * (4.0 * a2))) + &(&(&tt * &(y2 * y7)) * 4.0),
            &(&(y6 * -2.0) - &(&(y3 * &r7) * 3.0)) + &(&(&tt * &(y3 * y7)) * 4.0),
            -(y7 + &(&num / &(&y7sq * &q))),
        ]
    }
}

/// Rescaled `S²` family: `ũ₀ = 1 + t²y₁`, `ũ₁ = 1 + t²y₂`, `ũ₂ = ε t²y₃`.
pub struct S2Bubble {
    pub eps: f64,
}

impl SingularIvp for S2Bubble {
    fn dim(&self) -> usize {
        7
    }

    fn initial(&self) -> Vec<f64> {
        let e = self.eps;
        vec![
            -3.0 * e * e,
            1.5 - 3.0 * e * e,
            -1.5 * SQRT3,
            3.0 * e,
            3.0 * e,
            1.5 * SQRT3,
            1.5,
        ]
    }

    fn rhs(&self, t: &Series, y: &[Series]) -> Vec<Series> {
        let e = self.eps;
        let tt = t2(t);
        let (y1, y2, y3, y4, y5, y6, y7) = (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
        let r7 = y7.recip();
        let q =
            &((y2 - y1) * 2.0) + &(&tt * &(&(&(y2 * y2) - &(y1 * y1)) + &(&(y3 * y3) * (e * e))));
        let y7sq = y7 * y7;
        let num = &(&(&y7sq * &y7sq) * &(&(&tt * y2) + 1.0) * 2.0) + &(&(y3 * y6) * 3.0);
        vec![
            -(&(y1 * 2.0) + &(&(y4 * &r7) * (3.0 * e))),
            -(&(&(y2 * 2.0) + &(&(y5 * &r7) * (3.0 * e))) - &(y7 * 2.0)),
            -(&(y3 * 2.0) + &(&(y6 * &r7) * 3.0)),
            &(&(y4 * -2.0) + &(y7 * (4.0 * e))) + &(&(&tt * &(y1 * y7)) * (4.0 * e)),
            &(&(y5 * -2.0) + &(y7 * (4.0 * e))) + &(&(&tt * &(y2 * y7)) * (4.0 * e)),
            &(&(y6 * -2.0) - &(&(y3 * &r7) * 3.0)) + &(&(&tt * &(y3 * y7)) * (4.0 * e * e)),
            -(y7 + &(&num / &(&y7sq * &q))),
        ]
    }
}

/// Rescaled `S³` family in `s`: `ũ₀ = s y₁`, `ũ₁ = s y₂`, `ũ₂ = ε s y₃`,
/// `ṽ₀ = −2/3 + s²y₄`, `ṽ₁ = s²y₅`, `ṽ₂ = 2/3 + s²y₆`, `λ̃² = y₇`.
pub struct S3Bubble {
    pub eps: f64,
}

impl SingularIvp for S3Bubble {
    fn dim(&self) -> usize {
        7
    }

    fn initial(&self) -> Vec<f64> {
        let e = self.eps;
        vec![
            2.0 * e,
            2.0,
            -2.0,
            4.0 * e * e,
            4.0 * e,
            3.0 - 4.0 * e * e,
            1.0,
        ]
    }

    fn rhs(&self, s: &Series, y: &[Series]) -> Vec<Series> {
        let e = self.eps;
        let ss = t2(s);
        let (y1, y2, y3, y4, y5, y6, y7) = (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
        let d = &(&(y2 * y2) - &(y1 * y1)) + &(&(y3 * y3) * (e * e));
        let num = &(&(&(&(y7 * y7) * y2) * 4.0) + &(y3 * 4.0)) + &(&(&ss * &(y3 * y6)) * 6.0);
        vec![
            -(&(y1 - 2.0 * e) + &(&(&ss * y4) * (3.0 * e))),
            -(&(y2 - &(y7 * 2.0)) + &(&(&ss * y5) * (3.0 * e))),
            -(&(y3 + 2.0) + &(&(&ss * y6) * 3.0)),
            -(&(y4 * 2.0) - &(&(y1 * y7) * (4.0 * e))),
            -(&(y5 * 2.0) - &(&(y2 * y7) * (4.0 * e))),
            -(&(&(y6 * 2.0) - &(&(y3 * y7) * (4.0 * e * e))) + &(y3 * 3.0)),
            -(&num / &d),
        ]
    }
}

/// `S²` family after dividing `u₀, u₁, v₀, v₁` by `a²` and `u₂, v₂` by `a`,
/// with `ε = 1/a`; `λ̇` taken in the form `−2λ²u₁/v₁ − 3v₂/u₂`.
pub struct S2Large {
    pub eps: f64,
}

impl SingularIvp for S2Large {
    fn dim(&self) -> usize {
        7
    }

    fn initial(&self) -> Vec<f64> {
        let e = self.eps;
        vec![
            -3.0,
            -3.0 + 1.5 * e * e,
            -1.5 * SQRT3,
            3.0,
            3.0,
            1.5 * SQRT3,
            1.5,
        ]
    }

    fn rhs(&self, t: &Series, y: &[Series]) -> Vec<Series> {
        let e = self.eps;
        let tt = t2(t);
        let (y1, y2, y3, y4, y5, y6, y7) = (&y[0], &y[1], &y[2], &y[3], &y[4], &y[5], &y[6]);
        let r7 = y7.recip();
        let y7sq = y7 * y7;
        let l7 = &(&(&(&y7sq * &(&(&tt * y2) + 1.0)) * 2.0) / y5) + &(&(y6 / y3) * 3.0);
        vec![
            -(&(y1 * 2.0) + &(&(y4 * &r7) * 3.0)),
            -(&(&(y2 * 2.0) + &(&(y5 * &r7) * 3.0)) - &(y7 * (2.0 * e * e))),
            -(&(y3 * 2.0) + &(&(y6 * &r7) * 3.0)),
            &(&(y4 * -2.0) + &(y7 * 4.0)) + &(&(&tt * &(y1 * y7)) * 4.0),
            &(&(y5 * -2.0) + &(y7 * 4.0)) + &(&(&tt * &(y2 * y7)) * 4.0),
            &(&(y6 * -2.0) - &(&(y3 * &r7) * 3.0)) + &(&(&tt * &(y3 * y7)) * 4.0),
            -(y7 + &l7),
        ]
    }
}

fn shifted(c: &[f64], k: usize, constant: f64, factor: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + k];
    for (i, v) in c.iter().enumerate() {
        out[i + k] = factor * v;
    }
    out[0] += constant;
    out
}

/// State components of an `S²`-type table: `u₀, u₁` start at `u_const`, `u₂` carries `u2_factor`.
pub(super) fn s2_components(
    family: Family,
    param: f64,
    u_const: f64,
    u2_factor: f64,
    raw: Vec<Vec<f64>>,
) -> SeriesSolution {
    let order = raw[0].len() - 1;
    let mut lambda = shifted(&raw[6], 1, 0.0, 1.0);
    lambda.push(0.0);
    let components = [
        lambda,
        shifted(&raw[0], 2, u_const, 1.0),
        shifted(&raw[1], 2, u_const, 1.0),
        shifted(&raw[2], 2, 0.0, u2_factor),
        shifted(&raw[3], 2, 0.0, 1.0),
        shifted(&raw[4], 2, 0.0, 1.0),
        shifted(&raw[5], 2, 0.0, 1.0),
    ];
    SeriesSolution {
        family,
        param,
        variable: Variable::T,
        order,
        components,
        time: None,
        raw,
    }
}

pub(super) fn s3_bubble_components(eps: f64, raw: Vec<Vec<f64>>) -> SeriesSolution {
    let order = raw[0].len() - 1;
    let lambda = Series::from_coeffs(raw[6].clone()).sqrt();
    let time = lambda.integral().into_coeffs();
    let components = [
        lambda.into_coeffs(),
        shifted(&raw[0], 1, 0.0, 1.0),
        shifted(&raw[1], 1, 0.0, 1.0),
        shifted(&raw[2], 1, 0.0, eps),
        shifted(&raw[3], 2, -2.0 / 3.0, 1.0),
        shifted(&raw[4], 2, 0.0, 1.0),
        shifted(&raw[5], 2, 2.0 / 3.0, 1.0),
    ];
    SeriesSolution {
        family: Family::S3Bubble,
        param: eps,
        variable: Variable::S,
        order,
        components,
        time: Some(time),
        raw,
    }
}

/// `Ψ_b = (b λ̃, b² ũ, b³ ṽ)` with time `b t̃`; the variable `s` is unchanged.
pub(super) fn unrescale_s3(bubble: &SeriesSolution) -> SeriesSolution {
    let b = bubble.param;
    let factors = [b, b * b, b * b, b * b, b * b * b, b * b * b, b * b * b];
    let mut components = bubble.components.clone();
    for (c, f) in components.iter_mut().zip(factors) {
        for v in c.iter_mut() {
            *v *= f;
        }
    }
    let time = bubble
        .time
        .as_ref()
        .map(|c| c.iter().map(|v| v * b).collect());
    SeriesSolution {
        family: Family::S3,
        param: b,
        variable: Variable::S,
        order: bubble.order,
        components,
        time,
        raw: bubble.raw.clone(),
    }
}
