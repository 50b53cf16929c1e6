//! The fundamental system: state, vector field, first integrals and the
//! discrete symmetries `τ₁ … τ₄`.
//!
//! Component order everywhere is `(λ, u₀, u₁, u₂, v₀, v₁, v₂)`. The vectors
//! `u` and `v` live in Minkowski space with signature `(−,+,+)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{LAMBDA_MIN, MU2_MIN};

/// Seven components in the canonical order.
pub type Vec7 = [f64; 7];

/// Minkowski product with signature `(−,+,+)`.
pub fn minkowski(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub lambda: f64,
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl State {
    pub fn new(t: f64, lambda: f64, u: [f64; 3], v: [f64; 3]) -> Self {
        State { t, lambda, u, v }
    }

    pub fn from_array(t: f64, y: &Vec7) -> Self {
        State {
            t,
            lambda: y[0],
            u: [y[1], y[2], y[3]],
            v: [y[4], y[5], y[6]],
        }
    }

    pub fn to_array(&self) -> Vec7 {
        [
            self.lambda,
            self.u[0],
            self.u[1],
            self.u[2],
            self.v[0],
            self.v[1],
            self.v[2],
        ]
    }

    pub fn mu2(&self) -> f64 {
        minkowski(&self.u, &self.u)
    }

    pub fn mu(&self) -> f64 {
        self.mu2().sqrt()
    }

    /// Orbital volume `λμ²`.
    pub fn volume(&self) -> f64 {
        self.lambda * self.mu2()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `λ > 0`, `μ² > 0` and positive orientation.
    pub fn is_admissible(&self) -> bool {
        self.lambda > 0.0 && self.mu2() > 0.0 && orientation(self) > 0.0
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if !(self.lambda > LAMBDA_MIN) {
            return Err(Error::Degenerate {
                reason: format!("lambda = {:e} at t = {}", self.lambda, self.t),
            });
        }
        let mu2 = self.mu2();
        if !(mu2 > MU2_MIN) {
            return Err(Error::Degenerate {
                reason: format!("mu^2 = {:e} at t = {}", mu2, self.t),
            });
        }
        Ok(())
    }
}

fn orientation(s: &State) -> f64 {
    s.u[1] * s.v[2] - s.u[2] * s.v[1]
}

/// Vector field without admissibility checks.
///
/// Only the denominators `λ` and `μ²` must be nonzero.
pub fn vector_field(s: &State) -> Vec7 {
    let l = s.lambda;
    let [u0, u1, u2] = s.u;
    let [v0, v1, v2] = s.v;
    let mu2 = s.mu2();
    let l2 = l * l;
    [
        -(2.0 * l2 * l2 * u1 + 3.0 * u2 * v2) / (l2 * mu2),
        -3.0 * v0 / l,
        (2.0 * l2 - 3.0 * v1) / l,
        -3.0 * v2 / l,
        4.0 * l * u0,
        4.0 * l * u1,
        (4.0 * l2 * u2 - 3.0 * u2) / l,
    ]
}

/// Time derivative of the state.
pub fn rhs(s: &State) -> Result<Vec7> {
    s.check_nondegenerate()?;
    Ok(vector_field(s))
}

/// Time derivative with `λ̇ = −2λ²u₁/v₁ − 3v₂/u₂`, valid on the constraint set.
pub fn rhs_alt(s: &State) -> Result<Vec7> {
    s.check_nondegenerate()?;
    if s.v[1] == 0.0 || s.u[2] == 0.0 {
        return Err(Error::Degenerate {
            reason: format!(
                "v1 = {}, u2 = {} in the alternate lambda path",
                s.v[1], s.u[2]
            ),
        });
    }
    let mut d = vector_field(s);
    let l = s.lambda;
    d[0] = -2.0 * l * l * s.u[1] / s.v[1] - 3.0 * s.v[2] / s.u[2];
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintVector {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub orient: f64,
}

impl ConstraintVector {
    pub fn max_abs(&self) -> f64 {
        self.i1
            .abs()
            .max(self.i2.abs())
            .max(self.i3.abs())
            .max(self.i4.abs())
    }
}

pub fn constraints(s: &State) -> ConstraintVector {
    let mu2 = s.mu2();
    let l2m2 = s.lambda * s.lambda * mu2;
    ConstraintVector {
        i1: minkowski(&s.u, &s.v),
        i2: l2m2 - s.u[2] * s.u[2],
        i3: l2m2 - minkowski(&s.v, &s.v),
        i4: s.v[1] - mu2,
        orient: orientation(s),
    }
}

/// Constraint residual relative to the natural scale `max(1, λ²μ²)`.
pub fn relative_drift(s: &State) -> f64 {
    let scale = (s.lambda * s.lambda * s.mu2()).abs().max(1.0);
    constraints(s).max_abs() / scale
}

/// A word in the generators `τ₁ … τ₄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    word: Vec<u8>,
}

const GENERATOR_SIGNS: [Vec7; 4] = [
    [-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
];

impl Symmetry {
    /// Word from generator indices `1..=4`, leftmost applied last.
    pub fn from_word(word: &[u8]) -> Result<Self> {
        if word.is_empty() || word.iter().any(|g| !(1..=4).contains(g)) {
            return Err(Error::UnknownSymmetry(format!("{word:?}")));
        }
        Ok(Symmetry {
            word: word.to_vec(),
        })
    }

    pub fn tau(i: u8) -> Self {
        Symmetry::from_word(&[i]).expect("generator index in 1..=4")
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Net component multipliers.
    pub fn signs(&self) -> Vec7 {
        let mut s = [1.0; 7];
        for g in &self.word {
            for (k, m) in GENERATOR_SIGNS[(*g - 1) as usize].iter().enumerate() {
                s[k] *= m;
            }
        }
        s
    }

    /// True when the word contains `τ₁` an odd number of times.
    pub fn reverses_time(&self) -> bool {
        self.word.iter().filter(|g| **g == 1).count() % 2 == 1
    }

    /// Applies the word right to left.
    pub fn apply(&self, s: &State) -> State {
        let mut out = *s;
        for g in self.word.iter().rev() {
            let m = &GENERATOR_SIGNS[(*g - 1) as usize];
            let y = out.to_array();
            let mut z = [0.0; 7];
            for k in 0..7 {
                z[k] = m[k] * y[k];
            }
            let t = if *g == 1 { -out.t } else { out.t };
            out = State::from_array(t, &z);
        }
        out
    }

    /// Image of a time derivative: the sign table, negated under time reversal.
    pub fn apply_derivative(&self, d: &Vec7) -> Vec7 {
        let s = self.signs();
        let f = if self.reverses_time() { -1.0 } else { 1.0 };
        let mut out = [0.0; 7];
        for k in 0..7 {
            out[k] = f * s[k] * d[k];
        }
        out
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|g| format!("τ{g}")).collect();
        f.write_str(&parts.join("∘"))
    }
}

impl FromStr for Symmetry {
    type Err = Error;

    /// Accepts `τ2∘τ3∘τ4`, `tau2*tau3`, `t1.t4` and similar spellings.
    fn from_str(text: &str) -> Result<Self> {
        let unknown = || Error::UnknownSymmetry(text.to_string());
        let mut word = Vec::new();
        for part in text.split(['∘', '*', '.', ' ']).filter(|p| !p.is_empty()) {
            let digits = part
                .strip_prefix('τ')
                .or_else(|| part.strip_prefix("tau"))
                .or_else(|| part.strip_prefix('t'))
                .ok_or_else(unknown)?;
            let g: u8 = digits.parse().map_err(|_| unknown())?;
            if !(1..=4).contains(&g) {
                return Err(unknown());
            }
            word.push(g);
        }
        if word.is_empty() {
            return Err(unknown());
        }
        Ok(Symmetry { word })
    }
}

pub fn apply_symmetry(tau: &Symmetry, s: &State) -> State {
    tau.apply(s)
}
