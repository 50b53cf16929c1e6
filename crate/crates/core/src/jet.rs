//! Truncated power series arithmetic.
//!
//! A [`Series`] holds the coefficients `c[0..=n]` of `Σ c[k] x^k`. All binary
//! operations truncate to the shorter operand. The same type serves as a
//! forward-mode jet: evaluating a formula on `x0 + x` yields its Taylor
//! coefficients at `x0`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    c: Vec<f64>,
}

impl Series {
    /// Series with the given coefficients.
    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a series needs at least one coefficient");
        Series { c }
    }

    /// Constant `v` truncated at `order`.
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Series { c }
    }

    /// The independent variable shifted by `x0`, i.e. `x0 + x`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Series { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.c, x)
    }

    /// Multiplies by `x^k`, keeping the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in k..n {
            c[i] = self.c[i - k];
        }
        Series { c }
    }

    /// Antiderivative vanishing at zero, one order longer.
    pub fn integral(&self) -> Self {
        let mut c = vec![0.0; self.c.len() + 1];
        for (k, a) in self.c.iter().enumerate() {
            c[k + 1] = a / (k as f64 + 1.0);
        }
        Series { c }
    }

    /// Term-by-term derivative, one order shorter (at least one coefficient).
    pub fn derivative(&self) -> Self {
        if self.c.len() == 1 {
            return Series { c: vec![0.0] };
        }
        let c = (1..self.c.len()).map(|k| k as f64 * self.c[k]).collect();
        Series { c }
    }

    /// `k`-th derivative at the expansion point.
    pub fn nth_derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.coeff(k) * f
    }

    fn zip_len(&self, o: &Series) -> usize {
        self.c.len().min(o.c.len())
    }

    pub fn recip(&self) -> Self {
        Series::constant(1.0, self.order()) / self
    }

    pub fn sqrt(&self) -> Self {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut s = self.c[k];
            for i in 1..k {
                s -= r[i] * r[k - i];
            }
            r[k] = s / (2.0 * r[0]);
        }
        Series { c: r }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Series { c: e }
    }

    pub fn ln(&self) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut l = vec![0.0; n];
        l[0] = a0.ln();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - s / k as f64) / a0;
        }
        Series { c: l }
    }

    /// Real power; requires a nonzero constant term.
    pub fn powf(&self, p: f64) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut r = vec![0.0; n];
        r[0] = a0.powf(p);
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((p + 1.0) * j as f64 - k as f64) * self.c[j] * r[k - j];
            }
            r[k] = s / (k as f64 * a0);
        }
        Series { c: r }
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut out = Series::constant(1.0, self.order());
        for _ in 0..p {
            out = &out * self;
        }
        out
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * self.c[j];
                ss += ja * c[k - j];
                cc -= ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Series { c: s }, Series { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn sinh_cosh(&self) -> (Self, Self) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * self.c[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Series { c: s }, Series { c })
    }

    pub fn scale(&self, k: f64) -> Self {
        Series {
            c: self.c.iter().map(|a| a * k).collect(),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }
}

/// Horner evaluation of a coefficient slice.
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

impl Add<&Series> for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        let n = self.zip_len(o);
        Series {
            c: (0..n).map(|k| self.c[k] + o.c[k]).collect(),
        }
    }
}

impl Sub<&Series> for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        let n = self.zip_len(o);
        Series {
            c: (0..n).map(|k| self.c[k] - o.c[k]).collect(),
        }
    }
}

impl Mul<&Series> for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.zip_len(o);
        let mut c = vec![0.0; n];
        for (i, a) in self.c.iter().take(n).enumerate() {
            if *a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += a * o.c[j];
            }
        }
        Series { c }
    }
}

impl Div<&Series> for &Series {
    type Output = Series;
    fn div(self, o: &Series) -> Series {
        let n = self.zip_len(o);
        let b0 = o.c[0];
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut s = self.c[k];
            for i in 1..=k {
                s -= o.c[i] * q[k - i];
            }
            q[k] = s / b0;
        }
        Series { c: q }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl AddAssign<&Series> for Series {
    fn add_assign(&mut self, o: &Series) {
        let n = self.zip_len(o);
        self.c.truncate(n);
        for k in 0..n {
            self.c[k] += o.c[k];
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;
            fn $m(self, o: Series) -> Series {
                (&self).$m(&o)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $m(self, o: &Series) -> Series {
                (&self).$m(o)
            }
        }
        impl $tr<Series> for &Series {
            type Output = Series;
            fn $m(self, o: Series) -> Series {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Add<f64> for &Series {
    type Output = Series;
    fn add(self, k: f64) -> Series {
        let mut c = self.c.clone();
        c[0] += k;
        Series { c }
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(mut self, k: f64) -> Series {
        self.c[0] += k;
        self
    }
}

impl Sub<f64> for &Series {
    type Output = Series;
    fn sub(self, k: f64) -> Series {
        self + (-k)
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(self, k: f64) -> Series {
        self + (-k)
    }
}

impl Mul<f64> for &Series {
    type Output = Series;
    fn mul(self, k: f64) -> Series {
        self.scale(k)
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, k: f64) -> Series {
        self.scale(k)
    }
}

impl Mul<&Series> for f64 {
    type Output = Series;
    fn mul(self, s: &Series) -> Series {
        s.scale(self)
    }
}

impl Mul<Series> for f64 {
    type Output = Series;
    fn mul(self, s: Series) -> Series {
        s.scale(self)
    }
}

impl Div<f64> for &Series {
    type Output = Series;
    fn div(self, k: f64) -> Series {
        self.scale(1.0 / k)
    }
}

impl Div<f64> for Series {
    type Output = Series;
    fn div(self, k: f64) -> Series {
        self.scale(1.0 / k)
    }
}

impl Add<&Series> for f64 {
    type Output = Series;
    fn add(self, s: &Series) -> Series {
        s + self
    }
}

impl Add<Series> for f64 {
    type Output = Series;
    fn add(self, s: Series) -> Series {
        s + self
    }
}

impl Sub<&Series> for f64 {
    type Output = Series;
    fn sub(self, s: &Series) -> Series {
        -s + self
    }
}

impl Sub<Series> for f64 {
    type Output = Series;
    fn sub(self, s: Series) -> Series {
        -s + self
    }
}

impl Div<&Series> for f64 {
    type Output = Series;
    fn div(self, s: &Series) -> Series {
        s.recip().scale(self)
    }
}

impl Div<Series> for f64 {
    type Output = Series;
    fn div(self, s: Series) -> Series {
        s.recip().scale(self)
    }
}
