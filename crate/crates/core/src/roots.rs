//! Scalar bracketing root finder and a small simplex minimiser.

use crate::error::{Error, Result};

/// Brent's method on `[a, b]`; stops when the bracket is narrower than `xtol`.
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange {
            what: "bracketed function".into(),
            lo: a,
            hi: b,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::InvalidArgument(format!("function is NaN at {b}")));
        }
    }
    Ok(b)
}

/// Outcome of [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct Minimum {
    pub x: [f64; 2],
    pub f: f64,
    pub evaluations: usize,
}

/// Nelder–Mead in two dimensions from `x0` with initial edge `step`.
///
/// Stops when `f` drops below `f_target`, the simplex shrinks below `x_tol`
/// or `max_eval` evaluations are spent.
pub fn nelder_mead(
    mut f: impl FnMut([f64; 2]) -> f64,
    x0: [f64; 2],
    step: [f64; 2],
    f_target: f64,
    x_tol: f64,
    max_eval: usize,
) -> Minimum {
    let mut pts = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    let mut evals = 3;
    let comb =
        |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    loop {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|i, j| vals[*i].total_cmp(&vals[*j]));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];
        let size = (0..2)
            .map(|k| {
                (pts[1][k] - pts[0][k])
                    .abs()
                    .max((pts[2][k] - pts[0][k]).abs())
            })
            .fold(0.0_f64, f64::max);
        if vals[0] < f_target || size < x_tol || evals >= max_eval {
            return Minimum {
                x: pts[0],
                f: vals[0],
                evaluations: evals,
            };
        }
        let centroid = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let xr = comb(centroid, pts[2], -1.0);
        let fr = f(xr);
        evals += 1;
        if fr < vals[0] {
            let xe = comb(centroid, pts[2], -2.0);
            let fe = f(xe);
            evals += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let xc = comb(centroid, xr, 0.5);
                (xc, f(xc))
            } else {
                let xc = comb(centroid, pts[2], 0.5);
                (xc, f(xc))
            };
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = comb(pts[0], pts[i], 0.5);
                    vals[i] = f(pts[i]);
                    evals += 1;
                }
            }
        }
    }
}
