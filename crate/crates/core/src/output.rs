//! Deterministic CSV, JSON and SVG emitters.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::geometry::volume_and_mean_curvature;
use crate::integrator::Trajectory;
use crate::series::SeriesSolution;
use crate::shooting::{Curve, Reflection};
use crate::state::constraints;

/// Shortest round-trip decimal form (at most 17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// One row per node: state, constraint residuals, volume and mean curvature.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,lambda,u0,u1,u2,v0,v1,v2,I1,I2,I3,I4,V,l\n");
    for s in &traj.nodes {
        let c = constraints(s);
        let l = volume_and_mean_curvature(s)
            .map(|x| x.1)
            .unwrap_or(f64::NAN);
        let y = s.to_array();
        row(
            &mut out,
            &[
                s.t,
                y[0],
                y[1],
                y[2],
                y[3],
                y[4],
                y[5],
                y[6],
                c.i1,
                c.i2,
                c.i3,
                c.i4,
                s.volume(),
                l,
            ],
        );
    }
    out
}

pub fn series_csv(ss: &SeriesSolution) -> String {
    let mut out = String::from("component,order,coefficient\n");
    for (name, h, c) in ss.coefficient_rows() {
        let _ = writeln!(out, "{name},{h},{}", fmt_f64(c));
    }
    out
}

pub fn curve_csv(curve: &Curve) -> String {
    let mut out = String::from("param,T,lambda,mu,w0,w1,w2,Vmax,B\n");
    for r in &curve.samples {
        row(
            &mut out,
            &[
                r.param, r.t, r.lambda, r.mu, r.w[0], r.w[1], r.w[2], r.vmax, r.bohm,
            ],
        );
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// A labelled point drawn on the H-plane plot.
#[derive(Clone, Debug)]
pub struct Mark {
    pub label: String,
    pub point: [f64; 2],
}

const SIZE: f64 = 640.0;
const PAD: f64 = 48.0;

/// Static plot of the alpha and beta curves in the `(w₁, w₂)` plane, with the
/// images of beta under the two axis reflections and marked solutions.
pub fn fig2_svg(alpha: &Curve, beta: &Curve, marks: &[Mark]) -> String {
    let a = alpha.h_points();
    let b = beta.h_points();
    let b1: Vec<[f64; 2]> = b.iter().map(|p| Reflection::W1.apply(*p)).collect();
    let b2: Vec<[f64; 2]> = b.iter().map(|p| Reflection::W2.apply(*p)).collect();
    let mut lo = [0.0_f64; 2];
    let mut hi = [0.0_f64; 2];
    for p in a
        .iter()
        .chain(&b)
        .chain(&b1)
        .chain(&b2)
        .chain(marks.iter().map(|m| &m.point))
    {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-3);
    let scale = (SIZE - 2.0 * PAD) / span;
    let map = |p: [f64; 2]| {
        (
            PAD + (p[0] - lo[0]) * scale,
            SIZE - PAD - (p[1] - lo[1]) * scale,
        )
    };
    let poly = |pts: &[[f64; 2]]| {
        pts.iter()
            .map(|p| {
                let (x, y) = map(*p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ox, oy) = map([0.0, 0.0]);
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}" stroke="#888" stroke-width="1"/>"##,
        PAD,
        SIZE - PAD
    );
    let _ = writeln!(
        s,
        r##"<line x1="{ox:.2}" y1="{:.2}" x2="{ox:.2}" y2="{:.2}" stroke="#888" stroke-width="1"/>"##,
        PAD,
        SIZE - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14">w1</text>"#,
        SIZE - PAD + 6.0,
        oy + 4.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14">w2</text>"#,
        ox - 8.0,
        PAD - 8.0
    );
    for (pts, colour, dash, id) in [
        (&b1, "#d62728", "6,4", "beta-w1"),
        (&b2, "#d62728", "2,3", "beta-w2"),
        (&b, "#d62728", "none", "beta"),
        (&a, "#1f77b4", "none", "alpha"),
    ] {
        let _ = writeln!(
            s,
            r#"<polyline id="{id}" points="{}" fill="none" stroke="{colour}" stroke-width="1.5" stroke-dasharray="{dash}"/>"#,
            poly(pts)
        );
    }
    for m in marks {
        let (x, y) = map(m.point);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            x + 6.0,
            y - 6.0,
            m.label
        );
    }
    s.push_str("</svg>\n");
    s
}
