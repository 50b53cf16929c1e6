//! Adaptive Dormand–Prince 5(4) integration with continuous output and
//! event location.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::state::{relative_drift, rhs, State, Vec7};
use crate::tolerances::{BLOWUP, DRIFT_ABORT, EVENT_TOL, INTEGRATOR_TOL, LAMBDA_MIN, MU2_MIN};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: INTEGRATOR_TOL,
            abs: INTEGRATOR_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Any,
    Rising,
    Falling,
}

pub type EventFn = Arc<dyn Fn(&State) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct EventSpec {
    pub name: String,
    pub func: EventFn,
    pub direction: Direction,
    pub terminal: bool,
}

impl EventSpec {
    pub fn new(
        name: &str,
        func: impl Fn(&State) -> f64 + Send + Sync + 'static,
        direction: Direction,
        terminal: bool,
    ) -> Self {
        EventSpec {
            name: name.to_string(),
            func: Arc::new(func),
            direction,
            terminal,
        }
    }

    /// Zero of `2λ⁴u₁ − 3u₂v₂`, where the orbital volume is critical.
    pub fn max_volume(terminal: bool) -> Self {
        EventSpec::new("max-volume", max_volume_function, Direction::Any, terminal)
    }

    fn triggered(&self, g0: f64, g1: f64) -> bool {
        let crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
        crossed
            && match self.direction {
                Direction::Any => true,
                Direction::Rising => g1 > g0,
                Direction::Falling => g1 < g0,
            }
    }
}

/// `2λ⁴u₁ − 3u₂v₂`.
pub fn max_volume_function(s: &State) -> f64 {
    let l2 = s.lambda * s.lambda;
    2.0 * l2 * l2 * s.u[1] - 3.0 * s.u[2] * s.v[2]
}

#[derive(Clone, Debug)]
pub struct EventRecord {
    pub event: usize,
    pub name: String,
    pub t: f64,
    pub state: State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Event,
    Singularity,
    Horizon,
}

/// Continuous extension over one accepted step.
#[derive(Clone, Debug)]
struct Segment {
    t0: f64,
    h: f64,
    r: [Vec7; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> Vec7 {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; 7];
        for k in 0..7 {
            let r = &self.r;
            y[k] = r[0][k] + th * (r[1][k] + th1 * (r[2][k] + th * (r[3][k] + th1 * r[4][k])));
        }
        y
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub nodes: Vec<State>,
    /// Relative constraint drift at each node.
    pub drift: Vec<f64>,
    pub events: Vec<EventRecord>,
    pub termination: Termination,
    segments: Vec<Segment>,
}

impl Trajectory {
    pub fn start(&self) -> &State {
        &self.nodes[0]
    }

    pub fn end(&self) -> &State {
        self.nodes.last().expect("trajectory has nodes")
    }

    pub fn t_start(&self) -> f64 {
        self.start().t
    }

    pub fn t_end(&self) -> f64 {
        self.end().t
    }

    pub fn max_drift(&self) -> f64 {
        self.drift.iter().fold(0.0_f64, |m, d| m.max(*d))
    }

    fn segment_index(&self, t: f64) -> usize {
        let k = self.nodes.partition_point(|n| n.t <= t);
        k.saturating_sub(1)
            .min(self.segments.len().saturating_sub(1))
    }

    /// State at `t` from the continuous extension; node times return nodes exactly.
    pub fn state_at(&self, t: f64) -> Result<State> {
        let (lo, hi) = (self.t_start(), self.t_end());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let k = self.segment_index(t);
        if self.nodes[k].t == t {
            return Ok(self.nodes[k]);
        }
        if self.nodes[k + 1].t == t {
            return Ok(self.nodes[k + 1]);
        }
        Ok(State::from_array(t, &self.segments[k].eval(t)))
    }

    /// Integral of `f` over the span: five-point Gauss–Legendre per step.
    pub fn quadrature(&self, f: impl Fn(&State) -> f64) -> f64 {
        const X: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let mut total = 0.0;
        for k in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[k].t, self.nodes[k + 1].t);
            let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
            let seg = &self.segments[k];
            let mut s = 0.0;
            for i in 0..5 {
                let t = m + r * X[i];
                s += W[i] * f(&State::from_array(t, &seg.eval(t)));
            }
            total += r * s;
        }
        total
    }

    /// Root of `g` on `[t0, t1]` along the continuous extension.
    pub fn locate(&self, g: &dyn Fn(&State) -> f64, t0: f64, t1: f64) -> Result<f64> {
        let h = |t: f64| self.state_at(t).map(|s| g(&s)).unwrap_or(f64::NAN);
        brent(h, t0, t1, EVENT_TOL)
    }

    /// Nodes interleaved with `per_step` interpolated states inside each step.
    pub fn dense_samples(&self, per_step: usize) -> Vec<State> {
        let mut out = Vec::with_capacity(self.nodes.len() * (per_step + 1));
        for k in 0..self.nodes.len() - 1 {
            out.push(self.nodes[k]);
            let (a, b) = (self.nodes[k].t, self.nodes[k + 1].t);
            for j in 1..=per_step {
                let t = a + (b - a) * j as f64 / (per_step + 1) as f64;
                out.push(State::from_array(t, &self.segments[k].eval(t)));
            }
        }
        out.push(*self.end());
        out
    }
}

/// Interpolated states at the requested times.
pub fn resample(traj: &Trajectory, times: &[f64]) -> Result<Vec<State>> {
    times.iter().map(|t| traj.state_at(*t)).collect()
}

fn singular(s: &State) -> bool {
    s.lambda < LAMBDA_MIN || s.mu2() < MU2_MIN || s.max_abs() > BLOWUP
}

fn f_at(t: f64, y: &Vec7) -> Result<Vec7> {
    rhs(&State::from_array(t, y))
}

struct StepResult {
    y1: Vec7,
    k: [Vec7; 7],
    err: f64,
}

fn try_step(t: f64, y: &Vec7, k1: &Vec7, h: f64, tol: &Tolerances) -> Result<StepResult> {
    let mut k = [[0.0; 7]; 7];
    k[0] = *k1;
    for stage in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..7 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = f_at(t + C[stage] * h, &ys)?;
    }
    let mut y1 = *y;
    for j in 0..6 {
        let b = A[6][j];
        for i in 0..7 {
            y1[i] += h * b * k[j][i];
        }
    }
    let mut acc = 0.0;
    for i in 0..7 {
        let mut e = 0.0;
        for j in 0..7 {
            e += E[j] * k[j][i];
        }
        let sc = tol.abs + tol.rel * y[i].abs().max(y1[i].abs());
        acc += (h * e / sc).powi(2);
    }
    Ok(StepResult {
        y1,
        k,
        err: (acc / 7.0).sqrt(),
    })
}

fn dense(y0: &Vec7, r: &StepResult, h: f64) -> [Vec7; 5] {
    let mut out = [[0.0; 7]; 5];
    for i in 0..7 {
        let dy = r.y1[i] - y0[i];
        let bspl = h * r.k[0][i] - dy;
        out[0][i] = y0[i];
        out[1][i] = dy;
        out[2][i] = bspl;
        out[3][i] = dy - h * r.k[6][i] - bspl;
        let mut d = 0.0;
        for j in 0..7 {
            d += D[j] * r.k[j][i];
        }
        out[4][i] = h * d;
    }
    out
}

fn initial_step(t: f64, y: &Vec7, f0: &Vec7, tol: &Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..7 {
        let sc = tol.abs + tol.rel * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / 7.0).sqrt(), (d1 / 7.0).sqrt());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..7 {
        y1[i] += h0 * f0[i];
    }
    let d2 = match f_at(t + h0, &y1) {
        Ok(f1) => {
            let mut acc = 0.0;
            for i in 0..7 {
                let sc = tol.abs + tol.rel * y[i].abs();
                acc += ((f1[i] - f0[i]) / sc).powi(2);
            }
            (acc / 7.0).sqrt() / h0
        }
        Err(_) => return h0 * 1e-2,
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates forward from `start` until `horizon`, a terminal event or a singularity.
pub fn integrate(
    start: &State,
    horizon: f64,
    events: &[EventSpec],
    tol: Tolerances,
) -> Result<Trajectory> {
    if !start.is_admissible() {
        return Err(Error::Degenerate {
            reason: format!("start state at t = {} is not admissible", start.t),
        });
    }
    if !(horizon > start.t) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} must exceed the start time {}",
            start.t
        )));
    }
    let mut t = start.t;
    let mut y = start.to_array();
    let mut f0 = f_at(t, &y)?;
    let mut h = initial_step(t, &y, &f0, &tol);
    let mut nodes = vec![*start];
    let mut drift = vec![relative_drift(start)];
    let mut segments = Vec::new();
    let mut log = Vec::new();
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(start)).collect();
    let mut rejected = false;
    let termination;
    loop {
        if t >= horizon {
            termination = Termination::Horizon;
            break;
        }
        h = h.min(horizon - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepCollapse {
                last: State::from_array(t, &y),
            });
        }
        let step = match try_step(t, &y, &f0, h, &tol) {
            Ok(s) if s.err.is_finite() => s,
            _ => {
                h *= 0.25;
                rejected = true;
                continue;
            }
        };
        if step.err > 1.0 {
            h *= (0.9 * step.err.powf(-0.2)).max(0.2);
            rejected = true;
            continue;
        }
        let t1 = if horizon - (t + h) < 1e-14 * horizon.abs().max(1.0) {
            horizon
        } else {
            t + h
        };
        let seg = Segment {
            t0: t,
            h,
            r: dense(&y, &step, h),
        };
        let s1 = State::from_array(t1, &step.y1);
        segments.push(seg);
        nodes.push(s1);
        let d1 = relative_drift(&s1);
        drift.push(d1);

        let mut hit: Option<(f64, usize)> = None;
        let mut found = Vec::new();
        {
            let partial = Trajectory {
                nodes: nodes[nodes.len() - 2..].to_vec(),
                drift: Vec::new(),
                events: Vec::new(),
                termination: Termination::Horizon,
                segments: vec![segments.last().expect("segment pushed").clone()],
            };
            for (i, ev) in events.iter().enumerate() {
                let g1 = (ev.func)(&s1);
                if ev.triggered(g_prev[i], g1) {
                    let te = if g1 == 0.0 {
                        t1
                    } else {
                        partial.locate(ev.func.as_ref(), t, t1)?
                    };
                    found.push((te, i));
                    if ev.terminal && hit.is_none_or(|(th, _)| te < th) {
                        hit = Some((te, i));
                    }
                }
                g_prev[i] = g1;
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cutoff = hit.map(|(te, _)| te).unwrap_or(f64::INFINITY);
        for (te, i) in found {
            if te > cutoff {
                continue;
            }
            let st = State::from_array(te, &segments.last().expect("segment").eval(te));
            log.push(EventRecord {
                event: i,
                name: events[i].name.clone(),
                t: te,
                state: st,
            });
        }
        if let Some((te, _)) = hit {
            let st = if te == t1 {
                s1
            } else {
                State::from_array(te, &segments.last().expect("segment").eval(te))
            };
            *nodes.last_mut().expect("node") = st;
            *drift.last_mut().expect("drift") = relative_drift(&st);
            termination = Termination::Event;
            break;
        }
        if d1 > DRIFT_ABORT {
            return Err(Error::ConstraintDrift { t: t1, drift: d1 });
        }
        if singular(&s1) {
            termination = Termination::Singularity;
            break;
        }
        let fac =
            (0.9 * step.err.max(1e-10).powf(-0.2)).clamp(0.2, if rejected { 1.0 } else { 5.0 });
        rejected = false;
        t = t1;
        y = step.y1;
        f0 = step.k[6];
        h *= fac;
    }
    Ok(Trajectory {
        nodes,
        drift,
        events: log,
        termination,
        segments,
    })
}
