use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use nkcoh::closed_forms::{NamedSolution, ResidualReport};
use nkcoh::integrator::Tolerances;
use nkcoh::output::{curve_csv, fig2_svg, series_csv, to_json, trajectory_csv, write_atomic, Mark};
use nkcoh::series::{
    series_psi_a, series_psi_a_bubble, series_psi_a_large, series_psi_b, series_psi_b_bubble,
};
use nkcoh::shooting::{
    run_family, scan_s2xs4, solve_target, table2, trace_curve, Family, ShootingOptions, Target,
};

#[derive(Parser, Debug)]
#[command(
    name = "nkcoh",
    version,
    about = "Cohomogeneity-one nearly Kähler solver"
)]
struct Cli {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (written atomically); standard output when absent.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    rtol: Option<f64>,
    #[arg(long, global = true)]
    atol: Option<f64>,
    /// Series truncation order.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residuals of the closed-form solutions and of the series recurrences.
    Verify {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Taylor coefficients as CSV.
    Series {
        /// alpha, beta, alpha-bubble, beta-bubble or alpha-large.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        param: Option<f64>,
    },
    /// Trajectory from the handoff to the maximal volume orbit as CSV.
    Traj {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        param: Option<f64>,
    },
    /// Maximal volume orbits along a parameter range as CSV.
    Trace {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Largest H-plane distance between consecutive samples.
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// One complete solution as JSON.
    Solve {
        /// s3xs3-exotic, s6-exotic, cp3, s3s3-homog or s6-homog.
        #[arg(long)]
        target: Option<String>,
    },
    /// All rows of the table of complete solutions as JSON.
    Table2,
    /// The alpha and beta curves in the H-plane.
    Fig2 {
        /// Emit SVG instead of JSON point lists.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Scan of the alpha curve for the `λ = 1` boundary.
    Scan {
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Solver(_) => 2,
            Failure::Config(_) => 3,
        }
    }

    fn record(&self) -> String {
        let (kind, msg) = match self {
            Failure::Solver(m) => ("solver", m),
            Failure::Config(m) => ("config", m),
        };
        json!({"error": kind, "message": msg, "exit_code": self.code()}).to_string()
    }
}

impl From<nkcoh::Error> for Failure {
    fn from(e: nkcoh::Error) -> Self {
        match e {
            nkcoh::Error::InvalidArgument(m) => Failure::Config(m),
            e => Failure::Solver(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Flags, then the config file, then defaults.
struct Settings {
    file: HashMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Outcome<Self> {
        let mut file = HashMap::new();
        if let Some(p) = path {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", p.display())))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Failure::Config(format!("config line {}: expected key = value", n + 1))
                })?;
                file.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Settings { file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: Option<T>) -> Outcome<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(s) = self.file.get(key) {
            return s
                .parse()
                .map_err(|_| Failure::Config(format!("config key `{key}`: cannot parse `{s}`")));
        }
        default.ok_or_else(|| Failure::Config(format!("missing required setting `{key}`")))
    }

    fn positive(&self, flag: Option<f64>, key: &str, default: Option<f64>) -> Outcome<f64> {
        let v = self.get(flag, key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Config(format!(
                "`{key}` must be positive, got {v}"
            )));
        }
        Ok(v)
    }

    fn range(&self, lo: Option<f64>, hi: Option<f64>, default: (f64, f64)) -> Outcome<(f64, f64)> {
        let lo = self.positive(lo, "lo", Some(default.0))?;
        let hi = self.positive(hi, "hi", Some(default.1))?;
        if !(hi > lo) {
            return Err(Failure::Config(format!(
                "range [{lo}, {hi}] is not ordered"
            )));
        }
        Ok((lo, hi))
    }
}

fn parse<T: FromStr<Err = nkcoh::Error>>(s: &str) -> Outcome<T> {
    s.parse().map_err(Failure::from)
}

#[derive(Serialize)]
struct SeriesCheck {
    family: String,
    param: f64,
    max_residual: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    named: Vec<ResidualReport>,
    series: Vec<SeriesCheck>,
    pass: bool,
}

fn verify(samples: usize, order: usize) -> Outcome<VerifyReport> {
    let named: Vec<ResidualReport> = NamedSolution::ALL
        .into_iter()
        .map(|n| n.residual_report(samples))
        .collect::<Result<_, _>>()?;
    let mut series = Vec::new();
    for p in [0.3, 1.0, 3f64.sqrt(), 3.0] {
        for ss in [
            series_psi_a(p, order)?,
            series_psi_b(p, order)?,
            series_psi_a_bubble(p, order)?,
            series_psi_a_large(p, order)?,
        ] {
            series.push(SeriesCheck {
                family: ss.family.to_string(),
                param: p,
                max_residual: ss.max_recurrence_residual(),
            });
        }
    }
    let pass = named.iter().all(|r| {
        r.system < 1e-12
            && r.constraints < 1e-13
            && ((r.volume - r.volume_exact) / r.volume_exact).abs() < 1e-9
    }) && series.iter().all(|s| s.max_residual < 1e-12);
    Ok(VerifyReport {
        named,
        series,
        pass,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes())
            .map_err(|e| Failure::Solver(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(Failure::Solver(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let st = Settings::load(cli.config.as_deref())?;
    let rel = st.positive(cli.rtol, "rtol", Some(Tolerances::default().rel))?;
    let abs = st.positive(cli.atol, "atol", Some(Tolerances::default().abs))?;
    let order = st.get(cli.order, "order", Some(ShootingOptions::default().order))?;
    if order < 4 {
        return Err(Failure::Config(format!(
            "series order must be at least 4, got {order}"
        )));
    }
    let out = match cli.out {
        Some(p) => Some(p),
        None => st.file.get("out").map(PathBuf::from),
    };
    let opts = ShootingOptions {
        order,
        tol: Tolerances { rel, abs },
        ..ShootingOptions::default()
    };
    let text = match cli.command {
        Command::Verify { samples } => {
            let n = st.get(samples, "samples", Some(1000))?;
            let report = verify(n, order)?;
            emit(out.as_deref(), &to_json(&report))?;
            if !report.pass {
                return Err(Failure::Solver("verification failed".into()));
            }
            return Ok(());
        }
        Command::Series { family, param } => {
            let family: String = st.get(family, "family", None)?;
            let p = st.get(param, "param", None)?;
            let ss = match family.as_str() {
                "alpha" => series_psi_a(p, order),
                "beta" => series_psi_b(p, order),
                "alpha-bubble" => series_psi_a_bubble(p, order),
                "beta-bubble" => series_psi_b_bubble(p, order),
                "alpha-large" => series_psi_a_large(p, order),
                f => return Err(Failure::Config(format!("unknown series family `{f}`"))),
            }?;
            series_csv(&ss)
        }
        Command::Traj { family, param } => {
            let family: Family = parse(&st.get::<String>(family, "family", None)?)?;
            let p = st.positive(param, "param", None)?;
            trajectory_csv(&run_family(family, p, &opts)?.trajectory)
        }
        Command::Trace {
            family,
            lo,
            hi,
            samples,
            spacing,
        } => {
            let family: Family = parse(&st.get::<String>(family, "family", None)?)?;
            let (lo, hi) = st.range(lo, hi, (0.1, 3.0))?;
            let n = st.get(samples, "samples", Some(40))?;
            let spacing =
                match spacing.or_else(|| st.file.get("spacing").and_then(|s| s.parse().ok())) {
                    Some(s) if s > 0.0 => Some(s),
                    Some(s) => {
                        return Err(Failure::Config(format!(
                            "`spacing` must be positive, got {s}"
                        )))
                    }
                    None => None,
                };
            curve_csv(&trace_curve(family, lo, hi, n, spacing, &opts)?)
        }
        Command::Solve { target } => {
            let target: Target = parse(&st.get::<String>(target, "target", None)?)?;
            to_json(&solve_target(target, &opts)?.summary())
        }
        Command::Table2 => to_json(&table2(&opts)?),
        Command::Fig2 { svg, samples } => {
            let n = st.get(samples, "samples", Some(60))?;
            let alpha = trace_curve(Family::Alpha, 0.02, 3.0, n, Some(0.02), &opts)?;
            let beta = trace_curve(Family::Beta, 0.02, 1.6, n, Some(0.02), &opts)?;
            if svg {
                let mut marks = Vec::new();
                for t in Target::ALL {
                    let g = solve_target(t, &opts)?;
                    marks.push(Mark {
                        label: t.name().to_string(),
                        point: g.left.record.h_point(),
                    });
                }
                fig2_svg(&alpha, &beta, &marks)
            } else {
                to_json(
                    &json!({"alpha": alpha.h_points(), "alpha_params": alpha.params(),
                    "beta": beta.h_points(), "beta_params": beta.params()}),
                )
            }
        }
        Command::Scan { lo, hi, samples } => {
            let (lo, hi) = st.range(lo, hi, (0.1, 10.0))?;
            let n = st.get(samples, "samples", Some(120))?;
            let scan = scan_s2xs4(lo, hi, n, &opts)?;
            for r in scan.s2xs4_roots() {
                eprintln!(
                    "WARNING: alpha reaches the lambda = 1 boundary at a = {} (lambda = {}, mu = {}): candidate S2xS4 doubling",
                    r.0, r.1, r.2
                );
            }
            to_json(&scan)
        }
    };
    emit(out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let f = Failure::Config(e.kind().to_string());
            eprintln!("{}", f.record());
            return ExitCode::from(f.code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
