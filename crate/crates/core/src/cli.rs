//! Command-line front end. All output is JSON (or CSV for indicatrix dumps)
//! carrying a schema version; the same arguments and seed give identical bytes.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::sample_indicatrix;
use crate::extremal::Problem;
use crate::geodesics::{left_inverse_for, verify_left_inverse, GeodesicParams, GeodesicRef, VALIDITY_GRID, VALIDITY_RADIUS};
use crate::metrics::{kappa, kobayashi_distance_with};
use crate::oracle::{sandwich, Budget};
use crate::verify::{run_suite, Suite, VerifyConfig, SCHEMA_VERSION};
use crate::{DomainSpec, Error, Point2, Result, Tangent2, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "lempertkit", version, about = "Invariant distances and metrics on the diamond and convex ellipsoids")]
pub struct Cli {
    /// Output format (indicatrix defaults to csv, everything else to json).
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Tolerances and oracle budget shared by the computing subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Certification width for distances and metrics.
    #[arg(long, default_value_t = 2e-4)]
    pub width: f64,
    /// Allowed slack between a metric value and its certificate.
    #[arg(long, default_value_t = 1e-6)]
    pub slack: f64,
    /// Largest polynomial degree of oracle discs.
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Oracle restarts per degree.
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("width", self.width), ("slack", self.slack)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.degree == 0 || self.degree > crate::oracle::MAX_DEGREE {
            return Err(Error::Precondition(format!("--degree must be in 1..={}", crate::oracle::MAX_DEGREE)));
        }
        if self.restarts == 0 {
            return Err(Error::Precondition("--restarts must be positive".into()));
        }
        Ok(())
    }

    fn budget(&self) -> Budget {
        Budget { max_degree: self.degree, restarts: self.restarts, seed: self.seed, width_target: self.width }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kobayashi distance between two points.
    Dist {
        /// disc, ball, diamond or ellipsoid:q1,q2.
        #[arg(long)]
        domain: String,
        /// First point as re,im,re,im.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Second point as re,im,re,im.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Kobayashi–Royden metric at a point along a tangent vector.
    Metric {
        /// disc, ball, diamond or ellipsoid:q1,q2.
        #[arg(long)]
        domain: String,
        /// Point as re,im,re,im.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Tangent vector as re,im,re,im.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Evaluate and validate a geodesic of the diamond given as JSON.
    Geodesic {
        /// Inline JSON or a path to a JSON file.
        #[arg(long)]
        params: String,
        /// Evaluation points as re,im (repeatable).
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
    },
    /// Sample the indicatrix along low-discrepancy directions.
    Indicatrix {
        /// disc, ball, diamond or ellipsoid:q1,q2.
        #[arg(long)]
        domain: String,
        /// Base point as re,im,re,im.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Number of sampled directions.
        #[arg(long, default_value_t = 1000)]
        directions: usize,
        /// Also classify each direction as FLAT, STRICT or INCONCLUSIVE.
        #[arg(long)]
        classify: bool,
    },
    /// Run a verification suite.
    Verify {
        /// formulas, geodesics, indicatrix, rigidity or all.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Seed for every random choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certified pairs per rigidity candidate.
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        /// Side of the (t, s) grid for the distance identities.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Directions per indicatrix sample.
        #[arg(long, default_value_t = 1000)]
        directions: usize,
        /// Random base points per strictly convex domain.
        #[arg(long = "base-points", default_value_t = 5)]
        base_points: usize,
        /// Random geodesics to test.
        #[arg(long, default_value_t = 100)]
        geodesics: usize,
        /// Random real-linear rigidity candidates.
        #[arg(long = "random-linear", default_value_t = 1000)]
        random_linear: usize,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_reals(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{what}: '{t}' is not a number"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} comma-separated reals, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(v)
}

pub fn parse_point(s: &str) -> Result<Point2> {
    let v = parse_reals(s, 4, "point")?;
    Ok(Point2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3])))
}

pub fn parse_tangent(s: &str) -> Result<Tangent2> {
    let v = parse_reals(s, 4, "tangent")?;
    Ok(Tangent2::new(C64::new(v[0], v[1]), C64::new(v[2], v[3])))
}

pub fn parse_lambda(s: &str) -> Result<C64> {
    let v = parse_reals(s, 2, "lambda")?;
    Ok(C64::new(v[0], v[1]))
}

fn parse_params(s: &str) -> Result<GeodesicParams> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| Error::Parse(format!("cannot read {s}: {e}")))?
    };
    let g: GeodesicParams = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("geodesic JSON: {e}")))?;
    GeodesicParams::new(g.a, g.alpha, g.r, g.alpha0)
}

/// Output text and exit code of one command.
struct Outcome {
    text: String,
    code: i32,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_dist(domain: &str, w: &str, z: &str, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let domain: DomainSpec = domain.parse()?;
    let (w, z) = (parse_point(w)?, parse_point(z)?);
    let d = kobayashi_distance_with(&domain, &w, &z, &cfg.budget())?;
    let certified = d.certified && d.width < cfg.width;
    let witnesses = d.certificate.as_ref().map(|c| json!({ "lower": c.lower_witness, "upper": c.upper_witness }));
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "dist",
        "domain": domain,
        "w": w,
        "z": z,
        "config": cfg,
        "value": d.value,
        "lower": d.lower,
        "upper": d.upper,
        "width": d.width,
        "certified": certified,
        "achiever": d.achiever,
        "witnesses": witnesses,
    });
    Ok(Outcome { text: to_json(&out), code: if certified { EXIT_OK } else { EXIT_UNCERTIFIED } })
}

fn cmd_metric(domain: &str, z: &str, x: &str, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let domain: DomainSpec = domain.parse()?;
    let (z, x) = (parse_point(z)?, parse_tangent(x)?);
    let m = kappa(&domain, &z, &x)?;
    let s = if x.is_zero() { None } else { Some(sandwich(&domain, &Problem::Tangent(z, x), &cfg.budget())?) };
    let (lower, upper, width, certified) = match &s {
        None => (0.0, 0.0, 0.0, true),
        Some(s) => {
            let inside = m.value >= s.lower - cfg.slack && m.value <= s.upper + cfg.slack;
            (s.lower, s.upper, s.width, s.certified && s.width < cfg.width && inside)
        }
    };
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "metric",
        "domain": domain,
        "z": z,
        "x": x,
        "config": cfg,
        "value": m.value,
        "achiever": m.achiever,
        "lower": lower,
        "upper": upper,
        "width": width,
        "certified": certified,
        "witnesses": s.as_ref().map(|s| json!({ "lower": s.lower_witness, "upper": s.upper_witness })),
    });
    Ok(Outcome { text: to_json(&out), code: if certified { EXIT_OK } else { EXIT_UNCERTIFIED } })
}

fn cmd_geodesic(params: &str, lambdas: &[String]) -> Result<Outcome> {
    let g = parse_params(params)?;
    let mut evals = Vec::new();
    for l in lambdas {
        let lam = crate::UnitDiscPoint::new(parse_lambda(l)?)?;
        evals.push(json!({ "lambda": lam.value(), "point": crate::geodesics::evaluate_geodesic(&g, lam) }));
    }
    let boundary_max = g.boundary_max(VALIDITY_GRID, VALIDITY_RADIUS);
    let valid = boundary_max < 1.0;
    let (left_inverse, residual, note) = if g.has_full_zero_set() {
        match left_inverse_for(&g) {
            Ok(f) => (Some(f), Some(verify_left_inverse(&f, GeodesicRef::Complex(&g), 64)), None),
            Err(e) => (None, None, Some(e.to_string())),
        }
    } else {
        (None, None, Some(format!("zero set {:?} is not [1, 2]", g.zero_set())))
    };
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "geodesic",
        "params": g,
        "zero_set": g.zero_set(),
        "valid": valid,
        "boundary_max": boundary_max,
        "evaluations": evals,
        "left_inverse": left_inverse,
        "left_inverse_residual": residual,
        "left_inverse_note": note,
    });
    Ok(Outcome { text: to_json(&out), code: if valid { EXIT_OK } else { EXIT_VERIFY_FAILED } })
}

fn cmd_indicatrix(domain: &str, z: &str, directions: usize, classify: bool, format: Format) -> Result<Outcome> {
    let domain: DomainSpec = domain.parse()?;
    let z = parse_point(z)?;
    if directions == 0 {
        return Err(Error::Precondition("--directions must be positive".into()));
    }
    let mut s = sample_indicatrix(&domain, &z, directions)?;
    if classify {
        s.classify()?;
    }
    let text = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
        Format::Json => to_json(&json!({ "schema_version": SCHEMA_VERSION, "command": "indicatrix", "sample": s })),
    };
    Ok(Outcome { text, code: EXIT_OK })
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Dist { domain, w, z, config } => cmd_dist(domain, w, z, config),
        Command::Metric { domain, z, x, config } => cmd_metric(domain, z, x, config),
        Command::Geodesic { params, lambdas } => cmd_geodesic(params, lambdas),
        Command::Indicatrix { domain, z, directions, classify } => {
            cmd_indicatrix(domain, z, *directions, *classify, format.unwrap_or(Format::Csv))
        }
        Command::Verify { suite, seed, pairs, grid, directions, base_points, geodesics, random_linear } => {
            let cfg = VerifyConfig {
                seed: *seed,
                grid: *grid,
                directions: *directions,
                base_points: *base_points,
                geodesics: *geodesics,
                pairs: *pairs,
                random_linear: *random_linear,
            };
            let report = run_suite(*suite, &cfg)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(stderr, "FAILED {}: measured {:.6e}, tolerance {:.6e}", c.name, c.measured, c.tolerance);
            }
            let code = if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
            Ok(Outcome { text: to_json(&report), code })
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("LEMPERTKIT_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Parse(format!("LEMPERTKIT_THREADS='{v}' is not a count")))?;
        if n == 0 {
            return Err(Error::Parse("LEMPERTKIT_THREADS must be positive".into()));
        }
        // a pool configured earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Uncertified { .. } | Error::InsufficientCertification { .. } | Error::NoAdmissibleDisc(_) => EXIT_UNCERTIFIED,
        _ => EXIT_BAD_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_BAD_INPUT;
    }
    let outcome = match execute(&cli, stderr) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| e.to_string()),
        None => stdout.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_BAD_INPUT;
    }
    outcome.code
}
