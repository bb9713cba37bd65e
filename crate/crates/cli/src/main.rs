use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use hausdorff_bergman::halfplane::parse_complex;
use hausdorff_bergman::harness::{
    all_passed, default_suite, run_sharpness_sweep, run_truncated_norm_experiment,
    sharpness_report, Suite, VerificationReport, DEFAULT_EPSILONS,
};
use hausdorff_bergman::operator::apply_quasi_direct;
use hausdorff_bergman::quadrature::bergman_norm_p;
use hausdorff_bergman::{
    Error, FunctionSpec, HalfPlaneFunction, HalfPlanePoint, HausdorffOperator, Measure, Moment,
    QuadratureConfig,
};
use num_complex::Complex64;

/// Hausdorff operators on Bergman spaces of the upper half-plane.
///
/// Exit codes: 0 success, 1 numeric or verification failure, 2 usage or
/// configuration error.
#[derive(Parser)]
#[command(name = "hausdorff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Quad {
    /// Relative tolerance
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    /// Absolute tolerance
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Subdivision budget per adaptive integral
    #[arg(long, default_value_t = 2000)]
    max_subdiv: usize,
    /// Truncation radius for half-plane integrals (default: from decay)
    #[arg(long)]
    radius: Option<f64>,
}

impl Quad {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdiv,
            halfplane_truncation_radius: self.radius,
            ..QuadratureConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate H_mu f (or the quasi operator) at a point or a batch of points
    Apply {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short, long)]
        function: String,
        /// Point as "x+yi" (sign mandatory)
        #[arg(short = 'z', long, conflicts_with = "points")]
        point: Option<String>,
        /// File with one point per line; prints CSV x,y,re,im,err
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(short, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        delta: Option<f64>,
        /// Apply the quasi-Hausdorff operator instead
        #[arg(long)]
        quasi: bool,
        /// With --quasi, integrate t f(tz) directly instead of via the push-forward
        #[arg(long, requires = "quasi")]
        direct: bool,
        /// Write batch CSV here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Bergman norm of f, or of H_mu f when a measure is given
    Norm {
        #[arg(short, long)]
        function: String,
        #[arg(short)]
        p: f64,
        #[arg(short, long)]
        measure: Option<PathBuf>,
        #[arg(long, requires = "measure")]
        delta: Option<f64>,
        #[arg(long, requires = "measure")]
        quasi: bool,
        #[command(flatten)]
        quad: Quad,
    },
    /// Moment of a measure, either at --alpha or at 2/p - 1
    Moment {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short, conflicts_with = "alpha", required_unless_present = "alpha")]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Boundedness of H_mu on A^p from endpoint exponents
    Classify {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short)]
        p: f64,
    },
    /// Sharpness sweep of ||H_mu f_eps|| / ||f_eps||
    Sweep {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short)]
        p: f64,
        /// Comma-separated, strictly decreasing
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
        /// Directory for sweep.json
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Run a verification suite and write reports.json and reports.csv
    Verify {
        /// Suite config (JSON); the built-in suite when omitted
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        #[command(flatten)]
        quad: Quad,
    },
    /// Two-column (eps, ratio) data files from sweep reports
    #[command(alias = "report")]
    Plotdata {
        /// reports.json or sweep.json
        #[arg(short, long)]
        reports: PathBuf,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

/// Failure classes that map onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DivergentIntegral(_) => {
                Failure::Numeric(anyhow!("moment diverges; supply --delta"))
            }
            Error::InvalidMeasure(_)
            | Error::MissingExponentMetadata { .. }
            | Error::ParameterOutOfRange(_)
            | Error::InvalidPoint(_)
            | Error::FunctionSpec(_)
            | Error::Json(_) => Failure::Usage(e.into()),
            _ => Failure::Numeric(e.into()),
        }
    }
}

fn usage(e: anyhow::Error) -> Failure {
    Failure::Usage(e)
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Apply {
            measure,
            function,
            point,
            points,
            p,
            delta,
            quasi,
            direct,
            output,
            quad,
        } => {
            let mu = load_measure(&measure)?;
            let f = load_function(&function)?;
            let cfg = quad.config();
            let eval = |z: HalfPlanePoint| -> Result<(Complex64, f64), Failure> {
                let r = if quasi && direct {
                    let mu = match delta {
                        Some(d) => mu.truncate(d)?,
                        None => mu.clone(),
                    };
                    apply_quasi_direct(&mu, p, &f, z, &cfg)?
                } else {
                    operator(&mu, p, delta, quasi)?.apply(&f, z, &cfg)?
                };
                Ok((r.value, r.error_estimate))
            };
            match (point, points) {
                (Some(z), None) => {
                    let (v, err) = eval(parse_point(&z)?)?;
                    println!("value = {}", format_complex(v));
                    println!("error_estimate = {err:e}");
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(usage)?;
                    let sink: Box<dyn Write> = match &output {
                        Some(o) => Box::new(
                            fs::File::create(o)
                                .with_context(|| format!("creating {}", o.display()))
                                .map_err(usage)?,
                        ),
                        None => Box::new(io::stdout()),
                    };
                    let mut w = csv::Writer::from_writer(sink);
                    let io_err = |e: csv::Error| Failure::Numeric(e.into());
                    w.write_record(["x", "y", "re", "im", "err"])
                        .map_err(io_err)?;
                    for line in text
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    {
                        let z = parse_point(line)?;
                        let (v, err) = eval(z)?;
                        w.write_record([
                            z.x().to_string(),
                            z.y().to_string(),
                            format!("{:e}", v.re),
                            format!("{:e}", v.im),
                            format!("{err:e}"),
                        ])
                        .map_err(io_err)?;
                    }
                    w.flush().map_err(|e| Failure::Numeric(e.into()))?;
                }
                _ => return Err(usage(anyhow!("give exactly one of --point or --points"))),
            }
            Ok(true)
        }
        Command::Norm {
            function,
            p,
            measure,
            delta,
            quasi,
            quad,
        } => {
            let cfg = quad.config();
            let f = load_function(&function)?;
            let nf = bergman_norm_p(&f, p, &cfg)?;
            let Some(path) = measure else {
                println!("norm = {}", nf.value);
                println!("error_estimate = {:e}", nf.error_estimate);
                return Ok(true);
            };
            let mu = load_measure(&path)?;
            let op = operator(&mu, p, delta, quasi)?;
            let inner = QuadratureConfig {
                rel_tol: cfg.rel_tol * 0.1,
                abs_tol: cfg.abs_tol * 0.1,
                ..cfg.clone()
            };
            let nh = bergman_norm_p(&op.as_function(&f, &inner)?, p, &cfg)?;
            println!("norm = {}", nh.value);
            println!("error_estimate = {:e}", nh.error_estimate);
            println!("input_norm = {}", nf.value);
            println!("ratio = {}", nh.value / nf.value);
            println!(
                "theoretical_norm = {}",
                format_moment(op.theoretical_norm(&cfg)?)
            );
            Ok(true)
        }
        Command::Moment {
            measure,
            p,
            alpha,
            delta,
            quad,
        } => {
            let mut mu = load_measure(&measure)?;
            if let Some(d) = delta {
                mu = mu.truncate(d)?;
            }
            let alpha = match (alpha, p) {
                (Some(a), _) => a,
                (None, Some(p)) if p >= 1.0 => 2.0 / p - 1.0,
                (None, Some(p)) => return Err(usage(anyhow!("p = {p}, expected p >= 1"))),
                (None, None) => return Err(usage(anyhow!("give -p or --alpha"))),
            };
            let m = mu.moment(alpha, &quad.config())?;
            println!("{}", format_moment(m));
            if let Moment::Finite { error, .. } = m {
                println!("error_estimate = {error:e}");
            }
            Ok(true)
        }
        Command::Classify { measure, p } => {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(usage(anyhow!("p = {p}, expected 1 <= p < inf")));
            }
            println!("{}", load_measure(&measure)?.classify(p));
            Ok(true)
        }
        Command::Sweep {
            measure,
            p,
            eps,
            delta,
            output,
            quad,
        } => {
            let mu = load_measure(&measure)?;
            let cfg = quad.config();
            let eps = eps.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
            let report = match delta {
                Some(d) => run_truncated_norm_experiment(&mu, p, d, &eps, &cfg),
                None => {
                    // surfaces divergence as an error instead of a failed report
                    run_sharpness_sweep(&mu, p, &eps, &cfg)?;
                    sharpness_report(&mu, p, &eps, &cfg)
                }
            };
            let Some(sweep) = &report.sweep else {
                return Err(Failure::Numeric(anyhow!("{}", report.notes.join("; "))));
            };
            println!("epsilon,ratio,error");
            for ((e, r), err) in sweep
                .epsilons
                .iter()
                .zip(&sweep.ratios)
                .zip(&sweep.ratio_errors)
            {
                println!("{e},{r},{err:e}");
            }
            println!("target = {}", sweep.target);
            println!("extrapolated = {}", sweep.extrapolated);
            println!("{}", if report.passed { "PASS" } else { "FAIL" });
            if let Some(dir) = output {
                write_json(&dir.join("sweep.json"), std::slice::from_ref(&report))?;
            }
            Ok(report.passed)
        }
        Command::Verify {
            config,
            output,
            quad,
        } => {
            let suite = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(usage)?;
                    Suite::from_json(&text)
                        .with_context(|| format!("parsing suite {}", path.display()))
                        .map_err(usage)?
                }
                None => default_suite(),
            };
            let reports = suite.run(&quad.config())?;
            for r in &reports {
                println!(
                    "{} {} {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.experiment,
                    serde_json::to_string(&r.parameters).unwrap_or_default()
                );
            }
            fs::create_dir_all(&output)
                .with_context(|| format!("creating {}", output.display()))
                .map_err(usage)?;
            write_json(&output.join("reports.json"), &reports)?;
            write_csv(&output.join("reports.csv"), &reports)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} reports, {failed} failed", reports.len());
            Ok(all_passed(&reports))
        }
        Command::Plotdata { reports, output } => {
            let text = fs::read_to_string(&reports)
                .with_context(|| format!("reading {}", reports.display()))
                .map_err(usage)?;
            let parsed: Vec<VerificationReport> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", reports.display()))
                .map_err(usage)?;
            fs::create_dir_all(&output)
                .with_context(|| format!("creating {}", output.display()))
                .map_err(usage)?;
            let mut written = 0;
            for (i, r) in parsed.iter().enumerate() {
                let Some(sweep) = &r.sweep else { continue };
                let mut body = format!("# target = {}\n# epsilon ratio\n", sweep.target);
                for (e, v) in sweep.epsilons.iter().zip(&sweep.ratios) {
                    body.push_str(&format!("{e} {v}\n"));
                }
                let path = output.join(format!("{}_{i}.dat", r.experiment));
                fs::write(&path, body)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(usage)?;
                println!("{}", path.display());
                written += 1;
            }
            if written == 0 {
                return Err(usage(anyhow!("no sweep reports in {}", reports.display())));
            }
            Ok(true)
        }
    }
}

fn operator(
    mu: &Measure,
    p: f64,
    delta: Option<f64>,
    quasi: bool,
) -> Result<HausdorffOperator, Failure> {
    let op = if quasi {
        HausdorffOperator::quasi(mu, p)?
    } else {
        HausdorffOperator::new(mu.clone(), p)?
    };
    Ok(match delta {
        Some(d) => op.with_truncation(d)?,
        None => op,
    })
}

fn load_measure(path: &Path) -> Result<Measure, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading measure {}", path.display()))
        .map_err(usage)?;
    Measure::from_json(&text)
        .with_context(|| format!("parsing measure {}", path.display()))
        .map_err(usage)
}

fn load_function(spec: &str) -> Result<HalfPlaneFunction, Failure> {
    let spec: FunctionSpec = spec.parse()?;
    Ok(spec.to_function()?)
}

fn parse_point(s: &str) -> Result<HalfPlanePoint, Failure> {
    Ok(HalfPlanePoint::from_complex(parse_complex(s)?)?)
}

fn format_moment(m: Moment) -> String {
    match m {
        Moment::Finite { value, .. } => value.to_string(),
        Moment::Divergent => "inf".into(),
    }
}

/// `a+bi` with round-trip floats; components below `1e-14·|z|` print as 0.
fn format_complex(z: Complex64) -> String {
    let tiny = 1e-14 * z.norm();
    let clean = |v: f64| if v.abs() <= tiny { 0.0 } else { v + 0.0 };
    let (re, im) = (clean(z.re), clean(z.im));
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re}{sign}{}i", im.abs())
}

fn write_json(path: &Path, reports: &[VerificationReport]) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(reports).map_err(|e| Failure::Numeric(e.into()))?;
    text.push('\n');
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

fn write_csv(path: &Path, reports: &[VerificationReport]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(usage)?;
    let io_err = |e: csv::Error| Failure::Numeric(e.into());
    w.write_record(VerificationReport::CSV_HEADER)
        .map_err(io_err)?;
    for r in reports {
        w.write_record(r.csv_record()).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::Numeric(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(-0.25, -3e-17)), "-0.25+0i");
        assert_eq!(format_complex(Complex64::new(1.5, -2.0)), "1.5-2i");
        assert_eq!(format_complex(Complex64::new(-0.0, 0.5)), "0+0.5i");
    }
}
