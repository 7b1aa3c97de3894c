//! Command-line front end: grid evaluation, scale conversion, sampling,
//! jump simulation, and verification suites emitting CSV or JSON.
//!
//! Exit codes: 0 success, 1 a verification suite found a failing check,
//! 2 argument or spec-file errors, 3 numerical failures.

mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use levycop::copulas::{copula_eval, sample_archimedean, sample_independence, CopulaSample};
use levycop::generators::{clayton_radial, williamson_inverse, RadialKind, RadialMeasure};
use levycop::levy::{levy_eval, levy_to_proper};
use levycop::records::simulate_replicates;
use levycop::specfile::{
    convert_spec, BuiltSpec, CopulaFamilyNode, PsiFamilyNode, SpecFile,
};
use levycop::numerics::ToleranceConfig;
use levycop::Error;

#[derive(Parser)]
#[command(name = "levycop", version, about = "Copulas on both scales: evaluate, convert, sample, simulate, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the object described by a spec file on a grid
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Per-axis ranges "a:b:n", comma-separated, e.g. "0:1:11,0:1:11"
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Absolute and relative tolerance for quadrature and inversion
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Convert a spec to the other scale and report the round-trip residual
    Convert {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a named verification suite
    Verify {
        #[arg(long, value_enum)]
        suite: suites::Suite,
        /// Optional spec file to verify instead of the built-in defaults
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Replicates / sample points (suite-specific default otherwise)
        #[arg(long)]
        n: Option<usize>,
        /// Truncation radius override for simulation suites
        #[arg(long)]
        eps: Option<f64>,
        /// Horizon override for simulation suites
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a reproducible sample from a copula spec
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Simulate truncated jump-process replicates from a jump-process spec
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Number of replicates
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Honor LEVYCOP_THREADS; otherwise rayon picks the core count.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("LEVYCOP_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Parse(_) | Error::Degenerate(_) => 2,
        Error::Range { .. } | Error::Numeric { .. } | Error::Eval(_) => 3,
    }
}

fn tolerances(tol: Option<f64>) -> levycop::Result<ToleranceConfig> {
    let mut cfg = ToleranceConfig::default();
    if let Some(t) = tol {
        cfg.abs_tol = t;
        cfg.rel_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_spec(path: &Path) -> levycop::Result<SpecFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::argument(format!("cannot read {}: {e}", path.display())))?;
    SpecFile::parse(&text)
}

fn write_out(out: Option<&PathBuf>, content: &str) -> levycop::Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::argument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> levycop::Result<u8> {
    match cmd {
        Command::Eval {
            spec,
            grid,
            out,
            format,
            tol,
        } => cmd_eval(&spec, &grid, out.as_ref(), format, tol),
        Command::Convert { spec, out, tol } => cmd_convert(&spec, out.as_ref(), tol),
        Command::Verify {
            suite,
            spec,
            seed,
            n,
            eps,
            horizon,
            tol,
            out,
        } => {
            let cfg = tolerances(tol)?;
            let args = suites::SuiteArgs {
                seed,
                n,
                eps,
                horizon,
                spec: spec.as_ref().map(|p| read_spec(p)).transpose()?,
                cfg,
            };
            let output = suites::run_suite(suite, &args)?;
            for line in &output.lines {
                println!("{line}");
            }
            let doc = json!({
                "suite": output.suite,
                "pass": output.pass,
                "reports": output.reports,
            });
            if let Some(path) = out.as_ref() {
                write_out(Some(path), &format!("{:#}\n", doc))?;
            }
            Ok(if output.pass { 0 } else { 1 })
        }
        Command::Sample {
            spec,
            n,
            seed,
            out,
            format,
            tol,
        } => cmd_sample(&spec, n, seed, out.as_ref(), format, tol),
        Command::Simulate {
            spec,
            n,
            seed,
            out,
            tol,
        } => cmd_simulate(&spec, n, seed, out.as_ref(), tol),
    }
}

/// Per-axis ranges "a:b:n" with n equally spaced points, a alone when n=1.
fn parse_axis(s: &str) -> levycop::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid axis '{s}': want a:b:n")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("grid axis '{s}': bad start")))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("grid axis '{s}': bad end")))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("grid axis '{s}': bad count")))?;
    if n == 0 {
        return Err(Error::Parse(format!("grid axis '{s}': count must be >= 1")));
    }
    if !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::Parse(format!("grid axis '{s}': bad range")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn parse_grid(s: &str) -> levycop::Result<Vec<Vec<f64>>> {
    let axes: Vec<Vec<f64>> = s
        .split(',')
        .map(parse_axis)
        .collect::<levycop::Result<_>>()?;
    let total: usize = axes.iter().map(|a| a.len()).product();
    if total > 10_000_000 {
        return Err(Error::argument(format!("grid has {total} points; cap is 1e7")));
    }
    Ok(axes)
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for v in axis {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn format_rows(var: &str, d: usize, points: &[Vec<f64>], values: &[f64], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::new();
            for i in 1..=d {
                s.push_str(&format!("{var}{i},"));
            }
            s.push_str("value\n");
            for (p, v) in points.iter().zip(values) {
                for c in p {
                    s.push_str(&format!("{c:.16e},"));
                }
                s.push_str(&format!("{v:.16e}\n"));
            }
            s
        }
        Format::Json => {
            let doc = json!({"points": points, "values": values});
            format!("{:#}\n", doc)
        }
    }
}

fn cmd_eval(
    spec_path: &Path,
    grid: &str,
    out: Option<&PathBuf>,
    format: Format,
    tol: Option<f64>,
) -> levycop::Result<u8> {
    let cfg = tolerances(tol)?;
    let spec = read_spec(spec_path)?;
    let axes = parse_grid(grid)?;
    let built = spec.build(&cfg)?;
    let (var, d): (&str, usize) = match &built {
        BuiltSpec::Copula(_) | BuiltSpec::ProperOfLevy(_) => ("u", spec.dimension()),
        BuiltSpec::Levy(_) => ("x", spec.dimension()),
        BuiltSpec::GeneratorPsi(_) | BuiltSpec::GeneratorPhi(_) => ("x", 1),
        BuiltSpec::JumpProcess(_) => {
            return Err(Error::argument(
                "jump processes are simulated, not evaluated; use `levycop simulate`",
            ))
        }
    };
    if axes.len() != d {
        return Err(Error::argument(format!(
            "grid has {} axes, object needs {d}",
            axes.len()
        )));
    }
    let points = cartesian(&axes);
    let mut values = Vec::with_capacity(points.len());
    for p in &points {
        let v = match &built {
            BuiltSpec::Copula(c) => copula_eval(c, p, &cfg)?,
            BuiltSpec::Levy(f) => levy_eval(f, p, &cfg)?,
            BuiltSpec::ProperOfLevy(f) => levy_to_proper(f, p, &cfg)?,
            BuiltSpec::GeneratorPsi(g) => g.eval(p[0], &cfg)?,
            BuiltSpec::GeneratorPhi(g) => g.eval(p[0], &cfg)?,
            BuiltSpec::JumpProcess(_) => unreachable!(),
        };
        values.push(v);
    }
    write_out(out, &format_rows(var, d, &points, &values, format))?;
    Ok(0)
}

/// Round-trip residual of a conversion at a handful of probe points.
pub(crate) fn conversion_residual(
    original: &SpecFile,
    converted: &SpecFile,
    cfg: &ToleranceConfig,
) -> levycop::Result<(f64, usize)> {
    let mut worst = 0.0_f64;
    let mut count = 0usize;
    match (original.build(cfg)?, converted.build(cfg)?) {
        // Proper -> Lévy: map back through the exponential image.
        (BuiltSpec::Copula(c), BuiltSpec::Levy(f)) => {
            let probes = cartesian(&vec![vec![0.25, 0.5, 0.75]; c.d]);
            for u in &probes {
                let back = levy_to_proper(&f, u, cfg)?;
                let direct = copula_eval(&c, u, cfg)?;
                worst = worst.max((back - direct).abs());
                count += 1;
            }
        }
        // Lévy -> proper: push the proper image back to the Lévy scale.
        (BuiltSpec::Levy(f), BuiltSpec::ProperOfLevy(g))
        | (BuiltSpec::ProperOfLevy(g), BuiltSpec::Levy(f)) => {
            let probes = cartesian(&vec![vec![0.5, 1.0, 2.0]; f.d]);
            for x in &probes {
                let u: Vec<f64> = x.iter().map(|v| -(-v).exp_m1()).collect();
                let c = levy_to_proper(&g, &u, cfg)?;
                let back = -(-c).ln_1p();
                let direct = levy_eval(&f, x, cfg)?;
                worst = worst.max((back - direct).abs());
                count += 1;
            }
        }
        (BuiltSpec::GeneratorPsi(psi), BuiltSpec::GeneratorPhi(phi))
        | (BuiltSpec::GeneratorPhi(phi), BuiltSpec::GeneratorPsi(psi)) => {
            for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let via = -(-phi.eval(x, cfg)?).exp_m1();
                let direct = psi.eval(x, cfg)?;
                worst = worst.max((via - direct).abs());
                count += 1;
            }
        }
        _ => {
            return Err(Error::argument(
                "conversion produced an unexpected object pair",
            ))
        }
    }
    Ok((worst, count))
}

fn cmd_convert(spec_path: &Path, out: Option<&PathBuf>, tol: Option<f64>) -> levycop::Result<u8> {
    let cfg = tolerances(tol)?;
    let spec = read_spec(spec_path)?;
    let converted = convert_spec(&spec)?;
    let doc = match conversion_residual(&spec, &converted, &cfg) {
        Ok((residual, probes)) => json!({
            "converted": converted,
            "round_trip": {"max_residual": residual, "probes": probes, "degenerate": false},
        }),
        // The exponential image can be degenerate (independence on the
        // Lévy scale); report the structure instead of failing.
        Err(Error::Degenerate(msg)) => json!({
            "converted": converted,
            "round_trip": {"degenerate": true, "message": msg},
        }),
        Err(e) => return Err(e),
    };
    write_out(out, &format!("{:#}\n", doc))?;
    Ok(0)
}

fn cmd_sample(
    spec_path: &Path,
    n: usize,
    seed: u64,
    out: Option<&PathBuf>,
    format: Format,
    tol: Option<f64>,
) -> levycop::Result<u8> {
    let cfg = tolerances(tol)?;
    if n == 0 {
        return Err(Error::argument("sample: n must be >= 1"));
    }
    let spec = read_spec(spec_path)?;
    let SpecFile::Copula(node) = &spec else {
        return Err(Error::argument("sample: spec must describe a copula"));
    };
    let (sample, family): (CopulaSample, String) = match &node.family {
        CopulaFamilyNode::Independence => (
            sample_independence(node.d, n, seed)?,
            "independence".into(),
        ),
        CopulaFamilyNode::Clayton => {
            let psi = levycop::generators::ProperGenerator::clayton(node.d);
            let radial = radial_law_for(&psi, node.d, true, &cfg)?;
            (
                sample_archimedean(&psi, &radial, node.d, n, seed, &cfg)?,
                "clayton".into(),
            )
        }
        CopulaFamilyNode::Archimedean { generator } => {
            let psi = generator.build()?;
            let radial = if let PsiFamilyNode::DiracRadial { r0 } = generator.family {
                RadialMeasure::dirac(r0, 1.0, RadialKind::ProbabilityCdf)?
            } else {
                radial_law_for(&psi, node.d, false, &cfg)?
            };
            (
                sample_archimedean(&psi, &radial, node.d, n, seed, &cfg)?,
                "archimedean".into(),
            )
        }
        CopulaFamilyNode::Comonotone | CopulaFamilyNode::FrechetLower => {
            return Err(Error::argument(
                "sample: no sampler for bound families; sample_archimedean needs a radial law",
            ))
        }
    };
    let content = match format {
        Format::Csv => sample.to_csv(&family),
        Format::Json => {
            let points: Vec<&[f64]> = (0..n).map(|j| sample.point(j)).collect();
            format!(
                "{:#}\n",
                json!({"seed": seed, "n": n, "d": node.d, "family": family, "points": points})
            )
        }
    };
    write_out(out, &content)?;
    Ok(0)
}

/// The radial law whose Williamson transform is psi: the closed form for
/// Clayton at d=2, a numerically inverted table otherwise.
fn radial_law_for(
    psi: &levycop::generators::ProperGenerator,
    d: usize,
    clayton: bool,
    cfg: &ToleranceConfig,
) -> levycop::Result<RadialMeasure> {
    if clayton && d == 2 {
        return Ok(clayton_radial());
    }
    let grid: Vec<f64> = (0..=4096)
        .map(|i| 1e-3 * (1e10_f64).powf(i as f64 / 4096.0))
        .collect();
    williamson_inverse(psi, d, &grid, cfg)
}

fn cmd_simulate(
    spec_path: &Path,
    n: usize,
    seed: u64,
    out: Option<&PathBuf>,
    tol: Option<f64>,
) -> levycop::Result<u8> {
    let cfg = tolerances(tol)?;
    if n == 0 {
        return Err(Error::argument("simulate: n must be >= 1"));
    }
    let spec = read_spec(spec_path)?;
    let BuiltSpec::JumpProcess(j) = spec.build(&cfg)? else {
        return Err(Error::argument("simulate: spec must describe a jump process"));
    };
    let samples = simulate_replicates(&j, n, seed, &cfg)?;
    let mean_jumps =
        samples.iter().map(|s| s.jumps.len() as f64).sum::<f64>() / samples.len() as f64;
    let mut content = format!("# seed={seed} n={n} mean_jumps={mean_jumps:.16e}\n");
    content.push_str("replicate,n_jumps,");
    for i in 1..=j.d {
        content.push_str(&format!("max{i},"));
    }
    content.push_str("n_records_upper,n_records_lower\n");
    for (i, s) in samples.iter().enumerate() {
        content.push_str(&format!("{i},{},", s.jumps.len()));
        for c in s.span_max() {
            content.push_str(&format!("{c:.16e},"));
        }
        content.push_str(&format!(
            "{},{}\n",
            s.records_upper.len(),
            s.records_lower.len()
        ));
    }
    write_out(out, &content)?;
    Ok(0)
}

