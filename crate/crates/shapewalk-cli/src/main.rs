//! Deterministic command-line frontend.
//!
//! Every subcommand writes a CSV or JSON artifact whose header records the
//! version, argv and seed; identical argv produce byte-identical files on
//! the same platform. Exit codes: 0 success, 1 validation error, 2
//! internal or numerical failure.

use clap::{Args, Parser, Subcommand};
use num::BigInt;
use serde::Serialize;
use shapewalk::dioph::cf::{cf_expand, CfInput};
use shapewalk::dioph::cubic::{conditioned_shapes, cubic_field, unit_search, CubicPoly};
use shapewalk::dioph::{a_orbit_scan, builtin_ratio_lattice};
use shapewalk::error::Error;
use shapewalk::groups::{builtin_measure, parse_measure_file, MeasureSpec, ProjLine};
use shapewalk::ortho::conj1_sample;
use shapewalk::output::{
    self, conditioned_csv, curve_csv, height_field_csv, ortho_csv, walk_csv, RunStamp,
};
use shapewalk::scalar::Rat;
use shapewalk::section::{curve_sample, equivariance_check, tan_spaced_grid, Side};
use shapewalk::walk::{
    contraction_probe, estimate_lyapunov, gof_hyperbolic, run_walk, tall_probe_points,
};
use shapewalk::Lattice2;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "shapewalk",
    version,
    about = "Random walks and exact algebra on the space of 2-lattice shapes",
    disable_help_subcommand = true
)]
struct Cli {
    /// Optional key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Built-in measure: I, II-a, II-b, II-c or II-d.
    #[arg(long, default_value = "I")]
    case: String,
    /// Measure file overriding --case (one "weight m11 .. m33" atom per line).
    #[arg(long)]
    measure_file: Option<PathBuf>,
}

impl MeasureArgs {
    fn resolve(&self) -> Result<MeasureSpec<Rat>, Error> {
        match &self.measure_file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::BadMeasureSpec(format!("{}: {e}", path.display()))
                })?;
                parse_measure_file(&text, path.display().to_string())
            }
            None => builtin_measure(&self.case),
        }
    }
}

fn parse_x0(name: &str) -> Result<Lattice2<f64>, Error> {
    match name {
        "std" => Ok(Lattice2::standard()),
        "hex" => {
            let lat = shapewalk::ortho::ortho_lattice(&shapewalk::exact::ivec3([1, 1, 1]))?;
            Ok(lat.to_f64())
        }
        other => {
            if let Some(t) = other.strip_prefix("lambda:") {
                let t = Rat::from_str(t).map_err(Error::InvalidArgument)?;
                Ok(shapewalk::section::lambda_t(&ProjLine::Finite(t)).to_f64())
            } else {
                Err(Error::InvalidArgument(format!(
                    "unknown start point '{other}' (std, hex or lambda:<t>)"
                )))
            }
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one random-walk trajectory and emit the shape/height samples.
    Walk {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Start point: std (span{e1,e2}), hex (Z^3 meet (1,1,1)^perp) or lambda:<t>.
        #[arg(long, default_value = "std")]
        x0: String,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Record every stride-th step.
        #[arg(long, default_value_t = 10)]
        stride: u64,
        /// Threshold M for the occupation fraction of {u_X <= M}.
        #[arg(long, default_value_t = 10.0)]
        height_cap: f64,
        /// Output path (default stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Walk plus goodness of fit against the hyperbolic reference (JSON).
    Gof {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value = "std")]
        x0: String,
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        stride: u64,
        #[arg(long, default_value_t = 10.0)]
        height_cap: f64,
        /// Grid is ymax-truncated with an analytic tail bin above.
        #[arg(long, default_value_t = 6.0)]
        ymax: f64,
        #[arg(long, default_value_t = 12)]
        grid: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Estimate the Lyapunov vector and its weight evaluations (JSON).
    Lyapunov {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 16)]
        replicas: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Probe the height-contraction inequality at tall points (JSON).
    Contraction {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Contraction exponent delta; repeat for a monotonicity table.
        #[arg(long, default_values_t = vec![0.1])]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 10.0)]
        min_height: f64,
        #[arg(long, default_value_t = 4000)]
        inner_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Trace the shapes of the equivariant section over the circle (CSV).
    SectionCurve {
        /// Number of tan-spaced parameters (the point at infinity is added).
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Exactly verify the section's equivariance identities.
    SectionVerify {
        /// Number of random rational parameters.
        #[arg(long, default_value_t = 1000)]
        t_count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Numerators and denominators are drawn up to this bound.
        #[arg(long, default_value_t = 1_000_000)]
        max_denom: i64,
    },
    /// Sample orthogonal shapes along the integer orbit of (1,1,1) (CSV).
    OrthoShapes {
        #[arg(long, default_value_t = 15_000)]
        words: usize,
        #[arg(long, default_value_t = 25)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip repeated letter sequences.
        #[arg(long, default_value_t = false)]
        dedup: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Height field of the diagonal flow over a grid (CSV).
    Aorbit {
        /// Built-in lattice: std, hex, bounded-cf, linear-cf or liouville.
        #[arg(long, default_value = "std")]
        lattice: String,
        #[arg(long, default_value_t = 8.0)]
        t1: f64,
        #[arg(long, default_value_t = 8.0)]
        t2: f64,
        #[arg(long, default_value_t = 161)]
        n1: usize,
        #[arg(long, default_value_t = 161)]
        n2: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Certified continued-fraction expansion (JSON).
    Cf {
        /// Exact rational input p/q.
        #[arg(long)]
        rational: Option<String>,
        /// Quadratic surd (p + sqrt(d))/q as "p,d,q".
        #[arg(long)]
        surd: Option<String>,
        /// Decimal literal, treated exactly; with --radius, as an enclosure.
        #[arg(long)]
        decimal: Option<String>,
        /// Enclosure half-width for --decimal (rational or decimal).
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, default_value_t = 40)]
        terms: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Brute-force unit search in a totally real cubic order (JSON).
    CubicUnits {
        /// Monic cubic x^3 + a x^2 + b x + c as "a,b,c".
        #[arg(long, default_value = "0,-3,-1")]
        poly: String,
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[arg(long, default_value_t = 96)]
        precision_bits: u32,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Conditioned directional shapes over unit words (CSV).
    Conditioned {
        #[arg(long, default_value = "0,-3,-1")]
        poly: String,
        /// Unit-search box for the generator pair.
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[arg(long, default_value_t = 6)]
        mbox: i64,
        #[arg(long, default_value_t = 6)]
        nbox: i64,
        #[arg(long, default_value_t = 96)]
        precision_bits: u32,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn parse_triple(s: &str) -> Result<(i64, i64, i64), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected three comma-separated integers, got '{s}'"
        )));
    }
    let mut vals = [0i64; 3];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("'{p}': {e}")))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| Error::NumericalFailure {
            step: 0,
            what: format!("writing {}: {e}", path.display()),
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct GofArtifact {
    walk_steps: u64,
    walk_stride: u64,
    measure: String,
    frac_height_le_cap: f64,
    gof: shapewalk::walk::GofResult,
}

#[derive(Serialize)]
struct ContractionArtifact {
    tables: Vec<shapewalk::walk::ContractionReport>,
}

#[derive(Serialize)]
struct CfArtifact {
    input: String,
    digits: Vec<String>,
    certified: usize,
    exhausted: bool,
    terminated: bool,
    max_partial_quotient: Option<String>,
}

#[derive(Serialize)]
struct UnitsArtifact {
    poly: String,
    bound: i64,
    roots: [f64; 3],
    units: Vec<shapewalk::dioph::cubic::UnitElement>,
    log_rank: usize,
}

fn run(cli: Cli, argv: &[String]) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Walk {
            measure,
            x0,
            steps,
            seed,
            stride,
            height_cap,
            out,
        } => {
            let mu = measure.resolve()?.to_f64();
            let start = parse_x0(&x0)?;
            let report = run_walk(&mu, &start, steps, seed, stride, height_cap)?;
            let stamp = RunStamp::new("walk-csv", argv, Some(seed));
            emit(&out, &walk_csv(&report, &stamp))
        }
        Cmd::Gof {
            measure,
            x0,
            steps,
            seed,
            stride,
            height_cap,
            ymax,
            grid,
            out,
        } => {
            let mu = measure.resolve()?.to_f64();
            let start = parse_x0(&x0)?;
            let report = run_walk(&mu, &start, steps, seed, stride, height_cap)?;
            let gof = gof_hyperbolic(&report, ymax, grid)?;
            let stamp = RunStamp::new("gof-json", argv, Some(seed));
            let artifact = GofArtifact {
                walk_steps: steps,
                walk_stride: stride,
                measure: report.measure.clone(),
                frac_height_le_cap: report.frac_height_le_cap,
                gof,
            };
            emit(&out, &output::to_json(stamp, artifact))
        }
        Cmd::Lyapunov {
            measure,
            steps,
            replicas,
            seed,
            out,
        } => {
            let mu = measure.resolve()?.to_f64();
            let est = estimate_lyapunov(&mu, steps, replicas, seed)?;
            let stamp = RunStamp::new("lyapunov-json", argv, Some(seed));
            emit(&out, &output::to_json(stamp, est))
        }
        Cmd::Contraction {
            measure,
            delta,
            points,
            min_height,
            inner_samples,
            seed,
            out,
        } => {
            let mu = measure.resolve()?.to_f64();
            let probe_points = tall_probe_points(points, min_height, seed)?;
            let mut tables = Vec::new();
            for d in delta {
                tables.push(contraction_probe(
                    &mu,
                    d,
                    &probe_points,
                    inner_samples,
                    seed,
                )?);
            }
            let stamp = RunStamp::new("contraction-json", argv, Some(seed));
            emit(&out, &output::to_json(stamp, ContractionArtifact { tables }))
        }
        Cmd::SectionCurve { grid, out } => {
            let pts = curve_sample(&tan_spaced_grid(grid))?;
            let stamp = RunStamp::new("section-curve-csv", argv, None);
            emit(&out, &curve_csv(&pts, &stamp))
        }
        Cmd::SectionVerify {
            t_count,
            seed,
            max_denom,
        } => {
            let mut rng = shapewalk::rng::Xoshiro256PlusPlus::from_seed(seed);
            equivariance_check(&ProjLine::Infinity, Side::Plus)?;
            equivariance_check(&ProjLine::Infinity, Side::Minus)?;
            let mut passed = 0usize;
            for _ in 0..t_count {
                let num = rng.uniform_below(2 * max_denom as u64 + 1) as i64 - max_denom;
                let den = rng.uniform_below(max_denom as u64) as i64 + 1;
                let t = ProjLine::Finite(Rat::new(num, den));
                equivariance_check(&t, Side::Plus)?;
                equivariance_check(&t, Side::Minus)?;
                passed += 1;
            }
            println!("{passed}/{t_count} exact (plus both sides at infinity)");
            Ok(())
        }
        Cmd::OrthoShapes {
            words,
            len,
            seed,
            dedup,
            out,
        } => {
            let samples = conj1_sample(words, len, seed, dedup)?;
            let stamp = RunStamp::new("ortho-csv", argv, Some(seed));
            emit(&out, &ortho_csv(&samples, &stamp))
        }
        Cmd::Aorbit {
            lattice,
            t1,
            t2,
            n1,
            n2,
            out,
        } => {
            let lat = match lattice.as_str() {
                "std" => Lattice2::<f64>::standard(),
                "hex" => {
                    shapewalk::ortho::ortho_lattice(&shapewalk::exact::ivec3([1, 1, 1]))?.to_f64()
                }
                other => builtin_ratio_lattice(other)?.lattice,
            };
            let field = a_orbit_scan(&lat, (t1, t2), (n1, n2))?;
            let stamp = RunStamp::new("aorbit-csv", argv, None);
            emit(&out, &height_field_csv(&field, &stamp))
        }
        Cmd::Cf {
            rational,
            surd,
            decimal,
            radius,
            terms,
            out,
        } => {
            let input = match (rational, surd, decimal) {
                (Some(r), None, None) => {
                    CfInput::Rational(Rat::from_str(&r).map_err(Error::InvalidArgument)?)
                }
                (None, Some(s), None) => {
                    let (p, d, q) = parse_triple(&s)?;
                    CfInput::surd(p, d, q)
                }
                (None, None, Some(dstr)) => {
                    let x = Rat::from_str(&dstr).map_err(Error::InvalidArgument)?;
                    match radius {
                        None => CfInput::Rational(x),
                        Some(r) => {
                            let r = Rat::from_str(&r).map_err(Error::InvalidArgument)?;
                            CfInput::Interval {
                                lo: x.clone() - r.clone(),
                                hi: x + r,
                            }
                        }
                    }
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "give exactly one of --rational, --surd, --decimal".into(),
                    ))
                }
            };
            let e = cf_expand(&input, terms)?;
            let artifact = CfArtifact {
                input: e.input.clone(),
                digits: e.digits.iter().map(BigInt::to_string).collect(),
                certified: e.certified,
                exhausted: e.exhausted,
                terminated: e.terminated,
                max_partial_quotient: e.max_partial_quotient().map(|d| d.to_string()),
            };
            let stamp = RunStamp::new("cf-json", argv, None);
            emit(&out, &output::to_json(stamp, artifact))
        }
        Cmd::CubicUnits {
            poly,
            bound,
            precision_bits,
            out,
        } => {
            let (a, b, c) = parse_triple(&poly)?;
            let spec = cubic_field(CubicPoly::new(a, b, c), precision_bits)?;
            let units = unit_search(&spec, bound);
            let rank = shapewalk::dioph::cubic::log_rank(&units, 1e-6);
            let artifact = UnitsArtifact {
                poly: format!("x^3 + ({a}) x^2 + ({b}) x + ({c})"),
                bound,
                roots: spec.roots_f64(),
                units,
                log_rank: rank,
            };
            let stamp = RunStamp::new("units-json", argv, None);
            emit(&out, &output::to_json(stamp, artifact))
        }
        Cmd::Conditioned {
            poly,
            bound,
            mbox,
            nbox,
            precision_bits,
            out,
        } => {
            let (a, b, c) = parse_triple(&poly)?;
            let spec = cubic_field(CubicPoly::new(a, b, c), precision_bits)?;
            let units = unit_search(&spec, bound);
            let report = conditioned_shapes(&spec, &units, mbox, nbox)?;
            let stamp = RunStamp::new("conditioned-csv", argv, None);
            emit(&out, &conditioned_csv(&report, &stamp))
        }
    }
}

/// Splice `--key value` pairs from a key=value config file after the
/// subcommand, before explicit flags, so the command line wins on repeats.
fn apply_config(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else { return Ok(args) };
    let path = args
        .get(pos + 1)
        .cloned()
        .ok_or_else(|| "--config needs a path".to_string())?;
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let mut extra = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line without '=': {line}"))?;
        let (k, v) = (k.trim(), v.trim());
        let flag = format!("--{k}");
        // the command line takes precedence: skip keys given explicitly
        if args.iter().any(|a| *a == flag) {
            continue;
        }
        extra.push(flag);
        if !v.is_empty() && v != "true" {
            extra.push(v.to_string());
        }
    }
    // remove the --config pair and insert the extras right after the
    // subcommand (args[1])
    args.drain(pos..=pos + 1);
    let insert_at = 2.min(args.len());
    for (i, e) in extra.into_iter().enumerate() {
        args.insert(insert_at + i, e);
    }
    Ok(args)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match apply_config(raw.clone()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            // single-line diagnostic
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("bad arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: {first}");
            return ExitCode::from(1);
        }
    };
    // argv recorded in headers excludes the binary path for stability
    let argv: Vec<String> = raw.iter().skip(1).cloned().collect();
    match run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidArgument(_)
                | Error::BadMeasureSpec(_)
                | Error::BadPolynomial(_)
                | Error::EmptyMeasure => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
