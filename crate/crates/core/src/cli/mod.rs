//! Command-line surface. Every subcommand writes JSON lines (or CSV for dense
//! series) to stdout, or to a file under `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{
    run_physical, run_similarity, shoot_t, Dynamics, OuterBc, PhysicalConfig, ShootOptions,
    SolverConfig,
};
use crate::ggmt::{claimed_reports, compute_b, positivity_threshold, scan_p, Pathway};
use crate::model::{
    eval_profile, make_dimension, weinkove, Dimension, GridFunction, ProfileKind, RadialGrid,
};
use crate::repro::{run_criterion, CRITERIA};
use crate::spectral::{
    discretize, eigen_extrapolated, eigen_lowest, susy_isospectrality, PotentialSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "ymflow",
    version,
    about = "Spectral certification and blowup dynamics for the equivariant Yang-Mills heat flow"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write into this directory instead of stdout.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Dimension given as `--d` or as `--n = d + 2`.
#[derive(Debug, Clone, Args)]
pub struct DimArgs {
    /// Space dimension of the flow.
    #[arg(long, conflicts_with = "n")]
    pub d: Option<i64>,
    /// Dimension n = d + 2 of the radial problem.
    #[arg(long)]
    pub n: Option<i64>,
}

impl DimArgs {
    fn resolve(&self, default_d: Option<i64>) -> Result<Option<Dimension>> {
        let d = match (self.d, self.n) {
            (Some(d), _) => Some(d),
            (None, Some(n)) => Some(n - 2),
            (None, None) => default_d,
        };
        d.map(make_dimension).transpose()
    }

    fn require(&self, default_d: i64) -> Result<Dimension> {
        Ok(self.resolve(Some(default_d))?.expect("default given"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathwayArg {
    Paper,
    Tight,
    Exact,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecArg {
    Free,
    Linearized,
    Susy,
    Zero,
}

impl From<SpecArg> for PotentialSpec {
    fn from(s: SpecArg) -> Self {
        match s {
            SpecArg::Free => PotentialSpec::Free,
            SpecArg::Linearized => PotentialSpec::Linearized,
            SpecArg::Susy => PotentialSpec::Susy,
            SpecArg::Zero => PotentialSpec::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    W,
    V,
    QFree,
    QSusy,
    GTilde,
    GMode,
    SigmaWeight,
}

impl From<KindArg> for ProfileKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::W => ProfileKind::W,
            KindArg::V => ProfileKind::V,
            KindArg::QFree => ProfileKind::QFree,
            KindArg::QSusy => ProfileKind::QSusy,
            KindArg::GTilde => ProfileKind::GTilde,
            KindArg::GMode => ProfileKind::GMode,
            KindArg::SigmaWeight => ProfileKind::SigmaWeight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DynamicsArg {
    Full,
    Linearized,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Dirichlet,
    Extrapolated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample closed-form profiles on [0, rho-max].
    Profile {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, default_value_t = 10.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Profiles to sample (repeatable); defaults to W and V.
        #[arg(long, value_enum)]
        kind: Vec<KindArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integral bound excluding non-positive partner spectrum.
    Ggmt {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_enum, default_value = "all")]
        pathway: PathwayArg,
        /// Sweep integer exponents, e.g. `2..8`.
        #[arg(long, value_name = "LO..HI")]
        scan_p: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lowest eigenvalues of a half-line operator.
    Spectrum {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, value_enum, default_value = "linearized")]
        spec: SpecArg,
        #[arg(long = "R", default_value_t = 20.0)]
        r_max: f64,
        #[arg(long = "N", default_value_t = 4000)]
        nodes: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Also solve on 2N and Richardson-extrapolate.
        #[arg(long)]
        extrapolate: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Similarity-coordinate run from `T(W + ε e^{−ρ²})(√T ·)`, or a shooting
    /// search for `T` with `--shoot`.
    Evolve {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        shoot: bool,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long = "R", default_value_t = 20.0)]
        r_max: f64,
        #[arg(long = "N", default_value_t = 2000)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, value_enum, default_value = "full")]
        dynamics: DynamicsArg,
        #[arg(long, value_enum, default_value = "extrapolated")]
        bc: BcArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Physical-coordinate run from `amp·W`.
    Blowup {
        #[command(flatten)]
        dim: DimArgs,
        #[arg(long, default_value_t = 1.0)]
        amp: f64,
        #[arg(long = "R", default_value_t = 8.0)]
        r_max: f64,
        #[arg(long = "N", default_value_t = 16000)]
        nodes: usize,
        /// Largest physical time step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bound verdicts, thresholds and spectral summaries for n = 7..11.
    Report {
        #[arg(long = "R", default_value_t = 20.0)]
        r_max: f64,
        #[arg(long = "N", default_value_t = 4000)]
        nodes: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance checks.
    Repro {
        /// Criteria to run (repeatable); all by default.
        #[arg(long)]
        criterion: Vec<u8>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Serialize records as JSON lines.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

fn emit(output: &OutputArgs, name: &str, body: &str) -> Result<()> {
    match &output.out {
        Some(dir) => {
            let ext = match output.format {
                Format::Json => "jsonl",
                Format::Csv => "csv",
            };
            let path = dir.join(format!("{name}.{ext}"));
            write_file(&path, body)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, body).map_err(io)
}

fn csv_only(output: &OutputArgs, what: &str) -> Result<()> {
    if output.format == Format::Csv {
        return Err(Error::invalid(format!(
            "{what} has no CSV form; use --format json"
        )));
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::invalid(format!("expected LO..HI, got {s:?}"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfileRow {
    rho: f64,
    #[serde(flatten)]
    values: serde_json::Map<String, serde_json::Value>,
}

fn profile(
    dim: &Dimension,
    rho_max: f64,
    samples: usize,
    kinds: &[KindArg],
    output: &OutputArgs,
) -> Result<()> {
    if !(rho_max > 0.0 && rho_max.is_finite()) || samples < 2 {
        return Err(Error::invalid("need rho-max > 0 and at least 2 samples"));
    }
    let kinds: Vec<ProfileKind> = if kinds.is_empty() {
        vec![ProfileKind::W, ProfileKind::V]
    } else {
        kinds.iter().map(|&k| k.into()).collect()
    };
    let names: Vec<String> = kinds
        .iter()
        .map(|k| {
            serde_json::to_value(k)
                .expect("enum")
                .as_str()
                .expect("string")
                .to_string()
        })
        .collect();
    // singular kinds start one step away from the origin
    let first = if kinds.iter().any(|k| k.singular_at_origin()) {
        1
    } else {
        0
    };
    let step = rho_max / (samples - 1) as f64;
    let mut rows = Vec::new();
    for i in first..samples {
        let rho = i as f64 * step;
        let vals = kinds
            .iter()
            .map(|&k| eval_profile(k, dim, rho))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((rho, vals));
    }
    let body = match output.format {
        Format::Csv => {
            let mut s = format!("rho,{}\n", names.join(","));
            for (rho, vals) in &rows {
                s.push_str(&format!("{rho:.16e}"));
                for v in vals {
                    s.push_str(&format!(",{v:.16e}"));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let recs: Vec<ProfileRow> = rows
                .into_iter()
                .map(|(rho, vals)| ProfileRow {
                    rho,
                    values: names
                        .iter()
                        .cloned()
                        .zip(vals.into_iter().map(serde_json::Value::from))
                        .collect(),
                })
                .collect();
            to_json_lines(&recs)?
        }
    };
    emit(output, "profile", &body)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Profile {
            dim,
            rho_max,
            samples,
            kind,
            output,
        } => profile(&dim.require(5)?, rho_max, samples, &kind, &output),
        Command::Ggmt {
            dim,
            p,
            pathway,
            scan_p: scan,
            output,
        } => {
            csv_only(&output, "ggmt")?;
            let dim = dim.resolve(None)?;
            if let Some(range) = scan {
                let dim = dim.ok_or_else(|| Error::invalid("--scan-p needs --n or --d"))?;
                let (lo, hi) = parse_range(&range)?;
                return emit(
                    &output,
                    "ggmt_scan",
                    &to_json_lines(&[scan_p(&dim, lo, hi)?])?,
                );
            }
            let pathways: Vec<Pathway> = match pathway {
                PathwayArg::Paper => vec![Pathway::PaperOverestimate],
                PathwayArg::Tight => vec![Pathway::TightQminus],
                PathwayArg::Exact => vec![Pathway::ExactCertificate],
                PathwayArg::All => Pathway::ALL.to_vec(),
            };
            let reports = match dim {
                Some(dim) => {
                    let p = p.ok_or_else(|| Error::invalid("--p is required with --n or --d"))?;
                    pathways
                        .iter()
                        .map(|&w| compute_b(&dim, p, w))
                        .collect::<Result<Vec<_>>>()?
                }
                None => claimed_reports()?
                    .into_iter()
                    .filter(|r| pathways.contains(&r.pathway))
                    .collect(),
            };
            emit(&output, "ggmt", &to_json_lines(&reports)?)
        }
        Command::Spectrum {
            dim,
            spec,
            r_max,
            nodes,
            k,
            extrapolate,
            output,
        } => {
            csv_only(&output, "spectrum")?;
            let dim = dim.require(6)?;
            let grid = RadialGrid::new(r_max, nodes)?;
            let res = if extrapolate {
                eigen_extrapolated(&dim, spec.into(), grid, k)?
            } else {
                eigen_lowest(&discretize(&dim, spec.into(), grid)?, k)?
            };
            emit(&output, "spectrum", &to_json_lines(&[res])?)
        }
        Command::Evolve {
            dim,
            eps,
            t,
            shoot,
            delta,
            r_max,
            nodes,
            dt,
            tau_max,
            theta,
            dynamics,
            bc,
            output,
        } => {
            let dim = dim.require(6)?;
            let cfg = SolverConfig {
                d: dim.d,
                grid: RadialGrid::new(r_max, nodes)?,
                dt,
                theta,
                tau_max,
                bc_outer: match bc {
                    BcArg::Dirichlet => OuterBc::DirichletZero,
                    BcArg::Extrapolated => OuterBc::Extrapolated,
                },
                dynamics: match dynamics {
                    DynamicsArg::Full => Dynamics::Full,
                    DynamicsArg::Linearized => Dynamics::Linearized,
                    DynamicsArg::Free => Dynamics::Free,
                },
                sample_every: 0.1,
                escape_c1: None,
            };
            cfg.validate()?;
            let v = GridFunction::sample(cfg.grid, |r| eps * (-r * r).exp());
            let trace = if shoot {
                let opts = ShootOptions {
                    delta,
                    ..ShootOptions::default()
                };
                let res = shoot_t(&dim, &v, &opts, &cfg)?;
                if output.format == Format::Json {
                    return emit(&output, "shoot", &to_json_lines(&[res])?);
                }
                res.final_trace
            } else if cfg.dynamics == Dynamics::Full {
                run_similarity(&dim, &v, t, &cfg)?
            } else {
                crate::evolve::evolve_perturbation(&dim, &v, &cfg)?
            };
            match output.format {
                Format::Json => emit(&output, "trace", &to_json_lines(&[trace])?),
                Format::Csv => emit(&output, "trace", &trace.to_csv()),
            }
        }
        Command::Blowup {
            dim,
            amp,
            r_max,
            nodes,
            dt,
            t_max,
            theta,
            output,
        } => {
            let dim = dim.require(5)?;
            let mut cfg = PhysicalConfig::physical(dim.d);
            cfg.grid = RadialGrid::new(r_max, nodes)?;
            cfg.dt_max = dt;
            cfg.t_max = t_max;
            cfg.theta = theta;
            let u0 = GridFunction::sample(cfg.grid, |r| amp * weinkove(&dim, r));
            let res = run_physical(&dim, &u0, &cfg)?;
            match output.format {
                Format::Json => emit(&output, "blowup", &to_json_lines(&[res])?),
                Format::Csv => emit(&output, "blowup", &res.to_csv()),
            }
        }
        Command::Report {
            r_max,
            nodes,
            output,
        } => {
            csv_only(&output, "report")?;
            let grid = RadialGrid::new(r_max, nodes)?;
            let mut lines = to_json_lines(&claimed_reports()?)?;
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Threshold {
                n: i64,
                rho_star: f64,
            }
            for d in 5..=9 {
                let dim = make_dimension(d)?;
                lines.push_str(&to_json_lines(&[Threshold {
                    n: dim.n,
                    rho_star: positivity_threshold(&dim)?,
                }])?);
                lines.push_str(&to_json_lines(&[susy_isospectrality(&dim, grid)?])?);
            }
            emit(&output, "report", &lines)
        }
        Command::Repro { criterion, output } => {
            csv_only(&output, "repro")?;
            let ids = if criterion.is_empty() {
                CRITERIA.to_vec()
            } else {
                criterion
            };
            let outcomes = ids
                .into_iter()
                .map(run_criterion)
                .collect::<Result<Vec<_>>>()?;
            let failed = outcomes.iter().any(|o| !o.passed);
            emit(&output, "repro", &to_json_lines(&outcomes)?)?;
            if failed {
                return Err(Error::invalid("at least one criterion failed"));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalidInput",
        Error::UnsupportedDimension(_) => "unsupportedDimension",
        Error::QuadratureNonConvergence { .. } => "quadratureNonConvergence",
        Error::NoSignChange(_) => "noSignChange",
        Error::Eigen(_) => "eigen",
        Error::Divergence { .. } => "divergence",
        Error::Io { .. } => "io",
        Error::Json(_) => "json",
    }
}

/// Parse `argv` and run. Exit code 0 on success, 1 on a computation failure
/// (a JSON error record goes to stderr), 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let rec = ErrorRecord {
                error: error_kind(&e),
                message: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&rec).expect("error record serializes")
            );
            1
        }
    }
}
