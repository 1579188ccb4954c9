use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csit_cli::{
    execute, replay, AdvectJob, ChirpDemo, CliError, ClosedFormsJob, DeriveJob, DeriveSource, Envelope, IfreqJob,
    IfreqSource, Job, LogisticDemo, Outcome, SymbolJob, SymbolSpec, TransformJob, TransformMode,
};
use csit_core::advection::{AdvectionConfig, CsitMode, Scheme, SourceTimeFunction};
use csit_core::closed_forms::ClosedFormConfig;
use csit_core::ifreq::{DerivativeBackend, IfParams, IfVariant};
use csit_core::operator::{CsitParams, ReductionOrder};

#[derive(Parser, Debug)]
#[command(
    name = "csit",
    version,
    about = "Complex-step integral transform: derivatives, advection and instantaneous frequency"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply the transform to a uniformly sampled series.
    Transform(TransformArgs),
    /// Compare finite-difference, pseudospectral and transform derivatives.
    Derive(DeriveArgs),
    /// Run the 1D advection experiment.
    Advect(AdvectArgs),
    /// Instantaneous frequency of a trace.
    Ifreq(IfreqArgs),
    /// Amplitude and dispersion curves of the operators.
    Symbol(SymbolArgs),
    /// Check the transform against its closed forms.
    ClosedForms(ClosedFormsArgs),
    /// Re-run a job from its manifest.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Reduction {
    Fixed,
    Unordered,
}

/// Transform parameters. Omitted values fall back to the subcommand's
/// defaults.
#[derive(Args, Debug, Clone)]
struct CsitArgs {
    /// Half-width of the real-axis averaging.
    #[arg(long)]
    h: Option<f64>,
    /// Height of the imaginary-axis strip.
    #[arg(long)]
    z: Option<f64>,
    /// Lower limit of the τ integral [default: Z/n-tau].
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n_eta: Option<usize>,
    #[arg(long)]
    n_tau: Option<usize>,
    #[arg(long, value_enum, default_value = "fixed")]
    reduction: Reduction,
}

impl CsitArgs {
    fn resolve(&self, h: f64, z: f64, n_eta: usize, n_tau: usize) -> Result<CsitParams, CliError> {
        let usage = |e: csit_core::Error| CliError::Usage(e.to_string());
        let mut p = CsitParams::new(
            self.h.unwrap_or(h),
            self.z.unwrap_or(z),
            self.n_eta.unwrap_or(n_eta),
            self.n_tau.unwrap_or(n_tau),
        )
        .map_err(usage)?;
        if let Some(eps) = self.epsilon {
            p = p.with_epsilon(eps).map_err(usage)?;
        }
        Ok(p.with_reduction(match self.reduction {
            Reduction::Fixed => ReductionOrder::Fixed,
            Reduction::Unordered => ReductionOrder::Unordered,
        }))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Quadrature,
    Symbol,
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Two-column CSV (coordinate, value) on a uniform grid.
    input: PathBuf,
    #[command(flatten)]
    csit: CsitArgs,
    #[arg(long, value_enum, default_value = "quadrature")]
    mode: Mode,
    #[arg(short, long, default_value = "transform.csv")]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DeriveDemo {
    Logistic,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Series to differentiate; omit to use the demo.
    input: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "input")]
    demo: Option<DeriveDemo>,
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Logistic growth rate.
    #[arg(long, default_value_t = 100.0)]
    k: f64,
    /// Logistic midpoint.
    #[arg(long, default_value_t = 0.5)]
    t0: f64,
    /// Nodes excluded from the interior at each edge.
    #[arg(long, default_value_t = 5)]
    edge: usize,
    #[command(flatten)]
    csit: CsitArgs,
    #[arg(short, long, default_value = "derive.csv")]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    Fd,
    Pseudospectral,
    Csit,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CsitModeArg {
    Quadrature,
    Symbol,
}

#[derive(Args, Debug)]
struct AdvectArgs {
    /// JSON advection config; the reference setup when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON source time function; a Gaussian derivative at the config's
    /// frequency when omitted.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    csit_mode: Option<CsitModeArg>,
    /// Snapshot times in seconds; the end of the run when omitted.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
    /// Half-width of the pulse window in wavelengths.
    #[arg(long, default_value_t = 4.0)]
    window: f64,
    #[arg(long, default_value = "advect")]
    output_dir: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IfreqDemo {
    Chirp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EnvelopeArg {
    Hann,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    SpectralShift,
    PointwiseAdditive,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Pseudospectral,
    CenteredFd,
}

#[derive(Args, Debug)]
struct IfreqArgs {
    /// Real trace; omit to use the demo.
    input: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "input")]
    demo: Option<IfreqDemo>,
    #[arg(long, default_value_t = 2500)]
    n: usize,
    #[arg(long, default_value_t = 20.0)]
    f0: f64,
    /// Chirp rate in Hz/s.
    #[arg(long, default_value_t = 20.0)]
    kc: f64,
    #[arg(long, value_enum)]
    envelope: Option<EnvelopeArg>,
    #[command(flatten)]
    csit: CsitArgs,
    #[arg(long, value_enum, default_value = "spectral-shift")]
    variant: VariantArg,
    /// Derivative used by the classical and damped estimators.
    #[arg(long, value_enum, default_value = "pseudospectral")]
    backend: BackendArg,
    /// Damping of the classical estimator, relative to the peak amplitude.
    #[arg(long, default_value_t = 1e-3)]
    damping: f64,
    /// Fraction of samples excluded from the interior at each edge.
    #[arg(long, default_value_t = 0.05)]
    trim: f64,
    #[arg(short, long, default_value = "ifreq.csv")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SymbolArgs {
    #[arg(long, default_value_t = std::f64::consts::PI)]
    kmax: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, default_value_t = 0.0005)]
    h: f64,
    #[arg(long, default_value_t = 0.1)]
    z: f64,
    #[arg(long, default_value_t = 1.0)]
    dx: f64,
    /// Phase speed used for the finite-difference dispersion column.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(short, long, default_value = "curves.csv")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ClosedFormsArgs {
    #[arg(short, long, default_value = "closed_forms.csv")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Write outputs here instead of the recorded paths.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn transform_job(a: TransformArgs) -> Result<Job, CliError> {
    Ok(Job::Transform(TransformJob {
        input: a.input,
        params: a.csit.resolve(0.05, 0.05, 16, 16)?,
        mode: match a.mode {
            Mode::Quadrature => TransformMode::Quadrature,
            Mode::Symbol => TransformMode::Symbol,
        },
        output: a.output,
    }))
}

fn derive_job(a: DeriveArgs) -> Result<Job, CliError> {
    let (source, dt) = match a.input {
        Some(path) => {
            let s = csit_cli::io::read_series(&path)?;
            (DeriveSource::Input(path), s.grid().spacing())
        }
        None => {
            let demo = LogisticDemo {
                n: a.n,
                k: a.k,
                t0: a.t0,
            };
            let dt = demo.grid()?.spacing();
            (DeriveSource::Logistic(demo), dt)
        }
    };
    Ok(Job::Derive(DeriveJob {
        source,
        params: a.csit.resolve(dt, dt, 16, 16)?,
        edge: a.edge,
        output: a.output,
    }))
}

fn advect_job(a: AdvectArgs) -> Result<Job, CliError> {
    let mut config = match &a.config {
        Some(path) => read_json::<AdvectionConfig>(path)?,
        None => AdvectionConfig::reference(Scheme::Csit),
    };
    if let Some(s) = a.scheme {
        config.scheme = match s {
            SchemeArg::Fd => Scheme::Fd,
            SchemeArg::Pseudospectral => Scheme::Pseudospectral,
            SchemeArg::Csit => Scheme::Csit,
        };
    }
    if let Some(m) = a.csit_mode {
        config.csit_mode = match m {
            CsitModeArg::Quadrature => CsitMode::Quadrature,
            CsitModeArg::Symbol => CsitMode::Symbol,
        };
    }
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let source = match &a.source {
        Some(path) => read_json::<SourceTimeFunction>(path)?,
        None => SourceTimeFunction::new(config.f0),
    };
    source.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let snapshots = if a.snapshots.is_empty() {
        vec![config.duration()]
    } else {
        a.snapshots
    };
    Ok(Job::Advect(AdvectJob {
        config,
        source,
        snapshots,
        window_wavelengths: a.window,
        output_dir: a.output_dir,
    }))
}

fn ifreq_job(a: IfreqArgs) -> Result<Job, CliError> {
    let (source, dt) = match a.input {
        Some(path) => {
            let s = csit_cli::io::read_series(&path)?;
            (IfreqSource::Input(path), s.grid().spacing())
        }
        None => {
            if a.n < 8 {
                return Err(CliError::Usage("--n must be at least 8".into()));
            }
            let demo = ChirpDemo {
                n: a.n,
                f0: a.f0,
                kc: a.kc,
                envelope: a.envelope.map(|EnvelopeArg::Hann| Envelope::Hann),
            };
            (IfreqSource::Chirp(demo), 1.0 / a.n as f64)
        }
    };
    let defaults = IfParams::for_sampling(dt).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csit = a.csit.clone();
    if csit.epsilon.is_none() && csit.z.is_none() {
        csit.epsilon = Some(defaults.csit.epsilon);
    }
    let params = IfParams {
        csit: csit.resolve(
            defaults.csit.h,
            defaults.csit.z,
            defaults.csit.n_eta,
            defaults.csit.n_tau,
        )?,
        variant: match a.variant {
            VariantArg::SpectralShift => IfVariant::SpectralShift,
            VariantArg::PointwiseAdditive => IfVariant::PointwiseAdditive,
        },
    };
    if !(0.0..0.5).contains(&a.trim) {
        return Err(CliError::Usage("--trim must lie in [0, 0.5)".into()));
    }
    if !(a.damping > 0.0) {
        return Err(CliError::Usage("--damping must be positive".into()));
    }
    Ok(Job::Ifreq(IfreqJob {
        source,
        params,
        backend: match a.backend {
            BackendArg::Pseudospectral => DerivativeBackend::Pseudospectral,
            BackendArg::CenteredFd => DerivativeBackend::CenteredFd,
        },
        damping: a.damping,
        trim_fraction: a.trim,
        output: a.output,
    }))
}

fn job_from(command: Command) -> Result<Option<Job>, CliError> {
    Ok(Some(match command {
        Command::Transform(a) => transform_job(a)?,
        Command::Derive(a) => derive_job(a)?,
        Command::Advect(a) => advect_job(a)?,
        Command::Ifreq(a) => ifreq_job(a)?,
        Command::Symbol(a) => Job::Symbol(SymbolJob {
            spec: SymbolSpec {
                kmax: a.kmax,
                samples: a.samples,
                h: a.h,
                z: a.z,
                dx: a.dx,
                c: a.c,
            },
            output: a.output,
        }),
        Command::ClosedForms(a) => Job::ClosedForms(ClosedFormsJob {
            config: ClosedFormConfig::default(),
            output: a.output,
        }),
        Command::Replay(_) => return Ok(None),
    }))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Ok(v) = std::env::var("CSIT_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("CSIT_THREADS must be a positive integer, got '{v}'")))?;
        if threads == 0 {
            return Err(CliError::Usage("CSIT_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Replay(a) => replay(&a.manifest, a.output_dir.as_deref()),
        other => execute(job_from(other)?.expect("replay handled above")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", outcome.summary);
            for p in &outcome.outputs {
                let _ = writeln!(out, "wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("csit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
