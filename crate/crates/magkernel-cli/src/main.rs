use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magkernel::analysis::DecayModel;
use magkernel::assembly::OperatorTag;
use magkernel_cli::config::{Command, FieldSource, Format, GridOverrides, OutputSpec, PointSpec, TimeRange, TimeSpec};
use magkernel_cli::{execute, init_threads, parse_run_config, parse_time_list, CliError, RunConfig, EXIT_VERIFY};

#[derive(Parser)]
#[command(name = "magkernel", version, about = "Heat kernels of magnetic Schrodinger operators with radial fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kernel of the operator for a field file or inline field JSON
    Kernel {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        times: TimeArgs,
        #[arg(long, value_enum, default_value = "magnetic")]
        operator: OperatorArg,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        grid_r_max: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-form Aharonov-Bohm kernel
    Ab {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        times: TimeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ground state of the field-free comparison problem and its exterior fit
    Groundstate {
        #[arg(long)]
        field: String,
        #[arg(long)]
        r_fit_max: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Large-time decay fit of the kernel at one point
    Decay {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        times: TimeArgs,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the verification suite; exits with 1 if a criterion fails
    Verify {
        /// criterion numbers (all when omitted)
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Maz'ya condition for the weights x psi_m(x)^2 of a field
    Mazya {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Execute a JSON run configuration
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    rp: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    dtheta: f64,
}

#[derive(Args)]
struct TimeArgs {
    /// single time
    #[arg(long, conflicts_with_all = ["times", "tmin"])]
    t: Option<f64>,
    /// comma-separated times
    #[arg(long, conflicts_with = "tmin")]
    times: Option<String>,
    #[arg(long, requires = "tmax")]
    tmin: Option<f64>,
    #[arg(long, requires = "tmin")]
    tmax: Option<f64>,
    /// number of log-spaced times (default 16 per decade)
    #[arg(long, requires = "tmin")]
    count: Option<usize>,
    #[arg(long, default_value_t = magkernel_cli::config::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// output file (standard output when omitted)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Magnetic,
    Comparison,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    PowerLaw,
    PowerLawLog2,
}

impl TimeArgs {
    fn spec(&self) -> Result<Option<TimeSpec>, CliError> {
        if let Some(t) = self.t {
            return Ok(Some(TimeSpec::List(vec![t])));
        }
        if let Some(s) = &self.times {
            return Ok(Some(TimeSpec::List(parse_time_list(s)?)));
        }
        Ok(match (self.tmin, self.tmax) {
            (Some(t_min), Some(t_max)) => Some(TimeSpec::Range(TimeRange { t_min, t_max, count: self.count })),
            _ => None,
        })
    }
}

impl PointArgs {
    fn spec(&self) -> PointSpec {
        PointSpec { r: self.r, r_prime: self.rp, dtheta: self.dtheta }
    }
}

impl OutArgs {
    fn spec(&self) -> OutputSpec {
        let format = match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
        OutputSpec { path: self.output.clone(), format }
    }
}

fn build(cmd: Cmd) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let cfg = match cmd {
        Cmd::Kernel { field, point, times, operator, grid_n, grid_r_max, out } => {
            let mut c = RunConfig::new(Command::Kernel);
            c.field = Some(FieldSource::from_arg(&field)?);
            c.points = vec![point.spec()];
            c.times = times.spec()?;
            c.tol = times.tol;
            c.operator = Some(match operator {
                OperatorArg::Magnetic => OperatorTag::Magnetic,
                OperatorArg::Comparison => OperatorTag::Comparison,
            });
            c.grid_overrides = match (grid_n, grid_r_max) {
                (Some(n), Some(r_max)) => Some(GridOverrides { n, r_max }),
                (None, None) => None,
                _ => return Err(CliError::Usage("--grid-n and --grid-r-max go together".into())),
            };
            c.output = out.spec();
            c
        }
        Cmd::Ab { alpha, point, times, out } => {
            let mut c = RunConfig::new(Command::Ab);
            c.alpha = Some(alpha);
            c.points = vec![point.spec()];
            c.times = times.spec()?;
            c.tol = times.tol;
            c.output = out.spec();
            c
        }
        Cmd::Groundstate { field, r_fit_max, out } => {
            let mut c = RunConfig::new(Command::Groundstate);
            c.field = Some(FieldSource::from_arg(&field)?);
            c.r_fit_max = r_fit_max;
            c.output = out.spec();
            c
        }
        Cmd::Decay { field, point, times, model, out } => {
            let mut c = RunConfig::new(Command::Decay);
            c.field = Some(FieldSource::from_arg(&field)?);
            c.points = vec![point.spec()];
            c.times = times.spec()?;
            c.tol = times.tol;
            c.model = model.map(|m| match m {
                ModelArg::PowerLaw => DecayModel::PowerLaw,
                ModelArg::PowerLawLog2 => DecayModel::PowerLawLog2,
            });
            c.output = out.spec();
            c
        }
        Cmd::Verify { criteria, out } => {
            let mut c = RunConfig::new(Command::Verify);
            c.criteria = criteria;
            c.output = out.spec();
            c
        }
        Cmd::Mazya { field, m, p, q, out } => {
            let mut c = RunConfig::new(Command::Mazya);
            c.field = Some(FieldSource::from_arg(&field)?);
            c.mode = m;
            c.p = p;
            c.q = q;
            c.output = out.spec();
            c
        }
        Cmd::Run { config } => {
            let bytes = std::fs::read(&config).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
            let base = config.parent().map(|p| p.to_path_buf());
            return Ok((parse_run_config(&bytes)?, base));
        }
    };
    cfg.validate()?;
    Ok((cfg, None))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    init_threads(std::env::var("MAGKERNEL_THREADS").ok().as_deref())?;
    let (cfg, base) = build(cli.cmd)?;
    let report = execute(&cfg, base.as_deref())?;
    let bytes = report.render(cfg.output.format)?;
    match &cfg.output.path {
        Some(p) => {
            let p = match &base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p.clone(),
            };
            std::fs::write(&p, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?
        }
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
