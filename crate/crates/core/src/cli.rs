//! The `rectify` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse error or invalid
//! parameter, 3 regularity failure, 4 I/O error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chart::Grid;
use crate::exprdsl::parse_immersion;
use crate::format;
use crate::geometry::GeometryError;
use crate::immersion::{
    base_family_by_name, builtin_by_name, rectifying_curve_spec, rectifying_spec, BaseFamily,
    Immersion, ImmersionError, DEFAULT_T_RANGE,
};
use crate::rectify::{analyze_grid, classify, frenet_table, structure_report, ReportOptions, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REGULARITY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rectify",
    version,
    about = "Geometry of immersed submanifolds of Euclidean space and verification of rectifying submanifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify and check every structure-theorem residual; exit 1 unless
    /// the immersion is proper rectifying and all applicable checks pass.
    Verify(ReportArgs),
    /// Conic / spherical / proper / rectifying verdicts and engine checks.
    Classify(ReportArgs),
    /// Write the `.imm` source of a constructed rectifying submanifold.
    Construct(ConstructArgs),
    /// Frenet apparatus and rectifying-plane residual along a space curve.
    Frenet(ReportArgs),
    /// Sample positions and residuals over the grid as CSV.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Immersion spec file (`.imm`).
    #[arg(group = "source")]
    pub input: Option<PathBuf>,
    /// Builtin immersion `NAME[:k=v,...]`, e.g. `rectifying:c=1,base=circle`.
    #[arg(long, group = "source")]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Points per chart dimension, one value or one per dimension.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// Tolerance for first- and second-order identities.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_exact: f64,
    /// Tolerance for identities involving third derivatives.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_third: f64,
    /// Worker threads; output does not depend on this.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    /// Normal length `c > 0`.
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    /// Spherical base `KIND[:k=v,...]`: circle, small_circle, ellipse,
    /// twisted_ellipse, sphere.
    #[arg(long, default_value = "circle")]
    pub base: String,
    /// Ambient dimension; defaults to one more than the base needs.
    #[arg(long)]
    pub m: Option<usize>,
    /// Range of `t = atan(s/c)` inside `(0, pi/2)`.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
    pub t_range: Option<Vec<f64>>,
    /// Construct a rectifying curve in E^3 from a unit-speed spherical
    /// curve instead.
    #[arg(long)]
    pub curve: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accepted for uniformity with the other commands; construction is
    /// single-threaded.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Classify,
    Construct,
    Frenet,
    Sample,
}

/// Resolved settings shared by the grid-based commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Source,
    pub grid: Option<Vec<usize>>,
    pub tolerances: Tolerances,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl RunConfig {
    fn new(command: CommandKind, source: &Source, grid: &GridArgs, format: Format) -> Result<RunConfig, Failure> {
        let tolerances = Tolerances {
            exact: grid.tol_exact,
            third: grid.tol_third,
            ..Tolerances::default()
        };
        tolerances.validate().map_err(Failure::invalid)?;
        if grid.jobs == 0 {
            return Err(Failure::invalid("--jobs must be at least 1"));
        }
        Ok(RunConfig {
            command,
            source: source.clone(),
            grid: grid.grid.clone(),
            tolerances,
            format,
            out: grid.out.clone(),
            jobs: grid.jobs,
        })
    }

    fn options(&self) -> ReportOptions {
        ReportOptions {
            tolerances: self.tolerances,
            jobs: self.jobs,
        }
    }
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Failure {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<ImmersionError> for Failure {
    fn from(e: ImmersionError) -> Failure {
        let code = match e {
            ImmersionError::NotRegular { .. } => EXIT_REGULARITY,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Failure {
        match e {
            GeometryError::Immersion(inner) => inner.into(),
            GeometryError::FrenetUndefined { .. } | GeometryError::NotNormal { .. } => Failure {
                code: EXIT_VERIFICATION,
                message: e.to_string(),
            },
            other => Failure::invalid(other.to_string()),
        }
    }
}

fn load(source: &Source) -> Result<Immersion, Failure> {
    match (&source.input, &source.builtin) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            let spec = parse_immersion(&text)
                .map_err(|e| Failure::invalid(format!("{}:{e}", path.display())))?;
            Ok(Immersion::from_spec(spec).with_label(path.display().to_string()))
        }
        (None, Some(name)) => Ok(builtin_by_name(name)?),
        _ => Err(Failure::invalid("give exactly one of an input file or --builtin")),
    }
}

fn grid_for(imm: &Immersion, sizes: &Option<Vec<usize>>) -> Result<Grid, Failure> {
    match sizes {
        None => Ok(imm.default_grid()),
        Some(s) => {
            let sizes = if s.len() == 1 {
                vec![s[0]; imm.chart_dim()]
            } else {
                s.clone()
            };
            Grid::new(imm.domain(), &sizes, crate::chart::DEFAULT_SHRINK).map_err(Failure::invalid)
        }
    }
}

fn emit(out: &Option<PathBuf>, body: String, outcome: &mut Outcome) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::io(path, e))?;
            outcome.stderr.push_str(&format!("wrote {}\n", path.display()));
        }
        None => outcome.stdout.push_str(&body),
    }
    Ok(())
}

fn run_report(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let imm = load(&cfg.source)?;
    let grid = grid_for(&imm, &cfg.grid)?;
    let opts = cfg.options();
    let mut outcome = Outcome::default();
    match cfg.command {
        CommandKind::Verify | CommandKind::Classify => {
            let report = if cfg.command == CommandKind::Verify {
                structure_report(&imm, &grid, &opts)?
            } else {
                classify(&imm, &grid, &opts)?
            };
            let body = match cfg.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(&cfg.out, body, &mut outcome)?;
            if cfg.command == CommandKind::Verify && !report.passed {
                outcome.code = EXIT_VERIFICATION;
                outcome.stderr.push_str(&format!(
                    "verification failed: {}\n",
                    report.classification.summary
                ));
            }
        }
        CommandKind::Frenet => {
            let report = frenet_table(&imm, &grid, cfg.tolerances.exact, cfg.jobs)?;
            let body = match cfg.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(&cfg.out, body, &mut outcome)?;
            if !report.degenerate_points.is_empty() {
                outcome.code = EXIT_VERIFICATION;
                outcome.stderr.push_str(&format!(
                    "Frenet frame undefined at {} sampled points\n",
                    report.degenerate_points.len()
                ));
            }
        }
        CommandKind::Sample => {
            let points = analyze_grid(&imm, &grid, &cfg.tolerances, cfg.jobs)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = imm.var_names().to_vec();
            header.extend((0..imm.ambient_dim()).map(|i| format!("x{i}")));
            header.extend(
                ["rho", "nu", "rectifying_residual", "concurrency_residual"].map(String::from),
            );
            let csv_err = |e: csv::Error| Failure::invalid(format!("CSV encoding failed: {e}"));
            w.write_record(&header).map_err(csv_err)?;
            for p in &points {
                let mut row: Vec<String> = p.point.iter().map(|v| format::full_or_na(*v)).collect();
                row.extend(p.position.iter().map(|v| format::full_or_na(*v)));
                row.extend([p.rho, p.nu, p.rectifying, p.concurrency].map(format::full_or_na));
                w.write_record(&row).map_err(csv_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Failure::invalid(format!("CSV encoding failed: {e}")))?;
            emit(&cfg.out, String::from_utf8(bytes).expect("CSV is UTF-8"), &mut outcome)?;
        }
        CommandKind::Construct => unreachable!("construct has no grid"),
    }
    Ok(outcome)
}

fn run_construct(args: &ConstructArgs) -> Result<Outcome, Failure> {
    if args.jobs == 0 {
        return Err(Failure::invalid("--jobs must be at least 1"));
    }
    let t_range = match args.t_range.as_deref() {
        None => DEFAULT_T_RANGE,
        Some([a, b]) => (*a, *b),
        Some(_) => return Err(Failure::invalid("--t-range takes two values")),
    };
    let family = base_family_by_name(&args.base)?;
    let (spec, what) = if args.curve {
        if args.m.is_some_and(|m| m != 3) {
            return Err(Failure::invalid("rectifying curves live in E^3; drop --m or use --m 3"));
        }
        let family = match family {
            BaseFamily::SmallCircle { polar } => BaseFamily::UnitSpeedSmallCircle { polar },
            other => other,
        };
        (rectifying_curve_spec(args.c, family, t_range)?, "rectifying curve")
    } else {
        let m = args.m.unwrap_or(family.embedding_dim() + 1);
        (rectifying_spec(args.c, family, m, t_range)?, "rectifying submanifold")
    };
    let body = format!(
        "# {what}, c = {}, base {}, t in [{}, {}]\n{}",
        args.c,
        family.label(),
        t_range.0,
        t_range.1,
        spec.to_source()
    );
    let mut outcome = Outcome::default();
    emit(&args.out, body, &mut outcome)?;
    Ok(outcome)
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Construct(args) => run_construct(args),
        Command::Verify(a) => RunConfig::new(CommandKind::Verify, &a.source, &a.grid, a.format).and_then(|c| run_report(&c)),
        Command::Classify(a) => RunConfig::new(CommandKind::Classify, &a.source, &a.grid, a.format).and_then(|c| run_report(&c)),
        Command::Frenet(a) => RunConfig::new(CommandKind::Frenet, &a.source, &a.grid, a.format).and_then(|c| run_report(&c)),
        Command::Sample(a) => RunConfig::new(CommandKind::Sample, &a.source, &a.grid, Format::Text).and_then(|c| run_report(&c)),
    };
    result.unwrap_or_else(|f| Outcome {
        code: f.code,
        stdout: String::new(),
        stderr: format!("error: {}\n", f.message),
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_c_is_rejected() {
        let o = run(["rectify", "construct", "--c", "-1"]);
        assert_eq!(o.code, EXIT_INVALID);
        assert!(o.stderr.contains("c must be positive"), "{}", o.stderr);
    }

    #[test]
    fn construct_mentions_radius() {
        let o = run(["rectify", "construct", "--c", "1", "--base", "circle"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("sqrt(s^2 + 1)"));
    }

    #[test]
    fn source_is_required_and_exclusive() {
        assert_eq!(run(["rectify", "verify"]).code, EXIT_INVALID);
        assert_eq!(run(["rectify", "verify", "a.imm", "--builtin", "helix"]).code, EXIT_INVALID);
    }
}
