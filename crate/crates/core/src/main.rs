use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use holobeam::grid::{OutputFormat, DEFAULT_BUDGET};
use holobeam::io::{write_csv, write_output};
use holobeam::verify::{self, DEFAULT_SEED, SUITES};
use holobeam::{
    complex_distance_xy, convexity_gap, coupling, directivity_from, holomorphic_green,
    optimal_alignment, peak_coupling, sample_grid, Complex64, ComplexSpacetimePoint, Dish, Error,
    FieldGrid, FieldKind, GridSpec, KernelConfig, RealSpacetimePoint, ScenarioConfig,
    SpacetimeDirection, Vec3,
};

#[derive(Parser)]
#[command(name = "holobeam", version, about = "Holomorphic Green function and pulsed-beam toolkit")]
struct Cli {
    /// JSON scenario file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file for sampled grids (CSV on stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized verification suites
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Maximum number of grid samples
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Bin => OutputFormat::RawBinary,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Complex distance r~ of x - iy
    Distance {
        #[arg(long, required = true, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        x: Vec<f64>,
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        y: Option<Vec<f64>>,
    },
    /// Holomorphic Green function at (x, t) - i(y, s)
    Green {
        #[arg(long, required = true, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        x: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, required = true, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        y: Vec<f64>,
        #[arg(long)]
        s: f64,
    },
    /// Sample a field over the grid of a scenario file
    Beam,
    /// Emitter-receiver coupling
    Coupling(CouplingArgs),
    /// Directivity D = a/(s - a)
    Directivity {
        #[arg(long, required_unless_present = "gap")]
        a: Option<f64>,
        #[arg(long, required_unless_present = "gap")]
        s: Option<f64>,
        /// Convexity gap of two extensions, given as Y1X Y1Y Y1Z S1 Y2X Y2Y Y2Z S2
        #[arg(long, num_args = 8, allow_negative_numbers = true, conflicts_with_all = ["a", "s"])]
        gap: Option<Vec<f64>>,
    },
    /// Run the invariant suites
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Option<String>,
    },
    /// Time profile of the emitted field at a fixed position, as CSV on stdout
    Profile {
        #[arg(long, required = true, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        x: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        emitter: EmitterArgs,
        #[arg(long, value_enum, default_value = "emitted")]
        kind: ProfileKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Emitted,
    FarZone,
}

#[derive(Args)]
struct EmitterArgs {
    #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [0.0, 0.0, 0.0])]
    xe: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    te: f64,
    #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [0.0, 0.0, 0.5])]
    ye: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    se: f64,
}

#[derive(Args)]
struct CouplingArgs {
    /// Print the peak coupling 1/(8 pi^2 r (s - a))
    #[arg(long, requires_all = ["r", "a", "s"])]
    peak: bool,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Print the optimal orientations and delay for the given centers
    #[arg(long, requires_all = ["xe", "xr", "ae", "ar", "se", "sr"], conflicts_with = "peak")]
    align: bool,
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    xe: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    te: Option<f64>,
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    ye: Option<Vec<f64>>,
    #[arg(long)]
    se: Option<f64>,
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    xr: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    tr: Option<f64>,
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    yr: Option<Vec<f64>>,
    #[arg(long)]
    sr: Option<f64>,
    #[arg(long)]
    ae: Option<f64>,
    #[arg(long)]
    ar: Option<f64>,
}

enum Failure {
    Invalid(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}

fn vec3(v: &[f64]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn complex(v: Complex64) -> String {
    format!("{} {}", v.re, v.im)
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config <path>".into()))?;
    let text = std::fs::read_to_string(path)?;
    Ok(ScenarioConfig::from_json(&text)?)
}

fn emit_grid(cli: &Cli, cfg: &ScenarioConfig, grid: &FieldGrid) -> Result<(), Failure> {
    let format = cli.format.map(OutputFormat::from).unwrap_or(cfg.output.format);
    match cli.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => write_output(grid, path, format)?,
        None if format == OutputFormat::Csv => write_csv(grid, io::stdout().lock())?,
        None => {
            return Err(Error::Config("binary output needs --out <path>".into()).into());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    let kernel = KernelConfig::default();
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Distance { x, y } => {
            let y = y.as_deref().map(vec3).unwrap_or_else(Vec3::zeros);
            writeln!(out, "{}", complex(complex_distance_xy(&vec3(x), &y)))?;
        }
        Command::Green { x, t, y, s } => {
            let z = ComplexSpacetimePoint::past(
                &RealSpacetimePoint::new(vec3(x), *t),
                &SpacetimeDirection::new(vec3(y), *s),
            );
            writeln!(out, "{}", complex(holomorphic_green(&z, &kernel)?))?;
        }
        Command::Beam => {
            let cfg = load_config(&cli)?;
            if cfg.kind == FieldKind::Coupling {
                return Err(Error::Config("use `coupling --config` for coupling scenarios".into()).into());
            }
            let grid = sample_grid(&cfg, budget)?;
            emit_grid(&cli, &cfg, &grid)?;
        }
        Command::Coupling(args) => coupling_cmd(&cli, args, budget, &mut out)?,
        Command::Directivity { a, s, gap } => match gap {
            Some(g) => {
                let y1 = SpacetimeDirection::new(Vec3::new(g[0], g[1], g[2]), g[3]);
                let y2 = SpacetimeDirection::new(Vec3::new(g[4], g[5], g[6]), g[7]);
                writeln!(out, "{}", convexity_gap(&y1, &y2)?)?;
            }
            None => {
                let d = directivity_from(a.unwrap_or_default(), s.unwrap_or_default())?;
                writeln!(out, "{}", d.value())?;
            }
        },
        Command::Verify { suite } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let reports = verify::run(seed, suite.as_deref())
                .ok_or_else(|| Error::Config("unknown suite".into()))?;
            writeln!(out, "seed {seed}")?;
            for r in &reports {
                write!(out, "{r}")?;
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            writeln!(out, "{} suites, {} failed", reports.len(), failed)?;
            if verify::exit_code(&reports) != 0 {
                return Err(Failure::Verification);
            }
        }
        Command::Profile {
            x,
            t0,
            dt,
            n,
            emitter,
            kind,
        } => {
            let e = Dish::new(
                RealSpacetimePoint::new(vec3(&emitter.xe), emitter.te),
                SpacetimeDirection::new(vec3(&emitter.ye), emitter.se),
            )?;
            let cfg = ScenarioConfig {
                kind: match kind {
                    ProfileKind::Emitted => FieldKind::Emitted,
                    ProfileKind::FarZone => FieldKind::FarZone,
                },
                emitter: e,
                receiver: None,
                grid: GridSpec::time_profile(&vec3(x), *t0, *dt, *n),
                output: Default::default(),
            };
            let grid = sample_grid(&cfg, budget)?;
            write_csv(&grid, &mut out)?;
        }
    }
    Ok(())
}

fn coupling_cmd(cli: &Cli, args: &CouplingArgs, budget: u64, out: &mut impl Write) -> Result<(), Failure> {
    let missing = |what: &str| Error::Config(format!("missing --{what}"));
    if args.peak {
        let p = peak_coupling(
            args.r.ok_or_else(|| missing("r"))?,
            args.a.ok_or_else(|| missing("a"))?,
            args.s.ok_or_else(|| missing("s"))?,
        )?;
        writeln!(out, "{p:.5e}")?;
        return Ok(());
    }
    if args.align {
        let xe = args.xe.as_deref().map(vec3).ok_or_else(|| missing("xe"))?;
        let xr = args.xr.as_deref().map(vec3).ok_or_else(|| missing("xr"))?;
        let al = optimal_alignment(
            &xe,
            &xr,
            args.ae.ok_or_else(|| missing("ae"))?,
            args.ar.ok_or_else(|| missing("ar"))?,
            args.se.ok_or_else(|| missing("se"))?,
            args.sr.ok_or_else(|| missing("sr"))?,
        )?;
        let fmt = |d: &SpacetimeDirection| format!("{} {} {} {}", d.y[0], d.y[1], d.y[2], d.s);
        writeln!(out, "y_e {}", fmt(&al.emitter))?;
        writeln!(out, "y_r {}", fmt(&al.receiver))?;
        writeln!(out, "t {}", al.delay)?;
        return Ok(());
    }
    if cli.config.is_some() {
        let cfg = load_config(cli)?;
        if cfg.kind != FieldKind::Coupling {
            return Err(Error::Config("scenario kind must be \"coupling\"".into()).into());
        }
        let grid = sample_grid(&cfg, budget)?;
        return emit_grid(cli, &cfg, &grid);
    }
    let dish = |x: &Option<Vec<f64>>, t: Option<f64>, y: &Option<Vec<f64>>, s: Option<f64>, tag: &str| {
        Dish::new(
            RealSpacetimePoint::new(
                x.as_deref().map(vec3).ok_or_else(|| missing(&format!("x{tag}")))?,
                t.unwrap_or(0.0),
            ),
            SpacetimeDirection::new(
                y.as_deref().map(vec3).ok_or_else(|| missing(&format!("y{tag}")))?,
                s.ok_or_else(|| missing(&format!("s{tag}")))?,
            ),
        )
    };
    let e = dish(&args.xe, args.te, &args.ye, args.se, "e")?;
    let r = dish(&args.xr, args.tr, &args.yr, args.sr, "r")?;
    writeln!(out, "{}", complex(coupling(&e, &r, &KernelConfig::default())?))?;
    Ok(())
}
