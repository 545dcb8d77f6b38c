//! Command-line frontend: single-point calculators, config-driven sweeps,
//! figure presets and the acceptance suite.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for numerical failures
//! (including acceptance-criterion failures under `validate`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use kerrest::channels::{DephasingKerrParams, LossyKerrParams, StatisticalModel};
use kerrest::error::{KerrError, Result};
use kerrest::estimation;
use kerrest::measurements::{MeasurementFIM, PhaseCriterion, QuadSettings};
use kerrest::sweep::{self, FigureId, Scenario, SweepSpec};
use kerrest::validate;

#[derive(Parser)]
#[command(name = "kerrest", version, about = "Joint noise/nonlinearity estimation in Kerr channels")]
struct Cli {
    /// Worker threads (default: all hardware threads)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Lossy,
    Dephasing,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::Lossy => Scenario::Lossy,
            ScenarioArg::Dephasing => Scenario::Dephasing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    A,
    B,
    C,
}

impl From<CriterionArg> for PhaseCriterion {
    fn from(c: CriterionArg) -> PhaseCriterion {
        match c {
            CriterionArg::A => PhaseCriterion::A,
            CriterionArg::B => PhaseCriterion::B,
            CriterionArg::C => PhaseCriterion::C,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PovmArg {
    Homodyne,
    Dh,
    Direct,
}

#[derive(Args)]
struct PointArgs {
    /// Channel family
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Loss parameter (lossy scenario)
    #[arg(long)]
    tau: Option<f64>,
    /// Phase-noise amplitude (dephasing scenario)
    #[arg(long)]
    sigma: Option<f64>,
    /// Kerr nonlinearity
    #[arg(long)]
    delta: f64,
    /// Probe energy; the amplitude is sqrt(nbar), real
    #[arg(long)]
    nbar: f64,
    /// Trace-deficit budget for the Fock truncation
    #[arg(long, default_value_t = 1e-5)]
    epsilon_trunc: f64,
    /// Eigenvalue-sum cutoff in spectral sums
    #[arg(long, default_value_t = 1e-12)]
    epsilon_eig: f64,
}

impl PointArgs {
    fn noise(&self) -> Result<f64> {
        match self.scenario {
            ScenarioArg::Lossy => match (self.tau, self.sigma) {
                (Some(t), None) => Ok(t),
                (None, _) => Err(KerrError::invalid("the lossy scenario requires --tau")),
                (Some(_), Some(_)) => {
                    Err(KerrError::invalid("--sigma does not apply to the lossy scenario"))
                }
            },
            ScenarioArg::Dephasing => match (self.sigma, self.tau) {
                (Some(s), None) => Ok(s),
                (None, _) => Err(KerrError::invalid("the dephasing scenario requires --sigma")),
                (Some(_), Some(_)) => {
                    Err(KerrError::invalid("--tau does not apply to the dephasing scenario"))
                }
            },
        }
    }

    fn model(&self) -> Result<StatisticalModel> {
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return Err(KerrError::invalid("--nbar must be finite and nonnegative"));
        }
        let noise = self.noise()?;
        let alpha = C64::new(self.nbar.sqrt(), 0.0);
        match self.scenario {
            ScenarioArg::Lossy => StatisticalModel::lossy(
                LossyKerrParams::new(noise, self.delta, alpha)?,
                self.epsilon_trunc,
            ),
            ScenarioArg::Dephasing => StatisticalModel::dephasing(
                DephasingKerrParams::new(noise, self.delta, alpha)?,
                self.epsilon_trunc,
            ),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Quantum bounds at one point: QFIM, Uhlmann curvature, quantumness, C_H
    Qfim(PointArgs),
    /// Classical Fisher information of one measurement at one point
    Fim {
        #[command(flatten)]
        point: PointArgs,
        /// Measurement to evaluate
        #[arg(long, value_enum)]
        povm: PovmArg,
        /// Homodyne quadrature phase; omit to optimize via --criterion
        #[arg(long)]
        theta: Option<f64>,
        /// Phase-optimization target (homodyne only)
        #[arg(long, value_enum)]
        criterion: Option<CriterionArg>,
    },
    /// Run a sweep described by a JSON config
    Sweep {
        /// Path to the sweep configuration
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (overrides the config's output_path)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        /// Override the loss axis, comma-separated
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<f64>>,
        /// Override the dephasing axis, comma-separated
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<f64>>,
        /// Override the nonlinearity axis, comma-separated
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<f64>>,
        /// Override the energy axis, comma-separated
        #[arg(long, value_delimiter = ',')]
        nbar: Option<Vec<f64>>,
        #[arg(long)]
        epsilon_trunc: Option<f64>,
        #[arg(long)]
        epsilon_eig: Option<f64>,
    },
    /// Recompute a figure preset, one CSV per panel
    Reproduce {
        /// Figure id, fig01 through fig14
        figure: String,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the acceptance suite and print one pass/fail line per criterion
    Validate {
        /// Run a single criterion by its two-digit id
        #[arg(long)]
        only: Option<String>,
        /// Print the detail lines of passing criteria too
        #[arg(long)]
        verbose: bool,
    },
}

fn sci(v: f64) -> String {
    format!("{v:.9e}")
}

fn print_matrix(label: &str, m: &kerrest::Matrix2<f64>) {
    println!("{label}_11  {}", sci(m[(0, 0)]));
    println!("{label}_22  {}", sci(m[(1, 1)]));
    println!("{label}_12  {}", sci(m[(0, 1)]));
}

fn cmd_qfim(args: &PointArgs) -> Result<()> {
    let model = args.model()?;
    let info = estimation::quantum_info(&model, args.epsilon_eig)?;
    println!("scenario  {}", Scenario::from(args.scenario));
    println!("noise     {}", sci(args.noise()?));
    println!("delta     {}", sci(args.delta));
    println!("nbar      {}", sci(args.nbar));
    println!("dim       {}", model.dim());
    print_matrix("H", &info.qfim);
    println!("U_12  {}", sci(info.uhlmann[(0, 1)]));
    println!("R     {}", sci(info.quantumness));
    println!("C_H   {}", sci(info.scalar_bound));
    Ok(())
}

fn cmd_fim(
    point: &PointArgs,
    povm: PovmArg,
    theta: Option<f64>,
    criterion: Option<CriterionArg>,
) -> Result<()> {
    let model = point.model()?;
    let settings = QuadSettings::default();
    let record = match povm {
        PovmArg::Homodyne => match (theta, criterion) {
            (Some(t), None) => MeasurementFIM::homodyne(&model, t, &settings)?,
            (None, Some(c)) => MeasurementFIM::homodyne_optimized(&model, c.into(), &settings)?,
            (None, None) => {
                return Err(KerrError::invalid("homodyne needs --theta or --criterion"))
            }
            (Some(_), Some(_)) => {
                return Err(KerrError::invalid("--theta and --criterion are mutually exclusive"))
            }
        },
        PovmArg::Dh => {
            if theta.is_some() || criterion.is_some() {
                return Err(KerrError::invalid("--theta/--criterion apply to homodyne only"));
            }
            MeasurementFIM::double_homodyne(&model, &settings)?
        }
        PovmArg::Direct => {
            if theta.is_some() || criterion.is_some() {
                return Err(KerrError::invalid("--theta/--criterion apply to homodyne only"));
            }
            MeasurementFIM::direct(&model)
        }
    };

    println!("scenario  {}", Scenario::from(point.scenario));
    println!("noise     {}", sci(point.noise()?));
    println!("delta     {}", sci(point.delta));
    println!("nbar      {}", sci(point.nbar));
    println!("dim       {}", model.dim());
    print_matrix("F", &record.fim);
    if let Some(t) = record.theta_opt {
        println!("theta_opt  {}", sci(t));
    }
    match record.scalar_bound {
        Some(c) => println!("C_F   {}", sci(c)),
        None => println!("C_F   undefined (singular FIM)"),
    }
    let h = estimation::qfim(&model, point.epsilon_eig)?;
    if let Ok((r1, r2)) = kerrest::measurements::fim_ratios(&record.fim, &h) {
        println!("F/H_noise  {}", sci(r1));
        println!("F/H_delta  {}", sci(r2));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: &PathBuf,
    out: Option<PathBuf>,
    scenario: Option<ScenarioArg>,
    tau: Option<Vec<f64>>,
    sigma: Option<Vec<f64>>,
    delta: Option<Vec<f64>>,
    nbar: Option<Vec<f64>>,
    epsilon_trunc: Option<f64>,
    epsilon_eig: Option<f64>,
) -> Result<()> {
    let mut spec = SweepSpec::from_json_file(config)?;
    if let Some(s) = scenario {
        spec.scenario = s.into();
    }
    let noise_override = match spec.scenario {
        Scenario::Lossy => {
            if sigma.is_some() {
                return Err(KerrError::invalid("--sigma does not apply to a lossy sweep"));
            }
            tau
        }
        Scenario::Dephasing => {
            if tau.is_some() {
                return Err(KerrError::invalid("--tau does not apply to a dephasing sweep"));
            }
            sigma
        }
    };
    if let Some(v) = noise_override {
        spec.noise = v;
    }
    if let Some(v) = delta {
        spec.delta = v;
    }
    if let Some(v) = nbar {
        spec.nbar = v;
    }
    if let Some(e) = epsilon_trunc {
        spec.tolerances.epsilon_trunc = e;
    }
    if let Some(e) = epsilon_eig {
        spec.tolerances.epsilon_eig = e;
    }
    if let Some(p) = out {
        spec.output_path = Some(p);
    }
    let path = spec
        .output_path
        .clone()
        .ok_or_else(|| KerrError::invalid("no output path: set output_path in the config or pass --out"))?;

    let table = sweep::run_sweep(&spec)?;
    table.write_csv(&path)?;
    table.write_sidecars(&path)?;
    println!("wrote {} rows ({} columns) to {}", table.rows.len(), table.columns.len(), path.display());
    if !table.errors.is_empty() {
        println!(
            "{} points failed; see {}",
            table.errors.len(),
            path.with_extension("errors.log").display()
        );
    }
    Ok(())
}

fn cmd_reproduce(figure: &str, out: &PathBuf) -> Result<()> {
    let fig: FigureId = figure.parse()?;
    let panels = sweep::reproduce(fig)?;
    for panel in &panels {
        let path = panel.write(out)?;
        println!("wrote {} ({} rows)", path.display(), panel.table.rows.len());
    }
    Ok(())
}

fn cmd_validate(only: Option<&str>, verbose: bool) -> Result<()> {
    let reports = match only {
        Some(id) => vec![validate::run_one(id)
            .ok_or_else(|| KerrError::invalid(format!("unknown criterion id '{id}' (01..13)")))?],
        None => validate::run_all(),
    };
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.line());
        if !r.passed || verbose {
            for d in &r.details {
                println!("    {d}");
            }
        }
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(KerrError::Numerical {
            context: format!("{failed} of {} acceptance criteria failed", reports.len()),
            residual: failed as f64,
        });
    }
    println!("all {} criteria passed", reports.len());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(KerrError::invalid("--threads must be at least 1"));
        }
        kerrest::set_threads(n);
    }
    match cli.command {
        Command::Qfim(args) => cmd_qfim(&args),
        Command::Fim { point, povm, theta, criterion } => cmd_fim(&point, povm, theta, criterion),
        Command::Sweep {
            config,
            out,
            scenario,
            tau,
            sigma,
            delta,
            nbar,
            epsilon_trunc,
            epsilon_eig,
        } => cmd_sweep(&config, out, scenario, tau, sigma, delta, nbar, epsilon_trunc, epsilon_eig),
        Command::Reproduce { figure, out } => cmd_reproduce(&figure, &out),
        Command::Validate { only, verbose } => cmd_validate(only.as_deref(), verbose),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
