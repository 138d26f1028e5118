use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gravimech::constants::{EV, K_B};
use gravimech::cwl::{cwl_probabilities, CwlParams};
use gravimech::harness::{
    comparison_table, emit, grid, load_config_file, run_comparison, sweep, sweep_table, ConfigOverrides, ExperimentConfig,
    Format, SweepAxis, Table,
};
use gravimech::numeric::RngStream;
use gravimech::physcore::{derive_scales, spike_frequency, xi0, DEFAULT_GAMMA_PAIRS};
use gravimech::pulse::PulseProtocol;
use gravimech::sn::{
    default_dt, feasibility, simulate_trajectory, sn_pulse_p0, steady_covariance, steady_covariance_printed, thermal_p0,
    SnParams,
};
use gravimech::{Error, Theory};

#[derive(Parser)]
#[command(name = "gravimech", version, about = "QM, Schrödinger–Newton and Correlated-Worldline predictions for pulsed optomechanics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Material and geometry derived scales.
    Material {
        #[command(subcommand)]
        command: MaterialCommand,
    },
    /// Correlated-Worldline predictions.
    Cwl {
        #[command(subcommand)]
        command: CwlCommand,
    },
    /// Schrödinger–Newton predictions.
    Sn {
        #[command(subcommand)]
        command: SnCommand,
    },
    /// Three-theory comparison for one configuration.
    Compare(CompareArgs),
    /// Comparison over a grid of one parameter.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum MaterialCommand {
    Props {
        #[arg(long)]
        config: PathBuf,
        /// Falls back to [experiment] temp_K.
        #[arg(long = "temp-K")]
        temp_k: Option<f64>,
        /// Falls back to [experiment] Q, then 1e8.
        #[arg(long = "Q")]
        q: Option<f64>,
        /// Monte Carlo pairs for the shape constant.
        #[arg(long)]
        pairs: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum CwlCommand {
    PulseProb {
        #[arg(long = "omega-m")]
        omega_m: f64,
        #[arg(long = "omega-sn")]
        omega_sn: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        tp: f64,
        #[arg(long = "Twait")]
        t_wait: f64,
        /// Fit the replica-count dependence and report the extrapolation residual.
        #[arg(long = "finite-N-check")]
        finite_n_check: bool,
    },
}

#[derive(Args)]
struct Frequencies {
    #[arg(long = "omega-m", default_value_t = 1.0)]
    omega_m: f64,
    #[arg(long = "omega-sn", default_value_t = 0.1)]
    omega_sn: f64,
}

#[derive(Subcommand)]
enum SnCommand {
    PulseProb {
        #[arg(long = "omega-m")]
        omega_m: f64,
        #[arg(long = "omega-sn")]
        omega_sn: f64,
        #[arg(long)]
        n: u32,
        #[arg(long = "Twait", default_value_t = 0.0)]
        t_wait: f64,
    },
    /// Steady conditional covariance.
    Steady {
        #[command(flatten)]
        freq: Frequencies,
        #[arg(long = "Lambda", default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Use the uncorrected momentum variance for comparison.
        #[arg(long = "verbatim")]
        verbatim: bool,
    },
    /// One conditional trajectory started from the steady covariance.
    Trajectory {
        #[command(flatten)]
        freq: Frequencies,
        #[arg(long = "Lambda", default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Defaults to 1e-3/Ω.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        #[arg(long, default_value_t = 0.0)]
        p0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Thermal {
        #[arg(long = "omega-m")]
        omega_m: f64,
        #[arg(long = "Q")]
        q: f64,
        #[arg(long = "temp-K")]
        temp_k: f64,
        #[arg(long)]
        tp: f64,
    },
    /// Largest T/Q keeping thermal noise below the SN signal.
    Feasibility {
        #[arg(long)]
        material: PathBuf,
        /// Temperature for the material-derived ω_SN; falls back to [experiment] temp_K, then 0.
        #[arg(long = "temp-K")]
        temp_k: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        target: f64,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long = "omega-m")]
    omega_m: Option<f64>,
    #[arg(long = "omega-sn")]
    omega_sn: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    tp: Option<f64>,
    #[arg(long = "Twait")]
    t_wait: Option<f64>,
    #[arg(long = "temp-K")]
    temp_k: Option<f64>,
    #[arg(long = "Q")]
    q: Option<f64>,
}

impl OverrideArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            omega_m: self.omega_m,
            omega_sn: self.omega_sn,
            n: self.n,
            t_p: self.tp,
            t_wait: self.t_wait,
            temperature: self.temp_k,
            q_factor: self.q,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 when a validity condition fails.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    axis: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    log: bool,
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    overrides: OverrideArgs,
}

enum Failure {
    Error(Error),
    Regime,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Regime) => ExitCode::from(3),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidMaterial(_) | Error::InvalidGeometry(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn writer(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &Value) -> Outcome {
    let mut w = writer(None)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Material { command: MaterialCommand::Props { config, temp_k, q, pairs, seed } } => {
            let file = load_config_file(&config)?;
            let (Some(material), Some(geometry)) = (file.material.clone(), file.geometry) else {
                return Err(Error::Config { keys: vec!["material".into(), "geometry".into()], message: "both sections are required".into() }.into());
            };
            let exp = file.experiment;
            let temperature = temp_k.or(exp.map(|e| e.temperature)).ok_or_else(|| Error::Config {
                keys: vec!["temp-K".into()],
                message: "give --temp-K or [experiment] temp_K".into(),
            })?;
            let q = q.or(exp.map(|e| e.q_factor)).unwrap_or(1e8);
            let pairs = pairs.or(exp.map(|e| e.gamma_pairs)).unwrap_or(DEFAULT_GAMMA_PAIRS);
            let seed = seed.or(exp.map(|e| e.seed)).unwrap_or(1);
            let s = derive_scales(&material, &geometry, temperature, q, pairs, RngStream::new(seed))?;
            print_json(&json!({
                "xi0_m": s.xi0,
                "omega_sn_rad_s": s.omega_sn,
                "omega_b_rad_s": s.omega_b,
                "gamma": s.gamma,
                "gamma_std_error": s.gamma_std_error,
                "v_spike_depth_K": s.v_spike_depth / K_B,
                "v_slow_depth_eV": s.v_slow_depth / EV,
                "tau_r_s": s.tau_r,
                "mass_kg": s.mass,
            }))
        }
        Command::Cwl { command: CwlCommand::PulseProb { omega_m, omega_sn, n, tp, t_wait, finite_n_check } } => {
            let protocol = PulseProtocol::new(n, tp, t_wait)?;
            let p = cwl_probabilities(&CwlParams::new(omega_m, omega_sn)?, &protocol, finite_n_check)?;
            for note in &p.diagnostics.notes {
                eprintln!("warning: {note}");
            }
            print_json(&json!({
                "P0": p.p0,
                "P1": p.p1,
                "eps2": p.diagnostics.eps2,
                "regime_ok": p.diagnostics.regime_ok,
                "extrapolation_residual": p.diagnostics.extrapolation_residual,
            }))
        }
        Command::Sn { command } => run_sn(command),
        Command::Compare(args) => run_compare(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn run_sn(command: SnCommand) -> Outcome {
    match command {
        SnCommand::PulseProb { omega_m, omega_sn, n, t_wait } => {
            let r = sn_pulse_p0(&SnParams::new(omega_m, omega_sn)?, n, t_wait)?;
            print_json(&json!({ "p0": r.p0, "p1": r.p1, "p0_leading": r.p0_leading, "p0_exact": r.p0_exact }))
        }
        SnCommand::Steady { freq, lambda, mass, verbatim } => {
            let p = SnParams::with_lambda(mass, freq.omega_m, freq.omega_sn, lambda)?;
            let s = if verbatim { steady_covariance_printed(&p) } else { steady_covariance(&p) };
            print_json(&json!({
                "variant": if verbatim { "verbatim" } else { "corrected" },
                "Lambda": lambda,
                "Vxx": s.vxx,
                "Vxp": s.vxp,
                "Vpp": s.vpp,
                "determinant": s.determinant(),
                "physical": s.is_physical(p.hbar),
            }))
        }
        SnCommand::Trajectory { freq, lambda, mass, steps, dt, seed, x0, p0, out } => {
            let p = SnParams::with_lambda(mass, freq.omega_m, freq.omega_sn, lambda)?;
            let dt = dt.unwrap_or_else(|| default_dt(&p));
            let init = steady_covariance(&p);
            let init = gravimech::sn::ConditionalGaussianState { mean_x: x0, mean_p: p0, ..init };
            let traj = simulate_trajectory(&p, init, dt, steps, RngStream::new(seed))?;
            let mut table = Table::new(&["t", "mean_x", "mean_p", "Vxx", "Vxp", "Vpp", "y"]);
            for (k, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
                // y[k−1] is the record over the step ending at t_k
                let y = if k == 0 { f64::NAN } else { traj.record.y[k - 1] };
                table.push(vec![*t, s.mean_x, s.mean_p, s.vxx, s.vxp, s.vpp, y])?;
            }
            let header = json!({
                "omega_m": p.omega_m, "omega_sn": p.omega_sn, "mass": p.mass, "Lambda": lambda, "alpha": p.alpha,
                "dt": dt, "steps": steps, "seed": seed, "x0": x0, "p0": p0,
            });
            let mut w = writer(out.as_deref())?;
            emit(&table, Format::Csv, &header, &mut w)?;
            w.flush()?;
            Ok(())
        }
        SnCommand::Thermal { omega_m, q, temp_k, tp } => {
            let e = thermal_p0(omega_m, q, temp_k, tp)?;
            print_json(&json!({ "p0_th": e.p0_th, "regime_ok": e.regime_ok, "occupation_rate": e.occupation_rate }))
        }
        SnCommand::Feasibility { material, temp_k, target } => {
            let file = load_config_file(&material)?;
            let exp = file.experiment;
            let omega_sn = match (exp.and_then(|e| e.omega_sn_override), &file.material) {
                (Some(w), _) => w,
                (None, Some(m)) => {
                    let t = temp_k.or(exp.map(|e| e.temperature)).unwrap_or(0.0);
                    spike_frequency(m, xi0(m, t)?)?
                }
                (None, None) => {
                    return Err(Error::Config {
                        keys: vec!["material".into()],
                        message: "need a [material] section or experiment.omega_sn_override_rad_s".into(),
                    }
                    .into())
                }
            };
            let f = feasibility(omega_sn, target)?;
            print_json(&json!({ "omega_sn": f.omega_sn, "T_over_Q_max_K": f.t_over_q_max_k }))
        }
    }
}

fn load(path: &Path, overrides: &OverrideArgs) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::load(path)?.with_overrides(&overrides.overrides())
}

fn run_compare(args: CompareArgs) -> Outcome {
    let config = load(&args.config, &args.overrides)?;
    let c = run_comparison(&config)?;
    for w in &c.warnings {
        eprintln!("warning: {w}");
    }
    let echo = serde_json::to_value(&config).map_err(Error::from)?;
    let mut w = writer(args.out.as_deref())?;
    if args.csv {
        emit(&comparison_table(&c), Format::Csv, &echo, &mut w)?;
    } else {
        let cwl = c.prediction(Theory::Cwl);
        let doc = json!({
            "config": echo,
            "params": c.params,
            "P0": { "QM": c.prediction(Theory::Qm).p0, "SN": c.prediction(Theory::Sn).p0, "CWL": cwl.p0 },
            "P0_SN_exact": c.sn_p0_exact,
            "predictions": c.predictions,
            "thermal": c.thermal,
            "feasibility": c.feasibility,
            "warnings": c.warnings,
        });
        serde_json::to_writer_pretty(&mut w, &doc).map_err(Error::from)?;
        writeln!(w)?;
    }
    w.flush()?;
    if args.strict && !c.regime_ok() {
        eprintln!("regime violation (--strict)");
        return Err(Failure::Regime);
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Outcome {
    let axis: SweepAxis = args.axis.parse()?;
    let config = load(&args.config, &args.overrides)?;
    let values = grid(args.from, args.to, args.points, args.log)?;
    let results = sweep(&config, axis, &values)?;
    let violations = results.iter().filter(|(_, c)| !c.regime_ok()).count();
    if violations > 0 {
        eprintln!("warning: {violations} of {} points violate a validity condition", results.len());
    }
    let echo = json!({
        "config": serde_json::to_value(&config).map_err(Error::from)?,
        "sweep": { "axis": axis.name(), "from": args.from, "to": args.to, "points": args.points, "log": args.log },
    });
    let mut w = writer(args.out.as_deref())?;
    let format = if args.json { Format::Json } else { Format::Csv };
    emit(&sweep_table(&results), format, &echo, &mut w)?;
    w.flush()?;
    if args.strict && violations > 0 {
        return Err(Failure::Regime);
    }
    Ok(())
}
