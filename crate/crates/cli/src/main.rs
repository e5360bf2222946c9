//! Command-line front end: deflection computation, table sweeps, method
//! cross-verification, and trajectory dumps, with reproducible output.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification
//! failure — so CI can gate on `verify`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sungrazer_core::{
    compare_observation, deflection_closed_form, deflection_from_trajectory, deflection_root_find,
    derive, integrate_orbit, render, sig4_trunc, table1_with_observation, table2, trajectory_csv,
    DeflectionResult, DerivedQuantities, IntegrationSettings, ModelParams, Observation, OdeMode,
    OutputFormat, PhysicalConstants,
};

#[derive(Parser)]
#[command(
    name = "sungrazer",
    version,
    about = "Photon deflection at the solar limb under the force law F = GMm/(r(r-delta))",
    after_help = "Lengths are meters, angles radians unless stated; delta accepts meters (9.0e8) or solar radii (1.3R)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the solar gravitational parameter GM (m^3/s^2)
    #[arg(long, global = true, value_name = "M3_PER_S2")]
    mu: Option<f64>,

    /// Override the speed of light (m/s)
    #[arg(long, global = true, value_name = "M_PER_S")]
    c: Option<f64>,

    /// Override the solar radius (m)
    #[arg(long, global = true, value_name = "M")]
    r_sun: Option<f64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Angle unit for single-deflection output
    #[arg(long, global = true, value_enum, default_value_t = UnitsArg::Arcsec)]
    units: UnitsArg,

    /// Write output to this file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    /// arcseconds
    Arcsec,
    /// radians
    Rad,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// u'' + (1 - D*delta) u = D, the first-order equation
    Linearized,
    /// u'' + u = D/(1 - delta*u), the unexpanded force law
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form deflection angle for one scenario
    Deflect {
        /// delta in meters, or with trailing R in solar radii (e.g. 1.3R)
        #[arg(long, default_value = "1.3R", allow_hyphen_values = true)]
        delta: String,
        /// Branch index (1 is the physical branch)
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        m: i32,
    },

    /// Deflection vs delta, with the published values and observation
    Table1 {
        /// Comma-separated delta multiples of the solar radius
        #[arg(long, default_value = "1,1.3,2")]
        deltas: String,
        /// Observation central value (arcsec)
        #[arg(long, default_value_t = 1.775)]
        obs_value: f64,
        /// Observation uncertainty (arcsec), > 0
        #[arg(long, default_value_t = 0.019)]
        obs_sigma: f64,
    },

    /// Deflection vs branch index at fixed delta (published: -7..9 at 1.3R)
    Table2 {
        /// delta in meters, or with trailing R in solar radii
        #[arg(long, default_value = "1.3R", allow_hyphen_values = true)]
        delta: String,
        /// Inclusive branch range, e.g. -7..9
        #[arg(long, default_value = "-7..9", allow_hyphen_values = true)]
        m_range: String,
    },

    /// Branch sweep over an arbitrary range (same output as table2)
    SweepM {
        /// delta in meters, or with trailing R in solar radii
        #[arg(long, default_value = "1.3R", allow_hyphen_values = true)]
        delta: String,
        /// Inclusive branch range, e.g. -3..5
        #[arg(long, default_value = "-7..9", allow_hyphen_values = true)]
        m_range: String,
    },

    /// Run closed form, root-find and linearized ODE; exit 3 on disagreement
    Verify {
        /// Scenario delta (repeatable); default set: R, 1.3R, 2R
        #[arg(long = "delta", allow_hyphen_values = true)]
        deltas: Vec<String>,
        /// Maximum allowed pairwise relative gap between methods
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },

    /// Integrate the orbit and emit the trajectory as CSV
    DumpTrajectory {
        /// delta in meters, or with trailing R in solar radii
        #[arg(long, default_value = "1.3R", allow_hyphen_values = true)]
        delta: String,
        /// Orbit equation to integrate
        #[arg(long, value_enum, default_value_t = ModeArg::Linearized)]
        mode: ModeArg,
        /// Relative tolerance on state and event location
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
        /// Absolute tolerance (1/m); default 1e-12 * D
        #[arg(long)]
        abs_tol: Option<f64>,
        /// Step ceiling (rad)
        #[arg(long, default_value_t = 0.01)]
        max_step: f64,
        /// Integration cutoff (rad), > pi; default 4*pi
        #[arg(long)]
        theta_max: Option<f64>,
    },
}

enum AppError {
    Usage(String),
    Domain(String),
}

impl From<sungrazer_core::Error> for AppError {
    fn from(e: sungrazer_core::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, code)) => {
            if let Err(e) = emit(&cli.out, &output) {
                eprintln!("sungrazer: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("sungrazer: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Domain(msg)) => {
            eprintln!("sungrazer: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().write_all(bytes),
    }
}

fn run(cli: &Cli) -> Result<(Vec<u8>, u8), AppError> {
    let constants = PhysicalConstants::with_overrides(cli.mu, cli.c, cli.r_sun)?;
    let format = match cli.format {
        FormatArg::Text => OutputFormat::Text,
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };

    match &cli.command {
        Command::Deflect { delta, m } => {
            let params = params_from_spec(delta, constants)?;
            let dq = derive(&params)?;
            let result = deflection_closed_form(&dq, *m);
            Ok((render_deflection(&result, cli.units, format), 0))
        }

        Command::Table1 {
            deltas,
            obs_value,
            obs_sigma,
        } => {
            let multiples = parse_multiples(deltas)?;
            let obs = Observation::new(*obs_value, *obs_sigma)?;
            let base = ModelParams::with_delta_multiple(0.0, constants)?;
            let table = table1_with_observation(&base, &multiples, &obs)?;
            Ok((render(&table, format), 0))
        }

        Command::Table2 { delta, m_range } | Command::SweepM { delta, m_range } => {
            let params = params_from_spec(delta, constants)?;
            let (m_min, m_max) = parse_m_range(m_range)?;
            let table = table2(&params, m_min, m_max)?;
            Ok((render(&table, format), 0))
        }

        Command::Verify { deltas, tol } => {
            if *tol <= 0.0 || !tol.is_finite() {
                return Err(AppError::Usage(format!("--tol must be > 0, got {tol}")));
            }
            let specs: Vec<String> = if deltas.is_empty() {
                vec!["1R".into(), "1.3R".into(), "2R".into()]
            } else {
                deltas.clone()
            };
            verify(&specs, *tol, constants)
        }

        Command::DumpTrajectory {
            delta,
            mode,
            rel_tol,
            abs_tol,
            max_step,
            theta_max,
        } => {
            let params = params_from_spec(delta, constants)?;
            let dq = derive(&params)?;
            let mode = match mode {
                ModeArg::Linearized => OdeMode::Linearized,
                ModeArg::Exact => OdeMode::Exact,
            };
            let mut settings = IntegrationSettings::new(mode, &dq);
            settings.rel_tol = *rel_tol;
            settings.abs_tol = abs_tol.unwrap_or(1e-12 * dq.d);
            settings.max_step = *max_step;
            if let Some(tm) = theta_max {
                settings.theta_max = *tm;
            }
            let traj = integrate_orbit(&dq, &params, &settings)?;
            Ok((trajectory_csv(&traj).into_bytes(), 0))
        }
    }
}

/// `1.3R` → multiples of the solar radius; a bare number is meters.
fn parse_delta_spec(spec: &str, constants: &PhysicalConstants<f64>) -> Result<f64, AppError> {
    let spec = spec.trim();
    let (number, scale) = match spec.strip_suffix(['R', 'r']) {
        Some("") => ("1".to_string(), constants.r_sun),
        Some(prefix) => (prefix.to_string(), constants.r_sun),
        None => (spec.to_string(), 1.0),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| AppError::Usage(format!("cannot parse delta spec '{spec}'")))?;
    if value < 0.0 || !value.is_finite() {
        return Err(AppError::Usage(format!(
            "delta must be >= 0 and finite, got '{spec}'"
        )));
    }
    Ok(value * scale)
}

fn params_from_spec(
    spec: &str,
    constants: PhysicalConstants<f64>,
) -> Result<ModelParams<f64>, AppError> {
    let delta = parse_delta_spec(spec, &constants)?;
    Ok(ModelParams::new(delta, constants.r_sun, constants)?)
}

fn parse_multiples(list: &str) -> Result<Vec<f64>, AppError> {
    list.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| AppError::Usage(format!("cannot parse delta multiple '{tok}'")))
        })
        .collect()
}

fn parse_m_range(range: &str) -> Result<(i32, i32), AppError> {
    let err = || AppError::Usage(format!("cannot parse m range '{range}'; expected MIN..MAX"));
    let (lo, hi) = range.split_once("..").ok_or_else(err)?;
    let m_min: i32 = lo.trim().parse().map_err(|_| err())?;
    let m_max: i32 = hi.trim().parse().map_err(|_| err())?;
    Ok((m_min, m_max))
}

fn render_deflection(
    result: &DeflectionResult<f64>,
    units: UnitsArg,
    format: OutputFormat,
) -> Vec<u8> {
    match format {
        OutputFormat::Text => {
            let value = match units {
                UnitsArg::Arcsec => result.delta_theta_arcsec,
                UnitsArg::Rad => result.delta_theta,
            };
            format!("{}\n", sig4_trunc(value)).into_bytes()
        }
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(result).expect("result serialization");
            bytes.push(b'\n');
            bytes
        }
        OutputFormat::Csv => {
            let method = match result.method {
                sungrazer_core::Method::ClosedForm => "closed_form",
                sungrazer_core::Method::RootFind => "root_find",
                sungrazer_core::Method::OdeLinearized => "ode_linearized",
                sungrazer_core::Method::OdeExact => "ode_exact",
            };
            format!(
                "branch_m,phi_rad,delta_theta_rad,delta_theta_arcsec,method\n{},{:.16e},{:.16e},{:.16e},{}\n",
                result.branch_m, result.phi, result.delta_theta, result.delta_theta_arcsec, method
            )
            .into_bytes()
        }
    }
}

fn verify(
    specs: &[String],
    tol: f64,
    constants: PhysicalConstants<f64>,
) -> Result<(Vec<u8>, u8), AppError> {
    let mut out = String::new();
    out.push_str(&format!(
        "method cross-check, pairwise relative tolerance {tol:e}\n\n"
    ));
    out.push_str(&format!(
        "{:<10} {:>24} {:>24} {:>24} {:>12} {:>7}\n",
        "delta", "closed_form[\"]", "root_find[\"]", "ode_linearized[\"]", "worst_gap", "status"
    ));

    let mut all_ok = true;
    for spec in specs {
        let params = params_from_spec(spec, constants)?;
        let dq = derive(&params)?;
        let (closed, root, ode) = three_methods(&dq, &params)?;
        let reference = closed.delta_theta.abs().max(f64::MIN_POSITIVE);
        let gaps = [
            (closed.delta_theta - root.delta_theta).abs() / reference,
            (closed.delta_theta - ode.delta_theta).abs() / reference,
            (root.delta_theta - ode.delta_theta).abs() / reference,
        ];
        let worst = gaps.iter().fold(0.0_f64, |a, &b| a.max(b));
        let ok = worst <= tol;
        all_ok &= ok;
        out.push_str(&format!(
            "{:<10} {:>24.16e} {:>24.16e} {:>24.16e} {:>12.3e} {:>7}\n",
            spec,
            closed.delta_theta_arcsec,
            root.delta_theta_arcsec,
            ode.delta_theta_arcsec,
            worst,
            if ok { "ok" } else { "FAIL" }
        ));
        // the observation line is informative only
        let (within, sigma) = compare_observation(&closed, &Observation::solar_limb());
        out.push_str(&format!(
            "{:<10} within 1.775±0.019\": {} ({:+.2} sigma)\n",
            "", within, sigma
        ));
    }
    out.push_str(&format!(
        "\nverification: {}\n",
        if all_ok { "ok" } else { "FAILED" }
    ));
    Ok((out.into_bytes(), if all_ok { 0 } else { 3 }))
}

type ThreeWay = (
    DeflectionResult<f64>,
    DeflectionResult<f64>,
    DeflectionResult<f64>,
);

fn three_methods(
    dq: &DerivedQuantities<f64>,
    params: &ModelParams<f64>,
) -> Result<ThreeWay, AppError> {
    let closed = deflection_closed_form(dq, 1);
    let root = deflection_root_find(dq, 1, 1e-15)?;
    let settings = IntegrationSettings::new(OdeMode::Linearized, dq);
    let traj = integrate_orbit(dq, params, &settings)?;
    let ode = deflection_from_trajectory(&traj)?;
    Ok((closed, root, ode))
}
