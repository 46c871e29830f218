//! Run configuration, argument parsing and the analysis commands behind the
//! `switchover` binary.

pub mod commands;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use switchover_core::units::{convert_units, Unit};
use switchover_core::{FieldConfig, Label, SweepTable};

pub use commands::{cmd_landscape, cmd_rstar, cmd_spectrum, cmd_switchover, cmd_trajectories, cmd_yields};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; nothing has been written.
    Usage(String),
    Numerical(switchover_core::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<switchover_core::Error> for CliError {
    fn from(e: switchover_core::Error) -> Self {
        match e {
            switchover_core::Error::Io(m) => CliError::Io(m),
            switchover_core::Error::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "switchover", version, about = "Saddle-point analysis of ω–2ω colour-switchover ionisation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Im S / Re S grid, saddle list and contour polylines for one field.
    Landscape(RunArgs),
    /// θ sweep with labelled saddles and the contributing set.
    Switchover(RunArgs),
    /// SPM spectrum with per-orbit contributions.
    Spectrum(RunArgs),
    /// Per-orbit yields over a list of Keldysh parameters.
    Yields(RunArgs),
    /// Coalescence ratio R* versus γ with its asymptotes.
    Rstar(RunArgs),
    /// Trajectories of the four orbits, with momentum bands.
    Trajectories(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Landscape(_) => "landscape",
            Command::Switchover(_) => "switchover",
            Command::Spectrum(_) => "spectrum",
            Command::Yields(_) => "yields",
            Command::Rstar(_) => "rstar",
            Command::Trajectories(_) => "trajectories",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Landscape(a)
            | Command::Switchover(a)
            | Command::Spectrum(a)
            | Command::Yields(a)
            | Command::Rstar(a)
            | Command::Trajectories(a) => a,
        }
    }
}

fn parse_orders(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected n1,n2, got '{s}'"))?;
    let n1 = a.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let n2 = b.trim().parse::<u32>().map_err(|e| e.to_string())?;
    Ok((n1, n2))
}

fn parse_label(s: &str) -> Result<Label, String> {
    s.parse::<Label>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Total intensity in W/cm² [default: 4e14].
    #[arg(long, conflicts_with = "intensity_au")]
    pub intensity_wcm2: Option<f64>,
    /// Total intensity in atomic units.
    #[arg(long)]
    pub intensity_au: Option<f64>,
    /// Fundamental wavelength in nm [default: 800].
    #[arg(long, conflicts_with = "omega_au")]
    pub wavelength_nm: Option<f64>,
    /// Fundamental angular frequency in atomic units.
    #[arg(long)]
    pub omega_au: Option<f64>,
    /// Mixing angle in degrees.
    #[arg(long, default_value_t = 45.0)]
    pub theta_deg: f64,
    /// Relative phase of the second colour in radians.
    #[arg(long, default_value_t = 0.0)]
    pub phi2_rad: f64,
    /// Harmonic orders of the two colours.
    #[arg(long, value_parser = parse_orders, default_value = "1,2")]
    pub orders: (u32, u32),
    /// Ionisation potential in atomic units [default: 0.5].
    #[arg(long, conflicts_with = "ip_ev")]
    pub ip_au: Option<f64>,
    /// Ionisation potential in eV.
    #[arg(long)]
    pub ip_ev: Option<f64>,
    /// Lower end of the momentum range, a.u.; the momentum of single-p commands
    #[arg(long)]
    pub p_min: Option<f64>,
    /// Upper end of the momentum range, a.u.
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Number of momenta in the range
    #[arg(long)]
    pub p_count: Option<usize>,
    /// Comma-separated Keldysh parameters.
    #[arg(long, value_delimiter = ',')]
    pub gamma_list: Option<Vec<f64>>,
    /// Comma-separated mixing angles in degrees.
    #[arg(long, value_delimiter = ',')]
    pub theta_list: Option<Vec<f64>>,
    /// Landscape points along Re ωt (half as many along Im ωt).
    #[arg(long, default_value_t = 200)]
    pub grid_res: usize,
    /// Drop this orbit from the summed amplitude (repeatable).
    #[arg(long, value_parser = parse_label)]
    pub exclude_orbit: Vec<Label>,
    /// Output table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl Default for RunArgs {
    fn default() -> Self {
        RunArgs::parse_from_slice(&[])
    }
}

impl RunArgs {
    fn parse_from_slice(args: &[&str]) -> Self {
        #[derive(Parser)]
        struct Wrap {
            #[command(flatten)]
            args: RunArgs,
        }
        Wrap::parse_from(std::iter::once("switchover").chain(args.iter().copied())).args
    }
}

/// Validated, unit-converted run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldConfig,
    /// Intensity in a.u.
    pub i0: f64,
    pub p_range: Option<(f64, f64)>,
    pub p_count: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    /// Degrees, as given.
    pub thetas_deg: Option<Vec<f64>>,
    pub grid_res: usize,
    pub exclude: Vec<Label>,
    pub format: Format,
    pub out: PathBuf,
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> CliResult<Self> {
        let conv = |v, from, to| convert_units(v, from, to).map_err(CliError::from);
        let i0 = match (a.intensity_wcm2, a.intensity_au) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --intensity-wcm2, --intensity-au".into())),
            (_, Some(au)) => positive("intensity", au)?,
            (w, None) => conv(positive("intensity", w.unwrap_or(4e14))?, Unit::IntensityWcm2, Unit::IntensityAu)?,
        };
        let omega = match (a.wavelength_nm, a.omega_au) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --wavelength-nm, --omega-au".into())),
            (_, Some(w)) => positive("omega", w)?,
            (nm, None) => conv(positive("wavelength", nm.unwrap_or(800.0))?, Unit::WavelengthNm, Unit::FrequencyAu)?,
        };
        let ip = match (a.ip_au, a.ip_ev) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give only one of --ip-au, --ip-ev".into())),
            (_, Some(ev)) => conv(positive("ip", ev)?, Unit::EnergyEv, Unit::EnergyAu)?,
            (au, None) => positive("ip", au.unwrap_or(0.5))?,
        };
        let theta = check_theta(a.theta_deg)?;
        let field = FieldConfig::new(i0.sqrt(), omega, theta, ip)?
            .with_phase(a.phi2_rad)?
            .with_orders(a.orders.0, a.orders.1)?;

        let p_range = match (a.p_min, a.p_max) {
            (None, None) => None,
            (lo, hi) => {
                let hi = hi.unwrap_or(lo.map_or(2.0, |l| l.abs()));
                let lo = lo.unwrap_or(-hi);
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(CliError::Usage(format!("invalid momentum range [{lo}, {hi}]")));
                }
                Some((lo, hi))
            }
        };
        if a.p_count == Some(0) {
            return Err(CliError::Usage("--p-count must be at least 1".into()));
        }
        if let Some(g) = &a.gamma_list {
            for &x in g {
                positive("gamma", x)?;
            }
        }
        if let Some(t) = &a.theta_list {
            for &d in t {
                check_theta(d)?;
            }
        }
        if a.grid_res < 2 {
            return Err(CliError::Usage("--grid-res must be at least 2".into()));
        }
        Ok(RunConfig {
            field,
            i0,
            p_range,
            p_count: a.p_count,
            gammas: a.gamma_list.clone(),
            thetas_deg: a.theta_list.clone(),
            grid_res: a.grid_res,
            exclude: a.exclude_orbit.clone(),
            format: a.format,
            out: a.out.clone(),
        })
    }

    /// Default scenario: 4e14 W/cm², 800 nm, Ip = 0.5 a.u., θ = 45°.
    pub fn reference(out: &Path) -> Self {
        let mut a = RunArgs::default();
        a.out = out.to_path_buf();
        RunConfig::from_args(&a).expect("defaults are valid")
    }

    /// Metadata lines shared by every output file.
    pub fn describe(&self, table: &mut SweepTable, command: &str) {
        let f = &self.field;
        table
            .meta("command", command)
            .meta("engine_version", switchover_core::VERSION)
            .meta("intensity_au", format_meta(self.i0))
            .meta("e0_au", format_meta(f.e0))
            .meta("omega_au", format_meta(f.omega))
            .meta("theta_deg", format_meta(f.theta.to_degrees()))
            .meta("phi2_rad", format_meta(f.phi2))
            .meta("orders", format!("{},{}", f.n1, f.n2))
            .meta("ip_au", format_meta(f.ip))
            .meta("saddle_tolerance", format_meta(switchover_core::saddle::SADDLE_TOLERANCE))
            .meta("coalescence_guard", format_meta(switchover_core::saddle::COALESCENCE_GUARD));
        if !self.exclude.is_empty() {
            let l: Vec<String> = self.exclude.iter().map(|l| l.to_string()).collect();
            table.meta("excluded_orbits", l.join(";"));
        }
    }

    /// Writes `table` as `<out>/<stem>.<ext>` and returns the path.
    pub fn write(&self, stem: &str, table: &SweepTable) -> CliResult<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join(format!("{stem}.{}", self.format.extension()));
        let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        match self.format {
            Format::Csv => table.write_csv(file)?,
            Format::Json => table.write_json(file)?,
        }
        Ok(path)
    }

    /// Records a numerical failure next to the outputs.
    pub fn write_diagnostic(&self, command: &str, err: &CliError) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join("diagnostic.txt");
        let text = format!("command: {command}\nerror: {err}\nconfig: {:?}\n", self.field);
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

fn check_theta(deg: f64) -> CliResult<f64> {
    if deg.is_finite() && (0.0..=90.0).contains(&deg) {
        Ok(deg.to_radians())
    } else {
        Err(CliError::Usage(format!("mixing angle must lie in [0, 90] degrees, got {deg}")))
    }
}

fn format_meta(x: f64) -> String {
    switchover_core::table::format_float(x)
}

/// Runs one parsed command and returns the written files.
pub fn run(command: &Command) -> CliResult<Vec<PathBuf>> {
    let cfg = RunConfig::from_args(command.args())?;
    let result = match command {
        Command::Landscape(_) => cmd_landscape(&cfg),
        Command::Switchover(_) => cmd_switchover(&cfg),
        Command::Spectrum(_) => cmd_spectrum(&cfg),
        Command::Yields(_) => cmd_yields(&cfg),
        Command::Rstar(_) => cmd_rstar(&cfg),
        Command::Trajectories(_) => cmd_trajectories(&cfg),
    };
    if let Err(e @ CliError::Numerical(_)) = &result {
        // best effort; the original error is what gets reported
        let _ = cfg.write_diagnostic(command.name(), e);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_field() {
        let cfg = RunConfig::from_args(&RunArgs::default()).unwrap();
        let r = FieldConfig::reference(45.0);
        assert!((cfg.field.e0 - r.e0).abs() < 1e-15);
        assert!((cfg.field.omega - r.omega).abs() < 1e-15);
        assert_eq!(cfg.field.ip, 0.5);
    }

    #[test]
    fn rejects_bad_angles_and_units() {
        let mut a = RunArgs::default();
        a.theta_deg = 95.0;
        assert!(matches!(RunConfig::from_args(&a), Err(CliError::Usage(_))));
        let mut a = RunArgs::default();
        a.intensity_wcm2 = Some(1e14);
        a.intensity_au = Some(0.01);
        assert!(matches!(RunConfig::from_args(&a), Err(CliError::Usage(_))));
        let mut a = RunArgs::default();
        a.wavelength_nm = Some(-800.0);
        assert!(matches!(RunConfig::from_args(&a), Err(CliError::Usage(_))));
    }

    #[test]
    fn ip_in_ev() {
        let mut a = RunArgs::default();
        a.ip_ev = Some(13.605_693);
        let cfg = RunConfig::from_args(&a).unwrap();
        assert!((cfg.field.ip - 0.5).abs() < 1e-6);
    }

    #[test]
    fn orders_parse() {
        assert_eq!(parse_orders("1,3"), Ok((1, 3)));
        assert!(parse_orders("1").is_err());
    }
}
