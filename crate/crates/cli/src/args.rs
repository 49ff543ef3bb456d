use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssns_core::fields::{AxisRange, GridSpec};
use ssns_core::precision::PrecisionConfig;
use ssns_core::reduction::{uniform_grid, FlowParams, GInit};
use ssns_core::{Error, Real, Result, Variant};

#[derive(Debug, Parser)]
#[command(name = "ssns", version, about = "Self-similar Navier-Stokes solutions: Kummer functions, profiles, fields and verification")]
#[command(propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate M, U, dU, d2U (arguments a b z) or W (arguments kappa mu z).
    EvalKummer(EvalArgs),
    /// Tabulate f, g, h, l and their first derivatives on the omega grid.
    Profile(ProfileArgs),
    /// Sample u, v, w, p on a box at time t.
    Field(FieldArgs),
    /// Points of the box where u equals the requested level.
    LevelSet(LevelSetArgs),
    /// Run the residual suite and print the JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KummerFn {
    #[value(name = "M")]
    M,
    #[value(name = "U")]
    U,
    #[value(name = "dU")]
    DU,
    #[value(name = "d2U")]
    D2U,
    #[value(name = "W")]
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Printed,
    Derived,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Printed => Variant::Printed,
            VariantArg::Derived => Variant::Derived,
        }
    }
}

#[derive(Debug, Args)]
pub struct PrecisionArg {
    /// Significant decimal digits.
    #[arg(long, default_value_t = 40)]
    pub precision: u32,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub function: KummerFn,
    #[arg(allow_hyphen_values = true)]
    pub a: String,
    #[arg(allow_hyphen_values = true)]
    pub b: String,
    #[arg(allow_hyphen_values = true)]
    pub z: String,
    #[command(flatten)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Kinematic viscosity.
    #[arg(long, allow_negative_numbers = true, default_value = "0.1")]
    pub nu: String,
    /// External force a on the z-momentum equation.
    #[arg(long, allow_negative_numbers = true, default_value = "0")]
    pub force: String,
    #[arg(long, allow_negative_numbers = true, default_value = "1")]
    pub rho: String,
    /// Continuity constant in f + g + h = c.
    #[arg(long, allow_negative_numbers = true, default_value = "1")]
    pub c: String,
    /// Weight of the U kernel.
    #[arg(long, allow_negative_numbers = true, default_value = "1")]
    pub c1: String,
    /// Weight of the M kernel.
    #[arg(long, allow_negative_numbers = true, default_value = "0")]
    pub c2: String,
    /// Pressure gauge l(0).
    #[arg(long, allow_negative_numbers = true, default_value = "0")]
    pub l0: String,
    /// Profile grid min:max:count.
    #[arg(long, allow_hyphen_values = true, default_value = "-8:8:801")]
    pub omega: String,
    /// g(0); default c/3.
    #[arg(long, allow_negative_numbers = true)]
    pub g0: Option<String>,
    #[arg(long = "g0-prime", allow_negative_numbers = true)]
    pub g0_prime: Option<String>,
    #[command(flatten)]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, value_enum, default_value = "printed")]
    pub variant: VariantArg,
    /// Subtract c/3 - 2a/3 from the f column.
    #[arg(long)]
    pub kernel_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, value_enum, default_value = "printed")]
    pub variant: VariantArg,
    /// Box x0:x1:nx,y0:y1:ny,z0:z1:nz.
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:11,-1:1:11,-1:1:11")]
    pub grid: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LevelSetArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, value_enum, default_value = "printed")]
    pub variant: VariantArg,
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:41,-1:1:41,-1:1:41")]
    pub grid: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub t: f64,
    /// Target value of u.
    #[arg(long, allow_negative_numbers = true, default_value = "2")]
    pub level: String,
    /// Compare u itself rather than u without its constant part.
    #[arg(long)]
    pub level_includes_tail: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub flow: FlowArgs,
    /// Finite-difference box x0:x1:nx,y0:y1:ny,z0:z1:nz.
    #[arg(long, allow_hyphen_values = true, default_value = "-0.25:0.25:5,-0.25:0.25:5,-0.25:0.25:5")]
    pub grid: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub t: f64,
    /// Comma-separated families (kummer, reduction, profile, pde, fushchich) or check ids.
    #[arg(long, allow_hyphen_values = true)]
    pub checks: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl PrecisionArg {
    pub fn config(&self) -> Result<PrecisionConfig> {
        PrecisionConfig::new(self.precision)
    }
}

/// `min:max:count`.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("expected min:max:count, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((min, max, count))
}

pub fn parse_grid(s: &str, t: f64, prec: &PrecisionConfig) -> Result<GridSpec> {
    let axes: Vec<&str> = s.split(',').collect();
    if axes.len() != 3 {
        return Err(Error::Parse(format!("expected x0:x1:nx,y0:y1:ny,z0:z1:nz, got '{s}'")));
    }
    let mut r = Vec::new();
    for a in axes {
        let (lo, hi, n) = parse_range(a)?;
        r.push(AxisRange::new(lo, hi, n)?);
    }
    let z = r.pop().expect("z");
    let y = r.pop().expect("y");
    let x = r.pop().expect("x");
    GridSpec::new(x, y, z, t, GridSpec::default_dt(prec))
}

impl FlowArgs {
    pub fn params(&self, prec: &PrecisionConfig) -> Result<FlowParams> {
        let r = |s: &str| prec.parse(s);
        FlowParams::new(r(&self.nu)?, r(&self.force)?, r(&self.rho)?, r(&self.c)?, r(&self.c1)?, r(&self.c2)?, r(&self.l0)?)
    }

    pub fn omega_range(&self) -> Result<(f64, f64, usize)> {
        parse_range(&self.omega)
    }

    pub fn omega_grid(&self, prec: &PrecisionConfig) -> Result<Vec<Real>> {
        let (lo, hi, n) = self.omega_range()?;
        uniform_grid(&prec.real(lo), &prec.real(hi), n, prec)
    }

    /// `--g0`/`--g0-prime` override the symmetric data at `omega = 0`.
    pub fn init(&self, p: &FlowParams, prec: &PrecisionConfig) -> Result<GInit> {
        let mut init = GInit::symmetric(p, prec);
        if let Some(g) = &self.g0 {
            init.g0 = prec.parse(g)?;
        }
        if let Some(g) = &self.g0_prime {
            init.g0_prime = prec.parse(g)?;
        }
        Ok(init)
    }
}
