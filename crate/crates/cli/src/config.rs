use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use zitter_core::representations::{Momentum, RepresentationKind};
use zitter_core::wavepacket::Composition;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Traj,
    Packet,
    Fw,
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "verify" => Ok(Command::Verify),
            "traj" | "trajectory" => Ok(Command::Traj),
            "packet" => Ok(Command::Packet),
            "fw" => Ok(Command::Fw),
            other => Err(CliError::Config(format!("unknown command '{other}' (verify, traj, packet, fw)"))),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Verify => "verify",
            Command::Traj => "traj",
            Command::Packet => "packet",
            Command::Fw => "fw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format '{other}' (csv, json)"))),
        }
    }
}

/// Command-line flags. Every flag is optional so that a config file can supply it.
#[derive(Debug, Default, Parser)]
#[command(name = "zitter", version, about = "Zitterbewegung verification suites, trajectories, wave packets and FW transforms")]
pub struct Flags {
    /// Flat `key = value` file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// verify, traj, packet or fw.
    #[arg(long)]
    pub command: Option<String>,
    /// Dirac, GFV (FV) or ST (SakataTaketani).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub mass: Option<String>,
    /// Mode momentum as `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub momentum: Option<String>,
    /// GFV parameter N (defaults to the mass, or 1 when massless).
    #[arg(long = "gfv-n")]
    pub gfv_n: Option<String>,
    /// Packet central momentum along x.
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Packet momentum width (defaults to 0.05·m).
    #[arg(long = "sigma-p")]
    pub sigma_p: Option<String>,
    /// positive, negative or mixed:<w₊>.
    #[arg(long)]
    pub composition: Option<String>,
    #[arg(long)]
    pub tmax: Option<String>,
    /// Number of time samples.
    #[arg(long)]
    pub samples: Option<String>,
    /// Seed of the randomized verification set.
    #[arg(long)]
    pub seed: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Replace every verification tolerance by this value.
    #[arg(long)]
    pub tolerance: Option<String>,
}

/// Raw values, as strings, gathered from the config file and the flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub command: Option<String>,
    pub kind: Option<String>,
    pub mass: Option<String>,
    pub momentum: Option<String>,
    pub gfv_n: Option<String>,
    pub p0: Option<String>,
    pub sigma_p: Option<String>,
    pub composition: Option<String>,
    pub tmax: Option<String>,
    pub samples: Option<String>,
    pub seed: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub tolerance: Option<String>,
}

impl PartialConfig {
    fn slot(&mut self, key: &str) -> Option<&mut Option<String>> {
        Some(match key {
            "command" => &mut self.command,
            "kind" => &mut self.kind,
            "mass" | "m" => &mut self.mass,
            "momentum" | "p" => &mut self.momentum,
            "gfv-n" | "gfv_n" | "n" => &mut self.gfv_n,
            "p0" => &mut self.p0,
            "sigma-p" | "sigma_p" => &mut self.sigma_p,
            "composition" => &mut self.composition,
            "tmax" | "t-max" | "t_max" => &mut self.tmax,
            "samples" | "n-samples" | "n_samples" => &mut self.samples,
            "seed" => &mut self.seed,
            "out" | "output" => &mut self.out,
            "format" => &mut self.format,
            "tolerance" => &mut self.tolerance,
            _ => return None,
        })
    }

    /// Parse `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_file_contents(text: &str) -> Result<Self, CliError> {
        let mut out = PartialConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1)))?;
            let key = key.trim().trim_start_matches("--").to_ascii_lowercase();
            let value = value.trim().trim_matches('"').to_string();
            let slot = out
                .slot(&key)
                .ok_or_else(|| CliError::Config(format!("line {}: unknown key '{key}'", lineno + 1)))?;
            *slot = Some(value);
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_file_contents(&text)
    }

    pub fn from_flags(flags: &Flags) -> Self {
        PartialConfig {
            command: flags.command.clone(),
            kind: flags.kind.clone(),
            mass: flags.mass.clone(),
            momentum: flags.momentum.clone(),
            gfv_n: flags.gfv_n.clone(),
            p0: flags.p0.clone(),
            sigma_p: flags.sigma_p.clone(),
            composition: flags.composition.clone(),
            tmax: flags.tmax.clone(),
            samples: flags.samples.clone(),
            seed: flags.seed.clone(),
            out: flags.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
            format: flags.format.clone(),
            tolerance: flags.tolerance.clone(),
        }
    }

    /// Values in `other` win.
    pub fn overlay(mut self, other: PartialConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(command, kind, mass, momentum, gfv_n, p0, sigma_p, composition, tmax, samples, seed, out, format, tolerance);
        self
    }
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kind: RepresentationKind,
    pub mass: f64,
    pub momentum: Momentum,
    pub gfv_n: Option<f64>,
    pub p0: f64,
    pub sigma_p: f64,
    pub composition: Composition,
    /// `None` selects the command's default span of ten trembling periods.
    pub t_max: Option<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub tolerance: Option<f64>,
    /// Whether the mode parameters were given explicitly (verify then checks just that mode).
    pub mode_configured: bool,
}

pub const DEFAULT_SEED: u64 = 42;

fn number(key: &str, value: &str) -> Result<f64, CliError> {
    let x: f64 = value.trim().parse().map_err(|_| CliError::Config(format!("{key}: '{value}' is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("{key}: '{value}' is not finite")));
    }
    Ok(x)
}

fn positive(key: &str, value: &str) -> Result<f64, CliError> {
    let x = number(key, value)?;
    if x <= 0.0 {
        return Err(CliError::Config(format!("{key} must be positive, got {x}")));
    }
    Ok(x)
}

fn momentum(value: &str) -> Result<Momentum, CliError> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("momentum: expected x,y,z, got '{value}'")));
    }
    let mut p = [0.0; 3];
    for (slot, part) in p.iter_mut().zip(parts) {
        *slot = number("momentum", part)?;
    }
    Ok(p)
}

impl RunConfig {
    pub fn from_partial(raw: PartialConfig) -> Result<Self, CliError> {
        let command: Command = raw
            .command
            .as_deref()
            .ok_or_else(|| CliError::Config("no command given (--command verify|traj|packet|fw)".into()))?
            .parse()?;
        let kind = match raw.kind.as_deref() {
            Some(s) => s.parse::<RepresentationKind>().map_err(|e| CliError::Config(e.to_string()))?,
            None => RepresentationKind::Dirac,
        };
        let mass = match raw.mass.as_deref() {
            Some(s) => number("mass", s)?,
            None => 1.0,
        };
        if mass < 0.0 {
            return Err(CliError::Config(format!("mass must be non-negative, got {mass}")));
        }
        let p = match raw.momentum.as_deref() {
            Some(s) => momentum(s)?,
            None => [0.0; 3],
        };
        let gfv_n = match (kind, raw.gfv_n.as_deref()) {
            (RepresentationKind::Gfv, Some(s)) => Some(positive("gfv-n", s)?),
            (RepresentationKind::Gfv, None) => Some(if mass > 0.0 { mass } else { 1.0 }),
            _ => None,
        };
        let p0 = match raw.p0.as_deref() {
            Some(s) => number("p0", s)?,
            None => 0.0,
        };
        let sigma_p = match raw.sigma_p.as_deref() {
            Some(s) => positive("sigma-p", s)?,
            None => 0.05 * if mass > 0.0 { mass } else { 1.0 },
        };
        let composition = match raw.composition.as_deref() {
            Some(s) => s.parse::<Composition>().map_err(|e| CliError::Config(e.to_string()))?,
            None => Composition::Mixed(0.5),
        };
        let t_max = raw.tmax.as_deref().map(|s| positive("tmax", s)).transpose()?;
        let n_samples = match raw.samples.as_deref() {
            Some(s) => s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 2)
                .ok_or_else(|| CliError::Config(format!("samples: expected an integer ≥ 2, got '{s}'")))?,
            None => zitter_core::dynamics::DEFAULT_SAMPLES,
        };
        let seed = match raw.seed.as_deref() {
            Some(s) => s.trim().parse::<u64>().map_err(|_| CliError::Config(format!("seed: '{s}' is not a u64")))?,
            None => DEFAULT_SEED,
        };
        let format = match (command, raw.format.as_deref()) {
            (Command::Fw, None) => Format::Json,
            (Command::Fw, Some(s)) if s.parse::<Format>()? == Format::Csv => {
                return Err(CliError::Config("the fw command writes JSON only".into()))
            }
            (_, Some(s)) => s.parse()?,
            (_, None) => Format::Csv,
        };
        let tolerance = raw.tolerance.as_deref().map(|s| positive("tolerance", s)).transpose()?;
        Ok(RunConfig {
            command,
            kind,
            mass,
            momentum: p,
            gfv_n,
            p0,
            sigma_p,
            composition,
            t_max,
            n_samples,
            seed,
            output_path: raw.out.map(PathBuf::from),
            format,
            tolerance,
            mode_configured: raw.kind.is_some() || raw.mass.is_some() || raw.momentum.is_some() || raw.gfv_n.is_some(),
        })
    }

    /// Config file (if any) overlaid with the flags.
    pub fn from_flags(flags: &Flags) -> Result<Self, CliError> {
        let base = match &flags.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        Self::from_partial(base.overlay(PartialConfig::from_flags(flags)))
    }
}
