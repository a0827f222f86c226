//! Config-file model: a single structured text file with `[section]`
//! headers and `key = value` lines. Units are explicit in key names
//! (`pressure_mbar`, `radius_um`) and converted through the dimensioned
//! quantity layer at this boundary, so the interior of the library only
//! ever sees strict SI.
//!
//! ```text
//! # cryogenic baseline
//! [sphere]
//! radius_um = 1.0
//! density_kg_per_m3 = 8570.0
//!
//! [environment]
//! temperature_K = 0.1
//! pressure_mbar = 1e-16
//! ```
//!
//! Repeated keys are allowed and ordered (used by sweep `axis` lines).

use crate::decoherence::{Environment, AIR_MASS_AMU};
use crate::dynamics::{ci_gain, CiGain, DEFAULT_OMEGA_T_CAP};
use crate::error::{Error, Result};
use crate::protocol::{MappingStop, ProtocolPlan, SlitSpec, DEFAULT_TARGET_FRINGE};
use crate::quantities::{Quantity, Sphere};
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    sections: Vec<Section>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("line {}: unterminated section header", lineno + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(Error::Parse(format!("line {}: empty section name", lineno + 1)));
                }
                sections.push(Section { name: name.to_string(), entries: Vec::new() });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| Error::Parse(format!("line {}: key before any [section]", lineno + 1)))?;
            section.entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config '{}': {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.iter().any(|s| s.name == section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .filter(|s| s.name == section)
            .flat_map(|s| s.entries.iter())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// All values for a repeated key, in file order.
    pub fn get_all(&self, section: &str, key: &str) -> Vec<&str> {
        self.sections
            .iter()
            .filter(|s| s.name == section)
            .flat_map(|s| s.entries.iter())
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| Error::Parse(format!("missing required key [{section}] {key}")))
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        parse_f64(self.require(section, key)?, section, key)
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            Some(v) => parse_f64(v, section, key),
            None => Ok(default),
        }
    }

    pub fn opt_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key).map(|v| parse_f64(v, section, key)).transpose()
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("[{section}] {key}: '{v}' is not an unsigned integer"))),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Error::Parse(format!("[{section}] {key}: '{v}' is not true/false"))),
            None => Ok(default),
        }
    }

    /// Comma-separated list of floats.
    pub fn f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(section, key)?;
        let mut out = Vec::new();
        for piece in raw.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            out.push(parse_f64(piece, section, key)?);
        }
        if out.is_empty() {
            return Err(Error::Parse(format!("[{section}] {key}: empty list")));
        }
        Ok(out)
    }

    /// Set (or append) a value addressed as `section.key`; used by sweeps.
    pub fn set(&mut self, path: &str, value: &str) -> Result<()> {
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| Error::Parse(format!("axis path '{path}' is not of the form section.key")))?;
        for s in self.sections.iter_mut().filter(|s| s.name == section) {
            if let Some(entry) = s.entries.iter_mut().find(|(k, _)| k == key) {
                entry.1 = value.to_string();
                return Ok(());
            }
        }
        if let Some(s) = self.sections.iter_mut().find(|s| s.name == section) {
            s.entries.push((key.to_string(), value.to_string()));
            return Ok(());
        }
        self.sections.push(Section {
            name: section.to_string(),
            entries: vec![(key.to_string(), value.to_string())],
        });
        Ok(())
    }

    /// True when `section.key` resolves to an existing entry.
    pub fn has_path(&self, path: &str) -> bool {
        match path.split_once('.') {
            Some((section, key)) => self.get(section, key).is_some(),
            None => false,
        }
    }
}

fn parse_f64(v: &str, section: &str, key: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Parse(format!("[{section}] {key}: '{v}' is not a number")))
}

fn si(value: f64, unit: &str) -> Result<f64> {
    Ok(Quantity::from_unit(value, unit)?.value_si())
}

/// `[sphere] radius_um, density_kg_per_m3`.
pub fn sphere_from(cfg: &Config) -> Result<Sphere> {
    let radius = si(cfg.require_f64("sphere", "radius_um")?, "um")?;
    let density = cfg.require_f64("sphere", "density_kg_per_m3")?;
    Sphere::new(radius, density)
}

/// `[environment] temperature_K, pressure_mbar, gas_mass_amu, chi_real,
/// chi_imag, vibration_psd_m2_per_Hz`.
pub fn environment_from(cfg: &Config) -> Result<Environment> {
    let t = si(cfg.require_f64("environment", "temperature_K")?, "K")?;
    let p = si(cfg.require_f64("environment", "pressure_mbar")?, "mbar")?;
    let gas_mass = si(cfg.f64_or("environment", "gas_mass_amu", AIR_MASS_AMU)?, "amu")?;
    let chi_real = cfg.f64_or("environment", "chi_real", 1.0)?;
    let chi_imag = cfg.f64_or("environment", "chi_imag", 1.0)?;
    let psd = si(cfg.f64_or("environment", "vibration_psd_m2_per_Hz", 0.0)?, "m2_per_Hz")?;
    Environment::new(t, p, gas_mass, chi_real, chi_imag, psd)
}

/// `[trap] omega0_Hz` — angular frequency in rad/s (the ω[Hz] convention).
pub fn trap_omega_from(cfg: &Config) -> Result<f64> {
    let w = cfg.require_f64("trap", "omega0_Hz")?;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("omega0 must be positive, got {w:e}")));
    }
    Ok(w)
}

/// `[inflator] omega_i_Hz` — angular frequency in rad/s.
pub fn inflator_omega_from(cfg: &Config) -> Result<f64> {
    let w = cfg.require_f64("inflator", "omega_i_Hz")?;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("omega_i must be positive, got {w:e}")));
    }
    Ok(w)
}

/// Inflation gain from `[inflator] t_i_s` when present.
pub fn gain_from(cfg: &Config) -> Result<Option<CiGain>> {
    match cfg.opt_f64("inflator", "t_i_s")? {
        Some(t_i) if t_i > 0.0 => {
            Ok(Some(ci_gain(trap_omega_from(cfg)?, inflator_omega_from(cfg)?, t_i)?))
        }
        _ => Ok(None),
    }
}

/// `[slit] separation_um, width_um` (width defaults to d/10).
pub fn slit_from(cfg: &Config) -> Result<SlitSpec> {
    let d = si(cfg.require_f64("slit", "separation_um")?, "um")?;
    match cfg.opt_f64("slit", "width_um")? {
        Some(w) => Ok(SlitSpec::new(d, si(w, "um")?)),
        None => Ok(SlitSpec::with_default_width(d)),
    }
}

/// Full protocol plan from the `[sphere]`, `[trap]`, `[inflator]`, `[slit]`,
/// `[protocol]` and `[environment]` sections.
pub fn plan_from(cfg: &Config, cap_override: Option<f64>) -> Result<ProtocolPlan> {
    let mapping_stop = match cfg.opt_f64("protocol", "mapping_time_s")? {
        Some(t) => MappingStop::FixedDuration(t),
        None => {
            let target =
                si(cfg.f64_or("protocol", "target_fringe_nm", DEFAULT_TARGET_FRINGE / 1e-9)?, "nm")?;
            MappingStop::TargetFringe(target)
        }
    };
    Ok(ProtocolPlan {
        sphere: sphere_from(cfg)?,
        omega0: trap_omega_from(cfg)?,
        omega_i: inflator_omega_from(cfg)?,
        t_inflation: cfg.f64_or("inflator", "t_i_s", 0.0)?,
        free_time: cfg.require_f64("protocol", "free_time_s")?,
        slit: slit_from(cfg)?,
        t_rotation: cfg.opt_f64("protocol", "rotation_time_s")?,
        mapping_stop,
        drift_time: cfg.f64_or("protocol", "drift_time_s", 0.0)?,
        environment: environment_from(cfg)?,
        include_gravity: cfg.bool_or("protocol", "include_gravity", false)?,
        grid_points: cfg.usize_or("protocol", "grid_points", crate::interferometry::DEFAULT_GRID_POINTS)?,
        omega_t_cap: cap_override
            .map(Ok)
            .unwrap_or_else(|| cfg.f64_or("protocol", "omega_t_cap", DEFAULT_OMEGA_T_CAP))?,
    })
}

/// One sweep axis: `axis = section.key : scale : from : to : count`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub path: String,
    pub log: bool,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn parse(raw: &str) -> Result<Self> {
        let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "axis '{raw}' must be 'section.key : scale : from : to : count'"
            )));
        }
        let log = match parts[1] {
            "log" => true,
            "linear" => false,
            other => return Err(Error::Parse(format!("axis scale '{other}' must be log or linear"))),
        };
        let from = parse_f64(parts[2], "sweep", "axis.from")?;
        let to = parse_f64(parts[3], "sweep", "axis.to")?;
        let count = parts[4]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("axis count '{}' is not an unsigned integer", parts[4])))?;
        if count < 1 {
            return Err(Error::Parse("axis count must be >= 1".into()));
        }
        if log && (from <= 0.0 || to <= 0.0) {
            return Err(Error::Parse(format!("log axis '{raw}' needs positive endpoints")));
        }
        Ok(Self { path: parts[0].to_string(), log, from, to, count })
    }

    /// Grid value at index i.
    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.from;
        }
        let f = i as f64 / (self.count - 1) as f64;
        if self.log {
            (self.from.ln() + f * (self.to.ln() - self.from.ln())).exp()
        } else {
            self.from + f * (self.to - self.from)
        }
    }
}

/// Parse the `[sweep]` section: repeated `axis` keys plus the analysis to
/// run at each grid point.
pub fn sweep_axes_from(cfg: &Config) -> Result<Vec<SweepAxis>> {
    let raws = cfg.get_all("sweep", "axis");
    if raws.is_empty() {
        return Err(Error::Parse("[sweep] needs at least one axis".into()));
    }
    let mut axes = Vec::with_capacity(raws.len());
    for raw in raws {
        let axis = SweepAxis::parse(raw)?;
        if !cfg.has_path(&axis.path) && !axis.path.starts_with("environment.") {
            return Err(Error::Parse(format!(
                "axis path '{}' does not reference an existing config key",
                axis.path
            )));
        }
        axes.push(axis);
    }
    Ok(axes)
}
