//! Plain-text run configuration.
//!
//! The file format is a flat list of `key = value` lines grouped under
//! `[section]` headers. Blank lines and lines starting with `#` or `;` are
//! ignored. A key that appears before any header must be written in its
//! qualified `section.key` form. Keys outside [`KEYS`] are rejected, as are
//! repeated keys. Command-line flags are applied on top of the file.
//!
//! ```text
//! [physics]
//! frequency_hz = 28e9
//! model = nusw
//!
//! [array]
//! n = 40, 120, 500
//! spacing_wl = 0.5
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nfkit::dipole::Excitation;
use nfkit::{ArrayKind, ChannelModel};

use crate::error::{CliError, CliResult};

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("physics.frequency_hz", "carrier frequency in Hz; a comma list for coverage"),
    ("physics.model", "channel model: usw, nusw or gnc; a comma list for focus-profile"),
    ("array.kind", "ula or upa"),
    ("array.n", "element count per side, comma list"),
    ("array.n2", "second UPA dimension (defaults to n)"),
    ("array.spacing_wl", "element spacing in wavelengths"),
    ("array.offset_z_m", "shift of the array center along z, meters"),
    ("output.format", "csv or json"),
    ("output.path", "output file (stdout when absent)"),
    ("output.summary", "JSON summary file for focus-profile in CSV mode"),
    ("sweep.range", "START:STOP:COUNT of the command's swept variable"),
    ("focus.target_m", "MRT target radius in meters; a comma list superposes targets"),
    ("focus.theta_deg", "polar angle of the radial cut, degrees"),
    ("focus.phi_deg", "azimuth of the radial cut, degrees"),
    ("focus.epsilon", "outward step of the focusing search"),
    ("focus.tolerance_m", "accepted distance between achieved and desired focus"),
    ("kappa.point_m", "observation radius for the kappa ratio"),
    ("coverage.aperture_m", "WxH aperture sizes in meters, comma list"),
    ("nonrad.ds_wl", "dipole lengths in wavelengths, comma list"),
    ("nonrad.pattern", "in_phase and/or alternating, comma list"),
    ("nonrad.rel_tol", "relative quadrature tolerance"),
];

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Raw `section.key -> value` pairs before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", lineno + 1));
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| at(format!("malformed section header `{line}`")))?;
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let key = key.trim();
            let full = match &section {
                Some(s) => format!("{s}.{key}"),
                None => key.to_string(),
            };
            if !is_known(&full) {
                return Err(at(format!("unknown key `{full}`")));
            }
            if raw.values.insert(full.clone(), value.trim().to_string()).is_some() {
                return Err(at(format!("duplicate key `{full}`")));
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets `key`, replacing any value from the file.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !is_known(key) {
            return Err(CliError::config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `START:STOP:COUNT`, expanded to evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn parse(s: &str) -> CliResult<Self> {
        let bad = || CliError::config(format!("sweep must be START:STOP:COUNT, got `{s}`"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else { return Err(bad()) };
        let start: f64 = a.parse().map_err(|_| bad())?;
        let stop: f64 = b.parse().map_err(|_| bad())?;
        let count: usize = n.parse().map_err(|_| bad())?;
        if !(start.is_finite() && stop.is_finite()) || count == 0 {
            return Err(bad());
        }
        Ok(Self { start, stop, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

/// Model selection as written in the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    Usw,
    Nusw,
    Gnc,
}

impl ModelName {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "usw" => Ok(Self::Usw),
            "nusw" => Ok(Self::Nusw),
            "gnc" => Ok(Self::Gnc),
            other => Err(CliError::config(format!("unknown model `{other}`; expected usw, nusw or gnc"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Usw => "usw",
            Self::Nusw => "nusw",
            Self::Gnc => "gnc",
        }
    }

    pub fn channel(&self) -> ChannelModel {
        match self {
            Self::Usw => ChannelModel::Usw,
            Self::Nusw => ChannelModel::Nusw,
            Self::Gnc => ChannelModel::gnc_isotropic(),
        }
    }
}

/// Command-dependent defaults, filled in before the raw values are typed.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub frequencies: &'static str,
    pub n: &'static str,
    pub models: &'static str,
    pub sweep: Option<&'static str>,
    pub targets: &'static str,
}

impl Default for Defaults {
    fn default() -> Self {
        Self { frequencies: "28e9", n: "40", models: "nusw", sweep: None, targets: "6" }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub frequencies_hz: Vec<f64>,
    pub kind: ArrayKind,
    pub n: Vec<usize>,
    pub n2: Option<usize>,
    pub spacing_wl: f64,
    pub offset_z_m: f64,
    pub models: Vec<ModelName>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub sweep: Option<Sweep>,
    pub targets_m: Vec<f64>,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub epsilon: f64,
    pub tolerance_m: f64,
    pub kappa_point_m: f64,
    pub apertures_m: Vec<(f64, f64)>,
    pub ds_wl: Vec<f64>,
    pub patterns: Vec<Excitation>,
    pub rel_tol: f64,
}

fn list<T>(key: &str, s: &str, parse: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let items = s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse).collect::<CliResult<Vec<T>>>()?;
    if items.is_empty() {
        return Err(CliError::config(format!("`{key}` must not be empty")));
    }
    Ok(items)
}

fn real(key: &str, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::config(format!("`{key}` expects a finite number, got `{s}`")))
}

fn positive(key: &str, s: &str) -> CliResult<f64> {
    let v = real(key, s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("`{key}` must be positive, got {v}")))
    }
}

fn count(key: &str, s: &str) -> CliResult<usize> {
    s.trim()
        .parse::<usize>()
        .ok()
        .filter(|&v| v >= 1)
        .ok_or_else(|| CliError::config(format!("`{key}` expects an integer >= 1, got `{s}`")))
}

fn aperture(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::config(format!("aperture must be WxH in meters, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w = positive("coverage.aperture_m", w).map_err(|_| bad())?;
    let h = positive("coverage.aperture_m", h).map_err(|_| bad())?;
    Ok((w, h))
}

fn pattern(s: &str) -> CliResult<Excitation> {
    match s.trim().to_ascii_lowercase().as_str() {
        "in_phase" | "inphase" => Ok(Excitation::InPhase),
        "alternating" => Ok(Excitation::Alternating),
        other => Err(CliError::config(format!("unknown phase pattern `{other}`; expected in_phase or alternating"))),
    }
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig, defaults: &Defaults) -> CliResult<Self> {
        let get = |key: &str, fallback: &'static str| raw.get(key).unwrap_or(fallback);

        let frequencies_hz =
            list("physics.frequency_hz", get("physics.frequency_hz", defaults.frequencies), |s| {
                positive("physics.frequency_hz", s)
            })?;
        let kind = match get("array.kind", "ula").to_ascii_lowercase().as_str() {
            "ula" => ArrayKind::Ula,
            "upa" => ArrayKind::Upa,
            other => return Err(CliError::config(format!("unknown array kind `{other}`; expected ula or upa"))),
        };
        let n = list("array.n", get("array.n", defaults.n), |s| count("array.n", s))?;
        let n2 = raw.get("array.n2").map(|s| count("array.n2", s)).transpose()?;
        if n2.is_some() && kind == ArrayKind::Ula {
            return Err(CliError::config("`array.n2` only applies to a upa"));
        }
        let models = list("physics.model", get("physics.model", defaults.models), ModelName::parse)?;
        let format = match get("output.format", "csv").to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::config(format!("unknown format `{other}`; expected csv or json"))),
        };
        let sweep = raw.get("sweep.range").or(defaults.sweep).map(Sweep::parse).transpose()?;
        let targets_m =
            list("focus.target_m", get("focus.target_m", defaults.targets), |s| positive("focus.target_m", s))?;

        Ok(Self {
            frequencies_hz,
            kind,
            n,
            n2,
            spacing_wl: positive("array.spacing_wl", get("array.spacing_wl", "0.5"))?,
            offset_z_m: real("array.offset_z_m", get("array.offset_z_m", "0"))?,
            models,
            format,
            out: raw.get("output.path").map(PathBuf::from),
            summary: raw.get("output.summary").map(PathBuf::from),
            sweep,
            targets_m,
            theta_deg: real("focus.theta_deg", get("focus.theta_deg", "90"))?,
            phi_deg: real("focus.phi_deg", get("focus.phi_deg", "90"))?,
            epsilon: positive("focus.epsilon", get("focus.epsilon", "0.02"))?,
            tolerance_m: positive("focus.tolerance_m", get("focus.tolerance_m", "0.01"))?,
            kappa_point_m: positive("kappa.point_m", get("kappa.point_m", "4"))?,
            apertures_m: list("coverage.aperture_m", get("coverage.aperture_m", "0.7x0.7"), aperture)?,
            ds_wl: list("nonrad.ds_wl", get("nonrad.ds_wl", "0.01,0.1,0.25,0.4,0.48"), |s| {
                positive("nonrad.ds_wl", s)
            })?,
            patterns: list("nonrad.pattern", get("nonrad.pattern", "in_phase,alternating"), pattern)?,
            rel_tol: positive("nonrad.rel_tol", get("nonrad.rel_tol", "1e-9"))?,
        })
    }

    /// The only frequency, for commands that do not sweep over frequency.
    pub fn single_frequency(&self) -> CliResult<f64> {
        match self.frequencies_hz[..] {
            [f] => Ok(f),
            _ => Err(CliError::config("this command takes a single frequency")),
        }
    }

    pub fn single_model(&self) -> CliResult<ModelName> {
        match self.models[..] {
            [m] => Ok(m),
            _ => Err(CliError::config("this command takes a single model")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_qualify_keys() {
        let raw = RawConfig::parse("# comment\n[array]\nn = 5, 40\n\n[physics]\n model = usw \n").unwrap();
        assert_eq!(raw.get("array.n"), Some("5, 40"));
        assert_eq!(raw.get("physics.model"), Some("usw"));
    }

    #[test]
    fn qualified_keys_allowed_before_any_header() {
        let raw = RawConfig::parse("output.format = json\n").unwrap();
        assert_eq!(raw.get("output.format"), Some("json"));
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        assert!(RawConfig::parse("[array]\nsize = 3\n").is_err());
        assert!(RawConfig::parse("n = 3\n").is_err());
        assert!(RawConfig::parse("[array]\nn = 3\nn = 4\n").is_err());
        assert!(RawConfig::parse("[array\nn = 3\n").is_err());
        assert!(RawConfig::parse("[array]\njust text\n").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut raw = RawConfig::parse("[array]\nn = 3\n").unwrap();
        raw.set("array.n", "7").unwrap();
        let cfg = RunConfig::resolve(&raw, &Defaults::default()).unwrap();
        assert_eq!(cfg.n, vec![7]);
        assert!(raw.set("array.width", "1").is_err());
    }

    #[test]
    fn sweep_hits_endpoints_exactly() {
        let s = Sweep::parse("0:180:361").unwrap();
        let v = s.values();
        assert_eq!(v.len(), 361);
        assert_eq!(v[180], 90.0);
        assert_eq!(v[360], 180.0);
        assert_eq!(Sweep::parse("2:9:1").unwrap().values(), vec![2.0]);
        for bad in ["1:2", "1:2:0", "a:2:3", "1:2:3:4", "1:inf:3"] {
            assert!(Sweep::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn typed_values_are_validated() {
        let with = |k: &str, v: &str| {
            let mut raw = RawConfig::default();
            raw.set(k, v).unwrap();
            RunConfig::resolve(&raw, &Defaults::default())
        };
        assert!(with("array.n", "0").is_err());
        assert!(with("physics.frequency_hz", "-1").is_err());
        assert!(with("physics.model", "plane").is_err());
        assert!(with("output.format", "xml").is_err());
        assert!(with("array.n2", "4").is_err());
        assert!(with("coverage.aperture_m", "0.7").is_err());
        assert!(with("nonrad.pattern", "random").is_err());
        let cfg = with("coverage.aperture_m", "0.7x0.7, 0.07X0.07").unwrap();
        assert_eq!(cfg.apertures_m, vec![(0.7, 0.7), (0.07, 0.07)]);
    }
}
