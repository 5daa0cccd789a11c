//! Run configuration: a sectioned key=value file with strict key checking,
//! defaulting to the EU868 h1.4 channel, EIB allocation, 1500 devices in a
//! 6 km cell.

use std::path::Path;

use crate::analytic::Scenario;
use crate::coverage::plan_for_scheme;
use crate::error::{Error, Result};
use crate::geometry::Scheme;
use crate::model::{RadioConfig, SirMatrix, SnrThresholds, DEFAULT_SIR_MATRIX_DB};
use crate::montecarlo::CaptureMode;

/// Everything a CLI run needs. All invariants are re-validated on load.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub radio: RadioConfig,
    pub scheme: Scheme,
    /// Cell radius in meters; ignored for the PLB scheme, which derives its
    /// own radius from the SNR thresholds.
    pub radius_m: f64,
    pub n_bar: f64,
    pub snr_thresholds_db: [f64; 6],
    pub sir_matrix_db: [[f64; 6]; 6],
    pub success_points: usize,
    pub coverage_devices: Vec<f64>,
    pub contour_radii_m: Vec<f64>,
    pub contour_devices: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub validation_points: usize,
    pub capture_mode: CaptureMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            radio: RadioConfig::lorawan_eu868(),
            scheme: Scheme::Eib,
            radius_m: 6000.0,
            n_bar: 1500.0,
            snr_thresholds_db: crate::model::DEFAULT_SNR_THRESHOLDS_DB,
            sir_matrix_db: DEFAULT_SIR_MATRIX_DB,
            success_points: 200,
            coverage_devices: (1..=30).map(|k| k as f64 * 100.0).collect(),
            contour_radii_m: (1..=15).map(|k| k as f64 * 1000.0).collect(),
            contour_devices: (0..20)
                .map(|k| 100.0 + k as f64 * (4000.0 - 100.0) / 19.0)
                .collect(),
            trials: 100_000,
            seed: 1,
            validation_points: 30,
            capture_mode: CaptureMode::SumForm,
        }
    }
}

impl RunConfig {
    /// Re-check every embedded invariant.
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        SnrThresholds::new(self.snr_thresholds_db)?;
        SirMatrix::new(self.sir_matrix_db)?;
        if !(self.radius_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "radius must be positive, got {}",
                self.radius_m
            )));
        }
        if !(self.n_bar >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mean device count must be non-negative, got {}",
                self.n_bar
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.success_points < 6 || self.validation_points < 6 {
            return Err(Error::InvalidConfig(
                "grids need at least one point per annulus".into(),
            ));
        }
        Ok(())
    }

    /// Build the analytic scenario described by this configuration.
    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let snr = SnrThresholds::new(self.snr_thresholds_db)?;
        let sir = SirMatrix::new(self.sir_matrix_db)?;
        let plan = plan_for_scheme(self.scheme, self.radius_m, &self.radio, &snr)?;
        Scenario::new(self.radio.clone(), plan, self.n_bar, snr, sir)
    }
}

/// Load a config file; an empty file yields the full defaults.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::ConfigParse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("{key}: expected a number, got '{value}'")))
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| parse_err(line, format!("{key}: expected an integer, got '{value}'")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("{key}: expected an integer, got '{value}'")))
}

/// Comma list `a,b,c` or range `start:stop:step` (inclusive of stop when it
/// lands on the grid).
fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(parse_err(line, format!("{key}: range must be start:stop:step")));
        }
        let start = parse_f64(line, key, parts[0].trim())?;
        let stop = parse_f64(line, key, parts[1].trim())?;
        let step = parse_f64(line, key, parts[2].trim())?;
        if !(step > 0.0) || stop < start {
            return Err(parse_err(line, format!("{key}: bad range bounds")));
        }
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = start + k as f64 * step;
            if v > stop + 1e-9 * step {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        value
            .split(',')
            .map(|s| parse_f64(line, key, s.trim()))
            .collect()
    }
}

fn parse_array6(line: usize, key: &str, value: &str) -> Result<[f64; 6]> {
    let list = parse_list(line, key, value)?;
    list.try_into()
        .map_err(|_| parse_err(line, format!("{key}: expected exactly 6 values")))
}

/// Parse config text. Sections `[radio]`, `[deployment]`, `[grid]`, `[sim]`;
/// `#` and `;` start comments; unknown sections or keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find(['#', ';']) {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            match name.as_str() {
                "radio" | "deployment" | "grid" | "sim" => section = name,
                other => return Err(parse_err(line_no, format!("unknown section [{other}]"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key=value, got '{line}'")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if section.is_empty() {
            return Err(parse_err(line_no, format!("key '{key}' outside any section")));
        }
        apply_key(&mut cfg, &section, &key, value, line_no)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_key(
    cfg: &mut RunConfig,
    section: &str,
    key: &str,
    value: &str,
    line: usize,
) -> Result<()> {
    match (section, key) {
        ("radio", "transmit_power_dbm") => cfg.radio.tx_power_dbm = parse_f64(line, key, value)?,
        ("radio", "bandwidth_hz") => cfg.radio.bandwidth_hz = parse_f64(line, key, value)?,
        ("radio", "carrier_frequency_hz") => cfg.radio.carrier_hz = parse_f64(line, key, value)?,
        ("radio", "noise_density_dbm_per_hz") => {
            cfg.radio.noise_density_dbm = parse_f64(line, key, value)?
        }
        ("radio", "noise_figure_db") => cfg.radio.noise_figure_db = parse_f64(line, key, value)?,
        ("radio", "path_loss_exponent") => {
            cfg.radio.path_loss_exponent = parse_f64(line, key, value)?
        }
        ("radio", "critical_distance_m") => {
            cfg.radio.critical_distance_m = parse_f64(line, key, value)?
        }
        ("radio", "duty_cycle") => cfg.radio.duty_cycle = parse_f64(line, key, value)?,
        ("radio", "snr_thresholds_db") => {
            cfg.snr_thresholds_db = parse_array6(line, key, value)?
        }
        ("radio", k) if k.starts_with("sir_row_sf") => {
            let sf: u8 = k["sir_row_sf".len()..]
                .parse()
                .map_err(|_| parse_err(line, format!("bad SIR row key '{k}'")))?;
            if !(7..=12).contains(&sf) {
                return Err(parse_err(line, format!("bad SIR row key '{k}'")));
            }
            cfg.sir_matrix_db[(sf - 7) as usize] = parse_array6(line, key, value)?;
        }
        ("deployment", "scheme") => cfg.scheme = value.parse()?,
        ("deployment", "radius_m") => cfg.radius_m = parse_f64(line, key, value)?,
        ("deployment", "mean_devices") => cfg.n_bar = parse_f64(line, key, value)?,
        ("grid", "success_points") => cfg.success_points = parse_usize(line, key, value)?,
        ("grid", "coverage_devices") => cfg.coverage_devices = parse_list(line, key, value)?,
        ("grid", "contour_radii_m") => cfg.contour_radii_m = parse_list(line, key, value)?,
        ("grid", "contour_devices") => cfg.contour_devices = parse_list(line, key, value)?,
        ("sim", "trials") => cfg.trials = parse_u64(line, key, value)?,
        ("sim", "seed") => cfg.seed = parse_u64(line, key, value)?,
        ("sim", "validation_points") => {
            cfg.validation_points = parse_usize(line, key, value)?
        }
        ("sim", "capture_mode") => cfg.capture_mode = value.parse()?,
        (s, k) => {
            return Err(parse_err(line, format!("unknown key '{k}' in section [{s}]")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_yields_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.radio, RadioConfig::lorawan_eu868());
        assert_eq!(cfg.scheme, Scheme::Eib);
        assert_eq!(cfg.n_bar, 1500.0);
        assert_eq!(cfg.radius_m, 6000.0);
        assert_eq!(cfg.trials, 100_000);
    }

    #[test]
    fn full_roundtrip() {
        let text = "
# run setup
[radio]
transmit_power_dbm = 27
duty_cycle = 0.10
sir_row_sf7 = 1,-8,-9,-9,-9,-9

[deployment]
scheme = eab
radius_m = 12000
mean_devices = 2000

[grid]
coverage_devices = 100:1000:100
success_points = 50

[sim]
trials = 500
seed = 7
capture_mode = max
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.radio.tx_power_dbm, 27.0);
        assert_eq!(cfg.radio.duty_cycle, 0.10);
        assert_eq!(cfg.scheme, Scheme::Eab);
        assert_eq!(cfg.radius_m, 12000.0);
        assert_eq!(cfg.coverage_devices.len(), 10);
        assert_eq!(cfg.trials, 500);
        assert_eq!(cfg.capture_mode, CaptureMode::MaxForm);
        cfg.scenario().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let err = parse_config("[radio]\nbogus_key = 3\n").unwrap_err();
        match err {
            Error::ConfigParse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus_key"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_config("[nosuch]\n").is_err());
        assert!(parse_config("stray = 1\n").is_err());
    }

    #[test]
    fn rejects_invalid_values() {
        let err = parse_config("[radio]\nduty_cycle = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("duty cycle"));
        assert!(parse_config("[radio]\npath_loss_exponent = 2.0\n").is_err());
        assert!(parse_config("[radio]\nsnr_thresholds_db = -6,-9\n").is_err());
        assert!(parse_config("[radio]\nsir_row_sf13 = 1,1,1,1,1,1\n").is_err());
        assert!(parse_config("[sim]\ntrials = 0\n").is_err());
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "[deployment]\nmean_devices = 42\n").unwrap();
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.n_bar, 42.0);
        assert!(load_config(&dir.path().join("missing.conf")).is_err());
    }
}
