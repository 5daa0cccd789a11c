//! Unit types, dB/linear conversions, radio configuration, SNR thresholds
//! and the SIR isolation matrix.
//!
//! All internal math runs in linear units (mW, unitless ratios, meters);
//! dB values appear only at configuration boundaries and are linearized
//! once at load time.

use crate::error::{Error, Result};

/// Speed of light in m/s, used to derive the carrier wavelength.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A power or gain ratio expressed in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decibel(pub f64);

/// An absolute power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecibelMilliwatt(pub f64);

/// A non-negative unitless linear ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinearRatio(f64);

/// A non-negative power in milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MilliwattPower(f64);

impl LinearRatio {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NonFinite("linear ratio"));
        }
        Ok(LinearRatio(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_db(self) -> Decibel {
        Decibel(10.0 * self.0.log10())
    }
}

impl MilliwattPower {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NonFinite("milliwatt power"));
        }
        Ok(MilliwattPower(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_dbm(self) -> DecibelMilliwatt {
        DecibelMilliwatt(10.0 * self.0.log10())
    }
}

/// Convert a dB ratio to a linear ratio: `10^(x/10)`.
pub fn db_to_linear(x: Decibel) -> Result<LinearRatio> {
    if !x.0.is_finite() {
        return Err(Error::NonFinite("decibel input"));
    }
    LinearRatio::new(10f64.powf(x.0 / 10.0))
}

/// Convert a dBm power to milliwatts: `10^(x/10)` mW.
pub fn dbm_to_mw(x: DecibelMilliwatt) -> Result<MilliwattPower> {
    if !x.0.is_finite() {
        return Err(Error::NonFinite("dBm input"));
    }
    MilliwattPower::new(10f64.powf(x.0 / 10.0))
}

/// LoRa spreading factor, SF7 through SF12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpreadingFactor {
    Sf7,
    Sf8,
    Sf9,
    Sf10,
    Sf11,
    Sf12,
}

impl SpreadingFactor {
    pub const ALL: [SpreadingFactor; 6] = [
        SpreadingFactor::Sf7,
        SpreadingFactor::Sf8,
        SpreadingFactor::Sf9,
        SpreadingFactor::Sf10,
        SpreadingFactor::Sf11,
        SpreadingFactor::Sf12,
    ];

    /// Zero-based index, SF7 -> 0 .. SF12 -> 5.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_u8(self) -> u8 {
        7 + self as u8
    }

    pub fn from_u8(sf: u8) -> Result<Self> {
        match sf {
            7..=12 => Ok(Self::ALL[(sf - 7) as usize]),
            _ => Err(Error::InvalidConfig(format!(
                "spreading factor must be in 7..=12, got {sf}"
            ))),
        }
    }
}

impl std::fmt::Display for SpreadingFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SF{}", self.as_u8())
    }
}

/// Per-SF SNR demodulation thresholds, stored in dB and linearized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrThresholds {
    theta_db: [f64; 6],
    theta_lin: [f64; 6],
}

/// SX127x datasheet thresholds for SF7..SF12, in dB.
pub const DEFAULT_SNR_THRESHOLDS_DB: [f64; 6] = [-6.0, -9.0, -12.0, -15.0, -17.5, -20.0];

impl SnrThresholds {
    pub fn new(theta_db: [f64; 6]) -> Result<Self> {
        for pair in theta_db.windows(2) {
            if !(pair[0] > pair[1]) {
                return Err(Error::InvalidConfig(format!(
                    "SNR thresholds must be strictly decreasing in SF, got {theta_db:?}"
                )));
            }
        }
        let mut theta_lin = [0.0; 6];
        for (lin, db) in theta_lin.iter_mut().zip(theta_db) {
            if !db.is_finite() {
                return Err(Error::NonFinite("SNR threshold"));
            }
            *lin = 10f64.powf(db / 10.0);
        }
        Ok(SnrThresholds { theta_db, theta_lin })
    }

    pub fn threshold_db(&self, sf: SpreadingFactor) -> f64 {
        self.theta_db[sf.index()]
    }

    /// Linearized threshold for a given SF.
    pub fn threshold(&self, sf: SpreadingFactor) -> LinearRatio {
        LinearRatio(self.theta_lin[sf.index()])
    }
}

impl Default for SnrThresholds {
    fn default() -> Self {
        SnrThresholds::new(DEFAULT_SNR_THRESHOLDS_DB).expect("default thresholds are valid")
    }
}

/// Empirical SIR isolation matrix in dB: row = desired SF, column = interfering SF.
pub const DEFAULT_SIR_MATRIX_DB: [[f64; 6]; 6] = [
    [1.0, -8.0, -9.0, -9.0, -9.0, -9.0],
    [-11.0, 1.0, -11.0, -12.0, -13.0, -13.0],
    [-15.0, -13.0, 1.0, -13.0, -14.0, -15.0],
    [-19.0, -18.0, -17.0, 1.0, -17.0, -18.0],
    [-22.0, -22.0, -21.0, -20.0, 1.0, -20.0],
    [-25.0, -25.0, -25.0, -24.0, -23.0, 1.0],
];

/// 6x6 matrix of SIR capture thresholds delta_ij. A packet at SF_i needs an
/// SIR of at least delta_ij against a collider at SF_j to be decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct SirMatrix {
    delta_db: [[f64; 6]; 6],
    delta_lin: [[f64; 6]; 6],
}

impl SirMatrix {
    pub fn new(delta_db: [[f64; 6]; 6]) -> Result<Self> {
        let mut delta_lin = [[0.0; 6]; 6];
        for (i, row) in delta_db.iter().enumerate() {
            for (j, &db) in row.iter().enumerate() {
                if !db.is_finite() {
                    return Err(Error::NonFinite("SIR matrix entry"));
                }
                if i != j && db >= 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "off-diagonal SIR threshold delta[{i}][{j}] = {db} dB must be negative"
                    )));
                }
                delta_lin[i][j] = 10f64.powf(db / 10.0);
            }
        }
        Ok(SirMatrix { delta_db, delta_lin })
    }

    pub fn threshold_db(&self, desired: SpreadingFactor, interfering: SpreadingFactor) -> f64 {
        self.delta_db[desired.index()][interfering.index()]
    }

    /// Linearized capture threshold delta_ij.
    pub fn threshold(&self, desired: SpreadingFactor, interfering: SpreadingFactor) -> LinearRatio {
        LinearRatio(self.delta_lin[desired.index()][interfering.index()])
    }

    /// Linearized threshold by annulus-style indices (0-based SF offsets).
    pub fn threshold_lin(&self, desired: usize, interfering: usize) -> f64 {
        self.delta_lin[desired][interfering]
    }
}

impl Default for SirMatrix {
    fn default() -> Self {
        SirMatrix::new(DEFAULT_SIR_MATRIX_DB).expect("default SIR matrix is valid")
    }
}

/// Radio and regulatory parameters of the studied LoRa channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioConfig {
    /// Transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Channel bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Noise power density in dBm/Hz.
    pub noise_density_dbm: f64,
    /// Receiver noise figure in dB.
    pub noise_figure_db: f64,
    /// Path-loss exponent; must exceed 2.
    pub path_loss_exponent: f64,
    /// Critical distance in meters below which path loss saturates.
    /// Zero is accepted as a test mode for scale-invariance checks.
    pub critical_distance_m: f64,
    /// Duty cycle as a fraction in (0, 1].
    pub duty_cycle: f64,
}

impl RadioConfig {
    /// EU 868 MHz h1.4 channel parameters: 14 dBm, 125 kHz, 868.1 MHz,
    /// -174 dBm/Hz noise density, 6 dB noise figure, eta = 3, 0.33% duty cycle.
    pub fn lorawan_eu868() -> Self {
        RadioConfig {
            tx_power_dbm: 14.0,
            bandwidth_hz: 125_000.0,
            carrier_hz: 868.1e6,
            noise_density_dbm: -174.0,
            noise_figure_db: 6.0,
            path_loss_exponent: 3.0,
            critical_distance_m: 1.0,
            duty_cycle: 0.0033,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("transmit power", self.tx_power_dbm),
            ("bandwidth", self.bandwidth_hz),
            ("carrier frequency", self.carrier_hz),
            ("noise density", self.noise_density_dbm),
            ("noise figure", self.noise_figure_db),
            ("path-loss exponent", self.path_loss_exponent),
            ("critical distance", self.critical_distance_m),
            ("duty cycle", self.duty_cycle),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if self.path_loss_exponent <= 2.0 {
            return Err(Error::InvalidConfig(format!(
                "path-loss exponent must be > 2, got {}",
                self.path_loss_exponent
            )));
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "duty cycle must be in (0,1], got {}",
                self.duty_cycle
            )));
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        if self.carrier_hz <= 0.0 {
            return Err(Error::InvalidConfig(
                "carrier frequency must be positive".into(),
            ));
        }
        if self.critical_distance_m < 0.0 {
            return Err(Error::InvalidConfig(
                "critical distance must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Path-loss prefactor kappa = (lambda_c / 4 pi)^2.
    pub fn kappa(&self) -> f64 {
        let wavelength = SPEED_OF_LIGHT / self.carrier_hz;
        (wavelength / (4.0 * std::f64::consts::PI)).powi(2)
    }

    /// Transmit power in mW.
    pub fn tx_power_mw(&self) -> f64 {
        10f64.powf(self.tx_power_dbm / 10.0)
    }
}
