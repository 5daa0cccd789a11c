//! Path-loss law, receiver noise power, mean SNR and Rayleigh fading draws.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{LinearRatio, MilliwattPower, RadioConfig};

/// Non-singular power-law path loss `l(d) = kappa * max(d, x_c)^(-eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub kappa: f64,
    pub eta: f64,
    pub critical_distance_m: f64,
}

impl PathLossModel {
    pub fn from_config(cfg: &RadioConfig) -> Self {
        PathLossModel {
            kappa: cfg.kappa(),
            eta: cfg.path_loss_exponent,
            critical_distance_m: cfg.critical_distance_m,
        }
    }

    /// Raw attenuation as f64; infinite at d = 0 when x_c = 0.
    #[inline]
    pub fn attenuation(&self, d: f64) -> f64 {
        self.kappa * d.max(self.critical_distance_m).powf(-self.eta)
    }
}

/// One realization of a unit-mean exponential channel power gain.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelGain(pub f64);

/// Path loss at distance `d` meters.
pub fn path_loss(d: f64, model: &PathLossModel) -> Result<LinearRatio> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::NegativeDistance(d));
    }
    LinearRatio::new(model.attenuation(d))
}

/// Receiver noise power sigma^2 = N0 + NF + 10 log10(B) [dBm], returned in mW.
pub fn noise_power(cfg: &RadioConfig) -> MilliwattPower {
    let dbm = cfg.noise_density_dbm + cfg.noise_figure_db + 10.0 * cfg.bandwidth_hz.log10();
    MilliwattPower::new(10f64.powf(dbm / 10.0)).expect("noise power is positive")
}

/// Mean SNR at distance `d`, i.e. `p_t * l(d) / sigma^2` with the fading gain
/// at its unit mean.
pub fn mean_snr(d: f64, cfg: &RadioConfig) -> Result<LinearRatio> {
    let model = PathLossModel::from_config(cfg);
    let l = path_loss(d, &model)?;
    LinearRatio::new(cfg.tx_power_mw() * l.value() / noise_power(cfg).value())
}

/// Draw a unit-mean exponential power gain by inverse transform: -ln(U) with
/// U uniform on (0, 1].
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R) -> ChannelGain {
    // random::<f64>() is uniform on [0,1); 1-U is uniform on (0,1]
    let u = 1.0 - rng.random::<f64>();
    ChannelGain(-u.ln())
}
