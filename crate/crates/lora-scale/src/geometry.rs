//! Annulus construction for the SF allocation schemes, expected active-device
//! bookkeeping and Poisson sampling of interferer realizations.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::{RadioConfig, SnrThresholds, SpreadingFactor};
use crate::propagation::{draw_fading, mean_snr, ChannelGain};

/// SF allocation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Equal-interval-based: annuli of equal width R/K.
    Eib,
    /// Equal-area-based: boundaries at R * sqrt(i/K).
    Eab,
    /// Path-loss-based: boundaries where the deterministic SNR drops below
    /// each SF threshold.
    Plb,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Eib => write!(f, "eib"),
            Scheme::Eab => write!(f, "eab"),
            Scheme::Plb => write!(f, "plb"),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eib" => Ok(Scheme::Eib),
            "eab" => Ok(Scheme::Eab),
            "plb" => Ok(Scheme::Plb),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}', expected eib, eab or plb"
            ))),
        }
    }
}

/// Cell plan: annulus boundaries and the SF assigned to each annulus.
/// Annuli are half-open intervals `[l_{i-1}, l_i)`; the lowest SF sits
/// innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SfPlan {
    boundaries: Vec<f64>,
    sfs: Vec<SpreadingFactor>,
    scheme: Scheme,
}

impl SfPlan {
    fn build(boundaries: Vec<f64>, sfs: Vec<SpreadingFactor>, scheme: Scheme) -> Result<Self> {
        if sfs.is_empty() || boundaries.len() != sfs.len() + 1 {
            return Err(Error::Planning("boundary/SF count mismatch".into()));
        }
        if boundaries[0] != 0.0 {
            return Err(Error::Planning("innermost boundary must be 0".into()));
        }
        for w in boundaries.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Planning(format!(
                    "boundaries must be strictly increasing, got {boundaries:?}"
                )));
            }
        }
        Ok(SfPlan {
            boundaries,
            sfs,
            scheme,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn radius(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn annulus_count(&self) -> usize {
        self.sfs.len()
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Inner and outer radius of annulus `i` (0-based).
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    pub fn area(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds(i);
        std::f64::consts::PI * (hi * hi - lo * lo)
    }

    pub fn sf(&self, i: usize) -> SpreadingFactor {
        self.sfs[i]
    }

    /// The unique annulus containing distance `d` under the half-open
    /// convention; distances at or beyond the cell edge are an error.
    pub fn annulus_of(&self, d: f64) -> Result<usize> {
        if d.is_nan() || d < 0.0 {
            return Err(Error::NegativeDistance(d));
        }
        if d >= self.radius() {
            return Err(Error::OutOfCell {
                distance: d,
                radius: self.radius(),
            });
        }
        // partition_point: first boundary > d, minus one
        let idx = self.boundaries.partition_point(|&b| b <= d);
        Ok(idx - 1)
    }
}

/// Equal-width annuli: `r_i = R/K`, lowest SF innermost.
pub fn plan_eib(radius_m: f64, sfs: &[SpreadingFactor]) -> Result<SfPlan> {
    if !(radius_m > 0.0) {
        return Err(Error::Planning(format!("radius must be positive, got {radius_m}")));
    }
    let k = sfs.len();
    let boundaries = (0..=k).map(|i| radius_m * i as f64 / k as f64).collect();
    SfPlan::build(boundaries, sfs.to_vec(), Scheme::Eib)
}

/// Equal-area annuli: `l_i = R * sqrt(i/K)`.
pub fn plan_eab(radius_m: f64, sfs: &[SpreadingFactor]) -> Result<SfPlan> {
    if !(radius_m > 0.0) {
        return Err(Error::Planning(format!("radius must be positive, got {radius_m}")));
    }
    let k = sfs.len();
    let boundaries = (0..=k)
        .map(|i| radius_m * (i as f64 / k as f64).sqrt())
        .collect();
    SfPlan::build(boundaries, sfs.to_vec(), Scheme::Eab)
}

/// Path-loss-based annuli: `l_i` is the largest distance at which the
/// deterministic mean SNR still meets the threshold of the annulus' SF,
/// solved in closed form `d = (p_t kappa / (sigma^2 theta))^(1/eta)`.
/// The cell radius is the outermost boundary.
pub fn plan_plb(
    cfg: &RadioConfig,
    thresholds: &SnrThresholds,
    sfs: &[SpreadingFactor],
) -> Result<SfPlan> {
    if sfs.is_empty() {
        return Err(Error::Planning("no spreading factors given".into()));
    }
    let snr_at_plateau = mean_snr(cfg.critical_distance_m, cfg)?.value();
    let budget = cfg.tx_power_mw() * cfg.kappa()
        / crate::propagation::noise_power(cfg).value();
    let mut boundaries = vec![0.0];
    for &sf in sfs {
        let theta = thresholds.threshold(sf).value();
        if snr_at_plateau < theta {
            return Err(Error::Planning(format!(
                "SNR threshold for {sf} is unreachable even at the critical distance"
            )));
        }
        let d = (budget / theta).powf(1.0 / cfg.path_loss_exponent);
        boundaries.push(d);
    }
    SfPlan::build(boundaries, sfs.to_vec(), Scheme::Plb)
}

/// Device intensity and per-annulus expected active interferer counts
/// `v_i = alpha * lambda * a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    lambda: f64,
    n_bar: f64,
    thinned_intensity: f64,
    active_per_annulus: Vec<f64>,
}

impl Deployment {
    /// Deployment with mean device count `n_bar` over the plan's disk,
    /// thinned by duty cycle `alpha`.
    pub fn new(n_bar: f64, plan: &SfPlan, alpha: f64) -> Result<Self> {
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mean device count must be non-negative, got {n_bar}"
            )));
        }
        let r = plan.radius();
        let lambda = n_bar / (std::f64::consts::PI * r * r);
        let thinned = alpha * lambda;
        let active = (0..plan.annulus_count())
            .map(|i| thinned * plan.area(i))
            .collect();
        Ok(Deployment {
            lambda,
            n_bar,
            thinned_intensity: thinned,
            active_per_annulus: active,
        })
    }

    pub fn intensity(&self) -> f64 {
        self.lambda
    }

    pub fn mean_devices(&self) -> f64 {
        self.n_bar
    }

    /// Active-transmitter intensity `alpha * lambda`.
    pub fn thinned_intensity(&self) -> f64 {
        self.thinned_intensity
    }

    /// Expected concurrently active interferers in annulus `i`.
    pub fn expected_active(&self, i: usize) -> f64 {
        self.active_per_annulus[i]
    }
}

/// One active interferer in a realization of the thinned PPP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveDevice {
    pub distance_m: f64,
    pub annulus: usize,
    pub gain: ChannelGain,
}

/// One realization of the active-transmitter point process.
pub type ActiveDeviceSet = Vec<ActiveDevice>;

/// Sample one realization: per annulus a Poisson(v_i) count, area-uniform
/// distances via inverse CDF `sqrt(lo^2 + U (hi^2 - lo^2))`, independent
/// unit-mean exponential gains.
pub fn sample_active<R: Rng + ?Sized>(
    plan: &SfPlan,
    dep: &Deployment,
    rng: &mut R,
) -> ActiveDeviceSet {
    let mut devices = Vec::new();
    for i in 0..plan.annulus_count() {
        let v = dep.expected_active(i);
        if v == 0.0 {
            continue;
        }
        let count = Poisson::new(v).expect("v_i > 0").sample(rng) as usize;
        let (lo, hi) = plan.bounds(i);
        let (lo2, hi2) = (lo * lo, hi * hi);
        for _ in 0..count {
            let u = rng.random::<f64>();
            devices.push(ActiveDevice {
                distance_m: (lo2 + u * (hi2 - lo2)).sqrt(),
                annulus: i,
                gain: draw_fading(rng),
            });
        }
    }
    devices
}
