//! Stochastic validation of the analytic formulas: reproducible, parallel
//! Monte Carlo estimation of every success metric.
//!
//! Each realization draws from its own counter-derived ChaCha stream, so
//! results are a pure function of (inputs, seed, trials) and identical for
//! serial and parallel execution. All four success conditions share the same
//! fading and interferer draws per realization, which keeps the empirical
//! bound chain exact and reduces comparison variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::Scenario;
use crate::error::{Error, Result};
use crate::geometry::sample_active;
use crate::propagation::draw_fading;

/// How the joint co+inter-SF capture condition is evaluated per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaptureMode {
    /// Desired power must exceed the threshold-weighted sum over annuli:
    /// `H l(x1) >= sum_j delta_ij I_j`. This is what the product of Laplace
    /// transforms computes.
    SumForm,
    /// Per-annulus test: `H l(x1) >= delta_ij I_j` for every j.
    MaxForm,
}

impl std::str::FromStr for CaptureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" | "sum-form" => Ok(CaptureMode::SumForm),
            "max" | "max-form" => Ok(CaptureMode::MaxForm),
            other => Err(Error::InvalidConfig(format!(
                "unknown capture mode '{other}', expected sum or max"
            ))),
        }
    }
}

/// Simulation protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub trials: u64,
    pub seed: u64,
    pub capture_mode: CaptureMode,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            trials: 100_000,
            seed: 1,
            capture_mode: CaptureMode::SumForm,
        }
    }
}

/// A success-frequency estimate with its 95% normal-approximation
/// confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub estimate: f64,
    pub ci_half_width: f64,
}

impl SimEstimate {
    fn from_counts(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        SimEstimate {
            estimate: p,
            ci_half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// Monte Carlo estimates of the four success metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessEstimates {
    pub snr: SimEstimate,
    pub sir_dom: SimEstimate,
    pub sir_cosf: SimEstimate,
    pub sir_joint: SimEstimate,
}

// success bits for one realization, packed for exact integer reduction
#[derive(Default, Clone, Copy)]
struct Counts {
    snr: u64,
    dom: u64,
    cosf: u64,
    joint: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            snr: self.snr + other.snr,
            dom: self.dom + other.dom,
            cosf: self.cosf + other.cosf,
            joint: self.joint + other.joint,
        }
    }
}

fn one_realization(scenario: &Scenario, x1: f64, annulus: usize, rng: &mut ChaCha8Rng, mode: CaptureMode) -> Counts {
    let plan = scenario.plan();
    let model = scenario.path_loss_model();
    let sir = scenario.sir_matrix();
    let sf = plan.sf(annulus).index();
    let theta = scenario
        .snr_thresholds()
        .threshold(plan.sf(annulus))
        .value();

    let h = draw_fading(rng).0;
    let signal = scenario.tx_mw() * h * model.attenuation(x1);

    let devices = sample_active(plan, scenario.deployment(), rng);
    let k = plan.annulus_count();
    let mut per_annulus = vec![0.0f64; k];
    let mut max_co = 0.0f64;
    for d in &devices {
        let power = scenario.tx_mw() * d.gain.0 * model.attenuation(d.distance_m);
        per_annulus[d.annulus] += power;
        if d.annulus == annulus {
            max_co = max_co.max(power);
        }
    }

    let delta_co = sir.threshold_lin(sf, sf);
    let snr_ok = signal >= scenario.noise_mw() * theta;
    let dom_ok = signal >= delta_co * max_co;
    let cosf_ok = signal >= delta_co * per_annulus[annulus];
    let joint_ok = match mode {
        CaptureMode::SumForm => {
            let weighted: f64 = (0..k)
                .map(|j| sir.threshold_lin(sf, plan.sf(j).index()) * per_annulus[j])
                .sum();
            signal >= weighted
        }
        CaptureMode::MaxForm => (0..k)
            .all(|j| signal >= sir.threshold_lin(sf, plan.sf(j).index()) * per_annulus[j]),
    };

    Counts {
        snr: snr_ok as u64,
        dom: dom_ok as u64,
        cosf: cosf_ok as u64,
        joint: joint_ok as u64,
    }
}

fn stream_rng(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Estimate all four success metrics for a desired device at distance `x1`
/// by `spec.trials` independent realizations of the interferer field.
pub fn simulate_success(scenario: &Scenario, x1: f64, spec: &SimSpec) -> Result<SuccessEstimates> {
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let annulus = scenario.plan().annulus_of(x1)?;
    let counts = (0..spec.trials)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(spec.seed, r);
            one_realization(scenario, x1, annulus, &mut rng, spec.capture_mode)
        })
        .reduce(Counts::default, Counts::merge);
    Ok(SuccessEstimates {
        snr: SimEstimate::from_counts(counts.snr, spec.trials),
        sir_dom: SimEstimate::from_counts(counts.dom, spec.trials),
        sir_cosf: SimEstimate::from_counts(counts.cosf, spec.trials),
        sir_joint: SimEstimate::from_counts(counts.joint, spec.trials),
    })
}

/// Estimate the coverage metrics: per realization the desired device's
/// position is drawn area-uniformly in the disk before the success test.
pub fn simulate_coverage(scenario: &Scenario, spec: &SimSpec) -> Result<SuccessEstimates> {
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let radius = scenario.plan().radius();
    let counts = (0..spec.trials)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(spec.seed, r);
            // area-uniform radius: density 2x/R^2, inverse CDF R sqrt(U)
            let x1 = radius * rng.random::<f64>().sqrt();
            let annulus = scenario
                .plan()
                .annulus_of(x1)
                .expect("sampled position is inside the cell");
            one_realization(scenario, x1, annulus, &mut rng, spec.capture_mode)
        })
        .reduce(Counts::default, Counts::merge);
    Ok(SuccessEstimates {
        snr: SimEstimate::from_counts(counts.snr, spec.trials),
        sir_dom: SimEstimate::from_counts(counts.dom, spec.trials),
        sir_cosf: SimEstimate::from_counts(counts.cosf, spec.trials),
        sir_joint: SimEstimate::from_counts(counts.joint, spec.trials),
    })
}
