//! Closed-form and quadrature-based uplink success probabilities:
//! interference-free SNR success, dominant co-SF interferer, cumulative
//! co-SF, inter-SF and joint interference.

use crate::error::{Error, Result};
use crate::geometry::{Deployment, SfPlan};
use crate::model::{RadioConfig, SirMatrix, SnrThresholds};
use crate::numerics::{integrate, upper_incomplete_gamma, QuadratureSpec};
use crate::propagation::{noise_power, PathLossModel};

/// All four success metrics evaluated at one desired-device distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessPoint {
    pub distance_m: f64,
    pub annulus: usize,
    pub sf: crate::model::SpreadingFactor,
    pub p_snr: f64,
    pub p_sir_dom: f64,
    pub p_sir_cosf: f64,
    pub p_sir_joint: f64,
}

/// A fully specified single-cell scenario: radio parameters, annulus plan,
/// deployment, thresholds and quadrature settings. Immutable once built;
/// all evaluation methods are pure.
#[derive(Debug, Clone)]
pub struct Scenario {
    radio: RadioConfig,
    plan: SfPlan,
    deployment: Deployment,
    snr: SnrThresholds,
    sir: SirMatrix,
    quad: QuadratureSpec,
    path_loss: PathLossModel,
    noise_mw: f64,
    tx_mw: f64,
}

impl Scenario {
    pub fn new(
        radio: RadioConfig,
        plan: SfPlan,
        n_bar: f64,
        snr: SnrThresholds,
        sir: SirMatrix,
    ) -> Result<Self> {
        let deployment = Deployment::new(n_bar, &plan, radio.duty_cycle)?;
        let path_loss = PathLossModel::from_config(&radio);
        let noise_mw = noise_power(&radio).value();
        let tx_mw = radio.tx_power_mw();
        Ok(Scenario {
            radio,
            plan,
            deployment,
            snr,
            sir,
            quad: QuadratureSpec::default(),
            path_loss,
            noise_mw,
            tx_mw,
        })
    }

    pub fn radio(&self) -> &RadioConfig {
        &self.radio
    }

    pub fn plan(&self) -> &SfPlan {
        &self.plan
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn snr_thresholds(&self) -> &SnrThresholds {
        &self.snr
    }

    pub fn sir_matrix(&self) -> &SirMatrix {
        &self.sir
    }

    pub fn path_loss_model(&self) -> &PathLossModel {
        &self.path_loss
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_mw
    }

    pub fn tx_mw(&self) -> f64 {
        self.tx_mw
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Same scenario with a different mean device count.
    pub fn with_mean_devices(&self, n_bar: f64) -> Result<Self> {
        let mut s = self.clone();
        s.deployment = Deployment::new(n_bar, &s.plan, s.radio.duty_cycle)?;
        Ok(s)
    }

    /// Interference-free success probability `exp(-sigma^2 theta / (p_t l(x1)))`
    /// with the SF of the annulus containing `x1`.
    pub fn p_snr(&self, x1: f64) -> Result<f64> {
        let i = self.plan.annulus_of(x1)?;
        Ok(self.p_snr_at(x1, i))
    }

    /// As [`Self::p_snr`] with the annulus fixed by the caller (used when
    /// integrating over an annulus whose closure includes the boundary).
    pub fn p_snr_at(&self, x1: f64, annulus: usize) -> f64 {
        let theta = self.snr.threshold(self.plan.sf(annulus)).value();
        let l1 = self.path_loss.attenuation(x1);
        (-self.noise_mw * theta / (self.tx_mw * l1)).exp()
    }

    /// Success probability against the strongest co-SF interferer,
    /// `e^(-v_i) Int_0^inf exp(v_i F_Xi(z l(x1)/delta)) e^(-z) dz`.
    pub fn p_sir_dominant(&self, x1: f64) -> Result<f64> {
        let i = self.plan.annulus_of(x1)?;
        self.p_sir_dominant_at(x1, i)
    }

    pub fn p_sir_dominant_at(&self, x1: f64, annulus: usize) -> Result<f64> {
        let v = self.deployment.expected_active(annulus);
        if v == 0.0 {
            return Ok(1.0);
        }
        let sf = self.plan.sf(annulus).index();
        let delta = self.sir.threshold_lin(sf, sf);
        let l1 = self.path_loss.attenuation(x1);
        if l1.is_infinite() {
            return Ok(1.0);
        }
        let (lo, hi) = self.plan.bounds(annulus);
        // Integrand folded as exp(v (F - 1) - z) so the leading e^(-v)
        // never overflows for large v.
        let f = |z: f64| {
            let cdf = interferer_power_cdf(z * l1 / delta, lo, hi, &self.path_loss)
                .unwrap_or(1.0);
            (v * (cdf - 1.0) - z).exp()
        };
        let val = integrate(&f, 0.0, self.quad.tail_cutoff, &self.quad)?;
        Ok(val.clamp(0.0, 1.0))
    }

    /// The interference kernel
    /// `I(x1, delta, {a, b}) = Int_a^b delta l(x) / (l(x1) + delta l(x)) x dx`,
    /// split at the critical distance where the path loss plateaus.
    pub fn interference_integral(&self, x1: f64, delta: f64, lo: f64, hi: f64) -> Result<f64> {
        interference_integral(x1, delta, lo, hi, &self.path_loss, &self.quad)
    }

    /// Success under cumulative co-SF interference,
    /// `exp(-2 pi alpha lambda I(x1, delta_ii, annulus_i))`.
    pub fn p_sir_cosf(&self, x1: f64) -> Result<f64> {
        let i = self.plan.annulus_of(x1)?;
        self.p_sir_cosf_at(x1, i)
    }

    pub fn p_sir_cosf_at(&self, x1: f64, annulus: usize) -> Result<f64> {
        let sf = self.plan.sf(annulus).index();
        let delta = self.sir.threshold_lin(sf, sf);
        let (lo, hi) = self.plan.bounds(annulus);
        let kernel = self.interference_integral(x1, delta, lo, hi)?;
        Ok((-2.0 * std::f64::consts::PI * self.deployment.thinned_intensity() * kernel).exp())
    }

    /// Success under inter-SF interference from every other annulus,
    /// the product of per-annulus Laplace transforms.
    pub fn p_sir_intersf(&self, x1: f64) -> Result<f64> {
        let i = self.plan.annulus_of(x1)?;
        self.p_sir_intersf_at(x1, i)
    }

    pub fn p_sir_intersf_at(&self, x1: f64, annulus: usize) -> Result<f64> {
        let sf = self.plan.sf(annulus).index();
        let mut kernel_sum = 0.0;
        for j in 0..self.plan.annulus_count() {
            if j == annulus {
                continue;
            }
            let delta = self.sir.threshold_lin(sf, self.plan.sf(j).index());
            let (lo, hi) = self.plan.bounds(j);
            kernel_sum += self.interference_integral(x1, delta, lo, hi)?;
        }
        Ok((-2.0 * std::f64::consts::PI * self.deployment.thinned_intensity() * kernel_sum).exp())
    }

    /// Success under co-SF and inter-SF interference together; equal to the
    /// product of the two factors by exponent additivity.
    pub fn p_sir_joint(&self, x1: f64) -> Result<f64> {
        let i = self.plan.annulus_of(x1)?;
        self.p_sir_joint_at(x1, i)
    }

    pub fn p_sir_joint_at(&self, x1: f64, annulus: usize) -> Result<f64> {
        let sf = self.plan.sf(annulus).index();
        let mut kernel_sum = 0.0;
        for j in 0..self.plan.annulus_count() {
            let delta = self.sir.threshold_lin(sf, self.plan.sf(j).index());
            let (lo, hi) = self.plan.bounds(j);
            kernel_sum += self.interference_integral(x1, delta, lo, hi)?;
        }
        Ok((-2.0 * std::f64::consts::PI * self.deployment.thinned_intensity() * kernel_sum).exp())
    }

    /// Distance grid over (0, R) for sweeps: points allocated to annuli in
    /// proportion to width, with the last point of every annulus placed just
    /// inside its outer boundary to expose the saw-tooth.
    pub fn sweep_grid(&self, n_points: usize) -> Result<Vec<f64>> {
        let k = self.plan.annulus_count();
        if n_points < k {
            return Err(Error::InvalidConfig(format!(
                "sweep needs at least {k} grid points, got {n_points}"
            )));
        }
        let r = self.plan.radius();
        // largest-remainder allocation, at least one point per annulus
        let mut alloc = vec![1usize; k];
        let mut remaining = n_points - k;
        let mut shares: Vec<(usize, f64)> = (0..k)
            .map(|i| {
                let (lo, hi) = self.plan.bounds(i);
                (i, (hi - lo) / r * remaining as f64)
            })
            .collect();
        for &(i, s) in &shares {
            alloc[i] += s.floor() as usize;
            remaining -= s.floor() as usize;
        }
        shares.sort_by(|a, b| (b.1.fract()).partial_cmp(&a.1.fract()).unwrap());
        for &(i, _) in shares.iter().take(remaining) {
            alloc[i] += 1;
        }
        let mut grid = Vec::with_capacity(n_points);
        for (i, &n_i) in alloc.iter().enumerate() {
            let (lo, hi) = self.plan.bounds(i);
            let step = (hi - lo) / (n_i + 1) as f64;
            for j in 0..n_i.saturating_sub(1) {
                grid.push(lo + (j + 1) as f64 * step);
            }
            let eps = 1f64.min(step / 2.0);
            grid.push(hi - eps);
        }
        Ok(grid)
    }

    /// Evaluate all four metrics over a sweep grid of `n_points` distances.
    pub fn success_sweep(&self, n_points: usize) -> Result<Vec<SuccessPoint>> {
        let grid = self.sweep_grid(n_points)?;
        grid.into_iter().map(|x1| self.success_at(x1)).collect()
    }

    /// All four metrics at a single distance.
    pub fn success_at(&self, x1: f64) -> Result<SuccessPoint> {
        let annulus = self.plan.annulus_of(x1)?;
        Ok(SuccessPoint {
            distance_m: x1,
            annulus,
            sf: self.plan.sf(annulus),
            p_snr: self.p_snr_at(x1, annulus),
            p_sir_dom: self.p_sir_dominant_at(x1, annulus)?,
            p_sir_cosf: self.p_sir_cosf_at(x1, annulus)?,
            p_sir_joint: self.p_sir_joint_at(x1, annulus)?,
        })
    }
}

/// CDF of the received interferer power `X = G l(D)` for a device whose
/// distance D is area-uniform over the annulus `[lo, hi)` and whose gain G
/// is unit-mean exponential. Closed form in the upper incomplete gamma.
pub fn interferer_power_cdf(z: f64, lo: f64, hi: f64, model: &PathLossModel) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::Numeric(format!("CDF argument must be >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    let norm = hi * hi - lo * lo;
    let xc = model.critical_distance_m;
    let mut total = 0.0;
    // plateau piece: path loss constant at l(x_c)
    let plateau_end = hi.min(xc);
    if lo < plateau_end {
        let l_c = model.attenuation(xc);
        total += (plateau_end * plateau_end - lo * lo) * (1.0 - (-z / l_c).exp());
    }
    // power-law piece
    let a2 = lo.max(xc);
    if a2 < hi {
        let c = z / model.kappa;
        let a = 2.0 / model.eta;
        // Int x e^(-c x^eta) dx = c^(-a)/eta [Gamma(a, c x^eta)] bracket
        let g_lo = upper_incomplete_gamma(a, c * a2.powf(model.eta));
        let g_hi = upper_incomplete_gamma(a, c * hi.powf(model.eta));
        let exp_part = 2.0 / model.eta * c.powf(-a) * (g_lo - g_hi);
        total += (hi * hi - a2 * a2) - exp_part;
    }
    Ok((total / norm).clamp(0.0, 1.0))
}

/// The same CDF by direct 1-D quadrature of
/// `Int f_D(x) (1 - e^(-z/l(x))) dx`; kept as an independent check on the
/// closed form.
pub fn interferer_power_cdf_quadrature(
    z: f64,
    lo: f64,
    hi: f64,
    model: &PathLossModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::Numeric(format!("CDF argument must be >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let norm = hi * hi - lo * lo;
    let f = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        2.0 * x * (1.0 - (-z / model.attenuation(x)).exp())
    };
    let xc = model.critical_distance_m;
    let mut total = 0.0;
    if lo < xc.min(hi) {
        total += integrate(&f, lo, xc.min(hi), quad)?;
    }
    let a2 = lo.max(xc);
    if a2 < hi {
        total += integrate(&f, a2, hi, quad)?;
    }
    Ok((total / norm).clamp(0.0, 1.0))
}

/// Interference kernel shared by the cumulative-interference metrics.
pub fn interference_integral(
    x1: f64,
    delta: f64,
    lo: f64,
    hi: f64,
    model: &PathLossModel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::Numeric(format!("bad annulus bounds [{lo}, {hi})")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let l1 = model.attenuation(x1.max(0.0));
    if l1.is_infinite() {
        return Ok(0.0);
    }
    let f = |x: f64| {
        if x <= 0.0 {
            // l(x) -> inf, ratio -> 1, times x -> 0
            return 0.0;
        }
        let lx = delta * model.attenuation(x);
        lx / (l1 + lx) * x
    };
    let xc = model.critical_distance_m;
    let mut total = 0.0;
    if lo < xc.min(hi) {
        total += integrate(&f, lo, xc.min(hi), quad)?;
    }
    let a2 = lo.max(xc);
    if a2 < hi {
        total += integrate(&f, a2, hi, quad)?;
    }
    Ok(total)
}
