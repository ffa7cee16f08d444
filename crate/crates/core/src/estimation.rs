//! Parameter estimation from measurements.
//!
//! Large scale: least-squares log-distance fit and a normal fit of per-point
//! path-loss exponents. Small scale: maximum-likelihood Rayleigh and
//! Nakagami-m fits, scored by the mean squared error between the fitted CDF
//! and the empirical CDF at the sample points.

use crate::channel_models::LogDistanceParams;
use crate::error::{degenerate, domain, Error, Result};
use crate::fading::special::{ln_minus_digamma, trigamma};
use crate::fading::{snr_cdf, FadingKind, NormalParams, SnrDist};

/// One received-power observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub link_id: String,
    /// Link distance, meters.
    pub distance: f64,
    /// Received power, dBm.
    pub rx_power: f64,
}

/// Small-scale SNR samples of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSampleSet {
    pub node_id: String,
    samples: Vec<f64>,
}

impl SnrSampleSet {
    pub const MIN_LEN: usize = 2;

    pub fn new(node_id: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        let node_id = node_id.into();
        if samples.len() < Self::MIN_LEN {
            return Err(degenerate(format!(
                "node {node_id}: need at least {} samples, got {}",
                Self::MIN_LEN,
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(domain(format!("node {node_id}: SNR samples must be positive and finite, got {bad}")));
        }
        Ok(Self { node_id, samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Least-squares log-distance fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossFit {
    pub params: LogDistanceParams,
    /// RMS of the fit residuals, dB.
    pub sigma_pl: f64,
}

/// A fitted small-scale model and its CDF mean squared error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingFit {
    pub dist: SnrDist,
    pub mse: f64,
    /// The unconstrained shape estimate fell below [`SnrDist::MIN_M`] and was
    /// raised to it.
    pub clamped: bool,
}

/// Fits `PL(d0)` and `n` by linear regression of `p_tx − rx_power` on
/// `10 log10(d / d0)`.
pub fn fit_log_distance_lse(ms: &[Measurement], p_tx: f64, d0: f64) -> Result<PathLossFit> {
    if !(d0 > 0.0 && d0.is_finite()) {
        return Err(domain(format!("reference distance must be positive, got {d0}")));
    }
    if ms.len() < 2 {
        return Err(degenerate(format!("need at least 2 measurements, got {}", ms.len())));
    }
    for m in ms {
        if !(m.distance > 0.0 && m.distance.is_finite()) || !m.rx_power.is_finite() {
            return Err(domain(format!("link {}: invalid measurement {m:?}", m.link_id)));
        }
    }
    let xs: Vec<f64> = ms.iter().map(|m| 10.0 * (m.distance / d0).log10()).collect();
    let ys: Vec<f64> = ms.iter().map(|m| p_tx - m.rx_power).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    if sxx <= f64::EPSILON * n * (1.0 + x_mean * x_mean) {
        return Err(degenerate("all measurement distances are identical; exponent is not identifiable"));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let params = LogDistanceParams::new(intercept, d0, slope)?;
    Ok(PathLossFit { params, sigma_pl: (sse / n).sqrt() })
}

/// Per-measurement path-loss exponents `n_i = (PL_i − PL(d0)) / (10 log10(d_i / d0))`.
///
/// Points within 1 % of `d0` are skipped.
pub fn shadowing_exponents(ms: &[Measurement], p_tx: f64, params: &LogDistanceParams) -> Vec<f64> {
    ms.iter()
        .filter(|m| (m.distance / params.d0 - 1.0).abs() >= 0.01)
        .map(|m| (p_tx - m.rx_power - params.pl_d0) / (10.0 * (m.distance / params.d0).log10()))
        .collect()
}

/// Maximum-likelihood normal fit (population standard deviation).
pub fn fit_normal_mle(xs: &[f64]) -> Result<NormalParams> {
    if xs.len() < 2 {
        return Err(degenerate(format!("normal fit needs at least 2 values, got {}", xs.len())));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(domain("normal fit input must be finite"));
    }
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    if var <= 0.0 || xs.iter().all(|&x| x == xs[0]) {
        return Err(degenerate("all values equal; normal sigma would be zero"));
    }
    NormalParams::new(mu, var.sqrt())
}

/// Maximum-likelihood Rayleigh fit: `γ̄ = sample mean`.
pub fn fit_rayleigh_mle(s: &SnrSampleSet) -> Result<FadingFit> {
    let dist = SnrDist::rayleigh(s.mean())?;
    Ok(FadingFit { dist, mse: cdf_mse(&dist, s)?, clamped: false })
}

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 200;

/// Log-moment gap `ln(mean) − mean(ln)`, the sufficient statistic of the
/// Gamma shape MLE. Zero only when all samples are equal.
pub fn log_moment_gap(s: &SnrSampleSet) -> f64 {
    let n = s.len() as f64;
    let mean_ln = s.samples().iter().map(|x| x.ln()).sum::<f64>() / n;
    s.mean().ln() - mean_ln
}

// Greenwood & Durand rational approximation to the root of ln m − ψ(m) = gap.
fn greenwood_durand(gap: f64) -> f64 {
    if gap <= 0.5772 {
        (0.500_087_6 + 0.164_885_2 * gap - 0.054_427_4 * gap * gap) / gap
    } else if gap <= 17.0 {
        (8.898_919 + 9.059_950 * gap + 0.977_537_3 * gap * gap) / (gap * (17.797_28 + 11.968_477 * gap + gap * gap))
    } else {
        1.0 / gap
    }
}

/// Solves `ln(m) − ψ(m) = gap` for the Gamma shape by Newton iteration.
pub fn solve_gamma_shape(gap: f64) -> Result<f64> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(degenerate(format!("log-moment gap must be positive, got {gap}")));
    }
    let mut m = greenwood_durand(gap);
    for _ in 0..NEWTON_MAX_ITER {
        let f = ln_minus_digamma(m) - gap;
        let df = 1.0 / m - trigamma(m);
        let mut step = f / df;
        // keep the iterate positive
        while m - step <= 0.0 {
            step *= 0.5;
        }
        m -= step;
        if step.abs() < NEWTON_TOL * m.max(1.0) {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence { routine: "gamma shape Newton", iterations: NEWTON_MAX_ITER })
}

/// Maximum-likelihood Nakagami-m fit in the SNR domain.
///
/// `γ̄` is the sample mean; `m` solves the Gamma likelihood equation and is
/// clamped to [`SnrDist::MIN_M`] (with `clamped` set) when it falls below.
pub fn fit_nakagami_mle(s: &SnrSampleSet) -> Result<FadingFit> {
    let first = s.samples()[0];
    let gap = log_moment_gap(s);
    if gap <= 0.0 || s.samples().iter().all(|&x| x == first) {
        return Err(degenerate(format!("node {}: all samples equal, shape is unbounded", s.node_id)));
    }
    let m = solve_gamma_shape(gap)?;
    let clamped = m < SnrDist::MIN_M;
    let dist = SnrDist::nakagami(m.max(SnrDist::MIN_M), s.mean())?;
    Ok(FadingFit { dist, mse: cdf_mse(&dist, s)?, clamped })
}

/// Fits the requested model.
pub fn fit_fading(kind: FadingKind, s: &SnrSampleSet) -> Result<FadingFit> {
    match kind {
        FadingKind::Rayleigh => fit_rayleigh_mle(s),
        FadingKind::Nakagami => fit_nakagami_mle(s),
    }
}

/// Right-continuous empirical CDF, `F̂(x) = #{x_i ≤ x} / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Builds the step function from any finite values.
    pub fn from_values(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Mean over the sample points of `(model(x_i) − F̂(x_i))²`.
    pub fn mse_against(&self, mut model: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let n = self.sorted.len();
        if n == 0 {
            return Err(degenerate("empirical CDF has no points"));
        }
        let mut acc = 0.0;
        let mut i = 0;
        while i < n {
            let x = self.sorted[i];
            // ties share the count at the end of their run
            let mut j = i + 1;
            while j < n && self.sorted[j] == x {
                j += 1;
            }
            let diff = model(x)? - j as f64 / n as f64;
            acc += (j - i) as f64 * diff * diff;
            i = j;
        }
        Ok(acc / n as f64)
    }
}

pub fn empirical_cdf(s: &SnrSampleSet) -> EmpiricalCdf {
    EmpiricalCdf::from_values(s.samples())
}

/// Mean squared error between `model`'s CDF and the empirical CDF of `s`,
/// evaluated at the sample points.
pub fn cdf_mse(model: &SnrDist, s: &SnrSampleSet) -> Result<f64> {
    empirical_cdf(s).mse_against(|x| snr_cdf(x, model))
}
