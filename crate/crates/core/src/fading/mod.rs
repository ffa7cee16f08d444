//! Shadowing and small-scale fading laws.
//!
//! Shadowing is a normal law over the path-loss exponent. Small-scale fading
//! is expressed directly in the SNR domain: Rayleigh fading gives an
//! exponential SNR, Nakagami-m gives a Gamma SNR with shape `m` and mean `γ̄`
//! (scale `γ̄ / m`).

pub mod special;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};

use crate::error::{domain, Result};

pub use special::{erf, erfc, regularized_lower_gamma, regularized_upper_gamma};

/// Normal law of the path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(domain("normal mean must be finite"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain(format!("normal sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Normal CDF `½ [1 + erf((x − μ) / (√2 σ))]`.
pub fn normal_cdf(x: f64, p: &NormalParams) -> Result<f64> {
    p.validate()?;
    let z = (x - p.mu) / (std::f64::consts::SQRT_2 * p.sigma);
    // erfc on the left tail keeps relative precision there
    Ok(if z < 0.0 { 0.5 * erfc(-z) } else { 0.5 * (1.0 + erf(z)) })
}

/// Small-scale fading family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FadingKind {
    Rayleigh,
    Nakagami,
}

impl FadingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FadingKind::Rayleigh => "rayleigh",
            FadingKind::Nakagami => "nakagami",
        }
    }
}

impl fmt::Display for FadingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FadingKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(FadingKind::Rayleigh),
            "nakagami" | "nakagami-m" => Ok(FadingKind::Nakagami),
            other => Err(domain(format!("unknown fading model '{other}'"))),
        }
    }
}

/// Distribution of the linear SNR of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDist {
    pub kind: FadingKind,
    /// Mean SNR, linear.
    pub gamma_bar: f64,
    /// Nakagami shape. Always 1 for Rayleigh.
    pub m: f64,
}

impl SnrDist {
    /// Smallest Nakagami shape accepted.
    pub const MIN_M: f64 = 0.5;

    pub fn rayleigh(gamma_bar: f64) -> Result<Self> {
        let d = Self { kind: FadingKind::Rayleigh, gamma_bar, m: 1.0 };
        d.validate()?;
        Ok(d)
    }

    pub fn nakagami(m: f64, gamma_bar: f64) -> Result<Self> {
        let d = Self { kind: FadingKind::Nakagami, gamma_bar, m };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return Err(domain(format!("mean SNR must be positive, got {}", self.gamma_bar)));
        }
        match self.kind {
            FadingKind::Rayleigh if self.m != 1.0 => Err(domain("Rayleigh fading has m = 1")),
            FadingKind::Nakagami if !(self.m >= Self::MIN_M && self.m.is_finite()) => {
                Err(domain(format!("Nakagami m must be >= {}, got {}", Self::MIN_M, self.m)))
            }
            _ => Ok(()),
        }
    }

    /// Variance of the SNR, `γ̄² / m`.
    pub fn variance(&self) -> f64 {
        self.gamma_bar * self.gamma_bar / self.m
    }
}

/// CDF of the SNR, `P(γ ≤ gamma)`.
pub fn snr_cdf(gamma: f64, d: &SnrDist) -> Result<f64> {
    snr_cdf_pair(gamma, d).map(|(lower, _)| lower)
}

/// Complementary CDF of the SNR, `P(γ > gamma)`, computed without
/// cancellation in the upper tail.
pub fn snr_ccdf(gamma: f64, d: &SnrDist) -> Result<f64> {
    snr_cdf_pair(gamma, d).map(|(_, upper)| upper)
}

fn snr_cdf_pair(gamma: f64, d: &SnrDist) -> Result<(f64, f64)> {
    d.validate()?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(domain(format!("SNR must be non-negative, got {gamma}")));
    }
    match d.kind {
        FadingKind::Rayleigh => {
            let x = gamma / d.gamma_bar;
            Ok((-(-x).exp_m1(), (-x).exp()))
        }
        FadingKind::Nakagami => special::regularized_gamma_pair(d.m, d.m * gamma / d.gamma_bar),
    }
}

/// Draws `count` i.i.d. SNR samples from an explicit generator.
pub fn sample_snr_with<R: Rng + ?Sized>(d: &SnrDist, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    d.validate()?;
    if count == 0 {
        return Err(domain("sample count must be at least 1"));
    }
    let out = match d.kind {
        FadingKind::Rayleigh => {
            let law = Exp::new(1.0 / d.gamma_bar).map_err(|e| domain(e.to_string()))?;
            law.sample_iter(rng).take(count).collect()
        }
        FadingKind::Nakagami => {
            let law = Gamma::new(d.m, d.gamma_bar / d.m).map_err(|e| domain(e.to_string()))?;
            law.sample_iter(rng).take(count).collect()
        }
    };
    Ok(out)
}

/// Draws `count` i.i.d. SNR samples, deterministic per `seed`.
pub fn sample_snr(d: &SnrDist, count: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_snr_with(d, count, &mut rng)
}
