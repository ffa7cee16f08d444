//! Deterministic mean path-loss predictors.
//!
//! All predictors return the *mean* path loss in dB. Shadowing is applied by
//! callers (see [`crate::scenario`]), so everything here is pure.

use crate::error::{domain, Result};

/// Parameters of the log-distance model `PL(d) = PL(d0) + 10 n log10(d / d0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDistanceParams {
    /// Path loss at the reference distance, dB.
    pub pl_d0: f64,
    /// Reference distance, meters.
    pub d0: f64,
    /// Path-loss exponent.
    pub n: f64,
}

impl LogDistanceParams {
    /// Default reference distance, meters.
    pub const DEFAULT_D0: f64 = 1.0;

    pub fn new(pl_d0: f64, d0: f64, n: f64) -> Result<Self> {
        let p = Self { pl_d0, d0, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pl_d0.is_finite() {
            return Err(domain(format!("PL(d0) must be finite, got {}", self.pl_d0)));
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(domain(format!("d0 must be positive, got {}", self.d0)));
        }
        if !(self.n > 0.0 && self.n.is_finite()) {
            return Err(domain(format!("path-loss exponent must be positive, got {}", self.n)));
        }
        Ok(())
    }
}

/// Parameters of the ITU-R indoor model.
///
/// The frequency is in **MHz**, unlike [`WinnerParams`] which takes GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItuRParams {
    /// Center frequency, MHz.
    pub f_mhz: f64,
    /// Distance power-loss exponent.
    pub n: f64,
    /// Total floor-penetration loss, dB. Zero for same-floor links.
    pub l_floors: f64,
}

impl ItuRParams {
    pub fn new(f_mhz: f64, n: f64, l_floors: f64) -> Result<Self> {
        let p = Self { f_mhz, n, l_floors };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_mhz > 0.0 && self.f_mhz.is_finite()) {
            return Err(domain(format!("frequency must be positive, got {} MHz", self.f_mhz)));
        }
        if !self.n.is_finite() {
            return Err(domain("ITU-R exponent must be finite"));
        }
        if !(self.l_floors >= 0.0 && self.l_floors.is_finite()) {
            return Err(domain(format!("floor loss must be non-negative, got {}", self.l_floors)));
        }
        Ok(())
    }
}

impl Default for ItuRParams {
    /// Office building at 2.4 GHz, same floor.
    fn default() -> Self {
        Self { f_mhz: 2400.0, n: 3.0, l_floors: 0.0 }
    }
}

/// Parameters of the WINNER II rooms-and-corridors model.
///
/// The frequency is in **GHz**, unlike [`ItuRParams`] which takes MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinnerParams {
    /// Center frequency, GHz.
    pub f_ghz: f64,
    /// Attenuation per wall, dB.
    pub l_w: f64,
    /// Average number of walls between the endpoints. May be fractional.
    pub n_w: f64,
}

impl WinnerParams {
    /// Per-wall loss for thin walls, dB.
    pub const THIN_WALL_DB: f64 = 5.0;
    /// Per-wall loss for thick walls, dB.
    pub const THICK_WALL_DB: f64 = 15.0;

    pub fn new(f_ghz: f64, l_w: f64, n_w: f64) -> Result<Self> {
        let p = Self { f_ghz, l_w, n_w };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_ghz > 0.0 && self.f_ghz.is_finite()) {
            return Err(domain(format!("frequency must be positive, got {} GHz", self.f_ghz)));
        }
        if !(self.l_w > 0.0 && self.l_w.is_finite()) {
            return Err(domain(format!("wall loss must be positive, got {}", self.l_w)));
        }
        if !(self.n_w >= 0.0 && self.n_w.is_finite()) {
            return Err(domain(format!("wall count must be non-negative, got {}", self.n_w)));
        }
        Ok(())
    }
}

impl Default for WinnerParams {
    /// 2.4 GHz, thin walls, 2.1 walls on average.
    fn default() -> Self {
        Self { f_ghz: 2.4, l_w: Self::THIN_WALL_DB, n_w: 2.1 }
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("distance must be positive, got {d}")))
    }
}

/// Log-distance mean path loss at `d` meters, dB.
pub fn log_distance_pl(p: &LogDistanceParams, d: f64) -> Result<f64> {
    p.validate()?;
    check_distance(d)?;
    Ok(p.pl_d0 + 10.0 * p.n * (d / p.d0).log10())
}

/// ITU-R indoor mean path loss at `d` meters, dB.
pub fn itu_r_pl(p: &ItuRParams, d: f64) -> Result<f64> {
    p.validate()?;
    check_distance(d)?;
    Ok(20.0 * p.f_mhz.log10() + 10.0 * p.n * d.log10() + p.l_floors - 28.0)
}

/// WINNER II rooms-and-corridors mean path loss at `d` meters, dB.
pub fn winner2_pl(p: &WinnerParams, d: f64) -> Result<f64> {
    p.validate()?;
    check_distance(d)?;
    Ok(20.0 * (p.f_ghz / 5.0).log10() + 36.8 * d.log10() + p.n_w * p.l_w + 43.8)
}

/// Mean linear SNR from a link budget: `10^((p_tx - pl - noise) / 10)`.
pub fn mean_snr_from_budget(p_tx_dbm: f64, pl_db: f64, noise_dbm: f64) -> Result<f64> {
    if !(p_tx_dbm.is_finite() && pl_db.is_finite() && noise_dbm.is_finite()) {
        return Err(domain("link budget terms must be finite"));
    }
    Ok(crate::db_to_linear(p_tx_dbm - pl_db - noise_dbm))
}
