//! Interference and capacity outage constraints and the AND-rule decision.
//!
//! With `γ` the received signal-to-noise power ratio:
//!
//! - `F_I(I_th) = F_γ(I_th / σ²)` at a primary receiver,
//! - `F_C(C_th) = F_γ(2^C_th − 1)` at an indoor device (unit bandwidth).
//!
//! The interference constraint holds when `1 − F_I(I_th) ≤ ε_I`, the capacity
//! constraint when `F_C(C_th) ≤ ε_C`. Ties pass.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::fading::{snr_ccdf, snr_cdf, SnrDist};

/// Design thresholds known at the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintConfig {
    /// Interference threshold at the primary receiver, dBm.
    pub i_th: f64,
    /// Interference outage probability.
    pub eps_i_out: f64,
    /// Capacity threshold, bits/s/Hz.
    pub c_th: f64,
    /// Capacity outage probability.
    pub eps_c_out: f64,
    /// Noise power at the primary receiver, dBm.
    pub noise_power: f64,
}

impl ConstraintConfig {
    /// Noise power that reproduces the reference interference pattern; the
    /// midpoint of the feasible calibration window.
    pub const DEFAULT_NOISE_POWER_DBM: f64 = -119.5;

    pub fn new(i_th: f64, eps_i_out: f64, c_th: f64, eps_c_out: f64, noise_power: f64) -> Result<Self> {
        let c = Self { i_th, eps_i_out, c_th, eps_c_out, noise_power };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |p: f64| p > 0.0 && p < 1.0;
        if !open_unit(self.eps_i_out) {
            return Err(domain(format!("interference outage must lie in (0, 1), got {}", self.eps_i_out)));
        }
        if !open_unit(self.eps_c_out) {
            return Err(domain(format!("capacity outage must lie in (0, 1), got {}", self.eps_c_out)));
        }
        if !(self.c_th >= 0.0 && self.c_th.is_finite()) {
            return Err(domain(format!("capacity threshold must be non-negative, got {}", self.c_th)));
        }
        if !self.i_th.is_finite() || !self.noise_power.is_finite() {
            return Err(domain("interference threshold and noise power must be finite"));
        }
        Ok(())
    }
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self { i_th: -90.0, eps_i_out: 0.1, c_th: 7.5, eps_c_out: 0.1, noise_power: Self::DEFAULT_NOISE_POWER_DBM }
    }
}

/// SNR threshold seen by the interference constraint, `I_th / σ²` (linear).
pub fn interference_ratio(i_th_dbm: f64, noise_dbm: f64) -> f64 {
    crate::db_to_linear(i_th_dbm) / crate::db_to_linear(noise_dbm)
}

/// SNR threshold seen by the capacity constraint, `2^C_th − 1`.
pub fn capacity_snr_threshold(c_th: f64) -> f64 {
    c_th.exp2() - 1.0
}

/// `F_I(I_th)`: probability that interference at the primary receiver stays
/// at or below `i_th`.
pub fn interference_cdf(i_th: f64, noise_power: f64, d: &SnrDist) -> Result<f64> {
    snr_cdf(interference_ratio(i_th, noise_power), d)
}

/// Interference outage `1 − F_I(I_th)`, computed from the upper tail.
pub fn interference_outage(i_th: f64, noise_power: f64, d: &SnrDist) -> Result<f64> {
    snr_ccdf(interference_ratio(i_th, noise_power), d)
}

/// `F_C(C_th)`: probability that capacity `log2(1 + γ)` is at or below `c_th`.
pub fn capacity_cdf(c_th: f64, d: &SnrDist) -> Result<f64> {
    if c_th.is_nan() || c_th < 0.0 {
        return Err(domain(format!("capacity threshold must be non-negative, got {c_th}")));
    }
    snr_cdf(capacity_snr_threshold(c_th), d)
}

pub fn check_ic(d: &SnrDist, cfg: &ConstraintConfig) -> Result<bool> {
    Ok(interference_outage(cfg.i_th, cfg.noise_power, d)? <= cfg.eps_i_out)
}

pub fn check_cc(d: &SnrDist, cfg: &ConstraintConfig) -> Result<bool> {
    Ok(capacity_cdf(cfg.c_th, d)? <= cfg.eps_c_out)
}

/// Per-node constraint outcome, kept for audit output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintEval {
    /// `F_I(I_th)` for a primary receiver, `F_C(C_th)` for an indoor device.
    pub cdf: f64,
    /// Outage probability compared against ε.
    pub outage: f64,
    pub epsilon: f64,
    pub pass: bool,
}

pub fn evaluate_ic(d: &SnrDist, cfg: &ConstraintConfig) -> Result<ConstraintEval> {
    let outage = interference_outage(cfg.i_th, cfg.noise_power, d)?;
    Ok(ConstraintEval {
        cdf: interference_cdf(cfg.i_th, cfg.noise_power, d)?,
        outage,
        epsilon: cfg.eps_i_out,
        pass: outage <= cfg.eps_i_out,
    })
}

pub fn evaluate_cc(d: &SnrDist, cfg: &ConstraintConfig) -> Result<ConstraintEval> {
    let cdf = capacity_cdf(cfg.c_th, d)?;
    Ok(ConstraintEval { cdf, outage: cdf, epsilon: cfg.eps_c_out, pass: cdf <= cfg.eps_c_out })
}

/// Binary access decisions for every primary-receiver / indoor-device pair.
///
/// The grid is always the outer AND product of the two bit vectors; it is
/// computed on access rather than stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionMatrix {
    ic_bits: Vec<bool>,
    cc_bits: Vec<bool>,
}

impl DecisionMatrix {
    pub fn from_bits(ic_bits: Vec<bool>, cc_bits: Vec<bool>) -> Result<Self> {
        if ic_bits.is_empty() || cc_bits.is_empty() {
            return Err(domain("decision matrix needs at least one primary receiver and one indoor device"));
        }
        Ok(Self { ic_bits, cc_bits })
    }

    pub fn ic_bits(&self) -> &[bool] {
        &self.ic_bits
    }

    pub fn cc_bits(&self) -> &[bool] {
        &self.cc_bits
    }

    pub fn num_pr(&self) -> usize {
        self.ic_bits.len()
    }

    pub fn num_id(&self) -> usize {
        self.cc_bits.len()
    }

    /// Decision for primary receiver `pr` and indoor device `id`; `true`
    /// enables the transmission.
    pub fn cell(&self, pr: usize, id: usize) -> bool {
        self.ic_bits[pr] && self.cc_bits[id]
    }

    /// The full grid, indexed `[pr][id]`.
    pub fn grid(&self) -> Vec<Vec<bool>> {
        self.ic_bits.iter().map(|&ic| self.cc_bits.iter().map(|&cc| ic && cc).collect()).collect()
    }

    pub fn enabled_count(&self) -> usize {
        self.ic_bits.iter().filter(|&&b| b).count() * self.cc_bits.iter().filter(|&&b| b).count()
    }
}

pub fn build_decision_matrix(
    pr_fits: &[SnrDist],
    id_fits: &[SnrDist],
    cfg: &ConstraintConfig,
) -> Result<DecisionMatrix> {
    cfg.validate()?;
    let ic_bits = pr_fits.par_iter().map(|d| check_ic(d, cfg)).collect::<Result<Vec<_>>>()?;
    let cc_bits = id_fits.par_iter().map(|d| check_cc(d, cfg)).collect::<Result<Vec<_>>>()?;
    DecisionMatrix::from_bits(ic_bits, cc_bits)
}

/// Noise powers (dBm) on a uniform grid for which the interference bits of
/// `pr_fits` equal `target`.
pub fn noise_power_sweep(
    pr_fits: &[SnrDist],
    target: &[bool],
    base: &ConstraintConfig,
    lo_dbm: f64,
    hi_dbm: f64,
    step_db: f64,
) -> Result<Vec<f64>> {
    if pr_fits.len() != target.len() {
        return Err(domain("target pattern length must match the number of fits"));
    }
    if step_db.is_nan() || step_db <= 0.0 || lo_dbm.is_nan() || hi_dbm.is_nan() || hi_dbm < lo_dbm {
        return Err(domain("sweep needs lo <= hi and a positive step"));
    }
    let steps = ((hi_dbm - lo_dbm) / step_db + 1e-9).floor() as usize;
    let mut feasible = Vec::new();
    for k in 0..=steps {
        // integer stepping avoids accumulated drift in the grid
        let noise = lo_dbm + k as f64 * step_db;
        let cfg = ConstraintConfig { noise_power: noise, ..*base };
        let bits = pr_fits.iter().map(|d| check_ic(d, &cfg)).collect::<Result<Vec<_>>>()?;
        if bits == target {
            feasible.push(noise);
        }
    }
    Ok(feasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nak(m: f64, g: f64) -> SnrDist {
        SnrDist::nakagami(m, g).unwrap()
    }

    pub(crate) fn pr_fits() -> Vec<SnrDist> {
        vec![nak(1.13, 266.0), nak(0.98, 489.0), nak(1.11, 57.34), nak(1.25, 94.20)]
    }

    fn id_fits() -> Vec<SnrDist> {
        vec![nak(1.23, 952.0), nak(1.28, 3.65e4), nak(1.17, 179.0), nak(1.16, 413.0), nak(1.23, 6.99e4)]
    }

    #[test]
    fn interference_cdf_examples() {
        let r = SnrDist::rayleigh(1.0).unwrap();
        let v = interference_cdf(-90.0, -90.0, &r).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let d = nak(1.3, 40.0);
        let direct = snr_cdf(crate::db_to_linear(12.0), &d).unwrap();
        assert_eq!(interference_cdf(12.0, 0.0, &d).unwrap(), direct);
        let pr2 = interference_cdf(-90.0, -119.5, &nak(0.98, 489.0)).unwrap();
        assert!(pr2 < 0.9, "{pr2}");
    }

    #[test]
    fn capacity_cdf_examples() {
        for d in id_fits() {
            assert_eq!(capacity_cdf(0.0, &d).unwrap(), 0.0);
        }
        let r = SnrDist::rayleigh(1.0).unwrap();
        assert!((capacity_cdf(1.0, &r).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!(capacity_cdf(7.5, &nak(1.23, 952.0)).unwrap() > 0.1);
        assert!(capacity_cdf(-1.0, &r).is_err());
    }

    #[test]
    fn check_ic_examples() {
        let loose = ConstraintConfig { eps_i_out: 0.999_999, ..Default::default() };
        for d in pr_fits() {
            assert!(check_ic(&d, &loose).unwrap());
        }
        assert!(check_ic(&SnrDist::rayleigh(1e-12).unwrap(), &ConstraintConfig::default()).unwrap());
        let bits: Vec<bool> = pr_fits().iter().map(|d| check_ic(d, &ConstraintConfig::default()).unwrap()).collect();
        assert_eq!(bits, vec![true, false, true, true]);
    }

    #[test]
    fn check_cc_examples() {
        let cfg = ConstraintConfig::default();
        let zero = ConstraintConfig { c_th: 0.0, ..cfg };
        assert!(check_cc(&nak(0.5, 1e-9), &zero).unwrap());
        assert!(check_cc(&nak(1.28, 3.65e4), &cfg).unwrap());
        assert!(!check_cc(&nak(1.16, 413.0), &cfg).unwrap());
    }

    #[test]
    fn ties_pass() {
        // ε set to the computed probability itself
        let d = nak(1.2, 300.0);
        let p = capacity_cdf(7.5, &d).unwrap();
        let cfg = ConstraintConfig { eps_c_out: p, ..Default::default() };
        assert!(check_cc(&d, &cfg).unwrap());
        let q = interference_outage(-90.0, -119.5, &d).unwrap();
        let cfg = ConstraintConfig { eps_i_out: q, ..Default::default() };
        assert!(check_ic(&d, &cfg).unwrap());
    }

    #[test]
    fn decision_matrix_examples() {
        let m = DecisionMatrix::from_bits(vec![true, false, true, true], vec![false, true, true, false, true]).unwrap();
        let expected = [
            [false, false, false, false],
            [true, false, true, true],
            [true, false, true, true],
            [false, false, false, false],
            [true, false, true, true],
        ];
        for (id, row) in expected.iter().enumerate() {
            for (pr, &cell) in row.iter().enumerate() {
                assert_eq!(m.cell(pr, id), cell);
                assert_eq!(m.grid()[pr][id], cell);
            }
        }
        assert_eq!(m.enabled_count(), 9);

        let cfg = ConstraintConfig { c_th: 30.0, ..Default::default() };
        let m = build_decision_matrix(&pr_fits(), &id_fits(), &cfg).unwrap();
        assert!(m.grid().iter().flatten().all(|&b| !b));

        let m = build_decision_matrix(&[nak(1.0, 1.0)], &[nak(1.0, 1e9)], &ConstraintConfig::default()).unwrap();
        assert_eq!(m.grid(), vec![vec![true]]);
        assert!(build_decision_matrix(&[], &id_fits(), &ConstraintConfig::default()).is_err());
    }

    #[test]
    fn sweep_window() {
        let base = ConstraintConfig::default();
        let w = noise_power_sweep(&pr_fits(), &[true, false, true, true], &base, -130.0, -100.0, 0.1).unwrap();
        assert!(!w.is_empty());
        assert!(w.iter().any(|&s| (s - base.noise_power).abs() < 1e-9));
        // contiguous window
        for pair in w.windows(2) {
            assert!((pair[1] - pair[0] - 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ConstraintConfig::new(-90.0, 0.0, 7.5, 0.1, -119.5).is_err());
        assert!(ConstraintConfig::new(-90.0, 0.1, 7.5, 1.0, -119.5).is_err());
        assert!(ConstraintConfig::new(-90.0, 0.1, -1.0, 0.1, -119.5).is_err());
        assert!(ConstraintConfig::new(-90.0, 0.1, 7.5, 0.1, -119.5).is_ok());
    }

    proptest! {
        #[test]
        fn constraint_cdfs_are_changes_of_variable(m in 0.5f64..10.0, g in 0.01f64..1e5, c in 0.0f64..12.0, i in -120.0f64..-60.0, s in -130.0f64..-90.0) {
            let d = nak(m, g);
            let fc = capacity_cdf(c, &d).unwrap();
            prop_assert!((fc - snr_cdf(c.exp2() - 1.0, &d).unwrap()).abs() < 1e-12);
            let fi = interference_cdf(i, s, &d).unwrap();
            let ratio = crate::db_to_linear(i) / crate::db_to_linear(s);
            prop_assert!((fi - snr_cdf(ratio, &d).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn ic_monotone_in_epsilon(m in 0.5f64..5.0, g in 1.0f64..1e4, e1 in 0.001f64..0.999, e2 in 0.001f64..0.999) {
            let d = nak(m, g);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let at = |e| check_ic(&d, &ConstraintConfig { eps_i_out: e, ..Default::default() }).unwrap();
            prop_assert!(!at(lo) || at(hi));
        }

        #[test]
        fn cc_flips_once_in_mean_snr(m in 0.5f64..5.0, c in 0.5f64..10.0, eps in 0.01f64..0.5) {
            let cfg = ConstraintConfig { c_th: c, eps_c_out: eps, ..Default::default() };
            let bits: Vec<bool> = (0..120)
                .map(|k| 10f64.powf(-2.0 + k as f64 * 0.1))
                .map(|g| check_cc(&nak(m, g), &cfg).unwrap())
                .collect();
            let flips = bits.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert!(flips <= 1);
            prop_assert!(!bits[0] || bits.iter().all(|&b| b));
        }

        #[test]
        fn grid_is_outer_and(ic in proptest::collection::vec(any::<bool>(), 1..8), cc in proptest::collection::vec(any::<bool>(), 1..8)) {
            let m = DecisionMatrix::from_bits(ic.clone(), cc.clone()).unwrap();
            let g = m.grid();
            for p in 0..ic.len() {
                for i in 0..cc.len() {
                    prop_assert_eq!(g[p][i], ic[p] && cc[i]);
                }
            }
        }
    }
}
