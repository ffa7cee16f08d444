//! Synthetic deployments and the Monte Carlo oracle.
//!
//! A campaign places one relay, several primary receivers (PRs) and several
//! indoor devices (IDs). For each link the path-loss exponent is drawn once
//! from the shadowing law, the mean SNR follows from the log-distance model
//! and the link budget, and small-scale SNR samples are drawn from the
//! configured fading law. Small movements inside the snapshot region are not
//! simulated geometrically: their only effect is the small-scale law.
//!
//! # Random streams
//!
//! Every link owns a ChaCha8 stream: the generator is seeded with the
//! campaign seed and switched to stream `(role << 32) | node_index`, where
//! `role` is one of the `STREAM_*` tags below. A PR link therefore depends
//! only on `(seed, pr_index)` and an ID link only on `(seed, id_index)`, so
//! snapshots sharing a node share its samples and results do not depend on
//! evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::channel_models::{log_distance_pl, mean_snr_from_budget, LogDistanceParams};
use crate::constraints::{
    capacity_snr_threshold, evaluate_cc, evaluate_ic, interference_ratio, ConstraintConfig, ConstraintEval,
    DecisionMatrix,
};
use crate::error::{domain, Error, Result};
use crate::estimation::{fit_nakagami_mle, fit_rayleigh_mle, FadingFit, SnrSampleSet};
use crate::fading::{sample_snr_with, snr_ccdf, snr_cdf, FadingKind, SnrDist};

const STREAM_PR_LINK: u64 = 1;
const STREAM_ID_LINK: u64 = 2;
const STREAM_PR_ORACLE: u64 = 3;
const STREAM_ID_ORACLE: u64 = 4;

/// Rejection cap when drawing a positive path-loss exponent.
const MAX_EXPONENT_DRAWS: usize = 1000;

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub cr_pos: Point,
    pub pr_positions: Vec<Point>,
    pub id_positions: Vec<Point>,
    /// Carrier wavelength, meters. Documents the snapshot scales only.
    pub wavelength: f64,
}

impl Geometry {
    pub const DEFAULT_WAVELENGTH: f64 = 0.125;

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::Config(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if self.pr_positions.is_empty() || self.id_positions.is_empty() {
            return Err(Error::Config("geometry needs at least one PR and one ID position".into()));
        }
        let all = self.pr_positions.iter().chain(&self.id_positions);
        for &p in all {
            let d = distance(self.cr_pos, p);
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("node at {p:?} coincides with the relay or is not finite")));
            }
        }
        Ok(())
    }

    /// Radius of the snapshot region, `10 λ`.
    pub fn snapshot_radius(&self) -> f64 {
        10.0 * self.wavelength
    }

    pub fn pr_distance(&self, pr: usize) -> f64 {
        distance(self.cr_pos, self.pr_positions[pr])
    }

    pub fn id_distance(&self, id: usize) -> f64 {
        distance(self.cr_pos, self.id_positions[id])
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Mean path loss with a normally distributed exponent.
///
/// Both indoor-indoor and indoor-outdoor links use the same parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScaleModel {
    pub pl_d0: f64,
    pub d0: f64,
    pub exponent_mean: f64,
    /// Zero draws the mean exponent every time.
    pub exponent_sd: f64,
}

impl LargeScaleModel {
    pub fn validate(&self) -> Result<()> {
        LogDistanceParams::new(self.pl_d0, self.d0, self.exponent_mean)?;
        if !(self.exponent_sd >= 0.0 && self.exponent_sd.is_finite()) {
            return Err(Error::Config(format!("exponent sd must be non-negative, got {}", self.exponent_sd)));
        }
        Ok(())
    }

    fn draw_exponent<R: Rng>(&self, rng: &mut R) -> Result<f64> {
        if self.exponent_sd == 0.0 {
            return Ok(self.exponent_mean);
        }
        let law = Normal::new(self.exponent_mean, self.exponent_sd).map_err(|e| domain(e.to_string()))?;
        // truncate to positive exponents
        for _ in 0..MAX_EXPONENT_DRAWS {
            let n = law.sample(rng);
            if n > 0.0 {
                return Ok(n);
            }
        }
        Err(Error::NonConvergence { routine: "positive exponent draw", iterations: MAX_EXPONENT_DRAWS })
    }
}

impl Default for LargeScaleModel {
    /// Indoor fit: PL(d0) = 44.19 dB at 1 m, exponent N(3.58, 1.00).
    fn default() -> Self {
        Self { pl_d0: 44.19, d0: 1.0, exponent_mean: 3.58, exponent_sd: 1.0 }
    }
}

/// True small-scale law used to generate samples. The mean SNR comes from
/// the link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallScaleModel {
    pub kind: FadingKind,
    pub m: f64,
}

impl SmallScaleModel {
    pub fn dist(&self, gamma_bar: f64) -> Result<SnrDist> {
        match self.kind {
            FadingKind::Rayleigh => SnrDist::rayleigh(gamma_bar),
            FadingKind::Nakagami => SnrDist::nakagami(self.m, gamma_bar),
        }
    }
}

impl Default for SmallScaleModel {
    fn default() -> Self {
        Self { kind: FadingKind::Nakagami, m: 1.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub geometry: Geometry,
    pub large_scale: LargeScaleModel,
    pub small_scale: SmallScaleModel,
    /// Transmit power of every node, dBm.
    pub p_tx: f64,
    /// Thresholds; `noise_power` is also the receiver noise of every link.
    pub constraints: ConstraintConfig,
    /// Model whose fit drives the decisions.
    pub decision_model: FadingKind,
    pub samples_per_snapshot: usize,
    /// Monte Carlo draws per node for the oracle report.
    pub oracle_samples: usize,
    pub seed: u64,
}

impl CampaignConfig {
    pub const DEFAULT_SAMPLES_PER_SNAPSHOT: usize = 5000;
    pub const DEFAULT_ORACLE_SAMPLES: usize = 100_000;

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.large_scale.validate()?;
        self.small_scale.dist(1.0)?;
        self.constraints.validate()?;
        if !self.p_tx.is_finite() {
            return Err(Error::Config("transmit power must be finite".into()));
        }
        if self.samples_per_snapshot < SnrSampleSet::MIN_LEN {
            return Err(Error::Config(format!(
                "samples_per_snapshot must be at least {}, got {}",
                SnrSampleSet::MIN_LEN,
                self.samples_per_snapshot
            )));
        }
        if self.oracle_samples < MIN_MC_SAMPLES {
            return Err(Error::Config(format!(
                "oracle_samples must be at least {MIN_MC_SAMPLES}, got {}",
                self.oracle_samples
            )));
        }
        Ok(())
    }

    /// Illustrative 4 PR × 5 ID layout: relay at the origin, PRs outdoors
    /// 30–80 m away, IDs on the same floor 6–35 m away. Positions are made up;
    /// only the counts mirror the reference campaign.
    pub fn paper_shape() -> Self {
        Self {
            geometry: Geometry {
                cr_pos: (0.0, 0.0),
                pr_positions: vec![(45.0, 30.0), (-20.0, 25.0), (60.0, -50.0), (-55.0, -40.0)],
                id_positions: vec![(22.0, 18.0), (4.0, 5.0), (-9.0, 8.0), (15.0, -25.0), (-3.0, -6.0)],
                wavelength: Geometry::DEFAULT_WAVELENGTH,
            },
            large_scale: LargeScaleModel::default(),
            small_scale: SmallScaleModel::default(),
            p_tx: 10.0,
            constraints: ConstraintConfig::default(),
            decision_model: FadingKind::Nakagami,
            samples_per_snapshot: Self::DEFAULT_SAMPLES_PER_SNAPSHOT,
            oracle_samples: Self::DEFAULT_ORACLE_SAMPLES,
            seed: 2014,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Pr,
    Id,
}

impl Role {
    pub fn label(self, index: usize) -> String {
        match self {
            Role::Pr => format!("PR{}", index + 1),
            Role::Id => format!("ID{}", index + 1),
        }
    }
}

fn stream_rng(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 32) | index as u64);
    rng
}

/// One relay-to-node link as drawn for a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraw {
    pub role: Role,
    pub index: usize,
    pub distance: f64,
    /// Path-loss exponent drawn for this link.
    pub exponent: f64,
    /// Mean path loss at the link distance, dB.
    pub mean_pl: f64,
    /// Generating distribution; its mean is the budget SNR.
    pub true_dist: SnrDist,
    pub samples: SnrSampleSet,
}

/// Draws one link deterministically from `(cfg.seed, role, index)`.
pub fn draw_link(cfg: &CampaignConfig, role: Role, index: usize) -> Result<LinkDraw> {
    let (count, tag) = match role {
        Role::Pr => (cfg.geometry.pr_positions.len(), STREAM_PR_LINK),
        Role::Id => (cfg.geometry.id_positions.len(), STREAM_ID_LINK),
    };
    if index >= count {
        return Err(domain(format!("{role:?} index {index} out of range (have {count})")));
    }
    let distance = match role {
        Role::Pr => cfg.geometry.pr_distance(index),
        Role::Id => cfg.geometry.id_distance(index),
    };
    let mut rng = stream_rng(cfg.seed, tag, index);
    let exponent = cfg.large_scale.draw_exponent(&mut rng)?;
    let ls = LogDistanceParams::new(cfg.large_scale.pl_d0, cfg.large_scale.d0, exponent)?;
    let mean_pl = log_distance_pl(&ls, distance)?;
    let gamma_bar = mean_snr_from_budget(cfg.p_tx, mean_pl, cfg.constraints.noise_power)?;
    let true_dist = cfg.small_scale.dist(gamma_bar)?;
    let samples = sample_snr_with(&true_dist, cfg.samples_per_snapshot, &mut rng)?;
    Ok(LinkDraw {
        role,
        index,
        distance,
        exponent,
        mean_pl,
        true_dist,
        samples: SnrSampleSet::new(role.label(index), samples)?,
    })
}

/// One PR/ID spatial configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub pr_index: usize,
    pub id_index: usize,
    pub pr_link: LinkDraw,
    pub id_link: LinkDraw,
}

impl Snapshot {
    pub fn id(&self) -> String {
        snapshot_label(self.pr_index, self.id_index)
    }

    pub fn pr_samples(&self) -> &SnrSampleSet {
        &self.pr_link.samples
    }

    pub fn id_samples(&self) -> &SnrSampleSet {
        &self.id_link.samples
    }
}

pub fn snapshot_label(pr_index: usize, id_index: usize) -> String {
    format!("{}-{}", Role::Pr.label(pr_index), Role::Id.label(id_index))
}

pub fn generate_snapshot(cfg: &CampaignConfig, pr_index: usize, id_index: usize) -> Result<Snapshot> {
    cfg.validate()?;
    Ok(Snapshot {
        pr_index,
        id_index,
        pr_link: draw_link(cfg, Role::Pr, pr_index)?,
        id_link: draw_link(cfg, Role::Id, id_index)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `P(γ ≤ t)`
    Lower,
    /// `P(γ > t)`
    Upper,
}

/// Minimum Monte Carlo sample size.
pub const MIN_MC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub probability: f64,
    /// Binomial standard error `sqrt(p (1 − p) / n)`.
    pub std_error: f64,
    /// Samples falling in the requested tail.
    pub hits: usize,
    pub n: usize,
}

impl McEstimate {
    fn from_hits(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self { probability: p, std_error: (p * (1.0 - p) / n as f64).sqrt(), hits, n }
    }
}

/// Fraction of `n` samples from `d` in the requested tail of `threshold`.
pub fn monte_carlo_probability(d: &SnrDist, threshold: f64, tail: Tail, n: usize, seed: u64) -> Result<McEstimate> {
    Ok(monte_carlo_probabilities(d, &[(threshold, tail)], n, seed)?[0])
}

/// Like [`monte_carlo_probability`] for several thresholds, reusing one set of
/// `n` draws.
pub fn monte_carlo_probabilities(d: &SnrDist, queries: &[(f64, Tail)], n: usize, seed: u64) -> Result<Vec<McEstimate>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    monte_carlo_with(d, queries, n, &mut rng)
}

fn monte_carlo_with<R: Rng>(d: &SnrDist, queries: &[(f64, Tail)], n: usize, rng: &mut R) -> Result<Vec<McEstimate>> {
    if n < MIN_MC_SAMPLES {
        return Err(domain(format!("Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n}")));
    }
    let mut xs = sample_snr_with(d, n, rng)?;
    xs.sort_by(f64::total_cmp);
    Ok(queries
        .iter()
        .map(|&(t, tail)| {
            let below = xs.partition_point(|&x| x <= t);
            let hits = match tail {
                Tail::Lower => below,
                Tail::Upper => n - below,
            };
            McEstimate::from_hits(hits, n)
        })
        .collect())
}

/// Both fits of one node. Fit failures are kept as messages so one bad node
/// does not abort the campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFits {
    pub node_id: String,
    pub rayleigh: std::result::Result<FadingFit, String>,
    pub nakagami: std::result::Result<FadingFit, String>,
}

impl NodeFits {
    pub fn fit(&self, kind: FadingKind) -> std::result::Result<&FadingFit, &str> {
        let r = match kind {
            FadingKind::Rayleigh => &self.rayleigh,
            FadingKind::Nakagami => &self.nakagami,
        };
        r.as_ref().map_err(String::as_str)
    }
}

pub fn fit_node(s: &SnrSampleSet) -> NodeFits {
    NodeFits {
        node_id: s.node_id.clone(),
        rayleigh: fit_rayleigh_mle(s).map_err(|e| e.to_string()),
        nakagami: fit_nakagami_mle(s).map_err(|e| e.to_string()),
    }
}

/// Analytical vs Monte Carlo outage probability of one node's constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    /// SNR threshold the constraint reduces to.
    pub snr_threshold: f64,
    /// Outage from the fitted model, analytically.
    pub analytic: f64,
    /// Outage from Monte Carlo draws of the fitted model.
    pub monte_carlo: McEstimate,
    /// Outage fraction in the node's own samples.
    pub empirical: f64,
    /// Outage under the generating model, analytically.
    pub truth: f64,
}

impl OracleCheck {
    pub fn abs_diff(&self) -> f64 {
        (self.analytic - self.monte_carlo.probability).abs()
    }
}

/// Everything known about one node after a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeOutcome {
    pub link: LinkDraw,
    pub fits: NodeFits,
    /// Constraint evaluation with the decision model; `None` when its fit failed.
    pub eval: Option<ConstraintEval>,
    pub oracle: Option<OracleCheck>,
}

impl NodeOutcome {
    pub fn node_id(&self) -> &str {
        &self.fits.node_id
    }

    pub fn passes(&self) -> bool {
        self.eval.map(|e| e.pass).unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub prs: Vec<NodeOutcome>,
    pub ids: Vec<NodeOutcome>,
    pub matrix: DecisionMatrix,
}

impl CampaignResult {
    /// Snapshots in `(pr, id)` row-major order.
    pub fn snapshot_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ids = self.ids.len();
        (0..self.prs.len()).flat_map(move |p| (0..ids).map(move |i| (p, i)))
    }

    /// Node ids whose fits failed, with the reason.
    pub fn failures(&self) -> Vec<(String, String)> {
        self.prs
            .iter()
            .chain(&self.ids)
            .flat_map(|n| {
                [&n.fits.rayleigh, &n.fits.nakagami]
                    .into_iter()
                    .filter_map(|r| r.as_ref().err())
                    .map(|e| (n.node_id().to_string(), e.clone()))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

fn node_outcome(cfg: &CampaignConfig, role: Role, index: usize) -> Result<NodeOutcome> {
    let link = draw_link(cfg, role, index)?;
    let fits = fit_node(&link.samples);
    let (threshold, tail, oracle_tag) = match role {
        Role::Pr => {
            (interference_ratio(cfg.constraints.i_th, cfg.constraints.noise_power), Tail::Upper, STREAM_PR_ORACLE)
        }
        Role::Id => (capacity_snr_threshold(cfg.constraints.c_th), Tail::Lower, STREAM_ID_ORACLE),
    };
    let outage = |d: &SnrDist| match tail {
        Tail::Upper => snr_ccdf(threshold, d),
        Tail::Lower => snr_cdf(threshold, d),
    };
    let (eval, oracle) = match fits.fit(cfg.decision_model) {
        Ok(fit) => {
            let eval = match role {
                Role::Pr => evaluate_ic(&fit.dist, &cfg.constraints)?,
                Role::Id => evaluate_cc(&fit.dist, &cfg.constraints)?,
            };
            let mut rng = stream_rng(cfg.seed, oracle_tag, index);
            let mc = monte_carlo_with(&fit.dist, &[(threshold, tail)], cfg.oracle_samples, &mut rng)?[0];
            let below = link.samples.samples().iter().filter(|&&x| x <= threshold).count();
            let n = link.samples.len();
            let empirical = match tail {
                Tail::Lower => below as f64 / n as f64,
                Tail::Upper => (n - below) as f64 / n as f64,
            };
            let check = OracleCheck {
                snr_threshold: threshold,
                analytic: eval.outage,
                monte_carlo: mc,
                empirical,
                truth: outage(&link.true_dist)?,
            };
            (Some(eval), Some(check))
        }
        Err(_) => (None, None),
    };
    Ok(NodeOutcome { link, fits, eval, oracle })
}

/// Runs a full campaign on the global rayon pool.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let n_pr = cfg.geometry.pr_positions.len();
    let n_id = cfg.geometry.id_positions.len();
    let jobs: Vec<(Role, usize)> = (0..n_pr).map(|i| (Role::Pr, i)).chain((0..n_id).map(|i| (Role::Id, i))).collect();
    // collect() on an indexed parallel iterator preserves input order
    let mut outcomes = jobs.into_par_iter().map(|(role, i)| node_outcome(cfg, role, i)).collect::<Result<Vec<_>>>()?;
    let ids = outcomes.split_off(n_pr);
    let prs = outcomes;
    let matrix = DecisionMatrix::from_bits(
        prs.iter().map(NodeOutcome::passes).collect(),
        ids.iter().map(NodeOutcome::passes).collect(),
    )?;
    Ok(CampaignResult { prs, ids, matrix })
}

/// Runs a campaign on a dedicated pool of `threads` workers.
pub fn run_campaign_with_threads(cfg: &CampaignConfig, threads: usize) -> Result<CampaignResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_campaign(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed_cfg() -> CampaignConfig {
        let mut cfg = CampaignConfig::paper_shape();
        cfg.large_scale = LargeScaleModel { pl_d0: 44.19, d0: 1.0, exponent_mean: 3.46, exponent_sd: 0.0 };
        cfg.p_tx = 10.0;
        cfg.constraints.noise_power = -100.0;
        cfg
    }

    #[test]
    fn deterministic_mean_snr_chain() {
        let mut cfg = fixed_cfg();
        cfg.geometry.id_positions[0] = (6.0, 8.0);
        let link = draw_link(&cfg, Role::Id, 0).unwrap();
        assert_eq!(link.exponent, 3.46);
        assert!((link.mean_pl - 78.79).abs() < 1e-12);
        let want = 10f64.powf((10.0 - 78.79 + 100.0) / 10.0);
        assert!((link.true_dist.gamma_bar / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_sample_mean_tracks_budget() {
        let mut cfg = fixed_cfg();
        cfg.small_scale = SmallScaleModel { kind: FadingKind::Rayleigh, m: 1.0 };
        cfg.samples_per_snapshot = 1_000_000;
        let s = generate_snapshot(&cfg, 0, 0).unwrap();
        let xs = s.id_samples().samples();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean / s.id_link.true_dist.gamma_bar - 1.0).abs() < 0.01);
    }

    #[test]
    fn snapshots_are_reproducible() {
        let cfg = CampaignConfig::paper_shape();
        let a = generate_snapshot(&cfg, 2, 3).unwrap();
        let b = generate_snapshot(&cfg, 2, 3).unwrap();
        assert_eq!(a, b);
        // a PR link does not depend on which ID it is paired with
        let c = generate_snapshot(&cfg, 2, 0).unwrap();
        assert_eq!(a.pr_link, c.pr_link);
        assert_ne!(a.id_link.samples, c.id_link.samples);
        assert_eq!(a.id(), "PR3-ID4");
    }

    #[test]
    fn snapshot_rejects_bad_indices() {
        let cfg = CampaignConfig::paper_shape();
        assert!(generate_snapshot(&cfg, 4, 0).is_err());
        assert!(generate_snapshot(&cfg, 0, 5).is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        let d = SnrDist::rayleigh(2.0).unwrap();
        let est = monte_carlo_probability(&d, 2.0, Tail::Lower, 1_000_000, 7).unwrap();
        assert!((est.probability - 0.6321).abs() < 0.002);
        assert!(est.std_error > 0.0 && est.std_error < 1e-3);
        let zero = monte_carlo_probability(&d, 0.0, Tail::Lower, 10_000, 7).unwrap();
        assert_eq!(zero.probability, 0.0);
        let both = monte_carlo_probabilities(&d, &[(1.3, Tail::Lower), (1.3, Tail::Upper)], 10_000, 9).unwrap();
        assert_eq!(both[0].hits + both[1].hits, 10_000);
        assert!((both[0].probability + both[1].probability - 1.0).abs() <= f64::EPSILON);
        assert!(monte_carlo_probability(&d, 1.0, Tail::Lower, 9_999, 1).is_err());
    }

    #[test]
    fn campaign_layout() {
        let r = run_campaign(&CampaignConfig::paper_shape()).unwrap();
        assert_eq!((r.matrix.num_pr(), r.matrix.num_id()), (4, 5));
        assert_eq!(r.snapshot_indices().count(), 20);
        assert!(r.failures().is_empty());
        assert_eq!(r.prs[1].node_id(), "PR2");
        assert_eq!(r.ids[4].node_id(), "ID5");
    }

    #[test]
    fn campaign_matches_snapshot_generation() {
        let cfg = CampaignConfig::paper_shape();
        let r = run_campaign(&cfg).unwrap();
        let s = generate_snapshot(&cfg, 3, 1).unwrap();
        assert_eq!(r.prs[3].link, s.pr_link);
        assert_eq!(r.ids[1].link, s.id_link);
    }

    #[test]
    fn out_of_coverage_ids_all_disabled() {
        let mut cfg = CampaignConfig::paper_shape();
        cfg.large_scale.exponent_sd = 0.0;
        cfg.geometry.id_positions = vec![(1e6, 0.0); 5];
        let r = run_campaign(&cfg).unwrap();
        assert!(r.matrix.cc_bits().iter().all(|&b| !b));
        assert!(r.matrix.grid().iter().flatten().all(|&b| !b));
    }

    #[test]
    fn campaign_independent_of_thread_count() {
        let cfg = CampaignConfig::paper_shape();
        let a = run_campaign_with_threads(&cfg, 1).unwrap();
        let b = run_campaign_with_threads(&cfg, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let mut cfg = CampaignConfig::paper_shape();
        cfg.samples_per_snapshot = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = CampaignConfig::paper_shape();
        cfg.geometry.pr_positions[0] = cfg.geometry.cr_pos;
        assert!(cfg.validate().is_err());
        let mut cfg = CampaignConfig::paper_shape();
        cfg.oracle_samples = 10;
        assert!(cfg.validate().is_err());
    }
}
