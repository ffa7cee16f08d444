//! File formats.
//!
//! Inputs:
//!
//! - measurements: `link_id,distance_m,rx_power_dbm`
//! - SNR samples: `snapshot_id,node_id,snr_linear`
//! - fits: `node_id,model,mse,m,gamma_bar,clamped,n_samples` (also an output)
//! - configuration: TOML with dotted keys, see [`FileConfig`]
//!
//! Outputs are CSV. Probabilities are written with 6 significant digits;
//! fitted parameters and samples use the shortest representation that
//! round-trips exactly.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel_models::{ItuRParams, WinnerParams};
use crate::constraints::{ConstraintConfig, ConstraintEval, DecisionMatrix};
use crate::error::{Error, Result};
use crate::estimation::{FadingFit, Measurement};
use crate::fading::{FadingKind, SnrDist};
use crate::scenario::{
    snapshot_label, CampaignConfig, CampaignResult, Geometry, LargeScaleModel, NodeOutcome, Role, SmallScaleModel,
};

pub const MEASUREMENT_HEADER: [&str; 3] = ["link_id", "distance_m", "rx_power_dbm"];
pub const SNR_HEADER: [&str; 3] = ["snapshot_id", "node_id", "snr_linear"];
pub const FITS_HEADER: [&str; 7] = ["node_id", "model", "mse", "m", "gamma_bar", "clamped", "n_samples"];
pub const PROBABILITIES_HEADER: [&str; 8] = ["node_id", "role", "model", "m", "gamma_bar", "cdf", "outage", "pass"];

/// Formats `x` like C's `%g`: 6 significant digits, trailing zeros removed,
/// exponent form below 1e-4 or from 1e6 up.
pub fn fmt_prob(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| s.trim_end_matches('0').trim_end_matches('.').to_string();
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim(mantissa), exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim(&format!("{x:.decimals$}"))
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn open_csv(path: &Path, expected: &[&str]) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    reader_with_header(file, path, expected)
}

fn reader_with_header<R: Read>(input: R, path: &Path, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers().map_err(|e| parse_err(path, 1, e.to_string()))?;
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(parse_err(path, 1, format!("missing header row, expected `{}`", expected.join(","))));
    }
    if header.iter().ne(expected.iter().copied()) {
        return Err(parse_err(
            path,
            1,
            format!(
                "unexpected header `{}`, expected `{}`",
                header.iter().collect::<Vec<_>>().join(","),
                expected.join(",")
            ),
        ));
    }
    Ok(rdr)
}

fn records<'a, R: Read>(
    rdr: &'a mut csv::Reader<R>,
    path: &Path,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + 'a {
    let path = path.to_path_buf();
    rdr.records().map(move |r| {
        let rec = r.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(&path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        Ok((line, rec))
    })
}

fn field_f64(rec: &csv::StringRecord, idx: usize, name: &str, path: &Path, line: u64) -> Result<f64> {
    let raw = rec.get(idx).ok_or_else(|| parse_err(path, line, format!("missing field `{name}`")))?;
    let v: f64 =
        raw.parse().map_err(|_| parse_err(path, line, format!("`{name}`: cannot parse `{raw}` as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("`{name}` must be finite, got `{raw}`")));
    }
    Ok(v)
}

fn field_str<'a>(rec: &'a csv::StringRecord, idx: usize, name: &str, path: &Path, line: u64) -> Result<&'a str> {
    match rec.get(idx) {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(parse_err(path, line, format!("missing field `{name}`"))),
    }
}

/// Reads a measurement CSV. An empty file, a missing header or any
/// malformed row is an error naming the line.
pub fn read_measurements(path: &Path) -> Result<Vec<Measurement>> {
    let mut rdr = open_csv(path, &MEASUREMENT_HEADER)?;
    let mut out = Vec::new();
    for item in records(&mut rdr, path) {
        let (line, rec) = item?;
        let distance = field_f64(&rec, 1, "distance_m", path, line)?;
        if distance <= 0.0 {
            return Err(parse_err(path, line, format!("distance must be positive, got {distance}")));
        }
        out.push(Measurement {
            link_id: field_str(&rec, 0, "link_id", path, line)?.to_string(),
            distance,
            rx_power: field_f64(&rec, 2, "rx_power_dbm", path, line)?,
        });
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no measurement rows"));
    }
    Ok(out)
}

pub fn write_measurements<W: Write>(w: W, ms: &[Measurement]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(MEASUREMENT_HEADER).map_err(csv_err)?;
    for m in ms {
        wtr.write_record([m.link_id.clone(), m.distance.to_string(), m.rx_power.to_string()]).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| csv_err(e.into()))
}

/// SNR samples of one node, pooled over every snapshot it appears in.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSamples {
    pub node_id: String,
    pub samples: Vec<f64>,
}

/// Reads an SNR sample CSV and groups it by `node_id` in order of first
/// appearance. Sample values are not validated beyond being finite numbers;
/// positivity is checked when a node is fitted.
pub fn read_snr_samples(path: &Path) -> Result<Vec<NodeSamples>> {
    let mut rdr = open_csv(path, &SNR_HEADER)?;
    let mut order: Vec<NodeSamples> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for item in records(&mut rdr, path) {
        let (line, rec) = item?;
        field_str(&rec, 0, "snapshot_id", path, line)?;
        let node = field_str(&rec, 1, "node_id", path, line)?;
        let v = field_f64(&rec, 2, "snr_linear", path, line)?;
        let slot = *index.entry(node.to_string()).or_insert_with(|| {
            order.push(NodeSamples { node_id: node.to_string(), samples: Vec::new() });
            order.len() - 1
        });
        order[slot].samples.push(v);
    }
    if order.is_empty() {
        return Err(parse_err(path, 1, "no sample rows"));
    }
    Ok(order)
}

pub fn write_snr_samples<'a, W: Write>(
    w: W,
    rows: impl IntoIterator<Item = (&'a str, &'a str, &'a [f64])>,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SNR_HEADER).map_err(csv_err)?;
    for (snapshot, node, xs) in rows {
        for x in xs {
            wtr.write_record([snapshot, node, &x.to_string()]).map_err(csv_err)?;
        }
    }
    wtr.flush().map_err(|e| csv_err(e.into()))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: PathBuf::from("<output>"), source },
        other => Error::Config(format!("{other:?}")),
    }
}

/// One row of a fits table.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub node_id: String,
    pub fit: FadingFit,
    pub n_samples: usize,
}

pub fn write_fits<W: Write>(w: W, rows: &[FitRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FITS_HEADER).map_err(csv_err)?;
    for r in rows {
        let d = r.fit.dist;
        wtr.write_record([
            r.node_id.clone(),
            d.kind.to_string(),
            r.fit.mse.to_string(),
            d.m.to_string(),
            d.gamma_bar.to_string(),
            u8::from(r.fit.clamped).to_string(),
            r.n_samples.to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| csv_err(e.into()))
}

pub fn read_fits(path: &Path) -> Result<Vec<FitRow>> {
    let mut rdr = open_csv(path, &FITS_HEADER)?;
    let mut out = Vec::new();
    for item in records(&mut rdr, path) {
        let (line, rec) = item?;
        let node_id = field_str(&rec, 0, "node_id", path, line)?.to_string();
        let kind: FadingKind = field_str(&rec, 1, "model", path, line)?
            .parse()
            .map_err(|e: Error| parse_err(path, line, e.to_string()))?;
        let mse = field_f64(&rec, 2, "mse", path, line)?;
        let m = field_f64(&rec, 3, "m", path, line)?;
        let gamma_bar = field_f64(&rec, 4, "gamma_bar", path, line)?;
        let clamped = match field_str(&rec, 5, "clamped", path, line)? {
            "0" | "false" => false,
            "1" | "true" => true,
            other => return Err(parse_err(path, line, format!("`clamped` must be 0 or 1, got `{other}`"))),
        };
        let n_samples = field_str(&rec, 6, "n_samples", path, line)?
            .parse()
            .map_err(|_| parse_err(path, line, "`n_samples` must be a non-negative integer"))?;
        let dist = match kind {
            FadingKind::Rayleigh => SnrDist::rayleigh(gamma_bar),
            FadingKind::Nakagami => SnrDist::nakagami(m, gamma_bar),
        }
        .map_err(|e| parse_err(path, line, e.to_string()))?;
        out.push(FitRow { node_id, fit: FadingFit { dist, mse, clamped }, n_samples });
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no fit rows"));
    }
    Ok(out)
}

/// Role of a node inferred from its id: `PR…` is a primary receiver, `ID…` an
/// indoor device (case-insensitive).
pub fn role_of(node_id: &str) -> Option<Role> {
    let head = node_id.get(..2)?.to_ascii_uppercase();
    match head.as_str() {
        "PR" => Some(Role::Pr),
        "ID" => Some(Role::Id),
        _ => None,
    }
}

/// Writes the AND grid: one row per indoor device, one column per primary
/// receiver, cells `0`/`1`.
pub fn write_decisions<W: Write>(w: W, pr_ids: &[String], id_ids: &[String], matrix: &DecisionMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id\\pr".to_string()];
    header.extend(pr_ids.iter().cloned());
    wtr.write_record(&header).map_err(csv_err)?;
    for (i, id) in id_ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend((0..pr_ids.len()).map(|p| u8::from(matrix.cell(p, i)).to_string()));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| csv_err(e.into()))
}

/// One audit row: which model decided a node, its raw `F_I` or `F_C` value and
/// the outage compared against ε.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRow {
    pub node_id: String,
    pub role: Role,
    pub dist: Option<SnrDist>,
    pub eval: Option<ConstraintEval>,
}

pub fn write_probabilities<W: Write>(w: W, rows: &[ProbabilityRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PROBABILITIES_HEADER).map_err(csv_err)?;
    for r in rows {
        let role = match r.role {
            Role::Pr => "pr",
            Role::Id => "id",
        };
        let (model, m, g) = match r.dist {
            Some(d) => (d.kind.to_string(), d.m.to_string(), d.gamma_bar.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let (cdf, outage, pass) = match r.eval {
            Some(e) => (fmt_prob(e.cdf), fmt_prob(e.outage), u8::from(e.pass).to_string()),
            // a node without a usable fit is disabled
            None => (String::new(), String::new(), "0".to_string()),
        };
        wtr.write_record([r.node_id.clone(), role.to_string(), model, m, g, cdf, outage, pass]).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| csv_err(e.into()))
}

fn fit_rows(nodes: &[NodeOutcome]) -> Vec<FitRow> {
    let mut rows = Vec::new();
    for n in nodes {
        for kind in [FadingKind::Rayleigh, FadingKind::Nakagami] {
            if let Ok(fit) = n.fits.fit(kind) {
                rows.push(FitRow { node_id: n.node_id().to_string(), fit: *fit, n_samples: n.link.samples.len() });
            }
        }
    }
    rows
}

fn probability_rows(nodes: &[NodeOutcome], kind: FadingKind) -> Vec<ProbabilityRow> {
    nodes
        .iter()
        .map(|n| ProbabilityRow {
            node_id: n.node_id().to_string(),
            role: n.link.role,
            dist: n.fits.fit(kind).ok().map(|f| f.dist),
            eval: n.eval,
        })
        .collect()
}

pub const ORACLE_HEADER: [&str; 11] = [
    "snapshot_id",
    "node_id",
    "constraint",
    "snr_threshold",
    "analytic",
    "monte_carlo",
    "std_error",
    "abs_diff",
    "empirical",
    "truth",
    "mc_samples",
];

/// Names of the files written by [`write_campaign`].
pub const CAMPAIGN_FILES: [&str; 4] = ["fits.csv", "probabilities.csv", "decisions.csv", "oracle.csv"];

/// Writes `fits.csv`, `probabilities.csv`, `decisions.csv` and `oracle.csv`
/// (and `samples.csv` when `with_samples`) into `dir`.
pub fn write_campaign(dir: &Path, cfg: &CampaignConfig, result: &CampaignResult, with_samples: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let create = |name: &str| {
        let p = dir.join(name);
        fs::File::create(&p).map(std::io::BufWriter::new).map_err(|source| Error::Io { path: p, source })
    };
    let all: Vec<NodeOutcome> = result.prs.iter().chain(&result.ids).cloned().collect();
    write_fits(create("fits.csv")?, &fit_rows(&all))?;
    write_probabilities(create("probabilities.csv")?, &probability_rows(&all, cfg.decision_model))?;
    let pr_ids: Vec<String> = result.prs.iter().map(|n| n.node_id().to_string()).collect();
    let id_ids: Vec<String> = result.ids.iter().map(|n| n.node_id().to_string()).collect();
    write_decisions(create("decisions.csv")?, &pr_ids, &id_ids, &result.matrix)?;

    let mut wtr = csv::Writer::from_writer(create("oracle.csv")?);
    wtr.write_record(ORACLE_HEADER).map_err(csv_err)?;
    for (p, i) in result.snapshot_indices() {
        let snap = snapshot_label(p, i);
        for (node, constraint) in [(&result.prs[p], "ic"), (&result.ids[i], "cc")] {
            let Some(o) = node.oracle else { continue };
            wtr.write_record([
                snap.clone(),
                node.node_id().to_string(),
                constraint.to_string(),
                o.snr_threshold.to_string(),
                fmt_prob(o.analytic),
                fmt_prob(o.monte_carlo.probability),
                fmt_prob(o.monte_carlo.std_error),
                fmt_prob(o.abs_diff()),
                fmt_prob(o.empirical),
                fmt_prob(o.truth),
                o.monte_carlo.n.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    wtr.flush().map_err(|e| csv_err(e.into()))?;

    if with_samples {
        // each node once, tagged with the first snapshot it appears in
        let rows = result
            .prs
            .iter()
            .enumerate()
            .map(|(p, n)| (snapshot_label(p, 0), n))
            .chain(result.ids.iter().enumerate().map(|(i, n)| (snapshot_label(0, i), n)))
            .collect::<Vec<_>>();
        write_snr_samples(
            create("samples.csv")?,
            rows.iter().map(|(s, n)| (s.as_str(), n.node_id(), n.link.samples.samples())),
        )?;
    }
    Ok(())
}

/// Configuration file contents. Every key is optional here; callers decide
/// what is mandatory.
///
/// ```toml
/// seed = 2014
/// samples_per_snapshot = 5000
/// oracle_samples = 100000
/// p_tx_dbm = 10.0
/// decision_model = "nakagami"
///
/// geometry.cr_pos = [0.0, 0.0]
/// geometry.pr_positions = [[45.0, 30.0], [-20.0, 25.0]]
/// geometry.id_positions = [[22.0, 18.0], [4.0, 5.0]]
/// geometry.wavelength = 0.125
///
/// large_scale.pl_d0 = 44.19
/// large_scale.d0 = 1.0
/// large_scale.mu_n = 3.58
/// large_scale.sigma_n = 1.0
///
/// small_scale.kind = "nakagami"
/// small_scale.m = 1.2
///
/// constraints.i_th_dbm = -90.0
/// constraints.eps_i_out = 0.1
/// constraints.c_th = 7.5
/// constraints.eps_c_out = 0.1
/// constraints.noise_power_dbm = -119.5
///
/// itu_r.f_mhz = 2400.0
/// itu_r.n = 3.0
/// itu_r.l_floors = 0.0
/// winner.f_ghz = 2.4
/// winner.l_w = 5.0
/// winner.n_w = 2.1
/// ```
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples_per_snapshot: Option<usize>,
    pub oracle_samples: Option<usize>,
    pub p_tx_dbm: Option<f64>,
    pub decision_model: Option<String>,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub large_scale: LargeScaleSection,
    #[serde(default)]
    pub small_scale: SmallScaleSection,
    #[serde(default)]
    pub constraints: ConstraintsSection,
    #[serde(default)]
    pub itu_r: ItuRSection,
    #[serde(default)]
    pub winner: WinnerSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub cr_pos: Option<[f64; 2]>,
    pub pr_positions: Option<Vec<[f64; 2]>>,
    pub id_positions: Option<Vec<[f64; 2]>>,
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LargeScaleSection {
    pub pl_d0: Option<f64>,
    pub d0: Option<f64>,
    pub mu_n: Option<f64>,
    pub sigma_n: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SmallScaleSection {
    pub kind: Option<String>,
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsSection {
    pub i_th_dbm: Option<f64>,
    pub eps_i_out: Option<f64>,
    pub c_th: Option<f64>,
    pub eps_c_out: Option<f64>,
    pub noise_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ItuRSection {
    pub f_mhz: Option<f64>,
    pub n: Option<f64>,
    pub l_floors: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WinnerSection {
    pub f_ghz: Option<f64>,
    pub l_w: Option<f64>,
    pub n_w: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1) as u64).unwrap_or(0);
            parse_err(path, line, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, path)
    }

    /// Constraint thresholds. The noise power must be given explicitly; the
    /// other thresholds default to `ConstraintConfig::default()`.
    pub fn constraint_config(&self) -> Result<ConstraintConfig> {
        let c = &self.constraints;
        let noise_power = c.noise_power_dbm.ok_or_else(|| {
            Error::MissingConfig(
                "constraints.noise_power_dbm (noise power at the primary receiver) is required to evaluate \
                 the interference constraint"
                    .into(),
            )
        })?;
        let d = ConstraintConfig::default();
        let cfg = ConstraintConfig {
            i_th: c.i_th_dbm.unwrap_or(d.i_th),
            eps_i_out: c.eps_i_out.unwrap_or(d.eps_i_out),
            c_th: c.c_th.unwrap_or(d.c_th),
            eps_c_out: c.eps_c_out.unwrap_or(d.eps_c_out),
            noise_power,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn decision_model(&self) -> Result<Option<FadingKind>> {
        self.decision_model.as_deref().map(str::parse).transpose().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn itu_r(&self) -> Result<ItuRParams> {
        let d = ItuRParams::default();
        ItuRParams::new(
            self.itu_r.f_mhz.unwrap_or(d.f_mhz),
            self.itu_r.n.unwrap_or(d.n),
            self.itu_r.l_floors.unwrap_or(d.l_floors),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn winner(&self) -> Result<WinnerParams> {
        let d = WinnerParams::default();
        WinnerParams::new(
            self.winner.f_ghz.unwrap_or(d.f_ghz),
            self.winner.l_w.unwrap_or(d.l_w),
            self.winner.n_w.unwrap_or(d.n_w),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// Campaign configuration: keys not given fall back to
    /// [`CampaignConfig::paper_shape`], except the noise power which is
    /// mandatory.
    pub fn campaign_config(&self) -> Result<CampaignConfig> {
        let base = CampaignConfig::paper_shape();
        let g = &self.geometry;
        let pts = |v: &Option<Vec<[f64; 2]>>, dflt: &Vec<(f64, f64)>| {
            v.as_ref().map(|v| v.iter().map(|p| (p[0], p[1])).collect()).unwrap_or_else(|| dflt.clone())
        };
        let geometry = Geometry {
            cr_pos: g.cr_pos.map(|p| (p[0], p[1])).unwrap_or(base.geometry.cr_pos),
            pr_positions: pts(&g.pr_positions, &base.geometry.pr_positions),
            id_positions: pts(&g.id_positions, &base.geometry.id_positions),
            wavelength: g.wavelength.unwrap_or(base.geometry.wavelength),
        };
        let ls = &self.large_scale;
        let large_scale = LargeScaleModel {
            pl_d0: ls.pl_d0.unwrap_or(base.large_scale.pl_d0),
            d0: ls.d0.unwrap_or(base.large_scale.d0),
            exponent_mean: ls.mu_n.unwrap_or(base.large_scale.exponent_mean),
            exponent_sd: ls.sigma_n.unwrap_or(base.large_scale.exponent_sd),
        };
        let kind = match &self.small_scale.kind {
            Some(k) => k.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            None => base.small_scale.kind,
        };
        let m = match kind {
            FadingKind::Rayleigh => 1.0,
            FadingKind::Nakagami => self.small_scale.m.unwrap_or(base.small_scale.m),
        };
        let cfg = CampaignConfig {
            geometry,
            large_scale,
            small_scale: SmallScaleModel { kind, m },
            p_tx: self.p_tx_dbm.unwrap_or(base.p_tx),
            constraints: self.constraint_config()?,
            decision_model: self.decision_model()?.unwrap_or(base.decision_model),
            samples_per_snapshot: self.samples_per_snapshot.unwrap_or(base.samples_per_snapshot),
            oracle_samples: self.oracle_samples.unwrap_or(base.oracle_samples),
            seed: self.seed.unwrap_or(base.seed),
        };
        cfg.validate().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn prob_formatting() {
        assert_eq!(fmt_prob(0.632_120_558_828_557_7), "0.632121");
        assert_eq!(fmt_prob(1.0), "1");
        assert_eq!(fmt_prob(0.0), "0");
        assert_eq!(fmt_prob(0.1), "0.1");
        assert_eq!(fmt_prob(0.000_123_456_78), "0.000123457");
        assert_eq!(fmt_prob(1.321_188_606_689_774e-3), "0.00132119");
        assert_eq!(fmt_prob(7.513_696_942_874_654e-7), "7.5137e-07");
        assert_eq!(fmt_prob(1.524_96e-5), "1.52496e-05");
        assert_eq!(fmt_prob(9.999_999e-5), "0.0001");
        assert_eq!(fmt_prob(123_456_789.0), "1.23457e+08");
        assert_eq!(fmt_prob(0.999_999_96), "1");
    }

    #[test]
    fn measurement_parsing() {
        let f = tmp_file("link_id,distance_m,rx_power_dbm\na,1.5,-40\nb, 10 ,-70.25\n");
        let ms = read_measurements(f.path()).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[1].distance, 10.0);

        let f = tmp_file("link_id,distance_m,rx_power_dbm\na,1.5,-40\nb,x,-70\n");
        match read_measurements(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let f = tmp_file("");
        assert!(matches!(read_measurements(f.path()), Err(Error::Parse { .. })));
        let f = tmp_file("link_id,distance_m,rx_power_dbm\n");
        assert!(matches!(read_measurements(f.path()), Err(Error::Parse { .. })));
        let f = tmp_file("a,b,c\n1,2,3\n");
        assert!(matches!(read_measurements(f.path()), Err(Error::Parse { line: 1, .. })));
        let f = tmp_file("link_id,distance_m,rx_power_dbm\na,1.5\n");
        assert!(matches!(read_measurements(f.path()), Err(Error::Parse { line: 2, .. })));
        let f = tmp_file("link_id,distance_m,rx_power_dbm\na,0,-3\n");
        assert!(matches!(read_measurements(f.path()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn snr_grouping_keeps_first_appearance_order() {
        let f = tmp_file("snapshot_id,node_id,snr_linear\ns1,ID2,1\ns1,PR1,2\ns2,ID2,3\n");
        let g = read_snr_samples(f.path()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].node_id, "ID2");
        assert_eq!(g[0].samples, vec![1.0, 3.0]);
        assert_eq!(g[1].samples, vec![2.0]);
    }

    #[test]
    fn fits_round_trip() {
        let rows = vec![
            FitRow {
                node_id: "PR1".into(),
                fit: FadingFit {
                    dist: SnrDist::nakagami(1.131_234_567_891, 266.000_1).unwrap(),
                    mse: 1.74e-4,
                    clamped: false,
                },
                n_samples: 10,
            },
            FitRow {
                node_id: "ID1".into(),
                fit: FadingFit { dist: SnrDist::rayleigh(952.0).unwrap(), mse: 1.11e-3, clamped: true },
                n_samples: 3,
            },
        ];
        let mut buf = Vec::new();
        write_fits(&mut buf, &rows).unwrap();
        let f = tmp_file(std::str::from_utf8(&buf).unwrap());
        assert_eq!(read_fits(f.path()).unwrap(), rows);
    }

    #[test]
    fn decisions_layout() {
        let m = DecisionMatrix::from_bits(vec![true, false], vec![true, true, false]).unwrap();
        let mut buf = Vec::new();
        let prs = vec!["PR1".to_string(), "PR2".to_string()];
        let ids = vec!["ID1".to_string(), "ID2".to_string(), "ID3".to_string()];
        write_decisions(&mut buf, &prs, &ids, &m).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id\\pr,PR1,PR2\nID1,1,0\nID2,1,0\nID3,0,0\n");
    }

    #[test]
    fn roles_from_ids() {
        assert_eq!(role_of("PR3"), Some(Role::Pr));
        assert_eq!(role_of("id12"), Some(Role::Id));
        assert_eq!(role_of("X"), None);
        assert_eq!(role_of("node"), None);
    }

    #[test]
    fn config_noise_power_is_mandatory() {
        let cfg = FileConfig::parse("constraints.c_th = 7.5\n", Path::new("c.toml")).unwrap();
        assert!(matches!(cfg.constraint_config(), Err(Error::MissingConfig(_))));
        assert!(matches!(cfg.campaign_config(), Err(Error::MissingConfig(_))));
        let cfg = FileConfig::parse("constraints.noise_power_dbm = -119.5\n", Path::new("c.toml")).unwrap();
        assert_eq!(cfg.constraint_config().unwrap(), ConstraintConfig::default());
        assert_eq!(cfg.campaign_config().unwrap(), CampaignConfig::paper_shape());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = FileConfig::parse("x = 1\nconstraints.noise = 2\n", Path::new("c.toml")).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn config_overrides() {
        let text = r#"
seed = 5
samples_per_snapshot = 300
small_scale.kind = "rayleigh"
geometry.pr_positions = [[10.0, 0.0]]
constraints.noise_power_dbm = -110.0
constraints.eps_c_out = 0.2
"#;
        let cfg = FileConfig::parse(text, Path::new("c.toml")).unwrap().campaign_config().unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.samples_per_snapshot, 300);
        assert_eq!(cfg.small_scale, SmallScaleModel { kind: FadingKind::Rayleigh, m: 1.0 });
        assert_eq!(cfg.geometry.pr_positions, vec![(10.0, 0.0)]);
        assert_eq!(cfg.constraints.noise_power, -110.0);
        assert_eq!(cfg.constraints.eps_c_out, 0.2);

        let bad = FileConfig::parse("samples_per_snapshot = 1\nconstraints.noise_power_dbm = -1.0\n", Path::new("c"))
            .unwrap();
        assert!(matches!(bad.campaign_config(), Err(Error::Config(_))));
    }
}
