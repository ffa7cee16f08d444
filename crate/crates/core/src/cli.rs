//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 estimation degeneracy,
//! 4 incomplete configuration.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel_models::{itu_r_pl, log_distance_pl, winner2_pl, LogDistanceParams};
use crate::constraints::{
    capacity_cdf, check_cc, check_ic, evaluate_cc, evaluate_ic, interference_cdf, interference_outage,
    ConstraintConfig, DecisionMatrix,
};
use crate::error::Error;
use crate::estimation::{
    empirical_cdf, fit_log_distance_lse, fit_nakagami_mle, fit_normal_mle, fit_rayleigh_mle, shadowing_exponents,
    EmpiricalCdf, SnrSampleSet,
};
use crate::fading::{normal_cdf, snr_cdf, FadingKind, SnrDist};
use crate::io::{self, fmt_prob, FileConfig, FitRow, ProbabilityRow};
use crate::scenario::{run_campaign, run_campaign_with_threads, CampaignConfig, Role};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_INCOMPLETE_CONFIG: u8 = 4;

/// Maps an error to the stable exit-code contract.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Degenerate(_) | Error::NonConvergence { .. } => EXIT_DEGENERATE,
        Error::MissingConfig(_) => EXIT_INCOMPLETE_CONFIG,
        Error::Domain(_) | Error::Parse { .. } | Error::Config(_) | Error::Io { .. } => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "cogrelay", version, about = "Underlay spectrum-access decisions for a cognitive relay")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Rayleigh,
    Nakagami,
}

impl From<ModelArg> for FadingKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Rayleigh => FadingKind::Rayleigh,
            ModelArg::Nakagami => FadingKind::Nakagami,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    PaperShape,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares log-distance fit, shadowing fit and ITU-R / WINNER II overlay.
    FitPathloss {
        /// CSV with header `link_id,distance_m,rx_power_dbm`.
        #[arg(long)]
        measurements: PathBuf,
        /// Config file (p_tx_dbm, large_scale.d0, itu_r.*, winner.*).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Rayleigh and Nakagami-m maximum-likelihood fits per node.
    FitFading {
        /// CSV with header `snapshot_id,node_id,snr_linear`.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Evaluate both constraints for one distribution or every row of a fits file.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Build the AND-rule decision matrix from a fits file.
    Decide {
        #[arg(long)]
        fits: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a synthetic campaign and write fits, probabilities, decisions and oracle report.
    Simulate {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Worker threads; 0 uses the default pool.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also write the generated SNR samples to samples.csv.
        #[arg(long)]
        dump_samples: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Tabulate an analytical SNR CDF, optionally next to an empirical one.
    ExportCdf {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        /// Number of intervals; the grid has `steps + 1` points including both ends.
        #[arg(long)]
        steps: usize,
        /// SNR sample CSV for the empirical column (requires --node).
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// A distribution given either inline or as a node of a fits file.
#[derive(Debug, Args)]
pub struct DistArgs {
    /// Fading model; with --fits, selects which row to use (default nakagami).
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long)]
    pub gamma_bar: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, conflicts_with_all = ["gamma_bar", "m"])]
    pub fits: Option<PathBuf>,
    /// Node to take from --fits (or from --samples).
    #[arg(long)]
    pub node: Option<String>,
}

impl DistArgs {
    fn kind(&self) -> FadingKind {
        self.model.map(Into::into).unwrap_or(FadingKind::Nakagami)
    }

    fn inline(&self) -> Result<SnrDist, Error> {
        let g = self.gamma_bar.ok_or_else(|| Error::Config("--gamma-bar is required without --fits".into()))?;
        match self.kind() {
            FadingKind::Rayleigh => SnrDist::rayleigh(g),
            FadingKind::Nakagami => {
                SnrDist::nakagami(self.m.ok_or_else(|| Error::Config("--m is required for nakagami".into()))?, g)
            }
        }
    }

    /// Every selected `(node_id, dist)`.
    fn resolve(&self) -> Result<Vec<(String, SnrDist)>, Error> {
        let Some(path) = &self.fits else {
            return Ok(vec![(self.node.clone().unwrap_or_else(|| "inline".into()), self.inline()?)]);
        };
        let kind = self.kind();
        let rows: Vec<_> = io::read_fits(path)?
            .into_iter()
            .filter(|r| r.fit.dist.kind == kind)
            .filter(|r| self.node.as_ref().is_none_or(|n| &r.node_id == n))
            .map(|r| (r.node_id, r.fit.dist))
            .collect();
        if rows.is_empty() {
            return Err(Error::Config(format!("{}: no {kind} fit matches the selection", path.display())));
        }
        Ok(rows)
    }
}

/// Parses `args` and runs the selected subcommand.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>, Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let p = dir.join(name);
    fs::File::create(&p).map(BufWriter::new).map_err(|source| Error::Io { path: p, source })
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Error> {
    path.map(FileConfig::load).transpose().map(Option::unwrap_or_default)
}

pub fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::FitPathloss { measurements, config, out_dir } => {
            fit_pathloss(&measurements, config.as_deref(), &out_dir)
        }
        Command::FitFading { samples, out_dir } => fit_fading(&samples, &out_dir),
        Command::Eval { config, dist } => eval(&config, &dist),
        Command::Decide { fits, config, model, out_dir } => decide(&fits, &config, model.map(Into::into), &out_dir),
        Command::Simulate { config, preset, seed, model, threads, dump_samples, out_dir } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => FileConfig::load(&path)?.campaign_config()?,
                (None, Some(Preset::PaperShape)) | (None, None) => CampaignConfig::paper_shape(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = model {
                cfg.decision_model = m.into();
            }
            simulate(&cfg, threads, dump_samples, &out_dir)
        }
        Command::ExportCdf { dist, min, max, steps, samples, out_dir } => {
            export_cdf(&dist, min, max, steps, samples.as_deref(), &out_dir)
        }
    }
}

fn fit_pathloss(measurements: &Path, config: Option<&Path>, out_dir: &Path) -> Result<u8, Error> {
    let cfg = load_config(config)?;
    let ms = io::read_measurements(measurements)?;
    let p_tx = cfg.p_tx_dbm.unwrap_or(10.0);
    let d0 = cfg.large_scale.d0.unwrap_or(LogDistanceParams::DEFAULT_D0);
    let itu = cfg.itu_r()?;
    let winner = cfg.winner()?;
    let fit = fit_log_distance_lse(&ms, p_tx, d0)?;

    let exponents = shadowing_exponents(&ms, p_tx, &fit.params);
    let shadowing = match fit_normal_mle(&exponents) {
        Ok(p) => {
            let mse = EmpiricalCdf::from_values(&exponents).mse_against(|x| normal_cdf(x, &p))?;
            Some((p, mse))
        }
        Err(e) => {
            eprintln!("warning: shadowing fit skipped: {e}");
            None
        }
    };

    let path = out_dir.join("pathloss_fit.csv");
    let mut w = create(out_dir, "pathloss_fit.csv")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let lines = [
        ("pl_d0_db", fit.params.pl_d0.to_string()),
        ("d0_m", fit.params.d0.to_string()),
        ("n", fit.params.n.to_string()),
        ("sigma_pl_db", fit.sigma_pl.to_string()),
        ("shadow_mu_n", opt(shadowing.map(|s| s.0.mu))),
        ("shadow_sigma_n", opt(shadowing.map(|s| s.0.sigma))),
        ("shadow_mse", opt(shadowing.map(|s| s.1))),
        ("n_points", ms.len().to_string()),
    ];
    writeln!(w, "parameter,value").map_err(write_err(&path))?;
    for (k, v) in lines {
        writeln!(w, "{k},{v}").map_err(write_err(&path))?;
    }
    w.flush().map_err(write_err(&path))?;

    let path = out_dir.join("pathloss_predictions.csv");
    let mut w = create(out_dir, "pathloss_predictions.csv")?;
    writeln!(w, "link_id,distance_m,measured_pl_db,log_distance_db,itu_r_db,winner2_db").map_err(write_err(&path))?;
    for m in &ms {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            m.link_id,
            m.distance,
            p_tx - m.rx_power,
            log_distance_pl(&fit.params, m.distance)?,
            itu_r_pl(&itu, m.distance)?,
            winner2_pl(&winner, m.distance)?
        )
        .map_err(write_err(&path))?;
    }
    w.flush().map_err(write_err(&path))?;

    println!(
        "log-distance: PL(d0)={:.2} dB, n={:.3}, sigma_PL={:.2} dB over {} points",
        fit.params.pl_d0,
        fit.params.n,
        fit.sigma_pl,
        ms.len()
    );
    if let Some((p, mse)) = shadowing {
        println!("shadowing: N({:.3}, {:.3}), MSE={}", p.mu, p.sigma, fmt_prob(mse));
    }
    Ok(EXIT_OK)
}

fn fit_fading(samples: &Path, out_dir: &Path) -> Result<u8, Error> {
    let nodes = io::read_snr_samples(samples)?;
    let mut rows = Vec::new();
    let mut failed = false;
    for node in nodes {
        let n = node.samples.len();
        let fitted = SnrSampleSet::new(node.node_id.clone(), node.samples)
            .and_then(|s| Ok((fit_rayleigh_mle(&s)?, fit_nakagami_mle(&s)?)));
        match fitted {
            Ok((r, k)) => {
                if k.clamped {
                    eprintln!("warning: node {}: Nakagami m clamped to {}", node.node_id, SnrDist::MIN_M);
                }
                rows.push(FitRow { node_id: node.node_id.clone(), fit: r, n_samples: n });
                rows.push(FitRow { node_id: node.node_id, fit: k, n_samples: n });
            }
            Err(e) => {
                eprintln!("error: node {}: {e}", node.node_id);
                failed = true;
            }
        }
    }
    io::write_fits(create(out_dir, "fits.csv")?, &rows)?;
    Ok(if failed { EXIT_DEGENERATE } else { EXIT_OK })
}

fn eval(config: &Path, dist: &DistArgs) -> Result<u8, Error> {
    let cfg = FileConfig::load(config)?.constraint_config()?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    let path = Path::new("<stdout>");
    writeln!(w, "node_id,model,m,gamma_bar,f_i,interference_outage,ic,f_c,cc").map_err(write_err(path))?;
    for (node, d) in dist.resolve()? {
        writeln!(
            w,
            "{node},{},{},{},{},{},{},{},{}",
            d.kind,
            d.m,
            d.gamma_bar,
            fmt_prob(interference_cdf(cfg.i_th, cfg.noise_power, &d)?),
            fmt_prob(interference_outage(cfg.i_th, cfg.noise_power, &d)?),
            u8::from(check_ic(&d, &cfg)?),
            fmt_prob(capacity_cdf(cfg.c_th, &d)?),
            u8::from(check_cc(&d, &cfg)?),
        )
        .map_err(write_err(path))?;
    }
    Ok(EXIT_OK)
}

/// `(node_id, law)` pairs in file order.
pub type NodeLaws = Vec<(String, SnrDist)>;

/// Splits fits into PR and ID lists (in file order) for one model.
pub fn select_nodes(rows: &[FitRow], kind: FadingKind) -> Result<(NodeLaws, NodeLaws), Error> {
    let mut prs = Vec::new();
    let mut ids = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for r in rows {
        let role = io::role_of(&r.node_id)
            .ok_or_else(|| Error::Config(format!("node `{}`: id must start with PR or ID", r.node_id)))?;
        seen.insert(r.node_id.clone());
        if r.fit.dist.kind != kind {
            continue;
        }
        match role {
            Role::Pr => prs.push((r.node_id.clone(), r.fit.dist)),
            Role::Id => ids.push((r.node_id.clone(), r.fit.dist)),
        }
    }
    let have: std::collections::HashSet<_> = prs.iter().chain(&ids).map(|(n, _)| n.clone()).collect();
    if let Some(missing) = rows.iter().map(|r| &r.node_id).find(|n| !have.contains(*n)) {
        return Err(Error::Config(format!("node `{missing}` has no {kind} fit")));
    }
    if prs.is_empty() || ids.is_empty() {
        return Err(Error::Config("fits must include at least one PR and one ID node".into()));
    }
    Ok((prs, ids))
}

fn decide(fits: &Path, config: &Path, model: Option<FadingKind>, out_dir: &Path) -> Result<u8, Error> {
    let file_cfg = FileConfig::load(config)?;
    let cfg = file_cfg.constraint_config()?;
    let kind = model.or(file_cfg.decision_model()?).unwrap_or(FadingKind::Nakagami);
    let rows = io::read_fits(fits)?;
    let (prs, ids) = select_nodes(&rows, kind)?;
    write_decision_outputs(&prs, &ids, &cfg, out_dir)
}

fn write_decision_outputs(
    prs: &[(String, SnrDist)],
    ids: &[(String, SnrDist)],
    cfg: &ConstraintConfig,
    out_dir: &Path,
) -> Result<u8, Error> {
    let mut prob_rows = Vec::new();
    let mut ic_bits = Vec::new();
    let mut cc_bits = Vec::new();
    for (node, d) in prs {
        let e = evaluate_ic(d, cfg)?;
        ic_bits.push(e.pass);
        prob_rows.push(ProbabilityRow { node_id: node.clone(), role: Role::Pr, dist: Some(*d), eval: Some(e) });
    }
    for (node, d) in ids {
        let e = evaluate_cc(d, cfg)?;
        cc_bits.push(e.pass);
        prob_rows.push(ProbabilityRow { node_id: node.clone(), role: Role::Id, dist: Some(*d), eval: Some(e) });
    }
    let matrix = DecisionMatrix::from_bits(ic_bits, cc_bits)?;
    let pr_ids: Vec<String> = prs.iter().map(|(n, _)| n.clone()).collect();
    let id_ids: Vec<String> = ids.iter().map(|(n, _)| n.clone()).collect();
    io::write_decisions(create(out_dir, "decisions.csv")?, &pr_ids, &id_ids, &matrix)?;
    io::write_probabilities(create(out_dir, "probabilities.csv")?, &prob_rows)?;
    print_matrix(&pr_ids, &id_ids, &matrix);
    Ok(EXIT_OK)
}

fn print_matrix(pr_ids: &[String], id_ids: &[String], matrix: &DecisionMatrix) {
    print!("{:>6}", "");
    for p in pr_ids {
        print!(" {p:>6}");
    }
    println!();
    for (i, id) in id_ids.iter().enumerate() {
        print!("{id:>6}");
        for p in 0..pr_ids.len() {
            let ic = u8::from(matrix.ic_bits()[p]);
            let cc = u8::from(matrix.cc_bits()[i]);
            print!(" {:>6}", format!("{ic}.{cc}={}", u8::from(matrix.cell(p, i))));
        }
        println!();
    }
    println!("{} of {} snapshots enabled", matrix.enabled_count(), pr_ids.len() * id_ids.len());
}

fn simulate(cfg: &CampaignConfig, threads: usize, dump_samples: bool, out_dir: &Path) -> Result<u8, Error> {
    cfg.validate().map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    let result = if threads == 0 { run_campaign(cfg)? } else { run_campaign_with_threads(cfg, threads)? };
    io::write_campaign(out_dir, cfg, &result, dump_samples)?;
    for (node, reason) in result.failures() {
        eprintln!("warning: node {node}: fit failed: {reason}");
    }
    let pr_ids: Vec<String> = result.prs.iter().map(|n| n.node_id().to_string()).collect();
    let id_ids: Vec<String> = result.ids.iter().map(|n| n.node_id().to_string()).collect();
    print_matrix(&pr_ids, &id_ids, &result.matrix);
    Ok(EXIT_OK)
}

/// Inclusive grid of `steps + 1` points over `[min, max]`.
pub fn cdf_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Error> {
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::Config(format!("invalid range [{min}, {max}]")));
    }
    if steps == 0 {
        return Err(Error::Config("--steps must be at least 1".into()));
    }
    Ok((0..=steps).map(|k| if k == steps { max } else { min + (max - min) * k as f64 / steps as f64 }).collect())
}

fn export_cdf(
    dist: &DistArgs,
    min: f64,
    max: f64,
    steps: usize,
    samples: Option<&Path>,
    out_dir: &Path,
) -> Result<u8, Error> {
    let grid = cdf_grid(min, max, steps)?;
    if min < 0.0 {
        return Err(Error::Config("SNR range must be non-negative".into()));
    }
    let resolved = dist.resolve()?;
    if resolved.len() != 1 {
        return Err(Error::Config("select exactly one node with --node".into()));
    }
    let (node, d) = &resolved[0];
    let empirical = match samples {
        Some(path) => {
            let groups = io::read_snr_samples(path)?;
            let group = groups
                .into_iter()
                .find(|g| g.node_id == *node)
                .ok_or_else(|| Error::Config(format!("{}: no samples for node `{node}`", path.display())))?;
            Some(empirical_cdf(&SnrSampleSet::new(group.node_id, group.samples)?))
        }
        None => None,
    };
    let path = out_dir.join("cdf.csv");
    let mut w = create(out_dir, "cdf.csv")?;
    let header = if empirical.is_some() { "x,analytical,empirical" } else { "x,analytical" };
    writeln!(w, "{header}").map_err(write_err(&path))?;
    for x in grid {
        let a = fmt_prob(snr_cdf(x, d)?);
        match &empirical {
            Some(e) => writeln!(w, "{x},{a},{}", fmt_prob(e.eval(x))),
            None => writeln!(w, "{x},{a}"),
        }
        .map_err(write_err(&path))?;
    }
    w.flush().map_err(write_err(&path))?;
    Ok(EXIT_OK)
}
