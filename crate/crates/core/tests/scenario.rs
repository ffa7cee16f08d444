use cogrelay::channel_models::{log_distance_pl, mean_snr_from_budget, LogDistanceParams};
use cogrelay::constraints::{check_cc, check_ic};
use cogrelay::fading::FadingKind;
use cogrelay::scenario::{generate_snapshot, run_campaign, run_campaign_with_threads, CampaignConfig};

fn fixed_exponent() -> CampaignConfig {
    let mut cfg = CampaignConfig::paper_shape();
    cfg.large_scale.exponent_sd = 0.0;
    cfg.oracle_samples = 1_000_000;
    cfg
}

#[test]
fn oracle_agrees_with_analytic_outage() {
    let result = run_campaign(&fixed_exponent()).unwrap();
    for node in result.prs.iter().chain(&result.ids) {
        let oracle = node.oracle.expect("oracle for every fitted node");
        assert!(oracle.abs_diff() <= 3e-3, "{}: {:?}", node.node_id(), oracle);
    }
}

#[test]
fn fixed_exponent_gives_budget_mean_snr() {
    let cfg = fixed_exponent();
    let result = run_campaign(&cfg).unwrap();
    let ls = LogDistanceParams::new(cfg.large_scale.pl_d0, cfg.large_scale.d0, cfg.large_scale.exponent_mean).unwrap();
    for (i, node) in result.prs.iter().enumerate() {
        let pl = log_distance_pl(&ls, cfg.geometry.pr_distance(i)).unwrap();
        let expected = mean_snr_from_budget(cfg.p_tx, pl, cfg.constraints.noise_power).unwrap();
        assert!((node.link.true_dist.gamma_bar / expected - 1.0).abs() < 1e-12);
        assert_eq!(node.link.exponent, cfg.large_scale.exponent_mean);
    }
}

#[test]
fn matrix_is_and_of_node_bits() {
    let cfg = CampaignConfig::paper_shape();
    let result = run_campaign(&cfg).unwrap();
    assert_eq!((result.matrix.num_pr(), result.matrix.num_id()), (4, 5));
    for (p, i) in result.snapshot_indices() {
        let pr = result.prs[p].fits.fit(FadingKind::Nakagami).unwrap().dist;
        let id = result.ids[i].fits.fit(FadingKind::Nakagami).unwrap().dist;
        let expected = check_ic(&pr, &cfg.constraints).unwrap() && check_cc(&id, &cfg.constraints).unwrap();
        assert_eq!(result.matrix.cell(p, i), expected);
    }
}

#[test]
fn snapshots_share_node_links() {
    let cfg = CampaignConfig::paper_shape();
    let a = generate_snapshot(&cfg, 2, 1).unwrap();
    let b = generate_snapshot(&cfg, 2, 4).unwrap();
    assert_eq!(a.pr_link, b.pr_link);
    assert_ne!(a.id_link, b.id_link);
    assert_eq!(a.id(), "PR3-ID2");
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = CampaignConfig::paper_shape();
    assert_eq!(run_campaign_with_threads(&cfg, 1).unwrap(), run_campaign_with_threads(&cfg, 3).unwrap());
}

#[test]
fn rayleigh_decision_model_uses_rayleigh_fits() {
    let mut cfg = CampaignConfig::paper_shape();
    cfg.decision_model = FadingKind::Rayleigh;
    let result = run_campaign(&cfg).unwrap();
    for (i, node) in result.ids.iter().enumerate() {
        let d = node.fits.fit(FadingKind::Rayleigh).unwrap().dist;
        assert_eq!(result.matrix.cc_bits()[i], check_cc(&d, &cfg.constraints).unwrap());
    }
}
