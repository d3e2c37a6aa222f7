//! Monte-Carlo campaigns over random deployments and fading draws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{
    approx_te_d2d, evaluate_all_d2d, joint_optimize, optimize_all_cellular, optimize_all_d2d, Mode,
    OptimizationResult,
};
use crate::scenario::{deploy, draw_channels, SystemParams};
use crate::throughput::{cellular_throughput, PairLink};

pub const FIXED_D2D_TE: f64 = 0.5;
pub const FIXED_CELL_TE: f64 = 1.0 / 3.0;
pub const FIXED_CELL_TD: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    JointOpt,
    AllD2dOptTa,
    AllCellOptTa,
    AllD2dFixedTa,
    AllCellFixedTa,
    AllCellUniformTa,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::JointOpt,
        Scheme::AllD2dOptTa,
        Scheme::AllCellOptTa,
        Scheme::AllD2dFixedTa,
        Scheme::AllCellFixedTa,
        Scheme::AllCellUniformTa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::JointOpt => "JOINT_OPT",
            Scheme::AllD2dOptTa => "ALL_D2D_OPT_TA",
            Scheme::AllCellOptTa => "ALL_CELL_OPT_TA",
            Scheme::AllD2dFixedTa => "ALL_D2D_FIXED_TA",
            Scheme::AllCellFixedTa => "ALL_CELL_FIXED_TA",
            Scheme::AllCellUniformTa => "ALL_CELL_UNIFORM_TA",
        }
    }

    pub fn is_fixed(self) -> bool {
        matches!(
            self,
            Scheme::AllD2dFixedTa | Scheme::AllCellFixedTa | Scheme::AllCellUniformTa
        )
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn fixed_cellular(links: &[PairLink], params: &SystemParams) -> Result<OptimizationResult> {
    let per_pair_tau = links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            cellular_throughput(l, params, FIXED_CELL_TE, FIXED_CELL_TD)
                .map_err(|e| Error::pair(i, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimizationResult {
        te_star: FIXED_CELL_TE,
        modes: vec![Mode::Cellular; links.len()],
        td_star: vec![FIXED_CELL_TD; links.len()],
        tau_s: per_pair_tau.iter().sum(),
        per_pair_tau,
    })
}

/// Mode and time allocation chosen by `scheme` for one realization.
pub fn evaluate_scheme(
    scheme: Scheme,
    links: &[PairLink],
    params: &SystemParams,
) -> Result<OptimizationResult> {
    match scheme {
        Scheme::JointOpt => joint_optimize(links, params),
        Scheme::AllD2dOptTa => optimize_all_d2d(links, params),
        Scheme::AllCellOptTa => optimize_all_cellular(links, params),
        Scheme::AllD2dFixedTa => evaluate_all_d2d(links, params, FIXED_D2D_TE),
        Scheme::AllCellFixedTa | Scheme::AllCellUniformTa => fixed_cellular(links, params),
    }
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub n_nodes: usize,
    pub n_exp: f64,
    pub field_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub n_nodes: Vec<usize>,
    pub n_exp: Vec<f64>,
    /// Swept for every `(n_nodes, n_exp)`; `None` uses the sensitivity-limited
    /// field size of each exponent.
    pub field_sizes: Option<Vec<f64>>,
    /// Realizations per cell.
    pub trials: usize,
    /// Distinct node deployments per cell; trial `k` uses deployment
    /// `k mod deployments` with its own fading draw.
    pub deployments: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub params: SystemParams,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            n_nodes: vec![20],
            n_exp: vec![2.0, 3.0, 4.0, 5.0],
            field_sizes: None,
            trials: 10_000,
            deployments: 20,
            seed: 1,
            schemes: Scheme::ALL.to_vec(),
            params: SystemParams::default(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `parts` into one seed with splitmix64.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |acc, &p| splitmix64(acc ^ p))
}

const DEPLOYMENT_STREAM: u64 = 0;
const FADING_STREAM: u64 = 1;

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.params.validate()?;
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.deployments == 0 {
            return bad("deployments must be >= 1".into());
        }
        if self.n_nodes.is_empty() || self.n_exp.is_empty() {
            return bad("n_nodes and n_exp must be non-empty".into());
        }
        if let Some(&n) = self.n_nodes.iter().find(|&&n| n < 2 || n % 2 != 0) {
            return bad(format!("n_nodes must be even and >= 2, got {n}"));
        }
        if let Some(&n) = self.n_exp.iter().find(|&&n| !(n > 0.0 && n.is_finite())) {
            return bad(format!("path-loss exponent must be > 0, got {n}"));
        }
        if let Some(sizes) = &self.field_sizes {
            if sizes.is_empty() {
                return bad("field_sizes must be non-empty when given".into());
            }
            if let Some(&l) = sizes.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
                return bad(format!("field size must be > 0, got {l}"));
            }
        }
        if self.schemes.is_empty() {
            return bad("schemes must be non-empty".into());
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return bad(format!("scheme {s} listed twice"));
            }
        }
        Ok(())
    }

    /// Sweep grid in report order: `n_nodes`, then `n_exp`, then field size.
    pub fn cells(&self) -> Vec<CellSpec> {
        let mut cells = Vec::new();
        for &n_nodes in &self.n_nodes {
            for &n_exp in &self.n_exp {
                let sizes = match &self.field_sizes {
                    Some(s) => s.clone(),
                    None => vec![self
                        .params
                        .with_path_loss_exponent(n_exp)
                        .default_field_size()],
                };
                for field_size in sizes {
                    cells.push(CellSpec {
                        n_nodes,
                        n_exp,
                        field_size,
                    });
                }
            }
        }
        cells
    }

    pub fn cell_params(&self, cell: &CellSpec) -> SystemParams {
        self.params.with_path_loss_exponent(cell.n_exp)
    }

    fn deployment_count(&self) -> usize {
        self.deployments.min(self.trials)
    }

    /// `(deployment seed, fading seed)` of one trial.
    pub fn trial_seeds(&self, cell: usize, trial: usize) -> (u64, u64) {
        let dep = (trial % self.deployment_count()) as u64;
        (
            derive_seed(&[self.seed, cell as u64, DEPLOYMENT_STREAM, dep]),
            derive_seed(&[self.seed, cell as u64, FADING_STREAM, trial as u64]),
        )
    }

    /// Pair links of one trial, exactly as the campaign sees them.
    pub fn trial_links(&self, cell: usize, trial: usize) -> Result<Vec<PairLink>> {
        let spec = self
            .cells()
            .get(cell)
            .copied()
            .ok_or_else(|| Error::Config(format!("no cell {cell}")))?;
        let params = self.cell_params(&spec);
        let (dep_seed, fade_seed) = self.trial_seeds(cell, trial);
        let dep = deploy(spec.n_nodes, spec.field_size, dep_seed)?;
        Ok(draw_channels(&dep, &params, fade_seed)?.links(&dep, &params))
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and standard error (`None` below two samples).
fn mean_se(values: &[f64]) -> Option<(f64, Option<f64>)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let se = (values.len() > 1).then(|| {
        let ss = compensated_sum(values.iter().map(|x| (x - mean).powi(2)));
        (ss / (n - 1.0) / n).sqrt()
    });
    Some((mean, se))
}

#[derive(Debug, Clone)]
struct SchemeSample {
    tau: f64,
    te: f64,
    d2d_fraction: f64,
    /// Mean `(uplink, downlink)` IT time over the cellular pairs, if any.
    it: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
struct TrialOutcome {
    samples: Vec<SchemeSample>,
    approx_loss: Option<f64>,
    dominated: bool,
}

fn run_trial(
    schemes: &[Scheme],
    links: &[PairLink],
    params: &SystemParams,
) -> Result<TrialOutcome> {
    let results = schemes
        .iter()
        .map(|&s| evaluate_scheme(s, links, params))
        .collect::<Result<Vec<_>>>()?;
    let samples = results
        .iter()
        .map(|r| {
            let it: Vec<(f64, f64)> = r.cellular_it_times().collect();
            let n = it.len() as f64;
            SchemeSample {
                tau: r.tau_s,
                te: r.te_star,
                d2d_fraction: r.d2d_fraction(),
                it: (!it.is_empty()).then(|| {
                    (
                        compensated_sum(it.iter().map(|p| p.0)) / n,
                        compensated_sum(it.iter().map(|p| p.1)) / n,
                    )
                }),
            }
        })
        .collect::<Vec<_>>();

    let approx_loss = match schemes.iter().position(|&s| s == Scheme::AllD2dOptTa) {
        Some(k) => {
            let ctx = approx_te_d2d(links, params)?;
            let approx = evaluate_all_d2d(links, params, ctx.te_hat)?;
            let best = results[k].tau_s;
            Some((best - approx.tau_s) / best)
        }
        None => None,
    };

    let dominated = match schemes.iter().position(|&s| s == Scheme::JointOpt) {
        Some(j) => samples.iter().any(|s| s.tau > samples[j].tau),
        None => false,
    };
    Ok(TrialOutcome {
        samples,
        approx_loss,
        dominated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMetrics {
    pub scheme: Scheme,
    pub mean_tau_s: f64,
    pub se_tau_s: Option<f64>,
    pub mean_te: f64,
    pub d2d_fraction: f64,
    /// Over trials with at least one cellular pair.
    pub mean_uplink_it: Option<f64>,
    pub mean_downlink_it: Option<f64>,
    /// Percent improvement of the mean over `ALL_CELL_UNIFORM_TA`.
    pub gain_pct: Option<f64>,
    /// `ALL_D2D_OPT_TA` only: mean relative loss of the mean-`y3` approximation.
    pub approx_loss_pct: Option<f64>,
    pub se_approx_loss_pct: Option<f64>,
    /// `JOINT_OPT` only: realizations where another scheme did strictly better.
    pub dominance_violations: Option<usize>,
}

impl SchemeMetrics {
    pub const METRICS: [&'static str; 11] = [
        "mean_tau_s",
        "se_tau_s",
        "mean_te",
        "d2d_fraction",
        "mean_uplink_it",
        "mean_downlink_it",
        "gain_pct",
        "approx_loss_pct",
        "se_approx_loss_pct",
        "dominance_violations",
        "trials_with_cellular",
    ];

    fn values(&self, trials_with_cellular: usize) -> [Option<f64>; 11] {
        [
            Some(self.mean_tau_s),
            self.se_tau_s,
            Some(self.mean_te),
            Some(self.d2d_fraction),
            self.mean_uplink_it,
            self.mean_downlink_it,
            self.gain_pct,
            self.approx_loss_pct,
            self.se_approx_loss_pct,
            self.dominance_violations.map(|v| v as f64),
            Some(trials_with_cellular as f64),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: CellSpec,
    pub trials: usize,
    pub schemes: Vec<SchemeMetrics>,
    /// Per scheme, in the same order.
    pub trials_with_cellular: Vec<usize>,
}

impl CellReport {
    pub fn metrics(&self, scheme: Scheme) -> Option<&SchemeMetrics> {
        self.schemes.iter().find(|m| m.scheme == scheme)
    }

    /// Named metric values of every scheme, in `SchemeMetrics::METRICS` order.
    pub fn metric_rows(&self) -> impl Iterator<Item = (Scheme, &'static str, Option<f64>)> + '_ {
        self.schemes
            .iter()
            .zip(&self.trials_with_cellular)
            .flat_map(|(m, &c)| {
                SchemeMetrics::METRICS
                    .into_iter()
                    .zip(m.values(c))
                    .map(move |(name, v)| (m.scheme, name, v))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub cells: Vec<CellReport>,
}

fn summarize(cfg: &CampaignConfig, spec: CellSpec, outcomes: &[TrialOutcome]) -> CellReport {
    let column = |k: usize, f: &dyn Fn(&SchemeSample) -> f64| -> Vec<f64> {
        outcomes.iter().map(|o| f(&o.samples[k])).collect()
    };
    let uniform = cfg
        .schemes
        .iter()
        .position(|&s| s == Scheme::AllCellUniformTa)
        .map(|k| mean_se(&column(k, &|s| s.tau)).expect("trials >= 1").0);

    let mut schemes = Vec::with_capacity(cfg.schemes.len());
    let mut with_cellular = Vec::with_capacity(cfg.schemes.len());
    for (k, &scheme) in cfg.schemes.iter().enumerate() {
        let (mean_tau_s, se_tau_s) = mean_se(&column(k, &|s| s.tau)).expect("trials >= 1");
        let it: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o.samples[k].it).collect();
        let ul: Vec<f64> = it.iter().map(|p| p.0).collect();
        let dl: Vec<f64> = it.iter().map(|p| p.1).collect();
        let (approx_loss_pct, se_approx_loss_pct) = if scheme == Scheme::AllD2dOptTa {
            let loss: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.approx_loss.map(|l| 100.0 * l))
                .collect();
            match mean_se(&loss) {
                Some((m, se)) => (Some(m), se),
                None => (None, None),
            }
        } else {
            (None, None)
        };
        schemes.push(SchemeMetrics {
            scheme,
            mean_tau_s,
            se_tau_s,
            mean_te: mean_se(&column(k, &|s| s.te)).expect("trials >= 1").0,
            d2d_fraction: mean_se(&column(k, &|s| s.d2d_fraction))
                .expect("trials >= 1")
                .0,
            mean_uplink_it: mean_se(&ul).map(|p| p.0),
            mean_downlink_it: mean_se(&dl).map(|p| p.0),
            gain_pct: uniform.map(|u| 100.0 * (mean_tau_s / u - 1.0)),
            approx_loss_pct,
            se_approx_loss_pct,
            dominance_violations: (scheme == Scheme::JointOpt)
                .then(|| outcomes.iter().filter(|o| o.dominated).count()),
        });
        with_cellular.push(it.len());
    }
    CellReport {
        cell: spec,
        trials: outcomes.len(),
        schemes,
        trials_with_cellular: with_cellular,
    }
}

/// Runs every configured scheme on every trial of every cell. Trials run on
/// the current rayon pool; the report does not depend on its size.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for (c, spec) in cfg.cells().into_iter().enumerate() {
        let params = cfg.cell_params(&spec);
        let deployments = (0..cfg.deployment_count())
            .map(|d| deploy(spec.n_nodes, spec.field_size, cfg.trial_seeds(c, d).0))
            .collect::<Result<Vec<_>>>()?;
        let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials)
            .into_par_iter()
            .map(|k| {
                let dep = &deployments[k % deployments.len()];
                let channels = draw_channels(dep, &params, cfg.trial_seeds(c, k).1)?;
                run_trial(&cfg.schemes, &channels.links(dep, &params), &params)
            })
            .collect();
        let outcomes = outcomes
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                r.map_err(|e| Error::Trial {
                    cell: c,
                    trial: k,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let report = summarize(cfg, spec, &outcomes);
        if let Some(v) = report
            .metrics(Scheme::JointOpt)
            .and_then(|m| m.dominance_violations)
            .filter(|&v| v > 0)
        {
            log::warn!("cell {c}: JOINT_OPT beaten on {v} realizations");
        }
        cells.push(report);
    }
    Ok(CampaignReport {
        config: cfg.clone(),
        cells,
    })
}

impl CampaignReport {
    /// Mean `(uplink, downlink)` IT time of cellular pairs under `scheme`.
    pub fn uplink_downlink_split(&self, cell: usize, scheme: Scheme) -> Result<(f64, f64)> {
        let m = self
            .cells
            .get(cell)
            .and_then(|c| c.metrics(scheme))
            .ok_or_else(|| Error::Config(format!("cell {cell} has no {scheme} results")))?;
        match (m.mean_uplink_it, m.mean_downlink_it) {
            (Some(u), Some(d)) => Ok((u, d)),
            _ => Err(Error::NoCellularPairs),
        }
    }

    /// `JOINT_OPT` D2D fraction of every cell.
    pub fn d2d_selection_stats(&self) -> Result<Vec<(CellSpec, f64)>> {
        self.cells
            .iter()
            .map(|c| {
                c.metrics(Scheme::JointOpt)
                    .map(|m| (c.cell, m.d2d_fraction))
                    .ok_or_else(|| Error::Config("JOINT_OPT is not among the schemes".into()))
            })
            .collect()
    }

    pub fn dominance_violations(&self) -> usize {
        self.cells
            .iter()
            .filter_map(|c| c.metrics(Scheme::JointOpt)?.dominance_violations)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::golden_section_calls;

    fn tiny(schemes: Vec<Scheme>) -> CampaignConfig {
        CampaignConfig {
            n_nodes: vec![6],
            n_exp: vec![2.0, 4.0],
            trials: 12,
            deployments: 3,
            seed: 7,
            schemes,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn fixed_schemes_never_search() {
        let cfg = tiny(Scheme::ALL.to_vec());
        let links = cfg.trial_links(0, 0).unwrap();
        let params = cfg.cell_params(&cfg.cells()[0]);
        for s in Scheme::ALL.into_iter().filter(|s| s.is_fixed()) {
            let before = golden_section_calls();
            evaluate_scheme(s, &links, &params).unwrap();
            assert_eq!(golden_section_calls(), before, "{s}");
        }
        let before = golden_section_calls();
        evaluate_scheme(Scheme::AllD2dOptTa, &links, &params).unwrap();
        assert!(golden_section_calls() > before);
    }

    #[test]
    fn fixed_allocations_are_exact() {
        let cfg = tiny(Scheme::ALL.to_vec());
        let links = cfg.trial_links(1, 3).unwrap();
        let params = cfg.cell_params(&cfg.cells()[1]);
        let d = evaluate_scheme(Scheme::AllD2dFixedTa, &links, &params).unwrap();
        assert_eq!(d.te_star, 0.5);
        let c = evaluate_scheme(Scheme::AllCellUniformTa, &links, &params).unwrap();
        assert_eq!(c.te_star, 1.0 / 3.0);
        assert!(c.td_star.iter().all(|&t| t == 1.0 / 3.0));
    }

    #[test]
    fn single_trial_equals_direct_evaluation() {
        let mut cfg = tiny(vec![Scheme::JointOpt, Scheme::AllCellUniformTa]);
        cfg.trials = 1;
        let report = run_campaign(&cfg).unwrap();
        for (c, cell) in report.cells.iter().enumerate() {
            let links = cfg.trial_links(c, 0).unwrap();
            let params = cfg.cell_params(&cell.cell);
            let joint = joint_optimize(&links, &params).unwrap();
            let m = cell.metrics(Scheme::JointOpt).unwrap();
            assert_eq!(m.mean_tau_s, joint.tau_s);
            assert_eq!(m.mean_te, joint.te_star);
            assert_eq!(m.d2d_fraction, joint.d2d_fraction());
            assert_eq!(m.se_tau_s, None);
        }
    }

    #[test]
    fn deterministic_across_pool_sizes() {
        let cfg = tiny(Scheme::ALL.to_vec());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_campaign(&cfg).unwrap())
        };
        let a = serde_json::to_string(&run(1)).unwrap();
        let b = serde_json::to_string(&run(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_shape_and_ranges() {
        let cfg = tiny(Scheme::ALL.to_vec());
        let report = run_campaign(&cfg).unwrap();
        assert_eq!(report.cells.len(), 2);
        for cell in &report.cells {
            assert_eq!(cell.trials, 12);
            assert_eq!(cell.metric_rows().count(), 6 * SchemeMetrics::METRICS.len());
            for m in &cell.schemes {
                assert!(m.mean_tau_s.is_finite() && m.mean_tau_s > 0.0);
                assert!((0.0..=1.0).contains(&m.d2d_fraction));
            }
            let joint = cell.metrics(Scheme::JointOpt).unwrap();
            assert_eq!(joint.dominance_violations, Some(0));
            assert!(cell
                .metrics(Scheme::AllD2dOptTa)
                .unwrap()
                .approx_loss_pct
                .is_some());
            assert_eq!(
                cell.metrics(Scheme::AllCellUniformTa).unwrap().gain_pct,
                Some(0.0)
            );
        }
    }

    #[test]
    fn split_needs_cellular_pairs() {
        let cfg = tiny(vec![Scheme::AllD2dOptTa, Scheme::AllCellOptTa]);
        let report = run_campaign(&cfg).unwrap();
        assert!(matches!(
            report.uplink_downlink_split(0, Scheme::AllD2dOptTa),
            Err(Error::NoCellularPairs)
        ));
        let (ul, dl) = report
            .uplink_downlink_split(0, Scheme::AllCellOptTa)
            .unwrap();
        assert!(ul > dl);
        assert!(report.d2d_selection_stats().is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = tiny(Scheme::ALL.to_vec());
        let cases = [
            CampaignConfig {
                trials: 0,
                ..base.clone()
            },
            CampaignConfig {
                n_nodes: vec![5],
                ..base.clone()
            },
            CampaignConfig {
                schemes: vec![],
                ..base.clone()
            },
            CampaignConfig {
                schemes: vec![Scheme::JointOpt, Scheme::JointOpt],
                ..base.clone()
            },
            CampaignConfig {
                field_sizes: Some(vec![-1.0]),
                ..base.clone()
            },
        ];
        for cfg in cases {
            assert!(matches!(run_campaign(&cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let err = serde_json::from_str::<CampaignConfig>(r#"{"trails": 3}"#);
        assert!(err.is_err());
        let cfg: CampaignConfig = serde_json::from_str(r#"{"trials": 3}"#).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.schemes.len(), 6);
    }
}
