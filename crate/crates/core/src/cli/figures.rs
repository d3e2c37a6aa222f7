//! Sweeps behind the published figures, emitted as CSV tables.

use clap::ValueEnum;

use super::config::FileConfig;
use crate::error::Result;
use crate::experiments::{run_campaign, CampaignConfig, CampaignReport, CellReport, Scheme};

/// Field sizes of the `fig4` sweep, as fractions of the sensitivity limit.
pub const FIG4_FIELD_SCALES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const FIG3_NODES: [usize; 2] = [20, 40];
pub const FIG5B_NODES: [usize; 4] = [10, 20, 30, 40];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Mean sum-throughput of every scheme vs. path-loss exponent, N = 20 and 40.
    Fig3,
    /// JOINT_OPT D2D fraction vs. field size for every exponent.
    Fig4,
    /// Mean optimal energy-transfer time per scheme.
    Fig5a,
    /// Approximation loss of the mean-y3 energy-transfer time vs. N.
    Fig5b,
    /// Mean uplink/downlink IT time of cellular pairs.
    Fig6a,
    /// JOINT_OPT gain over the uniform all-cellular baseline.
    Fig7,
}

impl Figure {
    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig6a => "fig6a",
            Figure::Fig7 => "fig7",
        }
    }
}

/// Column names followed by one row per sweep point.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

fn cell_key(c: &CellReport) -> Vec<Option<f64>> {
    vec![
        Some(c.cell.n_nodes as f64),
        Some(c.cell.n_exp),
        Some(c.cell.field_size),
    ]
}

fn key_columns() -> Vec<String> {
    ["n_nodes", "n_exp", "field_size"]
        .map(String::from)
        .to_vec()
}

fn table<F>(reports: &[CampaignReport], extra: &[&str], row: F) -> Table
where
    F: Fn(&CellReport) -> Vec<Option<f64>>,
{
    let mut columns = key_columns();
    columns.extend(extra.iter().map(|s| s.to_string()));
    let rows = reports
        .iter()
        .flat_map(|r| &r.cells)
        .map(|c| {
            let mut v = cell_key(c);
            v.extend(row(c));
            v
        })
        .collect();
    Table { columns, rows }
}

fn metric<F>(c: &CellReport, s: Scheme, f: F) -> Option<f64>
where
    F: Fn(&crate::experiments::SchemeMetrics) -> Option<f64>,
{
    c.metrics(s).and_then(f)
}

/// Runs the sweep of `fig` with the trial counts, seed and parameters of
/// `file`.
pub fn figure_table(fig: Figure, file: &FileConfig) -> Result<Table> {
    let base = file.campaign_config()?;
    let with = |n_nodes: Vec<usize>, n_exp: Vec<f64>, schemes: Vec<Scheme>| CampaignConfig {
        n_nodes,
        n_exp,
        field_sizes: None,
        schemes,
        ..base.clone()
    };
    Ok(match fig {
        Figure::Fig3 => {
            let cfg = with(
                FIG3_NODES.to_vec(),
                base.n_exp.clone(),
                Scheme::ALL.to_vec(),
            );
            let names = Scheme::ALL.map(Scheme::name);
            table(&[run_campaign(&cfg)?], &names, |c| {
                Scheme::ALL
                    .iter()
                    .map(|&s| metric(c, s, |m| Some(m.mean_tau_s)))
                    .collect()
            })
        }
        Figure::Fig4 => {
            let reports = base
                .n_exp
                .iter()
                .map(|&n| {
                    let limit = base.params.with_path_loss_exponent(n).default_field_size();
                    let cfg = CampaignConfig {
                        field_sizes: Some(FIG4_FIELD_SCALES.iter().map(|s| s * limit).collect()),
                        ..with(base.n_nodes.clone(), vec![n], vec![Scheme::JointOpt])
                    };
                    run_campaign(&cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            table(&reports, &["d2d_fraction"], |c| {
                vec![metric(c, Scheme::JointOpt, |m| Some(m.d2d_fraction))]
            })
        }
        Figure::Fig5a => {
            let schemes = [Scheme::JointOpt, Scheme::AllD2dOptTa, Scheme::AllCellOptTa];
            let cfg = with(base.n_nodes.clone(), base.n_exp.clone(), schemes.to_vec());
            table(&[run_campaign(&cfg)?], &schemes.map(Scheme::name), |c| {
                schemes
                    .iter()
                    .map(|&s| metric(c, s, |m| Some(m.mean_te)))
                    .collect()
            })
        }
        Figure::Fig5b => {
            let cfg = with(
                FIG5B_NODES.to_vec(),
                vec![base.params.n_exp],
                vec![Scheme::AllD2dOptTa],
            );
            table(
                &[run_campaign(&cfg)?],
                &["approx_loss_pct", "se_approx_loss_pct"],
                |c| {
                    vec![
                        metric(c, Scheme::AllD2dOptTa, |m| m.approx_loss_pct),
                        metric(c, Scheme::AllD2dOptTa, |m| m.se_approx_loss_pct),
                    ]
                },
            )
        }
        Figure::Fig6a => {
            let cfg = with(
                base.n_nodes.clone(),
                base.n_exp.clone(),
                vec![Scheme::JointOpt, Scheme::AllCellOptTa],
            );
            table(
                &[run_campaign(&cfg)?],
                &[
                    "joint_uplink_it",
                    "joint_downlink_it",
                    "all_cell_uplink_it",
                    "all_cell_downlink_it",
                ],
                |c| {
                    vec![
                        metric(c, Scheme::JointOpt, |m| m.mean_uplink_it),
                        metric(c, Scheme::JointOpt, |m| m.mean_downlink_it),
                        metric(c, Scheme::AllCellOptTa, |m| m.mean_uplink_it),
                        metric(c, Scheme::AllCellOptTa, |m| m.mean_downlink_it),
                    ]
                },
            )
        }
        Figure::Fig7 => {
            let cfg = with(
                base.n_nodes.clone(),
                base.n_exp.clone(),
                vec![Scheme::JointOpt, Scheme::AllCellUniformTa],
            );
            table(
                &[run_campaign(&cfg)?],
                &["joint_tau_s", "uniform_tau_s", "gain_pct"],
                |c| {
                    vec![
                        metric(c, Scheme::JointOpt, |m| Some(m.mean_tau_s)),
                        metric(c, Scheme::AllCellUniformTa, |m| Some(m.mean_tau_s)),
                        metric(c, Scheme::JointOpt, |m| m.gain_pct),
                    ]
                },
            )
        }
    })
}
