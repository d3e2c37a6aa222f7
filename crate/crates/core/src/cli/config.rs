//! On-disk run configuration. Every field is optional; an empty object
//! gives the built-in defaults. Noise power is written in dBm here and
//! converted to watts only when the run parameters are built.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{derive_seed, CampaignConfig, Scheme};
use crate::scenario::{
    dbm_to_watts, deploy, draw_channels, watts_to_dbm, FadingModel, SystemParams,
};
use crate::throughput::PairLink;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsFile {
    pub p0: f64,
    pub sigma2_dbm: f64,
    pub theta: f64,
    pub eta: f64,
    pub rho: f64,
    pub phi: f64,
    pub n_exp: f64,
    pub p_coeff: f64,
    pub xi: f64,
    pub eps: f64,
    pub fading: FadingModel,
}

impl Default for ParamsFile {
    fn default() -> Self {
        let p = SystemParams::default();
        ParamsFile {
            p0: p.p0,
            sigma2_dbm: watts_to_dbm(p.sigma2),
            theta: p.theta,
            eta: p.eta,
            rho: p.rho,
            phi: p.phi,
            n_exp: p.n_exp,
            p_coeff: p.p_coeff,
            xi: p.xi,
            eps: p.eps,
            fading: p.fading,
        }
    }
}

impl ParamsFile {
    pub fn to_params(&self) -> Result<SystemParams> {
        let p = SystemParams {
            p0: self.p0,
            sigma2: dbm_to_watts(self.sigma2_dbm),
            theta: self.theta,
            eta: self.eta,
            rho: self.rho,
            phi: self.phi,
            n_exp: self.n_exp,
            p_coeff: self.p_coeff,
            xi: self.xi,
            eps: self.eps,
            fading: self.fading,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignFile {
    pub n_nodes: Vec<usize>,
    pub n_exp: Vec<f64>,
    pub field_sizes: Option<Vec<f64>>,
    pub trials: usize,
    pub deployments: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
}

impl Default for CampaignFile {
    fn default() -> Self {
        let c = CampaignConfig::default();
        CampaignFile {
            n_nodes: c.n_nodes,
            n_exp: c.n_exp,
            field_sizes: c.field_sizes,
            trials: c.trials,
            deployments: c.deployments,
            seed: c.seed,
            schemes: c.schemes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkFile {
    pub h_t: f64,
    pub h_r: f64,
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

/// Single problem instance for `optimize`: explicit gains, or a random
/// deployment drawn from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceFile {
    pub links: Option<Vec<LinkFile>>,
    pub n_nodes: usize,
    /// Defaults to the sensitivity-limited size for `params.n_exp`.
    pub field_size: Option<f64>,
    pub seed: u64,
}

impl Default for InstanceFile {
    fn default() -> Self {
        InstanceFile {
            links: None,
            n_nodes: 20,
            field_size: None,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub params: ParamsFile,
    pub campaign: CampaignFile,
    pub instance: InstanceFile,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if text.trim().is_empty() {
            return Ok(FileConfig::default());
        }
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Applies command-line overrides.
    pub fn override_with(&mut self, seed: Option<u64>, trials: Option<usize>) {
        if let Some(s) = seed {
            self.campaign.seed = s;
            self.instance.seed = s;
        }
        if let Some(t) = trials {
            self.campaign.trials = t;
        }
    }

    pub fn campaign_config(&self) -> Result<CampaignConfig> {
        let c = &self.campaign;
        let cfg = CampaignConfig {
            n_nodes: c.n_nodes.clone(),
            n_exp: c.n_exp.clone(),
            field_sizes: c.field_sizes.clone(),
            trials: c.trials,
            deployments: c.deployments,
            seed: c.seed,
            schemes: c.schemes.clone(),
            params: self.params.to_params()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parameters and pair links of the `optimize` instance.
    pub fn instance_links(&self) -> Result<(SystemParams, Vec<PairLink>)> {
        let params = self.params.to_params()?;
        let inst = &self.instance;
        let links = match &inst.links {
            Some(links) => {
                if links.is_empty() {
                    return Err(Error::Config("instance.links is empty".into()));
                }
                links
                    .iter()
                    .map(|l| {
                        let mut link = params.pair_link(l.h_t, l.h_r, l.g);
                        link.eta_t = l.eta.unwrap_or(link.eta_t);
                        link.rho_t = l.rho.unwrap_or(link.rho_t);
                        link.phi_r = l.phi.unwrap_or(link.phi_r);
                        link
                    })
                    .collect::<Vec<_>>()
            }
            None => {
                let size = inst
                    .field_size
                    .unwrap_or_else(|| params.default_field_size());
                let dep = deploy(inst.n_nodes, size, derive_seed(&[inst.seed, 0]))?;
                draw_channels(&dep, &params, derive_seed(&[inst.seed, 1]))?.links(&dep, &params)
            }
        };
        for (i, l) in links.iter().enumerate() {
            l.validate()
                .map_err(|e| Error::Config(format!("pair {i}: {e}")))?;
        }
        Ok((params, links))
    }
}
