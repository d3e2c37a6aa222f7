//! Node deployment, transmitter/receiver pairing and block-fading channel
//! gains.
//!
//! Gains follow the usual distance-based model: a unit-mean fading draw
//! scaled by `p / d^n`, where `p` is the path-loss coefficient and `n` the
//! path-loss exponent. Distances are Euclidean in meters, the hybrid access
//! point (HAP) sits at the field center, and node `i` (0-based) transmits to
//! node `N - 1 - i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::throughput::PairLink;

/// Speed of light, m/s.
const LIGHT_SPEED: f64 = 299_792_458.0;

/// Carrier used to derive the default path-loss coefficient.
pub const DEFAULT_CARRIER_HZ: f64 = 915e6;

/// Minimum received power of a practical RF energy harvester, in watts (-20 dBm).
pub const DEFAULT_SENSITIVITY_W: f64 = 1e-5;

/// Nodes closer than this to the HAP or to their partner are re-drawn.
pub const MIN_DISTANCE: f64 = 1e-9;

/// Free-space path-loss coefficient `(lambda / 4 pi)^2` at the given carrier.
pub fn free_space_coefficient(carrier_hz: f64) -> f64 {
    let lambda = LIGHT_SPEED / carrier_hz;
    (lambda / (4.0 * std::f64::consts::PI)).powi(2)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

/// Distribution of the unit-mean fading power components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    /// Exponential power gain (Rayleigh envelope).
    #[default]
    Exponential,
    /// Every fading component equals one.
    Unity,
}

impl FadingModel {
    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            FadingModel::Exponential => Exp1.sample(rng),
            FadingModel::Unity => 1.0,
        }
    }
}

/// Physical constants shared by every pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// HAP transmit power, W.
    pub p0: f64,
    /// Noise power, W.
    pub sigma2: f64,
    /// Fraction of harvested energy available for information transfer.
    pub theta: f64,
    /// RF-to-DC rectification efficiency.
    pub eta: f64,
    /// Uplink/downlink channel asymmetry of the transmitters.
    pub rho: f64,
    /// Downlink energy/information channel factor of the receivers.
    pub phi: f64,
    pub n_exp: f64,
    pub p_coeff: f64,
    /// Golden-section bracket tolerance.
    pub xi: f64,
    /// Offset used for endpoint evaluations, `t_e in {eps, 1 - eps}`.
    pub eps: f64,
    pub fading: FadingModel,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            p0: 4.0,
            sigma2: dbm_to_watts(-100.0),
            theta: 0.8,
            eta: 0.5,
            rho: 1.0,
            phi: 1.0,
            n_exp: 2.0,
            p_coeff: free_space_coefficient(DEFAULT_CARRIER_HZ),
            xi: 1e-3,
            eps: 1e-6,
            fading: FadingModel::Exponential,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, name: &'static str, v: f64, what: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{what}, got {v}"),
                })
            }
        }
        check(
            self.p0 > 0.0 && self.p0.is_finite(),
            "p0",
            self.p0,
            "must be > 0",
        )?;
        check(
            self.sigma2 > 0.0 && self.sigma2.is_finite(),
            "sigma2",
            self.sigma2,
            "must be > 0",
        )?;
        check(
            self.theta > 0.0 && self.theta <= 1.0,
            "theta",
            self.theta,
            "must lie in (0, 1]",
        )?;
        check(
            self.eta > 0.0 && self.eta <= 1.0,
            "eta",
            self.eta,
            "must lie in (0, 1]",
        )?;
        check(
            self.rho > 0.0 && self.rho.is_finite(),
            "rho",
            self.rho,
            "must be > 0",
        )?;
        check(
            self.phi > 0.0 && self.phi.is_finite(),
            "phi",
            self.phi,
            "must be > 0",
        )?;
        check(
            self.n_exp >= 2.0 && self.n_exp.is_finite(),
            "n_exp",
            self.n_exp,
            "must be >= 2",
        )?;
        check(
            self.p_coeff > 0.0 && self.p_coeff.is_finite(),
            "p_coeff",
            self.p_coeff,
            "must be > 0",
        )?;
        check(
            self.xi > 0.0 && self.xi < 1.0,
            "xi",
            self.xi,
            "must lie in (0, 1)",
        )?;
        check(
            self.eps > 0.0 && self.eps < 1e-2,
            "eps",
            self.eps,
            "must lie in (0, 0.01)",
        )?;
        Ok(())
    }

    pub fn with_path_loss_exponent(&self, n_exp: f64) -> SystemParams {
        SystemParams {
            n_exp,
            ..self.clone()
        }
    }

    /// Largest square field whose corners still receive `sensitivity_w` on
    /// average from the HAP at the center: `L = sqrt(2) (P0 p / P_min)^(1/n)`.
    pub fn max_field_size(&self, sensitivity_w: f64) -> f64 {
        std::f64::consts::SQRT_2 * (self.p0 * self.p_coeff / sensitivity_w).powf(1.0 / self.n_exp)
    }

    /// Field size used when a run does not specify one.
    pub fn default_field_size(&self) -> f64 {
        self.max_field_size(DEFAULT_SENSITIVITY_W)
    }

    /// Link description of one pair with the scalar efficiencies of these params.
    pub fn pair_link(&self, h_t: f64, h_r: f64, g: f64) -> PairLink {
        PairLink {
            h_t,
            h_r,
            g,
            eta_t: self.eta,
            rho_t: self.rho,
            phi_r: self.phi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub field_size: f64,
    pub positions: Vec<[f64; 2]>,
    pub hap_position: [f64; 2],
    /// `(transmitter, receiver)` node indices, 0-based.
    pub pairs: Vec<(usize, usize)>,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Places `n_nodes` points uniformly over `[0, L]^2` with the HAP at the
/// center and pairs node `i` with node `N - 1 - i`.
pub fn deploy(n_nodes: usize, field_size: f64, seed: u64) -> Result<Deployment> {
    if n_nodes < 2 || !n_nodes.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "n_nodes",
            reason: format!("need an even node count >= 2, got {n_nodes}"),
        });
    }
    if !(field_size > 0.0 && field_size.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "field_size",
            reason: format!("must be > 0, got {field_size}"),
        });
    }
    let mut rng = seeded_rng(seed);
    let hap = [field_size / 2.0, field_size / 2.0];
    let mut positions: Vec<[f64; 2]> = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        // the partner of a receiver was placed earlier
        let partner = n_nodes - 1 - i;
        loop {
            let p = [
                rng.random::<f64>() * field_size,
                rng.random::<f64>() * field_size,
            ];
            let near_hap = distance(p, hap) <= MIN_DISTANCE;
            let near_partner = partner < i && distance(p, positions[partner]) <= MIN_DISTANCE;
            if !near_hap && !near_partner {
                positions.push(p);
                break;
            }
        }
    }
    let pairs = (0..n_nodes / 2).map(|i| (i, n_nodes - 1 - i)).collect();
    Ok(Deployment {
        field_size,
        positions,
        hap_position: hap,
        pairs,
    })
}

impl Deployment {
    pub fn n_nodes(&self) -> usize {
        self.positions.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn hap_distance(&self, node: usize) -> f64 {
        distance(self.positions[node], self.hap_position)
    }

    pub fn pair_distance(&self, pair: usize) -> f64 {
        let (t, r) = self.pairs[pair];
        distance(self.positions[t], self.positions[r])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_nodes();
        if n < 2 || !n.is_multiple_of(2) || self.pairs.len() != n / 2 {
            return Err(Error::InvalidParameter {
                name: "deployment",
                reason: format!("{n} nodes with {} pairs", self.pairs.len()),
            });
        }
        let mut seen = vec![false; n];
        for &(t, r) in &self.pairs {
            for u in [t, r] {
                if u >= n || std::mem::replace(&mut seen[u], true) {
                    return Err(Error::InvalidParameter {
                        name: "deployment",
                        reason: "pairs must partition the nodes".into(),
                    });
                }
            }
        }
        for node in 0..n {
            if self.hap_distance(node) <= MIN_DISTANCE {
                return Err(Error::InvalidParameter {
                    name: "deployment",
                    reason: format!("node {node} coincides with the HAP"),
                });
            }
        }
        for pair in 0..self.n_pairs() {
            if self.pair_distance(pair) <= MIN_DISTANCE {
                return Err(Error::InvalidParameter {
                    name: "deployment",
                    reason: format!("pair {pair} has coincident nodes"),
                });
            }
        }
        Ok(())
    }
}

/// Gains of one fading block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// HAP link gain of every node.
    pub h: Vec<f64>,
    /// Direct transmitter-to-receiver gain of every pair.
    pub g: Vec<f64>,
    pub fading_h: Vec<f64>,
    pub fading_g: Vec<f64>,
}

/// Draws unit-mean fading for every HAP link and every pair link.
pub fn draw_channels(
    dep: &Deployment,
    params: &SystemParams,
    seed: u64,
) -> Result<ChannelRealization> {
    dep.validate()?;
    let mut rng = seeded_rng(seed);
    let fading_h: Vec<f64> = (0..dep.n_nodes())
        .map(|_| params.fading.sample(&mut rng))
        .collect();
    let fading_g: Vec<f64> = (0..dep.n_pairs())
        .map(|_| params.fading.sample(&mut rng))
        .collect();
    Ok(ChannelRealization::assemble(
        dep, params, fading_h, fading_g,
    ))
}

impl ChannelRealization {
    /// Gains from fading components and geometry: `p * fading / d^n`.
    pub fn assemble(
        dep: &Deployment,
        params: &SystemParams,
        fading_h: Vec<f64>,
        fading_g: Vec<f64>,
    ) -> ChannelRealization {
        let gain = |fade: f64, d: f64| params.p_coeff * fade / d.powf(params.n_exp);
        let h = (0..dep.n_nodes())
            .map(|u| gain(fading_h[u], dep.hap_distance(u)))
            .collect();
        let g = (0..dep.n_pairs())
            .map(|i| gain(fading_g[i], dep.pair_distance(i)))
            .collect();
        ChannelRealization {
            h,
            g,
            fading_h,
            fading_g,
        }
    }

    /// Per-pair link descriptions, in pair order.
    pub fn links(&self, dep: &Deployment, params: &SystemParams) -> Vec<PairLink> {
        dep.pairs
            .iter()
            .enumerate()
            .map(|(i, &(t, r))| params.pair_link(self.h[t], self.h[r], self.g[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constants() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert!((p.sigma2 - 1e-13).abs() < 1e-25);
        assert!((watts_to_dbm(p.sigma2) + 100.0).abs() < 1e-9);
        assert!((p.p_coeff - 6.807e-4).abs() < 1e-6);
    }

    #[test]
    fn sensitivity_field_sizes_track_published_values() {
        let p = SystemParams::default();
        let l2 = p.with_path_loss_exponent(2.0).default_field_size();
        let l5 = p.with_path_loss_exponent(5.0).default_field_size();
        assert!((l2 - 23.4).abs() < 0.1, "{l2}");
        assert!((l5 - 4.4).abs() < 0.1, "{l5}");
        let l3 = p.with_path_loss_exponent(3.0).default_field_size();
        let l4 = p.with_path_loss_exponent(4.0).default_field_size();
        assert!(l2 > l3 && l3 > l4 && l4 > l5);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = SystemParams {
            theta: 1.5,
            ..SystemParams::default()
        };
        assert!(p.validate().is_err());
        let p = SystemParams {
            n_exp: 1.0,
            ..SystemParams::default()
        };
        assert!(p.validate().is_err());
        let p = SystemParams {
            sigma2: 0.0,
            ..SystemParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn smallest_deployment() {
        let d = deploy(2, 10.0, 3).unwrap();
        assert_eq!(d.pairs, vec![(0, 1)]);
        assert_eq!(d.hap_position, [5.0, 5.0]);
        for p in &d.positions {
            assert!(p.iter().all(|c| (0.0..=10.0).contains(c)));
        }
    }

    #[test]
    fn twenty_node_pairing() {
        let d = deploy(20, 4.4, 11).unwrap();
        assert_eq!(d.n_pairs(), 10);
        assert_eq!(d.pairs[0], (0, 19));
        assert_eq!(d.pairs[1], (1, 18));
        assert_eq!(d.pairs[9], (9, 10));
        d.validate().unwrap();
    }

    #[test]
    fn deployment_is_deterministic() {
        assert_eq!(deploy(8, 5.0, 42).unwrap(), deploy(8, 5.0, 42).unwrap());
        assert_ne!(deploy(8, 5.0, 42).unwrap(), deploy(8, 5.0, 43).unwrap());
    }

    #[test]
    fn odd_node_count_rejected() {
        assert!(deploy(3, 10.0, 0).is_err());
        assert!(deploy(0, 10.0, 0).is_err());
        assert!(deploy(4, 0.0, 0).is_err());
    }

    fn manual(positions: Vec<[f64; 2]>, hap: [f64; 2]) -> Deployment {
        let n = positions.len();
        Deployment {
            field_size: 10.0,
            positions,
            hap_position: hap,
            pairs: (0..n / 2).map(|i| (i, n - 1 - i)).collect(),
        }
    }

    #[test]
    fn unit_gain_geometry() {
        let dep = manual(vec![[0.0, 0.0], [1.0, 0.0]], [0.0, 3.0]);
        let params = SystemParams {
            p_coeff: 1.0,
            n_exp: 2.0,
            fading: FadingModel::Unity,
            ..SystemParams::default()
        };
        let ch = draw_channels(&dep, &params, 0).unwrap();
        assert_eq!(ch.g, vec![1.0]);
        assert!((ch.h[0] - 1.0 / 9.0).abs() < 1e-15);
        let d1 = 10f64.sqrt();
        assert!((ch.h[1] - 1.0 / d1.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn coincident_nodes_rejected() {
        let dep = manual(vec![[1.0, 1.0], [1.0, 1.0]], [5.0, 5.0]);
        assert!(draw_channels(&dep, &SystemParams::default(), 0).is_err());
        let dep = manual(vec![[5.0, 5.0], [1.0, 1.0]], [5.0, 5.0]);
        assert!(draw_channels(&dep, &SystemParams::default(), 0).is_err());
    }

    #[test]
    fn exponential_fading_has_unit_mean() {
        let mut rng = seeded_rng(7);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| FadingModel::Exponential.sample(&mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn gains_scale_with_distance() {
        let params = SystemParams {
            n_exp: 3.0,
            ..SystemParams::default()
        };
        let dep = deploy(6, 8.0, 5).unwrap();
        let ch = draw_channels(&dep, &params, 9).unwrap();
        for c in [2.0, 10.0] {
            let scaled = Deployment {
                field_size: dep.field_size * c,
                positions: dep.positions.iter().map(|p| [p[0] * c, p[1] * c]).collect(),
                hap_position: [dep.hap_position[0] * c, dep.hap_position[1] * c],
                pairs: dep.pairs.clone(),
            };
            let sc = ChannelRealization::assemble(
                &scaled,
                &params,
                ch.fading_h.clone(),
                ch.fading_g.clone(),
            );
            let factor = c.powf(-params.n_exp);
            for (a, b) in ch.h.iter().zip(&sc.h).chain(ch.g.iter().zip(&sc.g)) {
                assert!((b / a - factor).abs() <= 1e-12 * factor);
            }
        }
    }

    #[test]
    fn reassembly_is_bit_exact() {
        let params = SystemParams::default();
        let dep = deploy(10, 12.0, 1).unwrap();
        let ch = draw_channels(&dep, &params, 2).unwrap();
        let again =
            ChannelRealization::assemble(&dep, &params, ch.fading_h.clone(), ch.fading_g.clone());
        assert_eq!(ch, again);
    }

    #[test]
    fn json_round_trip() {
        let params = SystemParams::default();
        let dep = deploy(4, 12.0, 1).unwrap();
        let ch = draw_channels(&dep, &params, 2).unwrap();
        let dep2: Deployment = serde_json::from_str(&serde_json::to_string(&dep).unwrap()).unwrap();
        let ch2: ChannelRealization =
            serde_json::from_str(&serde_json::to_string(&ch).unwrap()).unwrap();
        assert_eq!(dep, dep2);
        assert_eq!(ch, ch2);
    }
}
