//! RF-powered throughput of a single transmitter/receiver pair.
//!
//! Time is normalized to a unit block: energy transfer occupies `t_e`,
//! downlink relaying `t_d` (cellular mode only) and the transmitter uses the
//! rest. Rates are in bits/s/Hz accumulated over the block.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::SystemParams;

/// Channel and hardware description of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairLink {
    /// HAP-to-transmitter gain.
    pub h_t: f64,
    /// HAP-to-receiver gain.
    pub h_r: f64,
    /// Transmitter-to-receiver gain.
    pub g: f64,
    pub eta_t: f64,
    pub rho_t: f64,
    pub phi_r: f64,
}

impl PairLink {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("h_t", self.h_t),
            ("h_r", self.h_r),
            ("g", self.g),
            ("eta_t", self.eta_t),
            ("rho_t", self.rho_t),
            ("phi_r", self.phi_r),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "link",
                    reason: format!("{name} must be positive and finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Uplink SNR per unit of `t_e / (uplink time)`: `theta eta P0 rho H_T^2 / sigma2`.
    pub fn uplink_snr_factor(&self, params: &SystemParams) -> f64 {
        params.theta * self.eta_t * params.p0 * self.rho_t * self.h_t * self.h_t / params.sigma2
    }

    /// D2D SNR per unit of `t_e / (1 - t_e)`: `theta eta P0 H_T G / sigma2`.
    pub fn d2d_snr_factor(&self, params: &SystemParams) -> f64 {
        params.theta * self.eta_t * params.p0 * self.h_t * self.g / params.sigma2
    }

    /// Downlink SNR `P0 phi H_R / sigma2`.
    pub fn downlink_snr(&self, params: &SystemParams) -> f64 {
        params.p0 * self.phi_r * self.h_r / params.sigma2
    }

    /// Downlink spectral efficiency in nats/s/Hz.
    pub(crate) fn downlink_nats(&self, params: &SystemParams) -> f64 {
        self.downlink_snr(params).ln_1p()
    }
}

/// Split of the block between energy transfer and downlink relaying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAllocation {
    pub t_e: f64,
    pub t_d: f64,
}

impl TimeAllocation {
    pub fn new(t_e: f64, t_d: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t_e) || t_d.is_nan() || t_d < 0.0 || t_e + t_d > 1.0 {
            return Err(Error::TimeDomain(format!("t_e = {t_e}, t_d = {t_d}")));
        }
        Ok(TimeAllocation { t_e, t_d })
    }

    pub fn d2d(t_e: f64) -> Result<Self> {
        Self::new(t_e, 0.0)
    }

    /// Time left for the transmitter, `1 - t_e - t_d`.
    pub fn uplink_time(&self) -> f64 {
        1.0 - self.t_e - self.t_d
    }
}

/// `time * log2(1 + snr)`.
fn rate(time: f64, snr: f64) -> f64 {
    time * snr.ln_1p() / LN_2
}

/// Energy harvested by the transmitter during `t_e`.
pub fn harvested_energy(link: &PairLink, params: &SystemParams, t_e: f64) -> f64 {
    link.eta_t * params.p0 * link.h_t * t_e
}

/// Transmitter-to-HAP rate, with the harvested energy spread over the
/// remaining `1 - t_e - t_d`.
pub fn uplink_rate(link: &PairLink, params: &SystemParams, t_e: f64, t_d: f64) -> Result<f64> {
    if t_e < 0.0 || t_d < 0.0 || t_e + t_d >= 1.0 || t_e.is_nan() || t_d.is_nan() {
        return Err(Error::TimeDomain(format!(
            "uplink needs t_e, t_d >= 0 and t_e + t_d < 1 (t_e = {t_e}, t_d = {t_d})"
        )));
    }
    if t_e == 0.0 {
        return Ok(0.0);
    }
    let up = 1.0 - t_e - t_d;
    Ok(rate(up, link.uplink_snr_factor(params) * t_e / up))
}

/// HAP-to-receiver rate over `t_d`.
pub fn downlink_rate(link: &PairLink, params: &SystemParams, t_d: f64) -> Result<f64> {
    if t_d.is_nan() || t_d < 0.0 {
        return Err(Error::TimeDomain(format!("t_d = {t_d} must be >= 0")));
    }
    Ok(rate(t_d, link.downlink_snr(params)))
}

/// Decode-and-forward throughput through the HAP: the smaller of the two hops.
pub fn cellular_throughput(
    link: &PairLink,
    params: &SystemParams,
    t_e: f64,
    t_d: f64,
) -> Result<f64> {
    let up = uplink_rate(link, params, t_e, t_d)?;
    let down = downlink_rate(link, params, t_d)?;
    Ok(up.min(down))
}

/// Direct transmitter-to-receiver throughput. Both ends of `[0, 1]` return
/// the limiting value 0.
pub fn d2d_throughput(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t_e) {
        return Err(Error::TimeDomain(format!("t_e = {t_e} outside [0, 1]")));
    }
    if t_e == 0.0 || t_e == 1.0 {
        return Ok(0.0);
    }
    Ok(d2d_interior(link, params, t_e))
}

pub(crate) fn d2d_interior(link: &PairLink, params: &SystemParams, t_e: f64) -> f64 {
    let it = 1.0 - t_e;
    rate(it, link.d2d_snr_factor(params) * t_e / it)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_link() -> (PairLink, SystemParams) {
        let params = SystemParams {
            sigma2: 1e-13,
            ..SystemParams::default()
        };
        let link = PairLink {
            h_t: 1e-3,
            h_r: 2e-4,
            g: 5e-5,
            eta_t: 0.5,
            rho_t: 1.0,
            phi_r: 1.0,
        };
        (link, params)
    }

    #[test]
    fn harvested_energy_values() {
        let (mut link, params) = sample_link();
        assert_eq!(harvested_energy(&link, &params, 0.0), 0.0);
        link.h_t = 1.0;
        assert!((harvested_energy(&link, &params, 0.5) - 1.0).abs() < 1e-15);
        let e1 = harvested_energy(&link, &params, 0.2);
        assert!((harvested_energy(&link, &params, 0.4) - 2.0 * e1).abs() < 1e-15);
    }

    // reference values from an arbitrary-precision evaluation of the rate formulas
    #[test]
    fn frozen_sample_values() {
        let (link, params) = sample_link();
        let up = uplink_rate(&link, &params, 0.3, 0.2).unwrap();
        assert!((up - 11.597_301_562_719_347).abs() < 1e-12, "{up}");
        let down = downlink_rate(&link, &params, 0.2).unwrap();
        assert!((down - 6.579_470_570_833_32).abs() < 1e-12, "{down}");
        let d2d = d2d_throughput(&link, &params, 0.3).unwrap();
        assert!((d2d - 12.871_076_582_668_334).abs() < 1e-12, "{d2d}");
        let cell = cellular_throughput(&link, &params, 0.3, 0.2).unwrap();
        assert_eq!(cell, down);
    }

    #[test]
    fn zero_time_edges() {
        let (link, params) = sample_link();
        assert_eq!(uplink_rate(&link, &params, 0.0, 0.3).unwrap(), 0.0);
        assert_eq!(downlink_rate(&link, &params, 0.0).unwrap(), 0.0);
        assert_eq!(cellular_throughput(&link, &params, 0.4, 0.0).unwrap(), 0.0);
        assert_eq!(cellular_throughput(&link, &params, 0.0, 0.4).unwrap(), 0.0);
        assert_eq!(d2d_throughput(&link, &params, 0.0).unwrap(), 0.0);
        assert_eq!(d2d_throughput(&link, &params, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn uplink_vanishes_with_its_time() {
        let (link, params) = sample_link();
        let v = uplink_rate(&link, &params, 0.5, 0.5 - 1e-9).unwrap();
        assert!((0.0..1e-6).contains(&v), "{v}");
    }

    #[test]
    fn domain_errors() {
        let (link, params) = sample_link();
        assert!(uplink_rate(&link, &params, 0.5, 0.5).is_err());
        assert!(uplink_rate(&link, &params, -0.1, 0.5).is_err());
        assert!(cellular_throughput(&link, &params, 0.7, 0.4).is_err());
        assert!(downlink_rate(&link, &params, -1.0).is_err());
        assert!(d2d_throughput(&link, &params, 1.2).is_err());
        assert!(TimeAllocation::new(0.6, 0.5).is_err());
        assert!(TimeAllocation::new(0.3, 0.3).is_ok());
    }

    #[test]
    fn downlink_is_linear() {
        let (link, params) = sample_link();
        let a = downlink_rate(&link, &params, 0.1).unwrap();
        let b = downlink_rate(&link, &params, 0.2).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn tiny_snr_keeps_precision() {
        let (mut link, params) = sample_link();
        link.h_t = 1e-12;
        link.g = 1e-12;
        let v = d2d_throughput(&link, &params, 0.5).unwrap();
        let snr = link.d2d_snr_factor(&params);
        assert!(snr < 1e-8);
        // ln(1 + x) = x - x^2/2 + O(x^3)
        let series = 0.5 * (snr - 0.5 * snr * snr) / LN_2;
        assert!((v - series).abs() <= 1e-14 * v);
    }

    #[test]
    fn d2d_second_difference_negative() {
        let (link, params) = sample_link();
        let h = 1e-4;
        for i in 1..=100 {
            let t = i as f64 / 101.0;
            let f = |t| d2d_throughput(&link, &params, t).unwrap();
            assert!(f(t - h) + f(t + h) - 2.0 * f(t) < 0.0, "at {t}");
        }
    }

    fn arb_link() -> impl Strategy<Value = PairLink> {
        (-7.0f64..-2.0, -7.0f64..-2.0, -8.0f64..-2.0).prop_map(|(a, b, c)| PairLink {
            h_t: 10f64.powf(a),
            h_r: 10f64.powf(b),
            g: 10f64.powf(c),
            eta_t: 0.5,
            rho_t: 1.0,
            phi_r: 1.0,
        })
    }

    proptest! {
        #[test]
        fn cellular_jointly_concave(
            link in arb_link(),
            a in (0.01f64..0.98, 0.0f64..1.0),
            b in (0.01f64..0.98, 0.0f64..1.0),
        ) {
            let params = SystemParams::default();
            // map the unit square onto t_e + t_d < 1
            let pt = |(te, s): (f64, f64)| (te, s * (1.0 - te) * 0.999);
            let (pa, pb) = (pt(a), pt(b));
            let mid = (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1));
            let f = |p: (f64, f64)| cellular_throughput(&link, &params, p.0, p.1).unwrap();
            prop_assert!(f(mid) >= 0.5 * (f(pa) + f(pb)) - 1e-12);
        }

        #[test]
        fn d2d_strictly_concave(link in arb_link(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
            prop_assume!((a - b).abs() > 1e-2);
            let params = SystemParams::default();
            let f = |t| d2d_throughput(&link, &params, t).unwrap();
            prop_assert!(f(0.5 * (a + b)) - 0.5 * (f(a) + f(b)) >= 1e-12);
        }

        #[test]
        fn rates_increase_with_gains(link in arb_link(), te in 0.05f64..0.6, td in 0.0f64..0.3, k in 1.01f64..10.0) {
            let params = SystemParams::default();
            let boosted = |f: fn(&mut PairLink, f64)| { let mut l = link; f(&mut l, k); l };
            let up = uplink_rate(&link, &params, te, td).unwrap();
            let d2d = d2d_throughput(&link, &params, te).unwrap();
            let down = downlink_rate(&link, &params, td).unwrap();
            prop_assert!(up >= 0.0 && d2d >= 0.0 && down >= 0.0);
            let lt = boosted(|l, k| l.h_t *= k);
            prop_assert!(uplink_rate(&lt, &params, te, td).unwrap() > up);
            prop_assert!(d2d_throughput(&lt, &params, te).unwrap() > d2d);
            let lg = boosted(|l, k| l.g *= k);
            prop_assert!(d2d_throughput(&lg, &params, te).unwrap() > d2d);
            let lr = boosted(|l, k| l.h_r *= k);
            prop_assert!(downlink_rate(&lr, &params, td).unwrap() >= down);
        }
    }
}
