//! Cell deployment, path loss with partial power control, and the average
//! received-power factor.

use rand::Rng;

use crate::error::{config, domain, Result};
use crate::rng::{self, tag};

/// How edge-device link distances are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeploymentMode {
    /// Distances on equal-area rings: `d_k = sqrt(R_min² + (k-1)(R_max² - R_min²)/(K-1))`.
    #[default]
    DeterministicRing,
    /// Independent uniform positions in the annulus `[R_min, R_max]`.
    UniformRandom,
}

/// Scenario parameters shared by every experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_eds: usize,
    /// Minimum link distance in meters.
    pub r_min: f64,
    /// Cell radius in meters.
    pub r_max: f64,
    /// Reference distance in meters at which the received power is `p_ref`.
    pub r_ref: f64,
    pub path_loss_exp: f64,
    /// Path-loss compensation exponent, `0 ≤ β ≤ α`.
    pub pc_comp: f64,
    /// Received power at the reference distance, watts.
    pub p_ref: f64,
    /// Noise variance per bin, watts.
    pub noise_var: f64,
    pub deployment_mode: DeploymentMode,
    pub rng_seed: u64,
}

impl Default for SystemConfig {
    /// 50 devices in a 10-100 m cell with α = 4, β = 2 and 20 dB SNR at 10 m.
    fn default() -> Self {
        Self {
            num_eds: 50,
            r_min: 10.0,
            r_max: 100.0,
            r_ref: 10.0,
            path_loss_exp: 4.0,
            pc_comp: 2.0,
            p_ref: 1.0,
            noise_var: noise_var_from_snr_db(1.0, 20.0),
            deployment_mode: DeploymentMode::DeterministicRing,
            rng_seed: 0,
        }
    }
}

impl SystemConfig {
    /// Effective path-loss exponent `α - β`.
    pub fn alpha_eff(&self) -> f64 {
        self.path_loss_exp - self.pc_comp
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_eds == 0 {
            return config("num_eds must be at least 1");
        }
        for (name, v) in [("r_min", self.r_min), ("r_max", self.r_max), ("r_ref", self.r_ref)] {
            if !(v.is_finite() && v > 0.0) {
                return config(format!("{name} must be finite and positive, got {v}"));
            }
        }
        if !(self.r_ref <= self.r_min && self.r_min <= self.r_max) {
            return config(format!(
                "radii must satisfy r_ref <= r_min <= r_max, got {} / {} / {}",
                self.r_ref, self.r_min, self.r_max
            ));
        }
        if !(self.path_loss_exp.is_finite() && self.path_loss_exp >= 0.0) {
            return config("path_loss_exp must be nonnegative");
        }
        if !(self.pc_comp >= 0.0 && self.pc_comp <= self.path_loss_exp) {
            return config(format!(
                "pc_comp must lie in [0, path_loss_exp = {}], got {}",
                self.path_loss_exp, self.pc_comp
            ));
        }
        if !(self.p_ref.is_finite() && self.p_ref > 0.0) {
            return config("p_ref must be positive");
        }
        if !(self.noise_var.is_finite() && self.noise_var >= 0.0) {
            return config("noise_var must be nonnegative");
        }
        Ok(())
    }
}

/// Noise variance giving `snr_db` = `p_ref / σ²` at the reference distance.
pub fn noise_var_from_snr_db(p_ref: f64, snr_db: f64) -> f64 {
    p_ref / 10f64.powf(snr_db / 10.0)
}

/// Link distances and received powers of every edge device.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub distances: Vec<f64>,
    pub powers: Vec<f64>,
}

impl Deployment {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// Received power `(d / R_ref)^-(α-β) · P_ref`.
pub fn received_power(d: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return domain(format!("link distance must be positive, got {d}"));
    }
    Ok((d / cfg.r_ref).powf(-cfg.alpha_eff()) * cfg.p_ref)
}

/// Places `cfg.num_eds` devices and computes their received powers.
pub fn build_deployment(cfg: &SystemConfig) -> Result<Deployment> {
    cfg.validate()?;
    let k = cfg.num_eds;
    let span = cfg.r_max * cfg.r_max - cfg.r_min * cfg.r_min;
    let distances: Vec<f64> = match cfg.deployment_mode {
        DeploymentMode::DeterministicRing if k == 1 => vec![cfg.r_min],
        DeploymentMode::DeterministicRing => (0..k)
            .map(|i| {
                let d2 = cfg.r_min * cfg.r_min + i as f64 * span / (k - 1) as f64;
                d2.sqrt().clamp(cfg.r_min, cfg.r_max)
            })
            .collect(),
        DeploymentMode::UniformRandom => {
            let mut rng = rng::stream(cfg.rng_seed, &[tag::DEPLOYMENT]);
            (0..k)
                .map(|_| sample_link_distance(cfg.r_min, cfg.r_max, &mut rng))
                .collect()
        }
    };
    let powers = distances
        .iter()
        .map(|&d| received_power(d, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(Deployment { distances, powers })
}

/// Inverse-CDF draw from the annulus link-distance pdf `2d / (R_max² - R_min²)`.
pub fn sample_link_distance<R: Rng + ?Sized>(r_min: f64, r_max: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (r_min * r_min + u * (r_max * r_max - r_min * r_min))
        .sqrt()
        .clamp(r_min, r_max)
}

/// Branch width around `α_eff = 2` inside which the logarithmic form is used.
pub const LOG_BRANCH_TOL: f64 = 1e-9;

/// Average received power over a uniform deployment, `E[(d/R_ref)^-α_eff] · P_ref`.
///
/// Lies in `[0, 1]` when `P_ref = 1`, equals `P_ref` under perfect power
/// control, and approaches `(R_min/R_ref)^-α_eff · P_ref` as the cell shrinks.
pub fn gamma_factor(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(gamma_closed_form(
        cfg.alpha_eff(),
        cfg.r_min,
        cfg.r_max,
        cfg.r_ref,
        cfg.p_ref,
    ))
}

fn gamma_closed_form(a: f64, r_min: f64, r_max: f64, r_ref: f64, p_ref: f64) -> f64 {
    if a == 0.0 {
        return p_ref;
    }
    let span = r_max * r_max - r_min * r_min;
    if span <= 0.0 {
        return (r_min / r_ref).powf(-a) * p_ref;
    }
    let lead = 2.0 * r_ref.powf(a) * p_ref / span;
    let log_ratio = (r_max / r_min).ln();
    if (a - 2.0).abs() < LOG_BRANCH_TOL {
        return lead * log_ratio;
    }
    // (R_min^e - R_max^e)/(a - 2) with e = 2 - a, written with expm1 so it
    // stays accurate as a approaches 2.
    let e = 2.0 - a;
    lead * r_min.powf(e) * (e * log_ratio).exp_m1() / e
}
