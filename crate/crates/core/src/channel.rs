//! Tapped-delay-line Rayleigh channels, time-synchronization errors, and
//! superposition of many transmitters at the edge server.
//!
//! With a cyclic prefix longer than every delay, the channel acts as a
//! circular convolution, i.e. a diagonal matrix on the subcarriers. Everything
//! here therefore works in the frequency domain.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{config, shape, Result};
use crate::waveform::{Modem, WaveformConfig};

/// Power-delay profile of a tapped delay line.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    /// Tap delays in seconds, nondecreasing.
    pub tap_delays: Vec<f64>,
    /// Tap powers in dB, normalized so the linear powers sum to one.
    pub tap_powers_db: Vec<f64>,
    pub label: String,
}

/// ITU Extended Pedestrian A delays in nanoseconds.
pub const EPA_DELAYS_NS: [f64; 7] = [0.0, 30.0, 70.0, 90.0, 110.0, 190.0, 410.0];
/// ITU Extended Pedestrian A relative powers in dB.
pub const EPA_POWERS_DB: [f64; 7] = [0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8];

impl ChannelProfile {
    /// Builds a profile and renormalizes its powers to unit sum.
    pub fn new(label: impl Into<String>, tap_delays: Vec<f64>, tap_powers_db: Vec<f64>) -> Result<Self> {
        if tap_delays.is_empty() {
            return config("channel profile needs at least one tap");
        }
        if tap_delays.len() != tap_powers_db.len() {
            return config(format!(
                "{} tap delays but {} tap powers",
                tap_delays.len(),
                tap_powers_db.len()
            ));
        }
        if tap_delays.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return config("tap delays must be finite and nonnegative");
        }
        if tap_delays.windows(2).any(|w| w[1] < w[0]) {
            return config("tap delays must be nondecreasing");
        }
        if tap_powers_db.iter().any(|p| p.is_nan() || *p == f64::INFINITY) {
            return config("tap powers must be finite dB values");
        }
        let total: f64 = tap_powers_db.iter().map(|p| db_to_linear(*p)).sum();
        if !(total > 0.0 && total.is_finite()) {
            return config("channel profile has zero total power");
        }
        let offset = 10.0 * total.log10();
        Ok(Self {
            tap_delays,
            tap_powers_db: tap_powers_db.iter().map(|p| p - offset).collect(),
            label: label.into(),
        })
    }

    /// The 7-tap EPA profile.
    pub fn epa() -> Self {
        Self::new(
            "epa",
            EPA_DELAYS_NS.iter().map(|d| d * 1e-9).collect(),
            EPA_POWERS_DB.to_vec(),
        )
        .expect("EPA table is valid")
    }

    /// Single unit-power tap at zero delay (flat Rayleigh fading).
    pub fn flat() -> Self {
        Self::new("flat", vec![0.0], vec![0.0]).expect("flat profile is valid")
    }

    /// Looks up a built-in profile by label.
    pub fn builtin(label: &str) -> Option<Self> {
        match label {
            "epa" => Some(Self::epa()),
            "flat" => Some(Self::flat()),
            _ => None,
        }
    }

    pub fn linear_powers(&self) -> Vec<f64> {
        self.tap_powers_db.iter().map(|p| db_to_linear(*p)).collect()
    }

    /// Delay spread `T_chn`, the largest tap delay.
    pub fn max_delay(&self) -> f64 {
        self.tap_delays.last().copied().unwrap_or(0.0)
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Timing impairments at the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncConfig {
    /// Spread of arrival times in seconds; offsets are uniform on `[0, t_sync]`.
    pub t_sync: f64,
    /// Samples by which the receiver backs off its DFT window.
    pub n_err: usize,
    pub enabled: bool,
}

impl SyncConfig {
    /// 55.6 ns arrival spread with a 3-sample back-off.
    pub fn lte() -> Self {
        Self {
            t_sync: 55.6e-9,
            n_err: 3,
            enabled: true,
        }
    }

    pub fn disabled() -> Self {
        Self {
            t_sync: 0.0,
            n_err: 0,
            enabled: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_sync.is_finite() && self.t_sync >= 0.0) {
            return config(format!("t_sync must be nonnegative, got {}", self.t_sync));
        }
        Ok(())
    }

    /// Receiver back-off `T_lock = N_err · T_sample`, zero when disabled.
    pub fn t_lock(&self, sample_rate: f64) -> f64 {
        if self.enabled {
            self.n_err as f64 / sample_rate
        } else {
            0.0
        }
    }

    /// Largest arrival offset that can be drawn.
    pub fn max_offset(&self) -> f64 {
        if self.enabled {
            self.t_sync
        } else {
            0.0
        }
    }
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self::disabled()
    }
}

/// One device's channel for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub delays: Vec<f64>,
    pub taps: Vec<Complex64>,
    /// Arrival offset of this device in seconds.
    pub arrival_offset: f64,
}

/// Circular complex Gaussian sample with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws independent Rayleigh taps and, when sync errors are on, a uniform
/// arrival offset on `[0, t_sync]`.
pub fn draw_channel<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    sync: &SyncConfig,
    rng: &mut R,
) -> ChannelRealization {
    let taps = profile
        .linear_powers()
        .into_iter()
        .map(|p| complex_gaussian(p, rng))
        .collect();
    let arrival_offset = if sync.enabled && sync.t_sync > 0.0 {
        rng.random::<f64>() * sync.t_sync
    } else {
        0.0
    };
    ChannelRealization {
        delays: profile.tap_delays.clone(),
        taps,
        arrival_offset,
    }
}

/// Rejects a scenario whose worst-case delay does not fit in the cyclic prefix.
pub fn check_cp(profile: &ChannelProfile, wf: &WaveformConfig, sync: &SyncConfig) -> Result<()> {
    sync.validate()?;
    fits_cp(profile.max_delay() + sync.max_offset() + sync.t_lock(wf.sample_rate), wf)
}

fn fits_cp(worst: f64, wf: &WaveformConfig) -> Result<()> {
    let cp = wf.cp_len as f64 / wf.sample_rate;
    // Half a picosecond of slack for delays quoted in rounded nanoseconds.
    if worst > cp + 0.5e-12 {
        return config(format!(
            "delay spread plus timing error ({:.1} ns) exceeds the cyclic prefix ({:.1} ns)",
            worst * 1e9,
            cp * 1e9
        ));
    }
    Ok(())
}

/// Channel frequency response on the `M` mapped subcarriers, with arrival
/// offset and receiver back-off folded in as phase rotations.
pub fn cfr(real: &ChannelRealization, wf: &WaveformConfig, sync: &SyncConfig) -> Result<Vec<Complex64>> {
    if real.delays.len() != real.taps.len() {
        return shape("tap delays and gains differ in length");
    }
    let max_delay = real.delays.iter().copied().fold(0.0, f64::max);
    let offset = if sync.enabled { real.arrival_offset } else { 0.0 };
    let t_lock = sync.t_lock(wf.sample_rate);
    fits_cp(max_delay + offset.max(sync.max_offset()) + t_lock, wf)?;
    let shift = offset + t_lock;
    Ok((0..wf.num_subcarriers)
        .map(|n| {
            let f = wf.bin_frequency(n);
            real.delays
                .iter()
                .zip(&real.taps)
                .map(|(&tau, &g)| g * Complex64::from_polar(1.0, -2.0 * PI * f * (tau + shift)))
                .sum()
        })
        .collect())
}

/// One device's contribution to a received symbol.
#[derive(Debug, Clone, Copy)]
pub struct Transmission<'a> {
    /// Precoded bin values (output of the precoder, before subcarrier mapping).
    pub bins: &'a [Complex64],
    /// Received power `P_k`.
    pub power: f64,
    pub cfr: &'a [Complex64],
}

/// Received bin vector `Pᴴ(Σ_k √P_k H_k ∘ x_k) + w`, with `w` circular Gaussian
/// of variance `noise_var` per bin. No equalization is applied.
pub fn superpose<R: Rng + ?Sized>(
    tx: &[Transmission<'_>],
    modem: &Modem,
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let m = modem.config().num_subcarriers;
    let mut acc = vec![Complex64::new(0.0, 0.0); m];
    for t in tx {
        if t.bins.len() != m || t.cfr.len() != m {
            return shape(format!(
                "transmission of {} bins with {} CFR taps on a {m}-bin grid",
                t.bins.len(),
                t.cfr.len()
            ));
        }
        let a = t.power.sqrt();
        for ((y, &x), &h) in acc.iter_mut().zip(t.bins).zip(t.cfr) {
            *y += a * h * x;
        }
    }
    let mut out = modem.decode(&acc)?;
    if noise_var > 0.0 {
        for y in &mut out {
            *y += complex_gaussian(noise_var, rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn epa_is_normalized() {
        let p = ChannelProfile::epa();
        let total: f64 = p.linear_powers().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((p.max_delay() - 410e-9).abs() < 1e-18);
        let rel: Vec<f64> = p.tap_powers_db.iter().map(|x| x - p.tap_powers_db[0]).collect();
        for (a, b) in rel.iter().zip(EPA_POWERS_DB) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_profiles_are_rejected() {
        assert!(ChannelProfile::new("z", vec![0.0], vec![f64::NEG_INFINITY]).is_err());
        assert!(ChannelProfile::new("e", vec![], vec![]).is_err());
        assert!(ChannelProfile::new("m", vec![0.0, 1e-9], vec![0.0]).is_err());
        assert!(ChannelProfile::new("o", vec![1e-9, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn unit_tap_gives_flat_response() {
        let wf = WaveformConfig::lte_fsk();
        let real = ChannelRealization {
            delays: vec![0.0],
            taps: vec![Complex64::new(1.0, 0.0)],
            arrival_offset: 0.0,
        };
        let h = cfr(&real, &wf, &SyncConfig::disabled()).unwrap();
        assert!(h.iter().all(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn one_sample_offset_is_a_phase_ramp() {
        let wf = WaveformConfig::lte_fsk();
        let sync = SyncConfig {
            t_sync: 1.0 / wf.sample_rate,
            n_err: 0,
            enabled: true,
        };
        let real = ChannelRealization {
            delays: vec![0.0],
            taps: vec![Complex64::new(1.0, 0.0)],
            arrival_offset: 1.0 / wf.sample_rate,
        };
        let h = cfr(&real, &wf, &sync).unwrap();
        for (n, x) in h.iter().enumerate() {
            let idx = wf.subcarrier_index(n) as f64;
            let want = Complex64::from_polar(1.0, -2.0 * PI * idx / 2048.0);
            assert!((x - want).norm() < 1e-9);
        }
    }

    #[test]
    fn delays_beyond_cp_are_rejected() {
        let mut wf = WaveformConfig::lte_fsk();
        wf.cp_len = 8;
        let mut r = rng::stream(1, &[]);
        let real = draw_channel(&ChannelProfile::epa(), &SyncConfig::disabled(), &mut r);
        assert!(cfr(&real, &wf, &SyncConfig::disabled()).is_err());
        assert!(check_cp(&ChannelProfile::epa(), &wf, &SyncConfig::disabled()).is_err());
        wf.cp_len = 144;
        assert!(cfr(&real, &wf, &SyncConfig::lte()).is_ok());
        assert!(check_cp(&ChannelProfile::epa(), &wf, &SyncConfig::lte()).is_ok());
    }

    #[test]
    fn superpose_is_linear() {
        let mut wf = WaveformConfig::fsk_mv(16, 8, 1.0);
        wf.subcarrier_offset = 0;
        let modem = Modem::new(&wf).unwrap();
        let s: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let ones = vec![Complex64::new(1.0, 0.0); 8];
        let mut r = rng::stream(0, &[]);
        let t = Transmission { bins: &s, power: 4.0, cfr: &ones };
        let y = superpose(&[t], &modem, 0.0, &mut r).unwrap();
        for (a, b) in y.iter().zip(&s) {
            assert!((a - 2.0 * b).norm() < 1e-15);
        }
        let t1 = Transmission { bins: &s, power: 1.0, cfr: &ones };
        let y = superpose(&[t1, t1], &modem, 0.0, &mut r).unwrap();
        for (a, b) in y.iter().zip(&s) {
            assert!((a - 2.0 * b).norm() < 1e-15);
        }
    }

    #[test]
    fn superpose_rejects_wrong_length() {
        let wf = WaveformConfig::fsk_mv(16, 8, 1.0);
        let modem = Modem::new(&wf).unwrap();
        let s = vec![Complex64::new(1.0, 0.0); 7];
        let h = vec![Complex64::new(1.0, 0.0); 8];
        let mut r = rng::stream(0, &[]);
        let t = Transmission { bins: &s, power: 1.0, cfr: &h };
        assert!(superpose(&[t], &modem, 0.0, &mut r).is_err());
    }
}
