//! Precoded-OFDM synthesis, vote resource mapping, and PMEPR measurement.
//!
//! A transmitted symbol is `x = IDFT_N · M_f · P · s` where `s` holds the `M`
//! bin values, `P` is the precoder (identity for OFDM, a unitary `M`-point DFT
//! for DFT-s-OFDM) and `M_f` places the precoder output on `M` contiguous
//! subcarriers. All transforms are unitary, so energy is preserved end to end.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, domain, shape, Result};

/// Linear precoder applied to the bin vector before subcarrier mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precoder {
    /// Plain OFDM; vote resources are subcarriers.
    Identity,
    /// DFT-spread OFDM; vote resources are time-domain pulses.
    DftSpread,
}

/// Numerology and vote layout of one precoded-OFDM waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformConfig {
    pub idft_size: usize,
    pub num_subcarriers: usize,
    pub precoder: Precoder,
    /// Active bins per vote.
    pub m_seq: usize,
    /// Silent guard bins following the active bins of each vote.
    pub m_gap: usize,
    /// Vote sequence `p`, `‖p‖² = m_seq`.
    pub seq: Vec<Complex64>,
    /// Signed subcarrier index of bin 0.
    pub subcarrier_offset: i64,
    pub cp_len: usize,
    /// Samples per second.
    pub sample_rate: f64,
}

/// LTE 20 MHz numerology: 2048-point IDFT at 30.72 Msps, 1200 subcarriers.
pub const LTE_IDFT_SIZE: usize = 2048;
pub const LTE_SUBCARRIERS: usize = 1200;
pub const LTE_SAMPLE_RATE: f64 = 30.72e6;
/// Normal cyclic prefix of LTE at 30.72 Msps.
pub const LTE_CP_LEN: usize = 144;

impl WaveformConfig {
    /// FSK-MV: OFDM, one bin per vote, no guard, `p = [1]`.
    pub fn fsk_mv(idft_size: usize, num_subcarriers: usize, sample_rate: f64) -> Self {
        Self {
            idft_size,
            num_subcarriers,
            precoder: Precoder::Identity,
            m_seq: 1,
            m_gap: 0,
            seq: vec![Complex64::new(1.0, 0.0)],
            subcarrier_offset: -((num_subcarriers / 2) as i64),
            cp_len: 0,
            sample_rate,
        }
    }

    /// PPM-MV: DFT-s-OFDM pulses of `m_seq` bins with alternating-sign `p`.
    pub fn ppm_mv(
        idft_size: usize,
        num_subcarriers: usize,
        sample_rate: f64,
        m_seq: usize,
        m_gap: usize,
    ) -> Self {
        Self {
            precoder: Precoder::DftSpread,
            m_seq,
            m_gap,
            seq: alternating_sequence(m_seq),
            ..Self::fsk_mv(idft_size, num_subcarriers, sample_rate)
        }
    }

    /// FSK-MV on the LTE 20 MHz grid with the normal CP.
    pub fn lte_fsk() -> Self {
        Self {
            cp_len: LTE_CP_LEN,
            ..Self::fsk_mv(LTE_IDFT_SIZE, LTE_SUBCARRIERS, LTE_SAMPLE_RATE)
        }
    }

    /// PPM-MV on the LTE 20 MHz grid with the normal CP.
    pub fn lte_ppm(m_seq: usize, m_gap: usize) -> Self {
        Self {
            cp_len: LTE_CP_LEN,
            ..Self::ppm_mv(LTE_IDFT_SIZE, LTE_SUBCARRIERS, LTE_SAMPLE_RATE, m_seq, m_gap)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.idft_size == 0 || self.num_subcarriers == 0 {
            return config("idft_size and num_subcarriers must be positive");
        }
        if self.num_subcarriers > self.idft_size {
            return config(format!(
                "num_subcarriers ({}) exceeds idft_size ({})",
                self.num_subcarriers, self.idft_size
            ));
        }
        if self.m_seq == 0 {
            return config("m_seq must be at least 1");
        }
        if 2 * self.block_len() > self.num_subcarriers {
            return config(format!(
                "a vote pair needs {} bins but only {} are available",
                2 * self.block_len(),
                self.num_subcarriers
            ));
        }
        if self.seq.len() != self.m_seq {
            return config(format!(
                "sequence length {} does not match m_seq {}",
                self.seq.len(),
                self.m_seq
            ));
        }
        let norm: f64 = self.seq.iter().map(|c| c.norm_sqr()).sum();
        if (norm - self.m_seq as f64).abs() > 1e-12 * self.m_seq as f64 {
            return config(format!("sequence energy {norm} must equal m_seq {}", self.m_seq));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return config("sample_rate must be positive");
        }
        Ok(())
    }

    /// Bins occupied by one vote including its guard, `m_seq + m_gap`.
    pub fn block_len(&self) -> usize {
        self.m_seq + self.m_gap
    }

    pub fn votes_per_symbol(&self) -> Result<usize> {
        votes_per_symbol(self.num_subcarriers, self.m_seq, self.m_gap)
    }

    pub fn energy_norm(&self) -> f64 {
        energy_norm(self.m_seq, self.m_gap)
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.sample_rate / self.idft_size as f64
    }

    /// Duration of one DFT-s-OFDM bin, `N · T_sample / M`.
    pub fn t_spacing(&self) -> f64 {
        self.idft_size as f64 / (self.sample_rate * self.num_subcarriers as f64)
    }

    /// Signed subcarrier index carrying bin `n`.
    pub fn subcarrier_index(&self, n: usize) -> i64 {
        self.subcarrier_offset + n as i64
    }

    /// Baseband frequency of bin `n` in hertz.
    pub fn bin_frequency(&self, n: usize) -> f64 {
        self.subcarrier_index(n) as f64 * self.subcarrier_spacing()
    }

    fn fft_index(&self, n: usize) -> usize {
        self.subcarrier_index(n).rem_euclid(self.idft_size as i64) as usize
    }
}

/// `[1, -1, 1, -1, ...]` of length `len`.
pub fn alternating_sequence(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect()
}

/// Gradients carried per precoded symbol, `floor(M / (2 (M_seq + M_gap)))`.
pub fn votes_per_symbol(num_subcarriers: usize, m_seq: usize, m_gap: usize) -> Result<usize> {
    if m_seq == 0 {
        return config("m_seq must be at least 1");
    }
    let pair = 2 * (m_seq + m_gap);
    if pair > num_subcarriers {
        return config(format!(
            "vote pair of {pair} bins does not fit in {num_subcarriers} subcarriers"
        ));
    }
    Ok(num_subcarriers / pair)
}

/// Smallest guard, in bins, covering delay spread plus timing errors.
pub fn required_guard_bins(t_chn: f64, t_sync: f64, t_lock: f64, t_spacing: f64) -> Result<usize> {
    if !(t_spacing > 0.0) {
        return domain(format!("t_spacing must be positive, got {t_spacing}"));
    }
    for (name, v) in [("t_chn", t_chn), ("t_sync", t_sync), ("t_lock", t_lock)] {
        if !(v >= 0.0) || !v.is_finite() {
            return domain(format!("{name} must be a nonnegative duration, got {v}"));
        }
    }
    Ok(((t_chn + t_sync + t_lock) / t_spacing).ceil() as usize)
}

/// Per-vote energy normalization `E_s = 2 (M_seq + M_gap) / M_seq`.
pub fn energy_norm(m_seq: usize, m_gap: usize) -> f64 {
    2.0 * (m_seq + m_gap) as f64 / m_seq as f64
}

/// A (symbol, block) resource. Block `n` spans bins
/// `n·(m_seq+m_gap) .. (n+1)·(m_seq+m_gap)`; the first `m_seq` carry the vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resource {
    pub symbol: usize,
    pub block: usize,
}

/// The two resources dedicated to one gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VotePair {
    pub plus: Resource,
    pub minus: Resource,
}

/// Assignment of gradient indices to vote resources.
///
/// Gradients fill symbols in row-major order; the `−` resource sits in the
/// block right after the `+` resource of the same symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceMapping {
    pub num_gradients: usize,
    pub num_symbols: usize,
    pub votes_per_symbol: usize,
    pub block_len: usize,
    pub m_seq: usize,
}

impl ResourceMapping {
    /// Resources of gradient `i` (0-based).
    pub fn assign(&self, i: usize) -> VotePair {
        debug_assert!(i < self.num_gradients);
        let symbol = i / self.votes_per_symbol;
        let block = 2 * (i % self.votes_per_symbol);
        VotePair {
            plus: Resource { symbol, block },
            minus: Resource {
                symbol,
                block: block + 1,
            },
        }
    }

    /// First bin of `block`.
    pub fn block_start(&self, block: usize) -> usize {
        block * self.block_len
    }

    pub fn iter(&self) -> impl Iterator<Item = VotePair> + '_ {
        (0..self.num_gradients).map(|i| self.assign(i))
    }
}

pub fn build_mapping(num_gradients: usize, wf: &WaveformConfig) -> Result<ResourceMapping> {
    wf.validate()?;
    if num_gradients == 0 {
        return config("at least one gradient is required");
    }
    let vps = wf.votes_per_symbol()?;
    Ok(ResourceMapping {
        num_gradients,
        num_symbols: num_gradients.div_ceil(vps),
        votes_per_symbol: vps,
        block_len: wf.block_len(),
        m_seq: wf.m_seq,
    })
}

/// One transmitted symbol: the bin vector, its precoded subcarrier values and
/// the time-domain samples (without cyclic prefix).
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodedSymbol {
    pub freq: Vec<Complex64>,
    pub bins: Vec<Complex64>,
    pub time: Vec<Complex64>,
}

impl PrecodedSymbol {
    /// Time samples with a cyclic prefix of `cp_len` samples prepended.
    pub fn time_with_cp(&self, cp_len: usize) -> Vec<Complex64> {
        let n = self.time.len();
        let cp = cp_len.min(n);
        self.time[n - cp..].iter().chain(&self.time).copied().collect()
    }
}

/// FFT plans for one waveform configuration.
#[derive(Clone)]
pub struct Modem {
    wf: WaveformConfig,
    idft: Arc<dyn Fft<f64>>,
    dft: Arc<dyn Fft<f64>>,
    spread: Arc<dyn Fft<f64>>,
    despread: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Modem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Modem").field("wf", &self.wf).finish()
    }
}

fn scale(v: &mut [Complex64], s: f64) {
    for x in v {
        *x *= s;
    }
}

impl Modem {
    pub fn new(wf: &WaveformConfig) -> Result<Self> {
        wf.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            wf: wf.clone(),
            idft: planner.plan_fft_inverse(wf.idft_size),
            dft: planner.plan_fft_forward(wf.idft_size),
            spread: planner.plan_fft_forward(wf.num_subcarriers),
            despread: planner.plan_fft_inverse(wf.num_subcarriers),
        })
    }

    pub fn config(&self) -> &WaveformConfig {
        &self.wf
    }

    /// Applies the precoder to a bin vector.
    pub fn precode(&self, freq: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(freq)?;
        let mut out = freq.to_vec();
        if self.wf.precoder == Precoder::DftSpread {
            self.spread.process(&mut out);
            let s = 1.0 / (out.len() as f64).sqrt();
            scale(&mut out, s);
        }
        Ok(out)
    }

    /// Inverts the precoder (`Pᴴ`).
    pub fn decode(&self, bins: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(bins)?;
        let mut out = bins.to_vec();
        if self.wf.precoder == Precoder::DftSpread {
            self.despread.process(&mut out);
            let s = 1.0 / (out.len() as f64).sqrt();
            scale(&mut out, s);
        }
        Ok(out)
    }

    /// Maps precoded bins onto the subcarrier grid and applies the unitary IDFT.
    pub fn to_time(&self, bins: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(bins)?;
        let mut grid = vec![Complex64::new(0.0, 0.0); self.wf.idft_size];
        for (n, &b) in bins.iter().enumerate() {
            grid[self.wf.fft_index(n)] = b;
        }
        self.idft.process(&mut grid);
        scale(&mut grid, 1.0 / (self.wf.idft_size as f64).sqrt());
        Ok(grid)
    }

    /// Unitary DFT of `N` received samples followed by subcarrier de-mapping.
    pub fn from_time(&self, time: &[Complex64]) -> Result<Vec<Complex64>> {
        if time.len() != self.wf.idft_size {
            return shape(format!(
                "expected {} time samples, got {}",
                self.wf.idft_size,
                time.len()
            ));
        }
        let mut grid = time.to_vec();
        self.dft.process(&mut grid);
        let s = 1.0 / (self.wf.idft_size as f64).sqrt();
        Ok((0..self.wf.num_subcarriers)
            .map(|n| grid[self.wf.fft_index(n)] * s)
            .collect())
    }

    pub fn synthesize(&self, freq: &[Complex64]) -> Result<PrecodedSymbol> {
        let bins = self.precode(freq)?;
        let time = self.to_time(&bins)?;
        Ok(PrecodedSymbol {
            freq: freq.to_vec(),
            bins,
            time,
        })
    }

    /// Full receive chain for `N` samples (CP already removed): DFT, de-map,
    /// decode.
    pub fn receive(&self, time: &[Complex64]) -> Result<Vec<Complex64>> {
        let bins = self.from_time(time)?;
        self.decode(&bins)
    }

    fn check_len(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.wf.num_subcarriers {
            return shape(format!(
                "expected {} bins, got {}",
                self.wf.num_subcarriers,
                v.len()
            ));
        }
        Ok(())
    }
}

/// Synthesizes one precoded symbol. Builds FFT plans on each call; use
/// [`Modem`] in loops.
pub fn synthesize(freq: &[Complex64], wf: &WaveformConfig) -> Result<PrecodedSymbol> {
    Modem::new(wf)?.synthesize(freq)
}

/// Default oversampling factor for PMEPR.
pub const PMEPR_OVERSAMPLE: usize = 4;

/// Peak-to-mean envelope power ratio in dB.
///
/// The samples are re-synthesized on an IDFT `oversample` times longer by
/// zero-padding the spectrum between its positive and negative halves, so
/// peaks falling between the original samples are captured.
pub fn pmepr(time: &[Complex64], oversample: usize) -> Result<f64> {
    let n = time.len();
    if n == 0 {
        return domain("empty signal");
    }
    let oversample = oversample.max(1);
    let mut planner = FftPlanner::new();
    let mut spec = time.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let len = n * oversample;
    let mut padded = vec![Complex64::new(0.0, 0.0); len];
    let half = n.div_ceil(2);
    padded[..half].copy_from_slice(&spec[..half]);
    padded[len - (n - half)..].copy_from_slice(&spec[half..]);
    planner.plan_fft_inverse(len).process(&mut padded);

    let powers = padded.iter().map(|c| c.norm_sqr());
    let (peak, sum) = powers.fold((0.0f64, 0.0f64), |(p, s), x| (p.max(x), s + x));
    if !(sum > 0.0) {
        return domain("PMEPR of an all-zero signal is undefined");
    }
    let mean = sum / len as f64;
    Ok(10.0 * (peak / mean).log10())
}

/// Uniform QPSK point `exp(j(π/4 + kπ/2))`.
pub fn qpsk_point(k: u8) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0 + f64::from(k % 4) * PI / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn votes_per_symbol_paper_numerology() {
        assert_eq!(votes_per_symbol(1200, 1, 0).unwrap(), 600);
        assert_eq!(123_090usize.div_ceil(600), 206);
        for (m_seq, vps, s) in [(1, 50, 2462), (4, 40, 3078), (9, 30, 4103)] {
            assert_eq!(votes_per_symbol(1200, m_seq, 11).unwrap(), vps);
            assert_eq!(123_090usize.div_ceil(vps), s);
        }
        assert_eq!(votes_per_symbol(2, 1, 0).unwrap(), 1);
        assert!(votes_per_symbol(10, 4, 2).is_err());
        assert!(votes_per_symbol(10, 0, 2).is_err());
    }

    #[test]
    fn guard_bins() {
        assert_eq!(required_guard_bins(410e-9, 55.6e-9, 97.6e-9, 55.6e-9).unwrap(), 11);
        assert_eq!(required_guard_bins(0.0, 0.0, 0.0, 55.6e-9).unwrap(), 0);
        assert_eq!(required_guard_bins(56e-9, 0.0, 0.0, 55.6e-9).unwrap(), 2);
        assert!(required_guard_bins(-1e-9, 0.0, 0.0, 55.6e-9).is_err());
        assert!(required_guard_bins(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn lte_guard_from_numerology() {
        let wf = WaveformConfig::lte_ppm(1, 11);
        let t_lock = 3.0 * wf.sample_period();
        assert!((wf.t_spacing() - 55.6e-9).abs() < 0.1e-9);
        assert_eq!(required_guard_bins(410e-9, 55.6e-9, t_lock, wf.t_spacing()).unwrap(), 11);
    }

    #[test]
    fn energy_norm_values() {
        assert_eq!(energy_norm(1, 0), 2.0);
        assert_eq!(energy_norm(1, 11), 24.0);
        assert_eq!(energy_norm(4, 11), 7.5);
    }

    #[test]
    fn mapping_row_major() {
        let mut wf = WaveformConfig::fsk_mv(8, 4, 1.0);
        wf.subcarrier_offset = 0;
        let m = build_mapping(3, &wf).unwrap();
        assert_eq!(m.votes_per_symbol, 2);
        assert_eq!(m.num_symbols, 2);
        let r = |symbol, block| Resource { symbol, block };
        assert_eq!(m.assign(0), VotePair { plus: r(0, 0), minus: r(0, 1) });
        assert_eq!(m.assign(1), VotePair { plus: r(0, 2), minus: r(0, 3) });
        assert_eq!(m.assign(2), VotePair { plus: r(1, 0), minus: r(1, 1) });
    }

    #[test]
    fn mapping_paper_size_is_injective() {
        let wf = WaveformConfig::lte_fsk();
        let m = build_mapping(123_090, &wf).unwrap();
        assert_eq!(m.num_symbols, 206);
        assert_eq!(m.assign(123_089).plus.symbol, 205);
        let mut seen = std::collections::HashSet::new();
        for pair in m.iter() {
            assert_eq!(pair.minus.symbol, pair.plus.symbol);
            assert_eq!(pair.minus.block, pair.plus.block + 1);
            assert!(seen.insert(pair.plus));
            assert!(seen.insert(pair.minus));
        }
        assert_eq!(seen.len(), 2 * 123_090);
    }

    #[test]
    fn config_validation() {
        let mut wf = WaveformConfig::lte_ppm(4, 11);
        assert!(wf.validate().is_ok());
        wf.seq[0] = c(2.0);
        assert!(wf.validate().is_err());
        let wf = WaveformConfig::fsk_mv(16, 32, 1.0);
        assert!(wf.validate().is_err());
    }

    #[test]
    fn zero_in_zero_out() {
        let wf = WaveformConfig::lte_fsk();
        let s = synthesize(&vec![c(0.0); 1200], &wf).unwrap();
        assert!(s.time.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn single_bin_is_constant_modulus() {
        let wf = WaveformConfig::lte_fsk();
        let mut f = vec![c(0.0); 1200];
        f[17] = c(1.0);
        let s = synthesize(&f, &wf).unwrap();
        let expected = 1.0 / (2048f64).sqrt();
        assert!(s.time.iter().all(|x| (x.norm() - expected).abs() < 1e-12));
        let e: f64 = s.time.iter().map(|x| x.norm_sqr()).sum();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(pmepr(&s.time, 4).unwrap().abs() < 1e-9);
    }

    #[test]
    fn parseval_and_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for wf in [WaveformConfig::lte_fsk(), WaveformConfig::lte_ppm(4, 11)] {
            let modem = Modem::new(&wf).unwrap();
            let f: Vec<Complex64> = (0..1200)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let s = modem.synthesize(&f).unwrap();
            let ef: f64 = f.iter().map(|x| x.norm_sqr()).sum();
            let et: f64 = s.time.iter().map(|x| x.norm_sqr()).sum();
            assert!((ef - et).abs() / ef < 1e-9);
            let back = modem.receive(&s.time).unwrap();
            for (a, b) in f.iter().zip(&back) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cyclic_prefix_copies_tail() {
        let wf = WaveformConfig::lte_fsk();
        let mut f = vec![c(0.0); 1200];
        f[3] = c(1.0);
        f[700] = Complex64::new(0.0, 1.0);
        let s = synthesize(&f, &wf).unwrap();
        let with_cp = s.time_with_cp(144);
        assert_eq!(with_cp.len(), 2048 + 144);
        assert_eq!(&with_cp[..144], &s.time[2048 - 144..]);
        assert_eq!(&with_cp[144..], &s.time[..]);
    }

    #[test]
    fn all_ones_pmepr_equals_subcarrier_count() {
        let wf = WaveformConfig::lte_fsk();
        let s = synthesize(&vec![c(1.0); 1200], &wf).unwrap();
        let db = pmepr(&s.time, 4).unwrap();
        assert!((db - 10.0 * 1200f64.log10()).abs() < 0.1, "{db}");
    }

    #[test]
    fn pmepr_rejects_zero_signal() {
        assert!(pmepr(&[c(0.0); 16], 4).is_err());
        assert!(pmepr(&[], 4).is_err());
    }

    #[test]
    fn ppm_pulse_is_compact() {
        let wf = WaveformConfig::ppm_mv(2048, 1200, LTE_SAMPLE_RATE, 4, 11);
        let mut f = vec![c(0.0); 1200];
        f[..4].copy_from_slice(&alternating_sequence(4));
        let s = synthesize(&f, &wf).unwrap();
        let p: Vec<f64> = s.time.iter().map(|x| x.norm_sqr()).collect();
        let total: f64 = p.iter().sum();
        let w = (4.0 * 2048.0 / 1200.0f64).ceil() as usize + 2;
        let best = (0..p.len())
            .map(|start| (0..w).map(|j| p[(start + j) % p.len()]).sum::<f64>())
            .fold(0.0, f64::max);
        assert!(best / total >= 0.9, "window {w} holds {}", best / total);
    }

    #[test]
    fn qpsk_points_are_unit_modulus() {
        for k in 0..4 {
            assert!((qpsk_point(k).norm() - 1.0).abs() < 1e-15);
        }
        assert!((qpsk_point(0) - Complex64::new(1.0, 1.0) / 2f64.sqrt()).norm() < 1e-15);
    }
}
