//! End-to-end uplink of one communication round: every device encodes its
//! gradients, the symbols cross independent channels, the server detects.
//!
//! [`OacLink`] is the non-coherent majority-vote scheme; [`ObdaLink`] is the
//! coherent one-bit digital aggregation baseline with truncated channel
//! inversion. Random draws come from per-device streams keyed by the caller's
//! path, so results do not depend on the execution policy.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{self, cfr, draw_channel, ChannelProfile, SyncConfig, Transmission};
use crate::codec::{self, WeightScheme};
use crate::error::{config, shape, Result};
use crate::exec::Exec;
use crate::rng::{self, tag};
use crate::waveform::{build_mapping, Modem, ResourceMapping, WaveformConfig};

/// Propagation between each device and the server.
#[derive(Debug, Clone, PartialEq)]
pub enum Propagation {
    /// Unit gain on every subcarrier; timing errors are ignored.
    Ideal,
    /// Independent Rayleigh realization of the profile per device and round.
    Fading(ChannelProfile),
}

impl Propagation {
    fn response(
        &self,
        wf: &WaveformConfig,
        sync: &SyncConfig,
        rng: &mut rng::SimRng,
    ) -> Result<Vec<Complex64>> {
        match self {
            Propagation::Ideal => Ok(vec![Complex64::new(1.0, 0.0); wf.num_subcarriers]),
            Propagation::Fading(p) => cfr(&draw_channel(p, sync, rng), wf, sync),
        }
    }
}

fn path_with(path: &[u64], extra: &[u64]) -> Vec<u64> {
    path.iter().chain(extra).copied().collect()
}

fn check_inputs(grads: &[Vec<f64>], powers: &[f64], q: usize) -> Result<()> {
    if grads.is_empty() {
        return shape("no devices");
    }
    if grads.len() != powers.len() {
        return shape(format!("{} gradient vectors but {} powers", grads.len(), powers.len()));
    }
    if let Some(g) = grads.iter().find(|g| g.len() != q) {
        return shape(format!("gradient vector of length {} for Q = {q}", g.len()));
    }
    if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return shape("received powers must be finite and nonnegative");
    }
    Ok(())
}

/// Majority vote over the air with FSK-MV or PPM-MV.
#[derive(Debug, Clone)]
pub struct OacLink {
    pub scheme: WeightScheme,
    pub propagation: Propagation,
    pub sync: SyncConfig,
    pub noise_var: f64,
    modem: Modem,
    mapping: ResourceMapping,
}

impl OacLink {
    pub fn new(
        num_gradients: usize,
        waveform: &WaveformConfig,
        scheme: WeightScheme,
        propagation: Propagation,
        sync: SyncConfig,
        noise_var: f64,
    ) -> Result<Self> {
        scheme.validate()?;
        sync.validate()?;
        if !(noise_var.is_finite() && noise_var >= 0.0) {
            return config("noise_var must be nonnegative");
        }
        if let Propagation::Fading(p) = &propagation {
            channel::check_cp(p, waveform, &sync)?;
        }
        Ok(Self {
            scheme,
            propagation,
            sync,
            noise_var,
            modem: Modem::new(waveform)?,
            mapping: build_mapping(num_gradients, waveform)?,
        })
    }

    pub fn mapping(&self) -> &ResourceMapping {
        &self.mapping
    }

    pub fn waveform(&self) -> &WaveformConfig {
        self.modem.config()
    }

    /// Superposed, decoded bin vectors of every symbol at the server.
    pub fn receive(
        &self,
        grads: &[Vec<f64>],
        powers: &[f64],
        seed: u64,
        path: &[u64],
        exec: Exec,
    ) -> Result<Vec<Vec<Complex64>>> {
        check_inputs(grads, powers, self.mapping.num_gradients)?;
        let wf = self.modem.config();
        let per_ed = exec.map(0..grads.len(), |k| -> Result<_> {
            let mut enc = rng::stream(seed, &path_with(path, &[tag::ENCODE, k as u64]));
            let frame = codec::encode(&grads[k], &self.scheme, &self.mapping, wf, &mut enc)?;
            let bins = frame
                .symbols
                .iter()
                .map(|s| self.modem.precode(s))
                .collect::<Result<Vec<_>>>()?;
            let mut ch = rng::stream(seed, &path_with(path, &[tag::CHANNEL, k as u64]));
            let h = self.propagation.response(wf, &self.sync, &mut ch)?;
            Ok((bins, h))
        });
        let per_ed = per_ed.into_iter().collect::<Result<Vec<_>>>()?;
        exec.map(0..self.mapping.num_symbols, |m| {
            let tx: Vec<Transmission<'_>> = per_ed
                .iter()
                .zip(powers)
                .map(|((bins, h), &p)| Transmission {
                    bins: &bins[m],
                    power: p,
                    cfr: h,
                })
                .collect();
            let mut noise = rng::stream(seed, &path_with(path, &[tag::NOISE, m as u64]));
            channel::superpose(&tx, &self.modem, self.noise_var, &mut noise)
        })
        .into_iter()
        .collect()
    }

    /// Detected majority vote for one round.
    pub fn aggregate(
        &self,
        grads: &[Vec<f64>],
        powers: &[f64],
        seed: u64,
        path: &[u64],
        exec: Exec,
    ) -> Result<Vec<i8>> {
        let rx = self.receive(grads, powers, seed, path, exec)?;
        let mut det = rng::stream(seed, &path_with(path, &[tag::DETECT]));
        codec::detect(&rx, &self.mapping, &mut det)
    }
}

/// Default truncation threshold on `|h|` for channel inversion.
pub const TCI_THRESHOLD: f64 = 0.2;

/// One-bit digital aggregation: gradient pairs ride on QPSK symbols, one per
/// subcarrier, decoded by the sign of the real and imaginary parts.
#[derive(Debug, Clone)]
pub struct ObdaLink {
    pub tci_threshold: f64,
    pub use_tci: bool,
    pub propagation: Propagation,
    pub sync: SyncConfig,
    pub noise_var: f64,
    modem: Modem,
    num_gradients: usize,
}

impl ObdaLink {
    /// `waveform` supplies the numerology; OBDA always uses plain OFDM.
    pub fn new(
        num_gradients: usize,
        waveform: &WaveformConfig,
        tci_threshold: f64,
        use_tci: bool,
        propagation: Propagation,
        sync: SyncConfig,
        noise_var: f64,
    ) -> Result<Self> {
        if num_gradients == 0 {
            return config("at least one gradient is required");
        }
        if !(tci_threshold.is_finite() && tci_threshold >= 0.0) {
            return config("tci_threshold must be nonnegative");
        }
        if !(noise_var.is_finite() && noise_var >= 0.0) {
            return config("noise_var must be nonnegative");
        }
        sync.validate()?;
        let wf = WaveformConfig {
            subcarrier_offset: waveform.subcarrier_offset,
            cp_len: waveform.cp_len,
            ..WaveformConfig::fsk_mv(waveform.idft_size, waveform.num_subcarriers, waveform.sample_rate)
        };
        if let Propagation::Fading(p) = &propagation {
            channel::check_cp(p, &wf, &sync)?;
        }
        Ok(Self {
            tci_threshold,
            use_tci,
            propagation,
            sync,
            noise_var,
            modem: Modem::new(&wf)?,
            num_gradients,
        })
    }

    pub fn num_symbols(&self) -> usize {
        self.num_gradients
            .div_ceil(2)
            .div_ceil(self.modem.config().num_subcarriers)
    }

    pub fn waveform(&self) -> &WaveformConfig {
        self.modem.config()
    }

    /// Detected vote for one round.
    pub fn aggregate(
        &self,
        grads: &[Vec<f64>],
        powers: &[f64],
        seed: u64,
        path: &[u64],
        exec: Exec,
    ) -> Result<Vec<i8>> {
        check_inputs(grads, powers, self.num_gradients)?;
        let wf = self.modem.config();
        let m = wf.num_subcarriers;
        let per_ed = exec.map(0..grads.len(), |k| -> Result<_> {
            let mut enc = rng::stream(seed, &path_with(path, &[tag::ENCODE, k as u64]));
            let mut symbols = obda_modulate(&grads[k], m, &mut enc);
            let mut ch = rng::stream(seed, &path_with(path, &[tag::CHANNEL, k as u64]));
            let (h, pre) = match &self.propagation {
                Propagation::Ideal => {
                    let one = vec![Complex64::new(1.0, 0.0); m];
                    (one.clone(), one)
                }
                Propagation::Fading(p) => {
                    let real = draw_channel(p, &self.sync, &mut ch);
                    // The device knows its multipath response but not its own
                    // timing error.
                    let est = cfr(&real, wf, &SyncConfig::disabled())?;
                    (cfr(&real, wf, &self.sync)?, est)
                }
            };
            if self.use_tci {
                let inv: Vec<Complex64> = pre
                    .iter()
                    .map(|h| {
                        if h.norm() >= self.tci_threshold && h.norm() > 0.0 {
                            h.conj() / h.norm_sqr()
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                for s in &mut symbols {
                    for (x, c) in s.iter_mut().zip(&inv) {
                        *x *= c;
                    }
                }
            }
            Ok((symbols, h))
        });
        let per_ed = per_ed.into_iter().collect::<Result<Vec<_>>>()?;
        let rx = exec
            .map(0..self.num_symbols(), |s| {
                let tx: Vec<Transmission<'_>> = per_ed
                    .iter()
                    .zip(powers)
                    .map(|((sym, h), &p)| Transmission {
                        bins: &sym[s],
                        power: p,
                        cfr: h,
                    })
                    .collect();
                let mut noise = rng::stream(seed, &path_with(path, &[tag::NOISE, s as u64]));
                channel::superpose(&tx, &self.modem, self.noise_var, &mut noise)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let mut det = rng::stream(seed, &path_with(path, &[tag::DETECT]));
        Ok(obda_demodulate(&rx, self.num_gradients, &mut det))
    }
}

/// Maps gradient pairs `(2i, 2i+1)` to unit-energy QPSK points
/// `(sign g_2i + j sign g_2i+1)/√2`, `m` per symbol. An odd trailing gradient
/// is paired with a dummy `+1`.
pub fn obda_modulate<R: Rng + ?Sized>(grads: &[f64], m: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    let pairs = grads.len().div_ceil(2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; pairs.div_ceil(m)];
    for i in 0..pairs {
        let re = f64::from(codec::sign_with_tiebreak(grads[2 * i], rng));
        let im = grads
            .get(2 * i + 1)
            .map_or(1.0, |&g| f64::from(codec::sign_with_tiebreak(g, rng)));
        out[i / m][i % m] = Complex64::new(re * s, im * s);
    }
    out
}

/// Signs of the real and imaginary parts, unpacked back to `q` gradients.
pub fn obda_demodulate<R: Rng + ?Sized>(rx: &[Vec<Complex64>], q: usize, rng: &mut R) -> Vec<i8> {
    let m = rx.first().map_or(1, Vec::len);
    (0..q)
        .map(|i| {
            let y = rx[(i / 2) / m][(i / 2) % m];
            let v = if i % 2 == 0 { y.re } else { y.im };
            codec::sign_with_tiebreak(v, rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grads(k: usize, q: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::stream(seed, &[]);
        (0..k)
            .map(|_| (0..q).map(|_| r.random::<f64>() - 0.5).collect())
            .collect()
    }

    #[test]
    fn ideal_single_device_recovers_signs() {
        let wf = WaveformConfig::fsk_mv(64, 48, 1.0);
        let g = grads(1, 50, 1);
        let link = OacLink::new(50, &wf, WeightScheme::Hp, Propagation::Ideal, SyncConfig::disabled(), 0.0).unwrap();
        let v = link.aggregate(&g, &[1.0], 0, &[], Exec::Sequential).unwrap();
        let want: Vec<i8> = g[0].iter().map(|x| if *x > 0.0 { 1 } else { -1 }).collect();
        assert_eq!(v, want);
    }

    #[test]
    fn exec_modes_agree() {
        let wf = WaveformConfig::ppm_mv(64, 48, 1e6, 2, 2);
        let g = grads(6, 20, 2);
        let p = vec![1.0; 6];
        let link = OacLink::new(
            20,
            &wf,
            WeightScheme::Hp,
            Propagation::Fading(ChannelProfile::flat()),
            SyncConfig::disabled(),
            0.1,
        )
        .unwrap();
        let a = link.aggregate(&g, &p, 9, &[3], Exec::Sequential).unwrap();
        let b = link.aggregate(&g, &p, 9, &[3], Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn obda_ideal_single_device() {
        let wf = WaveformConfig::fsk_mv(16, 8, 1.0);
        let g = grads(1, 21, 4);
        let link = ObdaLink::new(21, &wf, TCI_THRESHOLD, true, Propagation::Ideal, SyncConfig::disabled(), 0.0).unwrap();
        assert_eq!(link.num_symbols(), 2);
        let v = link.aggregate(&g, &[1.0], 0, &[], Exec::Sequential).unwrap();
        let want: Vec<i8> = g[0].iter().map(|x| if *x > 0.0 { 1 } else { -1 }).collect();
        assert_eq!(v, want);
    }

    #[test]
    fn obda_modulation_round_trip() {
        let mut r = rng::stream(0, &[]);
        let g = [1.0, -2.0, -0.5];
        let s = obda_modulate(&g, 4, &mut r);
        assert_eq!(s.len(), 1);
        assert!((s[0][0].norm() - 1.0).abs() < 1e-15);
        assert_eq!(obda_demodulate(&s, 3, &mut r), vec![1, -1, -1]);
    }

    #[test]
    fn shape_errors() {
        let wf = WaveformConfig::fsk_mv(16, 8, 1.0);
        let link = OacLink::new(3, &wf, WeightScheme::Hp, Propagation::Ideal, SyncConfig::disabled(), 0.0).unwrap();
        assert!(link.aggregate(&[vec![1.0; 3]], &[1.0, 1.0], 0, &[], Exec::Sequential).is_err());
        assert!(link.aggregate(&[vec![1.0; 2]], &[1.0], 0, &[], Exec::Sequential).is_err());
    }
}
