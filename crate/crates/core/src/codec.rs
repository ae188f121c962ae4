//! Gradient-to-vote encoding and non-coherent majority-vote detection.
//!
//! Each gradient owns a `+` and a `−` resource. A device puts energy on the
//! resource matching the sign of its gradient, scaled by a participation
//! weight. The server compares the energies of the two resources.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{config, shape, Result};
use crate::waveform::{qpsk_point, Precoder, ResourceMapping, WaveformConfig};

/// Participation weight applied to each gradient before voting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    /// Hard participation: every gradient votes with full weight.
    Hp,
    /// Hard participation with absentees: no vote when `|g| ≤ t`.
    Hpa { t: f64 },
    /// Soft participation: raised-cosine ramp of relative width `rho` around `t`.
    Sp { t: f64, rho: f64 },
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Hp => Ok(()),
            WeightScheme::Hpa { t } if t.is_finite() && t >= 0.0 => Ok(()),
            WeightScheme::Sp { t, rho }
                if t.is_finite() && t >= 0.0 && (0.0..=1.0).contains(&rho) =>
            {
                Ok(())
            }
            other => config(format!("invalid weight scheme {other:?}")),
        }
    }

    /// Threshold `t`, zero for HP.
    pub fn threshold(&self) -> f64 {
        match *self {
            WeightScheme::Hp => 0.0,
            WeightScheme::Hpa { t } | WeightScheme::Sp { t, .. } => t,
        }
    }

    /// Steepness `ρ`, zero for HP and HPA.
    pub fn rho(&self) -> f64 {
        match *self {
            WeightScheme::Sp { rho, .. } => rho,
            _ => 0.0,
        }
    }
}

/// Weight `W(g) ∈ [0, 1]`.
pub fn weight(g: f64, scheme: &WeightScheme) -> f64 {
    let a = g.abs();
    match *scheme {
        WeightScheme::Hp => 1.0,
        WeightScheme::Hpa { t } => {
            if a > t {
                1.0
            } else {
                0.0
            }
        }
        WeightScheme::Sp { t, rho } => {
            let lo = t * (1.0 - rho);
            let hi = t * (1.0 + rho);
            if a <= lo {
                0.0
            } else if a > hi {
                1.0
            } else {
                0.5 + 0.5 * (PI * (a - hi) / (2.0 * rho * t)).cos()
            }
        }
    }
}

/// `sign(g)` in `{−1, +1}`, with a fair coin at exactly zero.
pub fn sign_with_tiebreak<R: Rng + ?Sized>(g: f64, rng: &mut R) -> i8 {
    if g > 0.0 {
        1
    } else if g < 0.0 {
        -1
    } else if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Bin vectors of one device, one per precoded symbol, before precoding.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteFrame {
    pub symbols: Vec<Vec<Complex64>>,
}

impl VoteFrame {
    pub fn energy(&self) -> f64 {
        self.symbols
            .iter()
            .flat_map(|s| s.iter())
            .map(|c| c.norm_sqr())
            .sum()
    }
}

fn check_mapping(mapping: &ResourceMapping, wf: &WaveformConfig) -> Result<()> {
    if mapping.block_len != wf.block_len() || mapping.m_seq != wf.m_seq {
        return shape("resource mapping was built for a different waveform");
    }
    if 2 * mapping.votes_per_symbol * mapping.block_len > wf.num_subcarriers {
        return shape("resource mapping does not fit the subcarrier grid");
    }
    Ok(())
}

/// Encodes one device's gradients into vote activations.
///
/// The active block of gradient `i` holds `√E_s · r · W(g_i) · p`. With OFDM
/// the randomizer `r` is a uniform QPSK point drawn per gradient; with
/// DFT-spread pulses `r = 1`.
pub fn encode<R: Rng + ?Sized>(
    grads: &[f64],
    scheme: &WeightScheme,
    mapping: &ResourceMapping,
    wf: &WaveformConfig,
    rng: &mut R,
) -> Result<VoteFrame> {
    check_mapping(mapping, wf)?;
    scheme.validate()?;
    if grads.len() != mapping.num_gradients {
        return shape(format!(
            "{} gradients for a mapping of {}",
            grads.len(),
            mapping.num_gradients
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut symbols = vec![vec![zero; wf.num_subcarriers]; mapping.num_symbols];
    let amp = wf.energy_norm().sqrt();
    for (i, &g) in grads.iter().enumerate() {
        let r = match wf.precoder {
            Precoder::Identity => qpsk_point(rng.random_range(0..4)),
            Precoder::DftSpread => Complex64::new(1.0, 0.0),
        };
        let s = sign_with_tiebreak(g, rng);
        let w = weight(g, scheme);
        if w == 0.0 {
            continue;
        }
        let pair = mapping.assign(i);
        let res = if s > 0 { pair.plus } else { pair.minus };
        let start = mapping.block_start(res.block);
        let sym = &mut symbols[res.symbol];
        for (j, &p) in wf.seq.iter().enumerate() {
            sym[start + j] = amp * w * r * p;
        }
    }
    Ok(VoteFrame { symbols })
}

fn block_energy(sym: &[Complex64], start: usize, len: usize) -> f64 {
    sym[start..start + len].iter().map(|c| c.norm_sqr()).sum()
}

/// Received energies `(e⁺, e⁻)` of every gradient, each integrated over the
/// `m_seq + m_gap` bins of its block.
pub fn vote_energies(received: &[Vec<Complex64>], mapping: &ResourceMapping) -> Result<Vec<(f64, f64)>> {
    if received.len() != mapping.num_symbols {
        return shape(format!(
            "{} received symbols for a mapping of {}",
            received.len(),
            mapping.num_symbols
        ));
    }
    let need = 2 * mapping.votes_per_symbol * mapping.block_len;
    if received.iter().any(|s| s.len() < need) {
        return shape(format!("received symbols shorter than {need} bins"));
    }
    Ok(mapping
        .iter()
        .map(|pair| {
            let e = |r: crate::waveform::Resource| {
                block_energy(&received[r.symbol], mapping.block_start(r.block), mapping.block_len)
            };
            (e(pair.plus), e(pair.minus))
        })
        .collect())
}

/// Energy detector: `sign(‖block⁺‖² − ‖block⁻‖²)` per gradient, with a fair
/// coin on exact ties.
pub fn detect<R: Rng + ?Sized>(
    received: &[Vec<Complex64>],
    mapping: &ResourceMapping,
    rng: &mut R,
) -> Result<Vec<i8>> {
    Ok(vote_energies(received, mapping)?
        .into_iter()
        .map(|(p, m)| sign_with_tiebreak(p - m, rng))
        .collect())
}

/// Majority vote over rows of `{−1, 0, +1}` votes (zero means absent), with a
/// fair coin on ties.
pub fn ideal_mv<R: Rng + ?Sized>(votes: &[Vec<i8>], rng: &mut R) -> Result<Vec<i8>> {
    let q = votes.first().map_or(0, Vec::len);
    if votes.iter().any(|row| row.len() != q) {
        return shape("vote rows differ in length");
    }
    Ok((0..q)
        .map(|i| {
            let s: i64 = votes.iter().map(|row| i64::from(row[i])).sum();
            sign_with_tiebreak(s as f64, rng)
        })
        .collect())
}

/// Vote each device would cast: `sign(g)` when `W(g) > 0`, otherwise absent.
/// Zero gradients take the coin-flip sign drawn by `rng`.
pub fn cast_votes<R: Rng + ?Sized>(grads: &[f64], scheme: &WeightScheme, rng: &mut R) -> Vec<i8> {
    grads
        .iter()
        .map(|&g| {
            let s = sign_with_tiebreak(g, rng);
            if weight(g, scheme) > 0.0 {
                s
            } else {
                0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::waveform::build_mapping;

    fn small_fsk() -> WaveformConfig {
        let mut wf = WaveformConfig::fsk_mv(16, 8, 1.0);
        wf.subcarrier_offset = 0;
        wf
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(-0.3, &WeightScheme::Hp), 1.0);
        assert_eq!(weight(0.1, &WeightScheme::Hpa { t: 0.1 }), 0.0);
        assert_eq!(weight(0.1000001, &WeightScheme::Hpa { t: 0.1 }), 1.0);
        let w = weight(0.1, &WeightScheme::Sp { t: 0.1, rho: 1.0 });
        assert!((w - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sp_is_continuous_at_edges() {
        let s = WeightScheme::Sp { t: 0.2, rho: 0.3 };
        let lo = 0.2 * 0.7;
        let hi = 0.2 * 1.3;
        assert!(weight(lo + 1e-12, &s) < 1e-9);
        assert!((weight(hi, &s) - 1.0).abs() < 1e-15);
        assert_eq!(weight(hi + 1e-12, &s), 1.0);
        assert_eq!(weight(lo, &s), 0.0);
    }

    #[test]
    fn invalid_schemes() {
        assert!(WeightScheme::Hpa { t: -1.0 }.validate().is_err());
        assert!(WeightScheme::Sp { t: 1.0, rho: 1.5 }.validate().is_err());
        assert!(WeightScheme::Sp { t: 1.0, rho: 0.5 }.validate().is_ok());
    }

    #[test]
    fn encode_single_positive_gradient() {
        let wf = WaveformConfig::fsk_mv(4, 2, 1.0);
        let m = build_mapping(1, &wf).unwrap();
        let mut r = rng::stream(0, &[]);
        let f = encode(&[2.0], &WeightScheme::Hp, &m, &wf, &mut r).unwrap();
        assert!((f.symbols[0][0].norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.symbols[0][1].norm(), 0.0);
    }

    #[test]
    fn absentee_leaves_both_bins_empty() {
        let wf = WaveformConfig::fsk_mv(4, 2, 1.0);
        let m = build_mapping(1, &wf).unwrap();
        let mut r = rng::stream(0, &[]);
        let f = encode(&[0.05], &WeightScheme::Hpa { t: 0.1 }, &m, &wf, &mut r).unwrap();
        assert_eq!(f.energy(), 0.0);
    }

    #[test]
    fn frame_energy_matches_weights() {
        let wf = WaveformConfig::ppm_mv(64, 48, 1.0, 4, 2);
        let g: Vec<f64> = (0..9).map(|i| (i as f64 - 4.0) * 0.03).collect();
        let scheme = WeightScheme::Sp { t: 0.05, rho: 0.5 };
        let m = build_mapping(g.len(), &wf).unwrap();
        let mut r = rng::stream(0, &[]);
        let f = encode(&g, &scheme, &m, &wf, &mut r).unwrap();
        let w2: f64 = g.iter().map(|&x| weight(x, &scheme).powi(2)).sum();
        let want = wf.energy_norm() * 4.0 * w2;
        assert!((f.energy() - want).abs() < 1e-9 * want.max(1.0));
    }

    #[test]
    fn noiseless_detection_is_exact() {
        let wf = small_fsk();
        let g = [0.3, -1.0, 2.0, -0.1, 0.5];
        let m = build_mapping(g.len(), &wf).unwrap();
        let mut r = rng::stream(0, &[]);
        let f = encode(&g, &WeightScheme::Hp, &m, &wf, &mut r).unwrap();
        let v = detect(&f.symbols, &m, &mut r).unwrap();
        assert_eq!(v, vec![1, -1, 1, -1, 1]);
    }

    #[test]
    fn ideal_mv_examples() {
        let mut r = rng::stream(0, &[]);
        let v = ideal_mv(&[vec![1], vec![1], vec![-1]], &mut r).unwrap();
        assert_eq!(v, vec![1]);
        let all_neg = vec![vec![-1i8]; 5];
        assert_eq!(ideal_mv(&all_neg, &mut r).unwrap(), vec![-1]);
        let ties: Vec<i8> = (0..2000)
            .map(|_| ideal_mv(&[vec![1], vec![-1]], &mut r).unwrap()[0])
            .collect();
        let plus = ties.iter().filter(|&&x| x == 1).count() as f64 / 2000.0;
        assert!((plus - 0.5).abs() < 0.05);
        assert!(ideal_mv(&[vec![1, 1], vec![1]], &mut r).is_err());
    }

    #[test]
    fn mismatched_lengths_error() {
        let wf = small_fsk();
        let m = build_mapping(3, &wf).unwrap();
        let mut r = rng::stream(0, &[]);
        assert!(encode(&[1.0, 2.0], &WeightScheme::Hp, &m, &wf, &mut r).is_err());
        assert!(detect(&[], &m, &mut r).is_err());
    }
}
