//! Helpers shared by several integration test targets.
#![allow(dead_code)]

use ncmv::analytics::{error_prob_hpa, Estimate, VoteProbabilities};
use ncmv::channel::{ChannelProfile, SyncConfig};
use ncmv::codec::{ideal_mv, WeightScheme};
use ncmv::deployment::SystemConfig;
use ncmv::exec::Exec;
use ncmv::link::{OacLink, Propagation};
use ncmv::rng;
use ncmv::waveform::WaveformConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// One point of the vote-probability grid.
#[derive(Debug, Clone, Copy)]
pub struct VotePoint {
    pub k: usize,
    pub z: f64,
    pub q: f64,
}

/// Runs the full FSK-MV chain over flat Rayleigh channels with perfect power
/// control. Each device votes `+` (the truth) with probability `1−z−q`, is
/// absent with probability `z`, and votes `−` otherwise. Returns the measured
/// error rate and the closed form.
pub fn lemma2_chain(pt: VotePoint, gamma: f64, noise_var: f64, trials: usize, seed: u64) -> (Estimate, f64) {
    let wf = WaveformConfig::fsk_mv(4, 2, 1.0);
    let link = OacLink::new(
        1,
        &wf,
        WeightScheme::Hpa { t: 0.5 },
        Propagation::Fading(ChannelProfile::flat()),
        SyncConfig::disabled(),
        noise_var,
    )
    .unwrap();
    let powers = vec![gamma; pt.k];
    let errors: usize = Exec::Parallel
        .map(0..trials, |i| {
            let mut r = rng::stream(seed, &[0xa11ce, i as u64]);
            let grads: Vec<Vec<f64>> = (0..pt.k)
                .map(|_| {
                    let u: f64 = r.random();
                    vec![if u < pt.z {
                        0.25
                    } else if u < pt.z + pt.q {
                        -1.0
                    } else {
                        1.0
                    }]
                })
                .collect();
            let v = link.aggregate(&grads, &powers, seed, &[i as u64], Exec::Sequential).unwrap();
            usize::from(v[0] < 0)
        })
        .into_iter()
        .sum();
    let vp = VoteProbabilities::from_zq(pt.z, pt.q).unwrap();
    let analytic = error_prob_hpa(&vp, pt.k, gamma, noise_var).unwrap().value;
    (Estimate::from_counts(errors as f64, trials), analytic)
}

/// Fraction of random gradient vectors for which a noiseless, distortion-free
/// link returns exactly the ideal majority vote.
pub fn exactness_rate(wf: &WaveformConfig, k: usize, q: usize, vectors: usize, seed: u64) -> f64 {
    let link = OacLink::new(q, wf, WeightScheme::Hp, Propagation::Ideal, SyncConfig::disabled(), 0.0).unwrap();
    let powers = vec![1.0; k];
    let hits: usize = Exec::Parallel
        .map(0..vectors, |i| {
            let mut r = rng::stream(seed, &[i as u64]);
            let grads: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..q).map(|_| r.random::<f64>() - 0.5).collect())
                .collect();
            let signs: Vec<Vec<i8>> = grads
                .iter()
                .map(|g| g.iter().map(|&x| if x > 0.0 { 1 } else { -1 }).collect())
                .collect();
            let want = ideal_mv(&signs, &mut r).unwrap();
            let got = link.aggregate(&grads, &powers, seed, &[i as u64], Exec::Sequential).unwrap();
            usize::from(got == want)
        })
        .into_iter()
        .sum();
    hits as f64 / vectors as f64
}

/// Adaptive Simpson quadrature, used as an independent oracle.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `γ` by direct quadrature of the path-loss-compensated power over the
/// uniform-area distance density `2d/(R_max² − R_min²)`.
pub fn gamma_by_quadrature(cfg: &SystemConfig) -> f64 {
    let span = cfg.r_max * cfg.r_max - cfg.r_min * cfg.r_min;
    let a = cfg.alpha_eff();
    let f = |d: f64| (d / cfg.r_ref).powf(-a) * cfg.p_ref * 2.0 * d / span;
    simpson(&f, cfg.r_min, cfg.r_max, 1e-15)
}


/// Exact `Σ a/(n+a) C(K,n) z^{K−n} (1−z)^n` over the rationals.
pub fn coeff_err_exact(z: &BigRational, k: usize, a: &BigRational) -> BigRational {
    let one = BigRational::one();
    let w = &one - z;
    let mut binom = BigInt::one();
    let mut sum = BigRational::zero();
    for n in 0..=k {
        if n > 0 {
            binom = binom * BigInt::from(k - n + 1) / BigInt::from(n);
        }
        sum += a / (BigRational::from_integer(BigInt::from(n)) + a)
            * BigRational::from_integer(binom.clone())
            * num_traits::pow(z.clone(), k - n)
            * num_traits::pow(w.clone(), n);
    }
    sum
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Largest relative error of `coeff_err` against the exact sum over a grid
/// of `z`, `a = σ²/γ` and `K` up to 200.
pub fn coeff_err_worst_relative() -> f64 {
    let zs = [(1, 10), (1, 2), (9, 10), (999, 1000), (1, 1000)];
    // (σ² numerator, denominator, γ numerator, denominator)
    let links = [(1, 100, 1, 1), (1, 1, 1, 1), (7, 3, 1, 1), (1, 100, 3, 10)];
    let mut worst: f64 = 0.0;
    for k in [1, 2, 5, 20, 64, 100, 200] {
        for &(zn, zd) in &zs {
            for &(nn, nd, gn, gd) in &links {
                let a = ratio(nn * gd, nd * gn);
                let want = coeff_err_exact(&ratio(zn, zd), k, &a).to_f64().unwrap();
                let got = ncmv::analytics::coeff_err(
                    zn as f64 / zd as f64,
                    k,
                    gn as f64 / gd as f64,
                    nn as f64 / nd as f64,
                )
                .unwrap();
                worst = worst.max(((got - want) / want).abs());
            }
        }
    }
    worst
}

/// Empirical probability that a minibatch gradient `N(g, σ²/n_b)` casts a
/// wrong, nonzero-weight vote under threshold `t(1−ρ)`.
pub fn gaussian_mismatch(t: f64, rho: f64, sigma: f64, batch: f64, g: f64, draws: usize, seed: u64) -> f64 {
    let normal = Normal::new(g, sigma / batch.sqrt()).unwrap();
    let mut r = rng::stream(seed, &[]);
    let wrong = (0..draws).filter(|_| normal.sample(&mut r) < -t * (1.0 - rho)).count();
    wrong as f64 / draws as f64
}

/// The 27-point `(t, σ, n_b)` grid used for the mismatch bound, at `|g| = 0.02`
/// and `ρ = 0.3`. Returns the number of points where the bound holds.
pub fn mismatch_grid(draws: usize) -> (usize, usize) {
    let (g, rho) = (0.02, 0.3);
    let mut ok = 0;
    let mut total = 0;
    for t in [0.0, 0.01, 0.05] {
        for sigma in [0.01, 0.1, 1.0] {
            for batch in [1.0, 8.0, 64.0] {
                total += 1;
                let bound = ncmv::analytics::mismatch_bound(t, rho, sigma, batch, g).unwrap();
                if gaussian_mismatch(t, rho, sigma, batch, g, draws, total as u64) <= bound {
                    ok += 1;
                }
            }
        }
    }
    (ok, total)
}
