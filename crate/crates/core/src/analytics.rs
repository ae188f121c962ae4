//! Closed-form vote error probabilities, threshold optimization, and
//! convergence bounds for majority vote in Rayleigh fading.
//!
//! Received vote energies are exponential (Rayleigh fading, independent
//! devices), so the probability that the wrong resource collects more energy
//! has a finite binomial-sum form in the absentee probability `z`.

use std::f64::consts::SQRT_2;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};

use crate::codec::{weight, WeightScheme};
use crate::error::{config, domain, Result};
use crate::exec::{self, Exec};
use crate::rng::{self, tag};

/// Why a returned value deserves attention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flag {
    /// Every device is absent, so the server decides on noise alone.
    PureNoiseLimit,
    /// The floating-point result left `[0, 1]` by more than `1e-12`.
    Clamped { raw: f64 },
    /// A ratio's denominator evaluated to zero.
    ZeroBaseline,
    /// Fewer Monte Carlo trials than the recommended minimum.
    FewTrials { trials: usize },
}

/// A value together with an optional anomaly flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub flag: Option<Flag>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self { value, flag: None }
    }
}

/// Tolerance beyond which clamping a probability is reported.
pub const CLAMP_TOL: f64 = 1e-12;

fn clamp_prob(raw: f64) -> Result<Flagged<f64>> {
    if raw.is_nan() {
        return domain("probability evaluated to NaN");
    }
    let value = raw.clamp(0.0, 1.0);
    let flag = (!(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&raw)).then_some(Flag::Clamped { raw });
    Ok(Flagged { value, flag })
}

/// Per-device probabilities of a correct vote, no vote, and an incorrect vote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoteProbabilities {
    pub p: f64,
    pub z: f64,
    pub q: f64,
}

impl VoteProbabilities {
    pub fn new(p: f64, z: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("z", z), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return domain(format!("{name} = {v} is not a probability"));
            }
        }
        if (p + z + q - 1.0).abs() > 1e-12 {
            return domain(format!("p + z + q = {} must equal 1", p + z + q));
        }
        Ok(Self { p, z, q })
    }

    /// Completes `p = 1 − z − q`.
    pub fn from_zq(z: f64, q: f64) -> Result<Self> {
        Self::new((1.0 - z - q).max(0.0), z, q)
    }
}

/// Parameters of the average received energy per vote resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub gamma: f64,
    pub noise_var: f64,
    pub num_eds: usize,
    pub e_s: f64,
    pub m_seq: usize,
    pub m_gap: usize,
    /// Mean squared weight of devices voting `+`; one for HP and HPA.
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl LinkBudget {
    /// FSK-MV budget (`M_seq = 1`, `M_gap = 0`, `E_s = 2`) with unit weights.
    pub fn fsk(num_eds: usize, gamma: f64, noise_var: f64) -> Self {
        Self {
            gamma,
            noise_var,
            num_eds,
            e_s: 2.0,
            m_seq: 1,
            m_gap: 0,
            zeta_plus: 1.0,
            zeta_minus: 1.0,
        }
    }
}

/// Mean received energies `(μ⁺, μ⁻)` on the two resources of a gradient when
/// `k_plus` devices vote `+` and `k_minus` vote `−`.
pub fn mean_energies(k_plus: usize, k_minus: usize, lb: &LinkBudget) -> (f64, f64) {
    let sig = lb.m_seq as f64 * lb.e_s * lb.gamma;
    let noise = (lb.m_seq + lb.m_gap) as f64 * lb.noise_var;
    (
        sig * k_plus as f64 * lb.zeta_plus + noise,
        sig * k_minus as f64 * lb.zeta_minus + noise,
    )
}

fn check_link(k: usize, gamma: f64, noise_var: f64) -> Result<()> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    if !(noise_var.is_finite() && noise_var >= 0.0) {
        return domain(format!("noise_var must be nonnegative, got {noise_var}"));
    }
    Ok(())
}

/// `c(z) = Σ_{n=0}^{K} a/(n+a) · C(K,n) · z^{K−n} (1−z)^n` with `a = σ²/γ`.
///
/// `c(z)` is the probability-weighted share of noise in the decision: it is
/// `σ²/(σ² + γK)` when nobody is absent and one when everybody is.
pub fn coeff_err(z: f64, k: usize, gamma: f64, noise_var: f64) -> Result<f64> {
    check_link(k, gamma, noise_var)?;
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("z = {z} is not a probability"));
    }
    let kf = k as f64;
    if z == 0.0 {
        return Ok(noise_var / (noise_var + gamma * kf));
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    let a = noise_var / gamma;
    if a == 0.0 {
        // Only the n = 0 term survives, with a/(n+a) read as one.
        return Ok(z.powi(k as i32).min(1.0));
    }
    let (ln_z, ln_1z) = (z.ln(), (-z).ln_1p());
    let mut ln_binom = 0.0;
    let mut sum = 0.0;
    for n in 0..=k {
        if n > 0 {
            ln_binom += ((k - n + 1) as f64).ln() - (n as f64).ln();
        }
        let ln_pmf = ln_binom + (k - n) as f64 * ln_z + n as f64 * ln_1z;
        sum += a / (n as f64 + a) * ln_pmf.exp();
    }
    Ok(sum.min(1.0))
}

fn p_err(q: f64, z: f64, c: f64) -> f64 {
    q / (1.0 - z) * (1.0 - c) + 0.5 * c
}

/// Majority-vote error probability in Rayleigh fading,
/// `q/(1−z) · (1 − c(z)) + c(z)/2`.
///
/// At `z = 1` every device is absent; the limit ½ is returned with
/// [`Flag::PureNoiseLimit`].
pub fn error_prob_hpa(vp: &VoteProbabilities, k: usize, gamma: f64, noise_var: f64) -> Result<Flagged<f64>> {
    check_link(k, gamma, noise_var)?;
    if vp.z >= 1.0 {
        return Ok(Flagged {
            value: 0.5,
            flag: Some(Flag::PureNoiseLimit),
        });
    }
    let c = coeff_err(vp.z, k, gamma, noise_var)?;
    clamp_prob(p_err(vp.q, vp.z, c))
}

/// Error probability with hard participation,
/// `q · γK/(σ² + γK) + ½ · σ²/(σ² + γK)`.
///
/// Shares its arithmetic with [`error_prob_hpa`] at `z = 0`, so the two agree
/// bit for bit.
pub fn error_prob_hp(q: f64, k: usize, gamma: f64, noise_var: f64) -> Result<Flagged<f64>> {
    check_link(k, gamma, noise_var)?;
    if !(0.0..=1.0).contains(&q) {
        return domain(format!("q = {q} is not a probability"));
    }
    let c = noise_var / (noise_var + gamma * k as f64);
    clamp_prob(p_err(q, 0.0, c))
}

/// Ratios `R1 = P(K+1, γ)/P(K, γ)` and `R2 = P(K, aγ)/P(K, γ)`.
pub fn scaling_ratios(
    vp: &VoteProbabilities,
    k: usize,
    gamma: f64,
    noise_var: f64,
    a: f64,
) -> Result<Flagged<(f64, f64)>> {
    if !(a.is_finite() && a > 0.0) {
        return domain(format!("scaling factor must be positive, got {a}"));
    }
    let base = error_prob_hpa(vp, k, gamma, noise_var)?.value;
    let more = error_prob_hpa(vp, k + 1, gamma, noise_var)?.value;
    let stronger = error_prob_hpa(vp, k, gamma * a, noise_var)?.value;
    if base == 0.0 {
        return Ok(Flagged {
            value: (f64::NAN, f64::NAN),
            flag: Some(Flag::ZeroBaseline),
        });
    }
    Ok(Flagged::clean((more / base, stronger / base)))
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Vote probabilities of a Gaussian gradient `N(μ, σ²)` under threshold `t`:
/// `q = Φ((−t−|μ|)/σ)`, `z = Φ((t−|μ|)/σ) − q`, `p = 1 − z − q`.
pub fn gaussian_pzq(mu: f64, sigma: f64, t: f64) -> Result<VoteProbabilities> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return domain(format!("sigma must be positive, got {sigma}"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("threshold must be nonnegative, got {t}"));
    }
    let m = mu.abs();
    let q = std_normal_cdf((-t - m) / sigma);
    let z = (std_normal_cdf((t - m) / sigma) - q).max(0.0);
    Ok(VoteProbabilities {
        p: (1.0 - z - q).max(0.0),
        z,
        q,
    })
}

/// Gradient statistics and link parameters of the Gaussian vote model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianVoteModel {
    pub mu: f64,
    pub sigma: f64,
    pub num_eds: usize,
    pub gamma: f64,
    pub noise_var: f64,
}

impl GaussianVoteModel {
    /// Analytic HPA error probability at threshold `t`.
    pub fn error_prob(&self, t: f64) -> Result<Flagged<f64>> {
        let vp = gaussian_pzq(self.mu, self.sigma, t)?;
        error_prob_hpa(&vp, self.num_eds, self.gamma, self.noise_var)
    }
}

/// Exhaustive threshold sweep; returns `(t̂, P(t̂))`, preferring the smaller
/// threshold on ties.
pub fn optimize_threshold(model: &GaussianVoteModel, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return domain("threshold grid is empty");
    }
    let mut best: Option<(f64, f64)> = None;
    for &t in grid {
        let p = model.error_prob(t)?.value;
        best = match best {
            Some((bt, bp)) if bp < p || (bp == p && bt <= t) => Some((bt, bp)),
            _ => Some((t, p)),
        };
    }
    Ok(best.expect("grid is nonempty"))
}

/// Evenly spaced grid `start, start+step, …` up to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Monte Carlo estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_counts(errors: f64, trials: usize) -> Self {
        let p = if trials == 0 { f64::NAN } else { errors / trials as f64 };
        Self {
            p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// `|p − reference|` measured in standard errors of the binomial model
    /// at `reference`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let se = (reference * (1.0 - reference) / self.trials as f64).sqrt();
        (self.p - reference).abs() / se
    }
}

/// Smallest trial count that is not flagged by [`sp_error_prob`].
pub const MIN_TRIALS: usize = 1000;
const CHUNK: usize = 4096;

/// Monte Carlo error probability of soft participation.
///
/// Each trial draws `K` gradients from `N(μ, σ²)`, weights them with
/// `SP(t, ρ)`, and gives each resource an exponential energy with mean
/// `2γ Σ W² + σ_n²` over the devices voting on it (a sum of independent
/// Rayleigh-faded contributions on one FSK bin). Exact ties count one half.
pub fn sp_error_prob(
    model: &GaussianVoteModel,
    t: f64,
    rho: f64,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<Flagged<Estimate>> {
    let scheme = WeightScheme::Sp { t, rho };
    scheme.validate()?;
    check_link(model.num_eds, model.gamma, model.noise_var)?;
    if trials == 0 {
        return config("at least one trial is required");
    }
    let normal = Normal::new(model.mu, model.sigma)
        .map_err(|e| crate::Error::Domain(format!("gradient distribution: {e}")))?;
    let truth = if model.mu < 0.0 { -1.0 } else { 1.0 };
    let ranges = exec::chunks(trials, CHUNK);
    let counts = exec.map(0..ranges.len(), |c| {
        let mut r = rng::stream(seed, &[tag::TRIAL, c as u64]);
        let mut errors = 0.0;
        for _ in ranges[c].clone() {
            let (mut wp, mut wm) = (0.0, 0.0);
            for _ in 0..model.num_eds {
                let g: f64 = normal.sample(&mut r);
                let w = weight(g, &scheme);
                if w == 0.0 {
                    continue;
                }
                if g * truth > 0.0 || (g == 0.0 && r.random::<bool>()) {
                    wp += w * w;
                } else {
                    wm += w * w;
                }
            }
            let ep = exp_energy(2.0 * model.gamma * wp + model.noise_var, &mut r);
            let em = exp_energy(2.0 * model.gamma * wm + model.noise_var, &mut r);
            if em > ep {
                errors += 1.0;
            } else if em == ep {
                errors += 0.5;
            }
        }
        errors
    });
    let est = Estimate::from_counts(counts.iter().sum(), trials);
    let flag = (trials < MIN_TRIALS).then_some(Flag::FewTrials { trials });
    Ok(Flagged { value: est, flag })
}

fn exp_energy<R: Rng + ?Sized>(mean: f64, r: &mut R) -> f64 {
    let e: f64 = Exp1.sample(r);
    mean * e
}

/// Inputs of the convergence bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceParams {
    pub eta: f64,
    pub rounds: f64,
    pub num_eds: usize,
    pub gamma: f64,
    pub noise_var: f64,
    /// Largest absentee probability over coordinates.
    pub z_max: f64,
    pub t: f64,
    pub rho: f64,
    /// Largest gradient magnitude.
    pub g_max: f64,
    /// `‖L‖₁`, sum of coordinate-wise smoothness constants.
    pub l1: f64,
    /// `‖σ‖₁`, sum of coordinate-wise gradient noise deviations.
    pub sigma_l1: f64,
    pub batch: f64,
    /// Initial optimality gap `F(w₀) − F*`.
    pub f_gap: f64,
}

impl ConvergenceParams {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("eta", self.eta),
            ("rounds", self.rounds),
            ("t", self.t),
            ("rho", self.rho),
            ("g_max", self.g_max),
            ("l1", self.l1),
            ("sigma_l1", self.sigma_l1),
            ("batch", self.batch),
            ("f_gap", self.f_gap),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return domain(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.eta > 0.0 && self.rounds > 0.0 && self.batch > 0.0) {
            return domain("eta, rounds and batch must be positive");
        }
        if !(0.0..1.0).contains(&self.z_max) {
            return domain(format!("z_max must lie in [0, 1), got {}", self.z_max));
        }
        Ok(())
    }
}

/// Bound on the average `ℓ₁` gradient norm after `T` rounds of majority-vote
/// signSGD with absentees:
///
/// `(F(w₀)−F*)/(ηT(1−c)) + η‖L‖₁/(2(1−c)) + √3/√n_b · 1/(1−z_max) ·
/// g_max/(t(1−ρ)+g_max) · ‖σ‖₁`, with `c = c(z_max)`.
pub fn convergence_bound(p: &ConvergenceParams) -> Result<f64> {
    p.validate()?;
    check_link(p.num_eds, p.gamma, p.noise_var)?;
    // 1 − c(0) in closed form avoids cancellation.
    let omc = if p.z_max == 0.0 {
        p.gamma * p.num_eds as f64 / (p.gamma * p.num_eds as f64 + p.noise_var)
    } else {
        1.0 - coeff_err(p.z_max, p.num_eds, p.gamma, p.noise_var)?
    };
    let knee = p.t * (1.0 - p.rho) + p.g_max;
    let ratio = if knee == 0.0 { 1.0 } else { p.g_max / knee };
    Ok(p.f_gap / (p.eta * p.rounds * omc)
        + p.eta * p.l1 / (2.0 * omc)
        + 3f64.sqrt() * p.sigma_l1 * ratio / ((1.0 - p.z_max) * p.batch.sqrt()))
}

/// The hard-participation bound,
/// `(F(w₀)−F*)/(ηT·Kγ/(Kγ+σ²)) + η‖L‖₁/(2·Kγ/(Kγ+σ²)) + √3‖σ‖₁/√n_b`.
pub fn convergence_bound_hp(p: &ConvergenceParams) -> Result<f64> {
    p.validate()?;
    check_link(p.num_eds, p.gamma, p.noise_var)?;
    let kg = p.gamma * p.num_eds as f64;
    let frac = kg / (kg + p.noise_var);
    Ok(p.f_gap / (p.eta * p.rounds * frac) + p.eta * p.l1 / (2.0 * frac) + 3f64.sqrt() * p.sigma_l1 / p.batch.sqrt())
}

/// Gauss-inequality bound on the probability that a device's minibatch
/// gradient votes against the true gradient `g`:
/// `½ / ((t(1−ρ)+|g|)/(√3 σ/√n_b) + 1)`.
pub fn mismatch_bound(t: f64, rho: f64, sigma: f64, batch: f64, g_abs: f64) -> Result<f64> {
    for (name, v) in [("t", t), ("rho", rho), ("sigma", sigma), ("batch", batch), ("g_abs", g_abs)] {
        if !(v.is_finite() && v >= 0.0) {
            return domain(format!("{name} must be finite and nonnegative, got {v}"));
        }
    }
    if batch == 0.0 {
        return domain("batch must be positive");
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let margin = t * (1.0 - rho) + g_abs;
    Ok(0.5 / (margin / (3f64.sqrt() * sigma / batch.sqrt()) + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER: GaussianVoteModel = GaussianVoteModel {
        mu: 0.001,
        sigma: 0.001,
        num_eds: 20,
        gamma: 1.0,
        noise_var: 0.01,
    };

    #[test]
    fn mean_energy_examples() {
        let lb = LinkBudget::fsk(20, 1.0, 0.01);
        assert_eq!(mean_energies(0, 0, &lb).0, 0.01);
        assert!((mean_energies(3, 0, &lb).0 - 6.01).abs() < 1e-12);
        let (a, _) = mean_energies(4, 0, &lb);
        let (b, _) = mean_energies(8, 0, &lb);
        assert!(((b - 0.01) - 2.0 * (a - 0.01)).abs() < 1e-12);
    }

    #[test]
    fn coeff_err_endpoints() {
        assert_eq!(coeff_err(0.0, 20, 1.0, 0.01).unwrap(), 0.01 / 20.01);
        assert_eq!(coeff_err(1.0, 20, 1.0, 0.01).unwrap(), 1.0);
        assert!(coeff_err(1.5, 20, 1.0, 0.01).is_err());
        assert!(coeff_err(0.5, 0, 1.0, 0.01).is_err());
        assert!(coeff_err(0.5, 5, 0.0, 0.01).is_err());
        let tiny = coeff_err(1e-300, 20, 1.0, 0.01).unwrap();
        assert!((tiny - 0.01 / 20.01).abs() < 1e-15);
    }

    #[test]
    fn coeff_err_large_k_is_finite() {
        let c = coeff_err(0.3, 10_000, 1.0, 0.01).unwrap();
        assert!(c.is_finite() && c > 0.0 && c < 1e-5);
    }

    #[test]
    fn hp_anchor() {
        let p = error_prob_hp(std_normal_cdf(-1.0), 20, 1.0, 0.01).unwrap();
        assert!((p.value - 0.1588).abs() < 5e-4, "{}", p.value);
        assert_eq!(PAPER.error_prob(0.0).unwrap().value, p.value);
    }

    #[test]
    fn hp_noiseless_limit_and_symmetry() {
        assert_eq!(error_prob_hp(0.5, 7, 0.3, 2.0).unwrap().value, 0.5);
        let p = error_prob_hp(0.0, 20, 1.0, 0.01).unwrap().value;
        assert!((p - 0.5 * 0.01 / 20.01).abs() < 1e-15);
        assert!((p - 2.4988e-4).abs() < 1e-7);
        let p = error_prob_hp(0.1, 20, 1.0, 0.01).unwrap().value;
        assert!((p - (0.1 * 20.0 / 20.01 + 0.5 * 0.01 / 20.01)).abs() < 1e-15);
    }

    #[test]
    fn pure_noise_limit_is_flagged() {
        let vp = VoteProbabilities::new(0.0, 1.0, 0.0).unwrap();
        let p = error_prob_hpa(&vp, 5, 1.0, 0.1).unwrap();
        assert_eq!(p.value, 0.5);
        assert_eq!(p.flag, Some(Flag::PureNoiseLimit));
    }

    #[test]
    fn vote_probabilities_must_sum_to_one() {
        assert!(VoteProbabilities::new(0.5, 0.2, 0.2).is_err());
        assert!(VoteProbabilities::new(0.5, 0.3, 0.2).is_ok());
    }

    #[test]
    fn gaussian_pzq_examples() {
        let vp = gaussian_pzq(1.0, 1.0, 0.0).unwrap();
        assert_eq!(vp.z, 0.0);
        assert!((vp.q - 0.158655253931457).abs() < 1e-12);
        assert!(gaussian_pzq(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn threshold_sweep_anchor() {
        let grid = linear_grid(0.0, 0.01, 1e-5);
        assert_eq!(grid.len(), 1001);
        let (t, p) = optimize_threshold(&PAPER, &grid).unwrap();
        assert!((0.0012..=0.0022).contains(&t), "{t}");
        assert!(p <= 0.020, "{p}");
        let (t0, p0) = optimize_threshold(&PAPER, &[0.0]).unwrap();
        assert_eq!(t0, 0.0);
        assert!((p0 - 0.1588).abs() < 5e-4);
    }

    #[test]
    fn threshold_ties_prefer_smaller() {
        let m = GaussianVoteModel { mu: 1.0, sigma: 1e-3, ..PAPER };
        let (t, _) = optimize_threshold(&m, &[0.3, 0.2, 0.1]).unwrap();
        assert_eq!(t, 0.1);
    }

    #[test]
    fn scaling_ratio_identity() {
        let vp = VoteProbabilities::new(0.7, 0.1, 0.2).unwrap();
        let r = scaling_ratios(&vp, 10, 0.5, 0.1, 1.0).unwrap().value;
        assert_eq!(r.1, 1.0);
        assert!(r.0 < 1.0);
        let zero = VoteProbabilities::new(1.0, 0.0, 0.0).unwrap();
        let r = scaling_ratios(&zero, 10, 0.5, 0.0, 2.0).unwrap();
        assert_eq!(r.flag, Some(Flag::ZeroBaseline));
    }

    #[test]
    fn mismatch_bound_examples() {
        assert_eq!(mismatch_bound(0.1, 0.2, 0.0, 4.0, 0.3).unwrap(), 0.0);
        assert_eq!(mismatch_bound(0.0, 0.0, 1.0, 4.0, 0.0).unwrap(), 0.5);
        assert!(mismatch_bound(0.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sp_noise_dominated_is_half() {
        let m = GaussianVoteModel { noise_var: 1e6, ..PAPER };
        let e = sp_error_prob(&m, 0.001, 0.3, 20_000, 1, Exec::Parallel).unwrap().value;
        assert!((e.p - 0.5).abs() < 4.0 * e.stderr);
    }

    #[test]
    fn sp_few_trials_flagged() {
        let e = sp_error_prob(&PAPER, 0.001, 0.3, 100, 1, Exec::Sequential).unwrap();
        assert_eq!(e.flag, Some(Flag::FewTrials { trials: 100 }));
    }

    #[test]
    fn hp_convergence_matches_general_form() {
        let p = ConvergenceParams {
            eta: 0.01,
            rounds: 1000.0,
            num_eds: 20,
            gamma: 0.3,
            noise_var: 0.01,
            z_max: 0.0,
            t: 0.0,
            rho: 0.4,
            g_max: 2.0,
            l1: 3.0,
            sigma_l1: 1.5,
            batch: 32.0,
            f_gap: 2.3,
        };
        assert_eq!(convergence_bound(&p).unwrap(), convergence_bound_hp(&p).unwrap());
        assert!(convergence_bound(&ConvergenceParams { z_max: 1.0, ..p }).is_err());
    }
}
