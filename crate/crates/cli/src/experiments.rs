//! Experiment drivers. Each one turns a resolved plan into result tables and
//! summary lines, entirely in memory.

use rand::Rng;

use ncmv::analytics::{
    error_prob_hpa, linear_grid, optimize_threshold, sp_error_prob, Estimate, Flag, GaussianVoteModel,
    VoteProbabilities,
};
use ncmv::channel::{ChannelProfile, SyncConfig};
use ncmv::codec::{encode, WeightScheme};
use ncmv::deployment::{gamma_factor, received_power, sample_link_distance};
use ncmv::exec::Exec;
use ncmv::link::{obda_modulate, OacLink, Propagation};
use ncmv::rng::{derive_key, stream};
use ncmv::trainer::{slope, Trainer, TrainerConfig};
use ncmv::waveform::{build_mapping, pmepr, Modem, WaveformConfig, PMEPR_OVERSAMPLE};

use crate::config::{DetectorSection, GammaSweepSection, GaussianSweepSection, PmeprSection, Plan};
use crate::error::Result;

/// One CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    /// Versioned schema id written in the header comment.
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(file: &str, schema: &str, columns: &[&str]) -> Self {
        Self {
            file: file.to_string(),
            schema: schema.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
}

/// Shortest round-trip decimal; empty for a missing value.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

/// Runs a resolved plan.
pub fn run(plan: &Plan, seed: u64, trials: usize, exec: Exec) -> Result<Outcome> {
    match plan {
        Plan::GammaSweep(s) => gamma_sweep(s, seed, trials, exec),
        Plan::ErrorProbSweep(s) => error_prob_sweep(s, seed, trials, exec),
        Plan::SpSweep(s) => sp_sweep(s, seed, trials, exec),
        Plan::Training(cfg) => training_run(cfg, trials, exec),
        Plan::Pmepr(s) => pmepr_ccdf(s, seed, trials, exec),
        Plan::Detector(s) => detector_validation(s, seed, trials, exec),
    }
}

fn gamma_sweep(s: &GammaSweepSection, seed: u64, trials: usize, exec: Exec) -> Result<Outcome> {
    let points: Vec<(f64, f64)> = s
        .alpha_eff
        .iter()
        .flat_map(|&a| s.r_max_m.iter().map(move |&r| (a, r)))
        .collect();
    let rows = exec.map(0..points.len(), |i| -> Result<Vec<String>> {
        let (a, r_max) = points[i];
        let sys = s.system(a, r_max);
        let gamma = gamma_factor(&sys)?;
        let mut rng = stream(seed, &[i as u64]);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..trials {
            let p = received_power(sample_link_distance(sys.r_min, sys.r_max, &mut rng), &sys)?;
            sum += p;
            sq += p * p;
        }
        let n = trials as f64;
        let mean = sum / n;
        let se = if trials > 1 {
            ((sq - n * mean * mean).max(0.0) / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        Ok(vec![num(a), num(r_max), num(gamma), num(mean), num(se)])
    });
    let mut t = Table::new(
        "gamma_sweep.csv",
        "ncmv/gamma_sweep/v1",
        &["alpha_eff", "r_max_m", "gamma", "gamma_mc", "gamma_mc_stderr"],
    );
    t.rows = rows.into_iter().collect::<Result<_>>()?;
    let summary = vec![
        format!("points: {} (alpha_eff x r_max)", points.len()),
        format!("random devices per point: {trials}"),
    ];
    Ok(Outcome { tables: vec![t], summary })
}

fn model_of(s: &GaussianSweepSection) -> GaussianVoteModel {
    GaussianVoteModel {
        mu: s.mu,
        sigma: s.sigma,
        num_eds: s.num_eds,
        gamma: s.gamma,
        noise_var: s.noise_var_w,
    }
}

/// `(t, ρ, analytic error, Monte Carlo estimate)` of one sweep point.
type GridPoint = (f64, f64, Option<f64>, Estimate);

/// Analytic HPA error where it applies (`ρ = 0`), Monte Carlo everywhere.
fn gaussian_grid(
    s: &GaussianSweepSection,
    seed: u64,
    trials: usize,
    exec: Exec,
) -> Result<(Vec<GridPoint>, bool)> {
    let model = model_of(s);
    let mut out = Vec::with_capacity(s.t.len() * s.rho.len());
    let mut few = false;
    for (i, &t) in s.t.iter().enumerate() {
        for (j, &rho) in s.rho.iter().enumerate() {
            let analytic = if rho == 0.0 { Some(model.error_prob(t)?.value) } else { None };
            let point_seed = derive_key(seed, &[(i * s.rho.len() + j) as u64]);
            let est = sp_error_prob(&model, t, rho, trials, point_seed, exec)?;
            few |= matches!(est.flag, Some(Flag::FewTrials { .. }));
            out.push((t, rho, analytic, est.value));
        }
    }
    Ok((out, few))
}

fn search_summary(s: &GaussianSweepSection) -> Result<Vec<String>> {
    let model = model_of(s);
    let hp = model.error_prob(0.0)?.value;
    let grid = linear_grid(s.t_search_start, s.t_search_stop, s.t_search_step);
    let (t_hat, p_hat) = optimize_threshold(&model, &grid)?;
    Ok(vec![
        format!("analytic HP error: {hp:.6}"),
        format!(
            "analytic HPA optimum over {} thresholds: t = {t_hat:.6} with error {p_hat:.6}",
            grid.len()
        ),
    ])
}

fn error_prob_sweep(s: &GaussianSweepSection, seed: u64, trials: usize, exec: Exec) -> Result<Outcome> {
    let (grid, few) = gaussian_grid(s, seed, trials, exec)?;
    let mut t = Table::new(
        "error_prob_sweep.csv",
        "ncmv/error_prob_sweep/v1",
        &["t", "rho", "analytic_p", "mc_p", "mc_stderr"],
    );
    for (th, rho, analytic, est) in &grid {
        t.rows.push(vec![num(*th), num(*rho), opt(*analytic), num(est.p), num(est.stderr)]);
    }
    let mut summary = search_summary(s)?;
    summary.push(format!("points: {} (t x rho), Monte Carlo trials per point: {trials}", grid.len()));
    if few {
        summary.push("warning: fewer Monte Carlo trials than recommended".to_string());
    }
    Ok(Outcome { tables: vec![t], summary })
}

fn sp_sweep(s: &GaussianSweepSection, seed: u64, trials: usize, exec: Exec) -> Result<Outcome> {
    let (grid, few) = gaussian_grid(s, seed, trials, exec)?;
    let mut columns = vec!["t".to_string(), "analytic_hpa_p".to_string()];
    for rho in &s.rho {
        columns.push(format!("mc_p_rho_{rho}"));
        columns.push(format!("mc_stderr_rho_{rho}"));
    }
    let mut t = Table {
        file: "sp_sweep.csv".to_string(),
        schema: "ncmv/sp_sweep/v1".to_string(),
        columns,
        rows: Vec::new(),
    };
    let model = model_of(s);
    for (i, &th) in s.t.iter().enumerate() {
        let mut row = vec![num(th), num(model.error_prob(th)?.value)];
        for (_, _, _, est) in &grid[i * s.rho.len()..(i + 1) * s.rho.len()] {
            row.push(num(est.p));
            row.push(num(est.stderr));
        }
        t.rows.push(row);
    }
    let best = grid
        .iter()
        .min_by(|a, b| a.3.p.total_cmp(&b.3.p))
        .expect("grid is nonempty");
    let mut summary = search_summary(s)?;
    summary.push(format!(
        "lowest Monte Carlo error: {:.6} +/- {:.6} at t = {}, rho = {}",
        best.3.p, best.3.stderr, best.0, best.1
    ));
    summary.push(format!("points: {} (t x rho), Monte Carlo trials per point: {trials}", grid.len()));
    if few {
        summary.push("warning: fewer Monte Carlo trials than recommended".to_string());
    }
    Ok(Outcome { tables: vec![t], summary })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

/// Replicate `r` uses master seed `seed + r`, so replicate 0 matches a single
/// run with the configured seed.
fn training_run(cfg: &TrainerConfig, replicates: usize, exec: Exec) -> Result<Outcome> {
    let mut history = Table::new(
        "training_history.csv",
        "ncmv/training_history/v1",
        &["replicate", "round", "mv_agreement", "test_accuracy", "test_loss", "train_loss"],
    );
    let mut per_ed = Table::new(
        "training_ed_loss.csv",
        "ncmv/training_ed_loss/v1",
        &["replicate", "ed", "distance_m", "received_power_w", "final_loss"],
    );
    let mut accuracies = Vec::new();
    let mut slopes = Vec::new();
    let mut agreement = Vec::new();
    for r in 0..replicates {
        let seed = cfg.seed.wrapping_add(r as u64);
        let mut c = cfg.clone();
        c.seed = seed;
        c.system.rng_seed = seed;
        let trainer = Trainer::new(c, exec)?;
        let state = trainer.run()?;
        for m in &state.history {
            let e = m.eval.as_ref();
            history.rows.push(vec![
                r.to_string(),
                m.round.to_string(),
                num(m.mv_agreement),
                opt(e.map(|e| e.test_accuracy)),
                opt(e.map(|e| e.test_loss)),
                opt(e.map(|e| e.train_loss)),
            ]);
        }
        let last = state.last_eval().expect("the final round is always evaluated");
        let d = &trainer.deployment;
        for (k, loss) in last.ed_losses.iter().enumerate() {
            per_ed.rows.push(vec![
                r.to_string(),
                k.to_string(),
                num(d.distances[k]),
                num(d.powers[k]),
                num(*loss),
            ]);
        }
        accuracies.push(last.test_accuracy);
        slopes.push(slope(&d.distances, &last.ed_losses));
        agreement.push(state.history.iter().map(|m| m.mv_agreement).sum::<f64>() / state.history.len() as f64);
    }
    let (acc, acc_sd) = mean_sd(&accuracies);
    let (sl, sl_sd) = mean_sd(&slopes);
    let (ag, _) = mean_sd(&agreement);
    let summary = vec![
        format!("replicates: {replicates}, rounds: {}", cfg.task.rounds),
        format!("final test accuracy: {acc:.4} (sd {acc_sd:.4})"),
        format!("per-device loss vs distance slope: {sl:.6} per m (sd {sl_sd:.6})"),
        format!("mean agreement with the ideal majority vote: {ag:.4}"),
    ];
    Ok(Outcome {
        tables: vec![history, per_ed],
        summary,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// PMEPR of frames carrying uniformly random gradients.
fn frame_pmeprs(wf: &WaveformConfig, symbols: usize, seed: u64, exec: Exec) -> Result<Vec<f64>> {
    let modem = Modem::new(wf)?;
    let q = wf.votes_per_symbol()?;
    let map = build_mapping(q, wf)?;
    exec.map(0..symbols, |i| -> ncmv::Result<f64> {
        let mut r = stream(seed, &[i as u64]);
        let g: Vec<f64> = (0..q).map(|_| r.random::<f64>() - 0.5).collect();
        let f = encode(&g, &WeightScheme::Hp, &map, wf, &mut r)?;
        pmepr(&modem.synthesize(&f.symbols[0])?.time, PMEPR_OVERSAMPLE)
    })
    .into_iter()
    .collect::<ncmv::Result<_>>()
    .map_err(Into::into)
}

/// OBDA symbols whose gradient signs are all equal, so every subcarrier
/// carries the same QPSK point.
fn obda_correlated_pmeprs(wf: &WaveformConfig, symbols: usize, seed: u64, exec: Exec) -> Result<Vec<f64>> {
    let modem = Modem::new(wf)?;
    let m = wf.num_subcarriers;
    exec.map(0..symbols, |i| -> ncmv::Result<f64> {
        let mut r = stream(seed, &[i as u64]);
        let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
        let s = obda_modulate(&vec![sign; 2 * m], m, &mut r);
        pmepr(&modem.synthesize(&s[0])?.time, PMEPR_OVERSAMPLE)
    })
    .into_iter()
    .collect::<ncmv::Result<_>>()
    .map_err(Into::into)
}

fn pmepr_ccdf(s: &PmeprSection, seed: u64, symbols: usize, exec: Exec) -> Result<Outcome> {
    let fsk = WaveformConfig::fsk_mv(s.idft_size, s.num_subcarriers, 1.0);
    let mut series: Vec<(String, Vec<f64>)> = vec![
        ("obda_correlated".to_string(), obda_correlated_pmeprs(&fsk, symbols, derive_key(seed, &[0]), exec)?),
        ("fsk_mv".to_string(), frame_pmeprs(&fsk, symbols, derive_key(seed, &[1]), exec)?),
    ];
    for (j, &m) in s.ppm_m_seq.iter().enumerate() {
        let wf = WaveformConfig::ppm_mv(s.idft_size, s.num_subcarriers, 1.0, m, s.ppm_m_gap);
        series.push((format!("ppm_mv_m{m}"), frame_pmeprs(&wf, symbols, derive_key(seed, &[2 + j as u64]), exec)?));
    }
    let mut columns = vec!["threshold_db".to_string()];
    columns.extend(series.iter().map(|(n, _)| format!("ccdf_{n}")));
    let mut t = Table {
        file: "pmepr_ccdf.csv".to_string(),
        schema: "ncmv/pmepr_ccdf/v1".to_string(),
        columns,
        rows: Vec::new(),
    };
    for th in linear_grid(s.threshold_db_start, s.threshold_db_stop, s.threshold_db_step) {
        let mut row = vec![num(th)];
        for (_, v) in &series {
            row.push(num(v.iter().filter(|&&x| x > th).count() as f64 / v.len() as f64));
        }
        t.rows.push(row);
    }
    let mut summary = vec![format!("symbols per series: {symbols}")];
    for (n, v) in series {
        summary.push(format!("median PMEPR {n}: {:.3} dB", median(v)));
    }
    Ok(Outcome { tables: vec![t], summary })
}

/// One FSK-MV vote over flat Rayleigh fading with equal received powers.
/// Each device votes correctly, wrongly, or not at all with probabilities
/// `p`, `q`, `z`, encoded as gradients `+1`, `−1`, and `0.25` under HPA(0.5).
fn detector_point(k: usize, z: f64, q: f64, s: &DetectorSection, trials: usize, seed: u64, exec: Exec) -> Result<(f64, Estimate)> {
    let wf = WaveformConfig::fsk_mv(4, 2, 1.0);
    let link = OacLink::new(
        1,
        &wf,
        WeightScheme::Hpa { t: 0.5 },
        Propagation::Fading(ChannelProfile::flat()),
        SyncConfig::disabled(),
        s.noise_var_w,
    )?;
    let powers = vec![s.gamma; k];
    let errors = exec
        .map(0..trials, |i| -> Result<usize> {
            let mut r = stream(seed, &[0, i as u64]);
            let grads: Vec<Vec<f64>> = (0..k)
                .map(|_| {
                    let u: f64 = r.random();
                    vec![if u < z {
                        0.25
                    } else if u < z + q {
                        -1.0
                    } else {
                        1.0
                    }]
                })
                .collect();
            let v = link.aggregate(&grads, &powers, seed, &[1, i as u64], Exec::Sequential)?;
            Ok(usize::from(v[0] < 0))
        })
        .into_iter()
        .sum::<Result<usize>>()?;
    let analytic = error_prob_hpa(&VoteProbabilities::from_zq(z, q)?, k, s.gamma, s.noise_var_w)?.value;
    Ok((analytic, Estimate::from_counts(errors as f64, trials)))
}

fn detector_validation(s: &DetectorSection, seed: u64, trials: usize, exec: Exec) -> Result<Outcome> {
    let mut t = Table::new(
        "detector_validation.csv",
        "ncmv/detector_validation/v1",
        &["num_eds", "z", "q", "analytic_p", "sim_p", "sim_stderr", "z_score"],
    );
    let mut worst: f64 = 0.0;
    let mut within = 0;
    let mut i = 0u64;
    for &k in &s.num_eds {
        for &z in &s.z {
            for &q in &s.q {
                let (analytic, est) = detector_point(k, z, q, s, trials, derive_key(seed, &[i]), exec)?;
                i += 1;
                let zs = est.z_score(analytic);
                worst = worst.max(zs);
                within += usize::from(zs <= 3.0);
                t.rows.push(vec![
                    k.to_string(),
                    num(z),
                    num(q),
                    num(analytic),
                    num(est.p),
                    num(est.stderr),
                    num(zs),
                ]);
            }
        }
    }
    let summary = vec![
        format!("points: {i}, trials per point: {trials}"),
        format!("within 3 binomial standard errors of the closed form: {within}/{i}"),
        format!("largest deviation: {worst:.3} standard errors"),
    ];
    Ok(Outcome { tables: vec![t], summary })
}
