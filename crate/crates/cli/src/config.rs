//! Experiment configuration files.
//!
//! Configs are TOML with one section per module. Every physical quantity
//! carries its unit in the key name (`r_max_m`, `t_sync_ns`, `noise_var_w`).
//! Unknown keys are rejected, and sections that the chosen experiment does not
//! read are errors rather than being silently ignored.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ncmv::channel::{ChannelProfile, SyncConfig};
use ncmv::codec::WeightScheme;
use ncmv::deployment::{noise_var_from_snr_db, DeploymentMode, SystemConfig};
use ncmv::link::Propagation;
use ncmv::trainer::{DatasetSpec, Placement, TrainerConfig, TrainingTask, Transport};
use ncmv::waveform::WaveformConfig;

use crate::error::{invalid, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    GammaSweep,
    ErrorProbSweep,
    SpSweep,
    TrainingRun,
    PmeprCcdf,
    DetectorValidation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GammaSweep => "gamma_sweep",
            ExperimentKind::ErrorProbSweep => "error_prob_sweep",
            ExperimentKind::SpSweep => "sp_sweep",
            ExperimentKind::TrainingRun => "training_run",
            ExperimentKind::PmeprCcdf => "pmepr_ccdf",
            ExperimentKind::DetectorValidation => "detector_validation",
        }
    }
}

/// Top level of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Master seed of every random stream in the run.
    pub seed: u64,
    /// Monte Carlo trials per point; replicates for `training_run`, symbols
    /// per series for `pmepr_ccdf`.
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sync: Option<SyncSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_sweep: Option<GammaSweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_prob_sweep: Option<GaussianSweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sp_sweep: Option<GaussianSweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmepr_ccdf: Option<PmeprSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_validation: Option<DetectorSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentKind {
    Ring,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub num_eds: usize,
    pub r_min_m: f64,
    pub r_max_m: f64,
    pub r_ref_m: f64,
    pub path_loss_exp: f64,
    pub pc_comp: f64,
    pub p_ref_w: f64,
    /// Give exactly one of `noise_var_w` and `snr_ref_db`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_var_w: Option<f64>,
    /// SNR at the reference distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_ref_db: Option<f64>,
    pub deployment: DeploymentKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    Fsk,
    Ppm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSection {
    pub kind: WaveformKind,
    pub idft_size: usize,
    pub num_subcarriers: usize,
    pub sample_rate_hz: f64,
    pub cp_samples: usize,
    /// PPM only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_seq: Option<usize>,
    /// PPM only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_gap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Unit gain, no timing errors.
    Ideal,
    Flat,
    Epa,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub profile: ProfileKind,
    /// Custom profiles only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tap_delays_ns: Option<Vec<f64>>,
    /// Custom profiles only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tap_powers_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncSection {
    pub enabled: bool,
    pub t_sync_ns: f64,
    pub n_err_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    Homogeneous,
    Rings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    Ideal,
    Oac,
    Obda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Hp,
    Hpa,
    Sp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    pub rounds: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub eval_interval: usize,
    pub init_scale: f64,
    pub features: usize,
    pub classes: usize,
    pub samples_per_class: usize,
    pub test_per_class: usize,
    pub center_radius: f64,
    pub spread: f64,
    pub label_noise: f64,
    pub placement: PlacementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rings: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring_window: Option<usize>,
    pub transport: TransportKind,
    /// OAC only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeKind>,
    /// HPA and SP only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// SP only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// OBDA only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_tci: Option<bool>,
    /// OBDA only; truncation level on `|h|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tci_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSweepSection {
    pub alpha_eff: Vec<f64>,
    pub r_max_m: Vec<f64>,
    pub r_min_m: f64,
    pub r_ref_m: f64,
    pub path_loss_exp: f64,
    pub p_ref_w: f64,
}

/// Gaussian gradient model shared by `error_prob_sweep` and `sp_sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSweepSection {
    pub mu: f64,
    pub sigma: f64,
    pub num_eds: usize,
    pub gamma: f64,
    pub noise_var_w: f64,
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
    /// Grid of the analytic threshold search reported in the summary.
    pub t_search_start: f64,
    pub t_search_stop: f64,
    pub t_search_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmeprSection {
    pub idft_size: usize,
    pub num_subcarriers: usize,
    pub ppm_m_seq: Vec<usize>,
    pub ppm_m_gap: usize,
    pub threshold_db_start: f64,
    pub threshold_db_stop: f64,
    pub threshold_db_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub num_eds: Vec<usize>,
    pub z: Vec<f64>,
    pub q: Vec<f64>,
    pub gamma: f64,
    pub noise_var_w: f64,
}

/// Parses a config, reporting the origin, line, and offending key on error.
pub fn parse(text: &str, origin: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })
}

/// A config resolved into simulator types.
#[derive(Debug, Clone)]
pub enum Plan {
    GammaSweep(GammaSweepSection),
    ErrorProbSweep(GaussianSweepSection),
    SpSweep(GaussianSweepSection),
    Training(Box<TrainerConfig>),
    Pmepr(PmeprSection),
    Detector(DetectorSection),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be finite and positive, got {v}"))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        invalid(format!("{name} must list at least one value"))
    } else {
        Ok(())
    }
}

fn probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        invalid(format!("{name} must lie in [0, 1], got {v}"))
    }
}

fn require<'a, T>(section: &'a Option<T>, name: &str, exp: ExperimentKind) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| CliError::Invalid(format!("experiment {} needs a [{name}] section", exp.name())))
}

fn forbid<T>(key: &Option<T>, name: &str, why: &str) -> Result<()> {
    if key.is_some() {
        invalid(format!("{name} is not used {why}"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    fn sections(&self) -> [(&'static str, bool); 10] {
        [
            ("system", self.system.is_some()),
            ("waveform", self.waveform.is_some()),
            ("channel", self.channel.is_some()),
            ("sync", self.sync.is_some()),
            ("training", self.training.is_some()),
            ("gamma_sweep", self.gamma_sweep.is_some()),
            ("error_prob_sweep", self.error_prob_sweep.is_some()),
            ("sp_sweep", self.sp_sweep.is_some()),
            ("pmepr_ccdf", self.pmepr_ccdf.is_some()),
            ("detector_validation", self.detector_validation.is_some()),
        ]
    }

    fn used_sections(&self) -> Vec<&'static str> {
        match self.experiment {
            ExperimentKind::TrainingRun => {
                let over_air = self
                    .training
                    .as_ref()
                    .is_some_and(|t| t.transport != TransportKind::Ideal);
                if over_air {
                    vec!["system", "training", "waveform", "channel", "sync"]
                } else {
                    vec!["system", "training"]
                }
            }
            other => vec![other.name()],
        }
    }

    /// Checks the config and converts it into simulator types.
    pub fn resolve(&self) -> Result<Plan> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        let used = self.used_sections();
        for (name, present) in self.sections() {
            if present && !used.contains(&name) {
                return invalid(format!(
                    "section [{name}] is not used by experiment {}",
                    self.experiment.name()
                ));
            }
        }
        let exp = self.experiment;
        Ok(match exp {
            ExperimentKind::GammaSweep => {
                let s = require(&self.gamma_sweep, "gamma_sweep", exp)?;
                s.check()?;
                Plan::GammaSweep(s.clone())
            }
            ExperimentKind::ErrorProbSweep => {
                let s = require(&self.error_prob_sweep, "error_prob_sweep", exp)?;
                s.check("error_prob_sweep")?;
                Plan::ErrorProbSweep(s.clone())
            }
            ExperimentKind::SpSweep => {
                let s = require(&self.sp_sweep, "sp_sweep", exp)?;
                s.check("sp_sweep")?;
                Plan::SpSweep(s.clone())
            }
            ExperimentKind::PmeprCcdf => {
                let s = require(&self.pmepr_ccdf, "pmepr_ccdf", exp)?;
                s.check()?;
                Plan::Pmepr(s.clone())
            }
            ExperimentKind::DetectorValidation => {
                let s = require(&self.detector_validation, "detector_validation", exp)?;
                s.check()?;
                Plan::Detector(s.clone())
            }
            ExperimentKind::TrainingRun => Plan::Training(Box::new(self.trainer_config()?)),
        })
    }

    fn trainer_config(&self) -> Result<TrainerConfig> {
        let exp = self.experiment;
        let system = require(&self.system, "system", exp)?.to_core(self.seed)?;
        let t = require(&self.training, "training", exp)?;
        let placement = match t.placement {
            PlacementKind::Homogeneous => {
                forbid(&t.rings, "training.rings", "with homogeneous placement")?;
                forbid(&t.ring_window, "training.ring_window", "with homogeneous placement")?;
                Placement::Homogeneous
            }
            PlacementKind::Rings => Placement::HeterogeneousRings {
                rings: t.rings.ok_or_else(|| CliError::Invalid("training.rings is required for ring placement".into()))?,
                window: t
                    .ring_window
                    .ok_or_else(|| CliError::Invalid("training.ring_window is required for ring placement".into()))?,
            },
        };
        let task = TrainingTask {
            data: DatasetSpec {
                features: t.features,
                classes: t.classes,
                samples_per_class: t.samples_per_class,
                test_per_class: t.test_per_class,
                center_radius: t.center_radius,
                spread: t.spread,
                label_noise: t.label_noise,
            },
            placement,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            rounds: t.rounds,
            eval_interval: t.eval_interval,
            init_scale: t.init_scale,
        };
        task.data.validate()?;
        if t.rounds == 0 {
            return invalid("training.rounds must be at least 1");
        }
        nonnegative("training.init_scale", t.init_scale)?;
        let transport = match t.transport {
            TransportKind::Ideal => {
                forbid(&t.scheme, "training.scheme", "with the ideal transport")?;
                forbid(&t.threshold, "training.threshold", "with the ideal transport")?;
                forbid(&t.rho, "training.rho", "with the ideal transport")?;
                forbid(&t.use_tci, "training.use_tci", "with the ideal transport")?;
                forbid(&t.tci_threshold, "training.tci_threshold", "with the ideal transport")?;
                Transport::IdealMv
            }
            TransportKind::Oac => {
                forbid(&t.use_tci, "training.use_tci", "with the oac transport")?;
                forbid(&t.tci_threshold, "training.tci_threshold", "with the oac transport")?;
                Transport::Oac {
                    waveform: require(&self.waveform, "waveform", exp)?.to_core()?,
                    scheme: t.weight_scheme()?,
                    sync: require(&self.sync, "sync", exp)?.to_core()?,
                    propagation: require(&self.channel, "channel", exp)?.to_core()?,
                }
            }
            TransportKind::Obda => {
                forbid(&t.scheme, "training.scheme", "with the obda transport")?;
                forbid(&t.threshold, "training.threshold", "with the obda transport")?;
                forbid(&t.rho, "training.rho", "with the obda transport")?;
                let wf = require(&self.waveform, "waveform", exp)?;
                if wf.kind != WaveformKind::Fsk {
                    return invalid("obda uses plain OFDM; set waveform.kind = \"fsk\"");
                }
                let tci_threshold = t
                    .tci_threshold
                    .ok_or_else(|| CliError::Invalid("training.tci_threshold is required for obda".into()))?;
                nonnegative("training.tci_threshold", tci_threshold)?;
                Transport::Obda {
                    waveform: wf.to_core()?,
                    tci_threshold,
                    use_tci: t
                        .use_tci
                        .ok_or_else(|| CliError::Invalid("training.use_tci is required for obda".into()))?,
                    sync: require(&self.sync, "sync", exp)?.to_core()?,
                    propagation: require(&self.channel, "channel", exp)?.to_core()?,
                }
            }
        };
        Ok(TrainerConfig {
            system,
            task,
            transport,
            seed: self.seed,
        })
    }
}

impl SystemSection {
    fn to_core(&self, seed: u64) -> Result<SystemConfig> {
        let noise_var = match (self.noise_var_w, self.snr_ref_db) {
            (Some(v), None) => v,
            (None, Some(db)) if db.is_finite() => noise_var_from_snr_db(self.p_ref_w, db),
            (None, Some(db)) => return invalid(format!("system.snr_ref_db must be finite, got {db}")),
            _ => return invalid("give exactly one of system.noise_var_w and system.snr_ref_db"),
        };
        let cfg = SystemConfig {
            num_eds: self.num_eds,
            r_min: self.r_min_m,
            r_max: self.r_max_m,
            r_ref: self.r_ref_m,
            path_loss_exp: self.path_loss_exp,
            pc_comp: self.pc_comp,
            p_ref: self.p_ref_w,
            noise_var,
            deployment_mode: match self.deployment {
                DeploymentKind::Ring => DeploymentMode::DeterministicRing,
                DeploymentKind::Random => DeploymentMode::UniformRandom,
            },
            rng_seed: seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl WaveformSection {
    fn to_core(&self) -> Result<WaveformConfig> {
        positive("waveform.sample_rate_hz", self.sample_rate_hz)?;
        let base = match self.kind {
            WaveformKind::Fsk => {
                forbid(&self.m_seq, "waveform.m_seq", "by fsk")?;
                forbid(&self.m_gap, "waveform.m_gap", "by fsk")?;
                WaveformConfig::fsk_mv(self.idft_size, self.num_subcarriers, self.sample_rate_hz)
            }
            WaveformKind::Ppm => WaveformConfig::ppm_mv(
                self.idft_size,
                self.num_subcarriers,
                self.sample_rate_hz,
                self.m_seq
                    .ok_or_else(|| CliError::Invalid("waveform.m_seq is required for ppm".into()))?,
                self.m_gap
                    .ok_or_else(|| CliError::Invalid("waveform.m_gap is required for ppm".into()))?,
            ),
        };
        let wf = WaveformConfig {
            cp_len: self.cp_samples,
            ..base
        };
        wf.validate()?;
        Ok(wf)
    }
}

impl ChannelSection {
    fn to_core(&self) -> Result<Propagation> {
        if self.profile != ProfileKind::Custom {
            forbid(&self.tap_delays_ns, "channel.tap_delays_ns", "by built-in profiles")?;
            forbid(&self.tap_powers_db, "channel.tap_powers_db", "by built-in profiles")?;
        }
        Ok(match self.profile {
            ProfileKind::Ideal => Propagation::Ideal,
            ProfileKind::Flat => Propagation::Fading(ChannelProfile::flat()),
            ProfileKind::Epa => Propagation::Fading(ChannelProfile::epa()),
            ProfileKind::Custom => {
                let delays = self
                    .tap_delays_ns
                    .as_ref()
                    .ok_or_else(|| CliError::Invalid("channel.tap_delays_ns is required for a custom profile".into()))?;
                let powers = self
                    .tap_powers_db
                    .clone()
                    .ok_or_else(|| CliError::Invalid("channel.tap_powers_db is required for a custom profile".into()))?;
                let delays = delays.iter().map(|d| d * 1e-9).collect();
                Propagation::Fading(ChannelProfile::new("custom", delays, powers)?)
            }
        })
    }
}

impl SyncSection {
    fn to_core(&self) -> Result<SyncConfig> {
        let s = if self.enabled {
            SyncConfig {
                t_sync: self.t_sync_ns * 1e-9,
                n_err: self.n_err_samples,
                enabled: true,
            }
        } else {
            if self.t_sync_ns != 0.0 || self.n_err_samples != 0 {
                return invalid("sync.t_sync_ns and sync.n_err_samples must be 0 when sync is disabled");
            }
            SyncConfig::disabled()
        };
        s.validate()?;
        Ok(s)
    }
}

impl TrainingSection {
    fn weight_scheme(&self) -> Result<WeightScheme> {
        let scheme = self
            .scheme
            .ok_or_else(|| CliError::Invalid("training.scheme is required for oac".into()))?;
        let need_t = || {
            self.threshold
                .ok_or_else(|| CliError::Invalid("training.threshold is required for hpa and sp".into()))
        };
        let s = match scheme {
            SchemeKind::Hp => {
                forbid(&self.threshold, "training.threshold", "by hp")?;
                forbid(&self.rho, "training.rho", "by hp")?;
                WeightScheme::Hp
            }
            SchemeKind::Hpa => {
                forbid(&self.rho, "training.rho", "by hpa")?;
                WeightScheme::Hpa { t: need_t()? }
            }
            SchemeKind::Sp => WeightScheme::Sp {
                t: need_t()?,
                rho: self
                    .rho
                    .ok_or_else(|| CliError::Invalid("training.rho is required for sp".into()))?,
            },
        };
        s.validate()?;
        Ok(s)
    }
}

impl GammaSweepSection {
    fn check(&self) -> Result<()> {
        nonempty("gamma_sweep.alpha_eff", &self.alpha_eff)?;
        nonempty("gamma_sweep.r_max_m", &self.r_max_m)?;
        for &a in &self.alpha_eff {
            if !(0.0..=self.path_loss_exp).contains(&a) {
                return invalid(format!(
                    "gamma_sweep.alpha_eff values must lie in [0, path_loss_exp = {}], got {a}",
                    self.path_loss_exp
                ));
            }
        }
        for &r in &self.r_max_m {
            self.system(0.0, r).validate()?;
        }
        Ok(())
    }

    /// Scenario of one sweep point.
    pub fn system(&self, alpha_eff: f64, r_max: f64) -> SystemConfig {
        SystemConfig {
            r_min: self.r_min_m,
            r_max,
            r_ref: self.r_ref_m,
            path_loss_exp: self.path_loss_exp,
            pc_comp: self.path_loss_exp - alpha_eff,
            p_ref: self.p_ref_w,
            ..SystemConfig::default()
        }
    }
}

impl GaussianSweepSection {
    fn check(&self, name: &str) -> Result<()> {
        positive(&format!("{name}.sigma"), self.sigma)?;
        if !self.mu.is_finite() {
            return invalid(format!("{name}.mu must be finite"));
        }
        if self.num_eds == 0 {
            return invalid(format!("{name}.num_eds must be at least 1"));
        }
        positive(&format!("{name}.gamma"), self.gamma)?;
        nonnegative(&format!("{name}.noise_var_w"), self.noise_var_w)?;
        nonempty(&format!("{name}.t"), &self.t)?;
        nonempty(&format!("{name}.rho"), &self.rho)?;
        for &t in &self.t {
            nonnegative(&format!("{name}.t"), t)?;
        }
        for &r in &self.rho {
            probability(&format!("{name}.rho"), r)?;
        }
        nonnegative(&format!("{name}.t_search_start"), self.t_search_start)?;
        positive(&format!("{name}.t_search_step"), self.t_search_step)?;
        if !(self.t_search_stop >= self.t_search_start) {
            return invalid(format!("{name}.t_search_stop must not be below t_search_start"));
        }
        Ok(())
    }
}

impl PmeprSection {
    fn check(&self) -> Result<()> {
        WaveformConfig::fsk_mv(self.idft_size, self.num_subcarriers, 1.0).validate()?;
        for &m in &self.ppm_m_seq {
            WaveformConfig::ppm_mv(self.idft_size, self.num_subcarriers, 1.0, m, self.ppm_m_gap).validate()?;
        }
        for (name, v) in [
            ("pmepr_ccdf.threshold_db_start", self.threshold_db_start),
            ("pmepr_ccdf.threshold_db_stop", self.threshold_db_stop),
        ] {
            if !v.is_finite() {
                return invalid(format!("{name} must be finite"));
            }
        }
        positive("pmepr_ccdf.threshold_db_step", self.threshold_db_step)?;
        if self.threshold_db_stop < self.threshold_db_start {
            return invalid("pmepr_ccdf.threshold_db_stop must not be below threshold_db_start");
        }
        Ok(())
    }
}

impl DetectorSection {
    fn check(&self) -> Result<()> {
        nonempty("detector_validation.num_eds", &self.num_eds)?;
        nonempty("detector_validation.z", &self.z)?;
        nonempty("detector_validation.q", &self.q)?;
        if self.num_eds.contains(&0) {
            return invalid("detector_validation.num_eds values must be at least 1");
        }
        for &z in &self.z {
            for &q in &self.q {
                probability("detector_validation.z", z)?;
                probability("detector_validation.q", q)?;
                if z + q > 1.0 {
                    return invalid(format!("detector_validation: z + q must not exceed 1, got {z} + {q}"));
                }
            }
        }
        positive("detector_validation.gamma", self.gamma)?;
        nonnegative("detector_validation.noise_var_w", self.noise_var_w)
    }
}
