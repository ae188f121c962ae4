//! Distributed signSGD with majority vote over a simulated uplink.
//!
//! Each round every device computes a minibatch gradient of its local
//! cross-entropy, the transport turns the gradients into a vote `v̂ ∈ {±1}^Q`,
//! and all devices apply `w ← w − η v̂`.

pub mod data;
pub mod model;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::SyncConfig;
use crate::codec::{self, WeightScheme};
use crate::deployment::{build_deployment, Deployment, SystemConfig};
use crate::error::{config, Result};
use crate::exec::Exec;
use crate::link::{ObdaLink, OacLink, Propagation};
use crate::rng::{self, tag};
use crate::waveform::WaveformConfig;

pub use data::{Dataset, DatasetSpec, Placement};
pub use model::SoftmaxModel;

/// Learning problem and optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTask {
    pub data: DatasetSpec,
    pub placement: Placement,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rounds: usize,
    /// Test metrics and per-device losses are computed every this many rounds
    /// and after the last one.
    pub eval_interval: usize,
    /// Standard deviation of the initial parameters.
    pub init_scale: f64,
}

impl Default for TrainingTask {
    fn default() -> Self {
        Self {
            data: DatasetSpec::default(),
            placement: Placement::Homogeneous,
            batch_size: 32,
            learning_rate: 1e-2,
            rounds: 300,
            eval_interval: 10,
            init_scale: 0.01,
        }
    }
}

/// How local gradients become the global update direction.
#[derive(Debug, Clone, PartialEq)]
pub enum Transport {
    /// Error-free majority vote of the gradient signs.
    IdealMv,
    /// Non-coherent majority vote over the air.
    Oac {
        waveform: WaveformConfig,
        scheme: WeightScheme,
        sync: SyncConfig,
        propagation: Propagation,
    },
    /// One-bit digital aggregation baseline.
    Obda {
        waveform: WaveformConfig,
        tci_threshold: f64,
        use_tci: bool,
        sync: SyncConfig,
        propagation: Propagation,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub system: SystemConfig,
    pub task: TrainingTask,
    pub transport: Transport,
    pub seed: u64,
}

/// Metrics computed at an evaluation round.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub test_accuracy: f64,
    pub test_loss: f64,
    /// Mean over devices of the loss on their full local dataset.
    pub train_loss: f64,
    pub ed_losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics {
    /// Rounds completed, starting at 1.
    pub round: usize,
    /// Fraction of coordinates where the transported vote equals the ideal
    /// majority vote of the gradient signs.
    pub mv_agreement: f64,
    pub eval: Option<Evaluation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingState {
    pub params: Vec<f64>,
    pub round: usize,
    pub history: Vec<RoundMetrics>,
}

impl TrainingState {
    /// The most recent evaluation, if any.
    pub fn last_eval(&self) -> Option<&Evaluation> {
        self.history.iter().rev().find_map(|m| m.eval.as_ref())
    }
}

enum Link {
    Ideal,
    Oac(OacLink),
    Obda(ObdaLink),
}

/// Mean cross-entropy gradient over a batch drawn without replacement.
pub fn local_gradient<R: Rng + ?Sized>(
    model: &SoftmaxModel,
    params: &[f64],
    data: &Dataset,
    batch: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return config("empty local dataset");
    }
    if batch == 0 || batch > data.len() {
        return config(format!("batch of {batch} from {} samples", data.len()));
    }
    let idx: Vec<usize> = if batch == data.len() {
        (0..batch).collect()
    } else {
        index::sample(rng, data.len(), batch).into_vec()
    };
    Ok(model.loss_and_grad(params, data, &idx).1)
}

/// A configured training run.
pub struct Trainer {
    pub config: TrainerConfig,
    pub model: SoftmaxModel,
    pub deployment: Deployment,
    pub datasets: Vec<Dataset>,
    pub test: Dataset,
    pub exec: Exec,
    link: Link,
}

impl Trainer {
    pub fn new(config: TrainerConfig, exec: Exec) -> Result<Self> {
        let task = &config.task;
        task.data.validate()?;
        if task.batch_size == 0 {
            return crate::error::config("batch_size must be positive");
        }
        if !(task.learning_rate.is_finite() && task.learning_rate > 0.0) {
            return crate::error::config("learning_rate must be positive");
        }
        if task.eval_interval == 0 {
            return crate::error::config("eval_interval must be positive");
        }
        let deployment = build_deployment(&config.system)?;
        let model = SoftmaxModel::new(task.data.features, task.data.classes);
        let counts = data::allocation(
            &task.data,
            task.placement,
            &deployment.distances,
            config.system.r_min,
            config.system.r_max,
        )?;
        let datasets: Vec<Dataset> = counts
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let mut r = rng::stream(config.seed, &[tag::DATA, k as u64]);
                let mut ds = Dataset::new(task.data.features);
                for (label, &n) in row.iter().enumerate() {
                    task.data.draw(label, n, true, &mut ds, &mut r);
                }
                ds
            })
            .collect();
        if let Some(k) = datasets.iter().position(|d| d.len() < task.batch_size) {
            return crate::error::config(format!(
                "device {k} holds {} samples, fewer than the batch size {}",
                datasets[k].len(),
                task.batch_size
            ));
        }
        let test = task
            .data
            .test_set(&mut rng::stream(config.seed, &[tag::DATA, u64::MAX]));
        let q = model.num_params();
        let noise = config.system.noise_var;
        let link = match &config.transport {
            Transport::IdealMv => Link::Ideal,
            Transport::Oac {
                waveform,
                scheme,
                sync,
                propagation,
            } => Link::Oac(OacLink::new(q, waveform, *scheme, propagation.clone(), *sync, noise)?),
            Transport::Obda {
                waveform,
                tci_threshold,
                use_tci,
                sync,
                propagation,
            } => Link::Obda(ObdaLink::new(
                q,
                waveform,
                *tci_threshold,
                *use_tci,
                propagation.clone(),
                *sync,
                noise,
            )?),
        };
        Ok(Self {
            config,
            model,
            deployment,
            datasets,
            test,
            exec,
            link,
        })
    }

    pub fn num_params(&self) -> usize {
        self.model.num_params()
    }

    pub fn init_state(&self) -> TrainingState {
        let mut r = rng::stream(self.config.seed, &[tag::INIT]);
        let s = self.config.task.init_scale;
        let params = (0..self.num_params())
            .map(|_| s * r.sample::<f64, _>(StandardNormal))
            .collect();
        TrainingState {
            params,
            round: 0,
            history: Vec::new(),
        }
    }

    /// Local gradients of every device at `params` for round `round`.
    pub fn gradients(&self, params: &[f64], round: usize) -> Result<Vec<Vec<f64>>> {
        let b = self.config.task.batch_size;
        self.exec
            .map(0..self.datasets.len(), |k| {
                let mut r = rng::stream(self.config.seed, &[tag::GRADIENT, round as u64, k as u64]);
                local_gradient(&self.model, params, &self.datasets[k], b, &mut r)
            })
            .into_iter()
            .collect()
    }

    /// Ideal majority vote of the gradient signs.
    pub fn ideal_vote(&self, grads: &[Vec<f64>], round: usize) -> Result<Vec<i8>> {
        let mut r = rng::stream(self.config.seed, &[tag::MV, round as u64]);
        let signs: Vec<Vec<i8>> = grads
            .iter()
            .map(|g| g.iter().map(|&x| codec::sign_with_tiebreak(x, &mut r)).collect())
            .collect();
        codec::ideal_mv(&signs, &mut r)
    }

    /// Vote produced by the configured transport.
    pub fn transport_vote(&self, grads: &[Vec<f64>], round: usize) -> Result<Vec<i8>> {
        let seed = self.config.seed;
        let path = [tag::LINK, round as u64];
        let p = &self.deployment.powers;
        match &self.link {
            Link::Ideal => self.ideal_vote(grads, round),
            Link::Oac(l) => l.aggregate(grads, p, seed, &path, self.exec),
            Link::Obda(l) => l.aggregate(grads, p, seed, &path, self.exec),
        }
    }

    /// Per-device loss on the full local datasets.
    pub fn ed_losses(&self, params: &[f64]) -> Vec<f64> {
        self.exec
            .map_slice(&self.datasets, |d| self.model.mean_loss(params, d))
    }

    pub fn evaluate(&self, params: &[f64]) -> Evaluation {
        let (test_accuracy, test_loss) = self.model.evaluate(params, &self.test);
        let ed_losses = self.ed_losses(params);
        let train_loss = ed_losses.iter().sum::<f64>() / ed_losses.len() as f64;
        Evaluation {
            test_accuracy,
            test_loss,
            train_loss,
            ed_losses,
        }
    }

    /// One communication round.
    pub fn step(&self, state: &mut TrainingState) -> Result<()> {
        let round = state.round;
        let grads = self.gradients(&state.params, round)?;
        let vote = self.transport_vote(&grads, round)?;
        let ideal = match self.link {
            Link::Ideal => vote.clone(),
            _ => self.ideal_vote(&grads, round)?,
        };
        let agree = vote.iter().zip(&ideal).filter(|(a, b)| a == b).count();
        let eta = self.config.task.learning_rate;
        for (w, &v) in state.params.iter_mut().zip(&vote) {
            *w -= eta * f64::from(v);
        }
        state.round += 1;
        let task = &self.config.task;
        let eval = (state.round % task.eval_interval == 0 || state.round == task.rounds)
            .then(|| self.evaluate(&state.params));
        state.history.push(RoundMetrics {
            round: state.round,
            mv_agreement: agree as f64 / vote.len() as f64,
            eval,
        });
        Ok(())
    }

    /// Runs all configured rounds from the initial state.
    pub fn run(&self) -> Result<TrainingState> {
        let mut state = self.init_state();
        for _ in 0..self.config.task.rounds {
            self.step(&mut state)?;
        }
        Ok(state)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(transport: Transport) -> TrainerConfig {
        TrainerConfig {
            system: SystemConfig {
                num_eds: 5,
                ..SystemConfig::default()
            },
            task: TrainingTask {
                data: DatasetSpec {
                    samples_per_class: 200,
                    test_per_class: 50,
                    ..DatasetSpec::default()
                },
                rounds: 20,
                eval_interval: 5,
                ..TrainingTask::default()
            },
            transport,
            seed: 11,
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let t = Trainer::new(small(Transport::IdealMv), Exec::Parallel).unwrap();
        let a = t.run().unwrap();
        let b = Trainer::new(small(Transport::IdealMv), Exec::Sequential)
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.history.iter().filter(|m| m.eval.is_some()).count(), 4);
        assert!(a.params.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn single_device_ideal_vote_is_gradient_sign() {
        let mut cfg = small(Transport::IdealMv);
        cfg.system.num_eds = 1;
        let t = Trainer::new(cfg, Exec::Sequential).unwrap();
        let s = t.init_state();
        let g = t.gradients(&s.params, 0).unwrap();
        let v = t.transport_vote(&g, 0).unwrap();
        for (gi, vi) in g[0].iter().zip(&v) {
            assert_eq!(*vi, if *gi > 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn batch_larger_than_dataset_is_rejected() {
        let mut cfg = small(Transport::IdealMv);
        cfg.task.batch_size = 10_000;
        assert!(Trainer::new(cfg, Exec::Sequential).is_err());
    }

    #[test]
    fn slope_of_line() {
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-12);
    }
}
