//! Synthetic Gaussian-blob classification data and its placement on devices.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{config, Result};

/// Labelled samples stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub features: usize,
    pub x: Vec<f64>,
    pub y: Vec<usize>,
}

impl Dataset {
    pub fn new(features: usize) -> Self {
        Self {
            features,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.x[i * self.features..(i + 1) * self.features]
    }

    pub fn push(&mut self, x: &[f64], y: usize) {
        debug_assert_eq!(x.len(), self.features);
        self.x.extend_from_slice(x);
        self.y.push(y);
    }

    /// Number of samples per label, for labels `0..classes`.
    pub fn label_counts(&self, classes: usize) -> Vec<usize> {
        let mut c = vec![0; classes];
        for &y in &self.y {
            c[y] += 1;
        }
        c
    }
}

/// Class-conditional Gaussian blobs with centers evenly spaced on a circle in
/// the first two feature dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub features: usize,
    pub classes: usize,
    /// Training samples drawn per class across all devices.
    pub samples_per_class: usize,
    pub test_per_class: usize,
    /// Radius of the circle of class centers.
    pub center_radius: f64,
    /// Per-coordinate standard deviation of each blob.
    pub spread: f64,
    /// Probability that a training label is replaced by a uniform random one.
    pub label_noise: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            features: 2,
            classes: 10,
            samples_per_class: 5000,
            test_per_class: 200,
            center_radius: 1.0,
            spread: 0.3,
            label_noise: 0.0,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.features < 2 {
            return config("at least two features are required");
        }
        if self.classes < 2 {
            return config("at least two classes are required");
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return config("spread must be positive");
        }
        if !(self.center_radius.is_finite() && self.center_radius >= 0.0) {
            return config("center_radius must be nonnegative");
        }
        if !(0.0..=1.0).contains(&self.label_noise) {
            return config("label_noise must be a probability");
        }
        Ok(())
    }

    pub fn center(&self, class: usize) -> Vec<f64> {
        let a = 2.0 * PI * class as f64 / self.classes as f64;
        let mut c = vec![0.0; self.features];
        c[0] = self.center_radius * a.cos();
        c[1] = self.center_radius * a.sin();
        c
    }

    /// Appends `n` fresh samples of `class` to `ds`.
    pub fn draw<R: Rng + ?Sized>(&self, class: usize, n: usize, noisy: bool, ds: &mut Dataset, rng: &mut R) {
        let c = self.center(class);
        let mut x = vec![0.0; self.features];
        for _ in 0..n {
            for (xi, ci) in x.iter_mut().zip(&c) {
                let e: f64 = rng.sample(StandardNormal);
                *xi = ci + self.spread * e;
            }
            let y = if noisy && self.label_noise > 0.0 && rng.random::<f64>() < self.label_noise {
                rng.random_range(0..self.classes)
            } else {
                class
            };
            ds.push(&x, y);
        }
    }

    /// Balanced held-out set.
    pub fn test_set<R: Rng + ?Sized>(&self, rng: &mut R) -> Dataset {
        let mut ds = Dataset::new(self.features);
        for c in 0..self.classes {
            self.draw(c, self.test_per_class, false, &mut ds, rng);
        }
        ds
    }
}

/// How training samples are spread over devices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Every device holds the same number of samples of every class.
    Homogeneous,
    /// The cell is split into `rings` equal-area annuli; ring `u` (1-based)
    /// holds labels `u−1, …, u−2+window` modulo the class count. The samples
    /// of each label are shared equally among its holders; the remainder goes
    /// one sample each to the farthest holders.
    HeterogeneousRings { rings: usize, window: usize },
}

/// Outer radii of `rings` equal-area annuli, starting with `r_min`:
/// `r_u² = R_min² + u (R_max² − R_min²)/U`.
pub fn ring_boundaries(r_min: f64, r_max: f64, rings: usize) -> Vec<f64> {
    let span = r_max * r_max - r_min * r_min;
    (0..=rings)
        .map(|u| (r_min * r_min + u as f64 * span / rings as f64).sqrt())
        .collect()
}

/// Ring index (0-based) of a device at distance `d`.
pub fn ring_of(d: f64, bounds: &[f64]) -> usize {
    let rings = bounds.len() - 1;
    (1..rings).take_while(|&u| d >= bounds[u] * (1.0 - 1e-12)).count()
}

/// Labels held by ring `ring` (0-based).
pub fn ring_labels(ring: usize, window: usize, classes: usize) -> Vec<usize> {
    (0..window).map(|j| (ring + j) % classes).collect()
}

/// Per-device sample counts `counts[k][label]` for a placement.
pub fn allocation(
    spec: &DatasetSpec,
    placement: Placement,
    distances: &[f64],
    r_min: f64,
    r_max: f64,
) -> Result<Vec<Vec<usize>>> {
    spec.validate()?;
    let k = distances.len();
    if k == 0 {
        return config("no devices to place data on");
    }
    match placement {
        Placement::Homogeneous => {
            let per = spec.samples_per_class / k;
            if per == 0 {
                return config(format!(
                    "{} samples per class cannot be split over {k} devices",
                    spec.samples_per_class
                ));
            }
            Ok(vec![vec![per; spec.classes]; k])
        }
        Placement::HeterogeneousRings { rings, window } => {
            if rings == 0 || window == 0 || window > spec.classes {
                return config(format!(
                    "ring placement needs rings >= 1 and 1 <= window <= classes, got {rings}/{window}"
                ));
            }
            if rings + window - 1 < spec.classes {
                return config(format!(
                    "{rings} rings with a window of {window} leave some of the {} labels unheld",
                    spec.classes
                ));
            }
            let bounds = ring_boundaries(r_min, r_max, rings);
            let ring: Vec<usize> = distances.iter().map(|&d| ring_of(d, &bounds)).collect();
            // Holders of each label, nearest first.
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));
            let mut holders = vec![Vec::new(); spec.classes];
            for &i in &order {
                for l in ring_labels(ring[i], window, spec.classes) {
                    holders[l].push(i);
                }
            }
            if let Some(l) = holders.iter().position(Vec::is_empty) {
                return config(format!("no device holds label {l}"));
            }
            let mut counts = vec![vec![0; spec.classes]; k];
            for (l, h) in holders.iter().enumerate() {
                let base = spec.samples_per_class / h.len();
                let extra = spec.samples_per_class % h.len();
                for (j, &i) in h.iter().enumerate() {
                    counts[i][l] = base + usize::from(j >= h.len() - extra);
                }
            }
            if counts.iter().any(|r| r.iter().all(|&c| c == 0)) {
                return config("some device would receive no samples");
            }
            Ok(counts)
        }
    }
}
