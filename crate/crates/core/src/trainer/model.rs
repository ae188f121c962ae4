//! Multinomial logistic regression.
//!
//! Parameters of class `c` occupy `[c(d+1), (c+1)(d+1))`: `d` weights followed
//! by the bias.

use super::data::Dataset;

/// Softmax linear classifier over `features` inputs and `classes` outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SoftmaxModel {
    pub features: usize,
    pub classes: usize,
}

impl SoftmaxModel {
    pub fn new(features: usize, classes: usize) -> Self {
        Self { features, classes }
    }

    /// `Q = (features + 1) · classes`.
    pub fn num_params(&self) -> usize {
        (self.features + 1) * self.classes
    }

    fn logits(&self, params: &[f64], x: &[f64], out: &mut [f64]) {
        let d = self.features;
        for (c, o) in out.iter_mut().enumerate() {
            let w = &params[c * (d + 1)..(c + 1) * (d + 1)];
            *o = w[d] + w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    /// Softmax probabilities written into `out`; returns `log Σ exp(logit)`.
    fn probs(&self, params: &[f64], x: &[f64], out: &mut [f64]) -> f64 {
        self.logits(params, x, out);
        let m = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for o in out.iter_mut() {
            *o = (*o - m).exp();
            s += *o;
        }
        for o in out.iter_mut() {
            *o /= s;
        }
        m + s.ln()
    }

    /// Cross-entropy of one sample.
    pub fn sample_loss(&self, params: &[f64], x: &[f64], y: usize) -> f64 {
        let mut buf = vec![0.0; self.classes];
        self.logits(params, x, &mut buf);
        let m = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + buf.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        lse - buf[y]
    }

    /// Mean cross-entropy and its gradient over the samples `idx` of `data`.
    pub fn loss_and_grad(&self, params: &[f64], data: &Dataset, idx: &[usize]) -> (f64, Vec<f64>) {
        let d = self.features;
        let mut grad = vec![0.0; self.num_params()];
        let mut p = vec![0.0; self.classes];
        let mut loss = 0.0;
        for &i in idx {
            let x = data.sample(i);
            let y = data.y[i];
            let lse = self.probs(params, x, &mut p);
            let mut logit_y = params[y * (d + 1) + d];
            logit_y += params[y * (d + 1)..y * (d + 1) + d]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum::<f64>();
            loss += lse - logit_y;
            for (c, &pc) in p.iter().enumerate() {
                let r = pc - if c == y { 1.0 } else { 0.0 };
                let g = &mut grad[c * (d + 1)..(c + 1) * (d + 1)];
                for (gj, xj) in g[..d].iter_mut().zip(x) {
                    *gj += r * xj;
                }
                g[d] += r;
            }
        }
        let n = idx.len().max(1) as f64;
        for g in &mut grad {
            *g /= n;
        }
        (loss / n, grad)
    }

    pub fn predict(&self, params: &[f64], x: &[f64]) -> usize {
        let mut buf = vec![0.0; self.classes];
        self.logits(params, x, &mut buf);
        let mut best = 0;
        for (c, &v) in buf.iter().enumerate() {
            if v > buf[best] {
                best = c;
            }
        }
        best
    }

    /// Accuracy and mean cross-entropy on `data`.
    pub fn evaluate(&self, params: &[f64], data: &Dataset) -> (f64, f64) {
        if data.is_empty() {
            return (f64::NAN, f64::NAN);
        }
        let mut correct = 0usize;
        let mut loss = 0.0;
        for i in 0..data.len() {
            let x = data.sample(i);
            if self.predict(params, x) == data.y[i] {
                correct += 1;
            }
            loss += self.sample_loss(params, x, data.y[i]);
        }
        let n = data.len() as f64;
        (correct as f64 / n, loss / n)
    }

    /// Mean cross-entropy on all of `data`.
    pub fn mean_loss(&self, params: &[f64], data: &Dataset) -> f64 {
        if data.is_empty() {
            return f64::NAN;
        }
        (0..data.len())
            .map(|i| self.sample_loss(params, data.sample(i), data.y[i]))
            .sum::<f64>()
            / data.len() as f64
    }
}
