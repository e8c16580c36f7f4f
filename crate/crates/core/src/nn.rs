//! Dense feed-forward binary classifier.
//!
//! LeakyReLU hidden layers, a single sigmoid output, He-normal weights and
//! zero biases. Training minimises the mean weighted binary cross-entropy of a
//! batch plus `(l2 / 2) * ||W||^2` (weights only) and applies exactly one Adam
//! step per [`Network::train_batch`] call.
//!
//! All parameters live in one flat vector, layer by layer, weights
//! (row-major, `outputs x inputs`) before biases. Gradients use the same
//! layout, which is what the finite-difference tests rely on.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::{Label, LabeledExample};

/// Probabilities are clamped to `[EPS_CLIP, 1 - EPS_CLIP]` before taking logs.
pub const EPS_CLIP: f64 = 1e-7;

/// Hard-label threshold on the sigmoid output.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),
    #[error("input has {got} features, network expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training batch is empty")]
    EmptyBatch,
    #[error("parameter vector has length {got}, network has {expected} parameters")]
    ParameterCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub input: usize,
    pub hidden: Vec<usize>,
    pub leaky_slope: f64,
    pub learning_rate: f64,
    pub l2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl NetworkConfig {
    /// One hidden layer of 8 units, learning rate 0.01, no L2, standard Adam constants.
    pub fn new(input: usize) -> Self {
        NetworkConfig {
            input,
            hidden: vec![8],
            leaky_slope: 0.3,
            learning_rate: 0.01,
            l2: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn with_hidden(mut self, hidden: Vec<usize>) -> Self {
        self.hidden = hidden;
        self
    }

    pub fn with_learning_rate(mut self, learning_rate: f64) -> Self {
        self.learning_rate = learning_rate;
        self
    }

    pub fn with_l2(mut self, l2: f64) -> Self {
        self.l2 = l2;
        self
    }

    /// Input, hidden and output widths in order.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 2);
        sizes.push(self.input);
        sizes.extend_from_slice(&self.hidden);
        sizes.push(1);
        sizes
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: String| Err(NnError::InvalidConfig(msg));
        if self.input == 0 || self.hidden.contains(&0) {
            return bad(format!(
                "layer sizes must be >= 1 (input {}, hidden {:?})",
                self.input, self.hidden
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning rate {} must be positive",
                self.learning_rate
            ));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad(format!("l2 {} must be non-negative", self.l2));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(beta > 0.0 && beta < 1.0) {
                return bad(format!("{name} {beta} must lie in (0, 1)"));
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad(format!("epsilon {} must be positive", self.epsilon));
        }
        if !self.leaky_slope.is_finite() {
            return bad("leaky slope must be finite".into());
        }
        Ok(())
    }
}

/// `w * (-y ln p - (1 - y) ln(1 - p))` with `p` clamped to `[EPS_CLIP, 1 - EPS_CLIP]`.
pub fn weighted_bce(y: Label, p: f64, weight: f64) -> f64 {
    let p = p.clamp(EPS_CLIP, 1.0 - EPS_CLIP);
    let loss = match y {
        Label::Positive => -p.ln(),
        Label::Negative => -(1.0 - p).ln(),
    };
    weight * loss
}

pub fn leaky_relu(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        slope * z
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Adam with bias correction, over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: u64,
}

impl Adam {
    pub fn new(len: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; len],
            v: vec![0.0; len],
            steps: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn moments(&self) -> (&[f64], &[f64]) {
        (&self.m, &self.v)
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], learning_rate: f64) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.steps += 1;
        let t = self.steps as i32;
        let correct1 = 1.0 - self.beta1.powi(t);
        let correct2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / correct1;
            let v_hat = self.v[i] / correct2;
            params[i] -= learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LayerShape {
    inputs: usize,
    outputs: usize,
    weights: usize,
    bias: usize,
}

impl LayerShape {
    fn weight(&self, out: usize, inp: usize) -> usize {
        self.weights + out * self.inputs + inp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    shapes: Vec<LayerShape>,
    params: Vec<f64>,
    optimizer: Adam,
    updates: u64,
}

impl Network {
    pub fn new<R: Rng + ?Sized>(config: NetworkConfig, rng: &mut R) -> Result<Self, NnError> {
        config.validate()?;
        let sizes = config.layer_sizes();
        let mut shapes = Vec::with_capacity(sizes.len() - 1);
        let mut offset = 0;
        for pair in sizes.windows(2) {
            let (inputs, outputs) = (pair[0], pair[1]);
            let shape = LayerShape {
                inputs,
                outputs,
                weights: offset,
                bias: offset + inputs * outputs,
            };
            offset = shape.bias + outputs;
            shapes.push(shape);
        }
        let mut params = vec![0.0; offset];
        for shape in &shapes {
            let std_dev = (2.0 / shape.inputs as f64).sqrt();
            let normal = Normal::new(0.0, std_dev).expect("finite std dev");
            for w in &mut params[shape.weights..shape.bias] {
                *w = normal.sample(rng);
            }
        }
        let optimizer = Adam::new(offset, config.beta1, config.beta2, config.epsilon);
        Ok(Network {
            config,
            shapes,
            params,
            optimizer,
            updates: 0,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// Number of `train_batch` calls so far.
    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn optimizer(&self) -> &Adam {
        &self.optimizer
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<(), NnError> {
        if params.len() != self.params.len() {
            return Err(NnError::ParameterCount {
                expected: self.params.len(),
                got: params.len(),
            });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    /// Standard deviation the initializer used for layer `index`.
    pub fn init_std_dev(&self, index: usize) -> f64 {
        (2.0 / self.shapes[index].inputs as f64).sqrt()
    }

    /// Weight and bias slices of layer `index`.
    pub fn layer(&self, index: usize) -> (&[f64], &[f64]) {
        let s = &self.shapes[index];
        (
            &self.params[s.weights..s.bias],
            &self.params[s.bias..s.bias + s.outputs],
        )
    }

    pub fn num_layers(&self) -> usize {
        self.shapes.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), NnError> {
        if x.len() != self.config.input {
            return Err(NnError::DimensionMismatch {
                expected: self.config.input,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Pre-activations and activations of every layer; `acts[0]` is the input.
    fn trace(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let last = self.shapes.len() - 1;
        let mut acts = Vec::with_capacity(self.shapes.len() + 1);
        let mut pres = Vec::with_capacity(self.shapes.len());
        acts.push(x.to_vec());
        for (l, s) in self.shapes.iter().enumerate() {
            let input = &acts[l];
            let pre: Vec<f64> = (0..s.outputs)
                .map(|o| {
                    let row = &self.params[s.weight(o, 0)..s.weight(o, 0) + s.inputs];
                    self.params[s.bias + o] + row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>()
                })
                .collect();
            let act = if l == last {
                pre.iter().map(|&z| sigmoid(z)).collect()
            } else {
                pre.iter()
                    .map(|&z| leaky_relu(z, self.config.leaky_slope))
                    .collect()
            };
            pres.push(pre);
            acts.push(act);
        }
        (pres, acts)
    }

    /// Estimate of `p(y = 1 | x)`.
    pub fn forward(&self, x: &[f64]) -> Result<f64, NnError> {
        self.check_dim(x)?;
        let (_, acts) = self.trace(x);
        Ok(acts[acts.len() - 1][0])
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label, NnError> {
        Ok(Label::from_positive(self.forward(x)? >= DECISION_THRESHOLD))
    }

    fn l2_penalty(&self) -> f64 {
        if self.config.l2 == 0.0 {
            return 0.0;
        }
        let sum_sq: f64 = self
            .shapes
            .iter()
            .flat_map(|s| &self.params[s.weights..s.bias])
            .map(|w| w * w)
            .sum();
        0.5 * self.config.l2 * sum_sq
    }

    fn check_batch(&self, batch: &[(&LabeledExample, f64)]) -> Result<(), NnError> {
        if batch.is_empty() {
            return Err(NnError::EmptyBatch);
        }
        batch.iter().try_for_each(|(ex, _)| self.check_dim(&ex.x))
    }

    /// Mean weighted cross-entropy over `batch` plus the L2 term.
    pub fn cost(&self, batch: &[(&LabeledExample, f64)]) -> Result<f64, NnError> {
        self.check_batch(batch)?;
        let total: f64 = batch
            .iter()
            .map(|(ex, w)| {
                let (_, acts) = self.trace(&ex.x);
                weighted_bce(ex.y, acts[acts.len() - 1][0], *w)
            })
            .sum();
        Ok(total / batch.len() as f64 + self.l2_penalty())
    }

    /// Cost and its gradient with respect to [`Network::parameters`].
    ///
    /// The output delta is `w * (p - y)`, the derivative through the sigmoid
    /// without the probability clamp; the clamp only bounds the reported loss.
    pub fn cost_and_gradient(
        &self,
        batch: &[(&LabeledExample, f64)],
    ) -> Result<(f64, Vec<f64>), NnError> {
        self.check_batch(batch)?;
        let n = batch.len() as f64;
        let last = self.shapes.len() - 1;
        let mut grad = vec![0.0; self.params.len()];
        let mut total = 0.0;
        for (ex, weight) in batch {
            let (pres, acts) = self.trace(&ex.x);
            let p = acts[last + 1][0];
            total += weighted_bce(ex.y, p, *weight);

            let mut delta = vec![weight * (p - ex.y.as_f64()) / n];
            for l in (0..=last).rev() {
                let s = self.shapes[l];
                let input = &acts[l];
                for o in 0..s.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    grad[s.bias + o] += d;
                    let row = s.weight(o, 0);
                    for (i, a) in input.iter().enumerate() {
                        grad[row + i] += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                let below = &pres[l - 1];
                delta = (0..s.inputs)
                    .map(|i| {
                        let back: f64 = (0..s.outputs)
                            .map(|o| self.params[s.weight(o, i)] * delta[o])
                            .sum();
                        let slope = if below[i] >= 0.0 {
                            1.0
                        } else {
                            self.config.leaky_slope
                        };
                        back * slope
                    })
                    .collect();
            }
        }
        if self.config.l2 > 0.0 {
            for s in &self.shapes {
                let range = s.weights..s.bias;
                for (g, w) in grad[range.clone()].iter_mut().zip(&self.params[range]) {
                    *g += self.config.l2 * w;
                }
            }
        }
        Ok((total / n + self.l2_penalty(), grad))
    }

    /// One Adam step on the batch cost; returns the cost before the step.
    pub fn train_batch(&mut self, batch: &[(&LabeledExample, f64)]) -> Result<f64, NnError> {
        let (cost, grad) = self.cost_and_gradient(batch)?;
        let lr = self.config.learning_rate;
        self.optimizer.step(&mut self.params, &grad, lr);
        self.updates += 1;
        Ok(cost)
    }
}
