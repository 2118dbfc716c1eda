//! End-to-end classifier: encoded forward pass to Pauli-Z logits, softmax
//! cross-entropy, Adam updates, and the training/evaluation loops for both
//! the mixture model and the routing-free baseline.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{
    build_baseline, build_encoding, build_moe_trainable, OperatorSet, RegisterLayout,
};
use crate::data::Dataset;
use crate::grad::{loss_gradient, param_rules, ShiftRule};
use crate::qsim::{Circuit, StateVector, MAX_QUBITS};
use crate::{Error, Result};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPSILON: f64 = 1e-8;

/// Half-width of the uniform parameter initialization. Small angles keep
/// the initial circuit near identity.
const INIT_RANGE: f64 = std::f64::consts::PI / 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    QMoE,
    Baseline,
}

impl Architecture {
    pub fn name(&self) -> &'static str {
        match self {
            Architecture::QMoE => "qmoe",
            Architecture::Baseline => "baseline",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qmoe" => Ok(Architecture::QMoE),
            "baseline" => Ok(Architecture::Baseline),
            other => Err(Error::config(format!("unknown architecture '{other}'"))),
        }
    }
}

/// Full experiment description: architecture, register sizes, operator set,
/// depths, and optimizer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub architecture: Architecture,
    pub n_data_qubits: usize,
    pub n_experts: usize,
    pub op_set: OperatorSet,
    pub expert_depth: usize,
    pub routing_depth: usize,
    pub baseline_depth: usize,
    pub n_classes: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            architecture: Architecture::QMoE,
            n_data_qubits: 8,
            n_experts: 4,
            op_set: OperatorSet::RxRy,
            expert_depth: 2,
            routing_depth: 1,
            baseline_depth: 4,
            n_classes: 2,
            learning_rate: 2e-3,
            batch_size: 32,
            epochs: 5,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::for_experts(self.n_data_qubits, self.n_experts)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_classes < 2 {
            return Err(Error::config("need at least 2 classes"));
        }
        if self.n_classes > self.n_data_qubits {
            return Err(Error::config(format!(
                "{} classes need {} readout qubits but only {} data qubits exist",
                self.n_classes, self.n_classes, self.n_data_qubits
            )));
        }
        if self.n_experts == 0 {
            return Err(Error::config("need at least one expert"));
        }
        if self.expert_depth == 0 || self.routing_depth == 0 || self.baseline_depth == 0 {
            return Err(Error::config("circuit depths must be at least 1"));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::config(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        if self.layout().total() > MAX_QUBITS {
            return Err(Error::config(format!(
                "register of {} qubits exceeds the {MAX_QUBITS}-qubit cap",
                self.layout().total()
            )));
        }
        Ok(())
    }

    /// Key/value form used by config files and checkpoint echoes. Floats are
    /// written with 17 significant digits so parse-then-serialize is exact.
    pub fn to_kv(&self) -> Vec<(&'static str, String)> {
        vec![
            ("architecture", self.architecture.name().to_string()),
            ("n_data_qubits", self.n_data_qubits.to_string()),
            ("n_experts", self.n_experts.to_string()),
            ("operators", self.op_set.name().to_string()),
            ("expert_depth", self.expert_depth.to_string()),
            ("routing_depth", self.routing_depth.to_string()),
            ("baseline_depth", self.baseline_depth.to_string()),
            ("n_classes", self.n_classes.to_string()),
            ("learning_rate", format!("{:.16e}", self.learning_rate)),
            ("batch_size", self.batch_size.to_string()),
            ("epochs", self.epochs.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    /// Apply one key/value pair onto this config.
    pub fn set_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::config(format!("invalid value '{value}' for {key}")))
        }
        match key {
            "architecture" => self.architecture = Architecture::parse(value)?,
            "n_data_qubits" => self.n_data_qubits = num(key, value)?,
            "n_experts" => self.n_experts = num(key, value)?,
            "operators" => self.op_set = OperatorSet::parse(value)?,
            "expert_depth" => self.expert_depth = num(key, value)?,
            "routing_depth" => self.routing_depth = num(key, value)?,
            "baseline_depth" => self.baseline_depth = num(key, value)?,
            "n_classes" => self.n_classes = num(key, value)?,
            "learning_rate" => self.learning_rate = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }
}

/// Trainable parameter vector with Adam moment state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    pub adam_m: Vec<f64>,
    pub adam_v: Vec<f64>,
    pub step_count: u64,
}

impl ModelParams {
    pub fn zeros(n: usize) -> Self {
        ModelParams {
            theta: vec![0.0; n],
            adam_m: vec![0.0; n],
            adam_v: vec![0.0; n],
            step_count: 0,
        }
    }

    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.adam_m.len() != self.theta.len() || self.adam_v.len() != self.theta.len() {
            return Err(Error::structure(
                "parameter and moment arrays have mismatched lengths",
            ));
        }
        for (i, v) in self
            .theta
            .iter()
            .chain(&self.adam_m)
            .chain(&self.adam_v)
            .enumerate()
        {
            if !v.is_finite() {
                return Err(Error::numeric(format!(
                    "non-finite value {v} in parameter state (flat index {i})"
                )));
            }
        }
        Ok(())
    }
}

/// A config compiled into its trainable circuit and per-parameter shift
/// rules. The data-dependent encoding circuit is built per sample.
#[derive(Debug, Clone)]
pub struct Model {
    config: RunConfig,
    layout: RegisterLayout,
    trainable: Circuit,
    rules: Vec<ShiftRule>,
}

impl Model {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let layout = config.layout();
        let trainable = match config.architecture {
            Architecture::QMoE => build_moe_trainable(
                &layout,
                config.op_set,
                config.n_experts,
                config.expert_depth,
                config.routing_depth,
            )?,
            Architecture::Baseline => {
                build_baseline(&layout, config.op_set, config.baseline_depth)?
            }
        };
        let rules = param_rules(&trainable)?;
        Ok(Model {
            config,
            layout,
            trainable,
            rules,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn n_params(&self) -> usize {
        self.trainable.n_params()
    }

    pub fn rules(&self) -> &[ShiftRule] {
        &self.rules
    }

    pub fn trainable_circuit(&self) -> &Circuit {
        &self.trainable
    }

    /// Seeded small-angle initialization, uniform in (−π/50, π/50).
    pub fn init_params(&self, rng: &mut ChaCha8Rng) -> ModelParams {
        let mut params = ModelParams::zeros(self.n_params());
        for t in params.theta.iter_mut() {
            *t = rng.gen_range(-INIT_RANGE..INIT_RANGE);
        }
        params
    }

    /// Run the data-encoding circuit on |0…0⟩. The result can be reused for
    /// every shifted evaluation of the same sample.
    pub fn encode(&self, features: &[f64]) -> Result<StateVector> {
        build_encoding(features, &self.layout)?.run_on_zero(&[])
    }

    /// Trainable stage plus readout from an already-encoded state.
    pub fn logits_from_encoded(&self, encoded: &StateVector, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_params() {
            return Err(Error::structure(format!(
                "got {} parameters, model has {}",
                theta.len(),
                self.n_params()
            )));
        }
        let mut state = encoded.clone();
        self.trainable.run(theta, &mut state)?;
        (0..self.config.n_classes)
            .map(|j| state.expectation_z(j))
            .collect()
    }

    /// Full forward pass: encode, transform, read one ⟨Z⟩ per class.
    pub fn forward(&self, theta: &[f64], features: &[f64]) -> Result<Vec<f64>> {
        let encoded = self.encode(features)?;
        self.logits_from_encoded(&encoded, theta)
    }

    /// Loss and shift-rule gradient for one sample. The encoding is run
    /// once and shared across all shifted evaluations.
    pub fn sample_loss_gradient(
        &self,
        theta: &[f64],
        features: &[f64],
        label: usize,
    ) -> Result<(f64, Vec<f64>)> {
        let encoded = self.encode(features)?;
        loss_gradient(
            |t| self.logits_from_encoded(&encoded, t),
            |logits| softmax_cross_entropy(logits, label),
            theta,
            &self.rules,
            false,
        )
    }
}

/// Numerically stable softmax cross-entropy. Returns the loss and the
/// analytic dloss/dlogits = softmax(logits) − onehot(label).
pub fn softmax_cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    assert!(label < logits.len(), "label {label} out of range");
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let loss = sum.ln() - (logits[label] - max);
    let mut grad: Vec<f64> = exps.iter().map(|&e| e / sum).collect();
    grad[label] -= 1.0;
    (loss, grad)
}

/// One Adam update with bias correction (β1 = 0.9, β2 = 0.999, ε = 1e-8).
pub fn adam_step(params: &mut ModelParams, grad: &[f64], learning_rate: f64) -> Result<()> {
    if grad.len() != params.theta.len() {
        return Err(Error::structure(format!(
            "gradient length {} does not match parameter count {}",
            grad.len(),
            params.theta.len()
        )));
    }
    for (i, g) in grad.iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite gradient component {g} at parameter {i}"
            )));
        }
    }
    params.step_count += 1;
    let t = params.step_count as i32;
    let m_corr = 1.0 - ADAM_BETA1.powi(t);
    let v_corr = 1.0 - ADAM_BETA2.powi(t);
    for i in 0..params.theta.len() {
        let g = grad[i];
        params.adam_m[i] = ADAM_BETA1 * params.adam_m[i] + (1.0 - ADAM_BETA1) * g;
        params.adam_v[i] = ADAM_BETA2 * params.adam_v[i] + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = params.adam_m[i] / m_corr;
        let v_hat = params.adam_v[i] / v_corr;
        params.theta[i] -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
    Ok(())
}

/// Execution options for training and evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    /// Evaluate batch members on the rayon pool. Reduction order is fixed,
    /// so parallel and sequential runs produce identical results; strict
    /// mode simply forces the sequential path.
    pub parallel: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { parallel: true }
    }
}

/// Metrics for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub seconds: f64,
}

/// Full training outcome: per-epoch metrics plus the end-state evaluation
/// (which is the untrained model's when `epochs` is 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub epochs: Vec<EpochRecord>,
    pub final_train_acc: f64,
    pub final_test_acc: f64,
}

fn check_dataset(dataset: &Dataset, config: &RunConfig, name: &str) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::data(format!("{name} dataset is empty")));
    }
    if dataset.n_classes() != config.n_classes {
        return Err(Error::config(format!(
            "{name} dataset has {} classes, config expects {}",
            dataset.n_classes(),
            config.n_classes
        )));
    }
    Ok(())
}

/// Mean loss and mean gradient over a batch. Per-sample work may run on the
/// rayon pool; results are reduced in batch order either way.
fn batch_loss_gradient(
    model: &Model,
    theta: &[f64],
    batch: &[&crate::data::Sample],
    parallel: bool,
) -> Result<(f64, Vec<f64>)> {
    let per_sample = |s: &&crate::data::Sample| -> Result<(f64, Vec<f64>)> {
        model.sample_loss_gradient(theta, s.features(), s.label())
    };
    let results: Vec<(f64, Vec<f64>)> = if parallel {
        batch.par_iter().map(per_sample).collect::<Result<_>>()?
    } else {
        batch.iter().map(per_sample).collect::<Result<_>>()?
    };

    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; theta.len()];
    for (sample_loss, sample_grad) in &results {
        loss += sample_loss;
        for (g, sg) in grad.iter_mut().zip(sample_grad) {
            *g += sg;
        }
    }
    for g in grad.iter_mut() {
        *g *= scale;
    }
    Ok((loss * scale, grad))
}

/// Fraction of samples whose argmax logit matches the label. Ties break
/// toward the lowest class index.
pub fn evaluate(model: &Model, theta: &[f64], dataset: &Dataset, parallel: bool) -> Result<f64> {
    if dataset.is_empty() {
        return Ok(0.0);
    }
    let one = |s: &crate::data::Sample| -> Result<usize> {
        let logits = model.forward(theta, s.features())?;
        let mut best = 0;
        for (j, &l) in logits.iter().enumerate() {
            if l > logits[best] {
                best = j;
            }
        }
        Ok(usize::from(best == s.label()))
    };
    let correct: usize = if parallel {
        dataset
            .samples()
            .par_iter()
            .map(one)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum()
    } else {
        dataset
            .samples()
            .iter()
            .map(one)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum()
    };
    Ok(correct as f64 / dataset.len() as f64)
}

/// Train a model from a seeded initialization: shuffle each epoch, take the
/// batch-mean shift-rule gradient, apply Adam, evaluate after every epoch.
pub fn train(
    config: &RunConfig,
    train_set: &Dataset,
    test_set: &Dataset,
    options: TrainOptions,
) -> Result<(ModelParams, TrainRecord)> {
    check_dataset(train_set, config, "train")?;
    check_dataset(test_set, config, "test")?;
    let model = Model::new(config.clone())?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = model.init_params(&mut rng);
    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    let mut records = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        indices.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (batch_idx, batch_ids) in indices.chunks(config.batch_size).enumerate() {
            let batch: Vec<&crate::data::Sample> =
                batch_ids.iter().map(|&i| &train_set.samples()[i]).collect();
            let (batch_loss, grad) =
                batch_loss_gradient(&model, &params.theta, &batch, options.parallel).map_err(
                    |e| {
                        Error::numeric(format!(
                            "aborting at epoch {epoch}, batch {batch_idx}: {e}"
                        ))
                    },
                )?;
            if !batch_loss.is_finite() {
                return Err(Error::numeric(format!(
                    "aborting at epoch {epoch}, batch {batch_idx}: loss is {batch_loss}"
                )));
            }
            adam_step(&mut params, &grad, config.learning_rate)?;
            loss_sum += batch_loss * batch.len() as f64;
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let train_acc = evaluate(&model, &params.theta, train_set, options.parallel)?;
        let test_acc = evaluate(&model, &params.theta, test_set, options.parallel)?;
        records.push(EpochRecord {
            epoch,
            train_loss,
            train_acc,
            test_acc,
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    let (final_train_acc, final_test_acc) = match records.last() {
        Some(r) => (r.train_acc, r.test_acc),
        None => (
            evaluate(&model, &params.theta, train_set, options.parallel)?,
            evaluate(&model, &params.theta, test_set, options.parallel)?,
        ),
    };
    Ok((
        params,
        TrainRecord {
            epochs: records,
            final_train_acc,
            final_test_acc,
        },
    ))
}
