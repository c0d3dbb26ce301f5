//! Single-layer and two-layer ReCA runs on the 5-bit memory task.
//!
//! One run draws fresh mappings, drives all 32 patterns through the
//! reservoir (each starting from zeros), fits one readout on every time step
//! of every pattern and scores predictions on those same steps. In the
//! two-layer system the binarized layer-1 predictions become the layer-2
//! input, and both readouts are fitted to the task targets.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitVector};
use crate::ca::CaState;
use crate::error::{Error, Result};
use crate::readout::{binarize, ReadoutModel, TrainingBatch};
use crate::reservoir::{Reservoir, ReservoirParams};
use crate::task::{all_patterns, evaluate, EvaluationResult, TaskSequence, OUTPUT_WIDTH};

/// Added to the run seed to obtain the layer-2 mapping seed.
pub const LAYER2_SEED_OFFSET: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub layer1: ReservoirParams,
    #[serde(default)]
    pub layer2: Option<ReservoirParams>,
    pub distractor: usize,
    #[serde(default)]
    pub run_seed: u64,
}

impl RunConfig {
    pub fn single(layer1: ReservoirParams, distractor: usize, run_seed: u64) -> Self {
        Self {
            layer1,
            layer2: None,
            distractor,
            run_seed,
        }
    }

    /// Adds a second layer sharing the first layer's rule and geometry.
    pub fn layered(layer1: ReservoirParams, distractor: usize, run_seed: u64) -> Self {
        let layer2 = ReservoirParams {
            input_width: OUTPUT_WIDTH,
            ..layer1
        };
        Self {
            layer1,
            layer2: Some(layer2),
            distractor,
            run_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.layer1.validate()?;
        if self.layer1.input_width != crate::task::INPUT_WIDTH {
            return Err(Error::InvalidParameter(format!(
                "layer 1 input width must be {}, got {}",
                crate::task::INPUT_WIDTH,
                self.layer1.input_width
            )));
        }
        if let Some(l2) = &self.layer2 {
            l2.validate()?;
            if l2.input_width != OUTPUT_WIDTH {
                return Err(Error::InvalidParameter(format!(
                    "layer 2 input width must be {OUTPUT_WIDTH}, got {}",
                    l2.input_width
                )));
            }
        }
        if self.distractor == 0 {
            return Err(Error::InvalidParameter("distractor period must be at least 1".into()));
        }
        Ok(())
    }

    /// Layer-1 parameters with the mapping seed derived from `run_seed`.
    pub fn layer1_params(&self) -> ReservoirParams {
        self.layer1.with_seed(self.run_seed)
    }

    pub fn layer2_params(&self) -> Option<ReservoirParams> {
        self.layer2
            .map(|p| p.with_seed(self.run_seed.wrapping_add(LAYER2_SEED_OFFSET)))
    }

    pub fn with_run_seed(self, run_seed: u64) -> Self {
        Self { run_seed, ..self }
    }
}

/// Wall-clock time spent in each phase of one layer.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTiming {
    pub reservoir: Duration,
    pub fit: Duration,
    pub predict: Duration,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub layer1_eval: EvaluationResult,
    pub layer2_eval: Option<EvaluationResult>,
    pub timing: Vec<PhaseTiming>,
}

impl RunResult {
    /// The deepest layer's evaluation.
    pub fn final_eval(&self) -> EvaluationResult {
        self.layer2_eval.unwrap_or(self.layer1_eval)
    }
}

/// Everything one trained layer produces.
#[derive(Debug, Clone)]
pub struct LayerOutput {
    pub reservoir: Reservoir,
    pub model: ReadoutModel,
    /// Binarized predictions, `[sequence][step][bit]`.
    pub predictions: Vec<Vec<Vec<u8>>>,
    pub eval: EvaluationResult,
    pub timing: PhaseTiming,
}

/// Trains and tests one encoder/reservoir/readout stage on `inputs`
/// (one input stream per task sequence).
pub fn run_layer(params: ReservoirParams, inputs: &[Vec<Vec<u8>>], tasks: &[TaskSequence]) -> Result<LayerOutput> {
    crate::error::check_len("input sequences", tasks.len(), inputs.len())?;
    let reservoir = Reservoir::new(params)?;
    let feature_len = params.feature_len();

    let start = Instant::now();
    let mut features = BitMatrix::with_cols(feature_len);
    let mut targets = BitMatrix::with_cols(OUTPUT_WIDTH);
    for (seq, task) in inputs.iter().zip(tasks) {
        crate::error::check_len("input steps", task.len(), seq.len())?;
        reservoir.drive(seq, |_, states| {
            let mut row = BitVector::with_capacity(feature_len);
            states.iter().for_each(|s| row.extend_from_state(s));
            features.push_row(&row);
        })?;
        for t in &task.targets {
            targets.push_row(&BitVector::from_bits(t));
        }
    }
    let reservoir_time = start.elapsed();

    let start = Instant::now();
    let batch = TrainingBatch::new(features, targets)?;
    let model = ReadoutModel::fit(&batch)?;
    let fit_time = start.elapsed();

    let start = Instant::now();
    let raw = model.predict_rows(batch.features())?;
    let mut rows = raw.into_iter();
    let mut predictions = Vec::with_capacity(tasks.len());
    for task in tasks {
        let seq = rows
            .by_ref()
            .take(task.len())
            .map(|y| y.into_iter().map(binarize).collect::<Result<Vec<u8>>>())
            .collect::<Result<Vec<_>>>()?;
        predictions.push(seq);
    }
    let eval = evaluate(&predictions, tasks)?;
    let predict_time = start.elapsed();

    Ok(LayerOutput {
        reservoir,
        model,
        predictions,
        eval,
        timing: PhaseTiming {
            reservoir: reservoir_time,
            fit: fit_time,
            predict: predict_time,
        },
    })
}

fn task_inputs(tasks: &[TaskSequence]) -> Vec<Vec<Vec<u8>>> {
    tasks.iter().map(|t| t.inputs.clone()).collect()
}

/// Layer 1 only; any configured second layer is ignored.
pub fn run_single(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let tasks = all_patterns(config.distractor)?;
    let l1 = run_layer(config.layer1_params(), &task_inputs(&tasks), &tasks)?;
    Ok(RunResult {
        layer1_eval: l1.eval,
        layer2_eval: None,
        timing: vec![l1.timing],
    })
}

/// Both layers; the layer-2 evaluation is the system result.
pub fn run_layered(config: &RunConfig) -> Result<RunResult> {
    let (l1, l2) = train_layers(config)?;
    let l2 = l2.ok_or_else(|| Error::InvalidParameter("layered run needs a layer 2 configuration".into()))?;
    Ok(RunResult {
        layer1_eval: l1.eval,
        layer2_eval: Some(l2.eval),
        timing: vec![l1.timing, l2.timing],
    })
}

/// Dispatches on whether a second layer is configured.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    if config.layer2.is_some() {
        run_layered(config)
    } else {
        run_single(config)
    }
}

/// Trains layer 1 and, when configured, layer 2 on its binarized output.
pub fn train_layers(config: &RunConfig) -> Result<(LayerOutput, Option<LayerOutput>)> {
    config.validate()?;
    let tasks = all_patterns(config.distractor)?;
    let l1 = run_layer(config.layer1_params(), &task_inputs(&tasks), &tasks)?;
    let l2 = match config.layer2_params() {
        Some(params) => Some(run_layer(params, &l1.predictions, &tasks)?),
        None => None,
    };
    Ok((l1, l2))
}

/// Space-time grids (`T * I` rows each) for one pattern, one per layer.
pub fn space_time(config: &RunConfig, pattern_id: usize) -> Result<Vec<Vec<CaState>>> {
    let (l1, l2) = train_layers(config)?;
    let task = TaskSequence::generate(pattern_id, config.distractor)?;
    let mut grids = vec![l1.reservoir.record_space_time(&task.inputs)?];
    if let Some(l2) = l2 {
        grids.push(l2.reservoir.record_space_time(&l1.predictions[pattern_id])?);
    }
    Ok(grids)
}

/// Success counts over a batch of runs with seeds `run_seed, run_seed + 1, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchResult {
    pub n_runs: usize,
    pub layer1_successes: usize,
    pub layer2_successes: Option<usize>,
    /// Per-run `(layer1, layer2)` success flags in seed order.
    pub outcomes: Vec<(bool, Option<bool>)>,
}

impl BatchResult {
    pub fn layer1_percent(&self) -> f64 {
        100.0 * self.layer1_successes as f64 / self.n_runs as f64
    }

    pub fn layer2_percent(&self) -> Option<f64> {
        self.layer2_successes
            .map(|s| 100.0 * s as f64 / self.n_runs as f64)
    }
}

/// Runs `n_runs` independent seeds on the current rayon pool.
pub fn run_batch(config: &RunConfig, n_runs: usize) -> Result<BatchResult> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("batch needs at least one run".into()));
    }
    config.validate()?;
    let outcomes = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            let r = run(&config.with_run_seed(config.run_seed.wrapping_add(i)))?;
            Ok((r.layer1_eval.success, r.layer2_eval.map(|e| e.success)))
        })
        .collect::<Result<Vec<_>>>()?;
    let layer1_successes = outcomes.iter().filter(|o| o.0).count();
    let layer2_successes = config
        .layer2
        .map(|_| outcomes.iter().filter(|o| o.1 == Some(true)).count());
    Ok(BatchResult {
        n_runs,
        layer1_successes,
        layer2_successes,
        outcomes,
    })
}
