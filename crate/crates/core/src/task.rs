//! The 5-bit memory task: 32 message patterns, a distractor period and a
//! cue, with three output signals.

use crate::error::{check_len, Error, Result};

pub const INPUT_WIDTH: usize = 4;
pub const OUTPUT_WIDTH: usize = 3;
pub const MESSAGE_LEN: usize = 5;
pub const PATTERN_COUNT: usize = 1 << MESSAGE_LEN;

/// Input and target streams for one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSequence {
    pub pattern_id: usize,
    pub distractor: usize,
    pub inputs: Vec<Vec<u8>>,
    pub targets: Vec<Vec<u8>>,
}

impl TaskSequence {
    /// Builds the sequence for `pattern_id`; total length is `T_d + 10`.
    ///
    /// Bit `4 - t` (big-endian) of `pattern_id` drives input signal 1 at
    /// step `t + 1` of the message; signal 2 carries its complement.
    pub fn generate(pattern_id: usize, distractor: usize) -> Result<Self> {
        if pattern_id >= PATTERN_COUNT {
            return Err(Error::PatternOutOfRange(pattern_id));
        }
        if distractor == 0 {
            return Err(Error::InvalidParameter("distractor period must be at least 1".into()));
        }
        let len = distractor + 2 * MESSAGE_LEN;
        let cue = distractor + MESSAGE_LEN - 1;

        let message: Vec<u8> = (0..MESSAGE_LEN)
            .map(|t| ((pattern_id >> (MESSAGE_LEN - 1 - t)) & 1) as u8)
            .collect();

        let mut inputs = vec![vec![0u8; INPUT_WIDTH]; len];
        let mut targets = vec![vec![0u8; OUTPUT_WIDTH]; len];
        for (t, row) in inputs.iter_mut().enumerate() {
            if t < MESSAGE_LEN {
                row[0] = message[t];
                row[1] = 1 - message[t];
            } else if t == cue {
                row[3] = 1;
            } else {
                row[2] = 1;
            }
        }
        for (t, row) in targets.iter_mut().enumerate() {
            if t <= cue {
                row[2] = 1;
            } else {
                let k = t - cue - 1;
                row[0] = message[k];
                row[1] = 1 - message[k];
            }
        }
        Ok(Self {
            pattern_id,
            distractor,
            inputs,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Zero-based index of the cue step (`T_d + 5` counting from one).
    pub fn cue_index(&self) -> usize {
        self.distractor + MESSAGE_LEN - 1
    }
}

/// All 32 patterns in pattern-id order.
pub fn all_patterns(distractor: usize) -> Result<Vec<TaskSequence>> {
    (0..PATTERN_COUNT)
        .map(|id| TaskSequence::generate(id, distractor))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvaluationResult {
    pub total_bits: usize,
    pub correct_bits: usize,
    pub success: bool,
}

impl EvaluationResult {
    pub fn accuracy(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.correct_bits as f64 / self.total_bits as f64
        }
    }
}

/// Scores binarized predictions (`[sequence][step][bit]`) against targets.
/// A run succeeds only if every bit of every sequence matches.
pub fn evaluate(predicted: &[Vec<Vec<u8>>], tasks: &[TaskSequence]) -> Result<EvaluationResult> {
    check_len("predicted sequences", tasks.len(), predicted.len())?;
    let mut total_bits = 0;
    let mut correct_bits = 0;
    for (pred, task) in predicted.iter().zip(tasks) {
        check_len("predicted steps", task.len(), pred.len())?;
        for (p, t) in pred.iter().zip(&task.targets) {
            check_len("predicted bits", t.len(), p.len())?;
            total_bits += t.len();
            correct_bits += p.iter().zip(t).filter(|(a, b)| a == b).count();
        }
    }
    Ok(EvaluationResult {
        total_bits,
        correct_bits,
        success: correct_bits == total_bits,
    })
}
