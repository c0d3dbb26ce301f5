//! Recurrent CA reservoir: each time step overwrites the previous final
//! iteration with the mapped input, evolves `I` iterations and emits their
//! concatenation as the feature vector.

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::ca::{CaState, Rule};
use crate::encoder::{EncoderConfig, MappingSet};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub rule: Rule,
    pub iterations: usize,
    pub mapping_count: usize,
    pub diffuse_length: usize,
    #[serde(default = "default_input_width")]
    pub input_width: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_input_width() -> usize {
    crate::task::INPUT_WIDTH
}

impl ReservoirParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::ZeroIterations);
        }
        self.encoder_config().validate()?;
        if self.automaton_width() < 3 {
            return Err(Error::WidthTooSmall(self.automaton_width()));
        }
        Ok(())
    }

    pub fn encoder_config(&self) -> EncoderConfig {
        EncoderConfig {
            input_width: self.input_width,
            diffuse_length: self.diffuse_length,
            mapping_count: self.mapping_count,
            seed: self.seed,
        }
    }

    pub fn automaton_width(&self) -> usize {
        self.mapping_count * self.diffuse_length
    }

    /// `I * R * L_d`, the readout input size.
    pub fn feature_len(&self) -> usize {
        self.iterations * self.automaton_width()
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// The `I` evolved states of one time step, concatenated in iteration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub bits: BitVector,
    pub time_index: usize,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// A rule plus a fixed mapping set. Holds no per-sequence state.
#[derive(Debug, Clone)]
pub struct Reservoir {
    params: ReservoirParams,
    mappings: MappingSet,
}

impl Reservoir {
    /// Draws mappings from `params.seed`.
    pub fn new(params: ReservoirParams) -> Result<Self> {
        params.validate()?;
        let mappings = MappingSet::generate(&params.encoder_config())?;
        Ok(Self { params, mappings })
    }

    pub fn with_mappings(params: ReservoirParams, mappings: MappingSet) -> Result<Self> {
        params.validate()?;
        check_len("mapping input width", params.input_width, mappings.input_width())?;
        check_len("mapping diffuse length", params.diffuse_length, mappings.diffuse_length())?;
        check_len("mapping count", params.mapping_count, mappings.count())?;
        Ok(Self { params, mappings })
    }

    pub fn params(&self) -> &ReservoirParams {
        &self.params
    }

    pub fn mappings(&self) -> &MappingSet {
        &self.mappings
    }

    /// Drives the automaton over `inputs`, starting from zeros, and hands
    /// each step's `I` evolved states to `visit(t, states)`. Returns the
    /// final automaton state.
    pub fn drive<F>(&self, inputs: &[Vec<u8>], mut visit: F) -> Result<CaState>
    where
        F: FnMut(usize, &[CaState]),
    {
        let width = self.params.automaton_width();
        let iterations = self.params.iterations;
        let rule = self.params.rule;
        let nwords = width.div_ceil(64);
        let mut left = vec![0u64; nwords];
        let mut right = vec![0u64; nwords];
        let mut states = vec![CaState::zeros(width); iterations];
        let mut seed = CaState::zeros(width);

        for (t, input) in inputs.iter().enumerate() {
            // t == 0 overwrites zeros, which is the initial encoding
            self.mappings.overwrite_in_place(input, &mut seed)?;
            seed.step_into(rule, &mut states[0], &mut left, &mut right);
            for k in 1..iterations {
                let (done, rest) = states.split_at_mut(k);
                done[k - 1].step_into(rule, &mut rest[0], &mut left, &mut right);
            }
            visit(t, &states);
            seed.clone_from(&states[iterations - 1]);
        }
        Ok(seed)
    }

    /// One feature vector per time step, plus the final automaton state.
    pub fn run_sequence(&self, inputs: &[Vec<u8>]) -> Result<(Vec<FeatureVector>, CaState)> {
        let feature_len = self.params.feature_len();
        let mut features = Vec::with_capacity(inputs.len());
        let last = self.drive(inputs, |t, states| {
            let mut bits = BitVector::with_capacity(feature_len);
            for s in states {
                bits.extend_from_state(s);
            }
            features.push(FeatureVector { bits, time_index: t });
        })?;
        Ok((features, last))
    }

    /// Every evolved state in order: row `t * I + k` is iteration `k + 1` of
    /// time step `t + 1`.
    pub fn record_space_time(&self, inputs: &[Vec<u8>]) -> Result<Vec<CaState>> {
        let mut rows = Vec::with_capacity(inputs.len() * self.params.iterations);
        self.drive(inputs, |_, states| rows.extend_from_slice(states))?;
        Ok(rows)
    }
}
