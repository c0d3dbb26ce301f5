//! Scatters binary input vectors onto an automaton through `R` fixed random
//! injections, one per `L_d`-cell segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ca::CaState;
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub input_width: usize,
    pub diffuse_length: usize,
    pub mapping_count: usize,
    pub seed: u64,
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_width == 0 {
            return Err(Error::InvalidParameter("input width must be at least 1".into()));
        }
        if self.mapping_count == 0 {
            return Err(Error::InvalidParameter("mapping count must be at least 1".into()));
        }
        if self.diffuse_length < self.input_width {
            return Err(Error::DiffuseTooShort {
                diffuse: self.diffuse_length,
                input: self.input_width,
            });
        }
        Ok(())
    }
}

/// `R` injections of input positions into `[0, L_d)`, fixed for the lifetime
/// of a run. Map `r` owns cells `[r * L_d, (r + 1) * L_d)` of the automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSet {
    input_width: usize,
    diffuse_length: usize,
    maps: Vec<Vec<usize>>,
}

impl MappingSet {
    /// Draws `R` injections from a ChaCha8 stream seeded with `config.seed`.
    ///
    /// Each map is the prefix of a partial Fisher-Yates shuffle of
    /// `0..L_d`, so input bit `j` lands on the `j`-th drawn position.
    pub fn generate(config: &EncoderConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let maps = (0..config.mapping_count)
            .map(|_| {
                let mut pool: Vec<usize> = (0..config.diffuse_length).collect();
                for j in 0..config.input_width {
                    let k = rng.gen_range(j..config.diffuse_length);
                    pool.swap(j, k);
                }
                pool.truncate(config.input_width);
                pool
            })
            .collect();
        Ok(Self {
            input_width: config.input_width,
            diffuse_length: config.diffuse_length,
            maps,
        })
    }

    /// Builds a set from explicit maps, checking the injection invariants.
    pub fn from_maps(diffuse_length: usize, maps: Vec<Vec<usize>>) -> Result<Self> {
        let input_width = maps
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("at least one mapping is required".into()))?;
        EncoderConfig {
            input_width,
            diffuse_length,
            mapping_count: maps.len(),
            seed: 0,
        }
        .validate()?;
        for map in &maps {
            check_len("mapping length", input_width, map.len())?;
            let mut seen = vec![false; diffuse_length];
            for &p in map {
                if p >= diffuse_length || seen[p] {
                    return Err(Error::InvalidParameter(format!(
                        "mapping {map:?} is not an injection into 0..{diffuse_length}"
                    )));
                }
                seen[p] = true;
            }
        }
        Ok(Self {
            input_width,
            diffuse_length,
            maps,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn diffuse_length(&self) -> usize {
        self.diffuse_length
    }

    pub fn count(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// Width of the concatenated automaton, `R * L_d`.
    pub fn automaton_width(&self) -> usize {
        self.maps.len() * self.diffuse_length
    }

    /// Automaton cells touched by input bit `j`, one per segment.
    pub fn cells_for(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let ld = self.diffuse_length;
        self.maps.iter().enumerate().map(move |(r, map)| r * ld + map[j])
    }

    /// Maps `input` onto an all-zero automaton of width `R * L_d`.
    pub fn encode_initial(&self, input: &[u8]) -> Result<CaState> {
        self.combine_overwrite(input, &CaState::zeros(self.automaton_width()))
    }

    /// Copies `previous` and writes every input bit, zeros included, at its
    /// mapped cell in each segment. Other cells are left untouched.
    pub fn combine_overwrite(&self, input: &[u8], previous: &CaState) -> Result<CaState> {
        let mut out = previous.clone();
        self.overwrite_in_place(input, &mut out)?;
        Ok(out)
    }

    pub(crate) fn overwrite_in_place(&self, input: &[u8], state: &mut CaState) -> Result<()> {
        check_len("input vector", self.input_width, input.len())?;
        check_len("automaton width", self.automaton_width(), state.width())?;
        for (j, &bit) in input.iter().enumerate() {
            if bit > 1 {
                return Err(Error::InvalidParameter(format!("input value {bit} is not a bit")));
            }
            for cell in self.cells_for(j) {
                state.set(cell, bit);
            }
        }
        Ok(())
    }
}
