//! Elementary cellular automata: rules, bit-packed states and synchronous
//! evolution on a ring.
//!
//! Neighborhoods are indexed as `left * 4 + center * 2 + right`, and bit `n`
//! of the rule number is the output for neighborhood `n` (Wolfram numbering).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// An elementary CA transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "u8", into = "u8")]
pub struct Rule {
    number: u8,
}

impl Rule {
    /// Builds a rule from its Wolfram number.
    pub fn new(number: i64) -> Result<Self> {
        u8::try_from(number)
            .map(Self::from)
            .map_err(|_| Error::RuleOutOfRange(number))
    }

    /// Reassembles a rule from an 8-entry table indexed by neighborhood.
    pub fn from_table(table: [u8; 8]) -> Result<Self> {
        let mut number = 0u8;
        for (n, &bit) in table.iter().enumerate() {
            match bit {
                0 => {}
                1 => number |= 1 << n,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "transition table entry {other} is not a bit"
                    )))
                }
            }
        }
        Ok(Self { number })
    }

    pub fn number(self) -> u8 {
        self.number
    }

    /// Output bits indexed by neighborhood value.
    pub fn table(self) -> [u8; 8] {
        std::array::from_fn(|n| self.output(n as u8))
    }

    /// Next state for the neighborhood `left * 4 + center * 2 + right`.
    #[inline]
    pub fn output(self, neighborhood: u8) -> u8 {
        (self.number >> (neighborhood & 7)) & 1
    }

    /// Fraction of the eight transitions that produce a 1.
    ///
    /// Matches the worked value of 0.625 for rule 110 (five live outputs).
    pub fn lambda(self) -> f64 {
        f64::from(self.number.count_ones()) / 8.0
    }

    /// The rule obtained by swapping the roles of the left and right neighbors.
    pub fn mirror(self) -> Self {
        let mut number = 0u8;
        for n in 0..8u8 {
            let swapped = ((n & 1) << 2) | (n & 2) | ((n >> 2) & 1);
            number |= self.output(swapped) << n;
        }
        Self { number }
    }

    /// The rule obtained by exchanging 0 and 1 in both inputs and output.
    pub fn complement(self) -> Self {
        let mut number = 0u8;
        for n in 0..8u8 {
            number |= (1 - self.output(!n & 7)) << n;
        }
        Self { number }
    }

    /// Mirror, complement and mirror-of-complement, in that order.
    pub fn equivalents(self) -> [Rule; 3] {
        [self.mirror(), self.complement(), self.complement().mirror()]
    }
}

impl From<u8> for Rule {
    fn from(number: u8) -> Self {
        Self { number }
    }
}

impl From<Rule> for u8 {
    fn from(rule: Rule) -> u8 {
        rule.number
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}", self.number)
    }
}

/// One row of binary cells, packed 64 to a word.
///
/// Bits past `width` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CaState {
    words: Vec<u64>,
    width: usize,
}

impl CaState {
    /// All-zero state. Panics on zero width.
    pub fn zeros(width: usize) -> Self {
        assert!(width > 0, "automaton width must be positive");
        Self {
            words: vec![0; width.div_ceil(WORD_BITS)],
            width,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("empty automaton".into()));
        }
        let mut state = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => state.words[i / WORD_BITS] |= 1 << (i % WORD_BITS),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "cell value {other} is not a bit"
                    )))
                }
            }
        }
        Ok(state)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Packed cells; cell `i` is bit `i % 64` of word `i / 64`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.width, "cell {i} out of range for width {}", self.width);
        ((self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(i < self.width, "cell {i} out of range for width {}", self.width);
        let mask = 1u64 << (i % WORD_BITS);
        if bit & 1 == 1 {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.width).map(|i| self.get(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Cell order reversed; ring adjacency is preserved.
    pub fn reversed(&self) -> Self {
        let mut out = Self::zeros(self.width);
        for i in 0..self.width {
            out.set(self.width - 1 - i, self.get(i));
        }
        out
    }

    /// Every cell flipped.
    pub fn inverted(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    fn tail_mask(&self) -> u64 {
        match self.width % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    fn clear_tail(&mut self) {
        let mask = self.tail_mask();
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    /// One synchronous update with wrap-around boundaries.
    pub fn step(&self, rule: Rule) -> Result<Self> {
        if self.width < 3 {
            return Err(Error::WidthTooSmall(self.width));
        }
        let mut out = Self::zeros(self.width);
        let mut left = vec![0u64; self.words.len()];
        let mut right = vec![0u64; self.words.len()];
        self.step_into(rule, &mut out, &mut left, &mut right);
        Ok(out)
    }

    /// Packed update into `out`, using `left`/`right` as scratch.
    /// Width must already be validated.
    pub(crate) fn step_into(&self, rule: Rule, out: &mut Self, left: &mut [u64], right: &mut [u64]) {
        debug_assert!(self.width >= 3);
        debug_assert_eq!(out.width, self.width);
        let words = &self.words;
        let nw = words.len();
        let last_cell = self.width - 1;

        // left[i] = s[i-1], right[i] = s[i+1]
        let mut carry = 0u64;
        for k in 0..nw {
            left[k] = (words[k] << 1) | carry;
            carry = words[k] >> 63;
        }
        left[0] |= u64::from(self.get(last_cell));
        for k in 0..nw {
            let next = if k + 1 < nw { words[k + 1] << 63 } else { 0 };
            right[k] = (words[k] >> 1) | next;
        }
        right[nw - 1] |= u64::from(self.get(0)) << (last_cell % WORD_BITS);

        let number = rule.number;
        for k in 0..nw {
            let (l, c, r) = (left[k], words[k], right[k]);
            let mut acc = 0u64;
            for n in 0..8 {
                if (number >> n) & 1 == 1 {
                    let lt = if n & 4 != 0 { l } else { !l };
                    let ct = if n & 2 != 0 { c } else { !c };
                    let rt = if n & 1 != 0 { r } else { !r };
                    acc |= lt & ct & rt;
                }
            }
            out.words[k] = acc;
        }
        out.clear_tail();
    }

    /// `iterations` successive states, excluding the seed state itself.
    pub fn evolve(&self, rule: Rule, iterations: usize) -> Result<Vec<Self>> {
        if iterations == 0 {
            return Err(Error::ZeroIterations);
        }
        let mut states: Vec<Self> = Vec::with_capacity(iterations);
        let mut current = self.step(rule)?;
        for _ in 1..iterations {
            let next = current.step(rule)?;
            states.push(std::mem::replace(&mut current, next));
        }
        states.push(current);
        Ok(states)
    }
}

impl fmt::Debug for CaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CaState({}:", self.width)?;
        for i in 0..self.width {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for CaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) == 1 { "#" } else { "." })?;
        }
        Ok(())
    }
}
