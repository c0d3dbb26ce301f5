//! Packed bit vectors and row-major bit matrices used for feature storage.

use crate::ca::CaState;

const WORD_BITS: usize = 64;

/// Indices of set bits across `words`, bit `i % 64` of word `i / 64`.
pub fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                k * WORD_BITS + bit
            })
        })
    })
}

/// Popcount of the bitwise AND of two equal-length word slices.
pub fn and_count_words(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| u64::from((x & y).count_ones())).sum()
}

/// Growable packed bit vector; unused tail bits are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::with_capacity(bits.len());
        for &b in bits {
            v.push(b & 1 == 1);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        ((self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1) as u8
    }

    pub fn push(&mut self, bit: bool) {
        self.push_word(u64::from(bit), 1);
    }

    /// Appends the low `n` bits of `word`, least significant first.
    pub fn push_word(&mut self, word: u64, n: usize) {
        debug_assert!(n <= WORD_BITS);
        if n == 0 {
            return;
        }
        let word = if n == WORD_BITS { word } else { word & ((1u64 << n) - 1) };
        let offset = self.len % WORD_BITS;
        if offset == 0 {
            self.words.push(word);
        } else {
            *self.words.last_mut().expect("non-empty when offset > 0") |= word << offset;
            if offset + n > WORD_BITS {
                self.words.push(word >> (WORD_BITS - offset));
            }
        }
        self.len += n;
    }

    /// Appends every cell of `state`.
    pub fn extend_from_state(&mut self, state: &CaState) {
        let mut remaining = state.width();
        for &w in state.words() {
            let n = remaining.min(WORD_BITS);
            self.push_word(w, n);
            remaining -= n;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        set_bits(&self.words)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Row-major binary matrix with each row packed into whole words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD_BITS);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    /// Starts an empty matrix with a fixed column count.
    pub fn with_cols(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Appends a row; panics if the length differs from `cols`.
    pub fn push_row(&mut self, row: &BitVector) {
        assert_eq!(row.len(), self.cols, "row length must equal column count");
        self.data.extend_from_slice(row.words());
        self.rows += 1;
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        ((self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        let mut v = BitVector::with_capacity(self.cols);
        let mut remaining = self.cols;
        for &w in self.row_words(r) {
            let n = remaining.min(WORD_BITS);
            v.push_word(w, n);
            remaining -= n;
        }
        v
    }

    /// Popcount of row `r`.
    pub fn row_ones(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of columns set in both rows `a` and `b`.
    #[inline]
    pub fn and_count(&self, a: usize, b: usize) -> u64 {
        and_count_words(self.row_words(a), self.row_words(b))
    }

    /// Calls `f(i, j, count)` with the number of columns set in both rows
    /// `i` and `j`, for every `j <= i`.
    pub fn lower_and_counts(&self, mut f: impl FnMut(usize, usize, u64)) {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("popcnt") {
                // SAFETY: the popcnt feature was detected at runtime.
                unsafe { lower_and_counts_popcnt(self, &mut f) };
                return;
            }
        }
        lower_and_counts_kernel(self, &mut f);
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (k, &w) in self.row_words(r).iter().enumerate() {
                let mut rest = w;
                while rest != 0 {
                    let c = k * WORD_BITS + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    out.data[c * out.stride + r / WORD_BITS] |= 1u64 << (r % WORD_BITS);
                }
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::with_cols(cols);
        for row in rows {
            m.push_row(&BitVector::from_bits(row));
        }
        m
    }
}

#[inline(always)]
fn lower_and_counts_kernel(m: &BitMatrix, f: &mut dyn FnMut(usize, usize, u64)) {
    for i in 0..m.rows {
        let a = m.row_words(i);
        for j in 0..=i {
            let b = m.row_words(j);
            let mut count = 0u64;
            for (x, y) in a.iter().zip(b) {
                count += u64::from((x & y).count_ones());
            }
            f(i, j, count);
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn lower_and_counts_popcnt(m: &BitMatrix, f: &mut dyn FnMut(usize, usize, u64)) {
    lower_and_counts_kernel(m, f);
}
