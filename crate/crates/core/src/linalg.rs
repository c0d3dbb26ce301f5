//! Dense symmetric positive-definite solves for the readout.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[inline(always)]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let chunks = n / 8;
    for c in 0..chunks {
        let (x, y) = (&a[c * 8..c * 8 + 8], &b[c * 8..c * 8 + 8]);
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for i in chunks * 8..n {
        tail += a[i] * b[i];
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Four dot products against a shared right-hand side.
#[inline(always)]
fn dot4(rows: [&[f64]; 4], b: &[f64]) -> [f64; 4] {
    let n = b.len();
    let rows = rows.map(|r| &r[..n]);
    let mut acc = [[0.0f64; 4]; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let y = &b[c * 4..c * 4 + 4];
        for (acc_r, row) in acc.iter_mut().zip(&rows) {
            let x = &row[c * 4..c * 4 + 4];
            for l in 0..4 {
                acc_r[l] += x[l] * y[l];
            }
        }
    }
    let mut out = [0.0; 4];
    for (o, (acc_r, row)) in out.iter_mut().zip(acc.iter().zip(&rows)) {
        let mut tail = 0.0;
        for i in chunks * 4..n {
            tail += row[i] * b[i];
        }
        *o = (acc_r[0] + acc_r[2]) + (acc_r[1] + acc_r[3]) + tail;
    }
    out
}

/// Rows factored together so each earlier row of `L` is read once per block.
const ROW_BLOCK: usize = 32;

/// Lower Cholesky factor `L` with `A = L Lᵀ`. Only the lower triangle of
/// `a` is read; the factor overwrites it in place and the strict upper
/// triangle is zeroed.
pub fn cholesky_in_place(a: &mut SquareMatrix) -> Result<()> {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: avx2 was detected at runtime.
            return unsafe { cholesky_avx2(a) };
        }
    }
    cholesky_kernel(a)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn cholesky_avx2(a: &mut SquareMatrix) -> Result<()> {
    cholesky_kernel(a)
}

#[inline(always)]
fn cholesky_kernel(a: &mut SquareMatrix) -> Result<()> {
    let n = a.n;
    for block in (0..n).step_by(ROW_BLOCK) {
        let end = (block + ROW_BLOCK).min(n);
        let (done, rows) = a.data.split_at_mut(block * n);
        let rows = &mut rows[..(end - block) * n];

        // columns left of the block use finished rows only
        for j in 0..block {
            let lj = &done[j * n..j * n + j];
            let diag = done[j * n + j];
            let mut quads = rows.chunks_exact_mut(4 * n);
            for quad in &mut quads {
                let d = dot4(
                    [&quad[..j], &quad[n..n + j], &quad[2 * n..2 * n + j], &quad[3 * n..3 * n + j]],
                    lj,
                );
                for (r, dr) in d.iter().enumerate() {
                    let v = &mut quad[r * n + j];
                    *v = (*v - dr) / diag;
                }
            }
            for row in quads.into_remainder().chunks_exact_mut(n) {
                row[j] = (row[j] - dot(&row[..j], lj)) / diag;
            }
        }

        // triangle inside the block
        for local in 0..end - block {
            let i = block + local;
            let (before, current) = rows.split_at_mut(local * n);
            let row_i = &mut current[..n];
            for (prev, j) in before.chunks_exact(n).zip(block..i) {
                row_i[j] = (row_i[j] - dot(&row_i[..j], &prev[..j])) / prev[j];
            }
            let pivot = row_i[i] - dot(&row_i[..i], &row_i[..i]);
            if pivot.is_nan() || pivot <= 0.0 || pivot.is_infinite() {
                return Err(Error::NotPositiveDefinite { column: i, pivot });
            }
            row_i[i] = pivot.sqrt();
            row_i[i + 1..].fill(0.0);
        }
    }
    Ok(())
}

/// Solves `L Lᵀ x = b` for each column of `rhs` (row-major `n × m`), in place.
pub fn cholesky_solve(factor: &SquareMatrix, rhs: &mut [f64], m: usize) {
    let n = factor.n;
    assert_eq!(rhs.len(), n * m);
    let mut col = vec![0.0; n];
    for k in 0..m {
        for i in 0..n {
            col[i] = rhs[i * m + k];
        }
        for i in 0..n {
            let row = factor.row(i);
            col[i] = (col[i] - dot(&row[..i], &col[..i])) / row[i];
        }
        for i in (0..n).rev() {
            let s = col[i] - (i + 1..n).map(|r| factor.get(r, i) * col[r]).sum::<f64>();
            col[i] = s / factor.get(i, i);
        }
        for i in 0..n {
            rhs[i * m + k] = col[i];
        }
    }
}
