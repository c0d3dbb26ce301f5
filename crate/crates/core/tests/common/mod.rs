//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

/// Per-cell table lookup on an unpacked ring.
pub fn naive_step(cells: &[u8], rule: u8) -> Vec<u8> {
    let n = cells.len();
    (0..n)
        .map(|i| {
            let l = cells[(i + n - 1) % n];
            let c = cells[i];
            let r = cells[(i + 1) % n];
            let idx = (l << 2) | (c << 1) | r;
            (rule >> idx) & 1
        })
        .collect()
}

/// Ridge-regularized normal equations on the explicit `[X | 1]` design,
/// solved by Gaussian elimination with partial pivoting. The intercept
/// column is not penalized. Returns `(p + 1) × q` weights, intercept last.
pub fn normal_equations(x: &[Vec<u8>], y: &[Vec<u8>], ridge_scale: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let p = x[0].len();
    let q = y[0].len();
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|row| row.iter().map(|&b| f64::from(b)).chain(std::iter::once(1.0)).collect())
        .collect();

    let mut centered_sq = 0.0;
    for j in 0..p {
        let mean = design.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        centered_sq += design.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>();
    }
    let mean_sq = centered_sq / p as f64;
    let alpha = ridge_scale * if mean_sq > 0.0 { mean_sq } else { 1.0 };

    let m = p + 1;
    // augmented [AᵀA + αD | Aᵀy]
    let mut sys = vec![vec![0.0; m + q]; m];
    for r in 0..n {
        for a in 0..m {
            for b in 0..m {
                sys[a][b] += design[r][a] * design[r][b];
            }
            for k in 0..q {
                sys[a][m + k] += design[r][a] * f64::from(y[r][k]);
            }
        }
    }
    for (j, row) in sys.iter_mut().enumerate().take(p) {
        row[j] += alpha;
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&a, &b| sys[a][col].abs().total_cmp(&sys[b][col].abs()))
            .unwrap();
        sys.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = sys[r][col] / sys[col][col];
                if f != 0.0 {
                    let pivot_row = sys[col].clone();
                    for (x, p) in sys[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    (0..m)
        .map(|j| (0..q).map(|k| sys[j][m + k] / sys[j][j]).collect())
        .collect()
}

pub fn affine_predict(weights: &[Vec<f64>], row: &[u8]) -> Vec<f64> {
    let p = row.len();
    let q = weights[0].len();
    (0..q)
        .map(|k| weights[p][k] + row.iter().enumerate().map(|(j, &b)| f64::from(b) * weights[j][k]).sum::<f64>())
        .collect()
}

/// xorshift64* stream for reproducible test data.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| (self.next_u64() >> 63) as u8).collect()
    }
}
