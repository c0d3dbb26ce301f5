//! Linear least-squares readout with intercept, fitted on binary features.
//!
//! The fit solves the centered normal equations
//! `(Xcᵀ Xc + αI) W = Xcᵀ Yc` and recovers the intercept from the column
//! means, which is the same as leaving the intercept unpenalized in the
//! augmented system. `α = 1e-8 · mean(diag(Xcᵀ Xc))` keeps rank-deficient
//! designs (constant or duplicated CA columns) solvable.

use crate::bits::{and_count_words, set_bits, BitMatrix, BitVector};
use crate::error::{check_len, Error, Result};
use crate::linalg::{cholesky_in_place, cholesky_solve, SquareMatrix};

/// Relative ridge added to the Gram diagonal.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Paired binary features and targets, one row per sample.
#[derive(Debug, Clone)]
pub struct TrainingBatch {
    features: BitMatrix,
    targets: BitMatrix,
}

impl TrainingBatch {
    pub fn new(features: BitMatrix, targets: BitMatrix) -> Result<Self> {
        check_len("target rows", features.rows(), targets.rows())?;
        if features.rows() == 0 {
            return Err(Error::InvalidParameter("training batch has no rows".into()));
        }
        if targets.cols() == 0 {
            return Err(Error::InvalidParameter("training batch has no targets".into()));
        }
        Ok(Self { features, targets })
    }

    pub fn features(&self) -> &BitMatrix {
        &self.features
    }

    pub fn targets(&self) -> &BitMatrix {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }
}

/// Affine map from `feature_len` bits to `output_width` reals.
///
/// `weights` is row-major `(feature_len + 1) × output_width`; the last row
/// holds the intercepts.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    weights: Vec<f64>,
    feature_len: usize,
    output_width: usize,
}

impl ReadoutModel {
    pub fn from_weights(feature_len: usize, output_width: usize, weights: Vec<f64>) -> Result<Self> {
        check_len("weight count", (feature_len + 1) * output_width, weights.len())?;
        if let Some(&bad) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self {
            weights,
            feature_len,
            output_width,
        })
    }

    pub fn zeros(feature_len: usize, output_width: usize) -> Self {
        Self {
            weights: vec![0.0; (feature_len + 1) * output_width],
            feature_len,
            output_width,
        }
    }

    pub fn feature_len(&self) -> usize {
        self.feature_len
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of feature `j` on output `k`.
    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.weights[j * self.output_width + k]
    }

    pub fn intercept(&self, k: usize) -> f64 {
        self.weights[self.feature_len * self.output_width + k]
    }

    /// Trainable parameter count, intercepts included.
    pub fn parameter_count(&self) -> usize {
        self.weights.len()
    }

    /// Least-squares fit with intercept.
    pub fn fit(batch: &TrainingBatch) -> Result<Self> {
        let n = batch.len();
        let p = batch.features.cols();
        let q = batch.targets.cols();
        let inv_n = 1.0 / n as f64;

        let xcols = batch.features.transpose();
        let ycols = batch.targets.transpose();
        let xsum: Vec<f64> = (0..p).map(|j| xcols.row_ones(j) as f64).collect();
        let ysum: Vec<f64> = (0..q).map(|k| ycols.row_ones(k) as f64).collect();

        let mut gram = SquareMatrix::zeros(p);
        xcols.lower_and_counts(|i, j, count| {
            gram.set(i, j, count as f64 - xsum[i] * xsum[j] * inv_n);
        });
        let trace: f64 = (0..p).map(|i| gram.get(i, i)).sum();
        let mean_diag = if p > 0 { trace / p as f64 } else { 0.0 };
        let ridge = RIDGE_SCALE * if mean_diag > 0.0 { mean_diag } else { 1.0 };
        for i in 0..p {
            gram.set(i, i, gram.get(i, i) + ridge);
        }

        let mut rhs = vec![0.0; p * q];
        for j in 0..p {
            for k in 0..q {
                let cross = and_count_words(xcols.row_words(j), ycols.row_words(k)) as f64;
                rhs[j * q + k] = cross - xsum[j] * ysum[k] * inv_n;
            }
        }

        cholesky_in_place(&mut gram)?;
        cholesky_solve(&gram, &mut rhs, q);

        let mut weights = rhs;
        for k in 0..q {
            let shift: f64 = (0..p).map(|j| weights[j * q + k] * xsum[j]).sum();
            weights.push((ysum[k] - shift) * inv_n);
        }
        Self::from_weights(p, q, weights)
    }

    /// Real-valued outputs for one feature vector.
    pub fn predict(&self, features: &BitVector) -> Result<Vec<f64>> {
        check_len("feature vector", self.feature_len, features.len())?;
        Ok(self.predict_ones(features.ones()))
    }

    /// Outputs for every row of `features`.
    pub fn predict_rows(&self, features: &BitMatrix) -> Result<Vec<Vec<f64>>> {
        check_len("feature columns", self.feature_len, features.cols())?;
        Ok((0..features.rows())
            .map(|r| self.predict_ones(set_bits(features.row_words(r))))
            .collect())
    }

    fn predict_ones(&self, ones: impl Iterator<Item = usize>) -> Vec<f64> {
        let q = self.output_width;
        let mut out = self.weights[self.feature_len * q..].to_vec();
        for j in ones {
            for (o, w) in out.iter_mut().zip(&self.weights[j * q..(j + 1) * q]) {
                *o += w;
            }
        }
        out
    }
}

/// Thresholds a prediction at 0.5; exactly 0.5 maps to 1.
pub fn binarize(value: f64) -> Result<u8> {
    if !value.is_finite() {
        return Err(Error::NonFinite(value));
    }
    Ok(u8::from(value >= 0.5))
}
