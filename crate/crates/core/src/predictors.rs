//! Next-period return predictor and the ellipsoid shape factor.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::market_data::{History, RelativesMatrix};

/// Predicted price relatives for the next period.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor(Vec<f64>);

impl Predictor {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("predictor must be positive: {values:?}")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Moving-average-reversion predictor: the mean of the last `window` prices
/// divided by the latest price, computed from relatives as
/// `(1 + 1/x_t + 1/(x_t x_{t-1}) + ...) / window`.
///
/// A window of `W` prices spans `W - 1` relatives, so `history` must hold at
/// least `window - 1` rows.
pub fn mar_predictor(history: &History<'_>, window: usize) -> Result<Predictor> {
    if window == 0 {
        return Err(Error::Config("predictor window must be at least 1".into()));
    }
    let needed = window - 1;
    if history.len() < needed {
        return Err(Error::History {
            needed,
            available: history.len(),
        });
    }
    let m = history.assets();
    let mut sum = vec![1.0; m];
    let mut discount = vec![1.0; m];
    for row in history.tail(needed).rows().rev() {
        for ((d, s), x) in discount.iter_mut().zip(sum.iter_mut()).zip(row) {
            *d /= x;
            *s += *d;
        }
    }
    let w = window as f64;
    Predictor::new(sum.into_iter().map(|s| s / w).collect())
}

/// Predictor after observing periods `1..=t` (one-based).
pub fn mar_predictor_at(relatives: &RelativesMatrix, t: usize, window: usize) -> Result<Predictor> {
    if t > relatives.periods() {
        return Err(Error::Index(format!(
            "period {t} beyond {} periods",
            relatives.periods()
        )));
    }
    mar_predictor(&relatives.history(t), window)
}

/// Why no shape factor could be produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsufficientData {
    TooFewRows { needed: usize, available: usize },
    NotPositiveDefinite,
}

/// Upper-triangular Cholesky factor `U` of the covariance, `Sigma = U^T U`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFactor {
    upper: DMatrix<f64>,
    sigma: f64,
    regularized: bool,
}

impl ShapeFactor {
    /// Factors `cov`, adding `eps * I` once if the plain factorization fails.
    pub fn from_covariance(cov: &DMatrix<f64>) -> std::result::Result<Self, InsufficientData> {
        let m = cov.nrows();
        let scale = (cov.trace() / m as f64).max(1.0);
        if let Some(f) = Self::try_factor(cov, scale, false) {
            return Ok(f);
        }
        let eps = 1e-8 * scale;
        let repaired = cov + DMatrix::identity(m, m) * eps;
        Self::try_factor(&repaired, scale, true).ok_or(InsufficientData::NotPositiveDefinite)
    }

    fn try_factor(cov: &DMatrix<f64>, scale: f64, regularized: bool) -> Option<Self> {
        let chol = nalgebra::linalg::Cholesky::new(cov.clone())?;
        let upper = chol.l().transpose();
        // Pivots at round-off level mean the matrix is numerically singular.
        let floor = 1e-15 * scale;
        if upper.diagonal().iter().any(|d| !(d * d > floor)) {
            return None;
        }
        let sigma = upper.norm();
        Some(Self {
            upper,
            sigma,
            regularized,
        })
    }

    /// Wraps an upper-triangular matrix with positive diagonal.
    pub fn from_upper(upper: DMatrix<f64>) -> Result<Self> {
        let m = upper.nrows();
        if upper.ncols() != m {
            return Err(Error::Config("shape factor must be square".into()));
        }
        for i in 0..m {
            if !(upper[(i, i)] > 0.0) {
                return Err(Error::Config("shape factor needs a positive diagonal".into()));
            }
            for j in 0..i {
                if upper[(i, j)] != 0.0 {
                    return Err(Error::Config("shape factor must be upper triangular".into()));
                }
            }
        }
        let sigma = upper.norm();
        Ok(Self {
            upper,
            sigma,
            regularized: false,
        })
    }

    pub fn upper(&self) -> &DMatrix<f64> {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.upper.nrows()
    }

    /// Frobenius norm of `U`, equal to the root of the summed asset variances.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// True when the covariance needed the `eps * I` repair.
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.upper.transpose() * &self.upper
    }

    /// Portfolio volatility `||U b||_2`.
    pub fn volatility(&self, b: &[f64]) -> f64 {
        (&self.upper * DVector::from_column_slice(b)).norm()
    }
}

/// Unbiased sample covariance of the given rows.
pub fn sample_covariance(rows: &History<'_>) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.assets();
    let mut mean = vec![0.0; m];
    for row in rows.rows() {
        for (acc, x) in mean.iter_mut().zip(row) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n as f64);
    let mut cov = DMatrix::zeros(m, m);
    for row in rows.rows() {
        for i in 0..m {
            let di = row[i] - mean[i];
            for j in i..m {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for i in 0..m {
        for j in i..m {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Shape factor from the most recent `m + 1` observed rows.
pub fn shape_factor(history: &History<'_>) -> std::result::Result<ShapeFactor, InsufficientData> {
    let needed = history.assets() + 1;
    if history.len() < needed {
        return Err(InsufficientData::TooFewRows {
            needed,
            available: history.len(),
        });
    }
    ShapeFactor::from_covariance(&sample_covariance(&history.tail(needed)))
}

/// Shape factor after observing periods `1..=t` (one-based).
pub fn shape_factor_at(
    relatives: &RelativesMatrix,
    t: usize,
) -> std::result::Result<ShapeFactor, InsufficientData> {
    let t = t.min(relatives.periods());
    shape_factor(&relatives.history(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_one_gives_ones() {
        let m = RelativesMatrix::synthetic(4, 3, 9).unwrap();
        let p = mar_predictor_at(&m, 4, 1).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 1.0]);
        let p = mar_predictor_at(&m, 0, 1).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_prices_give_ones() {
        let m = RelativesMatrix::from_rows(vec![vec![1.0, 1.0]; 6]).unwrap();
        for w in 1..=6 {
            let p = mar_predictor_at(&m, 6, w).unwrap();
            assert_eq!(p.values(), &[1.0, 1.0]);
        }
    }

    #[test]
    fn single_asset_price_path() {
        // Prices (1, 2, 4): the mean of the window over the last price is 7/12.
        let rows = [2.0, 2.0];
        let h = History::from_slice(&rows, 1);
        let p = mar_predictor(&h, 3).unwrap();
        assert!((p.values()[0] - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn predictor_needs_history() {
        let m = RelativesMatrix::synthetic(3, 2, 0).unwrap();
        assert!(matches!(
            mar_predictor_at(&m, 2, 5),
            Err(Error::History {
                needed: 4,
                available: 2
            })
        ));
    }

    #[test]
    fn shape_factor_needs_m_plus_one_rows() {
        let m = RelativesMatrix::synthetic(10, 2, 0).unwrap();
        assert_eq!(
            shape_factor_at(&m, 2),
            Err(InsufficientData::TooFewRows {
                needed: 3,
                available: 2
            })
        );
        assert!(shape_factor_at(&m, 3).is_ok());
    }

    #[test]
    fn identical_rows_take_the_repair_path() {
        let m = RelativesMatrix::from_rows(vec![vec![1.01, 0.99]; 3]).unwrap();
        let f = shape_factor_at(&m, 3).unwrap();
        assert!(f.regularized());
        let expected = 1e-8f64.sqrt();
        let u = f.upper();
        assert!((u[(0, 0)] - expected).abs() < 1e-15);
        assert!((u[(1, 1)] - expected).abs() < 1e-15);
        assert_eq!(u[(0, 1)], 0.0);
    }

    #[test]
    fn diagonal_covariance_sigma() {
        // Deviations (0.2, -0.2, 0) and (c, c, -2c) with 6c^2 = 0.18 give an
        // unbiased covariance of diag(0.04, 0.09).
        let c = 0.03f64.sqrt();
        let rows = vec![vec![1.2, 1.0 + c], vec![0.8, 1.0 + c], vec![1.0, 1.0 - 2.0 * c]];
        let m = RelativesMatrix::from_rows(rows).unwrap();
        let cov = sample_covariance(&m.history(3));
        let target = DMatrix::from_row_slice(2, 2, &[0.04, 0.0, 0.0, 0.09]);
        assert!((&cov - &target).amax() < 1e-14, "{cov}");
        let f = ShapeFactor::from_covariance(&cov).unwrap();
        assert!((f.sigma() - 0.13f64.sqrt()).abs() < 1e-12);
        let frob: f64 = f.upper().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((f.sigma() - frob).abs() < 1e-15);
        assert!((f.sigma() - 0.360_56).abs() < 1e-5);
    }

    #[test]
    fn covariance_is_symmetric_and_reconstructs() {
        let m = RelativesMatrix::synthetic(20, 4, 5).unwrap();
        let cov = sample_covariance(&m.history(20).tail(5));
        assert_eq!(cov, cov.transpose());
        let f = ShapeFactor::from_covariance(&cov).unwrap();
        let err = (f.covariance() - &cov).amax();
        assert!(err <= 1e-10 * (1.0 + cov.amax()));
    }
}
