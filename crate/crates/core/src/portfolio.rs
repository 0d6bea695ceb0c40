use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(weights) == 1` for a vector to count as a portfolio.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A long-only, fully invested weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Portfolio(Vec<f64>);

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Contract("empty portfolio".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::Contract(format!("weight {i} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Contract(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(assets: usize) -> Self {
        Self(vec![1.0 / assets as f64; assets])
    }

    /// Scales a nonnegative vector onto the simplex. Entries above `-1e-12`
    /// are clipped to zero first.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        for w in &mut weights {
            if *w < 0.0 && *w > -1e-12 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::Contract(format!(
                "cannot normalize weights {weights:?}"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Gross period return `b^T x`.
    pub fn gross_return(&self, relatives: &[f64]) -> f64 {
        dot(&self.0, relatives)
    }

    /// End-of-period holdings `b . x / b^T x` and the gross return.
    pub fn drift(&self, relatives: &[f64]) -> (Vec<f64>, f64) {
        let gross = self.gross_return(relatives);
        let held = self
            .0
            .iter()
            .zip(relatives)
            .map(|(b, x)| b * x / gross)
            .collect();
        (held, gross)
    }
}

impl AsRef<[f64]> for Portfolio {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(Portfolio::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            Portfolio::new(vec![0.6, 0.5]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            Portfolio::new(vec![1.5, -0.5]),
            Err(Error::Contract(_))
        ));
        assert!(Portfolio::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn projection_of_simplex_point_is_identity() {
        let p = project_simplex(&[0.625, 0.375]);
        assert_eq!(p, vec![0.625, 0.375]);
    }

    #[test]
    fn projection_examples() {
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn projection_is_on_simplex_and_nearest(v in prop::collection::vec(-3.0f64..3.0, 2..7)) {
            let p = project_simplex(&v);
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            // Optimality: (v - p) . (q - p) <= 0 for every vertex q.
            for k in 0..v.len() {
                let mut inner = 0.0;
                for i in 0..v.len() {
                    let q = if i == k { 1.0 } else { 0.0 };
                    inner += (v[i] - p[i]) * (q - p[i]);
                }
                prop_assert!(inner <= 1e-12);
            }
        }
    }
}
