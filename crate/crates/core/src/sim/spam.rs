//! Readout (state-preparation-and-measurement) error models.
//!
//! `M[observed, true]` is the probability of reading bitstring `observed`
//! when `true` was prepared; distributions are indexed like statevectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DENSE_SPAM_QUBITS: usize = 6;

/// Per-qubit asymmetric flip probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Probability of reading 1 when 0 was prepared.
    pub p01: f64,
    /// Probability of reading 0 when 1 was prepared.
    pub p10: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        ReadoutError { p01: p, p10: p }
    }

    /// 2x2 confusion matrix `[[1-p01, p10], [p01, 1-p10]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }

    fn inverse(&self) -> Option<[[f64; 2]; 2]> {
        let m = self.matrix();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return None;
        }
        Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpamModel {
    /// Independent readout errors, one per qubit (qubit 0 first).
    Factorized(Vec<ReadoutError>),
    /// Full `2^n x 2^n` column-stochastic matrix.
    Dense(DMatrix<f64>),
}

impl SpamModel {
    pub fn n_qubits(&self) -> usize {
        match self {
            SpamModel::Factorized(v) => v.len(),
            SpamModel::Dense(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        match self {
            SpamModel::Factorized(v) => {
                if v.iter().any(|e| !ok(e.p01) || !ok(e.p10)) {
                    return Err(Error::Parameter("readout error probabilities must lie in [0,1]".into()));
                }
            }
            SpamModel::Dense(m) => {
                let n = m.nrows().trailing_zeros() as usize;
                if m.nrows() != m.ncols() || m.nrows() != 1 << n {
                    return Err(Error::Dimension("confusion matrix must be 2^n x 2^n".into()));
                }
                if n > MAX_DENSE_SPAM_QUBITS {
                    return Err(Error::Unsupported(format!("dense confusion matrix on {n} qubits")));
                }
                if m.iter().any(|&p| !ok(p)) {
                    return Err(Error::Parameter("confusion matrix entries must lie in [0,1]".into()));
                }
                for c in m.column_iter() {
                    if (c.sum() - 1.0).abs() > 1e-10 {
                        return Err(Error::Parameter("confusion matrix columns must sum to 1".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense form (Kronecker product of the per-qubit matrices).
    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SpamModel::Dense(m) => m.clone(),
            SpamModel::Factorized(v) => v.iter().fold(DMatrix::from_element(1, 1, 1.0), |acc, e| {
                let m = e.matrix();
                acc.kronecker(&DMatrix::from_fn(2, 2, |i, j| m[i][j]))
            }),
        }
    }
}

fn check_dist(dist: &[f64], m: &SpamModel) -> Result<()> {
    m.validate()?;
    if dist.len() != 1 << m.n_qubits() {
        return Err(Error::Dimension(format!("distribution of length {} for {} qubits", dist.len(), m.n_qubits())));
    }
    Ok(())
}

/// Applies a 2x2 matrix to qubit `q` of a distribution vector.
fn apply_local(dist: &mut [f64], n: usize, q: usize, m: &[[f64; 2]; 2]) {
    let bit = 1 << (n - 1 - q);
    for b in 0..dist.len() {
        if b & bit == 0 {
            let (p0, p1) = (dist[b], dist[b | bit]);
            dist[b] = m[0][0] * p0 + m[0][1] * p1;
            dist[b | bit] = m[1][0] * p0 + m[1][1] * p1;
        }
    }
}

/// `M * dist`.
pub fn apply_spam(dist: &[f64], m: &SpamModel) -> Result<Vec<f64>> {
    check_dist(dist, m)?;
    if (dist.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter("distribution must sum to 1".into()));
    }
    Ok(match m {
        SpamModel::Factorized(v) => {
            let mut out = dist.to_vec();
            for (q, e) in v.iter().enumerate() {
                apply_local(&mut out, v.len(), q, &e.matrix());
            }
            out
        }
        SpamModel::Dense(mat) => (mat * DVector::from_column_slice(dist)).iter().copied().collect(),
    })
}

/// `M^-1 * dist`, negative entries clipped to zero and the result
/// renormalized. With `allow_pinv` a singular `M` falls back to its
/// pseudo-inverse instead of failing.
pub fn spam_correct(dist: &[f64], m: &SpamModel, allow_pinv: bool) -> Result<Vec<f64>> {
    check_dist(dist, m)?;
    let raw: Vec<f64> = match m {
        SpamModel::Factorized(v) if v.iter().all(|e| e.inverse().is_some()) => {
            let mut out = dist.to_vec();
            for (q, e) in v.iter().enumerate() {
                apply_local(&mut out, v.len(), q, &e.inverse().expect("checked"));
            }
            out
        }
        _ => {
            let dense = m.to_dense();
            let b = DVector::from_column_slice(dist);
            match dense.clone().lu().solve(&b) {
                Some(x) if x.iter().all(|v| v.is_finite()) => x.iter().copied().collect(),
                _ if allow_pinv => {
                    let pinv = dense
                        .pseudo_inverse(1e-12)
                        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))?;
                    (pinv * b).iter().copied().collect()
                }
                _ => return Err(Error::Numerical("singular confusion matrix".into())),
            }
        }
    };
    let clipped: Vec<f64> = raw.iter().map(|p| p.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    if s <= 0.0 {
        return Err(Error::Numerical("corrected distribution vanished".into()));
    }
    Ok(clipped.iter().map(|p| p / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dist(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let v: Vec<f64> = (0..1 << n).map(|_| rng.random::<f64>()).collect();
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    }

    fn model() -> SpamModel {
        SpamModel::Factorized(vec![
            ReadoutError { p01: 0.02, p10: 0.05 },
            ReadoutError { p01: 0.01, p10: 0.04 },
            ReadoutError { p01: 0.03, p10: 0.06 },
            ReadoutError { p01: 0.015, p10: 0.035 },
        ])
    }

    #[test]
    fn identity_model_is_noop() {
        let m = SpamModel::Factorized(vec![ReadoutError::symmetric(0.0); 2]);
        let d = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(apply_spam(&d, &m).unwrap(), d.to_vec());
    }

    #[test]
    fn single_flip() {
        let m = SpamModel::Factorized(vec![ReadoutError::symmetric(0.1)]);
        let out = apply_spam(&[1.0, 0.0], &m).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn factorized_equals_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = random_dist(4, &mut rng);
        let m = model();
        let a = apply_spam(&d, &m).unwrap();
        let b = apply_spam(&d, &SpamModel::Dense(m.to_dense())).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn correction_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = random_dist(4, &mut rng);
        for m in [model(), SpamModel::Dense(model().to_dense())] {
            let back = spam_correct(&apply_spam(&d, &m).unwrap(), &m, false).unwrap();
            for (x, y) in back.iter().zip(&d) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_model_needs_pinv() {
        let m = SpamModel::Factorized(vec![ReadoutError::symmetric(0.5)]);
        assert!(spam_correct(&[0.5, 0.5], &m, false).is_err());
        let out = spam_correct(&[0.5, 0.5], &m, true).unwrap();
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_models_rejected() {
        let m = SpamModel::Factorized(vec![ReadoutError::symmetric(1.5)]);
        assert!(apply_spam(&[1.0, 0.0], &m).is_err());
        let bad = SpamModel::Dense(DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.2, 0.8]));
        assert!(apply_spam(&[1.0, 0.0], &bad).is_err());
    }
}
