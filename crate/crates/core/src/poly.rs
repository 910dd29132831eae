//! Monic real polynomials in descending powers of `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `coeffs[0]` multiplies `z^K`, `coeffs[K]` is the constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    /// Wraps a coefficient vector. Panics unless it is non-empty, monic and finite.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "empty polynomial");
        assert!(coeffs[0] == 1.0, "polynomial must be monic");
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "non-finite coefficient"
        );
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Multiplies by another monic polynomial (linear convolution).
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            coeffs: convolve(&self.coeffs, &other.coeffs),
        }
    }

    /// Multiplies by `factor` `times` times.
    pub fn mul_pow(&self, factor: &Polynomial, times: usize) -> Polynomial {
        (0..times).fold(self.clone(), |acc, _| acc.mul(factor))
    }

    /// `(z - p)^k` by binomial expansion.
    pub fn repeated_root(p: f64, k: usize) -> Polynomial {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut binom = 1.0_f64;
        for j in 0..=k {
            coeffs.push(binom * (-p).powi(j as i32));
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        Polynomial { coeffs }
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
