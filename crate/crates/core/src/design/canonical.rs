//! Companion-form bookkeeping.
//!
//! The canonical forms store a monic polynomial `z^K + a1 z^(K-1) + ... + aK`
//! in the last column of a companion matrix as `g(k) = -a(K - k)`. Both
//! directions of that conversion live here and nowhere else.

use crate::linalg::Matrix;
use crate::poly::Polynomial;

/// Companion last column from polynomial coefficients: `g(k) = -a(K - k)`.
pub fn poly_to_column(poly: &Polynomial) -> Vec<f64> {
    let a = poly.coeffs();
    let k = poly.degree();
    (0..k).map(|i| -a[k - i]).collect()
}

/// Inverse of [`poly_to_column`]: `a(0) = 1`, `a(k) = -g(K - k)`.
pub fn column_to_poly(g: &[f64]) -> Polynomial {
    let k = g.len();
    let mut a = Vec::with_capacity(k + 1);
    a.push(1.0);
    a.extend((1..=k).map(|i| -g[k - i]));
    Polynomial::from_coeffs(a)
}

/// Companion matrix with ones on the subdiagonal and `last` as its final column.
pub fn companion(last: &[f64]) -> Matrix {
    let k = last.len();
    Matrix::from_fn(k, k, |i, j| {
        if j == k - 1 {
            last[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Canonical output row `[0 ... 0 1]`.
pub fn last_unit_row(k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k];
    c[k - 1] = 1.0;
    c
}

/// Observability matrix of `(c, g)`: row `k` is `c * g^k`.
pub fn observability_matrix(c: &[f64], g: &Matrix) -> Matrix {
    let k = c.len();
    assert_eq!(g.rows(), k, "observability_matrix dimension mismatch");
    let mut rows = Vec::with_capacity(k);
    let mut r = c.to_vec();
    for _ in 0..k {
        let next = g.left_mul_vec(&r);
        rows.push(r);
        r = next;
    }
    Matrix::from_rows(&rows).expect("square")
}
