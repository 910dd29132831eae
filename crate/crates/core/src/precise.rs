//! Double-double polynomial evaluation.
//!
//! Near a lightly damped pole cluster `|A(e^{-i omega})|` can be seven
//! orders of magnitude below the coefficient sum, and ordinary Horner
//! evaluation loses those digits.

use num_complex::Complex64;
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DdComplex {
    re: TwoFloat,
    im: TwoFloat,
}

impl DdComplex {
    pub(crate) fn from_f64(z: Complex64) -> Self {
        Self {
            re: TwoFloat::from(z.re),
            im: TwoFloat::from(z.im),
        }
    }

    pub(crate) fn zero() -> Self {
        Self::from_f64(Complex64::new(0.0, 0.0))
    }

    pub(crate) fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    pub(crate) fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    pub(crate) fn to_f64(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }
}

/// `w^shift * sum(c[k] w^k)` by Horner's rule in double-double arithmetic.
pub(crate) fn eval_ascending(c: &[f64], w: Complex64, shift: usize) -> DdComplex {
    let wd = DdComplex::from_f64(w);
    let mut acc = c.iter().rev().fold(DdComplex::zero(), |acc, &x| {
        let mut next = acc.mul(wd);
        next.re += x;
        next
    });
    for _ in 0..shift {
        acc = acc.mul(wd);
    }
    acc
}

/// `sum(c[k] * weight(k))` accumulated in double-double.
pub(crate) fn weighted_sum(c: &[f64], weight: impl Fn(usize) -> f64) -> TwoFloat {
    c.iter()
        .enumerate()
        .fold(TwoFloat::from(0.0), |acc, (k, &x)| {
            acc + TwoFloat::from(x) * weight(k)
        })
}

/// `sum(a[k] * b[k])` accumulated in double-double.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> TwoFloat {
    a.iter().zip(b).fold(TwoFloat::from(0.0), |acc, (&x, &y)| {
        acc + TwoFloat::from(x) * y
    })
}

/// Observability matrix rows `c g^j`, accumulated in double-double and
/// rounded once at the end.
pub(crate) fn observability_rows(c: &[f64], g: &crate::linalg::Matrix) -> Vec<Vec<f64>> {
    let k = c.len();
    let mut row: Vec<TwoFloat> = c.iter().map(|&v| TwoFloat::from(v)).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(row.iter().map(|&v| f64::from(v)).collect());
        row = (0..k)
            .map(|m| (0..k).fold(TwoFloat::from(0.0), |acc, i| acc + row[i] * g[(i, m)]))
            .collect();
    }
    out
}

/// `sum(c[k] k^m w^k)` for `m = 0..=order`, each accumulated in
/// double-double.
pub(crate) fn moment_sums(c: &[f64], w: Complex64, order: usize) -> Vec<Complex64> {
    let wd = DdComplex::from_f64(w);
    let mut acc = vec![DdComplex::zero(); order + 1];
    let mut pw = DdComplex::from_f64(Complex64::new(1.0, 0.0));
    for (k, &ck) in c.iter().enumerate() {
        let mut weight = TwoFloat::from(ck);
        for a in acc.iter_mut() {
            a.re += pw.re * weight;
            a.im += pw.im * weight;
            weight *= k as f64;
        }
        pw = pw.mul(wd);
    }
    acc.into_iter().map(DdComplex::to_f64).collect()
}
