use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::TransferFunction;
use crate::error::{Error, Result};
use crate::precise::{eval_ascending, moment_sums};

/// Hard cap on impulse-response length.
pub const IMPULSE_MAX_SAMPLES: usize = 1_000_000;
/// Tail-energy ratio that ends the impulse response.
pub const IMPULSE_TAIL_TOL: f64 = 1e-14;

/// `H(omega) = B(e^{-i omega}) / A(e^{-i omega})`, with both polynomials
/// evaluated in double-double precision.
pub fn freq_response(tf: &TransferFunction, omega: f64) -> Result<Complex64> {
    let w = Complex64::from_polar(1.0, -omega);
    let den = eval_ascending(&tf.a, w, 0).to_f64();
    if den.norm() < 1e-300 {
        return Err(Error::EvaluationOnPole(omega));
    }
    Ok(eval_ascending(&tf.b, w, 0).to_f64() / den)
}

/// Ideal response of a lagged differentiator: `(i omega / ts)^d e^{-i q omega}`.
pub fn desired_response(omega: f64, q: i32, d: u32, ts: f64) -> Complex64 {
    Complex64::new(0.0, omega / ts).powu(d) * Complex64::from_polar(1.0, -(q as f64) * omega)
}

/// Impulse response driven through the difference equation until the
/// energy of the last `8K` samples drops below `tol` times the accumulated
/// energy (checked from `n = 10K` on).
pub fn impulse_response(tf: &TransferFunction, n_max: usize, tol: f64) -> Result<Vec<f64>> {
    let k = tf.order().max(1);
    let min_len = 10 * k;
    let window = 8 * k;
    let mut h: Vec<f64> = Vec::with_capacity(min_len.min(n_max));
    let mut energy = 0.0;
    for n in 0..n_max {
        let mut y = tf.b.get(n).copied().unwrap_or(0.0);
        for (j, a) in tf.a.iter().enumerate().skip(1) {
            if j > n {
                break;
            }
            y -= a * h[n - j];
        }
        h.push(y);
        energy += y * y;
        if h.len() >= min_len {
            let tail: f64 = h[h.len() - window..].iter().map(|v| v * v).sum();
            if tail <= tol * energy {
                return Ok(h);
            }
        }
    }
    Err(Error::NoConvergence(n_max))
}

/// Taylor coefficients of `H(omega_c + t)` in `t`, up to `t^order`.
///
/// Derived by expanding numerator and denominator in closed form and
/// dividing the series, so the derivatives are exact up to rounding.
pub fn response_taylor(
    tf: &TransferFunction,
    omega_c: f64,
    order: usize,
) -> Result<Vec<Complex64>> {
    // exact unit points at dc and Nyquist keep the moments free of sin(pi)
    let w = if omega_c == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if omega_c.abs() == PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -omega_c)
    };
    // d^m/dt^m of e^{-ik(omega_c + t)} is (-ik)^m e^{-ik omega_c}
    let series = |c: &[f64]| -> Vec<Complex64> {
        let mut scale = Complex64::new(1.0, 0.0);
        moment_sums(c, w, order)
            .into_iter()
            .enumerate()
            .map(|(m, s)| {
                if m > 0 {
                    scale = scale * Complex64::new(0.0, -1.0) / m as f64;
                }
                s * scale
            })
            .collect()
    };
    let num = series(&tf.b);
    let den = series(&tf.a);
    if den[0].norm() < 1e-300 {
        return Err(Error::EvaluationOnPole(omega_c));
    }
    let mut h = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = num[m];
        for j in 1..=m {
            acc -= den[j] * h[m - j];
        }
        h.push(acc / den[0]);
    }
    Ok(h)
}

/// `l`-th derivative of `H(omega)` at `omega_c`.
pub fn response_derivative(tf: &TransferFunction, omega_c: f64, l: usize) -> Result<Complex64> {
    let series = response_taylor(tf, omega_c, l)?;
    Ok(series[l] * factorial(l))
}

/// `l`-th derivative of the desired response at `omega_c`.
pub fn desired_derivative(omega_c: f64, l: usize, q: i32, d: u32, ts: f64) -> Complex64 {
    let d = d as usize;
    // (omega_c + t)^d as a series in t
    let mut poly = vec![Complex64::new(0.0, 0.0); l + 1];
    let mut binom = 1.0;
    for (j, c) in poly.iter_mut().enumerate().take(d.min(l) + 1) {
        *c = Complex64::new(binom * omega_c.powi((d - j) as i32), 0.0);
        binom = binom * (d - j) as f64 / (j + 1) as f64;
    }
    // e^{-i q (omega_c + t)}
    let mut expo = Vec::with_capacity(l + 1);
    let step = Complex64::new(0.0, -(q as f64));
    let mut term = Complex64::from_polar(1.0, -(q as f64) * omega_c);
    for m in 0..=l {
        expo.push(term);
        term = term * step / (m + 1) as f64;
    }
    let coef: Complex64 = (0..=l).map(|j| poly[j] * expo[l - j]).sum();
    coef * Complex64::new(0.0, 1.0 / ts).powu(d as u32) * factorial(l)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

const TIE_TOL: f64 = 1e-12;

/// Peak of `|H|^2` on `[0, pi]`: uniform grid search followed by a
/// golden-section refinement around the best grid point. Ties resolve to
/// the lowest frequency; values within `1e-12` relative count as ties.
pub fn response_extrema(tf: &TransferFunction, grid_n: usize) -> Result<(f64, f64)> {
    let n = grid_n.max(1024);
    let step = PI / (n - 1) as f64;
    let mag2 = |w: f64| freq_response(tf, w).map(|h| h.norm_sqr());
    let mut best = (0usize, mag2(0.0)?);
    for i in 1..n {
        let v = mag2(i as f64 * step)?;
        if v > best.1 * (1.0 + TIE_TOL) {
            best = (i, v);
        }
    }
    let (i, grid_val) = best;
    let mut lo = i.saturating_sub(1) as f64 * step;
    let mut hi = ((i + 1).min(n - 1)) as f64 * step;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = mag2(x1)?;
    let mut f2 = mag2(x2)?;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = mag2(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = mag2(x1)?;
        }
    }
    let w = 0.5 * (lo + hi);
    let v = mag2(w)?;
    if v > grid_val * (1.0 + TIE_TOL) {
        Ok((v, w))
    } else {
        Ok((grid_val, i as f64 * step))
    }
}

/// One row of a sampled frequency response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSample {
    /// Normalised frequency, cycles per sample.
    pub f: f64,
    pub omega: f64,
    pub mag: f64,
    pub mag_db: f64,
    pub phase_rad: f64,
    /// `arg H + q omega`, wrapped to `(-pi, pi]`.
    pub phase_err_rad: f64,
}

/// Samples the response on `rows` uniformly spaced frequencies `f in [0, 0.5]`.
pub fn response_table(tf: &TransferFunction, q: i32, rows: usize) -> Result<Vec<ResponseSample>> {
    (0..rows)
        .map(|i| {
            let f = if rows > 1 {
                0.5 * i as f64 / (rows - 1) as f64
            } else {
                0.0
            };
            let omega = 2.0 * PI * f;
            let h = freq_response(tf, omega)?;
            let mag = h.norm();
            let phase = h.arg();
            Ok(ResponseSample {
                f,
                omega,
                mag,
                mag_db: 20.0 * mag.log10(),
                phase_rad: phase,
                phase_err_rad: wrap_pi(phase + q as f64 * omega),
            })
        })
        .collect()
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    r
}
