//! Property checks shared by the randomized test targets.

#![allow(dead_code)]

use std::f64::consts::PI;

use augtrack::analysis::{
    flatness_residuals_for_spec, freq_response, wng, wng_frequency_domain, FlatnessResidual,
};
use augtrack::design::{design, observer_poly};
use augtrack::simulate::{run_ss_observer, run_tf_filter, InitPolicy};
use augtrack::{Error, ModelSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn spec(k_tgt: usize, k_man: usize, k_int: usize, pole: f64, q: i32) -> ModelSpec {
    ModelSpec {
        k_tgt,
        k_man,
        k_int,
        ts: 0.04,
        omega: (k_man == 1).then_some(2.5),
        pole,
        q,
        d: 0,
    }
}

/// `det(zI - G)` by LU factorization.
pub fn char_poly_at(g: &augtrack::Matrix, z: Complex64) -> Complex64 {
    let k = g.rows();
    let m = DMatrix::from_fn(k, k, |i, j| {
        let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
        d - Complex64::new(g[(i, j)], 0.0)
    });
    m.determinant()
}

pub fn poly_at(coeffs_desc: &[f64], z: Complex64) -> Complex64 {
    coeffs_desc
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Outcome of checking one spec.
#[derive(Debug, PartialEq)]
pub enum Checked {
    /// The requested output cancels an observer mode; nothing to check.
    Unobservable,
    Passed,
}

/// Measurements a caller judges against floating-point limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Realizations {
    /// Output agreement of the coefficient and kinematic state-space forms.
    pub gap: f64,
    pub bound: f64,
    /// Flatness residuals above the fixed bound yet within what storing
    /// `b` in double precision can explain.
    pub flatness_at_limit: Vec<FlatnessResidual>,
}

/// All properties of a design except realization agreement, which is
/// returned for the caller to judge; `Err` describes the first violation.
pub fn check_design(s: &ModelSpec) -> Result<Option<Realizations>, String> {
    let (obs, tf) = match design(s) {
        Ok(v) => v,
        Err(Error::UnobservableOutput { .. }) => return Ok(None),
        Err(e) => return Err(format!("{s:?}: design failed: {e}")),
    };
    let k = obs.order();

    let want = observer_poly(s.pole, k).unwrap();
    let want = want.coeffs();
    for (i, (a, w)) in tf.a.iter().zip(want).enumerate() {
        if (a - w).abs() > 1e-9 {
            return Err(format!("{s:?}: a[{i}] = {a}, expected {w}"));
        }
    }
    // characteristic polynomial of G_obs at the (K+1)-th roots of unity
    for j in 0..=k {
        let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / (k + 1) as f64);
        let got = char_poly_at(&obs.g_obs_kin, z);
        let exp = poly_at(want, z);
        // rounding in G_obs moves the determinant by up to about eps times
        // the product of the row norms of zI - G
        let hadamard: f64 = (0..k)
            .map(|i| 1.0 + obs.g_obs_kin.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .product();
        if (got - exp).norm() > 1e-9 * (1.0 + exp.norm()) + 64.0 * f64::EPSILON * hadamard {
            return Err(format!(
                "{s:?}: det(zI - G_obs) = {got} at {z}, expected {exp}"
            ));
        }
    }

    let mut flatness_at_limit = Vec::new();
    for r in flatness_residuals_for_spec(&tf, s).map_err(|e| e.to_string())? {
        if r.passed() {
            continue;
        }
        let limit = flatness_rounding_bound(&tf, r.omega_c, r.l);
        if r.residual > limit {
            return Err(format!(
                "{s:?}: flatness residual {r:?} above rounding bound {limit:e}"
            ));
        }
        flatness_at_limit.push(r);
    }
    if s.k_int >= 1 {
        let h = freq_response(&tf, PI).unwrap().norm();
        if h > 1e-12 {
            return Err(format!("{s:?}: |H(pi)| = {h:e}"));
        }
    }
    if s.k_man == 1 {
        let w = s.maneuver_frequency().unwrap();
        let err =
            (freq_response(&tf, w).unwrap() - Complex64::from_polar(1.0, -(s.q as f64) * w)).norm();
        if err > 1e-9 {
            return Err(format!("{s:?}: maneuver response error {err:e}"));
        }
    }

    let t = wng(&tf).map_err(|e| e.to_string())?;
    let f = wng_frequency_domain(&tf, 1 << 16).unwrap();
    if (t - f).abs() > 1e-6 * t {
        return Err(format!("{s:?}: WNG {t} vs Parseval {f}"));
    }

    // coefficient form and kinematic state-space form agree sample by sample
    Ok(Some(Realizations {
        gap: realization_gap(&obs, &tf),
        bound: realization_error_bound(&obs, &tf),
        flatness_at_limit,
    }))
}

/// At `p = 0` the impulse response ends after `K` samples.
pub fn check_deadbeat(s: &ModelSpec) -> Result<Checked, String> {
    let s = ModelSpec {
        pole: 0.0,
        ..s.clone()
    };
    let tf = match design(&s) {
        Ok(v) => v.1,
        Err(Error::UnobservableOutput { .. }) => return Ok(Checked::Unobservable),
        Err(e) => return Err(format!("{s:?}: design failed: {e}")),
    };
    let k = tf.order();
    let mut x = vec![0.0; 4 * k + 4];
    x[0] = 1.0;
    let h = run_tf_filter(&tf, &x, InitPolicy::Zero).unwrap();
    match h.iter().skip(k).map(|v| v.abs()).fold(0.0, f64::max) {
        tail if tail <= 1e-12 => Ok(Checked::Passed),
        tail => Err(format!("{s:?}: deadbeat tail {tail:e}")),
    }
}

/// Largest output difference between the coefficient form and the
/// kinematic state-space form over a fixed 300-sample input, relative to
/// `max(1, max |y|)`.
pub fn realization_gap(
    obs: &augtrack::ObserverRealization,
    tf: &augtrack::TransferFunction,
) -> f64 {
    let x: Vec<f64> = (0..300)
        .map(|n| ((n * 7919) % 101) as f64 / 10.0 - 5.0)
        .collect();
    let ya = run_tf_filter(tf, &x, InitPolicy::Zero).unwrap();
    let yb = run_ss_observer(obs, &x, &vec![0.0; obs.order()]).unwrap().y;
    let scale = ya.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    ya.iter()
        .zip(&yb)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

/// First-order rounding-error bound for the two recursions behind
/// [`realization_gap`], on the same relative scale.
///
/// Each state-space step perturbs `w` by about `eps (|G| |w| + |K| |x|)`
/// and each direct-form step perturbs `y` by about `eps (|b| |x| + |a| |y|)`;
/// the perturbations propagate through `c G^m` and through the impulse
/// response of `1 / A` respectively.
pub fn realization_error_bound(
    obs: &augtrack::ObserverRealization,
    tf: &augtrack::TransferFunction,
) -> f64 {
    let eps = f64::EPSILON;
    let x: Vec<f64> = (0..300)
        .map(|n| ((n * 7919) % 101) as f64 / 10.0 - 5.0)
        .collect();
    let k = obs.order();
    let run = run_ss_observer(obs, &x, &vec![0.0; k]).unwrap();

    // state-space: sum over m of ||c G^m||_1, times the largest per-step perturbation
    let mut row = obs.c_obs_kin.clone();
    let mut gain_ss = 0.0;
    for _ in 0..x.len() {
        gain_ss += row.iter().map(|v| v.abs()).sum::<f64>();
        row = obs.g_obs_kin.left_mul_vec(&row);
    }
    let abs_g = augtrack::Matrix::from_fn(k, k, |i, j| obs.g_obs_kin[(i, j)].abs());
    let mut step_ss: f64 = 0.0;
    let mut prev = vec![0.0; k];
    for (n, w) in run.states.iter().enumerate() {
        let gw = abs_g.mul_vec(&prev.iter().map(|v: &f64| v.abs()).collect::<Vec<_>>());
        for (i, v) in gw.iter().enumerate() {
            step_ss = step_ss.max(v + obs.gain_kin[i].abs() * x[n].abs());
        }
        prev = w.clone();
    }
    let out_ss = obs.c_obs_kin.iter().map(|v| v.abs()).sum::<f64>()
        * run
            .states
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));

    // direct form: l1 norm of the impulse response of 1/A
    let mut b1 = vec![0.0; tf.a.len()];
    b1[0] = 1.0;
    let inv = augtrack::TransferFunction {
        b: b1,
        a: tf.a.clone(),
    };
    let mut imp = vec![0.0; x.len()];
    imp[0] = 1.0;
    let g_tf: f64 = run_tf_filter(&inv, &imp, InitPolicy::Zero)
        .unwrap()
        .iter()
        .map(|v| v.abs())
        .sum();
    let y = run_tf_filter(tf, &x, InitPolicy::Zero).unwrap();
    let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xmax = 5.0;
    let step_tf = tf.b.iter().map(|v| v.abs()).sum::<f64>() * xmax
        + tf.a.iter().map(|v| v.abs()).sum::<f64>() * ymax;

    let scale = ymax.max(1.0);
    eps * (gain_ss * step_ss + out_ss + g_tf * step_tf) / scale
}

/// First-order bound on the `l`-th derivative error of `H` at `omega_c`
/// caused by rounding each `b_k` to double precision.
///
/// With `|delta b_k| <= eps |b_k|` the numerator series picks up
/// `e_j = eps sum_k k^j / j! |b_k|` per Taylor coefficient, which the
/// series of `1 / A` spreads into the response; near-unit poles make that
/// series large.
pub fn flatness_rounding_bound(tf: &augtrack::TransferFunction, omega_c: f64, l: usize) -> f64 {
    let eps = f64::EPSILON;
    let mut fact = 1.0;
    let mut alpha = Vec::with_capacity(l + 1);
    let mut e = Vec::with_capacity(l + 1);
    for m in 0..=l {
        if m > 0 {
            fact *= m as f64;
        }
        let sum: Complex64 =
            tf.a.iter()
                .enumerate()
                .map(|(k, &ak)| {
                    let kf = k as f64;
                    ak * Complex64::new(0.0, -kf).powu(m as u32)
                        * Complex64::from_polar(1.0, -kf * omega_c)
                })
                .sum();
        alpha.push(sum / fact);
        let mag: f64 =
            tf.b.iter()
                .enumerate()
                .map(|(k, bk)| (k as f64).powi(m as i32) * bk.abs())
                .sum();
        e.push(eps * mag / fact);
    }
    // Taylor series of 1 / A
    let mut r = vec![Complex64::new(0.0, 0.0); l + 1];
    r[0] = alpha[0].inv();
    for m in 1..=l {
        let acc: Complex64 = (1..=m).map(|j| alpha[j] * r[m - j]).sum();
        r[m] = -acc * r[0];
    }
    fact * (0..=l).map(|j| e[j] * r[l - j].norm()).sum::<f64>()
}
