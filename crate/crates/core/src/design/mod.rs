//! Observer design by pole placement and extraction of direct-form filter
//! coefficients.
//!
//! The gain is computed in process canonical form (PCF), where the
//! predictor row only touches the last column of the transition matrix, and
//! mapped back to kinematic coordinates through the ratio of observability
//! matrices. The numerator of the resulting SISO filter is read from the
//! input vector in observer canonical form (OCF).

mod alpha_beta;
pub mod canonical;

pub use alpha_beta::{alpha_beta_tf, kalata_gains};
pub use canonical::observability_matrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::{augment_process, output_row, ModelSpec};
use crate::poly::Polynomial;
use crate::precise::{self, eval_ascending, weighted_sum};

use canonical::{companion, last_unit_row, poly_to_column};

/// Pivot threshold for observability tests, applied after column
/// equilibration of the observability matrix.
pub const OBSERVABILITY_PIVOT_RATIO: f64 = 1e-12;

/// Iterative-refinement passes applied to the kinematic gain.
const GAIN_REFINEMENT_STEPS: usize = 2;

/// Refinement passes applied to the extracted numerator.
const NUMERATOR_REFINEMENT_STEPS: usize = 3;

/// SISO filter `H(z) = B(z^-1) / A(z^-1)` with `a[0] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl TransferFunction {
    pub fn identity() -> Self {
        Self {
            b: vec![1.0, 0.0],
            a: vec![1.0, 0.0],
        }
    }

    /// Filter order `K` (number of feedback taps).
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.b.len() == self.a.len() && self.b.last() == Some(&0.0)
    }
}

/// Kinematic-coordinate observer and the PCF transform that produced its gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverRealization {
    pub spec: ModelSpec,
    pub g_prc_kin: Matrix,
    pub c_prd_kin: Vec<f64>,
    /// Gain in process canonical coordinates.
    pub gain_pcf: Vec<f64>,
    /// Gain (and input vector) in kinematic coordinates.
    pub gain_kin: Vec<f64>,
    pub g_obs_kin: Matrix,
    pub c_obs_kin: Vec<f64>,
    pub o_prc_kin: Matrix,
    pub o_prc_pcf: Matrix,
    pub t_kin_from_pcf: Matrix,
    pub t_pcf_from_kin: Matrix,
    pub a_prc: Polynomial,
    pub a_obs: Polynomial,
}

impl ObserverRealization {
    pub fn order(&self) -> usize {
        self.gain_kin.len()
    }
}

/// Kinematic-to-OCF change of coordinates for a designed observer.
#[derive(Debug, Clone, PartialEq)]
pub struct OcfTransform {
    pub o_obs_kin: Matrix,
    pub o_obs_ocf: Matrix,
    pub t_kin_from_ocf: Matrix,
    pub t_ocf_from_kin: Matrix,
    pub g_obs_ocf: Matrix,
    /// Input vector in OCF: the numerator coefficients in reverse order.
    pub h_obs_ocf: Vec<f64>,
}

/// Process polynomial: `(z-1)^k_tgt (z^2 - 2cos(omega ts) z + 1)^k_man (z+1)^k_int`.
pub fn poly_from_unit_roots(spec: &ModelSpec) -> Result<Polynomial> {
    spec.validate_structure()?;
    let integ = Polynomial::from_coeffs(vec![1.0, -1.0]);
    let nyq = Polynomial::from_coeffs(vec![1.0, 1.0]);
    let mut p = Polynomial::one().mul_pow(&integ, spec.k_tgt);
    if let Some(w) = spec.maneuver_frequency() {
        let osc = Polynomial::from_coeffs(vec![1.0, -2.0 * w.cos(), 1.0]);
        p = p.mul_pow(&osc, spec.k_man);
    }
    Ok(p.mul_pow(&nyq, spec.k_int))
}

/// Observer polynomial `(z - p)^K`.
pub fn observer_poly(p: f64, k: usize) -> Result<Polynomial> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::UnstableRequest(p));
    }
    Ok(Polynomial::repeated_root(p, k))
}

/// Places all observer poles at `spec.pole`.
pub fn place_poles(spec: &ModelSpec) -> Result<ObserverRealization> {
    spec.validate()?;
    let sys = augment_process(spec)?;
    let k = sys.dims.total();

    let a_prc = poly_from_unit_roots(spec)?;
    let a_obs = observer_poly(spec.pole, k)?;
    let g_prc = poly_to_column(&a_prc);
    let g_obs = poly_to_column(&a_obs);
    let gain_pcf: Vec<f64> = g_prc.iter().zip(&g_obs).map(|(p, o)| p - o).collect();

    let o_prc_kin = observability_matrix(&sys.c_prd, &sys.g);
    let o_prc_pcf = observability_matrix(&last_unit_row(k), &companion(&g_prc));
    let t_kin_from_pcf = o_prc_kin
        .solve_equilibrated(&o_prc_pcf, OBSERVABILITY_PIVOT_RATIO)
        .map_err(|_| Error::UnobservableSystem {
            spec: format!("{spec:?}"),
        })?;
    let t_pcf_from_kin = o_prc_pcf.solve(&o_prc_kin)?;

    let mut gain_kin = t_kin_from_pcf.mul_vec(&gain_pcf);
    // The kinematic observability matrix is badly conditioned when process
    // modes cluster; refine the gain against `O_kin K = O_pcf K_pcf`.
    // Residuals cancel heavily, so they are accumulated in double-double.
    let o_dd = precise::observability_rows(&sys.c_prd, &sys.g);
    for _ in 0..GAIN_REFINEMENT_STEPS {
        let r: Vec<f64> = (0..k)
            .map(|i| {
                f64::from(
                    precise::dot(o_prc_pcf.row(i), &gain_pcf) - precise::dot(&o_dd[i], &gain_kin),
                )
            })
            .collect();
        let step = o_prc_kin.solve_equilibrated(&Matrix::column(&r), OBSERVABILITY_PIVOT_RATIO)?;
        for (k, d) in gain_kin.iter_mut().zip(step.col(0)) {
            *k += d;
        }
    }
    let correction = Matrix::from_fn(k, k, |i, j| gain_kin[i] * sys.c_prd[j]);
    let g_obs_kin = sys.g.sub(&correction)?;
    let c_obs_kin = output_row(spec)?.c_obs;

    Ok(ObserverRealization {
        spec: spec.clone(),
        g_prc_kin: sys.g,
        c_prd_kin: sys.c_prd,
        gain_pcf,
        gain_kin,
        g_obs_kin,
        c_obs_kin,
        o_prc_kin,
        o_prc_pcf,
        t_kin_from_pcf,
        t_pcf_from_kin,
        a_prc,
        a_obs,
    })
}

/// Change of coordinates taking `(c_obs_kin, g_obs_kin)` to observer
/// canonical form.
///
/// The OCF observability matrix is unit-triangular, so the OCF input vector
/// is solved against it directly rather than by inverting the (often badly
/// scaled) kinematic observability matrix.
pub fn ocf_transform(obs: &ObserverRealization) -> Result<OcfTransform> {
    let k = obs.order();
    let g_obs = poly_to_column(&obs.a_obs);
    let g_obs_ocf = companion(&g_obs);
    let o_obs_kin = observability_matrix(&obs.c_obs_kin, &obs.g_obs_kin);
    let o_obs_ocf = observability_matrix(&last_unit_row(k), &g_obs_ocf);

    let t_kin_from_ocf = o_obs_kin
        .solve_equilibrated(&o_obs_ocf, OBSERVABILITY_PIVOT_RATIO)
        .map_err(|_| Error::UnobservableOutput {
            spec: format!("{:?}", obs.spec),
        })?;
    let t_ocf_from_kin = o_obs_ocf.solve(&o_obs_kin)?;
    let h_obs_ocf = t_ocf_from_kin.mul_vec(&obs.gain_kin);

    Ok(OcfTransform {
        o_obs_kin,
        o_obs_ocf,
        t_kin_from_ocf,
        t_ocf_from_kin,
        g_obs_ocf,
        h_obs_ocf,
    })
}

/// Direct-form coefficients of the designed observer.
pub fn extract_transfer_function(obs: &ObserverRealization) -> Result<TransferFunction> {
    let ocf = ocf_transform(obs)?;
    let mut b: Vec<f64> = ocf.h_obs_ocf.iter().rev().copied().collect();
    let a = obs.a_obs.coeffs().to_vec();
    if obs.spec.d == 0 {
        refine_numerator(&mut b, &a, &obs.spec);
    }
    b.push(0.0);
    Ok(TransferFunction { b, a })
}

/// `n (n-1) ... (n-l+1)`.
fn falling(n: usize, l: usize) -> f64 {
    (0..l).map(|j| n as f64 - j as f64).product()
}

/// Polishes the numerator `b[0..K]` against the conditions that define it
/// for a position output, written in the delay variable `w = z^-1` with
/// `P(w) = w^s B(w) - w^t A(w)`, `s = max(0, -q)`, `t = max(0, q)`:
/// `P` vanishes to order `k_tgt` at `w = 1` and at `e^{-i omega ts}` when a
/// maneuver block is present, and `B` vanishes to order `k_int` at `w = -1`.
///
/// Extraction through the observability matrices leaves residuals that are
/// tiny in absolute terms but large next to `|A|` near a pole cluster.
/// Residuals are evaluated in double-double arithmetic; a step that fails
/// to shrink them is discarded.
fn refine_numerator(b: &mut [f64], a: &[f64], spec: &ModelSpec) {
    let k = b.len();
    let s = (-spec.q).max(0) as usize;
    let t = spec.q.max(0) as usize;
    let wm = spec
        .maneuver_frequency()
        .map(|om| Complex64::from_polar(1.0, -om));

    let residual = |b: &[f64]| -> Vec<f64> {
        let mut r = Vec::with_capacity(k);
        for l in 0..spec.k_tgt {
            let v = weighted_sum(b, |j| falling(j + s, l)) - weighted_sum(a, |j| falling(j + t, l));
            r.push(f64::from(v));
        }
        if let Some(w) = wm {
            let v = eval_ascending(b, w, s)
                .sub(eval_ascending(a, w, t))
                .to_f64();
            r.push(v.re);
            r.push(v.im);
        }
        for l in 0..spec.k_int {
            let sign = |j: usize| if (j + l).is_multiple_of(2) { 1.0 } else { -1.0 };
            r.push(f64::from(weighted_sum(b, |j| falling(j, l) * sign(j))));
        }
        r
    };
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for l in 0..spec.k_tgt {
        rows.push((0..k).map(|j| falling(j + s, l)).collect());
    }
    if let Some(w) = wm {
        let p: Vec<Complex64> = (0..k).map(|j| w.powu((j + s) as u32)).collect();
        rows.push(p.iter().map(|v| v.re).collect());
        rows.push(p.iter().map(|v| v.im).collect());
    }
    for l in 0..spec.k_int {
        rows.push(
            (0..k)
                .map(|j| falling(j, l) * if (j + l).is_multiple_of(2) { 1.0 } else { -1.0 })
                .collect(),
        );
    }
    let Ok(jac) = Matrix::from_rows(&rows) else {
        return;
    };
    if jac.rows() != k {
        return;
    }
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = residual(b);
    for _ in 0..NUMERATOR_REFINEMENT_STEPS {
        let Ok(step) = jac.solve_equilibrated(
            &Matrix::column(&r.iter().map(|v| -v).collect::<Vec<_>>()),
            OBSERVABILITY_PIVOT_RATIO,
        ) else {
            return;
        };
        let trial: Vec<f64> = b.iter().zip(step.col(0)).map(|(x, d)| x + d).collect();
        let r_trial = residual(&trial);
        if norm(&r_trial) >= norm(&r) {
            return;
        }
        b.copy_from_slice(&trial);
        r = r_trial;
    }
}

/// Convenience: `place_poles` followed by `extract_transfer_function`.
pub fn design(spec: &ModelSpec) -> Result<(ObserverRealization, TransferFunction)> {
    let obs = place_poles(spec)?;
    let tf = extract_transfer_function(&obs)?;
    Ok((obs, tf))
}
