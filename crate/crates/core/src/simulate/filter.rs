use serde::{Deserialize, Serialize};

use crate::design::{ObserverRealization, TransferFunction};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// How a filter's delay registers are filled before the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    Zero,
    /// As if the first input had been applied forever.
    #[default]
    Step,
}

/// Past inputs `x(n-1), x(n-2), ...` and outputs `y(n-1), ...` of a
/// direct-form recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct TfState {
    pub x_past: Vec<f64>,
    pub y_past: Vec<f64>,
}

/// Registers at the fixed point of the recursion under constant input `x0`.
pub fn init_step_tf(tf: &TransferFunction, x0: f64) -> Result<TfState> {
    let k = tf.order();
    let sa: f64 = tf.a.iter().sum();
    if sa.abs() < 1e-12 * tf.a.iter().map(|v| v.abs()).sum::<f64>() {
        return Err(Error::SingularFixedPoint);
    }
    let y0 = tf.b.iter().sum::<f64>() / sa * x0;
    Ok(TfState {
        x_past: vec![x0; k],
        y_past: vec![y0; k],
    })
}

/// Runs `y(n) = sum b_k x(n-k) - sum_{k>=1} a_k y(n-k)` over `x`.
pub fn run_tf_filter(tf: &TransferFunction, x: &[f64], init: InitPolicy) -> Result<Vec<f64>> {
    let k = tf.order();
    let state = match (init, x.first()) {
        (InitPolicy::Step, Some(&x0)) => init_step_tf(tf, x0)?,
        _ => TfState {
            x_past: vec![0.0; k],
            y_past: vec![0.0; k],
        },
    };
    Ok(run_tf_from(tf, x, state))
}

pub fn run_tf_from(tf: &TransferFunction, x: &[f64], state: TfState) -> Vec<f64> {
    let k = tf.order();
    let (mut xp, mut yp) = (state.x_past, state.y_past);
    let mut y = Vec::with_capacity(x.len());
    for &xn in x {
        let mut v = tf.b[0] * xn;
        for j in 1..=k {
            v += tf.b[j] * xp[j - 1] - tf.a[j] * yp[j - 1];
        }
        if k > 0 {
            xp.rotate_right(1);
            xp[0] = xn;
            yp.rotate_right(1);
            yp[0] = v;
        }
        y.push(v);
    }
    y
}

/// Observer state at the fixed point of `w = G w + K x0`.
pub fn init_step_state(obs: &ObserverRealization, x0: f64) -> Result<Vec<f64>> {
    let k = obs.order();
    if x0 == 0.0 {
        return Ok(vec![0.0; k]);
    }
    let lhs = Matrix::identity(k).sub(&obs.g_obs_kin)?;
    let rhs = Matrix::column(&obs.gain_kin.iter().map(|g| g * x0).collect::<Vec<_>>());
    lhs.solve(&rhs)
        .map(|w| w.col(0))
        .map_err(|_| Error::SingularFixedPoint)
}

/// Output and per-sample state of the kinematic-coordinate observer.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverRun {
    pub y: Vec<f64>,
    /// `states[n]` is the state after processing `x[n]`.
    pub states: Vec<Vec<f64>>,
}

/// Runs `w(n) = G_obs w(n-1) + K x(n)`, `y(n) = c_obs w(n)` from `w0`.
pub fn run_ss_observer(obs: &ObserverRealization, x: &[f64], w0: &[f64]) -> Result<ObserverRun> {
    let k = obs.order();
    if w0.len() != k {
        return Err(Error::Dimension(format!(
            "initial state has {} entries, observer order is {k}",
            w0.len()
        )));
    }
    let mut w = w0.to_vec();
    let mut y = Vec::with_capacity(x.len());
    let mut states = Vec::with_capacity(x.len());
    for &xn in x {
        let mut next = obs.g_obs_kin.mul_vec(&w);
        for (s, g) in next.iter_mut().zip(&obs.gain_kin) {
            *s += g * xn;
        }
        w = next;
        y.push(dot(&obs.c_obs_kin, &w));
        states.push(w.clone());
    }
    Ok(ObserverRun { y, states })
}
