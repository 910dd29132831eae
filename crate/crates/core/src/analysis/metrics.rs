use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::response::{
    desired_derivative, desired_response, freq_response, impulse_response, response_derivative,
    response_extrema, wrap_pi, IMPULSE_MAX_SAMPLES, IMPULSE_TAIL_TOL,
};
use crate::design::TransferFunction;
use crate::error::{Error, Result};
use crate::models::ModelSpec;

/// White-noise gain: the energy of the impulse response.
pub fn wng(tf: &TransferFunction) -> Result<f64> {
    let h = impulse_response(tf, IMPULSE_MAX_SAMPLES, IMPULSE_TAIL_TOL)?;
    Ok(h.iter().map(|v| v * v).sum())
}

/// White-noise gain from the mean of `|H|^2` over `n` equispaced
/// frequencies (the trapezoidal rule on a periodic integrand).
///
/// Points are evaluated with plain Horner sums: the average tolerates the
/// rounding that [`freq_response`] guards against near pole clusters.
pub fn wng_frequency_domain(tf: &TransferFunction, n: usize) -> Result<f64> {
    let horner = |c: &[f64], w: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &x| acc * w + x)
    };
    let mut acc = 0.0;
    for j in 0..n {
        let omega = -PI + 2.0 * PI * j as f64 / n as f64;
        let w = Complex64::from_polar(1.0, -omega);
        let den = horner(&tf.a, w);
        if den.norm() < 1e-300 {
            return Err(Error::EvaluationOnPole(omega));
        }
        acc += (horner(&tf.b, w) / den).norm_sqr();
    }
    Ok(acc / n as f64)
}

/// Maneuver error-signal gain `|H_d(w) - H(w)|^2` for a position output.
pub fn mesg(tf: &TransferFunction, omega_man: f64, q: i32, d: u32, ts: f64) -> Result<f64> {
    if d != 0 {
        return Err(Error::UnsupportedDerivative(d));
    }
    let h = freq_response(tf, omega_man)?;
    Ok((desired_response(omega_man, q, 0, ts) - h).norm_sqr())
}

/// Radial (pix) and angular (degrees) steady-state errors on a circular
/// orbit of radius `radius` traversed at `omega_man` rad/sample.
pub fn orbital_errors(
    tf: &TransferFunction,
    omega_man: f64,
    q: i32,
    radius: f64,
) -> Result<(f64, f64)> {
    let h = freq_response(tf, omega_man)?;
    let eps_r = (h.norm() - 1.0) * radius;
    let eps_theta = wrap_pi(h.arg() + q as f64 * omega_man).to_degrees();
    Ok((eps_r, eps_theta))
}

/// Expected steady-state distance errors: `(sqrt(2 wng) sigma_sns, sqrt(mesg) R)`.
pub fn sigma_metrics(wng: f64, mesg: f64, sigma_sns: f64, radius: f64) -> (f64, f64) {
    ((2.0 * wng).sqrt() * sigma_sns, mesg.sqrt() * radius)
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Number of derivative constraints at dc, at the maneuver frequency and
/// at Nyquist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessOrders {
    pub l_dc: usize,
    pub l_wb: usize,
    pub l_pi: usize,
}

impl FlatnessOrders {
    pub fn for_spec(spec: &ModelSpec) -> Self {
        Self {
            l_dc: spec.k_tgt,
            l_wb: spec.k_man,
            l_pi: spec.k_int,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatnessResidual {
    pub omega_c: f64,
    pub l: usize,
    pub residual: f64,
    /// Acceptance bound `1e-6 * (1 + |rho_l|)`.
    pub bound: f64,
}

impl FlatnessResidual {
    pub fn passed(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Derivative constraints a design should satisfy at its critical
/// frequencies, with the observed deviation of each.
///
/// `omega_wb` is the maneuver frequency in rad/sample; constraints are
/// checked at both `+omega_wb` and `-omega_wb`.
pub fn flatness_residuals(
    tf: &TransferFunction,
    orders: FlatnessOrders,
    q: i32,
    d: u32,
    ts: f64,
    omega_wb: Option<f64>,
) -> Result<Vec<FlatnessResidual>> {
    let mut out = Vec::new();
    let mut check = |omega_c: f64, l: usize, expected: Complex64| -> Result<()> {
        let got = response_derivative(tf, omega_c, l)?;
        out.push(FlatnessResidual {
            omega_c,
            l,
            residual: (got - expected).norm(),
            bound: 1e-6 * (1.0 + expected.norm()),
        });
        Ok(())
    };
    for l in 0..orders.l_dc {
        check(0.0, l, desired_derivative(0.0, l, q, d, ts))?;
    }
    if let Some(w) = omega_wb {
        for l in 0..orders.l_wb {
            for wc in [w, -w] {
                check(wc, l, desired_derivative(wc, l, q, d, ts))?;
            }
        }
    }
    for l in 0..orders.l_pi {
        check(PI, l, Complex64::new(0.0, 0.0))?;
    }
    Ok(out)
}

pub fn flatness_residuals_for_spec(
    tf: &TransferFunction,
    spec: &ModelSpec,
) -> Result<Vec<FlatnessResidual>> {
    flatness_residuals(
        tf,
        FlatnessOrders::for_spec(spec),
        spec.q,
        spec.d,
        spec.ts,
        spec.maneuver_frequency(),
    )
}

/// What [`analyze`] needs to know about the design beyond its coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignContext {
    pub q: i32,
    pub d: u32,
    pub ts: f64,
    pub orders: FlatnessOrders,
    /// Default frequency of interest in rad/sample.
    pub omega_man: Option<f64>,
}

impl DesignContext {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            q: spec.q,
            d: spec.d,
            ts: spec.ts,
            orders: FlatnessOrders::for_spec(spec),
            // a turn rate given without a maneuver block still names the
            // frequency of interest
            omega_man: spec.omega.map(|w| w * spec.ts),
        }
    }
}

/// Settings for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Frequency of interest in rad/sample; defaults to the design's
    /// maneuver frequency when `None`.
    pub omega_man: Option<f64>,
    pub sigma_sns: f64,
    pub radius: f64,
    pub grid_n: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            omega_man: None,
            sigma_sns: 1.0,
            radius: 10.0,
            grid_n: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub wng: f64,
    pub wng_db: f64,
    pub wng_parseval: f64,
    pub sigma_tgt: f64,
    /// `None` when no frequency of interest is available or the output is
    /// a derivative.
    pub omega_man: Option<f64>,
    pub mesg: Option<f64>,
    pub mesg_db: Option<f64>,
    pub sigma_man: Option<f64>,
    pub eps_r: Option<f64>,
    pub eps_theta_deg: Option<f64>,
    pub h_inf_sq: f64,
    pub omega_max: f64,
    pub flatness_residuals: Vec<FlatnessResidual>,
    pub flatness_pass: bool,
}

/// All steady-state metrics of `tf`.
pub fn analyze(
    tf: &TransferFunction,
    ctx: &DesignContext,
    opts: &AnalysisOptions,
) -> Result<MetricsReport> {
    let w = wng(tf)?;
    let w_parseval = wng_frequency_domain(tf, 1 << 16)?;
    let omega_man = opts.omega_man.or(ctx.omega_man);
    let (mesg_v, orbit) = match omega_man {
        Some(om) if ctx.d == 0 => (
            Some(mesg(tf, om, ctx.q, 0, ctx.ts)?),
            Some(orbital_errors(tf, om, ctx.q, opts.radius)?),
        ),
        _ => (None, None),
    };
    let (sigma_tgt, sigma_man) =
        sigma_metrics(w, mesg_v.unwrap_or(0.0), opts.sigma_sns, opts.radius);
    let (h_inf_sq, omega_max) = response_extrema(tf, opts.grid_n)?;
    let flat = flatness_residuals(tf, ctx.orders, ctx.q, ctx.d, ctx.ts, ctx.omega_man)?;
    Ok(MetricsReport {
        wng: w,
        wng_db: to_db(w),
        wng_parseval: w_parseval,
        sigma_tgt,
        omega_man,
        mesg: mesg_v,
        mesg_db: mesg_v.map(to_db),
        sigma_man: mesg_v.map(|_| sigma_man),
        eps_r: orbit.map(|o| o.0),
        eps_theta_deg: orbit.map(|o| o.1),
        h_inf_sq,
        omega_max,
        flatness_pass: flat.iter().all(FlatnessResidual::passed),
        flatness_residuals: flat,
    })
}
