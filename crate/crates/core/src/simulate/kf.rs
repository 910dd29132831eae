use serde::{Deserialize, Serialize};

/// Initial conditions of the two-state Kalman filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KfInit {
    /// Initial covariance diagonal.
    pub p0: [f64; 2],
    /// Initial velocity; the position starts at the first measurement.
    pub v0: f64,
}

impl Default for KfInit {
    fn default() -> Self {
        Self {
            p0: [1e6, 1e6],
            v0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KfRun {
    /// `(position, velocity)` after each measurement.
    pub estimates: Vec<[f64; 2]>,
    /// Gain of update `i + 1` (the first measurement only initializes).
    pub gains: Vec<[f64; 2]>,
}

impl KfRun {
    /// Position estimate extrapolated `q` samples into the past.
    pub fn lagged_position(&self, q: i32, ts: f64) -> Vec<f64> {
        self.estimates
            .iter()
            .map(|e| e[0] - q as f64 * ts * e[1])
            .collect()
    }
}

/// Constant-velocity Kalman filter with white-noise-acceleration process
/// noise `sigma_q^2 [[ts^4/4, ts^3/2], [ts^3/2, ts^2]]` and measurement
/// variance `sigma_r^2`.
pub fn run_variable_kf(z: &[f64], sigma_q: f64, sigma_r: f64, ts: f64, init: KfInit) -> KfRun {
    let mut out = KfRun {
        estimates: Vec::with_capacity(z.len()),
        gains: Vec::with_capacity(z.len().saturating_sub(1)),
    };
    let Some(&z0) = z.first() else {
        return out;
    };
    let q2 = sigma_q * sigma_q;
    let (q11, q12, q22) = (q2 * ts.powi(4) / 4.0, q2 * ts.powi(3) / 2.0, q2 * ts * ts);
    let r = sigma_r * sigma_r;
    let mut x = [z0, init.v0];
    let mut p = [[init.p0[0], 0.0], [0.0, init.p0[1]]];
    out.estimates.push(x);
    for &zn in &z[1..] {
        // predict
        x = [x[0] + ts * x[1], x[1]];
        let p11 = p[0][0] + 2.0 * ts * p[0][1] + ts * ts * p[1][1] + q11;
        let p12 = p[0][1] + ts * p[1][1] + q12;
        let p22 = p[1][1] + q22;
        // update
        let s = p11 + r;
        let k = [p11 / s, p12 / s];
        let innov = zn - x[0];
        x = [x[0] + k[0] * innov, x[1] + k[1] * innov];
        p = [
            [(1.0 - k[0]) * p11, (1.0 - k[0]) * p12],
            [(1.0 - k[0]) * p12, p22 - k[1] * p12],
        ];
        out.estimates.push(x);
        out.gains.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::kalata_gains;

    /// Steady-state gain by iterating the Riccati recursion in matrix form.
    fn riccati_gain(sigma_q: f64, sigma_r: f64, ts: f64) -> [f64; 2] {
        let f = [[1.0, ts], [0.0, 1.0]];
        let q2 = sigma_q * sigma_q;
        let q = [
            [q2 * ts.powi(4) / 4.0, q2 * ts.powi(3) / 2.0],
            [q2 * ts.powi(3) / 2.0, q2 * ts * ts],
        ];
        let mut p = [[1.0, 0.0], [0.0, 1.0]];
        let mut k = [0.0; 2];
        for _ in 0..10_000 {
            let mut fp = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    fp[i][j] = (0..2).map(|l| f[i][l] * p[l][j]).sum();
                }
            }
            let mut pp = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    pp[i][j] = (0..2).map(|l| fp[i][l] * f[j][l]).sum::<f64>() + q[i][j];
                }
            }
            let s = pp[0][0] + sigma_r * sigma_r;
            k = [pp[0][0] / s, pp[1][0] / s];
            for i in 0..2 {
                for j in 0..2 {
                    p[i][j] = pp[i][j] - k[i] * pp[0][j];
                }
            }
        }
        k
    }

    #[test]
    fn position_gain_limit() {
        let z: Vec<f64> = (0..300).map(|n| n as f64).collect();
        let run = run_variable_kf(&z, 62.5, 1.0, 0.04, KfInit::default());
        let g = run.gains.last().unwrap();
        assert!((g[0] - 0.36).abs() < 0.002);
        assert!((g[1] * 0.04 - 0.08).abs() < 8e-4);
    }

    #[test]
    fn steady_state_matches_riccati_and_closed_form() {
        let k = riccati_gain(62.5, 1.0, 0.04);
        let (a, b) = kalata_gains(0.1);
        assert!((k[0] - a).abs() / a < 0.01);
        assert!((k[1] * 0.04 - b).abs() / b < 0.01);
        let z = vec![0.0; 400];
        let run = run_variable_kf(&z, 62.5, 1.0, 0.04, KfInit::default());
        let g = run.gains.last().unwrap();
        assert!((g[0] - k[0]).abs() < 1e-9 && (g[1] - k[1]).abs() < 1e-9);
    }

    #[test]
    fn vanishing_process_noise() {
        let z: Vec<f64> = (0..2000).map(|n| 3.0 + 0.5 * n as f64).collect();
        let run = run_variable_kf(&z, 0.0, 1.0, 0.04, KfInit::default());
        let g = run.gains.last().unwrap();
        assert!(g[0] < 3e-3 && g[1] < 3e-3, "{g:?}");
        let e = run.estimates.last().unwrap();
        assert!((e[0] - z[1999]).abs() < 1e-6 && (e[1] - 12.5).abs() < 1e-6);
    }

    #[test]
    fn lagged_position() {
        let run = KfRun {
            estimates: vec![[10.0, 25.0]],
            gains: vec![],
        };
        assert_eq!(run.lagged_position(2, 0.04), vec![8.0]);
        assert!(run_variable_kf(&[], 1.0, 1.0, 0.04, KfInit::default())
            .estimates
            .is_empty());
    }
}
