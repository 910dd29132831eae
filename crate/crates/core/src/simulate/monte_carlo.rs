use serde::{Deserialize, Serialize};

use super::filter::{run_tf_filter, InitPolicy};
use super::scenario::{gen_with_path, ScenarioConfig, TruthPath};
use crate::analysis::wrap_pi;
use crate::design::TransferFunction;
use crate::error::{Error, Result};

/// A coefficient-form filter with the lag its output is scored against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFilter {
    pub name: String,
    pub tf: TransferFunction,
    pub q: i32,
}

/// Errors at the last frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalErrors {
    /// Mean radial error about the orbit centre (scenario 2 only).
    pub eps_r: Option<f64>,
    /// Mean angular error in degrees (scenario 2 only).
    pub eps_theta_deg: Option<f64>,
    /// RMS distance error over repetitions.
    pub dist: f64,
    /// Standard error of `dist` (delta method; zero for one repetition).
    pub dist_se: f64,
}

/// One frame of the first repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub n: usize,
    pub truth_x: f64,
    pub truth_y: f64,
    pub meas_x: f64,
    pub meas_y: f64,
    pub est_x: f64,
    pub est_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub name: String,
    /// RMS distance error over all frames and repetitions.
    pub sigma_d: f64,
    pub terminal: TerminalErrors,
    /// Per-frame data of repetition 0, scored against the undelayed truth
    /// path (`truth_*`) so it can be overlaid directly.
    #[serde(skip)]
    pub frames: Vec<FrameRecord>,
}

/// Runs every filter over `n_rep` repetitions of `cfg`.
///
/// Both axes are filtered independently with step initialization from the
/// first measurement, and errors are taken against the truth at `n - q`.
pub fn mc_evaluate(
    cfg: &ScenarioConfig,
    filters: &[NamedFilter],
    n_rep: usize,
) -> Result<Vec<SimResult>> {
    cfg.validate()?;
    if n_rep == 0 {
        return Err(Error::InvalidConfig(
            "at least one repetition is required".into(),
        ));
    }
    let n_frm = cfg.n_frames;
    let path = TruthPath::new(cfg);
    let last = n_frm - 1;

    struct Acc {
        sq: f64,
        term_sq: f64,
        term_sq2: f64,
        eps_r: f64,
        eps_th: f64,
        frames: Vec<FrameRecord>,
    }
    let mut acc: Vec<Acc> = filters
        .iter()
        .map(|_| Acc {
            sq: 0.0,
            term_sq: 0.0,
            term_sq2: 0.0,
            eps_r: 0.0,
            eps_th: 0.0,
            frames: Vec::new(),
        })
        .collect();

    for rep in 0..n_rep {
        let data = gen_with_path(cfg, &path, rep as u64);
        for (f, a) in filters.iter().zip(acc.iter_mut()) {
            let ex = run_tf_filter(&f.tf, &data.meas[0], InitPolicy::Step)?;
            let ey = run_tf_filter(&f.tf, &data.meas[1], InitPolicy::Step)?;
            let mut rep_sq = 0.0;
            for n in 0..n_frm {
                let t = path.position(n as i64 - f.q as i64);
                rep_sq += (ex[n] - t[0]).powi(2) + (ey[n] - t[1]).powi(2);
            }
            a.sq += rep_sq;
            let t = path.position(last as i64 - f.q as i64);
            let d2 = (ex[last] - t[0]).powi(2) + (ey[last] - t[1]).powi(2);
            a.term_sq += d2;
            a.term_sq2 += d2 * d2;
            if cfg.id == 2 {
                a.eps_r += ex[last].hypot(ey[last]) - t[0].hypot(t[1]);
                a.eps_th += wrap_pi(ey[last].atan2(ex[last]) - t[1].atan2(t[0])).to_degrees();
            }
            if rep == 0 {
                a.frames = (0..n_frm)
                    .map(|n| FrameRecord {
                        n,
                        truth_x: data.truth[0][n],
                        truth_y: data.truth[1][n],
                        meas_x: data.meas[0][n],
                        meas_y: data.meas[1][n],
                        est_x: ex[n],
                        est_y: ey[n],
                    })
                    .collect();
            }
        }
    }

    let reps = n_rep as f64;
    Ok(filters
        .iter()
        .zip(acc)
        .map(|(f, a)| {
            let mean_d2 = a.term_sq / reps;
            let dist = mean_d2.sqrt();
            let dist_se = if n_rep > 1 && dist > 0.0 {
                let var_d2 = (a.term_sq2 / reps - mean_d2 * mean_d2).max(0.0) * reps / (reps - 1.0);
                (var_d2 / reps).sqrt() / (2.0 * dist)
            } else {
                0.0
            };
            let orbit = cfg.id == 2;
            SimResult {
                name: f.name.clone(),
                sigma_d: (a.sq / (reps * n_frm as f64)).sqrt(),
                terminal: TerminalErrors {
                    eps_r: orbit.then(|| a.eps_r / reps),
                    eps_theta_deg: orbit.then(|| a.eps_th / reps),
                    dist,
                    dist_se,
                },
                frames: a.frames,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(q: i32) -> NamedFilter {
        NamedFilter {
            name: "id".into(),
            tf: TransferFunction::identity(),
            q,
        }
    }

    #[test]
    fn identity_on_clean_line_has_no_error() {
        let cfg = ScenarioConfig {
            sigma_sns: Some(0.0),
            ..ScenarioConfig::scenario(3)
        };
        let r = mc_evaluate(&cfg, &[identity(0)], 3).unwrap();
        assert_eq!(r[0].sigma_d, 0.0);
        assert_eq!(r[0].terminal.dist, 0.0);
        assert!(r[0].terminal.eps_r.is_none());
    }

    #[test]
    fn identity_error_equals_noise() {
        let cfg = ScenarioConfig::scenario(3);
        let r = mc_evaluate(&cfg, &[identity(0)], 400).unwrap();
        // distance error of unit noise on two axes has RMS sqrt(2)
        assert!((r[0].sigma_d - 2f64.sqrt()).abs() < 0.01);
        let t = &r[0].terminal;
        assert!((t.dist - 2f64.sqrt()).abs() < 4.0 * t.dist_se, "{t:?}");
    }

    #[test]
    fn lagged_identity_on_circle() {
        // an identity filter scored against the truth two frames back sees
        // the chord of a 0.2 rad arc
        let cfg = ScenarioConfig::scenario(2);
        let r = mc_evaluate(&cfg, &[identity(2)], 1).unwrap();
        let chord = 20.0 * 0.1f64.sin();
        assert!((r[0].terminal.dist - chord).abs() < 1e-9);
        assert!((r[0].sigma_d - chord).abs() < 1e-9);
        assert!(r[0].terminal.eps_r.unwrap().abs() < 1e-9);
        assert!((r[0].terminal.eps_theta_deg.unwrap() - 0.2f64.to_degrees()).abs() < 1e-9);
    }

    #[test]
    fn deterministic_and_rejects_bad_input() {
        let cfg = ScenarioConfig::scenario(1);
        let a = mc_evaluate(&cfg, &[identity(0)], 2).unwrap();
        let b = mc_evaluate(&cfg, &[identity(0)], 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].frames.len(), 190);
        assert!(mc_evaluate(&cfg, &[identity(0)], 0).is_err());
        assert!(mc_evaluate(&ScenarioConfig::scenario(7), &[identity(0)], 1).is_err());
    }
}
