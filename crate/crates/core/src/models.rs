//! Deterministic process models and the augmented process they form.
//!
//! The augmented state is laid out as `[target | maneuver | interference]`.
//! Every other module indexes into that layout, so the order is fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Smallest admissible maneuver rate is `MIN_RATE_TS / ts`; below this
/// `sin(omega * ts) / omega` becomes ill-conditioned.
pub const MIN_RATE_TS: f64 = 1e-9;

/// A filter design request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Order of the integrating target model.
    pub k_tgt: usize,
    /// Number of undamped oscillator pairs (0 or 1).
    pub k_man: usize,
    /// Order of the Nyquist interference model.
    pub k_int: usize,
    /// Sampling period in seconds.
    pub ts: f64,
    /// Maneuver turn rate in rad/s; required when `k_man == 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Repeated observer pole radius.
    pub pole: f64,
    /// Output lag in samples (negative for prediction).
    pub q: i32,
    /// Derivative order of the output.
    #[serde(default)]
    pub d: u32,
}

impl ModelSpec {
    /// Total state dimension.
    pub fn order(&self) -> usize {
        self.k_tgt + 2 * self.k_man + self.k_int
    }

    /// Maneuver frequency in radians per sample, if a maneuver block is present.
    pub fn maneuver_frequency(&self) -> Option<f64> {
        (self.k_man == 1).then(|| self.omega.unwrap_or(0.0) * self.ts)
    }

    /// Checks the structural fields needed to build the process model.
    pub fn validate_structure(&self) -> Result<()> {
        if self.order() == 0 {
            return Err(Error::EmptyModel);
        }
        if self.k_tgt < 1 {
            return Err(Error::InvalidOrder {
                block: "target",
                order: self.k_tgt,
            });
        }
        if self.k_man > 1 {
            return Err(Error::TooManyManeuverPairs(self.k_man));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::InvalidSamplingPeriod(self.ts));
        }
        if self.k_man == 1 {
            let omega = self.omega.unwrap_or(0.0);
            check_rate(omega, self.ts)?;
        }
        Ok(())
    }

    /// Full validation, including the observer pole and output selector.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if !(0.0..1.0).contains(&self.pole) {
            return Err(Error::UnstableRequest(self.pole));
        }
        if self.d as usize >= self.k_tgt {
            return Err(Error::DerivativeTooHigh {
                d: self.d,
                k_tgt: self.k_tgt,
            });
        }
        Ok(())
    }

    pub(crate) fn omega_or_zero(&self) -> f64 {
        self.omega.unwrap_or(0.0)
    }
}

/// Sizes of the three state blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDims {
    pub k_tgt: usize,
    pub k_man_states: usize,
    pub k_int: usize,
}

impl BlockDims {
    pub fn total(&self) -> usize {
        self.k_tgt + self.k_man_states + self.k_int
    }

    pub fn maneuver_offset(&self) -> usize {
        self.k_tgt
    }

    pub fn interference_offset(&self) -> usize {
        self.k_tgt + self.k_man_states
    }
}

/// The augmented discrete-time process.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem {
    /// Block-diagonal state-transition matrix.
    pub g: Matrix,
    /// Process output row.
    pub c_prc: Vec<f64>,
    /// One-step-ahead predictor row, `c_prc * g`.
    pub c_prd: Vec<f64>,
    pub dims: BlockDims,
}

/// Output selector of the observer.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub c_obs: Vec<f64>,
    pub lag_q: i32,
    pub deriv_d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalBlock {
    Target,
    Maneuver,
}

fn check_rate(omega: f64, ts: f64) -> Result<()> {
    let min = MIN_RATE_TS / ts;
    if !(omega.is_finite() && omega > min) {
        return Err(Error::InvalidRate { omega, ts, min });
    }
    Ok(())
}

/// Upper-triangular Toeplitz transition of a `k`-th order integrator over
/// an interval `t`: the `j`-th superdiagonal holds `t^j / j!`.
fn integrator_transition(k: usize, t: f64) -> Matrix {
    let mut coef = vec![1.0; k];
    for j in 1..k {
        coef[j] = coef[j - 1] * t / j as f64;
    }
    Matrix::from_fn(k, k, |i, j| if j >= i { coef[j - i] } else { 0.0 })
}

/// Transition of the undamped oscillator over an interval `t`.
fn oscillator_transition(omega: f64, t: f64) -> Matrix {
    let (s, c) = (omega * t).sin_cos();
    Matrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) | (1, 1) => c,
        (0, 1) => s / omega,
        _ => -omega * s,
    })
}

pub fn build_target_discrete(k_tgt: usize, ts: f64) -> Result<Matrix> {
    if k_tgt < 1 {
        return Err(Error::InvalidOrder {
            block: "target",
            order: k_tgt,
        });
    }
    Ok(integrator_transition(k_tgt, ts))
}

pub fn build_maneuver_discrete(omega: f64, ts: f64) -> Result<Matrix> {
    check_rate(omega, ts)?;
    Ok(oscillator_transition(omega, ts))
}

/// Interference transition: the negated integrator, all poles at `z = -1`.
pub fn build_interference_discrete(k_int: usize, ts: f64) -> Result<Matrix> {
    if k_int < 1 {
        return Err(Error::InvalidOrder {
            block: "interference",
            order: k_int,
        });
    }
    Ok(integrator_transition(k_int, ts).scale(-1.0))
}

/// Continuous-time state matrix of the target model (ones on the first superdiagonal).
pub fn target_state_matrix(k_tgt: usize) -> Matrix {
    Matrix::from_fn(k_tgt, k_tgt, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
}

/// Continuous-time state matrix of the oscillator, `[[0, 1], [-omega^2, 0]]`.
pub fn maneuver_state_matrix(omega: f64) -> Matrix {
    Matrix::from_rows(&[vec![0.0, 1.0], vec![-omega * omega, 0.0]]).expect("2x2")
}

pub fn augment_process(spec: &ModelSpec) -> Result<DiscreteSystem> {
    spec.validate_structure()?;
    let dims = BlockDims {
        k_tgt: spec.k_tgt,
        k_man_states: 2 * spec.k_man,
        k_int: spec.k_int,
    };
    let mut blocks = vec![build_target_discrete(spec.k_tgt, spec.ts)?];
    if spec.k_man == 1 {
        blocks.push(build_maneuver_discrete(spec.omega_or_zero(), spec.ts)?);
    }
    if spec.k_int > 0 {
        blocks.push(build_interference_discrete(spec.k_int, spec.ts)?);
    }
    let g = Matrix::block_diagonal(&blocks);

    let mut c_prc = vec![0.0; dims.total()];
    c_prc[0] = 1.0;
    if dims.k_man_states > 0 {
        c_prc[dims.maneuver_offset()] = 1.0;
    }
    if dims.k_int > 0 {
        c_prc[dims.interference_offset()] = 1.0;
    }
    let c_prd = g.left_mul_vec(&c_prc);
    Ok(DiscreteSystem {
        g,
        c_prc,
        c_prd,
        dims,
    })
}

/// Transition of a signal block over `-q * ts` seconds, i.e. the `q`-th
/// power of the block's inverse.
pub fn signal_shift_matrix(block: SignalBlock, q: i32, spec: &ModelSpec) -> Result<Matrix> {
    let t = -(q as f64) * spec.ts;
    match block {
        SignalBlock::Target => {
            if spec.k_tgt < 1 {
                return Err(Error::InvalidOrder {
                    block: "target",
                    order: spec.k_tgt,
                });
            }
            Ok(integrator_transition(spec.k_tgt, t))
        }
        SignalBlock::Maneuver => {
            if spec.k_man != 1 {
                return Err(Error::InvalidConfig("spec has no maneuver block".into()));
            }
            let omega = spec.omega_or_zero();
            check_rate(omega, spec.ts)?;
            Ok(oscillator_transition(omega, t))
        }
    }
}

/// Observer output row: lagged (by `q`) and differentiated (`d` times)
/// selectors over the signal blocks, zero over interference.
pub fn output_row(spec: &ModelSpec) -> Result<OutputRow> {
    spec.validate_structure()?;
    if spec.d as usize >= spec.k_tgt {
        return Err(Error::DerivativeTooHigh {
            d: spec.d,
            k_tgt: spec.k_tgt,
        });
    }
    let mut selector = vec![0.0; spec.k_tgt];
    selector[0] = 1.0;
    let tgt_op = signal_shift_matrix(SignalBlock::Target, spec.q, spec)?
        .matmul(&target_state_matrix(spec.k_tgt).pow(spec.d))?;
    let mut c_obs = tgt_op.left_mul_vec(&selector);

    if spec.k_man == 1 {
        let man_op = signal_shift_matrix(SignalBlock::Maneuver, spec.q, spec)?
            .matmul(&maneuver_state_matrix(spec.omega_or_zero()).pow(spec.d))?;
        c_obs.extend(man_op.left_mul_vec(&[1.0, 0.0]));
    }
    c_obs.extend(std::iter::repeat_n(0.0, spec.k_int));
    Ok(OutputRow {
        c_obs,
        lag_q: spec.q,
        deriv_d: spec.d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k_tgt: usize, k_man: usize, k_int: usize) -> ModelSpec {
        ModelSpec {
            k_tgt,
            k_man,
            k_int,
            ts: 0.04,
            omega: (k_man == 1).then_some(2.5),
            pole: 0.8,
            q: 2,
            d: 0,
        }
    }

    fn assert_close(m: &Matrix, rows: &[Vec<f64>], tol: f64) {
        let e = Matrix::from_rows(rows).unwrap();
        assert!(m.max_abs_diff(&e) <= tol, "{m:?} vs {e:?}");
    }

    #[test]
    fn target_block_examples() {
        assert_close(
            &build_target_discrete(2, 0.04).unwrap(),
            &[vec![1.0, 0.04], vec![0.0, 1.0]],
            0.0,
        );
        assert_close(&build_target_discrete(1, 0.5).unwrap(), &[vec![1.0]], 0.0);
        assert_close(
            &build_target_discrete(3, 0.5).unwrap(),
            &[
                vec![1.0, 0.5, 0.125],
                vec![0.0, 1.0, 0.5],
                vec![0.0, 0.0, 1.0],
            ],
            0.0,
        );
        assert!(matches!(
            build_target_discrete(0, 0.04),
            Err(Error::InvalidOrder { .. })
        ));
    }

    #[test]
    fn maneuver_block_examples() {
        let g = build_maneuver_discrete(2.5, 0.04).unwrap();
        let (s, c) = 0.1f64.sin_cos();
        assert_close(&g, &[vec![c, s / 2.5], vec![-2.5 * s, c]], 1e-15);
        assert!((g[(0, 0)] - 0.995004).abs() < 1e-6);
        assert!((g[(0, 1)] - 0.0399334).abs() < 1e-7);
        assert!((g[(1, 0)] + 0.249584).abs() < 1e-6);
        let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        assert!((det - 1.0).abs() < 1e-12);

        let quarter = build_maneuver_discrete(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_close(&quarter, &[vec![0.0, 1.0], vec![-1.0, 0.0]], 1e-15);

        assert!(matches!(
            build_maneuver_discrete(0.0, 0.04),
            Err(Error::InvalidRate { .. })
        ));
        assert!(build_maneuver_discrete(-1.0, 0.04).is_err());
        assert!(build_maneuver_discrete(1e-9, 0.04).is_err());
    }

    #[test]
    fn maneuver_block_tends_to_integrator() {
        let g = build_maneuver_discrete(1e-6, 0.04).unwrap();
        let t = build_target_discrete(2, 0.04).unwrap();
        assert!(g.max_abs_diff(&t) <= 1e-6);
    }

    #[test]
    fn interference_block_examples() {
        assert_close(
            &build_interference_discrete(1, 0.04).unwrap(),
            &[vec![-1.0]],
            0.0,
        );
        assert_close(
            &build_interference_discrete(2, 0.04).unwrap(),
            &[vec![-1.0, -0.04], vec![0.0, -1.0]],
            0.0,
        );
        assert_close(
            &build_interference_discrete(1, 0.5).unwrap(),
            &[vec![-1.0]],
            0.0,
        );
        assert!(build_interference_discrete(0, 0.5).is_err());
        // G_int = -G_tgt entrywise when the orders agree.
        for k in 1..5 {
            let t = build_target_discrete(k, 0.07).unwrap();
            let i = build_interference_discrete(k, 0.07).unwrap();
            assert_eq!(i, t.scale(-1.0));
        }
    }

    #[test]
    fn augmented_process_worked_example() {
        let sys = augment_process(&spec(2, 0, 1)).unwrap();
        assert_close(
            &sys.g,
            &[
                vec![1.0, 0.04, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, -1.0],
            ],
            0.0,
        );
        assert_eq!(sys.c_prc, vec![1.0, 0.0, 1.0]);
        assert_eq!(sys.c_prd, vec![1.0, 0.04, -1.0]);
        assert_eq!(sys.dims.total(), 3);
    }

    #[test]
    fn augmented_process_with_maneuver() {
        let sys = augment_process(&spec(2, 1, 1)).unwrap();
        assert_eq!(sys.g.rows(), 5);
        assert_eq!(sys.c_prc, vec![1.0, 0.0, 1.0, 0.0, 1.0]);
        let man = build_maneuver_discrete(2.5, 0.04).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(sys.g[(2 + i, 2 + j)], man[(i, j)]);
            }
        }
        assert_eq!(sys.g[(4, 4)], -1.0);
        assert_eq!(sys.g[(1, 2)], 0.0);
        assert_eq!(sys.c_prd, sys.g.left_mul_vec(&sys.c_prc));
    }

    #[test]
    fn scalar_process() {
        let sys = augment_process(&spec(1, 0, 0)).unwrap();
        assert_eq!(sys.g.to_rows(), vec![vec![1.0]]);
        assert_eq!(sys.c_prc, vec![1.0]);
        assert_eq!(sys.c_prd, vec![1.0]);
    }

    #[test]
    fn augment_rejects_bad_specs() {
        let mut s = spec(0, 0, 0);
        assert_eq!(augment_process(&s), Err(Error::EmptyModel));
        s.k_int = 1;
        assert!(matches!(
            augment_process(&s),
            Err(Error::InvalidOrder { .. })
        ));
        let mut s = spec(2, 2, 0);
        s.omega = Some(2.5);
        assert_eq!(augment_process(&s), Err(Error::TooManyManeuverPairs(2)));
        let mut s = spec(2, 1, 0);
        s.omega = None;
        assert!(matches!(
            augment_process(&s),
            Err(Error::InvalidRate { .. })
        ));
        let mut s = spec(2, 0, 0);
        s.ts = 0.0;
        assert!(matches!(
            augment_process(&s),
            Err(Error::InvalidSamplingPeriod(_))
        ));
    }

    #[test]
    fn signal_shift_examples() {
        let s = spec(2, 1, 1);
        let t = signal_shift_matrix(SignalBlock::Target, 2, &s).unwrap();
        assert_close(&t, &[vec![1.0, -0.08], vec![0.0, 1.0]], 1e-15);
        for block in [SignalBlock::Target, SignalBlock::Maneuver] {
            let m = signal_shift_matrix(block, 0, &s).unwrap();
            assert_eq!(m, Matrix::identity(m.rows()));
        }
        let m = signal_shift_matrix(SignalBlock::Maneuver, 1, &s).unwrap();
        let inv = build_maneuver_discrete(2.5, 0.04)
            .unwrap()
            .inverse()
            .unwrap();
        assert!(m.max_abs_diff(&inv) < 1e-14);
        let (sn, c) = (-0.1f64).sin_cos();
        assert_close(&m, &[vec![c, sn / 2.5], vec![-2.5 * sn, c]], 1e-15);

        assert!(signal_shift_matrix(SignalBlock::Maneuver, 1, &spec(2, 0, 1)).is_err());
    }

    #[test]
    fn signal_shift_equals_inverse_power() {
        let s = ModelSpec {
            k_tgt: 3,
            ..spec(3, 1, 0)
        };
        let g_t = build_target_discrete(3, s.ts).unwrap().inverse().unwrap();
        let g_m = build_maneuver_discrete(2.5, s.ts)
            .unwrap()
            .inverse()
            .unwrap();
        for q in 0..6u32 {
            let t = signal_shift_matrix(SignalBlock::Target, q as i32, &s).unwrap();
            assert!(t.max_abs_diff(&g_t.pow(q)) < 1e-10);
            let m = signal_shift_matrix(SignalBlock::Maneuver, q as i32, &s).unwrap();
            assert!(m.max_abs_diff(&g_m.pow(q)) < 1e-10);
        }
    }

    #[test]
    fn output_row_examples() {
        assert_eq!(
            output_row(&spec(2, 0, 1)).unwrap().c_obs,
            vec![1.0, -0.08, 0.0]
        );

        let mut s = spec(2, 1, 2);
        s.q = 0;
        assert_eq!(
            output_row(&s).unwrap().c_obs,
            vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        );

        let mut s = spec(2, 0, 1);
        s.q = 0;
        s.d = 1;
        let row = output_row(&s).unwrap();
        assert_eq!(row.c_obs, vec![0.0, 1.0, 0.0]);
        assert_eq!((row.lag_q, row.deriv_d), (0, 1));

        s.d = 2;
        assert_eq!(
            output_row(&s),
            Err(Error::DerivativeTooHigh { d: 2, k_tgt: 2 })
        );
    }

    #[test]
    fn output_row_zero_over_interference() {
        let mut s = spec(3, 1, 2);
        s.q = -3;
        s.d = 2;
        let row = output_row(&s).unwrap();
        assert_eq!(row.c_obs.len(), 7);
        assert!(row.c_obs[5..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spec_json_defaults() {
        let s: ModelSpec =
            serde_json::from_str(r#"{"k_tgt":2,"k_man":0,"k_int":1,"ts":0.04,"pole":0.8,"q":2}"#)
                .unwrap();
        assert_eq!(s.d, 0);
        assert_eq!(s.omega, None);
        assert_eq!(s.order(), 3);
        s.validate().unwrap();

        let bad = ModelSpec {
            pole: 1.0,
            ..s.clone()
        };
        assert_eq!(bad.validate(), Err(Error::UnstableRequest(1.0)));
    }
}
