//! Steady-state alpha-beta (two-state Kalman) baseline.

use super::TransferFunction;

/// Steady-state alpha-beta gains from the tracking index
/// `lambda = ts^2 * sigma_q / sigma_r`.
pub fn kalata_gains(tracking_index: f64) -> (f64, f64) {
    let l = tracking_index;
    let r = (4.0 + l - (8.0 * l + l * l).sqrt()) / 4.0;
    let alpha = 1.0 - r * r;
    let beta = 2.0 * (2.0 - alpha) - 4.0 * (1.0 - alpha).sqrt();
    (alpha, beta)
}

/// Transfer function of an alpha-beta tracker whose output is the position
/// estimate lagged by `q` samples.
pub fn alpha_beta_tf(alpha: f64, beta: f64, q: i32) -> TransferFunction {
    let q = q as f64;
    TransferFunction {
        b: vec![alpha - beta * q, beta * (1.0 + q) - alpha, 0.0],
        a: vec![1.0, alpha + beta - 2.0, 1.0 - alpha],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kalata_table_value() {
        let (a, b) = kalata_gains(0.0016 * 62.5 / 1.0);
        assert!((a - 0.36).abs() < 1e-12, "{a}");
        assert!((b - 0.08).abs() < 1e-12, "{b}");
    }

    #[test]
    fn kalata_unit_index() {
        let (a, b) = kalata_gains(1.0);
        assert!((a - 0.75).abs() < 1e-12);
        assert!((b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kalata_vanishing_index() {
        let (a, b) = kalata_gains(1e-12);
        assert!(a < 1e-5 && b < 1e-10 && a >= 0.0 && b >= 0.0);
    }

    #[test]
    fn kalata_identities() {
        for &l in &[1e-3, 0.05, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let (a, b) = kalata_gains(l);
            assert!(
                (l * l - b * b / (1.0 - a)).abs() <= 1e-12 * (1.0 + l * l),
                "{l}"
            );
            let from_alpha = 2.0 * (2.0 - a) - 4.0 * (1.0 - a).sqrt();
            assert!((b - from_alpha).abs() <= 1e-12);
        }
    }

    #[test]
    fn alpha_beta_examples() {
        let tf = alpha_beta_tf(0.36, 0.08, 2);
        let b = [0.2, -0.12, 0.0];
        let a = [1.0, -1.56, 0.64];
        for i in 0..3 {
            assert!((tf.b[i] - b[i]).abs() < 1e-15);
            assert!((tf.a[i] - a[i]).abs() < 1e-15);
        }
        let tf = alpha_beta_tf(0.5, 0.2, 0);
        assert_eq!(tf.b, vec![0.5, 0.2 - 0.5, 0.0]);
    }

    #[test]
    fn alpha_beta_poles_share_radius() {
        let tf = alpha_beta_tf(0.36, 0.08, 2);
        // Complex-conjugate pair, so |z|^2 equals the constant coefficient.
        let disc = tf.a[1] * tf.a[1] - 4.0 * tf.a[2];
        assert!(disc < 0.0);
        assert!((tf.a[2].sqrt() - 0.8).abs() < 1e-12);
    }
}
