//! Thin wrappers around the special functions the crate leans on, plus an
//! inverse regularized incomplete beta that statrs does not expose directly.
//!
//! `ln_gamma` and `beta_reg` come from statrs (Lanczos-grade accuracy, which
//! the log-gamma prefactors of the quadrature module require).

pub use statrs::function::beta::ln_beta;
pub use statrs::function::gamma::{digamma, ln_gamma};

/// Regularized incomplete beta I_x(a, b), clamped to [0, 1].
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        statrs::function::beta::beta_reg(a, b, x).clamp(0.0, 1.0)
    }
}

/// Log-density of Beta(a, b) at x in (0, 1).
fn beta_ln_pdf(a: f64, b: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)
}

/// Inverse of the regularized incomplete beta: returns x with I_x(a, b) = p.
///
/// Newton iteration safeguarded by a shrinking bracket. `hint` (if finite and
/// inside the current bracket) seeds the iteration, which makes sweeps over
/// sorted probabilities cheap.
pub fn inv_beta_reg(a: f64, b: f64, p: f64, hint: Option<f64>) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut x = match hint {
        Some(h) if h > 0.0 && h < 1.0 => h,
        // Crude but serviceable starting point: match the first moment, then
        // let the bracket do the rest.
        _ => (a / (a + b)).clamp(1e-12, 1.0 - 1e-12),
    };

    for _ in 0..100 {
        let f = beta_reg(a, b, x) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f.abs() <= 1e-14 {
            break;
        }
        let ln_pdf = beta_ln_pdf(a, b, x);
        let mut next = if ln_pdf > -700.0 {
            x - f * (-ln_pdf).exp()
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inv_beta_reg_uniform_is_identity() {
        for &p in &[1e-9, 0.1, 0.25, 0.5, 0.9, 1.0 - 1e-9] {
            assert_relative_eq!(inv_beta_reg(1.0, 1.0, p, None), p, max_relative = 1e-10);
        }
    }

    #[test]
    fn inv_beta_reg_roundtrips() {
        let cases = [(0.5, 0.5), (2.0, 3.0), (5.0, 1.0), (40.0, 7.5), (5000.0, 5000.0)];
        for &(a, b) in &cases {
            for &p in &[1e-6, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-6] {
                let x = inv_beta_reg(a, b, p, None);
                assert!(x > 0.0 && x < 1.0, "({a},{b},{p}) gave {x}");
                assert_relative_eq!(beta_reg(a, b, x), p, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn beta_one_two_quantile_closed_form() {
        // Beta(1,2) cdf is 2x - x^2, so the quantile is 1 - sqrt(1 - p).
        for &p in &[0.1_f64, 0.25, 0.5, 0.75] {
            let expect = 1.0 - (1.0 - p).sqrt();
            assert_relative_eq!(inv_beta_reg(1.0, 2.0, p, None), expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn digamma_known_values() {
        // psi(1) = -EulerGamma, psi(2) = 1 - EulerGamma.
        let euler = 0.577_215_664_901_532_9;
        assert_relative_eq!(digamma(1.0), -euler, epsilon = 1e-12);
        assert_relative_eq!(digamma(2.0), 1.0 - euler, epsilon = 1e-12);
    }
}
