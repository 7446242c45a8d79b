//! Closed-form operating-point formulas.

use crate::error::Error;
use crate::Result;

/// Rule-of-thumb expected detections per frame when every active device is
/// independently detected with probability `q` in each of `t` slots:
/// `lambda_ra * (1 - (1 - q)^t)`.
pub fn model_lambda_out(q: f64, t: usize, lambda_ra: f64) -> f64 {
    lambda_ra * (1.0 - (1.0 - q).powi(t as i32))
}

/// Access probability meeting a delay target of `1/rho` at relative overhead
/// `theta`: `1 - (1 - rho)^(1 / (theta * lambda_in))`.
pub fn p_star(rho: f64, lambda_in: f64, theta: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::config(format!("rho must be in (0, 1), got {rho}")));
    }
    let slots = theta * lambda_in;
    if !(slots >= 1.0) {
        return Err(Error::config(format!(
            "theta * lambda_in must be >= 1, got {theta} * {lambda_in} = {slots}"
        )));
    }
    Ok(1.0 - (1.0 - rho).powf(1.0 / slots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn model_endpoints() {
        assert_relative_eq!(model_lambda_out(0.0, 10, 500.0), 0.0);
        assert_relative_eq!(model_lambda_out(1.0, 3, 500.0), 500.0);
    }

    #[test]
    fn model_at_paper_operating_point() {
        // Independent evaluation: 506 * (1 - (1 - p)^100) with
        // p = 1 - 0.01^(1/100), computed through logs.
        let p = 1.0 - (0.01f64.ln() / 100.0).exp();
        let expect = 506.0 * (1.0 - (100.0 * (1.0 - p).ln()).exp());
        assert_relative_eq!(model_lambda_out(p, 100, 506.0), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 500.94, max_relative = 1e-4);
        assert_relative_eq!(model_lambda_out(0.04501, 100, 506.0), 500.9, max_relative = 2e-4);
    }

    #[test]
    fn p_star_cases() {
        // theta * lambda_in = 1 makes the exponent 1, so p* = rho.
        assert_relative_eq!(p_star(0.3, 1.0, 1.0).unwrap(), 0.3, max_relative = 1e-12);
        // p* -> 0 as rho -> 0.
        assert!(p_star(1e-12, 500.0, 0.2).unwrap() < 1e-12);
        // Paper operating point: 1 - 0.01^(0.01) evaluated via exp/ln.
        let expect = 1.0 - (0.01f64.ln() * 0.01).exp();
        let got = p_star(0.99, 500.0, 0.2).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-12);
        assert_relative_eq!(got, 0.04501, max_relative = 1e-4);
    }

    #[test]
    fn p_star_domain_errors() {
        assert!(p_star(1.0, 500.0, 0.2).is_err());
        assert!(p_star(0.0, 500.0, 0.2).is_err());
        assert!(p_star(0.99, 500.0, 1e-9).is_err());
    }
}
