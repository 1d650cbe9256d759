use crate::error::{Error, Result};

/// Largest deviation `|b_i - v_i|` that can survive domination by truth:
/// `4 (1-δ) n² γ / δ`.
pub fn eta_bound(n: usize, delta: f64, gamma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("need at least one agent"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("eta bound needs delta in (0, 1], got {delta}")));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    let n = n as f64;
    Ok(4.0 * (1.0 - delta) * n * n * gamma / delta)
}

/// Externality level below which the ER-VCG guarantee holds:
/// `ε δ / (8 (1-δ)² n³)`.
pub fn gamma_threshold(n: usize, delta: f64, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("need at least one agent"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("gamma threshold needs delta in (0, 1), got {delta}")));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let n = n as f64;
    Ok(epsilon * delta / (8.0 * (1.0 - delta).powi(2) * n.powi(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eta_examples() {
        assert_abs_diff_eq!(eta_bound(2, 0.5, 0.001).unwrap(), 0.016, epsilon = 1e-15);
        assert_abs_diff_eq!(eta_bound(2, 0.5, 0.0014).unwrap(), 0.0224, epsilon = 1e-15);
        assert_eq!(eta_bound(5, 0.3, 0.0).unwrap(), 0.0);
        assert_eq!(eta_bound(2, 1.0, 0.3).unwrap(), 0.0);
        assert!(eta_bound(2, 0.0, 0.1).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_abs_diff_eq!(gamma_threshold(2, 0.5, 0.05).unwrap(), 0.0015625, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma_threshold(2, 0.5, 0.1).unwrap(), 0.003125, epsilon = 1e-15);
        assert_eq!(gamma_threshold(3, 0.5, 0.0).unwrap(), 0.0);
        assert!(gamma_threshold(2, 0.0, 0.1).is_err());
        assert!(gamma_threshold(2, 1.0, 0.1).is_err());
    }
}
