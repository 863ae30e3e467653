//! Central differences with one Richardson step.

/// Step used for a parameter of magnitude `x`.
pub fn default_step(x: f64) -> f64 {
    (x.abs() * 1e-6).max(1e-6)
}

/// First derivative of `f` at `x`: central difference at `h` and `h/2`,
/// combined to cancel the leading error term.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let coarse = d(h);
    let fine = d(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Second derivative with the same extrapolation.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let fx = f(x);
    let d2 = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    let coarse = d2(h);
    let fine = d2(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_derivatives() {
        let d = derivative(f64::exp, 1.0, 1e-3);
        assert!((d - 1f64.exp()).abs() < 1e-10);
        let d2 = second_derivative(f64::exp, 1.0, 1e-2);
        assert!((d2 - 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn step_floor() {
        assert_eq!(default_step(0.0), 1e-6);
        assert_eq!(default_step(1e3), 1e-3);
    }
}
