//! A probability carried together with its complement.
//!
//! Survival probabilities close to one (and cdf values close to zero) lose
//! all relative precision once stored as a single `f64`. Every composition in
//! this crate passes both halves so that `1 - q(u)` and `q'(u)` stay accurate
//! as `u -> 1`.

/// A value `p` in `[0, 1]` together with `1 - p`, each computed accurately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitValue {
    value: f64,
    complement: f64,
}

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue { value: 0.0, complement: 1.0 };
    pub const ONE: UnitValue = UnitValue { value: 1.0, complement: 0.0 };

    /// Trusts the caller that both halves are accurate and sum to one.
    pub fn new(value: f64, complement: f64) -> Self {
        UnitValue { value, complement }
    }

    pub fn from_value(value: f64) -> Self {
        UnitValue { value, complement: 1.0 - value }
    }

    pub fn from_complement(complement: f64) -> Self {
        UnitValue { value: 1.0 - complement, complement }
    }

    /// Builds the value `1 - exp(ln_complement)`.
    pub fn from_ln_complement(ln_complement: f64) -> Self {
        UnitValue { value: -ln_complement.exp_m1(), complement: ln_complement.exp() }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn complement(&self) -> f64 {
        self.complement
    }

    pub fn flip(&self) -> Self {
        UnitValue { value: self.complement, complement: self.value }
    }

    pub fn ln_value(&self) -> f64 {
        if self.value < 0.5 {
            self.value.ln()
        } else {
            (-self.complement).ln_1p()
        }
    }

    pub fn ln_complement(&self) -> f64 {
        self.flip().ln_value()
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.value) && (0.0..=1.0).contains(&self.complement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_tiny_complement() {
        let u = UnitValue::from_ln_complement(-40.0);
        assert_eq!(u.value(), 1.0);
        assert!((u.complement() - (-40.0f64).exp()).abs() < 1e-30);
        assert!((u.ln_value() + (-40.0f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn flip_swaps_halves() {
        let u = UnitValue::from_value(0.25);
        assert_eq!(u.flip().value(), 0.75);
        assert_eq!(u.flip().complement(), 0.25);
    }
}
