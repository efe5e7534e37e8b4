use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// `|den(s)|` below this is treated as a pole hit.
pub const POLE_FLOOR: f64 = 1e-300;

/// Relative distance under which two roots count as shared.
pub const ROOT_PAIRING_TOLERANCE: f64 = 1e-8;

/// `P(s) = e^{-sT} q(s) / p(s)` with real `q`, `p` and `T >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayRationalPlant {
    delay: f64,
    numerator: Polynomial,
    denominator: Polynomial,
}

impl DelayRationalPlant {
    /// Validates every plant invariant and reports all violations at once.
    pub fn new(delay: f64, numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        let mut violations = Vec::new();
        if !delay.is_finite() || delay < 0.0 {
            violations.push(format!("delay must be a finite nonnegative number, got {delay}"));
        }
        if denominator.is_zero() {
            violations.push("denominator identically zero".to_string());
        } else if numerator.degree() > denominator.degree() && !numerator.is_zero() {
            violations.push(format!(
                "improper plant: numerator degree {} exceeds denominator degree {}",
                numerator.degree(),
                denominator.degree()
            ));
        }
        if !denominator.is_zero() && !numerator.is_zero() {
            match common_roots(&numerator, &denominator) {
                Ok(shared) => {
                    for root in shared {
                        violations.push(format!("common root at {}", format_root(root)));
                    }
                }
                Err(e) => violations.push(e.to_string()),
            }
        }
        if violations.is_empty() {
            Ok(Self { delay, numerator, denominator })
        } else {
            Err(Error::InvalidPlant(violations))
        }
    }

    /// Delay-free rational plant.
    pub fn rational(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        Self::new(0.0, numerator, denominator)
    }

    /// Builds from ascending coefficient lists.
    pub fn from_coeffs(delay: f64, num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(delay, Polynomial::new(num.to_vec())?, Polynomial::new(den.to_vec())?)
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    /// `e^{-sT} q(s) / p(s)`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let den = self.denominator.eval(s);
        if den.norm() < POLE_FLOOR {
            return Err(Error::PoleEvaluation { re: s.re, im: s.im, modulus: den.norm() });
        }
        Ok(delay_factor(self.delay, s) * self.numerator.eval(s) / den)
    }
}

/// `e^{-s tau}`, exactly one when `tau == 0`.
pub fn delay_factor(tau: f64, s: Complex64) -> Complex64 {
    if tau == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (-s * tau).exp()
    }
}

/// Pairs of roots (one from each polynomial) closer than the pairing tolerance.
pub fn common_roots(a: &Polynomial, b: &Polynomial) -> Result<Vec<Complex64>> {
    let ra = a.roots()?;
    let rb = b.roots()?;
    let mut shared = Vec::new();
    for &x in &ra {
        if rb
            .iter()
            .any(|&y| (x - y).norm() < ROOT_PAIRING_TOLERANCE * (1.0 + x.norm()))
        {
            shared.push(x);
        }
    }
    Ok(shared)
}

fn format_root(z: Complex64) -> String {
    let tidy = |x: f64| {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    };
    if z.im.abs() <= ROOT_PAIRING_TOLERANCE * (1.0 + z.norm()) {
        tidy(z.re)
    } else {
        format!("{}{}{}i", tidy(z.re), if z.im < 0.0 { "-" } else { "+" }, tidy(z.im.abs()))
    }
}
