use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative magnitude below which trailing coefficients are dropped.
pub const TRIM_TOLERANCE: f64 = 1e-14;

/// Dense real polynomial in `s`, coefficients in ascending degree.
///
/// The zero polynomial is stored as `[0.0]` and has degree 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients and strips negligible
    /// leading terms. Non-finite coefficients are rejected.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "polynomial coefficient {c} is not finite"
            )));
        }
        Ok(Self::from_finite(coeffs))
    }

    pub(crate) fn from_finite(mut coeffs: Vec<f64>) -> Self {
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1].abs() <= TRIM_TOLERANCE * scale {
            coeffs.pop();
        }
        if coeffs.is_empty() || scale == 0.0 {
            coeffs = vec![0.0];
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_finite(vec![c])
    }

    /// `s - root` for a real root.
    pub fn linear_factor(root: f64) -> Self {
        Self::from_finite(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut iter = self.coeffs.iter().rev();
        let mut acc = Complex64::new(*iter.next().unwrap_or(&0.0), 0.0);
        for &c in iter {
            acc = acc * s + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self::from_finite(coeffs)
    }

    /// The polynomial `s -> p(-s)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
            .collect();
        Self { coeffs }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_finite(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Polynomial with the given roots, scaled by `leading`. Complex roots are
    /// expected in conjugate pairs; the imaginary residue is discarded.
    pub fn from_roots(roots: &[Complex64], leading: f64) -> Self {
        let mut acc = vec![Complex64::new(leading, 0.0)];
        for &root in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (k, &c) in acc.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * root;
            }
            acc = next;
        }
        Self::from_finite(acc.into_iter().map(|c| c.re).collect())
    }

    /// All complex roots, from the eigenvalues of the companion matrix with
    /// one Newton polish step per root.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::RootFinding("zero polynomial has no finite root set".into()));
        }
        let n = self.degree();
        match n {
            0 => return Ok(Vec::new()),
            1 => return Ok(vec![Complex64::new(-self.coeffs[0] / self.coeffs[1], 0.0)]),
            _ => {}
        }
        let lead = self.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let eig = companion.complex_eigenvalues();
        let deriv = self.derivative();
        let roots: Vec<Complex64> = eig
            .iter()
            .map(|&z| {
                let z = Complex64::new(z.re, z.im);
                let dp = deriv.eval(z);
                if dp.norm() == 0.0 {
                    return z;
                }
                let step = self.eval(z) / dp;
                let polished = z - step;
                if polished.is_finite() && self.eval(polished).norm() <= self.eval(z).norm() {
                    polished
                } else {
                    z
                }
            })
            .collect();
        if roots.iter().any(|z| !z.is_finite()) {
            return Err(Error::RootFinding(format!(
                "non-finite eigenvalue for polynomial of degree {n}"
            )));
        }
        Ok(roots)
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + rhs.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Polynomial::from_finite(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_finite(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && !(first && k == 0) {
                continue;
            }
            let sign = if c < 0.0 { "-" } else if first { "" } else { "+" };
            if !first {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            match k {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}s", c.abs())?,
                _ => write!(f, "{}s^{k}", c.abs())?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_evaluates_exactly() {
        let p = Polynomial::constant(1.0);
        assert_eq!(p.eval(c(3.0, 4.0)), c(1.0, 0.0));
    }

    #[test]
    fn linear_root_evaluates_to_zero() {
        let p = Polynomial::linear_factor(2.0);
        assert_eq!(p.eval(c(2.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn quadratic_root_at_i() {
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval(c(0.0, 1.0)), c(0.0, 0.0));
    }

    #[test]
    fn real_point_has_zero_imaginary_part() {
        let p = Polynomial::new(vec![0.3, -1.7, 2.2, 0.9]).unwrap();
        let v = p.eval(c(-1.37, 0.0));
        assert_eq!(v.im, 0.0);
        assert!((v.re - p.eval_real(-1.37)).abs() < 1e-15);
    }

    #[test]
    fn trailing_noise_is_trimmed() {
        let p = Polynomial::new(vec![1.0, 2.0, 1e-16]).unwrap();
        assert_eq!(p.degree(), 1);
        let z = Polynomial::new(vec![0.0, 0.0]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Polynomial::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn reflect_and_multiply() {
        // (s - 2)(-s - 2) = 4 - s^2
        let p = Polynomial::linear_factor(2.0);
        let r = &p * &p.reflect();
        assert_eq!(r.coeffs(), &[4.0, 0.0, -1.0]);
    }

    #[test]
    fn roots_of_cubic() {
        // (s - 1)(s + 2)(s - 3)
        let p = &(&Polynomial::linear_factor(1.0) * &Polynomial::linear_factor(-2.0))
            * &Polynomial::linear_factor(3.0);
        let mut roots: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        for (got, want) in roots.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_roots_come_in_pairs() {
        let p = Polynomial::new(vec![5.0, 2.0, 1.0]).unwrap(); // roots -1 ± 2i
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 2);
        for z in roots {
            assert!((z.re + 1.0).abs() < 1e-12);
            assert!((z.im.abs() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn from_roots_round_trip() {
        let roots = [c(-1.0, 2.0), c(-1.0, -2.0), c(-0.5, 0.0)];
        let p = Polynomial::from_roots(&roots, 2.0);
        assert_eq!(p.degree(), 3);
        for z in roots {
            assert!(p.eval(z).norm() < 1e-12);
        }
        assert_eq!(p.leading(), 2.0);
    }

    #[test]
    fn display_is_readable() {
        let p = Polynomial::new(vec![-3.0, 1.0]).unwrap();
        assert_eq!(p.to_string(), "1s - 3");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
