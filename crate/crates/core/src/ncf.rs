//! Normalized coprime factorization of delay-rational plants.
//!
//! For `P = e^{-sT} q / p` the factors are `N = e^{-sT} q / d` and
//! `D = p / d`, where `d` is the stable spectral factor of
//! `p(s)p(-s) + q(s)q(-s)`. User-supplied matrix factors bypass the
//! factorization and are only checked by [`validate_normalization`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Asymptote, BoundaryFunction, CMatrix, Coordinate};
use crate::hnorm::sigma_max;
use crate::plantcore::{delay_factor, DelayRationalPlant, Polynomial, ROOT_PAIRING_TOLERANCE};

/// Largest rational degree accepted by the factorization path.
pub const MAX_RATIONAL_DEGREE: usize = 8;

/// Acceptance bound on `|d(iw) d(-iw) - r(iw)| / (1 + |r(iw)|)`.
pub const FACTOR_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Acceptance bound on `| |N|^2 + |D|^2 - 1 |` for automatic factorizations.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// `e^{-s delay} num(s) / den(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayRationalFn {
    pub delay: f64,
    pub num: Polynomial,
    pub den: Polynomial,
}

impl DelayRationalFn {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        delay_factor(self.delay, s) * self.num.eval(s) / self.den.eval(s)
    }

    /// Limit along the imaginary axis; `None` if the quotient is improper.
    pub fn asymptote(&self) -> Option<Asymptote> {
        if self.num.is_zero() || self.num.degree() < self.den.degree() {
            Some(Asymptote::zero())
        } else if self.num.degree() == self.den.degree() {
            let c = self.num.leading() / self.den.leading();
            Some(Asymptote::delayed(Complex64::new(c, 0.0), self.delay))
        } else {
            None
        }
    }

    pub fn to_boundary(&self) -> BoundaryFunction {
        let me = self.clone();
        let f = BoundaryFunction::scalar(Coordinate::HalfPlane, move |s| me.eval(s))
            .with_conjugate_symmetry(true);
        match self.asymptote() {
            Some(a) => f.with_asymptote(a),
            None => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFactorizationResult {
    /// Stable factor with positive leading coefficient.
    pub d: Polynomial,
    pub residual: f64,
}

/// Scalar factor data retained when a pair comes from a plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SisoFactors {
    pub n: DelayRationalFn,
    pub d: DelayRationalFn,
}

/// Right factors `N`, `D` and left factors `Ntilde`, `Dtilde` of a plant.
///
/// `G = [N; D]` is `(p + m) x m` and `Gtilde = [-Dtilde, Ntilde]` is
/// `p x (p + m)`.
#[derive(Debug, Clone)]
pub struct CoprimePair {
    pub n: BoundaryFunction,
    pub d: BoundaryFunction,
    pub ntilde: BoundaryFunction,
    pub dtilde: BoundaryFunction,
    siso: Option<SisoFactors>,
}

impl CoprimePair {
    /// Pair from user-supplied factor callbacks, with shape checks only.
    pub fn from_factors(
        n: BoundaryFunction,
        d: BoundaryFunction,
        ntilde: BoundaryFunction,
        dtilde: BoundaryFunction,
    ) -> Result<Self> {
        let (p, m) = n.shape();
        let checks = [
            ("D", d.shape(), (m, m)),
            ("Ntilde", ntilde.shape(), (p, m)),
            ("Dtilde", dtilde.shape(), (p, p)),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "{name} is {got:?}, expected {want:?} for a {p}x{m} plant"
                )));
            }
        }
        let coord = n.coordinate();
        if [&d, &ntilde, &dtilde].iter().any(|f| f.coordinate() != coord) {
            return Err(Error::ShapeMismatch("factors use different coordinates".into()));
        }
        Ok(Self { n, d, ntilde, dtilde, siso: None })
    }

    pub fn from_siso(factors: SisoFactors) -> Self {
        let n = factors.n.to_boundary();
        let d = factors.d.to_boundary();
        Self { ntilde: n.clone(), dtilde: d.clone(), n, d, siso: Some(factors) }
    }

    pub fn siso(&self) -> Option<&SisoFactors> {
        self.siso.as_ref()
    }

    /// `(outputs, inputs)`.
    pub fn dims(&self) -> (usize, usize) {
        self.n.shape()
    }

    pub fn coordinate(&self) -> Coordinate {
        self.n.coordinate()
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        [&self.n, &self.d, &self.ntilde, &self.dtilde]
            .iter()
            .all(|f| f.is_conjugate_symmetric())
    }

    /// Stacked `[N; D]` at a point.
    pub fn g(&self, point: Complex64) -> CMatrix {
        let (p, m) = self.dims();
        let mut out = CMatrix::zeros(p + m, m);
        out.view_mut((0, 0), (p, m)).copy_from(&self.n.eval(point));
        out.view_mut((p, 0), (m, m)).copy_from(&self.d.eval(point));
        out
    }

    /// Row `[-Dtilde, Ntilde]` at a point.
    pub fn gtilde(&self, point: Complex64) -> CMatrix {
        let (p, m) = self.dims();
        let mut out = CMatrix::zeros(p, p + m);
        out.view_mut((0, 0), (p, p)).copy_from(&(-self.dtilde.eval(point)));
        out.view_mut((0, p), (p, m)).copy_from(&self.ntilde.eval(point));
        out
    }

    /// The same pair with every factor multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let k = Complex64::new(c, 0.0);
        Self {
            n: self.n.scale(k),
            d: self.d.scale(k),
            ntilde: self.ntilde.scale(k),
            dtilde: self.dtilde.scale(k),
            siso: None,
        }
    }
}

/// `r(s) = p(s)p(-s) + q(s)q(-s)`, so that `r(iw) = |p(iw)|^2 + |q(iw)|^2`.
pub fn para_hermitian_sum(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::InvalidArgument("both polynomials are zero".into()));
    }
    let r = &(p * &p.reflect()) + &(q * &q.reflect());
    // odd terms cancel analytically
    let coeffs = r
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 1 { 0.0 } else { c })
        .collect();
    Ok(Polynomial::from_finite(coeffs))
}

/// Stable `d` with `d(s) d(-s) = r(s)` and positive leading coefficient.
///
/// The roots of `r` come in pairs `+-s_j`; they are obtained as
/// `s_j^2 = -u_j` from the roots `u_j` of `rho(u) = r(i sqrt(u))`, and the
/// open-left-half-plane member of each pair is kept.
pub fn spectral_factor(r: &Polynomial) -> Result<SpectralFactorizationResult> {
    if r.is_zero() {
        return Err(Error::Indefinite { omega: 0.0, value: 0.0 });
    }
    let scale = r.max_abs_coeff();
    let odd = r
        .coeffs()
        .iter()
        .skip(1)
        .step_by(2)
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    if odd > 1e-12 * scale {
        return Err(Error::NotEven(odd));
    }
    let half = r.degree() / 2;
    if half > MAX_RATIONAL_DEGREE {
        return Err(Error::DegreeTooHigh { degree: half, max: MAX_RATIONAL_DEGREE });
    }
    // rho(u) = sum_k r_{2k} (-1)^k u^k, so r(i w) = rho(w^2)
    let rho_coeffs: Vec<f64> = (0..=half)
        .map(|k| {
            let c = r.coeffs()[2 * k];
            if k % 2 == 1 { -c } else { c }
        })
        .collect();
    let rho = Polynomial::from_finite(rho_coeffs);
    if rho.coeffs()[0] <= 0.0 {
        return Err(Error::Indefinite { omega: 0.0, value: rho.coeffs()[0] });
    }
    if rho.leading() <= 0.0 {
        return Err(Error::Indefinite { omega: f64::INFINITY, value: rho.leading() });
    }
    for omega in check_grid() {
        let value = rho.eval_real(omega * omega);
        if value <= 0.0 {
            return Err(Error::Indefinite { omega, value });
        }
    }

    let mut stable_roots = Vec::with_capacity(half);
    for u in rho.roots()? {
        let w = (-u).sqrt();
        if w.re.abs() <= ROOT_PAIRING_TOLERANCE * (1.0 + w.norm()) {
            return Err(Error::BoundaryRoot { re: w.re, im: w.im });
        }
        stable_roots.push(-w);
    }
    let lead = rho.leading().sqrt();
    let built = Polynomial::from_roots(&stable_roots, lead);
    let mut coeffs = built.coeffs().to_vec();
    coeffs.resize(half + 1, 0.0);
    coeffs[0] = rho.coeffs()[0].sqrt();
    coeffs[half] = lead;
    let d = Polynomial::from_finite(coeffs);

    let residual = check_grid()
        .map(|omega| {
            let s = Complex64::new(0.0, omega);
            let lhs = d.eval(s) * d.eval(-s);
            let rhs = r.eval(s);
            (lhs - rhs).norm() / (1.0 + rhs.norm())
        })
        .fold(0.0_f64, f64::max);
    if residual > FACTOR_RESIDUAL_TOLERANCE {
        return Err(Error::FactorResidual(residual));
    }
    Ok(SpectralFactorizationResult { d, residual })
}

fn check_grid() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain(log_space(1e-4, 1e4, 400))
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |k| {
        let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
        10f64.powf(a + (b - a) * t)
    })
}

/// `n` frequencies: zero plus a symmetric log grid over `[1e-4, 1e6]`.
pub fn validation_grid(n: usize) -> Vec<f64> {
    let side = n.saturating_sub(1) / 2;
    let pos: Vec<f64> = log_space(1e-4, 1e6, side.max(1)).collect();
    let mut grid: Vec<f64> = pos.iter().rev().map(|w| -w).collect();
    grid.push(0.0);
    grid.extend(pos);
    grid
}

/// Normalized coprime factorization of a delay-rational plant.
pub fn normalized_coprime_factorization(plant: &DelayRationalPlant) -> Result<CoprimePair> {
    let p = plant.denominator();
    let q = plant.numerator();
    let degree = p.degree().max(q.degree());
    if degree > MAX_RATIONAL_DEGREE {
        return Err(Error::DegreeTooHigh { degree, max: MAX_RATIONAL_DEGREE });
    }
    let spectral = spectral_factor(&para_hermitian_sum(p, q)?)?;
    let factors = SisoFactors {
        n: DelayRationalFn { delay: plant.delay(), num: q.clone(), den: spectral.d.clone() },
        d: DelayRationalFn { delay: 0.0, num: p.clone(), den: spectral.d },
    };
    let worst = validation_grid(1001)
        .into_iter()
        .map(|w| {
            let s = Complex64::new(0.0, w);
            (factors.n.eval(s).norm_sqr() + factors.d.eval(s).norm_sqr() - 1.0).abs()
        })
        .fold(0.0_f64, f64::max);
    if worst > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(worst));
    }
    Ok(CoprimePair::from_siso(factors))
}

/// Largest of `||G* G - I||` and `||Gtilde Gtilde* - I||` over the grid.
pub fn validate_normalization(pair: &CoprimePair, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("validation grid is empty".into()));
    }
    let (p, m) = pair.dims();
    let mut worst = 0.0_f64;
    for &omega in grid {
        let point = pair.n.axis_point(omega);
        let g = pair.g(point);
        let gt = pair.gtilde(point);
        let right = g.adjoint() * &g - DMatrix::<Complex64>::identity(m, m);
        let left = &gt * gt.adjoint() - DMatrix::<Complex64>::identity(p, p);
        let err = sigma_max(&right).max(sigma_max(&left));
        if !err.is_finite() {
            return Err(Error::NonFinite(format!("normalization check at omega = {omega}")));
        }
        worst = worst.max(err);
    }
    Ok(worst)
}
