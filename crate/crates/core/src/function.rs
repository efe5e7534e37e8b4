//! Exactly evaluable functions on the closed half-plane or disk.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plantcore::{axis_to_disk, disk_on_circle, halfplane_on_circle};

pub type CMatrix = DMatrix<Complex64>;

/// Which domain an evaluator expects its argument in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Disk,
    HalfPlane,
}

/// Leading behaviour `sum_k c_k e^{-i omega tau_k}` of a scalar function on
/// the imaginary axis as `|omega| -> infinity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote {
    terms: Vec<(f64, Complex64)>,
}

impl Asymptote {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::delayed(c, 0.0)
    }

    pub fn delayed(c: Complex64, delay: f64) -> Self {
        Self { terms: vec![(delay, c)] }.merged()
    }

    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    fn merged(mut self) -> Self {
        let mut out: Vec<(f64, Complex64)> = Vec::with_capacity(self.terms.len());
        self.terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (tau, c) in self.terms {
            match out.last_mut() {
                Some(last) if (last.0 - tau).abs() <= 1e-12 * (1.0 + tau.abs()) => last.1 += c,
                _ => out.push((tau, c)),
            }
        }
        out.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        Self { terms: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }.merged()
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|&(t, c)| (t, -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ta, ca) in &self.terms {
            for &(tb, cb) in &other.terms {
                terms.push((ta + tb, ca * cb));
            }
        }
        Self { terms }.merged()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.mul(&Self::constant(c))
    }

    /// `limsup |sum_k c_k e^{-i omega tau_k}|` over `omega -> infinity`.
    ///
    /// One or two distinct delays are handled exactly; with more, the
    /// quasi-periodic envelope is scanned on a long window.
    pub fn limsup(&self) -> f64 {
        match self.terms.as_slice() {
            [] => 0.0,
            [(_, c)] => c.norm(),
            [(_, a), (_, b)] => a.norm() + b.norm(),
            terms => {
                let min_gap = terms
                    .windows(2)
                    .map(|w| w[1].0 - w[0].0)
                    .fold(f64::INFINITY, f64::min);
                let window = 2.0 * PI * 200.0 / min_gap;
                let n = 1 << 16;
                (0..n)
                    .map(|k| {
                        let omega = window * k as f64 / n as f64;
                        terms
                            .iter()
                            .map(|&(tau, c)| c * Complex64::from_polar(1.0, -omega * tau))
                            .sum::<Complex64>()
                            .norm()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

#[derive(Clone)]
enum Evaluator {
    Scalar(Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>),
    Matrix(Arc<dyn Fn(Complex64) -> CMatrix + Send + Sync>),
}

/// A pure scalar- or matrix-valued map evaluated on contours and boundaries.
///
/// Scalar functions carry an optional [`Asymptote`] when they are built from
/// delay-rational pieces; it supplies the behaviour beyond any finite sweep.
#[derive(Clone)]
pub struct BoundaryFunction {
    coordinate: Coordinate,
    rows: usize,
    cols: usize,
    evaluator: Evaluator,
    asymptote: Option<Asymptote>,
    conjugate_symmetric: bool,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("coordinate", &self.coordinate)
            .field("shape", &(self.rows, self.cols))
            .field("asymptote", &self.asymptote)
            .field("conjugate_symmetric", &self.conjugate_symmetric)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn scalar<F>(coordinate: Coordinate, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            coordinate,
            rows: 1,
            cols: 1,
            evaluator: Evaluator::Scalar(Arc::new(f)),
            asymptote: None,
            conjugate_symmetric: false,
        }
    }

    pub fn matrix<F>(coordinate: Coordinate, rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(Complex64) -> CMatrix + Send + Sync + 'static,
    {
        Self {
            coordinate,
            rows,
            cols,
            evaluator: Evaluator::Matrix(Arc::new(f)),
            asymptote: None,
            conjugate_symmetric: false,
        }
    }

    pub fn constant(coordinate: Coordinate, c: Complex64) -> Self {
        Self::scalar(coordinate, move |_| c)
            .with_asymptote(Asymptote::constant(c))
            .with_conjugate_symmetry(c.im == 0.0)
    }

    /// Attaches the large-frequency behaviour (scalar functions only).
    pub fn with_asymptote(mut self, asymptote: Asymptote) -> Self {
        if self.is_scalar() {
            self.asymptote = Some(asymptote);
        }
        self
    }

    /// Declares `F(conj s) = conj F(s)`, true for real-coefficient data.
    pub fn with_conjugate_symmetry(mut self, symmetric: bool) -> Self {
        self.conjugate_symmetric = symmetric;
        self
    }

    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_scalar(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn asymptote(&self) -> Option<&Asymptote> {
        self.asymptote.as_ref()
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        self.conjugate_symmetric
    }

    /// Value at a point of the function's own coordinate.
    pub fn eval(&self, point: Complex64) -> CMatrix {
        match &self.evaluator {
            Evaluator::Scalar(f) => CMatrix::from_element(1, 1, f(point)),
            Evaluator::Matrix(f) => f(point),
        }
    }

    /// Like [`eval`](Self::eval), but checks the returned shape.
    pub fn try_eval(&self, point: Complex64) -> Result<CMatrix> {
        let m = self.eval(point);
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::ShapeMismatch(format!(
                "evaluator returned {:?}, declared {:?}",
                m.shape(),
                (self.rows, self.cols)
            )));
        }
        Ok(m)
    }

    /// Scalar value; for matrix functions the `(0, 0)` entry.
    pub fn eval_scalar(&self, point: Complex64) -> Complex64 {
        match &self.evaluator {
            Evaluator::Scalar(f) => f(point),
            Evaluator::Matrix(f) => f(point)[(0, 0)],
        }
    }

    /// Point on `|z| = r` at angle `theta`, expressed in this function's coordinate.
    pub fn contour_point(&self, r: f64, theta: f64) -> Complex64 {
        match self.coordinate {
            Coordinate::Disk => disk_on_circle(r, theta),
            Coordinate::HalfPlane => halfplane_on_circle(r, theta),
        }
    }

    /// Boundary point corresponding to `s = i omega`.
    pub fn axis_point(&self, omega: f64) -> Complex64 {
        match self.coordinate {
            Coordinate::Disk => axis_to_disk(omega),
            Coordinate::HalfPlane => Complex64::new(0.0, omega),
        }
    }

    pub fn eval_on_circle(&self, r: f64, theta: f64) -> Complex64 {
        self.eval_scalar(self.contour_point(r, theta))
    }

    pub fn eval_on_axis(&self, omega: f64) -> CMatrix {
        self.eval(self.axis_point(omega))
    }

    fn require_scalar(&self, other: &Self) -> Result<()> {
        if !self.is_scalar() || !other.is_scalar() {
            return Err(Error::ShapeMismatch("pointwise algebra needs scalar functions".into()));
        }
        if self.coordinate != other.coordinate {
            return Err(Error::ShapeMismatch("functions live in different coordinates".into()));
        }
        Ok(())
    }

    /// Pointwise product of two scalar functions.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_scalar(other)?;
        let (a, b) = (self.clone(), other.clone());
        let asym = match (&self.asymptote, &other.asymptote) {
            (Some(x), Some(y)) => Some(x.mul(y)),
            _ => None,
        };
        let mut out = Self::scalar(self.coordinate, move |p| a.eval_scalar(p) * b.eval_scalar(p))
            .with_conjugate_symmetry(self.conjugate_symmetric && other.conjugate_symmetric);
        out.asymptote = asym;
        Ok(out)
    }

    /// Pointwise sum of two scalar functions.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_scalar(other)?;
        let (a, b) = (self.clone(), other.clone());
        let asym = match (&self.asymptote, &other.asymptote) {
            (Some(x), Some(y)) => Some(x.add(y)),
            _ => None,
        };
        let mut out = Self::scalar(self.coordinate, move |p| a.eval_scalar(p) + b.eval_scalar(p))
            .with_conjugate_symmetry(self.conjugate_symmetric && other.conjugate_symmetric);
        out.asymptote = asym;
        Ok(out)
    }

    /// Pointwise complex conjugate (not holomorphic, so no asymptote is kept).
    pub fn conj(&self) -> Self {
        let a = self.clone();
        match &self.evaluator {
            Evaluator::Scalar(_) => Self::scalar(self.coordinate, move |p| a.eval_scalar(p).conj()),
            Evaluator::Matrix(_) => Self::matrix(self.coordinate, self.rows, self.cols, move |p| {
                a.eval(p).map(|c| c.conj())
            }),
        }
        .with_conjugate_symmetry(self.conjugate_symmetric)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let a = self.clone();
        let mut out = match &self.evaluator {
            Evaluator::Scalar(_) => Self::scalar(self.coordinate, move |p| a.eval_scalar(p) * c),
            Evaluator::Matrix(_) => {
                Self::matrix(self.coordinate, self.rows, self.cols, move |p| a.eval(p) * c)
            }
        }
        .with_conjugate_symmetry(self.conjugate_symmetric && c.im == 0.0);
        out.asymptote = self.asymptote.as_ref().map(|x| x.scale(c));
        out
    }
}
