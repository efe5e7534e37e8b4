//! Normalization check for sampled MIMO factor tables.
//!
//! A table lists `N`, `D`, `Ntilde`, `Dtilde` at frequencies `omega`; each
//! matrix is a list of rows and each entry is `[re, im]`:
//!
//! ```json
//! {"outputs": 1, "inputs": 1,
//!  "samples": [{"omega": 0, "n": [[[0.6, 0]]], "d": [[[0.8, 0]]],
//!               "ntilde": [[[0.6, 0]]], "dtilde": [[[0.8, 0]]]}]}
//! ```

use num_complex::Complex64;
use nugap::{sigma_max, CMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorTable {
    pub outputs: usize,
    pub inputs: usize,
    pub samples: Vec<FactorSample>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSample {
    pub omega: f64,
    pub n: RawMatrix,
    pub d: RawMatrix,
    pub ntilde: RawMatrix,
    pub dtilde: RawMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResidual {
    pub omega: f64,
    /// `||G* G - I||`
    pub right: f64,
    /// `||Gtilde Gtilde* - I||`
    pub left: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub outputs: usize,
    pub inputs: usize,
    pub tolerance: f64,
    pub worst: f64,
    pub normalized: bool,
    pub samples: Vec<SampleResidual>,
}

fn matrix(name: &str, omega: f64, raw: &RawMatrix, shape: (usize, usize)) -> Result<CMatrix, CliError> {
    let bad = || CliError::Input(format!("{name} at omega = {omega}: expected {}x{} entries", shape.0, shape.1));
    if raw.len() != shape.0 || raw.iter().any(|row| row.len() != shape.1) {
        return Err(bad());
    }
    if raw.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("{name} at omega = {omega}: non-finite entry")));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| Complex64::new(raw[i][j][0], raw[i][j][1])))
}

pub fn parse_table(text: &str) -> Result<FactorTable, CliError> {
    let table: FactorTable =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("factor table: {e}")))?;
    if table.outputs == 0 || table.inputs == 0 {
        return Err(CliError::Input("outputs and inputs must be positive".into()));
    }
    if table.samples.is_empty() {
        return Err(CliError::Input("factor table has no samples".into()));
    }
    Ok(table)
}

pub fn check_table(table: &FactorTable, tolerance: f64) -> Result<CheckReport, CliError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(CliError::Input(format!("tolerance must be positive, got {tolerance}")));
    }
    let (p, m) = (table.outputs, table.inputs);
    let mut samples = Vec::with_capacity(table.samples.len());
    for s in &table.samples {
        if !s.omega.is_finite() {
            return Err(CliError::Input("omega must be finite".into()));
        }
        let n = matrix("n", s.omega, &s.n, (p, m))?;
        let d = matrix("d", s.omega, &s.d, (m, m))?;
        let nt = matrix("ntilde", s.omega, &s.ntilde, (p, m))?;
        let dt = matrix("dtilde", s.omega, &s.dtilde, (p, p))?;
        let mut g = CMatrix::zeros(p + m, m);
        g.view_mut((0, 0), (p, m)).copy_from(&n);
        g.view_mut((p, 0), (m, m)).copy_from(&d);
        let mut gt = CMatrix::zeros(p, p + m);
        gt.view_mut((0, 0), (p, p)).copy_from(&(-dt));
        gt.view_mut((0, p), (p, m)).copy_from(&nt);
        let right = sigma_max(&(g.adjoint() * &g - CMatrix::identity(m, m)));
        let left = sigma_max(&(&gt * gt.adjoint() - CMatrix::identity(p, p)));
        samples.push(SampleResidual { omega: s.omega, right, left });
    }
    let worst = samples.iter().fold(0.0_f64, |w, s| w.max(s.right).max(s.left));
    Ok(CheckReport { outputs: p, inputs: m, tolerance, worst, normalized: worst <= tolerance, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagorean_sample_passes() {
        let t = parse_table(
            r#"{"outputs":1,"inputs":1,"samples":[{"omega":0,"n":[[[0.6,0]]],"d":[[[0,0.8]]],"ntilde":[[[0.6,0]]],"dtilde":[[[0.8,0]]]}]}"#,
        )
        .unwrap();
        let r = check_table(&t, 1e-6).unwrap();
        assert!(r.normalized);
        assert!(r.worst < 1e-15);
    }

    #[test]
    fn scaled_sample_fails() {
        let t = parse_table(
            r#"{"outputs":1,"inputs":1,"samples":[{"omega":1,"n":[[[1.2,0]]],"d":[[[1.6,0]]],"ntilde":[[[0.6,0]]],"dtilde":[[[0.8,0]]]}]}"#,
        )
        .unwrap();
        let r = check_table(&t, 1e-6).unwrap();
        assert!(!r.normalized);
        assert!((r.samples[0].right - 3.0).abs() < 1e-12);
        assert!(r.samples[0].left < 1e-15);
    }

    #[test]
    fn wrong_shape_is_an_input_error() {
        let t = parse_table(
            r#"{"outputs":2,"inputs":1,"samples":[{"omega":1,"n":[[[1,0]]],"d":[[[1,0]]],"ntilde":[[[1,0]]],"dtilde":[[[1,0]]]}]}"#,
        )
        .unwrap();
        assert!(check_table(&t, 1e-6).is_err());
    }
}
