//! Plant specification files.
//!
//! ```json
//! {"type": "delay_rational", "delay": 1, "num": [-3, 1], "den": [-1, 1]}
//! ```
//!
//! Coefficients are listed in ascending degree, so the example is
//! `e^{-s} (s - 3) / (s - 1)`.

use nugap::{DelayRationalPlant, Error, Polynomial};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub delay: f64,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl From<&DelayRationalPlant> for PlantSpec {
    fn from(p: &DelayRationalPlant) -> Self {
        Self {
            kind: "delay_rational".into(),
            delay: p.delay(),
            num: p.numerator().coeffs().to_vec(),
            den: p.denominator().coeffs().to_vec(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "type")]
    kind: Option<String>,
    delay: Option<f64>,
    num: Option<Vec<f64>>,
    den: Option<Vec<f64>>,
}

fn field_for(message: &str) -> &'static str {
    if message.starts_with("delay") {
        "delay"
    } else if message.starts_with("denominator") {
        "den"
    } else if message.starts_with("improper") {
        "num"
    } else {
        "num/den"
    }
}

/// Parses and validates a plant, reporting every violated invariant.
pub fn parse_plant_spec(text: &str) -> Result<DelayRationalPlant, CliError> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("plant spec: {e}")))?;
    let mut violations = Vec::new();
    match raw.kind.as_deref() {
        Some("delay_rational") => {}
        Some(other) => violations.push(format!("type: unsupported plant type {other:?}")),
        None => violations.push("type: missing".into()),
    }
    if raw.delay.is_none() {
        violations.push("delay: missing".into());
    }
    for (name, coeffs) in [("num", &raw.num), ("den", &raw.den)] {
        match coeffs {
            None => violations.push(format!("{name}: missing")),
            Some(c) if c.is_empty() => violations.push(format!("{name}: empty coefficient list")),
            _ => {}
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Input(violations.join("; ")));
    }
    let (num, den) = (raw.num.unwrap_or_default(), raw.den.unwrap_or_default());
    let num = Polynomial::new(num).map_err(|e| CliError::Input(format!("num: {e}")))?;
    let den = Polynomial::new(den).map_err(|e| CliError::Input(format!("den: {e}")))?;
    DelayRationalPlant::new(raw.delay.unwrap_or_default(), num, den).map_err(|e| match e {
        Error::InvalidPlant(v) => CliError::Input(
            v.iter().map(|m| format!("{}: {m}", field_for(m))).collect::<Vec<_>>().join("; "),
        ),
        other => CliError::Input(other.to_string()),
    })
}

/// Reads a spec from a path, or treats the argument as inline JSON when it
/// starts with `{`.
pub fn load_plant(arg: &str) -> Result<DelayRationalPlant, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    };
    parse_plant_spec(&text)
}
