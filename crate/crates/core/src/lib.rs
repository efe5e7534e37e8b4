//! Nu-gap distance between delay-rational plants, computed through normalized
//! coprime factors, contour winding numbers and boundary sup-norms.
//!
//! ```
//! use nugap::{nu_metric, DelayRationalPlant, NuOptions, PlantInput};
//!
//! let p1 = DelayRationalPlant::from_coeffs(1.0, &[-3.0, 1.0], &[-1.0, 1.0]).unwrap();
//! let p2 = DelayRationalPlant::from_coeffs(1.0, &[-3.2, 1.0], &[-1.0, 1.0]).unwrap();
//! let r = nu_metric(&PlantInput::from(p1), &PlantInput::from(p2), &NuOptions::default()).unwrap();
//! assert!((r.value - 0.0241).abs() < 1e-3);
//! ```

pub mod error;
pub mod function;
pub mod hnorm;
pub mod ncf;
pub mod numetric;
pub mod plantcore;
pub mod windex;

pub use error::{Error, Result};
pub use function::{Asymptote, BoundaryFunction, CMatrix, Coordinate};
pub use hnorm::{contour_max, hinf_norm, sigma_max, NormSearchResult};
pub use ncf::{
    normalized_coprime_factorization, spectral_factor, validate_normalization, CoprimePair,
    DelayRationalFn, SisoFactors, SpectralFactorizationResult,
};
pub use numetric::{
    closed_form_pole_uncertainty, closed_form_zero_uncertainty, cross_gram, lemma_positivity_check,
    nu_metric, nu_metric_fixed_rho, parallel_residual, Branch, CaseKind, ClosedFormCase, LemmaCheck,
    NuOptions, NuResult, PlantInput, Route,
};
pub use plantcore::{DelayRationalPlant, Polynomial};
pub use windex::{
    invertibility_probe, limit_index_W, winding_on_circle, InvertibilityReport, RadiusReport,
    RadiusSchedule, WindingResult,
};
