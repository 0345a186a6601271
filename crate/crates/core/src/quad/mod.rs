//! Integration backends: adaptive Gauss–Kronrod, the Gamma function, and an
//! exact partial-fraction integrator over a real quadratic field.

mod adaptive;
pub mod ext;
pub mod field;
mod gamma;
pub mod partial_fraction;

use serde::{Deserialize, Serialize};

pub use adaptive::{
    adaptive_integrate, adaptive_integrate_pieces, adaptive_integrate_with, AdaptiveOptions,
    MAX_SUBDIVISIONS,
};
pub use ext::ExtContext;
pub use field::{squarefree_decompose, QuadExt, QuadExtRecord};
pub use gamma::{gamma, unit_sphere_area};
pub use partial_fraction::{
    direct_integrand_ext, exact_pf_integrate, expand_integrand, ExactCertificate,
    RationalEvenFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum QuadMethod {
    Adaptive,
    #[serde(rename = "exactPF")]
    ExactPf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegralResult {
    pub value: f64,
    pub error_bound: f64,
    pub method: QuadMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_form: Option<ExactCertificate>,
}
