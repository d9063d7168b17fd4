//! JSON reports. Values are in range units; when the scenario gives a
//! physical range the lengths are repeated in metres.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> serde_json::Result<T> {
    serde_json::from_str(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub rho: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    pub label: String,
    pub estimate: [f64; 2],
    pub residual: f64,
    /// Bounds the verifiers saw.
    pub bounds: Vec<f64>,
    /// Malicious-node payoff, for claim inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deception: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deception_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxminReport {
    pub schema_version: u32,
    pub value: f64,
    pub true_position: Polar,
    pub fake_position: Polar,
    pub delta_theta: f64,
    pub orthocenter: [f64; 2],
    pub axis: f64,
    pub converged: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityJson {
    pub schema_version: u32,
    pub points_per_edge: usize,
    pub points: u128,
    pub adversary_actions: u128,
    pub verifier_triples: u128,
    pub matrix_entries: u128,
    pub squared_adversary_actions: u128,
    pub squared_verifier_triples: u128,
    pub budget: u128,
    pub within_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub action: usize,
    pub probability: f64,
    /// Verifier positions, when the actions come from a grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verifiers: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub schema_version: u32,
    pub value: f64,
    pub adversary_actions: usize,
    pub verifier_actions: usize,
    pub positive_entries: usize,
    pub support: Vec<SupportEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedReport {
    pub schema_version: u32,
    pub expected_utility: f64,
    pub rho_u: f64,
    pub rho_p: f64,
    pub delta_theta: f64,
    pub integration_step: f64,
    pub edge: f64,
    pub converged: bool,
    pub symmetry_reduction_holds: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_utility_m: Option<f64>,
}
