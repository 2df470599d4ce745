//! JSON run records and CSV rows. Complex numbers are `[re, im]` pairs;
//! non-finite values are stored as `null`.

use serde::{Deserialize, Serialize};

use mrint::C64;

use crate::config::RunConfig;
use crate::error::CliError;

pub type Complex = [f64; 2];

pub fn cplx(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaCheck {
    pub lambda: Complex,
    pub value: Complex,
    /// Distance from `Λ(λ)` to the nearest eigenvalue of `τ(λ)` on the sector.
    pub tau_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRecord {
    pub roots: Vec<Complex>,
    /// Roots in the shifted variable `u = λ + c`.
    pub roots_shifted: Vec<Complex>,
    pub residuals: Vec<Option<f64>>,
    pub energy: Complex,
    pub remainder: f64,
    pub degenerate: bool,
    pub lambda_checks: Vec<LambdaCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda: Complex,
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub passed: bool,
    pub max_abs_diff: Option<f64>,
    pub cutoff_shift: Option<f64>,
    pub unmatched_oracle: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorRecord {
    /// `None` when the model has no conserved sectors and the full space was used.
    pub m: Option<usize>,
    pub dim: usize,
    pub shift: Complex,
    pub eigenvalues: Vec<Complex>,
    pub hermitian: bool,
    pub defective: bool,
    pub bethe: Vec<BetheRecord>,
    pub comparison: Option<ComparisonRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YbeRow {
    pub draw: usize,
    pub lambda: Complex,
    pub mu: Complex,
    pub pure_ybe: f64,
    pub rtt: f64,
    pub tau_commutator: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub frequency: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiRecord {
    pub classification: String,
    pub frequencies: Option<usize>,
    pub method: String,
    pub resolution: f64,
    pub peaks: Vec<PeakRecord>,
    pub weight_sum: Complex,
    pub max_norm_drift: f64,
    pub sector_energies: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub deltas: Vec<f64>,
    pub exceptional: Vec<f64>,
    pub discontinuous: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub sectors: Vec<SectorRecord>,
    pub degeneracy_certificates: Vec<Certificate>,
    pub ybe: Vec<YbeRow>,
    pub rabi: Option<RabiRecord>,
    pub sweep: Option<SweepRecord>,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            sectors: Vec::new(),
            degeneracy_certificates: Vec::new(),
            ybe: Vec::new(),
            rabi: None,
            sweep: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Row of the spectrum table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    /// Empty for models without conserved sectors.
    #[serde(rename = "sector_M")]
    pub sector_m: Option<usize>,
    pub index: usize,
    pub energy_re: f64,
    pub energy_im: f64,
    pub source: String,
    pub abs_diff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    #[serde(rename = "sector_M")]
    pub sector_m: usize,
    pub solution: usize,
    pub root: usize,
    pub root_re: f64,
    pub root_im: f64,
    pub shifted_re: f64,
    pub shifted_im: f64,
    pub residual: Option<f64>,
    pub energy_re: f64,
    pub energy_im: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    #[serde(rename = "sector_M")]
    pub sector_m: usize,
    pub oracle_index: usize,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub bethe_index: Option<usize>,
    pub bethe_re: Option<f64>,
    pub bethe_im: Option<f64>,
    pub abs_diff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiRow {
    pub t: f64,
    pub probability: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub level: usize,
    pub energy_re: f64,
    pub energy_im: f64,
    pub discriminant: f64,
    pub discontinuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub draw: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub mu_re: f64,
    pub mu_im: f64,
    pub pure_ybe: f64,
    pub rtt: f64,
    pub tau_commutator: f64,
    pub pass: bool,
}

/// CSV text with a header row even when `rows` is empty.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub const SPECTRUM_HEADER: &[&str] = &["sector_M", "index", "energy_re", "energy_im", "source", "abs_diff"];
pub const ROOT_HEADER: &[&str] = &[
    "sector_M", "solution", "root", "root_re", "root_im", "shifted_re", "shifted_im", "residual", "energy_re", "energy_im",
    "degenerate",
];
pub const COMPARE_HEADER: &[&str] =
    &["sector_M", "oracle_index", "oracle_re", "oracle_im", "bethe_index", "bethe_re", "bethe_im", "abs_diff"];
pub const RABI_HEADER: &[&str] = &["t", "probability", "norm"];
pub const PEAK_HEADER: &[&str] = &["frequency", "weight"];
pub const SWEEP_HEADER: &[&str] = &["delta", "level", "energy_re", "energy_im", "discriminant", "discontinuous"];
pub const VERIFY_HEADER: &[&str] =
    &["draw", "lambda_re", "lambda_im", "mu_re", "mu_im", "pure_ybe", "rtt", "tau_commutator", "pass"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_csv() {
        let s = to_csv::<SpectrumRow>(&[], SPECTRUM_HEADER).unwrap();
        assert_eq!(s, "sector_M,index,energy_re,energy_im,source,abs_diff\n");
    }

    #[test]
    fn optional_cells_are_empty() {
        let row = SpectrumRow { sector_m: None, index: 0, energy_re: 1.5, energy_im: 0.0, source: "oracle".into(), abs_diff: None };
        let s = to_csv(&[row], SPECTRUM_HEADER).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), ",0,1.5,0.0,oracle,");
    }
}
