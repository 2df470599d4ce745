//! Run configuration: a TOML file with `[model]`, `[space]`, `[rabi]`,
//! `[sweep]`, `[verify]` and `[run]` tables, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Bs,
    Jc,
    Ti,
    Qbs,
    Qjc,
    Qti,
    RawMr,
}

impl ModelName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "bs" => Ok(Self::Bs),
            "jc" => Ok(Self::Jc),
            "ti" => Ok(Self::Ti),
            "qbs" => Ok(Self::Qbs),
            "qjc" => Ok(Self::Qjc),
            "qti" => Ok(Self::Qti),
            "raw-mr" => Ok(Self::RawMr),
            other => Err(CliError::Config(format!(
                "unknown model '{other}' (expected bs, jc, ti, qbs, qjc, qti or raw-mr)"
            ))),
        }
    }

    pub fn is_deformed(self) -> bool {
        matches!(self, Self::Qbs | Self::Qjc | Self::Qti)
    }
}

/// Raw ancestor parameters for `raw-mr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub c10: f64,
    pub c20: f64,
    pub c11: f64,
    pub c21: f64,
    pub inhomogeneities: Vec<f64>,
    /// Mode realization; inferred from the central elements when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub name: ModelName,
    pub n_atoms: usize,
    pub spin: f64,
    pub omega_f: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// `c` of the deformed Buck-Sukumar reduction.
    pub c: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            name: ModelName::Bs,
            n_atoms: 2,
            spin: 0.5,
            omega_f: 3.02,
            alpha: 1.0,
            delta: Some(0.0),
            omega_a: None,
            raw: None,
            q: None,
            c: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceSection {
    pub cutoff: usize,
    pub sectors: Vec<usize>,
}

impl Default for SpaceSection {
    fn default() -> Self {
        Self { cutoff: 24, sectors: vec![1] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiSection {
    pub t_max: f64,
    pub points: usize,
    pub photons: usize,
    /// Per-atom factor indices of the initial state (0 = up); all down when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<usize>>,
}

impl Default for RabiSection {
    fn default() -> Self {
        Self { t_max: 7.0, points: 2048, photons: 1, atoms: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { delta_min: -0.6, delta_max: 0.6, steps: 25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub draws: usize,
    pub tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { draws: 20, tolerance: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 7, out: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub space: SpaceSection,
    pub rabi: RabiSection,
    pub sweep: SweepSection,
    pub verify: VerifySection,
    pub run: RunSection,
}

/// Flag values; `None` keeps the file (or default) value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub na: Option<usize>,
    pub spin: Option<f64>,
    pub omega_f: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub cutoff: Option<usize>,
    pub sectors: Option<String>,
    pub q: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Comma-separated sector list; an empty string is the empty list.
pub fn parse_sectors(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| CliError::Config(format!("sector '{t}' is not a non-negative integer"))))
        .collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(m) = &o.model {
            self.model.name = ModelName::parse(m)?;
        }
        if let Some(v) = o.na {
            self.model.n_atoms = v;
        }
        if let Some(v) = o.spin {
            self.model.spin = v;
        }
        if let Some(v) = o.omega_f {
            self.model.omega_f = v;
        }
        if let Some(v) = o.alpha {
            self.model.alpha = v;
        }
        if let Some(v) = o.delta {
            // a detuning flag replaces whatever frequency choice the file made
            self.model.delta = Some(v);
            self.model.omega_a = None;
            self.model.raw = None;
        }
        if let Some(v) = o.cutoff {
            self.space.cutoff = v;
        }
        if let Some(s) = &o.sectors {
            self.space.sectors = parse_sectors(s)?;
        }
        if let Some(v) = o.q {
            self.model.q = Some(v);
        }
        if let Some(p) = &o.out {
            self.run.out = Some(p.clone());
        }
        if let Some(v) = o.seed {
            self.run.seed = v;
        }
        Ok(())
    }

    /// `2s` from the configured spin.
    pub fn two_s(&self) -> Result<usize, CliError> {
        let t = 2.0 * self.model.spin;
        if !(t >= 1.0 && (t - t.round()).abs() < 1e-12) {
            return Err(CliError::Config(format!("spin {} must be a positive half-integer", self.model.spin)));
        }
        Ok(t.round() as usize)
    }

    /// Checks the invariants that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.model;
        self.two_s()?;
        for (name, v) in [("omega_f", m.omega_f), ("alpha", m.alpha), ("c", m.c)] {
            if !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite")));
            }
        }
        if m.name.is_deformed() {
            match m.q {
                Some(q) if q.is_finite() && q > 0.0 && q != 1.0 => {}
                Some(q) => return Err(CliError::Config(format!("q = {q} must be positive and != 1"))),
                None => return Err(CliError::Config(format!("model {:?} needs q", m.name))),
            }
            if m.n_atoms != 1 {
                return Err(CliError::Config("deformed models are built for n_atoms = 1".into()));
            }
        } else {
            let given = [m.delta.is_some(), m.omega_a.is_some(), m.raw.is_some()].iter().filter(|&&b| b).count();
            if given != 1 {
                return Err(CliError::Config(format!(
                    "exactly one of delta, omega_a, raw must be given ({given} found)"
                )));
            }
            if m.raw.is_some() && m.name != ModelName::RawMr {
                return Err(CliError::Config("raw c-parameters are only valid with model raw-mr".into()));
            }
            if m.name == ModelName::RawMr && m.raw.is_none() {
                return Err(CliError::Config("model raw-mr needs a [model.raw] table".into()));
            }
            if let Some(wa) = &m.omega_a {
                if wa.len() != m.n_atoms {
                    return Err(CliError::Config(format!(
                        "omega_a has {} entries for n_atoms = {}",
                        wa.len(),
                        m.n_atoms
                    )));
                }
            }
            if m.name == ModelName::Ti && m.n_atoms != 1 {
                return Err(CliError::Config("the trapped-ion model has one atom".into()));
            }
        }
        if m.n_atoms == 0 {
            return Err(CliError::Config("n_atoms must be at least 1".into()));
        }
        let max_m = self.space.sectors.iter().copied().max().unwrap_or(0);
        if self.space.cutoff < 2 * max_m + 4 {
            return Err(CliError::Config(format!(
                "cutoff {} violates cutoff >= 2*max(M)+4 = {}",
                self.space.cutoff,
                2 * max_m + 4
            )));
        }
        if self.rabi.points < 2 || !(self.rabi.t_max > 0.0) {
            return Err(CliError::Config("rabi window needs t_max > 0 and at least 2 points".into()));
        }
        if self.sweep.steps == 0 || self.sweep.delta_max < self.sweep.delta_min {
            return Err(CliError::Config("sweep needs steps >= 1 and delta_min <= delta_max".into()));
        }
        Ok(())
    }
}
