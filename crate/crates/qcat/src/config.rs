//! Experiment configuration: a flat TOML key set shared by every CLI
//! subcommand, with field-level validation and CLI-flag overrides applied on
//! top of file values.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QcatError, Result};
use crate::spectra::Quantizer;
use crate::symplectic::IntSymplecticMatrix;

/// Parse a row-major integer matrix spec: rows separated by `;`, entries by
/// `,` — e.g. `"2,1;1,1"`.
pub fn parse_matrix(spec: &str) -> Result<IntSymplecticMatrix> {
    let mut rows = Vec::new();
    for (i, row) in spec.split(';').enumerate() {
        let mut entries = Vec::new();
        for (j, tok) in row.split(',').enumerate() {
            let v: i64 = tok.trim().parse().map_err(|_| {
                QcatError::Validation(format!(
                    "matrix: entry ({i},{j}) is not an integer: {:?}",
                    tok.trim()
                ))
            })?;
            entries.push(v);
        }
        rows.push(entries);
    }
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) || rows.len() != w {
        return Err(QcatError::Validation(format!(
            "matrix: must be square, got {} rows of widths {:?}",
            rows.len(),
            rows.iter().map(|r| r.len()).collect::<Vec<_>>()
        )));
    }
    IntSymplecticMatrix::new(rows)
}

/// κ selection: solve the congruence (`auto`) or take explicit values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KappaPolicy {
    Named(String),
    Explicit(Vec<f64>),
}

impl Default for KappaPolicy {
    fn default() -> Self {
        KappaPolicy::Named("auto".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    #[serde(default = "default_grid")]
    pub g: usize,
}

fn default_k() -> usize {
    2
}
fn default_delta0() -> f64 {
    0.25
}
fn default_grid() -> usize {
    64
}

impl Default for PartitionSpec {
    fn default() -> Self {
        PartitionSpec {
            k: default_k(),
            delta0: default_delta0(),
            g: default_grid(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySpec {
    /// refinement depth for h_{2m}
    #[serde(default = "default_m")]
    pub m: usize,
    /// Ehrenfest block size for the subadditivity chain
    #[serde(default = "default_m")]
    pub m0: usize,
    /// propagator power for EUP / certificates; None means n_E(N)
    #[serde(default)]
    pub n: Option<i64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_epsilon0")]
    pub epsilon0: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_m() -> usize {
    1
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_epsilon0() -> f64 {
    0.05
}
fn default_delta() -> f64 {
    0.01
}

impl Default for EntropySpec {
    fn default() -> Self {
        EntropySpec {
            m: default_m(),
            m0: default_m(),
            n: None,
            epsilon: default_epsilon(),
            epsilon0: default_epsilon0(),
            delta: default_delta(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_refine_rounds")]
    pub refine_rounds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_samples() -> usize {
    128
}
fn default_refine_rounds() -> usize {
    2
}
fn default_seed() -> u64 {
    7
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            samples: default_samples(),
            refine_rounds: default_refine_rounds(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// row-major integer matrix, rows `;`-separated: "2,1;1,1"
    #[serde(default = "default_matrix")]
    pub matrix: String,
    /// inverse Planck levels to run
    #[serde(default = "default_n_list")]
    pub n_list: Vec<u64>,
    /// "auto" or an explicit κ vector of length 2d
    #[serde(default)]
    pub kappa: KappaPolicy,
    /// weyl | anti_wick | op_plus
    #[serde(default = "default_quantizer")]
    pub quantizer: String,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default)]
    pub entropy: EntropySpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    /// artifact directory
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_matrix() -> String {
    "2,1;1,1".into()
}
fn default_n_list() -> Vec<u64> {
    vec![32]
}
fn default_quantizer() -> String {
    "op_plus".into()
}
fn default_output() -> PathBuf {
    PathBuf::from("qcat-out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            matrix: default_matrix(),
            n_list: default_n_list(),
            kappa: KappaPolicy::default(),
            quantizer: default_quantizer(),
            partition: PartitionSpec::default(),
            entropy: EntropySpec::default(),
            sampling: SamplingSpec::default(),
            output: default_output(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| QcatError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Field-level validation; every failure names the offending key.
    pub fn validate(&self) -> Result<()> {
        parse_matrix(&self.matrix)?;
        if self.n_list.is_empty() {
            return Err(QcatError::Validation("n_list: must be nonempty".into()));
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return Err(QcatError::Validation("n_list: N must be positive".into()));
        }
        match &self.kappa {
            KappaPolicy::Named(s) if s == "auto" => {}
            KappaPolicy::Named(s) => {
                return Err(QcatError::Validation(format!(
                    "kappa: unknown policy {s:?} (use \"auto\" or an explicit vector)"
                )));
            }
            KappaPolicy::Explicit(v) => {
                if v.is_empty() || v.len() % 2 != 0 {
                    return Err(QcatError::Validation(
                        "kappa: explicit vector must have even positive length 2d".into(),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(QcatError::Validation("kappa: entries must be finite".into()));
                }
            }
        }
        Quantizer::from_str(&self.quantizer)
            .map_err(|_| QcatError::Validation(format!("quantizer: unknown {:?}", self.quantizer)))?;
        if self.partition.k < 2 {
            return Err(QcatError::Validation("partition.k: need K >= 2".into()));
        }
        if !(self.partition.delta0 > 0.0 && self.partition.delta0 < 0.5) {
            return Err(QcatError::Validation(
                "partition.delta0: must lie in (0, 0.5)".into(),
            ));
        }
        if self.partition.g < 4 * self.partition.k {
            return Err(QcatError::Validation(
                "partition.g: grid must be at least 4K per axis".into(),
            ));
        }
        if self.entropy.m0 == 0 {
            return Err(QcatError::Validation("entropy.m0: must be >= 1".into()));
        }
        if !(self.entropy.epsilon > 0.0 && self.entropy.epsilon < 1.0) {
            return Err(QcatError::Validation("entropy.epsilon: must lie in (0,1)".into()));
        }
        if self.entropy.epsilon0 <= 0.0 {
            return Err(QcatError::Validation("entropy.epsilon0: must be positive".into()));
        }
        if self.entropy.delta <= 0.0 {
            return Err(QcatError::Validation("entropy.delta: must be positive".into()));
        }
        if let Some(n) = self.entropy.n {
            if n < 0 {
                return Err(QcatError::Validation("entropy.n: must be >= 0".into()));
            }
        }
        if self.sampling.samples == 0 {
            return Err(QcatError::Validation("sampling.samples: must be positive".into()));
        }
        Ok(())
    }

    pub fn matrix_parsed(&self) -> Result<IntSymplecticMatrix> {
        parse_matrix(&self.matrix)
    }

    pub fn quantizer_parsed(&self) -> Result<Quantizer> {
        Quantizer::from_str(&self.quantizer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_toml_gives_defaults() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg.matrix, "2,1;1,1");
        assert_eq!(cfg.n_list, vec![32]);
        assert_eq!(cfg.partition.k, 2);
        assert_eq!(cfg.sampling.seed, 7);
        assert!(matches!(cfg.kappa, KappaPolicy::Named(ref s) if s == "auto"));
    }

    #[test]
    fn full_toml_roundtrip() {
        let text = r#"
matrix = "3,2;1,1"
n_list = [16, 32]
kappa = [0.0, 3.141592653589793]
quantizer = "anti_wick"
output = "outdir"

[partition]
k = 4
delta0 = 0.2
g = 128

[entropy]
m = 2
m0 = 1
n = 3
epsilon = 0.2

[sampling]
samples = 256
seed = 99
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.n_list, vec![16, 32]);
        assert_eq!(cfg.partition.k, 4);
        assert_eq!(cfg.entropy.n, Some(3));
        assert_eq!(cfg.sampling.samples, 256);
        assert!(matches!(cfg.kappa, KappaPolicy::Explicit(ref v) if v.len() == 2));
        // serialize back and re-parse
        let ser = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_toml(&ser).unwrap();
        assert_eq!(back.partition.g, 128);
    }

    #[test]
    fn validation_names_the_field() {
        let err = ExperimentConfig::from_toml("n_list = []").unwrap_err();
        assert!(err.to_string().contains("n_list"), "{err}");
        let err = ExperimentConfig::from_toml("quantizer = \"wick\"").unwrap_err();
        assert!(err.to_string().contains("quantizer"), "{err}");
        let err = ExperimentConfig::from_toml("[partition]\nk = 1").unwrap_err();
        assert!(err.to_string().contains("partition.k"), "{err}");
        let err = ExperimentConfig::from_toml("[entropy]\nepsilon = 1.5").unwrap_err();
        assert!(err.to_string().contains("entropy.epsilon"), "{err}");
        let err = ExperimentConfig::from_toml("kappa = [0.1]").unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::from_toml("matrx = \"2,1;1,1\"").unwrap_err();
        assert!(matches!(err, QcatError::Validation(_)), "{err}");
    }

    #[test]
    fn matrix_parsing() {
        let m = parse_matrix("2,1;1,1").unwrap();
        assert_eq!(m.entries, vec![vec![2, 1], vec![1, 1]]);
        assert!(parse_matrix("2,1;1").is_err());
        assert!(parse_matrix("a,1;1,1").is_err());
        // shear is symplectic but not quantizable; parsing alone accepts it
        assert!(parse_matrix("1,1;0,1").is_ok());
        // non-symplectic rejected by the constructor
        assert!(parse_matrix("1,0;0,2").is_err());
    }
}
