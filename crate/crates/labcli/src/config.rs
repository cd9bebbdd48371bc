use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Numeric and symbolic parameters shared by every subcommand. Each may come
/// from a flag or from the `--config` file; flags win.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Weight, e.g. `std:alpha=0`, `log:beta=2`, `exp:c=1`, `file:<path>`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// Symbol, e.g. `poly:0,1`, `log`, `pow:s=0.5`, `carleson:a=0.9,gamma=2`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Function whose norm is taken (same grammar as `--g`)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Measure, e.g. `star:g=poly:0,1,n=1,k=0`, `atom:re=0,im=0,mass=1`, `gap:e=1`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Derivative order for Bloch and Besov seminorms
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Lattice / Bergman-disk radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Matrix truncation degree
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    /// Truncation schedule for growth scans, e.g. `64,128,256,512`
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    /// Radii for profile evaluations
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Points `re,im` for geometry queries
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[arg(long = "w", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "w", skip_serializing_if = "Option::is_none")]
    pub w_point: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Coefficients kept for non-polynomial symbols
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// `bergman` or `hardy`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    /// `norm` or `schatten`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    /// Maximum number of lattice points written
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    /// Also run the spectral surrogate
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<bool>,
    /// Write singular values
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svd: Option<bool>,
    /// Write the matrix in the binary format
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<bool>,
    /// Write the matrix as CSV
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_csv: Option<bool>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Params {
    /// Fills unset fields from `other`.
    pub fn merge(mut self, other: &Params) -> Params {
        merge_fields!(self, other; weight, g, f, measure, p, q, n, k, m, r, big_n, ns, radii, z, w_point, depth,
            truncation, space, statistic, limit, cross_check, svd, binary, matrix_csv);
        self
    }

    pub fn from_file(path: &Path) -> Result<Params, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: Vec<String>,
    pub params: Params,
    pub version: &'static str,
}

impl ExperimentConfig {
    pub fn cache_key(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

pub fn cache_dir(flag: Option<&PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.clone();
    }
    match std::env::var_os("BERGMAN_LAB_CACHE") {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from(".bergman-lab-cache"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cli = Params {
            p: Some(0.6),
            ..Default::default()
        };
        let file: Params = toml::from_str("p = 2.0\nweight = \"std:alpha=1\"\nns = [64, 128, 256]").unwrap();
        let m = cli.merge(&file);
        assert_eq!(m.p, Some(0.6));
        assert_eq!(m.weight.as_deref(), Some("std:alpha=1"));
        assert_eq!(m.ns, Some(vec![64, 128, 256]));
        assert!(toml::from_str::<Params>("bogus = 1").is_err());
    }

    #[test]
    fn key_tracks_numbers() {
        let cfg = |p| ExperimentConfig {
            command: vec!["criteria".into(), "thm42".into()],
            params: Params {
                p: Some(p),
                ..Default::default()
            },
            version: "x",
        };
        assert_eq!(cfg(0.6).cache_key(), cfg(0.6).cache_key());
        assert_ne!(cfg(0.6).cache_key(), cfg(0.6000001).cache_key());
    }
}
