use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative-odds differences inside this band count as zero.
    pub sign_eps: f64,
    pub tol_alpha: f64,
    pub tol_iia: f64,
    pub tol_gamma: f64,
    pub tol_sum: f64,
    /// Menu independence of default odds.
    pub tol_mido: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { sign_eps: 1e-7, tol_alpha: 1e-6, tol_iia: 1e-7, tol_gamma: 1e-7, tol_sum: 1e-7, tol_mido: 1e-9 }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), CliError> {
        let all = [self.sign_eps, self.tol_alpha, self.tol_iia, self.tol_gamma, self.tol_sum, self.tol_mido];
        if all.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(CliError::Input("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    exact: Option<bool>,
    seed: Option<u64>,
    format: Option<Format>,
    restarts: Option<usize>,
    #[serde(default)]
    tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub exact: bool,
    pub seed: u64,
    pub format: Format,
    pub restarts: usize,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Flags win over the config file, which wins over defaults.
    pub fn resolve(path: Option<&Path>, exact_flag: bool, format: Option<Format>, seed: Option<u64>) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        file.tolerances.validate()?;
        let env_exact = std::env::var("DST_EXACT").map(|v| v == "1").unwrap_or(false);
        let restarts = file.restarts.unwrap_or(16);
        if restarts == 0 {
            return Err(CliError::Input("restarts must be at least one".into()));
        }
        Ok(Self {
            exact: exact_flag || env_exact || file.exact.unwrap_or(false),
            seed: seed.or(file.seed).unwrap_or(0),
            format: format.or(file.format).unwrap_or(Format::Json),
            restarts,
            tolerances: file.tolerances,
        })
    }
}
