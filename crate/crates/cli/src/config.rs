use std::path::PathBuf;

use clap::{Args, ValueEnum};
use klcone::coxeter::CoxeterSpec;
use klcone::tableaux::Partition;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

impl Format {
    pub fn require(self, allowed: &[Format], command: &str) -> Result<Format, CliError> {
        if allowed.contains(&self) {
            Ok(self)
        } else {
            Err(CliError::Usage(format!("{command} does not support --format {self:?}").to_lowercase()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupType {
    #[value(name = "A")]
    A,
    #[value(name = "I2")]
    I2,
}

/// `--type A --n 4` is S_4; `--type I2 --m 6` is the dihedral group of order 12.
#[derive(Args, Clone, Debug)]
pub struct GroupArgs {
    #[arg(long = "type", value_enum, default_value = "A")]
    pub kind: GroupType,
    /// n for S_n
    #[arg(long)]
    pub n: Option<usize>,
    /// m for I2(m)
    #[arg(long)]
    pub m: Option<usize>,
}

impl GroupArgs {
    pub fn spec(&self) -> Result<CoxeterSpec, CliError> {
        let spec = match (self.kind, self.n, self.m) {
            (GroupType::A, Some(n), None) if n >= 2 => CoxeterSpec::symmetric(n),
            (GroupType::I2, None, Some(m)) => CoxeterSpec::Dihedral { m },
            (GroupType::A, _, _) => return Err(CliError::Usage("type A needs --n >= 2 and no --m".into())),
            (GroupType::I2, _, _) => return Err(CliError::Usage("type I2 needs --m and no --n".into())),
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

pub fn parse_lambda(s: &str) -> Result<Partition, String> {
    Partition::parse(s).map_err(|e| e.to_string())
}

/// Settings shared by all commands, checked once before dispatch.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: String,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        if self.starts == Some(0) {
            return Err(CliError::Usage("--starts must be at least 1".into()));
        }
        Ok(())
    }
}
