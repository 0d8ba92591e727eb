use std::path::Path;

use serde::{Deserialize, Serialize};
use zcycles::points::PointModel;
use zcycles::tower::{FieldTower, DEFAULT_UNIVERSE_CAP};

use crate::error::CliError;

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

fn default_r_max() -> usize {
    3
}
fn default_cap() -> u64 {
    DEFAULT_UNIVERSE_CAP
}
fn default_seed() -> u64 {
    0xC0FFEE
}
fn default_samples() -> usize {
    200
}
fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    /// torsion level for the Galois suite
    pub n: u64,
    /// bound on the size of the universe field and group
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// minimum sample count for sampled checks
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// suites to run; empty means all
    #[serde(default)]
    pub suites: Vec<String>,
    pub model: ModelSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Elliptic {
        p: u64,
        a: i64,
        b: i64,
        #[serde(rename = "N")]
        n: u64,
        #[serde(default = "one")]
        base_degree: u32,
        /// first candidate modulus, by index, in the irreducibility scan
        #[serde(default)]
        modulus_start: u64,
    },
    Mock {
        factors: Vec<u64>,
        frob: Vec<Vec<i64>>,
        #[serde(rename = "N")]
        n: u64,
    },
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Scenario {
    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |r| line_col(text, r.start));
            CliError::Config {
                path: path.to_string(),
                line,
                column,
                message: e.message().trim().replace('\n', "; "),
            }
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_CONFIG, "configs/default.toml").expect("bundled config parses")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=3).contains(&self.r_max) {
            return Err(CliError::Invalid(format!(
                "r_max = {} outside 1..=3",
                self.r_max
            )));
        }
        if self.n < 2 {
            return Err(CliError::Invalid(format!(
                "n = {} must be at least 2",
                self.n
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Invalid("samples must be positive".into()));
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<PointModel, CliError> {
        match &self.model {
            ModelSpec::Elliptic {
                p,
                a,
                b,
                n,
                base_degree,
                modulus_start,
            } => {
                let tower = FieldTower::new(*p, *base_degree, *n, self.cap, *modulus_start)?;
                Ok(PointModel::build_elliptic(tower, *a, *b)?)
            }
            ModelSpec::Mock { factors, frob, n } => {
                Ok(PointModel::build_mock(factors, frob.clone(), *n, self.cap)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_parses() {
        let s = Scenario::bundled();
        assert_eq!(s.r_max, 3);
        assert_eq!(s.n, 3);
        assert_eq!(s.seed, 0xC0FFEE);
        assert!(matches!(
            s.model,
            ModelSpec::Elliptic {
                p: 5,
                a: 1,
                b: 1,
                n: 6,
                ..
            }
        ));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = Scenario::parse(
            "name = \"x\"\nn = 3\n[model]\nkind = \"mock\"\nfactors = [3,\n",
            "t.toml",
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config { line: 6, .. }), "{err}");
        let err = Scenario::parse("name = \"x\"\nn = 3\nbogus = 1\n[model]\nkind = \"mock\"\nfactors = []\nfrob = []\nN = 1\n", "t.toml")
            .unwrap_err();
        assert!(
            matches!(
                err,
                CliError::Config {
                    line: 3,
                    column: 1,
                    ..
                }
            ),
            "{err}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
