//! Run configuration: defaults, JSON config file, and flag overrides.
//! Precedence is defaults < config file < command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use morse_lsm::{Error, ParamGrid64, Result, SolverConfig64};

/// Default scale values of the sweep.
pub const DEFAULT_S_LIST: [f64; 5] = [1.0, 1.1, 1.2, 1.5, 1.7];

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MORSE_LSM_OUT";

/// Synthetic field family selectable with `--fixture`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Fixture {
    /// Moving vertical line, exact unit normal speed.
    Line,
    /// Expanding circle, generic curved contour.
    Circle,
}

impl FromStr for Fixture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(Fixture::Line),
            "circle" => Ok(Fixture::Circle),
            other => Err(Error::Domain(format!(
                "unknown fixture {other:?}, expected \"line\" or \"circle\""
            ))),
        }
    }
}

/// How the contour level is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSpec {
    Value(f64),
    Percentile(f64),
}

/// Fully resolved run configuration shared by the sweep subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: ParamGrid64,
    pub s_list: Vec<f64>,
    pub level: LevelSpec,
    pub solver: SolverConfig64,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
    pub fixture: Option<Fixture>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.solver.validate()?;
        if self.s_list.is_empty() {
            return Err(Error::Domain("s list must not be empty".into()));
        }
        for w in self.s_list.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(format!(
                    "s list must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&s0) = self.s_list.first() {
            if !(s0 > 0.0) {
                return Err(Error::Domain(format!("scales must be > 0, got {s0}")));
            }
        }
        if let LevelSpec::Percentile(p) = self.level {
            if !(0.0..=100.0).contains(&p) {
                return Err(Error::Domain(format!(
                    "level percentile must lie in [0, 100], got {p}"
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Domain("worker count must be >= 1".into()));
        }
        Ok(())
    }
}

/// JSON mirror of [`RunConfig`]; every field optional so partial files work.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: Option<GridSpec>,
    pub s_list: Option<Vec<f64>>,
    pub level: Option<f64>,
    pub level_percentile: Option<f64>,
    pub solver: Option<SolverConfig64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub fixture: Option<Fixture>,
}

/// Grid spec in the flag order `a_min,a_max,n_a,C_min,C_max,n_C`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub a_min: f64,
    pub a_max: f64,
    pub n_a: usize,
    #[serde(rename = "C_min")]
    pub c_min: f64,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    #[serde(rename = "n_C")]
    pub n_c: usize,
}

impl From<GridSpec> for ParamGrid64 {
    fn from(g: GridSpec) -> Self {
        ParamGrid64 {
            a_min: g.a_min,
            a_max: g.a_max,
            n_a: g.n_a,
            c_min: g.c_min,
            c_max: g.c_max,
            n_c: g.n_c,
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 6 {
            return Err(format!(
                "grid spec needs 6 comma-separated values a_min,a_max,n_a,C_min,C_max,n_C, got {}",
                parts.len()
            ));
        }
        let f = |k: usize| -> std::result::Result<f64, String> {
            parts[k].trim().parse().map_err(|e| format!("grid spec field {}: {e}", k + 1))
        };
        let u = |k: usize| -> std::result::Result<usize, String> {
            parts[k].trim().parse().map_err(|e| format!("grid spec field {}: {e}", k + 1))
        };
        Ok(GridSpec {
            a_min: f(0)?,
            a_max: f(1)?,
            n_a: u(2)?,
            c_min: f(3)?,
            c_max: f(4)?,
            n_c: u(5)?,
        })
    }
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("config file {}: {e}", path.display())))
}

/// Flag values that override the config file. `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub grid: Option<GridSpec>,
    pub s_list: Option<Vec<f64>>,
    pub level: Option<f64>,
    pub level_percentile: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub fixture: Option<Fixture>,
}

/// Merge defaults, an optional config file, and flag overrides into a
/// validated [`RunConfig`].
pub fn resolve(config_path: Option<&Path>, flags: Overrides) -> Result<RunConfig> {
    let file = match config_path {
        Some(p) => load_config_file(p)?,
        None => ConfigFile::default(),
    };

    let grid: ParamGrid64 = flags
        .grid
        .or(file.grid)
        .map(Into::into)
        .unwrap_or_else(ParamGrid64::default_rect);
    let s_list = flags
        .s_list
        .or(file.s_list)
        .unwrap_or_else(|| DEFAULT_S_LIST.to_vec());
    // an explicit value beats a percentile at the same precedence tier
    let level = match (
        flags.level.or(file.level),
        flags.level_percentile.or(file.level_percentile),
    ) {
        (Some(v), _) => LevelSpec::Value(v),
        (None, Some(p)) => LevelSpec::Percentile(p),
        (None, None) => LevelSpec::Percentile(50.0),
    };
    let out_dir = flags
        .out
        .or(file.out)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let config = RunConfig {
        grid,
        s_list,
        level,
        solver: file.solver.unwrap_or_default(),
        out_dir,
        workers: flags.workers.or(file.workers),
        fixture: flags.fixture.or(file.fixture),
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_ranges() {
        let cfg = resolve(None, Overrides::default()).unwrap();
        assert_eq!(cfg.grid, ParamGrid64::default_rect());
        assert_eq!(cfg.s_list, DEFAULT_S_LIST.to_vec());
        assert_eq!(cfg.level, LevelSpec::Percentile(50.0));
        assert!(cfg.fixture.is_none());
    }

    #[test]
    fn grid_spec_parses_flag_order() {
        let g: GridSpec = "0.8,2,61,12,26,71".parse().unwrap();
        let grid: ParamGrid64 = g.into();
        assert_eq!(grid, ParamGrid64::default_rect());
        assert!("1,2,3".parse::<GridSpec>().is_err());
        assert!("a,2,61,12,26,71".parse::<GridSpec>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"s_list": [1.0, 2.0], "level": 0.3, "workers": 2}"#,
        )
        .unwrap();
        let cfg = resolve(
            Some(&path),
            Overrides {
                workers: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.s_list, vec![1.0, 2.0]);
        assert_eq!(cfg.level, LevelSpec::Value(0.3));
        assert_eq!(cfg.workers, Some(4));
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = resolve(None, Overrides::default()).unwrap();
        cfg.s_list = vec![1.2, 1.1];
        assert!(cfg.validate().is_err());
        cfg.s_list = vec![];
        assert!(cfg.validate().is_err());
        let over = Overrides {
            level_percentile: Some(130.0),
            ..Default::default()
        };
        assert!(resolve(None, over).is_err());
    }
}
