//! Run configuration: one JSON file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};

use cmop_landscape::problem::BUILTIN_NAMES;

use crate::CliError;

pub const DEFAULT_SAMPLE_SETS: usize = 30;
pub const DEFAULT_N: usize = 2;

/// `"auto"` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Auto {
    #[default]
    Auto,
    Fixed(usize),
}

impl Auto {
    pub fn fixed(self) -> Option<usize> {
        match self {
            Auto::Auto => None,
            Auto::Fixed(v) => Some(v),
        }
    }
}

impl std::str::FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Auto::Auto);
        }
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(Auto::Fixed(v)),
            _ => Err(format!("expected \"auto\" or a positive integer, got '{s}'")),
        }
    }
}

impl<'de> Deserialize<'de> for Auto {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Err(serde::de::Error::custom("expected a positive integer")),
            Raw::Num(v) => Ok(Auto::Fixed(v as usize)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ProblemEntry {
    Builtin {
        builtin: String,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        id: Option<String>,
        #[serde(default)]
        source: Option<String>,
    },
    Files {
        id: String,
        samples: Vec<PathBuf>,
        meta: PathBuf,
        #[serde(default)]
        source: Option<String>,
    },
}

impl ProblemEntry {
    pub fn id(&self) -> String {
        match self {
            ProblemEntry::Builtin { builtin, n, id, .. } => id
                .clone()
                .unwrap_or_else(|| format!("{builtin}_n{}", n.unwrap_or(DEFAULT_N))),
            ProblemEntry::Files { id, .. } => id.clone(),
        }
    }

    pub fn source(&self) -> String {
        match self {
            ProblemEntry::Builtin { source, .. } => source.clone().unwrap_or_else(|| "builtin".into()),
            ProblemEntry::Files { source, .. } => source.clone().unwrap_or_else(|| "file".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problems: Vec<ProblemEntry>,
    #[serde(default = "default_sets")]
    pub sample_sets: usize,
    #[serde(default)]
    pub sample_size: Auto,
    #[serde(default)]
    pub walk_seed_base: u64,
    #[serde(default)]
    pub performance_path: Option<PathBuf>,
    /// `"builtin"` or a path to a projection JSON.
    #[serde(default)]
    pub projection_path: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub threads: Auto,
    /// Precomputed feature CSV; skips extraction when set.
    #[serde(default)]
    pub features_path: Option<PathBuf>,
}

fn default_sets() -> usize {
    DEFAULT_SAMPLE_SETS
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problems: Vec::new(),
            sample_sets: DEFAULT_SAMPLE_SETS,
            sample_size: Auto::Auto,
            walk_seed_base: 0,
            performance_path: None,
            projection_path: None,
            out_dir: None,
            threads: Auto::Auto,
            features_path: None,
        }
    }
}

/// Where the projection matrix comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionSource {
    Builtin,
    File(PathBuf),
}

impl RunConfig {
    /// Reads a config; relative paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut self.performance_path, &mut self.out_dir, &mut self.features_path]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        if let Some(proj) = &mut self.projection_path {
            if proj != "builtin" && Path::new(proj.as_str()).is_relative() {
                *proj = base.join(proj.as_str()).to_string_lossy().into_owned();
            }
        }
        for prob in &mut self.problems {
            if let ProblemEntry::Files { samples, meta, .. } = prob {
                samples.iter_mut().for_each(fix);
                fix(meta);
            }
        }
    }

    pub fn projection(&self) -> ProjectionSource {
        match self.projection_path.as_deref() {
            None | Some("builtin") => ProjectionSource::Builtin,
            Some(p) => ProjectionSource::File(PathBuf::from(p)),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Structural and path checks run before any computation.
    pub fn validate(&self, need_problems: bool, need_performance: bool) -> Result<(), CliError> {
        if self.sample_sets == 0 {
            return Err(CliError::config("sampleSets must be at least 1"));
        }
        if need_problems && self.problems.is_empty() {
            return Err(CliError::config("config lists no problems"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for p in &self.problems {
            if !ids.insert(p.id()) {
                return Err(CliError::config(format!("duplicate problem id '{}'", p.id())));
            }
            match p {
                ProblemEntry::Builtin { builtin, n, .. } => {
                    if !BUILTIN_NAMES.contains(&builtin.as_str()) {
                        return Err(CliError::config(format!(
                            "unknown problem '{builtin}' (known: {})",
                            BUILTIN_NAMES.join(", ")
                        )));
                    }
                    if *n == Some(0) {
                        return Err(CliError::config(format!("problem '{builtin}': n must be at least 1")));
                    }
                }
                ProblemEntry::Files { id, samples, meta, .. } => {
                    if samples.is_empty() {
                        return Err(CliError::config(format!("problem '{id}' lists no sample files")));
                    }
                    for f in samples.iter().chain(std::iter::once(meta)) {
                        require_file(f)?;
                    }
                }
            }
        }
        if let Some(f) = &self.features_path {
            require_file(f)?;
        }
        if need_performance {
            match &self.performance_path {
                Some(p) => require_file(p)?,
                None => return Err(CliError::config("performancePath is required")),
            }
        } else if let Some(p) = &self.performance_path {
            require_file(p)?;
        }
        if let ProjectionSource::File(p) = self.projection() {
            require_file(&p)?;
        }
        Ok(())
    }
}

fn require_file(p: &Path) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("file not found: {}", p.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_defaults_and_auto_values() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"problems":[{"builtin":"LIN-1","n":3},{"builtin":"BNH","id":"bnh","source":"classic"}],
                "sampleSize":"auto","threads":4}"#,
        )
        .unwrap();
        assert_eq!(cfg.sample_sets, 30);
        assert_eq!(cfg.sample_size, Auto::Auto);
        assert_eq!(cfg.threads, Auto::Fixed(4));
        assert_eq!(cfg.problems[0].id(), "LIN-1_n3");
        assert_eq!(cfg.problems[1].id(), "bnh");
        assert_eq!(cfg.problems[1].source(), "classic");
        assert_eq!(cfg.projection(), ProjectionSource::Builtin);
        cfg.validate(true, false).unwrap();
    }

    #[test]
    fn unknown_problem_is_a_config_error() {
        let cfg: RunConfig = serde_json::from_str(r#"{"problems":[{"builtin":"ZDT9"}]}"#).unwrap();
        let err = cfg.validate(true, false).unwrap_err();
        assert_eq!(err.code, crate::EXIT_CONFIG);
        assert!(err.message.contains("ZDT9"));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"threads":0}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"sampleSize":"lots"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus":1}"#).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"sampleSets":0}"#).unwrap();
        assert!(cfg.validate(false, false).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"performancePath":"/nope.csv"}"#).unwrap();
        assert!(cfg.validate(false, false).is_err());
    }

    #[test]
    fn relative_paths_follow_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.json");
        std::fs::write(&cfg_path, r#"{"outDir":"res","projectionPath":"p.json"}"#).unwrap();
        let cfg = RunConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.out_dir(), dir.path().join("res"));
        assert_eq!(cfg.projection(), ProjectionSource::File(dir.path().join("p.json")));
    }
}
