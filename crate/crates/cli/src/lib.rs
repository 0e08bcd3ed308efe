//! Command implementations behind the `cmop-la` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cmop_landscape::features::{
    extract_all, global_features, missing_walk_features, walk_features, FeatureVector, WALK_STREAM,
};
use cmop_landscape::pipeline::performance::{read_performance, scan_performance, Finding};
use cmop_landscape::pipeline::{
    export_space, run_pipeline, write_feature_report, write_metadata, FeatureRow, FeatureTable, PipelineOutput,
    ProjectionMatrix,
};
use cmop_landscape::problem::{builtin, Problem, ProblemMeta};
use cmop_landscape::sample_file::{load_sample_file, parse_header};
use cmop_landscape::sampling::{default_sample_size, random_walk_with_stream};
use cmop_landscape::{par, Error};

pub mod config;

use config::{Auto, ProblemEntry, ProjectionSource, RunConfig, DEFAULT_N};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

pub const FEATURES_CSV: &str = "features.csv";
pub const WALK_CSV: &str = "walk_features.csv";
pub const METADATA_CSV: &str = "metadata.csv";
pub const FEATURE_REPORT_CSV: &str = "feature_report.csv";

/// A failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(EXIT_VALIDATION, message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Library errors from reading inputs or writing outputs.
fn io_error(context: &str, e: Error) -> CliError {
    match e {
        Error::MissingFeatures(names) => {
            CliError::new(EXIT_PRECONDITION, format!("{context}: missing features: {}", names.join(", ")))
        }
        Error::Parse { .. } => CliError::validation(format!("{context}: {e}")),
        other => CliError::config(format!("{context}: {other}")),
    }
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<Auto>,
    pub projection: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
        if let Some(s) = self.seed {
            cfg.walk_seed_base = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if let Some(p) = &self.projection {
            cfg.projection_path = Some(p.clone());
        }
    }
}

/// A built-in problem or a set of sample files, with its instance id.
struct Instance {
    id: String,
    kind: InstanceKind,
}

enum InstanceKind {
    Builtin(Problem),
    Files { meta: Arc<ProblemMeta>, samples: Vec<PathBuf> },
}

fn build_instances(cfg: &RunConfig) -> Result<Vec<Instance>, CliError> {
    cfg.problems
        .iter()
        .map(|p| {
            let kind = match p {
                ProblemEntry::Builtin { builtin: name, n, .. } => {
                    let problem = builtin(name, n.unwrap_or(DEFAULT_N))
                        .map_err(|e| CliError::config(format!("problem '{}': {e}", p.id())))?;
                    InstanceKind::Builtin(problem)
                }
                ProblemEntry::Files { samples, meta, .. } => {
                    let text = std::fs::read_to_string(meta)
                        .map_err(|e| CliError::config(format!("{}: {e}", meta.display())))?;
                    let m: ProblemMeta = serde_json::from_str(&text)
                        .map_err(|e| CliError::config(format!("{}: {e}", meta.display())))?;
                    m.validate()
                        .map_err(|e| CliError::config(format!("{}: {e}", meta.display())))?;
                    InstanceKind::Files {
                        meta: Arc::new(m),
                        samples: samples.clone(),
                    }
                }
            };
            Ok(Instance { id: p.id(), kind })
        })
        .collect()
}

fn sources(cfg: &RunConfig) -> BTreeMap<String, String> {
    cfg.problems.iter().map(|p| (p.id(), p.source())).collect()
}

struct Job<'a> {
    instance: &'a Instance,
    set: usize,
}

/// Feature rows that succeeded plus `instance set s: error` lines for the rest.
pub struct Extraction {
    pub table: FeatureTable,
    pub failures: Vec<String>,
}

fn run_jobs<F>(cfg: &RunConfig, instances: &[Instance], job: F) -> Result<Extraction, CliError>
where
    F: Fn(&Job) -> cmop_landscape::Result<Option<FeatureVector>> + Sync + Send,
{
    let mut jobs = Vec::new();
    for inst in instances {
        let sets = match &inst.kind {
            InstanceKind::Builtin(_) => cfg.sample_sets,
            InstanceKind::Files { samples, .. } => samples.len(),
        };
        jobs.extend((0..sets).map(|set| Job { instance: inst, set }));
    }
    let results = par::with_threads(cfg.threads.fixed(), || par::map(&jobs, &job));
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (j, r) in jobs.iter().zip(results) {
        match r {
            Ok(Some(features)) => rows.push(FeatureRow {
                instance: j.instance.id.clone(),
                set: j.set,
                features,
            }),
            Ok(None) => {}
            Err(e) => failures.push(format!("{} set {}: {e}", j.instance.id, j.set)),
        }
    }
    let table = FeatureTable::from_rows(rows).map_err(|e| CliError::validation(e.to_string()))?;
    Ok(Extraction { table, failures })
}

fn seed(cfg: &RunConfig, set: usize) -> u64 {
    cfg.walk_seed_base.wrapping_add(set as u64)
}

/// All features for every (instance, set).
pub fn extract_features(cfg: &RunConfig) -> Result<Extraction, CliError> {
    let instances = build_instances(cfg)?;
    run_jobs(cfg, &instances, |job| {
        let s = seed(cfg, job.set);
        match &job.instance.kind {
            InstanceKind::Builtin(p) => {
                let size = cfg.sample_size.fixed().unwrap_or_else(|| default_sample_size(p.meta().n));
                extract_all(p, size, s).map(Some)
            }
            InstanceKind::Files { meta, samples } => {
                let loaded = load_sample_file(&samples[job.set], meta)?;
                for w in &loaded.warnings {
                    log::warn!("{}: {w}", samples[job.set].display());
                }
                let mut fv = global_features(&loaded.set)?;
                fv.extend(missing_walk_features());
                Ok(Some(fv.canonical_order()))
            }
        }
    })
}

/// Walk features only; sample-file instances have no evaluator and are skipped.
pub fn extract_walk_features(cfg: &RunConfig) -> Result<Extraction, CliError> {
    let instances = build_instances(cfg)?;
    for inst in &instances {
        if matches!(inst.kind, InstanceKind::Files { .. }) {
            log::warn!("{}: sample-file problems have no walk; skipped", inst.id);
        }
    }
    run_jobs(cfg, &instances, |job| match &job.instance.kind {
        InstanceKind::Builtin(p) => {
            let walk = random_walk_with_stream(p, seed(cfg, job.set), WALK_STREAM)?;
            walk_features(&walk).map(|fv| Some(fv.canonical_order()))
        }
        InstanceKind::Files { .. } => Ok(None),
    })
}

fn create_out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| CliError::config(format!("cannot create {}: {e}", out.display())))?;
    Ok(out)
}

fn save_table(table: &FeatureTable, path: &Path) -> Result<(), CliError> {
    table.save(path).map_err(|e| io_error(&path.display().to_string(), e))
}

fn report_failures(failures: &[String]) -> Result<(), CliError> {
    if failures.is_empty() {
        return Ok(());
    }
    for f in failures {
        eprintln!("error: {f}");
    }
    Err(CliError::validation(format!("{} extraction job(s) failed", failures.len())))
}

/// `features`: writes `features.csv`.
pub fn cmd_features(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(true, false)?;
    let out = create_out_dir(cfg)?;
    let ex = extract_features(cfg)?;
    save_table(&ex.table, &out.join(FEATURES_CSV))?;
    println!("{} feature row(s) written to {}", ex.table.rows.len(), out.join(FEATURES_CSV).display());
    report_failures(&ex.failures)
}

/// `walk`: writes `walk_features.csv`.
pub fn cmd_walk(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(true, false)?;
    let out = create_out_dir(cfg)?;
    let ex = extract_walk_features(cfg)?;
    save_table(&ex.table, &out.join(WALK_CSV))?;
    println!("{} walk row(s) written to {}", ex.table.rows.len(), out.join(WALK_CSV).display());
    report_failures(&ex.failures)
}

fn load_projection(cfg: &RunConfig) -> Result<ProjectionMatrix, CliError> {
    match cfg.projection() {
        ProjectionSource::Builtin => Ok(ProjectionMatrix::builtin()),
        ProjectionSource::File(p) => ProjectionMatrix::load(&p)
            .map_err(|e| CliError::config(format!("projection {}: {e}", p.display()))),
    }
}

/// Feature table from `featuresPath`, or extracted (and saved) from the problems.
fn obtain_features(cfg: &RunConfig, out: &Path) -> Result<(FeatureTable, Vec<String>), CliError> {
    match &cfg.features_path {
        Some(p) => {
            let t = FeatureTable::load(p).map_err(|e| io_error(&p.display().to_string(), e))?;
            Ok((t, Vec::new()))
        }
        None => {
            let ex = extract_features(cfg)?;
            save_table(&ex.table, &out.join(FEATURES_CSV))?;
            Ok((ex.table, ex.failures))
        }
    }
}

fn write_with<F>(path: PathBuf, f: F) -> Result<(), CliError>
where
    F: FnOnce(std::fs::File) -> cmop_landscape::Result<()>,
{
    let file = std::fs::File::create(&path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    f(file).map_err(|e| io_error(&path.display().to_string(), e))
}

fn print_summary(out: &PipelineOutput) {
    println!(
        "instances: {} ({} dropped without performance records)",
        out.space.points.len(),
        out.dropped.len()
    );
    println!("retained features ({}): {}", out.filter.retained.len(), out.filter.retained.join(", "));
    for (a, alg) in out.space.algorithms.iter().enumerate() {
        let good = out.space.points.iter().filter(|p| p.good[a]).count();
        println!("good instances for {alg}: {good}");
    }
    if out.transform.skipped {
        println!("power transform skipped (fewer than 3 instances)");
    } else {
        let lambdas: Vec<String> = out.transform.lambdas.iter().map(|(n, l)| format!("{n}={l}")).collect();
        println!("lambda: {}", lambdas.join(", "));
    }
}

fn run_space(cfg: &RunConfig, need_performance: bool) -> Result<(), CliError> {
    cfg.validate(cfg.features_path.is_none(), need_performance)?;
    let matrix = load_projection(cfg)?;
    let performance = match &cfg.performance_path {
        Some(p) => read_performance(p).map_err(|e| io_error(&p.display().to_string(), e))?,
        None => Vec::new(),
    };
    let out = create_out_dir(cfg)?;
    let (features, failures) = obtain_features(cfg, &out)?;
    let result = run_pipeline(&features, &performance, &matrix, &sources(cfg)).map_err(|e| io_error("pipeline", e))?;
    write_with(out.join(METADATA_CSV), |f| write_metadata(&result, f))?;
    write_with(out.join(FEATURE_REPORT_CSV), |f| write_feature_report(&result, f))?;
    let files = export_space(&result.space, &out).map_err(|e| io_error(&out.display().to_string(), e))?;
    print_summary(&result);
    println!("{} instance-space file(s) written to {}", files.len(), out.display());
    report_failures(&failures)
}

/// `pipeline`: aggregate, transform, label, filter, project and export.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    run_space(cfg, true)
}

/// `project`: as `pipeline`, with performance data optional.
pub fn cmd_project(cfg: &RunConfig) -> Result<(), CliError> {
    run_space(cfg, false)
}

/// Kind of file checked by `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Performance,
    Features,
    Projection,
    Samples,
}

fn detect_kind(path: &Path, first_line: &str) -> FileKind {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        return FileKind::Projection;
    }
    let cols: Vec<&str> = first_line.split(',').map(str::trim).collect();
    match cols.as_slice() {
        ["instance", "algorithm", ..] => FileKind::Performance,
        ["instance", "set", ..] => FileKind::Features,
        _ => FileKind::Samples,
    }
}

/// Findings for a sample file without metadata: header, arity and finiteness.
fn scan_samples(text: &str) -> Vec<Finding> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let finding = |row: usize, message: String| Finding {
        rows: vec![row],
        message,
    };
    let layout = match records.next() {
        Some(Ok(h)) => {
            let cols: Vec<&str> = h.iter().map(str::trim).collect();
            match parse_header(&cols) {
                Ok(l) => l,
                Err(m) => return vec![finding(1, m)],
            }
        }
        Some(Err(e)) => return vec![finding(1, e.to_string())],
        None => return vec![finding(1, "empty file".into())],
    };
    let mut out = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        match rec {
            Err(e) => out.push(finding(row, e.to_string())),
            Ok(r) if r.len() != layout.width() => {
                out.push(finding(row, format!("expected {} fields, got {}", layout.width(), r.len())))
            }
            Ok(r) => {
                if let Some((k, v)) = r
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !v.trim().parse::<f64>().is_ok_and(f64::is_finite))
                {
                    out.push(finding(row, format!("column {}: '{}' is not a finite number", k + 1, v.trim())));
                }
            }
        }
    }
    out
}

/// Checks a file and returns its findings; an empty list means clean.
pub fn validate_file(path: &Path, meta: Option<&Path>) -> Result<(FileKind, Vec<Finding>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let kind = detect_kind(path, text.lines().next().unwrap_or(""));
    let whole = |message: String| Finding { rows: vec![], message };
    let findings = match kind {
        FileKind::Performance => scan_performance(text.as_bytes()).1,
        FileKind::Features => match FeatureTable::read(text.as_bytes(), path) {
            Ok(_) => Vec::new(),
            Err(Error::Parse { row, message, .. }) => vec![Finding { rows: vec![row], message }],
            Err(e) => vec![whole(e.to_string())],
        },
        FileKind::Projection => match serde_json::from_str::<ProjectionMatrix>(&text) {
            Ok(m) => m.problems().into_iter().map(whole).collect(),
            Err(e) => vec![whole(format!("not a projection matrix: {e}"))],
        },
        FileKind::Samples => match meta {
            None => scan_samples(&text),
            Some(mp) => {
                let mtext =
                    std::fs::read_to_string(mp).map_err(|e| CliError::config(format!("{}: {e}", mp.display())))?;
                let m: ProblemMeta = serde_json::from_str(&mtext)
                    .map_err(|e| CliError::config(format!("{}: {e}", mp.display())))?;
                match load_sample_file(path, &m) {
                    Ok(loaded) => loaded.warnings.into_iter().map(whole).collect(),
                    Err(Error::Parse { row, message, .. }) => vec![Finding { rows: vec![row], message }],
                    Err(e) => vec![whole(e.to_string())],
                }
            }
        },
    };
    Ok((kind, findings))
}

/// `validate`: prints findings, exit 1 if any.
pub fn cmd_validate(path: &Path, meta: Option<&Path>) -> Result<(), CliError> {
    let (kind, findings) = validate_file(path, meta)?;
    if findings.is_empty() {
        println!("{}: ok ({kind:?})", path.display());
        return Ok(());
    }
    for f in &findings {
        println!("{}: {f}", path.display());
    }
    Err(CliError::validation(format!(
        "{}: {} finding(s)",
        path.display(),
        findings.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_file_kinds() {
        assert_eq!(detect_kind(Path::new("a.json"), ""), FileKind::Projection);
        assert_eq!(detect_kind(Path::new("p.csv"), "instance,algorithm,run,hv"), FileKind::Performance);
        assert_eq!(detect_kind(Path::new("f.csv"), "instance,set,hv"), FileKind::Features);
        assert_eq!(detect_kind(Path::new("s.csv"), "x1,x2,f1,f2"), FileKind::Samples);
    }

    #[test]
    fn sample_scan_findings() {
        assert!(scan_samples("x1,f1,f2\n0.5,1,2\n").is_empty());
        let f = scan_samples("x1,f1,f2\n0.5,1\n0.5,inf,2\n");
        assert_eq!(f.iter().map(|f| f.rows[0]).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(scan_samples("a,b\n")[0].rows, vec![1]);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::default();
        Overrides {
            out: Some("o".into()),
            seed: Some(7),
            threads: Some(Auto::Fixed(3)),
            projection: Some("builtin".into()),
        }
        .apply(&mut cfg);
        assert_eq!(cfg.walk_seed_base, 7);
        assert_eq!(cfg.threads, Auto::Fixed(3));
        assert_eq!(cfg.out_dir(), PathBuf::from("o"));
    }
}
