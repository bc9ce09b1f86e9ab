//! Scenario runner, report rendering and report comparison.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::models::{run_scenario, ScenarioError, ScenarioId, ScenarioReport, ScenarioSettings, SCHEMA_VERSION};
use crate::oracle::Execution;

/// Top-level report keys, in order.
pub const REPORT_KEYS: [&str; 9] =
    ["schema_version", "scenario", "config", "classical", "quantum", "solution", "verdict", "oracle", "diagnostics"];

/// Paths that never take part in a comparison.
pub const IGNORED_PATHS: [&str; 1] = ["diagnostics.timings_ms"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: not valid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}; expected text or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioId,
    pub a: f64,
    pub b: f64,
    pub grids: Vec<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub verbose: bool,
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(scenario: ScenarioId) -> Self {
        let s = ScenarioSettings::default();
        RunConfig {
            scenario,
            a: s.a,
            b: s.b,
            grids: s.grids,
            format: Format::Text,
            out: None,
            verbose: false,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.a.is_finite() && self.b.is_finite() && self.b > 0.0 && self.a > self.b) {
            return Err(CliError::InvalidConfig(format!("need a > b > 0, got a = {}, b = {}", self.a, self.b)));
        }
        if self.grids.is_empty() {
            return Err(CliError::InvalidConfig("at least one grid size is required".into()));
        }
        if let Some(n) = self.grids.iter().find(|&&n| n < 8 || n % 2 != 0) {
            return Err(CliError::InvalidConfig(format!("grid size {n} must be even and at least 8")));
        }
        if self.grids.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::InvalidConfig(format!("grid sizes {:?} must increase", self.grids)));
        }
        Ok(())
    }

    pub fn settings(&self) -> ScenarioSettings {
        ScenarioSettings { a: self.a, b: self.b, grids: self.grids.clone(), execution: self.execution }
    }
}

/// Parse `16,24,32`.
pub fn parse_grids(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad grid size {t:?}: {e}")))
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ScenarioReport,
    pub rendered: String,
    pub exit_code: i32,
}

/// Validate, run the scenario, render it and write it to `out` if given.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let report = run_scenario(config.scenario, &config.settings())?;
    let rendered = match config.format {
        Format::Json => render_json(&report),
        Format::Text => render_text(&report, config.verbose),
    };
    if let Some(path) = &config.out {
        std::fs::write(path, &rendered).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let exit_code = if report.succeeded() { 0 } else { 1 };
    Ok(RunOutcome { report, rendered, exit_code })
}

pub fn render_json(report: &ScenarioReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(r: &ScenarioReport, verbose: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario   {}", r.scenario);
    let _ = writeln!(s, "instance   a = {}, b = {}, grids = {:?}", r.config.a, r.config.b, r.oracle.grids);
    let _ = writeln!(s, "verdict    {} (expected {})", tag(&r.verdict.tag), tag(&r.verdict.expected));
    if !r.verdict.narrative.is_empty() {
        let _ = writeln!(s, "           {}", r.verdict.narrative);
    }
    let _ = writeln!(s, "solution   {}", tag(&r.solution.status));
    for (k, v) in &r.solution.assignments {
        let _ = writeln!(s, "  {k} = {v}");
    }
    if !r.solution.free_params.is_empty() {
        let _ = writeln!(s, "  free: {}", r.solution.free_params.join(", "));
    }
    let _ = writeln!(s, "potential  {}", r.quantum.potential);
    let _ = writeln!(s, "momenta");
    for (k, v) in &r.quantum.momenta {
        let _ = writeln!(s, "  {k} = {v}");
    }
    if verbose {
        let _ = writeln!(s, "constraints");
        for c in &r.classical.chain {
            let _ = writeln!(s, "  phi{} [{}] {}", c.index, c.kind, c.expr);
        }
        let _ = writeln!(s, "dirac brackets");
        for (k, v) in &r.classical.dirac {
            let _ = writeln!(s, "  {k} = {v}");
        }
    }
    let _ = writeln!(s, "oracle     {}", if r.oracle.all_passed { "all checks passed" } else { "FAILED" });
    for sw in &r.oracle.sweeps {
        let rows: Vec<_> = r.oracle.table.iter().filter(|t| t.identity == sw.identity).collect();
        let vals: Vec<String> = rows
            .iter()
            .map(|t| if sw.expect_zero { format!("{}:{:.1e}", t.n, t.residual) } else { format!("{}:{:.3e}", t.n, t.absolute) })
            .collect();
        let _ = writeln!(s, "  [{}] {} {}", if sw.passed { "ok" } else { "FAIL" }, sw.identity, vals.join(" "));
    }
    for m in &r.diagnostics.mismatches {
        let _ = writeln!(s, "mismatch   {m}");
    }
    if verbose {
        for (k, v) in &r.diagnostics.timings_ms {
            let _ = writeln!(s, "time       {k}: {v:.0} ms");
        }
    }
    s
}

fn tag<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffEntry {
    pub path: String,
    pub left: Option<Value>,
    pub right: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportDiff {
    pub entries: Vec<DiffEntry>,
}

impl ReportDiff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Top-level sections that differ.
    pub fn sections(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.entries.iter().map(|e| e.path.split(['.', '[']).next().unwrap_or("").to_string()).collect();
        out.dedup();
        out
    }
}

impl std::fmt::Display for ReportDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: &Option<Value>| v.as_ref().map_or("<absent>".to_string(), Value::to_string);
        for e in &self.entries {
            writeln!(f, "{}: {} -> {}", e.path, show(&e.left), show(&e.right))?;
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let v: Value = serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })?;
    check_schema(&v).map_err(|m| CliError::SchemaMismatch(format!("{}: {m}", path.display())))?;
    Ok(v)
}

fn check_schema(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("top level is not an object")?;
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let mut want = REPORT_KEYS.to_vec();
    keys.sort_unstable();
    want.sort_unstable();
    if keys != want {
        return Err(format!("keys {keys:?} differ from {want:?}"));
    }
    match obj["schema_version"].as_u64() {
        Some(n) if n == SCHEMA_VERSION as u64 => Ok(()),
        other => Err(format!("schema_version {other:?}, this build reads {SCHEMA_VERSION}")),
    }
}

/// Field-level difference between two report values, ignoring timings.
pub fn diff_values(left: &Value, right: &Value) -> ReportDiff {
    let mut entries = Vec::new();
    walk("", left, right, &mut entries);
    ReportDiff { entries }
}

fn walk(path: &str, l: &Value, r: &Value, out: &mut Vec<DiffEntry>) {
    if IGNORED_PATHS.contains(&path) {
        return;
    }
    let child = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match (l, r) {
        (Value::Object(a), Value::Object(b)) => {
            let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => walk(&child(k), x, y, out),
                    (x, y) => out.push(DiffEntry { path: child(k), left: x.cloned(), right: y.cloned() }),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            for i in 0..a.len().max(b.len()) {
                let p = format!("{path}[{i}]");
                match (a.get(i), b.get(i)) {
                    (Some(x), Some(y)) => walk(&p, x, y, out),
                    (x, y) => out.push(DiffEntry { path: p, left: x.cloned(), right: y.cloned() }),
                }
            }
        }
        _ if l != r => out.push(DiffEntry { path: path.to_string(), left: Some(l.clone()), right: Some(r.clone()) }),
        _ => {}
    }
}

pub fn diff_reports(r1: &Path, r2: &Path) -> Result<ReportDiff, CliError> {
    let (a, b) = (load(r1)?, load(r2)?);
    Ok(diff_values(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(ScenarioId::TorusIntrinsic);
        assert!(c.validate().is_ok());
        c.b = 2.0;
        assert!(matches!(c.validate(), Err(CliError::InvalidConfig(_))));
        let mut c = RunConfig::new(ScenarioId::TorusIntrinsic);
        c.grids = vec![16, 9];
        assert!(c.validate().is_err());
        c.grids = vec![];
        assert!(c.validate().is_err());
    }

    #[test]
    fn invalid_config_fails_before_running() {
        let mut c = RunConfig::new(ScenarioId::TorusExtrinsic);
        c.a = 1.0;
        assert!(matches!(run(&c), Err(CliError::InvalidConfig(_))));
    }

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grids("16, 24,32").unwrap(), vec![16, 24, 32]);
        assert!(parse_grids("16,x").is_err());
    }

    #[test]
    fn value_diff_ignores_timings() {
        let a = json!({"a": 1, "diagnostics": {"timings_ms": {"x": 1.0}, "mismatches": []}, "l": [1, 2]});
        let b = json!({"a": 2, "diagnostics": {"timings_ms": {"x": 9.0}, "mismatches": []}, "l": [1, 3, 4]});
        let d = diff_values(&a, &b);
        let paths: Vec<&str> = d.entries.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, ["a", "l[1]", "l[2]"]);
        assert!(diff_values(&a, &a).is_empty());
    }

    #[test]
    fn schema_is_checked() {
        assert!(check_schema(&json!({"schema_version": 1})).is_err());
        let full: serde_json::Map<String, Value> =
            REPORT_KEYS.iter().map(|k| (k.to_string(), json!(SCHEMA_VERSION))).collect();
        assert!(check_schema(&Value::Object(full.clone())).is_ok());
        let mut bumped = full;
        bumped.insert("schema_version".into(), json!(SCHEMA_VERSION + 1));
        assert!(check_schema(&Value::Object(bumped)).is_err());
    }
}
