//! The bundled scenario corpus and its golden outputs.
//!
//! Setting `MVK_CORPUS_DIR` points the runner at a directory laid out the
//! same way (`<name>.json` scenarios next to a `golden/` directory).

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{execute, parse_embedded, Action};
use crate::error::{Error, Result};
use crate::scenario::{self, Expectation};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$((
            $name,
            include_str!(concat!("../corpus/", $name, ".json")),
            include_str!(concat!("../corpus/golden/", $name, ".json")),
        )),*]
    };
}

const BUNDLED: &[(&str, &str, &str)] = bundled!(
    "ex-4.2-double-solid",
    "ex-4.3-quartic",
    "ex-4.4-sextic",
    "ex-4.5-bidegree",
    "ex-4.6-new",
    "ex-4.7-new2",
    "smooth-specialization",
);

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub scenario: String,
    pub golden: Option<String>,
}

fn override_dir() -> Option<PathBuf> {
    std::env::var_os("MVK_CORPUS_DIR").map(PathBuf::from)
}

fn golden_dir() -> PathBuf {
    override_dir()
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus"))
        .join("golden")
}

/// The scenarios to run, from `MVK_CORPUS_DIR` when set.
pub fn entries() -> Result<Vec<CorpusEntry>> {
    let Some(dir) = override_dir() else {
        return Ok(BUNDLED
            .iter()
            .map(|(name, scenario, golden)| CorpusEntry {
                name: name.to_string(),
                scenario: scenario.to_string(),
                golden: Some(golden.to_string()),
            })
            .collect());
    };
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let scenario = std::fs::read_to_string(&p).map_err(io)?;
            let golden = std::fs::read_to_string(dir.join("golden").join(format!("{name}.json"))).ok();
            Ok(CorpusEntry { name, scenario, golden })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub expect: Vec<Expectation>,
}

/// Scenario names with the verdicts each is expected to produce.
pub fn corpus_manifest() -> Result<Vec<ManifestEntry>> {
    entries()?
        .into_iter()
        .map(|e| {
            let s = scenario::parse(&e.scenario)?;
            Ok(ManifestEntry {
                name: e.name,
                expect: s.expect,
            })
        })
        .collect()
}

/// Runs `validate` and then every command listed in the scenario.
pub fn run_scenario(text: &str, budget: usize) -> Result<Value> {
    let loaded = scenario::load_str(text)?;
    let mut commands = vec![("validate".to_string(), Action::Validate { file: None })];
    for c in &loaded.scenario.commands {
        commands.push((c.clone(), parse_embedded(c)?));
    }
    let mut results = Vec::new();
    for (command, action) in commands {
        let out = execute(&loaded, &action, budget)?;
        results.push(json!({ "command": command, "output": out.json }));
    }
    Ok(json!({ "scenario": loaded.scenario.name, "results": results }))
}

fn verdicts(run: &Value) -> Vec<&Value> {
    run["results"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|r| r["output"]["verdicts"].as_array())
        .flatten()
        .collect()
}

/// Problems with the expectations, empty when all hold.
pub fn check_expectations(run: &Value, expect: &[Expectation]) -> Vec<String> {
    let vs = verdicts(run);
    let mut problems = Vec::new();
    for e in expect {
        let Some(v) = vs.iter().find(|v| v["rule"] == e.rule.as_str()) else {
            problems.push(format!("no verdict for rule {}", e.rule));
            continue;
        };
        if v["status"] != e.status.as_str() {
            problems.push(format!("rule {}: expected {}, got {}", e.rule, e.status, v["status"]));
        }
        if let Some(c) = &e.class {
            if v["class"] != c.as_str() {
                problems.push(format!("rule {}: expected class {c}, got {}", e.rule, v["class"]));
            }
        }
    }
    problems
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub golden_match: bool,
    pub problems: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl ScenarioReport {
    pub fn ok(&self) -> bool {
        self.golden_match && self.problems.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub scenarios: Vec<ScenarioReport>,
}

impl CorpusSummary {
    pub fn matching(&self) -> usize {
        self.scenarios.iter().filter(|s| s.ok()).count()
    }

    pub fn all_match(&self) -> bool {
        self.matching() == self.scenarios.len()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            out += &format!("{} {}\n", if s.ok() { "ok  " } else { "FAIL" }, s.name);
            for p in &s.problems {
                out += &format!("     {p}\n");
            }
        }
        out += &format!("{}/{} scenarios match golden files", self.matching(), self.scenarios.len());
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "matching": self.matching(),
            "total": self.scenarios.len(),
            "scenarios": self.scenarios,
        })
    }
}

pub fn run_corpus(budget: usize) -> Result<CorpusSummary> {
    let mut scenarios = Vec::new();
    for e in entries()? {
        let mut problems = Vec::new();
        let mut golden_match = false;
        let mut output = None;
        match run_scenario(&e.scenario, budget) {
            Ok(run) => {
                match e.golden.as_deref().map(serde_json::from_str::<Value>) {
                    Some(Ok(g)) if g == run => golden_match = true,
                    Some(Ok(_)) => problems.push("output differs from golden file".to_string()),
                    Some(Err(err)) => problems.push(format!("golden file unreadable: {err}")),
                    None => problems.push("golden file missing".to_string()),
                }
                let expect = scenario::parse(&e.scenario)?.expect;
                problems.extend(check_expectations(&run, &expect));
                output = Some(run);
            }
            Err(err) => problems.push(format!("scenario failed: {err}")),
        }
        scenarios.push(ScenarioReport {
            name: e.name,
            golden_match,
            problems,
            output,
        });
    }
    Ok(CorpusSummary { scenarios })
}

/// Regenerates every golden file and returns the paths written.
pub fn bless(budget: usize) -> Result<Vec<String>> {
    let dir = golden_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for e in entries()? {
        let run = run_scenario(&e.scenario, budget)?;
        let path = dir.join(format!("{}.json", e.name));
        let body = serde_json::to_string_pretty(&run).expect("json renders") + "\n";
        std::fs::write(&path, body).map_err(|err| Error::Io(format!("{}: {err}", path.display())))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_every_scenario() {
        let m = corpus_manifest().unwrap();
        assert_eq!(m.len(), 7);
        for e in &m {
            let want = if e.name == "smooth-specialization" { "NOT_OBSTRUCTED" } else { "OBSTRUCTED" };
            assert!(!e.expect.is_empty());
            assert!(e.expect.iter().all(|x| x.status == want), "{}", e.name);
        }
    }
}
