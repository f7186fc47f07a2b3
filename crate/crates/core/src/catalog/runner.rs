use std::collections::BTreeSet;
use std::path::Path;

use super::files::{Expectation, Scenario};
use super::loader::{builtin_files, disk_files, Catalog, LoadError, Loader, Location};
use crate::conformance::{check, ConformanceError, DeviationReport};
use crate::ui::CheckConfig;

/// Result of checking one scenario against its expectations.
#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub path: String,
    pub scenario: Scenario,
    pub report: Result<DeviationReport, String>,
    /// Expected but not reported.
    pub missing: Vec<Expectation>,
    /// Reported but not expected.
    pub unexpected: Vec<Expectation>,
    /// Override subjects no finding carries.
    pub unmatched_overrides: Vec<String>,
    pub passed: bool,
}

impl ScenarioOutcome {
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}", self.name);
        match &self.report {
            Err(e) => s.push_str(&format!(" error: {e}")),
            Ok(r) => {
                if r.is_dark() != self.scenario.expected_dark {
                    s.push_str(&format!(" dark={} expected {}", r.is_dark(), self.scenario.expected_dark));
                }
            }
        }
        for m in &self.missing {
            s.push_str(&format!(" missing {} {} {}", m.category, m.subject, m.dyad));
        }
        for u in &self.unexpected {
            s.push_str(&format!(" unexpected {} {} {}", u.category, u.subject, u.dyad));
        }
        for o in &self.unmatched_overrides {
            s.push_str(&format!(" unmatched override {o}"));
        }
        s
    }
}

/// Loads a scenario's design and checks it against its catalog entry.
pub fn run_scenario(
    catalog: &Catalog,
    loader: &Loader,
    loc: &Location,
    cfg: &CheckConfig,
) -> Result<ScenarioOutcome, LoadError> {
    let scenario = loader.load_scenario(loc)?;
    let entry = catalog.require(&scenario.standard)?;
    let app = loader.load_app(&loc.join(&scenario.app))?;
    let ui = scenario.ui.as_ref().map(|u| loader.load_ui(&loc.join(u))).transpose()?;
    let domain = match &scenario.domain {
        Some(d) => entry.domain.overlay(d),
        None => entry.domain.clone(),
    };
    let report = check(entry, &app, ui.as_ref(), &scenario.benefit, cfg, &domain);
    Ok(judge(scenario, loc.to_string(), report))
}

fn judge(scenario: Scenario, path: String, report: Result<DeviationReport, ConformanceError>) -> ScenarioOutcome {
    let expected: BTreeSet<Expectation> = scenario.expected.iter().cloned().collect();
    let (report, actual, subjects) = match report {
        Ok(r) => {
            let actual: BTreeSet<Expectation> = r
                .deviations()
                .map(|d| Expectation { category: d.category, subject: d.subject.clone(), dyad: d.dyad })
                .collect();
            let subjects: BTreeSet<String> = r.deviations().map(|d| d.subject.clone()).collect();
            (Ok(r), actual, subjects)
        }
        Err(e) => (Err(e.to_string()), BTreeSet::new(), BTreeSet::new()),
    };
    let missing: Vec<Expectation> = expected.difference(&actual).cloned().collect();
    let unexpected: Vec<Expectation> = actual.difference(&expected).cloned().collect();
    let unmatched_overrides: Vec<String> =
        scenario.benefit.overrides.iter().map(|(s, _)| s.clone()).filter(|s| !subjects.contains(s)).collect();
    let passed = match &report {
        Ok(r) => {
            missing.is_empty() && unexpected.is_empty() && unmatched_overrides.is_empty()
                && r.is_dark() == scenario.expected_dark
        }
        Err(_) => false,
    };
    ScenarioOutcome {
        name: scenario.name.clone(),
        path,
        scenario,
        report,
        missing,
        unexpected,
        unmatched_overrides,
        passed,
    }
}

/// Outcomes of a batch of scenarios, in path order.
#[derive(Clone, Debug, Default)]
pub struct CorpusReport {
    pub outcomes: Vec<ScenarioOutcome>,
}

impl CorpusReport {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed).count()
    }

    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }

    pub fn lines(&self) -> Vec<String> {
        self.outcomes.iter().map(ScenarioOutcome::summary).collect()
    }
}

pub fn run_locations(
    catalog: &Catalog,
    loader: &Loader,
    locs: &[Location],
    cfg: &CheckConfig,
) -> Result<CorpusReport, LoadError> {
    let outcomes = locs.iter().map(|l| run_scenario(catalog, loader, l, cfg)).collect::<Result<_, _>>()?;
    Ok(CorpusReport { outcomes })
}

/// Runs every shipped scenario under `dir` (e.g. `scenarios/patterns`).
pub fn run_builtin_corpus(catalog: &Catalog, loader: &Loader, dir: &str, cfg: &CheckConfig) -> Result<CorpusReport, LoadError> {
    let locs: Vec<Location> = builtin_files(dir, "scenario").into_iter().map(Location::builtin).collect();
    run_locations(catalog, loader, &locs, cfg)
}

/// Runs every `.scenario` file in a directory tree.
pub fn run_corpus(catalog: &Catalog, loader: &Loader, dir: &Path, cfg: &CheckConfig) -> Result<CorpusReport, LoadError> {
    let locs: Vec<Location> = disk_files(dir, "scenario")?.into_iter().map(Location::Disk).collect();
    run_locations(catalog, loader, &locs, cfg)
}
