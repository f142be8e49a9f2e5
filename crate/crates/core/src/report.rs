//! Check records and their rendering.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named check. `residue` is empty on success and otherwise
/// describes the first discrepancy found.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    pub residue: String,
    pub millis: u128,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs `f`, timing it. `Ok(())` passes; `Err(residue)` fails.
pub fn run_check(name: &str, f: impl FnOnce() -> Result<(), String>) -> CheckResult {
    let t = Instant::now();
    let outcome = f();
    let millis = t.elapsed().as_millis();
    match outcome {
        Ok(()) => CheckResult { check: name.to_string(), status: Status::Pass, residue: String::new(), millis },
        Err(residue) => CheckResult { check: name.to_string(), status: Status::Fail, residue, millis },
    }
}

/// An ordered list of check results.
#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn push(&mut self, r: CheckResult) {
        self.checks.push(r);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One line per check, then a summary line. Timings are left out so the
    /// text is reproducible.
    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.check.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = write!(out, "{tag}  {:width$}", c.check);
            if !c.residue.is_empty() {
                let _ = write!(out, "  {}", c.residue);
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} passed, {} failed", self.checks.len(), self.checks.len() - failed, failed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_status() {
        let mut r = VerificationReport::default();
        r.push(run_check("ok", || Ok(())));
        r.push(run_check("bad", || Err("entry (0,1): 2 != 3".into())));
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        let text = r.render();
        assert!(text.contains("PASS  ok"));
        assert!(text.contains("FAIL  bad  entry (0,1)"));
        let j = r.to_json();
        assert_eq!(j["checks"][1]["status"], "fail");
    }
}
