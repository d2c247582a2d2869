use std::fmt;

/// One named check with its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// An ordered list of checks. Reports never fail on their own; callers
/// decide what a failed entry means.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Records `residual ≤ threshold` under `name` and returns the outcome.
    pub fn record(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> bool {
        let passed = residual.is_finite() && residual <= threshold;
        self.checks.push(Check { name: name.into(), residual, threshold, passed });
        passed
    }

    /// Records a yes/no property (residual 0 or 1).
    pub fn flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.record(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether the named check exists and passed.
    pub fn ok(&self, name: &str) -> bool {
        self.get(name).map(|c| c.passed).unwrap_or(false)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// Appends another report with every name prefixed by `prefix/`.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:>10.3e}  {}",
                c.name,
                c.residual,
                if c.passed { "ok" } else { "FAIL" },
                width = width
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_and_merge() {
        let mut r = Report::new();
        assert!(r.record("a", 1e-12, 1e-9));
        assert!(!r.record("b", 1.0, 1e-9));
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "b");
        let mut outer = Report::new();
        outer.flag("c", true);
        outer.merge("inner", r);
        assert!(outer.get("inner/a").is_some());
        assert!(!outer.record("nan", f64::NAN, 1.0));
    }
}
