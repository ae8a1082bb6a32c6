//! Pass/fail bookkeeping shared by the property validators.

use std::fmt;

use serde::Serialize;

/// A concrete instance of a checked relation, kept for the tightest case and
/// for the first violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Names of the variables (or tags) the relation was evaluated on.
    pub subjects: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs` for `lhs <= rhs`, `-|lhs - rhs|` for equalities, and
    /// 0 / -1 for exact boolean relations. Negative beyond the tolerance
    /// means violated.
    pub slack: f64,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) lhs={:.17} rhs={:.17} slack={:.3e}",
            self.subjects.join(", "),
            self.lhs,
            self.rhs,
            self.slack
        )?;
        if !self.detail.is_empty() {
            write!(f, " [{}]", self.detail)?;
        }
        Ok(())
    }
}

/// Outcome of one named property over many instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub evaluated: usize,
    /// Instances where a conditional property's premise held.
    pub active: usize,
    pub violations: usize,
    pub worst: Option<Witness>,
    pub first_violation: Option<Witness>,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            evaluated: 0,
            active: 0,
            violations: 0,
            worst: None,
            first_violation: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn worst_slack(&self) -> Option<f64> {
        self.worst.as_ref().map(|w| w.slack)
    }

    pub fn mark_active(&mut self) {
        self.active += 1;
    }

    fn record<F>(
        &mut self,
        lhs: f64,
        rhs: f64,
        slack: f64,
        violated: bool,
        subjects: F,
        detail: &str,
    ) where
        F: FnOnce() -> Vec<String>,
    {
        self.evaluated += 1;
        let tighter = self.worst.as_ref().is_none_or(|w| slack < w.slack);
        if !(tighter || violated) {
            return;
        }
        let witness = Witness {
            subjects: subjects(),
            lhs,
            rhs,
            slack,
            detail: detail.to_string(),
        };
        if violated {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(witness.clone());
            }
        }
        if tighter {
            self.worst = Some(witness);
        }
    }

    /// Records `lhs <= rhs` up to the tolerance.
    pub fn le<F>(&mut self, lhs: f64, rhs: f64, subjects: F)
    where
        F: FnOnce() -> Vec<String>,
    {
        let slack = rhs - lhs;
        let violated = slack.is_nan() || slack < -self.tolerance;
        self.record(lhs, rhs, slack, violated, subjects, "");
    }

    /// Records `lhs == rhs` up to the tolerance.
    pub fn approx_eq<F>(&mut self, lhs: f64, rhs: f64, subjects: F)
    where
        F: FnOnce() -> Vec<String>,
    {
        let slack = -(lhs - rhs).abs();
        let violated = slack.is_nan() || slack < -self.tolerance;
        self.record(lhs, rhs, slack, violated, subjects, "");
    }

    /// Records an exact relation.
    pub fn holds<F>(&mut self, ok: bool, subjects: F, detail: &str)
    where
        F: FnOnce() -> Vec<String>,
    {
        let (lhs, slack) = if ok { (1.0, 0.0) } else { (0.0, -1.0) };
        self.record(lhs, 1.0, slack, !ok, subjects, detail);
    }

    /// Folds another run of the same property into this one, prefixing the
    /// other run's witnesses with `context`.
    pub fn absorb(&mut self, other: Check, context: &str) {
        let tag = |mut w: Witness| {
            if !context.is_empty() {
                w.subjects.insert(0, context.to_string());
            }
            w
        };
        self.evaluated += other.evaluated;
        self.active += other.active;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation.map(tag);
        }
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|cur| w.slack < cur.slack) {
                self.worst = Some(tag(w));
            }
        }
    }
}

/// A set of checks produced by one validator run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Merges checks by name; unknown names are appended.
    pub fn absorb(&mut self, other: Report, context: &str) {
        for c in other.checks {
            match self.checks.iter_mut().find(|m| m.name == c.name) {
                Some(mine) => mine.absorb(c, context),
                None => {
                    let mut fresh = Check::new(c.name.clone(), c.tolerance);
                    fresh.absorb(c, context);
                    self.checks.push(fresh);
                }
            }
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            write!(f, "  [{status}] {} (n={}", c.name, c.evaluated)?;
            if c.active > 0 {
                write!(f, ", active={}", c.active)?;
            }
            if c.violations > 0 {
                write!(f, ", violations={}", c.violations)?;
            }
            if let Some(s) = c.worst_slack() {
                write!(f, ", worst slack={s:.3e}")?;
            }
            writeln!(f, ")")?;
            if let Some(w) = &c.first_violation {
                writeln!(f, "      witness: {w}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
