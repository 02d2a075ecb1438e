//! Outcome of a sampled inequality check.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub failures: usize,
    /// Smallest observed slack (rhs - lhs); negative means violated.
    pub worst_margin: f64,
    /// Points excluded from the check (e.g. detected kinks).
    pub skipped: usize,
    /// Headline quantity of the check, when it produces one (a certified radius, a worst ratio).
    pub value: Option<f64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            samples: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            skipped: 0,
            value: None,
            notes: Vec::new(),
        }
    }

    /// Records one sample whose slack is `margin`; it fails when `margin < 0`.
    pub fn record(&mut self, margin: f64) {
        self.samples += 1;
        if margin.is_nan() {
            self.failures += 1;
            self.passed = false;
            self.worst_margin = f64::NAN;
            return;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
        }
        if margin < 0.0 {
            self.failures += 1;
            self.passed = false;
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.passed = false;
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: samples={} failures={} skipped={} worst_margin={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.failures,
            self.skipped,
            self.worst_margin
        )?;
        if let Some(v) = self.value {
            write!(f, " value={v:.6e}")?;
        }
        for n in &self.notes {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}
