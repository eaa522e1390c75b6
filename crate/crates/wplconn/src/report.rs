//! Itemized pass/fail reports for the verification operations.

use std::fmt;

/// Collects named identity failures; empty means the check passed.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub context: String,
    pub failures: Vec<String>,
}

impl Diagnostics {
    pub fn new(context: impl Into<String>) -> Self {
        Diagnostics { context: context.into(), failures: Vec::new() }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: Diagnostics) {
        let ctx = other.context;
        self.failures
            .extend(other.failures.into_iter().map(|f| {
                if ctx.is_empty() { f } else { format!("{ctx}: {f}") }
            }));
    }

    /// Panics with the full failure list; for tests.
    pub fn expect_ok(&self) {
        assert!(self.ok(), "{self}");
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "{}: ok", self.context);
        }
        writeln!(f, "{}: {} failure(s)", self.context, self.failures.len())?;
        for msg in &self.failures {
            writeln!(f, "  - {msg}")?;
        }
        Ok(())
    }
}
