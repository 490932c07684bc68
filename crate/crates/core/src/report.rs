//! Report rendering.
//!
//! Every report has a human-readable body and a machine-readable summary block:
//!
//! ```text
//! --- summary ---
//! key=value
//! ...
//! --- end ---
//! ```
//!
//! Keys are lowercase with underscores; values never contain newlines. The
//! `verdict` key is always present and is `pass`, `fail` or `inconclusive`.

use std::fmt::Write as _;

use crate::structure::{emit_structure, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Summary,
    #[default]
    Full,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "summary" => Ok(Format::Summary),
            "full" => Ok(Format::Full),
            other => Err(format!("unknown format {other}; expected summary or full")),
        }
    }
}

/// Ordered key=value pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary(pub Vec<(String, String)>);

impl Summary {
    pub fn new() -> Self {
        Summary(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let v = value.to_string().replace('\n', " ");
        self.0.push((key.to_string(), v));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("--- summary ---\n");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k}={v}");
        }
        out.push_str("--- end ---\n");
        out
    }
}

/// Outcome of a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    /// A resource cap stopped the check before it could decide.
    Inconclusive(String),
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail(w) => Some(w),
            _ => None,
        }
    }

    /// Combine: any failure wins, then inconclusive, then pass.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail(_), _) | (_, f @ Verdict::Fail(_)) => f,
            (i @ Verdict::Inconclusive(_), _) | (_, i @ Verdict::Inconclusive(_)) => i,
            _ => Verdict::Pass,
        }
    }
}

/// A counterexample: what failed and the structures involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub description: String,
    pub structures: Vec<(String, Structure)>,
}

impl Witness {
    pub fn new(description: impl Into<String>) -> Self {
        Witness {
            description: description.into(),
            structures: Vec::new(),
        }
    }

    pub fn with(mut self, id: &str, s: &Structure) -> Self {
        self.structures.push((id.to_string(), s.clone()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!("witness: {}\n", self.description);
        for (id, s) in &self.structures {
            out.push_str(&emit_structure(id, s));
        }
        out
    }
}

/// Anything that renders as body plus summary block.
pub trait Report {
    fn summary(&self) -> Summary;

    fn body(&self) -> String;

    fn passed(&self) -> bool;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Summary => self.summary().render(),
            Format::Full => {
                let mut out = self.body();
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                out.push_str(&self.summary().render());
                out
            }
        }
    }
}

pub(crate) fn verdict_line(out: &mut String, label: &str, v: &Verdict) {
    match v {
        Verdict::Pass => {
            let _ = writeln!(out, "{label}: pass");
        }
        Verdict::Inconclusive(why) => {
            let _ = writeln!(out, "{label}: inconclusive ({why})");
        }
        Verdict::Fail(w) => {
            let _ = writeln!(out, "{label}: fail");
            out.push_str(&w.render());
        }
    }
}
