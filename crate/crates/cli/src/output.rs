use std::path::PathBuf;

use fraisse_core::report::{Report, Summary, Verdict};

/// What a command produced: its report, the rendered text, and side files.
pub struct Outcome {
    pub report: Box<dyn Report>,
    pub text: String,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    pub fn new(report: impl Report + 'static) -> Self {
        Outcome {
            report: Box::new(report),
            text: String::new(),
            files: Vec::new(),
        }
    }

    pub fn with_file(mut self, path: Option<&PathBuf>, text: String) -> Self {
        if let Some(p) = path {
            self.files.push((p.clone(), text));
        }
        self
    }
}

/// A report assembled by a command from text and summary pairs.
pub struct TextReport {
    pub body: String,
    pub summary: Summary,
    pub verdict: Verdict,
}

impl TextReport {
    pub fn new(body: String, summary: Summary, verdict: Verdict) -> Self {
        TextReport {
            body,
            summary,
            verdict,
        }
    }
}

impl Report for TextReport {
    fn summary(&self) -> Summary {
        let mut s = self.summary.clone();
        if s.get("verdict").is_none() {
            s.push("verdict", self.verdict.word());
        }
        s
    }

    fn body(&self) -> String {
        self.body.clone()
    }

    fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}
