//! Structured run reports: key-value claims, tables and check lines, rendered as
//! aligned text or as JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

/// A named input; files carry the SHA-256 of their contents.
#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub name: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

/// A computed value and the computation that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub name: String,
    pub value: String,
    pub path: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, header: &[&str]) -> Self {
        Table { title: title.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<Input>,
    pub claims: Vec<Claim>,
    pub tables: Vec<Table>,
    pub checks: Vec<CheckLine>,
    pub notes: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport { command: command.into(), ..Default::default() }
    }

    pub fn input(&mut self, name: &str, value: impl Into<String>) {
        self.inputs.push(Input { name: name.into(), value: value.into(), sha256: None });
    }

    pub fn input_file(&mut self, name: &str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(Input { name: name.into(), value: path.display().to_string(), sha256: Some(digest(&bytes)) });
        Ok(())
    }

    pub fn claim(&mut self, name: &str, value: impl ToString, path: &str) {
        self.claims.push(Claim { name: name.into(), value: value.to_string(), path: path.into() });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Machine => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "command: {}", self.command).unwrap();
        for i in &self.inputs {
            match &i.sha256 {
                Some(h) => writeln!(s, "input {}: {} (sha256 {})", i.name, i.value, h).unwrap(),
                None => writeln!(s, "input {}: {}", i.name, i.value).unwrap(),
            }
        }
        if !self.claims.is_empty() {
            s.push_str("\n[result]\n");
            let w = self.claims.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
            let v = self.claims.iter().map(|c| c.value.chars().count()).max().unwrap_or(0);
            for c in &self.claims {
                writeln!(s, "{}  {}  [{}]", pad(&c.name, w), pad(&c.value, v), c.path).unwrap();
            }
        }
        for t in &self.tables {
            writeln!(s, "\n[table: {}]", t.title).unwrap();
            let widths: Vec<usize> = (0..t.header.len())
                .map(|j| {
                    t.rows.iter().map(|r| r[j].chars().count()).chain([t.header[j].chars().count()]).max().unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                cells.iter().zip(&widths).map(|(c, &w)| pad(c, w)).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            writeln!(s, "{}", line(&t.header)).unwrap();
            for r in &t.rows {
                writeln!(s, "{}", line(r)).unwrap();
            }
        }
        if !self.checks.is_empty() {
            s.push_str("\n[checks]\n");
            for c in &self.checks {
                writeln!(s, "{:>2} {} {}: {}", c.id, if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
            }
            let passed = self.checks.iter().filter(|c| c.passed).count();
            writeln!(s, "passed {passed}/{}", self.checks.len()).unwrap();
        }
        if !self.notes.is_empty() {
            s.push_str("\n[notes]\n");
            for n in &self.notes {
                writeln!(s, "- {n}").unwrap();
            }
        }
        s
    }
}

fn pad(s: &str, w: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(w.saturating_sub(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_machine_agree_on_content() {
        let mut r = RunReport::new("gradeq cstar --group C2 --degree 3");
        r.input("group", "C2");
        r.claim("|H^3|", 2, "integral Smith normal form");
        let mut t = Table::new("classes", &["k", "order"]);
        t.push(vec!["0".into(), "1".into()]);
        t.push(vec!["1".into(), "2".into()]);
        r.tables.push(t);
        let text = r.to_text();
        assert!(text.contains("|H^3|  2  [integral Smith normal form]"));
        assert!(text.contains("k  order\n0  1\n1  2\n"));
        let json: serde_json::Value = serde_json::from_str(&r.render(Format::Machine)).unwrap();
        assert_eq!(json["claims"][0]["value"], "2");
        assert!(r.all_passed());
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
