//! Report files with provenance headers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chabauty_lab::Budget;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// SHA-256 of every input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub budget: Budget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, budget: Budget) -> Self {
        Provenance {
            tool: "chabauty-lab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            budget,
            radius: None,
            seed: None,
        }
    }

    /// Reads an input file and records its hash.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|_| CliError::input(format!("{} is not UTF-8", path.display())))
    }

    fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("{} {} {}", self.tool, self.version, self.command)];
        for (path, hash) in &self.inputs {
            out.push(format!("input {path} sha256 {hash}"));
        }
        let b = &self.budget;
        out.push(format!(
            "budget vertices={} length={} words={} exponent={}",
            b.max_vertices, b.max_word_length, b.max_ball_words, b.max_exponent
        ));
        if let Some(r) = self.radius {
            out.push(format!("radius {r}"));
        }
        if let Some(s) = self.seed {
            out.push(format!("seed {s}"));
        }
        out
    }
}

/// Files produced by one command; the first one added is the primary.
pub struct Artifacts {
    provenance: Provenance,
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn new(provenance: Provenance) -> Self {
        Artifacts { provenance, files: Vec::new() }
    }

    pub fn json(&mut self, name: &str, result: &impl Serialize) -> Result<(), CliError> {
        let value = json!({"provenance": self.provenance, "result": result});
        let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::input(e.to_string()))? + "\n";
        self.files.push((name.to_string(), text));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, body: &str) {
        self.commented(name, "#", body);
    }

    pub fn dot(&mut self, name: &str, body: &str) {
        self.commented(name, "//", body);
    }

    fn commented(&mut self, name: &str, mark: &str, body: &str) {
        let mut text = String::new();
        for line in self.provenance.lines() {
            let _ = writeln!(text, "{mark} {line}");
        }
        text.push_str(body);
        self.files.push((name.to_string(), text));
    }

    pub fn markdown(&mut self, name: &str, title: &str, body: &str) {
        let mut text = format!("# {title}\n\n");
        for line in self.provenance.lines() {
            let _ = writeln!(text, "> {line}  ");
        }
        text.push('\n');
        text.push_str(body);
        if !text.ends_with('\n') {
            text.push('\n');
        }
        self.files.push((name.to_string(), text));
    }

    /// Writes every file into `out`, or prints the primary file.
    pub fn emit(self, out: Option<&Path>) -> Result<(), CliError> {
        match out {
            None => {
                if let Some((_, text)) = self.files.first() {
                    print!("{text}");
                }
            }
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                for (name, text) in &self.files {
                    let path: PathBuf = dir.join(name);
                    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
                    println!("{}", path.display());
                }
            }
        }
        Ok(())
    }
}

pub fn error_object(kind: &str, message: &str, exit_code: i32) -> Value {
    json!({"error": {"kind": kind, "message": message, "exit_code": exit_code}})
}
