//! Output files. Every file starts with the same header: subcommand, config
//! hash and the echoed parameters. Files are written to a temporary sibling
//! and renamed into place.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub command: String,
    pub config_hash: String,
    pub config_path: String,
    pub params: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str, cfg: &Config) -> Self {
        Header {
            command: command.to_string(),
            config_hash: cfg.hash(),
            config_path: cfg.path.display().to_string(),
            params: cfg.flattened(),
        }
    }

    /// `#`-prefixed lines for CSV and text files.
    pub fn comment_lines(&self) -> String {
        let mut s = format!("# freqdyn {}\n# config_hash: {}\n# config_path: {}\n", self.command, self.config_hash, self.config_path);
        for (k, v) in &self.params {
            s.push_str(&format!("# param {k} = {v}\n"));
        }
        s
    }

    fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "command": self.command,
            "config_hash": self.config_hash,
            "config_path": self.config_path,
            "params": params,
        })
    }
}

pub struct Report {
    pub header: Header,
    pub dir: PathBuf,
    pub verdicts: Vec<Verdict>,
    files: Vec<String>,
}

impl Report {
    pub fn new(command: &str, cfg: &Config, dir: PathBuf) -> anyhow::Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Report { header: Header::new(command, cfg), dir, verdicts: vec![], files: vec![] })
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Display) {
        self.verdicts.push(Verdict { name: name.to_string(), pass, detail: detail.to_string() });
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv<I, R>(&mut self, name: &str, columns: &[&str], rows: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let mut buf = self.header.comment_lines().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        self.write_file(name, &buf)
    }

    /// `{"header": …, "data": …}`
    pub fn write_json(&mut self, name: &str, data: &impl Serialize) -> anyhow::Result<()> {
        let doc = json!({ "header": self.header.to_json(), "data": data });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write_file(name, text.as_bytes())
    }

    pub fn write_file(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        atomic_write(&self.path(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `summary.txt` and `summary.json` and returns the overall verdict.
    pub fn finish(mut self) -> anyhow::Result<bool> {
        let mut text = self.header.comment_lines();
        for v in &self.verdicts {
            text.push_str(&verdict_line(v));
            text.push('\n');
        }
        let pass = self.pass();
        text.push_str(&format!("overall: {}\n", if pass { "PASS" } else { "FAIL" }));
        let summary = json!({
            "pass": pass,
            "verdicts": self.verdicts,
            "files": self.files,
        });
        self.write_json("summary.json", &summary)?;
        self.write_file("summary.txt", text.as_bytes())?;
        Ok(pass)
    }
}

pub fn verdict_line(v: &Verdict) -> String {
    format!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail)
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Formats a float so it round-trips.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
