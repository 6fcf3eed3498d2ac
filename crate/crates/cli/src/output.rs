use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use entbound::qcore::LogBase;
use entbound::BoundReport;

/// Metadata written as `# key: value` lines ahead of every CSV.
#[derive(Clone, Debug)]
pub struct RunInfo {
    pub command: &'static str,
    pub log_base: LogBase,
    pub config: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl RunInfo {
    pub fn new(command: &'static str, log_base: LogBase) -> Self {
        Self {
            command,
            log_base,
            config: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# entbound {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {}", self.command),
            format!("# log_base: {}", self.log_base.name()),
        ];
        lines.extend(self.config.iter().map(|(k, v)| format!("# config {k} = {v}")));
        lines.extend(self.notes.iter().map(|n| format!("# {n}")));
        lines
    }
}

pub fn parse_log_base(s: &str) -> LogBase {
    if s == "e" {
        LogBase::Nats
    } else {
        LogBase::Bits
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_table(
    path: Option<&Path>,
    info: &RunInfo,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = sink(path)?;
    for line in info.header_lines() {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reports converted to the run's log base, one row each.
pub fn write_reports(path: Option<&Path>, info: &RunInfo, reports: &[BoundReport]) -> Result<()> {
    let converted: Vec<BoundReport> = reports.iter().map(|r| r.in_base(info.log_base)).collect();
    let header = converted.first().map(|r| r.csv_header()).unwrap_or_default();
    let rows: Vec<Vec<String>> = converted.iter().map(|r| r.csv_record()).collect();
    write_table(path, info, &header, &rows)
}

/// Human-readable summary: stdout when the table went to a file, stderr
/// otherwise.
pub fn summary(to_file: bool, line: &str) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}
