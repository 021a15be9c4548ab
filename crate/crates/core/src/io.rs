//! Text formats: conformation blocks, FASTA-like sequences, experiment configs.
//!
//! A conformation block is a label line followed by one or more lines of
//! angle values (space or comma separated). `#` starts a comment. A line
//! whose first token is not a number starts the next block.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::ExperimentConfig;
use crate::model::{kd_transform, Conformation, Sequence};
use crate::optimizer::TracePoint;

/// A labelled list of raw angle values, unit not yet applied.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleBlock {
    pub label: String,
    pub values: Vec<f64>,
}

impl AngleBlock {
    /// Converts to a conformation; the chain length follows from the count.
    pub fn to_conformation(&self, degrees: bool) -> Result<Conformation> {
        let angles = if degrees { self.values.iter().map(|v| v.to_radians()).collect() } else { self.values.clone() };
        Conformation::from_angles(angles)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty())
}

pub fn parse_angle_blocks(text: &str) -> Result<Vec<AngleBlock>> {
    let mut blocks: Vec<AngleBlock> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let first = tokens(line).next().expect("non-empty line has a token");
        if first.parse::<f64>().is_err() {
            blocks.push(AngleBlock { label: line.to_string(), values: Vec::new() });
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(Error::parse(no + 1, "angle values before any label line"));
        };
        for t in tokens(line) {
            let v: f64 = t.parse().map_err(|_| Error::parse(no + 1, format!("bad angle value {t:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(no + 1, format!("non-finite angle value {t:?}")));
            }
            block.values.push(v);
        }
    }
    if let Some(b) = blocks.iter().find(|b| b.values.is_empty()) {
        return Err(Error::Parse { line: None, msg: format!("block {:?} has no angle values", b.label) });
    }
    Ok(blocks)
}

/// Reads the first block of a conformation file.
pub fn read_conformation(path: &Path, degrees: bool) -> Result<(String, Conformation)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let block = parse_angle_blocks(&text)?.into_iter().next().ok_or(Error::EmptyInput("conformation file"))?;
    let conf = block.to_conformation(degrees)?;
    Ok((block.label, conf))
}

/// Formats one block. Degrees are rounded to 1e-10 so that values read from
/// degree files print back unchanged; radians are written exactly.
pub fn format_conformation(label: &str, conf: &Conformation, degrees: bool) -> String {
    let values: Vec<f64> = if degrees {
        conf.to_degrees().into_iter().map(|d| (d * 1e10).round() / 1e10 + 0.0).collect()
    } else {
        conf.angles().to_vec()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{label}");
    let line: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    let _ = writeln!(out, "{}", line.join(" "));
    out
}

pub fn write_conformation(path: &Path, label: &str, conf: &Conformation, degrees: bool) -> Result<()> {
    fs::write(path, format_conformation(label, conf, degrees)).map_err(|e| Error::io(path, e))
}

/// Parses `>label` records. Residue lines may wrap; with `kd` the residues
/// are one-letter amino-acid codes mapped to A/B.
pub fn parse_fasta(text: &str, kd: bool) -> Result<Vec<Sequence>> {
    let mut records: Vec<(String, String)> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
            continue;
        }
        if let Some(label) = line.strip_prefix('>') {
            records.push((label.trim().to_string(), String::new()));
        } else if let Some(last) = records.last_mut() {
            last.1.push_str(&line.split_whitespace().collect::<String>());
        } else {
            // A bare residue string without a header.
            records.push((String::new(), line.split_whitespace().collect()));
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("sequence file"));
    }
    records
        .into_iter()
        .map(|(label, residues)| {
            if kd {
                Sequence::new(label, kd_transform(&residues)?)
            } else {
                Sequence::parse(label, &residues)
            }
        })
        .collect()
}

pub fn read_fasta(path: &Path, kd: bool) -> Result<Vec<Sequence>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fasta(&text, kd)
}

pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn read_experiment_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_experiment_config(&text)
}

/// One `nse seconds best` line per trace point.
pub fn format_trace(trace: &[TracePoint]) -> String {
    let mut out = String::new();
    for p in trace {
        let _ = writeln!(out, "{} {:.6} {}", p.nse, p.seconds, p.best);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::SequenceSpec;

    #[test]
    fn blocks_accept_commas_comments_and_wrapping() {
        let text = "# header\n1BXP\n1, 2 3\n4 5\nother # c\n-1e1\n";
        let b = parse_angle_blocks(text).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].label, "1BXP");
        assert_eq!(b[0].values, [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(b[1].label, "other");
        assert_eq!(b[1].values, [-10.0]);
    }

    #[test]
    fn block_errors() {
        assert!(parse_angle_blocks("1 2 3\n").is_err());
        assert!(parse_angle_blocks("x\n").is_err());
        assert!(parse_angle_blocks("x\n1 2 nan\n").is_err());
    }

    #[test]
    fn conformation_round_trip() {
        let conf = Conformation::new(5, vec![0.1, -0.2, 3.0, 0.4, -1.5]).unwrap();
        let text = format_conformation("t", &conf, true);
        let back = parse_angle_blocks(&text).unwrap()[0].to_conformation(true).unwrap();
        for (a, b) in conf.angles().iter().zip(back.angles()) {
            assert!((a - b).abs() < 1e-11);
        }
        let text = format_conformation("t", &conf, false);
        assert_eq!(parse_angle_blocks(&text).unwrap()[0].to_conformation(false).unwrap(), conf);
    }

    #[test]
    fn fasta() {
        let seqs = parse_fasta(">a\nAB\nBA\n\n>b\nAAA\n", false).unwrap();
        assert_eq!(seqs.len(), 2);
        assert_eq!((seqs[0].label(), seqs[0].to_string().as_str()), ("a", "ABBA"));
        assert_eq!(parse_fasta("ABA\n", false).unwrap()[0].to_string(), "ABA");
        assert_eq!(parse_fasta(">k\nIKR\n", true).unwrap()[0].to_string(), "ABB");
        assert!(parse_fasta(">a\nAXA\n", false).is_err());
    }

    #[test]
    fn experiment_config() {
        let cfg = parse_experiment_config(
            "runs = 3\nsequence = { label = \"F13\" }\n[optimizer]\nseed = 9\npb = 10\n[optimizer.stopping]\nnse_limit = 1000\n[optimizer.ablation]\nlocal_search = false\n",
        )
        .unwrap();
        assert_eq!(cfg.runs, 3);
        assert_eq!(cfg.sequence, SequenceSpec::Label("F13".into()));
        assert_eq!(cfg.optimizer.seed, 9);
        assert_eq!(cfg.optimizer.pb, Some(10));
        assert_eq!(cfg.optimizer.np, crate::optimizer::DEFAULT_NP);
        assert!(!cfg.optimizer.ablation.local_search);
        assert!(cfg.optimizer.ablation.component_reinit);

        let cfg = parse_experiment_config(
            "runs = 1\n[sequence.inline]\nlabel = \"x\"\nresidues = \"ABAB\"\n[optimizer.stopping]\ntarget = 1.0\n",
        )
        .unwrap();
        assert_eq!(cfg.sequence.resolve().unwrap().to_string(), "ABAB");
        assert!(parse_experiment_config("runs = 1\n").is_err());
        assert!(parse_experiment_config("runs = 1\nsequence = { label = \"F13\" }\nbogus = 1\n").is_err());
    }
}
