//! JSON and CSV reports. Field order is fixed by the struct definitions and
//! no wall-clock data is recorded, so equal inputs give byte-identical files.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::Certificate;
use crate::distribution::OutputDistribution;
use crate::trial::{TrialConfig, TrialRun};

/// Mass levels reported by `min_cover`.
pub const COVER_LEVELS: [f64; 3] = [0.5, 0.9, 0.99];

/// Git-style object hash: SHA-256 over `"blob <len>\0"` and the content.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

pub fn config_hash(cfg: &TrialConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamInfo {
    pub model: String,
    pub n: u64,
    pub d: u64,
    pub m: u64,
    pub word_bits: u32,
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputCount {
    pub output: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSize {
    pub mass: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub empirical_entropy_bits: f64,
    pub modal_probability: f64,
    pub modal_output: Option<String>,
    pub min_cover: Vec<CoverSize>,
    /// `None` when validity was not checked against the oracle.
    pub zero_error_violations: Option<u64>,
}

impl ConcentrationReport {
    pub fn from_distribution(dist: &OutputDistribution, violations: Option<u64>) -> Self {
        ConcentrationReport {
            empirical_entropy_bits: dist.entropy_bits(),
            modal_probability: dist.modal_probability(),
            modal_output: dist.modal().map(|(o, _)| o.to_string()),
            min_cover: COVER_LEVELS.iter().map(|&q| CoverSize { mass: q, size: dist.min_cover(q) }).collect(),
            zero_error_violations: violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePeaks {
    pub peak_words_max: u64,
    pub peak_words_min: u64,
    pub peak_bits_max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: TrialConfig,
    pub config_hash: String,
    pub stream: StreamInfo,
    pub trials: u64,
    pub distinct_outputs: usize,
    pub outputs: Vec<OutputCount>,
    pub concentration: ConcentrationReport,
    pub certificates: Vec<Certificate>,
    pub space: SpacePeaks,
}

impl Report {
    pub fn new(cfg: &TrialConfig, run: &TrialRun, violations: Option<u64>, certificates: Vec<Certificate>) -> Self {
        let h = run.stream.header();
        let dist = &run.distribution;
        Report {
            tool: "pd-sketch".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            config_hash: config_hash(cfg),
            stream: StreamInfo {
                model: h.model.tag().into(),
                n: h.n,
                d: h.d,
                m: h.m,
                word_bits: h.word_bits(),
                content_hash: blob_hash(run.stream.to_text().as_bytes()),
            },
            trials: dist.trials(),
            distinct_outputs: dist.distinct(),
            outputs: dist.ranked().into_iter().map(|(o, c)| OutputCount { output: o.into(), count: c }).collect(),
            concentration: ConcentrationReport::from_distribution(dist, violations),
            certificates,
            space: SpacePeaks {
                peak_words_max: run.peak_words_max,
                peak_words_min: run.peak_words_min,
                peak_bits_max: run.peak_words_max * h.word_bits() as u64,
            },
        }
    }
}

pub fn to_json(reports: &[Report]) -> Result<String> {
    let mut s = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])?
    } else {
        serde_json::to_string_pretty(reports)?
    };
    s.push('\n');
    Ok(s)
}

/// Parses either a single report or a list.
pub fn from_json(s: &str) -> Result<Vec<Report>> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    Ok(if v.is_array() { serde_json::from_value(v)? } else { vec![serde_json::from_value(v)?] })
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    algorithm: &'a str,
    stream: String,
    trials: u64,
    master_seed: String,
    params: String,
    passes: String,
    config_hash: &'a str,
    stream_hash: &'a str,
    n: u64,
    d: u64,
    m: u64,
    distinct_outputs: usize,
    entropy_bits: f64,
    modal_probability: f64,
    modal_output: &'a str,
    min_cover_90: usize,
    zero_error_violations: String,
    verdicts: String,
    peak_words_max: u64,
    peak_bits_max: u64,
}

const CSV_HEADER: [&str; 20] = [
    "algorithm",
    "stream",
    "trials",
    "master_seed",
    "params",
    "passes",
    "config_hash",
    "stream_hash",
    "n",
    "d",
    "m",
    "distinct_outputs",
    "entropy_bits",
    "modal_probability",
    "modal_output",
    "min_cover_90",
    "zero_error_violations",
    "verdicts",
    "peak_words_max",
    "peak_bits_max",
];

pub fn to_csv(reports: &[Report]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let params: Vec<String> = r.config.params.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let verdicts: Vec<String> = r.certificates.iter().map(|c| format!("{}:{}", c.property, c.verdict)).collect();
        w.serialize(CsvRow {
            algorithm: r.config.algorithm.id(),
            stream: r.config.stream.to_string(),
            trials: r.trials,
            master_seed: r.config.master_seed.to_hex(),
            params: params.join(";"),
            passes: r.config.passes.map_or(String::new(), |p| p.to_string()),
            config_hash: &r.config_hash,
            stream_hash: &r.stream.content_hash,
            n: r.stream.n,
            d: r.stream.d,
            m: r.stream.m,
            distinct_outputs: r.distinct_outputs,
            entropy_bits: r.concentration.empirical_entropy_bits,
            modal_probability: r.concentration.modal_probability,
            modal_output: r.concentration.modal_output.as_deref().unwrap_or(""),
            min_cover_90: r.concentration.min_cover.iter().find(|c| c.mass == 0.9).map_or(0, |c| c.size),
            zero_error_violations: r.concentration.zero_error_violations.map_or(String::new(), |v| v.to_string()),
            verdicts: verdicts.join(";"),
            peak_words_max: r.space.peak_words_max,
            peak_bits_max: r.space.peak_bits_max,
        })?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` selects CSV; anything else is JSON.
    pub fn from_path(p: &Path) -> Self {
        match p.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn emit_report(reports: &[Report], format: Format, path: &Path) -> Result<()> {
    let body = match format {
        Format::Json => to_json(reports)?,
        Format::Csv => to_csv(reports)?,
    };
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(body.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::check_pseudodeterministic;
    use crate::registry::AlgorithmId;
    use crate::trial::run_trials;

    fn sample() -> Report {
        let cfg = TrialConfig::new(AlgorithmId::DupConc, "gen:paired-duplicates:n=16".parse().unwrap()).trials(50);
        let run = run_trials(&cfg).unwrap();
        let cert = check_pseudodeterministic(&run.distribution, 2.0 / 3.0);
        Report::new(&cfg, &run, Some(0), vec![cert])
    }

    #[test]
    fn blob_hash_format() {
        let h = blob_hash(b"");
        assert_eq!(h, hex::encode(Sha256::digest(b"blob 0\0")));
        assert_eq!(h.len(), 64);
        assert_ne!(blob_hash(b"a"), blob_hash(b"b"));
    }

    #[test]
    fn csv_shapes() {
        let empty = to_csv(&[]).unwrap();
        assert_eq!(empty.lines().count(), 1);
        assert!(empty.starts_with("algorithm,stream,trials"));
        let one = to_csv(&[sample()]).unwrap();
        assert_eq!(one.lines().count(), 2);
        assert!(one.lines().nth(1).unwrap().starts_with("dup-conc,gen:paired-duplicates:n=16,50,"));
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let text = to_json(std::slice::from_ref(&r)).unwrap();
        let back = from_json(&text).unwrap();
        assert_eq!(back, vec![r.clone()]);
        assert_eq!(to_json(&back).unwrap(), text);
        let two = to_json(&[r.clone(), r]).unwrap();
        assert_eq!(from_json(&two).unwrap().len(), 2);
    }

    #[test]
    fn byte_identical_reruns() {
        assert_eq!(to_json(&[sample()]).unwrap(), to_json(&[sample()]).unwrap());
        assert_eq!(to_csv(&[sample()]).unwrap(), to_csv(&[sample()]).unwrap());
    }

    #[test]
    fn format_by_extension() {
        assert_eq!(Format::from_path(Path::new("a/out.CSV")), Format::Csv);
        assert_eq!(Format::from_path(Path::new("out.json")), Format::Json);
    }
}
