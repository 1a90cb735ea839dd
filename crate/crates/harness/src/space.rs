//! Space sweeps: peak SpaceMeter words as one parameter varies.

use anyhow::{bail, ensure, Context, Result};
use pd_sketch::randomness::Seed;
use pd_sketch::stream::{GeneratorKind, GeneratorSpec};
use serde::{Deserialize, Serialize};

use crate::registry::{AlgorithmId, Configured, Params};
use crate::trial::{run_trials, StreamSpec, TrialConfig};

/// Instance family swept over `n` when no template is given.
pub fn default_family(alg: AlgorithmId, n: u64) -> GeneratorSpec {
    use AlgorithmId::*;
    match alg {
        PointQuery => GeneratorSpec::new(GeneratorKind::RandomDuplicateStream, n).with_m(100).with_k(n.min(10)),
        InnerProduct => GeneratorSpec::new(GeneratorKind::RandomSparsePair, n).with_m(40).with_k(5),
        L2Trunc => GeneratorSpec::new(GeneratorKind::RandomTurnstileVector, n).with_k(n.min(16)),
        DupConc | DupMultipass => GeneratorSpec::new(GeneratorKind::PairedDuplicates, n),
        NonzeroRowPd | NonzeroRowRand => GeneratorSpec::new(GeneratorKind::RandomLowRankMatrix, n).with_d(n).with_k(2),
        RecoverBasis => GeneratorSpec::new(GeneratorKind::RandomLowRankMatrix, n).with_d(16).with_k(4),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePoint {
    pub value: f64,
    pub peak_words: u64,
    pub word_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTable {
    pub algorithm: AlgorithmId,
    pub parameter: String,
    pub points: Vec<SpacePoint>,
    /// Least-squares slope of log(peak words) against log(value).
    pub log_log_slope: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<String>,
}

impl Sweep {
    /// `key=v1,v2,...`
    pub fn parse(s: &str) -> Result<Self> {
        let (k, v) = s.split_once('=').with_context(|| format!("sweep {s:?} is not key=v1,v2,..."))?;
        let values: Vec<String> = v.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
        ensure!(!values.is_empty(), "sweep {s:?} has no values");
        Ok(Sweep { key: k.trim().to_string(), values })
    }
}

pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Sweeps `n` (the instance size), `passes`, or any algorithm parameter. Each
/// point runs `trials` seeds and keeps the largest peak.
pub fn measure_space(
    alg: AlgorithmId,
    sweep: &Sweep,
    base_n: u64,
    params: &Params,
    passes: Option<u32>,
    trials: u64,
    seed: Seed,
) -> Result<SpaceTable> {
    let mut points = Vec::with_capacity(sweep.values.len());
    for v in &sweep.values {
        let mut n = base_n;
        let mut params = params.clone();
        let mut passes = passes;
        match sweep.key.as_str() {
            "n" => n = v.parse().with_context(|| format!("sweep value {v:?} is not an integer"))?,
            "passes" => passes = Some(v.parse().with_context(|| format!("sweep value {v:?} is not an integer"))?),
            key if alg.info().params.iter().any(|p| p.name == key) => params = params.with(key, v),
            key => bail!("{alg} cannot sweep {key:?}"),
        }
        let mut cfg = TrialConfig::new(alg, StreamSpec::Generated(default_family(alg, n))).trials(trials).seed(seed);
        cfg.params = params;
        cfg.passes = passes;
        Configured::new(alg, &cfg.params, cfg.passes)?;
        let run = run_trials(&cfg).with_context(|| format!("{}={v}", sweep.key))?;
        let value: f64 = v.parse().with_context(|| format!("sweep value {v:?} is not numeric"))?;
        points.push(SpacePoint { value, peak_words: run.peak_words_max, word_bits: run.stream.header().word_bits() });
    }
    let slope = log_log_slope(&points.iter().map(|p| (p.value, p.peak_words as f64)).collect::<Vec<_>>());
    Ok(SpaceTable { algorithm: alg, parameter: sweep.key.clone(), points, log_log_slope: slope })
}
