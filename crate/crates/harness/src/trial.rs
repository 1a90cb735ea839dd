use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::thread;

use anyhow::{ensure, Context, Result};
use pd_sketch::randomness::{tags, Seed};
use pd_sketch::stream::{parse_stream, GeneratorSpec, StreamSource};
use serde::{Deserialize, Serialize};

use crate::distribution::OutputDistribution;
use crate::registry::{AlgorithmId, Configured, Params};

pub const DEFAULT_TRIALS: u64 = 1000;

/// Where a stream comes from: a file in the text format, or `gen:<spec>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamSpec {
    File(PathBuf),
    Generated(GeneratorSpec),
}

impl StreamSpec {
    /// Generated streams are drawn from `seed`, so one master seed pins both
    /// the instance and the trial seeds.
    pub fn resolve(&self, seed: &Seed) -> Result<StreamSource> {
        match self {
            StreamSpec::File(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading stream {}", p.display()))?;
                parse_stream(&text).with_context(|| format!("parsing stream {}", p.display()))
            }
            StreamSpec::Generated(g) => Ok(g.generate(seed)?),
        }
    }
}

impl fmt::Display for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamSpec::File(p) => write!(f, "{}", p.display()),
            StreamSpec::Generated(g) => write!(f, "gen:{g}"),
        }
    }
}

impl FromStr for StreamSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.strip_prefix("gen:") {
            Some(g) => StreamSpec::Generated(g.parse()?),
            None => StreamSpec::File(PathBuf::from(s)),
        })
    }
}

impl Serialize for StreamSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StreamSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn seed_hex<S: serde::Serializer>(seed: &Seed, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&seed.to_hex())
}

fn seed_from_hex<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Seed, D::Error> {
    Seed::from_hex(&String::deserialize(d)?).map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub algorithm: AlgorithmId,
    pub stream: StreamSpec,
    pub trials: u64,
    #[serde(serialize_with = "seed_hex", deserialize_with = "seed_from_hex")]
    pub master_seed: Seed,
    pub params: Params,
    pub passes: Option<u32>,
}

impl TrialConfig {
    pub fn new(algorithm: AlgorithmId, stream: StreamSpec) -> Self {
        TrialConfig {
            algorithm,
            stream,
            trials: DEFAULT_TRIALS,
            master_seed: Seed::from_u64(0),
            params: Params::new(),
            passes: None,
        }
    }

    pub fn trials(mut self, t: u64) -> Self {
        self.trials = t;
        self
    }

    pub fn seed(mut self, seed: Seed) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params = self.params.with(key, value);
        self
    }

    pub fn passes(mut self, p: u32) -> Self {
        self.passes = Some(p);
        self
    }

    pub fn configure(&self) -> Result<Configured> {
        ensure!(self.trials >= 1, "at least one trial is required");
        Configured::new(self.algorithm, &self.params, self.passes)
    }

    pub fn trial_seed(&self, i: u64) -> Seed {
        self.master_seed.derive(tags::TRIAL, i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub algorithm: Configured,
    pub stream: StreamSource,
    pub distribution: OutputDistribution,
    /// Output of trial `i` at index `i`.
    pub outputs: Vec<String>,
    pub peak_words_max: u64,
    pub peak_words_min: u64,
}

fn workers(trials: u64) -> usize {
    let avail = thread::available_parallelism().map_or(1, |n| n.get());
    avail.min(trials as usize).max(1)
}

/// Runs `cfg.trials` independent executions on one resolved stream. Trial `i`
/// uses `master.derive("trial", i)`, so the result does not depend on how
/// trials are scheduled across threads.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialRun> {
    let alg = cfg.configure()?;
    let stream = cfg.stream.resolve(&cfg.master_seed)?;
    run_on_stream(cfg, alg, stream)
}

pub fn run_on_stream(cfg: &TrialConfig, alg: Configured, stream: StreamSource) -> Result<TrialRun> {
    alg.check_stream(&stream)?;
    let t = cfg.trials;
    let w = workers(t) as u64;
    let chunks: Vec<Result<Vec<(String, u64)>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..w)
            .map(|k| {
                let (stream, alg) = (&stream, &alg);
                scope.spawn(move || {
                    let (lo, hi) = (k * t / w, (k + 1) * t / w);
                    (lo..hi)
                        .map(|i| {
                            let o = alg.execute(stream, &cfg.trial_seed(i)).with_context(|| format!("trial {i}"))?;
                            Ok((o.output, o.peak_words))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect()
    });
    let mut distribution = OutputDistribution::new();
    let mut outputs = Vec::with_capacity(t as usize);
    let (mut hi, mut lo) = (0u64, u64::MAX);
    for chunk in chunks {
        for (o, p) in chunk? {
            distribution.record(o.clone());
            outputs.push(o);
            hi = hi.max(p);
            lo = lo.min(p);
        }
    }
    Ok(TrialRun { algorithm: alg, stream, distribution, outputs, peak_words_max: hi, peak_words_min: lo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::NO_DUPLICATE;

    #[test]
    fn stream_spec_parse() {
        let g: StreamSpec = "gen:all-ones:n=2,m=3".parse().unwrap();
        assert_eq!(g.to_string(), "gen:all-ones:n=2,m=3");
        assert_eq!("data/s.txt".parse::<StreamSpec>().unwrap(), StreamSpec::File("data/s.txt".into()));
        assert!("gen:nope:n=2".parse::<StreamSpec>().is_err());
        assert!(StreamSpec::File("/nonexistent/stream".into()).resolve(&Seed::from_u64(0)).is_err());
    }

    #[test]
    fn single_trial() {
        let cfg = TrialConfig::new(AlgorithmId::DupConc, "gen:paired-duplicates:n=8".parse().unwrap()).trials(1);
        let run = run_trials(&cfg).unwrap();
        assert_eq!((run.distribution.trials(), run.distribution.distinct()), (1, 1));
    }

    #[test]
    fn deterministic_algorithm_point_mass() {
        let cfg = TrialConfig::new(AlgorithmId::DupMultipass, "gen:paired-duplicates:n=64".parse().unwrap())
            .trials(37)
            .passes(3);
        let run = run_trials(&cfg).unwrap();
        assert_eq!(run.distribution.modal().map(|(_, c)| c), Some(37));
    }

    #[test]
    fn reproducible_and_scheduling_free() {
        let cfg = TrialConfig::new(AlgorithmId::DupConc, "gen:paired-duplicates:n=64".parse().unwrap())
            .trials(200)
            .param("s", 1)
            .seed(Seed::from_u64(11));
        let a = run_trials(&cfg).unwrap();
        let b = run_trials(&cfg).unwrap();
        assert_eq!(a.outputs, b.outputs);
        // each output equals a sequential re-execution of its trial seed
        let alg = cfg.configure().unwrap();
        for i in [0u64, 57, 199] {
            assert_eq!(alg.execute(&a.stream, &cfg.trial_seed(i)).unwrap().output, a.outputs[i as usize]);
        }
        assert!(a.distribution.count(NO_DUPLICATE) < 200);
    }

    #[test]
    fn config_errors() {
        let s: StreamSpec = "gen:paired-duplicates:n=8".parse().unwrap();
        assert!(run_trials(&TrialConfig::new(AlgorithmId::DupConc, s.clone()).trials(0)).is_err());
        assert!(run_trials(&TrialConfig::new(AlgorithmId::DupConc, s.clone()).passes(2)).is_err());
        assert!(run_trials(&TrialConfig::new(AlgorithmId::L2Trunc, s)).is_err());
    }

    #[test]
    fn config_serde() {
        let cfg =
            TrialConfig::new(AlgorithmId::RecoverBasis, "gen:random-low-rank-matrix:n=8,d=4,k=2".parse().unwrap())
                .param("k", 2);
        let back: TrialConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
