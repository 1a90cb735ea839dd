//! Algorithm registry: ids, accepted parameters, stream models, and the
//! canonical output encoding each algorithm's results are compared under.
//!
//! Canonical outputs:
//!
//! | id | stream | output |
//! |----|--------|--------|
//! | `point-query` | elem | `[i:c,i:c,...]`, nonzero answers by index |
//! | `inner-product` | mat, d = 2 | integer estimate, or `fail` on a hash collision |
//! | `l2-trunc` | vec | shortest round-trip decimal of the estimate |
//! | `dup-conc` | elem | element, or `⊥` |
//! | `dup-multipass` | elem | element |
//! | `nonzero-row-pd` | mat | row index, or `none` |
//! | `nonzero-row-rand` | mat | row index, or `none` |
//! | `recover-basis` | mat | `[r1;r2;...]`, rows of the canonical basis with entries `{:.9}` joined by `,`; `[]` when empty; `fail` on a rank-promise violation |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use pd_sketch::algorithms::{
    multipass_find_duplicate, BasisRecovery, BasisRecoveryConfig, ConcentratedDuplicate, InnerProduct, L2Truncated,
    NonzeroRowPd, NonzeroRowRand, PointQuery, PointQueryConfig, Side, TruncatedL2Config,
};
use pd_sketch::linalg::DEFAULT_TOL;
use pd_sketch::randomness::Seed;
use pd_sketch::samplers::AmsConfig;
use pd_sketch::stream::{Model, StreamSource};
use pd_sketch::{Error, Matrix};
use serde::{Deserialize, Serialize};

pub const NO_DUPLICATE: &str = "⊥";
pub const NO_ROW: &str = "none";
pub const FAILED: &str = "fail";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    PointQuery,
    InnerProduct,
    L2Trunc,
    DupConc,
    DupMultipass,
    NonzeroRowPd,
    NonzeroRowRand,
    RecoverBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Float,
    Int,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    /// `None` means the value is derived when absent.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn float(name: &'static str, default: Option<&'static str>, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Float, default, help }
}

const fn int(name: &'static str, default: Option<&'static str>, help: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Int, default, help }
}

const POINT_QUERY_PARAMS: &[ParamSpec] = &[float("eps", Some("0.1"), "additive error as a fraction of m")];
const INNER_PRODUCT_PARAMS: &[ParamSpec] = &[float("eps", Some("0.25"), "error as a fraction of |x|_1 |y|_1")];
const L2_PARAMS: &[ParamSpec] = &[
    float("eps", Some("0.25"), "relative error"),
    int("width", None, "AMS counters per repetition; default 2^(2(bits+1))"),
];
const DUP_CONC_PARAMS: &[ParamSpec] =
    &[int("s", Some("4"), "copies per log2 n"), int("copies", None, "explicit copy count, overriding s")];
const BASIS_PARAMS: &[ParamSpec] =
    &[int("k", Some("4"), "rank bound"), float("c", Some("8"), "sketch rows = ceil(c k log2 n)")];

#[derive(Debug, Clone, Copy)]
pub struct AlgorithmInfo {
    pub id: AlgorithmId,
    pub model: Model,
    pub params: &'static [ParamSpec],
    /// Whether the algorithm reads the stream more than once.
    pub multipass: bool,
    pub deterministic: bool,
    /// Failure probability the algorithm is configured for.
    pub failure_probability: &'static str,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::PointQuery,
        AlgorithmId::InnerProduct,
        AlgorithmId::L2Trunc,
        AlgorithmId::DupConc,
        AlgorithmId::DupMultipass,
        AlgorithmId::NonzeroRowPd,
        AlgorithmId::NonzeroRowRand,
        AlgorithmId::RecoverBasis,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgorithmId::PointQuery => "point-query",
            AlgorithmId::InnerProduct => "inner-product",
            AlgorithmId::L2Trunc => "l2-trunc",
            AlgorithmId::DupConc => "dup-conc",
            AlgorithmId::DupMultipass => "dup-multipass",
            AlgorithmId::NonzeroRowPd => "nonzero-row-pd",
            AlgorithmId::NonzeroRowRand => "nonzero-row-rand",
            AlgorithmId::RecoverBasis => "recover-basis",
        }
    }

    pub fn info(self) -> AlgorithmInfo {
        use AlgorithmId::*;
        let (model, params, multipass, deterministic, failure_probability): (
            Model,
            &'static [ParamSpec],
            bool,
            bool,
            &str,
        ) = match self {
            PointQuery => (
                Model::Element,
                POINT_QUERY_PARAMS,
                false,
                false,
                "answer vector differs from the canonical one w.p. <= 1/m",
            ),
            InnerProduct => {
                (Model::TurnstileMatrix, INNER_PRODUCT_PARAMS, false, false, "collision (fail) w.p. O(1/m)")
            }
            L2Trunc => (Model::TurnstileVector, L2_PARAMS, false, false, "estimate outside (1 +- eps) w.p. <= 1/n^2"),
            DupConc => (Model::Element, DUP_CONC_PARAMS, false, false, "zero-error; reports ⊥ w.p. (1 - q)^(s log n)"),
            DupMultipass => (Model::Element, &[], true, true, "deterministic"),
            NonzeroRowPd => (Model::TurnstileMatrix, &[], false, false, "wrong row w.p. <= d/(2n^3 + 1)"),
            NonzeroRowRand => (
                Model::TurnstileMatrix,
                &[],
                false,
                false,
                "sampler failure w.p. <= 1/n^2 (adopted for the unquantified bound)",
            ),
            RecoverBasis => (
                Model::TurnstileMatrix,
                BASIS_PARAMS,
                false,
                false,
                "rank loss w.p. <= 1/n^2 (adopted for the unquantified bound)",
            ),
        };
        AlgorithmInfo { id: self, model, params, multipass, deterministic, failure_probability }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlgorithmId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL.into_iter().find(|a| a.id() == s).ok_or_else(|| {
            let known: Vec<&str> = AlgorithmId::ALL.iter().map(|a| a.id()).collect();
            anyhow!("unknown algorithm {s:?}; known: {}", known.join(", "))
        })
    }
}

/// Raw `key=value` parameters as given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params(pub BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn parse_pair(kv: &str) -> Result<(String, String)> {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("parameter {kv:?} is not key=value"))?;
        ensure!(!k.is_empty() && !v.is_empty(), "parameter {kv:?} has an empty side");
        Ok((k.trim().to_string(), v.trim().to_string()))
    }

    pub fn from_pairs<S: AsRef<str>>(pairs: &[S]) -> Result<Self> {
        let mut out = Params::new();
        for p in pairs {
            let (k, v) = Self::parse_pair(p.as_ref())?;
            ensure!(out.0.insert(k.clone(), v).is_none(), "parameter {k:?} given twice");
        }
        Ok(out)
    }

    fn raw(&self, info: &AlgorithmInfo, name: &str) -> Option<String> {
        let spec = info.params.iter().find(|p| p.name == name).expect("registered parameter");
        self.0.get(name).cloned().or(spec.default.map(str::to_string))
    }

    fn float(&self, info: &AlgorithmInfo, name: &str) -> Result<Option<f64>> {
        self.raw(info, name)
            .map(|v| v.parse::<f64>().with_context(|| format!("parameter {name}={v:?} is not a number")))
            .transpose()
    }

    fn int(&self, info: &AlgorithmInfo, name: &str) -> Result<Option<u64>> {
        self.raw(info, name)
            .map(|v| v.parse::<u64>().with_context(|| format!("parameter {name}={v:?} is not a nonnegative integer")))
            .transpose()
    }
}

/// An algorithm with validated, typed parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Configured {
    PointQuery { eps: f64 },
    InnerProduct { eps: f64 },
    L2Trunc { eps: f64, width: Option<usize> },
    DupConc { s: u64, copies: Option<u64> },
    DupMultipass { passes: u32 },
    NonzeroRowPd,
    NonzeroRowRand,
    RecoverBasis { k: usize, c: f64 },
}

pub const DEFAULT_PASSES: u32 = 2;

impl Configured {
    pub fn new(alg: AlgorithmId, params: &Params, passes: Option<u32>) -> Result<Self> {
        let info = alg.info();
        for key in params.0.keys() {
            if !info.params.iter().any(|p| p.name == key) {
                let known: Vec<&str> = info.params.iter().map(|p| p.name).collect();
                bail!(
                    "{alg} does not take parameter {key:?} (accepted: {})",
                    if known.is_empty() { "none".into() } else { known.join(", ") }
                );
            }
        }
        if passes.is_some() && !info.multipass {
            bail!("{alg} is a one-pass algorithm; --passes does not apply");
        }
        let unit_interval = |eps: f64| -> Result<f64> {
            ensure!(eps > 0.0 && eps < 1.0, "eps = {eps} outside (0, 1)");
            Ok(eps)
        };
        let need = |v: Option<f64>| v.expect("defaulted");
        Ok(match alg {
            AlgorithmId::PointQuery => {
                Configured::PointQuery { eps: unit_interval(need(params.float(&info, "eps")?))? }
            }
            AlgorithmId::InnerProduct => {
                Configured::InnerProduct { eps: unit_interval(need(params.float(&info, "eps")?))? }
            }
            AlgorithmId::L2Trunc => {
                let width = params.int(&info, "width")?.map(|w| w as usize);
                ensure!(width.is_none_or(|w| w > 0), "width must be positive");
                Configured::L2Trunc { eps: unit_interval(need(params.float(&info, "eps")?))?, width }
            }
            AlgorithmId::DupConc => {
                let s = params.int(&info, "s")?.expect("defaulted");
                let copies = params.int(&info, "copies")?;
                ensure!(s > 0, "s must be positive");
                ensure!(copies.is_none_or(|c| c > 0), "copies must be positive");
                Configured::DupConc { s, copies }
            }
            AlgorithmId::DupMultipass => {
                let p = passes.unwrap_or(DEFAULT_PASSES);
                ensure!(p > 0, "at least one pass is required");
                Configured::DupMultipass { passes: p }
            }
            AlgorithmId::NonzeroRowPd => Configured::NonzeroRowPd,
            AlgorithmId::NonzeroRowRand => Configured::NonzeroRowRand,
            AlgorithmId::RecoverBasis => {
                let k = params.int(&info, "k")?.expect("defaulted") as usize;
                let c = params.float(&info, "c")?.expect("defaulted");
                ensure!(k > 0, "k must be positive");
                ensure!(c > 0.0 && c.is_finite(), "c must be positive");
                Configured::RecoverBasis { k, c }
            }
        })
    }

    pub fn id(&self) -> AlgorithmId {
        match self {
            Configured::PointQuery { .. } => AlgorithmId::PointQuery,
            Configured::InnerProduct { .. } => AlgorithmId::InnerProduct,
            Configured::L2Trunc { .. } => AlgorithmId::L2Trunc,
            Configured::DupConc { .. } => AlgorithmId::DupConc,
            Configured::DupMultipass { .. } => AlgorithmId::DupMultipass,
            Configured::NonzeroRowPd => AlgorithmId::NonzeroRowPd,
            Configured::NonzeroRowRand => AlgorithmId::NonzeroRowRand,
            Configured::RecoverBasis { .. } => AlgorithmId::RecoverBasis,
        }
    }

    /// Checks that the stream has the shape this algorithm reads.
    pub fn check_stream(&self, stream: &StreamSource) -> Result<()> {
        let h = stream.header();
        let want = self.id().info().model;
        ensure!(h.model == want, "{} reads {} streams, got {}", self.id(), want, h.model);
        match self {
            Configured::InnerProduct { .. } => {
                ensure!(h.d == 2, "inner-product reads an n x 2 matrix (x and y as columns), got d = {}", h.d)
            }
            Configured::DupConc { .. } | Configured::DupMultipass { .. } => {
                ensure!(h.m > h.n, "Find-Duplicate needs m > n, got m = {} and n = {}", h.m, h.n)
            }
            _ => {}
        }
        Ok(())
    }

    /// One execution on a fresh state and a fresh replay of `stream`.
    pub fn execute(&self, stream: &StreamSource, seed: &Seed) -> Result<TrialOutput> {
        let h = *stream.header();
        let wb = h.word_bits();
        let out = match *self {
            Configured::PointQuery { eps } => {
                let mut pq = PointQuery::new(PointQueryConfig { n: h.n, m: h.m, epsilon: eps }, seed, wb)?;
                for e in stream.replay_elements()? {
                    pq.update(e)?;
                }
                TrialOutput::new(encode_answers(&pq.answer_vector()), pq.meter().peak_words())
            }
            Configured::InnerProduct { eps } => {
                // m is the total insertion weight over both vectors
                let m = stream.materialize().iter().map(|v| v.unsigned_abs()).sum::<u128>().max(1) as u64;
                let mut ip = InnerProduct::new(PointQueryConfig { n: h.n, m, epsilon: eps }, seed, wb)?;
                for u in stream.replay_updates()? {
                    ip.update(if u.col == 1 { Side::X } else { Side::Y }, u.row, u.delta)?;
                }
                let output = match ip.estimate() {
                    Ok(v) => v.to_string(),
                    Err(Error::Collision { .. }) => FAILED.to_string(),
                    Err(e) => return Err(e.into()),
                };
                TrialOutput::new(output, ip.peak_words())
            }
            Configured::L2Trunc { eps, width } => {
                let cfg = TruncatedL2Config::new(eps)?;
                let ams = AmsConfig {
                    n: h.n,
                    width: width.unwrap_or(cfg.ams_width()),
                    repetitions: AmsConfig::default_repetitions(h.n),
                };
                let mut l2 = L2Truncated::with_ams(cfg, ams, seed)?;
                for u in stream.replay_updates()? {
                    l2.update(u.row, u.delta)?;
                }
                TrialOutput::new(format!("{}", l2.estimate()), l2.words())
            }
            Configured::DupConc { s, copies } => {
                let copies = copies.unwrap_or(ConcentratedDuplicate::copies_for(h.n, s));
                let mut fd = ConcentratedDuplicate::with_copies(h.n, copies, seed, wb)?;
                for e in stream.replay_elements()? {
                    fd.update(e)?;
                }
                let output = fd.output().map_or(NO_DUPLICATE.to_string(), |e| e.to_string());
                TrialOutput::new(output, fd.meter().peak_words())
            }
            Configured::DupMultipass { passes } => {
                let o = multipass_find_duplicate(stream, passes)?;
                TrialOutput::new(o.element.to_string(), o.peak_words)
            }
            Configured::NonzeroRowPd => {
                let mut st = NonzeroRowPd::new(h.n, h.d, seed, wb)?;
                for u in stream.replay_updates()? {
                    st.update(u)?;
                }
                TrialOutput::new(encode_row(st.query()), st.meter().peak_words())
            }
            Configured::NonzeroRowRand => {
                let mut st = NonzeroRowRand::new(h.n, h.d, seed, wb)?;
                for u in stream.replay_updates()? {
                    st.update(u)?;
                }
                TrialOutput::new(encode_row(st.query()), st.meter().peak_words())
            }
            Configured::RecoverBasis { k, c } => {
                let cfg = BasisRecoveryConfig::with_factor(h.n, h.d, k, c);
                let mut br = BasisRecovery::<f64>::new(cfg, seed, wb)?;
                for u in stream.replay_updates()? {
                    br.update(u)?;
                }
                let output = match br.finalize(DEFAULT_TOL) {
                    Ok(b) => encode_basis(&b),
                    Err(Error::RankPromise { .. }) => FAILED.to_string(),
                    Err(e) => return Err(e.into()),
                };
                TrialOutput::new(output, br.meter().peak_words())
            }
        };
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutput {
    pub output: String,
    pub peak_words: u64,
}

impl TrialOutput {
    fn new(output: String, peak_words: u64) -> Self {
        TrialOutput { output, peak_words }
    }
}

pub fn encode_answers(answers: &BTreeMap<u64, u64>) -> String {
    let body: Vec<String> = answers.iter().map(|(i, c)| format!("{i}:{c}")).collect();
    format!("[{}]", body.join(","))
}

pub fn decode_answers(s: &str) -> Result<BTreeMap<u64, u64>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| anyhow!("answer vector {s:?} is not bracketed"))?;
    inner
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (i, c) = p.split_once(':').ok_or_else(|| anyhow!("answer {p:?} is not i:c"))?;
            Ok((i.parse()?, c.parse()?))
        })
        .collect()
}

fn encode_row(row: Option<u64>) -> String {
    row.map_or(NO_ROW.to_string(), |r| r.to_string())
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn encode_basis(b: &Matrix) -> String {
    let rows: Vec<String> =
        (0..b.rows()).map(|i| b.row(i).iter().map(|&v| fixed(v)).collect::<Vec<_>>().join(",")).collect();
    format!("[{}]", rows.join(";"))
}

pub fn decode_basis(s: &str) -> Result<Vec<Vec<f64>>> {
    let inner =
        s.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| anyhow!("basis {s:?} is not bracketed"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(';')
        .map(|row| row.split(',').map(|v| v.parse::<f64>().with_context(|| format!("bad entry {v:?}"))).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pd_sketch::stream::TurnstileUpdate;

    #[test]
    fn ids_round_trip() {
        for a in AlgorithmId::ALL {
            assert_eq!(a.id().parse::<AlgorithmId>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.id()));
        }
        assert!("count-min".parse::<AlgorithmId>().is_err());
    }

    #[test]
    fn parameter_validation() {
        let p = Params::from_pairs(&["eps=0.2"]).unwrap();
        assert_eq!(Configured::new(AlgorithmId::PointQuery, &p, None).unwrap(), Configured::PointQuery { eps: 0.2 });
        assert!(Configured::new(AlgorithmId::DupConc, &p, None).is_err());
        assert!(Configured::new(AlgorithmId::PointQuery, &Params::new().with("eps", 2), None).is_err());
        assert!(Configured::new(AlgorithmId::PointQuery, &Params::new(), Some(2)).is_err());
        assert_eq!(
            Configured::new(AlgorithmId::DupMultipass, &Params::new(), None).unwrap(),
            Configured::DupMultipass { passes: DEFAULT_PASSES }
        );
        assert!(Params::from_pairs(&["s=1", "s=2"]).is_err());
        assert!(Params::from_pairs(&["s"]).is_err());
    }

    #[test]
    fn codecs() {
        let a = BTreeMap::from([(3, 4), (10, 1)]);
        assert_eq!(encode_answers(&a), "[3:4,10:1]");
        assert_eq!(decode_answers("[3:4,10:1]").unwrap(), a);
        assert_eq!(decode_answers("[]").unwrap(), BTreeMap::new());
        let b = Matrix::from_rows(2, &[vec![1.0, -0.0], vec![-1e-12, 0.5]]).unwrap();
        assert_eq!(encode_basis(&b), "[1.000000000,0.000000000;0.000000000,0.500000000]");
        assert_eq!(decode_basis(&encode_basis(&b)).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 0.5]]);
        assert_eq!(encode_basis(&Matrix::zeros(0, 3)), "[]");
        assert!(decode_basis("[]").unwrap().is_empty());
    }

    #[test]
    fn stream_shape_checks() {
        let elems = StreamSource::elements(2, vec![1, 1, 2]).unwrap();
        let mat = StreamSource::matrix(2, 3, vec![TurnstileUpdate::matrix(1, 1, 1)]).unwrap();
        let ip = Configured::InnerProduct { eps: 0.25 };
        assert!(ip.check_stream(&elems).is_err());
        assert!(ip.check_stream(&mat).is_err());
        assert!(Configured::DupConc { s: 1, copies: None }.check_stream(&elems).is_ok());
        assert!(Configured::NonzeroRowPd.check_stream(&mat).is_ok());
    }

    #[test]
    fn execute_each() {
        let seed = Seed::from_u64(9);
        let elems = StreamSource::elements(4, vec![1, 1, 2, 2, 3, 3]).unwrap();
        assert_eq!(Configured::DupMultipass { passes: 2 }.execute(&elems, &seed).unwrap().output, "1");
        let pq = Configured::PointQuery { eps: 0.5 }.execute(&elems, &seed).unwrap();
        assert!(decode_answers(&pq.output).is_ok());
        let mat = StreamSource::matrix(4, 4, vec![TurnstileUpdate::matrix(3, 2, 5)]).unwrap();
        assert_eq!(Configured::NonzeroRowPd.execute(&mat, &seed).unwrap().output, "3");
        assert_eq!(Configured::NonzeroRowRand.execute(&mat, &seed).unwrap().output, "3");
        let basis = Configured::RecoverBasis { k: 1, c: 8.0 }.execute(&mat, &seed).unwrap();
        assert_eq!(basis.output, "[0.000000000,1.000000000,0.000000000,0.000000000]");
        let vec = StreamSource::vector(4, vec![TurnstileUpdate::vector(2, 3)]).unwrap();
        assert_eq!(Configured::L2Trunc { eps: 0.25, width: None }.execute(&vec, &seed).unwrap().output, "3");
        let pair = StreamSource::matrix(4, 2, vec![TurnstileUpdate::matrix(1, 1, 4), TurnstileUpdate::matrix(1, 2, 4)])
            .unwrap();
        assert_eq!(Configured::InnerProduct { eps: 0.25 }.execute(&pair, &seed).unwrap().output, "16");
    }
}
