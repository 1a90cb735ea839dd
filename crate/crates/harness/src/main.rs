use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pd_harness::certify::{
    certify_zero_error, check_entropy, check_k_concentrated, check_k_pseudodeterministic, check_pseudodeterministic,
    zero_error_certificate, Certificate,
};
use pd_harness::oracle::Validator;
use pd_harness::report::{emit_report, Format};
use pd_harness::space::{measure_space, Sweep};
use pd_harness::{run_trials, AlgorithmId, Params, Report, StreamSpec, TrialConfig, TrialRun, Verdict};
use pd_sketch::randomness::Seed;

#[derive(Parser)]
#[command(
    name = "pd-sketch",
    version,
    about = "Run low-entropy streaming sketches over many seeds and certify their output distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials and report the output distribution.
    Run(RunArgs),
    /// Run trials and certify a property; exit 0 on pass, 2 on fail, 3 when indeterminate.
    Certify(CertifyArgs),
    /// Sweep a parameter and report peak space.
    Space(SpaceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm id, e.g. point-query or dup-conc.
    #[arg(long)]
    alg: AlgorithmId,
    /// Stream file, or gen:<kind>:n=..,m=..,d=..,k=..
    #[arg(long)]
    stream: StreamSpec,
    #[arg(long, default_value_t = pd_harness::trial::DEFAULT_TRIALS)]
    trials: u64,
    /// Master seed in hex.
    #[arg(long, default_value = "00")]
    seed: String,
    /// Algorithm parameter key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    passes: Option<u32>,
    /// Report path; `.csv` writes CSV, anything else JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Pd,
    KConc,
    KPd,
    ZeroError,
    Entropy,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    property: Property,
    /// k for k-conc and k-pd; the entropy bound in bits for entropy.
    #[arg(long)]
    k: Option<f64>,
    /// Modal-probability threshold for pd.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    threshold: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    alg: AlgorithmId,
    /// key=v1,v2,...; key is n, passes, or an algorithm parameter.
    #[arg(long)]
    sweep: String,
    /// Instance size when the sweep is not over n.
    #[arg(long, default_value_t = 256)]
    n: u64,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    passes: Option<u32>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value = "00")]
    seed: String,
    /// Write the table as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn config(a: &RunArgs) -> Result<TrialConfig> {
    let mut cfg = TrialConfig::new(a.alg, a.stream.clone()).trials(a.trials).seed(Seed::from_hex(&a.seed)?);
    cfg.params = Params::from_pairs(&a.params)?;
    cfg.passes = a.passes;
    Ok(cfg)
}

/// Oracle violations, or `None` when the instance exceeds the oracle caps.
fn violations(run: &TrialRun) -> Option<u64> {
    Validator::for_algorithm(&run.algorithm, &run.stream)
        .ok()
        .map(|v| certify_zero_error(&run.distribution, |o| v.is_valid(o)))
}

fn print_summary(r: &Report) {
    println!("algorithm      {}", r.config.algorithm);
    println!("stream         {} (n={}, d={}, m={})", r.config.stream, r.stream.n, r.stream.d, r.stream.m);
    println!("trials         {}", r.trials);
    println!("distinct       {}", r.distinct_outputs);
    println!("entropy bits   {:.6}", r.concentration.empirical_entropy_bits);
    println!(
        "modal          {} ({:.6})",
        r.concentration.modal_output.as_deref().unwrap_or("-"),
        r.concentration.modal_probability
    );
    if let Some(v) = r.concentration.zero_error_violations {
        println!("invalid        {v}");
    }
    println!("peak words     {}", r.space.peak_words_max);
    for c in &r.certificates {
        println!(
            "{:<14} {} (estimate {:.6}, interval [{:.6}, {:.6}], threshold {:.6})",
            c.property, c.verdict, c.estimate, c.lower, c.upper, c.threshold
        );
    }
}

fn finish(rep: &Report, path: Option<&PathBuf>) -> Result<()> {
    print_summary(rep);
    if let Some(p) = path {
        emit_report(std::slice::from_ref(rep), Format::from_path(p), p)?;
    }
    Ok(())
}

fn run(a: &RunArgs) -> Result<ExitCode> {
    let cfg = config(a)?;
    let run = run_trials(&cfg)?;
    let rep = Report::new(&cfg, &run, violations(&run), Vec::new());
    finish(&rep, a.report.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn certify(a: &CertifyArgs) -> Result<ExitCode> {
    let cfg = config(&a.run)?;
    let run = run_trials(&cfg)?;
    let dist = &run.distribution;
    let need_k = || a.k.context("--k is required for this property");
    let mut invalid = violations(&run);
    let cert: Certificate = match a.property {
        Property::Pd => check_pseudodeterministic(dist, a.threshold),
        Property::KConc => {
            let k = need_k()?;
            if k < 1.0 {
                bail!("k must be at least 1");
            }
            check_k_concentrated(dist, k)
        }
        Property::KPd => {
            let k = need_k()?;
            if k < 1.0 || k.fract() != 0.0 {
                bail!("k must be a positive integer");
            }
            check_k_pseudodeterministic(dist, k as usize)
        }
        Property::Entropy => check_entropy(dist, need_k()?),
        Property::ZeroError => {
            let v = Validator::for_algorithm(&run.algorithm, &run.stream)
                .context("zero-error needs an oracle for this instance")?;
            let bad: Vec<String> = dist
                .counts()
                .keys()
                .filter(|o| !v.is_valid(o))
                .filter(|o| !pd_harness::certify::NO_ANSWER.contains(&o.as_str()))
                .cloned()
                .collect();
            let count = certify_zero_error(dist, |o| v.is_valid(o));
            invalid = Some(count);
            zero_error_certificate(count, dist.trials(), bad)
        }
    };
    let verdict = cert.verdict;
    let rep = Report::new(&cfg, &run, invalid, vec![cert]);
    finish(&rep, a.run.report.as_ref())?;
    Ok(exit(verdict))
}

fn exit(v: Verdict) -> ExitCode {
    ExitCode::from(v.exit_code() as u8)
}

fn space(a: &SpaceArgs) -> Result<ExitCode> {
    let sweep = Sweep::parse(&a.sweep)?;
    let params = Params::from_pairs(&a.params)?;
    let table = measure_space(a.alg, &sweep, a.n, &params, a.passes, a.trials, Seed::from_hex(&a.seed)?)?;
    println!("{:>12} {:>12} {:>6}", sweep.key, "peak_words", "bits");
    for p in &table.points {
        println!("{:>12} {:>12} {:>6}", p.value, p.peak_words, p.word_bits);
    }
    match table.log_log_slope {
        Some(s) => println!("log-log slope {s:.4}"),
        None => println!("log-log slope n/a"),
    }
    if let Some(p) = &a.report {
        let mut body = serde_json::to_string_pretty(&table)?;
        body.push('\n');
        std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Certify(a) => certify(a),
        Command::Space(a) => space(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
