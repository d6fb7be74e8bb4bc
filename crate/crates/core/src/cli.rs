//! Run configuration and the commands behind the `subword` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 arithmetic
//! overflow or exceeded capacity, 4 I/O failure.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::certify::{classify, AnalysisConfig, AnalysisReport, Verdict};
use crate::dynamics::OrbitTable;
use crate::error::{Error, Result};
use crate::linrep::{format_grid, LinearRepresentation, DEFAULT_DIRECT_SUM_LIMIT};
use crate::verify::{run_suite, suite};
use crate::word::{all_words, BinaryWord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Arity(_) | Error::Domain(_) | Error::Index(_) => EXIT_INPUT,
        Error::Overflow(_) | Error::Capacity(_) => EXIT_OVERFLOW,
        Error::Io(_) => EXIT_IO,
        Error::Invariant(_) => EXIT_VERIFY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

/// Limits and output settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_word_length: usize,
    pub dense_limit: usize,
    pub direct_sum_limit: u64,
    pub gelfand_tol: f64,
    pub sweep_parallelism: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let analysis = AnalysisConfig::default();
        Self {
            max_word_length: analysis.max_word_length,
            dense_limit: analysis.dense_limit,
            direct_sum_limit: DEFAULT_DIRECT_SUM_LIMIT,
            gelfand_tol: analysis.gelfand_tol,
            sweep_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            format: OutputFormat::Json,
        }
    }
}

const CONFIG_KEYS: [&str; 6] = [
    "max_word_length",
    "dense_limit",
    "direct_sum_limit",
    "gelfand_tol",
    "sweep_parallelism",
    "format",
];

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("bad value {v:?} for {key}")))
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment, missing keys keep
    /// their defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "max_word_length" => cfg.max_word_length = parse_value(key, value)?,
                "dense_limit" => cfg.dense_limit = parse_value(key, value)?,
                "direct_sum_limit" => cfg.direct_sum_limit = parse_index(value)?,
                "gelfand_tol" => cfg.gelfand_tol = parse_value(key, value)?,
                "sweep_parallelism" => cfg.sweep_parallelism = parse_value(key, value)?,
                "format" => cfg.format = value.parse()?,
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {key:?}; expected one of {CONFIG_KEYS:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        format!(
            "max_word_length = {}\ndense_limit = {}\ndirect_sum_limit = {}\ngelfand_tol = {}\nsweep_parallelism = {}\nformat = {}\n",
            self.max_word_length,
            self.dense_limit,
            self.direct_sum_limit,
            self.gelfand_tol,
            self.sweep_parallelism,
            self.format
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_word_length == 0 || self.max_word_length > crate::word::MAX_LEN {
            return Err(Error::Domain(format!(
                "max_word_length must lie in 1..={}",
                crate::word::MAX_LEN
            )));
        }
        if self.dense_limit == 0 || self.direct_sum_limit == 0 || self.sweep_parallelism == 0 {
            return Err(Error::Domain("limits must be positive".into()));
        }
        if !(self.gelfand_tol > 0.0 && self.gelfand_tol.is_finite()) {
            return Err(Error::Domain("gelfand_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            max_word_length: self.max_word_length,
            dense_limit: self.dense_limit,
            gelfand_tol: self.gelfand_tol,
            ..AnalysisConfig::default()
        }
    }
}

/// Parses `N`, `2^k` or `2^k-1`, up to `2^62`.
pub fn parse_index(s: &str) -> Result<u64> {
    let bad = || Error::Parse(format!("bad index {s:?}; expected N, 2^k or 2^k-1"));
    let s = s.trim();
    let n = if let Some(rest) = s.strip_prefix("2^") {
        let (exp, minus_one) = match rest.strip_suffix("-1") {
            Some(e) => (e, true),
            None => (rest, false),
        };
        let k: u32 = exp.parse().map_err(|_| bad())?;
        if k > 62 {
            return Err(Error::Domain(format!("2^{k} exceeds 2^62")));
        }
        (1u64 << k) - minus_one as u64
    } else {
        s.parse().map_err(|_| bad())?
    };
    if n > 1 << 62 {
        return Err(Error::Domain(format!("{n} exceeds 2^62")));
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stride {
    /// Powers of two and powers of two minus one, plus the endpoint.
    Geometric,
    /// Evenly spaced, plus the endpoint.
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumMethod {
    Fast,
    Direct,
}

/// Sample points for `sums`, ascending and without repeats.
pub fn sample_points(to: u64, stride: Stride, step: Option<u64>) -> Result<Vec<u64>> {
    let mut pts = Vec::new();
    match stride {
        Stride::Geometric => {
            pts.push(0);
            for m in 0..63 {
                let p = 1u64 << m;
                if p - 1 > to {
                    break;
                }
                pts.push(p - 1);
                if p <= to {
                    pts.push(p);
                }
            }
        }
        Stride::Arithmetic => {
            let step = step.unwrap_or_else(|| to.div_ceil(1000).max(1));
            if step == 0 {
                return Err(Error::Domain("step must be positive".into()));
            }
            pts.extend((0..=to).step_by(step as usize));
        }
    }
    pts.push(to);
    pts.sort_unstable();
    pts.dedup();
    Ok(pts)
}

fn parse_word(s: &str) -> Result<BinaryWord> {
    s.parse()
}

fn parse_pair(word: &str, u: Option<&str>) -> Result<(BinaryWord, BinaryWord)> {
    let w = parse_word(word)?;
    if w.is_empty() {
        return Err(Error::Domain("the word must be nonempty".into()));
    }
    let u = match u {
        Some(u) => parse_word(u)?,
        None => BinaryWord::last_unit(w.len())?,
    };
    if u.len() != w.len() {
        return Err(Error::Arity(format!("|u| = {} but |w| = {}", u.len(), w.len())));
    }
    Ok((w, u))
}

fn report_csv_header() -> &'static str {
    "word,u,orbit_size,verdict,certificate,modulus_two,det_2I_minus_M,spectral_radius"
}

fn report_csv_row(r: &AnalysisReport) -> String {
    let cert = r
        .certificate
        .as_ref()
        .map_or(String::new(), |c| format!("a={} b={} rep={}", c.a, c.b, c.cycle_rep));
    let m2 = r.modulus_two.as_ref().map_or(String::new(), |m| m.present.to_string());
    format!(
        "{},{},{},{},{},{},{},{}",
        r.word,
        r.u,
        r.orbit_size,
        r.verdict,
        cert,
        m2,
        r.det_2i_minus_m.as_deref().unwrap_or(""),
        r.spectral_radius.estimate
    )
}

fn render_report(r: &AnalysisReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => r.to_json() + "\n",
        OutputFormat::Csv => format!("{}\n{}\n", report_csv_header(), report_csv_row(r)),
        OutputFormat::Text => r.to_text(),
    }
}

pub fn cmd_analyze(word: &str, u: Option<&str>, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (w, u) = parse_pair(word, u)?;
    let report = classify(&w, Some(&u), &cfg.analysis())?;
    out.write_all(render_report(&report, cfg.format).as_bytes())?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sums(
    word: &str,
    u: Option<&str>,
    to: &str,
    stride: Stride,
    step: Option<u64>,
    method: SumMethod,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let (w, u) = parse_pair(word, u)?;
    let to = parse_index(to)?;
    let points = sample_points(to, stride, step)?;
    let rep = LinearRepresentation::new(OrbitTable::build(&w, &u)?);
    let mut buf = String::from("n,S_n\n");
    match method {
        SumMethod::Fast => {
            for n in points {
                buf += &format!("{n},{}\n", rep.partial_sum_fast(n)?.head());
            }
        }
        SumMethod::Direct => {
            if to > cfg.direct_sum_limit {
                return Err(Error::Capacity(format!(
                    "direct summation to {to} exceeds the limit {}",
                    cfg.direct_sum_limit
                )));
            }
            // one pass over 0..=to; points are sorted
            let (mut acc, mut k) = (0i64, 0u64);
            for n in points {
                while k <= n {
                    acc += rep.state_vector(k).head();
                    k += 1;
                }
                buf += &format!("{n},{acc}\n");
            }
        }
    }
    out.write_all(buf.as_bytes())?;
    Ok(EXIT_OK)
}

pub fn cmd_orbit(word: &str, u: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let (w, u) = parse_pair(word, u)?;
    out.write_all(OrbitTable::build(&w, &u)?.dump().as_bytes())?;
    Ok(EXIT_OK)
}

pub fn cmd_matrix(word: &str, u: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let (w, u) = parse_pair(word, u)?;
    let rep = LinearRepresentation::new(OrbitTable::build(&w, &u)?);
    let order: Vec<String> = rep.orbit().elements().map(|e| e.to_string()).collect();
    let mut s = format!("# matrix w={w} u={u} size={}\n", rep.size());
    s += &format!("# order {}\n", order.join(" "));
    s += "# M\n";
    s += &format_grid(&rep.dense_m());
    s += "# M0\n";
    s += &format_grid(&rep.matrix(0).to_dense());
    s += "# M1\n";
    s += &format_grid(&rep.matrix(1).to_dense());
    s += &format!("# c {}\n", rep.constant_c());
    out.write_all(s.as_bytes())?;
    Ok(EXIT_OK)
}

/// Tally of one sweep.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub counts: BTreeMap<Verdict, usize>,
    pub total: usize,
    pub consistency_violations: usize,
}

impl SweepSummary {
    fn add(&mut self, r: &AnalysisReport) {
        *self.counts.entry(r.verdict).or_default() += 1;
        self.total += 1;
        if !r.consistency.ok() {
            self.consistency_violations += 1;
        }
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    fn render(&self, format: OutputFormat) -> String {
        let counts: Vec<String> = Verdict::ALL
            .iter()
            .map(|v| format!("{}={}", v, self.count(*v)))
            .collect();
        match format {
            OutputFormat::Json => {
                let map: serde_json::Map<String, serde_json::Value> = Verdict::ALL
                    .iter()
                    .map(|v| (v.to_string(), self.count(*v).into()))
                    .collect();
                serde_json::json!({
                    "summary": map,
                    "total": self.total,
                    "consistency_violations": self.consistency_violations,
                })
                .to_string()
                    + "\n"
            }
            _ => format!(
                "# summary {} total={} consistency_violations={}\n",
                counts.join(" "),
                self.total,
                self.consistency_violations
            ),
        }
    }
}

const SWEEP_CHUNK: usize = 1024;

/// Classifies every word of length `2..=maxlen` with its default `u`.
pub fn sweep(maxlen: usize, cfg: &RunConfig, out: &mut dyn Write) -> Result<SweepSummary> {
    if !(2..=cfg.max_word_length).contains(&maxlen) {
        return Err(Error::Domain(format!(
            "maxlen {maxlen} outside 2..={}",
            cfg.max_word_length
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.sweep_parallelism)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let analysis = cfg.analysis();
    let mut summary = SweepSummary::default();
    if cfg.format == OutputFormat::Csv {
        writeln!(out, "{}", report_csv_header())?;
    }
    for len in 2..=maxlen {
        let words: Vec<BinaryWord> = all_words(len).collect();
        for chunk in words.chunks(SWEEP_CHUNK) {
            let reports: Vec<Result<AnalysisReport>> =
                pool.install(|| chunk.par_iter().map(|w| classify(w, None, &analysis)).collect());
            for r in reports {
                let r = r?;
                summary.add(&r);
                let line = match cfg.format {
                    OutputFormat::Json => r.to_json(),
                    OutputFormat::Csv => report_csv_row(&r),
                    OutputFormat::Text => format!("{} {}", r.word, r.verdict),
                };
                writeln!(out, "{line}")?;
            }
        }
    }
    out.write_all(summary.render(cfg.format).as_bytes())?;
    Ok(summary)
}

pub fn cmd_sweep(maxlen: usize, path: Option<&Path>, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match path {
        Some(p) => {
            let mut file = BufWriter::new(fs::File::create(p)?);
            sweep(maxlen, cfg, &mut file)?;
            file.flush()?;
        }
        None => {
            sweep(maxlen, cfg, out)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(name: &str, out: &mut dyn Write) -> Result<i32> {
    let fixtures = suite(name)?;
    let results = run_suite(&fixtures);
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        writeln!(out, "{}", r.line())?;
    }
    writeln!(out, "{} passed, {failed} failed", results.len() - failed)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Debug, Parser)]
#[command(name = "subword", version, about = "Partial sums of (-1)^{s_w(n)} and their growth")]
pub struct Cli {
    /// key=value configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub dense_limit: Option<usize>,
    #[arg(long, global = true)]
    pub direct_sum_limit: Option<String>,
    #[arg(long, global = true)]
    pub gelfand_tol: Option<f64>,
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true)]
    pub max_word_length: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a word and print the evidence.
    Analyze { word: String, u: Option<String> },
    /// Exact partial sums as "n,S_n" CSV.
    Sums {
        word: String,
        #[arg(long)]
        u: Option<String>,
        /// Endpoint: N, 2^k or 2^k-1.
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value = "geometric")]
        stride: Stride,
        /// Spacing for the arithmetic stride.
        #[arg(long)]
        step: Option<u64>,
        #[arg(long, value_enum, default_value = "fast")]
        method: SumMethod,
        /// CSV output (the only output form of this command).
        #[arg(long)]
        csv: bool,
    },
    /// Orbit elements with successors and signs.
    Orbit { word: String, u: Option<String> },
    /// Dense M, M0, M1 and the constant vector c.
    Matrix { word: String, u: Option<String> },
    /// Classify all words up to a length.
    Sweep {
        #[arg(long)]
        maxlen: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a regression fixture suite.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
    },
    /// Print the effective configuration in key=value form.
    Config,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(v) = self.dense_limit {
            cfg.dense_limit = v;
        }
        if let Some(v) = &self.direct_sum_limit {
            cfg.direct_sum_limit = parse_index(v)?;
        }
        if let Some(v) = self.gelfand_tol {
            cfg.gelfand_tol = v;
        }
        if let Some(v) = self.parallelism {
            cfg.sweep_parallelism = v;
        }
        if let Some(v) = self.max_word_length {
            cfg.max_word_length = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = cli.run_config()?;
    match &cli.command {
        Command::Analyze { word, u } => cmd_analyze(word, u.as_deref(), &cfg, out),
        Command::Sums {
            word,
            u,
            to,
            stride,
            step,
            method,
            csv: _,
        } => cmd_sums(word, u.as_deref(), to, *stride, *step, *method, &cfg, out),
        Command::Orbit { word, u } => cmd_orbit(word, u.as_deref(), out),
        Command::Matrix { word, u } => cmd_matrix(word, u.as_deref(), out),
        Command::Sweep { maxlen, out: path } => cmd_sweep(*maxlen, path.as_deref(), &cfg, out),
        Command::Verify { suite } => cmd_verify(suite, out),
        Command::Config => {
            out.write_all(cfg.to_kv().as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    if out.flush().is_err() {
        return EXIT_IO;
    }
    code
}
