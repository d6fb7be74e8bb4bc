//! Certificates for sublinear growth, the theorem-family checkers, and the
//! combined classifier.
//!
//! A [`Certificate`] for `(w, u)` is a triple `(a, b, r)` with
//! `S_a(w)(u) = u`, `T_a(w)(u) = 0`, and `r` an orbit element whose `S_b`
//! cycle carries an odd number of `-1` entries of `M_b`. The fixed point rules
//! out every eigenvalue of modulus 2 except 2 itself, with a `±1` eigenvector;
//! the odd cycle then rules out that eigenvector, so `‖V(N)‖ = O(N^(1-ε))`.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::dynamics::{cycle_stats_bits, OrbitTable, OrbitWalker, WordMaps, DEFAULT_ORBIT_LIMIT};
use crate::error::{Error, Result};
use crate::linrep::LinearRepresentation;
use crate::spectra::{
    det_string, detect_modulus_two, eigenvalue_two_by_determinant, spectral_radius_estimate,
    spectral_radius_sparse, to_dense_f64, ModulusTwo, RadiusEstimate,
};
use crate::word::BinaryWord;

/// Which search or theorem produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Search,
    SimpleFamily,
    OneRun,
    LongPrefix,
    TwoRuns,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Search => "search",
            Self::SimpleFamily => "simple-family",
            Self::OneRun => "one-run",
            Self::LongPrefix => "long-prefix",
            Self::TwoRuns => "two-runs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(skip)]
    pub word: BinaryWord,
    #[serde(skip)]
    pub u: BinaryWord,
    /// Letter fixing `u` with sign 0.
    pub a: u8,
    /// Letter whose cycle through `cycle_rep` has an odd number of `-1`s.
    pub b: u8,
    pub cycle_rep: BinaryWord,
    pub kind: CertificateKind,
}

impl Certificate {
    /// Re-derives all three conditions from the word maps.
    pub fn replay(&self) -> Result<()> {
        let (w, u) = (&self.word, &self.u);
        if w.is_empty() || w.len() != u.len() || self.cycle_rep.len() != u.len() {
            return Err(Error::Arity("certificate words of different lengths".into()));
        }
        let maps = WordMaps::new(w);
        if maps.step_bits(self.a, u.bits()) != (0, u.bits()) {
            return Err(Error::Invariant(format!(
                "S_{a} does not fix {u} with sign 0",
                a = self.a
            )));
        }
        if !OrbitWalker::start(w, u)?.any(|x| x == self.cycle_rep) {
            return Err(Error::Invariant(format!("{} is not in the orbit", self.cycle_rep)));
        }
        if cycle_stats_bits(&maps, self.b, self.cycle_rep.bits()).sign_parity != 1 {
            return Err(Error::Invariant(format!(
                "S_{b} cycle through {r} has an even number of -1 entries",
                b = self.b,
                r = self.cycle_rep
            )));
        }
        Ok(())
    }
}

fn check_same_length(w: &BinaryWord, u: &BinaryWord) -> Result<()> {
    if w.len() != u.len() {
        return Err(Error::Arity(format!("|w| = {} but |u| = {}", w.len(), u.len())));
    }
    if w.is_empty() {
        return Err(Error::Arity("certificates need a nonempty word".into()));
    }
    Ok(())
}

/// First certificate in the order `a`, then `b`, then orbit position.
///
/// Orbit elements are produced lazily, so a hit early in the orbit costs
/// little even when the orbit is large.
pub fn find_certificate(w: &BinaryWord, u: &BinaryWord) -> Result<Option<Certificate>> {
    check_same_length(w, u)?;
    let maps = WordMaps::new(w);
    for a in 0..2u8 {
        if maps.step_bits(a, u.bits()) != (0, u.bits()) {
            continue;
        }
        for b in 0..2u8 {
            // T_b vanishes everywhere unless b is the first letter of w
            if w.first() != Some(b) {
                continue;
            }
            let mut covered: HashSet<u64> = HashSet::new();
            for x in OrbitWalker::start(w, u)? {
                if covered.contains(&x.bits()) {
                    continue;
                }
                let mut cur = x.bits();
                let mut parity = 0u8;
                loop {
                    covered.insert(cur);
                    let (t, next) = maps.step_bits(b, cur);
                    parity ^= t;
                    cur = next;
                    if cur == x.bits() {
                        break;
                    }
                }
                if parity == 1 {
                    return Ok(Some(Certificate {
                        word: *w,
                        u: *u,
                        a,
                        b,
                        cycle_rep: x,
                        kind: CertificateKind::Search,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

fn invariant(msg: String) -> Error {
    Error::Invariant(msg)
}

fn run_word(a: u8, len: usize) -> Result<BinaryWord> {
    BinaryWord::repeated(a, len)
}

/// Requires a search certificate and replays `cert`.
fn confirm(cert: Certificate) -> Result<Certificate> {
    cert.replay()?;
    if find_certificate(&cert.word, &cert.u)?.is_none() {
        return Err(invariant(format!(
            "certificate search finds nothing for ({}, {})",
            cert.word, cert.u
        )));
    }
    Ok(cert)
}

/// `Λ_a(a^k)(0^(k-1)1)` with its sign parity.
fn single_run_cycle(a: u8, k: usize) -> Result<(usize, u8)> {
    let w = run_word(a, k)?;
    let s = cycle_stats_bits(&WordMaps::new(&w), a, 1);
    Ok((s.length, s.sign_parity))
}

/// The pair `(a^k w ā a^(j-1), 0^(k-1) 1 0^(|w|+j-1) 1)`.
pub fn simple_family_pair(a: u8, w: &BinaryWord, k: usize, j: usize) -> Result<(BinaryWord, BinaryWord)> {
    if a > 1 {
        return Err(domain(format!("letter {a}")));
    }
    if k < 2 || !k.is_power_of_two() {
        return Err(domain(format!("k = {k} must be a power of 2 above 1")));
    }
    if j < 2 || j > k {
        return Err(domain(format!("j = {j} must satisfy 1 < j <= k = {k}")));
    }
    let len = k + w.len() + j;
    if len > crate::word::MAX_LEN {
        return Err(domain(format!("word length {len} exceeds {}", crate::word::MAX_LEN)));
    }
    let w2 = run_word(a, k)?
        .concat(w)?
        .concat(&run_word(1 - a, 1)?)?
        .concat(&run_word(a, j - 1)?)?;
    let u2 = BinaryWord::unit(len, k)?.xor(&BinaryWord::last_unit(len)?)?;
    Ok((w2, u2))
}

pub fn check_simple_family(a: u8, w: &BinaryWord, k: usize, j: usize) -> Result<Certificate> {
    let (w2, u2) = simple_family_pair(a, w, k, j)?;
    let maps = WordMaps::new(&w2);
    let abar = 1 - a;
    let (t, s) = maps.step_bits(abar, u2.bits());
    if s != u2.bits() {
        return Err(invariant(format!("S_{abar}({w2}) does not fix {u2}")));
    }
    if t != 0 {
        return Err(invariant(format!("T_{abar}({w2})({u2}) = 1")));
    }
    let stats = cycle_stats_bits(&maps, a, u2.bits());
    let (run_len, _) = single_run_cycle(a, k)?;
    if stats.length != run_len {
        return Err(invariant(format!(
            "cycle length {} differs from the single-run length {run_len}",
            stats.length
        )));
    }
    if stats.first_letter_parity != 1 || stats.sign_parity != 1 {
        return Err(invariant(format!("S_{a} cycle through {u2} has even parity")));
    }
    confirm(Certificate {
        word: w2,
        u: u2,
        a: abar,
        b: a,
        cycle_rep: u2,
        kind: CertificateKind::SimpleFamily,
    })
}

/// Evidence that `a^ℓ` fails to have sublinear growth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneRunObstruction {
    /// `±1` eigenvector of `M_a` for eigenvalue 1, in orbit order.
    pub eigenvector: Vec<i8>,
    /// `⟨v(1), x⟩`.
    pub inner_product: i64,
    /// `(n, |S_(2^n - 1)| / 2^n)` over the sampled range.
    pub ratios: Vec<(u32, f64)>,
    /// Minimum of the first three ratios.
    pub delta: f64,
    /// Whether every later ratio stays at least `delta / 2`.
    pub empirical_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OneRunVerdict {
    ProvedP { certificate: Certificate },
    ProvedNotP { obstruction: OneRunObstruction },
}

impl OneRunVerdict {
    pub fn is_proved_p(&self) -> bool {
        matches!(self, OneRunVerdict::ProvedP { .. })
    }
}

pub const ONE_RUN_SAMPLE_RANGE: std::ops::RangeInclusive<u32> = 10..=22;
pub const MAX_ONE_RUN: usize = 20;

pub fn check_one_run(a: u8, len: usize) -> Result<OneRunVerdict> {
    check_one_run_with(a, len, ONE_RUN_SAMPLE_RANGE)
}

pub fn check_one_run_with(a: u8, len: usize, samples: std::ops::RangeInclusive<u32>) -> Result<OneRunVerdict> {
    if a > 1 || !(2..=MAX_ONE_RUN).contains(&len) {
        return Err(domain(format!("one-run needs a in {{0,1}} and 2 <= l <= {MAX_ONE_RUN}")));
    }
    let w = run_word(a, len)?;
    let u = BinaryWord::last_unit(len)?;
    if len.is_power_of_two() {
        let cert = find_certificate(&w, &u)?
            .ok_or_else(|| invariant(format!("no certificate for {w}")))?;
        let (run_len, parity) = single_run_cycle(a, len)?;
        if run_len != len || parity != 1 {
            return Err(invariant(format!("single-run cycle of {w} is ({run_len}, {parity})")));
        }
        cert.replay()?;
        return Ok(OneRunVerdict::ProvedP {
            certificate: Certificate {
                kind: CertificateKind::OneRun,
                ..cert
            },
        });
    }
    let rep = LinearRepresentation::new(OrbitTable::build(&w, &u)?);
    let orbit = rep.orbit();
    let size = orbit.len();
    if size != len.next_power_of_two() {
        return Err(invariant(format!("orbit of {w} has size {size}")));
    }
    // u_q = S_a^q(u_0) enumerates the orbit as one cycle
    let succ = orbit.succ(a);
    let signs = orbit.signs(a);
    let mut order = Vec::with_capacity(size);
    let mut i = 0usize;
    for _ in 0..size {
        order.push(i);
        i = succ[i] as usize;
    }
    if i != 0 {
        return Err(invariant("S_a is not a single cycle".into()));
    }
    let mut x = vec![0i64; size];
    let mut later = 0usize;
    for &pos in order.iter().rev() {
        later += signs[pos] as usize;
        x[pos] = if later % 2 == 0 { 1 } else { -1 };
    }
    if rep.matrix(a).apply(&x)? != x || rep.matrix(1 - a).apply(&x)? != x {
        return Err(invariant("x is not fixed by M_0 and M_1".into()));
    }
    let v1 = rep.state_vector(1);
    let inner: i64 = v1.entries().iter().zip(&x).map(|(p, q)| p * q).sum();
    if inner == 0 {
        return Err(invariant("<v(1), x> vanishes".into()));
    }
    let mut ratios = Vec::new();
    for n in samples {
        let big_n = (1u64 << n) - 1;
        let s = rep.partial_sum_fast(big_n)?.head();
        ratios.push((n, s.unsigned_abs() as f64 / (1u64 << n) as f64));
    }
    let delta = ratios.iter().take(3).map(|r| r.1).fold(f64::INFINITY, f64::min);
    let empirical_ok = delta > 0.0 && ratios.iter().skip(3).all(|r| r.1 >= delta / 2.0);
    Ok(OneRunVerdict::ProvedNotP {
        obstruction: OneRunObstruction {
            eigenvector: x.iter().map(|&e| e as i8).collect(),
            inner_product: inner,
            ratios,
            delta,
            empirical_ok,
        },
    })
}

/// A violated hypothesis of the long-prefix construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongPrefixHypothesis {
    BadLetter,
    KNotPowerOfTwo,
    RunIsFactor,
    LengthMismatch,
    ZeroU,
    NotFixed,
    NonzeroSign,
    TooLong,
}

impl fmt::Display for LongPrefixHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BadLetter => "letters must be 0 or 1",
            Self::KNotPowerOfTwo => "k is not a power of 2",
            Self::RunIsFactor => "a^k is a factor of w",
            Self::LengthMismatch => "|u| differs from |w|",
            Self::ZeroU => "u is the zero word",
            Self::NotFixed => "S_b(w) does not fix u",
            Self::NonzeroSign => "T_b(w)(u) is not 0",
            Self::TooLong => "a^k ā w is too long",
        })
    }
}

/// Parameters `(a, k, w, b, u)` of the pair `(a^k ā w, 0^(k+1) u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LongPrefixParams {
    pub a: u8,
    pub k: usize,
    pub w: BinaryWord,
    pub b: u8,
    pub u: BinaryWord,
}

impl LongPrefixParams {
    pub fn validate(&self) -> std::result::Result<(), LongPrefixHypothesis> {
        use LongPrefixHypothesis::*;
        if self.a > 1 || self.b > 1 {
            return Err(BadLetter);
        }
        if !self.k.is_power_of_two() {
            return Err(KNotPowerOfTwo);
        }
        if self.k + 1 + self.w.len() > crate::word::MAX_LEN {
            return Err(TooLong);
        }
        if self.w.contains_factor(&run_word(self.a, self.k).map_err(|_| TooLong)?) {
            return Err(RunIsFactor);
        }
        if self.u.len() != self.w.len() {
            return Err(LengthMismatch);
        }
        if self.u.is_zero() {
            return Err(ZeroU);
        }
        let (t, s) = WordMaps::new(&self.w).step_bits(self.b, self.u.bits());
        if s != self.u.bits() {
            return Err(NotFixed);
        }
        if t != 0 {
            return Err(NonzeroSign);
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<(BinaryWord, BinaryWord)> {
        let w2 = run_word(self.a, self.k)?.concat(&run_word(1 - self.a, 1)?)?.concat(&self.w)?;
        let u2 = BinaryWord::zeros(self.k + 1)?.concat(&self.u)?;
        Ok((w2, u2))
    }
}

pub fn check_long_prefix(a: u8, k: usize, w: &BinaryWord, b: u8, u: &BinaryWord) -> Result<Certificate> {
    let params = LongPrefixParams { a, k, w: *w, b, u: *u };
    params
        .validate()
        .map_err(|h| domain(format!("long-prefix hypothesis failed: {h}")))?;
    let (w2, u2) = params.pair()?;
    certify_long_prefix(a, k, b, &w2, &u2)
}

/// The pair `(a^k ā w, 0^(k+|w|) 1)`, which also covers the empty `w`.
pub fn check_long_prefix_canonical(a: u8, k: usize, w: &BinaryWord) -> Result<Certificate> {
    use LongPrefixHypothesis::*;
    let fail = |h: LongPrefixHypothesis| domain(format!("long-prefix hypothesis failed: {h}"));
    if a > 1 {
        return Err(fail(BadLetter));
    }
    if !k.is_power_of_two() {
        return Err(fail(KNotPowerOfTwo));
    }
    if k + 1 + w.len() > crate::word::MAX_LEN {
        return Err(fail(TooLong));
    }
    if w.contains_factor(&run_word(a, k)?) {
        return Err(fail(RunIsFactor));
    }
    let w2 = run_word(a, k)?.concat(&run_word(1 - a, 1)?)?.concat(w)?;
    let u2 = BinaryWord::last_unit(w2.len())?;
    // the last letter of w2 cannot move the final 1 under the opposite map
    let b = 1 - w2.last().expect("nonempty");
    certify_long_prefix(a, k, b, &w2, &u2)
}

fn certify_long_prefix(a: u8, k: usize, b: u8, w2: &BinaryWord, u2: &BinaryWord) -> Result<Certificate> {
    let maps = WordMaps::new(w2);
    if maps.step_bits(b, u2.bits()) != (0, u2.bits()) {
        return Err(invariant(format!("S_{b}({w2}) does not fix {u2} with sign 0")));
    }
    // walk the leading 1 of u2 down to position k, one letter at a time
    let lead = u2.len() - (63 - u2.bits().leading_zeros() as usize);
    let mut cur = u2.bits();
    for p in (k + 1..=lead).rev() {
        cur = maps.step_bits(w2.letter_unchecked(p), cur).1;
    }
    let target = BinaryWord::from_bits(cur, u2.len())?;
    if !target.has_prefix(&BinaryWord::last_unit(k)?) {
        return Err(invariant(format!("{target} lacks the prefix 0^(k-1)1")));
    }
    let stats = cycle_stats_bits(&maps, a, cur);
    let (run_len, _) = single_run_cycle(a, k)?;
    if stats.length != run_len || run_len != k {
        return Err(invariant(format!(
            "cycle through {target} has length {} instead of {k}",
            stats.length
        )));
    }
    if stats.sign_parity != 1 || stats.first_letter_parity != 1 {
        return Err(invariant(format!("S_{a} cycle through {target} has even parity")));
    }
    confirm(Certificate {
        word: *w2,
        u: *u2,
        a: b,
        b: a,
        cycle_rep: target,
        kind: CertificateKind::LongPrefix,
    })
}

pub const MAX_TWO_RUNS: usize = 20;

/// Certifies `(a^j ā^k, 0^j u)`.
pub fn check_two_runs(a: u8, j: usize, k: usize, u: &BinaryWord) -> Result<Certificate> {
    if a > 1 || j == 0 || k == 0 || j + k > MAX_TWO_RUNS {
        return Err(domain(format!(
            "two-runs needs a in {{0,1}}, j, k >= 1 and j + k <= {MAX_TWO_RUNS}"
        )));
    }
    if u.len() != k || u.is_zero() {
        return Err(domain(format!("u = {u} must be a nonzero word of length {k}")));
    }
    let w2 = run_word(a, j)?.concat(&run_word(1 - a, k)?)?;
    let u2 = BinaryWord::zeros(j)?.concat(u)?;
    let maps = WordMaps::new(&w2);
    if maps.step_bits(a, u2.bits()) != (0, u2.bits()) {
        return Err(invariant(format!("S_{a}({w2}) does not fix {u2} with sign 0")));
    }
    let prefix = BinaryWord::unit(j, 1)?;
    let found = OrbitWalker::start(&w2, &u2)?
        .find(|x| x.has_prefix(&prefix))
        .ok_or_else(|| invariant(format!("no orbit element with prefix {prefix}")))?;
    // every such word is a fixed point of S_a with sign 1
    if maps.step_bits(a, found.bits()) != (1, found.bits()) {
        return Err(invariant(format!("S_{a} does not fix {found} with sign 1")));
    }
    confirm(Certificate {
        word: w2,
        u: u2,
        a,
        b: a,
        cycle_rep: found,
        kind: CertificateKind::TwoRuns,
    })
}

/// Overall outcome for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ProvedP,
    ProvedNotP,
    SpectralObstruction,
    Inconclusive,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::ProvedP,
        Verdict::ProvedNotP,
        Verdict::SpectralObstruction,
        Verdict::Inconclusive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ProvedP => "PROVED_P",
            Verdict::ProvedNotP => "PROVED_NOT_P",
            Verdict::SpectralObstruction => "SPECTRAL_OBSTRUCTION",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One theorem family whose shape the pair matches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyMatch {
    pub family: CertificateKind,
    pub parameters: String,
    /// `PROVED_P`, `PROVED_NOT_P` or `failed: <reason>`.
    pub outcome: String,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleLengths {
    #[serde(rename = "S0")]
    pub s0: Vec<usize>,
    #[serde(rename = "S1")]
    pub s1: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Consistency {
    /// A certificate never coexists with a modulus-2 eigenvalue.
    pub certificate_vs_phases: bool,
    /// `det(2I - M) = 0` iff the phase decider admits `λ = 2`; null when the
    /// determinant was skipped.
    pub determinant_vs_phases: Option<bool>,
}

impl Consistency {
    pub fn ok(&self) -> bool {
        self.certificate_vs_phases && self.determinant_vs_phases != Some(false)
    }
}

fn ser_f64_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_f64(*v),
        _ => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub word: BinaryWord,
    pub u: BinaryWord,
    /// `P` for the default `u = 0^(ℓ-1)1`, `Q` for any other `u`.
    pub property: &'static str,
    pub orbit_size: usize,
    pub cycle_lengths: CycleLengths,
    pub certificate: Option<Certificate>,
    #[serde(rename = "det_2I_minus_M")]
    pub det_2i_minus_m: Option<String>,
    pub modulus_two: Option<ModulusTwo>,
    pub spectral_radius: RadiusEstimate,
    #[serde(serialize_with = "ser_f64_opt")]
    pub exponent_certified: Option<f64>,
    #[serde(serialize_with = "ser_f64_opt")]
    pub exponent_empirical: Option<f64>,
    pub verdict: Verdict,
    pub family_matches: Vec<FamilyMatch>,
    pub consistency: Consistency,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("word {}  u {}  property {}\n", self.word, self.u, self.property);
        out += &format!("verdict {}\n", self.verdict);
        out += &format!("orbit size {}\n", self.orbit_size);
        match &self.certificate {
            Some(c) => out += &format!("certificate a={} b={} cycle_rep={}\n", c.a, c.b, c.cycle_rep),
            None => out += "certificate none\n",
        }
        if let Some(m) = &self.modulus_two {
            out += &format!("modulus-2 eigenvalue {} (order {}, phases {:?})\n", m.present, m.order, m.phases);
        }
        if let Some(d) = &self.det_2i_minus_m {
            out += &format!("det(2I - M) = {d}\n");
        }
        out += &format!(
            "spectral radius {:.6} (tol {:.1e})\n",
            self.spectral_radius.estimate, self.spectral_radius.tol
        );
        for f in &self.family_matches {
            out += &format!("family {} {}: {}\n", f.family, f.parameters, f.outcome);
        }
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}

/// Knobs for [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub max_word_length: usize,
    pub dense_limit: usize,
    pub gelfand_tol: f64,
    pub orbit_limit: usize,
    pub one_run_samples: std::ops::RangeInclusive<u32>,
}

pub const DEFAULT_MAX_WORD_LENGTH: usize = 20;
pub const DEFAULT_GELFAND_TOL: f64 = 1e-4;

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            dense_limit: crate::spectra::DEFAULT_DENSE_LIMIT,
            gelfand_tol: DEFAULT_GELFAND_TOL,
            orbit_limit: DEFAULT_ORBIT_LIMIT,
            one_run_samples: ONE_RUN_SAMPLE_RANGE,
        }
    }
}

fn outcome_of(r: &Result<Certificate>) -> (String, Option<Certificate>) {
    match r {
        Ok(c) => ("PROVED_P".into(), Some(c.clone())),
        Err(e) => (format!("failed: {e}"), None),
    }
}

struct FamilyScan {
    matches: Vec<FamilyMatch>,
    one_run: Option<OneRunVerdict>,
}

fn scan_families(w: &BinaryWord, u: &BinaryWord, config: &AnalysisConfig) -> FamilyScan {
    let len = w.len();
    let default_u = *u == BinaryWord::last_unit(len).expect("len checked");
    let runs = w.run_decomposition().expect("nonempty");
    let a = runs[0].letter;
    let mut matches = Vec::new();
    let mut one_run = None;

    if runs.len() == 1 && default_u {
        let params = format!("a={a}, l={len}");
        match check_one_run_with(a, len, config.one_run_samples.clone()) {
            Ok(v) => {
                let (outcome, cert) = match &v {
                    OneRunVerdict::ProvedP { certificate } => ("PROVED_P".to_string(), Some(certificate.clone())),
                    OneRunVerdict::ProvedNotP { .. } => ("PROVED_NOT_P".to_string(), None),
                };
                matches.push(FamilyMatch {
                    family: CertificateKind::OneRun,
                    parameters: params,
                    outcome,
                    certificate: cert,
                });
                one_run = Some(v);
            }
            Err(e) => matches.push(FamilyMatch {
                family: CertificateKind::OneRun,
                parameters: params,
                outcome: format!("failed: {e}"),
                certificate: None,
            }),
        }
    }

    if runs.len() == 2 {
        let (j, k) = (runs[0].len, runs[1].len);
        let tail = u.suffix(k).expect("k <= len");
        if *u == BinaryWord::zeros(j).unwrap().concat(&tail).unwrap() && !tail.is_zero() {
            let (outcome, certificate) = outcome_of(&check_two_runs(a, j, k, &tail));
            matches.push(FamilyMatch {
                family: CertificateKind::TwoRuns,
                parameters: format!("a={a}, j={j}, k={k}, u={tail}"),
                outcome,
                certificate,
            });
        }
    }

    if runs.len() >= 2 && runs[0].len.is_power_of_two() {
        let k = runs[0].len;
        let rest = w.suffix(len - k - 1).expect("k < len");
        if !rest.contains_factor(&BinaryWord::repeated(a, k).unwrap()) {
            if default_u {
                let (outcome, certificate) = outcome_of(&check_long_prefix_canonical(a, k, &rest));
                matches.push(FamilyMatch {
                    family: CertificateKind::LongPrefix,
                    parameters: format!("a={a}, k={k}, w={rest}"),
                    outcome,
                    certificate,
                });
            } else if !rest.is_empty() && u.prefix(k + 1).unwrap().is_zero() {
                let tail = u.suffix(rest.len()).unwrap();
                let b = (0..2u8).find(|&b| {
                    LongPrefixParams { a, k, w: rest, b, u: tail }.validate().is_ok()
                });
                if let Some(b) = b {
                    let (outcome, certificate) = outcome_of(&check_long_prefix(a, k, &rest, b, &tail));
                    matches.push(FamilyMatch {
                        family: CertificateKind::LongPrefix,
                        parameters: format!("a={a}, k={k}, w={rest}, b={b}, u={tail}"),
                        outcome,
                        certificate,
                    });
                }
            }
        }
    }

    // simple family: u = 0^(k-1) 1 0^(|x|+j-1) 1 pins k
    if u.count_ones() == 2 && u.last() == Some(1) {
        let k = (1..=len).find(|&i| u.letter_unchecked(i) == 1).unwrap();
        let last = runs.last().unwrap();
        if k >= 2 && k.is_power_of_two() && runs.len() >= 2 && last.letter == a {
            let j = last.len + 1;
            if j <= k && len >= k + j && runs[0].len >= k {
                let xlen = len - k - j;
                let x = if xlen == 0 {
                    BinaryWord::empty()
                } else {
                    w.factor(k + 1, k + xlen).expect("in range")
                };
                let (outcome, certificate) = outcome_of(&check_simple_family(a, &x, k, j));
                matches.push(FamilyMatch {
                    family: CertificateKind::SimpleFamily,
                    parameters: format!("a={a}, w={x}, k={k}, j={j}"),
                    outcome,
                    certificate,
                });
            }
        }
    }

    FamilyScan { matches, one_run }
}

/// Least-squares slope of `log |S|` against `log N` for the running maximum
/// of `|S_N|` over geometrically spaced `N`.
pub fn empirical_exponent(rep: &LinearRepresentation, max_log: u32) -> Result<Option<f64>> {
    let mut points = Vec::new();
    let mut best = 0u64;
    for m in 6..=max_log {
        for n in [(1u64 << m) - 1, (3u64 << (m - 1)) - 1] {
            let s = rep.partial_sum_fast(n)?.head().unsigned_abs();
            best = best.max(s);
            if best > 0 {
                points.push(((n as f64 + 1.0).log2(), (best as f64).log2()));
            }
        }
    }
    Ok(regression_slope(&points))
}

/// Slope of the least-squares line through `(x, y)` points.
pub fn regression_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs every decider on `(w, u)`; `u` defaults to `0^(ℓ-1)1`.
pub fn classify(w: &BinaryWord, u: Option<&BinaryWord>, config: &AnalysisConfig) -> Result<AnalysisReport> {
    let len = w.len();
    if !(2..=config.max_word_length).contains(&len) {
        return Err(domain(format!(
            "word length {len} outside 2..={}",
            config.max_word_length
        )));
    }
    let u = match u {
        Some(u) => *u,
        None => BinaryWord::last_unit(len)?,
    };
    check_same_length(w, &u)?;
    let default_u = u == BinaryWord::last_unit(len)?;
    let mut warnings = Vec::new();

    let families = scan_families(w, &u, config);
    let search = find_certificate(w, &u)?;
    if let Some(c) = &search {
        c.replay()?;
    }

    let orbit = OrbitTable::build_with_limit(w, &u, config.orbit_limit)?;
    let cycle_lengths = CycleLengths {
        s0: orbit.cycle_lengths(0),
        s1: orbit.cycle_lengths(1),
    };
    let rep = LinearRepresentation::new(orbit);
    let size = rep.size();

    let modulus_two = match detect_modulus_two(rep.matrix(0), rep.matrix(1)) {
        Ok(m) => Some(m),
        Err(e) => {
            warnings.push(format!("phase decider: {e}"));
            None
        }
    };
    let det = if size <= config.dense_limit {
        Some(eigenvalue_two_by_determinant(&rep.dense_m(), config.dense_limit)?)
    } else {
        warnings.push(format!(
            "orbit size {size} exceeds the dense limit {}; determinant skipped",
            config.dense_limit
        ));
        None
    };
    let radius = if size <= config.dense_limit {
        spectral_radius_estimate(&to_dense_f64(&rep.dense_m()), config.gelfand_tol)
    } else {
        let budget = ((1u64 << 28) / size as u64).max(1024);
        spectral_radius_sparse(&rep, config.gelfand_tol, budget)
    };
    if !radius.converged {
        warnings.push(format!("spectral radius estimate did not reach tol {}", config.gelfand_tol));
    }
    if radius.estimate < 1.0 - radius.tol {
        warnings.push(format!("spectral radius estimate {} is below 1", radius.estimate));
    }
    let max_log = if size > 1 << 16 { 20 } else { 30 };
    let exponent_empirical = empirical_exponent(&rep, max_log)?;

    let certificate = search.clone().or_else(|| {
        families
            .matches
            .iter()
            .find_map(|m| m.certificate.clone())
    });
    let phases_admit_two = modulus_two.as_ref().map(ModulusTwo::has_eigenvalue_two);
    let consistency = Consistency {
        certificate_vs_phases: !(certificate.is_some() && modulus_two.as_ref().is_some_and(|m| m.present)),
        determinant_vs_phases: match (&det, phases_admit_two) {
            (Some((_, zero)), Some(two)) => Some(*zero == two),
            _ => None,
        },
    };
    if !consistency.ok() {
        warnings.push("deciders disagree".into());
    }

    let no_modulus_two = modulus_two.as_ref().is_some_and(|m| !m.present);
    let verdict = match &families.one_run {
        Some(OneRunVerdict::ProvedP { .. }) => Verdict::ProvedP,
        Some(OneRunVerdict::ProvedNotP { obstruction }) => {
            if !obstruction.empirical_ok {
                warnings.push("one-run growth ratios drift below delta/2".into());
            }
            Verdict::ProvedNotP
        }
        None if certificate.is_some() || no_modulus_two => Verdict::ProvedP,
        None if modulus_two.as_ref().is_some_and(|m| m.present) => Verdict::SpectralObstruction,
        None => Verdict::Inconclusive,
    };
    let exponent_certified = if no_modulus_two {
        if radius.estimate >= 2.0 {
            warnings.push("radius estimate reaches 2 without a modulus-2 eigenvalue".into());
        }
        Some(radius.estimate.log2())
    } else {
        None
    };

    Ok(AnalysisReport {
        word: *w,
        u,
        property: if default_u { "P" } else { "Q" },
        orbit_size: size,
        cycle_lengths,
        certificate,
        det_2i_minus_m: det.map(|(d, _)| det_string(&d)),
        modulus_two,
        spectral_radius: radius,
        exponent_certified,
        exponent_empirical,
        verdict,
        family_matches: families.matches,
        consistency,
        warnings,
    })
}
