//! Regression fixtures: published worked examples, held as plain data so that
//! a corrupted value is caught by [`run_suite`].

use crate::certify::check_one_run_with;
use crate::counting::{count_factor, count_subword};
use crate::dynamics::{cycle_length, orbit};
use crate::error::{Error, Result};
use crate::linrep::LinearRepresentation;
use crate::spectra::{eigenvalue_moduli, to_dense_f64};
use crate::word::BinaryWord;

/// Expected values checked by [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct Fixtures {
    /// `(w, n, s_w(n), e_w(n))`.
    pub counts: Vec<(String, u64, u64, u32)>,
    /// Orbit of `011` from `001`, in breadth-first order.
    pub orbit_011: Vec<String>,
    pub m_011: Vec<Vec<i64>>,
    pub c_011: Vec<i64>,
    /// Eigenvalue moduli of `M(011)`, ascending.
    pub moduli_011: Vec<f64>,
    pub moduli_tol: f64,
    /// `S_3 = first` and `S_(4N+3) = second.0 + second.1 · S_N` for `w = 01`.
    pub sums_01: (i64, (i64, i64)),
    pub sums_01_range: u64,
    /// `(ℓ, Λ_1(1^ℓ)(0^(ℓ-1)1))`.
    pub single_run_cycles: Vec<(usize, usize)>,
    /// `(ℓ, whether 1^ℓ has sublinear growth)`.
    pub one_run_table: Vec<(usize, bool)>,
}

impl Fixtures {
    pub fn reference() -> Self {
        Self {
            counts: vec![("10".into(), 26, 5, 2)],
            orbit_011: ["001", "011", "101", "111"].map(String::from).to_vec(),
            m_011: vec![
                vec![1, 1, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, -1, 1],
                vec![1, 0, 0, -1],
            ],
            c_011: vec![0, 2, 0, -2],
            moduli_011: vec![0.0, 0.0, 2f64.sqrt(), 2f64.sqrt()],
            moduli_tol: 1e-6,
            sums_01: (4, (2, 2)),
            sums_01_range: 1000,
            single_run_cycles: vec![(2, 2), (3, 4), (4, 4), (5, 8), (6, 8), (7, 8), (8, 8), (9, 16), (10, 16)],
            one_run_table: vec![(2, true), (3, false), (4, true), (5, false), (6, false), (7, false), (8, true)],
        }
    }
}

/// Names accepted by [`suite`].
pub const SUITES: [&str; 2] = ["reference", "paper"];

pub fn suite(name: &str) -> Result<Fixtures> {
    if SUITES.contains(&name) {
        Ok(Fixtures::reference())
    } else {
        Err(Error::Parse(format!("unknown suite {name:?}; expected one of {SUITES:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl FixtureResult {
    pub fn line(&self) -> String {
        if self.passed {
            format!("PASS {}", self.name)
        } else {
            format!("FAIL {}: {}", self.name, self.detail)
        }
    }
}

fn check(name: &'static str, outcome: Result<std::result::Result<(), String>>) -> FixtureResult {
    let (passed, detail) = match outcome {
        Ok(Ok(())) => (true, String::new()),
        Ok(Err(why)) => (false, why),
        Err(e) => (false, e.to_string()),
    };
    FixtureResult { name, passed, detail }
}

fn expect<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("got {got:?}, expected {want:?}"))
    }
}

fn rep_011() -> Result<LinearRepresentation> {
    let w: BinaryWord = "011".parse()?;
    Ok(LinearRepresentation::new(orbit(&w, &"001".parse()?)?))
}

pub fn run_suite(f: &Fixtures) -> Vec<FixtureResult> {
    let mut out = Vec::new();
    out.push(check("occurrence counts", (|| {
        for (w, n, s, e) in &f.counts {
            let w: BinaryWord = w.parse()?;
            let got = (count_subword(&w, *n).to_string(), count_factor(&w, *n)?);
            if let Err(why) = expect(got, (s.to_string(), *e)) {
                return Ok(Err(format!("{w} at {n}: {why}")));
            }
        }
        Ok(Ok(()))
    })()));
    out.push(check("orbit of 011", (|| {
        let r = rep_011()?;
        let els: Vec<String> = r.orbit().elements().map(|e| e.to_string()).collect();
        Ok(expect(els, f.orbit_011.clone()))
    })()));
    out.push(check("matrix of 011", (|| Ok(expect(rep_011()?.dense_m(), f.m_011.clone())))()));
    out.push(check("constant vector of 011", (|| {
        Ok(expect(rep_011()?.constant_c().0, f.c_011.clone()))
    })()));
    out.push(check("eigenvalue moduli of 011", (|| {
        let got = eigenvalue_moduli(&to_dense_f64(&rep_011()?.dense_m()));
        if got.len() != f.moduli_011.len()
            || got.iter().zip(&f.moduli_011).any(|(a, b)| (a - b).abs() > f.moduli_tol)
        {
            return Ok(Err(format!("got {got:?}, expected {:?}", f.moduli_011)));
        }
        Ok(Ok(()))
    })()));
    out.push(check("partial sums of 01", (|| {
        let w: BinaryWord = "01".parse()?;
        let r = LinearRepresentation::new(orbit(&w, &"01".parse()?)?);
        let (s3, (alpha, beta)) = f.sums_01;
        if let Err(why) = expect(r.partial_sum_fast(3)?.head(), s3) {
            return Ok(Err(format!("S_3: {why}")));
        }
        for n in 0..=f.sums_01_range {
            let lhs = r.partial_sum_fast(4 * n + 3)?.head();
            let rhs = alpha + beta * r.partial_sum_fast(n)?.head();
            if lhs != rhs {
                return Ok(Err(format!("S_(4N+3) identity fails at N = {n}: {lhs} vs {rhs}")));
            }
        }
        Ok(Ok(()))
    })()));
    out.push(check("single-run cycle lengths", (|| {
        for &(l, want) in &f.single_run_cycles {
            let got = cycle_length(&BinaryWord::ones(l)?, 1, &BinaryWord::last_unit(l)?)?;
            if got != want {
                return Ok(Err(format!("l = {l}: got {got}, expected {want}")));
            }
        }
        Ok(Ok(()))
    })()));
    out.push(check("one-run table", (|| {
        for &(l, want) in &f.one_run_table {
            let got = check_one_run_with(1, l, 8..=12)?.is_proved_p();
            if got != want {
                return Ok(Err(format!("l = {l}: got {got}, expected {want}")));
            }
        }
        Ok(Ok(()))
    })()));
    out
}
