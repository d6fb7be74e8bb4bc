//! Eigenvalues of modulus 2 and spectral radius estimates for `M = M_0 + M_1`.
//!
//! Since `M_0` and `M_1` are isometries, every eigenvalue of `M` has modulus
//! at most 2, and modulus exactly 2 happens iff `M_0` and `M_1` share an
//! eigenvector `v` with a common eigenvalue `μ`, `|μ| = 1`; such a `v` has no
//! zero entry. Along an edge `x → S_a(x)` the eigen-equation reads
//! `v(S_a x) = μ (-1)^{T_a(x)} v(x)`, and walking an `S_a` cycle of length `L`
//! forces `μ^L = ±1`. All cycle lengths are powers of 2, so `μ = ω^q` for
//! `ω = exp(2πi/N)` with `N` twice the longest cycle, and every entry of `v`
//! is a power of `ω`. [`detect_modulus_two`] propagates these exponents over a
//! spanning tree and solves the congruences `c·q ≡ b (mod N)` left by the
//! remaining edges.
//!
//! [`eigenvalue_two_by_determinant`] is an independent exact check of
//! `λ = 2` through `det(2I - M)` with fraction-free elimination.

use std::collections::VecDeque;
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linrep::{LinearRepresentation, SignedPermutation};

/// Default orbit-size cap for dense work (determinants, Gelfand squaring).
pub const DEFAULT_DENSE_LIMIT: usize = 512;
/// Squaring cap for [`spectral_radius_estimate`].
pub const MAX_SQUARINGS: u32 = 60;

/// Outcome of the exact modulus-2 decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusTwo {
    pub present: bool,
    /// `N`: eigenvalues of modulus 2 have the form `2·exp(2πiq/N)`.
    pub order: u64,
    /// Every admissible `q` in `0..N`, ascending.
    pub phases: Vec<u64>,
    /// For the smallest admissible `q`, the exponent `φ` of each entry of
    /// the common eigenvector `v = (ω^φ)`, in orbit order.
    #[serde(skip)]
    pub witness: Option<Vec<u64>>,
}

impl ModulusTwo {
    /// Whether `λ = 2` itself is an eigenvalue.
    pub fn has_eigenvalue_two(&self) -> bool {
        self.phases.first() == Some(&0)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of an odd `x` modulo a power of two `m`.
fn inverse_mod_pow2(x: u64, m: u64) -> u64 {
    debug_assert!(x & 1 == 1 && m.is_power_of_two());
    // Newton iteration doubles the number of correct low bits each round
    let mut inv: u64 = 1;
    for _ in 0..7 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(inv)));
    }
    inv & (m - 1)
}

/// Solution set `q ≡ residue (mod modulus)` of congruences modulo a power of two.
#[derive(Debug, Clone, Copy)]
struct Coset {
    residue: u64,
    modulus: u64,
}

impl Coset {
    /// Intersects with the solutions of `c·q ≡ b (mod n)`; `None` if empty.
    fn restrict(self, c: u64, b: u64, n: u64) -> Option<Coset> {
        let c = c % n;
        let b = b % n;
        let g = gcd(c, n);
        if b % g != 0 {
            return None;
        }
        let m = n / g;
        let q0 = if m == 1 {
            0
        } else {
            ((b / g) % m).wrapping_mul(inverse_mod_pow2((c / g) % m, m)) % m
        };
        let (lo, hi) = if m < self.modulus {
            (m, self.modulus)
        } else {
            (self.modulus, m)
        };
        if q0 % lo != self.residue % lo {
            return None;
        }
        let residue = if m >= self.modulus { q0 } else { self.residue };
        Some(Coset {
            residue,
            modulus: hi,
        })
    }
}

fn longest_cycle(m: &SignedPermutation) -> usize {
    m.cycles().iter().map(Vec::len).max().unwrap_or(1)
}

/// Exact decision of whether `M_0 + M_1` has an eigenvalue of modulus 2.
///
/// Both matrices must act on the same orbit, reachable from position 0.
pub fn detect_modulus_two(m0: &SignedPermutation, m1: &SignedPermutation) -> Result<ModulusTwo> {
    let size = m0.size();
    if m1.size() != size || size == 0 {
        return Err(Error::Arity("matrices of different or zero size".into()));
    }
    let longest = longest_cycle(m0).max(longest_cycle(m1));
    if !longest.is_power_of_two() {
        return Err(Error::Invariant(format!(
            "cycle length {longest} is not a power of two"
        )));
    }
    let n = 2 * longest as u64;
    let half = n / 2;
    let mats = [m0, m1];

    // spanning tree: depth and sign parity of the tree path from position 0
    let mut depth = vec![u64::MAX; size];
    let mut parity = vec![0u8; size];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for m in mats {
            let j = m.perm()[i] as usize;
            if depth[j] == u64::MAX {
                depth[j] = (depth[i] + 1) % n;
                parity[j] = parity[i] ^ m.is_negative(i) as u8;
                queue.push_back(j);
            }
        }
    }
    if depth.contains(&u64::MAX) {
        return Err(Error::Invariant("constraint graph is disconnected".into()));
    }

    let mut coset = Some(Coset {
        residue: 0,
        modulus: 1,
    });
    'edges: for i in 0..size {
        for m in mats {
            let j = m.perm()[i] as usize;
            let c = (depth[i] + 1 + n - depth[j]) % n;
            let b = (parity[i] ^ parity[j] ^ m.is_negative(i) as u8) as u64 * half;
            coset = coset.and_then(|s| s.restrict(c, b, n));
            if coset.is_none() {
                break 'edges;
            }
        }
    }

    let Some(coset) = coset else {
        return Ok(ModulusTwo {
            present: false,
            order: n,
            phases: Vec::new(),
            witness: None,
        });
    };
    let phases: Vec<u64> = (0..n / coset.modulus)
        .map(|k| coset.residue % coset.modulus + k * coset.modulus)
        .collect();
    let q = phases[0];
    let witness: Vec<u64> = (0..size)
        .map(|i| (depth[i] * q + parity[i] as u64 * half) % n)
        .collect();
    verify_witness(m0, m1, n, q, &witness)?;
    Ok(ModulusTwo {
        present: true,
        order: n,
        phases,
        witness: Some(witness),
    })
}

/// Checks `φ(S_a x) ≡ φ(x) + q + T_a(x)·N/2 (mod N)` on every edge.
fn verify_witness(
    m0: &SignedPermutation,
    m1: &SignedPermutation,
    n: u64,
    q: u64,
    phi: &[u64],
) -> Result<()> {
    for m in [m0, m1] {
        for (i, &p) in phi.iter().enumerate() {
            let j = m.perm()[i] as usize;
            let expect = (p + q + m.is_negative(i) as u64 * (n / 2)) % n;
            if phi[j] != expect {
                return Err(Error::Invariant(format!(
                    "phase witness fails on edge {i} -> {j}"
                )));
            }
        }
    }
    Ok(())
}

fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return Some(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let lead = a[i][k];
            for j in k + 1..n {
                let x = a[i][j].checked_mul(pivot)?;
                let y = lead.checked_mul(a[k][j])?;
                a[i][j] = x.checked_sub(y)? / prev;
            }
        }
        prev = pivot;
    }
    Some(sign * a[n - 1][n - 1])
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            let lead = a[i][k].clone();
            for j in k + 1..n {
                let x = &a[i][j] * &pivot - &lead * &a[k][j];
                a[i][j] = x / &prev;
            }
        }
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Modular arithmetic for a prime below `2^50`, with the quotient of each
/// product estimated in floating point.
#[derive(Clone, Copy)]
struct Modulus {
    p: u64,
    inv: f64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        Self { p, inv: 1.0 / p as f64 }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        let q = (a as f64 * b as f64 * self.inv) as u64;
        let mut r = a.wrapping_mul(b).wrapping_sub(q.wrapping_mul(self.p)) as i64;
        let p = self.p as i64;
        while r < 0 {
            r += p;
        }
        while r >= p {
            r -= p;
        }
        r as u64
    }
}

const PRIME_BITS: u32 = 50;

/// The first `count` primes below `2^50`, descending; cached across calls.
fn large_primes(count: usize) -> Vec<u64> {
    static CACHE: Mutex<Vec<u64>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    let mut next = cache.last().map_or(1u64 << PRIME_BITS, |&p| p) - 1;
    while cache.len() < count {
        if next & 1 == 1 && is_prime(next) {
            cache.push(next);
        }
        next -= 1;
    }
    cache[..count].to_vec()
}

fn det_mod(rows: &[Vec<i64>], p: u64) -> u64 {
    let n = rows.len();
    let m = Modulus::new(p);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(k, piv);
            det = p - det;
        }
        det = m.mul(det, a[k][k]);
        let inv = pow_mod(a[k][k], p - 2, p);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let support: Vec<usize> = (k + 1..n).filter(|&j| pivot_row[j] != 0).collect();
        for row in bottom.iter_mut() {
            // rows of a sparse matrix mostly skip here
            if row[k] == 0 {
                continue;
            }
            let f = p - m.mul(row[k], inv);
            for &j in &support {
                let x = row[j] + m.mul(f, pivot_row[j]);
                row[j] = if x >= p { x - p } else { x };
            }
            row[k] = 0;
        }
    }
    det
}

/// `log2` of the Hadamard bound on `|det|`.
fn hadamard_bits(rows: &[Vec<i64>]) -> f64 {
    rows.iter()
        .map(|r| {
            let sq: f64 = r.iter().map(|&x| (x as f64) * (x as f64)).sum();
            if sq == 0.0 {
                0.0
            } else {
                0.5 * sq.log2()
            }
        })
        .sum()
}

/// Determinant from residues modulo enough primes to exceed twice the
/// Hadamard bound, recombined incrementally.
fn determinant_modular(rows: &[Vec<i64>]) -> BigInt {
    let need = hadamard_bits(rows) + 2.0;
    let mut value = BigInt::zero();
    let mut modulus = BigInt::from(1);
    let mut bits = 0.0f64;
    let count = (need / (PRIME_BITS - 1) as f64).ceil() as usize + 1;
    for p in large_primes(count) {
        let r = det_mod(rows, p);
        let big_p = BigInt::from(p);
        let cur = (&value % &big_p).to_u64().expect("residue fits");
        let m_mod_p = (&modulus % &big_p).to_u64().expect("residue fits");
        let t = mul_mod((r + p - cur) % p, pow_mod(m_mod_p, p - 2, p), p);
        value += &modulus * BigInt::from(t);
        modulus *= big_p;
        bits += (p as f64).log2();
        if bits > need {
            break;
        }
    }
    if &value * 2 > modulus {
        value - modulus
    } else {
        value
    }
}

/// Size up to which fraction-free elimination is used.
const BAREISS_MAX: usize = 48;

/// Exact determinant of a square integer matrix.
///
/// Fraction-free elimination for small matrices, multi-modular elimination
/// with Chinese remaindering above that.
pub fn determinant(rows: &[Vec<i64>]) -> Result<BigInt> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Arity("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(BigInt::from(1));
    }
    if n > BAREISS_MAX {
        return Ok(determinant_modular(rows));
    }
    Ok(determinant_bareiss(rows))
}

fn determinant_bareiss(rows: &[Vec<i64>]) -> BigInt {
    let small: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(d) = bareiss_i128(small) {
        return BigInt::from(d);
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_big(big)
}

/// `det(2I - M)` and whether it vanishes.
pub fn eigenvalue_two_by_determinant(m: &[Vec<i64>], dense_limit: usize) -> Result<(BigInt, bool)> {
    if m.len() > dense_limit {
        return Err(Error::Capacity(format!(
            "dense determinant of size {} exceeds the limit {dense_limit}",
            m.len()
        )));
    }
    let shifted: Vec<Vec<i64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &x)| if i == j { 2 - x } else { -x })
                .collect()
        })
        .collect();
    let det = determinant(&shifted)?;
    let vanishes = det.is_zero();
    Ok((det, vanishes))
}

/// Number of `-1` entries along one cycle of a signed permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSign {
    /// Smallest index on the cycle.
    pub representative: u32,
    pub length: usize,
    pub negatives: usize,
}

impl CycleSign {
    pub fn is_even(&self) -> bool {
        self.negatives % 2 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignCycleReport {
    pub cycles: Vec<CycleSign>,
    /// True iff every cycle has an even number of `-1`s, i.e. some
    /// eigenvector for eigenvalue 1 has no zero entry.
    pub eigenvalue_one_full_support: bool,
}

impl SignCycleReport {
    pub fn odd_cycles(&self) -> impl Iterator<Item = &CycleSign> {
        self.cycles.iter().filter(|c| !c.is_even())
    }
}

pub fn sign_cycle_eigenvalue_one(m: &SignedPermutation) -> SignCycleReport {
    let cycles: Vec<CycleSign> = m
        .cycles()
        .into_iter()
        .map(|c| CycleSign {
            representative: c[0],
            length: c.len(),
            negatives: c.iter().filter(|&&i| m.is_negative(i as usize)).count(),
        })
        .collect();
    let all_even = cycles.iter().all(CycleSign::is_even);
    SignCycleReport {
        cycles,
        eigenvalue_one_full_support: all_even,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusEstimate {
    pub estimate: f64,
    /// Change between the last two iterates.
    pub tol: f64,
    pub converged: bool,
}

pub fn to_dense_f64(rows: &[Vec<i64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j] as f64)
}

/// Spectral radius from `‖M^(2^k)‖^(1/2^k)` with renormalization at every
/// squaring.
pub fn spectral_radius_estimate(m: &DMatrix<f64>, tol: f64) -> RadiusEstimate {
    let mut a = m.clone();
    let mut log_scale = 0.0f64;
    let mut prev: Option<f64> = None;
    let mut pending_stop = false;
    let mut last = RadiusEstimate {
        estimate: 0.0,
        tol: f64::INFINITY,
        converged: false,
    };
    for k in 0..=MAX_SQUARINGS {
        let norm = a.norm();
        if norm == 0.0 || !norm.is_finite() {
            // nilpotent: every eigenvalue is 0
            return RadiusEstimate {
                estimate: 0.0,
                tol: 0.0,
                converged: norm == 0.0,
            };
        }
        let power = 2f64.powi(k as i32);
        let estimate = ((norm.ln() + log_scale) / power).exp();
        let change = prev.map_or(f64::INFINITY, |p: f64| (estimate - p).abs());
        last = RadiusEstimate {
            estimate,
            tol: change,
            converged: change < tol,
        };
        if pending_stop {
            break;
        }
        // one extra squaring after the first small change
        pending_stop = k >= 2 && change < tol;
        prev = Some(estimate);
        a /= norm;
        log_scale = 2.0 * (log_scale + norm.ln());
        a = &a * &a;
    }
    last
}

/// Spectral radius from the growth of `‖M^t x‖` for a fixed start vector,
/// for orbits beyond the dense limit.
pub fn spectral_radius_sparse(rep: &LinearRepresentation, tol: f64, step_budget: u64) -> RadiusEstimate {
    let size = rep.size();
    // deterministic, generic start vector
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut x: Vec<f64> = (0..size)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            1.0 + (state % 1024) as f64 / 1024.0
        })
        .collect();
    let mut logs: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    let mut last = RadiusEstimate {
        estimate: 0.0,
        tol: f64::INFINITY,
        converged: false,
    };
    let mut window = 8u64;
    let mut steps = 0u64;
    while steps < step_budget {
        let mut y = rep.matrix(0).apply_f64(&x);
        for (yi, zi) in y.iter_mut().zip(rep.matrix(1).apply_f64(&x)) {
            *yi += zi;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return RadiusEstimate {
                estimate: 0.0,
                tol: 0.0,
                converged: true,
            };
        }
        logs.push(norm.ln());
        x = y.into_iter().map(|v| v / norm).collect();
        steps += 1;
        if steps == 2 * window {
            // growth rate over the second half of the run
            let tail = &logs[window as usize..];
            let estimate = (tail.iter().sum::<f64>() / tail.len() as f64).exp();
            let change = prev.map_or(f64::INFINITY, |p: f64| (estimate - p).abs());
            last = RadiusEstimate {
                estimate,
                tol: change,
                converged: change < tol,
            };
            if last.converged {
                break;
            }
            prev = Some(estimate);
            window *= 2;
        }
    }
    last
}

/// Moduli of all eigenvalues, ascending, from a dense Schur decomposition.
pub fn eigenvalue_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Exact and numerical spectral data of one representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralVerdict {
    pub modulus_two: ModulusTwo,
    pub radius: RadiusEstimate,
}

impl SpectralVerdict {
    pub fn has_modulus_two(&self) -> bool {
        self.modulus_two.present
    }
}

pub fn spectral_verdict(rep: &LinearRepresentation, dense_limit: usize, tol: f64) -> Result<SpectralVerdict> {
    let modulus_two = detect_modulus_two(rep.matrix(0), rep.matrix(1))?;
    let radius = if rep.size() <= dense_limit {
        spectral_radius_estimate(&to_dense_f64(&rep.dense_m()), tol)
    } else {
        let budget = (1u64 << 28) / rep.size() as u64;
        spectral_radius_sparse(rep, tol, budget.max(1024))
    };
    Ok(SpectralVerdict { modulus_two, radius })
}

/// `log2` of the radius estimate. Without a modulus-2 eigenvalue the partial
/// sums are `O(N^(1-ε))` for every `ε < 1 - exponent`.
pub fn growth_exponent(verdict: &SpectralVerdict) -> f64 {
    verdict.radius.estimate.log2()
}

/// `|det|` as a decimal string, keeping the sign.
pub fn det_string(det: &BigInt) -> String {
    if det.is_negative() {
        format!("-{}", det.abs())
    } else {
        det.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit;
    use crate::word::{w, BinaryWord};

    fn rep(s: &str) -> LinearRepresentation {
        let wd = w(s);
        LinearRepresentation::new(orbit(&wd, &BinaryWord::last_unit(wd.len()).unwrap()).unwrap())
    }

    #[test]
    fn modulus_two_examples() {
        let d = |s: &str| {
            let r = rep(s);
            detect_modulus_two(r.matrix(0), r.matrix(1)).unwrap()
        };
        assert!(!d("011").present);
        let m = d("111");
        assert!(m.present);
        assert_eq!(m.phases, vec![0]);
        assert!(m.has_eigenvalue_two());
        assert!(!d("11").present);
    }

    #[test]
    fn determinant_examples() {
        let (det, zero) = eigenvalue_two_by_determinant(&rep("011").dense_m(), 100).unwrap();
        assert_eq!(det, BigInt::from(8));
        assert!(!zero);
        let (det, zero) = eigenvalue_two_by_determinant(&rep("111").dense_m(), 100).unwrap();
        assert!(det.is_zero() && zero);
        assert!(matches!(
            eigenvalue_two_by_determinant(&rep("011").dense_m(), 3),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]).unwrap(), BigInt::from(-1));
        assert_eq!(determinant(&[vec![2, 3], vec![4, 6]]).unwrap(), BigInt::from(0));
        assert_eq!(
            determinant(&[vec![0, 2, 1], vec![3, 0, 0], vec![1, 1, 5]]).unwrap(),
            BigInt::from(-27)
        );
    }

    #[test]
    fn modular_agrees_with_fraction_free() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1usize, 2, 5, 20, 60] {
            for _ in 0..5 {
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
                    .collect();
                assert_eq!(determinant_modular(&rows), determinant_bareiss(&rows), "n = {n}");
            }
        }
        let singular = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert!(determinant_modular(&singular).is_zero());
    }

    #[test]
    fn float_assisted_mulmod() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for p in large_primes(3).into_iter().chain([3, 1_000_000_007]) {
            let m = Modulus::new(p);
            for _ in 0..10_000 {
                let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
                assert_eq!(m.mul(a, b), mul_mod(a, b, p));
            }
        }
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn bareiss_overflow_falls_back_to_bigint() {
        // (10^12) I has determinant 10^(12n), far beyond i128 for n = 8
        let n = 8;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1_000_000_000_000 } else { 0 }).collect())
            .collect();
        assert_eq!(determinant(&rows).unwrap(), BigInt::from(10).pow(96));
        assert!(bareiss_i128(rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()).is_none());
    }

    #[test]
    fn large_determinant_is_exact() {
        // 3 on the diagonal, 1 elsewhere: det = (n + 2) 2^(n-1)
        let n = 120;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 3 } else { 1 }).collect())
            .collect();
        let expect = BigInt::from(n as u64 + 2) * (BigInt::from(1) << (n - 1));
        assert_eq!(determinant(&rows).unwrap(), expect);
    }

    #[test]
    fn sign_cycles() {
        let one_negative = SignedPermutation::new(vec![1, 2, 0], vec![true, false, false]).unwrap();
        assert!(!sign_cycle_eigenvalue_one(&one_negative).eigenvalue_one_full_support);
        assert!(sign_cycle_eigenvalue_one(&SignedPermutation::identity(5)).eigenvalue_one_full_support);
        // cycle of S_1(1111) through 0001 carries an odd number of -1s
        let r = rep("1111");
        let report = sign_cycle_eigenvalue_one(r.matrix(1));
        let through_base = report.cycles.iter().find(|c| c.representative == 0).unwrap();
        assert!(!through_base.is_even());
    }

    #[test]
    fn radius_examples() {
        let e = spectral_radius_estimate(&to_dense_f64(&rep("011").dense_m()), 1e-6);
        assert!((e.estimate - 2f64.sqrt()).abs() < 1e-4, "{e:?}");
        let e = spectral_radius_estimate(&to_dense_f64(&rep("111").dense_m()), 1e-6);
        assert!((e.estimate - 2.0).abs() < 1e-4, "{e:?}");
        let two_i = DMatrix::<f64>::identity(3, 3) * 2.0;
        assert!((spectral_radius_estimate(&two_i, 1e-9).estimate - 2.0).abs() < 1e-8);
        let nil = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(spectral_radius_estimate(&nil, 1e-9).estimate, 0.0);
    }

    #[test]
    fn sparse_radius_agrees_with_dense() {
        for s in ["011", "111", "0110", "1011"] {
            let r = rep(s);
            let dense = spectral_radius_estimate(&to_dense_f64(&r.dense_m()), 1e-6).estimate;
            let sparse = spectral_radius_sparse(&r, 1e-5, 1 << 20).estimate;
            assert!((dense - sparse).abs() < 1e-2, "{s}: {dense} vs {sparse}");
        }
    }

    #[test]
    fn spectrum_of_011() {
        let m = eigenvalue_moduli(&to_dense_f64(&rep("011").dense_m()));
        let expect = [0.0, 0.0, 2f64.sqrt(), 2f64.sqrt()];
        for (a, b) in m.iter().zip(expect) {
            assert!((a - b).abs() < 1e-6, "{m:?}");
        }
    }

    #[test]
    fn exponents() {
        let v = spectral_verdict(&rep("011"), 100, 1e-6).unwrap();
        assert!((growth_exponent(&v) - 0.5).abs() < 1e-4);
        let v = spectral_verdict(&rep("111"), 100, 1e-6).unwrap();
        assert!((growth_exponent(&v) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn congruence_solver() {
        let all = Coset { residue: 0, modulus: 1 };
        // 2q ≡ 4 (mod 8) → q ≡ 2 (mod 4)
        let s = all.restrict(2, 4, 8).unwrap();
        assert_eq!((s.residue, s.modulus), (2, 4));
        // then 3q ≡ 6 (mod 8) → q ≡ 2 (mod 8)
        let s = s.restrict(3, 6, 8).unwrap();
        assert_eq!((s.residue, s.modulus), (2, 8));
        assert!(s.restrict(1, 3, 8).is_none());
        assert!(all.restrict(2, 1, 8).is_none());
        assert!(all.restrict(0, 4, 8).is_none());
    }
}
