//! Signed-permutation matrices over an orbit and exact partial sums.
//!
//! Rows and columns are indexed by orbit positions. `M_a` has its nonzero in
//! row `u'` at column `S_a(w)(u')` with value `(-1)^{T_a(w)(u')}`, and
//! `M = M_0 + M_1`. The state vector `v(n)` has entry `(-1)^{[w;u'](n)}` at
//! `u'`; `V(N)` is the sum of `v(0) … v(N)`. For `n ≥ 1`
//!
//! ```text
//! v(2n+i)  = M_i v(n)
//! V(2N+1)  = M V(N) + c,     c = (I - M) v(0) + v(1)
//! ```
//!
//! and the even endpoints follow from `V(2K) = V(2K+1) - v(2K+1)`.
//! All arithmetic is on `i64` and checked.

use std::fmt;
use std::fmt::Write as _;

use crate::counting::PrefixParity;
use crate::dynamics::OrbitTable;
use crate::error::{Error, Result};

/// Default cap on `N` for [`partial_sum_direct`].
pub const DEFAULT_DIRECT_SUM_LIMIT: u64 = 1 << 26;

/// A matrix with exactly one `±1` per row and column, stored as the column of
/// each row's nonzero plus its sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<u32>,
    negative: Vec<bool>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<u32>, negative: Vec<bool>) -> Result<Self> {
        if perm.len() != negative.len() {
            return Err(Error::Arity("permutation and sign vector lengths differ".into()));
        }
        let mut hit = vec![false; perm.len()];
        for &p in &perm {
            let p = p as usize;
            if p >= perm.len() || hit[p] {
                return Err(Error::Domain("not a permutation".into()));
            }
            hit[p] = true;
        }
        Ok(Self { perm, negative })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            perm: (0..size as u32).collect(),
            negative: vec![false; size],
        }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    /// Column of the nonzero entry in each row.
    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn sign(&self, row: usize) -> i64 {
        if self.negative[row] {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self, row: usize) -> bool {
        self.negative[row]
    }

    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.check_dim(x.len())?;
        self.perm
            .iter()
            .zip(&self.negative)
            .map(|(&p, &neg)| {
                let v = x[p as usize];
                if neg {
                    v.checked_neg().ok_or_else(|| overflow("negation"))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        self.perm
            .iter()
            .zip(&self.negative)
            .map(|(&p, &neg)| if neg { -x[p as usize] } else { x[p as usize] })
            .collect()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.size() {
            return Err(Error::Arity(format!(
                "vector of length {n} for a {}x{} matrix",
                self.size(),
                self.size()
            )));
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.size();
        let mut out = vec![vec![0i64; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            row[self.perm[i] as usize] = self.sign(i);
        }
        out
    }

    /// Cycles of the underlying permutation, ordered by smallest element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 0..self.size() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i as u32);
                i = self.perm[i] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("i64 overflow in {what}"))
}

/// An integer vector in orbit order: a state vector `v(n)`, a partial sum
/// `V(N)` or the constant `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumVector(pub Vec<i64>);

impl SumVector {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry at the orbit base, i.e. the scalar partial sum for that base word.
    pub fn head(&self) -> i64 {
        self.0[0]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
    }
}

impl fmt::Display for SumVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

fn add_into(acc: &mut [i64], x: &[i64]) -> Result<()> {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = a.checked_add(b).ok_or_else(|| overflow("addition"))?;
    }
    Ok(())
}

fn sub_into(acc: &mut [i64], x: &[i64]) -> Result<()> {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = a.checked_sub(b).ok_or_else(|| overflow("subtraction"))?;
    }
    Ok(())
}

/// `M_0` and `M_1` of an orbit.
pub fn build_matrices(orbit: &OrbitTable) -> (SignedPermutation, SignedPermutation) {
    let make = |a: u8| SignedPermutation {
        perm: orbit.succ(a).to_vec(),
        negative: orbit.signs(a).iter().map(|&t| t == 1).collect(),
    };
    (make(0), make(1))
}

/// The linear representation of one `(w, u)`.
#[derive(Debug, Clone)]
pub struct LinearRepresentation {
    orbit: OrbitTable,
    m: [SignedPermutation; 2],
    parity: PrefixParity,
    c: Vec<i64>,
}

impl LinearRepresentation {
    pub fn new(orbit: OrbitTable) -> Self {
        let (m0, m1) = build_matrices(&orbit);
        let parity = PrefixParity::new(orbit.word());
        let mut rep = Self {
            orbit,
            m: [m0, m1],
            parity,
            c: Vec::new(),
        };
        let v0 = rep.state_vector(0).0;
        let v1 = rep.state_vector(1).0;
        let mv0 = rep.apply_m(&v0).expect("entries are ±1");
        rep.c = (0..v0.len()).map(|i| v0[i] - mv0[i] + v1[i]).collect();
        rep
    }

    pub fn orbit(&self) -> &OrbitTable {
        &self.orbit
    }

    pub fn size(&self) -> usize {
        self.orbit.len()
    }

    pub fn matrix(&self, a: u8) -> &SignedPermutation {
        &self.m[a as usize]
    }

    /// `M x = M_0 x + M_1 x`.
    pub fn apply_m(&self, x: &[i64]) -> Result<Vec<i64>> {
        let mut y = self.m[0].apply(x)?;
        add_into(&mut y, &self.m[1].apply(x)?)?;
        Ok(y)
    }

    /// Dense `M`, row-major.
    pub fn dense_m(&self) -> Vec<Vec<i64>> {
        let mut d = self.m[0].to_dense();
        for (i, row) in self.m[1].to_dense().into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                d[i][j] += x;
            }
        }
        d
    }

    /// `v(n)`: entry `(-1)^{[w;u'](n)}` for each orbit element `u'`.
    pub fn state_vector(&self, n: u64) -> SumVector {
        let p = self.parity.at(n);
        SumVector(
            self.orbit
                .element_bits()
                .iter()
                .map(|&e| if (p & e).count_ones() & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn constant_c(&self) -> SumVector {
        SumVector(self.c.clone())
    }

    /// `V(N)` by summing `v(0) … v(N)`.
    pub fn partial_sum_direct(&self, n: u64, limit: u64) -> Result<SumVector> {
        if n > limit {
            return Err(Error::Capacity(format!(
                "direct summation to {n} exceeds the limit {limit}"
            )));
        }
        let mut acc = vec![0i64; self.size()];
        for k in 0..=n {
            add_into(&mut acc, &self.state_vector(k).0)?;
        }
        Ok(SumVector(acc))
    }

    /// `V(N)` in `O(|orbit| log N)` steps.
    pub fn partial_sum_fast(&self, n: u64) -> Result<SumVector> {
        Ok(SumVector(self.fast(n)?.0))
    }

    /// Returns `(V(n), v(n))`.
    fn fast(&self, n: u64) -> Result<(Vec<i64>, Vec<i64>)> {
        if n <= 2 {
            let sum = self.partial_sum_direct(n, 2)?.0;
            return Ok((sum, self.state_vector(n).0));
        }
        let k = n >> 1;
        let (sum_k, v_k) = self.fast(k)?;
        let mut sum = self.apply_m(&sum_k)?;
        add_into(&mut sum, &self.c)?;
        if n & 1 == 0 {
            // V(2k) = V(2k+1) - v(2k+1) = M V(k) + c - M_1 v(k)
            sub_into(&mut sum, &self.m[1].apply(&v_k)?)?;
        }
        let v = self.m[(n & 1) as usize].apply(&v_k)?;
        Ok((sum, v))
    }
}

pub fn state_vector(orbit: &OrbitTable, n: u64) -> SumVector {
    LinearRepresentation::new(orbit.clone()).state_vector(n)
}

pub fn constant_c(orbit: &OrbitTable) -> SumVector {
    LinearRepresentation::new(orbit.clone()).constant_c()
}

pub fn partial_sum_direct(orbit: &OrbitTable, n: u64, limit: u64) -> Result<SumVector> {
    LinearRepresentation::new(orbit.clone()).partial_sum_direct(n, limit)
}

pub fn partial_sum_fast(orbit: &OrbitTable, n: u64) -> Result<SumVector> {
    LinearRepresentation::new(orbit.clone()).partial_sum_fast(n)
}

/// Right-aligned integer grid, one row per line.
pub fn format_grid(rows: &[Vec<i64>]) -> String {
    let width = rows
        .iter()
        .flatten()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_subword;
    use crate::dynamics::orbit;
    use crate::word::{w, BinaryWord};

    fn rep(s: &str) -> LinearRepresentation {
        let wd = w(s);
        LinearRepresentation::new(orbit(&wd, &BinaryWord::last_unit(wd.len()).unwrap()).unwrap())
    }

    #[test]
    fn matrix_of_011() {
        let r = rep("011");
        assert_eq!(
            r.dense_m(),
            vec![
                vec![1, 1, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, -1, 1],
                vec![1, 0, 0, -1]
            ]
        );
        assert_eq!(r.constant_c(), SumVector(vec![0, 2, 0, -2]));
    }

    #[test]
    fn state_vector_of_011_matches_counts() {
        let r = rep("011");
        let sign = |k: u32| if k % 2 == 0 { 1 } else { -1 };
        let s = |p: &str, n: u64| -> u32 { (count_subword(&w(p), n) % 2u32).try_into().unwrap() };
        for n in 0..=1000u64 {
            let expect = vec![
                sign(s("011", n)),
                sign(s("01", n) + s("011", n)),
                sign(s("0", n) + s("011", n)),
                sign(s("0", n) + s("01", n) + s("011", n)),
            ];
            assert_eq!(r.state_vector(n).0, expect, "n = {n}");
        }
    }

    #[test]
    fn small_partial_sums_of_01() {
        let r = rep("01");
        // (-1)^{s_01(n)} for n = 0..3 is 1, 1, 1, 1
        assert_eq!(r.partial_sum_direct(3, 100).unwrap().head(), 4);
        assert_eq!(r.partial_sum_direct(0, 100).unwrap(), r.state_vector(0));
        let v1 = r.partial_sum_fast(1).unwrap();
        let mut expect = r.state_vector(0).0;
        add_into(&mut expect, &r.state_vector(1).0).unwrap();
        assert_eq!(v1.0, expect);
        assert!(matches!(r.partial_sum_direct(101, 100), Err(Error::Capacity(_))));
    }

    #[test]
    fn quarter_recurrence_for_01() {
        let r = rep("01");
        for n in 0..=1000u64 {
            let big = r.partial_sum_fast(4 * n + 3).unwrap().head();
            let small = r.partial_sum_fast(n).unwrap().head();
            assert_eq!(big, 2 + 2 * small, "N = {n}");
        }
    }

    #[test]
    fn fast_matches_direct() {
        for s in ["01", "011", "111", "0110"] {
            let r = rep(s);
            let mut acc = vec![0i64; r.size()];
            for n in 0..=20_000u64 {
                add_into(&mut acc, &r.state_vector(n).0).unwrap();
                assert_eq!(r.partial_sum_fast(n).unwrap().0, acc, "w = {s}, N = {n}");
            }
        }
    }

    #[test]
    fn signed_permutation_checks() {
        assert!(SignedPermutation::new(vec![0, 0], vec![false, false]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![false]).is_err());
        let p = SignedPermutation::new(vec![1, 2, 0], vec![true, false, false]).unwrap();
        assert_eq!(p.apply(&[1, 2, 3]).unwrap(), vec![-2, 3, 1]);
        assert!(p.apply(&[i64::MIN, 0, 0]).is_ok());
        assert!(matches!(p.apply(&[0, i64::MIN, 0]), Err(Error::Overflow(_))));
        assert_eq!(p.cycles(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn grid_format() {
        let g = format_grid(&[vec![1, -1], vec![0, 2]]);
        assert_eq!(g, " 1 -1\n 0  2\n");
    }
}
