//! Occurrence counters over ordinary binary expansions.
//!
//! `s_w(n)` counts scattered occurrences of `w` in the binary expansion of
//! `n`, `e_w(n)` counts consecutive ones. The expansion of 0 is the single
//! letter `0`, which yields `s_0(0) = 1` and `s_w(0) = 0` for every other
//! nonempty `w`. The empty word occurs exactly once in every expansion.
//!
//! The bracket `[w; u](n)` is the parity of the sum of `s_{w_1…w_i}(n)` over
//! the positions `i` with `u_i = 1`: `u` selects prefixes of `w`, not of
//! itself. For example `[1011; 0101](n) = s_10(n) + s_1011(n) mod 2`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::word::{mask, BinaryWord};

pub type OccurrenceCount = BigUint;

fn expansion_letters(n: u64) -> impl Iterator<Item = u8> {
    let len = if n == 0 { 1 } else { 64 - n.leading_zeros() };
    (0..len).rev().map(move |k| ((n >> k) & 1) as u8)
}

/// Number of scattered occurrences of `w` in the binary expansion of `n`.
pub fn count_subword(w: &BinaryWord, n: u64) -> OccurrenceCount {
    BigUint::from(count_subword_u64(w, n))
}

/// [`count_subword`] in machine integers: an expansion has at most 64
/// letters, so every count is at most `C(64, 32) < 2^64`.
pub fn count_subword_u64(w: &BinaryWord, n: u64) -> u64 {
    let l = w.len();
    if l == 0 {
        return 1;
    }
    let letters: Vec<u8> = w.letters().collect();
    // ways[i] = number of embeddings of w_1…w_i seen so far
    let mut ways = vec![0u64; l + 1];
    ways[0] = 1;
    for c in expansion_letters(n) {
        for i in (1..=l).rev() {
            if letters[i - 1] == c {
                ways[i] += ways[i - 1];
            }
        }
    }
    ways[l]
}

/// Number of consecutive occurrences of `w` in the binary expansion of `n`.
pub fn count_factor(w: &BinaryWord, n: u64) -> Result<u32> {
    if w.is_empty() {
        return Err(Error::Arity("factor count of the empty word".into()));
    }
    let expansion = BinaryWord::binary_expansion(n);
    if w.len() > expansion.len() {
        return Ok(0);
    }
    let m = mask(w.len());
    let hits = (0..=expansion.len() - w.len())
        .filter(|&shift| (expansion.bits() >> shift) & m == w.bits())
        .count();
    Ok(hits as u32)
}

/// Parities of `s_{w_1…w_i}(n)` for every prefix of a fixed `w`, packed so
/// that the prefix of length `i` sits at bit `|w| - i`. With this layout the
/// bracket `[w; u](n)` is the parity of `popcount(parities & u)`.
#[derive(Debug, Clone, Copy)]
pub struct PrefixParity {
    len: usize,
    on_zero: u64,
    on_one: u64,
}

impl PrefixParity {
    pub fn new(w: &BinaryWord) -> Self {
        Self {
            len: w.len(),
            on_zero: w.complement().bits(),
            on_one: w.bits(),
        }
    }

    /// Packed prefix parities at `n`; bit `|w|` carries the empty prefix and is always set.
    #[inline]
    pub fn at(&self, n: u64) -> u64 {
        let mut p = 1u64 << self.len;
        for c in expansion_letters(n) {
            let m = if c == 1 { self.on_one } else { self.on_zero };
            p ^= (p >> 1) & m;
        }
        p
    }

    #[inline]
    pub fn bracket(&self, u: &BinaryWord, n: u64) -> u8 {
        debug_assert_eq!(u.len(), self.len);
        ((self.at(n) & u.bits()).count_ones() & 1) as u8
    }
}

/// `s_w(n) mod 2`, computed with bit operations only.
pub fn subword_parity(w: &BinaryWord, n: u64) -> u8 {
    (PrefixParity::new(w).at(n) & 1) as u8
}

/// The bracket `[w; u](n)`.
pub fn bracket_eval(w: &BinaryWord, u: &BinaryWord, n: u64) -> Result<u8> {
    if w.len() != u.len() {
        return Err(Error::Arity(format!(
            "bracket needs |w| = |u|, got {} and {}",
            w.len(),
            u.len()
        )));
    }
    if w.is_empty() {
        return Err(Error::Arity("bracket of empty words".into()));
    }
    Ok(PrefixParity::new(w).bracket(u, n))
}

/// Checks the doubling identities for `s_{w0}` and `s_{w1}` on `1 ..= n_max`.
pub fn check_doubling_recurrences(w: &BinaryWord, n_max: u64) -> Result<bool> {
    if n_max > (u64::MAX - 1) / 2 {
        return Err(Error::Domain(format!("n_max = {n_max} overflows 2n + 1")));
    }
    let w0 = w.concat(&BinaryWord::zeros(1)?)?;
    let w1 = w.concat(&BinaryWord::ones(1)?)?;
    for n in 1..=n_max {
        let sw = count_subword_u64(w, n);
        let sw0 = count_subword_u64(&w0, n);
        let sw1 = count_subword_u64(&w1, n);
        let ok = count_subword_u64(&w0, 2 * n) == sw0 + sw
            && count_subword_u64(&w0, 2 * n + 1) == sw0
            && count_subword_u64(&w1, 2 * n) == sw1
            && count_subword_u64(&w1, 2 * n + 1) == sw1 + sw;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
