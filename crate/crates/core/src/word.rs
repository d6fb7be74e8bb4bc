//! Finite words over `{0,1}`.
//!
//! A [`BinaryWord`] packs up to [`MAX_LEN`] letters into a `u64`. The first
//! (leftmost) letter is the most significant of the `len` low bits, so the
//! integer value of a word equals its reading as a binary numeral. Positions
//! are 1-based: `letter(1)` is the first letter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest representable word.
pub const MAX_LEN: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord {
    // field order gives the (length, numeric value) ordering
    len: u8,
    bits: u64,
}

/// A maximal block of equal letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub letter: u8,
    pub len: usize,
}

#[inline]
pub(crate) fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_LEN {
        Err(Error::Capacity(format!("word length {len} exceeds {MAX_LEN}")))
    } else {
        Ok(())
    }
}

fn check_letter(a: u8) -> Result<()> {
    if a > 1 {
        Err(Error::Domain(format!("letter must be 0 or 1, got {a}")))
    } else {
        Ok(())
    }
}

impl BinaryWord {
    /// Builds a word from its numeric value; high bits beyond `len` must be clear.
    pub fn from_bits(bits: u64, len: usize) -> Result<Self> {
        check_len(len)?;
        if bits & !mask(len) != 0 {
            return Err(Error::Domain(format!("value {bits:#b} does not fit in {len} letters")));
        }
        Ok(Self { len: len as u8, bits })
    }

    #[inline]
    pub(crate) fn from_bits_unchecked(bits: u64, len: usize) -> Self {
        debug_assert!(len <= MAX_LEN && bits & !mask(len) == 0);
        Self { len: len as u8, bits }
    }

    pub fn empty() -> Self {
        Self { len: 0, bits: 0 }
    }

    /// `0^len`
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_bits(0, len)
    }

    /// `1^len`
    pub fn ones(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Self::from_bits_unchecked(mask(len), len))
    }

    /// `a^len`
    pub fn repeated(a: u8, len: usize) -> Result<Self> {
        check_letter(a)?;
        if a == 1 {
            Self::ones(len)
        } else {
            Self::zeros(len)
        }
    }

    /// `0^(pos-1) 1 0^(len-pos)`, the word with a single 1 at position `pos`.
    pub fn unit(len: usize, pos: usize) -> Result<Self> {
        check_len(len)?;
        if pos == 0 || pos > len {
            return Err(Error::Index(format!("position {pos} outside 1..={len}")));
        }
        Ok(Self::from_bits_unchecked(1u64 << (len - pos), len))
    }

    /// `0^(len-1) 1`, the base point used for the plain partial sums.
    pub fn last_unit(len: usize) -> Result<Self> {
        Self::unit(len, len)
    }

    pub fn from_letters(letters: &[u8]) -> Result<Self> {
        check_len(letters.len())?;
        let mut bits = 0u64;
        for &a in letters {
            check_letter(a)?;
            bits = (bits << 1) | a as u64;
        }
        Ok(Self::from_bits_unchecked(bits, letters.len()))
    }

    /// Ordinary binary expansion of `n`; the expansion of 0 is the single letter `0`.
    pub fn binary_expansion(n: u64) -> Self {
        let len = if n == 0 { 1 } else { 64 - n.leading_zeros() as usize };
        // n < 2^63 always holds for u64 values below 2^63; larger values need 64 letters
        assert!(len <= MAX_LEN, "binary expansion of {n} exceeds {MAX_LEN} letters");
        Self::from_bits_unchecked(n, len)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Letter at 1-based position `i`.
    pub fn letter(&self, i: usize) -> Result<u8> {
        if i == 0 || i > self.len() {
            return Err(Error::Index(format!("position {i} outside 1..={}", self.len)));
        }
        Ok(self.letter_unchecked(i))
    }

    #[inline]
    pub(crate) fn letter_unchecked(&self, i: usize) -> u8 {
        ((self.bits >> (self.len() - i)) & 1) as u8
    }

    pub fn first(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.letter_unchecked(1))
    }

    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then_some((self.bits & 1) as u8)
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.len()).map(move |i| self.letter_unchecked(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn concat(&self, other: &BinaryWord) -> Result<Self> {
        let len = self.len() + other.len();
        check_len(len)?;
        let hi = if other.len() == 64 { 0 } else { self.bits << other.len() };
        Ok(Self::from_bits_unchecked(hi | other.bits, len))
    }

    /// `k`-fold concatenation; `power(x, 0)` is the empty word.
    pub fn power(&self, k: usize) -> Result<Self> {
        let len = self
            .len()
            .checked_mul(k)
            .ok_or_else(|| Error::Capacity("power length overflow".into()))?;
        check_len(len)?;
        let mut out = Self::empty();
        for _ in 0..k {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    pub fn complement(&self) -> Self {
        Self::from_bits_unchecked(!self.bits & mask(self.len()), self.len())
    }

    fn same_len(&self, other: &BinaryWord, op: &str) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Arity(format!(
                "{op} needs equal lengths, got {} and {}",
                self.len, other.len
            )));
        }
        Ok(())
    }

    pub fn xor(&self, other: &BinaryWord) -> Result<Self> {
        self.same_len(other, "xor")?;
        Ok(Self::from_bits_unchecked(self.bits ^ other.bits, self.len()))
    }

    pub fn and(&self, other: &BinaryWord) -> Result<Self> {
        self.same_len(other, "and")?;
        Ok(Self::from_bits_unchecked(self.bits & other.bits, self.len()))
    }

    /// The factor `x_t … x_k` (1-based, inclusive).
    pub fn factor(&self, t: usize, k: usize) -> Result<Self> {
        if t == 0 || t > k || k > self.len() {
            return Err(Error::Index(format!(
                "factor [{t},{k}] invalid for length {}",
                self.len
            )));
        }
        let len = k - t + 1;
        Ok(Self::from_bits_unchecked((self.bits >> (self.len() - k)) & mask(len), len))
    }

    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 {
            return Ok(Self::empty());
        }
        self.factor(1, len)
    }

    pub fn suffix(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::Index(format!("suffix of length {len} from {}", self.len)));
        }
        Ok(Self::from_bits_unchecked(self.bits & mask(len), len))
    }

    pub fn has_prefix(&self, p: &BinaryWord) -> bool {
        p.len() <= self.len() && (self.bits >> (self.len() - p.len())) == p.bits
    }

    pub fn has_suffix(&self, s: &BinaryWord) -> bool {
        s.len() <= self.len() && (self.bits & mask(s.len())) == s.bits
    }

    /// True iff `f` occurs as a block of consecutive letters.
    pub fn contains_factor(&self, f: &BinaryWord) -> bool {
        if f.is_empty() {
            return true;
        }
        if f.len() > self.len() {
            return false;
        }
        let m = mask(f.len());
        (0..=self.len() - f.len()).any(|shift| (self.bits >> shift) & m == f.bits)
    }

    /// Maximal runs, left to right.
    pub fn run_decomposition(&self) -> Result<Vec<Run>> {
        if self.is_empty() {
            return Err(Error::Arity("run decomposition of the empty word".into()));
        }
        let mut runs: Vec<Run> = Vec::new();
        for a in self.letters() {
            match runs.last_mut() {
                Some(r) if r.letter == a => r.len += 1,
                _ => runs.push(Run { letter: a, len: 1 }),
            }
        }
        Ok(runs)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.letters() {
            f.write_str(if a == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_letters(&letters)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and examples: panics on malformed input.
pub fn w(s: &str) -> BinaryWord {
    s.parse().unwrap_or_else(|e| panic!("bad word literal {s:?}: {e}"))
}

/// All words of length `len` in increasing numeric order.
pub fn all_words(len: usize) -> impl Iterator<Item = BinaryWord> {
    assert!(len <= 24, "refusing to enumerate 2^{len} words");
    (0..1u64 << len).map(move |b| BinaryWord::from_bits_unchecked(b, len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_and_power() {
        assert_eq!(w("01").concat(&w("1")).unwrap(), w("011"));
        assert_eq!(BinaryWord::empty().concat(&w("10")).unwrap(), w("10"));
        assert_eq!(w("1").concat(&w("000")).unwrap(), w("1000"));
        assert_eq!(w("1").power(3).unwrap(), w("111"));
        assert_eq!(w("10").power(2).unwrap(), w("1010"));
        assert_eq!(w("0").power(0).unwrap(), BinaryWord::empty());
    }

    #[test]
    fn capacity_errors() {
        let long = BinaryWord::ones(40).unwrap();
        assert!(matches!(long.concat(&long), Err(Error::Capacity(_))));
        assert!(matches!(w("10").power(32), Err(Error::Capacity(_))));
        assert!(BinaryWord::ones(63).is_ok());
        assert!(BinaryWord::ones(64).is_err());
    }

    #[test]
    fn logical_ops() {
        assert_eq!(w("011").complement(), w("100"));
        assert_eq!(w("0110").xor(&w("0011")).unwrap(), w("0101"));
        assert_eq!(w("0110").and(&w("0010")).unwrap(), w("0010"));
        assert!(matches!(w("01").xor(&w("011")), Err(Error::Arity(_))));
        assert!(matches!(w("01").and(&w("1")), Err(Error::Arity(_))));
    }

    #[test]
    fn factors() {
        assert_eq!(w("11010").factor(2, 4).unwrap(), w("101"));
        assert_eq!(w("10").factor(1, 1).unwrap(), w("1"));
        assert_eq!(w("0110").factor(1, 4).unwrap(), w("0110"));
        assert!(matches!(w("0110").factor(0, 2), Err(Error::Index(_))));
        assert!(matches!(w("0110").factor(3, 2), Err(Error::Index(_))));
        assert!(matches!(w("0110").factor(2, 5), Err(Error::Index(_))));
        assert!(w("0110").contains_factor(&w("11")));
        assert!(!w("0101").contains_factor(&w("11")));
        assert!(!w("1").contains_factor(&w("11")));
    }

    #[test]
    fn runs() {
        let r = |s: &str| {
            w(s).run_decomposition()
                .unwrap()
                .into_iter()
                .map(|r| (r.letter, r.len))
                .collect::<Vec<_>>()
        };
        assert_eq!(r("110100"), vec![(1, 2), (0, 1), (1, 1), (0, 2)]);
        assert_eq!(r("0000"), vec![(0, 4)]);
        assert_eq!(r("1"), vec![(1, 1)]);
        assert!(BinaryWord::empty().run_decomposition().is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("".parse::<BinaryWord>().unwrap(), BinaryWord::empty());
        assert!(matches!("01x".parse::<BinaryWord>(), Err(Error::Parse(_))));
        assert!(matches!("0 1".parse::<BinaryWord>(), Err(Error::Parse(_))));
        assert_eq!(w("0010").to_string(), "0010");
        assert_eq!(format!("{:?}", BinaryWord::empty()), "ε");
    }

    #[test]
    fn positions_are_one_based_from_the_left() {
        let x = w("1000");
        assert_eq!(x.letter(1).unwrap(), 1);
        assert_eq!(x.letter(4).unwrap(), 0);
        assert!(x.letter(0).is_err());
        assert_eq!(BinaryWord::unit(4, 2).unwrap(), w("0100"));
        assert_eq!(BinaryWord::last_unit(3).unwrap(), w("001"));
        assert_eq!(BinaryWord::binary_expansion(26), w("11010"));
        assert_eq!(BinaryWord::binary_expansion(0), w("0"));
    }

    #[test]
    fn ordering_is_length_then_value() {
        let mut v = vec![w("10"), w("001"), w("01"), w("0")];
        v.sort();
        assert_eq!(v, vec![w("0"), w("01"), w("10"), w("001")]);
    }

    #[test]
    fn serde_as_string() {
        let s = serde_json::to_string(&w("0110")).unwrap();
        assert_eq!(s, "\"0110\"");
        let back: BinaryWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w("0110"));
    }
}
