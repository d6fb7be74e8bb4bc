//! The word maps `S_a(w)` and sign bits `T_a(w)`, their orbits, and cycle
//! structure.
//!
//! For a letter `a` and words `w`, `u` of length `ℓ`, the `ℓ+1` letter word
//! `T_a(w)(u) S_a(w)(u)` is `((ā^ℓ ⊕ w)0 ∧ u0) ⊕ 0u`. With the packed layout of
//! [`BinaryWord`] that is `((x & u) << 1) ^ u` where `x` is `w` for `a = 1` and
//! its complement for `a = 0`.
//!
//! Paths compose right to left: `S_h = S_{h_1} ∘ … ∘ S_{h_r}`, so the last
//! letter of `h` acts first and the sign parity is accumulated along the way.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::word::{mask, BinaryWord};

/// Upper bound on orbit sizes materialized by [`OrbitTable::build`].
pub const DEFAULT_ORBIT_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepResult {
    pub sign_bit: u8,
    pub next: BinaryWord,
}

/// Both maps of a fixed `w`, precomputed as bit masks.
#[derive(Debug, Clone, Copy)]
pub struct WordMaps {
    len: usize,
    mask: u64,
    // x[a] = ā^ℓ ⊕ w
    x: [u64; 2],
    w: BinaryWord,
}

impl WordMaps {
    pub fn new(w: &BinaryWord) -> Self {
        Self {
            len: w.len(),
            mask: mask(w.len()),
            x: [w.complement().bits(), w.bits()],
            w: *w,
        }
    }

    pub fn word(&self) -> &BinaryWord {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Returns `(T_a(w)(u), S_a(w)(u))` on packed bits.
    #[inline]
    pub fn step_bits(&self, a: u8, u: u64) -> (u8, u64) {
        let r = ((self.x[a as usize] & u) << 1) ^ u;
        (((r >> self.len) & 1) as u8, r & self.mask)
    }

    /// Inverse of `S_a(w)` on packed bits, by back-substitution from the last letter.
    pub fn inverse_bits(&self, a: u8, next: u64) -> u64 {
        let x = self.x[a as usize];
        let mut u = next & 1;
        for k in 1..self.len {
            let carry = (x >> (k - 1)) & (u >> (k - 1)) & 1;
            u |= (((next >> k) & 1) ^ carry) << k;
        }
        u
    }

    fn word_of(&self, bits: u64) -> BinaryWord {
        BinaryWord::from_bits_unchecked(bits, self.len)
    }
}

fn check_letter(a: u8) -> Result<()> {
    if a > 1 {
        return Err(Error::Domain(format!("letter must be 0 or 1, got {a}")));
    }
    Ok(())
}

fn check_pair(w: &BinaryWord, u: &BinaryWord) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Arity("maps need a nonempty word".into()));
    }
    if w.len() != u.len() {
        return Err(Error::Arity(format!(
            "|w| = {} but |u| = {}",
            w.len(),
            u.len()
        )));
    }
    Ok(())
}

/// One application of `S_a(w)` to `u`, together with `T_a(w)(u)`.
pub fn step(w: &BinaryWord, a: u8, u: &BinaryWord) -> Result<StepResult> {
    check_pair(w, u)?;
    check_letter(a)?;
    let maps = WordMaps::new(w);
    let (t, s) = maps.step_bits(a, u.bits());
    Ok(StepResult {
        sign_bit: t,
        next: maps.word_of(s),
    })
}

/// The unique `u` with `S_a(w)(u) = u_next`.
pub fn step_inverse(w: &BinaryWord, a: u8, u_next: &BinaryWord) -> Result<BinaryWord> {
    check_pair(w, u_next)?;
    check_letter(a)?;
    let maps = WordMaps::new(w);
    Ok(maps.word_of(maps.inverse_bits(a, u_next.bits())))
}

/// `(T_h(w)(u) mod 2, S_h(w)(u))`; the last letter of `h` acts first.
pub fn apply_path(w: &BinaryWord, h: &BinaryWord, u: &BinaryWord) -> Result<(u8, BinaryWord)> {
    check_pair(w, u)?;
    let maps = WordMaps::new(w);
    let mut cur = u.bits();
    let mut parity = 0u8;
    for i in (1..=h.len()).rev() {
        let (t, s) = maps.step_bits(h.letter_unchecked(i), cur);
        parity ^= t;
        cur = s;
    }
    Ok((parity, maps.word_of(cur)))
}

/// The closure of a base word under `S_0(w)` and `S_1(w)` with the induced
/// successor permutations and sign bits.
///
/// Elements are listed in breadth-first discovery order starting from the
/// base, taking the 0-successor before the 1-successor.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    maps: WordMaps,
    elements: Vec<u64>,
    index: HashMap<u64, u32>,
    succ: [Vec<u32>; 2],
    sign: [Vec<u8>; 2],
}

impl OrbitTable {
    pub fn build(w: &BinaryWord, u: &BinaryWord) -> Result<Self> {
        Self::build_with_limit(w, u, DEFAULT_ORBIT_LIMIT)
    }

    pub fn build_with_limit(w: &BinaryWord, u: &BinaryWord, limit: usize) -> Result<Self> {
        check_pair(w, u)?;
        let maps = WordMaps::new(w);
        let mut walker = OrbitWalker::new(maps, u.bits());
        let mut succ = [Vec::new(), Vec::new()];
        let mut sign = [Vec::new(), Vec::new()];
        let mut expanded = 0;
        while expanded < walker.order.len() {
            if walker.order.len() > limit {
                return Err(Error::Capacity(format!(
                    "orbit of ({w}, {u}) exceeds {limit} elements"
                )));
            }
            let x = walker.order[expanded];
            for a in 0..2u8 {
                let (t, s) = maps.step_bits(a, x);
                let j = walker.visit(s);
                succ[a as usize].push(j);
                sign[a as usize].push(t);
            }
            expanded += 1;
        }
        Ok(Self {
            maps,
            elements: walker.order,
            index: walker.seen,
            succ,
            sign,
        })
    }

    pub fn word(&self) -> &BinaryWord {
        &self.maps.w
    }

    pub fn maps(&self) -> &WordMaps {
        &self.maps
    }

    pub fn base(&self) -> BinaryWord {
        self.element(0)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> BinaryWord {
        self.maps.word_of(self.elements[i])
    }

    pub fn element_bits(&self) -> &[u64] {
        &self.elements
    }

    pub fn elements(&self) -> impl Iterator<Item = BinaryWord> + '_ {
        self.elements.iter().map(|&b| self.maps.word_of(b))
    }

    pub fn position(&self, u: &BinaryWord) -> Option<usize> {
        if u.len() != self.maps.len {
            return None;
        }
        self.index.get(&u.bits()).map(|&i| i as usize)
    }

    /// Position of `S_a(w)` applied to element `i`.
    pub fn succ(&self, a: u8) -> &[u32] {
        &self.succ[a as usize]
    }

    /// `T_a(w)` of every element.
    pub fn signs(&self, a: u8) -> &[u8] {
        &self.sign[a as usize]
    }

    /// Cycles of `S_a(w)` restricted to the orbit, one at a time, ordered by
    /// their smallest position.
    pub fn cycles(&self, a: u8) -> CycleIter<'_> {
        CycleIter {
            succ: &self.succ[a as usize],
            visited: vec![false; self.len()],
            next_start: 0,
        }
    }

    /// Lengths of the `S_a` cycles in [`cycles`](Self::cycles) order.
    pub fn cycle_lengths(&self, a: u8) -> Vec<usize> {
        self.cycles(a).map(|c| c.len()).collect()
    }

    /// One line per element: position, word, then successor and sign for each letter.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# orbit w={} u={} size={}",
            self.word(),
            self.base(),
            self.len()
        );
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{i} {} succ0={} sign0={} succ1={} sign1={}",
                self.element(i),
                self.succ[0][i],
                self.sign[0][i],
                self.succ[1][i],
                self.sign[1][i]
            );
        }
        out
    }
}

pub struct CycleIter<'a> {
    succ: &'a [u32],
    visited: Vec<bool>,
    next_start: usize,
}

impl Iterator for CycleIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        while self.next_start < self.succ.len() && self.visited[self.next_start] {
            self.next_start += 1;
        }
        let start = self.next_start;
        if start >= self.succ.len() {
            return None;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        loop {
            self.visited[i] = true;
            cycle.push(i as u32);
            i = self.succ[i] as usize;
            if i == start {
                break;
            }
        }
        Some(cycle)
    }
}

/// Lazy breadth-first enumeration of an orbit, in the same order as
/// [`OrbitTable`]. Lets searches stop before the whole orbit is built.
pub struct OrbitWalker {
    maps: WordMaps,
    order: Vec<u64>,
    seen: HashMap<u64, u32>,
    expanded: usize,
    yielded: usize,
}

impl OrbitWalker {
    fn new(maps: WordMaps, base: u64) -> Self {
        let mut seen = HashMap::new();
        seen.insert(base, 0);
        Self {
            maps,
            order: vec![base],
            seen,
            expanded: 0,
            yielded: 0,
        }
    }

    pub fn start(w: &BinaryWord, u: &BinaryWord) -> Result<Self> {
        check_pair(w, u)?;
        Ok(Self::new(WordMaps::new(w), u.bits()))
    }

    fn visit(&mut self, x: u64) -> u32 {
        let next = self.order.len() as u32;
        *self.seen.entry(x).or_insert_with(|| {
            self.order.push(x);
            next
        })
    }

    pub fn discovered(&self) -> usize {
        self.order.len()
    }
}

impl Iterator for OrbitWalker {
    type Item = BinaryWord;

    fn next(&mut self) -> Option<BinaryWord> {
        while self.yielded >= self.order.len() {
            if self.expanded >= self.order.len() {
                return None;
            }
            let x = self.order[self.expanded];
            self.expanded += 1;
            for a in 0..2u8 {
                let (_, s) = self.maps.step_bits(a, x);
                self.visit(s);
            }
        }
        let out = self.maps.word_of(self.order[self.yielded]);
        self.yielded += 1;
        Some(out)
    }
}

/// `O_w(u)` as a table.
pub fn orbit(w: &BinaryWord, u: &BinaryWord) -> Result<OrbitTable> {
    OrbitTable::build(w, u)
}

/// The cycle of `S_a(w)` through `u`, in iteration order starting at `u`.
pub fn cycle_of(w: &BinaryWord, a: u8, u: &BinaryWord) -> Result<Vec<BinaryWord>> {
    check_pair(w, u)?;
    check_letter(a)?;
    let maps = WordMaps::new(w);
    let mut out = vec![*u];
    let mut cur = maps.step_bits(a, u.bits()).1;
    while cur != u.bits() {
        out.push(maps.word_of(cur));
        cur = maps.step_bits(a, cur).1;
    }
    Ok(out)
}

/// Summary of one `S_a` cycle without materializing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStats {
    pub length: usize,
    /// Parity of the number of cycle words whose first letter is 1.
    pub first_letter_parity: u8,
    /// Parity of the number of `T_a = 1` steps along the cycle.
    pub sign_parity: u8,
}

pub fn cycle_stats(w: &BinaryWord, a: u8, u: &BinaryWord) -> Result<CycleStats> {
    check_pair(w, u)?;
    check_letter(a)?;
    Ok(cycle_stats_bits(&WordMaps::new(w), a, u.bits()))
}

pub(crate) fn cycle_stats_bits(maps: &WordMaps, a: u8, u: u64) -> CycleStats {
    let top = maps.len - 1;
    let mut stats = CycleStats {
        length: 0,
        first_letter_parity: 0,
        sign_parity: 0,
    };
    let mut cur = u;
    loop {
        let (t, s) = maps.step_bits(a, cur);
        stats.length += 1;
        stats.first_letter_parity ^= ((cur >> top) & 1) as u8;
        stats.sign_parity ^= t;
        cur = s;
        if cur == u {
            return stats;
        }
    }
}

/// Parity of the number of words with first letter 1 in the `S_a(w)` cycle through `u`.
pub fn cycle_first_letter_parity(w: &BinaryWord, a: u8, u: &BinaryWord) -> Result<u8> {
    Ok(cycle_stats(w, a, u)?.first_letter_parity)
}

/// `Λ_a(w)(u)`.
pub fn cycle_length(w: &BinaryWord, a: u8, u: &BinaryWord) -> Result<usize> {
    Ok(cycle_stats(w, a, u)?.length)
}

fn pow2_ceil(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Run-length bound on every cycle length of `S_a(w)`.
///
/// Each maximal run of the letter `a` contributes `2^⌈log2(len+1)⌉`, except a
/// run at the very start of `w`, which contributes `2^⌈log2(len)⌉`. Without
/// runs of `a` the map is the identity and the bound is 1.
pub fn cycle_length_bound(w: &BinaryWord, a: u8) -> Result<usize> {
    check_letter(a)?;
    let runs = w.run_decomposition()?;
    Ok(runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.letter == a)
        .map(|(i, r)| if i == 0 { pow2_ceil(r.len) } else { pow2_ceil(r.len + 1) })
        .max()
        .unwrap_or(1))
}
