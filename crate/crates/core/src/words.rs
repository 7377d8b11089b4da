//! Reduced words in free groups and word-metric balls.
//!
//! Generators are numbered from 1. In text, generator `i` is the `i`-th
//! lowercase letter and its inverse the matching uppercase letter; generators
//! beyond `z` are written `{27}` / `{-27}`. A letter followed by `⁻¹` is also
//! read as an inverse, so `b a b⁻¹` and `baB` denote the same word.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// The free group F_r.
    Free,
    /// The lattice Z^d.
    Lattice,
}

/// The ambient group: F_r or Z^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupContext {
    pub kind: GroupKind,
    rank_or_dim: usize,
}

impl GroupContext {
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::malformed("free group rank must be at least 1"));
        }
        Ok(GroupContext { kind: GroupKind::Free, rank_or_dim: rank })
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::malformed("lattice dimension must be at least 1"));
        }
        Ok(GroupContext { kind: GroupKind::Lattice, rank_or_dim: dim })
    }

    pub fn rank_or_dim(&self) -> usize {
        self.rank_or_dim
    }

    fn expect_free(&self) -> Result<usize> {
        match self.kind {
            GroupKind::Free => Ok(self.rank_or_dim),
            GroupKind::Lattice => Err(Error::mismatch("word operation in a lattice context")),
        }
    }

    /// Checks that every letter of `w` names a generator of this free group.
    pub fn check(&self, w: &Word) -> Result<()> {
        let rank = self.expect_free()?;
        match w.max_generator() {
            Some(g) if g as usize > rank => {
                Err(Error::mismatch(format!("word `{w}` uses generator {g} outside F_{rank}")))
            }
            _ => Ok(()),
        }
    }

    /// Freely reduces a raw letter sequence, rejecting out-of-range generators.
    pub fn reduce(&self, raw: &[Letter]) -> Result<Word> {
        let rank = self.expect_free()?;
        if let Some(bad) = raw.iter().find(|l| l.generator() as usize > rank) {
            return Err(Error::malformed(format!("letter {bad} is not a generator of F_{rank}")));
        }
        Ok(Word::reduce(raw))
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(v)?;
        Ok(u * v)
    }

    pub fn invert(&self, u: &Word) -> Result<Word> {
        self.check(u)?;
        Ok(u.inverse())
    }

    /// `g u g⁻¹`, reduced.
    pub fn conjugate(&self, u: &Word, g: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(g)?;
        Ok(u.conjugate_by(g))
    }

    /// All reduced words of length at most `radius`, in shortlex order.
    pub fn ball(&self, radius: usize, budget: &Budget) -> Result<Vec<Word>> {
        let rank = self.expect_free()?;
        budget.check_ball(free_ball_size(rank, radius))?;
        let mut out = Vec::new();
        let mut sphere = vec![Word::identity()];
        for k in 0..=radius {
            if k > 0 {
                sphere = next_sphere(rank, &sphere);
            }
            out.extend(sphere.iter().cloned());
        }
        Ok(out)
    }
}

/// A generator or its inverse. Stored as a signed generator index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    /// Generator `generator` (1-based), inverted when `inverse` is set.
    pub fn new(generator: u32, inverse: bool) -> Self {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_slot(slot: usize) -> Self {
        Letter::new((slot / 2) as u32 + 1, slot % 2 == 1)
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Position in the canonical letter order `a < A < b < B < …`.
    pub fn slot(self) -> usize {
        2 * (self.generator() as usize - 1) + usize::from(self.is_inverse())
    }

    /// The `2r` letters of F_r in canonical order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter::from_slot)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.slot().cmp(&other.slot())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator();
        if g <= 26 {
            let base = if self.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + (g - 1) as u8) as char)
        } else if self.is_inverse() {
            write!(f, "{{-{g}}}")
        } else {
            write!(f, "{{{g}}}")
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A freely reduced word. The empty word is the identity.
///
/// Words are ordered shortlex: first by length, then lexicographically in the
/// letter order `a < A < b < B < …`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn generator(g: u32) -> Self {
        Word { letters: vec![Letter::new(g, false)] }
    }

    /// Free reduction by stack cancellation.
    pub fn reduce(raw: &[Letter]) -> Self {
        let mut letters: Vec<Letter> = Vec::with_capacity(raw.len());
        for &l in raw {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        &(g * self) * &g.inverse()
    }

    /// `self · l`, reduced.
    pub fn append(&self, l: Letter) -> Word {
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inverse()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        Word { letters }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.generator()).max()
    }

    /// Sum of generator indices over letters: the weight used by the graded
    /// metric on F_∞ in which generator `i` has length `i`.
    pub fn graded_weight(&self) -> usize {
        self.letters.iter().map(|l| l.generator() as usize).sum()
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        let mut letters = self.letters.clone();
        let mut rest = rhs.letters.as_slice();
        while let (Some(&l), Some(&r)) = (letters.last(), rest.first()) {
            if l != r.inverse() {
                break;
            }
            letters.pop();
            rest = &rest[1..];
        }
        letters.extend_from_slice(rest);
        Word { letters }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Parses a raw (not yet reduced) letter sequence.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() || c == '·' || c == '*' => {}
            'a'..='z' => out.push(Letter::new(c as u32 - 'a' as u32 + 1, false)),
            'A'..='Z' => out.push(Letter::new(c as u32 - 'A' as u32 + 1, true)),
            '⁻' => {
                if chars.next() != Some('¹') {
                    return Err(Error::malformed(format!("`{s}`: expected ⁻¹")));
                }
                let last = out.pop().ok_or_else(|| Error::malformed(format!("`{s}`: ⁻¹ without a letter")))?;
                out.push(last.inverse());
            }
            '{' => {
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some(d) => body.push(d),
                        None => return Err(Error::malformed(format!("`{s}`: unclosed brace"))),
                    }
                }
                let n: i64 =
                    body.trim().parse().map_err(|_| Error::malformed(format!("`{s}`: bad generator `{body}`")))?;
                if n == 0 || n.unsigned_abs() > i32::MAX as u64 {
                    return Err(Error::malformed(format!("`{s}`: generator index {n} out of range")));
                }
                out.push(Letter::new(n.unsigned_abs() as u32, n < 0));
            }
            other => return Err(Error::malformed(format!("`{s}`: unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Word::reduce(&parse_letters(s)?))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a word, panicking on malformed input. Intended for literals in
/// tests and examples.
pub fn w(s: &str) -> Word {
    s.parse().unwrap_or_else(|e| panic!("bad word literal `{s}`: {e}"))
}

/// `|B(id, radius)|` in F_r: `1 + Σ_{k=1..radius} 2r(2r−1)^{k−1}`, or `None` on
/// overflow.
pub fn free_ball_size(rank: usize, radius: usize) -> Option<u128> {
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for k in 1..=radius {
        if k > 1 {
            sphere = sphere.checked_mul(2 * rank as u128 - 1)?;
        }
        total = total.checked_add(sphere)?;
    }
    Some(total)
}

/// Extends a shortlex-sorted sphere of radius `k` to radius `k + 1`.
pub(crate) fn next_sphere(rank: usize, sphere: &[Word]) -> Vec<Word> {
    let mut out = Vec::with_capacity(sphere.len() * (2 * rank).saturating_sub(1).max(1));
    for u in sphere {
        for l in Letter::all(rank) {
            if u.last() == Some(l.inverse()) {
                continue;
            }
            let mut letters = Vec::with_capacity(u.len() + 1);
            letters.extend_from_slice(u.letters());
            letters.push(l);
            out.push(Word::from_reduced(letters));
        }
    }
    out
}

/// Reduced words of F_r of length exactly `k`, in shortlex order.
pub fn sphere(rank: usize, k: usize) -> Vec<Word> {
    let mut s = vec![Word::identity()];
    for _ in 0..k {
        s = next_sphere(rank, &s);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupContext {
        GroupContext::free(2).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let ctx = f2();
        let r = |s: &str| ctx.reduce(&parse_letters(s).unwrap()).unwrap();
        assert_eq!(r("a b b⁻¹ a"), w("aa"));
        assert_eq!(r(""), Word::identity());
        assert_eq!(r("a b a⁻¹ a b⁻¹ a⁻¹"), Word::identity());
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        let err = f2().reduce(&parse_letters("ac").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
    }

    #[test]
    fn multiply_examples() {
        let ctx = f2();
        assert_eq!(ctx.multiply(&w("a"), &w("A")).unwrap(), w(""));
        assert_eq!(ctx.multiply(&w("ab"), &w("Ba")).unwrap(), w("aa"));
        assert_eq!(ctx.multiply(&w("aba"), &w("Ab")).unwrap(), w("abb"));
        assert!(ctx.multiply(&w("a"), &w("c")).is_err());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(w("").inverse(), w(""));
        assert_eq!(w("abA").inverse(), w("aBA"));
    }

    #[test]
    fn conjugate_examples() {
        let ctx = f2();
        assert_eq!(ctx.conjugate(&w("b"), &w("a")).unwrap(), w("abA"));
        assert_eq!(ctx.conjugate(&w("a"), &w("a")).unwrap(), w("a"));
        assert_eq!(ctx.conjugate(&w("ab"), &w("b")).unwrap(), w("ba"));
        assert_eq!(w("ab").conjugate_by(&Word::identity()), w("ab"));
    }

    #[test]
    fn ball_examples() {
        let b = Budget::default();
        assert_eq!(f2().ball(0, &b).unwrap(), vec![Word::identity()]);
        let b1 = f2().ball(1, &b).unwrap();
        assert_eq!(b1, vec![w(""), w("a"), w("A"), w("b"), w("B")]);
        assert_eq!(f2().ball(2, &b).unwrap().len(), 17);
    }

    #[test]
    fn ball_respects_budget() {
        let b = Budget::default();
        assert!(f2().ball(12, &b).is_ok_and(|v| v.len() == 1_062_881));
        let err = f2().ball(13, &b).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn ball_is_shortlex_sorted() {
        let ball = GroupContext::free(3).unwrap().ball(4, &Budget::default()).unwrap();
        assert!(ball.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn ball_size_closed_form() {
        for r in 1..=3 {
            for l in 0..=6 {
                let n = GroupContext::free(r).unwrap().ball(l, &Budget::default()).unwrap().len();
                assert_eq!(Some(n as u128), free_ball_size(r, l), "r={r} L={l}");
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("b a b⁻¹").to_string(), "baB");
        assert_eq!(w("{27}{-27}a").to_string(), "a");
        assert_eq!(w("{27}").to_string(), "{27}");
        assert_eq!(w("{-3}"), w("C"));
        assert!("a?".parse::<Word>().is_err());
        assert!("{0}".parse::<Word>().is_err());
        assert!("⁻¹".parse::<Word>().is_err());
    }

    #[test]
    fn pow_and_weight() {
        assert_eq!(w("ab").pow(2), w("abab"));
        assert_eq!(w("ab").pow(-1), w("BA"));
        assert_eq!(w("ab").pow(0), w(""));
        assert_eq!(w("cA").graded_weight(), 4);
    }
}
