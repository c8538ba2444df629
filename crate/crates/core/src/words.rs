//! Free-group arithmetic over a fixed ordered basis.
//!
//! A [`Word`] is a flat sequence of signed generator indices kept freely
//! reduced at all times. Text syntax is whitespace-separated tokens, each a
//! generator name optionally followed by `^` and a nonzero integer, e.g.
//! `a b^-3 c^2`. The empty string is the identity.

use alloc::borrow::ToOwned;
use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

/// Default cap on the number of words [`ball`] will materialize.
pub const DEFAULT_BALL_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("basis must contain at least one generator")]
    EmptyBasis,
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("generator index {index} out of range for rank {rank}")]
    InvalidGenerator { index: usize, rank: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("word uses a generator outside the basis")]
    BasisMismatch,
    #[error("the identity has no cyclic core")]
    EmptyWord,
    #[error("ball of radius {radius} would hold {predicted} words (cap {cap})")]
    BallTooLarge { radius: usize, predicted: u128, cap: u128 },
}

/// One signed generator. Stored as `±(index + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let v = generator as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Dense code in `0..2k`: `2 * generator + (inverse as usize)`.
    #[inline]
    pub fn code(self) -> usize {
        2 * self.generator() + self.is_inverse() as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Letter::new(code / 2, code % 2 == 1)
    }
}

/// Ordered list of distinct generator names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    names: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Basis {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(WordError::InvalidName(n.to_owned()));
            }
            if out.iter().any(|m| m == n) {
                return Err(WordError::DuplicateName(n.to_owned()));
            }
            out.push(n.to_owned());
        }
        if out.is_empty() {
            return Err(WordError::EmptyBasis);
        }
        Ok(Basis { names: out })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Basis with `extra` appended; fails on a name clash.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self, WordError> {
        Basis::new(
            self.names
                .iter()
                .map(|s| s.as_str())
                .chain(extra.iter().map(|s| s.as_ref())),
        )
    }

    /// All `2k` letters, in code order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..2 * self.rank()).map(Letter::from_code)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        if w.letters.iter().all(|l| l.generator() < self.rank()) {
            Ok(())
        } else {
            Err(WordError::BasisMismatch)
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.parse().map_err(|_| WordError::MalformedToken(tok.to_owned()))?;
                    if e == 0 {
                        return Err(WordError::MalformedToken(tok.to_owned()));
                    }
                    (n, e)
                }
                None => (tok, 1),
            };
            let g = self
                .index_of(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_owned()))?;
            let l = Letter::new(g, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                raw.push(l);
            }
        }
        Ok(Word::from_letters(raw))
    }

    /// Inverse of [`Basis::parse_word`]; runs of one letter become powers.
    pub fn format_word(&self, w: &Word) -> String {
        let mut out = String::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&self.names[l.generator()]);
            let e = if l.is_inverse() { -run } else { run };
            if e != 1 {
                let _ = write!(out, "^{}", e);
            }
            i = j;
        }
        out
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

/// `w = p · core^exponent · p⁻¹` with `core` cyclically reduced and primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub conjugator: Word,
    pub core: Word,
    pub exponent: u64,
}

impl CyclicDecomposition {
    pub fn recompose(&self) -> Word {
        self.conjugator
            .mul(&self.core.pow(self.exponent as i64))
            .mul(&self.conjugator.inverse())
    }
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Single generator `g^e`.
    pub fn generator_power(g: usize, e: i64) -> Self {
        let l = Letter::new(g, e < 0);
        Word {
            letters: vec![l; e.unsigned_abs() as usize],
        }
    }

    /// Freely reduces an arbitrary letter sequence by a single stack scan.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
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

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator()).max()
    }

    /// Number of letters cancelled when forming `self · other`.
    pub fn cancellation(&self, other: &Word) -> usize {
        let a = &self.letters;
        let b = &other.letters;
        let n = a.len().min(b.len());
        let mut c = 0;
        while c < n && a[a.len() - 1 - c] == b[c].inverse() {
            c += 1;
        }
        c
    }

    pub fn mul(&self, other: &Word) -> Word {
        let c = self.cancellation(other);
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * c);
        letters.extend_from_slice(&self.letters[..self.len() - c]);
        letters.extend_from_slice(&other.letters[c..]);
        Word { letters }
    }

    /// In-place right multiplication.
    pub fn mul_assign(&mut self, other: &Word) {
        let c = self.cancellation(other);
        self.letters.truncate(self.letters.len() - c);
        self.letters.extend_from_slice(&other.letters[c..]);
    }

    /// Right multiplication by a single letter.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `w = p · c · p⁻¹` with `c` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word {
                letters: self.letters[..k].to_vec(),
            },
            Word {
                letters: self.letters[k..n - k].to_vec(),
            },
        )
    }

    pub fn cyclic_decompose(&self) -> Result<CyclicDecomposition, WordError> {
        if self.is_empty() {
            return Err(WordError::EmptyWord);
        }
        let (p, c) = self.cyclic_reduction();
        let period = smallest_period(&c.letters);
        let (core, exponent) = if c.len() % period == 0 {
            (
                Word {
                    letters: c.letters[..period].to_vec(),
                },
                (c.len() / period) as u64,
            )
        } else {
            (c, 1)
        };
        Ok(CyclicDecomposition {
            conjugator: p,
            core,
            exponent,
        })
    }

    /// `self^e`, built directly from the cyclic reduction in `O(|e|·|w|)`.
    pub fn pow(&self, e: i64) -> Word {
        if e == 0 || self.is_empty() {
            return Word::identity();
        }
        let (p, c) = self.cyclic_reduction();
        let c = if e < 0 { c.inverse() } else { c };
        let reps = e.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(2 * p.len() + reps * c.len());
        letters.extend_from_slice(&p.letters);
        for _ in 0..reps {
            letters.extend_from_slice(&c.letters);
        }
        letters.extend(p.letters.iter().rev().map(|l| l.inverse()));
        Word { letters }
    }

    pub fn commutes_with(&self, other: &Word) -> bool {
        commute(self, other)
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.letters.starts_with(&prefix.letters)
    }
}

/// Smallest `d` with `s[i] = s[i + d]` for all valid `i` (prefix function).
fn smallest_period(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    n - pi[n - 1]
}

/// Reduces raw `(generator, sign)` pairs, validating indices against `basis`.
pub fn reduce(basis: &Basis, raw: &[(usize, i8)]) -> Result<Word, WordError> {
    let mut letters = Vec::with_capacity(raw.len());
    for &(g, s) in raw {
        if g >= basis.rank() {
            return Err(WordError::InvalidGenerator {
                index: g,
                rank: basis.rank(),
            });
        }
        letters.push(Letter::new(g, s < 0));
    }
    Ok(Word::from_letters(letters))
}

pub fn multiply(basis: &Basis, u: &Word, v: &Word) -> Result<Word, WordError> {
    basis.check(u)?;
    basis.check(v)?;
    Ok(u.mul(v))
}

pub fn invert(u: &Word) -> Word {
    u.inverse()
}

/// `[u, v] = e`, decided by reducing `u v u⁻¹ v⁻¹`.
pub fn commute(u: &Word, v: &Word) -> bool {
    u.mul(v) == v.mul(u)
}

/// Number of reduced words of length at most `r` in a free group of rank `k`.
pub fn ball_size(rank: usize, r: usize) -> u128 {
    let k = rank as u128;
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * k;
    for i in 1..=r {
        if i > 1 {
            sphere = sphere.saturating_mul(2 * k - 1);
        }
        total = total.saturating_add(sphere);
    }
    total
}

/// Every reduced word of length `≤ r`, shortest first, each exactly once.
pub fn ball(basis: &Basis, r: usize, cap: u128) -> Result<Vec<Word>, WordError> {
    let predicted = ball_size(basis.rank(), r);
    if predicted > cap {
        return Err(WordError::BallTooLarge {
            radius: r,
            predicted,
            cap,
        });
    }
    let mut out = Vec::with_capacity(predicted as usize);
    let mut queue: VecDeque<usize> = VecDeque::new();
    out.push(Word::identity());
    queue.push_back(0);
    while let Some(idx) = queue.pop_front() {
        if out[idx].len() == r {
            continue;
        }
        let last = out[idx].last();
        for l in basis.letters() {
            if Some(l.inverse()) == last {
                continue;
            }
            let mut w = out[idx].clone();
            w.letters.push(l);
            out.push(w);
            queue.push_back(out.len() - 1);
        }
    }
    Ok(out)
}
