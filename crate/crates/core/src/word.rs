//! Words in the free generators of a surface group.
//!
//! Generators are indexed from zero and printed as `a, b, c, …`; inverses are
//! the upper-case letters. Letters are ordered `a < A < b < B < …`, which is
//! the order used for minimal rotations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: generator as u8, inverse }
    }

    pub fn gen(generator: usize) -> Self {
        Self::new(generator, false)
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    fn key(self) -> u16 {
        2 * self.generator as u16 + self.inverse as u16
    }

    pub fn to_char(self) -> char {
        let base = (b'a' + self.generator) as char;
        if self.inverse {
            base.to_ascii_uppercase()
        } else {
            base
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        if !ch.is_ascii_alphabetic() {
            return None;
        }
        let lower = ch.to_ascii_lowercase();
        Some(Letter::new((lower as u8 - b'a') as usize, ch.is_ascii_uppercase()))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A (not necessarily reduced) word. Constructors that say so return freely
/// reduced words; everything else preserves the letters as given.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![Letter::gen(i)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator as usize).max()
    }

    /// Free reduction (cancel adjacent `x x⁻¹`).
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).reduced()
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v).reduced()
    }

    pub fn rotated(&self, i: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let i = i % self.0.len();
        let mut v = self.0[i..].to_vec();
        v.extend_from_slice(&self.0[..i]);
        Word(v)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let w = &self.0;
        if w.len() <= 1 {
            return true;
        }
        self.reduced().len() == w.len() && w[0] != w[w.len() - 1].inv()
    }

    /// Freely and cyclically reduced word conjugate to `self`.
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    /// Lexicographically least rotation.
    pub fn minimal_rotation(&self) -> Word {
        (0..self.0.len().max(1))
            .map(|i| self.rotated(i))
            .min()
            .unwrap_or_default()
    }

    /// Smallest `d` dividing the length with `self = u^(len/d)`, `|u| = d`.
    pub fn primitive_root_len(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (d..n).all(|i| self.0[i] == self.0[i - d]))
            .unwrap_or(n)
    }

    /// Exponent sum per generator (abelianisation).
    pub fn abelianization(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            v[l.generator as usize] += if l.inverse { -1 } else { 1 };
        }
        v
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "1" || t == "e" {
            return Ok(Word::empty());
        }
        let mut v = Vec::new();
        for ch in t.chars() {
            if ch.is_whitespace() || ch == '.' || ch == '·' || ch == '*' {
                continue;
            }
            match Letter::from_char(ch) {
                Some(l) => v.push(l),
                None => return Err(LabError::InvalidWord(s.to_string())),
            }
        }
        Ok(Word(v))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
