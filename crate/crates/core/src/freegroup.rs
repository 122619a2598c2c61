//! Reduced words in the free group on two generators `x` and `y`.
//!
//! Words are written with lowercase letters for the generators and uppercase
//! letters for their inverses, so `xyXY` is the commutator `x y x⁻¹ y⁻¹`.
//! The empty word renders as `1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest radius [`enumerate_ball`] accepts by default.
pub const DEFAULT_BALL_CAP: u32 = 14;

/// Hard limit imposed by the packed `u32` word encoding (2 bits per letter).
pub const MAX_BALL_CAP: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("word ball of radius {requested} exceeds the enumeration cap {cap} (would hold {words} words)")]
    CapExceeded { requested: u32, cap: u32, words: u64 },
    #[error("invalid letter {0:?}: expected one of x, X, y, Y")]
    InvalidLetter(char),
}

/// One of the four symbols `x`, `x⁻¹`, `y`, `y⁻¹`.
///
/// The discriminant is the 2-bit code used for packing; a letter and its
/// inverse differ only in the low bit. The derived ordering is the
/// enumeration rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Letter {
    X = 0,
    XInv = 1,
    Y = 2,
    YInv = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X, Letter::XInv, Letter::Y, Letter::YInv];

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_code(code: u8) -> Letter {
        Letter::ALL[(code & 3) as usize]
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter::from_code(self.code() ^ 1)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::XInv => 'X',
            Letter::Y => 'y',
            Letter::YInv => 'Y',
        }
    }
}

impl TryFrom<char> for Letter {
    type Error = FreeGroupError;

    fn try_from(c: char) -> Result<Self, Self::Error> {
        match c {
            'x' => Ok(Letter::X),
            'X' => Ok(Letter::XInv),
            'y' => Ok(Letter::Y),
            'Y' => Ok(Letter::YInv),
            other => Err(FreeGroupError::InvalidLetter(other)),
        }
    }
}

/// A freely reduced word. Construction always reduces, so no value of this
/// type contains an adjacent cancelling pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letter(l: Letter) -> Self {
        Self { letters: vec![l] }
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

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// True when the first and last letters do not cancel.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        concat(self, other)
    }

    pub fn inverse(&self) -> ReducedWord {
        invert(self)
    }

    /// `self` raised to the integer power `n`, by repeated multiplication.
    pub fn pow(&self, n: i64) -> ReducedWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(ReducedWord::identity(), |acc, _| concat(&acc, &base))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = FreeGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(ReducedWord::identity());
        }
        let letters = s
            .chars()
            .map(Letter::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(reduce(letters))
    }
}

/// Freely reduces an arbitrary letter sequence.
pub fn reduce<I>(letters: I) -> ReducedWord
where
    I: IntoIterator<Item = Letter>,
{
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    ReducedWord { letters: stack }
}

pub fn concat(a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
    // cancellation only happens at the seam
    let overlap = a
        .letters
        .iter()
        .rev()
        .zip(b.letters.iter())
        .take_while(|(p, q)| **p == q.inverse())
        .count();
    let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * overlap);
    letters.extend_from_slice(&a.letters[..a.len() - overlap]);
    letters.extend_from_slice(&b.letters[overlap..]);
    ReducedWord { letters }
}

pub fn invert(a: &ReducedWord) -> ReducedWord {
    ReducedWord {
        letters: a.letters.iter().rev().map(|l| l.inverse()).collect(),
    }
}

/// Splits `t` as `conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced. The three pieces concatenate without cancellation.
pub fn cyclic_reduce(t: &ReducedWord) -> (ReducedWord, ReducedWord) {
    let n = t.len();
    let mut c = 0;
    while n >= 2 * c + 2 && t.letters[c] == t.letters[n - 1 - c].inverse() {
        c += 1;
    }
    let conjugator = ReducedWord {
        letters: t.letters[..c].to_vec(),
    };
    let core = ReducedWord {
        letters: t.letters[c..n - c].to_vec(),
    };
    (conjugator, core)
}

/// Reduced length of `tⁿ`, using the cyclic decomposition of `t`.
pub fn power_length(t: &ReducedWord, n: i64) -> u64 {
    if n == 0 || t.is_empty() {
        return 0;
    }
    let (conj, core) = cyclic_reduce(t);
    2 * conj.len() as u64 + n.unsigned_abs() * core.len() as u64
}

/// Number of integers `n` for which the reduced form of `tⁿ` has length at
/// most `k`. Never exceeds `2k + 1`.
pub fn count_cyclic_powers(t: &ReducedWord, k: u32) -> u64 {
    if t.is_empty() {
        return 1;
    }
    let (conj, core) = cyclic_reduce(t);
    let fixed = 2 * conj.len() as u64;
    let step = core.len() as u64;
    let k = k as u64;

    debug_assert!((-8i64..=8).all(|n| t.pow(n).len() as u64 == power_length(t, n)));

    let positive = if k >= fixed { (k - fixed) / step } else { 0 };
    1 + 2 * positive
}

/// `#V_n = 2(3ⁿ − 1) + 1` for `n ≥ 1`, and `1` for `n = 0`.
/// Saturates at `u64::MAX` once the count no longer fits.
pub fn ball_cardinality(n: u32) -> u64 {
    3u64.checked_pow(n)
        .and_then(|p| (p - 1).checked_mul(2))
        .map_or(u64::MAX, |m| m + 1)
}

/// All reduced words of length at most `radius`, stored packed and ordered
/// by length, then lexicographically by letter rank.
#[derive(Clone, Debug)]
pub struct WordBall {
    radius: u32,
    codes: Vec<u32>,
    level_start: Vec<usize>,
}

impl WordBall {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Number of words of length exactly `l`.
    pub fn level_len(&self, l: u32) -> usize {
        let l = l as usize;
        self.level_start[l + 1] - self.level_start[l]
    }

    pub fn get(&self, index: usize) -> Option<ReducedWord> {
        let code = *self.codes.get(index)?;
        let len = self.level_start.partition_point(|&s| s <= index) - 1;
        Some(unpack(code, len))
    }

    pub fn iter(&self) -> impl Iterator<Item = ReducedWord> + '_ {
        (0..=self.radius as usize).flat_map(move |len| {
            self.codes[self.level_start[len]..self.level_start[len + 1]]
                .iter()
                .map(move |&c| unpack(c, len))
        })
    }

    pub fn iter_level(&self, l: u32) -> impl Iterator<Item = ReducedWord> + '_ {
        let len = l as usize;
        self.codes[self.level_start[len]..self.level_start[len + 1]]
            .iter()
            .map(move |&c| unpack(c, len))
    }
}

fn unpack(code: u32, len: usize) -> ReducedWord {
    ReducedWord {
        letters: (0..len)
            .map(|i| Letter::from_code(((code >> (2 * i)) & 3) as u8))
            .collect(),
    }
}

pub fn enumerate_ball(n: u32) -> Result<WordBall, FreeGroupError> {
    enumerate_ball_capped(n, DEFAULT_BALL_CAP)
}

pub fn enumerate_ball_capped(n: u32, cap: u32) -> Result<WordBall, FreeGroupError> {
    let cap = cap.min(MAX_BALL_CAP);
    if n > cap {
        return Err(FreeGroupError::CapExceeded {
            requested: n,
            cap,
            words: ball_cardinality(n),
        });
    }
    let mut codes: Vec<u32> = Vec::with_capacity(ball_cardinality(n) as usize);
    let mut level_start = vec![0usize, 1];
    codes.push(0);
    for len in 1..=n as usize {
        let prev = level_start[len - 1]..level_start[len];
        for i in prev {
            let code = codes[i];
            let last = (len > 1).then(|| Letter::from_code(((code >> (2 * (len - 2))) & 3) as u8));
            for l in Letter::ALL {
                if Some(l.inverse()) == last {
                    continue;
                }
                codes.push(code | (l.code() as u32) << (2 * (len - 1)));
            }
        }
        level_start.push(codes.len());
    }
    Ok(WordBall {
        radius: n,
        codes,
        level_start,
    })
}
