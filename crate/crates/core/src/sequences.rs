//! Binary periodic sequences, LFSR generation, decimation, period detection
//! and Berlekamp-Massey linear-complexity analysis.
//!
//! The LFSR convention: output bit `i` is `a_i`, the register emits its
//! state's leftmost bit first, and a characteristic polynomial
//! `p(x) = c_0 + c_1 x + ... + x^l` drives the recurrence
//! `a_{i+l} = c_0 a_i + c_1 a_{i+1} + ... + c_{l-1} a_{i+l-1}`.

use std::fmt;
use std::str::FromStr;

use crate::field::{is_primitive, BinaryPolynomial, PrimitivePolynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("initial state must not be all-zero")]
    ZeroState,
    #[error("initial state has {got} bits, register degree is {want}")]
    StateLengthMismatch { got: usize, want: usize },
    #[error("index {index} out of range for sequence of length {len} with no usable period")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("declared period {period} is inconsistent with the stored bits")]
    InvalidPeriod { period: usize },
    #[error("cannot parse bit sequence from {0:?}")]
    Parse(String),
}

/// Finite bit vector with an optional known period.
#[derive(Clone, PartialEq, Eq)]
pub struct BinarySequence {
    bits: Vec<bool>,
    period: Option<usize>,
}

impl BinarySequence {
    /// A sequence with no period metadata. Panics on empty input.
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "sequences are non-empty");
        BinarySequence { bits, period: None }
    }

    /// Attaches a period after verifying `bits[i] == bits[i+period]`
    /// wherever both indices exist.
    pub fn with_period(bits: Vec<bool>, period: usize) -> Result<Self, SequenceError> {
        if period == 0 {
            return Err(SequenceError::InvalidPeriod { period });
        }
        for i in 0..bits.len().saturating_sub(period) {
            if bits[i] != bits[i + period] {
                return Err(SequenceError::InvalidPeriod { period });
            }
        }
        let mut s = BinarySequence::new(bits);
        s.period = Some(period);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// Bit at `index`, reducing mod the period when the stored bits cover at
    /// least one full period.
    pub fn bit_at(&self, index: usize) -> Result<bool, SequenceError> {
        if index < self.bits.len() {
            return Ok(self.bits[index]);
        }
        match self.period {
            Some(t) if self.bits.len() >= t => Ok(self.bits[index % t]),
            _ => Err(SequenceError::IndexOutOfRange {
                index,
                len: self.bits.len(),
            }),
        }
    }

    /// First `count` bits as a new sequence, keeping the period metadata.
    pub fn prefix(&self, count: usize) -> BinarySequence {
        assert!(count >= 1 && count <= self.bits.len());
        BinarySequence {
            bits: self.bits[..count].to_vec(),
            period: self.period,
        }
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarySequence({self}")?;
        if let Some(t) = self.period {
            write!(f, ", period {t}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for BinarySequence {
    type Err = SequenceError;

    /// Contiguous '0'/'1' characters; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, SequenceError> {
        let mut bits = Vec::new();
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                _ => return Err(SequenceError::Parse(s.to_string())),
            }
        }
        if bits.is_empty() {
            return Err(SequenceError::Parse(s.to_string()));
        }
        Ok(BinarySequence::new(bits))
    }
}

/// A maximal-length LFSR: primitive characteristic polynomial plus a nonzero
/// initial state `{a_0, ..., a_{l-1}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrConfig {
    poly: PrimitivePolynomial,
    initial_state: Vec<bool>,
}

impl LfsrConfig {
    pub fn new(poly: PrimitivePolynomial, initial_state: Vec<bool>) -> Result<Self, SequenceError> {
        if initial_state.len() != poly.degree() {
            return Err(SequenceError::StateLengthMismatch {
                got: initial_state.len(),
                want: poly.degree(),
            });
        }
        if initial_state.iter().all(|&b| !b) {
            return Err(SequenceError::ZeroState);
        }
        Ok(LfsrConfig {
            poly,
            initial_state,
        })
    }

    pub fn poly(&self) -> &PrimitivePolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn initial_state(&self) -> &[bool] {
        &self.initial_state
    }

    /// Period of the generated m-sequence, 2^l - 1.
    pub fn period(&self) -> u64 {
        (1u64 << self.degree()) - 1
    }
}

/// First `n` bits of the m-sequence, with the period recorded.
pub fn lfsr_generate(cfg: &LfsrConfig, n: usize) -> BinarySequence {
    assert!(n >= 1);
    let l = cfg.degree();
    let taps = cfg.poly.taps();
    let mut bits = cfg.initial_state.clone();
    bits.truncate(n);
    bits.reserve(n.saturating_sub(bits.len()));
    while bits.len() < n {
        let i = bits.len() - l;
        let mut next = false;
        for &j in &taps {
            next ^= bits[i + j];
        }
        bits.push(next);
    }
    let period = cfg.period() as usize;
    BinarySequence {
        bits,
        period: Some(period),
    }
}

/// `{seq[offset + distance*j]}` for `j = 0..count`, indices reduced mod the
/// period when one is recorded and covered.
pub fn decimate(
    seq: &BinarySequence,
    distance: usize,
    offset: usize,
    count: usize,
) -> Result<BinarySequence, SequenceError> {
    assert!(distance >= 1 && count >= 1);
    let mut bits = Vec::with_capacity(count);
    for j in 0..count {
        bits.push(seq.bit_at(offset + distance * j)?);
    }
    let period = seq
        .period
        .map(|t| t / gcd_usize(t, distance))
        .filter(|&t| t >= 1);
    Ok(BinarySequence { bits, period })
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

/// Berlekamp-Massey over GF(2): linear complexity and the characteristic
/// polynomial (in the `c_0 + c_1 x + ... + x^lc` convention) of the shortest
/// LFSR generating `seq`. The all-zero sequence yields `(0, 1)`.
pub fn berlekamp_massey(seq: &BinarySequence) -> (usize, BinaryPolynomial) {
    let s = seq.bits();
    let n = s.len();
    // connection polynomial c(x), c[0] = 1; s_j = sum_{i=1..lc} c_i s_{j-i}
    let mut c = vec![false; n + 1];
    let mut b = vec![false; n + 1];
    c[0] = true;
    b[0] = true;
    let mut lc: usize = 0;
    let mut m: i64 = -1;
    for j in 0..n {
        let mut d = s[j];
        for i in 1..=lc {
            d ^= c[i] & s[j - i];
        }
        if !d {
            continue;
        }
        let t = c.clone();
        let shift = (j as i64 - m) as usize;
        for i in 0..=n.saturating_sub(shift) {
            if b[i] {
                c[i + shift] ^= true;
            }
        }
        if 2 * lc <= j {
            lc = j + 1 - lc;
            m = j as i64;
            b = t;
        }
    }
    // characteristic polynomial: reverse the connection polynomial at length lc
    let mut poly = BinaryPolynomial::zero();
    for (i, &coeff) in c.iter().enumerate().take(lc + 1) {
        if coeff {
            poly.set_coeff(lc - i, true);
        }
    }
    if lc == 0 {
        poly = BinaryPolynomial::one();
    }
    (lc, poly)
}

/// Regenerates a sequence from its characteristic polynomial and seed bits;
/// the independent check for [`berlekamp_massey`] outputs.
pub fn regenerate(poly: &BinaryPolynomial, seed: &[bool], n: usize) -> Vec<bool> {
    let l = poly.degree();
    if l == 0 || seed.is_empty() {
        return vec![false; n];
    }
    assert!(seed.len() >= l);
    let mut bits = seed[..l].to_vec();
    while bits.len() < n {
        let i = bits.len() - l;
        let mut next = false;
        for j in 0..l {
            if poly.coeff(j) {
                next ^= bits[i + j];
            }
        }
        bits.push(next);
    }
    bits.truncate(n);
    bits
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodEstimate {
    pub period: usize,
    /// Set when the window holds at least two full periods.
    pub confident: bool,
}

/// Smallest `T >= 1` with `bits[i] == bits[i+T]` across the available window.
pub fn find_period(seq: &BinarySequence) -> PeriodEstimate {
    let bits = seq.bits();
    let n = bits.len();
    for t in 1..n {
        if (0..n - t).all(|i| bits[i] == bits[i + t]) {
            return PeriodEstimate {
                period: t,
                confident: 2 * t <= n,
            };
        }
    }
    PeriodEstimate {
        period: n,
        confident: false,
    }
}

/// Checks whether one period of `seq` is an m-sequence: linear complexity l
/// with 2^l - 1 equal to the period and a primitive characteristic polynomial.
pub fn is_m_sequence_period(period_bits: &[bool]) -> bool {
    let doubled: Vec<bool> = period_bits
        .iter()
        .chain(period_bits.iter())
        .copied()
        .collect();
    let (lc, poly) = berlekamp_massey(&BinarySequence::new(doubled));
    lc >= 1 && (1usize << lc) - 1 == period_bits.len() && is_primitive(&poly)
}
