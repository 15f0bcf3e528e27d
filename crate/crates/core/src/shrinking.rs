//! The shrinking generator, its structural formulas (period, linear
//! complexity, interleaved decomposition) and the register-recovery relations
//! between the shrunken sequence and the two registers.

use crate::field::{BinaryPolynomial, FieldTables};
use crate::sequences::{
    berlekamp_massey, decimate, is_m_sequence_period, lfsr_generate, BinarySequence, LfsrConfig,
    SequenceError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShrinkingError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sequence does not decompose into cyclic shifts of one m-sequence: {0}")]
    NotDecomposable(String),
    #[error("recovered selector position {position} falls outside [0, {t1})")]
    InconsistentOffsets { position: u32, t1: u32 },
    #[error("ones-position pattern is not an m-sequence")]
    NotAnMSequence,
    #[error("input too short: needed {needed} bits")]
    InsufficientInput { needed: usize },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Selector register R1 (length L1) decimating data register R2 (length L2),
/// with gcd(L1, L2) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkingGeneratorConfig {
    r1: LfsrConfig,
    r2: LfsrConfig,
}

impl ShrinkingGeneratorConfig {
    pub fn new(r1: LfsrConfig, r2: LfsrConfig) -> Result<Self, ShrinkingError> {
        let (l1, l2) = (r1.degree(), r2.degree());
        if l1 < 2 || l2 < 2 {
            return Err(ShrinkingError::InvalidConfig(format!(
                "register degrees must be at least 2, got {l1} and {l2}"
            )));
        }
        if gcd(l1 as u64, l2 as u64) != 1 {
            return Err(ShrinkingError::InvalidConfig(format!(
                "register degrees {l1} and {l2} are not coprime"
            )));
        }
        Ok(ShrinkingGeneratorConfig { r1, r2 })
    }

    pub fn r1(&self) -> &LfsrConfig {
        &self.r1
    }

    pub fn r2(&self) -> &LfsrConfig {
        &self.r2
    }

    pub fn l1(&self) -> usize {
        self.r1.degree()
    }

    pub fn l2(&self) -> usize {
        self.r2.degree()
    }

    /// Number of interleaved m-sequences, 2^(L1-1).
    pub fn d(&self) -> u64 {
        1u64 << (self.l1() - 1)
    }

    pub fn t1(&self) -> u64 {
        (1u64 << self.l1()) - 1
    }

    pub fn t2(&self) -> u64 {
        (1u64 << self.l2()) - 1
    }

    /// Period of the shrunken sequence, 2^(L1-1)(2^L2 - 1).
    pub fn period(&self) -> u64 {
        self.d() * self.t2()
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative inverse of `a` mod `m` (must be coprime).
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (a as i64 % m as i64, m as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i64) as u64)
}

/// Keeps `data[i]` wherever `selector[i] = 1`; the raw decimation rule.
pub fn shrink_with_selector(
    selector: &BinarySequence,
    data: &BinarySequence,
    n: usize,
) -> Result<BinarySequence, ShrinkingError> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..selector.len().min(data.len()) {
        if selector.bits()[i] {
            out.push(data.bits()[i]);
            if out.len() == n {
                return Ok(BinarySequence::new(out));
            }
        }
    }
    Err(ShrinkingError::InsufficientInput { needed: n })
}

/// First `n` bits of the shrunken sequence, with the structural period
/// attached.
pub fn shrunken_generate(cfg: &ShrinkingGeneratorConfig, n: usize) -> BinarySequence {
    assert!(n >= 1);
    // each T1-window of the selector holds exactly 2^(L1-1) ones
    let windows = n as u64 / cfg.d() + 2;
    let len = (windows * cfg.t1()) as usize;
    let a = lfsr_generate(&cfg.r1, len);
    let b = lfsr_generate(&cfg.r2, len);
    let out = shrink_with_selector(&a, &b, n).expect("window bound covers n ones");
    let period = cfg.period() as usize;
    BinarySequence::with_period(out.bits().to_vec(), period).expect("structural period")
}

/// Period of the shrunken sequence for register lengths (L1, L2).
pub fn shrunken_period(l1: usize, l2: usize) -> Result<u64, ShrinkingError> {
    check_lengths(l1, l2)?;
    Ok((1u64 << (l1 - 1)) * ((1u64 << l2) - 1))
}

/// Linear-complexity bounds (inclusive): LC = L*L2 with 2^(L1-2) < L <= 2^(L1-1).
pub fn shrunken_lc_bounds(l1: usize, l2: usize) -> Result<(u64, u64), ShrinkingError> {
    check_lengths(l1, l2)?;
    let l_min = (1u64 << (l1 - 2)) + 1;
    let l_max = 1u64 << (l1 - 1);
    Ok((l_min * l2 as u64, l_max * l2 as u64))
}

fn check_lengths(l1: usize, l2: usize) -> Result<(), ShrinkingError> {
    if l1 < 2 || l2 < 2 || gcd(l1 as u64, l2 as u64) != 1 {
        return Err(ShrinkingError::InvalidConfig(format!(
            "register degrees ({l1}, {l2}) must be coprime and at least 2"
        )));
    }
    Ok(())
}

/// The 2^(L1-1) phase-shifted copies of one m-sequence inside a shrunken
/// sequence, plus their offsets relative to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedDecomposition {
    pub d: usize,
    pub subsequences: Vec<BinarySequence>,
    /// `offsets[k]` = shift of subsequence k against subsequence 0; offsets[0] = 0.
    pub offsets: Vec<u32>,
}

impl InterleavedDecomposition {
    pub fn first(&self) -> &BinarySequence {
        &self.subsequences[0]
    }
}

/// Decimates one full period of `s` by 2^(L1-1) and measures each
/// subsequence's cyclic shift against subsequence 0 by exhaustive
/// correlation.
pub fn interleave_decompose(
    s: &BinarySequence,
    l1: usize,
) -> Result<InterleavedDecomposition, ShrinkingError> {
    if l1 < 1 {
        return Err(ShrinkingError::InvalidConfig("L1 must be positive".into()));
    }
    let d = 1usize << (l1 - 1);
    let period = s
        .period()
        .ok_or_else(|| ShrinkingError::NotDecomposable("period unknown".into()))?;
    if s.len() < period {
        return Err(ShrinkingError::NotDecomposable(format!(
            "need one full period ({period} bits), have {}",
            s.len()
        )));
    }
    if period % d != 0 {
        return Err(ShrinkingError::NotDecomposable(format!(
            "period {period} not divisible by {d}"
        )));
    }
    let t2 = period / d;
    let mut subsequences = Vec::with_capacity(d);
    for k in 0..d {
        let sub = decimate(s, d, k, t2)?;
        subsequences.push(BinarySequence::with_period(sub.bits().to_vec(), t2)?);
    }
    let base = subsequences[0].bits();
    let mut offsets = Vec::with_capacity(d);
    for sub in &subsequences {
        let mut found = None;
        for o in 0..t2 {
            if (0..t2).all(|i| sub.bits()[i] == base[(o + i) % t2]) {
                if found.is_some() {
                    return Err(ShrinkingError::NotDecomposable(
                        "ambiguous shift (subsequence period divides a smaller value)".into(),
                    ));
                }
                found = Some(o as u32);
            }
        }
        match found {
            Some(o) => offsets.push(o),
            None => {
                return Err(ShrinkingError::NotDecomposable(
                    "subsequences are not cyclic shifts of each other".into(),
                ))
            }
        }
    }
    debug_assert_eq!(offsets[0], 0);
    Ok(InterleavedDecomposition {
        d,
        subsequences,
        offsets,
    })
}

/// The unique delta in [1, T2-1] with T1 * delta = 1 mod T2.
pub fn compute_delta(l1: usize, l2: usize) -> Result<u32, ShrinkingError> {
    check_lengths(l1, l2)?;
    let t1 = (1u64 << l1) - 1;
    let t2 = (1u64 << l2) - 1;
    let delta = mod_inverse(t1 % t2, t2)
        .ok_or_else(|| ShrinkingError::InvalidConfig("T1 not invertible mod T2".into()))?;
    if l2 == l1 + 1 {
        debug_assert_eq!(delta, t2 - 2, "delta must equal T2 - 2 when L2 = L1 + 1");
    }
    Ok(delta as u32)
}

/// Decimating the first interleaved m-sequence by delta yields the R2
/// m-sequence `{b_i}`.
pub fn recover_b(
    first_interleaved: &BinarySequence,
    delta: u32,
) -> Result<BinarySequence, ShrinkingError> {
    let t2 = first_interleaved
        .period()
        .unwrap_or(first_interleaved.len());
    Ok(decimate(first_interleaved, delta as usize, 0, t2)?)
}

/// Forward map of the selector's ones positions to interleave offsets:
/// `d_k = delta * i_k mod T2`.
pub fn offsets_from_ones_positions(positions: &[u32], delta: u32, t2: u32) -> Vec<u32> {
    positions
        .iter()
        .map(|&i| (i as u64 * delta as u64 % t2 as u64) as u32)
        .collect()
}

/// Inverse map: `i_k = T1 * d_k mod T2` with `T1 = delta^{-1} mod T2`;
/// every recovered position must land in [0, T1).
pub fn ones_positions_from_offsets(
    offsets: &[u32],
    delta: u32,
    t2: u32,
) -> Result<Vec<u32>, ShrinkingError> {
    let t1 = mod_inverse(delta as u64, t2 as u64)
        .ok_or_else(|| ShrinkingError::InvalidConfig("delta not invertible mod T2".into()))?;
    let mut out = Vec::with_capacity(offsets.len());
    for &d in offsets {
        let i = (t1 * d as u64 % t2 as u64) as u32;
        if i as u64 >= t1 {
            return Err(ShrinkingError::InconsistentOffsets {
                position: i,
                t1: t1 as u32,
            });
        }
        out.push(i);
    }
    Ok(out)
}

/// Builds the selector m-sequence period from its ones positions and checks
/// it really is one.
pub fn recover_a(positions: &[u32], t1: u32) -> Result<BinarySequence, ShrinkingError> {
    if !positions.contains(&0) {
        return Err(ShrinkingError::InvalidConfig(
            "positions must contain 0 (the a_0 = 1 anchor)".into(),
        ));
    }
    let mut bits = vec![false; t1 as usize];
    for &p in positions {
        if p >= t1 {
            return Err(ShrinkingError::InconsistentOffsets { position: p, t1 });
        }
        bits[p as usize] = true;
    }
    if !is_m_sequence_period(&bits) {
        return Err(ShrinkingError::NotAnMSequence);
    }
    BinarySequence::with_period(bits, t1 as usize).map_err(Into::into)
}

/// Characteristic polynomial of the interleaved m-sequences: the minimal
/// polynomial of alpha^T1 over the field defined by p2.
pub fn interleaved_char_poly(
    p2_tables: &FieldTables,
    l1: usize,
) -> Result<BinaryPolynomial, crate::field::FieldError> {
    let t1 = ((1u64 << l1) - 1) % p2_tables.order() as u64;
    crate::field::minimal_polynomial(p2_tables, t1 as u32)
}

/// Linear complexity of a generated shrunken prefix, for bound checks.
pub fn shrunken_lc(s: &BinarySequence) -> (usize, BinaryPolynomial) {
    berlekamp_massey(s)
}
