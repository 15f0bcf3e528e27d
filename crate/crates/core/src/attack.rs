//! Consistency testing of R1 initial states against an intercepted keystream
//! segment, parallel exhaustive search, R2 state reconstruction, and a
//! brute-force oracle for ground truth at desk scale.
//!
//! The tester walks the intercepted bits down the CA columns: each round XORs
//! adjacent bits (one rule-102 column step) and advances their positions in
//! the first interleaved m-sequence through the Zech relation
//! `P_k' = Z(P_k - P_{k+1}) + P_{k+1}`, storing every (position, bit) pair.
//! Two different bits at one position disqualify the candidate.

use std::collections::BTreeMap;
use std::thread;
use std::time::{Duration, Instant};

use crate::field::{
    minimal_polynomial, FieldError, FieldTables, PrimitivePolynomial, ZechResolver, ZechStats,
};
use crate::sequences::{lfsr_generate, BinarySequence, LfsrConfig, SequenceError};
use crate::shrinking::{compute_delta, gcd, shrink_with_selector, ShrinkingError};

/// Desk-scale cap on the oracle's key space.
pub const ORACLE_SPACE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttackError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bad candidate: {0}")]
    BadCandidate(String),
    #[error("intercepted segment must hold at least 2 bits")]
    InterceptTooShort,
    #[error("key space {space} exceeds the oracle's desk-scale limit {limit}")]
    SearchSpaceTooLarge { space: u64, limit: u64 },
    #[error("recovered bits never close a window of consecutive known positions")]
    InsufficientBits,
    #[error("recovered bits are mutually inconsistent around position {0}")]
    InconsistentRecoveredBits(u32),
    #[error("closure produced the all-zero sequence; no register state emits it")]
    ZeroSequenceRecovered,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Shrinking(#[from] ShrinkingError),
}

/// A working-sequence position: an exponent into the first interleaved
/// m-sequence, or the zero field element (two coinciding shifts cancelled).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Exponent(u32),
    Zero,
}

/// How subsequent position lists are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionStrategy {
    /// Every round through the Zech relation.
    ZechOnly,
    /// Rounds at column t*2^(L1-1)+m reuse the column-m list plus t*D.
    Shortcut,
}

/// Where a candidate was disqualified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContradictionSite {
    /// Conflicting bits stored at this interleaved-sequence position.
    Position(u32),
    /// A cancelled (zero-element) slot demanded a nonzero bit.
    DegenerateZero,
}

/// An (R1 state, R2 state) pair, as the oracle reports them.
pub type KeyPair = (Vec<bool>, Vec<bool>);

type SubcryptoOutput = (CandidateResult, Option<Vec<Vec<Position>>>);

/// Sorted position -> bit record of recovered first-interleaved-sequence bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecoveredBitMatrix {
    entries: BTreeMap<u32, bool>,
}

impl RecoveredBitMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores a bit; `Err(position)` on a conflicting existing bit. Storing
    /// an equal bit again is not a contradiction.
    pub fn store(&mut self, position: u32, bit: bool) -> Result<(), u32> {
        match self.entries.get(&position) {
            Some(&old) if old != bit => Err(position),
            _ => {
                self.entries.insert(position, bit);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, position: u32) -> Option<bool> {
        self.entries.get(&position).copied()
    }

    /// (position, bit) pairs in ascending position order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.entries.iter().map(|(&p, &b)| (p, b))
    }
}

impl FromIterator<(u32, bool)> for RecoveredBitMatrix {
    fn from_iter<I: IntoIterator<Item = (u32, bool)>>(iter: I) -> Self {
        RecoveredBitMatrix {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Outcome of testing one R1 initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateResult {
    /// The tested state, leading bit 1.
    pub candidate: Vec<bool>,
    /// True when no contradiction was found.
    pub stop: bool,
    /// Recovered bits; cleared when a contradiction disqualified the state.
    pub matrix: RecoveredBitMatrix,
    pub contradiction: Option<ContradictionSite>,
    pub rounds_executed: usize,
    pub zech_stats: ZechStats,
}

/// Tests an R1 initial state against the intercepted segment.
///
/// `p` is the characteristic polynomial of the interleaved m-sequences
/// (degree L2) and `delta` the decimation distance recovering `{b_i}`.
pub fn subcrypto(
    p1: &PrimitivePolynomial,
    p: &PrimitivePolynomial,
    delta: u32,
    s: &BinarySequence,
    candidate: &[bool],
) -> Result<CandidateResult, AttackError> {
    let tables = FieldTables::build(p.as_poly())?;
    let (result, _) = subcrypto_with_tables(
        p1,
        &tables,
        delta,
        s,
        candidate,
        PositionStrategy::Shortcut,
        false,
    )?;
    Ok(result)
}

/// [`subcrypto`] that also returns the per-round position lists
/// (trace[j] = positions of round j's working bits).
pub fn subcrypto_traced(
    p1: &PrimitivePolynomial,
    tables: &FieldTables,
    delta: u32,
    s: &BinarySequence,
    candidate: &[bool],
    strategy: PositionStrategy,
) -> Result<(CandidateResult, Vec<Vec<Position>>), AttackError> {
    let (result, trace) = subcrypto_with_tables(p1, tables, delta, s, candidate, strategy, true)?;
    Ok((result, trace.expect("trace requested")))
}

fn subcrypto_with_tables(
    p1: &PrimitivePolynomial,
    tables: &FieldTables,
    delta: u32,
    s: &BinarySequence,
    candidate: &[bool],
    strategy: PositionStrategy,
    keep_trace: bool,
) -> Result<SubcryptoOutput, AttackError> {
    let l1 = p1.degree();
    if candidate.len() != l1 {
        return Err(AttackError::BadCandidate(format!(
            "state has {} bits, register degree is {l1}",
            candidate.len()
        )));
    }
    if !candidate[0] {
        return Err(AttackError::BadCandidate(
            "leading bit must be 1 (a_0 = 1 anchoring)".into(),
        ));
    }
    let n = s.len();
    if n < 2 {
        return Err(AttackError::InterceptTooShort);
    }
    let t2 = tables.order() as u64;
    let d = 1usize << (l1 - 1);
    let t1 = (1u64 << l1) - 1;

    // selector bits until n ones appear: each T1 window holds exactly d ones
    let windows = n as u64 / d as u64 + 2;
    let selector = lfsr_generate(
        &LfsrConfig::new(p1.clone(), candidate.to_vec())?,
        (windows * t1) as usize,
    );
    let one_indices: Vec<u64> = selector
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .take(n)
        .collect();
    debug_assert_eq!(one_indices.len(), n);

    let mut positions: Vec<Position> = one_indices
        .iter()
        .map(|&i| Position::Exponent((i * delta as u64 % t2) as u32))
        .collect();
    let mut bits: Vec<bool> = s.bits().to_vec();

    let mut matrix = RecoveredBitMatrix::new();
    let mut resolver = ZechResolver::new(tables);
    let mut trace: Option<Vec<Vec<Position>>> = keep_trace.then(|| vec![positions.clone()]);
    // base position lists for columns 0..d-1, reused by the t*D shortcut
    let mut base_levels: Vec<Vec<Position>> = Vec::new();
    if strategy == PositionStrategy::Shortcut {
        base_levels.push(positions.clone());
    }

    let finish = |stop: bool,
                  matrix: RecoveredBitMatrix,
                  contradiction: Option<ContradictionSite>,
                  rounds: usize,
                  stats: ZechStats,
                  trace: Option<Vec<Vec<Position>>>| {
        Ok((
            CandidateResult {
                candidate: candidate.to_vec(),
                stop,
                matrix,
                contradiction,
                rounds_executed: rounds,
                zech_stats: stats,
            },
            trace,
        ))
    };

    // round 0: store the intercepted bits at their interleaved positions
    for (&pos, &bit) in positions.iter().zip(bits.iter()) {
        let Position::Exponent(p) = pos else { unreachable!() };
        if matrix.store(p, bit).is_err() {
            return finish(
                false,
                RecoveredBitMatrix::new(),
                Some(ContradictionSite::Position(p)),
                0,
                resolver.stats(),
                trace,
            );
        }
    }

    for round in 1..n {
        bits = bits.windows(2).map(|w| w[0] ^ w[1]).collect();
        let len = n - round;
        positions = if strategy == PositionStrategy::Shortcut && round >= d {
            let (t, m) = (round / d, round % d);
            let big_d = resolver.zech_nonzero(1) as u64;
            let shift = t as u64 * big_d % t2;
            base_levels[m][..len]
                .iter()
                .map(|&p| match p {
                    Position::Exponent(e) => {
                        Position::Exponent(((e as u64 + shift) % t2) as u32)
                    }
                    Position::Zero => Position::Zero,
                })
                .collect()
        } else {
            let mut next = Vec::with_capacity(len);
            for w in positions.windows(2) {
                next.push(match (w[0], w[1]) {
                    (Position::Zero, p) | (p, Position::Zero) => p,
                    (Position::Exponent(a), Position::Exponent(b)) => {
                        if a == b {
                            Position::Zero
                        } else {
                            let diff = ((a as u64 + t2 - b as u64) % t2) as u32;
                            let z = resolver.zech_nonzero(diff) as u64;
                            Position::Exponent(((z + b as u64) % t2) as u32)
                        }
                    }
                });
            }
            next
        };
        if strategy == PositionStrategy::Shortcut && round < d {
            base_levels.push(positions.clone());
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(positions.clone());
        }
        for (&pos, &bit) in positions.iter().zip(bits.iter()) {
            match pos {
                Position::Zero => {
                    // cancelled slot: the bit is forced to 0
                    if bit {
                        return finish(
                            false,
                            RecoveredBitMatrix::new(),
                            Some(ContradictionSite::DegenerateZero),
                            round,
                            resolver.stats(),
                            trace,
                        );
                    }
                }
                Position::Exponent(p) => {
                    if matrix.store(p, bit).is_err() {
                        return finish(
                            false,
                            RecoveredBitMatrix::new(),
                            Some(ContradictionSite::Position(p)),
                            round,
                            resolver.stats(),
                            trace,
                        );
                    }
                }
            }
        }
    }
    finish(true, matrix, None, n - 1, resolver.stats(), trace)
}

/// Fills missing first-interleaved-sequence bits through the degree-L2
/// recurrence of `p` until the whole period closes, then reads off R2's
/// initial state as `{v_0, v_delta, v_2delta, ...}`.
pub fn recover_r2_state(
    matrix: &RecoveredBitMatrix,
    p: &PrimitivePolynomial,
    delta: u32,
) -> Result<Vec<bool>, AttackError> {
    let l2 = p.degree();
    let t2 = (1usize << l2) - 1;
    let taps = p.as_poly().exponents(); // includes 0 and l2
    let mut v: Vec<Option<bool>> = vec![None; t2];
    for (pos, bit) in matrix.iter() {
        if pos as usize >= t2 {
            return Err(AttackError::InvalidConfig(format!(
                "matrix position {pos} outside period {t2}"
            )));
        }
        v[pos as usize] = Some(bit);
    }
    let mut changed = true;
    while changed {
        changed = false;
        'relations: for i in 0..t2 {
            let mut unknown: Option<usize> = None;
            let mut acc = false;
            for &j in &taps {
                let idx = (i + j) % t2;
                match v[idx] {
                    Some(b) => acc ^= b,
                    None => {
                        if unknown.replace(idx).is_some() {
                            continue 'relations;
                        }
                    }
                }
            }
            match unknown {
                Some(idx) => {
                    v[idx] = Some(acc);
                    changed = true;
                }
                None => {
                    if acc {
                        return Err(AttackError::InconsistentRecoveredBits(i as u32));
                    }
                }
            }
        }
    }
    if v.iter().any(|b| b.is_none()) {
        return Err(AttackError::InsufficientBits);
    }
    let v: Vec<bool> = v.into_iter().map(|b| b.unwrap()).collect();
    if v.iter().all(|&b| !b) {
        // fully determined but all-zero: no register emits this, the
        // surviving candidate was spurious
        return Err(AttackError::ZeroSequenceRecovered);
    }
    Ok((0..l2)
        .map(|j| v[(j as u64 * delta as u64 % t2 as u64) as usize])
        .collect())
}

/// The full first interleaved sequence recovered by matrix closure, for
/// callers that want the period itself rather than the register state.
pub fn recover_first_interleaved(
    matrix: &RecoveredBitMatrix,
    p: &PrimitivePolynomial,
) -> Result<BinarySequence, AttackError> {
    let l2 = p.degree();
    let t2 = (1usize << l2) - 1;
    let state = recover_r2_state(matrix, p, 1)?; // delta=1 reads v_0..v_{l2-1}
    // regenerate the whole period from the leading window
    let mut bits = state;
    let taps = p.as_poly().exponents();
    while bits.len() < t2 {
        let i = bits.len() - l2;
        let mut acc = false;
        for &j in &taps {
            if j < l2 {
                acc ^= bits[i + j];
            }
        }
        bits.push(acc);
    }
    BinarySequence::with_period(bits, t2).map_err(Into::into)
}

/// Summary of one exhaustive run over all 2^(L1-1) candidate states.
#[derive(Debug, Clone)]
pub struct AttackReport {
    pub p1: PrimitivePolynomial,
    pub p2: PrimitivePolynomial,
    pub interleaved_poly: PrimitivePolynomial,
    pub delta: u32,
    pub period: u64,
    pub n_intercepted: usize,
    pub candidates_tested: u64,
    /// Candidates that survived without contradiction, ascending.
    pub survivors: Vec<CandidateResult>,
    /// One entry per survivor: the reconstructed R2 state where derivable.
    pub recovered_r2_states: Vec<Option<Vec<bool>>>,
    pub zech_stats: ZechStats,
    pub wall_time: Duration,
    pub worker_count: usize,
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl AttackReport {
    pub fn survivor_count(&self) -> usize {
        self.survivors.len()
    }

    /// The published report shape; every field except `elapsed_ms` is
    /// deterministic for fixed inputs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": {
                "p1": self.p1.to_string(),
                "p2": self.p2.to_string(),
                "l1": self.p1.degree(),
                "l2": self.p2.degree(),
                "interleaved_poly": self.interleaved_poly.to_string(),
                "delta": self.delta,
                "period": self.period,
            },
            "n": self.n_intercepted,
            "survivor_count": self.survivor_count(),
            "survivors": self.survivors.iter().zip(&self.recovered_r2_states).map(|(s, r2)| {
                serde_json::json!({
                    "state": bits_to_string(&s.candidate),
                    "contradiction": serde_json::Value::Null,
                    "recovered_r2": r2.as_ref().map(|v| bits_to_string(v)),
                })
            }).collect::<Vec<_>>(),
            "zech_lookups_total": self.zech_stats.total(),
            "elapsed_ms": self.wall_time.as_millis() as u64,
            "worker_count": self.worker_count,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }
}

fn candidate_state(l1: usize, v: u64) -> Vec<bool> {
    let mut state = Vec::with_capacity(l1);
    state.push(true);
    for i in (0..l1 - 1).rev() {
        state.push(v >> i & 1 == 1);
    }
    state
}

fn full_state(l: usize, v: u64) -> Vec<bool> {
    (0..l).rev().map(|i| v >> i & 1 == 1).collect()
}

#[derive(Default)]
struct WorkerOutput {
    survivors: Vec<CandidateResult>,
    stats: ZechStats,
}

/// Runs [`subcrypto`] over every R1 state with leading bit 1, split into
/// contiguous ranges across `workers` threads (0 = available parallelism).
/// Survivors are reported in ascending state order regardless of scheduling.
pub fn exhaustive_attack(
    p1: &PrimitivePolynomial,
    p2: &PrimitivePolynomial,
    s: &BinarySequence,
    workers: usize,
) -> Result<AttackReport, AttackError> {
    let started = Instant::now();
    let (l1, l2) = (p1.degree(), p2.degree());
    if l1 < 2 || gcd(l1 as u64, l2 as u64) != 1 {
        return Err(AttackError::InvalidConfig(format!(
            "register degrees ({l1}, {l2}) must be coprime with L1 >= 2"
        )));
    }
    if s.len() < 2 {
        return Err(AttackError::InterceptTooShort);
    }
    let delta = compute_delta(l1, l2)?;
    let p2_tables = FieldTables::build(p2.as_poly())?;
    let t1 = ((1u64 << l1) - 1) % p2_tables.order() as u64;
    let p = PrimitivePolynomial::new(minimal_polynomial(&p2_tables, t1 as u32)?)
        .map_err(|e| AttackError::InvalidConfig(format!("interleaved polynomial: {e}")))?;
    let tables = FieldTables::build(p.as_poly())?;

    let total = 1u64 << (l1 - 1);
    let worker_count = if workers == 0 {
        thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        workers
    }
    .min(total as usize)
    .max(1);
    let chunk = total.div_ceil(worker_count as u64);

    let tables_ref = &tables;
    let outputs: Vec<WorkerOutput> = thread::scope(|scope| {
        let handles: Vec<_> = (0..worker_count)
            .map(|w| {
                let lo = w as u64 * chunk;
                let hi = ((w as u64 + 1) * chunk).min(total);
                scope.spawn(move || {
                    let mut out = WorkerOutput::default();
                    for v in lo..hi {
                        let state = candidate_state(l1, v);
                        let (res, _) = subcrypto_with_tables(
                            p1,
                            tables_ref,
                            delta,
                            s,
                            &state,
                            PositionStrategy::Shortcut,
                            false,
                        )
                        .expect("inputs validated before dispatch");
                        out.stats.merge(res.zech_stats);
                        if res.stop {
                            out.survivors.push(res);
                        }
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("attack worker panicked"))
            .collect()
    });

    let mut survivors = Vec::new();
    let mut stats = ZechStats::default();
    for out in outputs {
        survivors.extend(out.survivors);
        stats.merge(out.stats);
    }
    let recovered_r2_states = survivors
        .iter()
        .map(|s| recover_r2_state(&s.matrix, &p, delta).ok())
        .collect();

    Ok(AttackReport {
        p1: p1.clone(),
        p2: p2.clone(),
        interleaved_poly: p,
        delta,
        period: (1u64 << (l1 - 1)) * ((1u64 << l2) - 1),
        n_intercepted: s.len(),
        candidates_tested: total,
        survivors,
        recovered_r2_states,
        zech_stats: stats,
        wall_time: started.elapsed(),
        worker_count,
    })
}

/// Enumerates every nonzero state pair and keeps those whose shrunken output
/// begins with `s`. Exact, no heuristics; guarded to desk scale.
pub fn brute_force_oracle(
    p1: &PrimitivePolynomial,
    p2: &PrimitivePolynomial,
    s: &BinarySequence,
) -> Result<Vec<KeyPair>, AttackError> {
    let (l1, l2) = (p1.degree(), p2.degree());
    let (n1, n2) = ((1u64 << l1) - 1, (1u64 << l2) - 1);
    let space = n1 * n2;
    if space > ORACLE_SPACE_LIMIT {
        return Err(AttackError::SearchSpaceTooLarge {
            space,
            limit: ORACLE_SPACE_LIMIT,
        });
    }
    let n = s.len();
    let d = 1u64 << (l1 - 1);
    let len = ((n as u64 / d + 2) * n1) as usize;
    let mut matches = Vec::new();
    for v1 in 1..=n1 {
        let state1 = full_state(l1, v1);
        let a = lfsr_generate(&LfsrConfig::new(p1.clone(), state1.clone())?, len);
        for v2 in 1..=n2 {
            let state2 = full_state(l2, v2);
            let b = lfsr_generate(&LfsrConfig::new(p2.clone(), state2.clone())?, len);
            let out = shrink_with_selector(&a, &b, n)?;
            if out.bits() == s.bits() {
                matches.push((state1.clone(), state2));
            }
        }
    }
    Ok(matches)
}
