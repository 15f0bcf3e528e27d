//! Cryptanalysis toolkit for the shrinking generator.
//!
//! The shrunken keystream decomposes into 2^(L1-1) interleaved m-sequences
//! and appears as the leftmost vertical sequence of a linear rule-102
//! cellular automaton. Both structures are linear, so a short intercepted
//! segment pins down far more of the CA than its own length, and an
//! exhaustive search over the 2^(L1-1) anchored selector states recovers the
//! initial states of both registers deterministically.
//!
//! Modules:
//! - [`field`]: GF(2^L) tables, Zech logarithms, cyclotomic cosets, minimal
//!   polynomials.
//! - [`sequences`]: LFSRs, decimation, period detection, Berlekamp-Massey.
//! - [`shrinking`]: the generator, its structural formulas and the
//!   interleaved decomposition.
//! - [`automaton`]: rules 102/60, companion-sequence offsets, triangle
//!   recovery.
//! - [`attack`]: the candidate tester, the parallel exhaustive search, R2
//!   reconstruction and a brute-force oracle.

pub mod attack;
pub mod automaton;
pub mod field;
pub mod sequences;
pub mod shrinking;

pub use attack::{
    brute_force_oracle, exhaustive_attack, recover_r2_state, subcrypto, AttackError, AttackReport,
    CandidateResult, RecoveredBitMatrix,
};
pub use automaton::{
    ca_length_for_shrunken, required_intercept_n, shift_d, triangle_recover, Boundary, CaGrid,
    CaRule, CellularAutomaton, CompanionOffsets,
};
pub use field::{
    cyclotomic_cosets, is_primitive, minimal_polynomial, zech_properties_check, BinaryPolynomial,
    FieldError, FieldTables, PrimitivePolynomial, ZechValue,
};
pub use sequences::{
    berlekamp_massey, decimate, find_period, lfsr_generate, BinarySequence, LfsrConfig,
    SequenceError,
};
pub use shrinking::{
    compute_delta, interleave_decompose, recover_a, recover_b, shrunken_generate, shrunken_period,
    InterleavedDecomposition, ShrinkingError, ShrinkingGeneratorConfig,
};
