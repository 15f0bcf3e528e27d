//! Acceptance suite: one test per published-result criterion, each printing a
//! pass line with its elapsed time (run with `--nocapture` to see them) and
//! asserting its time budget.

use std::time::{Duration, Instant};

use sgcrack::attack::{
    bits_to_string, brute_force_oracle, exhaustive_attack, recover_first_interleaved,
    recover_r2_state, subcrypto, subcrypto_traced, ContradictionSite, Position, PositionStrategy,
};
use sgcrack::automaton::{
    grid_from_leftmost_column, required_intercept_n, triangle_recover, Boundary, CaRule,
    CellularAutomaton, CompanionOffsets,
};
use sgcrack::field::{
    cyclotomic_cosets, is_primitive, zech_properties_check, BinaryPolynomial, FieldTables,
    PrimitivePolynomial, ZechValue,
};
use sgcrack::sequences::{
    berlekamp_massey, decimate, find_period, lfsr_generate, BinarySequence, LfsrConfig,
};
use sgcrack::shrinking::{
    compute_delta, interleave_decompose, ones_positions_from_offsets, recover_a, recover_b,
    shrunken_generate, shrunken_lc_bounds, ShrinkingGeneratorConfig,
};

// ---------------------------------------------------------------- fixtures

const EX1_SHRUNKEN: &str = "11000110101101";

/// The 14x14 rule-102 evolution whose leftmost column is the period-14
/// shrunken sequence (initial state in row 0).
const CA_GRID_14: [&str; 14] = [
    "10101100011101",
    "11110100100110",
    "00011101101011",
    "00100110111101",
    "01101011000111",
    "10111101001001",
    "11000111011010",
    "01001001101111",
    "11011010110001",
    "01101111010010",
    "10110001110110",
    "11010010011011",
    "01110110101100",
    "10011011110100",
];

const EX3_SHRUNKEN_60: &str =
    "100011111010000110010110110011010100001011100011011101011011";

/// Recovered first-interleaved-sequence bits for the surviving state of the
/// ten-bit degree-(6,7) run: (position, bit), ascending.
const RECOVERED_46: [(u32, u8); 46] = [
    (0, 1), (12, 1), (23, 0), (24, 1), (25, 1), (32, 0), (38, 1), (40, 0), (41, 0),
    (43, 1), (45, 1), (47, 0), (48, 1), (49, 0), (50, 1), (52, 1), (53, 1), (54, 1),
    (55, 0), (56, 1), (59, 0), (60, 1), (64, 0), (66, 0), (68, 1), (78, 1), (79, 0),
    (87, 0), (91, 0), (95, 0), (98, 0), (99, 1), (101, 0), (103, 0), (105, 1), (107, 0),
    (108, 1), (109, 0), (110, 0), (111, 0), (112, 1), (114, 0), (115, 0), (117, 0),
    (118, 0), (119, 0),
];

/// GF(2^5) mod 1+x^2+x^5: Zech logarithms of 1..=30.
const GF32_ZECH: [u32; 30] = [
    18, 5, 29, 10, 2, 27, 22, 20, 16, 4, 19, 23, 14, 13, 24, 9, 30, 1, 11, 8, 25, 7, 12,
    15, 21, 28, 6, 26, 3, 17,
];

/// Published attack rows with both degrees at most 10: (p1, p2, n); the
/// published survivor count is 1 for every row.
///
/// KNOWN RED, row 11 (1+x^4+x^9 / 1+x^2+x^5+x^9+x^10, n=19): under the
/// all-ones-keys segment convention this suite runs, the observed count is 4
/// and cannot be 1 for any correct tester. The brute-force oracle finds a
/// complete consistent key for each of the four surviving states — e.g.
/// r1=110111110 with r2=1111111111 regenerates the identical 19-bit segment
/// — so the published count for that row must come from a different
/// (unstated) keystream segment; the count drops to 1 only from n=22 on.
const DESK_ROWS: [(&str, &str, usize); 11] = [
    ("1+x^2+x^3", "1+x^3+x^4", 8),
    ("1+x^2+x^3", "1+x^3+x^5", 9),
    ("1+x^2+x^5", "1+x+x^6", 11),
    ("1+x^3+x^5", "1+x+x^7", 13),
    ("1+x^2+x^5", "1+x^3+x^7", 14),
    ("1+x+x^6", "1+x^3+x^7", 16),
    ("1+x+x^7", "1+x^2+x^3+x^4+x^8", 16),
    ("1+x+x^7", "1+x^4+x^9", 16),
    ("1+x^2+x^3+x^4+x^8", "1+x^4+x^9", 17),
    ("1+x^4+x^9", "1+x^3+x^10", 18),
    ("1+x^4+x^9", "1+x^2+x^5+x^9+x^10", 19),
];

// ----------------------------------------------------------------- helpers

fn pp(s: &str) -> PrimitivePolynomial {
    s.parse().unwrap()
}

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn seq(s: &str) -> BinarySequence {
    s.parse().unwrap()
}

fn cfg(p1: &str, i1: &str, p2: &str, i2: &str) -> ShrinkingGeneratorConfig {
    ShrinkingGeneratorConfig::new(
        LfsrConfig::new(pp(p1), bits(i1)).unwrap(),
        LfsrConfig::new(pp(p2), bits(i2)).unwrap(),
    )
    .unwrap()
}

fn pass(criterion: u32, budget: Duration, started: Instant, detail: &str) {
    let elapsed = started.elapsed();
    println!(
        "[criterion {criterion:2}] PASS in {:>8.3?} (budget {:?}) - {detail}",
        elapsed, budget
    );
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

/// Cyclic shift k with `candidate[i] == base[(k + i) % T]`, if any.
fn cyclic_offset(candidate: &[bool], base: &[bool]) -> Option<usize> {
    let t = base.len();
    (0..t).find(|&k| (0..t).all(|i| candidate[i] == base[(k + i) % t]))
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn bits(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.next() & 1 == 1).collect()
    }

    fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next() as usize) % (hi - lo)
    }
}

/// Every primitive polynomial of the given degree, ascending by coefficient
/// pattern.
fn primitive_polys(degree: usize) -> Vec<PrimitivePolynomial> {
    let mut out = Vec::new();
    for inner in 0..1u64 << (degree.saturating_sub(1)) {
        let mut p = BinaryPolynomial::from_exponents(&[0, degree]);
        for j in 1..degree {
            if inner >> (j - 1) & 1 == 1 {
                p.set_coeff(j, true);
            }
        }
        if is_primitive(&p) {
            out.push(PrimitivePolynomial::new(p).unwrap());
        }
    }
    out
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_period14_generation_and_complexity() {
    let started = Instant::now();
    let g = cfg("1+x+x^2", "11", "1+x+x^3", "111");
    let s = shrunken_generate(&g, 14);
    assert_eq!(s.to_string(), EX1_SHRUNKEN);

    let two_periods = shrunken_generate(&g, 28);
    let est = find_period(&two_periods);
    assert_eq!(est.period, 14);
    assert!(est.confident);

    let (lc, poly) = berlekamp_massey(&s);
    assert_eq!(lc, 6);
    let expected: BinaryPolynomial = "1+x^4+x^6".parse().unwrap();
    assert_eq!(poly, expected);
    let base: BinaryPolynomial = "1+x^2+x^3".parse().unwrap();
    assert_eq!(base.mul(&base), expected);
    pass(1, Duration::from_secs(1), started, "generation, period 14, LC 6");
}

#[test]
fn criterion_02_period60_decomposition_and_register_recovery() {
    let started = Instant::now();
    let g = cfg("1+x+x^3", "100", "1+x+x^4", "1000");
    let s = shrunken_generate(&g, 60);
    assert_eq!(s.to_string(), EX3_SHRUNKEN_60);

    let dec = interleave_decompose(&s, 3).unwrap();
    assert_eq!(dec.offsets, vec![0, 9, 5, 3]);

    let delta = compute_delta(3, 4).unwrap();
    assert_eq!(delta, 13);

    let positions = ones_positions_from_offsets(&dec.offsets, delta, 15).unwrap();
    assert_eq!(positions, vec![0, 3, 5, 6]);
    let a = recover_a(&positions, 7).unwrap();
    assert_eq!(a.to_string(), "1001011");

    let b = recover_b(dec.first(), delta).unwrap();
    assert_eq!(b.to_string(), "100010011010111");
    pass(2, Duration::from_secs(1), started, "offsets {0,9,5,3}, both registers recovered");
}

#[test]
fn criterion_03_zech_tables_and_identity_checks() {
    let started = Instant::now();
    let t8 = FieldTables::build(&"1+x+x^3".parse().unwrap()).unwrap();
    for (x, z) in [(1, 3), (2, 6), (3, 1), (4, 5), (5, 4), (6, 2)] {
        assert_eq!(t8.zech(ZechValue::Finite(x)), Ok(ZechValue::Finite(z)));
    }
    let t32 = FieldTables::build(&"1+x^2+x^5".parse().unwrap()).unwrap();
    assert_eq!(t32.zech(ZechValue::Finite(0)), Ok(ZechValue::MinusInfinity));
    for (i, &z) in GF32_ZECH.iter().enumerate() {
        let x = i as u32 + 1;
        assert_eq!(t32.zech(ZechValue::Finite(x)), Ok(ZechValue::Finite(z)), "x={x}");
    }

    let mut fields = 0;
    for degree in 2..=10 {
        for poly in primitive_polys(degree) {
            let tables = FieldTables::build(poly.as_poly()).unwrap();
            let report = zech_properties_check(&tables);
            assert!(report.is_clean(), "{poly}: {:?}", report.violations);
            fields += 1;
        }
    }
    assert_eq!(fields, 1 + 2 + 2 + 6 + 6 + 18 + 16 + 48 + 60);
    pass(3, Duration::from_secs(5), started, "both reference tables exact; 159 fields clean");
}

#[test]
fn criterion_04_zech_of_one_for_degree_five_polynomials() {
    let started = Instant::now();
    let rows = [
        ("1+x^2+x^5", 18),
        ("1+x+x^2+x^4+x^5", 19),
        ("1+x+x^2+x^3+x^5", 12),
        ("1+x^3+x^5", 14),
        ("1+x+x^3+x^4+x^5", 13),
        ("1+x^2+x^3+x^4+x^5", 20),
    ];
    for (poly, expect) in rows {
        let tables = FieldTables::build(&poly.parse().unwrap()).unwrap();
        assert_eq!(
            tables.zech(ZechValue::Finite(1)),
            Ok(ZechValue::Finite(expect)),
            "{poly}"
        );
    }
    // those six are all the primitive polynomials of degree 5
    assert_eq!(primitive_polys(5).len(), 6);
    pass(4, Duration::from_secs(1), started, "Z(1) = 18,19,12,14,13,20");
}

#[test]
fn criterion_05_ca_model_and_column_shifts() {
    let started = Instant::now();
    let ca = CellularAutomaton::new(CaRule::Rule102, Boundary::Periodic, bits(CA_GRID_14[0]));
    let grid = ca.evolve(14);
    for (r, expect) in CA_GRID_14.iter().enumerate() {
        assert_eq!(grid.rows()[r], bits(expect), "row {r}");
    }
    // the column sequences have period 14: row 14 wraps to row 0
    assert_eq!(grid.rows()[14], grid.rows()[0]);
    let col0: Vec<bool> = (0..14).map(|r| grid.cell(r, 0)).collect();
    assert_eq!(bits_to_string(&col0), EX1_SHRUNKEN);

    // shift arithmetic: d^10 and d^7 via the t*D shortcut over the offsets
    let tables = FieldTables::build(&"1+x^2+x^3".parse().unwrap()).unwrap();
    let s = BinarySequence::with_period(bits(EX1_SHRUNKEN), 14).unwrap();
    let dec = interleave_decompose(&s, 2).unwrap();
    assert_eq!(dec.offsets, vec![0, 5]);
    let d0 = CompanionOffsets::new(0, dec.offsets.clone());
    let d1 = sgcrack::automaton::companion_offsets_step(&d0, &tables).unwrap();
    let d7 = sgcrack::automaton::companion_offsets_shortcut(&d1, 3, 5, 7);
    assert_eq!((d7.column, d7.offsets.clone()), (7, vec![2, 1]));
    let d10 = sgcrack::automaton::companion_offsets_shortcut(&d0, 5, 5, 7);
    assert_eq!((d10.column, d10.offsets.clone()), (10, vec![4, 2]));

    // and against the evolved grid itself: measure each column's interleaved
    // shifts relative to the first interleaved sequence of column 0
    let v = dec.first().bits();
    for (col, expect) in [(7usize, vec![2usize, 1]), (10, vec![4, 2])] {
        let column: Vec<bool> = (0..14).map(|r| grid.cell(r, col)).collect();
        for (k, want) in expect.iter().enumerate() {
            let sub: Vec<bool> = (0..7).map(|j| column[(k + 2 * j) % 14]).collect();
            assert_eq!(cyclic_offset(&sub, v), Some(*want), "column {col} phase {k}");
        }
    }
    pass(5, Duration::from_secs(1), started, "14x14 grid exact; shifts d^7={2,1}, d^10={4,2}");
}

#[test]
fn criterion_06_candidate_test_traces() {
    let started = Instant::now();
    let p1 = pp("1+x+x^3+x^4+x^6");
    let p = pp("1+x^4+x^7");
    let tables = FieldTables::build(p.as_poly()).unwrap();
    let s = seq("1000010000");

    let (rejected, trace) =
        subcrypto_traced(&p1, &tables, 125, &s, &bits("111011"), PositionStrategy::Shortcut)
            .unwrap();
    assert!(!rejected.stop);
    assert_eq!(rejected.contradiction, Some(ContradictionSite::Position(109)));
    let exps = |level: &[Position]| -> Vec<u32> {
        level
            .iter()
            .map(|p| match p {
                Position::Exponent(e) => *e,
                Position::Zero => panic!("unexpected cancelled slot"),
            })
            .collect()
    };
    assert_eq!(exps(&trace[0]), vec![0, 125, 123, 119, 117, 115, 111, 107, 105, 101]);
    assert_eq!(exps(&trace[1]), vec![65, 63, 126, 57, 55, 118, 114, 45, 108]);
    assert_eq!(exps(&trace[2]), vec![3, 111, 109, 122, 103, 121, 97, 93]);
    assert_eq!(exps(&trace[4]), vec![90, 88, 95, 91, 89, 109]);

    let surviving = subcrypto(&p1, &p, 125, &s, &bits("100000")).unwrap();
    assert!(surviving.stop);
    let recovered: Vec<(u32, bool)> = surviving.matrix.iter().collect();
    let expected: Vec<(u32, bool)> = RECOVERED_46.iter().map(|&(p, b)| (p, b == 1)).collect();
    assert_eq!(recovered, expected);
    pass(6, Duration::from_secs(1), started, "contradiction at 109; 46-entry matrix exact");
}

#[test]
fn criterion_07_data_register_recovery() {
    let started = Instant::now();
    let p1 = pp("1+x+x^3+x^4+x^6");
    let p = pp("1+x^4+x^7");
    let s = seq("1000010000");
    let matrix = RECOVERED_46
        .iter()
        .map(|&(pos, b)| (pos, b == 1))
        .collect::<sgcrack::attack::RecoveredBitMatrix>();

    let v = recover_first_interleaved(&matrix, &p).unwrap();
    assert_eq!(v.len(), 127);
    assert!(!v.bits()[46]);
    assert!(v.bits()[51]);
    for (pos, bit) in matrix.iter() {
        assert_eq!(v.bits()[pos as usize], bit, "position {pos}");
    }

    let r2_state = recover_r2_state(&matrix, &p, 125).unwrap();
    // forward check: the surviving selector state plus the recovered data
    // state regenerate the intercepted prefix
    let g = ShrinkingGeneratorConfig::new(
        LfsrConfig::new(p1, bits("100000")).unwrap(),
        LfsrConfig::new(pp("1+x^3+x^7"), r2_state).unwrap(),
    )
    .unwrap();
    assert_eq!(shrunken_generate(&g, 10).bits(), s.bits());
    pass(7, Duration::from_secs(1), started, "v46=0, v51=1; recovered pair regenerates intercept");
}

#[test]
fn criterion_08_published_rows_single_survivor() {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    for (row, (p1s, p2s, n)) in DESK_ROWS.iter().enumerate() {
        let p1 = pp(p1s);
        let p2 = pp(p2s);
        let g = ShrinkingGeneratorConfig::new(
            LfsrConfig::new(p1.clone(), vec![true; p1.degree()]).unwrap(),
            LfsrConfig::new(p2.clone(), vec![true; p2.degree()]).unwrap(),
        )
        .unwrap();
        let s = shrunken_generate(&g, *n);
        let report = exhaustive_attack(&p1, &p2, &s, 0).unwrap();
        assert!(
            report
                .survivors
                .iter()
                .any(|c| c.candidate == vec![true; p1.degree()]),
            "{p1s} / {p2s}: the generating state must always survive"
        );
        if report.survivor_count() != 1 {
            // cross-check with ground truth before declaring a mismatch: how
            // many surviving states possess a complete key generating s?
            let full_keys = brute_force_oracle(&p1, &p2, &s)
                .map(|pairs| {
                    report
                        .survivors
                        .iter()
                        .filter(|c| pairs.iter().any(|(r1, _)| r1 == &c.candidate))
                        .count()
                })
                .ok();
            mismatches.push(format!(
                "row {} ({p1s} / {p2s}, n={n}): observed {} survivors, published 1{}",
                row + 1,
                report.survivor_count(),
                match full_keys {
                    Some(k) => format!("; {k} of them have complete keys regenerating the segment (oracle-verified), so 1 is unattainable for this segment"),
                    None => String::new(),
                },
            ));
        }
    }
    let elapsed = started.elapsed();
    if mismatches.is_empty() {
        pass(8, Duration::from_secs(60), started, "all 11 rows: exactly 1 survivor = true key");
    } else {
        println!(
            "[criterion  8] FAIL in {elapsed:>8.3?} (budget 60s) - {}",
            mismatches.join("; ")
        );
    }
    assert!(elapsed <= Duration::from_secs(60));
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn criterion_09_intercept_requirement_boundary() {
    let started = Instant::now();
    assert_eq!(required_intercept_n(2, 3, 5), 6);
    let s = BinarySequence::with_period(bits(EX1_SHRUNKEN), 14).unwrap();

    let full = triangle_recover(&s.prefix(6), 2, 3, 5).unwrap();
    assert!(full.full);
    let grid = full.grid.unwrap();
    for (r, expect) in CA_GRID_14.iter().enumerate() {
        assert_eq!(grid.rows()[r], bits(expect), "row {r}");
    }

    let partial = triangle_recover(&s.prefix(5), 2, 3, 5).unwrap();
    assert!(!partial.full);
    assert!(partial.grid.is_none());
    pass(9, Duration::from_secs(1), started, "N=6 reconstructs the grid, 5 bits cannot");
}

// ------------------------------------------------------- criterion 10 parts

#[test]
fn criterion_10a_zech_identity_suites() {
    let started = Instant::now();
    let mut cases = 0u64;
    for degree in 2..=6usize {
        for poly in primitive_polys(degree) {
            let t = FieldTables::build(poly.as_poly()).unwrap();
            let q1 = t.order() as u64;
            let z = |x: u64| -> u64 {
                match t.zech(ZechValue::Finite(x as u32)).unwrap() {
                    ZechValue::Finite(v) => v as u64,
                    ZechValue::MinusInfinity => panic!("zech(0) requested"),
                }
            };
            // element identity and involution over the whole range
            for x in 1..q1 {
                let zx = z(x);
                let ex = t.element(x as u32).unwrap();
                assert_eq!(t.element(zx as u32).unwrap(), ex ^ 1);
                assert_eq!(z(zx), x, "involution at {x}");
                assert_eq!(z(2 * x % q1), 2 * zx % q1, "doubling at {x}");
                assert_eq!(z(q1 - x), (zx + q1 - x) % q1, "complement at {x}");
                cases += 4;
            }
            // cosets map onto cosets of the same size
            let partition = cyclotomic_cosets(degree).unwrap();
            for coset in &partition.cosets {
                if coset.leader == 0 {
                    continue;
                }
                let mut image: Vec<u32> = coset.members.iter().map(|&x| z(x as u64) as u32).collect();
                image.sort_unstable();
                let target = partition.coset_of(image[0]).unwrap();
                assert_eq!(image, target.members, "coset {} image", coset.leader);
                assert_eq!(image.len(), coset.members.len());
                cases += 1;
            }
            // pair symmetry: zech(a1-a2)+a2 = zech(a2-a1)+a1
            for a1 in 0..q1 {
                for a2 in 0..q1 {
                    if a1 == a2 {
                        continue;
                    }
                    let left = (z((a1 + q1 - a2) % q1) + a2) % q1;
                    let right = (z((a2 + q1 - a1) % q1) + a1) % q1;
                    assert_eq!(left, right, "pair ({a1},{a2})");
                    cases += 1;
                }
            }
        }
    }
    // triple identity, exhaustively on one field per degree up to 6:
    // beta1 = z(a1-a2)+a2, beta2 = z(a2-a3)+a3, then
    // z(a1-a3)+a3 = z(beta1-beta2)+beta2
    for degree in 2..=6usize {
        let poly = &primitive_polys(degree)[0];
        let t = FieldTables::build(poly.as_poly()).unwrap();
        let q1 = t.order() as u64;
        let z = |x: u64| -> u64 {
            match t.zech(ZechValue::Finite(x as u32)).unwrap() {
                ZechValue::Finite(v) => v as u64,
                ZechValue::MinusInfinity => panic!("zech(0) requested"),
            }
        };
        for a1 in 0..q1 {
            for a2 in 0..q1 {
                if a1 == a2 {
                    continue;
                }
                let beta1 = (z((a1 + q1 - a2) % q1) + a2) % q1;
                for a3 in 0..q1 {
                    if a3 == a2 || a3 == a1 {
                        continue;
                    }
                    let beta2 = (z((a2 + q1 - a3) % q1) + a3) % q1;
                    debug_assert_ne!(beta1, beta2);
                    let left = (z((a1 + q1 - a3) % q1) + a3) % q1;
                    let right = (z((beta1 + q1 - beta2) % q1) + beta2) % q1;
                    assert_eq!(left, right, "triple ({a1},{a2},{a3})");
                    cases += 1;
                }
            }
        }
    }
    assert!(cases >= 1000, "only {cases} cases");
    pass(10, Duration::from_secs(120), started, &format!("zech identities: {cases} cases"));
}

#[test]
fn criterion_10b_ca_linearity_and_mirror() {
    let started = Instant::now();
    let mut rng = XorShift(0x1d872b41_u64 << 16 | 9);
    let mut cases = 0u64;
    for _ in 0..1000 {
        let len = rng.range(1, 65);
        let a = rng.bits(len);
        let b = rng.bits(len);
        let sum: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| x ^ y).collect();
        for rule in [CaRule::Rule102, CaRule::Rule60] {
            for boundary in [Boundary::Periodic, Boundary::Null] {
                let step = |s: &Vec<bool>| {
                    CellularAutomaton::new(rule, boundary, s.clone()).step().state().to_vec()
                };
                let lhs = step(&sum);
                let rhs: Vec<bool> = step(&a).iter().zip(step(&b)).map(|(&x, y)| x ^ y).collect();
                assert_eq!(lhs, rhs, "linearity {rule:?} {boundary:?}");
                cases += 1;
            }
        }
        // mirror: rule 60 on the reversed state is the reversed rule-102 step
        let rev: Vec<bool> = a.iter().rev().copied().collect();
        let fwd = CellularAutomaton::new(CaRule::Rule102, Boundary::Periodic, a.clone())
            .step()
            .state()
            .to_vec();
        let mut mirrored = CellularAutomaton::new(CaRule::Rule60, Boundary::Periodic, rev)
            .step()
            .state()
            .to_vec();
        mirrored.reverse();
        assert_eq!(fwd, mirrored, "mirror identity");
        cases += 1;
    }
    assert!(cases >= 1000);
    pass(10, Duration::from_secs(120), started, &format!("CA linearity/mirror: {cases} cases"));
}

#[test]
fn criterion_10c_attack_oracle_containment() {
    let started = Instant::now();
    let mut cases = 0u64;
    for l1 in 2..=6usize {
        for l2 in 2..=6usize {
            if l1 == l2 || sgcrack::shrinking::gcd(l1 as u64, l2 as u64) != 1 {
                continue;
            }
            let p1s = primitive_polys(l1);
            let p2s = primitive_polys(l2);
            for p1 in p1s.iter().take(3) {
                for p2 in p2s.iter().take(3) {
                    let n1 = (1u64 << l1) - 1;
                    let n2 = (1u64 << l2) - 1;
                    let mut k2 = 1u64;
                    for half in 0..2u64 {
                    for k1 in 1..=n1 {
                        let state1: Vec<bool> = (0..l1).rev().map(|i| k1 >> i & 1 == 1).collect();
                        if !state1[0] {
                            continue; // anchored selector states only
                        }
                        k2 = (k2 + half * 3) % n2 + 1;
                        let state2: Vec<bool> = (0..l2).rev().map(|i| k2 >> i & 1 == 1).collect();
                        let g = ShrinkingGeneratorConfig::new(
                            LfsrConfig::new(p1.clone(), state1.clone()).unwrap(),
                            LfsrConfig::new(p2.clone(), state2.clone()).unwrap(),
                        )
                        .unwrap();
                        let n = l1 + l2;
                        let s = shrunken_generate(&g, 2 * n);
                        let short = s.prefix(n);

                        let report = exhaustive_attack(p1, p2, &short, 1).unwrap();
                        assert!(
                            report.survivors.iter().any(|c| c.candidate == state1),
                            "true state must survive ({p1}/{p2} keys {k1},{k2})"
                        );
                        let longer = exhaustive_attack(p1, p2, &s, 1).unwrap();
                        assert!(
                            longer.survivor_count() <= report.survivor_count(),
                            "more bits cannot add survivors"
                        );

                        let oracle = brute_force_oracle(p1, p2, &short).unwrap();
                        for (surv, r2) in report.survivors.iter().zip(&report.recovered_r2_states)
                        {
                            if let Some(r2) = r2 {
                                assert!(
                                    oracle.contains(&(surv.candidate.clone(), r2.clone())),
                                    "survivor pair outside oracle set ({p1}/{p2})"
                                );
                            }
                        }
                        cases += 1;
                    }
                    }
                }
            }
        }
    }
    assert!(cases >= 1000, "only {cases} configurations");
    pass(10, Duration::from_secs(120), started, &format!("attack/oracle containment: {cases} configs"));
}

#[test]
fn criterion_10d_decompose_recover_round_trips() {
    let started = Instant::now();
    let mut cases = 0u64;
    for l1 in 2..=7usize {
        for l2 in (l1 + 1)..=8usize {
            if sgcrack::shrinking::gcd(l1 as u64, l2 as u64) != 1 {
                continue;
            }
            let t = (1usize << (l1 - 1)) * ((1usize << l2) - 1);
            let p1 = &primitive_polys(l1)[0];
            let p2 = &primitive_polys(l2)[0];
            let n1 = (1u64 << l1) - 1;
            let n2 = (1u64 << l2) - 1;
            let key_budget = match t {
                0..=600 => 160,
                601..=2100 => 48,
                2101..=5000 => 6,
                _ => 1,
            }
            .min((n1 * n2) as usize);
            let per_k1 = key_budget.div_ceil(n1 as usize).max(1);
            let t1 = n1 as usize;
            let t2 = n2 as usize;
            let mut produced = 0;
            let mut k2 = 0u64;
            'keys: for k1 in 1..=n1 {
                for _ in 0..per_k1 {
                    k2 = k2 % n2 + 1;
                    let state1: Vec<bool> = (0..l1).rev().map(|i| k1 >> i & 1 == 1).collect();
                    let state2: Vec<bool> = (0..l2).rev().map(|i| k2 >> i & 1 == 1).collect();
                    let g = ShrinkingGeneratorConfig::new(
                        LfsrConfig::new(p1.clone(), state1).unwrap(),
                        LfsrConfig::new(p2.clone(), state2).unwrap(),
                    )
                    .unwrap();
                    let s = shrunken_generate(&g, t);

                    let dec = interleave_decompose(&s, l1).unwrap();
                    assert_eq!(dec.d, 1 << (l1 - 1));
                    let delta = compute_delta(l1, l2).unwrap();

                    // selector recovery, anchored at the first emitted one
                    let positions =
                        ones_positions_from_offsets(&dec.offsets, delta, t2 as u32).unwrap();
                    assert_eq!(positions.len(), 1 << (l1 - 1));
                    let a_recovered = recover_a(&positions, t1 as u32).unwrap();
                    let a_true = lfsr_generate(g.r1(), 2 * t1);
                    let i0 = a_true.bits().iter().position(|&b| b).unwrap();
                    let a_expected: Vec<bool> =
                        (0..t1).map(|i| a_true.bits()[i0 + i]).collect();
                    assert_eq!(a_recovered.bits(), &a_expected[..]);

                    // data-register recovery, same anchor
                    let b_recovered = recover_b(dec.first(), delta).unwrap();
                    let b_true = lfsr_generate(g.r2(), 2 * t2);
                    let b_expected: Vec<bool> =
                        (0..t2).map(|i| b_true.bits()[(i0 + i) % t2]).collect();
                    assert_eq!(b_recovered.bits(), &b_expected[..]);

                    // interleaving the decimations back rebuilds the sequence
                    let d = dec.d;
                    let rebuilt: Vec<bool> = (0..t)
                        .map(|i| dec.subsequences[i % d].bits()[i / d])
                        .collect();
                    assert_eq!(rebuilt, s.bits());

                    cases += 1;
                    produced += 1;
                    if produced >= key_budget {
                        break 'keys;
                    }
                }
            }
        }
    }
    assert!(cases >= 400, "only {cases} cases");
    pass(10, Duration::from_secs(120), started, &format!("decompose/recover round trips: {cases} cases"));
}

#[test]
fn criterion_10e_structural_complexity_bounds() {
    let started = Instant::now();
    let mut cases = 0u64;
    for (l1, l2) in [(2usize, 3usize), (2, 5), (2, 7), (3, 4), (3, 5), (3, 7), (4, 5), (5, 6)] {
        for p1 in primitive_polys(l1) {
            for p2 in primitive_polys(l2) {
                let g = ShrinkingGeneratorConfig::new(
                    LfsrConfig::new(p1.clone(), vec![true; l1]).unwrap(),
                    LfsrConfig::new(p2.clone(), vec![true; l2]).unwrap(),
                )
                .unwrap();
                let t = g.period() as usize;
                let s = shrunken_generate(&g, 2 * t);
                let (lc, char_poly) = berlekamp_massey(&s);
                let (lo, hi) = shrunken_lc_bounds(l1, l2).unwrap();
                assert!(
                    (lo..=hi).contains(&(lc as u64)),
                    "{p1}/{p2}: LC {lc} outside [{lo}, {hi}]"
                );
                assert_eq!(lc % l2, 0, "LC must be a multiple of L2");

                // characteristic polynomial is p(x)^L for the interleaved p
                let p2_tables = FieldTables::build(p2.as_poly()).unwrap();
                let p = sgcrack::shrinking::interleaved_char_poly(&p2_tables, l1).unwrap();
                let l = lc / l2;
                let mut power = BinaryPolynomial::one();
                for _ in 0..l {
                    power = power.mul(&p);
                }
                assert_eq!(char_poly, power, "{p1}/{p2}");

                // every interleaved subsequence has characteristic polynomial p
                let dec = interleave_decompose(&s.prefix(t), l1).unwrap();
                for sub in &dec.subsequences {
                    let doubled: Vec<bool> =
                        sub.bits().iter().chain(sub.bits()).copied().collect();
                    let (sub_lc, sub_poly) = berlekamp_massey(&BinarySequence::new(doubled));
                    assert_eq!(sub_lc, l2);
                    assert_eq!(sub_poly, p);
                    cases += 1;
                }
                cases += 1;
            }
        }
    }
    assert!(cases >= 500, "only {cases} cases");
    pass(10, Duration::from_secs(120), started, &format!("LC bounds and char polys: {cases} cases"));
}

#[test]
fn criterion_10f_ca_model_round_trip() {
    let started = Instant::now();
    // for every coprime pair with L1, L2 <= 5: the CA of the computed length
    // seeded from the shrunken sequence reproduces it in column 0, and every
    // column t*2^(L1-1) is the shrunken sequence advanced t*D positions
    let mut cases = 0u64;
    for (l1, l2) in [(2usize, 3usize), (2, 5), (3, 4), (3, 5), (4, 5), (5, 4), (4, 3), (3, 2), (5, 2), (5, 3)] {
        let p1 = &primitive_polys(l1)[0];
        let p2 = &primitive_polys(l2)[0];
        let g = ShrinkingGeneratorConfig::new(
            LfsrConfig::new(p1.clone(), vec![true; l1]).unwrap(),
            LfsrConfig::new(p2.clone(), vec![true; l2]).unwrap(),
        )
        .unwrap();
        let t = g.period() as usize;
        let s = shrunken_generate(&g, t);
        let p2_tables = FieldTables::build(p2.as_poly()).unwrap();
        let p = sgcrack::shrinking::interleaved_char_poly(&p2_tables, l1).unwrap();
        let p_tables = FieldTables::build(&p).unwrap();
        let zech1 = match p_tables.zech(ZechValue::Finite(1)).unwrap() {
            ZechValue::Finite(z) => z,
            ZechValue::MinusInfinity => unreachable!(),
        };
        let width = sgcrack::automaton::ca_length_for_shrunken(t as u64, l2, zech1) as usize;
        let grid = grid_from_leftmost_column(&s, width);
        let ca = CellularAutomaton::new(CaRule::Rule102, Boundary::Periodic, grid.rows()[0].clone());
        let evolved = ca.evolve(t - 1);
        assert_eq!(evolved.rows(), grid.rows(), "({l1},{l2}) grid evolution");
        let col0: Vec<bool> = (0..t).map(|r| grid.cell(r, 0)).collect();
        assert_eq!(col0, s.bits(), "({l1},{l2}) column 0");

        let d = 1usize << (l1 - 1);
        let d_shift = sgcrack::automaton::shift_d(l1, zech1) as usize;
        for strip in 1..width / d {
            let col = strip * d;
            for r in 0..t {
                assert_eq!(
                    grid.cell(r, col),
                    s.bits()[(r + strip * d_shift) % t],
                    "({l1},{l2}) column {col} row {r}"
                );
            }
            cases += 1;
        }
        // decimating by d with gcd(d, T2) = 1 keeps the subsequence period T2
        let t2 = (1usize << l2) - 1;
        let sub = decimate(&s, d, 0, t2).unwrap();
        let doubled: Vec<bool> = sub.bits().iter().chain(sub.bits()).copied().collect();
        assert_eq!(find_period(&BinarySequence::new(doubled)).period, t2);
        cases += 1;
    }
    assert!(cases >= 40, "only {cases} cases");
    pass(10, Duration::from_secs(120), started, &format!("CA model round trips: {cases} strips"));
}
