//! Linear elementary cellular automata (rules 102 and 60), the CA model of
//! the shrunken sequence, companion-sequence offset arithmetic, and
//! triangle-based sequence recovery from a short intercepted prefix.

use crate::field::{FieldTables, ZechValue};
use crate::sequences::BinarySequence;
use crate::shrinking::gcd;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("column {col} out of range for width {width}")]
    ColumnOutOfRange { col: usize, width: usize },
    #[error("degenerate difference: offsets {0} and {1} coincide")]
    DegenerateDifference(u32, u32),
    #[error("recovered triangles disagree at row {row}, column {col}")]
    TriangleConflict { row: usize, col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaRule {
    /// x_i' = x_i + x_{i+1}
    Rule102,
    /// x_i' = x_{i-1} + x_i
    Rule60,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Extreme cells are adjacent.
    Periodic,
    /// Zero cells beyond both edges.
    Null,
}

/// One-dimensional linear CA state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellularAutomaton {
    pub rule: CaRule,
    pub boundary: Boundary,
    state: Vec<bool>,
}

impl CellularAutomaton {
    pub fn new(rule: CaRule, boundary: Boundary, state: Vec<bool>) -> Self {
        assert!(!state.is_empty(), "CA state must be non-empty");
        CellularAutomaton {
            rule,
            boundary,
            state,
        }
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state(&self) -> &[bool] {
        &self.state
    }

    /// One synchronous update of every cell.
    pub fn step(&self) -> CellularAutomaton {
        let n = self.state.len();
        let at = |i: i64| -> bool {
            if (0..n as i64).contains(&i) {
                self.state[i as usize]
            } else {
                match self.boundary {
                    Boundary::Periodic => self.state[i.rem_euclid(n as i64) as usize],
                    Boundary::Null => false,
                }
            }
        };
        let state = (0..n as i64)
            .map(|i| match self.rule {
                CaRule::Rule102 => at(i) ^ at(i + 1),
                CaRule::Rule60 => at(i - 1) ^ at(i),
            })
            .collect();
        CellularAutomaton {
            rule: self.rule,
            boundary: self.boundary,
            state,
        }
    }

    /// Rows 0..=steps: the initial state followed by each iterate.
    pub fn evolve(&self, steps: usize) -> CaGrid {
        assert!(steps >= 1);
        let mut rows = Vec::with_capacity(steps + 1);
        rows.push(self.state.clone());
        let mut cur = self.clone();
        for _ in 0..steps {
            cur = cur.step();
            rows.push(cur.state.clone());
        }
        CaGrid { rows }
    }
}

/// Dense row-major evolution grid; row t is the t-th iterate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaGrid {
    rows: Vec<Vec<bool>>,
}

impl CaGrid {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        assert!(!rows.is_empty());
        let w = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == w));
        CaGrid { rows }
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.rows[row][col]
    }

    /// Column `col` top-down.
    pub fn column(&self, col: usize) -> Result<BinarySequence, AutomatonError> {
        if col >= self.width() {
            return Err(AutomatonError::ColumnOutOfRange {
                col,
                width: self.width(),
            });
        }
        Ok(BinarySequence::new(
            self.rows.iter().map(|r| r[col]).collect(),
        ))
    }

    /// One '0'/'1' row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for &b in row {
                out.push(if b { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Plain PBM (P1) export, 1 = black.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.width(), self.height());
        for row in &self.rows {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Column `col` of an evolution grid.
pub fn vertical_sequence(grid: &CaGrid, col: usize) -> Result<BinarySequence, AutomatonError> {
    grid.column(col)
}

/// Width of the 102-CA that produces a period-T shrunken sequence:
/// T / gcd(2^L2 - 1, D) with D the Zech logarithm of 1.
pub fn ca_length_for_shrunken(t: u64, l2: usize, d_ca: u32) -> u64 {
    t / gcd((1u64 << l2) - 1, d_ca as u64)
}

/// Column-to-column displacement of repeated sequences: D = 2^(L1-1) * Z(1).
pub fn shift_d(l1: usize, zech1: u32) -> u64 {
    (1u64 << (l1 - 1)) * zech1 as u64
}

/// Number of shrunken-sequence bits needed for the recovered triangles to
/// overlap: N = 2^(L1-1) (2^L2 - Z(1)).
pub fn required_intercept_n(l1: usize, l2: usize, zech1: u32) -> u64 {
    (1u64 << (l1 - 1)) * ((1u64 << l2) - zech1 as u64)
}

/// Closed form of the column at index 2^j: `{s_i + s_{i+2^j}}`, same period.
pub fn companion_column_closed_form(s: &BinarySequence, j: u32) -> BinarySequence {
    let t = s.period().unwrap_or(s.len());
    let dist = 1usize << j;
    let bits: Vec<bool> = (0..t)
        .map(|i| s.bits()[i % t] ^ s.bits()[(i + dist) % t])
        .collect();
    BinarySequence::with_period(bits, t).expect("periodic by construction")
}

/// Interleave offsets of one CA column's sequence, all mod T2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompanionOffsets {
    pub column: u64,
    pub offsets: Vec<u32>,
}

impl CompanionOffsets {
    pub fn new(column: u64, offsets: Vec<u32>) -> Self {
        assert!(!offsets.is_empty());
        CompanionOffsets { column, offsets }
    }
}

/// Offsets of the next column from the previous one:
/// `d_k' = Z(d_k - d_{k+1}) + d_{k+1}` for k below the last, and
/// `d_last' = Z(d_last - (d_0 + 1)) + d_0 + 1` across the wrap (the next
/// strip pairs the last interleaved subsequence with the first one advanced
/// a step).
pub fn companion_offsets_step(
    prev: &CompanionOffsets,
    tables: &FieldTables,
) -> Result<CompanionOffsets, AutomatonError> {
    let t2 = tables.order() as u64;
    let d = prev.offsets.len();
    let mut next = Vec::with_capacity(d);
    let pair = |a: u32, b: u32| -> Result<u32, AutomatonError> {
        let diff = (a as u64 + t2 - b as u64) % t2;
        if diff == 0 {
            return Err(AutomatonError::DegenerateDifference(a, b));
        }
        let z = tables
            .zech(ZechValue::Finite(diff as u32))
            .expect("reduced difference in range");
        match z {
            ZechValue::Finite(z) => Ok(((z as u64 + b as u64) % t2) as u32),
            ZechValue::MinusInfinity => unreachable!("nonzero argument"),
        }
    };
    for k in 0..d - 1 {
        next.push(pair(prev.offsets[k], prev.offsets[k + 1])?);
    }
    let wrapped = ((prev.offsets[0] as u64 + 1) % t2) as u32;
    next.push(pair(prev.offsets[d - 1], wrapped)?);
    Ok(CompanionOffsets {
        column: prev.column + 1,
        offsets: next,
    })
}

/// Offsets of column `t * 2^(L1-1) + m` directly from column m: every offset
/// advances by t*D mod T2, no Zech lookups.
pub fn companion_offsets_shortcut(
    base: &CompanionOffsets,
    t: u64,
    d_ca: u32,
    t2: u32,
) -> CompanionOffsets {
    let shift = t * d_ca as u64 % t2 as u64;
    CompanionOffsets {
        column: base.column + t * base.offsets.len() as u64,
        offsets: base
            .offsets
            .iter()
            .map(|&o| ((o as u64 + shift) % t2 as u64) as u32)
            .collect(),
    }
}

/// Outcome of [`triangle_recover`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleRecovery {
    /// Cells each replicated triangle contributes: n(n+1)/2.
    pub cells_per_triangle: usize,
    /// Whether the triangles plus linear closure determined every cell.
    pub full: bool,
    /// The complete grid (T rows, CA-length columns) when `full`.
    pub grid: Option<CaGrid>,
}

/// Recovers CA contents from `n` consecutive column-0 bits.
///
/// The prefix's forward XOR triangle is replicated at every strip of
/// 2^(L1-1) columns with a row shift of -D per strip (the repeated-sequence
/// geometry of the model), then the rule-102 relation
/// `cell(r+1, c) = cell(r, c) + cell(r, c+1)` is closed over the T x L grid
/// until no new cell is determined. Reconstruction is complete exactly when
/// n reaches [`required_intercept_n`].
pub fn triangle_recover(
    prefix: &BinarySequence,
    l1: usize,
    l2: usize,
    zech1: u32,
) -> Result<TriangleRecovery, AutomatonError> {
    let n = prefix.len();
    let d = 1usize << (l1 - 1);
    let t = (d as u64 * ((1u64 << l2) - 1)) as usize;
    let d_shift = shift_d(l1, zech1) as usize;
    let width = ca_length_for_shrunken(t as u64, l2, zech1) as usize;

    // forward XOR differences of the prefix; tri[c] is the c-th difference
    let mut tri: Vec<Vec<bool>> = vec![prefix.bits().to_vec()];
    while tri.last().unwrap().len() > 1 {
        let last = tri.last().unwrap();
        tri.push((0..last.len() - 1).map(|i| last[i] ^ last[i + 1]).collect());
    }

    let mut grid: Vec<Option<bool>> = vec![None; t * width];
    let set = |grid: &mut Vec<Option<bool>>, r: usize, c: usize, v: bool| {
        match grid[r * width + c] {
            Some(old) if old != v => Err(AutomatonError::TriangleConflict { row: r, col: c }),
            _ => {
                grid[r * width + c] = Some(v);
                Ok(())
            }
        }
    };

    for strip in 0..width / d {
        let start = (t - strip * d_shift % t) % t;
        for (c, diff) in tri.iter().enumerate() {
            for (r, &v) in diff.iter().enumerate() {
                let rr = (start + r) % t;
                let cc = (strip * d + c) % width;
                set(&mut grid, rr, cc, v)?;
            }
        }
    }

    // local closure of cell(r+1,c) = cell(r,c) ^ cell(r,c+1)
    let mut changed = true;
    while changed {
        changed = false;
        for r in 0..t {
            for c in 0..width {
                let r1 = (r + 1) % t;
                let c1 = (c + 1) % width;
                let here = grid[r * width + c];
                let right = grid[r * width + c1];
                let below = grid[r1 * width + c];
                match (here, right, below) {
                    (Some(a), Some(b), None) => {
                        set(&mut grid, r1, c, a ^ b)?;
                        changed = true;
                    }
                    (Some(a), None, Some(o)) => {
                        set(&mut grid, r, c1, a ^ o)?;
                        changed = true;
                    }
                    (None, Some(b), Some(o)) => {
                        set(&mut grid, r, c, b ^ o)?;
                        changed = true;
                    }
                    (Some(a), Some(b), Some(o)) if a ^ b != o => {
                        return Err(AutomatonError::TriangleConflict { row: r1, col: c });
                    }
                    _ => {}
                }
            }
        }
    }

    let full = grid.iter().all(|c| c.is_some());
    let out = full.then(|| {
        CaGrid::from_rows(
            (0..t)
                .map(|r| (0..width).map(|c| grid[r * width + c].unwrap()).collect())
                .collect(),
        )
    });
    Ok(TriangleRecovery {
        cells_per_triangle: n * (n + 1) / 2,
        full,
        grid: out,
    })
}

/// Builds the full T x width grid whose leftmost column is `s`, via
/// `cell(r, c+1) = cell(r, c) + cell(r+1, c)`; row 0 is the CA initial state
/// that generates `s` in column 0.
pub fn grid_from_leftmost_column(s: &BinarySequence, width: usize) -> CaGrid {
    let t = s.period().unwrap_or(s.len());
    assert!(s.len() >= t, "need one full period");
    let mut rows: Vec<Vec<bool>> = vec![vec![false; width]; t];
    for (r, row) in rows.iter_mut().enumerate() {
        row[0] = s.bits()[r];
    }
    for c in 0..width - 1 {
        for r in 0..t {
            rows[r][c + 1] = rows[r][c] ^ rows[(r + 1) % t][c];
        }
    }
    CaGrid { rows }
}
