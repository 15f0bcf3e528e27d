//! Arithmetic over GF(2^L) defined by a primitive polynomial: exponent/element
//! tables, Zech logarithms, cyclotomic cosets and minimal polynomials.
//!
//! Elements are bit patterns where bit `i` is the coefficient of `alpha^i`;
//! this matches the LFSR convention in [`crate::sequences`], so field elements
//! and register states share one encoding.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Smallest field degree the table builder accepts.
pub const MIN_FIELD_DEGREE: usize = 2;
/// Largest field degree the table builder accepts (keeps tables at a few MB).
pub const MAX_FIELD_DEGREE: usize = 20;

const ZECH_MINUS_INF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("degree {0} outside supported range {MIN_FIELD_DEGREE}..={MAX_FIELD_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("{0} is not primitive")]
    NonPrimitivePolynomial(BinaryPolynomial),
    #[error("exponent {exponent} out of range for multiplicative order {order}")]
    ExponentOutOfRange { exponent: u64, order: u32 },
    #[error("cannot parse polynomial from {0:?}")]
    PolynomialParse(String),
}

/// Polynomial over GF(2), bit `i` = coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryPolynomial {
    words: Vec<u64>,
}

impl BinaryPolynomial {
    pub fn zero() -> Self {
        BinaryPolynomial { words: vec![] }
    }

    pub fn one() -> Self {
        BinaryPolynomial { words: vec![1] }
    }

    /// Polynomial with 1-coefficients exactly at the given powers.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut p = BinaryPolynomial::zero();
        for &e in exponents {
            p.set_coeff(e, true);
        }
        p
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, value: bool) {
        let (w, b) = (i / 64, i % 64);
        if w >= self.words.len() {
            if !value {
                return;
            }
            self.words.resize(w + 1, 0);
        }
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree of the polynomial; 0 for constants (including the zero polynomial).
    pub fn degree(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (63 - w.leading_zeros() as usize),
        }
    }

    /// Powers with coefficient 1, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        (0..=self.degree()).filter(|&i| self.coeff(i)).collect()
    }

    /// Carry-less product over GF(2).
    pub fn mul(&self, other: &BinaryPolynomial) -> BinaryPolynomial {
        if self.is_zero() || other.is_zero() {
            return BinaryPolynomial::zero();
        }
        let mut out = BinaryPolynomial::zero();
        for i in self.exponents() {
            for j in other.exponents() {
                let k = i + j;
                out.set_coeff(k, !out.coeff(k));
            }
        }
        out
    }

    /// Coefficients reversed at the polynomial's own degree: x^deg * p(1/x).
    pub fn reciprocal(&self) -> BinaryPolynomial {
        let d = self.degree();
        let mut out = BinaryPolynomial::zero();
        for i in 0..=d {
            if self.coeff(i) {
                out.set_coeff(d - i, true);
            }
        }
        out
    }

    /// Little-endian coefficient string: "101001" = 1 + x^2 + x^5.
    pub fn to_bit_string(&self) -> String {
        (0..=self.degree())
            .map(|i| if self.coeff(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in self.exponents() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPolynomial({self})")
    }
}

impl FromStr for BinaryPolynomial {
    type Err = FieldError;

    /// Accepts either algebraic form ("1+x^2+x^5", terms in any order) or a
    /// little-endian coefficient string ("101001").
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(FieldError::PolynomialParse(s.to_string()));
        }
        if compact.contains('x') || compact.contains('+') {
            let mut p = BinaryPolynomial::zero();
            for term in compact.split('+') {
                let e = match term {
                    "1" => 0,
                    "x" => 1,
                    t => t
                        .strip_prefix("x^")
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| FieldError::PolynomialParse(s.to_string()))?,
                };
                if p.coeff(e) {
                    return Err(FieldError::PolynomialParse(s.to_string()));
                }
                p.set_coeff(e, true);
            }
            Ok(p)
        } else {
            let mut p = BinaryPolynomial::zero();
            for (i, c) in compact.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => p.set_coeff(i, true),
                    _ => return Err(FieldError::PolynomialParse(s.to_string())),
                }
            }
            Ok(p)
        }
    }
}

/// True iff `x` generates the full multiplicative group modulo `poly`.
///
/// Order 2^L - 1 forces irreducibility as well, so this is the complete
/// primitivity test. Walks the orbit of x, so it is meant for the desk-scale
/// degrees this crate works with.
pub fn is_primitive(poly: &BinaryPolynomial) -> bool {
    let l = poly.degree();
    if l == 0 || l > 63 || !poly.coeff(0) {
        return false;
    }
    let mask: u64 = poly.exponents().iter().map(|&e| 1u64 << e).sum();
    let target = (1u64 << l) - 1;
    let mut e: u64 = 2; // the element x
    if l == 1 {
        e = 1; // x = 1 mod (1 + x)
    }
    let mut steps: u64 = 1;
    while e != 1 {
        e <<= 1;
        if e >> l & 1 == 1 {
            e ^= mask;
        }
        steps += 1;
        if steps > target {
            return false;
        }
    }
    steps == target
}

/// A polynomial checked to be primitive over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimitivePolynomial {
    poly: BinaryPolynomial,
}

impl PrimitivePolynomial {
    pub fn new(poly: BinaryPolynomial) -> Result<Self, FieldError> {
        if is_primitive(&poly) {
            Ok(PrimitivePolynomial { poly })
        } else {
            Err(FieldError::NonPrimitivePolynomial(poly))
        }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn as_poly(&self) -> &BinaryPolynomial {
        &self.poly
    }

    /// Exponents of the recurrence taps (1-coefficients below the degree).
    pub fn taps(&self) -> Vec<usize> {
        let l = self.degree();
        self.poly.exponents().into_iter().filter(|&e| e < l).collect()
    }
}

impl fmt::Display for PrimitivePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl fmt::Debug for PrimitivePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimitivePolynomial({})", self.poly)
    }
}

impl FromStr for PrimitivePolynomial {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        PrimitivePolynomial::new(s.parse()?)
    }
}

/// A Zech logarithm value: an exponent, or the minus-infinity marker for the
/// zero element (1 + alpha^0 in characteristic two).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZechValue {
    MinusInfinity,
    Finite(u32),
}

impl fmt::Display for ZechValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZechValue::MinusInfinity => write!(f, "-inf"),
            ZechValue::Finite(t) => write!(f, "{t}"),
        }
    }
}

/// Eagerly built exponent/element/Zech tables for GF(2^L).
///
/// Immutable after construction; safe to share across threads.
pub struct FieldTables {
    poly: PrimitivePolynomial,
    degree: usize,
    order: u32, // 2^L - 1
    antilog: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>, // ZECH_MINUS_INF at index 0
}

impl fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTables(GF(2^{}) mod {})", self.degree, self.poly)
    }
}

impl FieldTables {
    /// Walks the orbit of x mod `poly`, filling the exponent and Zech tables.
    ///
    /// Rejects degrees outside 2..=20 and polynomials whose orbit closes
    /// before 2^L - 1 steps.
    pub fn build(poly: &BinaryPolynomial) -> Result<FieldTables, FieldError> {
        let l = poly.degree();
        if !(MIN_FIELD_DEGREE..=MAX_FIELD_DEGREE).contains(&l) {
            return Err(FieldError::DegreeOutOfRange(l));
        }
        if !poly.coeff(0) {
            return Err(FieldError::NonPrimitivePolynomial(poly.clone()));
        }
        let mask: u32 = poly.exponents().iter().map(|&e| 1u32 << e).sum();
        let order = (1u32 << l) - 1;
        let mut antilog = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; 1 << l];
        let mut e: u32 = 1;
        for t in 0..order {
            if log[e as usize] != u32::MAX {
                // orbit closed early
                return Err(FieldError::NonPrimitivePolynomial(poly.clone()));
            }
            antilog[t as usize] = e;
            log[e as usize] = t;
            e <<= 1;
            if e >> l & 1 == 1 {
                e ^= mask;
            }
        }
        if e != 1 {
            return Err(FieldError::NonPrimitivePolynomial(poly.clone()));
        }
        let zech = (0..order)
            .map(|t| {
                let s = antilog[t as usize] ^ 1;
                if s == 0 {
                    ZECH_MINUS_INF
                } else {
                    log[s as usize]
                }
            })
            .collect();
        Ok(FieldTables {
            poly: PrimitivePolynomial { poly: poly.clone() },
            degree: l,
            order,
            antilog,
            log,
            zech,
        })
    }

    pub fn poly(&self) -> &PrimitivePolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Multiplicative order q - 1 = 2^L - 1.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Bit pattern of alpha^t.
    pub fn element(&self, t: u32) -> Result<u32, FieldError> {
        self.check(t)?;
        Ok(self.antilog[t as usize])
    }

    /// Exponent of a nonzero element; None for 0.
    pub fn exponent(&self, element: u32) -> Option<u32> {
        self.log
            .get(element as usize)
            .copied()
            .filter(|&t| t != u32::MAX)
    }

    fn check(&self, t: u32) -> Result<(), FieldError> {
        if t >= self.order {
            return Err(FieldError::ExponentOutOfRange {
                exponent: t as u64,
                order: self.order,
            });
        }
        Ok(())
    }

    /// Canonical representative of `v` in [0, q-2]; handles negative inputs.
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.order as i64) as u32
    }

    /// The Zech logarithm: 1 + alpha^t = alpha^{zech(t)}.
    ///
    /// zech(0) = -inf and zech(-inf) = 0; other arguments must be exponents
    /// in range.
    pub fn zech(&self, t: ZechValue) -> Result<ZechValue, FieldError> {
        match t {
            ZechValue::MinusInfinity => Ok(ZechValue::Finite(0)),
            ZechValue::Finite(t) => {
                self.check(t)?;
                Ok(match self.zech[t as usize] {
                    ZECH_MINUS_INF => ZechValue::MinusInfinity,
                    z => ZechValue::Finite(z),
                })
            }
        }
    }

    /// Table lookup for a nonzero exponent, already reduced mod q-1.
    #[inline]
    pub(crate) fn zech_nonzero(&self, t: u32) -> u32 {
        debug_assert!(t >= 1 && t < self.order);
        let z = self.zech[t as usize];
        debug_assert_ne!(z, ZECH_MINUS_INF);
        z
    }

    /// CSV dump with header `x,zech_x`, minus infinity rendered as `-inf`.
    pub fn zech_table_csv(&self) -> String {
        let mut out = String::from("x,zech_x\n");
        for t in 0..self.order {
            let z = self.zech(ZechValue::Finite(t)).expect("in range");
            out.push_str(&format!("{t},{z}\n"));
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn corrupt_zech_entry(&mut self, t: u32, value: u32) {
        self.zech[t as usize] = value;
    }
}

/// One doubling orbit mod 2^L - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub leader: u32,
    /// Members sorted ascending; the leader is the minimum.
    pub members: Vec<u32>,
}

/// The cyclotomic cosets mod 2^L - 1, leaders ascending, covering
/// {0} and every nonzero residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    pub modulus: u32,
    pub cosets: Vec<Coset>,
}

impl CosetPartition {
    pub fn coset_of(&self, x: u32) -> Option<&Coset> {
        self.cosets.iter().find(|c| c.members.contains(&x))
    }
}

/// Partition of residues mod 2^L - 1 into doubling orbits.
pub fn cyclotomic_cosets(l: usize) -> Result<CosetPartition, FieldError> {
    if !(MIN_FIELD_DEGREE..=MAX_FIELD_DEGREE).contains(&l) {
        return Err(FieldError::DegreeOutOfRange(l));
    }
    let modulus = (1u32 << l) - 1;
    let mut seen = vec![false; modulus as usize];
    let mut cosets = Vec::new();
    for leader in 0..modulus {
        if seen[leader as usize] {
            continue;
        }
        let mut members = Vec::new();
        let mut x = leader;
        while !seen[x as usize] {
            seen[x as usize] = true;
            members.push(x);
            x = (x as u64 * 2 % modulus as u64) as u32;
        }
        members.sort_unstable();
        cosets.push(Coset { leader, members });
    }
    Ok(CosetPartition { modulus, cosets })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZechViolation {
    pub identity: &'static str,
    pub x: u32,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZechCheckReport {
    pub violations: Vec<ZechViolation>,
}

impl ZechCheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the complement, doubling, involution and inverse-map identities
/// of the Zech table over the whole exponent range.
pub fn zech_properties_check(tables: &FieldTables) -> ZechCheckReport {
    let q1 = tables.order() as u64;
    let mut report = ZechCheckReport::default();
    let mut fail = |identity, x, detail: String| {
        report.violations.push(ZechViolation { identity, x, detail });
    };
    if tables.zech(ZechValue::Finite(0)) != Ok(ZechValue::MinusInfinity) {
        fail("zech(0)", 0, "expected -inf".into());
    }
    for x in 1..tables.order() {
        let zx = match tables.zech(ZechValue::Finite(x)) {
            Ok(ZechValue::Finite(z)) => z as u64,
            other => {
                fail("finite", x, format!("zech({x}) = {other:?}"));
                continue;
            }
        };
        let x64 = x as u64;
        // complement: zech(q-1-x) = zech(x) - x
        let lhs = tables.zech(ZechValue::Finite((q1 - x64) as u32));
        let rhs = ((zx + q1 - x64) % q1) as u32;
        if lhs != Ok(ZechValue::Finite(rhs)) {
            fail("complement", x, format!("zech({}) = {lhs:?}, expected {rhs}", q1 - x64));
        }
        // doubling: zech(2x) = 2 zech(x)
        let lhs = tables.zech(ZechValue::Finite((2 * x64 % q1) as u32));
        let rhs = (2 * zx % q1) as u32;
        if lhs != Ok(ZechValue::Finite(rhs)) {
            fail("doubling", x, format!("zech({}) = {lhs:?}, expected {rhs}", 2 * x64 % q1));
        }
        // involution: zech(zech(x)) = x
        let lhs = tables.zech(ZechValue::Finite(zx as u32));
        if lhs != Ok(ZechValue::Finite(x)) {
            fail("involution", x, format!("zech({zx}) = {lhs:?}, expected {x}"));
        }
        // inverse map: zech(zech(x) - x) = q-1-x, using zech^{-1} = zech
        let arg = ((zx + q1 - x64) % q1) as u32;
        let lhs = tables.zech(ZechValue::Finite(arg));
        let rhs = (q1 - x64) as u32;
        if lhs != Ok(ZechValue::Finite(rhs)) {
            fail("inverse-map", x, format!("zech({arg}) = {lhs:?}, expected {rhs}"));
        }
    }
    report
}

/// Minimal polynomial of alpha^e: the product of (x + alpha^j) over the
/// cyclotomic coset of e, expanded over GF(2).
pub fn minimal_polynomial(tables: &FieldTables, e: u32) -> Result<BinaryPolynomial, FieldError> {
    tables.check(e)?;
    let order = tables.order() as u64;
    let mut coset = Vec::new();
    let mut t = e;
    loop {
        coset.push(t);
        t = (t as u64 * 2 % order) as u32;
        if t == e {
            break;
        }
    }
    // coefficients live in GF(2^L) during the expansion
    let mul = |a: u32, b: u32| -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let ea = tables.exponent(a).expect("nonzero") as u64;
        let eb = tables.exponent(b).expect("nonzero") as u64;
        tables.antilog[((ea + eb) % order) as usize]
    };
    let mut coeffs: Vec<u32> = vec![1];
    for j in coset {
        let root = tables.antilog[j as usize];
        let mut next = vec![0u32; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= mul(c, root);
        }
        coeffs = next;
    }
    let mut out = BinaryPolynomial::zero();
    for (i, &c) in coeffs.iter().enumerate() {
        debug_assert!(c <= 1, "coset product left the prime field");
        if c == 1 {
            out.set_coeff(i, true);
        }
    }
    Ok(out)
}

/// Running totals for Zech logarithm requests split by resolution path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ZechStats {
    /// Requests answered from the identity cache (Prop.-style derivations
    /// and repeat lookups).
    pub via_identity: u64,
    /// Requests that needed a fresh table consultation.
    pub via_table: u64,
}

impl ZechStats {
    pub fn total(&self) -> u64 {
        self.via_identity + self.via_table
    }

    pub fn merge(&mut self, other: ZechStats) {
        self.via_identity += other.via_identity;
        self.via_table += other.via_table;
    }
}

/// Zech logarithm provider that derives values through the doubling,
/// complement and involution identities before consulting the table,
/// counting both paths.
pub struct ZechResolver<'a> {
    tables: &'a FieldTables,
    cache: HashMap<u32, u32>,
    stats: ZechStats,
}

impl<'a> ZechResolver<'a> {
    pub fn new(tables: &'a FieldTables) -> Self {
        ZechResolver {
            tables,
            cache: HashMap::new(),
            stats: ZechStats::default(),
        }
    }

    pub fn stats(&self) -> ZechStats {
        self.stats
    }

    fn insert(&mut self, x: u32, z: u32) {
        self.cache.insert(x, z);
        self.cache.insert(z, x); // involution, characteristic two
    }

    /// Cached value for x, or one derived by doubling from a cached member
    /// of x's coset.
    fn cached_or_coset_derived(&self, x: u32) -> Option<u32> {
        if let Some(&z) = self.cache.get(&x) {
            return Some(z);
        }
        let q1 = self.tables.order() as u64;
        let l = self.tables.degree();
        let mut y = x as u64;
        for j in 1..l {
            y = y * 2 % q1;
            if let Some(&zy) = self.cache.get(&(y as u32)) {
                // x = y * 2^(l-j), so zech(x) = zech(y) * 2^(l-j)
                let mut z = zy as u64;
                for _ in 0..(l - j) {
                    z = z * 2 % q1;
                }
                return Some(z as u32);
            }
        }
        None
    }

    /// Zech logarithm of a nonzero exponent in [1, q-2].
    pub fn zech_nonzero(&mut self, x: u32) -> u32 {
        debug_assert!(x >= 1 && x < self.tables.order());
        if let Some(z) = self.cached_or_coset_derived(x) {
            self.stats.via_identity += 1;
            self.insert(x, z);
            return z;
        }
        // complement: zech(x) = zech(q-1-x) + x
        let q1 = self.tables.order() as u64;
        let c = (q1 - x as u64) as u32;
        if let Some(zc) = self.cached_or_coset_derived(c) {
            let z = ((zc as u64 + x as u64) % q1) as u32;
            self.stats.via_identity += 1;
            self.insert(x, z);
            return z;
        }
        let z = self.tables.zech_nonzero(x);
        self.stats.via_table += 1;
        self.insert(x, z);
        z
    }
}
