//! Dense, bit-packed linear algebra over F₂.
//!
//! Bit `j` of a [`BitVector`] lives in word `j / 64` at position `j % 64`.
//! In text form position 0 is written leftmost, so `"110"` has bits 0 and 1
//! set. Matrices are lists of equal-length row vectors; elimination works row
//! by row with word-wide XORs.
//!
//! The elimination engine is generic over [`GaussRow`] so that the same
//! reduced-row-echelon code drives both plain bit matrices and phase-tracked
//! Pauli generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_len, Error, Result};

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over F₂ packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    /// Vector with exactly one bit set.
    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Uniformly random vector of the given length.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self { len, words: (0..words_for(len)).map(|_| rng.gen()).collect() };
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mutable word access. Callers must keep bits beyond `len` zero.
    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the first set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD_BITS + t)
                }
            })
        })
    }

    /// In-place XOR. Panics on length mismatch; see [`BitVector::try_xor`].
    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with lengths {} and {}", self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn try_xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::ops::BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl std::ops::BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        self.xor_assign(rhs);
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = Self::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Parse { line: 1, message: format!("invalid bit character {other:?}") }),
            }
        }
        Ok(v)
    }
}

/// A row-major matrix over F₂.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// Matrix with no rows.
    pub fn empty(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new() }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { ncols, rows: vec![BitVector::zeros(ncols); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { ncols: n, rows: (0..n).map(|i| BitVector::unit(n, i)).collect() }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVector>) -> Result<Self> {
        for r in &rows {
            check_len(ncols, r.len())?;
        }
        Ok(Self { ncols, rows })
    }

    /// Parses whitespace-separated row strings such as `"110 011 101"`.
    pub fn parse_rows(text: &str) -> Result<Self> {
        let rows = text.split_whitespace().map(BitVector::from_str).collect::<Result<Vec<_>>>()?;
        let ncols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(ncols, rows)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        check_len(self.ncols, row.len())?;
        self.rows.push(row);
        Ok(())
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| r.to_string())).finish()
    }
}

/// A row that Gaussian elimination can pivot on and add to other rows.
pub trait GaussRow {
    fn bit(&self, col: usize) -> bool;

    /// Adds `pivot` into `self` (XOR for plain vectors).
    fn eliminate_with(&mut self, pivot: &Self);
}

impl GaussRow for BitVector {
    #[inline]
    fn bit(&self, col: usize) -> bool {
        self.get(col)
    }

    #[inline]
    fn eliminate_with(&mut self, pivot: &Self) {
        self.xor_assign(pivot);
    }
}

fn target_and_pivot<R>(rows: &mut [R], target: usize, pivot: usize) -> (&mut R, &R) {
    debug_assert_ne!(target, pivot);
    if target < pivot {
        let (lo, hi) = rows.split_at_mut(pivot);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[pivot])
    }
}

/// Brings `rows` into reduced row echelon form over the first `ncols`
/// columns, in place. Nonzero rows come first, ordered by pivot column;
/// zero rows are left at the end. Returns the pivot columns.
pub fn reduce_rows<R: GaussRow>(rows: &mut [R], ncols: usize) -> Vec<usize> {
    reduce_rows_over(rows, 0..ncols)
}

/// Like [`reduce_rows`] but only pivots on the given columns, in the order
/// supplied.
pub fn reduce_rows_over<R, I>(rows: &mut [R], cols: I) -> Vec<usize>
where
    R: GaussRow,
    I: IntoIterator<Item = usize>,
{
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in cols {
        if rank == rows.len() {
            break;
        }
        let Some(found) = (rank..rows.len()).find(|&i| rows[i].bit(col)) else {
            continue;
        };
        rows.swap(rank, found);
        for j in 0..rows.len() {
            if j != rank && rows[j].bit(col) {
                let (target, pivot) = target_and_pivot(rows, j, rank);
                target.eliminate_with(pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// F₂ rank of the row space.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    reduce_rows(&mut rows, m.ncols).len()
}

/// The unique reduced row echelon form of `m` with zero rows removed.
pub fn rref_basis(m: &BitMatrix) -> BitMatrix {
    let mut rows = m.rows.clone();
    let r = reduce_rows(&mut rows, m.ncols).len();
    rows.truncate(r);
    BitMatrix { ncols: m.ncols, rows }
}

/// Expresses `v` in terms of the rows of `basis`, which must be in RREF.
///
/// Returns `Some(c)` with `c[k]` set iff row `k` participates, or `None` when
/// `v` is outside the span.
pub fn span_coefficients(v: &BitVector, basis: &BitMatrix) -> Result<Option<BitVector>> {
    check_len(basis.ncols, v.len())?;
    let mut rest = v.clone();
    let mut coeffs = BitVector::zeros(basis.nrows());
    for (k, row) in basis.rows.iter().enumerate() {
        let pivot = row.first_one().ok_or_else(|| Error::Contract("basis contains a zero row".into()))?;
        if rest.get(pivot) {
            rest.xor_assign(row);
            coeffs.set(k, true);
        }
    }
    Ok(rest.is_zero().then_some(coeffs))
}

/// An incrementally built echelon basis: rows with distinct leading bits,
/// kept sorted by leading bit.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<BitVector>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &BitVector) -> BitVector {
        let mut rest = v.clone();
        for row in &self.rows {
            let lead = row.first_one().expect("echelon rows are nonzero");
            if rest.get(lead) {
                rest.xor_assign(row);
            }
        }
        rest
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the basis; returns `false` (leaving the basis unchanged)
    /// when `v` is already in the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let rest = self.reduce(v);
        let Some(lead) = rest.first_one() else {
            return false;
        };
        let at = self.rows.partition_point(|r| r.first_one().unwrap() < lead);
        self.rows.insert(at, rest);
        true
    }
}

/// True iff `v` lies in the row span of `basis` (which must be in RREF).
pub fn in_span(v: &BitVector, basis: &BitMatrix) -> Result<bool> {
    Ok(span_coefficients(v, basis)?.is_some())
}

/// XOR of the rows of `m` selected by `coeffs`.
pub fn combine_rows(m: &BitMatrix, coeffs: &BitVector) -> BitVector {
    let mut out = BitVector::zeros(m.ncols);
    for k in coeffs.iter_ones() {
        out.xor_assign(&m.rows[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(text: &str) -> BitMatrix {
        BitMatrix::parse_rows(text).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::identity(3)), 3);
        assert_eq!(rank(&BitMatrix::zeros(4, 6)), 0);
        assert_eq!(rank(&m("110 011 101")), 2);
    }

    #[test]
    fn rref_examples() {
        assert_eq!(rref_basis(&m("11 01")), m("10 01"));
        assert_eq!(rref_basis(&m("0000")).nrows(), 0);
        assert_eq!(rref_basis(&m("1010 1010")), m("1010"));
    }

    #[test]
    fn span_examples() {
        let basis = m("110 011");
        assert!(in_span(&"000".parse().unwrap(), &rref_basis(&basis)).unwrap());

        let err = in_span(&"101".parse().unwrap(), &m("10 01")).unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 2, found: 3 });

        let basis = m("110 001");
        let c = span_coefficients(&"111".parse().unwrap(), &basis).unwrap().unwrap();
        assert_eq!(c.to_string(), "11");
        assert!(!in_span(&"100".parse().unwrap(), &basis).unwrap());
    }

    #[test]
    fn text_round_trip_and_tail() {
        let v: BitVector = "1000000000000000000000000000000000000000000000000000000000000001".parse().unwrap();
        assert_eq!(v.len(), 64);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for len in [1, 7, 63, 64, 65, 130] {
            let r = BitVector::random(len, &mut rng);
            assert_eq!(r.to_string().parse::<BitVector>().unwrap(), r);
            // bits past len stay clear
            let tail = len % 64;
            if tail != 0 {
                assert_eq!(r.words().last().unwrap() >> tail, 0);
            }
        }
        assert!("10x".parse::<BitVector>().is_err());
    }

    #[test]
    fn push_row_checks_width() {
        let mut mat = BitMatrix::empty(3);
        assert!(mat.push_row(BitVector::zeros(4)).is_err());
        mat.push_row(BitVector::zeros(3)).unwrap();
        assert_eq!(mat.nrows(), 1);
    }
}
