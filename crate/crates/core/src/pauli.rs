//! Pauli operators labelled by 2n-bit strings.
//!
//! Qubit `q` owns label positions `2q` and `2q + 1`. The pair `(a, b)` denotes
//! the single-qubit matrix `σ_ab = Z^a X^b`:
//!
//! | pair | matrix                 |
//! |------|------------------------|
//! | 00   | I                      |
//! | 01   | X                      |
//! | 10   | Z                      |
//! | 11   | ZX = iY (not Hermitian)|
//!
//! A [`PauliString`] is `i^e · σ_s` with the exponent `e` tracked exactly.
//! Because every label factor is a product `Z^a X^b`, products of labels only
//! ever pick up a sign: `σ_s σ_t = (-1)^{x(s)·z(t)} σ_{s⊕t}`.
//!
//! Observables use the Hermitian letters `I, X, Y, Z`; the conversion from a
//! label is [`hermitian_from_bits`], which inserts `(-i)` for every `11` pair.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::f2linalg::{BitVector, GaussRow};

/// Positions `2q` (the Z component of each qubit).
pub(crate) const Z_MASK: u64 = 0x5555_5555_5555_5555;

/// A fourth root of unity, stored as the exponent of `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: u32) -> Self {
        Phase((e % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }
}

/// A ±1 eigenvalue or generator sign.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `Minus` iff `bit` is set.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_phase(self) -> Phase {
        match self {
            Sign::Plus => Phase::ONE,
            Sign::Minus => Phase::MINUS_ONE,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.is_minus() ^ rhs.is_minus())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_bit(!self.is_minus())
    }
}

/// The operator `phase · σ_bits` on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    bits: BitVector,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, bits: BitVector::zeros(2 * n), phase: Phase::ONE }
    }

    pub fn new(bits: BitVector, phase: Phase) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::Dimension { expected: bits.len() + 1, found: bits.len() });
        }
        Ok(Self { n: bits.len() / 2, bits, phase })
    }

    /// Single-qubit Hermitian Pauli `letter` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        if q >= n {
            return Err(Error::Domain(format!("qubit {q} out of range for {n} qubits")));
        }
        let mut p = Self::identity(n);
        let (z, x) = letter_bits(letter).ok_or_else(|| Error::Domain(format!("unknown Pauli letter {letter:?}")))?;
        p.bits.set(2 * q, z);
        p.bits.set(2 * q + 1, x);
        if z && x {
            p.phase = Phase::MINUS_I;
        }
        Ok(p)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub(crate) fn bits_mut(&mut self) -> &mut BitVector {
        &mut self.bits
    }

    pub(crate) fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        self.bits.get(2 * q)
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        self.bits.get(2 * q + 1)
    }

    pub fn is_identity_label(&self) -> bool {
        self.bits.is_zero()
    }

    /// Number of qubits carrying the label `11`.
    pub fn y_count(&self) -> usize {
        self.bits.words().iter().map(|&w| (w & (w >> 1) & Z_MASK).count_ones() as usize).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase.exponent() as usize + self.y_count()).is_multiple_of(2)
    }

    /// For a Hermitian operator `±P` (with `P` a tensor product of I, X, Y, Z),
    /// the sign. `None` when the operator is not Hermitian.
    pub fn hermitian_sign(&self) -> Option<Sign> {
        let e = self.phase.exponent() as usize + self.y_count();
        e.is_multiple_of(2).then(|| Sign::from_bit(e % 4 == 2))
    }

    /// Hermitian letter of qubit `q`.
    pub fn letter(&self, q: usize) -> char {
        match (self.z_bit(q), self.x_bit(q)) {
            (false, false) => 'I',
            (false, true) => 'X',
            (true, false) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Sets `self` to `self · rhs`. Panics if the sizes differ.
    pub fn mul_assign_right(&mut self, rhs: &PauliString) {
        assert_eq!(self.n, rhs.n, "multiplying Pauli strings of different sizes");
        let mut parity = 0u32;
        for (a, b) in self.bits.words_mut().iter_mut().zip(rhs.bits.words()) {
            parity ^= ((*a >> 1) & *b & Z_MASK).count_ones();
            *a ^= b;
        }
        let sign = if parity & 1 == 1 { Phase::MINUS_ONE } else { Phase::ONE };
        self.phase = self.phase * rhs.phase * sign;
    }

    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        check_len(self.n, rhs.n)?;
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        Ok(out)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !symplectic_bit(&self.bits, &other.bits)
    }

    /// Multiplies the operator by a scalar phase.
    pub fn times(mut self, phase: Phase) -> Self {
        self.phase = self.phase * phase;
        self
    }
}

impl GaussRow for PauliString {
    #[inline]
    fn bit(&self, col: usize) -> bool {
        self.bits.get(col)
    }

    #[inline]
    fn eliminate_with(&mut self, pivot: &Self) {
        self.mul_assign_right(pivot);
    }
}

fn letter_bits(c: char) -> Option<(bool, bool)> {
    match c {
        'I' => Some((false, false)),
        'X' => Some((false, true)),
        'Z' => Some((true, false)),
        'Y' => Some((true, true)),
        _ => None,
    }
}

fn symplectic_bit(u: &BitVector, v: &BitVector) -> bool {
    u.words()
        .iter()
        .zip(v.words())
        .fold(0u32, |acc, (&a, &b)| acc ^ ((a >> 1) & b & Z_MASK).count_ones() ^ ((b >> 1) & a & Z_MASK).count_ones())
        & 1
        == 1
}

/// `p · q` with exact phase.
pub fn multiply(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.multiply(q)
}

/// The symplectic form `Σ_q (z_q(u) x_q(v) + x_q(u) z_q(v))` over F₂.
/// `false` means the labelled operators commute.
pub fn symplectic_product(u: &BitVector, v: &BitVector) -> Result<bool> {
    check_len(u.len(), v.len())?;
    if !u.len().is_multiple_of(2) {
        return Err(Error::Dimension { expected: u.len() + 1, found: u.len() });
    }
    Ok(symplectic_bit(u, v))
}

/// `sign · (-i)^k · σ_bits` where `k` counts the `11` pairs: the Hermitian
/// observable with label `bits`.
pub fn hermitian_from_bits(bits: &BitVector, sign: Sign) -> Result<PauliString> {
    let mut p = PauliString::new(bits.clone(), Phase::ONE)?;
    let k = p.y_count() as u32;
    p.phase = sign.as_phase() * Phase::from_exponent(3 * k);
    Ok(p)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = (self.phase.exponent() as usize + self.y_count()) % 4;
        f.write_str(["+", "+i", "-", "-i"][e])?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-][i]LETTERS` with letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse { line: 1, message };
        let s = s.trim();
        let (mut scalar, rest) = match s.as_bytes().first() {
            Some(b'+') => (0u32, &s[1..]),
            Some(b'-') => (2, &s[1..]),
            _ => (0, s),
        };
        let rest = match rest.strip_prefix('i') {
            Some(r) => {
                scalar += 1;
                r
            }
            None => rest,
        };
        if rest.is_empty() {
            return Err(parse_err(format!("no Pauli letters in {s:?}")));
        }
        let n = rest.chars().count();
        let mut bits = BitVector::zeros(2 * n);
        let mut k = 0;
        for (q, c) in rest.chars().enumerate() {
            let (z, x) = letter_bits(c).ok_or_else(|| parse_err(format!("invalid Pauli letter {c:?}")))?;
            bits.set(2 * q, z);
            bits.set(2 * q + 1, x);
            k += u32::from(z && x);
        }
        Ok(PauliString { n, bits, phase: Phase::from_exponent(scalar + 3 * k) })
    }
}
