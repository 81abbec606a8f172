//! Exact numbers and the three equivalent address spaces.
//!
//! A tree address is a finite bit word `v`. The same node is also named by the
//! positive integer `n = (1v)_2` (breadth-first numbering) and by the dyadic
//! fraction `(v1)_2 / 2^(|v|+1)` in (0,1) (the van der Corput labeling). The
//! maps between the three are exact bijections.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed fraction, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Builds `p/q` from machine integers. Panics if `q == 0`.
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err())?;
    let q: BigInt = q.parse().map_err(|_| err())?;
    if q.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(p, q))
}

/// Renders a rational as `"p/q"`, including integers (`"3/1"`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `max(|p|, q)` of a reduced fraction.
pub fn height(r: &Rational) -> BigInt {
    let p = r.numer().abs();
    if &p > r.denom() {
        p
    } else {
        r.denom().clone()
    }
}

pub(crate) fn in_unit_interval(x: &Rational) -> bool {
    x.is_positive() && x.numer() < x.denom()
}

/// A finite word over {0,1}. The empty word is valid.
///
/// Ordering is lexicographic with `0 < 1` and a proper prefix sorting first.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord(Vec<bool>);

impl BitWord {
    pub fn new() -> Self {
        BitWord(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitWord(bits)
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        BitWord(
            (0..width)
                .rev()
                .map(|i| i < 64 && (value >> i) & 1 == 1)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// `self` followed by `bit`.
    pub fn child(&self, bit: bool) -> BitWord {
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.extend_from_slice(&self.0);
        bits.push(bit);
        BitWord(bits)
    }

    /// `bit` followed by `self`.
    pub fn prepend(&self, bit: bool) -> BitWord {
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.0);
        BitWord(bits)
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitWord(bits)
    }

    /// 0/1 inversion of every symbol.
    pub fn complement(&self) -> BitWord {
        BitWord(self.0.iter().map(|b| !b).collect())
    }

    /// The word without its last symbol; `None` for the empty word.
    pub fn parent(&self) -> Option<BitWord> {
        if self.0.is_empty() {
            None
        } else {
            Some(BitWord(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn starts_with(&self, prefix: &BitWord) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// `(v)_2`, with `(ε)_2 = 0`.
    pub fn value(&self) -> BigUint {
        if self.0.is_empty() {
            return BigUint::zero();
        }
        let digits: Vec<u8> = self.0.iter().map(|&b| b as u8).collect();
        BigUint::from_radix_be(&digits, 2).expect("binary digits")
    }

    /// Human-readable form: the bits, or `ε` for the empty word.
    pub fn display(&self) -> String {
        if self.0.is_empty() {
            "ε".to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({:?})", self.to_string())
    }
}

impl FromStr for BitWord {
    type Err = Error;

    /// Accepts a raw 0/1 string; `""`, `"eps"` and `"ε"` denote the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "eps" || s == "ε" {
            return Ok(BitWord::new());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord)
    }
}

impl From<&[bool]> for BitWord {
    fn from(bits: &[bool]) -> Self {
        BitWord(bits.to_vec())
    }
}

/// Breadth-first node number `n = (1v)_2 >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIndex(BigUint);

impl NodeIndex {
    pub fn new(n: BigUint) -> Result<Self> {
        if n.is_zero() {
            Err(Error::ZeroIndex)
        } else {
            Ok(NodeIndex(n))
        }
    }

    pub fn from_u64(n: u64) -> Result<Self> {
        Self::new(BigUint::from(n))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// `floor(log2 n)`, which is the length of the matching address.
    pub fn level(&self) -> u64 {
        self.0.bits() - 1
    }

    pub fn left_child(&self) -> NodeIndex {
        NodeIndex(&self.0 << 1u32)
    }

    pub fn right_child(&self) -> NodeIndex {
        NodeIndex((&self.0 << 1u32) + 1u32)
    }
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for NodeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: BigUint = s.trim().parse().map_err(|_| Error::Parse {
            what: "node index",
            input: s.to_string(),
        })?;
        NodeIndex::new(n)
    }
}

/// A dyadic fraction `a / 2^k` in (0,1) with `a` odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    a: BigUint,
    k: u64,
}

impl Dyadic {
    pub fn new(a: BigUint, k: u64) -> Result<Self> {
        if a.is_even() || k == 0 || a.bits() > k {
            return Err(Error::NotDyadic(format!("{a}/2^{k}")));
        }
        Ok(Dyadic { a, k })
    }

    pub fn numerator(&self) -> &BigUint {
        &self.a
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new_raw(BigInt::from(self.a.clone()), BigInt::one() << self.k)
    }

    /// Lossy conversion; exact whenever `a` fits in 53 bits.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&BigInt::from(self.a.clone()), &(BigInt::one() << self.k))
    }

    /// Reads a rational as a dyadic; fails unless the denominator is a power
    /// of two and the value lies in (0,1).
    pub fn from_rational(r: &Rational) -> Result<Self> {
        let denom = r.denom();
        let k = denom.bits() - 1;
        let power_of_two = (BigInt::one() << k) == *denom;
        if !power_of_two || !in_unit_interval(r) {
            return Err(Error::NotDyadic(format_rational(r)));
        }
        let a = r.numer().to_biguint().expect("positive");
        Dyadic::new(a, k)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.a, self.k)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `"a/2^k"`, a binary fraction `".0101"`, or a plain `"p/q"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse {
            what: "dyadic",
            input: s.to_string(),
        };
        if let Some(bits) = s.strip_prefix('.').or_else(|| s.strip_prefix("0.")) {
            let word: BitWord = bits.parse().map_err(|_| err())?;
            let bits = word.bits();
            let end = bits.iter().rposition(|&b| b).ok_or_else(err)?;
            let trimmed = BitWord::from(&bits[..=end]);
            return Dyadic::new(trimmed.value(), (end + 1) as u64);
        }
        if let Some((a, k)) = s.split_once("/2^") {
            let a: BigUint = a.trim().parse().map_err(|_| err())?;
            let k: u64 = k.trim().parse().map_err(|_| err())?;
            return Dyadic::new(a, k);
        }
        Dyadic::from_rational(&parse_rational(s)?)
    }
}

/// `(1v)_2`.
pub fn word_to_index(v: &BitWord) -> NodeIndex {
    NodeIndex((BigUint::one() << v.len()) + v.value())
}

/// Inverse of [`word_to_index`]: the binary digits of `n` after its leading 1.
pub fn index_to_word(n: &NodeIndex) -> BitWord {
    let digits = n.0.to_radix_be(2);
    BitWord(digits[1..].iter().map(|&d| d == 1).collect())
}

/// `(v1)_2 / 2^(|v|+1)`.
pub fn word_to_dyadic(v: &BitWord) -> Dyadic {
    let a = (v.value() << 1u32) + 1u32;
    Dyadic {
        a,
        k: v.len() as u64 + 1,
    }
}

/// Inverse of [`word_to_dyadic`]: `(a-1)/2` written with exactly `k-1` bits.
pub fn dyadic_to_word(d: &Dyadic) -> BitWord {
    let width = (d.k - 1) as usize;
    let half = &d.a >> 1u32;
    let mut bits = vec![false; width];
    if !half.is_zero() {
        let digits = half.to_radix_be(2);
        let offset = width - digits.len();
        for (i, digit) in digits.into_iter().enumerate() {
            bits[offset + i] = digit == 1;
        }
    }
    BitWord(bits)
}

/// Node number to dyadic label, `(2(n - 2^l) + 1) / 2^(l+1)` with `l = floor(log2 n)`.
pub fn index_to_dyadic(n: &NodeIndex) -> Dyadic {
    let l = n.level();
    let offset = &n.0 - (BigUint::one() << l);
    Dyadic {
        a: (offset << 1u32) + 1u32,
        k: l + 1,
    }
}

/// Dyadic label to node number, `(a - 1)/2 + 2^(k-1)`.
pub fn dyadic_to_index(d: &Dyadic) -> NodeIndex {
    NodeIndex((&d.a >> 1u32) + (BigUint::one() << (d.k - 1)))
}

pub(crate) fn ratio_to_f64(p: &BigInt, q: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    // Scale so the quotient keeps 64 significant bits before rounding.
    let shift = q.bits() as i64 - p.bits() as i64 + 64;
    let quotient = if shift >= 0 {
        (p << shift as u64) / q
    } else {
        p / (q << (-shift) as u64)
    };
    quotient.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
}
