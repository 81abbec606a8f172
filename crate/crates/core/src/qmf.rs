//! The binary question-mark function `?_V`, its inverse and dyadic form, the
//! extensions to positive and to all rationals, and Minkowski's `?(x)`.
//!
//! An address is built by concatenating `C_I(b1) C_II(b2) C_I(b3) ...` over
//! the even-length expansion and stripping the `10*` suffix. Swapping in the
//! unary codes gives the Stern-Brocot tree and Minkowski's function.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cfe::{Cfe, EvenCfe};
use crate::codes::{append_codeword, decode_alternating, CodeFlavor};
use crate::error::{Error, Result};
use crate::foundation::{
    dyadic_to_word, format_rational, in_unit_interval, word_to_dyadic, BitWord, Dyadic, Rational,
};

/// Largest exponent accepted by the Denjoy sum.
pub const MAX_DENJOY_EXPONENT: u64 = 1 << 26;

/// Alternating code pair used for odd- and even-indexed partial denominators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodePair {
    pub odd: CodeFlavor,
    pub even: CodeFlavor,
}

impl CodePair {
    pub const BINARY: CodePair = CodePair {
        odd: CodeFlavor::CI,
        even: CodeFlavor::CII,
    };
    pub const UNARY: CodePair = CodePair {
        odd: CodeFlavor::CU,
        even: CodeFlavor::CV,
    };
}

/// Every intermediate of the forward map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QmfTrace {
    #[serde(serialize_with = "ser_pds")]
    pub pds: Vec<BigUint>,
    #[serde(serialize_with = "ser_word")]
    pub codeword: BitWord,
    #[serde(serialize_with = "ser_word")]
    pub address: BitWord,
    #[serde(serialize_with = "ser_dyadic")]
    pub dyadic: Dyadic,
}

fn ser_pds<S: serde::Serializer>(pds: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(pds.iter().map(|b| b.to_string()))
}

fn ser_word<S: serde::Serializer>(w: &BitWord, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

fn ser_dyadic<S: serde::Serializer>(d: &Dyadic, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&d.to_string())
}

/// Strips trailing zeros and then exactly one `1`.
fn strip_suffix(word: &[bool]) -> Result<Vec<bool>> {
    let end = word
        .iter()
        .rposition(|&b| b)
        .ok_or_else(|| Error::MalformedStream("codeword contains no 1".to_string()))?;
    Ok(word[..end].to_vec())
}

pub fn trace_with(pair: CodePair, x: &Rational) -> Result<QmfTrace> {
    let even = EvenCfe::of(x)?;
    let mut codeword = Vec::new();
    for (i, b) in even.pds().iter().enumerate() {
        let flavor = if i % 2 == 0 { pair.odd } else { pair.even };
        append_codeword(&mut codeword, b, flavor)?;
    }
    let address = BitWord::from_bits(strip_suffix(&codeword)?);
    let dyadic = word_to_dyadic(&address);
    Ok(QmfTrace {
        pds: even.into_pds(),
        codeword: BitWord::from_bits(codeword),
        address,
        dyadic,
    })
}

pub fn forward_with(pair: CodePair, x: &Rational) -> Result<BitWord> {
    Ok(trace_with(pair, x)?.address)
}

/// Partial denominators of `v 1 0^omega`; always an even count.
pub fn inverse_pds_with(pair: CodePair, v: &BitWord) -> Result<Vec<BigUint>> {
    let mut stream = v.bits().to_vec();
    stream.push(true);
    let pds = decode_alternating(&stream, false, pair.odd, pair.even)?;
    if pds.is_empty() || pds.len() % 2 == 1 {
        return Err(Error::MalformedStream(format!(
            "{} decodes to {} partial denominators",
            v.display(),
            pds.len()
        )));
    }
    Ok(pds)
}

pub fn inverse_with(pair: CodePair, v: &BitWord) -> Result<Rational> {
    let pds = inverse_pds_with(pair, v)?;
    Ok(Cfe {
        b0: BigInt::zero(),
        pds,
    }
    .value())
}

/// `?_V(x)` for `0 < x < 1`: the address of `x` in the V10 tree.
pub fn qmf_forward(x: &Rational) -> Result<BitWord> {
    forward_with(CodePair::BINARY, x)
}

/// Even expansion, codeword before stripping, address and dyadic image.
pub fn qmf_trace(x: &Rational) -> Result<QmfTrace> {
    trace_with(CodePair::BINARY, x)
}

/// `?_V^{-1}(v)`; every finite word is a valid address.
pub fn qmf_inverse(v: &BitWord) -> Result<Rational> {
    inverse_with(CodePair::BINARY, v)
}

pub fn qmf_bar(x: &Rational) -> Result<Dyadic> {
    Ok(word_to_dyadic(&qmf_forward(x)?))
}

pub fn qmf_bar_inverse(d: &Dyadic) -> Result<Rational> {
    qmf_inverse(&dyadic_to_word(d))
}

/// `qmf_bar` extended to `[0, 1]` by `0 -> 0`, `1 -> 1`.
pub fn qmf_bar_closed(x: &Rational) -> Result<Rational> {
    if x.is_zero() || x.is_one() {
        return Ok(x.clone());
    }
    Ok(qmf_bar(x)?.to_rational())
}

/// `qmf_bar_inverse` on dyadic rationals in `[0, 1]`.
pub fn qmf_bar_inverse_closed(y: &Rational) -> Result<Rational> {
    if y.is_zero() || y.is_one() {
        return Ok(y.clone());
    }
    qmf_bar_inverse(&Dyadic::from_rational(y)?)
}

/// Label of address `v` in the V1 tree (positive rationals).
pub fn hat_inverse(v: &BitWord) -> Result<Rational> {
    match v.bits().split_first() {
        None => Ok(Rational::one()),
        Some((false, rest)) => qmf_inverse(&BitWord::from(rest)),
        Some((true, rest)) => Ok(qmf_inverse(&BitWord::from(rest).complement())?.recip()),
    }
}

/// Address of `x > 0` in the V1 tree.
pub fn hat_forward(x: &Rational) -> Result<BitWord> {
    if !x.is_positive() {
        return Err(Error::NotPositive(format_rational(x)));
    }
    if x.is_one() {
        Ok(BitWord::new())
    } else if x < &Rational::one() {
        Ok(qmf_forward(x)?.prepend(false))
    } else {
        Ok(qmf_forward(&x.recip())?.complement().prepend(true))
    }
}

/// Label of address `v` in the V tree (all rationals).
pub fn doublehat_inverse(v: &BitWord) -> Result<Rational> {
    match v.bits().split_first() {
        None => Ok(Rational::zero()),
        Some((false, rest)) => Ok(-hat_inverse(&BitWord::from(rest).complement())?),
        Some((true, rest)) => hat_inverse(&BitWord::from(rest)),
    }
}

pub fn doublehat_forward(x: &Rational) -> Result<BitWord> {
    if x.is_zero() {
        Ok(BitWord::new())
    } else if x.is_positive() {
        Ok(hat_forward(x)?.prepend(true))
    } else {
        Ok(hat_forward(&-x)?.complement().prepend(false))
    }
}

/// Address of `x` in the Stern-Brocot tree on (0,1).
pub fn sb_forward(x: &Rational) -> Result<BitWord> {
    forward_with(CodePair::UNARY, x)
}

/// Label of address `v` in the Stern-Brocot tree on (0,1).
pub fn sb_inverse(v: &BitWord) -> Result<Rational> {
    inverse_with(CodePair::UNARY, v)
}

/// Minkowski's `?(x)` by Denjoy's alternating sum over the even expansion.
pub fn minkowski_q(x: &Rational) -> Result<Dyadic> {
    if !in_unit_interval(x) {
        return Err(Error::OutsideUnitInterval(format_rational(x)));
    }
    let even = EvenCfe::of(x)?;
    let mut exps = Vec::with_capacity(even.pds().len());
    let mut s: u64 = 0;
    for b in even.pds() {
        let b = b
            .to_u64()
            .filter(|&b| s + b <= MAX_DENJOY_EXPONENT)
            .ok_or_else(|| Error::TooLarge(format!("Denjoy exponent for {}", format_rational(x))))?;
        s += b;
        exps.push(s);
    }
    // 2 * sum (-1)^(k+1) 2^(-s_k), scaled by 2^(s_last - 1)
    let top = s - 1;
    let mut num = BigInt::zero();
    for (k, &e) in exps.iter().enumerate() {
        let term = BigInt::one() << (top + 1 - e);
        if k % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    let value = Rational::new(num, BigInt::one() << top);
    Dyadic::from_rational(&value)
}

/// Minkowski's `?(x)` read off the unary-code address.
pub fn minkowski_q_unary(x: &Rational) -> Result<Dyadic> {
    Ok(word_to_dyadic(&sb_forward(x)?))
}

/// `qmf_bar(a / 2^k)` in floating point, for grid experiments.
///
/// Runs the Euclidean algorithm on machine words and reads the codeword as a
/// binary fraction; bits beyond the 128th are dropped.
pub fn qmf_bar_f64(a: u64, k: u32) -> f64 {
    assert!(k <= 62 && a > 0 && a < (1u64 << k));
    let (mut p, mut q) = (1u64 << k, a);
    let mut pds = [0u64; 128];
    let mut n = 0;
    while q != 0 {
        pds[n] = p / q;
        n += 1;
        let r = p % q;
        p = q;
        q = r;
    }
    if n % 2 == 1 {
        if pds[n - 1] > 1 {
            pds[n - 1] -= 1;
            pds[n] = 1;
            n += 1;
        } else {
            n -= 1;
            pds[n - 1] += 1;
        }
    }
    let mut acc: u128 = 0;
    let mut pos: u32 = 0;
    let mut push = |bit: bool, pos: &mut u32| {
        if *pos < 128 {
            if bit {
                acc |= 1u128 << (127 - *pos);
            }
            *pos += 1;
        }
    };
    for (i, &b) in pds[..n].iter().enumerate() {
        let lead = i % 2 == 1;
        let l = 63 - b.leading_zeros();
        for _ in 0..l {
            push(lead, &mut pos);
        }
        push(!lead, &mut pos);
        for j in (0..l).rev() {
            push(((b >> j) & 1 == 1) == lead, &mut pos);
        }
        if pos >= 128 {
            break;
        }
    }
    acc as f64 * (-128f64).exp2()
}
