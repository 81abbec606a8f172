//! Prefix codes for partial denominators and the address state machine.
//!
//! `C_I(b) = 0^l 1 ~b_{l-1} .. ~b_0` with `l = floor(log2 b)`, where `~` flips a
//! bit, and `C_II` is its complement. Both are complete and prefix-free with
//! codeword length `2l + 1`. The unary pair `C_u(b) = 0^(b-1) 1`,
//! `C_v(b) = 1^(b-1) 0` gives the Stern-Brocot / Minkowski construction.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::BitWord;

/// Longest unary codeword we are willing to materialize.
pub const MAX_UNARY_LEN: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CodeFlavor {
    CI,
    CII,
    CU,
    CV,
    CUPrime,
    CVPrime,
}

impl CodeFlavor {
    pub const ALL: [CodeFlavor; 6] = [
        CodeFlavor::CI,
        CodeFlavor::CII,
        CodeFlavor::CU,
        CodeFlavor::CV,
        CodeFlavor::CUPrime,
        CodeFlavor::CVPrime,
    ];

    /// `C_u'` and `C_v'` are neither complete nor prefix-free.
    pub fn is_prefix_free(self) -> bool {
        !matches!(self, CodeFlavor::CUPrime | CodeFlavor::CVPrime)
    }

    pub fn name(self) -> &'static str {
        match self {
            CodeFlavor::CI => "ci",
            CodeFlavor::CII => "cii",
            CodeFlavor::CU => "cu",
            CodeFlavor::CV => "cv",
            CodeFlavor::CUPrime => "cu'",
            CodeFlavor::CVPrime => "cv'",
        }
    }

    /// Symbol repeated in the leading run of every codeword.
    fn lead(self) -> bool {
        matches!(self, CodeFlavor::CII | CodeFlavor::CV | CodeFlavor::CVPrime)
    }
}

impl fmt::Display for CodeFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ci" | "c1" | "i" => CodeFlavor::CI,
            "cii" | "c2" | "ii" => CodeFlavor::CII,
            "cu" | "u" => CodeFlavor::CU,
            "cv" | "v" => CodeFlavor::CV,
            "cu'" | "cuprime" | "cu-prime" => CodeFlavor::CUPrime,
            "cv'" | "cvprime" | "cv-prime" => CodeFlavor::CVPrime,
            _ => {
                return Err(Error::Parse {
                    what: "code flavor",
                    input: s.to_string(),
                })
            }
        })
    }
}

/// The codeword of `b >= 1`.
pub fn encode(b: &BigUint, flavor: CodeFlavor) -> Result<BitWord> {
    let mut out = Vec::new();
    append_codeword(&mut out, b, flavor)?;
    Ok(BitWord::from_bits(out))
}

pub fn encode_u64(b: u64, flavor: CodeFlavor) -> Result<BitWord> {
    encode(&BigUint::from(b), flavor)
}

pub(crate) fn append_codeword(out: &mut Vec<bool>, b: &BigUint, flavor: CodeFlavor) -> Result<()> {
    if b.is_zero() {
        return Err(Error::ZeroCodeInput);
    }
    let lead = flavor.lead();
    match flavor {
        CodeFlavor::CI | CodeFlavor::CII => {
            let l = (b.bits() - 1) as usize;
            out.extend(std::iter::repeat(lead).take(l));
            out.push(!lead);
            // the l bits of b below its leading 1; C_I flips them
            for i in (0..l).rev() {
                out.push(b.bit(i as u64) == lead);
            }
        }
        CodeFlavor::CU | CodeFlavor::CV => {
            let n = unary_len(b)?;
            out.extend(std::iter::repeat(lead).take(n - 1));
            out.push(!lead);
        }
        CodeFlavor::CUPrime | CodeFlavor::CVPrime => {
            let n = unary_len(b)?;
            out.extend(std::iter::repeat(lead).take(n));
        }
    }
    Ok(())
}

fn unary_len(b: &BigUint) -> Result<usize> {
    match b.to_u64() {
        Some(n) if n <= MAX_UNARY_LEN => Ok(n as usize),
        _ => Err(Error::TooLarge(b.to_string())),
    }
}

/// Exact codeword length: `2 floor(log2 b) + 1` for `C_I`/`C_II`, `b` for the
/// unary codes.
pub fn codeword_length(b: &BigUint, flavor: CodeFlavor) -> Result<BigUint> {
    if b.is_zero() {
        return Err(Error::ZeroCodeInput);
    }
    Ok(match flavor {
        CodeFlavor::CI | CodeFlavor::CII => BigUint::from(2 * (b.bits() - 1) + 1),
        _ => b.clone(),
    })
}

/// `2 floor(log2 b) + 1` for machine integers.
pub fn binary_code_len(b: u64) -> u32 {
    assert!(b > 0);
    2 * (63 - b.leading_zeros()) + 1
}

/// Result of reading one codeword from the front of a stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Value { b: BigUint, consumed: usize },
    /// The leading run never ends: `C(aleph_0) = 0^omega` (or `1^omega`).
    Aleph,
}

/// Reads one codeword from `stream` followed by the infinite constant `tail`.
pub fn decode_prefix(stream: &[bool], tail: bool, flavor: CodeFlavor) -> Result<Decoded> {
    if !flavor.is_prefix_free() {
        return Err(Error::NotPrefixFree(flavor.name()));
    }
    let lead = flavor.lead();
    let at = |i: usize| stream.get(i).copied().unwrap_or(tail);
    let run = stream.iter().take_while(|&&bit| bit == lead).count();
    if run == stream.len() && tail == lead {
        return Ok(Decoded::Aleph);
    }
    match flavor {
        CodeFlavor::CU | CodeFlavor::CV => Ok(Decoded::Value {
            b: BigUint::from(run as u64 + 1),
            consumed: run + 1,
        }),
        _ => {
            let flip = flavor == CodeFlavor::CI;
            let b = read_binary(run, |i| at(run + 1 + i) != flip);
            Ok(Decoded::Value {
                b,
                consumed: 2 * run + 1,
            })
        }
    }
}

/// `1` followed by `len` payload bits.
fn read_binary(len: usize, bit: impl Fn(usize) -> bool) -> BigUint {
    if len < 64 {
        let mut v: u64 = 1;
        for i in 0..len {
            v = (v << 1) | bit(i) as u64;
        }
        BigUint::from(v)
    } else {
        let digits: Vec<u8> = std::iter::once(1u8)
            .chain((0..len).map(|i| bit(i) as u8))
            .collect();
        BigUint::from_radix_be(&digits, 2).expect("binary digits")
    }
}

/// Splits `stream ++ tail^omega` into alternating codewords of `first` and
/// `second`, stopping at the first `Aleph`. An `Aleph` while expecting
/// `second` is malformed.
pub(crate) fn decode_alternating(
    stream: &[bool],
    tail: bool,
    first: CodeFlavor,
    second: CodeFlavor,
) -> Result<Vec<BigUint>> {
    let mut pos = 0;
    let mut pds = Vec::new();
    loop {
        let flavor = if pds.len() % 2 == 0 { first } else { second };
        let rest = stream.get(pos..).unwrap_or(&[]);
        if rest.is_empty() && flavor == first && tail != first.lead() {
            return Err(Error::MalformedStream(
                "constant tail decodes to an infinite expansion".to_string(),
            ));
        }
        match decode_prefix(rest, tail, flavor)? {
            Decoded::Value { b, consumed } => {
                pds.push(b);
                pos += consumed;
            }
            Decoded::Aleph if flavor == first => return Ok(pds),
            Decoded::Aleph => {
                return Err(Error::MalformedStream(format!(
                    "{} chunk never terminates after {} partial denominators",
                    flavor,
                    pds.len()
                )))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FsmKind {
    A,
    B,
    C,
}

/// State of the address machine: `A`, `B_k`, `C_k` and their barred twins.
///
/// `B_k` has read `k` leading symbols of a codeword, `C_k` still has `k`
/// payload bits to read. Barred states decode the complemented code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FsmState {
    pub kind: FsmKind,
    pub k: usize,
    pub barred: bool,
}

impl FsmState {
    pub const START: FsmState = FsmState {
        kind: FsmKind::A,
        k: 0,
        barred: false,
    };

    pub fn a(barred: bool) -> Self {
        FsmState {
            kind: FsmKind::A,
            k: 0,
            barred,
        }
    }

    pub fn b(k: usize, barred: bool) -> Self {
        assert!(k >= 1);
        FsmState {
            kind: FsmKind::B,
            k,
            barred,
        }
    }

    pub fn c(k: usize, barred: bool) -> Self {
        assert!(k >= 1);
        FsmState {
            kind: FsmKind::C,
            k,
            barred,
        }
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            f.write_str("~")?;
        }
        match self.kind {
            FsmKind::A => f.write_str("A"),
            FsmKind::B => write!(f, "B{}", self.k),
            FsmKind::C => write!(f, "C{}", self.k),
        }
    }
}

pub fn fsm_step(s: FsmState, bit: bool) -> FsmState {
    // barred states mirror the unbarred table with the input complemented
    let zero = bit == s.barred;
    match s.kind {
        FsmKind::A if zero => FsmState::b(1, s.barred),
        FsmKind::A => FsmState::a(!s.barred),
        FsmKind::B if zero => FsmState::b(s.k + 1, s.barred),
        FsmKind::B => FsmState::c(s.k, s.barred),
        FsmKind::C if s.k >= 2 => FsmState::c(s.k - 1, s.barred),
        FsmKind::C => {
            if s.barred {
                FsmState::a(false)
            } else {
                FsmState::a(true)
            }
        }
    }
}

/// Runs the machine from `A` over every symbol of `v`.
pub fn fsm_run(v: &BitWord) -> FsmState {
    v.bits().iter().fold(FsmState::START, |s, &b| fsm_step(s, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    #[test]
    fn example_fourteen() {
        assert_eq!(encode_u64(14, CodeFlavor::CI).unwrap(), w("0001001"));
        assert_eq!(encode_u64(14, CodeFlavor::CII).unwrap(), w("1110110"));
    }

    #[test]
    fn first_rows_and_unary() {
        assert_eq!(encode_u64(1, CodeFlavor::CI).unwrap(), w("1"));
        assert_eq!(encode_u64(1, CodeFlavor::CII).unwrap(), w("0"));
        assert_eq!(encode_u64(3, CodeFlavor::CU).unwrap(), w("001"));
        assert_eq!(encode_u64(3, CodeFlavor::CV).unwrap(), w("110"));
        assert_eq!(encode_u64(3, CodeFlavor::CUPrime).unwrap(), w("000"));
        assert_eq!(encode_u64(3, CodeFlavor::CVPrime).unwrap(), w("111"));
        assert_eq!(encode_u64(0, CodeFlavor::CI), Err(Error::ZeroCodeInput));
    }

    #[test]
    fn unary_size_guard() {
        let huge = BigUint::from(MAX_UNARY_LEN + 1);
        assert!(matches!(encode(&huge, CodeFlavor::CU), Err(Error::TooLarge(_))));
        assert_eq!(
            codeword_length(&huge, CodeFlavor::CU).unwrap(),
            huge,
            "lengths never materialize the word"
        );
    }

    #[test]
    fn decode_examples() {
        let d = decode_prefix(w("0111").bits(), false, CodeFlavor::CI).unwrap();
        assert_eq!(
            d,
            Decoded::Value {
                b: BigUint::from(2u32),
                consumed: 3
            }
        );
        let d = decode_prefix(w("11000").bits(), false, CodeFlavor::CII).unwrap();
        assert_eq!(
            d,
            Decoded::Value {
                b: BigUint::from(4u32),
                consumed: 5
            }
        );
        assert_eq!(
            decode_prefix(w("0000").bits(), false, CodeFlavor::CI).unwrap(),
            Decoded::Aleph
        );
        assert_eq!(
            decode_prefix(&[], false, CodeFlavor::CI).unwrap(),
            Decoded::Aleph
        );
        assert_eq!(
            decode_prefix(w("11").bits(), true, CodeFlavor::CII).unwrap(),
            Decoded::Aleph
        );
        assert!(decode_prefix(w("00").bits(), false, CodeFlavor::CUPrime).is_err());
    }

    #[test]
    fn decode_reads_payload_from_tail() {
        // "11" then 0^omega: C_II with l = 2 and payload "00" -> 4
        let d = decode_prefix(w("11").bits(), false, CodeFlavor::CII).unwrap();
        assert_eq!(
            d,
            Decoded::Value {
                b: BigUint::from(4u32),
                consumed: 5
            }
        );
    }

    #[test]
    fn alternating_rejects_unterminated_second_code() {
        let err = decode_alternating(w("1").bits(), true, CodeFlavor::CI, CodeFlavor::CII);
        assert!(matches!(err, Err(Error::MalformedStream(_))));
    }

    #[test]
    fn lengths() {
        let len = |b: u64, f| codeword_length(&BigUint::from(b), f).unwrap();
        assert_eq!(len(15, CodeFlavor::CI), BigUint::from(7u32));
        assert_eq!(len(1, CodeFlavor::CI), BigUint::from(1u32));
        assert_eq!(len(64, CodeFlavor::CII), BigUint::from(13u32));
        assert_eq!(len(9, CodeFlavor::CV), BigUint::from(9u32));
        assert_eq!(binary_code_len(64), 13);
    }

    #[test]
    fn fsm_examples() {
        assert_eq!(fsm_run(&w("0")), FsmState::b(1, false));
        assert_eq!(fsm_run(&w("0111")), FsmState::b(1, true));
        assert_eq!(fsm_run(&w("")), FsmState::START);
    }

    #[test]
    fn fsm_table() {
        let a = FsmState::a(false);
        let abar = FsmState::a(true);
        assert_eq!(fsm_step(a, false), FsmState::b(1, false));
        assert_eq!(fsm_step(a, true), abar);
        assert_eq!(fsm_step(FsmState::b(3, false), false), FsmState::b(4, false));
        assert_eq!(fsm_step(FsmState::b(3, false), true), FsmState::c(3, false));
        assert_eq!(fsm_step(FsmState::c(3, false), true), FsmState::c(2, false));
        assert_eq!(fsm_step(FsmState::c(1, false), false), abar);
        assert_eq!(fsm_step(FsmState::c(1, false), true), abar);
        assert_eq!(fsm_step(abar, false), a);
        assert_eq!(fsm_step(abar, true), FsmState::b(1, true));
        assert_eq!(fsm_step(FsmState::b(2, true), false), FsmState::c(2, true));
        assert_eq!(fsm_step(FsmState::b(2, true), true), FsmState::b(3, true));
        assert_eq!(fsm_step(FsmState::c(2, true), false), FsmState::c(1, true));
        assert_eq!(fsm_step(FsmState::c(1, true), true), a);
    }

    #[test]
    fn state_names() {
        assert_eq!(FsmState::c(3, true).to_string(), "~C3");
        assert_eq!(FsmState::START.to_string(), "A");
    }
}
