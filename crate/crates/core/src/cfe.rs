//! Continued fraction expansion, Perron's convergent schema, and the
//! even-length normalization used by the binary codes.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::foundation::{format_rational, in_unit_interval, Rational};

/// `[b0; b1, b2, ..., bl]` with `b_i >= 1` for `i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cfe {
    pub b0: BigInt,
    pub pds: Vec<BigUint>,
}

/// An expansion `[0; b1, ..., b2l]` of a value in (0,1) with an even number of
/// partial denominators. Every rational in (0,1) has exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvenCfe {
    pds: Vec<BigUint>,
}

/// One row `A_i / B_i` of Perron's schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub a: BigInt,
    pub b: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        Rational::new(self.a.clone(), self.b.clone())
    }
}

impl Cfe {
    pub fn new(b0: BigInt, pds: Vec<BigUint>) -> Result<Self> {
        if pds.iter().any(Zero::is_zero) {
            return Err(Error::ZeroCodeInput);
        }
        Ok(Cfe { b0, pds })
    }

    /// Expansion of a value in (0,1) from machine-sized partial denominators.
    pub fn from_pds(pds: &[u64]) -> Result<Self> {
        Cfe::new(
            BigInt::zero(),
            pds.iter().map(|&b| BigUint::from(b)).collect(),
        )
    }

    /// Canonical expansion by the Euclidean algorithm. The last partial
    /// denominator is at least 2 (or the list is empty for integers).
    pub fn expand(r: &Rational) -> Cfe {
        let (b0, rem) = r.numer().div_mod_floor(r.denom());
        let mut p = r.denom().magnitude().clone();
        let mut q = rem.magnitude().clone();
        let mut pds = Vec::new();
        while !q.is_zero() {
            let (b, rest) = p.div_rem(&q);
            pds.push(b);
            p = q;
            q = rest;
        }
        Cfe { b0, pds }
    }

    pub fn value(&self) -> Rational {
        let (mut num, mut den) = (BigInt::zero(), BigInt::one());
        for b in self.pds.iter().rev() {
            let next = BigInt::from(b.clone()) * &den + &num;
            num = den;
            den = next;
        }
        // num/den is the tail 1/(b1 + ...), already in lowest terms
        let num = &self.b0 * &den + num;
        Rational::new_raw(num, den)
    }

    /// Perron's schema, rows `i = 0..=l`, seeded with
    /// `A_{-2}=0, A_{-1}=1, B_{-2}=1, B_{-1}=0`.
    pub fn convergents(&self) -> Vec<Convergent> {
        let mut out = Vec::with_capacity(self.pds.len() + 1);
        let (mut a_prev2, mut a_prev) = (BigInt::zero(), BigInt::one());
        let (mut b_prev2, mut b_prev) = (BigInt::one(), BigInt::zero());
        let coeffs = std::iter::once(self.b0.clone())
            .chain(self.pds.iter().map(|b| BigInt::from(b.clone())));
        for c in coeffs {
            let a = &c * &a_prev + &a_prev2;
            let b = &c * &b_prev + &b_prev2;
            out.push(Convergent {
                a: a.clone(),
                b: b.clone(),
            });
            a_prev2 = std::mem::replace(&mut a_prev, a);
            b_prev2 = std::mem::replace(&mut b_prev, b);
        }
        out
    }

    /// Rewrites the expansion of a value in (0,1) to the even-length form:
    /// an odd list ending in `b >= 2` becomes `..., b-1, 1`; an odd list
    /// ending in `1` folds it into its predecessor.
    pub fn even_normalize(&self) -> Result<EvenCfe> {
        let one = BigUint::one();
        let is_one = self.pds.len() == 1 && self.pds[0] == one;
        if !self.b0.is_zero() || self.pds.is_empty() || is_one {
            return Err(Error::OutsideUnitInterval(format_rational(&self.value())));
        }
        let mut pds = self.pds.clone();
        if pds.len() % 2 == 1 {
            let last = pds.pop().expect("non-empty");
            if last > one {
                pds.push(last - 1u32);
                pds.push(one);
            } else {
                let prev = pds.pop().expect("length >= 3 when the last pd is 1");
                pds.push(prev + 1u32);
            }
        }
        Ok(EvenCfe { pds })
    }
}

impl EvenCfe {
    /// The even expansion of `x`; fails unless `0 < x < 1`.
    pub fn of(x: &Rational) -> Result<EvenCfe> {
        if !in_unit_interval(x) {
            return Err(Error::OutsideUnitInterval(format_rational(x)));
        }
        Cfe::expand(x).even_normalize()
    }

    /// Takes an even-length list of positive partial denominators as is.
    pub fn from_pds(pds: Vec<BigUint>) -> Result<EvenCfe> {
        if pds.iter().any(Zero::is_zero) {
            return Err(Error::ZeroCodeInput);
        }
        if pds.is_empty() || pds.len() % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "even expansion needs a positive even number of partial denominators, got {}",
                pds.len()
            )));
        }
        Ok(EvenCfe { pds })
    }

    pub fn pds(&self) -> &[BigUint] {
        &self.pds
    }

    pub fn into_pds(self) -> Vec<BigUint> {
        self.pds
    }

    pub fn to_cfe(&self) -> Cfe {
        Cfe {
            b0: BigInt::zero(),
            pds: self.pds.clone(),
        }
    }

    pub fn value(&self) -> Rational {
        self.to_cfe().value()
    }
}

impl fmt::Display for Cfe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.b0)?;
        for (i, b) in self.pds.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { "; " } else { ", " }, b)?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for EvenCfe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_cfe().fmt(f)
    }
}

impl FromStr for Cfe {
    type Err = Error;

    /// `"[b0; b1, b2]"`, or `"[b1, b2]"` when `b0 = 0`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "continued fraction",
            input: s.to_string(),
        };
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(err)?;
        let (b0, rest) = match inner.split_once(';') {
            Some((b0, rest)) => (b0.trim().parse::<BigInt>().map_err(|_| err())?, rest),
            None => (BigInt::zero(), inner),
        };
        let pds = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigUint>().map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        Cfe::new(b0, pds)
    }
}
