//! One-sided difference quotients of `qmf_bar` at rationals and the
//! conjectured limits.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cfe::Cfe;
use crate::codes::{codeword_length, CodeFlavor};
use crate::error::{Error, Result};
use crate::foundation::{format_rational, in_unit_interval, Dyadic, Rational};
use crate::qmf::{qmf_bar, qmf_bar_inverse, qmf_trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            _ => Err(Error::Parse {
                what: "side",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeResult {
    pub side: Side,
    pub n: u64,
    /// Exponent `m` of the dyadic step `2^-m` applied to `qmf_bar(x)`.
    pub step_exponent: u64,
    pub x_n: Rational,
    pub quotient: Rational,
    pub predicted_limit: Rational,
}

impl ProbeResult {
    /// `|quotient / limit - 1|`.
    pub fn relative_error(&self) -> f64 {
        let r = &self.quotient / &self.predicted_limit - Rational::one();
        crate::foundation::ratio_to_f64(r.numer(), r.denom()).abs()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "side": self.side,
            "n": self.n,
            "step_exponent": self.step_exponent,
            "x_n": format_rational(&self.x_n),
            "quotient": format_rational(&self.quotient),
            "predicted_limit": format_rational(&self.predicted_limit),
            "relative_error": self.relative_error(),
        })
    }
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e))
    }
}

/// Length of the codeword of `x` before the `10*` strip.
pub fn codeword_len(x: &Rational) -> Result<u64> {
    Ok(qmf_trace(x)?.codeword.len() as u64)
}

/// `(alpha_L, alpha_R)` for `l` partial denominators ending in `b_l`.
pub fn alpha(l: usize, b_last: &BigUint) -> (i64, i64) {
    let pow = b_last.count_ones() == 1;
    match (l % 2 == 1, pow) {
        (true, false) => (0, 1),
        (true, true) => (0, -1),
        (false, false) => (1, 0),
        (false, true) => (-1, 0),
    }
}

/// `q^2 2^(-alpha - sum l(b_i))` over the canonical expansion (last pd >= 2).
pub fn predicted_limit(x: &Rational, side: Side) -> Result<Rational> {
    if !in_unit_interval(x) {
        return Err(Error::OutsideUnitInterval(format_rational(x)));
    }
    let cfe = Cfe::expand(x);
    let mut total = BigInt::zero();
    for b in &cfe.pds {
        total += BigInt::from(codeword_length(b, CodeFlavor::CI)?);
    }
    let (al, ar) = alpha(cfe.pds.len(), cfe.pds.last().expect("x in (0,1)"));
    let a = match side {
        Side::Left => al,
        Side::Right => ar,
    };
    let e: i64 = (-(total + a))
        .try_into()
        .map_err(|_| Error::TooLarge("limit exponent".into()))?;
    let q = Rational::from_integer(x.denom().clone());
    Ok(&q * &q * pow2(e))
}

/// Difference quotient with the step `2^-m` applied to `qmf_bar(x)`.
pub fn derivative_probe_step(x: &Rational, side: Side, m: u64) -> Result<ProbeResult> {
    let y = qmf_bar(x)?.to_rational();
    let step = pow2(-(m as i64));
    let y_n = match side {
        Side::Left => &y - &step,
        Side::Right => &y + &step,
    };
    if !in_unit_interval(&y_n) {
        return Err(Error::OutsideUnitInterval(format!(
            "{} (qmf_bar({}) {} 2^-{m})",
            format_rational(&y_n),
            format_rational(x),
            if side == Side::Left { "-" } else { "+" }
        )));
    }
    let x_n = qmf_bar_inverse(&Dyadic::from_rational(&y_n)?)?;
    let quotient = (&y_n - &y) / (&x_n - x);
    Ok(ProbeResult {
        side,
        n: m,
        step_exponent: m,
        x_n,
        quotient,
        predicted_limit: predicted_limit(x, side)?,
    })
}

/// Difference quotient with the step `2^-(n + L)`, `L` the codeword length of
/// `x`, so `n` counts bits beyond the codeword.
pub fn derivative_probe(x: &Rational, side: Side, n: u64) -> Result<ProbeResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let l = codeword_len(x)?;
    let mut r = derivative_probe_step(x, side, n + l)?;
    r.n = n;
    Ok(r)
}
