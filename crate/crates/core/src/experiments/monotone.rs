//! Randomized check that `qmf_bar` and the raw codewords preserve order.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::{format_rational, Rational};
use crate::qmf::qmf_trace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub pairs: u64,
    pub seed: u64,
    pub max_denominator: u64,
    pub failures: Vec<String>,
}

impl MonotoneReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random `p/q` in (0,1) with `2 <= q <= max_den`.
pub fn random_unit_rational<R: Rng>(rng: &mut R, max_den: u64) -> Rational {
    let q = rng.gen_range(2..=max_den);
    let p = rng.gen_range(1..q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Compares `u 0^omega` with `v 0^omega`.
pub fn cmp_padded(u: &[bool], v: &[bool]) -> Ordering {
    let n = u.len().max(v.len());
    (0..n)
        .map(|i| {
            let a = u.get(i).copied().unwrap_or(false);
            let b = v.get(i).copied().unwrap_or(false);
            a.cmp(&b)
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Draws `pairs` pairs `x < x'` and checks `qmf_bar(x) < qmf_bar(x')` and the
/// padded codeword order.
pub fn verify_monotone(pairs: u64, seed: u64, max_den: u64) -> Result<MonotoneReport> {
    if max_den < 3 {
        return Err(Error::InvalidArgument("max denominator must be at least 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(pairs as usize);
    while (draws.len() as u64) < pairs {
        let a = random_unit_rational(&mut rng, max_den);
        let b = random_unit_rational(&mut rng, max_den);
        match a.cmp(&b) {
            Ordering::Less => draws.push((a, b)),
            Ordering::Greater => draws.push((b, a)),
            Ordering::Equal => {}
        }
    }
    let failures: Vec<String> = draws
        .par_iter()
        .filter_map(|(x, y)| {
            let tx = qmf_trace(x).expect("x in (0,1)");
            let ty = qmf_trace(y).expect("y in (0,1)");
            let by_value = tx.dyadic.to_rational() < ty.dyadic.to_rational();
            let by_word = cmp_padded(tx.codeword.bits(), ty.codeword.bits()) == Ordering::Less;
            (!(by_value && by_word)).then(|| {
                format!(
                    "{} < {} but images {} vs {}",
                    format_rational(x),
                    format_rational(y),
                    tx.dyadic,
                    ty.dyadic
                )
            })
        })
        .collect();
    Ok(MonotoneReport {
        pairs,
        seed,
        max_denominator: max_den,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_order() {
        assert_eq!(cmp_padded(&[true], &[true, false]), Ordering::Equal);
        assert_eq!(cmp_padded(&[true], &[true, false, true]), Ordering::Less);
        assert_eq!(cmp_padded(&[false, true], &[true]), Ordering::Less);
    }

    #[test]
    fn small_run_is_monotone_and_reproducible() {
        let a = verify_monotone(500, 7, 1000).unwrap();
        assert!(a.ok(), "{:?}", a.failures);
        assert_eq!(a, verify_monotone(500, 7, 1000).unwrap());
    }
}
