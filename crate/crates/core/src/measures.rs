//! Gauss-Kuzmin statistics of partial denominators and average code lengths.
//!
//! Series are summed in fixed chunks with compensated summation and the chunk
//! totals combined in order, so results do not depend on thread count.

use std::f64::consts::{LN_2, LOG2_E, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const CHUNK: u64 = 1 << 16;

/// `sum f(i)` for `i` in `lo..=hi`, deterministic under any thread count.
pub fn sum_range<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return 0.0;
    }
    let chunks = (hi - lo) / CHUNK + 1;
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = lo + c * CHUNK;
            let b = (a + CHUNK - 1).min(hi);
            let mut s = Neumaier::new();
            for i in a..=b {
                s.add(f(i));
            }
            s.value()
        })
        .collect();
    let mut s = Neumaier::new();
    for p in parts {
        s.add(p);
    }
    s.value()
}

/// `log2(1 + 1/(b(b+2)))`, the limiting frequency of partial denominator `b`.
pub fn gauss_kuzmin(b: u64) -> f64 {
    assert!(b >= 1, "partial denominators start at 1");
    let b = b as f64;
    (1.0 / (b * (b + 2.0))).ln_1p() * LOG2_E
}

/// `sum_{b >= n} gauss_kuzmin(b) = log2(1 + 1/n)`.
pub fn gauss_kuzmin_tail(n: u64) -> f64 {
    assert!(n >= 1);
    (1.0 / n as f64).ln_1p() * LOG2_E
}

/// `-log2 gauss_kuzmin(b)`.
pub fn ideal_length(b: u64) -> f64 {
    -gauss_kuzmin(b).log2()
}

/// `(b + sqrt(b^2 + 4)) / 2`.
pub fn phi(b: u64) -> f64 {
    let b = b as f64;
    (b + (b * b + 4.0).sqrt()) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EntropyCode {
    Levy,
    GK,
    CiCii,
    SB,
}

impl EntropyCode {
    pub const ALL: [EntropyCode; 4] = [
        EntropyCode::Levy,
        EntropyCode::GK,
        EntropyCode::CiCii,
        EntropyCode::SB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntropyCode::Levy => "levy",
            EntropyCode::GK => "gk",
            EntropyCode::CiCii => "ci",
            EntropyCode::SB => "sb",
        }
    }
}

impl fmt::Display for EntropyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntropyCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "levy" => EntropyCode::Levy,
            "gk" => EntropyCode::GK,
            "ci" | "cii" | "ci_cii" | "ci-cii" => EntropyCode::CiCii,
            "sb" | "unary" => EntropyCode::SB,
            _ => {
                return Err(Error::Parse {
                    what: "entropy code",
                    input: s.to_string(),
                })
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum EntropyValue {
    Finite(f64),
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyResult {
    pub code: EntropyCode,
    pub value: EntropyValue,
    /// The true value lies within `value +- error_bound` (finite case).
    pub error_bound: f64,
    /// Number of terms or blocks summed explicitly.
    pub terms: u64,
    /// Partial sum, reported for divergent series.
    pub partial: Option<f64>,
}

impl EntropyResult {
    pub fn finite(&self) -> Option<f64> {
        match self.value {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::Divergent => None,
        }
    }
}

/// `pi^2 / (6 ln^2 2)`.
pub const LEVY_ENTROPY: f64 = PI * PI / (6.0 * LN_2 * LN_2);

/// Terms summed for the Gauss-Kuzmin entropy.
pub const GK_TERMS: u64 = 10_000_000;

/// Dyadic blocks summed for the `C_I`/`C_II` average length.
pub const CI_BLOCKS: u32 = 64;

/// Terms in the displayed partial sum of the divergent unary average.
pub const SB_TERMS: u64 = 1_000_000;

pub fn entropy(code: EntropyCode) -> EntropyResult {
    match code {
        EntropyCode::Levy => EntropyResult {
            code,
            value: EntropyValue::Finite(LEVY_ENTROPY),
            error_bound: 4.0 * f64::EPSILON * LEVY_ENTROPY,
            terms: 0,
            partial: None,
        },
        EntropyCode::GK => {
            let n = GK_TERMS;
            let s = sum_range(1, n, |b| {
                let m = gauss_kuzmin(b);
                -m * m.log2()
            });
            // mu(b) <= log2(e)/b^2 and -log2 mu(b) <= 2 log2(b+1); integral bound
            let nf = n as f64;
            let tail = 2.0 * LOG2_E * LOG2_E * (((nf + 1.0).ln() + 1.0) / nf);
            EntropyResult {
                code,
                value: EntropyValue::Finite(s + tail / 2.0),
                error_bound: tail / 2.0 + 1e-12,
                terms: n,
                partial: None,
            }
        }
        EntropyCode::CiCii => {
            // block [2^k, 2^(k+1)) has length 2k+1 and telescoped mass
            let mut s = Neumaier::new();
            for k in 0..CI_BLOCKS {
                let mass = LOG2_E
                    * ((-(k as f64)).exp2().ln_1p() - (-(k as f64) - 1.0).exp2().ln_1p());
                s.add((2 * k + 1) as f64 * mass);
            }
            let kk = CI_BLOCKS as f64 - 1.0;
            let tail = LOG2_E * (2.0 * kk + 5.0) * (-kk - 1.0).exp2();
            EntropyResult {
                code,
                value: EntropyValue::Finite(s.value() + tail / 2.0),
                error_bound: tail / 2.0 + 1e-14,
                terms: CI_BLOCKS as u64,
                partial: None,
            }
        }
        EntropyCode::SB => {
            // b * mu(b) ~ log2(e)/b: harmonic divergence
            let partial = sum_range(1, SB_TERMS, |b| b as f64 * gauss_kuzmin(b));
            EntropyResult {
                code,
                value: EntropyValue::Divergent,
                error_bound: f64::INFINITY,
                terms: SB_TERMS,
                partial: Some(partial),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KhinchinEstimate {
    pub b_max: u64,
    /// `2^(sum_{b <= b_max} mu(b) log2 b)`, a lower bound.
    pub value: f64,
    /// The constant lies in `[value, value + error_bound]`.
    pub error_bound: f64,
}

/// Truncated product `prod_{b <= b_max} b^mu(b)`.
pub fn khinchin_estimate(b_max: u64) -> Result<KhinchinEstimate> {
    if b_max == 0 {
        return Err(Error::InvalidArgument("b_max must be at least 1".into()));
    }
    let s = sum_range(2, b_max, |b| gauss_kuzmin(b) * (b as f64).log2());
    // mu(b) log2 b <= log2(e)^2 ln(b)/b^2, summed by the integral from b_max
    let n = b_max as f64;
    let tail = LOG2_E * LOG2_E * (n.ln() + 1.0) / n;
    let value = s.exp2();
    Ok(KhinchinEstimate {
        b_max,
        value,
        error_bound: value * (tail.exp2() - 1.0),
    })
}

/// `3 / log2(phi_2)`: below this no integral length assignment satisfies Kraft.
pub fn optimality_threshold() -> f64 {
    3.0 / phi(2).log2()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KraftReport {
    pub lambda: f64,
    pub b_max: u64,
    /// `floor(lambda * log2 phi_b)` for `b = 1..=b_max`.
    pub lengths: Vec<u32>,
    pub sum: f64,
}

impl KraftReport {
    pub fn violates(&self) -> bool {
        self.sum > 1.0
    }
}

/// Kraft sum of the longest integral lengths compatible with depth
/// `lambda * log2 q` on constant-partial-denominator families.
pub fn kraft_diagnostic(lambda: f64, b_max: u64) -> Result<KraftReport> {
    if !(lambda > 0.0) || b_max == 0 {
        return Err(Error::InvalidArgument(format!(
            "need lambda > 0 and b_max >= 1, got {lambda}, {b_max}"
        )));
    }
    let lengths: Vec<u32> = (1..=b_max)
        .map(|b| (lambda * phi(b).log2()).floor() as u32)
        .collect();
    let mut s = Neumaier::new();
    for &l in &lengths {
        s.add((-(l as f64)).exp2());
    }
    Ok(KraftReport {
        lambda,
        b_max,
        lengths,
        sum: s.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kuzmin_examples() {
        assert!((gauss_kuzmin(1) - 0.4150).abs() < 5e-5);
        assert!((gauss_kuzmin(2) - 0.1699).abs() < 5e-5);
        assert!((gauss_kuzmin(63) - 0.00035).abs() < 5e-6);
    }

    #[test]
    fn ideal_lengths() {
        assert!((ideal_length(1) - 1.269).abs() < 5e-4);
        assert!((ideal_length(4) - 4.086).abs() < 5e-4);
        assert!((ideal_length(16) - 7.644).abs() < 5e-4);
    }

    #[test]
    fn telescoping() {
        for n in [10u64, 100, 1000] {
            let s = sum_range(1, n, gauss_kuzmin);
            assert!((s - (1.0 - gauss_kuzmin_tail(n + 1))).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_examples() {
        assert!((phi(1) - 1.618).abs() < 1e-3);
        assert!((phi(2) - 2.414).abs() < 1e-3);
        assert!((phi(4) - 4.236).abs() < 1e-3);
        for b in 1..50 {
            let p = phi(b);
            assert!((p * p - b as f64 * p - 1.0).abs() < 1e-10);
        }
        assert!((phi(14) - phi(2).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn entropies() {
        let levy = entropy(EntropyCode::Levy).finite().unwrap();
        assert!((levy - 3.42371).abs() < 1e-5);
        assert!(((levy / 2.0).exp2() - 3.27582).abs() < 1e-5);
        let ci = entropy(EntropyCode::CiCii);
        assert!((ci.finite().unwrap() - 3.50698).abs() < 1e-4);
        assert!(ci.error_bound < 1e-12);
        assert_eq!(entropy(EntropyCode::SB).value, EntropyValue::Divergent);
    }

    #[test]
    fn khinchin_small() {
        let k = khinchin_estimate(1).unwrap();
        assert_eq!(k.value, 1.0);
        let a = khinchin_estimate(100).unwrap().value;
        let b = khinchin_estimate(1000).unwrap().value;
        assert!(1.0 < a && a < b && b < 2.68546);
    }

    #[test]
    fn kraft_obstruction() {
        let t = optimality_threshold();
        assert!((t - 2.35931).abs() < 1e-5);
        assert!((t - 9.0 / phi(14).log2()).abs() < 1e-12);
        assert!(kraft_diagnostic(t - 1e-6, 64).unwrap().violates());
        assert!(!kraft_diagnostic(3.0, 64).unwrap().violates());
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut s = Neumaier::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
