//! Experiments on dyadic grids: integral, arc length, envelope and parabola
//! bounds, self-similarity.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::{format_rational, ratio_to_f64, Dyadic, Rational};
use crate::measures::sum_range;
use crate::qmf::{qmf_bar, qmf_bar_closed, qmf_bar_f64, qmf_bar_inverse, qmf_bar_inverse_closed};

/// Largest grid exponent for floating-point scans.
pub const MAX_K: u32 = 30;
/// Largest grid exponent for exact accumulation.
pub const MAX_EXACT_K: u32 = 16;
/// Largest exponent for exact inequality scans.
pub const MAX_SCAN_K: u32 = 20;

fn check_k(k: u32, max: u32) -> Result<()> {
    if k < 1 || k > max {
        return Err(Error::InvalidArgument(format!("k must be in 1..={max}, got {k}")));
    }
    Ok(())
}

fn dyadic(a: u64, k: u32) -> Rational {
    Rational::new(BigInt::from(a), BigInt::one() << k)
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e))
    }
}

/// `2^-k sum_{a=1}^{2^k-1} (qmf_bar(a/2^k) - a/2^k)`.
pub fn riemann_integral(k: u32) -> Result<f64> {
    check_k(k, MAX_K)?;
    let scale = (-(k as f64)).exp2();
    let s = sum_range(1, (1u64 << k) - 1, |a| qmf_bar_f64(a, k) - a as f64 * scale);
    Ok(s * scale)
}

/// The same sum in exact rational arithmetic.
pub fn riemann_integral_exact(k: u32) -> Result<Rational> {
    check_k(k, MAX_EXACT_K)?;
    let n = 1u64 << k;
    let parts: Vec<Rational> = (1..n)
        .collect::<Vec<_>>()
        .par_chunks(1 << 10)
        .map(|chunk| {
            chunk.iter().fold(Rational::zero(), |acc, &a| {
                let x = dyadic(a, k);
                acc + qmf_bar(&x).expect("grid point in (0,1)").to_rational() - x
            })
        })
        .collect();
    let total = parts.into_iter().fold(Rational::zero(), |acc, p| acc + p);
    Ok(total / Rational::from_integer(BigInt::from(n)))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

/// Length of the polygon through `(a/2^k, qmf_bar(a/2^k))`, `a = 0..=2^k`.
pub fn arc_length(k: u32) -> Result<f64> {
    check_k(k, MAX_K)?;
    let n = 1u64 << k;
    let h = (-(k as f64)).exp2();
    let y = |a: u64| match a {
        0 => 0.0,
        a if a == n => 1.0,
        a => qmf_bar_f64(a, k),
    };
    Ok(sum_range(0, n - 1, |a| h.hypot(y(a + 1) - y(a))))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnvelopeReport {
    pub k: u32,
    pub points: u64,
    pub violations: Vec<String>,
    /// `qmf_bar_inverse(x) = 8x/9`.
    pub left_equalities: Vec<String>,
    /// `qmf_bar_inverse(x) = x` or `qmf_bar(x) = x`.
    pub middle_equalities: Vec<String>,
    /// `qmf_bar(x) = 9x/8`.
    pub right_equalities: Vec<String>,
    /// Grid points where equality was expected but not found, or found but not expected.
    pub anchor_mismatches: Vec<String>,
    /// `qmf_bar(2/3 * 2^-j) = 3/4 * 2^-j` for `j = 0..=k`, the right bound off the grid.
    pub touch_points: Vec<String>,
}

impl EnvelopeReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.anchor_mismatches.is_empty()
    }
}

/// Checks `8x/9 <= qmf_bar_inverse(x) <= x <= qmf_bar(x) <= 9x/8` at every
/// `a/2^k`. Equality on the left is expected exactly at `x = 3 * 2^(-j-2)`, in
/// the middle exactly at `x = 2^-j`, and never on the right.
pub fn verify_envelope(k: u32) -> Result<EnvelopeReport> {
    check_k(k, MAX_SCAN_K)?;
    let n = 1u64 << k;
    let eight_ninths = Rational::new(8.into(), 9.into());
    let nine_eighths = Rational::new(9.into(), 8.into());
    type Row = (u64, bool, bool, bool, Option<String>);
    let rows: Vec<Row> = (1..n)
        .into_par_iter()
        .map(|a| {
            let x = dyadic(a, k);
            let d = Dyadic::from_rational(&x).expect("dyadic grid");
            let inv = qmf_bar_inverse(&d).expect("dyadic in (0,1)");
            let fwd = qmf_bar(&x).expect("grid point in (0,1)").to_rational();
            let lo = &eight_ninths * &x;
            let hi = &nine_eighths * &x;
            let ok = lo <= inv && inv <= x && x <= fwd && fwd <= hi;
            let viol = (!ok).then(|| {
                format!(
                    "x={}: inv={} fwd={}",
                    format_rational(&x),
                    format_rational(&inv),
                    format_rational(&fwd)
                )
            });
            (a, lo == inv, inv == x || fwd == x, fwd == hi, viol)
        })
        .collect();
    let mut r = EnvelopeReport {
        k,
        points: n - 1,
        ..Default::default()
    };
    for (a, left, middle, right, viol) in rows {
        let x = dyadic(a, k);
        let name = format_rational(&x);
        if let Some(v) = viol {
            r.violations.push(v);
        }
        let (want_left, want_middle) = envelope_anchor(a);
        if left {
            r.left_equalities.push(name.clone());
        }
        if middle {
            r.middle_equalities.push(name.clone());
        }
        if right {
            r.right_equalities.push(name.clone());
        }
        if left != want_left || middle != want_middle || right {
            r.anchor_mismatches.push(format!(
                "{name}: equalities (left {left}, middle {middle}, right {right})"
            ));
        }
    }
    for j in 0..=k as i64 {
        let x = Rational::new(2.into(), 3.into()) * pow2(-j);
        let y = qmf_bar(&x)?.to_rational();
        let expected = Rational::new(3.into(), 4.into()) * pow2(-j);
        let tag = if y == expected { "=" } else { "!=" };
        r.touch_points.push(format!(
            "qmf_bar({}) {tag} {}",
            format_rational(&x),
            format_rational(&expected)
        ));
        if y != expected {
            r.anchor_mismatches.push(format!("touch point j={j}"));
        }
    }
    Ok(r)
}

/// `(left, middle)` equality expected at `a/2^k`: odd part 3 or 1.
fn envelope_anchor(a: u64) -> (bool, bool) {
    let t = a.trailing_zeros();
    let odd = a >> t;
    (odd == 3, odd == 1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParabolaReport {
    pub k_max: u32,
    pub points: u64,
    pub violations: Vec<String>,
    pub equalities: Vec<String>,
    pub anchor_mismatches: Vec<String>,
}

impl ParabolaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.anchor_mismatches.is_empty()
    }
}

/// Largest `k_max` accepted by the parabola scan.
pub const MAX_PARABOLA_K: u32 = 16;
/// Grid refinement below each band: step `2^(-j-PARABOLA_REFINE)`.
pub const PARABOLA_REFINE: u32 = 10;

/// `4/3 * 2^j (y - 3/4 * 2^-j)^2 + y - 1/12 * 2^-j`.
pub fn parabola_bound(j: u32, y: &Rational) -> Rational {
    let s = pow2(-(j as i64));
    let t = y - Rational::new(3.into(), 4.into()) * &s;
    Rational::new(4.into(), 3.into()) * pow2(j as i64) * &t * &t + y
        - Rational::new(1.into(), 12.into()) * s
}

/// Checks `qmf_bar_inverse(y) >= parabola_bound(j, y)` on
/// `y = 2^(-j-1) + i 2^(-j-10)`, `i = 0..=512`, for each `j <= k_max`.
/// Equality is expected exactly at `2^(-j-1)`, `3/4 * 2^-j` and `2^-j`.
pub fn verify_parabola(k_max: u32) -> Result<ParabolaReport> {
    if k_max > MAX_PARABOLA_K {
        return Err(Error::InvalidArgument(format!(
            "k_max must be at most {MAX_PARABOLA_K}, got {k_max}"
        )));
    }
    let steps = 1u64 << (PARABOLA_REFINE - 1);
    let grid: Vec<(u32, u64)> = (0..=k_max)
        .flat_map(|j| (0..=steps).map(move |i| (j, i)))
        .collect();
    let rows: Vec<(u32, u64, std::result::Result<bool, String>)> = grid
        .into_par_iter()
        .map(|(j, i)| {
            let y = pow2(-(j as i64) - 1) + Rational::from_integer(i.into()) * pow2(-(j as i64) - PARABOLA_REFINE as i64);
            let inv = qmf_bar_inverse_closed(&y).expect("dyadic in (0,1]");
            let bound = parabola_bound(j, &y);
            let res = if inv < bound {
                Err(format!(
                    "j={j} y={}: {} < {}",
                    format_rational(&y),
                    format_rational(&inv),
                    format_rational(&bound)
                ))
            } else {
                Ok(inv == bound)
            };
            (j, i, res)
        })
        .collect();
    let mut r = ParabolaReport {
        k_max,
        points: rows.len() as u64,
        ..Default::default()
    };
    for (j, i, res) in rows {
        let want = i == 0 || i == steps || i == steps / 2;
        let y = pow2(-(j as i64) - 1) + Rational::from_integer(i.into()) * pow2(-(j as i64) - PARABOLA_REFINE as i64);
        match res {
            Err(v) => r.violations.push(v),
            Ok(eq) => {
                if eq {
                    r.equalities.push(format!("j={j} y={}", format_rational(&y)));
                }
                if eq != want {
                    r.anchor_mismatches.push(format!(
                        "j={j} y={}: equality {eq}, expected {want}",
                        format_rational(&y)
                    ));
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfSimilarity {
    pub k: u32,
    pub max_deviation: f64,
    pub argmax: String,
    /// `|qmf_bar(x/2) - qmf_bar(x)/2|` at `x = 2/3 * 2^-j`, `j = 0..=k`.
    pub anchor_deviations: Vec<f64>,
}

/// `max_a |qmf_bar(x/2) - qmf_bar(x)/2|` over `x = a/2^k`, exactly.
pub fn self_similarity_stat(k: u32) -> Result<SelfSimilarity> {
    check_k(k, MAX_SCAN_K)?;
    let n = 1u64 << k;
    let half = Rational::new(1.into(), 2.into());
    let best = (1..n)
        .into_par_iter()
        .map(|a| {
            let x = dyadic(a, k);
            let dev = qmf_bar(&(&x * &half)).expect("in (0,1)").to_rational()
                - qmf_bar(&x).expect("in (0,1)").to_rational() * &half;
            (dev.abs(), a)
        })
        .reduce(
            || (Rational::zero(), u64::MAX),
            |p, q| if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p },
        );
    let mut anchors = Vec::new();
    for j in 0..=k as i64 {
        let x = Rational::new(2.into(), 3.into()) * pow2(-j);
        let dev = qmf_bar_closed(&(&x * &half))? - qmf_bar_closed(&x)? * &half;
        anchors.push(rational_to_f64(&dev.abs()));
    }
    Ok(SelfSimilarity {
        k,
        max_deviation: rational_to_f64(&best.0),
        argmax: format_rational(&dyadic(best.1, k)),
        anchor_deviations: anchors,
    })
}

/// CSV rows `x,qmf_bar(x),qmf_bar(x)-x` over `a/2^k`, `a = 0..=2^k`.
pub fn plotdata(k: u32) -> Result<String> {
    check_k(k, MAX_SCAN_K)?;
    let n = 1u64 << k;
    let h = (-(k as f64)).exp2();
    let mut out = String::from("x,qmf_bar,deviation\n");
    for a in 0..=n {
        let x = a as f64 * h;
        let y = match a {
            0 => 0.0,
            a if a == n => 1.0,
            a => qmf_bar_f64(a, k),
        };
        out += &format!("{x},{y},{}\n", y - x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_small_k() {
        assert_eq!(riemann_integral(1).unwrap(), 0.0);
        for k in 1..=8 {
            let exact = rational_to_f64(&riemann_integral_exact(k).unwrap());
            assert!((riemann_integral(k).unwrap() - exact).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn arc_length_one() {
        assert_eq!(arc_length(1).unwrap(), std::f64::consts::SQRT_2);
        let mut prev = 0.0;
        for k in 1..=10 {
            let l = arc_length(k).unwrap();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn envelope_small() {
        let r = verify_envelope(8).unwrap();
        assert!(r.ok(), "{:?}", r.anchor_mismatches);
        assert!(r.left_equalities.contains(&"3/4".to_string()));
        assert!(r.middle_equalities.contains(&"1/2".to_string()));
        assert!(r.right_equalities.is_empty());
    }

    #[test]
    fn parabola_anchor_points() {
        let y = Rational::new(3.into(), 4.into());
        assert_eq!(parabola_bound(0, &y), Rational::new(2.into(), 3.into()));
        let y = Rational::new(1.into(), 2.into());
        assert_eq!(parabola_bound(0, &y), y);
        let r = verify_parabola(3).unwrap();
        assert!(r.anchor_mismatches.is_empty(), "{:?}", r.anchor_mismatches);
        assert_eq!(r.equalities.len(), 12);
    }

    #[test]
    fn parabola_fails_above_three_quarters() {
        // qmf_bar_inverse(7/8) = 4/5 but the bound gives 13/16
        let y = Rational::new(7.into(), 8.into());
        assert_eq!(
            qmf_bar_inverse_closed(&y).unwrap(),
            Rational::new(4.into(), 5.into())
        );
        assert_eq!(parabola_bound(0, &y), Rational::new(13.into(), 16.into()));
        let r = verify_parabola(0).unwrap();
        assert!(r.violations.iter().any(|v| v.starts_with("j=0 y=7/8:")));
        assert!(!r.ok());
    }

    #[test]
    fn self_similarity_runs() {
        let s = self_similarity_stat(6).unwrap();
        assert!(s.max_deviation >= 0.0);
        assert!(s.anchor_deviations.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn plot_rows() {
        let csv = plotdata(2).unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.contains("0.5,0.5,0\n"));
    }

    #[test]
    fn rejects_out_of_range_k() {
        assert!(riemann_integral(0).is_err());
        assert!(arc_length(31).is_err());
        assert!(verify_envelope(21).is_err());
        assert!(verify_parabola(17).is_err());
    }
}
