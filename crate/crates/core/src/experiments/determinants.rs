//! Determinants and weighted mediants between in-order neighbours.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::codes::{fsm_run, FsmKind, FsmState};
use crate::error::{Error, Result};
use crate::foundation::{format_rational, BitWord, Rational};
use crate::trees::{inorder_addresses, inorder_linearize, node_value, TreeKind};

/// Depth accepted without an explicit opt-in.
pub const DEFAULT_MAX_DEPTH: usize = 20;
/// Hard ceiling for the in-order experiments.
pub const MAX_DEPTH: usize = 30;

/// At most this many failures are listed in a report.
const FAILURE_LIST: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExceptionClass {
    pub parent: String,
    pub child: String,
    pub e: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DeterminantReport {
    pub kind: Option<TreeKind>,
    pub depth: usize,
    pub pairs: u64,
    /// Count of pairs per exponent `e` of `det = 2^e`.
    pub exponents: BTreeMap<u64, u64>,
    /// Pairs with `e > 0` grouped by the FSM states of their leaf (V10 only).
    pub exceptions: Vec<(ExceptionClass, u64)>,
    /// Pairs whose determinant differs from the literal state table (V10 only).
    pub literal_table_mismatches: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
}

impl DeterminantReport {
    pub fn ok(&self) -> bool {
        self.failure_count == 0
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < FAILURE_LIST {
            self.failures.push(msg);
        }
    }
}

/// `p_{k+1} q_k - p_k q_{k+1}`.
pub fn determinant(left: &Rational, right: &Rational) -> BigInt {
    right.numer() * left.denom() - left.numer() * right.denom()
}

/// `Some(e)` if `d = 2^e`.
pub fn power_of_two_exponent(d: &BigInt) -> Option<u64> {
    if !d.is_positive() {
        return None;
    }
    let e = d.trailing_zeros().unwrap_or(0);
    (d == &(BigInt::one() << e)).then_some(e)
}

/// Predicted exponent for the pair formed by leaf `w` and its neighbour, which
/// is `w`'s parent iff `toward_parent`.
///
/// A leaf entering `C_e` gives `2^(e-1)` on both sides. A leaf entering `B_e`
/// gives `2^e` towards its parent and `1` on the other side. All other leaves
/// give `1`.
pub fn predicted_exponent(w: &BitWord, toward_parent: bool) -> u64 {
    let child = fsm_run(w);
    match child.kind {
        FsmKind::C => child.k as u64 - 1,
        FsmKind::B if toward_parent => child.k as u64,
        _ => 0,
    }
}

/// The exception table read literally: `C_e` gives `2^e`.
fn literal_exponent(w: &BitWord, toward_parent: bool) -> u64 {
    let child = fsm_run(w);
    match child.kind {
        FsmKind::C => child.k as u64,
        FsmKind::B if toward_parent => child.k as u64,
        _ => 0,
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth < 1 || depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    Ok(())
}

/// Checks every consecutive determinant of the top `depth` levels. SB must
/// give 1 throughout; V10 is additionally checked against the state machine.
pub fn verify_determinants(kind: TreeKind, depth: usize) -> Result<DeterminantReport> {
    check_depth(depth)?;
    if kind == TreeKind::VDC {
        return Err(Error::InvalidArgument("the vdc tree has no determinant structure".into()));
    }
    let addrs = inorder_addresses(depth)?;
    let labels = inorder_linearize(kind, depth)?;
    let mut report = DeterminantReport {
        kind: Some(kind),
        depth,
        ..Default::default()
    };
    let mut classes: BTreeMap<ExceptionClass, u64> = BTreeMap::new();
    for k in 0..labels.len() - 1 {
        report.pairs += 1;
        let (a, b) = (&labels[k], &labels[k + 1]);
        let d = determinant(a, b);
        let Some(e) = power_of_two_exponent(&d) else {
            report.fail(format!(
                "pair {k}: det({}, {}) = {d} is not a power of two",
                format_rational(a),
                format_rational(b)
            ));
            continue;
        };
        *report.exponents.entry(e).or_insert(0) += 1;
        if kind == TreeKind::SB && e != 0 {
            report.fail(format!(
                "pair {k}: det({}, {}) = {d}, expected 1",
                format_rational(a),
                format_rational(b)
            ));
        }
        if kind != TreeKind::V10 {
            continue;
        }
        // the leaf sits at the even 0-based position of the pair
        let (leaf, other) = if k % 2 == 0 { (k, k + 1) } else { (k + 1, k) };
        let w = &addrs[leaf];
        let toward_parent = w.parent().as_ref() == Some(&addrs[other]);
        let predicted = predicted_exponent(w, toward_parent);
        if predicted != e {
            report.fail(format!(
                "pair {k}: leaf {} ({}) observed 2^{e}, predicted 2^{predicted}",
                w.display(),
                fsm_run(w)
            ));
        }
        if literal_exponent(w, toward_parent) != e {
            report.literal_table_mismatches += 1;
        }
        if e > 0 {
            let parent = w.parent().map(|p| fsm_run(&p)).unwrap_or(FsmState::START);
            let class = ExceptionClass {
                parent: parent.to_string(),
                child: fsm_run(w).to_string(),
                e,
            };
            *classes.entry(class).or_insert(0) += 1;
        }
    }
    report.exceptions = classes.into_iter().collect();
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MediantReport {
    pub kind: Option<TreeKind>,
    pub depth: usize,
    pub checked: u64,
    pub plain_mediants: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
}

impl MediantReport {
    pub fn ok(&self) -> bool {
        self.failure_count == 0
    }
}

/// `x_k = (D_r p_{k-1} + D_l p_{k+1}) / (D_r q_{k-1} + D_l q_{k+1})` with
/// `D_l`, `D_r` the determinants on either side of `x_k`.
pub fn verify_mediants(kind: TreeKind, depth: usize) -> Result<MediantReport> {
    check_depth(depth)?;
    if depth < 2 {
        return Err(Error::InvalidArgument("mediants need depth >= 2".into()));
    }
    let labels = inorder_linearize(kind, depth)?;
    let mut report = MediantReport {
        kind: Some(kind),
        depth,
        ..Default::default()
    };
    for k in 1..labels.len() - 1 {
        let (l, x, r) = (&labels[k - 1], &labels[k], &labels[k + 1]);
        let dl = determinant(l, x);
        let dr = determinant(x, r);
        let num = &dr * l.numer() + &dl * r.numer();
        let den = &dr * l.denom() + &dl * r.denom();
        report.checked += 1;
        let ok = !den.is_zero() && Rational::new(num.clone(), den.clone()) == *x;
        if !ok {
            report.failure_count += 1;
            if report.failures.len() < FAILURE_LIST {
                report.failures.push(format!(
                    "k={k}: {} != ({num})/({den})",
                    format_rational(x)
                ));
            }
            continue;
        }
        if dl.is_one() && dr.is_one() {
            report.plain_mediants += 1;
        }
        // weights in lowest terms reproduce x_k up to gcd
        debug_assert!(num.gcd(&den) >= BigInt::one());
    }
    Ok(report)
}

/// Label pairs around the node at `v`, for display.
pub fn neighbours(kind: TreeKind, v: &BitWord, depth: usize) -> Result<Option<(Rational, Rational)>> {
    let addrs = inorder_addresses(depth)?;
    let Some(k) = addrs.iter().position(|a| a == v) else {
        return Ok(None);
    };
    if k == 0 || k + 1 == addrs.len() {
        return Ok(None);
    }
    Ok(Some((
        node_value(kind, &addrs[k - 1])?,
        node_value(kind, &addrs[k + 1])?,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(kind: TreeKind, depth: usize) -> Vec<u64> {
        let labels = inorder_linearize(kind, depth).unwrap();
        labels
            .windows(2)
            .map(|p| power_of_two_exponent(&determinant(&p[0], &p[1])).unwrap())
            .collect()
    }

    #[test]
    fn small_depth_examples() {
        assert_eq!(exps(TreeKind::V10, 2), vec![1, 0]);
        assert_eq!(exps(TreeKind::V10, 3), vec![2, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn fsm_rule_holds_to_depth_twelve() {
        for depth in 1..=12 {
            let r = verify_determinants(TreeKind::V10, depth).unwrap();
            assert!(r.ok(), "depth {depth}: {:?}", r.failures);
        }
    }

    #[test]
    fn stern_brocot_is_unimodular() {
        let r = verify_determinants(TreeKind::SB, 10).unwrap();
        assert!(r.ok());
        assert_eq!(r.exponents.keys().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn other_trees_have_power_of_two_determinants() {
        assert!(verify_determinants(TreeKind::V1, 10).unwrap().ok());
        assert!(verify_determinants(TreeKind::V, 10).unwrap().ok());
    }

    #[test]
    fn mediant_examples() {
        let r = verify_mediants(TreeKind::V10, 3).unwrap();
        assert!(r.ok());
        assert_eq!(r.checked, 5);
        let r = verify_mediants(TreeKind::SB, 8).unwrap();
        assert_eq!(r.plain_mediants, r.checked);
    }

    #[test]
    fn rejects_bad_depth() {
        assert!(verify_determinants(TreeKind::V10, 0).is_err());
        assert!(verify_determinants(TreeKind::V10, 31).is_err());
        assert!(verify_mediants(TreeKind::V10, 1).is_err());
    }

    #[test]
    fn power_of_two_detection() {
        assert_eq!(power_of_two_exponent(&BigInt::from(8)), Some(3));
        assert_eq!(power_of_two_exponent(&BigInt::from(1)), Some(0));
        assert_eq!(power_of_two_exponent(&BigInt::from(6)), None);
        assert_eq!(power_of_two_exponent(&BigInt::from(-2)), None);
        assert_eq!(power_of_two_exponent(&BigInt::zero()), None);
    }
}
