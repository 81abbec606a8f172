//! The five labeled binary trees. Trees are virtual: a label is computed from
//! its address on demand.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::{
    dyadic_to_word, format_rational, index_to_word, word_to_dyadic, word_to_index, BitWord,
    Dyadic, NodeIndex, Rational,
};
use crate::qmf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TreeKind {
    V,
    V1,
    V10,
    SB,
    VDC,
}

impl TreeKind {
    pub const ALL: [TreeKind; 5] = [
        TreeKind::V,
        TreeKind::V1,
        TreeKind::V10,
        TreeKind::SB,
        TreeKind::VDC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeKind::V => "v",
            TreeKind::V1 => "v1",
            TreeKind::V10 => "v10",
            TreeKind::SB => "sb",
            TreeKind::VDC => "vdc",
        }
    }

    /// Whether `x` belongs to the label set of this tree.
    pub fn contains(self, x: &Rational) -> bool {
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        match self {
            TreeKind::V => true,
            TreeKind::V1 => x > &zero,
            TreeKind::V10 | TreeKind::SB => x > &zero && x < &one,
            TreeKind::VDC => Dyadic::from_rational(x).is_ok(),
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "v" => TreeKind::V,
            "v1" => TreeKind::V1,
            "v10" => TreeKind::V10,
            "sb" => TreeKind::SB,
            "vdc" => TreeKind::VDC,
            _ => {
                return Err(Error::Parse {
                    what: "tree kind",
                    input: s.to_string(),
                })
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub address: BitWord,
    pub index: NodeIndex,
    pub label: Rational,
    pub depth: usize,
}

impl Node {
    pub fn at(kind: TreeKind, address: BitWord) -> Result<Node> {
        let label = node_value(kind, &address)?;
        Ok(Node {
            index: word_to_index(&address),
            depth: address.len(),
            label,
            address,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "index": self.index.to_string(),
            "address": self.address.to_string(),
            "depth": self.depth,
            "label": format_rational(&self.label),
        })
    }
}

pub fn node_value(kind: TreeKind, v: &BitWord) -> Result<Rational> {
    match kind {
        TreeKind::V => qmf::doublehat_inverse(v),
        TreeKind::V1 => qmf::hat_inverse(v),
        TreeKind::V10 => qmf::qmf_inverse(v),
        TreeKind::SB => qmf::sb_inverse(v),
        TreeKind::VDC => Ok(word_to_dyadic(v).to_rational()),
    }
}

/// Address of `x`; `node_value(kind, address_of(kind, x)) == x`.
pub fn address_of(kind: TreeKind, x: &Rational) -> Result<BitWord> {
    match kind {
        TreeKind::V => qmf::doublehat_forward(x),
        TreeKind::V1 => qmf::hat_forward(x),
        TreeKind::V10 => qmf::qmf_forward(x),
        TreeKind::SB => qmf::sb_forward(x),
        TreeKind::VDC => Ok(dyadic_to_word(&Dyadic::from_rational(x)?)),
    }
}

/// Labels at indices `1..=count` (breadth first).
pub fn sequence(kind: TreeKind, count: u64) -> Result<Vec<Rational>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    (1..=count)
        .map(|n| node_value(kind, &index_to_word(&NodeIndex::from_u64(n)?)))
        .collect()
}

/// All nodes with `|address| = depth`, left to right.
pub fn level(kind: TreeKind, depth: usize) -> Result<Vec<Node>> {
    if depth > 30 {
        return Err(Error::TooLarge(format!("level {depth}")));
    }
    (0..1u64 << depth)
        .into_par_iter()
        .map(|i| Node::at(kind, BitWord::from_u64(i, depth)))
        .collect()
}

/// Addresses of the top `levels` levels in symmetric order.
///
/// Position `k` (1-based) with `t` trailing zeros holds the address given by
/// the top `levels - 1 - t` of the `levels` bits of `k`.
pub fn inorder_addresses(levels: usize) -> Result<Vec<BitWord>> {
    if levels == 0 || levels > 30 {
        return Err(Error::InvalidArgument(format!(
            "in-order depth must be in 1..=30, got {levels}"
        )));
    }
    Ok((1u64..1 << levels)
        .map(|k| {
            let t = k.trailing_zeros() as usize;
            let len = levels - 1 - t;
            BitWord::from_u64(k >> (t + 1), len)
        })
        .collect())
}

/// Labels of the top `levels` levels in symmetric order.
pub fn inorder_linearize(kind: TreeKind, levels: usize) -> Result<Vec<Rational>> {
    inorder_addresses(levels)?
        .into_par_iter()
        .map(|v| node_value(kind, &v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coverage {
    pub q: u64,
    /// Longest address among `p/q`.
    pub max_len: usize,
    /// The `p` attaining it (smallest such).
    pub argmax: u64,
    pub lambda: f64,
}

/// `max |address_of(kind, p/q)| / log2 q` over `1 <= p < q`, `gcd(p, q) = 1`.
pub fn coverage_lambda(kind: TreeKind, q: u64) -> Result<Coverage> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be at least 2, got {q}")));
    }
    if kind == TreeKind::VDC {
        return Err(Error::InvalidArgument("coverage is undefined for the vdc tree".into()));
    }
    let mut best = (0usize, 0u64);
    for p in 1..q {
        if p.gcd(&q) != 1 {
            continue;
        }
        let x = Rational::new((p as i64).into(), (q as i64).into());
        let len = address_of(kind, &x)?.len();
        if len > best.0 {
            best = (len, p);
        }
    }
    Ok(Coverage {
        q,
        max_len: best.0,
        argmax: best.1,
        lambda: best.0 as f64 / (q as f64).log2(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub kind: TreeKind,
    pub depth: usize,
    pub q_max: u64,
    pub expected: u64,
    pub found: u64,
    pub missing: Vec<String>,
    pub duplicates: Vec<String>,
    pub out_of_domain: Vec<String>,
}

impl ScanReport {
    pub fn failures(&self) -> usize {
        self.missing.len() + self.duplicates.len() + self.out_of_domain.len()
    }
}

/// `(p, q)` of `qmf_inverse(v)` if `q <= limit`, reading `v` from the low
/// `len` bits of `word`.
fn v10_small(word: u64, len: u32, limit: u64) -> Option<(u64, u64)> {
    let bit = |i: u32| -> bool {
        match i.cmp(&len) {
            std::cmp::Ordering::Less => (word >> (len - 1 - i)) & 1 == 1,
            std::cmp::Ordering::Equal => true,
            std::cmp::Ordering::Greater => false,
        }
    };
    let mut pds = [0u64; 130];
    let mut n = 0;
    let mut pos = 0u32;
    loop {
        let lead = n % 2 == 1;
        let mut run = 0u32;
        while bit(pos + run) == lead {
            run += 1;
            if !lead && pos + run > len {
                // 0^omega while expecting C_I terminates the expansion
                let (mut p, mut q) = (0u128, 1u128);
                for &b in pds[..n].iter().rev() {
                    let next = b as u128 * q + p;
                    p = q;
                    q = next;
                    if q > limit as u128 {
                        return None;
                    }
                }
                return Some((p as u64, q as u64));
            }
        }
        if run >= 63 {
            return None;
        }
        let mut b = 1u64;
        for i in 0..run {
            b = (b << 1) | (bit(pos + run + 1 + i) == lead) as u64;
        }
        if b > limit {
            return None;
        }
        pds[n] = b;
        n += 1;
        pos += 2 * run + 1;
    }
}

/// `(sign, p, q)` of the label at node index `idx`, if its height is at most
/// `limit`.
fn small_label(kind: TreeKind, idx: u64, limit: u64) -> Option<(i8, u64, u64)> {
    let len = 63 - idx.leading_zeros();
    let word = idx ^ (1 << len);
    let mask = |l: u32| if l == 0 { 0 } else { u64::MAX >> (64 - l) };
    let hat = |word: u64, len: u32| -> Option<(u64, u64)> {
        if len == 0 {
            return Some((1, 1));
        }
        let rest = len - 1;
        let tail = word & mask(rest);
        if (word >> rest) & 1 == 0 {
            v10_small(tail, rest, limit)
        } else {
            v10_small(!tail & mask(rest), rest, limit).map(|(p, q)| (q, p))
        }
    };
    match kind {
        TreeKind::V10 => v10_small(word, len, limit).map(|(p, q)| (1, p, q)),
        TreeKind::V1 => hat(word, len).map(|(p, q)| (1, p, q)),
        TreeKind::V => {
            if len == 0 {
                return Some((0, 0, 1));
            }
            let rest = len - 1;
            let tail = word & mask(rest);
            if (word >> rest) & 1 == 1 {
                hat(tail, rest).map(|(p, q)| (1, p, q))
            } else {
                hat(!tail & mask(rest), rest).map(|(p, q)| (-1, p, q))
            }
        }
        _ => None,
    }
}

fn fmt_small(s: i8, p: u64, q: u64) -> String {
    format!("{}{}/{}", if s < 0 { "-" } else { "" }, p, q)
}

/// Checks that every fraction of height `max(|p|, q) <= q_max` in the label
/// set of `kind` appears exactly once among nodes of depth `<= depth`.
pub fn bijectivity_scan(kind: TreeKind, depth: usize, q_max: u64) -> Result<ScanReport> {
    if depth > 40 {
        return Err(Error::TooLarge(format!("scan depth {depth}")));
    }
    if q_max < 1 || q_max > 1 << 20 {
        return Err(Error::InvalidArgument(format!("q_max {q_max} outside 1..=2^20")));
    }
    if kind == TreeKind::VDC {
        return Err(Error::InvalidArgument("the vdc tree is labeled by dyadics".into()));
    }
    let total = 1u64 << (depth + 1);
    const CHUNK: u64 = 1 << 16;
    let chunks = total.div_ceil(CHUNK);
    let hits: Vec<Vec<(i8, u64, u64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = (c * CHUNK).max(1);
            let hi = ((c + 1) * CHUNK).min(total);
            let mut out = Vec::new();
            for idx in lo..hi {
                match kind {
                    TreeKind::SB => {
                        let v = BitWord::from_u64(idx, 64 - idx.leading_zeros() as usize);
                        let v = BitWord::from(&v.bits()[1..]);
                        let x = qmf::sb_inverse(&v).expect("every address decodes");
                        let (p, q) = (x.numer().to_u64(), x.denom().to_u64());
                        if let (Some(p), Some(q)) = (p, q) {
                            if p.max(q) <= q_max {
                                out.push((1, p, q));
                            }
                        }
                    }
                    _ => {
                        if let Some((s, p, q)) = small_label(kind, idx, q_max) {
                            if p <= q_max {
                                out.push((s, p, q));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut seen: HashMap<(i8, u64, u64), u32> = HashMap::new();
    let mut out_of_domain = Vec::new();
    for &(s, p, q) in hits.iter().flatten() {
        let x = Rational::new(
            (s as i64 * p as i64).into(),
            (q as i64).into(),
        );
        if !kind.contains(&x) {
            out_of_domain.push(fmt_small(s, p, q));
        }
        *seen.entry((s, p, q)).or_insert(0) += 1;
    }
    let mut duplicates: Vec<_> = seen
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(&k, _)| k)
        .collect();
    duplicates.sort();

    let mut expected = 0u64;
    let mut missing = Vec::new();
    let mut want = |s: i8, p: u64, q: u64| {
        expected += 1;
        if !seen.contains_key(&(s, p, q)) {
            missing.push(fmt_small(s, p, q));
        }
    };
    for q in 1..=q_max {
        for p in 0..=q_max {
            if p.gcd(&q) != 1 {
                continue;
            }
            let x = Rational::new((p as i64).into(), (q as i64).into());
            match kind {
                TreeKind::V10 | TreeKind::SB if p > 0 && p < q => want(1, p, q),
                TreeKind::V1 if p > 0 => want(1, p, q),
                TreeKind::V if p == 0 => want(0, 0, 1),
                TreeKind::V => {
                    want(1, p, q);
                    want(-1, p, q);
                }
                _ => {}
            }
            debug_assert!(x.is_positive() || p == 0);
        }
    }

    Ok(ScanReport {
        kind,
        depth,
        q_max,
        expected,
        found: seen.len() as u64,
        missing,
        duplicates: duplicates.into_iter().map(|(s, p, q)| fmt_small(s, p, q)).collect(),
        out_of_domain,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
    Dot,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            "dot" => Ok(ExportFormat::Dot),
            _ => Err(Error::Parse {
                what: "export format",
                input: s.to_string(),
            }),
        }
    }
}

/// Largest depth accepted by the DOT exporter.
pub const MAX_DOT_DEPTH: usize = 6;

/// Serializes levels `0..=depth`.
pub fn export_tree(kind: TreeKind, depth: usize, format: ExportFormat) -> Result<String> {
    if format == ExportFormat::Dot && depth > MAX_DOT_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "dot export is limited to depth {MAX_DOT_DEPTH}"
        )));
    }
    if depth > 24 {
        return Err(Error::TooLarge(format!("export depth {depth}")));
    }
    let mut nodes = Vec::new();
    for d in 0..=depth {
        nodes.extend(level(kind, d)?);
    }
    Ok(match format {
        ExportFormat::Json => {
            let arr: Vec<_> = nodes.iter().map(Node::to_json).collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "kind": kind.name(),
                "depth": depth,
                "nodes": arr,
            }))
            .expect("json")
                + "\n"
        }
        ExportFormat::Csv => {
            let mut s = String::from("index,address,depth,label\n");
            for n in &nodes {
                s += &format!(
                    "{},{},{},{}\n",
                    n.index,
                    n.address,
                    n.depth,
                    format_rational(&n.label)
                );
            }
            s
        }
        ExportFormat::Dot => {
            let mut s = format!("digraph {} {{\n  node [shape=plaintext];\n", kind.name());
            for n in &nodes {
                s += &format!("  n{} [label=\"{}\"];\n", n.index, format_rational(&n.label));
            }
            for n in &nodes {
                if n.depth > 0 {
                    let parent: BigUint = n.index.value() >> 1u32;
                    s += &format!("  n{} -> n{};\n", parent, n.index);
                }
            }
            s + "}\n"
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::rational;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    fn fracs(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rational(p, q)).collect()
    }

    #[test]
    fn node_value_examples() {
        assert_eq!(node_value(TreeKind::V, &w("0101")).unwrap(), rational(-3, 5));
        assert_eq!(node_value(TreeKind::V10, &w("111")).unwrap(), rational(8, 9));
        assert_eq!(node_value(TreeKind::VDC, &w("0111")).unwrap(), rational(15, 32));
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(
            sequence(TreeKind::V, 7).unwrap(),
            fracs(&[(0, 1), (-1, 1), (1, 1), (-2, 1), (-1, 2), (1, 2), (2, 1)])
        );
        assert_eq!(
            sequence(TreeKind::V1, 7).unwrap(),
            fracs(&[(1, 1), (1, 2), (2, 1), (1, 4), (2, 3), (3, 2), (4, 1)])
        );
        assert_eq!(
            sequence(TreeKind::V10, 7).unwrap(),
            fracs(&[(1, 2), (1, 4), (2, 3), (1, 8), (1, 3), (3, 5), (4, 5)])
        );
        assert!(sequence(TreeKind::V, 0).is_err());
    }

    #[test]
    fn inorder_examples() {
        assert_eq!(
            inorder_linearize(TreeKind::V10, 2).unwrap(),
            fracs(&[(1, 4), (1, 2), (2, 3)])
        );
        assert_eq!(
            inorder_linearize(TreeKind::V10, 3).unwrap(),
            fracs(&[(1, 8), (1, 4), (1, 3), (1, 2), (3, 5), (2, 3), (4, 5)])
        );
        assert_eq!(
            inorder_linearize(TreeKind::VDC, 2).unwrap(),
            fracs(&[(1, 4), (1, 2), (3, 4)])
        );
    }

    #[test]
    fn inorder_is_sorted_by_dyadic() {
        let addrs = inorder_addresses(6).unwrap();
        let d: Vec<Rational> = addrs.iter().map(|v| word_to_dyadic(v).to_rational()).collect();
        assert!(d.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(addrs.len(), 63);
    }

    #[test]
    fn address_examples() {
        assert_eq!(address_of(TreeKind::V10, &rational(4, 9)).unwrap(), w("0111"));
        assert_eq!(address_of(TreeKind::V, &rational(-5, 3)).unwrap(), w("0010"));
        assert_eq!(address_of(TreeKind::V1, &rational(1, 1)).unwrap(), w(""));
        assert_eq!(address_of(TreeKind::VDC, &rational(15, 32)).unwrap(), w("0111"));
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage_lambda(TreeKind::V10, 2).unwrap().max_len, 0);
        let sb = coverage_lambda(TreeKind::SB, 16).unwrap();
        assert_eq!((sb.max_len, sb.argmax), (14, 1));
        assert!(coverage_lambda(TreeKind::V10, 1).is_err());
    }

    #[test]
    fn small_label_matches_exact() {
        for kind in [TreeKind::V10, TreeKind::V1, TreeKind::V] {
            for idx in 1u64..1 << 12 {
                let v = index_to_word(&NodeIndex::from_u64(idx).unwrap());
                let x = node_value(kind, &v).unwrap();
                let h = x.numer().abs().max(x.denom().clone()).to_u64().unwrap();
                let fast = small_label(kind, idx, 1000);
                if h <= 1000 {
                    let (s, p, q) = fast.unwrap_or_else(|| panic!("{kind} {v} {x}"));
                    let y = Rational::new((s as i64 * p as i64).into(), (q as i64).into());
                    assert_eq!(x, y, "{kind} {v}");
                } else {
                    assert!(fast.is_none(), "{kind} {v} height {h}");
                }
            }
        }
    }

    #[test]
    fn scan_small_trees() {
        let r = bijectivity_scan(TreeKind::V, 6, 2).unwrap();
        assert_eq!(r.failures(), 0, "{r:?}");
        assert_eq!(r.expected, 7);
        let r = bijectivity_scan(TreeKind::V1, 10, 8).unwrap();
        assert_eq!(r.failures(), 0, "{r:?}");
        let r = bijectivity_scan(TreeKind::V10, 12, 8).unwrap();
        assert_eq!(r.failures(), 0, "{r:?}");
        let r = bijectivity_scan(TreeKind::SB, 9, 8).unwrap();
        assert_eq!(r.failures(), 0, "{r:?}");
    }

    #[test]
    fn scan_reports_missing_when_too_shallow() {
        let r = bijectivity_scan(TreeKind::V10, 2, 8).unwrap();
        assert!(!r.missing.is_empty());
    }

    #[test]
    fn exports() {
        let csv = export_tree(TreeKind::V10, 1, ExportFormat::Csv).unwrap();
        assert_eq!(csv, "index,address,depth,label\n1,,0,1/2\n2,0,1,1/4\n3,1,1,2/3\n");
        let dot = export_tree(TreeKind::V, 2, ExportFormat::Dot).unwrap();
        assert!(dot.contains("n2 -> n5;"));
        assert!(export_tree(TreeKind::V, 7, ExportFormat::Dot).is_err());
        let json = export_tree(TreeKind::V1, 1, ExportFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["nodes"][2]["label"], "2/1");
    }
}
