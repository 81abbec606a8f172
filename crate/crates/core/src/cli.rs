//! Command-line front end. [`run`] parses arguments, dispatches to the library
//! and renders plain text or a JSON envelope.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification failure.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::cfe::{Cfe, EvenCfe};
use crate::codes::{decode_prefix, encode, fsm_run, fsm_step, CodeFlavor, Decoded, FsmState};
use crate::error::{Error, Result};
use crate::experiments::{
    arc_length, derivative_probe, plotdata, riemann_integral, riemann_integral_exact,
    self_similarity_stat, verify_determinants, verify_envelope, verify_mediants, verify_monotone,
    verify_parabola, Side,
};
use crate::experiments::probe::derivative_probe_step;
use crate::foundation::{
    dyadic_to_index, dyadic_to_word, format_rational, height, index_to_dyadic, index_to_word,
    parse_rational, word_to_dyadic, word_to_index, BitWord, Dyadic, NodeIndex, Rational,
};
use crate::measures::{entropy, khinchin_estimate, kraft_diagnostic, optimality_threshold, EntropyCode};
use crate::qmf::{
    doublehat_forward, doublehat_inverse, hat_forward, hat_inverse, minkowski_q,
    minkowski_q_unary, qmf_bar_closed, qmf_bar_inverse, qmf_bar_inverse_closed, qmf_inverse,
    qmf_trace, sb_forward, sb_inverse,
};
use crate::trees::{
    address_of, bijectivity_scan, coverage_lambda, export_tree, sequence, ExportFormat, Node,
    TreeKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Depth or grid exponent above which `--big` is required.
pub const BIG_THRESHOLD: u64 = 20;

/// Subcommand paths and the library operations each one reaches.
pub const DISPATCH: &[(&str, &[&str])] = &[
    ("encode", &["codes::encode"]),
    ("decode", &["codes::decode_prefix"]),
    ("cfe", &["cfe::Cfe::expand", "cfe::EvenCfe::of", "foundation::height"]),
    ("convergents", &["cfe::Cfe::convergents"]),
    ("qmf", &["qmf::qmf_trace", "qmf::qmf_bar_closed"]),
    ("qmf-inv", &["qmf::qmf_inverse", "qmf::qmf_bar_inverse", "qmf::qmf_bar_inverse_closed"]),
    ("hat", &["qmf::hat_forward", "qmf::hat_inverse"]),
    ("doublehat", &["qmf::doublehat_forward", "qmf::doublehat_inverse"]),
    (
        "minkowski",
        &["qmf::minkowski_q", "qmf::minkowski_q_unary", "qmf::sb_forward", "qmf::sb_inverse"],
    ),
    ("tree", &["trees::export_tree"]),
    ("seq", &["trees::sequence"]),
    ("coverage", &["trees::coverage_lambda"]),
    ("node", &["trees::Node::at"]),
    ("address", &["trees::address_of"]),
    (
        "iota",
        &[
            "foundation::word_to_index",
            "foundation::index_to_word",
            "foundation::word_to_dyadic",
            "foundation::dyadic_to_word",
            "foundation::index_to_dyadic",
            "foundation::dyadic_to_index",
        ],
    ),
    ("fsm", &["codes::fsm_step", "codes::fsm_run"]),
    ("verify determinants", &["experiments::verify_determinants"]),
    ("verify mediants", &["experiments::verify_mediants"]),
    ("verify bijection", &["trees::bijectivity_scan"]),
    ("verify envelope", &["experiments::verify_envelope"]),
    ("verify parabola", &["experiments::verify_parabola"]),
    ("verify monotone", &["experiments::verify_monotone"]),
    ("measure entropy", &["measures::entropy"]),
    ("measure khinchin", &["measures::khinchin_estimate"]),
    ("measure integral", &["experiments::riemann_integral", "experiments::riemann_integral_exact"]),
    ("measure arclength", &["experiments::arc_length"]),
    ("measure kraft", &["measures::kraft_diagnostic", "measures::optimality_threshold"]),
    ("measure selfsim", &["experiments::self_similarity_stat"]),
    ("probe-derivative", &["experiments::derivative_probe", "experiments::derivative_probe_step"]),
    ("plotdata", &["experiments::plotdata"]),
];

#[derive(Parser, Debug)]
#[command(name = "vtree", version, about = "Binary continued-fraction codes, V trees and question-mark functions")]
struct Cli {
    /// Emit a JSON envelope instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Omit the elapsed_ms field from JSON output.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Allow long-running sizes (depth or k above 20).
    #[arg(long, global = true)]
    big: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Codeword of a positive integer.
    Encode {
        b: BigUint,
        #[arg(long, default_value = "ci")]
        code: CodeFlavor,
    },
    /// Splits a 0/1 string into consecutive codewords.
    Decode {
        bits: BitWord,
        #[arg(long, default_value = "ci")]
        code: CodeFlavor,
    },
    /// Canonical and even continued fraction of a rational.
    Cfe { x: String },
    /// Perron's schema for "[b0; b1, ...]".
    Convergents { cfe: String },
    /// Forward map: address and dyadic image of a rational in [0,1].
    Qmf { x: String },
    /// Inverse map from an address (0/1 word) or a dyadic (a/2^k, .bits, p/q).
    QmfInv { input: String },
    /// Address in the V1 tree, or its label with --inverse.
    Hat {
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Address in the V tree, or its label with --inverse.
    Doublehat {
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Minkowski's function and the Stern-Brocot address, or the label of an
    /// SB address with --inverse.
    Minkowski {
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Exports the top levels of a tree.
    Tree {
        #[arg(long)]
        kind: TreeKind,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "json")]
        format: ExportFormat,
    },
    /// First n breadth-first labels.
    Seq {
        #[arg(long)]
        kind: TreeKind,
        #[arg(short = 'n', long)]
        n: u64,
    },
    /// Longest address per denominator, normalized by log2 q.
    Coverage {
        #[arg(long)]
        kind: TreeKind,
        #[arg(long)]
        qmax: u64,
    },
    /// Label, index and depth of the node at an address.
    Node {
        #[arg(long)]
        kind: TreeKind,
        address: BitWord,
    },
    /// Address of a rational in a tree.
    Address {
        #[arg(long)]
        kind: TreeKind,
        x: String,
    },
    /// Word, node index and dyadic label of a node; give exactly one.
    Iota {
        #[arg(long, conflicts_with_all = ["index", "dyadic"])]
        word: Option<BitWord>,
        #[arg(long, conflicts_with = "dyadic")]
        index: Option<NodeIndex>,
        #[arg(long)]
        dyadic: Option<Dyadic>,
    },
    /// State path of the decoding automaton along a word.
    Fsm { word: BitWord },
    /// Exhaustive checks.
    Verify {
        #[command(subcommand)]
        check: Verify,
    },
    /// Entropies, constants and grid measurements.
    Measure {
        #[command(subcommand)]
        what: Measure,
    },
    /// One-sided difference quotient of the dyadic image at a rational.
    ProbeDerivative {
        x: String,
        #[arg(long)]
        side: Side,
        /// Bits beyond the codeword length.
        #[arg(long)]
        n: u64,
        /// Use the absolute step 2^-n instead.
        #[arg(long)]
        absolute: bool,
    },
    /// CSV of x, qmf_bar(x), qmf_bar(x) - x over the grid a/2^k.
    Plotdata {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Consecutive determinants of the in-order linearization.
    Determinants(DepthArgs),
    /// Weighted-mediant identity at interior nodes.
    Mediants(DepthArgs),
    /// Every reduced fraction up to qmax appears exactly once.
    Bijection {
        #[command(flatten)]
        tree: DepthArgs,
        #[arg(long)]
        qmax: u64,
    },
    /// 8x/9 <= inverse(x) <= x <= forward(x) <= 9x/8 on a/2^k.
    Envelope {
        #[arg(long)]
        k: u32,
    },
    /// Parabolic upper bound on dyadic bands up to k.
    Parabola {
        #[arg(long)]
        k: u32,
    },
    /// Random order-preservation check.
    Monotone {
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_den: u64,
    },
}

#[derive(Args, Debug)]
struct DepthArgs {
    #[arg(long, default_value = "v10")]
    kind: TreeKind,
    #[arg(long)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum Measure {
    /// Entropy of a code under the Gauss-Kuzmin distribution.
    Entropy {
        #[arg(long)]
        code: EntropyCode,
    },
    /// Truncated product for Khinchin's constant.
    Khinchin {
        #[arg(long, default_value_t = 10_000_000)]
        bmax: u64,
    },
    /// Left Riemann sum of qmf_bar on a/2^k.
    Integral {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        exact: bool,
    },
    /// Polygonal arc length on a/2^k.
    Arclength {
        #[arg(long)]
        k: u32,
    },
    /// Kraft sum for the depth bound lambda * log2 q.
    Kraft {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 64)]
        bmax: u64,
    },
    /// max |qmf_bar(x/2) - qmf_bar(x)/2| on a/2^k.
    Selfsim {
        #[arg(long)]
        k: u32,
    },
}

/// Result of one command before rendering.
struct Report {
    text: String,
    json: Value,
    failures: u64,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Report {
        Report {
            text: text.into(),
            json,
            failures: 0,
        }
    }
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CmdResult = std::result::Result<Report, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    let result = execute(&cli, err);
    let elapsed = start.elapsed();
    match result {
        Ok(report) => {
            let code = if report.failures > 0 { EXIT_VERIFY } else { EXIT_OK };
            let written = if cli.json {
                let mut env = json!({
                    "command": name,
                    "input": argv.get(1..).unwrap_or_default(),
                    "version": env!("CARGO_PKG_VERSION"),
                    "ok": report.failures == 0,
                    "result": report.json,
                });
                if !cli.no_timing {
                    env["elapsed_ms"] = json!(elapsed.as_secs_f64() * 1e3);
                }
                writeln!(out, "{}", serde_json::to_string_pretty(&env).expect("json"))
            } else {
                write!(out, "{}", report.text)
            };
            if written.is_err() {
                return EXIT_DOMAIN;
            }
            code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            if cli.json {
                let env = json!({
                    "command": name,
                    "input": argv.get(1..).unwrap_or_default(),
                    "version": env!("CARGO_PKG_VERSION"),
                    "ok": false,
                    "error": e.to_string(),
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&env).expect("json"));
            }
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Encode { .. } => "encode",
        Command::Decode { .. } => "decode",
        Command::Cfe { .. } => "cfe",
        Command::Convergents { .. } => "convergents",
        Command::Qmf { .. } => "qmf",
        Command::QmfInv { .. } => "qmf-inv",
        Command::Hat { .. } => "hat",
        Command::Doublehat { .. } => "doublehat",
        Command::Minkowski { .. } => "minkowski",
        Command::Tree { .. } => "tree",
        Command::Seq { .. } => "seq",
        Command::Coverage { .. } => "coverage",
        Command::Node { .. } => "node",
        Command::Address { .. } => "address",
        Command::Iota { .. } => "iota",
        Command::Fsm { .. } => "fsm",
        Command::Verify { check } => match check {
            Verify::Determinants(_) => "verify determinants",
            Verify::Mediants(_) => "verify mediants",
            Verify::Bijection { .. } => "verify bijection",
            Verify::Envelope { .. } => "verify envelope",
            Verify::Parabola { .. } => "verify parabola",
            Verify::Monotone { .. } => "verify monotone",
        },
        Command::Measure { what } => match what {
            Measure::Entropy { .. } => "measure entropy",
            Measure::Khinchin { .. } => "measure khinchin",
            Measure::Integral { .. } => "measure integral",
            Measure::Arclength { .. } => "measure arclength",
            Measure::Kraft { .. } => "measure kraft",
            Measure::Selfsim { .. } => "measure selfsim",
        },
        Command::ProbeDerivative { .. } => "probe-derivative",
        Command::Plotdata { .. } => "plotdata",
    }
}

/// Rejects sizes above [`BIG_THRESHOLD`] unless `--big` was given, and
/// announces long runs on the diagnostic stream.
fn gate(cli: &Cli, what: &str, size: u64, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    if size <= BIG_THRESHOLD {
        return Ok(());
    }
    if !cli.big {
        return Err(Failure::Usage(format!(
            "{what} {size} exceeds {BIG_THRESHOLD}; pass --big to run it"
        )));
    }
    let _ = writeln!(err, "vtree: {what} {size}, this can take a long time");
    Ok(())
}

fn words(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn failures_text(list: &[String]) -> String {
    list.iter().map(|f| format!("  {f}\n")).collect()
}

fn execute(cli: &Cli, err: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Encode { b, code } => {
            let w = encode(b, *code)?;
            Ok(Report::ok(
                format!("{w}\n"),
                json!({"b": b.to_string(), "code": code.name(), "codeword": w.to_string(), "length": w.len()}),
            ))
        }
        Command::Decode { bits, code } => {
            let mut values = Vec::new();
            let mut rest = bits.bits();
            while !rest.is_empty() {
                match decode_prefix(rest, false, *code)? {
                    Decoded::Value { b, consumed } if consumed <= rest.len() => {
                        values.push(b.to_string());
                        rest = &rest[consumed..];
                    }
                    _ => {
                        return Err(Error::MalformedStream(format!(
                            "incomplete codeword {:?} at the end",
                            BitWord::from(rest).to_string()
                        ))
                        .into())
                    }
                }
            }
            Ok(Report::ok(
                format!("{}\n", values.join(" ")),
                json!({"code": code.name(), "values": values}),
            ))
        }
        Command::Cfe { x } => {
            let r = parse_rational(x)?;
            let cfe = Cfe::expand(&r);
            let even = EvenCfe::of(&r).ok();
            let mut text = format!("{} = {cfe}\n", format_rational(&r));
            if let Some(e) = &even {
                text += &format!("even: {e}\n");
            }
            Ok(Report::ok(
                text,
                json!({
                    "x": format_rational(&r),
                    "height": height(&r).to_string(),
                    "b0": cfe.b0.to_string(),
                    "pds": cfe.pds.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "even_pds": even.map(|e| e.pds().iter().map(ToString::to_string).collect::<Vec<_>>()),
                }),
            ))
        }
        Command::Convergents { cfe } => {
            let c: Cfe = cfe.parse()?;
            let rows = c.convergents();
            let text: String = rows
                .iter()
                .enumerate()
                .map(|(i, r)| format!("{i} {}/{}\n", r.a, r.b))
                .collect();
            let js: Vec<Value> = rows
                .iter()
                .map(|r| json!({"a": r.a.to_string(), "b": r.b.to_string()}))
                .collect();
            Ok(Report::ok(text, json!({"cfe": c.to_string(), "rows": js})))
        }
        Command::Qmf { x } => {
            let r = parse_rational(x)?;
            if r == Rational::from_integer(0.into()) || r == Rational::from_integer(1.into()) {
                let y = qmf_bar_closed(&r)?;
                return Ok(Report::ok(
                    format!("dyadic {}\n", format_rational(&y)),
                    json!({"x": format_rational(&r), "dyadic": format_rational(&y)}),
                ));
            }
            let t = qmf_trace(&r)?;
            let pds: Vec<String> = t.pds.iter().map(ToString::to_string).collect();
            let text = format!(
                "address {}\ndyadic {}/{}\neven pds {}\ncodeword {}\n",
                t.address.display(),
                t.dyadic.numerator(),
                BigUint::from(1u32) << t.dyadic.exponent(),
                pds.join(","),
                t.codeword
            );
            let mut js = serde_json::to_value(&t).expect("trace json");
            js["x"] = json!(format_rational(&r));
            js["dyadic_value"] = json!(format_rational(&t.dyadic.to_rational()));
            Ok(Report::ok(text, js))
        }
        Command::QmfInv { input } => {
            let s = input.trim();
            let (x, from) = if s.contains('/') || s.starts_with('.') || s.starts_with("0.") {
                let y = match s.parse::<Dyadic>() {
                    Ok(d) => qmf_bar_inverse(&d)?,
                    Err(_) => qmf_bar_inverse_closed(&parse_rational(s)?)?,
                };
                (y, "dyadic")
            } else {
                (qmf_inverse(&s.parse()?)?, "address")
            };
            Ok(Report::ok(
                format!("{}\n", format_rational(&x)),
                json!({"input": s, "as": from, "x": format_rational(&x)}),
            ))
        }
        Command::Hat { input, inverse } => {
            tree_map(input, *inverse, hat_forward, hat_inverse)
        }
        Command::Doublehat { input, inverse } => {
            tree_map(input, *inverse, doublehat_forward, doublehat_inverse)
        }
        Command::Minkowski { input, inverse } => {
            if *inverse {
                let x = sb_inverse(&input.parse()?)?;
                return Ok(Report::ok(
                    format!("{}\n", format_rational(&x)),
                    json!({"address": input, "x": format_rational(&x)}),
                ));
            }
            let x = parse_rational(input)?;
            let q = minkowski_q(&x)?;
            let qu = minkowski_q_unary(&x)?;
            let addr = sb_forward(&x)?;
            debug_assert_eq!(q, qu);
            Ok(Report::ok(
                format!("?(x) = {}\nsb address {}\n", format_rational(&q.to_rational()), addr.display()),
                json!({
                    "x": format_rational(&x),
                    "minkowski": format_rational(&q.to_rational()),
                    "unary_codeword_value": format_rational(&qu.to_rational()),
                    "sb_address": addr.to_string(),
                }),
            ))
        }
        Command::Tree { kind, depth, format } => {
            gate(cli, "depth", *depth as u64, err)?;
            let s = export_tree(*kind, *depth, *format)?;
            let js = match format {
                ExportFormat::Json => serde_json::from_str(&s).unwrap_or(Value::String(s.clone())),
                _ => Value::String(s.clone()),
            };
            Ok(Report::ok(s, js))
        }
        Command::Seq { kind, n } => {
            let v = words(&sequence(*kind, *n)?);
            Ok(Report::ok(format!("{}\n", v.join(", ")), json!({"kind": kind.name(), "terms": v})))
        }
        Command::Coverage { kind, qmax } => {
            if *qmax < 2 {
                return Err(Error::InvalidArgument(format!("qmax must be at least 2, got {qmax}")).into());
            }
            let mut rows = Vec::new();
            let mut text = String::from("q max_len argmax lambda\n");
            let mut worst: Option<(f64, u64)> = None;
            for q in 2..=*qmax {
                let c = coverage_lambda(*kind, q)?;
                text += &format!("{} {} {} {:.6}\n", c.q, c.max_len, c.argmax, c.lambda);
                if worst.map_or(true, |(l, _)| c.lambda > l) {
                    worst = Some((c.lambda, q));
                }
                rows.push(c);
            }
            let (l, q) = worst.expect("qmax >= 2");
            text += &format!("max lambda {l:.6} at q = {q}\n");
            Ok(Report::ok(text, json!({"kind": kind.name(), "rows": rows, "max_lambda": l, "argmax_q": q})))
        }
        Command::Node { kind, address } => {
            let n = Node::at(*kind, address.clone())?;
            Ok(Report::ok(
                format!(
                    "{} index {} depth {} label {}\n",
                    n.address.display(),
                    n.index,
                    n.depth,
                    format_rational(&n.label)
                ),
                n.to_json(),
            ))
        }
        Command::Address { kind, x } => {
            let r = parse_rational(x)?;
            let a = address_of(*kind, &r)?;
            Ok(Report::ok(
                format!("{}\n", a.display()),
                json!({"kind": kind.name(), "x": format_rational(&r), "address": a.to_string(), "depth": a.len()}),
            ))
        }
        Command::Iota { word, index, dyadic } => {
            let (w, n, d) = match (word, index, dyadic) {
                (Some(w), None, None) => (w.clone(), word_to_index(w), word_to_dyadic(w)),
                (None, Some(n), None) => (index_to_word(n), n.clone(), index_to_dyadic(n)),
                (None, None, Some(d)) => (dyadic_to_word(d), dyadic_to_index(d), d.clone()),
                _ => return Err(Failure::Usage("give exactly one of --word, --index, --dyadic".into())),
            };
            Ok(Report::ok(
                format!("word {} index {n} dyadic {d}\n", w.display()),
                json!({"word": w.to_string(), "index": n.to_string(), "dyadic": d.to_string()}),
            ))
        }
        Command::Fsm { word } => {
            let mut s = FsmState::START;
            let mut path = vec![s.to_string()];
            for &bit in word.bits() {
                s = fsm_step(s, bit);
                path.push(s.to_string());
            }
            debug_assert_eq!(s, fsm_run(word));
            Ok(Report::ok(
                format!("{}\n", path.join(" ")),
                json!({"word": word.to_string(), "path": path, "state": s.to_string()}),
            ))
        }
        Command::Verify { check } => verify(cli, check, err),
        Command::Measure { what } => measure(cli, what, err),
        Command::ProbeDerivative { x, side, n, absolute } => {
            let r = parse_rational(x)?;
            let p = if *absolute {
                derivative_probe_step(&r, *side, *n)?
            } else {
                derivative_probe(&r, *side, *n)?
            };
            Ok(Report::ok(
                format!(
                    "quotient {}\npredicted {}\nrelative error {:.3e}\n",
                    format_rational(&p.quotient),
                    format_rational(&p.predicted_limit),
                    p.relative_error()
                ),
                p.to_json(),
            ))
        }
        Command::Plotdata { k } => {
            gate(cli, "k", *k as u64, err)?;
            let csv = plotdata(*k)?;
            Ok(Report::ok(csv.clone(), Value::String(csv)))
        }
    }
}

fn tree_map(
    input: &str,
    inverse: bool,
    forward: fn(&Rational) -> Result<BitWord>,
    backward: fn(&BitWord) -> Result<Rational>,
) -> CmdResult {
    if inverse {
        let x = backward(&input.parse()?)?;
        Ok(Report::ok(
            format!("{}\n", format_rational(&x)),
            json!({"address": input, "x": format_rational(&x)}),
        ))
    } else {
        let x = parse_rational(input)?;
        let a = forward(&x)?;
        Ok(Report::ok(
            format!("{}\n", a.display()),
            json!({"x": format_rational(&x), "address": a.to_string(), "depth": a.len()}),
        ))
    }
}

fn verify(cli: &Cli, check: &Verify, err: &mut dyn Write) -> CmdResult {
    let report = match check {
        Verify::Determinants(a) => {
            gate(cli, "depth", a.depth as u64, err)?;
            let r = verify_determinants(a.kind, a.depth)?;
            let exps: Vec<String> = r.exponents.iter().map(|(e, c)| format!("2^{e}: {c}")).collect();
            let mut text = format!(
                "{} pairs, {} failures\nexponents {}\n",
                r.pairs,
                r.failure_count,
                exps.join(", ")
            );
            if a.kind == TreeKind::V10 {
                text += &format!("literal table mismatches {}\n", r.literal_table_mismatches);
            }
            text += &failures_text(&r.failures);
            Report {
                text,
                failures: r.failure_count,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
        Verify::Mediants(a) => {
            gate(cli, "depth", a.depth as u64, err)?;
            let r = verify_mediants(a.kind, a.depth)?;
            Report {
                text: format!(
                    "{} nodes, {} plain mediants, {} failures\n{}",
                    r.checked,
                    r.plain_mediants,
                    r.failure_count,
                    failures_text(&r.failures)
                ),
                failures: r.failure_count,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
        Verify::Bijection { tree, qmax } => {
            gate(cli, "depth", tree.depth as u64, err)?;
            let r = bijectivity_scan(tree.kind, tree.depth, *qmax)?;
            let mut text = format!(
                "{} of {} fractions found, {} failures\n",
                r.found,
                r.expected,
                r.failures()
            );
            for (label, list) in [("missing", &r.missing), ("duplicate", &r.duplicates), ("out of domain", &r.out_of_domain)] {
                for f in list.iter().take(100) {
                    text += &format!("  {label} {f}\n");
                }
            }
            Report {
                text,
                failures: r.failures() as u64,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
        Verify::Envelope { k } => {
            gate(cli, "k", *k as u64, err)?;
            let r = verify_envelope(*k)?;
            let failures = (r.violations.len() + r.anchor_mismatches.len()) as u64;
            Report {
                text: format!(
                    "{} points, {} failures\nleft equalities {}, middle {}, right {}\n{}{}",
                    r.points,
                    failures,
                    r.left_equalities.len(),
                    r.middle_equalities.len(),
                    r.right_equalities.len(),
                    failures_text(&r.violations),
                    failures_text(&r.anchor_mismatches)
                ),
                failures,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
        Verify::Parabola { k } => {
            gate(cli, "k", *k as u64, err)?;
            let r = verify_parabola(*k)?;
            let failures = (r.violations.len() + r.anchor_mismatches.len()) as u64;
            Report {
                text: format!(
                    "{} points, {} failures, {} equalities\n{}{}",
                    r.points,
                    failures,
                    r.equalities.len(),
                    failures_text(&r.violations),
                    failures_text(&r.anchor_mismatches)
                ),
                failures,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
        Verify::Monotone { pairs, seed, max_den } => {
            let r = verify_monotone(*pairs, *seed, *max_den)?;
            Report {
                text: format!("{} pairs, {} failures\n{}", r.pairs, r.failures.len(), failures_text(&r.failures)),
                failures: r.failures.len() as u64,
                json: serde_json::to_value(&r).expect("json"),
            }
        }
    };
    Ok(report)
}

fn measure(cli: &Cli, what: &Measure, err: &mut dyn Write) -> CmdResult {
    match what {
        Measure::Entropy { code } => {
            let r = entropy(*code);
            let text = match r.finite() {
                Some(v) => format!("{v:.8} +- {:.2e}\n", r.error_bound),
                None => format!("divergent (partial sum {:.6})\n", r.partial.unwrap_or(f64::NAN)),
            };
            Ok(Report::ok(text, serde_json::to_value(r).expect("json")))
        }
        Measure::Khinchin { bmax } => {
            let r = khinchin_estimate(*bmax)?;
            Ok(Report::ok(
                format!("{:.8} (+{:.2e})\n", r.value, r.error_bound),
                serde_json::to_value(r).expect("json"),
            ))
        }
        Measure::Integral { k, exact } => {
            gate(cli, "k", *k as u64, err)?;
            if *exact {
                let v = riemann_integral_exact(*k)?;
                Ok(Report::ok(
                    format!("{}\n", format_rational(&v)),
                    json!({"k": k, "exact": format_rational(&v)}),
                ))
            } else {
                let v = riemann_integral(*k)?;
                Ok(Report::ok(format!("{v:.12}\n"), json!({"k": k, "value": v})))
            }
        }
        Measure::Arclength { k } => {
            gate(cli, "k", *k as u64, err)?;
            let v = arc_length(*k)?;
            Ok(Report::ok(format!("{v:.12}\n"), json!({"k": k, "value": v})))
        }
        Measure::Kraft { lambda, bmax } => {
            let threshold = optimality_threshold();
            let r = kraft_diagnostic(lambda.unwrap_or(threshold), *bmax)?;
            Ok(Report::ok(
                format!(
                    "threshold {threshold:.6}\nlambda {} sum {:.6}{}\n",
                    r.lambda,
                    r.sum,
                    if r.violates() { " (violates Kraft)" } else { "" }
                ),
                json!({"threshold": threshold, "report": r, "violates": r.violates()}),
            ))
        }
        Measure::Selfsim { k } => {
            gate(cli, "k", *k as u64, err)?;
            let r = self_similarity_stat(*k)?;
            Ok(Report::ok(
                format!("max deviation {:.6e} at {}\n", r.max_deviation, r.argmax),
                serde_json::to_value(&r).expect("json"),
            ))
        }
    }
}
