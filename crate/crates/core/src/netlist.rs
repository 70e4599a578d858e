//! Text formats: netlists, truth tables and template libraries.
//!
//! A netlist declares its lines and their roles in a header, then lists
//! gates between `.begin` and `.end`:
//!
//! ```text
//! .version revseq-1
//! .numlines 3
//! .lines c t q
//! .inputs c t
//! .state q
//! .statemap q->q
//! .init q=0
//! .constants
//! .refresh
//! .outputs q
//! .begin
//! t3 c t q
//! .end
//! ```
//!
//! Gate mnemonics are `t1 x` (NOT), `t2 c x` (CNOT), `t3 c1 c2 x`
//! (Toffoli) and `f3 c a b` (Fredkin, expanded to three NCT gates). An
//! output may be renamed with `name=line`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitVector;
use crate::circuit::{Circuit, Gate, Line};
use crate::corpus::macros::{expand_macro, MacroKind};
use crate::opt::Template;
use crate::sim::{Permutation, SequentialCircuit};

pub const FORMAT_VERSION: &str = "revseq-1";

/// A parse failure with the 1-based source line it was found on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Refuse to expand composite gates such as `f3`.
    pub keep_foreign: bool,
}

/// Non-empty, non-comment source lines with their 1-based numbers.
fn source_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn check_identifier(line: usize, name: &str) -> Result<(), ParseError> {
    if name.starts_with('-') || name.starts_with('!') || name.ends_with('\'') {
        return Err(ParseError::new(
            line,
            format!("negative control {name:?} is not supported"),
        ));
    }
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(ParseError::new(line, format!("invalid identifier {name:?}")))
    }
}

fn split_pair<'a>(line: usize, arg: &'a str, sep: &str) -> Result<(&'a str, &'a str), ParseError> {
    arg.split_once(sep)
        .ok_or_else(|| ParseError::new(line, format!("expected a{sep}b, got {arg:?}")))
}

fn parse_bit(line: usize, s: &str) -> Result<bool, ParseError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(ParseError::new(line, format!("{other:?} is not a bit"))),
    }
}

/// Parses one gate statement into NCT gates.
fn parse_gate(
    line: usize,
    words: &[&str],
    lookup: &dyn Fn(&str) -> Result<Line, ParseError>,
    options: ParseOptions,
) -> Result<Vec<Gate>, ParseError> {
    let (op, args) = words.split_first().expect("non-empty statement");
    let expected = match *op {
        "t1" => 1,
        "t2" => 2,
        "t3" => 3,
        "f3" => 3,
        other => return Err(ParseError::new(line, format!("unknown gate {other:?}"))),
    };
    if args.len() != expected {
        return Err(ParseError::new(
            line,
            format!("{op} takes {expected} lines, got {}", args.len()),
        ));
    }
    for a in args {
        check_identifier(line, a)?;
    }
    let lines = args
        .iter()
        .map(|a| lookup(a))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, l) in lines.iter().enumerate() {
        if lines[..i].contains(l) {
            return Err(ParseError::new(line, "duplicate control/target overlap"));
        }
    }
    if *op == "f3" {
        if options.keep_foreign {
            return Err(ParseError::new(
                line,
                "foreign gate f3 must be expanded to NCT (drop --keep-foreign)",
            ));
        }
        return Ok(expand_macro(MacroKind::Fredkin, &lines));
    }
    let (target, controls) = lines.split_last().expect("at least one line");
    Ok(vec![Gate::from_controls(controls, *target).expect("arity checked")])
}

#[derive(Default)]
struct Header<'a> {
    lines: Option<(usize, Vec<&'a str>)>,
    numlines: Option<(usize, usize)>,
    inputs: Vec<&'a str>,
    state: Vec<&'a str>,
    statemap: Vec<(usize, &'a str, &'a str)>,
    init: Vec<(usize, &'a str, bool)>,
    constants: Vec<(&'a str, bool)>,
    refresh: Vec<(&'a str, bool)>,
    outputs: Vec<(&'a str, &'a str)>,
}

pub fn parse_netlist(text: &str) -> Result<SequentialCircuit, ParseError> {
    parse_netlist_with(text, ParseOptions::default())
}

pub fn parse_netlist_with(text: &str, options: ParseOptions) -> Result<SequentialCircuit, ParseError> {
    let mut h = Header::default();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut in_body = false;
    let mut begin_line = None;
    let mut end_line = None;
    let mut last_line = 0;

    for (n, words) in source_lines(text) {
        last_line = n;
        if end_line.is_some() {
            return Err(ParseError::new(n, "content after .end"));
        }
        let head = words[0];
        if in_body {
            if head == ".end" {
                end_line = Some(n);
                in_body = false;
                continue;
            }
            if head.starts_with('.') {
                return Err(ParseError::new(n, format!("directive {head} inside body")));
            }
            let names = &h.lines.as_ref().expect(".begin requires .lines").1;
            let lookup = |name: &str| {
                names
                    .iter()
                    .position(|x| *x == name)
                    .ok_or_else(|| ParseError::new(n, format!("undeclared line {name:?}")))
            };
            gates.extend(parse_gate(n, &words, &lookup, options)?);
            continue;
        }
        if !head.starts_with('.') {
            return Err(ParseError::new(n, format!("gate {head:?} outside .begin/.end")));
        }
        let args = &words[1..];
        let known = [
            ".version", ".numlines", ".lines", ".inputs", ".state", ".statemap", ".init",
            ".constants", ".refresh", ".outputs", ".begin", ".end",
        ];
        if !known.contains(&head) {
            return Err(ParseError::new(n, format!("unknown directive {head}")));
        }
        if let Some(prev) = seen.insert(head, n) {
            return Err(ParseError::new(
                n,
                format!("directive {head} repeated (first on line {prev})"),
            ));
        }
        if !matches!(head, ".version" | ".numlines" | ".lines" | ".end") && h.lines.is_none() {
            return Err(ParseError::new(n, format!("{head} before .lines")));
        }
        let declared = |name: &str| -> Result<(), ParseError> {
            check_identifier(n, name)?;
            let names = &h.lines.as_ref().expect("checked above").1;
            if names.contains(&name) {
                Ok(())
            } else {
                Err(ParseError::new(n, format!("undeclared line {name:?}")))
            }
        };
        match head {
            ".version" => {
                if args != [FORMAT_VERSION] {
                    return Err(ParseError::new(
                        n,
                        format!("unsupported version (expected {FORMAT_VERSION})"),
                    ));
                }
            }
            ".numlines" => {
                let value = match args {
                    [v] => v.parse::<usize>().ok(),
                    _ => None,
                }
                .ok_or_else(|| ParseError::new(n, ".numlines takes one count"))?;
                h.numlines = Some((n, value));
            }
            ".lines" => {
                for (i, name) in args.iter().enumerate() {
                    check_identifier(n, name)?;
                    if args[..i].contains(name) {
                        return Err(ParseError::new(
                            n,
                            format!("duplicate line declaration {name:?}"),
                        ));
                    }
                }
                h.lines = Some((n, args.to_vec()));
            }
            ".inputs" => {
                for a in args {
                    declared(a)?;
                }
                h.inputs = args.to_vec();
            }
            ".state" => {
                for a in args {
                    declared(a)?;
                }
                h.state = args.to_vec();
            }
            ".statemap" => {
                for a in args {
                    let (from, to) = split_pair(n, a, "->")?;
                    declared(from)?;
                    declared(to)?;
                    h.statemap.push((n, from, to));
                }
            }
            ".init" => {
                for a in args {
                    let (name, bit) = split_pair(n, a, "=")?;
                    declared(name)?;
                    h.init.push((n, name, parse_bit(n, bit)?));
                }
            }
            ".constants" | ".refresh" => {
                let mut out = Vec::new();
                for a in args {
                    let (name, bit) = split_pair(n, a, "=")?;
                    declared(name)?;
                    out.push((name, parse_bit(n, bit)?));
                }
                if head == ".constants" {
                    h.constants = out;
                } else {
                    h.refresh = out;
                }
            }
            ".outputs" => {
                for a in args {
                    let (name, line) = a.split_once('=').unwrap_or((a, a));
                    check_identifier(n, name)?;
                    declared(line)?;
                    h.outputs.push((name, line));
                }
            }
            ".begin" => {
                in_body = true;
                begin_line = Some(n);
            }
            ".end" => return Err(ParseError::new(n, ".end without .begin")),
            _ => unreachable!("directive list checked above"),
        }
    }

    let eof = last_line.max(1);
    let (lines_at, names) = h
        .lines
        .clone()
        .ok_or_else(|| ParseError::new(eof, "missing .lines"))?;
    if begin_line.is_none() {
        return Err(ParseError::new(eof, "missing .begin"));
    }
    let end = end_line.ok_or_else(|| ParseError::new(eof, "missing .end"))?;
    if let Some((at, count)) = h.numlines {
        if count != names.len() {
            return Err(ParseError::new(
                at,
                format!(".numlines {count} but .lines declares {} (line {lines_at})", names.len()),
            ));
        }
    }

    let body = Circuit::with_line_names(names.iter().map(|s| s.to_string()).collect(), gates);
    let mut b = SequentialCircuit::builder(body);
    for i in &h.inputs {
        b = b.input(i);
    }
    for s in &h.state {
        b = b.state(s);
    }
    for (_, from, to) in &h.statemap {
        b = b.feedback(from, to);
    }
    for (c, bit) in &h.constants {
        b = b.constant(c, *bit);
    }
    for (r, bit) in &h.refresh {
        b = b.refresh(r, *bit);
    }
    for (name, line) in &h.outputs {
        b = b.output_as(name, line);
    }
    for (_, s, bit) in &h.init {
        b = b.init(s, *bit);
    }
    b.build().map_err(|e| ParseError::new(end, e.to_string()))
}

fn gate_text(g: &Gate, names: &[String]) -> String {
    let mut s = format!("t{}", g.controls().len() + 1);
    for l in g.lines() {
        s.push(' ');
        s.push_str(&names[l]);
    }
    s
}

/// Canonical text: every directive in fixed order, single spaces, one gate
/// per line, trailing newline.
pub fn emit_netlist(seq: &SequentialCircuit) -> String {
    let names = seq.body().line_names();
    let join = |items: Vec<String>| -> String {
        items.into_iter().map(|s| format!(" {s}")).collect()
    };
    let mut out = String::new();
    let _ = writeln!(out, ".version {FORMAT_VERSION}");
    let _ = writeln!(out, ".numlines {}", seq.width());
    let _ = writeln!(out, ".lines{}", join(names.to_vec()));
    let _ = writeln!(
        out,
        ".inputs{}",
        join(seq.input_names().map(str::to_string).collect())
    );
    let _ = writeln!(
        out,
        ".state{}",
        join(seq.state_names().map(str::to_string).collect())
    );
    let _ = writeln!(
        out,
        ".statemap{}",
        join(
            seq.state_vars()
                .iter()
                .map(|v| format!("{}->{}", names[v.output_line], names[v.input_line]))
                .collect()
        )
    );
    let _ = writeln!(
        out,
        ".init{}",
        join(
            seq.state_names()
                .map(|s| format!("{s}={}", u8::from(seq.initial_state()[s])))
                .collect()
        )
    );
    let _ = writeln!(
        out,
        ".constants{}",
        join(
            seq.constants()
                .iter()
                .map(|&(l, b)| format!("{}={}", names[l], u8::from(b)))
                .collect()
        )
    );
    let _ = writeln!(
        out,
        ".refresh{}",
        join(
            seq.refresh_lines()
                .iter()
                .map(|&l| {
                    let bit = seq.constants().iter().find(|(c, _)| *c == l).is_some_and(|c| c.1);
                    format!("{}={}", names[l], u8::from(bit))
                })
                .collect()
        )
    );
    let _ = writeln!(
        out,
        ".outputs{}",
        join(
            seq.outputs()
                .iter()
                .map(|(name, l)| {
                    if *name == names[*l] {
                        name.clone()
                    } else {
                        format!("{name}={}", names[*l])
                    }
                })
                .collect()
        )
    );
    out.push_str(".begin\n");
    for g in seq.body().gates() {
        out.push_str(&gate_text(g, names));
        out.push('\n');
    }
    out.push_str(".end\n");
    out
}

/// Rows of a truth-table file, in file order.
pub fn parse_truth_table(text: &str) -> Result<Vec<(BitVector, BitVector)>, ParseError> {
    let mut rows: Vec<(BitVector, BitVector)> = Vec::new();
    for (n, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| ParseError::new(n, "expected `bits -> bits`"))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<BitVector>()
                .map_err(|e| ParseError::new(n, e.to_string()))
        };
        let (i, o) = (parse(lhs)?, parse(rhs)?);
        if i.width() != o.width() {
            return Err(ParseError::new(n, "input and output widths differ"));
        }
        if let Some((first, _)) = rows.first() {
            if first.width() != i.width() {
                return Err(ParseError::new(n, "row width differs from earlier rows"));
            }
        }
        if rows.iter().any(|(prev, _)| *prev == i) {
            return Err(ParseError::new(n, format!("input {i} listed twice")));
        }
        rows.push((i, o));
    }
    Ok(rows)
}

/// Turns complete truth-table rows into a permutation.
pub fn table_to_permutation(rows: &[(BitVector, BitVector)]) -> Result<Permutation, String> {
    let width = rows.first().map_or(0, |(i, _)| i.width());
    if rows.len() as u64 != 1u64 << width.min(63) {
        return Err(format!(
            "table has {} rows but width {width} needs {}",
            rows.len(),
            1u64 << width.min(63)
        ));
    }
    let mut table = vec![0u64; rows.len()];
    for (i, o) in rows {
        table[i.value() as usize] = o.value();
    }
    Permutation::new(width, table).map_err(|e| e.to_string())
}

pub fn emit_truth_table(perm: &Permutation) -> String {
    let mut out = String::new();
    for (i, o) in perm.rows() {
        let _ = writeln!(out, "{i} -> {o}");
    }
    out
}

/// `.template <width>` blocks over lines `x0..x<width-1>`, each checked to
/// be an identity.
pub fn parse_templates(text: &str) -> Result<Vec<Template>, ParseError> {
    let mut out = Vec::new();
    let mut open: Option<(usize, usize, Vec<Gate>)> = None;
    let mut last = 0;
    for (n, words) in source_lines(text) {
        last = n;
        match (words[0], open.as_mut()) {
            (".template", None) => {
                let width = match words[1..] {
                    [w] => w.parse::<usize>().ok(),
                    _ => None,
                }
                .ok_or_else(|| ParseError::new(n, ".template takes one width"))?;
                open = Some((n, width, Vec::new()));
            }
            (".template", Some(_)) => {
                return Err(ParseError::new(n, "nested .template (missing .end)"))
            }
            (".end", Some(_)) => {
                let (at, width, gates) = open.take().expect("open block");
                let t = Template::new(width, gates).map_err(|e| ParseError::new(at, e.to_string()))?;
                out.push(t);
            }
            (".end", None) => return Err(ParseError::new(n, ".end without .template")),
            (d, _) if d.starts_with('.') => {
                return Err(ParseError::new(n, format!("unknown directive {d}")))
            }
            (_, None) => return Err(ParseError::new(n, "gate outside .template block")),
            (_, Some((_, width, gates))) => {
                let w = *width;
                let lookup = |name: &str| {
                    name.strip_prefix('x')
                        .and_then(|i| i.parse::<usize>().ok())
                        .filter(|&i| i < w && format!("x{i}") == name)
                        .ok_or_else(|| ParseError::new(n, format!("undeclared line {name:?}")))
                };
                gates.extend(parse_gate(n, &words, &lookup, ParseOptions::default())?);
            }
        }
    }
    if let Some((at, _, _)) = open {
        return Err(ParseError::new(last.max(at), "missing .end"));
    }
    Ok(out)
}

pub fn emit_templates(templates: &[Template]) -> String {
    let mut out = String::new();
    for t in templates {
        let names = crate::circuit::default_names(t.width());
        let _ = writeln!(out, ".template {}", t.width());
        for g in t.gates() {
            let _ = writeln!(out, "{}", gate_text(g, &names));
        }
        out.push_str(".end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const T_D3: &str = ".version revseq-1
.numlines 3
.lines c t q
.inputs c t
.state q
.statemap q->q
.init q=0
.constants
.refresh
.outputs q
.begin
t3 c t q
.end
";

    #[test]
    fn canonical_toffoli_register() {
        let seq = parse_netlist(T_D3).unwrap();
        assert_eq!(seq.width(), 3);
        assert_eq!(seq.body().gates(), &[Gate::toffoli(0, 1, 2)]);
        assert_eq!(emit_netlist(&seq), T_D3);
    }

    #[test]
    fn minimal_document_with_comments() {
        let text = "# register\n.lines c t q # three lines\n.inputs c t\n.state q\n.outputs q\n.begin\nt3 c t q\n.end\n";
        let seq = parse_netlist(text).unwrap();
        assert_eq!(emit_netlist(&seq), T_D3);
    }

    #[test]
    fn fredkin_expands_unless_kept() {
        let text = ".lines c a b\n.inputs c a b\n.outputs a b\n.begin\nf3 c a b\n.end\n";
        assert_eq!(parse_netlist(text).unwrap().body().len(), 3);
        let err = parse_netlist_with(text, ParseOptions { keep_foreign: true }).unwrap_err();
        assert_eq!(err.line, 5);
    }

    #[test]
    fn error_line_numbers() {
        let cases: &[(&str, usize, &str)] = &[
            (".lines a b\n.bogus\n", 2, "unknown directive"),
            (".lines a b\n.inputs a b\n.begin\nt2 a z\n.end\n", 4, "undeclared line"),
            (".lines a b\n.inputs a b\n.begin\nt3 a a b\n.end\n", 4, "duplicate control/target overlap"),
            (".lines a b a\n", 1, "duplicate line declaration"),
            (".lines a\n.inputs a\n", 2, "missing .begin"),
            (".lines a\n.inputs a\n.begin\nt1 a\n", 4, "missing .end"),
            (".lines a b\n.inputs a b\n.begin\nt2 -a b\n.end\n", 4, "negative control"),
            (".numlines 3\n.lines a b\n.inputs a b\n.begin\n.end\n", 1, ".numlines"),
        ];
        for (text, line, needle) in cases {
            let err = parse_netlist(text).unwrap_err();
            assert_eq!(err.line, *line, "{text:?}: {err}");
            assert!(err.message.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn empty_one_line_circuit() {
        let seq = SequentialCircuit::combinational(Circuit::empty(1)).unwrap();
        let text = emit_netlist(&seq);
        assert!(text.contains(".numlines 1\n"));
        assert!(text.ends_with(".begin\n.end\n"));
        assert_eq!(parse_netlist(&text).unwrap(), seq);
    }

    #[test]
    fn truth_table_round_trip() {
        let text = "# swap\n00 -> 00\n10 -> 01\n01 -> 10\n11 -> 11\n";
        let rows = parse_truth_table(text).unwrap();
        let p = table_to_permutation(&rows).unwrap();
        assert_eq!(p.table(), &[0, 2, 1, 3]);
        assert_eq!(parse_truth_table(&emit_truth_table(&p)).unwrap().len(), 4);
        assert!(parse_truth_table("0 -> 1\n0 -> 0\n").is_err());
        assert!(table_to_permutation(&parse_truth_table("0 -> 1\n").unwrap()).is_err());
    }

    #[test]
    fn template_file_round_trip() {
        let text = ".template 2\nt2 x0 x1\nt2 x0 x1\n.end\n";
        let ts = parse_templates(text).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(emit_templates(&ts), text);
        let bad = parse_templates(".template 2\nt2 x0 x1\nt2 x1 x0\n.end\n").unwrap_err();
        assert_eq!(bad.line, 1);
        assert!(parse_templates(".template 2\nt2 x0 x2\n.end\n").is_err());
    }
}
